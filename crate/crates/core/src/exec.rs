//! Execution strategy for data-parallel loops.
//!
//! Every parallel loop in the crate goes through these helpers so results are
//! identical in both modes: work is split into index ranges and partial results are
//! combined in index order.

use std::ops::Range;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled, else runs sequentially.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `range.map(f).collect()`, evaluated according to `exec`, in index order.
pub fn map_range<T, F>(exec: Execution, range: Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).collect();
    }
    let _ = exec;
    range.map(f).collect()
}

/// Splits `0..len` into contiguous chunks of `chunk` items.
pub fn chunks(len: usize, chunk: usize) -> Vec<Range<usize>> {
    let chunk = chunk.max(1);
    (0..len.div_ceil(chunk)).map(|i| i * chunk..((i + 1) * chunk).min(len)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let f = |i: usize| (i * i) % 7;
        assert_eq!(map_range(Execution::Sequential, 0..1000, f), map_range(Execution::Parallel, 0..1000, f));
    }

    #[test]
    fn chunking_covers_range() {
        let c = chunks(10, 3);
        assert_eq!(c, vec![0..3, 3..6, 6..9, 9..10]);
        assert!(chunks(0, 4).is_empty());
    }
}
