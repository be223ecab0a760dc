//! Weighted ancilla graph and its resummed pair weights.
//!
//! `A_A` holds the probability of the single faults joining two vertices. Pair weights
//! are `-ln A_S` with `A_S = A_A + A_A^2 + ...`, the summed probability of all fault
//! paths between two vertices. The series is summed term by term: every term is
//! non-negative, so small entries keep full relative precision.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use crate::codes::GtcCode;
use crate::error::{invalid, Error, Result};
use crate::exec::{map_range, Execution};
use crate::noise::NoiseModel;
use crate::paulialg::{Pauli, PauliOperator};

/// Below this gap `1 - rho` the series is replaced by dominant-path weights.
pub const CONDITION_THRESHOLD: f64 = 1e-12;
const MAX_SERIES_TERMS: usize = 20_000;
const POWER_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct SyndromeGraph {
    vertices: usize,
    adjacency: Vec<Vec<(usize, f64)>>,
    a_s: Vec<f64>,
    weights: Vec<f64>,
    spectral_radius: f64,
    path_fallback: bool,
}

impl SyndromeGraph {
    /// Graph on `vertices` vertices from `(u, v, probability)` faults. Parallel faults
    /// add up; self-loops and zero-probability faults are ignored.
    pub fn from_edges(
        vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        exec: Execution,
    ) -> Result<Self> {
        let mut summed: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, p) in edges {
            if u >= vertices || v >= vertices {
                return Err(invalid(format!("edge ({u},{v}) outside a graph of {vertices} vertices")));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("edge probability {p} outside [0, 1]")));
            }
            if u != v && p > 0.0 {
                *summed.entry((u.min(v), u.max(v))).or_default() += p;
            }
        }
        let mut adjacency = vec![Vec::new(); vertices];
        for (&(u, v), &p) in &summed {
            adjacency[u].push((v, p));
            adjacency[v].push((u, p));
        }
        for row in &mut adjacency {
            row.sort_by_key(|&(v, _)| v);
        }
        let spectral_radius = spectral_radius(&adjacency)?;
        let mut g = SyndromeGraph {
            vertices,
            adjacency,
            a_s: Vec::new(),
            weights: Vec::new(),
            spectral_radius,
            path_fallback: false,
        };
        g.resum(exec);
        Ok(g)
    }

    fn resum(&mut self, exec: Execution) {
        let v = self.vertices;
        let gap = 1.0 - self.spectral_radius;
        let tail = if self.spectral_radius == 0.0 {
            0
        } else {
            (CONDITION_THRESHOLD.ln() / self.spectral_radius.ln()).ceil() as usize
        };
        let use_series = gap >= CONDITION_THRESHOLD && tail < MAX_SERIES_TERMS;
        let adjacency = &self.adjacency;
        let rows: Vec<Option<(Vec<f64>, Vec<f64>)>> = map_range(exec, 0..v, |src| {
            let paths = dijkstra(adjacency, src);
            if !use_series {
                return Some((paths.iter().map(|&w| (-w).exp()).collect(), paths));
            }
            let ecc = hop_eccentricity(adjacency, src);
            let terms = ecc + tail;
            if terms > MAX_SERIES_TERMS {
                return None;
            }
            let series = neumann_row(adjacency, src, terms);
            let weights = series
                .iter()
                .zip(&paths)
                .map(|(&s, &w)| if s > 0.0 { -s.ln() } else { w })
                .collect();
            Some((series, weights))
        });
        if rows.iter().any(Option::is_none) {
            self.use_path_weights(exec);
            return;
        }
        self.a_s = vec![0.0; v * v];
        self.weights = vec![0.0; v * v];
        for (u, row) in rows.into_iter().enumerate() {
            let (a, w) = row.expect("checked above");
            self.a_s[u * v..(u + 1) * v].copy_from_slice(&a);
            self.weights[u * v..(u + 1) * v].copy_from_slice(&w);
        }
        self.path_fallback = !use_series;
        self.symmetrize();
    }

    fn use_path_weights(&mut self, exec: Execution) {
        let v = self.vertices;
        let adjacency = &self.adjacency;
        let rows = map_range(exec, 0..v, |src| dijkstra(adjacency, src));
        self.weights = rows.concat();
        self.a_s = self.weights.iter().map(|&w| (-w).exp()).collect();
        self.path_fallback = true;
        self.symmetrize();
    }

    fn symmetrize(&mut self) {
        let v = self.vertices;
        for u in 0..v {
            for w in 0..u {
                self.a_s[u * v + w] = self.a_s[w * v + u];
                self.weights[u * v + w] = self.weights[w * v + u];
            }
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices
    }

    /// Summed probability of single faults joining `u` and `v`.
    pub fn a_a(&self, u: usize, v: usize) -> f64 {
        self.adjacency[u].iter().find(|&&(w, _)| w == v).map_or(0.0, |&(_, p)| p)
    }

    pub fn neighbours(&self, u: usize) -> &[(usize, f64)] {
        &self.adjacency[u]
    }

    pub fn a_s(&self, u: usize, v: usize) -> f64 {
        self.a_s[u * self.vertices + v]
    }

    /// Matching weight `-ln A_S(u, v)`; infinite between disconnected vertices.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.weights[u * self.vertices + v]
    }

    /// Largest eigenvalue of `A_A` (an upper bound when the row-sum bound is below one).
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    /// Whether the series was replaced by shortest-path weights.
    pub fn uses_path_fallback(&self) -> bool {
        self.path_fallback
    }
}

/// Row `src` of `A + A^2 + ... + A^terms`.
fn neumann_row(adjacency: &[Vec<(usize, f64)>], src: usize, terms: usize) -> Vec<f64> {
    let v = adjacency.len();
    let mut x = vec![0.0; v];
    let mut next = vec![0.0; v];
    let mut acc = vec![0.0; v];
    x[src] = 1.0;
    for _ in 0..terms {
        for (u, row) in adjacency.iter().enumerate() {
            next[u] = row.iter().map(|&(w, p)| p * x[w]).sum();
        }
        std::mem::swap(&mut x, &mut next);
        for (a, &b) in acc.iter_mut().zip(&x) {
            *a += b;
        }
    }
    acc
}

fn hop_eccentricity(adjacency: &[Vec<(usize, f64)>], src: usize) -> usize {
    let mut dist = vec![usize::MAX; adjacency.len()];
    let mut queue = std::collections::VecDeque::from([src]);
    dist[src] = 0;
    let mut ecc = 0;
    while let Some(u) = queue.pop_front() {
        ecc = ecc.max(dist[u]);
        for &(w, _) in &adjacency[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    ecc
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest `-ln p` path lengths from `src`; the most probable single fault path.
fn dijkstra(adjacency: &[Vec<(usize, f64)>], src: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adjacency.len()];
    dist[src] = 0.0;
    let mut heap = BinaryHeap::from([Entry(0.0, src)]);
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(w, p) in &adjacency[u] {
            let nd = d - p.ln();
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Entry(nd, w));
            }
        }
    }
    dist
}

/// Perron root of a symmetric non-negative matrix. The row-sum bound is returned
/// directly when it is below one; otherwise Collatz-Wielandt bounds from power
/// iteration on `I + A` decide.
fn spectral_radius(adjacency: &[Vec<(usize, f64)>]) -> Result<f64> {
    let row_sum = adjacency.iter().map(|r| r.iter().map(|&(_, p)| p).sum::<f64>()).fold(0.0, f64::max);
    if row_sum < 1.0 {
        return Ok(row_sum);
    }
    let v = adjacency.len();
    let mut x = vec![1.0; v];
    let (mut lo, mut hi) = (0.0f64, row_sum);
    for _ in 0..POWER_ITERATIONS {
        let y: Vec<f64> = (0..v).map(|u| x[u] + adjacency[u].iter().map(|&(w, p)| p * x[w]).sum::<f64>()).collect();
        let ratios = y.iter().zip(&x).map(|(a, b)| a / b);
        let (rmin, rmax) = ratios.fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r), b.max(r)));
        lo = lo.max(rmin - 1.0);
        hi = hi.min(rmax - 1.0);
        if lo >= 1.0 || hi - lo < 1e-12 {
            break;
        }
        let norm = y.iter().cloned().fold(0.0, f64::max);
        x = y.into_iter().map(|a| a / norm).collect();
    }
    if hi < 1.0 {
        Ok(hi)
    } else {
        Err(Error::Numerical(format!("spectral radius of the ancilla graph is {lo:.6} >= 1")))
    }
}

/// A single-qubit fault flipping exactly two generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Fault {
    pub qubit: usize,
    pub pauli: Pauli,
    pub ends: (usize, usize),
    pub prob: f64,
}

/// X and Z single-qubit faults of a generalized toric code with their probabilities.
/// Faults flipping no generator are dropped.
pub(crate) fn code_faults(code: &GtcCode, model: &NoiseModel) -> Vec<Fault> {
    let group = code.stabilizers();
    let mut out = Vec::new();
    for q in 0..code.n() {
        for (pauli, prob) in [(Pauli::X, model.p_x()), (Pauli::Z, model.p_z())] {
            let e = PauliOperator::single(code.n(), q, pauli);
            let defects: Vec<usize> = group
                .generators()
                .iter()
                .enumerate()
                .filter(|(_, g)| g.get(q).anticommutes(pauli))
                .map(|(i, _)| i)
                .collect();
            debug_assert_eq!(group.syndrome(&e).map(|s| s.iter().filter(|&&b| b).count()).ok(), Some(defects.len()));
            if let [u, v] = defects[..] {
                out.push(Fault { qubit: q, pauli, ends: (u, v), prob });
            }
        }
    }
    out
}

/// Code-capacity ancilla graph: one vertex per plaquette.
pub fn build_syndrome_graph(code: &GtcCode, model: &NoiseModel) -> Result<SyndromeGraph> {
    build_syndrome_graph_with(code, model, Execution::default())
}

pub(crate) fn build_syndrome_graph_with(code: &GtcCode, model: &NoiseModel, exec: Execution) -> Result<SyndromeGraph> {
    let edges = code_faults(code, model).into_iter().map(|f| (f.ends.0, f.ends.1, f.prob));
    SyndromeGraph::from_edges(code.n(), edges, exec)
}

/// All-pairs most probable single-fault chains on the plaquettes, for building
/// corrections.
#[derive(Debug, Clone)]
pub(crate) struct FaultPaths {
    n: usize,
    vertices: usize,
    next: Vec<usize>,
    fault: Vec<Option<(usize, Pauli)>>,
}

impl FaultPaths {
    pub fn new(code: &GtcCode, model: &NoiseModel) -> Self {
        let v = code.n();
        let mut dist = vec![f64::INFINITY; v * v];
        let mut fault = vec![None; v * v];
        let mut best = vec![0.0f64; v * v];
        for f in code_faults(code, model) {
            let (a, b) = f.ends;
            if f.prob > best[a * v + b] {
                for (x, y) in [(a, b), (b, a)] {
                    best[x * v + y] = f.prob;
                    dist[x * v + y] = -f.prob.ln();
                    fault[x * v + y] = Some((f.qubit, f.pauli));
                }
            }
        }
        let mut next = vec![usize::MAX; v * v];
        for u in 0..v {
            dist[u * v + u] = 0.0;
            next[u * v + u] = u;
            for w in 0..v {
                if fault[u * v + w].is_some() {
                    next[u * v + w] = w;
                }
            }
        }
        for k in 0..v {
            for i in 0..v {
                let dik = dist[i * v + k];
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..v {
                    let cand = dik + dist[k * v + j];
                    if cand < dist[i * v + j] {
                        dist[i * v + j] = cand;
                        next[i * v + j] = next[i * v + k];
                    }
                }
            }
        }
        FaultPaths { n: code.n(), vertices: v, next, fault }
    }

    /// Multiplies onto `out` the fault chain from `u` to `v`.
    pub fn apply_chain(&self, u: usize, v: usize, out: &mut PauliOperator) -> Result<()> {
        let n = self.vertices;
        let mut cur = u;
        while cur != v {
            let step = self.next[cur * n + v];
            if step == usize::MAX {
                return Err(Error::Numerical(format!("no fault path joins generators {u} and {v}")));
            }
            let (q, p) = self.fault[cur * n + step].expect("next hop is an edge");
            out.apply(q, p);
            cur = step;
        }
        debug_assert_eq!(out.num_qubits(), self.n);
        Ok(())
    }
}
