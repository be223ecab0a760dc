//! Construction, distance analysis, decoding and fault-tolerance checks for XZZX
//! generalized toric codes and XZZX cyclic codes under biased Pauli noise.

mod arith;
pub mod codes;
pub mod decoders;
pub mod distance;
pub mod error;
pub mod exec;
pub mod flagft;
pub mod lattice;
pub mod montecarlo;
pub mod noise;
pub mod optimizer;
pub mod paulialg;

pub use error::{Error, Result};
pub use exec::Execution;
