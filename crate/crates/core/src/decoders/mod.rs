//! Syndrome extraction and decoding: weighted minimum-weight perfect matching for
//! code capacity and phenomenological noise, and exact maximum-likelihood decoding.

mod graph;
mod matching;
mod ml;
mod mwpm;
mod phenomenological;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paulialg::{LogicalClass, PauliOperator, StabilizerGroup};

pub use graph::{build_syndrome_graph, SyndromeGraph, CONDITION_THRESHOLD};
pub use matching::{min_weight_perfect_matching, WEIGHT_CAP, WEIGHT_SCALE};
pub use ml::{decode_ml, MlDecoder, ML_BUDGET_LOG2};
pub use mwpm::{decode_mwpm, MwpmDecoder};
pub use phenomenological::{
    decode_phenomenological, default_rounds, sample_history, ErrorHistory, PhenomenologicalDecoder,
};

/// Measurement outcome bits, one per stabilizer generator in generator order.
///
/// For generalized toric codes every plaquette is included even though the plaquettes
/// are not independent; matching needs all of them as vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syndrome {
    pub bits: Vec<bool>,
}

impl Syndrome {
    pub fn zeros(len: usize) -> Self {
        Syndrome { bits: vec![false; len] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    /// Indices of flipped generators.
    pub fn defects(&self) -> Vec<usize> {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }

    pub fn xor(&mut self, other: &Syndrome) {
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
    }
}

/// Bit `i` is the symplectic product of `e` with generator `i`.
pub fn extract_syndrome(group: &StabilizerGroup, e: &PauliOperator) -> Result<Syndrome> {
    Ok(Syndrome { bits: group.syndrome(e)? })
}

/// Precomputed per-qubit generator incidence for repeated syndrome extraction.
#[derive(Debug, Clone)]
pub struct SyndromeExtractor {
    generators: usize,
    touching: Vec<Vec<(usize, crate::paulialg::Pauli)>>,
}

impl SyndromeExtractor {
    pub fn new(group: &StabilizerGroup) -> Self {
        let mut touching = vec![Vec::new(); group.num_qubits()];
        for (g, gen) in group.generators().iter().enumerate() {
            for q in gen.support() {
                touching[q].push((g, gen.get(q)));
            }
        }
        SyndromeExtractor { generators: group.generators().len(), touching }
    }

    pub fn extract(&self, e: &PauliOperator) -> Syndrome {
        let mut s = Syndrome::zeros(self.generators);
        for q in e.support() {
            let p = e.get(q);
            for &(g, gp) in &self.touching[q] {
                if p.anticommutes(gp) {
                    s.bits[g] ^= true;
                }
            }
        }
        s
    }
}

/// Outcome of correcting a known error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub correction: PauliOperator,
    /// Residual `correction * error` lies in the stabilizer group.
    pub success: bool,
    /// Logical class of the residual, one entry per logical qubit.
    pub logical: Vec<LogicalClass>,
}

/// Classifies the residual of `correction` applied to `error`.
pub fn judge(group: &StabilizerGroup, error: &PauliOperator, correction: PauliOperator) -> Result<DecodeResult> {
    let residual = error.try_mul(&correction)?;
    if let Err(Error::NotInCentralizer(g)) = group.commutes_with_all(&residual) {
        return Err(Error::Numerical(format!("correction does not reproduce the syndrome at generator {g}")));
    }
    let logical: Vec<LogicalClass> =
        group.logical_signature(&residual).into_iter().map(|(x, z)| LogicalClass::from_bits(x, z)).collect();
    let success = logical.iter().all(|&c| c == LogicalClass::I);
    Ok(DecodeResult { correction, success, logical })
}

/// Code-capacity decoder: maps a syndrome to a correction reproducing it.
pub trait Decoder: Sync {
    fn group(&self) -> &StabilizerGroup;

    fn decode(&self, syndrome: &Syndrome) -> Result<PauliOperator>;

    fn syndrome_of(&self, e: &PauliOperator) -> Result<Syndrome> {
        extract_syndrome(self.group(), e)
    }

    /// Extracts the syndrome of `error`, decodes it and judges the residual.
    fn correct(&self, error: &PauliOperator) -> Result<DecodeResult> {
        let s = self.syndrome_of(error)?;
        let c = self.decode(&s)?;
        judge(self.group(), error, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::GtcCode;
    use crate::lattice::Vec2;
    use crate::paulialg::Pauli;

    fn gtc13() -> GtcCode {
        GtcCode::new(Vec2::new(3, 2), Vec2::new(-2, 3)).unwrap()
    }

    #[test]
    fn trivial_syndromes() {
        let code = gtc13();
        let g = code.stabilizers();
        assert!(extract_syndrome(g, &PauliOperator::identity(13)).unwrap().is_trivial());
        let mut s = PauliOperator::identity(13);
        s *= &g.generators()[0];
        s *= &g.generators()[5];
        assert!(extract_syndrome(g, &s).unwrap().is_trivial());
    }

    #[test]
    fn single_z_flags_diagonal_neighbours() {
        let code = gtc13();
        for q in 0..13 {
            let c = code.qubits()[q];
            let e = PauliOperator::single(13, q, Pauli::Z);
            let mut expect = vec![code.qubit_index(c), code.qubit_index(c - Vec2::new(1, 1))];
            expect.sort_unstable();
            assert_eq!(extract_syndrome(code.stabilizers(), &e).unwrap().defects(), expect);
            let e = PauliOperator::single(13, q, Pauli::X);
            let mut expect = vec![code.qubit_index(c - Vec2::new(1, 0)), code.qubit_index(c - Vec2::new(0, 1))];
            expect.sort_unstable();
            assert_eq!(extract_syndrome(code.stabilizers(), &e).unwrap().defects(), expect);
        }
    }

    #[test]
    fn extractor_agrees_with_group() {
        let code = GtcCode::new(Vec2::new(4, 0), Vec2::new(0, 4)).unwrap();
        let ex = SyndromeExtractor::new(code.stabilizers());
        for seed in 0..50 {
            let m = crate::noise::NoiseModel::with_total(crate::noise::NoiseKind::Depolarizing, 0.3, 1.0).unwrap();
            let e = crate::noise::sample_error(&m, code.n(), seed);
            assert_eq!(ex.extract(&e), extract_syndrome(code.stabilizers(), &e).unwrap());
        }
    }

    #[test]
    fn judge_rejects_wrong_syndrome() {
        let code = gtc13();
        let e = PauliOperator::single(13, 0, Pauli::Z);
        assert!(judge(code.stabilizers(), &e, PauliOperator::identity(13)).is_err());
        let r = judge(code.stabilizers(), &e, e.clone()).unwrap();
        assert!(r.success);
        assert_eq!(r.logical, vec![LogicalClass::I]);
    }
}
