use crate::codes::GtcCode;
use crate::error::{invalid, Result};
use crate::exec::Execution;
use crate::noise::NoiseModel;
use crate::paulialg::{PauliOperator, StabilizerGroup};

use super::graph::{build_syndrome_graph_with, FaultPaths, SyndromeGraph};
use super::matching::min_weight_perfect_matching;
use super::{Decoder, Syndrome, SyndromeExtractor};

/// Code-capacity matching decoder for a generalized toric code.
///
/// Y errors are handled as an X and a Z fault; the graph has no Y edges.
#[derive(Debug, Clone)]
pub struct MwpmDecoder {
    code: GtcCode,
    graph: SyndromeGraph,
    paths: FaultPaths,
    extractor: SyndromeExtractor,
}

impl MwpmDecoder {
    pub fn new(code: &GtcCode, model: &NoiseModel) -> Result<Self> {
        Self::with_execution(code, model, Execution::default())
    }

    pub fn with_execution(code: &GtcCode, model: &NoiseModel, exec: Execution) -> Result<Self> {
        Ok(MwpmDecoder {
            code: code.clone(),
            graph: build_syndrome_graph_with(code, model, exec)?,
            paths: FaultPaths::new(code, model),
            extractor: SyndromeExtractor::new(code.stabilizers()),
        })
    }

    pub fn graph(&self) -> &SyndromeGraph {
        &self.graph
    }

    pub fn code(&self) -> &GtcCode {
        &self.code
    }

    /// Matched defect pairs as generator indices.
    pub fn matching(&self, syndrome: &Syndrome) -> Result<Vec<(usize, usize)>> {
        if syndrome.len() != self.graph.num_vertices() {
            return Err(invalid(format!(
                "syndrome has {} bits, graph has {} vertices",
                syndrome.len(),
                self.graph.num_vertices()
            )));
        }
        let defects = syndrome.defects();
        if defects.len() % 2 == 1 {
            return Err(invalid(format!("odd number of defects ({})", defects.len())));
        }
        let pairs = min_weight_perfect_matching(defects.len(), |i, j| self.graph.weight(defects[i], defects[j]))?;
        Ok(pairs.into_iter().map(|(i, j)| (defects[i], defects[j])).collect())
    }
}

impl Decoder for MwpmDecoder {
    fn group(&self) -> &StabilizerGroup {
        self.code.stabilizers()
    }

    fn decode(&self, syndrome: &Syndrome) -> Result<PauliOperator> {
        let mut c = PauliOperator::identity(self.code.n());
        for (u, v) in self.matching(syndrome)? {
            self.paths.apply_chain(u, v, &mut c)?;
        }
        Ok(c)
    }

    fn syndrome_of(&self, e: &PauliOperator) -> Result<Syndrome> {
        Ok(self.extractor.extract(e))
    }
}

/// One-shot matching decode of `syndrome`.
pub fn decode_mwpm(code: &GtcCode, model: &NoiseModel, syndrome: &Syndrome) -> Result<PauliOperator> {
    MwpmDecoder::new(code, model)?.decode(syndrome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoders::extract_syndrome;
    use crate::lattice::Vec2;
    use crate::noise::{EffectiveWeight, NoiseKind};
    use crate::paulialg::Pauli;

    fn gtc13() -> GtcCode {
        GtcCode::new(Vec2::new(3, 2), Vec2::new(-2, 3)).unwrap()
    }

    #[test]
    fn empty_syndrome_gives_identity() {
        let code = gtc13();
        let dec = MwpmDecoder::new(&code, &NoiseModel::with_total(NoiseKind::Independent, 0.05, 1.0).unwrap()).unwrap();
        assert!(dec.decode(&Syndrome::zeros(13)).unwrap().is_identity());
        let mut odd = Syndrome::zeros(13);
        odd.bits[3] = true;
        assert!(dec.decode(&odd).is_err());
    }

    /// Every error of effective weight at most 2 (two X/Z components, or one Y) on the
    /// distance-5 code.
    #[test]
    fn corrects_all_low_weight_errors() {
        let code = gtc13();
        let model = NoiseModel::with_total(NoiseKind::Independent, 0.05, 1.0).unwrap();
        let dec = MwpmDecoder::new(&code, &model).unwrap();
        let w = EffectiveWeight::independent(1.0);
        let singles: Vec<(usize, Pauli)> =
            (0..13).flat_map(|q| [Pauli::X, Pauli::Y, Pauli::Z].map(|p| (q, p))).collect();
        let mut count = 0;
        let mut check = |e: PauliOperator| {
            if w.weight(&e) <= 2.0 + 1e-9 {
                let r = dec.correct(&e).unwrap();
                assert!(r.success, "failed on {e}");
                count += 1;
            }
        };
        check(PauliOperator::identity(13));
        for (i, &(q1, p1)) in singles.iter().enumerate() {
            check(PauliOperator::single(13, q1, p1));
            for &(q2, p2) in &singles[i + 1..] {
                if q2 != q1 {
                    let mut e = PauliOperator::single(13, q1, p1);
                    e.set(q2, p2);
                    check(e);
                }
            }
        }
        // identity + 26 X/Z + 13 Y + C(26,2) - 13 same-qubit X,Z pairs
        assert_eq!(count, 1 + 26 + 13 + 325 - 13);
    }

    #[test]
    fn corrections_reproduce_syndromes() {
        let code = GtcCode::new(Vec2::new(5, 1), Vec2::new(-1, 5)).unwrap();
        let model = NoiseModel::with_total(NoiseKind::Independent, 0.2, 2.0).unwrap();
        let dec = MwpmDecoder::new(&code, &model).unwrap();
        for seed in 0..300 {
            let e = crate::noise::sample_error(&model, code.n(), seed);
            let s = dec.syndrome_of(&e).unwrap();
            let c = dec.decode(&s).unwrap();
            assert_eq!(extract_syndrome(code.stabilizers(), &c).unwrap(), s);
        }
    }
}
