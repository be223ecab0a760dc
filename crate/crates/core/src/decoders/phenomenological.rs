//! Repeated noisy syndrome measurement: `rounds` rounds each suffer data errors and
//! measurement flips, followed by one perfect measurement round.
//!
//! Detection events of layer `t` are the XOR of the measured syndromes of rounds `t`
//! and `t - 1`, giving `rounds + 1` layers. A data error in round `t` flips a pair in
//! layer `t`; a flipped measurement in round `t` flips the same generator in layers
//! `t` and `t + 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::GtcCode;
use crate::error::{invalid, Result};
use crate::exec::Execution;
use crate::noise::{sample_error_with, NoiseModel};
use crate::paulialg::PauliOperator;

use super::graph::{code_faults, FaultPaths, SyndromeGraph};
use super::matching::min_weight_perfect_matching;
use super::{judge, DecodeResult, Syndrome, SyndromeExtractor};

/// Data errors and measurement flips of each noisy round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorHistory {
    pub data: Vec<PauliOperator>,
    pub measurement: Vec<Vec<bool>>,
}

impl ErrorHistory {
    pub fn rounds(&self) -> usize {
        self.data.len()
    }

    /// Product of all data errors.
    pub fn total_data(&self, n: usize) -> PauliOperator {
        let mut e = PauliOperator::identity(n);
        for d in &self.data {
            e *= d;
        }
        e
    }
}

pub fn sample_history<R: Rng + ?Sized>(
    code: &GtcCode,
    model: &NoiseModel,
    q_meas: f64,
    rounds: usize,
    rng: &mut R,
) -> ErrorHistory {
    let g = code.stabilizers().generators().len();
    let mut data = Vec::with_capacity(rounds);
    let mut measurement = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        data.push(sample_error_with(model, code.n(), rng));
        measurement.push((0..g).map(|_| rng.gen::<f64>() < q_meas).collect());
    }
    ErrorHistory { data, measurement }
}

/// Rounds used when none are given: the effective distance rounded up.
pub fn default_rounds(d_prime: f64) -> usize {
    (d_prime.ceil() as usize).max(1)
}

/// `(layer, generator)` vertex of the space-time graph.
pub type Event = (usize, usize);

/// Spacetime matching decoder.
#[derive(Debug, Clone)]
pub struct PhenomenologicalDecoder {
    code: GtcCode,
    rounds: usize,
    graph: SyndromeGraph,
    paths: FaultPaths,
    extractor: SyndromeExtractor,
}

impl PhenomenologicalDecoder {
    pub fn new(code: &GtcCode, model: &NoiseModel, q_meas: f64, rounds: usize) -> Result<Self> {
        Self::with_execution(code, model, q_meas, rounds, Execution::default())
    }

    pub fn with_execution(
        code: &GtcCode,
        model: &NoiseModel,
        q_meas: f64,
        rounds: usize,
        exec: Execution,
    ) -> Result<Self> {
        if rounds == 0 {
            return Err(invalid("at least one noisy round is required"));
        }
        if !(0.0..0.5).contains(&q_meas) {
            return Err(invalid(format!("measurement error probability must lie in [0, 1/2), got {q_meas}")));
        }
        let g = code.stabilizers().generators().len();
        let faults = code_faults(code, model);
        let mut edges = Vec::new();
        for t in 0..rounds {
            edges.extend(faults.iter().map(|f| (t * g + f.ends.0, t * g + f.ends.1, f.prob)));
            let time = q_meas / (1.0 - q_meas);
            edges.extend((0..g).map(|v| (t * g + v, (t + 1) * g + v, time)));
        }
        Ok(PhenomenologicalDecoder {
            code: code.clone(),
            rounds,
            graph: SyndromeGraph::from_edges((rounds + 1) * g, edges, exec)?,
            paths: FaultPaths::new(code, model),
            extractor: SyndromeExtractor::new(code.stabilizers()),
        })
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn graph(&self) -> &SyndromeGraph {
        &self.graph
    }

    fn generators(&self) -> usize {
        self.code.stabilizers().generators().len()
    }

    /// Detection events, layer-major.
    pub fn detection_events(&self, history: &ErrorHistory) -> Result<Syndrome> {
        if history.rounds() != self.rounds || history.measurement.len() != self.rounds {
            return Err(invalid(format!("history has {} rounds, decoder expects {}", history.rounds(), self.rounds)));
        }
        let g = self.generators();
        let mut events = Syndrome::zeros((self.rounds + 1) * g);
        let mut cumulative = PauliOperator::identity(self.code.n());
        let mut previous = vec![false; g];
        for t in 0..=self.rounds {
            let mut measured = if t < self.rounds {
                cumulative *= &history.data[t];
                let mut s = self.extractor.extract(&cumulative).bits;
                for (b, &flip) in s.iter_mut().zip(&history.measurement[t]) {
                    *b ^= flip;
                }
                s
            } else {
                self.extractor.extract(&cumulative).bits
            };
            for (v, (m, p)) in measured.iter_mut().zip(&previous).enumerate() {
                events.bits[t * g + v] = *m ^ *p;
            }
            previous = measured;
        }
        Ok(events)
    }

    /// Matched event pairs as `(layer, generator)` vertices.
    pub fn matching(&self, events: &Syndrome) -> Result<Vec<(Event, Event)>> {
        if events.len() != self.graph.num_vertices() {
            return Err(invalid(format!("{} detection bits, expected {}", events.len(), self.graph.num_vertices())));
        }
        let defects = events.defects();
        if defects.len() % 2 == 1 {
            return Err(invalid(format!("odd number of detection events ({})", defects.len())));
        }
        let g = self.generators();
        let pairs = min_weight_perfect_matching(defects.len(), |i, j| self.graph.weight(defects[i], defects[j]))?;
        Ok(pairs
            .into_iter()
            .map(|(i, j)| ((defects[i] / g, defects[i] % g), (defects[j] / g, defects[j] % g)))
            .collect())
    }

    /// Data correction: spatial chains between the generators of each matched pair.
    pub fn decode_events(&self, events: &Syndrome) -> Result<PauliOperator> {
        let mut c = PauliOperator::identity(self.code.n());
        for ((_, u), (_, v)) in self.matching(events)? {
            self.paths.apply_chain(u, v, &mut c)?;
        }
        Ok(c)
    }

    pub fn correct(&self, history: &ErrorHistory) -> Result<DecodeResult> {
        let events = self.detection_events(history)?;
        let c = self.decode_events(&events)?;
        judge(self.code.stabilizers(), &history.total_data(self.code.n()), c)
    }
}

/// One-shot spacetime decode of an error history.
pub fn decode_phenomenological(
    code: &GtcCode,
    model: &NoiseModel,
    q_meas: f64,
    rounds: usize,
    history: &ErrorHistory,
) -> Result<DecodeResult> {
    PhenomenologicalDecoder::new(code, model, q_meas, rounds)?.correct(history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoders::{Decoder, MwpmDecoder};
    use crate::lattice::Vec2;
    use crate::noise::NoiseKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gtc13() -> GtcCode {
        GtcCode::new(Vec2::new(3, 2), Vec2::new(-2, 3)).unwrap()
    }

    #[test]
    fn single_measurement_error_is_a_time_pair() {
        let code = gtc13();
        let model = NoiseModel::with_total(NoiseKind::Independent, 0.03, 1.0).unwrap();
        let dec = PhenomenologicalDecoder::new(&code, &model, 0.03, 5).unwrap();
        let mut h = ErrorHistory {
            data: vec![PauliOperator::identity(13); 5],
            measurement: vec![vec![false; 13]; 5],
        };
        h.measurement[2][7] = true;
        let ev = dec.detection_events(&h).unwrap();
        assert_eq!(ev.defects(), vec![2 * 13 + 7, 3 * 13 + 7]);
        assert_eq!(dec.matching(&ev).unwrap(), vec![((2, 7), (3, 7))]);
        let r = dec.correct(&h).unwrap();
        assert!(r.success && r.correction.is_identity());
    }

    #[test]
    fn noiseless_always_succeeds() {
        let code = gtc13();
        let model = NoiseModel::with_total(NoiseKind::Independent, 0.0, 1.0).unwrap();
        let dec = PhenomenologicalDecoder::new(&code, &model, 0.0, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let h = sample_history(&code, &model, 0.0, 3, &mut rng);
            assert!(dec.correct(&h).unwrap().success);
        }
    }

    #[test]
    fn perfect_measurement_reduces_to_rounds_of_code_capacity() {
        let code = gtc13();
        let model = NoiseModel::with_total(NoiseKind::Independent, 0.02, 1.0).unwrap();
        let dec = PhenomenologicalDecoder::new(&code, &model, 0.0, 3).unwrap();
        let cc = MwpmDecoder::new(&code, &model).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let h = sample_history(&code, &model, 0.0, 3, &mut rng);
            let mut per_round = PauliOperator::identity(13);
            for d in &h.data {
                per_round *= &cc.decode(&cc.syndrome_of(d).unwrap()).unwrap();
            }
            let expect = judge(code.stabilizers(), &h.total_data(13), per_round).unwrap();
            assert_eq!(dec.correct(&h).unwrap().success, expect.success);
        }
    }

    #[test]
    fn corrections_clear_the_final_syndrome() {
        let code = gtc13();
        let model = NoiseModel::with_total(NoiseKind::Independent, 0.05, 1.0).unwrap();
        let dec = PhenomenologicalDecoder::new(&code, &model, 0.05, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let h = sample_history(&code, &model, 0.05, 5, &mut rng);
            dec.correct(&h).unwrap();
        }
    }
}
