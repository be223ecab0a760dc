use crate::error::{invalid, Error, Result};
use crate::exec::{map_range, Execution};
use crate::noise::NoiseModel;
use crate::paulialg::{PauliOperator, StabilizerGroup};

use super::{Decoder, Syndrome, SyndromeExtractor};

/// Largest `log2` of the number of Paulis summed per syndrome, `2^(n-k) * 4^k / 4`.
pub const ML_BUDGET_LOG2: u32 = 22;
/// Syndrome tables are precomputed up to this many summed terms in total.
const TABLE_BUDGET_LOG2: u32 = 28;

/// Exact maximum-likelihood coset decoder by enumeration of the stabilizer group.
#[derive(Debug, Clone)]
pub struct MlDecoder {
    group: StabilizerGroup,
    extractor: SyndromeExtractor,
    n: usize,
    generators: Vec<(u64, u64)>,
    logicals: Vec<(u64, u64)>,
    /// Single-qubit probability of each Pauli kind raised to 0..=n, indexed `[kind][count]`; kinds I, X, Y, Z.
    powers: [Vec<f64>; 4],
    table: Option<Vec<u8>>,
}

fn single_word(p: &PauliOperator) -> (u64, u64) {
    (p.x_words().first().copied().unwrap_or(0), p.z_words().first().copied().unwrap_or(0))
}

impl MlDecoder {
    pub fn new(group: &StabilizerGroup, model: &NoiseModel) -> Result<Self> {
        Self::with_execution(group, model, Execution::default())
    }

    pub fn with_execution(group: &StabilizerGroup, model: &NoiseModel, exec: Execution) -> Result<Self> {
        let n = group.num_qubits();
        let m = group.rank() as u32;
        let k = group.k() as u32;
        if n > 64 || m + 2 * k > ML_BUDGET_LOG2 + 2 {
            return Err(Error::BudgetExceeded(format!(
                "exact coset enumeration over 2^{} Paulis per syndrome (limit 2^{})",
                m + 2 * k,
                ML_BUDGET_LOG2 + 2
            )));
        }
        let generators = group.independent_generators().iter().map(|&i| single_word(&group.generators()[i])).collect();
        let logicals = group.logicals().iter().flat_map(|(x, z)| [single_word(x), single_word(z)]).collect();
        let probs = [1.0 - model.p(), model.p_x(), model.p_y(), model.p_z()];
        let powers = probs.map(|p| (0..=n as i32).map(|e| if e == 0 { 1.0 } else { p.powi(e) }).collect());
        let mut dec = MlDecoder {
            group: group.clone(),
            extractor: SyndromeExtractor::new(group),
            n,
            generators,
            logicals,
            powers,
            table: None,
        };
        if 2 * m + 2 * k <= TABLE_BUDGET_LOG2 {
            let this = &dec;
            let table = map_range(exec, 0..1usize << m, |s| this.best_coset(s as u64));
            dec.table = Some(table);
        }
        Ok(dec)
    }

    fn probability(&self, x: u64, z: u64) -> f64 {
        let y = (x & z).count_ones() as usize;
        let nx = (x & !z).count_ones() as usize;
        let nz = (z & !x).count_ones() as usize;
        let idle = self.n - nx - y - nz;
        self.powers[0][idle] * self.powers[1][nx] * self.powers[2][y] * self.powers[3][nz]
    }

    /// Representative `f(s) * L_c` of logical coset `c` (base-4 digits I, X, Y, Z per
    /// logical qubit, least significant first) for the independent syndrome `s`.
    fn representative(&self, s: u64, c: usize) -> (u64, u64) {
        let (mut x, mut z) = (0u64, 0u64);
        for (j, t) in self.group.destabilizers().iter().enumerate() {
            if s >> j & 1 == 1 {
                let (tx, tz) = single_word(t);
                x ^= tx;
                z ^= tz;
            }
        }
        for i in 0..self.logicals.len() / 2 {
            let digit = c >> (2 * i) & 3;
            let (has_x, has_z) = (digit == 1 || digit == 2, digit == 2 || digit == 3);
            if has_x {
                x ^= self.logicals[2 * i].0;
                z ^= self.logicals[2 * i].1;
            }
            if has_z {
                x ^= self.logicals[2 * i + 1].0;
                z ^= self.logicals[2 * i + 1].1;
            }
        }
        (x, z)
    }

    /// Total probability of each logical coset consistent with independent syndrome `s`.
    fn coset_probabilities_bits(&self, s: u64) -> Vec<f64> {
        let cosets = 1usize << self.logicals.len();
        let bases: Vec<(u64, u64)> = (0..cosets).map(|c| self.representative(s, c)).collect();
        let mut sums = vec![0.0; cosets];
        let (mut sx, mut sz) = (0u64, 0u64);
        let total = 1u64 << self.generators.len();
        for t in 0..total {
            if t > 0 {
                let (gx, gz) = self.generators[t.trailing_zeros() as usize];
                sx ^= gx;
                sz ^= gz;
            }
            for (acc, &(bx, bz)) in sums.iter_mut().zip(&bases) {
                *acc += self.probability(bx ^ sx, bz ^ sz);
            }
        }
        sums
    }

    fn best_coset(&self, s: u64) -> u8 {
        let probs = self.coset_probabilities_bits(s);
        let mut best = 0;
        for (c, &p) in probs.iter().enumerate() {
            if p > probs[best] {
                best = c;
            }
        }
        best as u8
    }

    fn independent_bits(&self, syndrome: &Syndrome) -> Result<u64> {
        if syndrome.len() != self.group.generators().len() {
            return Err(invalid(format!(
                "syndrome has {} bits, code has {} generators",
                syndrome.len(),
                self.group.generators().len()
            )));
        }
        let s = self
            .group
            .independent_generators()
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &g)| acc | u64::from(syndrome.bits[g]) << j);
        let (x, z) = self.representative(s, 0);
        let f = PauliOperator::from_words(self.n, vec![x], vec![z]);
        if self.extractor.extract(&f) != *syndrome {
            return Err(invalid("syndrome is not consistent with the generator relations"));
        }
        Ok(s)
    }

    /// Coset probabilities for `syndrome`, ordered I, X, Y, Z per logical qubit.
    pub fn coset_probabilities(&self, syndrome: &Syndrome) -> Result<Vec<f64>> {
        Ok(self.coset_probabilities_bits(self.independent_bits(syndrome)?))
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }
}

impl Decoder for MlDecoder {
    fn group(&self) -> &StabilizerGroup {
        &self.group
    }

    fn decode(&self, syndrome: &Syndrome) -> Result<PauliOperator> {
        let s = self.independent_bits(syndrome)?;
        let c = match &self.table {
            Some(t) => t[s as usize],
            None => self.best_coset(s),
        };
        let (x, z) = self.representative(s, usize::from(c));
        Ok(PauliOperator::from_words(self.n, vec![x], vec![z]))
    }

    fn syndrome_of(&self, e: &PauliOperator) -> Result<Syndrome> {
        if e.num_qubits() != self.n {
            return Err(Error::SizeMismatch { left: self.n, right: e.num_qubits() });
        }
        Ok(self.extractor.extract(e))
    }
}

/// One-shot maximum-likelihood decode of `syndrome`.
pub fn decode_ml(group: &StabilizerGroup, model: &NoiseModel, syndrome: &Syndrome) -> Result<PauliOperator> {
    MlDecoder::new(group, model)?.decode(syndrome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::GtcCode;
    use crate::decoders::MwpmDecoder;
    use crate::lattice::Vec2;
    use crate::noise::NoiseKind;
    use crate::paulialg::Pauli;

    fn five_qubit() -> StabilizerGroup {
        let gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ", "ZZXIX"].map(|s| s.parse().unwrap()).to_vec();
        StabilizerGroup::new(5, gens).unwrap()
    }

    #[test]
    fn five_qubit_corrects_single_errors() {
        let g = five_qubit();
        let model = NoiseModel::with_total(NoiseKind::Depolarizing, 0.05, 1.0).unwrap();
        let dec = MlDecoder::new(&g, &model).unwrap();
        assert!(dec.has_table());
        for q in 0..5 {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                assert!(dec.correct(&PauliOperator::single(5, q, p)).unwrap().success);
            }
        }
    }

    #[test]
    fn identity_wins_on_trivial_syndrome() {
        let g = five_qubit();
        let model = NoiseModel::with_total(NoiseKind::Depolarizing, 0.01, 1.0).unwrap();
        let dec = MlDecoder::new(&g, &model).unwrap();
        let probs = dec.coset_probabilities(&Syndrome::zeros(5)).unwrap();
        assert!(probs[0] > probs[1] && probs[0] > probs[2] && probs[0] > probs[3]);
        assert!(probs[0] >= 0.99f64.powi(5));
        assert!(dec.decode(&Syndrome::zeros(5)).unwrap().is_identity());
    }

    /// Summed over all syndromes and cosets the probabilities exhaust the error space.
    #[test]
    fn coset_probabilities_sum_to_one() {
        let g = five_qubit();
        let model = NoiseModel::with_total(NoiseKind::Independent, 0.2, 1.7).unwrap();
        let dec = MlDecoder::new(&g, &model).unwrap();
        let total: f64 = (0..16u64).flat_map(|s| dec.coset_probabilities_bits(s)).sum();
        assert!((total - 1.0).abs() < 1e-12, "{total}");
    }

    fn exact_success(dec: &dyn Decoder, model: &NoiseModel, n: usize) -> f64 {
        let mut total = 0.0;
        for idx in 0..4usize.pow(n as u32) {
            let paulis: Vec<Pauli> = (0..n).map(|q| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][idx >> (2 * q) & 3]).collect();
            let e = PauliOperator::from_paulis(&paulis);
            if dec.correct(&e).unwrap().success {
                total += model.probability(&e);
            }
        }
        total
    }

    #[test]
    fn ml_is_at_least_as_good_as_matching_exactly() {
        let code = GtcCode::new(Vec2::new(3, 0), Vec2::new(0, 3)).unwrap();
        for (p, omega) in [(0.05, 1.0), (0.15, 2.0)] {
            let model = NoiseModel::with_total(NoiseKind::Independent, p, omega).unwrap();
            let ml = MlDecoder::new(code.stabilizers(), &model).unwrap();
            let mwpm = MwpmDecoder::new(&code, &model).unwrap();
            let a = exact_success(&ml, &model, code.n());
            let b = exact_success(&mwpm, &model, code.n());
            assert!(a >= b - 1e-12, "ML {a} < MWPM {b}");
        }
    }

    #[test]
    fn table_and_direct_enumeration_agree() {
        let g = five_qubit();
        let model = NoiseModel::with_total(NoiseKind::Independent, 0.1, 2.0).unwrap();
        let dec = MlDecoder::new(&g, &model).unwrap();
        let table = dec.table.clone().unwrap();
        for s in 0..16u64 {
            assert_eq!(table[s as usize], dec.best_coset(s));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let code = GtcCode::new(Vec2::new(5, 0), Vec2::new(0, 5)).unwrap();
        let model = NoiseModel::with_total(NoiseKind::Independent, 0.1, 1.0).unwrap();
        assert!(matches!(MlDecoder::new(code.stabilizers(), &model), Err(Error::BudgetExceeded(_))));
    }
}
