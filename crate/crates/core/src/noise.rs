//! Single-qubit Pauli channels, effective weights and the hashing bound.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::paulialg::{Pauli, PauliOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// `p_X = p_Z^omega`, `p_Y = p_X * p_Z`.
    Independent,
    /// `p_X = p_Y = p_Z^omega`.
    Correlated,
    Depolarizing,
    PureZ,
    PureX,
    PureY,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 6] = [
        NoiseKind::Independent,
        NoiseKind::Correlated,
        NoiseKind::Depolarizing,
        NoiseKind::PureZ,
        NoiseKind::PureX,
        NoiseKind::PureY,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Independent => "independent",
            NoiseKind::Correlated => "correlated",
            NoiseKind::Depolarizing => "depolarizing",
            NoiseKind::PureZ => "pure-z",
            NoiseKind::PureX => "pure-x",
            NoiseKind::PureY => "pure-y",
        }
    }

    fn pure(self) -> Option<Pauli> {
        match self {
            NoiseKind::PureZ => Some(Pauli::Z),
            NoiseKind::PureX => Some(Pauli::X),
            NoiseKind::PureY => Some(Pauli::Y),
            _ => None,
        }
    }

    /// `(p_X, p_Y, p_Z)` for a given `p_Z` (or the single nonzero rate of a pure channel).
    fn components(self, pz: f64, omega: f64) -> (f64, f64, f64) {
        match self {
            NoiseKind::Independent => {
                let px = pz.powf(omega);
                (px, px * pz, pz)
            }
            NoiseKind::Correlated => {
                let px = pz.powf(omega);
                (px, px, pz)
            }
            NoiseKind::Depolarizing => (pz, pz, pz),
            NoiseKind::PureZ => (0.0, 0.0, pz),
            NoiseKind::PureX => (pz, 0.0, 0.0),
            NoiseKind::PureY => (0.0, pz, 0.0),
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let key = key.strip_suffix("-xz").unwrap_or(&key);
        NoiseKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| invalid(format!("unknown noise model {s:?}")))
    }
}

/// Per-qubit effective weights `(w_X, w_Y, w_Z)`; `f64::INFINITY` marks impossible Paulis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveWeight {
    pub w_x: f64,
    pub w_y: f64,
    pub w_z: f64,
}

impl EffectiveWeight {
    pub fn new(w_x: f64, w_y: f64, w_z: f64) -> Self {
        EffectiveWeight { w_x, w_y, w_z }
    }

    pub fn independent(omega: f64) -> Self {
        Self::new(omega, omega + 1.0, 1.0)
    }

    pub fn correlated(omega: f64) -> Self {
        Self::new(omega, omega, 1.0)
    }

    pub fn depolarizing() -> Self {
        Self::new(1.0, 1.0, 1.0)
    }

    pub fn pure(p: Pauli) -> Self {
        let inf = f64::INFINITY;
        match p {
            Pauli::X => Self::new(1.0, inf, inf),
            Pauli::Y => Self::new(inf, 1.0, inf),
            Pauli::Z | Pauli::I => Self::new(inf, inf, 1.0),
        }
    }

    pub fn of(&self, p: Pauli) -> f64 {
        match p {
            Pauli::I => 0.0,
            Pauli::X => self.w_x,
            Pauli::Y => self.w_y,
            Pauli::Z => self.w_z,
        }
    }

    /// Weight of an operator with the given numbers of `X`, `Y` and `Z` factors.
    pub fn from_counts(&self, (nx, ny, nz): (usize, usize, usize)) -> f64 {
        let term = |c: usize, w: f64| if c == 0 { 0.0 } else { c as f64 * w };
        term(nx, self.w_x) + term(ny, self.w_y) + term(nz, self.w_z)
    }

    pub fn weight(&self, p: &PauliOperator) -> f64 {
        self.from_counts(p.counts())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    kind: NoiseKind,
    omega: f64,
    p_x: f64,
    p_y: f64,
    p_z: f64,
}

impl NoiseModel {
    /// Model in which the dominant rate (`p_Z`, or the single rate of a pure channel;
    /// `p/3` for depolarizing) equals `pz`.
    pub fn from_p_z(kind: NoiseKind, pz: f64, omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega >= 1.0) {
            return Err(invalid(format!("bias exponent must be >= 1, got {omega}")));
        }
        if !(0.0..1.0).contains(&pz) {
            return Err(invalid(format!("probability must lie in [0, 1), got {pz}")));
        }
        let (p_x, p_y, p_z) = kind.components(pz, omega);
        let m = NoiseModel { kind, omega, p_x, p_y, p_z };
        if m.p() >= 1.0 {
            return Err(invalid(format!("total error probability {} is not below 1", m.p())));
        }
        Ok(m)
    }

    /// Model with total error probability `p`.
    pub fn with_total(kind: NoiseKind, p: f64, omega: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(invalid(format!("probability must lie in [0, 1), got {p}")));
        }
        let pz = match kind {
            NoiseKind::Depolarizing => p / 3.0,
            NoiseKind::PureX | NoiseKind::PureY | NoiseKind::PureZ => p,
            _ => {
                let total = |pz: f64| {
                    let (x, y, z) = kind.components(pz, omega);
                    x + y + z
                };
                bisect(|pz| total(pz) - p, 0.0, p, 1e-15)
            }
        };
        Self::from_p_z(kind, pz, omega)
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn p_x(&self) -> f64 {
        self.p_x
    }

    pub fn p_y(&self) -> f64 {
        self.p_y
    }

    pub fn p_z(&self) -> f64 {
        self.p_z
    }

    pub fn p(&self) -> f64 {
        self.p_x + self.p_y + self.p_z
    }

    pub fn prob(&self, p: Pauli) -> f64 {
        match p {
            Pauli::I => 1.0 - self.p(),
            Pauli::X => self.p_x,
            Pauli::Y => self.p_y,
            Pauli::Z => self.p_z,
        }
    }

    pub fn weights(&self) -> EffectiveWeight {
        match self.kind {
            NoiseKind::Independent => EffectiveWeight::independent(self.omega),
            NoiseKind::Correlated => EffectiveWeight::correlated(self.omega),
            NoiseKind::Depolarizing => EffectiveWeight::depolarizing(),
            _ => EffectiveWeight::pure(self.kind.pure().unwrap_or(Pauli::Z)),
        }
    }

    /// Probability of the exact error `e` on all of its qubits.
    pub fn probability(&self, e: &PauliOperator) -> f64 {
        let (nx, ny, nz) = e.counts();
        let idle = e.num_qubits() - nx - ny - nz;
        pow(self.p_x, nx) * pow(self.p_y, ny) * pow(self.p_z, nz) * pow(1.0 - self.p(), idle)
    }
}

fn pow(base: f64, e: usize) -> f64 {
    if e == 0 {
        1.0
    } else {
        base.powi(e as i32)
    }
}

pub fn effective_weight(model: &NoiseModel, p: &PauliOperator) -> f64 {
    model.weights().weight(p)
}

/// Converts the ratio `eta = p_Z/(p_X + p_Y)` into the bias exponent at rate `p_Z`.
pub fn omega_from_eta(eta: f64, pz: f64) -> Result<f64> {
    if !(eta >= 0.5 && eta.is_finite()) {
        return Err(invalid(format!("eta must be finite and >= 1/2, got {eta}")));
    }
    check_open_unit(pz)?;
    let l = (1.0 / pz).ln();
    Ok((eta.ln() + (1.0 + 1.0 / pz).ln()) / l)
}

/// Inverse of [`omega_from_eta`].
pub fn eta_from_omega(omega: f64, pz: f64) -> Result<f64> {
    check_open_unit(pz)?;
    if !omega.is_finite() {
        return Err(invalid(format!("omega must be finite, got {omega}")));
    }
    Ok((omega * (1.0 / pz).ln() - (1.0 + 1.0 / pz).ln()).exp())
}

fn check_open_unit(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("probability must lie in (0, 1), got {p}")))
    }
}

pub fn sample_error_with<R: Rng + ?Sized>(model: &NoiseModel, n: usize, rng: &mut R) -> PauliOperator {
    let mut e = PauliOperator::identity(n);
    let (px, py, pz) = (model.p_x, model.p_y, model.p_z);
    let p = px + py + pz;
    if p == 0.0 {
        return e;
    }
    for q in 0..n {
        let u: f64 = rng.gen();
        if u < p {
            let pauli = if u < pz {
                Pauli::Z
            } else if u < pz + px {
                Pauli::X
            } else {
                Pauli::Y
            };
            e.set(q, pauli);
        }
    }
    e
}

/// Deterministic sample for a seed.
pub fn sample_error(model: &NoiseModel, n: usize, seed: u64) -> PauliOperator {
    sample_error_with(model, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn entropy_bits(ps: &[f64]) -> f64 {
    ps.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Total error probability at which the hashing rate `1 - H(p_I, p_X, p_Y, p_Z)` vanishes.
pub fn hashing_bound(kind: NoiseKind, omega: f64) -> Result<f64> {
    let total = |t: f64| NoiseModel::from_p_z(kind, t, omega).map(|m| m.p());
    let rate = |t: f64| match NoiseModel::from_p_z(kind, t, omega) {
        Ok(m) => 1.0 - entropy_bits(&[1.0 - m.p(), m.p_x, m.p_y, m.p_z]),
        Err(_) => f64::NAN,
    };
    // largest family parameter keeping the total below 1
    let t_max = match kind {
        NoiseKind::Depolarizing => 1.0 / 3.0,
        NoiseKind::PureX | NoiseKind::PureY | NoiseKind::PureZ => 1.0,
        _ => bisect(|t| total(t).unwrap_or(2.0) - 1.0, 0.0, 1.0, 1e-12),
    };
    let grid = 2000;
    let mut prev = 1e-12;
    let mut lowest = (f64::INFINITY, 0usize);
    for i in 1..grid {
        let t = t_max * i as f64 / grid as f64;
        let r = rate(t);
        if r.is_nan() {
            break;
        }
        if r <= 0.0 {
            let root = bisect(rate, prev, t, 1e-9);
            return total(root);
        }
        if r < lowest.0 {
            lowest = (r, i);
        }
        prev = t;
    }
    // strongly biased channels touch zero rate tangentially near p = 1/2
    let (mut lo, mut hi) = (
        t_max * lowest.1.saturating_sub(1) as f64 / grid as f64,
        t_max * (lowest.1 + 1) as f64 / grid as f64,
    );
    while hi - lo > 1e-10 {
        let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if rate(m1) < rate(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let t = 0.5 * (lo + hi);
    if rate(t) <= 1e-9 {
        return total(t);
    }
    Err(Error::Numerical(format!("no hashing-bound root for {kind} at omega = {omega}")))
}
