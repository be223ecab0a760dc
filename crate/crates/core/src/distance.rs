//! Effective distances: the geometric engine on the doubled lattice, an exhaustive
//! centralizer oracle, infinite-bias distances, the half distance and correlated bounds.

use serde::{Deserialize, Serialize};

use crate::codes::{doubled_lattice, GtcCode};
use crate::error::{invalid, Error, Result};
use crate::exec::{chunks, map_range, Execution};
use crate::lattice::{shortest_vector_xz, Vec2, XZNorm};
use crate::noise::{EffectiveWeight, NoiseKind, NoiseModel};
use crate::paulialg::{pauli_counts, x_nullspace, Pauli, PauliOperator, StabilizerGroup};

/// Largest `n + k` accepted by the exhaustive oracle.
pub const ORACLE_BUDGET: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Geometric,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    Vector(Vec2),
    Operator(PauliOperator),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub d_prime: f64,
    pub witness: Witness,
    pub engine: Engine,
}

/// Minimum XZ norm over the doubled lattice, capped by the all-Z logical of weight `n`.
/// Uses the independent-XZ weights `(w_Z, w_X, w_Y) = (1, omega, omega + 1)`.
pub fn effective_distance_geometric(code: &GtcCode, omega: f64) -> Result<DistanceReport> {
    let norm = XZNorm::new(omega)?;
    let doubled = doubled_lattice(code);
    let (v, d) = shortest_vector_xz(&doubled.lattice, norm);
    let n = code.n() as f64;
    if d > n {
        let all_z = PauliOperator::from_paulis(&vec![Pauli::Z; code.n()]);
        return Ok(DistanceReport { d_prime: n, witness: Witness::Operator(all_z), engine: Engine::Geometric });
    }
    Ok(DistanceReport { d_prime: d, witness: Witness::Vector(v), engine: Engine::Geometric })
}

/// Realizes an even vector of the doubled lattice as a Pauli operator by walking defects
/// from plaquette to plaquette: `beta` steps along (1,1) through Z's, then `alpha` steps
/// along (-1,1) through X's.
pub fn operator_from_vector(code: &GtcCode, v: Vec2) -> Result<PauliOperator> {
    if v.beta2() % 2 != 0 {
        return Err(invalid(format!("{v} has odd coordinate sum and is not a closed path")));
    }
    if !doubled_lattice(code).lattice.contains(v) {
        return Err(invalid(format!("{v} is not a doubled-lattice vector")));
    }
    let (alpha, beta) = (v.alpha2() / 2, v.beta2() / 2);
    let mut op = PauliOperator::identity(code.n());
    let mut c = Vec2::ZERO;
    let zs = Vec2::new(beta.signum(), beta.signum());
    for _ in 0..beta.abs() {
        // forward step uses the upper-right corner, backward step the lower-left one
        let q = if beta > 0 { c + Vec2::new(1, 1) } else { c };
        op.apply(code.qubit_index(q), Pauli::Z);
        c = c + zs;
    }
    let xs = Vec2::new(-alpha.signum(), alpha.signum());
    for _ in 0..alpha.abs() {
        let q = if alpha > 0 { c + Vec2::new(0, 1) } else { c + Vec2::new(1, 0) };
        op.apply(code.qubit_index(q), Pauli::X);
        c = c + xs;
    }
    Ok(op)
}

/// Minimum-weight logical operator of the geometric engine as a concrete Pauli.
pub fn geometric_logical(code: &GtcCode, omega: f64) -> Result<(f64, PauliOperator)> {
    let report = effective_distance_geometric(code, omega)?;
    let op = match report.witness {
        Witness::Vector(v) => operator_from_vector(code, v)?,
        Witness::Operator(op) => op,
    };
    Ok((report.d_prime, op))
}

/// Exhaustive minimum effective weight over centralizer elements outside the group.
pub fn effective_distance_oracle(
    s: &StabilizerGroup,
    weights: EffectiveWeight,
    exec: Execution,
) -> Result<DistanceReport> {
    let (n, k) = (s.num_qubits(), s.k());
    if n + k > ORACLE_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "oracle enumerates 2^(n+k) operators; n + k = {} exceeds {ORACLE_BUDGET}",
            n + k
        )));
    }
    if k == 0 {
        return Err(invalid("code encodes no logical qubits"));
    }
    let basis = s.centralizer_basis();
    let best = min_weight_combination(s, &basis, |x, z| weights.from_counts(pauli_counts(&[x], &[z])), exec);
    let (w, op) = best.ok_or_else(|| Error::Numerical("no logical operator of finite weight".into()))?;
    Ok(DistanceReport { d_prime: w, witness: Witness::Operator(op), engine: Engine::Oracle })
}

/// Enumerates all combinations of `basis` (n <= 64) in Gray-code order and returns the
/// lightest element with a nonzero logical signature. Ties go to the earliest index.
fn min_weight_combination(
    s: &StabilizerGroup,
    basis: &[PauliOperator],
    weight: impl Fn(u64, u64) -> f64 + Sync,
    exec: Execution,
) -> Option<(f64, PauliOperator)> {
    let n = s.num_qubits();
    debug_assert!(n <= 64);
    let m = basis.len();
    let bx: Vec<u64> = basis.iter().map(|b| b.x_words()[0]).collect();
    let bz: Vec<u64> = basis.iter().map(|b| b.z_words()[0]).collect();
    let sig: Vec<u32> = basis.iter().map(|b| s.logical_signature_bits(b)).collect();
    let total = 1usize << m;
    let parts = chunks(total, 1 << 14);
    let results = map_range(exec, 0..parts.len(), |c| {
        let range = parts[c].clone();
        let gray = |i: usize| i ^ (i >> 1);
        let (mut x, mut z, mut g) = (0u64, 0u64, 0u32);
        let start = gray(range.start);
        for j in 0..m {
            if start >> j & 1 == 1 {
                x ^= bx[j];
                z ^= bz[j];
                g ^= sig[j];
            }
        }
        let mut best: Option<(f64, usize, u64, u64)> = None;
        for i in range.clone() {
            if i > range.start {
                let j = i.trailing_zeros() as usize;
                x ^= bx[j];
                z ^= bz[j];
                g ^= sig[j];
            }
            if g != 0 {
                let w = weight(x, z);
                if w.is_finite() && best.is_none_or(|b| w < b.0) {
                    best = Some((w, i, x, z));
                }
            }
        }
        best
    });
    results
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(w, _, x, z)| (w, PauliOperator::from_words(n, vec![x], vec![z])))
}

/// Minimum weight of a nontrivial logical built only from `sigma` (and identities), by
/// enumerating the classical code of `sigma`-only centralizer elements. `None` if the
/// enumeration would exceed the oracle budget or no such logical exists.
pub fn pure_pauli_distance(s: &StabilizerGroup, sigma: Pauli) -> Option<usize> {
    let n = s.num_qubits();
    if n > 64 || sigma == Pauli::I {
        return None;
    }
    // sigma-only f commutes with g iff |f ∩ {q : g_q anticommutes with sigma}| is even
    let rows = s
        .generators()
        .iter()
        .map(|g| {
            let mut r = PauliOperator::identity(n);
            for q in g.support() {
                if g.get(q).anticommutes(sigma) {
                    r.set(q, Pauli::X);
                }
            }
            r
        })
        .collect();
    let kernel = x_nullspace(n, rows);
    if kernel.len() > ORACLE_BUDGET {
        return None;
    }
    let (sx, sz) = sigma.bits();
    let basis: Vec<PauliOperator> = kernel
        .iter()
        .map(|f| {
            let w = f.x_words()[0];
            PauliOperator::from_words(n, vec![if sx { w } else { 0 }], vec![if sz { w } else { 0 }])
        })
        .collect();
    min_weight_combination(s, &basis, |x, z| (x | z).count_ones() as f64, Execution::Sequential)
        .map(|(w, _)| w as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfiniteBiasDistances {
    pub d_z: usize,
    pub d_x: usize,
    pub d_y: usize,
}

/// Distances under pure Z, X and Y noise. `d_Z` and `d_X` are the cycle lengths along the
/// diagonals; `d_Y` is the exact minimum over Y-only logicals (see [`pure_y_distance`]).
/// Each is clamped at `n`, the weight of the all-Z logical; a code without Y-only logicals
/// reports `n` as well.
pub fn infinite_bias_distances(code: &GtcCode) -> Result<InfiniteBiasDistances> {
    let lat = code.lattice();
    let n = code.n();
    let clamp = |t: i64| (t as usize).min(n);
    let d_z = clamp(lat.min_cycle_length_along(Vec2::new(1, 1))?);
    let d_x = clamp(lat.min_cycle_length_along(Vec2::new(-1, 1))?);
    let d_y = pure_y_distance(code).unwrap_or(n).min(n);
    Ok(InfiniteBiasDistances { d_z, d_x, d_y })
}

/// XOR-translates every element of a set of signatures (bit `s` set = signature `s`).
fn translate(set: u64, by: u32) -> u64 {
    let mut out = 0;
    let mut rest = set;
    while rest != 0 {
        let s = rest.trailing_zeros();
        rest &= rest - 1;
        out |= 1u64 << (s ^ by);
    }
    out
}

/// Minimum weight of a Y-only nontrivial logical, `None` if there is none.
///
/// A Y-only operator commutes with every plaquette iff its indicator `f` has even sum
/// over each unit square, i.e. `f(x, y) = g(x) + h(y)` on the plane. With canonical
/// basis `(p, q), (0, r)`, periodicity forces `h(y + r) = h(y)` and
/// `g(x + p) - g(x) = h(y) - h(y + q) = c` for a constant bit `c`. The weight on the
/// `p x r` fundamental domain is `g1 (r - h1) + (p - g1) h1` with `g1`, `h1` the
/// number of ones, and the logical signature is linear in the column and row
/// indicators, so reachable `(ones, signature)` pairs for `g` and `h` are built
/// independently and combined.
pub fn pure_y_distance(code: &GtcCode) -> Option<usize> {
    let group = code.stabilizers();
    if group.k() > 2 {
        return None;
    }
    let [u, v] = code.lattice().basis();
    let (p, q, r) = (u.a as usize, u.b.rem_euclid(v.b) as usize, v.b as usize);
    let signature = |cells: &mut dyn Iterator<Item = (usize, usize)>| {
        let mut op = PauliOperator::identity(code.n());
        for (x, y) in cells {
            op.set(code.qubit_index(Vec2::new(x as i64, y as i64)), Pauli::Y);
        }
        group.logical_signature_bits(&op)
    };
    let cols: Vec<u32> = (0..p).map(|x| signature(&mut (0..r).map(|y| (x, y)))).collect();
    let rows: Vec<u32> = (0..r).map(|y| signature(&mut (0..p).map(|x| (x, y)))).collect();

    // reach_g[ones] = signatures reachable by some g with that many ones
    let mut reach_g = vec![0u64; p + 1];
    reach_g[0] = 1;
    for &s in &cols {
        for ones in (0..p).rev() {
            let t = translate(reach_g[ones], s);
            reach_g[ones + 1] |= t;
        }
    }

    // orbits of y -> y + q on Z_r
    let d = crate::arith::gcd(q as i64, r as i64) as usize;
    let len = r / d;
    let mut best: Option<usize> = None;
    for c in [0usize, 1] {
        if c == 1 && len % 2 == 1 {
            continue;
        }
        let mut reach_h = vec![0u64; r + 1];
        reach_h[0] = 1;
        for start in 0..d {
            // the two choices on this orbit: (ones, signature)
            let orbit: Vec<usize> = (0..len).map(|j| (start + j * q) % r).collect();
            let choice = |first: usize| -> (usize, u32) {
                orbit.iter().enumerate().fold((0, 0), |(ones, sig), (j, &y)| {
                    if (first + c * j) % 2 == 1 {
                        (ones + 1, sig ^ rows[y])
                    } else {
                        (ones, sig)
                    }
                })
            };
            let options = [choice(0), choice(1)];
            let mut next = vec![0u64; r + 1];
            for (ones, &set) in reach_h.iter().enumerate() {
                if set == 0 {
                    continue;
                }
                for &(o, s) in &options {
                    next[ones + o] |= translate(set, s);
                }
            }
            reach_h = next;
        }
        for (g1, &sg) in reach_g.iter().enumerate() {
            for (h1, &sh) in reach_h.iter().enumerate() {
                if sg == 0 || sh == 0 {
                    continue;
                }
                // some pair of signatures must differ
                let nontrivial = sg.count_ones() > 1 || sh.count_ones() > 1 || sg != sh;
                if nontrivial {
                    let w = g1 * (r - h1) + (p - g1) * h1;
                    best = Some(best.map_or(w, |b: usize| b.min(w)));
                }
            }
        }
    }
    best
}

/// Largest uncorrectable half of `logical`: the minimum, over splits of its support into
/// two parts, of the heavier part's effective weight.
pub fn effective_half_distance(logical: &PauliOperator, weights: EffectiveWeight) -> Result<f64> {
    let (nx, ny, nz) = logical.counts();
    if nx + ny + nz > 30 {
        return Err(Error::BudgetExceeded(format!(
            "half distance splits a support of {} qubits (limit 30)",
            nx + ny + nz
        )));
    }
    let total = weights.from_counts((nx, ny, nz));
    let mut best = f64::INFINITY;
    // splits only matter through how many of each Pauli type land on one side
    for ex in 0..=nx {
        for ey in 0..=ny {
            for ez in 0..=nz {
                let part = weights.from_counts((ex, ey, ez));
                let rest = weights.from_counts((nx - ex, ny - ey, nz - ez));
                best = best.min(part.max(rest));
            }
        }
    }
    debug_assert!(best <= total);
    Ok(best)
}

/// Half distance of `code` under `model`, using the geometric minimum logical for the
/// independent model and the oracle minimum otherwise.
pub fn half_distance_for(code: &GtcCode, model: &NoiseModel, exec: Execution) -> Result<f64> {
    let weights = model.weights();
    let logical = match model.kind() {
        NoiseKind::Independent => geometric_logical(code, model.omega())?.1,
        _ => match effective_distance_oracle(code.stabilizers(), weights, exec)?.witness {
            Witness::Operator(op) => op,
            Witness::Vector(v) => operator_from_vector(code, v)?,
        },
    };
    effective_half_distance(&logical, weights)
}

/// `(omega/(omega+1) * d', d')` bracketing the distance under correlated XZ noise.
pub fn correlated_distance_bounds(code: &GtcCode, omega: f64) -> Result<(f64, f64)> {
    let d = effective_distance_geometric(code, omega)?.d_prime;
    Ok((omega / (omega + 1.0) * d, d))
}
