//! Search for qubit-efficient codes: the ideal diamond-packing layout, close-to-optimal
//! (CTO) lattices around it, and the size frontier `n_min(d')`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::codes::{build_gtc, gtc_to_cyclic, CyclicCode, GtcCode};
use crate::distance::{effective_distance_geometric, infinite_bias_distances};
use crate::error::{invalid, Result};
use crate::exec::{map_range, Execution};
use crate::lattice::{CodeLattice, Vec2};

/// Default relaxation radius of the CTO search.
pub const DEFAULT_DELTA: f64 = 2.0;

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega >= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("bias exponent must be >= 1, got {omega}")))
    }
}

/// Real doubled periodicity vectors `(a, b)` of the ideal packing, whose XZ
/// coordinates are `(alpha, beta) = (+-d'/(2 omega), d'/2)`.
pub fn optimal_doubled_basis(d_prime: f64, omega: f64) -> Result<[(f64, f64); 2]> {
    check_omega(omega)?;
    if !(d_prime > 0.0 && d_prime.is_finite()) {
        return Err(invalid(format!("target distance must be positive, got {d_prime}")));
    }
    let (alpha, beta) = (d_prime / (2.0 * omega), d_prime / 2.0);
    Ok([(-alpha + beta, alpha + beta), (alpha + beta, -alpha + beta)])
}

/// Smallest size allowed by the packing bound for effective distance `d`:
/// `d` up to `2 omega`, then `d^2/(2 omega)`.
pub fn frontier_bound(d_prime: f64, omega: f64) -> f64 {
    d_prime.max(d_prime * d_prime / (2.0 * omega))
}

/// Largest effective distance allowed by the packing bound at size `n`.
pub fn max_distance(n: f64, omega: f64) -> f64 {
    n.min((2.0 * omega * n).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    /// Canonical basis rows `(p, q)` and `(0, r)`.
    pub lattice: [Vec2; 2],
    pub n: usize,
    pub k: usize,
    pub omega: f64,
    pub d_prime: f64,
    pub d_z: usize,
    pub d_x: usize,
    pub d_y: usize,
    pub cyclic: Option<CyclicCode>,
    /// `n` minus the packing-bound size for this `d'`.
    pub frontier_gap: f64,
}

impl CatalogEntry {
    pub fn code(&self) -> Result<GtcCode> {
        build_gtc(CodeLattice::new(self.lattice[0], self.lattice[1])?)
    }
}

pub fn catalog_entry(code: &GtcCode, omega: f64) -> Result<CatalogEntry> {
    let d_prime = effective_distance_geometric(code, omega)?.d_prime;
    let ib = infinite_bias_distances(code)?;
    Ok(CatalogEntry {
        lattice: code.lattice().basis(),
        n: code.n(),
        k: code.k(),
        omega,
        d_prime,
        d_z: ib.d_z,
        d_x: ib.d_x,
        d_y: ib.d_y,
        cyclic: gtc_to_cyclic(code),
        frontier_gap: code.n() as f64 - frontier_bound(d_prime, omega),
    })
}

/// Even integer vectors (integer XZ coordinates) within `delta` of the ideal point in
/// the unweighted XZ 1-norm.
fn ball(alpha0: f64, beta0: f64, delta: f64) -> Vec<Vec2> {
    let eps = 1e-9;
    let mut out = Vec::new();
    let (alo, ahi) = ((alpha0 - delta - eps).ceil() as i64, (alpha0 + delta + eps).floor() as i64);
    let (blo, bhi) = ((beta0 - delta - eps).ceil() as i64, (beta0 + delta + eps).floor() as i64);
    for alpha in alo..=ahi {
        for beta in blo..=bhi {
            if (alpha as f64 - alpha0).abs() + (beta as f64 - beta0).abs() <= delta + eps {
                out.push(Vec2::new(beta - alpha, alpha + beta));
            }
        }
    }
    out
}

/// Odd (k = 1) lattices whose even sublattice is spanned by `v1, v2`.
fn lifts(v1: Vec2, v2: Vec2) -> Vec<CodeLattice> {
    let mut out = Vec::new();
    for (w, other) in [(v1, v2), (v2, v1), (v1 + v2, v1)] {
        if w.a % 2 != 0 || w.b % 2 != 0 {
            continue;
        }
        let u = Vec2::new(w.a / 2, w.b / 2);
        if (u.a + u.b).rem_euclid(2) == 1 {
            if let Ok(l) = CodeLattice::new(u, other) {
                out.push(l);
            }
        }
    }
    out
}

/// Candidate lattices of the CTO search, keyed by canonical basis.
fn cto_lattices(omega: f64, d_target: f64, delta: f64) -> Result<BTreeMap<[Vec2; 2], CodeLattice>> {
    check_omega(omega)?;
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(invalid(format!("delta must be a non-negative number, got {delta}")));
    }
    optimal_doubled_basis(d_target, omega)?;
    let (alpha0, beta0) = (d_target / (2.0 * omega), d_target / 2.0);
    let b1 = ball(alpha0, beta0, delta);
    let b2 = ball(-alpha0, beta0, delta);
    let mut found = BTreeMap::new();
    for &v1 in &b1 {
        for &v2 in &b2 {
            if v1.cross(v2) == 0 {
                continue;
            }
            for l in lifts(v1, v2) {
                if l.det() >= 2 {
                    found.insert(l.basis(), l);
                }
            }
        }
    }
    Ok(found)
}

/// Non-two-colorable codes whose doubled periodicity vectors lie within `delta` of the
/// ideal packing for `d_target`, sorted by size then canonical basis.
pub fn search_cto(omega: f64, d_target: f64, delta: f64, exec: Execution) -> Result<Vec<CatalogEntry>> {
    let lattices: Vec<CodeLattice> = cto_lattices(omega, d_target, delta)?.into_values().collect();
    let entries = map_range(exec, 0..lattices.len(), |i| build_gtc(lattices[i]).and_then(|c| catalog_entry(&c, omega)));
    let mut entries = entries.into_iter().collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.n.cmp(&b.n).then(a.lattice.cmp(&b.lattice)));
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierRow {
    pub d_prime: usize,
    /// Smallest searched code reaching at least this effective distance.
    pub n_min: Option<usize>,
    pub lattice: Option<[Vec2; 2]>,
    /// Packing bound `max(d', d'^2/(2 omega))`.
    pub bound: f64,
    /// Rotated planar surface code, `d'^2`.
    pub rotated_planar: f64,
    /// Unrotated planar code with optimized aspect ratio.
    pub unrotated_planar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frontier {
    pub omega: f64,
    pub delta: f64,
    pub rows: Vec<FrontierRow>,
    /// Every code met by the search.
    pub codes: Vec<CatalogEntry>,
}

/// Union of the CTO searches for targets `2..=d_max`, reduced to `n_min(d')`.
pub fn frontier_scan(omega: f64, d_max: usize, delta: f64, exec: Execution) -> Result<Frontier> {
    let mut lattices = BTreeMap::new();
    for t in 2..=d_max.max(2) {
        lattices.extend(cto_lattices(omega, t as f64, delta)?);
    }
    let lattices: Vec<CodeLattice> = lattices.into_values().collect();
    let codes = map_range(exec, 0..lattices.len(), |i| build_gtc(lattices[i]).and_then(|c| catalog_entry(&c, omega)));
    let mut codes = codes.into_iter().collect::<Result<Vec<_>>>()?;
    codes.sort_by(|a, b| a.n.cmp(&b.n).then(a.lattice.cmp(&b.lattice)));
    let rows = (1..=d_max)
        .map(|d| {
            let df = d as f64;
            let best = codes.iter().find(|c| c.d_prime >= df - 1e-9);
            FrontierRow {
                d_prime: d,
                n_min: best.map(|c| c.n),
                lattice: best.map(|c| c.lattice),
                bound: frontier_bound(df, omega),
                rotated_planar: df * df,
                unrotated_planar: (2.0 * df * df / omega - df * (1.0 + 1.0 / omega)).max(3.0 * df - 2.0),
            }
        })
        .collect();
    Ok(Frontier { omega, delta, rows, codes })
}
