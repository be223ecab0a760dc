//! Rank-2 integer sublattices of Z^2 and the rescaled XZ norm.
//!
//! The XZ frame uses the diagonal axes x = (-1, 1) and z = (1, 1), so a vector
//! (a, b) decomposes as alpha*x + beta*z with alpha = (b - a)/2, beta = (a + b)/2.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::arith::{ext_gcd, gcd};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub a: i64,
    pub b: i64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { a: 0, b: 0 };

    pub const fn new(a: i64, b: i64) -> Self {
        Vec2 { a, b }
    }

    pub fn one_norm(self) -> i64 {
        self.a.abs() + self.b.abs()
    }

    pub fn inf_norm(self) -> i64 {
        self.a.abs().max(self.b.abs())
    }

    pub fn cross(self, other: Vec2) -> i64 {
        self.a * other.b - self.b * other.a
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_coprime(self) -> bool {
        gcd(self.a, self.b) == 1
    }

    /// Twice the x-axis coordinate, `b - a`.
    pub fn alpha2(self) -> i64 {
        self.b - self.a
    }

    /// Twice the z-axis coordinate, `a + b`.
    pub fn beta2(self) -> i64 {
        self.a + self.b
    }

    pub fn alpha(self) -> f64 {
        self.alpha2() as f64 / 2.0
    }

    pub fn beta(self) -> f64 {
        self.beta2() as f64 / 2.0
    }

    /// Sign-normalized representative of `{v, -v}`: first nonzero coordinate positive.
    pub fn canonical_sign(self) -> Vec2 {
        if self.a < 0 || (self.a == 0 && self.b < 0) {
            -self
        } else {
            self
        }
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.a, -self.b)
    }
}

impl Mul<Vec2> for i64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        Vec2::new(self * v.a, self * v.b)
    }
}

impl From<[i64; 2]> for Vec2 {
    fn from([a, b]: [i64; 2]) -> Self {
        Vec2::new(a, b)
    }
}

impl From<(i64, i64)> for Vec2 {
    fn from((a, b): (i64, i64)) -> Self {
        Vec2::new(a, b)
    }
}

/// Rescaled 1-norm `omega*|alpha| + |beta|` in the XZ frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XZNorm {
    omega: f64,
}

impl XZNorm {
    pub fn new(omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega < 1.0 {
            return Err(invalid(format!("bias exponent must be a finite value >= 1, got {omega}")));
        }
        Ok(XZNorm { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn norm(&self, v: Vec2) -> f64 {
        (self.omega * v.alpha2().abs() as f64 + v.beta2().abs() as f64) / 2.0
    }
}

/// A full-rank sublattice of Z^2 stored in row Hermite normal form:
/// rows `(p, q)` and `(0, r)` with `p, r > 0` and `0 <= q < r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CodeLattice {
    p: i64,
    q: i64,
    r: i64,
}

impl CodeLattice {
    pub fn new(l1: Vec2, l2: Vec2) -> Result<Self> {
        hnf_canonicalize([l1, l2])
    }

    pub fn det(&self) -> i64 {
        self.p * self.r
    }

    pub fn basis(&self) -> [Vec2; 2] {
        [Vec2::new(self.p, self.q), Vec2::new(0, self.r)]
    }

    /// Integer coordinates of `v` in the canonical basis, if `v` is a lattice vector.
    pub fn coordinates(&self, v: Vec2) -> Option<(i64, i64)> {
        if v.a % self.p != 0 {
            return None;
        }
        let m1 = v.a / self.p;
        let rest = v.b - m1 * self.q;
        if rest % self.r != 0 {
            return None;
        }
        Some((m1, rest / self.r))
    }

    pub fn contains(&self, v: Vec2) -> bool {
        self.coordinates(v).is_some()
    }

    /// Representative of `v + lattice` inside the fundamental domain `[0,p) x [0,r)`.
    pub fn reduce(&self, v: Vec2) -> Vec2 {
        let x = v.a.rem_euclid(self.p);
        let m1 = (v.a - x) / self.p;
        let y = (v.b - m1 * self.q).rem_euclid(self.r);
        Vec2::new(x, y)
    }

    /// Position of the coset of `v` in the lexicographic scan of the fundamental domain.
    pub fn coset_index(&self, v: Vec2) -> usize {
        let w = self.reduce(v);
        (w.a * self.r + w.b) as usize
    }

    /// All coset representatives in lexicographic order; `coset_index` inverts this list.
    pub fn coset_representatives(&self) -> Vec<Vec2> {
        let mut out = Vec::with_capacity(self.det() as usize);
        for x in 0..self.p {
            for y in 0..self.r {
                out.push(Vec2::new(x, y));
            }
        }
        out
    }

    /// Every lattice vector has even coordinate sum.
    pub fn is_even(&self) -> bool {
        self.basis().iter().all(|v| v.beta2().rem_euclid(2) == 0)
    }

    /// Smallest `t > 0` with `t * dir` in the lattice.
    pub fn min_cycle_length_along(&self, dir: Vec2) -> Result<i64> {
        if !dir.is_coprime() {
            return Err(invalid(format!("direction {dir} must have coprime coordinates")));
        }
        let t0 = self.p / gcd(self.p, dir.a);
        let c = (t0 * dir.b - (t0 * dir.a / self.p) * self.q).rem_euclid(self.r);
        Ok(t0 * (self.r / gcd(self.r, c)))
    }

    /// Lattice vectors `v` with `|v.a|, |v.b| <= bound`, zero included.
    pub fn points_in_box(&self, bound: i64) -> impl Iterator<Item = Vec2> + '_ {
        let m1_max = bound / self.p;
        (-m1_max..=m1_max).flat_map(move |m1| {
            let off = m1 * self.q;
            let lo = (-bound - off).div_euclid(self.r) + i64::from((-bound - off).rem_euclid(self.r) != 0);
            let hi = (bound - off).div_euclid(self.r);
            (lo..=hi).map(move |m2| Vec2::new(m1 * self.p, off + m2 * self.r))
        })
    }

    /// Lagrange-Gauss reduced basis (Euclidean), deterministic.
    pub fn gauss_reduced(&self) -> [Vec2; 2] {
        let dot = |u: Vec2, v: Vec2| u.a as i128 * v.a as i128 + u.b as i128 * v.b as i128;
        let [mut u, mut v] = self.basis();
        if dot(u, u) > dot(v, v) {
            std::mem::swap(&mut u, &mut v);
        }
        loop {
            let uu = dot(u, u);
            let m = round_div(dot(u, v), uu);
            v = v - (m as i64) * u;
            if dot(v, v) >= uu {
                break;
            }
            std::mem::swap(&mut u, &mut v);
        }
        [u, v]
    }
}

fn round_div(n: i128, d: i128) -> i128 {
    // nearest integer to n/d, halves toward negative infinity
    (2 * n + d).div_euclid(2 * d)
}

impl fmt::Display for CodeLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [l1, l2] = self.basis();
        write!(f, "span{{{l1},{l2}}}")
    }
}

/// Canonical (row Hermite normal form) lattice spanned by `basis`.
pub fn hnf_canonicalize(basis: [Vec2; 2]) -> Result<CodeLattice> {
    let [u, v] = basis;
    if u.cross(v) == 0 {
        return Err(Error::DegenerateLattice);
    }
    let (g, s, t) = ext_gcd(u.a, v.a);
    // unimodular: [[s, t], [v.a/g, -u.a/g]] has determinant -1
    let q = s * u.b + t * v.b;
    let r = ((v.a / g) * u.b - (u.a / g) * v.b).abs();
    Ok(CodeLattice { p: g, q: q.rem_euclid(r), r })
}

/// Exact minimum of the XZ norm over nonzero lattice vectors.
///
/// Ties are broken towards the sign-normalized, lexicographically smallest vector.
pub fn shortest_vector_xz(lat: &CodeLattice, norm: XZNorm) -> (Vec2, f64) {
    let mut best = lat
        .gauss_reduced()
        .into_iter()
        .chain(lat.basis())
        .map(|v| (norm.norm(v), v.canonical_sign()))
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
        .expect("basis is nonempty");
    // the XZ norm dominates the sup norm whenever omega >= 1
    let bound = best.0.floor() as i64;
    for v in lat.points_in_box(bound) {
        if v.is_zero() || v != v.canonical_sign() {
            continue;
        }
        let n = norm.norm(v);
        if n.total_cmp(&best.0).then(v.cmp(&best.1)).is_lt() {
            best = (n, v);
        }
    }
    (best.1, best.0)
}

/// Grid search for the minimum XZ norm with an expanding diamond of radius `r`.
///
/// The basis is mapped to the scaled frame `(omega*alpha, beta)`; the radius grows in
/// steps of `eps/2` and every grid point on the upper half of the 1-norm sphere is tested
/// for a nonzero lattice point within 1-norm distance `eps`. The result lies within `eps`
/// of the exact minimum. A coarse pass with a larger step brackets the answer first, which
/// skips only radii at which no grid point can succeed.
pub fn approx_shortest_vector_grid(lat: &CodeLattice, omega: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!("grid step must be positive, got {eps}")));
    }
    XZNorm::new(omega)?;
    let scaled = ScaledBasis::new(lat, omega);
    let mut steps = vec![eps];
    while steps.last().copied().unwrap_or(eps) < 0.5 {
        let next = steps.last().copied().unwrap_or(eps) * 8.0;
        steps.push(next);
    }
    steps.reverse();
    // Euclidean length never exceeds the 1-norm
    let mut start = (scaled.lambda_euclid - steps[0]).max(0.0);
    let mut hit = 0.0;
    for (i, &step) in steps.iter().enumerate() {
        hit = scaled.diamond_scan(step, start);
        if let Some(&finer) = steps.get(i + 1) {
            start = (hit - step / 2.0 - 2.0 * finer).max(0.0);
        }
    }
    Ok(hit)
}

struct ScaledBasis {
    rows: [[f64; 2]; 2],
    inv: [[f64; 2]; 2],
    lambda_euclid: f64,
}

impl ScaledBasis {
    fn new(lat: &CodeLattice, omega: f64) -> Self {
        let map = |v: Vec2| [omega * v.alpha(), v.beta()];
        let [u, v] = lat.basis().map(map);
        let rows = lagrange_reduce_f64(u, v);
        let [[a, b], [c, d]] = rows;
        let det = a * d - b * c;
        // row-vector convention: point = m * rows, so m = point * rows^-1
        let inv = [[d / det, -b / det], [-c / det, a / det]];
        let lambda_euclid = rows[0][0].hypot(rows[0][1]);
        ScaledBasis { rows, inv, lambda_euclid }
    }

    fn near_nonzero_point(&self, x: f64, y: f64, eps: f64) -> bool {
        let m1 = (x * self.inv[0][0] + y * self.inv[1][0]).round();
        let m2 = (x * self.inv[0][1] + y * self.inv[1][1]).round();
        for d1 in -1..=1 {
            for d2 in -1..=1 {
                let (k1, k2) = (m1 + d1 as f64, m2 + d2 as f64);
                if k1 == 0.0 && k2 == 0.0 {
                    continue;
                }
                let px = k1 * self.rows[0][0] + k2 * self.rows[1][0];
                let py = k1 * self.rows[0][1] + k2 * self.rows[1][1];
                if (px - x).abs() + (py - y).abs() <= eps {
                    return true;
                }
            }
        }
        false
    }

    /// First radius `j*eps/2 > start` at which the scan succeeds.
    fn diamond_scan(&self, eps: f64, start: f64) -> f64 {
        let half = eps / 2.0;
        let mut j = (start / half).floor() as u64;
        loop {
            j += 1;
            let r = j as f64 * half;
            for k in 0..=j {
                let y = k as f64 * half;
                if self.near_nonzero_point(-r + y, y, eps) || self.near_nonzero_point(r - y, y, eps) {
                    return r;
                }
            }
        }
    }
}

fn lagrange_reduce_f64(mut u: [f64; 2], mut v: [f64; 2]) -> [[f64; 2]; 2] {
    let dot = |x: [f64; 2], y: [f64; 2]| x[0] * y[0] + x[1] * y[1];
    if dot(u, u) > dot(v, v) {
        std::mem::swap(&mut u, &mut v);
    }
    loop {
        let m = (dot(u, v) / dot(u, u)).round();
        v = [v[0] - m * u[0], v[1] - m * u[1]];
        if dot(v, v) >= dot(u, u) * (1.0 - 1e-12) {
            break;
        }
        std::mem::swap(&mut u, &mut v);
    }
    [u, v]
}
