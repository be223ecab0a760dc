//! XZZX generalized toric codes and XZZX cyclic codes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{invalid, Error, Result};
use crate::lattice::{CodeLattice, Vec2};
use crate::paulialg::{Pauli, PauliOperator, StabilizerGroup};

/// Pauli pattern of a plaquette generator on corners `(i,j), (i+1,j), (i,j+1), (i+1,j+1)`.
pub const PLAQUETTE: [Pauli; 4] = [Pauli::X, Pauli::Z, Pauli::Z, Pauli::X];

/// Corner offsets matching [`PLAQUETTE`].
pub const CORNERS: [Vec2; 4] = [Vec2::new(0, 0), Vec2::new(1, 0), Vec2::new(0, 1), Vec2::new(1, 1)];

/// XZZX code on Z^2 modulo a lattice of periodicity vectors.
#[derive(Debug, Clone)]
pub struct GtcCode {
    lattice: CodeLattice,
    periodicity: [Vec2; 2],
    qubits: Vec<Vec2>,
    plaquettes: Vec<[usize; 4]>,
    group: StabilizerGroup,
}

impl GtcCode {
    pub fn new(l1: Vec2, l2: Vec2) -> Result<Self> {
        let lattice = CodeLattice::new(l1, l2)?;
        build_gtc_with_basis(lattice, [l1, l2])
    }

    pub fn lattice(&self) -> &CodeLattice {
        &self.lattice
    }

    /// Periodicity vectors as supplied by the caller (spanning the same lattice).
    pub fn periodicity(&self) -> [Vec2; 2] {
        self.periodicity
    }

    pub fn n(&self) -> usize {
        self.qubits.len()
    }

    pub fn k(&self) -> usize {
        self.group.k()
    }

    pub fn qubits(&self) -> &[Vec2] {
        &self.qubits
    }

    pub fn stabilizers(&self) -> &StabilizerGroup {
        &self.group
    }

    pub fn qubit_index(&self, v: Vec2) -> usize {
        self.lattice.coset_index(v)
    }

    /// Qubit indices of the four corners of generator `g`, in [`CORNERS`] order.
    /// Generator `g` has its lower-left corner on qubit `g`.
    pub fn plaquette(&self, g: usize) -> [usize; 4] {
        self.plaquettes[g]
    }

    pub fn spec(&self) -> CodeSpec {
        CodeSpec::from(self)
    }
}

/// Builds the code whose qubits are the cosets of `lattice`.
pub fn build_gtc(lattice: CodeLattice) -> Result<GtcCode> {
    build_gtc_with_basis(lattice, lattice.basis())
}

fn build_gtc_with_basis(lattice: CodeLattice, periodicity: [Vec2; 2]) -> Result<GtcCode> {
    let n = lattice.det() as usize;
    if n < 2 {
        return Err(invalid("a code lattice needs at least 2 cosets"));
    }
    let qubits = lattice.coset_representatives();
    let plaquettes: Vec<[usize; 4]> = qubits
        .iter()
        .map(|&c| CORNERS.map(|d| lattice.coset_index(c + d)))
        .collect();
    let generators = plaquettes
        .iter()
        .map(|corners| {
            let mut g = PauliOperator::identity(n);
            for (&q, &p) in corners.iter().zip(&PLAQUETTE) {
                g.apply(q, p);
            }
            g
        })
        .collect();
    let group = StabilizerGroup::new(n, generators)?;
    Ok(GtcCode { lattice, periodicity, qubits, plaquettes, group })
}

/// XZZX cyclic code parameters: generator `i` is `Z_i X_{i+a} X_{i+a+b} Z_{i+2a+b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicCode {
    pub n: usize,
    pub a: usize,
    pub b: usize,
}

impl CyclicCode {
    pub fn new(n: usize, a: usize, b: usize) -> Result<Self> {
        if n < 2 || a == 0 || b == 0 || a >= n || b >= n {
            return Err(invalid(format!("cyclic parameters need 1 <= a, b < n, got ({n},{a},{b})")));
        }
        if gcd(gcd(n as i64, a as i64), b as i64) != 1 {
            return Err(invalid(format!("gcd(n, a, b) must be 1 for ({n},{a},{b})")));
        }
        Ok(CyclicCode { n, a, b })
    }

    /// Cyclic label of lattice site `v` in the GTC picture: a horizontal step moves the
    /// label by `-a`, a vertical step by `a + b`.
    pub fn label(&self, v: Vec2) -> usize {
        let n = self.n as i64;
        (-(self.a as i64) * v.a + (self.a + self.b) as i64 * v.b).rem_euclid(n) as usize
    }

    pub fn generator(&self, i: usize) -> PauliOperator {
        let n = self.n;
        let mut g = PauliOperator::identity(n);
        g.apply(i % n, Pauli::Z);
        g.apply((i + self.a) % n, Pauli::X);
        g.apply((i + self.a + self.b) % n, Pauli::X);
        g.apply((i + 2 * self.a + self.b) % n, Pauli::Z);
        g
    }
}

pub fn build_cyclic(n: usize, a: usize, b: usize) -> Result<StabilizerGroup> {
    let c = CyclicCode::new(n, a, b)?;
    if 2 * a + b >= n {
        return Err(invalid(format!("cyclic construction needs 2a + b < n, got ({n},{a},{b})")));
    }
    StabilizerGroup::new(n, (0..n).map(|i| c.generator(i)).collect())
}

/// Lattice of all periodicity vectors of the cyclic labelling.
pub fn cyclic_to_gtc(c: &CyclicCode) -> Result<CodeLattice> {
    let n = c.n as i64;
    let (a, s) = (c.a as i64, (c.a + c.b) as i64);
    // kernel of (x, y) -> -a*x + s*y mod n
    let gs = gcd(s, n);
    let p = gs / gcd(gs, a);
    let r = n / gs;
    if p * r != n {
        return Err(invalid(format!("congruence lattice has index {} instead of {n}", p * r)));
    }
    let q = (0..r)
        .find(|&y| (s * y - a * p).rem_euclid(n) == 0)
        .ok_or_else(|| Error::Numerical("no particular solution of the congruence".into()))?;
    CodeLattice::new(Vec2::new(p, q), Vec2::new(0, r))
}

/// Lattice vector with coprime coordinates, if any (smallest by sup norm, then order).
pub fn is_cyclic(code: &GtcCode) -> Option<Vec2> {
    let lat = code.lattice();
    let mut found: Vec<Vec2> = lat
        .points_in_box(lat.det())
        .filter(|v| v.is_coprime())
        .map(Vec2::canonical_sign)
        .collect();
    found.sort_by_key(|v| (v.inf_norm(), *v));
    found.first().copied()
}

/// Direction whose multiples visit every coset, if the coset group is cyclic.
pub fn generating_direction(lat: &CodeLattice) -> Option<Vec2> {
    let n = lat.det();
    let [b1, b2] = lat.basis();
    let bound = b1.inf_norm().max(b2.inf_norm());
    let mut dirs: Vec<Vec2> = (-bound..=bound)
        .flat_map(|x| (-bound..=bound).map(move |y| Vec2::new(x, y)))
        .filter(|d| d.is_coprime() && *d == d.canonical_sign())
        .collect();
    dirs.sort_by_key(|v| (v.one_norm(), *v));
    dirs.into_iter().find(|&d| lat.min_cycle_length_along(d).is_ok_and(|t| t == n))
}

/// Cyclic parameters reproducing `code`'s lattice, preferring `2a + b < n` and then the
/// lexicographically smallest `(a, b)`.
pub fn gtc_to_cyclic(code: &GtcCode) -> Option<CyclicCode> {
    let lat = code.lattice();
    let n = lat.det();
    let dir = generating_direction(lat)?;
    // label of each coset: t with t*dir in that coset
    let mut label = vec![0i64; n as usize];
    for t in 0..n {
        label[lat.coset_index(t * dir)] = t;
    }
    let h = label[lat.coset_index(Vec2::new(1, 0))];
    let v = label[lat.coset_index(Vec2::new(0, 1))];
    // every other labelling differs by a unit of Z_n
    let mut best: Option<(bool, CyclicCode)> = None;
    for u in (1..n).filter(|&u| gcd(u, n) == 1) {
        let a = (-u * h).rem_euclid(n) as usize;
        let b = (u * (v + h)).rem_euclid(n) as usize;
        let Ok(c) = CyclicCode::new(n as usize, a, b) else {
            continue;
        };
        let key = (2 * a + b >= n as usize, c);
        if best.is_none_or(|b| key < b) {
            best = Some(key);
        }
    }
    best.map(|(_, c)| c)
}

/// Infinite-bias repetition structures (`Z`, `X`, `Y`) of the code.
pub fn repetition_structure(code: &GtcCode) -> BTreeSet<Pauli> {
    let lat = code.lattice();
    let n = lat.det();
    let full = |d: Vec2| lat.min_cycle_length_along(d).is_ok_and(|t| t == n);
    let mut out = BTreeSet::new();
    if full(Vec2::new(1, 1)) {
        out.insert(Pauli::Z);
    }
    if full(Vec2::new(-1, 1)) {
        out.insert(Pauli::X);
    }
    if full(Vec2::new(1, 0)) && full(Vec2::new(0, 1)) {
        out.insert(Pauli::Y);
    }
    out
}

/// Periodicity of the two-colourable double cover (the lattice itself when `k = 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubledLattice {
    pub basis: [Vec2; 2],
    pub lattice: CodeLattice,
}

pub fn doubled_lattice(code: &GtcCode) -> DoubledLattice {
    let [mut l1, mut l2] = code.periodicity();
    if code.lattice().is_even() {
        return DoubledLattice { basis: [l1, l2], lattice: *code.lattice() };
    }
    let odd = |v: Vec2| v.one_norm() % 2 == 1;
    if odd(l1) && odd(l2) {
        l1 = l1 + l2;
    } else if odd(l1) {
        std::mem::swap(&mut l1, &mut l2);
    }
    let basis = [l1, 2 * l2];
    let lattice = CodeLattice::new(basis[0], basis[1]).expect("doubling preserves rank");
    DoubledLattice { basis, lattice }
}

/// Serialized code description shared with the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub l1: [i64; 2],
    pub l2: [i64; 2],
    pub n: usize,
    pub k: usize,
    pub cyclic: Option<CyclicCode>,
}

impl From<&GtcCode> for CodeSpec {
    fn from(code: &GtcCode) -> Self {
        let [l1, l2] = code.periodicity();
        CodeSpec {
            l1: [l1.a, l1.b],
            l2: [l2.a, l2.b],
            n: code.n(),
            k: code.k(),
            cyclic: gtc_to_cyclic(code),
        }
    }
}

impl CodeSpec {
    pub fn build(&self) -> Result<GtcCode> {
        let code = GtcCode::new(self.l1.into(), self.l2.into())?;
        if code.n() != self.n || code.k() != self.k {
            return Err(invalid(format!(
                "code spec claims [[{}, {}]] but the lattice gives [[{}, {}]]",
                self.n,
                self.k,
                code.n(),
                code.k()
            )));
        }
        Ok(code)
    }
}
