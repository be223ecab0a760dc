//! Binary symplectic algebra of n-qubit Pauli operators modulo phase.

use std::fmt;
use std::ops::{Mul, MulAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        (x1 & z2) ^ (z1 & x2)
    }

    pub fn product(self, other: Pauli) -> Pauli {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        Pauli::from_bits(x1 ^ x2, z1 ^ z2)
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = Error;
    fn try_from(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' | '_' | '.' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(invalid(format!("not a Pauli symbol: {c:?}"))),
        }
    }
}

pub(crate) fn words(n: usize) -> usize {
    n.div_ceil(64)
}

/// Pauli operator stored as packed x and z bit vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOperator {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator { n, x: vec![0; words(n)], z: vec![0; words(n)] }
    }

    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut op = Self::identity(n);
        op.set(qubit, p);
        op
    }

    pub fn from_paulis(paulis: &[Pauli]) -> Self {
        let mut op = Self::identity(paulis.len());
        for (i, &p) in paulis.iter().enumerate() {
            op.set(i, p);
        }
        op
    }

    pub(crate) fn from_words(n: usize, x: Vec<u64>, z: Vec<u64>) -> Self {
        debug_assert!(x.len() == words(n) && z.len() == words(n));
        PauliOperator { n, x, z }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn get(&self, q: usize) -> Pauli {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (w, b) = (q / 64, q % 64);
        Pauli::from_bits(self.x[w] >> b & 1 == 1, self.z[w] >> b & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (w, b) = (q / 64, q % 64);
        let (x, z) = p.bits();
        self.x[w] = self.x[w] & !(1 << b) | (u64::from(x) << b);
        self.z[w] = self.z[w] & !(1 << b) | (u64::from(z) << b);
    }

    /// Multiplies qubit `q` by `p` in place.
    pub fn apply(&mut self, q: usize, p: Pauli) {
        let cur = self.get(q);
        self.set(q, cur.product(p));
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(x, z)| (x | z).count_ones() as usize).sum()
    }

    /// Number of qubits carrying exactly `(X, Y, Z)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        pauli_counts(&self.x, &self.z)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&q| self.get(q) != Pauli::I)
    }

    pub fn paulis(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.get(q)).collect()
    }

    pub fn try_mul(&self, other: &PauliOperator) -> Result<PauliOperator> {
        check_size(self, other)?;
        let mut out = self.clone();
        out.xor_words(&other.x, &other.z);
        Ok(out)
    }

    pub(crate) fn xor_words(&mut self, x: &[u64], z: &[u64]) {
        for (a, b) in self.x.iter_mut().zip(x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(z) {
            *a ^= b;
        }
    }

    /// Operator restricted to the listed qubits, in list order.
    pub fn restrict(&self, qubits: &[usize]) -> PauliOperator {
        PauliOperator::from_paulis(&qubits.iter().map(|&q| self.get(q)).collect::<Vec<_>>())
    }
}

pub(crate) fn pauli_counts(x: &[u64], z: &[u64]) -> (usize, usize, usize) {
    let mut c = (0, 0, 0);
    for (&x, &z) in x.iter().zip(z) {
        c.0 += (x & !z).count_ones() as usize;
        c.1 += (x & z).count_ones() as usize;
        c.2 += (z & !x).count_ones() as usize;
    }
    c
}

fn check_size(p: &PauliOperator, q: &PauliOperator) -> Result<()> {
    if p.n != q.n {
        return Err(Error::SizeMismatch { left: p.n, right: q.n });
    }
    Ok(())
}

impl MulAssign<&PauliOperator> for PauliOperator {
    /// Panics if the operators act on different numbers of qubits.
    fn mul_assign(&mut self, rhs: &PauliOperator) {
        assert_eq!(self.n, rhs.n, "Pauli operators act on different qubit counts");
        self.xor_words(&rhs.x, &rhs.z);
    }
}

impl Mul for &PauliOperator {
    type Output = PauliOperator;
    fn mul(self, rhs: &PauliOperator) -> PauliOperator {
        let mut out = self.clone();
        out *= rhs;
        out
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q).symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliOperator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let paulis = s.trim().chars().map(Pauli::try_from).collect::<Result<Vec<_>>>()?;
        Ok(PauliOperator::from_paulis(&paulis))
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Symplectic inner product: `true` iff `p` and `q` anticommute.
pub fn symplectic_product(p: &PauliOperator, q: &PauliOperator) -> Result<bool> {
    check_size(p, q)?;
    Ok(anticommute_words(&p.x, &p.z, &q.x, &q.z))
}

pub(crate) fn anticommute_words(px: &[u64], pz: &[u64], qx: &[u64], qz: &[u64]) -> bool {
    let mut acc = 0u32;
    for i in 0..px.len() {
        acc ^= ((px[i] & qz[i]) ^ (pz[i] & qx[i])).count_ones();
    }
    acc & 1 == 1
}

/// Row of a GF(2) matrix whose columns are the symplectic coordinates `(x | z)`,
/// stored as a single Pauli so both halves share the word layout.
type Row = PauliOperator;

fn leading_column(r: &Row) -> Option<usize> {
    let w = r.x.len();
    for (i, &word) in r.x.iter().chain(&r.z).enumerate() {
        if word != 0 {
            let bit = word.trailing_zeros() as usize;
            return Some(if i < w { i * 64 + bit } else { r.n + (i - w) * 64 + bit });
        }
    }
    None
}

fn column_bit(r: &Row, col: usize) -> bool {
    if col < r.n {
        r.x[col / 64] >> (col % 64) & 1 == 1
    } else {
        let c = col - r.n;
        r.z[c / 64] >> (c % 64) & 1 == 1
    }
}

fn flip_column(r: &mut Row, col: usize) {
    if col < r.n {
        r.x[col / 64] ^= 1 << (col % 64);
    } else {
        let c = col - r.n;
        r.z[c / 64] ^= 1 << (c % 64);
    }
}

/// Incremental row echelon form for span membership.
#[derive(Debug, Clone, Default)]
struct Echelon {
    rows: Vec<(usize, Row)>,
}

impl Echelon {
    fn reduce(&self, v: &Row) -> Row {
        let mut v = v.clone();
        for (pivot, row) in &self.rows {
            if column_bit(&v, *pivot) {
                v *= row;
            }
        }
        v
    }

    /// Adds `v` if independent; returns whether the span grew.
    fn insert(&mut self, v: &Row) -> bool {
        let r = self.reduce(v);
        match leading_column(&r) {
            None => false,
            Some(pivot) => {
                let pos = self.rows.partition_point(|(p, _)| *p < pivot);
                self.rows.insert(pos, (pivot, r));
                true
            }
        }
    }

    fn contains(&self, v: &Row) -> bool {
        self.reduce(v).is_identity()
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Reduced row echelon form of `rows` with the row operations applied to an identity
/// matrix alongside. Returns pivot columns and transform rows for the nonzero rows.
fn rref(mut rows: Vec<Row>, ncols: usize) -> (Vec<Row>, Vec<usize>, Vec<Vec<bool>>) {
    let m = rows.len();
    let mut transform: Vec<Vec<bool>> = (0..m).map(|i| (0..m).map(|j| i == j).collect()).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(sel) = (rank..m).find(|&i| column_bit(&rows[i], col)) else {
            continue;
        };
        rows.swap(rank, sel);
        transform.swap(rank, sel);
        let pivot_row = rows[rank].clone();
        let pivot_t = transform[rank].clone();
        for i in 0..m {
            if i != rank && column_bit(&rows[i], col) {
                rows[i] *= &pivot_row;
                for (a, b) in transform[i].iter_mut().zip(&pivot_t) {
                    *a ^= b;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == m {
            break;
        }
    }
    rows.truncate(rank);
    transform.truncate(rank);
    (rows, pivots, transform)
}

/// Basis of `{f : row.x . f = 0 for every row}`, returned as X-type operators; the z
/// halves of `rows` are ignored.
pub(crate) fn x_nullspace(n: usize, rows: Vec<PauliOperator>) -> Vec<PauliOperator> {
    let rows = rows
        .into_iter()
        .map(|r| PauliOperator { n, x: r.x, z: vec![0; words(n)] })
        .collect();
    let (rows, pivots, _) = rref(rows, n);
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = PauliOperator::identity(n);
            flip_column(&mut v, free);
            for (row, &pc) in rows.iter().zip(&pivots) {
                if column_bit(row, free) {
                    flip_column(&mut v, pc);
                }
            }
            v
        })
        .collect()
}

/// Coset label of a centralizer element relative to the chosen logical operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogicalClass {
    I,
    X,
    Y,
    Z,
}

impl LogicalClass {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match Pauli::from_bits(x, z) {
            Pauli::I => LogicalClass::I,
            Pauli::X => LogicalClass::X,
            Pauli::Y => LogicalClass::Y,
            Pauli::Z => LogicalClass::Z,
        }
    }
}

/// Abelian group of commuting Pauli operators, with logical operators and destabilizers.
#[derive(Debug, Clone)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<PauliOperator>,
    echelon: Echelon,
    independent: Vec<usize>,
    logicals: Vec<(PauliOperator, PauliOperator)>,
    destabilizers: Vec<PauliOperator>,
}

impl StabilizerGroup {
    pub fn new(n: usize, generators: Vec<PauliOperator>) -> Result<Self> {
        for g in &generators {
            if g.n != n {
                return Err(Error::SizeMismatch { left: n, right: g.n });
            }
        }
        for (i, g) in generators.iter().enumerate() {
            for h in &generators[i + 1..] {
                if symplectic_product(g, h)? {
                    return Err(invalid(format!("generators {g} and {h} anticommute")));
                }
            }
        }
        let mut echelon = Echelon::default();
        let mut independent = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            if echelon.insert(g) {
                independent.push(i);
            }
        }
        let mut group = StabilizerGroup {
            n,
            generators,
            echelon,
            independent,
            logicals: Vec::new(),
            destabilizers: Vec::new(),
        };
        group.logicals = group.choose_logicals();
        group.destabilizers = group.solve_destabilizers();
        Ok(group)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.n - self.echelon.rank()
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    /// Indices of a maximal independent subset of generators, greedy in index order.
    pub fn independent_generators(&self) -> &[usize] {
        &self.independent
    }

    /// `(X_i, Z_i)` pairs of logical representatives.
    pub fn logicals(&self) -> &[(PauliOperator, PauliOperator)] {
        &self.logicals
    }

    /// `destabilizers()[j]` anticommutes exactly with independent generator `j`.
    pub fn destabilizers(&self) -> &[PauliOperator] {
        &self.destabilizers
    }

    /// Transposed check matrix rows: `p` commutes with all generators iff it is in the kernel.
    fn check_rows(&self) -> Vec<Row> {
        self.generators
            .iter()
            .map(|g| PauliOperator { n: self.n, x: g.z.clone(), z: g.x.clone() })
            .collect()
    }

    /// Basis of the centralizer, ordered by free column of the check matrix.
    pub fn centralizer_basis(&self) -> Vec<PauliOperator> {
        let (rows, pivots, _) = rref(self.check_rows(), 2 * self.n);
        let mut is_pivot = vec![false; 2 * self.n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..2 * self.n)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = PauliOperator::identity(self.n);
                flip_column(&mut v, free);
                for (row, &pc) in rows.iter().zip(&pivots) {
                    if column_bit(row, free) {
                        flip_column(&mut v, pc);
                    }
                }
                v
            })
            .collect()
    }

    pub fn in_stabilizer(&self, p: &PauliOperator) -> bool {
        p.n == self.n && self.echelon.contains(p)
    }

    pub fn commutes_with_all(&self, p: &PauliOperator) -> Result<()> {
        for (i, g) in self.generators.iter().enumerate() {
            if symplectic_product(g, p)? {
                return Err(Error::NotInCentralizer(i));
            }
        }
        Ok(())
    }

    /// Anticommutation bits with every generator.
    pub fn syndrome(&self, p: &PauliOperator) -> Result<Vec<bool>> {
        self.generators.iter().map(|g| symplectic_product(g, p)).collect()
    }

    /// `(x_i, z_i)` bits: `x_i` = anticommutes with `Z_i`, `z_i` = anticommutes with `X_i`.
    pub fn logical_signature(&self, p: &PauliOperator) -> Vec<(bool, bool)> {
        self.logicals
            .iter()
            .map(|(xl, zl)| {
                (
                    anticommute_words(&p.x, &p.z, &zl.x, &zl.z),
                    anticommute_words(&p.x, &p.z, &xl.x, &xl.z),
                )
            })
            .collect()
    }

    /// Signature packed as `x_0 z_0 x_1 z_1 ...` from the least significant bit.
    pub fn logical_signature_bits(&self, p: &PauliOperator) -> u32 {
        self.logical_signature(p)
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &(x, z))| acc | u32::from(x) << (2 * i) | u32::from(z) << (2 * i + 1))
    }

    pub fn logical_class(&self, p: &PauliOperator) -> Result<LogicalClass> {
        if self.k() != 1 {
            return Err(invalid(format!("logical class needs k = 1, code has k = {}", self.k())));
        }
        self.commutes_with_all(p)?;
        let (x, z) = self.logical_signature(p)[0];
        Ok(LogicalClass::from_bits(x, z))
    }

    /// Centralizer element outside the group.
    pub fn is_nontrivial_logical(&self, p: &PauliOperator) -> bool {
        self.commutes_with_all(p).is_ok() && !self.in_stabilizer(p)
    }

    fn choose_logicals(&self) -> Vec<(PauliOperator, PauliOperator)> {
        let candidates = self.centralizer_basis();
        let mut span = self.echelon.clone();
        let mut pairs: Vec<(PauliOperator, PauliOperator)> = Vec::new();
        let orthogonalize = |c: &PauliOperator, pairs: &[(PauliOperator, PauliOperator)]| {
            let mut c = c.clone();
            for (xl, zl) in pairs {
                let sx = anticommute_words(&c.x, &c.z, &xl.x, &xl.z);
                let sz = anticommute_words(&c.x, &c.z, &zl.x, &zl.z);
                if sz {
                    c *= xl;
                }
                if sx {
                    c *= zl;
                }
            }
            c
        };
        for _ in 0..self.k() {
            let Some(xl) = candidates
                .iter()
                .map(|c| orthogonalize(c, &pairs))
                .find(|c| !span.contains(c))
            else {
                break;
            };
            let Some(zl) = candidates
                .iter()
                .map(|c| orthogonalize(c, &pairs))
                .find(|c| anticommute_words(&c.x, &c.z, &xl.x, &xl.z))
            else {
                break;
            };
            span.insert(&xl);
            span.insert(&zl);
            pairs.push((xl, zl));
        }
        pairs
    }

    fn solve_destabilizers(&self) -> Vec<PauliOperator> {
        let all = self.check_rows();
        let rows: Vec<Row> = self.independent.iter().map(|&i| all[i].clone()).collect();
        let m = rows.len();
        let (rref_rows, pivots, transform) = rref(rows, 2 * self.n);
        debug_assert_eq!(rref_rows.len(), m);
        (0..m)
            .map(|j| {
                let mut t = PauliOperator::identity(self.n);
                for (i, &pc) in pivots.iter().enumerate() {
                    if transform[i][j] {
                        flip_column(&mut t, pc);
                    }
                }
                t
            })
            .collect()
    }

    /// Pauli with the given anticommutation pattern on the independent generators.
    pub fn pure_error(&self, independent_syndrome: &[bool]) -> PauliOperator {
        let mut out = PauliOperator::identity(self.n);
        for (t, &bit) in self.destabilizers.iter().zip(independent_syndrome) {
            if bit {
                out *= t;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn op(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn five_qubit() -> StabilizerGroup {
        let gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ", "ZZXIX"].map(op).to_vec();
        StabilizerGroup::new(5, gens).unwrap()
    }

    #[test]
    fn products() {
        assert!(symplectic_product(&op("X"), &op("Z")).unwrap());
        assert!(!symplectic_product(&op("XI"), &op("IZ")).unwrap());
        assert!(symplectic_product(&op("XI"), &op("XII")).is_err());
        assert_eq!((&op("XYZI") * &op("ZYXX")).to_string(), "YIYX");
        assert_eq!(op("XYZIY").counts(), (1, 2, 1));
        assert_eq!(op("XYZIY").weight(), 4);
    }

    #[test]
    fn five_qubit_structure() {
        let s = five_qubit();
        assert_eq!(s.k(), 1);
        let basis = s.centralizer_basis();
        assert_eq!(basis.len(), 6);
        for b in &basis {
            assert!(s.commutes_with_all(b).is_ok());
        }
        assert!(s.in_stabilizer(&PauliOperator::identity(5)));
        assert!(s.generators().iter().all(|g| s.in_stabilizer(g)));
        // weight-3 logical
        let lx = op("XXXXX");
        assert!(s.is_nontrivial_logical(&lx));
        let mut found_w3 = false;
        for c in all_centralizer(&s) {
            if c.weight() == 3 {
                assert!(!s.in_stabilizer(&c));
                found_w3 = true;
            }
        }
        assert!(found_w3);
    }

    fn all_centralizer(s: &StabilizerGroup) -> Vec<PauliOperator> {
        let basis = s.centralizer_basis();
        (0u32..1 << basis.len())
            .map(|mask| {
                let mut p = PauliOperator::identity(s.num_qubits());
                for (i, b) in basis.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        p *= b;
                    }
                }
                p
            })
            .collect()
    }

    #[test]
    fn logical_classes() {
        let s = five_qubit();
        let (xl, zl) = s.logicals()[0].clone();
        assert_eq!(s.logical_class(&PauliOperator::identity(5)).unwrap(), LogicalClass::I);
        assert_eq!(s.logical_class(&(&xl * &s.generators()[2])).unwrap(), LogicalClass::X);
        assert_eq!(s.logical_class(&zl).unwrap(), LogicalClass::Z);
        assert_eq!(s.logical_class(&(&xl * &zl)).unwrap(), LogicalClass::Y);
        assert_eq!(s.logical_class(&op("ZIIII")), Err(Error::NotInCentralizer(0)));
    }

    #[test]
    fn destabilizers_invert_syndrome() {
        let s = five_qubit();
        let ind = s.independent_generators().to_vec();
        for (j, t) in s.destabilizers().iter().enumerate() {
            for (m, &gi) in ind.iter().enumerate() {
                assert_eq!(symplectic_product(&s.generators()[gi], t).unwrap(), j == m);
            }
        }
    }

    #[test]
    fn rejects_anticommuting_generators() {
        assert!(StabilizerGroup::new(1, vec![op("X"), op("Z")]).is_err());
    }

    #[test]
    fn round_trip_strings() {
        let p = op("IXYZ");
        assert_eq!(p.to_string(), "IXYZ");
        assert_eq!(serde_json::to_string(&p).unwrap(), "\"IXYZ\"");
        assert!("IXQ".parse::<PauliOperator>().is_err());
    }

    #[test]
    fn wide_operators_cross_word_boundaries() {
        let mut p = PauliOperator::identity(130);
        p.set(63, Pauli::X);
        p.set(64, Pauli::Z);
        p.set(129, Pauli::Y);
        assert_eq!(p.weight(), 3);
        assert_eq!(p.support().collect::<Vec<_>>(), vec![63, 64, 129]);
        let q = PauliOperator::single(130, 64, Pauli::X);
        assert!(symplectic_product(&p, &q).unwrap());
    }

    proptest! {
        #[test]
        fn class_constant_on_cosets(mask in 0u32..32, which in 0usize..4) {
            let s = five_qubit();
            let (xl, zl) = s.logicals()[0].clone();
            let reps = [PauliOperator::identity(5), xl.clone(), &xl * &zl, zl.clone()];
            let mut p = reps[which].clone();
            for (i, g) in s.generators().iter().enumerate() {
                if mask >> i & 1 == 1 {
                    p *= g;
                }
            }
            prop_assert_eq!(s.logical_class(&p).unwrap(), s.logical_class(&reps[which]).unwrap());
        }

        #[test]
        fn product_is_xor(a in prop::collection::vec(0u8..4, 70), b in prop::collection::vec(0u8..4, 70)) {
            let to = |v: &[u8]| v.iter().map(|&c| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][c as usize]).collect::<Vec<_>>();
            let (pa, pb) = (to(&a), to(&b));
            let prod = &PauliOperator::from_paulis(&pa) * &PauliOperator::from_paulis(&pb);
            for i in 0..70 {
                prop_assert_eq!(prod.get(i), pa[i].product(pb[i]));
            }
            let anti = pa.iter().zip(&pb).filter(|(x, y)| x.anticommutes(**y)).count() % 2 == 1;
            prop_assert_eq!(symplectic_product(&PauliOperator::from_paulis(&pa), &PauliOperator::from_paulis(&pb)).unwrap(), anti);
        }
    }
}
