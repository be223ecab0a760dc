//! Static analysis of the one-flag syndrome extraction circuit for weight-4 stabilizers.
//!
//! The circuit prepares the syndrome qubit `s` in `|+>` and the flag `f` in `|0>`, then
//! applies data gates `a, F1, b, c, F2, d`: controlled-X (X legs) or controlled-Z
//! (Z legs) from `s` onto data legs 1..4, with flag gates `F1 = F2 = CX(s -> f)`.
//! `s` is measured in the X basis and `f` in the Z basis. Faults act after ideal gates.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codes::GtcCode;
use crate::distance::{effective_distance_geometric, effective_distance_oracle};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::noise::EffectiveWeight;
use crate::paulialg::{Pauli, PauliOperator, StabilizerGroup};

const S: usize = 4;
const F: usize = 5;
/// Enumerated fault combinations per check.
pub const FTEC_BUDGET: u64 = 200_000_000;
const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    /// Controlled-`pauli` from `s` onto data leg `leg`.
    Data { leg: usize, pauli: Pauli },
    /// `CX(s -> f)`.
    Flag,
}

impl Gate {
    fn target(self) -> usize {
        match self {
            Gate::Data { leg, .. } => leg,
            Gate::Flag => F,
        }
    }
}

/// Syndrome extraction circuit for a 4-qubit Pauli pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagCircuit {
    pub pattern: [Pauli; 4],
    pub gates: Vec<Gate>,
}

impl FlagCircuit {
    pub fn flagged(pattern: [Pauli; 4]) -> Result<Self> {
        Self::build(pattern, true)
    }

    /// Control circuit with both flag gates removed.
    pub fn unflagged(pattern: [Pauli; 4]) -> Result<Self> {
        Self::build(pattern, false)
    }

    fn build(pattern: [Pauli; 4], flags: bool) -> Result<Self> {
        if pattern.iter().any(|&p| p != Pauli::X && p != Pauli::Z) {
            return Err(invalid("flag circuits take X and Z legs only"));
        }
        let data = |leg: usize| Gate::Data { leg, pauli: pattern[leg] };
        let gates = if flags {
            vec![data(0), Gate::Flag, data(1), data(2), Gate::Flag, data(3)]
        } else {
            (0..4).map(data).collect()
        };
        Ok(FlagCircuit { pattern, gates })
    }

    pub fn has_flags(&self) -> bool {
        self.gates.contains(&Gate::Flag)
    }

    /// The measured stabilizer restricted to its legs.
    pub fn stabilizer(&self) -> [Pauli; 4] {
        self.pattern
    }
}

/// Pauli frame on 4 data legs, `s` and `f` (bit `i` = qubit `i`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Frame {
    x: u8,
    z: u8,
}

impl Frame {
    fn apply(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        self.x ^= u8::from(x) << q;
        self.z ^= u8::from(z) << q;
    }

    fn bit(v: u8, q: usize) -> bool {
        v >> q & 1 == 1
    }

    fn gate(&mut self, g: Gate) {
        let xs = Self::bit(self.x, S);
        match g {
            Gate::Data { leg, pauli: Pauli::X } | Gate::Data { leg, pauli: Pauli::I } => {
                // CX: X on control spreads to target, Z on target spreads to control
                self.x ^= u8::from(xs) << leg;
                self.z ^= u8::from(Self::bit(self.z, leg)) << S;
            }
            Gate::Data { leg, .. } => {
                // CZ: X on either qubit spreads Z to the other
                self.z ^= u8::from(xs) << leg;
                self.z ^= u8::from(Self::bit(self.x, leg)) << S;
            }
            Gate::Flag => {
                self.x ^= u8::from(xs) << F;
                self.z ^= u8::from(Self::bit(self.z, F)) << S;
            }
        }
    }

    fn data(self) -> [Pauli; 4] {
        std::array::from_fn(|q| Pauli::from_bits(Self::bit(self.x, q), Self::bit(self.z, q)))
    }
}

/// Single fault in one circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Fault {
    /// Two-qubit Pauli `control x target` right after gate `gate`.
    Gate { gate: usize, control: Pauli, target: Pauli },
    /// X error on the flag qubit before its measurement.
    FlagFlip,
    /// Z error on the syndrome qubit before its measurement.
    SyndromeFlip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaultOutcome {
    pub data: [Pauli; 4],
    pub flag: bool,
    pub syndrome_flip: bool,
}

fn outcome(frame: Frame) -> FaultOutcome {
    FaultOutcome { data: frame.data(), flag: Frame::bit(frame.x, F), syndrome_flip: Frame::bit(frame.z, S) }
}

/// Pushes `fault` through the rest of the circuit.
pub fn propagate_fault(circuit: &FlagCircuit, fault: Fault) -> Result<FaultOutcome> {
    let mut frame = Frame::default();
    match fault {
        Fault::Gate { gate, control, target } => {
            let g = *circuit
                .gates
                .get(gate)
                .ok_or_else(|| invalid(format!("gate {gate} outside a circuit of {}", circuit.gates.len())))?;
            frame.apply(S, control);
            frame.apply(g.target(), target);
            for &later in &circuit.gates[gate + 1..] {
                frame.gate(later);
            }
        }
        Fault::FlagFlip => frame.apply(F, Pauli::X),
        Fault::SyndromeFlip => frame.apply(S, Pauli::Z),
    }
    Ok(outcome(frame))
}

/// Runs a data error present before the circuit through it.
pub fn propagate_data_error(circuit: &FlagCircuit, data: [Pauli; 4]) -> FaultOutcome {
    let mut frame = Frame::default();
    for (q, &p) in data.iter().enumerate() {
        frame.apply(q, p);
    }
    for &g in &circuit.gates {
        frame.gate(g);
    }
    outcome(frame)
}

/// Every single fault of the circuit.
pub fn single_faults(circuit: &FlagCircuit) -> Vec<Fault> {
    let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut out = Vec::new();
    for gate in 0..circuit.gates.len() {
        for &control in &paulis {
            for &target in &paulis {
                if control != Pauli::I || target != Pauli::I {
                    out.push(Fault::Gate { gate, control, target });
                }
            }
        }
    }
    if circuit.has_flags() {
        out.push(Fault::FlagFlip);
    }
    out.push(Fault::SyndromeFlip);
    out
}

/// Effective weights assigned to circuit faults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateConvention {
    /// Every fault with an X component weighs `omega`, Z-only faults weigh 1. Data
    /// qubits follow the correlated model.
    Correlated,
    /// X and Z parts of a fault are charged separately: `omega` if any X component,
    /// plus 1 if any Z component (so X on the control with Y on the target weighs
    /// `omega + 1`). Data qubits follow the independent model.
    Independent,
}

impl GateConvention {
    pub fn data_weights(self, omega: f64) -> EffectiveWeight {
        match self {
            GateConvention::Correlated => EffectiveWeight::correlated(omega),
            GateConvention::Independent => EffectiveWeight::independent(omega),
        }
    }

    pub fn fault_weight(self, fault: Fault, omega: f64) -> f64 {
        match fault {
            Fault::FlagFlip => omega,
            Fault::SyndromeFlip => 1.0,
            Fault::Gate { control, target, .. } => {
                let has_x = control.bits().0 || target.bits().0;
                let has_z = control.bits().1 || target.bits().1;
                match (self, has_x, has_z) {
                    (_, false, _) => 1.0,
                    (GateConvention::Independent, true, true) => omega + 1.0,
                    _ => omega,
                }
            }
        }
    }
}

impl fmt::Display for GateConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateConvention::Correlated => "correlated",
            GateConvention::Independent => "independent",
        })
    }
}

/// Fault classes of the flag analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FaultCategory {
    /// X component on `s`, flag raised.
    Xs,
    /// Flips only the syndrome bit.
    Zs,
    /// Raises the flag without an X component on `s`.
    Xf,
    /// Single-qubit data error.
    P,
}

impl fmt::Display for FaultCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaultCategory::Xs => "X_s",
            FaultCategory::Zs => "Z_s",
            FaultCategory::Xf => "X_f",
            FaultCategory::P => "P",
        })
    }
}

fn word(data: &[Pauli; 4]) -> String {
    data.iter().map(|p| p.symbol()).collect()
}

fn mul4(a: &[Pauli; 4], b: &[Pauli; 4]) -> [Pauli; 4] {
    std::array::from_fn(|i| a[i].product(b[i]))
}

/// Weight of a 4-leg error, minimized over multiplication by the measured stabilizer.
pub fn weight_mod_stabilizer(data: &[Pauli; 4], stabilizer: &[Pauli; 4], weights: EffectiveWeight) -> f64 {
    let w = |d: &[Pauli; 4]| d.iter().map(|&p| weights.of(p)).sum::<f64>();
    w(data).min(w(&mul4(data, stabilizer)))
}

fn support_mod_stabilizer(data: &[Pauli; 4], stabilizer: &[Pauli; 4]) -> usize {
    let s = |d: &[Pauli; 4]| d.iter().filter(|&&p| p != Pauli::I).count();
    s(data).min(s(&mul4(data, stabilizer)))
}

/// One row of the fault tables: a category (or pair) and the data errors it induces
/// with the flag raised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub faults: Vec<FaultCategory>,
    pub data: BTreeSet<String>,
    /// Smallest total fault weight realizing the row.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultTables {
    /// Data errors of flagged faults with an X component on `s`.
    pub xi: BTreeSet<String>,
    /// Single faults raising the flag.
    pub single: Vec<TableRow>,
    /// Pairs of faults raising the flag.
    pub double: Vec<TableRow>,
}

/// Builds the fault classes from single-fault propagation and combines them.
pub fn enumerate_fault_tables(circuit: &FlagCircuit, convention: GateConvention, omega: f64) -> Result<FaultTables> {
    let mut classes: BTreeMap<FaultCategory, (bool, BTreeMap<[Pauli; 4], f64>)> = BTreeMap::new();
    let mut add = |cat: FaultCategory, flag: bool, data: [Pauli; 4], w: f64| {
        let entry = classes.entry(cat).or_insert_with(|| (flag, BTreeMap::new()));
        let slot = entry.1.entry(data).or_insert(w);
        *slot = slot.min(w);
    };
    for fault in single_faults(circuit) {
        let out = propagate_fault(circuit, fault)?;
        let w = convention.fault_weight(fault, omega);
        let x_on_s = matches!(fault, Fault::Gate { control, .. } if control.bits().0);
        let trivial = out.data.iter().all(|&p| p == Pauli::I);
        if out.flag && x_on_s {
            add(FaultCategory::Xs, true, out.data, w);
        } else if out.flag {
            add(FaultCategory::Xf, true, out.data, w);
        } else if trivial && out.syndrome_flip {
            add(FaultCategory::Zs, false, out.data, w);
        }
    }
    let weights = convention.data_weights(omega);
    for leg in 0..4 {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let mut d = [Pauli::I; 4];
            d[leg] = p;
            add(FaultCategory::P, false, d, weights.of(p));
        }
    }
    let xi: BTreeSet<String> =
        classes.get(&FaultCategory::Xs).map(|(_, m)| m.keys().map(word).collect()).unwrap_or_default();
    let cats: Vec<FaultCategory> = classes.keys().copied().collect();
    let mut single = Vec::new();
    for &c in &cats {
        let (flag, m) = &classes[&c];
        if *flag {
            let weight = m.values().cloned().fold(f64::INFINITY, f64::min);
            single.push(TableRow { faults: vec![c], data: m.keys().map(word).collect(), weight });
        }
    }
    let mut double = Vec::new();
    for (i, &a) in cats.iter().enumerate() {
        for &b in &cats[i..] {
            let (fa, ma) = &classes[&a];
            let (fb, mb) = &classes[&b];
            if fa ^ fb {
                let mut data = BTreeSet::new();
                let mut weight = f64::INFINITY;
                for (da, wa) in ma {
                    for (db, wb) in mb {
                        data.insert(word(&mul4(da, db)));
                        weight = weight.min(wa + wb);
                    }
                }
                double.push(TableRow { faults: vec![a, b], data, weight });
            }
        }
    }
    Ok(FaultTables { xi, single, double })
}

/// Checks the key inequality for every pair of flagged single faults in one circuit:
/// the product of their data errors weighs no more than the two faults together
/// (modulo the measured stabilizer). Returns violating pairs with their excess.
pub fn pair_weight_violations(
    circuit: &FlagCircuit,
    convention: GateConvention,
    omega: f64,
) -> Result<Vec<(Fault, Fault, f64)>> {
    let weights = convention.data_weights(omega);
    let flagged: Vec<(Fault, FaultOutcome)> = single_faults(circuit)
        .into_iter()
        .map(|f| propagate_fault(circuit, f).map(|o| (f, o)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, o)| o.flag)
        .collect();
    let mut bad = Vec::new();
    for (i, (fa, oa)) in flagged.iter().enumerate() {
        for (fb, ob) in &flagged[i..] {
            let q = mul4(&oa.data, &ob.data);
            let bound = convention.fault_weight(*fa, omega) + convention.fault_weight(*fb, omega);
            let excess = weight_mod_stabilizer(&q, &circuit.stabilizer(), weights) - bound;
            if excess > 1e-9 {
                bad.push((*fa, *fb, excess));
            }
        }
    }
    Ok(bad)
}

/// Whether every element of `xi` has support of at most two legs modulo the stabilizer,
/// and likewise every product of two elements.
pub fn xi_is_local(tables: &FaultTables, stabilizer: &[Pauli; 4]) -> bool {
    let parse = |s: &String| -> [Pauli; 4] {
        let v: Vec<Pauli> = s.chars().map(|c| Pauli::try_from(c).unwrap_or(Pauli::I)).collect();
        std::array::from_fn(|i| v[i])
    };
    let xi: Vec<[Pauli; 4]> = tables.xi.iter().map(parse).collect();
    xi.iter().all(|a| support_mod_stabilizer(a, stabilizer) <= 2)
        && xi.iter().all(|a| xi.iter().all(|b| support_mod_stabilizer(&mul4(a, b), stabilizer) <= 2))
}

/// Pair of errors with the same flag pattern and syndrome whose product is a
/// nontrivial logical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub flagged: Vec<usize>,
    pub e: PauliOperator,
    pub e_prime: PauliOperator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtecReport {
    pub pass: bool,
    pub t_prime: f64,
    pub m_max: usize,
    pub omega: f64,
    pub convention: GateConvention,
    pub flags: bool,
    /// Fault combinations enumerated.
    pub combinations: u64,
    /// Distinct flag patterns met (including the empty one).
    pub flag_patterns: usize,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone)]
struct Atom {
    circuit: Option<usize>,
    x: u64,
    z: u64,
    weight: f64,
}

/// Qubits of each generator in circuit leg order, taken from the plaquette corners.
pub fn gtc_legs(code: &GtcCode) -> Vec<[usize; 4]> {
    (0..code.n()).map(|g| code.plaquette(g)).collect()
}

/// Qubits of each weight-4 generator in ascending order.
pub fn support_legs(group: &StabilizerGroup) -> Result<Vec<[usize; 4]>> {
    group
        .generators()
        .iter()
        .map(|g| {
            let s: Vec<usize> = g.support().collect();
            <[usize; 4]>::try_from(s).map_err(|s| invalid(format!("generator {g} has weight {}, not 4", s.len())))
        })
        .collect()
}

/// Checks the flag t'-FTEC condition with one circuit per generator.
///
/// Error sets are built from fault combinations of total effective weight at most
/// `t_prime`: circuit faults plus arbitrary single-qubit data errors. Combinations are
/// grouped by the set of circuits that flagged (at most `m_max` of them, the empty set
/// included) and by syndrome; two members of a group whose product is a nontrivial
/// logical form a counterexample.
pub fn check_flag_ftec(
    group: &StabilizerGroup,
    legs: &[[usize; 4]],
    flags: bool,
    convention: GateConvention,
    omega: f64,
    t_prime: f64,
    m_max: usize,
) -> Result<FtecReport> {
    check_flag_ftec_budgeted(group, legs, flags, convention, omega, t_prime, m_max, FTEC_BUDGET)
}

/// [`check_flag_ftec`] with an explicit cap on enumerated combinations.
#[allow(clippy::too_many_arguments)]
pub fn check_flag_ftec_budgeted(
    group: &StabilizerGroup,
    legs: &[[usize; 4]],
    flags: bool,
    convention: GateConvention,
    omega: f64,
    t_prime: f64,
    m_max: usize,
    budget: u64,
) -> Result<FtecReport> {
    let n = group.num_qubits();
    let gens = group.generators();
    if n > 64 || gens.len() > 64 {
        return Err(Error::BudgetExceeded(format!("flag check supports up to 64 qubits and generators, got {n}")));
    }
    if legs.len() != gens.len() {
        return Err(invalid(format!("{} leg lists for {} generators", legs.len(), gens.len())));
    }
    if !(omega >= 1.0 && omega.is_finite()) || t_prime.is_nan() || t_prime < 0.0 {
        return Err(invalid(format!("need omega >= 1 and t' >= 0, got {omega}, {t_prime}")));
    }
    let weights = convention.data_weights(omega);
    let lift = |q4: &[usize; 4], data: &[Pauli; 4]| -> (u64, u64) {
        let mut op = PauliOperator::identity(n);
        for (&q, &p) in q4.iter().zip(data) {
            op.apply(q, p);
        }
        (op.x_words()[0], op.z_words()[0])
    };

    // dedupe: unflagged atoms act like data errors wherever they come from
    let mut best: HashMap<(Option<usize>, u64, u64), f64> = HashMap::new();
    let mut push = |key: (Option<usize>, u64, u64), w: f64| {
        if key.0.is_some() || (key.1 | key.2) != 0 {
            let slot = best.entry(key).or_insert(w);
            *slot = slot.min(w);
        }
    };
    for q in 0..n {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let op = PauliOperator::single(n, q, p);
            push((None, op.x_words()[0], op.z_words()[0]), weights.of(p));
        }
    }
    for (g, q4) in legs.iter().enumerate() {
        let pattern: [Pauli; 4] = std::array::from_fn(|i| gens[g].get(q4[i]));
        let circuit = if flags { FlagCircuit::flagged(pattern)? } else { FlagCircuit::unflagged(pattern)? };
        for fault in single_faults(&circuit) {
            let out = propagate_fault(&circuit, fault)?;
            let (x, z) = lift(q4, &out.data);
            push((out.flag.then_some(g), x, z), convention.fault_weight(fault, omega));
        }
    }
    let mut atoms: Vec<Atom> = best
        .into_iter()
        .filter(|(_, w)| *w <= t_prime + 1e-9)
        .map(|((circuit, x, z), weight)| Atom { circuit, x, z, weight })
        .collect();
    atoms.sort_by(|a, b| {
        a.weight.total_cmp(&b.weight).then(a.circuit.cmp(&b.circuit)).then(a.x.cmp(&b.x)).then(a.z.cmp(&b.z))
    });

    let syndrome_of = |x: u64, z: u64| -> (u64, u32) {
        let op = PauliOperator::from_words(n, vec![x], vec![z]);
        let s = group.syndrome(&op).unwrap_or_default();
        let bits = s.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | u64::from(b) << i);
        (bits, group.logical_signature_bits(&op))
    };
    let atom_sig: Vec<(u64, u32)> = atoms.iter().map(|a| syndrome_of(a.x, a.z)).collect();

    let mut state = Search {
        atoms: &atoms,
        sig: &atom_sig,
        t_prime: t_prime + 1e-9,
        m_max,
        seen: HashMap::new(),
        combinations: 0,
        counterexamples: Vec::new(),
        exhausted: false,
        budget,
    };
    state.dfs(0, 0.0, Combo::default());
    if state.exhausted {
        return Err(Error::BudgetExceeded(format!(
            "flag check stopped after {} fault combinations (limit {budget}); {} flag patterns covered",
            state.combinations,
            state.seen.keys().map(|k| k.0.clone()).collect::<BTreeSet<_>>().len()
        )));
    }
    let flag_patterns = state.seen.keys().map(|k| k.0.clone()).collect::<BTreeSet<_>>().len();
    let counterexamples = state
        .counterexamples
        .iter()
        .map(|(flagged, a, b)| Counterexample {
            flagged: flagged.clone(),
            e: PauliOperator::from_words(n, vec![a.0], vec![a.1]),
            e_prime: PauliOperator::from_words(n, vec![b.0], vec![b.1]),
        })
        .collect::<Vec<_>>();
    Ok(FtecReport {
        pass: counterexamples.is_empty(),
        t_prime,
        m_max,
        omega,
        convention,
        flags,
        combinations: state.combinations,
        flag_patterns,
        counterexamples,
    })
}

#[derive(Debug, Clone, Default)]
struct Combo {
    x: u64,
    z: u64,
    syndrome: u64,
    logical: u32,
    flagged: Vec<usize>,
}

type Witness = (Vec<usize>, (u64, u64), (u64, u64));
/// (flag pattern, syndrome) -> (logical signature, operator)
type Seen = HashMap<(Vec<usize>, u64), (u32, (u64, u64))>;

struct Search<'a> {
    atoms: &'a [Atom],
    sig: &'a [(u64, u32)],
    t_prime: f64,
    m_max: usize,
    seen: Seen,
    combinations: u64,
    counterexamples: Vec<Witness>,
    exhausted: bool,
    budget: u64,
}

impl Search<'_> {
    fn record(&mut self, c: &Combo) {
        self.combinations += 1;
        if c.flagged.len() > self.m_max {
            return;
        }
        let key = (c.flagged.clone(), c.syndrome);
        match self.seen.get(&key) {
            None => {
                self.seen.insert(key, (c.logical, (c.x, c.z)));
            }
            Some(&(logical, op)) => {
                if logical != c.logical && self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                    self.counterexamples.push((c.flagged.clone(), op, (c.x, c.z)));
                }
            }
        }
    }

    fn dfs(&mut self, start: usize, used: f64, combo: Combo) {
        self.record(&combo);
        for i in start..self.atoms.len() {
            if self.exhausted || self.counterexamples.len() >= MAX_COUNTEREXAMPLES {
                return;
            }
            if self.combinations >= self.budget {
                self.exhausted = true;
                return;
            }
            let a = &self.atoms[i];
            if used + a.weight > self.t_prime {
                // atoms are sorted by weight
                return;
            }
            let mut next = combo.clone();
            next.x ^= a.x;
            next.z ^= a.z;
            next.syndrome ^= self.sig[i].0;
            next.logical ^= self.sig[i].1;
            if let Some(g) = a.circuit {
                match next.flagged.binary_search(&g) {
                    Ok(pos) => {
                        next.flagged.remove(pos);
                    }
                    Err(pos) => next.flagged.insert(pos, g),
                }
            }
            self.dfs(i + 1, used + a.weight, next);
        }
    }
}

/// `(d' - 1)/2` for the data-qubit model of `convention`: the exact distance under
/// correlated weights (oracle) or the geometric distance under independent weights.
pub fn default_t_prime(code: &GtcCode, convention: GateConvention, omega: f64, exec: Execution) -> Result<f64> {
    let d = match convention {
        GateConvention::Correlated => {
            effective_distance_oracle(code.stabilizers(), EffectiveWeight::correlated(omega), exec)?.d_prime
        }
        GateConvention::Independent => effective_distance_geometric(code, omega)?.d_prime,
    };
    Ok((d - 1.0) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::build_cyclic;
    use crate::lattice::Vec2;

    const XXZZ: [Pauli; 4] = [Pauli::X, Pauli::X, Pauli::Z, Pauli::Z];
    const XZZX: [Pauli; 4] = [Pauli::X, Pauli::Z, Pauli::Z, Pauli::X];

    fn set(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn xi_for_xxzz() {
        let c = FlagCircuit::flagged(XXZZ).unwrap();
        let t = enumerate_fault_tables(&c, GateConvention::Correlated, 2.0).unwrap();
        assert_eq!(t.xi, set(&["IIZZ", "IZZZ", "IXZZ", "IYZZ", "IIIZ", "IIXZ", "IIYZ"]));
        assert!(xi_is_local(&t, &XXZZ));
    }

    /// Same construction with the XZZX pattern: a hook after b leaves Z X on legs 3, 4
    /// times any Pauli on leg 2; after c, X on leg 4 times any Pauli on leg 3.
    #[test]
    fn xi_for_xzzx() {
        let c = FlagCircuit::flagged(XZZX).unwrap();
        let t = enumerate_fault_tables(&c, GateConvention::Correlated, 2.0).unwrap();
        assert_eq!(t.xi, set(&["IIZX", "IZZX", "IXZX", "IYZX", "IIIX", "IIXX", "IIYX"]));
        assert!(xi_is_local(&t, &XZZX));
    }

    #[test]
    fn table_structure() {
        for pattern in [XXZZ, XZZX] {
            let c = FlagCircuit::flagged(pattern).unwrap();
            let t = enumerate_fault_tables(&c, GateConvention::Correlated, 3.0).unwrap();
            let cats: Vec<Vec<FaultCategory>> = t.single.iter().map(|r| r.faults.clone()).collect();
            assert_eq!(cats, vec![vec![FaultCategory::Xs], vec![FaultCategory::Xf]]);
            assert_eq!(t.single[1].data, set(&["IIII"]));
            assert_eq!(t.single[0].data, t.xi);
            let pairs: Vec<Vec<FaultCategory>> = t.double.iter().map(|r| r.faults.clone()).collect();
            use FaultCategory::*;
            assert_eq!(pairs, vec![vec![Xs, Zs], vec![Xs, P], vec![Zs, Xf], vec![Xf, P]]);
            assert_eq!(t.double[0].data, t.xi);
            assert_eq!(t.double[2].data, set(&["IIII"]));
            assert_eq!(t.double[3].data.len(), 12);
            assert_eq!(t.single[0].weight, 3.0);
        }
    }

    #[test]
    fn propagation_examples() {
        let c = FlagCircuit::flagged(XXZZ).unwrap();
        let after_b = propagate_fault(&c, Fault::Gate { gate: 2, control: Pauli::X, target: Pauli::I }).unwrap();
        assert_eq!(word(&after_b.data), "IIZZ");
        assert!(after_b.flag);
        for gate in 0..6 {
            let o = propagate_fault(&c, Fault::Gate { gate, control: Pauli::Z, target: Pauli::I }).unwrap();
            assert_eq!((word(&o.data).as_str(), o.flag, o.syndrome_flip), ("IIII", false, true));
        }
        let f = propagate_fault(&c, Fault::FlagFlip).unwrap();
        assert_eq!((word(&f.data).as_str(), f.flag), ("IIII", true));
        // the same hook without flag gates goes unnoticed
        let u = FlagCircuit::unflagged(XXZZ).unwrap();
        let hook = propagate_fault(&u, Fault::Gate { gate: 1, control: Pauli::X, target: Pauli::I }).unwrap();
        assert_eq!((word(&hook.data).as_str(), hook.flag), ("IIZZ", false));
    }

    #[test]
    fn fault_free_circuit_measures_the_stabilizer() {
        for pattern in [XXZZ, XZZX] {
            let c = FlagCircuit::flagged(pattern).unwrap();
            for idx in 0..256usize {
                let data: [Pauli; 4] = std::array::from_fn(|q| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][idx >> (2 * q) & 3]);
                let o = propagate_data_error(&c, data);
                let anti = data.iter().zip(&pattern).filter(|(a, b)| a.anticommutes(**b)).count() % 2 == 1;
                assert_eq!(o.data, data);
                assert!(!o.flag);
                assert_eq!(o.syndrome_flip, anti);
            }
        }
    }

    #[test]
    fn key_inequality_holds_for_flagged_pairs() {
        for omega in [1.0, 2.0, 3.0, 5.0] {
            for pattern in [XXZZ, XZZX] {
                let c = FlagCircuit::flagged(pattern).unwrap();
                let v = pair_weight_violations(&c, GateConvention::Correlated, omega).unwrap();
                assert!(v.is_empty(), "{omega} {pattern:?} {v:?}");
                // independent data weights price Y at omega + 1; the bound slips by one
                let v = pair_weight_violations(&c, GateConvention::Independent, omega).unwrap();
                assert!(!v.is_empty());
                assert!(v.iter().all(|&(_, _, e)| e <= 1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn five_qubit_passes() {
        let g = build_cyclic(5, 1, 1).unwrap();
        let legs = support_legs(&g).unwrap();
        let r = check_flag_ftec(&g, &legs, true, GateConvention::Correlated, 1.0, 1.0, 1).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.flag_patterns > 1);
    }

    #[test]
    fn gtc13_passes_with_flags_and_fails_without() {
        let code = GtcCode::new(Vec2::new(3, 2), Vec2::new(-2, 3)).unwrap();
        let legs = gtc_legs(&code);
        let t = default_t_prime(&code, GateConvention::Correlated, 1.0, Execution::default()).unwrap();
        assert_eq!(t, 2.0);
        let ok = check_flag_ftec(code.stabilizers(), &legs, true, GateConvention::Correlated, 1.0, t, 1).unwrap();
        assert!(ok.pass, "{:?}", ok.counterexamples);
        let bad = check_flag_ftec(code.stabilizers(), &legs, false, GateConvention::Correlated, 1.0, t, 1).unwrap();
        assert!(!bad.pass);
        assert_eq!(bad.flag_patterns, 1);
        let ce = &bad.counterexamples[0];
        let prod = &ce.e * &ce.e_prime;
        assert!(code.stabilizers().is_nontrivial_logical(&prod));
        assert_eq!(code.stabilizers().syndrome(&ce.e).unwrap(), code.stabilizers().syndrome(&ce.e_prime).unwrap());
    }

    #[test]
    fn gtc13_at_omega3() {
        let code = GtcCode::new(Vec2::new(-1, 5), Vec2::new(-3, 2)).unwrap();
        let legs = gtc_legs(&code);
        for conv in [GateConvention::Correlated, GateConvention::Independent] {
            let t = default_t_prime(&code, conv, 3.0, Execution::default()).unwrap();
            let r = check_flag_ftec(code.stabilizers(), &legs, true, conv, 3.0, t, 1).unwrap();
            assert!(r.pass, "{conv}: {:?}", r.counterexamples);
            assert_eq!(r.flag_patterns, 14);
        }
    }

    #[test]
    fn budget_is_reported() {
        let code = GtcCode::new(Vec2::new(3, 2), Vec2::new(-2, 3)).unwrap();
        let err = check_flag_ftec_budgeted(code.stabilizers(), &gtc_legs(&code), true, GateConvention::Correlated, 1.0, 2.0, 1, 100)
            .unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded(ref m) if m.contains("after 100")), "{err}");
    }
}
