use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::Context;
use gtclab::codes::{build_gtc, cyclic_to_gtc, gtc_to_cyclic, CodeSpec, CyclicCode, GtcCode};
use gtclab::distance::{
    correlated_distance_bounds, effective_distance_geometric, effective_distance_oracle, infinite_bias_distances,
    pure_pauli_distance, DistanceReport, Engine, Witness,
};
use gtclab::flagft::{
    check_flag_ftec_budgeted, default_t_prime, enumerate_fault_tables, gtc_legs, FaultTables, FlagCircuit, FtecReport,
    GateConvention,
};
use gtclab::lattice::{approx_shortest_vector_grid, Vec2};
use gtclab::montecarlo::{fit_exponent, fit_threshold, run_batch, write_csv, DecoderKind, TrialBatch};
use gtclab::noise::{EffectiveWeight, NoiseKind};
use gtclab::optimizer::{frontier_scan, search_cto, CatalogEntry, FrontierRow};
use gtclab::paulialg::Pauli;
use gtclab::{Error, Execution};
use serde::Serialize;

use crate::args::*;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidParameter(msg.into()).into()
}

fn ints(s: &str) -> anyhow::Result<Vec<i64>> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| usage(format!("expected integers, got {s:?}"))))
        .collect()
}

fn vec2(s: &str) -> anyhow::Result<Vec2> {
    match ints(s)?[..] {
        [a, b] => Ok(Vec2::new(a, b)),
        _ => Err(usage(format!("expected a,b, got {s:?}"))),
    }
}

fn cyclic(s: &str) -> anyhow::Result<CyclicCode> {
    match ints(s)?[..] {
        [n, a, b] if n > 0 && a > 0 && b > 0 => Ok(CyclicCode::new(n as usize, a as usize, b as usize)?),
        _ => Err(usage(format!("expected positive n,a,b, got {s:?}"))),
    }
}

fn code_from_text(s: &str) -> anyhow::Result<GtcCode> {
    let v = ints(s)?;
    match v[..] {
        [_, _, _] => Ok(build_gtc(cyclic_to_gtc(&cyclic(s)?)?)?),
        [a, b, c, d] => Ok(GtcCode::new(Vec2::new(a, b), Vec2::new(c, d))?),
        _ => Err(usage(format!("code {s:?} needs 3 (cyclic) or 4 (lattice) integers"))),
    }
}

pub fn build_code(args: &CodeArgs) -> anyhow::Result<GtcCode> {
    match (&args.l1, &args.l2, &args.cyclic, &args.code) {
        (Some(l1), Some(l2), None, None) => Ok(GtcCode::new(vec2(l1)?, vec2(l2)?)?),
        (None, None, Some(c), None) => Ok(build_gtc(cyclic_to_gtc(&cyclic(c)?)?)?),
        (None, None, None, Some(c)) => code_from_text(c),
        _ => Err(usage("give the code as --l1/--l2, --cyclic or --code")),
    }
}

fn kind(m: Model) -> NoiseKind {
    match m {
        Model::Independent => NoiseKind::Independent,
        Model::Correlated => NoiseKind::Correlated,
        Model::Depolarizing => NoiseKind::Depolarizing,
        Model::PureZ => NoiseKind::PureZ,
        Model::PureX => NoiseKind::PureX,
        Model::PureY => NoiseKind::PureY,
    }
}

fn weights(m: Model, omega: f64) -> EffectiveWeight {
    match m {
        Model::Independent => EffectiveWeight::independent(omega),
        Model::Correlated => EffectiveWeight::correlated(omega),
        Model::Depolarizing => EffectiveWeight::depolarizing(),
        Model::PureZ => EffectiveWeight::pure(Pauli::Z),
        Model::PureX => EffectiveWeight::pure(Pauli::X),
        Model::PureY => EffectiveWeight::pure(Pauli::Y),
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => stdout(&text)?,
    }
    Ok(())
}

/// Writes a line to stdout; a closed pipe ends output quietly.
fn stdout(text: &str) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct DistanceOut {
    code: CodeSpec,
    model: NoiseKind,
    omega: f64,
    d_prime: f64,
    engine: Engine,
    /// Doubled-lattice vector or logical operator.
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    correlated_bounds: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_estimate: Option<f64>,
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Vector(v) => v.to_string(),
        Witness::Operator(op) => op.to_string(),
    }
}

/// Distance of `code` under `model` from the engine that computes it exactly, with a
/// witness where the engine provides one.
pub fn model_distance(
    code: &GtcCode,
    model: Model,
    omega: f64,
    exec: Execution,
) -> anyhow::Result<(f64, Engine, Option<String>)> {
    let from = |r: DistanceReport| (r.d_prime, r.engine, Some(witness_text(&r.witness)));
    Ok(match model {
        Model::Independent => from(effective_distance_geometric(code, omega)?),
        Model::PureZ | Model::PureX | Model::PureY => {
            let ib = infinite_bias_distances(code)?;
            let d = match model {
                Model::PureZ => ib.d_z,
                Model::PureX => ib.d_x,
                _ => ib.d_y,
            };
            (d as f64, Engine::Geometric, None)
        }
        Model::Correlated | Model::Depolarizing => {
            from(effective_distance_oracle(code.stabilizers(), weights(model, omega), exec)?)
        }
    })
}

pub fn distance(a: &DistanceArgs, exec: Execution) -> anyhow::Result<()> {
    let code = build_code(&a.code)?;
    let (d_prime, engine, witness) = model_distance(&code, a.model, a.omega, exec)?;
    let mut out = DistanceOut {
        code: CodeSpec::from(&code),
        model: kind(a.model),
        omega: a.omega,
        d_prime,
        engine,
        witness,
        oracle: None,
        agree: None,
        correlated_bounds: None,
        grid_estimate: None,
    };
    if a.oracle {
        let o = match a.model {
            Model::PureZ => pure_pauli_distance(code.stabilizers(), Pauli::Z).map_or(code.n(), |d| d.min(code.n())) as f64,
            Model::PureX => pure_pauli_distance(code.stabilizers(), Pauli::X).map_or(code.n(), |d| d.min(code.n())) as f64,
            Model::PureY => pure_pauli_distance(code.stabilizers(), Pauli::Y).map_or(code.n(), |d| d.min(code.n())) as f64,
            _ => effective_distance_oracle(code.stabilizers(), weights(a.model, a.omega), exec)?.d_prime,
        };
        out.agree = Some((o - d_prime).abs() < 1e-9);
        out.oracle = Some(o);
    }
    if a.model == Model::Correlated {
        out.correlated_bounds = Some(correlated_distance_bounds(&code, a.omega)?);
    }
    if let Some(eps) = a.grid_eps {
        let doubled = gtclab::codes::doubled_lattice(&code);
        out.grid_estimate = Some(approx_shortest_vector_grid(&doubled.lattice, a.omega, eps)?);
    }
    emit(&out, None)
}

#[derive(Serialize)]
struct MapOut {
    code: CodeSpec,
    canonical_basis: [Vec2; 2],
    cyclic: Option<CyclicCode>,
}

pub fn map(a: &MapArgs) -> anyhow::Result<()> {
    let code = build_code(&a.code)?;
    emit(&MapOut { code: CodeSpec::from(&code), canonical_basis: code.lattice().basis(), cyclic: gtc_to_cyclic(&code) }, None)
}

#[derive(Serialize)]
struct CatalogOut {
    omega: f64,
    delta: f64,
    entries: Vec<CatalogEntry>,
    /// Smallest size per distance with the packing bound and planar references.
    curves: Vec<FrontierRow>,
}

pub fn catalog(a: &CatalogArgs, exec: Execution) -> anyhow::Result<()> {
    let out = match a.d_target {
        Some(d) => CatalogOut { omega: a.omega, delta: a.delta, entries: search_cto(a.omega, d, a.delta, exec)?, curves: vec![] },
        None => {
            let f = frontier_scan(a.omega, a.d_max, a.delta, exec)?;
            CatalogOut { omega: f.omega, delta: f.delta, entries: f.codes, curves: f.rows }
        }
    };
    emit(&out, a.out.as_deref())
}

pub fn p_grid(spec: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || usage(format!("expected from:to:steps, got {spec:?}"));
    let [from, to, steps] = parts[..] else { return Err(bad()) };
    let (from, to): (f64, f64) = (from.parse().map_err(|_| bad())?, to.parse().map_err(|_| bad())?);
    let steps: usize = steps.parse().map_err(|_| bad())?;
    if steps == 0 || !(0.0..=1.0).contains(&from) || !(0.0..=1.0).contains(&to) || to < from {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    Ok((0..steps).map(|i| from + (to - from) * i as f64 / (steps - 1) as f64).collect())
}

/// Finite-size scale of a code under the simulated model. Falls back to the geometric
/// distance when the exact engine is over budget.
fn scale(code: &GtcCode, model: Model, omega: f64, exec: Execution) -> anyhow::Result<f64> {
    match model_distance(code, model, omega, exec) {
        Ok((d, _, _)) => Ok(d),
        Err(e) if matches!(e.downcast_ref::<Error>(), Some(Error::BudgetExceeded(_))) => {
            Ok(effective_distance_geometric(code, omega)?.d_prime)
        }
        Err(e) => Err(e),
    }
}

fn decoder(sim: &SimulationArgs) -> anyhow::Result<DecoderKind> {
    match (sim.phenomenological, sim.decoder) {
        (true, DecoderChoice::Ml) => Err(usage("the ML decoder is code-capacity only")),
        (true, _) => Ok(DecoderKind::Phenomenological),
        (false, DecoderChoice::Mwpm) => Ok(DecoderKind::Mwpm),
        (false, DecoderChoice::Ml) => Ok(DecoderKind::Ml),
    }
}

fn batch(code: &GtcCode, sim: &SimulationArgs, seed: u64, exec: Execution) -> anyhow::Result<TrialBatch> {
    let grid = p_grid(&sim.p)?;
    if sim.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let d = scale(code, sim.model, sim.omega, exec)?;
    let mut b = TrialBatch::new(code, d, kind(sim.model), sim.omega, decoder(sim)?, grid, sim.trials, seed);
    b.rounds = sim.rounds;
    Ok(run_batch(code, b, exec)?)
}

fn write_batches(batches: &[TrialBatch], out: Option<&std::path::Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(f);
            write_csv(&mut w, batches)?;
            w.flush()?;
        }
        None => {
            let mut buf = Vec::new();
            write_csv(&mut buf, batches)?;
            stdout(String::from_utf8(buf)?.trim_end())?;
        }
    }
    Ok(())
}

/// Reports go to stdout when the CSV has its own file, else to stderr.
fn report<T: Serialize>(value: &T, csv_to_file: bool) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    if csv_to_file {
        stdout(&text)?;
    } else {
        eprintln!("{text}");
    }
    Ok(())
}

pub fn simulate(a: &SimulateArgs, exec: Execution) -> anyhow::Result<()> {
    let code = build_code(&a.code)?;
    let b = batch(&code, &a.sim, a.sim.seed, exec)?;
    write_batches(std::slice::from_ref(&b), a.sim.out.as_deref())?;
    if let Some(range) = &a.fit {
        let (lo, hi) = range
            .split_once(':')
            .and_then(|(l, h)| Some((l.parse::<f64>().ok()?, h.parse::<f64>().ok()?)))
            .ok_or_else(|| usage(format!("expected lo:hi, got {range:?}")))?;
        report(&fit_exponent(&b, (lo, hi))?, a.sim.out.is_some())?;
    }
    Ok(())
}

pub fn threshold(a: &ThresholdArgs, exec: Execution) -> anyhow::Result<()> {
    let codes: Vec<GtcCode> = match (&a.codes, a.d_list.is_empty()) {
        (Some(list), _) => list.split(';').map(str::trim).filter(|s| !s.is_empty()).map(code_from_text).collect::<anyhow::Result<_>>()?,
        (None, false) => {
            let d_max = a.d_list.iter().cloned().fold(0.0, f64::max).ceil() as usize;
            let frontier = frontier_scan(a.sim.omega, d_max, a.delta, exec)?;
            a.d_list
                .iter()
                .map(|&d| {
                    let entry = frontier
                        .codes
                        .iter()
                        .find(|c| c.d_prime >= d - 1e-9)
                        .ok_or_else(|| usage(format!("no searched code reaches d' = {d}")))?;
                    Ok(entry.code()?)
                })
                .collect::<anyhow::Result<_>>()?
        }
        (None, true) => return Err(usage("give --d-list or --codes")),
    };
    let batches = codes
        .iter()
        .enumerate()
        .map(|(i, c)| batch(c, &a.sim, a.sim.seed.wrapping_add(i as u64), exec))
        .collect::<anyhow::Result<Vec<_>>>()?;
    write_batches(&batches, a.sim.out.as_deref())?;
    report(&fit_threshold(&batches)?, a.sim.out.is_some())
}

#[derive(Serialize)]
struct FlagOut {
    code: CodeSpec,
    verdict: &'static str,
    report: FtecReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    tables: Option<FaultTables>,
}

pub fn flagcheck(a: &FlagcheckArgs, exec: Execution) -> anyhow::Result<()> {
    let code = build_code(&a.code)?;
    let conv = match a.convention {
        Convention::Correlated => GateConvention::Correlated,
        Convention::Independent => GateConvention::Independent,
    };
    let t = match a.t_prime {
        Some(t) => t,
        None => default_t_prime(&code, conv, a.omega, exec)?,
    };
    let r = check_flag_ftec_budgeted(code.stabilizers(), &gtc_legs(&code), !a.no_flags, conv, a.omega, t, a.m_max, a.budget)?;
    let tables = if a.tables {
        let pattern = [Pauli::X, Pauli::Z, Pauli::Z, Pauli::X];
        let circuit = if a.no_flags { FlagCircuit::unflagged(pattern)? } else { FlagCircuit::flagged(pattern)? };
        Some(enumerate_fault_tables(&circuit, conv, a.omega)?)
    } else {
        None
    };
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    emit(&FlagOut { code: CodeSpec::from(&code), verdict, report: r, tables }, None)
}
