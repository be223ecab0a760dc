//! Logical error rate estimation by Monte Carlo sampling, and fits of the results.
//!
//! Every trial draws from its own random stream keyed by `(seed, p index, trial
//! index)`, so counts do not depend on how trials are scheduled.

mod fit;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codes::GtcCode;
use crate::decoders::{default_rounds, sample_history, Decoder, MlDecoder, MwpmDecoder, PhenomenologicalDecoder};
use crate::error::{invalid, Error, Result};
use crate::exec::{chunks, map_range, Execution};
use crate::noise::{sample_error_with, NoiseKind, NoiseModel};

pub use fit::{fit_exponent, fit_threshold, ExponentFit, ThresholdFit};

const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    /// Matching with perfect syndrome measurement.
    Mwpm,
    /// Exact coset decoding with perfect syndrome measurement.
    Ml,
    /// Spacetime matching with noisy measurement.
    Phenomenological,
}

impl DecoderKind {
    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Mwpm => "mwpm",
            DecoderKind::Ml => "ml",
            DecoderKind::Phenomenological => "phenomenological",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mwpm" => Ok(DecoderKind::Mwpm),
            "ml" => Ok(DecoderKind::Ml),
            "phenomenological" | "phenom" => Ok(DecoderKind::Phenomenological),
            other => Err(invalid(format!("unknown decoder '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointResult {
    pub failures: u64,
    pub trials: u64,
}

impl PointResult {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failures as f64 / self.trials as f64
        }
    }

    /// 95% Wilson score interval.
    pub fn wilson(&self) -> (f64, f64) {
        wilson_interval(self.failures, self.trials, 1.959_963_984_540_054)
    }
}

pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// A sweep of one code, noise family and decoder over a grid of total error rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBatch {
    pub code_id: String,
    pub n: usize,
    pub k: usize,
    /// Finite-size scale of the code, used by threshold fits.
    pub d_prime: f64,
    pub omega: f64,
    pub model: NoiseKind,
    pub decoder: DecoderKind,
    pub p_grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    /// Noisy rounds for phenomenological decoding; defaults to `ceil(d_prime)`.
    pub rounds: Option<usize>,
    pub results: Vec<PointResult>,
}

impl TrialBatch {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        code: &GtcCode,
        d_prime: f64,
        model: NoiseKind,
        omega: f64,
        decoder: DecoderKind,
        p_grid: Vec<f64>,
        trials: u64,
        seed: u64,
    ) -> Self {
        TrialBatch {
            code_id: code_id(code),
            n: code.n(),
            k: code.k(),
            d_prime,
            omega,
            model,
            decoder,
            p_grid,
            trials,
            seed,
            rounds: None,
            results: Vec::new(),
        }
    }

    /// `(p, result)` pairs of a filled batch.
    pub fn points(&self) -> impl Iterator<Item = (f64, PointResult)> + '_ {
        self.p_grid.iter().copied().zip(self.results.iter().copied())
    }
}

/// Identifier built from the canonical lattice basis.
pub fn code_id(code: &GtcCode) -> String {
    let [u, v] = code.lattice().basis();
    format!("hnf-{}-{}-{}", u.a, u.b, v.b)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the random stream of one trial.
pub fn trial_seed(seed: u64, p_index: usize, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ p_index as u64) ^ trial)
}

fn count_parallel<F>(trials: u64, exec: Execution, trial_fails: F) -> Result<u64>
where
    F: Fn(u64) -> Result<bool> + Sync + Send,
{
    let ranges = chunks(trials as usize, CHUNK);
    let partial = map_range(exec, 0..ranges.len(), |c| {
        let mut fails = 0u64;
        for t in ranges[c].clone() {
            if trial_fails(t as u64)? {
                fails += 1;
            }
        }
        Ok(fails)
    });
    partial.into_iter().sum()
}

/// Runs every point of `batch` and stores the counts.
pub fn run_batch(code: &GtcCode, mut batch: TrialBatch, exec: Execution) -> Result<TrialBatch> {
    if code_id(code) != batch.code_id {
        return Err(invalid(format!("batch is for {}, got code {}", batch.code_id, code_id(code))));
    }
    let mut results = Vec::with_capacity(batch.p_grid.len());
    for (pi, &p) in batch.p_grid.iter().enumerate() {
        let model = NoiseModel::with_total(batch.model, p, batch.omega)?;
        let failures = match batch.decoder {
            DecoderKind::Mwpm => {
                let dec = MwpmDecoder::with_execution(code, &model, exec)?;
                count_code_capacity(&dec, &model, batch.seed, pi, batch.trials, exec)?
            }
            DecoderKind::Ml => {
                let dec = MlDecoder::with_execution(code.stabilizers(), &model, exec)?;
                count_code_capacity(&dec, &model, batch.seed, pi, batch.trials, exec)?
            }
            DecoderKind::Phenomenological => {
                let rounds = batch.rounds.unwrap_or_else(|| default_rounds(batch.d_prime));
                let dec = PhenomenologicalDecoder::with_execution(code, &model, p, rounds, exec)?;
                count_parallel(batch.trials, exec, |t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(batch.seed, pi, t));
                    let h = sample_history(code, &model, p, rounds, &mut rng);
                    Ok(!dec.correct(&h)?.success)
                })?
            }
        };
        results.push(PointResult { failures, trials: batch.trials });
    }
    batch.results = results;
    Ok(batch)
}

fn count_code_capacity(
    dec: &dyn Decoder,
    model: &NoiseModel,
    seed: u64,
    p_index: usize,
    trials: u64,
    exec: Execution,
) -> Result<u64> {
    let n = dec.group().num_qubits();
    count_parallel(trials, exec, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, p_index, t));
        let e = sample_error_with(model, n, &mut rng);
        Ok(!dec.correct(&e)?.success)
    })
}

/// Two decoders run on the same error stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairedComparison {
    pub trials: u64,
    pub failures_a: u64,
    pub failures_b: u64,
    /// Trials where only `a` failed.
    pub only_a: u64,
    /// Trials where only `b` failed.
    pub only_b: u64,
}

impl PairedComparison {
    /// `(rate_a - rate_b) / sigma` using the paired-difference variance.
    pub fn z_score(&self) -> f64 {
        let n = self.trials as f64;
        let d = (self.only_a as f64 - self.only_b as f64) / n;
        let second = (self.only_a + self.only_b) as f64 / n;
        let var = (second - d * d) / n;
        if var <= 0.0 {
            if d == 0.0 {
                0.0
            } else {
                d.signum() * f64::INFINITY
            }
        } else {
            d / var.sqrt()
        }
    }
}

/// Code-capacity comparison of two decoders on identical sampled errors.
pub fn run_paired(
    a: &dyn Decoder,
    b: &dyn Decoder,
    model: &NoiseModel,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<PairedComparison> {
    let n = a.group().num_qubits();
    if b.group().num_qubits() != n {
        return Err(Error::SizeMismatch { left: n, right: b.group().num_qubits() });
    }
    let ranges = chunks(trials as usize, CHUNK);
    let partial = map_range(exec, 0..ranges.len(), |c| -> Result<[u64; 4]> {
        let mut acc = [0u64; 4];
        for t in ranges[c].clone() {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, 0, t as u64));
            let e = sample_error_with(model, n, &mut rng);
            let fa = !a.correct(&e)?.success;
            let fb = !b.correct(&e)?.success;
            acc[0] += u64::from(fa);
            acc[1] += u64::from(fb);
            acc[2] += u64::from(fa && !fb);
            acc[3] += u64::from(fb && !fa);
        }
        Ok(acc)
    });
    let mut total = [0u64; 4];
    for part in partial {
        for (t, x) in total.iter_mut().zip(part?) {
            *t += x;
        }
    }
    Ok(PairedComparison { trials, failures_a: total[0], failures_b: total[1], only_a: total[2], only_b: total[3] })
}

/// One output row per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub code_id: String,
    pub n: usize,
    pub k: usize,
    pub d_prime: f64,
    pub omega: f64,
    pub model: String,
    pub decoder: String,
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub fn csv_rows(batch: &TrialBatch) -> Vec<CsvRow> {
    batch
        .points()
        .map(|(p, r)| {
            let (lo, hi) = r.wilson();
            CsvRow {
                code_id: batch.code_id.clone(),
                n: batch.n,
                k: batch.k,
                d_prime: batch.d_prime,
                omega: batch.omega,
                model: batch.model.name().to_string(),
                decoder: batch.decoder.name().to_string(),
                p,
                trials: r.trials,
                failures: r.failures,
                rate: r.rate(),
                ci_low: lo,
                ci_high: hi,
            }
        })
        .collect()
}

pub fn write_csv<W: Write>(out: W, batches: &[TrialBatch]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidParameter(format!("csv output: {e}"));
    for b in batches {
        for row in csv_rows(b) {
            w.serialize(row).map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::InvalidParameter(format!("csv output: {e}")))?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<CsvRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<Vec<CsvRow>, _>>()
        .map_err(|e| Error::InvalidParameter(format!("csv input: {e}")))
}
