//! Conditional-symmetry tables, Δ sweeps and multinomial Monte Carlo.
//!
//! Every random stream comes from [`GENERATOR`]: ChaCha20 keyed by
//! `seed_from_u64(seed)`, with the replicate index selecting the stream.
//! Replicate `r` therefore sees the same draws no matter how many replicates
//! run or how they are scheduled across threads.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{AsymmError, Result};
use crate::inference::{phi_interval, EstimateOptions};
use crate::measures::{phi, phi_cs_closed, phi_power, WeightKind, WeightScheme, ZeroPairPolicy};
use crate::special::ln_gamma;
use crate::table::{off_diagonal, CountTable, Normalization, ProbTable};

/// Name of the random generator recorded in reports.
pub const GENERATOR: &str = "chacha20 (rand_chacha 0.9), seed_from_u64(seed), stream = replicate index";

/// Random stream for replicate `index` under `seed`.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw in `[0, 1)` from the top 53 bits of one 64-bit output.
fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Exact binomial draw by inversion.
///
/// Small means walk the CDF up from 0; otherwise the search starts at the
/// mode and alternates outward, which costs `O(√(npq))` steps.
pub fn binomial(n: u64, p: f64, rng: &mut impl RngCore) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    if p > 0.5 {
        return n - binomial(n, 1.0 - p, rng);
    }
    let q = 1.0 - p;
    let odds = p / q;
    let nf = n as f64;
    let mut u = uniform(rng);
    if nf * p < 30.0 {
        let mut f = (nf * (-p).ln_1p()).exp();
        let mut k = 0u64;
        while u > f && k < n {
            u -= f;
            f *= (nf - k as f64) / (k as f64 + 1.0) * odds;
            k += 1;
        }
        return k;
    }
    let mode = (((n + 1) as f64) * p).floor().min(nf) as u64;
    let m = mode as f64;
    let log_mode = ln_gamma(nf + 1.0) - ln_gamma(m + 1.0) - ln_gamma(nf - m + 1.0) + m * p.ln() + (nf - m) * q.ln();
    let f_mode = log_mode.exp();
    u -= f_mode;
    if u <= 0.0 {
        return mode;
    }
    let (mut lo, mut hi) = (mode, mode);
    let (mut f_lo, mut f_hi) = (f_mode, f_mode);
    loop {
        let mut moved = false;
        if hi < n {
            f_hi *= (nf - hi as f64) / (hi as f64 + 1.0) * odds;
            hi += 1;
            u -= f_hi;
            if u <= 0.0 {
                return hi;
            }
            moved = true;
        }
        if lo > 0 {
            f_lo *= lo as f64 / (nf - lo as f64 + 1.0) / odds;
            lo -= 1;
            u -= f_lo;
            if u <= 0.0 {
                return lo;
            }
            moved = true;
        }
        if !moved || (f_lo == 0.0 && f_hi == 0.0) {
            // Only rounding mass is left.
            return mode;
        }
    }
}

/// Multinomial counts over the convention's support via conditional binomials.
///
/// Under [`Normalization::OffDiagonal`] the diagonal receives nothing.
pub fn sample_multinomial_with(probs: &ProbTable, n: u64, rng: &mut impl RngCore) -> Result<CountTable> {
    if n == 0 {
        return Err(AsymmError::Domain {
            what: "sample size must be positive",
            value: 0.0,
        });
    }
    let dim = probs.dim();
    let support: Vec<usize> = match probs.convention() {
        Normalization::OffDiagonal => off_diagonal(dim).map(|(i, j)| i * dim + j).collect(),
        Normalization::Full => (0..dim * dim).collect(),
    };
    let cells = probs.probs();
    let mut counts = vec![0u64; dim * dim];
    let mut remaining_n = n;
    let mut remaining_mass: f64 = support.iter().map(|&k| cells[k]).sum();
    let last = support.iter().rposition(|&k| cells[k] > 0.0);
    for (pos, &k) in support.iter().enumerate() {
        if remaining_n == 0 {
            break;
        }
        let p = cells[k];
        if p <= 0.0 {
            continue;
        }
        let draw = if Some(pos) == last {
            remaining_n
        } else {
            binomial(remaining_n, (p / remaining_mass).min(1.0), rng)
        };
        counts[k] = draw;
        remaining_n -= draw;
        remaining_mass -= p;
    }
    CountTable::from_flat(dim, counts)
}

/// Multinomial sample of size `n` using stream 0 of `seed`.
pub fn sample_multinomial(probs: &ProbTable, n: u64, seed: u64) -> Result<CountTable> {
    sample_multinomial_with(probs, n, &mut replicate_rng(seed, 0))
}

/// Conditional-symmetry model `p_ij = Δ ψ_ij (i < j)`, `p_ij = ψ_ij (i > j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsSpec {
    delta: f64,
    dim: usize,
    psi: Vec<f64>,
}

impl CsSpec {
    /// `psi` is a symmetric row-major `dim x dim` base; its diagonal is ignored.
    pub fn new(delta: f64, dim: usize, psi: Vec<f64>) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(AsymmError::Domain {
                what: "odds delta must be finite and nonnegative",
                value: delta,
            });
        }
        if dim < 2 {
            return Err(AsymmError::TooSmall(dim));
        }
        if psi.len() != dim * dim {
            return Err(AsymmError::InvalidProbabilities(format!(
                "psi needs {} entries, got {}",
                dim * dim,
                psi.len()
            )));
        }
        for (i, j) in off_diagonal(dim) {
            let (a, b) = (psi[i * dim + j], psi[j * dim + i]);
            if !(a >= 0.0 && a.is_finite()) {
                return Err(AsymmError::InvalidProbabilities(format!(
                    "psi ({}, {}) = {a}",
                    i + 1,
                    j + 1
                )));
            }
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(AsymmError::InvalidProbabilities(format!(
                    "psi is not symmetric at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
        if off_diagonal(dim).all(|(i, j)| psi[i * dim + j] == 0.0) {
            return Err(AsymmError::InvalidProbabilities("psi is zero off the diagonal".into()));
        }
        Ok(CsSpec { delta, dim, psi })
    }

    /// Constant off-diagonal base.
    pub fn uniform(delta: f64, dim: usize) -> Result<Self> {
        Self::new(delta, dim, vec![1.0; dim * dim])
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(delta, self.dim, self.psi.clone())
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Off-diagonal-normalized table of a CS model; the diagonal carries no mass.
pub fn cs_table(spec: &CsSpec) -> Result<ProbTable> {
    let dim = spec.dim;
    let mut cells = vec![0.0; dim * dim];
    for (i, j) in off_diagonal(dim) {
        let psi = spec.psi[i * dim + j];
        cells[i * dim + j] = if i < j { spec.delta * psi } else { psi };
    }
    ProbTable::from_unnormalized(dim, &cells, Normalization::OffDiagonal)
}

/// One row of a Δ sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    /// Larger conditional probability of each pair, `max(1, Δ)/(1 + Δ)`.
    pub pc: f64,
    pub sqrt_pc: f64,
    pub phi: f64,
    /// `(λ, Φ^(λ))` in the order requested.
    pub power: Vec<(f64, f64)>,
}

pub fn sweep_cs(grid: &[f64], lambdas: &[f64], base: &CsSpec) -> Result<Vec<SweepRow>> {
    grid.iter()
        .map(|&delta| {
            let table = cs_table(&base.with_delta(delta)?)?;
            let phi = phi(&table, &WeightScheme::Uniform, ZeroPairPolicy::Error)?.value;
            let power = lambdas
                .iter()
                .map(|&lambda| Ok((lambda, phi_power(&table, lambda)?.value)))
                .collect::<Result<Vec<_>>>()?;
            let pc = delta.max(1.0) / (1.0 + delta);
            Ok(SweepRow {
                delta,
                pc,
                sqrt_pc: pc.sqrt(),
                phi,
                power,
            })
        })
        .collect()
}

fn run_parallel<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(t) if t > 0 => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(job),
            Err(_) => job(),
        },
        _ => job(),
    }
}

/// Outcome of repeated sampling from a CS model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageResult {
    pub truth: f64,
    pub reps: u64,
    pub covered: u64,
    /// Replicates whose interval could not be formed.
    pub not_available: u64,
    /// `covered / (reps − not_available)`; `None` if no interval was formed.
    pub coverage: Option<f64>,
    pub mean_ci_width: Option<f64>,
    /// Mean of `Φ̂` over replicates where it could be computed.
    pub mean_estimate: Option<f64>,
    pub generator: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageConfig {
    pub n: u64,
    pub reps: u64,
    pub alpha: f64,
    pub scheme: WeightScheme,
    pub seed: u64,
    /// Worker count; results do not depend on it.
    pub threads: Option<usize>,
}

/// Per-replicate outcome: estimate and interval (if available).
pub type ReplicateOutcome = (f64, Option<(f64, f64)>);

/// Draws `reps` tables of size `n` from `cs_table(spec)` and records how often
/// the delta-method interval covers the closed-form `Φ(Δ)`.
pub fn coverage_experiment(spec: &CsSpec, config: &CoverageConfig) -> Result<CoverageResult> {
    let outcomes = coverage_replicates(spec, config)?;
    let truth = phi_cs_closed(spec.delta())?;
    let mut covered = 0;
    let mut not_available = 0;
    let mut width = 0.0;
    let mut estimate_sum = 0.0;
    let mut estimated = 0u64;
    for (estimate, ci) in &outcomes {
        if estimate.is_finite() {
            estimate_sum += estimate;
            estimated += 1;
        }
        match ci {
            Some((lo, hi)) => {
                if *lo <= truth && truth <= *hi {
                    covered += 1;
                }
                width += hi - lo;
            }
            None => not_available += 1,
        }
    }
    let formed = config.reps - not_available;
    Ok(CoverageResult {
        truth,
        reps: config.reps,
        covered,
        not_available,
        coverage: (formed > 0).then(|| covered as f64 / formed as f64),
        mean_ci_width: (formed > 0).then(|| width / formed as f64),
        mean_estimate: (estimated > 0).then(|| estimate_sum / estimated as f64),
        generator: GENERATOR,
    })
}

/// The individual replicate outcomes behind [`coverage_experiment`], in
/// replicate order.
pub fn coverage_replicates(spec: &CsSpec, config: &CoverageConfig) -> Result<Vec<ReplicateOutcome>> {
    if config.reps < 100 {
        return Err(AsymmError::Domain {
            what: "coverage needs at least 100 replicates",
            value: config.reps as f64,
        });
    }
    let probs = cs_table(spec)?;
    let options = EstimateOptions::default();
    let outcomes = run_parallel(config.threads, || {
        (0..config.reps)
            .into_par_iter()
            .map(|r| {
                let mut rng = replicate_rng(config.seed, r);
                let table = sample_multinomial_with(&probs, config.n, &mut rng)?;
                match phi_interval(&table, &config.scheme, config.alpha, options) {
                    Ok(report) => Ok((report.estimate, report.ci)),
                    Err(AsymmError::ZeroPair { .. }) => Ok((f64::NAN, None)),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(outcomes)
}

/// Nonparametric bootstrap of `Φ̂` by multinomial resampling of the table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub weight: WeightKind,
    pub reps: u64,
    /// Replicates where `Φ̂` could not be computed (empty pair under the
    /// error policy).
    pub failed: u64,
    pub se: f64,
    pub mean: f64,
}

pub fn bootstrap_se(
    table: &CountTable,
    scheme: &WeightScheme,
    reps: u64,
    seed: u64,
    options: EstimateOptions,
    threads: Option<usize>,
) -> Result<BootstrapResult> {
    if reps < 2 {
        return Err(AsymmError::Domain {
            what: "bootstrap needs at least 2 replicates",
            value: reps as f64,
        });
    }
    let probs = crate::table::to_probabilities(table, options.convention)?;
    let n = match options.convention {
        Normalization::OffDiagonal => table.off_diagonal_total(),
        Normalization::Full => table.total(),
    };
    let draws = run_parallel(threads, || {
        (0..reps)
            .into_par_iter()
            .map(|r| {
                let mut rng = replicate_rng(seed, r);
                let sample = match sample_multinomial_with(&probs, n, &mut rng) {
                    Ok(s) => s,
                    Err(AsymmError::NoOffDiagonalMass) => return Ok(None),
                    Err(e) => return Err(e),
                };
                let p = crate::table::to_probabilities(&sample, options.convention)?;
                match phi(&p, scheme, options.zero_pairs) {
                    Ok(v) => Ok(Some(v.value)),
                    Err(AsymmError::ZeroPair { .. }) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let values: Vec<f64> = draws.iter().flatten().copied().collect();
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    Ok(BootstrapResult {
        weight: scheme.kind(),
        reps,
        failed: reps - values.len() as u64,
        se: var.sqrt(),
        mean,
    })
}
