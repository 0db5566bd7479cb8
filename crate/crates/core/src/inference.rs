//! Delta-method standard errors for `Φ̂` and Bowker's symmetry test.
//!
//! Under multinomial sampling, `√n(Φ̂ − Φ)` is asymptotically normal with
//! variance `Σ g_st² p_st − (Σ g_st p_st)²`, where `g = ∂Φ/∂p` over the
//! off-diagonal cells. The gradient is obtained by differentiating `Φ`
//! directly; at tied pairs (`p_st = p_ts`) the sign of `√p_st − √p_ts` is
//! taken as 0, which keeps the interval computable for symmetric pairs.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::Serialize;

use crate::error::{AsymmError, Result};
use crate::measures::{
    pair_arc, phi_with_weights, realize_weights, WeightKind, WeightMap, WeightScheme, ZeroPairPolicy,
};
use crate::special::{chi_square_sf, inverse_normal_cdf};
use crate::table::{off_diagonal, to_probabilities, upper_pairs, CountTable, Normalization, ProbTable};

/// Settings shared by every estimate derived from a count table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct EstimateOptions {
    pub convention: Normalization,
    pub zero_pairs: ZeroPairPolicy,
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `∂θ/∂a` for the pair arc `θ(a, b)`, finite for `a > 0`.
///
/// `θ = arccos(g)` with `g = (√a + √b)/√(2(a + b))`, and
/// `√(1 − g²) = |√a − √b| / √(2(a + b))`, giving
/// `√b · sign(√a − √b) / (2√a (a + b))`.
pub fn pair_arc_derivative(a: f64, b: f64) -> f64 {
    let (ra, rb) = (a.sqrt(), b.sqrt());
    rb * sign(ra - rb) / (2.0 * ra * (a + b))
}

/// Gradient `∂Φ/∂p_st` over a row-major grid; diagonal entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiGradient {
    pub dim: usize,
    pub values: Vec<f64>,
}

impl PhiGradient {
    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.values[s * self.dim + t]
    }
}

pub fn phi_gradient(probs: &ProbTable, scheme: &WeightScheme, policy: ZeroPairPolicy) -> Result<PhiGradient> {
    let weights = realize_weights(scheme, probs, policy)?;
    gradient_with_weights(probs, scheme, &weights)
}

fn gradient_with_weights(probs: &ProbTable, scheme: &WeightScheme, weights: &WeightMap) -> Result<PhiGradient> {
    let dim = probs.dim();
    let included = |s: usize, t: usize| weights.get(s, t) + weights.get(t, s) > 0.0;
    for (s, t) in off_diagonal(dim) {
        if included(s, t) && probs.get(s, t) == 0.0 {
            return Err(AsymmError::BoundaryGradient { s, t });
        }
    }
    let proportional = matches!(scheme, WeightScheme::PairProportional);
    let (mass, phi_arc) = if proportional {
        // Σ w_ij θ_ij, i.e. (π/4)Φ.
        (probs.off_diagonal_mass(), FRAC_PI_4 * phi_with_weights(probs, weights))
    } else {
        (1.0, 0.0)
    };

    let mut values = vec![0.0; dim * dim];
    for (s, t) in off_diagonal(dim) {
        if !included(s, t) {
            continue;
        }
        let (a, b) = (probs.get(s, t), probs.get(t, s));
        let pair_weight = weights.get(s, t) + weights.get(t, s);
        let mut g = pair_weight * pair_arc_derivative(a, b);
        if proportional {
            // Pair-proportional weights: Σ ∂w_ij/∂p_st θ_ij = (θ_st − Σ w θ) / S.
            g += (pair_arc(a, b) - phi_arc) / mass;
        }
        values[s * dim + t] = 4.0 / PI * g;
    }
    Ok(PhiGradient { dim, values })
}

/// Asymptotic variance `σ²[Φ̂]` of `√n Φ̂`.
pub fn phi_variance(probs: &ProbTable, scheme: &WeightScheme, policy: ZeroPairPolicy) -> Result<f64> {
    let gradient = phi_gradient(probs, scheme, policy)?;
    Ok(variance_from_gradient(probs, &gradient))
}

fn variance_from_gradient(probs: &ProbTable, gradient: &PhiGradient) -> f64 {
    let (mut second, mut first) = (0.0, 0.0);
    for (s, t) in off_diagonal(probs.dim()) {
        let (g, p) = (gradient.get(s, t), probs.get(s, t));
        second += g * g * p;
        first += g * p;
    }
    let v = second - first * first;
    debug_assert!(v >= -1e-12, "negative variance {v}");
    v.max(0.0)
}

/// Point estimate, delta-method standard error and Wald interval for `Φ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub weight: WeightKind,
    pub estimate: f64,
    /// `σ̂/√n`; `None` when the gradient is undefined at the estimate.
    pub se: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub alpha: f64,
    /// Sample size used for the standard error.
    pub n: u64,
    pub convention: Normalization,
    pub skipped_pairs: usize,
    /// Some endpoint of the unclipped interval fell outside `[0, 1]`.
    pub ci_clipped: bool,
    /// A cell of an included pair is zero, so the standard error is unavailable.
    pub boundary: bool,
    /// The estimated standard error is exactly zero.
    pub zero_se: bool,
}

pub fn phi_interval(
    table: &CountTable,
    scheme: &WeightScheme,
    alpha: f64,
    options: EstimateOptions,
) -> Result<MeasureReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(AsymmError::Domain {
            what: "alpha must lie in (0, 1)",
            value: alpha,
        });
    }
    let probs = to_probabilities(table, options.convention)?;
    let weights = realize_weights(scheme, &probs, options.zero_pairs)?;
    let estimate = phi_with_weights(&probs, &weights);
    let n = match options.convention {
        Normalization::OffDiagonal => table.off_diagonal_total(),
        Normalization::Full => table.total(),
    };
    let mut report = MeasureReport {
        weight: scheme.kind(),
        estimate,
        se: None,
        ci: None,
        alpha,
        n,
        convention: options.convention,
        skipped_pairs: weights.skipped().len(),
        ci_clipped: false,
        boundary: false,
        zero_se: false,
    };
    match gradient_with_weights(&probs, scheme, &weights) {
        Ok(gradient) => {
            let se = (variance_from_gradient(&probs, &gradient) / n as f64).sqrt();
            let z = inverse_normal_cdf(1.0 - alpha / 2.0)?;
            let (lo, hi) = (estimate - z * se, estimate + z * se);
            report.ci_clipped = lo < 0.0 || hi > 1.0;
            report.ci = Some((lo.max(0.0), hi.min(1.0)));
            report.zero_se = se == 0.0;
            report.se = Some(se);
        }
        Err(AsymmError::BoundaryGradient { .. }) => report.boundary = true,
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// Bowker's chi-square test of `p_ij = p_ji`; McNemar's test when `R = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryTestResult {
    pub statistic: f64,
    /// `R(R−1)/2` minus the number of empty pairs.
    pub df: u32,
    pub p_value: Option<f64>,
}

pub fn bowker(table: &CountTable) -> Result<SymmetryTestResult> {
    let mut statistic = 0.0;
    let mut df = 0u32;
    for (i, j) in upper_pairs(table.dim()) {
        let (a, b) = (table.get(i, j), table.get(j, i));
        if a + b == 0 {
            continue;
        }
        df += 1;
        let d = a.abs_diff(b) as f64;
        statistic += d * d / (a + b) as f64;
    }
    let p_value = if df == 0 {
        None
    } else {
        Some(chi_square_sf(statistic, df)?)
    };
    Ok(SymmetryTestResult { statistic, df, p_value })
}
