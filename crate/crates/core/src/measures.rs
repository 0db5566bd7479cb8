//! Measures of departure from symmetry.
//!
//! [`phi`] averages, over all off-diagonal cells, the Fisher-Rao arc between
//! the conditional pair `(p_ij, p_ji) / (p_ij + p_ji)` and `(1/2, 1/2)`,
//! rescaled by `4/π` so that complete one-sidedness scores 1:
//!
//! ```text
//! Φ = (4/π) ΣΣ_{i≠j} w_ij arccos((√p_ij + √p_ji) / √(2(p_ij + p_ji)))
//! ```
//!
//! [`phi_power`] is the divergence-type competitor: the power divergence
//! between the off-diagonal distribution and its symmetrization, divided by
//! its maximum.

use std::f64::consts::{FRAC_PI_4, LN_2};

use serde::{Deserialize, Serialize};

use crate::error::{AsymmError, Result};
use crate::geometry::{clamp_cosine, power_divergence};
use crate::table::{off_diagonal, upper_pairs, ProbTable};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// What to do with a cell pair whose two probabilities are both zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroPairPolicy {
    /// Refuse: the arc of an empty pair is undefined.
    #[default]
    Error,
    /// Drop the pair and renormalize the remaining weights.
    Skip,
}

/// How per-pair arcs are aggregated.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightScheme {
    /// `w_ij = 1 / (R(R−1))`.
    Uniform,
    /// `w_ij = (p_ij + p_ji) / (2 Σ_{s≠t} p_st)`.
    PairProportional,
    /// Row-major `R x R` weights, positive off the diagonal and summing to 1
    /// there. Diagonal entries are ignored.
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Uniform,
    Pair,
    Custom,
}

impl WeightScheme {
    pub fn kind(&self) -> WeightKind {
        match self {
            WeightScheme::Uniform => WeightKind::Uniform,
            WeightScheme::PairProportional => WeightKind::Pair,
            WeightScheme::Custom(_) => WeightKind::Custom,
        }
    }
}

/// Realized off-diagonal weights for one probability table.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap {
    dim: usize,
    weights: Vec<f64>,
    skipped: Vec<(usize, usize)>,
}

impl WeightMap {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.dim + j]
    }

    /// Row-major weights; zero on the diagonal and on skipped pairs.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Empty pairs `(i, j)`, `i < j`, excluded from the aggregate.
    pub fn skipped(&self) -> &[(usize, usize)] {
        &self.skipped
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn empty_pairs(probs: &ProbTable) -> Vec<(usize, usize)> {
    upper_pairs(probs.dim())
        .filter(|&(i, j)| probs.get(i, j) + probs.get(j, i) == 0.0)
        .collect()
}

/// Turns a scheme into concrete weights for `probs`.
///
/// Empty pairs are an error for uniform and custom weights under
/// [`ZeroPairPolicy::Error`]. Pair-proportional weights give them zero
/// weight under either policy, so they are always reported as skipped.
pub fn realize_weights(scheme: &WeightScheme, probs: &ProbTable, policy: ZeroPairPolicy) -> Result<WeightMap> {
    let dim = probs.dim();
    let skipped = empty_pairs(probs);
    let surviving = dim * (dim - 1) / 2 - skipped.len();
    if surviving == 0 {
        return Err(AsymmError::NoOffDiagonalMass);
    }
    let is_skipped = |i: usize, j: usize| skipped.contains(&(i.min(j), i.max(j)));
    if policy == ZeroPairPolicy::Error && !matches!(scheme, WeightScheme::PairProportional) {
        if let Some(&(i, j)) = skipped.first() {
            return Err(AsymmError::ZeroPair { i, j });
        }
    }

    let mut weights = vec![0.0; dim * dim];
    match scheme {
        WeightScheme::Uniform => {
            let w = 1.0 / (2 * surviving) as f64;
            for (i, j) in off_diagonal(dim).filter(|&(i, j)| !is_skipped(i, j)) {
                weights[i * dim + j] = w;
            }
        }
        WeightScheme::PairProportional => {
            let denom = 2.0 * probs.off_diagonal_mass();
            for (i, j) in off_diagonal(dim) {
                weights[i * dim + j] = (probs.get(i, j) + probs.get(j, i)) / denom;
            }
        }
        WeightScheme::Custom(custom) => {
            if custom.len() != dim * dim {
                return Err(AsymmError::InvalidWeights(format!(
                    "expected {} entries, got {}",
                    dim * dim,
                    custom.len()
                )));
            }
            let total: f64 = off_diagonal(dim).map(|(i, j)| custom[i * dim + j]).sum();
            for (i, j) in off_diagonal(dim) {
                let w = custom[i * dim + j];
                if !(w > 0.0 && w.is_finite()) {
                    return Err(AsymmError::InvalidWeights(format!(
                        "weight ({}, {}) = {w} is not positive",
                        i + 1,
                        j + 1
                    )));
                }
            }
            if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(AsymmError::InvalidWeights(format!(
                    "off-diagonal weights sum to {total}"
                )));
            }
            let kept: f64 = off_diagonal(dim)
                .filter(|&(i, j)| !is_skipped(i, j))
                .map(|(i, j)| custom[i * dim + j])
                .sum();
            for (i, j) in off_diagonal(dim).filter(|&(i, j)| !is_skipped(i, j)) {
                weights[i * dim + j] = custom[i * dim + j] / kept;
            }
        }
    }
    Ok(WeightMap { dim, weights, skipped })
}

/// Fisher-Rao arc between the conditional pair of `(a, b)` and `(1/2, 1/2)`.
///
/// Evaluated as `atan(|√a − √b| / (√a + √b))`, which equals the arccos form
/// but stays exact at both ends: 0 when `a = b`, `π/4` when one side is empty.
pub fn pair_arc(a: f64, b: f64) -> f64 {
    let (ra, rb) = (a.sqrt(), b.sqrt());
    ((ra - rb).abs() / (ra + rb)).atan()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "measure", rename_all = "snake_case")]
pub enum MeasureKind {
    Phi { weight: WeightKind },
    PhiPower { lambda: f64 },
}

/// A measure value in `[0, 1]` with the settings that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymmetryValue {
    pub value: f64,
    pub kind: MeasureKind,
    pub skipped_pairs: usize,
}

/// The Fisher-Rao asymmetry measure `Φ`.
pub fn phi(probs: &ProbTable, scheme: &WeightScheme, policy: ZeroPairPolicy) -> Result<AsymmetryValue> {
    let weights = realize_weights(scheme, probs, policy)?;
    let value = phi_with_weights(probs, &weights);
    Ok(AsymmetryValue {
        value,
        kind: MeasureKind::Phi { weight: scheme.kind() },
        skipped_pairs: weights.skipped.len(),
    })
}

/// `Φ` for already realized weights.
///
/// The weighted sum of arc ratios is divided by the total weight, which is 1
/// up to rounding, so that all-symmetric and all-one-sided tables land on
/// exactly 0 and 1.
pub(crate) fn phi_with_weights(probs: &ProbTable, weights: &WeightMap) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, j) in upper_pairs(probs.dim()) {
        let w = weights.get(i, j) + weights.get(j, i);
        if w == 0.0 {
            continue;
        }
        num += w * (pair_arc(probs.get(i, j), probs.get(j, i)) / FRAC_PI_4);
        den += w;
    }
    (num / den).clamp(0.0, 1.0)
}

/// The power-divergence measure `Φ^(λ)`, defined for `λ > −1`.
///
/// With `p*` the off-diagonal distribution and `q*_ij = (p*_ij + p*_ji)/2`,
/// `Φ^(λ) = λ(λ+1)/(2^λ − 1) · Pd^(λ)(p*; q*)`, and `Pd^(0)/ln 2` at `λ = 0`.
pub fn phi_power(probs: &ProbTable, lambda: f64) -> Result<AsymmetryValue> {
    if !(lambda.is_finite() && lambda > -1.0) {
        return Err(AsymmError::Domain {
            what: "power-divergence measure needs a finite lambda > -1",
            value: lambda,
        });
    }
    let dim = probs.dim();
    let mass = probs.off_diagonal_mass();
    if !(mass > 0.0) {
        return Err(AsymmError::NoOffDiagonalMass);
    }
    let (p, q): (Vec<f64>, Vec<f64>) = off_diagonal(dim)
        .map(|(i, j)| {
            let a = probs.get(i, j) / mass;
            let b = probs.get(j, i) / mass;
            (a, 0.5 * (a + b))
        })
        .unzip();
    let divergence = power_divergence(&p, &q, lambda)?;
    let value = if lambda == 0.0 {
        divergence / LN_2
    } else {
        divergence * lambda * (lambda + 1.0) / (2f64.powf(lambda) - 1.0)
    };
    Ok(AsymmetryValue {
        value: value.max(0.0),
        kind: MeasureKind::PhiPower { lambda },
        skipped_pairs: 0,
    })
}

/// `Φ` of any exact conditional-symmetry table with upper/lower odds `Δ`:
/// `(4/π) arccos((1 + √Δ) / √(2(1 + Δ)))`. Independent of weights.
pub fn phi_cs_closed(delta: f64) -> Result<f64> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(AsymmError::Domain {
            what: "odds delta must be finite and nonnegative",
            value: delta,
        });
    }
    let c = clamp_cosine((1.0 + delta.sqrt()) / (2.0 * (1.0 + delta)).sqrt())?;
    Ok((c.acos() / FRAC_PI_4).clamp(0.0, 1.0))
}
