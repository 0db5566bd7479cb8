//! Distances and divergences between discrete distributions.
//!
//! All functions take plain slices. The Fisher-Rao distance here is the arc
//! `arccos(Σ √(p_i q_i))` between square-root embeddings on the unit sphere,
//! without the factor 2 some authors use; this keeps the maximum distance
//! between a binary distribution and `(1/2, 1/2)` at `π/4`.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::error::{AsymmError, Result};
use crate::table::PairPoint;

/// Excess beyond `[-1, 1]` that [`cosine_similarity`] absorbs as rounding.
pub const COSINE_CLAMP_TOLERANCE: f64 = 1e-9;

fn check_len(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(AsymmError::LengthMismatch(p.len(), q.len()));
    }
    Ok(())
}

pub fn euclidean(p: &[f64], q: &[f64]) -> Result<f64> {
    check_len(p, q)?;
    Ok(p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

/// Cosine of the angle between `u` and `v`, clamped to `[-1, 1]`.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    check_len(u, v)?;
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(AsymmError::ZeroVector);
    }
    clamp_cosine(dot / (nu * nv))
}

pub(crate) fn clamp_cosine(c: f64) -> Result<f64> {
    if c.is_nan() || c.abs() > 1.0 + COSINE_CLAMP_TOLERANCE {
        return Err(AsymmError::CosineOutOfRange(c));
    }
    Ok(c.clamp(-1.0, 1.0))
}

fn sqrt_all(p: &[f64]) -> Vec<f64> {
    p.iter().map(|x| x.sqrt()).collect()
}

/// Fisher-Rao arc length (radians) between two distributions.
pub fn fisher_rao_arc(p: &[f64], q: &[f64]) -> Result<f64> {
    check_len(p, q)?;
    Ok(cosine_similarity(&sqrt_all(p), &sqrt_all(q))?.acos())
}

/// Hellinger distance `‖√p − √q‖ / √2`, in `[0, 1]` for distributions.
pub fn hellinger_vec(p: &[f64], q: &[f64]) -> Result<f64> {
    check_len(p, q)?;
    let s: f64 = p
        .iter()
        .zip(q)
        .map(|(a, b)| {
            let d = a.sqrt() - b.sqrt();
            d * d
        })
        .sum();
    Ok(FRAC_1_SQRT_2 * s.sqrt())
}

/// Cressie-Read power divergence `Σ p_i[(p_i/q_i)^λ − 1] / (λ(λ+1))`.
///
/// `λ = 0` is the Kullback-Leibler limit and `λ = −1` the reverse KL limit.
/// Terms with `p_i = 0` contribute their `λ`-limit (zero for `λ > −1`).
pub fn power_divergence(p: &[f64], q: &[f64], lambda: f64) -> Result<f64> {
    check_len(p, q)?;
    if !lambda.is_finite() {
        return Err(AsymmError::Domain {
            what: "lambda must be finite",
            value: lambda,
        });
    }
    for (k, (&a, &b)) in p.iter().zip(q).enumerate() {
        if a > 0.0 && b == 0.0 {
            return Err(AsymmError::SupportViolation(k));
        }
    }
    let pairs = p.iter().zip(q).filter(|(_, &b)| b > 0.0);
    let value = if lambda == 0.0 {
        pairs.filter(|(&a, _)| a > 0.0).map(|(&a, &b)| a * (a / b).ln()).sum()
    } else if lambda == -1.0 {
        let mut s = 0.0;
        for (k, (&a, &b)) in p.iter().zip(q).enumerate() {
            if b > 0.0 {
                if a == 0.0 {
                    return Err(AsymmError::SupportViolation(k));
                }
                s += b * (b / a).ln();
            }
        }
        s
    } else {
        // Written as q·[(p/q)^(λ+1) − p/q] so that zero-p cells take their limit.
        let s: f64 = pairs
            .map(|(&a, &b)| {
                let r = a / b;
                if a == 0.0 {
                    if lambda < -1.0 {
                        f64::INFINITY
                    } else {
                        0.0
                    }
                } else {
                    b * (r.powf(lambda + 1.0) - r)
                }
            })
            .sum();
        s / (lambda * (lambda + 1.0))
    };
    Ok(value)
}

/// Distances from a pair point `(p, 1 − p)` to the symmetric point `(1/2, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub pc: f64,
    pub ed: f64,
    pub frd: f64,
    pub hd: f64,
}

/// Samples the three distances along the constraint segment `p + q = 1`.
pub fn constraint_curve(grid: &[f64]) -> Result<Vec<CurveSample>> {
    let s = PairPoint::SYMMETRIC.as_array();
    grid.iter()
        .map(|&pc| {
            let point = PairPoint::on_segment(pc)?.as_array();
            Ok(CurveSample {
                pc,
                ed: euclidean(&point, &s)?,
                frd: fisher_rao_arc(&point, &s)?,
                hd: hellinger_vec(&point, &s)?,
            })
        })
        .collect()
}
