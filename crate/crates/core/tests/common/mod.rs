//! Test-only oracles and generators shared by the integration suites.
#![allow(dead_code)]

use asymm_core::inference::PhiGradient;
use asymm_core::measures::pair_arc;
use asymm_core::table::off_diagonal;
use asymm_core::{phi, CountTable, Normalization, ProbTable, WeightScheme, ZeroPairPolicy};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const SHRINKAGE_2YR: &str = "288,147,27\n90,95,33\n13,17,14";
pub const SHRINKAGE_5YR: &str = "181,92,32\n79,76,24\n13,24,13";
pub const INDURATION_2YR: &str = "85,53,13\n187,128,33\n128,108,43";
pub const INDURATION_5YR: &str = "121,37,70\n157,81,52\n70,14,19";

pub struct Gen(ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn dim(&mut self) -> usize {
        2 + self.below(5) as usize
    }

    /// Counts in `0..=max` with at least one positive off-diagonal cell.
    pub fn count_table(&mut self, dim: usize, max: u64) -> CountTable {
        loop {
            let counts: Vec<u64> = (0..dim * dim).map(|_| self.below(max + 1)).collect();
            if let Ok(t) = CountTable::from_flat(dim, counts) {
                return t;
            }
        }
    }

    /// Interior probability table with every pair well away from a tie.
    pub fn interior_table(&mut self, dim: usize) -> ProbTable {
        'outer: loop {
            let cells: Vec<f64> = (0..dim * dim).map(|_| 1.0 + 9.0 * self.unit()).collect();
            for (i, j) in off_diagonal(dim) {
                let (a, b) = (cells[i * dim + j], cells[j * dim + i]);
                if (a - b).abs() < 0.05 {
                    continue 'outer;
                }
            }
            return ProbTable::from_unnormalized(dim, &cells, Normalization::OffDiagonal).unwrap();
        }
    }
}

pub fn prob_from_cells(dim: usize, cells: &[f64]) -> ProbTable {
    ProbTable::from_unnormalized(dim, cells, Normalization::OffDiagonal).unwrap()
}

/// Central differences of `Φ` along the in-simplex directions
/// `e_k − 1/m`, compared with the same projection of `analytic`.
/// Returns `max |fd − an| / max |an|` over the off-diagonal cells.
pub fn projected_fd_error(probs: &ProbTable, scheme: &WeightScheme, analytic: &PhiGradient, h: f64) -> f64 {
    let dim = probs.dim();
    let cells: Vec<(usize, usize)> = off_diagonal(dim).collect();
    let m = cells.len() as f64;
    let f = |v: &[f64]| {
        let t = ProbTable::new(dim, v.to_vec(), Normalization::OffDiagonal).unwrap();
        phi(&t, scheme, ZeroPairPolicy::Error).unwrap().value
    };
    let mean_grad: f64 = cells.iter().map(|&(s, t)| analytic.get(s, t)).sum::<f64>() / m;
    let mut max_err: f64 = 0.0;
    let mut max_an: f64 = 0.0;
    for &(s, t) in &cells {
        let mut plus = probs.probs().to_vec();
        let mut minus = plus.clone();
        for &(i, j) in &cells {
            let d = if (i, j) == (s, t) { 1.0 - 1.0 / m } else { -1.0 / m };
            plus[i * dim + j] += h * d;
            minus[i * dim + j] -= h * d;
        }
        let fd = (f(&plus) - f(&minus)) / (2.0 * h);
        let an = analytic.get(s, t) - mean_grad;
        max_err = max_err.max((fd - an).abs());
        max_an = max_an.max(an.abs());
    }
    max_err / max_an
}

/// Gradient with the arc terms oriented the other way, carrying
/// `sign(√p_ts − √p_st)`.
pub fn flipped_sign_gradient(probs: &ProbTable, scheme: &WeightScheme) -> Vec<f64> {
    let dim = probs.dim();
    let mass = probs.off_diagonal_mass();
    let uniform = 1.0 / (dim * (dim - 1)) as f64;
    let w = |i: usize, j: usize| match scheme {
        WeightScheme::Uniform => uniform,
        _ => (probs.get(i, j) + probs.get(j, i)) / (2.0 * mass),
    };
    let mut out = vec![0.0; dim * dim];
    for (s, t) in off_diagonal(dim) {
        let (pst, pts) = (probs.get(s, t), probs.get(t, s));
        let mut weight_term = 0.0;
        if !matches!(scheme, WeightScheme::Uniform) {
            for (i, j) in off_diagonal(dim) {
                let hit = if (i, j) == (s, t) || (i, j) == (t, s) { 1.0 } else { 0.0 };
                let dw = hit / (2.0 * mass) - (probs.get(i, j) + probs.get(j, i)) / (2.0 * mass * mass);
                weight_term += dw * pair_arc(probs.get(i, j), probs.get(j, i));
            }
        }
        let d = pts.sqrt() - pst.sqrt();
        let sgn = if d > 0.0 {
            1.0
        } else if d < 0.0 {
            -1.0
        } else {
            0.0
        };
        let arc_term = pts.sqrt() / (2.0 * pst.sqrt() * (pst + pts)) * sgn;
        out[s * dim + t] = 4.0 / std::f64::consts::PI * (weight_term + w(s, t) * arc_term + w(t, s) * arc_term);
    }
    out
}

pub fn variance_of(probs: &ProbTable, grad: &[f64]) -> f64 {
    let dim = probs.dim();
    let (mut a, mut b) = (0.0, 0.0);
    for (s, t) in off_diagonal(dim) {
        let (g, p) = (grad[s * dim + t], probs.get(s, t));
        a += g * g * p;
        b += g * p;
    }
    a - b * b
}

/// `Γ(k/2)` from `Γ(1/2) = √π`, `Γ(1) = 1` and `Γ(x+1) = xΓ(x)`.
fn gamma_half(k: u32) -> f64 {
    let mut x = if k.is_multiple_of(2) { 1.0 } else { 0.5 };
    let mut g = if k.is_multiple_of(2) {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    while x < k as f64 / 2.0 - 1e-9 {
        g *= x;
        x += 1.0;
    }
    g
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, depth)
}

/// Chi-square upper tail by adaptive quadrature of the density after the
/// substitution `t = u²`, which removes the `df = 1` singularity.
pub fn chi_square_sf_quadrature(x: f64, df: u32) -> f64 {
    let k = df as f64;
    let c = 2.0 / (2f64.powf(k / 2.0) * gamma_half(df));
    let density = move |u: f64| c * u.powf(k - 1.0) * (-0.5 * u * u).exp();
    let start = x.sqrt();
    // Integrate in unit slabs until the tail is negligible.
    let mut total = 0.0;
    let mut a = start;
    loop {
        let b = a + 1.0;
        let piece = adaptive_simpson(&density, a, b, 1e-15, 40);
        total += piece;
        if b > 8.0 + (k - 1.0).max(0.0).sqrt() * 2.0 && piece < 1e-18 {
            break;
        }
        a = b;
    }
    total
}
