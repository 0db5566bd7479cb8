//! Square contingency tables: parsing, validation and normalization.
//!
//! A [`CountTable`] holds raw frequencies `n_ij`. [`to_probabilities`] turns it
//! into a [`ProbTable`] under one of two conventions: dividing by the
//! off-diagonal total (the default, since diagonal cells carry no information
//! about asymmetry) or by the grand total.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{AsymmError, Result};

/// Largest count representable without loss in an `f64` carrier.
pub const MAX_COUNT: u64 = (1 << 53) - 1;

const SUM_TOLERANCE: f64 = 1e-12;

/// How cell probabilities are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `p_ij = n_ij / n` with `n` the sum of off-diagonal counts.
    #[default]
    OffDiagonal,
    /// `p_ij = n_ij / n` with `n` the grand total.
    Full,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::OffDiagonal => "offdiag",
            Normalization::Full => "full",
        }
    }
}

/// Validated `R x R` table of nonnegative counts, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    dim: usize,
    counts: Vec<u64>,
}

impl CountTable {
    /// Builds a table from rows, checking squareness, the count cap and that
    /// some off-diagonal cell is positive.
    pub fn new(rows: Vec<Vec<u64>>) -> Result<Self> {
        let dim = rows.len();
        if dim < 2 {
            return Err(AsymmError::TooSmall(dim));
        }
        let mut counts = Vec::with_capacity(dim * dim);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(AsymmError::NonSquare {
                    line: r + 1,
                    expected: dim,
                    found: row.len(),
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if v > MAX_COUNT {
                    return Err(AsymmError::CountTooLarge { row: r + 1, col: c + 1 });
                }
            }
            counts.extend(row);
        }
        Self::from_flat(dim, counts)
    }

    /// Builds a table from a row-major buffer of length `dim * dim`.
    pub fn from_flat(dim: usize, counts: Vec<u64>) -> Result<Self> {
        if dim < 2 {
            return Err(AsymmError::TooSmall(dim));
        }
        if counts.len() != dim * dim {
            return Err(AsymmError::NonSquare {
                line: counts.len() / dim.max(1) + 1,
                expected: dim,
                found: counts.len() % dim,
            });
        }
        if let Some(k) = counts.iter().position(|&v| v > MAX_COUNT) {
            return Err(AsymmError::CountTooLarge {
                row: k / dim + 1,
                col: k % dim + 1,
            });
        }
        let table = CountTable { dim, counts };
        if table.off_diagonal_total() == 0 {
            return Err(AsymmError::NoOffDiagonalMass);
        }
        Ok(table)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.dim + j]
    }

    /// Row-major view of the counts.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.dim).map(<[u64]>::to_vec).collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn off_diagonal_total(&self) -> u64 {
        self.total() - (0..self.dim).map(|i| self.get(i, i)).sum::<u64>()
    }

    /// Serializes back to the CSV input format (no comments, LF endings).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.counts.chunks(self.dim) {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Parses the CSV table format: `R` lines of `R` comma-separated integers.
///
/// Blank lines and lines starting with `#` are ignored. Fields may carry
/// surrounding whitespace and lines may end in CRLF.
pub fn parse_table(text: &str) -> Result<CountTable> {
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut line_numbers = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let r = rows.len() + 1;
        let row = line
            .split(',')
            .enumerate()
            .map(|(c, field)| {
                let field = field.trim();
                if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(AsymmError::InvalidCount {
                        row: r,
                        col: c + 1,
                        field: field.to_string(),
                    });
                }
                match field.parse::<u64>() {
                    Ok(v) if v <= MAX_COUNT => Ok(v),
                    _ => Err(AsymmError::CountTooLarge { row: r, col: c + 1 }),
                }
            })
            .collect::<Result<Vec<u64>>>()?;
        rows.push(row);
        line_numbers.push(lineno + 1);
    }
    let dim = rows.len();
    if dim < 2 {
        // A single row that is itself non-square is the more useful report.
        if let Some(row) = rows.first() {
            if row.len() != dim {
                return Err(AsymmError::NonSquare {
                    line: line_numbers[0],
                    expected: dim,
                    found: row.len(),
                });
            }
        }
        return Err(AsymmError::TooSmall(dim));
    }
    for (row, &line) in rows.iter().zip(&line_numbers) {
        if row.len() != dim {
            return Err(AsymmError::NonSquare {
                line,
                expected: dim,
                found: row.len(),
            });
        }
    }
    CountTable::new(rows)
}

/// `R x R` cell probabilities together with the normalization they obey.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable {
    dim: usize,
    probs: Vec<f64>,
    convention: Normalization,
}

impl ProbTable {
    /// Wraps an already normalized row-major grid, checking the invariants of
    /// `convention`.
    pub fn new(dim: usize, probs: Vec<f64>, convention: Normalization) -> Result<Self> {
        if dim < 2 {
            return Err(AsymmError::TooSmall(dim));
        }
        if probs.len() != dim * dim {
            return Err(AsymmError::InvalidProbabilities(format!(
                "expected {} cells, got {}",
                dim * dim,
                probs.len()
            )));
        }
        if let Some(k) = probs.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return Err(AsymmError::InvalidProbabilities(format!(
                "cell ({}, {}) = {} is not a nonnegative finite number",
                k / dim + 1,
                k % dim + 1,
                probs[k]
            )));
        }
        let table = ProbTable { dim, probs, convention };
        let sum = match convention {
            Normalization::OffDiagonal => table.off_diagonal_mass(),
            Normalization::Full => table.probs.iter().sum(),
        };
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(AsymmError::InvalidProbabilities(format!(
                "{} normalizer sums to {sum}",
                convention.as_str()
            )));
        }
        Ok(table)
    }

    /// Normalizes an arbitrary nonnegative row-major grid under `convention`.
    pub fn from_unnormalized(dim: usize, weights: &[f64], convention: Normalization) -> Result<Self> {
        if dim < 2 {
            return Err(AsymmError::TooSmall(dim));
        }
        if weights.len() != dim * dim {
            return Err(AsymmError::InvalidProbabilities(format!(
                "expected {} cells, got {}",
                dim * dim,
                weights.len()
            )));
        }
        let norm: f64 = match convention {
            Normalization::OffDiagonal => off_diagonal(dim).map(|(i, j)| weights[i * dim + j]).sum(),
            Normalization::Full => weights.iter().sum(),
        };
        if !(norm > 0.0) {
            return Err(AsymmError::ZeroNormalizer);
        }
        let probs = weights.iter().map(|w| w / norm).collect();
        ProbTable::new(dim, probs, convention)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.dim + j]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn convention(&self) -> Normalization {
        self.convention
    }

    /// `Σ_{i≠j} p_ij`; equals 1 under [`Normalization::OffDiagonal`].
    pub fn off_diagonal_mass(&self) -> f64 {
        off_diagonal(self.dim).map(|(i, j)| self.get(i, j)).sum()
    }
}

/// Iterates over all ordered off-diagonal index pairs `(i, j)`, `i ≠ j`.
pub fn off_diagonal(dim: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..dim).flat_map(move |i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
}

/// Iterates over unordered pairs `(i, j)` with `i < j`.
pub fn upper_pairs(dim: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..dim).flat_map(move |i| (i + 1..dim).map(move |j| (i, j)))
}

/// Plug-in probabilities `n_ij / n` under the chosen normalizer.
pub fn to_probabilities(table: &CountTable, convention: Normalization) -> Result<ProbTable> {
    let n = match convention {
        Normalization::OffDiagonal => table.off_diagonal_total(),
        Normalization::Full => table.total(),
    };
    if n == 0 {
        return Err(AsymmError::ZeroNormalizer);
    }
    let n = n as f64;
    let probs: Vec<f64> = table.counts.iter().map(|&c| c as f64 / n).collect();
    // Re-validate; exact integer sums keep rounding far below the tolerance.
    ProbTable::new(table.dim, probs, convention)
}

/// Conditional direction probabilities of one cell pair:
/// `(p_ij, p_ji) / (p_ij + p_ji)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairPoint {
    pub forward: f64,
    pub backward: f64,
}

impl PairPoint {
    /// The point representing a perfectly symmetric pair.
    pub const SYMMETRIC: PairPoint = PairPoint {
        forward: 0.5,
        backward: 0.5,
    };

    /// Point `(p, 1 - p)` on the simplex segment.
    pub fn on_segment(forward: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&forward) {
            return Err(AsymmError::Domain {
                what: "conditional probability must lie in [0, 1]",
                value: forward,
            });
        }
        Ok(PairPoint {
            forward,
            backward: 1.0 - forward,
        })
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.forward, self.backward]
    }

    /// Image on the unit circle under the square-root map.
    pub fn sqrt_embedding(&self) -> [f64; 2] {
        [self.forward.sqrt(), self.backward.sqrt()]
    }
}

pub fn conditional_pair(probs: &ProbTable, i: usize, j: usize) -> Result<PairPoint> {
    let dim = probs.dim();
    if i >= dim || j >= dim || i == j {
        return Err(AsymmError::BadIndex { i, j, dim });
    }
    let (a, b) = (probs.get(i, j), probs.get(j, i));
    let s = a + b;
    if s == 0.0 {
        return Err(AsymmError::ZeroPair { i, j });
    }
    Ok(PairPoint {
        forward: a / s,
        backward: b / s,
    })
}
