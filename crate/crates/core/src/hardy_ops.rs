//! Finite sections of operators on H^2 in the monomial basis, and the
//! Toeplitz-structure tests that act on them.
//!
//! Entry `(m, n)` of a [`TruncatedOperator`] is `<T z^n, z^m>`. A symbol-built
//! operator remembers the diagonal band of its symbol so later consumers can
//! tell which of their outputs are complete.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::circle_fourier::{
    coeffs_from_grid, evaluate_hardy_on_grid, CircleGrid, HardyCoeffs, LaurentSeries,
};
use crate::error::{HardyError, Result};
use crate::numeric::{anchored_mean, fmt17};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Range of `m - n` outside which the (untruncated) operator has zero entries.
///
/// Present only when the stored entries are exactly the top-left block of an
/// operator known to vanish off this band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagonalBand {
    pub lo: i64,
    pub hi: i64,
}

impl DiagonalBand {
    pub fn reflected(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

/// `N x N` compression of an operator to `span{1, z, ..., z^{N-1}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    n: usize,
    entries: Vec<Complex64>,
    exact_band: Option<DiagonalBand>,
}

impl TruncatedOperator {
    /// Row-major entries, no band metadata.
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(HardyError::DimensionTooSmall { n, needed: 1 });
        }
        if entries.len() != n * n {
            return Err(HardyError::DimensionMismatch {
                n,
                len: entries.len(),
            });
        }
        Ok(Self {
            n,
            entries,
            exact_band: None,
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut entries = Vec::with_capacity(n * n);
        for m in 0..n {
            for j in 0..n {
                entries.push(f(m, j));
            }
        }
        Self::new(n, entries)
    }

    pub fn identity(n: usize) -> Result<Self> {
        toeplitz_from_symbol(&LaurentSeries::constant(Complex64::new(1.0, 0.0)), n)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn exact_band(&self) -> Option<DiagonalBand> {
        self.exact_band
    }

    /// Attaches band metadata. The caller vouches for it.
    pub fn with_exact_band(mut self, band: Option<DiagonalBand>) -> Self {
        self.exact_band = band;
        self
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.entries[m * self.n + n]
    }

    pub fn row(&self, m: usize) -> &[Complex64] {
        &self.entries[m * self.n..(m + 1) * self.n]
    }

    /// Copy with entry `(m, n)` replaced. Band metadata is dropped.
    pub fn with_entry(&self, m: usize, n: usize, value: Complex64) -> Self {
        let mut out = self.clone();
        out.entries[m * self.n + n] = value;
        out.exact_band = None;
        out
    }

    /// Frobenius norm of the difference.
    pub fn frobenius_distance(&self, other: &TruncatedOperator) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// `A[m][n] = phi_hat(m - n)`.
pub fn toeplitz_from_symbol(phi: &LaurentSeries, n: usize) -> Result<TruncatedOperator> {
    let op = TruncatedOperator::from_fn(n, |m, j| phi.coeff(m as i64 - j as i64))?;
    Ok(op.with_exact_band(Some(DiagonalBand {
        lo: phi.n_min(),
        hi: phi.n_max(),
    })))
}

/// Upper triangular Toeplitz section `A[m][j] = gamma_{j-m}` for `j >= m`.
pub fn gamma_upper_triangular(gamma: &[Complex64], n: usize) -> Result<TruncatedOperator> {
    if gamma.len() < n {
        return Err(HardyError::TableTooShort {
            len: gamma.len(),
            needed: n,
        });
    }
    TruncatedOperator::from_fn(n, |m, j| if j >= m { gamma[j - m] } else { ZERO })
}

/// Matrix-vector product; `v` is zero-padded to `N`.
///
/// # Panics
///
/// If `v` has more than `N` coefficients.
pub fn apply(t: &TruncatedOperator, v: &HardyCoeffs) -> HardyCoeffs {
    assert!(
        v.len() <= t.n,
        "vector of length {} does not fit truncation {}",
        v.len(),
        t.n
    );
    let out = (0..t.n)
        .map(|m| {
            t.row(m)
                .iter()
                .zip(v.coeffs())
                .map(|(a, x)| a * x)
                .sum::<Complex64>()
        })
        .collect();
    HardyCoeffs::new(out).expect("N >= 1")
}

/// `S* T S` restricted to the first `N - 1` basis vectors.
pub fn shift_compress(t: &TruncatedOperator) -> Result<TruncatedOperator> {
    if t.n < 2 {
        return Err(HardyError::DimensionTooSmall { n: t.n, needed: 2 });
    }
    let out = TruncatedOperator::from_fn(t.n - 1, |m, j| t.entry(m + 1, j + 1))?;
    Ok(out.with_exact_band(t.exact_band))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzCheck {
    pub is_toeplitz: bool,
    pub max_deviation: f64,
    /// Position `(m, n)` where `|A[m+1][n+1] - A[m][n]|` is largest.
    pub location: Option<(usize, usize)>,
}

pub fn is_toeplitz_algebraic(t: &TruncatedOperator, tol: f64) -> ToeplitzCheck {
    let mut worst = 0.0;
    let mut location = None;
    for m in 0..t.n.saturating_sub(1) {
        for j in 0..t.n - 1 {
            let d = (t.entry(m + 1, j + 1) - t.entry(m, j)).norm();
            if d > worst {
                worst = d;
                location = Some((m, j));
            }
        }
    }
    ToeplitzCheck {
        is_toeplitz: worst <= tol,
        max_deviation: worst,
        location,
    }
}

/// Diagonal means with the first `margin` entries of every diagonal skipped.
///
/// Coefficient `k` in `[-(N-1-margin), N-1-margin]` is the mean of
/// `A[m+k][m]` over positions with both indices at least `margin`.
///
/// # Panics
///
/// If `2 * margin >= N`.
pub fn diagonal_symbol_recovery(t: &TruncatedOperator, margin: usize) -> LaurentSeries {
    assert!(2 * margin < t.n, "margin {margin} too large for N = {}", t.n);
    let reach = (t.n - 1 - margin) as i64;
    let coeffs = (-reach..=reach)
        .map(|k| {
            let diag: Vec<Complex64> = (0..t.n as i64)
                .filter(|&m| m >= margin as i64 && m + k >= margin as i64 && m + k < t.n as i64)
                .map(|m| t.entry((m + k) as usize, m as usize))
                .collect();
            anchored_mean(&diag)
        })
        .collect();
    LaurentSeries::new(-reach, coeffs).expect("nonempty band")
}

/// Conjugate transpose.
pub fn adjoint(t: &TruncatedOperator) -> TruncatedOperator {
    TruncatedOperator::from_fn(t.n, |m, j| t.entry(j, m).conj())
        .expect("same dimension")
        .with_exact_band(t.exact_band.map(DiagonalBand::reflected))
}

/// Symbol classes that can be realized as truncated operators.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolSpec {
    TrigPolynomial(LaurentSeries),
    /// Analytic multiplication by `b / a` with `a` nonvanishing on the circle.
    SmirnovRatio { b: HardyCoeffs, a: HardyCoeffs },
    GammaUpperTriangular(Vec<Complex64>),
}

/// Outcome of checking a Smirnov pair on a validation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SmirnovValidation {
    pub min_denominator: f64,
    /// `max_j | |a|^2 + |b|^2 - 1 |`.
    pub canonical_deviation: f64,
    pub unit_norm: bool,
}

pub fn validate_smirnov(
    b: &HardyCoeffs,
    a: &HardyCoeffs,
    grid: &CircleGrid,
    eps_zero: f64,
) -> Result<SmirnovValidation> {
    let av = evaluate_hardy_on_grid(a, grid);
    let bv = evaluate_hardy_on_grid(b, grid);
    let min_denominator = av.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if min_denominator <= eps_zero {
        return Err(HardyError::DenominatorVanishes { min_modulus: min_denominator });
    }
    let canonical_deviation = av
        .iter()
        .zip(&bv)
        .map(|(x, y)| (x.norm_sqr() + y.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(SmirnovValidation {
        min_denominator,
        canonical_deviation,
        unit_norm: canonical_deviation < 1e-8,
    })
}

/// Grid used to expand `b / a` into Taylor coefficients: a power of two at
/// least `16 N` and 1024, so aliasing from the geometric tail is negligible.
pub fn smirnov_expansion_grid(n: usize) -> CircleGrid {
    CircleGrid::new((16 * n).max(1024).next_power_of_two()).expect("nonzero")
}

/// Taylor coefficients `0..n` of `b / a` via pointwise division on a fine grid.
pub fn smirnov_symbol_coeffs(b: &HardyCoeffs, a: &HardyCoeffs, n: usize) -> Result<LaurentSeries> {
    let grid = smirnov_expansion_grid(n.max(b.len()).max(a.len()));
    let scale = a.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    validate_smirnov(b, a, &grid, 1e-12 * scale)?;
    let av = evaluate_hardy_on_grid(a, &grid);
    let bv = evaluate_hardy_on_grid(b, &grid);
    let ratio: Vec<Complex64> = bv.iter().zip(&av).map(|(x, y)| x / y).collect();
    coeffs_from_grid(&ratio, 0, n as i64 - 1, &grid)
}

impl SymbolSpec {
    pub fn realize(&self, n: usize) -> Result<TruncatedOperator> {
        match self {
            SymbolSpec::TrigPolynomial(phi) => toeplitz_from_symbol(phi, n),
            SymbolSpec::SmirnovRatio { b, a } => {
                let phi = smirnov_symbol_coeffs(b, a, n)?;
                // the Taylor series of b/a is infinite, so no band is claimed
                Ok(toeplitz_from_symbol(&phi, n)?.with_exact_band(None))
            }
            SymbolSpec::GammaUpperTriangular(gamma) => gamma_upper_triangular(gamma, n),
        }
    }
}

/// Matrix file: a header line with `N`, then `N` rows of `2N` numbers
/// (`re im` pairs, row-major), 17 significant digits.
pub fn write_matrix(t: &TruncatedOperator) -> String {
    let mut out = String::new();
    writeln!(out, "{}", t.n).unwrap();
    for m in 0..t.n {
        let row: Vec<String> = t
            .row(m)
            .iter()
            .flat_map(|c| [fmt17(c.re), fmt17(c.im)])
            .collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<TruncatedOperator> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (header_line, header) = lines.next().ok_or(HardyError::Parse {
        line: 1,
        message: "missing dimension header".into(),
    })?;
    let n: usize = header.parse().map_err(|_| HardyError::Parse {
        line: header_line,
        message: format!("bad dimension `{header}`"),
    })?;
    let mut entries = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (line_no, line) in lines {
        if rows == n {
            return Err(HardyError::Parse {
                line: line_no,
                message: "more rows than the header declares".into(),
            });
        }
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| HardyError::Parse {
                    line: line_no,
                    message: format!("bad number `{tok}`"),
                })
            })
            .collect::<Result<_>>()?;
        if nums.len() != 2 * n {
            return Err(HardyError::Parse {
                line: line_no,
                message: format!("expected {} numbers, found {}", 2 * n, nums.len()),
            });
        }
        entries.extend(nums.chunks(2).map(|p| Complex64::new(p[0], p[1])));
        rows += 1;
    }
    if rows != n {
        return Err(HardyError::Parse {
            line: text.lines().count(),
            message: format!("expected {n} rows, found {rows}"),
        });
    }
    TruncatedOperator::new(n, entries)
}
