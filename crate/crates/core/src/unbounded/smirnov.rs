//! Domain tests for multiplication by `phi = b / a` on the circle grid.

use num_complex::Complex64;

use crate::circle_fourier::{coeffs_from_grid, evaluate_hardy_on_grid, evaluate_on_grid, CircleGrid, HardyCoeffs, LaurentSeries};
use crate::error::{HardyError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SmirnovDomainReport {
    /// Discrete L^2 norm `sqrt(mean_j |phi f|^2)`.
    pub grid_norm: f64,
    pub member: bool,
    pub bound: Option<f64>,
    pub min_denominator: f64,
    /// `max_j | |a|^2 + |b|^2 - 1 |`, when the caller asserts a canonical pair.
    pub canonical_deviation: Option<f64>,
}

/// Canonical-pair tolerance on `| |a|^2 + |b|^2 - 1 |`.
pub const CANONICAL_TOL: f64 = 1e-8;

impl SmirnovDomainReport {
    pub fn canonical_ok(&self) -> Option<bool> {
        self.canonical_deviation.map(|d| d < CANONICAL_TOL)
    }
}

/// Grid values of `b / a`, refusing when `min |a| <= eps_zero`.
pub fn ratio_on_grid(b: &LaurentSeries, a: &HardyCoeffs, grid: &CircleGrid, eps_zero: f64) -> Result<(Vec<Complex64>, f64)> {
    let av = evaluate_hardy_on_grid(a, grid);
    let min_denominator = av.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !(min_denominator > eps_zero) {
        return Err(HardyError::DenominatorVanishes {
            min_modulus: min_denominator,
        });
    }
    let bv = evaluate_on_grid(b, grid);
    Ok((bv.iter().zip(&av).map(|(x, y)| x / y).collect(), min_denominator))
}

/// Membership of `f` in the domain of multiplication by `b / a`.
///
/// At truncation the norm is always finite; `member` compares it against
/// `bound` when one is given and is otherwise true for any finite norm.
pub fn smirnov_domain_test(
    b: &LaurentSeries,
    a: &HardyCoeffs,
    f: &HardyCoeffs,
    grid: &CircleGrid,
    eps_zero: f64,
    bound: Option<f64>,
    assert_canonical: bool,
) -> Result<SmirnovDomainReport> {
    let (phi, min_denominator) = ratio_on_grid(b, a, grid, eps_zero)?;
    let fv = evaluate_hardy_on_grid(f, grid);
    let mean_sq = phi.iter().zip(&fv).map(|(p, x)| (p * x).norm_sqr()).sum::<f64>() / grid.len() as f64;
    let grid_norm = mean_sq.sqrt();
    let member = grid_norm.is_finite() && bound.map_or(true, |c| grid_norm <= c);
    let canonical_deviation = assert_canonical.then(|| {
        let av = evaluate_hardy_on_grid(a, grid);
        let bv = evaluate_on_grid(b, grid);
        av.iter()
            .zip(&bv)
            .map(|(x, y)| (x.norm_sqr() + y.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    });
    Ok(SmirnovDomainReport {
        grid_norm,
        member,
        bound,
        min_denominator,
        canonical_deviation,
    })
}

/// `b` with `|b| = sqrt(1 - |a|^2)` and zero phase on the grid, as the full
/// band the grid resolves. Fails if `|a| > 1` somewhere.
pub fn canonical_partner(a: &HardyCoeffs, grid: &CircleGrid) -> Result<LaurentSeries> {
    let av = evaluate_hardy_on_grid(a, grid);
    let mut values = Vec::with_capacity(av.len());
    for z in &av {
        let r = 1.0 - z.norm_sqr();
        if r < 0.0 {
            return Err(HardyError::DiskViolation { re: z.re, im: z.im });
        }
        values.push(Complex64::new(r.sqrt(), 0.0));
    }
    let m = grid.len() as i64;
    let n_min = -(m - 1) / 2;
    coeffs_from_grid(&values, n_min, n_min + m - 1, grid)
}
