//! Coefficient series on the unit circle and the grid transforms between
//! coefficients and point values.
//!
//! Everything here is band-limited: a [`LaurentSeries`] stores a dense table
//! over `[n_min, n_max]` and a [`HardyCoeffs`] stores `[0, N-1]`. Grid
//! transforms refuse to alias: asking for more coefficients than the grid
//! resolves is an error.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{HardyError, Result};
use crate::numeric::fmt17;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Finite bilateral coefficient table `sum_{n=n_min}^{n_max} c_n e^{i n theta}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries {
    n_min: i64,
    coeffs: Vec<Complex64>,
}

impl LaurentSeries {
    pub fn new(n_min: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(HardyError::EmptySeries);
        }
        Ok(Self { n_min, coeffs })
    }

    /// All-zero series over `[n_min, n_max]`.
    pub fn zeros(n_min: i64, n_max: i64) -> Result<Self> {
        if n_min > n_max {
            return Err(HardyError::InvalidBand { n_min, n_max });
        }
        Ok(Self {
            n_min,
            coeffs: vec![ZERO; (n_max - n_min + 1) as usize],
        })
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            n_min: 0,
            coeffs: vec![c],
        }
    }

    /// `c * z^k`.
    pub fn monomial(k: i64, c: Complex64) -> Self {
        Self {
            n_min: k,
            coeffs: vec![c],
        }
    }

    /// Builds a series from `(index, value)` pairs; unspecified indices in the
    /// spanned band are zero.
    pub fn from_pairs(pairs: &[(i64, Complex64)]) -> Result<Self> {
        let n_min = pairs.iter().map(|p| p.0).min().ok_or(HardyError::EmptySeries)?;
        let n_max = pairs.iter().map(|p| p.0).max().unwrap_or(n_min);
        let mut s = Self::zeros(n_min, n_max)?;
        for &(n, c) in pairs {
            s.coeffs[(n - n_min) as usize] += c;
        }
        Ok(s)
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.coeffs.len() as i64 - 1
    }

    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient at index `n`; zero outside the stored band.
    pub fn coeff(&self, n: i64) -> Complex64 {
        if n < self.n_min || n > self.n_max() {
            ZERO
        } else {
            self.coeffs[(n - self.n_min) as usize]
        }
    }

    /// Re-windows the series onto `[n_min, n_max]`, dropping or zero-filling.
    pub fn restrict(&self, n_min: i64, n_max: i64) -> Result<Self> {
        if n_min > n_max {
            return Err(HardyError::InvalidBand { n_min, n_max });
        }
        Ok(Self {
            n_min,
            coeffs: (n_min..=n_max).map(|n| self.coeff(n)).collect(),
        })
    }

    /// Multiplication by `z^k`.
    pub fn shifted(&self, k: i64) -> Self {
        Self {
            n_min: self.n_min + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// `phi*(e^{i theta}) = conj(phi(e^{i theta}))`, i.e. coefficient `k` becomes
    /// `conj(phi_hat(-k))`.
    pub fn conj_reflect(&self) -> Self {
        Self {
            n_min: -self.n_max(),
            coeffs: self.coeffs.iter().rev().map(|c| c.conj()).collect(),
        }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Evaluates `sum c_n w^n` at a point of the plane (`w != 0` when the band
    /// has negative indices).
    pub fn eval_at(&self, w: Complex64) -> Complex64 {
        let acc = self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * w + c);
        acc * w.powi(self.n_min as i32)
    }

    /// Largest coefficient difference against `other` over the union band.
    pub fn max_deviation(&self, other: &LaurentSeries) -> f64 {
        let lo = self.n_min.min(other.n_min);
        let hi = self.n_max().max(other.n_max());
        (lo..=hi)
            .map(|n| (self.coeff(n) - other.coeff(n)).norm())
            .fold(0.0, f64::max)
    }
}

impl From<&HardyCoeffs> for LaurentSeries {
    fn from(h: &HardyCoeffs) -> Self {
        Self {
            n_min: 0,
            coeffs: h.coeffs.clone(),
        }
    }
}

impl From<HardyCoeffs> for LaurentSeries {
    fn from(h: HardyCoeffs) -> Self {
        Self {
            n_min: 0,
            coeffs: h.coeffs,
        }
    }
}

/// One-sided coefficient table `sum_{n=0}^{N-1} c_n z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyCoeffs {
    coeffs: Vec<Complex64>,
}

impl HardyCoeffs {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(HardyError::EmptySeries);
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            coeffs: vec![ZERO; len.max(1)],
        }
    }

    pub fn one() -> Self {
        Self {
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![ZERO; n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(ZERO)
    }

    /// Index of the highest nonzero coefficient; 0 for the zero function.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != ZERO).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn value_at_origin(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `z^k f`.
    pub fn shifted_up(&self, k: usize) -> Self {
        let mut coeffs = vec![ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// Co-shift `S* f`: drops the constant term and shifts down.
    pub fn co_shifted(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zeros(1);
        }
        Self {
            coeffs: self.coeffs[1..].to_vec(),
        }
    }

    /// Zero-pads or cuts the table to exactly `len` entries.
    pub fn resized(&self, len: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len.max(1), ZERO);
        Self { coeffs }
    }

    pub fn eval_at(&self, w: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * w + c)
    }
}

/// Uniform grid `theta_j = 2 pi j / M` on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircleGrid {
    m: usize,
}

impl CircleGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(HardyError::EmptyGrid);
        }
        Ok(Self { m })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * j as f64 / self.m as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.m).map(|j| self.theta(j)).collect()
    }

    /// Whether the grid resolves `width` consecutive Fourier modes.
    pub fn resolves(&self, width: usize) -> bool {
        self.m >= width
    }
}

fn plan(m: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if inverse {
        planner.plan_fft_inverse(m)
    } else {
        planner.plan_fft_forward(m)
    }
}

/// `value[j] = sum_n c_n e^{i n theta_j}`.
///
/// Evaluation at grid points is exact under index folding, so any band is
/// accepted here; only the inverse direction needs the no-aliasing check.
pub fn evaluate_on_grid(s: &LaurentSeries, grid: &CircleGrid) -> Vec<Complex64> {
    let m = grid.len();
    let mut buf = vec![ZERO; m];
    for (i, &c) in s.coeffs.iter().enumerate() {
        let n = s.n_min + i as i64;
        buf[n.rem_euclid(m as i64) as usize] += c;
    }
    plan(m, true).process(&mut buf);
    buf
}

pub fn evaluate_hardy_on_grid(f: &HardyCoeffs, grid: &CircleGrid) -> Vec<Complex64> {
    evaluate_on_grid(&LaurentSeries::from(f), grid)
}

/// Recovers the coefficients on `[n_min, n_max]` from grid values.
pub fn coeffs_from_grid(
    values: &[Complex64],
    n_min: i64,
    n_max: i64,
    grid: &CircleGrid,
) -> Result<LaurentSeries> {
    if n_min > n_max {
        return Err(HardyError::InvalidBand { n_min, n_max });
    }
    let m = grid.len();
    if values.len() != m {
        return Err(HardyError::GridLengthMismatch {
            points: m,
            len: values.len(),
        });
    }
    let needed = (n_max - n_min + 1) as usize;
    if needed > m {
        return Err(HardyError::BandTooWide {
            n_min,
            n_max,
            needed,
            points: m,
        });
    }
    let mut buf = values.to_vec();
    plan(m, false).process(&mut buf);
    let scale = 1.0 / m as f64;
    let coeffs = (n_min..=n_max)
        .map(|n| buf[n.rem_euclid(m as i64) as usize] * scale)
        .collect();
    LaurentSeries::new(n_min, coeffs)
}

/// Cauchy product.
pub fn multiply(a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
    let mut out = vec![ZERO; a.width() + b.width() - 1];
    for (i, &x) in a.coeffs.iter().enumerate() {
        for (j, &y) in b.coeffs.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    LaurentSeries {
        n_min: a.n_min + b.n_min,
        coeffs: out,
    }
}

pub fn multiply_hardy(a: &HardyCoeffs, b: &HardyCoeffs) -> HardyCoeffs {
    riesz_project(&multiply(&a.into(), &b.into()))
}

/// `<a, b> = sum a_n conj(b_n)`.
pub fn inner_product(a: &HardyCoeffs, b: &HardyCoeffs) -> Complex64 {
    a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| x * y.conj())
        .sum()
}

/// Orthogonal projection onto the analytic part: drops every `n < 0`.
pub fn riesz_project(s: &LaurentSeries) -> HardyCoeffs {
    if s.n_max() < 0 {
        return HardyCoeffs::zeros(1);
    }
    let mut coeffs = vec![ZERO; (s.n_max() + 1) as usize];
    for n in s.n_min.max(0)..=s.n_max() {
        coeffs[n as usize] = s.coeff(n);
    }
    HardyCoeffs { coeffs }
}

/// Serializes a series as
///
/// ```text
/// n_min = -1
/// coeffs = [
///   [re, im],
///   ...
/// ]
/// ```
///
/// with 17 significant digits per number.
pub fn write_series(s: &LaurentSeries) -> String {
    let mut out = String::new();
    writeln!(out, "n_min = {}", s.n_min).unwrap();
    out.push_str("coeffs = [\n");
    for c in &s.coeffs {
        writeln!(out, "  [{}, {}],", fmt17(c.re), fmt17(c.im)).unwrap();
    }
    out.push_str("]\n");
    out
}

pub fn parse_series(text: &str) -> Result<LaurentSeries> {
    let err = |line: usize, message: &str| HardyError::Parse {
        line,
        message: message.to_string(),
    };
    let mut n_min: Option<i64> = None;
    let mut coeffs = Vec::new();
    let mut in_list = false;
    let mut closed = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if in_list {
            if line == "]" {
                in_list = false;
                closed = true;
                continue;
            }
            let body = line
                .trim_end_matches(',')
                .trim()
                .strip_prefix('[')
                .and_then(|l| l.strip_suffix(']'))
                .ok_or_else(|| err(line_no, "expected `[re, im]`"))?;
            let mut parts = body.split(',').map(str::trim);
            let re = parts.next().and_then(|p| p.parse::<f64>().ok());
            let im = parts.next().and_then(|p| p.parse::<f64>().ok());
            match (re, im, parts.next()) {
                (Some(re), Some(im), None) => coeffs.push(Complex64::new(re, im)),
                _ => return Err(err(line_no, "expected two numbers")),
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line_no, "expected `key = value`"))?;
        match key.trim() {
            "n_min" => {
                n_min = Some(
                    value
                        .trim()
                        .parse()
                        .map_err(|_| err(line_no, "n_min must be an integer"))?,
                )
            }
            "coeffs" => {
                if value.trim() != "[" {
                    return Err(err(line_no, "coefficient list must start on its own line"));
                }
                in_list = true;
            }
            other => return Err(err(line_no, &format!("unknown key `{other}`"))),
        }
    }
    let last = text.lines().count();
    if in_list || !closed {
        return Err(err(last, "unterminated or missing coefficient list"));
    }
    let n_min = n_min.ok_or_else(|| err(last, "missing n_min"))?;
    LaurentSeries::new(n_min, coeffs)
}
