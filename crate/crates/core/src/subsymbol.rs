//! Sub-symbols of a truncated operator.
//!
//! For a probe `f` the numerator is
//!
//! ```text
//! h_f = sum_{n=1}^{K} <T f z^n, 1> e^{-i n theta} + sum_{n>=0} <T f, z^n> e^{i n theta}
//! ```
//!
//! and the sub-symbol is the pointwise ratio `R_f = h_f / f` on a circle grid.
//! Division never happens coefficient-wise. A Toeplitz operator gives the same
//! `R_f` for every probe; the probes below measure how far that fails.

use std::ops::RangeInclusive;

use num_complex::Complex64;

use crate::circle_fourier::{
    coeffs_from_grid, evaluate_hardy_on_grid, evaluate_on_grid, multiply, multiply_hardy,
    riesz_project, CircleGrid, HardyCoeffs, LaurentSeries,
};
use crate::error::{HardyError, Result};
use crate::hardy_ops::{apply, TruncatedOperator};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative threshold for masking grid points where the probe nearly vanishes.
pub const DEFAULT_EPS_ZERO_REL: f64 = 1e-6;

/// Fraction of grid points a probe must keep for extension checks.
pub const MIN_MASK_FRACTION: f64 = 0.9;

/// A named probe function `f` in the operator's domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub id: String,
    pub f: HardyCoeffs,
}

impl Probe {
    pub fn new(id: impl Into<String>, f: HardyCoeffs) -> Self {
        Self { id: id.into(), f }
    }

    pub fn monomial(n: usize) -> Self {
        let id = match n {
            0 => "1".to_string(),
            1 => "z".to_string(),
            _ => format!("z^{n}"),
        };
        Self::new(id, HardyCoeffs::monomial(n))
    }
}

/// `{1, z, z^2, 1+z}` plus an optional outer candidate.
pub fn default_probes(outer: Option<HardyCoeffs>) -> Vec<Probe> {
    let mut probes = vec![
        Probe::monomial(0),
        Probe::monomial(1),
        Probe::monomial(2),
        Probe::new("1+z", HardyCoeffs::from_real(&[1.0, 1.0]).expect("nonempty")),
    ];
    if let Some(f) = outer {
        probes.push(Probe::new("outer", f));
    }
    probes
}

fn check_depth(t: &TruncatedOperator, f: &HardyCoeffs, depth: usize) -> Result<()> {
    let degree = f.degree();
    if degree + depth > t.dim() - 1 {
        return Err(HardyError::ProbeTooDeep {
            degree,
            depth,
            n: t.dim(),
        });
    }
    Ok(())
}

/// `<T (f z^n), 1>`, the first row of `T` against the shifted probe.
fn first_moment(t: &TruncatedOperator, f: &HardyCoeffs, n: usize) -> Complex64 {
    let row = t.row(0);
    f.coeffs()
        .iter()
        .enumerate()
        .filter(|(j, _)| j + n < row.len())
        .map(|(j, c)| row[j + n] * c)
        .sum()
}

/// Numerator `h_f` with negative band depth `k`.
///
/// When the operator carries a diagonal band `[lo, hi]`, coefficients outside
/// `[lo, hi + deg f]` are known to vanish and the reported band is trimmed to
/// that window.
pub fn compute_h(t: &TruncatedOperator, f: &HardyCoeffs, k: usize) -> Result<LaurentSeries> {
    check_depth(t, f, k)?;
    let tf = apply(t, &f.resized(t.dim()));
    let n_top = t.dim() as i64 - 1;
    let coeff = |idx: i64| -> Complex64 {
        if idx >= 0 {
            tf.coeff(idx as usize)
        } else {
            first_moment(t, f, (-idx) as usize)
        }
    };
    let (mut lo, mut hi) = (-(k as i64), n_top);
    if let Some(band) = t.exact_band() {
        lo = lo.max(band.lo);
        hi = hi.min(band.hi + f.degree() as i64);
    }
    if lo > hi {
        return Ok(LaurentSeries::constant(ZERO));
    }
    LaurentSeries::new(lo, (lo..=hi).map(coeff).collect())
}

/// Partial numerator `h_{f,N}`: the negative sum stops at `n_cut`.
pub fn compute_partial_h(
    t: &TruncatedOperator,
    f: &HardyCoeffs,
    n_cut: usize,
) -> Result<LaurentSeries> {
    compute_h(t, f, n_cut)
}

/// Whether the computed numerator equals the untruncated one, which is only
/// decidable when the operator's diagonal band is known.
pub fn numerator_is_complete(t: &TruncatedOperator, f: &HardyCoeffs, k: usize) -> bool {
    match t.exact_band() {
        Some(band) => {
            -(k as i64) <= band.lo && band.hi + f.degree() as i64 <= t.dim() as i64 - 1
        }
        None => false,
    }
}

/// Grid size that resolves the numerator without aliasing.
fn required_points(h: &LaurentSeries, f: &HardyCoeffs) -> usize {
    2 * h.width().max(f.degree() + 1) + 1
}

/// `R_f = h_f / f` on a grid, with the mask of usable points.
#[derive(Debug, Clone)]
pub struct SubSymbol {
    pub f: HardyCoeffs,
    pub h: LaurentSeries,
    pub grid: CircleGrid,
    pub depth: usize,
    pub f_values: Vec<Complex64>,
    pub h_values: Vec<Complex64>,
    /// `None` where the probe is masked out.
    pub r_values: Vec<Option<Complex64>>,
    pub eps_zero: f64,
    pub h_complete: bool,
    pub warnings: Vec<String>,
}

impl SubSymbol {
    pub fn valid_mask(&self) -> Vec<bool> {
        self.r_values.iter().map(Option::is_some).collect()
    }

    pub fn valid_count(&self) -> usize {
        self.r_values.iter().filter(|r| r.is_some()).count()
    }

    pub fn mask_fraction(&self) -> f64 {
        self.valid_count() as f64 / self.grid.len() as f64
    }

    /// Fourier coefficients of `R_f` on `[n_min, n_max]`; needs every grid point
    /// to be valid.
    pub fn fourier_coeffs(&self, n_min: i64, n_max: i64) -> Result<Option<LaurentSeries>> {
        let values: Option<Vec<Complex64>> = self.r_values.iter().copied().collect();
        match values {
            Some(v) => coeffs_from_grid(&v, n_min, n_max, &self.grid).map(Some),
            None => Ok(None),
        }
    }
}

/// Default mask threshold: `1e-6 * max |f|` on the grid.
pub fn default_eps_zero(f_values: &[Complex64]) -> f64 {
    DEFAULT_EPS_ZERO_REL * f_values.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn raise_grid(grid: &CircleGrid, needed: usize, warnings: &mut Vec<String>) -> CircleGrid {
    if grid.len() >= needed {
        return *grid;
    }
    warnings.push(format!(
        "grid raised from {} to {} points to resolve the numerator band",
        grid.len(),
        needed
    ));
    CircleGrid::new(needed).expect("nonzero")
}

fn ratio_on_grid(
    f: &HardyCoeffs,
    h: &LaurentSeries,
    grid: &CircleGrid,
    eps_zero: Option<f64>,
) -> (Vec<Complex64>, Vec<Complex64>, Vec<Option<Complex64>>, f64) {
    let f_values = evaluate_hardy_on_grid(f, grid);
    let h_values = evaluate_on_grid(h, grid);
    let eps = eps_zero.unwrap_or_else(|| default_eps_zero(&f_values));
    let r_values = f_values
        .iter()
        .zip(&h_values)
        .map(|(fv, hv)| (fv.norm() > eps).then(|| hv / fv))
        .collect();
    (f_values, h_values, r_values, eps)
}

pub fn sub_symbol(
    t: &TruncatedOperator,
    f: &HardyCoeffs,
    grid: &CircleGrid,
    k: usize,
    eps_zero: Option<f64>,
) -> Result<SubSymbol> {
    let h = compute_h(t, f, k)?;
    let mut warnings = Vec::new();
    let grid = raise_grid(grid, required_points(&h, f), &mut warnings);
    sub_symbol_on(t, f, h, grid, k, eps_zero, warnings)
}

fn sub_symbol_on(
    t: &TruncatedOperator,
    f: &HardyCoeffs,
    h: LaurentSeries,
    grid: CircleGrid,
    k: usize,
    eps_zero: Option<f64>,
    warnings: Vec<String>,
) -> Result<SubSymbol> {
    let (f_values, h_values, r_values, eps) = ratio_on_grid(f, &h, &grid, eps_zero);
    if r_values.iter().all(Option::is_none) {
        return Err(HardyError::AllPointsMasked { eps_zero: eps });
    }
    Ok(SubSymbol {
        f: f.clone(),
        h_complete: numerator_is_complete(t, f, k),
        h,
        grid,
        depth: k,
        f_values,
        h_values,
        r_values,
        eps_zero: eps,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniquenessVerdict {
    Unique,
    NotUnique,
}

impl UniquenessVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            UniquenessVerdict::Unique => "unique",
            UniquenessVerdict::NotUnique => "not_unique",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDeviation {
    pub first: usize,
    pub second: usize,
    /// `None` when the two masks never overlap.
    pub max_deviation: Option<f64>,
    /// Grid index where the deviation peaks.
    pub at_point: Option<usize>,
    pub joint_points: usize,
}

#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub probes: Vec<String>,
    /// Negative band depth actually used per probe.
    pub depths: Vec<usize>,
    pub complete: Vec<bool>,
    pub bands: Vec<(i64, i64)>,
    pub pairs: Vec<PairDeviation>,
    pub tolerance: f64,
    pub grid: CircleGrid,
    pub verdict: UniquenessVerdict,
    /// Pair index into `pairs` holding the overall maximum.
    pub witness: Option<usize>,
    pub warnings: Vec<String>,
}

impl UniquenessReport {
    pub fn max_deviation(&self) -> f64 {
        self.pairs
            .iter()
            .filter_map(|p| p.max_deviation)
            .fold(0.0, f64::max)
    }

    /// Witness as `(probe_i, probe_j, theta)`.
    pub fn witness_point(&self) -> Option<(&str, &str, f64)> {
        let p = &self.pairs[self.witness?];
        Some((
            &self.probes[p.first],
            &self.probes[p.second],
            self.grid.theta(p.at_point?),
        ))
    }
}

/// Pairwise comparison of sub-symbols on one shared grid.
///
/// Each probe uses depth `min(k, N - 1 - deg f)`, so high-degree monomials can
/// sit next to deep low-degree probes.
pub fn uniqueness_probe(
    t: &TruncatedOperator,
    probes: &[Probe],
    grid: &CircleGrid,
    k: usize,
    tol: f64,
) -> Result<UniquenessReport> {
    if probes.len() < 2 {
        return Err(HardyError::TooFewProbes {
            needed: 2,
            got: probes.len(),
        });
    }
    let mut depths = Vec::with_capacity(probes.len());
    let mut numerators = Vec::with_capacity(probes.len());
    for p in probes {
        let max_depth = (t.dim() - 1).checked_sub(p.f.degree()).ok_or(HardyError::ProbeTooDeep {
            degree: p.f.degree(),
            depth: 0,
            n: t.dim(),
        })?;
        let depth = k.min(max_depth);
        numerators.push(compute_h(t, &p.f, depth)?);
        depths.push(depth);
    }
    let needed = probes
        .iter()
        .zip(&numerators)
        .map(|(p, h)| required_points(h, &p.f))
        .max()
        .unwrap_or(1);
    let mut warnings = Vec::new();
    let grid = raise_grid(grid, needed, &mut warnings);

    let mut symbols = Vec::with_capacity(probes.len());
    for ((p, h), &depth) in probes.iter().zip(numerators).zip(&depths) {
        let s = sub_symbol_on(t, &p.f, h, grid, depth, None, Vec::new())?;
        if !s.h_complete {
            warnings.push(format!("numerator of probe `{}` is truncated", p.id));
        }
        symbols.push(s);
    }

    let mut pairs = Vec::new();
    for i in 0..symbols.len() {
        for j in i + 1..symbols.len() {
            let mut best: Option<(f64, usize)> = None;
            let mut joint = 0;
            for (idx, (a, b)) in symbols[i].r_values.iter().zip(&symbols[j].r_values).enumerate() {
                if let (Some(a), Some(b)) = (a, b) {
                    joint += 1;
                    let d = (a - b).norm();
                    if best.map_or(true, |(bd, _)| d > bd) {
                        best = Some((d, idx));
                    }
                }
            }
            pairs.push(PairDeviation {
                first: i,
                second: j,
                max_deviation: best.map(|b| b.0),
                at_point: best.map(|b| b.1),
                joint_points: joint,
            });
        }
    }
    if pairs.iter().all(|p| p.max_deviation.is_none()) {
        return Err(HardyError::NoComparablePoints);
    }
    let witness = pairs
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.max_deviation.map(|d| (i, d)))
        .fold(None, |acc: Option<(usize, f64)>, (i, d)| match acc {
            Some((_, bd)) if bd >= d => acc,
            _ => Some((i, d)),
        })
        .map(|(i, _)| i);
    let unique = pairs
        .iter()
        .all(|p| p.max_deviation.map_or(true, |d| d <= tol));
    Ok(UniquenessReport {
        probes: probes.iter().map(|p| p.id.clone()).collect(),
        depths,
        complete: symbols.iter().map(|s| s.h_complete).collect(),
        bands: symbols.iter().map(|s| (s.h.n_min(), s.h.n_max())).collect(),
        pairs,
        tolerance: tol,
        grid,
        verdict: if unique {
            UniquenessVerdict::Unique
        } else {
            UniquenessVerdict::NotUnique
        },
        witness,
        warnings,
    })
}

/// A non-Toeplitz entry and the probe pair `{1, z^c}` that exposes it.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialWitness {
    /// Entry `(r, c)` that disagrees with the start of its diagonal.
    pub entry: (usize, usize),
    /// First entry of the same diagonal.
    pub reference: (usize, usize),
    pub deviation: f64,
    pub probes: [Probe; 2],
}

/// Finds the entry deviating most from the first entry of its diagonal.
///
/// The pair `{1, z^c}` then has sub-symbols whose Fourier coefficient at
/// index `r - c` differs by exactly that deviation.
pub fn monomial_witness(t: &TruncatedOperator) -> Option<MonomialWitness> {
    let n = t.dim();
    let mut best: Option<(f64, usize, usize)> = None;
    for r in 1..n {
        for c in 1..n {
            let s = r.min(c);
            let d = (t.entry(r, c) - t.entry(r - s, c - s)).norm();
            if d > 0.0 && best.map_or(true, |(bd, _, _)| d > bd) {
                best = Some((d, r, c));
            }
        }
    }
    let (deviation, r, c) = best?;
    let s = r.min(c);
    Some(MonomialWitness {
        entry: (r, c),
        reference: (r - s, c - s),
        deviation,
        probes: [Probe::monomial(0), Probe::monomial(c)],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticityReport {
    /// `(probe id, <T(z f), 1>)` per probe.
    pub values: Vec<(String, Complex64)>,
    pub tolerance: f64,
    pub analytic: bool,
}

impl AnalyticityReport {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.1.norm()).fold(0.0, f64::max)
    }
}

/// Analyticity criterion: `<T(z f), 1> = 0` for every probe.
pub fn analyticity_test(
    t: &TruncatedOperator,
    probes: &[Probe],
    tol: f64,
) -> Result<AnalyticityReport> {
    let mut values = Vec::with_capacity(probes.len());
    for p in probes {
        check_depth(t, &p.f, 1)?;
        values.push((p.id.clone(), first_moment(t, &p.f, 1)));
    }
    let analytic = values.iter().all(|(_, v)| v.norm() <= tol);
    Ok(AnalyticityReport {
        values,
        tolerance: tol,
        analytic,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionRow {
    pub poly_degree: usize,
    /// Output indices on which both sides are complete.
    pub band: (usize, usize),
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionReport {
    pub depth: usize,
    pub mask_fraction: f64,
    pub tolerance: f64,
    pub rows: Vec<ExtensionRow>,
}

impl ExtensionReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.max_deviation).fold(0.0, f64::max)
    }
}

/// Compares `P(h_f p)` against `T(f p)` for each polynomial `p`.
///
/// Output index `m` is certified when every `h_f` coefficient feeding it was
/// computed, i.e. `m >= deg p - K`.
pub fn extension_agreement(
    t: &TruncatedOperator,
    f: &HardyCoeffs,
    polys: &[HardyCoeffs],
    grid: &CircleGrid,
    k: usize,
    tol: f64,
) -> Result<ExtensionReport> {
    let h = compute_h(t, f, k)?;
    let f_values = evaluate_hardy_on_grid(f, grid);
    let eps = default_eps_zero(&f_values);
    let valid = f_values.iter().filter(|v| v.norm() > eps).count();
    let mask_fraction = valid as f64 / grid.len() as f64;
    if mask_fraction < MIN_MASK_FRACTION {
        return Err(HardyError::InsufficientMask {
            fraction: mask_fraction,
            required: MIN_MASK_FRACTION,
        });
    }
    let n = t.dim();
    let mut rows = Vec::with_capacity(polys.len());
    for p in polys {
        let fp = multiply_hardy(f, p);
        if fp.degree() > n - 1 {
            return Err(HardyError::ProbeTooDeep {
                degree: fp.degree(),
                depth: 0,
                n,
            });
        }
        let direct = apply(t, &fp.resized(n));
        let projected = riesz_project(&multiply(&h, &LaurentSeries::from(p)));
        let lo = p.degree().saturating_sub(k);
        let max_deviation = (lo..n)
            .map(|m| (projected.coeff(m) - direct.coeff(m)).norm())
            .fold(0.0, f64::max);
        rows.push(ExtensionRow {
            poly_degree: p.degree(),
            band: (lo, n - 1),
            max_deviation,
            passed: max_deviation <= tol,
        });
    }
    Ok(ExtensionReport {
        depth: k,
        mask_fraction,
        tolerance: tol,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizationReport {
    /// First cut `N` with `P(h_{f,N} p) == P(h_{f,N+1} p)` bit for bit.
    pub n_star: usize,
    /// `P(h_{f,N*} p)` on `[0, N-1]`.
    pub stabilized: HardyCoeffs,
    /// Indices where the stabilized vector is certified against `T(f p)`.
    pub band: (usize, usize),
    pub deviation_vs_apply: f64,
    pub matches_apply: bool,
    /// `(cut, max change to the next cut)` for every cut examined.
    pub steps: Vec<(usize, f64)>,
}

/// Sweeps the partial numerator depth until `P(h_{f,N} p)` stops changing.
pub fn partial_stabilization(
    t: &TruncatedOperator,
    f: &HardyCoeffs,
    p: &HardyCoeffs,
    cuts: RangeInclusive<usize>,
    tol: f64,
) -> Result<StabilizationReport> {
    let n = t.dim();
    let fp = multiply_hardy(f, p);
    if fp.degree() > n - 1 {
        return Err(HardyError::ProbeTooDeep {
            degree: fp.degree(),
            depth: 0,
            n,
        });
    }
    let max_cut = (n - 1).saturating_sub(f.degree());
    let (start, end) = (*cuts.start(), (*cuts.end()).min(max_cut));
    if start >= end {
        return Err(HardyError::ProbeTooDeep {
            degree: f.degree(),
            depth: start + 1,
            n,
        });
    }
    let projected = |cut: usize| -> Result<Vec<Complex64>> {
        let h = compute_partial_h(t, f, cut)?;
        let q = riesz_project(&multiply(&h, &LaurentSeries::from(p)));
        Ok((0..n).map(|m| q.coeff(m)).collect())
    };
    let mut steps = Vec::new();
    let mut current = projected(start)?;
    for cut in start..end {
        let next = projected(cut + 1)?;
        let change = current
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        steps.push((cut, change));
        if current == next {
            let direct = apply(t, &fp.resized(n));
            let known_zero_below = t.exact_band().map_or(0, |b| (-b.lo).max(0) as usize);
            let lo = p.degree().saturating_sub(cut.max(known_zero_below));
            let deviation_vs_apply = (lo..n)
                .map(|m| (current[m] - direct.coeff(m)).norm())
                .fold(0.0, f64::max);
            return Ok(StabilizationReport {
                n_star: cut,
                stabilized: HardyCoeffs::new(current).expect("N >= 1"),
                band: (lo, n - 1),
                deviation_vs_apply,
                matches_apply: deviation_vs_apply <= tol,
                steps,
            });
        }
        current = next;
    }
    Err(HardyError::NoStabilization { start, end })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy_ops::{gamma_upper_triangular, toeplitz_from_symbol};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one() -> Complex64 {
        c(1.0, 0.0)
    }

    fn rank_one(n: usize) -> TruncatedOperator {
        TruncatedOperator::from_fn(n, |m, j| if m == 0 && j == 0 { one() } else { ZERO }).unwrap()
    }

    fn factorial_op(n: usize) -> TruncatedOperator {
        let mut g = vec![one(); n];
        for i in 1..n {
            g[i] = g[i - 1] * i as f64;
        }
        gamma_upper_triangular(&g, n).unwrap()
    }

    fn sample_symbol() -> LaurentSeries {
        LaurentSeries::new(
            -2,
            vec![c(0.2, -0.1), c(-0.4, 0.3), c(1.0, 0.0), c(0.5, 0.5), c(0.0, -0.25)],
        )
        .unwrap()
    }

    #[test]
    fn compute_h_identity_returns_probe() {
        let id = TruncatedOperator::identity(10).unwrap();
        let f = HardyCoeffs::new(vec![c(1.0, 0.5), c(0.0, 2.0), c(-3.0, 0.0)]).unwrap();
        let h = compute_h(&id, &f, 3).unwrap();
        for k in -3..0 {
            assert_eq!(h.coeff(k), ZERO);
        }
        assert_eq!(h.max_deviation(&LaurentSeries::from(&f)), 0.0);
    }

    #[test]
    fn compute_h_of_toeplitz_is_symbol() {
        let phi = sample_symbol();
        let t = toeplitz_from_symbol(&phi, 16).unwrap();
        let h = compute_h(&t, &HardyCoeffs::one(), 4).unwrap();
        assert_eq!(h.max_deviation(&phi), 0.0);
        assert!(numerator_is_complete(&t, &HardyCoeffs::one(), 4));
        assert!(!numerator_is_complete(&t, &HardyCoeffs::one(), 1));
    }

    #[test]
    fn compute_h_rank_one() {
        let t = rank_one(8);
        let h1 = compute_h(&t, &HardyCoeffs::one(), 3).unwrap();
        assert_eq!(h1.max_deviation(&LaurentSeries::constant(one())), 0.0);
        let hz = compute_h(&t, &HardyCoeffs::monomial(1), 3).unwrap();
        assert_eq!(hz.max_abs(), 0.0);
    }

    #[test]
    fn compute_h_rejects_deep_probes() {
        let t = TruncatedOperator::identity(6).unwrap();
        assert!(matches!(
            compute_h(&t, &HardyCoeffs::monomial(3), 3),
            Err(HardyError::ProbeTooDeep { degree: 3, depth: 3, n: 6 })
        ));
    }

    #[test]
    fn partial_h_examples() {
        let phi = sample_symbol();
        let t = toeplitz_from_symbol(&phi, 12).unwrap();
        let f = HardyCoeffs::from_real(&[1.0, 0.5]).unwrap();
        let h0 = compute_partial_h(&t, &f, 0).unwrap();
        assert!(h0.n_min() >= 0);
        let full = compute_h(&t, &f, 5).unwrap();
        assert_eq!(riesz_project(&full), riesz_project(&h0));
        let deep = compute_partial_h(&t, &f, 5).unwrap();
        assert_eq!(deep, full);

        // factorial operator, f = z, cut 2
        let h = compute_partial_h(&factorial_op(8), &HardyCoeffs::monomial(1), 2).unwrap();
        assert_eq!(h.coeff(-2), c(6.0, 0.0));
        assert_eq!(h.coeff(-1), c(2.0, 0.0));
        assert_eq!(h.coeff(0), one());
        assert_eq!(h.coeff(1), one());
        for k in 2..8 {
            assert_eq!(h.coeff(k), ZERO);
        }
    }

    #[test]
    fn sub_symbol_of_toeplitz_is_symbol() {
        let phi = sample_symbol();
        let t = toeplitz_from_symbol(&phi, 32).unwrap();
        let f = HardyCoeffs::from_real(&[1.0, 0.5]).unwrap();
        let grid = CircleGrid::new(65).unwrap();
        let s = sub_symbol(&t, &f, &grid, 8, None).unwrap();
        let phi_vals = evaluate_on_grid(&phi, &s.grid);
        for (r, p) in s.r_values.iter().zip(&phi_vals) {
            assert!((r.unwrap() - p).norm() < 1e-9);
        }
        for j in 0..s.grid.len() {
            if let Some(r) = s.r_values[j] {
                assert!((r * s.f_values[j] - s.h_values[j]).norm() <= 1e-9 * (1.0 + s.h_values[j].norm()));
                assert!(s.f_values[j].norm() > s.eps_zero);
            }
        }
    }

    #[test]
    fn sub_symbol_identity_and_rank_one() {
        let id = TruncatedOperator::identity(16).unwrap();
        let f = HardyCoeffs::from_real(&[2.0, 1.0, 0.25]).unwrap();
        let s = sub_symbol(&id, &f, &CircleGrid::new(64).unwrap(), 4, None).unwrap();
        assert!(s.r_values.iter().all(|r| (r.unwrap() - one()).norm() < 1e-12));

        let t = rank_one(16);
        let g = CircleGrid::new(64).unwrap();
        let s1 = sub_symbol(&t, &HardyCoeffs::one(), &g, 4, None).unwrap();
        assert!(s1.r_values.iter().all(|r| (r.unwrap() - one()).norm() < 1e-12));
        let sz = sub_symbol(&t, &HardyCoeffs::monomial(1), &g, 4, None).unwrap();
        assert!(sz.r_values.iter().all(|r| r.unwrap().norm() < 1e-12));
    }

    #[test]
    fn sub_symbol_masks_and_errors() {
        let id = TruncatedOperator::identity(8).unwrap();
        let g = CircleGrid::new(16).unwrap();
        // 1 + z vanishes at theta = pi, which is grid point 8
        let s = sub_symbol(&id, &HardyCoeffs::from_real(&[1.0, 1.0]).unwrap(), &g, 2, None).unwrap();
        assert_eq!(s.r_values[8], None);
        assert_eq!(s.valid_count(), 15);
        assert!(matches!(
            sub_symbol(&id, &HardyCoeffs::zeros(2), &g, 2, None),
            Err(HardyError::AllPointsMasked { .. })
        ));
    }

    #[test]
    fn sub_symbol_raises_coarse_grid() {
        let t = toeplitz_from_symbol(&sample_symbol(), 16).unwrap();
        let s = sub_symbol(&t, &HardyCoeffs::one(), &CircleGrid::new(4).unwrap(), 4, None).unwrap();
        assert!(s.grid.len() >= 2 * s.h.width() + 1);
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn uniqueness_examples() {
        let t = toeplitz_from_symbol(&sample_symbol(), 32).unwrap();
        let probes = vec![
            Probe::monomial(0),
            Probe::monomial(1),
            Probe::new("1+z", HardyCoeffs::from_real(&[1.0, 1.0]).unwrap()),
        ];
        let g = CircleGrid::new(128).unwrap();
        let r = uniqueness_probe(&t, &probes, &g, 8, 1e-9).unwrap();
        assert_eq!(r.verdict, UniquenessVerdict::Unique);
        assert!(r.max_deviation() <= 1e-9);

        let r = uniqueness_probe(&rank_one(16), &probes[..2], &g, 4, 1e-9).unwrap();
        assert_eq!(r.verdict, UniquenessVerdict::NotUnique);
        assert!((r.max_deviation() - 1.0).abs() < 1e-12);
        let (a, b, _) = r.witness_point().unwrap();
        assert_eq!((a, b), ("1", "z"));

        let id = TruncatedOperator::identity(16).unwrap();
        let r = uniqueness_probe(&id, &default_probes(None), &g, 4, 1e-9).unwrap();
        assert_eq!(r.verdict, UniquenessVerdict::Unique);

        assert!(matches!(
            uniqueness_probe(&id, &probes[..1], &g, 4, 1e-9),
            Err(HardyError::TooFewProbes { .. })
        ));
    }

    #[test]
    fn uniqueness_without_overlap_errors() {
        let id = TruncatedOperator::identity(8).unwrap();
        let g = CircleGrid::new(32).unwrap();
        let probes = vec![
            Probe::monomial(0),
            Probe::new("mask", HardyCoeffs::zeros(2)),
        ];
        assert!(matches!(
            uniqueness_probe(&id, &probes, &g, 2, 1e-9),
            Err(HardyError::AllPointsMasked { .. })
        ));
    }

    #[test]
    fn witness_construction() {
        let phi = sample_symbol();
        let t = toeplitz_from_symbol(&phi, 12).unwrap();
        assert_eq!(monomial_witness(&t), None);
        let p = t.with_entry(7, 3, t.entry(7, 3) + c(1e-3, 0.0));
        let w = monomial_witness(&p).unwrap();
        assert_eq!(w.entry, (7, 3));
        assert_eq!(w.reference, (4, 0));
        assert_eq!(w.probes[1].id, "z^3");
        // boundary perturbation shows up one step down the diagonal
        let p = t.with_entry(0, 5, t.entry(0, 5) + c(0.0, 1e-3));
        let w = monomial_witness(&p).unwrap();
        assert_eq!(w.reference, (0, 5));
        assert_eq!(w.entry.1 - w.entry.0, 5);
    }

    #[test]
    fn analyticity_examples() {
        let s = toeplitz_from_symbol(&LaurentSeries::monomial(1, one()), 8).unwrap();
        let probes = vec![
            Probe::monomial(0),
            Probe::monomial(1),
            Probe::new("1+z^2", HardyCoeffs::from_real(&[1.0, 0.0, 1.0]).unwrap()),
        ];
        assert!(analyticity_test(&s, &probes, 1e-10).unwrap().analytic);

        let sbar = toeplitz_from_symbol(&LaurentSeries::monomial(-1, one()), 8).unwrap();
        let r = analyticity_test(&sbar, &probes[..1], 1e-10).unwrap();
        assert!(!r.analytic);
        assert_eq!(r.values[0].1, one());

        let id = TruncatedOperator::identity(8).unwrap();
        assert!(analyticity_test(&id, &probes, 1e-10).unwrap().analytic);
        assert!(matches!(
            analyticity_test(&id, &[Probe::monomial(7)], 1e-10),
            Err(HardyError::ProbeTooDeep { .. })
        ));
    }

    #[test]
    fn extension_examples() {
        let t = toeplitz_from_symbol(&sample_symbol(), 32).unwrap();
        let f = HardyCoeffs::from_real(&[2.0, 1.0]).unwrap();
        let polys: Vec<_> = (0..3).map(HardyCoeffs::monomial).collect();
        let g = CircleGrid::new(64).unwrap();
        let r = extension_agreement(&t, &f, &polys, &g, 8, 1e-9).unwrap();
        assert!(r.all_passed(), "{r:?}");
        assert_eq!(r.rows[2].band, (0, 31));

        let id = TruncatedOperator::identity(16).unwrap();
        let r = extension_agreement(&id, &f, &polys, &g, 4, 0.0).unwrap();
        assert_eq!(r.max_deviation(), 0.0);

        assert!(matches!(
            extension_agreement(&id, &HardyCoeffs::zeros(1), &polys, &g, 4, 0.0),
            Err(HardyError::InsufficientMask { .. })
        ));
    }

    #[test]
    fn extension_band_shrinks_for_shallow_depth() {
        let t = toeplitz_from_symbol(&sample_symbol(), 16).unwrap();
        let f = HardyCoeffs::one();
        let g = CircleGrid::new(64).unwrap();
        let r = extension_agreement(&t, &f, &[HardyCoeffs::monomial(3)], &g, 1, 1e-12).unwrap();
        assert_eq!(r.rows[0].band, (2, 15));
        assert!(r.all_passed());
    }

    #[test]
    fn stabilization_examples() {
        let t = toeplitz_from_symbol(&sample_symbol(), 24).unwrap();
        let f = HardyCoeffs::from_real(&[2.0, 1.0]).unwrap();
        let p = HardyCoeffs::from_real(&[1.0, -1.0, 0.5]).unwrap();
        let r = partial_stabilization(&t, &f, &p, 0..=10, 1e-12).unwrap();
        assert!(r.n_star <= 3);
        assert!(r.matches_apply);

        let r = partial_stabilization(&t, &f, &HardyCoeffs::one(), 0..=10, 1e-12).unwrap();
        assert!(r.n_star <= 1);

        // factorial matrix: the stabilized vector is recorded and compared to T(z^2)
        let fac = factorial_op(10);
        let z = HardyCoeffs::monomial(1);
        let r = partial_stabilization(&fac, &z, &z, 0..=6, 1e-9).unwrap();
        let direct = apply(&fac, &HardyCoeffs::monomial(2).resized(10));
        assert_eq!(r.n_star, 1);
        assert_eq!(&r.stabilized.coeffs()[..3], &[c(2.0, 0.0), one(), one()]);
        assert_eq!(&direct.coeffs()[..3], &[c(2.0, 0.0), one(), one()]);
        assert!(r.matches_apply);
    }

    #[test]
    fn stabilization_needs_room() {
        let t = TruncatedOperator::identity(4).unwrap();
        assert!(matches!(
            partial_stabilization(&t, &HardyCoeffs::monomial(3), &HardyCoeffs::one(), 0..=3, 0.0),
            Err(HardyError::ProbeTooDeep { .. })
        ));
    }
}
