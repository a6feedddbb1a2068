//! Reproducing kernels of H^2 and the Berezin transform of truncated operators.
//!
//! The transform is evaluated in the direct form `(1 - |w|^2) <T k_w, k_w>`.
//! This equals `(1 - |w|^2) <k_w, T* k_w>` by the adjoint pairing, so no
//! separate adjoint path exists.
//!
//! Kernel powers, `T k_w` and the pairing are accumulated in double-double
//! arithmetic and rounded once at the end. The truncation error of an analytic
//! symbol is `O(|w|^{2N})`, far below one ulp, so a single final rounding is
//! what lets the computed value land on `phi(w)` itself.

use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;

use crate::circle_fourier::HardyCoeffs;
use crate::error::{HardyError, Result};
use crate::hardy_ops::TruncatedOperator;

type Dd = Complex<TwoFloat>;

fn dd(z: Complex64) -> Dd {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

fn round(z: Dd) -> Complex64 {
    Complex64::new(f64::from(z.re), f64::from(z.im))
}

/// `w^k` with one final rounding.
pub fn power_dd(w: Complex64, k: u32) -> Complex64 {
    let w = dd(w);
    let mut acc = dd(Complex64::new(1.0, 0.0));
    for _ in 0..k {
        acc = acc * w;
    }
    round(acc)
}

/// Radii of the radial diagnostic sweep. No limit is extrapolated from them.
pub const DIAGNOSTIC_RADII: [f64; 3] = [0.5, 0.7, 0.9];

/// Truncated kernel `k_w = sum_{n<N} conj(w)^n z^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelVector {
    pub w: Complex64,
    pub coeffs: HardyCoeffs,
    /// `||k_w - truncation||^2 = |w|^{2N} / (1 - |w|^2)`.
    pub tail_norm_sqr: f64,
}

fn check_disk(w: Complex64) -> Result<()> {
    if !(w.norm() < 1.0) {
        return Err(HardyError::DiskViolation { re: w.re, im: w.im });
    }
    Ok(())
}

pub fn kernel_at(w: Complex64, n: usize) -> Result<KernelVector> {
    check_disk(w)?;
    let n = n.max(1);
    let wc = w.conj();
    let mut coeffs = Vec::with_capacity(n);
    let mut cur = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        coeffs.push(cur);
        cur *= wc;
    }
    let r2 = w.norm_sqr();
    Ok(KernelVector {
        w,
        coeffs: HardyCoeffs::new(coeffs).expect("n >= 1"),
        tail_norm_sqr: r2.powi(n as i32) / (1.0 - r2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerezinValue {
    pub w: Complex64,
    pub value: Complex64,
    /// `(1 - |w|^2) * tail_norm_sqr = |w|^{2N}`: the identity operator's
    /// truncation error, and the scale of the kernel tail.
    pub tail_bound: f64,
}

/// Groups the pairing by diagonal: `<T k_w, k_w> = sum_d c_d w^d` with
/// `c_d = sum_s A[s+d][s] |w|^{2s}` and `w^d` read as `conj(w)^{-d}` for
/// `d < 0`. The weights are real, so each component keeps its relative
/// accuracy.
pub fn berezin_transform(t: &TruncatedOperator, w: Complex64) -> Result<BerezinValue> {
    let k = kernel_at(w, t.dim())?;
    let n = t.dim();
    let zero = dd(Complex64::new(0.0, 0.0));
    let w_dd = dd(w);
    let r2 = TwoFloat::new_mul(w.re, w.re) + TwoFloat::new_mul(w.im, w.im);
    let mut radial = Vec::with_capacity(n);
    let mut cur = TwoFloat::from(1.0);
    for _ in 0..n {
        radial.push(cur);
        cur = cur * r2;
    }
    let mut pairing = zero;
    let mut power = dd(Complex64::new(1.0, 0.0));
    for d in 0..n {
        let (mut below, mut above) = (zero, zero);
        for s in 0..n - d {
            let a = t.entry(s + d, s);
            if a != Complex64::new(0.0, 0.0) {
                below = below + dd(a).scale(radial[s]);
            }
            if d > 0 {
                let a = t.entry(s, s + d);
                if a != Complex64::new(0.0, 0.0) {
                    above = above + dd(a).scale(radial[s]);
                }
            }
        }
        pairing = pairing + below * power + above * power.conj();
        power = power * w_dd;
    }
    let scale = TwoFloat::from(1.0) - r2;
    Ok(BerezinValue {
        w,
        value: round(pairing.scale(scale)),
        tail_bound: f64::from(scale) * k.tail_norm_sqr,
    })
}

/// `count` equally spaced points on the circle of radius `r`, starting at angle 0.
pub fn circle_points(r: f64, count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|j| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / count as f64))
        .collect()
}

/// Berezin values on circles of the diagnostic radii.
pub fn radial_sweep(t: &TruncatedOperator, count: usize) -> Result<Vec<BerezinValue>> {
    DIAGNOSTIC_RADII
        .iter()
        .flat_map(|&r| circle_points(r, count))
        .map(|w| berezin_transform(t, w))
        .collect()
}
