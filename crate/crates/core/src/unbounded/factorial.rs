//! The upper-triangular operator with entries `(j-m)!`, applied through
//! normalized coefficients `f = sum a_n z^n / n!`:
//! `d_m = sum_{n>=0} a_{n+m} / ((n+1)(n+2)...(n+m))`.

use num_complex::Complex64;

use super::domain::{domain_membership, Decision, DomainParams, DomainVerdict};
use super::rules::CoeffRule;
use crate::error::{HardyError, Result};
use crate::numeric::{ComplexCompensatedSum, CompensatedSum};

/// `(n+1)(n+2)...(n+m)`.
pub fn rising(n: u64, m: u64) -> f64 {
    (1..=m).fold(1.0, |acc, i| acc * (n + i) as f64)
}

fn sup_abs(rule: &dyn CoeffRule, from: u64, to: u64) -> f64 {
    (from..=to).map(|n| rule.coeff(n).norm()).fold(0.0, f64::max)
}

/// Integral majorant of `sum_{n>k} (n+1)^{-m}` for `m >= 2`.
fn power_tail(k: u64, m: u64) -> f64 {
    ((k + 1) as f64).powf(1.0 - m as f64) / (m - 1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Partial {
    value: Complex64,
    last_index: u64,
    tail: f64,
}

/// Sum `a_{n+m} / rising(n, m)` for `n` from `n0` upward, sequentially.
///
/// For `m >= 2` the loop stops early once the majorant `sup * tail(n, m)`
/// falls below half an ulp of the running sum; that term bound is then the
/// reported tail.
fn tail_sum(rule: &dyn CoeffRule, m: u64, n0: u64, k_max: u64, sup: f64) -> Partial {
    let mut acc = ComplexCompensatedSum::new();
    let mut n = n0;
    while n <= k_max {
        acc.add(rule.coeff(n + m) / rising(n, m));
        if m >= 2 {
            let bound = sup * power_tail(n, m);
            if bound <= f64::EPSILON * 0.5 * acc.value().norm() || bound == 0.0 {
                return Partial {
                    value: acc.value(),
                    last_index: n,
                    tail: bound,
                };
            }
        }
        n += 1;
    }
    let last = k_max.max(n0);
    Partial {
        value: acc.value(),
        last_index: last,
        tail: if m >= 2 { sup * power_tail(last, m) } else { f64::NAN },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorialImage {
    /// `d_0..=d_{m_max}`.
    pub d: Vec<Complex64>,
    /// Truncation-tail estimate per `d_m`.
    pub tail: Vec<f64>,
    /// Last summation index used per `d_m`.
    pub terms_used: Vec<u64>,
    /// `sup |a_n|` over `n <= k_max + m_max`.
    pub sup_a: f64,
    pub verdict: DomainVerdict,
}

/// Coefficients `d_m` of `T f` for `m <= m_max`.
///
/// Refuses when `sum a_n` is judged out of the domain. Tail estimates: for
/// `m = 0` the final window oscillation, for `m = 1` that oscillation over
/// `k_max + 2` (summation by parts), for `m >= 2` the power majorant.
pub fn factorial_apply(rule: &dyn CoeffRule, m_max: u64, params: DomainParams) -> Result<FactorialImage> {
    let verdict = domain_membership(rule, params);
    if verdict.decision == Decision::OutOfDomain {
        return Err(HardyError::DomainRefused);
    }
    let k_max = params.k_max;
    let sup_a = sup_abs(rule, 0, k_max.saturating_add(m_max));
    let mut d = Vec::with_capacity(m_max as usize + 1);
    let mut tail = Vec::with_capacity(m_max as usize + 1);
    let mut terms_used = Vec::with_capacity(m_max as usize + 1);
    for m in 0..=m_max {
        let p = tail_sum(rule, m, 0, k_max, sup_a);
        d.push(p.value);
        terms_used.push(p.last_index);
        tail.push(match m {
            0 => verdict.window_oscillation,
            1 => verdict.window_oscillation / (k_max + 2) as f64,
            _ => p.tail,
        });
    }
    Ok(FactorialImage {
        d,
        tail,
        terms_used,
        sup_a,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitTerm {
    /// `a_m / m!`.
    pub s: Complex64,
    /// `sum_{n>=1} a_{n+m} / rising(n, m)`.
    pub t: Complex64,
    /// `sup_{n>m} |a_n| * c_m`, for `m >= 2`.
    pub t_bound: Option<f64>,
}

/// Split of `d_m` into its leading term and remainder. Panics if `m == 0`.
pub fn split_d_m(rule: &dyn CoeffRule, m: u64, k_max: u64) -> SplitTerm {
    assert!(m >= 1, "split_d_m needs m >= 1");
    let sup = sup_abs(rule, m + 1, k_max.saturating_add(m));
    let t = tail_sum(rule, m, 1, k_max, sup).value;
    let s = rule.coeff(m) / rising(0, m);
    let t_bound = (m >= 2).then(|| sup * c_m(m, DEFAULT_CM_TAIL_TOL).value);
    SplitTerm { s, t, t_bound }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmValue {
    pub value: f64,
    /// Number of summed terms `n = 1..=terms`.
    pub terms: u64,
}

/// `c_m = sum_{n>=1} (n+1)^{-m}`, summed until the integral tail bound is
/// below `tail_tol`, plus an Euler-Maclaurin estimate of the remainder.
pub fn c_m(m: u64, tail_tol: f64) -> CmValue {
    assert!(m >= 2, "c_m needs m >= 2");
    let mut acc = CompensatedSum::new();
    let mut k = 0u64;
    let mf = m as f64;
    loop {
        k += 1;
        acc.add(((k + 1) as f64).powf(-mf));
        if power_tail(k, m) < tail_tol {
            break;
        }
    }
    // sum_{x>=a} x^{-m} with a = k + 2.
    let a = (k + 2) as f64;
    let em = a.powf(1.0 - mf) / (mf - 1.0) + 0.5 * a.powf(-mf) + mf * a.powf(-mf - 1.0) / 12.0
        - mf * (mf + 1.0) * (mf + 2.0) * a.powf(-mf - 3.0) / 720.0;
    acc.add(em);
    CmValue {
        value: acc.value(),
        terms: k,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmRow {
    pub m: u64,
    pub c_m: f64,
    pub bound: f64,
    pub terms: u64,
    /// `sum_{j=2}^{m} c_j^2`.
    pub cumulative_sq: f64,
    pub bound_ok: bool,
}

pub const DEFAULT_CM_TAIL_TOL: f64 = 1e-6;

pub fn c_m_table(m_max: u64, tail_tol: f64) -> Vec<CmRow> {
    let mut cumulative = CompensatedSum::new();
    (2..=m_max)
        .map(|m| {
            let c = c_m(m, tail_tol);
            cumulative.add(c.value * c.value);
            let bound = 1.0 / (m - 1) as f64;
            CmRow {
                m,
                c_m: c.value,
                bound,
                terms: c.terms,
                cumulative_sq: cumulative.value(),
                bound_ok: c.value <= bound,
            }
        })
        .collect()
}
