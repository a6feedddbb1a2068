//! Numerical convergence verdicts for `sum a_n`.
//!
//! The test is a heuristic Cauchy criterion on partial sums. It never proves
//! convergence or divergence; `Inconclusive` is returned whenever neither
//! signal is clear.

use num_complex::Complex64;

use super::rules::{CoeffRule, Modulus, SharedRule};
use crate::error::{HardyError, Result};
use crate::numeric::ComplexCompensatedSum;

use std::sync::Arc;

pub const DEFAULT_K_MAX: u64 = 1 << 20;
pub const DEFAULT_WINDOW: usize = 8;
pub const DEFAULT_TAU: f64 = 1e-3;
/// Terms at least this large in the final doubling block count as not tending to 0.
pub const TERM_THRESHOLD: f64 = 1e-3;
/// Oscillation ratio between successive windows that counts as "not decreasing".
pub const STALL_RATIO: f64 = 0.9;
/// Number of consecutive window transitions that must stall.
pub const STALL_DOUBLINGS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainParams {
    pub k_max: u64,
    pub window: usize,
    pub tau: f64,
}

impl Default for DomainParams {
    fn default() -> Self {
        Self {
            k_max: DEFAULT_K_MAX,
            window: DEFAULT_WINDOW,
            tau: DEFAULT_TAU,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    InDomain,
    OutOfDomain,
    Inconclusive,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::InDomain => "in_domain",
            Decision::OutOfDomain => "out_of_domain",
            Decision::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DivergenceWitness {
    /// Window oscillation failed to shrink across successive doublings while
    /// the terms stayed large.
    StalledOscillation {
        /// `(k, oscillation of the window ending at k)`, oldest first.
        oscillations: Vec<(u64, f64)>,
        term_index: u64,
        term_magnitude: f64,
    },
    /// A partial sum left the finite range.
    Growth { index: u64, magnitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainVerdict {
    pub decision: Decision,
    /// `(k, S_k)` with `S_k = sum_{n<=k} a_n`, sampled at `k = 2^j`.
    pub partial_sums: Vec<(u64, Complex64)>,
    /// Diameter of the bounding box of every partial sum with index in the
    /// trailing window `[2^(J-W+1), 2^J]`.
    pub window_oscillation: f64,
    /// Window oscillation for each window end `2^j`, `j >= W - 1`.
    pub window_history: Vec<(u64, f64)>,
    /// `max |a_n|` over the final doubling block `(2^(J-1), 2^J]`.
    pub final_term_max: f64,
    pub final_term_index: u64,
    pub witness: Option<DivergenceWitness>,
    pub params: DomainParams,
}

#[derive(Debug, Clone, Copy)]
struct BoundingBox {
    lo: Complex64,
    hi: Complex64,
}

impl BoundingBox {
    fn at(z: Complex64) -> Self {
        Self { lo: z, hi: z }
    }

    fn include(&mut self, z: Complex64) {
        self.lo.re = self.lo.re.min(z.re);
        self.lo.im = self.lo.im.min(z.im);
        self.hi.re = self.hi.re.max(z.re);
        self.hi.im = self.hi.im.max(z.im);
    }

    fn union(mut self, other: &BoundingBox) -> Self {
        self.include(other.lo);
        self.include(other.hi);
        self
    }

    fn diameter(&self) -> f64 {
        (self.hi - self.lo).norm()
    }
}

/// Heuristic convergence test for `sum_n a_n`.
///
/// Partial sums are accumulated sequentially in increasing `n` up to
/// `2^J <= k_max`. The window oscillation is taken over every partial sum in
/// the trailing window, not only the sampled ones: sampling `S_{2^j}` alone
/// sees only even indices and misses parity-alternating divergence.
pub fn domain_membership(rule: &dyn CoeffRule, params: DomainParams) -> DomainVerdict {
    let window = params.window.max(2);
    let top = 63 - params.k_max.max(1).leading_zeros() as usize;

    // blocks[j] bounds S_k for k in [2^(j-1), 2^j] (block 0 is S_0..S_1).
    let mut blocks: Vec<BoundingBox> = Vec::with_capacity(top + 1);
    let mut term_max = vec![0.0f64; top + 1];
    let mut term_arg = vec![0u64; top + 1];
    let mut partial_sums = Vec::with_capacity(top + 1);
    let mut acc = ComplexCompensatedSum::new();
    let mut growth = None;

    let mut prev = Complex64::new(0.0, 0.0);
    for j in 0..=top {
        let start: u64 = if j == 0 { 0 } else { (1u64 << (j - 1)) + 1 };
        let end: u64 = 1u64 << j;
        let mut bbox = if j == 0 { None } else { Some(BoundingBox::at(prev)) };
        for n in start..=end {
            let a = rule.coeff(n);
            let mag = a.norm();
            if j > 0 && mag > term_max[j] {
                term_max[j] = mag;
                term_arg[j] = n;
            }
            acc.add(a);
            let s = acc.value();
            if growth.is_none() && !(s.re.is_finite() && s.im.is_finite()) {
                growth = Some(DivergenceWitness::Growth {
                    index: n,
                    magnitude: s.norm(),
                });
            }
            match bbox.as_mut() {
                Some(b) => b.include(s),
                None => bbox = Some(BoundingBox::at(s)),
            }
            prev = s;
        }
        blocks.push(bbox.expect("block is non-empty"));
        partial_sums.push((end, prev));
    }

    let first_end = (window - 1).min(top);
    let window_history: Vec<(u64, f64)> = (first_end..=top)
        .map(|j| {
            let lo = (j + 2).saturating_sub(window).max(if j == 0 { 0 } else { 1 });
            let bbox = blocks[lo..=j]
                .iter()
                .skip(1)
                .fold(blocks[lo], |acc, b| acc.union(b));
            (1u64 << j, bbox.diameter())
        })
        .collect();
    let window_oscillation = window_history.last().map_or(0.0, |w| w.1);
    let (final_term_max, final_term_index) = (term_max[top], term_arg[top]);

    let (decision, witness) = if let Some(w) = growth {
        (Decision::OutOfDomain, Some(w))
    } else if window_oscillation <= params.tau {
        (Decision::InDomain, None)
    } else {
        let stalled = window_history.len() > STALL_DOUBLINGS
            && window_history
                .windows(2)
                .rev()
                .take(STALL_DOUBLINGS)
                .all(|w| w[1].1 >= STALL_RATIO * w[0].1);
        if stalled && final_term_max >= TERM_THRESHOLD {
            let tail = &window_history[window_history.len() - STALL_DOUBLINGS - 1..];
            (
                Decision::OutOfDomain,
                Some(DivergenceWitness::StalledOscillation {
                    oscillations: tail.to_vec(),
                    term_index: final_term_index,
                    term_magnitude: final_term_max,
                }),
            )
        } else {
            (Decision::Inconclusive, None)
        }
    };

    DomainVerdict {
        decision,
        partial_sums,
        window_oscillation,
        window_history,
        final_term_max,
        final_term_index,
        witness,
        params,
    }
}

/// Closed forms for `gamma_n` that stay usable past `f64` overflow of the values.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaForm {
    Table(Vec<Complex64>),
    /// `gamma_n = n! * base^n`.
    FactorialPower { base: Complex64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSequence {
    pub form: GammaForm,
    /// Number of indices `n` for which the growth condition was checked.
    pub checked: usize,
    pub growth_ok: bool,
    /// First `n` with `|gamma_{n+1}| <= (n+1) |gamma_n|`.
    pub first_violation: Option<usize>,
    /// Whether every checked index satisfies the non-strict `>=` version.
    pub boundary_ok: bool,
}

/// Growth is checked on this many indices for closed forms.
pub const GAMMA_CHECK_LEN: usize = 64;

impl GammaSequence {
    pub fn table(values: Vec<Complex64>) -> Self {
        let checked = values.len().saturating_sub(1);
        Self::checked(GammaForm::Table(values), checked)
    }

    /// `gamma_n = n!`, built by iterated multiplication so successive ratios are exact.
    pub fn factorial_table(len: usize) -> Self {
        let mut values = Vec::with_capacity(len);
        let mut cur = 1.0f64;
        for n in 0..len {
            if n > 0 {
                cur *= n as f64;
            }
            values.push(Complex64::new(cur, 0.0));
        }
        Self::table(values)
    }

    pub fn factorial_power(base: Complex64) -> Self {
        Self::checked(GammaForm::FactorialPower { base }, GAMMA_CHECK_LEN)
    }

    fn checked(form: GammaForm, checked: usize) -> Self {
        let mut s = Self {
            form,
            checked,
            growth_ok: true,
            first_violation: None,
            boundary_ok: true,
        };
        for n in 0..checked {
            let lhs = s.ratio(n as u64 + 1).map(|r| r.norm());
            let need = (n + 1) as f64;
            let (strict, weak) = match lhs {
                Some(r) => (r > need, r >= need),
                None => (false, false),
            };
            if !strict && s.first_violation.is_none() {
                s.first_violation = Some(n);
                s.growth_ok = false;
            }
            if !weak {
                s.boundary_ok = false;
            }
        }
        s
    }

    pub fn value(&self, n: u64) -> Option<Complex64> {
        match &self.form {
            GammaForm::Table(v) => usize::try_from(n).ok().and_then(|i| v.get(i).copied()),
            GammaForm::FactorialPower { base } => {
                let mut acc = Complex64::new(1.0, 0.0);
                for i in 1..=n {
                    acc *= base * i as f64;
                }
                Some(acc)
            }
        }
    }

    /// `gamma_n / gamma_{n-1}` for `n >= 1`, `None` outside a table or on a zero entry.
    pub fn ratio(&self, n: u64) -> Option<Complex64> {
        if n == 0 {
            return None;
        }
        match &self.form {
            GammaForm::Table(v) => {
                let hi = *v.get(usize::try_from(n).ok()?)?;
                let lo = v[(n - 1) as usize];
                (lo != Complex64::new(0.0, 0.0)).then(|| hi / lo)
            }
            GammaForm::FactorialPower { base } => Some(base * n as f64),
        }
    }

    /// First `len` values, for building a matrix realization.
    pub fn values(&self, len: usize) -> Vec<Complex64> {
        (0..len as u64)
            .map(|n| self.value(n).unwrap_or(Complex64::new(0.0, 0.0)))
            .collect()
    }

    pub fn label(&self) -> String {
        match &self.form {
            GammaForm::Table(v) => format!("table[{}]", v.len()),
            GammaForm::FactorialPower { base } if *base == Complex64::new(1.0, 0.0) => "n!".into(),
            GammaForm::FactorialPower { base } => format!("n!*({base})^n"),
        }
    }
}

/// Sufficient-condition domain test for upper-triangular operators with
/// entries `gamma_{j-m}`: `InDomain` when `sum |a_n|` passes the Cauchy
/// heuristic, `Inconclusive` otherwise. Never returns `OutOfDomain`.
///
/// The strict growth condition is required; `allow_boundary` accepts the
/// equality case `|gamma_{n+1}| = (n+1) |gamma_n|` instead.
pub fn gamma_domain_membership(
    gamma: &GammaSequence,
    rule: SharedRule,
    params: DomainParams,
    allow_boundary: bool,
) -> Result<DomainVerdict> {
    if !gamma.growth_ok && !(allow_boundary && gamma.boundary_ok) {
        return Err(HardyError::GrowthViolation {
            index: gamma.first_violation.unwrap_or(0),
        });
    }
    let abs: SharedRule = Arc::new(Modulus(rule));
    let mut v = domain_membership(abs.as_ref(), params);
    if v.decision != Decision::InDomain {
        v.decision = Decision::Inconclusive;
        v.witness = None;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unbounded::rules::{shift_rule, AlternatingHarmonic, Delta, Geometric, Zero};

    fn small() -> DomainParams {
        DomainParams {
            k_max: 1 << 14,
            ..DomainParams::default()
        }
    }

    #[test]
    fn convergent_examples() {
        let v = domain_membership(&AlternatingHarmonic, DomainParams::default());
        assert_eq!(v.decision, Decision::InDomain);
        assert!(v.window_oscillation <= v.params.tau);
        let s = v.partial_sums.last().unwrap().1;
        assert!((s.re + std::f64::consts::LN_2).abs() < 1e-6);
        assert_eq!(v.partial_sums.len(), 21);

        let v = domain_membership(&Geometric { ratio: 0.5 }, small());
        assert_eq!(v.decision, Decision::InDomain);
        assert_eq!(domain_membership(&Zero, small()).decision, Decision::InDomain);
        assert_eq!(domain_membership(&Delta::unit(3), small()).decision, Decision::InDomain);
    }

    #[test]
    fn shifted_alternating_harmonic_diverges() {
        let v = domain_membership(shift_rule(Arc::new(AlternatingHarmonic)).as_ref(), small());
        assert_eq!(v.decision, Decision::OutOfDomain);
        match v.witness {
            Some(DivergenceWitness::StalledOscillation { term_magnitude, ref oscillations, .. }) => {
                assert!(term_magnitude >= 1.0);
                assert_eq!(oscillations.len(), STALL_DOUBLINGS + 1);
            }
            ref w => panic!("unexpected witness {w:?}"),
        }
    }

    #[derive(Debug)]
    struct Harmonic;
    impl CoeffRule for Harmonic {
        fn name(&self) -> String {
            "harmonic".into()
        }
        fn coeff(&self, n: u64) -> Complex64 {
            Complex64::new(if n == 0 { 0.0 } else { 1.0 / n as f64 }, 0.0)
        }
    }

    #[test]
    fn slow_divergence_is_inconclusive() {
        let v = domain_membership(&Harmonic, small());
        assert_eq!(v.decision, Decision::Inconclusive);
        assert!(v.witness.is_none());
    }

    #[test]
    fn overflow_is_growth_witness() {
        let v = domain_membership(&Geometric { ratio: 10.0 }, small());
        assert_eq!(v.decision, Decision::OutOfDomain);
        assert!(matches!(v.witness, Some(DivergenceWitness::Growth { .. })));
    }

    #[test]
    fn gamma_growth_checks() {
        let g = GammaSequence::factorial_power(Complex64::new(2.0, 0.0));
        assert!(g.growth_ok);
        let v = gamma_domain_membership(&g, Arc::new(Geometric { ratio: 0.5 }), small(), false).unwrap();
        assert_eq!(v.decision, Decision::InDomain);
        let v = gamma_domain_membership(&g, Arc::new(AlternatingHarmonic), small(), false).unwrap();
        assert_eq!(v.decision, Decision::Inconclusive);

        let f = GammaSequence::factorial_table(20);
        assert!(!f.growth_ok);
        assert!(f.boundary_ok);
        assert_eq!(f.first_violation, Some(0));
        assert!(matches!(
            gamma_domain_membership(&f, Arc::new(Zero), small(), false),
            Err(HardyError::GrowthViolation { index: 0 })
        ));
        assert!(gamma_domain_membership(&f, Arc::new(Zero), small(), true).is_ok());
        assert!(!GammaSequence::factorial_power(Complex64::new(1.0, 0.0)).growth_ok);
        assert_eq!(f.value(5), Some(Complex64::new(120.0, 0.0)));
        assert_eq!(g.ratio(3), Some(Complex64::new(6.0, 0.0)));
    }
}
