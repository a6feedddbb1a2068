//! Operator families behind a common interface, selectable by name, and the
//! three-condition probe run against any of them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::domain::{domain_membership, gamma_domain_membership, Decision, DomainParams, GammaSequence};
use super::rules::{coshift_rule, shift_rule, AlternatingHarmonic, CoeffRule, Geometric, SharedRule};
use super::smirnov::smirnov_domain_test;
use crate::circle_fourier::{multiply_hardy, CircleGrid, HardyCoeffs, LaurentSeries};
use crate::error::{HardyError, Result};
use crate::hardy_ops::{gamma_upper_triangular, is_toeplitz_algebraic, toeplitz_from_symbol, SymbolSpec, TruncatedOperator};

#[derive(Debug, Clone)]
pub enum SampleRepr {
    /// Ordinary Taylor coefficients of a polynomial.
    Polynomial(HardyCoeffs),
    /// Coefficient rule in the family's own normalization `a_n z^n / gamma_n`.
    Normalized(SharedRule),
}

#[derive(Debug, Clone)]
pub struct DomainSample {
    pub label: String,
    pub repr: SampleRepr,
}

impl DomainSample {
    pub fn polynomial(label: impl Into<String>, p: HardyCoeffs) -> Self {
        Self {
            label: label.into(),
            repr: SampleRepr::Polynomial(p),
        }
    }

    pub fn rule(rule: SharedRule) -> Self {
        Self {
            label: rule.name(),
            repr: SampleRepr::Normalized(rule),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Member,
    NonMember,
    Unknown,
}

impl Membership {
    pub fn as_str(self) -> &'static str {
        match self {
            Membership::Member => "member",
            Membership::NonMember => "non_member",
            Membership::Unknown => "unknown",
        }
    }
}

impl From<Decision> for Membership {
    fn from(d: Decision) -> Self {
        match d {
            Decision::InDomain => Membership::Member,
            Decision::OutOfDomain => Membership::NonMember,
            Decision::Inconclusive => Membership::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipResult {
    pub membership: Membership,
    pub detail: String,
}

/// Normalization `f = sum a_n z^n / gamma_n` used for rule samples.
#[derive(Debug, Clone)]
pub enum Normalization {
    Unit,
    Factorial,
    Gamma(GammaSequence),
}

impl Normalization {
    /// `gamma_n / gamma_{n-1}`.
    fn ratio(&self, n: u64) -> Option<Complex64> {
        match self {
            Normalization::Unit => Some(Complex64::new(1.0, 0.0)),
            Normalization::Factorial => Some(Complex64::new(n as f64, 0.0)),
            Normalization::Gamma(g) => g.ratio(n),
        }
    }
}

/// Rule of `z f` (`up`) or `S* f` under a general normalization.
#[derive(Clone)]
struct NormalizedShift {
    inner: SharedRule,
    norm: Normalization,
    up: bool,
}

impl fmt::Debug for NormalizedShift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl CoeffRule for NormalizedShift {
    fn name(&self) -> String {
        format!("{}({})", if self.up { "shift" } else { "coshift" }, self.inner.name())
    }

    fn coeff(&self, n: u64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        if self.up {
            if n == 0 {
                return zero;
            }
            self.norm.ratio(n).map_or(zero, |r| self.inner.coeff(n - 1) * r)
        } else {
            self.norm.ratio(n + 1).map_or(zero, |r| self.inner.coeff(n + 1) / r)
        }
    }
}

/// A densely defined operator family with a membership oracle and a matrix
/// realization at truncation.
pub trait OperatorFamily: Send + Sync {
    fn name(&self) -> &'static str;
    fn normalization(&self) -> Normalization;
    fn realize(&self, n: usize) -> Result<TruncatedOperator>;
    fn default_samples(&self) -> Vec<DomainSample>;
    fn membership(&self, f: &DomainSample) -> Result<MembershipResult>;

    fn shift(&self, f: &DomainSample) -> DomainSample {
        match &f.repr {
            SampleRepr::Polynomial(p) => DomainSample::polynomial(format!("z*({})", f.label), p.shifted_up(1)),
            SampleRepr::Normalized(r) => DomainSample::rule(match self.normalization() {
                Normalization::Factorial => shift_rule(r.clone()),
                norm => Arc::new(NormalizedShift {
                    inner: r.clone(),
                    norm,
                    up: true,
                }),
            }),
        }
    }

    fn co_shift(&self, f: &DomainSample) -> DomainSample {
        match &f.repr {
            SampleRepr::Polynomial(p) => DomainSample::polynomial(format!("S*({})", f.label), p.co_shifted()),
            SampleRepr::Normalized(r) => DomainSample::rule(match self.normalization() {
                Normalization::Factorial => coshift_rule(r.clone()),
                norm => Arc::new(NormalizedShift {
                    inner: r.clone(),
                    norm,
                    up: false,
                }),
            }),
        }
    }

    fn vanishes_at_origin(&self, f: &DomainSample) -> bool {
        match &f.repr {
            SampleRepr::Polynomial(p) => p.value_at_origin() == Complex64::new(0.0, 0.0),
            SampleRepr::Normalized(r) => r.coeff(0) == Complex64::new(0.0, 0.0),
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn poly(coeffs: &[f64]) -> HardyCoeffs {
    HardyCoeffs::from_real(coeffs).expect("non-empty")
}

/// Toeplitz operator with a trigonometric-polynomial symbol: every
/// polynomial lies in the domain.
pub struct ToeplitzMatrixFamily {
    pub symbol: LaurentSeries,
}

impl Default for ToeplitzMatrixFamily {
    fn default() -> Self {
        Self {
            symbol: LaurentSeries::from_pairs(&[(-1, c(1.0, 0.0)), (0, c(1.0, 0.0)), (1, c(0.5, 0.0))])
                .expect("valid pairs"),
        }
    }
}

impl OperatorFamily for ToeplitzMatrixFamily {
    fn name(&self) -> &'static str {
        "toeplitz_matrix"
    }
    fn normalization(&self) -> Normalization {
        Normalization::Unit
    }
    fn realize(&self, n: usize) -> Result<TruncatedOperator> {
        toeplitz_from_symbol(&self.symbol, n)
    }
    fn default_samples(&self) -> Vec<DomainSample> {
        vec![
            DomainSample::polynomial("1", poly(&[1.0])),
            DomainSample::polynomial("1+z", poly(&[1.0, 1.0])),
            DomainSample::polynomial("z^2", HardyCoeffs::monomial(2)),
        ]
    }
    fn membership(&self, f: &DomainSample) -> Result<MembershipResult> {
        Ok(match f.repr {
            SampleRepr::Polynomial(_) => MembershipResult {
                membership: Membership::Member,
                detail: "bounded symbol: every polynomial is in the domain".into(),
            },
            SampleRepr::Normalized(_) => MembershipResult {
                membership: Membership::Unknown,
                detail: "rule samples are not tested for this family".into(),
            },
        })
    }
}

fn polynomial_member() -> MembershipResult {
    MembershipResult {
        membership: Membership::Member,
        detail: "polynomial".into(),
    }
}

/// Upper-triangular operator with entries `(j-m)!`.
#[derive(Default)]
pub struct FactorialFamily {
    pub params: DomainParams,
}

impl OperatorFamily for FactorialFamily {
    fn name(&self) -> &'static str {
        "factorial"
    }
    fn normalization(&self) -> Normalization {
        Normalization::Factorial
    }
    fn realize(&self, n: usize) -> Result<TruncatedOperator> {
        gamma_upper_triangular(&GammaSequence::factorial_table(n).values(n), n)
    }
    fn default_samples(&self) -> Vec<DomainSample> {
        vec![
            DomainSample::rule(Arc::new(AlternatingHarmonic)),
            DomainSample::rule(Arc::new(Geometric { ratio: 0.5 })),
            DomainSample::polynomial("1+z", poly(&[1.0, 1.0])),
        ]
    }
    fn membership(&self, f: &DomainSample) -> Result<MembershipResult> {
        Ok(match &f.repr {
            SampleRepr::Polynomial(_) => polynomial_member(),
            SampleRepr::Normalized(r) => {
                let v = domain_membership(r.as_ref(), self.params);
                MembershipResult {
                    membership: v.decision.into(),
                    detail: format!(
                        "{}: window oscillation {:e}, max |a_n| in final block {:e} at n = {}",
                        v.decision.as_str(),
                        v.window_oscillation,
                        v.final_term_max,
                        v.final_term_index
                    ),
                }
            }
        })
    }
}

/// Upper-triangular operator with entries `gamma_{j-m}`; membership is the
/// sufficient condition `sum |a_n| < inf` only.
pub struct GammaFamily {
    pub gamma: GammaSequence,
    pub params: DomainParams,
    pub allow_boundary: bool,
}

impl Default for GammaFamily {
    fn default() -> Self {
        Self {
            gamma: GammaSequence::factorial_power(c(2.0, 0.0)),
            params: DomainParams::default(),
            allow_boundary: false,
        }
    }
}

impl OperatorFamily for GammaFamily {
    fn name(&self) -> &'static str {
        "gamma"
    }
    fn normalization(&self) -> Normalization {
        Normalization::Gamma(self.gamma.clone())
    }
    fn realize(&self, n: usize) -> Result<TruncatedOperator> {
        gamma_upper_triangular(&self.gamma.values(n), n)
    }
    fn default_samples(&self) -> Vec<DomainSample> {
        vec![
            DomainSample::rule(Arc::new(Geometric { ratio: 0.5 })),
            DomainSample::rule(Arc::new(AlternatingHarmonic)),
            DomainSample::polynomial("z", HardyCoeffs::monomial(1)),
        ]
    }
    fn membership(&self, f: &DomainSample) -> Result<MembershipResult> {
        Ok(match &f.repr {
            SampleRepr::Polynomial(_) => polynomial_member(),
            SampleRepr::Normalized(r) => {
                let v = gamma_domain_membership(&self.gamma, r.clone(), self.params, self.allow_boundary)?;
                MembershipResult {
                    membership: v.decision.into(),
                    detail: format!(
                        "{} (sufficient condition only): oscillation of sum |a_n| {:e}",
                        v.decision.as_str(),
                        v.window_oscillation
                    ),
                }
            }
        })
    }
}

/// Analytic multiplication by `b / a`.
pub struct SmirnovFamily {
    pub b: HardyCoeffs,
    pub a: HardyCoeffs,
    pub grid: CircleGrid,
    pub eps_zero: f64,
    pub bound: Option<f64>,
}

impl Default for SmirnovFamily {
    fn default() -> Self {
        Self {
            b: HardyCoeffs::new(vec![c(0.2, 0.0), c(0.0, 0.3)]).expect("non-empty"),
            a: poly(&[0.5, -0.25]),
            grid: CircleGrid::new(1024).expect("nonzero"),
            eps_zero: 1e-9,
            bound: None,
        }
    }
}

impl OperatorFamily for SmirnovFamily {
    fn name(&self) -> &'static str {
        "smirnov"
    }
    fn normalization(&self) -> Normalization {
        Normalization::Unit
    }
    fn realize(&self, n: usize) -> Result<TruncatedOperator> {
        SymbolSpec::SmirnovRatio {
            b: self.b.clone(),
            a: self.a.clone(),
        }
        .realize(n)
    }
    fn default_samples(&self) -> Vec<DomainSample> {
        let mut out: Vec<DomainSample> = (0..3)
            .map(|k| DomainSample::polynomial(format!("a*z^{k}"), multiply_hardy(&self.a, &HardyCoeffs::monomial(k))))
            .collect();
        out.push(DomainSample::polynomial("a*(1+z)", multiply_hardy(&self.a, &poly(&[1.0, 1.0]))));
        out
    }
    fn membership(&self, f: &DomainSample) -> Result<MembershipResult> {
        Ok(match &f.repr {
            SampleRepr::Polynomial(p) => {
                let r = smirnov_domain_test(&LaurentSeries::from(&self.b), &self.a, p, &self.grid, self.eps_zero, self.bound, false)?;
                MembershipResult {
                    membership: if r.member { Membership::Member } else { Membership::NonMember },
                    detail: format!("grid norm of phi*f {:e}", r.grid_norm),
                }
            }
            SampleRepr::Normalized(_) => MembershipResult {
                membership: Membership::Unknown,
                detail: "rule samples are not tested for this family".into(),
            },
        })
    }
}

type FamilyConstructor = fn() -> Box<dyn OperatorFamily>;

fn family_registry() -> BTreeMap<&'static str, FamilyConstructor> {
    let mut m: BTreeMap<&'static str, FamilyConstructor> = BTreeMap::new();
    m.insert("toeplitz_matrix", || Box::new(ToeplitzMatrixFamily::default()));
    m.insert("factorial", || Box::new(FactorialFamily::default()));
    m.insert("gamma", || Box::new(GammaFamily::default()));
    m.insert("smirnov", || Box::new(SmirnovFamily::default()));
    m
}

/// Name-based construction of the built-in families with default parameters.
pub struct FamilyRegistry;

impl FamilyRegistry {
    pub fn construct(name: &str) -> Result<Box<dyn OperatorFamily>> {
        let name = if name == "toeplitz" { "toeplitz_matrix" } else { name };
        family_registry()
            .get(name)
            .map(|f| f())
            .ok_or_else(|| HardyError::UnknownName {
                kind: "operator family",
                name: name.to_string(),
            })
    }

    pub fn names() -> Vec<&'static str> {
        family_registry().into_keys().collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionWitness {
    pub sample: String,
    pub image: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResult {
    pub label: &'static str,
    pub passed: bool,
    pub checked: usize,
    /// Images whose membership could not be decided.
    pub unknown: usize,
    pub witnesses: Vec<ConditionWitness>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SarasonReport {
    pub family: &'static str,
    pub n: usize,
    /// Samples not confirmed to lie in the domain, with their membership.
    pub skipped: Vec<(String, Membership)>,
    pub conditions: [ConditionResult; 3],
}

impl SarasonReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }
}

fn image_condition(
    family: &dyn OperatorFamily,
    members: &[&DomainSample],
    label: &'static str,
    image: impl Fn(&DomainSample) -> Option<DomainSample>,
) -> Result<ConditionResult> {
    let mut checked = 0;
    let mut unknown = 0;
    let mut witnesses = Vec::new();
    for f in members {
        let Some(g) = image(f) else { continue };
        checked += 1;
        let m = family.membership(&g)?;
        match m.membership {
            Membership::Member => {}
            Membership::Unknown => unknown += 1,
            Membership::NonMember => witnesses.push(ConditionWitness {
                sample: f.label.clone(),
                image: g.label.clone(),
                detail: m.detail,
            }),
        }
    }
    Ok(ConditionResult {
        label,
        passed: witnesses.is_empty(),
        checked,
        unknown,
        detail: format!("{checked} images checked, {unknown} undecided"),
        witnesses,
    })
}

/// Checks, on the supplied samples: (1) `z f` stays in the domain, (2) the
/// truncated matrix satisfies `S* T S = T`, (3) `S* f` stays in the domain
/// when `f(0) = 0`. Samples that are not confirmed members are skipped.
pub fn sarason_conditions_probe(family: &dyn OperatorFamily, samples: &[DomainSample], n: usize) -> Result<SarasonReport> {
    let mut members = Vec::new();
    let mut skipped = Vec::new();
    for f in samples {
        let m = family.membership(f)?.membership;
        if m == Membership::Member {
            members.push(f);
        } else {
            skipped.push((f.label.clone(), m));
        }
    }

    let shift = image_condition(family, &members, "shift_invariant_domain", |f| Some(family.shift(f)))?;

    let t = family.realize(n)?;
    let scale = t.entries().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let check = is_toeplitz_algebraic(&t, 1e-12 * scale);
    let mut algebraic = ConditionResult {
        label: "compression_identity",
        passed: check.is_toeplitz,
        checked: 1,
        unknown: 0,
        witnesses: Vec::new(),
        detail: format!("max |A[m+1][n+1] - A[m][n]| = {:e} at N = {n}", check.max_deviation),
    };
    if !check.is_toeplitz {
        let (m, j) = check.location.unwrap_or((0, 0));
        algebraic.witnesses.push(ConditionWitness {
            sample: format!("entry ({m}, {j})"),
            image: format!("entry ({}, {})", m + 1, j + 1),
            detail: format!("deviation {:e}", check.max_deviation),
        });
    }

    let coshift = image_condition(family, &members, "coshift_invariant_zero_part", |f| {
        family.vanishes_at_origin(f).then(|| family.co_shift(f))
    })?;

    Ok(SarasonReport {
        family: family.name(),
        n,
        skipped,
        conditions: [shift, algebraic, coshift],
    })
}
