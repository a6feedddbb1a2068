//! Coefficient rules `n -> a_n` and the registry that builds them by name.
//!
//! A rule describes an entire function through its normalized coefficients;
//! which normalization (`z^n / n!` or `z^n / gamma_n`) applies is decided by
//! the consumer.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{HardyError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Deterministic closed-form coefficient rule, evaluable for any `n`.
pub trait CoeffRule: fmt::Debug + Send + Sync {
    fn name(&self) -> String;
    fn coeff(&self, n: u64) -> Complex64;
}

pub type SharedRule = Arc<dyn CoeffRule>;

#[derive(Debug, Clone, Copy)]
pub struct Zero;

impl CoeffRule for Zero {
    fn name(&self) -> String {
        "zero".into()
    }
    fn coeff(&self, _: u64) -> Complex64 {
        ZERO
    }
}

/// `a_n = scale * delta_{n,k}`.
#[derive(Debug, Clone, Copy)]
pub struct Delta {
    pub k: u64,
    pub scale: Complex64,
}

impl Delta {
    pub fn unit(k: u64) -> Self {
        Self {
            k,
            scale: Complex64::new(1.0, 0.0),
        }
    }
}

impl CoeffRule for Delta {
    fn name(&self) -> String {
        if self.scale == Complex64::new(1.0, 0.0) {
            format!("delta:{}", self.k)
        } else {
            format!("delta:{}*({})", self.k, self.scale)
        }
    }
    fn coeff(&self, n: u64) -> Complex64 {
        if n == self.k {
            self.scale
        } else {
            ZERO
        }
    }
}

/// `a_0 = 0`, `a_n = (-1)^n / n`.
#[derive(Debug, Clone, Copy)]
pub struct AlternatingHarmonic;

impl CoeffRule for AlternatingHarmonic {
    fn name(&self) -> String {
        "alternating-harmonic".into()
    }
    fn coeff(&self, n: u64) -> Complex64 {
        if n == 0 {
            return ZERO;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(sign / n as f64, 0.0)
    }
}

/// `a_n = ratio^n`.
#[derive(Debug, Clone, Copy)]
pub struct Geometric {
    pub ratio: f64,
}

impl CoeffRule for Geometric {
    fn name(&self) -> String {
        if self.ratio == 0.5 {
            "geometric".into()
        } else {
            format!("geometric:{}", self.ratio)
        }
    }
    fn coeff(&self, n: u64) -> Complex64 {
        Complex64::new(self.ratio.powf(n as f64), 0.0)
    }
}

/// Finite table, zero past its end.
#[derive(Debug, Clone)]
pub struct Table {
    pub label: String,
    pub values: Vec<Complex64>,
}

impl CoeffRule for Table {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn coeff(&self, n: u64) -> Complex64 {
        usize::try_from(n)
            .ok()
            .and_then(|i| self.values.get(i).copied())
            .unwrap_or(ZERO)
    }
}

/// Rule for `z f` under the `z^n / n!` normalization: `a'_n = n a_{n-1}`.
#[derive(Debug, Clone)]
pub struct Shifted(pub SharedRule);

impl CoeffRule for Shifted {
    fn name(&self) -> String {
        format!("shift({})", self.0.name())
    }
    fn coeff(&self, n: u64) -> Complex64 {
        if n == 0 {
            ZERO
        } else {
            self.0.coeff(n - 1) * n as f64
        }
    }
}

/// Rule for `S* f` under the `z^n / n!` normalization: `a'_n = a_{n+1} / (n+1)`.
#[derive(Debug, Clone)]
pub struct CoShifted(pub SharedRule);

impl CoeffRule for CoShifted {
    fn name(&self) -> String {
        format!("coshift({})", self.0.name())
    }
    fn coeff(&self, n: u64) -> Complex64 {
        self.0.coeff(n + 1) / (n + 1) as f64
    }
}

/// `|a_n|`, for absolute-convergence tests.
#[derive(Debug, Clone)]
pub struct Modulus(pub SharedRule);

impl CoeffRule for Modulus {
    fn name(&self) -> String {
        format!("abs({})", self.0.name())
    }
    fn coeff(&self, n: u64) -> Complex64 {
        Complex64::new(self.0.coeff(n).norm(), 0.0)
    }
}

pub fn shift_rule(rule: SharedRule) -> SharedRule {
    Arc::new(Shifted(rule))
}

pub fn coshift_rule(rule: SharedRule) -> SharedRule {
    Arc::new(CoShifted(rule))
}

type RuleConstructor = fn(Option<&str>) -> Result<SharedRule>;

struct RuleEntry {
    summary: &'static str,
    construct: RuleConstructor,
}

fn parse_arg<T: std::str::FromStr>(name: &str, arg: Option<&str>, default: T) -> Result<T> {
    match arg {
        None => Ok(default),
        Some(a) => a.parse().map_err(|_| HardyError::UnknownName {
            kind: "rule argument",
            name: format!("{name}:{a}"),
        }),
    }
}

fn registry() -> &'static BTreeMap<&'static str, RuleEntry> {
    static REGISTRY: OnceLock<BTreeMap<&'static str, RuleEntry>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut m = BTreeMap::new();
        m.insert(
            "zero",
            RuleEntry {
                summary: "a_n = 0",
                construct: |_| Ok(Arc::new(Zero)),
            },
        );
        m.insert(
            "delta",
            RuleEntry {
                summary: "a_n = 1 if n = k else 0 (delta:<k>, default k = 1)",
                construct: |arg| Ok(Arc::new(Delta::unit(parse_arg("delta", arg, 1u64)?))),
            },
        );
        m.insert(
            "alternating-harmonic",
            RuleEntry {
                summary: "a_n = (-1)^n / n, a_0 = 0",
                construct: |_| Ok(Arc::new(AlternatingHarmonic)),
            },
        );
        m.insert(
            "geometric",
            RuleEntry {
                summary: "a_n = r^n (geometric:<r>, default r = 1/2)",
                construct: |arg| {
                    Ok(Arc::new(Geometric {
                        ratio: parse_arg("geometric", arg, 0.5f64)?,
                    }))
                },
            },
        );
        m.insert(
            "shifted-alternating-harmonic",
            RuleEntry {
                summary: "rule of z f for f = alternating-harmonic: a_n = (-1)^(n-1) n / (n-1)",
                construct: |_| Ok(shift_rule(Arc::new(AlternatingHarmonic))),
            },
        );
        m
    })
}

const ALIASES: &[(&str, &str)] = &[
    ("paper-counterexample-shifted", "shifted-alternating-harmonic"),
    ("alt-harmonic", "alternating-harmonic"),
];

/// Name-based construction of built-in rules.
///
/// Names take an optional argument after a colon, e.g. `delta:3` or
/// `geometric:0.25`.
pub struct RuleRegistry;

impl RuleRegistry {
    pub fn construct(spec: &str) -> Result<SharedRule> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        let name = ALIASES
            .iter()
            .find(|(alias, _)| *alias == name)
            .map_or(name, |(_, target)| *target);
        let entry = registry().get(name).ok_or_else(|| HardyError::UnknownName {
            kind: "rule",
            name: spec.to_string(),
        })?;
        (entry.construct)(arg)
    }

    /// `(name, summary, aliases)` for every registered rule.
    pub fn list() -> Vec<(&'static str, &'static str, Vec<&'static str>)> {
        registry()
            .iter()
            .map(|(name, e)| {
                let aliases = ALIASES
                    .iter()
                    .filter(|(_, t)| t == name)
                    .map(|(a, _)| *a)
                    .collect();
                (*name, e.summary, aliases)
            })
            .collect()
    }
}
