//! Run configuration: a TOML file, the named built-in examples, and the
//! command-line overrides applied on top.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use hardy_core::circle_fourier::{parse_series, CircleGrid, HardyCoeffs, LaurentSeries};
use hardy_core::hardy_ops::{parse_matrix, toeplitz_from_symbol, SymbolSpec, TruncatedOperator};
use hardy_core::subsymbol::{default_probes, Probe};
use hardy_core::unbounded::families::{FactorialFamily, GammaFamily, SmirnovFamily, ToeplitzMatrixFamily};
use hardy_core::unbounded::{DomainParams, GammaSequence, OperatorFamily};

pub const DEFAULT_N: usize = 64;
pub const DEFAULT_K: usize = 16;
pub const MIN_N: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaSpec {
    Factorial,
    FactorialPower(f64),
}

impl GammaSpec {
    pub fn parse(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "factorial" => Ok(GammaSpec::Factorial),
            Some(("factorial-power", base)) => Ok(GammaSpec::FactorialPower(
                base.parse().with_context(|| format!("bad base in gamma spec {s:?}"))?,
            )),
            _ => bail!("unknown gamma sequence {s:?} (expected factorial or factorial-power:<base>)"),
        }
    }

    pub fn sequence(self) -> GammaSequence {
        match self {
            GammaSpec::Factorial => GammaSequence::factorial_power(Complex64::new(1.0, 0.0)),
            GammaSpec::FactorialPower(b) => GammaSequence::factorial_power(Complex64::new(b, 0.0)),
        }
    }
}

#[derive(Debug, Clone)]
pub enum OperatorSpec {
    Trig(LaurentSeries),
    Smirnov { b: HardyCoeffs, a: HardyCoeffs },
    Gamma(GammaSpec),
    /// Fixed matrix read from a file.
    Matrix { path: PathBuf, t: TruncatedOperator },
    /// Listed entries, zero elsewhere, at any dimension.
    Sparse(Vec<(usize, usize, Complex64)>),
    /// Toeplitz matrix of `base` with one entry moved by `delta`.
    Perturbed {
        base: LaurentSeries,
        at: (usize, usize),
        delta: Complex64,
    },
}

impl OperatorSpec {
    pub fn realize(&self, n: usize) -> Result<TruncatedOperator> {
        Ok(match self {
            OperatorSpec::Trig(phi) => toeplitz_from_symbol(phi, n)?,
            OperatorSpec::Smirnov { b, a } => SymbolSpec::SmirnovRatio {
                b: b.clone(),
                a: a.clone(),
            }
            .realize(n)?,
            OperatorSpec::Gamma(g) => SymbolSpec::GammaUpperTriangular(g.sequence().values(n)).realize(n)?,
            OperatorSpec::Matrix { t, .. } => t.clone(),
            OperatorSpec::Sparse(entries) => {
                let mut t = TruncatedOperator::from_fn(n, |_, _| Complex64::new(0.0, 0.0))?;
                for &(m, j, v) in entries {
                    if m >= n || j >= n {
                        bail!("entry ({m}, {j}) lies outside the {n}x{n} truncation");
                    }
                    t = t.with_entry(m, j, v);
                }
                t
            }
            OperatorSpec::Perturbed { base, at, delta } => {
                let t = toeplitz_from_symbol(base, n)?;
                if at.0 >= n || at.1 >= n {
                    bail!("perturbation at ({}, {}) lies outside the {n}x{n} truncation", at.0, at.1);
                }
                let v = t.entry(at.0, at.1) + delta;
                t.with_entry(at.0, at.1, v)
            }
        })
    }

    /// Fixed dimension, for operators read from a matrix file.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            OperatorSpec::Matrix { t, .. } => Some(t.dim()),
            _ => None,
        }
    }

    pub fn family(&self, params: DomainParams) -> Option<Box<dyn OperatorFamily>> {
        match self {
            OperatorSpec::Trig(phi) => Some(Box::new(ToeplitzMatrixFamily { symbol: phi.clone() })),
            OperatorSpec::Smirnov { b, a } => Some(Box::new(SmirnovFamily {
                b: b.clone(),
                a: a.clone(),
                ..SmirnovFamily::default()
            })),
            OperatorSpec::Gamma(GammaSpec::Factorial) => Some(Box::new(FactorialFamily { params })),
            OperatorSpec::Gamma(g) => Some(Box::new(GammaFamily {
                gamma: g.sequence(),
                params,
                allow_boundary: false,
            })),
            _ => None,
        }
    }

    /// Function `f` used by extension and stabilization runs: the
    /// denominator for Smirnov ratios, `2 + z` otherwise.
    pub fn default_f(&self) -> HardyCoeffs {
        match self {
            OperatorSpec::Smirnov { a, .. } => a.clone(),
            _ => HardyCoeffs::from_real(&[2.0, 1.0]).expect("non-empty"),
        }
    }

    pub fn outer_candidate(&self) -> Option<HardyCoeffs> {
        match self {
            OperatorSpec::Smirnov { a, .. } => Some(a.clone()),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            OperatorSpec::Trig(phi) => format!("toeplitz symbol band [{}, {}]", phi.n_min(), phi.n_max()),
            OperatorSpec::Smirnov { b, a } => format!("smirnov ratio deg b = {}, deg a = {}", b.degree(), a.degree()),
            OperatorSpec::Gamma(GammaSpec::Factorial) => "upper triangular gamma_n = n!".into(),
            OperatorSpec::Gamma(GammaSpec::FactorialPower(b)) => format!("upper triangular gamma_n = n! * {b}^n"),
            OperatorSpec::Matrix { path, .. } => format!("matrix file {}", path.display()),
            OperatorSpec::Sparse(e) => format!("sparse matrix with {} entries", e.len()),
            OperatorSpec::Perturbed { at, delta, .. } => {
                format!("perturbed toeplitz at ({}, {}) by {}", at.0, at.1, delta)
            }
        }
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn trig(pairs: &[(i64, f64)]) -> LaurentSeries {
    let pairs: Vec<(i64, Complex64)> = pairs.iter().map(|&(k, v)| (k, re(v))).collect();
    LaurentSeries::from_pairs(&pairs).expect("valid pairs")
}

/// Named built-in operators: `(name, description, operator)`.
pub fn examples() -> Vec<(&'static str, &'static str, OperatorSpec)> {
    vec![
        ("shift", "T_z, the unilateral shift", OperatorSpec::Trig(trig(&[(1, 1.0)]))),
        ("co-shift", "T_{conj z}, the backward shift", OperatorSpec::Trig(trig(&[(-1, 1.0)]))),
        (
            "trig-mixed",
            "T_phi with phi = conj z + 1 + z/2",
            OperatorSpec::Trig(trig(&[(-1, 1.0), (0, 1.0), (1, 0.5)])),
        ),
        (
            "analytic-trig",
            "T_phi with phi = 1 + z/2 - z^2/4",
            OperatorSpec::Trig(trig(&[(0, 1.0), (1, 0.5), (2, -0.25)])),
        ),
        (
            "smirnov",
            "multiplication by b/a with a = 1/2 - z/4, b = 0.2 + 0.3i z",
            OperatorSpec::Smirnov {
                b: HardyCoeffs::new(vec![re(0.2), Complex64::new(0.0, 0.3)]).expect("non-empty"),
                a: HardyCoeffs::from_real(&[0.5, -0.25]).expect("non-empty"),
            },
        ),
        ("factorial", "upper triangular with entries (j-m)!", OperatorSpec::Gamma(GammaSpec::Factorial)),
        (
            "gamma",
            "upper triangular with entries gamma_{j-m}, gamma_n = n! 2^n",
            OperatorSpec::Gamma(GammaSpec::FactorialPower(2.0)),
        ),
        (
            "rank-one",
            "diag(1, 0, ..., 0)",
            OperatorSpec::Sparse(vec![(0, 0, re(1.0))]),
        ),
        (
            "perturbed-toeplitz",
            "trig-mixed with entry (2, 3) moved by 1e-6",
            OperatorSpec::Perturbed {
                base: trig(&[(-1, 1.0), (0, 1.0), (1, 0.5)]),
                at: (2, 3),
                delta: re(1e-6),
            },
        ),
    ]
}

pub fn example(name: &str) -> Result<OperatorSpec> {
    examples()
        .into_iter()
        .find(|e| e.0 == name)
        .map(|e| e.2)
        .ok_or_else(|| {
            let names: Vec<_> = examples().iter().map(|e| e.0).collect();
            anyhow!("unknown example {name:?} (known: {})", names.join(", "))
        })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    kind: String,
    name: Option<String>,
    path: Option<PathBuf>,
    n_min: Option<i64>,
    re: Option<Vec<f64>>,
    im: Option<Vec<f64>>,
    b_re: Option<Vec<f64>>,
    b_im: Option<Vec<f64>>,
    a_re: Option<Vec<f64>>,
    a_im: Option<Vec<f64>>,
    gamma: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(rename = "N")]
    n: Option<usize>,
    #[serde(rename = "M")]
    m: Option<usize>,
    #[serde(rename = "K")]
    k: Option<usize>,
    tol: Option<f64>,
    eps_zero: Option<f64>,
    allow_small_grid: Option<bool>,
    random_probes: Option<usize>,
    f_re: Option<Vec<f64>>,
    f_im: Option<Vec<f64>>,
    max_degree: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProbe {
    id: String,
    re: Vec<f64>,
    im: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    operator: Option<RawOperator>,
    #[serde(default)]
    run: RawRun,
    #[serde(default)]
    probe: Vec<RawProbe>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub operator: OperatorSpec,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub tol: Option<f64>,
    pub eps_zero: Option<f64>,
    pub probes: Vec<Probe>,
    pub f: Option<HardyCoeffs>,
    pub max_degree: Option<usize>,
}

/// Command-line values that override the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub tol: Option<f64>,
}

fn complex_vec(what: &str, re: &[f64], im: Option<&[f64]>) -> Result<Vec<Complex64>> {
    let im = im.unwrap_or(&[]);
    if !im.is_empty() && im.len() != re.len() {
        bail!("{what}: re has {} entries but im has {}", re.len(), im.len());
    }
    if re.is_empty() {
        bail!("{what}: empty coefficient list");
    }
    Ok(re
        .iter()
        .enumerate()
        .map(|(i, &x)| Complex64::new(x, im.get(i).copied().unwrap_or(0.0)))
        .collect())
}

fn hardy(what: &str, re: Option<&Vec<f64>>, im: Option<&Vec<f64>>) -> Result<HardyCoeffs> {
    let re = re.ok_or_else(|| anyhow!("{what}: missing real parts"))?;
    Ok(HardyCoeffs::new(complex_vec(what, re, im.map(|v| v.as_slice()))?)?)
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn operator_from_raw(raw: &RawOperator, base: &Path) -> Result<OperatorSpec> {
    let need_path = || -> Result<PathBuf> {
        let p = raw.path.as_ref().ok_or_else(|| anyhow!("operator kind {:?} needs `path`", raw.kind))?;
        let p = resolve(base, p);
        if !p.exists() {
            bail!("referenced file {} does not exist", p.display());
        }
        Ok(p)
    };
    Ok(match raw.kind.as_str() {
        "example" => example(raw.name.as_deref().ok_or_else(|| anyhow!("operator kind \"example\" needs `name`"))?)?,
        "trig" => {
            let re = raw.re.as_ref().ok_or_else(|| anyhow!("trig operator needs `re`"))?;
            let coeffs = complex_vec("trig symbol", re, raw.im.as_deref())?;
            OperatorSpec::Trig(LaurentSeries::new(raw.n_min.unwrap_or(0), coeffs)?)
        }
        "series-file" => {
            let p = need_path()?;
            let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            OperatorSpec::Trig(parse_series(&text).with_context(|| format!("in {}", p.display()))?)
        }
        "matrix" => {
            let p = need_path()?;
            let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            let t = parse_matrix(&text).with_context(|| format!("in {}", p.display()))?;
            OperatorSpec::Matrix { path: p, t }
        }
        "smirnov" => OperatorSpec::Smirnov {
            b: hardy("smirnov numerator", raw.b_re.as_ref(), raw.b_im.as_ref())?,
            a: hardy("smirnov denominator", raw.a_re.as_ref(), raw.a_im.as_ref())?,
        },
        "gamma" => OperatorSpec::Gamma(GammaSpec::parse(raw.gamma.as_deref().unwrap_or("factorial"))?),
        other => bail!("unknown operator kind {other:?} (expected example, trig, series-file, matrix, smirnov, gamma)"),
    })
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Random probes `c0 + c1 z + c2 z^2` with `|c0| >= 2 > |c1| + |c2|`, so they
/// never vanish on the circle.
pub fn random_probes(count: usize, seed: u64) -> Vec<Probe> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut unit = || Complex64::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7));
            let c0 = Complex64::new(2.0, 0.0) + unit() * 0.5;
            let coeffs = vec![c0, unit(), unit()];
            Probe::new(format!("random{i}"), HardyCoeffs::new(coeffs).expect("non-empty"))
        })
        .collect()
}

pub fn seed_from_env() -> Result<u64> {
    match std::env::var("HS_SEED") {
        Ok(s) => s.trim().parse().with_context(|| format!("HS_SEED must be an unsigned integer, got {s:?}")),
        Err(_) => Ok(0),
    }
}

impl RunConfig {
    pub fn from_example(name: &str, ov: &Overrides) -> Result<Self> {
        Self::build(example(name)?, RawRun::default(), Vec::new(), ov)
    }

    pub fn load(path: &Path, ov: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let raw: RawConfig = toml::from_str(&text).map_err(|e| {
            let line = e.span().map_or(1, |s| line_of(&text, s.start));
            anyhow!("{}:{}: {}", path.display(), line, e.message())
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let op = raw
            .operator
            .as_ref()
            .ok_or_else(|| anyhow!("{}: missing [operator] section", path.display()))?;
        let operator = operator_from_raw(op, base).with_context(|| format!("{}: [operator]", path.display()))?;
        let mut probes = Vec::new();
        for p in &raw.probe {
            let f = HardyCoeffs::new(complex_vec(&format!("probe {:?}", p.id), &p.re, p.im.as_deref())?)?;
            probes.push(Probe::new(p.id.clone(), f));
        }
        Self::build(operator, raw.run, probes, ov).with_context(|| format!("{}", path.display()))
    }

    fn build(operator: OperatorSpec, run: RawRun, mut probes: Vec<Probe>, ov: &Overrides) -> Result<Self> {
        let mut n = ov.n.or(run.n).unwrap_or(DEFAULT_N);
        if let Some(fixed) = operator.fixed_dim() {
            if ov.n.is_some_and(|v| v != fixed) || run.n.is_some_and(|v| v != fixed) {
                bail!("N = {n} conflicts with the {fixed}x{fixed} matrix file");
            }
            n = fixed;
        }
        if n < MIN_N {
            bail!("N must be at least {MIN_N}, got {n}");
        }
        let m = ov.m.or(run.m).unwrap_or((4 * n).next_power_of_two());
        if m < 2 * n + 1 && !run.allow_small_grid.unwrap_or(false) {
            bail!("M = {m} is below 2N + 1 = {}; set allow_small_grid = true to override", 2 * n + 1);
        }
        CircleGrid::new(m)?;
        if probes.is_empty() {
            probes = default_probes(operator.outer_candidate());
        }
        let count = run.random_probes.unwrap_or(0);
        if count > 0 {
            probes.extend(random_probes(count, seed_from_env()?));
        }
        let f = match run.f_re {
            Some(ref re) => Some(HardyCoeffs::new(complex_vec("f", re, run.f_im.as_deref())?)?),
            None => None,
        };
        Ok(Self {
            operator,
            n,
            m,
            k: run.k.unwrap_or(DEFAULT_K),
            tol: ov.tol.or(run.tol),
            eps_zero: run.eps_zero,
            probes,
            f,
            max_degree: run.max_degree,
        })
    }

    pub fn grid(&self) -> CircleGrid {
        CircleGrid::new(self.m).expect("validated at load")
    }

    pub fn f(&self) -> HardyCoeffs {
        self.f.clone().unwrap_or_else(|| self.operator.default_f())
    }
}
