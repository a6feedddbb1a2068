//! The subcommands, each a pure function from configuration to [`Output`].

use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;

use hardy_core::berezin::{berezin_transform, circle_points, radial_sweep, BerezinValue, DIAGNOSTIC_RADII};
use hardy_core::circle_fourier::{parse_series, HardyCoeffs};
use hardy_core::hardy_ops::{diagonal_symbol_recovery, is_toeplitz_algebraic};
use hardy_core::report::ReportWriter;
use hardy_core::subsymbol::{
    analyticity_test, extension_agreement, monomial_witness, partial_stabilization, sub_symbol, uniqueness_probe,
    UniquenessVerdict,
};
use hardy_core::unbounded::domain::DEFAULT_TAU;
use hardy_core::unbounded::factorial::DEFAULT_CM_TAIL_TOL;
use hardy_core::unbounded::rules::Table;
use hardy_core::unbounded::{
    c_m_table, domain_membership, factorial_apply, gamma_domain_membership, sarason_conditions_probe, Decision,
    DivergenceWitness, DomainParams, DomainVerdict, RuleRegistry, SharedRule,
};
use hardy_core::HardyError;

use crate::config::{GammaSpec, RunConfig};
use crate::output::{Csv, Output, EXIT_INCONCLUSIVE, EXIT_NEGATIVE, EXIT_OK};

pub const SUBSYMBOL_TOL: f64 = 1e-9;
pub const CHECK_TOL: f64 = 1e-10;
pub const EXTENSION_TOL: f64 = 1e-8;
pub const STABILIZE_TOL: f64 = 1e-12;
pub const DEFAULT_EXTENSION_DEGREE: usize = 3;
pub const DEFAULT_STABILIZE_DEGREE: usize = 4;

fn header(w: &mut ReportWriter, command: &str, cfg: &RunConfig) {
    w.section("run")
        .text("command", command)
        .text("operator", &cfg.operator.label())
        .int("N", cfg.n as i64)
        .int("M", cfg.m as i64)
        .int("K", cfg.k as i64);
}

pub fn subsymbol(cfg: &RunConfig) -> Result<Output> {
    let t = cfg.operator.realize(cfg.n)?;
    let grid = cfg.grid();
    let tol = cfg.tol.unwrap_or(SUBSYMBOL_TOL);
    let mut w = ReportWriter::new();
    header(&mut w, "subsymbol", cfg);
    w.real("tolerance", tol);

    let mut values = Csv::new(&["probe", "j", "theta", "r_re", "r_im", "valid"]);
    for (i, p) in cfg.probes.iter().enumerate() {
        let depth = cfg.k.min((cfg.n - 1).saturating_sub(p.f.degree()));
        let s = sub_symbol(&t, &p.f, &grid, depth, cfg.eps_zero)?;
        w.section(&format!("probe.{i}"))
            .text("id", &p.id)
            .int("depth", s.depth as i64)
            .band("band", s.h.n_min(), s.h.n_max())
            .flag("complete", s.h_complete)
            .int("grid", s.grid.len() as i64)
            .real("eps_zero", s.eps_zero)
            .real("mask_fraction", s.mask_fraction());
        for warning in &s.warnings {
            w.text("warning", warning);
        }
        for (j, r) in s.r_values.iter().enumerate() {
            let r = r.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            values.row(vec![
                p.id.as_str().into(),
                j.into(),
                s.grid.theta(j).into(),
                r.re.into(),
                r.im.into(),
                s.r_values[j].is_some().into(),
            ]);
        }
    }

    let rep = uniqueness_probe(&t, &cfg.probes, &grid, cfg.k, tol)?;
    w.section("uniqueness")
        .text("verdict", rep.verdict.as_str())
        .real("max_deviation", rep.max_deviation())
        .int("grid", rep.grid.len() as i64);
    for warning in &rep.warnings {
        w.text("warning", warning);
    }
    for pair in &rep.pairs {
        let key = format!("pair.{}.{}", rep.probes[pair.first], rep.probes[pair.second]);
        match pair.max_deviation {
            Some(d) => w.real(&key, d),
            None => w.text(&key, "no overlapping grid points"),
        };
    }
    if let Some((a, b, theta)) = rep.witness_point() {
        w.text("witness_pair", &format!("{a} / {b}")).real("witness_theta", theta);
    }

    let mut out = Output::default();
    out.line(format!("uniqueness: {} (max deviation {:e})", rep.verdict.as_str(), rep.max_deviation()));
    if rep.verdict == UniquenessVerdict::NotUnique {
        out.code = EXIT_NEGATIVE;
        if let Some(mw) = monomial_witness(&t) {
            w.section("witness")
                .band("entry", mw.entry.0 as i64, mw.entry.1 as i64)
                .band("reference", mw.reference.0 as i64, mw.reference.1 as i64)
                .real("deviation", mw.deviation)
                .text("probes", &format!("{}, {}", mw.probes[0].id, mw.probes[1].id));
            out.line(format!(
                "witness: entry ({}, {}) differs from ({}, {}) by {:e}; probes {} and {}",
                mw.entry.0, mw.entry.1, mw.reference.0, mw.reference.1, mw.deviation, mw.probes[0].id, mw.probes[1].id
            ));
        }
    }
    out.file("subsymbol_report.txt", w.finish());
    out.file("subsymbol_values.csv", values.finish());
    Ok(out)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn check(cfg: &RunConfig) -> Result<Output> {
    let t = cfg.operator.realize(cfg.n)?;
    let tol = cfg.tol.unwrap_or(CHECK_TOL);
    let mut w = ReportWriter::new();
    header(&mut w, "check", cfg);
    w.real("tolerance", tol);
    let mut out = Output::default();

    let toe = is_toeplitz_algebraic(&t, tol);
    w.section("toeplitz")
        .flag("is_toeplitz", toe.is_toeplitz)
        .real("max_deviation", toe.max_deviation);
    if let Some((m, j)) = toe.location {
        w.band("location", m as i64, j as i64);
    }
    let loc = toe
        .location
        .map_or(String::new(), |(m, j)| format!(" between ({m}, {j}) and ({}, {})", m + 1, j + 1));
    out.line(format!("Toeplitz: {} (max deviation {:e}{loc})", yes_no(toe.is_toeplitz), toe.max_deviation));
    if !toe.is_toeplitz {
        out.escalate(EXIT_NEGATIVE);
    }

    let an = analyticity_test(&t, &cfg.probes, tol)?;
    w.section("analyticity").flag("analytic", an.analytic).real("max_abs", an.max_abs());
    for (id, v) in &an.values {
        w.complex(&format!("moment.{id}"), *v);
    }
    out.line(format!("analytic: {} (max |<T(zf), 1>| {:e})", yes_no(an.analytic), an.max_abs()));

    let margin = cfg.n / 4;
    let rec = diagonal_symbol_recovery(&t, margin);
    w.section("symbol_recovery")
        .int("margin", margin as i64)
        .band("band", rec.n_min(), rec.n_max());
    for k in rec.n_min()..=rec.n_max() {
        let c = rec.coeff(k);
        if c.norm() > 0.0 {
            w.complex(&format!("coeff.{k}"), c);
        }
    }

    w.section("sarason");
    match cfg.operator.family(DomainParams::default()) {
        None => {
            w.text("family", "none");
            out.line("sarason conditions: n/a (no domain oracle for this operator)");
        }
        Some(fam) => {
            let samples = fam.default_samples();
            let rep = sarason_conditions_probe(fam.as_ref(), &samples, cfg.n)?;
            w.text("family", rep.family).int("N", rep.n as i64);
            for (label, m) in &rep.skipped {
                w.text(&format!("skipped.{label}"), m.as_str());
            }
            for (i, c) in rep.conditions.iter().enumerate() {
                w.section(&format!("condition.{}", i + 1))
                    .text("label", c.label)
                    .flag("passed", c.passed)
                    .int("checked", c.checked as i64)
                    .int("undecided", c.unknown as i64)
                    .text("detail", &c.detail);
                for wit in &c.witnesses {
                    w.text("witness", &format!("{} -> {}: {}", wit.sample, wit.image, wit.detail));
                }
                let first = c
                    .witnesses
                    .first()
                    .map_or(String::new(), |wit| format!(", witness {} -> {}", wit.sample, wit.image));
                out.line(format!(
                    "condition ({}) {}: {}{first}",
                    i + 1,
                    c.label,
                    if c.passed { "pass" } else { "FAIL" }
                ));
            }
            if !rep.all_passed() {
                out.escalate(EXIT_NEGATIVE);
            }
        }
    }
    out.file("check_report.txt", w.finish());
    Ok(out)
}

pub enum BerezinMode {
    Points(Vec<Complex64>),
    Sweep { radius: Option<f64>, count: usize },
}

pub fn berezin(cfg: &RunConfig, mode: &BerezinMode) -> Result<Output> {
    let t = cfg.operator.realize(cfg.n)?;
    let values: Vec<BerezinValue> = match mode {
        BerezinMode::Points(ws) => ws.iter().map(|&w| berezin_transform(&t, w)).collect::<Result<_, _>>()?,
        BerezinMode::Sweep { radius: Some(r), count } => circle_points(*r, *count)
            .into_iter()
            .map(|w| berezin_transform(&t, w))
            .collect::<Result<_, _>>()?,
        BerezinMode::Sweep { radius: None, count } => radial_sweep(&t, *count)?,
    };
    let mut csv = Csv::new(&["w_re", "w_im", "radius", "value_re", "value_im", "tail_bound"]);
    for v in &values {
        csv.row(vec![
            v.w.re.into(),
            v.w.im.into(),
            v.w.norm().into(),
            v.value.re.into(),
            v.value.im.into(),
            v.tail_bound.into(),
        ]);
    }
    let mut out = Output::default();
    out.line(format!("{} Berezin values at N = {}", values.len(), cfg.n));
    if matches!(mode, BerezinMode::Sweep { radius: None, .. }) {
        out.line(format!("diagnostic radii {DIAGNOSTIC_RADII:?}; no boundary limit is extrapolated"));
    }
    out.file("berezin.csv", csv.finish());
    Ok(out)
}

/// A named rule, `file:<path>` to a series file of normalized coefficients,
/// or a path to such a file.
pub fn resolve_rule(spec: &str) -> Result<SharedRule> {
    let path = spec.strip_prefix("file:").map(Path::new);
    match (path, RuleRegistry::construct(spec)) {
        (None, Ok(rule)) => Ok(rule),
        (None, Err(e)) if !Path::new(spec).exists() => Err(e.into()),
        (p, _) => {
            let p = p.unwrap_or(Path::new(spec));
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read rule file {}", p.display()))?;
            let s = parse_series(&text).with_context(|| format!("in rule file {}", p.display()))?;
            if s.n_min() < 0 {
                bail!("rule file {} has negative indices", p.display());
            }
            let mut values = vec![Complex64::new(0.0, 0.0); s.n_min() as usize];
            values.extend_from_slice(s.coeffs());
            Ok(Arc::new(Table {
                label: format!("file:{}", p.display()),
                values,
            }))
        }
    }
}

pub struct FactorialDomainArgs {
    pub rule: String,
    pub k_max: u64,
    pub window: usize,
    pub gamma: Option<String>,
    pub allow_boundary: bool,
}

fn write_verdict(w: &mut ReportWriter, v: &DomainVerdict) {
    w.section("params")
        .int("k_max", v.params.k_max as i64)
        .int("window", v.params.window as i64)
        .real("tau", v.params.tau);
    w.section("verdict")
        .text("decision", v.decision.as_str())
        .real("window_oscillation", v.window_oscillation)
        .real("final_term_max", v.final_term_max)
        .int("final_term_index", v.final_term_index as i64);
    w.section("partial_sums");
    for (k, s) in &v.partial_sums {
        w.complex(&format!("S.{k}"), *s);
    }
    w.section("window_history");
    for (k, osc) in &v.window_history {
        w.real(&format!("oscillation.{k}"), *osc);
    }
    match &v.witness {
        None => {}
        Some(DivergenceWitness::StalledOscillation {
            oscillations,
            term_index,
            term_magnitude,
        }) => {
            w.section("witness").text("kind", "stalled_oscillation");
            let osc: Vec<f64> = oscillations.iter().map(|o| o.1).collect();
            w.reals("oscillations", &osc)
                .int("term_index", *term_index as i64)
                .real("term_magnitude", *term_magnitude);
        }
        Some(DivergenceWitness::Growth { index, magnitude }) => {
            w.section("witness")
                .text("kind", "growth")
                .int("index", *index as i64)
                .real("magnitude", *magnitude);
        }
    }
}

fn domain_params(cfg_tol: Option<f64>, k_max: u64, window: usize) -> DomainParams {
    DomainParams {
        k_max,
        window,
        tau: cfg_tol.unwrap_or(DEFAULT_TAU),
    }
}

pub fn factorial_domain(args: &FactorialDomainArgs, tol: Option<f64>) -> Result<Output> {
    let rule = resolve_rule(&args.rule)?;
    let params = domain_params(tol, args.k_max, args.window);
    let mut w = ReportWriter::new();
    w.section("run").text("command", "factorial domain").text("rule", &rule.name());
    let verdict = match &args.gamma {
        None => domain_membership(rule.as_ref(), params),
        Some(g) => {
            let gamma = GammaSpec::parse(g)?.sequence();
            w.text("gamma", &gamma.label())
                .flag("growth_ok", gamma.growth_ok)
                .flag("allow_boundary", args.allow_boundary);
            match gamma_domain_membership(&gamma, rule.clone(), params, args.allow_boundary) {
                Err(HardyError::GrowthViolation { index }) => {
                    bail!("gamma sequence {} violates |gamma_(n+1)| > (n+1)|gamma_n| at n = {index}; pass --allow-boundary to accept equality", gamma.label())
                }
                r => r?,
            }
        }
    };
    write_verdict(&mut w, &verdict);
    let mut out = Output::default();
    out.line(format!(
        "{}: {} (window oscillation {:e}, max |a_n| in final block {:e})",
        rule.name(),
        verdict.decision.as_str(),
        verdict.window_oscillation,
        verdict.final_term_max
    ));
    out.code = match verdict.decision {
        Decision::InDomain => EXIT_OK,
        Decision::OutOfDomain => EXIT_NEGATIVE,
        Decision::Inconclusive => EXIT_INCONCLUSIVE,
    };
    out.file("factorial_domain.txt", w.finish());
    Ok(out)
}

pub fn factorial_apply_cmd(rule: &str, m_max: u64, k_max: u64, window: usize, tol: Option<f64>) -> Result<Output> {
    let rule = resolve_rule(rule)?;
    let params = domain_params(tol, k_max, window);
    let mut out = Output::default();
    let img = match factorial_apply(rule.as_ref(), m_max, params) {
        Err(HardyError::DomainRefused) => {
            out.code = EXIT_NEGATIVE;
            out.line(format!("{}: refused, sum a_n judged out of the domain", rule.name()));
            return Ok(out);
        }
        r => r?,
    };
    let mut csv = Csv::new(&["m", "d_re", "d_im", "tail", "last_index"]);
    for (m, d) in img.d.iter().enumerate() {
        csv.row(vec![
            m.into(),
            d.re.into(),
            d.im.into(),
            img.tail[m].into(),
            img.terms_used[m].into(),
        ]);
    }
    out.line(format!("{}: d_0 = {} ({})", rule.name(), img.d[0], img.verdict.decision.as_str()));
    if img.verdict.decision == Decision::Inconclusive {
        out.code = EXIT_INCONCLUSIVE;
    }
    out.file("factorial_apply.csv", csv.finish());
    Ok(out)
}

pub fn lemma62(m_max: u64, tail_tol: Option<f64>) -> Result<Output> {
    if m_max < 2 {
        bail!("--mmax must be at least 2");
    }
    let rows = c_m_table(m_max, tail_tol.unwrap_or(DEFAULT_CM_TAIL_TOL));
    let mut csv = Csv::new(&["m", "c_m", "bound", "cumulative_sq", "terms", "bound_ok"]);
    for r in &rows {
        csv.row(vec![
            r.m.into(),
            r.c_m.into(),
            r.bound.into(),
            r.cumulative_sq.into(),
            r.terms.into(),
            r.bound_ok.into(),
        ]);
    }
    let mut out = Output::default();
    let failed: Vec<u64> = rows.iter().filter(|r| !r.bound_ok).map(|r| r.m).collect();
    out.line(format!(
        "{} rows, sum of c_m^2 = {:.17e}, bound failures: {}",
        rows.len(),
        rows.last().map_or(0.0, |r| r.cumulative_sq),
        failed.len()
    ));
    if !failed.is_empty() {
        out.code = EXIT_NEGATIVE;
    }
    out.file("lemma62.csv", csv.finish());
    Ok(out)
}

pub fn extension(cfg: &RunConfig) -> Result<Output> {
    let t = cfg.operator.realize(cfg.n)?;
    let f = cfg.f();
    let tol = cfg.tol.unwrap_or(EXTENSION_TOL);
    let deg = cfg.max_degree.unwrap_or(DEFAULT_EXTENSION_DEGREE);
    let polys: Vec<HardyCoeffs> = (0..=deg).map(HardyCoeffs::monomial).collect();
    let depth = cfg.k.min((cfg.n - 1).saturating_sub(f.degree()));
    let rep = extension_agreement(&t, &f, &polys, &cfg.grid(), depth, tol)?;
    let mut w = ReportWriter::new();
    header(&mut w, "extension", cfg);
    w.real("tolerance", tol).real("mask_fraction", rep.mask_fraction).int("depth", rep.depth as i64);
    for row in &rep.rows {
        w.section(&format!("p.z^{}", row.poly_degree))
            .band("certified_band", row.band.0 as i64, row.band.1 as i64)
            .real("max_deviation", row.max_deviation)
            .flag("passed", row.passed);
    }
    let mut out = Output::default();
    out.line(format!(
        "extension agreement: {} (max deviation {:e})",
        if rep.all_passed() { "pass" } else { "FAIL" },
        rep.max_deviation()
    ));
    if !rep.all_passed() {
        out.code = EXIT_NEGATIVE;
    }
    out.file("extension_report.txt", w.finish());
    Ok(out)
}

pub fn stabilize(cfg: &RunConfig) -> Result<Output> {
    let t = cfg.operator.realize(cfg.n)?;
    let f = cfg.f();
    let tol = cfg.tol.unwrap_or(STABILIZE_TOL);
    let max_deg = cfg.max_degree.unwrap_or(DEFAULT_STABILIZE_DEGREE);
    let mut csv = Csv::new(&["degree", "n_star", "bound", "within_bound", "band_lo", "band_hi", "deviation", "matches_apply"]);
    let mut out = Output::default();
    let mut failures = 0;
    for deg in 0..=max_deg {
        let p = HardyCoeffs::from_real(&vec![1.0; deg + 1]).expect("non-empty");
        match partial_stabilization(&t, &f, &p, 0..=deg + 2, tol) {
            Ok(r) => {
                let ok = r.n_star <= deg + 1;
                if !ok || !r.matches_apply {
                    failures += 1;
                }
                csv.row(vec![
                    deg.into(),
                    r.n_star.into(),
                    (deg + 1).into(),
                    ok.into(),
                    r.band.0.into(),
                    r.band.1.into(),
                    r.deviation_vs_apply.into(),
                    r.matches_apply.into(),
                ]);
            }
            Err(HardyError::NoStabilization { .. }) => {
                failures += 1;
                csv.row(vec![
                    deg.into(),
                    "none".into(),
                    (deg + 1).into(),
                    false.into(),
                    "".into(),
                    "".into(),
                    f64::NAN.into(),
                    false.into(),
                ]);
            }
            Err(e) => return Err(e.into()),
        }
    }
    out.line(format!("stabilization sweep deg 0..={max_deg}: {failures} failures"));
    if failures > 0 {
        out.code = EXIT_NEGATIVE;
    }
    out.file("stabilization.csv", csv.finish());
    Ok(out)
}
