//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hardy_core::berezin::berezin_transform;
use hardy_core::circle_fourier::{CircleGrid, HardyCoeffs, LaurentSeries};
use hardy_core::hardy_ops::{apply, gamma_upper_triangular, toeplitz_from_symbol, SymbolSpec};
use hardy_core::subsymbol::{
    analyticity_test, default_probes, extension_agreement, monomial_witness, partial_stabilization,
    uniqueness_probe, Probe, UniquenessVerdict,
};
use hardy_core::unbounded::domain::DEFAULT_K_MAX;
use hardy_core::unbounded::rules::{AlternatingHarmonic, Table};
use hardy_core::unbounded::{
    c_m_table, domain_membership, factorial_apply, shift_rule, Decision, DivergenceWitness, DomainParams,
    GammaSequence,
};
use hardy_core::Complex64;

const N: usize = 64;
const M: usize = 256;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn unit_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Coefficients on `[lo, hi]` drawn from the unit disk.
fn random_symbol(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> LaurentSeries {
    let coeffs = (lo..=hi).map(|_| unit_disk(rng, 1.0)).collect();
    LaurentSeries::new(lo, coeffs).unwrap()
}

fn random_band(rng: &mut ChaCha8Rng) -> LaurentSeries {
    let lo = rng.gen_range(-8..=0);
    let hi = rng.gen_range(0..=8);
    random_symbol(rng, lo, hi)
}

fn grid() -> CircleGrid {
    CircleGrid::new(M).unwrap()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let probes = default_probes(None);
    let mut worst: f64 = 0.0;
    let mut all_unique = true;
    for _ in 0..20 {
        let t = toeplitz_from_symbol(&random_band(&mut rng), N).unwrap();
        let r = uniqueness_probe(&t, &probes, &grid(), 16, 1e-9).unwrap();
        all_unique &= r.verdict == UniquenessVerdict::Unique;
        worst = worst.max(r.max_deviation());
    }
    outcome(
        all_unique && worst <= 1e-9,
        format!("20 symbols unique, max pairwise deviation {worst:.3e} (tol 1e-9)"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let delta = 1e-3;
    let mut least = f64::INFINITY;
    let mut all_detected = true;
    for _ in 0..20 {
        let mut t = toeplitz_from_symbol(&random_band(&mut rng), N).unwrap();
        let (m, n) = (rng.gen_range(0..N), rng.gen_range(0..N));
        t = t.with_entry(m, n, t.entry(m, n) + delta);
        let Some(w) = monomial_witness(&t) else {
            all_detected = false;
            continue;
        };
        let r = uniqueness_probe(&t, &w.probes, &grid(), N - 1, 1e-9).unwrap();
        all_detected &= r.verdict == UniquenessVerdict::NotUnique;
        least = least.min(r.max_deviation());
    }
    outcome(
        all_detected && least >= delta / 2.0,
        format!("20 perturbations not_unique, least witness deviation {least:.3e} (need >= 5e-4)"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let probes: Vec<Probe> = (0..=8).map(Probe::monomial).collect();
    let mut analytic_ok = 0;
    let mut non_analytic_ok = 0;
    for _ in 0..20 {
        let hi = rng.gen_range(0..=8);
        let t = toeplitz_from_symbol(&random_symbol(&mut rng, 0, hi), N).unwrap();
        analytic_ok += analyticity_test(&t, &probes, 1e-10).unwrap().analytic as usize;

        let lo = rng.gen_range(-8..=-1);
        let hi = rng.gen_range(0..=8);
        let mut coeffs = random_symbol(&mut rng, lo, hi).coeffs().to_vec();
        coeffs[0] = Complex64::from_polar(rng.gen_range(0.1..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let t = toeplitz_from_symbol(&LaurentSeries::new(lo, coeffs).unwrap(), N).unwrap();
        non_analytic_ok += !analyticity_test(&t, &probes, 1e-10).unwrap().analytic as usize;
    }
    outcome(
        analytic_ok == 20 && non_analytic_ok == 20,
        format!("analytic {analytic_ok}/20 true, non-analytic {non_analytic_ok}/20 false (tol 1e-10)"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let polys: Vec<HardyCoeffs> = (0..=3).map(HardyCoeffs::monomial).collect();
    let two_plus_z = HardyCoeffs::from_real(&[2.0, 1.0]).unwrap();
    let mut cases: Vec<(String, _, HardyCoeffs)> = (0..5)
        .map(|i| {
            let t = toeplitz_from_symbol(&random_band(&mut rng), N).unwrap();
            (format!("T_phi #{i}"), t, two_plus_z.clone())
        })
        .collect();
    let a = HardyCoeffs::from_real(&[0.5, -0.25]).unwrap();
    let b = HardyCoeffs::new(vec![Complex64::new(0.2, 0.0), Complex64::new(0.0, 0.3)]).unwrap();
    let smirnov = SymbolSpec::SmirnovRatio { b, a: a.clone() }.realize(N).unwrap();
    cases.push(("M_{b/a}, f = a".into(), smirnov.clone(), a));
    cases.push(("M_{b/a}, f = 2+z".into(), smirnov, two_plus_z));
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    for (label, t, f) in &cases {
        let depth = 16.min(N - 1 - f.degree());
        let r = extension_agreement(t, f, &polys, &grid(), depth, 1e-8).unwrap();
        worst = worst.max(r.max_deviation());
        if !r.all_passed() {
            failed.push(label.clone());
        }
    }
    outcome(
        failed.is_empty(),
        format!("{} operators, max deviation {worst:.3e} (tol 1e-8){}", cases.len(), fmt_failed(&failed)),
    )
}

fn fmt_failed(failed: &[String]) -> String {
    if failed.is_empty() {
        String::new()
    } else {
        format!(", failed: {}", failed.join("; "))
    }
}

/// Dyadic coefficients keep every product exact, so "exactly" means bit for bit.
fn dyadic_symbol(rng: &mut ChaCha8Rng) -> LaurentSeries {
    let lo = rng.gen_range(-4..=0);
    let hi = rng.gen_range(0..=4);
    let q = |rng: &mut ChaCha8Rng| rng.gen_range(-64i32..=64) as f64 / 128.0;
    let coeffs = (lo..=hi).map(|_| Complex64::new(q(rng), q(rng))).collect();
    LaurentSeries::new(lo, coeffs).unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let f = HardyCoeffs::from_real(&[2.0, 1.0]).unwrap();
    let mut runs = 0;
    let mut failed = Vec::new();
    let mut worst_slack = i64::MIN;
    for i in 0..6 {
        let t = toeplitz_from_symbol(&dyadic_symbol(&mut rng), N).unwrap();
        for deg in 0..=6usize {
            let mut p: Vec<Complex64> = (0..=deg)
                .map(|_| Complex64::new(rng.gen_range(-3i32..=3) as f64, rng.gen_range(-3i32..=3) as f64))
                .collect();
            p[deg] = Complex64::new(1.0, 1.0);
            let p = HardyCoeffs::new(p).unwrap();
            runs += 1;
            match partial_stabilization(&t, &f, &p, 0..=deg + 2, 0.0) {
                Ok(r) => {
                    worst_slack = worst_slack.max(r.n_star as i64 - (deg as i64 + 1));
                    if r.n_star > deg + 1 || !r.matches_apply {
                        failed.push(format!("symbol {i} deg {deg}: N* = {}, deviation {:e}", r.n_star, r.deviation_vs_apply));
                    }
                }
                Err(e) => failed.push(format!("symbol {i} deg {deg}: {e}")),
            }
        }
    }
    outcome(
        failed.is_empty(),
        format!(
            "{runs} runs, max N* - (deg p + 1) = {worst_slack}, exact match on certified band{}",
            fmt_failed(&failed)
        ),
    )
}

fn criterion_6() -> Outcome {
    let rows = c_m_table(50, 1e-6);
    let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
    let bounds = rows.iter().all(|r| r.c_m <= 1.0 / (r.m - 1) as f64);
    let c2_err = (rows[0].c_m - (pi2_6 - 1.0)).abs();
    let total = rows.last().unwrap().cumulative_sq;
    outcome(
        rows.len() == 49 && bounds && c2_err <= 1e-9 && total <= pi2_6,
        format!(
            "{} rows, c_m <= 1/(m-1): {bounds}, |c_2 - (pi^2/6 - 1)| = {c2_err:.3e}, sum c_m^2 = {total:.6}",
            rows.len()
        ),
    )
}

fn criterion_7() -> Outcome {
    let params = DomainParams {
        k_max: DEFAULT_K_MAX,
        ..DomainParams::default()
    };
    let f = domain_membership(&AlternatingHarmonic, params);
    let zf = domain_membership(shift_rule(Arc::new(AlternatingHarmonic)).as_ref(), params);
    let witness = match zf.witness {
        Some(DivergenceWitness::StalledOscillation { term_magnitude, .. }) => term_magnitude,
        _ => 0.0,
    };
    outcome(
        f.decision == Decision::InDomain && zf.decision == Decision::OutOfDomain && witness >= 1e-3,
        format!(
            "f: {}, zf: {}, |a_n| in final block {witness:.4} at K_max = 2^20",
            f.decision.as_str(),
            zf.decision.as_str()
        ),
    )
}

fn criterion_8() -> Outcome {
    let n = 16;
    let gamma = GammaSequence::factorial_table(n).values(n);
    let t = gamma_upper_triangular(&gamma, n).unwrap();
    let params = DomainParams {
        k_max: 64,
        ..DomainParams::default()
    };
    let mut mismatches = 0;
    for k in 0..n {
        let matrix = apply(&t, &HardyCoeffs::monomial(k));
        let mut a = vec![Complex64::new(0.0, 0.0); k + 1];
        a[k] = gamma[k];
        let rule = Table {
            label: format!("z^{k}"),
            values: a,
        };
        let series = factorial_apply(&rule, (n - 1) as u64, params).unwrap();
        mismatches += (0..n).filter(|&m| series.d[m] != matrix.coeff(m)).count();
    }
    outcome(mismatches == 0, format!("16 monomials x 16 coefficients, {mismatches} mismatches"))
}

/// `w^k` from exact rational arithmetic, rounded once.
fn exact_power(w: Complex64, k: u32) -> Complex64 {
    let re = BigRational::from_float(w.re).unwrap();
    let im = BigRational::from_float(w.im).unwrap();
    let (mut a, mut b) = (BigRational::from_integer(1.into()), BigRational::from_integer(0.into()));
    for _ in 0..k {
        let na = &a * &re - &b * &im;
        let nb = &a * &im + &b * &re;
        a = na;
        b = nb;
    }
    Complex64::new(a.to_f64().unwrap(), b.to_f64().unwrap())
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut points: Vec<Complex64> = (0..60).map(|_| unit_disk(&mut rng, 0.5)).collect();
    points.extend((0..8).map(|j| Complex64::from_polar(0.5, j as f64 * std::f64::consts::TAU / 8.0 + 0.1)));
    points.push(Complex64::new(0.0, 0.0));
    let mut checked = 0;
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for k in 0..=4u32 {
        let t = toeplitz_from_symbol(&LaurentSeries::monomial(k as i64, Complex64::new(1.0, 0.0)), N).unwrap();
        for &w in &points {
            let b = berezin_transform(&t, w).unwrap().value;
            let err = (b - exact_power(w, k)).norm();
            let bound = 2.0 * w.norm().powi(2 * N as i32 - k as i32);
            checked += 1;
            if err > bound {
                violations += 1;
                worst_ratio = worst_ratio.max(if bound > 0.0 { err / bound } else { f64::INFINITY });
            }
        }
    }
    let worst = if violations == 0 {
        String::new()
    } else {
        format!(", worst error/bound {worst_ratio:.3e}")
    };
    outcome(
        violations == 0,
        format!("{checked} (k, w) pairs, {violations} above 2|w|^(2N-k){worst}"),
    )
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let dir = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_hardy"))
            .args(["--no-timestamp", "--out"])
            .arg(&dir)
            .arg("suite")
            .output()
            .unwrap();
        (status.status.code(), read_tree(&dir))
    };
    let (code_a, a) = run("first");
    let (code_b, b) = run("second");
    let bytes: usize = a.iter().map(|f| f.1.len()).sum();
    outcome(
        code_a == Some(0) && code_b == Some(0) && !a.is_empty() && a == b,
        format!("{} files, {bytes} bytes, identical: {}, exit codes {code_a:?} {code_b:?}", a.len(), a == b),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 10] = [
        ("uniqueness on random trig symbols", criterion_1, Some(Duration::from_secs(10))),
        ("non-uniqueness witness for perturbed Toeplitz", criterion_2, Some(Duration::from_secs(10))),
        ("analyticity test", criterion_3, None),
        ("extension agreement", criterion_4, None),
        ("partial stabilization", criterion_5, None),
        ("c_m table", criterion_6, Some(Duration::from_secs(1))),
        ("non-shift-invariant factorial domain", criterion_7, Some(Duration::from_secs(5))),
        ("gamma matrix vs factorial series", criterion_8, None),
        ("Berezin transform of T_{z^k}", criterion_9, None),
        ("CLI suite determinism", criterion_10, None),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let passed = o.passed && in_time;
        let budget = limit.map_or(String::new(), |l| format!(" of {:.0} s", l.as_secs_f64()));
        println!(
            "{} criterion {:>2}: {name}: {} [{:.3} s{budget}]",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            elapsed.as_secs_f64()
        );
        failures += !passed as usize;
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
