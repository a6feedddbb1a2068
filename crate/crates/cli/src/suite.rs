//! The built-in run set behind `hardy suite`.

use anyhow::Result;

use hardy_core::unbounded::domain::{DEFAULT_K_MAX, DEFAULT_WINDOW};

use crate::commands::{self, FactorialDomainArgs};
use crate::config::{Overrides, RunConfig};
use crate::output::{Output, EXIT_NEGATIVE, EXIT_OK};

pub struct SuiteCase {
    pub name: &'static str,
    pub expected: i32,
    pub run: fn(&Overrides) -> Result<Output>,
}

fn ex(name: &str, ov: &Overrides) -> Result<RunConfig> {
    RunConfig::from_example(name, ov)
}

fn domain(rule: &str) -> Result<Output> {
    commands::factorial_domain(
        &FactorialDomainArgs {
            rule: rule.into(),
            k_max: DEFAULT_K_MAX,
            window: DEFAULT_WINDOW,
            gamma: None,
            allow_boundary: false,
        },
        None,
    )
}

pub fn cases() -> Vec<SuiteCase> {
    vec![
        SuiteCase {
            name: "subsymbol-trig-mixed",
            expected: EXIT_OK,
            run: |ov| commands::subsymbol(&ex("trig-mixed", ov)?),
        },
        SuiteCase {
            name: "subsymbol-rank-one",
            expected: EXIT_NEGATIVE,
            run: |ov| commands::subsymbol(&ex("rank-one", ov)?),
        },
        SuiteCase {
            name: "check-shift",
            expected: EXIT_OK,
            run: |ov| commands::check(&ex("shift", ov)?),
        },
        SuiteCase {
            name: "check-perturbed",
            expected: EXIT_NEGATIVE,
            run: |ov| commands::check(&ex("perturbed-toeplitz", ov)?),
        },
        SuiteCase {
            name: "check-factorial",
            expected: EXIT_NEGATIVE,
            run: |ov| commands::check(&ex("factorial", ov)?),
        },
        SuiteCase {
            name: "extension-smirnov",
            expected: EXIT_OK,
            run: |ov| commands::extension(&ex("smirnov", ov)?),
        },
        SuiteCase {
            name: "stabilize-trig-mixed",
            expected: EXIT_OK,
            run: |ov| commands::stabilize(&ex("trig-mixed", ov)?),
        },
        SuiteCase {
            name: "berezin-analytic-trig",
            expected: EXIT_OK,
            run: |ov| {
                commands::berezin(
                    &ex("analytic-trig", ov)?,
                    &commands::BerezinMode::Sweep { radius: None, count: 8 },
                )
            },
        },
        SuiteCase {
            name: "domain-alternating-harmonic",
            expected: EXIT_OK,
            run: |_| domain("alternating-harmonic"),
        },
        SuiteCase {
            name: "domain-shifted",
            expected: EXIT_NEGATIVE,
            run: |_| domain("shifted-alternating-harmonic"),
        },
        SuiteCase {
            name: "apply-alternating-harmonic",
            expected: EXIT_OK,
            run: |_| commands::factorial_apply_cmd("alternating-harmonic", 16, DEFAULT_K_MAX, DEFAULT_WINDOW, None),
        },
        SuiteCase {
            name: "lemma62",
            expected: EXIT_OK,
            run: |_| commands::lemma62(50, None),
        },
    ]
}

/// Runs every case; each case's files land under `<name>/`, followed by a
/// `suite_summary.txt` table of expected and actual exit codes.
pub fn run(ov: &Overrides) -> Result<Output> {
    let mut out = Output::default();
    let mut table = String::from("case,expected,actual,status\n");
    for case in cases() {
        let (actual, files) = match (case.run)(ov) {
            Ok(o) => (o.code, o.files),
            Err(e) => {
                out.line(format!("{}: error: {e:#}", case.name));
                (crate::output::EXIT_ERROR, Vec::new())
            }
        };
        let ok = actual == case.expected;
        table.push_str(&format!(
            "{},{},{},{}\n",
            case.name,
            case.expected,
            actual,
            if ok { "ok" } else { "MISMATCH" }
        ));
        out.line(format!("{:<30} {}", case.name, if ok { "ok" } else { "MISMATCH" }));
        if !ok {
            out.code = EXIT_NEGATIVE;
        }
        for (name, body) in files {
            out.file(format!("{}/{name}", case.name), body);
        }
    }
    out.file("suite_summary.txt", table);
    Ok(out)
}
