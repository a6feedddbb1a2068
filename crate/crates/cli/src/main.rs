use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use hardy_core::unbounded::domain::{DEFAULT_K_MAX, DEFAULT_WINDOW};
use hardy_core::unbounded::{FamilyRegistry, RuleRegistry};
use hardy_cli::commands::{self, BerezinMode, FactorialDomainArgs};
use hardy_cli::config::{examples, Overrides, RunConfig};
use hardy_cli::output::{write_files, Output, EXIT_ERROR};
use hardy_cli::suite;

#[derive(Parser)]
#[command(name = "hardy", version, about = "Sub-symbol and domain probes for truncated Toeplitz-type operators")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in operator, used when no config is given (see `hardy list`).
    #[arg(long, global = true)]
    example: Option<String>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Omit the timestamp line from output files.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Override the command's tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Truncation size.
    #[arg(long = "N", global = true)]
    n: Option<usize>,
    /// Grid size.
    #[arg(long = "M", global = true)]
    m: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sub-symbols for every probe and the pairwise uniqueness verdict.
    Subsymbol,
    /// Toeplitz, analyticity, symbol recovery and the three shift conditions.
    Check,
    /// Berezin transform values.
    #[command(subcommand)]
    Berezin(BerezinCmd),
    /// Factorial operator: domain heuristic and application.
    #[command(subcommand)]
    Factorial(FactorialCmd),
    /// Table of the constants c_m = sum_{k>=2} k^{-m}.
    #[command(subcommand)]
    Lemma62(Lemma62Cmd),
    /// Agreement of P(h_f p) with T(f p) for p = 1, z, ..., z^d.
    Extension,
    /// Partial-numerator stabilization sweep over polynomial degrees.
    Stabilize,
    /// Runs the built-in set and compares exit codes.
    Suite,
    /// Lists coefficient rules, operator families and examples.
    List,
}

#[derive(Subcommand)]
enum BerezinCmd {
    /// Evaluate at explicit points.
    Eval {
        /// Point as `re,im`; repeatable.
        #[arg(long = "w", required = true, value_parser = parse_point)]
        w: Vec<Complex64>,
    },
    /// Evaluate on circles.
    Sweep {
        #[arg(long, default_value_t = 8)]
        count: usize,
        /// Single radius; the diagnostic radii are used when omitted.
        #[arg(long)]
        radius: Option<f64>,
    },
}

#[derive(Args)]
struct RuleArgs {
    /// Coefficient rule name or `file:<path>`.
    #[arg(long)]
    rule: String,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    k_max: u64,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: usize,
}

#[derive(Subcommand)]
enum FactorialCmd {
    /// Decide whether sum a_n converges.
    Domain {
        #[command(flatten)]
        rule: RuleArgs,
        /// Gamma sequence (`factorial` or `factorial-power:<base>`); the
        /// rule then gives normalized coefficients a_n / gamma_n.
        #[arg(long)]
        gamma: Option<String>,
        /// Accept |gamma_(n+1)| = (n+1)|gamma_n|.
        #[arg(long)]
        allow_boundary: bool,
    },
    /// Compute d_0, ..., d_mmax.
    Apply {
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long, default_value_t = 16)]
        mmax: u64,
    },
}

#[derive(Subcommand)]
enum Lemma62Cmd {
    Table {
        #[arg(long, default_value_t = 50)]
        mmax: u64,
        #[arg(long)]
        tail_tol: Option<f64>,
    },
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad point {s:?}: {e}"));
    Ok(Complex64::new(parse(re)?, parse(im)?))
}

fn run_config(cli: &Cli) -> Result<RunConfig> {
    let ov = Overrides {
        n: cli.n,
        m: cli.m,
        tol: cli.tol,
    };
    match (&cli.config, &cli.example) {
        (Some(_), Some(_)) => bail!("give either --config or --example, not both"),
        (Some(path), None) => RunConfig::load(path, &ov),
        (None, Some(name)) => RunConfig::from_example(name, &ov),
        (None, None) => bail!("this command needs an operator: pass --config <file> or --example <name>"),
    }
}

fn list() -> Output {
    let mut out = Output::default();
    out.line("coefficient rules:");
    for (name, summary, aliases) in RuleRegistry::list() {
        let aka = if aliases.is_empty() {
            String::new()
        } else {
            format!(" (also {})", aliases.join(", "))
        };
        out.line(format!("  {name:<32} {summary}{aka}"));
    }
    out.line("operator families:");
    for name in FamilyRegistry::names() {
        out.line(format!("  {name}"));
    }
    out.line("examples:");
    for (name, description, _) in examples() {
        out.line(format!("  {name:<32} {description}"));
    }
    out
}

fn dispatch(cli: &Cli) -> Result<Output> {
    Ok(match &cli.command {
        Command::Subsymbol => commands::subsymbol(&run_config(cli)?)?,
        Command::Check => commands::check(&run_config(cli)?)?,
        Command::Extension => commands::extension(&run_config(cli)?)?,
        Command::Stabilize => commands::stabilize(&run_config(cli)?)?,
        Command::Berezin(b) => {
            let mode = match b {
                BerezinCmd::Eval { w } => BerezinMode::Points(w.clone()),
                BerezinCmd::Sweep { count, radius } => BerezinMode::Sweep {
                    radius: *radius,
                    count: *count,
                },
            };
            commands::berezin(&run_config(cli)?, &mode)?
        }
        Command::Factorial(FactorialCmd::Domain {
            rule,
            gamma,
            allow_boundary,
        }) => commands::factorial_domain(
            &FactorialDomainArgs {
                rule: rule.rule.clone(),
                k_max: rule.k_max,
                window: rule.window,
                gamma: gamma.clone(),
                allow_boundary: *allow_boundary,
            },
            cli.tol,
        )?,
        Command::Factorial(FactorialCmd::Apply { rule, mmax }) => {
            commands::factorial_apply_cmd(&rule.rule, *mmax, rule.k_max, rule.window, cli.tol)?
        }
        Command::Lemma62(Lemma62Cmd::Table { mmax, tail_tol }) => commands::lemma62(*mmax, *tail_tol)?,
        Command::Suite => suite::run(&Overrides {
            n: cli.n,
            m: cli.m,
            tol: cli.tol,
        })?,
        Command::List => list(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(&cli).and_then(|out| {
        write_files(&out, &cli.out, !cli.no_timestamp).context("writing output")?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            print!("{}", out.summary);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
