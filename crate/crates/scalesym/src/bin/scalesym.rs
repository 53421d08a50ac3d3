//! Command-line front end for the scenario runner.
//!
//! Exit codes: 0 when every check passes, 1 when the scenario ran but a
//! check failed, 2 for configuration problems, 3 for any other error.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use scalesym::scenario::{
    builtin_scenario, list_builtin_scenarios, load_scenario, run_scenario, OutputFormat,
    RunOptions, ScenarioReport,
};
use scalesym::{Error, Result};

#[derive(Parser)]
#[command(
    name = "scalesym",
    version,
    about = "Numerical checks for scaling symmetries of homogeneous potentials",
    after_help = "Examples:\n  scalesym list\n  scalesym run --builtin kepler-rescale --out out/kepler\n  scalesym run scenario.toml --tol 1e-11 --format json"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a config file or from the built-in catalog.
    Run {
        /// Path to a TOML or JSON scenario config.
        #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
        config: Option<PathBuf>,

        /// Name of a built-in scenario (see `scalesym list`).
        #[arg(long, value_name = "NAME")]
        builtin: Option<String>,

        /// Output directory for artifacts (default: the scenario name).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,

        /// Integration tolerance override.
        #[arg(long, value_name = "TOL", allow_negative_numbers = true)]
        tol: Option<f64>,

        /// Format for the tabular artifacts (report.json is always JSON).
        #[arg(long, value_name = "FMT", default_value = "csv")]
        format: String,
    },
    /// List the built-in scenarios.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    let mut out = io::BufWriter::new(io::stdout().lock());
    match cli.command {
        Command::List => {
            tolerate_closed_pipe(list(&mut out).and_then(|()| out.flush()))?;
            Ok(true)
        }
        Command::Run {
            config,
            builtin,
            out: out_dir,
            tol,
            format,
        } => {
            let scenario = match (&builtin, &config) {
                (Some(name), _) => builtin_scenario(name)?,
                (None, Some(path)) => load_scenario(path)?,
                (None, None) => unreachable!("clap enforces config xor builtin"),
            };
            if let Some(t) = tol {
                if !t.is_finite() || t <= 0.0 {
                    return Err(Error::config("--tol must be positive"));
                }
            }
            let opts = RunOptions {
                out_dir,
                tol,
                format: OutputFormat::from_name(&format)?,
            };
            let report = run_scenario(&scenario, &opts)?;
            tolerate_closed_pipe(print_report(&mut out, &report).and_then(|()| out.flush()))?;
            Ok(report.pass)
        }
    }
}

/// A consumer such as `scalesym list | head` may close stdout early;
/// that is not a failure of the run, so swallow the broken pipe and
/// keep the exit code the run earned.
fn tolerate_closed_pipe(res: io::Result<()>) -> Result<()> {
    match res {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn list(out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "built-in scenarios:")?;
    for sc in list_builtin_scenarios() {
        writeln!(out)?;
        writeln!(
            out,
            "  {:<24} law (a,b,c) = ({}, {}, {})",
            sc.name,
            sc.law.a(),
            sc.law.b(),
            sc.law.c()
        )?;
        writeln!(out, "      {}", sc.summary)?;
    }
    Ok(())
}

fn print_report(out: &mut impl Write, report: &ScenarioReport) -> io::Result<()> {
    writeln!(
        out,
        "scenario '{}': potential {} (degree {}), law (a,b,c) = ({}, {}, {}), tol {:e}",
        report.name,
        report.potential.kind,
        report
            .potential
            .degree
            .map_or_else(|| "unknown".to_string(), |k| k.to_string()),
        report.law.a,
        report.law.b,
        report.law.c,
        report.tol,
    )?;
    for check in &report.checks {
        let verdict = if check.pass { "PASS" } else { "FAIL" };
        writeln!(out, "[{verdict}] {:<18} {}", check.check, headline(check))?;
    }
    writeln!(
        out,
        "artifacts: {} (in {})",
        {
            let mut names: Vec<&str> = report.artifacts.values().map(String::as_str).collect();
            names.sort_unstable();
            names.join(", ")
        },
        report.output_dir
    )?;
    writeln!(
        out,
        "result: {} ({}/{} checks passed)",
        if report.pass { "PASS" } else { "FAIL" },
        report.checks.iter().filter(|c| c.pass).count(),
        report.checks.len()
    )
}

/// A one-line numeric summary for a check, pulled from its metrics.
fn headline(check: &scalesym::scenario::CheckReport) -> String {
    let m = &check.metrics;
    let get = |key: &str| m.get(key).and_then(|v| v.as_f64());
    match check.check.as_str() {
        "charge" => format!(
            "drift_rel = {:.3e}",
            get("drift_rel").unwrap_or(f64::NAN)
        ),
        "virial" => format!(
            "ratio = {:.12} (expected {})",
            get("ratio").unwrap_or(f64::NAN),
            get("expected_ratio").unwrap_or(f64::NAN)
        ),
        "symmetry_residual" => format!(
            "worst residual = {:.3e}",
            get("worst_residual").unwrap_or(f64::NAN)
        ),
        "mapping" => format!(
            "worst eom residual = {:.3e}",
            get("worst_eom_residual").unwrap_or(f64::NAN)
        ),
        "generator" => format!(
            "worst residual = {:.3e}, flow defect = {:.3e}",
            get("worst_residual").unwrap_or(f64::NAN),
            get("flow_defect").unwrap_or(f64::NAN)
        ),
        "bargmann" => format!(
            "null = {:.3e}, geodesic = {:.3e}, lie defect = {:.3e}",
            get("null_residual").unwrap_or(f64::NAN),
            get("geodesic_residual").unwrap_or(f64::NAN),
            m.pointer("/lie/defect").and_then(|v| v.as_f64()).unwrap_or(f64::NAN)
        ),
        "homothety" => format!(
            "charge drift = {:.3e}",
            get("drift_abs").unwrap_or(f64::NAN)
        ),
        _ => String::new(),
    }
}
