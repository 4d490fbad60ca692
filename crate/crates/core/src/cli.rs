//! Command-line front end. Every subcommand reads the same config (file plus
//! `--set` overrides) and prints `key = value` lines or CSV.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use crate::config::{format_number as num, Config};
use crate::error::Error;
use crate::firm::FirmSolution;
use crate::solver::{maximize, maximize_data_bound, oracle_check};
use crate::statics::{
    default_window, exponent_report, sweep, to_csv_with, Column, Preset, SweepRow,
};
use crate::trends::trend_report;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BOUNDARY: i32 = 3;
pub const EXIT_OTHER: i32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "firmscale",
    version,
    about = "Profit-maximizing LLM firm model"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Config file with dotted keys, e.g. `demand.gamma = -1`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
    /// Write the main output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the profit-maximizing (n, d, t).
    Solve,
    /// Re-solve across a parameter sweep and write CSV.
    Sweep {
        /// One of e_vs_n, e_vs_c, a_vs_n, a_vs_c.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Elasticity of substitution of the smooth scaling law at a probe point.
    Elasticity,
    /// Implied against observed growth of training compute.
    Trends {
        /// Only the scenario with hardware progress switched off.
        #[arg(long)]
        stalled: bool,
    },
    /// Compare the unconstrained and the data-capped optimum.
    DataboundCheck,
    /// Compare the solver against a brute-force grid search.
    OracleCheck,
}

/// Exit status for an error returned by [`run`].
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_)) => EXIT_CONFIG,
        Some(Error::ScanBoundary { .. }) => EXIT_BOUNDARY,
        _ => EXIT_OTHER,
    }
}

/// Execute a parsed command. `stdout` receives the primary output unless
/// `--out` redirects it; `stderr` gets warnings and secondary reports.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> anyhow::Result<()> {
    let cfg = Config::resolve(cli.common.config.as_deref(), &cli.common.overrides)?;
    let out = cli.common.out.as_deref();
    match &cli.command {
        Command::Solve => {
            let solution = if cfg.firm.data_cap.is_some() {
                maximize_data_bound(&cfg.firm)?
            } else {
                maximize(&cfg.firm)?
            };
            emit(out, stdout, &solution_text(&solution))
        }
        Command::Sweep { preset } => cmd_sweep(&cfg, preset.as_deref(), out, stdout, stderr),
        Command::Elasticity => emit(out, stdout, &elasticity_text(&cfg)?),
        Command::Trends { stalled } => {
            let report = trend_report(&cfg.trends)?;
            let text = report.to_text(*stalled, num);
            match out {
                Some(path) => {
                    write_file(path, &report.to_csv(num))?;
                    stdout.write_all(text.as_bytes())?;
                    Ok(())
                }
                None => emit(None, stdout, &text),
            }
        }
        Command::DataboundCheck => emit(out, stdout, &databound_text(&cfg)?),
        Command::OracleCheck => emit(out, stdout, &oracle_text(&cfg)?),
    }
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn solution_text(s: &FirmSolution) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "regime = {}", s.regime);
    for (k, v) in [
        ("n_star", s.n_star),
        ("d_star", s.d_star),
        ("t_star", s.t_star),
        ("profit", s.profit),
        ("c_train", s.c_train),
        ("c_inf", s.c_inf),
    ] {
        let _ = writeln!(t, "{k} = {}", num(v));
    }
    let foc = s.foc_residual.map_or_else(|| "n/a".to_string(), num);
    let _ = writeln!(t, "foc_residual = {foc}");
    t
}

fn cmd_sweep(
    cfg: &Config,
    preset: Option<&str>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> anyhow::Result<()> {
    let (spec, fit) = match preset {
        Some(name) => {
            let preset: Preset = name.parse()?;
            let spec = preset.spec(cfg.firm);
            let theory = preset.theoretical_slope(cfg.firm.demand.gamma, cfg.firm.law.alpha)?;
            (
                spec,
                Some((default_window(&spec), preset.column(), Some(theory))),
            )
        }
        None => {
            let settings = cfg.sweep.ok_or_else(|| {
                Error::Config("sweep needs --preset or sweep.parameter/lo/hi in the config".into())
            })?;
            let fit = settings.fit_window.map(|w| {
                let theory = sweep_theory(cfg, settings.spec.parameter.as_str());
                (w, Column::NStar, theory)
            });
            (settings.spec, fit)
        }
    };
    let rows = sweep(&spec)?;
    warn_failed(&rows, stderr)?;
    let csv = to_csv_with(&rows, num);

    let mut report = String::new();
    if let Some((window, column, theory)) = fit {
        match exponent_report(&rows, column, window, theory.unwrap_or(f64::NAN)) {
            Ok(r) => {
                let _ = writeln!(
                    report,
                    "fit.window = [{}, {}]",
                    num(r.window.0),
                    num(r.window.1)
                );
                let _ = writeln!(report, "fit.measured_slope = {}", num(r.measured_slope));
                let _ = writeln!(
                    report,
                    "fit.theoretical_slope = {}",
                    num(r.theoretical_slope)
                );
                let _ = writeln!(report, "fit.r2 = {}", num(r.fit_r2));
            }
            Err(e) => {
                let _ = writeln!(report, "fit = none ({e})");
            }
        }
    }
    match out {
        Some(path) => {
            write_file(path, &csv)?;
            stdout.write_all(report.as_bytes())?;
        }
        None => {
            stdout.write_all(csv.as_bytes())?;
            stderr.write_all(report.as_bytes())?;
        }
    }
    Ok(())
}

/// Theoretical `n*` exponent for a configured sweep, where one exists.
fn sweep_theory(cfg: &Config, parameter: &str) -> Option<f64> {
    let t =
        crate::statics::theoretical_exponents(cfg.firm.demand.gamma, cfg.firm.law.alpha).ok()?;
    match parameter {
        "E" => Some(t.n_wrt_e),
        "a" => Some(t.n_wrt_a),
        // matched parameter count at the cap: n = (b/a)^(1/alpha) D^(beta/alpha)
        "D" => Some(cfg.firm.law.beta / cfg.firm.law.alpha),
        _ => None,
    }
}

fn warn_failed(rows: &[SweepRow], stderr: &mut dyn Write) -> anyhow::Result<()> {
    for row in rows {
        if let Err(e) = &row.outcome {
            writeln!(stderr, "warning: row {} failed: {e}", num(row.param))?;
        }
    }
    Ok(())
}

fn elasticity_text(cfg: &Config) -> anyhow::Result<String> {
    let p = &cfg.elasticity;
    let mut t = String::new();
    let _ = writeln!(t, "alpha = {}", num(p.law.alpha));
    let _ = writeln!(t, "beta = {}", num(p.law.beta));
    let _ = writeln!(t, "n = {}", num(p.n));
    let _ = writeln!(t, "d = {}", num(p.d));
    let _ = writeln!(t, "sigma = {}", num(p.law.elasticity(p.n, p.d)?));
    let _ = writeln!(
        t,
        "sigma_oracle = {}",
        num(p.law.elasticity_oracle(p.n, p.d)?)
    );
    let _ = writeln!(t, "mrts = {}", num(p.law.mrts(p.n, p.d)?));
    if p.law.alpha == p.law.beta {
        let _ = writeln!(
            t,
            "sigma_equal_exponents = {}",
            num(1.0 / (1.0 + p.law.alpha))
        );
    }
    Ok(t)
}

fn databound_text(cfg: &Config) -> anyhow::Result<String> {
    let cap = cfg
        .firm
        .data_cap
        .ok_or_else(|| Error::Config("databound-check needs firm.D".into()))?;
    let free = maximize(&cfg.firm.with_data_cap(None))?;
    let capped = maximize_data_bound(&cfg.firm)?;
    let mut t = String::new();
    let _ = writeln!(t, "data_cap = {}", num(cap));
    let _ = writeln!(t, "unconstrained_d_star = {}", num(free.d_star));
    let _ = writeln!(t, "cap_binds = {}", free.d_star > cap);
    let _ = writeln!(t, "unconstrained_profit = {}", num(free.profit));
    t.push_str(&solution_text(&capped));
    Ok(t)
}

fn oracle_text(cfg: &Config) -> anyhow::Result<String> {
    let cmp = oracle_check(&cfg.firm, cfg.oracle_points)?;
    let (cn, cd, ct) = cmp.cell();
    let mut t = String::new();
    let _ = writeln!(t, "grid_points = {}", cfg.oracle_points);
    for (who, s) in [("solver", &cmp.solver), ("oracle", &cmp.oracle)] {
        let _ = writeln!(t, "{who}.regime = {}", s.regime);
        let _ = writeln!(t, "{who}.n_star = {}", num(s.n_star));
        let _ = writeln!(t, "{who}.d_star = {}", num(s.d_star));
        let _ = writeln!(t, "{who}.t_star = {}", num(s.t_star));
        let _ = writeln!(t, "{who}.profit = {}", num(s.profit));
    }
    let _ = writeln!(t, "cell = [{}, {}, {}]", num(cn), num(cd), num(ct));
    let _ = writeln!(t, "solver_dominates = {}", cmp.solver_dominates(0.0));
    let _ = writeln!(t, "within_one_cell = {}", cmp.within_one_cell());
    Ok(t)
}
