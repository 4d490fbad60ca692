//! Comparative statics: sweep one exogenous parameter, re-solve the firm's
//! problem at every grid point, and fit power-law exponents to the result.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;

use crate::demand::GAMMA_ZERO_TOL;
use crate::error::{Error, Result};
use crate::firm::{FirmParams, FirmSolution, Regime};
use crate::numeric::logspace;
use crate::solver::{maximize, maximize_data_bound};

pub const CSV_HEADER: &str = "param,n_star,d_star,t_star,c_train,c_inf,profit,regime";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Hardware efficiency `E`.
    Efficiency,
    /// Parameter efficiency `a`.
    ParamEfficiency,
    /// Data efficiency `b`.
    DataEfficiency,
    /// Data cap `D`.
    DataCap,
}

impl SweepParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParameter::Efficiency => "E",
            SweepParameter::ParamEfficiency => "a",
            SweepParameter::DataEfficiency => "b",
            SweepParameter::DataCap => "D",
        }
    }

    fn apply(&self, base: &FirmParams, value: f64) -> FirmParams {
        let mut params = *base;
        match self {
            SweepParameter::Efficiency => params.efficiency = value,
            SweepParameter::ParamEfficiency => params.law.a = value,
            SweepParameter::DataEfficiency => params.law.b = value,
            SweepParameter::DataCap => params.data_cap = Some(value),
        }
        params
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "E" => Ok(SweepParameter::Efficiency),
            "a" => Ok(SweepParameter::ParamEfficiency),
            "b" => Ok(SweepParameter::DataEfficiency),
            "D" => Ok(SweepParameter::DataCap),
            other => Err(Error::Config(format!(
                "unknown sweep parameter {other:?} (expected E, a, b or D)"
            ))),
        }
    }
}

/// A log-spaced sweep of one parameter around a base configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub base: FirmParams,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.lo.is_finite() && self.hi.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "sweep range must be positive, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.hi < self.lo {
            return Err(Error::InvalidParams(format!(
                "sweep range is reversed: [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidParams(format!(
                "sweep needs at least 2 points, got {}",
                self.points
            )));
        }
        self.base.validate()
    }

    pub fn values(&self) -> Vec<f64> {
        logspace(self.lo, self.hi, self.points)
    }
}

/// One solved grid point; a failed solve is kept as a message so the rest of
/// the sweep survives.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub outcome: std::result::Result<FirmSolution, String>,
}

impl SweepRow {
    pub fn solution(&self) -> Option<&FirmSolution> {
        self.outcome.as_ref().ok()
    }

    pub fn is_shutdown(&self) -> bool {
        matches!(self.solution(), Some(s) if s.regime == Regime::Shutdown)
    }
}

/// Solve every grid point of `spec`. Rows come back in ascending parameter
/// order regardless of how the work was scheduled.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    Ok(spec
        .values()
        .into_par_iter()
        .map(|value| {
            let params = spec.parameter.apply(&spec.base, value);
            let solved = if params.data_cap.is_some() {
                maximize_data_bound(&params)
            } else {
                maximize(&params)
            };
            SweepRow {
                param: value,
                outcome: solved.map_err(|e| e.to_string()),
            }
        })
        .collect())
}

/// Render rows in the sweep CSV format. Failed rows keep their parameter
/// value, leave the numeric fields empty and carry `failed` as the regime.
pub fn to_csv(rows: &[SweepRow]) -> String {
    to_csv_with(rows, |x| x.to_string())
}

/// [`to_csv`] with a custom number format.
pub fn to_csv_with(rows: &[SweepRow], fmt: impl Fn(f64) -> String) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        match &row.outcome {
            Ok(s) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    fmt(row.param),
                    fmt(s.n_star),
                    fmt(s.d_star),
                    fmt(s.t_star),
                    fmt(s.c_train),
                    fmt(s.c_inf),
                    fmt(s.profit),
                    s.regime
                );
            }
            Err(_) => {
                let _ = writeln!(out, "{},,,,,,,failed", fmt(row.param));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Param,
    NStar,
    DStar,
    TStar,
    CTrain,
    CInf,
    Profit,
}

impl Column {
    fn read(&self, row: &SweepRow) -> Option<f64> {
        if let Column::Param = self {
            return Some(row.param);
        }
        let s = row.solution()?;
        Some(match self {
            Column::Param => unreachable!(),
            Column::NStar => s.n_star,
            Column::DStar => s.d_star,
            Column::TStar => s.t_star,
            Column::CTrain => s.c_train,
            Column::CInf => s.c_inf,
            Column::Profit => s.profit,
        })
    }
}

/// Measured power-law exponent next to the one the theory predicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentReport {
    pub measured_slope: f64,
    pub theoretical_slope: f64,
    pub fit_r2: f64,
    pub window: (f64, f64),
}

/// Least-squares fit of `ln y` against `ln x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

pub fn fit_log_log(points: &[(f64, f64)]) -> Result<LogLogFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = logs.len();
    if n < 2 {
        return Err(Error::InvalidParams(format!(
            "slope fit needs 2+ positive points, got {n}"
        )));
    }
    let k = n as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParams(
            "slope fit window has a single x value".into(),
        ));
    }
    let slope = sxy / sxx;
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    // a flat line is fitted exactly
    let flat = logs.iter().all(|p| p.1 == logs[0].1);
    let r2 = if flat || syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(LogLogFit {
        slope,
        intercept: my - slope * mx,
        r2,
        points: n,
    })
}

/// Fit the log-log slope of `y` against `x` over rows whose parameter lies
/// in `window` (inclusive). Shutdown and failed rows are skipped.
pub fn fit_slope(rows: &[SweepRow], x: Column, y: Column, window: (f64, f64)) -> Result<LogLogFit> {
    let tol = 1e-12 * window.1.abs();
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.param >= window.0 - tol && r.param <= window.1 + tol && !r.is_shutdown())
        .filter_map(|r| Some((x.read(r)?, y.read(r)?)))
        .collect();
    fit_log_log(&points)
}

/// The upper two decades of a sweep (or the whole sweep if it is shorter).
pub fn default_window(spec: &SweepSpec) -> (f64, f64) {
    ((spec.hi / 100.0).max(spec.lo), spec.hi)
}

pub fn exponent_report(
    rows: &[SweepRow],
    y: Column,
    window: (f64, f64),
    theoretical_slope: f64,
) -> Result<ExponentReport> {
    let fit = fit_slope(rows, Column::Param, y, window)?;
    Ok(ExponentReport {
        measured_slope: fit.slope,
        theoretical_slope,
        fit_r2: fit.r2,
        window,
    })
}

/// Asymptotic exponents of the optimum with respect to `E` and `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoreticalExponents {
    pub n_wrt_e: f64,
    pub d_wrt_e: f64,
    pub c_wrt_e: f64,
    pub n_wrt_a: f64,
    pub c_wrt_a: f64,
}

/// Exponents of the upper bounds `n* ≲ (E / (ρ a^γ))^(1/(1+αγ))` and
/// `C*_train ≲ E^((1−αγ)/(1+αγ)) a^(−2γ/(1+αγ))`, holding `ρ` fixed.
///
/// Log demand (`γ = 0`) has its own bounds `n* ≲ aE/ρ`, `C*_train ≲ a²E/ρ`,
/// which are not the `γ → 0` limit of the power-demand ones.
pub fn theoretical_exponents(gamma: f64, alpha: f64) -> Result<TheoreticalExponents> {
    let denom = 1.0 + alpha * gamma;
    if !(denom > 0.0) {
        return Err(Error::Domain {
            name: "gamma",
            value: gamma,
            reason: "exponents need 1 + alpha * gamma > 0",
        });
    }
    if gamma.abs() < GAMMA_ZERO_TOL {
        return Ok(TheoreticalExponents {
            n_wrt_e: 1.0,
            d_wrt_e: 1.0,
            c_wrt_e: 1.0,
            n_wrt_a: 1.0,
            c_wrt_a: 2.0,
        });
    }
    Ok(TheoreticalExponents {
        n_wrt_e: 1.0 / denom,
        d_wrt_e: 1.0 / denom,
        c_wrt_e: (1.0 - alpha * gamma) / denom,
        n_wrt_a: -gamma / denom,
        c_wrt_a: -2.0 * gamma / denom,
    })
}

/// Named sweeps mirroring the four panels of the usual figure: size and
/// training spend against hardware efficiency and parameter efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    EVsN,
    EVsC,
    AVsN,
    AVsC,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::EVsN, Preset::EVsC, Preset::AVsN, Preset::AVsC];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::EVsN => "e_vs_n",
            Preset::EVsC => "e_vs_c",
            Preset::AVsN => "a_vs_n",
            Preset::AVsC => "a_vs_c",
        }
    }

    /// The column the panel plots.
    pub fn column(&self) -> Column {
        match self {
            Preset::EVsN | Preset::AVsN => Column::NStar,
            Preset::EVsC | Preset::AVsC => Column::CTrain,
        }
    }

    /// Sweep spec for this panel on top of `base`.
    pub fn spec(&self, base: FirmParams) -> SweepSpec {
        let (parameter, lo, hi) = match self {
            Preset::EVsN | Preset::EVsC => (SweepParameter::Efficiency, 1e4, 1e10),
            Preset::AVsN | Preset::AVsC => (SweepParameter::ParamEfficiency, 1.0, 20.0),
        };
        SweepSpec {
            parameter,
            lo,
            hi,
            points: 40,
            base,
        }
    }

    /// Theoretical exponent of the plotted column against the swept parameter.
    pub fn theoretical_slope(&self, gamma: f64, alpha: f64) -> Result<f64> {
        let t = theoretical_exponents(gamma, alpha)?;
        Ok(match self {
            Preset::EVsN => t.n_wrt_e,
            Preset::EVsC => t.c_wrt_e,
            Preset::AVsN => t.n_wrt_a,
            Preset::AVsC => t.c_wrt_a,
        })
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset {s:?}")))
    }
}
