//! Annual growth of profit-optimal training compute implied by exogenous
//! hardware and algorithmic progress, compared with observed growth.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numeric::brent_root;
use crate::statics::theoretical_exponents;

pub const CSV_HEADER: &str = "scenario,gamma,implied_growth,observed_growth,verdict";

/// Annual growth factors of the exogenous trends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendRates {
    /// Hardware efficiency (FLOP per dollar).
    pub g_e: f64,
    /// Algorithmic compute efficiency, the product `a b`.
    pub g_alg: f64,
    /// Observed frontier training compute.
    pub g_c_observed: f64,
    pub alpha: f64,
    /// Share of algorithmic growth credited to parameter efficiency, so that
    /// `a` grows by `g_alg^split` per year.
    pub split: f64,
}

impl Default for TrendRates {
    fn default() -> Self {
        Self {
            g_e: 1.37,
            g_alg: 3.0,
            g_c_observed: 5.0,
            alpha: 0.3,
            split: 0.5,
        }
    }
}

impl TrendRates {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g_E", self.g_e),
            ("g_alg", self.g_alg),
            ("g_C", self.g_c_observed),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "growth factor {name} must be positive, got {v}"
                )));
            }
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::Domain {
                name: "alpha",
                value: self.alpha,
                reason: "scaling exponent must be positive",
            });
        }
        if !(0.0..=1.0).contains(&self.split) {
            return Err(Error::Domain {
                name: "split",
                value: self.split,
                reason: "split must lie in [0, 1]",
            });
        }
        Ok(())
    }

    /// The same rates with hardware progress switched off.
    pub fn stalled(&self) -> Self {
        Self { g_e: 1.0, ..*self }
    }
}

/// Annual growth factor of the training-compute bound at curvature `gamma`.
pub fn implied_growth(rates: &TrendRates, gamma: f64) -> Result<f64> {
    rates.validate()?;
    let exps = theoretical_exponents(gamma, rates.alpha)?;
    let a_growth_exponent = rates.split * exps.c_wrt_a;
    Ok(rates.g_e.powf(exps.c_wrt_e) * rates.g_alg.powf(a_growth_exponent))
}

/// Growth with hardware efficiency frozen.
pub fn stalled_hardware_growth(rates: &TrendRates, gamma: f64) -> Result<f64> {
    implied_growth(&rates.stalled(), gamma)
}

/// The curvature at which implied growth equals observed growth.
///
/// Log demand is checked first because its exponents are not the limit of
/// the power-demand ones; the power branch is then solved by Brent on
/// `[-1/alpha + 1e-6, 10]`, widened upward if needed.
pub fn break_even_gamma(rates: &TrendRates) -> Result<f64> {
    rates.validate()?;
    let target = rates.g_c_observed;
    if implied_growth(rates, 0.0)? == target {
        return Ok(0.0);
    }
    // log of the power-branch growth; staying in logs keeps it finite right
    // up to the pole at 1 + alpha * gamma = 0
    let branch = |gamma: f64| -> f64 {
        let denom = 1.0 + rates.alpha * gamma;
        let c_wrt_e = (1.0 - rates.alpha * gamma) / denom;
        let c_wrt_a = -2.0 * gamma / denom;
        c_wrt_e * rates.g_e.ln() + rates.split * c_wrt_a * rates.g_alg.ln() - target.ln()
    };
    let lo = -1.0 / rates.alpha + 1e-6;
    let mut hi = 10.0;
    let f_lo = branch(lo);
    let mut f_hi = branch(hi);
    let mut widenings = 0;
    while f_lo.signum() == f_hi.signum() && widenings < 6 {
        hi *= 10.0;
        f_hi = branch(hi);
        widenings += 1;
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket {
            lo,
            hi,
            context: "implied growth never reaches observed growth",
        });
    }
    brent_root(branch, lo, hi, 1e-14)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: &'static str,
    pub gamma: f64,
    pub implied: f64,
    pub observed: f64,
}

impl Scenario {
    /// `"exceeds"` when observed growth outpaces the implied bound.
    pub fn verdict(&self) -> &'static str {
        if self.observed > self.implied {
            "exceeds"
        } else if self.observed < self.implied {
            "within"
        } else {
            "equal"
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendReport {
    pub rates: TrendRates,
    pub scenarios: Vec<Scenario>,
    /// Error text when no break-even curvature exists.
    pub break_even: std::result::Result<f64, String>,
}

/// Observed against implied growth under linear (`gamma = -1`) and log
/// (`gamma = 0`) demand, with and without hardware progress, plus the
/// break-even curvature.
pub fn trend_report(rates: &TrendRates) -> Result<TrendReport> {
    rates.validate()?;
    let mut scenarios = Vec::with_capacity(4);
    for (name, gamma, stalled) in [
        ("baseline", -1.0, false),
        ("baseline", 0.0, false),
        ("stalled", -1.0, true),
        ("stalled", 0.0, true),
    ] {
        let implied = if stalled {
            stalled_hardware_growth(rates, gamma)?
        } else {
            implied_growth(rates, gamma)?
        };
        scenarios.push(Scenario {
            name,
            gamma,
            implied,
            observed: rates.g_c_observed,
        });
    }
    Ok(TrendReport {
        rates: *rates,
        scenarios,
        break_even: break_even_gamma(rates).map_err(|e| e.to_string()),
    })
}

impl TrendReport {
    pub fn scenarios_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Scenario> + 'a {
        self.scenarios.iter().filter(move |s| s.name == name)
    }

    /// Key-value text, formatting every number with `fmt`.
    pub fn to_text(&self, stalled_only: bool, fmt: impl Fn(f64) -> String) -> String {
        let mut out = String::new();
        let r = &self.rates;
        let _ = writeln!(out, "g_E = {}", fmt(r.g_e));
        let _ = writeln!(out, "g_alg = {}", fmt(r.g_alg));
        let _ = writeln!(out, "g_C = {}", fmt(r.g_c_observed));
        let _ = writeln!(out, "alpha = {}", fmt(r.alpha));
        let _ = writeln!(out, "split = {}", fmt(r.split));
        for s in &self.scenarios {
            if stalled_only && s.name != "stalled" {
                continue;
            }
            let _ = writeln!(
                out,
                "{}.gamma[{}].implied = {}",
                s.name,
                fmt(s.gamma),
                fmt(s.implied)
            );
            let _ = writeln!(
                out,
                "{}.gamma[{}].verdict = {}",
                s.name,
                fmt(s.gamma),
                s.verdict()
            );
        }
        if !stalled_only {
            match &self.break_even {
                Ok(g) => {
                    let _ = writeln!(out, "break_even_gamma = {}", fmt(*g));
                }
                Err(e) => {
                    let _ = writeln!(out, "break_even_gamma = none ({e})");
                }
            }
        }
        out
    }

    pub fn to_csv(&self, fmt: impl Fn(f64) -> String) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for s in &self.scenarios {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                s.name,
                fmt(s.gamma),
                fmt(s.implied),
                fmt(s.observed),
                s.verdict()
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_demand_growth() {
        let r = TrendRates::default();
        assert!((implied_growth(&r, 0.0).unwrap() - 4.11).abs() < 1e-12);
        assert_eq!(stalled_hardware_growth(&r, 0.0).unwrap(), 3.0);
    }

    #[test]
    fn linear_demand_growth_follows_formula() {
        let r = TrendRates::default();
        let expected = 1.37f64.powf(1.3 / 0.7) * 3f64.powf(1.0 / 0.7);
        assert!((implied_growth(&r, -1.0).unwrap() - expected).abs() < 1e-12);
        let stalled = 3f64.powf(1.0 / 0.7);
        assert!((stalled_hardware_growth(&r, -1.0).unwrap() - stalled).abs() < 1e-12);
    }

    #[test]
    fn no_exogenous_growth() {
        let r = TrendRates {
            g_e: 1.0,
            g_alg: 1.0,
            ..TrendRates::default()
        };
        for g in [-1.0, -0.3, 0.0, 0.7, 2.0] {
            assert_eq!(implied_growth(&r, g).unwrap(), 1.0);
            assert_eq!(stalled_hardware_growth(&r, g).unwrap(), 1.0);
        }
    }

    #[test]
    fn break_even_default() {
        let r = TrendRates::default();
        let g = break_even_gamma(&r).unwrap();
        assert!((g + 0.77).abs() < 0.01, "{g}");
        assert!((implied_growth(&r, g).unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn break_even_fixed_points() {
        let base = TrendRates::default();
        let at_zero = TrendRates {
            g_c_observed: implied_growth(&base, 0.0).unwrap(),
            ..base
        };
        assert_eq!(break_even_gamma(&at_zero).unwrap(), 0.0);
        let at_minus_one = TrendRates {
            g_c_observed: implied_growth(&base, -1.0).unwrap(),
            ..base
        };
        assert!((break_even_gamma(&at_minus_one).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn break_even_without_root() {
        let r = TrendRates {
            g_e: 1.0,
            g_alg: 1.0,
            ..TrendRates::default()
        };
        assert!(break_even_gamma(&r).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let r = TrendRates::default();
        assert!(implied_growth(&r, -1.0 / 0.3).is_err());
        assert!(implied_growth(&r, -4.0).is_err());
        assert!(implied_growth(&TrendRates { split: 1.5, ..r }, 0.0).is_err());
        assert!(implied_growth(&TrendRates { g_e: 0.0, ..r }, 0.0).is_err());
    }

    #[test]
    fn full_split_doubles_algorithmic_exponent() {
        let r = TrendRates {
            split: 1.0,
            ..TrendRates::default()
        };
        let expected = 1.37f64.powf(1.3 / 0.7) * 3f64.powf(2.0 / 0.7);
        assert!((implied_growth(&r, -1.0).unwrap() - expected).abs() < 1e-10);
        assert!((implied_growth(&r, 0.0).unwrap() - 1.37 * 9.0).abs() < 1e-12);
    }

    #[test]
    fn report_defaults() {
        let rep = trend_report(&TrendRates::default()).unwrap();
        let v: Vec<&str> = rep.scenarios.iter().map(|s| s.verdict()).collect();
        assert_eq!(v, ["within", "exceeds", "exceeds", "exceeds"]);
        assert!(rep.break_even.is_ok());
        let csv = rep.to_csv(|x| x.to_string());
        assert!(csv.starts_with(CSV_HEADER));
        assert!(csv.contains("\nbaseline,-1,") && csv.contains(",5,exceeds\n"));
        let text = rep.to_text(true, |x| x.to_string());
        assert!(text.contains("stalled.gamma[0].implied = 3\n"));
        assert!(!text.contains("baseline"));
    }

    #[test]
    fn report_zero_growth() {
        let rep = trend_report(&TrendRates {
            g_e: 1.0,
            g_alg: 1.0,
            g_c_observed: 1.0,
            ..TrendRates::default()
        })
        .unwrap();
        assert!(rep.scenarios.iter().all(|s| s.verdict() == "equal"));
    }
}
