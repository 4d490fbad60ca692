//! Flat dotted-key configuration (`demand.omega = 1.0`, `firm.E = 1e9`, ...)
//! with command-line overrides, plus the number format used in reports.

use std::collections::BTreeMap;
use std::path::Path;

use crate::demand::DemandParams;
use crate::error::{Error, Result};
use crate::firm::FirmParams;
use crate::scaling::{ChinchillaLaw, LeontiefLaw};
use crate::statics::{SweepParameter, SweepSpec};
use crate::trends::TrendRates;

/// Every key the config understands.
pub const KEYS: &[&str] = &[
    "demand.omega",
    "demand.delta",
    "demand.gamma",
    "law.a",
    "law.alpha",
    "law.b",
    "law.beta",
    "firm.E",
    "firm.D",
    "trends.g_E",
    "trends.g_alg",
    "trends.g_C",
    "trends.alpha",
    "trends.split",
    "elasticity.l_star",
    "elasticity.a",
    "elasticity.alpha",
    "elasticity.b",
    "elasticity.beta",
    "elasticity.n",
    "elasticity.d",
    "sweep.parameter",
    "sweep.lo",
    "sweep.hi",
    "sweep.points",
    "sweep.fit_lo",
    "sweep.fit_hi",
    "oracle.points",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
}

/// Raw key/value pairs, before typing and validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, Value>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        let mut raw = RawConfig::default();
        flatten("", &table, &mut raw.entries)?;
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Apply one `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {assignment:?} is not key=value")))?;
        let key = key.trim();
        check_key(key)?;
        let value = value.trim();
        let parsed = match value.parse::<f64>() {
            Ok(v) => Value::Number(v),
            Err(_) => Value::Text(value.trim_matches('"').to_string()),
        };
        self.entries.insert(key.to_string(), parsed);
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    fn number(&self, key: &str, default: f64) -> Result<f64> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(Value::Number(v)) => Ok(*v),
            Some(Value::Text(t)) => {
                Err(Error::Config(format!("{key} must be a number, got {t:?}")))
            }
        }
    }

    fn optional_number(&self, key: &str) -> Result<Option<f64>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(_) => self.number(key, f64::NAN).map(Some),
        }
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        let v = self.number(key, default as f64)?;
        if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
            Ok(v as usize)
        } else {
            Err(Error::Config(format!(
                "{key} must be a non-negative integer, got {v}"
            )))
        }
    }
}

fn check_key(key: &str) -> Result<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(Error::Config(format!("unknown config key {key:?}")))
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, Value>) -> Result<()> {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        let value = match v {
            toml::Value::Table(inner) => {
                flatten(&key, inner, out)?;
                continue;
            }
            toml::Value::Float(f) => Value::Number(*f),
            toml::Value::Integer(i) => Value::Number(*i as f64),
            toml::Value::String(s) => Value::Text(s.clone()),
            other => {
                return Err(Error::Config(format!(
                    "{key} has unsupported type {}",
                    other.type_str()
                )))
            }
        };
        check_key(&key)?;
        out.insert(key, value);
    }
    Ok(())
}

/// The smooth law and the point at which its elasticity is reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticityProbe {
    pub law: ChinchillaLaw,
    pub n: f64,
    pub d: f64,
}

/// A sweep described in the config file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSettings {
    pub spec: SweepSpec,
    pub fit_window: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub firm: FirmParams,
    pub trends: TrendRates,
    pub elasticity: ElasticityProbe,
    pub sweep: Option<SweepSettings>,
    /// Grid points per axis for the brute-force cross-check.
    pub oracle_points: usize,
}

/// Default pack: unit demand and efficiency scales, `alpha = beta = 0.3`,
/// log demand, growth rates 1.37 / 3 / 5 and the Hoffmann et al. exponents
/// (0.3392, 0.2849) for the elasticity probe.
pub fn reference_defaults() -> Config {
    Config::from_raw(&RawConfig::default()).expect("defaults are valid")
}

fn invalid(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl Config {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let demand = DemandParams::new(
            raw.number("demand.omega", 1.0)?,
            raw.number("demand.delta", 1.0)?,
            raw.number("demand.gamma", 0.0)?,
        )
        .map_err(invalid)?;
        let law = LeontiefLaw::new(
            raw.number("law.a", 1.0)?,
            raw.number("law.alpha", 0.3)?,
            raw.number("law.b", 1.0)?,
            raw.number("law.beta", 0.3)?,
        )
        .map_err(invalid)?;
        let firm = FirmParams::new(
            demand,
            law,
            raw.number("firm.E", 1e9)?,
            raw.optional_number("firm.D")?,
        )
        .map_err(invalid)?;

        let trends = TrendRates {
            g_e: raw.number("trends.g_E", 1.37)?,
            g_alg: raw.number("trends.g_alg", 3.0)?,
            g_c_observed: raw.number("trends.g_C", 5.0)?,
            alpha: raw.number("trends.alpha", 0.3)?,
            split: raw.number("trends.split", 0.5)?,
        };
        trends.validate().map_err(invalid)?;

        let elasticity = ElasticityProbe {
            law: ChinchillaLaw::new(
                raw.number("elasticity.l_star", 0.0)?,
                raw.number("elasticity.a", 1.0)?,
                raw.number("elasticity.alpha", 0.3392)?,
                raw.number("elasticity.b", 1.0)?,
                raw.number("elasticity.beta", 0.2849)?,
            )
            .map_err(invalid)?,
            n: raw.number("elasticity.n", 1e9)?,
            d: raw.number("elasticity.d", 1e9)?,
        };
        if !(elasticity.n > 0.0 && elasticity.d > 0.0) {
            return Err(Error::Config(
                "elasticity.n and elasticity.d must be positive".into(),
            ));
        }

        let sweep = match raw.get("sweep.parameter") {
            None => None,
            Some(Value::Number(v)) => {
                return Err(Error::Config(format!(
                    "sweep.parameter must be E, a, b or D, got {v}"
                )))
            }
            Some(Value::Text(name)) => {
                let spec = SweepSpec {
                    parameter: name.parse::<SweepParameter>()?,
                    lo: raw.number("sweep.lo", f64::NAN)?,
                    hi: raw.number("sweep.hi", f64::NAN)?,
                    points: raw.count("sweep.points", 40)?,
                    base: firm,
                };
                spec.validate().map_err(invalid)?;
                let fit_window = match (
                    raw.optional_number("sweep.fit_lo")?,
                    raw.optional_number("sweep.fit_hi")?,
                ) {
                    (None, None) => None,
                    (lo, hi) => Some((lo.unwrap_or(spec.lo), hi.unwrap_or(spec.hi))),
                };
                Some(SweepSettings { spec, fit_window })
            }
        };

        Ok(Config {
            firm,
            trends,
            elasticity,
            sweep,
            oracle_points: raw.count("oracle.points", 40)?,
        })
    }

    /// Load `path` (if any), apply overrides in order, then validate.
    pub fn resolve(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut raw = match path {
            Some(p) => RawConfig::load(p)?,
            None => RawConfig::default(),
        };
        for o in overrides {
            raw.set(o)?;
        }
        Self::from_raw(&raw)
    }
}

/// 12 significant digits; scientific notation when `|x| >= 1e6` or
/// `0 < |x| < 1e-4`. Trailing zeros are dropped.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs();
    if !(1e-4..1e6).contains(&mag) {
        let s = format!("{x:.11e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent present");
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (11 - mag.log10().floor() as i32).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(3.0), "3");
        assert_eq!(format_number(4.11), "4.11");
        assert_eq!(format_number(-0.77), "-0.77");
        assert_eq!(format_number(1e9), "1e9");
        assert_eq!(format_number(123456.7), "123456.7");
        assert_eq!(format_number(1234567.0), "1.234567e6");
        assert_eq!(format_number(5e-5), "5e-5");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(2.0 / 3.0 * 1e7), "6.66666666667e6");
        assert_eq!(format_number(0.0001), "0.0001");
    }

    #[test]
    fn dotted_keys_and_tables_agree() {
        let a = RawConfig::parse("demand.omega = 2.5\nlaw.alpha = 0.4\n").unwrap();
        let b = RawConfig::parse("[demand]\nomega = 2.5\n[law]\nalpha = 0.4\n").unwrap();
        assert_eq!(a, b);
        let cfg = Config::from_raw(&a).unwrap();
        assert_eq!(cfg.firm.demand.omega, 2.5);
        assert_eq!(cfg.firm.law.alpha, 0.4);
        assert_eq!(cfg.firm.law.beta, 0.3);
    }

    #[test]
    fn integers_are_numbers() {
        let raw = RawConfig::parse("firm.E = 1000000\nsweep.parameter = \"E\"\nsweep.lo = 1\nsweep.hi = 100\nsweep.points = 5").unwrap();
        let cfg = Config::from_raw(&raw).unwrap();
        assert_eq!(cfg.firm.efficiency, 1e6);
        let s = cfg.sweep.unwrap();
        assert_eq!(s.spec.points, 5);
        assert_eq!(s.fit_window, None);
    }

    #[test]
    fn overrides_win() {
        let mut raw = RawConfig::parse("demand.gamma = -1").unwrap();
        raw.set("demand.gamma=0.5").unwrap();
        raw.set("firm.D = 1e3").unwrap();
        let cfg = Config::from_raw(&raw).unwrap();
        assert_eq!(cfg.firm.demand.gamma, 0.5);
        assert_eq!(cfg.firm.data_cap, Some(1e3));
        assert!(raw.set("nonsense").is_err());
        assert!(raw.set("demand.typo=1").is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        let bad_gamma = RawConfig::parse("demand.gamma = -2").unwrap();
        let err = Config::from_raw(&bad_gamma).unwrap_err().to_string();
        assert!(err.contains("gamma >= -1"), "{err}");
        assert!(RawConfig::parse("demand.omegaa = 1").is_err());
        assert!(RawConfig::parse("demand.omega = [1, 2]").is_err());
        assert!(RawConfig::parse("demand.omega = ").is_err());
        let text = RawConfig::parse("demand.omega = \"one\"").unwrap();
        assert!(Config::from_raw(&text).is_err());
        let pts = RawConfig::parse("oracle.points = 2.5").unwrap();
        assert!(Config::from_raw(&pts).is_err());
    }

    #[test]
    fn defaults() {
        let cfg = reference_defaults();
        assert_eq!(cfg.trends, TrendRates::default());
        assert_eq!(cfg.firm.law, LeontiefLaw::new(1.0, 0.3, 1.0, 0.3).unwrap());
        assert_eq!(cfg.firm.demand.gamma, 0.0);
        assert_eq!(cfg.firm.data_cap, None);
        assert_eq!(
            (cfg.elasticity.law.alpha, cfg.elasticity.law.beta),
            (0.3392, 0.2849)
        );
        assert!(cfg.sweep.is_none());
    }
}
