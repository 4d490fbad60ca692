//! Inverse demand for tokens and the quality-linking functions.
//!
//! Price per token is `omega * f_gamma(q) - delta * t`, where the linking
//! function `f_gamma` is the integral of the reservation-quality density
//! `q_*^-(1 + gamma)` from 1 to `q`.

use crate::error::{positive, Error, Result};
use crate::numeric::adaptive_simpson;

/// Below this magnitude `gamma` is treated as zero and the log form is used.
pub const GAMMA_ZERO_TOL: f64 = 1e-9;

/// Parameters of the quasilinear inverse demand function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandParams {
    /// Price scale per unit of linked quality.
    pub omega: f64,
    /// Price drop per additional token sold.
    pub delta: f64,
    /// Curvature of the linking function; `-1` is linear in quality.
    pub gamma: f64,
}

impl DemandParams {
    pub fn new(omega: f64, delta: f64, gamma: f64) -> Result<Self> {
        let params = Self {
            omega,
            delta,
            gamma,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        positive("omega", self.omega)?;
        positive("delta", self.delta)?;
        check_gamma(self.gamma)
    }

    /// Price per token when `t` tokens are sold from a model of quality `q`.
    ///
    /// May be negative; the firm never sells there because the token
    /// optimum is clamped at zero.
    pub fn price(&self, t: f64, q: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain {
                name: "t",
                value: t,
                reason: "tokens sold must be non-negative",
            });
        }
        Ok(self.omega * linking(self.gamma, q)? - self.delta * t)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= -1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "gamma",
            value: gamma,
            reason: "curvature exponent must satisfy gamma >= -1",
        })
    }
}

/// The linking function `f_gamma(q)`: `ln q` at `gamma = 0`, otherwise
/// `(1 - q^-gamma) / gamma`.
///
/// Defined for every `q > 0`; it is zero at `q = 1` and strictly increasing.
pub fn linking(gamma: f64, q: f64) -> Result<f64> {
    check_gamma(gamma)?;
    positive("q", q)?;
    let log_q = q.ln();
    if gamma.abs() < GAMMA_ZERO_TOL {
        Ok(log_q)
    } else {
        // 1 - q^-gamma = -expm1(-gamma ln q), exact near q = 1
        Ok(-(-gamma * log_q).exp_m1() / gamma)
    }
}

/// Derivative of the linking function, `q^-(1 + gamma)`.
pub fn linking_deriv(gamma: f64, q: f64) -> Result<f64> {
    check_gamma(gamma)?;
    positive("q", q)?;
    Ok(q.powf(-(1.0 + gamma)))
}

/// Quadrature of the reservation-quality density over `[1, q]`.
///
/// A cross-check for [`linking`]; integrates in log-quality, where the
/// density becomes `exp(-gamma u)` on `[0, ln q]`.
pub fn linking_oracle(gamma: f64, q: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::Domain {
            name: "q",
            value: q,
            reason: "oracle covers the integral's support q >= 1 only",
        });
    }
    adaptive_simpson(|u| (-gamma * u).exp(), 0.0, q.ln(), 1e-13)
}
