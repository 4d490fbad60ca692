//! Model quality as a function of parameter count `n` and training tokens `d`.
//!
//! [`LeontiefLaw`] treats parameters and data as perfect complements and is
//! what the firm model uses. [`ChinchillaLaw`] is the smooth law whose
//! elasticity of substitution motivates that idealization.

use crate::error::{positive, Error, Result};
use crate::numeric::brent_root;

fn check_exponent(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "scaling exponent must lie in (0, 1]",
        })
    }
}

/// `q(n, d) = min(a n^alpha, b d^beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeontiefLaw {
    /// Parameter efficiency.
    pub a: f64,
    pub alpha: f64,
    /// Data efficiency.
    pub b: f64,
    pub beta: f64,
}

impl LeontiefLaw {
    pub fn new(a: f64, alpha: f64, b: f64, beta: f64) -> Result<Self> {
        let law = Self { a, alpha, b, beta };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        positive("a", self.a)?;
        positive("b", self.b)?;
        check_exponent("alpha", self.alpha)?;
        check_exponent("beta", self.beta)
    }

    /// Quality reachable with `n` parameters when data is not the bottleneck.
    pub fn parameter_branch(&self, n: f64) -> f64 {
        self.a * n.powf(self.alpha)
    }

    /// Quality reachable with `d` tokens when parameters are not the bottleneck.
    pub fn data_branch(&self, d: f64) -> f64 {
        self.b * d.powf(self.beta)
    }

    pub fn quality(&self, n: f64, d: f64) -> Result<f64> {
        positive("n", n)?;
        positive("d", d)?;
        Ok(self.parameter_branch(n).min(self.data_branch(d)))
    }

    /// The token budget that exactly matches `n` parameters: `a n^alpha = b d^beta`.
    pub fn matched_d(&self, n: f64) -> Result<f64> {
        positive("n", n)?;
        Ok(self.rho() * n.powf(self.alpha / self.beta))
    }

    /// The parameter count that exactly matches `d` tokens.
    pub fn matched_n(&self, d: f64) -> Result<f64> {
        positive("d", d)?;
        Ok((self.b / self.a).powf(1.0 / self.alpha) * d.powf(self.beta / self.alpha))
    }

    /// Parameter-to-token efficiency factor, so that the matched budget is
    /// `d = rho * n^(alpha / beta)`.
    pub fn rho(&self) -> f64 {
        (self.a / self.b).powf(1.0 / self.beta)
    }

    pub fn exponents_equal(&self) -> bool {
        self.alpha == self.beta
    }
}

/// `loss(n, d) = l_star + a / n^alpha + b / d^beta`, with quality defined as
/// the inverse of the reducible loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChinchillaLaw {
    /// Irreducible loss.
    pub l_star: f64,
    pub a: f64,
    pub alpha: f64,
    pub b: f64,
    pub beta: f64,
}

impl ChinchillaLaw {
    pub fn new(l_star: f64, a: f64, alpha: f64, b: f64, beta: f64) -> Result<Self> {
        let law = Self {
            l_star,
            a,
            alpha,
            b,
            beta,
        };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l_star.is_finite() && self.l_star >= 0.0) {
            return Err(Error::Domain {
                name: "l_star",
                value: self.l_star,
                reason: "irreducible loss must be non-negative",
            });
        }
        positive("a", self.a)?;
        positive("b", self.b)?;
        check_exponent("alpha", self.alpha)?;
        check_exponent("beta", self.beta)
    }

    pub fn loss(&self, n: f64, d: f64) -> Result<f64> {
        Ok(self.l_star + self.reducible_loss(n, d)?)
    }

    fn reducible_loss(&self, n: f64, d: f64) -> Result<f64> {
        positive("n", n)?;
        positive("d", d)?;
        Ok(self.a * n.powf(-self.alpha) + self.b * d.powf(-self.beta))
    }

    pub fn quality(&self, n: f64, d: f64) -> Result<f64> {
        Ok(1.0 / self.reducible_loss(n, d)?)
    }

    /// Marginal rate of technical substitution, `(dq/dn) / (dq/dd)`.
    pub fn mrts(&self, n: f64, d: f64) -> Result<f64> {
        positive("n", n)?;
        positive("d", d)?;
        Ok(self.a * self.alpha * d.powf(1.0 + self.beta)
            / (self.b * self.beta * n.powf(1.0 + self.alpha)))
    }

    /// Closed-form elasticity of substitution; `1 / (1 + alpha)` whenever
    /// `alpha == beta`.
    pub fn elasticity(&self, n: f64, d: f64) -> Result<f64> {
        positive("n", n)?;
        positive("d", d)?;
        let (a, b, al, be) = (self.a, self.b, self.alpha, self.beta);
        let ad = a * al * d.powf(be);
        let bn = b * be * n.powf(al);
        Ok((ad + bn) / (ad * (be + 1.0) + (al + 1.0) * bn))
    }

    /// Numerical elasticity: walk along the iso-quality curve through
    /// `(n, d)` by a relative step `1e-5` in `n`, re-solve for `d`, and take
    /// the ratio of log-differences of `d / n` and the MRTS.
    pub fn elasticity_oracle(&self, n: f64, d: f64) -> Result<f64> {
        const STEP: f64 = 1e-5;
        let target = self.reducible_loss(n, d)?;
        let iso_d = |n_probe: f64| -> Result<f64> {
            let g = |log_d: f64| {
                self.a * n_probe.powf(-self.alpha) + self.b * (-self.beta * log_d).exp() - target
            };
            let x0 = d.ln();
            let mut width = 1e-3;
            // g is decreasing in log d; widen until it changes sign
            loop {
                let (lo, hi) = (x0 - width, x0 + width);
                if g(lo) > 0.0 && g(hi) < 0.0 {
                    return Ok(brent_root(g, lo, hi, 1e-12)?.exp());
                }
                width *= 4.0;
                if width > 200.0 {
                    return Err(Error::NoBracket {
                        lo,
                        hi,
                        context: "iso-quality solve",
                    });
                }
            }
        };
        let (n_hi, n_lo) = (n * (1.0 + STEP), n * (1.0 - STEP));
        let (d_hi, d_lo) = (iso_d(n_hi)?, iso_d(n_lo)?);
        let dlog_ratio = (d_hi / n_hi).ln() - (d_lo / n_lo).ln();
        let dlog_mrts = self.mrts(n_hi, d_hi)?.ln() - self.mrts(n_lo, d_lo)?.ln();
        Ok(dlog_ratio / dlog_mrts)
    }
}
