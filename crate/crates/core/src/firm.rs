//! Revenue, cost and profit of a monopolist LLM firm.
//!
//! The firm picks a parameter count `n`, a training budget `d` (tokens) and
//! a number of tokens sold `t`. Compute costs `1/E` dollars per FLOP, with
//! `6nd` FLOPs for training and `2nt` for inference. Training data are free.

use std::fmt;

use crate::demand::{linking, linking_deriv, DemandParams};
use crate::error::{non_negative, positive, Error, Result};
use crate::scaling::LeontiefLaw;

/// Everything the firm takes as given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirmParams {
    pub demand: DemandParams,
    pub law: LeontiefLaw,
    /// Hardware efficiency, FLOPs per dollar.
    pub efficiency: f64,
    /// Optional cap on training tokens.
    pub data_cap: Option<f64>,
}

/// Dollar cost split into its training and inference parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cost {
    pub train: f64,
    pub inference: f64,
}

impl Cost {
    pub fn total(&self) -> f64 {
        self.train + self.inference
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    ComputeBound,
    DataBound,
    Shutdown,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::ComputeBound => "compute-bound",
            Regime::DataBound => "data-bound",
            Regime::Shutdown => "shutdown",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The firm's chosen inputs and outputs at an optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirmSolution {
    pub n_star: f64,
    pub d_star: f64,
    pub t_star: f64,
    pub profit: f64,
    pub c_train: f64,
    pub c_inf: f64,
    pub regime: Regime,
    /// `|dπ/dn|` at `n_star` when the closed-form derivative applies.
    pub foc_residual: Option<f64>,
}

impl FirmSolution {
    pub fn shutdown() -> Self {
        Self {
            n_star: 0.0,
            d_star: 0.0,
            t_star: 0.0,
            profit: 0.0,
            c_train: 0.0,
            c_inf: 0.0,
            regime: Regime::Shutdown,
            foc_residual: None,
        }
    }

    /// Assemble a solution from the chosen inputs; costs and profit are
    /// recomputed from `params`.
    pub fn at(params: &FirmParams, n: f64, d: f64, t: f64, regime: Regime) -> Result<Self> {
        let cost = params.cost(n, d, t)?;
        Ok(Self {
            n_star: n,
            d_star: d,
            t_star: t,
            profit: params.profit(n, d, t)?,
            c_train: cost.train,
            c_inf: cost.inference,
            regime,
            foc_residual: None,
        })
    }
}

impl FirmParams {
    pub fn new(
        demand: DemandParams,
        law: LeontiefLaw,
        efficiency: f64,
        data_cap: Option<f64>,
    ) -> Result<Self> {
        let params = Self {
            demand,
            law,
            efficiency,
            data_cap,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        self.demand.validate()?;
        self.law.validate()?;
        positive("E", self.efficiency)?;
        if let Some(cap) = self.data_cap {
            positive("D", cap)?;
        }
        Ok(())
    }

    /// Dollars per FLOP.
    pub fn compute_price(&self) -> f64 {
        1.0 / self.efficiency
    }

    /// The hardware efficiency `1 / (6 δ ρ)` above which the asymptotic
    /// bounds on the optimum apply.
    pub fn interior_threshold(&self) -> f64 {
        1.0 / (6.0 * self.demand.delta * self.law.rho())
    }

    pub fn above_interior_threshold(&self) -> bool {
        self.efficiency > self.interior_threshold()
    }

    pub fn with_efficiency(mut self, efficiency: f64) -> Self {
        self.efficiency = efficiency;
        self
    }

    pub fn with_data_cap(mut self, data_cap: Option<f64>) -> Self {
        self.data_cap = data_cap;
        self
    }

    pub fn cost(&self, n: f64, d: f64, t: f64) -> Result<Cost> {
        non_negative("n", n)?;
        non_negative("d", d)?;
        non_negative("t", t)?;
        Ok(Cost {
            train: 6.0 * n * d / self.efficiency,
            inference: 2.0 * n * t / self.efficiency,
        })
    }

    fn linked_quality(&self, n: f64, d: f64) -> Result<f64> {
        linking(self.demand.gamma, self.law.quality(n, d)?)
    }

    pub fn revenue(&self, n: f64, d: f64, t: f64) -> Result<f64> {
        non_negative("t", t)?;
        let f = self.linked_quality(n, d)?;
        Ok(self.demand.omega * t * f - self.demand.delta * t * t)
    }

    /// Profit as a function of all three choices.
    pub fn profit(&self, n: f64, d: f64, t: f64) -> Result<f64> {
        Ok(self.revenue(n, d, t)? - self.cost(n, d, t)?.total())
    }

    /// Stationary point of the (concave, quadratic) profit in `t`, without
    /// the `t >= 0` constraint.
    pub fn unclamped_tokens(&self, n: f64, d: f64) -> Result<f64> {
        let f = self.linked_quality(n, d)?;
        Ok(self.token_optimum_from_linked(f, n))
    }

    fn token_optimum_from_linked(&self, linked: f64, n: f64) -> f64 {
        (self.demand.omega * linked - 2.0 * n / self.efficiency) / (2.0 * self.demand.delta)
    }

    /// Profit-maximizing tokens sold for fixed `n` and `d`.
    pub fn optimal_tokens(&self, n: f64, d: f64) -> Result<f64> {
        Ok(self.unclamped_tokens(n, d)?.max(0.0))
    }

    /// Profit with the token choice already optimized out.
    ///
    /// When the unclamped optimum is not positive the firm sells nothing
    /// but has still paid for training.
    pub fn profit_given_inputs(&self, n: f64, d: f64) -> Result<f64> {
        let f = self.linked_quality(n, d)?;
        let train = 6.0 * n * d / self.efficiency;
        if self.token_optimum_from_linked(f, n) > 0.0 {
            let margin = self.demand.omega * f - 2.0 * n / self.efficiency;
            Ok(margin * margin / (4.0 * self.demand.delta) - train)
        } else {
            Ok(-train)
        }
    }

    /// Profit along the quality-matched frontier `d = matched_d(n)`.
    ///
    /// Valid for any pair of exponents; [`Self::profit_given_size`] is the
    /// equal-exponent special case.
    pub fn frontier_profit(&self, n: f64) -> Result<f64> {
        self.profit_given_inputs(n, self.law.matched_d(n)?)
    }

    /// Single-variable profit `π(n) = π(n, ρ n)`; needs `alpha == beta`.
    pub fn profit_given_size(&self, n: f64) -> Result<f64> {
        self.require_equal_exponents()?;
        self.frontier_profit(n)
    }

    fn require_equal_exponents(&self) -> Result<()> {
        if self.law.exponents_equal() {
            Ok(())
        } else {
            Err(Error::UnequalExponents {
                alpha: self.law.alpha,
                beta: self.law.beta,
            })
        }
    }

    /// Analytic derivative of [`Self::profit_given_size`]:
    ///
    /// `π'(n) = (ω²/2δ) F F' − (ω/δE)(F + n F') + (2/E)(1/(δE) − 6ρ) n`
    ///
    /// with `F = f(a n^α)` and `F'` its derivative in `n`. Only defined where
    /// the token optimum is interior.
    pub fn foc_derivative(&self, n: f64) -> Result<f64> {
        self.require_equal_exponents()?;
        positive("n", n)?;
        let (omega, delta, gamma) = (self.demand.omega, self.demand.delta, self.demand.gamma);
        let e = self.efficiency;
        let law = &self.law;
        let q = law.parameter_branch(n);
        let f = linking(gamma, q)?;
        let t_star = self.token_optimum_from_linked(f, n);
        if t_star <= 0.0 {
            return Err(Error::NonInteriorTokens { n, t_star });
        }
        let f_prime = linking_deriv(gamma, q)? * law.a * law.alpha * n.powf(law.alpha - 1.0);
        Ok(
            omega * omega / (2.0 * delta) * f * f_prime - omega / (delta * e) * (f + f_prime * n)
                + 2.0 / e * (1.0 / (delta * e) - 6.0 * law.rho()) * n,
        )
    }
}
