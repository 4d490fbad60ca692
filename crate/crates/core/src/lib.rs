//! Microeconomic model of a profit-maximizing LLM firm.
//!
//! A monopolist chooses model size `n` and training tokens `d`, then how
//! many tokens `t` to sell. Quality follows a Leontief scaling law, demand is
//! quasilinear in a quality-linking function, and compute costs `1/E`
//! dollars per FLOP. The crate evaluates this model, solves for the
//! profit-maximizing choices in the compute-bound and data-bound regimes,
//! sweeps exogenous parameters to measure scaling exponents, and turns annual
//! efficiency growth rates into implied growth of optimal training spend.

pub mod cli;
pub mod config;
pub mod demand;
pub mod error;
pub mod firm;
pub mod numeric;
pub mod scaling;
pub mod solver;
pub mod statics;
pub mod trends;

pub use demand::DemandParams;
pub use error::{Error, Result};
pub use firm::{Cost, FirmParams, FirmSolution, Regime};
pub use scaling::{ChinchillaLaw, LeontiefLaw};
pub use statics::{ExponentReport, SweepParameter, SweepSpec};
pub use trends::TrendRates;
