//! Numerical solution of the firm's profit maximization problem.
//!
//! [`maximize`] works on the quality-matched frontier: any optimum with
//! positive sales uses exactly as many tokens as its parameters can absorb,
//! so profit reduces to a function of `n` alone. That function is scanned on
//! a log grid, the best local peaks are refined by golden-section search, and
//! the winner is compared against shutting down.
//!
//! [`brute_force`] evaluates the three-variable profit on an explicit grid
//! and exists to cross-check the solver.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::firm::{FirmParams, FirmSolution, Regime};
use crate::numeric::{golden_max, linspace, logspace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub n_min: f64,
    pub n_max: f64,
    pub scan_points: usize,
    /// Relative tolerance on `n` for the local refinement.
    pub rel_tol: f64,
    /// How many times the scan range may grow ×100 before giving up.
    pub max_extensions: usize,
    /// Number of local peaks of the coarse scan that get refined.
    pub candidates: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            n_min: 1e-6,
            n_max: 1e12,
            scan_points: 600,
            rel_tol: 1e-10,
            max_extensions: 8,
            candidates: 3,
        }
    }
}

pub fn maximize(params: &FirmParams) -> Result<FirmSolution> {
    maximize_with(params, &SolverOptions::default())
}

/// Unconstrained (compute-bound) optimum; any data cap on `params` is ignored.
pub fn maximize_with(params: &FirmParams, opts: &SolverOptions) -> Result<FirmSolution> {
    params.validate()?;
    if opts.scan_points < 3 || !(opts.n_min > 0.0 && opts.n_max > opts.n_min) {
        return Err(Error::InvalidParams(format!(
            "scan needs 3+ points on a positive range, got {} on [{}, {}]",
            opts.scan_points, opts.n_min, opts.n_max
        )));
    }
    let reduced = |n: f64| params.frontier_profit(n);

    let (mut lo, mut hi) = (opts.n_min, opts.n_max);
    let mut edge_n = hi;
    for _ in 0..=opts.max_extensions {
        let grid = logspace(lo, hi, opts.scan_points);
        let values = grid
            .iter()
            .map(|&n| reduced(n))
            .collect::<Result<Vec<_>>>()?;
        let last = values.len() - 1;
        let best = argmax(&values);
        if values[best] > 0.0 && best == last {
            edge_n = hi;
            hi *= 100.0;
            continue;
        }
        if values[best] > 0.0 && best == 0 {
            edge_n = lo;
            lo /= 100.0;
            continue;
        }

        let mut peaks: Vec<usize> = (1..last)
            .filter(|&i| {
                values[i] > 0.0 && values[i] >= values[i - 1] && values[i] >= values[i + 1]
            })
            .collect();
        peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
        peaks.truncate(opts.candidates.max(1));

        let mut winner: Option<(f64, f64)> = None;
        for &i in &peaks {
            let (log_n, value) = golden_max(
                |u| reduced(u.exp()).unwrap_or(f64::NEG_INFINITY),
                grid[i - 1].ln(),
                grid[i + 1].ln(),
                opts.rel_tol,
            );
            // the refined point can only lose to its own grid sample through rounding
            let (n, value) = if value >= values[i] {
                (log_n.exp(), value)
            } else {
                (grid[i], values[i])
            };
            if winner.is_none_or(|(_, v)| value > v) {
                winner = Some((n, value));
            }
        }

        return match winner {
            Some((n, value)) if value > 0.0 => {
                solution_on_frontier(params, n, Regime::ComputeBound)
            }
            _ => Ok(FirmSolution::shutdown()),
        };
    }
    Err(Error::ScanBoundary { n: edge_n, lo, hi })
}

fn solution_on_frontier(params: &FirmParams, n: f64, regime: Regime) -> Result<FirmSolution> {
    let d = params.law.matched_d(n)?;
    let t = params.optimal_tokens(n, d)?;
    let mut solution = FirmSolution::at(params, n, d, t, regime)?;
    if params.law.exponents_equal() {
        solution.foc_residual = params.foc_derivative(n).ok().map(f64::abs);
    }
    Ok(solution)
}

fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > values[best] { i } else { best })
}

/// Optimum when training tokens are capped at `params.data_cap`.
///
/// If the unconstrained optimum already fits under the cap it is returned
/// unchanged. Otherwise the firm trains on exactly `D` tokens with the
/// matching parameter count, unless even that loses money, in which case it
/// shuts down.
pub fn maximize_data_bound(params: &FirmParams) -> Result<FirmSolution> {
    let cap = params
        .data_cap
        .ok_or_else(|| Error::InvalidParams("data-bound solve needs a data cap D".into()))?;
    let free = maximize(&params.with_data_cap(None))?;
    if free.d_star <= cap {
        return Ok(free);
    }
    let n = params.law.matched_n(cap)?;
    let t = params.optimal_tokens(n, cap)?;
    let capped = FirmSolution::at(params, n, cap, t, Regime::DataBound)?;
    if capped.profit > 0.0 {
        Ok(capped)
    } else {
        Ok(FirmSolution::shutdown())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// One axis of a brute-force grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(lo: f64, hi: f64, points: usize) -> Self {
        Self {
            lo,
            hi,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(lo: f64, hi: f64, points: usize) -> Self {
        Self {
            lo,
            hi,
            points,
            spacing: Spacing::Log,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Linear => linspace(self.lo, self.hi, self.points),
            Spacing::Log => logspace(self.lo, self.hi, self.points),
        }
    }

    /// Spacing between neighbouring points (linear axes only).
    pub fn cell(&self) -> f64 {
        (self.hi - self.lo) / (self.points.max(2) - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: Axis,
    pub d: Axis,
    pub t: Axis,
}

impl GridSpec {
    /// Linear grid over `[0, n_hi] × [0, matched_d(n_hi)] × [0, t_hi]`.
    ///
    /// With equal exponents the matched budget is linear in `n`, so every
    /// `n` grid value has its matched `d` on the grid too.
    pub fn frontier_aligned(
        params: &FirmParams,
        n_hi: f64,
        t_hi: f64,
        points: usize,
    ) -> Result<Self> {
        Ok(Self {
            n: Axis::linear(0.0, n_hi, points),
            d: Axis::linear(0.0, params.law.matched_d(n_hi)?, points),
            t: Axis::linear(0.0, t_hi, points),
        })
    }
}

/// Best point of a grid search, with its grid indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptimum {
    pub solution: FirmSolution,
    pub index: Option<(usize, usize, usize)>,
}

/// Exhaustive evaluation of `profit(n, d, t)` over `grid`.
///
/// Points with `n = 0` or `d = 0` stand for not training at all and are
/// represented by the shutdown solution (profit 0). Ties go to the smallest
/// `n`, then `d`, then `t`, so the result does not depend on how the work
/// is split across threads.
pub fn brute_force(params: &FirmParams, grid: &GridSpec) -> Result<GridOptimum> {
    params.validate()?;
    let (ns, ds, ts) = (grid.n.values(), grid.d.values(), grid.t.values());
    let best = ns
        .par_iter()
        .enumerate()
        .filter(|(_, &n)| n > 0.0)
        .map(|(i, &n)| -> Result<Option<(f64, (usize, usize, usize))>> {
            let mut best: Option<(f64, (usize, usize, usize))> = None;
            for (j, &d) in ds.iter().enumerate().filter(|(_, &d)| d > 0.0) {
                for (k, &t) in ts.iter().enumerate() {
                    let value = params.profit(n, d, t)?;
                    if best.is_none_or(|(v, _)| value > v) {
                        best = Some((value, (i, j, k)));
                    }
                }
            }
            Ok(best)
        })
        .try_reduce(|| None, |x, y| Ok(pick(x, y)))?;

    match best {
        Some((value, (i, j, k))) if value > 0.0 => {
            let (n, d, t) = (ns[i], ds[j], ts[k]);
            let regime = match params.data_cap {
                Some(cap) if d >= cap => Regime::DataBound,
                _ => Regime::ComputeBound,
            };
            Ok(GridOptimum {
                solution: FirmSolution::at(params, n, d, t, regime)?,
                index: Some((i, j, k)),
            })
        }
        _ => Ok(GridOptimum {
            solution: FirmSolution::shutdown(),
            index: None,
        }),
    }
}

type Candidate = Option<(f64, (usize, usize, usize))>;

fn pick(x: Candidate, y: Candidate) -> Candidate {
    match (x, y) {
        (None, c) | (c, None) => c,
        (Some(a), Some(b)) => {
            if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                Some(a)
            } else {
                Some(b)
            }
        }
    }
}

/// Solver result next to a brute-force search of the same instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub solver: FirmSolution,
    pub oracle: FirmSolution,
    pub grid: GridSpec,
}

impl OracleComparison {
    /// Grid cell sizes along `(n, d, t)`.
    pub fn cell(&self) -> (f64, f64, f64) {
        (self.grid.n.cell(), self.grid.d.cell(), self.grid.t.cell())
    }

    /// The solver's profit is at least the grid's, up to `slack`.
    pub fn solver_dominates(&self, slack: f64) -> bool {
        self.solver.profit >= self.oracle.profit - slack
    }

    /// The grid argmax is no more than one cell away from the solver's point
    /// along each axis.
    pub fn within_one_cell(&self) -> bool {
        let (cn, cd, ct) = self.cell();
        let near = |a: f64, b: f64, c: f64| (a - b).abs() <= c * (1.0 + 1e-9);
        near(self.oracle.n_star, self.solver.n_star, cn)
            && near(self.oracle.d_star, self.solver.d_star, cd)
            && near(self.oracle.t_star, self.solver.t_star, ct)
    }
}

/// Run the solver and a two-stage brute force on the compute-bound problem.
///
/// A coarse log grid locates the scale of the optimum independently of the
/// solver; a linear, frontier-aligned grid with `points` per axis is then laid
/// over `[0, 3×]` of that scale and widened while its argmax sits on the
/// upper edge.
pub fn oracle_check(params: &FirmParams, points: usize) -> Result<OracleComparison> {
    let params = params.with_data_cap(None);
    let solver = maximize(&params)?;

    let coarse = GridSpec {
        n: Axis::log(1e-4, 1e10, 57),
        d: Axis::log(1e-4, 1e10, 57),
        t: Axis::log(1e-4, 1e10, 57),
    };
    let scout = brute_force(&params, &coarse)?.solution;
    if scout.regime == Regime::Shutdown {
        return Ok(OracleComparison {
            solver,
            oracle: scout,
            grid: coarse,
        });
    }

    let (mut n_hi, mut t_hi) = (3.0 * scout.n_star, 3.0 * scout.t_star);
    let mut last = None;
    for _ in 0..8 {
        let grid = GridSpec::frontier_aligned(&params, n_hi, t_hi, points)?;
        let found = brute_force(&params, &grid)?;
        let edge = points - 1;
        match found.index {
            Some((i, _, _)) if i == edge => n_hi *= 2.0,
            Some((_, _, k)) if k == edge => t_hi *= 2.0,
            _ => {
                return Ok(OracleComparison {
                    solver,
                    oracle: found.solution,
                    grid,
                })
            }
        }
        last = Some((found.solution, grid));
    }
    let (oracle, grid) = last.expect("loop runs at least once");
    Ok(OracleComparison {
        solver,
        oracle,
        grid,
    })
}
