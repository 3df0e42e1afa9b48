//! Global search for the welfare-maximizing peak time.
//!
//! `W(b)` is smooth on either side of the critical time `b*` but can kink
//! there, so the choice set `[b_lb, T]` is split at `b*` and each piece is
//! scanned on a dense grid. The best grid point is then polished with a
//! golden-section search on its two neighbouring cells. Maximizers that are
//! whole intervals (the health-only planner, for instance) are reported by
//! their smallest element together with the upper end.

mod verify;

use std::fmt;
use std::str::FromStr;

use crate::capacity::OverloadInterval;
use crate::dynamics::a_from_b;
use crate::error::{Error, Result};
use crate::welfare::{check_feasibility, welfare_closed, WelfarePolicy};

pub use verify::{verify_propositions, Counterexample, PropertyCheck, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    /// Grid points per smooth piece.
    pub grid_points: usize,
    /// Bracket width at which golden-section refinement stops.
    pub b_tol: f64,
    /// Welfare values this close to the maximum count as maximal.
    pub plateau_tol: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            grid_points: 2001,
            b_tol: 1e-9,
            plateau_tol: 1e-12,
        }
    }
}

/// Best point found on one smooth piece of the choice set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PieceOptimum {
    pub lo: f64,
    pub hi: f64,
    pub b: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub b_opt: f64,
    pub a_opt: f64,
    pub w_opt: f64,
    /// The maximizing set is an interval `[b_opt, plateau_hi]`.
    pub plateau: bool,
    pub plateau_hi: Option<f64>,
    /// Capacity is exceeded at the optimum (`b_opt < b*`).
    pub exceeded: bool,
    pub overload: Option<OverloadInterval>,
    pub b_star: f64,
    /// Objective evaluations spent.
    pub evaluations: usize,
    /// Per-piece optima, left to right: `[b_lb, min(b*, T)]` then `[b*, T]`.
    pub pieces: Vec<PieceOptimum>,
}

impl OptimizationResult {
    /// Optimum restricted to peak times at or before `b*`, if that piece exists.
    pub fn capacity_side(&self) -> Option<&PieceOptimum> {
        self.pieces.iter().find(|p| p.hi <= self.b_star)
    }
}

/// Maximizes `W(b)` over `[b_lb, T]` with default options.
pub fn maximize_welfare(policy: &WelfarePolicy) -> Result<OptimizationResult> {
    maximize_welfare_with(policy, &OptimizerOptions::default())
}

pub fn maximize_welfare_with(policy: &WelfarePolicy, opts: &OptimizerOptions) -> Result<OptimizationResult> {
    let feas = check_feasibility(policy);
    if !feas.feasible {
        return Err(Error::Infeasible {
            b: feas.worst_b,
            load: feas.worst_load,
        });
    }
    if opts.grid_points < 2 {
        return Err(Error::domain("grid_points", opts.grid_points as f64, "[2, inf)"));
    }

    let (lo, hi) = (policy.b_lb(), policy.horizon());
    let b_star = policy.b_star();
    let split = b_star.clamp(lo, hi);
    let bounds: Vec<(f64, f64)> = [(lo, split), (split, hi)]
        .into_iter()
        .filter(|(a, b)| b > a)
        .collect();
    // b_lb == T leaves a single point
    let bounds = if bounds.is_empty() { vec![(lo, hi)] } else { bounds };

    let mut evaluations = 0usize;
    let mut objective = |b: f64| -> Result<f64> {
        evaluations += 1;
        Ok(welfare_closed(b, policy)?.value)
    };

    // one ordered grid over the whole choice set; pieces share their boundary
    let mut grid: Vec<(f64, f64)> = Vec::new();
    let mut pieces = Vec::with_capacity(bounds.len());
    for &(p_lo, p_hi) in &bounds {
        let n = if p_hi > p_lo { opts.grid_points } else { 1 };
        let mut start = grid.len();
        for i in 0..n {
            let b = grid_point(p_lo, p_hi, i, n);
            if i == 0 && grid.last().is_some_and(|&(prev, _)| prev == b) {
                start -= 1;
                continue;
            }
            grid.push((b, objective(b)?));
        }
        let cells = &grid[start..];
        // first of equal maxima, i.e. the smallest b
        let k = (1..cells.len()).fold(0, |k, j| if cells[j].1 > cells[k].1 { j } else { k });
        let (mut b, mut w) = cells[k];
        let bracket_lo = cells[k.saturating_sub(1)].0;
        let bracket_hi = cells[(k + 1).min(cells.len() - 1)].0;
        if bracket_hi > bracket_lo {
            let (rb, rw) = golden_section_max(&mut objective, bracket_lo, bracket_hi, opts.b_tol)?;
            if rw > w {
                b = rb;
                w = rw;
            }
        }
        pieces.push(PieceOptimum {
            lo: p_lo,
            hi: p_hi,
            b,
            w,
        });
    }

    // ties between pieces go to the earlier peak
    let best = pieces
        .iter()
        .copied()
        .reduce(|acc, p| if p.w > acc.w + opts.plateau_tol { p } else { acc })
        .expect("at least one piece");

    let (mut b_opt, mut w_opt) = (best.b, best.w);
    let mut plateau_hi = None;
    if let Some((first, last)) = maximizing_run(&grid, best.b, pieces_max(&pieces), opts.plateau_tol) {
        (b_opt, w_opt) = grid[first];
        plateau_hi = Some(grid[last].0);
    }

    Ok(OptimizationResult {
        b_opt,
        a_opt: a_from_b(b_opt, policy.x0())?,
        w_opt,
        plateau: plateau_hi.is_some(),
        plateau_hi,
        exceeded: b_opt < b_star,
        overload: policy.overload(b_opt)?,
        b_star,
        evaluations,
        pieces,
    })
}

fn pieces_max(pieces: &[PieceOptimum]) -> f64 {
    pieces.iter().map(|p| p.w).fold(f64::NEG_INFINITY, f64::max)
}

fn grid_point(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if n == 1 {
        lo
    } else if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// Grid index range `(first, last)` of the maximal run around `b` whose
/// values are all within `tol` of `w_max`, when it spans at least two points.
fn maximizing_run(grid: &[(f64, f64)], b: f64, w_max: f64, tol: f64) -> Option<(usize, usize)> {
    let nearest = grid
        .iter()
        .enumerate()
        .min_by(|x, y| (x.1 .0 - b).abs().total_cmp(&(y.1 .0 - b).abs()))?
        .0;
    let is_max = |i: usize| w_max - grid[i].1 <= tol;
    if !is_max(nearest) {
        return None;
    }
    let mut first = nearest;
    while first > 0 && is_max(first - 1) {
        first -= 1;
    }
    let mut last = nearest;
    while last + 1 < grid.len() && is_max(last + 1) {
        last += 1;
    }
    (last > first).then_some((first, last))
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// Assumes `f` is unimodal on the bracket; returns the best point seen.
pub fn golden_section_max<F>(f: &mut F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Policy parameter varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Lambda,
    Capacity,
    EarliestPeak,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::Capacity => "c",
            SweepParam::EarliestPeak => "b_lb",
        }
    }

    fn apply(&self, policy: &WelfarePolicy, value: f64) -> Result<WelfarePolicy> {
        match self {
            SweepParam::Lambda => policy.with_lambda(value),
            SweepParam::Capacity => policy.with_capacity(value),
            SweepParam::EarliestPeak => policy.with_b_lb(value),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lambda" => Ok(SweepParam::Lambda),
            "c" => Ok(SweepParam::Capacity),
            "b_lb" => Ok(SweepParam::EarliestPeak),
            other => Err(format!("unknown sweep parameter '{other}' (expected lambda, c or b_lb)")),
        }
    }
}

/// Evenly spaced parameter values from `lo` to `hi`, endpoints exact.
pub fn sweep_values(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::domain("sweep range", hi - lo, "lo < hi"));
    }
    if steps < 2 {
        return Err(Error::domain("steps", steps as f64, "[2, inf)"));
    }
    Ok((0..steps).map(|i| grid_point(lo, hi, i, steps)).collect())
}

/// Re-optimizes the policy at each value of `param`, in increasing order.
pub fn sweep(
    policy: &WelfarePolicy,
    param: SweepParam,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<Vec<(f64, OptimizationResult)>> {
    sweep_values(lo, hi, steps)?
        .into_iter()
        .map(|value| {
            let attach = |e: Error| Error::SweepPoint {
                param: param.name(),
                value,
                source: Box::new(e),
            };
            let varied = param.apply(policy, value).map_err(attach)?;
            let result = maximize_welfare(&varied).map_err(attach)?;
            Ok((value, result))
        })
        .collect()
}
