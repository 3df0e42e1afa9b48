//! Randomized checks of the model's structural claims about the optimum.
//!
//! Each trial draws a policy around the supplied one and checks:
//!
//! - `P1a`: with `lambda = 0`, `W(b) = T` for every `b >= b*` and `W(b) < T` below `b*`.
//! - `P1b`: with `lambda = 1` and `g' > 0`, the earliest peak `b_lb` is optimal.
//! - `P2`: with constant `g`, every `b >= min(b*, T)` attains the maximum.
//! - `P3`: with `lambda` in `(0, 1)` and `g' > 0`, the optimum is not after `b*`.
//!
//! Draws come from a ChaCha8 stream seeded with the caller's seed, so a
//! report depends only on its inputs.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::maximize_welfare;
use crate::error::{Error, Result};
use crate::welfare::{check_feasibility, welfare_closed, GFunction, WelfarePolicy};

/// Peak times probed per trial for the pointwise checks.
const PROBES: usize = 64;
/// Slack on `b_opt` comparisons; matches the refinement resolution of the optimizer.
const B_TOL: f64 = 1e-6;
/// Slack on "attains the maximum".
const W_TOL: f64 = 1e-9;
/// Redraws allowed before a trial is skipped as infeasible.
const MAX_DRAWS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub lambda: f64,
    pub c: f64,
    pub g0: f64,
    pub g1: f64,
    /// Offending peak time.
    pub b: f64,
    /// `W(b)` at the offending peak time.
    pub welfare: f64,
    /// The value the property says `W(b)` should reach.
    pub reference: f64,
    pub reason: &'static str,
}

/// A failed probe: offending `b`, its welfare, the reference welfare, and why.
type Violation = (f64, f64, f64, &'static str);

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: lambda={} c={} g0={} g1={} b={} W(b)={} reference={}",
            self.reason, self.lambda, self.c, self.g0, self.g1, self.b, self.welfare, self.reference
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub exercised: usize,
    pub skipped: usize,
    pub failures: usize,
    /// First failing case.
    pub counterexample: Option<Counterexample>,
}

impl PropertyCheck {
    fn new(name: &'static str) -> Self {
        PropertyCheck {
            name,
            exercised: 0,
            skipped: 0,
            failures: 0,
            counterexample: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, policy: &WelfarePolicy, outcome: Option<Violation>) {
        self.exercised += 1;
        if let Some((b, welfare, reference, reason)) = outcome {
            self.failures += 1;
            self.counterexample.get_or_insert_with(|| Counterexample {
                lambda: policy.lambda(),
                c: policy.capacity(),
                g0: policy.g().level(),
                g1: policy.g().slope(),
                b,
                welfare,
                reference,
                reason,
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<PropertyCheck>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::passed)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn probes(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    (0..PROBES).map(move |i| {
        if i + 1 == PROBES {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (PROBES - 1) as f64
        }
    })
}

fn draw(base: &WelfarePolicy, rng: &mut ChaCha8Rng) -> Option<WelfarePolicy> {
    let g = base.g();
    for _ in 0..MAX_DRAWS {
        let lambda = loop {
            let l: f64 = rng.random_range(0.0..1.0);
            if l > 0.0 {
                break l;
            }
        };
        let c = (base.capacity() * rng.random_range(0.5..1.5)).min(1.0);
        let g = match g {
            GFunction::Affine { level, slope, scale } if slope > 0.0 => {
                GFunction::affine(level, slope * rng.random_range(0.5..1.5), scale).ok()?
            }
            other => other,
        };
        let Ok(policy) = WelfarePolicy::new(base.x0(), lambda, c, base.horizon(), base.b_lb(), g) else {
            continue;
        };
        if check_feasibility(&policy).feasible {
            return Some(policy);
        }
    }
    None
}

/// `p` has `lambda = 0`.
fn check_health_only(p: &WelfarePolicy) -> Result<Option<Violation>> {
    let t = p.horizon();
    let b_star = p.b_star();
    for b in probes(p.b_lb(), t).chain([b_star.clamp(p.b_lb(), t)]) {
        let w = welfare_closed(b, p)?.value;
        if b >= b_star && w != t {
            return Ok(Some((b, w, t, "W(b) != T although b >= b*")));
        }
        if b < b_star && w >= t {
            return Ok(Some((b, w, t, "W(b) >= T although b < b*")));
        }
    }
    Ok(None)
}

/// `p` has `lambda = 1`.
fn check_production_only(p: &WelfarePolicy) -> Result<Option<Violation>> {
    let r = maximize_welfare(p)?;
    if (r.b_opt - p.b_lb()).abs() > B_TOL {
        let at_lb = welfare_closed(p.b_lb(), p)?.value;
        return Ok(Some((r.b_opt, r.w_opt, at_lb, "optimum is not the earliest peak b_lb")));
    }
    Ok(None)
}

/// `p` has a constant `g`.
fn check_constant_cost(p: &WelfarePolicy) -> Result<Option<Violation>> {
    let r = maximize_welfare(p)?;
    let lo = p.b_star().min(p.horizon()).max(p.b_lb());
    for b in probes(lo, p.horizon()) {
        let w = welfare_closed(b, p)?.value;
        if r.w_opt - w > W_TOL {
            return Ok(Some((b, w, r.w_opt, "W(b) below the maximum although b >= b*")));
        }
    }
    Ok(None)
}

fn check_no_late_peak(policy: &WelfarePolicy) -> Result<Option<Violation>> {
    let r = maximize_welfare(policy)?;
    if r.b_opt > r.b_star + B_TOL {
        let at_star = welfare_closed(r.b_star.clamp(policy.b_lb(), policy.horizon()), policy)?.value;
        return Ok(Some((r.b_opt, r.w_opt, at_star, "optimum lies after b*")));
    }
    Ok(None)
}

/// Runs `trials` randomized checks of the four properties around `base`.
pub fn verify_propositions(base: &WelfarePolicy, trials: usize, seed: u64) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(Error::domain("trials", 0.0, "[1, inf)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p1a = PropertyCheck::new("P1a");
    let mut p1b = PropertyCheck::new("P1b");
    let mut p2 = PropertyCheck::new("P2");
    let mut p3 = PropertyCheck::new("P3");

    for _ in 0..trials {
        let Some(policy) = draw(base, &mut rng) else {
            for check in [&mut p1a, &mut p1b, &mut p2, &mut p3] {
                check.skipped += 1;
            }
            continue;
        };
        let health_only = policy.with_lambda(0.0)?;
        p1a.record(&health_only, check_health_only(&health_only)?);
        let flat = policy.with_g(GFunction::constant(policy.g().level())?)?;
        p2.record(&flat, check_constant_cost(&flat)?);
        if policy.g().is_increasing() {
            let production_only = policy.with_lambda(1.0)?;
            p1b.record(&production_only, check_production_only(&production_only)?);
            p3.record(&policy, check_no_late_peak(&policy)?);
        } else {
            p1b.skipped += 1;
            p3.skipped += 1;
        }
    }

    Ok(VerificationReport {
        seed,
        trials,
        checks: vec![p1a, p1b, p2, p3],
    })
}
