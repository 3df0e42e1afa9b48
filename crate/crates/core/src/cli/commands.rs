use std::fmt::Write as _;

use super::config::RunConfig;
use super::{CliError, Output};
use crate::capacity::OverloadInterval;
use crate::optimizer::{maximize_welfare, sweep as run_sweep, verify_propositions, OptimizationResult, SweepParam};
use crate::welfare::{
    check_feasibility, health_at, min_health, production_at, welfare_closed, welfare_quadrature,
    GFunction, WelfareMethod, WelfarePolicy, DEFAULT_QUAD_TOL,
};

/// Published values for the reference scenario, two decimals.
const PUBLISHED_B_OPT: f64 = 6.14;
const PUBLISHED_T_L: f64 = 4.86;
const PUBLISHED_T_R: f64 = 7.42;
const PUBLISHED_B_OPT_LOW_WEIGHT: f64 = 7.66;
/// Half a unit in the second decimal.
pub const PUBLISHED_TOL: f64 = 0.005;

fn num(x: f64, precision: usize) -> String {
    format!("{x:.precision$}")
}

fn interval(iv: Option<OverloadInterval>, p: usize) -> String {
    match iv {
        None => "none".to_string(),
        Some(iv) => {
            let mut s = format!("[{}, {}]", num(iv.t_l, p), num(iv.t_r, p));
            match (iv.clipped_left, iv.clipped_right) {
                (true, true) => s.push_str(" clipped=both"),
                (true, false) => s.push_str(" clipped=left"),
                (false, true) => s.push_str(" clipped=right"),
                (false, false) => {}
            }
            s
        }
    }
}

fn line(out: &mut String, key: &str, value: impl AsRef<str>) {
    let _ = writeln!(out, "{key} = {}", value.as_ref());
}

pub fn eval(cfg: &RunConfig, policy: &WelfarePolicy, b: f64) -> Result<Output, CliError> {
    policy.check_peak(b)?;
    let p = cfg.precision;
    let closed = welfare_closed(b, policy)?;
    let quad = welfare_quadrature(b, policy, DEFAULT_QUAD_TOL)?;
    let epi = policy.epidemic(b)?;
    let feas = check_feasibility(policy);
    let overload = policy.overload(b)?;

    let mut out = String::new();
    line(&mut out, "b", num(b, p));
    line(&mut out, "a", num(epi.a(), p));
    line(&mut out, "w_closed", num(closed.value, p));
    line(
        &mut out,
        "w_closed_method",
        match closed.method {
            WelfareMethod::ClosedForm => "closed-form",
            WelfareMethod::QuadratureFallback => "quadrature-fallback",
        },
    );
    line(&mut out, "w_quadrature", num(quad, p));
    line(&mut out, "abs_difference", num((closed.value - quad).abs(), p));
    line(&mut out, "b_star", num(policy.b_star(), p));
    line(&mut out, "exceeded", (b < policy.b_star()).to_string());
    line(&mut out, "overload_interval", interval(overload, p));
    line(&mut out, "peak_load", num(policy.peak_load(b)?, p));
    line(&mut out, "feasibility_margin", num(feas.margin(), p));
    let h_min = min_health(b, policy)?;
    if h_min < 0.0 {
        line(&mut out, "warning", format!("health falls to {} at the peak", num(h_min, p)));
    }
    Ok(Output { text: out, failed: false })
}

fn optimization_report(out: &mut String, r: &OptimizationResult, p: usize) {
    line(out, "b_opt", num(r.b_opt, p));
    line(out, "a_opt", num(r.a_opt, p));
    line(out, "w_opt", num(r.w_opt, p));
    line(out, "b_star", num(r.b_star, p));
    line(out, "exceeded", r.exceeded.to_string());
    line(out, "plateau", r.plateau.to_string());
    line(out, "plateau_hi", r.plateau_hi.map_or("none".to_string(), |v| num(v, p)));
    line(out, "overload_interval", interval(r.overload, p));
    line(out, "evaluations", r.evaluations.to_string());
    for piece in &r.pieces {
        line(
            out,
            "piece",
            format!(
                "[{}, {}] b = {} w = {}",
                num(piece.lo, p),
                num(piece.hi, p),
                num(piece.b, p),
                num(piece.w, p)
            ),
        );
    }
}

pub fn optimize(cfg: &RunConfig, policy: &WelfarePolicy) -> Result<Output, CliError> {
    let r = maximize_welfare(policy)?;
    let mut out = String::new();
    optimization_report(&mut out, &r, cfg.precision);
    Ok(Output { text: out, failed: false })
}

/// Sample times `0, dt, 2 dt, ...`, ending exactly at `horizon`.
pub fn sample_times(horizon: f64, dt: f64) -> Vec<f64> {
    let n = (horizon / dt + 1e-9).floor() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    let last = ts.last_mut().expect("n >= 0");
    if (horizon - *last).abs() <= 1e-9 * horizon {
        *last = horizon;
    } else {
        ts.push(horizon);
    }
    ts
}

pub fn curves(cfg: &RunConfig, policy: &WelfarePolicy, peaks: &[f64]) -> Result<Output, CliError> {
    for &b in peaks {
        policy.check_peak(b)?;
    }
    let p = cfg.precision;
    let lambda = policy.lambda();
    let times = sample_times(policy.horizon(), cfg.dt);
    let mut out = String::from("b,t,x,xdot,y,h,w\n");
    for &b in peaks {
        let epi = policy.epidemic(b)?;
        for &t in &times {
            let y = production_at(t, b, policy)?;
            let h = health_at(t, b, policy)?;
            let w = lambda * y + (1.0 - lambda) * h;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                num(b, p),
                num(t, p),
                num(epi.x_at(t), p),
                num(epi.xdot_at(t), p),
                num(y, p),
                num(h, p),
                num(w, p)
            );
        }
    }
    Ok(Output { text: out, failed: false })
}

pub fn sweep(
    cfg: &RunConfig,
    policy: &WelfarePolicy,
    param: SweepParam,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<Output, CliError> {
    let rows = run_sweep(policy, param, lo, hi, steps)?;
    let p = cfg.precision;
    let mut out = String::from("param_value,b_opt,a_opt,w_opt,exceeded,plateau\n");
    for (value, r) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(value, p),
            num(r.b_opt, p),
            num(r.a_opt, p),
            num(r.w_opt, p),
            r.exceeded,
            r.plateau
        );
    }
    Ok(Output { text: out, failed: false })
}

pub fn verify(cfg: &RunConfig, policy: &WelfarePolicy, trials: usize, seed: u64) -> Result<Output, CliError> {
    let report = verify_propositions(policy, trials, seed)?;
    let p = cfg.precision;
    let mut out = String::new();
    line(&mut out, "seed", seed.to_string());
    line(&mut out, "trials", trials.to_string());
    for check in &report.checks {
        let _ = writeln!(
            out,
            "{} {} exercised={} skipped={} failures={}",
            check.name,
            if check.passed() { "PASS" } else { "FAIL" },
            check.exercised,
            check.skipped,
            check.failures
        );
        if let Some(cx) = &check.counterexample {
            let _ = writeln!(
                out,
                "  counterexample: {}; lambda={} c={} g0={} g1={} b={} W(b)={} reference={}",
                cx.reason,
                num(cx.lambda, p),
                num(cx.c, p),
                num(cx.g0, p),
                num(cx.g1, p),
                num(cx.b, p),
                num(cx.welfare, p),
                num(cx.reference, p)
            );
        }
    }
    let passed = report.all_passed();
    line(&mut out, "result", if passed { "PASS" } else { "FAIL" });
    Ok(Output { text: out, failed: !passed })
}

/// The reference scenario at welfare weight `lambda`.
pub fn reference_policy(lambda: f64) -> WelfarePolicy {
    let g = GFunction::affine(1.0, 1.0, 15.0).expect("valid g");
    WelfarePolicy::new(0.01, lambda, 0.15, 15.0, 3.06, g).expect("valid reference policy")
}

fn compare(out: &mut String, label: &str, computed: Option<f64>, published: f64) -> bool {
    let p = 6;
    match computed {
        Some(v) => {
            let diff = (v - published).abs();
            let ok = diff <= PUBLISHED_TOL;
            let _ = writeln!(
                out,
                "{label}: computed = {} published = {published:.2} |diff| = {} {}",
                num(v, p),
                num(diff, p),
                if ok { "PASS" } else { "FAIL" }
            );
            ok
        }
        None => {
            let _ = writeln!(out, "{label}: computed = none published = {published:.2} FAIL");
            false
        }
    }
}

pub fn reproduce_example() -> Result<Output, CliError> {
    let mut out = String::new();
    let mut ok = true;

    let high = maximize_welfare(&reference_policy(0.5))?;
    let _ = writeln!(out, "# lambda = 0.5, x0 = 0.01, T = 15, b_lb = 3.06, c = 0.15, g(b) = 1 + b/T");
    ok &= compare(&mut out, "b_opt", Some(high.b_opt), PUBLISHED_B_OPT);
    ok &= compare(&mut out, "t_l", high.overload.map(|iv| iv.t_l), PUBLISHED_T_L);
    ok &= compare(&mut out, "t_r", high.overload.map(|iv| iv.t_r), PUBLISHED_T_R);
    if let Some(side) = high.capacity_side() {
        let iv = reference_policy(0.5).overload(side.b)?;
        let _ = writeln!(
            out,
            "note: best peak on [b_lb, b*] is b = {} (W = {}), overload {}; global optimum W = {}",
            num(side.b, 6),
            num(side.w, 6),
            interval(iv, 6),
            num(high.w_opt, 6)
        );
    }

    let low = maximize_welfare(&reference_policy(0.05))?;
    let _ = writeln!(out, "# lambda = 0.05");
    ok &= compare(&mut out, "b_opt", Some(low.b_opt), PUBLISHED_B_OPT_LOW_WEIGHT);
    let _ = writeln!(out, "exceeded = {}", low.exceeded);
    if let Some(side) = low.capacity_side() {
        let _ = writeln!(
            out,
            "note: best peak on [b_lb, b*] is b = {} (W = {}); global optimum W = {}",
            num(side.b, 6),
            num(side.w, 6),
            num(low.w_opt, 6)
        );
    }

    let _ = writeln!(out, "result = {}", if ok { "PASS" } else { "FAIL" });
    Ok(Output { text: out, failed: !ok })
}
