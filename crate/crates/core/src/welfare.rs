//! Production, health and welfare of a chosen peak time.
//!
//! For a wave peaking at `b`:
//!
//! ```text
//! y(t | b) = 1 - g(b) x'(t)
//! h(t | b) = 1 - (x'(t) - c)   on (t_l, t_r),   1 elsewhere
//! w(t | b) = lambda y + (1 - lambda) h
//! W(b)     = integral of w over [0, T]
//! ```
//!
//! Integrating term by term gives
//!
//! ```text
//! W(b) = T - lambda g(b) (x(T) - x(0)) + (1 - lambda) (c (t_r - t_l) - (x(t_r) - x(t_l)))
//! ```
//!
//! which [`welfare_closed`] evaluates directly. [`welfare_quadrature`]
//! integrates `w` numerically and is kept as an independent check.

use crate::capacity::{b_star, overload_interval, OverloadInterval};
use crate::dynamics::{a_from_b, check_share, Epidemic};
use crate::error::{Error, Result};
use crate::quadrature;

/// Default absolute tolerance for [`welfare_quadrature`].
pub const DEFAULT_QUAD_TOL: f64 = 1e-9;

/// Number of peak times probed by [`check_feasibility`].
pub const FEASIBILITY_GRID: usize = 10_001;

/// Cost of delaying the peak: scales the production loss of the wave.
///
/// Only the two shapes needed by the model are supported. `Affine`
/// evaluates `level + slope * b / scale`; with `scale = T` this is the
/// `1 + b/T` lockdown cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GFunction {
    Constant { level: f64 },
    Affine { level: f64, slope: f64, scale: f64 },
}

impl GFunction {
    pub fn constant(level: f64) -> Result<Self> {
        let g = GFunction::Constant { level };
        g.validate()?;
        Ok(g)
    }

    pub fn affine(level: f64, slope: f64, scale: f64) -> Result<Self> {
        let g = GFunction::Affine {
            level,
            slope,
            scale,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let level = self.level();
        if !(level.is_finite() && level >= 1.0) {
            return Err(Error::domain("g0", level, "[1, inf)"));
        }
        if let GFunction::Affine { slope, scale, .. } = *self {
            if !(slope.is_finite() && slope >= 0.0) {
                return Err(Error::domain("g1", slope, "[0, inf)"));
            }
            if !(scale.is_finite() && scale > 0.0) {
                return Err(Error::domain("g scale", scale, "(0, inf)"));
            }
        }
        Ok(())
    }

    pub fn level(&self) -> f64 {
        match *self {
            GFunction::Constant { level } | GFunction::Affine { level, .. } => level,
        }
    }

    /// Slope coefficient `g1`; zero for the constant shape.
    pub fn slope(&self) -> f64 {
        match *self {
            GFunction::Constant { .. } => 0.0,
            GFunction::Affine { slope, .. } => slope,
        }
    }

    pub fn value(&self, b: f64) -> f64 {
        match *self {
            GFunction::Constant { level } => level,
            GFunction::Affine {
                level,
                slope,
                scale,
            } => level + slope * b / scale,
        }
    }

    pub fn derivative(&self, _b: f64) -> f64 {
        match *self {
            GFunction::Constant { .. } => 0.0,
            GFunction::Affine { slope, scale, .. } => slope / scale,
        }
    }

    /// `g' > 0` everywhere.
    pub fn is_increasing(&self) -> bool {
        self.derivative(0.0) > 0.0
    }
}

/// A planner's problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelfarePolicy {
    x0: f64,
    lambda: f64,
    c: f64,
    horizon: f64,
    b_lb: f64,
    g: GFunction,
}

impl WelfarePolicy {
    pub fn new(x0: f64, lambda: f64, c: f64, horizon: f64, b_lb: f64, g: GFunction) -> Result<Self> {
        check_share(x0)?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::domain("lambda", lambda, "[0, 1]"));
        }
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::domain("c", c, "(0, 1]"));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::domain("T", horizon, "(0, inf)"));
        }
        if !(b_lb > 0.0 && b_lb <= horizon) {
            return Err(Error::domain("b_lb", b_lb, "(0, T]"));
        }
        g.validate()?;
        Ok(WelfarePolicy {
            x0,
            lambda,
            c,
            horizon,
            b_lb,
            g,
        })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn capacity(&self) -> f64 {
        self.c
    }

    /// Horizon `T`.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Earliest feasible peak time.
    pub fn b_lb(&self) -> f64 {
        self.b_lb
    }

    pub fn g(&self) -> GFunction {
        self.g
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.x0, lambda, self.c, self.horizon, self.b_lb, self.g)
    }

    pub fn with_capacity(&self, c: f64) -> Result<Self> {
        Self::new(self.x0, self.lambda, c, self.horizon, self.b_lb, self.g)
    }

    pub fn with_b_lb(&self, b_lb: f64) -> Result<Self> {
        Self::new(self.x0, self.lambda, self.c, self.horizon, b_lb, self.g)
    }

    pub fn with_g(&self, g: GFunction) -> Result<Self> {
        Self::new(self.x0, self.lambda, self.c, self.horizon, self.b_lb, g)
    }

    /// Critical peak time for this capacity.
    pub fn b_star(&self) -> f64 {
        b_star(self.c, self.x0).expect("validated policy")
    }

    pub fn epidemic(&self, b: f64) -> Result<Epidemic> {
        Epidemic::from_peak(self.x0, b)
    }

    pub fn overload(&self, b: f64) -> Result<Option<OverloadInterval>> {
        overload_interval(b, self.c, self.x0, self.horizon)
    }

    /// Errors unless `b` is in the choice set `[b_lb, T]`.
    pub fn check_peak(&self, b: f64) -> Result<()> {
        if b >= self.b_lb && b <= self.horizon {
            Ok(())
        } else {
            Err(Error::domain("b", b, "[b_lb, T]"))
        }
    }

    /// Production loss at the top of the wave, `g(b) a / 4`.
    pub fn peak_load(&self, b: f64) -> Result<f64> {
        Ok(self.g.value(b) * a_from_b(b, self.x0)? / 4.0)
    }
}

/// Everything `w(t | b)` needs, resolved once per peak time.
struct Wave {
    epi: Epidemic,
    g: f64,
    lambda: f64,
    c: f64,
    overload: Option<OverloadInterval>,
}

impl Wave {
    fn new(b: f64, policy: &WelfarePolicy) -> Result<Self> {
        Ok(Wave {
            epi: policy.epidemic(b)?,
            g: policy.g.value(b),
            lambda: policy.lambda,
            c: policy.c,
            overload: policy.overload(b)?,
        })
    }

    fn production(&self, t: f64) -> f64 {
        1.0 - self.g * self.epi.xdot_at(t)
    }

    fn health(&self, t: f64) -> f64 {
        1.0 - (self.epi.xdot_at(t) - self.c).max(0.0)
    }

    fn density(&self, t: f64) -> f64 {
        self.lambda * self.production(t) + (1.0 - self.lambda) * self.health(t)
    }
}

/// Output at time `t` when the wave peaks at `b`.
pub fn production_at(t: f64, b: f64, policy: &WelfarePolicy) -> Result<f64> {
    let epi = policy.epidemic(b)?;
    let load = policy.g.value(b) * epi.xdot_at(t);
    if load > 1.0 {
        return Err(Error::Infeasible { b, load });
    }
    Ok(1.0 - load)
}

/// Health level at time `t`; below 1 only while the wave exceeds capacity.
pub fn health_at(t: f64, b: f64, policy: &WelfarePolicy) -> Result<f64> {
    Ok(Wave::new(b, policy)?.health(t))
}

/// Instantaneous welfare `lambda y + (1 - lambda) h`.
pub fn welfare_density(t: f64, b: f64, policy: &WelfarePolicy) -> Result<f64> {
    let y = production_at(t, b, policy)?;
    let h = health_at(t, b, policy)?;
    Ok(policy.lambda * y + (1.0 - policy.lambda) * h)
}

/// Lowest health level reached by the wave peaking at `b`.
///
/// Negative only if the excess `a/4 - c` is above 1, which a feasible
/// policy rules out.
pub fn min_health(b: f64, policy: &WelfarePolicy) -> Result<f64> {
    let epi = policy.epidemic(b)?;
    Ok(1.0 - (epi.peak_rate() - policy.c).max(0.0))
}

/// How [`welfare_closed`] arrived at its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WelfareMethod {
    ClosedForm,
    /// The overload interval was clipped to `[0, T]`, so the value was integrated.
    QuadratureFallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelfareValue {
    pub value: f64,
    pub method: WelfareMethod,
}

/// Total welfare `W(b)` from the integrated closed form.
pub fn welfare_closed(b: f64, policy: &WelfarePolicy) -> Result<WelfareValue> {
    policy.check_peak(b)?;
    let epi = policy.epidemic(b)?;
    let horizon = policy.horizon;
    let lambda = policy.lambda;
    let production_loss = policy.g.value(b) * (epi.x_at(horizon) - policy.x0);

    if b >= policy.b_star() {
        return Ok(WelfareValue {
            value: horizon - lambda * production_loss,
            method: WelfareMethod::ClosedForm,
        });
    }

    let iv = policy
        .overload(b)?
        .expect("b below the critical time always has an overload interval");
    if iv.is_clipped() {
        return Ok(WelfareValue {
            value: welfare_quadrature(b, policy, DEFAULT_QUAD_TOL)?,
            method: WelfareMethod::QuadratureFallback,
        });
    }
    let health_gain = policy.c * iv.width() - epi.mass_between(iv.t_l, iv.t_r);
    Ok(WelfareValue {
        value: horizon - lambda * production_loss + (1.0 - lambda) * health_gain,
        method: WelfareMethod::ClosedForm,
    })
}

/// Total welfare `W(b)` by adaptive Simpson quadrature of `w(t | b)`.
///
/// The integration range is split at the overload boundaries so every
/// panel is smooth.
pub fn welfare_quadrature(b: f64, policy: &WelfarePolicy, tol: f64) -> Result<f64> {
    policy.check_peak(b)?;
    let wave = Wave::new(b, policy)?;
    // b lies inside [0, T], so the wave's top bounds g x' on the whole range
    let load = wave.g * wave.epi.peak_rate();
    if load > 1.0 {
        return Err(Error::Infeasible { b, load });
    }
    let breaks: Vec<f64> = wave
        .overload
        .map(|iv| vec![iv.t_l, iv.t_r])
        .unwrap_or_default();
    quadrature::integrate(|t| wave.density(t), 0.0, policy.horizon, &breaks, tol)
}

/// Outcome of scanning the choice set for `g(b) a(b) / 4 > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Largest `g(b) a(b) / 4` on the grid.
    pub worst_load: f64,
    pub worst_b: f64,
    /// Smallest probed `b` with load above 1.
    pub first_violation: Option<f64>,
}

impl FeasibilityReport {
    /// Headroom `1 - worst_load`; negative when infeasible.
    pub fn margin(&self) -> f64 {
        1.0 - self.worst_load
    }
}

/// Checks `g(b) x'(t) <= 1` over `[b_lb, T] x [0, T]`.
///
/// `x'` peaks at `a / 4`, so one check per probed `b` covers every `t`.
pub fn check_feasibility(policy: &WelfarePolicy) -> FeasibilityReport {
    let (lo, hi) = (policy.b_lb, policy.horizon);
    let mut report = FeasibilityReport {
        feasible: true,
        worst_load: f64::NEG_INFINITY,
        worst_b: lo,
        first_violation: None,
    };
    for i in 0..FEASIBILITY_GRID {
        let b = if i + 1 == FEASIBILITY_GRID {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (FEASIBILITY_GRID - 1) as f64
        };
        let load = policy.peak_load(b).expect("b is positive on the grid");
        if load > report.worst_load {
            report.worst_load = load;
            report.worst_b = b;
        }
        if load > 1.0 {
            report.feasible = false;
            report.first_violation.get_or_insert(b);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // mpmath, 40 digits
    const PEAK_RATE_614: f64 = 0.187_097_713_767_695_03;
    const PRODUCTION_AT_PEAK_614: f64 = 0.736_316_955_396_728_5;
    const HEALTH_AT_PEAK_614: f64 = 0.962_902_286_232_305;
    const DENSITY_AT_PEAK_614: f64 = 0.849_609_620_814_516_7;
    const LOAD_AT_306: f64 = 0.452_003_619_245_265_2;

    fn example(lambda: f64) -> WelfarePolicy {
        let g = GFunction::affine(1.0, 1.0, 15.0).unwrap();
        WelfarePolicy::new(0.01, lambda, 0.15, 15.0, 3.06, g).unwrap()
    }

    #[test]
    fn g_shapes() {
        let g = GFunction::affine(1.0, 1.0, 15.0).unwrap();
        assert!((g.value(6.14) - 1.409_333_333_333_333_3).abs() < 1e-15);
        assert_eq!(g.derivative(3.0), 1.0 / 15.0);
        assert!(g.is_increasing());
        let k = GFunction::constant(2.0).unwrap();
        assert_eq!(k.value(100.0), 2.0);
        assert!(!k.is_increasing());
        assert!(GFunction::constant(0.5).is_err());
        assert!(GFunction::affine(1.0, -0.1, 15.0).is_err());
        assert!(GFunction::affine(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn policy_validation() {
        let g = GFunction::constant(1.0).unwrap();
        assert!(WelfarePolicy::new(0.01, 1.1, 0.15, 15.0, 3.0, g).is_err());
        assert!(WelfarePolicy::new(0.01, 0.5, 0.0, 15.0, 3.0, g).is_err());
        assert!(WelfarePolicy::new(0.01, 0.5, 1.5, 15.0, 3.0, g).is_err());
        assert!(WelfarePolicy::new(0.01, 0.5, 0.15, 15.0, 16.0, g).is_err());
        assert!(WelfarePolicy::new(0.01, 0.5, 0.15, 15.0, 0.0, g).is_err());
        assert!(WelfarePolicy::new(0.6, 0.5, 0.15, 15.0, 3.0, g).is_err());
        assert!(WelfarePolicy::new(0.01, 0.5, 0.15, 15.0, 15.0, g).is_ok());
    }

    #[test]
    fn production_values() {
        let p = example(0.5);
        let y = production_at(6.14, 6.14, &p).unwrap();
        assert!((y - PRODUCTION_AT_PEAK_614).abs() < 1e-14);
        assert!((production_at(1e4, 6.14, &p).unwrap() - 1.0).abs() < 1e-15);
        let a = p.epidemic(6.14).unwrap().a();
        let y0 = 1.0 - p.g().value(6.14) * a * 0.01 * 0.99;
        assert!((production_at(0.0, 6.14, &p).unwrap() - y0).abs() < 1e-14);

        let flat = p.with_g(GFunction::constant(1.0).unwrap()).unwrap();
        let b = crate::dynamics::b_from_a(0.4, 0.01).unwrap().min(15.0);
        assert!((production_at(b, b, &flat).unwrap() - 0.9).abs() < 1e-14);
    }

    #[test]
    fn production_rejects_overload_of_output() {
        let p = example(0.5).with_g(GFunction::constant(5.0).unwrap()).unwrap();
        let b = crate::dynamics::b_from_a(1.2, 0.01).unwrap();
        match production_at(b, b, &p) {
            Err(Error::Infeasible { load, .. }) => assert!((load - 1.5).abs() < 1e-12),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn health_values() {
        let p = example(0.5);
        assert_eq!(health_at(2.0, 6.14, &p).unwrap(), 1.0);
        assert!((health_at(6.14, 6.14, &p).unwrap() - HEALTH_AT_PEAK_614).abs() < 1e-14);
        for t in [0.0, 5.0, 7.6, 10.0, 15.0] {
            assert_eq!(health_at(t, 10.0, &p).unwrap(), 1.0);
            assert_eq!(health_at(t, p.b_star(), &p).unwrap(), 1.0);
        }
        // continuous at the overload boundaries
        let iv = p.overload(6.14).unwrap().unwrap();
        for edge in [iv.t_l, iv.t_r] {
            assert_eq!(health_at(edge, 6.14, &p).unwrap(), 1.0);
            let inside = if edge == iv.t_l { edge + 1e-9 } else { edge - 1e-9 };
            assert!((health_at(inside, 6.14, &p).unwrap() - 1.0).abs() < 1e-9);
        }
        assert!((PEAK_RATE_614 - 0.15 - (1.0 - HEALTH_AT_PEAK_614)).abs() < 1e-15);
    }

    #[test]
    fn density_mixes_by_weight() {
        let p = example(0.5);
        assert!((welfare_density(6.14, 6.14, &p).unwrap() - DENSITY_AT_PEAK_614).abs() < 1e-14);
        for t in [1.0, 5.5, 6.14, 9.0] {
            let y = production_at(t, 6.14, &p).unwrap();
            let h = health_at(t, 6.14, &p).unwrap();
            assert_eq!(welfare_density(t, 6.14, &p.with_lambda(1.0).unwrap()).unwrap(), y);
            assert_eq!(welfare_density(t, 6.14, &p.with_lambda(0.0).unwrap()).unwrap(), h);
        }
    }

    #[test]
    fn health_only_planner() {
        let p = example(0.0);
        for b in [p.b_star(), 8.0, 12.0, 15.0] {
            assert_eq!(welfare_closed(b, &p).unwrap().value, 15.0);
        }
        for b in [3.06, 5.0, 7.0, 7.65] {
            assert!(welfare_closed(b, &p).unwrap().value < 15.0);
        }
    }

    #[test]
    fn closed_form_matches_quadrature_at_example_peak() {
        let p = example(0.5);
        let closed = welfare_closed(6.14, &p).unwrap();
        assert_eq!(closed.method, WelfareMethod::ClosedForm);
        let quad = welfare_quadrature(6.14, &p, 1e-9).unwrap();
        assert!((closed.value - quad).abs() < 1e-6);
    }

    #[test]
    fn quadrature_special_cases() {
        let p = example(0.0);
        assert!((welfare_quadrature(10.0, &p, 1e-9).unwrap() - 15.0).abs() < 1e-9);
        let flat = example(1.0).with_g(GFunction::constant(1.0).unwrap()).unwrap();
        for b in [3.06, 6.0, 11.0] {
            let epi = flat.epidemic(b).unwrap();
            let expected = 15.0 - (epi.x_at(15.0) - epi.x_at(0.0));
            assert!((welfare_quadrature(b, &flat, 1e-9).unwrap() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn peak_outside_choice_set_is_rejected() {
        let p = example(0.5);
        assert!(matches!(welfare_closed(3.0, &p), Err(Error::Domain { name: "b", .. })));
        assert!(welfare_closed(15.5, &p).is_err());
        assert!(welfare_quadrature(2.0, &p, 1e-9).is_err());
    }

    #[test]
    fn clipped_interval_falls_back_to_quadrature() {
        // late wave with tiny capacity: right root beyond T
        let g = GFunction::affine(1.0, 0.5, 10.0).unwrap();
        let p = WelfarePolicy::new(0.01, 0.5, 0.01, 10.0, 2.0, g).unwrap();
        assert!(p.overload(9.0).unwrap().unwrap().clipped_right);
        let w = welfare_closed(9.0, &p).unwrap();
        assert_eq!(w.method, WelfareMethod::QuadratureFallback);
        // closed form on the clipped interval is still exact, which pins the fallback
        let epi = p.epidemic(9.0).unwrap();
        let iv = p.overload(9.0).unwrap().unwrap();
        let direct = 10.0 - 0.5 * g.value(9.0) * (epi.x_at(10.0) - 0.01)
            + 0.5 * (0.01 * iv.width() - epi.mass_between(iv.t_l, iv.t_r));
        assert!((w.value - direct).abs() < 1e-8);
    }

    #[test]
    fn feasibility_reports() {
        let r = check_feasibility(&example(0.5));
        assert!(r.feasible);
        assert_eq!(r.worst_b, 3.06);
        assert!((r.worst_load - LOAD_AT_306).abs() < 1e-14);
        assert!(r.first_violation.is_none());

        let b_lb = crate::dynamics::b_from_a(1.2, 0.01).unwrap();
        let heavy = WelfarePolicy::new(0.01, 0.5, 0.15, 15.0, b_lb, GFunction::constant(5.0).unwrap()).unwrap();
        let r = check_feasibility(&heavy);
        assert!(!r.feasible);
        assert!((r.worst_load - 1.5).abs() < 1e-12);
        assert_eq!(r.first_violation, Some(b_lb));

        // g = 1: only peaks with a >= 4 violate
        let b_lb = crate::dynamics::b_from_a(5.0, 0.01).unwrap();
        let fast = WelfarePolicy::new(0.01, 0.5, 0.15, 15.0, b_lb, GFunction::constant(1.0).unwrap()).unwrap();
        let r = check_feasibility(&fast);
        assert!(!r.feasible);
        let limit = crate::dynamics::b_from_a(4.0, 0.01).unwrap();
        assert!(r.first_violation.unwrap() < limit);
        assert!(r.margin() < 0.0);
    }

    #[test]
    fn min_health_is_peak_excess() {
        let p = example(0.5);
        assert!((min_health(6.14, &p).unwrap() - HEALTH_AT_PEAK_614).abs() < 1e-14);
        assert_eq!(min_health(10.0, &p).unwrap(), 1.0);
    }

    #[test]
    fn finite_horizon_welfare_is_not_monotone_past_critical_time() {
        // the wave peaking near T is only half over by T, so part of its cost
        // falls outside the horizon and W rises again
        let p = example(0.5);
        let at_star = welfare_closed(p.b_star(), &p).unwrap().value;
        let at_nine = welfare_closed(9.0, &p).unwrap().value;
        let at_end = welfare_closed(15.0, &p).unwrap().value;
        assert!(at_nine < at_star);
        assert!(at_end > at_star);
        assert!((at_end - 14.51).abs() < 1e-12);
    }

    fn arb_policy() -> impl Strategy<Value = WelfarePolicy> {
        (1e-3f64..0.2, 0.0f64..=1.0, 0.05f64..0.4, 8.0f64..30.0, 0.15f64..0.5, 1.0f64..1.5, 0.0f64..1.5)
            .prop_filter_map("infeasible", |(x0, lambda, c, t, frac, g0, g1)| {
                let g = GFunction::affine(g0, g1, t).ok()?;
                let p = WelfarePolicy::new(x0, lambda, c, t, t * frac, g).ok()?;
                check_feasibility(&p).feasible.then_some(p)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn closed_form_agrees_with_quadrature(p in arb_policy(), u in 0.0f64..=1.0) {
            let b = p.b_lb() + u * (p.horizon() - p.b_lb());
            let closed = welfare_closed(b, &p).unwrap().value;
            let quad = welfare_quadrature(b, &p, 1e-9).unwrap();
            prop_assert!((closed - quad).abs() < 1e-6, "b={b} closed={closed} quad={quad}");
        }

        #[test]
        fn welfare_bounded_by_horizon(p in arb_policy(), u in 0.0f64..=1.0) {
            let b = p.b_lb() + u * (p.horizon() - p.b_lb());
            let w = welfare_closed(b, &p).unwrap().value;
            let attains = p.lambda() == 0.0 && b >= p.b_star();
            prop_assert!(w <= p.horizon());
            prop_assert_eq!(w == p.horizon(), attains);
        }

        #[test]
        fn uncongested_welfare_formula(p in arb_policy(), u in 0.0f64..=1.0) {
            let lo = p.b_star().max(p.b_lb());
            prop_assume!(lo < p.horizon());
            let b = lo + u * (p.horizon() - lo);
            let epi = p.epidemic(b).unwrap();
            let expected = p.horizon() - p.lambda() * (p.g().value(b) * (epi.x_at(p.horizon()) - p.x0()));
            prop_assert_eq!(welfare_closed(b, &p).unwrap().value, expected);
        }

        #[test]
        fn welfare_is_linear_in_weight(p in arb_policy(), u in 0.0f64..=1.0) {
            let b = p.b_lb() + u * (p.horizon() - p.b_lb());
            let w = |l: f64| welfare_closed(b, &p.with_lambda(l).unwrap()).unwrap().value;
            let l = p.lambda();
            prop_assert!((w(l) - (l * w(1.0) + (1.0 - l) * w(0.0))).abs() < 1e-12);
        }

        #[test]
        fn density_is_continuous(p in arb_policy(), u in 0.0f64..1.0) {
            let b = p.b_lb() + u * (p.horizon() - p.b_lb());
            if let Some(iv) = p.overload(b).unwrap() {
                for edge in [iv.t_l, iv.t_r] {
                    let left = welfare_density(edge - 1e-10, b, &p).unwrap();
                    let right = welfare_density(edge + 1e-10, b, &p).unwrap();
                    prop_assert!((left - right).abs() < 1e-8);
                }
            }
        }

        #[test]
        fn health_is_capped_excess(p in arb_policy(), u in 0.0f64..=1.0, s in 0.0f64..=1.0) {
            let b = p.b_lb() + u * (p.horizon() - p.b_lb());
            let t = s * p.horizon();
            let epi = p.epidemic(b).unwrap();
            let expected = 1.0 - (epi.xdot_at(t) - p.capacity()).max(0.0);
            prop_assert!((health_at(t, b, &p).unwrap() - expected).abs() < 1e-12);
        }
    }
}
