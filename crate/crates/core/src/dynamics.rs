//! Closed-form SI infection dynamics.
//!
//! The cumulative infected share solves `x' = a x (1 - x)` with `x(0) = x0`:
//!
//! ```text
//! x(t) = 1 / (1 + exp(a (b - t))),    a b = ln(1/x0 - 1)
//! ```
//!
//! where `b` is the time at which the infection rate `x'(t)` peaks. Every
//! exponential is evaluated in the shifted form `exp(a (b - t))`, which keeps
//! `x` and `x'` finite for arbitrarily large `a t`.
//!
//! [`integrate_ode`] is a fixed-step RK4 integrator of the same equation and
//! serves as an independent check on the closed form.

use crate::error::{Error, Result};

/// Log-odds of the initial susceptible/infected split, `ln(1/x0 - 1)`.
///
/// This is the product `a * b` shared by every wave started from `x0`.
pub fn log_odds(x0: f64) -> Result<f64> {
    check_share(x0)?;
    Ok((1.0 / x0 - 1.0).ln())
}

pub(crate) fn check_share(x0: f64) -> Result<()> {
    if x0.is_finite() && x0 > 0.0 && x0 < 0.5 {
        Ok(())
    } else {
        Err(Error::domain("x0", x0, "(0, 1/2)"))
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(name, value, "(0, inf)"))
    }
}

/// Peak time of the wave with intensity `a` started from `x0`.
pub fn b_from_a(a: f64, x0: f64) -> Result<f64> {
    check_positive("a", a)?;
    Ok(log_odds(x0)? / a)
}

/// Intensity that puts the peak of the wave started from `x0` at time `b`.
pub fn a_from_b(b: f64, x0: f64) -> Result<f64> {
    check_positive("b", b)?;
    Ok(log_odds(x0)? / b)
}

/// One infection wave: initial share, intensity and (derived) peak time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epidemic {
    x0: f64,
    a: f64,
    b: f64,
}

impl Epidemic {
    pub fn from_intensity(x0: f64, a: f64) -> Result<Self> {
        let b = b_from_a(a, x0)?;
        Ok(Epidemic { x0, a, b })
    }

    pub fn from_peak(x0: f64, b: f64) -> Result<Self> {
        let a = a_from_b(b, x0)?;
        Ok(Epidemic { x0, a, b })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Spread intensity `a`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Peak time `b`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Share of the population infected by time `t`.
    pub fn x_at(&self, t: f64) -> f64 {
        1.0 / (1.0 + (self.a * (self.b - t)).exp())
    }

    /// Infection rate `x'(t) = a x (1 - x)`.
    ///
    /// `1 - x` is evaluated as its own logistic so neither tail cancels to zero.
    pub fn xdot_at(&self, t: f64) -> f64 {
        let s = self.a * (self.b - t);
        let x = 1.0 / (1.0 + s.exp());
        let not_x = 1.0 / (1.0 + (-s).exp());
        self.a * x * not_x
    }

    /// Height of the wave, `x'(b) = a / 4`.
    pub fn peak_rate(&self) -> f64 {
        self.a / 4.0
    }

    /// Infections accumulated over `[t1, t2]`, i.e. `x(t2) - x(t1)`.
    pub fn mass_between(&self, t1: f64, t2: f64) -> f64 {
        self.x_at(t2) - self.x_at(t1)
    }
}

/// Integrates `x' = a x (1 - x)` from `x(0) = x0` with classical RK4.
///
/// Samples are taken at `t = 0, dt, 2 dt, ...`; the final step is shortened
/// so the trajectory ends exactly at `t_end`.
pub fn integrate_ode(x0: f64, a: f64, t_end: f64, dt: f64) -> Result<Vec<(f64, f64)>> {
    if !(x0.is_finite() && x0 > 0.0 && x0 < 1.0) {
        return Err(Error::domain("x0", x0, "(0, 1)"));
    }
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::domain("a", a, "[0, inf)"));
    }
    if !(t_end.is_finite() && t_end > 0.0 && dt.is_finite() && dt > 0.0 && dt < t_end) {
        return Err(Error::StepSize { dt, t_end });
    }

    let rhs = |x: f64| a * x * (1.0 - x);
    let steps = (t_end / dt).ceil() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = x0;
    out.push((0.0, x));
    for i in 0..steps {
        let t = i as f64 * dt;
        let next = ((i + 1) as f64 * dt).min(t_end);
        let h = next - t;
        let k1 = rhs(x);
        let k2 = rhs(x + 0.5 * h * k1);
        let k3 = rhs(x + 0.5 * h * k2);
        let k4 = rhs(x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((next, x));
    }
    Ok(out)
}
