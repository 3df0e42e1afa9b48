//! Health-care overload geometry.
//!
//! The wave peaks at height `a / 4`. When that exceeds the capacity `c`, the
//! rate `x'(t)` stays at or above `c` on `[t_l, t_r]` with
//!
//! ```text
//! t_{l,r} = b + ln(k -/+ sqrt(k^2 - 1)) / a,    k = (a - 2c) / (2c)
//! ```
//!
//! Since `(k - s)(k + s) = 1`, the two roots sit symmetrically about `b`.
//! The critical peak time `b* = ln(1/x0 - 1) / (4c)` is where the peak
//! height equals `c` exactly; for `b >= b*` capacity is never exceeded.

use crate::dynamics::{a_from_b, b_from_a};
use crate::error::{Error, Result};

/// Times where the infection rate is at or above capacity, clipped to `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverloadInterval {
    pub t_l: f64,
    pub t_r: f64,
    /// The raw left root was below 0.
    pub clipped_left: bool,
    /// The raw right root was beyond the horizon.
    pub clipped_right: bool,
}

impl OverloadInterval {
    pub fn width(&self) -> f64 {
        self.t_r - self.t_l
    }

    pub fn is_degenerate(&self) -> bool {
        self.t_l == self.t_r
    }

    pub fn is_clipped(&self) -> bool {
        self.clipped_left || self.clipped_right
    }

    /// Membership in the open interval `(t_l, t_r)`, where health is lost.
    pub fn contains_open(&self, t: f64) -> bool {
        t > self.t_l && t < self.t_r
    }
}

fn check_capacity(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::domain("c", c, "(0, inf)"))
    }
}

/// Peak time at which the wave's height equals the capacity `c`.
pub fn b_star(c: f64, x0: f64) -> Result<f64> {
    check_capacity(c)?;
    b_from_a(4.0 * c, x0)
}

/// Unclipped roots `(t_l, t_r)` of `x'(t) = c` for the wave peaking at `b`.
///
/// `None` when the peak stays below capacity (`b > b*`); the degenerate pair
/// `(b, b)` at `b = b*`.
pub fn overload_roots(b: f64, c: f64, x0: f64) -> Result<Option<(f64, f64)>> {
    let a = a_from_b(b, x0)?;
    let critical = b_star(c, x0)?;
    if b > critical {
        return Ok(None);
    }
    if b == critical {
        return Ok(Some((b, b)));
    }
    // k - 1 = (a - 4c) / (2c); written this way so k^2 - 1 keeps its digits near b*
    let k_minus_one = ((a - 4.0 * c) / (2.0 * c)).max(0.0);
    let s = (k_minus_one * (k_minus_one + 2.0)).sqrt();
    let half_width = (k_minus_one + s).ln_1p() / a;
    Ok(Some((b - half_width, b + half_width)))
}

/// Overload interval of the wave peaking at `b`, clipped to `[0, horizon]`.
pub fn overload_interval(b: f64, c: f64, x0: f64, horizon: f64) -> Result<Option<OverloadInterval>> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::domain("T", horizon, "(0, inf)"));
    }
    let Some((raw_l, raw_r)) = overload_roots(b, c, x0)? else {
        return Ok(None);
    };
    Ok(Some(OverloadInterval {
        t_l: raw_l.clamp(0.0, horizon),
        t_r: raw_r.clamp(0.0, horizon),
        clipped_left: raw_l < 0.0,
        clipped_right: raw_r > horizon,
    }))
}
