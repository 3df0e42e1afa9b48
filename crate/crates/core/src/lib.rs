//! Planner's trade-off between economic activity and health in an SI epidemic.
//!
//! The infection wave follows the logistic solution of `x' = a x (1 - x)`.
//! A planner picks the peak time `b` (equivalently the spread intensity `a`)
//! once, at `t = 0`, and total welfare over `[0, T]` mixes production and
//! health with weight `lambda`.
//!
//! - [`dynamics`]: closed-form wave and an RK4 oracle.
//! - [`capacity`]: critical peak time and the overload interval.
//! - [`welfare`]: production, health, and total welfare (closed form and quadrature).
//! - [`optimizer`]: global peak-time search, parameter sweeps, proposition checks.
//! - [`cli`]: the `epiplan` command-line front end.

pub mod capacity;
pub mod cli;
pub mod dynamics;
mod error;
pub mod optimizer;
pub mod quadrature;
pub mod welfare;

pub use capacity::{b_star, overload_interval, OverloadInterval};
pub use dynamics::{a_from_b, b_from_a, integrate_ode, Epidemic};
pub use error::{Error, Result};
pub use optimizer::{maximize_welfare, sweep, OptimizationResult, SweepParam};
pub use welfare::{check_feasibility, GFunction, WelfarePolicy};
