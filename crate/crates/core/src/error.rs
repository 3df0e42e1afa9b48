use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the range the model is defined on.
    #[error("{name} outside {range} (got {value})")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// `g(b) * xdot(t) > 1`, so production would go negative.
    #[error("infeasible policy: g(b) * xdot = {load} > 1 at b = {b}")]
    Infeasible { b: f64, load: f64 },

    #[error("step size dt = {dt} must be positive and below t_end = {t_end}")]
    StepSize { dt: f64, t_end: f64 },

    #[error("adaptive quadrature did not converge within depth {max_depth} on [{lo}, {hi}]")]
    NonConvergence { max_depth: usize, lo: f64, hi: f64 },

    #[error("{param} = {value}: {source}")]
    SweepPoint {
        param: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, range: &'static str) -> Self {
        Error::Domain { name, value, range }
    }
}
