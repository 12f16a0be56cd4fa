use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the set where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Block structures, grids or time grids that should agree do not.
    #[error("shape error: {0}")]
    Shape(String),

    #[error("partition error: {0}")]
    Partition(String),

    #[error("capability error: {0}")]
    Capability(String),

    #[error("quadrature did not converge: achieved error estimate {achieved:e} after {evaluations} evaluations")]
    Quadrature { achieved: f64, evaluations: usize },

    #[error("numerical blow-up: non-finite state at step {step} (particle {particle})")]
    Blowup { step: usize, particle: usize },

    #[error("step size {dt} violates the drift Courant bound (max speed {max_speed}); use dt <= {suggested_dt}")]
    Stability {
        dt: f64,
        max_speed: f64,
        suggested_dt: f64,
    },

    #[error("solver fault: {0}")]
    SolverFault(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Whether the error comes from numerics rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::Blowup { .. }
                | Error::Stability { .. }
                | Error::SolverFault(_)
        )
    }
}
