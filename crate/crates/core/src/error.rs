use thiserror::Error;

/// Errors raised by the model, integrator and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    RootNotFound { iterations: usize, residual: f64 },

    #[error("steady-state residual {residual:e} exceeds {limit:e} for the {variant} model")]
    SteadyStateResidual {
        variant: &'static str,
        residual: f64,
        limit: f64,
    },

    #[error("integration exceeded {max_steps} steps at t = {t} (accepted {accepted}, rejected {rejected}, h = {h:e})")]
    MaxStepsExceeded {
        max_steps: usize,
        t: f64,
        h: f64,
        accepted: usize,
        rejected: usize,
    },

    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
