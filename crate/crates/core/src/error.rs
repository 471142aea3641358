use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into two families: invalid input (bad shapes, parameters,
/// states) and numeric/domain failures (non-convergence, CPTP violations,
/// a non-positive steady-state denominator). [`Error::is_invalid_input`]
/// tells them apart.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: deviation {deviation:e} exceeds tolerance {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("steady-state denominator H = {h:e} is not positive at gamma={gamma}, n_g={n_g}, n_l={n_l}")]
    NonPositiveDenominator { h: f64, gamma: f64, n_g: f64, n_l: f64 },

    #[error("fixed point requested in the degenerate regime gamma = 1, n_g = 0")]
    DegenerateRegime,

    #[error("limit mode is only defined at gamma = 1, n_g = 0")]
    LimitModeOutOfRegime,

    #[error("steady state did not converge by t = {t_max} (last change {residual:e})")]
    SteadyStateNotConverged { t_max: f64, residual: f64 },

    #[error("map is not completely positive: eigenvalue {eigenvalue:e}")]
    NotCompletelyPositive { eigenvalue: f64 },

    #[error("negative radicand {value:e} in {quantity} at t = {t} ({convention})")]
    NegativeRadicand { quantity: &'static str, value: f64, t: f64, convention: String },

    #[error(
        "analytic Kraus set rejected at t = {t} ({convention}): completeness residual {completeness:e}, channel distance {channel_distance:e}"
    )]
    AnalyticKrausRejected { t: f64, convention: String, completeness: f64, channel_distance: f64 },

    #[error("spin-flipped spectrum has eigenvalue {0:e} below -1e-8")]
    InvalidConcurrence(f64),

    #[error("integration failed: {0}")]
    Integration(String),
}

impl Error {
    /// True when the error stems from caller input rather than a numeric or domain failure.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::Shape(_)
                | Error::NonFinite { .. }
                | Error::NotHermitian { .. }
                | Error::InvalidParams(_)
                | Error::InvalidState(_)
                | Error::NegativeTime(_)
                | Error::InvalidArgument(_)
                | Error::DegenerateRegime
                | Error::LimitModeOutOfRegime
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
