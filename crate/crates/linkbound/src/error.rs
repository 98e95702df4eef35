use thiserror::Error;

/// Errors raised by model validation, closed-form preconditions, the
/// quadrature engine and the planner.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A model parameter failed validation.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Trajectory starts inside the reference distance, where the
    /// path-loss model is undefined.
    #[error("trajectory violates d(t) >= d0: distance {distance} m at t = {t} s is below reference distance {d0} m")]
    InsideReferenceDistance { distance: f64, d0: f64, t: f64 },

    /// The one-dimensional bound requires transmit SNR S > 1; below that
    /// the series in the closed form does not converge. The quadrature
    /// oracle still applies.
    #[error("transmit SNR S = {s} violates the S > 1 hypothesis of the 1D closed-form bound; use the quadrature oracle instead")]
    SnrNotAboveOne { s: f64 },

    /// A closed form valid only for path-loss exponent 2 was requested
    /// with a different exponent.
    #[error("closed form requires path loss exponent alpha = 2 exactly, got {alpha}")]
    AlphaNotTwo { alpha: f64 },

    /// Adaptive quadrature hit its subdivision cap before reaching the
    /// requested tolerance. Carries the best estimate so far.
    #[error("quadrature did not converge within {subdivisions} subdivisions: best estimate {best} nats, error estimate {error_estimate}")]
    QuadratureDidNotConverge {
        best: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    /// The requested data target lies at or below the S -> 1+ infimum of
    /// the bound, so no transmit power can reach it under the 1D model.
    #[error("target {target_nats} nats is infeasible at speed {speed_mps} m/s: the S -> 1 infimum of the bound is {infimum_nats} nats")]
    InfeasibleTarget {
        target_nats: f64,
        infimum_nats: f64,
        speed_mps: f64,
    },

    /// Bracket expansion for the power solve ran out of headroom before
    /// enclosing the target.
    #[error("could not bracket the target {target_nats} nats below S = {s_hi}")]
    BracketExpansionFailed { target_nats: f64, s_hi: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
