//! Crate-wide error type.

use thiserror::Error;

/// Errors produced while building specs, stepping models, or exporting runs.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received an argument outside its domain.
    #[error("invalid argument `{arg}`: {reason}")]
    InvalidArgument {
        /// Name of the offending parameter.
        arg: &'static str,
        /// Why it was rejected.
        reason: String,
    },

    /// A computed quantity left the finite range (NaN or infinity).
    #[error("non-finite value in {context} at t = {t} s")]
    NonFinite {
        /// Which quantity went non-finite.
        context: String,
        /// Simulation time at the failure.
        t: f64,
    },

    /// The plant state exceeded its divergence bound; the run was aborted.
    #[error("plant diverged: |{quantity}| = {value:.3e} exceeded bound {bound:.3e} at t = {t} s")]
    Diverged {
        /// Which state exceeded the bound.
        quantity: &'static str,
        /// Its value at the abort.
        value: f64,
        /// The configured bound.
        bound: f64,
        /// Simulation time at the abort.
        t: f64,
    },

    /// Stateful per-sample evaluators must be advanced with strictly
    /// increasing ticks; re-evaluating a tick would corrupt their memory.
    #[error("sample tick {tick} does not advance past {last}; per-sample state already updated")]
    TickNotAdvanced {
        /// The rejected tick.
        tick: u64,
        /// The last accepted tick.
        last: u64,
    },

    /// Config file could not be parsed or failed validation.
    #[error("config error: {0}")]
    Config(String),

    /// Underlying I/O failure while reading or writing artifacts.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(arg: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            arg,
            reason: reason.into(),
        }
    }
}
