//! Error type shared by every module. Payloads carry enough context to act
//! on: ill-conditioned failures include the eigenvalue spectrum that tripped
//! the check, estimation failures include the mode list that was rejected.

use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Frequency/damping pair attached to estimation-failure diagnostics.
///
/// Always `f64`: error payloads are for humans and logs, not further math.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeDiagnostic {
    pub frequency_hz: f64,
    pub damping_per_s: f64,
}

impl std::fmt::Display for ModeDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:.6e} Hz (damping {:.3e} /s)",
            self.frequency_hz, self.damping_per_s
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on arguments or configuration was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The estimation problem is numerically degenerate (for example a
    /// correlation matrix whose signal/noise eigenvalue gap vanished).
    #[error("ill-conditioned: {reason}; eigenvalues {eigenvalues:?}")]
    IllConditioned {
        reason: String,
        /// Eigenvalue spectrum at the point of failure, descending.
        eigenvalues: Vec<f64>,
    },

    /// The estimator ran but could not produce the requested answer
    /// (for example fewer than two in-band modes to split).
    #[error("estimation failed: {reason}{}", format_modes(modes))]
    EstimationFailure {
        reason: String,
        /// Modes that were available when the failure was declared.
        modes: Vec<ModeDiagnostic>,
    },

    /// The excitation spectrum is too weak somewhere in the requested band
    /// for a reflection quotient to be meaningful.
    #[error(
        "excitation spectrum below {threshold_rel:.0e} of its peak at {} in-band frequencies (first at {:.6e} Hz)",
        offending_hz.len(),
        offending_hz.first().copied().unwrap_or(f64::NAN)
    )]
    SpectrumUnderflow {
        threshold_rel: f64,
        offending_hz: Vec<f64>,
    },

    /// A curve lookup target lies outside the sampled range; extrapolation is
    /// never attempted.
    #[error(
        "target {target} outside curve range [{y_min}, {y_max}]; nearest endpoint at x = {nearest_x}"
    )]
    CurveOutOfRange {
        target: f64,
        y_min: f64,
        y_max: f64,
        nearest_x: f64,
    },

    /// Malformed external data (CSV structure, header, grid uniformity).
    #[error("{path}: {message}")]
    Format { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn format(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: msg.into(),
        }
    }

    /// True for failures of the estimation itself, as opposed to bad inputs.
    pub fn is_estimation_failure(&self) -> bool {
        matches!(
            self,
            Error::IllConditioned { .. }
                | Error::EstimationFailure { .. }
                | Error::SpectrumUnderflow { .. }
        )
    }
}

fn format_modes(modes: &[ModeDiagnostic]) -> String {
    if modes.is_empty() {
        return String::new();
    }
    let list: Vec<String> = modes.iter().map(|m| m.to_string()).collect();
    format!("; modes: [{}]", list.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimation_failure_lists_modes() {
        let err = Error::EstimationFailure {
            reason: "fewer than two in-band modes".into(),
            modes: vec![ModeDiagnostic {
                frequency_hz: 3.65e9,
                damping_per_s: -1.0e8,
            }],
        };
        let text = err.to_string();
        assert!(text.contains("3.650000e9"), "got: {text}");
        assert!(err.is_estimation_failure());
    }

    #[test]
    fn invalid_argument_is_not_estimation_failure() {
        assert!(!Error::invalid("dt must be positive").is_estimation_failure());
    }
}
