use std::io;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] recoil::Error),

    #[error("cannot write {path}: {source}")]
    Output { path: String, source: io::Error },

    #[error("{0} validation check(s) failed")]
    ValidationFailed(usize),
}

impl CliError {
    /// Process exit status for this error.
    ///
    /// 1 validation failure, 2 configuration, 3 non-convergence,
    /// 4 cutoff sensitivity, 5 runaway or relativistic motion.
    pub fn exit_code(&self) -> i32 {
        use recoil::Error as E;
        match self {
            Self::ValidationFailed(_) => 1,
            Self::Config(_) | Self::Output { .. } => 2,
            Self::Core(e) => match e {
                E::InvalidParams(_)
                | E::InvalidPulse(_)
                | E::InvalidConfig(_)
                | E::Degenerate
                | E::RequiresPositiveMu0(_) => 2,
                E::NonConvergence { .. } | E::ImaginaryResidue { .. } | E::StepSize(_) => 3,
                E::CutoffSensitivity { .. } => 4,
                E::Runaway { .. } | E::Relativistic(_) => 5,
            },
        }
    }
}
