use thiserror::Error;

use crate::model::Diagnostic;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameters: {}", format_diagnostics(.0))]
    InvalidParams(Vec<Diagnostic>),

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The closed forms are 0/0 at omega = 0 when mu0 = 0.
    #[error("degenerate input: omega = 0 with mu0 = 0")]
    Degenerate,

    #[error("operation requires mu0 > 0 (got {0})")]
    RequiresPositiveMu0(f64),

    #[error("quadrature did not converge after {subdivisions} subdivisions: value {value:e}, error estimate {error:e}")]
    NonConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("result sensitive to cutoff: {base:e} at omega_max, {doubled:e} at 2*omega_max, error estimate {error:e}")]
    CutoffSensitivity { base: f64, doubled: f64, error: f64 },

    #[error("inverse transform has imaginary residue {residue:e} relative to peak (limit {limit:e})")]
    ImaginaryResidue { residue: f64, limit: f64 },

    #[error("|qdot| = {0} violates the non-relativistic contract")]
    Relativistic(f64),

    #[error("ODE step size underflow at t = {0}")]
    StepSize(f64),

    #[error("runaway motion after the pulse: velocity drift {drift:e} (limit {limit:e})")]
    Runaway { drift: f64, limit: f64 },
}

fn format_diagnostics(d: &[Diagnostic]) -> String {
    d.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
