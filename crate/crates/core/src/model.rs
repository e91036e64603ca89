//! Object parameters and their validation.
//!
//! Natural units are used throughout (c = hbar = 1). The Fourier convention
//! shared by every module is
//!
//! ```text
//! f~(w) = ∫ dt f(t) e^{+iwt},      f(t) = ∫ dw/(2π) f~(w) e^{-iwt}
//! ```

use std::fmt;

use crate::error::{Error, Result};

/// Above this perturbation amplitude the second-order expansion is not trusted.
pub const EPSILON_WARN: f64 = 0.1;

/// Static couplings of the mirror and its rest mass.
///
/// The time-dependent coupling is `mu(t) = mu0 * (1 + epsilon * f(t))`;
/// `lambda0` multiplies the δ' term and makes the object left/right asymmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectParams {
    pub lambda0: f64,
    pub mu0: f64,
    pub epsilon: f64,
    pub mass0: f64,
}

impl ObjectParams {
    pub fn new(lambda0: f64, mu0: f64, epsilon: f64, mass0: f64) -> Self {
        Self {
            lambda0,
            mu0,
            epsilon,
            mass0,
        }
    }

    /// `1 + lambda0²`, the factor that appears in every denominator.
    #[inline]
    pub fn stiffness(&self) -> f64 {
        1.0 + self.lambda0 * self.lambda0
    }

    /// Same object with the faces swapped (lambda0 -> -lambda0).
    pub fn mirrored(&self) -> Self {
        Self {
            lambda0: -self.lambda0,
            ..*self
        }
    }

    pub fn with_lambda0(&self, lambda0: f64) -> Self {
        Self { lambda0, ..*self }
    }

    pub fn with_mu0(&self, mu0: f64) -> Self {
        Self { mu0, ..*self }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..*self }
    }

    /// Checks every invariant and reports all violations at once.
    ///
    /// On success the returned list holds warnings only (possibly empty).
    pub fn validate(&self) -> Result<Vec<Diagnostic>> {
        let mut errors = Vec::new();
        let mut warnings = Vec::new();

        if !(-1.0..=1.0).contains(&self.lambda0) {
            errors.push(Diagnostic::error(
                "lambda0",
                self.lambda0,
                "lambda0 out of [-1,1]",
            ));
        }
        if !(self.mu0 >= 0.0) || !self.mu0.is_finite() {
            errors.push(Diagnostic::error("mu0", self.mu0, "mu0 must be finite and >= 0"));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            errors.push(Diagnostic::error(
                "epsilon",
                self.epsilon,
                "epsilon must be finite and >= 0",
            ));
        } else if self.epsilon > EPSILON_WARN {
            warnings.push(Diagnostic::warning(
                "epsilon",
                self.epsilon,
                "epsilon outside perturbative regime",
            ));
        }
        if !(self.mass0 > 0.0) || !self.mass0.is_finite() {
            errors.push(Diagnostic::error("mass0", self.mass0, "mass0 must be > 0"));
        }

        if errors.is_empty() {
            Ok(warnings)
        } else {
            errors.extend(warnings);
            Err(Error::InvalidParams(errors))
        }
    }
}

impl Default for ObjectParams {
    /// Reference configuration: mu0 = 1, lambda0 = -0.5, epsilon = 0.01, M0 = 10⁶.
    fn default() -> Self {
        Self::new(-0.5, 1.0, 0.01, 1.0e6)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// One invariant violation (or warning) on a named field.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub field: &'static str,
    pub value: f64,
    pub message: String,
    pub severity: Severity,
}

impl Diagnostic {
    pub fn error(field: &'static str, value: f64, message: impl Into<String>) -> Self {
        Self {
            field,
            value,
            message: message.into(),
            severity: Severity::Error,
        }
    }

    pub fn warning(field: &'static str, value: f64, message: impl Into<String>) -> Self {
        Self {
            field,
            value,
            message: message.into(),
            severity: Severity::Warning,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {} = {} ({})", self.field, self.value, self.message)
    }
}
