//! Adaptive 1D/2D quadrature with error estimates, and direct-quadrature
//! Fourier inversion.
//!
//! Every routine is deterministic: subdivision order depends only on the
//! integrand values, and partial sums are combined in a fixed order.
//! Semi-infinite ranges are mapped onto `[0, 1)` with
//! `x = start + scale * u / (1 - u)`.

mod adaptive;
mod cubature;
mod fourier;
mod rules;

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use adaptive::{integrate_1d, integrate_pieces};
pub use cubature::{compare_doubled, integrate_2d, integrate_2d_pieces, Domain2};
pub use fourier::{fourier_invert, trapezoid_weights, InverseTransform};

/// Tolerances and limits shared by all integration routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Breakpoint between the resolved band and the mapped tail.
    pub omega_max: f64,
    pub doubling_check: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 1e-6,
            max_subdivisions: 4000,
            omega_max: 8.8,
            doubling_check: true,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return bad(format!(
                "tolerances must be > 0 (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            ));
        }
        if self.max_subdivisions < 10 {
            return bad(format!(
                "max_subdivisions must be >= 10 (got {})",
                self.max_subdivisions
            ));
        }
        if !(self.omega_max > 0.0) || !self.omega_max.is_finite() {
            return bad(format!("omega_max must be > 0 (got {})", self.omega_max));
        }
        Ok(())
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_omega_max(mut self, omega_max: f64) -> Self {
        self.omega_max = omega_max;
        self
    }

    pub fn without_doubling(mut self) -> Self {
        self.doubling_check = false;
        self
    }

    pub(crate) fn target(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude)
    }
}

/// Values that can be integrated: reals, complex numbers, small real vectors.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Fixed-size real vector, for integrating several quantities on one mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multi<const N: usize>(pub [f64; N]);

impl<const N: usize> Add for Multi<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for Multi<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Mul<f64> for Multi<N> {
    type Output = Self;
    fn mul(mut self, rhs: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl<const N: usize> QuadValue for Multi<N> {
    fn zero() -> Self {
        Multi([0.0; N])
    }
    fn magnitude(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Integration result with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

impl<T: QuadValue> Estimate<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Estimate<U> {
        Estimate {
            value: f(self.value),
            error: self.error,
            evaluations: self.evaluations,
        }
    }

    /// Multiplies value and error by a constant factor.
    pub fn scaled(self, factor: f64) -> Self {
        Estimate {
            value: self.value * factor,
            error: self.error * factor.abs(),
            evaluations: self.evaluations,
        }
    }
}

/// Coordinate map of one integration piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Map {
    /// `x = u` on `[a, b]`.
    Identity { a: f64, b: f64 },
    /// `x = start + scale * u / (1 - u)` on `u ∈ [0, 1)`.
    Tail { start: f64, scale: f64 },
}

/// One piece of an integration domain. A folded piece integrates
/// `f(x) + f(-x)`, which pairs mirror points before they are summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub map: Map,
    pub fold: bool,
}

impl Piece {
    pub fn finite(a: f64, b: f64) -> Self {
        Self {
            map: Map::Identity { a, b },
            fold: false,
        }
    }

    pub fn tail(start: f64, scale: f64) -> Self {
        Self {
            map: Map::Tail { start, scale },
            fold: false,
        }
    }

    pub fn folded(mut self) -> Self {
        self.fold = true;
        self
    }

    pub(crate) fn param_range(&self) -> (f64, f64) {
        match self.map {
            Map::Identity { a, b } => (a, b),
            Map::Tail { .. } => (0.0, 1.0),
        }
    }

    /// Physical abscissa and Jacobian at parameter `u`.
    #[inline]
    pub(crate) fn point(&self, u: f64) -> (f64, f64) {
        match self.map {
            Map::Identity { .. } => (u, 1.0),
            Map::Tail { start, scale } => {
                let d = 1.0 - u;
                (start + scale * u / d, scale / (d * d))
            }
        }
    }

    #[inline]
    pub(crate) fn eval<T: QuadValue>(&self, f: &impl Fn(f64) -> T, u: f64) -> T {
        let (x, jac) = self.point(u);
        let v = if self.fold { f(x) + f(-x) } else { f(x) };
        v * jac
    }
}

/// Standard integration domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite(f64, f64),
    SemiInfinite { start: f64, scale: f64 },
    /// Whole real line, evaluated symmetrically as `∫₀^∞ [f(x) + f(-x)] dx`.
    FullLine { scale: f64 },
}

impl Domain {
    pub fn pieces(&self) -> Vec<Piece> {
        match *self {
            Domain::Finite(a, b) => vec![Piece::finite(a, b)],
            Domain::SemiInfinite { start, scale } => vec![Piece::tail(start, scale)],
            Domain::FullLine { scale } => vec![Piece::tail(0.0, scale).folded()],
        }
    }
}

/// Splits `[0, ∞)` into the resolved band `[0, cutoff]` and a mapped tail.
pub fn half_line_pieces(cutoff: f64) -> Vec<Piece> {
    vec![Piece::finite(0.0, cutoff), Piece::tail(cutoff, cutoff)]
}
