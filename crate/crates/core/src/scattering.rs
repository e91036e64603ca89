//! Static scattering matrix of the δ-δ' mirror and its perturbative
//! corrections under a time-dependent coupling.
//!
//! Matrix rows are the outgoing fields (right, left) and columns the incoming
//! fields (left, right), so `S₀ = [s₊, r₊; r₋, s₋]`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ObjectParams;
use crate::pulse::Pulse;

/// Face of the mirror; `Plus` is the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

/// `iμ₀ + ω(1+λ₀²)`, the denominator shared by every coefficient.
fn denominator(omega: f64, params: &ObjectParams) -> Result<Complex64> {
    if omega == 0.0 && params.mu0 == 0.0 {
        return Err(Error::Degenerate);
    }
    Ok(Complex64::new(omega * params.stiffness(), params.mu0))
}

/// `1 / (iμ₀ + ω(1+λ₀²))`.
pub(crate) fn resolvent(omega: f64, params: &ObjectParams) -> Result<Complex64> {
    Ok(denominator(omega, params)?.inv())
}

/// Transmission coefficient; identical on both sides.
pub fn s_coeff(_side: Side, omega: f64, params: &ObjectParams) -> Result<Complex64> {
    let l = params.lambda0;
    Ok(Complex64::new(omega * (1.0 - l * l), 0.0) / denominator(omega, params)?)
}

/// Reflection coefficient `-(iμ₀ ∓ 2ωλ₀) / (iμ₀ + ω(1+λ₀²))`.
pub fn r_coeff(side: Side, omega: f64, params: &ObjectParams) -> Result<Complex64> {
    let num = Complex64::new(-side.sign() * 2.0 * omega * params.lambda0, params.mu0);
    Ok(-num / denominator(omega, params)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringMatrix {
    pub elements: [[Complex64; 2]; 2],
}

impl ScatteringMatrix {
    pub fn zero() -> Self {
        Self {
            elements: [[Complex64::new(0.0, 0.0); 2]; 2],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elements[row][col]
    }

    /// `|a|² + |b|²` of each row.
    pub fn row_norms(&self) -> [f64; 2] {
        self.elements.map(|r| r[0].norm_sqr() + r[1].norm_sqr())
    }

    pub fn conj(&self) -> Self {
        Self {
            elements: self.elements.map(|r| r.map(|z| z.conj())),
        }
    }

    /// Relabels left and right: rows and columns swapped together.
    pub fn swapped(&self) -> Self {
        let e = &self.elements;
        Self {
            elements: [[e[1][1], e[1][0]], [e[0][1], e[0][0]]],
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            elements: self.elements.map(|r| r.map(|z| z * factor)),
        }
    }

    /// Largest elementwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.elements[i][j] - other.elements[i][j]).norm());
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Self::zero())
    }
}

/// `S₀(ω) = [s₊, r₊; r₋, s₋]`.
pub fn s0_matrix(omega: f64, params: &ObjectParams) -> Result<ScatteringMatrix> {
    let s = s_coeff(Side::Plus, omega, params)?;
    Ok(ScatteringMatrix {
        elements: [
            [s, r_coeff(Side::Plus, omega, params)?],
            [r_coeff(Side::Minus, omega, params)?, s],
        ],
    })
}

/// `𝕊(ω) = [s₊, 1+r₊; 1+r₋, s₋]`.
pub fn s_aux_matrix(omega: f64, params: &ObjectParams) -> Result<ScatteringMatrix> {
    let mut m = s0_matrix(omega, params)?;
    m.elements[0][1] += 1.0;
    m.elements[1][0] += 1.0;
    Ok(m)
}

/// `α(ω,ω') = -iμ₀ f~(ω-ω') / (iμ₀ + ω(1+λ₀²))`.
pub fn alpha_kernel(omega: f64, omega_prime: f64, params: &ObjectParams, pulse: &Pulse) -> Result<Complex64> {
    Ok(Complex64::new(0.0, -params.mu0) * pulse.freq(omega - omega_prime) / denominator(omega, params)?)
}

/// First-order correction `ε α(ω,ω') 𝕊(ω')`.
pub fn delta_s1(
    omega: f64,
    omega_prime: f64,
    params: &ObjectParams,
    pulse: &Pulse,
) -> Result<ScatteringMatrix> {
    let a = alpha_kernel(omega, omega_prime, params, pulse)?;
    Ok(s_aux_matrix(omega_prime, params)?.scale(a * params.epsilon))
}

/// Second-order correction `ε² α(ω,ω') α(ω',ω'') 𝕊(ω'')`.
pub fn delta_s2(
    omega: f64,
    omega_prime: f64,
    omega_dprime: f64,
    params: &ObjectParams,
    pulse: &Pulse,
) -> Result<ScatteringMatrix> {
    let a1 = alpha_kernel(omega, omega_prime, params, pulse)?;
    let a2 = alpha_kernel(omega_prime, omega_dprime, params, pulse)?;
    let eps = params.epsilon;
    Ok(s_aux_matrix(omega_dprime, params)?.scale(a1 * a2 * (eps * eps)))
}
