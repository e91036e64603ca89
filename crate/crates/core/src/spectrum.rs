//! Spectrum of particles created on each side of the mirror, and the
//! integrated numbers, energies and momenta.
//!
//! Every quantity is proportional to ε². Integrals are evaluated at unit
//! amplitude and ε² is applied once at the end, so the scaling is exact.

use std::cell::RefCell;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::model::ObjectParams;
use crate::pulse::Pulse;
use crate::quadrature::{
    half_line_pieces, integrate_2d, integrate_pieces, Domain, Domain2, Estimate, Multi, Piece,
    QuadratureConfig,
};
use crate::scattering::Side;

/// Number of output frequencies when no grid is given.
pub const DEFAULT_GRID_POINTS: usize = 201;

/// `Υ(ω) = μ₀ω / (μ₀² + ω²(1+λ₀²)²)`.
pub fn upsilon(omega: f64, params: &ObjectParams) -> f64 {
    let a = params.stiffness();
    let mu = params.mu0;
    if mu == 0.0 {
        return 0.0;
    }
    mu * omega / (mu * mu + omega * omega * a * a)
}

/// `η(ω,ω') = Υ(ω) Υ(ω') |f~(ω+ω')|²`.
pub fn eta_kernel(omega: f64, omega_prime: f64, params: &ObjectParams, pulse: &Pulse) -> f64 {
    upsilon(omega, params) * upsilon(omega_prime, params) * pulse.freq(omega + omega_prime).norm_sqr()
}

/// `(1±λ₀)²(1+λ₀²)/(2π²)`, the side prefactor without ε².
fn side_prefactor(side: Side, params: &ObjectParams) -> f64 {
    let l = 1.0 + side.sign() * params.lambda0;
    l * l * params.stiffness() / (2.0 * PI * PI)
}

/// Pieces covering the `ω'` range where `|f~(ω+ω')|` is not negligible.
fn partner_pieces(omega: f64, pulse: &Pulse, cutoff: f64) -> Vec<Piece> {
    match pulse.spectral_support() {
        Some(bands) => bands
            .iter()
            .filter_map(|&(lo, hi)| {
                let a = (lo - omega).max(0.0);
                let b = hi - omega;
                (b > a).then(|| Piece::finite(a, b))
            })
            .collect(),
        None => half_line_pieces(cutoff),
    }
}

/// Pieces covering the emitted-frequency range `ω ≥ 0`.
fn emitted_pieces(pulse: &Pulse, cutoff: f64) -> Vec<Piece> {
    match pulse.spectral_support() {
        Some(_) => vec![Piece::finite(0.0, pulse.spectral_edge(cutoff))],
        None => half_line_pieces(cutoff),
    }
}

/// `∫₀^∞ η(ω,ω') dω'` at unit amplitude.
fn unit_density(omega: f64, params: &ObjectParams, pulse: &Pulse, quad: &QuadratureConfig) -> Result<Estimate<f64>> {
    let y = upsilon(omega, params);
    if y == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let inner = integrate_pieces(
        |wp: f64| upsilon(wp, params) * pulse.freq(omega + wp).norm_sqr(),
        &partner_pieces(omega, pulse, quad.omega_max),
        &QuadratureConfig {
            abs_tol: quad.abs_tol / y,
            ..*quad
        },
    )?;
    Ok(inner.scaled(y))
}

/// `n±(ω)`, particles per unit frequency emitted on one side.
pub fn spectral_density(
    side: Side,
    omega: f64,
    params: &ObjectParams,
    pulse: &Pulse,
    quad: &QuadratureConfig,
) -> Result<Estimate<f64>> {
    let eps2 = params.epsilon * params.epsilon;
    let unit = unit_density(omega, params, pulse, quad)?;
    Ok(unit.scaled(side_prefactor(side, params)).scaled(eps2))
}

/// An integrated quantity and its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quantity {
    pub value: f64,
    pub error: f64,
}

impl Quantity {
    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub grid: FrequencyGrid,
    pub omega: Vec<f64>,
    pub n_plus: Vec<f64>,
    pub n_minus: Vec<f64>,
    pub n_plus_error: Vec<f64>,
    pub n_minus_error: Vec<f64>,
    pub number_plus: Quantity,
    pub number_minus: Quantity,
    pub energy_plus: Quantity,
    pub energy_minus: Quantity,
    /// `+E₊`.
    pub momentum_plus: Quantity,
    /// `-E₋`.
    pub momentum_minus: Quantity,
    /// Net momentum by direct 2D quadrature of `ω η` over the first quadrant.
    pub momentum_net: Quantity,
    /// Net momentum as `E₊ - E₋` from the nested 1D integrals.
    pub momentum_net_nested: Quantity,
}

impl SpectrumResult {
    pub fn number_total(&self) -> Quantity {
        Quantity::new(
            self.number_plus.value + self.number_minus.value,
            self.number_plus.error + self.number_minus.error,
        )
    }

    pub fn energy_total(&self) -> Quantity {
        Quantity::new(
            self.energy_plus.value + self.energy_minus.value,
            self.energy_plus.error + self.energy_minus.error,
        )
    }
}

/// Output grid used by [`integrate_spectrum`].
pub fn default_grid(pulse: &Pulse, quad: &QuadratureConfig) -> FrequencyGrid {
    FrequencyGrid::uniform(pulse.spectral_edge(quad.omega_max), DEFAULT_GRID_POINTS)
}

/// Unit-amplitude double integrals `∫∫η` and `∫∫ωη` by nested 1D quadrature.
/// Inner errors are integrated alongside and added to the outer estimate.
fn nested_moments(params: &ObjectParams, pulse: &Pulse, quad: &QuadratureConfig) -> Result<[Quantity; 2]> {
    let inner_cfg = quad.with_tolerances(0.1 * quad.abs_tol, 0.1 * quad.rel_tol);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let outer = integrate_pieces(
        |w: f64| match unit_density(w, params, pulse, &inner_cfg) {
            Ok(d) => Multi([d.value, w * d.value, d.error]),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Multi([f64::NAN; 3])
            }
        },
        &emitted_pieces(pulse, quad.omega_max),
        quad,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    let [j0, j1, inner_err] = outer.value.0;
    let err = outer.error + inner_err;
    Ok([Quantity::new(j0, err), Quantity::new(j1, err)])
}

/// Unit-amplitude `∫∫ ω η` by 2D cubature.
fn direct_first_moment(params: &ObjectParams, pulse: &Pulse, quad: &QuadratureConfig) -> Result<Quantity> {
    let domain = match pulse.spectral_support() {
        Some(_) => {
            let edge = pulse.spectral_edge(quad.omega_max);
            Domain2::Product(Domain::Finite(0.0, edge), Domain::Finite(0.0, edge))
        }
        None => Domain2::FirstQuadrant,
    };
    let r = integrate_2d(|w: f64, wp: f64| w * eta_kernel(w, wp, params, pulse), domain, quad)?;
    Ok(Quantity::new(r.value, r.error))
}

pub fn integrate_spectrum(params: &ObjectParams, pulse: &Pulse, quad: &QuadratureConfig) -> Result<SpectrumResult> {
    integrate_spectrum_on(params, pulse, quad, &default_grid(pulse, quad))
}

/// As [`integrate_spectrum`], with densities reported on `grid`.
pub fn integrate_spectrum_on(
    params: &ObjectParams,
    pulse: &Pulse,
    quad: &QuadratureConfig,
    grid: &FrequencyGrid,
) -> Result<SpectrumResult> {
    params.validate()?;
    pulse.validate()?;
    quad.validate()?;
    grid.validate()?;

    let eps2 = params.epsilon * params.epsilon;
    let pre_plus = side_prefactor(Side::Plus, params);
    let pre_minus = side_prefactor(Side::Minus, params);

    let omega = grid.points();
    let densities: Vec<Estimate<f64>> = omega
        .par_iter()
        .map(|&w| unit_density(w, params, pulse, quad))
        .collect::<Result<_>>()?;
    let side = |pre: f64| -> (Vec<f64>, Vec<f64>) {
        densities
            .iter()
            .map(|d| (eps2 * (pre * d.value), eps2 * (pre * d.error)))
            .unzip()
    };
    let (n_plus, n_plus_error) = side(pre_plus);
    let (n_minus, n_minus_error) = side(pre_minus);

    let [j0, j1] = nested_moments(params, pulse, quad)?;
    let scale = |pre: f64, q: Quantity| Quantity::new(eps2 * (pre * q.value), eps2 * (pre * q.error));
    let number_plus = scale(pre_plus, j0);
    let number_minus = scale(pre_minus, j0);
    let energy_plus = scale(pre_plus, j1);
    let energy_minus = scale(pre_minus, j1);

    let direct = direct_first_moment(params, pulse, quad)?;
    let pre_net = 2.0 * params.lambda0 * params.stiffness() / (PI * PI);
    let momentum_net = Quantity::new(eps2 * (pre_net * direct.value), eps2 * (pre_net.abs() * direct.error));

    Ok(SpectrumResult {
        grid: *grid,
        omega,
        n_plus,
        n_minus,
        n_plus_error,
        n_minus_error,
        number_plus,
        number_minus,
        energy_plus,
        energy_minus,
        momentum_plus: energy_plus,
        momentum_minus: Quantity::new(-energy_minus.value, energy_minus.error),
        momentum_net,
        momentum_net_nested: Quantity::new(
            energy_plus.value - energy_minus.value,
            energy_plus.error + energy_minus.error,
        ),
    })
}
