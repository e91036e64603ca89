//! Mean force on the mirror to second order in ε, in the frequency and time
//! domains. The spectra here exclude ε; callers apply `ε` and `ε²`.
//!
//! The second-order spectrum is evaluated in strip coordinates
//! `s = ω' + ω''`, `u = ω''`, where the two pulse factors depend on `s` only:
//!
//! ```text
//! F~₂(ω) = -μ₀² ∫ds f~(s) f~(ω-s) ∫du χ₂(ω, s-u, u) h(s-u) h(ω-u)
//! ```
//!
//! The `u` integral is taken as `∫₀^∞ [g(u) + g(-u)] du`; the two halves grow
//! like `±1/|u|` and only their sum converges. The result is projected onto
//! its Hermitian part `[F(ω) + conj F(-ω)]/2`, which is the transform of a
//! real force.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ObjectParams;
use crate::pulse::Pulse;
use crate::quadrature::{
    compare_doubled, fourier_invert, integrate_pieces, trapezoid_weights, Estimate, Multi, Piece,
    QuadratureConfig,
};
use crate::scattering::resolvent;

/// Below this |ρ| the χ₁ braces are summed as a power series.
const CHI1_SERIES_RHO: f64 = 0.05;

/// Relative imaginary part tolerated in inverse transforms.
pub const RESIDUE_LIMIT: f64 = 1e-8;

/// Coarsest frequency spacing used for time series.
pub const MAX_D_OMEGA: f64 = 0.05;

fn require_mu0(params: &ObjectParams) -> Result<()> {
    if params.mu0 > 0.0 {
        Ok(())
    } else {
        Err(Error::RequiresPositiveMu0(params.mu0))
    }
}

/// `{...}/ρ²` of the χ₁ closed form.
fn chi1_braces_over_rho2(rho: f64) -> Complex64 {
    if rho.abs() < CHI1_SERIES_RHO {
        // Σ c_k ρ^k, c_k = i/6, -1/6, -2i/15, 1/10, 31i/420, -23/420,
        // -13i/315, 2/63, 173i/6930, -139/6930
        const C: [(f64, f64); 10] = [
            (0.0, 1.0 / 6.0),
            (-1.0 / 6.0, 0.0),
            (0.0, -2.0 / 15.0),
            (1.0 / 10.0, 0.0),
            (0.0, 31.0 / 420.0),
            (-23.0 / 420.0, 0.0),
            (0.0, -13.0 / 315.0),
            (2.0 / 63.0, 0.0),
            (0.0, 173.0 / 6930.0),
            (-139.0 / 6930.0, 0.0),
        ];
        let mut acc = Complex64::new(0.0, 0.0);
        for &(re, im) in C.iter().rev() {
            acc = (acc + Complex64::new(re, im)) * rho;
        }
        return acc;
    }
    let i = Complex64::i();
    let ratio = (rho + i) / (rho + 2.0 * i);
    let bracket = Complex64::new(-(rho * rho).ln_1p(), 2.0 * rho.atan());
    (ratio * bracket - i * rho) / (rho * rho)
}

/// First-order susceptibility χ₁(ω); zero at ω = 0.
pub fn chi1(omega: f64, params: &ObjectParams) -> Result<Complex64> {
    require_mu0(params)?;
    Ok(chi1_unchecked(omega, params))
}

fn chi1_unchecked(omega: f64, params: &ObjectParams) -> Complex64 {
    let a = params.stiffness();
    let rho = a * omega / params.mu0;
    chi1_braces_over_rho2(rho) * (2.0 * params.lambda0 * omega * omega / (PI * a))
}

/// `F~₁(ω) = χ₁(ω) f~(ω)`.
pub fn f1_tilde(omega: f64, params: &ObjectParams, pulse: &Pulse) -> Result<Complex64> {
    Ok(chi1(omega, params)? * pulse.freq(omega))
}

/// `h(ω) = 1 / (iμ₀ + ω(1+λ₀²))`.
pub fn h_kernel(omega: f64, params: &ObjectParams) -> Result<Complex64> {
    resolvent(omega, params)
}

#[inline]
fn h(omega: f64, a: f64, mu: f64) -> Complex64 {
    Complex64::new(omega * a, mu).inv()
}

fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Second-order kernel `χ₂(ω, ω', ω'')`, with Θ(0) = 1/2 and sgn(0) = 0.
pub fn chi2(omega: f64, omega_prime: f64, omega_dprime: f64, params: &ObjectParams) -> Result<Complex64> {
    require_mu0(params)?;
    Ok(chi2_unchecked(omega, omega_prime, omega_dprime, params))
}

#[inline]
fn chi2_unchecked(omega: f64, wp: f64, wpp: f64, params: &ObjectParams) -> Complex64 {
    let (a, mu, l) = (params.stiffness(), params.mu0, params.lambda0);
    let s = sign(wpp);
    if s == 0.0 || l == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let bracket = h(-wp, a, mu) * (heaviside(wpp) * wp * wp * a) - wpp / 2.0;
    bracket * h(wpp, a, mu) * (l * (wpp - omega) * s / (PI * PI))
}

/// Outer `s` pieces where both `f~(s)` and `f~(ω-s)` are retained.
fn strip_pieces(omega: f64, pulse: &Pulse, breakpoint: f64) -> Vec<Piece> {
    match pulse.spectral_support() {
        Some(bands) => {
            let mut out = Vec::new();
            for &(a0, a1) in &bands {
                for &(b0, b1) in &bands {
                    let lo = a0.max(omega - b1);
                    let hi = a1.min(omega - b0);
                    if hi > lo {
                        out.push(Piece::finite(lo, hi));
                    }
                }
            }
            out
        }
        None => vec![
            Piece::finite(-breakpoint, breakpoint),
            Piece::tail(breakpoint, breakpoint).folded(),
        ],
    }
}

fn pieces_length(pieces: &[Piece], breakpoint: f64) -> f64 {
    pieces
        .iter()
        .map(|p| match p.map {
            crate::quadrature::Map::Identity { a, b } => b - a,
            crate::quadrature::Map::Tail { .. } => 2.0 * breakpoint,
        })
        .sum()
}

/// The second-order double integral exactly as written, without the
/// Hermitian projection, with the `u` tail starting at `breakpoint`.
pub fn f2_tilde_raw(
    omega: f64,
    params: &ObjectParams,
    pulse: &Pulse,
    quad: &QuadratureConfig,
    breakpoint: f64,
) -> Result<Estimate<Complex64>> {
    require_mu0(params)?;
    let zero = Estimate {
        value: Complex64::new(0.0, 0.0),
        error: 0.0,
        evaluations: 0,
    };
    if params.lambda0 == 0.0 {
        return Ok(zero);
    }
    let (a, mu) = (params.stiffness(), params.mu0);
    let outer_pieces = strip_pieces(omega, pulse, breakpoint);
    if outer_pieces.is_empty() {
        return Ok(zero);
    }
    let outer_len = pieces_length(&outer_pieces, breakpoint);
    let inner_pieces = [
        Piece::finite(0.0, breakpoint).folded(),
        Piece::tail(breakpoint, breakpoint).folded(),
    ];
    let inner_rel = 0.1 * quad.rel_tol;
    let failure: RefCell<Option<Error>> = RefCell::new(None);

    let outer = integrate_pieces(
        |s: f64| {
            let weight = pulse.freq(s) * pulse.freq(omega - s) * (-mu * mu);
            let scale = weight.norm();
            if scale == 0.0 {
                return Multi([0.0; 3]);
            }
            let g = |u: f64| {
                chi2_unchecked(omega, s - u, u, params) * h(s - u, a, mu) * h(omega - u, a, mu)
            };
            let cfg = QuadratureConfig {
                abs_tol: 0.1 * quad.abs_tol / (scale * outer_len),
                rel_tol: inner_rel,
                ..*quad
            };
            match integrate_pieces(g, &inner_pieces, &cfg) {
                Ok(inner) => {
                    let v = inner.value * weight;
                    Multi([v.re, v.im, scale * inner.error])
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    Multi([f64::NAN; 3])
                }
            }
        },
        &outer_pieces,
        quad,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    let [re, im, inner_err] = outer.value.0;
    Ok(Estimate {
        value: Complex64::new(re, im),
        error: outer.error + inner_err,
        evaluations: outer.evaluations,
    })
}

fn hermitian_part(
    omega: f64,
    params: &ObjectParams,
    pulse: &Pulse,
    quad: &QuadratureConfig,
    breakpoint: f64,
) -> Result<Estimate<Complex64>> {
    let plus = f2_tilde_raw(omega, params, pulse, quad, breakpoint)?;
    let minus = if omega == 0.0 {
        plus
    } else {
        f2_tilde_raw(-omega, params, pulse, quad, breakpoint)?
    };
    Ok(Estimate {
        value: (plus.value + minus.value.conj()) * 0.5,
        error: 0.5 * (plus.error + minus.error),
        evaluations: plus.evaluations + minus.evaluations,
    })
}

/// Second-order force spectrum `F~₂(ω)`.
///
/// With `doubling_check` set, the `u` tail breakpoint is moved from
/// `omega_max` to `2 omega_max` and the two results must agree within their
/// combined error estimate ([`Error::CutoffSensitivity`] otherwise).
pub fn f2_tilde(omega: f64, params: &ObjectParams, pulse: &Pulse, quad: &QuadratureConfig) -> Result<Estimate<Complex64>> {
    let base = hermitian_part(omega, params, pulse, quad, quad.omega_max)?;
    if !quad.doubling_check {
        return Ok(base);
    }
    let doubled = hermitian_part(omega, params, pulse, quad, 2.0 * quad.omega_max)?;
    compare_doubled(base, doubled)
}

/// Both force spectra on a two-sided uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceSpectrum {
    /// Sorted, symmetric about 0, and containing 0.
    pub omega: Vec<f64>,
    pub f1: Vec<Complex64>,
    pub f2: Vec<Complex64>,
    pub f2_error: Vec<f64>,
}

/// Half-width of the band where the force spectra are not negligible.
pub fn force_band(pulse: &Pulse, quad: &QuadratureConfig) -> f64 {
    2.0 * pulse.spectral_edge(quad.omega_max)
}

/// Evaluates both spectra on `[-band, band]` with spacing at most `d_omega`.
/// Negative frequencies are filled by conjugation.
pub fn force_spectrum(
    params: &ObjectParams,
    pulse: &Pulse,
    quad: &QuadratureConfig,
    d_omega: f64,
) -> Result<ForceSpectrum> {
    params.validate()?;
    pulse.validate()?;
    quad.validate()?;
    require_mu0(params)?;
    if !(d_omega > 0.0) {
        return Err(Error::InvalidConfig(format!("frequency step must be > 0 (got {d_omega})")));
    }
    let band = force_band(pulse, quad);
    let k_max = (band / d_omega).ceil() as usize;
    let step = band / k_max as f64;
    let half: Vec<f64> = (0..=k_max).map(|k| k as f64 * step).collect();

    let f2_half: Vec<Estimate<Complex64>> = half
        .par_iter()
        .map(|&w| f2_tilde(w, params, pulse, quad))
        .collect::<Result<_>>()?;

    let mut omega = Vec::with_capacity(2 * k_max + 1);
    let mut f1 = Vec::with_capacity(2 * k_max + 1);
    let mut f2 = Vec::with_capacity(2 * k_max + 1);
    let mut f2_error = Vec::with_capacity(2 * k_max + 1);
    for k in (1..=k_max).rev() {
        omega.push(-half[k]);
        f1.push(f1_tilde(-half[k], params, pulse)?);
        f2.push(f2_half[k].value.conj());
        f2_error.push(f2_half[k].error);
    }
    for k in 0..=k_max {
        omega.push(half[k]);
        f1.push(f1_tilde(half[k], params, pulse)?);
        f2.push(f2_half[k].value);
        f2_error.push(f2_half[k].error);
    }
    Ok(ForceSpectrum {
        omega,
        f1,
        f2,
        f2_error,
    })
}

/// Forces and their first two time derivatives on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceSeries {
    pub t: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub df1: Vec<f64>,
    pub df2: Vec<f64>,
    pub ddf1: Vec<f64>,
    pub ddf2: Vec<f64>,
    /// Largest relative imaginary part seen in the inverse transforms.
    pub imag_residue: f64,
}

impl ForceSeries {
    pub fn dt(&self) -> f64 {
        self.t[1] - self.t[0]
    }

    /// Trapezoid time integral of a series on this grid.
    pub fn integral(&self, values: &[f64]) -> f64 {
        let dt = self.dt();
        let n = values.len();
        let inner: f64 = values[1..n - 1].iter().sum();
        dt * (inner + 0.5 * (values[0] + values[n - 1]))
    }
}

impl ForceSpectrum {
    /// Inverse transforms onto `n_t` uniform times in `[-t_window, t_window]`.
    pub fn time_series(&self, t_window: f64, n_t: usize) -> Result<ForceSeries> {
        if n_t < 64 {
            return Err(Error::InvalidConfig(format!("need at least 64 time points (got {n_t})")));
        }
        if !(t_window > 0.0) {
            return Err(Error::InvalidConfig(format!("time window must be > 0 (got {t_window})")));
        }
        let dt = 2.0 * t_window / (n_t - 1) as f64;
        let t: Vec<f64> = (0..n_t).map(|k| -t_window + k as f64 * dt).collect();
        let weights = trapezoid_weights(&self.omega);
        let mut residue = 0.0f64;
        let mut invert = |spec: &[Complex64], power: u32| -> Result<Vec<f64>> {
            // d/dt ↔ multiplication by -iω
            let factor = |w: f64| Complex64::new(0.0, -w).powu(power);
            let values: Vec<Complex64> = spec
                .iter()
                .zip(&self.omega)
                .map(|(f, &w)| f * factor(w))
                .collect();
            let r = fourier_invert(&self.omega, &weights, &values, &t, RESIDUE_LIMIT)?;
            residue = residue.max(r.imag_residue);
            Ok(r.values)
        };
        let f1 = invert(&self.f1, 0)?;
        let f2 = invert(&self.f2, 0)?;
        let df1 = invert(&self.f1, 1)?;
        let df2 = invert(&self.f2, 1)?;
        let ddf1 = invert(&self.f1, 2)?;
        let ddf2 = invert(&self.f2, 2)?;
        Ok(ForceSeries {
            t,
            f1,
            f2,
            df1,
            df2,
            ddf1,
            ddf2,
            imag_residue: residue,
        })
    }
}

/// Frequency spacing whose aliasing period clears the window, the pulse and
/// the response decay time.
pub fn frequency_step(params: &ObjectParams, pulse: &Pulse, t_window: f64) -> f64 {
    let decay = 20.0 * params.stiffness() / params.mu0;
    (2.0 * PI / (t_window + pulse.tau() + decay)).min(MAX_D_OMEGA)
}

/// Default time grid for trajectories: window `2τ`, with about eight
/// samples per period of the highest force frequency.
pub fn default_time_grid(pulse: &Pulse, quad: &QuadratureConfig) -> (f64, usize) {
    let t_window = 2.0 * pulse.tau();
    let dt = (PI / (8.0 * force_band(pulse, quad))).min(pulse.width / 10.0);
    let n_t = ((2.0 * t_window / dt).ceil() as usize + 1).max(64);
    (t_window, n_t)
}

/// Time-domain forces `F₁(t)`, `F₂(t)` on `[-t_window, t_window]`.
pub fn force_time_series(
    params: &ObjectParams,
    pulse: &Pulse,
    quad: &QuadratureConfig,
    t_window: f64,
    n_t: usize,
) -> Result<ForceSeries> {
    require_mu0(params)?;
    let spectrum = force_spectrum(params, pulse, quad, frequency_step(params, pulse, t_window))?;
    spectrum.time_series(t_window, n_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(lambda0: f64) -> ObjectParams {
        ObjectParams::new(lambda0, 1.0, 0.01, 1e6)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn chi1_matches_extended_precision() {
        // 50-digit evaluations of the closed form at λ₀ = 0.5, μ₀ = 1
        let cases = [
            (0.0008, c(-2.716_242_732_355_955_6e-14, 2.716_242_189_107_393_6e-11)),
            (0.03, c(-5.366_950_631_012_227_4e-8, 1.430_784_297_486_985_3e-6)),
            (0.04, c(-1.695_109_728_430_643_5e-7, 3.388_524_226_325_530_1e-6)),
            (0.3, c(-4.950_548_115_542_707_5e-4, 1.282_885_025_470_405_7e-3)),
            (1.3, c(-6.587_579_449_589_510_0e-2, 1.883_953_229_003_824_1e-2)),
            (5.0, c(-5.067_095_944_561_819_5e-1, -4.923_898_737_907_156_7e-1)),
        ];
        for (w, expected) in cases {
            let got = chi1(w, &params(0.5)).unwrap();
            assert!((got - expected).norm() < 1e-12 * expected.norm(), "w={w}: {got} vs {expected}");
        }
    }

    #[test]
    fn chi1_is_continuous_across_series_switch() {
        let p = params(0.5);
        let edge = CHI1_SERIES_RHO * p.mu0 / p.stiffness();
        let below = chi1(edge * (1.0 - 1e-12), &p).unwrap();
        let above = chi1(edge * (1.0 + 1e-12), &p).unwrap();
        assert!((below - above).norm() < 1e-11 * above.norm());
    }

    #[test]
    fn chi1_special_values() {
        assert_eq!(chi1(0.0, &params(0.5)).unwrap(), c(0.0, 0.0));
        for w in [0.01, 0.5, 3.0] {
            assert_eq!(chi1(w, &params(0.0)).unwrap().norm(), 0.0);
        }
        let p = params(0.5);
        assert!((chi1(-1.3, &p).unwrap() - chi1(1.3, &p).unwrap().conj()).norm() < 1e-15);
        assert!(matches!(chi1(1.0, &ObjectParams::new(0.5, 0.0, 0.01, 1.0)), Err(Error::RequiresPositiveMu0(_))));
    }

    #[test]
    fn chi1_small_frequency_law() {
        // leading term i λ₀ ω³ / (3π μ₀)
        let p = params(0.5);
        for w in [1e-6, 1e-4, 1e-3] {
            let got = chi1(w, &p).unwrap();
            let lead = c(0.0, p.lambda0 * w.powi(3) / (3.0 * PI * p.mu0));
            assert!((got - lead).norm() < 1e-2 * lead.norm());
        }
    }

    #[test]
    fn chi1_is_odd_in_lambda() {
        for w in [0.001, 0.2, 1.7, 40.0] {
            assert_eq!(chi1(w, &params(-0.4)).unwrap(), -chi1(w, &params(0.4)).unwrap());
        }
    }

    #[test]
    fn first_order_spectrum_vanishes_at_zero_and_far_out() {
        let pulse = Pulse::gaussian(5.0);
        let p = params(0.5);
        assert_eq!(f1_tilde(0.0, &p, &pulse).unwrap(), c(0.0, 0.0));
        let peak = (1..400)
            .map(|k| f1_tilde(0.005 * k as f64, &p, &pulse).unwrap().norm())
            .fold(0.0, f64::max);
        // extended-precision oracle: |F~₁(10/T)| / peak = 6.8626e-20; the
        // Gaussian factor alone gives e^{-50}, χ₁ growth makes up the rest
        let ratio = f1_tilde(10.0 / 5.0, &p, &pulse).unwrap().norm() / peak;
        assert_relative_eq!(ratio, 6.862_648_173_322_3e-20, max_relative = 1e-3);
        assert_eq!(f1_tilde(0.7, &params(0.0), &pulse).unwrap().norm(), 0.0);
    }

    #[test]
    fn h_kernel_values() {
        let p = params(0.0);
        assert!((h_kernel(0.0, &p).unwrap() - c(0.0, -1.0)).norm() < 1e-16);
        let q = params(0.5);
        let w = 1e6;
        assert_relative_eq!(h_kernel(w, &q).unwrap().norm(), 1.0 / (w * q.stiffness()), max_relative = 1e-5);
        assert_relative_eq!(
            h_kernel(-0.7, &q).unwrap().norm(),
            h_kernel(0.7, &q).unwrap().norm(),
            max_relative = 1e-15
        );
        assert_eq!(h_kernel(-0.7, &q).unwrap(), -h_kernel(0.7, &q).unwrap().conj());
    }

    #[test]
    fn chi2_zeros() {
        assert_eq!(chi2(1.0, 0.4, 0.7, &params(0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(chi2(1.0, 0.4, 0.0, &params(0.5)).unwrap(), c(0.0, 0.0));
        assert_eq!(chi2(0.7, 0.4, 0.7, &params(0.5)).unwrap(), c(0.0, 0.0));
        assert!(chi2(1.0, 0.4, 0.7, &params(0.5)).unwrap().norm() > 0.0);
    }

    #[test]
    fn chi2_closed_form_spot_check() {
        // λ₀ = 0.5, μ₀ = 1: direct substitution
        let p = params(0.5);
        let (w, wp, wpp) = (0.3, -0.8, 1.1);
        let a = 1.25;
        let hh = |x: f64| c(x * a, 1.0).inv();
        let expected = (hh(0.8) * (0.64 * a) - 0.55) * hh(1.1) * (0.5 * 0.8 / (PI * PI));
        assert!((chi2(w, wp, wpp, &p).unwrap() - expected).norm() < 1e-15);
        // negative ω'': Θ = 0, sgn = -1
        let expected = c(0.55, 0.0) * hh(-1.1) * (0.5 * -1.4 * -1.0 / (PI * PI));
        assert!((chi2(w, wp, -1.1, &p).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn second_order_vanishes_for_symmetric_object() {
        let pulse = Pulse::gaussian_cosine(5.0, 2.0);
        let cfg = QuadratureConfig::default();
        for w in [0.0, 0.5, 2.0] {
            assert_eq!(f2_tilde(w, &params(0.0), &pulse, &cfg).unwrap().value, c(0.0, 0.0));
        }
    }

    #[test]
    fn second_order_excludes_epsilon() {
        let pulse = Pulse::gaussian_cosine(5.0, 2.0);
        let cfg = QuadratureConfig::default();
        let a = f2_tilde(0.4, &params(-0.5), &pulse, &cfg).unwrap();
        let b = f2_tilde(0.4, &params(-0.5).with_epsilon(0.02), &pulse, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn second_order_dc_is_minus_net_momentum() {
        use crate::spectrum::integrate_spectrum;
        let pulse = Pulse::gaussian_cosine(5.0, 2.0);
        let cfg = QuadratureConfig::default();
        for lambda0 in [-0.5, 0.5] {
            let p = params(lambda0);
            let f2 = f2_tilde(0.0, &p, &pulse, &cfg).unwrap();
            let momentum = integrate_spectrum(&p, &pulse, &cfg).unwrap().momentum_net.value;
            let eps2 = p.epsilon * p.epsilon;
            assert!(f2.value.im.abs() < 1e-12 * f2.value.re.abs());
            assert_relative_eq!(eps2 * f2.value.re, -momentum, max_relative = 0.02);
        }
    }

    #[test]
    fn raw_second_order_matches_brute_force_at_one_point() {
        // independent evaluation in the original (ω', ω'') variables on a
        // fine grid; the raw double integral converges only as an iterated
        // integral, so ω'' is integrated symmetrically to ±L first
        let pulse = Pulse::gaussian_cosine(5.0, 2.0);
        let p = params(-0.5);
        let cfg = QuadratureConfig::default().with_tolerances(1e-10, 1e-8);
        let w = 0.3;
        let raw = f2_tilde_raw(w, &p, &pulse, &cfg, cfg.omega_max).unwrap();

        let mu = p.mu0;
        let alpha = |x: f64, y: f64| c(0.0, -mu) * pulse.freq(x - y) * h(x, p.stiffness(), mu);
        // s = ω' + ω'' only needs to cover the support of f~(s) f~(ω-s)
        let bands = strip_pieces(w, &pulse, cfg.omega_max);
        let big = 2000.0;
        let nu = 200_000;
        let du = 2.0 * big / nu as f64;
        let mut total = c(0.0, 0.0);
        for piece in bands {
            let (lo, hi) = piece.param_range();
            let ns = 200;
            let ds = (hi - lo) / ns as f64;
            for i in 0..ns {
                let s = lo + (i as f64 + 0.5) * ds;
                let mut inner = c(0.0, 0.0);
                for j in 0..nu {
                    let u = -big + (j as f64 + 0.5) * du;
                    let wp = s - u;
                    inner += chi2_unchecked(w, wp, u, &p) * alpha(wp, -u) * alpha(w - u, wp);
                }
                total += inner * du * ds;
            }
        }
        // the truncated ±L tails contribute O(1/L) relative
        assert!((total - raw.value).norm() < 2e-3 * raw.value.norm(), "{total} vs {}", raw.value);
    }

    #[test]
    fn force_series_basic_properties() {
        let pulse = Pulse::gaussian_cosine(5.0, 2.0);
        let p = params(-0.5);
        let cfg = QuadratureConfig::default();
        let window = 2.0 * pulse.tau();
        let series = force_time_series(&p, &pulse, &cfg, window, 1201).unwrap();
        assert!(series.imag_residue < RESIDUE_LIMIT);
        let peak1 = series.f1.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let i1 = series.integral(&series.f1);
        assert!(i1.abs() < 1e-6 * peak1 * 2.0 * window, "{i1} vs {peak1}");

        let zero = force_time_series(&params(0.0), &pulse, &cfg, window, 128).unwrap();
        assert!(zero.f1.iter().chain(&zero.f2).all(|&x| x == 0.0));
    }
}
