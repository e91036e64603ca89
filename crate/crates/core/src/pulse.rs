//! Time profiles f(t) of the coupling modulation and their transforms.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default effective half-support in units of the pulse width.
pub const DEFAULT_N_SIGMA: f64 = 6.0;

/// Half-width of the retained spectral band in units of 1/T. Beyond it the
/// Gaussian factor of f~ is below e^{-40}.
pub const SPECTRAL_SIGMAS: f64 = 9.0;

const DENSE_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum PulseShape {
    /// exp(-t²/2T²)
    Gaussian,
    /// cos(w0 t) exp(-t²/2T²)
    GaussianCosine { carrier: f64 },
    /// Uniform samples starting at `t0`, linearly interpolated, zero outside.
    Sampled { t0: f64, dt: f64, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    pub shape: PulseShape,
    /// Width T (also the characteristic time of sampled pulses).
    pub width: f64,
    pub n_sigma: f64,
}

impl Pulse {
    pub fn gaussian(width: f64) -> Self {
        Self {
            shape: PulseShape::Gaussian,
            width,
            n_sigma: DEFAULT_N_SIGMA,
        }
    }

    pub fn gaussian_cosine(width: f64, carrier: f64) -> Self {
        Self {
            shape: PulseShape::GaussianCosine { carrier },
            width,
            n_sigma: DEFAULT_N_SIGMA,
        }
    }

    pub fn sampled(t0: f64, dt: f64, values: Vec<f64>, width: f64) -> Self {
        Self {
            shape: PulseShape::Sampled { t0, dt, values },
            width,
            n_sigma: DEFAULT_N_SIGMA,
        }
    }

    /// Samples `self` uniformly on `[-tau, tau]`.
    pub fn to_sampled(&self, n: usize) -> Self {
        let tau = self.tau();
        let dt = 2.0 * tau / (n - 1) as f64;
        let values = (0..n).map(|k| self.time(-tau + k as f64 * dt)).collect();
        Self::sampled(-tau, dt, values, self.width)
    }

    pub fn with_n_sigma(mut self, n_sigma: f64) -> Self {
        self.n_sigma = n_sigma;
        self
    }

    pub fn carrier(&self) -> f64 {
        match self.shape {
            PulseShape::GaussianCosine { carrier } => carrier,
            _ => 0.0,
        }
    }

    /// Effective half-support: the modulation is negligible outside `[-tau, tau]`.
    pub fn tau(&self) -> f64 {
        match &self.shape {
            PulseShape::Sampled { t0, dt, values } => {
                let t1 = t0 + dt * (values.len().saturating_sub(1)) as f64;
                t0.abs().max(t1.abs())
            }
            _ => self.n_sigma * self.width,
        }
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.shape, PulseShape::Sampled { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidPulse(m));
        if !(self.width > 0.0) || !self.width.is_finite() {
            return bad(format!("width must be > 0 (got {})", self.width));
        }
        match &self.shape {
            PulseShape::Gaussian => {}
            PulseShape::GaussianCosine { carrier } => {
                if !(*carrier >= 0.0) || !carrier.is_finite() {
                    return bad(format!("carrier must be >= 0 (got {carrier})"));
                }
            }
            PulseShape::Sampled { dt, values, t0 } => {
                if !(*dt > 0.0) || !t0.is_finite() {
                    return bad(format!("sample spacing must be > 0 (got {dt})"));
                }
                if values.len() < 2 {
                    return bad("need at least two samples".into());
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("non-finite sample".into());
                }
            }
        }
        if self.is_builtin() {
            if self.n_sigma < DEFAULT_N_SIGMA {
                return bad(format!(
                    "n_sigma must be >= {DEFAULT_N_SIGMA} (got {})",
                    self.n_sigma
                ));
            }
            let tau = self.tau();
            let tail = self.time(tau).abs().max(self.time(-tau).abs());
            if tail >= 1e-7 {
                return bad(format!("|f(±tau)| = {tail:e} is not negligible"));
            }
        }
        let tau = self.tau();
        let step = 2.0 * tau / (DENSE_SAMPLES - 1) as f64;
        for k in 0..DENSE_SAMPLES {
            let t = -tau + k as f64 * step;
            let v = self.time(t);
            if v.abs() > 1.0 + 1e-12 {
                return bad(format!("|f({t})| = {} exceeds 1", v.abs()));
            }
        }
        Ok(())
    }

    /// f(t).
    pub fn time(&self, t: f64) -> f64 {
        let envelope = |t: f64| (-t * t / (2.0 * self.width * self.width)).exp();
        match &self.shape {
            PulseShape::Gaussian => envelope(t),
            PulseShape::GaussianCosine { carrier } => (carrier * t).cos() * envelope(t),
            PulseShape::Sampled { t0, dt, values } => {
                let x = (t - t0) / dt;
                let last = (values.len() - 1) as f64;
                if !(0.0..=last).contains(&x) {
                    return 0.0;
                }
                let k = (x.floor() as usize).min(values.len() - 2);
                let frac = x - k as f64;
                values[k] * (1.0 - frac) + values[k + 1] * frac
            }
        }
    }

    /// f~(w) = ∫ dt f(t) e^{iwt}.
    ///
    /// Sampled pulses use the exact transform of the piecewise-linear
    /// interpolant returned by [`Pulse::time`].
    pub fn freq(&self, omega: f64) -> Complex64 {
        let t = self.width;
        let norm = t * (2.0 * PI).sqrt();
        let gauss = |w: f64| (-0.5 * t * t * w * w).exp();
        match &self.shape {
            PulseShape::Gaussian => Complex64::new(norm * gauss(omega), 0.0),
            PulseShape::GaussianCosine { carrier } => Complex64::new(
                0.5 * norm * (gauss(omega - carrier) + gauss(omega + carrier)),
                0.0,
            ),
            PulseShape::Sampled { t0, dt, values } => {
                sampled_transform(*t0, *dt, values, omega)
            }
        }
    }

    /// Intervals outside of which |f~| is negligible; `None` when unknown.
    pub fn spectral_support(&self) -> Option<Vec<(f64, f64)>> {
        let half = SPECTRAL_SIGMAS / self.width;
        match self.shape {
            PulseShape::Gaussian => Some(vec![(-half, half)]),
            PulseShape::GaussianCosine { carrier } => {
                if carrier <= half {
                    Some(vec![(-carrier - half, carrier + half)])
                } else {
                    Some(vec![(-carrier - half, -carrier + half), (carrier - half, carrier + half)])
                }
            }
            PulseShape::Sampled { .. } => None,
        }
    }

    /// Largest retained |w|, or `fallback` when the support is unknown.
    pub fn spectral_edge(&self, fallback: f64) -> f64 {
        self.spectral_support()
            .and_then(|s| s.last().map(|&(_, hi)| hi))
            .unwrap_or(fallback)
    }
}

/// (1 + iθ - e^{iθ}) / θ², the transform weight of a half hat function.
fn half_hat(theta: f64) -> Complex64 {
    if theta.abs() < 1e-2 {
        let t2 = theta * theta;
        Complex64::new(0.5 - t2 / 24.0 + t2 * t2 / 720.0, theta / 6.0 - theta * t2 / 120.0)
    } else {
        (Complex64::new(1.0, theta) - Complex64::cis(theta)) / (theta * theta)
    }
}

fn sampled_transform(t0: f64, dt: f64, values: &[f64], omega: f64) -> Complex64 {
    let theta = omega * dt;
    let right = half_hat(theta);
    let left = half_hat(-theta);
    let full = right + left;
    let n = values.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &v) in values.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let weight = if k == 0 {
            right
        } else if k == n - 1 {
            left
        } else {
            full
        };
        acc += weight * Complex64::cis(omega * (t0 + k as f64 * dt)) * v;
    }
    acc * dt
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_peak_and_width() {
        let p = Pulse::gaussian(5.0);
        assert_eq!(p.time(0.0), 1.0);
        // exp(-1/2)
        assert_relative_eq!(p.time(5.0), 0.606_530_659_712_633_4, max_relative = 1e-15);
    }

    #[test]
    fn gaussian_cosine_peak() {
        let t = 5.0;
        let p = Pulse::gaussian_cosine(t, 2.0 * PI * 3.0 / t);
        assert_eq!(p.time(0.0), 1.0);
    }

    #[test]
    fn gaussian_transform_at_zero() {
        let p = Pulse::gaussian(5.0);
        assert_relative_eq!(p.freq(0.0).re, 5.0 * (2.0 * PI).sqrt(), max_relative = 1e-15);
        assert_eq!(p.freq(0.0).im, 0.0);
    }

    #[test]
    fn builtin_transforms_are_even_and_real() {
        for p in [Pulse::gaussian(2.0), Pulse::gaussian_cosine(5.0, 2.0)] {
            for k in -40..=40 {
                let w = 0.037 * k as f64;
                let a = p.freq(w);
                let b = p.freq(-w).conj();
                assert!((a - b).norm() < 1e-12);
                assert_eq!(a, p.freq(-w));
            }
        }
    }

    #[test]
    fn builtin_pulses_validate() {
        assert!(Pulse::gaussian(5.0).validate().is_ok());
        assert!(Pulse::gaussian_cosine(5.0, 2.0).validate().is_ok());
        assert!(Pulse::gaussian(5.0).with_n_sigma(3.0).validate().is_err());
        assert!(Pulse::gaussian(0.0).validate().is_err());
    }

    #[test]
    fn oversized_samples_rejected() {
        let p = Pulse::sampled(-1.0, 0.5, vec![0.0, 0.5, 1.5, 0.5, 0.0], 1.0);
        assert!(matches!(p.validate(), Err(Error::InvalidPulse(_))));
    }

    #[test]
    fn sampled_interpolates_and_vanishes_outside() {
        let p = Pulse::sampled(0.0, 1.0, vec![0.0, 1.0, 0.0], 1.0);
        assert_eq!(p.time(0.5), 0.5);
        assert_eq!(p.time(1.0), 1.0);
        assert_eq!(p.time(-0.1), 0.0);
        assert_eq!(p.time(2.1), 0.0);
    }

    #[test]
    fn hat_transform_matches_closed_form() {
        // triangle of unit height on [-1, 1]: transform is sinc²(w/2)
        let p = Pulse::sampled(-1.0, 1.0, vec![0.0, 1.0, 0.0], 1.0);
        for w in [1e-4f64, 0.3, 1.7, 5.0] {
            let expected = ((0.5 * w).sin() / (0.5 * w)).powi(2);
            let got = p.freq(w);
            assert_relative_eq!(got.re, expected, max_relative = 1e-12);
            assert!(got.im.abs() < 1e-14);
        }
    }

    #[test]
    fn sampled_gaussian_matches_analytic_transform() {
        let analytic = Pulse::gaussian(5.0);
        let sampled = analytic.to_sampled(12_001);
        for k in 0..=40 {
            let w = 0.1 * k as f64;
            assert!((sampled.freq(w) - analytic.freq(w)).norm() < 1e-6, "w = {w}");
        }
    }

    #[test]
    fn sampled_transform_converges_at_second_order() {
        let analytic = Pulse::gaussian(5.0);
        let w = 0.35;
        let err = |n: usize| (analytic.to_sampled(n).freq(w) - analytic.freq(w)).norm();
        let coarse = err(301);
        let fine = err(601);
        let ratio = coarse / fine;
        assert!((ratio - 4.0).abs() < 0.1, "Richardson ratio {ratio}");
    }

    #[test]
    fn support_covers_carrier() {
        let p = Pulse::gaussian_cosine(5.0, 2.0);
        let s = p.spectral_support().unwrap();
        assert_eq!(s.len(), 2);
        assert!(s[1].0 < 2.0 && s[1].1 > 2.0);
        assert_relative_eq!(p.spectral_edge(0.0), 2.0 + 9.0 / 5.0);
    }
}
