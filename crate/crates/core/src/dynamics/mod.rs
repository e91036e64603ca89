//! Mean trajectory of the mirror under the quantum forces.
//!
//! The equation of motion is `M q̈ = ε F₁ + ε² F₂ (+ F_q)`, started from rest.
//! Scenario rescaling replaces `ε → 10ᵖ ε` and `M₀ → 10²ᵖ M₀`, which keeps
//! the second-order impulse per unit mass fixed and suppresses the first.

mod interp;
mod ode;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

pub use interp::UniformSeries;
pub use ode::{integrate, OdeOptions, OdeSolution};

use crate::error::{Error, Result};
use crate::forces::ForceSeries;
use crate::model::ObjectParams;
use crate::pulse::Pulse;
use crate::quadrature::QuadratureConfig;
use crate::spectrum::integrate_spectrum;

/// `F_q` is only defined near the Robin limit λ₀ → -1.
pub const FQ_LAMBDA_LIMIT: f64 = -0.9;

/// Largest |q̇| accepted as non-relativistic.
pub const QDOT_LIMIT: f64 = 0.1;

/// Velocity drift after the pulse, relative to the peak velocity, that is
/// reported as runaway motion.
pub const RUNAWAY_LIMIT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioLabel {
    /// Second-order force only.
    A,
    /// First-order force only.
    B,
    /// Both orders.
    C,
    /// Both orders plus the dissipative Casimir force.
    D,
}

impl ScenarioLabel {
    pub const ALL: [ScenarioLabel; 4] = [Self::A, Self::B, Self::C, Self::D];

    pub fn first_order(self) -> bool {
        !matches!(self, Self::A)
    }

    pub fn second_order(self) -> bool {
        !matches!(self, Self::B)
    }

    pub fn dissipative(self) -> bool {
        matches!(self, Self::D)
    }

    /// Default rescaling exponent.
    pub fn default_p(self) -> f64 {
        match self {
            Self::A => 3.0,
            Self::B => 0.0,
            Self::C | Self::D => 2.0,
        }
    }
}

impl fmt::Display for ScenarioLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
            Self::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for ScenarioLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Self::A),
            "B" => Ok(Self::B),
            "C" => Ok(Self::C),
            "D" => Ok(Self::D),
            _ => Err(Error::InvalidConfig(format!("unknown scenario '{s}' (expected A, B, C or D)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub label: ScenarioLabel,
    pub p_exponent: f64,
}

impl Scenario {
    pub fn new(label: ScenarioLabel, p_exponent: f64) -> Self {
        Self { label, p_exponent }
    }

    pub fn with_default_p(label: ScenarioLabel) -> Self {
        Self::new(label, label.default_p())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_exponent >= 0.0) || !self.p_exponent.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "p_exponent must be >= 0 (got {})",
                self.p_exponent
            )));
        }
        Ok(())
    }

    /// `ε → 10ᵖ ε`, `M₀ → 10²ᵖ M₀`.
    pub fn rescale(&self, params: &ObjectParams) -> ObjectParams {
        let k = 10f64.powf(self.p_exponent);
        ObjectParams {
            epsilon: params.epsilon * k,
            mass0: params.mass0 * k * k,
            ..*params
        }
    }
}

/// Mass used in the equation of motion.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MassModel {
    #[default]
    Constant,
    /// Field energy rising smoothly to the created energy `E` around t = 0,
    /// `E_field(t) = E (1 + tanh(t / rise)) / 2`, fed to [`mass_correction`].
    FieldEnergyRamp { rise: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionOptions {
    pub rtol: f64,
    /// Absolute tolerance relative to the natural velocity scale.
    pub atol_scale: f64,
    pub mass_model: MassModel,
    pub max_steps: usize,
}

impl Default for MotionOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol_scale: 1e-12,
            mass_model: MassModel::Constant,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub scenario: Scenario,
    pub t: Vec<f64>,
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
    /// `F_q` along the trajectory; zero unless the scenario is dissipative.
    pub fq: Vec<f64>,
    /// Mean velocity over `[τ + 2T, t_end]`.
    pub v_f: f64,
    /// `-P_net / M₀` at the unscaled parameters.
    pub v_f_predicted: f64,
    pub energy_dissipated: f64,
    pub max_abs_qdot: f64,
    pub steps: usize,
}

/// `F_q = q⃛/(6π) - q⁗/(6πμ₀)`.
pub fn casimir_force(q3: f64, q4: f64, params: &ObjectParams) -> Result<f64> {
    if !(params.mu0 > 0.0) {
        return Err(Error::RequiresPositiveMu0(params.mu0));
    }
    if params.lambda0 > FQ_LAMBDA_LIMIT {
        log::warn!(
            "Casimir force is only valid near lambda0 = -1 (got {})",
            params.lambda0
        );
    }
    Ok(q3 / (6.0 * PI) - q4 / (6.0 * PI * params.mu0))
}

/// `M(t) = M₀ (1 - E_field/M₀) / (1 + q̇²/2)`.
pub fn mass_correction(e_field: f64, qdot: f64, params: &ObjectParams) -> Result<f64> {
    if !(qdot.abs() < 1.0) {
        return Err(Error::Relativistic(qdot.abs()));
    }
    if !(e_field >= 0.0) {
        return Err(Error::InvalidConfig(format!("field energy must be >= 0 (got {e_field})")));
    }
    let m = params.mass0;
    Ok(m * (1.0 - e_field / m) / (1.0 + 0.5 * qdot * qdot))
}

/// Start of the window over which the final velocity is averaged.
pub fn quiet_window_start(pulse: &Pulse) -> f64 {
    pulse.tau() + 2.0 * pulse.width
}

struct Drive {
    force: UniformSeries,
    dforce: UniformSeries,
    ddforce: UniformSeries,
}

impl Drive {
    fn new(series: &ForceSeries, scenario: &Scenario, eps: f64) -> Self {
        let c1 = if scenario.label.first_order() { eps } else { 0.0 };
        let c2 = if scenario.label.second_order() { eps * eps } else { 0.0 };
        let mix = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| c1 * x + c2 * y).collect() };
        let f = mix(&series.f1, &series.f2);
        let df = mix(&series.df1, &series.df2);
        let ddf = mix(&series.ddf1, &series.ddf2);
        let (t0, dt) = (series.t[0], series.dt());
        Self {
            force: UniformSeries::new(t0, dt, f, Some(df.clone())),
            dforce: UniformSeries::new(t0, dt, df, Some(ddf.clone())),
            ddforce: UniformSeries::new(t0, dt, ddf, None),
        }
    }
}

/// Integrates the mean equation of motion with default options.
pub fn integrate_motion(
    scenario: &Scenario,
    params: &ObjectParams,
    pulse: &Pulse,
    forces: &ForceSeries,
    quad: &QuadratureConfig,
) -> Result<TrajectoryResult> {
    integrate_motion_with(scenario, params, pulse, forces, quad, &MotionOptions::default())
}

pub fn integrate_motion_with(
    scenario: &Scenario,
    params: &ObjectParams,
    pulse: &Pulse,
    forces: &ForceSeries,
    quad: &QuadratureConfig,
    options: &MotionOptions,
) -> Result<TrajectoryResult> {
    scenario.validate()?;
    params.validate()?;
    let spectrum = integrate_spectrum(params, pulse, quad)?;
    let v_f_predicted = -spectrum.momentum_net.value / params.mass0;

    let scaled = scenario.rescale(params);
    let dissipative = scenario.label.dissipative();
    if dissipative {
        if !(scaled.mu0 > 0.0) {
            return Err(Error::RequiresPositiveMu0(scaled.mu0));
        }
        if scaled.lambda0 > FQ_LAMBDA_LIMIT {
            log::warn!(
                "scenario D uses the Casimir force outside its range (lambda0 = {})",
                scaled.lambda0
            );
        }
    }
    let t = &forces.t;
    let t_end = *t.last().unwrap();
    let quiet = quiet_window_start(pulse);
    if !(t_end > quiet) || t.len() < 4 {
        return Err(Error::InvalidConfig(format!(
            "time window must extend past tau + 2T = {quiet} (ends at {t_end})"
        )));
    }

    let drive = Drive::new(forces, scenario, scaled.epsilon);
    let m0 = scaled.mass0;
    let e_created = scaled.epsilon * scaled.epsilon * spectrum.energy_total().value
        / (params.epsilon * params.epsilon).max(f64::MIN_POSITIVE);
    let mass_at = |time: f64, qdot: f64| -> f64 {
        match options.mass_model {
            MassModel::Constant => m0,
            MassModel::FieldEnergyRamp { rise } => {
                let e = e_created * 0.5 * (1.0 + (time / rise).tanh());
                // out-of-contract velocities are caught after integration
                mass_correction(e, qdot.clamp(-0.999, 0.999), &scaled).unwrap_or(m0)
            }
        }
    };
    let fq_at = |time: f64, mass: f64| -> f64 {
        if !dissipative {
            return 0.0;
        }
        // reduction of order: q⃛ ≈ Ḟ/M, q⁗ ≈ F̈/M
        let q3 = drive.dforce.eval(time) / mass;
        let q4 = drive.ddforce.eval(time) / mass;
        q3 / (6.0 * PI) - q4 / (6.0 * PI * scaled.mu0)
    };

    // natural scales for the absolute tolerances
    let f_peak = t.iter().map(|&x| drive.force.eval(x).abs()).fold(0.0, f64::max);
    let v_scale = (f_peak * pulse.width / m0).max(f64::MIN_POSITIVE);
    let opts = OdeOptions {
        rtol: options.rtol,
        atol: [options.atol_scale * v_scale * pulse.width, options.atol_scale * v_scale],
        h_max: forces.dt(),
        max_steps: options.max_steps,
    };
    let rhs = |time: f64, y: &[f64; 2]| -> [f64; 2] {
        let mass = mass_at(time, y[1]);
        let force = drive.force.eval(time) + fq_at(time, mass);
        [y[1], force / mass]
    };
    let sol = integrate(rhs, [0.0, 0.0], t, &opts)?;
    let q: Vec<f64> = sol.states.iter().map(|s| s[0]).collect();
    let qdot: Vec<f64> = sol.states.iter().map(|s| s[1]).collect();
    let fq: Vec<f64> = t
        .iter()
        .zip(&qdot)
        .map(|(&time, &v)| fq_at(time, mass_at(time, v)))
        .collect();

    let max_abs_qdot = qdot.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs_qdot >= QDOT_LIMIT {
        return Err(Error::Relativistic(max_abs_qdot));
    }
    let quiet_v: Vec<f64> = t.iter().zip(&qdot).filter(|(&time, _)| time >= quiet).map(|(_, &v)| v).collect();
    let v_f = quiet_v.iter().sum::<f64>() / quiet_v.len() as f64;
    let drift = quiet_v.iter().fold(0.0f64, |m, v| m.max((v - v_f).abs()));
    if max_abs_qdot > 0.0 && drift > RUNAWAY_LIMIT * max_abs_qdot {
        return Err(Error::Runaway {
            drift: drift / max_abs_qdot,
            limit: RUNAWAY_LIMIT,
        });
    }

    let mut result = TrajectoryResult {
        scenario: *scenario,
        t: t.clone(),
        q,
        qdot,
        fq,
        v_f,
        v_f_predicted,
        energy_dissipated: 0.0,
        max_abs_qdot,
        steps: sol.accepted,
    };
    result.energy_dissipated = dissipated_energy(&result, &scaled);
    Ok(result)
}

/// `-∫ F_q q̇ dt` along the trajectory (trapezoid rule on its grid).
pub fn dissipated_energy(trajectory: &TrajectoryResult, _params: &ObjectParams) -> f64 {
    let t = &trajectory.t;
    let mut acc = 0.0;
    for k in 1..t.len() {
        let a = trajectory.fq[k - 1] * trajectory.qdot[k - 1];
        let b = trajectory.fq[k] * trajectory.qdot[k];
        acc += 0.5 * (t[k] - t[k - 1]) * (a + b);
    }
    -acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> ObjectParams {
        ObjectParams::new(-0.95, 1.0, 0.01, 1e6)
    }

    #[test]
    fn casimir_force_coefficients() {
        let p = params();
        assert_eq!(casimir_force(0.0, 0.0, &p).unwrap(), 0.0);
        assert_relative_eq!(casimir_force(6.0 * PI, 0.0, &p).unwrap(), 1.0, max_relative = 1e-15);
        let p2 = p.with_mu0(2.5);
        assert_relative_eq!(casimir_force(0.0, 6.0 * PI * 2.5, &p2).unwrap(), -1.0, max_relative = 1e-15);
        assert!(casimir_force(1.0, 1.0, &p.with_mu0(0.0)).is_err());
    }

    #[test]
    fn mass_correction_values() {
        let p = params();
        assert_eq!(mass_correction(0.0, 0.0, &p).unwrap(), p.mass0);
        assert_relative_eq!(mass_correction(0.1 * p.mass0, 0.0, &p).unwrap(), 0.9 * p.mass0, max_relative = 1e-15);
        assert_relative_eq!(
            mass_correction(0.0, 0.02f64.sqrt(), &p).unwrap(),
            p.mass0 / 1.01,
            max_relative = 1e-15
        );
        let small = mass_correction(0.9e-6 * p.mass0, 0.9e-3, &p).unwrap();
        assert!((small / p.mass0 - 1.0).abs() < 2e-6);
        assert!(matches!(mass_correction(0.0, 1.0, &p), Err(Error::Relativistic(_))));
        assert!(mass_correction(-1.0, 0.0, &p).is_err());
    }

    #[test]
    fn scenario_rescaling() {
        let s = Scenario::new(ScenarioLabel::A, 3.0);
        let p = s.rescale(&params());
        assert_relative_eq!(p.epsilon, 10.0, max_relative = 1e-15);
        assert_relative_eq!(p.mass0, 1e12, max_relative = 1e-15);
        assert!(Scenario::new(ScenarioLabel::B, -1.0).validate().is_err());
        assert_eq!("c".parse::<ScenarioLabel>().unwrap(), ScenarioLabel::C);
        assert!("E".parse::<ScenarioLabel>().is_err());
    }

    #[test]
    fn static_trajectory_dissipates_nothing() {
        let n = 10;
        let traj = TrajectoryResult {
            scenario: Scenario::new(ScenarioLabel::D, 0.0),
            t: (0..n).map(|k| k as f64).collect(),
            q: vec![0.0; n],
            qdot: vec![0.0; n],
            fq: vec![0.3; n],
            v_f: 0.0,
            v_f_predicted: 0.0,
            energy_dissipated: 0.0,
            max_abs_qdot: 0.0,
            steps: 0,
        };
        assert_eq!(dissipated_energy(&traj, &params()), 0.0);
    }

    fn synthetic_series(f2_scale: f64) -> ForceSeries {
        // F₁ = -d/dt exp(-t²/8) carries no impulse; F₂ = exp(-t²/8) carries √(8π)
        let n = 2001;
        let w = 40.0;
        let dt = 2.0 * w / (n - 1) as f64;
        let t: Vec<f64> = (0..n).map(|k| -w + k as f64 * dt).collect();
        let g = |x: f64| (-x * x / 8.0).exp();
        let g1 = |x: f64| -x / 4.0 * g(x);
        let g2 = |x: f64| (x * x / 16.0 - 0.25) * g(x);
        let g3 = |x: f64| (-x * x * x / 64.0 + 3.0 * x / 16.0) * g(x);
        ForceSeries {
            f1: t.iter().map(|&x| -g1(x)).collect(),
            df1: t.iter().map(|&x| -g2(x)).collect(),
            ddf1: t.iter().map(|&x| -g3(x)).collect(),
            f2: t.iter().map(|&x| f2_scale * g(x)).collect(),
            df2: t.iter().map(|&x| f2_scale * g1(x)).collect(),
            ddf2: t.iter().map(|&x| f2_scale * g2(x)).collect(),
            t,
            imag_residue: 0.0,
        }
    }

    #[test]
    fn impulse_of_synthetic_force_sets_final_velocity() {
        let pulse = Pulse::gaussian(2.0);
        let p = ObjectParams::new(-0.5, 1.0, 0.01, 1e6);
        let series = synthetic_series(1.0);
        let cfg = QuadratureConfig::default();
        let a = integrate_motion(&Scenario::new(ScenarioLabel::A, 0.0), &p, &pulse, &series, &cfg).unwrap();
        let expected = 1e-4 * (8.0 * PI).sqrt() / 1e6;
        assert_relative_eq!(a.v_f, expected, max_relative = 1e-8);
        assert_eq!(a.q[0], 0.0);
        assert_eq!(a.qdot[0], 0.0);
        assert_eq!(a.energy_dissipated, 0.0);

        let b = integrate_motion(&Scenario::new(ScenarioLabel::B, 0.0), &p, &pulse, &series, &cfg).unwrap();
        assert!(b.v_f.abs() < 1e-8 * b.max_abs_qdot);
        assert!(b.max_abs_qdot > 0.0);
    }

    #[test]
    fn dissipative_term_removes_energy_but_no_momentum() {
        let pulse = Pulse::gaussian(2.0);
        let p = ObjectParams::new(-0.95, 1.0, 0.01, 1.0);
        let series = synthetic_series(1.0);
        let cfg = QuadratureConfig::default();
        let c = integrate_motion(&Scenario::new(ScenarioLabel::C, 0.0), &p, &pulse, &series, &cfg).unwrap();
        let d = integrate_motion(&Scenario::new(ScenarioLabel::D, 0.0), &p, &pulse, &series, &cfg).unwrap();
        assert!(d.energy_dissipated > 0.0);
        // ∫ F_q dt is a boundary term, so the final velocities agree
        assert_relative_eq!(d.v_f, c.v_f, max_relative = 1e-8);
        // -∫F_q q̇ dt = ∫F²dt / (6π M²) to leading order
        let f: Vec<f64> = series.f1.iter().zip(&series.f2).map(|(a, b)| 0.01 * a + 1e-4 * b).collect();
        let f2_int = series.integral(&f.iter().map(|x| x * x).collect::<Vec<_>>());
        assert_relative_eq!(d.energy_dissipated, f2_int / (6.0 * PI), max_relative = 1e-3);
    }

    #[test]
    fn window_must_cover_quiet_period() {
        let pulse = Pulse::gaussian(10.0);
        let p = ObjectParams::new(-0.5, 1.0, 0.01, 1e6);
        let r = integrate_motion(
            &Scenario::new(ScenarioLabel::A, 0.0),
            &p,
            &pulse,
            &synthetic_series(1.0),
            &QuadratureConfig::default(),
        );
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
    }
}
