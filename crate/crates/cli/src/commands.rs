//! One function per subcommand. Each writes its files and returns the lines
//! printed on stdout.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use recoil::dynamics::{integrate_motion_with, MotionOptions, ScenarioLabel, TrajectoryResult};
use recoil::forces::{default_time_grid, force_spectrum, frequency_step, ForceSeries, ForceSpectrum};
use recoil::grid::FrequencyGrid;
use recoil::model::ObjectParams;
use recoil::pulse::Pulse;
use recoil::scattering::{r_coeff, s0_matrix, s_coeff, Side};
use recoil::spectrum::{integrate_spectrum, integrate_spectrum_on, Quantity, SpectrumResult};
use recoil::validation::{run_suite, ValidationOptions, ValidationReport};

use crate::config::{Format, RunConfig, SweepAxis};
use crate::error::{CliError, CliResult};
use crate::output::{quantity, write_atomic, write_json, Table};
use crate::svg::{Chart, Series};

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.out_dir.join(name)
}

fn q(x: Quantity) -> Value {
    quantity(x.value, x.error)
}

fn write_svg(cfg: &RunConfig, name: &str, chart: &Chart) -> CliResult<()> {
    write_atomic(&out_path(cfg, name), chart.render().as_bytes())
}

fn frequency_label(cfg: &RunConfig) -> &'static str {
    if cfg.normalize_mu0 {
        "omega / mu0"
    } else {
        "omega"
    }
}

fn units(cfg: &RunConfig) -> Value {
    json!({
        "frequency": if cfg.normalize_mu0 { "mu0" } else { "natural" },
        "mu0": cfg.object.mu0,
    })
}

pub fn scatter(cfg: &RunConfig) -> CliResult<Vec<String>> {
    let p = &cfg.object;
    let (lo, hi) = cfg.scatter_range();
    if !(lo > 0.0 && hi > lo) {
        return Err(CliError::Config(format!("scatter range must satisfy 0 < omega_min < omega_max (got {lo}, {hi})")));
    }
    let n = cfg.scatter_points;
    let unit = cfg.frequency_unit();
    let mut table = Table::new(&[
        "omega",
        "re_s",
        "im_s",
        "re_r_plus",
        "im_r_plus",
        "re_r_minus",
        "im_r_minus",
        "unitarity_residual",
    ]);
    let mut worst = 0.0f64;
    let (mut xs, mut abs_s, mut abs_rp, mut abs_rm) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for k in 0..n {
        let w = lo * (hi / lo).powf(k as f64 / (n - 1) as f64);
        let s = s_coeff(Side::Plus, w, p)?;
        let rp = r_coeff(Side::Plus, w, p)?;
        let rm = r_coeff(Side::Minus, w, p)?;
        let residual = s0_matrix(w, p)?
            .row_norms()
            .iter()
            .map(|x| (x - 1.0).abs())
            .fold(0.0, f64::max);
        worst = worst.max(residual);
        table.push_numbers(&[w / unit, s.re, s.im, rp.re, rp.im, rm.re, rm.im, residual]);
        xs.push((w / unit).log10());
        abs_s.push(s.norm());
        abs_rp.push(rp.norm());
        abs_rm.push(rm.norm());
    }
    if cfg.wants(Format::Csv) {
        table.write(&out_path(cfg, "scatter.csv"))?;
    }
    if cfg.wants(Format::Json) {
        write_json(
            &out_path(cfg, "scatter.json"),
            &json!({
                "params": params_json(p),
                "n_points": n,
                "omega_min": lo,
                "omega_max": hi,
                "max_unitarity_residual": worst,
                "units": units(cfg),
            }),
        )?;
    }
    if cfg.wants(Format::Svg) {
        let series = |label: &str, y: Vec<f64>| Series {
            label: label.into(),
            x: xs.clone(),
            y,
        };
        let chart = Chart {
            title: format!("Scattering coefficients, lambda0 = {}, mu0 = {}", p.lambda0, p.mu0),
            x_label: format!("log10({})", frequency_label(cfg)),
            y_label: "modulus".into(),
            series: vec![series("|s|", abs_s), series("|r+|", abs_rp), series("|r-|", abs_rm)],
            ..Default::default()
        };
        write_svg(cfg, "scatter.svg", &chart)?;
    }
    Ok(vec![format!("scatter: {n} frequencies, max unitarity residual {worst:.3e}")])
}

fn params_json(p: &ObjectParams) -> Value {
    json!({ "lambda0": p.lambda0, "mu0": p.mu0, "epsilon": p.epsilon, "mass0": p.mass0 })
}

fn totals_json(s: &SpectrumResult) -> Value {
    json!({
        "N_plus": q(s.number_plus),
        "N_minus": q(s.number_minus),
        "N_total": q(s.number_total()),
        "E_plus": q(s.energy_plus),
        "E_minus": q(s.energy_minus),
        "P_plus": q(s.momentum_plus),
        "P_minus": q(s.momentum_minus),
        "P_net": q(s.momentum_net),
        "P_net_nested": q(s.momentum_net_nested),
    })
}

pub fn spectrum(cfg: &RunConfig, pulse: &Pulse) -> CliResult<Vec<String>> {
    let p = &cfg.object;
    let grid = FrequencyGrid::uniform(pulse.spectral_edge(cfg.quad.omega_max), cfg.spectrum_points);
    let s = integrate_spectrum_on(p, pulse, &cfg.quad, &grid)?;
    let unit = cfg.frequency_unit();
    if cfg.wants(Format::Csv) {
        let mut t = Table::new(&["omega", "n_plus", "n_minus"]);
        for k in 0..s.omega.len() {
            t.push_numbers(&[s.omega[k] / unit, s.n_plus[k] * unit, s.n_minus[k] * unit]);
        }
        t.write(&out_path(cfg, "spectrum.csv"))?;
    }
    if cfg.wants(Format::Json) {
        write_json(
            &out_path(cfg, "spectrum_totals.json"),
            &json!({
                "params": params_json(p),
                "totals": totals_json(&s),
                "units": units(cfg),
            }),
        )?;
    }
    if cfg.wants(Format::Svg) {
        let x: Vec<f64> = s.omega.iter().map(|w| w / unit).collect();
        let chart = Chart {
            title: format!("Created-particle spectrum, lambda0 = {}", p.lambda0),
            x_label: frequency_label(cfg).into(),
            y_label: "particles per unit frequency".into(),
            series: vec![
                Series {
                    label: "n+".into(),
                    x: x.clone(),
                    y: s.n_plus.iter().map(|v| v * unit).collect(),
                },
                Series {
                    label: "n-".into(),
                    x,
                    y: s.n_minus.iter().map(|v| v * unit).collect(),
                },
            ],
            notes: vec![format!(
                "P_net = {:.6e} +/- {:.1e}",
                s.momentum_net.value, s.momentum_net.error
            )],
            ..Default::default()
        };
        write_svg(cfg, "spectrum.svg", &chart)?;
    }
    Ok(vec![
        format!(
            "N+ = {:.6e}, N- = {:.6e}, E+ = {:.6e}, E- = {:.6e}",
            s.number_plus.value, s.number_minus.value, s.energy_plus.value, s.energy_minus.value
        ),
        format!(
            "P_net = {:.10e} +/- {:.1e} (direct), {:.10e} +/- {:.1e} (E+ - E-)",
            s.momentum_net.value, s.momentum_net.error, s.momentum_net_nested.value, s.momentum_net_nested.error
        ),
    ])
}

/// Time window and sample count for force series and trajectories.
fn time_grid(cfg: &RunConfig, pulse: &Pulse) -> (f64, usize) {
    let (window, n) = default_time_grid(pulse, &cfg.quad);
    (cfg.forces_t_window.unwrap_or(window), cfg.forces_n_t.unwrap_or(n))
}

fn compute_forces(cfg: &RunConfig, params: &ObjectParams, pulse: &Pulse) -> CliResult<(ForceSpectrum, ForceSeries)> {
    let (window, n) = time_grid(cfg, pulse);
    let d_omega = cfg.forces_d_omega.unwrap_or_else(|| frequency_step(params, pulse, window));
    let spec = force_spectrum(params, pulse, &cfg.quad, d_omega)?;
    let series = spec.time_series(window, n)?;
    Ok((spec, series))
}

pub fn forces(cfg: &RunConfig, pulse: &Pulse) -> CliResult<Vec<String>> {
    let p = &cfg.object;
    let (spec, series) = compute_forces(cfg, p, pulse)?;
    let s = integrate_spectrum(p, pulse, &cfg.quad)?;
    let unit = cfg.frequency_unit();
    let zero = spec.omega.iter().position(|&w| w == 0.0).expect("grid contains 0");
    let f1_peak = spec.f1.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let eps2 = p.epsilon * p.epsilon;
    let f2_dc = spec.f2[zero].re;
    let impulse_f2 = eps2 * series.integral(&series.f2);
    let cross = (eps2 * f2_dc + s.momentum_net.value).abs() / s.momentum_net.value.abs();

    if cfg.wants(Format::Csv) {
        let mut t = Table::new(&["omega", "re_F1_tilde", "im_F1_tilde", "re_F2_tilde", "im_F2_tilde", "f2_error"]);
        for k in 0..spec.omega.len() {
            t.push_numbers(&[
                spec.omega[k] / unit,
                spec.f1[k].re,
                spec.f1[k].im,
                spec.f2[k].re,
                spec.f2[k].im,
                spec.f2_error[k],
            ]);
        }
        t.write(&out_path(cfg, "forces_spectrum.csv"))?;
        let mut t = Table::new(&["t", "F1", "F2"]);
        for k in 0..series.t.len() {
            t.push_numbers(&[series.t[k] * unit, series.f1[k], series.f2[k]]);
        }
        t.write(&out_path(cfg, "forces_time.csv"))?;
    }
    if cfg.wants(Format::Json) {
        write_json(
            &out_path(cfg, "forces.json"),
            &json!({
                "params": params_json(p),
                "F1_tilde_at_zero": spec.f1[zero].norm(),
                "F1_tilde_peak": f1_peak,
                "F2_tilde_at_zero": quantity(f2_dc, spec.f2_error[zero]),
                "eps2_F2_tilde_at_zero": eps2 * f2_dc,
                "P_net": q(s.momentum_net),
                "dc_cross_check_relative": cross,
                "impulse_F1": series.integral(&series.f1),
                "eps2_impulse_F2": impulse_f2,
                "imag_residue": series.imag_residue,
                "units": units(cfg),
            }),
        )?;
    }
    if cfg.wants(Format::Svg) {
        let t: Vec<f64> = series.t.iter().map(|x| x * unit).collect();
        let chart = Chart {
            title: format!("Forces at unit amplitude, lambda0 = {}", p.lambda0),
            x_label: if cfg.normalize_mu0 { "t * mu0" } else { "t" }.into(),
            y_label: "force".into(),
            series: vec![
                Series {
                    label: "F1".into(),
                    x: t.clone(),
                    y: series.f1.clone(),
                },
                Series {
                    label: "F2".into(),
                    x: t,
                    y: series.f2.clone(),
                },
            ],
            ..Default::default()
        };
        write_svg(cfg, "forces.svg", &chart)?;
    }
    Ok(vec![
        format!(
            "eps^2 F2~(0) = {:.10e}, -P_net = {:.10e}, relative difference {cross:.3e}",
            eps2 * f2_dc,
            -s.momentum_net.value
        ),
        format!(
            "|F1~(0)| / max|F1~| = {:.3e}, imaginary residue {:.3e}",
            spec.f1[zero].norm() / f1_peak,
            series.imag_residue
        ),
    ])
}

fn run_trajectory(cfg: &RunConfig, pulse: &Pulse, label: ScenarioLabel, series: &ForceSeries) -> CliResult<TrajectoryResult> {
    let scenario = recoil::dynamics::Scenario::new(label, cfg.scenario.p_exponent);
    let opts = MotionOptions {
        mass_model: cfg.mass_model,
        ..Default::default()
    };
    Ok(integrate_motion_with(&scenario, &cfg.object, pulse, series, &cfg.quad, &opts)?)
}

pub fn trajectory(cfg: &RunConfig, pulse: &Pulse) -> CliResult<Vec<String>> {
    let p = &cfg.object;
    let label = cfg.scenario.label;
    let (spec, series) = compute_forces(cfg, p, pulse)?;
    let traj = run_trajectory(cfg, pulse, label, &series)?;
    let unit = cfg.frequency_unit();
    let deviation = (traj.v_f - traj.v_f_predicted).abs() / traj.v_f.abs();
    let mut notes = vec![
        format!("scenario {label}, p = {}", cfg.scenario.p_exponent),
        format!("v_f = {:.10e}", traj.v_f),
        format!("v_f_predicted = -P_net/M0 = {:.10e}", traj.v_f_predicted),
    ];
    let mut extra = json!({});
    if label == ScenarioLabel::D {
        let base = run_trajectory(cfg, pulse, ScenarioLabel::C, &series)?;
        // Resolution: change of the C velocity when the time grid is refined.
        let (window, n) = time_grid(cfg, pulse);
        let fine = spec.time_series(window, 2 * n - 1)?;
        let base_fine = run_trajectory(cfg, pulse, ScenarioLabel::C, &fine)?;
        let resolution = (base_fine.v_f - base.v_f).abs() + 1e-12 * base.v_f.abs();
        let reduction = base.v_f.abs() - traj.v_f.abs();
        let verdict = if reduction > resolution {
            "yes"
        } else if reduction < -resolution {
            "no"
        } else {
            "not resolved"
        };
        notes.push(format!(
            "|v_f'| < |v_f|: {verdict} (v_f without F_q = {:.10e}, reduction {reduction:.3e}, resolution {resolution:.3e})",
            base.v_f
        ));
        notes.push(format!("energy dissipated by F_q = {:.6e}", traj.energy_dissipated));
        extra = json!({
            "v_f_without_fq": base.v_f,
            "speed_reduction": reduction,
            "velocity_resolution": resolution,
            "speed_reduced": reduction > resolution,
        });
    }
    let name = format!("trajectory_{label}");
    if cfg.wants(Format::Csv) {
        let mut t = Table::new(&["t", "q", "qdot"]);
        for k in 0..traj.t.len() {
            t.push_numbers(&[traj.t[k] * unit, traj.q[k] * unit, traj.qdot[k]]);
        }
        t.write(&out_path(cfg, &format!("{name}.csv")))?;
    }
    if cfg.wants(Format::Json) {
        write_json(
            &out_path(cfg, &format!("{name}.json")),
            &json!({
                "params": params_json(p),
                "scenario": label.to_string(),
                "p_exponent": cfg.scenario.p_exponent,
                "v_f": traj.v_f,
                "v_f_predicted": traj.v_f_predicted,
                "relative_deviation": deviation,
                "max_abs_qdot": traj.max_abs_qdot,
                "energy_dissipated": traj.energy_dissipated,
                "steps": traj.steps,
                "comparison": extra,
                "units": units(cfg),
            }),
        )?;
    }
    if cfg.wants(Format::Svg) {
        let chart = Chart {
            title: format!("Mean trajectory q(t), scenario {label}"),
            x_label: if cfg.normalize_mu0 { "t * mu0" } else { "t" }.into(),
            y_label: if cfg.normalize_mu0 { "q * mu0" } else { "q" }.into(),
            series: vec![Series {
                label: "q(t)".into(),
                x: traj.t.iter().map(|x| x * unit).collect(),
                y: traj.q.iter().map(|x| x * unit).collect(),
            }],
            notes: notes.clone(),
            ..Default::default()
        };
        write_svg(cfg, &format!("{name}.svg"), &chart)?;
    }
    let mut lines = notes;
    lines.push(format!("relative deviation from -P_net/M0: {deviation:.3e}"));
    Ok(lines)
}

pub fn report_json(report: &ValidationReport) -> Value {
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            json!({
                "module": c.module,
                "name": c.name,
                "passed": c.passed,
                "measured": c.measured,
                "threshold": c.threshold,
                "detail": c.detail,
            })
        })
        .collect();
    json!({
        "passed": report.all_passed(),
        "n_checks": report.checks.len(),
        "n_failed": report.failures().count(),
        "checks": checks,
    })
}

pub fn validate(cfg: &RunConfig, pulse: &Pulse) -> CliResult<Vec<String>> {
    let report = run_suite(&cfg.object, pulse, &cfg.quad, &ValidationOptions::default());
    if cfg.wants(Format::Json) {
        write_json(&out_path(cfg, "validate.json"), &report_json(&report))?;
    }
    let mut lines: Vec<String> = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {:<11} {:<40} measured {:.3e} threshold {:.3e}{}",
                if c.passed { "PASS" } else { "FAIL" },
                c.module,
                c.name,
                c.measured,
                c.threshold,
                if c.detail.is_empty() { String::new() } else { format!("  ({})", c.detail) }
            )
        })
        .collect();
    let failed = report.failures().count();
    lines.push(format!("{} of {} checks passed", report.checks.len() - failed, report.checks.len()));
    if failed > 0 {
        for l in &lines {
            println!("{l}");
        }
        return Err(CliError::ValidationFailed(failed));
    }
    Ok(lines)
}

/// One sweep point: the swept value and either its quantities or the error.
type SweepPoint = (f64, Result<Vec<(&'static str, f64, f64)>, String>);

fn sweep_point(cfg: &RunConfig, pulse: &Pulse, axis: SweepAxis, v: f64) -> CliResult<Vec<(&'static str, f64, f64)>> {
    let mut params = cfg.object;
    let mut pulse = pulse.clone();
    match axis {
        SweepAxis::Lambda0 => params.lambda0 = v,
        SweepAxis::Mu0 => params.mu0 = v,
        SweepAxis::Omega0T => match pulse.shape {
            recoil::pulse::PulseShape::GaussianCosine { ref mut carrier } => *carrier = v / pulse.width,
            _ => return Err(CliError::Config("sweep over omega0T needs a gaussian-cosine pulse".into())),
        },
    }
    params.validate()?;
    pulse.validate()?;
    let s = integrate_spectrum(&params, &pulse, &cfg.quad)?;
    let mut out = vec![
        ("N_plus", s.number_plus.value, s.number_plus.error),
        ("N_minus", s.number_minus.value, s.number_minus.error),
        ("N_total", s.number_total().value, s.number_total().error),
        ("E_plus", s.energy_plus.value, s.energy_plus.error),
        ("E_minus", s.energy_minus.value, s.energy_minus.error),
        ("P_net", s.momentum_net.value, s.momentum_net.error),
        ("P_net_nested", s.momentum_net_nested.value, s.momentum_net_nested.error),
    ];
    if params.mu0 > 0.0 {
        let eps2 = params.epsilon * params.epsilon;
        let f = recoil::forces::f2_tilde(0.0, &params, &pulse, &cfg.quad)?;
        out.push(("eps2_F2_tilde_0", eps2 * f.value.re, eps2 * f.error));
    }
    Ok(out)
}

pub fn sweep(cfg: &RunConfig, pulse: &Pulse) -> CliResult<Vec<String>> {
    let axis = cfg.sweep_axis;
    if cfg.sweep_values.is_empty() {
        return Err(CliError::Config("sweep.values is empty".into()));
    }
    if axis == SweepAxis::Omega0T && !matches!(pulse.shape, recoil::pulse::PulseShape::GaussianCosine { .. }) {
        return Err(CliError::Config("sweep over omega0T needs a gaussian-cosine pulse".into()));
    }
    let points: Vec<SweepPoint> = cfg
        .sweep_values
        .par_iter()
        .map(|&v| (v, sweep_point(cfg, pulse, axis, v).map_err(|e| e.to_string())))
        .collect();

    let mut table = Table::new(&[axis.name(), "quantity", "value", "error", "status"]);
    let mut failures = Vec::new();
    let mut p_net = Vec::new();
    let mut n_total = Vec::new();
    for (v, r) in &points {
        match r {
            Ok(rows) => {
                for (name, value, error) in rows {
                    table.push(vec![
                        crate::output::fmt_num(*v),
                        name.to_string(),
                        crate::output::fmt_num(*value),
                        crate::output::fmt_num(*error),
                        "ok".into(),
                    ]);
                    match *name {
                        "P_net" => p_net.push((*v, *value)),
                        "N_total" => n_total.push((*v, *value)),
                        _ => {}
                    }
                }
            }
            Err(msg) => {
                failures.push(json!({ "value": v, "error": msg }));
                table.push(vec![
                    crate::output::fmt_num(*v),
                    "failed".into(),
                    crate::output::fmt_num(f64::NAN),
                    crate::output::fmt_num(f64::NAN),
                    msg.clone(),
                ]);
            }
        }
    }
    let name = format!("sweep_{}", axis.name());
    if cfg.wants(Format::Csv) {
        table.write(&out_path(cfg, &format!("{name}.csv")))?;
    }
    if cfg.wants(Format::Json) {
        write_json(
            &out_path(cfg, &format!("{name}.json")),
            &json!({
                "axis": axis.name(),
                "values": cfg.sweep_values,
                "n_failed": failures.len(),
                "failures": failures,
            }),
        )?;
    }
    if cfg.wants(Format::Svg) {
        let chart = Chart {
            title: format!("Net momentum across {}", axis.name()),
            x_label: axis.name().into(),
            y_label: "P_net".into(),
            series: vec![Series {
                label: "P_net".into(),
                x: p_net.iter().map(|p| p.0).collect(),
                y: p_net.iter().map(|p| p.1).collect(),
            }],
            ..Default::default()
        };
        write_svg(cfg, &format!("{name}.svg"), &chart)?;
    }
    Ok(vec![format!(
        "sweep over {}: {} points, {} failed",
        axis.name(),
        points.len(),
        points.iter().filter(|p| p.1.is_err()).count()
    )])
}

/// Re-plots numeric columns of an existing CSV against its first column.
pub fn plot(cfg: &RunConfig, input: &Path, columns: &[String]) -> CliResult<Vec<String>> {
    let (headers, cols) = Table::read_numeric(input)?;
    if headers.len() < 2 {
        return Err(CliError::Config(format!("{} needs at least two columns", input.display())));
    }
    let picked: Vec<usize> = if columns.is_empty() {
        (1..headers.len()).collect()
    } else {
        columns
            .iter()
            .map(|c| {
                headers
                    .iter()
                    .position(|h| h == c)
                    .ok_or_else(|| CliError::Config(format!("no column '{c}' in {}", input.display())))
            })
            .collect::<CliResult<_>>()?
    };
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "plot".into());
    let chart = Chart {
        title: stem.clone(),
        x_label: headers[0].clone(),
        y_label: picked.iter().map(|&i| headers[i].as_str()).collect::<Vec<_>>().join(", "),
        series: picked
            .iter()
            .map(|&i| Series {
                label: headers[i].clone(),
                x: cols[0].clone(),
                y: cols[i].clone(),
            })
            .collect(),
        ..Default::default()
    };
    let path = out_path(cfg, &format!("{stem}.svg"));
    write_atomic(&path, chart.render().as_bytes())?;
    Ok(vec![format!("wrote {}", path.display())])
}
