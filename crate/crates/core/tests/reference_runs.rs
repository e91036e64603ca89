use recoil::dynamics::{integrate_motion, Scenario, ScenarioLabel};
use recoil::forces::{default_time_grid, force_time_series};
use recoil::model::ObjectParams;
use recoil::pulse::Pulse;
use recoil::quadrature::QuadratureConfig;
use recoil::spectrum::integrate_spectrum;
use recoil::validation::{run_suite, ValidationOptions};

fn reference() -> (ObjectParams, Pulse, QuadratureConfig) {
    (ObjectParams::default(), Pulse::gaussian_cosine(5.0, 2.0), QuadratureConfig::default())
}

#[test]
fn recoil_velocity_follows_net_momentum() {
    let (p, pulse, quad) = reference();
    let (window, n) = default_time_grid(&pulse, &quad);
    let series = force_time_series(&p, &pulse, &quad, window, n).unwrap();
    let s = integrate_spectrum(&p, &pulse, &quad).unwrap();

    let a = integrate_motion(&Scenario::with_default_p(ScenarioLabel::A), &p, &pulse, &series, &quad).unwrap();
    assert_eq!(a.v_f_predicted, -s.momentum_net.value / p.mass0);
    assert!((a.v_f - a.v_f_predicted).abs() < 0.01 * a.v_f.abs());
    // λ₀ < 0 pushes the mirror towards negative x
    assert!(a.v_f > 0.0 && s.momentum_net.value < 0.0);

    let b = integrate_motion(&Scenario::with_default_p(ScenarioLabel::B), &p, &pulse, &series, &quad).unwrap();
    assert!(b.v_f.abs() < 1e-3 * b.max_abs_qdot);

    let c = integrate_motion(&Scenario::with_default_p(ScenarioLabel::C), &p, &pulse, &series, &quad).unwrap();
    assert!((c.v_f - a.v_f).abs() < 0.01 * a.v_f.abs());

    for t in [&a, &b, &c] {
        assert_eq!((t.q[0], t.qdot[0]), (0.0, 0.0));
        assert!(t.max_abs_qdot < 0.1);
        assert_eq!(t.energy_dissipated, 0.0);
    }
}

#[test]
fn halving_the_step_leaves_final_velocity_unchanged() {
    let (p, pulse, quad) = reference();
    let (window, n) = default_time_grid(&pulse, &quad);
    let run = |n| {
        let series = force_time_series(&p, &pulse, &quad, window, n).unwrap();
        integrate_motion(&Scenario::with_default_p(ScenarioLabel::A), &p, &pulse, &series, &quad)
            .unwrap()
            .v_f
    };
    let coarse = run(n);
    let fine = run(2 * n - 1);
    assert!((coarse - fine).abs() < 1e-3 * fine.abs());
}

#[test]
fn zero_amplitude_reports_exact_zeros() {
    let (p, pulse, quad) = reference();
    let report = run_suite(&p.with_epsilon(0.0), &pulse, &quad, &ValidationOptions::default());
    let check = report.get("zero_amplitude_gives_zeros").unwrap();
    assert!(check.passed, "{check:?}");
    assert_eq!(check.measured, 0.0);
    assert!(report.all_passed(), "{:#?}", report.failures().collect::<Vec<_>>());
}

#[test]
fn sampled_pulse_reproduces_builtin_spectrum() {
    let (p, pulse, quad) = reference();
    let sampled = pulse.to_sampled(2401);
    let a = integrate_spectrum(&p, &pulse, &quad).unwrap();
    let b = integrate_spectrum(&p, &sampled, &quad).unwrap();
    let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
    assert!(rel(b.number_plus.value, a.number_plus.value) < 1e-3);
    assert!(rel(b.momentum_net.value, a.momentum_net.value) < 1e-3);
}
