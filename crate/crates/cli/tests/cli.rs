use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use recoil_cli::output::{fmt_num, Table};

fn recoil(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recoil"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn scatter_csv_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let o = recoil(dir.path(), &["scatter", "--scatter.n_points=50"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let path = dir.path().join("scatter.csv");
    let (headers, cols) = Table::read_numeric(&path).unwrap();
    assert_eq!(
        headers,
        ["omega", "re_s", "im_s", "re_r_plus", "im_r_plus", "re_r_minus", "im_r_minus", "unitarity_residual"]
    );
    assert_eq!(cols[0].len(), 50);
    let mut t = Table::new(&headers.iter().map(String::as_str).collect::<Vec<_>>());
    for k in 0..cols[0].len() {
        t.push(cols.iter().map(|c| fmt_num(c[k])).collect());
    }
    assert_eq!(t.to_bytes().unwrap(), fs::read(&path).unwrap());
    assert!(cols[7].iter().all(|r| *r < 1e-12));
    assert!(dir.path().join("scatter.svg").exists() && dir.path().join("scatter.json").exists());
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(code(&recoil(a.path(), &["spectrum", "--jobs", "1"])), 0);
    assert_eq!(code(&recoil(b.path(), &["spectrum", "--jobs", "4"])), 0);
    for name in ["spectrum.csv", "spectrum_totals.json", "spectrum.svg"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn spectrum_totals_schema() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&recoil(dir.path(), &["spectrum", "--format", "json"])), 0);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("spectrum_totals.json")).unwrap()).unwrap();
    for key in ["N_plus", "N_minus", "E_plus", "E_minus", "P_plus", "P_minus", "P_net", "P_net_nested"] {
        assert!(v["totals"][key]["value"].is_f64(), "{key}");
        assert!(v["totals"][key]["error"].as_f64().unwrap() >= 0.0, "{key}");
    }
    assert!(!dir.path().join("spectrum.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&recoil(d, &["spectrum", "--object.lambda0=1.5"])), 2);
    assert_eq!(code(&recoil(d, &["spectrum", "--object.nonsense=1"])), 2);
    assert_eq!(code(&recoil(d, &["spectrum", "--config", "/nonexistent/run.cfg"])), 2);
    assert_eq!(code(&recoil(d, &["spectrum", "--scenario", "E"])), 2);
    assert_eq!(code(&recoil(d, &["frobnicate"])), 2);
    let o = recoil(
        d,
        &["spectrum", "--quad.max_subdivisions=10", "--tol-abs", "1e-25", "--tol-rel", "1e-15", "--format", "json"],
    );
    assert_eq!(code(&o), 3);
    assert_eq!(code(&recoil(d, &["trajectory", "--object.mass0=1e-4", "--format", "json"])), 5);
}

#[test]
fn config_file_then_dotted_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "object.mu0 = 2\nscatter.n_points = 3\noutput.formats = csv\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = dir.path().join("o");
    let o = recoil(&out, &["scatter", "--config", cfg, "--scatter.n_points", "4"]);
    assert_eq!(code(&o), 0);
    let (_, cols) = Table::read_numeric(&out.join("scatter.csv")).unwrap();
    assert_eq!(cols[0].len(), 4);
    // Default grid spans 1e-3 mu0 .. 1e3 mu0.
    assert!((cols[0][0] - 2e-3).abs() < 1e-15);

    let o = recoil(&out, &["scatter", "--config", cfg, "--normalize-mu0"]);
    assert_eq!(code(&o), 0);
    let (_, cols) = Table::read_numeric(&out.join("scatter.csv")).unwrap();
    assert_eq!(cols[0].len(), 3);
    assert!((cols[0][0] - 1e-3).abs() < 1e-15);
}

#[test]
fn sweep_records_failed_points_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let o = recoil(dir.path(), &["sweep", "--values=-0.5,1.5,0.5", "--format", "csv,json"]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("sweep_lambda0.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda0,quantity,value,error,status"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.iter().any(|r| r.starts_with("1.5000000000000000e0,failed,")));
    let p_net = |v: &str| -> f64 {
        let row = rows.iter().find(|r| r.starts_with(v) && r.contains(",P_net,")).unwrap();
        row.split(',').nth(2).unwrap().parse().unwrap()
    };
    // Mirror antisymmetry of the net momentum.
    let (a, b) = (p_net("-5.0"), p_net("5.0"));
    assert!((a + b).abs() <= 1e-9 * a.abs(), "{a} {b}");
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("sweep_lambda0.json")).unwrap()).unwrap();
    assert_eq!(v["n_failed"], 1);
}

#[test]
fn validate_at_zero_amplitude_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = recoil(dir.path(), &["validate", "--object.epsilon=0", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("validate.json")).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["name"] == "zero_amplitude_gives_zeros"));
}

#[test]
fn plot_replots_a_csv_column() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&recoil(dir.path(), &["scatter", "--scatter.n_points=20", "--format", "csv"])), 0);
    let input = dir.path().join("scatter.csv");
    let o = recoil(dir.path(), &["plot", "--input", input.to_str().unwrap(), "--column", "re_s,im_s"]);
    assert_eq!(code(&o), 0);
    let svg = fs::read_to_string(dir.path().join("scatter.svg")).unwrap();
    assert!(svg.contains(">re_s<") && svg.contains(">im_s<"));
    let o = recoil(dir.path(), &["plot", "--input", input.to_str().unwrap(), "--column", "nope"]);
    assert_eq!(code(&o), 2);
}
