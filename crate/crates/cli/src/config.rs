//! Run configuration: flat `key = value` files with dotted section keys.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use recoil::dynamics::{MassModel, Scenario, ScenarioLabel};
use recoil::model::ObjectParams;
use recoil::pulse::Pulse;
use recoil::quadrature::QuadratureConfig;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseKind {
    Gaussian,
    GaussianCosine,
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSpec {
    pub kind: PulseKind,
    pub width: f64,
    pub omega0: f64,
    pub n_sigma: f64,
    pub samples: Option<PathBuf>,
    pub t0: f64,
    pub dt: f64,
}

impl PulseSpec {
    pub fn build(&self) -> CliResult<Pulse> {
        let pulse = match self.kind {
            PulseKind::Gaussian => Pulse::gaussian(self.width).with_n_sigma(self.n_sigma),
            PulseKind::GaussianCosine => Pulse::gaussian_cosine(self.width, self.omega0).with_n_sigma(self.n_sigma),
            PulseKind::Sampled => {
                let path = self
                    .samples
                    .as_ref()
                    .ok_or_else(|| CliError::Config("pulse.kind = sampled needs pulse.samples".into()))?;
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                let values = text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(|l| {
                        l.parse::<f64>()
                            .map_err(|_| CliError::Config(format!("bad sample '{l}' in {}", path.display())))
                    })
                    .collect::<CliResult<Vec<f64>>>()?;
                Pulse::sampled(self.t0, self.dt, values, self.width)
            }
        };
        pulse.validate()?;
        Ok(pulse)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Lambda0,
    Mu0,
    Omega0T,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            Self::Lambda0 => "lambda0",
            Self::Mu0 => "mu0",
            Self::Omega0T => "omega0T",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub object: ObjectParams,
    pub pulse: PulseSpec,
    pub quad: QuadratureConfig,
    pub scenario: Scenario,
    pub mass_model: MassModel,
    pub spectrum_points: usize,
    pub scatter_omega_min: Option<f64>,
    pub scatter_omega_max: Option<f64>,
    pub scatter_points: usize,
    pub forces_d_omega: Option<f64>,
    pub forces_t_window: Option<f64>,
    pub forces_n_t: Option<usize>,
    pub sweep_axis: SweepAxis,
    pub sweep_values: Vec<f64>,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub jobs: usize,
    /// Reserved; no computation is random.
    pub seed: u64,
    pub normalize_mu0: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_pairs(&[]).expect("defaults are valid")
    }
}

/// Every accepted key with its default.
const DEFAULTS: &[(&str, &str)] = &[
    ("object.lambda0", "-0.5"),
    ("object.mu0", "1"),
    ("object.epsilon", "0.01"),
    ("object.mass0", "1e6"),
    ("pulse.kind", "gaussian-cosine"),
    ("pulse.width", "5"),
    ("pulse.omega0", "2"),
    ("pulse.n_sigma", "6"),
    ("pulse.samples", ""),
    ("pulse.t0", "0"),
    ("pulse.dt", "0"),
    ("quad.abs_tol", "1e-8"),
    ("quad.rel_tol", "1e-6"),
    ("quad.max_subdivisions", "4000"),
    ("quad.omega_max", "8.8"),
    ("quad.doubling_check", "true"),
    ("scenario.label", "A"),
    ("scenario.p_exponent", ""),
    ("scenario.mass_model", "constant"),
    ("spectrum.n_points", "201"),
    ("scatter.omega_min", ""),
    ("scatter.omega_max", ""),
    ("scatter.n_points", "1000"),
    ("forces.d_omega", ""),
    ("forces.t_window", ""),
    ("forces.n_t", ""),
    ("sweep.axis", "lambda0"),
    ("sweep.values", "-0.75,-0.5,-0.25,0,0.25,0.5,0.75"),
    ("output.dir", "out"),
    ("output.formats", "csv,json,svg"),
    ("run.jobs", "0"),
    ("run.seed", "0"),
    ("run.normalize_mu0", "false"),
];

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value, got '{raw}'", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_num(key: &str, v: &str) -> CliResult<f64> {
    v.parse::<f64>()
        .map_err(|_| CliError::Config(format!("{key}: '{v}' is not a number")))
}

fn parse_opt(key: &str, v: &str) -> CliResult<Option<f64>> {
    if v.is_empty() {
        Ok(None)
    } else {
        parse_num(key, v).map(Some)
    }
}

fn parse_count(key: &str, v: &str) -> CliResult<usize> {
    v.parse::<usize>()
        .map_err(|_| CliError::Config(format!("{key}: '{v}' is not a non-negative integer")))
}

fn parse_bool(key: &str, v: &str) -> CliResult<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: '{v}' is not a boolean"))),
    }
}

impl RunConfig {
    /// Builds a configuration from defaults overridden by `pairs` in order.
    pub fn from_pairs(pairs: &[(String, String)]) -> CliResult<Self> {
        let mut map: BTreeMap<&str, String> = DEFAULTS.iter().map(|(k, v)| (*k, v.to_string())).collect();
        for (k, v) in pairs {
            match map.get_mut(k.as_str()) {
                Some(slot) => *slot = v.clone(),
                None => return Err(CliError::Config(format!("unknown key '{k}'"))),
            }
        }
        let get = |k: &str| map[k].as_str();
        let num = |k: &str| parse_num(k, get(k));

        let object = ObjectParams::new(num("object.lambda0")?, num("object.mu0")?, num("object.epsilon")?, num("object.mass0")?);
        let kind = match get("pulse.kind") {
            "gaussian" => PulseKind::Gaussian,
            "gaussian-cosine" => PulseKind::GaussianCosine,
            "sampled" => PulseKind::Sampled,
            other => return Err(CliError::Config(format!("pulse.kind: unknown kind '{other}'"))),
        };
        let samples = Some(get("pulse.samples")).filter(|s| !s.is_empty()).map(PathBuf::from);
        let pulse = PulseSpec {
            kind,
            width: num("pulse.width")?,
            omega0: num("pulse.omega0")?,
            n_sigma: num("pulse.n_sigma")?,
            samples,
            t0: num("pulse.t0")?,
            dt: num("pulse.dt")?,
        };
        let quad = QuadratureConfig {
            abs_tol: num("quad.abs_tol")?,
            rel_tol: num("quad.rel_tol")?,
            max_subdivisions: parse_count("quad.max_subdivisions", get("quad.max_subdivisions"))?,
            omega_max: num("quad.omega_max")?,
            doubling_check: parse_bool("quad.doubling_check", get("quad.doubling_check"))?,
        };
        let label: ScenarioLabel = get("scenario.label").parse()?;
        let p_exponent = parse_opt("scenario.p_exponent", get("scenario.p_exponent"))?.unwrap_or(label.default_p());
        let scenario = Scenario::new(label, p_exponent);
        let mass_model = match get("scenario.mass_model") {
            "constant" => MassModel::Constant,
            "ramp" => MassModel::FieldEnergyRamp { rise: pulse.width },
            other => return Err(CliError::Config(format!("scenario.mass_model: unknown model '{other}'"))),
        };
        let sweep_axis = match get("sweep.axis") {
            "lambda0" => SweepAxis::Lambda0,
            "mu0" => SweepAxis::Mu0,
            "omega0T" | "omega0t" => SweepAxis::Omega0T,
            other => return Err(CliError::Config(format!("sweep.axis: unknown axis '{other}'"))),
        };
        let sweep_values = get("sweep.values")
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_num("sweep.values", s))
            .collect::<CliResult<Vec<f64>>>()?;
        let formats = get("output.formats")
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| match s {
                "csv" => Ok(Format::Csv),
                "json" => Ok(Format::Json),
                "svg" => Ok(Format::Svg),
                other => Err(CliError::Config(format!("output.formats: unknown format '{other}'"))),
            })
            .collect::<CliResult<Vec<Format>>>()?;

        let cfg = Self {
            object,
            pulse,
            quad,
            scenario,
            mass_model,
            spectrum_points: parse_count("spectrum.n_points", get("spectrum.n_points"))?,
            scatter_omega_min: parse_opt("scatter.omega_min", get("scatter.omega_min"))?,
            scatter_omega_max: parse_opt("scatter.omega_max", get("scatter.omega_max"))?,
            scatter_points: parse_count("scatter.n_points", get("scatter.n_points"))?,
            forces_d_omega: parse_opt("forces.d_omega", get("forces.d_omega"))?,
            forces_t_window: parse_opt("forces.t_window", get("forces.t_window"))?,
            forces_n_t: parse_opt("forces.n_t", get("forces.n_t"))?.map(|x| x as usize),
            sweep_axis,
            sweep_values,
            out_dir: PathBuf::from(get("output.dir")),
            formats,
            jobs: parse_count("run.jobs", get("run.jobs"))?,
            seed: get("run.seed")
                .parse()
                .map_err(|_| CliError::Config(format!("run.seed: '{}' is not an integer", get("run.seed"))))?,
            normalize_mu0: parse_bool("run.normalize_mu0", get("run.normalize_mu0"))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> CliResult<Self> {
        let mut pairs = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                parse_pairs(&text)?
            }
            None => Vec::new(),
        };
        pairs.extend_from_slice(overrides);
        Self::from_pairs(&pairs)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.object.validate()?;
        self.quad.validate()?;
        self.scenario.validate()?;
        if self.formats.is_empty() {
            return Err(CliError::Config("output.formats is empty".into()));
        }
        if self.spectrum_points < 16 {
            return Err(CliError::Config(format!("spectrum.n_points must be >= 16 (got {})", self.spectrum_points)));
        }
        if self.scatter_points < 2 {
            return Err(CliError::Config(format!("scatter.n_points must be >= 2 (got {})", self.scatter_points)));
        }
        if self.normalize_mu0 && !(self.object.mu0 > 0.0) {
            return Err(CliError::Config("run.normalize_mu0 requires object.mu0 > 0".into()));
        }
        Ok(())
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Factor applied to frequency columns on output.
    pub fn frequency_unit(&self) -> f64 {
        if self.normalize_mu0 {
            self.object.mu0
        } else {
            1.0
        }
    }

    /// `(lo, hi)` of the log-spaced scattering grid.
    pub fn scatter_range(&self) -> (f64, f64) {
        let scale = if self.object.mu0 > 0.0 { self.object.mu0 } else { 1.0 };
        (
            self.scatter_omega_min.unwrap_or(1e-3 * scale),
            self.scatter_omega_max.unwrap_or(1e3 * scale),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(text: &str) -> Vec<(String, String)> {
        parse_pairs(text).unwrap()
    }

    #[test]
    fn defaults_are_the_reference_configuration() {
        let c = RunConfig::default();
        assert_eq!(c.object, ObjectParams::new(-0.5, 1.0, 0.01, 1e6));
        assert_eq!(c.pulse.kind, PulseKind::GaussianCosine);
        assert_eq!((c.pulse.width, c.pulse.omega0), (5.0, 2.0));
        assert_eq!(c.scenario, Scenario::new(ScenarioLabel::A, 3.0));
        assert_eq!(c.quad, QuadratureConfig::default());
    }

    #[test]
    fn file_syntax() {
        let p = pairs("# comment\n\nobject.lambda0 = 0.5  # trailing\n quad.abs_tol=1e-9\n");
        assert_eq!(p, vec![("object.lambda0".into(), "0.5".into()), ("quad.abs_tol".into(), "1e-9".into())]);
        assert!(parse_pairs("no equals sign").is_err());
    }

    #[test]
    fn later_pairs_win() {
        let c = RunConfig::from_pairs(&pairs("object.lambda0=0.5\nobject.lambda0=0.25")).unwrap();
        assert_eq!(c.object.lambda0, 0.25);
    }

    #[test]
    fn scenario_default_exponent_follows_label() {
        let c = RunConfig::from_pairs(&pairs("scenario.label=B")).unwrap();
        assert_eq!(c.scenario.p_exponent, 0.0);
        let c = RunConfig::from_pairs(&pairs("scenario.label=d\nscenario.p_exponent=1.5")).unwrap();
        assert_eq!(c.scenario, Scenario::new(ScenarioLabel::D, 1.5));
    }

    #[test]
    fn bad_input_is_a_config_error() {
        for text in [
            "object.lambda0=1.5",
            "object.bogus=1",
            "quad.abs_tol=zero",
            "pulse.kind=square",
            "scenario.label=E",
            "scenario.p_exponent=-1",
            "output.formats=png",
            "object.mu0=0\nrun.normalize_mu0=true",
        ] {
            let r = RunConfig::from_pairs(&pairs(text));
            assert!(matches!(r, Err(ref e) if e.exit_code() == 2), "{text}: {r:?}");
        }
    }

    #[test]
    fn sweep_values_parse() {
        let c = RunConfig::from_pairs(&pairs("sweep.axis=mu0\nsweep.values=10, 100,1000")).unwrap();
        assert_eq!(c.sweep_axis, SweepAxis::Mu0);
        assert_eq!(c.sweep_values, vec![10.0, 100.0, 1000.0]);
    }
}
