//! Command-line front end for the recoil library.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "recoil",
    version,
    about = "Particle creation and recoil of a moving delta/delta-prime mirror",
    after_help = "Any configuration key can also be set as --section.key=value, e.g. --object.lambda0=0.5.\n\
                  Precedence: config file, then dotted overrides, then the named flags above."
)]
pub struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output formats, comma separated: csv, json, svg.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    /// Frequency cutoff used when a pulse has no compact spectral support.
    #[arg(long, global = true)]
    pub omega_max: Option<f64>,
    /// Dynamics scenario: A, B, C or D.
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    #[arg(long, global = true)]
    pub p_exponent: Option<f64>,
    /// Report frequencies in units of mu0 and times in units of 1/mu0.
    #[arg(long, global = true)]
    pub normalize_mu0: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scattering coefficients on a log-spaced frequency grid.
    Scatter,
    /// Created-particle spectra and totals.
    Spectrum,
    /// First- and second-order forces in frequency and time.
    Forces,
    /// Mean trajectory of the object for one scenario.
    Trajectory,
    /// Run every consistency check and report PASS/FAIL.
    Validate,
    /// Spectrum totals across one parameter axis.
    Sweep {
        /// lambda0, mu0 or omega0T.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated values.
        #[arg(long)]
        values: Option<String>,
    },
    /// Plot columns of an existing CSV against its first column.
    Plot {
        #[arg(long)]
        input: PathBuf,
        /// Column names, comma separated (default: all).
        #[arg(long, value_delimiter = ',')]
        column: Vec<String>,
    },
}

/// Splits `--section.key=value` and `--section.key value` out of `args`.
pub fn split_dotted(args: Vec<OsString>) -> CliResult<(Vec<OsString>, Vec<(String, String)>)> {
    let mut rest = Vec::new();
    let mut pairs = Vec::new();
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let text = arg.to_string_lossy();
        let dotted = text
            .strip_prefix("--")
            .filter(|s| s.split('=').next().is_some_and(|k| k.contains('.')));
        match dotted {
            Some(body) => match body.split_once('=') {
                Some((k, v)) => pairs.push((k.to_string(), v.to_string())),
                None => {
                    let key = body.to_string();
                    let value = it
                        .next()
                        .ok_or_else(|| CliError::Config(format!("--{key} needs a value")))?;
                    pairs.push((key, value.to_string_lossy().into_owned()));
                }
            },
            None => rest.push(arg),
        }
    }
    Ok((rest, pairs))
}

fn flag_overrides(cli: &Cli) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut put = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            out.push((k.to_string(), v));
        }
    };
    put("output.dir", cli.out.as_ref().map(|p| p.display().to_string()));
    put("output.formats", cli.format.clone());
    put("run.jobs", cli.jobs.map(|v| v.to_string()));
    put("quad.abs_tol", cli.tol_abs.map(|v| v.to_string()));
    put("quad.rel_tol", cli.tol_rel.map(|v| v.to_string()));
    put("quad.omega_max", cli.omega_max.map(|v| v.to_string()));
    put("scenario.label", cli.scenario.clone());
    put("scenario.p_exponent", cli.p_exponent.map(|v| v.to_string()));
    put("run.normalize_mu0", cli.normalize_mu0.then(|| "true".to_string()));
    if let Command::Sweep { axis, values } = &cli.command {
        put("sweep.axis", axis.clone());
        put("sweep.values", values.clone());
    }
    out
}

fn execute(cli: &Cli, dotted: &[(String, String)]) -> CliResult<Vec<String>> {
    let mut overrides = dotted.to_vec();
    overrides.extend(flag_overrides(cli));
    let cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
    std::fs::create_dir_all(&cfg.out_dir).map_err(|source| CliError::Output {
        path: cfg.out_dir.display().to_string(),
        source,
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} worker threads: {e}", cfg.jobs)))?;
    pool.install(|| {
        if let Command::Plot { input, column } = &cli.command {
            return commands::plot(&cfg, input, column);
        }
        let pulse = cfg.pulse.build()?;
        match &cli.command {
            Command::Scatter => commands::scatter(&cfg),
            Command::Spectrum => commands::spectrum(&cfg, &pulse),
            Command::Forces => commands::forces(&cfg, &pulse),
            Command::Trajectory => commands::trajectory(&cfg, &pulse),
            Command::Validate => commands::validate(&cfg, &pulse),
            Command::Sweep { .. } => commands::sweep(&cfg, &pulse),
            Command::Plot { .. } => unreachable!(),
        }
    })
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let (rest, dotted) = match split_dotted(args.into_iter().map(Into::into).collect()) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(rest) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli, &dotted) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn dotted_overrides_both_spellings() {
        let (rest, pairs) = split_dotted(os(&[
            "recoil",
            "--object.lambda0=0.5",
            "spectrum",
            "--quad.abs_tol",
            "1e-9",
            "--out",
            "x",
        ]))
        .unwrap();
        assert_eq!(rest, os(&["recoil", "spectrum", "--out", "x"]));
        assert_eq!(
            pairs,
            vec![("object.lambda0".into(), "0.5".into()), ("quad.abs_tol".into(), "1e-9".into())]
        );
        assert!(split_dotted(os(&["recoil", "--object.mu0"])).is_err());
    }

    #[test]
    fn named_flags_win_over_dotted() {
        let (rest, dotted) = split_dotted(os(&["recoil", "--quad.abs_tol=1e-5", "--tol-abs", "1e-7", "validate"])).unwrap();
        let cli = Cli::try_parse_from(rest).unwrap();
        let mut pairs = dotted;
        pairs.extend(flag_overrides(&cli));
        let cfg = RunConfig::from_pairs(&pairs).unwrap();
        assert_eq!(cfg.quad.abs_tol, 1e-7);
    }
}
