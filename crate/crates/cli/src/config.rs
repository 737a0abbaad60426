use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use selberg_core::transform::Route;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Constants,
    Transform,
    Scan,
    Extract,
    Identify,
    VerifyLemma,
    VerifyEq1,
    VerifyExpsum,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Transform => "transform",
            Command::Scan => "scan",
            Command::Extract => "extract",
            Command::Identify => "identify",
            Command::VerifyLemma => "verify-lemma",
            Command::VerifyEq1 => "verify-eq1",
            Command::VerifyExpsum => "verify-expsum",
        }
    }

    pub fn needs_coefficients(self) -> bool {
        !matches!(self, Command::Constants | Command::VerifyEq1)
    }

    /// Default for the T knob. For verify-lemma it is the height t, for
    /// verify-eq1 the largest height of the residual table.
    fn default_t(self) -> f64 {
        match self {
            Command::Scan | Command::Extract | Command::Identify => 1e5,
            Command::Transform => 1e3,
            Command::VerifyLemma => 20.0,
            Command::VerifyEq1 => 1e4,
            Command::VerifyExpsum => 2e3,
            Command::Constants => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RouteArg {
    Quadrature,
    Expsum,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Route {
        match r {
            RouteArg::Quadrature => Route::Quadrature,
            RouteArg::Expsum => Route::Expsum,
        }
    }
}

/// Knobs read from a `--config` file. Every key is optional; flags win.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub fe_path: Option<PathBuf>,
    pub coeff_path: Option<PathBuf>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub alpha: Option<f64>,
    pub route: Option<RouteArg>,
    pub grid_den: Option<u64>,
    #[serde(rename = "M")]
    pub m: Option<u64>,
    pub tol: Option<f64>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Fully resolved run configuration, embedded in every report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub fe_path: PathBuf,
    pub coeff_path: Option<PathBuf>,
    #[serde(rename = "T")]
    pub t: f64,
    pub alpha: f64,
    pub route: RouteArg,
    pub grid_den: u64,
    #[serde(rename = "M")]
    pub m: u64,
    pub tol: f64,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn resolve(command: Command, flags: ConfigFile, file: ConfigFile) -> Result<Self, String> {
        let fe_path = flags.fe_path.or(file.fe_path).ok_or("an FE descriptor (--fe-file) is required")?;
        let coeff_path = flags.coeff_path.or(file.coeff_path);
        if command.needs_coefficients() && coeff_path.is_none() {
            return Err(format!("{} needs a coefficient file (--coeff-file)", command.name()));
        }
        let cfg = RunConfig {
            command,
            fe_path,
            coeff_path,
            t: flags.t.or(file.t).unwrap_or(command.default_t()),
            alpha: flags.alpha.or(file.alpha).unwrap_or(1.0),
            route: flags.route.or(file.route).unwrap_or(RouteArg::Expsum),
            grid_den: flags.grid_den.or(file.grid_den).unwrap_or(60),
            m: flags.m.or(file.m).unwrap_or(2),
            tol: flags.tol.or(file.tol).unwrap_or(1e-6),
            output_path: flags.output_path.or(file.output_path),
            format: flags.format.or(file.format).unwrap_or_default(),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            threads: flags.threads.or(file.threads),
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), String> {
        let in_range = |name: &str, v: f64, lo: f64, hi: f64| {
            if v.is_finite() && (lo..=hi).contains(&v) {
                Ok(())
            } else {
                Err(format!("{name} = {v} outside [{lo}, {hi}]"))
            }
        };
        if self.command != Command::Constants {
            in_range("T", self.t, 10.0, 1e8)?;
        }
        in_range("alpha", self.alpha, 1e-6, 1e3)?;
        in_range("grid_den", self.grid_den as f64, 1.0, 1e5)?;
        in_range("M", self.m as f64, 1.0, 64.0)?;
        in_range("tol", self.tol, 1e-15, 0.5)?;
        if self.threads == Some(0) {
            return Err("threads must be positive".into());
        }
        Ok(())
    }
}
