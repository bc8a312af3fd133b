use std::path::{Path, PathBuf};

use cgpt3d::mesh::QuadratureRule;
use cgpt3d::np_solver::Contrast;
use serde::Deserialize;

use crate::args::{ContrastArgs, NoiseArgs, SensorArgs, SolveArgs};
use crate::error::CliError;
use crate::io::read_json;

pub const MAX_ORDER: usize = 5;
pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_LEVEL: u32 = 3;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorConfig {
    pub count: Option<usize>,
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
}

/// Run parameters shared by all subcommands. Every field is optional and
/// overridden by the matching command-line flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub schema: Option<u32>,
    pub lambda: Option<f64>,
    pub kappa: Option<f64>,
    pub order: Option<usize>,
    pub level: Option<u32>,
    pub rule: Option<String>,
    #[serde(default)]
    pub sensors: SensorConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let cfg: RunConfig = read_json(path)?;
        if let Some(s) = cfg.schema {
            if s != 1 {
                return Err(CliError::validation(format!("{}: unsupported schema {s}", path.display())));
            }
        }
        if cfg.lambda.is_some() && cfg.kappa.is_some() {
            return Err(CliError::validation("config sets both lambda and kappa"));
        }
        Ok(cfg)
    }

    /// λ from the flags if either is given, otherwise from the config.
    pub fn contrast(&self, args: &ContrastArgs) -> Result<f64, CliError> {
        let (lambda, kappa) = if args.lambda.is_some() || args.kappa.is_some() {
            (args.lambda, args.kappa)
        } else {
            (self.lambda, self.kappa)
        };
        let c = match (lambda, kappa) {
            (Some(l), None) => Contrast::new(l)?,
            (None, Some(k)) => Contrast::from_kappa(k)?,
            (Some(_), Some(_)) => return Err(CliError::validation("lambda and kappa are mutually exclusive")),
            (None, None) => return Err(CliError::validation("a contrast is required: pass --lambda or --kappa")),
        };
        Ok(c.lambda())
    }

    pub fn order(&self, flag: Option<usize>) -> Result<usize, CliError> {
        let k = flag.or(self.order).unwrap_or(DEFAULT_ORDER);
        if !(1..=MAX_ORDER).contains(&k) {
            return Err(CliError::validation(format!("order must be between 1 and {MAX_ORDER}, got {k}")));
        }
        Ok(k)
    }

    pub fn level(&self, flag: Option<u32>) -> u32 {
        flag.or(self.level).unwrap_or(DEFAULT_LEVEL)
    }

    pub fn rule(&self, args: &SolveArgs) -> Result<QuadratureRule, CliError> {
        match args.rule.as_ref().or(self.rule.as_ref()) {
            Some(r) => Ok(r.parse()?),
            None => Ok(QuadratureRule::default()),
        }
    }

    pub fn sensors(&self, args: &SensorArgs) -> Result<(usize, f64), CliError> {
        let count = args.count.or(self.sensors.count).ok_or_else(|| CliError::validation("--sensors is required"))?;
        let radius = args.radius.or(self.sensors.radius).ok_or_else(|| CliError::validation("--radius is required"))?;
        Ok((count, radius))
    }

    pub fn noise(&self, args: &NoiseArgs) -> (f64, u64) {
        (
            args.sigma.or(self.noise.sigma).unwrap_or(0.0),
            args.seed.or(self.noise.seed).unwrap_or(0),
        )
    }

    pub fn output(&self, flag: &Option<PathBuf>) -> Option<PathBuf> {
        flag.clone().or_else(|| self.output.clone())
    }
}
