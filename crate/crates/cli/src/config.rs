//! Run configuration: defaults, optional key=value config file, flag overrides.

use std::path::{Path, PathBuf};

use crate::CliError;
use lamebic::{EllipticModulus, Grid, LameConfig};

/// Fully resolved parameters of a run. Every field is validated before any
/// computation starts.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub m: f64,
    pub j: u32,
    pub lambda: f64,
    pub lambda1: f64,
    pub x_max: f64,
    pub n: usize,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            m: 0.5,
            j: 2,
            lambda: 1.0,
            lambda1: 1.0,
            x_max: 40.0,
            n: 8001,
            out: PathBuf::from("."),
        }
    }
}

/// The unresolved option set shared by all subcommands (clap fills it).
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// Elliptic modulus parameter m = k^2, strictly between 0 and 1
    #[arg(long)]
    pub m: Option<f64>,
    /// Lamé index j (1 or 2)
    #[arg(long)]
    pub j: Option<u32>,
    /// First deformation parameter (must be positive)
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Second deformation parameter (must be positive)
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Half-line extent: the grid covers [0, xmax]
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Grid point count (odd, at least 9)
    #[arg(long)]
    pub n: Option<usize>,
    /// Output directory for CSV files and reports
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional key=value config file; explicit flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl RunConfig {
    /// defaults <- config file <- explicit flags, then validate.
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &args.config {
            cfg.apply_file(path)?;
        }
        if let Some(m) = args.m {
            cfg.m = m;
        }
        if let Some(j) = args.j {
            cfg.j = j;
        }
        if let Some(lambda) = args.lambda {
            cfg.lambda = lambda;
        }
        if let Some(lambda1) = args.lambda1 {
            cfg.lambda1 = lambda1;
        }
        if let Some(x_max) = args.xmax {
            cfg.x_max = x_max;
        }
        if let Some(n) = args.n {
            cfg.n = n;
        }
        if let Some(out) = &args.out {
            cfg.out = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config file {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "config line {} is not key=value: '{raw}'",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                CliError::Config(format!(
                    "config line {}: cannot parse {what} from '{value}'",
                    lineno + 1
                ))
            };
            match key {
                "m" => self.m = value.parse().map_err(|_| bad("m"))?,
                "j" => self.j = value.parse().map_err(|_| bad("j"))?,
                "lambda" => self.lambda = value.parse().map_err(|_| bad("lambda"))?,
                "lambda1" => self.lambda1 = value.parse().map_err(|_| bad("lambda1"))?,
                "xmax" => self.x_max = value.parse().map_err(|_| bad("xmax"))?,
                "n" => self.n = value.parse().map_err(|_| bad("n"))?,
                "out" => self.out = PathBuf::from(value),
                other => {
                    return Err(CliError::Config(format!(
                        "config line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        let as_config = |e: lamebic::Error| CliError::Config(e.to_string());
        let m = EllipticModulus::new(self.m).map_err(as_config)?;
        LameConfig::new(self.j, m).map_err(as_config)?;
        Grid::new(self.x_max, self.n).map_err(as_config)?;
        if !self.lambda.is_finite() || self.lambda <= 0.0 {
            return Err(CliError::Config(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !self.lambda1.is_finite() || self.lambda1 <= 0.0 {
            return Err(CliError::Config(format!(
                "lambda1 must be positive, got {}",
                self.lambda1
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.x_max, self.n).expect("validated")
    }

    pub fn lame(&self) -> LameConfig {
        LameConfig::new(self.j, EllipticModulus::new(self.m).expect("validated"))
            .expect("validated")
    }
}
