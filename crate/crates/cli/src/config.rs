use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use geoharnack_core::{Family, LaplaceExponent};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    GeometricStable,
    IteratedGeometricStable,
    RelativisticGeometricStable,
    Stable,
    Gamma,
    RegVarying,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    pub name: FamilyName,
    pub alpha: f64,
    pub mass: f64,
    pub depth: u32,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig { name: FamilyName::GeometricStable, alpha: 1.0, mass: 1.0, depth: 2 }
    }
}

impl FamilyConfig {
    pub fn exponent(&self) -> geoharnack_core::Result<LaplaceExponent> {
        LaplaceExponent::new(match self.name {
            FamilyName::GeometricStable => Family::GeometricStable { alpha: self.alpha },
            FamilyName::IteratedGeometricStable => Family::IteratedGeometricStable { alpha: self.alpha, depth: self.depth },
            FamilyName::RelativisticGeometricStable => Family::RelativisticGeometricStable { alpha: self.alpha, mass: self.mass },
            FamilyName::Stable => Family::StablePure { alpha: self.alpha },
            FamilyName::Gamma => Family::GammaPure,
            FamilyName::RegVarying => Family::RegVaryingExample { alpha: self.alpha },
        })
    }
}

/// Registered operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Operation {
    Phi,
    Density,
    Kernel,
    Transience,
    Simulate,
    Harnack,
    Verify,
}

impl Operation {
    /// Accepted values of `target`, first one the default.
    pub fn targets(&self) -> &'static [&'static str] {
        match self {
            Operation::Phi | Operation::Transience => &["-"],
            Operation::Density => &["levy", "potential"],
            Operation::Kernel => &["j", "g"],
            Operation::Simulate => &["exit", "subordinator"],
            Operation::Harnack => &["scan", "poisson", "green", "exit-time", "ks"],
            Operation::Verify => &["all", "certify", "asymptotics", "bounds", "kernels"],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Operation::Phi => "phi",
            Operation::Density => "density",
            Operation::Kernel => "kernel",
            Operation::Transience => "transience",
            Operation::Simulate => "simulate",
            Operation::Harnack => "harnack",
            Operation::Verify => "verify",
        }
    }
}

/// Logarithmic grid `[lo, hi]` with `per_decade` points per decade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub per_decade: usize,
}

impl GridConfig {
    pub fn points(&self) -> geoharnack_core::Result<Vec<f64>> {
        if self.lo == self.hi {
            return Ok(vec![self.lo]);
        }
        geoharnack_core::grid::log_grid_per_decade(self.lo, self.hi, self.per_decade)
    }

    fn validate(&self, name: &str) -> Result<(), ConfigError> {
        if !(self.lo > 0.0 && self.hi >= self.lo && self.hi.is_finite()) {
            return Err(bad(format!("{name}: need 0 < lo <= hi < inf, got [{}, {}]", self.lo, self.hi)));
        }
        if self.per_decade == 0 {
            return Err(bad(format!("{name}: per_decade must be positive")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub n: usize,
    pub dt_scale: f64,
    pub seed: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig { n: 10_000, dt_scale: 1e-3, seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub family: FamilyConfig,
    pub d: u32,
    pub operation: Operation,
    /// Sub-selector of the operation, e.g. `levy` for `density`.
    pub target: Option<String>,
    pub lambda_grid: GridConfig,
    pub t_grid: GridConfig,
    pub r_grid: GridConfig,
    pub radii: Vec<f64>,
    pub tolerance: f64,
    pub order: usize,
    pub mc: MonteCarloConfig,
    /// Ball radius for `simulate` and `harnack poisson`.
    pub ball_radius: f64,
    pub start: Option<Vec<f64>>,
    /// Random test points per radius in the Harnack scan.
    pub points: usize,
    pub n_max: u32,
    pub threads: Option<usize>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: FamilyConfig::default(),
            d: 2,
            operation: Operation::Verify,
            target: None,
            lambda_grid: GridConfig { lo: 1e-4, hi: 1e8, per_decade: 4 },
            t_grid: GridConfig { lo: 1e-6, hi: 1.0, per_decade: 10 },
            r_grid: GridConfig { lo: 1e-4, hi: 1e-1, per_decade: 4 },
            radii: vec![0.5, 0.25, 0.125, 0.0625],
            tolerance: 1e-8,
            order: geoharnack_core::densities::DEFAULT_ORDER,
            mc: MonteCarloConfig::default(),
            ball_radius: 1.0,
            start: None,
            points: 3,
            n_max: 5,
            threads: None,
            output_dir: PathBuf::from("geoharnack-out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| bad(format!("cannot parse config {}: {e}", path.display())))
    }

    pub fn target(&self) -> &str {
        self.target.as_deref().unwrap_or(self.operation.targets()[0])
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.operation.targets().contains(&self.target()) {
            return Err(bad(format!(
                "operation {} has no target {:?}; expected one of {:?}",
                self.operation.name(),
                self.target(),
                self.operation.targets()
            )));
        }
        self.family.exponent().map_err(|e| bad(format!("family: {e}")))?;
        if !(1..=3).contains(&self.d) {
            return Err(bad(format!("d must lie in 1..=3, got {}", self.d)));
        }
        self.lambda_grid.validate("lambda_grid")?;
        self.t_grid.validate("t_grid")?;
        self.r_grid.validate("r_grid")?;
        if self.radii.is_empty() || self.radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
            return Err(bad("radii must be a non-empty list in (0, 1)"));
        }
        let positive = [("tolerance", self.tolerance), ("mc.dt_scale", self.mc.dt_scale), ("ball_radius", self.ball_radius)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(format!("{name} must be positive, got {v}")));
            }
        }
        if self.mc.dt_scale >= 1.0 {
            return Err(bad("mc.dt_scale must be below 1"));
        }
        if self.mc.n < 2 || self.order == 0 || self.n_max == 0 {
            return Err(bad("mc.n must be at least 2; order and n_max must be positive"));
        }
        if let Some(s) = &self.start {
            if s.len() != self.d as usize {
                return Err(bad(format!("start has {} coordinates, expected {}", s.len(), self.d)));
            }
        }
        if self.threads == Some(0) {
            return Err(bad("threads must be positive"));
        }
        Ok(())
    }
}

/// Flags shared by every subcommand; each overrides the matching config field.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON run configuration; flags take precedence over its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub mass: Option<f64>,
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    #[arg(long, global = true)]
    pub d: Option<u32>,
    /// Single radius; replaces the radius grid.
    #[arg(long, global = true)]
    pub r: Option<f64>,
    #[arg(long, global = true)]
    pub r_lo: Option<f64>,
    #[arg(long, global = true)]
    pub r_hi: Option<f64>,
    #[arg(long, global = true)]
    pub t_lo: Option<f64>,
    #[arg(long, global = true)]
    pub t_hi: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Paths per Monte Carlo cell.
    #[arg(long, short = 'n', global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub dt_scale: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub ball_radius: Option<f64>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub start: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[arg(long, global = true)]
    pub n_max: Option<u32>,
    /// Worker threads; defaults to all cores.
    #[arg(long, short = 'j', global = true)]
    pub threads: Option<usize>,
    #[arg(long, short = 'o', global = true)]
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, c: &mut RunConfig) {
        macro_rules! set {
            ($flag:expr => $field:expr) => {
                if let Some(v) = $flag.clone() {
                    $field = v;
                }
            };
        }
        set!(self.family => c.family.name);
        set!(self.alpha => c.family.alpha);
        set!(self.mass => c.family.mass);
        set!(self.depth => c.family.depth);
        set!(self.d => c.d);
        set!(self.r_lo => c.r_grid.lo);
        set!(self.r_hi => c.r_grid.hi);
        if let Some(r) = self.r {
            c.r_grid.lo = r;
            c.r_grid.hi = r;
        }
        set!(self.t_lo => c.t_grid.lo);
        set!(self.t_hi => c.t_grid.hi);
        set!(self.radii => c.radii);
        set!(self.tolerance => c.tolerance);
        set!(self.order => c.order);
        set!(self.n => c.mc.n);
        set!(self.dt_scale => c.mc.dt_scale);
        set!(self.seed => c.mc.seed);
        set!(self.ball_radius => c.ball_radius);
        if let Some(s) = &self.start {
            c.start = Some(s.clone());
        }
        set!(self.points => c.points);
        set!(self.n_max => c.n_max);
        if let Some(t) = self.threads {
            c.threads = Some(t);
        }
        set!(self.out => c.output_dir);
    }
}
