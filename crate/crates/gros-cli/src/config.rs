//! Experiment configuration: paper defaults, flat key=value config files,
//! and command-line overrides, applied in that order.

use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    CoreCheck,
    Kmeans,
    Bandits,
    Regression,
    Sets,
    Tda,
}

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Experiment::CoreCheck => "core-check",
            Experiment::Kmeans => "kmeans",
            Experiment::Bandits => "bandits",
            Experiment::Regression => "regression",
            Experiment::Sets => "sets",
            Experiment::Tda => "tda",
        }
    }
}

/// A configuration problem; reported as a usage error (exit code 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Full parameter set for one run. Fields not used by the selected
/// experiment are ignored. Defaults follow the simulation scenarios.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub replicates: usize,
    pub seed: u64,
    pub parallelism: usize,
    pub k_groups: usize,
    pub delta: f64,
    pub lambda: f64,
    pub horizon: usize,
    pub warmup: usize,
    pub bandwidth: f64,
    pub sigma: f64,
    pub xi: f64,
    pub threshold: f64,
    pub sample_size: usize,
    pub clusters: usize,
    pub nu: f64,
    pub kappa: f64,
    pub arm_means: Vec<f64>,
    pub reward_df: f64,
    pub shift: f64,
    pub grid_nodes: usize,
}

impl RunConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let mut cfg = Self {
            experiment,
            replicates: 100,
            seed: 0,
            parallelism: 1,
            k_groups: 10,
            delta: 0.05,
            lambda: 0.01,
            horizon: 750,
            warmup: 40,
            bandwidth: 0.2,
            sigma: 9.0,
            xi: 1.0,
            threshold: 2.2,
            sample_size: 1000,
            clusters: 3,
            nu: 3.0,
            kappa: 0.0,
            arm_means: vec![7.0, 8.0],
            reward_df: 3.0,
            shift: 5.0,
            grid_nodes: 501,
        };
        match experiment {
            Experiment::CoreCheck => cfg.sample_size = 2400,
            Experiment::Kmeans => cfg.k_groups = 10,
            Experiment::Bandits => {}
            Experiment::Regression => cfg.k_groups = 12,
            Experiment::Sets => {
                cfg.sample_size = 2000;
                cfg.k_groups = 20;
            }
            Experiment::Tda => cfg.k_groups = 6,
        }
        cfg
    }

    /// Applies one `key=value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value
                .parse()
                .map_err(|_| ConfigError(format!("invalid value `{value}` for `{key}`")))
        }
        match key {
            "replicates" => self.replicates = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "parallelism" => self.parallelism = parse(key, value)?,
            "k-groups" => self.k_groups = parse(key, value)?,
            "delta" => self.delta = parse(key, value)?,
            "lambda" => self.lambda = parse(key, value)?,
            "horizon" => self.horizon = parse(key, value)?,
            "warmup" => self.warmup = parse(key, value)?,
            "bandwidth" => self.bandwidth = parse(key, value)?,
            "sigma" => self.sigma = parse(key, value)?,
            "xi" => self.xi = parse(key, value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "n" => self.sample_size = parse(key, value)?,
            "clusters" => self.clusters = parse(key, value)?,
            "nu" => self.nu = parse(key, value)?,
            "kappa" => self.kappa = parse(key, value)?,
            "df" => self.reward_df = parse(key, value)?,
            "shift" => self.shift = parse(key, value)?,
            "grid-nodes" => self.grid_nodes = parse(key, value)?,
            "arm-means" => {
                self.arm_means = value
                    .split(',')
                    .map(|v| parse("arm-means", v.trim()))
                    .collect::<Result<_, _>>()?;
            }
            other => return Err(ConfigError(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Loads `key = value` lines; `#` starts a comment.
    pub fn load_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError(format!(
                    "{}:{}: expected key=value, got `{line}`",
                    path.display(),
                    lineno + 1
                )));
            };
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: &str| Err(ConfigError(msg.to_string()));
        if self.replicates < 1 {
            return fail("replicates must be >= 1");
        }
        if self.parallelism < 1 {
            return fail("parallelism must be >= 1");
        }
        if self.k_groups < 1 {
            return fail("k-groups must be >= 1");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail("delta must lie in (0, 1)");
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return fail("lambda must lie in [0, 1]");
        }
        if self.bandwidth <= 0.0 {
            return fail("bandwidth must be positive");
        }
        if self.sigma <= 0.0 {
            return fail("sigma must be positive");
        }
        if self.xi <= 0.0 {
            return fail("xi must be positive");
        }
        if self.threshold <= 0.0 {
            return fail("threshold must be positive");
        }
        if self.sample_size == 0 {
            return fail("n must be >= 1");
        }
        if self.grid_nodes < 2 {
            return fail("grid-nodes must be >= 2");
        }
        if self.experiment == Experiment::Bandits {
            if self.arm_means.len() < 2 {
                return fail("arm-means needs at least two arms");
            }
            if self.warmup < self.arm_means.len() || self.horizon < self.warmup {
                return fail("need horizon >= warmup >= number of arms");
            }
        }
        if self.experiment == Experiment::Kmeans && self.clusters > 6 {
            return fail("clusters above 6 are unsupported (permutation matching)");
        }
        Ok(())
    }
}
