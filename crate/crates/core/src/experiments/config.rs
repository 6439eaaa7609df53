use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::models::{make_profile, ModelKind};

/// Recovery algorithm run by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
pub enum Algo {
    A,
    #[serde(rename = "A-noisy")]
    ANoisy,
    B,
    C,
    D,
    #[serde(rename = "D-cs")]
    DCs,
    #[serde(rename = "D-noisy")]
    DNoisy,
}

impl Algo {
    pub const ALL: [Algo; 7] = [
        Algo::A,
        Algo::ANoisy,
        Algo::B,
        Algo::C,
        Algo::D,
        Algo::DCs,
        Algo::DNoisy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algo::A => "A",
            Algo::ANoisy => "A-noisy",
            Algo::B => "B",
            Algo::C => "C",
            Algo::D => "D",
            Algo::DCs => "D-cs",
            Algo::DNoisy => "D-noisy",
        }
    }

    pub fn model_kind(self) -> ModelKind {
        match self {
            Algo::A | Algo::B => ModelKind::RidgeCube,
            Algo::ANoisy | Algo::C => ModelKind::RidgeBall,
            Algo::D | Algo::DCs | Algo::DNoisy => ModelKind::RadialBall,
        }
    }

    /// Whether the algorithm takes a measurement count.
    pub fn uses_measurements(self) -> bool {
        matches!(self, Algo::B | Algo::C | Algo::DCs | Algo::DNoisy)
    }

    pub fn accepts_noise(self) -> bool {
        matches!(self, Algo::ANoisy | Algo::C | Algo::DNoisy)
    }

    /// Largest step keeping every difference query in the domain.
    pub fn max_step(self, d: usize, m: usize, exterior: bool) -> f64 {
        let (d, m) = (d as f64, m as f64);
        match self {
            Algo::A | Algo::ANoisy => 1.0,
            Algo::B => m.sqrt(),
            Algo::C if exterior => m.sqrt(),
            Algo::C => (m / d).sqrt(),
            Algo::D => 2.0,
            Algo::DCs | Algo::DNoisy if exterior => 2.0 * m.sqrt(),
            Algo::DCs | Algo::DNoisy => 2.0 * (m / d).sqrt(),
        }
    }

    /// `ℓ1` error for the cube algorithms, `ℓ2` otherwise.
    pub fn uses_l1_error(self) -> bool {
        self.model_kind() == ModelKind::RidgeCube
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm '{s}'")))
    }
}

fn default_sigma() -> Vec<f64> {
    vec![0.0]
}
fn default_trials() -> usize {
    120
}
fn default_sup_points() -> usize {
    256
}
fn default_table_size() -> usize {
    crate::recovery::DEFAULT_TABLE_SIZE
}
fn default_probes() -> usize {
    10
}
fn default_tol() -> f64 {
    1e-8
}
fn default_threshold() -> f64 {
    1e-2
}

/// A Monte-Carlo experiment over a product grid `d × m × h × σ`.
///
/// Parsed from TOML with the keys below; grid keys take lists.
///
/// ```toml
/// algo = "C"
/// profile = "tanh-shift"
/// d = [300]
/// m = [120]
/// s = 5
/// h = [0.1, 0.3, 1.0]
/// sigma = [0.01]
/// trials = 40
/// master_seed = 7
/// allow_exterior = true
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algo: Algo,
    pub profile: String,
    #[serde(rename = "d")]
    pub dims: Vec<usize>,
    /// Measurement counts. Must be empty for `A`, `A-noisy` and `D`, which
    /// record `m = d`.
    #[serde(rename = "m", default)]
    pub measurements: Vec<usize>,
    /// Nonzeros of the direction; dense when absent.
    #[serde(rename = "s", default)]
    pub sparsity: Option<usize>,
    #[serde(rename = "h")]
    pub steps: Vec<f64>,
    #[serde(rename = "sigma", default = "default_sigma")]
    pub sigmas: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub master_seed: u64,
    /// Random points for the sup-error estimate; zero skips it.
    #[serde(default = "default_sup_points")]
    pub sup_error_points: usize,
    /// Accept queries in the cube circumscribing the ball.
    #[serde(default)]
    pub allow_exterior: bool,
    #[serde(default = "default_table_size")]
    pub table_size: usize,
    #[serde(default = "default_probes")]
    pub sign_probes: usize,
    #[serde(default = "default_tol")]
    pub solver_tol: f64,
    /// `R ≥ ‖a‖₁` for `D-cs`; defaults to `√s`, exact for unit `ℓ2` vectors
    /// with `s` nonzeros.
    #[serde(default)]
    pub radius: Option<f64>,
    /// Overrides the constraint radius of `D-cs`.
    #[serde(default)]
    pub eta: Option<f64>,
    /// Error level counted as success in the summary.
    #[serde(default = "default_threshold")]
    pub success_threshold: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl ExperimentConfig {
    /// A config with one value per grid and library defaults elsewhere.
    pub fn single(algo: Algo, profile: &str, d: usize, h: f64, master_seed: u64) -> Self {
        ExperimentConfig {
            algo,
            profile: profile.to_string(),
            dims: vec![d],
            measurements: Vec::new(),
            sparsity: None,
            steps: vec![h],
            sigmas: default_sigma(),
            trials: default_trials(),
            master_seed,
            sup_error_points: default_sup_points(),
            allow_exterior: false,
            table_size: default_table_size(),
            sign_probes: default_probes(),
            solver_tol: default_tol(),
            radius: None,
            eta: None,
            success_threshold: default_threshold(),
            output: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        make_profile(&self.profile).map_err(|e| Error::Config(e.to_string()))?;
        if self.dims.is_empty() || self.steps.is_empty() || self.sigmas.is_empty() {
            return config_err("d, h and sigma grids must be nonempty");
        }
        if self.dims.contains(&0) {
            return config_err("dimensions must be positive");
        }
        if self.algo.uses_measurements() {
            if self.measurements.is_empty() {
                return config_err(format!("algorithm {} needs a nonempty m grid", self.algo));
            }
            if self.measurements.contains(&0) {
                return config_err("measurement counts must be positive");
            }
        } else if !self.measurements.is_empty() {
            return config_err(format!("algorithm {} takes no m grid", self.algo));
        }
        if let Some(s) = self.sparsity {
            if s == 0 {
                return config_err("sparsity must be positive");
            }
        }
        if self.steps.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return config_err("steps must be positive and finite");
        }
        if self.sigmas.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return config_err("noise levels must be non-negative and finite");
        }
        if !self.algo.accepts_noise() && self.sigmas.iter().any(|s| *s != 0.0) {
            return config_err(format!(
                "algorithm {} assumes exact values; sigma must be 0",
                self.algo
            ));
        }
        if self.trials == 0 {
            return config_err("trials must be at least 1");
        }
        if self.table_size < 2 {
            return config_err("table_size must be at least 2");
        }
        if !(self.solver_tol > 0.0 && self.solver_tol < 1.0) {
            return config_err("solver_tol must lie in (0, 1)");
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return config_err("radius must be positive and finite");
            }
        }
        if let Some(e) = self.eta {
            if !(e >= 0.0 && e.is_finite()) {
                return config_err("eta must be non-negative and finite");
            }
        }
        if !(self.success_threshold >= 0.0) {
            return config_err("success_threshold must be non-negative");
        }
        Ok(())
    }

    /// Checks every grid point against the algorithm's step, measurement and
    /// sparsity limits. [`super::run_grid`] does not require this and records
    /// failing points as `NaN` instead.
    pub fn check_grid(&self) -> Result<()> {
        self.validate()?;
        for &d in &self.dims {
            if let Some(s) = self.sparsity.filter(|s| *s > d) {
                return config_err(format!("sparsity {s} exceeds dimension {d}"));
            }
            for m in self.measurements_for(d) {
                if m > d {
                    return config_err(format!("m = {m} exceeds d = {d}"));
                }
                let max = self.algo.max_step(d, m, self.allow_exterior);
                if let Some(h) = self
                    .steps
                    .iter()
                    .find(|h| **h > max * (1.0 + crate::models::DOMAIN_TOL))
                {
                    return config_err(format!(
                        "h = {h} exceeds {max:.6} for algorithm {} with d = {d}, m = {m}",
                        self.algo
                    ));
                }
            }
        }
        Ok(())
    }

    /// Measurement counts for dimension `d`: the configured grid, or `[d]`
    /// for algorithms without measurements.
    pub fn measurements_for(&self, d: usize) -> Vec<usize> {
        if self.algo.uses_measurements() {
            self.measurements.clone()
        } else {
            vec![d]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_toml_str(
            "algo = \"B\"\nprofile = \"tanh-shift\"\nd = [50, 100]\nm = [10]\ns = 5\nh = [0.1]\nmaster_seed = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.algo, Algo::B);
        assert_eq!(cfg.trials, 120);
        assert_eq!(cfg.sigmas, vec![0.0]);
        assert_eq!(cfg.sparsity, Some(5));
    }

    #[test]
    fn rejects_bad_configs() {
        let base = "profile = \"tanh\"\nd = [10]\nh = [0.1]\nmaster_seed = 1\n";
        for extra in [
            "algo = \"A\"\nm = [5]\n",
            "algo = \"B\"\n",
            "algo = \"A\"\nsigma = [0.1]\n",
            "algo = \"A\"\ntrials = 0\n",
            "algo = \"Z\"\n",
            "algo = \"A\"\nunknown = 1\n",
        ] {
            let err = ExperimentConfig::from_toml_str(&format!("{base}{extra}")).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{extra}: {err}");
        }
    }

    #[test]
    fn grid_limits() {
        let mut cfg = ExperimentConfig::single(Algo::C, "tanh", 100, 0.6, 0);
        cfg.measurements = vec![25];
        assert!(cfg.check_grid().is_err());
        cfg.allow_exterior = true;
        cfg.check_grid().unwrap();
        cfg.measurements = vec![200];
        assert!(cfg.check_grid().is_err());
    }

    #[test]
    fn algo_names_round_trip() {
        for a in Algo::ALL {
            assert_eq!(a.as_str().parse::<Algo>().unwrap(), a);
        }
    }
}
