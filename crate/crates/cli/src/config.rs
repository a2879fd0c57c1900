use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use adlab::{DrivePath, NoiseSpec, PathShape, PhaseProfile, ProfileShape, ProtocolParams};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Transfer,
    Revivals,
    Ncycle,
    Optimize,
    PhaseGate,
    Validate,
    OracleCompare,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

/// Path shape and phase profile; the drive amplitude is always `2G`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    pub shape: PathShape,
    #[serde(default)]
    pub phase: PhaseProfile,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self { shape: PathShape::Circular { loops: 1 }, phase: PhaseProfile::Zero }
    }
}

/// `points` values from `start` to `stop`, evenly or logarithmically spaced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub log: bool,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let u = k as f64 / last;
                if self.log {
                    (self.start.ln() + u * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + u * (self.stop - self.start)
                }
            })
            .collect()
    }

    fn validate(&self, name: &str) -> Result<(), CliError> {
        let ok = self.points >= 1
            && self.start.is_finite()
            && self.stop.is_finite()
            && self.start > 0.0
            && self.stop >= self.start;
        if !ok {
            return Err(CliError::Config(format!("{name}: need 0 < start ≤ stop and at least one point")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    /// Samples on `[0, t_f]` for traces.
    pub time_points: usize,
    /// Durations for `ncycle`.
    pub t_f: Sweep,
}

impl Default for Grids {
    fn default() -> Self {
        Self { time_points: 201, t_f: Sweep { start: 1e-6, stop: 1e-3, points: 60, log: true } }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub trials: usize,
    pub seed: u64,
    pub rtol: f64,
    pub grid_points: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { trials: 10_000, seed: 0x5eed, rtol: 1e-11, grid_points: 4097 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RevivalConfig {
    pub nu0: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl Default for RevivalConfig {
    fn default() -> Self {
        Self { nu0: vec![2.0 * PI, 6.0 * PI, 8.0 * PI], gamma: vec![0.0, 1.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NcycleConfig {
    pub loops: Vec<u32>,
}

impl Default for NcycleConfig {
    fn default() -> Self {
        Self { loops: vec![1, 2, 4] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    pub cutoff: usize,
    /// Circular path the optimum is compared against.
    pub compare_loops: u32,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self { cutoff: 2, compare_loops: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseGateConfig {
    pub target: f64,
    pub shape: ProfileShape,
}

impl Default for PhaseGateConfig {
    fn default() -> Self {
        Self { target: PI / 2.0, shape: ProfileShape::QuadraticRate }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    pub protocol: ProtocolParams,
    #[serde(default)]
    pub path: PathConfig,
    pub noise: NoiseSpec,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub revivals: RevivalConfig,
    #[serde(default)]
    pub ncycle: NcycleConfig,
    #[serde(default)]
    pub optimize: OptimizeConfig,
    #[serde(default)]
    pub phase_gate: PhaseGateConfig,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    #[cfg(test)]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    /// Fixes the scenario and applies command-line overrides.
    pub fn resolve(mut self, scenario: Scenario, overrides: &Overrides) -> Result<Self, CliError> {
        match self.scenario {
            Some(s) if s != scenario => {
                return Err(CliError::Config(format!("config is for scenario `{s}`, not `{scenario}`")));
            }
            _ => self.scenario = Some(scenario),
        }
        if let Some(out) = &overrides.out {
            self.output = out.clone();
        }
        if let Some(seed) = overrides.seed {
            self.oracle.seed = seed;
        }
        if let Some(trials) = overrides.trials {
            self.oracle.trials = trials;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let invalid = |what: &str, e: adlab::Error| CliError::Config(format!("{what}: {e}"));
        self.protocol.validate().map_err(|e| invalid("protocol", e))?;
        self.noise.validate().map_err(|e| invalid("noise", e))?;
        self.drive_path().map_err(|e| invalid("path", e))?;
        if self.grids.time_points < 2 {
            return Err(CliError::Config("grids.time_points must be at least 2".into()));
        }
        self.grids.t_f.validate("grids.t_f")?;
        if self.oracle.trials < 100 {
            return Err(CliError::Config("oracle.trials must be at least 100".into()));
        }
        if self.oracle.grid_points < 256 {
            return Err(CliError::Config("oracle.grid_points must be at least 256".into()));
        }
        if !(self.oracle.rtol >= 1e-12 && self.oracle.rtol < 1.0) {
            return Err(CliError::Config("oracle.rtol must lie in [1e-12, 1)".into()));
        }
        if self.ncycle.loops.is_empty() || self.ncycle.loops.contains(&0) {
            return Err(CliError::Config("ncycle.loops must be a non-empty list of positive counts".into()));
        }
        if self.optimize.cutoff == 0 || self.optimize.compare_loops == 0 {
            return Err(CliError::Config("optimize.cutoff and optimize.compare_loops must be positive".into()));
        }
        if !self.phase_gate.target.is_finite() {
            return Err(CliError::Config("phase_gate.target must be finite".into()));
        }
        let rates_ok = self.revivals.nu0.iter().chain(&self.revivals.gamma).all(|x| x.is_finite() && *x >= 0.0);
        if !rates_ok || self.revivals.nu0.is_empty() || self.revivals.gamma.is_empty() {
            return Err(CliError::Config("revivals.nu0 and revivals.gamma need non-negative entries".into()));
        }
        Ok(())
    }

    /// Configured path with amplitude `2G` and duration `t_f`.
    pub fn drive_path(&self) -> adlab::Result<DrivePath> {
        let p = &self.protocol;
        Ok(DrivePath::from_shape(self.path.shape.clone(), 2.0 * p.gap, p.t_f)?.with_phase(self.path.phase))
    }

    /// `time_points` evenly spaced samples on `[0, t_f]`.
    pub fn time_grid(&self) -> Vec<f64> {
        let t_f = self.protocol.t_f;
        let last = self.grids.time_points - 1;
        (0..=last).map(|k| if k == last { t_f } else { t_f * k as f64 / last as f64 }).collect()
    }
}
