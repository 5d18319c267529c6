//! Run configuration read from TOML.

use serde::{Deserialize, Serialize};

use crate::operators::OperatorKind;
use crate::thresholds::ThresholdFamily;
use crate::verify::SuiteConfig;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// `count` values of `θ` from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Default for ThetaGrid {
    fn default() -> Self {
        Self {
            min: 1.0,
            max: 1.0,
            count: 1,
            spacing: Spacing::Linear,
        }
    }
}

impl ThetaGrid {
    /// Parses `min:max:count[:log]`.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let bad = || {
            CliError::Config(format!(
                "--theta-grid expects min:max:count[:log|:linear], got {s:?}"
            ))
        };
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let min = parts[0].trim().parse().map_err(|_| bad())?;
        let max = parts[1].trim().parse().map_err(|_| bad())?;
        let count = parts[2].trim().parse().map_err(|_| bad())?;
        let spacing = match parts.get(3).map(|p| p.trim()) {
            None | Some("linear") | Some("lin") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(_) => return Err(bad()),
        };
        let grid = Self {
            min,
            max,
            count,
            spacing,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.min > 0.0 && self.min.is_finite()) {
            return Err(CliError::Config(format!(
                "theta grid min must be > 0, got {}",
                self.min
            )));
        }
        if !(self.max >= self.min && self.max.is_finite()) {
            return Err(CliError::Config(format!(
                "theta grid max {} must be finite and >= min {}",
                self.max, self.min
            )));
        }
        if self.count == 0 {
            return Err(CliError::Config("theta grid count must be >= 1".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|j| {
                let t = j as f64 / last;
                if j + 1 == self.count {
                    self.max
                } else {
                    match self.spacing {
                        Spacing::Linear => self.min + (self.max - self.min) * t,
                        Spacing::Log => self.min * (self.max / self.min).powf(t),
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    #[default]
    Power,
    DecreasingLinear,
}

/// One named index: an operator against a threshold family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexDef {
    pub name: String,
    pub operator: OperatorKind,
    #[serde(default)]
    pub family: FamilyKind,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub shift: Option<f64>,
    #[serde(default)]
    pub ceiling: Option<f64>,
}

impl IndexDef {
    pub fn new(name: &str, operator: OperatorKind, p: f64) -> Self {
        Self {
            name: name.to_string(),
            operator,
            family: FamilyKind::Power,
            p: Some(p),
            shift: None,
            ceiling: None,
        }
    }

    pub fn threshold(&self) -> Result<ThresholdFamily<f64>, CliError> {
        let fam = match self.family {
            FamilyKind::Power => {
                if self.ceiling.is_some() {
                    return Err(self.err("power family takes p and shift, not ceiling"));
                }
                ThresholdFamily::power(self.p.unwrap_or(1.0), self.shift.unwrap_or(0.0))
            }
            FamilyKind::DecreasingLinear => {
                if self.p.is_some() || self.shift.is_some() {
                    return Err(self.err("decreasing_linear family takes ceiling, not p or shift"));
                }
                let c = self
                    .ceiling
                    .ok_or_else(|| self.err("decreasing_linear needs a ceiling"))?;
                ThresholdFamily::decreasing_linear(c)
            }
        };
        fam.map_err(|e| self.err(&e.to_string()))
    }

    fn err(&self, msg: &str) -> CliError {
        CliError::Config(format!("index {:?}: {msg}", self.name))
    }
}

/// Verification settings; unset fields take the suite defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub trials: Option<usize>,
    pub schedule_len: Option<usize>,
    pub convergence_n: Option<usize>,
    #[serde(default)]
    pub include_reversal_in_impact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_scan")]
    pub scan_points: usize,
    #[serde(default)]
    pub theta_grid: ThetaGrid,
    #[serde(default = "default_indices")]
    pub index: Vec<IndexDef>,
    #[serde(default)]
    pub verify: VerifySection,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_scan() -> usize {
    1024
}

fn default_indices() -> Vec<IndexDef> {
    vec![
        IndexDef::new("h", OperatorKind::Identity, 1.0),
        IndexDef::new("g", OperatorKind::Averaging, 1.0),
    ]
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: default_tol(),
            scan_points: default_scan(),
            theta_grid: ThetaGrid::default(),
            index: default_indices(),
            verify: VerifySection::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.theta_grid.validate()?;
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.scan_points < 2 {
            return Err(CliError::Config(format!(
                "scan_points must be >= 2, got {}",
                self.scan_points
            )));
        }
        if self.index.is_empty() {
            return Err(CliError::Config(
                "at least one [[index]] is required".into(),
            ));
        }
        for def in &self.index {
            def.threshold()?;
        }
        Ok(())
    }

    pub fn suite(&self) -> SuiteConfig {
        let d = SuiteConfig::default();
        SuiteConfig {
            master_seed: self.seed,
            trials: self.verify.trials.unwrap_or(d.trials),
            abs_tol_x: self.tol.min(d.abs_tol_x),
            scan_points: self.scan_points,
            schedule_len: self.verify.schedule_len.unwrap_or(d.schedule_len),
            convergence_n: self.verify.convergence_n.unwrap_or(d.convergence_n),
            include_reversal_in_impact: self.verify.include_reversal_in_impact,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = RunConfig::from_toml(
            r#"
seed = 7
tol = 1e-11
[theta_grid]
min = 0.5
max = 2
count = 3
[[index]]
name = "gk"
operator = "averaging"
p = 2.0
[[index]]
name = "rev"
operator = "identity"
family = "decreasing_linear"
ceiling = 40.0
[verify]
trials = 3
include_reversal_in_impact = true
"#,
        )
        .unwrap();
        assert_eq!(cfg.theta_grid.values(), vec![0.5, 1.25, 2.0]);
        assert_eq!(
            cfg.index[1].threshold().unwrap(),
            ThresholdFamily::DecreasingLinear { ceiling: 40.0 }
        );
        let s = cfg.suite();
        assert_eq!(
            (s.trials, s.master_seed, s.include_reversal_in_impact),
            (3, 7, true)
        );
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(RunConfig::from_toml("tol = -1").is_err());
        assert!(RunConfig::from_toml("[theta_grid]\nmin = 0\nmax = 1\ncount = 2").is_err());
        assert!(RunConfig::from_toml("bogus = 1").is_err());
        assert!(RunConfig::from_toml(
            "[[index]]\nname='x'\noperator='identity'\nfamily='decreasing_linear'"
        )
        .is_err());
    }

    #[test]
    fn theta_grid_flag() {
        let g = ThetaGrid::parse("1:100:3:log").unwrap();
        let v = g.values();
        assert_eq!(v[0], 1.0);
        assert!((v[1] - 10.0).abs() < 1e-12);
        assert_eq!(v[2], 100.0);
        assert!(ThetaGrid::parse("0:1:3").is_err());
        assert!(ThetaGrid::parse("1:2").is_err());
        assert!(ThetaGrid::parse("1:2:0").is_err());
    }
}
