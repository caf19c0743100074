//! Job configuration: a versioned JSON document.

use anyhow::{bail, Context, Result};
use elastic_bounds::power::{DEFAULT_DUTY_EPS, Q_MUSCLE_A, Q_MUSCLE_B};
use elastic_bounds::{Side, WaveformKind};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SCHEMA: u32 = 1;

/// Raised for anything wrong with the configuration itself (exit code 3).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub schema: u32,
    pub system: SystemConfig,
    pub kinematics: KinematicsConfig,
    #[serde(default)]
    pub design: Option<DesignConfig>,
    #[serde(default)]
    pub metrics: MetricsConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actuation {
    Pea,
    Sea,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub actuation: Actuation,
    pub m: f64,
    pub c: f64,
    #[serde(default)]
    pub c_q: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KinematicsConfig {
    #[serde(default = "default_kind")]
    pub kind: WaveformKind,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default)]
    pub smoothing: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Two-column (t, x) samples; required for the tabulated kind.
    #[serde(default)]
    pub csv: Option<PathBuf>,
}

fn default_kind() -> WaveformKind {
    WaveformKind::Harmonic
}
fn one() -> f64 {
    1.0
}
fn default_n() -> usize {
    2048
}

/// Elasticity to build. Parallel families: zero, linear, polynomial, freeplay,
/// bistable, one-way, destabilizing, tabulated. Series: linear, dwell, blend,
/// rigid, tabulated.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DesignConfig {
    Zero,
    /// Parallel stiffness `k` (default: centre of the admissible range) or series `k1` (default: optimal).
    Linear {
        #[serde(default)]
        k: Option<f64>,
    },
    Polynomial {
        degree: u32,
        /// Omitted: largest admissible blend.
        #[serde(default)]
        blend: Option<f64>,
        #[serde(default)]
        k: Option<f64>,
    },
    Freeplay {
        delta: f64,
        /// Omitted: stiffness matched to the gap.
        #[serde(default)]
        k: Option<f64>,
    },
    Bistable {
        delta: f64,
        #[serde(default = "default_width")]
        width: f64,
    },
    OneWay {
        side: Side,
    },
    Destabilizing {
        a: f64,
    },
    Dwell {
        side: Side,
    },
    Blend {
        lambda: f64,
    },
    Rigid,
    Tabulated {
        path: PathBuf,
    },
}

fn default_width() -> f64 {
    0.02
}

impl DesignConfig {
    pub fn name(&self) -> &'static str {
        match self {
            DesignConfig::Zero => "zero",
            DesignConfig::Linear { .. } => "linear",
            DesignConfig::Polynomial { .. } => "polynomial",
            DesignConfig::Freeplay { .. } => "freeplay",
            DesignConfig::Bistable { .. } => "bistable",
            DesignConfig::OneWay { .. } => "one-way",
            DesignConfig::Destabilizing { .. } => "destabilizing",
            DesignConfig::Dwell { .. } => "dwell",
            DesignConfig::Blend { .. } => "blend",
            DesignConfig::Rigid => "rigid",
            DesignConfig::Tabulated { .. } => "tabulated",
        }
    }

    fn allowed(&self, a: Actuation) -> bool {
        use DesignConfig::*;
        match a {
            Actuation::Pea => matches!(
                self,
                Zero | Linear { .. } | Polynomial { .. } | Freeplay { .. } | Bistable { .. } | OneWay { .. } | Destabilizing { .. } | Tabulated { .. }
            ),
            Actuation::Sea => matches!(self, Linear { .. } | Dwell { .. } | Blend { .. } | Rigid | Tabulated { .. }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    /// Negative-work penalties to report.
    #[serde(default = "default_q")]
    pub q: Vec<f64>,
    /// Duty-cycle threshold relative to peak |F|.
    #[serde(default = "default_eps")]
    pub eps_rel: f64,
}

fn default_q() -> Vec<f64> {
    vec![0.0, 1.0, 2.0, Q_MUSCLE_A, Q_MUSCLE_B]
}
fn default_eps() -> f64 {
    DEFAULT_DUTY_EPS
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self { q: default_q(), eps_rel: default_eps() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json, Format::Svg]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: default_dir(), formats: default_formats() }
    }
}

/// Frequency scan of a harmonic motion through a fixed linear series spring.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub k1: f64,
    /// Scan range as multiples of ω₀ = √(k1/m).
    #[serde(default = "default_lo")]
    pub lo: f64,
    #[serde(default = "default_hi")]
    pub hi: f64,
    #[serde(default = "default_rows")]
    pub rows: usize,
}

fn default_lo() -> f64 {
    0.3
}
fn default_hi() -> f64 {
    1.2
}
fn default_rows() -> usize {
    37
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: JobConfig =
            serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        // relative data paths resolve against the config file
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(p) = cfg.kinematics.csv.as_mut() {
            *p = base.join(&p);
        }
        if let Some(DesignConfig::Tabulated { path }) = cfg.design.as_mut() {
            *path = base.join(&path);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            bail!(config_err(format!("unsupported schema {} (expected {SCHEMA})", self.schema)));
        }
        let s = &self.system;
        for (name, v) in [("m", s.m), ("c", s.c), ("c_q", s.c_q)] {
            if !(v.is_finite() && v >= 0.0) {
                bail!(config_err(format!("system.{name} must be finite and non-negative, got {v}")));
            }
        }
        let k = &self.kinematics;
        if (k.kind == WaveformKind::Tabulated) != k.csv.is_some() {
            bail!(config_err("kinematics.csv is required for, and only for, kind \"tabulated\""));
        }
        if let Some(p) = &k.csv {
            exists(p)?;
        }
        if k.n < 16 {
            bail!(config_err(format!("kinematics.n must be at least 16, got {}", k.n)));
        }
        if let Some(d) = &self.design {
            if !d.allowed(s.actuation) {
                bail!(config_err(format!("design family \"{}\" is not available for {:?}", d.name(), s.actuation)));
            }
            self.validate_design(d)?;
        }
        if self.metrics.q.is_empty() || self.metrics.q.iter().any(|q| !(q.is_finite() && *q >= 0.0)) {
            bail!(config_err("metrics.q must be a non-empty list of finite non-negative penalties"));
        }
        if !(self.metrics.eps_rel > 0.0 && self.metrics.eps_rel <= 0.1) {
            bail!(config_err(format!("metrics.eps_rel must lie in (0, 0.1], got {}", self.metrics.eps_rel)));
        }
        if let Some(sw) = &self.sweep {
            if !(sw.k1 > 0.0 && sw.lo > 0.0 && sw.hi > sw.lo && sw.rows >= 3) {
                bail!(config_err("sweep needs k1 > 0, 0 < lo < hi and rows ≥ 3"));
            }
        }
        Ok(())
    }

    fn validate_design(&self, d: &DesignConfig) -> Result<()> {
        let positive = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config_err(format!("design.{name} must be positive, got {v}")))
            }
        };
        match d {
            DesignConfig::Linear { k: Some(k) } => positive("k", *k)?,
            DesignConfig::Polynomial { degree, blend, k } => {
                if *degree < 2 {
                    bail!(config_err(format!("design.degree must be at least 2, got {degree}")));
                }
                if let Some(b) = blend {
                    if !(0.0..=1.0).contains(b) {
                        bail!(config_err(format!("design.blend must lie in [0, 1], got {b}")));
                    }
                }
                if let Some(k) = k {
                    positive("k", *k)?;
                }
            }
            DesignConfig::Freeplay { delta, k } => {
                positive("delta", *delta)?;
                if let Some(k) = k {
                    positive("k", *k)?;
                }
            }
            DesignConfig::Bistable { delta, width } => {
                positive("delta", *delta)?;
                positive("width", *width)?;
            }
            DesignConfig::Blend { lambda } if !(0.0..=1.0).contains(lambda) => {
                bail!(config_err(format!("design.lambda must lie in [0, 1], got {lambda}")))
            }
            DesignConfig::Tabulated { path } => exists(path)?,
            _ => {}
        }
        Ok(())
    }
}

fn exists(p: &Path) -> Result<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(config_err(format!("referenced file {} does not exist", p.display()))).context("validating config")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<JobConfig> {
        let c: JobConfig = serde_json::from_str(s).map_err(|e| config_err(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    const MIN: &str = r#"{"schema":1,"system":{"actuation":"pea","m":1,"c":1},"kinematics":{}}"#;

    #[test]
    fn defaults_fill_in() {
        let c = parse(MIN).unwrap();
        assert_eq!(c.kinematics.n, 2048);
        assert_eq!(c.kinematics.kind, WaveformKind::Harmonic);
        assert_eq!(c.metrics.q.len(), 5);
        assert_eq!(c.output.formats.len(), 3);
    }

    #[test]
    fn unknown_fields_and_schema_rejected() {
        assert!(parse(r#"{"schema":1,"system":{"actuation":"pea","m":1,"c":1,"k":2},"kinematics":{}}"#).is_err());
        assert!(parse(&MIN.replace("\"schema\":1", "\"schema\":2")).is_err());
        assert!(parse(&MIN.replace("}}", "}, \"extra\": 0}")).is_err());
    }

    #[test]
    fn design_family_checked_against_actuation() {
        let dwell = MIN.replace("\"kinematics\":{}", "\"kinematics\":{},\"design\":{\"family\":\"dwell\",\"side\":\"upper\"}");
        let e = parse(&dwell).unwrap_err();
        assert!(e.downcast_ref::<ConfigError>().is_some());
        let sea = dwell.replace("pea", "sea");
        assert!(parse(&sea).is_ok());
        let bad = MIN.replace("\"kinematics\":{}", "\"kinematics\":{},\"design\":{\"family\":\"bistable\",\"delta\":-1}");
        assert!(parse(&bad).is_err());
    }

    #[test]
    fn tabulated_needs_existing_csv() {
        let t = MIN.replace("\"kinematics\":{}", "\"kinematics\":{\"kind\":\"tabulated\",\"csv\":\"/nonexistent.csv\"}");
        assert!(parse(&t).is_err());
        let h = MIN.replace("\"kinematics\":{}", "\"kinematics\":{\"csv\":\"x.csv\"}");
        assert!(parse(&h).is_err());
    }
}
