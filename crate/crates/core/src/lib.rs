//! Work-loop analysis and elastic-bound optimality for parallel- and series-elastic actuators.
//!
//! A prescribed periodic motion x(t) and an inelastic dynamics model give the
//! load G(t) an actuator must supply. Parallel elasticities F_s(x) reshape the
//! actuator load; series elasticities reshape the actuator motion. This crate
//! builds the work loops, evaluates power metrics, checks whether an elasticity
//! removes all negative actuator power, and constructs families that do.

pub mod error;
pub mod export;
pub mod models;
pub mod numeric;
pub mod pea_design;
pub mod plot;
pub mod power;
pub mod sea_design;
pub mod signal;
pub mod verify;
pub mod workloop;

pub use error::{Error, Result};
pub use models::{
    inelastic_load, is_symmetric, make_waveform, DynamicsModel, PeriodicWaveform, WaveformKind,
};
pub use pea_design::{
    check_elastic_bound, BoundReport, ElasticProfile, Equilibrium, Regime, Representation, Stability,
};
pub use power::{metrics_pea_loop, metrics_time, Penalty, PowerReport};
pub use sea_design::{check_sea_bound, ComplianceKind, ComplianceProfile, SeaBoundReport, SignClass};
pub use signal::{DisplacementWaveform, LoadWaveform, Signal, VelocityWaveform};
pub use verify::{SuiteReport, Trajectory};
pub use workloop::{
    build_pea_loop, build_sea_loop, check_admissible_pea, sea_accessibility, AccessibilityReport,
    AdmissibilityReport, PeaLoop, SeaLoop, Side,
};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeExamples;
