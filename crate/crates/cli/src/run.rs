//! The four pipelines. Each returns a JSON-serializable report and whether its checks passed.

use crate::config::{Actuation, DesignConfig, JobConfig};
use crate::out::{Artifacts, Curve};
use anyhow::{anyhow, bail, Result};
use elastic_bounds::export;
use elastic_bounds::models::read_waveform_csv;
use elastic_bounds::pea_design::{
    actuator_load, bistable_family, destabilizing_profile, equilibria, freeplay, linear_stiffness_range,
    matched_freeplay_stiffness, max_admissible_blend_with_stiffness, one_way_drive, polynomial_family_with_stiffness,
    ProfileSummary,
};
use elastic_bounds::power::{duty_cycle, metrics_pea_loop, LoopPowerReport};
use elastic_bounds::sea_design::{
    actuator_displacement, blended_compliance, dwell_time_compliance, global_resonant_frequency, optimal_linear_compliance,
};
use elastic_bounds::verify::{sweep_frequency_sea, verify_pea_design, verify_sea_design, SweepResult};
use elastic_bounds::{
    build_pea_loop, build_sea_loop, check_admissible_pea, check_elastic_bound, check_sea_bound, inelastic_load,
    make_waveform, metrics_time, sea_accessibility, AccessibilityReport, AdmissibilityReport, BoundReport,
    ComplianceKind, ComplianceProfile, DynamicsModel, ElasticProfile, Error, LoadWaveform, PeaLoop, Penalty,
    PeriodicWaveform, PowerReport, SeaBoundReport, SeaLoop, SuiteReport, VelocityWaveform, WaveformKind,
};
use serde::Serialize;

/// Options shared by all commands, after merging the command line over the config.
pub struct RunOptions {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

pub struct Outcome {
    pub passed: bool,
    pub summary: String,
}

/// Inputs every pipeline needs.
struct System {
    d: DynamicsModel,
    w: PeriodicWaveform,
    load: LoadWaveform,
}

fn system(cfg: &JobConfig) -> Result<System> {
    let s = &cfg.system;
    let d = if s.m == 0.0 { DynamicsModel::dissipation_dominated(s.c, s.c_q)? } else { DynamicsModel::new(s.m, s.c, s.c_q)? };
    let k = &cfg.kinematics;
    let w = match (&k.csv, k.kind) {
        (Some(p), _) => read_waveform_csv(p)?,
        (None, kind) => make_waveform(kind, k.amplitude, k.omega, k.smoothing, k.n)?,
    };
    let load = inelastic_load(&d, &w);
    Ok(System { d, w, load })
}

#[derive(Serialize)]
struct Header<'a> {
    command: &'a str,
    config: &'a JobConfig,
    /// Reserved; no pipeline is stochastic.
    seed: Option<u64>,
    tolerance_override: Option<f64>,
}

#[derive(Serialize)]
struct QMetrics {
    q: f64,
    metrics: PowerReport,
}

fn metrics_for(cfg: &JobConfig, f: &LoadWaveform, v: &VelocityWaveform) -> Result<Vec<QMetrics>> {
    cfg.metrics
        .q
        .iter()
        .map(|&q| {
            let mut metrics = metrics_time(f, v, &Penalty::Constant(q))?;
            metrics.duty_cycle = duty_cycle(f, cfg.metrics.eps_rel)?;
            Ok(QMetrics { q, metrics })
        })
        .collect()
}

fn pea_loop(sys: &System) -> Result<(PeaLoop, AdmissibilityReport)> {
    let l = build_pea_loop(&sys.load, &sys.w)?;
    let adm = check_admissible_pea(&l);
    if !adm.admissible {
        let failed: Vec<&str> = [
            ("closed", adm.closed),
            ("bivalued", adm.bivalued),
            ("arc-positive", adm.arc_positive),
            ("dissipative", adm.dissipative),
        ]
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| *n)
        .collect();
        return Err(Error::inadmissible(format!("work loop fails: {}; report {adm:?}", failed.join(", "))).into());
    }
    Ok((l, adm))
}

fn sea_loop(sys: &System) -> Result<(SeaLoop, AccessibilityReport)> {
    let l = build_sea_loop(&sys.load, &sys.w)?;
    let acc = sea_accessibility(&l);
    Ok((l, acc))
}

fn design_cfg(cfg: &JobConfig) -> Result<&DesignConfig> {
    cfg.design.as_ref().ok_or_else(|| crate::config::ConfigError("this command needs a design block".into()).into())
}

// ---------------------------------------------------------------- analyze

#[derive(Serialize)]
struct PeaAnalysis {
    x_range: (f64, f64),
    period: f64,
    net_power: f64,
    max_arc: f64,
    admissibility: AdmissibilityReport,
    /// Linear stiffnesses whose profile satisfies the elastic bound, if any.
    linear_stiffness_range: Option<(f64, f64)>,
}

#[derive(Serialize)]
struct SeaAnalysis {
    f_range: (f64, f64),
    f_hat: f64,
    period: f64,
    net_power: f64,
    accessibility: AccessibilityReport,
}

#[derive(Serialize)]
struct Report<'a, L: Serialize, D: Serialize> {
    #[serde(flatten)]
    header: Header<'a>,
    passed: bool,
    #[serde(rename = "loop")]
    loop_summary: L,
    #[serde(skip_serializing_if = "Option::is_none")]
    design: Option<D>,
    metrics: Vec<QMetrics>,
}

fn header<'a>(command: &'a str, cfg: &'a JobConfig, opts: &RunOptions) -> Header<'a> {
    Header { command, config: cfg, seed: opts.seed, tolerance_override: opts.tol }
}

pub fn analyze(cfg: &JobConfig, opts: &RunOptions, art: &mut Artifacts) -> Result<Outcome> {
    let sys = system(cfg)?;
    // the inelastic actuator load is G itself, driven at the output velocity
    let metrics = metrics_for(cfg, &sys.load, &sys.w.velocity())?;
    match cfg.system.actuation {
        Actuation::Pea => {
            let (l, adm) = pea_loop(&sys)?;
            let summary = PeaAnalysis {
                x_range: (l.x1, l.x2),
                period: l.period,
                net_power: l.net_power(),
                max_arc: l.max_arc(),
                admissibility: adm,
                linear_stiffness_range: linear_stiffness_range(&l),
            };
            art.csv("loop.csv", |p| export::save_pea_loop(p, &l))?;
            art.plot(
                "loop",
                "PEA work loop",
                ("x", &l.xs),
                "G",
                &[
                    Curve { label: "G+", color: "#c0392b", dashed: false, ys: l.g_upper.clone() },
                    Curve { label: "G-", color: "#2471a3", dashed: false, ys: l.g_lower.clone() },
                ],
            )?;
            let text = format!("P̄a = {:.6}, P̄b = {:.6}", metrics[0].metrics.p_a, metrics[0].metrics.p_b);
            art.json("report.json", &Report::<_, ()> { header: header("analyze", cfg, opts), passed: true, loop_summary: summary, design: None, metrics })?;
            Ok(Outcome { passed: true, summary: text })
        }
        Actuation::Sea => {
            let (l, acc) = sea_loop(&sys)?;
            let summary = SeaAnalysis {
                f_range: (l.f1, l.f2),
                f_hat: l.f_hat(),
                period: l.period,
                net_power: l.net_power_gradient_form(),
                accessibility: acc,
            };
            art.csv("loop.csv", |p| export::save_sea_loop(p, &l))?;
            art.plot(
                "loop",
                "SEA work loop",
                ("F", &l.fs),
                "X",
                &[
                    Curve { label: "X+", color: "#c0392b", dashed: false, ys: l.x_upper.clone() },
                    Curve { label: "X-", color: "#2471a3", dashed: false, ys: l.x_lower.clone() },
                ],
            )?;
            let text = format!("F̂ = {:.6}, P̄b = {:.6}", summary.f_hat, metrics[0].metrics.p_b);
            art.json("report.json", &Report::<_, ()> { header: header("analyze", cfg, opts), passed: true, loop_summary: summary, design: None, metrics })?;
            Ok(Outcome { passed: true, summary: text })
        }
    }
}

// ---------------------------------------------------------------- design

fn centre_stiffness(l: &PeaLoop) -> Result<f64> {
    let (lo, hi) = linear_stiffness_range(l)
        .ok_or_else(|| Error::inadmissible("no linear spring satisfies the elastic bound on this loop"))?;
    Ok(0.5 * (lo + hi))
}

fn build_profile(l: &PeaLoop, d: &DesignConfig) -> Result<ElasticProfile> {
    let dom = (l.x1, l.x2);
    Ok(match d {
        DesignConfig::Zero => ElasticProfile::zero(dom),
        DesignConfig::Linear { k } => {
            let k = match k {
                Some(k) => *k,
                None => centre_stiffness(l)?,
            };
            ElasticProfile::polynomial(vec![0.0, k], l.centre(), dom)
        }
        DesignConfig::Polynomial { degree, blend, k } => {
            let k = match k {
                Some(k) => *k,
                None => centre_stiffness(l)?,
            };
            let b = match blend {
                Some(b) => *b,
                None => max_admissible_blend_with_stiffness(l, k, *degree)?.blend_max,
            };
            polynomial_family_with_stiffness(l, k, *degree, b)?
        }
        DesignConfig::Freeplay { delta, k } => {
            let k = match k {
                Some(k) => *k,
                None => matched_freeplay_stiffness(l, *delta)?,
            };
            freeplay(l, k, *delta)?
        }
        DesignConfig::Bistable { delta, width } => bistable_family(l, *delta, *width)?,
        DesignConfig::OneWay { side } => one_way_drive(l, *side),
        DesignConfig::Destabilizing { a } => destabilizing_profile(l, *a),
        DesignConfig::Tabulated { path } => export::load_profile(path)?,
        other => bail!(crate::config::ConfigError(format!("\"{}\" is not a parallel family", other.name()))),
    })
}

fn build_compliance(l: &SeaLoop, sys: &System, d: &DesignConfig) -> Result<(ComplianceProfile, Option<f64>)> {
    let dom = (l.f1, l.f2);
    Ok(match d {
        DesignConfig::Linear { k } => {
            let k1 = match k {
                Some(k) => *k,
                None => optimal_linear_compliance(sys.d.m, sys.d.c, sys.w.omega())?.1,
            };
            (ComplianceProfile::linear(k1, dom, 0.0)?, Some(k1))
        }
        DesignConfig::Dwell { side } => (dwell_time_compliance(l, *side)?, None),
        DesignConfig::Blend { lambda } => (blended_compliance(l, *lambda)?, None),
        DesignConfig::Rigid => (ComplianceProfile::rigid(dom, 0.0), None),
        DesignConfig::Tabulated { path } => (export::load_compliance(path)?, None),
        other => bail!(crate::config::ConfigError(format!("\"{}\" is not a series family", other.name()))),
    })
}

#[derive(Serialize)]
struct PeaDesign {
    family: &'static str,
    profile: ProfileSummary,
    bound: BoundReport,
    loop_metrics: Vec<LoopPowerReport>,
}

#[derive(Serialize)]
struct SeaDesign {
    family: &'static str,
    kind: ComplianceKind,
    k1: Option<f64>,
    bound: SeaBoundReport,
}

pub fn design(cfg: &JobConfig, opts: &RunOptions, art: &mut Artifacts) -> Result<Outcome> {
    let dc = design_cfg(cfg)?;
    let sys = system(cfg)?;
    match cfg.system.actuation {
        Actuation::Pea => {
            let (l, adm) = pea_loop(&sys)?;
            let fs = build_profile(&l, dc)?;
            let bound = check_elastic_bound(&fs, &l, opts.tol);
            let f = actuator_load(&fs, &sys.load, &sys.w)?;
            let metrics = metrics_for(cfg, &f, &sys.w.velocity())?;
            let loop_metrics = cfg
                .metrics
                .q
                .iter()
                .map(|&q| metrics_pea_loop(&l, &fs, &Penalty::Constant(q), &Penalty::Constant(q)))
                .collect::<elastic_bounds::Result<Vec<_>>>()?;
            let mut profile = fs.summary();
            if profile.equilibria.is_empty() {
                profile.equilibria = equilibria(&fs);
            }
            art.csv("profile.csv", |p| export::save_profile(p, &fs, l.xs.len()))?;
            art.csv("loop.csv", |p| export::save_pea_loop(p, &l))?;
            art.plot(
                "design",
                &format!("{} profile against the work loop", dc.name()),
                ("x", &l.xs),
                "load",
                &[
                    Curve { label: "G+", color: "#c0392b", dashed: false, ys: l.g_upper.clone() },
                    Curve { label: "G-", color: "#2471a3", dashed: false, ys: l.g_lower.clone() },
                    Curve { label: "-F_s", color: "#1e8449", dashed: true, ys: l.xs.iter().map(|&x| -fs.eval(x)).collect() },
                ],
            )?;
            let text = format!(
                "{}: optimal = {}, max violation {:.3e}, P̄b = {:.6}, duty cycle {:.4}",
                dc.name(),
                bound.optimal,
                bound.max_violation,
                metrics[0].metrics.p_b,
                metrics[0].metrics.duty_cycle
            );
            let design = PeaDesign { family: dc.name(), profile, bound, loop_metrics };
            let summary = PeaAnalysis {
                x_range: (l.x1, l.x2),
                period: l.period,
                net_power: l.net_power(),
                max_arc: l.max_arc(),
                admissibility: adm,
                linear_stiffness_range: linear_stiffness_range(&l),
            };
            art.json("report.json", &Report { header: header("design", cfg, opts), passed: true, loop_summary: summary, design: Some(design), metrics })?;
            Ok(Outcome { passed: true, summary: text })
        }
        Actuation::Sea => {
            let (l, acc) = sea_loop(&sys)?;
            let (cp, k1) = build_compliance(&l, &sys, dc)?;
            let bound = check_sea_bound(&cp, &l, opts.tol);
            let u = actuator_displacement(&cp, &sys.load, &sys.w)?;
            let metrics = metrics_for(cfg, &sys.load, &u.rate_signal())?;
            art.csv("compliance.csv", |p| export::save_compliance(p, &cp, l.fs.len()))?;
            art.csv("loop.csv", |p| export::save_sea_loop(p, &l))?;
            art.plot(
                "design",
                &format!("{} compliance against the loop gradients", dc.name()),
                ("F", &l.fs),
                "dX/dF",
                &[
                    Curve { label: "X'+", color: "#c0392b", dashed: false, ys: l.xp_upper.clone() },
                    Curve { label: "X'-", color: "#2471a3", dashed: false, ys: l.xp_lower.clone() },
                    Curve { label: "-(F_s^-1)'", color: "#1e8449", dashed: true, ys: l.fs.iter().map(|&f| -cp.grad(f)).collect() },
                ],
            )?;
            let text = format!(
                "{}: optimal = {}{}, P̄b = {:.6}",
                dc.name(),
                bound.optimal,
                k1.map(|k| format!(", k1 = {k:.6}")).unwrap_or_default(),
                metrics[0].metrics.p_b
            );
            let design = SeaDesign { family: dc.name(), kind: cp.kind.clone(), k1, bound };
            let summary = SeaAnalysis {
                f_range: (l.f1, l.f2),
                f_hat: l.f_hat(),
                period: l.period,
                net_power: l.net_power_gradient_form(),
                accessibility: acc,
            };
            art.json("report.json", &Report { header: header("design", cfg, opts), passed: true, loop_summary: summary, design: Some(design), metrics })?;
            Ok(Outcome { passed: true, summary: text })
        }
    }
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct QSuite {
    q: f64,
    suite: SuiteReport,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    passed: bool,
    suites: Vec<QSuite>,
}

pub fn verify(cfg: &JobConfig, opts: &RunOptions, art: &mut Artifacts) -> Result<Outcome> {
    let dc = design_cfg(cfg)?;
    let sys = system(cfg)?;
    let suites = match cfg.system.actuation {
        Actuation::Pea => {
            let (l, _) = pea_loop(&sys)?;
            let fs = build_profile(&l, dc)?;
            cfg.metrics
                .q
                .iter()
                .map(|&q| Ok(QSuite { q, suite: verify_pea_design(&sys.d, &sys.w, &l, &fs, q)? }))
                .collect::<Result<Vec<_>>>()?
        }
        Actuation::Sea => {
            let (l, _) = sea_loop(&sys)?;
            let (cp, _) = build_compliance(&l, &sys, dc)?;
            cfg.metrics
                .q
                .iter()
                .map(|&q| Ok(QSuite { q, suite: verify_sea_design(&sys.d, &sys.w, &l, &cp, q)? }))
                .collect::<Result<Vec<_>>>()?
        }
    };
    let passed = suites.iter().all(|s| s.suite.passed);
    let failed: Vec<String> = suites
        .iter()
        .flat_map(|s| s.suite.checks.iter().filter(|c| !c.passed).map(move |c| format!("Q={}: {} = {:.3e} (limit {:.3e})", s.q, c.name, c.value, c.threshold)))
        .collect();
    art.json("verify.json", &VerifyReport { header: header("verify", cfg, opts), passed, suites })?;
    let summary = if passed { format!("{}: all checks passed", dc.name()) } else { format!("{}: {}", dc.name(), failed.join("; ")) };
    Ok(Outcome { passed, summary })
}

// ---------------------------------------------------------------- sweep

#[derive(Serialize)]
struct SweepReport<'a> {
    #[serde(flatten)]
    header: Header<'a>,
    passed: bool,
    omega0: f64,
    zeta: f64,
    /// ω₀√(1 − 4ζ²), when it exists.
    predicted: Option<f64>,
    relative_error: Option<f64>,
    result: SweepResult,
}

pub fn sweep(cfg: &JobConfig, opts: &RunOptions, art: &mut Artifacts) -> Result<Outcome> {
    let sw = cfg.sweep.as_ref().ok_or_else(|| anyhow!(crate::config::ConfigError("sweep needs a sweep block".into())))?;
    if cfg.system.actuation != Actuation::Sea || cfg.kinematics.kind != WaveformKind::Harmonic {
        bail!(crate::config::ConfigError("sweep runs on SEA actuation with harmonic kinematics".into()));
    }
    let (m, c) = (cfg.system.m, cfg.system.c);
    if m <= 0.0 {
        bail!(crate::config::ConfigError("sweep needs m > 0".into()));
    }
    let omega0 = (sw.k1 / m).sqrt();
    let zeta = c / (2.0 * (sw.k1 * m).sqrt());
    let result = sweep_frequency_sea(m, c, sw.k1, (sw.lo * omega0, sw.hi * omega0), sw.rows, cfg.kinematics.amplitude)?;
    let predicted = global_resonant_frequency(omega0, zeta).ok();
    let relative_error = predicted.map(|p| (result.argmin / p - 1.0).abs());
    let tol = opts.tol.unwrap_or(1e-3);
    let passed = relative_error.is_none_or(|e| e <= tol);
    art.csv("sweep.csv", |p| export::save_sweep(p, &result.rows))?;
    let omegas: Vec<f64> = result.rows.iter().map(|r| r.omega).collect();
    art.plot(
        "sweep",
        "Absolute power across drive frequency",
        ("omega", &omegas),
        "objective",
        &[Curve { label: "objective", color: "#7d3c98", dashed: false, ys: result.rows.iter().map(|r| r.objective).collect() }],
    )?;
    let summary = match (predicted, relative_error) {
        (Some(p), Some(e)) => format!("argmin ω = {:.6}, predicted {p:.6}, relative error {e:.2e}", result.argmin),
        _ => format!("argmin ω = {:.6} (no global-resonant prediction for ζ = {zeta:.3})", result.argmin),
    };
    art.json("sweep.json", &SweepReport { header: header("sweep", cfg, opts), passed, omega0, zeta, predicted, relative_error, result })?;
    Ok(Outcome { passed, summary })
}
