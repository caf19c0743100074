//! Mechanical power metrics in the time and loop domains.

use crate::error::{Error, Result};
use crate::models::{dissipated_power, DynamicsModel, PeriodicWaveform};
use crate::numeric::{gl, maximize, sign_segments};
use crate::pea_design::ElasticProfile;
use crate::signal::{LoadWaveform, Signal, VelocityWaveform};
use crate::workloop::{PeaLoop, Side};
use serde::{Deserialize, Serialize};

/// Metabolic penalty constants.
pub const Q_MUSCLE_A: f64 = 1.33;
pub const Q_MUSCLE_B: f64 = 1.20;
/// Default relative threshold for duty cycles.
pub const DEFAULT_DUTY_EPS: f64 = 1e-3;
const DEADBAND: f64 = 1e-12;

/// Penalty Q on negative power in metric (d).
#[derive(Debug, Clone)]
pub enum Penalty {
    Constant(f64),
    /// Time-varying Q(t) > 0 sharing the load grid.
    Sampled(Signal),
}

/// Serializable summary of a penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PenaltyDescriptor {
    Constant { q: f64 },
    Sampled { min: f64, max: f64 },
}

impl Penalty {
    pub fn validate(&self) -> Result<()> {
        match self {
            Penalty::Constant(q) if !(q.is_finite() && *q >= 0.0) => {
                Err(Error::invalid(format!("penalty must be a finite non-negative constant, got {q}")))
            }
            Penalty::Sampled(s) if s.samples().iter().any(|&q| !(q > 0.0 && q.is_finite())) => {
                Err(Error::invalid("sampled penalty Q(t) must be positive everywhere"))
            }
            _ => Ok(()),
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            Penalty::Constant(q) => *q,
            Penalty::Sampled(s) => s.value(t),
        }
    }

    pub fn descriptor(&self) -> PenaltyDescriptor {
        match self {
            Penalty::Constant(q) => PenaltyDescriptor::Constant { q: *q },
            Penalty::Sampled(s) => {
                let v = s.samples();
                PenaltyDescriptor::Sampled {
                    min: v.iter().cloned().fold(f64::INFINITY, f64::min),
                    max: v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                }
            }
        }
    }
}

/// Time-domain power summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    /// Net power.
    pub p_a: f64,
    /// Absolute power.
    pub p_b: f64,
    /// Positive-only power.
    pub p_c: f64,
    /// Penalised power.
    pub p_d: f64,
    pub penalty: PenaltyDescriptor,
    pub duty_cycle: f64,
    pub peak_load: f64,
    pub peak_power: f64,
    /// Smallest instantaneous power over the cycle.
    pub min_power: f64,
    pub p_f2: f64,
    pub p_fabs: f64,
    pub p_fdot_abs: f64,
    pub p_fdot2: f64,
    /// Metric ratio P̄a / P̄b.
    pub transfer_ratio: f64,
}

/// Force-only integrals, each with prefactor 1/T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceMetrics {
    pub p_f2: f64,
    pub p_fabs: f64,
    pub p_fdot_abs: f64,
    pub p_fdot2: f64,
}

/// ∫p⁺, ∫|p⁻| and ∫q|p⁻| over one period.
fn split_time(p: &dyn Fn(f64) -> f64, q: &Penalty, period: f64, cells: usize, peak: f64) -> (f64, f64, f64) {
    let (mut pos, mut neg, mut negq) = (0.0, 0.0, 0.0);
    for seg in sign_segments(p, 0.0, period, cells, DEADBAND * peak) {
        let i = gl(p, seg.a, seg.b);
        if seg.sign < 0 || (seg.sign == 0 && i < 0.0) {
            neg -= i;
            negq += match q {
                Penalty::Constant(c) => -c * i,
                Penalty::Sampled(s) => -gl(&|t: f64| s.value(t) * p(t), seg.a, seg.b),
            };
        } else {
            pos += i;
        }
    }
    (pos, neg, negq)
}

/// The four power metrics with the extremes of P(t), without force or duty-cycle extras.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerCore {
    pub p_a: f64,
    pub p_b: f64,
    pub p_c: f64,
    pub p_d: f64,
    pub peak_power: f64,
    pub min_power: f64,
}

/// Metrics (a)–(d) of P = F·v.
pub fn power_metrics(f: &LoadWaveform, v: &VelocityWaveform, q: &Penalty) -> Result<PowerCore> {
    f.ensure_same_grid(v, "load vs velocity")?;
    if let Penalty::Sampled(s) = q {
        f.ensure_same_grid(s, "load vs penalty")?;
    }
    q.validate()?;
    let period = f.period();
    let cells = f.n();
    let p = |t: f64| f.value(t) * v.value(t);
    let peak_power = maximize(&|t: f64| p(t).abs(), 0.0, period, 4 * cells).1;
    let min_power = -maximize(&|t: f64| -p(t), 0.0, period, 4 * cells).1;
    let (pos, neg, negq) = split_time(&p, q, period, cells, peak_power);
    let p_a = (pos - neg) / period;
    Ok(PowerCore { p_a, p_b: (pos + neg) / period, p_c: pos / period, p_d: p_a + negq / period, peak_power, min_power })
}

/// All power metrics for load `f` and velocity `v`.
pub fn metrics_time(f: &LoadWaveform, v: &VelocityWaveform, q: &Penalty) -> Result<PowerReport> {
    let c = power_metrics(f, v, q)?;
    let fm = force_metrics(f);
    Ok(PowerReport {
        p_a: c.p_a,
        p_b: c.p_b,
        p_c: c.p_c,
        p_d: c.p_d,
        penalty: q.descriptor(),
        duty_cycle: duty_cycle(f, DEFAULT_DUTY_EPS)?,
        peak_load: f.peak_abs(),
        peak_power: c.peak_power,
        min_power: c.min_power,
        p_f2: fm.p_f2,
        p_fabs: fm.p_fabs,
        p_fdot_abs: fm.p_fdot_abs,
        p_fdot2: fm.p_fdot2,
        transfer_ratio: if c.p_b > 0.0 { c.p_a / c.p_b } else { 1.0 },
    })
}

fn mean_abs(g: &dyn Fn(f64) -> f64, period: f64, cells: usize) -> f64 {
    let peak = maximize(&|t: f64| g(t).abs(), 0.0, period, 4 * cells).1;
    sign_segments(g, 0.0, period, cells, DEADBAND * peak)
        .iter()
        .map(|s| gl(g, s.a, s.b).abs())
        .sum::<f64>()
        / period
}

/// (1/T)∫F², (1/T)∫|F|, (1/T)∫|Ḟ|, (1/T)∫Ḟ².
pub fn force_metrics(f: &LoadWaveform) -> ForceMetrics {
    let (period, cells) = (f.period(), f.n());
    let mean = |g: &dyn Fn(f64) -> f64| {
        let h = period / cells as f64;
        (0..cells).map(|i| gl(g, i as f64 * h, (i + 1) as f64 * h)).sum::<f64>() / period
    };
    ForceMetrics {
        p_f2: mean(&|t| f.value(t).powi(2)),
        p_fabs: mean_abs(&|t| f.value(t), period, cells),
        p_fdot_abs: mean_abs(&|t| f.rate(t), period, cells),
        p_fdot2: mean(&|t| f.rate(t).powi(2)),
    }
}

/// Fraction of the period where |F| exceeds `eps_rel`·max|F|.
pub fn duty_cycle(f: &LoadWaveform, eps_rel: f64) -> Result<f64> {
    if !(eps_rel > 0.0 && eps_rel <= 0.1) {
        return Err(Error::invalid(format!("duty-cycle threshold must lie in (0, 0.1], got {eps_rel}")));
    }
    let peak = f.peak_abs();
    if peak == 0.0 {
        return Ok(0.0);
    }
    let thr = eps_rel * peak;
    let s = |t: f64| f.value(t).abs() - thr;
    let on: f64 = sign_segments(&s, 0.0, f.period(), f.n(), 0.0)
        .iter()
        .filter(|seg| seg.sign > 0)
        .map(|seg| seg.b - seg.a)
        .sum();
    Ok(on / f.period())
}

/// ∫|output| / ∫|input| over one period.
pub fn transfer_ratio(output: &Signal, input: &Signal) -> Result<f64> {
    output.ensure_same_grid(input, "transfer ratio")?;
    let (period, cells) = (input.period(), input.n());
    let den = mean_abs(&|t| input.value(t), period, cells);
    if den == 0.0 {
        return Err(Error::invalid("transfer ratio undefined: zero input power"));
    }
    Ok(mean_abs(&|t| output.value(t), period, cells) / den)
}

/// PEA ratio: dissipated power over actuator power F·ẋ.
pub fn transfer_ratio_pea(d: &DynamicsModel, w: &PeriodicWaveform, load: &LoadWaveform) -> Result<f64> {
    transfer_ratio(&dissipated_power(d, w), &load.product(&w.velocity())?)
}

/// SEA ratio: dissipated power over actuator power F·u̇.
pub fn transfer_ratio_sea(
    d: &DynamicsModel,
    w: &PeriodicWaveform,
    load: &LoadWaveform,
    actuator: &Signal,
) -> Result<f64> {
    let udot = actuator.rate_signal();
    transfer_ratio(&dissipated_power(d, w), &load.product(&udot)?)
}

/// Loop-domain metrics (no time information needed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopPowerReport {
    pub p_a: f64,
    pub p_b: f64,
    pub p_c: f64,
    pub p_d: f64,
    pub penalty_upper: PenaltyDescriptor,
    pub penalty_lower: PenaltyDescriptor,
}

fn branch_penalty<'a>(l: &'a PeaLoop, q: &Penalty, side: Side) -> Result<Box<dyn Fn(f64) -> f64 + 'a>> {
    match q {
        Penalty::Constant(c) => {
            let c = *c;
            Ok(Box::new(move |_| c))
        }
        Penalty::Sampled(s) => {
            if !l.has_time_source() {
                return Err(Error::invalid("sampled penalties need a loop built from time-domain data"));
            }
            let s = s.clone();
            Ok(Box::new(move |x| s.value(l.branch_time(side, x).unwrap())))
        }
    }
}

fn check_profile(l: &PeaLoop, fs: &ElasticProfile) -> Result<()> {
    for &x in &l.xs {
        if !fs.eval(x).is_finite() {
            return Err(Error::invalid(format!("elastic profile not finite at x = {x}")));
        }
    }
    Ok(())
}

/// Evaluate the four metrics from the loop branches F± = G± + F_s.
pub fn metrics_pea_loop(l: &PeaLoop, fs: &ElasticProfile, q_upper: &Penalty, q_lower: &Penalty) -> Result<LoopPowerReport> {
    check_profile(l, fs)?;
    q_upper.validate()?;
    q_lower.validate()?;
    let qu = branch_penalty(l, q_upper, Side::Upper)?;
    let ql = branch_penalty(l, q_lower, Side::Lower)?;
    let fu = |x: f64| l.upper(x) + fs.eval(x);
    let flo = |x: f64| l.lower(x) + fs.eval(x);
    let db = DEADBAND * l.max_abs_load().max(fs.max_abs_on(l.x1, l.x2));
    let r = l.half_span();
    let jac = |th: f64| r * th.sin();

    // direct integrands: F⁺ − F⁻, |F⁺| + |F⁻|, and Iverson-bracketed parts
    let pa = l.integrate_x(&|x| fu(x) - flo(x));
    let (mut pb, mut pc, mut pen) = (0.0, 0.0, 0.0);
    for seg in l.sign_segments_x(&fu, db) {
        let g = |th: f64| fu(l.x_of_theta(th)) * jac(th);
        let i = gl(&g, seg.a, seg.b);
        pb += i.abs();
        if seg.sign > 0 || (seg.sign == 0 && i > 0.0) {
            pc += i;
        } else {
            pen += gl(&|th: f64| -qu(l.x_of_theta(th)) * g(th), seg.a, seg.b);
        }
    }
    for seg in l.sign_segments_x(&flo, db) {
        let g = |th: f64| flo(l.x_of_theta(th)) * jac(th);
        let i = gl(&g, seg.a, seg.b);
        pb += i.abs();
        if seg.sign < 0 || (seg.sign == 0 && i < 0.0) {
            pc -= i;
        } else {
            pen += gl(&|th: f64| ql(l.x_of_theta(th)) * g(th), seg.a, seg.b);
        }
    }
    let t = l.period;
    Ok(LoopPowerReport {
        p_a: pa / t,
        p_b: pb / t,
        p_c: pc / t,
        p_d: (pa + pen) / t,
        penalty_upper: q_upper.descriptor(),
        penalty_lower: q_lower.descriptor(),
    })
}

/// Positive and negative work areas of each elastic branch, per unit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WDecomposition {
    /// Upper branch, F⁺ > 0 (positive work).
    pub a_plus: f64,
    /// Upper branch, F⁺ < 0 (negative work), as a magnitude.
    pub b_plus: f64,
    /// Lower branch, F⁻ > 0 (negative work).
    pub a_minus: f64,
    /// Lower branch, F⁻ < 0 (positive work), as a magnitude.
    pub b_minus: f64,
    /// Penalty-weighted negative work.
    pub w_q: f64,
}

impl WDecomposition {
    pub fn p_a(&self) -> f64 {
        self.a_plus - self.b_plus - self.a_minus + self.b_minus
    }
    pub fn p_b(&self) -> f64 {
        self.a_plus + self.b_plus + self.a_minus + self.b_minus
    }
    pub fn p_c(&self) -> f64 {
        self.a_plus + self.b_minus
    }
    pub fn p_d(&self) -> f64 {
        self.p_a() + self.w_q
    }
}

/// Work-area decomposition of the elastic loop F± = G± + F_s.
pub fn decompose_pea(l: &PeaLoop, fs: &ElasticProfile, q_upper: &Penalty, q_lower: &Penalty) -> Result<WDecomposition> {
    check_profile(l, fs)?;
    let qu = branch_penalty(l, q_upper, Side::Upper)?;
    let ql = branch_penalty(l, q_lower, Side::Lower)?;
    let db = DEADBAND * l.max_abs_load().max(fs.max_abs_on(l.x1, l.x2));
    let r = l.half_span();
    let mut w = WDecomposition { a_plus: 0.0, b_plus: 0.0, a_minus: 0.0, b_minus: 0.0, w_q: 0.0 };
    let positive_part = |f: &dyn Fn(f64) -> f64, sign: f64, weight: &dyn Fn(f64) -> f64| -> f64 {
        let h = |x: f64| sign * f(x);
        l.sign_segments_x(&h, db)
            .iter()
            .map(|seg| gl(&|th: f64| h(l.x_of_theta(th)) * weight(l.x_of_theta(th)) * r * th.sin(), seg.a, seg.b))
            .filter(|v| *v > 0.0)
            .sum::<f64>()
    };
    let fu = |x: f64| l.upper(x) + fs.eval(x);
    let flo = |x: f64| l.lower(x) + fs.eval(x);
    let one = |_: f64| 1.0;
    w.a_plus = positive_part(&fu, 1.0, &one);
    w.b_plus = positive_part(&fu, -1.0, &one);
    w.a_minus = positive_part(&flo, 1.0, &one);
    w.b_minus = positive_part(&flo, -1.0, &one);
    w.w_q = positive_part(&fu, -1.0, &*qu) + positive_part(&flo, 1.0, &*ql);
    let t = l.period;
    w.a_plus /= t;
    w.b_plus /= t;
    w.a_minus /= t;
    w.b_minus /= t;
    w.w_q /= t;
    Ok(w)
}
