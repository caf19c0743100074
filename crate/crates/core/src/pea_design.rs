//! Parallel elasticities: the elastic-bound check and optimal profile families.

use crate::error::{Error, Result};
use crate::models::{DynamicsModel, PeriodicWaveform};
use crate::numeric::{brent_root, linspace, Pchip};
use crate::power::{duty_cycle, metrics_time, Penalty};
use crate::signal::{LoadWaveform, ScalarFn, Signal};
use crate::workloop::{PeaLoop, Side};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// How a profile was built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Representation {
    Zero,
    /// F_s(x) = Σ coeffs[i]·(x − centre)^i.
    Polynomial { coeffs: Vec<f64>, centre: f64 },
    /// Dead band |x − centre| ≤ δ, contact springs of stiffness k outside.
    Freeplay { k: f64, delta: f64, centre: f64 },
    /// Loop boundaries outside ±δ joined by a chord, C¹-smoothed over half-width w.
    Bistable { delta: f64, w: f64, centre: f64 },
    /// F_s = −G± (one-way drive).
    LoopBoundary { side: Side },
    /// Destabilising cubic a·s(1 − s²/r²) for zero-inertia loops.
    Destabilizing { a: f64, centre: f64, half_span: f64 },
    Tabulated { xs: Vec<f64>, values: Vec<f64> },
}

/// Regime labels of the bistable family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Bistable,
    FreeplayHardening,
    Hardening,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Equilibrium {
    Point { x: f64, stability: Stability },
    /// Continuum of neutral equilibria (F_s ≡ 0 on [lo, hi]).
    Interval { lo: f64, hi: f64 },
}

/// Result of checking G⁻ ≤ −F_s ≤ G⁺.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub optimal: bool,
    /// Largest signed excursion beyond either bound (≤ 0 when inside).
    pub max_violation: f64,
    pub worst_x: f64,
    /// Bound that is breached (or closest to being breached).
    pub worst_side: Side,
    pub tolerance: f64,
}

/// Elastic load profile F_s(x).
#[derive(Clone)]
pub struct ElasticProfile {
    pub repr: Representation,
    pub domain: (f64, f64),
    /// False where the construction needs unbounded stiffness.
    pub realizable: bool,
    pub regime: Option<Regime>,
    pub bound: Option<BoundReport>,
    eval: ScalarFn,
}

impl fmt::Debug for ElasticProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ElasticProfile")
            .field("repr", &self.repr)
            .field("domain", &self.domain)
            .field("realizable", &self.realizable)
            .field("regime", &self.regime)
            .finish_non_exhaustive()
    }
}

/// Serializable description of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub representation: Representation,
    pub domain: (f64, f64),
    pub realizable: bool,
    pub regime: Option<Regime>,
    pub equilibria: Vec<Equilibrium>,
    pub bound: Option<BoundReport>,
}

impl ElasticProfile {
    fn new(repr: Representation, domain: (f64, f64), eval: ScalarFn) -> Self {
        Self { repr, domain, realizable: true, regime: None, bound: None, eval }
    }

    pub fn zero(domain: (f64, f64)) -> Self {
        Self::new(Representation::Zero, domain, Arc::new(|_| 0.0))
    }

    pub fn polynomial(coeffs: Vec<f64>, centre: f64, domain: (f64, f64)) -> Self {
        let c = coeffs.clone();
        Self::new(
            Representation::Polynomial { coeffs, centre },
            domain,
            Arc::new(move |x| c.iter().rev().fold(0.0, |acc, a| acc * (x - centre) + a)),
        )
    }

    pub fn linear(k: f64, domain: (f64, f64)) -> Self {
        Self::polynomial(vec![0.0, k], 0.0, domain)
    }

    pub fn tabulated(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let p = Pchip::new(xs.clone(), values.clone())?;
        let domain = (xs[0], *xs.last().unwrap());
        Ok(Self::new(Representation::Tabulated { xs, values }, domain, Arc::new(move |x| p.eval(x))))
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Central-difference slope.
    pub fn slope(&self, x: f64) -> f64 {
        let h = 1e-6 * (self.domain.1 - self.domain.0).max(f64::MIN_POSITIVE);
        let (a, b) = ((x - h).max(self.domain.0), (x + h).min(self.domain.1));
        (self.eval(b) - self.eval(a)) / (b - a)
    }

    pub fn max_abs_on(&self, a: f64, b: f64) -> f64 {
        linspace(a, b, 257).into_iter().fold(0.0, |m, x| m.max(self.eval(x).abs()))
    }

    pub fn summary(&self) -> ProfileSummary {
        ProfileSummary {
            representation: self.repr.clone(),
            domain: self.domain,
            realizable: self.realizable,
            regime: self.regime,
            equilibria: equilibria(self),
            bound: self.bound.clone(),
        }
    }

    /// Samples (x, F_s(x)) on `n` uniform points of the domain.
    pub fn table(&self, n: usize) -> Vec<(f64, f64)> {
        linspace(self.domain.0, self.domain.1, n).into_iter().map(|x| (x, self.eval(x))).collect()
    }
}

/// Check G⁻(x) ≤ −F_s(x) ≤ G⁺(x) on the loop grid; `tol` defaults to 1e-9·max G_arc.
pub fn check_elastic_bound(fs: &ElasticProfile, l: &PeaLoop, tol: Option<f64>) -> BoundReport {
    let tol = tol.unwrap_or(1e-9 * l.max_arc());
    let mut worst = (f64::NEG_INFINITY, l.x1, Side::Upper);
    for (j, &x) in l.xs.iter().enumerate() {
        let neg = -fs.eval(x);
        let up = neg - l.g_upper[j];
        let lo = l.g_lower[j] - neg;
        if up > worst.0 {
            worst = (up, x, Side::Upper);
        }
        if lo > worst.0 {
            worst = (lo, x, Side::Lower);
        }
    }
    BoundReport {
        optimal: worst.0 <= tol,
        max_violation: worst.0,
        worst_x: worst.1,
        worst_side: worst.2,
        tolerance: tol,
    }
}

/// Interval of stiffnesses k for which k(x − x_c) satisfies the bound, if non-empty.
///
/// Uses the bound check's default force tolerance, so a tip-pinched interval is not lost to round-off.
pub fn linear_stiffness_range(l: &PeaLoop) -> Option<(f64, f64)> {
    let c = l.centre();
    let edge = 1e-9 * l.half_span();
    let tol = 1e-9 * l.max_arc();
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (j, &x) in l.xs.iter().enumerate() {
        let s = x - c;
        if s.abs() <= edge {
            continue;
        }
        let (kmin, kmax) = if s > 0.0 {
            ((-l.g_upper[j] - tol) / s, (-l.g_lower[j] + tol) / s)
        } else {
            ((-l.g_lower[j] + tol) / s, (-l.g_upper[j] - tol) / s)
        };
        lo = lo.max(kmin);
        hi = hi.min(kmax);
    }
    (lo <= hi).then_some((lo, hi))
}

/// Cubic (degree 3) or quintic (degree 5) blend with the resonant linear spring.
///
/// `mass` and the loop's period and half-span supply m, ω and x̂.
pub fn polynomial_family(l: &PeaLoop, mass: f64, degree: u32, blend: f64) -> Result<ElasticProfile> {
    let w = 2.0 * std::f64::consts::PI / l.period;
    polynomial_family_with_stiffness(l, mass * w * w, degree, blend)
}

/// Same family anchored on an arbitrary reference stiffness `k` instead of mω².
pub fn polynomial_family_with_stiffness(l: &PeaLoop, k: f64, degree: u32, blend: f64) -> Result<ElasticProfile> {
    if degree != 3 && degree != 5 {
        return Err(Error::invalid(format!("polynomial family degree must be 3 or 5, got {degree}")));
    }
    if !(0.0..=1.0).contains(&blend) {
        return Err(Error::invalid(format!("blend must lie in [0, 1], got {blend}")));
    }
    let r = l.half_span();
    let mut coeffs = vec![0.0; degree as usize + 1];
    coeffs[1] = (1.0 - blend) * k;
    coeffs[degree as usize] += blend * k / r.powi(degree as i32 - 1);
    Ok(ElasticProfile::polynomial(coeffs, l.centre(), (l.x1, l.x2)))
}

/// Largest admissible blend and whether the violation grew monotonically with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlendSearch {
    pub blend_max: f64,
    pub monotone: bool,
    pub diagnostic: Option<String>,
}

/// Bisection (to 1e-6) for the largest blend passing the bound check.
pub fn max_admissible_blend(l: &PeaLoop, mass: f64, degree: u32) -> Result<BlendSearch> {
    let w = 2.0 * std::f64::consts::PI / l.period;
    max_admissible_blend_with_stiffness(l, mass * w * w, degree)
}

pub fn max_admissible_blend_with_stiffness(l: &PeaLoop, k: f64, degree: u32) -> Result<BlendSearch> {
    let viol = |b: f64| -> Result<f64> {
        Ok(check_elastic_bound(&polynomial_family_with_stiffness(l, k, degree, b)?, l, None).max_violation)
    };
    let tol = 1e-9 * l.max_arc();
    let samples: Vec<f64> = linspace(0.0, 1.0, 21).into_iter().map(viol).collect::<Result<_>>()?;
    let monotone = samples.windows(2).all(|w| w[1] >= w[0] - tol);
    if samples[0] > tol {
        return Ok(BlendSearch {
            blend_max: 0.0,
            monotone,
            diagnostic: Some("even the linear member violates the elastic bound".into()),
        });
    }
    if samples[20] <= tol {
        return Ok(BlendSearch { blend_max: 1.0, monotone, diagnostic: None });
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if viol(mid)? <= tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(BlendSearch {
        blend_max: lo,
        monotone,
        diagnostic: (!monotone).then(|| "violation is not monotone in the blend; result is one admissible edge".into()),
    })
}

fn branch_root(l: &PeaLoop, side: Side) -> Result<f64> {
    let g = match side {
        Side::Upper => &l.g_upper,
        Side::Lower => &l.g_lower,
    };
    let centre = l.centre();
    let mut best: Option<f64> = None;
    for j in 0..g.len() - 1 {
        if g[j] == 0.0 || g[j].signum() != g[j + 1].signum() {
            let f = |x: f64| l.branch(side, x);
            let r = brent_root(&f, l.xs[j], l.xs[j + 1], g[j], g[j + 1], 1e-10 * l.half_span(), 200)?;
            if best.is_none_or(|b| (r - centre).abs() < (b - centre).abs()) {
                best = Some(r);
            }
        }
    }
    best.ok_or_else(|| Error::Numerical(format!("{side:?} branch has no zero on the loop range")))
}

/// Critical displacements (l⁻, l⁺) with G⁻(l⁻) = 0 and G⁺(l⁺) = 0.
pub fn critical_displacements(l: &PeaLoop) -> Result<(f64, f64)> {
    Ok((branch_root(l, Side::Lower)?, branch_root(l, Side::Upper)?))
}

/// Largest freeplay half-gap min(l⁺ − x_c, x_c − l⁻), floored at zero.
pub fn max_freeplay_gap(l: &PeaLoop) -> Result<f64> {
    let (lm, lp) = critical_displacements(l)?;
    Ok((lp - l.centre()).min(l.centre() - lm).max(0.0))
}

/// Stiffness that makes the freeplay spring meet the loop tip at x₂.
pub fn matched_freeplay_stiffness(l: &PeaLoop, delta: f64) -> Result<f64> {
    let reach = l.x2 - l.centre() - delta;
    if reach <= 0.0 {
        return Err(Error::invalid("freeplay gap covers the whole range"));
    }
    Ok(-l.upper(l.x2) / reach)
}

/// Freeplay: zero inside |x − x_c| ≤ δ, k(x − x_c ∓ δ) outside.
pub fn freeplay(l: &PeaLoop, k: f64, delta: f64) -> Result<ElasticProfile> {
    if !(k > 0.0) || !(delta >= 0.0) {
        return Err(Error::invalid(format!("freeplay needs k > 0 and δ ≥ 0, got k={k}, δ={delta}")));
    }
    let c = l.centre();
    let mut p = ElasticProfile::new(
        Representation::Freeplay { k, delta, centre: c },
        (l.x1, l.x2),
        Arc::new(move |x| {
            let s = x - c;
            if s > delta {
                k * (s - delta)
            } else if s < -delta {
                k * (s + delta)
            } else {
                0.0
            }
        }),
    );
    p.bound = Some(check_elastic_bound(&p, l, None));
    Ok(p)
}

/// Polynomial smooth minimum (C¹, at most k/4 below the true minimum).
fn smin(a: f64, b: f64, k: f64) -> f64 {
    if k <= 0.0 {
        return a.min(b);
    }
    let h = (k - (a - b).abs()).max(0.0) / k;
    a.min(b) - h * h * k / 4.0
}

fn smax(a: f64, b: f64, k: f64) -> f64 {
    -smin(-a, -b, k)
}

/// Bistable family: −F_s follows G⁻ left of x_c − δ, G⁺ right of x_c + δ, and the chord between.
pub fn bistable_family(l: &PeaLoop, delta: f64, w: f64) -> Result<ElasticProfile> {
    let r = l.half_span();
    if !(delta > 0.0 && delta <= r * (1.0 + 1e-12)) || !(w >= 0.0) {
        return Err(Error::invalid(format!("bistable family needs 0 < δ ≤ x̂ and w ≥ 0, got δ={delta}, w={w}")));
    }
    let delta = delta.min(r);
    let c = l.centre();
    let (a, b) = (c - delta, c + delta);
    let (ya, yb) = (l.lower(a), l.upper(b));
    let chord_slope = (yb - ya) / (b - a);
    let ll = Arc::new(l.clone());
    let edge = 1e-12 * r;
    // blend widths in force units; no smoothing where a breakpoint sits on the loop tip
    let kr = if w > 0.0 && b + w < l.x2 - edge { w * (l.branch_slope(Side::Upper, b) - chord_slope).abs() } else { 0.0 };
    let kl = if w > 0.0 && a - w > l.x1 + edge { w * (l.branch_slope(Side::Lower, a) - chord_slope).abs() } else { 0.0 };
    let (x1, x2) = (l.x1, l.x2);
    let eval = move |x: f64| {
        let xc = x.clamp(x1, x2);
        let chord = ya + chord_slope * (xc - a);
        let neg = if xc > b - w && kr > 0.0 && xc >= c {
            smin(chord, ll.upper(xc), kr)
        } else if xc < a + w && kl > 0.0 && xc <= c {
            smax(chord, ll.lower(xc), kl)
        } else if xc > b {
            ll.upper(xc)
        } else if xc < a {
            ll.lower(xc)
        } else {
            chord
        };
        -neg
    };
    let mut p = ElasticProfile::new(Representation::Bistable { delta, w, centre: c }, (l.x1, l.x2), Arc::new(eval));
    let lp = critical_displacements(l).map(|(_, lp)| lp - c).unwrap_or(f64::NAN);
    let tol = 1e-6 * r;
    p.regime = Some(if (delta - r).abs() <= tol {
        Regime::Linear
    } else if (delta - lp).abs() <= tol {
        Regime::FreeplayHardening
    } else if delta < lp {
        Regime::Bistable
    } else {
        Regime::Hardening
    });
    p.bound = Some(check_elastic_bound(&p, l, None));
    Ok(p)
}

/// One-way drive F_s = −G± along the chosen loop boundary.
pub fn one_way_drive(l: &PeaLoop, side: Side) -> ElasticProfile {
    let ll = Arc::new(l.clone());
    let mut p = ElasticProfile::new(
        Representation::LoopBoundary { side },
        (l.x1, l.x2),
        Arc::new(move |x| -ll.branch(side, x.clamp(ll.x1, ll.x2))),
    );
    p.realizable = boundary_realizable(l, side);
    p.bound = Some(check_elastic_bound(&p, l, None));
    p
}

/// Finite-stiffness proxy: branch slope near the turning points below 1e6 × typical stiffness.
fn boundary_realizable(l: &PeaLoop, side: Side) -> bool {
    let typical = l.max_abs_load() / l.half_span();
    let limit = 1e6 * typical;
    match l.endpoint_slopes(1e-10) {
        Some(s) => {
            let pick = match side {
                Side::Upper => [s[0], s[1]],
                Side::Lower => [s[2], s[3]],
            };
            pick.iter().all(|v| v.is_finite() && v.abs() <= limit)
        }
        None => [l.x1, l.x2].iter().all(|&x| l.branch_slope(side, x).abs() <= limit),
    }
}

/// Destabilising cubic a·s(1 − (s/r)²), s = x − x_c: stable at the centre, unstable at both ends.
pub fn destabilizing_profile(l: &PeaLoop, a: f64) -> ElasticProfile {
    let (c, r) = (l.centre(), l.half_span());
    let mut p = ElasticProfile::new(
        Representation::Destabilizing { a, centre: c, half_span: r },
        (l.x1, l.x2),
        Arc::new(move |x| {
            let s = x - c;
            a * s * (1.0 - (s / r).powi(2))
        }),
    );
    p.bound = Some(check_elastic_bound(&p, l, None));
    p
}

/// Zeros of F_s on its domain with stability from the local slope.
pub fn equilibria(fs: &ElasticProfile) -> Vec<Equilibrium> {
    let (a, b) = fs.domain;
    let m = 4096;
    let xs = linspace(a, b, m + 1);
    let vs: Vec<f64> = xs.iter().map(|&x| fs.eval(x)).collect();
    let scale = vs.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(f64::MIN_POSITIVE);
    let ztol = 1e-12 * scale;
    let slope_tol = 1e-9 * scale / (b - a);
    let mut out = Vec::new();
    let classify = |x: f64| {
        let s = fs.slope(x);
        let stability = if s > slope_tol {
            Stability::Stable
        } else if s < -slope_tol {
            Stability::Unstable
        } else {
            Stability::Marginal
        };
        Equilibrium::Point { x, stability }
    };
    let mut i = 0;
    while i <= m {
        if vs[i].abs() <= ztol {
            let start = i;
            while i < m && vs[i + 1].abs() <= ztol {
                i += 1;
            }
            if i > start {
                out.push(Equilibrium::Interval { lo: xs[start], hi: xs[i] });
            } else {
                out.push(classify(xs[i]));
            }
            i += 1;
            continue;
        }
        if i < m && vs[i + 1].abs() > ztol && vs[i].signum() != vs[i + 1].signum() {
            let f = |x: f64| fs.eval(x);
            let r = brent_root(&f, xs[i], xs[i + 1], vs[i], vs[i + 1], 1e-13 * (b - a), 200)
                .unwrap_or(0.5 * (xs[i] + xs[i + 1]));
            out.push(classify(r));
        }
        i += 1;
    }
    out
}

/// Actuator load F(t) = G(t) + F_s(x(t)).
pub fn actuator_load(fs: &ElasticProfile, g: &LoadWaveform, w: &PeriodicWaveform) -> Result<LoadWaveform> {
    g.ensure_same_grid(&w.position(), "load vs waveform")?;
    let (p1, p2, g1, g2, w1, w2) = (fs.clone(), fs.clone(), g.clone(), g.clone(), w.clone(), w.clone());
    Ok(Signal::from_fn(
        w.period(),
        w.n(),
        move |t| g1.value(t) + p1.eval(w1.x(t)),
        move |t| g2.rate(t) + p2.slope(w2.x(t)) * w2.v(t),
    ))
}

/// Outcome of a design on a zero-inertia loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeutralDesignReport {
    pub p_b_inelastic: f64,
    pub p_b_elastic: f64,
    /// P̄b saving over the inelastic case (zero for a neutral elasticity).
    pub improvement: f64,
    pub duty_cycle: f64,
    pub unidirectional: bool,
    pub equilibria: Vec<Equilibrium>,
    pub bound: BoundReport,
}

/// Evaluate a design on a dissipation-dominated (m = 0) system.
pub fn dissipation_dominated_design(
    d: &DynamicsModel,
    w: &PeriodicWaveform,
    g: &LoadWaveform,
    l: &PeaLoop,
    fs: &ElasticProfile,
) -> Result<NeutralDesignReport> {
    if !d.is_dissipation_dominated() {
        return Err(Error::invalid("dissipation-dominated designs need m = 0"));
    }
    let mid = l.g_mid.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if mid > 1e-9 * l.max_abs_load() {
        return Err(Error::invalid(format!("loop midline is not identically zero (max |G_mid| = {mid:.3e})")));
    }
    let v = w.velocity();
    let q = Penalty::Constant(1.0);
    let inelastic = metrics_time(g, &v, &q)?;
    let f = actuator_load(fs, g, w)?;
    let elastic = metrics_time(&f, &v, &q)?;
    let samples = f.samples();
    let tol = 1e-9 * elastic.peak_load.max(f64::MIN_POSITIVE);
    let unidirectional = samples.iter().all(|&x| x >= -tol) || samples.iter().all(|&x| x <= tol);
    Ok(NeutralDesignReport {
        p_b_inelastic: inelastic.p_b,
        p_b_elastic: elastic.p_b,
        improvement: inelastic.p_b - elastic.p_b,
        duty_cycle: duty_cycle(&f, 1e-6)?,
        unidirectional,
        equilibria: equilibria(fs),
        bound: check_elastic_bound(fs, l, None),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{inelastic_load, make_waveform, WaveformKind};
    use crate::workloop::build_pea_loop;
    use approx::assert_relative_eq;

    fn loop_for(m: f64, c: f64, cq: f64) -> (PeaLoop, DynamicsModel, PeriodicWaveform, Signal) {
        let w = make_waveform(WaveformKind::Harmonic, 1.0, 1.0, 0.0, 2048).unwrap();
        let d = if m == 0.0 { DynamicsModel::dissipation_dominated(c, cq) } else { DynamicsModel::new(m, c, cq) }.unwrap();
        let g = inelastic_load(&d, &w);
        (build_pea_loop(&g, &w).unwrap(), d, w, g)
    }

    /// Largest violation of −x³ ≤ G⁺ on the analytic branch, by brute-force scan.
    fn cubic_violation_oracle(c: f64) -> f64 {
        (0..=200_000)
            .map(|i| {
                let x = i as f64 / 200_000.0;
                x - x * x * x - c * (1.0 - x * x).sqrt()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn bound_check_examples() {
        let (l, ..) = loop_for(1.0, 1.0, 0.0);
        let d = (l.x1, l.x2);
        assert!(check_elastic_bound(&ElasticProfile::linear(1.0, d), &l, None).optimal);
        assert!(check_elastic_bound(&ElasticProfile::polynomial(vec![0.0, 0.0, 0.0, 1.0], 0.0, d), &l, None).optimal);
        let r = check_elastic_bound(&ElasticProfile::linear(3.0, d), &l, None);
        assert!(!r.optimal);
        assert!(r.worst_x.abs() > 0.9);
    }

    #[test]
    fn cubic_threshold_tracks_oracle() {
        for c in [0.3, 0.45, 0.5, 0.6, 1.0] {
            let (l, ..) = loop_for(1.0, c, 0.0);
            let p = polynomial_family(&l, 1.0, 3, 1.0).unwrap();
            let ok = check_elastic_bound(&p, &l, None).optimal;
            assert_eq!(ok, cubic_violation_oracle(c) <= 1e-12, "c = {c}");
        }
    }

    #[test]
    fn blend_search() {
        let (l, ..) = loop_for(1.0, 1.0, 0.0);
        assert_eq!(max_admissible_blend(&l, 1.0, 3).unwrap().blend_max, 1.0);
        let (l, ..) = loop_for(1.0, 0.25, 0.0);
        let b = max_admissible_blend(&l, 1.0, 3).unwrap();
        assert!(b.blend_max < 1.0 && b.blend_max > 0.0 && b.monotone);
        assert!(check_elastic_bound(&polynomial_family(&l, 1.0, 3, b.blend_max).unwrap(), &l, None).optimal);
        assert!(!check_elastic_bound(&polynomial_family(&l, 1.0, 3, b.blend_max + 1e-4).unwrap(), &l, None).optimal);
        let (l, ..) = loop_for(1.0, 50.0, 0.0);
        assert_eq!(max_admissible_blend(&l, 1.0, 5).unwrap().blend_max, 1.0);
    }

    #[test]
    fn freeplay_examples() {
        let (l, ..) = loop_for(1.0, 1.0, 0.0);
        let (lm, lp) = critical_displacements(&l).unwrap();
        assert_relative_eq!(lp, 0.5f64.sqrt(), epsilon = 1e-9);
        assert_relative_eq!(lm, -(0.5f64.sqrt()), epsilon = 1e-9);
        let lin = freeplay(&l, 1.0, 0.0).unwrap();
        assert_relative_eq!(lin.eval(0.37), 0.37, epsilon = 1e-15);
        let k = matched_freeplay_stiffness(&l, 0.3).unwrap();
        assert_relative_eq!(k, 1.0 / 0.7, epsilon = 1e-12);
        assert!(freeplay(&l, k, 0.3).unwrap().bound.unwrap().optimal);
        let wide = freeplay(&l, matched_freeplay_stiffness(&l, 0.8).unwrap(), 0.8).unwrap();
        assert!(!wide.bound.unwrap().optimal);
        assert!(matches!(equilibria(&freeplay(&l, k, 0.3).unwrap())[..], [Equilibrium::Interval { .. }]));
    }

    #[test]
    fn bistable_regimes_and_equilibria() {
        let (l, ..) = loop_for(1.0, 1.0, 0.0);
        let p = bistable_family(&l, 0.2, 0.02).unwrap();
        assert_eq!(p.regime, Some(Regime::Bistable));
        assert!(p.bound.as_ref().unwrap().optimal);
        let eq = equilibria(&p);
        let stable = eq.iter().filter(|e| matches!(e, Equilibrium::Point { stability: Stability::Stable, .. })).count();
        assert_eq!(eq.len(), 3);
        assert_eq!(stable, 2);
        assert_eq!(bistable_family(&l, 1.0, 0.02).unwrap().regime, Some(Regime::Linear));
        let lin = bistable_family(&l, 1.0, 0.0).unwrap();
        assert_relative_eq!(lin.eval(0.4), 0.4, epsilon = 1e-12);
        let lp = critical_displacements(&l).unwrap().1;
        assert_eq!(bistable_family(&l, lp, 0.02).unwrap().regime, Some(Regime::FreeplayHardening));
        assert_eq!(bistable_family(&l, 0.85, 0.02).unwrap().regime, Some(Regime::Hardening));
        // C¹ across the smoothed breakpoint
        let s1 = p.slope(0.2 - 1e-4);
        let s2 = p.slope(0.2 + 1e-4);
        assert!((s1 - s2).abs() < 0.05);
    }

    #[test]
    fn one_way_drive_quadratic_loop() {
        let (l, ..) = loop_for(1.0, 0.0, 1.0);
        let p = one_way_drive(&l, Side::Upper);
        assert!(p.realizable);
        for &x in &l.xs {
            assert!((p.eval(x) - (x - (1.0 - x * x))).abs() < 1e-12);
        }
        let (l, ..) = loop_for(1.0, 1.0, 0.0);
        assert!(!one_way_drive(&l, Side::Upper).realizable);
        assert!(!one_way_drive(&l, Side::Lower).realizable);
    }

    #[test]
    fn dissipation_dominated_cases() {
        let (l, d, w, g) = loop_for(0.0, 1.0, 0.0);
        let p = one_way_drive(&l, Side::Upper);
        let r = dissipation_dominated_design(&d, &w, &g, &l, &p).unwrap();
        assert!(r.unidirectional);
        assert!(r.improvement.abs() < 1e-9);
        let z = dissipation_dominated_design(&d, &w, &g, &l, &ElasticProfile::zero((l.x1, l.x2))).unwrap();
        assert!((z.p_b_inelastic - 0.5).abs() < 1e-12);
        let dst = destabilizing_profile(&l, 2.0);
        assert!(dst.bound.as_ref().unwrap().optimal);
        let eq = equilibria(&dst);
        let kinds: Vec<Stability> = eq
            .iter()
            .filter_map(|e| match e {
                Equilibrium::Point { stability, .. } => Some(*stability),
                _ => None,
            })
            .collect();
        assert_eq!(kinds, vec![Stability::Unstable, Stability::Stable, Stability::Unstable]);
        let (l1, d1, w1, g1) = loop_for(1.0, 1.0, 0.0);
        assert!(dissipation_dominated_design(&d1, &w1, &g1, &l1, &p).is_err());
    }

    #[test]
    fn linear_range_on_reference() {
        // k x inside ±√(1−x²) − x needs |k − 1| ≤ √(1−x²)/x for all x: only k = 1
        let (l, ..) = loop_for(1.0, 1.0, 0.0);
        let (lo, hi) = linear_stiffness_range(&l).unwrap();
        assert!((lo - 1.0).abs() < 1e-6 && (hi - 1.0).abs() < 1e-6, "{lo} {hi}");
    }

    #[test]
    fn equilibria_of_linear_spring() {
        let eq = equilibria(&ElasticProfile::linear(2.0, (-1.0, 1.0)));
        assert_eq!(eq, vec![Equilibrium::Point { x: 0.0, stability: Stability::Stable }]);
    }
}
