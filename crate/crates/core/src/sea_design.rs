//! Series elasticities: compliance profiles, the SEA elastic-bound check and constructions.

use crate::error::{Error, Result};
use crate::models::PeriodicWaveform;
use crate::numeric::{linspace, Pchip};
use crate::signal::{DisplacementWaveform, LoadWaveform, ScalarFn, Signal};
use crate::workloop::{SeaLoop, Side};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ComplianceKind {
    /// F_s⁻¹(F) = F/k₁ + C.
    Linear { k1: f64 },
    /// Dwell-time compliance, F_s⁻¹ = −X± + C.
    Boundary { side: Side },
    /// F_s⁻¹ = −(λX⁺ + (1 − λ)X⁻) + C.
    Blend { lambda: f64 },
    Tabulated { fs: Vec<f64>, gradient: Vec<f64> },
    /// Infinitely stiff spring.
    Rigid,
    Custom { label: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignClass {
    /// Gradient ≥ 0 throughout.
    Stable,
    /// Gradient ≤ 0 throughout.
    Unstable,
    /// Gradient changes sign; the spring is not globally invertible.
    Mixed,
}

/// Compliance F_s⁻¹(F) on a load range, with its gradient.
#[derive(Clone)]
pub struct ComplianceProfile {
    pub kind: ComplianceKind,
    pub domain: (f64, f64),
    pub offset: f64,
    pub sign_class: SignClass,
    grad: ScalarFn,
    inv: ScalarFn,
}

impl fmt::Debug for ComplianceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplianceProfile")
            .field("kind", &self.kind)
            .field("domain", &self.domain)
            .field("offset", &self.offset)
            .field("sign_class", &self.sign_class)
            .finish_non_exhaustive()
    }
}

fn classify(grad: &dyn Fn(f64) -> f64, domain: (f64, f64)) -> SignClass {
    let (a, b) = domain;
    if b <= a {
        return SignClass::Stable;
    }
    // interior samples only: boundary compliances are unbounded at the ends
    let gs: Vec<f64> = linspace(a, b, 1027)[1..1026].iter().map(|&f| grad(f)).collect();
    let scale = gs.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let tol = 1e-12 * scale;
    if gs.iter().all(|&g| g >= -tol) {
        SignClass::Stable
    } else if gs.iter().all(|&g| g <= tol) {
        SignClass::Unstable
    } else {
        SignClass::Mixed
    }
}

impl ComplianceProfile {
    /// Profile from closed-form gradient and integrated displacement (offset included in `inv`).
    pub fn from_fns<G, I>(kind: ComplianceKind, domain: (f64, f64), offset: f64, grad: G, inv: I) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        I: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let sign_class = classify(&grad, domain);
        Self { kind, domain, offset, sign_class, grad: Arc::new(grad), inv: Arc::new(inv) }
    }

    pub fn linear(k1: f64, domain: (f64, f64), offset: f64) -> Result<Self> {
        if !(k1 > 0.0 && k1.is_finite()) {
            return Err(Error::invalid(format!("linear compliance needs k1 > 0, got {k1}")));
        }
        Ok(Self::from_fns(ComplianceKind::Linear { k1 }, domain, offset, move |_| 1.0 / k1, move |f| f / k1 + offset))
    }

    pub fn rigid(domain: (f64, f64), offset: f64) -> Self {
        Self::from_fns(ComplianceKind::Rigid, domain, offset, |_| 0.0, move |_| offset)
    }

    /// Gradient table on a strictly increasing load grid; F_s⁻¹ is its running integral plus `offset`.
    pub fn tabulated(fs: Vec<f64>, gradient: Vec<f64>, offset: f64) -> Result<Self> {
        let g = Pchip::new(fs.clone(), gradient.clone())?;
        let cum = g.cumulative_integral();
        let integ = Pchip::new(fs.clone(), cum)?;
        let domain = (fs[0], *fs.last().unwrap());
        Ok(Self::from_fns(
            ComplianceKind::Tabulated { fs, gradient },
            domain,
            offset,
            move |f| g.eval(f),
            move |f| integ.eval(f) + offset,
        ))
    }

    /// (F_s⁻¹)'(F).
    pub fn grad(&self, f: f64) -> f64 {
        (self.grad)(f)
    }

    /// F_s⁻¹(F), offset included.
    pub fn inv(&self, f: f64) -> f64 {
        (self.inv)(f)
    }

    pub fn invertible(&self) -> bool {
        self.sign_class != SignClass::Mixed && !matches!(self.kind, ComplianceKind::Rigid)
    }

    /// Same profile with a different integration constant.
    pub fn with_offset(&self, offset: f64) -> Self {
        let inv = self.inv.clone();
        let shift = offset - self.offset;
        Self { offset, inv: Arc::new(move |f| inv(f) + shift), ..self.clone() }
    }

    /// Samples (F, gradient, F_s⁻¹) on `n` uniform points.
    pub fn table(&self, n: usize) -> Vec<(f64, f64, f64)> {
        linspace(self.domain.0, self.domain.1, n).into_iter().map(|f| (f, self.grad(f), self.inv(f))).collect()
    }

    /// Spring law F_s(δ) by inverting F_s⁻¹ over its domain; linear extrapolation outside.
    pub fn force_fn(&self) -> Result<ScalarFn> {
        match (&self.kind, self.sign_class) {
            (ComplianceKind::Linear { k1 }, _) => {
                let (k, c) = (*k1, self.offset);
                Ok(Arc::new(move |d| k * (d - c)))
            }
            (ComplianceKind::Rigid, _) => Err(Error::invalid("a rigid spring has no finite force law")),
            (_, SignClass::Mixed) => Err(Error::inadmissible("compliance gradient changes sign; spring law is not single-valued")),
            (_, class) => {
                let fs = linspace(self.domain.0, self.domain.1, 2049);
                let mut pairs: Vec<(f64, f64)> = fs.iter().map(|&f| (self.inv(f), f)).collect();
                if class == SignClass::Unstable {
                    pairs.reverse();
                }
                pairs.dedup_by(|a, b| a.0 <= b.0);
                let (ds, vs): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
                let p = Pchip::new(ds, vs)?;
                Ok(Arc::new(move |d| p.eval(d)))
            }
        }
    }
}

/// Result of checking the SEA elastic-bound conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeaBoundReport {
    pub optimal: bool,
    /// Largest excursion of −(F_s⁻¹)' outside its interval (≤ 0 when inside).
    pub max_violation: f64,
    pub worst_f: f64,
    pub worst_side: Side,
    /// max over both branches of |−(F_s⁻¹)'(0) − X'±(0)|, when F = 0 is in range.
    pub zero_margin: Option<f64>,
    pub tolerance: f64,
    pub zero_tolerance: f64,
}

/// Check X'⁻ ≤ −(F_s⁻¹)' ≤ X'⁺ for F < 0, X'⁺ ≤ −(F_s⁻¹)' ≤ X'⁻ for F > 0 and equality at F = 0.
///
/// The two guard cells at each loop end (where Ḟ → 0) are skipped.
pub fn check_sea_bound(cp: &ComplianceProfile, l: &SeaLoop, tol: Option<f64>) -> SeaBoundReport {
    let scale = l.gradient_scale().max(f64::MIN_POSITIVE);
    let tol = tol.unwrap_or(1e-9 * scale);
    let tol0 = 1e-6 * scale;
    let mut worst = (f64::NEG_INFINITY, 0.0, Side::Upper);
    for j in l.checked_indices() {
        let f = l.fs[j];
        if f == 0.0 {
            continue;
        }
        let g = -cp.grad(f);
        let (up, lo) = (l.xp_upper[j], l.xp_lower[j]);
        // (below, above) are the interval ends; report which branch is crossed
        let (below, below_side, above, above_side) = if f < 0.0 {
            (lo, Side::Lower, up, Side::Upper)
        } else {
            (up, Side::Upper, lo, Side::Lower)
        };
        if below - g > worst.0 {
            worst = (below - g, f, below_side);
        }
        if g - above > worst.0 {
            worst = (g - above, f, above_side);
        }
    }
    let zero_margin = (l.f1 < 0.0 && l.f2 > 0.0).then(|| {
        let g0 = -cp.grad(0.0);
        (g0 - l.xp_branch(Side::Upper, 0.0)).abs().max((g0 - l.xp_branch(Side::Lower, 0.0)).abs())
    });
    SeaBoundReport {
        optimal: worst.0 <= tol && zero_margin.is_none_or(|m| m <= tol0),
        max_violation: worst.0,
        worst_f: worst.1,
        worst_side: worst.2,
        zero_margin,
        tolerance: tol,
        zero_tolerance: tol0,
    }
}

/// Envelope X⁺(F) − X⁺(0) ≤ −(F_s⁻¹(F) − F_s⁻¹(0)) ≤ X⁻(F) − X⁻(0).
///
/// Necessary for the gradient condition, not sufficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratedBound {
    pub fs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

pub fn integrated_bound(l: &SeaLoop) -> Result<IntegratedBound> {
    if !(l.f1 < 0.0 && l.f2 > 0.0) {
        return Err(Error::invalid("integrated bound needs F = 0 inside the load range"));
    }
    let (u0, l0) = (l.x_branch(Side::Upper, 0.0), l.x_branch(Side::Lower, 0.0));
    Ok(IntegratedBound {
        fs: l.fs.clone(),
        lower: l.x_upper.iter().map(|x| x - u0).collect(),
        upper: l.x_lower.iter().map(|x| x - l0).collect(),
    })
}

impl IntegratedBound {
    /// Largest excursion of the rebased profile outside the envelope (≤ 0 when inside).
    pub fn max_excursion(&self, cp: &ComplianceProfile) -> f64 {
        let base = cp.inv(0.0);
        self.fs
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&f, (&lo, &hi))| {
                let y = -(cp.inv(f) - base);
                (lo - y).max(y - hi)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, cp: &ComplianceProfile, tol: f64) -> bool {
        self.max_excursion(cp) <= tol
    }
}

/// Optimal linear compliance m/(m²ω² + c²) and its stiffness k₁.
pub fn optimal_linear_compliance(m: f64, c: f64, omega: f64) -> Result<(f64, f64)> {
    if !(m > 0.0) {
        return Err(Error::invalid(
            "no finite optimal linear compliance without inertia (m = 0)",
        ));
    }
    if !(c >= 0.0 && omega > 0.0) {
        return Err(Error::invalid(format!("need c ≥ 0 and ω > 0, got c={c}, ω={omega}")));
    }
    let compliance = m / (m * m * omega * omega + c * c);
    Ok((compliance, 1.0 / compliance))
}

/// Global-resonant frequency ω₀√(1 − 4ζ²).
pub fn global_resonant_frequency(omega0: f64, zeta: f64) -> Result<f64> {
    if !(zeta >= 0.0) || !(omega0 > 0.0) {
        return Err(Error::invalid(format!("need ω₀ > 0 and ζ ≥ 0, got ω₀={omega0}, ζ={zeta}")));
    }
    if zeta >= 0.5 {
        return Err(Error::invalid(format!(
            "no real global-resonant frequency for ζ = {zeta} ≥ 1/2"
        )));
    }
    Ok(omega0 * (1.0 - 4.0 * zeta * zeta).sqrt())
}

fn require_accessible(l: &SeaLoop) -> Result<()> {
    let acc = crate::workloop::sea_accessibility(l);
    if acc.accessible {
        Ok(())
    } else {
        Err(Error::inadmissible(format!(
            "loop is not accessible (margins {:.3e} / {:.3e}, zero gap {:?})",
            acc.margin_negative, acc.margin_positive, acc.zero_gap
        )))
    }
}

/// Dwell-time compliance: F_s⁻¹ = −X± so the actuator rests through the chosen half-cycle.
pub fn dwell_time_compliance(l: &SeaLoop, side: Side) -> Result<ComplianceProfile> {
    require_accessible(l)?;
    let (a, b) = (Arc::new(l.clone()), Arc::new(l.clone()));
    Ok(ComplianceProfile::from_fns(
        ComplianceKind::Boundary { side },
        (l.f1, l.f2),
        0.0,
        move |f| -a.xp_branch(side, f),
        move |f| -b.x_branch(side, f),
    ))
}

/// Convex combination of the two dwell-time compliances.
pub fn blended_compliance(l: &SeaLoop, lambda: f64) -> Result<ComplianceProfile> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("blend λ must lie in [0, 1], got {lambda}")));
    }
    require_accessible(l)?;
    let (a, b) = (Arc::new(l.clone()), Arc::new(l.clone()));
    Ok(ComplianceProfile::from_fns(
        ComplianceKind::Blend { lambda },
        (l.f1, l.f2),
        0.0,
        move |f| -(lambda * a.xp_branch(Side::Upper, f) + (1.0 - lambda) * a.xp_branch(Side::Lower, f)),
        move |f| -(lambda * b.x_branch(Side::Upper, f) + (1.0 - lambda) * b.x_branch(Side::Lower, f)),
    ))
}

/// Actuator displacement u = x + F_s⁻¹(F); u̇ = ẋ + (F_s⁻¹)'(F)·Ḟ.
pub fn actuator_displacement(
    cp: &ComplianceProfile,
    f: &LoadWaveform,
    w: &PeriodicWaveform,
) -> Result<DisplacementWaveform> {
    f.ensure_same_grid(&w.position(), "load vs waveform")?;
    let (lo, hi) = (f.samples().into_iter().fold(f64::INFINITY, f64::min), f.samples().into_iter().fold(f64::NEG_INFINITY, f64::max));
    let slack = 1e-9 * (cp.domain.1 - cp.domain.0).abs().max(hi.abs()).max(lo.abs());
    if lo < cp.domain.0 - slack || hi > cp.domain.1 + slack {
        return Err(Error::invalid(format!(
            "load range [{lo:.6}, {hi:.6}] exceeds compliance domain [{:.6}, {:.6}]",
            cp.domain.0, cp.domain.1
        )));
    }
    let (c1, c2, f1, f2, w1, w2) = (cp.clone(), cp.clone(), f.clone(), f.clone(), w.clone(), w.clone());
    Ok(Signal::from_fn(
        w.period(),
        w.n(),
        move |t| w1.x(t) + c1.inv(f1.value(t)),
        move |t| w2.v(t) + c2.grad(f2.value(t)) * f2.rate(t),
    ))
}
