//! PEA and SEA work loops: branch construction, admissibility and accessibility.

use crate::error::{Error, Result};
use crate::models::{turning_times, PeriodicWaveform};
use crate::numeric::{cosine_grid, gl, sign_segments, Pchip, Segment};
use crate::signal::{LoadWaveform, ScalarFn, Signal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Points in the cosine-spaced branch tables.
pub const LOOP_GRID: usize = 1025;
/// Gauss cells used for loop-domain integrals over θ ∈ [0, π].
pub const LOOP_CELLS: usize = 256;
/// Cells excluded at each loop end by SEA bound and accessibility checks.
pub const GUARD_CELLS: usize = 2;

/// Which branch of a work loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Upper,
    Lower,
}

/// Inverse of a signal on one monotone half-cycle `[ta, tb]`.
#[derive(Clone)]
pub(crate) struct HalfCycle {
    ta: f64,
    tb: f64,
    value: ScalarFn,
    rate: ScalarFn,
    ts: Vec<f64>,
    vs: Vec<f64>,
    increasing: bool,
}

impl HalfCycle {
    fn new(sig: &Signal, ta: f64, tb: f64, what: &str) -> Result<Self> {
        let m = 512;
        let ts: Vec<f64> = (0..=m).map(|i| ta + (tb - ta) * i as f64 / m as f64).collect();
        let vs: Vec<f64> = ts.iter().map(|&t| sig.value(t)).collect();
        let increasing = vs[m] > vs[0];
        let ok = vs.windows(2).all(|w| if increasing { w[1] >= w[0] } else { w[1] <= w[0] });
        if !ok {
            return Err(Error::inadmissible(format!("{what} is not monotonic on a half-cycle")));
        }
        Ok(Self { ta, tb, value: sig.value_fn(), rate: sig.rate_fn(), ts, vs, increasing })
    }

    fn lo_hi(&self) -> (f64, f64) {
        let (a, b) = (self.vs[0], *self.vs.last().unwrap());
        (a.min(b), a.max(b))
    }

    /// Time within the half-cycle at which the signal equals `y` (clamped to its range).
    fn time_at(&self, y: f64) -> f64 {
        let m = self.vs.len() - 1;
        let (lo, hi) = self.lo_hi();
        if y <= lo {
            return if self.increasing { self.ta } else { self.tb };
        }
        if y >= hi {
            return if self.increasing { self.tb } else { self.ta };
        }
        // first table index whose value has passed y
        let k = if self.increasing {
            self.vs.partition_point(|&v| v < y)
        } else {
            self.vs.partition_point(|&v| v > y)
        }
        .clamp(1, m);
        let (mut a, mut b) = (self.ts[k - 1], self.ts[k]);
        let g = |t: f64| (self.value)(t) - y;
        let (mut ga, gb) = (self.vs[k - 1] - y, self.vs[k] - y);
        if ga == 0.0 {
            return a;
        }
        if gb == 0.0 {
            return b;
        }
        let mut t = a + (b - a) * ga / (ga - gb);
        let tol = 4.0 * f64::EPSILON * (self.tb.abs() + self.ta.abs() + 1.0);
        for _ in 0..100 {
            let gt = g(t);
            if gt == 0.0 {
                return t;
            }
            if gt.signum() == ga.signum() {
                a = t;
                ga = gt;
            } else {
                b = t;
            }
            if b - a <= tol {
                break;
            }
            let d = (self.rate)(t);
            let newton = t - gt / d;
            t = if d != 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
            if (t - a).min(b - t) <= tol && b - a > 1e3 * tol {
                t = 0.5 * (a + b);
            }
        }
        t
    }
}

/// Work loop of the inelastic load against displacement.
#[derive(Clone)]
pub struct PeaLoop {
    pub period: f64,
    pub x1: f64,
    pub x2: f64,
    /// Cosine-spaced displacement grid.
    pub xs: Vec<f64>,
    pub g_upper: Vec<f64>,
    pub g_lower: Vec<f64>,
    pub g_mid: Vec<f64>,
    pub g_arc: Vec<f64>,
    /// Branch velocities ẋ±(x); empty for loops built from tables.
    pub v_upper: Vec<f64>,
    pub v_lower: Vec<f64>,
    source: PeaSource,
}

#[derive(Clone)]
enum PeaSource {
    Time { upper: HalfCycle, lower: HalfCycle, load: Signal, position: Signal },
    Table { upper: Pchip, lower: Pchip },
}

impl std::fmt::Debug for PeaLoop {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeaLoop")
            .field("range", &(self.x1, self.x2))
            .field("period", &self.period)
            .finish_non_exhaustive()
    }
}

/// Rising and falling half-cycle windows of a signal with a single max and min.
fn half_windows(t_max: f64, t_min: f64, period: f64) -> ((f64, f64), (f64, f64)) {
    let rise = (t_min, if t_max > t_min { t_max } else { t_max + period });
    let fall = (t_max, if t_min > t_max { t_min } else { t_min + period });
    (rise, fall)
}

/// Split the inelastic loop into branches G±(x) with G_arc ≥ 0.
pub fn build_pea_loop(g: &LoadWaveform, w: &PeriodicWaveform) -> Result<PeaLoop> {
    let pos = w.position();
    g.ensure_same_grid(&pos, "load vs waveform")?;
    let (t_max, t_min) = w.turning_times();
    let (rise, fall) = half_windows(t_max, t_min, w.period());
    let hr = HalfCycle::new(&pos, rise.0, rise.1, "displacement")?;
    let hf = HalfCycle::new(&pos, fall.0, fall.1, "displacement")?;
    let (x1, x2) = w.range();
    let xs = cosine_grid(x1, x2, LOOP_GRID);
    let tr: Vec<f64> = xs.iter().map(|&x| hr.time_at(x)).collect();
    let tf: Vec<f64> = xs.iter().map(|&x| hf.time_at(x)).collect();
    let gr: Vec<f64> = tr.iter().map(|&t| g.value(t)).collect();
    let gf: Vec<f64> = tf.iter().map(|&t| g.value(t)).collect();

    let scale = gr.iter().chain(&gf).fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let tol = 1e-9 * scale;
    let min_diff = gr.iter().zip(&gf).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min);
    let max_diff = gr.iter().zip(&gf).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
    if min_diff < -tol && max_diff > tol {
        return Err(Error::inadmissible(format!(
            "self-intersecting work loop: branch difference spans [{min_diff:.3e}, {max_diff:.3e}]"
        )));
    }
    if max_diff <= tol {
        return Err(Error::inadmissible(
            "non-dissipative work loop: the rising branch is not above the falling branch",
        ));
    }
    let v_upper = tr.iter().map(|&t| w.v(t)).collect();
    let v_lower = tf.iter().map(|&t| w.v(t)).collect();
    let l = assemble_pea(
        w.period(),
        xs,
        gr,
        gf,
        v_upper,
        v_lower,
        PeaSource::Time { upper: hr, lower: hf, load: g.clone(), position: pos },
    );
    if l.net_power() <= 0.0 {
        return Err(Error::inadmissible("non-dissipative work loop: zero or negative area"));
    }
    Ok(l)
}

fn assemble_pea(
    period: f64,
    xs: Vec<f64>,
    g_upper: Vec<f64>,
    g_lower: Vec<f64>,
    v_upper: Vec<f64>,
    v_lower: Vec<f64>,
    source: PeaSource,
) -> PeaLoop {
    let g_mid = g_upper.iter().zip(&g_lower).map(|(a, b)| 0.5 * (a + b)).collect();
    let g_arc = g_upper.iter().zip(&g_lower).map(|(a, b)| 0.5 * (a - b)).collect();
    PeaLoop {
        period,
        x1: xs[0],
        x2: *xs.last().unwrap(),
        xs,
        g_upper,
        g_lower,
        g_mid,
        g_arc,
        v_upper,
        v_lower,
        source,
    }
}

impl PeaLoop {
    /// Loop from branch tables on a strictly increasing grid (no time information).
    pub fn from_tables(xs: Vec<f64>, g_upper: Vec<f64>, g_lower: Vec<f64>, period: f64) -> Result<Self> {
        if g_upper.len() != xs.len() || g_lower.len() != xs.len() {
            return Err(Error::invalid("branch tables must match the grid length"));
        }
        let up = Pchip::new(xs.clone(), g_upper.clone())?;
        let lo = Pchip::new(xs.clone(), g_lower.clone())?;
        Ok(assemble_pea(period, xs, g_upper, g_lower, vec![], vec![], PeaSource::Table { upper: up, lower: lo }))
    }

    /// Loop from a midline and half-width.
    pub fn from_mid_arc(xs: Vec<f64>, mid: &[f64], arc: &[f64], period: f64) -> Result<Self> {
        let up = mid.iter().zip(arc).map(|(m, a)| m + a).collect();
        let lo = mid.iter().zip(arc).map(|(m, a)| m - a).collect();
        Self::from_tables(xs, up, lo, period)
    }

    pub fn centre(&self) -> f64 {
        0.5 * (self.x1 + self.x2)
    }

    pub fn half_span(&self) -> f64 {
        0.5 * (self.x2 - self.x1)
    }

    pub fn has_time_source(&self) -> bool {
        matches!(self.source, PeaSource::Time { .. })
    }

    /// Branch value G±(x) at any x in range.
    pub fn branch(&self, side: Side, x: f64) -> f64 {
        match (&self.source, side) {
            (PeaSource::Time { upper, load, .. }, Side::Upper) => load.value(upper.time_at(x)),
            (PeaSource::Time { lower, load, .. }, Side::Lower) => load.value(lower.time_at(x)),
            (PeaSource::Table { upper, .. }, Side::Upper) => upper.eval(x),
            (PeaSource::Table { lower, .. }, Side::Lower) => lower.eval(x),
        }
    }

    pub fn upper(&self, x: f64) -> f64 {
        self.branch(Side::Upper, x)
    }

    pub fn lower(&self, x: f64) -> f64 {
        self.branch(Side::Lower, x)
    }

    pub fn arc(&self, x: f64) -> f64 {
        0.5 * (self.upper(x) - self.lower(x))
    }

    pub fn mid(&self, x: f64) -> f64 {
        0.5 * (self.upper(x) + self.lower(x))
    }

    /// Time on the given half-cycle at which x(t) = x; `None` for table loops.
    pub fn branch_time(&self, side: Side, x: f64) -> Option<f64> {
        match (&self.source, side) {
            (PeaSource::Time { upper, .. }, Side::Upper) => Some(upper.time_at(x)),
            (PeaSource::Time { lower, .. }, Side::Lower) => Some(lower.time_at(x)),
            _ => None,
        }
    }

    /// Branch slope dG±/dx = Ġ/ẋ at the branch time (time-sourced loops) or from the table.
    pub fn branch_slope(&self, side: Side, x: f64) -> f64 {
        match &self.source {
            PeaSource::Time { load, position, .. } => {
                let t = self.branch_time(side, x).unwrap();
                load.rate(t) / position.rate(t)
            }
            PeaSource::Table { upper, lower } => match side {
                Side::Upper => upper.deriv(x),
                Side::Lower => lower.deriv(x),
            },
        }
    }

    /// Slope of each branch a relative distance `eps` of the period in from its turning points.
    pub(crate) fn endpoint_slopes(&self, eps: f64) -> Option<[f64; 4]> {
        match &self.source {
            PeaSource::Time { upper, lower, load, position } => {
                let dt = eps * self.period;
                let s = |t: f64| load.rate(t) / position.rate(t);
                Some([s(upper.ta + dt), s(upper.tb - dt), s(lower.ta + dt), s(lower.tb - dt)])
            }
            PeaSource::Table { .. } => None,
        }
    }

    /// x as a function of θ ∈ [0, π] (cosine substitution).
    pub fn x_of_theta(&self, th: f64) -> f64 {
        self.centre() - self.half_span() * th.cos()
    }

    /// ∫ f(x) dx over [x₁, x₂] by Gauss quadrature in θ.
    pub fn integrate_x(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        let r = self.half_span();
        let g = |th: f64| f(self.x_of_theta(th)) * r * th.sin();
        let h = PI / LOOP_CELLS as f64;
        (0..LOOP_CELLS).map(|i| gl(&g, i as f64 * h, (i + 1) as f64 * h)).sum()
    }

    /// θ-segments of constant sign of `s(x)`.
    pub fn sign_segments_x(&self, s: &dyn Fn(f64) -> f64, deadband: f64) -> Vec<Segment> {
        let g = |th: f64| s(self.x_of_theta(th));
        sign_segments(&g, 0.0, PI, LOOP_CELLS, deadband)
    }

    /// Net power (1/T)∫(G⁺ − G⁻)dx.
    pub fn net_power(&self) -> f64 {
        self.integrate_x(&|x| self.upper(x) - self.lower(x)) / self.period
    }

    pub fn max_arc(&self) -> f64 {
        self.g_arc.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_abs_load(&self) -> f64 {
        self.g_upper.iter().chain(&self.g_lower).fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Outcome of the PEA loop admissibility checks.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AdmissibilityReport {
    pub closed: bool,
    pub bivalued: bool,
    pub arc_positive: bool,
    pub dissipative: bool,
    pub admissible: bool,
    pub closure_gap: f64,
    pub min_arc: f64,
    pub net_power: f64,
}

/// Closedness, bivaluedness, arc positivity and clockwise (dissipative) travel.
pub fn check_admissible_pea(l: &PeaLoop) -> AdmissibilityReport {
    let tol = 1e-9 * l.max_abs_load().max(f64::MIN_POSITIVE);
    let n = l.xs.len();
    let closure_gap = (l.g_upper[0] - l.g_lower[0]).abs().max((l.g_upper[n - 1] - l.g_lower[n - 1]).abs());
    let bivalued = l.xs.windows(2).all(|w| w[1] > w[0]) && l.g_upper.iter().chain(&l.g_lower).all(|v| v.is_finite());
    let min_arc = l.g_arc.iter().cloned().fold(f64::INFINITY, f64::min);
    let net_power = l.net_power();
    let closed = closure_gap <= 1e-6 * l.max_abs_load().max(f64::MIN_POSITIVE);
    let arc_positive = min_arc >= -tol;
    let dissipative = net_power > 0.0;
    AdmissibilityReport {
        closed,
        bivalued,
        arc_positive,
        dissipative,
        admissible: closed && bivalued && arc_positive && dissipative,
        closure_gap,
        min_arc,
        net_power,
    }
}

/// SEA loop: displacement branches over the load range.
#[derive(Clone)]
pub struct SeaLoop {
    pub period: f64,
    pub f1: f64,
    pub f2: f64,
    /// Cosine-spaced load grid.
    pub fs: Vec<f64>,
    pub x_upper: Vec<f64>,
    pub x_lower: Vec<f64>,
    /// Branch gradients from Ẋ±/Ḟ± (one-sided differences at flagged ends).
    pub xp_upper: Vec<f64>,
    pub xp_lower: Vec<f64>,
    /// Branch gradients by direct differentiation of the X± tables.
    pub xp_upper_direct: Vec<f64>,
    pub xp_lower_direct: Vec<f64>,
    pub xdot_upper: Vec<f64>,
    pub xdot_lower: Vec<f64>,
    pub fdot_upper: Vec<f64>,
    pub fdot_lower: Vec<f64>,
    /// Points where Ḟ± vanishes (loop ends).
    pub flagged: Vec<bool>,
    /// T⁺ window (Ḟ < 0), as [start, end) with end possibly beyond T.
    pub window_upper: (f64, f64),
    pub window_lower: (f64, f64),
    source: SeaSource,
}

#[derive(Clone)]
enum SeaSource {
    Time { upper: HalfCycle, lower: HalfCycle, position: Signal, load: Signal, fdot_scale: f64 },
    Table { upper: Pchip, lower: Pchip },
}

impl std::fmt::Debug for SeaLoop {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SeaLoop")
            .field("range", &(self.f1, self.f2))
            .field("period", &self.period)
            .finish_non_exhaustive()
    }
}

fn direct_gradient(fs: &[f64], xs: &[f64]) -> Vec<f64> {
    let n = fs.len();
    (0..n)
        .map(|j| {
            if j == 0 {
                (xs[1] - xs[0]) / (fs[1] - fs[0])
            } else if j + 1 == n {
                (xs[n - 1] - xs[n - 2]) / (fs[n - 1] - fs[n - 2])
            } else {
                let (h0, h1) = (fs[j] - fs[j - 1], fs[j + 1] - fs[j]);
                let (d0, d1) = ((xs[j] - xs[j - 1]) / h0, (xs[j + 1] - xs[j]) / h1);
                (h1 * d0 + h0 * d1) / (h0 + h1)
            }
        })
        .collect()
}

/// Segment the load requirement into T± and tabulate X±(F).
pub fn build_sea_loop(f: &LoadWaveform, w: &PeriodicWaveform) -> Result<SeaLoop> {
    let pos = w.position();
    f.ensure_same_grid(&pos, "load vs waveform")?;
    let period = w.period();
    let rate = f.rate_fn();
    let (t_fmax, t_fmin) = turning_times(&*rate, period, f.n())
        .map_err(|e| Error::inadmissible(format!("load requirement: {e}")))?;
    let (rise, fall) = half_windows(t_fmax, t_fmin, period);
    let hu = HalfCycle::new(f, fall.0, fall.1, "load")?;
    let hl = HalfCycle::new(f, rise.0, rise.1, "load")?;
    let (f1, f2) = (f.value(t_fmin), f.value(t_fmax));
    let fs = cosine_grid(f1, f2, LOOP_GRID);
    let tu: Vec<f64> = fs.iter().map(|&v| hu.time_at(v)).collect();
    let tl: Vec<f64> = fs.iter().map(|&v| hl.time_at(v)).collect();
    let x_upper: Vec<f64> = tu.iter().map(|&t| w.x(t)).collect();
    let x_lower: Vec<f64> = tl.iter().map(|&t| w.x(t)).collect();
    let xdot_upper: Vec<f64> = tu.iter().map(|&t| w.v(t)).collect();
    let xdot_lower: Vec<f64> = tl.iter().map(|&t| w.v(t)).collect();
    let fdot_upper: Vec<f64> = tu.iter().map(|&t| f.rate(t)).collect();
    let fdot_lower: Vec<f64> = tl.iter().map(|&t| f.rate(t)).collect();

    let span = w.range().1 - w.range().0;
    let worst = x_upper.iter().zip(&x_lower).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min);
    if worst < -1e-9 * span {
        return Err(Error::inadmissible(format!(
            "branch ordering violated: X+ - X- reaches {worst:.3e}"
        )));
    }
    let fdot_scale = fdot_upper.iter().chain(&fdot_lower).fold(0.0f64, |a, v| a.max(v.abs()));
    let n = fs.len();
    let flagged: Vec<bool> = (0..n).map(|j| j == 0 || j + 1 == n).collect();
    let xp_upper_direct = direct_gradient(&fs, &x_upper);
    let xp_lower_direct = direct_gradient(&fs, &x_lower);
    let ratio = |xd: &[f64], fd: &[f64], direct: &[f64]| -> Vec<f64> {
        (0..n).map(|j| if flagged[j] { direct[j] } else { xd[j] / fd[j] }).collect()
    };
    let xp_upper = ratio(&xdot_upper, &fdot_upper, &xp_upper_direct);
    let xp_lower = ratio(&xdot_lower, &fdot_lower, &xp_lower_direct);
    Ok(SeaLoop {
        period,
        f1,
        f2,
        fs,
        x_upper,
        x_lower,
        xp_upper,
        xp_lower,
        xp_upper_direct,
        xp_lower_direct,
        xdot_upper,
        xdot_lower,
        fdot_upper,
        fdot_lower,
        flagged,
        window_upper: fall,
        window_lower: rise,
        source: SeaSource::Time { upper: hu, lower: hl, position: pos, load: f.clone(), fdot_scale },
    })
}

impl SeaLoop {
    /// Loop from displacement-branch tables on a strictly increasing load grid.
    pub fn from_tables(fs: Vec<f64>, x_upper: Vec<f64>, x_lower: Vec<f64>, period: f64) -> Result<Self> {
        let up = Pchip::new(fs.clone(), x_upper.clone())?;
        let lo = Pchip::new(fs.clone(), x_lower.clone())?;
        let n = fs.len();
        let xp_upper: Vec<f64> = fs.iter().map(|&v| up.deriv(v)).collect();
        let xp_lower: Vec<f64> = fs.iter().map(|&v| lo.deriv(v)).collect();
        Ok(SeaLoop {
            period,
            f1: fs[0],
            f2: fs[n - 1],
            xp_upper_direct: direct_gradient(&fs, &x_upper),
            xp_lower_direct: direct_gradient(&fs, &x_lower),
            xp_upper,
            xp_lower,
            xdot_upper: vec![],
            xdot_lower: vec![],
            fdot_upper: vec![],
            fdot_lower: vec![],
            flagged: (0..n).map(|j| j == 0 || j + 1 == n).collect(),
            window_upper: (f64::NAN, f64::NAN),
            window_lower: (f64::NAN, f64::NAN),
            fs,
            x_upper,
            x_lower,
            source: SeaSource::Table { upper: up, lower: lo },
        })
    }

    pub fn f_hat(&self) -> f64 {
        self.f1.abs().max(self.f2.abs())
    }

    /// Time on T± at which F(t) = `force`; `None` for table loops.
    pub fn branch_time(&self, side: Side, force: f64) -> Option<f64> {
        match (&self.source, side) {
            (SeaSource::Time { upper, .. }, Side::Upper) => Some(upper.time_at(force)),
            (SeaSource::Time { lower, .. }, Side::Lower) => Some(lower.time_at(force)),
            _ => None,
        }
    }

    /// X±(F).
    pub fn x_branch(&self, side: Side, force: f64) -> f64 {
        match &self.source {
            SeaSource::Time { position, .. } => position.value(self.branch_time(side, force).unwrap()),
            SeaSource::Table { upper, lower } => match side {
                Side::Upper => upper.eval(force),
                Side::Lower => lower.eval(force),
            },
        }
    }

    /// X'±(F) = Ẋ±/Ḟ±; near the loop ends |Ḟ±| is floored so the value stays finite.
    pub fn xp_branch(&self, side: Side, force: f64) -> f64 {
        match &self.source {
            SeaSource::Time { position, load, fdot_scale, .. } => {
                let t = self.branch_time(side, force).unwrap();
                let fd = load.rate(t);
                let floor = 1e-12 * fdot_scale;
                let fd = if fd.abs() < floor {
                    match side {
                        Side::Upper => -floor,
                        Side::Lower => floor,
                    }
                } else {
                    fd
                };
                position.rate(t) / fd
            }
            SeaSource::Table { upper, lower } => match side {
                Side::Upper => upper.deriv(force),
                Side::Lower => lower.deriv(force),
            },
        }
    }

    pub fn centre(&self) -> f64 {
        0.5 * (self.f1 + self.f2)
    }

    pub fn half_span(&self) -> f64 {
        0.5 * (self.f2 - self.f1)
    }

    /// ∫ g(F) dF over [F₁, F₂] by Gauss quadrature in θ.
    pub fn integrate_f(&self, g: &dyn Fn(f64) -> f64) -> f64 {
        let (c, r) = (self.centre(), self.half_span());
        let h = |th: f64| g(c - r * th.cos()) * r * th.sin();
        let d = PI / LOOP_CELLS as f64;
        (0..LOOP_CELLS).map(|i| gl(&h, i as f64 * d, (i + 1) as f64 * d)).sum()
    }

    /// Net power in gradient form (1/T)∫F(X'⁻ − X'⁺)dF.
    pub fn net_power_gradient_form(&self) -> f64 {
        self.integrate_f(&|f| f * (self.xp_branch(Side::Lower, f) - self.xp_branch(Side::Upper, f))) / self.period
    }

    /// Net power in area form (1/T)∫(X⁺ − X⁻)dF.
    pub fn net_power_area_form(&self) -> f64 {
        self.integrate_f(&|f| self.x_branch(Side::Upper, f) - self.x_branch(Side::Lower, f)) / self.period
    }

    /// Indices used by bound checks (guard band removed at both ends).
    pub fn checked_indices(&self) -> std::ops::Range<usize> {
        GUARD_CELLS..self.fs.len() - GUARD_CELLS
    }

    /// Largest |X'±| over the checked part of the grid.
    pub fn gradient_scale(&self) -> f64 {
        self.checked_indices()
            .map(|j| self.xp_upper[j].abs().max(self.xp_lower[j].abs()))
            .fold(0.0, f64::max)
    }
}

/// Outcome of the SEA accessibility conditions.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AccessibilityReport {
    /// min over F < 0 of X'⁺ − X'⁻ (must be ≥ 0).
    pub margin_negative: f64,
    /// min over F > 0 of X'⁻ − X'⁺ (must be ≥ 0).
    pub margin_positive: f64,
    /// |X'⁺(0) − X'⁻(0)|, when F = 0 lies inside the load range.
    pub zero_gap: Option<f64>,
    pub tolerance: f64,
    pub zero_tolerance: f64,
    /// True when the zero-load equality holds only marginally (gap below tolerance but nonzero).
    pub boundary_case: bool,
    pub accessible: bool,
}

/// Check X'⁻ ≤ X'⁺ on [F₁, 0], X'⁺ ≤ X'⁻ on [0, F₂] and X'⁺(0) = X'⁻(0).
pub fn sea_accessibility(l: &SeaLoop) -> AccessibilityReport {
    let scale = l.gradient_scale().max(f64::MIN_POSITIVE);
    let tol = 1e-9 * scale;
    let tol0 = 1e-6 * scale;
    let (mut mn, mut mp) = (f64::INFINITY, f64::INFINITY);
    for j in l.checked_indices() {
        let (f, up, lo) = (l.fs[j], l.xp_upper[j], l.xp_lower[j]);
        if f < 0.0 {
            mn = mn.min(up - lo);
        } else if f > 0.0 {
            mp = mp.min(lo - up);
        }
    }
    let zero_gap = (l.f1 < 0.0 && l.f2 > 0.0)
        .then(|| (l.xp_branch(Side::Upper, 0.0) - l.xp_branch(Side::Lower, 0.0)).abs());
    let zero_ok = zero_gap.is_none_or(|g| g <= tol0);
    AccessibilityReport {
        margin_negative: mn,
        margin_positive: mp,
        zero_gap,
        tolerance: tol,
        zero_tolerance: tol0,
        boundary_case: zero_gap.is_some_and(|g| g <= tol0),
        accessible: mn >= -tol && mp >= -tol && zero_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{inelastic_load, make_waveform, DynamicsModel, WaveformKind};
    use approx::assert_relative_eq;

    fn reference(m: f64, c: f64, cq: f64) -> (PeriodicWaveform, Signal) {
        let w = make_waveform(WaveformKind::Harmonic, 1.0, 1.0, 0.0, 2048).unwrap();
        let d = if m == 0.0 {
            DynamicsModel::dissipation_dominated(c, cq).unwrap()
        } else {
            DynamicsModel::new(m, c, cq).unwrap()
        };
        let g = inelastic_load(&d, &w);
        (w, g)
    }

    #[test]
    fn linear_reference_branches() {
        let (w, g) = reference(1.0, 1.0, 0.0);
        let l = build_pea_loop(&g, &w).unwrap();
        for (j, &x) in l.xs.iter().enumerate() {
            let r = (1.0 - x * x).max(0.0).sqrt();
            assert!((l.g_upper[j] - (-x + r)).abs() < 1e-12, "x={x}");
            assert!((l.g_lower[j] - (-x - r)).abs() < 1e-12);
            assert!((l.g_mid[j] + x).abs() < 1e-12);
        }
        assert_relative_eq!(l.upper(0.3), -0.3 + 0.91f64.sqrt(), epsilon = 1e-13);
        assert!(l.v_upper[512] > 0.0);
        assert!(check_admissible_pea(&l).admissible);
        assert_relative_eq!(l.net_power(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn quadratic_and_zero_inertia_branches() {
        let (w, g) = reference(1.0, 0.0, 1.0);
        let l = build_pea_loop(&g, &w).unwrap();
        for (j, &x) in l.xs.iter().enumerate() {
            assert!((l.g_arc[j] - (1.0 - x * x)).abs() < 1e-12);
            assert!((l.g_upper[j] - (-x + 1.0 - x * x)).abs() < 1e-12);
        }
        let (w, g) = reference(0.0, 1.0, 0.0);
        let l = build_pea_loop(&g, &w).unwrap();
        assert!(l.g_mid.iter().all(|v| v.abs() < 1e-12));
        assert_relative_eq!(l.upper(0.6), 0.8, epsilon = 1e-13);
    }

    #[test]
    fn rebuild_from_mid_and_arc() {
        let (w, g) = reference(1.0, 1.0, 0.0);
        let l = build_pea_loop(&g, &w).unwrap();
        let r = PeaLoop::from_mid_arc(l.xs.clone(), &l.g_mid, &l.g_arc, l.period).unwrap();
        for j in 0..l.xs.len() {
            assert!((r.g_upper[j] - l.g_upper[j]).abs() <= 1e-15 * (1.0 + l.g_upper[j].abs()));
            assert!((r.g_lower[j] - l.g_lower[j]).abs() <= 1e-15 * (1.0 + l.g_lower[j].abs()));
        }
    }

    #[test]
    fn negative_area_loop_fails_dissipation() {
        let xs = cosine_grid(-1.0, 1.0, 65);
        let up: Vec<f64> = xs.iter().map(|x| -x - (1.0 - x * x).max(0.0).sqrt()).collect();
        let lo: Vec<f64> = xs.iter().map(|x| -x + (1.0 - x * x).max(0.0).sqrt()).collect();
        let l = PeaLoop::from_tables(xs, up, lo, 2.0 * PI).unwrap();
        let r = check_admissible_pea(&l);
        assert!(!r.dissipative && !r.arc_positive && !r.admissible);
        assert!(r.closed && r.bivalued);
    }

    #[test]
    fn counter_clockwise_loop_is_rejected() {
        let w = make_waveform(WaveformKind::Harmonic, 1.0, 1.0, 0.0, 256).unwrap();
        let g = Signal::from_fn(w.period(), 256, |t: f64| t.sin(), |t: f64| t.cos());
        assert!(matches!(build_pea_loop(&g, &w), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn sea_reference_branches() {
        let (w, f) = reference(1.0, 1.0, 0.0);
        let l = build_sea_loop(&f, &w).unwrap();
        assert_relative_eq!(l.f2, 2f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(l.f1, -(2f64.sqrt()), epsilon = 1e-12);
        let n = l.fs.len();
        for (j, &v) in l.fs.iter().enumerate() {
            // the loop ends are the exact extrema ±√2; the oracle's radicand is ill-conditioned there
            let v = if l.flagged[j] { v.signum() * 2f64.sqrt() } else { v };
            let r = (2.0 - v * v).max(0.0).sqrt();
            assert!((l.x_upper[j] - (-v + r) / 2.0).abs() < 1e-9, "{j} of {n}");
            assert!((l.x_lower[j] - (-v - r) / 2.0).abs() < 1e-9);
        }
        assert_relative_eq!(l.xp_branch(Side::Upper, 0.0), -0.5, epsilon = 1e-12);
        assert_relative_eq!(l.xp_branch(Side::Lower, 0.0), -0.5, epsilon = 1e-12);
        // gradients from the time parameterisation agree with direct differentiation away from the ends
        for j in 50..l.fs.len() - 50 {
            assert!((l.xp_upper[j] - l.xp_upper_direct[j]).abs() < 1e-3 * (1.0 + l.xp_upper[j].abs()));
        }
        assert!(l.fdot_upper[1..1024].iter().all(|&v| v < 0.0));
        assert!(l.fdot_lower[1..1024].iter().all(|&v| v > 0.0));
    }

    #[test]
    fn sea_net_power_forms_agree() {
        let (w, f) = reference(1.0, 1.0, 0.0);
        let l = build_sea_loop(&f, &w).unwrap();
        assert_relative_eq!(l.net_power_area_form(), 0.5, epsilon = 1e-10);
        assert_relative_eq!(l.net_power_gradient_form(), 0.5, epsilon = 1e-8);
    }

    #[test]
    fn linear_sea_is_accessible() {
        let (w, f) = reference(1.0, 1.0, 0.0);
        let r = sea_accessibility(&build_sea_loop(&f, &w).unwrap());
        assert!(r.accessible, "{r:?}");
        assert!(r.margin_negative >= -r.tolerance && r.margin_positive >= -r.tolerance);
        assert!(r.zero_gap.unwrap() <= r.zero_tolerance);
    }

    #[test]
    fn asymmetric_table_loop_is_inaccessible() {
        let fs = cosine_grid(-(2f64.sqrt()), 2f64.sqrt(), 257);
        let up: Vec<f64> = fs
            .iter()
            .map(|f| (-f + (2.0 - f * f).max(0.0).sqrt()) / 2.0 + 0.2 * f * (2.0 - f * f))
            .collect();
        let lo: Vec<f64> = fs.iter().map(|f| (-f - (2.0 - f * f).max(0.0).sqrt()) / 2.0).collect();
        let l = SeaLoop::from_tables(fs, up, lo, 2.0 * PI).unwrap();
        let r = sea_accessibility(&l);
        assert!(r.zero_gap.unwrap() > 0.3);
        assert!(!r.accessible);
    }
}
