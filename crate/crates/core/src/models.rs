//! Prescribed periodic kinematics and the inelastic dynamics operator.

use crate::error::{Error, Result};
use crate::numeric::{brent_root, FourierSeries};
use crate::signal::{LoadWaveform, Signal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

/// Shape of the prescribed output motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveformKind {
    Harmonic,
    SmoothedTriangle,
    SmoothedSquare,
    SmoothedSawtooth,
    Tabulated,
}

#[derive(Debug, Clone)]
enum Shape {
    Harmonic,
    Series(Arc<FourierSeries>),
}

/// Periodic output kinematics x(t) composed of one rising and one falling half-cycle.
#[derive(Debug, Clone)]
pub struct PeriodicWaveform {
    kind: WaveformKind,
    amplitude: f64,
    omega: f64,
    period: f64,
    smoothing: f64,
    n: usize,
    shape: Shape,
    x1: f64,
    x2: f64,
    t_max: f64,
    t_min: f64,
}

/// Build a waveform of the given kind.
///
/// Smoothed kinds are closed-form smooth generators sampled on `n` points and
/// stored as their trigonometric interpolant:
/// triangle `asin((1-s)cosθ)/asin(1-s)`, square `tanh(cosθ/s)/tanh(1/s)`,
/// sawtooth `cos(θ + (1-s)cosθ)`. Smaller `s` gives sharper corners.
pub fn make_waveform(
    kind: WaveformKind,
    amplitude: f64,
    omega: f64,
    smoothing: f64,
    n: usize,
) -> Result<PeriodicWaveform> {
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::invalid(format!("amplitude must be positive, got {amplitude}")));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid(format!("angular frequency must be positive, got {omega}")));
    }
    if n < 64 || n % 2 != 0 {
        return Err(Error::invalid(format!("sample count must be even and >= 64, got {n}")));
    }
    if !(0.0..=1.0).contains(&smoothing) {
        return Err(Error::invalid(format!("smoothing must lie in [0, 1], got {smoothing}")));
    }
    let period = 2.0 * PI / omega;
    let generator: Box<dyn Fn(f64) -> f64> = match kind {
        WaveformKind::Harmonic => {
            return Ok(PeriodicWaveform {
                kind,
                amplitude,
                omega,
                period,
                smoothing,
                n,
                shape: Shape::Harmonic,
                x1: -amplitude,
                x2: amplitude,
                t_max: 0.0,
                t_min: period / 2.0,
            })
        }
        WaveformKind::Tabulated => {
            return Err(Error::invalid("tabulated waveforms are built from samples"))
        }
        _ if smoothing == 0.0 => {
            return Err(Error::inadmissible(format!(
                "{kind:?} with zero smoothing has corners; its half-cycles are not smooth and monotone"
            )))
        }
        WaveformKind::SmoothedTriangle => {
            let r = 1.0 - smoothing;
            if r < 1e-9 {
                Box::new(|th: f64| th.cos())
            } else {
                let norm = r.asin();
                Box::new(move |th: f64| (r * th.cos()).asin() / norm)
            }
        }
        WaveformKind::SmoothedSquare => {
            let norm = (1.0 / smoothing).tanh();
            Box::new(move |th: f64| (th.cos() / smoothing).tanh() / norm)
        }
        WaveformKind::SmoothedSawtooth => {
            let r = 1.0 - smoothing;
            Box::new(move |th: f64| (th + r * th.cos()).cos())
        }
    };
    let samples: Vec<f64> = (0..n)
        .map(|i| amplitude * generator(2.0 * PI * i as f64 / n as f64))
        .collect();
    let fs = FourierSeries::from_samples(&samples, period, 1e-15)?;
    PeriodicWaveform::from_series(kind, fs, smoothing, n)
}

impl PeriodicWaveform {
    /// Waveform from uniform samples over one period.
    pub fn tabulated(values: &[f64], period: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::invalid("period must be positive"));
        }
        if values.len() < 64 || values.len() % 2 != 0 {
            return Err(Error::invalid(format!(
                "tabulated waveform needs an even number (>= 64) of samples, got {}",
                values.len()
            )));
        }
        let fs = FourierSeries::from_samples(values, period, 0.0)?;
        Self::from_series(WaveformKind::Tabulated, fs, 0.0, values.len())
    }

    fn from_series(kind: WaveformKind, fs: FourierSeries, smoothing: f64, n: usize) -> Result<Self> {
        let period = 2.0 * PI / fs.omega;
        let omega = fs.omega;
        let fs = Arc::new(fs);
        let (t_max, t_min) = turning_times(&|t| fs.eval_all(t)[1], period, n)?;
        let (x2, x1) = (fs.eval(t_max), fs.eval(t_min));
        if x2 <= x1 {
            return Err(Error::inadmissible("waveform has zero range"));
        }
        Ok(Self {
            kind,
            amplitude: 0.5 * (x2 - x1),
            omega,
            period,
            smoothing,
            n,
            shape: Shape::Series(fs),
            x1,
            x2,
            t_max,
            t_min,
        })
    }

    pub fn kind(&self) -> WaveformKind {
        self.kind
    }
    /// Half the peak-to-peak range.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn period(&self) -> f64 {
        self.period
    }
    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }
    pub fn n(&self) -> usize {
        self.n
    }
    /// Displacement range [x₁, x₂].
    pub fn range(&self) -> (f64, f64) {
        (self.x1, self.x2)
    }
    /// Times of the maximum and minimum of x within [0, T).
    pub fn turning_times(&self) -> (f64, f64) {
        (self.t_max, self.t_min)
    }
    /// Harmonic count of the stored series (1 for harmonic kinematics).
    pub fn harmonics(&self) -> usize {
        match &self.shape {
            Shape::Harmonic => 1,
            Shape::Series(fs) => fs.harmonics(),
        }
    }

    /// x, ẋ, ẍ and jerk at `t`.
    pub fn eval_all(&self, t: f64) -> [f64; 4] {
        match &self.shape {
            Shape::Harmonic => {
                let (s, c) = (self.omega * t).sin_cos();
                let (a, w) = (self.amplitude, self.omega);
                [a * c, -a * w * s, -a * w * w * c, a * w * w * w * s]
            }
            Shape::Series(fs) => fs.eval_all(t),
        }
    }

    pub fn x(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Harmonic => self.amplitude * (self.omega * t).cos(),
            Shape::Series(fs) => fs.eval(t),
        }
    }
    pub fn v(&self, t: f64) -> f64 {
        self.eval_all(t)[1]
    }
    pub fn acc(&self, t: f64) -> f64 {
        self.eval_all(t)[2]
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.period * i as f64 / self.n as f64).collect()
    }

    pub fn position(&self) -> Signal {
        let (a, b) = (self.clone(), self.clone());
        Signal::from_fn(self.period, self.n, move |t| a.x(t), move |t| b.v(t))
    }

    pub fn velocity(&self) -> Signal {
        let w = self.clone();
        Signal::from_fn(self.period, self.n, move |t| w.eval_all(t)[1], {
            let w = self.clone();
            move |t| w.eval_all(t)[2]
        })
    }
}

/// Locate the single maximum and minimum of x via sign changes of ẋ.
pub(crate) fn turning_times(v: &dyn Fn(f64) -> f64, period: f64, n: usize) -> Result<(f64, f64)> {
    let m = (16 * n).max(4096);
    let h = period / m as f64;
    let mut down = Vec::new();
    let mut up = Vec::new();
    let mut prev_t = 0.5 * h;
    let mut prev = v(prev_t);
    for i in 1..=m {
        let t = (i as f64 + 0.5) * h;
        let cur = v(t);
        if prev > 0.0 && cur <= 0.0 {
            down.push((prev_t, t, prev, cur));
        } else if prev < 0.0 && cur >= 0.0 {
            up.push((prev_t, t, prev, cur));
        }
        if cur != 0.0 {
            prev = cur;
            prev_t = t;
        }
    }
    if down.len() != 1 || up.len() != 1 {
        return Err(Error::inadmissible(format!(
            "waveform must have exactly two monotonic half-cycles, found {} maxima and {} minima",
            down.len(),
            up.len()
        )));
    }
    let refine = |(a, b, fa, fb): (f64, f64, f64, f64)| -> Result<f64> {
        Ok(brent_root(v, a, b, fa, fb, 1e-15 * period, 200)?.rem_euclid(period))
    };
    Ok((refine(down[0])?, refine(up[0])?))
}

/// True iff max |x(tᵢ) − x(T − tᵢ)| ≤ tol·x̂ on the waveform grid.
pub fn is_symmetric(w: &PeriodicWaveform, tol: f64) -> bool {
    symmetry_defect(w) <= tol * w.amplitude()
}

/// max |x(tᵢ) − x(T − tᵢ)| on the grid.
pub fn symmetry_defect(w: &PeriodicWaveform) -> f64 {
    w.times()
        .into_iter()
        .map(|t| (w.x(t) - w.x(w.period() - t)).abs())
        .fold(0.0, f64::max)
}

/// Newtonian operator D(x, ẋ, ẍ) = mẍ + cẋ + c_q ẋ|ẋ|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsModel {
    pub m: f64,
    pub c: f64,
    #[serde(default)]
    pub c_q: f64,
}

impl DynamicsModel {
    /// Inertial model; `m` must be positive.
    pub fn new(m: f64, c: f64, c_q: f64) -> Result<Self> {
        if m == 0.0 {
            return Err(Error::invalid(
                "zero inertia is only allowed through DynamicsModel::dissipation_dominated",
            ));
        }
        let d = Self { m, c, c_q };
        d.validate()?;
        Ok(d)
    }

    /// Zero-inertia model for the dissipation-dominated case.
    pub fn dissipation_dominated(c: f64, c_q: f64) -> Result<Self> {
        let d = Self { m: 0.0, c, c_q };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !(ok(self.m) && ok(self.c) && ok(self.c_q)) {
            return Err(Error::invalid(format!(
                "m, c, c_q must be finite and non-negative (got {}, {}, {})",
                self.m, self.c, self.c_q
            )));
        }
        if self.c == 0.0 && self.c_q == 0.0 {
            return Err(Error::invalid("at least one of c, c_q must be positive"));
        }
        Ok(())
    }

    pub fn is_dissipation_dominated(&self) -> bool {
        self.m == 0.0
    }

    /// Dissipative part c ẋ + c_q ẋ|ẋ|.
    pub fn damping_force(&self, v: f64) -> f64 {
        self.c * v + self.c_q * v * v.abs()
    }

    pub fn force(&self, _x: f64, v: f64, a: f64) -> f64 {
        self.m * a + self.damping_force(v)
    }
}

/// G(t) = D(x, ẋ, ẍ) with Ġ from the waveform jerk.
pub fn inelastic_load(d: &DynamicsModel, w: &PeriodicWaveform) -> LoadWaveform {
    let (d1, w1, d2, w2) = (*d, w.clone(), *d, w.clone());
    Signal::from_fn(
        w.period(),
        w.n(),
        move |t| {
            let e = w1.eval_all(t);
            d1.force(e[0], e[1], e[2])
        },
        move |t| {
            let e = w2.eval_all(t);
            d2.m * e[3] + d2.c * e[2] + 2.0 * d2.c_q * e[1].abs() * e[2]
        },
    )
}

/// Power absorbed by dissipation, cẋ² + c_q|ẋ|³.
pub fn dissipated_power(d: &DynamicsModel, w: &PeriodicWaveform) -> Signal {
    let (d1, w1, d2, w2) = (*d, w.clone(), *d, w.clone());
    Signal::from_fn(
        w.period(),
        w.n(),
        move |t| {
            let v = w1.v(t);
            d1.damping_force(v) * v
        },
        move |t| {
            let e = w2.eval_all(t);
            (2.0 * d2.c * e[1] + 3.0 * d2.c_q * e[1] * e[1].abs()) * e[2]
        },
    )
}

/// Read a two-column (t, x) CSV sampled uniformly over one period.
///
/// A header row is allowed. A trailing sample that repeats the first one
/// (closing the period) is dropped.
pub fn read_waveform_csv(path: &Path) -> Result<PeriodicWaveform> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut t = Vec::new();
    let mut x = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::invalid("waveform CSV needs two columns (t, x)"));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => {
                t.push(a);
                x.push(b);
            }
            _ if t.is_empty() => continue,
            _ => return Err(Error::invalid(format!("unparsable row {:?}", rec))),
        }
    }
    if t.len() < 3 {
        return Err(Error::invalid("waveform CSV has too few rows"));
    }
    let dt = t[1] - t[0];
    if !(dt > 0.0) || t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt) {
        return Err(Error::invalid("waveform CSV time column must be uniformly increasing"));
    }
    let range = x.iter().cloned().fold(f64::MIN, f64::max) - x.iter().cloned().fold(f64::MAX, f64::min);
    if x.len() % 2 == 1 && (x[x.len() - 1] - x[0]).abs() <= 1e-9 * range {
        x.pop();
    }
    let period = dt * x.len() as f64;
    PeriodicWaveform::tabulated(&x, period)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn harmonic_reference_values() {
        let w = make_waveform(WaveformKind::Harmonic, 1.0, 1.0, 0.0, 1024).unwrap();
        let e = w.eval_all(0.0);
        assert_eq!((e[0], e[1], e[2]), (1.0, 0.0, -1.0));
        let w = make_waveform(WaveformKind::Harmonic, 2.0, 3.0, 0.0, 2048).unwrap();
        assert_eq!(w.range(), (-2.0, 2.0));
        assert_relative_eq!(w.period(), 2.0 * PI / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn argument_validation() {
        assert!(make_waveform(WaveformKind::Harmonic, 0.0, 1.0, 0.0, 1024).is_err());
        assert!(make_waveform(WaveformKind::Harmonic, 1.0, -1.0, 0.0, 1024).is_err());
        assert!(make_waveform(WaveformKind::Harmonic, 1.0, 1.0, 0.0, 63).is_err());
        assert!(make_waveform(WaveformKind::Harmonic, 1.0, 1.0, 0.0, 65).is_err());
        assert!(matches!(
            make_waveform(WaveformKind::SmoothedSawtooth, 1.0, 1.0, 0.0, 1024),
            Err(Error::Inadmissible(_))
        ));
    }

    #[test]
    fn smoothed_kinds_are_admissible_and_classified() {
        for (kind, sym) in [
            (WaveformKind::SmoothedTriangle, true),
            (WaveformKind::SmoothedSquare, true),
            (WaveformKind::SmoothedSawtooth, false),
        ] {
            let w = make_waveform(kind, 1.0, 1.0, 0.1, 2048).unwrap();
            assert_relative_eq!(w.range().1, 1.0, epsilon = 1e-9);
            assert_relative_eq!(w.range().0, -1.0, epsilon = 1e-9);
            assert_eq!(is_symmetric(&w, 1e-9), sym, "{kind:?}");
            assert!((w.x(0.0) - w.x(w.period())).abs() < 1e-12);
            assert!((w.v(0.0) - w.v(w.period())).abs() < 1e-9);
        }
        let h = make_waveform(WaveformKind::Harmonic, 1.0, 1.0, 0.0, 256).unwrap();
        assert!(is_symmetric(&h, 1e-12));
    }

    #[test]
    fn four_segment_waveform_is_rejected() {
        let n = 256;
        let v: Vec<f64> = (0..n).map(|i| (4.0 * PI * i as f64 / n as f64).cos()).collect();
        assert!(matches!(PeriodicWaveform::tabulated(&v, 1.0), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn inelastic_loads_match_closed_forms() {
        let w = make_waveform(WaveformKind::Harmonic, 1.0, 1.0, 0.0, 2048).unwrap();
        let lin = inelastic_load(&DynamicsModel::new(1.0, 1.0, 0.0).unwrap(), &w);
        let quad = inelastic_load(&DynamicsModel::new(1.0, 0.0, 1.0).unwrap(), &w);
        let diss = inelastic_load(&DynamicsModel::dissipation_dominated(1.0, 0.0).unwrap(), &w);
        for t in lin.times() {
            assert_relative_eq!(lin.value(t), -t.cos() - t.sin(), epsilon = 1e-14);
            let s = t.sin();
            assert_relative_eq!(quad.value(t), -t.cos() - s.signum() * s * s, epsilon = 1e-14);
            assert_relative_eq!(diss.value(t), -t.sin(), epsilon = 1e-14);
            assert_relative_eq!(lin.rate(t), t.sin() - t.cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn model_validation() {
        assert!(DynamicsModel::new(0.0, 1.0, 0.0).is_err());
        assert!(DynamicsModel::new(1.0, 0.0, 0.0).is_err());
        assert!(DynamicsModel::new(1.0, -1.0, 0.0).is_err());
        assert!(DynamicsModel::dissipation_dominated(1.0, 0.0).is_ok());
        let d = DynamicsModel::new(2.0, 0.5, 0.25).unwrap();
        assert_eq!(d.force(0.0, 0.0, 0.0), 0.0);
        assert!(d.damping_force(-0.3) < 0.0 && d.damping_force(0.3) > 0.0);
    }

    #[test]
    fn csv_roundtrip_recovers_waveform() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.csv");
        let n = 128;
        let mut s = String::from("t,x\n");
        for i in 0..=n {
            let t = 2.0 * PI * i as f64 / n as f64;
            s += &format!("{t},{}\n", 0.5 * t.cos() + 0.1 * (2.0 * t).cos());
        }
        std::fs::write(&p, s).unwrap();
        let w = read_waveform_csv(&p).unwrap();
        assert_eq!(w.n(), n);
        assert_relative_eq!(w.period(), 2.0 * PI, epsilon = 1e-12);
        assert_relative_eq!(w.x(0.3), 0.5 * 0.3f64.cos() + 0.1 * 0.6f64.cos(), epsilon = 1e-12);
        assert_eq!(w.kind(), WaveformKind::Tabulated);
    }
}
