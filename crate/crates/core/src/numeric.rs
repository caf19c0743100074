//! Quadrature, root finding, interpolation and Fourier series helpers.

use crate::error::{Error, Result};
use rustfft::{num_complex::Complex, FftPlanner};
use std::f64::consts::PI;

/// 8-point Gauss–Legendre nodes on [-1, 1], ascending.
const GL_X: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_W: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Gauss–Legendre nodes mapped onto [a, b].
pub fn gl_nodes(a: f64, b: f64) -> [f64; 8] {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    GL_X.map(|x| m + h * x)
}

/// 8-point Gauss–Legendre rule on [a, b].
pub fn gl<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for i in 0..8 {
        s += GL_W[i] * f(m + h * GL_X[i]);
    }
    s * h
}

/// Composite Gauss–Legendre over `cells` equal cells.
pub fn gl_composite<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, cells: usize) -> f64 {
    let h = (b - a) / cells as f64;
    (0..cells)
        .map(|i| gl(f, a + i as f64 * h, a + (i + 1) as f64 * h))
        .sum()
}

/// Interval on which a function has one sign (`0` when it stays inside the dead-band).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub sign: i8,
}

fn classify(v: f64, deadband: f64) -> i8 {
    if v > deadband {
        1
    } else if v < -deadband {
        -1
    } else {
        0
    }
}

/// Partition [a, b] into pieces of constant sign of `s`.
///
/// Each of the `cells` equal cells is probed at its ends and Gauss nodes; sign
/// changes beyond `deadband` are located by Brent's method and split the cell.
pub fn sign_segments<F: Fn(f64) -> f64 + ?Sized>(
    s: &F,
    a: f64,
    b: f64,
    cells: usize,
    deadband: f64,
) -> Vec<Segment> {
    let h = (b - a) / cells as f64;
    let mut out = Vec::with_capacity(cells + 16);
    let mut left_val = s(a);
    for i in 0..cells {
        let t0 = a + i as f64 * h;
        let t1 = if i + 1 == cells { b } else { a + (i + 1) as f64 * h };
        let right_val = s(t1);
        let nodes = gl_nodes(t0, t1);
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(10);
        pts.push((t0, left_val));
        for &t in &nodes {
            pts.push((t, s(t)));
        }
        pts.push((t1, right_val));

        let mut start = t0;
        let mut last: Option<(f64, f64, i8)> = None;
        let mut seg_sign = 0i8;
        for &(t, v) in &pts {
            let c = classify(v, deadband);
            if c == 0 {
                continue;
            }
            match last {
                Some((tp, vp, cp)) if cp != c => {
                    let root = brent_root(s, tp, t, vp, v, 1e-15 * (1.0 + t.abs()), 100)
                        .unwrap_or(0.5 * (tp + t));
                    if root > start {
                        out.push(Segment { a: start, b: root, sign: cp });
                        start = root;
                    }
                    seg_sign = c;
                }
                None => seg_sign = c,
                _ => {}
            }
            last = Some((t, v, c));
        }
        out.push(Segment { a: start, b: t1, sign: seg_sign });
        left_val = right_val;
    }
    out
}

/// Brent's root finder on a bracket with known end values.
pub fn brent_root<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numerical(format!("root not bracketed on [{a}, {b}]")));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::Numerical("root finder did not converge".into()))
}

/// Convenience wrapper evaluating the bracket ends.
pub fn find_root<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    brent_root(f, a, b, f(a), f(b), tol, 200)
}

/// Brent's minimiser on [a, b]; returns (argmin, min).
pub fn brent_min<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x = a + CGOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-14;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if !(p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x) || p >= q * (b - x)) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Maximum of `f` on [a, b]: dense scan followed by Brent refinement.
pub fn maximize<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, samples: usize) -> (f64, f64) {
    let h = (b - a) / samples as f64;
    let (mut best_i, mut best) = (0usize, f64::NEG_INFINITY);
    for i in 0..=samples {
        let v = f(a + i as f64 * h);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = (a + (best_i as f64 - 1.0) * h).max(a);
    let hi = (a + (best_i as f64 + 1.0) * h).min(b);
    let (x, neg) = brent_min(&|t| -f(t), lo, hi, 1e-12);
    if -neg >= best {
        (x, -neg)
    } else {
        (a + best_i as f64 * h, best)
    }
}

/// `n` points from a to b inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + i as f64 * h })
        .collect()
}

/// Chebyshev–Lobatto points on [a, b], clustered at both ends.
pub fn cosine_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    (0..n)
        .map(|j| match j {
            0 => a,
            _ if j + 1 == n => b,
            _ => c - r * (PI * j as f64 / (n - 1) as f64).cos(),
        })
        .collect()
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson).
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::invalid("interpolant needs at least two matching points"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) || x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::invalid("interpolation abscissae must be finite and strictly increasing"));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { x, y, d })
    }

    pub fn xs(&self) -> &[f64] {
        &self.x
    }

    pub fn ys(&self) -> &[f64] {
        &self.y
    }

    fn locate(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    /// Value; linear extrapolation with the end slopes.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0] + self.d[0] * (t - self.x[0]);
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1] + self.d[n - 1] * (t - self.x[n - 1]);
        }
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.d[0];
        }
        if t >= self.x[n - 1] {
            return self.d[n - 1];
        }
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let dy = self.y[i + 1] - self.y[i];
        (6.0 * s * (1.0 - s) * dy) / h
            + (1.0 - 4.0 * s + 3.0 * s * s) * self.d[i]
            + (3.0 * s * s - 2.0 * s) * self.d[i + 1]
    }

    /// Exact running integral of the interpolant from x[0] at each node.
    pub fn cumulative_integral(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.x.len());
        let mut acc = 0.0;
        out.push(0.0);
        for i in 0..self.x.len() - 1 {
            let h = self.x[i + 1] - self.x[i];
            acc += h * (self.y[i] + self.y[i + 1]) / 2.0 + h * h * (self.d[i] - self.d[i + 1]) / 12.0;
            out.push(acc);
        }
        out
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Finite trigonometric series `a0 + Σ a_k cos kωt + b_k sin kωt`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    pub omega: f64,
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl FourierSeries {
    /// Trigonometric interpolant of uniform samples over one period.
    ///
    /// Trailing harmonics whose magnitude falls below `rel_trunc` times the
    /// largest one are dropped; the Nyquist term is discarded.
    pub fn from_samples(values: &[f64], period: f64, rel_trunc: f64) -> Result<Self> {
        let n = values.len();
        if n < 4 || n % 2 != 0 {
            return Err(Error::invalid("trigonometric interpolation needs an even sample count >= 4"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite sample"));
        }
        let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let nf = n as f64;
        let kmax = n / 2 - 1;
        let a: Vec<f64> = (1..=kmax).map(|k| 2.0 * buf[k].re / nf).collect();
        let b: Vec<f64> = (1..=kmax).map(|k| -2.0 * buf[k].im / nf).collect();
        let big = a.iter().zip(&b).map(|(x, y)| x.hypot(*y)).fold(0.0, f64::max);
        let keep = a
            .iter()
            .zip(&b)
            .rposition(|(x, y)| x.hypot(*y) > rel_trunc * big)
            .map_or(0, |i| i + 1);
        Ok(Self {
            omega: 2.0 * PI / period,
            a0: buf[0].re / nf,
            a: a[..keep].to_vec(),
            b: b[..keep].to_vec(),
        })
    }

    pub fn harmonics(&self) -> usize {
        self.a.len()
    }

    /// Value and first three time derivatives at `t`.
    pub fn eval_all(&self, t: f64) -> [f64; 4] {
        let th = self.omega * t;
        let (s1, c1) = th.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut out = [self.a0, 0.0, 0.0, 0.0];
        for k in 0..self.a.len() {
            if k > 0 {
                if k % 32 == 0 {
                    let (ss, cc) = ((k + 1) as f64 * th).sin_cos();
                    s = ss;
                    c = cc;
                } else {
                    let (sn, cn) = (s * c1 + c * s1, c * c1 - s * s1);
                    s = sn;
                    c = cn;
                }
            }
            let w = (k + 1) as f64 * self.omega;
            let (ak, bk) = (self.a[k], self.b[k]);
            let cs = ak * c + bk * s;
            let sc = bk * c - ak * s;
            out[0] += cs;
            out[1] += w * sc;
            out[2] -= w * w * cs;
            out[3] -= w * w * w * sc;
        }
        out
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_all(t)[0]
    }
}

/// Spectral derivative of uniform periodic samples.
pub fn spectral_derivative(values: &[f64], period: f64) -> Result<Vec<f64>> {
    let fs = FourierSeries::from_samples(values, period, 0.0)?;
    let n = values.len();
    Ok((0..n)
        .map(|i| fs.eval_all(period * i as f64 / n as f64)[1])
        .collect())
}
