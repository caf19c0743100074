//! Periodic scalar signals evaluable at any time, with their time derivative.

use crate::error::{Error, Result};
use crate::numeric::FourierSeries;
use std::fmt;
use std::sync::Arc;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A T-periodic signal with a nominal uniform grid of `n` samples.
#[derive(Clone)]
pub struct Signal {
    period: f64,
    n: usize,
    value: ScalarFn,
    rate: ScalarFn,
}

/// Load requirement F(t) or G(t).
pub type LoadWaveform = Signal;
/// Velocity ẋ(t) or u̇(t).
pub type VelocityWaveform = Signal;
/// Displacement u(t).
pub type DisplacementWaveform = Signal;

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Signal")
            .field("period", &self.period)
            .field("n", &self.n)
            .finish_non_exhaustive()
    }
}

impl Signal {
    pub fn new(period: f64, n: usize, value: ScalarFn, rate: ScalarFn) -> Self {
        Self { period, n, value, rate }
    }

    pub fn from_fn<V, R>(period: f64, n: usize, value: V, rate: R) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        R: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(period, n, Arc::new(value), Arc::new(rate))
    }

    /// Trigonometric interpolant of uniform samples; the rate is its exact derivative.
    pub fn from_samples(values: &[f64], period: f64) -> Result<Self> {
        let fs = Arc::new(FourierSeries::from_samples(values, period, 0.0)?);
        let f2 = fs.clone();
        Ok(Self::from_fn(
            period,
            values.len(),
            move |t| fs.eval(t),
            move |t| f2.eval_all(t)[1],
        ))
    }

    pub fn constant(period: f64, n: usize, c: f64) -> Self {
        Self::from_fn(period, n, move |_| c, |_| 0.0)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn rate(&self, t: f64) -> f64 {
        (self.rate)(t)
    }

    pub fn value_fn(&self) -> ScalarFn {
        self.value.clone()
    }

    pub fn rate_fn(&self) -> ScalarFn {
        self.rate.clone()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.period * i as f64 / self.n as f64)
            .collect()
    }

    pub fn samples(&self) -> Vec<f64> {
        self.times().into_iter().map(|t| self.value(t)).collect()
    }

    pub fn rate_samples(&self) -> Vec<f64> {
        self.times().into_iter().map(|t| self.rate(t)).collect()
    }

    /// Same period (to 1e-12 relative) and sample count.
    pub fn same_grid(&self, other: &Signal) -> bool {
        self.n == other.n && (self.period - other.period).abs() <= 1e-12 * self.period.abs()
    }

    pub fn ensure_same_grid(&self, other: &Signal, what: &str) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: period {} / {} samples vs period {} / {} samples",
                self.period, self.n, other.period, other.n
            )))
        }
    }

    /// Pointwise product; the rate follows the product rule.
    pub fn product(&self, other: &Signal) -> Result<Signal> {
        self.ensure_same_grid(other, "product")?;
        let (a, ar, b, br) = (self.value.clone(), self.rate.clone(), other.value.clone(), other.rate.clone());
        let (a2, b2) = (a.clone(), b.clone());
        Ok(Self::from_fn(
            self.period,
            self.n,
            move |t| a(t) * b(t),
            move |t| ar(t) * b2(t) + a2(t) * br(t),
        ))
    }

    /// `self + k·other`.
    pub fn add_scaled(&self, other: &Signal, k: f64) -> Result<Signal> {
        self.ensure_same_grid(other, "sum")?;
        let (a, ar, b, br) = (self.value.clone(), self.rate.clone(), other.value.clone(), other.rate.clone());
        Ok(Self::from_fn(self.period, self.n, move |t| a(t) + k * b(t), move |t| ar(t) + k * br(t)))
    }

    pub fn scale(&self, k: f64) -> Signal {
        let (a, ar) = (self.value.clone(), self.rate.clone());
        Self::from_fn(self.period, self.n, move |t| k * a(t), move |t| k * ar(t))
    }

    /// Derivative as a signal; its own rate is a central difference.
    pub fn rate_signal(&self) -> Signal {
        let (r, r2) = (self.rate.clone(), self.rate.clone());
        let h = 1e-6 * self.period;
        Self::from_fn(self.period, self.n, move |t| r(t), move |t| (r2(t + h) - r2(t - h)) / (2.0 * h))
    }

    /// Largest |value| over the period (dense scan plus local refinement).
    pub fn peak_abs(&self) -> f64 {
        let f = self.value.clone();
        crate::numeric::maximize(&move |t| f(t).abs(), 0.0, self.period, 8 * self.n.max(64)).1
    }
}
