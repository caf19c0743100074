//! Fixtures shared by the criterion benchmarks in `benches/`.

use elastic_bounds::{inelastic_load, make_waveform, DynamicsModel, LoadWaveform, PeriodicWaveform, WaveformKind};

/// Unit-parameter harmonic system sampled on `n` points.
pub fn reference(n: usize) -> (DynamicsModel, PeriodicWaveform, LoadWaveform) {
    let w = make_waveform(WaveformKind::Harmonic, 1.0, 1.0, 0.0, n).expect("harmonic waveform");
    let d = DynamicsModel::new(1.0, 1.0, 0.0).expect("model");
    let g = inelastic_load(&d, &w);
    (d, w, g)
}

/// Smoothed triangle with heavy damping, an admissible non-harmonic case.
pub fn triangle(n: usize) -> (DynamicsModel, PeriodicWaveform, LoadWaveform) {
    let w = make_waveform(WaveformKind::SmoothedTriangle, 1.0, 1.0, 0.5, n).expect("triangle waveform");
    let d = DynamicsModel::new(1.0, 4.0, 0.0).expect("model");
    let g = inelastic_load(&d, &w);
    (d, w, g)
}
