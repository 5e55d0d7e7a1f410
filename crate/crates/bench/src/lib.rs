//! Shared fixtures for the benchmarks.

use num_complex::Complex64;
use pu_core::params::{OscillatorParams, TwoOscillatorParams};

/// A complex-mass, damped single oscillator.
pub fn damped_oscillator() -> OscillatorParams {
    OscillatorParams::new(Complex64::new(1.0, 0.2), Complex64::new(1.0, -0.5))
}

/// The opposite-mass pair with frequencies 1 and 2.
pub fn opposite_mass_pair() -> TwoOscillatorParams {
    TwoOscillatorParams::real(1.0, -1.0, 1.0, 2.0)
}

/// `count` points evenly spread over `[-half_width, half_width]`.
pub fn window(half_width: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| -half_width + 2.0 * half_width * k as f64 / (count - 1) as f64).collect()
}
