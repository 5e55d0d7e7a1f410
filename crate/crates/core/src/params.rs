use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on |Ω1² - Ω2²| against max(|Ω1|², |Ω2|²).
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// One (possibly non-Hermitian) oscillator: complex mass and frequency, real ħ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub mass: Complex64,
    pub omega: Complex64,
    pub hbar: f64,
}

impl OscillatorParams {
    pub fn new(mass: Complex64, omega: Complex64) -> Self {
        Self { mass, omega, hbar: 1.0 }
    }

    pub fn real(mass: f64, omega: f64) -> Self {
        Self::new(Complex64::new(mass, 0.0), Complex64::new(omega, 0.0))
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0) {
            return Err(Error::InvalidInput(format!("ħ must be positive, got {}", self.hbar)));
        }
        if self.mass == Complex64::new(0.0, 0.0) || self.omega == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroScale);
        }
        Ok(())
    }

    /// ħ/(2MΩ), the squared ladder scale of the mode expansion.
    pub fn mode_scale_sq(&self) -> Complex64 {
        self.hbar / (2.0 * self.mass * self.omega)
    }
}

/// The two-oscillator system behind the fourth-order model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoOscillatorParams {
    pub m1: Complex64,
    pub m2: Complex64,
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub hbar: f64,
}

impl TwoOscillatorParams {
    pub fn new(m1: Complex64, m2: Complex64, omega1: Complex64, omega2: Complex64) -> Self {
        Self { m1, m2, omega1, omega2, hbar: 1.0 }
    }

    pub fn real(m1: f64, m2: f64, omega1: f64, omega2: f64) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        Self::new(c(m1), c(m2), c(omega1), c(omega2))
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn first(&self) -> OscillatorParams {
        OscillatorParams { mass: self.m1, omega: self.omega1, hbar: self.hbar }
    }

    pub fn second(&self) -> OscillatorParams {
        OscillatorParams { mass: self.m2, omega: self.omega2, hbar: self.hbar }
    }

    /// Ω1² - Ω2²
    pub fn gap(&self) -> Complex64 {
        self.omega1 * self.omega1 - self.omega2 * self.omega2
    }

    pub fn validate(&self) -> Result<()> {
        self.first().validate()?;
        self.second().validate()?;
        let gap = self.gap().norm();
        let tolerance = DEGENERACY_TOLERANCE * self.omega1.norm_sqr().max(self.omega2.norm_sqr());
        if gap < tolerance {
            return Err(Error::DegenerateFrequencies { gap, tolerance });
        }
        Ok(())
    }
}
