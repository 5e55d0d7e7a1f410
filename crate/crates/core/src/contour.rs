//! Eigenfunctions on rotated contours.
//!
//! For an oscillator with complex `M·Ω` the coordinate runs along the ray
//! `ζ = e^{iθ} s` with `θ = -arg(MΩ)/2`, on which `MΩζ² = |MΩ| s²`. The
//! dimensionless argument `ρ = α s`, `α = √(|MΩ|/ħ)`, is then real and the
//! eigenfunctions reduce to ordinary Hermite functions of `ρ`. The branch is
//! fixed by `ρ ≥ 0` for `s ≥ 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{OscillatorParams, TwoOscillatorParams};
use crate::quadrature::{GaussHermite, MAX_NODES};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Node count used when the caller does not choose one.
pub const DEFAULT_NODES: usize = 64;
/// Smallest accepted node count.
pub const MIN_NODES: usize = 32;
/// Largest change under node doubling accepted as converged.
pub const DOUBLING_TOLERANCE: f64 = 1e-8;

/// The ray `ζ(s) = e^{iθ} s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Contour {
    pub theta: f64,
}

impl Contour {
    pub fn zeta(&self, s: f64) -> Complex64 {
        Complex64::from_polar(s, self.theta)
    }

    /// `dζ/ds`
    pub fn measure(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }

    pub fn conjugate(&self) -> Self {
        Self { theta: -self.theta }
    }
}

/// Contour on which `M·Ω·ζ²` is real and non-negative.
pub fn contour_for(mass: Complex64, omega: Complex64) -> Result<Contour> {
    let product = mass * omega;
    if product.norm() == 0.0 {
        return Err(Error::ZeroScale);
    }
    Ok(Contour { theta: -product.arg() / 2.0 })
}

/// Momentum ray `p = e^{-iθ} u`, on which `p²/(MΩ)` is real and non-negative.
pub fn momentum_contour(mass: Complex64, omega: Complex64) -> Result<Contour> {
    Ok(contour_for(mass, omega)?.conjugate())
}

/// `α = √(|MΩ|/ħ)`, the inverse oscillator length along the contour.
pub fn inverse_length(params: &OscillatorParams) -> f64 {
    ((params.mass * params.omega).norm() / params.hbar).sqrt()
}

/// Contour of the anti-holomorphic partner: the mirror image of the
/// holomorphic one. Taking `contour_for(M*, Ω*)` instead would put both on
/// the same side of the branch cut when `MΩ` is a negative real.
pub fn conjugate_contour(mass: Complex64, omega: Complex64) -> Result<Contour> {
    Ok(contour_for(mass, omega)?.conjugate())
}

/// Normalized Hermite functions `h_0..=h_max` at `x`, by the stable recurrence.
pub fn hermite_functions(max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let h0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(h0);
    if max >= 1 {
        out.push(std::f64::consts::SQRT_2 * x * h0);
    }
    for k in 1..max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

pub fn hermite_function(m: usize, x: f64) -> f64 {
    hermite_functions(m, x)[m]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenfunctionSpec {
    pub params: OscillatorParams,
    pub index: usize,
    pub side: Side,
}

/// Eigenfunction value at contour parameter `s`.
///
/// Both sides are `α^{1/2} e^{-iθ/2} h_m(α s)`; the left one is composed as
/// the conjugate of `h_m` at the conjugate argument, which coincides on the
/// contour because `ρ` is real there. The `e^{-iθ/2}` pairs with the measure
/// `e^{iθ}` so that left-right products integrate to `δ`.
pub fn eval_eigenfunction(spec: &EigenfunctionSpec, s: f64) -> Result<Complex64> {
    spec.params.validate()?;
    let contour = contour_for(spec.params.mass, spec.params.omega)?;
    let alpha = inverse_length(&spec.params);
    let rho = Complex64::new(alpha * s, 0.0);
    let h = match spec.side {
        Side::Right => hermite_function(spec.index, rho.re),
        Side::Left => hermite_function(spec.index, rho.conj().re),
    };
    Ok(Complex64::from_polar(alpha.sqrt(), -contour.theta / 2.0) * h)
}

/// Outcome of a quadrature with a node-doubling check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value_re: f64,
    pub value_im: f64,
    pub nodes: usize,
    pub converged: bool,
    /// Change of the value when the node count is doubled.
    pub change: f64,
}

impl QuadratureResult {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value_re, self.value_im)
    }
}

fn check_nodes(nodes: usize) -> Result<()> {
    if nodes < MIN_NODES || 2 * nodes > MAX_NODES {
        return Err(Error::InvalidInput(format!("node count must lie in {MIN_NODES}..={}, got {nodes}", MAX_NODES / 2)));
    }
    Ok(())
}

/// Evaluates `rule(nodes)` and `rule(2·nodes)`; fails when they differ by more than the doubling tolerance.
pub fn with_doubling<F: Fn(&GaussHermite) -> Result<Complex64>>(nodes: usize, rule: F) -> Result<QuadratureResult> {
    check_nodes(nodes)?;
    let coarse = rule(&GaussHermite::new(nodes))?;
    let fine = rule(&GaussHermite::new(2 * nodes))?;
    let change = (fine - coarse).norm();
    if !(change <= DOUBLING_TOLERANCE) {
        return Err(Error::QuadratureUnderresolved { nodes, doubled: 2 * nodes, change });
    }
    Ok(QuadratureResult { value_re: coarse.re, value_im: coarse.im, nodes, converged: true, change })
}

fn biortho_with(gh: &GaussHermite, params: &OscillatorParams, m: usize, m_prime: usize) -> Result<Complex64> {
    let contour = contour_for(params.mass, params.omega)?;
    let alpha = inverse_length(params);
    let left = EigenfunctionSpec { params: *params, index: m, side: Side::Left };
    let right = EigenfunctionSpec { params: *params, index: m_prime, side: Side::Right };
    let v = gh.integrate_line(0.0, 1.0 / alpha, |s| {
        // parameters were validated by the caller
        let l = eval_eigenfunction(&left, s).unwrap_or_default();
        let r = eval_eigenfunction(&right, s).unwrap_or_default();
        l * r
    });
    Ok(v * contour.measure())
}

/// `∫ φ_L,m(ζ) φ_R,m'(ζ) dζ` along the contour of `params`.
pub fn biortho_inner(params: &OscillatorParams, m: usize, m_prime: usize, nodes: usize) -> Result<QuadratureResult> {
    params.validate()?;
    with_doubling(nodes, |gh| biortho_with(gh, params, m, m_prime))
}

/// `1/(π √(|ħ/(M1Ω1)| |ħ/(M2Ω2)|))`, the ground-state amplitude of the PT pair.
pub fn ground_state_prefactor(params: &TwoOscillatorParams) -> f64 {
    let l1 = params.hbar / (params.m1 * params.omega1).norm();
    let l2 = params.hbar / (params.m2 * params.omega2).norm();
    1.0 / (PI * (l1 * l2).sqrt())
}

/// The four Gaussian exponents `MΩ/(2ħ)` with their contours, holomorphic then conjugate.
fn ground_state_factors(params: &TwoOscillatorParams) -> Result<[(Complex64, Contour, f64); 4]> {
    let mut out = Vec::with_capacity(4);
    for osc in [params.first(), params.second()] {
        let alpha = inverse_length(&osc);
        let contour = contour_for(osc.mass, osc.omega)?;
        let k = osc.mass * osc.omega / (2.0 * osc.hbar);
        out.push((k, contour, alpha));
        out.push((k.conj(), contour.conjugate(), alpha));
    }
    Ok([out[0], out[2], out[1], out[3]])
}

/// `∫ φ_L,0 φ_R,0` over all four contours, as a product of one-dimensional factors.
pub fn ground_state_norm(params: &TwoOscillatorParams, nodes: usize) -> Result<QuadratureResult> {
    params.first().validate()?;
    params.second().validate()?;
    let factors = ground_state_factors(params)?;
    let prefactor = ground_state_prefactor(params);
    with_doubling(nodes, |gh| {
        let mut total = Complex64::new(prefactor * prefactor, 0.0);
        for (k, contour, alpha) in factors {
            let v = gh.integrate_line(0.0, 1.0 / alpha, |s| {
                let z = contour.zeta(s);
                (-2.0 * k * z * z).exp()
            });
            total *= v * contour.measure();
        }
        Ok(total)
    })
}

/// Full tensor-product quadrature of the ground-state integral with
/// `nodes` points per axis, without using the factorization.
pub fn ground_state_norm_4d(params: &TwoOscillatorParams, nodes: usize) -> Result<Complex64> {
    params.first().validate()?;
    params.second().validate()?;
    let factors = ground_state_factors(params)?;
    let prefactor = ground_state_prefactor(params);
    let gh = GaussHermite::new(nodes);
    let rules: Vec<Vec<(f64, f64)>> = factors.iter().map(|(_, _, alpha)| gh.line_rule(0.0, 1.0 / alpha)).collect();
    let measure: Complex64 = factors.iter().map(|f| f.1.measure()).product();
    let mut total = Complex64::new(0.0, 0.0);
    for &(s0, w0) in &rules[0] {
        for &(s1, w1) in &rules[1] {
            for &(s2, w2) in &rules[2] {
                for &(s3, w3) in &rules[3] {
                    let mut exponent = Complex64::new(0.0, 0.0);
                    for ((k, contour, _), s) in factors.iter().zip([s0, s1, s2, s3]) {
                        let z = contour.zeta(s);
                        exponent -= k * z * z;
                    }
                    // φ_L φ_R: the same Gaussian twice
                    let phi = Complex64::new(prefactor, 0.0) * exponent.exp();
                    total += phi * phi * (w0 * w1 * w2 * w3);
                }
            }
        }
    }
    Ok(total * measure)
}

/// Right eigenfunction in momentum space on the ray `p = e^{-iθ} u`:
/// `√(2π) e^{iθ/2} α^{-1/2} (-i)^m h_m(u/(ħα))`.
pub fn momentum_eigenfunction(params: &OscillatorParams, m: usize, u: f64) -> Result<Complex64> {
    params.validate()?;
    let contour = contour_for(params.mass, params.omega)?;
    let alpha = inverse_length(params);
    let kappa = u / (params.hbar * alpha);
    let phase = (-I).powu(m as u32) * Complex64::from_polar(1.0, contour.theta / 2.0);
    Ok(phase * ((2.0 * PI).sqrt() / alpha.sqrt()) * hermite_function(m, kappa))
}

/// Maximum deviation over `|u| ≤ 4` between the quadrature Fourier transform
/// `∫ dζ e^{-ipζ/ħ} φ_R(ζ)` and the momentum-space eigenfunction.
pub fn fourier_pair_check(params: &OscillatorParams, m: usize, nodes: usize) -> Result<f64> {
    if m > 4 {
        return Err(Error::InvalidInput(format!("Fourier check supports m <= 4, got {m}")));
    }
    params.validate()?;
    let contour = contour_for(params.mass, params.omega)?;
    let p_contour = momentum_contour(params.mass, params.omega)?;
    let alpha = inverse_length(params);
    let spec = EigenfunctionSpec { params: *params, index: m, side: Side::Right };
    let mut worst: f64 = 0.0;
    for k in 0..=80 {
        let u = -4.0 + 0.1 * k as f64;
        let p = p_contour.zeta(u);
        let transformed = with_doubling(nodes, |gh| {
            // Hermite functions decay like e^{-ρ²/2}: width √2/α
            let v = gh.integrate_line(0.0, std::f64::consts::SQRT_2 / alpha, |s| {
                let z = contour.zeta(s);
                let phi = eval_eigenfunction(&spec, s).unwrap_or_default();
                (-I * p * z / params.hbar).exp() * phi
            });
            Ok(v * contour.measure())
        })?;
        worst = worst.max((transformed.value() - momentum_eigenfunction(params, m, u)?).norm());
    }
    Ok(worst)
}

/// Resolution of the identity applied to `f`: `Σ_{m<count} φ_R,m(s') ∫ φ_L,m f dζ`,
/// returned at each point of `probe`. The test function is given on the contour parameter.
pub fn smeared_completeness<F: Fn(f64) -> Complex64>(
    params: &OscillatorParams,
    count: usize,
    f: F,
    probe: &[f64],
    nodes: usize,
) -> Result<Vec<Complex64>> {
    params.validate()?;
    check_nodes(nodes)?;
    let contour = contour_for(params.mass, params.omega)?;
    let alpha = inverse_length(params);
    let gh = GaussHermite::new(2 * nodes);
    let rule = gh.line_rule(0.0, std::f64::consts::SQRT_2 / alpha);
    let norm = Complex64::from_polar(alpha.sqrt(), -contour.theta / 2.0);
    let mut coefficients = vec![Complex64::new(0.0, 0.0); count];
    for &(s, w) in &rule {
        let hs = hermite_functions(count - 1, alpha * s);
        let fs = f(s) * w;
        for (c, h) in coefficients.iter_mut().zip(hs) {
            *c += norm * h * fs;
        }
    }
    let measure = contour.measure();
    Ok(probe
        .iter()
        .map(|&s| {
            let hs = hermite_functions(count - 1, alpha * s);
            coefficients.iter().zip(hs).map(|(c, h)| c * measure * norm * h).sum()
        })
        .collect())
}
