//! Gauss-Hermite quadrature.
//!
//! Nodes are found by Newton iteration on the orthonormal Hermite
//! recurrence, which stays accurate for a few hundred nodes. Alongside the
//! classical weights `w_i` (for `∫ e^{-x²} f(x) dx`) the rule keeps
//! `w_i e^{x_i²}`, computed without overflow from Hermite functions, so that
//! integrands carrying their own Gaussian decay can be summed directly.

use num_complex::Complex64;

const PI_M4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}

/// Largest supported rule; the root-finder's initial guesses degrade beyond ~200 nodes.
pub const MAX_NODES: usize = 160;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scaled_weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!((1..=MAX_NODES).contains(&n), "Gauss-Hermite rule size must lie in 1..={MAX_NODES}, got {n}");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let mut scaled_weights = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0_f64;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let (p1, dp) = hermite_and_derivative(n, z);
                pp = dp;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            let (_, dp) = hermite_and_derivative(n, z);
            pp = if dp != 0.0 { dp } else { pp };
            let w = 2.0 / (pp * pp);
            let damped = pp * (-0.5 * z * z).exp();
            let ws = 2.0 / (damped * damped);
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = w;
            weights[n - 1 - i] = w;
            scaled_weights[i] = ws;
            scaled_weights[n - 1 - i] = ws;
        }
        Self { nodes, weights, scaled_weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ e^{-x²} f(x) dx`
    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        pairwise_sum(self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect())
    }

    /// `∫ f(s) ds` for an integrand decaying like `exp(-((s - center)/width)²)`;
    /// exact when `f` is a polynomial times exactly that Gaussian.
    pub fn integrate_line<F: Fn(f64) -> Complex64>(&self, center: f64, width: f64, f: F) -> Complex64 {
        let terms = self
            .nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&x, &w)| w * f(center + width * x))
            .collect();
        width * pairwise_sum(terms)
    }

    /// Sample points `center + width·x_i` paired with the line weights of [`Self::integrate_line`].
    pub fn line_rule(&self, center: f64, width: f64) -> Vec<(f64, f64)> {
        self.nodes.iter().zip(&self.scaled_weights).map(|(&x, &w)| (center + width * x, width * w)).collect()
    }
}

/// Orthonormal Hermite polynomial (times π^{-1/4}) of degree n at z and its derivative.
fn hermite_and_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI_M4;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

/// Order-independent (for a fixed length) pairwise reduction.
pub fn pairwise_sum(mut terms: Vec<Complex64>) -> Complex64 {
    if terms.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    while terms.len() > 1 {
        let next: Vec<Complex64> = terms.chunks(2).map(|c| c.iter().sum()).collect();
        terms = next;
    }
    terms[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn moments_are_exact() {
        let gh = GaussHermite::new(64);
        // ∫ x^{2k} e^{-x²} = Γ(k + 1/2)
        let mut gamma_half = PI.sqrt();
        for k in 0..40 {
            let v = gh.integrate(|x| Complex64::new(x.powi(2 * k), 0.0));
            assert!((v.re - gamma_half).abs() <= 1e-11 * gamma_half, "k={k}");
            gamma_half *= k as f64 + 0.5;
        }
    }

    #[test]
    fn weights_sum_to_sqrt_pi() {
        for n in [1, 2, 5, 32, 64, 128, MAX_NODES] {
            let gh = GaussHermite::new(n);
            let s: f64 = gh.weights().iter().sum();
            assert!((s - PI.sqrt()).abs() < 1e-13, "n={n}");
            assert!(gh.nodes().windows(2).all(|w| w[0] > w[1]), "nodes strictly descend");
        }
    }

    #[test]
    fn line_rule_matches_scaled_gaussian() {
        let gh = GaussHermite::new(64);
        let v = gh.integrate_line(0.3, 0.5, |s| Complex64::new((-((s - 0.3) / 0.5).powi(2)).exp(), 0.0));
        assert!((v.re - 0.5 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_factor() {
        // ∫ e^{-x²} cos x dx = √π e^{-1/4}
        let gh = GaussHermite::new(32);
        let v = gh.integrate(|x| Complex64::new(x.cos(), 0.0));
        assert!((v.re - PI.sqrt() * (-0.25f64).exp()).abs() < 1e-14);
    }
}
