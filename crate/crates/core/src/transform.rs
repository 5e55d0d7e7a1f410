//! Two-oscillator <-> fourth-order map.
//!
//! With `Q = Q1 + Q2` the coordinate jets satisfy `Q = Q1 + Q2` and
//! `Q̈ = -Ω1² Q1 - Ω2² Q2`, so the linear map and its inverse send the pair
//! `(Q1, Q2)` to `(Q, Q̈)` and back. Every Lagrangian here is a
//! [`DerivativePolynomial`] in the jets of `Q`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::log_log_slope;
use crate::jet::DerivativePolynomial;
use crate::params::TwoOscillatorParams;
use crate::report::Csv;

type Mat2 = [[Complex64; 2]; 2];

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `forward` maps `(Q1, Q2)` to `(Q, Q̈)`; `inverse` maps back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformPair {
    pub forward: Mat2,
    pub inverse: Mat2,
}

impl TransformPair {
    pub fn product(&self) -> Mat2 {
        mat_mul(&self.forward, &self.inverse)
    }

    /// Largest entry of `forward·inverse - I`.
    pub fn identity_defect(&self) -> f64 {
        let p = self.product();
        let mut worst: f64 = 0.0;
        for (i, row) in p.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { ONE } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }

    pub fn apply_forward(&self, x: [Complex64; 2]) -> [Complex64; 2] {
        apply(&self.forward, x)
    }

    pub fn apply_inverse(&self, y: [Complex64; 2]) -> [Complex64; 2] {
        apply(&self.inverse, y)
    }
}

fn apply(m: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn build_transform(params: &TwoOscillatorParams) -> Result<TransformPair> {
    params.validate()?;
    let w1 = params.omega1 * params.omega1;
    let w2 = params.omega2 * params.omega2;
    let gap = w1 - w2;
    Ok(TransformPair {
        forward: [[ONE, ONE], [-w1, -w2]],
        inverse: [[-w2 / gap, -ONE / gap], [w1 / gap, ONE / gap]],
    })
}

/// `(M/2)(q1² - Ω² q0²)` for one oscillator in its own coordinate.
pub fn oscillator_lagrangian(mass: Complex64, omega: Complex64) -> DerivativePolynomial {
    let half = mass * 0.5;
    DerivativePolynomial::from_terms([(vec![0, 2], half), (vec![2], -half * omega * omega)])
}

/// Images of the oscillator coordinates as linear forms in the jets of `Q`.
pub fn inverse_images(params: &TwoOscillatorParams) -> Result<(DerivativePolynomial, DerivativePolynomial)> {
    let t = build_transform(params)?;
    let image = |row: [Complex64; 2]| DerivativePolynomial::from_terms([(vec![1], row[0]), (vec![0, 0, 1], row[1])]);
    Ok((image(t.inverse[0]), image(t.inverse[1])))
}

/// The fourth-order Lagrangian obtained by inserting the inverse map into
/// the sum of the two oscillator Lagrangians.
pub fn pu_lagrangian(params: &TwoOscillatorParams) -> Result<DerivativePolynomial> {
    let (image1, image2) = inverse_images(params)?;
    let l1 = oscillator_lagrangian(params.m1, params.omega1).substitute_linear(&image1)?;
    let l2 = oscillator_lagrangian(params.m2, params.omega2).substitute_linear(&image2)?;
    Ok(l1 + l2)
}

/// The same Lagrangian regrouped into symmetric and antisymmetric mass
/// combinations. With `with_total_derivatives = false` the boundary terms
/// are dropped, leaving a form equivalent only up to a total derivative.
pub fn pu_lagrangian_regrouped(params: &TwoOscillatorParams, with_total_derivatives: bool) -> Result<DerivativePolynomial> {
    params.validate()?;
    let w1 = params.omega1 * params.omega1;
    let w2 = params.omega2 * params.omega2;
    let gap = w1 - w2;
    let pre = ONE / (2.0 * gap * gap);
    let sum = w1 + w2;
    let prod = w1 * w2;
    let q = DerivativePolynomial::var;
    let sq = |k: usize| q(k).pow(2);

    let symmetric = (sq(2).scale(-3.0) + sq(0).scale(-prod)).scale(sum)
        + sq(1).scale(w1 * w1 + w2 * w2 + 4.0 * prod)
        + sq(3).scale(2.0);
    let antisymmetric = sq(2) - sq(1).scale(sum) + sq(0).scale(prod);
    let mut out = symmetric.scale((params.m1 + params.m2) * 0.5) + antisymmetric.scale((params.m1 - params.m2) * 0.5 * gap);

    if with_total_derivatives {
        let q0q1 = &q(0) * &q(1);
        let q1q2 = &q(1) * &q(2);
        let sym_bd = (q1q2.scale(2.0 * sum) - q0q1.scale(4.0 * prod)).total_time_derivative();
        let anti_bd = q1q2.scale(-2.0).total_time_derivative();
        out = out + sym_bd.scale((params.m1 + params.m2) * 0.5) + anti_bd.scale((params.m1 - params.m2) * 0.5 * gap);
    }
    Ok(out.scale(pre))
}

/// Relative tolerance on `|M1 + M2|` for the opposite-mass specialization.
pub const OPPOSITE_MASS_TOLERANCE: f64 = 1e-12;

/// Opposite-mass case `M1 = -M2`: the prefactor `γ = M1/(Ω1² - Ω2²)` and the
/// second-order-in-velocities Lagrangian `(γ/2)(q2² - (Ω1²+Ω2²) q1² + Ω1²Ω2² q0²)`.
pub fn bender_mannheim(params: &TwoOscillatorParams) -> Result<(Complex64, DerivativePolynomial)> {
    params.validate()?;
    let residual = (params.m1 + params.m2).norm();
    if residual > OPPOSITE_MASS_TOLERANCE * params.m1.norm().max(params.m2.norm()) {
        return Err(Error::NotBenderMannheimCase { residual });
    }
    let w1 = params.omega1 * params.omega1;
    let w2 = params.omega2 * params.omega2;
    let gamma = params.m1 / (w1 - w2);
    let half = gamma * 0.5;
    let lagrangian =
        DerivativePolynomial::from_terms([(vec![0, 0, 2], half), (vec![0, 2], -half * (w1 + w2)), (vec![2], half * w1 * w2)]);
    Ok((gamma, lagrangian))
}

/// A linear constant-coefficient equation of motion written as a polynomial
/// in `x = d²/dt²` and divided by `(x + Ω1²)(x + Ω2²)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElFactorization {
    /// Coefficient of `x^j` (i.e. of `q_{2j}`) in the Euler-Lagrange expression.
    pub equation: Vec<Complex64>,
    pub quotient: Vec<Complex64>,
    pub remainder: Vec<Complex64>,
    /// Largest coefficient on an odd-order jet; zero for any quadratic Lagrangian.
    pub odd_residual: f64,
    /// Remainder magnitude relative to the leading coefficient of the equation.
    pub remainder_ratio: f64,
}

pub fn pu_el_factorization(params: &TwoOscillatorParams) -> Result<ElFactorization> {
    let el = pu_lagrangian(params)?.euler_lagrange();
    factor_by_pu_operator(&el, params)
}

pub fn factor_by_pu_operator(el: &DerivativePolynomial, params: &TwoOscillatorParams) -> Result<ElFactorization> {
    let zero = Complex64::new(0.0, 0.0);
    let mut by_order = vec![zero; el.max_order() + 1];
    for (index, c) in el.terms() {
        if index.degree() != 1 {
            return Err(Error::NonlinearEquation { degree: index.degree() });
        }
        let order = index.max_order().expect("degree-one index has a variable");
        by_order[order] += c;
    }
    let odd_residual = by_order.iter().skip(1).step_by(2).map(|c| c.norm()).fold(0.0, f64::max);
    let mut equation: Vec<Complex64> = by_order.iter().step_by(2).copied().collect();
    while equation.len() > 1 && equation.last() == Some(&zero) {
        equation.pop();
    }

    let w1 = params.omega1 * params.omega1;
    let w2 = params.omega2 * params.omega2;
    // Monic divisor x² + (Ω1²+Ω2²) x + Ω1²Ω2², lowest power first.
    let divisor = [w1 * w2, w1 + w2, Complex64::new(1.0, 0.0)];
    let mut rem = equation.clone();
    let qlen = rem.len().saturating_sub(2);
    let mut quotient = vec![zero; qlen.max(1)];
    for j in (0..qlen).rev() {
        let lead = rem[j + 2];
        quotient[j] = lead;
        for (k, d) in divisor.iter().enumerate() {
            rem[j + k] -= lead * d;
        }
    }
    rem.truncate(2.min(rem.len()));
    let leading = equation.last().map(|c| c.norm()).unwrap_or(0.0).max(1e-300);
    let remainder_ratio = rem.iter().map(|c| c.norm()).fold(0.0, f64::max) / leading;
    Ok(ElFactorization { equation, quotient, remainder: rem, odd_residual, remainder_ratio })
}

/// Jets `(Q, Q̇, Q̈, Q⃛)` at a time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalState {
    pub jets: [Complex64; 4],
    pub time: f64,
}

impl ClassicalState {
    pub fn new(jets: [Complex64; 4]) -> Self {
        Self { jets, time: 0.0 }
    }

    pub fn real(jets: [f64; 4]) -> Self {
        Self::new(jets.map(|x| Complex64::new(x, 0.0)))
    }
}

/// Upper bound on `dt·max(|Ω1|, |Ω2|)` accepted by the integrator.
pub const MAX_PHASE_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub q: Complex64,
    pub q1: Complex64,
    pub q2: Complex64,
    pub dev_q: f64,
    pub dev_qddot: f64,
}

/// Largest deviations of the fourth-order trajectory from the
/// transformed oscillator trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MaxDeviations {
    pub q: f64,
    pub qdot: f64,
    pub qddot: f64,
    pub qdddot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryReport {
    pub dt: f64,
    pub steps: usize,
    /// `(Q1, Q̇1, Q2, Q̇2)` at t = 0 from the inverse map.
    pub oscillator_initial: [Complex64; 4],
    pub samples: Vec<TrajectorySample>,
    pub max_devs: MaxDeviations,
    /// Largest `|Q - Q_exact|` against the closed-form solution.
    pub max_exact_error: f64,
}

impl TrajectoryReport {
    pub fn to_csv(&self, stride: usize) -> String {
        let mut csv = Csv::new(&["t", "Re(Q)", "Im(Q)", "Re(Q1)", "Im(Q1)", "Re(Q2)", "Im(Q2)", "dev_Q", "dev_Qddot"]);
        let stride = stride.max(1);
        let last = self.samples.len().saturating_sub(1);
        for (i, s) in self.samples.iter().enumerate() {
            if i % stride == 0 || i == last {
                csv.row(&[s.t, s.q.re, s.q.im, s.q1.re, s.q1.im, s.q2.re, s.q2.im, s.dev_q, s.dev_qddot]);
            }
        }
        csv.finish()
    }
}

fn rk4_step<const N: usize>(y: &[Complex64; N], h: f64, f: &impl Fn(&[Complex64; N]) -> [Complex64; N]) -> [Complex64; N] {
    let shift = |base: &[Complex64; N], k: &[Complex64; N], s: f64| -> [Complex64; N] {
        let mut out = *base;
        for i in 0..N {
            out[i] += k[i] * s;
        }
        out
    };
    let k1 = f(y);
    let k2 = f(&shift(y, &k1, h / 2.0));
    let k3 = f(&shift(y, &k2, h / 2.0));
    let k4 = f(&shift(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
    }
    out
}

/// Closed-form `(Q, Q̇, Q̈, Q⃛)` at time `t` from the oscillator initial data.
pub fn exact_jets(params: &TwoOscillatorParams, oscillator_initial: [Complex64; 4], t: f64) -> [Complex64; 4] {
    let mut jets = [Complex64::new(0.0, 0.0); 4];
    for (omega, x0, v0) in [
        (params.omega1, oscillator_initial[0], oscillator_initial[1]),
        (params.omega2, oscillator_initial[2], oscillator_initial[3]),
    ] {
        let (c, s) = ((omega * t).cos(), (omega * t).sin());
        let x = x0 * c + v0 / omega * s;
        let v = -x0 * omega * s + v0 * c;
        let w2 = omega * omega;
        jets[0] += x;
        jets[1] += v;
        jets[2] -= w2 * x;
        jets[3] -= w2 * v;
    }
    jets
}

/// Integrates the fourth-order equation and the two oscillator equations
/// side by side with fixed-step RK4.
pub fn integrate_classical(
    params: &TwoOscillatorParams,
    initial: &ClassicalState,
    t_end: f64,
    dt: f64,
) -> Result<TrajectoryReport> {
    if !(dt > 0.0 && t_end > 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("need dt > 0 and t_end > 0, got dt={dt}, t_end={t_end}")));
    }
    let limit = MAX_PHASE_STEP;
    let phase = dt * params.omega1.norm().max(params.omega2.norm());
    if phase > limit {
        return Err(Error::StepSizeRejected { value: phase, limit });
    }
    let t = build_transform(params)?;
    let w1 = params.omega1 * params.omega1;
    let w2 = params.omega2 * params.omega2;
    let (sum, prod) = (w1 + w2, w1 * w2);

    let [q, qd, qdd, qddd] = initial.jets;
    let [x1, x2] = t.apply_inverse([q, qdd]);
    let [v1, v2] = t.apply_inverse([qd, qddd]);
    let oscillator_initial = [x1, v1, x2, v2];

    let steps = ((t_end / dt).round() as usize).max(1);
    let h = t_end / steps as f64;

    let pu_rhs = |y: &[Complex64; 4]| [y[1], y[2], y[3], -sum * y[2] - prod * y[0]];
    let osc_rhs = |y: &[Complex64; 4]| [y[1], -w1 * y[0], y[3], -w2 * y[2]];

    let mut pu = initial.jets;
    let mut osc = oscillator_initial;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut max_devs = MaxDeviations::default();
    let mut max_exact_error: f64 = 0.0;
    for n in 0..=steps {
        let time = initial.time + n as f64 * h;
        let dev = [
            (pu[0] - (osc[0] + osc[2])).norm(),
            (pu[1] - (osc[1] + osc[3])).norm(),
            (pu[2] + w1 * osc[0] + w2 * osc[2]).norm(),
            (pu[3] + w1 * osc[1] + w2 * osc[3]).norm(),
        ];
        max_devs.q = max_devs.q.max(dev[0]);
        max_devs.qdot = max_devs.qdot.max(dev[1]);
        max_devs.qddot = max_devs.qddot.max(dev[2]);
        max_devs.qdddot = max_devs.qdddot.max(dev[3]);
        let exact = exact_jets(params, oscillator_initial, n as f64 * h);
        max_exact_error = max_exact_error.max((pu[0] - exact[0]).norm());
        samples.push(TrajectorySample { t: time, q: pu[0], q1: osc[0], q2: osc[2], dev_q: dev[0], dev_qddot: dev[2] });
        if n < steps {
            pu = rk4_step(&pu, h, &pu_rhs);
            osc = rk4_step(&osc, h, &osc_rhs);
        }
    }
    Ok(TrajectoryReport { dt: h, steps, oscillator_initial, samples, max_devs, max_exact_error })
}

/// Step sizes used for the convergence-order fit.
pub const CONVERGENCE_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

/// Fits the order of the fourth-order integration from its error against
/// the closed-form solution at several step sizes.
pub fn convergence_study(
    params: &TwoOscillatorParams,
    initial: &ClassicalState,
    t_end: f64,
    dts: &[f64],
) -> Result<ConvergenceStudy> {
    let mut errors = Vec::with_capacity(dts.len());
    for &dt in dts {
        errors.push(integrate_classical(params, initial, t_end, dt)?.max_exact_error);
    }
    let slope = log_log_slope(dts, &errors);
    Ok(ConvergenceStudy { dts: dts.to_vec(), errors, slope })
}

/// JSON summary of a classical run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalSummary {
    pub max_devs: MaxDeviations,
    pub convergence_slope: f64,
}
