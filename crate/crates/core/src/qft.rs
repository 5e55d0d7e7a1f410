//! Momentum-space propagators with complex masses, the Dirac algebra, and the
//! two-channel exchange kernel with its Pauli-Villars style constraints.

use std::sync::OnceLock;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{geometric_grid, log_log_slope};
use crate::report::Csv;

pub type Mat4 = Matrix4<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative distance to a pole below which propagators refuse to evaluate.
pub const POLE_TOLERANCE: f64 = 1e-12;
/// Residual below which a linear constraint counts as satisfied.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-12;

/// Dirac matrices in the Dirac representation, metric `(+,−,−,−)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaBasis {
    pub gamma: [Mat4; 4],
    /// Charge conjugation `iγ²γ⁰`.
    pub charge: Mat4,
}

pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

impl GammaBasis {
    pub fn dirac() -> &'static GammaBasis {
        static BASIS: OnceLock<GammaBasis> = OnceLock::new();
        BASIS.get_or_init(build_dirac)
    }

    pub fn metric(mu: usize, nu: usize) -> f64 {
        if mu == nu {
            METRIC[mu]
        } else {
            0.0
        }
    }

    /// Largest entry of `{γ^μ, γ^ν} − 2g^{μν}` over all index pairs.
    pub fn clifford_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                let anti = self.gamma[mu] * self.gamma[nu] + self.gamma[nu] * self.gamma[mu];
                let target = Mat4::identity() * Complex64::new(2.0 * Self::metric(mu, nu), 0.0);
                worst = worst.max(max_abs(&(anti - target)));
            }
        }
        worst
    }

    /// Largest deviation among `C + Cᵀ`, `C + C⁺`, `C² + 1` (i.e. `C⁻¹ = −C`)
    /// and `γ^{μT} + C γ^μ C⁻¹`.
    pub fn charge_defect(&self) -> f64 {
        let c = &self.charge;
        let inverse = c.try_inverse().expect("charge conjugation is invertible");
        let mut worst = max_abs(&(c + c.transpose()))
            .max(max_abs(&(c + c.adjoint())))
            .max(max_abs(&(c + inverse)));
        for g in &self.gamma {
            worst = worst.max(max_abs(&(g.transpose() + c * g * inverse)));
        }
        worst
    }
}

fn build_dirac() -> GammaBasis {
    let z = ZERO;
    let o = ONE;
    let sigma: [[[Complex64; 2]; 2]; 3] = [[[z, o], [o, z]], [[z, -I], [I, z]], [[o, z], [z, -o]]];
    let mut gamma = [Mat4::zeros(); 4];
    gamma[0] = Mat4::from_diagonal(&nalgebra::Vector4::new(o, o, -o, -o));
    for (k, s) in sigma.iter().enumerate() {
        let g = &mut gamma[k + 1];
        for r in 0..2 {
            for c in 0..2 {
                g[(r, c + 2)] = s[r][c];
                g[(r + 2, c)] = -s[r][c];
            }
        }
    }
    let charge = gamma[2] * gamma[0] * I;
    GammaBasis { gamma, charge }
}

pub fn max_abs(m: &Mat4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourMomentum(pub [Complex64; 4]);

impl FourMomentum {
    pub fn new(p0: Complex64, p1: Complex64, p2: Complex64, p3: Complex64) -> Self {
        Self([p0, p1, p2, p3])
    }

    pub fn real(p: [f64; 4]) -> Self {
        Self(p.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn square(&self) -> Complex64 {
        self.0.iter().zip(METRIC).map(|(p, g)| p * p * g).sum()
    }

    /// `γ^μ p_μ`.
    pub fn slash(&self, basis: &GammaBasis) -> Mat4 {
        let mut out = Mat4::zeros();
        for ((g, p), sign) in basis.gamma.iter().zip(self.0).zip(METRIC) {
            out += g * (p * sign);
        }
        out
    }
}

/// One Klein-Gordon exchange channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarChannel {
    /// Field renormalization.
    pub z: Complex64,
    pub mass: Complex64,
    pub coupling: Complex64,
}

impl ScalarChannel {
    pub fn new(z: Complex64, mass: Complex64, coupling: Complex64) -> Self {
        Self { z, mass, coupling }
    }

    /// A channel given by its squared mass (principal root).
    pub fn with_mass_sq(z: Complex64, mass_sq: Complex64, coupling: Complex64) -> Self {
        Self { z, mass: mass_sq.sqrt(), coupling }
    }

    pub fn validate(&self) -> Result<()> {
        if self.z == ZERO {
            return Err(Error::InvalidInput("field renormalization Z must be nonzero".into()));
        }
        Ok(())
    }

    pub fn mass_sq(&self) -> Complex64 {
        self.mass * self.mass
    }

    /// `g² Z⁻¹`, the channel's weight in the exchange kernel.
    pub fn weight(&self) -> Complex64 {
        self.coupling * self.coupling / self.z
    }

    /// Causal propagation wants `Im M ≤ 0`; other signs are allowed but flagged.
    pub fn convention_warning(&self) -> Option<String> {
        (self.mass.im > 0.0).then(|| format!("Im M = {} > 0: outside the causal convention Im M ≤ 0", self.mass.im))
    }
}

fn pole_check(p_sq: Complex64, mass_sq: Complex64) -> Result<Complex64> {
    let gap = p_sq - mass_sq;
    if gap.norm() < POLE_TOLERANCE * mass_sq.norm().max(1.0) {
        return Err(Error::OnShellPole { distance: gap.norm() });
    }
    Ok(gap)
}

/// `Z⁻¹/(p² − M²)`, or with `anti_causal` its partner `Z*⁻¹/(p² − M*²)`.
pub fn scalar_propagator(p_sq: Complex64, ch: &ScalarChannel, anti_causal: bool) -> Result<Complex64> {
    ch.validate()?;
    let (z, m) = if anti_causal { (ch.z.conj(), ch.mass.conj()) } else { (ch.z, ch.mass) };
    Ok(ONE / (z * pole_check(p_sq, m * m)?))
}

/// `(p̸ + M)/(p² − M²)`.
pub fn dirac_propagator(p: &FourMomentum, mass: Complex64) -> Result<Mat4> {
    let basis = GammaBasis::dirac();
    let gap = pole_check(p.square(), mass * mass)?;
    Ok((p.slash(basis) + Mat4::identity() * mass) / gap)
}

/// Causal fermion kernel block `C(p̸ + M)/(p² − M²)`.
pub fn dirac_kernel_block(p: &FourMomentum, mass: Complex64) -> Result<Mat4> {
    Ok(GammaBasis::dirac().charge * dirac_propagator(p, mass)?)
}

/// Anti-causal block `γ⁰(p̸ + M*)Cγ⁰/(p² − M*²)`.
pub fn anti_causal_dirac_block(p: &FourMomentum, mass: Complex64) -> Result<Mat4> {
    let b = GammaBasis::dirac();
    Ok(b.gamma[0] * dirac_propagator(p, mass.conj())? * b.charge * b.gamma[0])
}

/// Numerator `n1·p² + n0` over `Π (p² − M_i²)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleFraction {
    /// Coefficients in ascending powers of `p²`.
    pub numerator: Vec<Complex64>,
    /// The squared masses `M_i²`.
    pub denominator_roots: Vec<Complex64>,
}

impl SingleFraction {
    pub fn eval(&self, p_sq: Complex64) -> Complex64 {
        let num = self.numerator.iter().rev().fold(ZERO, |acc, c| acc * p_sq + c);
        let den: Complex64 = self.denominator_roots.iter().map(|r| p_sq - r).product();
        num / den
    }
}

/// Exchange kernel `Σ g_i² Z_i⁻¹/(p² − M_i²)`.
pub fn exchange_sum(channels: &[ScalarChannel], p_sq: Complex64) -> Result<Complex64> {
    if channels.is_empty() {
        return Err(Error::InvalidInput("at least one channel is required".into()));
    }
    let mut total = ZERO;
    for ch in channels {
        total += ch.coupling * ch.coupling * scalar_propagator(p_sq, ch, false)?;
    }
    Ok(total)
}

/// The exchange kernel over a common denominator (one or two channels).
pub fn single_fraction(channels: &[ScalarChannel]) -> Result<SingleFraction> {
    for ch in channels {
        ch.validate()?;
    }
    match channels {
        [one] => Ok(SingleFraction { numerator: vec![one.weight()], denominator_roots: vec![one.mass_sq()] }),
        [first, second] => {
            let (m1, m2) = (first.mass_sq(), second.mass_sq());
            if (m1 - m2).norm() <= POLE_TOLERANCE * m1.norm().max(m2.norm()).max(1.0) {
                return Err(Error::DegenerateMasses);
            }
            let (w1, w2) = (first.weight(), second.weight());
            Ok(SingleFraction { numerator: vec![-(m2 * w1 + m1 * w2), w1 + w2], denominator_roots: vec![m1, m2] })
        }
        _ => Err(Error::InvalidInput(format!("single-fraction form takes one or two channels, got {}", channels.len()))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinedKernel {
    pub sum: Complex64,
    pub single_fraction: SingleFraction,
}

pub fn combined_amplitude_kernel(channels: &[ScalarChannel], p_sq: Complex64) -> Result<CombinedKernel> {
    Ok(CombinedKernel { sum: exchange_sum(channels, p_sq)?, single_fraction: single_fraction(channels)? })
}

/// `g2²` making `g1²Z1⁻¹ + g2²Z2⁻¹` vanish.
pub fn pauli_villars_solve(first: &ScalarChannel, z2: Complex64) -> Result<Complex64> {
    first.validate()?;
    if z2 == ZERO {
        return Err(Error::InvalidInput("Z2 must be nonzero".into()));
    }
    Ok(-first.coupling * first.coupling * z2 / first.z)
}

/// Fitted slope of `ln|Σ g²Z⁻¹/(p² − M²)|` against `ln p²`.
pub fn falloff_exponent(channels: &[ScalarChannel], p_sq_grid: &[f64]) -> Result<f64> {
    let heaviest = channels.iter().map(|c| c.mass_sq().norm()).fold(1.0, f64::max);
    let (lo, hi) = match (p_sq_grid.first(), p_sq_grid.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(Error::InvalidInput("empty momentum grid".into())),
    };
    if p_sq_grid.len() < 3 || lo <= heaviest || hi < 1e3 * lo * (1.0 - 1e-9) {
        return Err(Error::InvalidInput(format!(
            "falloff grid must span three decades above max|M²| = {heaviest}, got [{lo}, {hi}]"
        )));
    }
    let mut values = Vec::with_capacity(p_sq_grid.len());
    for &p in p_sq_grid {
        values.push(exchange_sum(channels, Complex64::new(p, 0.0))?.norm());
    }
    Ok(log_log_slope(p_sq_grid, &values))
}

/// The default falloff grid: 40 points over `[10³, 10⁶]·max(1, max|M²|)`.
pub fn default_falloff_grid(channels: &[ScalarChannel]) -> Vec<f64> {
    let heaviest = channels.iter().map(|c| c.mass_sq().norm()).fold(1.0, f64::max);
    geometric_grid(1e3 * heaviest, 1e6 * heaviest, 40)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubleConstraint {
    /// `g1²Z1⁻¹ + g2²Z2⁻¹`.
    pub constraint1_residual: Complex64,
    /// `M2²g1²Z1⁻¹ + M1²g2²Z2⁻¹`.
    pub constraint2_residual: Complex64,
    /// Largest `|kernel|` over the probe grid.
    pub amplitude_sup_norm: f64,
    pub both_hold: bool,
}

/// Probe momenta off the real axis, so real masses never sit on a grid point.
pub fn probe_grid() -> Vec<Complex64> {
    geometric_grid(1e-2, 1e4, 49).into_iter().map(|r| Complex64::from_polar(r, 0.3)).collect()
}

/// Both numerator coefficients of the two-channel kernel and its size.
/// With both vanishing and `w1 ≠ 0`, `(M2² − M1²)w1 = 0` forces equal masses.
pub fn double_constraint_check(first: &ScalarChannel, second: &ScalarChannel) -> Result<DoubleConstraint> {
    first.validate()?;
    second.validate()?;
    let (w1, w2) = (first.weight(), second.weight());
    let c1 = w1 + w2;
    let c2 = second.mass_sq() * w1 + first.mass_sq() * w2;
    let mut sup: f64 = 0.0;
    for p in probe_grid() {
        sup = sup.max(exchange_sum(&[*first, *second], p)?.norm());
    }
    Ok(DoubleConstraint {
        constraint1_residual: c1,
        constraint2_residual: c2,
        amplitude_sup_norm: sup,
        both_hold: c1.norm() < CONSTRAINT_TOLERANCE && c2.norm() < CONSTRAINT_TOLERANCE,
    })
}

/// The channel with `Z` absorbed into the coupling: `(1, M, g/√Z)`.
pub fn absorb_renormalization(ch: &ScalarChannel) -> ScalarChannel {
    ScalarChannel { z: ONE, mass: ch.mass, coupling: ch.coupling / ch.z.sqrt() }
}

/// `|g²Z⁻¹/(p² − M²) − (g/√Z)²/(p² − M²)|`.
pub fn rescaling_equivalence(ch: &ScalarChannel, p_sq: Complex64) -> Result<f64> {
    let original = exchange_sum(&[*ch], p_sq)?;
    let rescaled = exchange_sum(&[absorb_renormalization(ch)], p_sq)?;
    Ok((original - rescaled).norm())
}

/// CSV `p_sq,Re(K),Im(K)` of the exchange kernel along real `p²`.
pub fn kernel_scan_csv(channels: &[ScalarChannel], p_sq: &[f64]) -> Result<String> {
    let mut csv = Csv::new(&["p_sq", "Re(K)", "Im(K)"]);
    for &p in p_sq {
        let k = exchange_sum(channels, Complex64::new(p, 0.0))?;
        csv.row(&[p, k.re, k.im]);
    }
    Ok(csv.finish())
}

/// Constraint report for a two-channel setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub constraint1: Complex64,
    pub constraint2: Complex64,
    pub slope: Option<f64>,
    pub vanishes: bool,
}

pub fn constraint_report(first: &ScalarChannel, second: &ScalarChannel) -> Result<ConstraintReport> {
    let check = double_constraint_check(first, second)?;
    let channels = [*first, *second];
    // a kernel that vanishes identically has no slope
    let slope = if check.amplitude_sup_norm < 1e-10 {
        None
    } else {
        Some(falloff_exponent(&channels, &default_falloff_grid(&channels))?)
    };
    Ok(ConstraintReport {
        constraint1: check.constraint1_residual,
        constraint2: check.constraint2_residual,
        slope,
        vanishes: check.amplitude_sup_norm < 1e-10,
    })
}
