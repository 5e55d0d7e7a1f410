//! Retarded Feynman kernels of a single (non-Hermitian) oscillator.
//!
//! Kernels are functions of two contour points `ζ', ζ` and act by
//! `f ↦ ∫ K(ζ', ζ) f(ζ) dζ` along the oscillator's contour. Public entry
//! points take contour parameters `s', s` (`ζ = e^{iθ} s`) and only accept
//! `Δt ≥ 0`; the retarded step function is represented by never evaluating
//! backwards in time.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::contour::{contour_for, hermite_functions, inverse_length, Contour};
use crate::error::{Error, Result};
use crate::fit::log_log_slope;
use crate::params::OscillatorParams;
use crate::quadrature::{pairwise_sum, GaussHermite, MAX_NODES};
use crate::report::Csv;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `|sin(ΩΔt)|` below which the closed form is refused.
pub const CAUSTIC_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelRequest {
    pub params: OscillatorParams,
    pub dt: f64,
    /// Highest eigenfunction index kept in the spectral sum.
    pub m_max: usize,
    pub slices: usize,
}

impl KernelRequest {
    pub fn new(params: OscillatorParams, dt: f64) -> Self {
        Self { params, dt, m_max: 60, slices: 8 }
    }

    fn check(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.dt >= 0.0) || !self.dt.is_finite() {
            return Err(Error::NegativeTime { dt: self.dt });
        }
        Ok(())
    }
}

struct Frame {
    contour: Contour,
    alpha: f64,
}

fn frame(params: &OscillatorParams) -> Result<Frame> {
    Ok(Frame { contour: contour_for(params.mass, params.omega)?, alpha: inverse_length(params) })
}

/// `Σ_m φ_R,m(s') φ_L,m(s) exp(-iΩ(m+½)Δt)`, truncated at `m_max`.
pub fn spectral_kernel(req: &KernelRequest, s_out: f64, s_in: f64) -> Result<Complex64> {
    req.check()?;
    let f = frame(&req.params)?;
    Ok(spectral_sum(&req.params, &f, req.m_max, s_out, s_in, req.dt))
}

fn spectral_sum(params: &OscillatorParams, f: &Frame, m_max: usize, s_out: f64, s_in: f64, dt: f64) -> Complex64 {
    let h_out = hermite_functions(m_max, f.alpha * s_out);
    let h_in = hermite_functions(m_max, f.alpha * s_in);
    let step = (-I * params.omega * dt).exp();
    let mut phase = (-I * params.omega * dt * 0.5).exp();
    let mut terms = Vec::with_capacity(m_max + 1);
    for (a, b) in h_out.iter().zip(&h_in) {
        terms.push(phase * (a * b));
        phase *= step;
    }
    // φ_R φ_L carries α e^{-iθ}
    pairwise_sum(terms) * Complex64::from_polar(f.alpha, -f.contour.theta)
}

/// `K(ζ', ζ) = norm · exp(a ζ'² + b ζ' ζ + c ζ²)` acting along the ray `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianKernel {
    pub norm: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub theta: f64,
}

/// `∫ exp(q y² + β y) dy` along the ray `e^{iθ}`, by the Gaussian formula.
fn ray_gaussian_integral(q: Complex64, beta: Complex64, theta: f64) -> Result<Complex64> {
    let rot = Complex64::from_polar(1.0, 2.0 * theta);
    let along = q * rot;
    // Re = 0 is the oscillatory (Fresnel) limit, still convergent.
    if along.re > 1e-13 * along.norm() {
        return Err(Error::DivergentGaussian { re_coeff: along.re });
    }
    let root = (Complex64::new(PI, 0.0) / (-along)).sqrt();
    Ok(Complex64::from_polar(1.0, theta) * root * (-beta * beta / (4.0 * q)).exp())
}

impl GaussianKernel {
    /// Exact oscillator kernel over `dt > 0` in Mehler form. The principal
    /// root of `1 - e^{-2iΩΔt}` gives the continuous branch from `Δt → 0⁺`
    /// (for real Ω as the limit from `Im Ω < 0`).
    pub fn exact(params: &OscillatorParams, dt: f64) -> Result<Self> {
        params.validate()?;
        if !(dt >= 0.0) {
            return Err(Error::NegativeTime { dt });
        }
        Self::exact_signed(params, dt)
    }

    /// Same closed form, continued to either sign of `dt`.
    fn exact_signed(params: &OscillatorParams, dt: f64) -> Result<Self> {
        let sine = (params.omega * dt).sin();
        if sine.norm() < CAUSTIC_TOLERANCE {
            return Err(Error::CausticSingularity { value: sine.norm() });
        }
        let f = frame(params)?;
        let w = (-I * params.omega * dt).exp();
        let w2 = w * w;
        let one_minus = ONE - w2;
        let mo = params.mass * params.omega / params.hbar;
        let norm = Complex64::from_polar(f.alpha / PI.sqrt(), -f.contour.theta) * (-I * params.omega * dt * 0.5).exp()
            / one_minus.sqrt();
        let diag = -mo * (ONE + w2) / (2.0 * one_minus);
        Ok(Self { norm, a: diag, b: 2.0 * mo * w / one_minus, c: diag, theta: f.contour.theta })
    }

    /// First-order short-time kernel `(1 + HΔτ/(iħ))` after the momentum
    /// integration, potential taken at the earlier point, normalized so that
    /// its free part integrates to one along the contour.
    pub fn short_time(params: &OscillatorParams, eps: f64) -> Result<Self> {
        params.validate()?;
        if !(eps > 0.0) {
            return Err(Error::NegativeTime { dt: eps });
        }
        let f = frame(params)?;
        let kin = I * params.mass / (2.0 * params.hbar * eps);
        let pot = I * eps * params.mass * params.omega * params.omega / (2.0 * params.hbar);
        let free = ray_gaussian_integral(kin, ZERO, f.contour.theta)?;
        Ok(Self { norm: ONE / free, a: kin, b: -2.0 * kin, c: kin - pot, theta: f.contour.theta })
    }

    pub fn eval_zeta(&self, z_out: Complex64, z_in: Complex64) -> Complex64 {
        self.norm * (self.a * z_out * z_out + self.b * z_out * z_in + self.c * z_in * z_in).exp()
    }

    pub fn eval(&self, s_out: f64, s_in: f64) -> Complex64 {
        let rot = Complex64::from_polar(1.0, self.theta);
        self.eval_zeta(rot * s_out, rot * s_in)
    }

    /// `self ∘ earlier`: the kernel over the combined interval.
    pub fn after(&self, earlier: &Self) -> Result<Self> {
        let q = self.c + earlier.a;
        let factor = ray_gaussian_integral(q, ZERO, self.theta)?;
        Ok(Self {
            norm: self.norm * earlier.norm * factor,
            a: self.a - self.b * self.b / (4.0 * q),
            b: -self.b * earlier.b / (2.0 * q),
            c: earlier.c - earlier.b * earlier.b / (4.0 * q),
            theta: self.theta,
        })
    }

    /// `self` composed with itself `2^k` times by repeated squaring.
    pub fn power_of_two(&self, k: u32) -> Result<Self> {
        let mut out = *self;
        for _ in 0..k {
            out = out.after(&out)?;
        }
        Ok(out)
    }

    /// Applies the kernel to `f(ζ) = norm·exp(a ζ² + b ζ)`.
    pub fn apply(&self, f: &GaussianFunction) -> Result<GaussianFunction> {
        let q = self.c + f.a;
        let theta = self.theta;
        // ∫ exp(q ζ² + (b_K ζ' + b_f) ζ) dζ = I(q, 0) · exp(-(b_K ζ' + b_f)²/(4q))
        let base = ray_gaussian_integral(q, ZERO, theta)?;
        let norm = self.norm * f.norm * base * (-f.b * f.b / (4.0 * q)).exp();
        Ok(GaussianFunction {
            norm,
            a: self.a - self.b * self.b / (4.0 * q),
            b: -self.b * f.b / (2.0 * q),
        })
    }
}

/// `norm·exp(a ζ² + b ζ)`, a Gaussian test function in the contour coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianFunction {
    pub norm: Complex64,
    pub a: Complex64,
    pub b: Complex64,
}

impl GaussianFunction {
    /// `exp(-(s - center)²/(2 width²))` written in `ζ = e^{iθ} s`.
    pub fn bump(center: f64, width: f64, theta: f64) -> Self {
        let back = Complex64::from_polar(1.0, -theta);
        let g = -1.0 / (2.0 * width * width);
        Self { norm: Complex64::new((g * center * center).exp(), 0.0), a: g * back * back, b: -2.0 * g * center * back }
    }

    pub fn eval_zeta(&self, z: Complex64) -> Complex64 {
        self.norm * (self.a * z * z + self.b * z).exp()
    }

    pub fn eval(&self, s: f64, theta: f64) -> Complex64 {
        self.eval_zeta(Complex64::from_polar(s, theta))
    }
}

/// The exact kernel `K(s', s)`.
pub fn closed_form_kernel(req: &KernelRequest, s_out: f64, s_in: f64) -> Result<Complex64> {
    req.check()?;
    Ok(GaussianKernel::exact(&req.params, req.dt)?.eval(s_out, s_in))
}

/// The spectral kernel applied to a test function, evaluated at `probe`.
/// Coefficients `∫ φ_L,m f dζ` come from Gauss-Hermite quadrature.
pub fn spectral_apply(req: &KernelRequest, f: &GaussianFunction, probe: &[f64], nodes: usize) -> Result<Vec<Complex64>> {
    req.check()?;
    let fr = frame(&req.params)?;
    // products h_m h_n up to 2 m_max need that many nodes to be exact
    let gh = GaussHermite::new(nodes.max(2 * req.m_max + 2).min(MAX_NODES));
    let norm = Complex64::from_polar(fr.alpha.sqrt(), -fr.contour.theta / 2.0);
    let measure = fr.contour.measure();
    let mut coefficients = vec![ZERO; req.m_max + 1];
    for (s, w) in gh.line_rule(0.0, std::f64::consts::SQRT_2 / fr.alpha) {
        let hs = hermite_functions(req.m_max, fr.alpha * s);
        let value = f.eval(s, fr.contour.theta) * w * measure;
        for (cm, h) in coefficients.iter_mut().zip(hs) {
            *cm += norm * h * value;
        }
    }
    let step = (-I * req.params.omega * req.dt).exp();
    Ok(probe
        .iter()
        .map(|&s| {
            let hs = hermite_functions(req.m_max, fr.alpha * s);
            let mut phase = (-I * req.params.omega * req.dt * 0.5).exp();
            let mut total = ZERO;
            for (cm, h) in coefficients.iter().zip(hs) {
                total += phase * cm * norm * h;
                phase *= step;
            }
            total
        })
        .collect())
}

/// `∫ later(z_out, y) earlier(y, z_in) dy` by Gauss-Hermite quadrature on the
/// steepest-descent ray through the saddle of the integrand, oriented like
/// the contour ray `theta`. `q` and `beta` are the quadratic and linear
/// coefficients of the integrand in `y`; they only position the ray.
fn saddle_quadrature<F: Fn(Complex64) -> Complex64>(gh: &GaussHermite, theta: f64, q: Complex64, beta: Complex64, integrand: F) -> Complex64 {
    let mut dir = Complex64::from_polar(1.0, (PI - q.arg()) / 2.0);
    if (dir * Complex64::from_polar(1.0, -theta)).re < 0.0 {
        dir = -dir;
    }
    let width = 1.0 / q.norm().sqrt();
    let center = -beta / (2.0 * q);
    let v = gh.integrate_line(0.0, width, |t| integrand(center + dir * t));
    v * dir
}

/// `(later ∘ earlier)(s', s)` by contour quadrature.
pub fn compose_by_quadrature(later: &GaussianKernel, earlier: &GaussianKernel, s_out: f64, s_in: f64, nodes: usize) -> Complex64 {
    let gh = GaussHermite::new(nodes);
    let rot = Complex64::from_polar(1.0, later.theta);
    compose_at(&gh, later, earlier, rot * s_out, rot * s_in)
}

fn compose_at(gh: &GaussHermite, later: &GaussianKernel, earlier: &GaussianKernel, z_out: Complex64, z_in: Complex64) -> Complex64 {
    let q = later.c + earlier.a;
    let beta = later.b * z_out + earlier.b * z_in;
    saddle_quadrature(gh, later.theta, q, beta, |y| later.eval_zeta(z_out, y) * earlier.eval_zeta(y, z_in))
}

/// Largest `|K(Δ1)∘K(Δ2) - K(Δ1+Δ2)|` over a grid on `|s|, |s'| ≤ window`.
pub fn semigroup_defect(params: &OscillatorParams, dt1: f64, dt2: f64, window: f64, nodes: usize) -> Result<f64> {
    let k1 = GaussianKernel::exact(params, dt1)?;
    let k2 = GaussianKernel::exact(params, dt2)?;
    let k12 = GaussianKernel::exact(params, dt1 + dt2)?;
    let gh = GaussHermite::new(nodes);
    let rot = Complex64::from_polar(1.0, k1.theta);
    let mut worst: f64 = 0.0;
    for s_out in grid(window, 13) {
        for s_in in grid(window, 13) {
            let numeric = compose_at(&gh, &k1, &k2, rot * s_out, rot * s_in);
            worst = worst.max((numeric - k12.eval(s_out, s_in)).norm());
        }
    }
    Ok(worst)
}

/// Largest `|(K1∘K2)∘K3 - K1∘(K2∘K3)|` with both sides nested quadratures.
pub fn associativity_defect(params: &OscillatorParams, dts: [f64; 3], window: f64, nodes: usize) -> Result<f64> {
    let [k1, k2, k3] = [GaussianKernel::exact(params, dts[0])?, GaussianKernel::exact(params, dts[1])?, GaussianKernel::exact(params, dts[2])?];
    // analytic composites only steer the outer integration ray
    let k12 = k1.after(&k2)?;
    let k23 = k2.after(&k3)?;
    let gh = GaussHermite::new(nodes);
    let rot = Complex64::from_polar(1.0, k1.theta);
    let mut worst: f64 = 0.0;
    for s_out in grid(window, 5) {
        for s_in in grid(window, 5) {
            let (zo, zi) = (rot * s_out, rot * s_in);
            let left = saddle_quadrature(&gh, k1.theta, k12.c + k3.a, k12.b * zo + k3.b * zi, |y| {
                compose_at(&gh, &k1, &k2, zo, y) * k3.eval_zeta(y, zi)
            });
            let right = saddle_quadrature(&gh, k1.theta, k1.c + k23.a, k1.b * zo + k23.b * zi, |y| {
                k1.eval_zeta(zo, y) * compose_at(&gh, &k2, &k3, y, zi)
            });
            worst = worst.max((left - right).norm());
        }
    }
    Ok(worst)
}

fn grid(window: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| -window + 2.0 * window * k as f64 / (count - 1) as f64).collect()
}

/// Convergence of the sliced kernel towards the exact one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub error: Vec<f64>,
    pub fitted_order: f64,
}

/// `slices` first-order short-time kernels composed along the contour.
pub fn compose_slices(req: &KernelRequest) -> Result<GaussianKernel> {
    req.check()?;
    if req.slices == 0 || !req.slices.is_power_of_two() {
        return Err(Error::InvalidInput(format!("slice count must be a power of two, got {}", req.slices)));
    }
    let eps = req.dt / req.slices as f64;
    GaussianKernel::short_time(&req.params, eps)?.power_of_two(req.slices.trailing_zeros())
}

/// Largest pointwise gap between the sliced and the exact kernel on `|s|, |s'| ≤ window`.
pub fn slice_error(req: &KernelRequest, window: f64) -> Result<f64> {
    let sliced = compose_slices(req)?;
    let exact = GaussianKernel::exact(&req.params, req.dt)?;
    let mut worst: f64 = 0.0;
    for s_out in grid(window, 25) {
        for s_in in grid(window, 25) {
            worst = worst.max((sliced.eval(s_out, s_in) - exact.eval(s_out, s_in)).norm());
        }
    }
    Ok(worst)
}

/// Slice errors for each `N` and the fitted order `-d ln(error)/d ln N`.
pub fn slice_convergence(params: &OscillatorParams, dt: f64, counts: &[usize], window: f64) -> Result<ConvergenceReport> {
    let mut error = Vec::with_capacity(counts.len());
    for &n in counts {
        let req = KernelRequest { params: *params, dt, m_max: 0, slices: n };
        error.push(slice_error(&req, window)?);
    }
    let xs: Vec<f64> = counts.iter().map(|&n| n as f64).collect();
    let fitted_order = -log_log_slope(&xs, &error);
    Ok(ConvergenceReport { n: counts.to_vec(), error, fitted_order })
}

/// Anti-holomorphic kernel on the conjugate contour, by its own spectral sum
/// over the conjugate sector (`E_n* = ħΩ*(n+½)`).
pub fn anti_holomorphic_kernel(req: &KernelRequest, s_out: f64, s_in: f64) -> Result<Complex64> {
    req.check()?;
    let f = frame(&req.params)?;
    let h_out = hermite_functions(req.m_max, f.alpha * s_out);
    let h_in = hermite_functions(req.m_max, f.alpha * s_in);
    let omega = req.params.omega.conj();
    let step = (-I * omega * req.dt).exp();
    let mut phase = (-I * omega * req.dt * 0.5).exp();
    let mut terms = Vec::with_capacity(req.m_max + 1);
    for (a, b) in h_out.iter().zip(&h_in) {
        terms.push(phase * (a * b));
        phase *= step;
    }
    Ok(pairwise_sum(terms) * Complex64::from_polar(f.alpha, f.contour.theta))
}

/// `conj(K_H(s, s'; -Δt))`, the holomorphic kernel continued backwards,
/// conjugated and transposed.
pub fn conjugate_transposed_holomorphic(req: &KernelRequest, s_out: f64, s_in: f64) -> Result<Complex64> {
    req.check()?;
    let f = frame(&req.params)?;
    Ok(spectral_sum(&req.params, &f, req.m_max, s_in, s_out, -req.dt).conj())
}

/// Product kernel of the PT pair, holomorphic factor times anti-holomorphic factor.
pub fn product_kernel(req: &KernelRequest, hol: (f64, f64), anti: (f64, f64)) -> Result<Complex64> {
    Ok(spectral_kernel(req, hol.0, hol.1)? * anti_holomorphic_kernel(req, anti.0, anti.1)?)
}

/// The same product kernel as a double spectral sum over `(m, n)` with
/// `E_{m,n} = E_m + E_n*`.
pub fn product_kernel_direct(req: &KernelRequest, hol: (f64, f64), anti: (f64, f64)) -> Result<Complex64> {
    req.check()?;
    let f = frame(&req.params)?;
    let (ho, hi) = (hermite_functions(req.m_max, f.alpha * hol.0), hermite_functions(req.m_max, f.alpha * hol.1));
    let (ao, ai) = (hermite_functions(req.m_max, f.alpha * anti.0), hermite_functions(req.m_max, f.alpha * anti.1));
    let (omega, hbar) = (req.params.omega, req.params.hbar);
    let mut terms = Vec::with_capacity((req.m_max + 1) * (req.m_max + 1));
    for m in 0..=req.m_max {
        for n in 0..=req.m_max {
            let energy = hbar * (omega * (m as f64 + 0.5) + omega.conj() * (n as f64 + 0.5));
            terms.push((energy * req.dt / (I * hbar)).exp() * (ho[m] * hi[m] * ao[n] * ai[n]));
        }
    }
    // the two contour phases cancel
    Ok(pairwise_sum(terms) * (f.alpha * f.alpha))
}

/// Sup-norms over `|s|, |s'| ≤ window` of the holomorphic, anti-holomorphic
/// and product kernels at one time separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupNorms {
    pub dt: f64,
    pub holomorphic: f64,
    pub anti_holomorphic: f64,
    pub product: f64,
}

/// Measures kernel sizes at growing separations; no convergence claim is attached.
pub fn long_time_probe(params: &OscillatorParams, dts: &[f64], m_max: usize, window: f64) -> Result<Vec<SupNorms>> {
    let mut out = Vec::with_capacity(dts.len());
    for &dt in dts {
        let req = KernelRequest { params: *params, dt, m_max, slices: 1 };
        let (mut hol, mut anti): (f64, f64) = (0.0, 0.0);
        for s_out in grid(window, 13) {
            for s_in in grid(window, 13) {
                hol = hol.max(spectral_kernel(&req, s_out, s_in)?.norm());
                anti = anti.max(anti_holomorphic_kernel(&req, s_out, s_in)?.norm());
            }
        }
        out.push(SupNorms { dt, holomorphic: hol, anti_holomorphic: anti, product: hol * anti });
    }
    Ok(out)
}

/// Which kernel a grid dump evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Spectral,
    ClosedForm,
    Sliced,
}

/// CSV `s,s',Re(K),Im(K)` on a square grid.
pub fn kernel_grid_csv(req: &KernelRequest, kind: KernelKind, window: f64, count: usize) -> Result<String> {
    let sliced = match kind {
        KernelKind::Sliced => Some(compose_slices(req)?),
        _ => None,
    };
    let mut csv = Csv::new(&["s", "s'", "Re(K)", "Im(K)"]);
    for s in grid(window, count) {
        for sp in grid(window, count) {
            let k = match kind {
                KernelKind::Spectral => spectral_kernel(req, sp, s)?,
                KernelKind::ClosedForm => closed_form_kernel(req, sp, s)?,
                KernelKind::Sliced => sliced.as_ref().expect("built above").eval(sp, s),
            };
            csv.row(&[s, sp, k.re, k.im]);
        }
    }
    Ok(csv.finish())
}

/// Largest allowed `|Ω|·step` on the source grid.
pub const MAX_GRID_PHASE: f64 = 0.05;
/// Agreement required between successive extrapolated estimates.
pub const GRID_TOLERANCE: f64 = 1e-6;
const MAX_REFINEMENTS: usize = 8;

/// Connected two-point function from the discretized quadratic generating functional.
///
/// The action `S = ½ ζᵀ A ζ + h Jᵀ ζ` with `A = (M/h) L - h M Ω² I` (`L` the
/// second-difference matrix) gives `W = -½ h² Jᵀ A⁻¹ J` and so
/// `G(t1, t2) = iħ (A⁻¹)_{k1 k2}`. Boundary rows use the decaying root of the
/// discrete homogeneous equation, which makes the finite grid transparent.
/// Successive halvings of the step are combined by Richardson extrapolation in `h²`.
pub fn two_point_from_w(params: &OscillatorParams, t1: f64, t2: f64) -> Result<Complex64> {
    params.validate()?;
    if !(params.omega.im < 0.0) {
        return Err(Error::InvalidInput(format!("the retarded selection needs Im Ω < 0, got {}", params.omega)));
    }
    let sep = (t1 - t2).abs();
    let omega_abs = params.omega.norm();
    let base = MAX_GRID_PHASE / omega_abs;
    let intervals = if sep > 0.0 { (sep / base).ceil().max(1.0) as usize } else { 1 };
    let h0 = if sep > 0.0 { sep / intervals as f64 } else { base };

    let mut table: Vec<Vec<Complex64>> = Vec::new();
    let mut last_change = f64::INFINITY;
    for level in 0..MAX_REFINEMENTS {
        let scale = 1usize << level;
        let h = h0 / scale as f64;
        let raw = discrete_green(params, h, intervals * scale * usize::from(sep > 0.0))?;
        let mut row = vec![raw];
        for j in 1..=level {
            let factor = 4f64.powi(j as i32);
            let prev = &table[level - 1];
            let v = (row[j - 1] * factor - prev[j - 1]) / (factor - 1.0);
            row.push(v);
        }
        let best = *row.last().expect("row has at least one entry");
        if level >= 2 {
            let previous_best = *table[level - 1].last().expect("nonempty");
            last_change = (best - previous_best).norm();
            if last_change <= GRID_TOLERANCE * 1e-2 {
                return Ok(best);
            }
        }
        table.push(row);
    }
    if last_change <= GRID_TOLERANCE {
        return Ok(*table.last().and_then(|r| r.last()).expect("nonempty"));
    }
    Err(Error::GridUnderresolved { change: last_change })
}

/// `iħ (A⁻¹)_{0, offset}` on a grid of step `h` with transparent ends.
fn discrete_green(params: &OscillatorParams, h: f64, offset: usize) -> Result<Complex64> {
    let margin = 2;
    let n = offset + 2 * margin + 1;
    let (m, w2) = (params.mass, params.omega * params.omega);
    // decaying root of r + 1/r = 2 - h²Ω²
    let trace = Complex64::new(2.0, 0.0) - h * h * w2;
    let disc = (trace * trace - 4.0).sqrt();
    let (r1, r2) = ((trace + disc) / 2.0, (trace - disc) / 2.0);
    let r = if r1.norm() < r2.norm() { r1 } else { r2 };
    if !(r.norm() < 1.0) {
        return Err(Error::InvalidInput("no decaying discrete mode for these parameters".into()));
    }
    let kin = m / h;
    let diag_interior = 2.0 * kin - h * m * w2;
    let mut diag = vec![diag_interior; n];
    diag[0] -= kin * r;
    diag[n - 1] -= kin * r;
    let off = -kin;
    // solve A x = e_{margin}; G = iħ x_{margin + offset}
    let mut rhs = vec![ZERO; n];
    rhs[margin] = ONE;
    let x = thomas(&diag, off, &rhs)?;
    Ok(I * params.hbar * x[margin + offset])
}

/// Tridiagonal solve with constant off-diagonal.
fn thomas(diag: &[Complex64], off: Complex64, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = diag.len();
    let mut c = vec![ZERO; n];
    let mut d = vec![ZERO; n];
    let mut pivot = diag[0];
    if pivot.norm() == 0.0 {
        return Err(Error::InvalidInput("singular quadratic form".into()));
    }
    c[0] = off / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - off * c[i - 1];
        if pivot.norm() == 0.0 {
            return Err(Error::InvalidInput("singular quadratic form".into()));
        }
        c[i] = off / pivot;
        d[i] = (rhs[i] - off * d[i - 1]) / pivot;
    }
    let mut x = vec![ZERO; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::analytic_two_point;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn causal_sets() -> [OscillatorParams; 3] {
        [
            OscillatorParams::new(c(1.0, 0.0), c(1.0, -0.5)),
            OscillatorParams::new(c(-1.0, 0.0), c(1.0, -0.5)),
            OscillatorParams::new(c(1.0, 0.2), c(1.0, -0.5)),
        ]
    }

    #[test]
    fn spectral_matches_closed_form_for_causal_sets() {
        for params in causal_sets() {
            let req = KernelRequest::new(params, 0.7);
            let mut worst: f64 = 0.0;
            for s_out in grid(3.0, 13) {
                for s_in in grid(3.0, 13) {
                    let d = spectral_kernel(&req, s_out, s_in).unwrap() - closed_form_kernel(&req, s_out, s_in).unwrap();
                    worst = worst.max(d.norm());
                }
            }
            assert!(worst < 1e-6, "{params:?}: {worst}");
        }
    }

    #[test]
    fn real_frequency_agreement_on_test_functions() {
        for params in [OscillatorParams::real(1.0, 1.0), OscillatorParams::new(c(-1.0, 0.0), c(1.0, 0.0))] {
            let req = KernelRequest::new(params, 0.7);
            let theta = contour_for(params.mass, params.omega).unwrap().theta;
            let f = GaussianFunction::bump(0.4, 0.8, theta);
            let probe = grid(3.0, 13);
            let spectral = spectral_apply(&req, &f, &probe, 64).unwrap();
            let exact = GaussianKernel::exact(&params, 0.7).unwrap().apply(&f).unwrap();
            for (s, v) in probe.iter().zip(spectral) {
                assert!((v - exact.eval(*s, theta)).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn equal_time_and_full_period() {
        let params = OscillatorParams::real(1.0, 1.0);
        let f = GaussianFunction::bump(0.3, 0.9, 0.0);
        let probe = grid(3.0, 13);
        let mut req = KernelRequest::new(params, 0.0);
        req.m_max = 40;
        let at_zero = spectral_apply(&req, &f, &probe, 64).unwrap();
        for (s, v) in probe.iter().zip(&at_zero) {
            assert!((v - f.eval(*s, 0.0)).norm() < 1e-4);
        }
        req.dt = 2.0 * PI;
        let period = spectral_apply(&req, &f, &probe, 64).unwrap();
        for (p, z) in period.iter().zip(&at_zero) {
            assert!((p + z).norm() < 1e-10);
        }
    }

    #[test]
    fn caustic_and_negative_time() {
        let req = KernelRequest::new(OscillatorParams::real(1.0, 1.0), PI);
        assert!(matches!(closed_form_kernel(&req, 0.0, 0.0), Err(Error::CausticSingularity { .. })));
        let back = KernelRequest::new(OscillatorParams::real(1.0, 1.0), -0.1);
        assert!(matches!(spectral_kernel(&back, 0.0, 0.0), Err(Error::NegativeTime { .. })));
    }

    #[test]
    fn decay_under_negative_imaginary_frequency() {
        let params = OscillatorParams::new(c(1.0, 0.0), c(1.0, -0.05));
        let probe = long_time_probe(&params, &[10.0, 50.0], 60, 3.0).unwrap();
        assert!(probe[1].holomorphic < probe[0].holomorphic);
    }

    #[test]
    fn semigroup_and_associativity() {
        for params in [OscillatorParams::real(1.0, 1.0), causal_sets()[1], causal_sets()[2]] {
            assert!(semigroup_defect(&params, 0.3, 0.4, 3.0, 64).unwrap() < 1e-6);
            assert!(associativity_defect(&params, [0.3, 0.25, 0.4], 2.0, 64).unwrap() < 1e-6);
        }
    }

    #[test]
    fn analytic_composition_is_semigroup() {
        let params = causal_sets()[2];
        let k = GaussianKernel::exact(&params, 0.3).unwrap().after(&GaussianKernel::exact(&params, 0.5).unwrap()).unwrap();
        let direct = GaussianKernel::exact(&params, 0.8).unwrap();
        for (so, si) in [(0.0, 0.0), (1.0, -2.0), (2.5, 0.3)] {
            assert!((k.eval(so, si) - direct.eval(so, si)).norm() < 1e-12);
        }
    }

    #[test]
    fn first_order_slicing() {
        let report = slice_convergence(&OscillatorParams::real(1.0, 1.0), 1.0, &[8, 16, 32, 64], 3.0).unwrap();
        assert!((report.fitted_order - 1.0).abs() < 0.2, "{report:?}");
        let causal = slice_convergence(&causal_sets()[1], 1.0, &[8, 16, 32, 64], 3.0).unwrap();
        assert!((causal.fitted_order - 1.0).abs() < 0.2, "{causal:?}");
    }

    #[test]
    fn single_short_slice_is_a_smeared_delta() {
        let params = OscillatorParams::real(1.0, 1.0);
        let f = GaussianFunction::bump(0.3, 0.9, 0.0);
        let out = GaussianKernel::short_time(&params, 1e-6).unwrap().apply(&f).unwrap();
        for s in grid(3.0, 13) {
            assert!((out.eval(s, 0.0) - f.eval(s, 0.0)).norm() < 1e-5);
        }
    }

    #[test]
    fn anti_holomorphic_relation_and_product() {
        let params = causal_sets()[2];
        let req = KernelRequest { m_max: 30, ..KernelRequest::new(params, 0.6) };
        for (so, si) in [(0.0, 0.5), (1.2, -0.7), (-2.0, 2.0)] {
            let a = anti_holomorphic_kernel(&req, so, si).unwrap();
            let b = conjugate_transposed_holomorphic(&req, so, si).unwrap();
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
            let p = product_kernel(&req, (so, si), (si, so)).unwrap();
            let d = product_kernel_direct(&req, (so, si), (si, so)).unwrap();
            assert!((p - d).norm() <= 1e-10 * p.norm().max(1.0));
        }
    }

    #[test]
    fn generating_functional_two_point() {
        let params = OscillatorParams::new(c(1.0, 0.0), c(1.0, -0.01));
        for (t1, t2) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.3, 2.1)] {
            let g = two_point_from_w(&params, t1, t2).unwrap();
            assert!((g - analytic_two_point(&params, t1, t2)).norm() < 1e-6, "{t1},{t2}: {g}");
        }
        let g = two_point_from_w(&params, 1.0, 0.0).unwrap();
        assert!((g.arg() + 1.0).abs() < 0.02 && g.norm() < 0.5);
        assert!(two_point_from_w(&OscillatorParams::real(1.0, 1.0), 0.0, 1.0).is_err());
    }
}
