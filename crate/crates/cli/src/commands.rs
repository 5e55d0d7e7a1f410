use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use pu_core::complex::parse_complex;
use pu_core::contour::{biortho_inner, contour_for, ground_state_norm};
use pu_core::error::{Error, Result};
use pu_core::fock::spectrum;
use pu_core::jet::DerivativePolynomial;
use pu_core::kernel::{
    compose_slices, kernel_grid_csv, semigroup_defect, slice_convergence, spectral_apply, GaussianFunction,
    GaussianKernel, KernelKind, KernelRequest,
};
use pu_core::params::{OscillatorParams, TwoOscillatorParams};
use pu_core::qft::{
    constraint_report, default_falloff_grid, falloff_exponent, kernel_scan_csv, pauli_villars_solve, ScalarChannel,
};
use pu_core::report::{complex_json, to_sorted_json};
use pu_core::transform::{
    bender_mannheim, convergence_study, integrate_classical, pu_el_factorization, pu_lagrangian,
    pu_lagrangian_regrouped, ClassicalState, ClassicalSummary, CONVERGENCE_STEPS,
};

fn complex_arg(text: &str) -> std::result::Result<Complex64, String> {
    parse_complex(text).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "pu-osc", version, about = "Checks for the fourth-order oscillator written as two non-Hermitian oscillators")]
pub struct Cli {
    /// Write output to FILE instead of standard output
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels E(m1,m2;n1,n2) of the PT-symmetric pair
    Spectrum(SpectrumArgs),
    /// Fourth-order Lagrangian tables and equivalence verdicts
    PuConvert(PairArgs),
    /// Classical trajectories of the fourth-order equation against the oscillator pair
    ClassicalCheck(ClassicalArgs),
    /// Contour inner products of left and right eigenfunctions
    Biortho(BiorthoArgs),
    /// Spectral, closed-form and time-sliced kernels compared
    KernelCheck(KernelArgs),
    /// Exchange kernel scan along real p²
    Propagator(PropagatorArgs),
    /// Pauli-Villars constraint solution and falloff slopes
    PvSolve(PvArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
    omega1: Complex64,
    #[arg(long, default_value = "2", value_parser = complex_arg, allow_hyphen_values = true)]
    omega2: Complex64,
    /// Largest occupation number per label entry
    #[arg(long, default_value_t = 1)]
    max: usize,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    hbar: f64,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
    m1: Complex64,
    #[arg(long, default_value = "-1", value_parser = complex_arg, allow_hyphen_values = true)]
    m2: Complex64,
    #[arg(long, default_value = "2", value_parser = complex_arg, allow_hyphen_values = true)]
    omega1: Complex64,
    #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
    omega2: Complex64,
}

impl PairArgs {
    fn params(&self) -> TwoOscillatorParams {
        TwoOscillatorParams::new(self.m1, self.m2, self.omega1, self.omega2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassicalFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Initial jets Q, Q', Q'', Q''' (comma separated)
    #[arg(long, default_value = "1,0.3,-0.5,0.2", allow_hyphen_values = true)]
    jets: String,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true)]
    dt: f64,
    /// json: deviation summary; csv: trajectory samples
    #[arg(long, value_enum, default_value_t = ClassicalFormat::Json)]
    format: ClassicalFormat,
    /// Keep every n-th sample in CSV output
    #[arg(long, default_value_t = 100)]
    stride: usize,
}

#[derive(Debug, Args)]
pub struct BiorthoArgs {
    #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
    mass: Complex64,
    #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
    omega: Complex64,
    /// Largest eigenfunction index
    #[arg(long, default_value_t = 5)]
    max: usize,
    /// Gauss-Hermite nodes (doubled once for the convergence check)
    #[arg(long, default_value_t = 64)]
    nodes: usize,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    hbar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridKind {
    Spectral,
    Closed,
    Sliced,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
    mass: Complex64,
    #[arg(long, default_value = "1-0.5i", value_parser = complex_arg, allow_hyphen_values = true)]
    omega: Complex64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    dt: f64,
    #[arg(long, default_value_t = 60)]
    m_max: usize,
    /// Slice count for the sliced kernel (power of two)
    #[arg(long, default_value_t = 64)]
    slices: usize,
    /// Half-width of the s, s' window
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    window: f64,
    /// Grid points per axis
    #[arg(long, default_value_t = 13)]
    points: usize,
    /// Emit the chosen kernel on the grid as CSV instead of the JSON report
    #[arg(long, value_enum)]
    csv: Option<GridKind>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    hbar: f64,
}

#[derive(Debug, Args)]
pub struct PropagatorArgs {
    #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
    z1: Complex64,
    #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
    m1sq: Complex64,
    #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
    g1: Complex64,
    /// Second channel; omitted means a single channel
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    z2: Option<Complex64>,
    #[arg(long, default_value = "4", value_parser = complex_arg, allow_hyphen_values = true)]
    m2sq: Complex64,
    #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
    g2: Complex64,
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    p_min: f64,
    #[arg(long, default_value_t = 1e4, allow_hyphen_values = true)]
    p_max: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
}

#[derive(Debug, Args)]
pub struct PvArgs {
    #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
    g1: Complex64,
    #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
    z1: Complex64,
    #[arg(long, default_value = "-1", value_parser = complex_arg, allow_hyphen_values = true)]
    z2: Complex64,
    #[arg(long, default_value = "1", value_parser = complex_arg, allow_hyphen_values = true)]
    m1sq: Complex64,
    #[arg(long, default_value = "4", value_parser = complex_arg, allow_hyphen_values = true)]
    m2sq: Complex64,
}

fn conventions(hbar: f64) -> Value {
    json!({
        "contour": "zeta = exp(i theta) s with theta = -arg(M Omega)/2",
        "gamma_representation": "Dirac, gamma0 = diag(1,1,-1,-1), C = i gamma2 gamma0",
        "hbar": hbar,
        "kernel": "retarded, dt >= 0; causal evolution needs Im(Omega) < 0",
        "metric": "(+,-,-,-)",
        "square_root": "principal branch",
    })
}

fn c(z: Complex64) -> Value {
    complex_json(z)
}

fn poly(p: &DerivativePolynomial) -> Value {
    serde_json::to_value(p).expect("polynomials serialize")
}

pub fn run(cli: &Cli) -> Result<()> {
    let output = match &cli.command {
        Command::Spectrum(a) => spectrum_cmd(a)?,
        Command::PuConvert(a) => pu_convert(a)?,
        Command::ClassicalCheck(a) => classical(a)?,
        Command::Biortho(a) => biortho(a)?,
        Command::KernelCheck(a) => kernel(a)?,
        Command::Propagator(a) => propagator(a)?,
        Command::PvSolve(a) => pv(a)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, output)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{output}");
            Ok(())
        }
    }
}

fn spectrum_cmd(a: &SpectrumArgs) -> Result<String> {
    let params = TwoOscillatorParams::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), a.omega1, a.omega2)
        .with_hbar(a.hbar);
    params.validate()?;
    let levels = spectrum(&params, a.max);
    Ok(to_sorted_json(&json!({
        "command": "spectrum",
        "conventions": conventions(a.hbar),
        "omega1": c(a.omega1),
        "omega2": c(a.omega2),
        "levels": levels,
    })))
}

fn pu_convert(a: &PairArgs) -> Result<String> {
    let params = a.params();
    let direct = pu_lagrangian(&params)?;
    let regrouped = pu_lagrangian_regrouped(&params, true)?;
    let bulk = pu_lagrangian_regrouped(&params, false)?;
    let tol = DerivativePolynomial::scaled_tolerance(&[&direct, &bulk], 1e-12);
    let factor = pu_el_factorization(&params)?;
    let mut report = json!({
        "command": "pu-convert",
        "conventions": conventions(params.hbar),
        "substituted": poly(&direct),
        "regrouped": poly(&bulk),
        "regrouped_with_total_derivatives": poly(&regrouped),
        "regrouped_exact_difference": direct.max_relative_difference(&regrouped),
        "regrouped_equivalent_up_to_total_derivative": direct.equivalent_up_to_total_derivative(&bulk, tol),
        "euler_lagrange": {
            "equation": factor.equation.iter().map(|z| c(*z)).collect::<Vec<_>>(),
            "quotient": factor.quotient.iter().map(|z| c(*z)).collect::<Vec<_>>(),
            "remainder_ratio": factor.remainder_ratio,
            "odd_residual": factor.odd_residual,
        },
    });
    match bender_mannheim(&params) {
        Ok((gamma, reduced)) => {
            let tol = DerivativePolynomial::scaled_tolerance(&[&direct, &reduced], 1e-12);
            report["opposite_masses"] = json!({
                "gamma": c(gamma),
                "lagrangian": poly(&reduced),
                "equivalent_up_to_total_derivative": direct.equivalent_up_to_total_derivative(&reduced, tol),
            });
        }
        Err(Error::NotBenderMannheimCase { residual }) => {
            report["opposite_masses"] = json!({ "applies": false, "mass_sum": residual });
        }
        Err(e) => return Err(e),
    }
    Ok(to_sorted_json(&report))
}

fn parse_jets(text: &str) -> Result<[Complex64; 4]> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(Error::InvalidInput(format!("--jets needs four comma-separated values, got {text:?}")));
    }
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = parse_complex(part)?;
    }
    Ok(out)
}

fn classical(a: &ClassicalArgs) -> Result<String> {
    let params = a.pair.params();
    params.validate()?;
    let initial = ClassicalState::new(parse_jets(&a.jets)?);
    let report = integrate_classical(&params, &initial, a.t_end, a.dt)?;
    if a.format == ClassicalFormat::Csv {
        return Ok(report.to_csv(a.stride.max(1)));
    }
    let study = convergence_study(&params, &initial, a.t_end, &CONVERGENCE_STEPS)?;
    let summary = ClassicalSummary { max_devs: report.max_devs, convergence_slope: study.slope };
    Ok(to_sorted_json(&json!({
        "command": "classical-check",
        "conventions": conventions(params.hbar),
        "dt": report.dt,
        "steps": report.steps,
        "summary": summary,
        "max_exact_error": report.max_exact_error,
        "convergence": study,
    })))
}

fn biortho(a: &BiorthoArgs) -> Result<String> {
    let params = OscillatorParams::new(a.mass, a.omega).with_hbar(a.hbar);
    params.validate()?;
    let contour = contour_for(a.mass, a.omega)?;
    let mut table = Vec::new();
    let mut worst: f64 = 0.0;
    for m in 0..=a.max {
        for n in 0..=a.max {
            let r = biortho_inner(&params, m, n, a.nodes)?;
            let expected = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((r.value() - Complex64::new(expected, 0.0)).norm());
            table.push(json!({ "m": m, "m_prime": n, "value": c(r.value()), "doubling_change": r.change }));
        }
    }
    let pu = TwoOscillatorParams::new(a.mass, -a.mass, a.omega, a.omega * 2.0).with_hbar(a.hbar);
    let norm = ground_state_norm(&pu, a.nodes)?;
    Ok(to_sorted_json(&json!({
        "command": "biortho",
        "conventions": conventions(a.hbar),
        "theta": contour.theta,
        "inner_products": table,
        "max_delta_deviation": worst,
        "pair_ground_state_norm": c(norm.value()),
    })))
}

fn kernel(a: &KernelArgs) -> Result<String> {
    let params = OscillatorParams::new(a.mass, a.omega).with_hbar(a.hbar);
    let req = KernelRequest { params, dt: a.dt, m_max: a.m_max, slices: a.slices };
    if let Some(kind) = a.csv {
        let kind = match kind {
            GridKind::Spectral => KernelKind::Spectral,
            GridKind::Closed => KernelKind::ClosedForm,
            GridKind::Sliced => KernelKind::Sliced,
        };
        return kernel_grid_csv(&req, kind, a.window, a.points);
    }
    params.validate()?;
    let exact = GaussianKernel::exact(&params, a.dt)?;
    let sliced = compose_slices(&req)?;
    let grid: Vec<f64> = (0..a.points).map(|k| -a.window + 2.0 * a.window * k as f64 / (a.points.max(2) - 1) as f64).collect();
    let (mut spectral_gap, mut sliced_gap): (f64, f64) = (0.0, 0.0);
    for &so in &grid {
        for &si in &grid {
            let reference = exact.eval(so, si);
            spectral_gap = spectral_gap.max((pu_core::kernel::spectral_kernel(&req, so, si)? - reference).norm());
            sliced_gap = sliced_gap.max((sliced.eval(so, si) - reference).norm());
        }
    }
    // smeared comparison on a Gaussian test function, meaningful for real Ω too
    let theta = contour_for(a.mass, a.omega)?.theta;
    let bump = GaussianFunction::bump(0.4, 0.8, theta);
    let smeared_spectral = spectral_apply(&req, &bump, &grid, 64)?;
    let smeared_exact = exact.apply(&bump)?;
    let smeared_gap = grid
        .iter()
        .zip(&smeared_spectral)
        .map(|(s, v)| (v - smeared_exact.eval(*s, theta)).norm())
        .fold(0.0, f64::max);
    let convergence = slice_convergence(&params, a.dt, &[8, 16, 32, 64], a.window)?;
    let semigroup = semigroup_defect(&params, a.dt * 0.4, a.dt * 0.6, a.window, 64)?;
    Ok(to_sorted_json(&json!({
        "command": "kernel-check",
        "conventions": conventions(a.hbar),
        "theta": theta,
        "spectral_vs_closed_max": spectral_gap,
        "smeared_spectral_vs_closed_max": smeared_gap,
        "sliced_vs_closed_max": sliced_gap,
        "semigroup_defect": semigroup,
        "convergence": convergence,
    })))
}

fn channels(a: &PropagatorArgs) -> Vec<ScalarChannel> {
    let mut out = vec![ScalarChannel::with_mass_sq(a.z1, a.m1sq, a.g1)];
    if let Some(z2) = a.z2 {
        out.push(ScalarChannel::with_mass_sq(z2, a.m2sq, a.g2));
    }
    out
}

fn propagator(a: &PropagatorArgs) -> Result<String> {
    if !(a.p_min > 0.0 && a.p_max > a.p_min && a.points >= 2) {
        return Err(Error::InvalidInput("need 0 < p_min < p_max and at least two points".into()));
    }
    let chans = channels(a);
    for ch in &chans {
        if let Some(w) = ch.convention_warning() {
            eprintln!("warning: {w}");
        }
    }
    kernel_scan_csv(&chans, &pu_core::fit::geometric_grid(a.p_min, a.p_max, a.points))
}

fn pv(a: &PvArgs) -> Result<String> {
    let first = ScalarChannel::with_mass_sq(a.z1, a.m1sq, a.g1);
    let g2_squared = pauli_villars_solve(&first, a.z2)?;
    let constrained = ScalarChannel::with_mass_sq(a.z2, a.m2sq, g2_squared.sqrt());
    let flipped = ScalarChannel::with_mass_sq(a.z2, a.m2sq, (-g2_squared).sqrt());
    let report = constraint_report(&first, &constrained)?;
    let pair = [first, flipped];
    let unconstrained_slope = falloff_exponent(&pair, &default_falloff_grid(&pair))?;
    Ok(to_sorted_json(&json!({
        "command": "pv-solve",
        "conventions": conventions(1.0),
        "g2_squared": c(g2_squared),
        "constraint1": c(report.constraint1),
        "constraint2": c(report.constraint2),
        "slope": report.slope,
        "unconstrained_slope": unconstrained_slope,
        "vanishes": report.vanishes,
    })))
}
