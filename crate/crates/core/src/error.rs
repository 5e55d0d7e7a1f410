use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate frequencies: |Ω1² - Ω2²| = {gap:e} is below tolerance {tolerance:e}")]
    DegenerateFrequencies { gap: f64, tolerance: f64 },

    #[error("M1 + M2 = {residual:e} does not vanish; not the Bender-Mannheim case")]
    NotBenderMannheimCase { residual: f64 },

    #[error("substitution image must be linear in the new jets (found a degree-{degree} term)")]
    NonlinearImage { degree: u32 },

    #[error("Euler-Lagrange expression is not linear in the jets (found a degree-{degree} term)")]
    NonlinearEquation { degree: u32 },

    #[error("step size rejected: dt·max|Ω| = {value} exceeds {limit}")]
    StepSizeRejected { value: f64, limit: f64 },

    #[error("M·Ω vanishes; no contour can be attached")]
    ZeroScale,

    #[error("quadrature underresolved: doubling nodes {nodes} -> {doubled} changed the result by {change:e}")]
    QuadratureUnderresolved { nodes: usize, doubled: usize, change: f64 },

    #[error("Gaussian integral diverges along the contour (Re coefficient {re_coeff:e} >= 0)")]
    DivergentGaussian { re_coeff: f64 },

    #[error("caustic: |sin(ΩΔt)| = {value:e} is below 1e-8")]
    CausticSingularity { value: f64 },

    #[error("retarded kernels require Δt >= 0, got {dt}")]
    NegativeTime { dt: f64 },

    #[error("time grid underresolved: halving the step changed the value by {change:e}")]
    GridUnderresolved { change: f64 },

    #[error("on-shell pole: |p² - M²| = {distance:e}")]
    OnShellPole { distance: f64 },

    #[error("degenerate masses: M1² = M2², no single-fraction form")]
    DegenerateMasses,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Whether the error signals numerical non-convergence rather than bad input.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(
            self,
            Error::QuadratureUnderresolved { .. }
                | Error::GridUnderresolved { .. }
                | Error::DivergentGaussian { .. }
        )
    }
}
