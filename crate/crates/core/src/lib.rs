//! Numerical and algebraic machinery for the fourth-order Pais-Uhlenbeck
//! oscillator viewed as a pair of (generally non-Hermitian) harmonic
//! oscillators.
//!
//! The crate is organised by subsystem:
//!
//! * [`jet`] exact polynomial algebra in a coordinate and its time
//!   derivatives, with the higher-order Euler-Lagrange operator;
//! * [`transform`] the map between the two-oscillator and the fourth-order
//!   descriptions, classical and Lagrangian;
//! * [`fock`] truncated Fock-space realisation of the PT-symmetric ladder
//!   algebra and Hamiltonians;
//! * [`contour`] left/right eigenfunctions on rotated complex contours and
//!   their bi-orthonormality by quadrature;
//! * [`kernel`] retarded Feynman kernels, time slicing and the generating
//!   functional two-point function;
//! * [`qft`] momentum-space propagators, gamma matrices and the
//!   Pauli-Villars style cancellation machinery.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::len_without_is_empty)]

pub mod complex;
pub mod contour;
pub mod error;
pub mod fit;
pub mod fock;
pub mod jet;
pub mod kernel;
pub mod params;
pub mod qft;
pub mod quadrature;
pub mod report;
pub mod transform;

pub use complex::{parse_complex, format_complex};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use params::{OscillatorParams, TwoOscillatorParams};
