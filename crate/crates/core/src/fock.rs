//! Truncated Fock-space realization of the PT-symmetric ladder algebra.
//!
//! Modes are ordered `(m1, m2, n1, n2)`: holomorphic occupations first,
//! anti-holomorphic second. Basis vectors are row-major over occupation
//! tuples, so the first mode is the slowest index. Each mode keeps levels
//! `0..=n_max`; the usual truncation defect shows up at the top level.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{OscillatorParams, TwoOscillatorParams};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default cutoff for single-oscillator work.
pub const SINGLE_CUTOFF: usize = 8;
/// Default cutoff per mode for the four-mode PT pair (dimension 625).
pub const PAIR_CUTOFF: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub matrix: DMatrix<Complex64>,
    /// Per-mode cutoffs; each mode has `cutoff + 1` levels.
    pub dims: Vec<usize>,
}

impl FockOperator {
    pub fn dimension_of(dims: &[usize]) -> usize {
        dims.iter().map(|d| d + 1).product()
    }

    pub fn identity(dims: &[usize]) -> Self {
        let n = Self::dimension_of(dims);
        Self { matrix: DMatrix::identity(n, n), dims: dims.to_vec() }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let n = Self::dimension_of(dims);
        Self { matrix: DMatrix::zeros(n, n), dims: dims.to_vec() }
    }

    /// `I ⊗ .. ⊗ single ⊗ .. ⊗ I` with `single` acting on `mode`.
    pub fn embed(single: &DMatrix<Complex64>, mode: usize, dims: &[usize]) -> Self {
        assert!(mode < dims.len() && single.nrows() == dims[mode] + 1);
        let mut m = DMatrix::from_element(1, 1, ONE);
        for (k, &d) in dims.iter().enumerate() {
            let factor = if k == mode { single.clone() } else { DMatrix::identity(d + 1, d + 1) };
            m = m.kronecker(&factor);
        }
        Self { matrix: m, dims: dims.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Row-major position of an occupation tuple.
    pub fn basis_index(dims: &[usize], occupations: &[usize]) -> usize {
        assert_eq!(dims.len(), occupations.len());
        occupations.iter().zip(dims).fold(0, |acc, (&o, &d)| {
            assert!(o <= d, "occupation {o} above cutoff {d}");
            acc * (d + 1) + o
        })
    }

    pub fn basis_vector(dims: &[usize], occupations: &[usize]) -> DVector<Complex64> {
        let mut v = DVector::zeros(Self::dimension_of(dims));
        v[Self::basis_index(dims, occupations)] = ONE;
        v
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { matrix: &self.matrix * factor, dims: self.dims.clone() }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.matrix.diagonal().iter().copied().collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for ((i, j), z) in self.matrix.iter().enumerate().map(|(k, z)| ((k % self.dim(), k / self.dim()), z)) {
            if i != j {
                worst = worst.max(z.norm());
            }
        }
        worst
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(&self.dims), |acc, _| &acc * self)
    }

    /// `O·v`, visiting only the columns where `v` is nonzero.
    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::zeros(self.dim());
        for (j, vj) in v.iter().enumerate().filter(|(_, x)| **x != ZERO) {
            for (o, m) in out.iter_mut().zip(self.matrix.column(j).iter()) {
                if *m != ZERO {
                    *o += m * vj;
                }
            }
        }
        out
    }

    /// Row vector `vᵀ·O`, returned as a column.
    pub fn apply_left(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::zeros(self.dim());
        for (i, vi) in v.iter().enumerate().filter(|(_, x)| **x != ZERO) {
            for (o, m) in out.iter_mut().zip(self.matrix.row(i).iter()) {
                if *m != ZERO {
                    *o += vi * m;
                }
            }
        }
        out
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: Self) -> FockOperator {
        assert_eq!(self.dims, rhs.dims);
        FockOperator { matrix: sparse_aware_product(&self.matrix, &rhs.matrix), dims: self.dims.clone() }
    }
}

/// Dense product that skips zero entries of the left factor; ladder
/// operators and Hamiltonians here have at most one nonzero per column.
fn sparse_aware_product(lhs: &DMatrix<Complex64>, rhs: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (n, inner, m) = (lhs.nrows(), lhs.ncols(), rhs.ncols());
    let mut out = DMatrix::zeros(n, m);
    for k in 0..inner {
        for i in 0..n {
            let l = lhs[(i, k)];
            if l == ZERO {
                continue;
            }
            for j in 0..m {
                let r = rhs[(k, j)];
                if r != ZERO {
                    out[(i, j)] += l * r;
                }
            }
        }
    }
    out
}

impl Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: Self) -> FockOperator {
        assert_eq!(self.dims, rhs.dims);
        FockOperator { matrix: &self.matrix + &rhs.matrix, dims: self.dims.clone() }
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: Self) -> FockOperator {
        assert_eq!(self.dims, rhs.dims);
        FockOperator { matrix: &self.matrix - &rhs.matrix, dims: self.dims.clone() }
    }
}

/// Lowering operator of one mode, `|k⟩ ↦ |k-1⟩`.
///
/// Together with [`raising`] this is the textbook `√k` pair conjugated by
/// `diag(√k!)`. The algebra is the same, but every product of ladder
/// operators has integer entries, so commutators and the truncation
/// defect come out exact in floating point.
pub fn lowering(n_max: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n_max + 1, n_max + 1, |i, j| if j == i + 1 { ONE } else { ZERO })
}

/// Raising operator of one mode, `|k⟩ ↦ (k+1)|k+1⟩`.
pub fn raising(n_max: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n_max + 1, n_max + 1, |i, j| if i == j + 1 { Complex64::new(i as f64, 0.0) } else { ZERO })
}

/// Ladder operators of one oscillator and its PT partner.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderSet {
    /// Holomorphic annihilator, lowering divided by `N`.
    pub a: FockOperator,
    /// Holomorphic creator, raising times `N`.
    pub c_plus: FockOperator,
    /// Anti-holomorphic annihilator, lowering times `N*`.
    pub c: FockOperator,
    /// Anti-holomorphic creator, raising divided by `N*`.
    pub a_plus: FockOperator,
    pub n_const: Complex64,
    pub n_max: usize,
}

impl LadderSet {
    /// Builds the set acting on `hol_mode` and `anti_mode` of a space with the given cutoffs.
    pub fn on_modes(dims: &[usize], hol_mode: usize, anti_mode: usize, n_const: Complex64) -> Result<Self> {
        if n_const == ZERO {
            return Err(Error::InvalidInput("ladder normalization must be nonzero".into()));
        }
        let n_max = dims[hol_mode];
        if n_max < 2 || dims[anti_mode] != n_max {
            return Err(Error::InvalidInput(format!("cutoff must be at least 2 and equal across a pair, got {dims:?}")));
        }
        let low = lowering(n_max);
        let up = raising(n_max);
        let nc = n_const.conj();
        Ok(Self {
            a: FockOperator::embed(&(&low / n_const), hol_mode, dims),
            c_plus: FockOperator::embed(&(&up * n_const), hol_mode, dims),
            c: FockOperator::embed(&(&low * nc), anti_mode, dims),
            a_plus: FockOperator::embed(&(&up / nc), anti_mode, dims),
            n_const,
            n_max,
        })
    }

    /// `(ħΩ/2)(c⁺a + a c⁺)`
    pub fn holomorphic_hamiltonian(&self, params: &OscillatorParams) -> FockOperator {
        let sym = &(&self.c_plus * &self.a) + &(&self.a * &self.c_plus);
        sym.scale(params.hbar * params.omega * 0.5)
    }

    /// `(ħΩ*/2)(a⁺c + c a⁺)`
    pub fn anti_holomorphic_hamiltonian(&self, params: &OscillatorParams) -> FockOperator {
        let sym = &(&self.a_plus * &self.c) + &(&self.c * &self.a_plus);
        sym.scale(params.hbar * params.omega.conj() * 0.5)
    }

    /// `Q(0) = √(ħ/2MΩ)(N a + c⁺/N)` with the principal root.
    pub fn position(&self, params: &OscillatorParams) -> FockOperator {
        let scale = params.mode_scale_sq().sqrt();
        (&self.a.scale(self.n_const) + &self.c_plus.scale(ONE / self.n_const)).scale(scale)
    }

    /// `P(0) = -i√(ħΩM/2)(N a - c⁺/N)`
    pub fn momentum(&self, params: &OscillatorParams) -> FockOperator {
        let scale = (params.hbar * params.omega * params.mass * 0.5).sqrt();
        (&self.a.scale(self.n_const) - &self.c_plus.scale(ONE / self.n_const)).scale(-I * scale)
    }
}

/// Ladders for a single oscillator with its PT partner: modes `(m, n)`.
pub fn build_ladders(n_max: usize, n_const: Complex64) -> Result<LadderSet> {
    if n_max < 2 {
        return Err(Error::InvalidInput(format!("cutoff must be at least 2, got {n_max}")));
    }
    LadderSet::on_modes(&[n_max, n_max], 0, 1, n_const)
}

/// Both oscillators of the pair on the four-mode space `(m1, m2, n1, n2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairLadders {
    pub first: LadderSet,
    pub second: LadderSet,
}

pub fn build_pair_ladders(n_max: usize, n_consts: [Complex64; 2]) -> Result<PairLadders> {
    if n_max < 2 {
        return Err(Error::InvalidInput(format!("cutoff must be at least 2, got {n_max}")));
    }
    let dims = [n_max; 4];
    Ok(PairLadders {
        first: LadderSet::on_modes(&dims, 0, 2, n_consts[0])?,
        second: LadderSet::on_modes(&dims, 1, 3, n_consts[1])?,
    })
}

/// Occupation numbers `(m1, m2, n1, n2)` of a PT-pair eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SpectrumLabel {
    pub m1: usize,
    pub m2: usize,
    pub n1: usize,
    pub n2: usize,
}

impl SpectrumLabel {
    pub fn new(m1: usize, m2: usize, n1: usize, n2: usize) -> Self {
        Self { m1, m2, n1, n2 }
    }

    pub fn as_array(&self) -> [usize; 4] {
        [self.m1, self.m2, self.n1, self.n2]
    }

    /// The label with holomorphic and anti-holomorphic occupations swapped.
    pub fn swapped(&self) -> Self {
        Self::new(self.n1, self.n2, self.m1, self.m2)
    }

    /// All labels with every occupation `<= max`, in `(m1, m2, n1, n2)` order.
    pub fn all_up_to(max: usize) -> Vec<Self> {
        let r = 0..=max;
        let mut out = Vec::new();
        for m1 in r.clone() {
            for m2 in r.clone() {
                for n1 in r.clone() {
                    for n2 in r.clone() {
                        out.push(Self::new(m1, m2, n1, n2));
                    }
                }
            }
        }
        out
    }
}

fn half(k: usize) -> f64 {
    k as f64 + 0.5
}

/// `ħΩ1(m1+½) + ħΩ2(m2+½)`, the spectrum of the holomorphic pair alone.
pub fn holomorphic_energy(params: &TwoOscillatorParams, m1: usize, m2: usize) -> Complex64 {
    params.hbar * (params.omega1 * half(m1) + params.omega2 * half(m2))
}

/// Full PT-pair energy, holomorphic plus conjugate sector.
pub fn energy(params: &TwoOscillatorParams, label: SpectrumLabel) -> Complex64 {
    holomorphic_energy(params, label.m1, label.m2)
        + params.hbar * (params.omega1.conj() * half(label.n1) + params.omega2.conj() * half(label.n2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub label: [usize; 4],
    pub re: f64,
    pub im: f64,
}

pub fn spectrum(params: &TwoOscillatorParams, max: usize) -> Vec<SpectrumEntry> {
    SpectrumLabel::all_up_to(max)
        .into_iter()
        .map(|l| {
            let e = energy(params, l);
            SpectrumEntry { label: l.as_array(), re: e.re, im: e.im }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonians {
    pub holomorphic: FockOperator,
    pub anti_holomorphic: FockOperator,
    pub total: FockOperator,
}

/// `H_H`, `H_A` and `H = H_H + H_A` on the four-mode space.
pub fn build_hamiltonians(params: &TwoOscillatorParams, n_max: usize) -> Result<Hamiltonians> {
    params.validate()?;
    let ladders = build_pair_ladders(n_max, [ONE, ONE])?;
    let (p1, p2) = (params.first(), params.second());
    let holomorphic = &ladders.first.holomorphic_hamiltonian(&p1) + &ladders.second.holomorphic_hamiltonian(&p2);
    let anti_holomorphic =
        &ladders.first.anti_holomorphic_hamiltonian(&p1) + &ladders.second.anti_holomorphic_hamiltonian(&p2);
    let total = &holomorphic + &anti_holomorphic;
    Ok(Hamiltonians { holomorphic, anti_holomorphic, total })
}

/// `e^{iHt/ħ} O e^{-iHt/ħ}`; entrywise phases when `H` is diagonal,
/// otherwise a Padé scaling-and-squaring exponential.
pub fn heisenberg_evolve(h: &FockOperator, op: &FockOperator, t: f64, hbar: f64) -> FockOperator {
    assert_eq!(h.dims, op.dims);
    if t == 0.0 {
        return op.clone();
    }
    if h.max_off_diagonal() == 0.0 {
        let e = h.diagonal();
        let matrix = DMatrix::from_fn(op.dim(), op.dim(), |j, k| op.matrix[(j, k)] * (I * (e[j] - e[k]) * (t / hbar)).exp());
        return FockOperator { matrix, dims: op.dims.clone() };
    }
    let forward = (&h.matrix * (I * (t / hbar))).exp();
    let backward = (&h.matrix * (-I * (t / hbar))).exp();
    FockOperator { matrix: &forward * &op.matrix * &backward, dims: op.dims.clone() }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Right eigenstate `(c1⁺)^{m1}(c2⁺)^{m2}(a1⁺)^{n1}(a2⁺)^{n2}|0⟩⟩/√(m1!m2!n1!n2!)`.
pub fn right_eigenstate(ladders: &PairLadders, label: SpectrumLabel) -> DVector<Complex64> {
    let dims = ladders.first.a.dims.clone();
    let mut v = FockOperator::basis_vector(&dims, &[0; 4]);
    let ops = [(&ladders.second.a_plus, label.n2), (&ladders.first.a_plus, label.n1), (&ladders.second.c_plus, label.m2), (&ladders.first.c_plus, label.m1)];
    for (op, power) in ops {
        for _ in 0..power {
            v = op.apply(&v);
        }
    }
    let norm = (factorial(label.m1) * factorial(label.m2) * factorial(label.n1) * factorial(label.n2)).sqrt();
    v / Complex64::new(norm, 0.0)
}

/// Left eigenstate `⟨⟨0|(a1)^{m1}(a2)^{m2}(c1)^{n1}(c2)^{n2}/√(m1!m2!n1!n2!)`, as a column.
pub fn left_eigenstate(ladders: &PairLadders, label: SpectrumLabel) -> DVector<Complex64> {
    let dims = ladders.first.a.dims.clone();
    let mut v = FockOperator::basis_vector(&dims, &[0; 4]);
    let ops = [(&ladders.first.a, label.m1), (&ladders.second.a, label.m2), (&ladders.first.c, label.n1), (&ladders.second.c, label.n2)];
    for (op, power) in ops {
        for _ in 0..power {
            v = op.apply_left(&v);
        }
    }
    let norm = (factorial(label.m1) * factorial(label.m2) * factorial(label.n1) * factorial(label.n2)).sqrt();
    v / Complex64::new(norm, 0.0)
}

/// `⟨⟨0|T[Q(t1)Q(t2)]|0⟩⟩` from truncated matrices on the `(m, n)` space.
pub fn t_ordered_two_point(params: &OscillatorParams, t1: f64, t2: f64) -> Result<Complex64> {
    t_ordered_two_point_with(params, t1, t2, SINGLE_CUTOFF, ONE)
}

pub fn t_ordered_two_point_with(
    params: &OscillatorParams,
    t1: f64,
    t2: f64,
    n_max: usize,
    n_const: Complex64,
) -> Result<Complex64> {
    params.validate()?;
    let ladders = build_ladders(n_max, n_const)?;
    let h = &ladders.holomorphic_hamiltonian(params) + &ladders.anti_holomorphic_hamiltonian(params);
    let q0 = ladders.position(params);
    let (late, early) = if t1 >= t2 { (t1, t2) } else { (t2, t1) };
    let q_late = heisenberg_evolve(&h, &q0, late, params.hbar);
    let q_early = heisenberg_evolve(&h, &q0, early, params.hbar);
    let vac = FockOperator::basis_vector(&ladders.a.dims, &[0, 0]);
    let right = q_late.apply(&q_early.apply(&vac));
    Ok(vac.dot(&right))
}

/// `(ħ/2MΩ) e^{-iΩ|t1-t2|}`
pub fn analytic_two_point(params: &OscillatorParams, t1: f64, t2: f64) -> Complex64 {
    params.mode_scale_sq() * (-I * params.omega * (t1 - t2).abs()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn commutator_has_top_defect() {
        let l = build_ladders(3, ONE).unwrap();
        let comm = l.a.commutator(&l.c_plus);
        // restricted to the anti-holomorphic vacuum block
        let diag: Vec<f64> = (0..=3).map(|m| comm.matrix[(m * 4, m * 4)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, 1.0, -3.0]);
        assert_eq!(comm.max_off_diagonal(), 0.0);

        let scaled = build_ladders(3, c(0.3, 1.7)).unwrap();
        let comm2 = scaled.a.commutator(&scaled.c_plus);
        assert!((&comm2 - &comm).max_abs() < 1e-15);
    }

    #[test]
    fn cutoff_below_two_rejected() {
        assert!(build_ladders(1, ONE).is_err());
        assert!(build_ladders(3, ZERO).is_err());
    }

    #[test]
    fn distinct_modes_commute() {
        let p = build_pair_ladders(2, [c(1.2, 0.1), c(0.7, -0.4)]).unwrap();
        assert_eq!(p.first.a.commutator(&p.second.c_plus).max_abs(), 0.0);
        assert_eq!(p.first.a.commutator(&p.first.a_plus).max_abs(), 0.0);
    }

    #[test]
    fn energies() {
        let p = TwoOscillatorParams::real(1.0, 1.0, 1.0, 2.0);
        assert_eq!(energy(&p, SpectrumLabel::new(0, 0, 0, 0)), c(3.0, 0.0));
        let single = TwoOscillatorParams::new(ONE, ONE, c(1.0, -0.1), c(3.0, 0.0));
        let e = holomorphic_energy(&single, 0, 0) - single.hbar * single.omega2 * 0.5;
        let pt = e + e.conj();
        assert_eq!(pt, c(1.0, 0.0));
    }

    #[test]
    fn hamiltonian_diagonal_matches_energy() {
        let p = TwoOscillatorParams::real(1.0, 1.0, 1.0, 2.0);
        let h = build_hamiltonians(&p, 4).unwrap();
        assert_eq!(h.total.max_off_diagonal(), 0.0);
        let label = SpectrumLabel::new(1, 0, 0, 1);
        let idx = FockOperator::basis_index(&[4; 4], &label.as_array());
        let expected = 1.5 * 1.0 + 0.5 * 2.0 + 0.5 * 1.0 + 1.5 * 2.0;
        assert!((h.total.matrix[(idx, idx)] - c(expected, 0.0)).norm() < 1e-12);
        assert_eq!(h.holomorphic.commutator(&h.anti_holomorphic).max_abs(), 0.0);
    }

    #[test]
    fn evolution_rotates_single_quantum_element() {
        let osc = OscillatorParams::new(ONE, c(1.0, -0.2));
        let l = build_ladders(SINGLE_CUTOFF, c(0.8, 0.3)).unwrap();
        let h = &l.holomorphic_hamiltonian(&osc) + &l.anti_holomorphic_hamiltonian(&osc);
        let q = l.position(&osc);
        assert_eq!(heisenberg_evolve(&h, &q, 0.0, 1.0), q);
        let t = 0.9;
        let qt = heisenberg_evolve(&h, &q, t, 1.0);
        let dims = [SINGLE_CUTOFF; 2];
        let vac = FockOperator::basis_index(&dims, &[0, 0]);
        let one = FockOperator::basis_index(&dims, &[1, 0]);
        let expected = osc.mode_scale_sq().sqrt() * (-I * osc.omega * t).exp();
        assert!((qt.matrix[(vac, one)] - expected).norm() < 1e-13);
    }

    #[test]
    fn dense_exponential_agrees_with_diagonal_shortcut() {
        let osc = OscillatorParams::new(ONE, c(1.0, -0.1));
        let l = build_ladders(3, ONE).unwrap();
        let h = &l.holomorphic_hamiltonian(&osc) + &l.anti_holomorphic_hamiltonian(&osc);
        let q = l.position(&osc);
        let diag = heisenberg_evolve(&h, &q, 0.7, 1.0);
        // a unitary similarity keeps the spectrum but makes H non-diagonal
        let flip = FockOperator::embed(&(&lowering(3) + &raising(3)), 0, &[3, 3]);
        let u = FockOperator { matrix: (&flip.matrix * (I * 0.3)).exp(), dims: vec![3, 3] };
        let u_inv = FockOperator { matrix: (&flip.matrix * (-I * 0.3)).exp(), dims: vec![3, 3] };
        let h_rot = &(&u * &h) * &u_inv;
        let q_rot = &(&u * &q) * &u_inv;
        let dense = heisenberg_evolve(&h_rot, &q_rot, 0.7, 1.0);
        let back = &(&u_inv * &dense) * &u;
        assert!((&back - &diag).max_abs() < 1e-11);
    }

    #[test]
    fn vacuum_relations() {
        let p = build_pair_ladders(3, [c(1.1, 0.2), c(0.5, -0.5)]).unwrap();
        let vac = FockOperator::basis_vector(&[3; 4], &[0; 4]);
        for op in [&p.first.a, &p.first.c, &p.second.a, &p.second.c] {
            assert!(op.apply(&vac).iter().all(|z| *z == ZERO));
        }
        for op in [&p.first.c_plus, &p.first.a_plus, &p.second.c_plus, &p.second.a_plus] {
            assert!(op.apply_left(&vac).iter().all(|z| *z == ZERO));
        }
        assert_eq!(vac.dot(&vac), ONE);
    }

    #[test]
    fn two_point_equal_times_and_decay() {
        let osc = OscillatorParams::new(c(1.0, 0.1), c(1.0, -0.05));
        let g = t_ordered_two_point(&osc, 0.4, 0.4).unwrap();
        assert!((g - osc.mode_scale_sq()).norm() < 1e-14);
        let a = t_ordered_two_point(&osc, 0.0, 1.0).unwrap();
        let b = t_ordered_two_point(&osc, 0.0, 5.0).unwrap();
        assert!(b.norm() < a.norm());
        assert!((a - analytic_two_point(&osc, 0.0, 1.0)).norm() < 1e-14);
    }
}
