//! Polynomials in the jet variables `q0, q1, q2, ...` (a coordinate and its
//! time derivatives) with complex coefficients.
//!
//! The algebra is exact on the coefficients apart from ordinary complex
//! floating-point rounding. Formal time differentiation uses the jet rule
//! `d/dt q_k = q_{k+1}`; the Euler-Lagrange operator of a Lagrangian of any
//! derivative order is `Σ_k (-1)^k (d/dt)^k ∂L/∂q_k`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The highest derivative order the general-mass Lagrangian reaches after
/// applying the Euler-Lagrange operator.
pub const DEFAULT_MAX_ORDER: usize = 6;

/// Exponent vector of a monomial: `exponents[k]` is the power of `q_k`.
///
/// Trailing zeros are stripped, so `[2]` and `[2, 0, 0]` are the same index.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct JetIndex {
    exponents: Vec<u32>,
}

impl JetIndex {
    pub fn new(mut exponents: Vec<u32>) -> Self {
        while exponents.last() == Some(&0) {
            exponents.pop();
        }
        Self { exponents }
    }

    /// The constant monomial `1`.
    pub fn one() -> Self {
        Self::default()
    }

    /// The monomial `q_order`.
    pub fn var(order: usize) -> Self {
        let mut e = vec![0; order + 1];
        e[order] = 1;
        Self { exponents: e }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn exponent(&self, order: usize) -> u32 {
        self.exponents.get(order).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Highest `k` with a nonzero exponent, `None` for the constant monomial.
    pub fn max_order(&self) -> Option<usize> {
        self.exponents.len().checked_sub(1)
    }

    fn with_shift(&self, order: usize, delta: i32) -> Self {
        let mut e = self.exponents.clone();
        if e.len() <= order {
            e.resize(order + 1, 0);
        }
        e[order] = (e[order] as i32 + delta) as u32;
        Self::new(e)
    }

    fn product(&self, other: &Self) -> Self {
        let n = self.exponents.len().max(other.exponents.len());
        Self::new((0..n).map(|k| self.exponent(k) + other.exponent(k)).collect())
    }
}

impl Ord for JetIndex {
    /// Graded lexicographic: total degree first, then exponents from `q0` upward.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.exponents.len().max(other.exponents.len());
            (0..n)
                .map(|k| other.exponent(k).cmp(&self.exponent(k)))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

impl PartialOrd for JetIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for JetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (k, &e) in self.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "·")?;
            }
            first = false;
            if e == 1 {
                write!(f, "q{k}")?;
            } else {
                write!(f, "q{k}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial in jet variables with complex coefficients.
#[derive(Clone, PartialEq, Default)]
pub struct DerivativePolynomial {
    terms: BTreeMap<JetIndex, Complex64>,
}

impl DerivativePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::monomial(JetIndex::one(), c)
    }

    /// The polynomial `q_order`.
    pub fn var(order: usize) -> Self {
        Self::monomial(JetIndex::var(order), 1.0)
    }

    pub fn monomial(index: JetIndex, coeff: impl Into<Complex64>) -> Self {
        let mut p = Self::zero();
        p.add_term(index, coeff.into());
        p
    }

    /// Builds from `(exponents, coefficient)` pairs; repeated indices accumulate.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
        C: Into<Complex64>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(JetIndex::new(e), c.into());
        }
        p
    }

    fn add_term(&mut self, index: JetIndex, coeff: Complex64) {
        if coeff == Complex64::new(0.0, 0.0) {
            return;
        }
        let updated = self.terms.get(&index).copied().unwrap_or_default() + coeff;
        if updated == Complex64::new(0.0, 0.0) {
            self.terms.remove(&index);
        } else {
            self.terms.insert(index, updated);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&JetIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Complex64 {
        self.terms
            .get(&JetIndex::new(exponents.to_vec()))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Highest derivative order present (0 for constants and the zero polynomial).
    pub fn max_order(&self) -> usize {
        self.terms.keys().filter_map(JetIndex::max_order).max().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(JetIndex::degree).max().unwrap_or(0)
    }

    pub fn max_coefficient_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: impl Into<Complex64>) -> Self {
        let factor = factor.into();
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * factor);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    /// ∂P/∂q_order
    pub fn partial(&self, order: usize) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            let e = k.exponent(order);
            if e > 0 {
                out.add_term(k.with_shift(order, -1), c * e as f64);
            }
        }
        out
    }

    /// `d/dt` under `d/dt q_k = q_{k+1}`.
    pub fn total_time_derivative(&self) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            for (order, &e) in k.exponents().iter().enumerate() {
                if e > 0 {
                    let shifted = k.with_shift(order, -1).with_shift(order + 1, 1);
                    out.add_term(shifted, c * e as f64);
                }
            }
        }
        out
    }

    fn nth_time_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.total_time_derivative())
    }

    /// Variational derivative `Σ_k (-1)^k (d/dt)^k ∂P/∂q_k`.
    pub fn euler_lagrange(&self) -> Self {
        let mut out = Self::zero();
        for order in 0..=self.max_order() {
            let term = self.partial(order).nth_time_derivative(order);
            out = if order % 2 == 0 { &out + &term } else { &out - &term };
        }
        out
    }

    /// Replaces the old coordinate by `image`, a linear form in the new jets;
    /// the old `q_k` becomes `(d/dt)^k image`.
    pub fn substitute_linear(&self, image: &Self) -> Result<Self> {
        if let Some(k) = image.terms.keys().find(|k| k.degree() != 1) {
            return Err(Error::NonlinearImage { degree: k.degree() });
        }
        let images: Vec<Self> = (0..=self.max_order()).map(|k| image.nth_time_derivative(k)).collect();
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            let mut term = Self::constant(*c);
            for (order, &e) in k.exponents().iter().enumerate() {
                if e > 0 {
                    term = &term * &images[order].pow(e);
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// True iff every coefficient of `EL(self - other)` has magnitude `<= tol`.
    pub fn equivalent_up_to_total_derivative(&self, other: &Self, tol: f64) -> bool {
        (self - other).euler_lagrange().max_coefficient_norm() <= tol
    }

    /// `rel` times the largest coefficient among the Euler-Lagrange expressions of the inputs.
    pub fn scaled_tolerance(polys: &[&Self], rel: f64) -> f64 {
        rel * polys
            .iter()
            .map(|p| p.euler_lagrange().max_coefficient_norm().max(p.max_coefficient_norm()))
            .fold(1e-300, f64::max)
    }

    /// Largest coefficient difference relative to the larger coefficient scale of the two.
    pub fn max_relative_difference(&self, other: &Self) -> f64 {
        let scale = self.max_coefficient_norm().max(other.max_coefficient_norm()).max(1e-300);
        (self - other).max_coefficient_norm() / scale
    }

    /// Drops coefficients with magnitude `<= tol` (for presentation of cancelled terms).
    pub fn pruned(&self, tol: f64) -> Self {
        Self {
            terms: self.terms.iter().filter(|(_, c)| c.norm() > tol).map(|(k, c)| (k.clone(), *c)).collect(),
        }
    }
}

impl fmt::Debug for DerivativePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, c)| format!("({c})·{k:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &DerivativePolynomial {
    type Output = DerivativePolynomial;
    fn add(self, rhs: Self) -> DerivativePolynomial {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), *c);
        }
        out
    }
}

impl Sub for &DerivativePolynomial {
    type Output = DerivativePolynomial;
    fn sub(self, rhs: Self) -> DerivativePolynomial {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }
}

impl Mul for &DerivativePolynomial {
    type Output = DerivativePolynomial;
    fn mul(self, rhs: Self) -> DerivativePolynomial {
        let mut out = DerivativePolynomial::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.add_term(ka.product(kb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &DerivativePolynomial {
    type Output = DerivativePolynomial;
    fn neg(self) -> DerivativePolynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for DerivativePolynomial {
            type Output = DerivativePolynomial;
            fn $m(self, rhs: Self) -> DerivativePolynomial {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exponents: Vec<u32>,
    re: f64,
    im: f64,
}

impl Serialize for DerivativePolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self
            .terms
            .iter()
            .map(|(k, c)| TermRecord { exponents: k.exponents().to_vec(), re: c.re, im: c.im })
            .collect();
        records.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DerivativePolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(deserializer)?;
        Ok(Self::from_terms(records.into_iter().map(|r| (r.exponents, Complex64::new(r.re, r.im)))))
    }
}
