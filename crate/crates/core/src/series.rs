//! Finite sums `sum_j A_j exp(i kappa_j z)` with tensor-valued amplitudes.
//!
//! Every `z`-dependent quantity inside the slab (Green's functions in the
//! source coordinate, the pump field) is a short sum of this form, so the
//! depth integral of their product is evaluated in closed form.

use num_complex::Complex64;

use crate::linalg::{self, Mat3, Vec3, ZERO};

/// Amplitude types that can be carried by an [`ExponentialSeries`].
pub trait Amplitude: Copy {
    fn zero() -> Self;
    /// `self += c * other`
    fn add_scaled(&mut self, c: Complex64, other: &Self);
}

impl Amplitude for Complex64 {
    fn zero() -> Self {
        ZERO
    }
    fn add_scaled(&mut self, c: Complex64, other: &Self) {
        *self += c * other;
    }
}

impl Amplitude for Vec3 {
    fn zero() -> Self {
        linalg::ZERO_VEC
    }
    fn add_scaled(&mut self, c: Complex64, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += c * b;
        }
    }
}

impl Amplitude for Mat3 {
    fn zero() -> Self {
        linalg::ZERO_MAT
    }
    fn add_scaled(&mut self, c: Complex64, other: &Self) {
        for (a, b) in self.iter_mut().flatten().zip(other.iter().flatten()) {
            *a += c * b;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term<A> {
    pub amplitude: A,
    /// Wavenumber in 1/m.
    pub kappa: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialSeries<A> {
    terms: Vec<Term<A>>,
}

impl<A: Amplitude> Default for ExponentialSeries<A> {
    fn default() -> Self {
        Self::new()
    }
}

impl<A: Amplitude> ExponentialSeries<A> {
    pub fn new() -> Self {
        Self {
            terms: Vec::with_capacity(4),
        }
    }

    /// Adds `c * amplitude * exp(i kappa z)`, merging with an existing term of
    /// identical wavenumber.
    pub fn push_scaled(&mut self, c: Complex64, amplitude: &A, kappa: Complex64) {
        if let Some(t) = self.terms.iter_mut().find(|t| t.kappa == kappa) {
            t.amplitude.add_scaled(c, amplitude);
        } else {
            let mut a = A::zero();
            a.add_scaled(c, amplitude);
            self.terms.push(Term {
                amplitude: a,
                kappa,
            });
        }
    }

    pub fn terms(&self) -> &[Term<A>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, z: f64) -> A {
        let mut acc = A::zero();
        for t in &self.terms {
            acc.add_scaled((Complex64::i() * t.kappa * z).exp(), &t.amplitude);
        }
        acc
    }
}

/// Dimensionless `|kappa| a` below which the depth integral uses its Taylor
/// expansion.
pub const SMALL_KAPPA: f64 = 1e-8;

/// `int_{-a}^{0} exp(i kappa z) dz = (1 - exp(-i kappa a)) / (i kappa)`.
pub fn slab_integral(kappa: Complex64, a: f64) -> Complex64 {
    let x = Complex64::i() * kappa * a;
    if x.norm() < SMALL_KAPPA {
        // a (1 - x/2 + x^2/6)
        a * (1.0 - x * 0.5 + x * x / 6.0)
    } else {
        -linalg::expm1(-x) / x * a
    }
}
