use std::fmt::Debug;

use crate::jet::Jet;

/// Component type of a [`DenseTensor`](super::DenseTensor): plain reals or jets.
pub trait Scalar: Clone + Send + Sync + Debug {
    fn zero_like(&self) -> Self;
    fn constant_like(&self, v: f64) -> Self;
    /// `self += factor · other`
    fn add_scaled(&mut self, factor: f64, other: &Self);
    /// `self += factor · a · b`
    fn fma(&mut self, factor: f64, a: &Self, b: &Self);
    fn scaled(&self, f: f64) -> Self;
    /// Value at the base point.
    fn value(&self) -> f64;
    /// Largest absolute coefficient.
    fn magnitude(&self) -> f64;
    fn finite(&self) -> bool;
}

impl Scalar for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn constant_like(&self, v: f64) -> Self {
        v
    }
    #[inline]
    fn add_scaled(&mut self, factor: f64, other: &Self) {
        *self += factor * other;
    }
    #[inline]
    fn fma(&mut self, factor: f64, a: &Self, b: &Self) {
        *self += factor * a * b;
    }
    fn scaled(&self, f: f64) -> Self {
        self * f
    }
    fn value(&self) -> f64 {
        *self
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Jet {
    fn zero_like(&self) -> Self {
        Jet::zero(self.space(), self.order())
    }
    fn constant_like(&self, v: f64) -> Self {
        Jet::constant(self.space(), self.order(), v)
    }
    fn add_scaled(&mut self, factor: f64, other: &Self) {
        self.axpy(factor, other);
    }
    fn fma(&mut self, factor: f64, a: &Self, b: &Self) {
        Jet::fma(self, factor, a, b);
    }
    fn scaled(&self, f: f64) -> Self {
        self.scale(f)
    }
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn magnitude(&self) -> f64 {
        self.max_abs()
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}
