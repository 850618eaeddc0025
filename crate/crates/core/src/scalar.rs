//! Floating-point scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar type the solvers are generic over: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Sum + Default + Send + Sync + 'static
{
    /// Default eigen-residual tolerance, relative to the operator scale.
    fn solver_tol() -> Self;

    /// Relative width under which neighbouring eigenvalues count as one
    /// numerical eigenspace.
    fn gap_tol() -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn solver_tol() -> Self {
        1e-10
    }

    fn gap_tol() -> Self {
        1e-8
    }
}

impl Real for f32 {
    fn solver_tol() -> Self {
        1e-4
    }

    fn gap_tol() -> Self {
        1e-4
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y += a * x`
pub(crate) fn axpy<T: Real>(a: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + a * xi;
    }
}

pub(crate) fn scale<T: Real>(a: T, x: &mut [T]) {
    for xi in x.iter_mut() {
        *xi = *xi * a;
    }
}

/// Normalizes in place; returns the original norm.
pub(crate) fn normalize<T: Real>(x: &mut [T]) -> T {
    let nrm = norm(x);
    if nrm > T::zero() {
        scale(T::one() / nrm, x);
    }
    nrm
}
