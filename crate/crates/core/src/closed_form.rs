//! Closed-form uncertainty curves for complete graphs and stars.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spreads::SpreadPoint;

/// Largest spectral spread on `complete(n)`, `n/(n-1)`.
pub fn complete_lambda_max<T: Real>(n: usize) -> T {
    let nf = T::from_usize_lossy(n);
    nf / (nf - T::one())
}

fn check_range<T: Real>(s: T, hi: T) -> Result<()> {
    if !(s >= T::zero() && s <= hi) {
        return Err(Error::OutOfRange { what: "s", value: s.to_f64_lossy(), lo: 0.0, hi: hi.to_f64_lossy() });
    }
    Ok(())
}

fn check_complete_size(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("complete-graph curve needs N >= 3, got {n}")));
    }
    Ok(())
}

/// Uncertainty curve of `complete(n)` about any vertex, for `s` in
/// `[0, n/(n-1)]`.
pub fn complete_gamma<T: Real>(n: usize, s: T) -> Result<T> {
    check_complete_size(n)?;
    check_range(s, complete_lambda_max::<T>(n))?;
    let one = T::one();
    let nf = T::from_usize_lossy(n);
    let (n1, n2) = (nf - one, nf - T::lit(2.0));
    let radicand = (s * (nf - n1 * s)).max(T::zero());
    Ok((nf - s * n2 - T::lit(2.0) * radicand.sqrt()) / (T::lit(4.0) + n2 * n2 / n1))
}

/// Signed defect of `(s, g)` from the ellipse carrying the complete-graph
/// curve; zero on the curve.
pub fn complete_ellipse_residual<T: Real>(n: usize, s: T, g: T) -> T {
    let one = T::one();
    let nf = T::from_usize_lossy(n);
    let n1 = nf - one;
    let a = T::lit(2.0) * g - one;
    let b = s + (nf - T::lit(2.0)) / n1 * g - one;
    a * a + n1 * b * b - one
}

/// Point of the complete-graph ellipse at angle `theta`. The impulse sits at
/// `theta = pi`; only part of the ellipse is the lower curve.
pub fn complete_parametric<T: Real>(n: usize, theta: T) -> SpreadPoint<T> {
    let one = T::one();
    let nf = T::from_usize_lossy(n);
    let n1 = nf - one;
    let g = (one + theta.cos()) / T::lit(2.0);
    let s = one + theta.sin() / n1.sqrt() - (nf - T::lit(2.0)) / n1 * g;
    SpreadPoint { s, g }
}

/// Uncertainty curve of a star centred on its hub, for `s` in `[0, 2]`.
/// Does not depend on the number of leaves.
pub fn star_gamma<T: Real>(s: T) -> Result<T> {
    check_range(s, T::lit(2.0))?;
    let r = (s * (T::lit(2.0) - s)).max(T::zero());
    Ok((T::one() - r.sqrt()) / T::lit(2.0))
}

/// Limit of the complete-graph curve as `N` grows: the line `1 - s`.
pub fn large_n_limit<T: Real>(s: T) -> Result<T> {
    check_range(s, T::one())?;
    Ok(T::one() - s)
}

/// A family with a known curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleCurve {
    Complete(usize),
    /// Star about its hub, any size.
    Star,
}

impl OracleCurve {
    pub fn new_complete(n: usize) -> Result<Self> {
        check_complete_size(n)?;
        Ok(OracleCurve::Complete(n))
    }

    /// Right end of the domain, the largest Laplacian eigenvalue.
    pub fn lambda_max<T: Real>(&self) -> T {
        match *self {
            OracleCurve::Complete(n) => complete_lambda_max(n),
            OracleCurve::Star => T::lit(2.0),
        }
    }

    pub fn gamma<T: Real>(&self, s: T) -> Result<T> {
        match *self {
            OracleCurve::Complete(n) => complete_gamma(n, s),
            OracleCurve::Star => star_gamma(s),
        }
    }

    /// Distance-like defect of `(s, g)` from the curve: the ellipse residual
    /// for complete graphs, `g - gamma(s)` for stars.
    pub fn residual<T: Real>(&self, s: T, g: T) -> Result<T> {
        match *self {
            OracleCurve::Complete(n) => {
                check_range(s, complete_lambda_max::<T>(n))?;
                Ok(complete_ellipse_residual(n, s, g))
            }
            OracleCurve::Star => Ok(g - star_gamma(s)?),
        }
    }

    /// Dense polyline of the curve, `k + 1` points uniform in angle so that
    /// the flat middle and steep ends are both resolved.
    pub fn sample<T: Real>(&self, k: usize) -> Vec<SpreadPoint<T>> {
        let k = k.max(1);
        let pi = T::lit(std::f64::consts::PI);
        (0..=k)
            .map(|i| {
                let theta = pi * T::from_usize_lossy(i) / T::from_usize_lossy(k);
                match *self {
                    OracleCurve::Complete(n) => complete_point_by_angle(n, theta),
                    OracleCurve::Star => {
                        let s = T::one() - theta.cos();
                        SpreadPoint { s, g: star_gamma(s.max(T::zero()).min(T::lit(2.0))).unwrap() }
                    }
                }
            })
            .collect()
    }
}

/// Curve point at `s = lambda_max (1 - cos phi) / 2`, `phi` in `[0, pi]`,
/// which crowds samples toward both ends.
fn complete_point_by_angle<T: Real>(n: usize, phi: T) -> SpreadPoint<T> {
    let hi = complete_lambda_max::<T>(n);
    let s = (hi * (T::one() - phi.cos()) / T::lit(2.0)).max(T::zero()).min(hi);
    SpreadPoint { s, g: complete_gamma(n, s).unwrap() }
}
