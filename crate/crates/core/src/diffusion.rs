//! Heat diffusion `x(t) = e^{-tL} δ_{u0}` and its trajectory in the spread
//! plane.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{geodesic_distances, DistanceVector, Graph};
use crate::scalar::{axpy, dot, norm, scale, Real};
use crate::spectral::{extreme_eigenpair, full_spectrum, small_eigh, SolverOptions, Spectrum, SymOp, Which, DENSE_THRESHOLD};
use crate::spreads::SpreadPoint;

/// Largest Krylov basis built per step of the exponential.
const KRYLOV_DIM: usize = 40;

/// Action of `e^{-tL}`, through the full spectrum when it is small enough
/// and a Krylov approximation otherwise.
#[derive(Clone, Debug)]
pub struct HeatKernel<T> {
    l: SymOp<T>,
    spectrum: Option<Spectrum<T>>,
    lambda_max: T,
    tol: T,
}

impl<T: Real> HeatKernel<T> {
    pub fn new(l: &SymOp<T>) -> Result<Self> {
        if l.dim() <= DENSE_THRESHOLD {
            let spectrum = full_spectrum(l)?;
            Ok(HeatKernel { lambda_max: spectrum.lambda_max(), l: l.clone(), spectrum: Some(spectrum), tol: T::solver_tol() })
        } else {
            Self::krylov(l)
        }
    }

    /// Always use the Krylov path.
    pub fn krylov(l: &SymOp<T>) -> Result<Self> {
        let top = extreme_eigenpair(l, Which::Largest, &SolverOptions::default())?;
        Ok(HeatKernel { l: l.clone(), spectrum: None, lambda_max: top.pair.value, tol: T::solver_tol() })
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    pub fn laplacian(&self) -> &SymOp<T> {
        &self.l
    }

    pub fn lambda_max(&self) -> T {
        self.lambda_max
    }

    /// `e^{-tL} δ_{u0}`.
    pub fn diffuse(&self, u0: usize, t: T) -> Result<Vec<T>> {
        let n = self.dim();
        if u0 >= n {
            return Err(Error::VertexOutOfRange { vertex: u0, n });
        }
        if !(t >= T::zero()) {
            return Err(Error::InvalidParameter(format!("diffusion time must be nonnegative, got {t}")));
        }
        let mut b = vec![T::zero(); n];
        b[u0] = T::one();
        if t == T::zero() {
            return Ok(b);
        }
        match &self.spectrum {
            Some(sp) => {
                let mut x = vec![T::zero(); n];
                for (&lam, f) in sp.values.iter().zip(&sp.vectors) {
                    axpy((-t * lam).exp() * f[u0], f, &mut x);
                }
                Ok(x)
            }
            None => expv(&self.l, &b, t, self.tol),
        }
    }
}

/// `e^{-tA} b` for symmetric PSD `A` by Lanczos with time stepping; each
/// step keeps its estimated error below `tol·τ/t` so the total stays below
/// `tol·‖b‖`.
fn expv<T: Real>(a: &SymOp<T>, b: &[T], t: T, tol: T) -> Result<Vec<T>> {
    let n = a.dim();
    let m_max = KRYLOV_DIM.min(n);
    let mut w = b.to_vec();
    let mut done = T::zero();
    let mut tau = t.min(T::lit(10.0) / (a.inf_norm().max(T::one())));
    let mut steps = 0usize;
    while done < t {
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::NonConvergence { iterations: steps, best_residual: f64::NAN });
        }
        let beta0 = norm(&w);
        if beta0 == T::zero() {
            return Ok(w);
        }
        let (basis, alpha, beta, tail) = lanczos_basis(a, &w, beta0, m_max);
        let m = basis.len();
        let mut tri = vec![T::zero(); m * m];
        for i in 0..m {
            tri[i * m + i] = alpha[i];
            if i + 1 < m {
                tri[i * m + i + 1] = beta[i];
                tri[(i + 1) * m + i] = beta[i];
            }
        }
        let (vals, vecs) = small_eigh(tri, m)?;
        let coeffs = |tau: T| -> Vec<T> {
            // e^{-τT} e₁ = Σ_k e^{-τθ_k} z_k z_k[0]
            let mut y = vec![T::zero(); m];
            for k in 0..m {
                let zk = &vecs[k * m..(k + 1) * m];
                axpy((-tau * vals[k]).exp() * zk[0], zk, &mut y);
            }
            y
        };
        tau = tau.min(t - done);
        let y = loop {
            let y = coeffs(tau);
            let err = beta0 * tail * y[m - 1].abs();
            if err <= tol * tau / t || tau <= t * T::epsilon() {
                break y;
            }
            tau = tau / T::lit(2.0);
        };
        let mut next = vec![T::zero(); n];
        for (v, &c) in basis.iter().zip(&y) {
            axpy(beta0 * c, v, &mut next);
        }
        w = next;
        done = if t - done - tau <= t * T::epsilon() { t } else { done + tau };
        tau = (tau * T::lit(2.0)).min(t - done);
    }
    Ok(w)
}

/// Orthonormal Krylov basis from `w` with full reorthogonalization; returns
/// the basis, the tridiagonal entries and the residual coupling `β_m`
/// (zero when the space became invariant).
fn lanczos_basis<T: Real>(a: &SymOp<T>, w: &[T], beta0: T, m_max: usize) -> (Vec<Vec<T>>, Vec<T>, Vec<T>, T) {
    let mut v0 = w.to_vec();
    scale(T::one() / beta0, &mut v0);
    let mut basis = vec![v0];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    loop {
        let j = basis.len() - 1;
        let mut r = a.mul_vec(&basis[j]);
        let aj = dot(&r, &basis[j]);
        alpha.push(aj);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(&r, v);
                axpy(-c, v, &mut r);
            }
        }
        let bj = norm(&r);
        let breakdown = bj <= T::lit(1e3) * T::epsilon() * a.inf_norm().max(T::one());
        if breakdown {
            return (basis, alpha, beta, T::zero());
        }
        if basis.len() == m_max {
            return (basis, alpha, beta, bj);
        }
        beta.push(bj);
        scale(T::one() / bj, &mut r);
        basis.push(r);
    }
}

/// `e^{-tL} δ_{u0}`.
pub fn diffuse<T: Real>(l: &SymOp<T>, u0: usize, t: T) -> Result<Vec<T>> {
    HeatKernel::new(l)?.diffuse(u0, t)
}

/// Sampling times of a diffusion trace.
#[derive(Clone, Debug)]
pub enum TimeGrid<T> {
    /// `t = 0` followed by `points` logarithmically spaced times from
    /// `1e-3/λ_max` until the spectral spread falls below `s_stop`.
    Log { points: usize, s_stop: T },
    Times(Vec<T>),
}

impl<T: Real> Default for TimeGrid<T> {
    fn default() -> Self {
        TimeGrid::Log { points: 200, s_stop: T::lit(1e-4) }
    }
}

/// Samples of the diffusion trajectory, by increasing time (so by
/// decreasing spectral spread).
#[derive(Clone, Debug)]
pub struct DiffusionTrace<T> {
    pub center: usize,
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub points: Vec<SpreadPoint<T>>,
}

impl<T: Real> DiffusionTrace<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn spreads_at<T: Real>(l: &SymOp<T>, p2: &[T], x: &[T]) -> SpreadPoint<T> {
    let e = dot(x, x);
    let g = x.iter().zip(p2).fold(T::zero(), |acc, (&xi, &pi)| acc + pi * xi * xi);
    SpreadPoint { s: l.quad_form(x) / e, g: g / e }
}

/// Diffusion trajectory from `u0` with squared distances `p2`.
pub fn diffusion_curve<T: Real>(kernel: &HeatKernel<T>, p2: &[T], u0: usize, grid: &TimeGrid<T>) -> Result<DiffusionTrace<T>> {
    if p2.len() != kernel.dim() {
        return Err(Error::DimensionMismatch { expected: kernel.dim(), got: p2.len() });
    }
    let l = kernel.laplacian();
    let times = match grid {
        TimeGrid::Times(ts) => {
            if ts.iter().any(|&t| !(t >= T::zero())) || ts.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidParameter("diffusion times must be nonnegative and increasing".into()));
            }
            ts.clone()
        }
        &TimeGrid::Log { points, s_stop } => {
            if points < 2 || !(s_stop > T::zero()) {
                return Err(Error::InvalidParameter("log grid needs at least 2 points and a positive stop".into()));
            }
            let t_min = T::lit(1e-3) / kernel.lambda_max();
            let mut t_end = t_min;
            let mut doublings = 0;
            loop {
                let x = kernel.diffuse(u0, t_end)?;
                if spreads_at(l, p2, &x).s < s_stop {
                    break;
                }
                doublings += 1;
                if doublings > 200 {
                    return Err(Error::NonConvergence { iterations: doublings, best_residual: f64::NAN });
                }
                t_end = t_end * T::lit(2.0);
            }
            let ratio = (t_end / t_min).ln() / T::from_usize_lossy(points - 1);
            std::iter::once(T::zero())
                .chain((0..points).map(|i| t_min * (ratio * T::from_usize_lossy(i)).exp()))
                .collect()
        }
    };
    let states: Vec<Vec<T>> = times.par_iter().map(|&t| kernel.diffuse(u0, t)).collect::<Result<_>>()?;
    let points = states.iter().map(|x| spreads_at(l, p2, x)).collect();
    Ok(DiffusionTrace { center: u0, times, states, points })
}

/// Second derivatives at `s = 1` of the uncertainty curve and the diffusion
/// curve about `u0`, for the distances `d` (centered at `u0`).
pub fn curvature_comparison_with<T: Real>(g: &Graph, d: &DistanceVector<T>) -> Result<(T, T)> {
    let u0 = d.center();
    if d.len() != g.n_vertices() {
        return Err(Error::DimensionMismatch { expected: g.n_vertices(), got: d.len() });
    }
    let deg0 = T::from_usize_lossy(g.degree(u0));
    if deg0 == T::zero() {
        return Err(Error::IsolatedVertex(u0));
    }
    let (mut inv, mut inv_d2, mut d2) = (T::zero(), T::zero(), T::zero());
    for &v in g.neighbors(u0) {
        let dv = T::from_usize_lossy(g.degree(v));
        let dist = d.as_slice()[v];
        let sq = dist * dist;
        inv = inv + T::one() / dv;
        inv_d2 = inv_d2 + T::one() / (sq * dv);
        d2 = d2 + sq / dv;
    }
    let half = deg0 / T::lit(2.0);
    Ok((half / inv_d2, half * d2 / (inv * inv)))
}

/// [`curvature_comparison_with`] for hop distances.
pub fn curvature_comparison<T: Real>(g: &Graph, u0: usize) -> Result<(T, T)> {
    curvature_comparison_with(g, &geodesic_distances(g, u0)?)
}

/// Finite-difference derivatives of a sampled curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derivatives<T> {
    pub first: T,
    pub second: T,
}

/// First and second derivative at `s0` of the quadratic through the three
/// samples nearest `s0`.
pub fn empirical_second_derivative<T: Real>(points: &[SpreadPoint<T>], s0: T) -> Result<Derivatives<T>> {
    let mut near: Vec<SpreadPoint<T>> = points.to_vec();
    near.sort_by(|a, b| (a.s - s0).abs().partial_cmp(&(b.s - s0).abs()).unwrap_or(std::cmp::Ordering::Equal));
    near.dedup_by(|a, b| a.s == b.s);
    if near.len() < 3 {
        return Err(Error::InsufficientPoints { need: 3, have: near.len() });
    }
    let [p0, p1, p2] = [near[0], near[1], near[2]];
    let d01 = (p1.g - p0.g) / (p1.s - p0.s);
    let d12 = (p2.g - p1.g) / (p2.s - p1.s);
    let c = (d12 - d01) / (p2.s - p0.s);
    Ok(Derivatives { first: d01 + c * (T::lit(2.0) * s0 - p0.s - p1.s), second: T::lit(2.0) * c })
}
