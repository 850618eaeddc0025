//! The uncertainty curve: the pencil `M(α) = P² − αL`, its bottom
//! eigenspace, the sandwich refinement and point queries.

mod bounds;
mod hausdorff;
mod sandwich;

pub use bounds::{CurveBounds, CurveKnot};
pub use hausdorff::hausdorff_one_sided;
pub use sandwich::{Budget, PointQuery};

use crate::error::{Error, Result};
use crate::graph::{geodesic_distances, Graph};
use crate::scalar::{axpy, dot, normalize, Real};
use crate::spectral::{
    extreme_eigenpair_from, ground_state, normalized_laplacian, small_eigh, SolverOptions, SymOp, Which,
};

/// Which stretch of the curve a sandwich run covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// `s ∈ [0, λ_max]`.
    Full,
    /// `s ∈ [0, s_impulse]`, ending at the centered impulse (`s = 1` for a
    /// normalized Laplacian).
    ToImpulse,
}

/// `M(α) = P² − α L`.
pub fn pencil<T: Real>(l: &SymOp<T>, p2: &SymOp<T>, alpha: T) -> Result<SymOp<T>> {
    p2.combine(T::one(), l, -alpha)
}

/// Result of one pencil solve: `q(α)` and the curve knots it yields. Two
/// knots (the extremes `h₋`, `h₊` of the spectral spread over the
/// eigenspace) when the eigenspace is degenerate, one otherwise.
#[derive(Clone, Debug)]
pub struct CurvePoint<T> {
    pub alpha: T,
    pub q: T,
    pub knots: Vec<CurveKnot<T>>,
    pub multiplicity: usize,
    /// `‖M(α)‖∞`, the scale of the solve.
    pub(crate) scale: T,
}

/// Operator pair defining an uncertainty curve: a PSD "spectral" operator
/// `l` with known null vector, and a nonnegative diagonal `p2` vanishing at
/// exactly one index (the center).
#[derive(Clone, Debug)]
pub struct PencilProblem<T> {
    l: SymOp<T>,
    p2: SymOp<T>,
    ground: Vec<T>,
    center: usize,
    domain: Domain,
    opts: SolverOptions<T>,
}

impl<T: Real> PencilProblem<T> {
    /// `ground` must span the null space of `l`; it is normalized here.
    pub fn new(l: SymOp<T>, p2: Vec<T>, mut ground: Vec<T>, domain: Domain) -> Result<Self> {
        let n = l.dim();
        if p2.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p2.len() });
        }
        if ground.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: ground.len() });
        }
        if n < 2 {
            return Err(Error::InvalidParameter("need at least two vertices".into()));
        }
        let zeros: Vec<usize> = (0..n).filter(|&i| p2[i] == T::zero()).collect();
        if zeros.len() != 1 || p2.iter().any(|&x| !(x >= T::zero()) || !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "squared distances must be finite, nonnegative and vanish exactly at the center".into(),
            ));
        }
        if normalize(&mut ground) == T::zero() {
            return Err(Error::ZeroSignal);
        }
        Ok(PencilProblem { l, p2: SymOp::from_diagonal(p2), ground, center: zeros[0], domain, opts: SolverOptions::default() })
    }

    /// Normalized Laplacian and squared hop distances from `u0`.
    pub fn for_graph(g: &Graph, u0: usize) -> Result<Self> {
        if g.n_vertices() < 3 {
            return Err(Error::InvalidParameter(format!(
                "uncertainty curves need at least 3 vertices, got {}",
                g.n_vertices()
            )));
        }
        let d = geodesic_distances::<T>(g, u0)?;
        let l = normalized_laplacian(g)?;
        Self::new(l, d.squared(), ground_state(g), Domain::Full)
    }

    pub fn with_options(mut self, opts: SolverOptions<T>) -> Self {
        self.opts = opts;
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn options(&self) -> &SolverOptions<T> {
        &self.opts
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    pub fn laplacian(&self) -> &SymOp<T> {
        &self.l
    }

    pub fn p2(&self) -> &[T] {
        self.p2.diagonal()
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Unit null vector of the spectral operator.
    pub fn ground(&self) -> &[T] {
        &self.ground
    }

    pub fn pencil(&self, alpha: T) -> SymOp<T> {
        pencil(&self.l, &self.p2, alpha).expect("dimensions checked at construction")
    }

    pub fn spreads_of(&self, v: &[T]) -> (T, T) {
        let e = dot(v, v);
        (self.l.quad_form(v) / e, self.p2.quad_form(v) / e)
    }

    /// `q(α)` and an orthonormal basis of the numerical eigenspace `S(α)`.
    pub fn q_alpha(&self, alpha: T) -> Result<(T, Vec<Vec<T>>)> {
        let e = extreme_eigenpair_from(&self.pencil(alpha), Which::Smallest, &self.opts, None)?;
        Ok((e.pair.value, e.basis))
    }

    /// Curve knot(s) supported by the line of slope `alpha`.
    pub fn curve_point(&self, alpha: T) -> Result<CurvePoint<T>> {
        self.curve_point_from(alpha, None)
    }

    pub(crate) fn curve_point_from(&self, alpha: T, start: Option<&[T]>) -> Result<CurvePoint<T>> {
        let m = self.pencil(alpha);
        let scale = m.inf_norm();
        let e = extreme_eigenpair_from(&m, Which::Smallest, &self.opts, start)?;
        let q = e.pair.value;
        let multiplicity = e.multiplicity();
        let mut knots = Vec::with_capacity(2);
        if multiplicity == 1 {
            knots.push(self.knot(alpha, q, e.pair.vector));
        } else {
            let (lo, hi) = self.extreme_combinations(&self.l, &e.basis)?;
            let k_lo = self.knot(alpha, q, lo);
            let k_hi = self.knot(alpha, q, hi);
            let spread = (k_hi.s - k_lo.s).abs();
            let split = T::lit(1e3) * T::epsilon() * self.l.inf_norm().max(T::one());
            knots.push(k_lo);
            if spread > split {
                knots.push(k_hi);
            }
        }
        Ok(CurvePoint { alpha, q, knots, multiplicity, scale })
    }

    fn knot(&self, alpha: T, q: T, vector: Vec<T>) -> CurveKnot<T> {
        let (s, g) = self.spreads_of(&vector);
        CurveKnot { alpha, s, g, q, vector }
    }

    /// Unit vectors in span(`basis`) minimizing and maximizing `xᵀ op x`.
    fn extreme_combinations(&self, op: &SymOp<T>, basis: &[Vec<T>]) -> Result<(Vec<T>, Vec<T>)> {
        let m = basis.len();
        let (_, y) = small_eigh(op.project(basis), m)?;
        let combine = |k: usize| {
            let mut v = vec![T::zero(); self.dim()];
            for (j, b) in basis.iter().enumerate() {
                axpy(y[k * m + j], b, &mut v);
            }
            normalize(&mut v);
            v
        };
        Ok((combine(0), combine(m - 1)))
    }

    /// `(0, ground·P²·ground)`, the only point with zero spectral spread.
    pub fn left_endpoint(&self) -> CurveKnot<T> {
        // the ground state is an exact null vector; pin s rather than carry
        // rounding noise into the domain
        let (_, g) = self.spreads_of(&self.ground);
        CurveKnot { alpha: T::neg_infinity(), s: T::zero(), g, q: T::neg_infinity(), vector: self.ground.clone() }
    }

    /// The centered impulse, the only point with zero graph spread; it is the
    /// knot of `α = 0` since `q(0) = 0`.
    pub fn impulse_knot(&self) -> CurveKnot<T> {
        let mut v = vec![T::zero(); self.dim()];
        v[self.center] = T::one();
        let (s, g) = self.spreads_of(&v);
        CurveKnot { alpha: T::zero(), s, g, q: T::zero(), vector: v }
    }

    /// Largest eigenvalue of the spectral operator and the right endpoint of
    /// the full curve: the least graph spread over the whole top eigenspace.
    pub fn right_endpoint(&self) -> Result<(T, CurveKnot<T>)> {
        let opts = SolverOptions { max_cluster: self.dim(), ..self.opts.clone() };
        let e = extreme_eigenpair_from(&self.l, Which::Largest, &opts, None)?;
        let v = if e.multiplicity() == 1 {
            e.pair.vector
        } else {
            self.extreme_combinations(&self.p2, &e.basis)?.0
        };
        let (s, g) = self.spreads_of(&v);
        Ok((e.pair.value, CurveKnot { alpha: T::infinity(), s, g, q: T::neg_infinity(), vector: v }))
    }

    /// `W = sqrt(λ_max² + max(P²)²)`, the scale in the sandwich rate bound.
    pub fn rate_scale(&self, lambda_max: T) -> T {
        let pmax = self.p2().iter().copied().fold(T::zero(), T::max);
        (lambda_max * lambda_max + pmax * pmax).sqrt()
    }
}
