//! Symmetric eigenproblems: normalized Laplacian, extreme eigenpairs with
//! their numerical eigenspace, full spectra and the graph Fourier transform.

mod dense;
mod lanczos;
mod symop;

pub use symop::SymOp;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{dot, Real};

/// Largest dimension handled by the direct dense solver.
pub const DENSE_THRESHOLD: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Smallest,
    Largest,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair<T> {
    pub value: T,
    /// Unit norm.
    pub vector: Vec<T>,
    /// `‖A v − value·v‖`
    pub residual: T,
}

/// Extreme eigenpair plus an orthonormal basis of the numerical eigenspace:
/// every eigenvector whose eigenvalue lies within the gap tolerance of the
/// extreme one. `basis[0]` is `pair.vector`.
#[derive(Clone, Debug)]
pub struct ExtremeEigen<T> {
    pub pair: EigenPair<T>,
    pub values: Vec<T>,
    pub basis: Vec<Vec<T>>,
}

impl<T> ExtremeEigen<T> {
    pub fn multiplicity(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions<T> {
    /// Residual tolerance, relative to `max(1, ‖A‖∞)`.
    pub tol: T,
    /// Eigenvalues within `gap_tol·max(1, |λ|)` of the extreme one count as
    /// the same eigenspace.
    pub gap_tol: T,
    pub dense_threshold: usize,
    /// Cap on the size of a reported eigenspace.
    pub max_cluster: usize,
    /// Iterative solver budget in matrix-vector products per unit dimension.
    pub max_iter_factor: usize,
    pub seed: u64,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            tol: T::solver_tol(),
            gap_tol: T::gap_tol(),
            dense_threshold: DENSE_THRESHOLD,
            max_cluster: 16,
            max_iter_factor: 10,
            seed: 0x5EED,
        }
    }
}

impl<T: Real> SolverOptions<T> {
    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }
}

/// `I − D^{-1/2} A D^{-1/2}`.
pub fn normalized_laplacian<T: Real>(g: &Graph) -> Result<SymOp<T>> {
    let n = g.n_vertices();
    let deg = g.degrees();
    if let Some(v) = deg.iter().position(|&d| d == 0) {
        return Err(Error::IsolatedVertex(v));
    }
    let inv_sqrt: Vec<T> = deg.iter().map(|&d| T::one() / T::from_usize_lossy(d).sqrt()).collect();
    let entries: Vec<(usize, usize, T)> =
        g.edges().iter().map(|&(u, v)| (u, v, -(inv_sqrt[u] * inv_sqrt[v]))).collect();
    SymOp::from_entries(vec![T::one(); n], &entries)
}

/// Null vector of the normalized Laplacian: `f₁(v) = sqrt(deg v / Σ deg)`.
pub fn ground_state<T: Real>(g: &Graph) -> Vec<T> {
    let total = T::from_usize_lossy(2 * g.n_edges());
    (0..g.n_vertices()).map(|v| (T::from_usize_lossy(g.degree(v)) / total).sqrt()).collect()
}

pub fn extreme_eigenpair<T: Real>(a: &SymOp<T>, which: Which, opts: &SolverOptions<T>) -> Result<ExtremeEigen<T>> {
    extreme_eigenpair_from(a, which, opts, None)
}

/// As [`extreme_eigenpair`]; the iterative path starts from `start` when given.
pub fn extreme_eigenpair_from<T: Real>(
    a: &SymOp<T>,
    which: Which,
    opts: &SolverOptions<T>,
    start: Option<&[T]>,
) -> Result<ExtremeEigen<T>> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("empty operator".into()));
    }
    if opts.tol.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidParameter(format!("solver tolerance must be positive, got {}", opts.tol)));
    }
    let flipped;
    let op = match which {
        Which::Smallest => a,
        Which::Largest => {
            flipped = a.scaled(-T::one());
            &flipped
        }
    };
    let mut out = if n == 1 {
        let value = op.diagonal()[0];
        ExtremeEigen {
            pair: EigenPair { value, vector: vec![T::one()], residual: T::zero() },
            values: vec![value],
            basis: vec![vec![T::one()]],
        }
    } else if n <= opts.dense_threshold {
        smallest_dense(op, opts)?
    } else {
        smallest_iterative(op, opts, start)?
    };
    if which == Which::Largest {
        out.pair.value = -out.pair.value;
        for v in &mut out.values {
            *v = -*v;
        }
    }
    Ok(out)
}

fn smallest_dense<T: Real>(a: &SymOp<T>, opts: &SolverOptions<T>) -> Result<ExtremeEigen<T>> {
    let n = a.dim();
    let c = dense::bottom_cluster(&a.to_dense(), n, opts.tol, opts.gap_tol, opts.max_cluster.max(1))?;
    Ok(ExtremeEigen {
        pair: EigenPair { value: c.values[0], vector: c.vectors[0].clone(), residual: c.residual },
        values: c.values,
        basis: c.vectors,
    })
}

fn smallest_iterative<T: Real>(a: &SymOp<T>, opts: &SolverOptions<T>, start: Option<&[T]>) -> Result<ExtremeEigen<T>> {
    let n = a.dim();
    let tol_abs = opts.tol * a.inf_norm().max(T::one());
    let budget = opts.max_iter_factor.max(1) * n;
    let first = lanczos::smallest(a, start, &[], tol_abs, budget, opts.seed)?;
    let q = first.value;
    let gap = opts.gap_tol * q.abs().max(T::one());
    let mut values = vec![q];
    let mut basis = vec![first.vector.clone()];
    // Krylov spaces see one vector per eigenvalue; probe for further members
    // of the bottom eigenspace on the deflated complement.
    while basis.len() < opts.max_cluster && basis.len() < n {
        let seed = opts.seed.wrapping_add(basis.len() as u64);
        let next = lanczos::smallest(a, None, &basis, tol_abs, budget, seed)?;
        if next.value - q > gap {
            break;
        }
        values.push(next.value);
        basis.push(next.vector);
    }
    Ok(ExtremeEigen {
        pair: EigenPair { value: q, vector: first.vector, residual: first.residual },
        values,
        basis,
    })
}

/// Complete eigendecomposition with ascending eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    pub values: Vec<T>,
    /// Orthonormal eigenvectors, `vectors[i]` belonging to `values[i]`.
    pub vectors: Vec<Vec<T>>,
}

pub fn full_spectrum<T: Real>(a: &SymOp<T>) -> Result<Spectrum<T>> {
    full_spectrum_with(a, DENSE_THRESHOLD)
}

pub fn full_spectrum_with<T: Real>(a: &SymOp<T>, threshold: usize) -> Result<Spectrum<T>> {
    let n = a.dim();
    if n > threshold {
        return Err(Error::TooLargeForDense { n, threshold });
    }
    let (values, z) = dense::eigh(a.to_dense(), n)?;
    let vectors = (0..n).map(|k| z[k * n..(k + 1) * n].to_vec()).collect();
    Ok(Spectrum { values, vectors })
}

impl<T: Real> Spectrum<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn lambda_max(&self) -> T {
        *self.values.last().expect("nonempty spectrum")
    }

    /// Graph Fourier transform `Fᵀ x`.
    pub fn gft(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_dim(x.len())?;
        Ok(self.vectors.iter().map(|f| dot(f, x)).collect())
    }

    /// Inverse transform `F x̂`.
    pub fn igft(&self, xhat: &[T]) -> Result<Vec<T>> {
        self.check_dim(xhat.len())?;
        let mut x = vec![T::zero(); self.dim()];
        for (f, &c) in self.vectors.iter().zip(xhat) {
            crate::scalar::axpy(c, f, &mut x);
        }
        Ok(x)
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }
}

/// Eigen-decomposition of a small dense symmetric matrix (either storage
/// order); eigenvector `k` occupies `vecs[k*m..(k+1)*m]`.
pub(crate) fn small_eigh<T: Real>(a: Vec<T>, m: usize) -> Result<(Vec<T>, Vec<T>)> {
    dense::eigh(a, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, cycle, star};

    #[test]
    fn laplacian_entries() {
        let l: SymOp<f64> = normalized_laplacian(&complete(5).unwrap()).unwrap();
        assert!(l.diagonal().iter().all(|&d| d == 1.0));
        assert!((l.get(1, 3) + 0.25).abs() < 1e-15);
        let l: SymOp<f64> = normalized_laplacian(&star(5).unwrap()).unwrap();
        assert!((l.get(0, 4) + 0.5).abs() < 1e-15);
        assert_eq!(l.get(1, 2), 0.0);
        let path = Graph::from_edges(2, [(0, 1)]).unwrap();
        let l: SymOp<f64> = normalized_laplacian(&path).unwrap();
        assert_eq!(l.to_dense(), vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn isolated_vertex_rejected() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert!(matches!(normalized_laplacian::<f64>(&g), Err(Error::IsolatedVertex(2))));
    }

    #[test]
    fn complete_smallest_is_ground_state() {
        let g = complete(4).unwrap();
        let l = normalized_laplacian::<f64>(&g).unwrap();
        let e = extreme_eigenpair(&l, Which::Smallest, &SolverOptions::default()).unwrap();
        assert!(e.pair.value.abs() < 1e-12);
        assert_eq!(e.multiplicity(), 1);
        assert!(e.pair.vector.iter().all(|v| (v.abs() - 0.5).abs() < 1e-10));
    }

    #[test]
    fn star_largest_is_two() {
        let l = normalized_laplacian::<f64>(&star(5).unwrap()).unwrap();
        let e = extreme_eigenpair(&l, Which::Largest, &SolverOptions::default()).unwrap();
        assert!((e.pair.value - 2.0).abs() < 1e-12);
        assert!(e.pair.residual <= 1e-10);
    }

    #[test]
    fn degenerate_top_of_complete() {
        let l = normalized_laplacian::<f64>(&complete(6).unwrap()).unwrap();
        let e = extreme_eigenpair(&l, Which::Largest, &SolverOptions::default()).unwrap();
        assert_eq!(e.multiplicity(), 5);
        for v in &e.values {
            assert!((v - 1.2).abs() < 1e-12);
        }
    }

    #[test]
    fn known_spectra() {
        let spec = full_spectrum(&normalized_laplacian::<f64>(&cycle(4).unwrap()).unwrap()).unwrap();
        for (got, want) in spec.values.iter().zip([0.0, 1.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let spec = full_spectrum(&normalized_laplacian::<f64>(&star(5).unwrap()).unwrap()).unwrap();
        for (got, want) in spec.values.iter().zip([0.0, 1.0, 1.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn too_large_for_dense() {
        let a = SymOp::from_diagonal(vec![1.0f64; 10]);
        assert!(matches!(full_spectrum_with(&a, 5), Err(Error::TooLargeForDense { n: 10, threshold: 5 })));
    }

    #[test]
    fn iterative_path_agrees_with_dense() {
        let g = crate::generators::geometric(120, 0.2, 5).unwrap();
        let l = normalized_laplacian::<f64>(&g).unwrap();
        let dense = extreme_eigenpair(&l, Which::Largest, &SolverOptions::default()).unwrap();
        let opts = SolverOptions { dense_threshold: 10, ..SolverOptions::default() };
        let iter = extreme_eigenpair(&l, Which::Largest, &opts).unwrap();
        assert!((dense.pair.value - iter.pair.value).abs() < 1e-9);
        assert!(iter.pair.residual <= 1e-10 * l.inf_norm().max(1.0));
    }

    #[test]
    fn iterative_path_detects_multiplicity() {
        let l = normalized_laplacian::<f64>(&complete(30).unwrap()).unwrap();
        let opts = SolverOptions { dense_threshold: 10, max_cluster: 4, ..SolverOptions::default() };
        let e = extreme_eigenpair(&l, Which::Largest, &opts).unwrap();
        assert_eq!(e.multiplicity(), 4);
    }

    #[test]
    fn f32_path() {
        let l = normalized_laplacian::<f32>(&star(6).unwrap()).unwrap();
        let e = extreme_eigenpair(&l, Which::Largest, &SolverOptions::default()).unwrap();
        assert!((e.pair.value - 2.0).abs() < 1e-4);
    }
}
