//! Thick-restart Lanczos with full reorthogonalization, for the smallest
//! eigenpair of a sparse symmetric operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::eigh;
use super::SymOp;
use crate::error::{Error, Result};
use crate::scalar::{axpy, dot, norm, normalize, Real};

/// Krylov basis size before a restart.
const MAX_BASIS: usize = 120;
/// Ritz vectors kept across a restart.
const KEEP: usize = 40;

pub(crate) struct LanczosResult<T> {
    pub value: T,
    pub vector: Vec<T>,
    pub residual: T,
}

pub(crate) fn random_unit<T: Real>(n: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    let mut v: Vec<T> = (0..n).map(|_| T::lit(rng.random::<f64>() - 0.5)).collect();
    normalize(&mut v);
    v
}

fn orthogonalize<T: Real>(w: &mut [T], against: &[Vec<T>]) {
    for v in against {
        let c = dot(v, w);
        axpy(-c, v, w);
    }
}

/// Smallest eigenpair of `a` restricted to the orthogonal complement of
/// `deflate` (which must be orthonormal). Stops once the true residual is at
/// most `tol_abs`.
pub(crate) fn smallest<T: Real>(
    a: &SymOp<T>,
    start: Option<&[T]>,
    deflate: &[Vec<T>],
    tol_abs: T,
    max_matvec: usize,
    seed: u64,
) -> Result<LanczosResult<T>> {
    let n = a.dim();
    let n_eff = n.saturating_sub(deflate.len());
    if n_eff == 0 {
        return Err(Error::InvalidParameter("deflation space fills the whole space".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<T> = match start {
        Some(s) => s.to_vec(),
        None => random_unit(n, &mut rng),
    };
    for _ in 0..2 {
        orthogonalize(&mut x, deflate);
    }
    if normalize(&mut x) <= T::epsilon() {
        x = random_unit(n, &mut rng);
        orthogonalize(&mut x, deflate);
        normalize(&mut x);
    }
    let m_max = n_eff.min(MAX_BASIS);
    let keep = KEEP.min(m_max / 2).max(1);
    let tiny = T::epsilon().sqrt() * a.inf_norm().max(T::one());

    // A V = V H + beta v_next e_lastᵀ holds throughout; H = VᵀAV is rebuilt
    // column by column from the Gram-Schmidt coefficients.
    let mut basis: Vec<Vec<T>> = vec![x];
    let mut h = vec![T::zero(); m_max * m_max];
    let mut matvecs = 0usize;
    let mut best = T::infinity();
    let mut w = vec![T::zero(); n];
    let mut next_check = 8usize;
    loop {
        let j = basis.len() - 1;
        a.apply(&basis[j], &mut w);
        matvecs += 1;
        for i in 0..=j {
            h[i * m_max + j] = T::zero();
        }
        for _ in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = dot(v, &w);
                axpy(-c, v, &mut w);
                h[i * m_max + j] = h[i * m_max + j] + c;
            }
            orthogonalize(&mut w, deflate);
        }
        for i in 0..j {
            h[j * m_max + i] = h[i * m_max + j];
        }
        let mut beta = norm(&w);
        let size = j + 1;
        let mut jumped = false;
        if beta <= tiny && size < n_eff {
            let mut fresh = random_unit(n, &mut rng);
            for _ in 0..2 {
                orthogonalize(&mut fresh, &basis);
                orthogonalize(&mut fresh, deflate);
            }
            normalize(&mut fresh);
            w = fresh;
            beta = T::zero();
            jumped = true;
        }
        let full = size == m_max || size == n_eff || matvecs >= max_matvec;
        if !jumped && (size >= next_check || full || beta <= tiny) {
            next_check = size * 2;
            let hs = leading_block(&h, m_max, size);
            let (theta, y) = eigh(hs, size)?;
            let est = (beta * y[size - 1]).abs();
            let converged = est <= tol_abs * T::lit(0.5) || beta <= tiny;
            if converged || full {
                let mut v = combine(&basis, &y[..size]);
                orthogonalize(&mut v, deflate);
                normalize(&mut v);
                let mut r = a.mul_vec(&v);
                let value = dot(&v, &r);
                axpy(-value, &v, &mut r);
                let residual = norm(&r);
                best = best.min(residual);
                if residual <= tol_abs {
                    return Ok(LanczosResult { value, vector: v, residual });
                }
                if matvecs >= max_matvec || size == n_eff {
                    return Err(Error::NonConvergence { iterations: matvecs, best_residual: best.to_f64_lossy() });
                }
                if full {
                    // thick restart on the lowest Ritz vectors
                    let k = keep.min(size - 1).max(1);
                    let new_basis: Vec<Vec<T>> = (0..k).map(|c| combine(&basis, &y[c * size..(c + 1) * size])).collect();
                    h.iter_mut().for_each(|e| *e = T::zero());
                    for c in 0..k {
                        h[c * m_max + c] = theta[c];
                    }
                    basis = new_basis;
                    let mut vnext = w.clone();
                    crate::scalar::scale(T::one() / beta, &mut vnext);
                    basis.push(vnext);
                    next_check = basis.len() + 8;
                    continue;
                }
            }
        }
        if jumped {
            basis.push(w.clone());
        } else {
            let mut vnext = w.clone();
            crate::scalar::scale(T::one() / beta, &mut vnext);
            basis.push(vnext);
        }
    }
}

fn leading_block<T: Real>(h: &[T], stride: usize, size: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(size * size);
    for c in 0..size {
        out.extend_from_slice(&h[c * stride..c * stride + size]);
    }
    out
}

fn combine<T: Real>(basis: &[Vec<T>], coef: &[T]) -> Vec<T> {
    let mut v = vec![T::zero(); basis[0].len()];
    for (c, b) in coef.iter().zip(basis) {
        axpy(*c, b, &mut v);
    }
    v
}
