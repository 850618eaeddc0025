//! Dense symmetric eigensolvers: Householder tridiagonalization followed by
//! implicit QL, with an inverse-iteration shortcut when only the bottom of
//! the spectrum is wanted.
//!
//! Matrices are column-major `n × n` slices; only the lower triangle is read.

use crate::error::{Error, Result};
use crate::scalar::{dot, normalize, Real};

#[inline(always)]
fn ix(n: usize, r: usize, c: usize) -> usize {
    c * n + r
}

/// Householder vectors left behind in `a` by [`reduce`].
struct Reflectors<T> {
    /// `h[i]` is the normalizer of the reflector stored in column `i`.
    h: Vec<T>,
}

/// Tridiagonalizes in place. Returns the diagonal, the off-diagonal
/// (`off[i]` couples `i` and `i + 1`, last entry zero) and the reflectors,
/// which stay in the strict upper triangle of `a`.
fn reduce<T: Real>(a: &mut [T], n: usize) -> (Vec<T>, Vec<T>, Reflectors<T>) {
    let zero = T::zero();
    let mut d: Vec<T> = (0..n).map(|j| a[ix(n, n - 1, j)]).collect();
    let mut e = vec![zero; n];
    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for k in 0..i {
            scale = scale + d[k].abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = a[ix(n, i - 1, j)];
                a[ix(n, i, j)] = zero;
                a[ix(n, j, i)] = zero;
            }
        } else {
            for k in 0..i {
                d[k] = d[k] / scale;
                h = h + d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }
            for j in 0..i {
                f = d[j];
                a[ix(n, j, i)] = f;
                let col = j * n;
                g = e[j] + a[col + j] * f;
                for k in j + 1..i {
                    let v = a[col + k];
                    g = g + v * d[k];
                    e[k] = e[k] + v * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col = j * n;
                for k in j..i {
                    a[col + k] = a[col + k] - (f * e[k] + g * d[k]);
                }
                d[j] = a[ix(n, i - 1, j)];
                a[ix(n, i, j)] = zero;
            }
        }
        d[i] = h;
    }
    let diag: Vec<T> = (0..n).map(|i| a[ix(n, i, i)]).collect();
    let mut off = vec![zero; n];
    off[..(n - 1)].copy_from_slice(&e[1..n]);
    (diag, off, Reflectors { h: d })
}

/// Maps a vector from the tridiagonal basis back to the original one.
fn back_transform<T: Real>(a: &[T], n: usize, refl: &Reflectors<T>, z: &mut [T]) {
    for i in 0..n.saturating_sub(1) {
        let h = refl.h[i + 1];
        if h == T::zero() {
            continue;
        }
        let u = &a[(i + 1) * n..(i + 1) * n + i + 1];
        let g = dot(u, &z[..=i]) / h;
        for k in 0..=i {
            z[k] = z[k] - g * u[k];
        }
    }
}

/// Implicit QL on a symmetric tridiagonal matrix. Eigenvalues replace `d`
/// (ascending on return). If `z` is given (column-major, initialized by the
/// caller) the rotations are accumulated into it and columns follow the sort.
pub(crate) fn tql<T: Real>(d: &mut [T], e: &mut [T], mut z: Option<&mut [T]>) -> Result<()> {
    let n = d.len();
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    let eps = T::epsilon();
    let mut f = zero;
    let mut tst1 = zero;
    let max_iter = 30 * n.max(1);
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::NonConvergence { iterations: iter, best_residual: e[l].abs().to_f64_lossy() });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(one);
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = one;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let (left, right) = z.split_at_mut((i + 1) * n);
                        let zi = &mut left[i * n..];
                        let zi1 = &mut right[..n];
                        for k in 0..n {
                            let hk = zi1[k];
                            zi1[k] = s * zi[k] + c * hk;
                            zi[k] = c * zi[k] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = zero;
    }
    // selection sort keeps column swaps cheap and the ordering stable
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in i + 1..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            if let Some(z) = z.as_deref_mut() {
                for r in 0..n {
                    z.swap(i * n + r, k * n + r);
                }
            }
        }
    }
    Ok(())
}

/// All eigenpairs of a dense symmetric matrix. Values ascending; vectors are
/// the columns of the returned column-major matrix.
pub(crate) fn eigh<T: Real>(mut a: Vec<T>, n: usize) -> Result<(Vec<T>, Vec<T>)> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let (mut d, mut e, refl) = reduce(&mut a, n);
    let mut z = vec![T::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = T::one();
    }
    tql(&mut d, &mut e, Some(&mut z))?;
    for c in 0..n {
        back_transform(&a, n, &refl, &mut z[c * n..(c + 1) * n]);
    }
    Ok((d, z))
}

/// Solves `(T − mu I) x = b` in place for symmetric tridiagonal `T` by LU
/// with partial pivoting; exactly singular pivots are nudged to `tiny`.
pub(crate) fn shifted_tridiag_solve<T: Real>(diag: &[T], off: &[T], mu: T, tiny: T, b: &mut [T]) {
    let n = diag.len();
    let zero = T::zero();
    let mut d: Vec<T> = diag.iter().map(|&x| x - mu).collect();
    let mut dl: Vec<T> = off[..n - 1].to_vec();
    let mut du: Vec<T> = off[..n - 1].to_vec();
    let mut du2 = vec![zero; n.saturating_sub(2)];
    let mut piv = vec![false; n.saturating_sub(1)];
    let nudge = |x: T| if x.abs() < tiny { if x < zero { -tiny } else { tiny } } else { x };
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            d[i] = nudge(d[i]);
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] = d[i + 1] - fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            piv[i] = true;
        }
    }
    d[n - 1] = nudge(d[n - 1]);
    for i in 0..n - 1 {
        if piv[i] {
            let t = b[i];
            b[i] = b[i + 1];
            b[i + 1] = t - dl[i] * b[i];
        } else {
            b[i + 1] = b[i + 1] - dl[i] * b[i];
        }
    }
    b[n - 1] = b[n - 1] / d[n - 1];
    if n >= 2 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
}

fn dense_residual<T: Real>(a: &[T], n: usize, x: &[T], lambda: T) -> T {
    // `a` holds the full symmetric matrix here
    let mut acc = T::zero();
    for r in 0..n {
        let mut y = T::zero();
        for c in 0..n {
            y = y + a[ix(n, r, c)] * x[c];
        }
        let d = y - lambda * x[r];
        acc = acc + d * d;
    }
    acc.sqrt()
}

/// Bottom cluster of a dense symmetric matrix: every eigenpair whose value is
/// within `gap` of the minimum, up to `max_cluster` of them.
pub(crate) struct Cluster<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
    pub residual: T,
}

/// Computes the bottom cluster without forming the full eigenvector matrix:
/// QL for eigenvalues only, inverse iteration on the tridiagonal form for
/// the few vectors needed. Falls back to [`eigh`] if the result fails the
/// residual check.
pub(crate) fn bottom_cluster<T: Real>(
    full: &[T],
    n: usize,
    tol: T,
    gap_rel: T,
    max_cluster: usize,
) -> Result<Cluster<T>> {
    let anorm = (0..n)
        .map(|r| (0..n).map(|c| full[ix(n, r, c)].abs()).fold(T::zero(), |a, b| a + b))
        .fold(T::zero(), T::max);
    let limit = tol * anorm.max(T::one());
    if n >= 3 {
        if let Some(c) = bottom_cluster_fast(full, n, gap_rel, max_cluster)? {
            if c.residual <= limit {
                return Ok(c);
            }
            log::debug!("inverse iteration residual {} above {}, using full QL", c.residual, limit);
        }
    }
    let (vals, vecs) = eigh(full.to_vec(), n)?;
    let q = vals[0];
    let gap = gap_rel * q.abs().max(T::one());
    let m = vals.iter().take_while(|&&v| v - q <= gap).count().min(max_cluster).max(1);
    let vectors: Vec<Vec<T>> = (0..m).map(|k| vecs[k * n..(k + 1) * n].to_vec()).collect();
    let residual = dense_residual(full, n, &vectors[0], q);
    if residual > limit {
        return Err(Error::NonConvergence { iterations: 30 * n, best_residual: residual.to_f64_lossy() });
    }
    Ok(Cluster { values: vals[..m].to_vec(), vectors, residual })
}

fn bottom_cluster_fast<T: Real>(full: &[T], n: usize, gap_rel: T, max_cluster: usize) -> Result<Option<Cluster<T>>> {
    let mut a = full.to_vec();
    let (diag, off, refl) = reduce(&mut a, n);
    let mut vals = diag.clone();
    let mut e = off.clone();
    tql(&mut vals, &mut e, None)?;
    let q = vals[0];
    let gap = gap_rel * q.abs().max(T::one());
    let m = vals.iter().take_while(|&&v| v - q <= gap).count().min(max_cluster).max(1);

    let tnorm = (0..n)
        .map(|i| diag[i].abs() + off[i].abs() + if i > 0 { off[i - 1].abs() } else { T::zero() })
        .fold(T::zero(), T::max)
        .max(T::min_positive_value());
    let tiny = T::epsilon() * tnorm;
    let mut tri_vecs: Vec<Vec<T>> = Vec::with_capacity(m);
    for k in 0..m {
        let mut x: Vec<T> = (0..n)
            .map(|i| {
                // fixed pseudo-random start, distinct per cluster member
                let t = ((i * 7919 + k * 104_729 + 1) % 1009) as f64 / 1009.0;
                T::lit(0.5 + t)
            })
            .collect();
        normalize(&mut x);
        for _ in 0..3 {
            shifted_tridiag_solve(&diag, &off, vals[k], tiny, &mut x);
            for prev in &tri_vecs {
                let c = dot(prev, &x);
                crate::scalar::axpy(-c, prev, &mut x);
            }
            if normalize(&mut x) == T::zero() || !x.iter().all(|v| v.is_finite()) {
                return Ok(None);
            }
        }
        tri_vecs.push(x);
    }
    let mut vectors = Vec::with_capacity(m);
    for mut z in tri_vecs {
        back_transform(&a, n, &refl, &mut z);
        normalize(&mut z);
        vectors.push(z);
    }
    // Rayleigh-Ritz inside the cluster settles the ordering
    let (values, vectors) = rayleigh_ritz(full, n, vectors)?;
    let residual = dense_residual(full, n, &vectors[0], values[0]);
    Ok(Some(Cluster { values, vectors, residual }))
}

fn rayleigh_ritz<T: Real>(full: &[T], n: usize, basis: Vec<Vec<T>>) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let m = basis.len();
    let images: Vec<Vec<T>> = basis
        .iter()
        .map(|b| (0..n).map(|r| (0..n).map(|c| full[ix(n, r, c)] * b[c]).fold(T::zero(), |s, v| s + v)).collect())
        .collect();
    if m == 1 {
        return Ok((vec![dot(&basis[0], &images[0])], basis));
    }
    let mut small = vec![T::zero(); m * m];
    for i in 0..m {
        for j in 0..m {
            small[ix(m, i, j)] = dot(&basis[i], &images[j]);
        }
    }
    let (vals, w) = eigh(small, m)?;
    let vectors = (0..m)
        .map(|k| {
            let mut v = vec![T::zero(); n];
            for (j, b) in basis.iter().enumerate() {
                crate::scalar::axpy(w[k * m + j], b, &mut v);
            }
            normalize(&mut v);
            v
        })
        .collect();
    Ok((vals, vectors))
}
