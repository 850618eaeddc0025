use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sparse symmetric operator: an explicit diagonal plus the strictly lower
/// triangle in compressed rows. Symmetry holds by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymOp<T> {
    n: usize,
    diag: Vec<T>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> SymOp<T> {
    pub fn from_diagonal(diag: Vec<T>) -> Self {
        let n = diag.len();
        SymOp { n, diag, row_ptr: vec![0; n + 1], cols: Vec::new(), vals: Vec::new() }
    }

    /// Builds from a diagonal and off-diagonal entries `(i, j, a)`; each
    /// unordered pair may appear once in either orientation. Repeats are summed.
    pub fn from_entries(diag: Vec<T>, entries: &[(usize, usize, T)]) -> Result<Self> {
        let n = diag.len();
        let mut lower: Vec<(usize, usize, T)> = Vec::with_capacity(entries.len());
        for &(i, j, a) in entries {
            if i >= n || j >= n {
                return Err(Error::VertexOutOfRange { vertex: i.max(j), n });
            }
            if i == j {
                return Err(Error::InvalidParameter(format!("entry ({i}, {i}) belongs on the diagonal")));
            }
            lower.push((i.max(j), i.min(j), a));
        }
        lower.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(lower.len());
        let mut vals: Vec<T> = Vec::with_capacity(lower.len());
        let mut last = None;
        for (r, c, a) in lower {
            if last == Some((r, c)) {
                let v = vals.last_mut().unwrap();
                *v = *v + a;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(a);
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(SymOp { n, diag, row_ptr, cols, vals })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diag
    }

    /// Number of stored strictly-lower entries.
    pub fn n_offdiag(&self) -> usize {
        self.vals.len()
    }

    pub fn is_diagonal(&self) -> bool {
        self.vals.iter().all(|v| *v == T::zero())
    }

    /// Strictly lower entries of row `r` as `(column, value)`.
    pub fn lower_row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i == j {
            return self.diag[i];
        }
        let (r, c) = (i.max(j), i.min(j));
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => T::zero(),
        }
    }

    /// `y = A x`
    pub fn apply(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            y[i] = self.diag[i] * x[i];
        }
        for r in 0..self.n {
            let mut acc = T::zero();
            let xr = x[r];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let (c, a) = (self.cols[k], self.vals[k]);
                acc = acc + a * x[c];
                y[c] = y[c] + a * xr;
            }
            y[r] = y[r] + acc;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        self.apply(x, &mut y);
        y
    }

    /// `xᵀ A x`
    pub fn quad_form(&self, x: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            acc = acc + self.diag[i] * x[i] * x[i];
        }
        let two = T::lit(2.0);
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc = acc + two * self.vals[k] * x[r] * x[self.cols[k]];
            }
        }
        acc
    }

    /// `a·self + b·other`, on the union of both sparsity patterns.
    pub fn combine(&self, a: T, other: &SymOp<T>, b: T) -> Result<SymOp<T>> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let n = self.n;
        let diag = self.diag.iter().zip(&other.diag).map(|(&x, &y)| a * x + b * y).collect();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::with_capacity(self.vals.len().max(other.vals.len()));
        let mut vals = Vec::with_capacity(cols.capacity());
        for r in 0..n {
            let (mut p, pe) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let (mut q, qe) = (other.row_ptr[r], other.row_ptr[r + 1]);
            while p < pe || q < qe {
                let cp = if p < pe { self.cols[p] } else { usize::MAX };
                let cq = if q < qe { other.cols[q] } else { usize::MAX };
                if cp == cq {
                    cols.push(cp);
                    vals.push(a * self.vals[p] + b * other.vals[q]);
                    p += 1;
                    q += 1;
                } else if cp < cq {
                    cols.push(cp);
                    vals.push(a * self.vals[p]);
                    p += 1;
                } else {
                    cols.push(cq);
                    vals.push(b * other.vals[q]);
                    q += 1;
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(SymOp { n, diag, row_ptr, cols, vals })
    }

    pub fn scaled(&self, a: T) -> SymOp<T> {
        SymOp {
            n: self.n,
            diag: self.diag.iter().map(|&x| a * x).collect(),
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            vals: self.vals.iter().map(|&x| a * x).collect(),
        }
    }

    /// Maximum absolute row sum, an upper bound on the spectral radius.
    pub fn inf_norm(&self) -> T {
        let mut rows: Vec<T> = self.diag.iter().map(|d| d.abs()).collect();
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let a = self.vals[k].abs();
                rows[r] = rows[r] + a;
                rows[self.cols[k]] = rows[self.cols[k]] + a;
            }
        }
        rows.into_iter().fold(T::zero(), T::max)
    }

    /// Dense copy, column-major `n × n`.
    pub fn to_dense(&self) -> Vec<T> {
        let n = self.n;
        let mut a = vec![T::zero(); n * n];
        for i in 0..n {
            a[i * n + i] = self.diag[i];
        }
        for r in 0..n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                a[c * n + r] = self.vals[k];
                a[r * n + c] = self.vals[k];
            }
        }
        a
    }

    /// Projected operator `Bᵀ A B` for a column set `B`, dense row-major.
    pub fn project(&self, basis: &[Vec<T>]) -> Vec<T> {
        let m = basis.len();
        let images: Vec<Vec<T>> = basis.iter().map(|b| self.mul_vec(b)).collect();
        let mut out = vec![T::zero(); m * m];
        for i in 0..m {
            for j in 0..=i {
                let v = crate::scalar::dot(&basis[i], &images[j]);
                out[i * m + j] = v;
                out[j * m + i] = v;
            }
        }
        out
    }
}
