//! Expected uncertainty curve of Erdős–Rényi graphs through a radial model:
//! signals constant on each distance shell around the center, with the
//! shell sizes and inter-shell edge counts replaced by their expectations.
//!
//! Shell probabilities `f_d` count the `N - 1` vertices other than the
//! center, so `Σ f_d = 1` in the limit.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::SymOp;
use crate::uncertainty::{Budget, CurveBounds, Domain, PencilProblem};

/// Mass beyond the last shell at which the distribution is cut.
pub const TAIL_CUTOFF: f64 = 1e-7;
/// Most shells tried before giving up on the tail.
pub const MAX_SHELLS: usize = 64;

/// Probabilities `f[d-1] = P(dist(u0, v) = d)` for a uniformly chosen
/// `v ≠ u0`, `d = 1..=d_max`.
#[derive(Clone, Debug)]
pub struct DistanceDistribution<T> {
    pub n: usize,
    pub p: T,
    pub f: Vec<T>,
}

impl<T: Real> DistanceDistribution<T> {
    pub fn d_max(&self) -> usize {
        self.f.len()
    }

    /// `f_d` for `d ≥ 1`; zero past `d_max`.
    pub fn f(&self, d: usize) -> T {
        if d == 0 { T::zero() } else { self.f.get(d - 1).copied().unwrap_or(T::zero()) }
    }
}

/// Branching recursion `f_{d+1} = (1 - Σ_{k≤d} f_k)(1 - (1-p)^{(N-1) f_d})`
/// from `f_1 = p`, cut at the first `d` leaving less than [`TAIL_CUTOFF`].
pub fn distance_distribution<T: Real>(n: usize, p: T) -> Result<DistanceDistribution<T>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::InvalidParameter(format!("edge probability must lie in (0, 1), got {p}")));
    }
    let others = T::from_usize_lossy(n - 1);
    let log_q = (-p).ln_1p();
    let cutoff = T::lit(TAIL_CUTOFF);
    let mut f = vec![p];
    // the remainder is tracked as a product so it stays accurate when tiny
    let mut rest = T::one() - p;
    while rest >= cutoff {
        if f.len() == MAX_SHELLS {
            return Err(Error::TailNotConverged(MAX_SHELLS));
        }
        let last = *f.last().unwrap();
        let miss = (others * last * log_q).exp();
        f.push(rest * (T::one() - miss));
        rest = rest * miss;
    }
    Ok(DistanceDistribution { n, p, f })
}

/// Expected edge counts `M[k] = M_{k,k+1}` between shells `k` and `k+1`,
/// `k = 0..d_max-1`, with shell 0 the center. Negative values from the
/// recurrence are clamped to zero.
pub fn edge_counts<T: Real>(dd: &DistanceDistribution<T>) -> Vec<T> {
    let others = T::from_usize_lossy(dd.n - 1);
    let mut m = Vec::with_capacity(dd.d_max());
    m.push(others * dd.p);
    for k in 1..dd.d_max() {
        let fk = dd.f(k);
        let raw = others * others * dd.p * fk * (T::one() - fk) - m[k - 1];
        if raw < T::zero() {
            log::warn!("expected edge count between shells {k} and {} is negative ({raw}); clamped to 0", k + 1);
        }
        m.push(raw.max(T::zero()));
    }
    m
}

/// Radial quadratic forms on shell profiles `y` of length `d_max + 1`:
/// norm `yᵀHy`, graph spread `yᵀP²y`, spectral spread `yᵀLy`.
#[derive(Clone, Debug)]
pub struct ReducedModel<T> {
    pub h: Vec<T>,
    pub p2: Vec<T>,
    pub l: SymOp<T>,
    pub edge_counts: Vec<T>,
    pub n: usize,
    pub p: T,
}

pub fn reduced_model<T: Real>(dd: &DistanceDistribution<T>) -> Result<ReducedModel<T>> {
    let others = T::from_usize_lossy(dd.n - 1);
    let dim = dd.d_max() + 1;
    let h: Vec<T> = (0..dim).map(|k| if k == 0 { T::one() } else { others * dd.f(k) }).collect();
    if let Some(k) = h.iter().position(|&x| !(x > T::zero())) {
        return Err(Error::InvalidParameter(format!("shell {k} has zero expected size")));
    }
    let p2: Vec<T> = (0..dim).map(|k| T::from_usize_lossy(k * k) * h[k]).collect();
    let m = edge_counts(dd);
    let w: Vec<T> = m.iter().map(|&x| x / (others * dd.p)).collect();
    let mut diag = vec![T::zero(); dim];
    let mut off = Vec::with_capacity(dim - 1);
    for (k, &wk) in w.iter().enumerate() {
        diag[k] = diag[k] + wk;
        diag[k + 1] = diag[k + 1] + wk;
        off.push((k + 1, k, -wk));
    }
    let l = SymOp::from_entries(diag, &off)?;
    Ok(ReducedModel { h, p2, l, edge_counts: m, n: dd.n, p: dd.p })
}

impl<T: Real> ReducedModel<T> {
    pub fn dim(&self) -> usize {
        self.h.len()
    }

    /// The generalized problem turned standard with `z = H^{1/2} y`; its
    /// domain runs from `s = 0` to the impulse at `s = 1`.
    pub fn problem(&self) -> Result<PencilProblem<T>> {
        let r: Vec<T> = self.h.iter().map(|&x| T::one() / x.sqrt()).collect();
        let diag: Vec<T> = (0..self.dim()).map(|i| self.l.get(i, i) * r[i] * r[i]).collect();
        let off: Vec<(usize, usize, T)> =
            (1..self.dim()).map(|i| (i, i - 1, self.l.get(i, i - 1) * r[i] * r[i - 1])).collect();
        let l = SymOp::from_entries(diag, &off)?;
        let p2: Vec<T> = self.p2.iter().zip(&r).map(|(&p, &ri)| p * ri * ri).collect();
        let ground: Vec<T> = self.h.iter().map(|&x| x.sqrt()).collect();
        PencilProblem::new(l, p2, ground, Domain::ToImpulse)
    }

    /// Shell profile `y = H^{-1/2} z` of a vector of the transformed problem,
    /// scaled so that `yᵀHy = 1`.
    pub fn profile(&self, z: &[T]) -> Vec<T> {
        let nz = z.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
        z.iter().zip(&self.h).map(|(&zi, &hi)| zi / (hi.sqrt() * nz)).collect()
    }

    /// Spreads `(s, g)` of a shell profile under the reduced forms.
    pub fn spreads(&self, y: &[T]) -> (T, T) {
        let e: T = y.iter().zip(&self.h).fold(T::zero(), |a, (&yi, &hi)| a + hi * yi * yi);
        let g: T = y.iter().zip(&self.p2).fold(T::zero(), |a, (&yi, &pi)| a + pi * yi * yi);
        (self.l.quad_form(y) / e, g / e)
    }
}

/// Sandwich bounds on the expected curve of `G(n, p)` for `s ∈ [0, 1]`.
pub fn expected_curve<T: Real>(rm: &ReducedModel<T>, budget: &Budget<T>) -> Result<CurveBounds<T>> {
    rm.problem()?.sandwich(budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::erdos_renyi;
    use crate::graph::bfs_hops;

    #[test]
    fn anchors() {
        let dd = distance_distribution(1000, 0.03f64).unwrap();
        assert_eq!(dd.f(1), 0.03);
        let total: f64 = dd.f.iter().sum();
        assert!(total <= 1.0 && 1.0 - total < TAIL_CUTOFF);
        assert!(dd.f.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert_eq!(distance_distribution(1_000_000, 1e-4f64).unwrap().d_max(), 4);
        assert!(matches!(distance_distribution(1000, 1e-9f64), Err(Error::TailNotConverged(_))));
        assert!(distance_distribution(1000, 1.0f64).is_err());
    }

    #[test]
    fn edge_count_recurrence() {
        let dd = distance_distribution(1000, 0.03f64).unwrap();
        let m = edge_counts(&dd);
        assert!((m[0] - 29.97).abs() < 1e-12);
        let m12 = 999.0f64 * 999.0 * 0.03 * 0.03 * 0.97 - 29.97;
        assert!((m[1] - m12).abs() < 1e-9 * m12);
        assert!(m.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn reduced_forms() {
        let dd = distance_distribution(1000, 0.03f64).unwrap();
        let rm = reduced_model(&dd).unwrap();
        let ones = vec![1.0; rm.dim()];
        assert!(rm.l.quad_form(&ones).abs() < 1e-10);
        let mut e0 = vec![0.0; rm.dim()];
        e0[0] = 1.0;
        let (s, g) = rm.spreads(&e0);
        assert!((s - 1.0).abs() < 1e-14 && g == 0.0);
        assert!(rm.h.iter().all(|&x| x > 0.0));
        assert!(rm.dim() <= MAX_SHELLS + 1);
    }

    #[test]
    fn curve_endpoints() {
        let dd = distance_distribution(1000, 0.05f64).unwrap();
        let rm = reduced_model(&dd).unwrap();
        let b = expected_curve(&rm, &Budget::epsilon(1e-6)).unwrap();
        let first = &b.knots[0];
        let hsum: f64 = rm.h.iter().sum();
        let g0: f64 = rm.p2.iter().sum::<f64>() / hsum;
        assert!(first.s == 0.0 && (first.g - g0).abs() < 1e-12);
        let last = b.knots.last().unwrap();
        assert!((last.s - 1.0).abs() < 1e-14 && last.g.abs() < 1e-14);
        let y = rm.profile(&last.vector);
        assert!((y[0] - 1.0).abs() < 1e-14);
        // decreasing and convex
        assert!(b.knots.windows(2).all(|w| w[1].g <= w[0].g + 1e-12));
        assert!(CurveBounds::convexity_defect(&b.upper) <= 1e-12);
    }

    /// Shell histogram and inter-shell edge counts around vertex 0 of sampled
    /// graphs against the recursion.
    #[test]
    fn shells_match_sampling() {
        let (n, p, samples) = (1000usize, 0.03, 200u64);
        let dd = distance_distribution(n, p).unwrap();
        let mut sums = vec![0.0f64; dd.d_max() + 2];
        let mut sq = vec![0.0f64; dd.d_max() + 2];
        let mut edge = vec![0.0f64; 3];
        for seed in 0..samples {
            let g = erdos_renyi(n, p, seed).unwrap();
            let hops = bfs_hops(&g, 0);
            let mut count = vec![0.0f64; sums.len()];
            for h in hops.iter().flatten() {
                if *h > 0 && *h < count.len() {
                    count[*h] += 1.0;
                }
            }
            for &(u, v) in g.edges() {
                if let (Some(a), Some(b)) = (hops[u], hops[v]) {
                    let k = a.min(b);
                    if a != b && k < edge.len() {
                        edge[k] += 1.0 / samples as f64;
                    }
                }
            }
            for d in 1..count.len() {
                let x = count[d] / (n - 1) as f64;
                sums[d] += x;
                sq[d] += x * x;
            }
        }
        for d in 1..=dd.d_max() {
            let mean = sums[d] / samples as f64;
            let var = (sq[d] / samples as f64 - mean * mean).max(0.0);
            let se = (var / samples as f64).sqrt();
            let diff = (mean - dd.f(d)).abs();
            assert!(diff <= 3.0 * se, "d={d}: sample {mean} model {} se {se}", dd.f(d));
        }
        let m = edge_counts(&dd);
        for k in 0..3 {
            assert!((edge[k] - m[k]).abs() <= 0.05 * m[k], "k={k}: sample {} model {}", edge[k], m[k]);
        }
    }
}
