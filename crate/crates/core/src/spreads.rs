//! Graph spread, spectral spread and normalized variation of a signal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DistanceVector, Graph, Metric};
use crate::scalar::{dot, Real};
use crate::spectral::SymOp;

/// Coordinates of a signal in the spectral/graph spread plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadPoint<T> {
    pub s: T,
    pub g: T,
}

fn energy<T: Real>(x: &[T]) -> Result<T> {
    let e = dot(x, x);
    if e > T::zero() {
        Ok(e)
    } else {
        Err(Error::ZeroSignal)
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `Σ d(u0,v)² x(v)² / ‖x‖²`
pub fn graph_spread<T: Real>(x: &[T], d: &DistanceVector<T>) -> Result<T> {
    check_len(d.len(), x.len())?;
    let e = energy(x)?;
    let acc = x.iter().zip(d.as_slice()).fold(T::zero(), |acc, (&xi, &di)| acc + di * di * xi * xi);
    Ok(acc / e)
}

/// `xᵀ L x / ‖x‖²`
pub fn spectral_spread<T: Real>(x: &[T], l: &SymOp<T>) -> Result<T> {
    check_len(l.dim(), x.len())?;
    let e = energy(x)?;
    Ok(l.quad_form(x) / e)
}

/// Edge form of the spectral spread:
/// `Σ_{u~v} (x(u)/√deg u − x(v)/√deg v)² / ‖x‖²`.
pub fn normalized_variation<T: Real>(x: &[T], g: &Graph) -> Result<T> {
    check_len(g.n_vertices(), x.len())?;
    let e = energy(x)?;
    let scaled: Vec<T> = (0..g.n_vertices())
        .map(|v| x[v] / T::from_usize_lossy(g.degree(v).max(1)).sqrt())
        .collect();
    let acc = g.edges().iter().fold(T::zero(), |acc, &(u, v)| {
        let d = scaled[u] - scaled[v];
        acc + d * d
    });
    Ok(acc / e)
}

pub fn spread_point<T: Real>(x: &[T], l: &SymOp<T>, d: &DistanceVector<T>) -> Result<SpreadPoint<T>> {
    Ok(SpreadPoint { s: spectral_spread(x, l)?, g: graph_spread(x, d)? })
}

/// Graph spread minimized over all centers; ties go to the lowest vertex id.
pub fn global_graph_spread<T: Real, M: Metric>(x: &[T], g: &Graph, metric: &M) -> Result<(T, usize)> {
    check_len(g.n_vertices(), x.len())?;
    energy(x)?;
    let mut best: Option<(T, usize)> = None;
    for u in 0..g.n_vertices() {
        let d = metric.distances::<T>(g, u)?;
        let v = graph_spread(x, &d)?;
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, u));
        }
    }
    Ok(best.expect("graph has at least one vertex"))
}
