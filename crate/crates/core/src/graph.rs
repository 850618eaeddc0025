//! Undirected simple graphs, edge-list interchange and hop distances.

use std::collections::{BTreeSet, VecDeque};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Immutable undirected simple graph.
///
/// Adjacency is kept in compressed sparse row form with sorted neighbor
/// lists; `edges` holds every edge once as `(u, v)` with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an edge iterator. Duplicates (in either
    /// orientation) are collapsed; self-loops are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
            if u == v {
                return Err(Error::SelfLoop { line: 0, vertex: u });
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self::from_sorted_unique(n, set.into_iter().collect()))
    }

    fn from_sorted_unique(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut deg = vec![0usize; n];
        for &(u, v) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; offsets[n]];
        for &(u, v) in &edges {
            neighbors[fill[u]] = v;
            fill[u] += 1;
            neighbors[fill[v]] = u;
            fill[v] += 1;
        }
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Graph { n, edges, offsets, neighbors }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// BFS from vertex 0 reaches every vertex.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        bfs_hops(self, 0).iter().all(Option::is_some)
    }

    /// Parses the whitespace-separated, 0-based edge-list format.
    ///
    /// Each non-comment line holds exactly two vertex ids. Lines whose first
    /// non-blank character is `#` and blank lines are skipped. The vertex
    /// count is one more than the largest id seen.
    pub fn from_edge_list<R: BufRead>(reader: R) -> Result<ParsedEdgeList> {
        let mut pairs = Vec::new();
        let mut max_id = None::<usize>;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let mut tokens = body.split_whitespace();
            let mut next_id = |what: &str| -> Result<usize> {
                let tok = tokens.next().ok_or_else(|| Error::Parse {
                    line: lineno,
                    msg: format!("missing {what} vertex"),
                })?;
                tok.parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("malformed vertex id {tok:?}"),
                })
            };
            let u = next_id("first")?;
            let v = next_id("second")?;
            if let Some(extra) = tokens.next() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("unexpected token {extra:?}"),
                });
            }
            if u == v {
                return Err(Error::SelfLoop { line: lineno, vertex: u });
            }
            max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
            pairs.push((lineno, u.min(v), u.max(v)));
        }
        let n = match max_id {
            Some(m) => m + 1,
            None => return Err(Error::InvalidParameter("edge list contains no edges".into())),
        };
        let mut seen = BTreeSet::new();
        let mut duplicates = Vec::new();
        for (lineno, u, v) in pairs {
            if !seen.insert((u, v)) {
                log::warn!("line {lineno}: duplicate edge {u}-{v} ignored");
                duplicates.push(DuplicateEdge { line: lineno, u, v });
            }
        }
        Ok(ParsedEdgeList {
            graph: Graph::from_sorted_unique(n, seen.into_iter().collect()),
            duplicates,
        })
    }

    /// Writes the edge list: a comment header followed by one `u v` line per
    /// edge in ascending order.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# {} vertices, {} edges", self.n, self.edges.len())?;
        for &(u, v) in &self.edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DuplicateEdge {
    pub line: usize,
    pub u: usize,
    pub v: usize,
}

#[derive(Clone, Debug)]
pub struct ParsedEdgeList {
    pub graph: Graph,
    /// Repeated edges that were dropped, in input order.
    pub duplicates: Vec<DuplicateEdge>,
}

pub(crate) fn bfs_hops(g: &Graph, src: usize) -> Vec<Option<usize>> {
    let mut hops = vec![None; g.n];
    let mut queue = VecDeque::new();
    hops[src] = Some(0);
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        let next = hops[u].unwrap() + 1;
        for &v in g.neighbors(u) {
            if hops[v].is_none() {
                hops[v] = Some(next);
                queue.push_back(v);
            }
        }
    }
    hops
}

/// Distances from a center vertex under some semi-metric.
///
/// The diagonal of the distance matrix used by the graph spread.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceVector<T> {
    center: usize,
    dist: Vec<T>,
    eccentricity: T,
}

impl<T: Real> DistanceVector<T> {
    /// Validates the semi-metric requirements: zero exactly at the center,
    /// strictly positive and finite elsewhere.
    pub fn new(center: usize, dist: Vec<T>) -> Result<Self> {
        let n = dist.len();
        if center >= n {
            return Err(Error::VertexOutOfRange { vertex: center, n });
        }
        for (v, &d) in dist.iter().enumerate() {
            let ok = d.is_finite() && if v == center { d == T::zero() } else { d > T::zero() };
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "distance to vertex {v} is {d}; need 0 at the center and > 0 elsewhere"
                )));
            }
        }
        let eccentricity = dist.iter().copied().fold(T::zero(), T::max);
        Ok(Self { center, dist, eccentricity })
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn as_slice(&self) -> &[T] {
        &self.dist
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn eccentricity(&self) -> T {
        self.eccentricity
    }

    /// Squared distances, the diagonal of `P²`.
    pub fn squared(&self) -> Vec<T> {
        self.dist.iter().map(|&d| d * d).collect()
    }
}

/// Hop-count (shortest path) distances from `u0`.
pub fn geodesic_distances<T: Real>(g: &Graph, u0: usize) -> Result<DistanceVector<T>> {
    if u0 >= g.n {
        return Err(Error::VertexOutOfRange { vertex: u0, n: g.n });
    }
    let hops = bfs_hops(g, u0);
    let mut dist = Vec::with_capacity(g.n);
    for (v, h) in hops.into_iter().enumerate() {
        match h {
            Some(h) => dist.push(T::from_usize_lossy(h)),
            None => return Err(Error::Disconnected { from: u0, vertex: v }),
        }
    }
    DistanceVector::new(u0, dist)
}

/// A vertex semi-metric. Only the geodesic metric ships with the crate.
pub trait Metric {
    fn distances<T: Real>(&self, g: &Graph, u0: usize) -> Result<DistanceVector<T>>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Geodesic;

impl Metric for Geodesic {
    fn distances<T: Real>(&self, g: &Graph, u0: usize) -> Result<DistanceVector<T>> {
        geodesic_distances(g, u0)
    }
}
