//! Deterministic graph generators addressable by short spec strings.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Attempts allowed for generators that must reject disconnected samples.
pub const MAX_CONNECT_ATTEMPTS: u64 = 100;

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSpec {
    Cycle(usize),
    Complete(usize),
    /// Hub is vertex 0.
    Star(usize),
    ErdosRenyi { n: usize, p: f64 },
    Geometric { n: usize, radius: f64 },
    SmallWorld { n: usize, k: usize, beta: f64 },
    Grid { width: usize, height: usize },
}

impl GraphSpec {
    pub fn family(&self) -> &'static str {
        match self {
            GraphSpec::Cycle(_) => "cycle",
            GraphSpec::Complete(_) => "complete",
            GraphSpec::Star(_) => "star",
            GraphSpec::ErdosRenyi { .. } => "er",
            GraphSpec::Geometric { .. } => "geometric",
            GraphSpec::SmallWorld { .. } => "smallworld",
            GraphSpec::Grid { .. } => "grid",
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(
            self,
            GraphSpec::ErdosRenyi { .. } | GraphSpec::Geometric { .. } | GraphSpec::SmallWorld { .. }
        )
    }

    /// Builds the graph. `seed` is ignored by deterministic families.
    pub fn generate(&self, seed: u64) -> Result<Graph> {
        match *self {
            GraphSpec::Cycle(n) => cycle(n),
            GraphSpec::Complete(n) => complete(n),
            GraphSpec::Star(n) => star(n),
            GraphSpec::ErdosRenyi { n, p } => erdos_renyi(n, p, seed),
            GraphSpec::Geometric { n, radius } => geometric(n, radius, seed),
            GraphSpec::SmallWorld { n, k, beta } => small_world(n, k, beta, seed),
            GraphSpec::Grid { width, height } => grid(width, height),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Cycle(n) => write!(f, "cycle:{n}"),
            GraphSpec::Complete(n) => write!(f, "complete:{n}"),
            GraphSpec::Star(n) => write!(f, "star:{n}"),
            GraphSpec::ErdosRenyi { n, p } => write!(f, "er:{n}:{p}"),
            GraphSpec::Geometric { n, radius } => write!(f, "geometric:{n}:{radius}"),
            GraphSpec::SmallWorld { n, k, beta } => write!(f, "smallworld:{n}:{k}:{beta}"),
            GraphSpec::Grid { width, height } => write!(f, "grid:{width}:{height}"),
        }
    }
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::InvalidParameter(format!("unrecognized generator {s:?}"));
        let int = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let real = |t: &str| t.parse::<f64>().map_err(|_| bad());
        let spec = match parts.as_slice() {
            ["cycle", n] => GraphSpec::Cycle(int(n)?),
            ["complete", n] => GraphSpec::Complete(int(n)?),
            ["star", n] => GraphSpec::Star(int(n)?),
            ["er", n, p] => GraphSpec::ErdosRenyi { n: int(n)?, p: real(p)? },
            ["geometric", n, r] => GraphSpec::Geometric { n: int(n)?, radius: real(r)? },
            ["smallworld", n, k, b] => GraphSpec::SmallWorld { n: int(n)?, k: int(k)?, beta: real(b)? },
            ["grid", w, h] => GraphSpec::Grid { width: int(w)?, height: int(h)? },
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

fn derived_seed(seed: u64, attempt: u64) -> u64 {
    // splitmix64 finalizer over (seed, attempt)
    let mut z = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn cycle(n: usize) -> Result<Graph> {
    require(n >= 3, || format!("cycle needs at least 3 vertices, got {n}"))?;
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn complete(n: usize) -> Result<Graph> {
    require(n >= 2, || format!("complete graph needs at least 2 vertices, got {n}"))?;
    Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

pub fn star(n: usize) -> Result<Graph> {
    require(n >= 2, || format!("star needs at least 2 vertices, got {n}"))?;
    Graph::from_edges(n, (1..n).map(|i| (0, i)))
}

pub fn grid(width: usize, height: usize) -> Result<Graph> {
    require(width >= 1 && height >= 1 && width * height >= 2, || {
        format!("grid {width}x{height} needs at least 2 vertices")
    })?;
    let id = |x: usize, y: usize| y * width + x;
    let mut edges = Vec::new();
    for y in 0..height {
        for x in 0..width {
            if x + 1 < width {
                edges.push((id(x, y), id(x + 1, y)));
            }
            if y + 1 < height {
                edges.push((id(x, y), id(x, y + 1)));
            }
        }
    }
    Graph::from_edges(width * height, edges)
}

/// G(n, p). The result may be disconnected; callers decide what to do.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    require(n >= 2, || format!("er needs at least 2 vertices, got {n}"))?;
    require(p > 0.0 && p <= 1.0, || format!("er edge probability must be in (0, 1], got {p}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Random geometric graph on the unit square, resampled until connected.
pub fn geometric(n: usize, radius: f64, seed: u64) -> Result<Graph> {
    require(n >= 2, || format!("geometric needs at least 2 vertices, got {n}"))?;
    require(radius > 0.0 && radius.is_finite(), || format!("radius must be positive, got {radius}"))?;
    let r2 = radius * radius;
    for attempt in 0..MAX_CONNECT_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(seed, attempt));
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                if dx * dx + dy * dy <= r2 {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(n, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::InvalidParameter(format!(
        "geometric:{n}:{radius} stayed disconnected after {MAX_CONNECT_ATTEMPTS} attempts"
    )))
}

/// Watts-Strogatz ring: each vertex joined to `k` neighbors on each side,
/// then each lattice edge rewired with probability `beta`. Resampled until
/// connected.
pub fn small_world(n: usize, k: usize, beta: f64, seed: u64) -> Result<Graph> {
    require(k >= 1 && n > 2 * k, || format!("smallworld needs 1 <= k and n > 2k, got n={n}, k={k}"))?;
    require((0.0..=1.0).contains(&beta), || format!("rewiring probability must be in [0, 1], got {beta}"))?;
    for attempt in 0..MAX_CONNECT_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(seed, attempt));
        let mut adj: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); n];
        for i in 0..n {
            for j in 1..=k {
                let v = (i + j) % n;
                adj[i].insert(v);
                adj[v].insert(i);
            }
        }
        for j in 1..=k {
            for i in 0..n {
                let v = (i + j) % n;
                if !adj[i].contains(&v) || rng.random::<f64>() >= beta {
                    continue;
                }
                if adj[i].len() >= n - 1 {
                    continue;
                }
                let w = loop {
                    let w = rng.random_range(0..n);
                    if w != i && !adj[i].contains(&w) {
                        break w;
                    }
                };
                adj[i].remove(&v);
                adj[v].remove(&i);
                adj[i].insert(w);
                adj[w].insert(i);
            }
        }
        let edges = adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| u < v).map(move |&v| (u, v)));
        let g = Graph::from_edges(n, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::InvalidParameter(format!(
        "smallworld:{n}:{k}:{beta} stayed disconnected after {MAX_CONNECT_ATTEMPTS} attempts"
    )))
}
