//! Sandwich refinement of the uncertainty curve between chord (upper) and
//! supporting-line (lower) bounds.

use rayon::prelude::*;

use super::bounds::{lower_polyline, CurveBounds, CurveKnot};
use super::hausdorff::segment_to_polyline_reach;
use super::{CurvePoint, Domain, PencilProblem};
use crate::error::{Error, Result};
use crate::scalar::{axpy, normalize, Real};

/// Hard ceiling on solves for epsilon-driven runs.
const SOLVE_CEILING: usize = 200_000;

/// Stopping rule for [`PencilProblem::sandwich`].
///
/// With `rounds`, every open segment is refined once per round, so `r`
/// rounds cost `2^r + 1` solves (the first round places the impulse knot
/// when it lies inside the domain). Otherwise the segment with the largest
/// gap contribution is refined until the gap is at most `epsilon`
/// (default `1e-6·W`). `max_solves` caps either mode.
#[derive(Clone, Debug, Default)]
pub struct Budget<T> {
    pub epsilon: Option<T>,
    pub max_solves: Option<usize>,
    pub rounds: Option<u32>,
}

impl<T: Real> Budget<T> {
    pub fn epsilon(eps: T) -> Self {
        Budget { epsilon: Some(eps), max_solves: None, rounds: None }
    }

    pub fn rounds(r: u32) -> Self {
        Budget { epsilon: None, max_solves: None, rounds: Some(r) }
    }

    pub fn solves(n: usize) -> Self {
        Budget { epsilon: Some(T::zero()), max_solves: Some(n), rounds: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Segment {
    Open,
    /// Both ends come from one degenerate eigenspace; the chord is on the curve.
    Degenerate,
    /// The chord slope's supporting line passes through both ends.
    Supporting,
}

/// Answer to a single-abscissa query.
#[derive(Clone, Debug)]
pub struct PointQuery<T> {
    pub s: T,
    /// `lower ≤ γ(s) ≤ upper`.
    pub lower: T,
    pub upper: T,
    /// Unit vector with spreads `achieved_s`, `achieved_g`.
    pub vector: Vec<T>,
    pub achieved_s: T,
    pub achieved_g: T,
    pub solves: usize,
}

struct Engine<'a, T: Real> {
    prob: &'a PencilProblem<T>,
    knots: Vec<CurveKnot<T>>,
    kind: Vec<Segment>,
    solves: usize,
    history: Vec<(usize, T)>,
    lambda_max: T,
    impulse_pending: bool,
}

impl<'a, T: Real> Engine<'a, T> {
    fn new(prob: &'a PencilProblem<T>) -> Result<Self> {
        let left = prob.left_endpoint();
        let (lambda_max, right) = prob.right_endpoint()?;
        let impulse = prob.impulse_knot();
        let (knots, impulse_pending) = match prob.domain() {
            Domain::Full => (vec![left, right], impulse.s > T::zero() && impulse.s < lambda_max),
            Domain::ToImpulse => (vec![left, impulse], false),
        };
        Ok(Engine { prob, knots, kind: vec![Segment::Open], solves: 2, history: Vec::new(), lambda_max, impulse_pending })
    }

    fn insert_impulse(&mut self) {
        let k = self.prob.impulse_knot();
        let i = self.knots.iter().position(|x| x.s > k.s).expect("impulse inside the domain") - 1;
        self.knots.insert(i + 1, k);
        self.kind.insert(i + 1, Segment::Open);
        self.solves += 1;
        self.impulse_pending = false;
    }

    fn chord_alpha(&self, i: usize) -> Option<T> {
        if self.kind[i] != Segment::Open {
            return None;
        }
        let (a, b) = (&self.knots[i], &self.knots[i + 1]);
        let ds = b.s - a.s;
        if ds <= T::zero() {
            return None;
        }
        Some((b.g - a.g) / ds)
    }

    fn warm_start(&self, i: usize) -> Option<Vec<T>> {
        if self.prob.dim() <= self.prob.options().dense_threshold {
            return None;
        }
        let mut v = self.knots[i].vector.clone();
        axpy(T::one(), &self.knots[i + 1].vector, &mut v);
        (normalize(&mut v) > T::zero()).then_some(v)
    }

    fn evaluate(&self, i: usize, alpha: T) -> Result<CurvePoint<T>> {
        let start = self.warm_start(i);
        self.prob.curve_point_from(alpha, start.as_deref())
    }

    /// Splices the knots of `cp` into segment `i`; returns how many were added.
    fn apply(&mut self, i: usize, cp: CurvePoint<T>) -> usize {
        self.solves += 1;
        let (a, b) = (&self.knots[i], &self.knots[i + 1]);
        let chord_q = a.g - cp.alpha * a.s;
        let tol_q = T::lit(4.0) * self.prob.options().tol * cp.scale.max(T::one());
        if cp.q >= chord_q - tol_q {
            self.kind[i] = Segment::Supporting;
            return 0;
        }
        let width = b.s - a.s;
        let margin = T::lit(1e-12) * width.max(T::epsilon());
        let fresh: Vec<CurveKnot<T>> = cp
            .knots
            .into_iter()
            .filter(|k| k.s > a.s + margin && k.s < b.s - margin)
            .map(|mut k| {
                // keep tiny eigen-solver noise from breaking the ordering
                k.s = k.s.max(a.s).min(b.s);
                k
            })
            .collect();
        if fresh.is_empty() {
            self.kind[i] = Segment::Supporting;
            return 0;
        }
        let added = fresh.len();
        let mut kinds = vec![Segment::Open];
        if added == 2 {
            kinds.push(Segment::Degenerate);
        }
        kinds.push(Segment::Open);
        self.kind.splice(i..=i, kinds);
        self.knots.splice(i + 1..i + 1, fresh);
        added
    }

    fn lower(&self) -> Vec<[T; 2]> {
        lower_polyline(&self.knots, &self.exact_flags())
    }

    fn exact_flags(&self) -> Vec<bool> {
        self.kind.iter().map(|k| *k != Segment::Open).collect()
    }

    /// Per-segment distance from the chord to the lower polyline, with the
    /// reach of each evaluation (see [`segment_to_polyline_reach`]).
    fn contributions(&self) -> (Vec<T>, Vec<T>) {
        let lower = self.lower();
        self.knots.windows(2).map(|w| segment_to_polyline_reach(w[0].point(), w[1].point(), &lower)).unzip()
    }

    fn record_gap(&mut self) -> (Vec<T>, Vec<T>) {
        let c = self.contributions();
        self.push_history(&c.0);
        c
    }

    fn push_history(&mut self, contrib: &[T]) {
        let gap = contrib.iter().copied().fold(T::zero(), T::max);
        self.history.push((self.solves, gap));
    }

    fn run_rounds(&mut self, rounds: u32, max_solves: usize) -> Result<()> {
        for r in 0..rounds {
            if self.solves >= max_solves {
                break;
            }
            if r == 0 && self.impulse_pending {
                self.insert_impulse();
                self.record_gap();
                continue;
            }
            let mut jobs: Vec<(usize, T)> =
                (0..self.kind.len()).filter_map(|i| self.chord_alpha(i).map(|a| (i, a))).collect();
            if jobs.is_empty() {
                break;
            }
            jobs.truncate(max_solves - self.solves);
            let results: Vec<Result<CurvePoint<T>>> =
                jobs.par_iter().map(|&(i, alpha)| self.evaluate(i, alpha)).collect();
            // splice right to left so earlier indices stay valid
            for (&(i, _), res) in jobs.iter().zip(results).rev() {
                self.apply(i, res?);
            }
            self.record_gap();
        }
        Ok(())
    }

    fn run_greedy(&mut self, epsilon: T, max_solves: usize) -> Result<()> {
        let (mut contrib, mut reach) = self.record_gap();
        loop {
            let gap = contrib.iter().copied().fold(T::zero(), T::max);
            if gap <= epsilon || self.solves >= max_solves {
                return Ok(());
            }
            if self.impulse_pending {
                self.insert_impulse();
                (contrib, reach) = self.record_gap();
                continue;
            }
            let pick = (0..self.kind.len())
                .filter(|&i| self.kind[i] == Segment::Open)
                .max_by(|&x, &y| contrib[x].partial_cmp(&contrib[y]).unwrap_or(std::cmp::Ordering::Equal));
            let Some(i) = pick else { return Ok(()) };
            let alpha = self.chord_alpha(i).expect("open segment has a chord");
            let cp = self.evaluate(i, alpha)?;
            let added = self.apply(i, cp);
            // only segments whose evaluation window meets the changed stretch
            // of the lower bound need recomputing
            contrib.splice(i..=i, std::iter::repeat_n(T::infinity(), added + 1));
            reach.splice(i..=i, std::iter::repeat_n(T::infinity(), added + 1));
            let (lo, hi) = (self.knots[i].s, self.knots[i + added + 1].s);
            let lower = self.lower();
            for j in 0..contrib.len() {
                let (a, b) = (self.knots[j].point(), self.knots[j + 1].point());
                if (i..=i + added).contains(&j) || (a[0] - reach[j] <= hi && b[0] + reach[j] >= lo) {
                    (contrib[j], reach[j]) = segment_to_polyline_reach(a, b, &lower);
                }
            }
            self.push_history(&contrib);
        }
    }

    fn finish(self) -> CurveBounds<T> {
        let exact = self.exact_flags();
        CurveBounds::assemble(self.knots, exact, self.solves, self.history, self.lambda_max)
    }

    fn point_query(mut self, s: T, epsilon: T, max_solves: usize) -> Result<PointQuery<T>> {
        let (lo, hi) = (self.knots[0].s, self.knots.last().unwrap().s);
        let slack = T::lit(1e-12) * hi.abs().max(T::one());
        if !(s >= lo - slack && s <= hi + slack) {
            return Err(Error::OutOfRange { what: "s", value: s.to_f64_lossy(), lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
        }
        let s = s.max(lo).min(hi);
        if self.impulse_pending {
            self.insert_impulse();
        }
        loop {
            if let Some(k) = self.knots.iter().find(|k| k.s == s) {
                return Ok(self.answer_at_knot(s, k.clone()));
            }
            let i = self.knots.iter().position(|k| k.s > s).unwrap() - 1;
            let (a, b) = (&self.knots[i], &self.knots[i + 1]);
            let t = (s - a.s) / (b.s - a.s);
            let upper = a.g + t * (b.g - a.g);
            if self.kind[i] == Segment::Degenerate {
                let v = self.mix_degenerate(a, b, s);
                let (vs, vg) = self.prob.spreads_of(&v);
                return Ok(PointQuery { s, lower: upper, upper, vector: v, achieved_s: vs, achieved_g: vg, solves: self.solves });
            }
            let lower = self.segment_lower(i, s);
            let nearest = if a.g <= b.g { a.clone() } else { b.clone() };
            if self.kind[i] == Segment::Supporting && (nearest.s - s).abs() > epsilon {
                if let Some(q) = self.supporting_bisect(i, s, epsilon, lower, upper, max_solves)? {
                    return Ok(q);
                }
            }
            let close = (nearest.s - s).abs() <= epsilon;
            if (upper - lower <= epsilon && close) || self.kind[i] == Segment::Supporting || self.solves >= max_solves {
                if !(upper - lower <= epsilon && close) && self.kind[i] == Segment::Open {
                    return Err(Error::NonConvergence {
                        iterations: self.solves,
                        best_residual: (upper - lower).to_f64_lossy(),
                    });
                }
                let k = nearest;
                return Ok(PointQuery {
                    s,
                    lower,
                    upper,
                    achieved_s: k.s,
                    achieved_g: k.g,
                    vector: k.vector,
                    solves: self.solves,
                });
            }
            let alpha = self.chord_alpha(i).expect("open segment");
            let cp = self.evaluate(i, alpha)?;
            self.apply(i, cp);
        }
    }

    /// On a segment whose chord is numerically on the curve, the eigenvalue
    /// no longer separates the knots but the eigenvectors still do: bisect
    /// the pencil parameter until the achieved `s` is close enough.
    fn supporting_bisect(&mut self, i: usize, s: T, epsilon: T, lower: T, upper: T, max_solves: usize) -> Result<Option<PointQuery<T>>> {
        let (a, b) = (self.knots[i].clone(), self.knots[i + 1].clone());
        if !a.alpha.is_finite() || !b.alpha.is_finite() {
            return Ok(None);
        }
        let (mut lo, mut hi) = (a, b);
        let mut best = if (lo.s - s).abs() <= (hi.s - s).abs() { lo.clone() } else { hi.clone() };
        while (best.s - s).abs() > epsilon && self.solves < max_solves {
            let mid = (lo.alpha + hi.alpha) / T::lit(2.0);
            if !(mid != lo.alpha && mid != hi.alpha) {
                break;
            }
            let cp = self.prob.curve_point(mid)?;
            self.solves += 1;
            let k = cp.knots.into_iter().min_by(|x, y| (x.s - s).abs().partial_cmp(&(y.s - s).abs()).unwrap()).unwrap();
            if (k.s - s).abs() < (best.s - s).abs() {
                best = k.clone();
            }
            if (k.s - s) * (lo.s - s) > T::zero() {
                lo = k;
            } else {
                hi = k;
            }
        }
        if (best.s - s).abs() > epsilon {
            return Ok(None);
        }
        Ok(Some(PointQuery { s, lower, upper, achieved_s: best.s, achieved_g: best.g, vector: best.vector, solves: self.solves }))
    }

    fn answer_at_knot(&self, s: T, k: CurveKnot<T>) -> PointQuery<T> {
        PointQuery { s, lower: k.g, upper: k.g, achieved_s: k.s, achieved_g: k.g, vector: k.vector, solves: self.solves }
    }

    /// Lower bound at `s` inside segment `i`.
    fn segment_lower(&self, i: usize, s: T) -> T {
        let poly = lower_polyline(&self.knots[i..i + 2], &[self.kind[i] != Segment::Open]);
        let mut best = T::neg_infinity();
        for w in poly.windows(2) {
            let (p, q) = (w[0], w[1]);
            if s < p[0] || s > q[0] {
                continue;
            }
            let v = if q[0] == p[0] { p[1].max(q[1]) } else { p[1] + (q[1] - p[1]) * (s - p[0]) / (q[0] - p[0]) };
            best = best.max(v);
        }
        best
    }

    /// Unit vector in the span of a degenerate pair with spectral spread `s`.
    /// The pair diagonalizes the spectral operator on its span, so the spread
    /// of `cos φ·a + sin φ·b` is `cos²φ·s_a + sin²φ·s_b`.
    fn mix_degenerate(&self, a: &CurveKnot<T>, b: &CurveKnot<T>, s: T) -> Vec<T> {
        let w = ((s - a.s) / (b.s - a.s)).max(T::zero()).min(T::one());
        let mut v = a.vector.clone();
        crate::scalar::scale((T::one() - w).sqrt(), &mut v);
        axpy(w.sqrt(), &b.vector, &mut v);
        normalize(&mut v);
        v
    }
}

impl<T: Real> PencilProblem<T> {
    /// Runs the sandwich refinement under `budget`.
    pub fn sandwich(&self, budget: &Budget<T>) -> Result<CurveBounds<T>> {
        let mut eng = Engine::new(self)?;
        let max_solves = budget.max_solves.unwrap_or(SOLVE_CEILING).max(2);
        match budget.rounds {
            Some(r) => {
                eng.record_gap();
                eng.run_rounds(r, max_solves)?;
            }
            None => {
                let eps = budget.epsilon.unwrap_or_else(|| T::lit(1e-6) * self.rate_scale(eng.lambda_max));
                if eps < T::zero() || eps.is_nan() {
                    return Err(Error::InvalidParameter(format!("epsilon must be nonnegative, got {eps}")));
                }
                eng.run_greedy(eps, max_solves)?;
            }
        }
        Ok(eng.finish())
    }

    /// Brackets `γ(s)` to within `epsilon` by refining only the segment that
    /// contains `s`.
    pub fn point_query(&self, s: T, epsilon: T) -> Result<PointQuery<T>> {
        if !(epsilon > T::zero()) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        Engine::new(self)?.point_query(s, epsilon, SOLVE_CEILING)
    }
}
