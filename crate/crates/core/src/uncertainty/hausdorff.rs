//! Exact one-sided Hausdorff distance between polylines in the plane.
//!
//! For a point moving linearly along a segment, its squared distance to a
//! fixed segment is piecewise quadratic and its distance is convex. The
//! distance to a polyline is the minimum of those, so the supremum over the
//! moving segment is attained at an endpoint or where two pieces tie.
//!
//! With many nearby pieces the pairwise tie search is replaced by
//! branch-and-bound over `t`, which returns an upper bound within a relative
//! `1e-12` of the exact value.

use crate::scalar::Real;

type Pt<T> = [T; 2];

#[derive(Clone, Copy)]
struct Quad<T> {
    lo: T,
    hi: T,
    c: [T; 3],
}

impl<T: Real> Quad<T> {
    fn eval(&self, t: T) -> T {
        self.c[0] + t * (self.c[1] + t * self.c[2])
    }
}

fn sub<T: Real>(a: Pt<T>, b: Pt<T>) -> Pt<T> {
    [a[0] - b[0], a[1] - b[1]]
}

fn dotp<T: Real>(a: Pt<T>, b: Pt<T>) -> T {
    a[0] * b[0] + a[1] * b[1]
}

fn point_quad<T: Real>(w: Pt<T>, d: Pt<T>, lo: T, hi: T) -> Quad<T> {
    let two = T::lit(2.0);
    Quad { lo, hi, c: [dotp(w, w), two * dotp(w, d), dotp(d, d)] }
}

/// Squared distance from `p + t·d`, `t ∈ [0, 1]`, to segment `[a, b]`.
fn segment_quads<T: Real>(p: Pt<T>, d: Pt<T>, a: Pt<T>, b: Pt<T>) -> Vec<Quad<T>> {
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    let e = sub(b, a);
    let ee = dotp(e, e);
    let w = sub(p, a);
    if ee == zero {
        return vec![point_quad(w, d, zero, one)];
    }
    let u0 = dotp(w, e) / ee;
    let u1 = dotp(d, e) / ee;
    let mut cuts = vec![zero, one];
    if u1 != zero {
        for target in [zero, one] {
            let t = (target - u0) / u1;
            if t > zero && t < one {
                cuts.push(t);
            }
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out = Vec::with_capacity(cuts.len() - 1);
    for win in cuts.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let u = u0 + u1 * (lo + hi) / two;
        let q = if u <= zero {
            point_quad(w, d, lo, hi)
        } else if u >= one {
            point_quad(sub(p, b), d, lo, hi)
        } else {
            Quad {
                lo,
                hi,
                c: [
                    dotp(w, w) - ee * u0 * u0,
                    two * (dotp(w, d) - ee * u0 * u1),
                    dotp(d, d) - ee * u1 * u1,
                ],
            }
        };
        out.push(q);
    }
    out
}

fn eval_pieces<T: Real>(pieces: &[Quad<T>], t: T) -> T {
    for q in pieces {
        if t <= q.hi {
            return q.eval(t).max(T::zero());
        }
    }
    pieces.last().unwrap().eval(t).max(T::zero())
}

fn roots_in<T: Real>(c: [T; 3], lo: T, hi: T, out: &mut Vec<T>) {
    let zero = T::zero();
    let [c0, c1, c2] = c;
    let scale = c0.abs().max(c1.abs()).max(c2.abs());
    if scale == zero {
        return;
    }
    let mut push = |t: T| {
        if t >= lo && t <= hi {
            out.push(t);
        }
    };
    if c2.abs() <= T::epsilon() * scale {
        if c1 != zero {
            push(-c0 / c1);
        }
        return;
    }
    let disc = c1 * c1 - T::lit(4.0) * c2 * c0;
    if disc < zero {
        return;
    }
    let sq = disc.sqrt();
    let qq = if c1 >= zero { -(c1 + sq) / T::lit(2.0) } else { -(c1 - sq) / T::lit(2.0) };
    if qq != zero {
        push(qq / c2);
        push(c0 / qq);
    } else {
        push(zero);
    }
}

fn bbox_gap<T: Real>(p0: Pt<T>, p1: Pt<T>, a: Pt<T>, b: Pt<T>) -> T {
    let zero = T::zero();
    let mut acc = zero;
    for k in 0..2 {
        let (lo1, hi1) = (p0[k].min(p1[k]), p0[k].max(p1[k]));
        let (lo2, hi2) = (a[k].min(b[k]), a[k].max(b[k]));
        let g = (lo2 - hi1).max(lo1 - hi2).max(zero);
        acc = acc + g * g;
    }
    acc.sqrt()
}

/// Candidate counts above this use [`envelope_max`].
const PAIRWISE_LIMIT: usize = 24;

/// Upper bound on `max_t min_k f_k(t)` over `[0, 1]` for convex `f_k`, tight
/// to a relative `1e-12`. On an interval each `f_k` stays below the larger
/// of its end values, which bounds the envelope there.
/// `floor` is an absolute tolerance on squared distances.
fn envelope_max<T: Real>(cands: &[Vec<Quad<T>>], floor: T) -> T {
    let at = |t: T| -> Vec<T> { cands.iter().map(|c| eval_pieces(c, t)).collect() };
    let min_of = |v: &[T]| v.iter().copied().fold(T::infinity(), T::min);
    let (f0, f1) = (at(T::zero()), at(T::one()));
    let mut best = min_of(&f0).max(min_of(&f1));
    let mut slack = T::zero();
    let mut stack = vec![(T::zero(), T::one(), f0, f1)];
    let rel = T::lit(1e-12);
    while let Some((a, b, fa, fb)) = stack.pop() {
        let ub = fa.iter().zip(&fb).map(|(&x, &y)| x.max(y)).fold(T::infinity(), T::min);
        if ub <= best {
            continue;
        }
        if ub <= best + (rel * best).max(floor) || b - a <= T::epsilon() {
            slack = slack.max(ub);
            continue;
        }
        let m = (a + b) / T::lit(2.0);
        let fm = at(m);
        best = best.max(min_of(&fm));
        stack.push((a, m, fa, fm.clone()));
        stack.push((m, b, fm, fb));
    }
    best.max(slack)
}

/// `sup_{x ∈ [p0, p1]} dist(x, polyline)`. `to` must be sorted by its first
/// coordinate.
pub(crate) fn segment_to_polyline<T: Real>(p0: Pt<T>, p1: Pt<T>, to: &[Pt<T>]) -> T {
    segment_to_polyline_reach(p0, p1, to).0
}

/// As [`segment_to_polyline`], also returning how far beyond the segment's
/// first-coordinate range the polyline was examined; parts of `to` outside
/// that window do not affect the result.
pub(crate) fn segment_to_polyline_reach<T: Real>(p0: Pt<T>, p1: Pt<T>, to: &[Pt<T>]) -> (T, T) {
    if to.len() == 1 {
        let w = [to[0], to[0]];
        return segment_to_polyline_reach(p0, p1, &w);
    }
    let npieces = to.len() - 1;
    let d = sub(p1, p0);
    let (slo, shi) = (p0[0].min(p1[0]), p0[0].max(p1[0]));
    // first pass: pieces overlapping in s bound the answer from above
    let first = to.partition_point(|q| q[0] < slo).saturating_sub(1).min(npieces - 1);
    let mut bound = T::infinity();
    let mut k = first;
    loop {
        let quads = segment_quads(p0, d, to[k], to[k + 1]);
        let m = eval_pieces(&quads, T::zero()).max(eval_pieces(&quads, T::one()));
        bound = bound.min(m.sqrt());
        k += 1;
        if k >= npieces || to[k][0] > shi {
            break;
        }
    }
    let lo = slo - bound;
    let hi = shi + bound;
    let start = to[1..].partition_point(|q| q[0] < lo);
    let mut cands: Vec<Vec<Quad<T>>> = Vec::new();
    for k in start..npieces {
        if to[k][0] > hi {
            break;
        }
        if bbox_gap(p0, p1, to[k], to[k + 1]) > bound {
            continue;
        }
        cands.push(segment_quads(p0, d, to[k], to[k + 1]));
    }
    if cands.is_empty() {
        return (bound, bound);
    }
    if cands.len() > PAIRWISE_LIMIT {
        let size = p0[0].abs().max(p0[1].abs()).max(p1[0].abs()).max(p1[1].abs()).max(T::one());
        let floor = (T::lit(16.0) * T::epsilon() * size).powi(2);
        return (envelope_max(&cands, floor).sqrt().min(bound), bound);
    }
    let mut ts = vec![T::zero(), T::one()];
    for c in &cands {
        ts.extend(c.iter().map(|q| q.lo));
    }
    for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            for qa in &cands[i] {
                for qb in &cands[j] {
                    let lo = qa.lo.max(qb.lo);
                    let hi = qa.hi.min(qb.hi);
                    if lo > hi {
                        continue;
                    }
                    let diff = [qa.c[0] - qb.c[0], qa.c[1] - qb.c[1], qa.c[2] - qb.c[2]];
                    roots_in(diff, lo, hi, &mut ts);
                }
            }
        }
    }
    let mut best = T::zero();
    for t in ts {
        let m = cands.iter().map(|c| eval_pieces(c, t)).fold(T::infinity(), T::min);
        best = best.max(m);
    }
    (best.sqrt().min(bound), bound)
}

/// `sup_{x ∈ from} inf_{y ∈ to} |x − y|` for polylines sorted by their
/// first coordinate.
pub fn hausdorff_one_sided<T: Real>(from: &[Pt<T>], to: &[Pt<T>]) -> T {
    assert!(!from.is_empty() && !to.is_empty(), "empty polyline");
    if from.len() == 1 {
        return segment_to_polyline(from[0], from[0], to);
    }
    from.windows(2).map(|w| segment_to_polyline(w[0], w[1], to)).fold(T::zero(), T::max)
}
