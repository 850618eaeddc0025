use crate::scalar::Real;

use super::hausdorff::hausdorff_one_sided;

/// A point on the uncertainty curve together with the supporting line
/// `g − alpha·s = q` through it.
///
/// The two domain endpoints carry `alpha = ∓∞` (their supporting lines are
/// vertical) and `q = −∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveKnot<T> {
    pub alpha: T,
    pub s: T,
    pub g: T,
    pub q: T,
    /// Unit vector achieving `(s, g)`.
    pub vector: Vec<T>,
}

impl<T: Real> CurveKnot<T> {
    pub fn point(&self) -> [T; 2] {
        [self.s, self.g]
    }

    /// Value of the supporting line at `s`.
    fn line_at(&self, s: T) -> T {
        self.q + self.alpha * s
    }
}

/// Lower polyline: the envelope of the knots' supporting lines.
///
/// Between consecutive knots only their own two lines matter (slopes
/// increase along the curve); they meet once between the knots. Infinite
/// slopes at the ends give vertical pieces.
pub(crate) fn lower_polyline<T: Real>(knots: &[CurveKnot<T>], exact: &[bool]) -> Vec<[T; 2]> {
    let mut out = vec![knots[0].point()];
    for (i, w) in knots.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        if !exact[i] {
            let corner = if a.alpha.is_finite() && b.alpha.is_finite() {
                let da = b.alpha - a.alpha;
                if da > T::zero() {
                    let s = ((a.q - b.q) / da).max(a.s).min(b.s);
                    Some([s, a.line_at(s).min(b.line_at(s))])
                } else {
                    None
                }
            } else if a.alpha.is_finite() {
                // b is the right endpoint: a's line runs to b's abscissa
                Some([b.s, a.line_at(b.s).min(b.g)])
            } else if b.alpha.is_finite() {
                Some([a.s, b.line_at(a.s).min(a.g)])
            } else {
                // only the two endpoints are known; nothing below them yet
                None
            };
            match corner {
                Some(c) => out.push(c),
                None if !a.alpha.is_finite() && !b.alpha.is_finite() => {
                    let floor = a.g.min(b.g).min(T::zero());
                    out.push([a.s, floor]);
                    out.push([b.s, floor]);
                }
                None => {}
            }
        }
        out.push(b.point());
    }
    out
}

/// Piecewise-linear sandwich around the uncertainty curve.
#[derive(Clone, Debug)]
pub struct CurveBounds<T> {
    /// Ascending in `s`.
    pub knots: Vec<CurveKnot<T>>,
    /// `exact[i]`: the chord between knots `i` and `i + 1` lies on the curve.
    pub exact: Vec<bool>,
    pub lower: Vec<[T; 2]>,
    pub upper: Vec<[T; 2]>,
    /// One-sided Hausdorff distance from `upper` to `lower`.
    pub gap: T,
    /// Eigenvalue evaluations spent, counting both endpoints.
    pub solves: usize,
    /// `(solves, gap)` after each refinement step.
    pub history: Vec<(usize, T)>,
    /// Largest eigenvalue of the spectral operator.
    pub lambda_max: T,
}

fn polyline_at<T: Real>(poly: &[[T; 2]], s: T) -> Option<T> {
    let (lo, hi) = (poly[0][0], poly[poly.len() - 1][0]);
    let slack = T::lit(1e-12) * hi.abs().max(T::one());
    if s < lo - slack || s > hi + slack {
        return None;
    }
    let s = s.max(lo).min(hi);
    let mut best: Option<T> = None;
    for w in poly.windows(2) {
        let (a, b) = (w[0], w[1]);
        if s < a[0] || s > b[0] {
            continue;
        }
        let v = if b[0] == a[0] { a[1].max(b[1]) } else { a[1] + (b[1] - a[1]) * (s - a[0]) / (b[0] - a[0]) };
        best = Some(best.map_or(v, |x: T| x.max(v)));
    }
    best
}

impl<T: Real> CurveBounds<T> {
    pub(crate) fn assemble(
        knots: Vec<CurveKnot<T>>,
        exact: Vec<bool>,
        solves: usize,
        history: Vec<(usize, T)>,
        lambda_max: T,
    ) -> Self {
        let lower = lower_polyline(&knots, &exact);
        let upper: Vec<[T; 2]> = knots.iter().map(|k| k.point()).collect();
        let gap = hausdorff_one_sided(&upper, &lower);
        CurveBounds { knots, exact, lower, upper, gap, solves, history, lambda_max }
    }

    pub fn s_range(&self) -> (T, T) {
        (self.knots[0].s, self.knots.last().unwrap().s)
    }

    /// Upper bound on `γ(s)`; `None` outside the domain.
    pub fn upper_at(&self, s: T) -> Option<T> {
        polyline_at(&self.upper, s)
    }

    /// Lower bound on `γ(s)`; `None` outside the domain.
    pub fn lower_at(&self, s: T) -> Option<T> {
        polyline_at(&self.lower, s)
    }

    /// Largest violation of convexity (turning the wrong way) along a
    /// polyline, scaled by the segment lengths. Zero for convex input.
    pub fn convexity_defect(poly: &[[T; 2]]) -> T {
        let mut worst = T::zero();
        for w in poly.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let u = [b[0] - a[0], b[1] - a[1]];
            let v = [c[0] - b[0], c[1] - b[1]];
            let cross = u[0] * v[1] - u[1] * v[0];
            let nu = (u[0] * u[0] + u[1] * u[1]).sqrt();
            let nv = (v[0] * v[0] + v[1] * v[1]).sqrt();
            if nu > T::zero() && nv > T::zero() {
                worst = worst.max(-cross / (nu * nv));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knot(alpha: f64, s: f64, g: f64) -> CurveKnot<f64> {
        CurveKnot { alpha, s, g, q: if alpha.is_finite() { g - alpha * s } else { f64::NEG_INFINITY }, vector: vec![] }
    }

    #[test]
    fn lower_envelope_of_parabola() {
        // g = (s - 1)², tangent slope 2(s - 1)
        let pts = [0.0, 0.5, 1.0, 2.0];
        let knots: Vec<_> = pts.iter().map(|&s| knot(2.0 * (s - 1.0), s, (s - 1.0) * (s - 1.0))).collect();
        let lower = lower_polyline(&knots, &[false; 3]);
        assert_eq!(lower.len(), 7);
        // tangents at 0 and 0.5 meet at 0.25
        assert!((lower[1][0] - 0.25).abs() < 1e-15);
        assert!((lower[1][1] - 0.5).abs() < 1e-15);
        for p in &lower {
            assert!(p[1] <= (p[0] - 1.0) * (p[0] - 1.0) + 1e-15);
        }
    }

    #[test]
    fn vertical_ends() {
        let knots = vec![knot(f64::NEG_INFINITY, 0.0, 1.0), knot(0.0, 1.0, 0.0), knot(f64::INFINITY, 2.0, 1.0)];
        let b = CurveBounds::assemble(knots, vec![false, false], 3, vec![], 2.0);
        assert_eq!(b.lower, vec![[0.0, 1.0], [0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [2.0, 1.0]]);
        assert_eq!(b.lower_at(0.0), Some(1.0));
        assert_eq!(b.lower_at(0.5), Some(0.0));
        assert_eq!(b.upper_at(0.5), Some(0.5));
        assert!((b.gap - 0.5).abs() < 1e-12);
        assert_eq!(CurveBounds::convexity_defect(&b.lower), 0.0);
        assert_eq!(CurveBounds::convexity_defect(&b.upper), 0.0);
    }

    #[test]
    fn exact_segment_lower_is_chord() {
        let knots = vec![knot(1.0, 0.0, 0.0), knot(1.0, 1.0, 1.0)];
        let lower = lower_polyline(&knots, &[true]);
        assert_eq!(lower, vec![[0.0, 0.0], [1.0, 1.0]]);
    }

    #[test]
    fn concave_turn_detected() {
        let poly = [[0.0, 0.0], [1.0, 1.0], [2.0, 1.0]];
        assert!(CurveBounds::convexity_defect(&poly) > 0.5);
    }
}
