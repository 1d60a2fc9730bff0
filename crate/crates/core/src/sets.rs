//! Nonempty bounded sets and the two set gauges between them.
//!
//! `delta` is the sup of pairwise distances, `dist_inf` the inf. For the
//! convex variants (segments, boxes) the sup is attained at extreme points, so
//! `delta` is always exact. `dist_inf` uses closest-point geometry under the
//! Euclidean metric; other metrics fall back to discretization whenever a
//! segment is involved and report the resulting error bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{axis_nodes, cartesian, Metric, Point, Space};

/// Samples per edge used when no resolution is given.
pub const DEFAULT_RESOLUTION: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Points { pts: Vec<Point> },
    Segment { a: Point, b: Point },
    Box { lo: Point, hi: Point },
}

/// A nonempty bounded subset of ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedSet {
    shape: Shape,
    resolution: usize,
}

/// A gauge value together with an upper bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub value: f64,
    pub bound: f64,
}

impl Measured {
    fn exact(value: f64) -> Self {
        Measured { value, bound: 0.0 }
    }
}

impl BoundedSet {
    pub fn new(shape: Shape, resolution: usize) -> Result<Self> {
        let set = BoundedSet { shape, resolution };
        set.validate()?;
        Ok(set)
    }

    pub fn point(p: Point) -> Self {
        BoundedSet {
            shape: Shape::Points { pts: vec![p] },
            resolution: DEFAULT_RESOLUTION,
        }
    }

    pub fn points(pts: Vec<Point>) -> Result<Self> {
        BoundedSet::new(Shape::Points { pts }, DEFAULT_RESOLUTION)
    }

    pub fn segment(a: Point, b: Point, resolution: usize) -> Result<Self> {
        BoundedSet::new(Shape::Segment { a, b }, resolution)
    }

    pub fn cuboid(lo: Point, hi: Point, resolution: usize) -> Result<Self> {
        BoundedSet::new(Shape::Box { lo, hi }, resolution)
    }

    fn validate(&self) -> Result<()> {
        let dims: Vec<usize> = match &self.shape {
            Shape::Points { pts } => {
                if pts.is_empty() {
                    return Err(Error::InvalidSet("empty point list".into()));
                }
                pts.iter().map(Point::dimension).collect()
            }
            Shape::Segment { a, b } => vec![a.dimension(), b.dimension()],
            Shape::Box { lo, hi } => {
                if lo.coords().iter().zip(hi.coords()).any(|(l, h)| l > h) {
                    return Err(Error::InvalidSet(format!("box lo {lo} exceeds hi {hi}")));
                }
                vec![lo.dimension(), hi.dimension()]
            }
        };
        if let Some(&d) = dims.iter().find(|&&d| d != dims[0]) {
            return Err(Error::DimensionMismatch {
                expected: dims[0],
                got: d,
            });
        }
        if !self.is_degenerate() && self.resolution < 2 {
            return Err(Error::InvalidSet(format!(
                "resolution {} < 2 for a non-degenerate set",
                self.resolution
            )));
        }
        Ok(())
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn with_resolution(mut self, resolution: usize) -> Result<Self> {
        self.resolution = resolution;
        self.validate()?;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        match &self.shape {
            Shape::Points { pts } => pts[0].dimension(),
            Shape::Segment { a, .. } => a.dimension(),
            Shape::Box { lo, .. } => lo.dimension(),
        }
    }

    /// Segments and boxes that collapse to a single point, and point clouds.
    fn is_degenerate(&self) -> bool {
        match &self.shape {
            Shape::Points { .. } => true,
            Shape::Segment { a, b } => a == b,
            Shape::Box { lo, hi } => lo == hi,
        }
    }

    /// Every member lies inside the space domain.
    pub fn check_within(&self, space: &Space) -> Result<()> {
        for p in self.extreme_points() {
            space.check_member(&p)?;
        }
        Ok(())
    }

    /// Points whose convex hull contains the set: endpoints, corners, or the
    /// whole cloud.
    pub fn extreme_points(&self) -> Vec<Point> {
        match &self.shape {
            Shape::Points { pts } => pts.clone(),
            Shape::Segment { a, b } => {
                if a == b {
                    vec![a.clone()]
                } else {
                    vec![a.clone(), b.clone()]
                }
            }
            Shape::Box { lo, hi } => corners(lo, hi),
        }
    }

    /// Replace a continuous set by a finite sample: extreme points first, then
    /// the remaining uniform grid nodes. Point clouds are returned unchanged.
    pub fn discretize(&self) -> BoundedSet {
        let pts = match &self.shape {
            Shape::Points { .. } => return self.clone(),
            Shape::Segment { a, b } => {
                if a == b {
                    vec![a.clone()]
                } else {
                    let n = self.resolution;
                    let mut pts = vec![a.clone(), b.clone()];
                    pts.extend((1..n - 1).map(|i| a.lerp(b, i as f64 / (n - 1) as f64)));
                    pts
                }
            }
            Shape::Box { lo, hi } => {
                let mut pts = corners(lo, hi);
                let axes: Vec<Vec<f64>> = lo
                    .coords()
                    .iter()
                    .zip(hi.coords())
                    .map(|(&l, &h)| axis_nodes(l, h, self.resolution))
                    .collect();
                let is_corner = |p: &Point| {
                    p.coords()
                        .iter()
                        .zip(lo.coords().iter().zip(hi.coords()))
                        .all(|(c, (l, h))| c == l || c == h)
                };
                pts.extend(cartesian(&axes).into_iter().filter(|p| !is_corner(p)));
                pts
            }
        };
        BoundedSet {
            shape: Shape::Points { pts },
            resolution: self.resolution,
        }
    }

    /// The finite sample produced by [`discretize`](Self::discretize).
    pub fn sample_points(&self) -> Vec<Point> {
        match self.discretize().shape {
            Shape::Points { pts } => pts,
            _ => unreachable!("discretize always yields a point cloud"),
        }
    }

    /// Largest distance from a member of the set to the nearest node of its
    /// discretization.
    pub fn covering_radius(&self, metric: Metric) -> f64 {
        let cells = match &self.shape {
            Shape::Points { .. } => return 0.0,
            Shape::Segment { a, b } => {
                if a == b {
                    return 0.0;
                }
                return metric.dist(a.coords(), b.coords()) / (2.0 * (self.resolution - 1) as f64);
            }
            Shape::Box { lo, hi } => lo
                .coords()
                .iter()
                .zip(hi.coords())
                .map(|(l, h)| (h - l) / (self.resolution.max(2) - 1) as f64),
        };
        metric.norm(cells) / 2.0
    }

    /// Whether `p` belongs to the set, allowing `tol` per coordinate
    /// (for segments: distance to the segment at most `tol`).
    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        match &self.shape {
            Shape::Points { pts } => pts.iter().any(|q| {
                q.coords()
                    .iter()
                    .zip(p.coords())
                    .all(|(a, b)| (a - b).abs() <= tol)
            }),
            Shape::Segment { a, b } => {
                point_segment_euclidean(p.coords(), a.coords(), b.coords()) <= tol
            }
            Shape::Box { lo, hi } => p
                .coords()
                .iter()
                .zip(lo.coords().iter().zip(hi.coords()))
                .all(|(c, (l, h))| *l - tol <= *c && *c <= *h + tol),
        }
    }
}

impl std::fmt::Display for BoundedSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.shape {
            Shape::Points { pts } if pts.len() == 1 => write!(f, "{{{}}}", pts[0]),
            Shape::Points { pts } => write!(f, "points[{}]", pts.len()),
            Shape::Segment { a, b } => write!(f, "segment {a} -> {b}"),
            Shape::Box { lo, hi } => write!(f, "box {lo} .. {hi}"),
        }
    }
}

fn corners(lo: &Point, hi: &Point) -> Vec<Point> {
    let axes: Vec<Vec<f64>> = lo
        .coords()
        .iter()
        .zip(hi.coords())
        .map(|(&l, &h)| if l == h { vec![l] } else { vec![l, h] })
        .collect();
    cartesian(&axes)
}

fn same_dimension(a: &BoundedSet, b: &BoundedSet) -> Result<()> {
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch {
            expected: a.dimension(),
            got: b.dimension(),
        });
    }
    Ok(())
}

/// Sup of `d(p, b)` over `b ∈ set`.
fn farthest_from(metric: Metric, p: &[f64], set: &BoundedSet) -> f64 {
    match &set.shape {
        Shape::Points { pts } => farthest_in_cloud(metric, p, pts),
        Shape::Segment { a, b } => metric.dist(p, a.coords()).max(metric.dist(p, b.coords())),
        Shape::Box { lo, hi } => metric.norm(
            p.iter()
                .zip(lo.coords().iter().zip(hi.coords()))
                .map(|(c, (l, h))| (c - l).abs().max((c - h).abs())),
        ),
    }
}

fn farthest_in_cloud(metric: Metric, p: &[f64], pts: &[Point]) -> f64 {
    if metric == Metric::Euclidean {
        // sqrt is monotone, so the max can be taken on squared distances
        let sq = pts
            .iter()
            .map(|q| {
                p.iter()
                    .zip(q.coords())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        sq.sqrt()
    } else {
        pts.iter()
            .map(|q| metric.dist(p, q.coords()))
            .fold(0.0, f64::max)
    }
}

/// `δ(A, B) = sup { d(a, b) : a ∈ A, b ∈ B }`.
pub fn delta(metric: Metric, a: &BoundedSet, b: &BoundedSet) -> Result<f64> {
    same_dimension(a, b)?;
    // iterate over the side with fewer extreme points
    let (outer, inner) = match (&a.shape, &b.shape) {
        (Shape::Box { .. }, Shape::Box { .. }) => (a, b),
        (Shape::Box { .. }, _) => (b, a),
        _ => (a, b),
    };
    Ok(match &outer.shape {
        Shape::Points { pts } => pts
            .iter()
            .map(|p| farthest_from(metric, p.coords(), inner))
            .fold(0.0, f64::max),
        Shape::Segment { a: s0, b: s1 } => farthest_from(metric, s0.coords(), inner)
            .max(farthest_from(metric, s1.coords(), inner)),
        Shape::Box { lo, hi } => corners(lo, hi)
            .iter()
            .map(|c| farthest_from(metric, c.coords(), inner))
            .fold(0.0, f64::max),
    })
}

/// `D(A, B) = inf { d(a, b) : a ∈ A, b ∈ B }`.
pub fn dist_inf(metric: Metric, a: &BoundedSet, b: &BoundedSet) -> Result<f64> {
    Ok(dist_inf_with_bound(metric, a, b)?.value)
}

/// `D(A, B)` with the absolute error bound of the route taken (zero when the
/// value comes from closed-form geometry).
pub fn dist_inf_with_bound(metric: Metric, a: &BoundedSet, b: &BoundedSet) -> Result<Measured> {
    same_dimension(a, b)?;
    use Shape::*;
    let euclid = metric == Metric::Euclidean;
    if let Points { pts } = &a.shape {
        return Ok(cloud_to_set(metric, pts, b));
    }
    if let Points { pts } = &b.shape {
        return Ok(cloud_to_set(metric, pts, a));
    }
    Ok(match (&a.shape, &b.shape) {
        (Box { lo: l1, hi: h1 }, Box { lo: l2, hi: h2 }) => Measured::exact(metric.norm(
            (0..l1.dimension()).map(|i| {
                (l2.coords()[i] - h1.coords()[i])
                    .max(l1.coords()[i] - h2.coords()[i])
                    .max(0.0)
            }),
        )),
        (Segment { a: s0, b: s1 }, Box { lo, hi }) | (Box { lo, hi }, Segment { a: s0, b: s1 })
            if euclid =>
        {
            Measured::exact(segment_box_euclidean(
                s0.coords(),
                s1.coords(),
                lo.coords(),
                hi.coords(),
            ))
        }
        (Segment { a: p0, b: p1 }, Segment { a: q0, b: q1 }) if euclid => Measured::exact(
            segment_segment_euclidean(p0.coords(), p1.coords(), q0.coords(), q1.coords()),
        ),
        _ => dist_inf_discretized(metric, a, b)?,
    })
}

fn cloud_to_set(metric: Metric, pts: &[Point], set: &BoundedSet) -> Measured {
    let mut best = Measured::exact(f64::INFINITY);
    for p in pts {
        let m = point_to_set(metric, p.coords(), set);
        if m.value < best.value {
            best = m;
        }
    }
    best
}

fn point_to_set(metric: Metric, p: &[f64], set: &BoundedSet) -> Measured {
    match &set.shape {
        Shape::Points { pts } => Measured::exact(
            pts.iter()
                .map(|q| metric.dist(p, q.coords()))
                .fold(f64::INFINITY, f64::min),
        ),
        Shape::Box { lo, hi } => Measured::exact(point_box(metric, p, lo.coords(), hi.coords())),
        Shape::Segment { a, b } if metric == Metric::Euclidean => {
            Measured::exact(point_segment_euclidean(p, a.coords(), b.coords()))
        }
        Shape::Segment { .. } => Measured {
            value: point_to_set(metric, p, &set.discretize()).value,
            bound: set.covering_radius(metric),
        },
    }
}

/// Nearest point of a box is the coordinate clamp, for any of the named norms.
fn point_box(metric: Metric, p: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    metric.norm(
        p.iter()
            .zip(lo.iter().zip(hi))
            .map(|(c, (l, h))| c - c.clamp(*l, *h)),
    )
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn sub(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

fn point_segment_euclidean(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let (mut len2, mut proj) = (0.0, 0.0);
    for i in 0..p.len() {
        let d = b[i] - a[i];
        len2 += d * d;
        proj += (p[i] - a[i]) * d;
    }
    if len2 == 0.0 {
        return Metric::Euclidean.dist(p, a);
    }
    let t = (proj / len2).clamp(0.0, 1.0);
    (0..p.len())
        .map(|i| {
            let e = p[i] - (a[i] + t * (b[i] - a[i]));
            e * e
        })
        .sum::<f64>()
        .sqrt()
}

/// Closest distance between two segments: either both parameters are
/// interior at the stationary point of the squared distance, or the minimum
/// lies on the boundary of the parameter square, i.e. at an endpoint.
fn segment_segment_euclidean(p0: &[f64], p1: &[f64], q0: &[f64], q1: &[f64]) -> f64 {
    let mut best = point_segment_euclidean(p0, q0, q1)
        .min(point_segment_euclidean(p1, q0, q1))
        .min(point_segment_euclidean(q0, p0, p1))
        .min(point_segment_euclidean(q1, p0, p1));
    let u = sub(p1, p0);
    let v = sub(q1, q0);
    let w = sub(p0, q0);
    let (a, b, c, d, e) = (dot(&u, &u), dot(&u, &v), dot(&v, &v), dot(&u, &w), dot(&v, &w));
    let denom = a * c - b * b;
    if denom > 0.0 {
        let s = (b * e - c * d) / denom;
        let t = (a * e - b * d) / denom;
        if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
            let ps: Vec<f64> = p0.iter().zip(&u).map(|(x, d)| x + s * d).collect();
            let qt: Vec<f64> = q0.iter().zip(&v).map(|(x, d)| x + t * d).collect();
            best = best.min(Metric::Euclidean.dist(&ps, &qt));
        }
    }
    best
}

/// `t ↦ dist(a + t(b-a), box)²` is piecewise quadratic with breakpoints where
/// a coordinate crosses a face; minimise each piece in closed form.
fn segment_box_euclidean(a: &[f64], b: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let dir = sub(b, a);
    let mut knots = vec![0.0, 1.0];
    for i in 0..a.len() {
        if dir[i] != 0.0 {
            for face in [lo[i], hi[i]] {
                let t = (face - a[i]) / dir[i];
                if t > 0.0 && t < 1.0 {
                    knots.push(t);
                }
            }
        }
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let at = |t: f64| -> f64 {
        let p: Vec<f64> = a.iter().zip(&dir).map(|(x, d)| x + t * d).collect();
        point_box(Metric::Euclidean, &p, lo, hi)
    };
    let mut best = knots.iter().map(|&t| at(t)).fold(f64::INFINITY, f64::min);
    for w in knots.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let mid = 0.5 * (t0 + t1);
        // on this piece each coordinate is either clamped to a fixed face or free
        let (mut quad, mut lin) = (0.0, 0.0);
        for i in 0..a.len() {
            let x = a[i] + mid * dir[i];
            let face = if x < lo[i] {
                lo[i]
            } else if x > hi[i] {
                hi[i]
            } else {
                continue;
            };
            let off = a[i] - face;
            quad += dir[i] * dir[i];
            lin += off * dir[i];
        }
        if quad > 0.0 {
            let t = (-lin / quad).clamp(t0, t1);
            best = best.min(at(t));
        }
    }
    best
}

/// `δ` over the discretizations of both sets, with error bound equal to the
/// sum of the covering radii (the gauge is 1-Lipschitz in each argument).
pub fn delta_discretized(metric: Metric, a: &BoundedSet, b: &BoundedSet) -> Result<Measured> {
    same_dimension(a, b)?;
    let (pa, pb) = (a.sample_points(), b.sample_points());
    let value = pa
        .iter()
        .flat_map(|p| pb.iter().map(move |q| metric.dist(p.coords(), q.coords())))
        .fold(0.0, f64::max);
    Ok(Measured {
        value,
        bound: a.covering_radius(metric) + b.covering_radius(metric),
    })
}

/// `D` over the discretizations of both sets, with the same bound as
/// [`delta_discretized`].
pub fn dist_inf_discretized(metric: Metric, a: &BoundedSet, b: &BoundedSet) -> Result<Measured> {
    same_dimension(a, b)?;
    let (pa, pb) = (a.sample_points(), b.sample_points());
    let value = pa
        .iter()
        .flat_map(|p| pb.iter().map(move |q| metric.dist(p.coords(), q.coords())))
        .fold(f64::INFINITY, f64::min);
    Ok(Measured {
        value,
        bound: a.covering_radius(metric) + b.covering_radius(metric),
    })
}

/// Singleton eps used when an instance does not set one.
pub const DEFAULT_SINGLETON_EPS: f64 = 1e-9;

/// Diameter test: `δ(A, A) ≤ eps`.
pub fn is_singleton(metric: Metric, a: &BoundedSet, eps: f64) -> bool {
    delta(metric, a, a).map(|d| d <= eps).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: Metric = Metric::Euclidean;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn seg(a: &[f64], b: &[f64]) -> BoundedSet {
        BoundedSet::segment(pt(a), pt(b), 16).unwrap()
    }

    fn cuboid(lo: &[f64], hi: &[f64]) -> BoundedSet {
        BoundedSet::cuboid(pt(lo), pt(hi), 16).unwrap()
    }

    #[test]
    fn delta_of_golden_images() {
        let a = seg(&[0.0, 0.0], &[0.05, 0.05]);
        let b = cuboid(&[0.0, 0.0], &[0.05, 0.05]);
        let d = delta(E, &a, &b).unwrap();
        assert!((d - 0.05 * 2f64.sqrt()).abs() < 1e-15);
        // quarter of the norm of (0.2, 0.2)
        assert!((d - 0.25 * (0.08f64).sqrt()).abs() < 1e-15);
        assert_eq!(delta(E, &b, &a).unwrap(), d);
    }

    #[test]
    fn delta_of_singleton_with_itself_is_zero() {
        let p = BoundedSet::point(pt(&[0.3, -1.0]));
        assert_eq!(delta(E, &p, &p).unwrap(), 0.0);
    }

    #[test]
    fn dist_inf_point_to_box_corner() {
        let p = BoundedSet::point(pt(&[0.2, 0.2]));
        let b = cuboid(&[0.0, 0.0], &[0.05, 0.05]);
        let d = dist_inf(E, &p, &b).unwrap();
        assert!((d - 0.15 * 2f64.sqrt()).abs() < 1e-15);
        assert!((d - 0.2121320).abs() < 1e-7);
        // dense grid brute force
        let dense = b.clone().with_resolution(401).unwrap();
        let brute = dist_inf_discretized(E, &p, &dense).unwrap();
        assert!((brute.value - d).abs() <= brute.bound + 1e-15);
    }

    #[test]
    fn dist_inf_vanishes_on_intersection() {
        let a = seg(&[0.0, 0.0], &[1.0, 0.0]);
        assert_eq!(dist_inf(E, &a, &a).unwrap(), 0.0);
        assert_eq!(
            dist_inf(E, &a, &cuboid(&[0.0, 0.0], &[1.0, 1.0])).unwrap(),
            0.0
        );
    }

    #[test]
    fn segment_box_distance_matches_dense_sampling() {
        let s = seg(&[-1.0, 2.0], &[3.0, 0.5]);
        let b = cuboid(&[0.0, 0.0], &[1.0, 1.0]);
        let exact = dist_inf(E, &s, &b).unwrap();
        let dense = dist_inf_discretized(
            E,
            &s.clone().with_resolution(2001).unwrap(),
            &b.clone().with_resolution(201).unwrap(),
        )
        .unwrap();
        assert!(exact <= dense.value + 1e-15);
        assert!(dense.value - exact <= dense.bound);
    }

    #[test]
    fn segment_segment_crossing_and_parallel() {
        let a = seg(&[0.0, 0.0], &[1.0, 1.0]);
        let b = seg(&[0.0, 1.0], &[1.0, 0.0]);
        assert!(dist_inf(E, &a, &b).unwrap() < 1e-15);
        let c = seg(&[0.0, 2.0], &[1.0, 3.0]);
        let d = dist_inf(E, &a, &c).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn discretize_examples() {
        let s = BoundedSet::segment(pt(&[0.0, 0.0]), pt(&[1.0, 1.0]), 3).unwrap();
        let mut got = s.sample_points();
        got.sort_by(|a, b| a.lex_cmp(b));
        assert_eq!(got, vec![pt(&[0.0, 0.0]), pt(&[0.5, 0.5]), pt(&[1.0, 1.0])]);

        let b = BoundedSet::cuboid(pt(&[0.0, 0.0]), pt(&[1.0, 1.0]), 2).unwrap();
        let mut got = b.sample_points();
        got.sort_by(|a, b| a.lex_cmp(b));
        assert_eq!(
            got,
            vec![
                pt(&[0.0, 0.0]),
                pt(&[0.0, 1.0]),
                pt(&[1.0, 0.0]),
                pt(&[1.0, 1.0])
            ]
        );

        let cloud = BoundedSet::points(vec![pt(&[0.1]), pt(&[0.7])]).unwrap();
        assert_eq!(cloud.discretize(), cloud);
    }

    #[test]
    fn discretize_keeps_extremes_and_size_bound() {
        let b = BoundedSet::cuboid(pt(&[0.0, -1.0, 2.0]), pt(&[1.0, 1.0, 2.5]), 5).unwrap();
        let pts = b.sample_points();
        assert!(pts.len() <= 5usize.pow(3));
        for c in b.extreme_points() {
            assert!(pts.contains(&c));
        }
        assert_eq!(&pts[..8], &b.extreme_points()[..]);
    }

    #[test]
    fn singleton_tests() {
        assert!(is_singleton(E, &BoundedSet::point(pt(&[0.0, 0.0])), 0.0));
        assert!(is_singleton(E, &seg(&[0.0, 0.0], &[0.0, 0.0]), 0.0));
        let b = cuboid(&[0.0, 0.0], &[0.1, 0.1]);
        assert!(!is_singleton(E, &b, 1e-6));
        assert!((delta(E, &b, &b).unwrap() - 0.1 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn construction_errors() {
        assert!(BoundedSet::points(vec![]).is_err());
        assert!(BoundedSet::cuboid(pt(&[1.0]), pt(&[0.0]), 4).is_err());
        assert!(BoundedSet::segment(pt(&[0.0]), pt(&[1.0]), 1).is_err());
        assert!(BoundedSet::segment(pt(&[0.0]), pt(&[0.0]), 1).is_ok());
        assert!(BoundedSet::points(vec![pt(&[0.0]), pt(&[0.0, 1.0])]).is_err());
        let a = BoundedSet::point(pt(&[0.0]));
        let b = BoundedSet::point(pt(&[0.0, 1.0]));
        assert!(matches!(
            delta(E, &a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(dist_inf(E, &a, &b).is_err());
    }

    #[test]
    fn non_euclidean_segment_distance_reports_bound() {
        let s = seg(&[0.0, 2.0], &[2.0, 0.0]);
        let p = BoundedSet::point(pt(&[0.0, 0.0]));
        let m = dist_inf_with_bound(Metric::Manhattan, &s, &p).unwrap();
        assert!(m.bound > 0.0);
        // every point of the segment has Manhattan norm 2
        assert!((m.value - 2.0).abs() <= m.bound + 1e-12);
        let c = dist_inf_with_bound(Metric::Chebyshev, &s, &p).unwrap();
        assert!((c.value - 1.0).abs() <= c.bound + 1e-12);
    }

    #[test]
    fn covering_radius_shrinks_with_resolution() {
        let s = seg(&[0.0, 0.0], &[1.0, 0.0]);
        let r: Vec<f64> = [4, 16, 64]
            .iter()
            .map(|&n| s.clone().with_resolution(n).unwrap().covering_radius(E))
            .collect();
        assert!(r[0] > r[1] && r[1] > r[2]);
        assert!((r[2] - 1.0 / 126.0).abs() < 1e-15);
    }
}
