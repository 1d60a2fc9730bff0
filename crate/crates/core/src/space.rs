//! Ambient space: points, the metric, the partial order and sampled axiom checks.
//!
//! A [`Space`] is an axis-aligned box in ℝⁿ together with a named metric and a
//! named partial order. Metric and order are independent of each other; the
//! order only decides which pairs are comparable.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic generator used by every sampler in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A point of the ambient space. Coordinates are always finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite(coords));
        }
        Ok(Point(coords))
    }

    pub fn origin(dimension: usize) -> Self {
        Point(vec![0.0; dimension])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Total lexicographic comparison on coordinates, used for tie-breaking.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }

    /// `self + t * (other - self)`, returning `other` exactly at `t == 1`.
    pub(crate) fn lerp(&self, other: &Point, t: f64) -> Point {
        if t == 1.0 {
            return other.clone();
        }
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + t * (b - a))
                .collect(),
        )
    }

    pub(crate) fn map_coords(&self, f: impl Fn(usize, f64) -> f64) -> Point {
        Point(self.0.iter().enumerate().map(|(i, &c)| f(i, c)).collect())
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Named metrics. All of them are norms of the coordinate difference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl Metric {
    /// Norm of a difference vector.
    pub fn norm(self, v: impl Iterator<Item = f64>) -> f64 {
        match self {
            Metric::Euclidean => v.map(|x| x * x).sum::<f64>().sqrt(),
            Metric::Manhattan => v.map(f64::abs).sum(),
            Metric::Chebyshev => v.map(f64::abs).fold(0.0, f64::max),
        }
    }

    /// Distance between coordinate slices of equal length.
    pub fn dist(self, p: &[f64], q: &[f64]) -> f64 {
        self.norm(p.iter().zip(q).map(|(a, b)| a - b))
    }
}

/// Named partial orders.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    /// `p ⪯ q` iff `p_i ≤ q_i` for every coordinate.
    #[default]
    Componentwise,
    /// `p ⪯ q` iff `q_i ≤ p_i` for every coordinate.
    Reverse,
    /// Lexicographic on coordinates, first coordinate most significant.
    #[serde(alias = "lex")]
    Lexicographic,
}

impl Order {
    pub fn leq(self, p: &[f64], q: &[f64]) -> bool {
        match self {
            Order::Componentwise => p.iter().zip(q).all(|(a, b)| a <= b),
            Order::Reverse => p.iter().zip(q).all(|(a, b)| b <= a),
            Order::Lexicographic => {
                for (a, b) in p.iter().zip(q) {
                    if a < b {
                        return true;
                    }
                    if a > b {
                        return false;
                    }
                }
                true
            }
        }
    }

    pub fn comparable(self, p: &[f64], q: &[f64]) -> bool {
        self.leq(p, q) || self.leq(q, p)
    }
}

/// An axis-aligned box domain with a metric and a partial order.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    lo: Point,
    hi: Point,
    metric: Metric,
    order: Order,
}

impl Space {
    pub fn new(lo: Point, hi: Point, metric: Metric, order: Order) -> Result<Self> {
        if lo.dimension() == 0 {
            return Err(Error::InvalidParameter {
                name: "dimension".into(),
                reason: "must be positive".into(),
            });
        }
        if lo.dimension() != hi.dimension() {
            return Err(Error::DimensionMismatch {
                expected: lo.dimension(),
                got: hi.dimension(),
            });
        }
        if lo.coords().iter().zip(hi.coords()).any(|(l, h)| l > h) {
            return Err(Error::InvalidParameter {
                name: "domain".into(),
                reason: format!("lo {lo} exceeds hi {hi} in some coordinate"),
            });
        }
        Ok(Space {
            lo,
            hi,
            metric,
            order,
        })
    }

    /// The box `[lo, hi]^dimension` with the default metric and order.
    pub fn cube(dimension: usize, lo: f64, hi: f64) -> Result<Self> {
        Space::new(
            Point::new(vec![lo; dimension])?,
            Point::new(vec![hi; dimension])?,
            Metric::default(),
            Order::default(),
        )
    }

    pub fn with_order(mut self, order: Order) -> Self {
        self.order = order;
        self
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn dimension(&self) -> usize {
        self.lo.dimension()
    }

    pub fn lo(&self) -> &Point {
        &self.lo
    }

    pub fn hi(&self) -> &Point {
        &self.hi
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dimension() == self.dimension()
            && p.coords()
                .iter()
                .zip(self.lo.coords().iter().zip(self.hi.coords()))
                .all(|(c, (l, h))| l <= c && c <= h)
    }

    pub fn check_dimension(&self, p: &Point) -> Result<()> {
        if p.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: p.dimension(),
            });
        }
        Ok(())
    }

    pub fn check_member(&self, p: &Point) -> Result<()> {
        self.check_dimension(p)?;
        if !self.contains(p) {
            return Err(Error::OutsideDomain {
                point: p.coords().to_vec(),
            });
        }
        Ok(())
    }

    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check_dimension(p)?;
        self.check_dimension(q)?;
        Ok(self.metric.dist(p.coords(), q.coords()))
    }

    pub fn leq(&self, p: &Point, q: &Point) -> bool {
        self.order.leq(p.coords(), q.coords())
    }

    pub fn comparable(&self, p: &Point, q: &Point) -> bool {
        self.order.comparable(p.coords(), q.coords())
    }

    /// Distance between opposite corners of the domain.
    pub fn diameter(&self) -> f64 {
        self.metric.dist(self.lo.coords(), self.hi.coords())
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Point {
        Point(
            self.lo
                .coords()
                .iter()
                .zip(self.hi.coords())
                .map(|(&l, &h)| if l == h { l } else { rng.gen_range(l..=h) })
                .collect(),
        )
    }

    /// Uniform lattice with `per_axis` nodes along every axis, last coordinate
    /// varying fastest. Corners are hit exactly.
    pub fn lattice(&self, per_axis: usize) -> Vec<Point> {
        let axes: Vec<Vec<f64>> = self
            .lo
            .coords()
            .iter()
            .zip(self.hi.coords())
            .map(|(&l, &h)| axis_nodes(l, h, per_axis))
            .collect();
        cartesian(&axes)
    }
}

/// `n` uniformly spaced values from `lo` to `hi` inclusive; collapses to a
/// single value on a degenerate axis.
pub(crate) fn axis_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if lo == hi || n <= 1 {
        return vec![lo];
    }
    let last = n - 1;
    (0..n)
        .map(|i| {
            if i == last {
                hi
            } else {
                lo + (hi - lo) * (i as f64 / last as f64)
            }
        })
        .collect()
}

pub(crate) fn cartesian(axes: &[Vec<f64>]) -> Vec<Point> {
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(axes.len())];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &v in axis {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(Point).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrderViolation {
    Reflexivity { p: Point },
    Antisymmetry { p: Point, q: Point },
    Transitivity { p: Point, q: Point, r: Point },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderAxiomReport {
    pub sample_size: usize,
    pub seed: u64,
    /// Number of ordered triples examined for transitivity.
    pub triples_checked: usize,
    pub violations: Vec<OrderViolation>,
}

impl OrderAxiomReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Above this sample size transitivity is checked on random triples instead
/// of exhaustively.
const EXHAUSTIVE_TRIPLE_LIMIT: usize = 256;

/// Sampled check of the partial-order axioms for the space's order.
pub fn check_partial_order(space: &Space, sample_count: usize, seed: u64) -> OrderAxiomReport {
    let mut rng = seeded_rng(seed);
    let points: Vec<Point> = (0..sample_count.max(1))
        .map(|_| space.sample(&mut rng))
        .collect();
    let order = space.order();
    check_relation(&points, |p, q| order.leq(p.coords(), q.coords()), seed)
}

/// Check reflexivity, antisymmetry (exact coordinate equality) and
/// transitivity of `leq` over a finite sample.
pub fn check_relation(
    points: &[Point],
    leq: impl Fn(&Point, &Point) -> bool,
    seed: u64,
) -> OrderAxiomReport {
    let n = points.len();
    let mut violations = Vec::new();

    for p in points {
        if !leq(p, p) {
            violations.push(OrderViolation::Reflexivity { p: p.clone() });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (p, q) = (&points[i], &points[j]);
            if p != q && leq(p, q) && leq(q, p) {
                violations.push(OrderViolation::Antisymmetry {
                    p: p.clone(),
                    q: q.clone(),
                });
            }
        }
    }

    let check_triple = |i: usize, j: usize, k: usize, out: &mut Vec<OrderViolation>| {
        let (p, q, r) = (&points[i], &points[j], &points[k]);
        if leq(p, q) && leq(q, r) && !leq(p, r) {
            out.push(OrderViolation::Transitivity {
                p: p.clone(),
                q: q.clone(),
                r: r.clone(),
            });
        }
    };
    let triples_checked = if n <= EXHAUSTIVE_TRIPLE_LIMIT {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    check_triple(i, j, k, &mut violations);
                }
            }
        }
        n * n * n
    } else {
        let mut rng = seeded_rng(seed ^ 0x7472_6970);
        let count = n * n;
        for _ in 0..count {
            let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            check_triple(i, j, k, &mut violations);
        }
        count
    };

    OrderAxiomReport {
        sample_size: n,
        seed,
        triples_checked,
        violations,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricViolation {
    Identity { p: Point, value: f64 },
    Symmetry { p: Point, q: Point },
    Triangle { p: Point, q: Point, r: Point, excess: f64 },
}

/// Absolute slack allowed in sampled triangle inequalities.
pub const TRIANGLE_SLACK: f64 = 1e-12;

/// Sampled check of `d(p,p) = 0`, symmetry and the triangle inequality on
/// consecutive sample triples.
pub fn check_metric(space: &Space, sample_count: usize, seed: u64) -> Vec<MetricViolation> {
    let mut rng = seeded_rng(seed);
    let metric = space.metric();
    let mut out = Vec::new();
    for _ in 0..sample_count {
        let p = space.sample(&mut rng);
        let q = space.sample(&mut rng);
        let r = space.sample(&mut rng);
        let d = |a: &Point, b: &Point| metric.dist(a.coords(), b.coords());
        if d(&p, &p) != 0.0 {
            out.push(MetricViolation::Identity {
                value: d(&p, &p),
                p: p.clone(),
            });
        }
        if d(&p, &q) != d(&q, &p) {
            out.push(MetricViolation::Symmetry {
                p: p.clone(),
                q: q.clone(),
            });
        }
        let excess = d(&p, &r) - d(&p, &q) - d(&q, &r);
        if excess > TRIANGLE_SLACK {
            out.push(MetricViolation::Triangle { p, q, r, excess });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn plane() -> Space {
        Space::cube(2, -10.0, 10.0).unwrap()
    }

    #[test]
    fn euclidean_distance_examples() {
        let s = plane();
        assert_eq!(s.distance(&pt(&[0.0, 0.0]), &pt(&[0.0, 0.0])).unwrap(), 0.0);
        let d = s.distance(&pt(&[0.0, 0.0]), &pt(&[0.05, 0.05])).unwrap();
        assert!((d - 0.05 * 2f64.sqrt()).abs() < 1e-15);
        assert!((d - 0.0707107).abs() < 1e-7);
    }

    #[test]
    fn distance_rejects_dimension_mismatch() {
        let err = plane()
            .distance(&pt(&[0.0, 0.0]), &pt(&[1.0, 2.0, 3.0]))
            .unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, got: 3 });
    }

    #[test]
    fn distance_ignores_order_choice() {
        let lex = plane().with_order(Order::Lexicographic);
        let cw = plane();
        let mut rng = seeded_rng(3);
        for _ in 0..200 {
            let p = cw.sample(&mut rng);
            let q = cw.sample(&mut rng);
            let brute = ((p.coords()[0] - q.coords()[0]).powi(2)
                + (p.coords()[1] - q.coords()[1]).powi(2))
            .sqrt();
            assert_eq!(lex.distance(&p, &q).unwrap(), cw.distance(&p, &q).unwrap());
            assert!((lex.distance(&p, &q).unwrap() - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn componentwise_and_reverse_orders() {
        let s = plane();
        assert!(s.leq(&pt(&[1.0, 2.0]), &pt(&[3.0, 4.0])));
        assert!(!s.leq(&pt(&[1.0, 5.0]), &pt(&[3.0, 4.0])));
        let r = plane().with_order(Order::Reverse);
        assert!(r.leq(&pt(&[3.0, 4.0]), &pt(&[1.0, 2.0])));
        // reverse order is componentwise order on negated points
        let mut rng = seeded_rng(9);
        for _ in 0..100 {
            let p = s.sample(&mut rng);
            let q = s.sample(&mut rng);
            let neg = |x: &Point| x.map_coords(|_, c| -c);
            assert_eq!(r.leq(&p, &q), s.leq(&neg(&p), &neg(&q)));
        }
    }

    #[test]
    fn comparability() {
        let s = plane();
        assert!(s.comparable(&pt(&[1.0, 2.0]), &pt(&[3.0, 4.0])));
        assert!(!s.comparable(&pt(&[1.0, 4.0]), &pt(&[2.0, 3.0])));
        assert!(s.comparable(&pt(&[1.0, 4.0]), &pt(&[1.0, 4.0])));
        let lex = plane().with_order(Order::Lexicographic);
        assert!(lex.comparable(&pt(&[1.0, 4.0]), &pt(&[2.0, 3.0])));
    }

    #[test]
    fn builtin_orders_pass_axiom_check() {
        for order in [Order::Componentwise, Order::Reverse, Order::Lexicographic] {
            let report = check_partial_order(&plane().with_order(order), 1000, 11);
            assert!(report.holds(), "{order:?}: {:?}", report.violations);
            assert_eq!(report.sample_size, 1000);
            assert_eq!(report.triples_checked, 1000 * 1000);
        }
    }

    #[test]
    fn norm_preorder_fails_antisymmetry() {
        let s = plane();
        let mut points: Vec<Point> = {
            let mut rng = seeded_rng(5);
            (0..50).map(|_| s.sample(&mut rng)).collect()
        };
        points.push(pt(&[1.0, 0.0]));
        points.push(pt(&[0.0, 1.0]));
        let origin = Point::origin(2);
        let by_norm = |p: &Point, q: &Point| {
            s.distance(p, &origin).unwrap() <= s.distance(q, &origin).unwrap() + 0.0
        };
        let report = check_relation(&points, by_norm, 5);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            OrderViolation::Antisymmetry { p, q } if *p == pt(&[1.0, 0.0]) && *q == pt(&[0.0, 1.0])
        )));
        assert!(!report
            .violations
            .iter()
            .any(|v| matches!(v, OrderViolation::Reflexivity { .. })));
    }

    #[test]
    fn strict_relation_fails_reflexivity() {
        let points = vec![pt(&[0.0, 0.0]), pt(&[1.0, 1.0])];
        let report = check_relation(&points, |p, q| p.coords()[0] < q.coords()[0], 0);
        assert_eq!(
            report
                .violations
                .iter()
                .filter(|v| matches!(v, OrderViolation::Reflexivity { .. }))
                .count(),
            2
        );
    }

    #[test]
    fn metrics_pass_sampled_axioms() {
        for metric in [Metric::Euclidean, Metric::Manhattan, Metric::Chebyshev] {
            let v = check_metric(&plane().with_metric(metric), 2000, 1);
            assert!(v.is_empty(), "{metric:?}: {v:?}");
        }
    }

    #[test]
    fn lattice_hits_corners() {
        let s = Space::cube(2, 0.0, 0.25).unwrap();
        let l = s.lattice(5);
        assert_eq!(l.len(), 25);
        assert_eq!(l[0], pt(&[0.0, 0.0]));
        assert_eq!(l[24], pt(&[0.25, 0.25]));
        assert!(l.iter().all(|p| s.contains(p)));
    }

    #[test]
    fn rejects_bad_domain_and_points() {
        assert!(Point::new(vec![f64::NAN]).is_err());
        assert!(Space::new(pt(&[1.0]), pt(&[0.0]), Metric::Euclidean, Order::Componentwise).is_err());
        let s = Space::cube(2, 0.0, 1.0).unwrap();
        assert!(matches!(
            s.check_member(&pt(&[2.0, 0.0])),
            Err(Error::OutsideDomain { .. })
        ));
    }
}
