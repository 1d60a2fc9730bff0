//! Multivalued maps `X → B(X)`.
//!
//! Base families have exact parametric images. Powers are composed by
//! grid union: the image of `F^k` is the union of `F(y)` over the
//! discretized image of `F^(k-1)`, deduplicated on a grid whose pitch is the
//! domain width divided by `resolution · k`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{self, BoundedSet, Measured, Shape, DEFAULT_RESOLUTION};
use crate::space::{seeded_rng, Metric, Point, Space};

/// Single-valued self-maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PointMap {
    /// `x ↦ diag ⊙ x + offset`.
    Affine { diag: Vec<f64>, offset: Vec<f64> },
}

impl PointMap {
    pub fn scale(dimension: usize, factor: f64) -> Self {
        PointMap::Affine {
            diag: vec![factor; dimension],
            offset: vec![0.0; dimension],
        }
    }

    pub fn identity(dimension: usize) -> Self {
        PointMap::scale(dimension, 1.0)
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        match self {
            PointMap::Affine { diag, offset } => {
                if diag.len() != x.dimension() || offset.len() != x.dimension() {
                    return Err(Error::DimensionMismatch {
                        expected: x.dimension(),
                        got: diag.len().max(offset.len()),
                    });
                }
                Point::new(
                    x.coords()
                        .iter()
                        .zip(diag.iter().zip(offset))
                        .map(|(c, (a, b))| a * c + b)
                        .collect(),
                )
            }
        }
    }
}

/// The closed registry of map families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapFamily {
    /// `x ↦ [0, c·x]` (segment from the origin).
    SegmentScale { c: f64 },
    /// `x ↦ Π [0, c·x_i]`.
    BoxScale { c: f64 },
    /// `x ↦ [x + lo_off, x + hi_off]`.
    SegmentTranslate { lo_off: Point, hi_off: Point },
    /// `x ↦ {f(x), g(x)}`.
    PairWrap { f: PointMap, g: PointMap },
    /// `F^k` by union composition.
    Power { base: Box<MapFamily>, k: usize },
}

/// A multivalued map together with the resolution used to discretize its
/// images.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiMap {
    family: MapFamily,
    resolution: usize,
}

/// Which side of the current point a selection must lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    /// Image point `y` with `y ⪯ x`.
    Dominated,
    /// Image point `y` with `x ⪯ y`.
    Dominating,
}

impl Dominance {
    fn accepts(self, space: &Space, candidate: &Point, x: &Point) -> bool {
        match self {
            Dominance::Dominated => space.leq(candidate, x),
            Dominance::Dominating => space.leq(x, candidate),
        }
    }

    fn missing(self, x: &Point) -> Error {
        let point = x.coords().to_vec();
        match self {
            Dominance::Dominated => Error::NoDominatedPoint { point },
            Dominance::Dominating => Error::NoDominatingPoint { point },
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionRule {
    #[serde(rename = "nearest")]
    Nearest,
    #[default]
    #[serde(rename = "farthest")]
    Farthest,
    #[serde(rename = "min-lex", alias = "min_lex")]
    MinLex,
}

impl std::str::FromStr for SelectionRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "nearest" => Ok(SelectionRule::Nearest),
            "farthest" => Ok(SelectionRule::Farthest),
            "min-lex" | "min_lex" => Ok(SelectionRule::MinLex),
            other => Err(format!("unknown selection rule `{other}`")),
        }
    }
}

impl MultiMap {
    pub fn new(family: MapFamily, resolution: usize) -> Result<Self> {
        validate_family(&family)?;
        if resolution < 2 {
            return Err(Error::InvalidParameter {
                name: "resolution".into(),
                reason: format!("{resolution} < 2"),
            });
        }
        Ok(MultiMap { family, resolution })
    }

    pub fn segment_scale(c: f64) -> Self {
        MultiMap {
            family: MapFamily::SegmentScale { c },
            resolution: DEFAULT_RESOLUTION,
        }
    }

    pub fn box_scale(c: f64) -> Self {
        MultiMap {
            family: MapFamily::BoxScale { c },
            resolution: DEFAULT_RESOLUTION,
        }
    }

    pub fn segment_translate(lo_off: Point, hi_off: Point) -> Self {
        MultiMap {
            family: MapFamily::SegmentTranslate { lo_off, hi_off },
            resolution: DEFAULT_RESOLUTION,
        }
    }

    pub fn pair_wrap(f: PointMap, g: PointMap) -> Self {
        MultiMap {
            family: MapFamily::PairWrap { f, g },
            resolution: DEFAULT_RESOLUTION,
        }
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution.max(2);
        self
    }

    pub fn family(&self) -> &MapFamily {
        &self.family
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// `F^k`; `power(1)` is `F` itself.
    pub fn power(&self, k: usize) -> Result<MultiMap> {
        if k == 0 {
            return Err(Error::InvalidParameter {
                name: "k".into(),
                reason: "power exponent must be >= 1".into(),
            });
        }
        if k == 1 {
            return Ok(self.clone());
        }
        Ok(MultiMap {
            family: MapFamily::Power {
                base: Box::new(self.family.clone()),
                k,
            },
            resolution: self.resolution,
        })
    }

    /// `F(x)` for `x` in the domain.
    pub fn image(&self, space: &Space, x: &Point) -> Result<BoundedSet> {
        space.check_member(x)?;
        image_of(&self.family, self.resolution, space, x)
    }

    /// Deduplication pitch per axis for power images (zero for base families).
    pub fn power_pitch(&self, space: &Space) -> Vec<f64> {
        match &self.family {
            MapFamily::Power { k, .. } => pitch(space, self.resolution, *k),
            _ => vec![0.0; space.dimension()],
        }
    }

    /// Pick a point of the discretized image on the requested side of `x`.
    /// Ties break towards the lexicographically smaller point.
    pub fn select(
        &self,
        space: &Space,
        x: &Point,
        side: Dominance,
        rule: SelectionRule,
    ) -> Result<Point> {
        let candidates = self.image(space, x)?.sample_points();
        let metric = space.metric();
        let mut best: Option<(f64, Point)> = None;
        for y in candidates.into_iter().filter(|y| side.accepts(space, y, x)) {
            let key = match rule {
                SelectionRule::Nearest => metric.dist(x.coords(), y.coords()),
                SelectionRule::Farthest => -metric.dist(x.coords(), y.coords()),
                SelectionRule::MinLex => 0.0,
            };
            let better = match &best {
                None => true,
                Some((k, p)) => key < *k || (key == *k && y.lex_cmp(p).is_lt()),
            };
            if better {
                best = Some((key, y));
            }
        }
        best.map(|(_, p)| p).ok_or_else(|| side.missing(x))
    }

    pub fn select_dominated(&self, space: &Space, x: &Point, rule: SelectionRule) -> Result<Point> {
        self.select(space, x, Dominance::Dominated, rule)
    }

    pub fn select_dominating(
        &self,
        space: &Space,
        x: &Point,
        rule: SelectionRule,
    ) -> Result<Point> {
        self.select(space, x, Dominance::Dominating, rule)
    }
}

fn validate_family(family: &MapFamily) -> Result<()> {
    let bad = |name: &str, reason: &str| {
        Err(Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        })
    };
    match family {
        MapFamily::SegmentScale { c } | MapFamily::BoxScale { c } if !(c.is_finite() && *c > 0.0) => {
            bad("c", "scale must be finite and > 0")
        }
        MapFamily::SegmentTranslate { lo_off, hi_off } if lo_off.dimension() != hi_off.dimension() => {
            bad("hi_off", "offsets differ in dimension")
        }
        MapFamily::Power { k: 0, .. } => bad("k", "power exponent must be >= 1"),
        MapFamily::Power { base, .. } => validate_family(base),
        _ => Ok(()),
    }
}

fn pitch(space: &Space, resolution: usize, k: usize) -> Vec<f64> {
    space
        .lo()
        .coords()
        .iter()
        .zip(space.hi().coords())
        .map(|(l, h)| (h - l) / (resolution * k) as f64)
        .collect()
}

fn image_of(family: &MapFamily, resolution: usize, space: &Space, x: &Point) -> Result<BoundedSet> {
    let dim = x.dimension();
    let check = |p: &Point| {
        if p.dimension() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dimension(),
            })
        }
    };
    match family {
        MapFamily::SegmentScale { c } => BoundedSet::segment(
            Point::origin(dim),
            x.map_coords(|_, v| c * v),
            resolution,
        ),
        MapFamily::BoxScale { c } => BoundedSet::cuboid(
            x.map_coords(|_, v| (c * v).min(0.0)),
            x.map_coords(|_, v| (c * v).max(0.0)),
            resolution,
        ),
        MapFamily::SegmentTranslate { lo_off, hi_off } => {
            check(lo_off)?;
            BoundedSet::segment(
                x.map_coords(|i, v| v + lo_off.coords()[i]),
                x.map_coords(|i, v| v + hi_off.coords()[i]),
                resolution,
            )
        }
        MapFamily::PairWrap { f, g } => {
            let (fx, gx) = (f.apply(x)?, g.apply(x)?);
            let pts = if fx == gx { vec![fx] } else { vec![fx, gx] };
            BoundedSet::new(Shape::Points { pts }, resolution)
        }
        MapFamily::Power { base, k } => {
            let pitch = pitch(space, resolution, *k);
            let mut current = image_of(base, resolution, space, x)?;
            for _ in 1..*k {
                let mut seen: HashSet<Vec<i64>> = HashSet::new();
                let mut union = Vec::new();
                for y in current.sample_points() {
                    for p in image_of(base, resolution, space, &y)?.sample_points() {
                        let key = grid_key(&p, space.lo(), &pitch);
                        if seen.insert(key) {
                            union.push(p);
                        }
                    }
                }
                current = BoundedSet::new(Shape::Points { pts: union }, resolution)?;
            }
            Ok(current)
        }
    }
}

fn grid_key(p: &Point, lo: &Point, pitch: &[f64]) -> Vec<i64> {
    p.coords()
        .iter()
        .zip(lo.coords().iter().zip(pitch))
        .map(|(c, (l, h))| if *h > 0.0 { ((c - l) / h).floor() as i64 } else { 0 })
        .collect()
}

/// Outcome of a sampled dominance predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateReport {
    pub side: Dominance,
    pub samples: usize,
    pub seed: u64,
    pub successes: usize,
    /// Sample points whose discretized image has no point on the required side.
    pub failures: Vec<Point>,
}

impl PredicateReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.samples.max(1) as f64
    }
}

/// Sampled check that every image contains a point on `side` of its argument.
pub fn check_dominance(
    space: &Space,
    map: &MultiMap,
    side: Dominance,
    samples: usize,
    seed: u64,
) -> Result<PredicateReport> {
    let mut rng = seeded_rng(seed);
    let mut successes = 0;
    let mut failures = Vec::new();
    for _ in 0..samples {
        let y = space.sample(&mut rng);
        // extreme points lead the discretization, so they are scanned first
        let found = map
            .image(space, &y)?
            .sample_points()
            .iter()
            .any(|p| side.accepts(space, p, &y));
        if found {
            successes += 1;
        } else {
            failures.push(y);
        }
    }
    Ok(PredicateReport {
        side,
        samples,
        seed,
        successes,
        failures,
    })
}

pub fn is_partially_dominated(
    space: &Space,
    map: &MultiMap,
    samples: usize,
    seed: u64,
) -> Result<PredicateReport> {
    check_dominance(space, map, Dominance::Dominated, samples, seed)
}

pub fn is_partially_dominating(
    space: &Space,
    map: &MultiMap,
    samples: usize,
    seed: u64,
) -> Result<PredicateReport> {
    check_dominance(space, map, Dominance::Dominating, samples, seed)
}

/// Draw `n` uniform points with a fresh seeded generator.
pub fn sample_points(space: &Space, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = seeded_rng(seed);
    (0..n).map(|_| space.sample(&mut rng)).collect()
}

/// `M(x, y) = max{ d(x,y), δ(x,Sx), δ(y,Ty), ½(D(x,Ty) + D(y,Sx)) }` from
/// precomputed images; the bound collects discretization error of the D terms.
pub fn mixed_gauge_from_images(
    metric: Metric,
    x: &Point,
    y: &Point,
    sx: &BoundedSet,
    ty: &BoundedSet,
) -> Result<Measured> {
    let px = BoundedSet::point(x.clone());
    let py = BoundedSet::point(y.clone());
    let dxy = metric.dist(x.coords(), y.coords());
    let res_x = sets::delta(metric, &px, sx)?;
    let res_y = sets::delta(metric, &py, ty)?;
    let cross_x = sets::dist_inf_with_bound(metric, &px, ty)?;
    let cross_y = sets::dist_inf_with_bound(metric, &py, sx)?;
    let cross = 0.5 * (cross_x.value + cross_y.value);
    let value = dxy.max(res_x).max(res_y).max(cross);
    // max is 1-Lipschitz in each argument
    let bound = 0.5 * (cross_x.bound + cross_y.bound);
    Ok(Measured { value, bound })
}

pub fn mixed_gauge(
    space: &Space,
    s: &MultiMap,
    t: &MultiMap,
    x: &Point,
    y: &Point,
) -> Result<f64> {
    let sx = s.image(space, x)?;
    let ty = t.image(space, y)?;
    Ok(mixed_gauge_from_images(space.metric(), x, y, &sx, &ty)?.value)
}
