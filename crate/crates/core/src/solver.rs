//! Alternating selection iteration for common end points of `(S, T)`.
//!
//! Starting from `x_0` the solver picks `x_{2n+1} ∈ S x_{2n}` and
//! `x_{2n+2} ∈ T x_{2n+1}`, each selection dominated by (descending) or
//! dominating (ascending) its predecessor. With `A_n` the image used to select
//! `x_{n+1}`, each trace row records `a_n = δ(A_n, A_{n+1})`,
//! `c_n = d(x_n, x_{n+1})` and the mixed gauge of the pair `(x_n, x_{n+1})`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{self, BoundedSet};
use crate::setmaps::{mixed_gauge_from_images, Dominance, MultiMap, SelectionRule};
use crate::space::{Point, Space};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Dominated selections; the iterates decrease.
    #[default]
    Descending,
    /// Dominating selections; the iterates increase.
    Ascending,
}

impl Direction {
    fn side(self) -> Dominance {
        match self {
            Direction::Descending => Dominance::Dominated,
            Direction::Ascending => Dominance::Dominating,
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "descending" => Ok(Direction::Descending),
            "ascending" => Ok(Direction::Ascending),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub direction: Direction,
    pub eps_endpoint: f64,
    pub eps_step: f64,
    pub max_iter: usize,
    pub rule: SelectionRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            direction: Direction::Descending,
            eps_endpoint: 1e-8,
            eps_step: 1e-8,
            max_iter: 200,
            rule: SelectionRule::Farthest,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name: name.into(),
                    reason: format!("{v} must be finite and > 0"),
                })
            }
        };
        positive("eps_endpoint", self.eps_endpoint)?;
        positive("eps_step", self.eps_step)?;
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iter".into(),
                reason: "must be >= 1".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapSide {
    S,
    T,
}

impl MapSide {
    fn at(n: usize) -> MapSide {
        if n % 2 == 0 {
            MapSide::S
        } else {
            MapSide::T
        }
    }
}

impl fmt::Display for MapSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapSide::S => "S",
            MapSide::T => "T",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub x: Point,
    /// Map applied to `x_n` to obtain `x_{n+1}`.
    pub map: MapSide,
    pub a: f64,
    pub c: f64,
    pub m: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Columns `n, map, x0..x{d-1}, c_n, a_n, M_n`.
    pub fn to_csv(&self) -> String {
        let dim = self.rows.first().map_or(0, |r| r.x.dimension());
        let xs: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
        let mut out = format!("n,map,{},c_n,a_n,M_n\n", xs.join(","));
        for r in &self.rows {
            let coords: Vec<String> = r.x.coords().iter().map(|c| format!("{c:e}")).collect();
            out.push_str(&format!(
                "{},{},{},{:e},{:e},{:e}\n",
                r.n,
                r.map,
                coords.join(","),
                r.c,
                r.a,
                r.m
            ));
        }
        out
    }

    /// Per-application decay estimated from the last two positive `a_n` of
    /// equal parity, `sqrt(a_n / a_{n-2})`.
    pub fn observed_ratio(&self) -> Option<f64> {
        let a: Vec<f64> = self.rows.iter().map(|r| r.a).collect();
        (2..a.len())
            .rev()
            .find(|&n| a[n] > 0.0 && a[n - 2] > 0.0)
            .map(|n| (a[n] / a[n - 2]).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    NoDominated,
    NoDominating,
    /// The selected point left the declared domain.
    LeftDomain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisWitness {
    pub kind: WitnessKind,
    pub point: Point,
    pub map: MapSide,
    pub iteration: usize,
}

impl fmt::Display for HypothesisWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            WitnessKind::NoDominated => "no dominated point in the image",
            WitnessKind::NoDominating => "no dominating point in the image",
            WitnessKind::LeftDomain => "selection left the domain",
        };
        write!(f, "{what} of {} at x_{} = {}", self.map, self.iteration, self.point)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Converged(Point),
    MaxIterExceeded,
    HypothesisFailed(HypothesisWitness),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndPointResult {
    pub status: Status,
    /// Last iterate inside the domain (the end point when converged).
    pub last: Point,
    /// `δ({u}, Su)` and `δ({u}, Tu)` at `last`.
    pub residuals: [f64; 2],
    pub trace: IterationTrace,
    /// `eps_step / (1 − ratio)` when a decay ratio below one was observed.
    pub error_estimate: Option<f64>,
}

impl EndPointResult {
    pub fn converged(&self) -> Option<&Point> {
        match &self.status {
            Status::Converged(u) => Some(u),
            _ => None,
        }
    }

    /// Number of selections performed.
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

impl fmt::Display for EndPointResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.status {
            Status::Converged(u) => writeln!(f, "status: converged\nu: {u}")?,
            Status::MaxIterExceeded => writeln!(f, "status: max_iter_exceeded\nlast: {}", self.last)?,
            Status::HypothesisFailed(w) => {
                writeln!(f, "status: hypothesis_failed\nwitness: {w}\nlast: {}", self.last)?
            }
        }
        writeln!(f, "residual_S: {:e}", self.residuals[0])?;
        writeln!(f, "residual_T: {:e}", self.residuals[1])?;
        writeln!(f, "iterations: {}", self.iterations())?;
        match self.error_estimate {
            Some(e) => writeln!(f, "error_estimate: {e:e}"),
            None => writeln!(f, "error_estimate: n/a"),
        }
    }
}

fn residuals(space: &Space, s: &MultiMap, t: &MultiMap, u: &Point) -> Result<[f64; 2]> {
    let single = BoundedSet::point(u.clone());
    let metric = space.metric();
    Ok([
        sets::delta(metric, &single, &s.image(space, u)?)?,
        sets::delta(metric, &single, &t.image(space, u)?)?,
    ])
}

/// Run the alternating selection from `x0`.
///
/// Only input errors (bad config, `x0` outside the domain) are returned as
/// `Err`; a missing selection is reported through `Status::HypothesisFailed`.
pub fn iterate_endpoint(
    space: &Space,
    s: &MultiMap,
    t: &MultiMap,
    x0: &Point,
    config: &SolverConfig,
) -> Result<EndPointResult> {
    config.validate()?;
    space.check_member(x0)?;
    let metric = space.metric();
    let map = |side: MapSide| match side {
        MapSide::S => s,
        MapSide::T => t,
    };

    let mut trace = IterationTrace::default();
    let mut x = x0.clone();
    let mut image = s.image(space, &x)?;
    let mut status = Status::MaxIterExceeded;

    for n in 0..config.max_iter {
        let side = MapSide::at(n);
        let next = match map(side).select(space, &x, config.direction.side(), config.rule) {
            Ok(p) => p,
            Err(Error::NoDominatedPoint { .. }) | Err(Error::NoDominatingPoint { .. }) => {
                let kind = match config.direction {
                    Direction::Descending => WitnessKind::NoDominated,
                    Direction::Ascending => WitnessKind::NoDominating,
                };
                status = Status::HypothesisFailed(HypothesisWitness {
                    kind,
                    point: x.clone(),
                    map: side,
                    iteration: n,
                });
                break;
            }
            Err(e) => return Err(e),
        };
        if !space.contains(&next) {
            status = Status::HypothesisFailed(HypothesisWitness {
                kind: WitnessKind::LeftDomain,
                point: next,
                map: side,
                iteration: n,
            });
            break;
        }
        let next_image = map(MapSide::at(n + 1)).image(space, &next)?;
        let a = sets::delta(metric, &image, &next_image)?;
        let c = metric.dist(x.coords(), next.coords());
        // S acts on the even-indexed point of the pair, T on the odd one.
        let m = if side == MapSide::S {
            mixed_gauge_from_images(metric, &x, &next, &image, &next_image)?
        } else {
            mixed_gauge_from_images(metric, &next, &x, &next_image, &image)?
        };
        trace.rows.push(TraceRow {
            n,
            x: x.clone(),
            map: side,
            a,
            c,
            m: m.value,
        });
        x = next;
        image = next_image;

        // Certify only after a full S-then-T round.
        if side == MapSide::T && c <= config.eps_step {
            let r = residuals(space, s, t, &x)?;
            if r[0] <= config.eps_endpoint && r[1] <= config.eps_endpoint {
                status = Status::Converged(x.clone());
                break;
            }
        }
    }

    let residuals = residuals(space, s, t, &x)?;
    let error_estimate = trace
        .observed_ratio()
        .or(if trace.rows.last().is_some_and(|r| r.a == 0.0) {
            Some(0.0)
        } else {
            None
        })
        .filter(|&q| q < 1.0)
        .map(|q| config.eps_step / (1.0 - q));
    Ok(EndPointResult {
        status,
        last: x,
        residuals,
        trace,
        error_estimate,
    })
}

/// Solve from every start; results keep the order of `starts`.
pub fn iterate_many(
    space: &Space,
    s: &MultiMap,
    t: &MultiMap,
    starts: &[Point],
    config: &SolverConfig,
) -> Result<Vec<EndPointResult>> {
    starts
        .par_iter()
        .map(|x0| iterate_endpoint(space, s, t, x0, config))
        .collect()
}

/// `true` iff `δ({u}, F(u)) ≤ eps`.
pub fn check_endpoint(space: &Space, f: &MultiMap, u: &Point, eps: f64) -> Result<bool> {
    let image = f.image(space, u)?;
    Ok(sets::delta(space.metric(), &BoundedSet::point(u.clone()), &image)? <= eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniquenessVerdict {
    Unique,
    MultipleComparable,
    MultipleIncomparable,
}

impl fmt::Display for UniquenessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UniquenessVerdict::Unique => "unique (consistent with theorem)",
            UniquenessVerdict::MultipleComparable => {
                "multiple comparable end points — contradicts hypothesis set"
            }
            UniquenessVerdict::MultipleIncomparable => {
                "multiple incomparable end points — theorem silent"
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub representative: Point,
    pub members: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub clusters: Vec<Cluster>,
    /// `(i, j, comparable)` for every pair of clusters `i < j`.
    pub pairs: Vec<(usize, usize, bool)>,
    pub verdict: UniquenessVerdict,
}

/// Greedily cluster converged end points at pitch `eps` and classify them.
pub fn uniqueness_check(
    results: &[EndPointResult],
    space: &Space,
    eps: f64,
) -> Result<UniquenessReport> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eps".into(),
            reason: format!("{eps} must be finite and > 0"),
        });
    }
    let metric = space.metric();
    let mut clusters: Vec<Cluster> = Vec::new();
    for u in results.iter().filter_map(EndPointResult::converged) {
        match clusters
            .iter_mut()
            .find(|c| metric.dist(c.representative.coords(), u.coords()) <= eps)
        {
            Some(c) => c.members += 1,
            None => clusters.push(Cluster {
                representative: u.clone(),
                members: 1,
            }),
        }
    }
    if clusters.is_empty() {
        return Err(Error::InvalidParameter {
            name: "results".into(),
            reason: "no converged result to check".into(),
        });
    }
    let mut pairs = Vec::new();
    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            let comparable = space.comparable(&clusters[i].representative, &clusters[j].representative);
            pairs.push((i, j, comparable));
        }
    }
    let verdict = if clusters.len() == 1 {
        UniquenessVerdict::Unique
    } else if pairs.iter().any(|p| p.2) {
        UniquenessVerdict::MultipleComparable
    } else {
        UniquenessVerdict::MultipleIncomparable
    };
    Ok(UniquenessReport {
        clusters,
        pairs,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneReport {
    pub holds: bool,
    pub first_violation: Option<usize>,
}

/// Check `a_n ≤ a_{n−1} + tol` and `a_n ≤ M_n + tol ≤ a_{n−1} + 2·tol`.
pub fn monotone_trace_check(trace: &IterationTrace, tolerance: f64) -> Result<MonotoneReport> {
    if trace.len() < 2 {
        return Err(Error::TraceTooShort {
            needed: 2,
            got: trace.len(),
        });
    }
    let rows = &trace.rows;
    let bad = |n: usize| {
        let r = &rows[n];
        if r.a > r.m + tolerance {
            return true;
        }
        n > 0 && {
            let prev = rows[n - 1].a;
            r.a > prev + tolerance || r.m + tolerance > prev + 2.0 * tolerance
        }
    };
    let first_violation = (0..rows.len()).find(|&n| bad(n));
    Ok(MonotoneReport {
        holds: first_violation.is_none(),
        first_violation,
    })
}
