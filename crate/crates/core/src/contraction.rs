//! Sampling-based verification of contraction conditions for a pair `(S, T)`.
//!
//! Only comparable pairs are tested. Grid sampling enumerates all ordered
//! pairs of a domain lattice and filters by comparability; random sampling
//! draws pairs until enough comparable ones are found. Pair evaluations run in
//! parallel and are aggregated in pair-index order, so a report depends only
//! on its inputs.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gauges::GaugePair;
use crate::sets::{self, BoundedSet};
use crate::setmaps::MultiMap;
use crate::space::{seeded_rng, Point, Space};

/// Absolute violation tolerance used when none is given.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// The inequality to check on comparable pairs.
#[derive(Debug, Clone, PartialEq)]
pub enum ContractionCondition {
    /// `ψ(δ(Sx,Ty)) ≤ ψ(M) − φ(M)`.
    WeakPsiPhi(GaugePair),
    /// `ψ(δ(Sx,Ty)) ≤ ψ(d) − φ(d)`.
    WeakPsiPhiDistance(GaugePair),
    /// `δ(Sx,Ty) ≤ λ·M`.
    LambdaMax { lambda: f64 },
    /// `δ(Sx,Ty) ≤ d / (d + 1)`.
    Rational,
    /// `ψ(δ(S^k x, T^k y)) ≤ ψ(M_k) − φ(M_k)` with `M_k` built from the powers.
    PowerWeak { gauges: GaugePair, k: usize },
}

impl ContractionCondition {
    pub fn lambda_max(lambda: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::InvalidParameter {
                name: "lambda".into(),
                reason: format!("{lambda} not in [0, 1)"),
            });
        }
        Ok(ContractionCondition::LambdaMax { lambda })
    }

    pub fn power_weak(gauges: GaugePair, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter {
                name: "k".into(),
                reason: "power exponent must be >= 1".into(),
            });
        }
        Ok(ContractionCondition::PowerWeak { gauges, k })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ContractionCondition::WeakPsiPhi(_) => "weak_psi_phi",
            ContractionCondition::WeakPsiPhiDistance(_) => "weak_psi_phi_distance",
            ContractionCondition::LambdaMax { .. } => "lambda_max",
            ContractionCondition::Rational => "rational",
            ContractionCondition::PowerWeak { .. } => "power_weak",
        }
    }

    fn power(&self) -> usize {
        match self {
            ContractionCondition::PowerWeak { k, .. } => *k,
            _ => 1,
        }
    }

    /// `(lhs, rhs)` of the inequality.
    fn sides(&self, delta_st: f64, m: f64, d: f64) -> (f64, f64) {
        match self {
            ContractionCondition::WeakPsiPhi(g) | ContractionCondition::PowerWeak { gauges: g, .. } => (
                g.psi.eval_unchecked(delta_st),
                g.psi.eval_unchecked(m) - g.phi.eval_unchecked(m),
            ),
            ContractionCondition::WeakPsiPhiDistance(g) => (
                g.psi.eval_unchecked(delta_st),
                g.psi.eval_unchecked(d) - g.phi.eval_unchecked(d),
            ),
            ContractionCondition::LambdaMax { lambda } => (delta_st, lambda * m),
            ContractionCondition::Rational => (delta_st, d / (d + 1.0)),
        }
    }
}

/// How pairs are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    /// All ordered pairs of a lattice with `per_axis` nodes per axis.
    Grid { per_axis: usize },
    /// Uniform pairs until `count` comparable ones are found.
    Random { count: usize, seed: u64 },
    /// Exactly these pairs (incomparable ones are skipped).
    Pairs(Vec<(Point, Point)>),
}

/// Random sampling gives up after this many draws per requested pair.
const MAX_DRAWS_PER_PAIR: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub x: Point,
    pub y: Point,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; negative for a violation.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub condition: &'static str,
    pub pairs_total: usize,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
    pub max_mixed_gauge: f64,
    pub min_slack: f64,
    pub tolerance: f64,
    /// Largest error bound of any discretized `D` term entering `M`.
    pub discretization_bound: f64,
    /// Deduplication pitch of the power images, when powers are involved.
    pub power_pitch: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub resolution: usize,
}

impl VerificationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn comparable_fraction(&self) -> f64 {
        self.pairs_checked as f64 / self.pairs_total.max(1) as f64
    }
}

/// Per-point data shared by every pair the point takes part in.
struct Prepared {
    point: Point,
    single: BoundedSet,
    s_image: BoundedSet,
    t_image: BoundedSet,
    /// `δ(x, Sx)`.
    s_residual: f64,
    /// `δ(x, Tx)`.
    t_residual: f64,
}

impl Prepared {
    fn new(space: &Space, s: &MultiMap, t: &MultiMap, point: Point) -> Result<Self> {
        let metric = space.metric();
        let single = BoundedSet::point(point.clone());
        let s_image = s.image(space, &point)?;
        let t_image = t.image(space, &point)?;
        let s_residual = sets::delta(metric, &single, &s_image)?;
        let t_residual = sets::delta(metric, &single, &t_image)?;
        Ok(Prepared {
            point,
            single,
            s_image,
            t_image,
            s_residual,
            t_residual,
        })
    }
}

/// Gauges of one comparable pair `(x, y)`.
struct PairEval {
    d: f64,
    delta_st: f64,
    m: f64,
    m_bound: f64,
}

fn eval_pair(space: &Space, x: &Prepared, y: &Prepared) -> Result<PairEval> {
    let metric = space.metric();
    let d = metric.dist(x.point.coords(), y.point.coords());
    let delta_st = sets::delta(metric, &x.s_image, &y.t_image)?;
    let cross_x = sets::dist_inf_with_bound(metric, &x.single, &y.t_image)?;
    let cross_y = sets::dist_inf_with_bound(metric, &y.single, &x.s_image)?;
    let m = d
        .max(x.s_residual)
        .max(y.t_residual)
        .max(0.5 * (cross_x.value + cross_y.value));
    Ok(PairEval {
        d,
        delta_st,
        m,
        m_bound: 0.5 * (cross_x.bound + cross_y.bound),
    })
}

struct Outcome {
    pairs_total: usize,
    pairs_checked: usize,
    violations: Vec<Violation>,
    max_m: f64,
    max_bound: f64,
    min_slack: f64,
}

impl Outcome {
    fn empty() -> Self {
        Outcome {
            pairs_total: 0,
            pairs_checked: 0,
            violations: Vec::new(),
            max_m: 0.0,
            max_bound: 0.0,
            min_slack: f64::INFINITY,
        }
    }

    fn merge(mut self, other: Outcome) -> Outcome {
        self.pairs_total += other.pairs_total;
        self.pairs_checked += other.pairs_checked;
        self.violations.extend(other.violations);
        self.max_m = self.max_m.max(other.max_m);
        self.max_bound = self.max_bound.max(other.max_bound);
        self.min_slack = self.min_slack.min(other.min_slack);
        self
    }

    fn record(
        &mut self,
        cond: &ContractionCondition,
        tolerance: f64,
        x: &Prepared,
        y: &Prepared,
        e: PairEval,
    ) {
        self.pairs_checked += 1;
        self.max_m = self.max_m.max(e.m);
        self.max_bound = self.max_bound.max(e.m_bound);
        let (lhs, rhs) = cond.sides(e.delta_st, e.m, e.d);
        let slack = rhs - lhs;
        self.min_slack = self.min_slack.min(slack);
        if lhs > rhs + tolerance {
            self.violations.push(Violation {
                x: x.point.clone(),
                y: y.point.clone(),
                lhs,
                rhs,
                slack,
            });
        }
    }
}

fn sweep(
    space: &Space,
    s: &MultiMap,
    t: &MultiMap,
    cond: &ContractionCondition,
    sampling: &Sampling,
    tolerance: f64,
) -> Result<Outcome> {
    let order = space.order();
    match sampling {
        Sampling::Grid { per_axis } => {
            let prepared: Vec<Prepared> = space
                .lattice((*per_axis).max(1))
                .into_par_iter()
                .map(|p| Prepared::new(space, s, t, p))
                .collect::<Result<_>>()?;
            let rows: Vec<Outcome> = prepared
                .par_iter()
                .map(|x| {
                    let mut out = Outcome::empty();
                    for y in &prepared {
                        out.pairs_total += 1;
                        if order.comparable(x.point.coords(), y.point.coords()) {
                            let e = eval_pair(space, x, y)?;
                            out.record(cond, tolerance, x, y, e);
                        }
                    }
                    Ok(out)
                })
                .collect::<Result<_>>()?;
            Ok(rows.into_iter().fold(Outcome::empty(), Outcome::merge))
        }
        Sampling::Random { count, seed } => {
            let mut rng = seeded_rng(*seed);
            let mut pairs = Vec::with_capacity(*count);
            let mut draws = 0;
            while pairs.len() < *count && draws < count * MAX_DRAWS_PER_PAIR {
                draws += 1;
                let x = space.sample(&mut rng);
                let y = space.sample(&mut rng);
                if order.comparable(x.coords(), y.coords()) {
                    pairs.push((x, y));
                }
            }
            let mut out = sweep_pairs(space, s, t, cond, &pairs, tolerance)?;
            out.pairs_total = draws;
            Ok(out)
        }
        Sampling::Pairs(pairs) => {
            let comparable: Vec<(Point, Point)> = pairs
                .iter()
                .filter(|(x, y)| order.comparable(x.coords(), y.coords()))
                .cloned()
                .collect();
            let mut out = sweep_pairs(space, s, t, cond, &comparable, tolerance)?;
            out.pairs_total = pairs.len();
            Ok(out)
        }
    }
}

fn sweep_pairs(
    space: &Space,
    s: &MultiMap,
    t: &MultiMap,
    cond: &ContractionCondition,
    pairs: &[(Point, Point)],
    tolerance: f64,
) -> Result<Outcome> {
    let parts: Vec<Outcome> = pairs
        .par_iter()
        .map(|(x, y)| {
            let px = Prepared::new(space, s, t, x.clone())?;
            let py = Prepared::new(space, s, t, y.clone())?;
            let mut out = Outcome::empty();
            out.pairs_total = 1;
            let e = eval_pair(space, &px, &py)?;
            out.record(cond, tolerance, &px, &py, e);
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(Outcome::empty(), Outcome::merge))
}

/// Check `cond` for `(S, T)` on every sampled comparable pair.
pub fn verify(
    space: &Space,
    s: &MultiMap,
    t: &MultiMap,
    cond: &ContractionCondition,
    sampling: &Sampling,
    tolerance: f64,
) -> Result<VerificationReport> {
    let k = cond.power();
    let (sk, tk) = (s.power(k)?, t.power(k)?);
    let out = sweep(space, &sk, &tk, cond, sampling, tolerance)?;
    let (seed, grid) = match sampling {
        Sampling::Grid { per_axis } => (None, Some(*per_axis)),
        Sampling::Random { seed, .. } => (Some(*seed), None),
        Sampling::Pairs(_) => (None, None),
    };
    Ok(VerificationReport {
        condition: cond.kind(),
        pairs_total: out.pairs_total,
        pairs_checked: out.pairs_checked,
        violations: out.violations,
        max_mixed_gauge: out.max_m,
        min_slack: out.min_slack,
        tolerance,
        discretization_bound: out.max_bound,
        power_pitch: (k > 1).then(|| sk.power_pitch(space)),
        seed,
        grid,
        resolution: s.resolution().max(t.resolution()),
    })
}

/// Largest `M(x, y)` over the sampled comparable pairs.
pub fn max_mixed_gauge(
    space: &Space,
    s: &MultiMap,
    t: &MultiMap,
    sampling: &Sampling,
) -> Result<f64> {
    let out = sweep(
        space,
        s,
        t,
        &ContractionCondition::Rational,
        sampling,
        f64::INFINITY,
    )?;
    Ok(out.max_m)
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "condition: {}", self.condition)?;
        writeln!(f, "pairs_total: {}", self.pairs_total)?;
        writeln!(f, "pairs_checked: {}", self.pairs_checked)?;
        writeln!(f, "comparable_fraction: {:.6}", self.comparable_fraction())?;
        writeln!(f, "violations: {}", self.violations.len())?;
        writeln!(f, "max_mixed_gauge: {:.12e}", self.max_mixed_gauge)?;
        writeln!(f, "min_slack: {:.12e}", self.min_slack)?;
        writeln!(f, "tolerance: {:e}", self.tolerance)?;
        writeln!(f, "discretization_bound: {:e}", self.discretization_bound)?;
        if let Some(p) = &self.power_pitch {
            writeln!(f, "power_pitch: {p:?}")?;
        }
        match (self.grid, self.seed) {
            (Some(g), _) => writeln!(f, "sampling: grid {g}")?,
            (_, Some(s)) => writeln!(f, "sampling: random seed {s}")?,
            _ => writeln!(f, "sampling: explicit pairs")?,
        }
        writeln!(f, "resolution: {}", self.resolution)
    }
}

impl VerificationReport {
    /// One CSV row per violation: `x..., y..., lhs, rhs, slack`.
    pub fn violations_csv(&self, dimension: usize) -> String {
        let mut out = String::new();
        let xs: Vec<String> = (0..dimension).map(|i| format!("x{i}")).collect();
        let ys: Vec<String> = (0..dimension).map(|i| format!("y{i}")).collect();
        out.push_str(&format!("{},{},lhs,rhs,slack\n", xs.join(","), ys.join(",")));
        for v in &self.violations {
            let coords: Vec<String> = v
                .x
                .coords()
                .iter()
                .chain(v.y.coords())
                .map(|c| format!("{c:e}"))
                .collect();
            out.push_str(&format!(
                "{},{:e},{:e},{:e}\n",
                coords.join(","),
                v.lhs,
                v.rhs,
                v.slack
            ));
        }
        out
    }
}
