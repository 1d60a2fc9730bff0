//! Finitely presented sequence fixtures and axiom checks for L-spaces and
//! their ordered variants.
//!
//! Elements are coordinate vectors (scalars are one-dimensional). Sequences
//! are indexed from 1. Monotonicity premises are checked on a finite prefix
//! and must agree with the generator's analytic monotone class.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{seeded_rng, Order};

pub const DEFAULT_PREFIX_LENGTH: usize = 64;

/// Absolute tolerance when comparing two limits for equality.
const LIMIT_TOLERANCE: f64 = 1e-12;

/// A sequence element; serialized as a bare number when one-dimensional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ElemRepr", into = "ElemRepr")]
pub struct Elem(pub Vec<f64>);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ElemRepr {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl From<ElemRepr> for Elem {
    fn from(r: ElemRepr) -> Self {
        match r {
            ElemRepr::Scalar(x) => Elem(vec![x]),
            ElemRepr::Vector(v) => Elem(v),
        }
    }
}

impl From<Elem> for ElemRepr {
    fn from(e: Elem) -> Self {
        match e.0.as_slice() {
            [x] => ElemRepr::Scalar(*x),
            _ => ElemRepr::Vector(e.0),
        }
    }
}

impl Elem {
    pub fn scalar(x: f64) -> Self {
        Elem(vec![x])
    }

    fn close_to(&self, other: &Elem) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| (a - b).abs() <= LIMIT_TOLERANCE)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [x] => write!(f, "{x}"),
            v => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}

/// Rule producing the n-th term (n ≥ 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", content = "params", rename_all = "snake_case")]
pub enum Generator {
    Constant { value: Elem },
    /// `start + (n − 1)·step`.
    Arithmetic { start: Elem, step: Elem },
    /// `limit + (start − limit)·ratio^(n−1)` with `0 ≤ ratio < 1`.
    Geometric { start: Elem, limit: Elem, ratio: f64 },
    /// Enumerated first terms followed by `then` (re-indexed from 1).
    Prefixed { prefix: Vec<Elem>, then: Box<Generator> },
    /// Terms `offset + 1, offset + 1 + stride, …` of `parent`.
    #[serde(skip)]
    Subsequence {
        parent: Box<Generator>,
        stride: usize,
        offset: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneClass {
    Constant,
    Increasing { strict: bool },
    Decreasing { strict: bool },
    Unclassified,
}

impl MonotoneClass {
    pub fn non_increasing(self) -> bool {
        matches!(self, MonotoneClass::Constant | MonotoneClass::Decreasing { .. })
    }

    pub fn non_decreasing(self) -> bool {
        matches!(self, MonotoneClass::Constant | MonotoneClass::Increasing { .. })
    }

    /// Componentwise class of a finite run of terms.
    fn of_terms(terms: &[Elem]) -> MonotoneClass {
        let (mut up, mut down, mut strict) = (true, true, true);
        for w in terms.windows(2) {
            let (a, b) = (&w[0].0, &w[1].0);
            up &= a.iter().zip(b).all(|(x, y)| x <= y);
            down &= a.iter().zip(b).all(|(x, y)| x >= y);
            strict &= a.iter().zip(b).all(|(x, y)| x != y);
        }
        match (up, down) {
            (true, true) => MonotoneClass::Constant,
            (true, false) => MonotoneClass::Increasing { strict },
            (false, true) => MonotoneClass::Decreasing { strict },
            (false, false) => MonotoneClass::Unclassified,
        }
    }
}

impl Generator {
    pub fn constant(value: Elem) -> Self {
        Generator::Constant { value }
    }

    pub fn arithmetic(start: Elem, step: Elem) -> Self {
        Generator::Arithmetic { start, step }
    }

    pub fn geometric(start: Elem, limit: Elem, ratio: f64) -> Self {
        Generator::Geometric { start, limit, ratio }
    }

    pub fn prefixed(prefix: Vec<Elem>, then: Generator) -> Self {
        Generator::Prefixed {
            prefix,
            then: Box::new(then),
        }
    }

    /// Terms `offset + 1, offset + 1 + stride, …`.
    pub fn subsequence(&self, stride: usize, offset: usize) -> Generator {
        Generator::Subsequence {
            parent: Box::new(self.clone()),
            stride: stride.max(1),
            offset,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dims = |a: &Elem, b: &Elem| {
            if a.0.len() == b.0.len() && !a.0.is_empty() {
                Ok(())
            } else {
                Err(Error::DimensionMismatch {
                    expected: a.0.len(),
                    got: b.0.len(),
                })
            }
        };
        let finite = |e: &Elem| {
            if e.0.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(Error::NonFinite(e.0.clone()))
            }
        };
        match self {
            Generator::Constant { value } => finite(value),
            Generator::Arithmetic { start, step } => {
                dims(start, step)?;
                finite(start)?;
                finite(step)
            }
            Generator::Geometric { start, limit, ratio } => {
                dims(start, limit)?;
                finite(start)?;
                finite(limit)?;
                if !(0.0..1.0).contains(ratio) {
                    return Err(Error::InvalidParameter {
                        name: "ratio".into(),
                        reason: format!("{ratio} not in [0, 1)"),
                    });
                }
                Ok(())
            }
            Generator::Prefixed { prefix, then } => {
                then.validate()?;
                let first = then.term(1);
                for e in prefix {
                    dims(&first, e)?;
                    finite(e)?;
                }
                Ok(())
            }
            Generator::Subsequence { parent, .. } => parent.validate(),
        }
    }

    /// The n-th term, `n ≥ 1`.
    pub fn term(&self, n: usize) -> Elem {
        let k = n.max(1) - 1;
        match self {
            Generator::Constant { value } => value.clone(),
            Generator::Arithmetic { start, step } => Elem(
                start
                    .0
                    .iter()
                    .zip(&step.0)
                    .map(|(s, d)| s + k as f64 * d)
                    .collect(),
            ),
            Generator::Geometric { start, limit, ratio } => {
                let q = ratio.powi(k as i32);
                Elem(
                    start
                        .0
                        .iter()
                        .zip(&limit.0)
                        .map(|(s, l)| l + (s - l) * q)
                        .collect(),
                )
            }
            Generator::Prefixed { prefix, then } => match prefix.get(k) {
                Some(e) => e.clone(),
                None => then.term(n - prefix.len()),
            },
            Generator::Subsequence {
                parent,
                stride,
                offset,
            } => parent.term(offset + k * stride + 1),
        }
    }

    pub fn prefix(&self, len: usize) -> Vec<Elem> {
        (1..=len).map(|n| self.term(n)).collect()
    }

    /// Analytic (componentwise) monotone class.
    pub fn monotone_class(&self) -> MonotoneClass {
        match self {
            Generator::Constant { .. } => MonotoneClass::Constant,
            Generator::Arithmetic { step, .. } => {
                MonotoneClass::of_terms(&[Elem(vec![0.0; step.0.len()]), step.clone()])
            }
            Generator::Geometric { start, limit, ratio } => {
                if *ratio == 0.0 {
                    // jumps to the limit after the first term
                    return MonotoneClass::of_terms(&[start.clone(), limit.clone()])
                        .weaken_unless(start == limit);
                }
                MonotoneClass::of_terms(&[start.clone(), limit.clone()])
            }
            Generator::Prefixed { prefix, then } => {
                let inner = then.monotone_class();
                let mut head = prefix.clone();
                head.extend([then.term(1), then.term(2)]);
                let outer = MonotoneClass::of_terms(&head);
                match (outer, inner) {
                    (a, b) if a == b => a,
                    (MonotoneClass::Increasing { strict: s }, MonotoneClass::Increasing { strict: t }) => {
                        MonotoneClass::Increasing { strict: s && t }
                    }
                    (MonotoneClass::Decreasing { strict: s }, MonotoneClass::Decreasing { strict: t }) => {
                        MonotoneClass::Decreasing { strict: s && t }
                    }
                    _ => MonotoneClass::Unclassified,
                }
            }
            Generator::Subsequence { parent, .. } => parent.monotone_class(),
        }
    }

    /// Limit under metric convergence, if the sequence converges.
    pub fn metric_limit(&self) -> Option<Elem> {
        match self {
            Generator::Constant { value } => Some(value.clone()),
            Generator::Arithmetic { start, step } => {
                step.0.iter().all(|d| *d == 0.0).then(|| start.clone())
            }
            Generator::Geometric { limit, .. } => Some(limit.clone()),
            Generator::Prefixed { then, .. } => then.metric_limit(),
            Generator::Subsequence { parent, .. } => parent.metric_limit(),
        }
    }

    fn is_constant(&self) -> bool {
        self.monotone_class() == MonotoneClass::Constant
    }
}

impl MonotoneClass {
    fn weaken_unless(self, keep: bool) -> MonotoneClass {
        match self {
            MonotoneClass::Increasing { .. } if !keep => MonotoneClass::Increasing { strict: false },
            MonotoneClass::Decreasing { .. } if !keep => MonotoneClass::Decreasing { strict: false },
            other => other,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = self.prefix(4).iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}, …}}", shown.join(", "))
    }
}

/// A declared sequence of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub generator: Generator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_limit: Option<Elem>,
}

impl Fixture {
    pub fn new(generator: Generator) -> Self {
        Fixture {
            name: None,
            generator,
            declared_limit: None,
        }
    }

    pub fn with_limit(mut self, limit: Elem) -> Self {
        self.declared_limit = Some(limit);
        self
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }
}

/// The instance's `Lim : c(X) → X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum LimRule {
    /// Positive integers: constants keep their value, strictly increasing
    /// sequences (subsequences of `{n}`) go to 1.
    #[serde(alias = "naturals_paper")]
    Naturals,
    /// Negative integers: constants keep their value, strictly decreasing
    /// sequences (subsequences of `{−n}`) go to −1.
    #[serde(alias = "negatives_paper")]
    Negatives,
    /// Limit of metric convergence.
    Metric,
    /// First term; breaks the subsequence axiom on purpose.
    FirstTerm,
}

impl LimRule {
    fn name(self) -> &'static str {
        match self {
            LimRule::Naturals => "naturals",
            LimRule::Negatives => "negatives",
            LimRule::Metric => "metric",
            LimRule::FirstTerm => "first_term",
        }
    }

    pub fn lim(self, g: &Generator, prefix_length: usize) -> Result<Elem> {
        let undefined = || Error::LimUndefined {
            rule: self.name().into(),
            sequence: g.to_string(),
        };
        let integer_terms = |positive: bool| {
            g.prefix(prefix_length.max(2)).iter().all(|e| {
                matches!(e.0.as_slice(), [x] if x.fract() == 0.0 && if positive { *x >= 1.0 } else { *x <= -1.0 })
            })
        };
        match self {
            LimRule::Naturals | LimRule::Negatives => {
                let positive = self == LimRule::Naturals;
                if !integer_terms(positive) {
                    return Err(undefined());
                }
                match (g.monotone_class(), positive) {
                    (MonotoneClass::Constant, _) => Ok(g.term(1)),
                    (MonotoneClass::Increasing { strict: true }, true) => Ok(Elem::scalar(1.0)),
                    (MonotoneClass::Decreasing { strict: true }, false) => Ok(Elem::scalar(-1.0)),
                    _ => Err(undefined()),
                }
            }
            LimRule::Metric => g.metric_limit().ok_or_else(undefined),
            LimRule::FirstTerm => Ok(g.term(1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LAxiom {
    /// Constant sequences converge to their value.
    Constants,
    /// Subsequences share the parent's limit.
    Subsequences,
    /// The rule disagrees with the fixture's declared limit.
    DeclaredLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LViolation {
    pub axiom: LAxiom,
    pub sequence: Generator,
    pub expected: Elem,
    pub got: Elem,
}

impl LViolation {
    /// Re-run the single check behind this witness.
    pub fn revalidate(&self, lim: LimRule, prefix_length: usize) -> bool {
        lim.lim(&self.sequence, prefix_length)
            .map(|l| l == self.got && !l.close_to(&self.expected))
            .unwrap_or(false)
    }
}

impl fmt::Display for LViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.axiom {
            LAxiom::Constants => "constant axiom",
            LAxiom::Subsequences => "subsequence axiom",
            LAxiom::DeclaredLimit => "declared limit",
        };
        write!(
            f,
            "{what}: Lim {} = {} but expected {}",
            self.sequence, self.got, self.expected
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LSpaceReport {
    pub fixtures: usize,
    pub constants_checked: usize,
    pub subsequences_checked: usize,
    pub violations: Vec<LViolation>,
}

impl LSpaceReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Subsequences sampled for the subsequence axiom: every second term (both
/// parities) and tails shifted by 1 and 3.
const SUBSEQUENCES: [(usize, usize); 4] = [(2, 0), (2, 1), (1, 1), (1, 3)];

pub fn check_l_space(fixtures: &[Fixture], lim: LimRule, prefix_length: usize) -> Result<LSpaceReport> {
    if fixtures.is_empty() {
        return Err(Error::InvalidParameter {
            name: "fixtures".into(),
            reason: "at least one fixture is required".into(),
        });
    }
    let mut violations = Vec::new();

    // (i) every value appearing in a fixture prefix, as a constant sequence
    let mut values: Vec<Elem> = Vec::new();
    for f in fixtures {
        f.generator.validate()?;
        for e in f.generator.prefix(prefix_length.min(8)) {
            if !values.contains(&e) {
                values.push(e);
            }
        }
    }
    for v in &values {
        let g = Generator::constant(v.clone());
        let got = lim.lim(&g, prefix_length)?;
        if !got.close_to(v) {
            violations.push(LViolation {
                axiom: LAxiom::Constants,
                sequence: g,
                expected: v.clone(),
                got,
            });
        }
    }

    // (ii) subsequences, plus agreement with declared limits
    let mut subsequences_checked = 0;
    for f in fixtures {
        let parent = lim.lim(&f.generator, prefix_length)?;
        if let Some(declared) = &f.declared_limit {
            if !parent.close_to(declared) {
                violations.push(LViolation {
                    axiom: LAxiom::DeclaredLimit,
                    sequence: f.generator.clone(),
                    expected: declared.clone(),
                    got: parent.clone(),
                });
            }
        }
        for (stride, offset) in SUBSEQUENCES {
            let sub = f.generator.subsequence(stride, offset);
            let got = lim.lim(&sub, prefix_length)?;
            subsequences_checked += 1;
            if !got.close_to(&parent) {
                violations.push(LViolation {
                    axiom: LAxiom::Subsequences,
                    sequence: sub,
                    expected: parent.clone(),
                    got,
                });
            }
        }
    }
    Ok(LSpaceReport {
        fixtures: fixtures.len(),
        constants_checked: values.len(),
        subsequences_checked,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Termwise order passes to limits.
    #[serde(rename = "L")]
    L,
    /// Non-increasing sequences lie above their limit.
    #[serde(rename = "L_down")]
    LDown,
    /// Non-decreasing sequences lie below their limit.
    #[serde(rename = "L_up")]
    LUp,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::L, Variant::LDown, Variant::LUp];
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::L => "ordered L",
            Variant::LDown => "ordered L_down",
            Variant::LUp => "ordered L_up",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrderedViolation {
    /// `x_n ⪯ y_n` on the prefix but `Lim x ⋠ Lim y`.
    Limits {
        x: Generator,
        y: Generator,
        lim_x: Elem,
        lim_y: Elem,
    },
    /// A monotone sequence on the wrong side of its limit at term `n`.
    Term {
        variant: Variant,
        x: Generator,
        lim: Elem,
        n: usize,
        term: Elem,
    },
}

impl OrderedViolation {
    /// Re-run the single check behind this witness.
    pub fn revalidate(&self, lim: LimRule, order: Order, prefix_length: usize) -> bool {
        match self {
            OrderedViolation::Limits { x, y, .. } => {
                termwise_leq(order, x, y, prefix_length)
                    && match (lim.lim(x, prefix_length), lim.lim(y, prefix_length)) {
                        (Ok(a), Ok(b)) => !order.leq(&a.0, &b.0),
                        _ => false,
                    }
            }
            OrderedViolation::Term { variant, x, n, .. } => {
                premise(*variant, order, x, prefix_length)
                    && lim
                        .lim(x, prefix_length)
                        .map(|l| !on_correct_side(*variant, order, &l, &x.term(*n)))
                        .unwrap_or(false)
            }
        }
    }
}

impl fmt::Display for OrderedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderedViolation::Limits { x, y, lim_x, lim_y } => write!(
                f,
                "x = {x} -> {lim_x}, y = {y} -> {lim_y}, x_n <= y_n but {lim_x} !<= {lim_y}"
            ),
            OrderedViolation::Term {
                variant,
                x,
                lim,
                n,
                term,
            } => match variant {
                Variant::LUp => write!(f, "x = {x} -> {lim} is non-decreasing but x_{n} = {term} !<= {lim}"),
                _ => write!(f, "x = {x} -> {lim} is non-increasing but {lim} !<= x_{n} = {term}"),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// No non-constant fixture (or pair) meets the premise.
    VacuousPass,
    Violations,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::VacuousPass => "vacuous pass",
            Verdict::Violations => "violation",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderedReport {
    pub variant: Variant,
    /// Fixtures (or ordered pairs for `L`) meeting the premise.
    pub premises_met: usize,
    /// Of those, how many involve a non-constant sequence.
    pub nonconstant_premises: usize,
    pub violations: Vec<OrderedViolation>,
    pub verdict: Verdict,
}

fn termwise_leq(order: Order, x: &Generator, y: &Generator, prefix_length: usize) -> bool {
    (1..=prefix_length).all(|n| order.leq(&x.term(n).0, &y.term(n).0))
}

fn premise(variant: Variant, order: Order, x: &Generator, prefix_length: usize) -> bool {
    let class = x.monotone_class();
    let prefix = x.prefix(prefix_length);
    match variant {
        Variant::LDown => {
            class.non_increasing() && prefix.windows(2).all(|w| order.leq(&w[1].0, &w[0].0))
        }
        Variant::LUp => {
            class.non_decreasing() && prefix.windows(2).all(|w| order.leq(&w[0].0, &w[1].0))
        }
        Variant::L => true,
    }
}

fn on_correct_side(variant: Variant, order: Order, lim: &Elem, term: &Elem) -> bool {
    match variant {
        Variant::LUp => order.leq(&term.0, &lim.0),
        _ => order.leq(&lim.0, &term.0),
    }
}

pub fn check_ordered_variant(
    variant: Variant,
    fixtures: &[Fixture],
    lim: LimRule,
    order: Order,
    prefix_length: usize,
) -> Result<OrderedReport> {
    let gens: Vec<&Generator> = fixtures.iter().map(|f| &f.generator).collect();
    let limits: Vec<Elem> = gens
        .iter()
        .map(|g| lim.lim(g, prefix_length))
        .collect::<Result<_>>()?;
    let mut premises_met = 0;
    let mut nonconstant_premises = 0;
    let mut violations = Vec::new();
    match variant {
        Variant::L => {
            for (i, x) in gens.iter().enumerate() {
                for (j, y) in gens.iter().enumerate() {
                    if i == j || !termwise_leq(order, x, y, prefix_length) {
                        continue;
                    }
                    premises_met += 1;
                    if !(x.is_constant() && y.is_constant()) {
                        nonconstant_premises += 1;
                    }
                    if !order.leq(&limits[i].0, &limits[j].0) {
                        violations.push(OrderedViolation::Limits {
                            x: (*x).clone(),
                            y: (*y).clone(),
                            lim_x: limits[i].clone(),
                            lim_y: limits[j].clone(),
                        });
                    }
                }
            }
        }
        Variant::LDown | Variant::LUp => {
            for (i, x) in gens.iter().enumerate() {
                if !premise(variant, order, x, prefix_length) {
                    continue;
                }
                premises_met += 1;
                if !x.is_constant() {
                    nonconstant_premises += 1;
                }
                if let Some(n) = (1..=prefix_length)
                    .find(|&n| !on_correct_side(variant, order, &limits[i], &x.term(n)))
                {
                    violations.push(OrderedViolation::Term {
                        variant,
                        x: (*x).clone(),
                        lim: limits[i].clone(),
                        n,
                        term: x.term(n),
                    });
                }
            }
        }
    }
    let verdict = if !violations.is_empty() {
        Verdict::Violations
    } else if nonconstant_premises == 0 {
        Verdict::VacuousPass
    } else {
        Verdict::Pass
    };
    Ok(OrderedReport {
        variant,
        premises_met,
        nonconstant_premises,
        violations,
        verdict,
    })
}

/// Geometric sequences in the plane converging to limits on a 0.25 grid.
///
/// Ratios stay in `[0.1, 0.5]` and limits are at least 0.25 apart per
/// coordinate, so a 64-term prefix decides every termwise premise correctly.
pub fn plane_fixtures(count: usize, seed: u64) -> Vec<Fixture> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let limit: Vec<f64> = (0..2).map(|_| rng.gen_range(-4i32..=4) as f64 * 0.25).collect();
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let start: Vec<f64> = limit
                .iter()
                .map(|l| l + sign * rng.gen_range(0.0..2.0))
                .collect();
            let ratio = rng.gen_range(0.1..=0.5);
            let limit = Elem(limit);
            Fixture::new(Generator::geometric(Elem(start), limit.clone(), ratio)).with_limit(limit)
        })
        .collect()
}
