//! Control functions ψ and φ on the nonnegative reals.
//!
//! The families form a closed registry so instances stay serializable. Class
//! membership is checked empirically on a bounded domain `[0, T]`: the
//! contraction argument never evaluates a gauge beyond the diameter of the
//! space, so that is the default `T`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named gauge family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gauge {
    /// `2t` on `[0, 1/2)`, `3` from `1/2` on.
    StepPsi,
    /// `t/5` on `[0, 5)`, `1/2` from `5` on.
    CappedPhi,
    Identity,
    /// `(1 - λ) t`.
    Linear { lambda: f64 },
    /// `t² / (t + 1)`.
    Rational,
    /// `slope · t + intercept`.
    Affine { slope: f64, intercept: f64 },
    /// `coef · t^exponent`.
    Power { coef: f64, exponent: f64 },
}

/// Which slot of the pair a declaration fills; `"example"` resolves per slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Psi,
    Phi,
}

/// Serialized form: `{"name": "linear", "params": {"lambda": 0.5}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

fn invalid(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        reason: reason.into(),
    }
}

impl Gauge {
    pub fn from_spec(spec: &GaugeSpec, slot: Slot) -> Result<Gauge> {
        let allowed: &[&str] = match spec.name.as_str() {
            "linear" => &["lambda"],
            "affine" => &["slope", "intercept"],
            "power" => &["coef", "exponent"],
            _ => &[],
        };
        if let Some(extra) = spec.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(invalid(
                extra,
                format!("not a parameter of gauge `{}`", spec.name),
            ));
        }
        let param = |key: &str| -> Result<f64> {
            spec.params
                .get(key)
                .copied()
                .ok_or_else(|| invalid(key, format!("required by gauge `{}`", spec.name)))
        };
        let gauge = match (spec.name.as_str(), slot) {
            ("example" | "paper", Slot::Psi) | ("step", _) => Gauge::StepPsi,
            ("example" | "paper", Slot::Phi) | ("capped", _) => Gauge::CappedPhi,
            ("identity", _) => Gauge::Identity,
            ("linear", _) => Gauge::Linear {
                lambda: param("lambda")?,
            },
            ("rational", _) => Gauge::Rational,
            ("zero", _) => Gauge::Affine {
                slope: 0.0,
                intercept: 0.0,
            },
            ("affine", _) => Gauge::Affine {
                slope: param("slope")?,
                intercept: spec.params.get("intercept").copied().unwrap_or(0.0),
            },
            ("power", _) => Gauge::Power {
                coef: param("coef")?,
                exponent: param("exponent")?,
            },
            (other, _) => return Err(invalid("name", format!("unknown gauge `{other}`"))),
        };
        gauge.validate()?;
        Ok(gauge)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Gauge::Linear { lambda } if !(0.0..1.0).contains(&lambda) => {
                Err(invalid("lambda", format!("{lambda} not in [0, 1)")))
            }
            Gauge::Affine { slope, intercept }
                if !(slope >= 0.0 && intercept >= 0.0 && slope.is_finite() && intercept.is_finite()) =>
            {
                Err(invalid("affine", "slope and intercept must be finite and >= 0"))
            }
            Gauge::Power { coef, exponent }
                if !(coef >= 0.0 && exponent > 0.0 && coef.is_finite() && exponent.is_finite()) =>
            {
                Err(invalid("power", "coef must be >= 0 and exponent > 0"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::GaugeDomain(t));
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        match *self {
            Gauge::StepPsi => {
                if t < 0.5 {
                    2.0 * t
                } else {
                    3.0
                }
            }
            Gauge::CappedPhi => {
                if t < 5.0 {
                    t / 5.0
                } else {
                    0.5
                }
            }
            Gauge::Identity => t,
            Gauge::Linear { lambda } => (1.0 - lambda) * t,
            Gauge::Rational => t * t / (t + 1.0),
            Gauge::Affine { slope, intercept } => slope * t + intercept,
            Gauge::Power { coef, exponent } => coef * t.powf(exponent),
        }
    }
}

/// The pair `(ψ, φ)` plus the upper end of the domain on which it was
/// certified, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePair {
    pub psi: Gauge,
    pub phi: Gauge,
    verified_domain: Option<f64>,
}

impl GaugePair {
    pub fn new(psi: Gauge, phi: Gauge) -> Self {
        GaugePair {
            psi,
            phi,
            verified_domain: None,
        }
    }

    /// Step ψ with capped φ; ψ jumps from 1 to 3 at `t = 1/2`.
    pub fn example() -> Self {
        GaugePair::new(Gauge::StepPsi, Gauge::CappedPhi)
    }

    pub fn eval_psi(&self, t: f64) -> Result<f64> {
        self.psi.eval(t)
    }

    pub fn eval_phi(&self, t: f64) -> Result<f64> {
        self.phi.eval(t)
    }

    pub fn verified_domain(&self) -> Option<f64> {
        self.verified_domain
    }

    /// Run both class checks on `[0, domain_hi]`; on success record the
    /// domain as verified.
    pub fn certify(&mut self, domain_hi: f64, grid: usize) -> (UpsilonReport, PhiReport) {
        let ups = check_upsilon(self, domain_hi, grid);
        let eps: Vec<f64> = [1e-3, 1e-2, 1e-1, 1.0]
            .into_iter()
            .map(|e| e * domain_hi.max(f64::MIN_POSITIVE))
            .collect();
        let phi = check_phi_property(self, &eps, domain_hi);
        if ups.holds() && phi.holds() {
            self.verified_domain = Some(domain_hi);
        }
        (ups, phi)
    }
}

/// One-sided limits are probed along `t ± 2^-k`, `k = 1..=PROBE_DEPTH`.
pub const PROBE_DEPTH: i32 = 40;
/// Maximal disagreement between limits before a jump is reported.
pub const LIMIT_TOLERANCE: f64 = 1e-9;
const BISECTION_STEPS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityViolation {
    pub t0: f64,
    pub t1: f64,
    pub value0: f64,
    pub value1: f64,
}

/// A point where the one-sided limits of ψ and its value do not agree.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpWitness {
    pub t: f64,
    pub left: Option<f64>,
    pub value: f64,
    pub right: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpsilonReport {
    pub domain_hi: f64,
    pub grid: usize,
    pub negative: Vec<f64>,
    pub monotonicity: Vec<MonotonicityViolation>,
    pub jumps: Vec<JumpWitness>,
}

impl UpsilonReport {
    pub fn holds(&self) -> bool {
        self.negative.is_empty() && self.monotonicity.is_empty() && self.jumps.is_empty()
    }
}

/// Empirical membership of ψ in the class of nondecreasing functions whose
/// limits agree along sequences with a common limit, on `[0, domain_hi]`.
pub fn check_upsilon(g: &GaugePair, domain_hi: f64, grid: usize) -> UpsilonReport {
    let psi = |t: f64| g.psi.eval_unchecked(t);
    let grid = grid.max(8);
    let nodes: Vec<f64> = (0..=grid)
        .map(|i| {
            if i == grid {
                domain_hi
            } else {
                domain_hi * (i as f64 / grid as f64)
            }
        })
        .collect();
    let values: Vec<f64> = nodes.iter().map(|&t| psi(t)).collect();

    let negative = nodes
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v < 0.0)
        .map(|(&t, _)| t)
        .collect();

    let mut monotonicity = Vec::new();
    for i in 0..grid {
        if values[i + 1] < values[i] {
            monotonicity.push(MonotonicityViolation {
                t0: nodes[i],
                t1: nodes[i + 1],
                value0: values[i],
                value1: values[i + 1],
            });
        }
    }

    let step = 2f64.powi(-PROBE_DEPTH);
    let mut jumps: Vec<JumpWitness> = Vec::new();
    for (&t, &value) in nodes.iter().zip(&values) {
        let left = (t - step >= 0.0 && t > 0.0).then(|| psi(t - step));
        let right = (t + step <= domain_hi).then(|| psi(t + step));
        let off = |lim: Option<f64>| lim.is_some_and(|l| (l - value).abs() > LIMIT_TOLERANCE);
        if off(left) || off(right) {
            jumps.push(JumpWitness {
                t,
                left,
                value,
                right,
            });
        }
    }

    // jumps strictly between grid nodes: bisect towards the larger increment
    for i in 0..grid {
        let (mut a, mut b) = (nodes[i], nodes[i + 1]);
        if (values[i + 1] - values[i]).abs() <= LIMIT_TOLERANCE {
            continue;
        }
        for _ in 0..BISECTION_STEPS {
            let m = 0.5 * (a + b);
            if (psi(m) - psi(a)).abs() >= (psi(b) - psi(m)).abs() {
                b = m;
            } else {
                a = m;
            }
        }
        if (psi(b) - psi(a)).abs() > LIMIT_TOLERANCE {
            let t = 0.5 * (a + b);
            if jumps.iter().all(|j| (j.t - t).abs() > 1e-6) {
                jumps.push(JumpWitness {
                    t,
                    left: Some(psi(a)),
                    value: psi(t),
                    right: Some(psi(b)),
                });
            }
        }
    }
    jumps.sort_by(|x, y| x.t.total_cmp(&y.t));

    UpsilonReport {
        domain_hi,
        grid,
        negative,
        monotonicity,
        jumps,
    }
}

/// Values at or below this count as zero when judging `inf φ > 0`.
pub const PHI_ZERO: f64 = 1e-12;
const PHI_SAMPLES: usize = 2048;
const PHI_REFINE_ROUNDS: usize = 4;
const PHI_REFINE_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct PhiEntry {
    pub eps: f64,
    /// Sampled `inf { φ(t) : eps ≤ t ≤ domain_hi }`.
    pub inf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiReport {
    pub domain_hi: f64,
    pub entries: Vec<PhiEntry>,
}

impl PhiReport {
    /// The eps values at which the infimum vanishes.
    pub fn failing(&self) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|e| e.inf <= PHI_ZERO)
            .map(|e| e.eps)
            .collect()
    }

    pub fn holds(&self) -> bool {
        self.failing().is_empty()
    }
}

fn sampled_inf(phi: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return phi(lo);
    }
    let grid = |a: f64, b: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    b
                } else {
                    a + (b - a) * (i as f64 / (n - 1) as f64)
                }
            })
            .collect()
    };
    let mut nodes = grid(lo, hi, PHI_SAMPLES);
    let mut best = f64::INFINITY;
    for _ in 0..=PHI_REFINE_ROUNDS {
        let (idx, val) = nodes
            .iter()
            .map(|&t| phi(t))
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        best = best.min(val);
        let a = nodes[idx.saturating_sub(1)];
        let b = nodes[(idx + 1).min(nodes.len() - 1)];
        nodes = grid(a, b, PHI_REFINE_SAMPLES);
    }
    best
}

/// For each eps, the sampled infimum of φ over `[eps, domain_hi]`. The
/// implication `φ(tₙ) → 0 ⇒ tₙ → 0` holds on the bounded domain iff every
/// infimum is positive.
pub fn check_phi_property(g: &GaugePair, eps_grid: &[f64], domain_hi: f64) -> PhiReport {
    let phi = |t: f64| g.phi.eval_unchecked(t);
    let mut entries: Vec<PhiEntry> = eps_grid
        .iter()
        .map(|&eps| PhiEntry {
            eps,
            inf: sampled_inf(phi, eps, domain_hi),
        })
        .collect();

    // [eps1, T] contains [eps2, T] for eps1 <= eps2, so the smaller eps
    // inherits any lower value found for the larger one
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&i, &j| entries[j].eps.total_cmp(&entries[i].eps));
    let mut running = f64::INFINITY;
    for i in order {
        running = running.min(entries[i].inf);
        entries[i].inf = running;
    }

    PhiReport { domain_hi, entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str, params: &[(&str, f64)]) -> GaugeSpec {
        GaugeSpec {
            name: name.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    #[test]
    fn step_psi_values() {
        let g = GaugePair::example();
        let t = 0.05 * 2f64.sqrt();
        assert!((g.eval_psi(t).unwrap() - 0.1414214).abs() < 1e-7);
        assert_eq!(g.eval_psi(0.7).unwrap(), 3.0);
        assert_eq!(g.eval_psi(0.5).unwrap(), 3.0);
        assert_eq!(Gauge::Identity.eval(0.3).unwrap(), 0.3);
    }

    #[test]
    fn phi_values() {
        let g = GaugePair::example();
        assert!((g.eval_phi(0.28284).unwrap() - 0.056568).abs() < 1e-6);
        assert_eq!(g.eval_phi(7.0).unwrap(), 0.5);
        assert_eq!(Gauge::Linear { lambda: 0.5 }.eval(2.0).unwrap(), 1.0);
        assert_eq!(Gauge::Rational.eval(1.0).unwrap(), 0.5);
    }

    #[test]
    fn eval_rejects_bad_arguments() {
        assert_eq!(Gauge::Identity.eval(-1.0), Err(Error::GaugeDomain(-1.0)));
        assert!(Gauge::CappedPhi.eval(f64::NAN).is_err());
        assert!(Gauge::StepPsi.eval(f64::INFINITY).is_err());
    }

    #[test]
    fn spec_resolution() {
        assert_eq!(
            Gauge::from_spec(&spec("example", &[]), Slot::Psi).unwrap(),
            Gauge::StepPsi
        );
        assert_eq!(
            Gauge::from_spec(&spec("example", &[]), Slot::Phi).unwrap(),
            Gauge::CappedPhi
        );
        assert_eq!(
            Gauge::from_spec(&spec("linear", &[("lambda", 0.5)]), Slot::Phi).unwrap(),
            Gauge::Linear { lambda: 0.5 }
        );
        assert!(Gauge::from_spec(&spec("linear", &[("lambda", 1.0)]), Slot::Phi).is_err());
        assert!(Gauge::from_spec(&spec("linear", &[]), Slot::Phi).is_err());
        assert!(Gauge::from_spec(&spec("identity", &[("lambda", 0.5)]), Slot::Psi).is_err());
        assert!(Gauge::from_spec(&spec("cosine", &[]), Slot::Psi).is_err());
    }

    #[test]
    fn upsilon_identity_clean() {
        let g = GaugePair::new(Gauge::Identity, Gauge::Rational);
        assert!(check_upsilon(&g, 10.0, 64).holds());
    }

    #[test]
    fn upsilon_step_psi_jump_at_half() {
        let g = GaugePair::example();
        let r = check_upsilon(&g, 1.0, 8);
        assert!(r.monotonicity.is_empty());
        assert_eq!(r.jumps.len(), 1, "{:?}", r.jumps);
        let j = &r.jumps[0];
        assert_eq!(j.t, 0.5);
        assert!((j.left.unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(j.value, 3.0);
        assert_eq!(j.right, Some(3.0));
        assert!(check_upsilon(&g, 0.49, 64).holds());
    }

    #[test]
    fn upsilon_finds_jump_between_nodes() {
        // 0.5 is not a node of the 7-interval grid on [0, 1]
        let r = check_upsilon(&GaugePair::example(), 1.0, 7 + 8);
        assert_eq!(r.jumps.len(), 1);
        assert!((r.jumps[0].t - 0.5).abs() < 1e-9);
    }

    #[test]
    fn upsilon_flags_decreasing_psi() {
        // CappedPhi drops from ~1 to 1/2 at t = 5
        let g = GaugePair::new(Gauge::CappedPhi, Gauge::CappedPhi);
        let r = check_upsilon(&g, 10.0, 64);
        assert!(!r.monotonicity.is_empty());
        assert!(r.jumps.iter().any(|j| (j.t - 5.0).abs() < 1e-6));
    }

    #[test]
    fn phi_property_examples() {
        let g = GaugePair::example();
        let r = check_phi_property(&g, &[0.01], 10.0);
        assert!((r.entries[0].inf - 0.002).abs() < 1e-15);
        assert!(r.holds());

        let zero = GaugePair::new(
            Gauge::Identity,
            Gauge::Affine {
                slope: 0.0,
                intercept: 0.0,
            },
        );
        let r = check_phi_property(&zero, &[0.01, 1.0], 10.0);
        assert_eq!(r.failing(), vec![0.01, 1.0]);

        let rat = GaugePair::new(Gauge::Identity, Gauge::Rational);
        let r = check_phi_property(&rat, &[0.1], 10.0);
        assert!((r.entries[0].inf - 0.01 / 1.1).abs() < 1e-15);
    }

    #[test]
    fn phi_property_sees_interior_zero() {
        // φ(t) = (t - 1)² touches zero at t = 1
        let g = GaugePair::new(
            Gauge::Identity,
            Gauge::Power {
                coef: 1.0,
                exponent: 2.0,
            },
        );
        let shifted = |t: f64| g.phi.eval_unchecked((t - 1.0).abs());
        assert!(sampled_inf(shifted, 0.1, 3.0) <= PHI_ZERO);
    }

    #[test]
    fn identity_minus_linear_is_scaled_identity() {
        let lambda = 0.3;
        let psi = Gauge::Identity;
        let phi = Gauge::Linear { lambda };
        for i in 0..10_000 {
            let t = i as f64 * 1e-3;
            let diff = psi.eval(t).unwrap() - phi.eval(t).unwrap();
            assert!((diff - lambda * t).abs() <= 4.0 * f64::EPSILON * t.max(1.0));
        }
    }

    #[test]
    fn certify_records_domain() {
        let mut g = GaugePair::example();
        g.certify(0.49, 64);
        assert_eq!(g.verified_domain(), Some(0.49));
        let mut g = GaugePair::example();
        g.certify(1.0, 64);
        assert_eq!(g.verified_domain(), None);
    }
}
