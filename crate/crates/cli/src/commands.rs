//! Subcommand implementations. Each returns an [`Outcome`]: a verdict, a
//! human summary, and named text artifacts for `--out`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use endpoint_core::contraction::{verify, ContractionCondition, Sampling, VerificationReport};
use endpoint_core::gauges::{check_phi_property, check_upsilon};
use endpoint_core::lspace::{check_l_space, check_ordered_variant, Variant, Verdict as LVerdict};
use endpoint_core::sets;
use endpoint_core::setmaps::{check_dominance, Dominance, MultiMap, SelectionRule};
use endpoint_core::solver::{
    check_endpoint, iterate_many, uniqueness_check, Direction, EndPointResult, UniquenessReport,
};

use crate::instance::ProblemInstance;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    VerifyContraction,
    CheckMaps,
    CheckLspace,
    GaugeReport,
    Delta,
}

/// Command-line overrides of instance settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Flags {
    pub grid: Option<usize>,
    pub random: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub max_iter: Option<usize>,
    pub rule: Option<SelectionRule>,
    pub direction: Option<Direction>,
    /// Names of the two maps used as `(S, T)`.
    pub pair: Option<(String, String)>,
    /// Names of the two sets compared by `delta`.
    pub sets: Option<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub verdict: Verdict,
    pub summary: String,
    /// `(file name, contents)`.
    pub artifacts: Vec<(String, String)>,
}

impl Outcome {
    /// 0 on pass/converged, 2 on violations/divergence.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 2,
        }
    }

    fn new(pass: bool, summary: String) -> Self {
        Outcome {
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            summary,
            artifacts: Vec::new(),
        }
    }
}

pub fn run(command: Command, inst: &ProblemInstance, flags: &Flags) -> Result<Outcome, CliError> {
    match command {
        Command::Solve => solve(inst, flags).map(|s| s.outcome),
        Command::VerifyContraction => verify_contraction(inst, flags).map(|v| v.1),
        Command::CheckMaps => check_maps(inst, flags),
        Command::CheckLspace => check_lspace(inst),
        Command::GaugeReport => gauge_report(inst),
        Command::Delta => delta(inst, flags),
    }
}

fn pair_names(flags: &Flags) -> (String, String) {
    flags
        .pair
        .clone()
        .unwrap_or_else(|| ("S".to_string(), "T".to_string()))
}

pub struct SolveOutput {
    pub results: Vec<EndPointResult>,
    pub uniqueness: Option<UniquenessReport>,
    pub outcome: Outcome,
}

/// Clustering pitch for uniqueness, relative to the solver tolerances.
const CLUSTER_FACTOR: f64 = 100.0;

pub fn solve(inst: &ProblemInstance, flags: &Flags) -> Result<SolveOutput, CliError> {
    let space = inst.space()?;
    let (sn, tn) = pair_names(flags);
    let (s, t) = (inst.map(&sn)?, inst.map(&tn)?);
    let mut config = inst.solver_config();
    if let Some(n) = flags.max_iter {
        config.max_iter = n;
    }
    if let Some(r) = flags.rule {
        config.rule = r;
    }
    if let Some(d) = flags.direction {
        config.direction = d;
    }
    config.validate()?;

    // Under the power condition the construction runs on S^k and T^k, and the
    // limit is then certified against S and T themselves.
    let k = match inst.condition.map(|_| inst.condition()).transpose()? {
        Some(ContractionCondition::PowerWeak { k, .. }) => k,
        _ => 1,
    };
    let (sk, tk) = (s.power(k)?, t.power(k)?);
    let starts = inst.starts()?;
    let results = iterate_many(&space, &sk, &tk, &starts, &config)?;

    let mut summary = String::new();
    let _ = writeln!(summary, "pair: ({sn}, {tn}){}", if k > 1 { format!(" powers k={k}") } else { String::new() });
    let _ = writeln!(summary, "direction: {:?}, rule: {:?}", config.direction, config.rule);
    let mut all_ok = true;
    let mut artifacts = Vec::new();
    for (i, (x0, r)) in starts.iter().zip(&results).enumerate() {
        let _ = writeln!(summary, "--- start {i}: {x0}");
        summary.push_str(&r.to_string());
        match r.converged() {
            Some(u) if k > 1 => {
                let eps = config.eps_endpoint;
                let base = check_endpoint(&space, &s, u, eps)? && check_endpoint(&space, &t, u, eps)?;
                let _ = writeln!(summary, "end point of base maps: {base}");
                all_ok &= base;
            }
            Some(_) => {}
            None => all_ok = false,
        }
        let name = if starts.len() == 1 {
            "trace.csv".to_string()
        } else {
            format!("trace_{i:03}.csv")
        };
        artifacts.push((name, r.trace.to_csv()));
    }
    let pitch = CLUSTER_FACTOR * config.eps_endpoint.max(config.eps_step);
    let uniqueness = if results.iter().any(|r| r.converged().is_some()) {
        let rep = uniqueness_check(&results, &space, pitch)?;
        let _ = writeln!(summary, "--- uniqueness (pitch {pitch:e})");
        for (i, c) in rep.clusters.iter().enumerate() {
            let _ = writeln!(summary, "cluster {i}: {} ({} results)", c.representative, c.members);
        }
        let _ = writeln!(summary, "verdict: {}", rep.verdict);
        Some(rep)
    } else {
        None
    };
    let converged = results.iter().filter(|r| r.converged().is_some()).count();
    let _ = writeln!(summary, "converged: {converged}/{}", results.len());
    let mut outcome = Outcome::new(all_ok, summary);
    outcome.artifacts = artifacts;
    Ok(SolveOutput {
        results,
        uniqueness,
        outcome,
    })
}

pub fn sampling(inst: &ProblemInstance, flags: &Flags) -> Sampling {
    if let Some(count) = flags.random {
        return Sampling::Random {
            count,
            seed: flags.seed.unwrap_or(0),
        };
    }
    if let Some(per_axis) = flags.grid {
        return Sampling::Grid { per_axis };
    }
    match inst.sampling.map(|s| s.to_sampling()) {
        Some(Sampling::Random { count, seed }) => Sampling::Random {
            count,
            seed: flags.seed.unwrap_or(seed),
        },
        Some(s) => s,
        None => Sampling::Grid { per_axis: 16 },
    }
}

pub fn verify_contraction(
    inst: &ProblemInstance,
    flags: &Flags,
) -> Result<(VerificationReport, Outcome), CliError> {
    let space = inst.space()?;
    let (sn, tn) = pair_names(flags);
    let (s, t) = (inst.map(&sn)?, inst.map(&tn)?);
    let cond = inst.condition()?;
    let tolerance = flags.tolerance.unwrap_or_else(|| inst.tolerance());
    let report = verify(&space, &s, &t, &cond, &sampling(inst, flags), tolerance)?;
    let mut summary = format!("pair: ({sn}, {tn})\n{report}");
    for v in report.violations.iter().take(5) {
        let _ = writeln!(
            summary,
            "witness: x={} y={} lhs={:e} rhs={:e}",
            v.x, v.y, v.lhs, v.rhs
        );
    }
    let mut outcome = Outcome::new(report.holds(), summary);
    outcome.artifacts.push((
        "violations.csv".to_string(),
        report.violations_csv(space.dimension()),
    ));
    Ok((report, outcome))
}

/// Classification of a map by the two dominance predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapClass {
    DominatedOnly,
    DominatingOnly,
    Both,
    Neither,
}

impl MapClass {
    fn of(dominated: bool, dominating: bool) -> Self {
        match (dominated, dominating) {
            (true, true) => MapClass::Both,
            (true, false) => MapClass::DominatedOnly,
            (false, true) => MapClass::DominatingOnly,
            (false, false) => MapClass::Neither,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapClassification {
    pub name: String,
    pub class: MapClass,
    pub dominated_successes: usize,
    pub dominating_successes: usize,
    pub samples: usize,
    /// Samples whose individual outcome disagrees with the map's class on
    /// either side.
    pub misclassified: usize,
}

pub fn classify_maps(inst: &ProblemInstance, flags: &Flags) -> Result<Vec<MapClassification>, CliError> {
    let space = inst.space()?;
    let decl = inst.check_maps.clone().unwrap_or_default();
    let seed = flags.seed.unwrap_or(decl.seed);
    let mut out = Vec::new();
    for name in inst.maps.keys() {
        let map: MultiMap = inst.map(name)?;
        let below = check_dominance(&space, &map, Dominance::Dominated, decl.samples, seed)?;
        let above = check_dominance(&space, &map, Dominance::Dominating, decl.samples, seed)?;
        // a failing side is uniform when no sample satisfied it either
        let stray = |r: &endpoint_core::setmaps::PredicateReport| {
            if r.holds() {
                0
            } else {
                r.successes
            }
        };
        out.push(MapClassification {
            name: name.clone(),
            class: MapClass::of(below.holds(), above.holds()),
            dominated_successes: below.successes,
            dominating_successes: above.successes,
            samples: decl.samples,
            misclassified: stray(&below) + stray(&above),
        });
    }
    Ok(out)
}

pub fn check_maps(inst: &ProblemInstance, flags: &Flags) -> Result<Outcome, CliError> {
    let classes = classify_maps(inst, flags)?;
    let expect = inst
        .check_maps
        .as_ref()
        .map(|d| d.expect.clone())
        .unwrap_or_default();
    let mut ok = true;
    let mut summary = String::new();
    for c in &classes {
        let expected = expect.get(&c.name);
        let matches = expected.map_or(true, |e| *e == c.class);
        ok &= matches && c.misclassified == 0;
        let _ = writeln!(
            summary,
            "{}: dominated {}/{}, dominating {}/{} -> {:?}, misclassified {}{}",
            c.name,
            c.dominated_successes,
            c.samples,
            c.dominating_successes,
            c.samples,
            c.class,
            c.misclassified,
            match expected {
                Some(e) if !matches => format!(" (expected {e:?})"),
                _ => String::new(),
            }
        );
    }
    Ok(Outcome::new(ok, summary))
}

pub fn check_lspace(inst: &ProblemInstance) -> Result<Outcome, CliError> {
    let decl = inst.fixtures()?;
    let fixtures = decl.all();
    let p = decl.prefix_length;
    let mut summary = String::new();
    let base = check_l_space(&fixtures, decl.lim, p)?;
    let _ = writeln!(
        summary,
        "L-space axioms: {} ({} fixtures, {} constants, {} subsequences)",
        if base.holds() { "pass" } else { "violation" },
        base.fixtures,
        base.constants_checked,
        base.subsequences_checked
    );
    for v in &base.violations {
        let _ = writeln!(summary, "  witness: {v}");
    }
    let mut ok = base.holds();
    for variant in Variant::ALL {
        let r = check_ordered_variant(variant, &fixtures, decl.lim, decl.order, p)?;
        let _ = writeln!(
            summary,
            "{variant}: {} (premise met by {}, non-constant {})",
            r.verdict, r.premises_met, r.nonconstant_premises
        );
        for v in &r.violations {
            let _ = writeln!(summary, "  witness: {v}");
        }
        ok &= r.verdict != LVerdict::Violations;
    }
    Ok(Outcome::new(ok, summary))
}

/// `eps` values of the φ-property check.
pub const PHI_EPS: [f64; 4] = [1e-3, 1e-2, 0.1, 1.0];
const GAUGE_GRID: usize = 4096;

pub fn gauge_report(inst: &ProblemInstance) -> Result<Outcome, CliError> {
    let pair = inst.gauge_pair()?;
    let decl = inst.gauges.as_ref().expect("gauge_pair checked the section");
    let diameter = inst.space().map(|s| s.diameter()).unwrap_or(1.0);
    let domain = decl.domain.unwrap_or(diameter);
    let scan = decl.scan.unwrap_or(2.0 * diameter).max(domain);
    let grid = decl.grid.unwrap_or(GAUGE_GRID);

    let mut summary = String::new();
    let scanned = check_upsilon(&pair, scan, grid);
    let _ = writeln!(summary, "psi scan on [0, {scan}]: {} jump(s)", scanned.jumps.len());
    for j in &scanned.jumps {
        let _ = writeln!(
            summary,
            "  jump at t={:.12}: left={} value={} right={}",
            j.t,
            fmt_opt(j.left),
            j.value,
            fmt_opt(j.right)
        );
    }
    let certified = check_upsilon(&pair, domain, grid);
    let _ = writeln!(
        summary,
        "upsilon on [0, {domain}]: {}",
        if certified.holds() { "certified" } else { "not certified" }
    );
    let phi_hi = scan.max(PHI_EPS[PHI_EPS.len() - 1]);
    let phi = check_phi_property(&pair, &PHI_EPS, phi_hi);
    for e in &phi.entries {
        let _ = writeln!(summary, "phi m(eps={}) on [eps, {phi_hi}] = {:.6e}", e.eps, e.inf);
    }
    let _ = writeln!(
        summary,
        "phi property: {}",
        if phi.holds() { "holds" } else { "fails" }
    );
    Ok(Outcome::new(certified.holds() && phi.holds(), summary))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

pub fn delta(inst: &ProblemInstance, flags: &Flags) -> Result<Outcome, CliError> {
    let space = inst.space()?;
    let (an, bn) = match &flags.sets {
        Some(p) => p.clone(),
        None => {
            let mut names = inst.sets.keys();
            match (names.next(), names.next()) {
                (Some(a), Some(b)) => (a.clone(), b.clone()),
                _ => return Err(CliError::Invalid("delta needs two declared sets".into())),
            }
        }
    };
    let (a, b) = (inst.set(&an)?, inst.set(&bn)?);
    let m = space.metric();
    let sup = sets::delta(m, &a, &b)?;
    let inf = sets::dist_inf_with_bound(m, &a, &b)?;
    let eps = inst.singleton_eps();
    let summary = format!(
        "A = {an}: {a}\nB = {bn}: {b}\ndelta: {sup:.15e}\nD: {:.15e} (bound {:e})\nsingleton A: {}\nsingleton B: {}\n",
        inf.value,
        inf.bound,
        sets::is_singleton(m, &a, eps),
        sets::is_singleton(m, &b, eps),
    );
    Ok(Outcome::new(true, summary))
}
