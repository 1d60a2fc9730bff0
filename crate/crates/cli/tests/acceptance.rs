//! Acceptance run: ten end-to-end criteria, one PASS/FAIL line each.
//! Exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use endpoint_cli::commands::{
    self, check_lspace, classify_maps, gauge_report, solve, verify_contraction, Flags, MapClass,
    PHI_EPS,
};
use endpoint_cli::ProblemInstance;
use endpoint_core::gauges::{check_phi_property, check_upsilon};
use endpoint_core::lspace::{
    check_l_space, check_ordered_variant, Elem, OrderedViolation, Variant, Verdict as LVerdict,
};
use endpoint_core::sets::{self, BoundedSet};
use endpoint_core::setmaps::SelectionRule;
use endpoint_core::solver::{monotone_trace_check, Status, UniquenessVerdict, WitnessKind};
use endpoint_core::space::{seeded_rng, Metric, Point};

type Check = Result<String, String>;

fn instance(name: &str) -> ProblemInstance {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "instances", name].iter().collect();
    ProblemInstance::load(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn norm(p: &Point) -> f64 {
    p.coords().iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn golden_end_point() -> Check {
    let inst = instance("square.json");
    let clock = Instant::now();
    let out = solve(&inst, &Flags::default()).map_err(|e| e.to_string())?;
    let elapsed = clock.elapsed();
    ensure(out.results.len() == 25, || format!("{} starts", out.results.len()))?;
    let mut worst = 0.0f64;
    let mut iters = 0;
    for r in &out.results {
        let u = r.converged().ok_or_else(|| format!("not converged: {:?}", r.status))?;
        worst = worst.max(norm(u));
        iters = iters.max(r.iterations());
    }
    ensure(worst <= 1e-8, || format!("max |u| = {worst:e}"))?;
    ensure(iters <= 200, || format!("{iters} iterations"))?;
    let u = out.uniqueness.ok_or("no uniqueness report")?;
    ensure(u.clusters.len() == 1 && u.verdict == UniquenessVerdict::Unique, || {
        format!("{} clusters", u.clusters.len())
    })?;
    Ok(format!(
        "25/25 converged, max |u| = {worst:.1e}, max iterations {iters}, 1 cluster, {:.0?}",
        elapsed
    ))
}

fn contraction_verification() -> Check {
    let inst = instance("square.json");
    let flags = Flags { grid: Some(64), tolerance: Some(1e-9), ..Flags::default() };
    let (r, outcome) = verify_contraction(&inst, &flags).map_err(|e| e.to_string())?;
    ensure(r.violations.is_empty(), || format!("{} violations", r.violations.len()))?;
    ensure(outcome.exit_code() == 0, || "non-zero exit".into())?;
    let cap = 2f64.sqrt() / 4.0 + r.discretization_bound;
    ensure(r.max_mixed_gauge <= cap, || {
        format!("max M = {} > {cap}", r.max_mixed_gauge)
    })?;
    Ok(format!(
        "{} comparable pairs, 0 violations, max M = {:.10} <= {:.10}",
        r.pairs_checked, r.max_mixed_gauge, cap
    ))
}

fn trace_monotonicity() -> Check {
    let inst = instance("square.json");
    let farthest = solve(&inst, &Flags::default()).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for r in &farthest.results {
        if r.trace.len() >= 2 {
            let m = monotone_trace_check(&r.trace, 1e-10).map_err(|e| e.to_string())?;
            ensure(m.holds, || format!("monotone violation at {:?}", m.first_violation))?;
            checked += 1;
        }
    }

    // Farthest selection lands on the origin in one step, so the per-round
    // decay is read off the nearest-selection traces.
    let flags = Flags { rule: Some(SelectionRule::Nearest), ..Flags::default() };
    let nearest = solve(&inst, &flags).map_err(|e| e.to_string())?;
    let mut ratios = 0;
    let mut worst = 0.0f64;
    for r in &nearest.results {
        let m = monotone_trace_check(&r.trace, 1e-10).map_err(|e| e.to_string())?;
        ensure(m.holds, || format!("nearest monotone violation at {:?}", m.first_violation))?;
        let a: Vec<f64> = r.trace.rows.iter().map(|row| row.a).collect();
        for n in 2..a.len().saturating_sub(2) {
            if a[n] > 0.0 {
                let rel = ((a[n + 2] / a[n]) * 16.0 - 1.0).abs();
                worst = worst.max(rel);
                ratios += 1;
            }
        }
    }
    ensure(ratios > 0, || "no ratios measured".into())?;
    ensure(worst <= 0.05, || format!("ratio off 1/16 by {:.2}%", worst * 100.0))?;
    Ok(format!(
        "{checked} traces monotone; {ratios} round ratios within {:.2e}% of 1/16",
        worst * 100.0
    ))
}

fn random_cloud(rng: &mut impl Rng, dim: usize) -> Vec<Vec<f64>> {
    let n = rng.gen_range(1..=20);
    (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect()).collect()
}

fn to_set(pts: &[Vec<f64>]) -> BoundedSet {
    BoundedSet::points(pts.iter().map(|p| Point::new(p.clone()).unwrap()).collect()).unwrap()
}

fn random_solid(rng: &mut impl Rng, dim: usize) -> BoundedSet {
    fn pt(rng: &mut impl Rng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..dim).map(|_| rng.gen_range(lo..hi)).collect()
    }
    let a = pt(rng, dim, -10.0, 10.0);
    if rng.gen_bool(0.5) {
        let b = pt(rng, dim, -10.0, 10.0);
        BoundedSet::segment(Point::new(a).unwrap(), Point::new(b).unwrap(), 16).unwrap()
    } else {
        let hi: Vec<f64> = a.iter().zip(pt(rng, dim, 0.0, 5.0)).map(|(l, w)| l + w).collect();
        BoundedSet::cuboid(Point::new(a).unwrap(), Point::new(hi).unwrap(), 16).unwrap()
    }
}

fn random_shape(rng: &mut impl Rng, dim: usize) -> BoundedSet {
    if rng.gen_bool(1.0 / 3.0) {
        to_set(&random_cloud(rng, dim))
    } else {
        random_solid(rng, dim)
    }
}

fn oracle_equivalence() -> Check {
    let m = Metric::Euclidean;
    let mut rng = seeded_rng(401);
    for case in 0..500 {
        let dim = rng.gen_range(1..=3);
        let (a, b) = (random_cloud(&mut rng, dim), random_cloud(&mut rng, dim));
        let (mut sup, mut inf) = (0.0f64, f64::INFINITY);
        for p in &a {
            for q in &b {
                let d = p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                sup = sup.max(d);
                inf = inf.min(d);
            }
        }
        let (sa, sb) = (to_set(&a), to_set(&b));
        let got = (
            sets::delta(m, &sa, &sb).map_err(|e| e.to_string())?,
            sets::dist_inf(m, &sa, &sb).map_err(|e| e.to_string())?,
        );
        ensure(got == (sup, inf), || format!("cloud case {case}: {got:?} vs ({sup}, {inf})"))?;
    }
    let mut worst_slack = f64::INFINITY;
    for case in 0..100 {
        let dim = rng.gen_range(1..=2);
        let (a, b) = (random_solid(&mut rng, dim), random_solid(&mut rng, dim));
        let exact = sets::delta(m, &a, &b).map_err(|e| e.to_string())?;
        let fa = a.clone().with_resolution(64).map_err(|e| e.to_string())?;
        let fb = b.clone().with_resolution(64).map_err(|e| e.to_string())?;
        let disc = sets::delta_discretized(m, &fa, &fb).map_err(|e| e.to_string())?;
        let gap = (exact - disc.value).abs();
        ensure(gap <= disc.bound + 1e-12, || {
            format!("solid case {case}: |{exact} - {}| > {}", disc.value, disc.bound)
        })?;
        worst_slack = worst_slack.min(disc.bound - gap);
    }
    Ok(format!(
        "500 cloud pairs exact; 100 segment/box pairs within bound (min slack {worst_slack:.2e})"
    ))
}

fn triangle_inequality() -> Check {
    let m = Metric::Euclidean;
    let mut rng = seeded_rng(502);
    let mut tightest = f64::INFINITY;
    for case in 0..1000 {
        let dim = rng.gen_range(1..=3);
        let a = random_shape(&mut rng, dim);
        let b = random_shape(&mut rng, dim);
        let c = random_shape(&mut rng, dim);
        let d = |x: &BoundedSet, y: &BoundedSet| sets::delta(m, x, y).map_err(|e| e.to_string());
        let (ac, ab, bc) = (d(&a, &c)?, d(&a, &b)?, d(&b, &c)?);
        ensure(ac <= ab + bc + 1e-10, || format!("case {case}: {ac} > {ab} + {bc}"))?;
        tightest = tightest.min(ab + bc - ac);
    }
    Ok(format!("1000 triples hold (tightest margin {tightest:.3e})"))
}

fn map_classification() -> Check {
    let inst = instance("translate-maps.json");
    let classes = classify_maps(&inst, &Flags::default()).map_err(|e| e.to_string())?;
    let expect = [
        ("S", MapClass::DominatingOnly),
        ("T", MapClass::DominatedOnly),
        ("F", MapClass::Both),
    ];
    for (name, class) in expect {
        let c = classes
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| format!("map {name} missing"))?;
        ensure(c.class == class, || format!("{name}: {:?}, expected {class:?}", c.class))?;
        ensure(c.samples == 500 && c.misclassified == 0, || {
            format!("{name}: {} misclassified of {}", c.misclassified, c.samples)
        })?;
    }
    Ok("S dominating-only, T dominated-only, F both; 0/500 misclassified each".into())
}

fn ordered_witnesses(
    inst: &ProblemInstance,
    variant: Variant,
) -> Result<(LVerdict, Vec<OrderedViolation>), String> {
    let d = inst.fixtures().map_err(|e| e.to_string())?;
    let r = check_ordered_variant(variant, &d.all(), d.lim, d.order, d.prefix_length)
        .map_err(|e| e.to_string())?;
    for v in &r.violations {
        ensure(v.revalidate(d.lim, d.order, d.prefix_length), || {
            format!("{variant} witness does not revalidate: {v}")
        })?;
    }
    Ok((r.verdict, r.violations))
}

fn lspace_findings() -> Check {
    let naturals = instance("naturals.json");
    let (verdict, witnesses) = ordered_witnesses(&naturals, Variant::L)?;
    ensure(verdict == LVerdict::Violations, || format!("naturals L: {verdict}"))?;
    let two_one = witnesses.iter().any(|w| {
        matches!(w, OrderedViolation::Limits { lim_x, lim_y, .. }
            if *lim_x == Elem::scalar(2.0) && *lim_y == Elem::scalar(1.0))
    });
    ensure(two_one, || "naturals L: no witness with limits 2 and 1".into())?;
    let (verdict, w) = ordered_witnesses(&naturals, Variant::LUp)?;
    ensure(verdict == LVerdict::Violations && !w.is_empty(), || {
        format!("naturals L_up: {verdict}")
    })?;

    let negatives = instance("negatives.json");
    for variant in [Variant::L, Variant::LDown] {
        let (verdict, w) = ordered_witnesses(&negatives, variant)?;
        ensure(verdict == LVerdict::Violations && !w.is_empty(), || {
            format!("negatives {variant}: {verdict}")
        })?;
    }

    let plane = instance("plane.json");
    let d = plane.fixtures().map_err(|e| e.to_string())?;
    let generated = d.generate.as_ref().map_or(0, |g| g.count);
    ensure(generated == 50, || format!("{generated} generated plane fixtures"))?;
    let base = check_l_space(&d.all(), d.lim, d.prefix_length).map_err(|e| e.to_string())?;
    ensure(base.holds(), || "plane: L-space axioms violated".into())?;
    for variant in Variant::ALL {
        let (verdict, _) = ordered_witnesses(&plane, variant)?;
        ensure(verdict == LVerdict::Pass, || format!("plane {variant}: {verdict}"))?;
    }
    let exits: Vec<i32> = [&naturals, &negatives, &plane]
        .iter()
        .map(|i| check_lspace(i).map(|o| o.exit_code()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(exits == [2, 2, 0], || format!("check-lspace exit codes {exits:?}"))?;
    Ok("naturals L (2 vs 1) and L_up, negatives L and L_down witnessed; plane passes L, L_down, L_up".into())
}

fn reductions() -> Check {
    // f = g = x/2, so δ(Sx, Ty) = |x − y|/2; compare with d/(d+1) on the grid.
    let grid: Vec<f64> = (0..200).map(|i| i as f64 / 199.0).collect();
    for &x in &grid {
        for &y in &grid {
            let d = (x - y).abs();
            let lhs = (x / 2.0 - y / 2.0).abs();
            ensure(lhs <= d / (d + 1.0) + 1e-12, || format!("rational fails at ({x}, {y})"))?;
        }
    }
    let pair = instance("pairwrap.json");
    let (r, _) = verify_contraction(&pair, &Flags::default()).map_err(|e| e.to_string())?;
    ensure(r.violations.is_empty(), || format!("pairwrap: {} violations", r.violations.len()))?;
    let out = solve(&pair, &Flags::default()).map_err(|e| e.to_string())?;
    for res in &out.results {
        let u = res.converged().ok_or_else(|| format!("pairwrap: {:?}", res.status))?;
        ensure(norm(u) <= 1e-8, || format!("pairwrap: u = {u}"))?;
    }

    let power = instance("power.json");
    let (r, _) = verify_contraction(&power, &Flags::default()).map_err(|e| e.to_string())?;
    ensure(r.violations.is_empty(), || format!("power: {} violations", r.violations.len()))?;
    ensure(r.power_pitch.is_some(), || "power: no pitch reported".into())?;
    let out = solve(&power, &Flags::default()).map_err(|e| e.to_string())?;
    for res in &out.results {
        let u = res.converged().ok_or_else(|| format!("power: {:?}", res.status))?;
        ensure(norm(u) <= 1e-8, || format!("power: u = {u}"))?;
    }
    ensure(out.outcome.exit_code() == 0, || "power: solve exit non-zero".into())?;
    Ok(format!(
        "rational inequality holds on 200-point grid; pairwrap -> 0; power k=2 verified (pitch {:?}) -> (0, 0)",
        r.power_pitch.unwrap_or_default()
    ))
}

fn hypothesis_failure() -> Check {
    let inst = instance("translate-maps.json");
    let flags = Flags {
        direction: Some(endpoint_core::solver::Direction::Descending),
        ..Flags::default()
    };
    let out = solve(&inst, &flags).map_err(|e| e.to_string())?;
    let witness = out
        .results
        .iter()
        .find_map(|r| match &r.status {
            Status::HypothesisFailed(w) => Some(w.clone()),
            _ => None,
        })
        .ok_or("no HypothesisFailed result")?;
    ensure(witness.kind == WitnessKind::NoDominated, || format!("witness kind {:?}", witness.kind))?;
    let code = commands::run(commands::Command::Solve, &inst, &flags)
        .map_err(|e| e.to_string())?
        .exit_code();
    ensure(code == 2, || format!("exit code {code}"))?;
    Ok(format!("HypothesisFailed: {witness}; exit 2"))
}

fn gauge_reports() -> Check {
    let inst = instance("square.json");
    let pair = inst.gauge_pair().map_err(|e| e.to_string())?;
    let scan = check_upsilon(&pair, 1.0, 4096);
    let jump = scan
        .jumps
        .iter()
        .find(|j| (j.t - 0.5).abs() <= 1e-9)
        .ok_or_else(|| format!("no jump at 0.5: {:?}", scan.jumps))?;
    let (left, right) = (jump.left.unwrap_or(f64::NAN), jump.right.unwrap_or(f64::NAN));
    ensure((left - 1.0).abs() <= 1e-6 && (right - 3.0).abs() <= 1e-6, || {
        format!("one-sided limits {left} / {right}")
    })?;
    let certified = check_upsilon(&pair, 0.49, 4096);
    ensure(certified.holds(), || "not certified on [0, 0.49]".into())?;
    let phi = check_phi_property(&pair, &PHI_EPS, 1.0);
    ensure(phi.holds(), || format!("m(eps) vanishes at {:?}", phi.failing()))?;
    let code = gauge_report(&inst).map_err(|e| e.to_string())?.exit_code();
    ensure(code == 0, || format!("gauge-report exit {code}"))?;
    let ms: Vec<String> = phi.entries.iter().map(|e| format!("{:.1e}", e.inf)).collect();
    Ok(format!(
        "jump at t = {:.6} ({left:.6} vs {right:.6}); certified on [0, 0.49]; m(eps) = [{}]",
        jump.t,
        ms.join(", ")
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("golden end point", golden_end_point),
        ("contraction verification", contraction_verification),
        ("trace monotonicity", trace_monotonicity),
        ("delta/D oracle equivalence", oracle_equivalence),
        ("delta triangle inequality", triangle_inequality),
        ("dominated/dominating classification", map_classification),
        ("L-space findings", lspace_findings),
        ("single-valued and power reductions", reductions),
        ("hypothesis-failure surfacing", hypothesis_failure),
        ("gauge class reports", gauge_reports),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/10 passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
