//! End-to-end checks on the square `[0, 1/4]²` with a shrinking segment map
//! and a shrinking box map, whose only common end point is the origin.

use endpoint_core::contraction::{verify, ContractionCondition, Sampling};
use endpoint_core::gauges::GaugePair;
use endpoint_core::setmaps::{check_dominance, Dominance, MultiMap, SelectionRule};
use endpoint_core::solver::{
    check_endpoint, iterate_many, monotone_trace_check, uniqueness_check, SolverConfig,
    UniquenessVerdict,
};
use endpoint_core::space::{Point, Space};

fn setup() -> (Space, MultiMap, MultiMap) {
    (
        Space::cube(2, 0.0, 0.25).unwrap(),
        MultiMap::segment_scale(0.25),
        MultiMap::box_scale(0.25),
    )
}

#[test]
fn every_rule_reaches_the_origin_from_every_start() {
    let (sp, s, t) = setup();
    let starts = sp.lattice(5);
    for rule in [SelectionRule::Farthest, SelectionRule::Nearest, SelectionRule::MinLex] {
        let config = SolverConfig { rule, ..SolverConfig::default() };
        let results = iterate_many(&sp, &s, &t, &starts, &config).unwrap();
        for r in &results {
            let u = r.converged().expect("converged");
            assert!(u.coords().iter().all(|c| c.abs() <= 1e-8), "{rule:?}: {u}");
            assert!(check_endpoint(&sp, &s, u, config.eps_endpoint).unwrap());
            assert!(check_endpoint(&sp, &t, u, config.eps_endpoint).unwrap());
            if r.trace.len() >= 2 {
                assert!(monotone_trace_check(&r.trace, 1e-10).unwrap().holds);
            }
            // x_n ∈ A_{n-1} and x_{n+1} ∈ A_n, so c_n ≤ a_{n-1}
            for w in r.trace.rows.windows(2) {
                assert!(w[1].c <= w[0].a + 1e-15);
            }
        }
        let rep = uniqueness_check(&results, &sp, 1e-6).unwrap();
        assert_eq!(rep.verdict, UniquenessVerdict::Unique);
    }
}

#[test]
fn contraction_and_dominance_hold_together() {
    let (sp, s, t) = setup();
    let r = verify(
        &sp,
        &s,
        &t,
        &ContractionCondition::WeakPsiPhi(GaugePair::example()),
        &Sampling::Random { count: 2000, seed: 5 },
        1e-9,
    )
    .unwrap();
    assert!(r.holds());
    for map in [&s, &t] {
        assert!(check_dominance(&sp, map, Dominance::Dominated, 200, 3).unwrap().holds());
    }
}

#[test]
fn multi_start_results_follow_start_order() {
    let (sp, s, t) = setup();
    let starts: Vec<Point> = sp.lattice(3);
    let config = SolverConfig { rule: SelectionRule::Nearest, ..SolverConfig::default() };
    let all = iterate_many(&sp, &s, &t, &starts, &config).unwrap();
    for (x0, r) in starts.iter().zip(&all) {
        let first = r.trace.rows.first().map(|row| &row.x);
        assert_eq!(first, Some(x0));
    }
}
