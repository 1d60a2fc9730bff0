use endpoint_cli::{CliError, ProblemInstance};
use endpoint_core::gauges::{Gauge, GaugePair};
use endpoint_core::lspace::LimRule;

#[test]
fn shipped_instances_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("instances");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            ProblemInstance::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 7);
}

#[test]
fn legacy_names_are_accepted() {
    let inst = ProblemInstance::parse(
        r#"{ "version": 1, "gauges": { "psi": { "name": "paper" }, "phi": { "name": "paper" } } }"#,
    )
    .unwrap();
    let g = inst.gauge_pair().unwrap();
    let want = GaugePair::example();
    assert_eq!((g.psi, g.phi), (want.psi, want.phi));
    assert_eq!(want.psi, Gauge::StepPsi);

    let inst = ProblemInstance::parse(
        r#"{ "version": 1, "fixtures": { "lim": { "name": "negatives_paper" } } }"#,
    )
    .unwrap();
    assert_eq!(inst.fixtures().unwrap().lim, LimRule::Negatives);
}

#[test]
fn parse_errors_carry_position() {
    let err = ProblemInstance::parse("{\n  \"version\": 1,\n  \"maps\": 3\n}").unwrap_err();
    match err {
        CliError::Parse { line, .. } => assert_eq!(line, 3),
        other => panic!("{other}"),
    }
    assert!(ProblemInstance::parse(r#"{ "version": 7 }"#).is_err());
}
