use vertex_core::verify::*;
use vertex_core::ChainParams;

#[test]
fn suite_names_round_trip() {
    for s in Suite::EACH.into_iter().chain([Suite::All]) {
        assert_eq!(s.name().parse::<Suite>().unwrap(), s);
    }
    assert!("bethe".parse::<Suite>().is_err());
}

#[test]
fn bounds_decide_the_outcome() {
    assert!(Check::new("x", "a", 1e-9, Bound::Below(1e-8)).passed);
    assert!(!Check::new("x", "a", f64::NAN, Bound::Below(1e-8)).passed);
    assert!(!Check::new("x", "a", 3.0, Bound::Equals(4.0)).passed);
    assert!(Check::new("x", "a", 0.5, Bound::Above(0.1)).passed);
    assert!(Check::new("x", "a", f64::INFINITY, Bound::Report).passed);
}

#[test]
fn every_suite_passes_on_a_three_site_chain() {
    let p = ChainParams::real(&[5.7, 1.5, 0.22], 0.7, 0.26).unwrap();
    let mut ctx = Context::new(p, 5, 4, Tolerances::default());
    let checks = run(Suite::All, &mut ctx).unwrap();
    for s in Suite::EACH {
        assert!(checks.iter().any(|c| c.suite == s.name()));
    }
    for c in &checks {
        assert!(c.passed, "{} {}: {} vs {}", c.suite, c.name, c.value, c.bound);
    }
    let kernel = checks.iter().find(|c| c.name == "kernel dimension").unwrap();
    assert_eq!(kernel.value, 4.0);
}

#[test]
fn tightened_tolerance_is_reported_as_failure() {
    let p = ChainParams::real(&[0.3, 1.1, 2.0], 0.5, 0.2).unwrap();
    let tol = Tolerances { residual: 1e-30, ..Tolerances::default() };
    let mut ctx = Context::new(p, 1, 2, tol);
    let checks = run(Suite::Ybe, &mut ctx).unwrap();
    assert!(checks.iter().any(|c| !c.passed));
}
