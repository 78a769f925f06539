use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::expr::random;
use crate::Chart;

fn standard(h: &str) -> ContactSystem {
    ContactSystem::standard(1, h).unwrap()
}

fn on(chart: &Chart, h: &str) -> ContactSystem {
    ContactSystem::new(chart, crate::standard_form(chart), chart.parse(h).unwrap()).unwrap()
}

fn e(sys: &ContactSystem, t: &str) -> Expr {
    sys.chart().parse(t).unwrap()
}

fn ham(sys: &ContactSystem, f: &str) -> VectorField {
    sys.hamiltonian_field(&e(sys, f)).unwrap()
}

#[test]
fn dissipated_examples() {
    let sys = standard("q^2*p + sin(s)");
    assert!(is_dissipated(&sys, sys.hamiltonian()).unwrap().holds);

    let sys = standard("p");
    let q = is_dissipated(&sys, &e(&sys, "s")).unwrap();
    assert!(q.holds);
    assert_eq!(q.checks.len(), 2);

    let damped = standard("0.5*s");
    let q = is_dissipated(&damped, &e(&damped, "q")).unwrap();
    assert!(!q.holds);
    let w = q.checks[0].witness.clone().unwrap();
    // {q, γs} = γq up to the bracket convention
    assert!((q.checks[0].residual - 0.5 * w[0].abs()).abs() < 1e-12);
}

#[test]
fn conserved_ratio_examples() {
    let sys = standard("p");
    let q = conserved_ratio(&sys, &e(&sys, "2 + p^2"), &e(&sys, "2 + p^2")).unwrap();
    assert_eq!(q.expression, Expr::ONE);
    assert!(q.holds);

    let c = Chart::darboux(1).unwrap().with_domain("p", 0.5, 2.0).unwrap().with_domain("s", 0.5, 2.0).unwrap();
    let damped = on(&c, "0.7*s");
    let q = conserved_ratio(&damped, &e(&damped, "s"), &e(&damped, "p")).unwrap();
    assert!(q.holds);
    assert_eq!(q.kind, Kind::ConservedRatio);

    let c = Chart::darboux(1).unwrap().with_domain("p", 0.5, 2.0).unwrap();
    let sys = on(&c, "p");
    assert!(conserved_ratio(&sys, &e(&sys, "s"), &e(&sys, "p")).unwrap().holds);
}

#[test]
fn conserved_ratio_refusals() {
    let sys = standard("p");
    // p vanishes on the default domain
    assert!(matches!(conserved_ratio(&sys, &e(&sys, "s"), &e(&sys, "p")), Err(Error::Inadmissible { .. })));
    let damped = standard("0.5*s");
    let err = conserved_ratio(&damped, &e(&damped, "q"), &Expr::ONE).unwrap_err();
    let Error::Inadmissible { witness, .. } = err else { panic!("{err:?}") };
    assert_eq!(witness.len(), 3);
}

#[test]
fn ratios_are_reciprocal() {
    let c = Chart::darboux(1).unwrap().with_domain("p", 0.5, 2.0).unwrap().with_domain("s", 0.5, 2.0).unwrap();
    let sys = on(&c, "0.7*s");
    let a = conserved_ratio(&sys, &e(&sys, "s"), &e(&sys, "p")).unwrap().expression;
    let b = conserved_ratio(&sys, &e(&sys, "p"), &e(&sys, "s")).unwrap().expression;
    for x in c.sample_points(32) {
        assert!((a.eval(&x).unwrap() * b.eval(&x).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn scaling_constant_of_the_worked_example() {
    let c = Chart::darboux(1).unwrap().with_domain("p", 0.5, 2.0).unwrap();
    let sys = on(&c, "p");
    let q = scaling_constant(&sys, &ham(&sys, "q*p")).unwrap();
    assert!(q.holds, "{:?}", q.checks);
    assert_eq!(q.expression, e(&sys, "-q").simplify());
    assert_eq!(q.value, Some(Expr::constant(-1.0)));
    // Φ H = −qp is not dissipated since λ ≠ 0
    assert!(q.diagnostics.iter().any(|c| !c.passed));
}

#[test]
fn scaling_constant_with_zero_lambda() {
    let c = Chart::darboux(1).unwrap().with_domain("p", 0.5, 2.0).unwrap();
    let sys = on(&c, "p");
    let q = scaling_constant(&sys, &sys.hamiltonian_vector_field().unwrap()).unwrap();
    assert!(q.holds);
    assert_eq!(q.expression, Expr::constant(-1.0));
    assert!(q.diagnostics.iter().all(|c| c.passed));

    let q = scaling_constant(&sys, &ham(&sys, "s")).unwrap();
    assert!(q.holds);
    assert!(c.is_zero(&(&q.expression + e(&sys, "s/p"))).unwrap().is_zero());
    assert_eq!(q.value, Some(Expr::ZERO));
}

#[test]
fn scaling_constant_refusals() {
    let sys = standard("p");
    assert!(matches!(scaling_constant(&sys, &ham(&sys, "q*p")), Err(Error::Inadmissible { .. })));
    let c = Chart::darboux(1).unwrap().with_domain("p", 0.5, 2.0).unwrap();
    let sys = on(&c, "p");
    let y = VectorField::new(&c, vec![e(&sys, "q^2"), Expr::ZERO, Expr::ZERO]).unwrap();
    assert!(matches!(scaling_constant(&sys, &y), Err(Error::Inadmissible { .. })));
}

#[test]
fn reeb_rate_after_straightening() {
    let c = Chart::darboux(1).unwrap().with_domain("p", 0.5, 2.0).unwrap();
    let sys = on(&c, "p");
    let straight = sys.straighten().unwrap().system;
    let q = reeb_scaling_rate(&straight, &ham(&sys, "q*p")).unwrap();
    assert!(q.holds, "{:?}", q.checks);
    assert_eq!(q.expression, Expr::constant(-1.0));
}

#[test]
fn reeb_rate_examples() {
    let sys = standard("-1");
    let q = reeb_scaling_rate(&sys, sys.reeb().unwrap()).unwrap();
    assert!(q.holds);
    assert_eq!(q.expression, Expr::ZERO);

    // X_s = −p∂_p − s∂_s, [X_s, ∂_s] = ∂_s, φ = s, R(s) = 1
    let q = reeb_scaling_rate(&sys, &ham(&sys, "s")).unwrap();
    assert!(q.holds, "{:?}", q.checks);
    assert_eq!(q.expression, Expr::ONE);

    let not_reeb = standard("p");
    assert!(matches!(reeb_scaling_rate(&not_reeb, &ham(&not_reeb, "s")), Err(Error::Inadmissible { .. })));
}

#[test]
fn similarity_constant_examples() {
    let sys = standard("p");
    let y = ham(&sys, "q*p");
    let q = similarity_constant(&sys, &y, &Expr::constant(3.0)).unwrap();
    assert_eq!(q.expression, Expr::ZERO);
    let q = similarity_constant(&sys, &y, &e(&sys, "s")).unwrap();
    assert!(q.holds);
    assert_eq!(q.expression, Expr::ZERO);
    let q = similarity_constant(&sys, &y, &e(&sys, "p")).unwrap();
    assert!(q.holds);
    assert_eq!(q.expression, e(&sys, "-p").simplify());

    assert!(matches!(similarity_constant(&sys, &y, &e(&sys, "q")), Err(Error::Inadmissible { .. })));
}

#[test]
fn scaling_involution_examples() {
    let c = Chart::darboux(1).unwrap().with_domain("p", 0.5, 2.0).unwrap();
    let sys = on(&c, "p");
    let y = ham(&sys, "q*p");
    let q = scaling_involution(&sys, &y, sys.hamiltonian()).unwrap();
    assert!(q.holds);
    // ψ = {qp, p} is a constant multiple of H
    let ratio = (&q.expression / sys.hamiltonian()).simplify();
    assert!(c.is_constant(&ratio).unwrap().is_zero());
    // X_f = X_H, so the fields are dependent
    assert!(!q.diagnostics[0].passed);

    let q = scaling_involution(&sys, &y, &e(&sys, "s")).unwrap();
    assert!(q.holds);

    let q = scaling_involution(&sys, sys.hamiltonian_vector_field().as_ref().unwrap(), &e(&sys, "s")).unwrap();
    assert!(q.holds);
    assert!(c.is_zero(&q.expression).unwrap().is_zero());
}

#[test]
fn involution_refuses_non_dissipated_functions() {
    let sys = standard("p");
    assert!(matches!(scaling_involution(&sys, &ham(&sys, "q*p"), &e(&sys, "q")), Err(Error::Inadmissible { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dissipated_quantities_obey_the_flow_identity(seed in any::<u64>()) {
        let c = Chart::darboux(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random::polynomial(&mut rng, &c, 2, 3);
        let sys = ContactSystem::new(&c, crate::standard_form(&c), h.clone()).unwrap();
        // H itself and any constant multiple are dissipated
        let q = is_dissipated(&sys, &(h * 2.5)).unwrap();
        prop_assert!(q.holds, "{:?}", q.checks);
    }
}
