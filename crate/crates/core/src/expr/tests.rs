use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::random;
use super::*;
use crate::error::{Error, EvalError};

fn qps() -> Chart {
    Chart::darboux(1).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn parses_identifiers_and_products() {
    let c = qps();
    assert_eq!(c.parse("p").unwrap(), c.coord(1));
    let qp = c.parse("q*p").unwrap().simplify();
    assert_eq!(qp, Expr::product(vec![c.coord(0), c.coord(1)]));
    assert_eq!(qp.eval(&[2.0, 3.0, 0.0]).unwrap(), 6.0);
}

#[test]
fn power_is_right_associative() {
    let c = qps();
    assert_eq!(c.parse("2^3^2").unwrap().simplify(), Expr::constant(512.0));
    assert_eq!(c.parse("(2^3)^2").unwrap().simplify(), Expr::constant(64.0));
}

#[test]
fn unary_minus_binds_looser_than_power() {
    let c = qps();
    assert_eq!(c.parse("-2^2").unwrap().simplify(), Expr::constant(-4.0));
    assert_eq!(c.parse("2^-1").unwrap().simplify(), Expr::constant(0.5));
    assert_eq!(c.parse("1 - 2 - 3").unwrap().simplify(), Expr::constant(-4.0));
    assert_eq!(c.parse("8 / 4 / 2").unwrap().simplify(), Expr::constant(1.0));
    assert_eq!(c.parse("1.5e1 + .5").unwrap().simplify(), Expr::constant(15.5));
}

#[test]
fn parse_errors_carry_offsets_and_names() {
    let c = qps();
    match c.parse("q + x") {
        Err(Error::UndeclaredVariable(name)) => assert_eq!(name, "x"),
        other => panic!("unexpected {other:?}"),
    }
    match c.parse("q + * p") {
        Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
        other => panic!("unexpected {other:?}"),
    }
    match c.parse("sin(q") {
        Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 5),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(c.parse("tan(q)"), Err(Error::Syntax { offset: 0, .. })));
    assert!(matches!(c.parse("q p"), Err(Error::Syntax { offset: 2, .. })));
    assert!(matches!(c.parse("d(q)"), Err(Error::Syntax { .. })));
    assert!(matches!(c.parse("q # p"), Err(Error::Syntax { offset: 2, .. })));
}

#[test]
fn one_form_literals() {
    let c = qps();
    let eta = parse_one_form_coeffs(&c, "d(s) - p*d(q)").unwrap();
    assert_eq!(eta, vec![-c.coord(1), Expr::ZERO, Expr::ONE]);
    let scaled = parse_one_form_coeffs(&c, "-(d(s) - p*d(q))/p").unwrap();
    assert_eq!(scaled[0], Expr::ONE);
    assert!(parse_one_form_coeffs(&c, "q*p").is_err());
    assert!(parse_one_form_coeffs(&c, "d(q)*d(p)").is_err());
    assert!(parse_one_form_coeffs(&c, "d(x)").is_err());
    assert!(parse_one_form_coeffs(&c, "sin(d(q))").is_err());
}

#[test]
fn derivative_examples() {
    let c = qps();
    let qp = c.parse("q*p").unwrap();
    assert_eq!(qp.diff(0), c.coord(1));
    assert_eq!(c.parse("p").unwrap().diff(2), Expr::ZERO);

    let e = c.parse("sin(q^2)").unwrap();
    let expected = c.parse("2*q*cos(q^2)").unwrap();
    let de = e.diff(0);
    assert!(c.is_zero(&(de.clone() - expected)).unwrap().is_zero());
    let h = 1e-6;
    for x in c.sample_points(5) {
        let mut lo = x.clone();
        let mut hi = x.clone();
        lo[0] -= h;
        hi[0] += h;
        let fd = (e.eval(&hi).unwrap() - e.eval(&lo).unwrap()) / (2.0 * h);
        assert!((fd - de.eval(&x).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn evaluation_examples() {
    let c = qps();
    assert_eq!(c.parse("exp(0)+log(1)").unwrap().eval(&[0.0, 0.0, 0.0]).unwrap(), 1.0);
    assert!(matches!(
        c.parse("1/p").unwrap().eval(&[1.0, 0.0, 0.0]),
        Err(EvalError::DivisionByZero(_))
    ));
    assert!(matches!(
        c.parse("log(q)").unwrap().eval(&[-1.0, 0.0, 0.0]),
        Err(EvalError::Domain(_))
    ));
    assert!(matches!(
        c.parse("q^0.5").unwrap().eval(&[-1.0, 0.0, 0.0]),
        Err(EvalError::Domain(_))
    ));
    assert!(matches!(
        c.parse("q").unwrap().eval(&[1.0]),
        Err(EvalError::Arity { expected: 1, found: 1 }) | Ok(_)
    ));
    assert!(matches!(
        c.parse("s").unwrap().eval(&[1.0]),
        Err(EvalError::Arity { expected: 3, found: 1 })
    ));
    let v: f32 = c.parse("q*p + 1").unwrap().eval(&[2.0f32, 3.0, 0.0]).unwrap();
    assert_eq!(v, 7.0);
}

#[test]
fn simplified_form_has_no_trivial_subtrees() {
    let c = qps();
    let e = c.parse("0*q + (p + 0)^1 + 1*s + 2*3").unwrap().simplify();
    assert_eq!(e, Expr::sum(vec![c.coord(1), c.coord(2), Expr::constant(6.0)]));
    assert_eq!(c.parse("q - q").unwrap().simplify(), Expr::ZERO);
    assert_eq!(c.parse("q*q/q").unwrap().simplify(), c.coord(0));
    assert_eq!(c.parse("2*q + 3*q").unwrap().simplify(), c.parse("5*q").unwrap().simplify());
}

#[test]
fn expand_distributes() {
    let c = qps();
    let e = c.parse("(q + p)^2 - q^2 - 2*q*p - p^2").unwrap();
    assert_eq!(e.expand(), Expr::ZERO);
    let e = c.parse("(q - s)*(q + s) - q^2 + s^2").unwrap();
    assert_eq!(e.expand(), Expr::ZERO);
}

#[test]
fn zero_test_examples() {
    let c = qps();
    assert_eq!(
        c.is_zero(&c.parse("q - q").unwrap()).unwrap(),
        ZeroTest::Zero { residual: 0.0 }
    );
    let pyth = c.parse("sin(q)^2 + cos(q)^2 - 1").unwrap();
    assert!(c.is_zero(&pyth).unwrap().is_zero());
    let t = c.is_zero(&c.parse("q*p").unwrap()).unwrap();
    let w = t.witness().expect("nonzero carries a witness");
    assert_eq!(w.len(), 3);
    assert!((w[0] * w[1]).abs() > 1e-9);
}

#[test]
fn zero_test_skips_singular_points_and_reports_inconclusive() {
    let c = qps();
    let e = c.parse("log(q) - log(q)").unwrap();
    assert!(c.is_zero(&e).unwrap().is_zero());
    let e = c.parse("sqrt(q) * 0 + sqrt(-2 - q^2)").unwrap();
    assert!(matches!(c.is_zero(&e), Err(Error::Inconclusive { attempts: 320 })));
}

#[test]
fn zero_test_is_deterministic() {
    let c = qps().with_seed(7);
    let e = c.parse("q*p - s").unwrap();
    assert_eq!(c.is_zero(&e).unwrap(), c.is_zero(&e).unwrap());
    let other = c.clone().with_seed(8);
    assert_ne!(c.is_zero(&e).unwrap(), other.is_zero(&e).unwrap());
}

#[test]
fn nonvanishing_checks() {
    let c = qps().with_domain("p", 0.5, 2.0).unwrap();
    assert!(c.require_nonvanishing("H", &c.var("p").unwrap()).is_ok());
    assert!(c.require_nonvanishing("H", &c.var("q").unwrap()).is_err());
    assert!(matches!(
        c.require_nonvanishing("g", &Expr::ZERO),
        Err(Error::Inadmissible { .. })
    ));
}

#[test]
fn chart_validation() {
    assert!(Chart::new(&["q", "p"]).is_err());
    assert!(Chart::new(&["q", "p", "q"]).is_err());
    assert!(Chart::new(&["q", "p", "sin"]).is_err());
    assert!(Chart::new(&["q", "p", "1s"]).is_err());
    let c5 = Chart::darboux(2).unwrap();
    assert_eq!(c5.names().iter().map(|n| &**n).collect::<Vec<_>>(), ["q1", "q2", "p1", "p2", "s"]);
    assert!(qps().with_domain("q", 1.0, 1.0).is_err());
}

#[test]
fn derivative_matches_finite_differences_on_corpus() {
    let c = Chart::darboux(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = 1e-6;
    for _ in 0..50 {
        let e = random::smooth(&mut rng, &c, 2);
        for i in 0..c.dim() {
            let de = e.diff(i);
            for x in c.sample_points(8) {
                let mut lo = x.clone();
                let mut hi = x.clone();
                lo[i] -= h;
                hi[i] += h;
                let (Ok(a), Ok(b), Ok(d)) = (e.eval(&lo), e.eval(&hi), de.eval(&x)) else {
                    continue;
                };
                let fd = (b - a) / (2.0 * h);
                assert!(rel_close(fd, d, 1e-5), "{e} d/d{} at {x:?}: fd {fd} vs {d}", c.name(i));
            }
        }
    }
}

proptest! {
    #[test]
    fn simplify_preserves_value(seed in any::<u64>()) {
        let c = qps();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random::smooth(&mut rng, &c, 3);
        let raw = c.parse(&e.to_string()).unwrap();
        let simple = raw.simplify();
        for x in c.sample_points(8) {
            if let (Ok(a), Ok(b)) = (raw.eval(&x), simple.eval(&x)) {
                prop_assert!(rel_close(a, b, 1e-12), "{raw} vs {simple}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn expand_preserves_value(seed in any::<u64>()) {
        let c = qps();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::polynomial(&mut rng, &c, 2, 3);
        let b = random::polynomial(&mut rng, &c, 2, 3);
        let e = Expr::pow(a + b.clone(), Expr::constant(2.0)) * b;
        let expanded = e.expand();
        for x in c.sample_points(8) {
            prop_assert!(rel_close(e.eval(&x).unwrap(), expanded.eval(&x).unwrap(), 1e-10));
        }
    }

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let c = qps();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random::smooth(&mut rng, &c, 3);
        let text = e.to_string();
        let back = c.parse(&text).unwrap();
        prop_assert_eq!(back.simplify(), e.simplify(), "printed as {}", text);
        let parsed = c.parse(&text).unwrap();
        prop_assert_eq!(c.parse(&parsed.to_string()).unwrap(), parsed);
    }

    #[test]
    fn zero_test_accepts_exact_identities(seed in any::<u64>()) {
        let c = qps();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::smooth(&mut rng, &c, 2);
        let b = random::smooth(&mut rng, &c, 2);
        let lhs = (a.clone() + b.clone()) * (a.clone() - b.clone());
        let rhs = a.clone() * a - b.clone() * b;
        prop_assert!(c.is_zero(&(lhs - rhs)).unwrap().is_zero());
    }
}
