use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::expr::random;

fn qps() -> Chart {
    Chart::darboux(1).unwrap()
}

fn dx(c: &Chart, name: &str) -> KForm {
    KForm::differential(c, c.index_of(name).unwrap())
}

fn field(c: &Chart, comps: &[&str]) -> VectorField {
    VectorField::new(c, comps.iter().map(|t| c.parse(t).unwrap()).collect()).unwrap()
}

fn form_is_zero(c: &Chart, a: &KForm) -> bool {
    c.all_zero(&a.all_coeffs()).unwrap().is_zero()
}

fn random_form<R: Rng>(rng: &mut R, c: &Chart, degree: usize) -> KForm {
    let tuples = combinations(c.dim(), degree);
    let picks = rng.gen_range(1..=3);
    let terms: Vec<_> = (0..picks)
        .map(|_| {
            let t = tuples[rng.gen_range(0..tuples.len())].clone();
            let coef = if rng.gen_bool(0.3) {
                random::smooth(rng, c, 1)
            } else {
                random::polynomial(rng, c, 2, 3)
            };
            (t, coef)
        })
        .collect();
    KForm::from_terms(c, degree, terms)
}

fn random_field<R: Rng>(rng: &mut R, c: &Chart) -> VectorField {
    VectorField::new(c, (0..c.dim()).map(|_| random::polynomial(rng, c, 2, 2)).collect()).unwrap()
}

#[test]
fn wedge_examples() {
    let c = qps();
    let (dq, dp) = (dx(&c, "q"), dx(&c, "p"));
    assert!(dq.wedge(&dq).unwrap().is_zero_literal());
    let a = dq.wedge(&dp).unwrap();
    let b = dp.wedge(&dq).unwrap();
    assert_eq!(a, b.neg());
    assert_eq!(a.coeff(&[0, 1]), Expr::ONE);

    let eta = KForm::parse_one_form(&c, "d(s) - p*d(q)").unwrap();
    let minus_dp_dq = b.neg();
    let vol = eta.wedge(&minus_dp_dq).unwrap();
    assert_eq!(vol.degree(), 3);
    assert_eq!(vol.top_coefficient(), Expr::ONE);
    // same top form as -ds∧dp∧dq written in that order
    assert_eq!(vol.coeff(&[2, 1, 0]), Expr::constant(-1.0));
    assert!(vol.wedge(&dq).unwrap().is_zero_literal());
    assert_eq!(vol.wedge(&dq).unwrap().degree(), 4);
}

#[test]
fn exterior_derivative_examples() {
    let c = qps();
    let eta = KForm::parse_one_form(&c, "d(s) - p*d(q)").unwrap();
    let deta = eta.d();
    let expected = dx(&c, "p").wedge(&dx(&c, "q")).unwrap().neg();
    assert_eq!(deta, expected);
    assert!(dx(&c, "q").d().is_zero_literal());
    let f = KForm::scalar(&c, c.parse("q*p").unwrap());
    let df = f.d();
    assert_eq!(df.components(), vec![c.coord(1), c.coord(0), Expr::ZERO]);
}

#[test]
fn interior_product_examples() {
    let c = qps();
    let eta = KForm::parse_one_form(&c, "d(s) - p*d(q)").unwrap();
    let ds = VectorField::coordinate(&c, 2);
    assert_eq!(eta.interior(&ds).unwrap().as_scalar(), Expr::ONE);

    let vol = dx(&c, "s").wedge(&dx(&c, "q")).unwrap().wedge(&dx(&c, "p")).unwrap();
    let dq_field = VectorField::coordinate(&c, 0);
    let expected = dx(&c, "s").wedge(&dx(&c, "p")).unwrap().neg();
    assert_eq!(vol.interior(&dq_field).unwrap(), expected);

    let x = field(&c, &["q*s", "sin(p)", "1 + q^2"]);
    assert!(vol.interior(&x).unwrap().interior(&x).unwrap().is_zero_literal());
}

#[test]
fn lie_derivative_examples() {
    let c = qps();
    let eta = KForm::parse_one_form(&c, "d(s) - p*d(q)").unwrap();
    let xp = VectorField::coordinate(&c, 0);
    assert!(eta.lie(&xp).unwrap().is_zero_literal());
    let y = field(&c, &["0", "-p", "0"]);
    assert_eq!(eta.lie(&y).unwrap(), dx(&c, "q").scale(&c.coord(1)));
    let r = VectorField::coordinate(&c, 2);
    assert!(eta.lie(&r).unwrap().is_zero_literal());
    let f = KForm::scalar(&c, c.parse("q*p").unwrap());
    assert_eq!(f.lie(&y).unwrap().as_scalar(), c.parse("-q*p").unwrap().simplify());
}

#[test]
fn eval_form_examples() {
    let c = qps();
    let w = dx(&c, "q").wedge(&dx(&c, "p")).unwrap();
    let (eq, ep) = (vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]);
    let x = [0.3, -0.7, 1.1];
    assert_eq!(w.eval_at(&x, &[eq.clone(), ep.clone()]).unwrap(), 1.0);
    assert_eq!(w.eval_at(&x, &[ep.clone(), eq.clone()]).unwrap(), -1.0);
    assert!(w.eval_at(&x, &[eq]).is_err());

    let eta = KForm::parse_one_form(&c, "d(s) - p*d(q)").unwrap();
    for pt in c.sample_points(8) {
        assert_eq!(eta.eval_at(&pt, &[vec![0.0, 0.0, 1.0]]).unwrap(), 1.0);
    }
}

#[test]
fn chart_mismatch_is_reported() {
    let c = qps();
    let other = Chart::new(&["x", "y", "z"]).unwrap();
    let a = dx(&c, "q");
    let b = KForm::differential(&other, 0);
    assert!(matches!(a.wedge(&b), Err(Error::ChartMismatch { .. })));
    assert!(matches!(a.interior(&VectorField::coordinate(&other, 0)), Err(Error::ChartMismatch { .. })));
}

#[test]
fn display_round_trips_one_forms() {
    let c = qps();
    let eta = KForm::parse_one_form(&c, "-(d(s) - p*d(q))/p + (q + s)*d(p)").unwrap();
    let back = KForm::parse_one_form(&c, &eta.to_string()).unwrap();
    assert_eq!(back, eta);
    assert_eq!(dx(&c, "q").wedge(&dx(&c, "p")).unwrap().to_string(), "d(q)∧d(p)");
    assert_eq!(field(&c, &["q", "-p", "0"]).to_string(), "q*∂_q - p*∂_p");
}

#[test]
fn d_squared_vanishes_on_random_forms() {
    for (n, seed) in [(1usize, 1u64), (2, 2)] {
        let c = Chart::darboux(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 0..100 {
            let a = random_form(&mut rng, &c, k % 2);
            assert!(form_is_zero(&c, &a.d().d()), "d d ({a}) != 0");
        }
    }
}

#[test]
fn contraction_antisymmetry_in_fields() {
    let c = Chart::darboux(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_form(&mut rng, &c, 3);
    let x = random_field(&mut rng, &c);
    let y = random_field(&mut rng, &c);
    let xy = a.contract(&[x.clone(), y.clone()]).unwrap();
    let yx = a.contract(&[y, x]).unwrap();
    assert!(form_is_zero(&c, &xy.add(&yx).unwrap()));
}

#[test]
fn eval_at_agrees_with_iterated_contraction() {
    let c = qps();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = random_form(&mut rng, &c, 2);
    let x = random_field(&mut rng, &c);
    let y = random_field(&mut rng, &c);
    // α(X, Y) = ι_Y ι_X α
    let contracted = a.contract(&[x.clone(), y.clone()]).unwrap().as_scalar();
    for pt in c.sample_points(16) {
        let v = a.eval_at(&pt, &[x.eval_at(&pt).unwrap(), y.eval_at(&pt).unwrap()]).unwrap();
        let w = contracted.eval(&pt).unwrap();
        assert!((v - w).abs() <= 1e-9 * (1.0 + v.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn interior_is_a_graded_derivation(seed in any::<u64>(), ka in 0usize..3, kb in 0usize..3) {
        let c = Chart::darboux(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_form(&mut rng, &c, ka);
        let b = random_form(&mut rng, &c, kb);
        let x = random_field(&mut rng, &c);
        let lhs = a.wedge(&b).unwrap().interior(&x).unwrap();
        prop_assume!(ka + kb > 0);
        let sign = if ka % 2 == 0 { Expr::ONE } else { Expr::constant(-1.0) };
        // ι_X of a 0-form has no term
        let mut rhs = KForm::zero(&c, ka + kb - 1);
        if ka > 0 {
            rhs = rhs.add(&a.interior(&x).unwrap().wedge(&b).unwrap()).unwrap();
        }
        if kb > 0 {
            rhs = rhs.add(&a.wedge(&b.interior(&x).unwrap()).unwrap().scale(&sign)).unwrap();
        }
        prop_assert!(form_is_zero(&c, &lhs.sub(&rhs).unwrap()));
    }

    #[test]
    fn lie_derivative_is_a_derivation(seed in any::<u64>(), ka in 0usize..3, kb in 0usize..2) {
        let c = qps();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_form(&mut rng, &c, ka);
        let b = random_form(&mut rng, &c, kb);
        let x = random_field(&mut rng, &c);
        let lhs = a.wedge(&b).unwrap().lie(&x).unwrap();
        let rhs = a.lie(&x).unwrap().wedge(&b).unwrap()
            .add(&a.wedge(&b.lie(&x).unwrap()).unwrap()).unwrap();
        prop_assert!(form_is_zero(&c, &lhs.sub(&rhs).unwrap()));
    }

    #[test]
    fn wedge_is_associative_and_graded_commutative(seed in any::<u64>(), ka in 0usize..3, kb in 0usize..3) {
        let c = Chart::darboux(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_form(&mut rng, &c, ka);
        let b = random_form(&mut rng, &c, kb);
        let e = random_form(&mut rng, &c, 1);
        let left = a.wedge(&b).unwrap().wedge(&e).unwrap();
        let right = a.wedge(&b.wedge(&e).unwrap()).unwrap();
        prop_assert!(form_is_zero(&c, &left.sub(&right).unwrap()));
        let sign = if (ka * kb) % 2 == 0 { Expr::ONE } else { Expr::constant(-1.0) };
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap().scale(&sign);
        prop_assert!(form_is_zero(&c, &ab.sub(&ba).unwrap()));
    }

    #[test]
    fn bracket_matches_lie_derivative_on_functions(seed in any::<u64>()) {
        let c = qps();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_field(&mut rng, &c);
        let y = random_field(&mut rng, &c);
        let f = random::smooth(&mut rng, &c, 1);
        let lhs = x.bracket(&y).unwrap().apply(&f);
        let rhs = x.apply(&y.apply(&f)) - y.apply(&x.apply(&f));
        prop_assert!(c.is_zero(&(lhs - rhs)).unwrap().is_zero());
    }
}
