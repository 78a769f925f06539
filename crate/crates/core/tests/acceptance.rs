//! The acceptance suite: ten criteria at pinned tolerances, one line each.
//! Runs without the test harness so every line is printed; exits nonzero
//! if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use contactkit::decomp::{self, Payload};
use contactkit::expr::random;
use contactkit::flow::{self, dissipation_envelope};
use contactkit::integrability::compare_li;
use contactkit::quantities::scaling_constant;
use contactkit::symmetry::{check_cartan, classify};
use contactkit::{standard_form, Chart, Check, ContactSystem, Expr, KForm, VectorField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const TOL: f64 = 1e-9;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn passed(checks: &[Check], bound: f64) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for c in checks {
        ensure(c.passed && c.residual < bound, || format!("{} failed: residual {:e} at {:?}", c.name, c.residual, c.witness))?;
        worst = worst.max(c.residual);
    }
    Ok(worst)
}

fn err(e: contactkit::Error) -> String {
    e.to_string()
}

fn chart_with(n: usize, domains: &[(&str, f64, f64)]) -> Chart {
    let mut c = Chart::darboux(n).unwrap();
    for (name, lo, hi) in domains {
        c = c.with_domain(name, *lo, *hi).unwrap();
    }
    c
}

fn system(chart: &Chart, h: &str) -> ContactSystem {
    ContactSystem::new(chart, standard_form(chart), chart.parse(h).unwrap()).unwrap()
}

fn worked_scaling_example() -> Outcome {
    let c = chart_with(1, &[("p", 0.5, 2.0)]);
    let sys = system(&c, "p");
    let qp = c.parse("q*p").map_err(err)?;
    let y = sys.hamiltonian_field(&qp).map_err(err)?;
    let r = classify(&sys, &y, None, None).map_err(err)?;
    ensure(r.scaling_symmetry == Some(true), || format!("not classified as scaling: {:?}", r.conditions))?;
    ensure(r.consistent(), || format!("assertions failed: {:?}", r.assertions))?;
    let lambda = r.lambda.clone().ok_or("no lambda")?;
    let value = lambda.as_const().ok_or_else(|| format!("lambda = {lambda} is not a literal constant"))?;
    ensure(value.abs() == 1.0, || format!("|lambda| = {}", value.abs()))?;
    ensure(KForm::scalar(&c, lambda.clone()).d().is_zero_literal(), || "d(lambda) is not literally zero".into())?;
    let bracket = sys.jacobi_bracket(&c.coord(1), &qp).map_err(err)?;
    let p = c.coord(1);
    let abs_diff = c.is_zero(&(&bracket * &bracket - &p * &p)).map_err(err)?;
    ensure(abs_diff.is_zero(), || format!("|{{p, qp}}| - |p| residual {:e}", abs_diff.residual()))?;
    let phi = scaling_constant(&sys, &y).map_err(err)?;
    ensure(phi.holds, || format!("Phi checks failed: {:?}", phi.checks))?;
    let rate = phi.value.as_ref().and_then(Expr::as_const).ok_or("X_H(Phi) is not constant")?;
    ensure(rate.abs() == 1.0, || format!("|X_H(Phi)| = {}", rate.abs()))?;
    let sign = |v: f64| if v < 0.0 { "-" } else { "+" };
    Ok(format!(
        "scaling, lambda = {value}, {{p, qp}} = {bracket}, Phi = {}, X_H(Phi) = {rate} (signs {}/{} reported)",
        phi.expression,
        sign(value),
        sign(rate)
    ))
}

fn reeb_correctness() -> Outcome {
    for n in 1..=3 {
        let c = Chart::darboux(n).unwrap();
        let sys = system(&c, "0");
        let r = sys.reeb().map_err(err)?;
        let normal = (sys.eta().interior(r).map_err(err)?.as_scalar() - 1.0).simplify();
        ensure(normal.is_zero_literal(), || format!("dim {}: eta(R) - 1 = {normal}", 2 * n + 1))?;
        let flat = sys.d_eta().interior(r).map_err(err)?;
        ensure(flat.all_coeffs().iter().all(|e| e.simplify().is_zero_literal()), || format!("dim {}: i_R d(eta) = {flat}", 2 * n + 1))?;
    }
    let perturbed = [
        (1, "d(s) - p*d(q) + 0.3*q*d(p)"),
        (1, "exp(q)*(d(s) - p*d(q)) + 0.1*sin(p)*d(q)"),
        (2, "(1 + 0.1*q1^2)*d(s) - p1*d(q1) - p2*d(q2) + 0.2*q2*d(p1)"),
    ];
    let mut worst = 0.0f64;
    for (n, text) in perturbed {
        let c = Chart::darboux(n).unwrap();
        let eta = KForm::parse_one_form(&c, text).map_err(err)?;
        let sys = ContactSystem::new(&c, eta, Expr::ZERO).map_err(err)?;
        let r = sys.reeb().map_err(err)?;
        let normal = sys.eta().interior(r).map_err(err)?.as_scalar();
        let flat = sys.d_eta().interior(r).map_err(err)?;
        for x in c.sample_points(32) {
            let rx = sys.reeb_at(&x).map_err(err)?;
            let a = (normal.eval(&x).map_err(|e| e.to_string())? - 1.0).abs();
            let b = flat
                .all_coeffs()
                .iter()
                .map(|e| e.eval(&x).map(f64::abs))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| e.to_string())?
                .into_iter()
                .fold(0.0, f64::max);
            let sym: Vec<f64> = r.eval_at(&x).map_err(|e| e.to_string())?;
            let agree = sym.iter().zip(&rx).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            worst = worst.max(a).max(b).max(agree);
        }
        ensure(worst < 1e-12, || format!("{text}: residual {worst:e}"))?;
    }
    Ok(format!("dims 3, 5, 7 exact; perturbed forms residual {worst:.1e} < 1e-12"))
}

fn hamiltonian_identities() -> Outcome {
    let mut worst = 0.0f64;
    for n in [1, 2] {
        let c = Chart::darboux(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(30 + n as u64);
        for _ in 0..20 {
            let h = random::polynomial(&mut rng, &c, 3, 4);
            let sys = ContactSystem::new(&c, standard_form(&c), h.clone()).map_err(err)?;
            let checks = sys.hamiltonian_identities(&h).map_err(err)?;
            ensure(checks.len() == 4, || "expected four identities".into())?;
            worst = worst.max(passed(&checks, TOL).map_err(|m| format!("H = {h}: {m}"))?);
        }
    }
    Ok(format!("40 Hamiltonians, four identities each, worst residual {worst:.1e}"))
}

fn bracket_closure() -> Outcome {
    let c = Chart::darboux(1).unwrap();
    let sys = system(&c, "0");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let f = random::polynomial(&mut rng, &c, 3, 4);
        let g = random::polynomial(&mut rng, &c, 3, 4);
        let r = sys.bracket_closure_check(&f, &g).map_err(err)?;
        worst = worst.max(passed(&r.checks[..2], TOL).map_err(|m| format!("({f}, {g}): {m}"))?);
        let h = sys.jacobi_bracket(&f, &g).map_err(err)?;
        ensure(c.is_zero(&(&r.h - &h)).map_err(err)?.is_zero(), || format!("h != {{f, g}} for ({f}, {g})"))?;
    }
    Ok(format!("10 pairs, [X_f, X_g] = X_h with h = -eta([X_f, X_g]), worst residual {worst:.1e}"))
}

fn decomposition_roundtrip() -> Outcome {
    let mut worst = 0.0f64;
    for (n, count) in [(1usize, 15), (2, 15)] {
        let c = Chart::darboux(n).unwrap();
        let sys = system(&c, "0");
        let mut rng = ChaCha8Rng::seed_from_u64(50 + n as u64);
        for _ in 0..count {
            let xi = VectorField::new(&c, (0..c.dim()).map(|_| random::polynomial(&mut rng, &c, 2, 3)).collect()).map_err(err)?;
            let d = decomp::ham_hor_decompose(&sys, &xi).map_err(err)?;
            worst = worst.max(passed(&d.checks, TOL)?);
        }
        for _ in 0..5 {
            let f = random::polynomial(&mut rng, &c, 3, 4);
            let (_, _, checks) = decomp::vertical_jacobi(&sys, &f).map_err(err)?;
            worst = worst.max(passed(&checks, TOL)?);
        }
    }
    Ok(format!("30 fields and 10 functions, worst residual {worst:.1e}"))
}

fn lemma_oracle() -> Outcome {
    let cases: [(usize, &[&str]); 5] = [
        (1, &["1"]),
        (1, &["1", "p"]),
        (2, &["1"]),
        (2, &["1", "p1"]),
        (2, &["1", "p1", "p2"]),
    ];
    let mut worst = 0.0f64;
    for (n, fs) in cases {
        let c = Chart::darboux(n).unwrap();
        let sys = system(&c, "0");
        let fs: Vec<Expr> = fs.iter().map(|f| c.parse(f).unwrap()).collect();
        let cmp = compare_li(&sys, &fs).map_err(err)?;
        ensure(cmp.check.passed && cmp.check.residual < 1e-8, || format!("(m, n) = ({}, {n}): {:?}", fs.len() - 1, cmp.table))?;
        worst = worst.max(cmp.check.residual);
    }
    let c = Chart::darboux(1).unwrap();
    let sys = system(&c, "0");
    let form = compare_li(&sys, &[Expr::ONE, c.coord(1)]).map_err(err)?.closed_form;
    let expected = KForm::differential(&c, 1).neg();
    ensure(form == expected, || format!("(1, p) gave {form}"))?;
    Ok(format!("5 (m, n) pairs agree, worst residual {worst:.1e}; (1, p) gives {form}"))
}

fn cartan_verification() -> Outcome {
    let c = Chart::darboux(1).unwrap();
    let sys = system(&c, "p");
    let y = VectorField::new(&c, vec![Expr::ZERO, -c.coord(1), Expr::ZERO]).unwrap();
    let r = check_cartan(&sys, &y, &c.coord(2), Some(&Expr::constant(-1.0))).map_err(err)?;
    ensure(r.cartan_symmetry == Some(true), || format!("conditions: {:?}", r.conditions))?;
    let all: Vec<Check> = r.checks().cloned().collect();
    ensure(all.len() == 4, || format!("expected four checks, got {}", all.len()))?;
    passed(&all, TOL)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let h = random::polynomial(&mut rng, &c, 3, 4);
        let sys = ContactSystem::new(&c, standard_form(&c), h.clone()).map_err(err)?;
        let xh = sys.hamiltonian_vector_field().map_err(err)?;
        let r = check_cartan(&sys, &xh, &Expr::ZERO, None).map_err(err)?;
        ensure(r.cartan_symmetry == Some(true), || format!("X_H not Cartan for H = {h}"))?;
        passed(&r.checks().cloned().collect::<Vec<_>>(), TOL).map_err(|m| format!("H = {h}: {m}"))?;
    }
    Ok("-p d_p with g = s, a = -1 passes all four checks; X_H with g = 0 passes for 5 random H".into())
}

fn flow_accuracy() -> Outcome {
    let c = Chart::darboux(1).unwrap();
    let sys = system(&c, "0.1*s");
    let traj = flow::integrate(&sys, &[0.0, 1.0, 1.0], 0.0, 10.0, 1e-3, &[]).map_err(err)?;
    let target = (-1.0f64).exp();
    let x = traj.final_state();
    let (ep, es) = ((x[1] - target).abs(), (x[2] - target).abs());
    ensure(ep < 1e-6 && es < 1e-6, || format!("|p(10) - 1/e| = {ep:e}, |s(10) - 1/e| = {es:e}"))?;
    let res = traj.dissipation_residual.ok_or("no residual")?;
    ensure(res < 1e-4, || format!("dissipation residual {res:e}"))?;
    let drift = traj.max_drift(&c.parse("s/p").unwrap()).ok_or("kappa undefined")?;
    ensure(drift < 1e-6, || format!("kappa drift {drift:e}"))?;
    let env = dissipation_envelope(&traj, &sys, &c.coord(2)).map_err(err)?;
    let err_at = |dt: f64| -> Result<f64, String> {
        let t = flow::integrate(&sys, &[0.0, 1.0, 1.0], 0.0, 10.0, dt, &[]).map_err(err)?;
        Ok((t.final_state()[1] - target).abs())
    };
    let ratio = err_at(0.5)? / err_at(0.25)?;
    ensure((8.0..=32.0).contains(&ratio), || format!("order ratio {ratio}"))?;
    Ok(format!(
        "p, s errors {ep:.1e}, {es:.1e}; residual {res:.1e}; kappa drift {drift:.1e}; envelope {:.1e}; order ratio {ratio:.2}",
        env.max_relative_error
    ))
}

fn straightening() -> Outcome {
    let c = chart_with(1, &[("p", 0.5, 2.0)]);
    let sys = system(&c, "p");
    let st = sys.straighten().map_err(err)?;
    passed(&st.checks, TOL)?;
    let xp = sys.hamiltonian_field(&c.coord(1)).map_err(err)?;
    let diff = st.system.reeb().map_err(err)?.sub(&xp).map_err(err)?;
    ensure(c.all_zero(diff.components()).map_err(err)?.is_zero(), || "Reeb(-eta/p) != X_p".into())?;

    let two = sys.rescale(&Expr::constant(2.0)).map_err(err)?;
    let law = two.system.volume().sub(&sys.volume().scale(&Expr::constant(4.0))).map_err(err)?;
    ensure(law.all_coeffs().iter().all(|e| e.simplify().is_zero_literal()), || format!("g = 2: volume law leaves {law}"))?;
    let g = c.parse("1 + (q^2 + p^2)/4").unwrap();
    let r = sys.rescale(&g).map_err(err)?;
    let worst = passed(&r.checks, TOL)?;
    Ok(format!("Reeb(-eta/p) = X_p; volume law exact for g = 2, residual {worst:.1e} for 1 + (q^2+p^2)/4"))
}

fn density_gauge() -> Outcome {
    let c = chart_with(1, &[("p", 0.5, 2.0)]);
    let sys = system(&c, "p + q*s");
    let xh = sys.hamiltonian_vector_field().map_err(err)?;
    let d = decomp::hamiltonian_density(&sys, &xh).map_err(err)?;
    let Payload::Scalar(coef) = &d.payload else { return Err("scalar payload expected".into()) };
    ensure(c.is_zero(&(coef + sys.hamiltonian())).map_err(err)?.is_zero(), || format!("coefficient {coef} != -H"))?;
    for g in ["2", "1 + (q^2 + p^2)/4"] {
        let g = c.parse(g).unwrap();
        let rescaled = sys.rescale(&g).map_err(err)?.system;
        let direct = decomp::hamiltonian_density(&rescaled, &xh).map_err(err)?;
        let check = decomp::density_gauge_check(&sys, &d, &g, &direct).map_err(err)?;
        passed(std::slice::from_ref(&check), TOL).map_err(|m| format!("g = {g}: {m}"))?;
        let Payload::Scalar(moved) = &direct.payload else { return Err("scalar payload expected".into()) };
        let expected = -(&g * sys.hamiltonian());
        ensure(c.is_zero(&(moved - &expected)).map_err(err)?.is_zero(), || format!("g = {g}: {moved} != -gH"))?;
    }
    let hor = decomp::horizontal_density(&sys, &xh).map_err(err)?;
    let zero = c.all_zero(&hor.density.payload.coefficients()).map_err(err)?;
    ensure(zero.is_zero(), || format!("horizontal payload of X_H is {}", hor.density.payload))?;
    Ok("-H -> -gH for g = 2 and 1 + (q^2+p^2)/4; horizontal payload of X_H is zero".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("worked scaling example", worked_scaling_example),
        ("Reeb correctness", reeb_correctness),
        ("Hamiltonian identities", hamiltonian_identities),
        ("bracket closure", bracket_closure),
        ("decomposition roundtrip", decomposition_roundtrip),
        ("closed form vs contraction", lemma_oracle),
        ("Cartan verification", cartan_verification),
        ("flow accuracy", flow_accuracy),
        ("straightening and rescaling", straightening),
        ("density gauge behavior", density_gauge),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("acceptance {:>2} PASS {name}: {detail} [{secs:.2}s]", k + 1),
            Err(reason) => {
                failures += 1;
                println!("acceptance {:>2} FAIL {name}: {reason} [{secs:.2}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
