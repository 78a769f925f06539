//! Random expression generators for property tests and randomized checks.

use rand::Rng;

use super::{Chart, Expr};

/// A polynomial with `terms` monomials of total degree at most `max_degree`
/// and small integer coefficients.
pub fn polynomial<R: Rng + ?Sized>(rng: &mut R, chart: &Chart, max_degree: u32, terms: usize) -> Expr {
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let coeff = loop {
            let c = rng.gen_range(-3i32..=3);
            if c != 0 {
                break c as f64;
            }
        };
        let degree = rng.gen_range(0..=max_degree);
        let mut factors = vec![Expr::constant(coeff)];
        for _ in 0..degree {
            factors.push(chart.coord(rng.gen_range(0..chart.dim())));
        }
        out.push(Expr::product(factors));
    }
    Expr::sum(out)
}

/// A random expression built from polynomials, products, quotients with a
/// nonvanishing denominator and `sin`, `cos`, `exp`. Evaluable everywhere.
pub fn smooth<R: Rng + ?Sized>(rng: &mut R, chart: &Chart, depth: u32) -> Expr {
    if depth == 0 {
        let terms = rng.gen_range(1..=3);
        return polynomial(rng, chart, 2, terms);
    }
    let a = smooth(rng, chart, depth - 1);
    match rng.gen_range(0..6) {
        0 => a + smooth(rng, chart, depth - 1),
        1 => a * smooth(rng, chart, depth - 1),
        2 => {
            let b = smooth(rng, chart, depth - 1);
            Expr::quotient(a, Expr::sum(vec![Expr::constant(2.0), b.clone() * b]))
        }
        3 => a.sin(),
        4 => a.cos(),
        _ => Expr::product(vec![Expr::constant(0.25), a]).sin().exp(),
    }
}
