//! Hamiltonian–horizontal decomposition `ξ = X_{−η(ξ)} + δ`, the
//! horizontal–vertical split `ξ = (ξ − η(ξ)R) + η(ξ)R`, and the
//! tensor-density representatives of both components.
//!
//! The horizontal density reads `X_{η(ξ)}` as the Hamiltonian field of the
//! function `η(ξ)`, so `ξ + X_{η(ξ)} = δ` and its payload is
//! `−η ∧ ι_δ dη`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contact::ContactSystem;
use crate::error::{Error, Result};
use crate::expr::{Check, Expr, ZeroTest};
use crate::forms::{KForm, VectorField};
use crate::Degree;

/// `ξ = X_φ + δ` with `φ = −η(ξ)` and `η(δ) = 0`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub phi: Expr,
    pub hamiltonian_part: VectorField,
    pub horizontal_part: VectorField,
    /// `η(δ) = 0` and `ξ − X_φ − δ = 0`.
    pub checks: Vec<Check>,
}

/// Returns `(ξ − η(ξ)R, η(ξ)R)` and checks that the first part is horizontal.
pub fn vertical_split(sys: &ContactSystem, xi: &VectorField) -> Result<(VectorField, VectorField, Check)> {
    let v = sys.eta().interior(xi)?.as_scalar();
    let vertical = sys.reeb()?.scale(&v);
    let horizontal = xi.sub(&vertical)?;
    let check = sys
        .chart()
        .check("eta(horizontal)", &sys.eta().interior(&horizontal)?.as_scalar())?;
    Ok((horizontal, vertical, check))
}

pub fn ham_hor_decompose(sys: &ContactSystem, xi: &VectorField) -> Result<Decomposition> {
    let phi = sys.eta().interior(xi)?.as_scalar().negate().expand();
    let hamiltonian_part = sys.hamiltonian_field(&phi)?;
    let horizontal_part = xi.sub(&hamiltonian_part)?;
    let chart = sys.chart();
    let recomposed = xi.sub(&hamiltonian_part.add(&horizontal_part)?)?;
    let checks = vec![
        chart.check("eta(delta)", &sys.eta().interior(&horizontal_part)?.as_scalar())?,
        chart.check_all("xi - X_phi - delta", recomposed.components())?,
    ];
    Ok(Decomposition {
        phi,
        hamiltonian_part,
        horizontal_part,
        checks,
    })
}

/// For `Y = f R` returns `(X_{−f}, Λ(df, ·))` and checks
/// `f R = X_{−f} + Λ(df, ·)` and that `Λ(df, ·)` is horizontal.
pub fn vertical_jacobi(sys: &ContactSystem, f: &Expr) -> Result<(VectorField, VectorField, Vec<Check>)> {
    let y = sys.reeb()?.scale(f);
    let ham = sys.hamiltonian_field(&f.clone().negate())?;
    let df = KForm::scalar(sys.chart(), f.clone()).d();
    let hor = sys.lambda_sharp(&df)?;
    let chart = sys.chart();
    let checks = vec![
        chart.check_all("f R - X_(-f) - Lambda(df)", y.sub(&ham.add(&hor)?)?.components())?,
        chart.check("eta(Lambda(df))", &sys.eta().interior(&hor)?.as_scalar())?,
    ];
    Ok((ham, hor, checks))
}

/// Coefficient of a density against `η^{(n+1)λ}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Scalar(Expr),
    Form(KForm),
}

impl Payload {
    fn scale(&self, f: &Expr) -> Payload {
        match self {
            Payload::Scalar(e) => Payload::Scalar((e * f).expand()),
            Payload::Form(a) => Payload::Form(a.scale(f)),
        }
    }

    /// Coefficient expressions (one, or one per basis element).
    pub fn coefficients(&self) -> Vec<Expr> {
        match self {
            Payload::Scalar(e) => vec![e.clone()],
            Payload::Form(a) => a.all_coeffs(),
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        self.coefficients().iter().all(Expr::is_zero_literal)
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::Scalar(e) => write!(f, "{e}"),
            Payload::Form(a) => write!(f, "{a}"),
        }
    }
}

/// A tensor density `payload ⊗ η^{(n+1)λ}` of degree `λ` written in the
/// gauge `η`.
#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    pub payload: Payload,
    pub degree: Degree,
    pub gauge: KForm,
}

impl Density {
    /// The exponent `(n+1)λ` of the gauge.
    pub fn gauge_power(&self, n: usize) -> Degree {
        self.degree * Degree::from_integer(n as i64 + 1)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = (self.gauge.dim() - 1) / 2;
        let k = self.gauge_power(n);
        match &self.payload {
            Payload::Form(_) => write!(f, "({}) ⊗ η^({k})", self.payload),
            Payload::Scalar(_) => write!(f, "{} ⊗ η^({k})", self.payload),
        }
    }
}

fn degree_over(k: i64, n: usize) -> Degree {
    Degree::new(k, n as i64 + 1)
}

/// `ψ_ξ = η(ξ) ⊗ η^{−1}`, degree `−1/(n+1)`.
pub fn hamiltonian_density(sys: &ContactSystem, xi: &VectorField) -> Result<Density> {
    Ok(Density {
        payload: Payload::Scalar(sys.eta().interior(xi)?.as_scalar()),
        degree: degree_over(-1, sys.n()),
        gauge: sys.eta().clone(),
    })
}

/// Horizontal density with its shape checks.
#[derive(Clone, Debug)]
pub struct HorizontalDensity {
    pub density: Density,
    pub checks: Vec<Check>,
}

/// `σ_ξ = −η ∧ ι_{ξ + X_{η(ξ)}} dη ⊗ η^{−2}`, degree `−2/(n+1)`.
///
/// Checks that the literal route agrees with `−η ∧ ι_δ dη`, that the payload
/// has the shape `η ∧ β` (`η ∧ σ = 0`), and that it vanishes on pairs of
/// sampled vectors in `ker η ∩ ker β`.
pub fn horizontal_density(sys: &ContactSystem, xi: &VectorField) -> Result<HorizontalDensity> {
    let chart = sys.chart();
    let eta = sys.eta();
    let eta_xi = eta.interior(xi)?.as_scalar();
    let shifted = xi.add(&sys.hamiltonian_field(&eta_xi)?)?;
    let beta = sys.d_eta().interior(&shifted)?.neg();
    let payload = eta.wedge(&beta)?;

    let delta = ham_hor_decompose(sys, xi)?.horizontal_part;
    let via_delta = eta.wedge(&sys.d_eta().interior(&delta)?)?.neg();
    let mut checks = vec![
        chart.check_all("sigma - (-eta ^ i_delta d(eta))", &payload.sub(&via_delta)?.all_coeffs())?,
        chart.check_all("eta ^ sigma", &eta.wedge(&payload)?.all_coeffs())?,
    ];
    checks.push(Check::from_test(
        "sigma on ker(eta) ^ ker(beta)",
        &kernel_test(sys, &payload, &beta)?,
    ));
    Ok(HorizontalDensity {
        density: Density {
            payload: Payload::Form(payload),
            degree: degree_over(-2, sys.n()),
            gauge: eta.clone(),
        },
        checks,
    })
}

/// Evaluates `σ(v, w)` for random `v, w` projected onto `ker η ∩ ker β`.
fn kernel_test(sys: &ContactSystem, sigma: &KForm, beta: &KForm) -> Result<ZeroTest> {
    let chart = sys.chart();
    let mut rng = ChaCha8Rng::seed_from_u64(chart.seed() ^ 0x6b65726e);
    let eta_c = sys.eta().components();
    let beta_c = beta.components();
    let tol = chart.sampling().tol;
    let mut residual = 0.0f64;
    for x in chart.sample_points(chart.sampling().samples) {
        let (Ok(a), Ok(b)) = (eval_all(&eta_c, &x), eval_all(&beta_c, &x)) else {
            continue;
        };
        let basis = orthonormal(&[a, b]);
        let mut draw = || project_out(&basis, (0..x.len()).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let (v, w) = (draw(), draw());
        let Ok(value) = sigma.eval_at(&x, &[v, w]) else {
            continue;
        };
        let scale = sigma
            .all_coeffs()
            .iter()
            .filter_map(|c| c.eval(&x).ok())
            .fold(1.0f64, |m, c| m.max(c.abs()));
        if value.abs() > tol * scale {
            return Ok(ZeroTest::NonZero { witness: x, value });
        }
        residual = residual.max(value.abs());
    }
    Ok(ZeroTest::Zero { residual })
}

fn eval_all(es: &[Expr], x: &[f64]) -> Result<Vec<f64>> {
    Ok(es.iter().map(|e| e.eval(x)).collect::<Result<_, _>>()?)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram–Schmidt; near-dependent vectors are dropped.
fn orthonormal(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let u = project_out(&out, v.clone());
        let norm = dot(&u, &u).sqrt();
        if norm > 1e-12 * (1.0 + dot(v, v).sqrt()) {
            out.push(u.iter().map(|c| c / norm).collect());
        }
    }
    out
}

fn project_out(basis: &[Vec<f64>], mut v: Vec<f64>) -> Vec<f64> {
    for b in basis {
        let c = dot(&v, b);
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi -= c * bi;
        }
    }
    v
}

/// Re-expresses `d` against `η′ = g η`: payload `f ↦ f g^{−(n+1)λ}`.
pub fn density_regauge(sys: &ContactSystem, d: &Density, g: &Expr) -> Result<Density> {
    let chart = sys.chart();
    chart.require_nonvanishing("gauge factor", g)?;
    let k = -d.gauge_power(sys.n());
    let exponent = *k.numer() as f64 / *k.denom() as f64;
    if !k.is_integer() {
        if let Some(x) = chart.sample_points(chart.sampling().samples).into_iter().find(|x| g.eval(x).is_ok_and(|v| v < 0.0)) {
            return Err(Error::Inadmissible {
                what: "gauge factor".into(),
                reason: format!("is negative while the exponent {k} is fractional"),
                witness: x,
            });
        }
    }
    let factor = Expr::pow(g.simplify(), Expr::constant(exponent));
    Ok(Density {
        payload: d.payload.scale(&factor),
        degree: d.degree,
        gauge: d.gauge.scale(g),
    })
}

/// Compares the payload of `d` regauged by `g` with a density computed
/// directly in the rescaled system, by evaluating both on random vectors at
/// the sample points.
pub fn density_gauge_check(
    sys: &ContactSystem,
    d: &Density,
    g: &Expr,
    direct: &Density,
) -> Result<Check> {
    let chart = sys.chart();
    let moved = density_regauge(sys, d, g)?;
    if moved.degree != direct.degree {
        return Err(Error::Precondition(format!(
            "densities of degree {} and {} cannot be compared",
            moved.degree, direct.degree
        )));
    }
    let test = match (&moved.payload, &direct.payload) {
        (Payload::Scalar(a), Payload::Scalar(b)) => chart.is_zero(&(a - b))?,
        (Payload::Form(a), Payload::Form(b)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(chart.seed() ^ 0x67617567);
            let tol = chart.sampling().tol;
            let mut result = ZeroTest::Zero { residual: 0.0 };
            for x in chart.sample_points(chart.sampling().samples) {
                let vs: Vec<Vec<f64>> = (0..a.degree())
                    .map(|_| (0..x.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
                    .collect();
                let (Ok(va), Ok(vb)) = (a.eval_at(&x, &vs), b.eval_at(&x, &vs)) else {
                    continue;
                };
                let diff = va - vb;
                if diff.abs() > tol * (1.0 + va.abs().max(vb.abs())) {
                    result = ZeroTest::NonZero { witness: x, value: diff };
                    break;
                }
                result = result.merge(ZeroTest::Zero { residual: diff.abs() });
            }
            result
        }
        _ => {
            return Err(Error::Precondition(
                "cannot compare a scalar density with a form-valued one".into(),
            ))
        }
    };
    Ok(Check::from_test("regauged - direct", &test))
}
