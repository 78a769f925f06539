//! Dissipated quantities (`{f, H} = 0`), conserved ratios and the constants
//! of motion produced by similarities and scaling symmetries.
//!
//! A dissipated `f` obeys `X_H(f) = −f R(H)` along the flow, so
//! `f(t) = f(0) exp(−∫ R(H) dt)`. For a scaling symmetry with
//! `[Y, X_H] = λ X_H`, `Φ = −φ_Y / H` satisfies `X_H(Φ) = λ`.

use std::fmt;

use crate::contact::ContactSystem;
use crate::error::{Error, Result};
use crate::expr::{Check, Expr};
use crate::forms::VectorField;
use crate::symmetry::{detect_similarity, is_scaling, SymmetryReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Dissipated,
    Conserved,
    ConservedRatio,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Dissipated => "dissipated",
            Kind::Conserved => "conserved",
            Kind::ConservedRatio => "conserved-ratio",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Quantity {
    pub expression: Expr,
    pub kind: Kind,
    /// Every check passed.
    pub holds: bool,
    pub checks: Vec<Check>,
    /// Reported, not asserted.
    pub diagnostics: Vec<Check>,
    /// The constant attached to the quantity (`λ`, `κ`), when there is one.
    pub value: Option<Expr>,
    pub provenance: &'static str,
}

impl Quantity {
    fn new(expression: Expr, kind: Kind, checks: Vec<Check>, provenance: &'static str) -> Quantity {
        Quantity {
            expression,
            kind,
            holds: checks.iter().all(|c| c.passed),
            checks,
            diagnostics: Vec::new(),
            value: None,
            provenance,
        }
    }

    /// The residual of the worst check.
    pub fn residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

fn refuse(what: &str, reason: impl Into<String>, check: &Check) -> Error {
    Error::Inadmissible {
        what: what.into(),
        reason: reason.into(),
        witness: check.witness.clone().unwrap_or_default(),
    }
}

/// `{f, H} = 0`; when it holds, also `X_H(f) + f R(H) = 0`.
pub fn is_dissipated(sys: &ContactSystem, f: &Expr) -> Result<Quantity> {
    let chart = sys.chart();
    let h = sys.hamiltonian();
    let bracket = chart.check("{f, H}", &sys.jacobi_bracket(f, h)?)?;
    let mut checks = vec![bracket];
    if checks[0].passed {
        let flow = sys.hamiltonian_vector_field()?.apply(f) + f * sys.reeb_derivative(h)?;
        checks.push(chart.check("X_H(f) + f R(H)", &flow)?);
    }
    Ok(Quantity::new(f.simplify(), Kind::Dissipated, checks, "involution with H"))
}

fn require_dissipated(sys: &ContactSystem, f: &Expr, what: &str) -> Result<()> {
    let q = is_dissipated(sys, f)?;
    match q.checks.iter().find(|c| !c.passed) {
        Some(bad) => Err(refuse(what, format!("{f} is not dissipated"), bad)),
        None => Ok(()),
    }
}

/// `κ = f/g` for dissipated `f`, `g` with `g` nonvanishing; `X_H(κ) = 0`.
pub fn conserved_ratio(sys: &ContactSystem, f: &Expr, g: &Expr) -> Result<Quantity> {
    require_dissipated(sys, f, "numerator")?;
    require_dissipated(sys, g, "denominator")?;
    sys.chart().require_nonvanishing("denominator", g)?;
    let kappa = (f / g).simplify();
    let drift = sys.hamiltonian_vector_field()?.apply(&kappa);
    let checks = vec![sys.chart().check("X_H(f/g)", &drift)?];
    Ok(Quantity::new(kappa, Kind::ConservedRatio, checks, "ratio of dissipated quantities"))
}

fn require_scaling(sys: &ContactSystem, y: &VectorField) -> Result<SymmetryReport> {
    let r = is_scaling(sys, y)?;
    if r.scaling_symmetry != Some(true) || !r.consistent() {
        let bad = r.checks().find(|c| !c.passed).cloned();
        let witness = bad.as_ref().and_then(|c| c.witness.clone()).unwrap_or_default();
        let reason = match bad {
            Some(c) => format!("Y is not a scaling symmetry ({} fails)", c.name),
            None => "Y is not a scaling symmetry (lambda not recovered)".into(),
        };
        return Err(Error::Inadmissible {
            what: "symmetry".into(),
            reason,
            witness,
        });
    }
    Ok(r)
}

/// `Φ = −φ_Y / H` with `X_H(Φ) = λ` constant. `Φ·H = −φ_Y` is reported as
/// a diagnostic: `{−φ_Y, H} = −λH`, so it is dissipated only when `λ = 0`.
pub fn scaling_constant(sys: &ContactSystem, y: &VectorField) -> Result<Quantity> {
    let report = require_scaling(sys, y)?;
    let chart = sys.chart();
    let h = sys.hamiltonian();
    chart.require_nonvanishing("Hamiltonian", h)?;
    let phi = report.phi.clone().expect("scaling report carries phi");
    let lambda = report.lambda.clone().expect("scaling report carries lambda");
    let big_phi = (phi.clone().negate() / h).simplify();
    let rate = sys.hamiltonian_vector_field()?.apply(&big_phi);
    let checks = vec![
        Check::from_test("d(X_H(Phi))", &chart.is_constant(&rate)?),
        chart.check("X_H(Phi) - lambda", &(&rate - &lambda))?,
    ];
    let mut q = Quantity::new(big_phi, Kind::Conserved, checks, "scaling symmetry");
    q.value = Some(lambda);
    let product = is_dissipated(sys, &phi.negate())?;
    q.diagnostics
        .extend(product.checks.into_iter().map(|c| Check { name: format!("Phi H: {}", c.name), ..c }));
    Ok(q)
}

/// For a Reeb system (`H = −1`), `κ = R(φ_Y)` is constant and equals `λ`;
/// `−κ` is dissipated.
pub fn reeb_scaling_rate(sys: &ContactSystem, y: &VectorField) -> Result<Quantity> {
    let chart = sys.chart();
    let reeb = chart.check("H + 1", &(sys.hamiltonian() + 1.0))?;
    if !reeb.passed {
        return Err(refuse("system", "not a Reeb system (H != -1); straighten it first", &reeb));
    }
    let report = require_scaling(sys, y)?;
    let phi = report.phi.clone().expect("scaling report carries phi");
    let lambda = report.lambda.clone().expect("scaling report carries lambda");
    let kappa = sys.reeb_derivative(&phi)?.simplify();
    let dissipated = is_dissipated(sys, &kappa.clone().negate())?;
    let mut checks = vec![
        Check::from_test("d(kappa)", &chart.is_constant(&kappa)?),
        chart.check("kappa - lambda", &(&kappa - &lambda))?,
    ];
    checks.extend(dissipated.checks.into_iter().map(|c| Check { name: format!("-kappa: {}", c.name), ..c }));
    let mut q = Quantity::new(kappa, Kind::Conserved, checks, "scaling symmetry of a Reeb system");
    q.value = Some(lambda);
    Ok(q)
}

/// `ψ = Y(f)` for a similarity `Y` and a constant of motion `f`.
pub fn similarity_constant(sys: &ContactSystem, y: &VectorField, f: &Expr) -> Result<Quantity> {
    let chart = sys.chart();
    let report = detect_similarity(sys, y)?;
    if report.dynamical_similarity != Some(true) {
        return Err(refuse("symmetry", "Y is not a dynamical similarity", &report.conditions[0]));
    }
    let xh = sys.hamiltonian_vector_field()?;
    let motion = chart.check("X_H(f)", &xh.apply(f))?;
    if !motion.passed {
        return Err(refuse("function", format!("{f} is not a constant of motion"), &motion));
    }
    let psi = y.apply(f).simplify();
    let checks = vec![chart.check("X_H(Y(f))", &xh.apply(&psi))?];
    Ok(Quantity::new(psi, Kind::Conserved, checks, "dynamical similarity"))
}

/// `ψ = {φ_Y, f}` for a scaling symmetry `Y` and a dissipated `f`; asserts
/// `{ψ, H} = 0`. The independence of `X_H, X_f, X_{φ_Y}` is reported as a
/// diagnostic from the contraction of the volume form.
pub fn scaling_involution(sys: &ContactSystem, y: &VectorField, f: &Expr) -> Result<Quantity> {
    let report = require_scaling(sys, y)?;
    require_dissipated(sys, f, "function")?;
    let chart = sys.chart();
    let phi = report.phi.clone().expect("scaling report carries phi");
    let psi = sys.jacobi_bracket(&phi, f)?;
    let checks = vec![chart.check("{psi, H}", &sys.jacobi_bracket(&psi, sys.hamiltonian())?)?];
    let mut q = Quantity::new(psi, Kind::Dissipated, checks, "scaling symmetry in involution");
    let fields = [
        sys.hamiltonian_vector_field()?,
        sys.hamiltonian_field(f)?,
        sys.hamiltonian_field(&phi)?,
    ];
    let contracted = sys.volume().contract(&fields)?;
    q.diagnostics.push(Check::expect_nonzero(
        "i_(X_phi) i_(X_f) i_(X_H) vol != 0",
        &chart.all_zero(&contracted.all_coeffs())?,
    ));
    Ok(q)
}

#[cfg(test)]
mod tests;
