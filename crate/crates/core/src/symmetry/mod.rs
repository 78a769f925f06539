//! Classifiers for dynamical symmetries (`η([Y, X_H]) = 0`), dynamical
//! similarities (`[Y, X_H] = λ X_H`), scaling symmetries (constant `λ`) and
//! Cartan symmetries (`L_Y η = aη + dg`, `Y(H) = aH + g R(H)`).
//!
//! λ is reported for the orientation `[Y, X_H] = λ X_H` with
//! `[A, B]^i = A(B^i) − B(A^i)`. With `{f, g} = X_f(g) + g R(f)` this gives
//! `{H, φ_Y} = −λ H`, `Ỹ(H) = H(λ − R(φ_Y))` and, for Reeb systems,
//! `λ = R(φ_Y)`.
//!
//! Each report separates the conditions that decide a flag from the
//! implications asserted once the flag holds.

use crate::contact::ContactSystem;
use crate::decomp::ham_hor_decompose;
use crate::error::{Error, Result};
use crate::expr::{Check, Expr, ZeroTest};
use crate::forms::{KForm, VectorField};

#[derive(Clone, Debug, Default)]
pub struct SymmetryReport {
    /// `None` when the classifier did not run.
    pub dynamical_symmetry: Option<bool>,
    pub dynamical_similarity: Option<bool>,
    pub scaling_symmetry: Option<bool>,
    pub cartan_symmetry: Option<bool>,
    /// `φ_Y = −η(Y)`.
    pub phi: Option<Expr>,
    pub lambda: Option<Expr>,
    pub g: Option<Expr>,
    pub a: Option<Expr>,
    /// Coefficient of the invariant density: `−φ_Y` for dynamical
    /// symmetries, `φ_Y + g` for Cartan symmetries.
    pub density: Option<Expr>,
    /// Tests whose outcome sets the flags.
    pub conditions: Vec<Check>,
    /// Identities that must hold whenever their hypotheses' flags are true.
    pub assertions: Vec<Check>,
    pub notes: Vec<String>,
}

impl SymmetryReport {
    /// Every asserted identity holds.
    pub fn consistent(&self) -> bool {
        self.assertions.iter().all(|c| c.passed)
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.conditions.iter().chain(&self.assertions)
    }

    fn absorb(&mut self, other: SymmetryReport) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(dynamical_symmetry, dynamical_similarity, scaling_symmetry, cartan_symmetry, phi, lambda, g, a, density);
        for c in other.conditions {
            if !self.conditions.iter().any(|d| d.name == c.name) {
                self.conditions.push(c);
            }
        }
        for c in other.assertions {
            if !self.assertions.iter().any(|d| d.name == c.name) {
                self.assertions.push(c);
            }
        }
        self.notes.extend(other.notes);
    }
}

fn phi_of(sys: &ContactSystem, y: &VectorField) -> Result<Expr> {
    Ok(sys.eta().interior(y)?.as_scalar().negate().expand())
}

/// Tests `η([Y, X_H]) = 0` and `{φ_Y, H} = 0`; the two must agree.
pub fn is_dynamical_symmetry(sys: &ContactSystem, y: &VectorField) -> Result<SymmetryReport> {
    let chart = sys.chart();
    let xh = sys.hamiltonian_vector_field()?;
    let phi = phi_of(sys, y)?;
    let direct = chart.check("eta([Y, X_H])", &sys.eta().interior(&y.bracket(&xh)?)?.as_scalar())?;
    let bracket = chart.check("{phi_Y, H}", &sys.jacobi_bracket(&phi, sys.hamiltonian())?)?;
    if direct.passed != bracket.passed {
        let bad = if direct.passed { &bracket } else { &direct };
        return Err(Error::Inconsistent {
            what: "dynamical symmetry: eta([Y, X_H]) and {phi_Y, H} disagree".into(),
            residual: bad.residual,
            witness: bad.witness.clone().unwrap_or_default(),
        });
    }
    Ok(SymmetryReport {
        dynamical_symmetry: Some(direct.passed),
        density: Some(phi.clone().negate()),
        phi: Some(phi),
        conditions: vec![direct, bracket],
        ..SymmetryReport::default()
    })
}

/// Tests `[Y, X_H] ∥ X_H` through all 2×2 minors and recovers λ from the
/// first component of `X_H` that is nonvanishing on the domain.
pub fn detect_similarity(sys: &ContactSystem, y: &VectorField) -> Result<SymmetryReport> {
    let chart = sys.chart();
    let xh = sys.hamiltonian_vector_field()?;
    if chart.all_zero(xh.components())?.is_zero() {
        return Err(Error::Precondition("X_H vanishes identically".into()));
    }
    let c = y.bracket(&xh)?;
    let (cc, xc) = (c.components(), xh.components());
    let mut minors = ZeroTest::Zero { residual: 0.0 };
    'outer: for i in 0..sys.dim() {
        for j in i + 1..sys.dim() {
            let m = &cc[i] * &xc[j] - &cc[j] * &xc[i];
            minors = minors.merge(chart.is_zero(&m.expand())?);
            if !minors.is_zero() {
                break 'outer;
            }
        }
    }
    let proportional = Check::from_test("[Y, X_H] ^ X_H (2x2 minors)", &minors);
    let flag = proportional.passed;
    let phi = phi_of(sys, y)?;
    let mut report = SymmetryReport {
        dynamical_similarity: Some(flag),
        phi: Some(phi.clone()),
        conditions: vec![proportional],
        ..SymmetryReport::default()
    };
    if !flag {
        return Ok(report);
    }
    let lambda = if chart.all_zero(cc)?.is_zero() {
        Expr::ZERO
    } else if let Some(i) = (0..sys.dim()).find(|&i| chart.is_nonvanishing(&xc[i])) {
        (&cc[i] / &xc[i]).simplify()
    } else {
        report
            .notes
            .push("lambda not recovered: no component of X_H is nonvanishing on the domain".into());
        return Ok(report);
    };
    let residual = c.sub(&xh.scale(&lambda))?;
    report
        .assertions
        .push(chart.check_all("[Y, X_H] - lambda X_H", residual.components())?);
    let hb = sys.jacobi_bracket(sys.hamiltonian(), &phi)? + &lambda * sys.hamiltonian();
    report.assertions.push(chart.check("{H, phi_Y} + lambda H", &hb)?);
    let delta = ham_hor_decompose(sys, y)?.horizontal_part;
    let dl = KForm::scalar(chart, lambda.clone()).d();
    let lam = sys.lambda_sharp(&dl)?.scale(sys.hamiltonian());
    let structure = delta.bracket(&xh)?.add(&lam)?;
    report.assertions.push(chart.check_all(
        "[delta_Y, X_H] + H Lambda(d lambda)",
        structure.components(),
    )?);
    report.lambda = Some(lambda);
    Ok(report)
}

/// A similarity with constant λ, plus the structure of its decomposition and
/// of the purely Hamiltonian representative `Ỹ = X_{φ_Y}`.
pub fn is_scaling(sys: &ContactSystem, y: &VectorField) -> Result<SymmetryReport> {
    let mut report = detect_similarity(sys, y)?;
    let Some(lambda) = report.lambda.clone() else {
        report.scaling_symmetry = Some(false);
        return Ok(report);
    };
    let chart = sys.chart();
    let constant = Check::from_test("d(lambda)", &chart.is_constant(&lambda)?);
    let flag = constant.passed;
    report.conditions.push(constant);
    report.scaling_symmetry = Some(flag);
    if !flag {
        return Ok(report);
    }
    let phi = report.phi.clone().expect("set by detect_similarity");
    let h = sys.hamiltonian();
    let xh = sys.hamiltonian_vector_field()?;
    let delta = ham_hor_decompose(sys, y)?.horizontal_part;
    report
        .assertions
        .push(chart.check_all("[delta_Y, X_H]", delta.bracket(&xh)?.components())?);
    let ytilde = sys.hamiltonian_field(&phi)?;
    let rphi = sys.reeb_derivative(&phi)?;
    let ev = ytilde.apply(h) - h * (&lambda - &rphi);
    report.assertions.push(chart.check("Y~(H) - H(lambda - R(phi_Y))", &ev)?);
    let lie = sys.eta().lie(&ytilde)?.add(&sys.eta().scale(&rphi))?;
    report
        .assertions
        .push(chart.check_all("L_(Y~) eta + R(phi_Y) eta", &lie.all_coeffs())?);
    Ok(report)
}

/// Verifies `L_Y η = aη + dg` and `Y(H) = aH + g R(H)` for the supplied `g`;
/// `a` defaults to `−R(φ_Y + g)`. When both hold, asserts
/// `Y = X_{φ_Y} + Λ(dg, ·)` and `{φ_Y + g, H} = 0`.
pub fn check_cartan(sys: &ContactSystem, y: &VectorField, g: &Expr, a: Option<&Expr>) -> Result<SymmetryReport> {
    let chart = sys.chart();
    let h = sys.hamiltonian();
    let phi = phi_of(sys, y)?;
    let total = (&phi + g).expand();
    let a = match a {
        Some(a) => a.simplify(),
        None => sys.reeb_derivative(&total)?.negate().expand(),
    };
    let eta = sys.eta();
    let dg = KForm::scalar(chart, g.clone()).d();
    let lie = eta.lie(y)?.sub(&eta.scale(&a))?.sub(&dg)?;
    let evolution = y.apply(h) - &a * h - g * sys.reeb_derivative(h)?;
    let conditions = vec![
        chart.check_all("L_Y eta - a eta - dg", &lie.all_coeffs())?,
        chart.check("Y(H) - a H - g R(H)", &evolution)?,
    ];
    let flag = conditions.iter().all(|c| c.passed);
    let mut assertions = Vec::new();
    if flag {
        let structure = y.sub(&sys.hamiltonian_field(&phi)?.add(&sys.lambda_sharp(&dg)?)?)?;
        assertions.push(chart.check_all("Y - X_phi - Lambda(dg)", structure.components())?);
        assertions.push(chart.check("{phi_Y + g, H}", &sys.jacobi_bracket(&total, h)?)?);
    }
    Ok(SymmetryReport {
        cartan_symmetry: Some(flag),
        phi: Some(phi),
        g: Some(g.simplify()),
        a: Some(a),
        density: Some(total),
        conditions,
        assertions,
        ..SymmetryReport::default()
    })
}

/// Runs every applicable classifier. `g` defaults to `0`. When `Y` is both a
/// dynamical and a Cartan symmetry, asserts `dg = 0` and `δ_Y = 0` as one
/// check named `theorem_final_clause`.
pub fn classify(sys: &ContactSystem, y: &VectorField, g: Option<&Expr>, a: Option<&Expr>) -> Result<SymmetryReport> {
    let chart = sys.chart();
    let mut report = is_dynamical_symmetry(sys, y)?;
    let xh = sys.hamiltonian_vector_field()?;
    if chart.all_zero(xh.components())?.is_zero() {
        report
            .notes
            .push("X_H vanishes identically: similarity classifiers skipped".into());
    } else {
        report.absorb(is_scaling(sys, y)?);
    }
    let dynamical_density = report.density.clone();
    let g = g.cloned().unwrap_or(Expr::ZERO);
    report.absorb(check_cartan(sys, y, &g, a)?);
    if report.cartan_symmetry != Some(true) {
        report.density = dynamical_density;
    }
    if report.dynamical_symmetry == Some(true) && report.cartan_symmetry == Some(true) {
        let dg = KForm::scalar(chart, g.clone()).d();
        let delta = ham_hor_decompose(sys, y)?.horizontal_part;
        let exprs: Vec<Expr> = dg.all_coeffs().into_iter().chain(delta.components().iter().cloned()).collect();
        report
            .assertions
            .push(chart.check_all("theorem_final_clause", &exprs)?);
    }
    Ok(report)
}
