//! Complete contact integrability of `f_0, …, f_n`: pairwise involution,
//! independence through `ι_{X_{f_0}, …, X_{f_m}}(η ∧ dη^n)` (fields applied
//! in order, `X_{f_0}` first), and the closed form of that contraction for
//! involutive families.
//!
//! The closed form is evaluated exactly as printed:
//!
//! ```text
//! n!/(n−m)! (−1)^{(m+1)(m+2)/2} [Σ_j (−1)^{jm} f_j ∧_{r=1..m} df_{(j+r) mod (m+1)}] ∧ dη^{n−m}
//!   + n!/(n−m−1)! (−1)^{m(m+1)/2} ∧_j df_j ∧ η ∧ dη^{n−m−1}
//! ```
//!
//! with the second term absent when `m = n`. Disagreement with the
//! brute-force contraction is reported as a coefficient table.

use crate::contact::linalg;
use crate::contact::ContactSystem;
use crate::error::{Error, Result};
use crate::expr::{Check, Expr};
use crate::forms::{combinations, KForm, VectorField};

/// Iterated contraction of `fields` into `η ∧ dη^n`, first field first.
pub fn contract_volume(sys: &ContactSystem, fields: &[VectorField]) -> Result<KForm> {
    if fields.len() > sys.n() + 1 {
        return Err(Error::Precondition(format!(
            "at most n + 1 = {} fields can be contracted, got {}",
            sys.n() + 1,
            fields.len()
        )));
    }
    sys.volume().contract(fields)
}

fn sign(odd: bool) -> f64 {
    if odd {
        -1.0
    } else {
        1.0
    }
}

fn falling(n: usize, k: usize) -> f64 {
    (n - k + 1..=n).map(|i| i as f64).product()
}

/// Residual matrix of `{f_i, f_j}` and the first failing pair.
fn involution(sys: &ContactSystem, fs: &[Expr]) -> Result<(Vec<Vec<f64>>, Vec<Check>)> {
    let chart = sys.chart();
    let k = fs.len();
    let mut matrix = vec![vec![0.0; k]; k];
    let mut checks = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let c = chart.check(format!("{{f_{i}, f_{j}}}"), &sys.jacobi_bracket(&fs[i], &fs[j])?)?;
            matrix[i][j] = c.residual;
            matrix[j][i] = c.residual;
            checks.push(c);
        }
    }
    Ok((matrix, checks))
}

fn require_involution(sys: &ContactSystem, fs: &[Expr]) -> Result<(Vec<Vec<f64>>, Vec<Check>)> {
    let (matrix, checks) = involution(sys, fs)?;
    if let Some(bad) = checks.iter().find(|c| !c.passed) {
        return Err(Error::Inadmissible {
            what: "functions".into(),
            reason: format!("not in involution: {} = {:e} at the witness", bad.name, bad.residual),
            witness: bad.witness.clone().unwrap_or_default(),
        });
    }
    Ok((matrix, checks))
}

/// The two terms of the closed form, the second `None` when `m = n`.
fn li_terms(sys: &ContactSystem, fs: &[Expr]) -> Result<(KForm, Option<KForm>)> {
    let chart = sys.chart();
    let n = sys.n();
    if fs.is_empty() || fs.len() > n + 1 {
        return Err(Error::Precondition(format!(
            "closed form needs 1 to n + 1 = {} functions, got {}",
            n + 1,
            fs.len()
        )));
    }
    let m = fs.len() - 1;
    let dfs: Vec<KForm> = fs.iter().map(|f| KForm::scalar(chart, f.clone()).d()).collect();
    let d_eta = sys.d_eta();
    let mut cyclic = KForm::zero(chart, m);
    for (j, f) in fs.iter().enumerate() {
        let mut w = KForm::scalar(chart, f.clone().scaled(sign(j * m % 2 == 1)));
        for r in 1..=m {
            w = w.wedge(&dfs[(j + r) % (m + 1)])?;
        }
        cyclic = cyclic.add(&w)?;
    }
    let c1 = falling(n, m) * sign((m + 1) * (m + 2) / 2 % 2 == 1);
    let first = cyclic.wedge(&d_eta.wedge_power(n - m))?.scale(&Expr::constant(c1));
    let second = if m < n {
        let mut w = dfs[0].clone();
        for df in &dfs[1..] {
            w = w.wedge(df)?;
        }
        let c2 = falling(n, m + 1) * sign(m * (m + 1) / 2 % 2 == 1);
        let w = w.wedge(sys.eta())?.wedge(&d_eta.wedge_power(n - m - 1))?;
        Some(w.scale(&Expr::constant(c2)))
    } else {
        None
    };
    Ok((first, second))
}

/// The closed form for an involutive family `f_0, …, f_m`, `m ≤ n`.
pub fn li_closed_form(sys: &ContactSystem, fs: &[Expr]) -> Result<KForm> {
    require_involution(sys, fs)?;
    let (first, second) = li_terms(sys, fs)?;
    match second {
        Some(s) => first.add(&s),
        None => Ok(first),
    }
}

/// One basis coefficient of both sides of the closed-form comparison.
#[derive(Clone, Debug)]
pub struct CoefficientRow {
    pub basis: Vec<usize>,
    pub closed_form: Expr,
    pub oracle: Expr,
}

#[derive(Clone, Debug)]
pub struct LiComparison {
    pub closed_form: KForm,
    pub oracle: KForm,
    pub check: Check,
    /// Rows whose difference is not identically zero; empty on agreement.
    pub table: Vec<CoefficientRow>,
}

/// Compares the closed form with the brute-force contraction.
pub fn compare_li(sys: &ContactSystem, fs: &[Expr]) -> Result<LiComparison> {
    let chart = sys.chart();
    let closed_form = li_closed_form(sys, fs)?;
    let fields = fs
        .iter()
        .map(|f| sys.hamiltonian_field(f))
        .collect::<Result<Vec<_>>>()?;
    let oracle = contract_volume(sys, &fields)?;
    let diff = closed_form.sub(&oracle)?;
    let check = chart.check_all("closed form - contraction", &diff.all_coeffs())?;
    let mut table = Vec::new();
    if !check.passed {
        for basis in combinations(sys.dim(), closed_form.degree()) {
            if !chart.is_zero(&diff.coeff(&basis))?.is_zero() {
                table.push(CoefficientRow {
                    closed_form: closed_form.coeff(&basis),
                    oracle: oracle.coeff(&basis),
                    basis,
                });
            }
        }
    }
    Ok(LiComparison {
        closed_form,
        oracle,
        check,
        table,
    })
}

#[derive(Clone, Debug)]
pub struct IntegrabilityReport {
    pub functions: Vec<Expr>,
    /// `|{f_i, f_j}|` residuals.
    pub brackets: Vec<Vec<f64>>,
    pub involution: Vec<Check>,
    pub contraction: KForm,
    pub comparison: LiComparison,
    /// The second closed-form term is absent and the cyclic term alone
    /// matches the contraction.
    pub full_contraction: Check,
    /// Nonzero contraction at every sample point.
    pub independent: bool,
    pub independence: Check,
    /// Sample points where the contraction vanishes.
    pub vanishing_samples: Vec<Vec<f64>>,
    /// Common zeros of all `f_j` found in the domain.
    pub zero_levelset: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl IntegrabilityReport {
    pub fn passed(&self) -> bool {
        self.involution.iter().all(|c| c.passed)
            && self.independent
            && self.comparison.check.passed
            && self.full_contraction.passed
    }

    pub fn checks(&self) -> Vec<&Check> {
        let mut v: Vec<&Check> = self.involution.iter().collect();
        v.push(&self.independence);
        v.push(&self.comparison.check);
        v.push(&self.full_contraction);
        v
    }
}

/// Checks that `f_0, …, f_n` form a complete contact integrable system.
/// Independence almost everywhere is tested as a nonzero contraction at
/// every seeded sample point; vanishing samples are listed.
pub fn check_complete_integrable(sys: &ContactSystem, fs: &[Expr]) -> Result<IntegrabilityReport> {
    let n = sys.n();
    if fs.len() != n + 1 {
        return Err(Error::Precondition(format!(
            "complete integrability needs n + 1 = {} functions, got {}",
            n + 1,
            fs.len()
        )));
    }
    let chart = sys.chart();
    let (brackets, involution) = require_involution(sys, fs)?;
    let comparison = compare_li(sys, fs)?;
    let contraction = comparison.oracle.clone();
    // m = n, so the second term is absent
    let (cyclic, _) = li_terms(sys, fs)?;
    let full = cyclic.sub(&contraction)?;
    let full_contraction = chart.check_all("contraction - cyclic term (m = n)", &full.all_coeffs())?;

    let tol = chart.sampling().tol;
    let coeffs = contraction.all_coeffs();
    let mut vanishing_samples = Vec::new();
    let mut largest = 0.0f64;
    let mut witness = None;
    for x in chart.sample_points(chart.sampling().samples) {
        let Ok(values) = coeffs.iter().map(|c| c.eval(&x)).collect::<Result<Vec<f64>, _>>() else {
            continue;
        };
        let size = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if size <= tol {
            vanishing_samples.push(x);
        } else if size > largest {
            largest = size;
            witness = Some(x);
        }
    }
    let independent = vanishing_samples.is_empty() && witness.is_some();
    let independence = Check {
        name: "contraction nonzero at every sample".into(),
        passed: independent,
        residual: largest,
        witness: vanishing_samples.first().cloned().or(witness),
    };

    let zero_levelset = common_zeros(sys, fs);
    let mut warnings = Vec::new();
    if !zero_levelset.is_empty() {
        warnings.push(format!(
            "the functions vanish together at {} point(s) in the domain, e.g. {:?}; the fields are dependent there, so integrability holds only away from this 0-levelset",
            zero_levelset.len(),
            zero_levelset[0]
        ));
    }
    if independent {
        warnings.push("independence is established at the sampled points only".into());
    }
    Ok(IntegrabilityReport {
        functions: fs.to_vec(),
        brackets,
        involution,
        contraction,
        comparison,
        full_contraction,
        independent,
        independence,
        vanishing_samples,
        zero_levelset,
        warnings,
    })
}

/// Minimum-norm Gauss–Newton from each sample point toward `f = 0`;
/// returns converged points inside the domain (deduplicated).
fn common_zeros(sys: &ContactSystem, fs: &[Expr]) -> Vec<Vec<f64>> {
    let chart = sys.chart();
    if fs.iter().any(|f| f.as_const().is_some_and(|c| c != 0.0)) {
        return Vec::new();
    }
    let grads: Vec<Vec<Expr>> = fs
        .iter()
        .map(|f| (0..sys.dim()).map(|i| f.diff(i)).collect())
        .collect();
    let inside = |x: &[f64]| {
        x.iter()
            .zip(chart.domain())
            .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    };
    let mut found: Vec<Vec<f64>> = Vec::new();
    for mut x in chart.sample_points(chart.sampling().samples) {
        for _ in 0..30 {
            let Ok(f) = fs.iter().map(|e| e.eval(&x)).collect::<Result<Vec<f64>, _>>() else {
                break;
            };
            if f.iter().all(|v| v.abs() < 1e-12) {
                if inside(&x) && !found.iter().any(|y| dist(y, &x) < 1e-6) {
                    found.push(x.clone());
                }
                break;
            }
            let Ok(j) = grads
                .iter()
                .map(|row| row.iter().map(|e| e.eval(&x)).collect::<Result<Vec<f64>, _>>())
                .collect::<Result<Vec<_>, _>>()
            else {
                break;
            };
            // step = Jᵀ (J Jᵀ)⁻¹ f
            let jjt: Vec<Vec<f64>> = j
                .iter()
                .map(|a| j.iter().map(|b| a.iter().zip(b).map(|(u, v)| u * v).sum()).collect())
                .collect();
            let Some(y) = linalg::solve(jjt, f) else {
                break;
            };
            for (k, xk) in x.iter_mut().enumerate() {
                *xk -= j.iter().zip(&y).map(|(row, yi)| row[k] * yi).sum::<f64>();
            }
        }
    }
    found
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// The three-dimensional invariant of an involutive pair.
#[derive(Clone, Debug)]
pub struct ThreeDimInvariant {
    /// `ι_{X_{f_0}, X_{f_1}}(η ∧ dη)`.
    pub form: KForm,
    /// `f_0 / f_1` when `f_1` is nonvanishing on the domain.
    pub kappa: Option<Expr>,
    pub checks: Vec<Check>,
    /// Reported, not asserted.
    pub diagnostics: Vec<Check>,
    pub notes: Vec<String>,
}

/// For `n = 1`: the contraction equals `−f_0 df_1 + f_1 df_0`, and
/// `κ = f_0/f_1` is conserved by both flows. The rewriting of the form as a
/// multiple of `dκ` is reported for `f_1² dκ` and `−dκ/f_0²`.
pub fn three_dim_invariant(sys: &ContactSystem, f0: &Expr, f1: &Expr) -> Result<ThreeDimInvariant> {
    if sys.dim() != 3 {
        return Err(Error::Precondition(format!(
            "the three-dimensional invariant needs dim 3, got {}",
            sys.dim()
        )));
    }
    require_involution(sys, &[f0.clone(), f1.clone()])?;
    let chart = sys.chart();
    let x0 = sys.hamiltonian_field(f0)?;
    let x1 = sys.hamiltonian_field(f1)?;
    let form = contract_volume(sys, &[x0.clone(), x1.clone()])?;
    let d0 = KForm::scalar(chart, f0.clone()).d();
    let d1 = KForm::scalar(chart, f1.clone()).d();
    let expected = d1.scale(&f0.clone().negate()).add(&d0.scale(f1))?;
    let mut checks = vec![chart.check_all(
        "contraction + f0 df1 - f1 df0",
        &form.sub(&expected)?.all_coeffs(),
    )?];
    let mut diagnostics = Vec::new();
    let mut notes = Vec::new();
    let kappa = if chart.is_nonvanishing(f1) {
        let kappa = (f0 / f1).simplify();
        checks.push(chart.check("X_f0(kappa)", &x0.apply(&kappa))?);
        checks.push(chart.check("X_f1(kappa)", &x1.apply(&kappa))?);
        let dk = KForm::scalar(chart, kappa.clone()).d();
        let direct = form.sub(&dk.scale(&(f1 * f1)))?;
        diagnostics.push(chart.check_all("contraction - f1^2 d(kappa)", &direct.all_coeffs())?);
        if chart.is_nonvanishing(f0) {
            let printed = form.add(&dk.scale(&(f0 * f0).recip()))?;
            diagnostics.push(chart.check_all("contraction + d(kappa)/f0^2", &printed.all_coeffs())?);
        }
        Some(kappa)
    } else {
        notes.push(format!("kappa omitted: {f1} is not nonvanishing on the domain"));
        None
    };
    Ok(ThreeDimInvariant {
        form,
        kappa,
        checks,
        diagnostics,
        notes,
    })
}

/// `ι_{X_{f_0}, X_{f_1}}(η ∧ dη) = −f_0 df_1 + f_1 df_0 + s {f_0, f_1} η`
/// for an arbitrary pair, with `s = −1` under the bracket convention
/// `{f, g} = X_f(g) + g R(f)` (anchored by the contraction).
pub fn pair_contraction_identity(sys: &ContactSystem, f0: &Expr, f1: &Expr) -> Result<Check> {
    if sys.dim() != 3 {
        return Err(Error::Precondition(format!("the pair identity needs dim 3, got {}", sys.dim())));
    }
    let chart = sys.chart();
    let fields = [sys.hamiltonian_field(f0)?, sys.hamiltonian_field(f1)?];
    let form = contract_volume(sys, &fields)?;
    let d0 = KForm::scalar(chart, f0.clone()).d();
    let d1 = KForm::scalar(chart, f1.clone()).d();
    let bracket = sys.jacobi_bracket(f0, f1)?;
    let expected = d1
        .scale(&f0.clone().negate())
        .add(&d0.scale(f1))?
        .sub(&sys.eta().scale(&bracket))?;
    chart.check_all("pair contraction identity", &form.sub(&expected)?.all_coeffs())
}
