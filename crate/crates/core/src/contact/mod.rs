//! Contact structure of a one-form on a chart.
//!
//! The flat map `♭(X) = ι_X dη + η(X) η` has matrix `M = Ωᵀ + η ηᵀ` with
//! `Ω_ij = dη(∂_i, ∂_j)`, acting on component columns. With `B = M⁻¹` the
//! Reeb field is `R = B η`, the Jacobi bivector is `P = Bᵀ Ω B` so that
//! `Λ(σ, ·) = P σ`, and Hamiltonian fields are `X_f = P df − f R`. All of
//! `B`, `P` and `R` are symbolic up to dimension 7 and computed per point
//! beyond.

pub(crate) mod linalg;

use crate::error::{Error, Result};
use crate::expr::{Chart, Check, Expr, ZeroTest};
use crate::forms::{same_chart, KForm, VectorField};

use linalg::Matrix;
use std::sync::OnceLock;

/// Largest dimension with symbolic flat inverse.
pub const SYMBOLIC_DIM_LIMIT: usize = 7;

/// Outcome of the contact-condition check.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactReport {
    /// `η ∧ (dη)^n`.
    pub volume: KForm,
    /// Its single coefficient on `dx_0∧…∧dx_{2n}`.
    pub top: Expr,
    /// Nonzero at every sample with constant sign.
    pub nonvanishing: bool,
    /// Where the top coefficient vanishes, changes sign or is singular.
    pub witness: Option<Vec<f64>>,
}

/// Computes `η ∧ (dη)^n` and decides whether it is a volume form on the
/// sampling domain.
pub fn check_contact(chart: &Chart, eta: &KForm) -> Result<ContactReport> {
    if eta.degree() != 1 {
        return Err(Error::Precondition(format!(
            "contact form must have degree 1, got {}",
            eta.degree()
        )));
    }
    if eta.dim() != chart.dim() {
        return Err(Error::ChartMismatch {
            expected: chart.names().join(", "),
            found: format!("{} coordinates", eta.dim()),
        });
    }
    let n = chart.half_dim();
    let volume = eta.wedge(&eta.d().wedge_power(n))?;
    let top = volume.top_coefficient();
    let (nonvanishing, witness) = match chart.require_nonvanishing("contact volume", &top) {
        Ok(()) => (true, None),
        Err(Error::Inadmissible { witness, .. }) => (false, Some(witness)),
        Err(e) => return Err(e),
    };
    Ok(ContactReport {
        volume,
        top,
        nonvanishing,
        witness,
    })
}

/// `ds − Σ p_i dq_i` on the Darboux chart of dimension `2n + 1`.
pub fn standard_form(chart: &Chart) -> KForm {
    let n = chart.half_dim();
    let mut coeffs = vec![Expr::ZERO; chart.dim()];
    for i in 0..n {
        coeffs[i] = -chart.coord(n + i);
    }
    coeffs[2 * n] = Expr::ONE;
    KForm::one_form(chart, coeffs).expect("dimension matches")
}

/// A contact form with a Hamiltonian and cached structure data.
#[derive(Clone, Debug)]
pub struct ContactSystem {
    chart: Chart,
    eta: KForm,
    hamiltonian: Expr,
    d_eta: KForm,
    volume: KForm,
    /// `η` components.
    eta_vec: Vec<Expr>,
    /// `Ω_ij = dη(∂_i, ∂_j)`.
    omega: Matrix,
    /// Matrix of `♭`.
    flat: Matrix,
    symbolic: Option<Symbolic>,
}

#[derive(Clone, Debug)]
struct Symbolic {
    /// Computed on first use; conformal rescalings never need it.
    flat_inv: OnceLock<Matrix>,
    bivector: Matrix,
    reeb: VectorField,
}

impl ContactSystem {
    /// Validates `η` and builds the caches. Refuses forms whose volume
    /// vanishes or changes sign at a sample, and reports a failed Reeb
    /// postcondition as an internal inconsistency.
    pub fn new(chart: &Chart, eta: KForm, hamiltonian: Expr) -> Result<ContactSystem> {
        let report = check_contact(chart, &eta)?;
        if !report.nonvanishing {
            let why = if report.top.is_zero_literal() {
                "η∧(dη)^n vanishes identically".to_string()
            } else {
                format!(
                    "η∧(dη)^n = {} vanishes or changes sign at {:?}",
                    report.top,
                    report.witness.unwrap_or_default()
                )
            };
            return Err(Error::Degenerate(why));
        }
        let mut sys = ContactSystem::bare(chart, eta, hamiltonian, report.volume);
        if chart.dim() <= SYMBOLIC_DIM_LIMIT {
            let flat_inv = linalg::invert(chart, &sys.flat, "flat map")?;
            let bivector = linalg::mat_mul(
                &linalg::mat_mul(&linalg::transpose(&flat_inv), &sys.omega),
                &flat_inv,
            );
            let reeb = VectorField::new(chart, linalg::mat_vec(&flat_inv, &sys.eta_vec))?;
            sys.symbolic = Some(Symbolic {
                flat_inv: OnceLock::from(flat_inv),
                bivector,
                reeb,
            });
        }
        sys.verify_reeb()?;
        Ok(sys)
    }

    fn bare(chart: &Chart, eta: KForm, hamiltonian: Expr, volume: KForm) -> ContactSystem {
        let dim = chart.dim();
        let d_eta = eta.d();
        let eta_vec = eta.components();
        let omega: Matrix = (0..dim)
            .map(|i| (0..dim).map(|j| d_eta.coeff(&[i, j])).collect())
            .collect();
        let flat: Matrix = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| (&omega[j][i] + &eta_vec[i] * &eta_vec[j]).expand())
                    .collect()
            })
            .collect();
        ContactSystem {
            chart: chart.clone(),
            eta,
            hamiltonian: hamiltonian.simplify(),
            d_eta,
            volume,
            eta_vec,
            omega,
            flat,
            symbolic: None,
        }
    }

    /// The system for `η′ = g η` built from the conformal-change formulas
    /// `Λ′ = Λ/g`, `R′ = R/g + Λ(dg, ·)/g²` instead of a fresh inversion.
    fn conformal(&self, g: &Expr, hamiltonian: Expr) -> Result<ContactSystem> {
        let eta = self.eta.scale(g);
        let Some(s) = &self.symbolic else {
            return ContactSystem::new(&self.chart, eta, hamiltonian);
        };
        let report = check_contact(&self.chart, &eta)?;
        if !report.nonvanishing {
            return Err(Error::Degenerate(format!("η∧(dη)^n = {} vanishes", report.top)));
        }
        let inv = g.clone().recip();
        let inv2 = g.clone().powi(-2);
        let bivector: Matrix = s
            .bivector
            .iter()
            .map(|row| row.iter().map(|e| (e * &inv).expand()).collect())
            .collect();
        let dg: Vec<Expr> = (0..self.dim()).map(|i| g.diff(i)).collect();
        let lam = linalg::mat_vec(&s.bivector, &dg);
        let reeb = VectorField::new(
            &self.chart,
            s.reeb
                .components()
                .iter()
                .zip(lam)
                .map(|(r, l)| r * &inv + l * &inv2)
                .collect(),
        )?;
        let mut sys = ContactSystem::bare(&self.chart, eta, hamiltonian, report.volume);
        sys.symbolic = Some(Symbolic {
            flat_inv: OnceLock::new(),
            bivector,
            reeb,
        });
        sys.verify_reeb()?;
        Ok(sys)
    }

    /// `(chart, ds − Σ p_i dq_i, H)` on the Darboux chart of dimension `2n+1`.
    pub fn standard(n: usize, hamiltonian: &str) -> Result<ContactSystem> {
        let chart = Chart::darboux(n)?;
        let h = chart.parse(hamiltonian)?;
        ContactSystem::new(&chart, standard_form(&chart), h)
    }

    /// The same contact structure with another Hamiltonian.
    pub fn with_hamiltonian(&self, hamiltonian: Expr) -> ContactSystem {
        ContactSystem {
            hamiltonian: hamiltonian.simplify(),
            ..self.clone()
        }
    }

    fn verify_reeb(&self) -> Result<()> {
        let tests = match &self.symbolic {
            Some(s) => {
                let r = &s.reeb;
                let normal = self.eta.interior(r)?.as_scalar() - 1.0;
                let mut t = self.chart.is_zero(&normal)?;
                for c in self.d_eta.interior(r)?.components() {
                    t = t.merge(self.chart.is_zero(&c)?);
                }
                t
            }
            None => self.verify_reeb_numeric()?,
        };
        if let ZeroTest::NonZero { witness, value } = tests {
            return Err(Error::Inconsistent {
                what: "Reeb field postconditions".into(),
                residual: value.abs(),
                witness,
            });
        }
        Ok(())
    }

    fn verify_reeb_numeric(&self) -> Result<ZeroTest> {
        let tol = self.chart.sampling().tol;
        let mut residual = 0.0f64;
        for x in self.chart.sample_points(self.chart.sampling().samples) {
            let r = self.reeb_at(&x)?;
            let eta: Vec<f64> = self.eta_vec.iter().map(|c| c.eval(&x)).collect::<Result<_, _>>()?;
            let mut worst = (eta.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() - 1.0).abs();
            for j in 0..self.chart.dim() {
                let v: f64 = (0..self.chart.dim())
                    .map(|i| Ok(r[i] * self.omega[i][j].eval(&x)?))
                    .sum::<Result<f64>>()?;
                worst = worst.max(v.abs());
            }
            let scale = 1.0
                + eta.iter().fold(0.0f64, |m, v| m.max(v.abs())) * r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if worst > tol * scale * self.chart.dim() as f64 {
                return Ok(ZeroTest::NonZero { witness: x, value: worst });
            }
            residual = residual.max(worst);
        }
        Ok(ZeroTest::Zero { residual })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// `n` in `dim = 2n + 1`.
    pub fn n(&self) -> usize {
        self.chart.half_dim()
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn eta(&self) -> &KForm {
        &self.eta
    }

    pub fn d_eta(&self) -> &KForm {
        &self.d_eta
    }

    /// `η ∧ (dη)^n`.
    pub fn volume(&self) -> &KForm {
        &self.volume
    }

    pub fn hamiltonian(&self) -> &Expr {
        &self.hamiltonian
    }

    /// Matrix of `♭` acting on component columns.
    pub fn flat_matrix(&self) -> &[Vec<Expr>] {
        &self.flat
    }

    pub fn is_symbolic(&self) -> bool {
        self.symbolic.is_some()
    }

    fn sym(&self) -> Result<&Symbolic> {
        self.symbolic
            .as_ref()
            .ok_or(Error::SymbolicUnavailable(self.chart.dim()))
    }

    fn same_field(&self, x: &VectorField) -> Result<()> {
        same_chart(&self.chart.shared_names(), x.names())
    }

    fn same_form(&self, a: &KForm) -> Result<()> {
        same_chart(&self.chart.shared_names(), a.names())?;
        if a.degree() != 1 {
            return Err(Error::Precondition(format!("expected a one-form, got degree {}", a.degree())));
        }
        Ok(())
    }

    /// The Reeb field `R = ♭⁻¹ η`.
    pub fn reeb(&self) -> Result<&VectorField> {
        Ok(&self.sym()?.reeb)
    }

    /// `R` evaluated at a point; available in every dimension.
    pub fn reeb_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.symbolic {
            Some(s) => Ok(s.reeb.eval_at(x)?),
            None => self.solve_flat_at(x, &self.eta_vec),
        }
    }

    /// `R(f)`.
    pub fn reeb_derivative(&self, f: &Expr) -> Result<Expr> {
        Ok(self.reeb()?.apply(f))
    }

    /// `♭(X) = ι_X dη + η(X) η`.
    pub fn flat(&self, x: &VectorField) -> Result<KForm> {
        self.same_field(x)?;
        let eta_x = self.eta.interior(x)?.as_scalar();
        self.d_eta.interior(x)?.add(&self.eta.scale(&eta_x))
    }

    /// `♭⁻¹(α)`.
    pub fn flat_inv(&self, alpha: &KForm) -> Result<VectorField> {
        self.same_form(alpha)?;
        let s = self.sym()?;
        let b = match s.flat_inv.get() {
            Some(b) => b,
            None => {
                let b = linalg::invert(&self.chart, &self.flat, "flat map")?;
                s.flat_inv.get_or_init(|| b)
            }
        };
        VectorField::new(&self.chart, linalg::mat_vec(b, &alpha.components()))
    }

    /// `♭⁻¹(α)` at a point by a numeric solve; available in every dimension.
    pub fn flat_inv_at(&self, x: &[f64], alpha: &KForm) -> Result<Vec<f64>> {
        self.same_form(alpha)?;
        self.solve_flat_at(x, &alpha.components())
    }

    fn solve_flat_at(&self, x: &[f64], alpha: &[Expr]) -> Result<Vec<f64>> {
        let m: Vec<Vec<f64>> = self
            .flat
            .iter()
            .map(|row| row.iter().map(|e| e.eval(x)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        let b: Vec<f64> = alpha.iter().map(|e| e.eval(x)).collect::<Result<_, _>>()?;
        linalg::solve(m, b).ok_or_else(|| Error::Inconsistent {
            what: "flat map is singular".into(),
            residual: 0.0,
            witness: x.to_vec(),
        })
    }

    /// `Λ(α, ·)` as a vector field.
    pub fn lambda_sharp(&self, alpha: &KForm) -> Result<VectorField> {
        self.same_form(alpha)?;
        let p = &self.sym()?.bivector;
        VectorField::new(&self.chart, linalg::mat_vec(p, &alpha.components()))
    }

    /// `Λ(α, β) = −dη(♭⁻¹α, ♭⁻¹β)`.
    pub fn jacobi_lambda(&self, alpha: &KForm, beta: &KForm) -> Result<Expr> {
        self.same_form(beta)?;
        Ok(beta.interior(&self.lambda_sharp(alpha)?)?.as_scalar())
    }

    /// `X_f = Λ(df, ·) − f R` without the cross-check.
    pub fn hamiltonian_field_unchecked(&self, f: &Expr) -> Result<VectorField> {
        let s = self.sym()?;
        let df: Vec<Expr> = (0..self.dim()).map(|i| f.diff(i)).collect();
        let lam = linalg::mat_vec(&s.bivector, &df);
        let comps = lam
            .into_iter()
            .zip(s.reeb.components())
            .map(|(l, r)| l - f * r)
            .collect();
        VectorField::new(&self.chart, comps)
    }

    /// `X_f`, cross-checked against `η(X_f) = −f` and
    /// `ι_{X_f} dη = df − R(f) η`.
    pub fn hamiltonian_field(&self, f: &Expr) -> Result<VectorField> {
        let x = self.hamiltonian_field_unchecked(f)?;
        let checks = self.defining_checks(f, &x)?;
        if let Some(bad) = checks.into_iter().find(|c| !c.passed) {
            return Err(Error::Inconsistent {
                what: format!("Hamiltonian field of {f}: {}", bad.name),
                residual: bad.residual,
                witness: bad.witness.unwrap_or_default(),
            });
        }
        Ok(x)
    }

    /// `X_H` for the system's own Hamiltonian.
    pub fn hamiltonian_vector_field(&self) -> Result<VectorField> {
        self.hamiltonian_field(&self.hamiltonian)
    }

    fn defining_checks(&self, f: &Expr, x: &VectorField) -> Result<Vec<Check>> {
        let rf = self.reeb_derivative(f)?;
        let normal = self.eta.interior(x)?.as_scalar() + f;
        let df = KForm::scalar(&self.chart, f.clone()).d();
        let rhs = df.sub(&self.eta.scale(&rf))?;
        let horizontal = self.d_eta.interior(x)?.sub(&rhs)?;
        Ok(vec![
            self.chart.check("eta(X_f) + f", &normal)?,
            self.chart
                .check_all("i_X d(eta) - df + R(f) eta", &horizontal.all_coeffs())?,
        ])
    }

    /// The defining pair, `L_{X_f} η + R(f) η = 0` and `X_f(f) + R(f) f = 0`.
    pub fn hamiltonian_identities(&self, f: &Expr) -> Result<Vec<Check>> {
        let x = self.hamiltonian_field_unchecked(f)?;
        let rf = self.reeb_derivative(f)?;
        let mut checks = self.defining_checks(f, &x)?;
        let lie = self.eta.lie(&x)?.add(&self.eta.scale(&rf))?;
        checks.push(self.chart.check_all("L_X eta + R(f) eta", &lie.all_coeffs())?);
        checks.push(self.chart.check("X_f(f) + R(f) f", &(x.apply(f) + &rf * f))?);
        Ok(checks)
    }

    /// `{f, g} = X_f(g) + g R(f)`.
    pub fn jacobi_bracket(&self, f: &Expr, g: &Expr) -> Result<Expr> {
        let xf = self.hamiltonian_field_unchecked(f)?;
        Ok((xf.apply(g) + g * self.reeb_derivative(f)?).expand())
    }

    /// Antisymmetry and `η([X_f, X_g]) + {f, g} = 0`.
    pub fn bracket_checks(&self, f: &Expr, g: &Expr) -> Result<Vec<Check>> {
        let fg = self.jacobi_bracket(f, g)?;
        let gf = self.jacobi_bracket(g, f)?;
        let c = self
            .hamiltonian_field_unchecked(f)?
            .bracket(&self.hamiltonian_field_unchecked(g)?)?;
        let anti = self.eta.interior(&c)?.as_scalar() + &fg;
        Ok(vec![
            self.chart.check("{f,g} + {g,f}", &(&fg + &gf))?,
            self.chart.check("eta([X_f, X_g]) + {f,g}", &anti)?,
        ])
    }

    /// `[X_f, X_g]` is the Hamiltonian field of `h = −η([X_f, X_g])`, and
    /// `[X_f, δ]` stays horizontal for random horizontal `δ`.
    pub fn bracket_closure_check(&self, f: &Expr, g: &Expr) -> Result<ClosureReport> {
        let xf = self.hamiltonian_field_unchecked(f)?;
        let xg = self.hamiltonian_field_unchecked(g)?;
        let commutator = xf.bracket(&xg)?;
        let h = self.eta.interior(&commutator)?.as_scalar().negate().expand();
        let normal = self.eta.interior(&commutator)?.as_scalar() + &h;
        let dh = KForm::scalar(&self.chart, h.clone()).d();
        let rh = self.reeb_derivative(&h)?;
        let horizontal = self
            .d_eta
            .interior(&commutator)?
            .sub(&dh.sub(&self.eta.scale(&rh))?)?;
        let mut checks = vec![
            self.chart.check("eta(C) + h", &normal)?,
            self.chart
                .check_all("i_C d(eta) - dh + R(h) eta", &horizontal.all_coeffs())?,
        ];
        let mut preserved = ZeroTest::Zero { residual: 0.0 };
        for delta in self.random_horizontal(5, 0x5eed)? {
            let c = xf.bracket(&delta)?;
            preserved = preserved.merge(self.chart.is_zero(&self.eta.interior(&c)?.as_scalar())?);
        }
        checks.push(Check::from_test("eta([X_f, delta]) for horizontal delta", &preserved));
        Ok(ClosureReport {
            commutator,
            h,
            checks,
        })
    }

    /// Horizontal fields `ξ − η(ξ) R` from seeded random polynomial `ξ`.
    pub fn random_horizontal(&self, count: usize, seed: u64) -> Result<Vec<VectorField>> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let r = self.reeb()?;
        (0..count)
            .map(|_| {
                let xi = VectorField::new(
                    &self.chart,
                    (0..self.dim())
                        .map(|_| crate::expr::random::polynomial(&mut rng, &self.chart, 2, 2))
                        .collect(),
                )?;
                let v = self.eta.interior(&xi)?.as_scalar();
                xi.sub(&r.scale(&v))
            })
            .collect()
    }

    /// The system for `η′ = g η` carrying the same dynamics, i.e. with
    /// Hamiltonian `g H`. Checks `vol(η′) = g^{n+1} vol(η)`.
    pub fn rescale(&self, g: &Expr) -> Result<RescaleReport> {
        self.chart.require_nonvanishing("rescaling factor", g)?;
        let g = g.simplify();
        let system = self.conformal(&g, (&g * &self.hamiltonian).expand())?;
        let law = Expr::pow(g.clone(), Expr::constant((self.n() + 1) as f64));
        let diff = system.volume.sub(&self.volume.scale(&law))?;
        let checks = vec![self.chart.check_all("vol(g eta) - g^(n+1) vol(eta)", &diff.all_coeffs())?];
        Ok(RescaleReport {
            system,
            factor: g,
            checks,
        })
    }

    /// Gauge change `η̃ = −η/H` turning `X_H` into the Reeb field of `η̃`,
    /// with Hamiltonian `−1`.
    pub fn straighten(&self) -> Result<StraightenReport> {
        let h = &self.hamiltonian;
        if let Err(Error::Inadmissible { reason, witness, .. }) =
            self.chart.require_nonvanishing("Hamiltonian", h)
        {
            return Err(Error::Inadmissible {
                what: "straightening".into(),
                reason: format!("cannot straighten across the 0-levelset (H {reason})"),
                witness,
            });
        }
        let xh = self.hamiltonian_vector_field()?;
        let factor = h.clone().recip().negate();
        let system = self.conformal(&factor, Expr::constant(-1.0))?;
        let normal = system.eta.interior(&xh)?.as_scalar() - 1.0;
        let horizontal = system.d_eta.interior(&xh)?;
        let mut checks = vec![
            self.chart.check("eta~(X_H) - 1", &normal)?,
            self.chart.check_all("i_(X_H) d(eta~)", &horizontal.all_coeffs())?,
        ];
        let reeb_diff = system.reeb()?.sub(&xh)?;
        checks.push(self.chart.check_all("Reeb(eta~) - X_H", reeb_diff.components())?);
        Ok(StraightenReport {
            system,
            reeb: xh,
            checks,
        })
    }
}

/// Result of [`ContactSystem::bracket_closure_check`].
#[derive(Clone, Debug)]
pub struct ClosureReport {
    /// `C = [X_f, X_g]`.
    pub commutator: VectorField,
    /// `h = −η(C)`.
    pub h: Expr,
    pub checks: Vec<Check>,
}

/// Result of [`ContactSystem::rescale`].
#[derive(Clone, Debug)]
pub struct RescaleReport {
    pub system: ContactSystem,
    pub factor: Expr,
    pub checks: Vec<Check>,
}

/// Result of [`ContactSystem::straighten`].
#[derive(Clone, Debug)]
pub struct StraightenReport {
    /// `(η̃, −1)`.
    pub system: ContactSystem,
    /// `X_H` of the original system, the Reeb field of `η̃`.
    pub reeb: VectorField,
    pub checks: Vec<Check>,
}
