//! Exterior calculus on a chart.
//!
//! A [`KForm`] stores one coefficient per strictly increasing index tuple,
//! so `dq∧dp` and `-dp∧dq` share the representative `(0, 1)`. Coefficients
//! are kept expanded and zero coefficients are pruned after every
//! operation.

mod field;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, EvalError, Result};
use crate::expr::{parse_one_form_coeffs, Chart, Expr};
use crate::Scalar;

pub use field::VectorField;

pub(crate) type Names = Arc<[Arc<str>]>;

pub(crate) fn same_chart(a: &Names, b: &Names) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::ChartMismatch {
            expected: a.join(", "),
            found: b.join(", "),
        })
    }
}

/// Sorts `tuple` in place and returns the permutation sign, or `None` when
/// an index repeats.
fn normalize(tuple: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..tuple.len() {
        let mut j = i;
        while j > 0 && tuple[j - 1] > tuple[j] {
            tuple.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if tuple.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// A differential form of fixed degree on a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct KForm {
    names: Names,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, Expr>,
}

impl KForm {
    pub fn zero(chart: &Chart, degree: usize) -> KForm {
        KForm {
            names: chart.shared_names(),
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The 0-form `f`.
    pub fn scalar(chart: &Chart, f: Expr) -> KForm {
        KForm::from_terms(chart, 0, [(vec![], f)])
    }

    /// `d x_index`.
    pub fn differential(chart: &Chart, index: usize) -> KForm {
        KForm::from_terms(chart, 1, [(vec![index], Expr::ONE)])
    }

    /// The one-form `Σ coeffs[i] d x_i`.
    pub fn one_form(chart: &Chart, coeffs: Vec<Expr>) -> Result<KForm> {
        if coeffs.len() != chart.dim() {
            return Err(Error::Precondition(format!(
                "one-form needs {} coefficients, got {}",
                chart.dim(),
                coeffs.len()
            )));
        }
        Ok(KForm::from_terms(
            chart,
            1,
            coeffs.into_iter().enumerate().map(|(i, c)| (vec![i], c)),
        ))
    }

    /// Parses a one-form literal such as `d(s) - p*d(q)`.
    pub fn parse_one_form(chart: &Chart, text: &str) -> Result<KForm> {
        KForm::one_form(chart, parse_one_form_coeffs(chart, text)?)
    }

    /// Builds a form from `(tuple, coefficient)` pairs in any index order;
    /// tuples are sign-normalized and repeated indices drop out.
    pub fn from_terms<I>(chart: &Chart, degree: usize, terms: I) -> KForm
    where
        I: IntoIterator<Item = (Vec<usize>, Expr)>,
    {
        KForm::collect(chart.shared_names(), degree, terms)
    }

    fn collect<I>(names: Names, degree: usize, terms: I) -> KForm
    where
        I: IntoIterator<Item = (Vec<usize>, Expr)>,
    {
        let dim = names.len();
        let mut acc: BTreeMap<Vec<usize>, Vec<Expr>> = BTreeMap::new();
        for (mut tuple, c) in terms {
            assert_eq!(tuple.len(), degree, "tuple length must equal the degree");
            assert!(tuple.iter().all(|&i| i < dim), "index out of chart range");
            if c.is_zero_literal() {
                continue;
            }
            if let Some(sign) = normalize(&mut tuple) {
                acc.entry(tuple).or_default().push(c.scaled(sign));
            }
        }
        let coeffs = acc
            .into_iter()
            .filter_map(|(t, cs)| {
                let c = Expr::sum(cs).expand();
                (!c.is_zero_literal()).then_some((t, c))
            })
            .collect();
        KForm {
            names,
            degree,
            coeffs,
        }
    }

    fn rebuild<I>(&self, degree: usize, terms: I) -> KForm
    where
        I: IntoIterator<Item = (Vec<usize>, Expr)>,
    {
        KForm::collect(self.names.clone(), degree, terms)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub(crate) fn names(&self) -> &Names {
        &self.names
    }

    /// Coefficient of `dx_{t_1}∧…∧dx_{t_k}` for any ordering of `tuple`.
    pub fn coeff(&self, tuple: &[usize]) -> Expr {
        let mut t = tuple.to_vec();
        match normalize(&mut t) {
            Some(sign) => self.coeffs.get(&t).cloned().map_or(Expr::ZERO, |c| c.scaled(sign)),
            None => Expr::ZERO,
        }
    }

    /// Stored `(increasing tuple, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &Expr)> {
        self.coeffs.iter().map(|(t, c)| (t.as_slice(), c))
    }

    /// Every basis coefficient in lexicographic tuple order, zeros included.
    pub fn all_coeffs(&self) -> Vec<Expr> {
        combinations(self.dim(), self.degree)
            .into_iter()
            .map(|t| self.coeffs.get(&t).cloned().unwrap_or(Expr::ZERO))
            .collect()
    }

    /// One-form coefficients `α(∂_i)`.
    pub fn components(&self) -> Vec<Expr> {
        assert_eq!(self.degree, 1, "components of a one-form");
        (0..self.dim()).map(|i| self.coeff(&[i])).collect()
    }

    /// The function of a 0-form.
    pub fn as_scalar(&self) -> Expr {
        assert_eq!(self.degree, 0, "scalar of a 0-form");
        self.coeff(&[])
    }

    /// No stored coefficient survives simplification.
    pub fn is_zero_literal(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of the top form `dx_0∧…∧dx_{dim-1}`.
    pub fn top_coefficient(&self) -> Expr {
        assert_eq!(self.degree, self.dim(), "top coefficient of a top-degree form");
        self.coeff(&(0..self.dim()).collect::<Vec<_>>())
    }

    fn same(&self, other: &KForm) -> Result<()> {
        same_chart(&self.names, &other.names)
    }

    fn same_degree(&self, other: &KForm) -> Result<()> {
        self.same(other)?;
        if self.degree != other.degree {
            return Err(Error::Precondition(format!(
                "degree mismatch: {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &KForm) -> Result<KForm> {
        self.same_degree(other)?;
        Ok(self.rebuild(
            self.degree,
            self.coeffs
                .iter()
                .chain(other.coeffs.iter())
                .map(|(t, c)| (t.clone(), c.clone())),
        ))
    }

    pub fn sub(&self, other: &KForm) -> Result<KForm> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> KForm {
        self.scale(&Expr::constant(-1.0))
    }

    /// `f α` for a function `f`.
    pub fn scale(&self, f: &Expr) -> KForm {
        self.rebuild(
            self.degree,
            self.coeffs.iter().map(|(t, c)| (t.clone(), c * f)),
        )
    }

    /// Applies `g` to every coefficient.
    pub fn map(&self, g: impl Fn(&Expr) -> Expr) -> KForm {
        self.rebuild(self.degree, self.coeffs.iter().map(|(t, c)| (t.clone(), g(c))))
    }

    /// `α ∧ β`; zero when the degrees exceed the dimension.
    pub fn wedge(&self, other: &KForm) -> Result<KForm> {
        self.same(other)?;
        let degree = self.degree + other.degree;
        if degree > self.dim() {
            return Ok(self.rebuild(degree, []));
        }
        let mut terms = Vec::with_capacity(self.coeffs.len() * other.coeffs.len());
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let mut t = a.clone();
                t.extend_from_slice(b);
                terms.push((t, ca * cb));
            }
        }
        Ok(self.rebuild(degree, terms))
    }

    /// `α^{∧k}` as a left fold; `k = 0` gives the constant 0-form 1.
    pub fn wedge_power(&self, k: usize) -> KForm {
        let mut acc = self.rebuild(0, [(vec![], Expr::ONE)]);
        for _ in 0..k {
            acc = acc.wedge(self).expect("same chart");
        }
        acc
    }

    /// Exterior derivative.
    pub fn d(&self) -> KForm {
        let mut terms = Vec::new();
        for (t, c) in &self.coeffs {
            for k in 0..self.dim() {
                if t.contains(&k) {
                    continue;
                }
                let dc = c.diff(k);
                if dc.is_zero_literal() {
                    continue;
                }
                let mut tuple = Vec::with_capacity(t.len() + 1);
                tuple.push(k);
                tuple.extend_from_slice(t);
                terms.push((tuple, dc));
            }
        }
        self.rebuild(self.degree + 1, terms)
    }

    /// Interior product `ι_X α`; zero for 0-forms.
    pub fn interior(&self, x: &VectorField) -> Result<KForm> {
        same_chart(&self.names, x.names())?;
        if self.degree == 0 {
            return Ok(self.rebuild(0, []));
        }
        let mut terms = Vec::new();
        for (t, c) in &self.coeffs {
            for (r, &i) in t.iter().enumerate() {
                let xi = x.component(i);
                if xi.is_zero_literal() {
                    continue;
                }
                let mut rest = t.clone();
                rest.remove(r);
                let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                terms.push((rest, (c * xi).scaled(sign)));
            }
        }
        Ok(self.rebuild(self.degree - 1, terms))
    }

    /// Iterated contraction `ι_{X_k} … ι_{X_1} α`, applying the first field
    /// first.
    pub fn contract(&self, fields: &[VectorField]) -> Result<KForm> {
        fields.iter().try_fold(self.clone(), |acc, x| acc.interior(x))
    }

    /// Lie derivative by Cartan's formula `L_X = d ι_X + ι_X d`.
    pub fn lie(&self, x: &VectorField) -> Result<KForm> {
        same_chart(&self.names, x.names())?;
        if self.degree == 0 {
            return Ok(self.rebuild(0, [(vec![], x.apply(&self.as_scalar()))]));
        }
        let a = self.interior(x)?.d();
        let b = self.d().interior(x)?;
        a.add(&b)
    }

    /// Value of the form on `vectors` at `point`:
    /// `Σ_I c_I(point) det[v_j(x_{I_i})]`.
    pub fn eval_at<T: Scalar>(&self, point: &[T], vectors: &[Vec<T>]) -> Result<T, EvalError> {
        if vectors.len() != self.degree {
            return Err(EvalError::Arity {
                expected: self.degree,
                found: vectors.len(),
            });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.dim()) {
            return Err(EvalError::Arity {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let mut total = T::zero();
        for (t, c) in &self.coeffs {
            let minor: Vec<Vec<T>> = t.iter().map(|&i| vectors.iter().map(|v| v[i]).collect()).collect();
            total = total + c.eval(point)? * determinant(minor);
        }
        Ok(total)
    }
}

/// Strictly increasing `k`-tuples of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn determinant<T: Scalar>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        if m[pivot][col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det = det * m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for j in col..n {
                let v = m[col][j];
                m[row][j] = m[row][j] - f * v;
            }
        }
    }
    det
}

fn write_basis(f: &mut fmt::Formatter<'_>, names: &Names, tuple: &[usize]) -> fmt::Result {
    for (k, &i) in tuple.iter().enumerate() {
        if k > 0 {
            write!(f, "∧")?;
        }
        write!(f, "d({})", names[i])?;
    }
    Ok(())
}

/// Terms print as `coef*d(x)∧d(y)`; one-forms therefore print in the
/// one-form literal grammar.
impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (k, (t, c)) in self.coeffs.iter().enumerate() {
            let (neg, mag) = match c.as_const() {
                Some(v) if v < 0.0 => (true, Expr::constant(-v)),
                _ => match c {
                    Expr::Mul(fs) if matches!(fs.first(), Some(Expr::Const(v)) if *v < 0.0) => {
                        (true, c.clone().negate())
                    }
                    _ => (false, c.clone()),
                },
            };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if t.is_empty() {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one_literal() {
                if matches!(mag, Expr::Add(_)) {
                    write!(f, "({mag})*")?;
                } else {
                    write!(f, "{mag}*")?;
                }
            }
            write_basis(f, &self.names, t)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
