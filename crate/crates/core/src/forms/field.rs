use std::fmt;

use crate::error::{Error, EvalError, Result};
use crate::expr::{Chart, Expr};
use crate::Scalar;

use super::{same_chart, Names};

/// A vector field `Σ X^i ∂_i` with expanded components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    names: Names,
    comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: &Chart, comps: Vec<Expr>) -> Result<VectorField> {
        if comps.len() != chart.dim() {
            return Err(Error::Precondition(format!(
                "vector field needs {} components, got {}",
                chart.dim(),
                comps.len()
            )));
        }
        Ok(VectorField::build(chart.shared_names(), comps))
    }

    fn build(names: Names, comps: Vec<Expr>) -> VectorField {
        VectorField {
            names,
            comps: comps.iter().map(Expr::expand).collect(),
        }
    }

    fn rebuild(&self, comps: Vec<Expr>) -> VectorField {
        VectorField::build(self.names.clone(), comps)
    }

    pub fn zero(chart: &Chart) -> VectorField {
        VectorField {
            names: chart.shared_names(),
            comps: vec![Expr::ZERO; chart.dim()],
        }
    }

    /// The coordinate field `∂_index`.
    pub fn coordinate(chart: &Chart, index: usize) -> VectorField {
        let mut comps = vec![Expr::ZERO; chart.dim()];
        comps[index] = Expr::ONE;
        VectorField {
            names: chart.shared_names(),
            comps,
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub(crate) fn names(&self) -> &Names {
        &self.names
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.comps[i]
    }

    /// No component survives simplification.
    pub fn is_zero_literal(&self) -> bool {
        self.comps.iter().all(Expr::is_zero_literal)
    }

    /// Directional derivative `X(f) = Σ X^i ∂_i f`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let terms = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero_literal())
            .map(|(i, c)| c * f.diff(i))
            .collect();
        Expr::sum(terms).expand()
    }

    /// Lie bracket `[X, Y]^i = X(Y^i) − Y(X^i)`.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        same_chart(&self.names, &other.names)?;
        let comps = (0..self.dim())
            .map(|i| self.apply(&other.comps[i]) - other.apply(&self.comps[i]))
            .collect();
        Ok(self.rebuild(comps))
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        same_chart(&self.names, &other.names)?;
        Ok(self.rebuild(self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        same_chart(&self.names, &other.names)?;
        Ok(self.rebuild(self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect()))
    }

    pub fn neg(&self) -> VectorField {
        self.scale(&Expr::constant(-1.0))
    }

    /// `f X` for a function `f`.
    pub fn scale(&self, f: &Expr) -> VectorField {
        self.rebuild(self.comps.iter().map(|c| c * f).collect())
    }

    pub fn eval_at<T: Scalar>(&self, point: &[T]) -> Result<Vec<T>, EvalError> {
        self.comps.iter().map(|c| c.eval(point)).collect()
    }

    /// Components as a parenthesized tuple, the field literal grammar.
    pub fn tuple(&self) -> String {
        let parts: Vec<String> = self.comps.iter().map(Expr::to_string).collect();
        format!("({})", parts.join(", "))
    }
}

/// Prints in the basis notation `q*∂_q - p*∂_p`.
impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.comps.iter().enumerate() {
            if c.is_zero_literal() {
                continue;
            }
            let (neg, mag) = match c {
                Expr::Const(v) if *v < 0.0 => (true, Expr::constant(-v)),
                Expr::Mul(fs) if matches!(fs.first(), Some(Expr::Const(v)) if *v < 0.0) => {
                    (true, c.clone().negate())
                }
                _ => (false, c.clone()),
            };
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            match mag {
                m if m.is_one_literal() => {}
                m @ Expr::Add(_) => write!(f, "({m})*")?,
                m => write!(f, "{m}*")?,
            }
            write!(f, "∂_{}", self.names[i])?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
