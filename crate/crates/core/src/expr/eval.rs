use crate::error::EvalError;
use crate::Scalar;

use super::{Expr, Func};

impl Expr {
    /// Evaluates at a point given in chart coordinate order.
    ///
    /// Non-integer powers of negative numbers, logarithms of non-positive
    /// numbers and square roots of negative numbers are domain errors.
    pub fn eval<T: Scalar>(&self, point: &[T]) -> Result<T, EvalError> {
        if let Some(max) = self.max_var_index() {
            if max >= point.len() {
                return Err(EvalError::Arity {
                    expected: max + 1,
                    found: point.len(),
                });
            }
        }
        self.eval_unchecked(point)
    }

    fn eval_unchecked<T: Scalar>(&self, x: &[T]) -> Result<T, EvalError> {
        let v = match self {
            Expr::Const(c) => T::from_f64(*c).ok_or_else(|| EvalError::NonFinite(self.to_string()))?,
            Expr::Var(v) => x[v.index],
            Expr::Add(ts) => {
                let mut acc = T::zero();
                for t in ts.iter() {
                    acc = acc + t.eval_unchecked(x)?;
                }
                acc
            }
            Expr::Mul(fs) => {
                let mut acc = T::one();
                for f in fs.iter() {
                    acc = acc * f.eval_unchecked(x)?;
                }
                acc
            }
            Expr::Div(a, b) => {
                let den = b.eval_unchecked(x)?;
                if den == T::zero() {
                    return Err(EvalError::DivisionByZero(self.to_string()));
                }
                a.eval_unchecked(x)? / den
            }
            Expr::Neg(a) => -a.eval_unchecked(x)?,
            Expr::Pow(a, b) => {
                let base = a.eval_unchecked(x)?;
                let exp = b.eval_unchecked(x)?;
                pow_checked(base, exp).ok_or_else(|| {
                    if base == T::zero() && exp < T::zero() {
                        EvalError::DivisionByZero(self.to_string())
                    } else {
                        EvalError::Domain(self.to_string())
                    }
                })?
            }
            Expr::Func(f, a) => {
                let u = a.eval_unchecked(x)?;
                match f {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Exp => u.exp(),
                    Func::Log if u > T::zero() => u.ln(),
                    Func::Sqrt if u >= T::zero() => u.sqrt(),
                    _ => return Err(EvalError::Domain(self.to_string())),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite(self.to_string()))
        }
    }
}

fn pow_checked<T: Scalar>(base: T, exp: T) -> Option<T> {
    let integral = exp.fract() == T::zero();
    if base == T::zero() && exp < T::zero() {
        return None;
    }
    if base < T::zero() && !integral {
        return None;
    }
    if integral && exp.abs() <= T::from_f64(64.0).unwrap() {
        let n = exp.to_i32().unwrap();
        return Some(base.powi(n));
    }
    Some(base.powf(exp))
}
