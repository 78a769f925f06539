use std::fmt;

use super::Expr;

// Binding strength of the printed form; higher binds tighter.
const P_SUM: u8 = 1;
const P_PRODUCT: u8 = 2;
const P_UNARY: u8 = 3;
const P_POWER: u8 = 4;
const P_ATOM: u8 = 5;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Const(c) if *c < 0.0 => P_UNARY,
            Expr::Const(_) | Expr::Var(_) | Expr::Func(..) => P_ATOM,
            Expr::Add(_) => P_SUM,
            Expr::Mul(fs) => {
                if fs.len() == 1 {
                    fs[0].precedence()
                } else {
                    P_PRODUCT
                }
            }
            Expr::Div(..) => P_PRODUCT,
            Expr::Neg(_) => P_UNARY,
            Expr::Pow(..) => P_POWER,
        }
    }

    /// Leading negative numeric coefficient of a simplified term.
    fn negative_coefficient(&self) -> bool {
        match self {
            Expr::Const(c) => *c < 0.0,
            Expr::Mul(fs) => matches!(fs.first(), Some(Expr::Const(c)) if *c < 0.0),
            Expr::Neg(_) => true,
            _ => false,
        }
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c.is_finite() {
        write!(f, "{c}")
    } else {
        write!(f, "({c})")
    }
}

fn write_product(f: &mut fmt::Formatter<'_>, fs: &[Expr]) -> fmt::Result {
    let mut numer: Vec<&Expr> = Vec::new();
    let mut denom: Vec<Expr> = Vec::new();
    let mut coef = None;
    for (i, x) in fs.iter().enumerate() {
        match x {
            Expr::Const(c) if i == 0 => coef = Some(*c),
            Expr::Pow(b, k) if matches!(**k, Expr::Const(k) if k < 0.0) => {
                let k = k.as_const().unwrap();
                denom.push(Expr::pow((**b).clone(), Expr::constant(-k)));
            }
            x => numer.push(x),
        }
    }
    let mut first = true;
    match coef {
        Some(c) if c == -1.0 && !numer.is_empty() => write!(f, "-")?,
        Some(c) => {
            write_const(f, c)?;
            first = false;
        }
        None => {}
    }
    if numer.is_empty() && first {
        write!(f, "1")?;
        first = false;
    }
    for x in numer {
        if !first {
            write!(f, "*")?;
        }
        write_at(f, x, if first { P_PRODUCT } else { P_UNARY })?;
        first = false;
    }
    if !denom.is_empty() {
        write!(f, "/")?;
        if denom.len() == 1 {
            write_at(f, &denom[0], P_POWER)?;
        } else {
            write!(f, "(")?;
            for (i, d) in denom.iter().enumerate() {
                if i > 0 {
                    write!(f, "*")?;
                }
                write_at(f, d, P_POWER)?;
            }
            write!(f, ")")?;
        }
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write_const(f, *c),
            Expr::Var(v) => write!(f, "{}", v.name),
            Expr::Add(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i == 0 {
                        write_at(f, t, P_SUM)?;
                    } else if t.negative_coefficient() {
                        write!(f, " - ")?;
                        let positive = match t {
                            Expr::Neg(a) => (**a).clone(),
                            t => t.clone().negate(),
                        };
                        write_at(f, &positive, P_PRODUCT)?;
                    } else {
                        write!(f, " + ")?;
                        write_at(f, t, P_PRODUCT)?;
                    }
                }
                Ok(())
            }
            Expr::Mul(fs) => write_product(f, fs),
            Expr::Div(a, b) => {
                write_at(f, a, P_PRODUCT)?;
                write!(f, "/")?;
                write_at(f, b, P_UNARY)
            }
            Expr::Pow(a, b) => {
                write_at(f, a, P_ATOM)?;
                write!(f, "^")?;
                write_at(f, b, P_UNARY)
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_at(f, a, P_UNARY)
            }
            Expr::Func(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
