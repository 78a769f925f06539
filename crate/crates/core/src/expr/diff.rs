use super::{Expr, Func};

impl Expr {
    /// Exact partial derivative with respect to the coordinate `index`,
    /// returned in simplified form.
    pub fn diff(&self, index: usize) -> Expr {
        if !self.depends_on(index) {
            return Expr::ZERO;
        }
        match self {
            Expr::Const(_) => Expr::ZERO,
            Expr::Var(v) => {
                if v.index == index {
                    Expr::ONE
                } else {
                    Expr::ZERO
                }
            }
            Expr::Add(ts) => Expr::sum(ts.iter().map(|t| t.diff(index)).collect()),
            Expr::Mul(fs) => {
                let fs: Vec<Expr> = fs.iter().map(Expr::simplify).collect();
                let mut terms = Vec::new();
                for i in 0..fs.len() {
                    let di = fs[i].diff(index);
                    if di.is_zero_literal() {
                        continue;
                    }
                    let mut factors: Vec<Expr> = Vec::with_capacity(fs.len());
                    factors.push(di);
                    factors.extend(fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()));
                    terms.push(Expr::product(factors));
                }
                Expr::sum(terms)
            }
            Expr::Div(a, b) => Expr::quotient(a.simplify(), b.simplify()).diff(index),
            Expr::Neg(a) => a.diff(index).negate(),
            Expr::Pow(b, e) => {
                let b = b.simplify();
                let e = e.simplify();
                if let Expr::Const(k) = e {
                    Expr::product(vec![
                        Expr::constant(k),
                        Expr::pow(b.clone(), Expr::constant(k - 1.0)),
                        b.diff(index),
                    ])
                } else {
                    // d(b^e) = b^e * (e' log b + e b'/b)
                    let inner = Expr::sum(vec![
                        Expr::product(vec![e.diff(index), b.clone().ln()]),
                        Expr::product(vec![e.clone(), b.diff(index), b.clone().recip()]),
                    ]);
                    Expr::product(vec![Expr::pow(b, e), inner])
                }
            }
            Expr::Func(f, u) => {
                let u = u.simplify();
                let du = u.diff(index);
                let outer = match f {
                    Func::Sin => u.cos(),
                    Func::Cos => u.sin().negate(),
                    Func::Exp => u.exp(),
                    Func::Log => u.recip(),
                    Func::Sqrt => Expr::product(vec![Expr::constant(0.5), u.sqrt().recip()]),
                };
                Expr::product(vec![outer, du])
            }
        }
    }
}
