//! The rewrite set.
//!
//! - constant folding (including elementary functions of constants),
//! - identity and annihilator elimination (`e+0`, `1*e`, `0*e`, `e^1`, `e^0`),
//! - flattening of nested sums and products,
//! - like-term collection in sums (terms equal up to a numeric coefficient),
//! - like-factor collection in products (equal bases, numeric exponents),
//! - `(a*b)^k -> a^k*b^k` and `(a^j)^k -> a^(j*k)` for integer `k`,
//! - sum factors of a product are made monic (leading coefficient 1), the
//!   leading coefficient moving into the product's coefficient.
//!
//! Quotients become products with a `-1` power and negation becomes a `-1`
//! coefficient. There is no polynomial normal form; [`Expr::expand`] adds
//! distribution of products over sums for callers that want it.

use std::sync::Arc;

use super::{Expr, Func};

/// Beyond this many terms expansion gives up and keeps the factored form.
const EXPAND_TERM_LIMIT: usize = 4096;
const EXPAND_POWER_LIMIT: f64 = 12.0;

fn is_integer(x: f64) -> bool {
    x.is_finite() && x.fract() == 0.0
}

/// Splits a simplified term into numeric coefficient and symbolic key.
fn split_term(e: Expr) -> (f64, Option<Expr>) {
    match e {
        Expr::Const(c) => (c, None),
        Expr::Mul(fs) => match fs.first() {
            Some(Expr::Const(c)) => {
                let c = *c;
                let rest: Vec<Expr> = fs[1..].to_vec();
                let key = if rest.len() == 1 {
                    rest.into_iter().next().unwrap()
                } else {
                    Expr::Mul(rest.into())
                };
                (c, Some(key))
            }
            _ => (1.0, Some(Expr::Mul(fs))),
        },
        other => (1.0, Some(other)),
    }
}

/// Rebuilds `coef * key` without re-running product canonicalization.
fn scale_key(coef: f64, key: Expr) -> Expr {
    if coef == 1.0 {
        return key;
    }
    match key {
        Expr::Mul(fs) => {
            let mut v = Vec::with_capacity(fs.len() + 1);
            v.push(Expr::constant(coef));
            v.extend(fs.iter().cloned());
            Expr::Mul(v.into())
        }
        Expr::Add(_) => Expr::product(vec![Expr::constant(coef), key]),
        k => Expr::Mul(vec![Expr::constant(coef), k].into()),
    }
}

/// Splits a simplified factor into base and numeric exponent.
fn split_factor(e: Expr) -> (Expr, f64) {
    if let Expr::Pow(b, x) = &e {
        if let Expr::Const(k) = **x {
            return ((**b).clone(), k);
        }
    }
    (e, 1.0)
}

/// Factors `base^exp = lead * monic^exp` for a sum `base`; other bases and
/// powers that would leave the reals are returned unchanged with `lead = 1`.
fn monic(base: Expr, exp: f64) -> (f64, Expr) {
    let Expr::Add(ts) = &base else {
        return (1.0, base);
    };
    let (c, _) = split_term(ts[0].clone());
    if c == 1.0 || !(is_integer(exp) || c > 0.0) {
        return (1.0, base);
    }
    let terms = ts
        .iter()
        .map(|t| match split_term(t.clone()) {
            (k, None) => Expr::constant(k / c),
            (k, Some(key)) => scale_key(k / c, key),
        })
        .collect();
    (c.powf(exp), Expr::sum(terms))
}

impl Expr {
    /// Sum of simplified terms.
    pub fn sum(terms: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(terms.len());
        for t in terms {
            match t {
                Expr::Add(ts) => flat.extend(ts.iter().cloned()),
                t => flat.push(t),
            }
        }
        let mut constant = 0.0;
        let mut keyed: Vec<(Expr, f64)> = Vec::with_capacity(flat.len());
        for t in flat {
            match split_term(t) {
                (c, None) => constant += c,
                (c, Some(k)) => keyed.push((k, c)),
            }
        }
        keyed.sort_by(|a, b| a.0.structural_cmp(&b.0));
        let mut out: Vec<Expr> = Vec::with_capacity(keyed.len() + 1);
        let mut iter = keyed.into_iter().peekable();
        while let Some((key, mut coef)) = iter.next() {
            while let Some((next, c)) = iter.peek() {
                if *next == key {
                    coef += *c;
                    iter.next();
                } else {
                    break;
                }
            }
            if coef != 0.0 {
                out.push(scale_key(coef, key));
            }
        }
        if constant != 0.0 {
            out.push(Expr::constant(constant));
        }
        match out.len() {
            0 => Expr::ZERO,
            1 => out.pop().unwrap(),
            _ => Expr::Add(out.into()),
        }
    }

    /// Product of simplified factors.
    pub fn product(factors: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(factors.len());
        for f in factors {
            match f {
                Expr::Mul(fs) => flat.extend(fs.iter().cloned()),
                f => flat.push(f),
            }
        }
        let mut coef = 1.0;
        let mut based: Vec<(Expr, f64)> = Vec::with_capacity(flat.len());
        for f in flat {
            match f {
                Expr::Const(c) => coef *= c,
                f => {
                    let (base, exp) = split_factor(f);
                    let (lead, base) = monic(base, exp);
                    coef *= lead;
                    based.push((base, exp));
                }
            }
        }
        if coef == 0.0 {
            return Expr::ZERO;
        }
        based.sort_by(|a, b| a.0.structural_cmp(&b.0));
        let mut out: Vec<Expr> = Vec::with_capacity(based.len() + 1);
        let mut iter = based.into_iter().peekable();
        while let Some((base, mut exp)) = iter.next() {
            while let Some((next, k)) = iter.peek() {
                if *next == base {
                    exp += *k;
                    iter.next();
                } else {
                    break;
                }
            }
            if exp == 0.0 {
                continue;
            }
            match Expr::pow(base, Expr::constant(exp)) {
                Expr::Const(c) => coef *= c,
                Expr::Mul(fs) => {
                    // (a*b)^k was split; fold its pieces in again
                    for f in fs.iter() {
                        match f {
                            Expr::Const(c) => coef *= c,
                            f => out.push(f.clone()),
                        }
                    }
                }
                f => out.push(f),
            }
        }
        if coef == 0.0 {
            return Expr::ZERO;
        }
        if out.len() > 1 {
            out.sort_by(|a, b| a.structural_cmp(b));
            // pieces folded back in may have created equal bases again
            if out.windows(2).any(|w| split_factor(w[0].clone()).0 == split_factor(w[1].clone()).0)
            {
                let mut v = out;
                v.push(Expr::constant(coef));
                return Expr::product(v);
            }
        }
        match (coef == 1.0, out.len()) {
            (_, 0) => Expr::constant(coef),
            (true, 1) => out.pop().unwrap(),
            (true, _) => Expr::Mul(out.into()),
            (false, _) => {
                out.insert(0, Expr::constant(coef));
                Expr::Mul(out.into())
            }
        }
    }

    /// `self * c` for a numeric constant.
    pub fn scaled(self, c: f64) -> Expr {
        if c == 1.0 {
            return self;
        }
        if c == 0.0 {
            return Expr::ZERO;
        }
        match self {
            Expr::Const(a) => Expr::constant(a * c),
            e => Expr::product(vec![Expr::constant(c), e]),
        }
    }

    pub fn negate(self) -> Expr {
        self.scaled(-1.0)
    }

    pub fn quotient(num: Expr, den: Expr) -> Expr {
        Expr::product(vec![num, Expr::pow(den, Expr::constant(-1.0))])
    }

    pub fn recip(self) -> Expr {
        Expr::pow(self, Expr::constant(-1.0))
    }

    pub fn powi(self, k: i32) -> Expr {
        Expr::pow(self, Expr::constant(k as f64))
    }

    /// Power of simplified operands.
    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        if let Expr::Const(k) = exponent {
            if k == 0.0 {
                return Expr::ONE;
            }
            if k == 1.0 {
                return base;
            }
            match &base {
                Expr::Const(b) => {
                    if *b == 1.0 {
                        return Expr::ONE;
                    }
                    let v = b.powf(k);
                    if v.is_finite() && !(*b < 0.0 && !is_integer(k)) {
                        return Expr::constant(v);
                    }
                }
                Expr::Pow(inner, j) if is_integer(k) => {
                    if let Expr::Const(j) = **j {
                        return Expr::pow((**inner).clone(), Expr::constant(j * k));
                    }
                }
                Expr::Mul(fs) if is_integer(k) => {
                    return Expr::product(
                        fs.iter()
                            .map(|f| Expr::pow(f.clone(), Expr::constant(k)))
                            .collect(),
                    );
                }
                _ => {}
            }
            return Expr::Pow(Arc::new(base), Arc::new(Expr::Const(k)));
        }
        if base.is_one_literal() {
            return Expr::ONE;
        }
        Expr::Pow(Arc::new(base), Arc::new(exponent))
    }

    /// Elementary function of a simplified argument.
    pub fn func(f: Func, arg: Expr) -> Expr {
        if let Expr::Const(x) = arg {
            let v = match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Log if x > 0.0 => x.ln(),
                Func::Sqrt if x >= 0.0 => x.sqrt(),
                _ => f64::NAN,
            };
            if v.is_finite() {
                return Expr::constant(v);
            }
        }
        Expr::Func(f, Arc::new(arg))
    }

    pub fn sin(self) -> Expr {
        Expr::func(Func::Sin, self)
    }
    pub fn cos(self) -> Expr {
        Expr::func(Func::Cos, self)
    }
    pub fn exp(self) -> Expr {
        Expr::func(Func::Exp, self)
    }
    pub fn ln(self) -> Expr {
        Expr::func(Func::Log, self)
    }
    pub fn sqrt(self) -> Expr {
        Expr::func(Func::Sqrt, self)
    }

    /// Applies the rewrite set bottom-up.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Const(c) => Expr::constant(*c),
            Expr::Var(_) => self.clone(),
            Expr::Add(ts) => Expr::sum(ts.iter().map(Expr::simplify).collect()),
            Expr::Mul(fs) => Expr::product(fs.iter().map(Expr::simplify).collect()),
            Expr::Div(a, b) => Expr::quotient(a.simplify(), b.simplify()),
            Expr::Pow(a, b) => Expr::pow(a.simplify(), b.simplify()),
            Expr::Neg(a) => a.simplify().negate(),
            Expr::Func(f, a) => Expr::func(*f, a.simplify()),
        }
    }

    /// Simplifies and distributes products over sums (and small positive
    /// integer powers of sums). Gives a canonical form for polynomials and
    /// Laurent polynomials in the coordinates.
    pub fn expand(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Var(_) => self.simplify(),
            Expr::Add(ts) => Expr::sum(ts.iter().map(Expr::expand).collect()),
            Expr::Mul(fs) => multiply_out(fs.iter().map(Expr::expand).collect()),
            Expr::Div(a, b) => multiply_out(vec![a.expand(), Expr::pow(b.expand(), Expr::constant(-1.0))]),
            Expr::Neg(a) => multiply_out(vec![Expr::constant(-1.0), a.expand()]),
            Expr::Pow(a, b) => {
                let base = a.expand();
                let exp = b.expand();
                match (&base, &exp) {
                    (Expr::Add(_), Expr::Const(k)) if is_integer(*k) && *k > 1.0 && *k <= EXPAND_POWER_LIMIT => {
                        multiply_out(vec![base.clone(); *k as usize])
                    }
                    _ => match Expr::pow(base, exp) {
                        Expr::Mul(fs) => multiply_out(fs.to_vec()),
                        e => e,
                    },
                }
            }
            Expr::Func(f, a) => Expr::func(*f, a.expand()),
        }
    }
}

fn multiply_out(factors: Vec<Expr>) -> Expr {
    let mut terms: Vec<Expr> = vec![Expr::ONE];
    let mut deferred: Vec<Expr> = Vec::new();
    let flat = factors.into_iter().flat_map(|f| match f {
        Expr::Mul(fs) => fs.to_vec(),
        f => vec![f],
    });
    for f in flat {
        match f {
            Expr::Add(ts) if terms.len() * ts.len() <= EXPAND_TERM_LIMIT => {
                let mut next = Vec::with_capacity(terms.len() * ts.len());
                for a in &terms {
                    for b in ts.iter() {
                        next.push(Expr::product(vec![a.clone(), b.clone()]));
                    }
                }
                terms = match Expr::sum(next) {
                    Expr::Add(ts) => ts.to_vec(),
                    e => vec![e],
                };
            }
            f => deferred.push(f),
        }
    }
    if deferred.is_empty() {
        return Expr::sum(terms);
    }
    let rest = Expr::product(deferred);
    if matches!(rest, Expr::Add(_)) {
        return Expr::product(vec![Expr::sum(terms), rest]);
    }
    Expr::sum(
        terms
            .into_iter()
            .map(|t| Expr::product(vec![t, rest.clone()]))
            .collect(),
    )
}
