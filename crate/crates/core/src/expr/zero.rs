use crate::error::{Error, Result};

use super::{Chart, Expr, Sampling};

/// Outcome of the randomized zero test.
#[derive(Clone, Debug, PartialEq)]
pub enum ZeroTest {
    /// Syntactically zero, or below tolerance at every sample. `residual` is
    /// the largest magnitude seen.
    Zero { residual: f64 },
    /// First sample exceeding the tolerance.
    NonZero { witness: Vec<f64>, value: f64 },
}

impl ZeroTest {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroTest::Zero { .. })
    }

    /// Residual magnitude: the maximum for zero outcomes, the witness value
    /// otherwise.
    pub fn residual(&self) -> f64 {
        match self {
            ZeroTest::Zero { residual } => *residual,
            ZeroTest::NonZero { value, .. } => value.abs(),
        }
    }

    pub fn witness(&self) -> Option<&[f64]> {
        match self {
            ZeroTest::Zero { .. } => None,
            ZeroTest::NonZero { witness, .. } => Some(witness),
        }
    }

    /// Combines outcomes of several component tests: the first nonzero
    /// component wins, otherwise residuals are maximized.
    pub fn merge(self, other: ZeroTest) -> ZeroTest {
        match (self, other) {
            (n @ ZeroTest::NonZero { .. }, _) => n,
            (ZeroTest::Zero { .. }, n @ ZeroTest::NonZero { .. }) => n,
            (ZeroTest::Zero { residual: a }, ZeroTest::Zero { residual: b }) => {
                ZeroTest::Zero { residual: a.max(b) }
            }
        }
    }
}

/// A named identity check with its residual and, on failure, a witness.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub witness: Option<Vec<f64>>,
}

impl Check {
    pub fn from_test(name: impl Into<String>, test: &ZeroTest) -> Check {
        Check {
            name: name.into(),
            passed: test.is_zero(),
            residual: test.residual(),
            witness: test.witness().map(<[f64]>::to_vec),
        }
    }

    /// A check expected to fail: passes when the test is nonzero.
    pub fn expect_nonzero(name: impl Into<String>, test: &ZeroTest) -> Check {
        Check {
            name: name.into(),
            passed: !test.is_zero(),
            residual: test.residual(),
            witness: test.witness().map(<[f64]>::to_vec),
        }
    }
}

impl Chart {
    /// Decides `e = 0` on the sampling domain.
    ///
    /// After simplification a literal zero is accepted outright. Otherwise
    /// `e` is evaluated at seeded sample points, skipping points where the
    /// evaluation is singular (at most `10 * samples` attempts), and is
    /// declared nonzero at the first point where `|e| > tol * (1 + scale)`.
    /// `scale` is the largest magnitude over the samples of `e` or, when `e`
    /// is a sum, of its summands, so that cancellation roundoff in large
    /// terms is not mistaken for a nonzero value.
    pub fn is_zero(&self, e: &Expr) -> Result<ZeroTest> {
        let e = e.simplify();
        if e.is_zero_literal() {
            return Ok(ZeroTest::Zero { residual: 0.0 });
        }
        let terms: &[Expr] = match &e {
            Expr::Add(ts) => ts,
            other => std::slice::from_ref(other),
        };
        let Sampling { samples, tol } = self.sampling();
        let mut values: Vec<(Vec<f64>, f64)> = Vec::with_capacity(samples);
        let mut scale = 0.0f64;
        let mut attempts = 0;
        for point in self.sample_stream() {
            if values.len() == samples || attempts == 10 * samples {
                break;
            }
            attempts += 1;
            let Ok(parts) = terms.iter().map(|t| t.eval(&point)).collect::<Result<Vec<f64>, _>>() else {
                continue;
            };
            let v: f64 = parts.iter().sum();
            if !v.is_finite() {
                continue;
            }
            scale = parts.iter().fold(scale.max(v.abs()), |m, t| m.max(t.abs()));
            values.push((point, v));
        }
        if values.is_empty() {
            return Err(Error::Inconclusive { attempts });
        }
        let threshold = tol * (1.0 + scale);
        let residual = values.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
        match values.into_iter().find(|(_, v)| v.abs() > threshold) {
            Some((witness, value)) => Ok(ZeroTest::NonZero { witness, value }),
            None => Ok(ZeroTest::Zero { residual }),
        }
    }

    /// Zero test over several expressions at once.
    pub fn all_zero<'a, I>(&self, exprs: I) -> Result<ZeroTest>
    where
        I: IntoIterator<Item = &'a Expr>,
    {
        let mut acc = ZeroTest::Zero { residual: 0.0 };
        for e in exprs {
            acc = acc.merge(self.is_zero(e)?);
            if !acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    pub fn check(&self, name: impl Into<String>, e: &Expr) -> Result<Check> {
        Ok(Check::from_test(name, &self.is_zero(e)?))
    }

    pub fn check_all<'a, I>(&self, name: impl Into<String>, exprs: I) -> Result<Check>
    where
        I: IntoIterator<Item = &'a Expr>,
    {
        Ok(Check::from_test(name, &self.all_zero(exprs)?))
    }

    /// Zero test of every partial derivative: `e` is constant on the domain.
    pub fn is_constant(&self, e: &Expr) -> Result<ZeroTest> {
        let partials: Vec<Expr> = (0..self.dim()).map(|i| e.diff(i).expand()).collect();
        self.all_zero(&partials)
    }

    /// Refuses functions that vanish or change sign at a sample point.
    pub fn require_nonvanishing(&self, what: &str, e: &Expr) -> Result<()> {
        let e = e.simplify();
        let Sampling { samples, tol } = self.sampling();
        let inadmissible = |reason: &str, witness: Vec<f64>| Error::Inadmissible {
            what: what.to_string(),
            reason: reason.to_string(),
            witness,
        };
        if let Expr::Const(c) = e {
            return if c.abs() > tol {
                Ok(())
            } else {
                let first = self.sample_stream().next().unwrap_or_default();
                Err(inadmissible("vanishes identically", first))
            };
        }
        let mut sign = 0.0;
        for point in self.sample_stream().take(samples) {
            let v = match e.eval(&point) {
                Ok(v) => v,
                Err(_) => return Err(inadmissible("is singular", point)),
            };
            if v.abs() <= tol {
                return Err(inadmissible("vanishes", point));
            }
            if sign == 0.0 {
                sign = v.signum();
            } else if v.signum() != sign {
                return Err(inadmissible("changes sign", point));
            }
        }
        Ok(())
    }

    /// Nonvanishing test that reports rather than refuses.
    pub fn is_nonvanishing(&self, e: &Expr) -> bool {
        self.require_nonvanishing("", e).is_ok()
    }
}
