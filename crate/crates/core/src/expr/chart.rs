use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::Expr;

/// Settings of the randomized zero test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampling {
    pub samples: usize,
    pub tol: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            samples: 32,
            tol: 1e-9,
        }
    }
}

/// An odd-dimensional coordinate chart together with the box the zero test
/// samples from.
#[derive(Clone, Debug)]
pub struct Chart {
    names: Arc<[Arc<str>]>,
    domain: Vec<(f64, f64)>,
    seed: u64,
    sampling: Sampling,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Chart {
    pub const DEFAULT_DOMAIN: (f64, f64) = (-2.0, 2.0);

    /// A chart with the given coordinate names, domain `[-2, 2]` in every
    /// coordinate and seed 0.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Chart> {
        let dim = names.len();
        if dim < 3 || dim.is_multiple_of(2) {
            return Err(Error::InvalidChart(format!(
                "dimension must be odd and at least 3, got {dim}"
            )));
        }
        let mut seen: Vec<&str> = Vec::with_capacity(dim);
        for n in names {
            let n = n.as_ref();
            let valid = n
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid || super::Func::from_name(n).is_some() {
                return Err(Error::InvalidChart(format!("invalid coordinate name `{n}`")));
            }
            if seen.contains(&n) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{n}`")));
            }
            seen.push(n);
        }
        Ok(Chart {
            names: names.iter().map(|n| Arc::from(n.as_ref())).collect(),
            domain: vec![Self::DEFAULT_DOMAIN; dim],
            seed: 0,
            sampling: Sampling::default(),
        })
    }

    /// Darboux chart of dimension `2n+1`: `q, p, s` for `n = 1`, otherwise
    /// `q1..qn, p1..pn, s`.
    pub fn darboux(n: usize) -> Result<Chart> {
        if n == 0 {
            return Err(Error::InvalidChart("n must be positive".into()));
        }
        let names: Vec<String> = if n == 1 {
            vec!["q".into(), "p".into(), "s".into()]
        } else {
            (1..=n)
                .map(|i| format!("q{i}"))
                .chain((1..=n).map(|i| format!("p{i}")))
                .chain(std::iter::once("s".to_string()))
                .collect()
        };
        Chart::new(&names)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// `n` in `dim = 2n + 1`.
    pub fn half_dim(&self) -> usize {
        (self.dim() - 1) / 2
    }

    pub fn names(&self) -> &[Arc<str>] {
        &self.names
    }

    pub(crate) fn shared_names(&self) -> Arc<[Arc<str>]> {
        self.names.clone()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| &**n == name)
    }

    pub fn coord(&self, index: usize) -> Expr {
        Expr::variable(index, self.names[index].clone())
    }

    pub fn var(&self, name: &str) -> Result<Expr> {
        self.index_of(name)
            .map(|i| self.coord(i))
            .ok_or_else(|| Error::UndeclaredVariable(name.to_string()))
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sampling(&self) -> Sampling {
        self.sampling
    }

    pub fn with_domain(mut self, name: &str, lo: f64, hi: f64) -> Result<Chart> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::UndeclaredVariable(name.to_string()))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidChart(format!(
                "empty or unbounded interval [{lo}, {hi}] for `{name}`"
            )));
        }
        self.domain[i] = (lo, hi);
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Chart {
        self.seed = seed;
        self
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Chart {
        self.sampling = sampling;
        self
    }

    /// Deterministic stream of points drawn uniformly from the domain box.
    /// Every call restarts the same stream.
    pub fn sample_stream(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        std::iter::repeat_with(move || {
            self.domain
                .iter()
                .map(|&(lo, hi)| rng.gen_range(lo..hi))
                .collect()
        })
    }

    /// The first `count` points of [`Chart::sample_stream`].
    pub fn sample_points(&self, count: usize) -> Vec<Vec<f64>> {
        self.sample_stream().take(count).collect()
    }
}
