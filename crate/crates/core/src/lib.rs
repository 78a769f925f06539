//! Contact Hamiltonian mechanics on coordinate charts.
//!
//! Scalars are symbolic [`Expr`] trees over the coordinates of a [`Chart`];
//! differential forms ([`KForm`]) and vector fields ([`VectorField`]) carry
//! one expression per basis element. A [`ContactSystem`] bundles a contact
//! form with a Hamiltonian and caches its Reeb field and flat-map data.
//! Every identity is decided by the seeded randomized zero test
//! [`Chart::is_zero`], and every report carries residuals and witnesses.
//!
//! Sign conventions are taken literally throughout:
//! `X_f = Λ(df, ·) − f R`, `{f, g} = X_f(g) + g R(f)` and
//! `[A, B]^i = A(B^i) − B(A^i)`.

use std::fmt::Debug;

pub mod error;
pub mod expr;
pub mod contact;
pub mod forms;
pub mod decomp;
pub mod symmetry;
pub mod quantities;
pub mod integrability;
pub mod flow;

pub use error::{Error, EvalError, Result};
pub use expr::{Chart, Check, Expr, Sampling, ZeroTest};
pub use contact::{check_contact, standard_form, ContactReport, ContactSystem};
pub use forms::{KForm, VectorField};

/// Floating-point scalar used by numeric evaluation and integration.
pub trait Scalar: num_traits::Float + num_traits::FromPrimitive + Debug + Send + Sync + 'static {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Degree of a tensor density.
pub type Degree = num_rational::Rational64;
