//! Fixed-step RK4 integration of vector fields with observables evaluated at
//! every step.
//!
//! The step count is `round((t1 − t0)/dt)` and the effective step is
//! `(t1 − t0)/steps`, so the last sample sits exactly at `t1`. Observables
//! that fail to evaluate leave a gap; a non-finite state aborts.

use std::fmt::Write as _;

use crate::contact::ContactSystem;
use crate::error::{Error, EvalError, Result};
use crate::expr::{Chart, Expr};
use crate::forms::VectorField;
use crate::Scalar;

/// A vector field prepared for repeated numeric evaluation.
#[derive(Clone, Debug)]
pub struct CompiledField {
    comps: Vec<Expr>,
}

pub fn compile(x: &VectorField) -> CompiledField {
    CompiledField {
        comps: x.components().iter().map(Expr::simplify).collect(),
    }
}

impl CompiledField {
    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn eval<T: Scalar>(&self, x: &[T]) -> std::result::Result<Vec<T>, EvalError> {
        if x.len() != self.comps.len() {
            return Err(EvalError::Arity {
                expected: self.comps.len(),
                found: x.len(),
            });
        }
        self.comps.iter().map(|c| c.eval(x)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Observable {
    pub name: String,
    pub expr: Expr,
}

impl Observable {
    pub fn new(name: impl Into<String>, expr: Expr) -> Observable {
        Observable {
            name: name.into(),
            expr,
        }
    }
}

/// Values of one observable; `None` marks a gap.
#[derive(Clone, Debug)]
pub struct Column<T> {
    pub name: String,
    pub values: Vec<Option<T>>,
}

#[derive(Clone, Debug)]
pub struct Trajectory<T: Scalar = f64> {
    pub t0: T,
    /// Effective step `(t1 − t0)/steps`.
    pub dt: T,
    pub steps: usize,
    pub coords: Vec<String>,
    pub times: Vec<T>,
    /// `steps + 1` rows of `dim` values.
    pub states: Vec<Vec<T>>,
    pub observables: Vec<Column<T>>,
    /// Set by [`integrate`]: the dissipation residual along the trajectory.
    pub dissipation_residual: Option<f64>,
}

fn to_f64<T: Scalar>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn lift<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("every f64 converts to a float type")
}

impl<T: Scalar> Trajectory<T> {
    pub fn final_time(&self) -> T {
        *self.times.last().expect("at least the initial sample")
    }

    pub fn final_state(&self) -> &[T] {
        self.states.last().expect("at least the initial sample")
    }

    pub fn column(&self, name: &str) -> Option<&Column<T>> {
        self.observables.iter().find(|c| c.name == name)
    }

    /// Values of an expression along the states; `None` where it fails.
    pub fn evaluate(&self, e: &Expr) -> Vec<Option<f64>> {
        self.states
            .iter()
            .map(|x| e.eval(x).ok().map(to_f64).filter(|v| v.is_finite()))
            .collect()
    }

    /// `max_t |e(t) − e(t0)|` over the samples where `e` is defined.
    pub fn max_drift(&self, e: &Expr) -> Option<f64> {
        let values = self.evaluate(e);
        let first = values.first().copied().flatten()?;
        Some(values.into_iter().flatten().map(|v| (v - first).abs()).fold(0.0, f64::max))
    }

    /// `t,<coords>,<observables>` with 17 significant digits; gaps are
    /// empty cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for name in self.coords.iter().chain(self.observables.iter().map(|c| &c.name)) {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        let cell = |v: f64| format!("{v:.16e}");
        for (k, (t, x)) in self.times.iter().zip(&self.states).enumerate() {
            out.push_str(&cell(to_f64(*t)));
            for v in x {
                let _ = write!(out, ",{}", cell(to_f64(*v)));
            }
            for c in &self.observables {
                out.push(',');
                if let Some(v) = c.values[k] {
                    out.push_str(&cell(to_f64(v)));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Classical RK4 for `field` from `init` over `[t0, t1]`.
pub fn integrate_field<T: Scalar>(
    chart: &Chart,
    field: &CompiledField,
    init: &[T],
    t0: T,
    t1: T,
    dt: T,
    observables: &[Observable],
) -> Result<Trajectory<T>> {
    if field.dim() != chart.dim() || init.len() != chart.dim() {
        return Err(Error::Precondition(format!(
            "state of length {} does not match dimension {}",
            init.len(),
            chart.dim()
        )));
    }
    let ordered = dt > T::zero() && t1 > t0;
    if !ordered {
        return Err(Error::Precondition("integration needs dt > 0 and t1 > t0".into()));
    }
    let steps = ((t1 - t0) / dt).round().to_usize().unwrap_or(0).max(1);
    let span = t1 - t0;
    let n = lift::<T>(steps as f64);
    let h = span / n;
    let half = lift::<T>(0.5);
    let sixth = lift::<T>(1.0 / 6.0);
    let two = lift::<T>(2.0);

    let abort = |time: T, state: &[T]| Error::NonFinite {
        time: to_f64(time),
        state: state.iter().map(|v| to_f64(*v)).collect(),
    };
    let rhs = |t: T, x: &[T]| -> Result<Vec<T>> {
        let v = field.eval(x).map_err(|_| abort(t, x))?;
        if v.iter().any(|c| !c.is_finite()) {
            return Err(abort(t, x));
        }
        Ok(v)
    };
    let axpy = |x: &[T], a: T, k: &[T]| -> Vec<T> { x.iter().zip(k).map(|(xi, ki)| *xi + a * *ki).collect() };

    if init.iter().any(|v| !v.is_finite()) {
        return Err(abort(t0, init));
    }
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(t0);
    states.push(init.to_vec());
    let mut x = init.to_vec();
    for k in 0..steps {
        let t = t0 + span * lift::<T>(k as f64) / n;
        let k1 = rhs(t, &x)?;
        let k2 = rhs(t + half * h, &axpy(&x, half * h, &k1))?;
        let k3 = rhs(t + half * h, &axpy(&x, half * h, &k2))?;
        let k4 = rhs(t + h, &axpy(&x, h, &k3))?;
        for i in 0..x.len() {
            x[i] = x[i] + h * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        let t_next = if k + 1 == steps { t1 } else { t0 + span * lift::<T>((k + 1) as f64) / n };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(abort(t_next, &x));
        }
        times.push(t_next);
        states.push(x.clone());
    }
    let observables = observables
        .iter()
        .map(|o| Column {
            name: o.name.clone(),
            values: states
                .iter()
                .map(|s| o.expr.eval(s).ok().filter(|v: &T| v.is_finite()))
                .collect(),
        })
        .collect();
    Ok(Trajectory {
        t0,
        dt: h,
        steps,
        coords: chart.names().iter().map(|s| s.to_string()).collect(),
        times,
        states,
        observables,
        dissipation_residual: None,
    })
}

/// Integrates `X_H` and records the dissipation residual.
pub fn integrate<T: Scalar>(
    sys: &ContactSystem,
    init: &[T],
    t0: T,
    t1: T,
    dt: T,
    observables: &[Observable],
) -> Result<Trajectory<T>> {
    let field = compile(&sys.hamiltonian_vector_field()?);
    let mut traj = integrate_field(sys.chart(), &field, init, t0, t1, dt, observables)?;
    traj.dissipation_residual = Some(dissipation_residual(&traj, sys)?);
    Ok(traj)
}

/// `max |ΔH/Δt + R(H) H|` over interior steps, with central differences.
pub fn dissipation_residual<T: Scalar>(traj: &Trajectory<T>, sys: &ContactSystem) -> Result<f64> {
    let h = sys.hamiltonian();
    let rh = sys.reeb_derivative(h)?.simplify();
    let dt = to_f64(traj.dt);
    let hv = traj.evaluate(h);
    let mut worst = 0.0f64;
    for k in 1..traj.states.len().saturating_sub(1) {
        let (Some(prev), Some(next), Some(here)) = (hv[k - 1], hv[k + 1], hv[k]) else {
            continue;
        };
        let Ok(r) = rh.eval(&traj.states[k]) else {
            continue;
        };
        let r = to_f64::<T>(r);
        worst = worst.max(((next - prev) / (2.0 * dt) + r * here).abs());
    }
    Ok(worst)
}

/// Comparison of `f(t)` with `f(t0) exp(−∫ R(H) dt)`, the integral by the
/// trapezoid rule at the integrator's steps.
#[derive(Clone, Debug)]
pub struct Envelope {
    pub predicted: Vec<Option<f64>>,
    pub observed: Vec<Option<f64>>,
    /// `max |f − predicted| / |predicted|`.
    pub max_relative_error: f64,
}

pub fn dissipation_envelope<T: Scalar>(traj: &Trajectory<T>, sys: &ContactSystem, f: &Expr) -> Result<Envelope> {
    let rh = sys.reeb_derivative(sys.hamiltonian())?.simplify();
    let rates = traj.evaluate(&rh);
    let observed = traj.evaluate(f);
    let f0 = observed[0].ok_or_else(|| Error::Precondition(format!("{f} is undefined at the initial state")))?;
    let dt = to_f64(traj.dt);
    let mut integral = 0.0f64;
    let mut predicted = vec![Some(f0)];
    let mut worst = 0.0f64;
    for k in 1..traj.states.len() {
        match (rates[k - 1], rates[k]) {
            (Some(a), Some(b)) if integral.is_finite() => integral += 0.5 * dt * (a + b),
            _ => integral = f64::NAN,
        }
        let p = Some(f0 * (-integral).exp()).filter(|v| v.is_finite());
        if let (Some(p), Some(o)) = (p, observed[k]) {
            worst = worst.max((o - p).abs() / p.abs().max(f64::MIN_POSITIVE));
        }
        predicted.push(p);
    }
    Ok(Envelope {
        predicted,
        observed,
        max_relative_error: worst,
    })
}
