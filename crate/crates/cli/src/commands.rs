//! One function per subcommand, each mapping onto a library operation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use contactkit::flow::{self, Observable};
use contactkit::quantities::{self, Quantity};
use contactkit::{decomp, integrability, symmetry, Check, ContactSystem, Expr, VectorField};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::report::Report;
use crate::spec::SystemSpec;

#[derive(Parser, Debug)]
#[command(name = "contactkit", version)]
#[command(about = "Contact Hamiltonian mechanics on coordinate charts")]
pub struct Cli {
    /// Emit the report as JSON
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct SpecArg {
    /// System spec file
    pub spec: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the contact condition, the Reeb field and the identities of H
    Validate(SpecArg),
    /// Print the Reeb field with its defining checks
    Reeb(SpecArg),
    /// Hamiltonian vector field of a function
    Hamvec {
        #[command(flatten)]
        spec: SpecArg,
        /// Function name or expression
        f: String,
    },
    /// Jacobi bracket of two functions and closure of their fields
    Bracket {
        #[command(flatten)]
        spec: SpecArg,
        f: String,
        g: String,
    },
    /// Hamiltonian plus horizontal decomposition of a field
    Decompose {
        #[command(flatten)]
        spec: SpecArg,
        /// Field name or literal
        field: String,
    },
    /// Classify a field against the four symmetry notions
    Classify {
        #[command(flatten)]
        spec: SpecArg,
        /// Field name or literal
        #[arg(long)]
        field: String,
        /// Gauge function g of the Cartan test (default 0)
        #[arg(long, allow_hyphen_values = true)]
        g: Option<String>,
        /// Conformal factor a of the Cartan test (default -R(phi + g))
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
    },
    /// Test whether a function is dissipated
    Dissipated {
        #[command(flatten)]
        spec: SpecArg,
        f: String,
    },
    /// Conserved ratio of two dissipated functions
    Ratio {
        #[command(flatten)]
        spec: SpecArg,
        f: String,
        g: String,
    },
    /// Involution, independence and the closed-form contraction
    Integrability {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(required = true)]
        functions: Vec<String>,
    },
    /// Integrate X_H with fixed-step RK4 and emit CSV
    Flow {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long)]
        dt: f64,
        /// Initial state, e.g. `q=0,p=1,s=1`
        #[arg(long, allow_hyphen_values = true)]
        init: String,
        /// Observable (name or expression); repeatable
        #[arg(long)]
        observe: Vec<String>,
        /// Write the CSV here and print the report instead
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hamiltonian and horizontal densities of a field
    Densities {
        #[command(flatten)]
        spec: SpecArg,
        field: String,
    },
    /// Conformal rescaling eta -> g eta, H -> g H
    Rescale {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, allow_hyphen_values = true)]
        factor: String,
    },
    /// Gauge change turning X_H into a Reeb field
    Straighten(SpecArg),
}

/// What a command produced: the text for stdout and the pass flag.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub passed: bool,
}

fn tuple(x: &VectorField) -> Value {
    json!(x.components().iter().map(Expr::to_string).collect::<Vec<_>>())
}

fn flag(v: Option<bool>) -> Value {
    v.map_or(Value::Null, Value::Bool)
}

fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Value {
    Value::Array(items.into_iter().map(|i| Value::String(i.to_string())).collect())
}

fn points(ps: &[Vec<f64>]) -> Value {
    json!(ps)
}

fn quantity(report: &mut Report, group: &str, q: &Quantity) {
    report.result("expression", q.expression.to_string());
    report.result("kind", q.kind.to_string());
    report.result("holds", q.holds);
    if let Some(v) = &q.value {
        report.result("value", v.to_string());
    }
    report.checks(group, &q.checks);
    for d in &q.diagnostics {
        report.diagnostic(group, d);
    }
    if !q.holds {
        report.fail();
    }
}

fn reeb_checks(sys: &ContactSystem) -> contactkit::Result<Vec<Check>> {
    let r = sys.reeb()?;
    let chart = sys.chart();
    Ok(vec![
        chart.check("eta(R) - 1", &(sys.eta().interior(r)?.as_scalar() - 1.0))?,
        chart.check_all("i_R d(eta)", &sys.d_eta().interior(r)?.all_coeffs())?,
    ])
}

fn validate(spec: &SystemSpec, report: &mut Report) -> Result<(), CliError> {
    let contact = contactkit::check_contact(spec.chart(), &spec.eta_form())?;
    report.result("contact", contact.nonvanishing);
    report.result("volume_coefficient", contact.top.to_string());
    if !contact.nonvanishing {
        report.result("degenerate_at", json!(contact.witness));
        report.fail();
        return Ok(());
    }
    let sys = spec.system()?;
    let r = sys.reeb()?;
    report.result("reeb", r.to_string());
    report.checks("reeb", &reeb_checks(&sys)?);
    report.checks("hamiltonian", &sys.hamiltonian_identities(sys.hamiltonian())?);
    Ok(())
}

fn classify(
    spec: &SystemSpec,
    sys: &ContactSystem,
    field: &str,
    g: Option<&str>,
    a: Option<&str>,
    report: &mut Report,
) -> Result<(), CliError> {
    let y = spec.field(sys, field)?;
    let g = g.map(|g| spec.function(g)).transpose()?;
    let a = a.map(|a| spec.function(a)).transpose()?;
    let r = symmetry::classify(sys, &y, g.as_ref(), a.as_ref())?;
    report.result("field", y.to_string());
    report.result("dynamical_symmetry", flag(r.dynamical_symmetry));
    report.result("dynamical_similarity", flag(r.dynamical_similarity));
    report.result("scaling_symmetry", flag(r.scaling_symmetry));
    report.result("cartan_symmetry", flag(r.cartan_symmetry));
    for (key, value) in [("phi", &r.phi), ("lambda", &r.lambda), ("g", &r.g), ("a", &r.a), ("density", &r.density)] {
        if let Some(v) = value {
            report.result(key, v.to_string());
        }
    }
    for c in &r.conditions {
        report.diagnostic("condition", c);
    }
    report.checks("assertion", &r.assertions);
    let mut notes = r.notes.clone();
    if r.scaling_symmetry == Some(true) {
        match quantities::scaling_constant(sys, &y) {
            Ok(q) => {
                report.result("Phi", q.expression.to_string());
                if let Some(v) = &q.value {
                    report.result("X_H(Phi)", v.to_string());
                }
                report.checks("Phi", &q.checks);
                for d in &q.diagnostics {
                    report.diagnostic("Phi", d);
                }
            }
            Err(e @ contactkit::Error::Inadmissible { .. }) => notes.push(format!("Phi not formed: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    if !notes.is_empty() {
        report.result("notes", strings(notes));
    }
    Ok(())
}

fn integrability_cmd(spec: &SystemSpec, sys: &ContactSystem, names: &[String], report: &mut Report) -> Result<(), CliError> {
    let fs = names.iter().map(|n| spec.function(n)).collect::<Result<Vec<_>, _>>()?;
    report.result("functions", strings(&fs));
    if fs.len() == sys.n() + 1 {
        let r = integrability::check_complete_integrable(sys, &fs)?;
        report.result("complete_integrable", r.passed());
        report.result("independent", r.independent);
        report.result("contraction", r.contraction.to_string());
        report.result("closed_form", r.comparison.closed_form.to_string());
        report.result("vanishing_samples", points(&r.vanishing_samples));
        report.result("zero_levelset", points(&r.zero_levelset));
        report.checks("involution", &r.involution);
        report.check("closed form", &r.comparison.check);
        report.check("full contraction", &r.full_contraction);
        report.check("independence", &r.independence);
        if !r.passed() {
            report.fail();
        }
        let mut warnings = r.warnings.clone();
        if sys.n() == 1 {
            let inv = integrability::three_dim_invariant(sys, &fs[0], &fs[1])?;
            report.result("invariant_form", inv.form.to_string());
            report.result("kappa", inv.kappa.as_ref().map_or(Value::Null, |k| Value::String(k.to_string())));
            report.checks("invariant", &inv.checks);
            for d in &inv.diagnostics {
                report.diagnostic("invariant", d);
            }
            warnings.extend(inv.notes);
        }
        if !warnings.is_empty() {
            report.result("warnings", strings(warnings));
        }
    } else {
        let cmp = integrability::compare_li(sys, &fs)?;
        report.result("closed_form", cmp.closed_form.to_string());
        report.result("contraction", cmp.oracle.to_string());
        report.check("closed form", &cmp.check);
        let rows: Vec<Value> = cmp
            .table
            .iter()
            .map(|r| json!({"basis": r.basis, "closed_form": r.closed_form.to_string(), "contraction": r.oracle.to_string()}))
            .collect();
        if !rows.is_empty() {
            report.result("mismatches", Value::Array(rows));
        }
    }
    Ok(())
}

fn parse_init(spec: &SystemSpec, text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |message: String| CliError::BadArgument {
        argument: text.to_string(),
        message,
    };
    let mut state: Vec<Option<f64>> = vec![None; spec.coords.len()];
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part.split_once('=').ok_or_else(|| bad(format!("expected `coord=value`, got `{part}`")))?;
        let i = spec.chart().index_of(name.trim()).ok_or_else(|| CliError::UnknownName {
            kind: "coordinate",
            name: name.trim().to_string(),
        })?;
        let v = value.trim().parse::<f64>().map_err(|_| bad(format!("`{}` is not a number", value.trim())))?;
        if state[i].replace(v).is_some() {
            return Err(bad(format!("`{}` is assigned twice", name.trim())));
        }
    }
    state
        .iter()
        .zip(&spec.coords)
        .map(|(v, n)| v.ok_or_else(|| bad(format!("missing initial value for `{n}`"))))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn flow_cmd(
    spec: &SystemSpec,
    sys: &ContactSystem,
    json: bool,
    (t0, t1, dt): (f64, f64, f64),
    init: &str,
    observe: &[String],
    out: Option<&PathBuf>,
    report: &mut Report,
) -> Result<Option<String>, CliError> {
    let init = parse_init(spec, init)?;
    let observables = observe
        .iter()
        .map(|o| Ok(Observable::new(o.clone(), spec.function(o)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let traj = flow::integrate(sys, &init, t0, t1, dt, &observables)?;
    let csv = traj.to_csv();
    report.result("steps", traj.steps);
    report.result("dt", traj.dt);
    report.result("final_time", traj.final_time());
    report.result("final_state", json!(traj.final_state()));
    report.result("dissipation_residual", json!(traj.dissipation_residual));
    match (out, json) {
        (Some(path), _) => {
            std::fs::write(path, &csv).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            report.result("csv", path.display().to_string());
            Ok(None)
        }
        (None, true) => Ok(None),
        (None, false) => Ok(Some(csv)),
    }
}

fn spec_path(command: &Command) -> &PathBuf {
    match command {
        Command::Validate(s) | Command::Reeb(s) | Command::Straighten(s) => &s.spec,
        Command::Hamvec { spec, .. }
        | Command::Bracket { spec, .. }
        | Command::Decompose { spec, .. }
        | Command::Classify { spec, .. }
        | Command::Dissipated { spec, .. }
        | Command::Ratio { spec, .. }
        | Command::Integrability { spec, .. }
        | Command::Flow { spec, .. }
        | Command::Densities { spec, .. }
        | Command::Rescale { spec, .. } => &spec.spec,
    }
}

fn name(command: &Command) -> &'static str {
    match command {
        Command::Validate(_) => "validate",
        Command::Reeb(_) => "reeb",
        Command::Hamvec { .. } => "hamvec",
        Command::Bracket { .. } => "bracket",
        Command::Decompose { .. } => "decompose",
        Command::Classify { .. } => "classify",
        Command::Dissipated { .. } => "dissipated",
        Command::Ratio { .. } => "ratio",
        Command::Integrability { .. } => "integrability",
        Command::Flow { .. } => "flow",
        Command::Densities { .. } => "densities",
        Command::Rescale { .. } => "rescale",
        Command::Straighten(_) => "straighten",
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let spec = SystemSpec::load(spec_path(&cli.command))?;
    let mut report = Report::new(name(&cli.command), &spec);
    let mut raw = None;
    if let Command::Validate(_) = &cli.command {
        validate(&spec, &mut report)?;
    } else {
        let sys = spec.system()?;
        let r = &mut report;
        match &cli.command {
            Command::Validate(_) => unreachable!("handled above"),
            Command::Reeb(_) => {
                let reeb = sys.reeb()?;
                r.result("reeb", reeb.to_string());
                r.result("components", tuple(reeb));
                r.result("R(H)", sys.reeb_derivative(sys.hamiltonian())?.to_string());
                r.checks("reeb", &reeb_checks(&sys)?);
            }
            Command::Hamvec { f, .. } => {
                let f = spec.function(f)?;
                let x = sys.hamiltonian_field_unchecked(&f)?;
                r.result("function", f.to_string());
                r.result("field", x.to_string());
                r.result("components", tuple(&x));
                r.checks("identities", &sys.hamiltonian_identities(&f)?);
            }
            Command::Bracket { f, g, .. } => {
                let (f, g) = (spec.function(f)?, spec.function(g)?);
                r.result("bracket", sys.jacobi_bracket(&f, &g)?.to_string());
                r.checks("bracket", &sys.bracket_checks(&f, &g)?);
                let closure = sys.bracket_closure_check(&f, &g)?;
                r.result("commutator", closure.commutator.to_string());
                r.result("h", closure.h.to_string());
                r.checks("closure", &closure.checks);
            }
            Command::Decompose { field, .. } => {
                let xi = spec.field(&sys, field)?;
                let d = decomp::ham_hor_decompose(&sys, &xi)?;
                r.result("field", xi.to_string());
                r.result("phi", d.phi.to_string());
                r.result("hamiltonian_part", d.hamiltonian_part.to_string());
                r.result("horizontal_part", d.horizontal_part.to_string());
                r.checks("decomposition", &d.checks);
                let (hor, ver, check) = decomp::vertical_split(&sys, &xi)?;
                r.result("vertical_split", json!({"horizontal": hor.to_string(), "vertical": ver.to_string()}));
                r.check("vertical split", &check);
            }
            Command::Classify { field, g, a, .. } => classify(&spec, &sys, field, g.as_deref(), a.as_deref(), r)?,
            Command::Dissipated { f, .. } => {
                let f = spec.function(f)?;
                quantity(r, "dissipated", &quantities::is_dissipated(&sys, &f)?);
            }
            Command::Ratio { f, g, .. } => {
                let (f, g) = (spec.function(f)?, spec.function(g)?);
                quantity(r, "ratio", &quantities::conserved_ratio(&sys, &f, &g)?);
            }
            Command::Integrability { functions, .. } => integrability_cmd(&spec, &sys, functions, r)?,
            Command::Flow {
                t0,
                t1,
                dt,
                init,
                observe,
                out,
                ..
            } => raw = flow_cmd(&spec, &sys, cli.json, (*t0, *t1, *dt), init, observe, out.as_ref(), r)?,
            Command::Densities { field, .. } => {
                let xi = spec.field(&sys, field)?;
                let ham = decomp::hamiltonian_density(&sys, &xi)?;
                let hor = decomp::horizontal_density(&sys, &xi)?;
                r.result("field", xi.to_string());
                r.result("hamiltonian_density", ham.to_string());
                r.result("hamiltonian_degree", ham.degree.to_string());
                r.result("horizontal_density", hor.density.to_string());
                r.result("horizontal_degree", hor.density.degree.to_string());
                r.checks("horizontal", &hor.checks);
            }
            Command::Rescale { factor, .. } => {
                let g = spec.function(factor)?;
                let rs = sys.rescale(&g)?;
                r.result("factor", rs.factor.to_string());
                r.result("eta", rs.system.eta().to_string());
                r.result("hamiltonian", rs.system.hamiltonian().to_string());
                r.result("reeb", rs.system.reeb()?.to_string());
                r.checks("rescale", &rs.checks);
            }
            Command::Straighten(_) => {
                let st = sys.straighten()?;
                r.result("eta", st.system.eta().to_string());
                r.result("hamiltonian", st.system.hamiltonian().to_string());
                r.result("reeb", st.reeb.to_string());
                r.checks("straighten", &st.checks);
            }
        }
    }
    let passed = report.passed();
    let stdout = match raw {
        Some(csv) => csv,
        None if cli.json => {
            let mut s = serde_json::to_string_pretty(&report.to_json()).expect("reports serialize");
            s.push('\n');
            s
        }
        None => report.to_human(),
    };
    Ok(Outcome { stdout, passed })
}
