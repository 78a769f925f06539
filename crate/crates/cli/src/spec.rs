//! The line-oriented system description read by every subcommand.
//!
//! ```text
//! [manifold]
//! dim = 3
//! coords = q, p, s
//! domain.p = 0.5, 2
//! seed = 0
//!
//! [contact]
//! eta = standard
//!
//! [hamiltonian]
//! H = p
//!
//! [fields]
//! Y = X(q*p)
//! Z = (1, 0, q)
//!
//! [functions]
//! f1 = p
//!
//! [tolerances]
//! samples = 32
//! tol = 1e-9
//! ```
//!
//! `#` and `;` start comments. Printing a parsed spec and parsing the text
//! again yields an equal [`SystemSpec`].

use std::fmt::{self, Write as _};
use std::path::Path;

use contactkit::{standard_form, Chart, ContactSystem, Expr, KForm, Sampling, VectorField};

use crate::error::CliError;

/// How the contact form is given.
#[derive(Clone, Debug, PartialEq)]
pub enum EtaSpec {
    /// `ds − Σ p_i dq_i`, applied positionally: the first `n` coordinates
    /// are the `q`s, the next `n` the `p`s, the last one `s`.
    Standard,
    Form(KForm),
}

/// A named vector field.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldSpec {
    /// `X(f)`, the Hamiltonian field of `f`.
    Hamiltonian(Expr),
    /// `(e_1, …, e_dim)`.
    Components(Vec<Expr>),
}

/// A parsed system description. Defaults are resolved at parse time.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub coords: Vec<String>,
    /// Per-coordinate sampling box, in chart order.
    pub domain: Vec<(f64, f64)>,
    pub seed: u64,
    pub sampling: Sampling,
    pub eta: EtaSpec,
    pub hamiltonian: Expr,
    pub fields: Vec<(String, FieldSpec)>,
    pub functions: Vec<(String, Expr)>,
    chart: Chart,
}

struct Entry {
    section: String,
    key: String,
    value: String,
    line: usize,
}

const SECTIONS: [&str; 6] = ["manifold", "contact", "hamiltonian", "fields", "functions", "tolerances"];

fn is_identifier(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits at commas outside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

/// Parses `X(expr)` or `(e_1, …, e_dim)` against `chart`.
pub fn parse_field(chart: &Chart, text: &str) -> Result<FieldSpec, String> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix("X(").and_then(|r| r.strip_suffix(')')) {
        return chart.parse(inner).map(FieldSpec::Hamiltonian).map_err(|e| e.to_string());
    }
    let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
        return Err(format!("expected `X(expr)` or a tuple of {} components, got `{t}`", chart.dim()));
    };
    let parts = split_top_level(inner);
    if parts.len() != chart.dim() {
        return Err(format!("field needs {} components, got {}", chart.dim(), parts.len()));
    }
    parts
        .iter()
        .map(|p| chart.parse(p))
        .collect::<Result<Vec<_>, _>>()
        .map(FieldSpec::Components)
        .map_err(|e| e.to_string())
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("expected a finite number, got `{}`", s.trim()))
}

fn lex(text: &str) -> Result<Vec<Entry>, (usize, String)> {
    let mut entries: Vec<Entry> = Vec::new();
    let mut section: Option<String> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split(['#', ';']).next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err((line, format!("unknown section `[{name}]`")));
            }
            if entries.iter().any(|e| e.section == name) {
                return Err((line, format!("section `[{name}]` appears twice")));
            }
            section = Some(name.to_string());
            continue;
        }
        let Some(section) = &section else {
            return Err((line, "entry before the first section header".into()));
        };
        let Some((key, value)) = content.split_once('=') else {
            return Err((line, format!("expected `key = value`, got `{content}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err((line, "empty key or value".into()));
        }
        if entries.iter().any(|e| &e.section == section && e.key == key) {
            return Err((line, format!("duplicate key `{key}` in `[{section}]`")));
        }
        entries.push(Entry {
            section: section.clone(),
            key: key.to_string(),
            value: value.to_string(),
            line,
        });
    }
    Ok(entries)
}

impl SystemSpec {
    /// Reads and parses a spec file; errors carry `path:line`.
    pub fn load(path: &Path) -> Result<SystemSpec, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        SystemSpec::parse_named(&text, &path.display().to_string())
    }

    pub fn parse(text: &str) -> Result<SystemSpec, CliError> {
        SystemSpec::parse_named(text, "<input>")
    }

    fn parse_named(text: &str, path: &str) -> Result<SystemSpec, CliError> {
        let fail = |line: usize, message: String| CliError::Spec {
            path: path.to_string(),
            line,
            message,
        };
        let entries = lex(text).map_err(|(line, m)| fail(line, m))?;
        let get = |section: &str, key: &str| entries.iter().find(|e| e.section == section && e.key == key);
        let last_line = text.lines().count().max(1);

        for e in &entries {
            let known = match e.section.as_str() {
                "manifold" => matches!(e.key.as_str(), "dim" | "coords" | "seed") || e.key.starts_with("domain."),
                "contact" => e.key == "eta",
                "hamiltonian" => e.key == "H",
                "tolerances" => matches!(e.key.as_str(), "samples" | "tol"),
                _ => is_identifier(&e.key),
            };
            if !known {
                return Err(fail(e.line, format!("unknown key `{}` in `[{}]`", e.key, e.section)));
            }
        }

        let dim = get("manifold", "dim")
            .map(|e| {
                e.value
                    .parse::<usize>()
                    .map_err(|_| fail(e.line, format!("dim must be a positive integer, got `{}`", e.value)))
            })
            .transpose()?;
        let coords: Vec<String> = match (get("manifold", "coords"), dim) {
            (Some(e), _) => {
                let names: Vec<String> = e.value.split(',').map(|s| s.trim().to_string()).collect();
                if let Some(d) = dim.filter(|d| *d != names.len()) {
                    return Err(fail(e.line, format!("dim = {d} but {} coordinates are listed", names.len())));
                }
                names
            }
            (None, Some(d)) => {
                let line = get("manifold", "dim").map_or(1, |e| e.line);
                if d < 3 || d.is_multiple_of(2) {
                    return Err(fail(line, format!("dimension must be odd and at least 3, got {d}")));
                }
                Chart::darboux(d / 2)
                    .map_err(|e| fail(line, e.to_string()))?
                    .names()
                    .iter()
                    .map(|s| s.to_string())
                    .collect()
            }
            (None, None) => return Err(fail(last_line, "`[manifold]` needs `dim` or `coords`".into())),
        };
        let coords_line = get("manifold", "coords").or(get("manifold", "dim")).map_or(1, |e| e.line);
        let mut chart = Chart::new(&coords).map_err(|e| fail(coords_line, e.to_string()))?;

        for e in entries.iter().filter(|e| e.section == "manifold") {
            let Some(name) = e.key.strip_prefix("domain.") else { continue };
            let bounds: Vec<&str> = e.value.split(',').collect();
            let [lo, hi] = bounds.as_slice() else {
                return Err(fail(e.line, format!("domain needs `lo, hi`, got `{}`", e.value)));
            };
            let (lo, hi) = (parse_f64(lo).map_err(|m| fail(e.line, m))?, parse_f64(hi).map_err(|m| fail(e.line, m))?);
            chart = chart.with_domain(name, lo, hi).map_err(|err| fail(e.line, err.to_string()))?;
        }
        let seed = match get("manifold", "seed") {
            Some(e) => e
                .value
                .parse::<u64>()
                .map_err(|_| fail(e.line, format!("seed must be a non-negative integer, got `{}`", e.value)))?,
            None => 0,
        };
        let mut sampling = Sampling::default();
        if let Some(e) = get("tolerances", "samples") {
            sampling.samples = e
                .value
                .parse::<usize>()
                .ok()
                .filter(|s| *s > 0)
                .ok_or_else(|| fail(e.line, format!("samples must be a positive integer, got `{}`", e.value)))?;
        }
        if let Some(e) = get("tolerances", "tol") {
            sampling.tol = parse_f64(&e.value)
                .ok()
                .filter(|t| *t > 0.0)
                .ok_or_else(|| fail(e.line, format!("tol must be a positive number, got `{}`", e.value)))?;
        }
        chart = chart.with_seed(seed).with_sampling(sampling);

        let eta = match get("contact", "eta") {
            None => return Err(fail(last_line, "`[contact]` needs `eta`".into())),
            Some(e) if e.value == "standard" => EtaSpec::Standard,
            Some(e) => EtaSpec::Form(KForm::parse_one_form(&chart, &e.value).map_err(|err| fail(e.line, err.to_string()))?),
        };
        let hamiltonian = match get("hamiltonian", "H") {
            None => return Err(fail(last_line, "`[hamiltonian]` needs `H`".into())),
            Some(e) => chart.parse(&e.value).map_err(|err| fail(e.line, err.to_string()))?,
        };
        let mut fields = Vec::new();
        let mut functions = Vec::new();
        for e in &entries {
            match e.section.as_str() {
                "fields" => {
                    let f = parse_field(&chart, &e.value).map_err(|m| fail(e.line, m))?;
                    fields.push((e.key.clone(), f));
                }
                "functions" => {
                    if chart.index_of(&e.key).is_some() {
                        return Err(fail(e.line, format!("function name `{}` shadows a coordinate", e.key)));
                    }
                    let f = chart.parse(&e.value).map_err(|err| fail(e.line, err.to_string()))?;
                    functions.push((e.key.clone(), f));
                }
                _ => {}
            }
        }

        Ok(SystemSpec {
            domain: chart.domain().to_vec(),
            coords,
            seed,
            sampling,
            eta,
            hamiltonian,
            fields,
            functions,
            chart,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// The contact form as a [`KForm`].
    pub fn eta_form(&self) -> KForm {
        match &self.eta {
            EtaSpec::Standard => standard_form(&self.chart),
            EtaSpec::Form(f) => f.clone(),
        }
    }

    pub fn system(&self) -> contactkit::Result<ContactSystem> {
        ContactSystem::new(&self.chart, self.eta_form(), self.hamiltonian.clone())
    }

    /// A named function, `H`, or an inline expression.
    pub fn function(&self, arg: &str) -> Result<Expr, CliError> {
        if let Some((_, f)) = self.functions.iter().find(|(n, _)| n == arg) {
            return Ok(f.clone());
        }
        if arg == "H" && self.chart.index_of("H").is_none() {
            return Ok(self.hamiltonian.clone());
        }
        self.chart.parse(arg).map_err(|source| CliError::Argument {
            argument: arg.to_string(),
            source,
        })
    }

    /// A named field or an inline `X(expr)` / tuple literal.
    pub fn field(&self, sys: &ContactSystem, arg: &str) -> Result<VectorField, CliError> {
        let spec = match self.fields.iter().find(|(n, _)| n == arg) {
            Some((_, f)) => f.clone(),
            None if is_identifier(arg) => {
                return Err(CliError::UnknownName {
                    kind: "field",
                    name: arg.to_string(),
                })
            }
            None => parse_field(&self.chart, arg).map_err(|message| CliError::BadArgument {
                argument: arg.to_string(),
                message,
            })?,
        };
        let field = match spec {
            FieldSpec::Hamiltonian(f) => sys.hamiltonian_field(&f)?,
            FieldSpec::Components(c) => VectorField::new(&self.chart, c)?,
        };
        Ok(field)
    }

    /// Shortest round-trip form of a number.
    fn num(v: f64) -> String {
        format!("{v:?}")
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Hamiltonian(e) => write!(f, "X({e})"),
            FieldSpec::Components(c) => {
                let parts: Vec<String> = c.iter().map(Expr::to_string).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "[manifold]\ndim = {}\ncoords = {}", self.coords.len(), self.coords.join(", "));
        for (name, (lo, hi)) in self.coords.iter().zip(&self.domain) {
            if (*lo, *hi) != Chart::DEFAULT_DOMAIN {
                let _ = writeln!(out, "domain.{name} = {}, {}", SystemSpec::num(*lo), SystemSpec::num(*hi));
            }
        }
        let _ = writeln!(out, "seed = {}\n", self.seed);
        match &self.eta {
            EtaSpec::Standard => out.push_str("[contact]\neta = standard\n\n"),
            EtaSpec::Form(k) => {
                let _ = writeln!(out, "[contact]\neta = {k}\n");
            }
        }
        let _ = writeln!(out, "[hamiltonian]\nH = {}\n", self.hamiltonian);
        if !self.fields.is_empty() {
            out.push_str("[fields]\n");
            for (name, field) in &self.fields {
                let _ = writeln!(out, "{name} = {field}");
            }
            out.push('\n');
        }
        if !self.functions.is_empty() {
            out.push_str("[functions]\n");
            for (name, e) in &self.functions {
                let _ = writeln!(out, "{name} = {e}");
            }
            out.push('\n');
        }
        let _ = write!(
            out,
            "[tolerances]\nsamples = {}\ntol = {}\n",
            self.sampling.samples,
            SystemSpec::num(self.sampling.tol)
        );
        f.write_str(&out)
    }
}
