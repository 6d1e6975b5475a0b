//! Sectioned `key = value` problem files.
//!
//! ```text
//! [domain]
//! shape = box            # box | ball
//! n = 2
//! points_per_axis = 17
//!
//! [equation]
//! k = 2
//! metric = identity      # identity | scaled:c | diagonal:a,b,.. | conformal:c
//! chi = zero             # zero | scaled:c | diagonal:a,b,..
//! psi = constant:1       # constant:c | manufactured:<function>
//! subsolution = quadratic
//! boundary = quadratic   # optional, defaults to the subsolution's trace
//! exact = quadratic      # optional reference solution
//!
//! [solver]
//! newton_tol = 1e-9
//!
//! [output]
//! dir = out
//! format = csv           # csv | binary
//! ```
//!
//! `n`, `k`, `psi` and `subsolution` are required; everything else has a
//! default. Parsing reports every problem found, each with its line.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use khessian::catalog::{AnalyticFn, CatalogError, DensitySpec, FormSpec, MetricSpec, ProblemSpec};
use khessian::geometry::{DomainSpec, Shape};
use khessian::solver::SolverConfig;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldFormat {
    Csv,
    Binary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: FieldFormat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemConfig {
    pub problem: ProblemSpec,
    pub solver: SolverConfig,
    pub output: OutputConfig,
}

const DEFAULT_POINTS: usize = 17;

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Int,
    Real,
    Text,
}

const KEYS: &[(&str, &str, Kind)] = &[
    ("domain", "shape", Kind::Text),
    ("domain", "n", Kind::Int),
    ("domain", "points_per_axis", Kind::Int),
    ("equation", "k", Kind::Int),
    ("equation", "metric", Kind::Text),
    ("equation", "chi", Kind::Text),
    ("equation", "psi", Kind::Text),
    ("equation", "subsolution", Kind::Text),
    ("equation", "boundary", Kind::Text),
    ("equation", "exact", Kind::Text),
    ("solver", "newton_tol", Kind::Real),
    ("solver", "max_newton_iters", Kind::Int),
    ("solver", "backtrack_factor", Kind::Real),
    ("solver", "min_step", Kind::Real),
    ("solver", "continuity_dt0", Kind::Real),
    ("solver", "dt_min", Kind::Real),
    ("solver", "dt_growth", Kind::Real),
    ("solver", "linear_tol", Kind::Real),
    ("solver", "linear_max_iters", Kind::Int),
    ("solver", "dense_limit", Kind::Int),
    ("solver", "subsolution_tol", Kind::Real),
    ("output", "dir", Kind::Text),
    ("output", "format", Kind::Text),
];

const REQUIRED: &[(&str, &str)] = &[("domain", "n"), ("equation", "k"), ("equation", "psi"), ("equation", "subsolution")];

struct Entry {
    value: String,
    line: usize,
}

struct Parsed {
    entries: HashMap<(String, String), Entry>,
    errors: Vec<ConfigError>,
}

impl Parsed {
    fn error(&mut self, line: Option<usize>, message: impl Into<String>) {
        self.errors.push(ConfigError { line, message: message.into() });
    }

    fn raw(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn int(&mut self, section: &str, key: &str) -> Option<usize> {
        let e = self.raw(section, key)?;
        let (value, line) = (e.value.clone(), e.line);
        match value.parse::<usize>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.error(Some(line), format!("`{key}` expects a non-negative integer, got `{value}`"));
                None
            }
        }
    }

    fn real(&mut self, section: &str, key: &str) -> Option<f64> {
        let e = self.raw(section, key)?;
        let (value, line) = (e.value.clone(), e.line);
        match value.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                self.error(Some(line), format!("`{key}` expects a real number, got `{value}`"));
                None
            }
        }
    }

    fn catalog<T>(&mut self, section: &str, key: &str, parse: impl Fn(&str) -> Result<T, CatalogError>) -> Option<T> {
        let e = self.raw(section, key)?;
        let (value, line) = (e.value.clone(), e.line);
        match parse(&value) {
            Ok(v) => Some(v),
            Err(err) => {
                self.error(Some(line), format!("`{key}`: {err}"));
                None
            }
        }
    }

    fn line(&self, section: &str, key: &str) -> Option<usize> {
        self.raw(section, key).map(|e| e.line)
    }
}

fn scan(text: &str) -> Parsed {
    let mut parsed = Parsed { entries: HashMap::new(), errors: Vec::new() };
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if KEYS.iter().any(|(s, _, _)| *s == name) {
                section = Some(name.to_string());
            } else {
                parsed.error(Some(line), format!("unknown section `[{name}]`"));
                section = None;
            }
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            parsed.error(Some(line), format!("expected `key = value`, got `{content}`"));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(sec) = section.clone() else {
            parsed.error(Some(line), format!("key `{key}` outside a known section"));
            continue;
        };
        if !KEYS.iter().any(|(s, k, _)| *s == sec && *k == key) {
            parsed.error(Some(line), format!("unknown key `{key}` in [{sec}]"));
            continue;
        }
        if value.is_empty() {
            parsed.error(Some(line), format!("`{key}` has no value"));
            continue;
        }
        let slot = (sec.clone(), key.to_string());
        if let Some(first) = parsed.entries.get(&slot) {
            let first = first.line;
            parsed.error(Some(line), format!("duplicate key `{key}` in [{sec}] on lines {first} and {line}"));
            continue;
        }
        parsed.entries.insert(slot, Entry { value: value.to_string(), line });
    }
    parsed
}

/// Parses and validates a problem file, returning every error found.
pub fn parse_config(text: &str) -> Result<ProblemConfig, Vec<ConfigError>> {
    let mut p = scan(text);
    for (sec, key) in REQUIRED {
        if p.raw(sec, key).is_none() {
            p.error(None, format!("missing required key `{key}` in [{sec}]"));
        }
    }

    let shape = match p.raw("domain", "shape").map(|e| (e.value.clone(), e.line)) {
        None => Some(Shape::Box),
        Some((v, _)) if v == "box" => Some(Shape::Box),
        Some((v, _)) if v == "ball" => Some(Shape::Ball),
        Some((v, line)) => {
            p.error(Some(line), format!("`shape` must be `box` or `ball`, got `{v}`"));
            None
        }
    };
    let n = p.int("domain", "n");
    let points = if p.raw("domain", "points_per_axis").is_some() { p.int("domain", "points_per_axis") } else { Some(DEFAULT_POINTS) };
    let domain = match (n, shape, points) {
        (Some(n), Some(shape), Some(m)) => match DomainSpec::new(n, shape, m) {
            Ok(d) => Some(d),
            Err(e) => {
                let line = p.line("domain", "points_per_axis").or(p.line("domain", "n"));
                p.error(line, e.to_string());
                None
            }
        },
        _ => None,
    };

    let k = p.int("equation", "k");
    if let (Some(k), Some(n)) = (k, n) {
        if k > n {
            p.error(p.line("equation", "k"), format!("k exceeds n ({k} > {n})"));
        } else if k == 0 {
            p.error(p.line("equation", "k"), "k must be at least 1");
        }
    }
    let metric = if p.raw("equation", "metric").is_some() { p.catalog("equation", "metric", MetricSpec::parse) } else { Some(MetricSpec::Identity) };
    let chi = if p.raw("equation", "chi").is_some() { p.catalog("equation", "chi", FormSpec::parse) } else { Some(FormSpec::Zero) };
    if let (Some(n), Some(m)) = (n, &metric) {
        if !m.fits(n) {
            p.error(p.line("equation", "metric"), format!("metric diagonal needs {n} entries"));
        }
    }
    if let (Some(n), Some(c)) = (n, &chi) {
        if !c.fits(n) {
            p.error(p.line("equation", "chi"), format!("chi diagonal needs {n} entries"));
        }
    }
    let psi = p.catalog("equation", "psi", DensitySpec::parse);
    let subsolution = p.catalog("equation", "subsolution", AnalyticFn::parse);
    let boundary = p.raw("equation", "boundary").is_some().then(|| p.catalog("equation", "boundary", AnalyticFn::parse));
    let exact = p.raw("equation", "exact").is_some().then(|| p.catalog("equation", "exact", AnalyticFn::parse));

    let mut solver = SolverConfig::default();
    for (key, slot) in [
        ("newton_tol", &mut solver.newton_tol),
        ("backtrack_factor", &mut solver.backtrack_factor),
        ("min_step", &mut solver.min_step),
        ("continuity_dt0", &mut solver.continuity_dt0),
        ("dt_min", &mut solver.dt_min),
        ("dt_growth", &mut solver.dt_growth),
        ("linear_tol", &mut solver.linear_tol),
        ("subsolution_tol", &mut solver.subsolution_tol),
    ] {
        if let Some(v) = p.real("solver", key) {
            *slot = v;
        }
    }
    for (key, slot) in [
        ("max_newton_iters", &mut solver.max_newton_iters),
        ("linear_max_iters", &mut solver.linear_max_iters),
        ("dense_limit", &mut solver.dense_limit),
    ] {
        if let Some(v) = p.int("solver", key) {
            *slot = v;
        }
    }
    if let Err(e) = solver.validate() {
        let first = KEYS.iter().filter(|(s, _, _)| *s == "solver").find_map(|(_, k, _)| p.line("solver", k));
        p.error(first, e.to_string());
    }

    let dir = p.raw("output", "dir").map_or_else(|| PathBuf::from("out"), |e| PathBuf::from(&e.value));
    let format = match p.raw("output", "format").map(|e| (e.value.clone(), e.line)) {
        None => Some(FieldFormat::Csv),
        Some((v, _)) if v == "csv" => Some(FieldFormat::Csv),
        Some((v, _)) if v == "binary" => Some(FieldFormat::Binary),
        Some((v, line)) => {
            p.error(Some(line), format!("`format` must be `csv` or `binary`, got `{v}`"));
            None
        }
    };

    if !p.errors.is_empty() {
        p.errors.sort_by_key(|e| e.line.unwrap_or(usize::MAX));
        return Err(p.errors);
    }
    // every component is present once no error was recorded
    Ok(ProblemConfig {
        problem: ProblemSpec {
            domain: domain.unwrap(),
            k: k.unwrap(),
            metric: metric.unwrap(),
            chi: chi.unwrap(),
            psi: psi.unwrap(),
            subsolution: subsolution.unwrap(),
            boundary: boundary.flatten(),
            exact: exact.flatten(),
        },
        solver,
        output: OutputConfig { dir, format: format.unwrap() },
    })
}

impl ProblemConfig {
    /// Config text that parses back to `self`.
    pub fn to_text(&self) -> String {
        let p = &self.problem;
        let s = &self.solver;
        let shape = match p.domain.shape {
            Shape::Box => "box",
            Shape::Ball => "ball",
        };
        let mut out = format!(
            "[domain]\nshape = {shape}\nn = {}\npoints_per_axis = {}\n\n[equation]\nk = {}\nmetric = {}\nchi = {}\npsi = {}\nsubsolution = {}\n",
            p.domain.n, p.domain.points_per_axis, p.k, p.metric, p.chi, p.psi, p.subsolution
        );
        if let Some(b) = &p.boundary {
            out += &format!("boundary = {b}\n");
        }
        if let Some(e) = &p.exact {
            out += &format!("exact = {e}\n");
        }
        out += &format!(
            "\n[solver]\nnewton_tol = {}\nmax_newton_iters = {}\nbacktrack_factor = {}\nmin_step = {}\ncontinuity_dt0 = {}\ndt_min = {}\ndt_growth = {}\nlinear_tol = {}\nlinear_max_iters = {}\ndense_limit = {}\nsubsolution_tol = {}\n",
            s.newton_tol, s.max_newton_iters, s.backtrack_factor, s.min_step, s.continuity_dt0, s.dt_min, s.dt_growth,
            s.linear_tol, s.linear_max_iters, s.dense_limit, s.subsolution_tol
        );
        let format = match self.output.format {
            FieldFormat::Csv => "csv",
            FieldFormat::Binary => "binary",
        };
        out += &format!("\n[output]\ndir = {}\nformat = {format}\n", self.output.dir.display());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[domain]\nn = 2\n[equation]\nk = 2\npsi = constant:1\nsubsolution = quadratic\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.problem.domain, DomainSpec::new(2, Shape::Box, DEFAULT_POINTS).unwrap());
        assert_eq!(c.problem.metric, MetricSpec::Identity);
        assert_eq!(c.problem.chi, FormSpec::Zero);
        assert_eq!(c.problem.boundary, None);
        assert_eq!(c.solver, SolverConfig::default());
        assert_eq!(c.output, OutputConfig { dir: PathBuf::from("out"), format: FieldFormat::Csv });
    }

    #[test]
    fn round_trips() {
        let text = "[domain]\nshape = ball\nn = 3\npoints_per_axis = 9\n[equation]\nk = 2\nmetric = diagonal:1,2,0.5\n\
                    chi = scaled:0.25\npsi = manufactured:quartic_blend:0.1\nsubsolution = quartic_blend:0.1\n\
                    exact = quartic_blend:0.1\n[solver]\nnewton_tol = 1e-10\ndt_min = 0.001\n[output]\ndir = /tmp/x\nformat = binary\n";
        let c = parse_config(text).unwrap();
        assert_eq!(parse_config(&c.to_text()).unwrap(), c);
        assert_eq!(c.solver.newton_tol, 1e-10);
    }

    #[test]
    fn k_exceeds_n() {
        let errs = parse_config("[domain]\nn = 2\n[equation]\nk = 4\npsi = constant:1\nsubsolution = quadratic\n").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, Some(4));
        assert!(errs[0].message.contains("k exceeds n"));
    }

    #[test]
    fn duplicate_names_both_lines() {
        let errs = parse_config(&format!("{MINIMAL}[domain]\nn = 3\n")).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].to_string().contains("lines 2 and 8"), "{}", errs[0]);
    }

    #[test]
    fn collects_every_error() {
        let text = "[domain]\nn = two\nwidth = 3\n[equation]\nk = 1\npsi = bogus\n[extra]\nfoo = 1\n[solver]\nnewton_tol = abc\n";
        let errs = parse_config(text).unwrap_err();
        let msgs: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        let want = [
            "line 2: `n` expects a non-negative integer",
            "line 3: unknown key `width`",
            "line 6: `psi`: unknown catalog entry",
            "line 7: unknown section `[extra]`",
            "line 8: key `foo` outside a known section",
            "line 10: `newton_tol` expects a real number",
            "missing required key `subsolution`",
        ];
        for w in want {
            assert!(msgs.iter().any(|m| m.starts_with(w)), "missing {w:?} in {msgs:#?}");
        }
    }

    #[test]
    fn domain_and_solver_validation() {
        let errs = parse_config(&format!("{MINIMAL}[solver]\nnewton_tol = 5\n")).unwrap_err();
        assert!(errs[0].message.contains("newton_tol"));
        let errs = parse_config(&MINIMAL.replace("n = 2", "n = 2\npoints_per_axis = 8")).unwrap_err();
        assert!(errs[0].message.contains("odd"));
        let errs = parse_config(&MINIMAL.replace("k = 2", "k = 2\nmetric = diagonal:1")).unwrap_err();
        assert!(errs[0].message.contains("2 entries"));
    }
}
