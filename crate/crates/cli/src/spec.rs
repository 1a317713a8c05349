//! Run files: a `[problem]` and a `[command]` section of `key = value`
//! lines, `#` comments. Values use TOML syntax.

use std::fmt::Write as _;

use slspec_core::model::{EndpointClass, Side};
use slspec_core::oracles::catalog;
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{key}: {message}")]
    Semantic { key: String, message: String },
}

fn semantic(key: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError::Semantic { key: key.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
}

impl ProblemSpec {
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        let mut out = Vec::new();
        if let Some(g) = self.gamma {
            out.push(("gamma", g));
        }
        if let Some(b) = self.beta {
            out.push(("beta", b));
        }
        out
    }

    pub fn catalog(&self) -> slspec_core::Result<slspec_core::Catalog> {
        catalog(&self.name, &self.params())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BcSpec {
    Friedrichs,
    /// Angles at the limit-circle ends; absent at limit-point ends.
    Separated { alpha: Option<f64>, beta: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZPoints {
    List(Vec<(f64, f64)>),
    /// Row-major: real part varies fastest.
    Grid { re: Axis, im: Axis },
}

impl ZPoints {
    pub fn points(&self) -> Vec<(f64, f64)> {
        match self {
            ZPoints::List(v) => v.clone(),
            ZPoints::Grid { re, im } => im.values().into_iter().flat_map(|y| re.values().into_iter().map(move |x| (x, y))).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Classify { endpoint: Side, z: Option<(f64, f64)> },
    Bvals { endpoint: Side },
    Spectrum { bc: BcSpec, window: (f64, f64), panels: Option<usize> },
    Mscan { alpha: f64, beta: Option<f64>, points: ZPoints },
}

impl Command {
    pub fn kind(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Bvals { .. } => "bvals",
            Command::Spectrum { .. } => "spectrum",
            Command::Mscan { .. } => "mscan",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tolerances {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub problem: ProblemSpec,
    pub command: Command,
    pub output: Option<String>,
    pub tolerances: Tolerances,
}

const PROBLEM_KEYS: &[&str] = &["name", "gamma", "beta"];
const COMMON_KEYS: &[&str] = &["kind", "output", "rel_tol", "abs_tol"];

fn command_keys(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "classify" => &["endpoint", "z"],
        "bvals" => &["endpoint"],
        "spectrum" => &["bc", "alpha", "beta", "window", "panels"],
        "mscan" => &["alpha", "beta", "z", "re", "im"],
        _ => return None,
    })
}

pub fn parse_spec(text: &str) -> Result<RunSpec, SpecError> {
    parse_with_overrides::<&str>(text, &[])
}

/// Parse `text`, then apply `section.key=value` overrides before validation.
pub fn parse_with_overrides<S: AsRef<str>>(text: &str, overrides: &[S]) -> Result<RunSpec, SpecError> {
    let mut root: Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e.span().map_or(1, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        SpecError::Syntax { line, message: e.message().trim().to_string() }
    })?;
    for o in overrides {
        apply_override(&mut root, o.as_ref())?;
    }
    from_table(&root)
}

fn apply_override(root: &mut Table, raw: &str) -> Result<(), SpecError> {
    let (path, value) = raw.split_once('=').ok_or_else(|| semantic(raw, "override must look like section.key=value"))?;
    let path = path.trim();
    let (section, key) = path.split_once('.').ok_or_else(|| semantic(path, "override key must be section.key"))?;
    if section != "problem" && section != "command" {
        return Err(semantic(section, "unknown section"));
    }
    // bare words such as `kind=mscan` are taken as strings
    let value = match format!("v = {}", value.trim()).parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => Value::String(value.trim().to_string()),
    };
    let table = root.entry(section).or_insert_with(|| Value::Table(Table::new()));
    let table = table.as_table_mut().ok_or_else(|| semantic(section, "expected a section"))?;
    table.insert(key.to_string(), value);
    Ok(())
}

struct Section<'a> {
    name: &'static str,
    table: &'a Table,
}

impl<'a> Section<'a> {
    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn check_keys(&self, allowed: &[&[&str]], context: &str) -> Result<(), SpecError> {
        for key in self.table.keys() {
            if !allowed.iter().any(|set| set.contains(&key.as_str())) {
                return Err(semantic(self.path(key), format!("unknown key{context}")));
            }
        }
        Ok(())
    }

    fn value(&self, key: &str) -> Option<&'a Value> {
        self.table.get(key)
    }

    fn require<X>(&self, key: &str, v: Option<X>, why: &str) -> Result<X, SpecError> {
        v.ok_or_else(|| semantic(self.path(key), format!("missing ({why})")))
    }

    fn string(&self, key: &str) -> Result<Option<String>, SpecError> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Err(semantic(self.path(key), format!("expected a string, got {}", v.type_str()))),
        }
    }

    fn float(&self, key: &str) -> Result<Option<f64>, SpecError> {
        self.value(key).map(|v| number(v).map_err(|m| semantic(self.path(key), m))).transpose()
    }

    fn count(&self, key: &str) -> Result<Option<usize>, SpecError> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::Integer(n)) if *n >= 0 => Ok(Some(*n as usize)),
            Some(v) => Err(semantic(self.path(key), format!("expected a non-negative integer, got {v}"))),
        }
    }

    fn list(&self, key: &str) -> Result<Option<&'a Vec<Value>>, SpecError> {
        match self.value(key) {
            None => Ok(None),
            Some(Value::Array(a)) => Ok(Some(a)),
            Some(v) => Err(semantic(self.path(key), format!("expected an array, got {}", v.type_str()))),
        }
    }
}

fn number(v: &Value) -> Result<f64, String> {
    let x = match v {
        Value::Float(x) => *x,
        Value::Integer(n) => *n as f64,
        other => return Err(format!("expected a number, got {}", other.type_str())),
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("expected a finite number, got {x}"))
    }
}

fn pair(v: &Value) -> Result<(f64, f64), String> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([a, b]) => Ok((number(a)?, number(b)?)),
        _ => Err(format!("expected [x, y], got {v}")),
    }
}

fn angle(sec: &Section, key: &str) -> Result<Option<f64>, SpecError> {
    let a = sec.float(key)?;
    if let Some(x) = a {
        if !(0.0..std::f64::consts::PI).contains(&x) {
            return Err(semantic(sec.path(key), format!("angle must lie in [0, π), got {x}")));
        }
    }
    Ok(a)
}

fn positive(sec: &Section, key: &str) -> Result<Option<f64>, SpecError> {
    let a = sec.float(key)?;
    if let Some(x) = a {
        if x <= 0.0 {
            return Err(semantic(sec.path(key), format!("must be positive, got {x}")));
        }
    }
    Ok(a)
}

fn side(sec: &Section, key: &str) -> Result<Side, SpecError> {
    match sec.string(key)?.as_deref() {
        Some("left") => Ok(Side::Left),
        Some("right") => Ok(Side::Right),
        Some(other) => Err(semantic(sec.path(key), format!("expected \"left\" or \"right\", got \"{other}\""))),
        None => Err(semantic(sec.path(key), "missing (\"left\" or \"right\")")),
    }
}

fn axis(sec: &Section, key: &str) -> Result<Option<Axis>, SpecError> {
    let Some(items) = sec.list(key)? else { return Ok(None) };
    let bad = || semantic(sec.path(key), "expected [start, stop, count]");
    let [s, e, n] = items.as_slice() else { return Err(bad()) };
    let (start, stop) = (number(s).map_err(|_| bad())?, number(e).map_err(|_| bad())?);
    let count = match n {
        Value::Integer(n) if *n >= 1 => *n as usize,
        _ => return Err(semantic(sec.path(key), "count must be a positive integer")),
    };
    Ok(Some(Axis { start, stop, count }))
}

fn section<'a>(root: &'a Table, name: &'static str) -> Result<Section<'a>, SpecError> {
    match root.get(name) {
        Some(Value::Table(t)) => Ok(Section { name, table: t }),
        Some(_) => Err(semantic(name, "expected a section")),
        None => Err(semantic(name, "missing section")),
    }
}

fn from_table(root: &Table) -> Result<RunSpec, SpecError> {
    for key in root.keys() {
        if key != "problem" && key != "command" {
            return Err(semantic(key.clone(), "unknown key (expected sections [problem] and [command])"));
        }
    }
    let p = section(root, "problem")?;
    p.check_keys(&[PROBLEM_KEYS], "")?;
    let name = p.string("name")?.ok_or_else(|| semantic("problem.name", "missing"))?;
    let problem = ProblemSpec { name, gamma: p.float("gamma")?, beta: p.float("beta")? };
    let cp = problem.catalog().map_err(|e| {
        let key = match problem.name.as_str() {
            "bessel" | "laguerre" | "legendre" | "regular_free" => {
                ["gamma", "beta"].into_iter().find(|k| msg_mentions(&e, k)).map_or("problem".into(), |k| p.path(k))
            }
            _ => p.path("name"),
        };
        semantic(key, e.to_string())
    })?;

    let c = section(root, "command")?;
    let kind = c.string("kind")?.ok_or_else(|| semantic("command.kind", "missing"))?;
    let keys = command_keys(&kind)
        .ok_or_else(|| semantic("command.kind", format!("unknown kind \"{kind}\" (classify, bvals, spectrum, mscan)")))?;
    c.check_keys(&[COMMON_KEYS, keys], &format!(" for kind = \"{kind}\""))?;
    let output = c.string("output")?;
    if output.as_deref() == Some("") {
        return Err(semantic("command.output", "empty path"));
    }
    let tolerances = Tolerances { rel_tol: positive(&c, "rel_tol")?, abs_tol: positive(&c, "abs_tol")? };
    let lc = |s: Side| cp.class(s) == EndpointClass::LimitCircle;
    let needs_left_lc = || {
        if lc(Side::Left) {
            Ok(())
        } else {
            Err(semantic(
                "problem",
                format!("{kind} needs a limit-circle left endpoint; {} is limit point there", problem.name),
            ))
        }
    };

    let command = match kind.as_str() {
        "classify" => {
            let z = c.value("z").map(|v| pair(v).map_err(|m| semantic("command.z", m))).transpose()?;
            Command::Classify { endpoint: side(&c, "endpoint")?, z }
        }
        "bvals" => {
            let endpoint = side(&c, "endpoint")?;
            if !lc(endpoint) {
                return Err(semantic("command.endpoint", "boundary values need a limit-circle endpoint"));
            }
            Command::Bvals { endpoint }
        }
        "spectrum" => {
            needs_left_lc()?;
            let bc = match c.string("bc")?.as_deref() {
                Some("friedrichs") => {
                    for k in ["alpha", "beta"] {
                        if c.value(k).is_some() {
                            return Err(semantic(c.path(k), "not used with bc = \"friedrichs\""));
                        }
                    }
                    BcSpec::Friedrichs
                }
                Some("separated") => {
                    let alpha = Some(c.require("alpha", angle(&c, "alpha")?, "left endpoint is limit circle")?);
                    let beta = if lc(Side::Right) {
                        Some(c.require("beta", angle(&c, "beta")?, "right endpoint is limit circle")?)
                    } else if c.value("beta").is_some() {
                        return Err(semantic("command.beta", "right endpoint is limit point; no condition is imposed there"));
                    } else {
                        None
                    };
                    BcSpec::Separated { alpha, beta }
                }
                Some(other) => return Err(semantic("command.bc", format!("expected \"friedrichs\" or \"separated\", got \"{other}\""))),
                None => return Err(semantic("command.bc", "missing (\"friedrichs\" or \"separated\")")),
            };
            let window = c.require("window", c.value("window"), "required for kind = \"spectrum\"")?;
            let window = pair(window).map_err(|m| semantic("command.window", m))?;
            if window.0 >= window.1 {
                return Err(semantic("command.window", format!("need lo < hi, got {window:?}")));
            }
            let panels = c.count("panels")?;
            if matches!(panels, Some(n) if n < 2) {
                return Err(semantic("command.panels", "need at least 2 panels"));
            }
            Command::Spectrum { bc, window, panels }
        }
        _ => {
            needs_left_lc()?;
            let alpha = angle(&c, "alpha")?.unwrap_or(0.0);
            let beta = angle(&c, "beta")?;
            if beta.is_some() && !lc(Side::Right) {
                return Err(semantic("command.beta", "right endpoint is limit point; no condition is imposed there"));
            }
            let points = match (c.list("z")?, axis(&c, "re")?, axis(&c, "im")?) {
                (Some(list), None, None) => {
                    if list.is_empty() {
                        return Err(semantic("command.z", "empty list"));
                    }
                    let pts = list.iter().map(pair).collect::<Result<Vec<_>, _>>().map_err(|m| semantic("command.z", m))?;
                    ZPoints::List(pts)
                }
                (None, Some(re), Some(im)) => ZPoints::Grid { re, im },
                (Some(_), _, _) => return Err(semantic("command.z", "give either z or the re/im grid, not both")),
                (None, None, _) => return Err(semantic("command.re", "missing (give z or both re and im)")),
                (None, _, None) => return Err(semantic("command.im", "missing (give z or both re and im)")),
            };
            Command::Mscan { alpha, beta, points }
        }
    };
    Ok(RunSpec { problem, command, output, tolerances })
}

fn msg_mentions(e: &slspec_core::Error, key: &str) -> bool {
    e.to_string().contains(key)
}

fn line(out: &mut String, key: &str, v: Value) {
    let _ = writeln!(out, "{key} = {v}");
}

fn arr(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::Float(x)).collect())
}

fn axis_value(a: &Axis) -> Value {
    Value::Array(vec![Value::Float(a.start), Value::Float(a.stop), Value::Integer(a.count as i64)])
}

/// Canonical text for `spec`; `parse_spec(&render(s)) == Ok(s)`.
pub fn render(spec: &RunSpec) -> String {
    let mut out = String::from("[problem]\n");
    line(&mut out, "name", Value::String(spec.problem.name.clone()));
    if let Some(g) = spec.problem.gamma {
        line(&mut out, "gamma", Value::Float(g));
    }
    if let Some(b) = spec.problem.beta {
        line(&mut out, "beta", Value::Float(b));
    }
    out.push_str("\n[command]\n");
    line(&mut out, "kind", Value::String(spec.command.kind().into()));
    let side = |s: Side| Value::String(s.to_string());
    match &spec.command {
        Command::Classify { endpoint, z } => {
            line(&mut out, "endpoint", side(*endpoint));
            if let Some((x, y)) = z {
                line(&mut out, "z", arr(&[*x, *y]));
            }
        }
        Command::Bvals { endpoint } => line(&mut out, "endpoint", side(*endpoint)),
        Command::Spectrum { bc, window, panels } => {
            match bc {
                BcSpec::Friedrichs => line(&mut out, "bc", Value::String("friedrichs".into())),
                BcSpec::Separated { alpha, beta } => {
                    line(&mut out, "bc", Value::String("separated".into()));
                    for (k, v) in [("alpha", alpha), ("beta", beta)] {
                        if let Some(v) = v {
                            line(&mut out, k, Value::Float(*v));
                        }
                    }
                }
            }
            line(&mut out, "window", arr(&[window.0, window.1]));
            if let Some(n) = panels {
                line(&mut out, "panels", Value::Integer(*n as i64));
            }
        }
        Command::Mscan { alpha, beta, points } => {
            line(&mut out, "alpha", Value::Float(*alpha));
            if let Some(b) = beta {
                line(&mut out, "beta", Value::Float(*b));
            }
            match points {
                ZPoints::List(pts) => line(&mut out, "z", Value::Array(pts.iter().map(|(x, y)| arr(&[*x, *y])).collect())),
                ZPoints::Grid { re, im } => {
                    line(&mut out, "re", axis_value(re));
                    line(&mut out, "im", axis_value(im));
                }
            }
        }
    }
    if let Some(o) = &spec.output {
        line(&mut out, "output", Value::String(o.clone()));
    }
    if let Some(t) = spec.tolerances.rel_tol {
        line(&mut out, "rel_tol", Value::Float(t));
    }
    if let Some(t) = spec.tolerances.abs_tol {
        line(&mut out, "abs_tol", Value::Float(t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const LEGENDRE: &str = "[problem]\nname=\"legendre\"\n[command]\nkind=\"spectrum\"\nbc=\"friedrichs\"\nwindow=[-0.5,25]";

    fn key_of(e: SpecError) -> String {
        match e {
            SpecError::Semantic { key, .. } => key,
            other => panic!("expected a semantic error, got {other:?}"),
        }
    }

    #[test]
    fn legendre_spectrum_run() {
        let s = parse_spec(LEGENDRE).unwrap();
        assert_eq!(s.problem.name, "legendre");
        assert_eq!(s.command, Command::Spectrum { bc: BcSpec::Friedrichs, window: (-0.5, 25.0), panels: None });
    }

    #[test]
    fn missing_window_names_window() {
        let text = LEGENDRE.replace("window=[-0.5,25]", "");
        let e = parse_spec(&text).unwrap_err();
        assert!(e.to_string().contains("window"), "{e}");
        assert_eq!(key_of(e), "command.window");
    }

    #[test]
    fn laguerre_beta_out_of_range() {
        let e = parse_spec("[problem]\nname=\"laguerre\"\nbeta=2.5\n[command]\nkind=\"classify\"\nendpoint=\"left\"").unwrap_err();
        assert!(e.to_string().contains("(0, 2)"), "{e}");
        assert_eq!(key_of(e), "problem.beta");
    }

    #[test]
    fn unknown_keys_are_errors() {
        let e = parse_spec(&format!("{LEGENDRE}\nwidow = 3")).unwrap_err();
        assert_eq!(key_of(e), "command.widow");
        let e = parse_spec(&LEGENDRE.replace("[command]", "colour = 1\n[command]")).unwrap_err();
        assert_eq!(key_of(e), "problem.colour");
        // valid for another kind only
        let e = parse_spec(&format!("{LEGENDRE}\nendpoint = \"left\"")).unwrap_err();
        assert_eq!(key_of(e), "command.endpoint");
        let e = parse_spec(&format!("top = 1\n{LEGENDRE}")).unwrap_err();
        assert_eq!(key_of(e), "top");
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = "# comment\n[problem]\nname = \"legendre\"\nthis is not valid\n";
        match parse_spec(text).unwrap_err() {
            SpecError::Syntax { line, .. } => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comments_are_ignored() {
        let text = format!("# run file\n{LEGENDRE}  # window\n# trailing\n");
        assert_eq!(parse_spec(&text).unwrap(), parse_spec(LEGENDRE).unwrap());
    }

    #[test]
    fn overrides_replace_values() {
        let s = parse_with_overrides(LEGENDRE, &["command.window=[1, 7]", "command.panels = 50"]).unwrap();
        assert_eq!(s.command, Command::Spectrum { bc: BcSpec::Friedrichs, window: (1.0, 7.0), panels: Some(50) });
        let s = parse_with_overrides(LEGENDRE, &["command.kind=mscan", "command.z=[[0,1]]", "command.bc=x"]);
        assert_eq!(key_of(s.unwrap_err()), "command.bc");
        assert_eq!(key_of(parse_with_overrides(LEGENDRE, &["window"]).unwrap_err()), "window");
    }

    #[test]
    fn class_dependent_checks() {
        let bessel = "[problem]\nname=\"bessel\"\ngamma=0.5\n[command]\n";
        let e = parse_spec(&format!("{bessel}kind=\"bvals\"\nendpoint=\"right\"")).unwrap_err();
        assert_eq!(key_of(e), "command.endpoint");
        let e = parse_spec(&format!("{bessel}kind=\"mscan\"\nbeta=0.1\nz=[[0,1]]")).unwrap_err();
        assert_eq!(key_of(e), "command.beta");
        let e = parse_spec(&format!("{bessel}kind=\"spectrum\"\nbc=\"separated\"\nwindow=[0,1]")).unwrap_err();
        assert_eq!(key_of(e), "command.alpha");
        let e = parse_spec("[problem]\nname=\"bessel\"\ngamma=1.3\n[command]\nkind=\"mscan\"\nz=[[0,1]]").unwrap_err();
        assert_eq!(key_of(e), "problem");
    }

    #[test]
    fn grid_points_are_row_major() {
        let g = ZPoints::Grid { re: Axis { start: 0.0, stop: 1.0, count: 2 }, im: Axis { start: 1.0, stop: 2.0, count: 2 } };
        assert_eq!(g.points(), vec![(0.0, 1.0), (1.0, 1.0), (0.0, 2.0), (1.0, 2.0)]);
    }
}
