//! Key–value run configuration.
//!
//! The format is line-oriented:
//!
//! ```text
//! # comment
//! task = solve
//! domain = { kind = interval, a = -0.5, b = 0.5 }
//! s = 0.5
//! points = 0.1; 0.2 0.3
//! ```
//!
//! One `key = value` pair per line; `#` starts a comment; blank lines are
//! skipped. Record values are brace-delimited with comma-separated inner
//! `key = value` fields. Point lists separate points with `;` and
//! coordinates with whitespace.
//!
//! Parsing never stops at the first problem: every violation (syntax,
//! duplicate keys, unknown keys, out-of-range values) is collected with its
//! line number, and the caller reports the whole list at once.

use censored::domain::Domain;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// One raw `key = value` occurrence.
#[derive(Debug, Clone)]
struct RawEntry {
    value: String,
    line: usize,
}

/// Parsed config text: raw entries plus accumulated violations. Typed
/// accessors consume entries; whatever is left at `finish` is an unknown key.
#[derive(Debug)]
pub struct Config {
    entries: BTreeMap<String, RawEntry>,
    violations: Vec<String>,
    /// Effective values (defaults included) for the output header echo.
    echo: BTreeMap<String, String>,
}

/// Format a float the way all output rows do: shortest round-trip form.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

impl Config {
    /// Lexical parse. Duplicate keys and malformed lines are recorded as
    /// violations; the last occurrence of a duplicate key is kept so that
    /// later typed checks can still run and report more problems.
    pub fn parse(text: &str) -> Config {
        let mut entries: BTreeMap<String, RawEntry> = BTreeMap::new();
        let mut violations = Vec::new();
        let mut seen_lines: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some(eq) = line.find('=') else {
                violations.push(format!(
                    "line {line_no}: expected `key = value`, got `{line}`"
                ));
                continue;
            };
            let key = line[..eq].trim();
            let value = line[eq + 1..].trim();
            if key.is_empty() {
                violations.push(format!("line {line_no}: missing key before `=`"));
                continue;
            }
            if !key
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                violations.push(format!(
                    "line {line_no}: key `{key}` may only contain letters, digits and `_`"
                ));
                continue;
            }
            if value.is_empty() {
                violations.push(format!("line {line_no}: key `{key}` has no value"));
                continue;
            }
            seen_lines.entry(key.to_string()).or_default().push(line_no);
            entries.insert(
                key.to_string(),
                RawEntry {
                    value: value.to_string(),
                    line: line_no,
                },
            );
        }
        for (key, lines) in &seen_lines {
            if lines.len() > 1 {
                let mut msg = format!("duplicate key `{key}` on lines ");
                for (i, l) in lines.iter().enumerate() {
                    if i > 0 {
                        msg.push_str(if i + 1 == lines.len() { " and " } else { ", " });
                    }
                    let _ = write!(msg, "{l}");
                }
                violations.push(msg);
            }
        }
        Config {
            entries,
            violations,
            echo: BTreeMap::new(),
        }
    }

    pub fn violation(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }

    fn take(&mut self, key: &str) -> Option<RawEntry> {
        self.entries.remove(key)
    }

    fn echo_value(&mut self, key: &str, value: impl Into<String>) {
        self.echo.insert(key.to_string(), value.into());
    }

    /// Optional string key with a default.
    pub fn str_or(&mut self, key: &str, default: &str) -> String {
        match self.take(key) {
            Some(e) => {
                self.echo_value(key, e.value.clone());
                e.value
            }
            None => {
                self.echo_value(key, default);
                default.to_string()
            }
        }
    }

    /// Optional string key without a default; echoes `none` when absent.
    pub fn str_opt(&mut self, key: &str) -> Option<String> {
        match self.take(key) {
            Some(e) => {
                self.echo_value(key, e.value.clone());
                Some(e.value)
            }
            None => {
                self.echo_value(key, "none");
                None
            }
        }
    }

    /// Float with a default and a named validity check.
    pub fn f64_or(
        &mut self,
        key: &str,
        default: f64,
        check: impl Fn(f64) -> Result<(), String>,
    ) -> f64 {
        let (value, line) = match self.take(key) {
            Some(e) => match e.value.parse::<f64>() {
                Ok(v) => (v, Some(e.line)),
                Err(_) => {
                    self.violations.push(format!(
                        "line {}: `{key} = {}` is not a number",
                        e.line, e.value
                    ));
                    self.echo_value(key, fmt_f64(default));
                    return default;
                }
            },
            None => (default, None),
        };
        if let Err(why) = check(value) {
            let at = line.map_or(String::new(), |l| format!("line {l}: "));
            self.violations.push(format!("{at}`{key}`: {why}"));
        }
        self.echo_value(key, fmt_f64(value));
        value
    }

    /// Optional float (echoes `auto` when absent), validated when present.
    pub fn f64_opt(
        &mut self,
        key: &str,
        check: impl Fn(f64) -> Result<(), String>,
    ) -> Option<f64> {
        match self.take(key) {
            Some(e) => match e.value.parse::<f64>() {
                Ok(v) => {
                    if let Err(why) = check(v) {
                        self.violations
                            .push(format!("line {}: `{key}`: {why}", e.line));
                    }
                    self.echo_value(key, fmt_f64(v));
                    Some(v)
                }
                Err(_) => {
                    self.violations.push(format!(
                        "line {}: `{key} = {}` is not a number",
                        e.line, e.value
                    ));
                    self.echo_value(key, "auto");
                    None
                }
            },
            None => {
                self.echo_value(key, "auto");
                None
            }
        }
    }

    /// Unsigned integer with a default and a named validity check.
    pub fn usize_or(
        &mut self,
        key: &str,
        default: usize,
        check: impl Fn(usize) -> Result<(), String>,
    ) -> usize {
        let (value, line) = match self.take(key) {
            Some(e) => match e.value.parse::<usize>() {
                Ok(v) => (v, Some(e.line)),
                Err(_) => {
                    self.violations.push(format!(
                        "line {}: `{key} = {}` is not a nonnegative integer",
                        e.line, e.value
                    ));
                    self.echo_value(key, default.to_string());
                    return default;
                }
            },
            None => (default, None),
        };
        if let Err(why) = check(value) {
            let at = line.map_or(String::new(), |l| format!("line {l}: "));
            self.violations.push(format!("{at}`{key}`: {why}"));
        }
        self.echo_value(key, value.to_string());
        value
    }

    /// u64 key (seeds).
    pub fn u64_or(&mut self, key: &str, default: u64) -> u64 {
        match self.take(key) {
            Some(e) => match e.value.parse::<u64>() {
                Ok(v) => {
                    self.echo_value(key, v.to_string());
                    v
                }
                Err(_) => {
                    self.violations.push(format!(
                        "line {}: `{key} = {}` is not a nonnegative integer",
                        e.line, e.value
                    ));
                    self.echo_value(key, default.to_string());
                    default
                }
            },
            None => {
                self.echo_value(key, default.to_string());
                default
            }
        }
    }

    /// The kernel exponent `s`, constrained to (0, 1).
    pub fn s_key(&mut self, default: f64) -> f64 {
        self.f64_or("s", default, |v| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(format!("s must lie in the open interval (0, 1), got {v}"))
            }
        })
    }

    /// Required domain record `{ kind = ..., ... }`.
    pub fn domain_key(&mut self) -> Option<Domain> {
        let Some(e) = self.take("domain") else {
            self.violations.push("missing required key `domain`".into());
            return None;
        };
        match parse_domain(&e.value) {
            Ok(d) => {
                self.echo_value("domain", domain_echo(&d));
                Some(d)
            }
            Err(why) => {
                self.violations
                    .push(format!("line {}: `domain`: {why}", e.line));
                None
            }
        }
    }

    /// Required point list `x1 x2; y1 y2; ...` with a fixed dimension.
    pub fn points_key(&mut self, key: &str, dim: usize) -> Option<Vec<Vec<f64>>> {
        let Some(e) = self.take(key) else {
            self.violations.push(format!("missing required key `{key}`"));
            return None;
        };
        match parse_points(&e.value, dim) {
            Ok(pts) => {
                self.echo_value(key, points_echo(&pts));
                Some(pts)
            }
            Err(why) => {
                self.violations
                    .push(format!("line {}: `{key}`: {why}", e.line));
                None
            }
        }
    }

    /// Space-separated float list with a default.
    pub fn f64_list_or(&mut self, key: &str, default: &[f64]) -> Vec<f64> {
        match self.take(key) {
            Some(e) => match parse_f64_list(&e.value) {
                Ok(v) if !v.is_empty() => {
                    self.echo_value(key, float_list_echo(&v));
                    v
                }
                Ok(_) => {
                    self.violations
                        .push(format!("line {}: `{key}` list is empty", e.line));
                    self.echo_value(key, float_list_echo(default));
                    default.to_vec()
                }
                Err(why) => {
                    self.violations
                        .push(format!("line {}: `{key}`: {why}", e.line));
                    self.echo_value(key, float_list_echo(default));
                    default.to_vec()
                }
            },
            None => {
                self.echo_value(key, float_list_echo(default));
                default.to_vec()
            }
        }
    }

    /// Reject a key that is known to the task but meaningless in the present
    /// configuration (e.g. ball grid knobs for an interval domain).
    pub fn reject_if_present(&mut self, key: &str, why: &str) {
        if let Some(e) = self.take(key) {
            self.violations
                .push(format!("line {}: `{key}` {why}", e.line));
        }
    }

    /// Check the `task` key against the invoked subcommand.
    pub fn task_key(&mut self, expected: &str) {
        match self.take("task") {
            Some(e) => {
                if e.value != expected {
                    self.violations.push(format!(
                        "line {}: config says `task = {}` but the `{expected}` subcommand was invoked",
                        e.line, e.value
                    ));
                }
                self.echo_value("task", expected);
            }
            None => {
                self.violations.push(format!(
                    "missing required key `task` (expected `task = {expected}`)"
                ));
            }
        }
    }

    /// Close the config: any entry not consumed by a typed accessor is an
    /// unknown key. Returns the header echo map on success, or every
    /// violation collected along the way.
    pub fn finish(mut self) -> Result<BTreeMap<String, String>, Vec<String>> {
        for (key, e) in &self.entries {
            self.violations.push(format!(
                "line {}: unknown key `{key}` for this task",
                e.line
            ));
        }
        if self.violations.is_empty() {
            Ok(self.echo)
        } else {
            self.violations.sort();
            Err(self.violations)
        }
    }
}

/// Parse a `{ kind = ..., ... }` record into field pairs.
fn parse_record(text: &str) -> Result<Vec<(String, String)>, String> {
    let t = text.trim();
    let inner = t
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| format!("expected a brace-delimited record, got `{t}`"))?;
    let mut fields = Vec::new();
    for part in inner.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let eq = part
            .find('=')
            .ok_or_else(|| format!("record field `{part}` is not `key = value`"))?;
        let k = part[..eq].trim().to_string();
        let v = part[eq + 1..].trim().to_string();
        if k.is_empty() || v.is_empty() {
            return Err(format!("record field `{part}` is not `key = value`"));
        }
        fields.push((k, v));
    }
    Ok(fields)
}

fn record_f64(fields: &[(String, String)], key: &str, kind: &str) -> Result<f64, String> {
    let v = fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| format!("{kind} domain record needs a `{key}` field"))?;
    v.parse::<f64>()
        .map_err(|_| format!("{kind} domain field `{key} = {v}` is not a number"))
}

/// Parse a domain record. Kinds: `interval` (a, b), `ball` (center, radius),
/// `half_space` (dim), `half_line_section` (no fields).
pub fn parse_domain(text: &str) -> Result<Domain, String> {
    let fields = parse_record(text)?;
    let kind = fields
        .iter()
        .find(|(k, _)| k == "kind")
        .map(|(_, v)| v.as_str())
        .ok_or("domain record needs a `kind` field")?;
    let allowed: &[&str] = match kind {
        "interval" => &["kind", "a", "b"],
        "ball" => &["kind", "center", "radius"],
        "half_space" => &["kind", "dim"],
        "half_line_section" => &["kind"],
        other => {
            return Err(format!(
                "unknown domain kind `{other}` (expected interval, ball, half_space or half_line_section)"
            ))
        }
    };
    for (k, _) in &fields {
        if !allowed.contains(&k.as_str()) {
            return Err(format!("domain kind `{kind}` does not take a `{k}` field"));
        }
    }
    match kind {
        "interval" => {
            let a = record_f64(&fields, "a", "interval")?;
            let b = record_f64(&fields, "b", "interval")?;
            Domain::interval(a, b).map_err(|e| e.to_string())
        }
        "ball" => {
            let center_text = fields
                .iter()
                .find(|(k, _)| k == "center")
                .map(|(_, v)| v.as_str())
                .ok_or("ball domain record needs a `center` field")?;
            let center = parse_f64_list(center_text)
                .map_err(|why| format!("ball `center`: {why}"))?;
            if center.is_empty() {
                return Err("ball `center` needs at least one coordinate".into());
            }
            let radius = record_f64(&fields, "radius", "ball")?;
            Domain::ball(center, radius).map_err(|e| e.to_string())
        }
        "half_space" => {
            let dim = fields
                .iter()
                .find(|(k, _)| k == "dim")
                .map(|(_, v)| v.as_str())
                .ok_or("half_space domain record needs a `dim` field")?;
            let dim: usize = dim
                .parse()
                .map_err(|_| format!("half_space `dim = {dim}` is not an integer"))?;
            Domain::half_space(dim).map_err(|e| e.to_string())
        }
        "half_line_section" => Ok(Domain::half_line_section()),
        _ => unreachable!(),
    }
}

/// Canonical echo form of a domain.
pub fn domain_echo(d: &Domain) -> String {
    match d {
        Domain::Interval { a, b } => format!("{{ kind = interval, a = {a}, b = {b} }}"),
        Domain::Ball { center, radius } => {
            format!(
                "{{ kind = ball, center = {}, radius = {radius} }}",
                float_list_echo(center)
            )
        }
        Domain::HalfSpace { dim } => format!("{{ kind = half_space, dim = {dim} }}"),
        Domain::HalfLineSection => "{ kind = half_line_section }".to_string(),
    }
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>, String> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| format!("`{tok}` is not a number"))
        })
        .collect()
}

pub fn float_list_echo(v: &[f64]) -> String {
    v.iter()
        .map(|x| fmt_f64(*x))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parse `x1 x2; y1 y2` into points of the given dimension.
pub fn parse_points(text: &str, dim: usize) -> Result<Vec<Vec<f64>>, String> {
    let mut pts = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let p = parse_f64_list(part)?;
        if p.len() != dim {
            return Err(format!(
                "point `{part}` has {} coordinates, domain dimension is {dim}",
                p.len()
            ));
        }
        pts.push(p);
    }
    if pts.is_empty() {
        return Err("point list is empty".into());
    }
    Ok(pts)
}

pub fn points_echo(pts: &[Vec<f64>]) -> String {
    pts.iter()
        .map(|p| float_list_echo(p))
        .collect::<Vec<_>>()
        .join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config_with_defaults() {
        let mut cfg = Config::parse("task = mc\ndomain = { kind = interval, a = -0.5, b = 0.5 }\npoints = 0");
        cfg.task_key("mc");
        let d = cfg.domain_key().unwrap();
        assert_eq!(d.dim(), 1);
        let pts = cfg.points_key("points", 1).unwrap();
        assert_eq!(pts, vec![vec![0.0]]);
        let s = cfg.s_key(0.5);
        assert_eq!(s, 0.5);
        let echo = cfg.finish().unwrap();
        assert_eq!(echo["s"], "0.5");
        assert_eq!(echo["domain"], "{ kind = interval, a = -0.5, b = 0.5 }");
    }

    #[test]
    fn rejects_out_of_range_s_naming_the_constraint() {
        let mut cfg = Config::parse("task = mc\ns = 1.2");
        cfg.task_key("mc");
        cfg.s_key(0.5);
        let errs = cfg.finish().unwrap_err();
        assert!(
            errs.iter().any(|e| e.contains("(0, 1)") && e.contains("1.2")),
            "{errs:?}"
        );
    }

    #[test]
    fn rejects_duplicate_key_listing_both_lines() {
        let mut cfg = Config::parse("task = mc\ns = 0.3\ns = 0.7");
        cfg.task_key("mc");
        cfg.s_key(0.5);
        let errs = cfg.finish().unwrap_err();
        assert!(
            errs.iter()
                .any(|e| e.contains("duplicate key `s`") && e.contains("2") && e.contains("3")),
            "{errs:?}"
        );
    }

    #[test]
    fn collects_every_violation_not_just_the_first() {
        let mut cfg = Config::parse("task = mc\ns = 2\nbogus = 1\npaths = -3");
        cfg.task_key("mc");
        cfg.s_key(0.5);
        cfg.usize_or("paths", 10, |_| Ok(()));
        let errs = cfg.finish().unwrap_err();
        assert!(errs.len() >= 3, "{errs:?}");
        assert!(errs.iter().any(|e| e.contains("unknown key `bogus`")));
        assert!(errs.iter().any(|e| e.contains("paths")));
    }

    #[test]
    fn empty_config_is_a_parse_error() {
        let mut cfg = Config::parse("");
        cfg.task_key("solve");
        let errs = cfg.finish().unwrap_err();
        assert!(errs.iter().any(|e| e.contains("missing required key `task`")));
    }

    #[test]
    fn parses_all_domain_kinds() {
        assert_eq!(
            parse_domain("{ kind = interval, a = -1, b = 2 }").unwrap().dim(),
            1
        );
        assert_eq!(
            parse_domain("{ kind = ball, center = 0 0, radius = 1 }")
                .unwrap()
                .dim(),
            2
        );
        assert_eq!(parse_domain("{ kind = half_space, dim = 3 }").unwrap().dim(), 3);
        assert_eq!(parse_domain("{ kind = half_line_section }").unwrap().dim(), 1);
        assert!(parse_domain("{ kind = cube }").unwrap_err().contains("unknown domain kind"));
        assert!(parse_domain("{ kind = interval, a = 1, b = 0 }")
            .unwrap_err()
            .contains("a"));
        assert!(parse_domain("{ kind = interval, a = 0, b = 1, c = 2 }")
            .unwrap_err()
            .contains("`c`"));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let mut cfg = Config::parse("# header\n\ntask = special # trailing\n");
        cfg.task_key("special");
        assert!(cfg.finish().is_ok());
    }

    #[test]
    fn point_dimension_mismatch_is_reported() {
        assert!(parse_points("0.1 0.2; 0.3", 2)
            .unwrap_err()
            .contains("1 coordinates"));
    }
}
