//! Flat `key = value` scenario files.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use crate::CliError;

/// Every key a scenario may set.
pub const KNOWN_KEYS: &[&str] = &[
    "kind",
    "Nb",
    "Nc",
    "lambda",
    "gamma",
    "h",
    "eta",
    "beta",
    "vartheta",
    "varphi",
    "t_start",
    "t_end",
    "n_points",
    "omega0",
    "omega_a",
    "g",
    "nbar",
    "fock_cutoff",
    "h0",
    "theta",
    "phi",
    "zeta",
    "eff_variant",
    "spin_space",
    "boundary",
    "h_scan_start",
    "h_scan_end",
    "h_scan_points",
    "horizon_periods",
    "seed",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    KRatio,
    Dynamics,
    FieldScan,
    TimeAverageScan,
    OracleCheck,
}

impl Kind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "k-ratio" => Self::KRatio,
            "dynamics" => Self::Dynamics,
            "field-scan" => Self::FieldScan,
            "time-average-scan" => Self::TimeAverageScan,
            "oracle-check" => Self::OracleCheck,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::KRatio => "k-ratio",
            Self::Dynamics => "dynamics",
            Self::FieldScan => "field-scan",
            Self::TimeAverageScan => "time-average-scan",
            Self::OracleCheck => "oracle-check",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A parsed scenario: the kind plus every raw value, keyed by name.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: Kind,
    values: BTreeMap<String, String>,
}

/// Parse a numeric value: a product or quotient of numbers and `pi`,
/// e.g. `pi/2`, `2*pi*6.9e9`, `-0.5`.
pub fn parse_number(text: &str) -> Option<f64> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = text;
    loop {
        let cut = rest.find(['*', '/']).unwrap_or(rest.len());
        let factor = parse_factor(rest[..cut].trim())?;
        value = if op == '*' { value * factor } else { value / factor };
        if cut == rest.len() {
            break;
        }
        op = rest[cut..].chars().next()?;
        rest = &rest[cut + 1..];
    }
    value.is_finite().then_some(value)
}

fn parse_factor(s: &str) -> Option<f64> {
    if let Some(inner) = s.strip_prefix('-') {
        return parse_factor(inner.trim()).map(|v| -v);
    }
    match s {
        "pi" => Some(PI),
        _ if s.starts_with(|c: char| c.is_ascii_digit() || c == '.' || c == '+') => s.parse().ok(),
        _ => None,
    }
}

fn split_line(line: &str) -> Option<(&str, &str)> {
    let (k, v) = line.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    (!k.is_empty() && !v.is_empty()).then_some((k, v))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) =
                split_line(line).ok_or_else(|| CliError::Parse(format!("line {}: expected `key = value`", no + 1)))?;
            if !KNOWN_KEYS.contains(&k) {
                return Err(CliError::Parse(format!("line {}: unknown key `{k}`", no + 1)));
            }
            if values.insert(k.to_string(), v.to_string()).is_some() {
                return Err(CliError::Parse(format!("line {}: duplicate key `{k}`", no + 1)));
            }
        }
        Self::from_values(values)
    }

    fn from_values(values: BTreeMap<String, String>) -> Result<Self, CliError> {
        let kind_text = values.get("kind").ok_or_else(|| CliError::Parse("missing `kind`".into()))?;
        let kind = Kind::parse(kind_text).ok_or_else(|| CliError::Parse(format!("unknown kind `{kind_text}`")))?;
        let scenario = Self { kind, values };
        scenario.check_numbers()?;
        Ok(scenario)
    }

    pub fn read(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Apply `key=value` overrides in order.
    pub fn with_overrides(mut self, overrides: &[String]) -> Result<Self, CliError> {
        for o in overrides {
            let (k, v) = split_line(o).ok_or_else(|| CliError::Parse(format!("override `{o}` is not key=value")))?;
            if !KNOWN_KEYS.contains(&k) {
                return Err(CliError::Parse(format!("override of unknown key `{k}`")));
            }
            self.values.insert(k.to_string(), v.to_string());
        }
        Self::from_values(self.values)
    }

    fn check_numbers(&self) -> Result<(), CliError> {
        const TEXT_KEYS: &[&str] = &["kind", "eff_variant", "spin_space", "boundary", "out", "zeta"];
        for (k, v) in &self.values {
            if !TEXT_KEYS.contains(&k.as_str()) && parse_number(v).is_none() {
                return Err(CliError::Parse(format!("`{k}`: cannot read `{v}` as a number")));
            }
        }
        if let Some(z) = self.values.get("zeta") {
            parse_zeta(z)?;
        }
        Ok(())
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let raw = self.raw(key).ok_or_else(|| CliError::Validation(format!("{} scenario needs `{key}`", self.kind)))?;
        parse_number(raw).ok_or_else(|| CliError::Parse(format!("`{key}`: cannot read `{raw}`")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        if self.has(key) {
            self.f64(key)
        } else {
            Ok(default)
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        let x = self.f64(key)?;
        if x < 0.0 || x.fract() != 0.0 || x > u32::MAX as f64 {
            return Err(CliError::Validation(format!("`{key}` must be a non-negative integer, got {x}")));
        }
        Ok(x as usize)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        if self.has(key) {
            self.usize(key)
        } else {
            Ok(default)
        }
    }

    pub fn text_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    pub fn out_path(&self) -> Result<PathBuf, CliError> {
        self.raw("out").map(PathBuf::from).ok_or_else(|| CliError::Validation("scenario needs `out`".into()))
    }

    /// Uniform time grid from `t_start`, `t_end`, `n_points`.
    pub fn time_grid(&self) -> Result<Vec<f64>, CliError> {
        let start = self.f64_or("t_start", 0.0)?;
        let end = self.f64("t_end")?;
        let n = self.usize("n_points")?;
        grid(start, end, n, "time")
    }

    /// `# params:` line listing every value in canonical order.
    pub fn params_line(&self) -> String {
        let mut parts = vec![format!("version={}", env!("CARGO_PKG_VERSION"))];
        for (k, v) in &self.values {
            let shown = match parse_number(v) {
                Some(x) if k != "zeta" && k != "out" => format!("{x:?}"),
                _ => v.clone(),
            };
            parts.push(format!("{k}={shown}"));
        }
        format!("# params: {}", parts.join(" "))
    }
}

/// `n ≥ 2` evenly spaced points from `start` to `end` inclusive.
pub fn grid(start: f64, end: f64, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    if n < 2 {
        return Err(CliError::Validation(format!("{what} grid needs at least 2 points, got {n}")));
    }
    if end.partial_cmp(&start) != Some(std::cmp::Ordering::Greater) {
        return Err(CliError::Validation(format!("{what} grid needs end > start ({start} .. {end})")));
    }
    let step = (end - start) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { end } else { start + step * i as f64 }).collect())
}

/// `zeta` is either one angle or `start:end:points`.
pub fn parse_zeta(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::Parse(format!("`zeta`: cannot read `{text}`"));
    match parts.as_slice() {
        [one] => Ok(vec![parse_number(one).ok_or_else(bad)?]),
        [a, b, n] => {
            let n = parse_number(n).filter(|x| x.fract() == 0.0 && *x >= 0.0).ok_or_else(bad)? as usize;
            let (a, b) = (parse_number(a).ok_or_else(bad)?, parse_number(b).ok_or_else(bad)?);
            grid(a, b, n, "zeta")
        }
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_with_pi() {
        assert_eq!(parse_number("pi/2"), Some(PI / 2.0));
        assert_eq!(parse_number("2*pi*6.9e9"), Some(2.0 * PI * 6.9e9));
        assert_eq!(parse_number("-1e-5"), Some(-1e-5));
        assert_eq!(parse_number(" 3 "), Some(3.0));
        assert_eq!(parse_number("pi*"), None);
        assert_eq!(parse_number("two"), None);
        assert_eq!(parse_number("1/0"), None);
    }

    #[test]
    fn comments_and_blank_lines() {
        let s = Scenario::parse("# header\nkind = dynamics\n\nNb = 10 # sites\n").unwrap();
        assert_eq!(s.kind, Kind::Dynamics);
        assert_eq!(s.usize("Nb").unwrap(), 10);
    }

    #[test]
    fn parse_failures() {
        assert!(matches!(Scenario::parse("Nb = 4"), Err(CliError::Parse(_))));
        assert!(matches!(Scenario::parse("kind = nope"), Err(CliError::Parse(_))));
        assert!(matches!(Scenario::parse("kind = dynamics\nfoo = 1"), Err(CliError::Parse(_))));
        assert!(matches!(Scenario::parse("kind = dynamics\nNb 4"), Err(CliError::Parse(_))));
        assert!(matches!(Scenario::parse("kind = dynamics\nNb = x"), Err(CliError::Parse(_))));
        assert!(matches!(Scenario::parse("kind = dynamics\nNb = 1\nNb = 2"), Err(CliError::Parse(_))));
    }

    #[test]
    fn overrides_replace_values() {
        let s = Scenario::parse("kind = dynamics\neta = 1").unwrap();
        let s = s.with_overrides(&["eta=0.01".into(), "beta = 50".into()]).unwrap();
        assert_eq!(s.f64("eta").unwrap(), 0.01);
        assert_eq!(s.f64("beta").unwrap(), 50.0);
        assert!(s.clone().with_overrides(&["nope=1".into()]).is_err());
        assert_eq!(s.with_overrides(&["kind=k-ratio".into()]).unwrap().kind, Kind::KRatio);
    }

    #[test]
    fn missing_key_is_a_validation_error() {
        let s = Scenario::parse("kind = dynamics").unwrap();
        assert!(matches!(s.f64("eta"), Err(CliError::Validation(_))));
        assert!(matches!(s.usize_or("Nb", 3), Ok(3)));
    }

    #[test]
    fn grids() {
        assert_eq!(grid(0.0, 1.0, 3, "t").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(grid(0.0, 1.0, 1, "t").is_err());
        assert!(grid(1.0, 1.0, 4, "t").is_err());
        assert_eq!(parse_zeta("pi/6").unwrap(), vec![PI / 6.0]);
        assert_eq!(parse_zeta("0:pi:3").unwrap().len(), 3);
        assert!(parse_zeta("0:1").is_err());
    }

    #[test]
    fn params_line_is_canonical() {
        let a = Scenario::parse("kind = dynamics\nh = 0.5\neta = pi").unwrap();
        let b = Scenario::parse("eta = pi\nkind = dynamics\nh = 0.5").unwrap();
        assert_eq!(a.params_line(), b.params_line());
        assert!(a.params_line().starts_with("# params: version="));
        assert!(a.params_line().contains("eta=3.141592653589793"));
    }
}
