//! Flat `key = value` experiment configs with per-command sections, merged
//! with command-line flags (flags win).
//!
//! ```text
//! # global keys
//! seed = 3
//! [theorem]
//! case = thm1.2
//! weight = 0.5*r2/2
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use whodge::fields::ScalarField;

pub const COMMANDS: [&str; 6] = ["identities", "spectrum", "steklov", "theorem", "lp", "convergence"];

/// Every key a config file or flag may set.
pub const KEYS: [&str; 22] = [
    "command",
    "domain",
    "shape",
    "level",
    "levels",
    "p",
    "k",
    "j",
    "weight",
    "potential",
    "order",
    "poly_degree",
    "samples",
    "seed",
    "tol",
    "tol_rel",
    "case",
    "embedding",
    "resolution",
    "kind",
    "include_harmonic",
    "expect",
];

/// Output keys: consumed by the runner but never echoed into the report.
pub const OUTPUT_KEYS: [&str; 3] = ["report", "csv", "dump_matrices"];

#[derive(Clone, Debug, PartialEq)]
pub enum Location {
    File { path: String, line: usize, column: usize },
    Flag { name: String, column: usize },
    Missing,
}

/// Configuration error with the position of the offending text.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub location: Location,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Location::File { path, line, column } => write!(f, "{path}:{line}:{column}: {}", self.message),
            Location::Flag { name, column } => write!(f, "flag --{name}, column {column}: {}", self.message),
            Location::Missing => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    pub fn new(location: Location, message: impl Into<String>) -> Self {
        ConfigError { location, message: message.into() }
    }
}

#[derive(Clone, Debug)]
struct Entry {
    value: String,
    /// Location of the first character of the value.
    at: Location,
}

impl Entry {
    fn shifted(&self, column: usize) -> Location {
        match &self.at {
            Location::File { path, line, column: c } => Location::File { path: path.clone(), line: *line, column: c + column - 1 },
            Location::Flag { name, column: c } => Location::Flag { name: name.clone(), column: c + column - 1 },
            Location::Missing => Location::Missing,
        }
    }
}

/// Keys read from a config file: global ones and one map per section.
#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    global: BTreeMap<String, Entry>,
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl ConfigFile {
    pub fn parse(path: &str, text: &str) -> Result<Self, ConfigError> {
        let mut out = ConfigFile::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let at = |column: usize| Location::File { path: path.to_string(), line, column };
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            let col0 = raw[..indent].chars().count() + 1;
            if let Some(rest) = trimmed.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::new(at(col0), "section header must end with ']'"))?
                    .trim();
                if !COMMANDS.contains(&name) {
                    return Err(ConfigError::new(at(col0 + 1), format!("unknown section '{name}'")));
                }
                if out.sections.contains_key(name) {
                    return Err(ConfigError::new(at(col0), format!("section '{name}' repeated")));
                }
                out.sections.insert(name.to_string(), BTreeMap::new());
                section = Some(name.to_string());
                continue;
            }
            let eq = content.find('=').ok_or_else(|| ConfigError::new(at(col0), "expected 'key = value'"))?;
            let key = content[..eq].trim();
            if !KEYS.contains(&key) && !OUTPUT_KEYS.contains(&key) {
                return Err(ConfigError::new(at(col0), format!("unknown key '{key}'")));
            }
            let after = &content[eq + 1..];
            let lead = after.len() - after.trim_start().len();
            let vcol = content[..eq + 1 + lead].chars().count() + 1;
            let value = after.trim();
            if value.is_empty() {
                return Err(ConfigError::new(at(vcol), format!("empty value for '{key}'")));
            }
            let map = match &section {
                Some(s) => out.sections.get_mut(s).unwrap(),
                None => &mut out.global,
            };
            if map.contains_key(key) {
                return Err(ConfigError::new(at(col0), format!("key '{key}' repeated")));
            }
            map.insert(key.to_string(), Entry { value: value.to_string(), at: at(vcol) });
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(Location::Missing, format!("cannot read config '{name}': {e}")))?;
        Self::parse(&name, &text)
    }

    /// Command named in the global section, if any.
    pub fn command(&self) -> Option<(String, Location)> {
        self.global.get("command").map(|e| (e.value.clone(), e.at.clone()))
    }
}

/// Merged key set for one command. Typed getters record every value they
/// resolve (defaults included) for the report's config echo.
#[derive(Debug)]
pub struct Settings {
    command: String,
    entries: BTreeMap<String, Entry>,
    used: BTreeSet<String>,
    echo: BTreeMap<String, String>,
}

impl Settings {
    /// Global file keys, then the command's section, then flags.
    pub fn merge(command: &str, file: Option<&ConfigFile>, flags: &[(String, String)]) -> Self {
        let mut entries = BTreeMap::new();
        if let Some(f) = file {
            entries.extend(f.global.iter().filter(|(k, _)| *k != "command").map(|(k, e)| (k.clone(), e.clone())));
            if let Some(sec) = f.sections.get(command) {
                entries.extend(sec.iter().map(|(k, e)| (k.clone(), e.clone())));
            }
        }
        for (k, v) in flags {
            entries.insert(k.clone(), Entry { value: v.clone(), at: Location::Flag { name: k.clone(), column: 1 } });
        }
        Settings { command: command.to_string(), entries, used: BTreeSet::new(), echo: BTreeMap::new() }
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    pub fn echo(&self) -> &BTreeMap<String, String> {
        &self.echo
    }

    fn location(&self, key: &str) -> Location {
        self.entries.get(key).map_or(Location::Missing, |e| e.at.clone())
    }

    pub fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        let mut message = message.into();
        if !self.entries.contains_key(key) {
            message = format!("{key}: {message}");
        }
        ConfigError::new(self.location(key), message)
    }

    fn raw(&mut self, key: &str) -> Option<Entry> {
        self.used.insert(key.to_string());
        self.entries.get(key).cloned()
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Untyped string value; not echoed (output paths).
    pub fn output(&mut self, key: &str) -> Option<String> {
        self.raw(key).map(|e| e.value)
    }

    pub fn string(&mut self, key: &str, default: Option<&str>) -> Result<String, ConfigError> {
        let v = match self.raw(key) {
            Some(e) => e.value,
            None => default
                .ok_or_else(|| ConfigError::new(Location::Missing, format!("missing required key '{key}'")))?
                .to_string(),
        };
        self.echo.insert(key.to_string(), v.clone());
        Ok(v)
    }

    pub fn parsed<T: FromStr>(&mut self, key: &str, default: T, what: &str) -> Result<T, ConfigError>
    where
        T: fmt::Display,
    {
        let v = match self.raw(key) {
            Some(e) => e.value.parse().map_err(|_| ConfigError::new(e.at.clone(), format!("'{}' is not {what}", e.value)))?,
            None => default,
        };
        self.echo.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        self.parsed(key, default, "a non-negative integer")
    }

    pub fn u64(&mut self, key: &str, default: u64) -> Result<u64, ConfigError> {
        self.parsed(key, default, "a non-negative integer")
    }

    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v: f64 = self.parsed(key, default, "a number")?;
        if !v.is_finite() {
            return Err(self.error(key, "value must be finite"));
        }
        Ok(v)
    }

    pub fn opt_f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        if self.is_set(key) {
            self.f64(key, 0.0).map(Some)
        } else {
            self.raw(key);
            Ok(None)
        }
    }

    pub fn bool(&mut self, key: &str, default: bool) -> Result<bool, ConfigError> {
        self.parsed(key, default, "true or false")
    }

    /// Comma-separated list of integers, or an inclusive range `a..b`.
    pub fn usize_list(&mut self, key: &str, default: &[usize]) -> Result<Vec<usize>, ConfigError> {
        let v = match self.raw(key) {
            None => default.to_vec(),
            Some(e) => {
                let bad = || ConfigError::new(e.at.clone(), format!("'{}' is not an integer list or range a..b", e.value));
                if let Some((a, b)) = e.value.split_once("..") {
                    let a: usize = a.trim().parse().map_err(|_| bad())?;
                    let b: usize = b.trim().parse().map_err(|_| bad())?;
                    if b < a {
                        return Err(bad());
                    }
                    (a..=b).collect()
                } else {
                    e.value.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?
                }
            }
        };
        if v.is_empty() {
            return Err(self.error(key, "list is empty"));
        }
        let text: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        self.echo.insert(key.to_string(), text.join(","));
        Ok(v)
    }

    /// Field expression; parse errors point at the offending column.
    pub fn field(&mut self, key: &str, default: &str) -> Result<ScalarField, ConfigError> {
        let (text, entry) = match self.raw(key) {
            Some(e) => (e.value.clone(), Some(e)),
            None => (default.to_string(), None),
        };
        let f = ScalarField::from_str(&text).map_err(|err| {
            let at = entry.as_ref().map_or(Location::Missing, |e| e.shifted(err.column));
            ConfigError::new(at, format!("in field '{text}': {}", err.message))
        })?;
        self.echo.insert(key.to_string(), text);
        Ok(f)
    }

    /// Every key that was set must have been read by the command.
    pub fn finish(&self) -> Result<(), ConfigError> {
        for (k, e) in &self.entries {
            if !self.used.contains(k) {
                return Err(ConfigError::new(e.at.clone(), format!("key '{k}' is not used by command '{}'", self.command)));
            }
        }
        Ok(())
    }
}
