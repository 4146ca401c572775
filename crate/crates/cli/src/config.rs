//! Flat `key = value` configuration with command-line overrides.
//!
//! Precedence is flag, then config file, then the built-in default. Every
//! resolved value is recorded so the run can be replayed from its manifest.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// Parsed config file contents.
#[derive(Debug, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str, source: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "{source}:{line_no}: expected 'key = value'"
                )));
            };
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(CliError::usage(format!("{source}:{line_no}: empty key")));
            }
            if entries
                .insert(key.clone(), (line_no, value.trim().to_string()))
                .is_some()
            {
                return Err(CliError::usage(format!(
                    "{source}:{line_no}: key '{key}' given twice"
                )));
            }
        }
        Ok(KeyValues { entries })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }
}

/// Resolves each setting and remembers the result in order.
pub struct Resolver {
    command: &'static str,
    file: KeyValues,
    resolved: Vec<(&'static str, String)>,
}

impl Resolver {
    pub fn new(command: &'static str, config: Option<&Path>) -> CliResult<Self> {
        let mut file = match config {
            Some(p) => KeyValues::load(p)?,
            None => KeyValues::default(),
        };
        if let Some((line, name)) = file.entries.remove("command") {
            if name != command {
                return Err(CliError::usage(format!(
                    "config line {line}: written for '{name}', not '{command}'"
                )));
            }
        }
        Ok(Resolver {
            command,
            file,
            resolved: Vec::new(),
        })
    }

    fn raw(&mut self, key: &'static str, flag: Option<String>) -> Option<(String, String)> {
        if let Some(v) = flag {
            self.file.entries.remove(key);
            return Some((v, format!("--{}", key.replace('_', "-"))));
        }
        self.file
            .entries
            .remove(key)
            .map(|(line, v)| (v, format!("config key '{key}' (line {line})")))
    }

    fn parse<T>(value: &str, origin: &str) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        value
            .parse()
            .map_err(|e| CliError::usage(format!("invalid value '{value}' for {origin}: {e}")))
    }

    /// Resolves a setting that always has a value.
    pub fn get<T>(&mut self, key: &'static str, flag: Option<String>, default: T) -> CliResult<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match self.raw(key, flag) {
            Some((v, origin)) => Self::parse(&v, &origin)?,
            None => default,
        };
        self.resolved.push((key, value.to_string()));
        Ok(value)
    }

    /// Resolves a setting that may stay unset; unset values are not echoed.
    pub fn get_opt<T>(&mut self, key: &'static str, flag: Option<String>) -> CliResult<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        match self.raw(key, flag) {
            Some((v, origin)) => {
                let value: T = Self::parse(&v, &origin)?;
                self.resolved.push((key, value.to_string()));
                Ok(Some(value))
            }
            None => Ok(None),
        }
    }

    /// Fails on config keys that no setting consumed.
    pub fn finish(self) -> CliResult<Manifest> {
        if let Some((key, (line, _))) = self.file.entries.iter().next() {
            return Err(CliError::usage(format!(
                "config line {line}: unknown key '{key}' for '{}'",
                self.command
            )));
        }
        Ok(Manifest {
            command: self.command,
            entries: self.resolved,
        })
    }
}

/// Fully resolved settings, written back out as a loadable config.
#[derive(Debug)]
pub struct Manifest {
    pub command: &'static str,
    pub entries: Vec<(&'static str, String)>,
}

impl Manifest {
    pub fn render(&self) -> String {
        let mut out = format!("command = {}\n", self.command);
        for (k, v) in &self.entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

/// Boolean that also accepts yes/no and 1/0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flag(pub bool);

impl FromStr for Flag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => Ok(Flag(true)),
            "false" | "no" | "0" => Ok(Flag(false)),
            _ => Err("expected true or false".into()),
        }
    }
}

impl Display for Flag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}
