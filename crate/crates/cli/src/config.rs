use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::Failure;

/// Flat `key = value` settings from a config file. Every key must be
/// consumed by the command; leftovers are rejected.
pub struct Settings {
    source: String,
    values: BTreeMap<String, (String, usize)>,
}

impl Settings {
    pub fn empty() -> Self {
        Settings {
            source: String::new(),
            values: BTreeMap::new(),
        }
    }

    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(Settings::empty());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("cannot read config {}: {e}", path.display())))?;
        Settings::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Failure::Validation(format!(
                    "{source}:{}: expected `key = value`, got `{line}`",
                    i + 1
                )));
            };
            let key = k.trim().to_string();
            if key.is_empty() {
                return Err(Failure::Validation(format!(
                    "{source}:{}: empty key",
                    i + 1
                )));
            }
            if values
                .insert(key.clone(), (v.trim().to_string(), i + 1))
                .is_some()
            {
                return Err(Failure::Validation(format!(
                    "{source}:{}: duplicate key `{key}`",
                    i + 1
                )));
            }
        }
        Ok(Settings {
            source: source.to_string(),
            values,
        })
    }

    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, Failure> {
        match self.values.remove(key) {
            None => Ok(None),
            Some((v, line)) => v.parse().map(Some).map_err(|_| {
                Failure::Validation(format!(
                    "{}:{line}: invalid value `{v}` for `{key}`",
                    self.source
                ))
            }),
        }
    }

    /// Flag, then config entry, then `default`.
    pub fn get<T: FromStr>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, Failure> {
        let from_file = self.take(key)?;
        Ok(flag.or(from_file).unwrap_or(default))
    }

    pub fn get_opt<T: FromStr>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<T>, Failure> {
        let from_file = self.take(key)?;
        Ok(flag.or(from_file))
    }

    /// Fails on any key no command parameter asked for.
    pub fn finish(self) -> Result<(), Failure> {
        match self.values.iter().next() {
            None => Ok(()),
            Some((k, (_, line))) => Err(Failure::Validation(format!(
                "{}:{line}: unknown config key `{k}`",
                self.source
            ))),
        }
    }
}

/// Comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| t.trim())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().map_err(|_| format!("invalid list entry `{t}`")))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}
