//! Plain-text `key=value` configuration. Keys are long flag names; a value
//! from the file is used only when the flag itself is absent.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    pub values: BTreeMap<String, String>,
}

impl ConfigFile {
    /// Parse `text`, rejecting keys outside `known`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse(text: &str, known: &BTreeSet<String>) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
            let k = k.trim().replace('_', "-");
            if !known.contains(&k) {
                return Err(CliError::Usage(format!("config line {}: unknown key '{k}'", i + 1)));
            }
            if values.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::Usage(format!("config line {}: duplicate key '{k}'", i + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path, known: &BTreeSet<String>) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, known)
    }

    /// The flag value if given, else the file value, else `None`.
    pub fn pick<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config key '{key}': cannot parse '{v}'"))),
        }
    }

    /// As [`pick`](Self::pick) with a fallback default.
    pub fn or<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        Ok(self.pick(key, flag)?.unwrap_or(default))
    }

    /// As [`pick`](Self::pick) but the value is required.
    pub fn need<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<T, CliError> {
        self.pick(key, flag)?.ok_or_else(|| CliError::Usage(format!("missing required --{key}")))
    }

    /// A comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str, flag: Option<String>) -> Result<Option<Vec<T>>, CliError> {
        let Some(s) = self.pick::<String>(key, flag)? else {
            return Ok(None);
        };
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| CliError::Usage(format!("--{key}: cannot parse '{x}'"))))
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn known() -> BTreeSet<String> {
        ["step", "t", "lfunc"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn flags_override_file() {
        let c = ConfigFile::parse("# comment\nstep = 0.5\n\nt=1e4,1e5\n", &known()).unwrap();
        assert_eq!(c.or("step", None, 0.1).unwrap(), 0.5);
        assert_eq!(c.or("step", Some(0.25), 0.1).unwrap(), 0.25);
        assert_eq!(c.or("lfunc", None, "zeta".to_string()).unwrap(), "zeta");
        assert_eq!(c.list::<f64>("t", None).unwrap().unwrap(), vec![1e4, 1e5]);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(ConfigFile::parse("colour=blue", &known()), Err(CliError::Usage(_))));
        assert!(matches!(ConfigFile::parse("step", &known()), Err(CliError::Usage(_))));
        assert!(matches!(ConfigFile::parse("step=1\nstep=2", &known()), Err(CliError::Usage(_))));
        let c = ConfigFile::parse("step=abc", &known()).unwrap();
        assert!(c.pick::<f64>("step", None).is_err());
    }
}
