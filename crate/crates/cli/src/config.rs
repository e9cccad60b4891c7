//! Run configuration: a flat `key = value` file with `[section]` headers.
//!
//! ```text
//! [potential]
//! a = 1
//! b = 2
//! v0 = 1
//!
//! [grids]
//! rMax = 40
//! rPoints = 2001
//! eMax = 400
//! ePoints = 1000
//!
//! [tolerances]
//! pole = 1e-10
//! hardy = 1e-6
//!
//! [output]
//! directory = out
//!
//! [run]
//! seed = 20240917
//! ```
//!
//! Every key is optional; unknown sections and keys are rejected.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use shell_rhs::scatter::PotentialSpec;
use shell_rhs::suites::DEFAULT_SEED;

#[derive(Clone, Debug, PartialEq)]
pub struct Grids {
    pub r_max: f64,
    pub r_points: usize,
    pub e_max: f64,
    pub e_points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub pole: f64,
    pub hardy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub grids: Grids,
    pub tolerances: Tolerances,
    pub output: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            potential: PotentialSpec::unit_shell(),
            grids: Grids {
                r_max: 40.0,
                r_points: 2001,
                e_max: 400.0,
                e_points: 1000,
            },
            tolerances: Tolerances {
                pole: 1e-10,
                hardy: 1e-6,
            },
            output: PathBuf::from("out"),
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("unknown key `{key}` in [{section}]")]
    UnknownKey { section: String, key: String },
    #[error("`{key}` = `{value}`: {msg}")]
    Value { key: String, value: String, msg: String },
}

const KEYS: &[(&str, &[&str])] = &[
    ("potential", &["a", "b", "v0"]),
    ("grids", &["rMax", "rPoints", "eMax", "ePoints"]),
    ("tolerances", &["pole", "hardy"]),
    ("output", &["directory"]),
    ("run", &["seed"]),
];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let entries = parse_entries(text)?;
        let mut cfg = RunConfig::default();
        for ((section, key), value) in &entries {
            let full = format!("{section}.{key}");
            match (section.as_str(), key.as_str()) {
                ("potential", "a") => cfg.potential.a = number(&full, value)?,
                ("potential", "b") => cfg.potential.b = number(&full, value)?,
                ("potential", "v0") => cfg.potential.v0 = number(&full, value)?,
                ("grids", "rMax") => cfg.grids.r_max = number(&full, value)?,
                ("grids", "rPoints") => cfg.grids.r_points = integer(&full, value)?,
                ("grids", "eMax") => cfg.grids.e_max = number(&full, value)?,
                ("grids", "ePoints") => cfg.grids.e_points = integer(&full, value)?,
                ("tolerances", "pole") => cfg.tolerances.pole = number(&full, value)?,
                ("tolerances", "hardy") => cfg.tolerances.hardy = number(&full, value)?,
                ("output", "directory") => cfg.output = PathBuf::from(value),
                ("run", "seed") => cfg.seed = integer(&full, value)?,
                _ => unreachable!("keys are checked while parsing"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, value: String, msg: &str| ConfigError::Value {
            key: key.into(),
            value,
            msg: msg.into(),
        };
        let p = &self.potential;
        if !(p.a > 0.0 && p.b > p.a && p.b.is_finite()) {
            return Err(bad("potential", format!("a={}, b={}", p.a, p.b), "need 0 < a < b"));
        }
        if !(p.v0 >= 0.0 && p.v0.is_finite()) {
            return Err(bad("potential.v0", p.v0.to_string(), "must be finite and non-negative"));
        }
        let positive = [
            ("grids.rMax", self.grids.r_max),
            ("grids.eMax", self.grids.e_max),
            ("tolerances.pole", self.tolerances.pole),
            ("tolerances.hardy", self.tolerances.hardy),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(key, v.to_string(), "must be positive"));
            }
        }
        for (key, n) in [
            ("grids.rPoints", self.grids.r_points),
            ("grids.ePoints", self.grids.e_points),
        ] {
            if n < 2 {
                return Err(bad(key, n.to_string(), "need at least 2 points"));
            }
        }
        Ok(())
    }

    /// Normalized text of every field; identical configs hash identically
    /// whatever their file layout.
    pub fn canonical(&self) -> String {
        let p = &self.potential;
        let g = &self.grids;
        format!(
            "potential.a={:?}\npotential.b={:?}\npotential.v0={:?}\n\
             grids.rMax={:?}\ngrids.rPoints={}\ngrids.eMax={:?}\ngrids.ePoints={}\n\
             tolerances.pole={:?}\ntolerances.hardy={:?}\nrun.seed={}\n",
            p.a,
            p.b,
            p.v0,
            g.r_max,
            g.r_points,
            g.e_max,
            g.e_points,
            self.tolerances.pole,
            self.tolerances.hardy,
            self.seed
        )
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn parse_entries(text: &str) -> Result<BTreeMap<(String, String), String>, ConfigError> {
    let mut section: Option<String> = None;
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |msg: &str| ConfigError::Syntax {
            line: i + 1,
            msg: msg.into(),
        };
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| syntax("unterminated section header"))?
                .trim();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(ConfigError::UnknownSection(name.into()));
            }
            section = Some(name.into());
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| syntax("expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.clone().ok_or_else(|| syntax("key outside any section"))?;
        let known = KEYS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
        if !known.contains(&key) {
            return Err(ConfigError::UnknownKey {
                section: sec,
                key: key.into(),
            });
        }
        if out.insert((sec, key.to_owned()), value.to_owned()).is_some() {
            return Err(syntax(&format!("duplicate key `{key}`")));
        }
    }
    Ok(out)
}

fn number(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse::<f64>().map_err(|e| ConfigError::Value {
        key: key.into(),
        value: value.into(),
        msg: e.to_string(),
    })
}

fn integer<T: std::str::FromStr<Err = std::num::ParseIntError>>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse::<T>().map_err(|e| ConfigError::Value {
        key: key.into(),
        value: value.into(),
        msg: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn parses_all_sections() {
        let cfg = RunConfig::parse(
            "# shell\n[potential]\na = 0.5\nb = 1.5 ; inline\nv0 = 0\n[grids]\nePoints = 10\n[run]\nseed = 7\n[output]\ndirectory = results\n",
        )
        .unwrap();
        assert_eq!(cfg.potential.a, 0.5);
        assert_eq!(cfg.potential.v0, 0.0);
        assert_eq!(cfg.grids.e_points, 10);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.output, PathBuf::from("results"));
    }

    #[test]
    fn rejects_unknown_keys_and_sections() {
        assert!(matches!(
            RunConfig::parse("[potential]\nwidth = 2\n"),
            Err(ConfigError::UnknownKey { .. })
        ));
        assert!(matches!(
            RunConfig::parse("[extra]\n"),
            Err(ConfigError::UnknownSection(_))
        ));
        assert!(matches!(RunConfig::parse("a = 1\n"), Err(ConfigError::Syntax { .. })));
        assert!(matches!(
            RunConfig::parse("[potential]\na = 1\na = 2\n"),
            Err(ConfigError::Syntax { .. })
        ));
    }

    #[test]
    fn rejects_invalid_values() {
        assert!(RunConfig::parse("[potential]\na = 3\n").is_err());
        assert!(RunConfig::parse("[potential]\nv0 = -1\n").is_err());
        assert!(RunConfig::parse("[grids]\nrMax = 0\n").is_err());
        assert!(RunConfig::parse("[grids]\nrPoints = x\n").is_err());
    }

    #[test]
    fn hash_ignores_layout_but_not_values() {
        let a = RunConfig::parse("[potential]\nv0 = 1\n").unwrap();
        let b = RunConfig::parse("\n\n[potential]\n  v0=1.0  # same\n").unwrap();
        let c = RunConfig::parse("[potential]\nv0 = 2\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
