//! Experiment configuration files: a few top-level keys plus one table per experiment.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, FieldError, Result};
use crate::experiments::{self, Experiment};

const TOP_LEVEL: [&str; 4] = ["experiment", "seed", "jobs", "out"];
pub const MAX_JOBS: usize = 256;

/// A parsed and validated experiment configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: Option<u64>,
    pub jobs: usize,
    pub out: PathBuf,
}

/// Command-line overrides of the top-level keys.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Collects violated constraints under dotted field names.
#[derive(Debug, Default)]
pub struct Validator {
    prefix: String,
    errors: Vec<FieldError>,
}

impl Validator {
    pub fn new(prefix: &str) -> Self {
        Validator {
            prefix: prefix.to_string(),
            errors: Vec::new(),
        }
    }

    pub fn into_errors(self) -> Vec<FieldError> {
        self.errors
    }

    pub fn fail(&mut self, field: &str, message: impl Into<String>) {
        let name = if self.prefix.is_empty() {
            field.to_string()
        } else {
            format!("{}.{field}", self.prefix)
        };
        self.errors.push(FieldError::new(name, message));
    }

    /// `lo <= value <= hi`.
    pub fn closed<T: PartialOrd + std::fmt::Display + Copy>(&mut self, field: &str, value: T, lo: T, hi: T) {
        if !(lo <= value && value <= hi) {
            self.fail(field, format!("{value} is outside [{lo}, {hi}]"));
        }
    }

    /// `lo <= value < hi`.
    pub fn half_open(&mut self, field: &str, value: f64, lo: f64, hi: f64) {
        if !(lo <= value && value < hi) {
            self.fail(field, format!("{value} is outside [{lo}, {hi})"));
        }
    }

    /// `lo < value < hi`.
    pub fn open(&mut self, field: &str, value: f64, lo: f64, hi: f64) {
        if !(lo < value && value < hi) {
            self.fail(field, format!("{value} is outside ({lo}, {hi})"));
        }
    }

    pub fn nonempty<T>(&mut self, field: &str, values: &[T]) {
        if values.is_empty() {
            self.fail(field, "must list at least one value");
        }
    }

    pub fn each_closed<T: PartialOrd + std::fmt::Display + Copy>(&mut self, field: &str, values: &[T], lo: T, hi: T) {
        self.nonempty(field, values);
        for (i, &v) in values.iter().enumerate() {
            self.closed(&format!("{field}[{i}]"), v, lo, hi);
        }
    }
}

/// Deserialize one experiment table, reporting unknown or mistyped keys under `name`.
pub fn section<T: DeserializeOwned + Default>(name: &str, value: Option<&toml::Value>) -> std::result::Result<T, FieldError> {
    match value {
        None => Ok(T::default()),
        Some(v @ toml::Value::Table(_)) => v
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| FieldError::new(name, e.message().trim().to_string())),
        Some(_) => Err(FieldError::new(name, "must be a table")),
    }
}

/// Parse configuration text; no validation beyond types and key names.
pub fn parse(text: &str, overrides: &Overrides) -> Result<ExperimentConfig> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::field("config", e.message().trim().to_string()))?;
    let mut errors = Vec::new();
    for key in table.keys() {
        if !TOP_LEVEL.contains(&key.as_str()) && !experiments::NAMES.contains(&key.as_str()) {
            errors.push(FieldError::new(key.clone(), "unknown key"));
        }
    }
    let name = match table.get("experiment") {
        Some(toml::Value::String(s)) => Some(s.clone()),
        Some(_) => {
            errors.push(FieldError::new("experiment", "must be a string"));
            None
        }
        None => {
            errors.push(FieldError::new("experiment", "missing"));
            None
        }
    };
    let seed = match table.get("seed") {
        None => None,
        Some(toml::Value::Integer(s)) if *s >= 0 => Some(*s as u64),
        Some(_) => {
            errors.push(FieldError::new("seed", "must be a nonnegative integer"));
            None
        }
    };
    let jobs = match table.get("jobs") {
        None => None,
        Some(toml::Value::Integer(j)) if *j >= 0 => Some(*j as usize),
        Some(_) => {
            errors.push(FieldError::new("jobs", "must be a positive integer"));
            None
        }
    };
    let out = match table.get("out") {
        None => None,
        Some(toml::Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => {
            errors.push(FieldError::new("out", "must be a string path"));
            None
        }
    };
    let experiment = match name.as_deref() {
        Some(n) => match Experiment::from_section(n, table.get(n)) {
            Ok(e) => Some(e),
            Err(e) => {
                errors.push(e);
                None
            }
        },
        None => None,
    };
    if !errors.is_empty() {
        return Err(CliError::Config(errors));
    }
    Ok(ExperimentConfig {
        experiment: experiment.expect("checked above"),
        seed: overrides.seed.or(seed),
        jobs: overrides.jobs.or(jobs).unwrap_or(1),
        out: overrides.out.clone().or(out).unwrap_or_else(|| PathBuf::from(".")),
    })
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        field: "config".into(),
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text, overrides)
}

impl ExperimentConfig {
    /// Every violated constraint; empty when the configuration can run.
    pub fn validate(&self) -> Vec<FieldError> {
        let mut v = Validator::new("");
        v.closed("jobs", self.jobs, 1, MAX_JOBS);
        if self.experiment.is_stochastic() && self.seed.is_none() {
            v.fail("seed", format!("required by the stochastic experiment {}", self.experiment.name()));
        }
        let mut errors = v.into_errors();
        errors.extend(self.experiment.validate());
        errors
    }

    pub fn check(&self) -> Result<()> {
        let errors = self.validate();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(errors))
        }
    }

    /// SHA-256 of the canonical experiment parameters and seed; `out` and `jobs` do not affect results.
    pub fn hash(&self) -> String {
        #[derive(Serialize)]
        struct Canonical<'a> {
            experiment: &'a str,
            seed: Option<u64>,
            params: toml::Value,
        }
        let canonical = Canonical {
            experiment: self.experiment.name(),
            seed: self.seed,
            params: self.experiment.params_value(),
        };
        let text = toml::to_string(&canonical).expect("parameters serialize");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn metadata(&self) -> String {
        let seed = self.seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into());
        format!(
            "gibbsium experiment={} config_sha256={} seed={seed}",
            self.experiment.name(),
            self.hash()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_is_valid() {
        let c = parse("experiment = \"vp-1d\"\n", &Overrides::default()).unwrap();
        assert!(c.validate().is_empty());
        assert_eq!(c.jobs, 1);
    }

    #[test]
    fn out_of_range_p_names_the_field() {
        let c = parse("experiment = \"grising\"\nseed = 1\n[grising]\np = [1.2]\n", &Overrides::default()).unwrap();
        let errors = c.validate();
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].field, "grising.p[0]");
        assert!(errors[0].message.contains("[0, 1)"), "{}", errors[0].message);
    }

    #[test]
    fn missing_seed_is_reported() {
        let c = parse("experiment = \"grising\"\n", &Overrides::default()).unwrap();
        assert!(c.validate().iter().any(|e| e.field == "seed"));
        let c = parse("experiment = \"grising\"\n", &Overrides { seed: Some(3), ..Default::default() }).unwrap();
        assert!(c.validate().is_empty());
    }

    #[test]
    fn unknown_names_are_config_errors() {
        let err = parse("experiment = \"nope\"\n", &Overrides::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = parse("experiment = \"vp-1d\"\ncolour = 1\n", &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("colour"));
        let err = parse("experiment = \"vp-1d\"\n[vp-1d]\nbeta = 1\n", &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("vp-1d"), "{err}");
    }

    #[test]
    fn hash_ignores_output_and_jobs() {
        let a = parse("experiment = \"vp-1d\"\njobs = 1\nout = \"a\"\n", &Overrides::default()).unwrap();
        let b = parse("experiment = \"vp-1d\"\njobs = 4\nout = \"b\"\n", &Overrides::default()).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = parse("experiment = \"vp-1d\"\n[vp-1d]\nn = [3]\n", &Overrides::default()).unwrap();
        assert_ne!(a.hash(), c.hash());
    }
}
