//! The named experiments and their parameter tables.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{section, Validator};
use crate::error::FieldError;
use crate::output::Table;

pub mod ad;
pub mod consistency;
pub mod decimate;
pub mod grising;
pub mod rfim;
pub mod telescope;
pub mod vacuum;
pub mod variational;

pub const NAMES: [&str; 8] = [
    "telescope-check",
    "consistency-check",
    "vp-1d",
    "grising",
    "decimate-dominate",
    "rfim-joint",
    "ad-check",
    "vacuum-check",
];

#[derive(Clone, Debug, PartialEq)]
pub enum Experiment {
    Telescope(telescope::Params),
    Consistency(consistency::Params),
    Variational(variational::Params),
    GriSing(grising::Params),
    Decimate(decimate::Params),
    Rfim(rfim::Params),
    Ad(ad::Params),
    Vacuum(vacuum::Params),
}

impl Experiment {
    pub fn from_section(name: &str, value: Option<&toml::Value>) -> Result<Self, FieldError> {
        Ok(match name {
            "telescope-check" => Experiment::Telescope(section(name, value)?),
            "consistency-check" => Experiment::Consistency(section(name, value)?),
            "vp-1d" => Experiment::Variational(section(name, value)?),
            "grising" => Experiment::GriSing(section(name, value)?),
            "decimate-dominate" => Experiment::Decimate(section(name, value)?),
            "rfim-joint" => Experiment::Rfim(section(name, value)?),
            "ad-check" => Experiment::Ad(section(name, value)?),
            "vacuum-check" => Experiment::Vacuum(section(name, value)?),
            other => {
                return Err(FieldError::new(
                    "experiment",
                    format!("unknown experiment {other:?}; expected one of {}", NAMES.join(", ")),
                ))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Telescope(_) => NAMES[0],
            Experiment::Consistency(_) => NAMES[1],
            Experiment::Variational(_) => NAMES[2],
            Experiment::GriSing(_) => NAMES[3],
            Experiment::Decimate(_) => NAMES[4],
            Experiment::Rfim(_) => NAMES[5],
            Experiment::Ad(_) => NAMES[6],
            Experiment::Vacuum(_) => NAMES[7],
        }
    }

    /// Whether the experiment draws random numbers and so needs a seed.
    pub fn is_stochastic(&self) -> bool {
        matches!(
            self,
            Experiment::Telescope(_)
                | Experiment::Consistency(_)
                | Experiment::GriSing(_)
                | Experiment::Rfim(_)
                | Experiment::Vacuum(_)
        )
    }

    pub fn validate(&self) -> Vec<FieldError> {
        let mut v = Validator::new(self.name());
        match self {
            Experiment::Telescope(p) => p.validate(&mut v),
            Experiment::Consistency(p) => p.validate(&mut v),
            Experiment::Variational(p) => p.validate(&mut v),
            Experiment::GriSing(p) => p.validate(&mut v),
            Experiment::Decimate(p) => p.validate(&mut v),
            Experiment::Rfim(p) => p.validate(&mut v),
            Experiment::Ad(p) => p.validate(&mut v),
            Experiment::Vacuum(p) => p.validate(&mut v),
        }
        v.into_errors()
    }

    pub(crate) fn params_value(&self) -> toml::Value {
        fn value<T: Serialize>(p: &T) -> toml::Value {
            toml::Value::try_from(p).expect("parameters serialize")
        }
        match self {
            Experiment::Telescope(p) => value(p),
            Experiment::Consistency(p) => value(p),
            Experiment::Variational(p) => value(p),
            Experiment::GriSing(p) => value(p),
            Experiment::Decimate(p) => value(p),
            Experiment::Rfim(p) => value(p),
            Experiment::Ad(p) => value(p),
            Experiment::Vacuum(p) => value(p),
        }
    }

    /// Run on the current rayon pool; `seed` is present for stochastic experiments.
    pub fn run(&self, seed: Option<u64>) -> gibbsium::Result<Vec<Table>> {
        let seed = seed.unwrap_or(0);
        match self {
            Experiment::Telescope(p) => telescope::run(p, seed),
            Experiment::Consistency(p) => consistency::run(p, seed),
            Experiment::Variational(p) => variational::run(p),
            Experiment::GriSing(p) => grising::run(p, seed),
            Experiment::Decimate(p) => decimate::run(p),
            Experiment::Rfim(p) => rfim::run(p, seed),
            Experiment::Ad(p) => ad::run(p),
            Experiment::Vacuum(p) => vacuum::run(p, seed),
        }
    }
}

/// One line per experiment for `list-experiments`.
pub fn descriptions() -> Vec<(&'static str, &'static str)> {
    vec![
        (NAMES[0], "telescoping identity of kernel ratios on random finite-range potentials"),
        (NAMES[1], "consistency of the specification over nested boxes"),
        (NAMES[2], "entropy formula against the direct relative entropy density in d=1"),
        (NAMES[3], "zero-occupation rate and single-site law of the GriSing field"),
        (NAMES[4], "stochastic domination of decimated minus and plus boundary measures"),
        (NAMES[5], "random-field Ising joint measures: entropy bound, conditionals, decomposition, r±"),
        (NAMES[6], "asymptotic decoupling ratios of joint and product tables"),
        (NAMES[7], "vacuum potential: vanishing terms and unchanged kernels"),
    ]
}

/// An independent seed for replica `index`, stable across thread counts.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.next_u64()
}

/// A generator for replica `index` of a seeded experiment.
pub fn replica_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A disorder law given by values and probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSpec {
    pub values: Vec<i8>,
    pub probs: Vec<f64>,
}

impl Default for DisorderSpec {
    fn default() -> Self {
        DisorderSpec {
            values: vec![-1, 1],
            probs: vec![0.5, 0.5],
        }
    }
}

impl DisorderSpec {
    pub fn validate(&self, v: &mut Validator, field: &str) {
        if self.values.len() != self.probs.len() {
            v.fail(&format!("{field}.probs"), "must have one probability per value");
        }
        if self.values.is_empty() {
            v.fail(&format!("{field}.values"), "must list at least one value");
        }
        for (i, &p) in self.probs.iter().enumerate() {
            v.closed(&format!("{field}.probs[{i}]"), p, f64::MIN_POSITIVE, 1.0);
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            v.fail(&format!("{field}.probs"), format!("sum to {total}, not 1"));
        }
        let mut seen = self.values.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.values.len() {
            v.fail(&format!("{field}.values"), "must be distinct");
        }
    }

    pub fn law(&self) -> gibbsium::Result<gibbsium::disordered::DisorderLaw> {
        gibbsium::disordered::DisorderLaw::new(self.values.clone(), self.probs.clone())
    }
}

/// A potential named in a config: a builtin with parameters or explicit term tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// Nearest-neighbour Ising with coupling `beta` and field `h`.
    Ising { beta: f64, h: f64 },
    /// Random-field Ising with disorder uniform on `±1`, quenched at a sampled field.
    RfimQuenched { beta: f64, h: f64 },
    /// Spin terms on `{-1, +1}`: each shape lists sites, each table has `2^|shape|` values.
    Terms { terms: Vec<TermSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub shape: Vec<Vec<i32>>,
    pub values: Vec<f64>,
}

impl PotentialSpec {
    pub fn label(&self) -> &'static str {
        match self {
            PotentialSpec::Ising { .. } => "ising",
            PotentialSpec::RfimQuenched { .. } => "rfim-quenched",
            PotentialSpec::Terms { .. } => "terms",
        }
    }

    pub fn validate(&self, v: &mut Validator, field: &str, dim: usize) {
        match self {
            PotentialSpec::Ising { beta, h } | PotentialSpec::RfimQuenched { beta, h } => {
                v.closed(&format!("{field}.beta"), *beta, -10.0, 10.0);
                v.closed(&format!("{field}.h"), *h, -10.0, 10.0);
            }
            PotentialSpec::Terms { terms } => {
                if let Err(e) = self.build(dim) {
                    v.fail(&format!("{field}.terms"), e.to_string());
                }
                for (i, t) in terms.iter().enumerate() {
                    for (j, x) in t.values.iter().enumerate() {
                        if !x.is_finite() {
                            v.fail(&format!("{field}.terms[{i}].values[{j}]"), "must be finite");
                        }
                    }
                }
            }
        }
    }

    pub fn build(&self, dim: usize) -> gibbsium::Result<gibbsium::Potential> {
        use gibbsium::{Alphabet, LocalAlphabet, Potential, Site, Term};
        match self {
            PotentialSpec::Ising { beta, h } => Ok(Potential::ising(dim, *beta, *h)),
            PotentialSpec::RfimQuenched { beta, h } => Ok(Potential::rfim(dim, *beta, *h, Alphabet::spins())),
            PotentialSpec::Terms { terms } => {
                let terms = terms
                    .iter()
                    .map(|t| Term::from_table(t.shape.iter().cloned().map(Site::new).collect(), 2, t.values.clone()))
                    .collect::<gibbsium::Result<Vec<_>>>()?;
                Potential::new(dim, LocalAlphabet::Spin(Alphabet::spins()), terms)
            }
        }
    }
}
