//! Exact probability tables over all configurations of a small volume.

use crate::energy::check_cap;
use crate::error::{Error, Result};
use crate::lattice::{Config, Volume};
use crate::numeric::boltzmann;
use crate::potential::LocalAlphabet;

const NORMALIZATION_TOL: f64 = 1e-9;

/// Probabilities of every configuration of a volume.
///
/// Configurations are indexed mixed-radix over local symbols, first site of
/// the volume (in lexicographic order) most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbTable {
    volume: Volume,
    alphabet: LocalAlphabet,
    probs: Vec<f64>,
}

impl ProbTable {
    pub fn new(volume: Volume, alphabet: LocalAlphabet, probs: Vec<f64>) -> Result<Self> {
        let expect = (alphabet.q() as f64).powi(volume.len() as i32);
        if probs.len() as f64 != expect {
            return Err(Error::VolumeMismatch(format!(
                "{} probabilities for {} configurations",
                probs.len(),
                expect
            )));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidArgument("negative or NaN probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
        }
        Ok(ProbTable {
            volume,
            alphabet,
            probs,
        })
    }

    /// Normalize `exp(-energy)`; returns the table and `log Z`.
    pub fn from_energies(volume: Volume, alphabet: LocalAlphabet, energies: &[f64]) -> (Self, f64) {
        let (probs, log_z) = boltzmann(energies);
        (
            ProbTable {
                volume,
                alphabet,
                probs,
            },
            log_z,
        )
    }

    /// Independent sites, each with the same law over local symbols.
    pub fn product(volume: Volume, alphabet: LocalAlphabet, site_law: &[f64]) -> Result<Self> {
        let q = alphabet.q();
        if site_law.len() != q {
            return Err(Error::InvalidArgument("site law does not match alphabet".into()));
        }
        check_cap((q as f64).powi(volume.len() as i32))?;
        let mut probs = vec![1.0];
        for _ in 0..volume.len() {
            probs = probs
                .iter()
                .flat_map(|p| site_law.iter().map(move |w| p * w))
                .collect();
        }
        ProbTable::new(volume, alphabet, probs)
    }

    pub fn uniform(volume: Volume, alphabet: LocalAlphabet) -> Result<Self> {
        let q = alphabet.q();
        ProbTable::product(volume, alphabet, &vec![1.0 / q as f64; q])
    }

    pub fn point_mass(volume: Volume, alphabet: LocalAlphabet, symbols: &[u8]) -> Result<Self> {
        let q = alphabet.q();
        check_cap((q as f64).powi(volume.len() as i32))?;
        let mut probs = vec![0.0; q.pow(volume.len() as u32)];
        let i = index_of(symbols, q);
        probs[i] = 1.0;
        ProbTable::new(volume, alphabet, probs)
    }

    pub fn volume(&self) -> &Volume {
        &self.volume
    }

    pub fn alphabet(&self) -> &LocalAlphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn q(&self) -> usize {
        self.alphabet.q()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Local symbols of configuration `index`.
    pub fn symbols(&self, index: usize) -> Vec<u8> {
        symbols_of(index, self.q(), self.volume.len())
    }

    pub fn index(&self, symbols: &[u8]) -> usize {
        index_of(symbols, self.q())
    }

    /// Spin configuration number `index` (spin-only tables).
    pub fn config(&self, index: usize) -> Result<Config> {
        let a = match &self.alphabet {
            LocalAlphabet::Spin(a) => a,
            LocalAlphabet::Joint { .. } => {
                return Err(Error::Unsupported("joint table read as spin configurations".into()))
            }
        };
        let values = self.symbols(index).iter().map(|&s| a.value(s as usize)).collect();
        Config::new(self.volume.clone(), values)
    }

    /// Symbols of a spin configuration on this table's volume.
    pub fn encode(&self, config: &Config) -> Result<Vec<u8>> {
        if config.volume() != &self.volume {
            return Err(Error::VolumeMismatch("configuration volume differs from table".into()));
        }
        config
            .values()
            .iter()
            .map(|&v| self.alphabet.encode(v, None))
            .collect()
    }

    pub fn prob(&self, config: &Config) -> Result<f64> {
        Ok(self.probs[self.index(&self.encode(config)?)])
    }

    /// Exact marginal on `sub`.
    pub fn marginal(&self, sub: &Volume) -> Result<ProbTable> {
        if !sub.is_subset_of(&self.volume) {
            return Err(Error::VolumeMismatch("marginal volume not inside the table".into()));
        }
        let q = self.q();
        let n = self.volume.len();
        let weights = sub_weights(&self.volume, sub, q);
        let mut probs = vec![0.0; q.pow(sub.len() as u32)];
        for (i, &p) in self.probs.iter().enumerate() {
            probs[project(i, &weights, q, n)] += p;
        }
        Ok(ProbTable {
            volume: sub.clone(),
            alphabet: self.alphabet.clone(),
            probs,
        })
    }

    /// Law on `sub` given symbols `fixed` on the rest of the volume (listed in volume order).
    pub fn conditional_symbols(&self, sub: &Volume, fixed: &[u8]) -> Result<ProbTable> {
        if !sub.is_subset_of(&self.volume) {
            return Err(Error::VolumeMismatch("conditioning volume not inside the table".into()));
        }
        let rest = self.volume.difference(sub);
        if fixed.len() != rest.len() {
            return Err(Error::VolumeMismatch("conditioning values do not cover the complement".into()));
        }
        let q = self.q();
        let n = self.volume.len();
        let sub_w = sub_weights(&self.volume, sub, q);
        let rest_w = sub_weights(&self.volume, &rest, q);
        let target = index_of(fixed, q);
        let mut probs = vec![0.0; q.pow(sub.len() as u32)];
        for (i, &p) in self.probs.iter().enumerate() {
            if project(i, &rest_w, q, n) == target {
                probs[project(i, &sub_w, q, n)] += p;
            }
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroProbability);
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
        Ok(ProbTable {
            volume: sub.clone(),
            alphabet: self.alphabet.clone(),
            probs,
        })
    }

    /// Law on `sub` given the spin configuration `outside` on the rest of the volume.
    pub fn conditional(&self, sub: &Volume, outside: &Config) -> Result<ProbTable> {
        let rest = self.volume.difference(sub);
        let fixed = outside
            .restrict(&rest)?
            .values()
            .iter()
            .map(|&v| self.alphabet.encode(v, None))
            .collect::<Result<Vec<_>>>()?;
        self.conditional_symbols(sub, &fixed)
    }

    /// The same table on the volume shifted by `x`.
    pub fn shift(&self, x: &crate::lattice::Site) -> ProbTable {
        ProbTable {
            volume: self.volume.translate(x),
            alphabet: self.alphabet.clone(),
            probs: self.probs.clone(),
        }
    }

    /// Expectation of a function of the symbols.
    pub fn expect(&self, mut f: impl FnMut(&[u8]) -> f64) -> f64 {
        let mut total = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                total += p * f(&self.symbols(i));
            }
        }
        total
    }
}

pub(crate) fn symbols_of(mut index: usize, q: usize, n: usize) -> Vec<u8> {
    let mut out = vec![0u8; n];
    for slot in out.iter_mut().rev() {
        *slot = (index % q) as u8;
        index /= q;
    }
    out
}

pub(crate) fn index_of(symbols: &[u8], q: usize) -> usize {
    symbols.iter().fold(0, |acc, &s| acc * q + s as usize)
}

/// For each position of `vol`, its weight in the mixed-radix index of `sub` (0 if absent).
fn sub_weights(vol: &Volume, sub: &Volume, q: usize) -> Vec<usize> {
    let m = sub.len();
    vol.sites()
        .iter()
        .map(|s| match sub.index_of(s) {
            Some(j) => q.pow((m - 1 - j) as u32),
            None => 0,
        })
        .collect()
}

fn project(mut index: usize, weights: &[usize], q: usize, n: usize) -> usize {
    let mut out = 0;
    for p in (0..n).rev() {
        out += (index % q) * weights[p];
        index /= q;
    }
    out
}
