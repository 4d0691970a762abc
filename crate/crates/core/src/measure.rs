//! Exact finite-volume measures and the entropy functionals evaluated on them.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{boundary_shell, concat, cube, Config, Site, Volume};
use crate::numeric::{xlogx, Extended};
use crate::potential::{LocalAlphabet, Potential};
use crate::specification::{kernel, GibbsSpecification, KernelTable};
use crate::table::ProbTable;
use crate::transfer::TransferChain;

/// `exp(-H_Λ(σ|ω)) / Z_Λ(ω)` as a measure on the configurations of `vol`.
pub fn exact_gibbs(phi: &Potential, vol: &Volume, omega: &Config) -> Result<ProbTable> {
    let spec = GibbsSpecification::new(phi.clone())?;
    Ok(kernel(&spec, vol, omega)?.into_table())
}

/// A translation-invariant measure known either by an exact table or as a d=1 chain.
#[derive(Clone, Copy, Debug)]
pub enum Source<'a> {
    Table(&'a ProbTable),
    Chain(&'a TransferChain),
}

impl Source<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Source::Table(t) => t.volume().dim(),
            Source::Chain(_) => 1,
        }
    }

    /// Exact marginal on `vol`.
    pub fn window(&self, vol: &Volume) -> Result<ProbTable> {
        match self {
            Source::Table(t) => t.marginal(vol),
            Source::Chain(c) => c.window_table(vol),
        }
    }

    fn alphabet(&self) -> &LocalAlphabet {
        match self {
            Source::Table(t) => t.alphabet(),
            Source::Chain(c) => c.alphabet(),
        }
    }
}

/// The reference measure `λ` of a specific energy: the point mass on `+`, or a table.
#[derive(Clone, Copy, Debug)]
pub enum Reference<'a> {
    Plus,
    Table(&'a ProbTable),
}

impl Reference<'_> {
    fn window(&self, alphabet: &LocalAlphabet, vol: &Volume) -> Result<ProbTable> {
        match self {
            Reference::Plus => {
                let plus = alphabet.encode(1, None)?;
                ProbTable::point_mass(vol.clone(), alphabet.clone(), &vec![plus; vol.len()])
            }
            Reference::Table(t) => t.marginal(vol),
        }
    }
}

/// `Σ μ log(μ/ν)` on a common volume; infinite when `μ` charges a `ν`-null configuration.
pub fn relative_entropy(mu: &ProbTable, nu: &ProbTable) -> Result<Extended> {
    if mu.volume() != nu.volume() || mu.q() != nu.q() {
        return Err(Error::VolumeMismatch("relative entropy needs tables on the same volume".into()));
    }
    let mut total = 0.0;
    for (&p, &q) in mu.probs().iter().zip(nu.probs()) {
        if p > 0.0 {
            if q == 0.0 {
                return Ok(Extended::Infinite);
            }
            total += p * (p / q).ln();
        }
    }
    Ok(Extended::Finite(total))
}

/// `h_n(μ) = -(1/|Λ_n|) Σ μ(σ_{Λ_n}) log μ(σ_{Λ_n})`.
pub fn ks_entropy_rate(source: Source, n: u32) -> Result<f64> {
    let vol = cube(n, source.dim());
    match source {
        Source::Chain(c) => Ok(c.window_entropy(vol.len()) / vol.len() as f64),
        Source::Table(t) => {
            let m = t.marginal(&vol)?;
            Ok(-m.probs().iter().map(|&p| xlogx(p)).sum::<f64>() / vol.len() as f64)
        }
    }
}

/// `h_{Λ_n}(μ|ν) / |Λ_n|`.
pub fn relative_entropy_rate(mu: Source, nu: Source, n: u32) -> Result<Extended> {
    let vol = cube(n, mu.dim());
    let size = vol.len() as f64;
    if let (Source::Chain(a), Source::Chain(b)) = (mu, nu) {
        return Ok(Extended::Finite(a.window_relative_entropy(b, vol.len())? / size));
    }
    Ok(relative_entropy(&mu.window(&vol)?, &nu.window(&vol)?)?.map(|v| v / size))
}

/// `-(1/|Λ_n|) ∫ log ν(ξ_{Λ_n}) λ(dξ)`; infinite when `λ` charges a `ν`-null configuration.
pub fn specific_energy(nu: Source, lambda: Reference, n: u32) -> Result<Extended> {
    let vol = cube(n, nu.dim());
    let size = vol.len() as f64;
    if let (Source::Chain(c), Reference::Plus) = (nu, lambda) {
        let plus = c.alphabet().encode(1, None)?;
        return Ok(Extended::Finite(-c.log_prob(&vec![plus; vol.len()]) / size));
    }
    let ref_table = lambda.window(nu.alphabet(), &vol)?;
    let mut total = 0.0;
    match nu {
        Source::Chain(c) => {
            for (i, &w) in ref_table.probs().iter().enumerate() {
                if w > 0.0 {
                    total += w * c.log_prob(&ref_table.symbols(i));
                }
            }
        }
        Source::Table(t) => {
            let m = t.marginal(&vol)?;
            for (&w, &p) in ref_table.probs().iter().zip(m.probs()) {
                if w > 0.0 {
                    if p == 0.0 {
                        return Ok(Extended::Infinite);
                    }
                    total += w * p.ln();
                }
            }
        }
    }
    Ok(Extended::Finite(-total / size))
}

/// The finite-n terms of `-h(μ) + e^λ_ν - ∫∫ log(γ_0(σ^ξ|σ^ξ) / γ_0(ξ|σ^ξ)) μ(dσ) λ(dξ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyFormula {
    pub n: u32,
    pub entropy: f64,
    pub specific_energy: Extended,
    pub relative_energy: f64,
}

impl EntropyFormula {
    pub fn rhs(&self) -> Extended {
        Extended::Finite(-self.entropy) + self.specific_energy + Extended::Finite(-self.relative_energy)
    }
}

/// Evaluate the entropy formula at finite `n`; the relative-energy integral is
/// exact because it only involves sites within the range of the origin.
pub fn entropy_formula_rhs(
    spec: &GibbsSpecification,
    mu: Source,
    nu: Source,
    lambda: Reference,
    n: u32,
) -> Result<EntropyFormula> {
    let entropy = ks_entropy_rate(mu, n)?;
    let specific_energy = specific_energy(nu, lambda, n)?;
    let relative_energy = relative_energy_integral(spec, mu, lambda)?;
    Ok(EntropyFormula {
        n,
        entropy,
        specific_energy,
        relative_energy,
    })
}

/// `∫∫ log(γ_0(σ^ξ|σ^ξ) / γ_0(ξ|σ^ξ)) μ(dσ) λ(dξ)`.
pub fn relative_energy_integral(spec: &GibbsSpecification, mu: Source, lambda: Reference) -> Result<f64> {
    let d = spec.dim();
    let window = cube(spec.range(), d);
    let site = Volume::new(d, [Site::origin(d)])?;
    let shell = boundary_shell(&site, spec.range());
    let mu_w = mu.window(&window)?;
    let lambda_w = lambda.window(mu_w.alphabet(), &window)?;
    let mut cache: HashMap<Vec<i8>, KernelTable> = HashMap::new();
    let mut total = 0.0;
    for (i, &p) in mu_w.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let sigma = mu_w.config(i)?;
        for (j, &w) in lambda_w.probs().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let xi = lambda_w.config(j)?;
            let omega = concat(&sigma, &xi)?.restrict(&shell)?;
            let key = omega.values().to_vec();
            if !cache.contains_key(&key) {
                cache.insert(key.clone(), kernel(spec, &site, &omega)?);
            }
            let k = &cache[&key];
            let s0 = k.log_prob(&sigma.restrict(&site)?)?;
            let x0 = k.log_prob(&xi.restrict(&site)?)?;
            total += p * w * (s0 - x0);
        }
    }
    Ok(total)
}

/// The terms of the two finite-volume splittings of `h_n(μ|ν)`:
/// `h_n(μ|ν) = -h_n(μ) - A_ν - (1/|Λ_n|) log ν(+)` and
/// `h_n(μ|ν) = A_μ - A_ν + (1/|Λ_n|) log(μ(+)/ν(+))`,
/// with `A_ρ = (1/|Λ_n|) Σ μ(σ) log(ρ(σ)/ρ(+))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decomposition {
    pub n: u32,
    pub relative_entropy: f64,
    pub entropy: f64,
    pub mu_energy: f64,
    pub nu_energy: f64,
    pub log_mu_plus: f64,
    pub log_nu_plus: f64,
}

impl Decomposition {
    pub fn entropy_form(&self) -> f64 {
        -self.entropy - self.nu_energy - self.log_nu_plus
    }

    pub fn plus_form(&self) -> f64 {
        self.mu_energy - self.nu_energy + (self.log_mu_plus - self.log_nu_plus)
    }
}

/// Evaluate both splittings on the window `Λ_n`; needs `ν > 0` where `μ > 0` and `μ(+), ν(+) > 0`.
pub fn decompose(mu: &ProbTable, nu: &ProbTable, n: u32) -> Result<Decomposition> {
    let vol = cube(n, mu.volume().dim());
    let size = vol.len() as f64;
    let m = mu.marginal(&vol)?;
    let v = nu.marginal(&vol)?;
    let plus_sym = m.alphabet().encode(1, None)?;
    let plus = m.index(&vec![plus_sym; vol.len()]);
    let (mp, vp) = (m.probs()[plus], v.probs()[plus]);
    if mp == 0.0 || vp == 0.0 {
        return Err(Error::ZeroProbability);
    }
    let rel = relative_entropy(&m, &v)?.finite().ok_or(Error::ZeroProbability)?;
    let (mut entropy, mut mu_energy, mut nu_energy) = (0.0, 0.0, 0.0);
    for (&p, &q) in m.probs().iter().zip(v.probs()) {
        if p > 0.0 {
            entropy -= p * p.ln();
            mu_energy += p * (p / mp).ln();
            nu_energy += p * (q / vp).ln();
        }
    }
    Ok(Decomposition {
        n,
        relative_entropy: rel / size,
        entropy: entropy / size,
        mu_energy: mu_energy / size,
        nu_energy: nu_energy / size,
        log_mu_plus: mp.ln() / size,
        log_nu_plus: vp.ln() / size,
    })
}

/// Largest number of sites for the exhaustive up-set check.
pub const DOMINATION_MAX_SITES: usize = 4;

/// `μ ⪯ ν`: `μ(U) ≤ ν(U)` for every up-set `U` of the coordinatewise order.
pub fn check_domination(mu: &ProbTable, nu: &ProbTable) -> Result<bool> {
    if mu.volume() != nu.volume() || mu.alphabet() != nu.alphabet() {
        return Err(Error::VolumeMismatch("domination needs tables on the same volume".into()));
    }
    if mu.q() != 2 || mu.alphabet().is_joint() {
        return Err(Error::Unsupported("domination check needs a binary alphabet".into()));
    }
    let n = mu.volume().len();
    if n > DOMINATION_MAX_SITES {
        return Err(Error::InvalidArgument(format!(
            "{n} sites is too many for exhaustive up-set enumeration (max {DOMINATION_MAX_SITES})"
        )));
    }
    let states = 1usize << n;
    // covers[c]: configurations obtained by raising one coordinate of c
    let covers: Vec<u32> = (0..states)
        .map(|c| {
            (0..n)
                .filter(|b| c & (1 << b) == 0)
                .fold(0u32, |acc, b| acc | 1 << (c | 1 << b))
        })
        .collect();
    for set in 0u64..(1u64 << states) {
        let set = set as u32;
        let upward = (0..states).all(|c| set & (1 << c) == 0 || covers[c] & !set == 0);
        if !upward {
            continue;
        }
        let (mut pm, mut pn) = (0.0, 0.0);
        for c in 0..states {
            if set & (1 << c) != 0 {
                pm += mu.probs()[c];
                pn += nu.probs()[c];
            }
        }
        if pm > pn + 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Configurations produced by a sampler, with what is needed to reproduce them.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalSample {
    pub configs: Vec<Config>,
    pub seed: u64,
    pub sweeps: usize,
    pub sampler: String,
}

impl EmpiricalSample {
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn volume(&self) -> Option<&Volume> {
        self.configs.first().map(Config::volume)
    }

    /// Sample mean of `f`.
    pub fn mean(&self, f: impl Fn(&Config) -> f64) -> f64 {
        self.configs.iter().map(f).sum::<f64>() / self.configs.len() as f64
    }
}

/// Single-site heat-bath dynamics targeting `γ_Λ(·|ω)`: sites updated in
/// lexicographic order, one configuration recorded after each sweep.
pub fn heatbath_sample(
    spec: &GibbsSpecification,
    vol: &Volume,
    omega: &Config,
    sweeps: usize,
    seed: u64,
) -> Result<EmpiricalSample> {
    if sweeps == 0 {
        return Err(Error::InvalidArgument("sweeps must be at least 1".into()));
    }
    let phi = spec.potential();
    let a = spec.spin_alphabet();
    let q = a.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<i8> = (0..vol.len()).map(|_| a.value(rng.gen_range(0..q))).collect();
    let mut state = Config::new(vol.clone(), start)?;
    // one single-site kernel table per site, rebuilt from the current neighbourhood
    let sites: Vec<(Site, Volume, Volume)> = vol
        .sites()
        .iter()
        .map(|x| {
            let one = Volume::new(vol.dim(), [x.clone()]).unwrap();
            let shell = boundary_shell(&one, phi.range());
            (x.clone(), one, shell)
        })
        .collect();
    let mut configs = Vec::with_capacity(sweeps);
    for _ in 0..sweeps {
        for (x, one, shell) in &sites {
            let neighbourhood = Config::from_fn(shell.clone(), |y| {
                state.get(y).or_else(|| omega.get(y)).unwrap_or(a.value(0))
            });
            if let Some(y) = shell.sites().iter().find(|y| state.get(y).or_else(|| omega.get(y)).is_none()) {
                return Err(Error::ShellTooThin {
                    range: phi.range() as usize,
                    missing: y.to_string(),
                });
            }
            let k = kernel(spec, one, &neighbourhood)?;
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut pick = q - 1;
            for (i, &p) in k.table().probs().iter().enumerate() {
                acc += p;
                if u < acc {
                    pick = i;
                    break;
                }
            }
            state.set(x, a.value(pick))?;
        }
        configs.push(state.clone());
    }
    Ok(EmpiricalSample {
        configs,
        seed,
        sweeps,
        sampler: "heat-bath".into(),
    })
}
