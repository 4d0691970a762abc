//! Decimation and the GriSing random field.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::check_cap;
use crate::error::{Error, Result};
use crate::lattice::{cube, Config, LocalFunction, Site, Volume};
use crate::measure::EmpiricalSample;
use crate::numeric::{log_sum_exp, wilson_interval, Odometer};
use crate::potential::{Alphabet, LocalAlphabet};
use crate::specification::KernelSource;
use crate::table::ProbTable;
use crate::unionfind::UnionFind;

/// Clusters up to this size are sampled exactly; larger ones by heat-bath.
pub const EXACT_CLUSTER_SITES: usize = 20;

/// Default heat-bath sweep budget for clusters too large to sample exactly.
pub const DEFAULT_CLUSTER_SWEEPS: usize = 1000;

/// Empty/occupied sites of a box.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyField {
    pub volume: Volume,
    pub occupied: Vec<bool>,
    pub p: f64,
}

impl OccupancyField {
    /// Independent Bernoulli(`p`) occupations.
    pub fn sample<R: Rng + ?Sized>(p: f64, volume: Volume, rng: &mut R) -> Self {
        let occupied = (0..volume.len()).map(|_| rng.gen::<f64>() < p).collect();
        OccupancyField { volume, occupied, p }
    }

    pub fn is_occupied(&self, x: &Site) -> bool {
        self.volume.index_of(x).map(|i| self.occupied[i]).unwrap_or(false)
    }
}

/// Maximal nearest-neighbour connected sets of occupied sites.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterLabeling {
    /// Cluster id of each site of the box, `None` for empty sites.
    pub label: Vec<Option<usize>>,
    pub clusters: Vec<Vec<Site>>,
    /// Whether each cluster has a nearest neighbour outside the box.
    pub open: Vec<bool>,
}

impl ClusterLabeling {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// Connected components of the occupied sites, computed inside the box only.
pub fn cluster_find(occ: &OccupancyField) -> ClusterLabeling {
    clusters_of(&occ.volume, |i| occ.occupied[i])
}

fn clusters_of(vol: &Volume, occupied: impl Fn(usize) -> bool) -> ClusterLabeling {
    let n = vol.len();
    let mut uf = UnionFind::new(n);
    for (i, x) in vol.sites().iter().enumerate() {
        if !occupied(i) {
            continue;
        }
        for y in x.neighbours() {
            if let Some(j) = vol.index_of(&y) {
                if occupied(j) {
                    uf.union(i, j);
                }
            }
        }
    }
    let mut label = vec![None; n];
    let mut clusters = Vec::new();
    let mut open = Vec::new();
    for group in uf.groups() {
        if !occupied(group[0]) {
            continue;
        }
        let id = clusters.len();
        let sites: Vec<Site> = group.iter().map(|&i| vol.sites()[i].clone()).collect();
        for &i in &group {
            label[i] = Some(id);
        }
        open.push(sites.iter().any(|x| x.neighbours().any(|y| !vol.contains(&y))));
        clusters.push(sites);
    }
    ClusterLabeling {
        label,
        clusters,
        open,
    }
}

/// Nearest-neighbour bonds inside a cluster, as index pairs.
fn cluster_bonds(sites: &[Site]) -> Vec<(usize, usize)> {
    let mut bonds = Vec::new();
    for (i, x) in sites.iter().enumerate() {
        for (j, y) in sites.iter().enumerate().skip(i + 1) {
            if x.sub(y).coords().iter().map(|c| c.unsigned_abs()).sum::<u32>() == 1 {
                bonds.push((i, j));
            }
        }
    }
    bonds
}

fn spin_of(bits: usize, i: usize, n: usize) -> f64 {
    if bits >> (n - 1 - i) & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

fn bond_sum(bits: usize, n: usize, bonds: &[(usize, usize)]) -> f64 {
    bonds.iter().map(|&(i, j)| spin_of(bits, i, n) * spin_of(bits, j, n)).sum()
}

/// `log Z` of the free-boundary Ising measure `exp(β Σ σ_x σ_y)` on a cluster.
fn cluster_log_z(n: usize, bonds: &[(usize, usize)], beta: f64) -> Result<f64> {
    check_cap(2f64.powi(n as i32))?;
    let logs: Vec<f64> = (0..1usize << n).map(|b| beta * bond_sum(b, n, bonds)).collect();
    Ok(log_sum_exp(&logs))
}

/// One GriSing configuration `ξ = σ·η` with how each cluster was sampled.
#[derive(Clone, Debug, PartialEq)]
pub struct GriSingSample {
    pub config: Config,
    pub clusters: usize,
    pub open_clusters: usize,
    pub exact_clusters: usize,
    pub heatbath_clusters: usize,
    pub seed: u64,
}

/// The GriSing alphabet `{-1, 0, +1}`.
pub fn grising_alphabet() -> Alphabet {
    Alphabet::new(vec![-1, 0, 1]).unwrap()
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} is outside [0, 1)")));
    }
    Ok(())
}

/// Sample the GriSing field on `vol`.
pub fn grising_sample(p: f64, beta: f64, vol: &Volume, seed: u64) -> Result<GriSingSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    grising_sample_with(p, beta, vol, &mut rng, seed, DEFAULT_CLUSTER_SWEEPS)
}

/// Sample with a caller-owned generator; `seed` is recorded only.
pub fn grising_sample_with<R: Rng + ?Sized>(
    p: f64,
    beta: f64,
    vol: &Volume,
    rng: &mut R,
    seed: u64,
    sweeps: usize,
) -> Result<GriSingSample> {
    check_p(p)?;
    let occ = OccupancyField::sample(p, vol.clone(), rng);
    let labels = cluster_find(&occ);
    let mut values = vec![0i8; vol.len()];
    let (mut exact, mut heat) = (0, 0);
    for sites in &labels.clusters {
        let n = sites.len();
        let bonds = cluster_bonds(sites);
        let spins = if n <= EXACT_CLUSTER_SITES {
            exact += 1;
            sample_cluster_exact(n, &bonds, beta, rng)
        } else {
            heat += 1;
            sample_cluster_heatbath(n, &bonds, beta, sweeps, rng)
        };
        for (x, s) in sites.iter().zip(spins) {
            values[vol.index_of(x).unwrap()] = s;
        }
    }
    Ok(GriSingSample {
        config: Config::new(vol.clone(), values)?,
        clusters: labels.len(),
        open_clusters: labels.open.iter().filter(|&&o| o).count(),
        exact_clusters: exact,
        heatbath_clusters: heat,
        seed,
    })
}

fn sample_cluster_exact<R: Rng + ?Sized>(n: usize, bonds: &[(usize, usize)], beta: f64, rng: &mut R) -> Vec<i8> {
    let logs: Vec<f64> = (0..1usize << n).map(|b| beta * bond_sum(b, n, bonds)).collect();
    let log_z = log_sum_exp(&logs);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut pick = logs.len() - 1;
    for (b, l) in logs.iter().enumerate() {
        acc += (l - log_z).exp();
        if u < acc {
            pick = b;
            break;
        }
    }
    (0..n).map(|i| spin_of(pick, i, n) as i8).collect()
}

fn sample_cluster_heatbath<R: Rng + ?Sized>(
    n: usize,
    bonds: &[(usize, usize)],
    beta: f64,
    sweeps: usize,
    rng: &mut R,
) -> Vec<i8> {
    let mut nbrs = vec![Vec::new(); n];
    for &(i, j) in bonds {
        nbrs[i].push(j);
        nbrs[j].push(i);
    }
    let mut s: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    for _ in 0..sweeps {
        for i in 0..n {
            let field: f64 = nbrs[i].iter().map(|&j| s[j] as f64).sum();
            let up = 1.0 / (1.0 + (-2.0 * beta * field).exp());
            s[i] = if rng.gen::<f64>() < up { 1 } else { -1 };
        }
    }
    s
}

/// `log P(ξ)` of the GriSing law on `vol` (clusters cut at the box boundary).
pub fn grising_log_prob(p: f64, beta: f64, xi: &Config, cache: &mut HashMap<Vec<Site>, f64>) -> Result<f64> {
    let vol = xi.volume();
    let labels = clusters_of(vol, |i| xi.values()[i] != 0);
    let mut lp = 0.0;
    for &v in xi.values() {
        lp += if v == 0 { (1.0 - p).ln() } else { p.ln() };
    }
    for sites in &labels.clusters {
        let base = sites[0].clone();
        let shape: Vec<Site> = sites.iter().map(|s| s.sub(&base)).collect();
        let bonds = cluster_bonds(sites);
        let log_z = match cache.get(&shape) {
            Some(&z) => z,
            None => {
                let z = cluster_log_z(sites.len(), &bonds, beta)?;
                cache.insert(shape, z);
                z
            }
        };
        let energy: f64 = bonds
            .iter()
            .map(|&(i, j)| (xi.get(&sites[i]).unwrap() * xi.get(&sites[j]).unwrap()) as f64)
            .sum();
        lp += beta * energy - log_z;
    }
    Ok(lp)
}

/// The exact GriSing law on a small box.
pub fn grising_table(p: f64, beta: f64, vol: &Volume) -> Result<ProbTable> {
    check_p(p)?;
    let a = grising_alphabet();
    let n = vol.len();
    check_cap(3f64.powi(n as i32))?;
    let mut cache = HashMap::new();
    let mut probs = Vec::with_capacity(3usize.pow(n as u32));
    let mut odo = Odometer::new(vec![3; n]);
    while odo.advance().is_some() {
        let xi = Config::new(vol.clone(), odo.digits().iter().map(|&d| a.value(d)).collect())?;
        probs.push(grising_log_prob(p, beta, &xi, &mut cache)?.exp());
    }
    ProbTable::new(vol.clone(), LocalAlphabet::Spin(a), probs)
}

/// Exact and sampled per-site log-probability of `ξ_{Λ_n} ≡ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroRate {
    pub exact: f64,
    /// `log(1 - p)` evaluated directly.
    pub closed_form: f64,
    pub empirical: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub hits: u64,
    pub samples: u64,
}

impl ZeroRate {
    pub fn covers(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Zero-rate identity on `Λ_n`: exact from the GriSing table when it fits the
/// enumeration cap (otherwise from the occupancy law), empirical from `samples`
/// draws with a `z`-sigma Wilson interval mapped to the log scale.
pub fn grising_zero_rate(p: f64, beta: f64, n: u32, dim: usize, samples: u64, seed: u64, z: f64) -> Result<ZeroRate> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} is outside (0, 1)")));
    }
    let vol = cube(n, dim);
    let size = vol.len() as f64;
    let exact = if 3f64.powi(vol.len() as i32) <= (1 << 16) as f64 {
        let table = grising_table(p, beta, &vol)?;
        table.prob(&Config::constant(vol.clone(), 0))?.ln() / size
    } else {
        vol.sites().iter().map(|_| (1.0 - p).ln()).sum::<f64>() / size
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    for _ in 0..samples {
        let s = grising_sample_with(p, beta, &vol, &mut rng, seed, DEFAULT_CLUSTER_SWEEPS)?;
        if s.config.values().iter().all(|&v| v == 0) {
            hits += 1;
        }
    }
    let (lo, hi) = wilson_interval(hits, samples, z);
    let rate = |f: f64| if f > 0.0 { f.ln() / size } else { f64::NEG_INFINITY };
    Ok(ZeroRate {
        exact,
        closed_form: (1.0 - p).ln(),
        empirical: rate(hits as f64 / samples as f64),
        ci_low: rate(lo),
        ci_high: rate(hi),
        hits,
        samples,
    })
}

/// GriSing conditional probabilities on a box, from the finite-volume law on
/// the surrogate cube of radius `surrogate_radius`.
pub struct GriSingSource {
    pub p: f64,
    pub beta: f64,
    pub volume: Volume,
    pub surrogate_radius: u32,
    alphabet: Alphabet,
}

impl GriSingSource {
    pub fn new(p: f64, beta: f64, volume: Volume, surrogate_radius: u32) -> Result<Self> {
        check_p(p)?;
        if !volume.is_subset_of(&cube(surrogate_radius, volume.dim())) {
            return Err(Error::InvalidArgument("box must lie inside the surrogate cube".into()));
        }
        Ok(GriSingSource {
            p,
            beta,
            volume,
            surrogate_radius,
            alphabet: grising_alphabet(),
        })
    }

    fn surrogate(&self) -> Volume {
        cube(self.surrogate_radius, self.volume.dim())
    }

    /// Law of `ξ_Λ` given `ξ` on the rest of the surrogate cube.
    pub fn conditional(&self, outside: &Config) -> Result<ProbTable> {
        let full = self.surrogate();
        let rest = full.difference(&self.volume);
        let outside = outside.restrict(&rest)?;
        let n = self.volume.len();
        check_cap(3f64.powi(n as i32))?;
        let mut cache = HashMap::new();
        let mut logs = Vec::with_capacity(3usize.pow(n as u32));
        let mut odo = Odometer::new(vec![3; n]);
        while odo.advance().is_some() {
            let inside = Config::new(
                self.volume.clone(),
                odo.digits().iter().map(|&d| self.alphabet.value(d)).collect(),
            )?;
            logs.push(-grising_log_prob(self.p, self.beta, &inside.merge(&outside), &mut cache)?);
        }
        let (table, _) = ProbTable::from_energies(self.volume.clone(), LocalAlphabet::Spin(self.alphabet.clone()), &logs);
        Ok(table)
    }
}

impl KernelSource for GriSingSource {
    fn dim(&self) -> usize {
        self.volume.dim()
    }

    fn exterior_alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn dependence(&self, f: &LocalFunction) -> Result<Volume> {
        let full = self.surrogate();
        if f.support().iter().any(|s| !full.contains(s)) {
            return Err(Error::InvalidArgument("function support leaves the surrogate cube".into()));
        }
        Ok(full.difference(&self.volume))
    }

    fn expect(&self, omega: &Config, f: &LocalFunction) -> Result<f64> {
        let table = self.conditional(omega)?;
        let mut total = 0.0;
        for (i, &p) in table.probs().iter().enumerate() {
            let inside = table.config(i)?;
            total += p * f.eval_with(|s| inside.get(s).or_else(|| omega.get(s)))?;
        }
        Ok(total)
    }
}

/// Restriction to the sublattice `bℤ^d`, relabelled by `x ↦ x / b`.
pub trait Decimate: Sized {
    fn decimate(&self, b: u32) -> Result<Self>;
}

fn sublattice(vol: &Volume, b: u32) -> Result<(Volume, Volume)> {
    if b == 0 {
        return Err(Error::InvalidArgument("decimation factor must be positive".into()));
    }
    let b = b as i32;
    let kept: Vec<Site> = vol
        .sites()
        .iter()
        .filter(|s| s.coords().iter().all(|c| c % b == 0))
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::WindowTooSmall("no sublattice site inside the box".into()));
    }
    let relabelled = kept.iter().map(|s| Site::new(s.coords().iter().map(|c| c / b).collect()));
    Ok((Volume::new(vol.dim(), kept.clone())?, Volume::new(vol.dim(), relabelled)?))
}

impl Decimate for Config {
    fn decimate(&self, b: u32) -> Result<Config> {
        let (kept, relabelled) = sublattice(self.volume(), b)?;
        Config::new(relabelled, self.restrict(&kept)?.values().to_vec())
    }
}

impl Decimate for ProbTable {
    fn decimate(&self, b: u32) -> Result<ProbTable> {
        let (kept, relabelled) = sublattice(self.volume(), b)?;
        let m = self.marginal(&kept)?;
        ProbTable::new(relabelled, m.alphabet().clone(), m.probs().to_vec())
    }
}

impl Decimate for EmpiricalSample {
    fn decimate(&self, b: u32) -> Result<EmpiricalSample> {
        Ok(EmpiricalSample {
            configs: self.configs.iter().map(|c| c.decimate(b)).collect::<Result<_>>()?,
            seed: self.seed,
            sweeps: self.sweeps,
            sampler: format!("{} decimated by {b}", self.sampler),
        })
    }
}
