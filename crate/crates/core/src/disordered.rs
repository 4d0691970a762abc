//! Quenched disorder: quenched kernels, finite-volume joint (spin, disorder)
//! measures, their explicit conditional probabilities, entropy bounds,
//! decoupling ratios and the decompositions of their relative entropy and
//! specific energy.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::energy::{check_cap, BoxEnergies, Interactions};
use crate::error::{Error, Result};
use crate::lattice::{boundary_shell, cube, Config, Site, Volume};
use crate::measure::relative_entropy;
use crate::numeric::{entropy, log_sum_exp, Extended};
use crate::potential::{boundary_oscillation, Alphabet, LocalAlphabet, Potential, Term};
use crate::specification::{kernel, GibbsSpecification};
use crate::table::ProbTable;

/// A product law on disorder fields: every site independently distributed as `P0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DisorderLaw {
    support: Alphabet,
    probs: Vec<f64>,
}

impl DisorderLaw {
    /// Law with `probs[i]` the probability of `values[i]`; all probabilities must be positive.
    pub fn new(values: Vec<i8>, probs: Vec<f64>) -> Result<Self> {
        if values.len() != probs.len() {
            return Err(Error::InvalidArgument("values and probabilities differ in length".into()));
        }
        let support = Alphabet::new(values.clone())?;
        if support.len() != values.len() {
            return Err(Error::InvalidArgument("repeated disorder value".into()));
        }
        if probs.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::InvalidArgument("disorder probabilities must be positive".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("disorder probabilities sum to {total}")));
        }
        let mut sorted = vec![0.0; probs.len()];
        for (v, p) in values.iter().zip(&probs) {
            sorted[support.index_of(*v)?] = *p;
        }
        Ok(DisorderLaw {
            support,
            probs: sorted,
        })
    }

    /// Uniform law on `{-1, +1}`.
    pub fn symmetric_spins() -> Self {
        DisorderLaw {
            support: Alphabet::spins(),
            probs: vec![0.5, 0.5],
        }
    }

    pub fn support(&self) -> &Alphabet {
        &self.support
    }

    /// Probabilities in support order.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, value: i8) -> Result<f64> {
        Ok(self.probs[self.support.index_of(value)?])
    }

    /// Whether `P0(v) = P0(-v)` for every value.
    pub fn is_symmetric(&self) -> bool {
        self.support
            .values()
            .iter()
            .zip(&self.probs)
            .all(|(&v, &p)| self.prob(-v).map_or(false, |q| q == p))
    }

    /// Shannon entropy of `P0`.
    pub fn entropy(&self) -> f64 {
        entropy(&self.probs)
    }

    /// `log P(η)` for a disorder field on any volume.
    pub fn log_prob(&self, eta: &Config) -> Result<f64> {
        eta.values().iter().map(|&v| Ok(self.prob(v)?.ln())).sum()
    }

    /// The product law restricted to `vol`, over the disorder values.
    pub fn product_table(&self, vol: &Volume) -> Result<ProbTable> {
        ProbTable::product(vol.clone(), LocalAlphabet::Spin(self.support.clone()), &self.probs)
    }

    /// An independent draw on `vol`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, vol: &Volume) -> Config {
        let dist = WeightedIndex::new(&self.probs).expect("positive weights");
        let values = (0..vol.len()).map(|_| self.support.value(dist.sample(rng))).collect();
        Config::new(vol.clone(), values).expect("one value per site")
    }
}

/// A spin configuration and a disorder configuration on the same volume.
#[derive(Clone, Debug, PartialEq)]
pub struct JointConfig {
    sigma: Config,
    eta: Config,
}

impl JointConfig {
    pub fn new(sigma: Config, eta: Config) -> Result<Self> {
        if sigma.volume() != eta.volume() {
            return Err(Error::VolumeMismatch("spin and disorder volumes differ".into()));
        }
        Ok(JointConfig { sigma, eta })
    }

    pub fn sigma(&self) -> &Config {
        &self.sigma
    }

    pub fn eta(&self) -> &Config {
        &self.eta
    }

    pub fn volume(&self) -> &Volume {
        self.sigma.volume()
    }

    pub fn restrict(&self, sub: &Volume) -> Result<JointConfig> {
        Ok(JointConfig {
            sigma: self.sigma.restrict(sub)?,
            eta: self.eta.restrict(sub)?,
        })
    }

    /// Local symbols in volume order.
    pub fn symbols(&self, alphabet: &LocalAlphabet) -> Result<Vec<u8>> {
        self.sigma
            .values()
            .iter()
            .zip(self.eta.values())
            .map(|(&s, &e)| alphabet.encode(s, Some(e)))
            .collect()
    }

    /// The joint configuration with local symbols `symbols` on `vol`.
    pub fn from_symbols(vol: &Volume, alphabet: &LocalAlphabet, symbols: &[u8]) -> Result<Self> {
        let (s, e): (Vec<i8>, Vec<i8>) = symbols
            .iter()
            .map(|&sym| {
                let (s, e) = alphabet.decode(sym);
                (s, e.unwrap_or(0))
            })
            .unzip();
        JointConfig::new(Config::new(vol.clone(), s)?, Config::new(vol.clone(), e)?)
    }
}

/// The finite-volume joint measure `K_Λ(σ_Λ, η_Λ) = P(η_Λ) μ_Λ^σ̄[η_Λ η̄](σ_Λ)`.
#[derive(Clone, Debug)]
pub struct JointTable {
    table: ProbTable,
    sigma_bar: Config,
    eta_bar: Config,
    radius: u32,
}

impl JointTable {
    pub fn table(&self) -> &ProbTable {
        &self.table
    }

    pub fn volume(&self) -> &Volume {
        self.table.volume()
    }

    /// Spin boundary condition on the shell.
    pub fn sigma_bar(&self) -> &Config {
        &self.sigma_bar
    }

    /// Disorder outside the box.
    pub fn eta_bar(&self) -> &Config {
        &self.eta_bar
    }

    /// Radius of the box the measure was built on.
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn window(&self, vol: &Volume) -> Result<ProbTable> {
        self.table.marginal(vol)
    }

    /// Law of the disorder field on the box.
    pub fn disorder_marginal(&self) -> Result<ProbTable> {
        disorder_marginal(&self.table)
    }

    /// Law of the spins on the box given the disorder field `eta` there.
    pub fn spin_conditional(&self, eta: &Config) -> Result<ProbTable> {
        if eta.volume() != self.volume() {
            return Err(Error::VolumeMismatch("disorder field must live on the box".into()));
        }
        let alphabet = self.table.alphabet();
        let spin = alphabet.spin().clone();
        let n = self.volume().len();
        let mut probs = vec![0.0; spin.len().pow(n as u32)];
        let mut total = 0.0;
        for (i, slot) in probs.iter_mut().enumerate() {
            let s = crate::table::symbols_of(i, spin.len(), n);
            let joint = s
                .iter()
                .zip(eta.values())
                .map(|(&k, &e)| alphabet.encode(spin.value(k as usize), Some(e)))
                .collect::<Result<Vec<_>>>()?;
            *slot = self.table.probs()[self.table.index(&joint)];
            total += *slot;
        }
        if total <= 0.0 {
            return Err(Error::ZeroProbability);
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
        ProbTable::new(self.volume().clone(), LocalAlphabet::Spin(spin), probs)
    }
}

/// Law of the disorder part of a joint table.
pub fn disorder_marginal(table: &ProbTable) -> Result<ProbTable> {
    let alphabet = table.alphabet();
    let disorder = alphabet
        .disorder()
        .ok_or_else(|| Error::InvalidArgument("disorder marginal of a spin table".into()))?
        .clone();
    let nd = disorder.len();
    let n = table.volume().len();
    let mut probs = vec![0.0; nd.pow(n as u32)];
    for (i, &p) in table.probs().iter().enumerate() {
        let d: Vec<u8> = table.symbols(i).iter().map(|&s| s % nd as u8).collect();
        probs[crate::table::index_of(&d, nd)] += p;
    }
    ProbTable::new(table.volume().clone(), LocalAlphabet::Spin(disorder), probs)
}

fn joint_alphabet(phi: &Potential) -> Result<(&Alphabet, &Alphabet)> {
    match phi.alphabet() {
        LocalAlphabet::Joint { spin, disorder } => Ok((spin, disorder)),
        LocalAlphabet::Spin(_) => Err(Error::InvalidArgument("a joint (spin, disorder) potential is required".into())),
    }
}

fn check_law(phi: &Potential, law: &DisorderLaw) -> Result<()> {
    let (_, disorder) = joint_alphabet(phi)?;
    if disorder != law.support() {
        return Err(Error::InvalidArgument("disorder law support differs from the potential's disorder alphabet".into()));
    }
    Ok(())
}

/// `μ_Λ^σ̄[η]`: the spin kernel on `vol` with disorder `eta` (box and shell) and spins `sigma_bar` outside.
pub fn quenched_kernel(phi: &Potential, vol: &Volume, eta: &Config, sigma_bar: &Config) -> Result<ProbTable> {
    let spec = GibbsSpecification::quenched(phi.clone(), eta.clone())?;
    Ok(kernel(&spec, vol, sigma_bar)?.into_table())
}

/// Disorder configurations of `vol` with their probabilities, in table order.
fn disorder_configs<'a>(law: &'a DisorderLaw, vol: &'a Volume) -> Result<impl Iterator<Item = (Config, f64)> + 'a> {
    let nd = law.support().len();
    let n = vol.len();
    check_cap((nd as f64).powi(n as i32))?;
    Ok((0..nd.pow(n as u32)).map(move |i| {
        let d = crate::table::symbols_of(i, nd, n);
        let mut p = 1.0;
        let values = d
            .iter()
            .map(|&k| {
                p *= law.probs()[k as usize];
                law.support().value(k as usize)
            })
            .collect();
        (Config::new(vol.clone(), values).unwrap(), p)
    }))
}

/// Exact joint table on `vol` with spin boundary `sigma_bar` and disorder `eta_bar` on the shell.
pub fn joint_table(
    phi: &Potential,
    law: &DisorderLaw,
    vol: &Volume,
    sigma_bar: &Config,
    eta_bar: &Config,
) -> Result<JointTable> {
    check_law(phi, law)?;
    let (spin, disorder) = joint_alphabet(phi)?;
    let (ns, nd) = (spin.len(), disorder.len());
    let q = ns * nd;
    let n = vol.len();
    check_cap((q as f64).powi(n as i32))?;
    let shell = boundary_shell(vol, phi.range());
    let eta_shell = eta_bar.restrict(&shell)?;
    let sigma_shell = sigma_bar.restrict(&shell)?;
    let weight = |i: usize| q.pow((n - 1 - i) as u32);
    let spin_offsets: Vec<usize> = (0..ns.pow(n as u32))
        .map(|k| {
            crate::table::symbols_of(k, ns, n)
                .iter()
                .enumerate()
                .map(|(i, &s)| s as usize * nd * weight(i))
                .sum()
        })
        .collect();
    let mut probs = vec![0.0; q.pow(n as u32)];
    for (k, (eta, p)) in disorder_configs(law, vol)?.enumerate() {
        let d_offset: usize = crate::table::symbols_of(k, nd, n)
            .iter()
            .enumerate()
            .map(|(i, &d)| d as usize * weight(i))
            .sum();
        let mu = quenched_kernel(phi, vol, &eta.merge(&eta_shell), &sigma_shell)?;
        for (j, &m) in mu.probs().iter().enumerate() {
            probs[spin_offsets[j] + d_offset] = p * m;
        }
    }
    let table = ProbTable::new(vol.clone(), phi.alphabet().clone(), probs)?;
    Ok(JointTable {
        table,
        sigma_bar: sigma_shell,
        eta_bar: eta_shell,
        radius: vol.radius(),
    })
}

/// `ΔH_Λ(η¹, η², η_out)(σ) = Σ_{A∩Λ≠∅} Φ_A(σ, η¹ η_out) - Φ_A(σ, η² η_out)`.
///
/// `sigma` must cover the box and its shell; `eta1`, `eta2` live on the box.
pub fn delta_h(
    phi: &Potential,
    vol: &Volume,
    eta1: &Config,
    eta2: &Config,
    eta_outside: &Config,
    sigma: &Config,
) -> Result<f64> {
    joint_alphabet(phi)?;
    if eta1.volume() != vol || eta2.volume() != vol {
        return Err(Error::VolumeMismatch("disorder fields must live on the box".into()));
    }
    let inter = Interactions::intersecting(phi, vol);
    let energy = |eta: &Config| -> Result<f64> {
        let mut err = None;
        let e = inter.energy(phi, |s| {
            let v = sigma.get(s)?;
            let d = eta.get(s).or_else(|| eta_outside.get(s))?;
            match phi.alphabet().encode(v, Some(d)) {
                Ok(sym) => Some(sym),
                Err(e) => {
                    err.get_or_insert(e);
                    Some(0)
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => e,
        }
    };
    Ok(energy(eta1)? - energy(eta2)?)
}

/// `Q_Λ(η¹, η², η_out) = μ(exp(-ΔH_Λ(η¹, η², η_out)))` for a spin law `mu`
/// (a surrogate for `μ[η² η_out]`) whose volume covers the box and its shell.
pub fn q_factor(
    mu: &ProbTable,
    phi: &Potential,
    vol: &Volume,
    eta1: &Config,
    eta2: &Config,
    eta_outside: &Config,
) -> Result<f64> {
    let needed = Interactions::intersecting(phi, vol).sites(phi.dim()).union(vol);
    if !needed.is_subset_of(mu.volume()) {
        return Err(Error::ShellTooThin {
            range: phi.range() as usize,
            missing: format!("{:?}", needed.difference(mu.volume())),
        });
    }
    let local = mu.marginal(&needed)?;
    let mut total = 0.0;
    for i in 0..local.len() {
        let p = local.probs()[i];
        if p > 0.0 {
            let sigma = local.config(i)?;
            total += p * (-delta_h(phi, vol, eta1, eta2, eta_outside, &sigma)?).exp();
        }
    }
    Ok(total)
}

/// The potential `Φ_A(σ, η) - 1_{A={x}} log P0(η_x)` on joint variables.
pub fn trivial_annealed(phi: &Potential, law: &DisorderLaw) -> Result<Potential> {
    check_law(phi, law)?;
    let alphabet = phi.alphabet().clone();
    let a = alphabet.clone();
    let site = Term::from_fn(vec![Site::origin(phi.dim())], phi.q(), |s| {
        -law.prob(a.decode(s[0]).1.unwrap()).unwrap().ln()
    })?;
    let mut terms = phi.terms().to_vec();
    terms.push(site);
    Potential::new(phi.dim(), alphabet, terms)
}

/// Exact Gibbs table of the trivial annealed potential on `vol`, with the
/// joint configuration `boundary` on the shell.
pub fn annealed_kernel(
    phi: &Potential,
    law: &DisorderLaw,
    vol: &Volume,
    boundary: &JointConfig,
) -> Result<ProbTable> {
    let triv = trivial_annealed(phi, law)?;
    let inter = Interactions::intersecting(&triv, vol);
    let engine = BoxEnergies::new(&triv, vol, &inter, |s| {
        let v = boundary.sigma().get(s)?;
        triv.alphabet().encode(v, Some(boundary.eta().get(s)?)).ok()
    })?;
    let allowed = vec![triv.alphabet().all_symbols(); vol.len()];
    let energies = engine.energies(&allowed)?;
    Ok(ProbTable::from_energies(vol.clone(), triv.alphabet().clone(), &energies).0)
}

fn surrogate_box(phi: &Potential, vol: &Volume, radius: u32) -> Result<Volume> {
    let outer = cube(radius, phi.dim());
    if !vol.union(&boundary_shell(vol, phi.range())).is_subset_of(&outer) {
        return Err(Error::InvalidArgument(format!(
            "surrogate radius {radius} does not contain the box and its shell"
        )));
    }
    Ok(outer)
}

/// Joint configuration on `vol` for disorder index `k` and spin index `j` (table orders).
fn joint_symbols(j: usize, k: usize, ns: usize, nd: usize, n: usize) -> Vec<u8> {
    let s = crate::table::symbols_of(j, ns, n);
    let d = crate::table::symbols_of(k, nd, n);
    s.iter().zip(&d).map(|(&a, &b)| a * nd as u8 + b).collect()
}

/// The joint conditional law on `vol` given `outside`, built from the trivial
/// annealed kernel and the factors `Q_Λ`, with the quenched measures replaced
/// by finite-volume measures on `[-radius, radius]^d` with spins `sigma_bar`
/// beyond it.
///
/// `outside` must cover the surrogate box (minus `vol`) and its shell.
pub fn joint_conditional(
    phi: &Potential,
    law: &DisorderLaw,
    vol: &Volume,
    outside: &JointConfig,
    sigma_bar: &Config,
    radius: u32,
) -> Result<ProbTable> {
    check_law(phi, law)?;
    let outer = surrogate_box(phi, vol, radius)?;
    let outer_shell = boundary_shell(&outer, phi.range());
    let shell = boundary_shell(vol, phi.range());
    let ann = annealed_kernel(phi, law, vol, &outside.restrict(&shell)?)?;
    let ann_d = disorder_marginal(&ann)?;
    let eta_rest = outside.eta().restrict(&outer.difference(vol).union(&outer_shell))?;
    let sigma_shell = sigma_bar.restrict(&outer_shell)?;
    let needed = Interactions::intersecting(phi, vol).sites(phi.dim()).union(vol);
    let surrogates = disorder_configs(law, vol)?
        .map(|(eta, _)| {
            let mu = quenched_kernel(phi, &outer, &eta.merge(&eta_rest), &sigma_shell)?;
            Ok((eta, mu.marginal(&needed)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut denominators = Vec::with_capacity(surrogates.len());
    for (eta, _) in &surrogates {
        let mut total = 0.0;
        for (j, (eta2, mu)) in surrogates.iter().enumerate() {
            total += ann_d.probs()[j] * q_factor(mu, phi, vol, eta, eta2, &eta_rest)?;
        }
        denominators.push(total);
    }
    let nd = law.support().len();
    let probs: Vec<f64> = ann
        .probs()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let d: Vec<u8> = ann.symbols(i).iter().map(|&s| s % nd as u8).collect();
            p / denominators[crate::table::index_of(&d, nd)]
        })
        .collect();
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroProbability);
    }
    ProbTable::new(vol.clone(), phi.alphabet().clone(), probs.iter().map(|p| p / total).collect())
}

/// Conditional law on `vol` of the finite-volume joint measure on
/// `[-radius, radius]^d` (spins `sigma_bar` beyond it) given `outside` on the
/// rest of that box, computed directly from quenched kernels.
pub fn direct_conditional(
    phi: &Potential,
    law: &DisorderLaw,
    vol: &Volume,
    outside: &JointConfig,
    sigma_bar: &Config,
    radius: u32,
) -> Result<ProbTable> {
    check_law(phi, law)?;
    let (spin, disorder) = joint_alphabet(phi)?;
    let (ns, nd, n) = (spin.len(), disorder.len(), vol.len());
    let outer = surrogate_box(phi, vol, radius)?;
    let outer_shell = boundary_shell(&outer, phi.range());
    let rest = outer.difference(vol);
    let eta_rest = outside.eta().restrict(&rest.union(&outer_shell))?;
    let sigma_rest = outside.sigma().restrict(&rest)?;
    let sigma_shell = sigma_bar.restrict(&outer_shell)?;
    let q = ns * nd;
    check_cap((q as f64).powi(n as i32))?;
    let mut probs = vec![0.0; q.pow(n as u32)];
    for (k, (eta, p)) in disorder_configs(law, vol)?.enumerate() {
        let spec = GibbsSpecification::quenched(phi.clone(), eta.merge(&eta_rest))?;
        let mu = kernel(&spec, &outer, &sigma_shell)?;
        for j in 0..ns.pow(n as u32) {
            let s = crate::table::symbols_of(j, ns, n);
            let inner = Config::new(vol.clone(), s.iter().map(|&v| spin.value(v as usize)).collect())?;
            let full = inner.merge(&sigma_rest).restrict(&outer)?;
            probs[crate::table::index_of(&joint_symbols(j, k, ns, nd, n), q)] = p * mu.prob(&full)?;
        }
    }
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroProbability);
    }
    ProbTable::new(vol.clone(), phi.alphabet().clone(), probs.iter().map(|p| p / total).collect())
}

/// Total variation between [`joint_conditional`] at `radius` and
/// [`direct_conditional`] at `reference_radius`.
pub fn conditional_residual(
    phi: &Potential,
    law: &DisorderLaw,
    vol: &Volume,
    outside: &JointConfig,
    sigma_bar: &Config,
    radius: u32,
    reference_radius: u32,
) -> Result<f64> {
    let a = joint_conditional(phi, law, vol, outside, sigma_bar, radius)?;
    let b = direct_conditional(phi, law, vol, outside, sigma_bar, reference_radius)?;
    Ok(crate::numeric::total_variation(a.probs(), b.probs()))
}

/// `r± = (1 + E_{μ±[η_0 = -1, η]}[e^{2hσ_0}])^{-1}` for the random-field Ising
/// model on `vol` (which must contain the origin), with all-plus and all-minus
/// spin boundary conditions. `eta` must cover `vol` and its shell.
pub fn r_plus_minus(beta: f64, h: f64, vol: &Volume, eta: &Config) -> Result<(f64, f64)> {
    let dim = vol.dim();
    let origin = Site::origin(dim);
    if !vol.contains(&origin) {
        return Err(Error::InvalidArgument("the box must contain the origin".into()));
    }
    let phi = Potential::rfim(dim, beta, h, Alphabet::spins());
    let shell = boundary_shell(vol, phi.range());
    let mut eta = eta.restrict(&vol.union(&shell))?;
    eta.set(&origin, -1)?;
    let at = vol.index_of(&origin).unwrap();
    let spec = GibbsSpecification::quenched(phi, eta)?;
    let r = |bc: i8| -> Result<f64> {
        let mu = kernel(&spec, vol, &Config::constant(shell.clone(), bc))?;
        let energies = mu.energies();
        let lowest = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        // Same summation order for both sums, so h = 0 gives a ratio of exactly 1.
        let (mut tilted, mut total) = (0.0, 0.0);
        for (i, e) in energies.iter().enumerate() {
            let w = (lowest - e).exp();
            let s = mu.table().symbols(i)[at];
            tilted += w * (2.0 * h * spec.spin_alphabet().value(s as usize) as f64).exp();
            total += w;
        }
        Ok(1.0 / (1.0 + tilted / total))
    };
    Ok((r(1)?, r(-1)?))
}

/// A one-dimensional nearest-neighbour system on an interval with fixed
/// disorder, solved exactly by forward and backward passes.
///
/// Supports potentials on `Z` whose terms are single sites or nearest-neighbour
/// pairs; boundary spins at `lo - 1` and `hi + 1` are optional (free ends).
#[derive(Clone, Debug)]
pub struct LineSystem {
    lo: i32,
    site: Vec<Vec<f64>>,
    bond: Vec<Vec<f64>>,
    left: Vec<f64>,
    right: Vec<f64>,
    log_z: f64,
    single: Vec<Vec<f64>>,
    pair: Vec<Vec<f64>>,
}

impl LineSystem {
    /// The system on `[lo, hi]`. `eta` (joint potentials only) must cover the
    /// interval, plus `lo - 1` / `hi + 1` where a boundary spin is given.
    pub fn new(
        phi: &Potential,
        lo: i32,
        hi: i32,
        eta: Option<&Config>,
        left: Option<i8>,
        right: Option<i8>,
    ) -> Result<Self> {
        if phi.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: phi.dim(),
            });
        }
        if hi < lo {
            return Err(Error::InvalidArgument("empty interval".into()));
        }
        let one = Site::at(1);
        let mut site_terms = Vec::new();
        let mut bond_terms = Vec::new();
        for t in phi.terms() {
            match t.shape() {
                [_] => site_terms.push(t),
                [_, b] if *b == one => bond_terms.push(t),
                _ => {
                    return Err(Error::Unsupported(
                        "line systems need single-site and nearest-neighbour terms".into(),
                    ))
                }
            }
        }
        let spins = phi.alphabet().spin().values().to_vec();
        let k = spins.len();
        let q = phi.q();
        let symbol = |x: i32, s: i8| -> Result<u8> {
            match eta {
                None => phi.alphabet().encode(s, None),
                Some(e) => {
                    let d = e.get(&Site::at(x)).ok_or_else(|| Error::ShellTooThin {
                        range: 1,
                        missing: format!("disorder at {x}"),
                    })?;
                    phi.alphabet().encode(s, Some(d))
                }
            }
        };
        let bond_energy = |x: i32, s: i8, t: i8| -> Result<f64> {
            let syms = [symbol(x, s)?, symbol(x + 1, t)?];
            Ok(bond_terms.iter().map(|b| b.value(&syms, q)).sum())
        };
        let n = (hi - lo + 1) as usize;
        let mut site = Vec::with_capacity(n);
        let mut bond = Vec::with_capacity(n - 1);
        for x in lo..=hi {
            let mut row = Vec::with_capacity(k);
            for &s in &spins {
                let sym = [symbol(x, s)?];
                row.push(site_terms.iter().map(|t| t.value(&sym, q)).sum());
            }
            site.push(row);
            if x < hi {
                let mut m = Vec::with_capacity(k * k);
                for &s in &spins {
                    for &t in &spins {
                        m.push(bond_energy(x, s, t)?);
                    }
                }
                bond.push(m);
            }
        }
        let left = match left {
            None => vec![0.0; k],
            Some(v) => spins.iter().map(|&s| bond_energy(lo - 1, v, s)).collect::<Result<_>>()?,
        };
        let right = match right {
            None => vec![0.0; k],
            Some(v) => spins.iter().map(|&s| bond_energy(hi, s, v)).collect::<Result<_>>()?,
        };
        let mut sys = LineSystem {
            lo,
            site,
            bond,
            left,
            right,
            log_z: 0.0,
            single: Vec::new(),
            pair: Vec::new(),
        };
        sys.solve();
        Ok(sys)
    }

    fn k(&self) -> usize {
        self.left.len()
    }

    pub fn len(&self) -> usize {
        self.site.len()
    }

    pub fn is_empty(&self) -> bool {
        self.site.is_empty()
    }

    fn solve(&mut self) {
        let (n, k) = (self.len(), self.k());
        let normalize = |v: &mut Vec<f64>| -> f64 {
            let c: f64 = v.iter().sum();
            v.iter_mut().for_each(|a| *a /= c);
            c.ln()
        };
        // Forward messages include the site weight; backward ones exclude it.
        let mut fwd = vec![vec![0.0; k]; n];
        let mut log_z = 0.0;
        for s in 0..k {
            fwd[0][s] = (-self.left[s] - self.site[0][s]).exp();
        }
        log_z += normalize(&mut fwd[0]);
        for i in 1..n {
            for t in 0..k {
                let mut acc = 0.0;
                for s in 0..k {
                    acc += fwd[i - 1][s] * (-self.bond[i - 1][s * k + t]).exp();
                }
                fwd[i][t] = acc * (-self.site[i][t]).exp();
            }
            log_z += normalize(&mut fwd[i]);
        }
        let tail: f64 = (0..k).map(|s| fwd[n - 1][s] * (-self.right[s]).exp()).sum();
        self.log_z = log_z + tail.ln();
        let mut bwd = vec![vec![0.0; k]; n];
        for s in 0..k {
            bwd[n - 1][s] = (-self.right[s]).exp();
        }
        normalize(&mut bwd[n - 1]);
        for i in (0..n - 1).rev() {
            for s in 0..k {
                let mut acc = 0.0;
                for t in 0..k {
                    acc += (-self.bond[i][s * k + t] - self.site[i + 1][t]).exp() * bwd[i + 1][t];
                }
                bwd[i][s] = acc;
            }
            normalize(&mut bwd[i]);
        }
        self.single = (0..n)
            .map(|i| {
                let mut v: Vec<f64> = (0..k).map(|s| fwd[i][s] * bwd[i][s]).collect();
                normalize(&mut v);
                v
            })
            .collect();
        self.pair = (0..n.saturating_sub(1))
            .map(|i| {
                let mut m = vec![0.0; k * k];
                for s in 0..k {
                    for t in 0..k {
                        m[s * k + t] = fwd[i][s]
                            * (-self.bond[i][s * k + t] - self.site[i + 1][t]).exp()
                            * bwd[i + 1][t];
                    }
                }
                normalize(&mut m);
                m
            })
            .collect();
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    /// Law of the spin (as alphabet indices) at site `x`.
    pub fn marginal(&self, x: i32) -> &[f64] {
        &self.single[(x - self.lo) as usize]
    }

    /// Law of the spins at `x, x + 1`, indexed `s * |spins| + t`.
    pub fn pair_marginal(&self, x: i32) -> &[f64] {
        &self.pair[(x - self.lo) as usize]
    }

    /// Energy of a configuration given as spin alphabet indices along the interval.
    pub fn energy(&self, spins: &[usize]) -> f64 {
        let k = self.k();
        let n = self.len();
        let mut e = self.left[spins[0]] + self.right[spins[n - 1]];
        for i in 0..n {
            e += self.site[i][spins[i]];
            if i + 1 < n {
                e += self.bond[i][spins[i] * k + spins[i + 1]];
            }
        }
        e
    }

    pub fn log_prob(&self, spins: &[usize]) -> f64 {
        -self.energy(spins) - self.log_z
    }

    /// Mean under this system of the energy function of `other` (same interval).
    pub fn expected_energy_of(&self, other: &LineSystem) -> f64 {
        let k = self.k();
        let n = self.len();
        let dot = |p: &[f64], e: &[f64]| p.iter().zip(e).map(|(a, b)| a * b).sum::<f64>();
        let mut e = dot(&self.single[0], &other.left) + dot(&self.single[n - 1], &other.right);
        for i in 0..n {
            e += dot(&self.single[i], &other.site[i]);
            if i + 1 < n {
                e += dot(&self.pair[i][..k * k], &other.bond[i]);
            }
        }
        e
    }

    /// Shannon entropy of the spin law.
    pub fn entropy(&self) -> f64 {
        self.expected_energy_of(self) + self.log_z
    }

    /// Relative entropy of this spin law with respect to `other`.
    pub fn relative_entropy(&self, other: &LineSystem) -> f64 {
        self.expected_energy_of(other) - self.expected_energy_of(self) + other.log_z - self.log_z
    }

    /// Mean of `Σ_{A∋x} Φ_A / |A|` under the spin law: the site energy and half of each adjacent bond.
    pub fn site_share(&self, x: i32) -> f64 {
        let i = (x - self.lo) as usize;
        let dot = |p: &[f64], e: &[f64]| p.iter().zip(e).map(|(a, b)| a * b).sum::<f64>();
        let mut e = dot(&self.single[i], &self.site[i]);
        if i > 0 {
            e += 0.5 * dot(&self.pair[i - 1], &self.bond[i - 1]);
        }
        if i + 1 < self.len() {
            e += 0.5 * dot(&self.pair[i], &self.bond[i]);
        }
        e
    }
}

/// How a quenched pressure was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PressureMethod {
    /// Exact: no multi-site interactions, so `log Z` factorizes over sites.
    ClosedForm,
    /// Mean of `log Z_L(η) / L` over independent disorder draws on a long chain.
    MonteCarlo,
}

/// An estimate of `P-mean of lim (1/|Λ|) log Z_Λ(η)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PressureEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub length: usize,
    pub method: PressureMethod,
}

fn has_interactions(phi: &Potential) -> bool {
    phi.terms().iter().any(|t| t.shape().len() > 1 && t.table().iter().any(|&v| v != 0.0))
}

/// The mean quenched pressure of a joint potential under `law`.
///
/// Without multi-site interactions it is computed in closed form in any
/// dimension. Otherwise only one-dimensional nearest-neighbour potentials are
/// supported: `samples` disorder draws on a free chain of `length` sites, seeded
/// by `seed` with one stream per draw.
pub fn quenched_pressure(
    phi: &Potential,
    law: &DisorderLaw,
    length: usize,
    samples: usize,
    seed: u64,
) -> Result<PressureEstimate> {
    check_law(phi, law)?;
    let (spin, _) = joint_alphabet(phi)?;
    if !has_interactions(phi) {
        let mut value = 0.0;
        for (&d, &p) in law.support().values().iter().zip(law.probs()) {
            let energies = spin
                .values()
                .iter()
                .map(|&s| {
                    let sym = [phi.alphabet().encode(s, Some(d))?];
                    Ok(phi
                        .terms()
                        .iter()
                        .filter(|t| t.shape().len() == 1)
                        .map(|t| t.value(&sym, phi.q()))
                        .sum::<f64>())
                })
                .collect::<Result<Vec<f64>>>()?;
            let neg: Vec<f64> = energies.iter().map(|e| -e).collect();
            value += p * log_sum_exp(&neg);
        }
        return Ok(PressureEstimate {
            value,
            stderr: 0.0,
            samples: 0,
            length: 0,
            method: PressureMethod::ClosedForm,
        });
    }
    if phi.dim() != 1 {
        return Err(Error::Unsupported(
            "quenched pressure with interactions is only available in one dimension".into(),
        ));
    }
    if length == 0 || samples < 2 {
        return Err(Error::InvalidArgument("need a positive length and at least two samples".into()));
    }
    let vol = Volume::interval(0, length as i32 - 1);
    let mut values = Vec::with_capacity(samples);
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let eta = law.sample(&mut rng, &vol);
        let sys = LineSystem::new(phi, 0, length as i32 - 1, Some(&eta), None, None)?;
        values.push(sys.log_z() / length as f64);
    }
    let m = samples as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(PressureEstimate {
        value: mean,
        stderr: (var / m).sqrt(),
        samples,
        length,
        method: PressureMethod::MonteCarlo,
    })
}

/// One window of the boundary-order entropy bound.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyBoundRow {
    pub n: u32,
    pub sites: usize,
    /// `h_{Λ_n}(K⁺ | K⁻)`.
    pub relative_entropy: Extended,
    /// `4 Ĉ₁|∂Λ_n|`, with `Ĉ₁|∂Λ_n|` the oscillation of the terms crossing the window boundary.
    pub bound: f64,
    pub holds: bool,
}

impl EntropyBoundRow {
    pub fn per_site(&self) -> Extended {
        self.relative_entropy.map(|h| h / self.sites as f64)
    }
}

/// Where the joint tables compared on a window are built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurrogateBox {
    /// One box `[-radius, radius]^d` containing every window.
    Common { radius: u32 },
    /// For window `Λ_n`, the box `[-(n + margin), n + margin]^d`.
    PerWindow { margin: u32 },
}

/// `h_{Λ_n}(K⁺|K⁻)` against `4 Ĉ₁|∂Λ_n|` for windows `Λ_n = [-n, n]^d` of joint
/// tables with spin boundaries `sigma_plus`, `sigma_minus` and disorder
/// `eta_bar` outside their box.
pub fn joint_entropy_bound(
    phi: &Potential,
    law: &DisorderLaw,
    boxes: SurrogateBox,
    windows: &[u32],
    sigma_plus: &Config,
    sigma_minus: &Config,
    eta_bar: &Config,
) -> Result<Vec<EntropyBoundRow>> {
    let build = |radius: u32| -> Result<(JointTable, JointTable)> {
        let outer = cube(radius, phi.dim());
        Ok((
            joint_table(phi, law, &outer, sigma_plus, eta_bar)?,
            joint_table(phi, law, &outer, sigma_minus, eta_bar)?,
        ))
    };
    let common = match boxes {
        SurrogateBox::Common { radius } => Some((radius, build(radius)?)),
        SurrogateBox::PerWindow { .. } => None,
    };
    windows
        .iter()
        .map(|&n| {
            let owned;
            let (plus, minus) = match (&common, boxes) {
                (Some((radius, _)), _) if n > *radius => {
                    return Err(Error::WindowTooSmall(format!(
                        "window {n} exceeds surrogate radius {radius}"
                    )))
                }
                (Some((_, (p, m))), _) => (p, m),
                (None, SurrogateBox::PerWindow { margin }) => {
                    owned = build(n + margin)?;
                    (&owned.0, &owned.1)
                }
                (None, SurrogateBox::Common { .. }) => unreachable!(),
            };
            let w = cube(n, phi.dim());
            let h = relative_entropy(&plus.window(&w)?, &minus.window(&w)?)?;
            let bound = 4.0 * boundary_oscillation(phi, &w)?;
            Ok(EntropyBoundRow {
                n,
                sites: w.len(),
                holds: !h.is_infinite() && h.value() <= bound,
                relative_entropy: h,
                bound,
            })
        })
        .collect()
}

/// `max |log K1(ξ_W) / K2(ξ_W)|` over all configurations of the window `W`.
pub fn sup_log_ratio(k1: &JointTable, k2: &JointTable, window: &Volume) -> Result<f64> {
    let a = k1.window(window)?;
    let b = k2.window(window)?;
    let mut worst: f64 = 0.0;
    for (&p, &q) in a.probs().iter().zip(b.probs()) {
        match (p > 0.0, q > 0.0) {
            (true, true) => worst = worst.max((p / q).ln().abs()),
            (false, false) => {}
            _ => return Err(Error::ZeroProbability),
        }
    }
    Ok(worst)
}

/// `K(A∩B) / (K(A) K(B))` for the cylinder events `A = {ξ_a = a_syms}` and `B = {ξ_b = b_syms}`.
pub fn ad_ratio(table: &ProbTable, a: &Volume, a_syms: &[u8], b: &Volume, b_syms: &[u8]) -> Result<f64> {
    if !a.intersection(b).is_empty() {
        return Err(Error::InvalidArgument("events must live on disjoint volumes".into()));
    }
    let joint = table.marginal(&a.union(b))?;
    cylinder_ratio(&joint, a, a_syms, b, b_syms)
}

fn cylinder_ratio(joint: &ProbTable, a: &Volume, a_syms: &[u8], b: &Volume, b_syms: &[u8]) -> Result<f64> {
    let pa = joint.marginal(a)?.probs()[joint.index(a_syms)];
    let pb = joint.marginal(b)?.probs()[joint.index(b_syms)];
    if pa <= 0.0 || pb <= 0.0 {
        return Err(Error::ZeroProbability);
    }
    let mut both = vec![0u8; a.len() + b.len()];
    for (x, s) in a.sites().iter().zip(a_syms).chain(b.sites().iter().zip(b_syms)) {
        both[joint.volume().index_of(x).unwrap()] = *s;
    }
    Ok(joint.probs()[joint.index(&both)] / (pa * pb))
}

/// Result of [`ad_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct DecouplingReport {
    pub n: u32,
    pub gap: u32,
    pub max_abs_log_ratio: Extended,
    pub events: usize,
}

/// Largest `|log K(A∩B)/(K(A)K(B))|` over cylinder events on two-site sets
/// `A ⊆ [-n, n]^d` and `B` in the table's volume outside `[-(n+gap), n+gap]^d`;
/// events of probability zero are skipped.
pub fn ad_check(table: &ProbTable, n: u32, gap: u32) -> Result<DecouplingReport> {
    let dim = table.volume().dim();
    let inner = cube(n, dim).intersection(table.volume());
    let far = table.volume().difference(&cube(n + gap, dim));
    let pairs = |v: &Volume| -> Vec<Volume> {
        let s = v.sites();
        let mut out = Vec::new();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                out.push(Volume::new(dim, [s[i].clone(), s[j].clone()]).unwrap());
            }
        }
        out
    };
    let (a_sets, b_sets) = (pairs(&inner), pairs(&far));
    if a_sets.is_empty() || b_sets.is_empty() {
        return Err(Error::WindowTooSmall("no two-site events inside and outside the gap".into()));
    }
    let q = table.q() as u8;
    let mut worst = Extended::Finite(0.0);
    let mut events = 0;
    for a in &a_sets {
        for b in &b_sets {
            let joint = table.marginal(&a.union(b))?;
            for a_syms in (0..q).flat_map(|x| (0..q).map(move |y| [x, y])) {
                for b_syms in (0..q).flat_map(|x| (0..q).map(move |y| [x, y])) {
                    let r = match cylinder_ratio(&joint, a, &a_syms, b, &b_syms) {
                        Ok(r) => r,
                        Err(Error::ZeroProbability) => continue,
                        Err(e) => return Err(e),
                    };
                    events += 1;
                    if r == 0.0 {
                        worst = Extended::Infinite;
                    } else if let Extended::Finite(w) = worst {
                        worst = Extended::Finite(w.max(r.ln().abs()));
                    }
                }
            }
        }
    }
    Ok(DecouplingReport {
        n,
        gap,
        max_abs_log_ratio: worst,
        events,
    })
}

/// Finite-window terms of the relative entropy decomposition of a joint
/// measure `K` against a joint measure `K^σ̄`, all per site.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyDecomposition {
    pub n: u32,
    /// `h_Λ(K | K^σ̄) / |Λ|`.
    pub relative_entropy: Extended,
    /// `h_Λ(K_d | P) / |Λ|`.
    pub disorder_relative_entropy: Extended,
    /// `H(K_Λ) / |Λ|`.
    pub entropy: f64,
    /// `H(K_{d,Λ}) / |Λ|`.
    pub disorder_entropy: f64,
    /// `Σ_{A∋0} K(Φ_A) / |A|`.
    pub energy: f64,
    pub pressure: PressureEstimate,
    /// `relative_entropy` minus the sum of the other terms.
    pub residual: Extended,
}

fn decomposition(
    n: u32,
    relative: Extended,
    disorder_relative: Extended,
    entropy: f64,
    disorder_entropy: f64,
    energy: f64,
    pressure: PressureEstimate,
) -> EntropyDecomposition {
    let rest = disorder_relative.map(|t| t - entropy + disorder_entropy + energy + pressure.value);
    let residual = match (relative, rest) {
        (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a - b),
        _ => Extended::Infinite,
    };
    EntropyDecomposition {
        n,
        relative_entropy: relative,
        disorder_relative_entropy: disorder_relative,
        entropy,
        disorder_entropy,
        energy,
        pressure,
        residual,
    }
}

fn box_radius(vol: &Volume) -> Result<u32> {
    let n = vol.radius();
    if *vol != cube(n, vol.dim()) {
        return Err(Error::InvalidArgument("tables must live on a centered cube".into()));
    }
    Ok(n)
}

/// Decomposition from exact tables: `k` and `reference` share the box `[-n, n]^d`.
pub fn entropy_decomposition(
    k: &ProbTable,
    reference: &JointTable,
    phi: &Potential,
    law: &DisorderLaw,
    pressure: PressureEstimate,
) -> Result<EntropyDecomposition> {
    check_law(phi, law)?;
    let vol = k.volume();
    if vol != reference.volume() || k.alphabet() != reference.table().alphabet() {
        return Err(Error::VolumeMismatch("tables must share box and alphabet".into()));
    }
    let n = box_radius(vol)?;
    let size = vol.len() as f64;
    let relative = relative_entropy(k, reference.table())?.map(|h| h / size);
    let kd = disorder_marginal(k)?;
    let disorder_relative = relative_entropy(&kd, &law.product_table(vol)?)?.map(|h| h / size);
    let energy = site_energy(k, phi)?;
    Ok(decomposition(
        n,
        relative,
        disorder_relative,
        entropy(k.probs()) / size,
        entropy(kd.probs()) / size,
        energy,
        pressure,
    ))
}

/// `Σ_{A∋0} K(Φ_A) / |A|` from the marginals of a joint table.
fn site_energy(k: &ProbTable, phi: &Potential) -> Result<f64> {
    let mut total = 0.0;
    for e in Interactions::containing(phi, &Site::origin(phi.dim())).entries {
        let sites = Volume::new(phi.dim(), e.sites.iter().cloned())?;
        if !sites.is_subset_of(k.volume()) {
            return Err(Error::WindowTooSmall("terms at the origin leave the table's box".into()));
        }
        let m = k.marginal(&sites)?;
        let term = &phi.terms()[e.term];
        let mut buf = vec![0u8; e.sites.len()];
        let mean = m.expect(|syms| {
            for (slot, x) in buf.iter_mut().zip(&e.sites) {
                *slot = syms[sites.index_of(x).unwrap()];
            }
            term.value(&buf, phi.q())
        });
        total += mean / e.sites.len() as f64;
    }
    Ok(total)
}

/// Disorder fields on `[-n, n]` joined with `eta_bar` at `±(n+1)`.
fn line_disorders<'a>(
    law: &'a DisorderLaw,
    n: u32,
    eta_bar: &'a Config,
) -> Result<impl Iterator<Item = (Config, f64)> + 'a> {
    let ends = Volume::new(1, [Site::at(-(n as i32) - 1), Site::at(n as i32 + 1)])?;
    let ends = eta_bar.restrict(&ends)?;
    let inner = Volume::interval(-(n as i32), n as i32);
    let configs: Vec<(Config, f64)> = disorder_configs(law, &inner)?.collect();
    Ok(configs.into_iter().map(move |(eta, p)| (eta.merge(&ends), p)))
}

/// The same decomposition in one dimension for `K = K^{σ̄_k}` against
/// `K^{σ̄_ref}` on `[-n, n]`, both built with constant spin boundaries and
/// disorder `eta_bar` at `±(n+1)`, solved per disorder field by [`LineSystem`].
pub fn entropy_decomposition_line(
    phi: &Potential,
    law: &DisorderLaw,
    n: u32,
    sigma_bar_k: i8,
    sigma_bar_ref: i8,
    eta_bar: &Config,
    pressure: PressureEstimate,
) -> Result<EntropyDecomposition> {
    check_law(phi, law)?;
    let (lo, hi) = (-(n as i32), n as i32);
    let size = (2 * n + 1) as f64;
    let (mut relative, mut spin_entropy, mut energy) = (0.0, 0.0, 0.0);
    for (eta, p) in line_disorders(law, n, eta_bar)? {
        let k = LineSystem::new(phi, lo, hi, Some(&eta), Some(sigma_bar_k), Some(sigma_bar_k))?;
        let r = LineSystem::new(phi, lo, hi, Some(&eta), Some(sigma_bar_ref), Some(sigma_bar_ref))?;
        relative += p * k.relative_entropy(&r);
        spin_entropy += p * k.entropy();
        energy += p * k.site_share(0);
    }
    // Both measures have disorder marginal exactly P on the box.
    let disorder_entropy = law.entropy();
    Ok(decomposition(
        n,
        Extended::Finite(relative / size),
        Extended::Finite(0.0),
        disorder_entropy + spin_entropy / size,
        disorder_entropy,
        energy,
        pressure,
    ))
}

/// Finite-window specific energy of a joint measure with respect to
/// `λ = P ⊗ δ_{σ⁰}` for a constant spin configuration `σ⁰`, and its three
/// limiting terms.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecificEnergyReport {
    pub n: u32,
    /// `-(1/|Λ|) Σ_η P(η) log K(σ⁰_Λ, η_Λ)`.
    pub value: Extended,
    /// `h(P)`, the entropy of the single-site disorder law.
    pub disorder_entropy: f64,
    /// `Σ_{A∋0} P(Φ_A(σ⁰, ·)) / |A|`.
    pub energy: f64,
    pub pressure: PressureEstimate,
    pub residual: Extended,
}

/// `Σ_{A∋0} P(Φ_A(σ⁰, ·)) / |A|`, exact over the disorder on each term's sites.
fn reference_energy(phi: &Potential, law: &DisorderLaw, sigma0: i8) -> Result<f64> {
    let mut total = 0.0;
    for e in Interactions::containing(phi, &Site::origin(phi.dim())).entries {
        let sites = Volume::new(phi.dim(), e.sites.iter().cloned())?;
        let term = &phi.terms()[e.term];
        let mut mean = 0.0;
        for (eta, p) in disorder_configs(law, &sites)? {
            let syms = e
                .sites
                .iter()
                .map(|x| phi.alphabet().encode(sigma0, eta.get(x)))
                .collect::<Result<Vec<_>>>()?;
            mean += p * term.value(&syms, phi.q());
        }
        total += mean / e.sites.len() as f64;
    }
    Ok(total)
}

fn specific_energy_report(
    n: u32,
    value: Extended,
    law: &DisorderLaw,
    energy: f64,
    pressure: PressureEstimate,
) -> SpecificEnergyReport {
    let disorder_entropy = law.entropy();
    let residual = value.map(|v| v - (disorder_entropy + energy + pressure.value));
    SpecificEnergyReport {
        n,
        value,
        disorder_entropy,
        energy,
        pressure,
        residual,
    }
}

/// Specific energy from an exact joint table on `[-n, n]^d`.
pub fn joint_specific_energy(
    k: &JointTable,
    phi: &Potential,
    law: &DisorderLaw,
    sigma0: i8,
    pressure: PressureEstimate,
) -> Result<SpecificEnergyReport> {
    check_law(phi, law)?;
    let vol = k.volume();
    let n = box_radius(vol)?;
    let table = k.table();
    let mut total = 0.0;
    let mut infinite = false;
    for (eta, p) in disorder_configs(law, vol)? {
        let syms = eta
            .values()
            .iter()
            .map(|&d| phi.alphabet().encode(sigma0, Some(d)))
            .collect::<Result<Vec<_>>>()?;
        let kp = table.probs()[table.index(&syms)];
        if kp <= 0.0 {
            infinite = true;
            break;
        }
        total -= p * kp.ln();
    }
    let value = if infinite {
        Extended::Infinite
    } else {
        Extended::Finite(total / vol.len() as f64)
    };
    let energy = reference_energy(phi, law, sigma0)?;
    Ok(specific_energy_report(n, value, law, energy, pressure))
}

/// The same quantity in one dimension for `K^σ̄` on `[-n, n]` with constant
/// spin boundary `sigma_bar` and disorder `eta_bar` at `±(n+1)`.
pub fn joint_specific_energy_line(
    phi: &Potential,
    law: &DisorderLaw,
    n: u32,
    sigma_bar: i8,
    eta_bar: &Config,
    sigma0: i8,
    pressure: PressureEstimate,
) -> Result<SpecificEnergyReport> {
    check_law(phi, law)?;
    let (lo, hi) = (-(n as i32), n as i32);
    let s0 = phi.alphabet().spin().index_of(sigma0)?;
    let spins = vec![s0; (2 * n + 1) as usize];
    let inner = Volume::interval(lo, hi);
    let mut total = 0.0;
    for (eta, p) in line_disorders(law, n, eta_bar)? {
        let sys = LineSystem::new(phi, lo, hi, Some(&eta), Some(sigma_bar), Some(sigma_bar))?;
        total -= p * (law.log_prob(&eta.restrict(&inner)?)? + sys.log_prob(&spins));
    }
    let energy = reference_energy(phi, law, sigma0)?;
    Ok(specific_energy_report(
        n,
        Extended::Finite(total / (2 * n + 1) as f64),
        law,
        energy,
        pressure,
    ))
}
