//! Finite-volume Gibbs kernels, their consistency, quasilocality and the
//! telescoping of relative energies.

use crate::energy::{check_cap, BoxEnergies, Interactions};
use crate::error::{Error, Result};
use crate::lattice::{boundary_shell, cube, Config, LocalFunction, Site, Volume};
use crate::numeric::{total_variation, Odometer};
use crate::potential::{Alphabet, Potential};
use crate::table::ProbTable;

/// The kernels `γ_Λ(σ|ω) = exp(-H_Λ(σ|ω)) / Z_Λ(ω)` of a finite-range potential.
///
/// A joint (spin, disorder) potential gives a quenched specification once the
/// disorder field is fixed; it must cover every box and shell it is used with.
#[derive(Clone, Debug)]
pub struct GibbsSpecification {
    phi: Potential,
    disorder: Option<Config>,
}

impl GibbsSpecification {
    pub fn new(phi: Potential) -> Result<Self> {
        if phi.alphabet().is_joint() {
            return Err(Error::InvalidArgument(
                "a joint potential needs a disorder field; use GibbsSpecification::quenched".into(),
            ));
        }
        Ok(GibbsSpecification { phi, disorder: None })
    }

    pub fn quenched(phi: Potential, eta: Config) -> Result<Self> {
        let disorder = phi
            .alphabet()
            .disorder()
            .ok_or_else(|| Error::InvalidArgument("quenched specification needs a joint potential".into()))?;
        for &v in eta.values() {
            disorder.index_of(v)?;
        }
        Ok(GibbsSpecification {
            phi,
            disorder: Some(eta),
        })
    }

    pub fn potential(&self) -> &Potential {
        &self.phi
    }

    pub fn disorder(&self) -> Option<&Config> {
        self.disorder.as_ref()
    }

    pub fn spin_alphabet(&self) -> &Alphabet {
        self.phi.alphabet().spin()
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn range(&self) -> u32 {
        self.phi.range()
    }

    /// Local symbol for spin `v` at `s`; `None` when the disorder field misses `s`.
    fn symbol(&self, s: &Site, v: i8) -> Option<u8> {
        match &self.disorder {
            None => self.phi.alphabet().encode(v, None).ok(),
            Some(eta) => self.phi.alphabet().encode(v, Some(eta.get(s)?)).ok(),
        }
    }

    fn allowed(&self, s: &Site) -> Result<Vec<u8>> {
        match &self.disorder {
            None => Ok(self.phi.alphabet().all_symbols()),
            Some(eta) => {
                let d = eta.get(s).ok_or_else(|| Error::ShellTooThin {
                    range: self.range() as usize,
                    missing: s.to_string(),
                })?;
                self.phi.alphabet().symbols_with_disorder(d)
            }
        }
    }

    fn check_values(&self, config: &Config) -> Result<()> {
        if config.volume().dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: config.volume().dim(),
            });
        }
        for &v in config.values() {
            self.spin_alphabet().index_of(v)?;
        }
        Ok(())
    }

    /// Energy of every spin configuration of `vol` (table order) with `omega` outside.
    pub fn energies(&self, vol: &Volume, omega: &Config) -> Result<Vec<f64>> {
        self.check_values(omega)?;
        if vol.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: vol.dim(),
            });
        }
        let inter = Interactions::intersecting(&self.phi, vol);
        let engine = BoxEnergies::new(&self.phi, vol, &inter, |s| self.symbol(s, omega.get(s)?))?;
        let allowed = vol
            .sites()
            .iter()
            .map(|s| self.allowed(s))
            .collect::<Result<Vec<_>>>()?;
        engine.energies(&allowed)
    }

    /// `H_Λ(σ|ω)` for one configuration, summed exactly as [`Self::energies`] does.
    pub fn hamiltonian(&self, vol: &Volume, sigma: &Config, omega: &Config) -> Result<f64> {
        self.check_values(sigma)?;
        self.check_values(omega)?;
        if sigma.volume() != vol {
            return Err(Error::VolumeMismatch("sigma must live on the box".into()));
        }
        let inter = Interactions::intersecting(&self.phi, vol);
        let mut missing = None;
        let e = inter.energy(&self.phi, |s| {
            let v = sigma.get(s).or_else(|| omega.get(s))?;
            let sym = self.symbol(s, v);
            if sym.is_none() {
                missing.get_or_insert(s.clone());
            }
            Some(sym.unwrap_or(0))
        })?;
        match missing {
            Some(s) => Err(Error::ShellTooThin {
                range: self.range() as usize,
                missing: s.to_string(),
            }),
            None => Ok(e),
        }
    }
}

/// `γ_Λ(·|ω)` as an exact table, with the energies it was built from.
#[derive(Clone, Debug)]
pub struct KernelTable {
    table: ProbTable,
    boundary: Config,
    energies: Vec<f64>,
    log_z: f64,
}

impl KernelTable {
    pub fn table(&self) -> &ProbTable {
        &self.table
    }

    pub fn into_table(self) -> ProbTable {
        self.table
    }

    pub fn boundary(&self) -> &Config {
        &self.boundary
    }

    pub fn volume(&self) -> &Volume {
        self.table.volume()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn prob(&self, sigma: &Config) -> Result<f64> {
        self.table.prob(sigma)
    }

    /// `log γ_Λ(σ|ω)`.
    pub fn log_prob(&self, sigma: &Config) -> Result<f64> {
        let i = self.table.index(&self.table.encode(sigma)?);
        Ok(-self.energies[i] - self.log_z)
    }
}

/// `γ_Λ(·|ω)` by exact enumeration.
pub fn kernel(spec: &GibbsSpecification, vol: &Volume, omega: &Config) -> Result<KernelTable> {
    let energies = spec.energies(vol, omega)?;
    let alphabet = crate::potential::LocalAlphabet::Spin(spec.spin_alphabet().clone());
    let (table, log_z) = ProbTable::from_energies(vol.clone(), alphabet, &energies);
    Ok(KernelTable {
        table,
        boundary: omega.clone(),
        energies,
        log_z,
    })
}

/// Spin configurations of `vol` in table order.
pub(crate) fn configs_of<'a>(alphabet: &'a Alphabet, vol: &Volume) -> Result<impl Iterator<Item = Config> + 'a> {
    let q = alphabet.len();
    let n = vol.len();
    check_cap((q as f64).powi(n as i32))?;
    let vol = vol.clone();
    Ok((0..q.pow(n as u32)).map(move |i| {
        let syms = crate::table::symbols_of(i, q, n);
        Config::new(vol.clone(), syms.iter().map(|&s| alphabet.value(s as usize)).collect()).unwrap()
    }))
}

/// Total variation distance between `γ_{Λ'} γ_Λ (·|ω)` and `γ_{Λ'}(·|ω)`.
pub fn check_consistency(
    spec: &GibbsSpecification,
    inner: &Volume,
    outer: &Volume,
    omega: &Config,
) -> Result<f64> {
    if !inner.is_subset_of(outer) {
        return Err(Error::InvalidArgument("inner box is not contained in the outer box".into()));
    }
    let outer_kernel = kernel(spec, outer, omega)?;
    let p = outer_kernel.table();
    let ring = outer.difference(inner);
    let ring_law = p.marginal(&ring)?;
    let mut composed = vec![0.0; p.len()];
    for (j, tau) in configs_of(spec.spin_alphabet(), &ring)?.enumerate() {
        let weight = ring_law.probs()[j];
        if weight == 0.0 {
            continue;
        }
        let inner_kernel = kernel(spec, inner, &tau.merge(omega))?;
        for (k, &pk) in inner_kernel.table().probs().iter().enumerate() {
            let sigma = inner_kernel.table().config(k)?.merge(&tau);
            let idx = p.index(&p.encode(&sigma.restrict(outer)?)?);
            composed[idx] += weight * pk;
        }
    }
    Ok(total_variation(&composed, p.probs()))
}

/// `γ_Λ f(ω)`, with `ω` covering the shell and the part of `f`'s support outside `Λ`.
pub fn kernel_expectation(
    spec: &GibbsSpecification,
    vol: &Volume,
    omega: &Config,
    f: &LocalFunction,
) -> Result<f64> {
    let k = kernel(spec, vol, omega)?;
    let mut total = 0.0;
    for (i, &p) in k.table().probs().iter().enumerate() {
        let sigma = k.table().config(i)?;
        total += p * f.eval_with(|s| sigma.get(s).or_else(|| omega.get(s)))?;
    }
    Ok(total)
}

/// Sites outside `vol` that `γ_Λ f` can depend on.
fn dependence_set(spec: &GibbsSpecification, vol: &Volume, f: &LocalFunction) -> Result<Volume> {
    let shell = boundary_shell(vol, spec.range());
    let support = Volume::new(vol.dim(), f.support().iter().cloned())?;
    Ok(shell.union(&support.difference(vol)))
}

/// `sup_σ (g_n^+ - g_n^-)(σ)` for `g = γ_Λ f`: the largest swing of `g` over
/// fillings outside `Λ_n`, maximized over fillings inside `Λ_n`.
pub fn oscillation(spec: &GibbsSpecification, vol: &Volume, f: &LocalFunction, n: u32) -> Result<f64> {
    let deps = dependence_set(spec, vol, f)?;
    let window = cube(n, vol.dim());
    let inside = deps.intersection(&window);
    let outside = deps.difference(&window);
    if outside.is_empty() {
        return Ok(0.0);
    }
    let a = spec.spin_alphabet();
    let mut worst: f64 = 0.0;
    for inner in configs_of(a, &inside)? {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for outer in configs_of(a, &outside)? {
            let g = kernel_expectation(spec, vol, &inner.merge(&outer), f)?;
            lo = lo.min(g);
            hi = hi.max(g);
        }
        worst = worst.max(hi - lo);
    }
    Ok(worst)
}

fn check_window(spec: &GibbsSpecification, window: &Volume) -> Result<()> {
    let needed = cube(spec.range(), spec.dim());
    if !needed.is_subset_of(window) {
        return Err(Error::WindowTooSmall(format!(
            "window must contain the cube of radius {} around the origin",
            spec.range()
        )));
    }
    Ok(())
}

/// `E_x^+(σ|ω) = log γ_x(σ_x|ω) / γ_x(+|ω)` at site `x`, `ω` covering the shell of `x`.
fn single_site_relative_energy(spec: &GibbsSpecification, x: &Site, value: i8, omega: &Config) -> Result<f64> {
    let site = Volume::new(x.dim(), [x.clone()])?;
    let k = kernel(spec, &site, omega)?;
    let sigma = Config::new(site.clone(), vec![value])?;
    let plus = Config::new(site, vec![1])?;
    Ok(k.log_prob(&sigma)? - k.log_prob(&plus)?)
}

/// `D(σ) = log γ_0(σ|σ) / γ_0(+|σ)` from a window around the origin of radius at least the range.
pub fn relative_energy_d(spec: &GibbsSpecification, sigma_window: &Config) -> Result<f64> {
    check_window(spec, sigma_window.volume())?;
    let origin = Site::origin(spec.dim());
    let value = sigma_window
        .get(&origin)
        .ok_or_else(|| Error::WindowTooSmall("window must contain the origin".into()))?;
    let shell = boundary_shell(&Volume::new(spec.dim(), [origin.clone()])?, spec.range());
    let omega = sigma_window.restrict(&shell)?;
    single_site_relative_energy(spec, &origin, value, &omega)
}

/// Both sides of the telescoping identity:
/// `log γ_Λ(σ|ω)/γ_Λ(+|ω)` and `Σ_{x∈Λ} E_x^+(σ | T_Λ^ω[x, σ, +])`, sites in lexicographic order.
pub fn telescope_e(spec: &GibbsSpecification, vol: &Volume, sigma: &Config, omega: &Config) -> Result<(f64, f64)> {
    let k = kernel(spec, vol, omega)?;
    let plus = Config::constant(vol.clone(), 1);
    let direct = k.log_prob(sigma)? - k.log_prob(&plus)?;
    let mut telescoped = 0.0;
    for x in vol.sites() {
        let shell = boundary_shell(&Volume::new(vol.dim(), [x.clone()])?, spec.range());
        let config = Config::from_fn(shell.clone(), |y| {
            if vol.contains(y) {
                if y < x {
                    sigma.get(y).unwrap()
                } else {
                    1
                }
            } else {
                omega.get(y).unwrap_or(0)
            }
        });
        if let Some(y) = shell.sites().iter().find(|y| !vol.contains(y) && omega.get(y).is_none()) {
            return Err(Error::ShellTooThin {
                range: spec.range() as usize,
                missing: y.to_string(),
            });
        }
        let value = sigma
            .get(x)
            .ok_or_else(|| Error::VolumeMismatch("sigma must live on the box".into()))?;
        telescoped += single_site_relative_energy(spec, x, value, &config)?;
    }
    Ok((direct, telescoped))
}

/// Anything that can evaluate `γ_Λ f` for explicit exterior fillings.
pub trait KernelSource {
    fn dim(&self) -> usize;

    /// Values a single exterior site may take.
    fn exterior_alphabet(&self) -> &Alphabet;

    /// Exterior sites on which `γ_Λ f` may depend.
    fn dependence(&self, f: &LocalFunction) -> Result<Volume>;

    /// `γ_Λ f(ω)` for `ω` covering [`Self::dependence`].
    fn expect(&self, omega: &Config, f: &LocalFunction) -> Result<f64>;
}

/// A finite-range specification on a fixed box as a [`KernelSource`].
pub struct FiniteRangeSource<'a> {
    pub spec: &'a GibbsSpecification,
    pub volume: Volume,
}

impl KernelSource for FiniteRangeSource<'_> {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn exterior_alphabet(&self) -> &Alphabet {
        self.spec.spin_alphabet()
    }

    fn dependence(&self, f: &LocalFunction) -> Result<Volume> {
        dependence_set(self.spec, &self.volume, f)
    }

    fn expect(&self, omega: &Config, f: &LocalFunction) -> Result<f64> {
        kernel_expectation(self.spec, &self.volume, omega, f)
    }
}

/// `osc_n(ω) = sup |γ_Λ f(ζ) - γ_Λ f(ω)|` over `ζ` agreeing with `ω` on `Λ_n`, for `n = 0..=n_max`.
pub fn continuity_profile(source: &dyn KernelSource, omega: &Config, f: &LocalFunction, n_max: u32) -> Result<Vec<f64>> {
    let deps = source.dependence(f)?;
    let omega = omega.restrict(&deps)?;
    let base = source.expect(&omega, f)?;
    let a = source.exterior_alphabet();
    let mut profile = Vec::new();
    for n in 0..=n_max {
        let window = cube(n, source.dim());
        let free = deps.difference(&window);
        let kept = omega.restrict(&deps.intersection(&window))?;
        let mut sup: f64 = 0.0;
        let mut odo = Odometer::new(vec![a.len(); free.len()]);
        check_cap(odo.total())?;
        while odo.advance().is_some() {
            let values = odo.digits().iter().map(|&d| a.value(d)).collect();
            let zeta = Config::new(free.clone(), values)?.merge(&kept);
            sup = sup.max((source.expect(&zeta, f)? - base).abs());
        }
        profile.push(sup);
    }
    Ok(profile)
}
