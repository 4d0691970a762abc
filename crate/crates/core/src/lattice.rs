//! Sites of the integer lattice, finite volumes, and configurations on them.
//!
//! Sites order lexicographically (coordinate 1 first), which is the order used
//! for telescoping and for the past/future split at the origin.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A point of the d-dimensional integer lattice.
///
/// The derived `Ord` is lexicographic, so `x <= y` is exactly [`lex_leq`]
/// for sites of the same dimension.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site(Vec<i32>);

impl Site {
    pub fn new(coords: Vec<i32>) -> Self {
        assert!(!coords.is_empty(), "sites need dimension >= 1");
        Site(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Site::new(vec![0; dim])
    }

    /// One-dimensional site, mostly for tests and chains.
    pub fn at(x: i32) -> Self {
        Site(vec![x])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    pub fn add(&self, other: &Site) -> Site {
        debug_assert_eq!(self.dim(), other.dim());
        Site(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Site) -> Site {
        debug_assert_eq!(self.dim(), other.dim());
        Site(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Site {
        Site(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, b: i32) -> Site {
        Site(self.0.iter().map(|a| a * b).collect())
    }

    /// Sup-norm distance.
    pub fn dist(&self, other: &Site) -> u32 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0)
    }

    pub fn norm(&self) -> u32 {
        self.0.iter().map(|a| a.unsigned_abs()).max().unwrap_or(0)
    }

    /// Nearest neighbours (l1 distance one).
    pub fn neighbours(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.dim()).flat_map(move |i| {
            [-1, 1].into_iter().map(move |s| {
                let mut c = self.0.clone();
                c[i] += s;
                Site(c)
            })
        })
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Lexicographic order on sites of equal dimension.
pub fn lex_leq(x: &Site, y: &Site) -> Result<bool> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(x <= y)
}

/// A finite set of sites, kept in lexicographic order.
///
/// The position of a site in [`Volume::sites`] is its digit position when
/// configurations of the volume are enumerated (first site most significant).
#[derive(Clone)]
pub struct Volume {
    dim: usize,
    sites: Arc<Vec<Site>>,
    index: Arc<HashMap<Site, usize>>,
}

impl Volume {
    pub fn new(dim: usize, sites: impl IntoIterator<Item = Site>) -> Result<Self> {
        let mut sites: Vec<Site> = sites.into_iter().collect();
        if let Some(bad) = sites.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        sites.sort();
        sites.dedup();
        let index = sites.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Volume {
            dim,
            sites: Arc::new(sites),
            index: Arc::new(index),
        })
    }

    pub fn empty(dim: usize) -> Self {
        Volume::new(dim, []).unwrap()
    }

    /// Integer interval `[lo, hi]` in d = 1.
    pub fn interval(lo: i32, hi: i32) -> Self {
        Volume::new(1, (lo..=hi).map(Site::at)).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn contains(&self, x: &Site) -> bool {
        self.index.contains_key(x)
    }

    pub fn index_of(&self, x: &Site) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn is_subset_of(&self, other: &Volume) -> bool {
        self.sites.iter().all(|s| other.contains(s))
    }

    /// Largest sup-norm of a site; the radius of a centered cube.
    pub fn radius(&self) -> u32 {
        self.sites.iter().map(Site::norm).max().unwrap_or(0)
    }

    pub fn union(&self, other: &Volume) -> Volume {
        Volume::new(self.dim, self.sites.iter().chain(other.sites.iter()).cloned()).unwrap()
    }

    pub fn difference(&self, other: &Volume) -> Volume {
        Volume::new(
            self.dim,
            self.sites.iter().filter(|s| !other.contains(s)).cloned(),
        )
        .unwrap()
    }

    pub fn intersection(&self, other: &Volume) -> Volume {
        Volume::new(
            self.dim,
            self.sites.iter().filter(|s| other.contains(s)).cloned(),
        )
        .unwrap()
    }

    pub fn translate(&self, x: &Site) -> Volume {
        Volume::new(self.dim, self.sites.iter().map(|s| s.add(x))).unwrap()
    }
}

impl PartialEq for Volume {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.sites == other.sites
    }
}

impl Eq for Volume {}

impl fmt::Debug for Volume {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.sites.iter()).finish()
    }
}

/// The centered cube `[-n, n]^d`.
pub fn cube(n: u32, d: usize) -> Volume {
    assert!(d >= 1, "dimension must be positive");
    let n = n as i32;
    let side = (2 * n + 1) as usize;
    let total = side.pow(d as u32);
    let sites = (0..total).map(|mut k| {
        let mut c = vec![0i32; d];
        for slot in c.iter_mut().rev() {
            *slot = (k % side) as i32 - n;
            k /= side;
        }
        Site::new(c)
    });
    Volume::new(d, sites).unwrap()
}

/// Sites outside `vol` at sup-distance at most `r` from it.
pub fn boundary_shell(vol: &Volume, r: u32) -> Volume {
    let d = vol.dim();
    if r == 0 {
        return Volume::empty(d);
    }
    let offsets = cube(r, d);
    let mut out = HashSet::new();
    for s in vol.sites() {
        for o in offsets.sites() {
            let y = s.add(o);
            if !vol.contains(&y) {
                out.insert(y);
            }
        }
    }
    Volume::new(d, out).unwrap()
}

/// An assignment of single-site states to every site of a volume.
#[derive(Clone, PartialEq, Eq)]
pub struct Config {
    volume: Volume,
    values: Vec<i8>,
}

impl Config {
    pub fn new(volume: Volume, values: Vec<i8>) -> Result<Self> {
        if values.len() != volume.len() {
            return Err(Error::VolumeMismatch(format!(
                "{} values for {} sites",
                values.len(),
                volume.len()
            )));
        }
        Ok(Config { volume, values })
    }

    pub fn constant(volume: Volume, value: i8) -> Self {
        let values = vec![value; volume.len()];
        Config { volume, values }
    }

    pub fn from_fn(volume: Volume, f: impl Fn(&Site) -> i8) -> Self {
        let values = volume.sites().iter().map(f).collect();
        Config { volume, values }
    }

    pub fn volume(&self) -> &Volume {
        &self.volume
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn get(&self, x: &Site) -> Option<i8> {
        self.volume.index_of(x).map(|i| self.values[i])
    }

    pub fn set(&mut self, x: &Site, v: i8) -> Result<()> {
        let i = self
            .volume
            .index_of(x)
            .ok_or_else(|| Error::VolumeMismatch(format!("site {x} not in volume")))?;
        self.values[i] = v;
        Ok(())
    }

    pub fn restrict(&self, sub: &Volume) -> Result<Config> {
        let values = sub
            .sites()
            .iter()
            .map(|s| {
                self.get(s)
                    .ok_or_else(|| Error::VolumeMismatch(format!("site {s} not in volume")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Config {
            volume: sub.clone(),
            values,
        })
    }

    /// Union of two configurations on disjoint (or agreeing) volumes; `self` wins on overlaps.
    pub fn merge(&self, other: &Config) -> Config {
        let volume = self.volume.union(&other.volume);
        Config::from_fn(volume, |s| self.get(s).or_else(|| other.get(s)).unwrap())
    }

    /// `(τ_x ω)(y) = ω(x + y)`; the volume shifts by `-x`.
    pub fn translate(&self, x: &Site) -> Config {
        let volume = self.volume.translate(&x.neg());
        Config::from_fn(volume, |y| self.get(&y.add(x)).unwrap())
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.volume.sites().iter().zip(&self.values))
            .finish()
    }
}

/// `σ` on the lexicographic past `{x <= 0}`, `ξ` on the future.
pub fn concat(sigma: &Config, xi: &Config) -> Result<Config> {
    if sigma.volume != xi.volume {
        return Err(Error::VolumeMismatch(
            "concatenation needs configurations on the same volume".into(),
        ));
    }
    let origin = Site::origin(sigma.volume.dim());
    let values = sigma
        .volume
        .sites()
        .iter()
        .enumerate()
        .map(|(i, x)| if *x <= origin { sigma.values[i] } else { xi.values[i] })
        .collect();
    Ok(Config {
        volume: sigma.volume.clone(),
        values,
    })
}

/// `σ⁺`: keep `σ` on `{x <= 0}`, `+1` elsewhere.
pub fn plus_concat(sigma: &Config) -> Config {
    let plus = Config::constant(sigma.volume.clone(), 1);
    concat(sigma, &plus).unwrap()
}

/// A real function depending on finitely many sites.
#[derive(Clone)]
pub struct LocalFunction {
    support: Vec<Site>,
    eval: Arc<dyn Fn(&[i8]) -> f64 + Send + Sync>,
}

impl LocalFunction {
    /// `eval` receives the values at `support`, in the given order.
    pub fn new(support: Vec<Site>, eval: impl Fn(&[i8]) -> f64 + Send + Sync + 'static) -> Self {
        LocalFunction {
            support,
            eval: Arc::new(eval),
        }
    }

    /// The spin at a single site.
    pub fn spin_at(x: Site) -> Self {
        LocalFunction::new(vec![x], |v| v[0] as f64)
    }

    pub fn support(&self) -> &[Site] {
        &self.support
    }

    pub fn eval_with(&self, lookup: impl Fn(&Site) -> Option<i8>) -> Result<f64> {
        let vals = self
            .support
            .iter()
            .map(|s| {
                lookup(s).ok_or_else(|| {
                    Error::VolumeMismatch(format!("local function needs site {s}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((self.eval)(&vals))
    }

    pub fn eval(&self, config: &Config) -> Result<f64> {
        self.eval_with(|s| config.get(s))
    }

    /// `(τ_x f)(ω) = f(τ_x ω)`: the support moves by `+x`.
    pub fn translate(&self, x: &Site) -> LocalFunction {
        LocalFunction {
            support: self.support.iter().map(|s| s.add(x)).collect(),
            eval: Arc::clone(&self.eval),
        }
    }
}

impl fmt::Debug for LocalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalFunction")
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn site2(a: i32, b: i32) -> Site {
        Site::new(vec![a, b])
    }

    #[test]
    fn cube_sizes() {
        assert_eq!(cube(0, 1).sites(), &[Site::at(0)]);
        assert_eq!(cube(1, 2).len(), 9);
        assert_eq!(cube(2, 1), Volume::interval(-2, 2));
        for n in 0..=5u32 {
            for d in 1..=3usize {
                assert_eq!(cube(n, d).len(), (2 * n as usize + 1).pow(d as u32));
            }
        }
    }

    #[test]
    fn shells() {
        assert_eq!(
            boundary_shell(&cube(1, 1), 1),
            Volume::new(1, [Site::at(-2), Site::at(2)]).unwrap()
        );
        assert!(boundary_shell(&cube(3, 2), 0).is_empty());
        // 5^2 - 3^2
        assert_eq!(boundary_shell(&cube(1, 2), 1).len(), 16);
        assert_eq!(boundary_shell(&cube(1, 2), 2).len(), 49 - 9);
    }

    #[test]
    fn lex_order_examples() {
        let x = site2(3, -4);
        assert!(lex_leq(&x, &x).unwrap());
        assert!(lex_leq(&Site::at(-3), &Site::at(2)).unwrap());
        assert!(lex_leq(&site2(0, 5), &site2(1, -9)).unwrap());
        assert!(!lex_leq(&site2(1, -9), &site2(0, 5)).unwrap());
        assert!(matches!(
            lex_leq(&Site::at(0), &site2(0, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn concat_examples() {
        let vol = Volume::interval(-1, 1);
        let sigma = Config::constant(vol.clone(), -1);
        let xi = Config::constant(vol.clone(), 1);
        assert_eq!(concat(&sigma, &sigma).unwrap(), sigma);
        assert_eq!(concat(&sigma, &xi).unwrap().values(), &[-1, -1, 1]);
        assert_eq!(plus_concat(&sigma).values(), &[-1, -1, 1]);
        let other = Config::constant(Volume::interval(0, 2), 1);
        assert!(concat(&sigma, &other).is_err());
    }

    #[test]
    fn translate_examples() {
        let w = Config::new(Volume::interval(-1, 1), vec![1, 0, -1]).unwrap();
        assert_eq!(w.translate(&Site::at(0)), w);
        assert_eq!(w.translate(&Site::at(1)).get(&Site::at(0)), Some(-1));
        let f = LocalFunction::spin_at(Site::at(0));
        assert_eq!(f.translate(&Site::at(1)).eval(&w).unwrap(), -1.0);
        assert_eq!(f.translate(&Site::at(1)).eval(&w).unwrap(), f.eval(&w.translate(&Site::at(1))).unwrap());
    }

    fn arb_site(d: usize) -> impl Strategy<Value = Site> {
        prop::collection::vec(-5i32..=5, d).prop_map(Site::new)
    }

    fn arb_config() -> impl Strategy<Value = (Config, Config)> {
        (1usize..=2).prop_flat_map(|d| {
            let vol = cube(1, d);
            let n = vol.len();
            (
                prop::collection::vec(prop::sample::select(vec![-1i8, 1]), n),
                prop::collection::vec(prop::sample::select(vec![-1i8, 1]), n),
            )
                .prop_map(move |(a, b)| {
                    (
                        Config::new(vol.clone(), a).unwrap(),
                        Config::new(vol.clone(), b).unwrap(),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn lex_is_total_order(x in arb_site(3), y in arb_site(3), z in arb_site(3)) {
            let xy = lex_leq(&x, &y).unwrap();
            let yx = lex_leq(&y, &x).unwrap();
            if x == y {
                prop_assert!(xy && yx);
            } else {
                prop_assert!(xy ^ yx);
            }
            if xy && lex_leq(&y, &z).unwrap() {
                prop_assert!(lex_leq(&x, &z).unwrap());
            }
        }

        #[test]
        fn concat_splits_at_origin((sigma, xi) in arb_config()) {
            let c = concat(&sigma, &xi).unwrap();
            let origin = Site::origin(sigma.volume().dim());
            for x in sigma.volume().sites() {
                let want = if lex_leq(x, &origin).unwrap() { sigma.get(x) } else { xi.get(x) };
                prop_assert_eq!(c.get(x), want);
            }
        }

        #[test]
        fn translation_is_group_action((w, _) in arb_config(), x in arb_site(2), y in arb_site(2)) {
            let d = w.volume().dim();
            let x = Site::new(x.coords().iter().take(d).cloned().collect());
            let y = Site::new(y.coords().iter().take(d).cloned().collect());
            prop_assert_eq!(w.translate(&Site::origin(d)), w.clone());
            prop_assert_eq!(w.translate(&x).translate(&y), w.translate(&x.add(&y)));
        }
    }
}
