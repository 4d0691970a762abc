use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gibbsium::potential::random_potential;
use gibbsium::specification::telescope_e;
use gibbsium::{boundary_shell, Config, GibbsSpecification, Site, Volume};

use super::replica_rng;
use crate::config::Validator;
use crate::output::Table;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Dimensions drawn uniformly per instance.
    pub dims: Vec<usize>,
    pub instances: usize,
    /// Largest range of the random potentials.
    pub max_range: u32,
    /// Term values are uniform in `[-coef, coef]`.
    pub coef: f64,
    /// Largest number of sites of the random box.
    pub max_sites: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            dims: vec![1, 2],
            instances: 200,
            max_range: 2,
            coef: 2.0,
            max_sites: 9,
        }
    }
}

impl Params {
    pub fn validate(&self, v: &mut Validator) {
        v.each_closed("dims", &self.dims, 1, 2);
        v.closed("instances", self.instances, 1, 1_000_000);
        v.closed("max_range", self.max_range, 1, 3);
        v.closed("coef", self.coef, 0.0, 10.0);
        v.closed("max_sites", self.max_sites, 1, 12);
    }
}

/// A random box of at most `max_sites` sites: an interval in d=1, a rectangle in d=2.
pub fn random_box<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_sites: usize) -> Volume {
    let offset = |rng: &mut R| rng.gen_range(-2..=0);
    if dim == 1 {
        let len = rng.gen_range(1..=max_sites) as i32;
        let lo = offset(rng);
        return Volume::interval(lo, lo + len - 1);
    }
    let width = rng.gen_range(1..=max_sites.min(3));
    let height = rng.gen_range(1..=max_sites / width);
    let (x0, y0) = (offset(rng), offset(rng));
    let sites = (0..width as i32).flat_map(|i| (0..height as i32).map(move |j| Site::new(vec![x0 + i, y0 + j])));
    Volume::new(2, sites).unwrap()
}

pub fn random_config<R: Rng + ?Sized>(rng: &mut R, vol: Volume) -> Config {
    let values = (0..vol.len()).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    Config::new(vol, values).unwrap()
}

pub struct Instance {
    pub dim: usize,
    pub sites: usize,
    pub range: u32,
    pub direct: f64,
    pub telescoped: f64,
}

pub fn instance(p: &Params, seed: u64, index: usize) -> gibbsium::Result<Instance> {
    let mut rng = replica_rng(seed, index as u64);
    let dim = p.dims[rng.gen_range(0..p.dims.len())];
    let phi = random_potential(&mut rng, dim, p.max_range, p.coef);
    let range = phi.range();
    let vol = random_box(&mut rng, dim, p.max_sites);
    let sigma = random_config(&mut rng, vol.clone());
    let omega = random_config(&mut rng, boundary_shell(&vol, range));
    let spec = GibbsSpecification::new(phi)?;
    let (direct, telescoped) = telescope_e(&spec, &vol, &sigma, &omega)?;
    Ok(Instance {
        dim,
        sites: vol.len(),
        range,
        direct,
        telescoped,
    })
}

pub fn run(p: &Params, seed: u64) -> gibbsium::Result<Vec<Table>> {
    let results = (0..p.instances)
        .into_par_iter()
        .map(|i| instance(p, seed, i))
        .collect::<gibbsium::Result<Vec<_>>>()?;
    let mut t = Table::new(
        "telescope-check",
        &["instance", "dim", "sites", "range", "direct", "telescoped", "abs_diff"],
    );
    for (i, r) in results.iter().enumerate() {
        t.push(vec![
            i.into(),
            r.dim.into(),
            r.sites.into(),
            r.range.into(),
            r.direct.into(),
            r.telescoped.into(),
            (r.direct - r.telescoped).abs().into(),
        ]);
    }
    Ok(vec![t])
}
