use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gibbsium::specification::check_consistency;
use gibbsium::{boundary_shell, GibbsSpecification, Site, Volume};

use super::telescope::random_config;
use super::{replica_rng, PotentialSpec};
use crate::config::Validator;
use crate::output::Table;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub dim: usize,
    pub potentials: Vec<PotentialSpec>,
    /// Random boundary conditions per potential.
    pub boundaries: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            dim: 1,
            potentials: vec![
                PotentialSpec::Ising { beta: 0.8, h: 0.2 },
                PotentialSpec::RfimQuenched { beta: 0.8, h: 0.5 },
            ],
            boundaries: 50,
        }
    }
}

impl Params {
    pub fn validate(&self, v: &mut Validator) {
        v.closed("dim", self.dim, 1, 2);
        v.nonempty("potentials", &self.potentials);
        for (i, p) in self.potentials.iter().enumerate() {
            p.validate(v, &format!("potentials[{i}]"), self.dim);
        }
        v.closed("boundaries", self.boundaries, 1, 100_000);
    }
}

/// The four-site box: an interval in d=1, a 2×2 square in d=2.
pub fn four_site_box(dim: usize) -> Volume {
    if dim == 1 {
        Volume::interval(0, 3)
    } else {
        let sites = (0..2).flat_map(|i| (0..2).map(move |j| Site::new(vec![i, j])));
        Volume::new(2, sites).unwrap()
    }
}

/// Every nonempty subset of `vol`.
pub fn subsets(vol: &Volume) -> Vec<Volume> {
    let s = vol.sites();
    (1u32..(1 << s.len()))
        .map(|mask| {
            let chosen = (0..s.len()).filter(|i| mask & (1 << i) != 0).map(|i| s[i].clone());
            Volume::new(vol.dim(), chosen).unwrap()
        })
        .collect()
}

/// Every pair `inner ⊆ outer` of nonempty subsets of `vol`.
pub fn nestings(vol: &Volume) -> Vec<(Volume, Volume)> {
    subsets(vol)
        .into_iter()
        .flat_map(|outer| subsets(&outer).into_iter().map(move |inner| (inner, outer.clone())))
        .collect()
}

/// Largest deviation over all nestings for one sampled boundary (and disorder field).
pub fn deviation(spec_of: &PotentialSpec, dim: usize, seed: u64, index: u64) -> gibbsium::Result<(usize, f64)> {
    let mut rng = replica_rng(seed, index);
    let phi = spec_of.build(dim)?;
    let base = four_site_box(dim);
    let range = phi.range().max(1);
    let around = base.union(&boundary_shell(&base, range));
    let omega = random_config(&mut rng, around.clone());
    let spec = if phi.alphabet().is_joint() {
        let eta = random_config(&mut rng, around.union(&boundary_shell(&around, range)));
        GibbsSpecification::quenched(phi, eta)?
    } else {
        GibbsSpecification::new(phi)?
    };
    let pairs = nestings(&base);
    let mut worst: f64 = 0.0;
    for (inner, outer) in &pairs {
        worst = worst.max(check_consistency(&spec, inner, outer, &omega)?);
    }
    Ok((pairs.len(), worst))
}

pub fn run(p: &Params, seed: u64) -> gibbsium::Result<Vec<Table>> {
    let jobs: Vec<(usize, usize)> = (0..p.potentials.len())
        .flat_map(|k| (0..p.boundaries).map(move |b| (k, b)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(k, b)| deviation(&p.potentials[k], p.dim, seed, (k * p.boundaries + b) as u64))
        .collect::<gibbsium::Result<Vec<_>>>()?;
    let mut t = Table::new(
        "consistency-check",
        &["potential", "kind", "boundary", "nestings", "max_deviation"],
    );
    for (&(k, b), (count, worst)) in jobs.iter().zip(results) {
        t.push(vec![
            k.into(),
            p.potentials[k].label().into(),
            b.into(),
            count.into(),
            worst.into(),
        ]);
    }
    Ok(vec![t])
}
