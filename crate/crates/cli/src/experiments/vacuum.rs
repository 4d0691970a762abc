use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gibbsium::potential::{hamiltonian, random_potential, vacuum_transform};
use gibbsium::specification::kernel;
use gibbsium::{boundary_shell, Config, GibbsSpecification, Potential};

use super::consistency::{four_site_box, subsets};
use super::telescope::random_config;
use super::{replica_rng, PotentialSpec};
use crate::config::Validator;
use crate::output::Table;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub dim: usize,
    pub instances: usize,
    pub max_range: u32,
    pub coef: f64,
    /// A fixed spin potential; random potentials are drawn when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            dim: 1,
            instances: 50,
            max_range: 2,
            coef: 2.0,
            potential: None,
        }
    }
}

impl Params {
    pub fn validate(&self, v: &mut Validator) {
        v.closed("dim", self.dim, 1, 2);
        v.closed("instances", self.instances, 1, 100_000);
        v.closed("max_range", self.max_range, 1, 3);
        v.closed("coef", self.coef, 0.0, 10.0);
        if let Some(p) = &self.potential {
            if matches!(p, PotentialSpec::RfimQuenched { .. }) {
                v.fail("potential.kind", "the vacuum transform needs a spin potential");
            }
            p.validate(v, "potential", self.dim);
        }
    }
}

pub struct Instance {
    pub terms: usize,
    /// Largest `|Φ̃_A(σ)|` over fillings with at least one `+` in `A`.
    pub max_plus_entry: f64,
    /// Largest kernel difference over all boxes inside the four-site box.
    pub max_kernel_diff: f64,
    /// `H_Λ(+|+)` of the vacuum potential on the four-site box.
    pub h_all_plus: f64,
}

fn plus_entries(vac: &Potential) -> gibbsium::Result<f64> {
    let q = vac.q();
    let plus = vac.plus_symbol()?;
    let mut worst: f64 = 0.0;
    for t in vac.terms() {
        let k = t.shape().len();
        for idx in 0..q.pow(k as u32) {
            let syms: Vec<u8> = (0..k).map(|j| ((idx / q.pow((k - 1 - j) as u32)) % q) as u8).collect();
            if syms.contains(&plus) {
                worst = worst.max(t.value(&syms, q).abs());
            }
        }
    }
    Ok(worst)
}

pub fn instance(p: &Params, seed: u64, index: usize) -> gibbsium::Result<Instance> {
    let mut rng = replica_rng(seed, index as u64);
    let phi = match &p.potential {
        Some(spec) => spec.build(p.dim)?,
        None => random_potential(&mut rng, p.dim, p.max_range, p.coef),
    };
    let vac = vacuum_transform(&phi)?;
    let base = four_site_box(p.dim);
    let shell = boundary_shell(&base, phi.range().max(1));
    let omega = random_config(&mut rng, base.union(&shell));
    let original = GibbsSpecification::new(phi)?;
    let transformed = GibbsSpecification::new(vac.clone())?;
    let mut max_kernel_diff: f64 = 0.0;
    for vol in subsets(&base) {
        let a = kernel(&original, &vol, &omega)?;
        let b = kernel(&transformed, &vol, &omega)?;
        for (x, y) in a.table().probs().iter().zip(b.table().probs()) {
            max_kernel_diff = max_kernel_diff.max((x - y).abs());
        }
    }
    let h_all_plus = hamiltonian(
        &vac,
        &base,
        &Config::constant(base.clone(), 1),
        &Config::constant(shell, 1),
    )?;
    Ok(Instance {
        terms: vac.terms().len(),
        max_plus_entry: plus_entries(&vac)?,
        max_kernel_diff,
        h_all_plus,
    })
}

pub fn run(p: &Params, seed: u64) -> gibbsium::Result<Vec<Table>> {
    let results = (0..p.instances)
        .into_par_iter()
        .map(|i| instance(p, seed, i))
        .collect::<gibbsium::Result<Vec<_>>>()?;
    let mut t = Table::new(
        "vacuum-check",
        &["instance", "terms", "max_plus_entry", "max_kernel_diff", "h_all_plus"],
    );
    for (i, r) in results.iter().enumerate() {
        t.push(vec![
            i.into(),
            r.terms.into(),
            r.max_plus_entry.into(),
            r.max_kernel_diff.into(),
            r.h_all_plus.into(),
        ]);
    }
    Ok(vec![t])
}
