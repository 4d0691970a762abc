use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gibbsium::transform::{grising_table, grising_zero_rate, ZeroRate};
use gibbsium::{cube, Config};

use super::child_seed;
use crate::config::Validator;
use crate::output::Table;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Occupation densities.
    pub p: Vec<f64>,
    pub beta: f64,
    pub dim: usize,
    pub n: Vec<u32>,
    pub samples: u64,
    /// Width of the confidence interval in standard deviations.
    pub z: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            p: vec![0.1, 0.3, 0.5],
            beta: 1.0,
            dim: 1,
            n: vec![2],
            samples: 10_000,
            z: 3.0,
        }
    }
}

impl Params {
    pub fn validate(&self, v: &mut Validator) {
        v.nonempty("p", &self.p);
        for (i, &p) in self.p.iter().enumerate() {
            let field = format!("p[{i}]");
            v.half_open(&field, p, 0.0, 1.0);
            if p == 0.0 {
                v.fail(&field, "the zero rate needs p > 0");
            }
        }
        v.closed("beta", self.beta, -10.0, 10.0);
        v.closed("dim", self.dim, 1, 3);
        v.each_closed("n", &self.n, 0, 20);
        v.closed("samples", self.samples, 1, 100_000_000);
        v.open("z", self.z, 0.0, 20.0);
    }
}

/// Zero rate on `Λ_n` and the exact single-site law `(P(-1), P(0), P(+1))`.
pub fn evaluate(p: f64, beta: f64, dim: usize, n: u32, samples: u64, seed: u64, z: f64) -> gibbsium::Result<(ZeroRate, [f64; 3])> {
    let rate = grising_zero_rate(p, beta, n, dim, samples, seed, z)?;
    let site = cube(0, dim);
    let table = grising_table(p, beta, &site)?;
    let law = [-1i8, 0, 1].map(|v| table.prob(&Config::new(site.clone(), vec![v]).unwrap()).unwrap());
    Ok((rate, law))
}

pub fn run(p: &Params, seed: u64) -> gibbsium::Result<Vec<Table>> {
    let cases: Vec<(f64, u32)> = p.p.iter().flat_map(|&d| p.n.iter().map(move |&n| (d, n))).collect();
    let results = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(d, n))| evaluate(d, p.beta, p.dim, n, p.samples, child_seed(seed, i as u64), p.z))
        .collect::<gibbsium::Result<Vec<_>>>()?;
    let mut t = Table::new(
        "grising",
        &[
            "p", "n", "exact", "closed_form", "empirical", "ci_low", "ci_high", "covered", "hits", "samples",
            "site_minus", "site_zero", "site_plus",
        ],
    );
    for (&(d, n), (r, law)) in cases.iter().zip(results) {
        t.push(vec![
            d.into(),
            n.into(),
            r.exact.into(),
            r.closed_form.into(),
            r.empirical.into(),
            r.ci_low.into(),
            r.ci_high.into(),
            r.covers(r.exact).into(),
            r.hits.into(),
            r.samples.into(),
            law[0].into(),
            law[1].into(),
            law[2].into(),
        ]);
    }
    Ok(vec![t])
}
