use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gibbsium::measure::{entropy_formula_rhs, relative_entropy_rate, EntropyFormula, Reference, Source};
use gibbsium::{Extended, GibbsSpecification, Potential, TransferChain};

use crate::config::Validator;
use crate::output::Table;

/// `μ` and `ν` are infinite-volume d=1 Ising measures given by their transfer chains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub beta_mu: f64,
    pub h_mu: f64,
    pub beta_nu: f64,
    pub h_nu: f64,
    pub n: Vec<u32>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            beta_mu: 0.3,
            h_mu: 0.0,
            beta_nu: 0.7,
            h_nu: 0.0,
            n: vec![1, 2, 4, 8, 12],
        }
    }
}

impl Params {
    pub fn validate(&self, v: &mut Validator) {
        for (field, value) in [
            ("beta_mu", self.beta_mu),
            ("h_mu", self.h_mu),
            ("beta_nu", self.beta_nu),
            ("h_nu", self.h_nu),
        ] {
            v.closed(field, value, -10.0, 10.0);
        }
        v.each_closed("n", &self.n, 0, 10_000);
    }
}

/// The finite-n entropy formula and the direct relative entropy density at one `n`.
pub fn evaluate(p: &Params, n: u32) -> gibbsium::Result<(EntropyFormula, Extended)> {
    let nu_phi = Potential::ising(1, p.beta_nu, p.h_nu);
    let spec = GibbsSpecification::new(nu_phi.clone())?;
    let nu = TransferChain::new(&nu_phi)?;
    let mu = TransferChain::new(&Potential::ising(1, p.beta_mu, p.h_mu))?;
    let f = entropy_formula_rhs(&spec, Source::Chain(&mu), Source::Chain(&nu), Reference::Plus, n)?;
    let direct = relative_entropy_rate(Source::Chain(&mu), Source::Chain(&nu), n)?;
    Ok((f, direct))
}

pub fn run(p: &Params) -> gibbsium::Result<Vec<Table>> {
    let results = p
        .n
        .par_iter()
        .map(|&n| evaluate(p, n))
        .collect::<gibbsium::Result<Vec<_>>>()?;
    let mut t = Table::new(
        "vp-1d",
        &["n", "entropy", "specific_energy", "relative_energy", "rhs", "direct", "gap"],
    );
    for (f, direct) in results {
        let gap = match (f.rhs(), direct) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite((a - b).abs()),
            _ => Extended::Infinite,
        };
        t.push(vec![
            f.n.into(),
            f.entropy.into(),
            f.specific_energy.into(),
            f.relative_energy.into(),
            f.rhs().into(),
            direct.into(),
            gap.into(),
        ]);
    }
    Ok(vec![t])
}
