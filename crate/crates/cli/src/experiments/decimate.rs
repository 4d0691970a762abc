use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gibbsium::measure::{check_domination, exact_gibbs, DOMINATION_MAX_SITES};
use gibbsium::transform::Decimate;
use gibbsium::{boundary_shell, cube, Config, Potential, ProbTable};

use crate::config::Validator;
use crate::output::Table;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub dim: usize,
    pub beta: f64,
    pub h: f64,
    /// Decimation factor.
    pub b: u32,
    /// Radii of the boxes carrying the boundary condition.
    pub n: Vec<u32>,
    /// Radius of the compared window on the decimated lattice.
    pub window: u32,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            dim: 1,
            beta: 1.0,
            h: 0.0,
            b: 2,
            n: vec![2, 3, 4, 6],
            window: 1,
        }
    }
}

impl Params {
    pub fn validate(&self, v: &mut Validator) {
        v.closed("dim", self.dim, 1, 2);
        v.closed("beta", self.beta, 0.0, 10.0);
        v.closed("h", self.h, -10.0, 10.0);
        v.closed("b", self.b, 1, 8);
        v.each_closed("n", &self.n, 0, 12);
        let sites = (2 * self.window as usize + 1).pow(self.dim as u32);
        if sites > DOMINATION_MAX_SITES {
            v.fail("window", format!("{sites} window sites exceed the up-set enumeration limit {DOMINATION_MAX_SITES}"));
        }
        for (i, &n) in self.n.iter().enumerate() {
            if n < self.window * self.b {
                v.fail(&format!("n[{i}]"), format!("box radius {n} is smaller than window × b = {}", self.window * self.b));
            }
        }
    }
}

/// Decimated window laws under minus and plus boundary conditions on `cube(n)`.
pub fn windows(p: &Params, n: u32) -> gibbsium::Result<(ProbTable, ProbTable)> {
    let phi = Potential::ising(p.dim, p.beta, p.h);
    let vol = cube(n, p.dim);
    let shell = boundary_shell(&vol, phi.range());
    let law = |value: i8| -> gibbsium::Result<ProbTable> {
        let table = exact_gibbs(&phi, &vol, &Config::constant(shell.clone(), value))?;
        table.decimate(p.b)?.marginal(&cube(p.window, p.dim))
    };
    Ok((law(-1)?, law(1)?))
}

fn origin_magnetization(t: &ProbTable) -> f64 {
    let idx = t.volume().len() / 2;
    let plus = t.alphabet().encode(1, None).unwrap();
    (0..t.len())
        .map(|i| if t.symbols(i)[idx] == plus { t.probs()[i] } else { -t.probs()[i] })
        .sum()
}

pub fn run(p: &Params) -> gibbsium::Result<Vec<Table>> {
    let results = p
        .n
        .par_iter()
        .map(|&n| {
            let (minus, plus) = windows(p, n)?;
            let dominated = check_domination(&minus, &plus)?;
            Ok((minus.volume().len(), dominated, origin_magnetization(&minus), origin_magnetization(&plus)))
        })
        .collect::<gibbsium::Result<Vec<_>>>()?;
    let mut t = Table::new(
        "decimate-dominate",
        &["n", "b", "window_sites", "minus_dominated_by_plus", "minus_magnetization", "plus_magnetization"],
    );
    for (&n, (sites, dominated, m_minus, m_plus)) in p.n.iter().zip(results) {
        t.push(vec![
            n.into(),
            p.b.into(),
            sites.into(),
            dominated.into(),
            m_minus.into(),
            m_plus.into(),
        ]);
    }
    Ok(vec![t])
}
