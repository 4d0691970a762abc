use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gibbsium::disordered::{ad_check, joint_table, DecouplingReport};
use gibbsium::potential::boundary_oscillation;
use gibbsium::{cube, Config, Extended, Potential};

use super::DisorderSpec;
use crate::config::Validator;
use crate::output::Table;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub beta: f64,
    pub h: f64,
    pub disorder: DisorderSpec,
    /// Radius of the d=1 box carrying the joint table.
    pub box_radius: u32,
    /// Radii of the inner windows holding the event `A`.
    pub n: Vec<u32>,
    /// Sites between the inner window and the event `B`.
    pub gap: u32,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            beta: 1.0,
            h: 0.5,
            disorder: DisorderSpec::default(),
            box_radius: 4,
            n: vec![1, 2],
            gap: 1,
        }
    }
}

impl Params {
    pub fn validate(&self, v: &mut Validator) {
        v.closed("beta", self.beta, 0.0, 10.0);
        v.closed("h", self.h, -10.0, 10.0);
        self.disorder.validate(v, "disorder");
        v.closed("box_radius", self.box_radius, 1, 5);
        v.each_closed("n", &self.n, 0, 5);
        for (i, &n) in self.n.iter().enumerate() {
            if n + self.gap + 1 > self.box_radius {
                v.fail(
                    &format!("n[{i}]"),
                    format!("n + gap = {} leaves no two-site event inside box_radius {}", n + self.gap, self.box_radius),
                );
            }
        }
        v.closed("gap", self.gap, 0, 5);
    }
}

/// Decoupling reports for the product disorder law and the joint table, with the bound for each.
pub fn reports(p: &Params, n: u32) -> gibbsium::Result<[(&'static str, DecouplingReport, f64); 2]> {
    let law = p.disorder.law()?;
    let phi = Potential::rfim(1, p.beta, p.h, law.support().clone());
    let vol = cube(p.box_radius, 1);
    let product = ad_check(&law.product_table(&vol)?, n, p.gap)?;
    let plus = Config::constant(cube(p.box_radius + 2, 1), 1);
    let joint = joint_table(&phi, &law, &vol, &plus, &plus)?;
    let report = ad_check(joint.table(), n, p.gap)?;
    let bound = 8.0 * boundary_oscillation(&phi, &cube(n, 1))?;
    Ok([("product", product, 0.0), ("joint", report, bound)])
}

pub fn run(p: &Params) -> gibbsium::Result<Vec<Table>> {
    let results = p
        .n
        .par_iter()
        .map(|&n| reports(p, n))
        .collect::<gibbsium::Result<Vec<_>>>()?;
    let mut t = Table::new(
        "ad-check",
        &["kind", "n", "gap", "events", "max_abs_log_ratio", "bound", "holds"],
    );
    for pair in results {
        for (kind, r, bound) in pair {
            let holds = matches!(r.max_abs_log_ratio, Extended::Finite(v) if v <= bound);
            t.push(vec![
                kind.into(),
                r.n.into(),
                r.gap.into(),
                r.events.into(),
                r.max_abs_log_ratio.into(),
                bound.into(),
                holds.into(),
            ]);
        }
    }
    Ok(vec![t])
}
