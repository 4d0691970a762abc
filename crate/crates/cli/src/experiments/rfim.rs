use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gibbsium::disordered::{
    conditional_residual, entropy_decomposition_line, joint_entropy_bound, quenched_pressure, r_plus_minus,
    DisorderLaw, EntropyBoundRow, EntropyDecomposition, JointConfig, SurrogateBox,
};
use gibbsium::{cube, Config, Potential, Site, Volume};

use super::telescope::random_config;
use super::{child_seed, replica_rng, DisorderSpec};
use crate::config::Validator;
use crate::output::Table;

const RPM_STREAMS: u64 = 1 << 32;
const PRESSURE_STREAM: u64 = 1 << 33;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub beta: f64,
    pub h: f64,
    pub disorder: DisorderSpec,
    /// Window radii of the entropy bound.
    pub bound_n: Vec<u32>,
    /// Each window is compared inside the box of radius `n + margin`.
    pub margin: u32,
    /// Surrogate radii of the conditional law at the origin.
    pub radii: Vec<u32>,
    pub reference_radius: u32,
    /// Sampled outside configurations for the conditional law.
    pub conditional_samples: usize,
    /// Window radii of the entropy decomposition.
    pub decomposition_n: Vec<u32>,
    pub pressure_length: usize,
    pub pressure_samples: usize,
    /// Parameters of the two-dimensional r± comparison on the 3×3 box.
    pub rpm_beta: f64,
    pub rpm_h: f64,
    pub rpm_samples: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            beta: 1.0,
            h: 0.5,
            disorder: DisorderSpec::default(),
            bound_n: vec![1, 2, 3, 4, 5],
            margin: 0,
            radii: vec![2, 3, 4, 5],
            reference_radius: 9,
            conditional_samples: 4,
            decomposition_n: vec![1, 2, 4, 8],
            pressure_length: 4096,
            pressure_samples: 256,
            rpm_beta: 1.5,
            rpm_h: 0.3,
            rpm_samples: 100,
        }
    }
}

impl Params {
    pub fn validate(&self, v: &mut Validator) {
        v.closed("beta", self.beta, 0.0, 10.0);
        v.closed("h", self.h, -10.0, 10.0);
        self.disorder.validate(v, "disorder");
        v.each_closed("bound_n", &self.bound_n, 0, 6);
        v.closed("margin", self.margin, 0, 3);
        v.each_closed("radii", &self.radii, 0, 10);
        v.closed("reference_radius", self.reference_radius, 1, 10);
        for (i, &r) in self.radii.iter().enumerate() {
            if r > self.reference_radius {
                v.fail(&format!("radii[{i}]"), format!("{r} exceeds reference_radius {}", self.reference_radius));
            }
        }
        v.closed("conditional_samples", self.conditional_samples, 1, 10_000);
        v.each_closed("decomposition_n", &self.decomposition_n, 0, 1000);
        v.closed("pressure_length", self.pressure_length, 1, 1 << 20);
        v.closed("pressure_samples", self.pressure_samples, 2, 1 << 20);
        v.closed("rpm_beta", self.rpm_beta, 0.0, 10.0);
        v.closed("rpm_h", self.rpm_h, -10.0, 10.0);
        v.closed("rpm_samples", self.rpm_samples, 1, 100_000);
        if self.disorder.values.iter().any(|&x| x != 1 && x != -1) {
            v.fail("disorder.values", "the r± comparison needs disorder values in {-1, +1}");
        }
    }

    fn law_and_potential(&self) -> gibbsium::Result<(DisorderLaw, Potential)> {
        let law = self.disorder.law()?;
        let phi = Potential::rfim(1, self.beta, self.h, law.support().clone());
        Ok((law, phi))
    }

    /// Radius of the d=1 boundary configurations, enough for every box used.
    fn reach(&self) -> u32 {
        let windows = self.bound_n.iter().max().copied().unwrap_or(0) + self.margin;
        let decomposition = self.decomposition_n.iter().max().copied().unwrap_or(0);
        windows.max(decomposition).max(self.reference_radius) + 3
    }
}

fn constant(reach: u32, value: i8) -> Config {
    Config::constant(cube(reach, 1), value)
}

pub fn bound(p: &Params) -> gibbsium::Result<Vec<EntropyBoundRow>> {
    let (law, phi) = p.law_and_potential()?;
    let reach = p.reach();
    p.bound_n
        .par_iter()
        .map(|&n| {
            let rows = joint_entropy_bound(
                &phi,
                &law,
                SurrogateBox::PerWindow { margin: p.margin },
                &[n],
                &constant(reach, 1),
                &constant(reach, -1),
                &constant(reach, 1),
            )?;
            Ok(rows.into_iter().next().expect("one window"))
        })
        .collect()
}

/// Residual of the conditional law at the origin for each sample and radius, sample-major.
pub fn conditional(p: &Params, seed: u64) -> gibbsium::Result<Vec<(usize, u32, f64)>> {
    let (law, phi) = p.law_and_potential()?;
    let reach = p.reach();
    let origin = Volume::new(1, [Site::at(0)])?;
    let cases: Vec<(usize, u32)> = (0..p.conditional_samples)
        .flat_map(|s| p.radii.iter().map(move |&r| (s, r)))
        .collect();
    cases
        .par_iter()
        .map(|&(s, r)| {
            let mut rng = replica_rng(seed, s as u64);
            let vol = cube(reach, 1);
            let sigma = random_config(&mut rng, vol.clone());
            let eta = law.sample(&mut rng, &vol);
            let outside = JointConfig::new(sigma, eta)?;
            let res = conditional_residual(&phi, &law, &origin, &outside, &constant(reach, 1), r, p.reference_radius)?;
            Ok((s, r, res))
        })
        .collect()
}

pub fn decomposition(p: &Params, seed: u64) -> gibbsium::Result<Vec<EntropyDecomposition>> {
    let (law, phi) = p.law_and_potential()?;
    let pressure = quenched_pressure(
        &phi,
        &law,
        p.pressure_length,
        p.pressure_samples,
        child_seed(seed, PRESSURE_STREAM),
    )?;
    let reach = p.reach();
    p.decomposition_n
        .par_iter()
        .map(|&n| entropy_decomposition_line(&phi, &law, n, -1, 1, &constant(reach, 1), pressure))
        .collect()
}

/// `(r⁺, r⁻)` on the 3×3 box for sampled disorder fields.
pub fn rpm(p: &Params, seed: u64) -> gibbsium::Result<Vec<(f64, f64)>> {
    let law = p.disorder.law()?;
    (0..p.rpm_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(seed, RPM_STREAMS + i as u64);
            let eta = law.sample(&mut rng, &cube(2, 2));
            r_plus_minus(p.rpm_beta, p.rpm_h, &cube(1, 2), &eta)
        })
        .collect()
}

pub fn run(p: &Params, seed: u64) -> gibbsium::Result<Vec<Table>> {
    let mut bound_table = Table::new(
        "rfim-joint-bound",
        &["n", "sites", "relative_entropy", "bound", "holds", "per_site"],
    );
    for r in bound(p)? {
        bound_table.push(vec![
            r.n.into(),
            r.sites.into(),
            r.relative_entropy.into(),
            r.bound.into(),
            r.holds.into(),
            r.per_site().into(),
        ]);
    }

    let mut cond_table = Table::new(
        "rfim-joint-conditional",
        &["sample", "radius", "reference_radius", "residual"],
    );
    for (s, r, res) in conditional(p, seed)? {
        cond_table.push(vec![s.into(), r.into(), p.reference_radius.into(), res.into()]);
    }

    let mut dec_table = Table::new(
        "rfim-joint-decomposition",
        &[
            "n", "relative_entropy", "disorder_relative_entropy", "entropy", "disorder_entropy", "energy",
            "pressure", "pressure_stderr", "residual",
        ],
    );
    for d in decomposition(p, seed)? {
        dec_table.push(vec![
            d.n.into(),
            d.relative_entropy.into(),
            d.disorder_relative_entropy.into(),
            d.entropy.into(),
            d.disorder_entropy.into(),
            d.energy.into(),
            d.pressure.value.into(),
            d.pressure.stderr.into(),
            d.residual.into(),
        ]);
    }

    let mut rpm_table = Table::new("rfim-joint-rpm", &["sample", "r_plus", "r_minus", "strict"]);
    for (i, (plus, minus)) in rpm(p, seed)?.into_iter().enumerate() {
        rpm_table.push(vec![i.into(), plus.into(), minus.into(), (plus < minus).into()]);
    }
    Ok(vec![bound_table, cond_table, dec_table, rpm_table])
}
