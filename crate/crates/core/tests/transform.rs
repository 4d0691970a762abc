use gibbsium::transform::{
    cluster_find, grising_sample, grising_table, grising_zero_rate, Decimate, GriSingSource, OccupancyField,
};
use gibbsium::{cube, Config, Potential, ProbTable, Site, TransferChain, Volume};

fn occupancy(vol: Volume, pattern: impl Fn(&Site) -> bool) -> OccupancyField {
    let occupied = vol.sites().iter().map(&pattern).collect();
    OccupancyField { volume: vol, occupied, p: 0.5 }
}

#[test]
fn decimation_keeps_every_other_site() {
    let c = Config::new(Volume::interval(-2, 2), vec![1, -1, -1, 1, 1]).unwrap();
    let d = c.decimate(2).unwrap();
    assert_eq!(d.volume(), &Volume::interval(-1, 1));
    assert_eq!(d.values(), &[1, -1, 1]);
    assert!(c.decimate(0).is_err());
    assert!(Config::constant(Volume::interval(1, 1), 1).decimate(2).is_err());
}

#[test]
fn decimated_chain_window_is_a_two_step_chain() {
    let beta = 0.45;
    let chain = TransferChain::new(&Potential::ising(1, beta, 0.0)).unwrap();
    let window = chain.window_table(&Volume::interval(0, 2)).unwrap();
    let coarse = window.decimate(2).unwrap();
    assert_eq!(coarse.volume(), &Volume::interval(0, 1));
    // Two steps keep the spin with probability (1 + tanh²β) / 2.
    let agree = (1.0 + beta.tanh().powi(2)) / 2.0;
    let expect = [agree / 2.0, (1.0 - agree) / 2.0, (1.0 - agree) / 2.0, agree / 2.0];
    for (p, e) in coarse.probs().iter().zip(expect) {
        assert!((p - e).abs() < 1e-12);
    }
}

#[test]
fn decimated_product_is_a_product() {
    let alphabet = gibbsium::LocalAlphabet::Spin(gibbsium::Alphabet::spins());
    let table = ProbTable::product(cube(2, 1), alphabet.clone(), &[0.25, 0.75]).unwrap();
    let coarse = table.decimate(2).unwrap();
    let expect = ProbTable::product(cube(1, 1), alphabet, &[0.25, 0.75]).unwrap();
    for (a, b) in coarse.probs().iter().zip(expect.probs()) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn plus_shaped_cluster() {
    let vol = cube(1, 2);
    let plus = occupancy(vol.clone(), |x| x.coords().iter().filter(|&&c| c == 0).count() >= 1);
    let labels = cluster_find(&plus);
    assert_eq!(labels.len(), 1);
    assert_eq!(labels.clusters[0].len(), 5);
    assert!(labels.open[0]);
    let corners = occupancy(vol.clone(), |x| x.coords().iter().all(|&c| c != 0));
    let labels = cluster_find(&corners);
    assert_eq!(labels.len(), 4);
    assert!(labels.clusters.iter().all(|c| c.len() == 1));
    let centre = occupancy(vol, |x| x.norm() == 0);
    let labels = cluster_find(&centre);
    assert_eq!(labels.len(), 1);
    assert!(!labels.open[0]);
}

#[test]
fn grising_single_site_law() {
    let p = 0.3;
    let table = grising_table(p, 1.7, &cube(0, 1)).unwrap();
    // Alphabet order is -1, 0, +1.
    let expect = [p / 2.0, 1.0 - p, p / 2.0];
    for (a, b) in table.probs().iter().zip(expect) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn grising_pair_law() {
    let (p, beta) = (0.6, 0.8);
    let vol = Volume::interval(0, 1);
    let table = grising_table(p, beta, &vol).unwrap();
    let pair_z = 2.0 * beta.exp() + 2.0 * (-beta).exp();
    let prob = |a: i8, b: i8| table.prob(&Config::new(vol.clone(), vec![a, b]).unwrap()).unwrap();
    assert!((prob(1, 1) - p * p * beta.exp() / pair_z).abs() < 1e-15);
    assert!((prob(1, -1) - p * p * (-beta).exp() / pair_z).abs() < 1e-15);
    assert!((prob(0, -1) - (1.0 - p) * p / 2.0).abs() < 1e-15);
    assert!((prob(0, 0) - (1.0 - p).powi(2)).abs() < 1e-15);
}

#[test]
fn isolated_site_conditional() {
    let (p, beta) = (0.4, 1.2);
    let source = GriSingSource::new(p, beta, cube(0, 2), 1).unwrap();
    let empty = Config::constant(cube(1, 2), 0);
    let law = source.conditional(&empty).unwrap();
    let expect = [p / 2.0, 1.0 - p, p / 2.0];
    for (a, b) in law.probs().iter().zip(expect) {
        assert!((a - b).abs() < 1e-14);
    }
    // A single plus neighbour tilts the occupied spin towards +.
    let mut one = empty.clone();
    one.set(&Site::new(vec![1, 0]), 1).unwrap();
    let law = source.conditional(&one).unwrap().probs().to_vec();
    let tilt = beta.exp() / (beta.exp() + (-beta).exp());
    let occupied = law[0] + law[2];
    assert!((law[2] / occupied - tilt).abs() < 1e-12);
    assert!(GriSingSource::new(p, beta, cube(2, 2), 1).is_err());
}

#[test]
fn zero_rate_matches_the_empty_occupancy() {
    let (p, beta) = (0.2, 0.9);
    let rate = grising_zero_rate(p, beta, 1, 1, 4000, 3, 3.0).unwrap();
    assert!((rate.exact - (1.0 - p).ln()).abs() < 1e-12);
    assert_eq!(rate.closed_form, (1.0 - p).ln());
    assert!(rate.covers(rate.exact), "{rate:?}");
}

#[test]
fn sampling_is_reproducible() {
    let vol = cube(3, 2);
    let a = grising_sample(0.55, 0.6, &vol, 9).unwrap();
    let b = grising_sample(0.55, 0.6, &vol, 9).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.exact_clusters + a.heatbath_clusters, a.clusters);
    assert!(grising_sample(1.0, 0.6, &vol, 9).is_err());
}
