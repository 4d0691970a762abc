use gibbsium::potential::random_potential;
use gibbsium::specification::{
    check_consistency, continuity_profile, kernel, kernel_expectation, oscillation, relative_energy_d,
    telescope_e, FiniteRangeSource,
};
use gibbsium::{cube, Config, GibbsSpecification, LocalFunction, Potential, Site, Volume};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ising(d: usize, beta: f64, h: f64) -> GibbsSpecification {
    GibbsSpecification::new(Potential::ising(d, beta, h)).unwrap()
}

fn pattern(vol: Volume, seed: u64) -> Config {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..vol.len()).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    Config::new(vol, values).unwrap()
}

#[test]
fn two_site_kernel_matches_hand_enumeration() {
    let (beta, h) = (0.6, 0.25);
    let spec = ising(1, beta, h);
    let vol = Volume::interval(0, 1);
    let omega = Config::new(Volume::new(1, [Site::at(-1), Site::at(2)]).unwrap(), vec![1, -1]).unwrap();
    let k = kernel(&spec, &vol, &omega).unwrap();
    let weight = |a: i8, b: i8| {
        let e = -beta * (a as f64) - beta * (a * b) as f64 - beta * (-(b as f64)) - h * (a + b) as f64;
        (-e).exp()
    };
    let spins = [-1i8, 1];
    let z: f64 = spins.iter().flat_map(|&a| spins.iter().map(move |&b| weight(a, b))).sum();
    for a in spins {
        for b in spins {
            let sigma = Config::new(vol.clone(), vec![a, b]).unwrap();
            let p = k.prob(&sigma).unwrap();
            assert!((p - weight(a, b) / z).abs() < 1e-14);
        }
    }
}

#[test]
fn oscillation_of_the_central_spin() {
    for beta in [0.2, 0.9] {
        let spec = ising(1, beta, 0.0);
        let vol = cube(0, 1);
        let f = LocalFunction::spin_at(Site::origin(1));
        let osc = oscillation(&spec, &vol, &f, 0).unwrap();
        assert!((osc - 2.0 * (2.0 * beta).tanh()).abs() < 1e-13);
        assert_eq!(oscillation(&spec, &vol, &f, 1).unwrap(), 0.0);
    }
}

#[test]
fn relative_energy_of_all_minus() {
    for beta in [0.3, 1.1] {
        let spec = ising(1, beta, 0.0);
        let minus = Config::constant(cube(1, 1), -1);
        let d = relative_energy_d(&spec, &minus).unwrap();
        assert!((d - 4.0 * beta).abs() < 1e-13);
    }
    let spec = ising(1, 0.3, 0.0);
    assert!(relative_energy_d(&spec, &Config::constant(cube(0, 1), -1)).is_err());
}

#[test]
fn single_site_expectation_is_hyperbolic_tangent() {
    let (beta, h) = (0.4, 0.15);
    let spec = ising(2, beta, h);
    let vol = cube(0, 2);
    let omega = Config::from_fn(cube(1, 2), |x| if x.coords()[0] > 0 { -1 } else { 1 });
    let f = LocalFunction::spin_at(Site::origin(2));
    let m = kernel_expectation(&spec, &vol, &omega, &f).unwrap();
    // Neighbours of the origin: (-1,0)=+, (1,0)=-, (0,-1)=+, (0,1)=+.
    let field = beta * 2.0 + h;
    assert!((m - field.tanh()).abs() < 1e-14);
}

#[test]
fn ising_kernels_are_consistent() {
    let spec = ising(2, 0.5, 0.1);
    let inner = Volume::new(2, [Site::new(vec![0, 0]), Site::new(vec![0, 1])]).unwrap();
    let outer = cube(1, 2);
    let omega = pattern(cube(2, 2), 4);
    let tv = check_consistency(&spec, &inner, &outer, &omega).unwrap();
    assert!(tv < 1e-13, "tv {tv}");
    assert!(check_consistency(&spec, &outer, &inner, &omega).is_err());
}

#[test]
fn continuity_profile_vanishes_beyond_the_range() {
    let spec = ising(1, 0.7, 0.0);
    let source = FiniteRangeSource { spec: &spec, volume: cube(1, 1) };
    let f = LocalFunction::spin_at(Site::origin(1));
    let omega = Config::constant(cube(3, 1), 1);
    let profile = continuity_profile(&source, &omega, &f, 3).unwrap();
    assert!(profile[0] > 0.0 && profile[1] > 0.0);
    assert_eq!(profile[2], 0.0);
    assert_eq!(profile[3], 0.0);
    assert!(profile[0] >= profile[1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn telescoping_reproduces_the_kernel_ratio(seed in 0u64..10_000, which in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_potential(&mut rng, 1, 2, 1.0);
        let spec = GibbsSpecification::new(phi).unwrap();
        let vol = cube(1, 1);
        let sigma = pattern(vol.clone(), which);
        let omega = pattern(cube(6, 1), which + 1);
        let (direct, telescoped) = telescope_e(&spec, &vol, &sigma, &omega).unwrap();
        prop_assert!((direct - telescoped).abs() < 1e-10);
    }

    #[test]
    fn random_kernels_are_consistent(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_potential(&mut rng, 1, 2, 1.0);
        let spec = GibbsSpecification::new(phi).unwrap();
        let omega = pattern(cube(8, 1), seed);
        let tv = check_consistency(&spec, &Volume::interval(0, 1), &cube(2, 1), &omega).unwrap();
        prop_assert!(tv < 1e-12);
    }
}
