use gibbsium::potential::{
    boundary_oscillation, hamiltonian, random_potential, tail_seminorm, truncate, truncation_gap,
    vacuum_transform,
};
use gibbsium::specification::kernel;
use gibbsium::{
    boundary_shell, concat, cube, lex_leq, plus_concat, Config, GibbsSpecification, LocalAlphabet,
    Potential, Site, Term, Volume,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn site(c: &[i32]) -> Site {
    Site::new(c.to_vec())
}

fn line(values: &[i8], lo: i32) -> Config {
    let hi = lo + values.len() as i32 - 1;
    Config::new(Volume::interval(lo, hi), values.to_vec()).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn cube_and_shell_counts() {
    for d in 1..=3 {
        for n in 0..=2u32 {
            let side = 2 * n as usize + 1;
            assert_eq!(cube(n, d).len(), side.pow(d as u32));
            let outer = (side + 2).pow(d as u32);
            assert_eq!(boundary_shell(&cube(n, d), 1).len(), outer - side.pow(d as u32));
        }
    }
    assert!(boundary_shell(&cube(2, 2), 0).is_empty());
}

#[test]
fn lexicographic_order_in_two_dimensions() {
    assert!(lex_leq(&site(&[0, 1]), &site(&[1, -5])).unwrap());
    assert!(lex_leq(&site(&[1, -5]), &site(&[1, -4])).unwrap());
    assert!(!lex_leq(&site(&[1, 0]), &site(&[0, 9])).unwrap());
    assert!(lex_leq(&site(&[0, 0]), &site(&[0, 0])).unwrap());
    assert!(lex_leq(&site(&[0]), &site(&[0, 0])).is_err());
}

#[test]
fn concatenation_splits_at_the_origin() {
    let sigma = line(&[-1, -1, -1, -1, -1], -2);
    let xi = line(&[1, 1, 1, 1, 1], -2);
    let joined = concat(&sigma, &xi).unwrap();
    assert_eq!(joined.values(), &[-1, -1, -1, 1, 1]);
    assert_eq!(plus_concat(&sigma).values(), &[-1, -1, -1, 1, 1]);
    assert!(concat(&sigma, &line(&[1, 1, 1], 0)).is_err());
}

#[test]
fn restriction_and_translation() {
    let sigma = line(&[1, -1, 1, 1, -1], -2);
    let sub = Volume::interval(-1, 0);
    assert_eq!(sigma.restrict(&sub).unwrap().values(), &[-1, 1]);
    let moved = sigma.translate(&Site::at(3));
    // The shifted configuration reads the original three sites to the right.
    assert_eq!(moved.get(&Site::at(-5)), Some(1));
    assert_eq!(moved.get(&Site::at(-1)), Some(-1));
    assert_eq!(moved.get(&Site::at(0)), None);
    assert!(sigma.restrict(&Volume::interval(2, 3)).is_err());
}

#[test]
fn ising_hamiltonian_of_a_single_site() {
    let phi = Potential::ising(1, 1.0, 0.0);
    let vol = cube(0, 1);
    let omega = line(&[1, 0, 1], -1);
    let plus = Config::constant(vol.clone(), 1);
    let minus = Config::constant(vol.clone(), -1);
    assert_eq!(hamiltonian(&phi, &vol, &plus, &omega).unwrap(), -2.0);
    assert_eq!(hamiltonian(&phi, &vol, &minus, &omega).unwrap(), 2.0);
}

#[test]
fn single_site_kernel_is_logistic() {
    for beta in [0.1, 0.5, 1.3] {
        let spec = GibbsSpecification::new(Potential::ising(1, beta, 0.0)).unwrap();
        let vol = cube(0, 1);
        let omega = line(&[1, 1, 1], -1);
        let k = kernel(&spec, &vol, &omega).unwrap();
        let plus = k.prob(&Config::constant(vol.clone(), 1)).unwrap();
        let expect = 1.0 / (1.0 + (-4.0 * beta).exp());
        assert!((plus - expect).abs() < 1e-14);
    }
}

#[test]
fn ising_boundary_oscillation_counts_crossing_bonds() {
    // Each crossing bond ranges over [-β, β] for a fixed inside spin.
    for d in 1..=2 {
        let beta = 0.7;
        let phi = Potential::ising(d, beta, 0.4);
        for n in 0..=1u32 {
            let vol = cube(n, d);
            let side = 2.0 * n as f64 + 1.0;
            let bonds = 2.0 * d as f64 * side.powi(d as i32 - 1);
            let osc = boundary_oscillation(&phi, &vol).unwrap();
            assert!((osc - 2.0 * beta * bonds).abs() < 1e-12, "d={d} n={n} osc={osc}");
        }
    }
}

#[test]
fn tails_of_nearest_neighbour_ising() {
    let phi = Potential::ising(1, 0.3, 0.2);
    assert!((tail_seminorm(&phi, 0).unwrap() - 0.6).abs() < 1e-12);
    assert_eq!(tail_seminorm(&phi, 1).unwrap(), 0.0);
    assert_eq!(truncation_gap(&phi, 1).unwrap(), 0.0);
    assert!((truncation_gap(&phi, 0).unwrap() - 0.6).abs() < 1e-12);
    assert_eq!(truncate(&phi, 0).terms().len(), 1);
}

#[test]
fn vacuum_transform_of_a_field() {
    // -h σ becomes -h(σ - 1): zero at +, 2h at -.
    let h = 0.35;
    let phi = Potential::ising(1, 0.0, h);
    let vac = vacuum_transform(&phi).unwrap();
    let field = vac
        .terms()
        .iter()
        .find(|t| t.shape().len() == 1)
        .expect("single-site term");
    let minus = vac.alphabet().spin().index_of(-1).unwrap() as u8;
    let plus = vac.alphabet().spin().index_of(1).unwrap() as u8;
    assert_eq!(field.value(&[plus], 2), 0.0);
    assert!((field.value(&[minus], 2) - 2.0 * h).abs() < 1e-15);
}

#[test]
fn vacuum_transform_keeps_kernels() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..8 {
        let phi = random_potential(&mut rng, 1, 2, 1.0);
        let vac = vacuum_transform(&phi).unwrap();
        let a = GibbsSpecification::new(phi.clone()).unwrap();
        let b = GibbsSpecification::new(vac).unwrap();
        let vol = cube(1, 1);
        let omega = Config::from_fn(cube(6, 1), |x| if x.coords()[0] % 3 == 0 { -1 } else { 1 });
        let ka = kernel(&a, &vol, &omega).unwrap();
        let kb = kernel(&b, &vol, &omega).unwrap();
        assert!(max_diff(ka.table().probs(), kb.table().probs()) < 1e-12);
    }
}

#[test]
fn vacuum_terms_vanish_at_plus() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let phi = random_potential(&mut rng, 2, 1, 1.0);
    let vac = vacuum_transform(&phi).unwrap();
    let plus = vac.plus_symbol().unwrap();
    for t in vac.terms() {
        let q = vac.q();
        let k = t.shape().len();
        for idx in 0..q.pow(k as u32) {
            let syms: Vec<u8> = (0..k).map(|j| ((idx / q.pow((k - 1 - j) as u32)) % q) as u8).collect();
            if syms.contains(&plus) {
                assert!(t.value(&syms, q).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn malformed_terms_are_rejected() {
    assert!(Term::from_table(vec![Site::at(0)], 2, vec![0.0; 3]).is_err());
    let dup = Term::from_fn(vec![Site::at(0), Site::at(0)], 2, |_| 0.0);
    assert!(dup.is_err());
    let wrong_dim = Term::from_fn(vec![site(&[0, 0])], 2, |_| 0.0).unwrap();
    assert!(Potential::new(1, LocalAlphabet::Spin(gibbsium::Alphabet::spins()), vec![wrong_dim]).is_err());
}

proptest! {
    #[test]
    fn lex_order_is_total(a in proptest::collection::vec(-3i32..3, 2), b in proptest::collection::vec(-3i32..3, 2)) {
        let (x, y) = (Site::new(a), Site::new(b));
        let xy = lex_leq(&x, &y).unwrap();
        let yx = lex_leq(&y, &x).unwrap();
        prop_assert!(xy || yx);
        prop_assert_eq!(xy && yx, x == y);
    }

    #[test]
    fn hamiltonian_changes_by_at_most_the_boundary_oscillation(
        seed in 0u64..500,
        flips in proptest::collection::vec(any::<bool>(), 14),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_potential(&mut rng, 1, 2, 1.0);
        let vol = cube(1, 1);
        let sigma = Config::constant(vol.clone(), -1);
        let outer = cube(7, 1);
        let a = Config::constant(outer.clone(), 1);
        let b = Config::new(outer, flips.iter().chain([&true]).map(|&f| if f { 1 } else { -1 }).collect()).unwrap();
        let ha = hamiltonian(&phi, &vol, &sigma, &a).unwrap();
        let hb = hamiltonian(&phi, &vol, &sigma, &b).unwrap();
        prop_assert!((ha - hb).abs() <= boundary_oscillation(&phi, &vol).unwrap() + 1e-12);
    }
}
