use gibbsium::disordered::*;
use gibbsium::potential::{boundary_oscillation, Alphabet};
use gibbsium::{cube, Config, Extended, LocalAlphabet, Potential, ProbTable, Site, Volume};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rfim(dim: usize, beta: f64, h: f64) -> Potential {
    Potential::rfim(dim, beta, h, Alphabet::spins())
}

fn constant(value: i8) -> Config {
    Config::constant(cube(12, 1), value)
}

fn law() -> DisorderLaw {
    DisorderLaw::symmetric_spins()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Unnormalized nearest-neighbour random-field weight on an interval, written out by hand.
fn chain_energy(sigma: &[i8], eta: &[i8], left: i8, right: i8, beta: f64, h: f64) -> f64 {
    let mut e = -beta * (left * sigma[0]) as f64 - beta * (sigma[sigma.len() - 1] * right) as f64;
    for i in 0..sigma.len() {
        e -= h * (eta[i] * sigma[i]) as f64;
        if i + 1 < sigma.len() {
            e -= beta * (sigma[i] * sigma[i + 1]) as f64;
        }
    }
    e
}

fn all_spins(n: usize) -> Vec<Vec<i8>> {
    (0..1usize << n)
        .map(|k| (0..n).map(|i| if k >> (n - 1 - i) & 1 == 1 { 1 } else { -1 }).collect())
        .collect()
}

#[test]
fn disorder_law_validation() {
    assert!(DisorderLaw::new(vec![-1, 1], vec![0.5, 0.6]).is_err());
    assert!(DisorderLaw::new(vec![-1, 1], vec![1.0, 0.0]).is_err());
    assert!(DisorderLaw::new(vec![1, 1], vec![0.5, 0.5]).is_err());
    let skew = DisorderLaw::new(vec![1, -1], vec![0.7, 0.3]).unwrap();
    assert_eq!(skew.prob(1).unwrap(), 0.7);
    assert!(!skew.is_symmetric());
    assert!(law().is_symmetric());
    assert!((law().entropy() - 2f64.ln()).abs() < 1e-15);
}

#[test]
fn quenched_kernel_without_interactions() {
    let vol = cube(1, 1);
    let eta = Config::new(cube(2, 1), vec![1, -1, 1, -1, 1]).unwrap();
    let plus = constant(1);
    let flat = quenched_kernel(&rfim(1, 0.0, 0.0), &vol, &eta, &plus).unwrap();
    assert!(flat.probs().iter().all(|&p| (p - 0.125).abs() < 1e-15));

    let h = 0.4;
    let tilted = quenched_kernel(&rfim(1, 0.0, h), &vol, &eta, &plus).unwrap();
    for i in 0..tilted.len() {
        let sigma = tilted.config(i).unwrap();
        let expect: f64 = vol
            .sites()
            .iter()
            .map(|x| {
                let a = (h * eta.get(x).unwrap() as f64 * sigma.get(x).unwrap() as f64).exp();
                a / (2.0 * h.cosh())
            })
            .product();
        assert!((tilted.probs()[i] - expect).abs() < 1e-14);
    }
}

#[test]
fn quenched_kernel_global_flip() {
    let phi = rfim(1, 0.8, 0.6);
    let vol = cube(2, 1);
    let eta = Config::new(cube(3, 1), vec![1, 1, -1, 1, -1, -1, 1]).unwrap();
    let flipped = Config::new(cube(3, 1), eta.values().iter().map(|v| -v).collect()).unwrap();
    let a = quenched_kernel(&phi, &vol, &eta, &constant(1)).unwrap();
    let b = quenched_kernel(&phi, &vol, &flipped, &constant(-1)).unwrap();
    let n = a.len();
    for i in 0..n {
        assert!((a.probs()[i] - b.probs()[n - 1 - i]).abs() < 1e-14);
    }
}

#[test]
fn joint_table_is_product_without_couplings() {
    let skew = DisorderLaw::new(vec![-1, 1], vec![0.3, 0.7]).unwrap();
    let vol = cube(1, 1);
    let k = joint_table(&rfim(1, 0.0, 0.0), &skew, &vol, &constant(1), &constant(1)).unwrap();
    let site: Vec<f64> = [0.3, 0.7, 0.3, 0.7].iter().map(|p| p * 0.5).collect();
    let product = ProbTable::product(vol, k.table().alphabet().clone(), &site).unwrap();
    assert!(max_diff(k.table().probs(), product.probs()) < 1e-15);
}

#[test]
fn joint_table_marginals() {
    let skew = DisorderLaw::new(vec![-1, 1], vec![0.4, 0.6]).unwrap();
    let phi = rfim(1, 1.0, 0.5);
    let vol = cube(2, 1);
    let k = joint_table(&phi, &skew, &vol, &constant(1), &constant(-1)).unwrap();
    let pd = skew.product_table(&vol).unwrap();
    assert!(max_diff(k.disorder_marginal().unwrap().probs(), pd.probs()) <= 1e-12);
    let eta = Config::new(vol.clone(), vec![1, -1, -1, 1, 1]).unwrap();
    let direct = quenched_kernel(&phi, &vol, &eta.merge(&constant(-1)), &constant(1)).unwrap();
    assert!(max_diff(k.spin_conditional(&eta).unwrap().probs(), direct.probs()) <= 1e-12);
}

#[test]
fn joint_table_matches_hand_enumeration() {
    let (beta, h) = (1.0, 0.5);
    let k = joint_table(&rfim(1, beta, h), &law(), &cube(1, 1), &constant(1), &constant(1)).unwrap();
    let alphabet = k.table().alphabet().clone();
    for eta in all_spins(3) {
        let weights: Vec<f64> = all_spins(3)
            .iter()
            .map(|s| (-chain_energy(s, &eta, 1, 1, beta, h)).exp())
            .collect();
        let z: f64 = weights.iter().sum();
        for (sigma, w) in all_spins(3).iter().zip(&weights) {
            let syms: Vec<u8> = sigma
                .iter()
                .zip(&eta)
                .map(|(&s, &e)| alphabet.encode(s, Some(e)).unwrap())
                .collect();
            let expect = 0.125 * w / z;
            assert!((k.table().probs()[k.table().index(&syms)] - expect).abs() < 1e-15);
        }
    }
}

#[test]
fn delta_h_examples() {
    let h = 0.7;
    let phi = rfim(1, 1.3, h);
    let vol = cube(1, 1);
    let sigma = Config::new(cube(2, 1), vec![1, -1, 1, 1, -1]).unwrap();
    let eta1 = Config::new(vol.clone(), vec![1, 1, -1]).unwrap();
    let eta2 = Config::new(vol.clone(), vec![-1, 1, 1]).unwrap();
    let out_a = constant(1);
    let out_b = constant(-1);
    assert_eq!(delta_h(&phi, &vol, &eta1, &eta1, &out_a, &sigma).unwrap(), 0.0);
    let closed: f64 = vol
        .sites()
        .iter()
        .map(|x| -h * (eta1.get(x).unwrap() - eta2.get(x).unwrap()) as f64 * sigma.get(x).unwrap() as f64)
        .sum();
    let a = delta_h(&phi, &vol, &eta1, &eta2, &out_a, &sigma).unwrap();
    let b = delta_h(&phi, &vol, &eta1, &eta2, &out_b, &sigma).unwrap();
    assert!((a - closed).abs() < 1e-12);
    assert_eq!(a, b);
}

#[test]
fn q_factor_examples() {
    let vol = Volume::new(1, [Site::at(0)]).unwrap();
    let around = cube(1, 1);
    let out = constant(1);
    let plus = Config::new(vol.clone(), vec![1]).unwrap();
    let minus = Config::new(vol.clone(), vec![-1]).unwrap();
    let eta = Config::new(cube(2, 1), vec![1, -1, 1, 1, -1]).unwrap();

    let phi = rfim(1, 0.9, 0.6);
    let mu = quenched_kernel(&phi, &around, &eta, &constant(1)).unwrap();
    assert!((q_factor(&mu, &phi, &vol, &plus, &plus, &out).unwrap() - 1.0).abs() < 1e-15);
    let no_field = rfim(1, 0.9, 0.0);
    let mu0 = quenched_kernel(&no_field, &around, &eta, &constant(1)).unwrap();
    assert!((q_factor(&mu0, &no_field, &vol, &plus, &minus, &out).unwrap() - 1.0).abs() < 1e-15);

    let h = 0.45;
    let single = rfim(1, 0.0, h);
    let eta_minus = eta.merge(&Config::new(vol.clone(), vec![-1]).unwrap());
    let mu = quenched_kernel(&single, &around, &eta_minus, &constant(1)).unwrap();
    let (e1, e2) = (1.0, -1.0);
    let num: f64 = [-1.0f64, 1.0]
        .iter()
        .map(|s| (h * e2 * s).exp() * (-h * (e1 - e2) * s).exp())
        .sum();
    let den: f64 = [-1.0f64, 1.0].iter().map(|s| (h * e2 * s).exp()).sum();
    let q = q_factor(&mu, &single, &vol, &plus, &minus, &out).unwrap();
    assert!((q - num / den).abs() < 1e-14);
}

#[test]
fn annealed_kernel_examples() {
    let skew = DisorderLaw::new(vec![-1, 1], vec![0.2, 0.8]).unwrap();
    let vol = Volume::interval(0, 1);
    let shell = Volume::new(1, [Site::at(-1), Site::at(2)]).unwrap();
    let boundary = JointConfig::new(
        Config::new(shell.clone(), vec![1, -1]).unwrap(),
        Config::new(shell, vec![-1, 1]).unwrap(),
    )
    .unwrap();

    let flat = annealed_kernel(&rfim(1, 0.0, 0.0), &skew, &vol, &boundary).unwrap();
    let site: Vec<f64> = [0.2, 0.8, 0.2, 0.8].iter().map(|p| p * 0.5).collect();
    let product = ProbTable::product(vol.clone(), flat.alphabet().clone(), &site).unwrap();
    assert!(max_diff(flat.probs(), product.probs()) < 1e-15);

    let (beta, h) = (0.8, 0.3);
    let t = annealed_kernel(&rfim(1, beta, h), &skew, &vol, &boundary).unwrap();
    assert!((t.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    let p0 = |e: i8| if e == 1 { 0.8f64 } else { 0.2 };
    let mut weights = Vec::new();
    for sigma in all_spins(2) {
        for eta in all_spins(2) {
            let e = chain_energy(&sigma, &eta, 1, -1, beta, h) - p0(eta[0]).ln() - p0(eta[1]).ln();
            let syms: Vec<u8> = sigma
                .iter()
                .zip(&eta)
                .map(|(&s, &d)| t.alphabet().encode(s, Some(d)).unwrap())
                .collect();
            weights.push((t.index(&syms), (-e).exp()));
        }
    }
    let z: f64 = weights.iter().map(|w| w.1).sum();
    for (i, w) in weights {
        assert!((t.probs()[i] - w / z).abs() < 1e-15);
    }
}

fn sampled_outside(seed: u64) -> JointConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vol = cube(12, 1);
    JointConfig::new(law().sample(&mut rng, &vol), law().sample(&mut rng, &vol)).unwrap()
}

#[test]
fn joint_conditional_without_couplings_is_exact() {
    let phi = rfim(1, 0.0, 0.5);
    let vol = Volume::new(1, [Site::at(0)]).unwrap();
    for seed in 0..3 {
        let xi = sampled_outside(seed);
        let c = joint_conditional(&phi, &law(), &vol, &xi, &constant(1), 2).unwrap();
        assert!((c.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let r = conditional_residual(&phi, &law(), &vol, &xi, &constant(1), 2, 6).unwrap();
        assert!(r <= 1e-12, "residual {r}");
    }
}

#[test]
fn joint_conditional_equals_conditioned_joint_table() {
    let phi = rfim(1, 1.0, 0.5);
    let vol = Volume::new(1, [Site::at(0)]).unwrap();
    let outer = cube(2, 1);
    let xi = sampled_outside(4);
    let k = joint_table(&phi, &law(), &outer, &constant(1), xi.eta()).unwrap();
    let rest = outer.difference(&vol);
    let fixed = xi.restrict(&rest).unwrap().symbols(k.table().alphabet()).unwrap();
    let direct = k.table().conditional_symbols(&vol, &fixed).unwrap();
    let eq = joint_conditional(&phi, &law(), &vol, &xi, &constant(1), 2).unwrap();
    assert!(max_diff(direct.probs(), eq.probs()) <= 1e-12);
    let two = Volume::interval(0, 1);
    let k = joint_table(&phi, &law(), &cube(3, 1), &constant(-1), xi.eta()).unwrap();
    let fixed = xi.restrict(&cube(3, 1).difference(&two)).unwrap().symbols(k.table().alphabet()).unwrap();
    let direct = k.table().conditional_symbols(&two, &fixed).unwrap();
    let eq = joint_conditional(&phi, &law(), &two, &xi, &constant(-1), 3).unwrap();
    assert!(max_diff(direct.probs(), eq.probs()) <= 1e-12);
}

#[test]
fn joint_conditional_residual_shrinks_with_radius() {
    let phi = rfim(1, 1.0, 0.5);
    let vol = Volume::new(1, [Site::at(0)]).unwrap();
    for seed in 10..14 {
        let xi = sampled_outside(seed);
        let r2 = conditional_residual(&phi, &law(), &vol, &xi, &constant(1), 2, 9).unwrap();
        let r5 = conditional_residual(&phi, &law(), &vol, &xi, &constant(1), 5, 9).unwrap();
        assert!(r5 < r2, "seed {seed}: {r5} vs {r2}");
    }
}

#[test]
fn r_plus_minus_examples() {
    let b = cube(1, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let eta = law().sample(&mut rng, &cube(2, 2));
    assert_eq!(r_plus_minus(1.5, 0.0, &b, &eta).unwrap(), (0.5, 0.5));
    let (p, m) = r_plus_minus(0.0, 0.7, &b, &eta).unwrap();
    assert!((p - 0.5).abs() < 1e-15 && (m - 0.5).abs() < 1e-15);
    for _ in 0..20 {
        let eta = law().sample(&mut rng, &cube(2, 2));
        let (p, m) = r_plus_minus(1.5, 0.3, &b, &eta).unwrap();
        assert!(0.0 < p && p < m && m < 1.0);
    }
}

#[test]
fn entropy_bound_examples() {
    let bc = (constant(1), constant(-1), constant(1));
    let free = joint_entropy_bound(&rfim(1, 0.0, 0.5), &law(), SurrogateBox::Common { radius: 3 }, &[1, 2, 3], &bc.0, &bc.1, &bc.2)
        .unwrap();
    assert!(free.iter().all(|r| r.relative_entropy == Extended::Finite(0.0)));
    let same = joint_entropy_bound(&rfim(1, 1.0, 0.5), &law(), SurrogateBox::PerWindow { margin: 0 }, &[1, 2], &bc.0, &bc.0, &bc.2)
        .unwrap();
    assert!(same.iter().all(|r| r.relative_entropy == Extended::Finite(0.0)));
    let rows = joint_entropy_bound(&rfim(1, 1.0, 0.5), &law(), SurrogateBox::PerWindow { margin: 0 }, &[1, 2, 3, 4], &bc.0, &bc.1, &bc.2)
        .unwrap();
    assert!(rows.iter().all(|r| r.holds));
    for w in rows.windows(2) {
        assert!(w[1].per_site().value() < w[0].per_site().value());
    }
}

#[test]
fn sup_log_ratio_examples() {
    let vol = cube(2, 1);
    let w = cube(1, 1);
    let phi = rfim(1, 1.0, 0.5);
    let plus = joint_table(&phi, &law(), &vol, &constant(1), &constant(1)).unwrap();
    let minus = joint_table(&phi, &law(), &vol, &constant(-1), &constant(1)).unwrap();
    assert_eq!(sup_log_ratio(&plus, &plus, &w).unwrap(), 0.0);
    let free = rfim(1, 0.0, 0.5);
    let a = joint_table(&free, &law(), &vol, &constant(1), &constant(1)).unwrap();
    let b = joint_table(&free, &law(), &vol, &constant(-1), &constant(1)).unwrap();
    assert_eq!(sup_log_ratio(&a, &b, &w).unwrap(), 0.0);
    for n in 0..=2 {
        let w = cube(n, 1);
        let r = sup_log_ratio(&plus, &minus, &w).unwrap();
        assert!(r > 0.0 && r <= 4.0 * boundary_oscillation(&phi, &w).unwrap());
    }
}

#[test]
fn decoupling_examples() {
    let vol = cube(4, 1);
    let product = law().product_table(&vol).unwrap();
    let rep = ad_check(&product, 1, 1).unwrap();
    assert_eq!(rep.max_abs_log_ratio, Extended::Finite(0.0));
    let skew = DisorderLaw::new(vec![-1, 1], vec![0.3, 0.7]).unwrap();
    let a = Volume::new(1, [Site::at(0)]).unwrap();
    let b = Volume::new(1, [Site::at(3)]).unwrap();
    let r = ad_ratio(&skew.product_table(&vol).unwrap(), &a, &[1], &b, &[0]).unwrap();
    assert!((r - 1.0).abs() < 1e-14);

    let free = joint_table(&rfim(1, 0.0, 0.5), &law(), &vol, &constant(1), &constant(1)).unwrap();
    let rep = ad_check(free.table(), 1, 1).unwrap();
    assert!(rep.max_abs_log_ratio.value() < 1e-12);

    let phi = rfim(1, 1.0, 0.5);
    let k = joint_table(&phi, &law(), &vol, &constant(1), &constant(1)).unwrap();
    let rep = ad_check(k.table(), 1, 1).unwrap();
    let bound = 8.0 * boundary_oscillation(&phi, &cube(1, 1)).unwrap();
    assert!(rep.max_abs_log_ratio.value() <= bound);
    assert!(rep.events > 0);
}

fn closed_pressure(phi: &Potential) -> PressureEstimate {
    quenched_pressure(phi, &law(), 0, 0, 0).unwrap()
}

#[test]
fn pressure_closed_form_and_support() {
    let h = 0.6;
    let p = closed_pressure(&rfim(2, 0.0, h));
    assert_eq!(p.method, PressureMethod::ClosedForm);
    assert!((p.value - (2.0 * h.cosh()).ln()).abs() < 1e-15);
    assert!(matches!(
        quenched_pressure(&rfim(2, 0.5, h), &law(), 100, 10, 1),
        Err(gibbsium::Error::Unsupported(_))
    ));
    let a = quenched_pressure(&rfim(1, 1.0, 0.5), &law(), 512, 16, 3).unwrap();
    let b = quenched_pressure(&rfim(1, 1.0, 0.5), &law(), 512, 16, 3).unwrap();
    assert_eq!(a, b);
    assert!(a.stderr > 0.0);
}

#[test]
fn line_system_matches_kernel() {
    let phi = rfim(1, 0.9, 0.4);
    let vol = cube(2, 1);
    let eta = Config::new(cube(3, 1), vec![1, -1, -1, 1, 1, -1, 1]).unwrap();
    let mu = quenched_kernel(&phi, &vol, &eta, &Config::new(cube(3, 1), vec![1; 7]).unwrap()).unwrap();
    let sys = LineSystem::new(&phi, -2, 2, Some(&eta), Some(1), Some(1)).unwrap();
    for i in 0..mu.len() {
        let spins: Vec<usize> = mu.symbols(i).iter().map(|&s| s as usize).collect();
        assert!((sys.log_prob(&spins) - mu.probs()[i].ln()).abs() < 1e-12);
    }
    let m = mu.marginal(&Volume::new(1, [Site::at(1)]).unwrap()).unwrap();
    assert!(max_diff(sys.marginal(1), m.probs()) < 1e-13);
    let h: f64 = mu.probs().iter().map(|p| -p * p.ln()).sum();
    assert!((sys.entropy() - h).abs() < 1e-12);
}

#[test]
fn decomposition_without_couplings_is_exact() {
    let phi = rfim(1, 0.0, 0.0);
    let p = closed_pressure(&phi);
    for n in 1..=6 {
        let d = entropy_decomposition_line(&phi, &law(), n, -1, 1, &constant(1), p).unwrap();
        assert!(d.residual.value().abs() <= 1e-12, "n={n}: {:?}", d.residual);
    }
    for n in 1..=2 {
        let vol = cube(n, 1);
        let k = joint_table(&phi, &law(), &vol, &constant(-1), &constant(1)).unwrap();
        let r = joint_table(&phi, &law(), &vol, &constant(1), &constant(1)).unwrap();
        let d = entropy_decomposition(k.table(), &r, &phi, &law(), p).unwrap();
        assert!(d.residual.value().abs() <= 1e-12);
    }
}

#[test]
fn decomposition_sees_a_biased_disorder_marginal() {
    let phi = rfim(1, 0.0, 0.0);
    let vol = cube(1, 1);
    let r = joint_table(&phi, &law(), &vol, &constant(1), &constant(1)).unwrap();
    let site = [0.5 * 0.3, 0.5 * 0.7, 0.5 * 0.3, 0.5 * 0.7];
    let k = ProbTable::product(vol, r.table().alphabet().clone(), &site).unwrap();
    let d = entropy_decomposition(&k, &r, &phi, &law(), closed_pressure(&phi)).unwrap();
    let per_site = 0.3 * (0.3f64 / 0.5).ln() + 0.7 * (0.7f64 / 0.5).ln();
    assert!((d.disorder_relative_entropy.value() - per_site).abs() < 1e-14);
    assert!(d.residual.value().abs() < 1e-12);
}

#[test]
fn line_and_table_decompositions_agree() {
    let phi = rfim(1, 1.0, 0.5);
    let p = PressureEstimate {
        value: 1.0,
        stderr: 0.0,
        samples: 0,
        length: 0,
        method: PressureMethod::ClosedForm,
    };
    for n in 1..=2 {
        let vol = cube(n, 1);
        let k = joint_table(&phi, &law(), &vol, &constant(-1), &constant(1)).unwrap();
        let r = joint_table(&phi, &law(), &vol, &constant(1), &constant(1)).unwrap();
        let a = entropy_decomposition(k.table(), &r, &phi, &law(), p).unwrap();
        let b = entropy_decomposition_line(&phi, &law(), n, -1, 1, &constant(1), p).unwrap();
        assert!((a.relative_entropy.value() - b.relative_entropy.value()).abs() < 1e-12);
        assert!((a.entropy - b.entropy).abs() < 1e-12);
        assert!((a.energy - b.energy).abs() < 1e-12);
        assert!((a.residual.value() - b.residual.value()).abs() < 1e-12);

        let s = joint_specific_energy(&r, &phi, &law(), 1, p).unwrap();
        let t = joint_specific_energy_line(&phi, &law(), n, 1, &constant(1), 1, p).unwrap();
        assert!((s.value.value() - t.value.value()).abs() < 1e-12);
        assert!((s.energy - t.energy).abs() < 1e-15);
    }
}

#[test]
fn decomposition_residual_shrinks() {
    let phi = rfim(1, 1.0, 0.5);
    let p = quenched_pressure(&phi, &law(), 2048, 64, 5).unwrap();
    let r4 = entropy_decomposition_line(&phi, &law(), 4, -1, 1, &constant(1), p).unwrap();
    let r8 = entropy_decomposition_line(&phi, &law(), 8, -1, 1, &constant(1), p).unwrap();
    assert!(r8.residual.value().abs() < r4.residual.value().abs());
}

#[test]
fn specific_energy_examples() {
    let free = rfim(1, 0.0, 0.0);
    let p = closed_pressure(&free);
    for n in 0..=2 {
        let k = joint_table(&free, &law(), &cube(n, 1), &constant(1), &constant(1)).unwrap();
        let s = joint_specific_energy(&k, &free, &law(), 1, p).unwrap();
        assert!((s.value.value() - (2f64.ln() + 2f64.ln())).abs() < 1e-12);
        assert!(s.residual.value().abs() <= 1e-12);
    }
    let phi = rfim(1, 1.0, 0.0);
    let k_plus = joint_table(&phi, &law(), &cube(2, 1), &constant(1), &constant(1)).unwrap();
    let k_minus = joint_table(&phi, &law(), &cube(2, 1), &constant(-1), &constant(1)).unwrap();
    let up = joint_specific_energy(&k_plus, &phi, &law(), 1, p).unwrap();
    let down = joint_specific_energy(&k_minus, &phi, &law(), -1, p).unwrap();
    assert!((up.value.value() - down.value.value()).abs() < 1e-13);

    let phi = rfim(1, 1.0, 0.5);
    let p = quenched_pressure(&phi, &law(), 2048, 64, 5).unwrap();
    let res: Vec<f64> = (2..=6)
        .map(|n| {
            joint_specific_energy_line(&phi, &law(), n, 1, &constant(1), 1, p)
                .unwrap()
                .residual
                .value()
                .abs()
        })
        .collect();
    for w in res.windows(2) {
        assert!(w[1] < w[0], "{res:?}");
    }
}

#[test]
fn joint_configs_roundtrip() {
    let alphabet = LocalAlphabet::Joint {
        spin: Alphabet::spins(),
        disorder: Alphabet::spins(),
    };
    let vol = cube(1, 1);
    let xi = JointConfig::from_symbols(&vol, &alphabet, &[0, 3, 2]).unwrap();
    assert_eq!(xi.sigma().values(), &[-1, 1, 1]);
    assert_eq!(xi.eta().values(), &[-1, 1, -1]);
    assert_eq!(xi.symbols(&alphabet).unwrap(), vec![0, 3, 2]);
    assert!(JointConfig::new(Config::constant(vol, 1), Config::constant(cube(2, 1), 1)).is_err());
}
