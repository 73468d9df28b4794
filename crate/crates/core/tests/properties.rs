use pgfmetric::metrics::singularity_free_coefficients;
use pgfmetric::numeric::horner;
use pgfmetric::reshuffle::collision_operator;
use pgfmetric::transport::Coupling;
use pgfmetric::*;
use proptest::prelude::*;

fn dist_strategy(max_k: usize) -> impl Strategy<Value = DiscreteDist> {
    prop::collection::vec(0.0f64..1.0, 1..=max_k + 1).prop_filter_map("all-zero weights", |w| {
        let total: f64 = w.iter().sum();
        (total > 1e-3).then(|| DiscreteDist::new(w.iter().map(|x| x / total).collect()).unwrap())
    })
}

fn equal_mean_pair(max_k: usize) -> impl Strategy<Value = (DiscreteDist, DiscreteDist)> {
    (2..=max_k, any::<u64>()).prop_map(|(k, seed)| {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        random_equal_mean_pair(k, &mut rng).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pgf_is_non_decreasing(f in dist_strategy(30)) {
        let mut last = f.pgf(0.0).unwrap();
        for i in 1..=200 {
            let v = f.pgf(i as f64 / 200.0).unwrap();
            prop_assert!(v >= last - 1e-15);
            last = v;
        }
        prop_assert!((last - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_is_monotone_and_ends_at_one(f in dist_strategy(40)) {
        let c = f.cdf();
        prop_assert!(c.values().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((c.values().last().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn moment_summation_is_stable(f in dist_strategy(60), r in 0.0f64..4.0) {
        let forward = f.moment(r);
        let compensated = f.moment_compensated(r);
        prop_assert!((forward - compensated).abs() < 1e-10 * compensated.max(1.0));
    }

    #[test]
    fn toscani_is_symmetric(f in dist_strategy(20), g in dist_strategy(20)) {
        let a = toscani_distance(&f, &g, Order::One);
        let b = toscani_distance(&g, &f, Order::One);
        prop_assert_eq!(a.value, b.value);
    }

    #[test]
    fn toscani_two_is_symmetric((f, g) in equal_mean_pair(20)) {
        prop_assert_eq!(toscani_distance(&f, &g, Order::Two).value, toscani_distance(&g, &f, Order::Two).value);
    }

    #[test]
    fn toscani_identity_of_indiscernibles(f in dist_strategy(20), g in dist_strategy(20)) {
        prop_assert_eq!(toscani_distance(&f, &f, Order::One).value, 0.0);
        let len = f.probs().len().max(g.probs().len());
        let differ = (0..len).any(|n| (f.get(n) - g.get(n)).abs() > 1e-12);
        if differ {
            prop_assert!(toscani_distance(&f, &g, Order::One).value > 0.0);
        }
    }

    #[test]
    fn toscani_triangle_inequality(f in dist_strategy(15), g in dist_strategy(15), h in dist_strategy(15)) {
        let d = |a: &DiscreteDist, b: &DiscreteDist| toscani_distance(a, b, Order::One).value;
        prop_assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h) + 1e-9);
    }

    #[test]
    fn singularity_free_form_matches_quotient(
        f in dist_strategy(25),
        g in dist_strategy(25),
        z in 0.1f64..0.9,
    ) {
        let diff = f.pgf(z).unwrap() - g.pgf(z).unwrap();
        let coeffs = singularity_free_coefficients(&f, &g, Order::One).unwrap();
        prop_assert!((diff.abs() / (1.0 - z) - horner(&coeffs, z).abs()).abs() < 1e-10);
    }

    #[test]
    fn singularity_free_form_matches_quotient_order_two((f, g) in equal_mean_pair(25), z in 0.1f64..0.9) {
        let diff = f.pgf(z).unwrap() - g.pgf(z).unwrap();
        let coeffs = singularity_free_coefficients(&f, &g, Order::Two).unwrap();
        prop_assert!((diff.abs() / (1.0 - z).powi(2) - horner(&coeffs, z).abs()).abs() < 1e-10);
    }

    #[test]
    fn profile_never_exceeds_supremum(f in dist_strategy(20), g in dist_strategy(20)) {
        let sup = toscani_distance(&f, &g, Order::One).value;
        for (_, r) in toscani_profile(&f, &g, Order::One, 97).unwrap() {
            prop_assert!(r <= sup + 1e-12);
        }
    }

    #[test]
    fn ell_norm_homogeneity(a in prop::collection::vec(-5.0f64..5.0, 1..40), c in -3.0f64..3.0) {
        let scaled: Vec<f64> = a.iter().map(|x| c * x).collect();
        let lhs = ell_norm(&scaled).unwrap();
        let rhs = c.abs() * ell_norm(&a).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0));
    }

    #[test]
    fn ell_norm_triangle(
        (a, b) in (1usize..40).prop_flat_map(|n| (
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(-5.0f64..5.0, n),
        ))
    ) {
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        prop_assert!(ell_norm(&sum).unwrap() <= ell_norm(&a).unwrap() + ell_norm(&b).unwrap() + 1e-9);
    }

    #[test]
    fn wasserstein_metric_axioms(f in dist_strategy(15), g in dist_strategy(15), h in dist_strategy(15)) {
        for p in [1.0, 2.0] {
            let w = |a: &DiscreteDist, b: &DiscreteDist| wasserstein_p(a, b, p);
            prop_assert!((w(&f, &g) - w(&g, &f)).abs() < 1e-12);
            prop_assert_eq!(w(&f, &f), 0.0);
            prop_assert!(w(&f, &h) <= w(&f, &g) + w(&g, &h) + 1e-9);
        }
    }

    #[test]
    fn w1_formulas_agree(f in dist_strategy(40), g in dist_strategy(40)) {
        prop_assert!((wasserstein_p(&f, &g, 1.0) - wasserstein1_cdf(&f, &g)).abs() < 1e-12);
    }

    #[test]
    fn w1_below_w2(f in dist_strategy(30), g in dist_strategy(30)) {
        prop_assert!(wasserstein_p(&f, &g, 1.0) <= wasserstein_p(&f, &g, 2.0) + 1e-10);
    }

    #[test]
    fn monotone_plan_marginals(f in dist_strategy(30), g in dist_strategy(30)) {
        let c: Coupling = monotone_coupling(&f, &g);
        prop_assert!(c.marginal_error(&f, &g) < 1e-10);
    }

    #[test]
    fn collision_conserves_mass_and_mean(p in dist_strategy(25)) {
        let q = collision_operator(&p);
        let mass: f64 = q.iter().sum();
        let mean: f64 = q.iter().enumerate().map(|(n, v)| n as f64 * v).sum();
        prop_assert!(mass.abs() < 1e-12);
        prop_assert!(mean.abs() < 1e-10);
    }

    #[test]
    fn part1_part2_hold((f, g) in equal_mean_pair(25)) {
        prop_assert!(check_part1(&f, &g).satisfied);
        prop_assert!(check_part2(&f, &g).unwrap().satisfied);
    }
}
