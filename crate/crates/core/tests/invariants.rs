use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use percolab::degrees::{DegreeSequence, Pmf};
use percolab::dynamics::{alpha, s2_infinity};
use percolab::exact::{janson_size_law, percolated_cm_size_law};
use percolab::experiment::estimate_exponent;
use percolab::exploration::{components_from_trace, explore_with, RngChooser, rewritten_process_check, validate_boundaries};
use percolab::generators::configuration_model;
use percolab::limit::{excursions, reflect, LimitPath};
use percolab::ordered::ord;
use percolab::percolation::{percolate, theta_survival, ua_pi_c, THETA_TOL};
use percolab::{IsolatedVertices, Rational};

fn even_degrees(min_deg: usize, max_len: usize, max_deg: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(min_deg..=max_deg, 1..=max_len).prop_map(|mut d| {
        if d.iter().sum::<usize>() % 2 == 1 {
            d[0] += 1;
        }
        d
    })
}

proptest! {
    #[test]
    fn cm_realizes_degrees(d in even_degrees(1, 40, 6), seed: u64) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = configuration_model(&DegreeSequence::new(d.clone()).unwrap(), &mut r).unwrap();
        prop_assert_eq!(g.degrees(), d);
    }

    #[test]
    fn percolation_is_a_subgraph(d in even_degrees(1, 30, 5), pi in 0.0f64..=1.0, seed: u64) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = configuration_model(&DegreeSequence::new(d).unwrap(), &mut r).unwrap();
        let h = percolate(&g, pi, &mut r).unwrap();
        prop_assert_eq!(h.vertex_count(), g.vertex_count());
        prop_assert!(g.degrees().iter().zip(h.degrees()).all(|(a, b)| b <= *a));
        prop_assert_eq!(percolate(&g, 1.0, &mut r).unwrap().edge_count(), g.edge_count());
        prop_assert_eq!(percolate(&g, 0.0, &mut r).unwrap().edge_count(), 0);
    }

    #[test]
    fn components_partition_vertices(d in even_degrees(1, 30, 4), seed: u64) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = configuration_model(&DegreeSequence::new(d).unwrap(), &mut r).unwrap();
        let dec = g.components_with(IsolatedVertices::Include);
        prop_assert_eq!(dec.sizes().iter().sum::<usize>(), g.vertex_count());
        let surplus: usize = dec.size_surplus_pairs().iter().map(|p| p.1).sum();
        prop_assert_eq!(surplus + g.vertex_count(), g.edge_count() + dec.len());
        prop_assert!(dec.sizes().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn trace_agrees_with_union_find(d in even_degrees(0, 12, 5), seed: u64) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (trace, g) = explore_with(&d, &mut RngChooser(&mut r)).unwrap();
        prop_assert!(validate_boundaries(&trace).is_ok());
        let mut a = components_from_trace(&trace).unwrap();
        let mut b = g.components_with(IsolatedVertices::Exclude).size_surplus_pairs();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        prop_assert!(rewritten_process_check(&trace, &d));
    }

    #[test]
    fn reflection_and_excursions(steps in prop::collection::vec(-1.0f64..1.0, 1..300), tol in 0.0f64..0.3) {
        let mut v = vec![0.0];
        for s in steps {
            let x = v.last().unwrap() + s;
            v.push(x);
        }
        let p = LimitPath::new(0.01, v).unwrap();
        let refl = reflect(&p);
        prop_assert!(refl.values().iter().all(|&x| x >= 0.0));
        prop_assert_eq!(refl.values()[0], 0.0);
        let set = excursions(&p, tol).unwrap();
        let mut spans: Vec<(usize, usize)> = set.excursions().iter().map(|e| (e.start_index, e.end_index)).collect();
        spans.sort_unstable();
        prop_assert!(spans.windows(2).all(|w| w[0].1 <= w[1].0));
        for &(l, r) in &spans {
            prop_assert!(refl.values()[l] <= tol);
            prop_assert!(refl.values()[l + 1..r].iter().all(|&x| x > tol));
        }
        let total: f64 = set.lengths().iter().sum();
        prop_assert!(total <= p.horizon() + 1e-9);
        prop_assert!(set.excursions().windows(2).all(|w| w[0].length >= w[1].length));
    }

    #[test]
    fn ord_is_canonical_and_order_free(mut z in prop::collection::vec((0u32..20, 0u64..4), 0..20)) {
        let pairs = |z: &[(u32, u64)]| z.iter().map(|&(x, y)| (f64::from(x), if x == 0 { 0 } else { y })).collect::<Vec<_>>();
        let a = ord(pairs(&z));
        prop_assert!(a.is_canonical());
        z.reverse();
        prop_assert_eq!(a, ord(pairs(&z)));
    }

    #[test]
    fn survival_is_monotone(p in prop::collection::vec(0.0f64..1.0, 2..8), pi in 0.0f64..0.95) {
        prop_assume!(p.iter().sum::<f64>() > 0.1);
        let total: f64 = p.iter().sum();
        let pmf = Pmf::new(p.iter().map(|x| x / total).collect()).unwrap();
        let lo: f64 = theta_survival(&pmf, pi, THETA_TOL).unwrap();
        let hi: f64 = theta_survival(&pmf, pi + 0.05, THETA_TOL).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi + 1e-9 >= lo);
    }

    #[test]
    fn growth_closed_forms(pi in 0.0f64..0.146) {
        let a = alpha(pi).unwrap();
        prop_assert!((0.0..=0.5).contains(&a));
        prop_assert!(s2_infinity(pi).unwrap() >= 1.0);
        prop_assert!(alpha(ua_pi_c::<f64>() + 1e-9).is_err());
    }

    #[test]
    fn exponent_fit_is_exact_on_power_laws(slope in -1.0f64..1.0, c in 0.1f64..10.0) {
        let pts: Vec<(usize, f64)> = (8..14).map(|k| (1usize << k, c * ((1usize << k) as f64).powf(slope))).collect();
        let e = estimate_exponent(&pts).unwrap();
        prop_assert!((e.slope - slope).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exact_laws_are_probabilities(d in even_degrees(0, 4, 3), num in 0i128..=4) {
        let pi = Rational::new(num, 4);
        let law = percolated_cm_size_law(&d, &pi);
        prop_assert_eq!(law.values().sum::<Rational>(), Rational::from_integer(1));
        let q = (num as f64 / 4.0).sqrt();
        let jl = janson_size_law(&d, &q);
        prop_assert!((jl.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
