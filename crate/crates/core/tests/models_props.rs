mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{as_automaton, random_element, random_path};
use ssgraph_core::models::{
    box_points, build_odometer, expected_odometer_per, gamma_bijection, OdometerSpec,
};
use ssgraph_core::periodicity::{is_cycline, periodicity_group, split, PeriodicityParams};

fn radius(r: u32, l: usize) -> PeriodicityParams {
    PeriodicityParams {
        box_radius: r,
        ball_radius: l,
        tol: 1e-9,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn odometer_lattice_matches_prime_exponents(n in prop::collection::vec(2u32..=8, 1..=3)) {
        let spec = OdometerSpec::new(n).unwrap();
        let sys = build_odometer(&spec);
        let lat = periodicity_group(&sys, &radius(2, 0)).unwrap();
        prop_assert_eq!(&lat.lattice, &expected_odometer_per(&spec, 2));
        let with_group = periodicity_group(&sys, &radius(2, 2)).unwrap();
        prop_assert_eq!(&with_group.lattice, &lat.lattice);
    }

    #[test]
    fn value_preserving_pairs_are_cycline(n in prop::collection::vec(2u32..=6, 2..=3), seed in any::<u64>()) {
        let spec = OdometerSpec::new(n).unwrap();
        let sys = build_odometer(&spec);
        let g = sys.graph();
        let balanced: Vec<Vec<i64>> = box_points(spec.k(), 2)
            .filter(|z| {
                let (p, q) = split(z);
                spec.power(&p) == spec.power(&q)
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = &balanced[rand::Rng::gen_range(&mut rng, 0..balanced.len())];
        let (p, q) = split(z);
        for (mu, nu) in gamma_bijection(&spec, g, &p, &q).unwrap() {
            prop_assert!(is_cycline(&sys, &mu, sys.identity(), &nu).unwrap().verdict);
        }
    }

    #[test]
    fn integer_and_automaton_odometers_agree(n in prop::collection::vec(2u32..=5, 1..=3), seed in any::<u64>()) {
        let sys = build_odometer(&OdometerSpec::new(n).unwrap());
        let auto = as_automaton(&sys);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_element(&sys, &mut rng, 3);
        let b = random_element(&sys, &mut rng, 3);
        let wa = auto.element_from_word(&sys.word_of(a)).unwrap();
        let wb = auto.element_from_word(&sys.word_of(b)).unwrap();
        prop_assert_eq!(a == b, auto.equal(wa, wb));
        let mu = random_path(&sys, &mut rng, 3, None);
        prop_assert_eq!(sys.act_path(a, &mu), auto.act_path(wa, &mu));
        prop_assert_eq!(
            sys.word_of(sys.restrict_path(a, &mu)),
            auto.word_of(auto.restrict_path(wa, &mu))
        );
    }
}
