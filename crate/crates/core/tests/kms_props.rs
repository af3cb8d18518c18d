mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::sample::Index;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{katsura, odometer, random_monomial};
use ssgraph_core::algebra::{expectation, periodicity_unitary, Element, Monomial};
use ssgraph_core::kms::{KmsState, MonomialSampler, TraceKind};
use ssgraph_core::models::fibonacci;
use ssgraph_core::periodicity::{cycline_triples, split, witness_group, PeriodicityParams};
use ssgraph_core::ActionSystem;

const PARAMS: PeriodicityParams = PeriodicityParams {
    box_radius: 2,
    ball_radius: 1,
    tol: 1e-9,
};

fn states(theta: f64) -> Vec<(ActionSystem, KmsState)> {
    let cases = [
        (odometer(&[2, 2]), TraceKind::Character(vec![theta])),
        (odometer(&[2, 3]), TraceKind::Haar),
        (odometer(&[2, 4]), TraceKind::Mixture(vec![(0.25, vec![theta]), (0.75, vec![0.0])])),
        (odometer(&[6, 2, 3]), TraceKind::Haar),
        (katsura(vec![vec![2, 1], vec![1, 2]], vec![vec![1, 1], vec![1, 1]]), TraceKind::Haar),
        (fibonacci(), TraceKind::Haar),
    ];
    cases
        .into_iter()
        .map(|(sys, kind)| {
            let st = KmsState::new(&sys, &PARAMS, kind).unwrap();
            (sys, st)
        })
        .collect()
}

fn random_cycline(sys: &ActionSystem, st: &KmsState, rng: &mut ChaCha8Rng) -> Element {
    let group = witness_group(sys, PARAMS.ball_radius).unwrap();
    let z = st.lattice().members.choose(rng).unwrap();
    let (p, q) = split(z);
    let (mu, g, nu) = cycline_triples(sys, &p, &q, &group).unwrap().choose(rng).unwrap().clone();
    Element::from_monomial(Monomial { mu, g, nu })
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < 1e-9
}

#[test]
fn characters_separate_points() {
    let sys = odometer(&[2, 2]);
    let group = witness_group(&sys, 1).unwrap();
    let a = KmsState::new(&sys, &PARAMS, TraceKind::Character(vec![0.1])).unwrap();
    let b = KmsState::new(&sys, &PARAMS, TraceKind::Character(vec![0.35])).unwrap();
    let z = &a.lattice().basis()[0];
    let (m, n) = split(z);
    let v: Element = periodicity_unitary(&sys, &m, &n, &group).unwrap();
    assert!(!close(a.evaluate(&sys, &v).unwrap(), b.evaluate(&sys, &v).unwrap()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn states_are_positive_and_unital(model in any::<Index>(), seed in any::<u64>(), theta in 0.0f64..1.0) {
        let all = states(theta);
        let (sys, st) = &all[model.index(all.len())];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(close(st.evaluate(sys, &Element::identity(sys)).unwrap(), Complex64::new(1.0, 0.0)));
        let sampler = MonomialSampler::new(sys, 2, 1).unwrap();
        let a = sampler.sample_element(sys, &mut rng, 6).unwrap();
        let v = st.evaluate(sys, &a.adjoint(sys).unwrap().multiply(sys, &a).unwrap()).unwrap();
        prop_assert!(v.re >= -1e-9 && v.im.abs() < 1e-9, "{:?}", v);
    }

    #[test]
    fn state_factors_through_expectation(model in any::<Index>(), seed in any::<u64>(), theta in 0.0f64..1.0) {
        let all = states(theta);
        let (sys, st) = &all[model.index(all.len())];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sampler = MonomialSampler::new(sys, 2, 1).unwrap();
        let a = sampler.sample_element(sys, &mut rng, 6).unwrap();
        let ea = expectation(sys, &a).unwrap();
        prop_assert!(close(st.evaluate(sys, &a).unwrap(), st.evaluate(sys, &ea).unwrap()));
    }

    #[test]
    fn trace_property_on_cycline_products(model in any::<Index>(), seed in any::<u64>(), theta in 0.0f64..1.0) {
        let all = states(theta);
        let (sys, st) = &all[model.index(all.len())];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_cycline(sys, st, &mut rng).multiply(sys, &random_cycline(sys, st, &mut rng)).unwrap();
        let b = random_cycline(sys, st, &mut rng).multiply(sys, &random_cycline(sys, st, &mut rng)).unwrap();
        let ab = st.evaluate(sys, &a.multiply(sys, &b).unwrap()).unwrap();
        let ba = st.evaluate(sys, &b.multiply(sys, &a).unwrap()).unwrap();
        prop_assert!(close(ab, ba), "{:?} vs {:?}", ab, ba);
    }

    #[test]
    fn state_vanishes_off_the_lattice(model in any::<Index>(), seed in any::<u64>(), theta in 0.0f64..1.0) {
        let all = states(theta);
        let (sys, st) = &all[model.index(all.len())];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let r = rng.gen_range(0..=2);
            let m = random_monomial(sys, &mut rng, 2, r);
            if !st.lattice().lattice.contains(&m.degree_difference()) {
                prop_assert_eq!(st.evaluate_monomial(sys, &m).unwrap(), Complex64::new(0.0, 0.0));
            }
        }
    }
}
