mod common;

use proptest::prelude::*;
use proptest::sample::Index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{acting_systems, random_element, random_path, systems};
use ssgraph_core::action::{check_locally_faithful, check_pseudo_free};
use ssgraph_core::{ActionSystem, Degree, GroupElement, Path};

fn paths_up_to(sys: &ActionSystem, max: u32) -> Vec<Path> {
    Degree::splat(sys.k(), max)
        .below()
        .iter()
        .flat_map(|d| sys.graph().paths_of_degree(d, None, None))
        .collect()
}

fn brute_pseudo_free(sys: &ActionSystem, states: &[GroupElement], paths: &[Path]) -> bool {
    !states.iter().filter(|g| !g.is_identity()).any(|&g| {
        paths
            .iter()
            .any(|mu| sys.act_path(g, mu) == *mu && sys.restrict_path(g, mu).is_identity())
    })
}

fn brute_locally_faithful(sys: &ActionSystem, states: &[GroupElement], paths: &[Path]) -> bool {
    !states.iter().filter(|g| !g.is_identity()).any(|&g| {
        sys.graph().vertices().any(|v| {
            paths
                .iter()
                .filter(|mu| mu.range() == v)
                .all(|mu| sys.act_path(g, mu) == *mu)
        })
    })
}

#[test]
fn hypothesis_checks_match_brute_force() {
    for (name, sys) in acting_systems() {
        let closure = sys.generator_closure().unwrap();
        if closure.len() > 16 {
            continue;
        }
        let paths = paths_up_to(&sys, 3);
        assert_eq!(
            check_pseudo_free(&sys, &closure).holds,
            brute_pseudo_free(&sys, &closure, &paths),
            "{name}: pseudo free"
        );
        assert_eq!(
            check_locally_faithful(&sys, &closure).holds,
            brute_locally_faithful(&sys, &closure, &paths),
            "{name}: locally faithful"
        );
    }
}

#[test]
fn inverses_cancel_on_registry_states() {
    for (name, sys) in acting_systems() {
        for g in sys.ball(3).unwrap() {
            let gi = sys.inverse(g).unwrap();
            assert!(sys.multiply(g, gi).unwrap().is_identity(), "{name}: {g}");
            assert!(sys.multiply(gi, g).unwrap().is_identity(), "{name}: {g}");
        }
    }
}

#[test]
fn equality_is_bisimulation_for_faithful_models() {
    for (name, sys) in systems().into_iter().filter(|(_, s)| !s.generators().is_empty()) {
        let ball = sys.ball(2).unwrap();
        for &a in &ball {
            for &b in &ball {
                let eq = sys.equal(a, b);
                assert_eq!(eq, sys.bisimilar(a, b).unwrap(), "{name}: {a} vs {b}");
                if eq {
                    for e in sys.graph().edge_indices() {
                        assert_eq!(sys.act_edge(a, e), sys.act_edge(b, e));
                        assert!(sys.equal(sys.restrict_edge(a, e), sys.restrict_edge(b, e)));
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn action_respects_composition(model in any::<Index>(), seed in any::<u64>()) {
        let all = acting_systems();
        let (_, sys) = &all[model.index(all.len())];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = sys.graph();
        let mu = random_path(sys, &mut rng, 2, None);
        let nu = random_path(sys, &mut rng, 2, Some(mu.source()));
        let h = random_element(sys, &mut rng, 3);
        let mn = g.compose(&mu, &nu).unwrap();
        let h_mu = sys.restrict_path(h, &mu);
        prop_assert_eq!(
            sys.act_path(h, &mn),
            g.compose(&sys.act_path(h, &mu), &sys.act_path(h_mu, &nu)).unwrap()
        );
        prop_assert_eq!(sys.restrict_path(h, &mn), sys.restrict_path(h_mu, &nu));
        let image = sys.act_path(h, &mu);
        prop_assert_eq!(image.degree(), mu.degree());
        prop_assert_eq!(image.source(), sys.act_vertex(h_mu, mu.source()));
    }

    #[test]
    fn multiplication_is_associative(model in any::<Index>(), seed in any::<u64>()) {
        let all = acting_systems();
        let (_, sys) = &all[model.index(all.len())];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_element(sys, &mut rng, 2);
        let b = random_element(sys, &mut rng, 2);
        let c = random_element(sys, &mut rng, 2);
        let left = sys.multiply(sys.multiply(a, b).unwrap(), c).unwrap();
        let right = sys.multiply(a, sys.multiply(b, c).unwrap()).unwrap();
        prop_assert!(sys.equal(left, right));
        let mu = random_path(sys, &mut rng, 2, None);
        let ab = sys.multiply(a, b).unwrap();
        prop_assert_eq!(sys.act_path(ab, &mu), sys.act_path(a, &sys.act_path(b, &mu)));
    }
}
