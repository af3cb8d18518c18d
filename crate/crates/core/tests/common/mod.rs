#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use ssgraph_core::algebra::Monomial;
use ssgraph_core::models::{
    build_katsura, build_odometer, builtin_models, trivial_action_fixture, trivial_extension, KatsuraSpec,
    OdometerSpec,
};
use ssgraph_core::{ActionSystem, Caps, Degree, GroupElement, Path, VertexId};

pub fn odometer(n: &[u32]) -> ActionSystem {
    build_odometer(&OdometerSpec::new(n.to_vec()).unwrap())
}

pub fn katsura(t: Vec<Vec<u32>>, b: Vec<Vec<i64>>) -> ActionSystem {
    build_katsura(&KatsuraSpec::new(t, b).unwrap())
}

/// Rebuilds an integer-backed system from its generator tables, so group
/// elements live in the automaton registry.
pub fn as_automaton(sys: &ActionSystem) -> ActionSystem {
    ActionSystem::from_tables(sys.graph().clone(), sys.generator_tables(), Caps::default()).unwrap()
}

/// Built-in models plus registry-backed copies of two of them.
pub fn systems() -> Vec<(String, ActionSystem)> {
    let mut out: Vec<(String, ActionSystem)> =
        builtin_models().into_iter().map(|m| (m.name, m.system)).collect();
    out.push(("automaton odometer(2,3)".into(), as_automaton(&odometer(&[2, 3]))));
    out.push((
        "automaton katsura".into(),
        as_automaton(&katsura(vec![vec![2, 1], vec![1, 2]], vec![vec![1, 1], vec![1, 1]])),
    ));
    out
}

/// Systems with a nontrivial group, including the two negative fixtures.
pub fn acting_systems() -> Vec<(String, ActionSystem)> {
    let mut out: Vec<_> = systems()
        .into_iter()
        .filter(|(_, s)| !s.generators().is_empty())
        .collect();
    out.push(("trivial action".into(), trivial_action_fixture()));
    out.push(("trivial extension".into(), trivial_extension()));
    out
}

pub fn random_degree<R: Rng>(rng: &mut R, k: usize, max: u32) -> Degree {
    Degree::new((0..k).map(|_| rng.gen_range(0..=max)).collect())
}

/// A uniformly chosen path of degree `d`, with range `range` when given.
pub fn random_path_of<R: Rng>(sys: &ActionSystem, rng: &mut R, d: &Degree, range: Option<VertexId>) -> Option<Path> {
    sys.graph().paths_of_degree(d, range, None).choose(rng).cloned()
}

pub fn random_path<R: Rng>(sys: &ActionSystem, rng: &mut R, max: u32, range: Option<VertexId>) -> Path {
    loop {
        let d = random_degree(rng, sys.k(), max);
        if let Some(p) = random_path_of(sys, rng, &d, range) {
            return p;
        }
    }
}

pub fn random_element<R: Rng>(sys: &ActionSystem, rng: &mut R, radius: usize) -> GroupElement {
    *sys.ball(radius).unwrap().choose(rng).unwrap()
}

/// A random valid monomial with path degrees at most `max` in each color.
pub fn random_monomial<R: Rng>(sys: &ActionSystem, rng: &mut R, max: u32, radius: usize) -> Monomial {
    let mu = random_path(sys, rng, max, None);
    let g = random_element(sys, rng, radius);
    let w = sys.act_vertex(sys.inverse(g).unwrap(), mu.source());
    loop {
        let d = random_degree(rng, sys.k(), max);
        let candidates: Vec<Path> = sys
            .graph()
            .paths_of_degree(&d, None, None)
            .into_iter()
            .filter(|p| p.source() == w)
            .collect();
        if let Some(nu) = candidates.choose(rng) {
            return Monomial::new(sys, mu, g, nu.clone()).unwrap();
        }
    }
}
