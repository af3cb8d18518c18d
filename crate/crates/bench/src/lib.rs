//! Fixtures shared by the benchmarks.

use ssgraph_core::kms::MonomialSampler;
use ssgraph_core::models::{build_katsura, build_odometer, KatsuraSpec, OdometerSpec};
use num_complex::Complex64;
use ssgraph_core::algebra::Element;
use ssgraph_core::{ActionSystem, Caps};

pub fn odometer(n: &[u32]) -> ActionSystem {
    build_odometer(&OdometerSpec::new(n.to_vec()).expect("valid radices"))
}

pub fn katsura_2x2() -> ActionSystem {
    build_katsura(
        &KatsuraSpec::new(vec![vec![2, 1], vec![1, 2]], vec![vec![1, 1], vec![1, 1]]).expect("valid matrices"),
    )
}

/// The same action rebuilt from its generator tables, so every group
/// operation goes through the state registry.
pub fn as_automaton(sys: &ActionSystem) -> ActionSystem {
    ActionSystem::from_tables(sys.graph().clone(), sys.generator_tables(), Caps::default())
        .expect("built-in tables are finite state")
}

/// Sum of every monomial with degrees at most `max_degree` per color and
/// group part in the ball of radius `ball`.
pub fn dense_element(sys: &ActionSystem, max_degree: u32, ball: usize) -> Element {
    let sampler = MonomialSampler::new(sys, max_degree, ball).expect("ball fits");
    let mut out = Element::zero();
    for m in sampler.all(sys).expect("ball fits") {
        out.add_term(m, Complex64::new(1.0, 0.0));
    }
    out
}
