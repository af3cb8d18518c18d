//! Built-in example models and exact arithmetic oracles for them.

mod fixtures;
mod katsura;
mod odometer;

use std::collections::{HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

pub use fixtures::{
    fibonacci, fibonacci_graph, trivial_action_fixture, trivial_extension,
    vertex_swap_counterexample, TrivialRule,
};
pub use katsura::{build_katsura, KatsuraRule, KatsuraSpec};
pub use odometer::{
    box_points, build_odometer, expected_odometer_per, gamma_bijection, odometer_commute,
    path_value, ColorWord, OdometerRule, OdometerSpec,
};

use crate::action::{ActionError, ActionSystem, GroupElement};
use crate::kgraph::VertexId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("model parameters violate: {}", .0.join("; "))]
    SpecViolation(Vec<String>),
    #[error("{0}")]
    DomainError(String),
    #[error("n^p differs from n^q")]
    NotBalanced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DegenerateVerdict {
    Yes,
    No,
    Unknown,
}

/// For every state `g` of the generator closure and every vertex `v`, looks
/// for a path `mu` in `v Lambda` with at most `depth_cap` edges and
/// `g|_mu = 1`. `No` means the search space was exhausted for some pair.
pub fn check_degenerate_property(
    sys: &ActionSystem,
    depth_cap: usize,
) -> Result<DegenerateVerdict, ActionError> {
    let g = sys.graph();
    let mut verdict = DegenerateVerdict::Yes;
    for start in sys.generator_closure()? {
        for v in g.vertices() {
            let mut seen: HashSet<(GroupElement, VertexId)> = HashSet::from([(start, v)]);
            let mut frontier = VecDeque::from([(start, v, 0usize)]);
            let mut found = start.is_identity();
            let mut truncated = false;
            while let Some((h, w, depth)) = frontier.pop_front() {
                if found {
                    break;
                }
                if depth == depth_cap {
                    truncated = true;
                    continue;
                }
                for c in 1..=g.k() {
                    for &e in g.edges_into(w, c) {
                        let r = sys.restrict_edge(h, e);
                        if r.is_identity() {
                            found = true;
                        }
                        let next = (r, g.edge(e).source);
                        if seen.insert(next) {
                            frontier.push_back((next.0, next.1, depth + 1));
                        }
                    }
                }
            }
            if !found {
                if !truncated {
                    return Ok(DegenerateVerdict::No);
                }
                verdict = DegenerateVerdict::Unknown;
            }
        }
    }
    Ok(verdict)
}

/// Which family a built-in model belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Odometer(OdometerSpec),
    Katsura(KatsuraSpec),
    Fibonacci,
}

#[derive(Clone, Debug)]
pub struct BuiltinModel {
    pub name: String,
    pub kind: ModelKind,
    pub system: ActionSystem,
}

/// The example models shipped with the library.
pub fn builtin_models() -> Vec<BuiltinModel> {
    let mut out = Vec::new();
    for n in [vec![2], vec![2, 2], vec![2, 3], vec![2, 4], vec![6, 2, 3]] {
        let spec = OdometerSpec::new(n).expect("valid odometer");
        let name = format!(
            "odometer({})",
            spec.n().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        );
        out.push(BuiltinModel {
            name,
            system: build_odometer(&spec),
            kind: ModelKind::Odometer(spec),
        });
    }
    let katsura = [
        (vec![vec![2]], vec![vec![1]], "katsura([[2]],[[1]])"),
        (vec![vec![3]], vec![vec![1]], "katsura([[3]],[[1]])"),
        (
            vec![vec![2, 1], vec![1, 2]],
            vec![vec![1, 1], vec![1, 1]],
            "katsura([[2,1],[1,2]],[[1,1],[1,1]])",
        ),
    ];
    for (t, b, name) in katsura {
        let spec = KatsuraSpec::new(t, b).expect("valid Katsura data");
        out.push(BuiltinModel {
            name: name.to_string(),
            system: build_katsura(&spec),
            kind: ModelKind::Katsura(spec),
        });
    }
    out.push(BuiltinModel {
        name: "fibonacci".to_string(),
        kind: ModelKind::Fibonacci,
        system: fibonacci(),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometers_and_katsura_are_degenerate() {
        for m in builtin_models() {
            assert_eq!(
                check_degenerate_property(&m.system, 4).unwrap(),
                DegenerateVerdict::Yes,
                "{}",
                m.name
            );
        }
    }

    #[test]
    fn self_restricting_generator_is_not_degenerate() {
        let sys = trivial_extension();
        assert_eq!(check_degenerate_property(&sys, 1).unwrap(), DegenerateVerdict::No);
        assert_eq!(check_degenerate_property(&sys, 50).unwrap(), DegenerateVerdict::No);
    }

    #[test]
    fn zero_cap_is_inconclusive() {
        let sys = build_odometer(&OdometerSpec::new(vec![2]).unwrap());
        assert_eq!(check_degenerate_property(&sys, 0).unwrap(), DegenerateVerdict::Unknown);
    }
}
