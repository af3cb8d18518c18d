//! Small hand-built models: the Fibonacci graph, two actions that break
//! the standing hypotheses on purpose, and a vertex swap that is not an
//! automorphism.

use std::sync::Arc;

use crate::action::{ActionSystem, Caps, GeneratorTable, IntegerRule};
use crate::kgraph::{EdgeIdx, GraphBuilder, KGraph, VertexId};

/// The 1-graph with vertex matrix `[[1,1],[1,0]]`.
pub fn fibonacci_graph() -> KGraph {
    let mut b = GraphBuilder::new(1);
    let v0 = b.add_vertex("v0");
    let v1 = b.add_vertex("v1");
    b.add_edge(1, 0, v0, v0).expect("fresh edge");
    b.add_edge(1, 1, v1, v0).expect("fresh edge");
    b.add_edge(1, 2, v0, v1).expect("fresh edge");
    b.build().expect("Fibonacci graph is a 1-graph")
}

/// The Fibonacci graph with the trivial group.
pub fn fibonacci() -> ActionSystem {
    ActionSystem::from_tables(fibonacci_graph(), Vec::new(), Caps::default())
        .expect("no generators to check")
}

/// `Z` acting trivially on every edge. The restriction is either `0` or
/// the element itself.
#[derive(Debug)]
pub struct TrivialRule {
    pub self_restricting: bool,
}

impl IntegerRule for TrivialRule {
    fn act_edge(&self, _graph: &KGraph, g: i64, e: EdgeIdx) -> (EdgeIdx, i64) {
        (e, if self.self_restricting { g } else { 0 })
    }
}

fn two_loops() -> KGraph {
    let mut b = GraphBuilder::new(1);
    let v = b.add_vertex("v");
    b.add_edge(1, 0, v, v).expect("fresh edge");
    b.add_edge(1, 1, v, v).expect("fresh edge");
    b.build().expect("two loops form a 1-graph")
}

/// `+1` fixes every edge with trivial restriction, so it is not pseudo free.
pub fn trivial_action_fixture() -> ActionSystem {
    ActionSystem::integer(
        two_loops(),
        Arc::new(TrivialRule {
            self_restricting: false,
        }),
        "t",
    )
}

/// `+1` fixes every edge and restricts to itself: pseudo free, but neither
/// locally faithful nor degenerate.
pub fn trivial_extension() -> ActionSystem {
    ActionSystem::integer(
        two_loops(),
        Arc::new(TrivialRule {
            self_restricting: true,
        }),
        "t",
    )
}

/// A generator that swaps the two vertices of the graph with matrix
/// `[[2,1],[1,1]]` while fixing every edge. The Perron vector takes
/// different values at the two vertices, so no genuine automorphism can do
/// this; the action is therefore built unvalidated.
pub fn vertex_swap_counterexample() -> ActionSystem {
    let mut b = GraphBuilder::new(1);
    let v0 = b.add_vertex("v0");
    let v1 = b.add_vertex("v1");
    let mut id = 0;
    for (range, source, count) in [(v0, v0, 2), (v0, v1, 1), (v1, v0, 1), (v1, v1, 1)] {
        for _ in 0..count {
            b.add_edge(1, id, source, range).expect("fresh edge");
            id += 1;
        }
    }
    let graph = b.build().expect("valid 1-graph");
    let table = GeneratorTable {
        name: "swap".to_string(),
        edge_action: graph.edge_indices().map(|e| (e, Vec::new())).collect(),
        vertex_action: Some(vec![VertexId(1), VertexId(0)]),
    };
    ActionSystem::from_tables(graph, vec![table], Caps::default()).expect("tables are bijective")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_counts() {
        let g = fibonacci_graph();
        assert_eq!(g.coordinate_matrix(1), vec![vec![1, 1], vec![1, 0]]);
        assert!(g.strongly_connected());
        let sys = fibonacci();
        assert!(sys.generators().is_empty());
        assert_eq!(sys.generator_closure().unwrap().len(), 0);
    }
}
