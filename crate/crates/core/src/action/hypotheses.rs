use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::{ActionSystem, GroupElement};
use crate::kgraph::{EdgeIdx, VertexId};

/// A path fixed by a nontrivial element whose restriction along the path
/// is the identity. `edges` lists the path from its range end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixingWitness {
    pub element: GroupElement,
    pub vertex: VertexId,
    pub edges: Vec<EdgeIdx>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PseudoFreeCheck {
    pub holds: bool,
    pub witness: Option<FixingWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaithfulnessCheck {
    pub holds: bool,
    /// A nontrivial element fixing every path with range `vertex`.
    pub witness: Option<(GroupElement, VertexId)>,
}

/// Searches the fixing graph: arcs `(g, r(e)) -> (g|_e, s(e))` whenever
/// `g . e = e`. Pseudo-freeness fails iff some `g != 1` reaches the identity.
pub fn check_pseudo_free(sys: &ActionSystem, states: &[GroupElement]) -> PseudoFreeCheck {
    let g = sys.graph();
    for &start in states {
        if start.is_identity() {
            continue;
        }
        for v in g.vertices() {
            let mut parent: HashMap<(GroupElement, VertexId), Option<((GroupElement, VertexId), EdgeIdx)>> =
                HashMap::from([((start, v), None)]);
            let mut queue = VecDeque::from([(start, v)]);
            while let Some((h, w)) = queue.pop_front() {
                for c in 1..=g.k() {
                    for &e in g.edges_into(w, c) {
                        let (f, r) = sys.act_restrict_edge(h, e);
                        if f != e {
                            continue;
                        }
                        let next = (r, g.edge(e).source);
                        if parent.contains_key(&next) {
                            continue;
                        }
                        parent.insert(next, Some(((h, w), e)));
                        if r.is_identity() {
                            let mut edges = Vec::new();
                            let mut cur = next;
                            while let Some(Some((prev, e))) = parent.get(&cur) {
                                edges.push(*e);
                                cur = *prev;
                            }
                            edges.reverse();
                            return PseudoFreeCheck {
                                holds: false,
                                witness: Some(FixingWitness {
                                    element: start,
                                    vertex: v,
                                    edges,
                                }),
                            };
                        }
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    PseudoFreeCheck {
        holds: true,
        witness: None,
    }
}

/// Greatest fixpoint over pairs `(g, v)`: a pair survives iff every edge
/// with range `v` is fixed by `g` and leads to a surviving pair.
pub fn check_locally_faithful(sys: &ActionSystem, states: &[GroupElement]) -> FaithfulnessCheck {
    let g = sys.graph();
    let mut index: HashMap<(GroupElement, VertexId), usize> = HashMap::new();
    let mut nodes: Vec<(GroupElement, VertexId)> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut alive: Vec<bool> = Vec::new();
    let mut queue = VecDeque::new();
    for &s in states {
        for v in g.vertices() {
            if index.insert((s, v), nodes.len()).is_none() {
                nodes.push((s, v));
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    succ.resize(nodes.len(), Vec::new());
    alive.resize(nodes.len(), true);
    while let Some(i) = queue.pop_front() {
        let (h, w) = nodes[i];
        let mut out = Vec::new();
        let mut ok = true;
        'edges: for c in 1..=g.k() {
            for &e in g.edges_into(w, c) {
                let (f, r) = sys.act_restrict_edge(h, e);
                if f != e {
                    ok = false;
                    break 'edges;
                }
                let key = (r, g.edge(e).source);
                let j = match index.get(&key) {
                    Some(&j) => j,
                    None => {
                        let j = nodes.len();
                        index.insert(key, j);
                        nodes.push(key);
                        succ.push(Vec::new());
                        alive.push(true);
                        queue.push_back(j);
                        j
                    }
                };
                out.push(j);
            }
        }
        alive[i] = ok;
        succ[i] = out;
    }
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..nodes.len() {
            if alive[i] && succ[i].iter().any(|&j| !alive[j]) {
                alive[i] = false;
                changed = true;
            }
        }
    }
    let witness = nodes
        .iter()
        .zip(&alive)
        .filter(|((h, _), &a)| a && !h.is_identity())
        .map(|(&n, _)| n)
        .min();
    FaithfulnessCheck {
        holds: witness.is_none(),
        witness,
    }
}
