//! Katsura models: a 1-graph with `T(v,w)` edges from `w` to `v`, and `Z`
//! acting by `g B(v,w) + m = h T(v,w) + n`, so `g . (v,w,m) = (v,w,n)` and
//! `g|_(v,w,m) = h`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::action::{ActionSystem, IntegerRule};
use crate::kgraph::{EdgeIdx, GraphBuilder, KGraph, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KatsuraSpec {
    t: Vec<Vec<u32>>,
    b: Vec<Vec<i64>>,
}

impl KatsuraSpec {
    pub fn new(t: Vec<Vec<u32>>, b: Vec<Vec<i64>>) -> Result<Self, ModelError> {
        let n = t.len();
        let mut bad = Vec::new();
        if n == 0 {
            bad.push("at least one vertex is required".to_string());
        }
        if t.iter().any(|r| r.len() != n) || b.len() != n || b.iter().any(|r| r.len() != n) {
            bad.push("T and B must be square matrices of the same size".to_string());
            return Err(ModelError::SpecViolation(bad));
        }
        for v in 0..n {
            if t[v][v] < 2 {
                bad.push(format!("T({v},{v}) = {} must be at least 2", t[v][v]));
            }
            if b[v][v] != 1 {
                bad.push(format!("B({v},{v}) = {} must be 1", b[v][v]));
            }
            for w in 0..n {
                if b[v][w].unsigned_abs() > t[v][w] as u64 {
                    bad.push(format!("|B({v},{w})| exceeds T({v},{w})"));
                }
                if (b[v][w] == 0) != (t[v][w] == 0) {
                    bad.push(format!("B({v},{w}) = 0 must hold exactly when T({v},{w}) = 0"));
                }
            }
        }
        if bad.is_empty() {
            Ok(KatsuraSpec { t, b })
        } else {
            Err(ModelError::SpecViolation(bad))
        }
    }

    /// Keeps only the shape checks and `T(v,v) >= 2`, for actions outside the
    /// Katsura class that use the same division rule (e.g. `B(v,v) = 2`).
    pub fn relaxed(t: Vec<Vec<u32>>, b: Vec<Vec<i64>>) -> Result<Self, ModelError> {
        let n = t.len();
        if n == 0 || t.iter().any(|r| r.len() != n) || b.len() != n || b.iter().any(|r| r.len() != n) {
            return Err(ModelError::SpecViolation(vec![
                "T and B must be nonempty square matrices of the same size".to_string(),
            ]));
        }
        let bad: Vec<String> = (0..n)
            .filter(|&v| t[v][v] < 2)
            .map(|v| format!("T({v},{v}) = {} must be at least 2", t[v][v]))
            .collect();
        if bad.is_empty() {
            Ok(KatsuraSpec { t, b })
        } else {
            Err(ModelError::SpecViolation(bad))
        }
    }

    pub fn t(&self) -> &[Vec<u32>] {
        &self.t
    }

    pub fn b(&self) -> &[Vec<i64>] {
        &self.b
    }
}

#[derive(Debug)]
pub struct KatsuraRule {
    t: Vec<Vec<i64>>,
    b: Vec<Vec<i64>>,
    labels: Vec<(usize, usize, u32)>,
    ids: HashMap<(usize, usize, u32), EdgeIdx>,
}

impl IntegerRule for KatsuraRule {
    fn act_edge(&self, _graph: &KGraph, g: i64, e: EdgeIdx) -> (EdgeIdx, i64) {
        let (v, w, m) = self.labels[e.index()];
        let t = self.t[v][w];
        let total = g * self.b[v][w] + m as i64;
        let n = total.rem_euclid(t) as u32;
        (self.ids[&(v, w, n)], total.div_euclid(t))
    }
}

pub fn build_katsura(spec: &KatsuraSpec) -> ActionSystem {
    let n = spec.t.len();
    let mut builder = GraphBuilder::new(1);
    let vs: Vec<VertexId> = (0..n).map(|v| builder.add_vertex(format!("v{v}"))).collect();
    let mut id = 0u32;
    let mut by_id = Vec::new();
    for v in 0..n {
        for w in 0..n {
            for m in 0..spec.t[v][w] {
                builder.add_edge(1, id, vs[w], vs[v]).expect("fresh edge");
                by_id.push((v, w, m));
                id += 1;
            }
        }
    }
    let graph = builder.build().expect("diagonal entries make the graph source and sink free");
    let labels: Vec<(usize, usize, u32)> = graph
        .edge_indices()
        .map(|e| by_id[graph.edge(e).id as usize])
        .collect();
    let ids = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, EdgeIdx(i as u32)))
        .collect();
    let rule = KatsuraRule {
        t: spec.t.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect(),
        b: spec.b.clone(),
        labels,
        ids,
    };
    ActionSystem::integer(graph, Arc::new(rule), "+1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::validate_action;
    use crate::models::{build_odometer, OdometerSpec};

    #[test]
    fn spec_bullets() {
        assert!(matches!(
            KatsuraSpec::new(vec![vec![1]], vec![vec![1]]),
            Err(ModelError::SpecViolation(_))
        ));
        let err = KatsuraSpec::new(vec![vec![2, 1], vec![1, 2]], vec![vec![1, 0], vec![1, 1]]).unwrap_err();
        match err {
            ModelError::SpecViolation(list) => {
                assert!(list.iter().any(|s| s.contains("B(0,1) = 0")), "{list:?}")
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(KatsuraSpec::new(vec![vec![2]], vec![vec![1]]).is_ok());
    }

    #[test]
    fn binary_katsura_matches_binary_odometer() {
        let k = build_katsura(&KatsuraSpec::new(vec![vec![2]], vec![vec![1]]).unwrap());
        let o = build_odometer(&OdometerSpec::new(vec![2]).unwrap());
        assert_eq!(k.generator_tables(), o.generator_tables());
    }

    #[test]
    fn katsura_models_validate() {
        let relaxed = KatsuraSpec::relaxed(vec![vec![3]], vec![vec![2]]).unwrap();
        assert!(validate_action(&build_katsura(&relaxed)).is_valid());
        assert!(KatsuraSpec::new(vec![vec![3]], vec![vec![2]]).is_err());
        for (t, b) in [
            (vec![vec![3]], vec![vec![1]]),
            (vec![vec![2, 1], vec![1, 2]], vec![vec![1, 1], vec![1, 1]]),
            (vec![vec![2, 1], vec![1, 3]], vec![vec![1, -1], vec![1, 1]]),
        ] {
            let sys = build_katsura(&KatsuraSpec::new(t, b).unwrap());
            let report = validate_action(&sys);
            assert!(report.is_valid(), "{report}");
        }
    }
}
