//! Canonical automaton states. Every state row is kept minimal under
//! bisimulation, so two handles are equal exactly when the states act
//! identically on all paths.

use std::collections::HashMap;

use super::{free_reduce, ActionError};
use crate::kgraph::{EdgeIdx, VertexId};

#[derive(Clone, Debug)]
pub(crate) struct Row {
    pub vertex: Vec<VertexId>,
    pub image: Vec<EdgeIdx>,
    pub restriction: Vec<u32>,
    pub word: Vec<i32>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Target {
    Known(u32),
    New(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct Candidate {
    pub vertex: Vec<VertexId>,
    pub image: Vec<EdgeIdx>,
    pub restriction: Vec<Target>,
    pub word: Vec<i32>,
}

#[derive(Clone, Debug)]
pub(crate) struct Registry {
    pub rows: Vec<Row>,
    products: HashMap<(u32, u32), u32>,
    inverses: HashMap<u32, u32>,
}

impl Registry {
    pub fn new(vertices: usize, edges: usize) -> Self {
        let identity = Row {
            vertex: (0..vertices as u32).map(VertexId).collect(),
            image: (0..edges as u32).map(EdgeIdx).collect(),
            restriction: vec![0; edges],
            word: Vec::new(),
        };
        let mut inverses = HashMap::new();
        inverses.insert(0, 0);
        Registry {
            rows: vec![identity],
            products: HashMap::new(),
            inverses,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Merges candidate states into the registry by joint partition
    /// refinement with the registry states. Returns the
    /// canonical id of each candidate.
    pub fn absorb(&mut self, cands: &[Candidate], max_states: usize) -> Result<Vec<u32>, ActionError> {
        // Every registry state takes part: a candidate may be bisimilar to a
        // state it cannot reach, e.g. `g g^-1` and the identity.
        let r = self.rows.len();
        let n = r + cands.len();
        let succ = |node: usize, e: usize| -> usize {
            if node < r {
                self.rows[node].restriction[e] as usize
            } else {
                match cands[node - r].restriction[e] {
                    Target::Known(s) => s as usize,
                    Target::New(c) => r + c,
                }
            }
        };
        let label = |node: usize| -> (&[VertexId], &[EdgeIdx]) {
            if node < r {
                let row = &self.rows[node];
                (&row.vertex, &row.image)
            } else {
                let c = &cands[node - r];
                (&c.vertex, &c.image)
            }
        };
        let edges = self.rows[0].image.len();

        let mut class = vec![0usize; n];
        let mut count = {
            let mut ids: HashMap<(&[VertexId], &[EdgeIdx]), usize> = HashMap::new();
            for (node, slot) in class.iter_mut().enumerate() {
                let next = ids.len();
                *slot = *ids.entry(label(node)).or_insert(next);
            }
            ids.len()
        };
        loop {
            let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next_class = vec![0usize; n];
            for (node, slot) in next_class.iter_mut().enumerate() {
                let sig: Vec<usize> = (0..edges).map(|e| class[succ(node, e)]).collect();
                let next = ids.len();
                *slot = *ids.entry((class[node], sig)).or_insert(next);
            }
            let new_count = ids.len();
            class = next_class;
            if new_count == count {
                break;
            }
            count = new_count;
        }

        let mut canonical: Vec<Option<u32>> = vec![None; count];
        for node in 0..r {
            debug_assert!(canonical[class[node]].is_none(), "registry is minimal");
            canonical[class[node]] = Some(node as u32);
        }
        let mut rep: Vec<Option<usize>> = vec![None; count];
        for c in 0..cands.len() {
            let cl = class[r + c];
            if canonical[cl].is_some() {
                continue;
            }
            match rep[cl] {
                Some(best) if cands[best].word.len() <= cands[c].word.len() => {}
                _ => rep[cl] = Some(c),
            }
        }
        let fresh = rep.iter().filter(|x| x.is_some()).count();
        if self.rows.len() + fresh > max_states {
            return Err(ActionError::ClosureExceeded {
                cap: max_states,
                what: "registry states",
            });
        }
        let mut next_id = self.rows.len() as u32;
        for (cl, slot) in canonical.iter_mut().enumerate() {
            if slot.is_none() && rep[cl].is_some() {
                *slot = Some(next_id);
                next_id += 1;
            }
        }
        let mut fresh_rows = Vec::with_capacity(fresh);
        for cl in 0..count {
            if let Some(c) = rep[cl] {
                let cand = &cands[c];
                let restriction = (0..edges)
                    .map(|e| canonical[class[succ(r + c, e)]].expect("every class resolved"))
                    .collect();
                fresh_rows.push(Row {
                    vertex: cand.vertex.clone(),
                    image: cand.image.clone(),
                    restriction,
                    word: cand.word.clone(),
                });
            }
        }
        let ids = (0..cands.len())
            .map(|c| canonical[class[r + c]].expect("every class resolved"))
            .collect();
        self.rows.extend(fresh_rows);
        Ok(ids)
    }

    pub fn product(&mut self, a: u32, b: u32, max_states: usize) -> Result<u32, ActionError> {
        if a == 0 {
            return Ok(b);
        }
        if b == 0 {
            return Ok(a);
        }
        if let Some(&p) = self.products.get(&(a, b)) {
            return Ok(p);
        }
        let mut pairs = vec![(a, b)];
        let mut index: HashMap<(u32, u32), usize> = HashMap::from([((a, b), 0)]);
        let mut cands = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (x, y) = pairs[i];
            let (rx, ry) = (&self.rows[x as usize], &self.rows[y as usize]);
            let vertex = ry.vertex.iter().map(|v| rx.vertex[v.index()]).collect();
            let edges = rx.image.len();
            let mut image = Vec::with_capacity(edges);
            let mut restriction = Vec::with_capacity(edges);
            for e in 0..edges {
                let e1 = ry.image[e];
                image.push(rx.image[e1.index()]);
                let (sx, sy) = (rx.restriction[e1.index()], ry.restriction[e]);
                let t = if sx == 0 {
                    Target::Known(sy)
                } else if sy == 0 {
                    Target::Known(sx)
                } else if let Some(&p) = self.products.get(&(sx, sy)) {
                    Target::Known(p)
                } else {
                    let next = pairs.len();
                    let idx = *index.entry((sx, sy)).or_insert(next);
                    if idx == next {
                        pairs.push((sx, sy));
                    }
                    Target::New(idx)
                };
                restriction.push(t);
            }
            let mut word = rx.word.clone();
            word.extend_from_slice(&ry.word);
            cands.push(Candidate {
                vertex,
                image,
                restriction,
                word: free_reduce(word),
            });
            if pairs.len() > max_states {
                return Err(ActionError::ClosureExceeded {
                    cap: max_states,
                    what: "product states",
                });
            }
            i += 1;
        }
        let ids = self.absorb(&cands, max_states)?;
        for (pair, id) in pairs.into_iter().zip(ids) {
            self.products.insert(pair, id);
        }
        Ok(self.products[&(a, b)])
    }

    pub fn inverse(&mut self, a: u32, max_states: usize) -> Result<u32, ActionError> {
        if let Some(&x) = self.inverses.get(&a) {
            return Ok(x);
        }
        let mut states = vec![a];
        let mut index: HashMap<u32, usize> = HashMap::from([(a, 0)]);
        let mut cands = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let row = &self.rows[states[i] as usize];
            let mut vertex = vec![VertexId(0); row.vertex.len()];
            for (v, w) in row.vertex.iter().enumerate() {
                vertex[w.index()] = VertexId(v as u32);
            }
            let mut image = vec![EdgeIdx(0); row.image.len()];
            for (e, f) in row.image.iter().enumerate() {
                image[f.index()] = EdgeIdx(e as u32);
            }
            let mut restriction = Vec::with_capacity(image.len());
            for pre in &image {
                let s = row.restriction[pre.index()];
                let t = if let Some(&x) = self.inverses.get(&s) {
                    Target::Known(x)
                } else {
                    let next = states.len();
                    let idx = *index.entry(s).or_insert(next);
                    if idx == next {
                        states.push(s);
                    }
                    Target::New(idx)
                };
                restriction.push(t);
            }
            let word = row.word.iter().rev().map(|&l| -l).collect();
            cands.push(Candidate {
                vertex,
                image,
                restriction,
                word,
            });
            if states.len() > max_states {
                return Err(ActionError::ClosureExceeded {
                    cap: max_states,
                    what: "inverse states",
                });
            }
            i += 1;
        }
        let ids = self.absorb(&cands, max_states)?;
        for (s, id) in states.into_iter().zip(ids) {
            self.inverses.insert(s, id);
            self.inverses.insert(id, s);
        }
        Ok(self.inverses[&a])
    }
}
