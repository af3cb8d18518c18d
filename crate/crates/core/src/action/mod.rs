//! Self-similar actions of a group on a k-graph.
//!
//! Group elements are handles. Two backends exist: closed-form integer rules
//! (the group is `Z`) and automata built from generator tables, whose states
//! are kept canonical under bisimulation.

mod hypotheses;
mod registry;
mod validate;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use hypotheses::{
    check_locally_faithful, check_pseudo_free, FaithfulnessCheck, FixingWitness, PseudoFreeCheck,
};
pub use validate::{validate_action, validate_tables};

use crate::kgraph::{EdgeIdx, KGraph, Path, VertexId};
use registry::{Candidate, Registry, Target};

/// Handle of a group element. For integer backends the handle is the
/// integer itself; for automata it indexes the state registry. The
/// identity is `0` in both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(i64);

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement(0);

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    pub fn raw(self) -> i64 {
        self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error("closure exceeded the cap of {cap} {what}")]
    ClosureExceeded { cap: usize, what: &'static str },
    #[error("malformed generator table: {0}")]
    MalformedTable(String),
    #[error("generator {0} does not act bijectively")]
    NotBijective(String),
    #[error("unknown generator letter {0}")]
    UnknownLetter(i32),
}

/// A closed-form action of `Z` generated by `+1`.
pub trait IntegerRule: Send + Sync + fmt::Debug {
    /// `(g . e, g|_e)`.
    fn act_edge(&self, graph: &KGraph, g: i64, e: EdgeIdx) -> (EdgeIdx, i64);

    fn act_vertex(&self, _graph: &KGraph, _g: i64, v: VertexId) -> VertexId {
        v
    }
}

/// One generator as given in a model file. `edge_action` is indexed by
/// [`EdgeIdx`]; restriction words use signed 1-based generator indices and
/// act right to left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorTable {
    pub name: String,
    pub edge_action: Vec<(EdgeIdx, Vec<i32>)>,
    pub vertex_action: Option<Vec<VertexId>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub max_states: usize,
    pub max_word_len: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_states: 4096,
            max_word_len: 64,
        }
    }
}

enum Backend {
    Integer(Arc<dyn IntegerRule>),
    Automaton(RwLock<Registry>),
}

/// A k-graph together with a self-similar action on it.
pub struct ActionSystem {
    graph: KGraph,
    names: Vec<String>,
    generators: Vec<GroupElement>,
    backend: Backend,
    caps: Caps,
}

impl fmt::Debug for ActionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ActionSystem")
            .field("k", &self.graph.k())
            .field("vertices", &self.graph.vertex_count())
            .field("edges", &self.graph.edge_count())
            .field("generators", &self.names)
            .field("integer", &self.is_integer())
            .finish()
    }
}

impl Clone for ActionSystem {
    fn clone(&self) -> Self {
        let backend = match &self.backend {
            Backend::Integer(rule) => Backend::Integer(Arc::clone(rule)),
            Backend::Automaton(reg) => Backend::Automaton(RwLock::new(
                reg.read().expect("registry lock poisoned").clone(),
            )),
        };
        ActionSystem {
            graph: self.graph.clone(),
            names: self.names.clone(),
            generators: self.generators.clone(),
            backend,
            caps: self.caps,
        }
    }
}

/// Removes adjacent `x, -x` pairs.
pub fn free_reduce(word: Vec<i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for l in word {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

struct Letters<'a> {
    graph: &'a KGraph,
    image: Vec<Vec<EdgeIdx>>,
    inv_image: Vec<Vec<EdgeIdx>>,
    words: Vec<Vec<Vec<i32>>>,
    vertex: Vec<Vec<VertexId>>,
    inv_vertex: Vec<Vec<VertexId>>,
}

impl Letters<'_> {
    fn check(&self, l: i32) -> Result<usize, ActionError> {
        let j = l.unsigned_abs() as usize;
        if l == 0 || j > self.image.len() {
            return Err(ActionError::UnknownLetter(l));
        }
        Ok(j - 1)
    }

    fn act(&self, l: i32, e: EdgeIdx) -> EdgeIdx {
        let j = l.unsigned_abs() as usize - 1;
        if l > 0 {
            self.image[j][e.index()]
        } else {
            self.inv_image[j][e.index()]
        }
    }

    fn act_vertex(&self, l: i32, v: VertexId) -> VertexId {
        let j = l.unsigned_abs() as usize - 1;
        if l > 0 {
            self.vertex[j][v.index()]
        } else {
            self.inv_vertex[j][v.index()]
        }
    }

    fn restrict(&self, l: i32, e: EdgeIdx) -> Vec<i32> {
        let j = l.unsigned_abs() as usize - 1;
        if l > 0 {
            self.words[j][e.index()].clone()
        } else {
            let pre = self.inv_image[j][e.index()];
            self.words[j][pre.index()].iter().rev().map(|&x| -x).collect()
        }
    }

    fn word_act(&self, word: &[i32], e: EdgeIdx) -> EdgeIdx {
        word.iter().rev().fold(e, |e, &l| self.act(l, e))
    }

    fn word_restrict(&self, word: &[i32], e: EdgeIdx) -> Vec<i32> {
        let mut parts = Vec::with_capacity(word.len());
        let mut cur = e;
        for &l in word.iter().rev() {
            parts.push(self.restrict(l, cur));
            cur = self.act(l, cur);
        }
        free_reduce(parts.into_iter().rev().flatten().collect())
    }

    fn word_vertex(&self, word: &[i32]) -> Vec<VertexId> {
        self.graph
            .vertices()
            .map(|v| word.iter().rev().fold(v, |v, &l| self.act_vertex(l, v)))
            .collect()
    }
}

/// Inverse of a permutation given as images; `None` if not a bijection.
fn invert(images: impl Iterator<Item = usize>, n: usize) -> Option<Vec<u32>> {
    let mut inv: Vec<Option<u32>> = vec![None; n];
    for (i, p) in images.enumerate() {
        let slot = inv.get_mut(p)?;
        if slot.is_some() {
            return None;
        }
        *slot = Some(i as u32);
    }
    inv.into_iter().collect()
}

impl ActionSystem {
    /// An action of `Z` given by a closed-form rule; the generator is `+1`.
    pub fn integer(graph: KGraph, rule: Arc<dyn IntegerRule>, name: &str) -> Self {
        ActionSystem {
            graph,
            names: vec![name.to_string()],
            generators: vec![GroupElement(1)],
            backend: Backend::Integer(rule),
            caps: Caps::default(),
        }
    }

    /// An automaton action built from generator tables. All words reachable
    /// from the generators under restriction are canonicalized up front.
    pub fn from_tables(
        graph: KGraph,
        tables: Vec<GeneratorTable>,
        caps: Caps,
    ) -> Result<Self, ActionError> {
        let ne = graph.edge_count();
        let nv = graph.vertex_count();
        let mut letters = Letters {
            graph: &graph,
            image: Vec::new(),
            inv_image: Vec::new(),
            words: Vec::new(),
            vertex: Vec::new(),
            inv_vertex: Vec::new(),
        };
        for t in &tables {
            if t.edge_action.len() != ne {
                return Err(ActionError::MalformedTable(format!(
                    "generator {} lists {} edges, graph has {ne}",
                    t.name,
                    t.edge_action.len()
                )));
            }
            let image: Vec<EdgeIdx> = t.edge_action.iter().map(|(e, _)| *e).collect();
            let inv: Vec<EdgeIdx> = invert(image.iter().map(|e| e.index()), ne)
                .ok_or_else(|| ActionError::NotBijective(t.name.clone()))?
                .into_iter()
                .map(EdgeIdx)
                .collect();
            let vertex: Vec<VertexId> = match &t.vertex_action {
                Some(va) => {
                    if va.len() != nv {
                        return Err(ActionError::MalformedTable(format!(
                            "generator {} lists {} vertices, graph has {nv}",
                            t.name,
                            va.len()
                        )));
                    }
                    va.clone()
                }
                None => graph
                    .vertices()
                    .map(|v| {
                        (1..=graph.k())
                            .flat_map(|c| graph.edges_into(v, c).iter())
                            .next()
                            .map_or(v, |&e| graph.edge(image[e.index()]).range)
                    })
                    .collect(),
            };
            let inv_vertex: Vec<VertexId> = invert(vertex.iter().map(|v| v.index()), nv)
                .ok_or_else(|| ActionError::NotBijective(t.name.clone()))?
                .into_iter()
                .map(VertexId)
                .collect();
            letters.image.push(image);
            letters.inv_image.push(inv);
            letters
                .words
                .push(t.edge_action.iter().map(|(_, w)| w.clone()).collect());
            letters.vertex.push(vertex);
            letters.inv_vertex.push(inv_vertex);
        }
        for words in &letters.words {
            for w in words {
                for &l in w {
                    letters.check(l)?;
                }
            }
        }

        let mut words: Vec<Vec<i32>> = (1..=tables.len() as i32).map(|j| vec![j]).collect();
        let mut index: HashMap<Vec<i32>, usize> =
            words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut cands = Vec::new();
        let mut i = 0;
        while i < words.len() {
            let w = words[i].clone();
            let image = graph.edge_indices().map(|e| letters.word_act(&w, e)).collect();
            let mut restriction = Vec::with_capacity(ne);
            for e in graph.edge_indices() {
                let r = letters.word_restrict(&w, e);
                if r.is_empty() {
                    restriction.push(Target::Known(0));
                    continue;
                }
                if r.len() > caps.max_word_len {
                    return Err(ActionError::ClosureExceeded {
                        cap: caps.max_word_len,
                        what: "word letters",
                    });
                }
                let next = words.len();
                let idx = *index.entry(r.clone()).or_insert(next);
                if idx == next {
                    words.push(r);
                }
                restriction.push(Target::New(idx));
            }
            if words.len() > caps.max_states {
                return Err(ActionError::ClosureExceeded {
                    cap: caps.max_states,
                    what: "generator words",
                });
            }
            cands.push(Candidate {
                vertex: letters.word_vertex(&w),
                image,
                restriction,
                word: w,
            });
            i += 1;
        }
        let mut registry = Registry::new(nv, ne);
        let ids = registry.absorb(&cands, caps.max_states)?;
        let generators = ids[..tables.len()]
            .iter()
            .map(|&id| GroupElement(id as i64))
            .collect();
        drop(letters);
        Ok(ActionSystem {
            graph,
            names: tables.into_iter().map(|t| t.name).collect(),
            generators,
            backend: Backend::Automaton(RwLock::new(registry)),
            caps,
        })
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }

    pub fn graph(&self) -> &KGraph {
        &self.graph
    }

    pub fn k(&self) -> usize {
        self.graph.k()
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::IDENTITY
    }

    pub fn is_integer(&self) -> bool {
        matches!(self.backend, Backend::Integer(_))
    }

    /// The integer `n` as a group element, for integer backends.
    pub fn element_from_integer(&self, n: i64) -> Option<GroupElement> {
        self.is_integer().then_some(GroupElement(n))
    }

    /// Number of canonical automaton states created so far.
    pub fn registry_size(&self) -> Option<usize> {
        match &self.backend {
            Backend::Integer(_) => None,
            Backend::Automaton(reg) => Some(self.read(reg).len()),
        }
    }

    fn read<'a>(&self, reg: &'a RwLock<Registry>) -> RwLockReadGuard<'a, Registry> {
        reg.read().expect("registry lock poisoned")
    }

    fn write<'a>(&self, reg: &'a RwLock<Registry>) -> RwLockWriteGuard<'a, Registry> {
        reg.write().expect("registry lock poisoned")
    }

    pub fn act_edge(&self, g: GroupElement, e: EdgeIdx) -> EdgeIdx {
        match &self.backend {
            Backend::Integer(rule) => rule.act_edge(&self.graph, g.0, e).0,
            Backend::Automaton(reg) => self.read(reg).rows[g.0 as usize].image[e.index()],
        }
    }

    pub fn restrict_edge(&self, g: GroupElement, e: EdgeIdx) -> GroupElement {
        match &self.backend {
            Backend::Integer(rule) => GroupElement(rule.act_edge(&self.graph, g.0, e).1),
            Backend::Automaton(reg) => {
                GroupElement(self.read(reg).rows[g.0 as usize].restriction[e.index()] as i64)
            }
        }
    }

    /// `(g . e, g|_e)` in one lookup.
    pub fn act_restrict_edge(&self, g: GroupElement, e: EdgeIdx) -> (EdgeIdx, GroupElement) {
        match &self.backend {
            Backend::Integer(rule) => {
                let (f, h) = rule.act_edge(&self.graph, g.0, e);
                (f, GroupElement(h))
            }
            Backend::Automaton(reg) => {
                let reg = self.read(reg);
                let row = &reg.rows[g.0 as usize];
                (row.image[e.index()], GroupElement(row.restriction[e.index()] as i64))
            }
        }
    }

    pub fn act_vertex(&self, g: GroupElement, v: VertexId) -> VertexId {
        match &self.backend {
            Backend::Integer(rule) => rule.act_vertex(&self.graph, g.0, v),
            Backend::Automaton(reg) => self.read(reg).rows[g.0 as usize].vertex[v.index()],
        }
    }

    /// `g . mu`, edge by edge along the canonical form. Meaningful for
    /// validated systems, where the image is again canonical.
    pub fn act_path(&self, g: GroupElement, mu: &Path) -> Path {
        if mu.is_vertex() {
            return self.graph.vertex_path(self.act_vertex(g, mu.range()));
        }
        let mut h = g;
        let mut word = Vec::with_capacity(mu.len());
        for &e in mu.edges() {
            let (f, next) = self.act_restrict_edge(h, e);
            word.push(f);
            h = next;
        }
        self.graph.path_from_canonical(word, VertexId(0))
    }

    /// `g|_mu`.
    pub fn restrict_path(&self, g: GroupElement, mu: &Path) -> GroupElement {
        mu.edges()
            .iter()
            .fold(g, |h, &e| self.restrict_edge(h, e))
    }

    /// `(g . mu, g|_mu)`.
    pub fn act_restrict_path(&self, g: GroupElement, mu: &Path) -> (Path, GroupElement) {
        if mu.is_vertex() {
            return (self.graph.vertex_path(self.act_vertex(g, mu.range())), g);
        }
        let mut h = g;
        let mut word = Vec::with_capacity(mu.len());
        for &e in mu.edges() {
            let (f, next) = self.act_restrict_edge(h, e);
            word.push(f);
            h = next;
        }
        (self.graph.path_from_canonical(word, VertexId(0)), h)
    }

    pub fn multiply(&self, g: GroupElement, h: GroupElement) -> Result<GroupElement, ActionError> {
        match &self.backend {
            Backend::Integer(_) => Ok(GroupElement(g.0 + h.0)),
            Backend::Automaton(reg) => {
                if g.is_identity() {
                    return Ok(h);
                }
                if h.is_identity() {
                    return Ok(g);
                }
                let p = self
                    .write(reg)
                    .product(g.0 as u32, h.0 as u32, self.caps.max_states)?;
                Ok(GroupElement(p as i64))
            }
        }
    }

    pub fn inverse(&self, g: GroupElement) -> Result<GroupElement, ActionError> {
        match &self.backend {
            Backend::Integer(_) => Ok(GroupElement(-g.0)),
            Backend::Automaton(reg) => {
                let p = self.write(reg).inverse(g.0 as u32, self.caps.max_states)?;
                Ok(GroupElement(p as i64))
            }
        }
    }

    /// Handle equality. Automaton states are canonical under bisimulation,
    /// integers are compared directly.
    pub fn equal(&self, g: GroupElement, h: GroupElement) -> bool {
        g == h
    }

    /// Explores the pair automaton from `(g, h)` and reports whether every
    /// reachable pair acts identically on vertices and edges.
    pub fn bisimilar(&self, g: GroupElement, h: GroupElement) -> Result<bool, ActionError> {
        let mut seen = HashSet::from([(g, h)]);
        let mut queue = VecDeque::from([(g, h)]);
        while let Some((a, b)) = queue.pop_front() {
            if self.graph.vertices().any(|v| self.act_vertex(a, v) != self.act_vertex(b, v)) {
                return Ok(false);
            }
            for e in self.graph.edge_indices() {
                let (fa, ra) = self.act_restrict_edge(a, e);
                let (fb, rb) = self.act_restrict_edge(b, e);
                if fa != fb {
                    return Ok(false);
                }
                if seen.insert((ra, rb)) {
                    if seen.len() > self.caps.max_states {
                        return Err(ActionError::ClosureExceeded {
                            cap: self.caps.max_states,
                            what: "bisimulation pairs",
                        });
                    }
                    queue.push_back((ra, rb));
                }
            }
        }
        Ok(true)
    }

    /// Evaluates a word of signed 1-based generator indices.
    pub fn element_from_word(&self, word: &[i32]) -> Result<GroupElement, ActionError> {
        let mut acc = GroupElement::IDENTITY;
        for &l in word {
            let j = l.unsigned_abs() as usize;
            if l == 0 || j > self.generators.len() {
                return Err(ActionError::UnknownLetter(l));
            }
            let mut x = self.generators[j - 1];
            if l < 0 {
                x = self.inverse(x)?;
            }
            acc = self.multiply(acc, x)?;
        }
        Ok(acc)
    }

    /// A representative word for `g`.
    pub fn word_of(&self, g: GroupElement) -> Vec<i32> {
        match &self.backend {
            Backend::Integer(_) => {
                let l = if g.0 >= 0 { 1 } else { -1 };
                vec![l; g.0.unsigned_abs() as usize]
            }
            Backend::Automaton(reg) => self.read(reg).rows[g.0 as usize].word.clone(),
        }
    }

    /// All elements of word length at most `radius`, sorted.
    pub fn ball(&self, radius: usize) -> Result<Vec<GroupElement>, ActionError> {
        if self.is_integer() {
            let r = radius as i64;
            return Ok((-r..=r).map(GroupElement).collect());
        }
        let mut letters = self.generators.clone();
        for &g in &self.generators {
            letters.push(self.inverse(g)?);
        }
        let mut all: BTreeSet<GroupElement> = BTreeSet::from([GroupElement::IDENTITY]);
        let mut frontier = vec![GroupElement::IDENTITY];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &x in &frontier {
                for &l in &letters {
                    let y = self.multiply(x, l)?;
                    if all.insert(y) {
                        next.push(y);
                    }
                }
            }
            if all.len() > self.caps.max_states {
                return Err(ActionError::ClosureExceeded {
                    cap: self.caps.max_states,
                    what: "ball elements",
                });
            }
            frontier = next;
        }
        Ok(all.into_iter().collect())
    }

    /// The smallest restriction-closed set containing `seeds`, sorted.
    pub fn restriction_closure(
        &self,
        seeds: &[GroupElement],
        cap: usize,
    ) -> Result<Vec<GroupElement>, ActionError> {
        let mut seen: BTreeSet<GroupElement> = seeds.iter().copied().collect();
        let mut queue: VecDeque<GroupElement> = seen.iter().copied().collect();
        while let Some(g) = queue.pop_front() {
            for e in self.graph.edge_indices() {
                let h = self.restrict_edge(g, e);
                if seen.insert(h) {
                    if seen.len() > cap {
                        return Err(ActionError::ClosureExceeded {
                            cap,
                            what: "closure elements",
                        });
                    }
                    queue.push_back(h);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// The closure of the generators under restriction, at the system cap.
    pub fn generator_closure(&self) -> Result<Vec<GroupElement>, ActionError> {
        self.restriction_closure(&self.generators, self.caps.max_states)
    }

    /// The tables that reproduce this action, one per generator.
    pub fn generator_tables(&self) -> Vec<GeneratorTable> {
        self.generators
            .iter()
            .zip(&self.names)
            .map(|(&g, name)| GeneratorTable {
                name: name.clone(),
                edge_action: self
                    .graph
                    .edge_indices()
                    .map(|e| {
                        let (f, h) = self.act_restrict_edge(g, e);
                        (f, self.word_of(h))
                    })
                    .collect(),
                vertex_action: Some(self.graph.vertices().map(|v| self.act_vertex(g, v)).collect()),
            })
            .collect()
    }
}
