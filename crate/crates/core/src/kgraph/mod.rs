//! Finite k-graphs given by colored skeletons and factorization squares.

mod degree;
mod path;
mod validate;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use degree::Degree;
pub use path::Path;
pub use validate::validate_kgraph;

use crate::report::ValidationReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Position of an edge in the graph's global edge list, which is sorted by
/// `(color, id)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeIdx(pub u32);

impl EdgeIdx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    /// Unique within the color class.
    pub id: u32,
    /// 1-based color.
    pub color: usize,
    pub source: VertexId,
    pub range: VertexId,
}

/// `f g = g' f'` where `f, f'` have color `i`, `g, g'` color `j`, and `i < j`.
/// `f` and `g'` sit at the range end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Square {
    pub f: EdgeIdx,
    pub g: EdgeIdx,
    pub g_prime: EdgeIdx,
    pub f_prime: EdgeIdx,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KGraphError {
    #[error("paths are not composable: source {left} differs from range {right}")]
    NonComposable { left: VertexId, right: VertexId },
    #[error("bad range: need 0 <= p <= q <= d(mu)")]
    BadRange,
    #[error("duplicate edge id {id} in color {color}")]
    DuplicateEdge { color: usize, id: u32 },
    #[error("unknown edge id {id} in color {color}")]
    UnknownEdge { color: usize, id: u32 },
    #[error("unknown vertex {0}")]
    UnknownVertex(u32),
    #[error("color {color} outside 1..={k}")]
    BadColor { color: usize, k: usize },
    #[error("invalid k-graph: {0}")]
    Invalid(ValidationReport),
}

#[derive(Clone, Debug)]
struct SquareSpec {
    i: usize,
    f: u32,
    j: usize,
    g: u32,
    g_prime: u32,
    f_prime: u32,
}

/// Incremental construction of a [`KGraph`].
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    k: usize,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    squares: Vec<SquareSpec>,
}

impl GraphBuilder {
    pub fn new(k: usize) -> Self {
        GraphBuilder {
            k,
            vertices: Vec::new(),
            edges: Vec::new(),
            squares: Vec::new(),
        }
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> VertexId {
        self.vertices.push(name.into());
        VertexId(self.vertices.len() as u32 - 1)
    }

    pub fn add_edge(
        &mut self,
        color: usize,
        id: u32,
        source: VertexId,
        range: VertexId,
    ) -> Result<(), KGraphError> {
        if color == 0 || color > self.k {
            return Err(KGraphError::BadColor { color, k: self.k });
        }
        for v in [source, range] {
            if v.index() >= self.vertices.len() {
                return Err(KGraphError::UnknownVertex(v.0));
            }
        }
        if self.edges.iter().any(|e| e.color == color && e.id == id) {
            return Err(KGraphError::DuplicateEdge { color, id });
        }
        self.edges.push(Edge {
            id,
            color,
            source,
            range,
        });
        Ok(())
    }

    /// Records `f g = g' f'` for a color-`i` edge `f` and a color-`j` edge
    /// `g` with `i < j`; edges are named by their per-color ids.
    pub fn add_square(
        &mut self,
        (i, f): (usize, u32),
        (j, g): (usize, u32),
        g_prime: u32,
        f_prime: u32,
    ) -> Result<(), KGraphError> {
        for c in [i, j] {
            if c == 0 || c > self.k {
                return Err(KGraphError::BadColor { color: c, k: self.k });
            }
        }
        self.squares.push(SquareSpec {
            i,
            f,
            j,
            g,
            g_prime,
            f_prime,
        });
        Ok(())
    }

    /// Assembles the graph without checking the k-graph axioms. Path
    /// operations on an unvalidated graph panic when a square is missing.
    pub fn build_unvalidated(self) -> Result<KGraph, KGraphError> {
        let k = self.k;
        let mut edges = self.edges;
        edges.sort_by_key(|e| (e.color, e.id));
        let lookup: HashMap<(usize, u32), EdgeIdx> = edges
            .iter()
            .enumerate()
            .map(|(n, e)| ((e.color, e.id), EdgeIdx(n as u32)))
            .collect();
        let resolve = |color: usize, id: u32| {
            lookup
                .get(&(color, id))
                .copied()
                .ok_or(KGraphError::UnknownEdge { color, id })
        };
        let mut squares = Vec::with_capacity(self.squares.len());
        for s in &self.squares {
            squares.push(Square {
                f: resolve(s.i, s.f)?,
                g: resolve(s.j, s.g)?,
                g_prime: resolve(s.j, s.g_prime)?,
                f_prime: resolve(s.i, s.f_prime)?,
            });
        }
        let n = self.vertices.len();
        let mut by_color = vec![Vec::new(); k];
        let mut into = vec![vec![Vec::new(); k]; n];
        for (idx, e) in edges.iter().enumerate() {
            by_color[e.color - 1].push(EdgeIdx(idx as u32));
            into[e.range.index()][e.color - 1].push(EdgeIdx(idx as u32));
        }
        let mut forward = HashMap::new();
        let mut backward = HashMap::new();
        for s in &squares {
            forward.entry((s.f, s.g)).or_insert((s.g_prime, s.f_prime));
            backward.entry((s.g_prime, s.f_prime)).or_insert((s.f, s.g));
        }
        Ok(KGraph {
            k,
            vertex_names: self.vertices,
            edges,
            by_color,
            into,
            lookup,
            squares,
            forward,
            backward,
        })
    }

    /// Assembles and validates.
    pub fn build(self) -> Result<KGraph, KGraphError> {
        let g = self.build_unvalidated()?;
        let report = validate_kgraph(&g);
        if report.is_valid() {
            Ok(g)
        } else {
            Err(KGraphError::Invalid(report))
        }
    }
}

/// A finite row-finite k-graph.
#[derive(Clone, Debug)]
pub struct KGraph {
    k: usize,
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    by_color: Vec<Vec<EdgeIdx>>,
    into: Vec<Vec<Vec<EdgeIdx>>>,
    lookup: HashMap<(usize, u32), EdgeIdx>,
    squares: Vec<Square>,
    forward: HashMap<(EdgeIdx, EdgeIdx), (EdgeIdx, EdgeIdx)>,
    backward: HashMap<(EdgeIdx, EdgeIdx), (EdgeIdx, EdgeIdx)>,
}

impl KGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_names.len() as u32).map(VertexId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.index()]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_indices(&self) -> impl Iterator<Item = EdgeIdx> {
        (0..self.edges.len() as u32).map(EdgeIdx)
    }

    pub fn edge(&self, e: EdgeIdx) -> &Edge {
        &self.edges[e.index()]
    }

    pub fn color(&self, e: EdgeIdx) -> usize {
        self.edges[e.index()].color
    }

    pub fn edge_by_id(&self, color: usize, id: u32) -> Option<EdgeIdx> {
        self.lookup.get(&(color, id)).copied()
    }

    pub fn edges_of_color(&self, color: usize) -> &[EdgeIdx] {
        &self.by_color[color - 1]
    }

    /// Edges of one color with range `v`, sorted by id.
    pub fn edges_into(&self, v: VertexId, color: usize) -> &[EdgeIdx] {
        &self.into[v.index()][color - 1]
    }

    pub fn squares(&self) -> &[Square] {
        &self.squares
    }

    pub(crate) fn try_swap(&self, x: EdgeIdx, y: EdgeIdx) -> Option<(EdgeIdx, EdgeIdx)> {
        let (cx, cy) = (self.color(x), self.color(y));
        if cx < cy {
            self.forward.get(&(x, y)).copied()
        } else {
            self.backward.get(&(x, y)).copied()
        }
    }

    fn swap(&self, x: EdgeIdx, y: EdgeIdx) -> (EdgeIdx, EdgeIdx) {
        self.try_swap(x, y)
            .expect("missing factorization square; graph was not validated")
    }

    /// Rewrites a composable edge word so that its color sequence becomes
    /// `target`, using squares as adjacent transpositions.
    fn reorder(&self, word: &mut [EdgeIdx], target: &[usize]) {
        debug_assert_eq!(word.len(), target.len());
        for t in 0..word.len() {
            let pos = (t..word.len())
                .find(|&p| self.color(word[p]) == target[t])
                .expect("target is a permutation of the word's colors");
            for p in (t..pos).rev() {
                let (a, b) = self.swap(word[p], word[p + 1]);
                word[p] = a;
                word[p + 1] = b;
            }
        }
    }

    fn canonicalize(&self, word: &mut [EdgeIdx]) {
        for i in 1..word.len() {
            let mut j = i;
            while j > 0 && self.color(word[j - 1]) > self.color(word[j]) {
                let (a, b) = self.swap(word[j - 1], word[j]);
                word[j - 1] = a;
                word[j] = b;
                j -= 1;
            }
        }
    }

    fn degree_of(&self, word: &[EdgeIdx]) -> Degree {
        let mut d = vec![0u32; self.k];
        for &e in word {
            d[self.color(e) - 1] += 1;
        }
        Degree::new(d)
    }

    /// Builds a path from a canonical word; `anchor` is used for empty words.
    pub(crate) fn path_from_canonical(&self, word: Vec<EdgeIdx>, anchor: VertexId) -> Path {
        let (range, source) = match (word.first(), word.last()) {
            (Some(&f), Some(&l)) => (self.edge(f).range, self.edge(l).source),
            _ => (anchor, anchor),
        };
        Path {
            degree: self.degree_of(&word),
            edges: word,
            range,
            source,
        }
    }

    pub fn vertex_path(&self, v: VertexId) -> Path {
        Path::vertex(v, self.k)
    }

    pub fn edge_path(&self, e: EdgeIdx) -> Path {
        self.path_from_canonical(vec![e], VertexId(0))
    }

    /// The morphism represented by an arbitrary composable edge word,
    /// listed from the range end.
    pub fn path_from_edges(&self, word: &[EdgeIdx]) -> Result<Path, KGraphError> {
        for w in word.windows(2) {
            let (a, b) = (self.edge(w[0]), self.edge(w[1]));
            if a.source != b.range {
                return Err(KGraphError::NonComposable {
                    left: a.source,
                    right: b.range,
                });
            }
        }
        let mut w = word.to_vec();
        self.canonicalize(&mut w);
        Ok(self.path_from_canonical(w, VertexId(0)))
    }

    pub fn compose(&self, mu: &Path, nu: &Path) -> Result<Path, KGraphError> {
        if mu.source != nu.range {
            return Err(KGraphError::NonComposable {
                left: mu.source,
                right: nu.range,
            });
        }
        if nu.is_vertex() {
            return Ok(mu.clone());
        }
        if mu.is_vertex() {
            return Ok(nu.clone());
        }
        let mut w = Vec::with_capacity(mu.len() + nu.len());
        w.extend_from_slice(&mu.edges);
        w.extend_from_slice(&nu.edges);
        self.canonicalize(&mut w);
        Ok(Path {
            degree: &mu.degree + &nu.degree,
            edges: w,
            range: mu.range,
            source: nu.source,
        })
    }

    /// The middle factor `mu(p, q)` of degree `q - p`.
    pub fn segment(&self, mu: &Path, p: &Degree, q: &Degree) -> Result<Path, KGraphError> {
        if !(p.le(q) && q.le(&mu.degree)) {
            return Err(KGraphError::BadRange);
        }
        let mid = q.checked_sub(p).expect("p <= q");
        let tail = mu.degree.checked_sub(q).expect("q <= d(mu)");
        let (np, nm) = (p.total(), mid.total());
        if np == 0 && tail.is_zero() {
            return Ok(mu.clone());
        }
        let mut target = p.colors();
        target.extend(mid.colors());
        target.extend(tail.colors());
        let mut w = mu.edges.clone();
        self.reorder(&mut w, &target);
        let anchor = if np < w.len() {
            self.edge(w[np]).range
        } else {
            mu.source
        };
        Ok(self.path_from_canonical(w[np..np + nm].to_vec(), anchor))
    }

    /// Convenience: the factor of degree `q` at the range end.
    pub fn prefix(&self, mu: &Path, q: &Degree) -> Result<Path, KGraphError> {
        self.segment(mu, &Degree::zero(self.k), q)
    }

    /// `v Λ^n w`, optionally filtered by range `from` and source `to`,
    /// ordered by edge ids in canonical form.
    pub fn paths_of_degree(
        &self,
        n: &Degree,
        from: Option<VertexId>,
        to: Option<VertexId>,
    ) -> Vec<Path> {
        let colors = n.colors();
        let mut out = Vec::new();
        let starts: Vec<VertexId> = match from {
            Some(v) => vec![v],
            None => self.vertices().collect(),
        };
        let mut word = Vec::with_capacity(colors.len());
        for v in starts {
            self.extend_paths(v, v, &colors, &mut word, to, n, &mut out);
        }
        out.sort();
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_paths(
        &self,
        range: VertexId,
        at: VertexId,
        colors: &[usize],
        word: &mut Vec<EdgeIdx>,
        to: Option<VertexId>,
        n: &Degree,
        out: &mut Vec<Path>,
    ) {
        if word.len() == colors.len() {
            if to.map_or(true, |w| w == at) {
                out.push(Path {
                    degree: n.clone(),
                    edges: word.clone(),
                    range,
                    source: at,
                });
            }
            return;
        }
        let c = colors[word.len()];
        for &e in self.edges_into(at, c) {
            word.push(e);
            self.extend_paths(range, self.edge(e).source, colors, word, to, n, out);
            word.pop();
        }
    }

    /// Minimal common extensions: all `(alpha, beta)` with
    /// `mu alpha = nu beta` of degree `d(mu) v d(nu)`.
    pub fn lambda_min(&self, mu: &Path, nu: &Path) -> Vec<(Path, Path)> {
        if mu.range != nu.range {
            return Vec::new();
        }
        let m = mu.degree.join(&nu.degree);
        let rest = m.checked_sub(&mu.degree).expect("d(mu) <= m");
        let zero = Degree::zero(self.k);
        let mut out = Vec::new();
        for alpha in self.paths_of_degree(&rest, Some(mu.source), None) {
            let lambda = self.compose(mu, &alpha).expect("alpha starts at s(mu)");
            let head = self.segment(&lambda, &zero, &nu.degree).expect("in range");
            if head == *nu {
                let beta = self.segment(&lambda, &nu.degree, &m).expect("in range");
                out.push((alpha, beta));
            }
        }
        out
    }

    /// `T(v, w) = |v Λ^{e_color} w|`.
    pub fn coordinate_matrix(&self, color: usize) -> Vec<Vec<u64>> {
        let n = self.vertex_count();
        let mut t = vec![vec![0u64; n]; n];
        for &e in self.edges_of_color(color) {
            let edge = self.edge(e);
            t[edge.range.index()][edge.source.index()] += 1;
        }
        t
    }

    /// True iff `v Λ w` is nonempty for every pair of vertices.
    pub fn strongly_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for e in &self.edges {
            succ[e.range.index()].push(e.source.index());
            pred[e.source.index()].push(e.range.index());
        }
        let reach_all = |adj: &Vec<Vec<usize>>| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach_all(&succ) && reach_all(&pred)
    }
}
