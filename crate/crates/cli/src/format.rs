//! The `ssgraph/1` JSON model format.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use ssgraph_core::action::{validate_action, validate_tables, ActionError};
use ssgraph_core::kgraph::validate_kgraph;
use ssgraph_core::{ActionSystem, Caps, EdgeIdx, GeneratorTable, GraphBuilder, KGraph, ValidationReport, VertexId};

pub const SCHEMA: &str = "ssgraph/1";

/// `[color, id]`.
pub type EdgeKey = [u32; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub id: u32,
    pub color: u32,
    pub source: u32,
    pub range: u32,
}

/// `f g = g' f'` with `f, f'` of color `i` and `g, g'` of color `j`, by id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SquareEntry {
    pub i: u32,
    pub j: u32,
    pub f: u32,
    pub g: u32,
    pub g_prime: u32,
    pub f_prime: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeActionEntry {
    pub edge: EdgeKey,
    pub image: EdgeKey,
    /// Signed 1-based generator indices, applied right to left.
    pub restriction: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct GeneratorEntry {
    pub name: String,
    pub edge_action: Vec<EdgeActionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_action: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema: String,
    pub k: u32,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeEntry>,
    #[serde(default)]
    pub squares: Vec<SquareEntry>,
    #[serde(default)]
    pub generators: Vec<GeneratorEntry>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub metadata: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseIssue {
    /// JSON-pointer-like location, e.g. `/edges/3`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for ParseIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("parse error: {}", join(.0))]
    Parse(Vec<ParseIssue>),
    #[error("validation error: {}", join(&.0.issues))]
    Validation(ValidationReport),
    /// The generator closure outgrew its caps while building the automaton.
    #[error("closure exceeded: {0}")]
    ClosureExceeded(String),
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// A parsed and validated model.
pub struct Model {
    pub system: ActionSystem,
    pub metadata: Value,
}

impl Model {
    pub fn graph(&self) -> &KGraph {
        self.system.graph()
    }

    pub fn name(&self) -> Option<&str> {
        self.metadata.get("name").and_then(Value::as_str)
    }
}

fn issue(location: impl Into<String>, message: impl Into<String>) -> ParseIssue {
    ParseIssue {
        location: location.into(),
        message: message.into(),
    }
}

/// Parses, builds and validates a model document.
pub fn parse_model(bytes: &[u8]) -> Result<Model, LoadError> {
    let file: ModelFile = serde_json::from_slice(bytes).map_err(|e| {
        LoadError::Parse(vec![issue(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )])
    })?;
    from_file(file)
}

pub fn from_file(file: ModelFile) -> Result<Model, LoadError> {
    let mut issues = Vec::new();
    if file.schema != SCHEMA {
        issues.push(issue("/schema", format!("expected {SCHEMA:?}, found {:?}", file.schema)));
    }
    if file.k == 0 {
        issues.push(issue("/k", "k must be at least 1"));
    }
    let k = file.k as usize;
    let nv = file.vertices.len() as u32;
    let mut builder = GraphBuilder::new(k);
    for name in &file.vertices {
        builder.add_vertex(name.clone());
    }
    let mut seen = HashSet::new();
    for (n, e) in file.edges.iter().enumerate() {
        let at = format!("/edges/{n}");
        if e.color == 0 || e.color > file.k {
            issues.push(issue(&at, format!("color {} outside 1..={}", e.color, file.k)));
            continue;
        }
        if !seen.insert((e.color, e.id)) {
            issues.push(issue(&at, format!("duplicate edge id {} in color {}", e.id, e.color)));
            continue;
        }
        for (what, v) in [("source", e.source), ("range", e.range)] {
            if v >= nv {
                issues.push(issue(&at, format!("{what} vertex {v} does not exist")));
            }
        }
        if e.source < nv && e.range < nv {
            builder
                .add_edge(e.color as usize, e.id, VertexId(e.source), VertexId(e.range))
                .expect("checked above");
        }
    }
    let known = |c: u32, id: u32| seen.contains(&(c, id));
    for (n, s) in file.squares.iter().enumerate() {
        let at = format!("/squares/{n}");
        if s.i == 0 || s.j > file.k || s.i >= s.j {
            issues.push(issue(&at, format!("need 1 <= i < j <= {}, found i={} j={}", file.k, s.i, s.j)));
            continue;
        }
        for (c, id) in [(s.i, s.f), (s.j, s.g), (s.j, s.g_prime), (s.i, s.f_prime)] {
            if !known(c, id) {
                issues.push(issue(&at, format!("unknown edge id {id} in color {c}")));
            }
        }
        builder
            .add_square((s.i as usize, s.f), (s.j as usize, s.g), s.g_prime, s.f_prime)
            .expect("colors checked above");
    }
    if !issues.is_empty() {
        return Err(LoadError::Parse(issues));
    }
    let graph = builder.build_unvalidated().map_err(|e| LoadError::Parse(vec![issue("/squares", e.to_string())]))?;
    let report = validate_kgraph(&graph);
    if !report.is_valid() {
        return Err(LoadError::Validation(report));
    }

    let mut tables = Vec::new();
    for (n, gen) in file.generators.iter().enumerate() {
        let at = format!("/generators/{n}");
        let mut entries: Vec<Option<(EdgeIdx, Vec<i32>)>> = vec![None; graph.edge_count()];
        for (m, a) in gen.edge_action.iter().enumerate() {
            let at = format!("{at}/edgeAction/{m}");
            let lookup = |key: EdgeKey| graph.edge_by_id(key[0] as usize, key[1]);
            let (Some(e), Some(f)) = (lookup(a.edge), lookup(a.image)) else {
                issues.push(issue(&at, format!("unknown edge in {:?} -> {:?}", a.edge, a.image)));
                continue;
            };
            if entries[e.index()].is_some() {
                issues.push(issue(&at, format!("edge {:?} listed twice", a.edge)));
                continue;
            }
            let bad = a.restriction.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > file.generators.len());
            if let Some(l) = bad {
                issues.push(issue(&at, format!("generator index {l} out of range")));
                continue;
            }
            entries[e.index()] = Some((f, a.restriction.clone()));
        }
        if let Some(missing) = entries.iter().position(Option::is_none) {
            if issues.is_empty() {
                let e = graph.edge(EdgeIdx(missing as u32));
                issues.push(issue(&at, format!("no action given for edge [{}, {}]", e.color, e.id)));
            }
            continue;
        }
        let vertex_action = match &gen.vertex_action {
            Some(va) => {
                if let Some(v) = va.iter().find(|&&v| v >= nv) {
                    issues.push(issue(format!("{at}/vertexAction"), format!("vertex {v} does not exist")));
                    continue;
                }
                Some(va.iter().map(|&v| VertexId(v)).collect())
            }
            None => None,
        };
        tables.push(GeneratorTable {
            name: gen.name.clone(),
            edge_action: entries.into_iter().map(|x| x.expect("all present")).collect(),
            vertex_action,
        });
    }
    if !issues.is_empty() {
        return Err(LoadError::Parse(issues));
    }
    let report = validate_tables(&graph, &tables);
    if !report.is_valid() {
        return Err(LoadError::Validation(report));
    }
    let system = ActionSystem::from_tables(graph, tables, Caps::default())
        .map_err(|e| match e {
            ActionError::ClosureExceeded { .. } => LoadError::ClosureExceeded(e.to_string()),
            _ => LoadError::Parse(vec![issue("/generators", e.to_string())]),
        })?;
    let report = validate_action(&system);
    if !report.is_valid() {
        return Err(LoadError::Validation(report));
    }
    Ok(Model {
        system,
        metadata: file.metadata,
    })
}

fn key(g: &KGraph, e: EdgeIdx) -> EdgeKey {
    let edge = g.edge(e);
    [edge.color as u32, edge.id]
}

/// Canonical document for a system: edges and squares sorted by color and
/// id, every generator with an explicit vertex action.
pub fn to_file(sys: &ActionSystem, metadata: Value) -> ModelFile {
    let g = sys.graph();
    let edges = g
        .edge_indices()
        .map(|e| {
            let edge = g.edge(e);
            EdgeEntry {
                id: edge.id,
                color: edge.color as u32,
                source: edge.source.0,
                range: edge.range.0,
            }
        })
        .collect();
    let squares: BTreeMap<(u32, u32, u32, u32), SquareEntry> = g
        .squares()
        .iter()
        .map(|s| {
            let [i, f] = key(g, s.f);
            let [j, gg] = key(g, s.g);
            let entry = SquareEntry {
                i,
                j,
                f,
                g: gg,
                g_prime: g.edge(s.g_prime).id,
                f_prime: g.edge(s.f_prime).id,
            };
            ((i, j, f, gg), entry)
        })
        .collect();
    let generators = sys
        .generator_tables()
        .into_iter()
        .map(|t| GeneratorEntry {
            name: t.name,
            edge_action: t
                .edge_action
                .iter()
                .enumerate()
                .map(|(n, (f, w))| EdgeActionEntry {
                    edge: key(g, EdgeIdx(n as u32)),
                    image: key(g, *f),
                    restriction: w.clone(),
                })
                .collect(),
            vertex_action: t.vertex_action.map(|va| va.iter().map(|v| v.0).collect()),
        })
        .collect();
    ModelFile {
        schema: SCHEMA.to_string(),
        k: g.k() as u32,
        vertices: g.vertices().map(|v| g.vertex_name(v).to_string()).collect(),
        edges,
        squares: squares.into_values().collect(),
        generators,
        metadata,
    }
}

/// Pretty-printed canonical JSON with a trailing newline.
pub fn emit_model(sys: &ActionSystem, metadata: Value) -> String {
    let mut s = serde_json::to_string_pretty(&to_file(sys, metadata)).expect("model serializes");
    s.push('\n');
    s
}
