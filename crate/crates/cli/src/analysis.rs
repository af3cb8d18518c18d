//! The batch analysis pipeline and its JSON report.

use serde::{Deserialize, Serialize};

use ssgraph_core::action::{check_locally_faithful, check_pseudo_free};
use ssgraph_core::algebra::{Element, Monomial};
use ssgraph_core::kms::{summarize, KmsState, SimplexSummary, TraceKind};
use ssgraph_core::models::{check_degenerate_property, DegenerateVerdict};
use ssgraph_core::periodicity::{periodicity_group_with, PeriodicityError, PeriodicityParams};
use ssgraph_core::perron::{spectral_data, DEFAULT_MAX_ITER, DEFAULT_TOL};
use ssgraph_core::{ActionError, ActionSystem, EdgeIdx, KGraph, Path, VertexId};
use num_complex::Complex64;

use crate::format::EdgeKey;

pub const REPORT_SCHEMA: &str = "ssgraph-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisParams {
    pub box_radius: u32,
    pub ball_radius: usize,
    pub tol: f64,
    /// Longest path searched for a trivializing restriction.
    pub degenerate_depth: usize,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        let p = PeriodicityParams::default();
        AnalysisParams {
            box_radius: p.box_radius,
            ball_radius: p.ball_radius,
            tol: p.tol,
            degenerate_depth: 8,
        }
    }
}

impl AnalysisParams {
    pub fn periodicity(&self) -> PeriodicityParams {
        PeriodicityParams {
            box_radius: self.box_radius,
            ball_radius: self.ball_radius,
            tol: self.tol,
        }
    }
}

/// A path given by its edges from the range end, or by a vertex when empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<u32>,
    #[serde(default)]
    pub edges: Vec<EdgeKey>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub mu: PathSpec,
    /// Signed 1-based generator indices.
    #[serde(default)]
    pub g: Vec<i32>,
    pub nu: PathSpec,
    #[serde(default = "one")]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn one() -> f64 {
    1.0
}

/// A labelled element: a list of weighted monomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSpec {
    pub label: String,
    pub terms: Vec<TermSpec>,
}

pub fn path_spec(g: &KGraph, p: &Path) -> PathSpec {
    PathSpec {
        vertex: Some(p.range().0),
        edges: p
            .edges()
            .iter()
            .map(|&e| [g.edge(e).color as u32, g.edge(e).id])
            .collect(),
    }
}

pub fn resolve_path(g: &KGraph, spec: &PathSpec) -> Result<Path, String> {
    if spec.edges.is_empty() {
        let v = spec.vertex.ok_or("an empty path needs a vertex")?;
        if v as usize >= g.vertex_count() {
            return Err(format!("vertex {v} does not exist"));
        }
        return Ok(g.vertex_path(VertexId(v)));
    }
    let edges = spec
        .edges
        .iter()
        .map(|&[c, id]| g.edge_by_id(c as usize, id).ok_or(format!("unknown edge [{c}, {id}]")))
        .collect::<Result<Vec<EdgeIdx>, String>>()?;
    let p = g.path_from_edges(&edges).map_err(|e| e.to_string())?;
    if let Some(v) = spec.vertex {
        if p.range().0 != v {
            return Err(format!("path has range {}, not {v}", p.range()));
        }
    }
    Ok(p)
}

pub fn resolve_element(sys: &ActionSystem, spec: &ElementSpec) -> Result<Element, String> {
    let g = sys.graph();
    let mut out = Element::zero();
    for (n, t) in spec.terms.iter().enumerate() {
        let at = |e: String| format!("{} term {n}: {e}", spec.label);
        let mu = resolve_path(g, &t.mu).map_err(at)?;
        let nu = resolve_path(g, &t.nu).map_err(at)?;
        let h = sys.element_from_word(&t.g).map_err(|e| at(e.to_string()))?;
        let m = Monomial::new(sys, mu, h, nu).map_err(|e| at(e.to_string()))?;
        out.add_term(m, Complex64::new(t.re, t.im));
    }
    Ok(out)
}

/// The element as a list of terms.
pub fn element_spec(sys: &ActionSystem, label: &str, a: &Element) -> ElementSpec {
    let g = sys.graph();
    ElementSpec {
        label: label.to_string(),
        terms: a
            .terms()
            .map(|(m, c)| TermSpec {
                mu: path_spec(g, &m.mu),
                g: sys.word_of(m.g),
                nu: path_spec(g, &m.nu),
                re: c.re,
                im: c.im,
            })
            .collect(),
    }
}

/// `haar`, `character:t1,t2,...` or `mixture:w:t1,...;w:t1,...`.
pub fn parse_trace(s: &str) -> Result<TraceKind, String> {
    let angles = |list: &str| -> Result<Vec<f64>, String> {
        if list.trim().is_empty() {
            return Ok(Vec::new());
        }
        list.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad angle {t:?}: {e}")))
            .collect()
    };
    if s == "haar" {
        return Ok(TraceKind::Haar);
    }
    if let Some(rest) = s.strip_prefix("character:") {
        return Ok(TraceKind::Character(angles(rest)?));
    }
    if let Some(rest) = s.strip_prefix("mixture:") {
        let parts = rest
            .split(';')
            .map(|part| {
                let (w, list) = part.split_once(':').ok_or(format!("bad mixture part {part:?}"))?;
                let w = w.trim().parse::<f64>().map_err(|e| format!("bad weight {w:?}: {e}"))?;
                Ok((w, angles(list)?))
            })
            .collect::<Result<Vec<_>, String>>()?;
        return Ok(TraceKind::Mixture(parts));
    }
    Err(format!("unknown trace {s:?}; expected haar, character:... or mixture:..."))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StageError {
    pub stage: String,
    pub message: String,
    pub closure_exceeded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Check<W> {
    pub holds: bool,
    pub witness: Option<W>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathWitness {
    pub word: Vec<i32>,
    pub vertex: u32,
    pub edges: Vec<EdgeKey>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexWitness {
    pub word: Vec<i32>,
    pub vertex: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Hypotheses {
    pub strongly_connected: bool,
    pub closure_size: Option<usize>,
    pub pseudo_free: Option<Check<PathWitness>>,
    pub locally_faithful: Option<Check<VertexWitness>>,
    pub degenerate: Option<DegenerateVerdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PerronSummary {
    pub rho: Vec<f64>,
    pub integer_rho: Option<Vec<u64>>,
    pub x: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LatticeSummary {
    pub rank: usize,
    pub basis: Vec<Vec<i64>>,
    pub members: Vec<Vec<i64>>,
    pub aperiodic: bool,
    pub box_radius: u32,
    pub ball_radius: usize,
    pub witness_states: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub element: ElementSpec,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KmsEvaluations {
    pub trace: TraceKind,
    pub values: Vec<Evaluation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub model: Option<String>,
    pub k: usize,
    pub vertices: usize,
    pub edges: usize,
    pub generators: Vec<String>,
    pub params: AnalysisParams,
    pub hypotheses: Hypotheses,
    pub perron: Option<PerronSummary>,
    pub periodicity: Option<LatticeSummary>,
    pub kms: Option<SimplexSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<KmsEvaluations>,
    pub errors: Vec<StageError>,
}

impl AnalysisReport {
    pub fn closure_exceeded(&self) -> bool {
        self.errors.iter().any(|e| e.closure_exceeded)
    }
}

fn action_error(stage: &str, e: &ActionError) -> StageError {
    StageError {
        stage: stage.into(),
        message: e.to_string(),
        closure_exceeded: matches!(e, ActionError::ClosureExceeded { .. }),
    }
}

fn periodicity_error(stage: &str, e: &PeriodicityError) -> StageError {
    StageError {
        stage: stage.into(),
        message: e.to_string(),
        closure_exceeded: e.is_closure_exceeded(),
    }
}

fn hypotheses(sys: &ActionSystem, params: &AnalysisParams, errors: &mut Vec<StageError>) -> Hypotheses {
    let g = sys.graph();
    let mut out = Hypotheses {
        strongly_connected: g.strongly_connected(),
        closure_size: None,
        pseudo_free: None,
        locally_faithful: None,
        degenerate: None,
    };
    match sys.generator_closure() {
        Ok(closure) => {
            out.closure_size = Some(closure.len());
            let pf = check_pseudo_free(sys, &closure);
            out.pseudo_free = Some(Check {
                holds: pf.holds,
                witness: pf.witness.map(|w| PathWitness {
                    word: sys.word_of(w.element),
                    vertex: w.vertex.0,
                    edges: w.edges.iter().map(|&e| [g.edge(e).color as u32, g.edge(e).id]).collect(),
                }),
            });
            let lf = check_locally_faithful(sys, &closure);
            out.locally_faithful = Some(Check {
                holds: lf.holds,
                witness: lf.witness.map(|(h, v)| VertexWitness {
                    word: sys.word_of(h),
                    vertex: v.0,
                }),
            });
        }
        Err(e) => errors.push(action_error("closure", &e)),
    }
    match check_degenerate_property(sys, params.degenerate_depth) {
        Ok(v) => out.degenerate = Some(v),
        Err(e) => errors.push(action_error("degenerate", &e)),
    }
    out
}

/// Runs every stage; failures are recorded in `errors` and later stages
/// that depend on them are skipped.
pub fn run_analysis(
    sys: &ActionSystem,
    name: Option<String>,
    params: &AnalysisParams,
    evaluations: Option<(TraceKind, Vec<ElementSpec>)>,
) -> AnalysisReport {
    let g = sys.graph();
    let mut errors = Vec::new();
    let hypotheses = hypotheses(sys, params, &mut errors);
    let mut report = AnalysisReport {
        schema: REPORT_SCHEMA,
        model: name,
        k: g.k(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        generators: sys.generator_names().to_vec(),
        params: *params,
        hypotheses,
        perron: None,
        periodicity: None,
        kms: None,
        evaluations: None,
        errors: Vec::new(),
    };
    let pd = match spectral_data(g, DEFAULT_TOL, DEFAULT_MAX_ITER) {
        Ok(pd) => pd,
        Err(e) => {
            errors.push(StageError {
                stage: "perron".into(),
                message: e.to_string(),
                closure_exceeded: false,
            });
            report.errors = errors;
            return report;
        }
    };
    report.perron = Some(PerronSummary {
        rho: pd.rho.clone(),
        integer_rho: pd.integer_rho.clone(),
        x: pd.x.clone(),
        residuals: pd.residuals.clone(),
        iterations: pd.iterations,
    });
    let lattice = match periodicity_group_with(sys, &pd, &params.periodicity()) {
        Ok(l) => l,
        Err(e) => {
            errors.push(periodicity_error("periodicity", &e));
            report.errors = errors;
            return report;
        }
    };
    report.periodicity = Some(LatticeSummary {
        rank: lattice.rank(),
        basis: lattice.basis().to_vec(),
        members: lattice.members.clone(),
        aperiodic: lattice.rank() == 0,
        box_radius: lattice.box_radius,
        ball_radius: lattice.ball_radius,
        witness_states: lattice.witness_states,
    });
    report.kms = Some(summarize(&pd, &lattice, sys, params.tol));
    if let Some((kind, elements)) = evaluations {
        match KmsState::from_parts(sys, pd, lattice, kind.clone(), params.tol) {
            Ok(state) => {
                let mut values = Vec::new();
                for spec in elements {
                    let result = resolve_element(sys, &spec)
                        .and_then(|a| state.evaluate(sys, &a).map_err(|e| e.to_string()));
                    match result {
                        Ok(v) => values.push(Evaluation {
                            element: spec,
                            re: v.re,
                            im: v.im,
                        }),
                        Err(message) => errors.push(StageError {
                            stage: format!("evaluate {}", spec.label),
                            message,
                            closure_exceeded: false,
                        }),
                    }
                }
                report.evaluations = Some(KmsEvaluations { trace: kind, values });
            }
            Err(e) => errors.push(StageError {
                stage: "kms".into(),
                message: e.to_string(),
                closure_exceeded: false,
            }),
        }
    }
    report.errors = errors;
    report
}

/// Identity, vertex projections, edge projections and the periodicity
/// unitaries of the lattice basis.
pub fn default_elements(sys: &ActionSystem, basis: &[Vec<i64>], ball_radius: usize) -> Vec<ElementSpec> {
    let g = sys.graph();
    let mut out = vec![element_spec(sys, "identity", &Element::identity(sys))];
    for v in g.vertices() {
        let a = Element::from_monomial(Monomial::vertex(sys, v));
        out.push(element_spec(sys, &format!("s_{}", g.vertex_name(v)), &a));
    }
    for e in g.edge_indices() {
        let a = Element::from_monomial(Monomial::projection(&g.edge_path(e)));
        let edge = g.edge(e);
        out.push(element_spec(sys, &format!("p[{},{}]", edge.color, edge.id), &a));
    }
    if let Ok(group) = ssgraph_core::periodicity::witness_group(sys, ball_radius) {
        for z in basis {
            let (m, n) = ssgraph_core::periodicity::split(z);
            if let Ok(v) = ssgraph_core::algebra::periodicity_unitary::<Complex64>(sys, &m, &n, &group) {
                out.push(element_spec(sys, &format!("V{z:?}"), &v));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ssgraph_core::models::{build_odometer, OdometerSpec};

    #[test]
    fn element_specs_round_trip() {
        let sys = build_odometer(&OdometerSpec::new(vec![2, 2]).unwrap());
        for spec in default_elements(&sys, &[vec![1, -1]], 1) {
            let a = resolve_element(&sys, &spec).unwrap();
            let back = element_spec(&sys, &spec.label, &a);
            assert_eq!(resolve_element(&sys, &back).unwrap(), a);
        }
    }

    #[test]
    fn bad_paths_are_reported() {
        let sys = build_odometer(&OdometerSpec::new(vec![2, 3]).unwrap());
        let g = sys.graph();
        let missing = PathSpec { vertex: Some(4), edges: vec![] };
        assert!(resolve_path(g, &missing).is_err());
        let unknown = PathSpec { vertex: None, edges: vec![[1, 9]] };
        assert!(resolve_path(g, &unknown).unwrap_err().contains("unknown edge"));
    }
}
