use std::collections::BTreeSet;

use super::{ActionSystem, GeneratorTable, GroupElement};
use crate::kgraph::{EdgeIdx, KGraph, VertexId};
use crate::report::{IssueKind, ValidationReport};

fn edge_name(g: &KGraph, e: EdgeIdx) -> String {
    let edge = g.edge(e);
    format!("c{}#{}", edge.color, edge.id)
}

/// Checks raw generator tables before an automaton is built from them:
/// colors, per-color bijectivity, vertex consistency and letter ranges.
pub fn validate_tables(graph: &KGraph, tables: &[GeneratorTable]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let ne = graph.edge_count();
    for t in tables {
        if t.edge_action.len() != ne {
            report.push(
                IssueKind::Bijection,
                format!("generator {} lists {} of {ne} edges", t.name, t.edge_action.len()),
            );
            continue;
        }
        if t.edge_action.iter().any(|(f, _)| f.index() >= ne) {
            report.push(
                IssueKind::Bijection,
                format!("generator {} maps an edge outside the graph", t.name),
            );
            continue;
        }
        for (e, (f, word)) in graph.edge_indices().zip(&t.edge_action) {
            if graph.color(e) != graph.color(*f) {
                report.push(
                    IssueKind::ColorPreservation,
                    format!(
                        "generator {} maps {} to {}",
                        t.name,
                        edge_name(graph, e),
                        edge_name(graph, *f)
                    ),
                );
            }
            for &l in word {
                if l == 0 || l.unsigned_abs() as usize > tables.len() {
                    report.push(
                        IssueKind::CocycleLaw,
                        format!("generator {} restricts to unknown letter {l}", t.name),
                    );
                }
            }
        }
        for c in 1..=graph.k() {
            let images: BTreeSet<EdgeIdx> = graph
                .edges_of_color(c)
                .iter()
                .map(|e| t.edge_action[e.index()].0)
                .collect();
            let own: BTreeSet<EdgeIdx> = graph.edges_of_color(c).iter().copied().collect();
            if images != own {
                report.push(
                    IssueKind::Bijection,
                    format!("generator {} is not a bijection on color {c}", t.name),
                );
            }
        }
        let vertex: Vec<Option<VertexId>> = match &t.vertex_action {
            Some(va) if va.len() == graph.vertex_count() => va.iter().copied().map(Some).collect(),
            Some(_) => {
                report.push(
                    IssueKind::Automorphism,
                    format!("generator {} has a vertex action of the wrong length", t.name),
                );
                continue;
            }
            None => {
                let mut derived = vec![None; graph.vertex_count()];
                for e in graph.edge_indices() {
                    let r = graph.edge(e).range.index();
                    let img = graph.edge(t.edge_action[e.index()].0).range;
                    match derived[r] {
                        None => derived[r] = Some(img),
                        Some(x) if x != img => report.push(
                            IssueKind::Automorphism,
                            format!(
                                "generator {} sends edges at {} to different ranges",
                                t.name,
                                graph.vertex_name(VertexId(r as u32))
                            ),
                        ),
                        _ => {}
                    }
                }
                derived
            }
        };
        for e in graph.edge_indices() {
            let (edge, img) = (graph.edge(e), graph.edge(t.edge_action[e.index()].0));
            if vertex[edge.range.index()] != Some(img.range) || vertex[edge.source.index()] != Some(img.source) {
                report.push(
                    IssueKind::Automorphism,
                    format!(
                        "generator {} does not respect the endpoints of {}",
                        t.name,
                        edge_name(graph, e)
                    ),
                );
            }
        }
    }
    report
}

/// Exhaustive structural check of an action on its generators and their
/// inverses: automorphism property, compatibility with every square, the
/// cocycle law for products and the inverse law.
pub fn validate_action(sys: &ActionSystem) -> ValidationReport {
    let mut report = ValidationReport::default();
    let g = sys.graph();
    let mut elems: Vec<(String, GroupElement)> = Vec::new();
    for (name, &x) in sys.generator_names().iter().zip(sys.generators()) {
        elems.push((name.clone(), x));
        match sys.inverse(x) {
            Ok(inv) => elems.push((format!("{name}^-1"), inv)),
            Err(err) => report.push(IssueKind::InverseLaw, format!("{name}: {err}")),
        }
    }

    let mut colors_ok = true;
    for (name, x) in &elems {
        for e in g.edge_indices() {
            let f = sys.act_edge(*x, e);
            if g.color(f) != g.color(e) {
                colors_ok = false;
                report.push(
                    IssueKind::ColorPreservation,
                    format!("{name} maps {} to {}", edge_name(g, e), edge_name(g, f)),
                );
            }
        }
        for c in 1..=g.k() {
            let images: BTreeSet<EdgeIdx> = g
                .edges_of_color(c)
                .iter()
                .map(|&e| sys.act_edge(*x, e))
                .collect();
            if images.len() != g.edges_of_color(c).len() {
                report.push(
                    IssueKind::Bijection,
                    format!("{name} is not a bijection on color {c}"),
                );
            }
        }
        for e in g.edge_indices() {
            let (f, h) = sys.act_restrict_edge(*x, e);
            let (edge, img) = (g.edge(e), g.edge(f));
            if img.range != sys.act_vertex(*x, edge.range) || img.source != sys.act_vertex(*x, edge.source) {
                report.push(
                    IssueKind::Automorphism,
                    format!("{name} does not respect the endpoints of {}", edge_name(g, e)),
                );
            }
            if sys.act_vertex(h, edge.source) != img.source {
                report.push(
                    IssueKind::Automorphism,
                    format!("{name}|_{} moves s({}) inconsistently", edge_name(g, e), edge_name(g, e)),
                );
            }
        }
    }

    if colors_ok && !report.has(IssueKind::Automorphism) {
        for (name, x) in &elems {
            for sq in g.squares() {
                let (a1, h1) = sys.act_restrict_edge(*x, sq.f);
                let (b1, k1) = sys.act_restrict_edge(h1, sq.g);
                let (a2, h2) = sys.act_restrict_edge(*x, sq.g_prime);
                let (b2, k2) = sys.act_restrict_edge(h2, sq.f_prime);
                let swapped = g.try_swap(a2, b2);
                if swapped != Some((a1, b1)) || k1 != k2 {
                    report.push(
                        IssueKind::SquareCompatibility,
                        format!(
                            "{name} on square {} {} = {} {}",
                            edge_name(g, sq.f),
                            edge_name(g, sq.g),
                            edge_name(g, sq.g_prime),
                            edge_name(g, sq.f_prime)
                        ),
                    );
                }
            }
        }
    }

    for (n1, x) in &elems {
        for (n2, y) in &elems {
            let xy = match sys.multiply(*x, *y) {
                Ok(p) => p,
                Err(err) => {
                    report.push(IssueKind::CocycleLaw, format!("{n1}{n2}: {err}"));
                    continue;
                }
            };
            for e in g.edge_indices() {
                let (ye, y_e) = sys.act_restrict_edge(*y, e);
                let (xye, x_ye) = sys.act_restrict_edge(*x, ye);
                let rhs = sys.multiply(x_ye, y_e);
                let (lhs_edge, lhs) = sys.act_restrict_edge(xy, e);
                if lhs_edge != xye || rhs.as_ref() != Ok(&lhs) {
                    report.push(
                        IssueKind::CocycleLaw,
                        format!("({n1} {n2}) at {}", edge_name(g, e)),
                    );
                }
            }
            if g.vertices().any(|v| sys.act_vertex(xy, v) != sys.act_vertex(*x, sys.act_vertex(*y, v))) {
                report.push(IssueKind::CocycleLaw, format!("({n1} {n2}) on vertices"));
            }
        }
    }

    for (name, &x) in sys.generator_names().iter().zip(sys.generators()) {
        let Ok(inv) = sys.inverse(x) else { continue };
        if sys.multiply(x, inv).ok() != Some(GroupElement::IDENTITY)
            || sys.multiply(inv, x).ok() != Some(GroupElement::IDENTITY)
        {
            report.push(IssueKind::InverseLaw, format!("{name} times its inverse"));
        }
        for e in g.edge_indices() {
            let (f, h) = sys.act_restrict_edge(x, e);
            let (back, hi) = sys.act_restrict_edge(inv, f);
            let cancels = sys.multiply(hi, h).ok() == Some(GroupElement::IDENTITY);
            if back != e || !cancels {
                report.push(
                    IssueKind::InverseLaw,
                    format!("{name}^-1 does not undo {name} at {}", edge_name(g, e)),
                );
            }
        }
    }
    report
}
