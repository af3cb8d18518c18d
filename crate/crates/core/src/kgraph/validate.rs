use std::collections::{BTreeSet, HashMap};

use super::{EdgeIdx, KGraph};
use crate::report::{IssueKind, ValidationReport};

/// Checks square endpoints and colors, bijectivity of every square table,
/// the associativity cube for `k >= 3`, and source/sink freeness.
pub fn validate_kgraph(g: &KGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    let name = |e: EdgeIdx| {
        let edge = g.edge(e);
        format!("c{}#{}", edge.color, edge.id)
    };

    for s in g.squares() {
        let (f, gg, gp, fp) = (g.edge(s.f), g.edge(s.g), g.edge(s.g_prime), g.edge(s.f_prime));
        let label = format!(
            "square {} {} = {} {}",
            name(s.f),
            name(s.g),
            name(s.g_prime),
            name(s.f_prime)
        );
        if !(f.color == fp.color && gg.color == gp.color && f.color < gg.color) {
            report.push(IssueKind::Endpoints, format!("{label}: colors do not match"));
            continue;
        }
        if f.source != gg.range || gp.source != fp.range {
            report.push(IssueKind::Endpoints, format!("{label}: a side is not composable"));
        }
        if gp.range != f.range || fp.source != gg.source {
            report.push(IssueKind::Endpoints, format!("{label}: endpoints differ"));
        }
    }

    let k = g.k();
    for i in 1..=k {
        for j in i + 1..=k {
            let mut fwd: HashMap<(EdgeIdx, EdgeIdx), usize> = HashMap::new();
            let mut bwd: HashMap<(EdgeIdx, EdgeIdx), usize> = HashMap::new();
            for s in g.squares() {
                if g.color(s.f) == i && g.color(s.g) == j {
                    *fwd.entry((s.f, s.g)).or_default() += 1;
                    *bwd.entry((s.g_prime, s.f_prime)).or_default() += 1;
                }
            }
            let check = |report: &mut ValidationReport,
                         table: &HashMap<(EdgeIdx, EdgeIdx), usize>,
                         first: usize,
                         second: usize| {
                let mut expected = BTreeSet::new();
                for &a in g.edges_of_color(first) {
                    for &b in g.edges_into(g.edge(a).source, second) {
                        expected.insert((a, b));
                    }
                }
                for pair in &expected {
                    match table.get(pair).copied().unwrap_or(0) {
                        1 => {}
                        0 => report.push(
                            IssueKind::Bijection,
                            format!(
                                "composable ({first},{second}) pair {} {} has no square",
                                name(pair.0),
                                name(pair.1)
                            ),
                        ),
                        n => report.push(
                            IssueKind::Bijection,
                            format!(
                                "composable ({first},{second}) pair {} {} appears in {n} squares",
                                name(pair.0),
                                name(pair.1)
                            ),
                        ),
                    }
                }
                for pair in table.keys() {
                    if !expected.contains(pair) {
                        report.push(
                            IssueKind::Bijection,
                            format!(
                                "({first},{second}) pair {} {} is not composable",
                                name(pair.0),
                                name(pair.1)
                            ),
                        );
                    }
                }
            };
            check(&mut report, &fwd, i, j);
            check(&mut report, &bwd, j, i);
        }
    }

    if k >= 3 && !report.has(IssueKind::Bijection) && !report.has(IssueKind::Endpoints) {
        for a in 1..=k {
            for b in a + 1..=k {
                for c in b + 1..=k {
                    for &x in g.edges_of_color(a) {
                        for &y in g.edges_into(g.edge(x).source, b) {
                            for &z in g.edges_into(g.edge(y).source, c) {
                                if let Some(msg) = cube(g, [x, y, z]) {
                                    report.push(IssueKind::Associativity, msg);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    for v in g.vertices() {
        for c in 1..=k {
            if g.edges_into(v, c).is_empty() {
                report.push(
                    IssueKind::SourceFree,
                    format!("{} receives no color-{c} edge", g.vertex_name(v)),
                );
            }
            if !g.edges_of_color(c).iter().any(|&e| g.edge(e).source == v) {
                report.push(
                    IssueKind::SinkFree,
                    format!("{} emits no color-{c} edge", g.vertex_name(v)),
                );
            }
        }
    }
    report
}

/// Reverses an ascending three-color word along both braid routes.
fn cube(g: &KGraph, w: [EdgeIdx; 3]) -> Option<String> {
    let step = |w: [EdgeIdx; 3], at: usize| -> Option<[EdgeIdx; 3]> {
        let (a, b) = g.try_swap(w[at], w[at + 1])?;
        let mut out = w;
        out[at] = a;
        out[at + 1] = b;
        Some(out)
    };
    let left = step(w, 0).and_then(|w| step(w, 1)).and_then(|w| step(w, 0));
    let right = step(w, 1).and_then(|w| step(w, 0)).and_then(|w| step(w, 1));
    match (left, right) {
        (Some(l), Some(r)) if l == r => None,
        _ => Some(format!(
            "triple {:?} reorders inconsistently",
            w.iter().map(|e| e.0).collect::<Vec<_>>()
        )),
    }
}
