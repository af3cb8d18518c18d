//! Cycline triples, local periodicity and the periodicity lattice.
//!
//! `(mu, g, nu)` is cycline when `mu (g . x) = nu x` for every infinite path
//! `x` from `s(nu)`. Infinite paths are never built: after cancelling the
//! common prefix, the condition becomes a greatest fixpoint over residual
//! states `(alpha, h, beta)` with fixed degrees `p`, `q` and `p ^ q = 0`.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::action::{ActionError, ActionSystem, GroupElement};
use crate::kgraph::{Degree, EdgeIdx, KGraph, Path, VertexId};
use crate::lattice::IntLattice;
use crate::models::box_points;
use crate::perron::{rho_kernel_contains, spectral_data, PerronData, PerronError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeriodicityError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("membership is not closed inside the box: {0}")]
    BoxClosureViolation(String),
    #[error(transparent)]
    Perron(#[from] PerronError),
}

impl PeriodicityError {
    /// True when the failure comes from a configured cap.
    pub fn is_closure_exceeded(&self) -> bool {
        matches!(self, PeriodicityError::Action(ActionError::ClosureExceeded { .. }))
    }
}

pub const DEFAULT_STATE_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CyclineState {
    pub alpha: Path,
    pub h: GroupElement,
    pub beta: Path,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclineCertificate {
    pub verdict: bool,
    /// The triple after cancelling the common prefix of degree
    /// `d(mu) ^ d(nu)`; absent when those prefixes differ.
    pub reduced: Option<CyclineState>,
    /// When the verdict is true: every state reachable from the reduced
    /// triple, all of which survive. Sorted.
    pub states: Vec<CyclineState>,
    /// When the verdict is false after reduction: a reachable state with a
    /// failing one-step obligation. Any such state removes every state that
    /// reaches it, the reduced triple included.
    pub failure: Option<CyclineState>,
}

/// One step of the residual comparison along the edge `e` at `s(beta)`:
/// the successor state, or `None` when the first letters disagree.
fn step(
    sys: &ActionSystem,
    st: &CyclineState,
    e: EdgeIdx,
) -> Option<CyclineState> {
    let g = sys.graph();
    let unit = Degree::unit(g.k(), g.color(e));
    let (he, next_h) = sys.act_restrict_edge(st.h, e);
    let left = g.compose(&st.alpha, &g.edge_path(he)).ok()?;
    let right = g
        .compose(&st.beta, &g.edge_path(e))
        .expect("e has range s(beta)");
    if g.prefix(&left, &unit).ok()? != g.prefix(&right, &unit).expect("unit <= d(beta e)") {
        return None;
    }
    let lp = st.alpha.degree() + &unit;
    let rq = st.beta.degree() + &unit;
    Some(CyclineState {
        alpha: g.segment(&left, &unit, &lp).expect("in range"),
        h: next_h,
        beta: g.segment(&right, &unit, &rq).expect("in range"),
    })
}

/// Decides whether `(mu, g, nu)` is cycline.
pub fn is_cycline(
    sys: &ActionSystem,
    mu: &Path,
    g: GroupElement,
    nu: &Path,
) -> Result<CyclineCertificate, PeriodicityError> {
    is_cycline_capped(sys, mu, g, nu, DEFAULT_STATE_CAP)
}

pub fn is_cycline_capped(
    sys: &ActionSystem,
    mu: &Path,
    g: GroupElement,
    nu: &Path,
    state_cap: usize,
) -> Result<CyclineCertificate, PeriodicityError> {
    let graph = sys.graph();
    if mu.source() != sys.act_vertex(g, nu.source()) {
        return Err(PeriodicityError::PreconditionViolated(format!(
            "s(mu) = {} but g . s(nu) = {}",
            mu.source(),
            sys.act_vertex(g, nu.source())
        )));
    }
    let rejected = CyclineCertificate {
        verdict: false,
        reduced: None,
        states: Vec::new(),
        failure: None,
    };
    let c = mu.degree().meet(nu.degree());
    if mu.range() != nu.range()
        || graph.prefix(mu, &c).expect("c <= d(mu)") != graph.prefix(nu, &c).expect("c <= d(nu)")
    {
        return Ok(rejected);
    }
    let start = CyclineState {
        alpha: graph.segment(mu, &c, mu.degree()).expect("in range"),
        h: g,
        beta: graph.segment(nu, &c, nu.degree()).expect("in range"),
    };
    let mut seen: HashSet<CyclineState> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(st) = queue.pop_front() {
        for color in 1..=graph.k() {
            for &e in graph.edges_into(st.beta.source(), color) {
                match step(sys, &st, e) {
                    None => {
                        return Ok(CyclineCertificate {
                            verdict: false,
                            reduced: Some(start),
                            states: Vec::new(),
                            failure: Some(st),
                        })
                    }
                    Some(next) => {
                        if !seen.contains(&next) {
                            if seen.len() >= state_cap {
                                return Err(ActionError::ClosureExceeded {
                                    cap: state_cap,
                                    what: "cycline states",
                                }
                                .into());
                            }
                            seen.insert(next.clone());
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
    }
    let mut states: Vec<CyclineState> = seen.into_iter().collect();
    states.sort();
    Ok(CyclineCertificate {
        verdict: true,
        reduced: Some(start),
        states,
        failure: None,
    })
}

/// The first path of degree `n` with range `v` in enumeration order.
fn first_path(graph: &KGraph, v: VertexId, n: &Degree) -> Path {
    let mut at = v;
    let mut word = Vec::with_capacity(n.total());
    for c in n.colors() {
        let e = graph.edges_into(at, c)[0];
        word.push(e);
        at = graph.edge(e).source;
    }
    graph.path_from_canonical(word, v)
}

/// The only paths `nu` of degree `n` for which `(mu, g, nu)` can be
/// cycline: `nu` must be the degree-`n` prefix of `mu (g . lambda)` for
/// any `lambda` of degree `n` at `s(nu)`.
fn partner_candidates(sys: &ActionSystem, mu: &Path, g: GroupElement, n: &Degree) -> Vec<Path> {
    let graph = sys.graph();
    let mut out = Vec::new();
    for w in graph.vertices() {
        if sys.act_vertex(g, w) != mu.source() {
            continue;
        }
        let lambda = first_path(graph, w, n);
        let Ok(long) = graph.compose(mu, &sys.act_path(g, &lambda)) else {
            continue;
        };
        let nu = graph.prefix(&long, n).expect("n <= d(mu) + n");
        if nu.source() == w {
            out.push(nu);
        }
    }
    out
}

/// All cycline triples `(mu, g, nu)` with `d(mu) = m`, `d(nu) = n` and `g`
/// in `group`, sorted.
pub fn cycline_triples(
    sys: &ActionSystem,
    m: &Degree,
    n: &Degree,
    group: &[GroupElement],
) -> Result<Vec<(Path, GroupElement, Path)>, PeriodicityError> {
    let mut out = Vec::new();
    for mu in sys.graph().paths_of_degree(m, None, None) {
        for &g in group {
            for nu in partner_candidates(sys, &mu, g, n) {
                if is_cycline(sys, &mu, g, &nu)?.verdict {
                    out.push((mu.clone(), g, nu));
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Some cycline triple of degrees `(m, n)`, trying `group` in order.
pub fn find_cycline_triple(
    sys: &ActionSystem,
    m: &Degree,
    n: &Degree,
    group: &[GroupElement],
) -> Result<Option<(Path, GroupElement, Path)>, PeriodicityError> {
    for mu in sys.graph().paths_of_degree(m, None, None) {
        for &g in group {
            for nu in partner_candidates(sys, &mu, g, n) {
                if is_cycline(sys, &mu, g, &nu)?.verdict {
                    return Ok(Some((mu, g, nu)));
                }
            }
        }
    }
    Ok(None)
}

/// Whether `sigma^p(x) = sigma^q(g . x)` for every infinite path `x` from `v`.
pub fn sigma_contains(
    sys: &ActionSystem,
    p: &Degree,
    q: &Degree,
    g: GroupElement,
    v: VertexId,
) -> Result<bool, PeriodicityError> {
    let graph = sys.graph();
    let top = p.join(q);
    for kappa in graph.paths_of_degree(&top, Some(v), None) {
        let (gk, h) = sys.act_restrict_path(g, &kappa);
        let mu = graph.segment(&gk, q, &top).expect("q <= p v q");
        let nu = graph.segment(&kappa, p, &top).expect("p <= p v q");
        if !is_cycline(sys, &mu, h, &nu)?.verdict {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeriodicityParams {
    /// Sup-norm radius of the searched box in `Z^k`.
    pub box_radius: u32,
    /// Word length of the group elements whose restriction closure is
    /// searched for witnesses.
    pub ball_radius: usize,
    /// Tolerance on `|rho^z - 1|` when `rho` is not integral.
    pub tol: f64,
}

impl Default for PeriodicityParams {
    fn default() -> Self {
        PeriodicityParams {
            box_radius: 4,
            ball_radius: 3,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicityLattice {
    pub lattice: IntLattice,
    /// Members found inside the box, sorted.
    pub members: Vec<Vec<i64>>,
    pub box_radius: u32,
    pub ball_radius: usize,
    /// Size of the witness set `H_L`.
    pub witness_states: usize,
}

impl PeriodicityLattice {
    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        self.lattice.basis()
    }

    /// `(R, L)`: membership through elements outside `H_L` or vectors
    /// outside the box is not excluded.
    pub fn completeness(&self) -> (u32, usize) {
        (self.box_radius, self.ball_radius)
    }
}

/// `H_L`: the restriction closure of all words of length at most `radius`,
/// identity first, then in handle order.
pub fn witness_group(sys: &ActionSystem, radius: usize) -> Result<Vec<GroupElement>, ActionError> {
    let ball = sys.ball(radius)?;
    let mut closure = sys.restriction_closure(&ball, sys.caps().max_states)?;
    closure.sort_by_key(|g| (!g.is_identity(), *g));
    Ok(closure)
}

/// `p = z v 0` and `q = (-z) v 0`.
pub fn split(z: &[i64]) -> (Degree, Degree) {
    let neg: Vec<i64> = z.iter().map(|x| -x).collect();
    (Degree::positive_part(z), Degree::positive_part(&neg))
}

/// Whether some cycline triple in `group` has degree difference `z`.
pub fn per_contains(
    sys: &ActionSystem,
    z: &[i64],
    group: &[GroupElement],
) -> Result<bool, PeriodicityError> {
    let (p, q) = split(z);
    Ok(find_cycline_triple(sys, &p, &q, group)?.is_some())
}

/// The periodicity lattice searched inside the box, with the Perron data
/// used for the `rho^z = 1` prefilter.
pub fn periodicity_group(
    sys: &ActionSystem,
    params: &PeriodicityParams,
) -> Result<PeriodicityLattice, PeriodicityError> {
    let pd = spectral_data(sys.graph(), crate::perron::DEFAULT_TOL, crate::perron::DEFAULT_MAX_ITER)?;
    periodicity_group_with(sys, &pd, params)
}

pub fn periodicity_group_with(
    sys: &ActionSystem,
    pd: &PerronData,
    params: &PeriodicityParams,
) -> Result<PeriodicityLattice, PeriodicityError> {
    let k = sys.k();
    let group = witness_group(sys, params.ball_radius)?;
    let r = params.box_radius as i64;
    let mut members = BTreeSet::new();
    for z in box_points(k, r) {
        if rho_kernel_contains(pd, &z, params.tol) && per_contains(sys, &z, &group)? {
            members.insert(z);
        }
    }
    for a in &members {
        let neg: Vec<i64> = a.iter().map(|x| -x).collect();
        if !members.contains(&neg) {
            return Err(PeriodicityError::BoxClosureViolation(format!(
                "{a:?} is a member but its negative is not"
            )));
        }
        for b in &members {
            let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            if sum.iter().all(|x| x.abs() <= r) && !members.contains(&sum) {
                return Err(PeriodicityError::BoxClosureViolation(format!(
                    "{a:?} and {b:?} are members but their sum is not"
                )));
            }
        }
    }
    let members: Vec<Vec<i64>> = members.into_iter().collect();
    Ok(PeriodicityLattice {
        lattice: IntLattice::from_generators(k, members.iter().cloned()),
        members,
        box_radius: params.box_radius,
        ball_radius: params.ball_radius,
        witness_states: group.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AperiodicityVerdict {
    pub aperiodic: bool,
    /// A periodic verdict is final; an aperiodic one holds relative to
    /// `(box_radius, ball_radius)`.
    pub definitive: bool,
    pub box_radius: u32,
    pub ball_radius: usize,
}

pub fn is_g_aperiodic(
    sys: &ActionSystem,
    params: &PeriodicityParams,
) -> Result<AperiodicityVerdict, PeriodicityError> {
    let lat = periodicity_group(sys, params)?;
    Ok(AperiodicityVerdict {
        aperiodic: lat.rank() == 0,
        definitive: lat.rank() > 0,
        box_radius: params.box_radius,
        ball_radius: params.ball_radius,
    })
}
