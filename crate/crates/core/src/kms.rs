//! KMS states at inverse temperature one for the preferred dynamics.
//!
//! A state is determined by the Perron data and a trace on the group ring
//! of the periodicity lattice. On a monomial it is `0` off the cycline
//! triples and `rho^{-d(mu)} x(s(mu)) tau(d(mu) - d(nu))` on them.

use std::f64::consts::TAU;
use std::sync::Mutex;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::action::{ActionError, ActionSystem, GroupElement};
use crate::algebra::{AlgebraElement, CyclineCache, Element, Monomial, Scalar};
use crate::kgraph::{Degree, Path};
use crate::lattice::IntLattice;
use crate::periodicity::{periodicity_group_with, PeriodicityError, PeriodicityLattice, PeriodicityParams};
use crate::perron::{
    check_g_invariance, pf_state_value, rho_power, spectral_data, InvarianceCheck, PerronData, PerronError,
    DEFAULT_MAX_ITER, DEFAULT_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KmsError {
    #[error("KMS simplex is empty: the Perron vector is not invariant under the group")]
    SimplexEmpty,
    #[error("degree difference {0:?} of a cycline monomial lies outside the computed lattice")]
    NotInLattice(Vec<i64>),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Periodicity(#[from] PeriodicityError),
    #[error(transparent)]
    Perron(#[from] PerronError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    /// `tau(z) = [z = 0]`.
    Haar,
    /// `tau(z) = exp(2 pi i theta . coords(z))`.
    Character(Vec<f64>),
    /// Convex combination of characters.
    Mixture(Vec<(f64, Vec<f64>)>),
}

/// A trace on the group algebra of a lattice, in coordinates of its
/// Hermite basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSpec {
    lattice: IntLattice,
    kind: TraceKind,
}

fn check_theta(theta: &[f64], rank: usize) -> Result<(), KmsError> {
    if theta.len() != rank {
        return Err(KmsError::InvalidTrace(format!(
            "expected {rank} angles, got {}",
            theta.len()
        )));
    }
    if let Some(t) = theta.iter().find(|t| !(0.0..1.0).contains(*t)) {
        return Err(KmsError::InvalidTrace(format!("angle {t} outside [0, 1)")));
    }
    Ok(())
}

fn character(theta: &[f64], coords: &[i64]) -> Complex64 {
    let phase: f64 = theta.iter().zip(coords).map(|(t, &c)| t * c as f64).sum();
    Complex64::from_polar(1.0, TAU * phase)
}

impl TraceSpec {
    pub fn new(lattice: IntLattice, kind: TraceKind) -> Result<Self, KmsError> {
        let rank = lattice.rank();
        match &kind {
            TraceKind::Haar => {}
            TraceKind::Character(theta) => check_theta(theta, rank)?,
            TraceKind::Mixture(parts) => {
                if parts.is_empty() {
                    return Err(KmsError::InvalidTrace("empty mixture".into()));
                }
                for (w, theta) in parts {
                    if !(*w >= 0.0) {
                        return Err(KmsError::InvalidTrace(format!("negative weight {w}")));
                    }
                    check_theta(theta, rank)?;
                }
                let total: f64 = parts.iter().map(|(w, _)| w).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(KmsError::InvalidTrace(format!("weights sum to {total}")));
                }
            }
        }
        Ok(TraceSpec { lattice, kind })
    }

    pub fn haar(lattice: IntLattice) -> Self {
        TraceSpec {
            lattice,
            kind: TraceKind::Haar,
        }
    }

    pub fn kind(&self) -> &TraceKind {
        &self.kind
    }

    pub fn lattice(&self) -> &IntLattice {
        &self.lattice
    }

    pub fn value(&self, z: &[i64]) -> Result<Complex64, KmsError> {
        let coords = self
            .lattice
            .coords(z)
            .ok_or_else(|| KmsError::NotInLattice(z.to_vec()))?;
        Ok(match &self.kind {
            TraceKind::Haar => {
                if coords.iter().all(|&c| c == 0) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            TraceKind::Character(theta) => character(theta, &coords),
            TraceKind::Mixture(parts) => parts.iter().map(|(w, theta)| character(theta, &coords) * w).sum(),
        })
    }
}

pub struct KmsState {
    perron: PerronData,
    lattice: PeriodicityLattice,
    trace: TraceSpec,
    invariance: InvarianceCheck,
    cache: Mutex<CyclineCache>,
}

impl std::fmt::Debug for KmsState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KmsState")
            .field("rho", &self.perron.rho)
            .field("basis", &self.lattice.basis())
            .field("trace", &self.trace.kind)
            .field("exists", &self.invariance.holds)
            .finish()
    }
}

impl KmsState {
    /// Assembles a state from precomputed data. `tol` bounds
    /// `|x(g.v) - x(v)|` in the invariance check.
    pub fn from_parts(
        sys: &ActionSystem,
        perron: PerronData,
        lattice: PeriodicityLattice,
        kind: TraceKind,
        tol: f64,
    ) -> Result<Self, KmsError> {
        let trace = TraceSpec::new(lattice.lattice.clone(), kind)?;
        let invariance = check_g_invariance(&perron, sys, tol);
        Ok(KmsState {
            perron,
            lattice,
            trace,
            invariance,
            cache: Mutex::new(CyclineCache::new()),
        })
    }

    /// Computes Perron data and the periodicity lattice, then fixes the
    /// trace.
    pub fn new(sys: &ActionSystem, params: &PeriodicityParams, kind: TraceKind) -> Result<Self, KmsError> {
        let perron = spectral_data(sys.graph(), DEFAULT_TOL, DEFAULT_MAX_ITER)?;
        let lattice = periodicity_group_with(sys, &perron, params)?;
        Self::from_parts(sys, perron, lattice, kind, params.tol)
    }

    pub fn exists(&self) -> bool {
        self.invariance.holds
    }

    pub fn invariance(&self) -> &InvarianceCheck {
        &self.invariance
    }

    pub fn perron(&self) -> &PerronData {
        &self.perron
    }

    pub fn lattice(&self) -> &PeriodicityLattice {
        &self.lattice
    }

    pub fn trace(&self) -> &TraceSpec {
        &self.trace
    }

    fn require(&self) -> Result<(), KmsError> {
        if self.exists() {
            Ok(())
        } else {
            Err(KmsError::SimplexEmpty)
        }
    }

    pub fn evaluate_monomial(&self, sys: &ActionSystem, m: &Monomial) -> Result<Complex64, KmsError> {
        self.require()?;
        let cycline = self
            .cache
            .lock()
            .expect("cache lock poisoned")
            .is_cycline(sys, m)?;
        if !cycline {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let tau = self.trace.value(&m.degree_difference())?;
        Ok(tau * pf_state_value(&self.perron, &m.mu))
    }

    pub fn evaluate<C: Scalar>(&self, sys: &ActionSystem, a: &AlgebraElement<C>) -> Result<Complex64, KmsError> {
        self.require()?;
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in a.terms() {
            let v = self.evaluate_monomial(sys, m)?;
            if v.norm() > 0.0 {
                total += c.to_complex() * v;
            }
        }
        Ok(total)
    }

    /// The dynamics at the imaginary unit: each monomial is multiplied by
    /// `rho^{-(d(mu) - d(nu))}`.
    pub fn scale(&self, a: &Element) -> Element {
        a.map_terms(|m, c| {
            let z: Vec<i64> = m.degree_difference().iter().map(|d| -d).collect();
            c * rho_power(&self.perron, &z)
        })
    }
}

/// Random and exhaustive monomials with bounded degrees and group parts
/// drawn from a ball.
pub struct MonomialSampler {
    paths: Vec<Path>,
    group: Vec<GroupElement>,
}

impl MonomialSampler {
    pub fn new(sys: &ActionSystem, max_degree: u32, ball_radius: usize) -> Result<Self, ActionError> {
        let graph = sys.graph();
        let mut paths = Vec::new();
        for d in Degree::splat(sys.k(), max_degree).below() {
            paths.extend(graph.paths_of_degree(&d, None, None));
        }
        Ok(MonomialSampler {
            paths,
            group: sys.ball(ball_radius)?,
        })
    }

    /// Every monomial `(mu, g, nu)` in range, in a fixed order.
    pub fn all(&self, sys: &ActionSystem) -> Result<Vec<Monomial>, ActionError> {
        let mut out = Vec::new();
        for mu in &self.paths {
            for &g in &self.group {
                let w = sys.act_vertex(sys.inverse(g)?, mu.source());
                for nu in self.paths.iter().filter(|nu| nu.source() == w) {
                    out.push(Monomial {
                        mu: mu.clone(),
                        g,
                        nu: nu.clone(),
                    });
                }
            }
        }
        Ok(out)
    }

    pub fn sample<R: Rng>(&self, sys: &ActionSystem, rng: &mut R) -> Result<Monomial, ActionError> {
        loop {
            let mu = self.paths.choose(rng).expect("at least the vertex paths");
            let g = *self.group.choose(rng).expect("ball contains the identity");
            let w = sys.act_vertex(sys.inverse(g)?, mu.source());
            let candidates: Vec<&Path> = self.paths.iter().filter(|nu| nu.source() == w).collect();
            if let Some(nu) = candidates.choose(rng) {
                return Ok(Monomial {
                    mu: mu.clone(),
                    g,
                    nu: (*nu).clone(),
                });
            }
        }
    }

    /// A random combination of up to `max_terms` monomials with complex
    /// coefficients in the unit square.
    pub fn sample_element<R: Rng>(
        &self,
        sys: &ActionSystem,
        rng: &mut R,
        max_terms: usize,
    ) -> Result<Element, ActionError> {
        let mut out = Element::zero();
        for _ in 0..rng.gen_range(1..=max_terms) {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            out.add_term(self.sample(sys, rng)?, c);
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyParams {
    /// Every pair of monomials with path degrees at most this in each
    /// color is checked.
    pub exhaustive_degree: u32,
    /// Random pairs are drawn with path degrees at most this.
    pub random_degree: u32,
    pub samples: usize,
    pub seed: u64,
    /// Group parts are drawn from the ball of this word length.
    pub ball_radius: usize,
    pub tol: f64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            exhaustive_degree: 1,
            random_degree: 2,
            samples: 500,
            seed: 0,
            ball_radius: 1,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KmsReport {
    pub pairs: usize,
    pub max_deviation: f64,
    pub passed: bool,
    /// `(x, y)` attaining the maximal deviation.
    pub worst: Option<(Monomial, Monomial)>,
}

fn kms_deviation(state: &KmsState, sys: &ActionSystem, x: &Monomial, y: &Monomial) -> Result<f64, KmsError> {
    let x = Element::from_monomial(x.clone());
    let y = Element::from_monomial(y.clone());
    let lhs = state.evaluate(sys, &x.multiply(sys, &y)?)?;
    let rhs = state.evaluate(sys, &y.multiply(sys, &state.scale(&x))?)?;
    Ok((lhs - rhs).norm())
}

/// Checks `phi(xy) = phi(y sigma_i(x))` on monomial pairs.
pub fn verify_kms(state: &KmsState, sys: &ActionSystem, params: &VerifyParams) -> Result<KmsReport, KmsError> {
    state.require()?;
    let mut report = KmsReport {
        pairs: 0,
        max_deviation: 0.0,
        passed: true,
        worst: None,
    };
    let mut record = |x: &Monomial, y: &Monomial, d: f64| {
        report.pairs += 1;
        if d > report.max_deviation || report.worst.is_none() {
            report.max_deviation = report.max_deviation.max(d);
            report.worst = Some((x.clone(), y.clone()));
        }
    };
    let small = MonomialSampler::new(sys, params.exhaustive_degree, params.ball_radius)?.all(sys)?;
    for x in &small {
        for y in &small {
            record(x, y, kms_deviation(state, sys, x, y)?);
        }
    }
    let sampler = MonomialSampler::new(sys, params.random_degree, params.ball_radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..params.samples {
        let x = sampler.sample(sys, &mut rng)?;
        let y = sampler.sample(sys, &mut rng)?;
        record(&x, &y, kms_deviation(state, sys, &x, &y)?);
    }
    report.passed = report.max_deviation < params.tol;
    Ok(report)
}

pub const UNIQUE_VERDICT: &str = "unique KMS state";
pub const EMPTY_VERDICT: &str = "KMS simplex empty";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexSummary {
    pub exists: bool,
    pub rank: usize,
    pub basis: Vec<Vec<i64>>,
    pub verdict: String,
    pub box_radius: u32,
    pub ball_radius: usize,
    /// First `(generator, vertex, |x(g.v) - x(v)|)` breaking invariance.
    pub invariance_witness: Option<(String, crate::kgraph::VertexId, f64)>,
}

pub fn simplex_verdict(exists: bool, rank: usize) -> String {
    if !exists {
        EMPTY_VERDICT.to_string()
    } else if rank == 0 {
        UNIQUE_VERDICT.to_string()
    } else {
        format!("simplex ≅ traces on C*(Z^{rank}) ≅ probability measures on the {rank}-torus")
    }
}

pub fn summarize(perron: &PerronData, lattice: &PeriodicityLattice, sys: &ActionSystem, tol: f64) -> SimplexSummary {
    let inv = check_g_invariance(perron, sys, tol);
    SimplexSummary {
        exists: inv.holds,
        rank: lattice.rank(),
        basis: lattice.basis().to_vec(),
        verdict: simplex_verdict(inv.holds, lattice.rank()),
        box_radius: lattice.box_radius,
        ball_radius: lattice.ball_radius,
        invariance_witness: inv.witness,
    }
}

pub fn simplex_summary(sys: &ActionSystem, params: &PeriodicityParams) -> Result<SimplexSummary, KmsError> {
    let perron = spectral_data(sys.graph(), DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    let lattice = periodicity_group_with(sys, &perron, params)?;
    Ok(summarize(&perron, &lattice, sys, params.tol))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagonalCheck {
    pub checked: usize,
    /// Largest `|phi(s_mu s_mu^*) - rho^{-d(mu)} x(s(mu))|`.
    pub max_deviation: f64,
    /// Largest `|phi(s_{g.v}) - phi(s_v)|` over generators and vertices.
    pub invariance_deviation: f64,
}

/// Compares the state on projections of degree at most `(2, ..., 2)` with
/// the Perron-Frobenius state of the graph.
pub fn restrict_to_diagonal(state: &KmsState, sys: &ActionSystem) -> Result<DiagonalCheck, KmsError> {
    state.require()?;
    let graph = sys.graph();
    let mut out = DiagonalCheck {
        checked: 0,
        max_deviation: 0.0,
        invariance_deviation: 0.0,
    };
    for d in Degree::splat(sys.k(), 2).below() {
        for mu in graph.paths_of_degree(&d, None, None) {
            let v = state.evaluate_monomial(sys, &Monomial::projection(&mu))?;
            let dev = (v - pf_state_value(&state.perron, &mu)).norm();
            out.max_deviation = out.max_deviation.max(dev);
            out.checked += 1;
        }
    }
    for &g in sys.generators() {
        for v in graph.vertices() {
            let a = state.evaluate_monomial(sys, &Monomial::vertex(sys, sys.act_vertex(g, v)))?;
            let b = state.evaluate_monomial(sys, &Monomial::vertex(sys, v))?;
            out.invariance_deviation = out.invariance_deviation.max((a - b).norm());
        }
    }
    Ok(out)
}
