//! The dense *-algebra spanned by monomials `s_mu u_g s_nu^*`.
//!
//! Elements are finite formal sums of monomials in normal form. Products
//! expand `s_nu^* s_alpha` over minimal common extensions, so the relation
//! `u_g s_mu = s_{g.mu} u_{g|_mu}` is never applied as a rewrite rule.
//! Two elements are compared after expanding every monomial along its right
//! path to a common degree with the Cuntz-Krieger sum relation.

mod scalar;

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub use scalar::{gauss_one, gauss_ratio, GaussRational, Scalar, FLOAT_EQ_TOL};

use crate::action::{ActionError, ActionSystem, GroupElement};
use crate::kgraph::{Degree, EdgeIdx, Path, VertexId};
use crate::periodicity::{cycline_triples, is_cycline, PeriodicityError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Periodicity(#[from] PeriodicityError),
    #[error("invalid monomial: {0}")]
    InvalidMonomial(String),
    #[error("no cycline triples of degrees {m} and {n}")]
    NotPeriodic { m: Degree, n: Degree },
}

/// `s_mu u_g s_nu^*` with `s(mu) = g . s(nu)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Monomial {
    pub mu: Path,
    pub g: GroupElement,
    pub nu: Path,
}

impl Monomial {
    pub fn new(sys: &ActionSystem, mu: Path, g: GroupElement, nu: Path) -> Result<Self, AlgebraError> {
        if mu.source() != sys.act_vertex(g, nu.source()) {
            return Err(AlgebraError::InvalidMonomial(format!(
                "s(mu) = {} differs from g . s(nu) = {}",
                mu.source(),
                sys.act_vertex(g, nu.source())
            )));
        }
        Ok(Monomial { mu, g, nu })
    }

    /// The vertex projection `s_v`.
    pub fn vertex(sys: &ActionSystem, v: VertexId) -> Self {
        let p = sys.graph().vertex_path(v);
        Monomial {
            mu: p.clone(),
            g: GroupElement::IDENTITY,
            nu: p,
        }
    }

    /// `s_e`.
    pub fn edge(sys: &ActionSystem, e: EdgeIdx) -> Self {
        let g = sys.graph();
        Monomial {
            mu: g.edge_path(e),
            g: GroupElement::IDENTITY,
            nu: g.vertex_path(g.edge(e).source),
        }
    }

    /// `s_mu` as a monomial.
    pub fn path(sys: &ActionSystem, mu: &Path) -> Self {
        Monomial {
            mu: mu.clone(),
            g: GroupElement::IDENTITY,
            nu: sys.graph().vertex_path(mu.source()),
        }
    }

    /// `s_mu s_mu^*`.
    pub fn projection(mu: &Path) -> Self {
        Monomial {
            mu: mu.clone(),
            g: GroupElement::IDENTITY,
            nu: mu.clone(),
        }
    }

    /// `d(mu) - d(nu)`.
    pub fn degree_difference(&self) -> Vec<i64> {
        self.mu.degree().diff(self.nu.degree())
    }
}

/// Products of two monomials: a sum of monomials with coefficient one.
pub fn monomial_product(
    sys: &ActionSystem,
    a: &Monomial,
    b: &Monomial,
) -> Result<Vec<Monomial>, ActionError> {
    let graph = sys.graph();
    let pairs = graph.lambda_min(&a.nu, &b.mu);
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let h_inv = sys.inverse(b.g)?;
    let mut out = Vec::with_capacity(pairs.len());
    for (lambda, omega) in pairs {
        let (g_lambda, g_rest) = sys.act_restrict_path(a.g, &lambda);
        let (h_omega, h_inv_rest) = sys.act_restrict_path(h_inv, &omega);
        let middle = sys.multiply(g_rest, sys.inverse(h_inv_rest)?)?;
        out.push(Monomial {
            mu: graph.compose(&a.mu, &g_lambda).expect("s(mu) = r(g . lambda)"),
            g: middle,
            nu: graph.compose(&b.nu, &h_omega).expect("s(beta) = r(h^-1 . omega)"),
        });
    }
    Ok(out)
}

/// A finite linear combination of monomials; zero coefficients are dropped.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement<C> {
    terms: BTreeMap<Monomial, C>,
}

pub type Element = AlgebraElement<Complex64>;
pub type ExactElement = AlgebraElement<GaussRational>;

impl<C: Scalar> fmt::Debug for AlgebraElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.terms.iter().map(|(m, c)| {
                let label = format!("({:?}, {}, {:?})", m.mu.edges(), m.g, m.nu.edges());
                (label, c.clone())
            }))
            .finish()
    }
}

impl<C: Scalar> Default for AlgebraElement<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Scalar> AlgebraElement<C> {
    pub fn zero() -> Self {
        AlgebraElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_monomial(m: Monomial) -> Self {
        Self::from_term(m, C::one())
    }

    pub fn from_term(m: Monomial, c: C) -> Self {
        let mut out = Self::zero();
        out.add_term(m, c);
        out
    }

    /// `sum_v s_v`.
    pub fn identity(sys: &ActionSystem) -> Self {
        let mut out = Self::zero();
        for v in sys.graph().vertices() {
            out.add_term(Monomial::vertex(sys, v), C::one());
        }
        out
    }

    /// `u_g = sum_v s_v u_g s_{g^-1 . v}^*`.
    pub fn unitary(sys: &ActionSystem, g: GroupElement) -> Result<Self, ActionError> {
        let inv = sys.inverse(g)?;
        let graph = sys.graph();
        let mut out = Self::zero();
        for v in graph.vertices() {
            let w = sys.act_vertex(inv, v);
            out.add_term(
                Monomial {
                    mu: graph.vertex_path(v),
                    g,
                    nu: graph.vertex_path(w),
                },
                C::one(),
            );
        }
        Ok(out)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                if !c.is_negligible() {
                    slot.insert(c);
                }
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get().clone() + c;
                if sum.is_negligible() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x.clone() * c.clone());
        }
        out
    }

    /// Multiplies each coefficient by a value depending on its monomial.
    pub fn map_terms(&self, f: impl Fn(&Monomial, &C) -> C) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(m, c));
        }
        out
    }

    pub fn multiply(&self, sys: &ActionSystem, other: &Self) -> Result<Self, ActionError> {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let c = ca.clone() * cb.clone();
                for m in monomial_product(sys, a, b)? {
                    out.add_term(m, c.clone());
                }
            }
        }
        Ok(out)
    }

    /// `(s_mu u_g s_nu^*)^* = s_nu u_{g^-1} s_mu^*`, conjugate linearly.
    pub fn adjoint(&self, sys: &ActionSystem) -> Result<Self, ActionError> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(
                Monomial {
                    mu: m.nu.clone(),
                    g: sys.inverse(m.g)?,
                    nu: m.mu.clone(),
                },
                c.conjugate(),
            );
        }
        Ok(out)
    }

    /// Rewrites every monomial with `d(nu) <= n` as the sum over
    /// `lambda in s(nu) Lambda^{n - d(nu)}` of
    /// `s_{mu (g . lambda)} u_{g|_lambda} s_{nu lambda}^*`.
    pub fn expand_to(&self, sys: &ActionSystem, n: &Degree) -> Self {
        let graph = sys.graph();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let Some(rest) = n.checked_sub(m.nu.degree()) else {
                out.add_term(m.clone(), c.clone());
                continue;
            };
            for lambda in graph.paths_of_degree(&rest, Some(m.nu.source()), None) {
                let (gl, h) = sys.act_restrict_path(m.g, &lambda);
                out.add_term(
                    Monomial {
                        mu: graph.compose(&m.mu, &gl).expect("s(mu) = r(g . lambda)"),
                        g: h,
                        nu: graph.compose(&m.nu, &lambda).expect("lambda starts at s(nu)"),
                    },
                    c.clone(),
                );
            }
        }
        out
    }

    fn right_degree_join(&self, k: usize) -> Degree {
        self.terms
            .keys()
            .fold(Degree::zero(k), |acc, m| acc.join(m.nu.degree()))
    }

    /// Equality after expanding both sides to a common right degree.
    pub fn equivalent(&self, sys: &ActionSystem, other: &Self) -> bool {
        let n = self
            .right_degree_join(sys.k())
            .join(&other.right_degree_join(sys.k()));
        self.expand_to(sys, &n).sub(&other.expand_to(sys, &n)).is_empty()
    }

    /// Componentwise conversion of the coefficients.
    pub fn convert<D: Scalar>(&self, f: impl Fn(&C) -> D) -> AlgebraElement<D> {
        let mut out = AlgebraElement::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

/// `V_{m,n}`: the sum of all cycline monomials of degrees `(m, n)` with
/// group part in `group`.
pub fn periodicity_unitary<C: Scalar>(
    sys: &ActionSystem,
    m: &Degree,
    n: &Degree,
    group: &[GroupElement],
) -> Result<AlgebraElement<C>, AlgebraError> {
    let triples = cycline_triples(sys, m, n, group)?;
    if triples.is_empty() {
        return Err(AlgebraError::NotPeriodic {
            m: m.clone(),
            n: n.clone(),
        });
    }
    let mut out = AlgebraElement::zero();
    for (mu, g, nu) in triples {
        out.add_term(Monomial { mu, g, nu }, C::one());
    }
    Ok(out)
}

/// Memoized cycline decisions for monomials.
#[derive(Debug, Default)]
pub struct CyclineCache {
    known: HashMap<Monomial, bool>,
}

impl CyclineCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_cycline(&mut self, sys: &ActionSystem, m: &Monomial) -> Result<bool, PeriodicityError> {
        if let Some(&b) = self.known.get(m) {
            return Ok(b);
        }
        let b = is_cycline(sys, &m.mu, m.g, &m.nu)?.verdict;
        self.known.insert(m.clone(), b);
        Ok(b)
    }
}

/// Keeps exactly the cycline monomials.
pub fn expectation<C: Scalar>(
    sys: &ActionSystem,
    a: &AlgebraElement<C>,
) -> Result<AlgebraElement<C>, PeriodicityError> {
    expectation_cached(sys, a, &mut CyclineCache::new())
}

pub fn expectation_cached<C: Scalar>(
    sys: &ActionSystem,
    a: &AlgebraElement<C>,
    cache: &mut CyclineCache,
) -> Result<AlgebraElement<C>, PeriodicityError> {
    let mut out = AlgebraElement::zero();
    for (m, c) in a.terms() {
        if cache.is_cycline(sys, m)? {
            out.add_term(m.clone(), c.clone());
        }
    }
    Ok(out)
}

/// Whether `a` commutes with every edge monomial, vertex projection and
/// generator unitary.
pub fn is_central_on_generators<C: Scalar>(
    sys: &ActionSystem,
    a: &AlgebraElement<C>,
) -> Result<bool, ActionError> {
    let graph = sys.graph();
    let mut tests: Vec<AlgebraElement<C>> = Vec::new();
    for e in graph.edge_indices() {
        tests.push(AlgebraElement::from_monomial(Monomial::edge(sys, e)));
    }
    for v in graph.vertices() {
        tests.push(AlgebraElement::from_monomial(Monomial::vertex(sys, v)));
    }
    for &g in sys.generators() {
        tests.push(AlgebraElement::unitary(sys, g)?);
    }
    for x in &tests {
        if !a.multiply(sys, x)?.equivalent(sys, &x.multiply(sys, a)?) {
            return Ok(false);
        }
    }
    Ok(true)
}
