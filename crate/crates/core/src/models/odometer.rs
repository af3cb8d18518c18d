//! Products of odometers: one vertex, `n_i` loops of color `i`, and `+1`
//! acting as a base-`n_i` adding machine in every color.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::action::{ActionSystem, IntegerRule};
use crate::kgraph::{Degree, EdgeIdx, GraphBuilder, KGraph, Path};
use crate::lattice::IntLattice;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OdometerSpec {
    n: Vec<u32>,
}

impl OdometerSpec {
    pub fn new(n: Vec<u32>) -> Result<Self, ModelError> {
        if n.is_empty() {
            return Err(ModelError::SpecViolation(vec!["k must be positive".into()]));
        }
        let bad: Vec<String> = n
            .iter()
            .enumerate()
            .filter(|(_, &x)| x < 2)
            .map(|(i, x)| format!("n_{} = {x} must exceed 1", i + 1))
            .collect();
        if !bad.is_empty() {
            return Err(ModelError::SpecViolation(bad));
        }
        Ok(OdometerSpec { n })
    }

    pub fn n(&self) -> &[u32] {
        &self.n
    }

    pub fn k(&self) -> usize {
        self.n.len()
    }

    /// `n^d` for a degree `d`.
    pub fn power(&self, d: &Degree) -> u128 {
        self.n
            .iter()
            .zip(d.as_slice())
            .map(|(&n, &e)| (n as u128).pow(e))
            .product()
    }
}

/// `g . x_s = x_{(g+s) mod n}` with restriction `(g+s) div n`.
#[derive(Debug)]
pub struct OdometerRule {
    n: Vec<i64>,
}

impl IntegerRule for OdometerRule {
    fn act_edge(&self, graph: &KGraph, g: i64, e: EdgeIdx) -> (EdgeIdx, i64) {
        let edge = graph.edge(e);
        let n = self.n[edge.color - 1];
        let total = g + edge.id as i64;
        let image = graph
            .edge_by_id(edge.color, total.rem_euclid(n) as u32)
            .expect("odometer edge ids cover 0..n");
        (image, total.div_euclid(n))
    }
}

/// The odometer k-graph with squares `x^i_s x^j_t = x^j_t' x^i_s'` where
/// `s + t n_i = t' + s' n_j`, and the integer action of `+1`.
pub fn build_odometer(spec: &OdometerSpec) -> ActionSystem {
    let k = spec.k();
    let mut b = GraphBuilder::new(k);
    let v = b.add_vertex("v");
    for (c, &n) in spec.n.iter().enumerate() {
        for s in 0..n {
            b.add_edge(c + 1, s, v, v).expect("fresh edge");
        }
    }
    for i in 1..=k {
        for j in i + 1..=k {
            let (ni, nj) = (spec.n[i - 1], spec.n[j - 1]);
            for s in 0..ni {
                for t in 0..nj {
                    let total = s + t * ni;
                    b.add_square((i, s), (j, t), total % nj, total / nj)
                        .expect("colors in range");
                }
            }
        }
    }
    let graph = b.build().expect("odometer squares form a k-graph");
    let rule = OdometerRule {
        n: spec.n.iter().map(|&x| x as i64).collect(),
    };
    ActionSystem::integer(graph, Arc::new(rule), "+1")
}

/// A word of one color, digits least significant first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorWord {
    pub color: usize,
    pub digits: Vec<u32>,
}

impl ColorWord {
    pub fn new(color: usize, digits: Vec<u32>) -> Self {
        ColorWord { color, digits }
    }
}

fn radix(spec: &OdometerSpec, words: &[ColorWord]) -> Result<u128, ModelError> {
    words.iter().try_fold(1u128, |acc, w| {
        let n = spec.n[w.color - 1] as u128;
        acc.checked_mul(n.pow(w.digits.len() as u32))
            .ok_or_else(|| ModelError::DomainError("mixed radix overflows".into()))
    })
}

fn value(spec: &OdometerSpec, words: &[ColorWord]) -> Result<u128, ModelError> {
    let mut total = 0u128;
    let mut scale = 1u128;
    for w in words {
        let n = spec.n[w.color - 1] as u128;
        for &d in &w.digits {
            if d as u128 >= n {
                return Err(ModelError::DomainError(format!(
                    "digit {d} out of range for color {}",
                    w.color
                )));
            }
            total += d as u128 * scale;
            scale = scale
                .checked_mul(n)
                .ok_or_else(|| ModelError::DomainError("mixed radix overflows".into()))?;
        }
    }
    Ok(total)
}

fn digits_of(spec: &OdometerSpec, mut x: u128, shape: &[ColorWord]) -> Vec<ColorWord> {
    shape
        .iter()
        .map(|w| {
            let n = spec.n[w.color - 1] as u128;
            let digits = (0..w.digits.len())
                .map(|_| {
                    let d = (x % n) as u32;
                    x /= n;
                    d
                })
                .collect();
            ColorWord::new(w.color, digits)
        })
        .collect()
}

/// Commutes `u_1 ... u_p v_1 ... v_q` into `v'_1 ... v'_q u'_1 ... u'_p` by
/// positional arithmetic: `M + N n^|u| = N' + M' n^|v|`.
pub fn odometer_commute(
    spec: &OdometerSpec,
    left: &[ColorWord],
    right: &[ColorWord],
) -> Result<(Vec<ColorWord>, Vec<ColorWord>), ModelError> {
    for w in left.iter().chain(right) {
        if w.color == 0 || w.color > spec.k() {
            return Err(ModelError::DomainError(format!("color {} out of range", w.color)));
        }
    }
    let mut lc: Vec<usize> = left.iter().map(|w| w.color).collect();
    let mut rc: Vec<usize> = right.iter().map(|w| w.color).collect();
    lc.sort_unstable();
    rc.sort_unstable();
    if lc.windows(2).any(|w| w[0] == w[1])
        || rc.windows(2).any(|w| w[0] == w[1])
        || lc.iter().any(|c| rc.contains(c))
    {
        return Err(ModelError::DomainError("color sets overlap".into()));
    }
    let m = value(spec, left)?;
    let n = value(spec, right)?;
    let total = n
        .checked_mul(radix(spec, left)?)
        .and_then(|x| x.checked_add(m))
        .ok_or_else(|| ModelError::DomainError("mixed radix overflows".into()))?;
    let nv = radix(spec, right)?;
    Ok((
        digits_of(spec, total % nv, right),
        digits_of(spec, total / nv, left),
    ))
}

/// Mixed-radix value of a canonical path, first edge least significant.
pub fn path_value(spec: &OdometerSpec, graph: &KGraph, mu: &Path) -> u128 {
    let mut total = 0u128;
    let mut scale = 1u128;
    for &e in mu.edges() {
        let edge = graph.edge(e);
        total += edge.id as u128 * scale;
        scale *= spec.n[edge.color - 1] as u128;
    }
    total
}

/// The value-preserving bijection `Lambda^p -> Lambda^q` when `n^p = n^q`.
pub fn gamma_bijection(
    spec: &OdometerSpec,
    graph: &KGraph,
    p: &Degree,
    q: &Degree,
) -> Result<BTreeMap<Path, Path>, ModelError> {
    if spec.power(p) != spec.power(q) {
        return Err(ModelError::NotBalanced);
    }
    let targets: BTreeMap<u128, Path> = graph
        .paths_of_degree(q, None, None)
        .into_iter()
        .map(|nu| (path_value(spec, graph, &nu), nu))
        .collect();
    Ok(graph
        .paths_of_degree(p, None, None)
        .into_iter()
        .map(|mu| {
            let v = path_value(spec, graph, &mu);
            (mu, targets[&v].clone())
        })
        .collect())
}

fn factor(mut n: u64) -> BTreeMap<u64, i64> {
    let mut out = BTreeMap::new();
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

/// `{z in [-R, R]^k : n^z = 1}` by exact prime-exponent arithmetic, as a
/// lattice generated by the box members.
pub fn expected_odometer_per(spec: &OdometerSpec, radius: u32) -> IntLattice {
    let factors: Vec<BTreeMap<u64, i64>> = spec.n.iter().map(|&n| factor(n as u64)).collect();
    let primes: Vec<u64> = factors
        .iter()
        .flat_map(|f| f.keys().copied())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let members = box_points(spec.k(), radius as i64).filter(|z| {
        primes.iter().all(|p| {
            z.iter()
                .zip(&factors)
                .map(|(zi, f)| zi * f.get(p).copied().unwrap_or(0))
                .sum::<i64>()
                == 0
        })
    });
    IntLattice::from_generators(spec.k(), members)
}

/// Every integer vector with sup norm at most `r`, lexicographically.
pub fn box_points(k: usize, r: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * r + 1) as usize;
    let total = side.pow(k as u32);
    (0..total).map(move |mut idx| {
        let mut z = vec![0i64; k];
        for slot in z.iter_mut().rev() {
            *slot = (idx % side) as i64 - r;
            idx /= side;
        }
        z
    })
}
