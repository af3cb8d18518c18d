//! Perron-Frobenius data of a strongly connected finite k-graph.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::action::ActionSystem;
use crate::kgraph::{KGraph, Path, VertexId};
use crate::lattice::IntLattice;
use crate::models::box_points;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerronError {
    #[error("the graph is not strongly connected")]
    NotStronglyConnected,
    #[error("power iteration did not converge in {0} iterations")]
    NoConvergence(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerronData {
    /// Spectral radius of each coordinate matrix.
    pub rho: Vec<f64>,
    /// Common positive eigenvector with unit l1 norm.
    pub x: Vec<f64>,
    /// `||T_i x - rho_i x||_1` per color.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    /// `rho` as exact integers, when every `rho_i` is one and this is
    /// certified by an exact eigenvector.
    pub integer_rho: Option<Vec<u64>>,
}

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

fn mat_vec(t: &[Vec<u64>], x: &[f64]) -> Vec<f64> {
    t.iter()
        .map(|row| row.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum())
        .collect()
}

fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// Power iteration on `I + sum_i T_i`, which is primitive whenever the
/// graph is strongly connected. Its Perron vector is the common Perron
/// vector of the commuting family.
pub fn spectral_data(g: &KGraph, tol: f64, max_iter: usize) -> Result<PerronData, PerronError> {
    if !g.strongly_connected() {
        return Err(PerronError::NotStronglyConnected);
    }
    let n = g.vertex_count();
    let mats: Vec<Vec<Vec<u64>>> = (1..=g.k()).map(|c| g.coordinate_matrix(c)).collect();
    let mut sum = vec![vec![0u64; n]; n];
    for (i, row) in sum.iter_mut().enumerate() {
        row[i] = 1;
        for t in &mats {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot += t[i][j];
            }
        }
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    loop {
        if iterations >= max_iter {
            return Err(PerronError::NoConvergence(max_iter));
        }
        iterations += 1;
        let mut y = mat_vec(&sum, &x);
        let norm = l1(&y);
        y.iter_mut().for_each(|v| *v /= norm);
        let delta: f64 = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = y;
        if delta < tol {
            break;
        }
    }
    let mut rho = Vec::with_capacity(mats.len());
    let mut residuals = Vec::with_capacity(mats.len());
    for t in &mats {
        let tx = mat_vec(t, &x);
        let r = l1(&tx);
        residuals.push(tx.iter().zip(&x).map(|(a, b)| (a - r * b).abs()).sum());
        rho.push(r);
    }
    let integer_rho = certify_integer_rho(&mats, &rho, &x);
    Ok(PerronData {
        rho,
        x,
        residuals,
        iterations,
        integer_rho,
    })
}

/// Declares `rho_i` an integer `r` when `r` is within `1e-9` and some exact
/// positive rational vector `y` satisfies `T_i y = r y`.
fn certify_integer_rho(mats: &[Vec<Vec<u64>>], rho: &[f64], x: &[f64]) -> Option<Vec<u64>> {
    let guess: Vec<BigRational> = x
        .iter()
        .map(|&v| {
            num_rational::Rational64::approximate_float(v).map(|r| {
                BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
            })
        })
        .collect::<Option<_>>()?;
    mats.iter()
        .zip(rho)
        .map(|(t, &r)| {
            let rounded = r.round();
            if (r - rounded).abs() > 1e-9 || rounded < 1.0 {
                return None;
            }
            let ri = rounded as u64;
            let ok = is_positive_eigenvector(t, ri, &guess)
                || positive_null_vector(t, ri).is_some_and(|y| is_positive_eigenvector(t, ri, &y));
            ok.then_some(ri)
        })
        .collect()
}

fn is_positive_eigenvector(t: &[Vec<u64>], r: u64, y: &[BigRational]) -> bool {
    if y.iter().any(|v| !v.is_positive()) {
        return false;
    }
    let rr = BigRational::from_integer(BigInt::from(r));
    t.iter().zip(y).all(|(row, yv)| {
        let lhs: BigRational = row
            .iter()
            .zip(y)
            .map(|(&a, b)| BigRational::from_integer(BigInt::from(a)) * b)
            .fold(BigRational::zero(), |acc, v| acc + v);
        lhs == &rr * yv
    })
}

/// A basis vector of `ker(T - rI)` when that kernel is one dimensional,
/// with its sign chosen so that the first nonzero entry is positive.
fn positive_null_vector(t: &[Vec<u64>], r: u64) -> Option<Vec<BigRational>> {
    let n = t.len();
    let mut m: Vec<Vec<BigRational>> = t
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &a)| {
                    let v = BigInt::from(a) - if i == j { BigInt::from(r) } else { BigInt::zero() };
                    BigRational::from_integer(v)
                })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..n {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..n {
                    let d = &f * &m[row][j];
                    m[i][j] = &m[i][j] - d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if n - pivots.len() != 1 {
        return None;
    }
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut y = vec![BigRational::zero(); n];
    y[free] = BigRational::one();
    for (i, &pc) in pivots.iter().enumerate() {
        y[pc] = -m[i][free].clone();
    }
    if y.iter().find(|v| !v.is_zero())?.is_negative() {
        y.iter_mut().for_each(|v| *v = -v.clone());
    }
    Some(y)
}

/// `rho^{-d(mu)} x(s(mu))`.
pub fn pf_state_value(pd: &PerronData, mu: &Path) -> f64 {
    let scale: f64 = pd
        .rho
        .iter()
        .zip(mu.degree().as_slice())
        .map(|(r, &d)| r.powi(-(d as i32)))
        .product();
    scale * pd.x[mu.source().index()]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceCheck {
    pub holds: bool,
    /// `(generator, vertex, |x(g.v) - x(v)|)` for the first failure.
    pub witness: Option<(String, VertexId, f64)>,
}

/// Whether `x(g.v) = x(v)` within `tol` for every generator and vertex.
pub fn check_g_invariance(pd: &PerronData, sys: &ActionSystem, tol: f64) -> InvarianceCheck {
    for (name, &g) in sys.generator_names().iter().zip(sys.generators()) {
        for v in sys.graph().vertices() {
            let d = (pd.x[sys.act_vertex(g, v).index()] - pd.x[v.index()]).abs();
            if d >= tol {
                return InvarianceCheck {
                    holds: false,
                    witness: Some((name.clone(), v, d)),
                };
            }
        }
    }
    InvarianceCheck {
        holds: true,
        witness: None,
    }
}

/// `rho^z = 1`, exactly when `rho` is certified integral and within `tol`
/// on `|sum z_i ln rho_i|` otherwise.
pub fn rho_kernel_contains(pd: &PerronData, z: &[i64], tol: f64) -> bool {
    match &pd.integer_rho {
        Some(ints) => {
            let mut num = BigUint::one();
            let mut den = BigUint::one();
            for (&r, &zi) in ints.iter().zip(z) {
                let p = BigUint::from(r).pow(zi.unsigned_abs() as u32);
                if zi >= 0 {
                    num *= p;
                } else {
                    den *= p;
                }
            }
            num == den
        }
        None => {
            let s: f64 = pd.rho.iter().zip(z).map(|(r, &zi)| zi as f64 * r.ln()).sum();
            s.abs() < tol
        }
    }
}

/// The lattice generated by the box points `z` with `rho^z = 1`.
pub fn rho_kernel_lattice(pd: &PerronData, radius: u32, tol: f64) -> IntLattice {
    let k = pd.rho.len();
    IntLattice::from_generators(
        k,
        box_points(k, radius as i64).filter(|z| rho_kernel_contains(pd, z, tol)),
    )
}

/// `rho^z` as a float.
pub fn rho_power(pd: &PerronData, z: &[i64]) -> f64 {
    pd.rho
        .iter()
        .zip(z)
        .map(|(r, &zi)| r.powi(zi.to_i32().expect("exponent fits in i32")))
        .product()
}
