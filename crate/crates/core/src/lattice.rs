//! Subgroups of `Z^k` in row Hermite normal form.

use serde::{Deserialize, Serialize};

/// A subgroup of `Z^dim` given by its unique row-style Hermite basis:
/// echelon rows, positive pivots, entries above each pivot reduced into
/// `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntLattice {
    dim: usize,
    basis: Vec<Vec<i64>>,
}

impl IntLattice {
    pub fn zero(dim: usize) -> Self {
        IntLattice {
            dim,
            basis: Vec::new(),
        }
    }

    pub fn full(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
            .collect();
        IntLattice { dim, basis }
    }

    pub fn from_generators<I>(dim: usize, gens: I) -> Self
    where
        I: IntoIterator<Item = Vec<i64>>,
    {
        let rows: Vec<Vec<i128>> = gens
            .into_iter()
            .inspect(|g| assert_eq!(g.len(), dim, "generator has wrong length"))
            .map(|g| g.into_iter().map(i128::from).collect())
            .collect();
        IntLattice {
            dim,
            basis: hermite(rows, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    fn pivot(row: &[i64]) -> usize {
        row.iter().position(|&x| x != 0).expect("basis rows are nonzero")
    }

    /// Integer coordinates of `z` in the basis, if `z` lies in the lattice.
    pub fn coords(&self, z: &[i64]) -> Option<Vec<i64>> {
        assert_eq!(z.len(), self.dim);
        let mut rest: Vec<i128> = z.iter().map(|&x| x as i128).collect();
        let mut out = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let p = Self::pivot(row);
            let piv = row[p] as i128;
            if rest[..p].iter().any(|&x| x != 0) || rest[p] % piv != 0 {
                return None;
            }
            let t = rest[p] / piv;
            for (r, &b) in rest.iter_mut().zip(row) {
                *r -= t * b as i128;
            }
            out.push(t as i64);
        }
        rest.iter().all(|&x| x == 0).then_some(out)
    }

    pub fn contains(&self, z: &[i64]) -> bool {
        self.coords(z).is_some()
    }

    pub fn is_sublattice_of(&self, other: &IntLattice) -> bool {
        self.dim == other.dim && self.basis.iter().all(|b| other.contains(b))
    }

    /// `sum_i c_i b_i`.
    pub fn combine(&self, coeffs: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.dim];
        for (c, row) in coeffs.iter().zip(&self.basis) {
            for (o, &b) in out.iter_mut().zip(row) {
                *o += c * b;
            }
        }
        out
    }
}

fn hermite(mut a: Vec<Vec<i128>>, dim: usize) -> Vec<Vec<i64>> {
    a.retain(|r| r.iter().any(|&x| x != 0));
    let mut r = 0;
    for col in 0..dim {
        if r == a.len() {
            break;
        }
        loop {
            let best = (r..a.len())
                .filter(|&i| a[i][col] != 0)
                .min_by_key(|&i| a[i][col].abs());
            let Some(best) = best else { break };
            a.swap(r, best);
            let mut done = true;
            for i in r + 1..a.len() {
                if a[i][col] != 0 {
                    let q = a[i][col].div_euclid(a[r][col]);
                    let pivot_row = a[r].clone();
                    for (x, p) in a[i].iter_mut().zip(&pivot_row) {
                        *x -= q * p;
                    }
                    if a[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < a.len() && a[r][col] != 0 {
            if a[r][col] < 0 {
                for x in a[r].iter_mut() {
                    *x = -*x;
                }
            }
            let pivot_row = a[r].clone();
            for i in 0..r {
                let q = a[i][col].div_euclid(pivot_row[col]);
                for (x, p) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= q * p;
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    a.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| i64::try_from(x).expect("lattice entry overflows i64"))
                .collect()
        })
        .collect()
}
