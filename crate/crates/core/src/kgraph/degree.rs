use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

/// A degree in `N^k`, stored as per-color counts (index 0 is color 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Degree(Vec<u32>);

impl Degree {
    pub fn zero(k: usize) -> Self {
        Degree(vec![0; k])
    }

    /// The unit vector of a 1-based color.
    pub fn unit(k: usize, color: usize) -> Self {
        let mut d = vec![0; k];
        d[color - 1] = 1;
        Degree(d)
    }

    pub fn new(counts: Vec<u32>) -> Self {
        Degree(counts)
    }

    /// The constant vector `(c, ..., c)`.
    pub fn splat(k: usize, c: u32) -> Self {
        Degree(vec![c; k])
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// Count for a 1-based color.
    pub fn get(&self, color: usize) -> u32 {
        self.0[color - 1]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    pub fn join(&self, other: &Degree) -> Degree {
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn meet(&self, other: &Degree) -> Degree {
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    /// Componentwise order.
    pub fn le(&self, other: &Degree) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_sub(&self, other: &Degree) -> Option<Degree> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Degree)
    }

    /// The signed difference `self - other` in `Z^k`.
    pub fn diff(&self, other: &Degree) -> Vec<i64> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| *a as i64 - *b as i64)
            .collect()
    }

    /// Positive part of an integer vector.
    pub fn positive_part(z: &[i64]) -> Degree {
        Degree(z.iter().map(|&c| c.max(0) as u32).collect())
    }

    /// The color-ascending sequence of 1-based colors with multiplicity.
    pub fn colors(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.total());
        for (i, &c) in self.0.iter().enumerate() {
            out.extend(std::iter::repeat(i + 1).take(c as usize));
        }
        out
    }

    /// Every degree `d` with `0 <= d <= self`, in lexicographic order.
    pub fn below(&self) -> Vec<Degree> {
        let mut out = vec![Vec::with_capacity(self.k())];
        for &c in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=c).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(Degree).collect()
    }
}

impl Add for &Degree {
    type Output = Degree;

    fn add(self, rhs: &Degree) -> Degree {
        Degree(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<u32>> for Degree {
    fn from(v: Vec<u32>) -> Self {
        Degree(v)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_operations() {
        let a = Degree::new(vec![2, 0, 1]);
        let b = Degree::new(vec![1, 3, 1]);
        assert_eq!(a.join(&b), Degree::new(vec![2, 3, 1]));
        assert_eq!(a.meet(&b), Degree::new(vec![1, 0, 1]));
        assert_eq!(&a + &b, Degree::new(vec![3, 3, 2]));
        assert!(a.meet(&b).le(&a));
        assert_eq!(a.checked_sub(&b), None);
        assert_eq!(a.colors(), vec![1, 1, 3]);
        assert_eq!(a.diff(&b), vec![1, -3, 0]);
    }

    #[test]
    fn below_enumerates_box() {
        let d = Degree::new(vec![1, 2]);
        let all = d.below();
        assert_eq!(all.len(), 6);
        assert!(all.iter().all(|x| x.le(&d)));
    }
}
