//! Integral lattices given by exact symmetric Gram matrices.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    Degenerate,
}

/// A free abelian group of finite rank with a symmetric integer pairing.
///
/// Entries are `i64`; determinants and minors are evaluated with
/// arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralLattice {
    rank: usize,
    gram: Vec<Vec<i64>>,
    #[serde(default)]
    labels: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl IntegralLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        if !matrix::is_square(&gram) {
            return Err(Error::DimensionMismatch("gram matrix is not square".into()));
        }
        if let Some((row, col)) = matrix::asymmetry(&gram) {
            return Err(Error::NotSymmetric { row, col });
        }
        Ok(Self {
            rank: gram.len(),
            gram,
            labels: Vec::new(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.rank {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for rank {}",
                labels.len(),
                self.rank
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn empty() -> Self {
        Self {
            rank: 0,
            gram: Vec::new(),
            labels: Vec::new(),
        }
    }

    /// `(Z^n, sign * Id)`.
    pub fn standard_diagonal(n: usize, sign: Sign) -> Self {
        let s = match sign {
            Sign::Plus => 1,
            Sign::Minus => -1,
        };
        let gram = (0..n)
            .map(|i| (0..n).map(|j| if i == j { s } else { 0 }).collect())
            .collect();
        Self::new(gram).expect("diagonal is symmetric")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn pairing(&self, i: usize, j: usize) -> i64 {
        self.gram[i][j]
    }

    /// Sylvester's criterion on leading principal minors.
    ///
    /// The rank-0 lattice is reported as `PositiveDefinite`.
    pub fn definiteness(&self) -> Definiteness {
        if self.rank == 0 {
            return Definiteness::PositiveDefinite;
        }
        let minors = matrix::leading_minors(&self.gram);
        if minors.last().is_some_and(Zero::is_zero) {
            return Definiteness::Degenerate;
        }
        if minors.iter().all(Signed::is_positive) {
            return Definiteness::PositiveDefinite;
        }
        let alternating = minors.iter().enumerate().all(|(k, d)| {
            if k % 2 == 0 {
                d.is_negative()
            } else {
                d.is_positive()
            }
        });
        if alternating {
            Definiteness::NegativeDefinite
        } else {
            Definiteness::Indefinite
        }
    }

    pub fn determinant(&self) -> BigInt {
        matrix::det(&self.gram)
    }

    pub fn negated(&self) -> Self {
        Self {
            rank: self.rank,
            gram: self
                .gram
                .iter()
                .map(|r| r.iter().map(|x| -x).collect())
                .collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.rank + other.rank;
        let mut gram = vec![vec![0; n]; n];
        for (i, row) in self.gram.iter().enumerate() {
            gram[i][..self.rank].copy_from_slice(row);
        }
        for (i, row) in other.gram.iter().enumerate() {
            gram[self.rank + i][self.rank..].copy_from_slice(row);
        }
        let labels = if self.labels.is_empty() && other.labels.is_empty() {
            Vec::new()
        } else {
            let pad = |l: &Self, off: usize| -> Vec<String> {
                if l.labels.is_empty() {
                    (0..l.rank).map(|i| format!("g{}", off + i + 1)).collect()
                } else {
                    l.labels.clone()
                }
            };
            let mut v = pad(self, 0);
            v.extend(pad(other, self.rank));
            v
        };
        Self {
            rank: n,
            gram,
            labels,
        }
    }

    /// Block form `[[±2I, I], [I, A]]` in the basis `u_1..u_m, v_1..v_m`.
    pub fn half_integer_block(m: usize, a: &[Vec<i64>], sign: Sign) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("m must be positive".into()));
        }
        if a.len() != m || !matrix::is_square(a) {
            return Err(Error::DimensionMismatch(format!("A must be {m}x{m}")));
        }
        if let Some((row, col)) = matrix::asymmetry(a) {
            return Err(Error::NotSymmetric { row, col });
        }
        let d = match sign {
            Sign::Plus => 2,
            Sign::Minus => -2,
        };
        let mut gram = vec![vec![0; 2 * m]; 2 * m];
        for i in 0..m {
            gram[i][i] = d;
            gram[i][m + i] = 1;
            gram[m + i][i] = 1;
            for j in 0..m {
                gram[m + i][m + j] = a[i][j];
            }
        }
        let labels = (1..=m)
            .map(|i| format!("u{i}"))
            .chain((1..=m).map(|i| format!("v{i}")))
            .collect();
        Self::new(gram)?.with_labels(labels)
    }
}
