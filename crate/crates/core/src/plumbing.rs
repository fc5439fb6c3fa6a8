//! Continued fractions and definite plumbed fillings of lens spaces and of
//! double branched covers of odd pretzel knots.

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{Definiteness, IntegralLattice};

/// Weighted tree; its intersection form is the weighted adjacency matrix with
/// `edge_sign` off the diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlumbingTree {
    pub weights: Vec<i64>,
    pub edges: Vec<(usize, usize)>,
    pub edge_sign: i64,
}

impl PlumbingTree {
    pub fn new(weights: Vec<i64>, edges: Vec<(usize, usize)>, edge_sign: i64) -> Result<Self> {
        if edge_sign != 1 && edge_sign != -1 {
            return invalid("edge sign must be +1 or -1");
        }
        let n = weights.len();
        if !weights.is_empty() && edges.len() != n - 1 {
            return invalid(format!("a tree on {n} vertices has {} edges", n.max(1) - 1));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &edges {
            if a >= n || b >= n || a == b {
                return invalid(format!("bad edge ({a}, {b})"));
            }
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra == rb {
                return invalid(format!("edge ({a}, {b}) closes a cycle"));
            }
            parent[ra] = rb;
        }
        Ok(Self {
            weights,
            edges,
            edge_sign,
        })
    }

    pub fn lattice(&self) -> IntegralLattice {
        let n = self.weights.len();
        let mut gram = vec![vec![0; n]; n];
        for (i, &w) in self.weights.iter().enumerate() {
            gram[i][i] = w;
        }
        for &(a, b) in &self.edges {
            gram[a][b] = self.edge_sign;
            gram[b][a] = self.edge_sign;
        }
        IntegralLattice::new(gram).expect("adjacency matrix is symmetric")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LensSpace {
    pub p: i64,
    pub q: i64,
    pub orientation: Orientation,
}

impl LensSpace {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        check_coprime_pair(p, q)?;
        Ok(Self {
            p,
            q,
            orientation: Orientation::Positive,
        })
    }

    /// `-L(p,q) = L(p, p-q)`.
    pub fn reversed(&self) -> Self {
        Self {
            p: self.p,
            q: self.p - self.q,
            orientation: self.orientation,
        }
    }
}

fn check_coprime_pair(p: i64, q: i64) -> Result<()> {
    if !(p > q && q > 0) {
        return invalid(format!("need p > q > 0, got p = {p}, q = {q}"));
    }
    if p.gcd(&q) != 1 {
        return invalid(format!("gcd({p}, {q}) != 1"));
    }
    Ok(())
}

/// `p/q = a_1 - 1/(a_2 - 1/(... - 1/a_n))` with every `a_i >= 2`.
pub fn neg_continued_fraction(p: i64, q: i64) -> Result<Vec<i64>> {
    check_coprime_pair(p, q)?;
    let (mut p, mut q) = (p, q);
    let mut out = Vec::new();
    while q != 0 {
        let a = Integer::div_ceil(&p, &q);
        out.push(a);
        (p, q) = (q, a * q - p);
    }
    Ok(out)
}

/// `p/q = c_1 + 1/(c_2 + 1/(... + 1/c_n))` with `c_n >= 2`.
pub fn pos_continued_fraction(p: i64, q: i64) -> Result<Vec<i64>> {
    check_coprime_pair(p, q)?;
    let (mut p, mut q) = (p, q);
    let mut out = Vec::new();
    while q != 0 {
        out.push(p / q);
        (p, q) = (q, p % q);
    }
    Ok(out)
}

pub fn eval_neg_continued_fraction(terms: &[i64]) -> Rational64 {
    let mut it = terms.iter().rev();
    let mut acc = Rational64::from_integer(*it.next().expect("nonempty"));
    for &a in it {
        acc = Rational64::from_integer(a) - acc.recip();
    }
    acc
}

pub fn eval_pos_continued_fraction(terms: &[i64]) -> Rational64 {
    let mut it = terms.iter().rev();
    let mut acc = Rational64::from_integer(*it.next().expect("nonempty"));
    for &c in it {
        acc = Rational64::from_integer(c) + acc.recip();
    }
    acc
}

/// Tridiagonal Gram with `weights` on the diagonal.
pub fn linear_plumbing(weights: &[i64], edge_sign: i64) -> Result<IntegralLattice> {
    if weights.is_empty() {
        return invalid("linear plumbing needs at least one vertex");
    }
    let edges = (1..weights.len()).map(|i| (i - 1, i)).collect();
    Ok(PlumbingTree::new(weights.to_vec(), edges, edge_sign)?.lattice())
}

/// Negative and positive definite fillings of `L(p,q)`.
pub fn lens_fillings(p: i64, q: i64) -> Result<(IntegralLattice, IntegralLattice)> {
    let neg_weights: Vec<i64> = neg_continued_fraction(p, q)?.iter().map(|a| -a).collect();
    let neg = linear_plumbing(&neg_weights, 1)?;
    let rev_weights: Vec<i64> = neg_continued_fraction(p, p - q)?
        .iter()
        .map(|a| -a)
        .collect();
    let pos = linear_plumbing(&rev_weights, 1)?.negated();
    for (l, want) in [
        (&neg, Definiteness::NegativeDefinite),
        (&pos, Definiteness::PositiveDefinite),
    ] {
        if l.definiteness() != want {
            return Err(Error::Internal(format!(
                "lens filling of L({p},{q}) is {:?}",
                l.definiteness()
            )));
        }
    }
    Ok((neg, pos))
}

/// Negative definite filling of L(p,q) from its continued fraction.
pub fn lens_neg_filling(lens: &LensSpace) -> Result<IntegralLattice> {
    Ok(lens_fillings(lens.p, lens.q)?.0)
}

/// Double branched cover of the twist knot `K_a` is `L(4a+1, 2)`.
pub fn twist_cover(a: i64) -> Result<LensSpace> {
    if a < 1 {
        return invalid(format!("twist parameter must be >= 1, got {a}"));
    }
    LensSpace::new(4 * a + 1, 2)
}

/// Star-shaped negative definite plumbing bounding the double branched
/// cover of `P(p_1, q_1, p_2, ..., q_k, p_{k+1})` (any interleaving).
///
/// Generators: the `-2` chains in input order (each listed from the centre
/// outwards), then the centre `y`, then the leaves `z_j`.
pub fn pretzel_plumbing(positives: &[i64], negatives: &[i64]) -> Result<IntegralLattice> {
    check_pretzel_filling_hypotheses(positives, negatives)?;
    let k = negatives.len();
    let mut weights = Vec::new();
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    let mut chain_heads = Vec::new();
    for (i, &p) in positives.iter().enumerate() {
        for j in 0..(p - 1) as usize {
            let v = weights.len();
            if j == 0 {
                chain_heads.push(v);
            } else {
                edges.push((v - 1, v));
            }
            weights.push(-2);
            labels.push(format!("x{}_{}", i + 1, j + 1));
        }
    }
    let center = weights.len();
    weights.push(-(k as i64 + 1));
    labels.push("y".to_string());
    for h in chain_heads {
        edges.push((h, center));
    }
    for (j, &q) in negatives.iter().enumerate() {
        edges.push((center, weights.len()));
        weights.push(q);
        labels.push(format!("z{}", j + 1));
    }
    let lattice = PlumbingTree::new(weights, edges, 1)?
        .lattice()
        .with_labels(labels)?;
    if lattice.definiteness() != Definiteness::NegativeDefinite {
        return Err(Error::Internal(
            "pretzel plumbing is not negative definite".into(),
        ));
    }
    Ok(lattice)
}

pub fn check_pretzel_filling_hypotheses(positives: &[i64], negatives: &[i64]) -> Result<()> {
    if negatives.is_empty() || positives.len() != negatives.len() + 1 {
        return invalid(format!(
            "need k+1 positive and k >= 1 negative parameters, got {} and {}",
            positives.len(),
            negatives.len()
        ));
    }
    if let Some(p) = positives.iter().find(|&&p| p < 3 || p % 2 == 0) {
        return invalid(format!("positive parameter {p} must be odd and >= 3"));
    }
    if let Some(q) = negatives.iter().find(|&&q| q > -3 || q % 2 == 0) {
        return invalid(format!("negative parameter {q} must be odd and <= -3"));
    }
    let total: Rational64 = positives
        .iter()
        .chain(negatives)
        .map(|&x| Rational64::new(1, x))
        .sum();
    if total <= Rational64::from_integer(0) {
        return invalid(format!("sum of reciprocals must be positive, got {total}"));
    }
    Ok(())
}
