//! Topological upper bounds from decompositions of Seifert matrices.
//!
//! If `P^T A P = B - Σ c_i c_i^T` with `P` unimodular and `det(tB - B^T) = ±t^k`,
//! then adding `n` generalised positive crossings to a knot with Alexander
//! polynomial one recovers `K`, so `u_CP2^top(K) <= n`.

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diophantine::three_square;
use crate::error::{Error, Result};
use crate::matrix::{self, IMatrix};
use crate::seifert::{det_pencil, SeifertMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub b: IMatrix,
    pub cs: Vec<Vec<i64>>,
    /// Columns are the new basis in old coordinates; `None` is the identity.
    pub basis_change: Option<IMatrix>,
    #[serde(default)]
    pub verified: bool,
}

impl Decomposition {
    pub fn n(&self) -> usize {
        self.cs.len()
    }
}

/// Checks `P^T A P = B - Σ c c^T` and that `det(tB - B^T)` is `±t^k`.
pub fn verify_decomposition(a: &SeifertMatrix, d: &Decomposition) -> Result<bool> {
    let n = a.size();
    let dims_ok = d.b.len() == n
        && matrix::is_square(&d.b)
        && d.cs.iter().all(|c| c.len() == n)
        && d.basis_change
            .as_ref()
            .is_none_or(|p| p.len() == n && matrix::is_square(p));
    if !dims_ok {
        return Err(Error::DimensionMismatch(format!(
            "decomposition does not match a {n}x{n} Seifert matrix"
        )));
    }
    let transformed = match &d.basis_change {
        Some(p) => {
            let det = matrix::det(p);
            if det != 1.into() && det != (-1).into() {
                return Ok(false);
            }
            matrix::mul(&matrix::mul(&matrix::transpose(p), a.entries()), p)
        }
        None => a.entries().to_vec(),
    };
    let mut rhs = d.b.clone();
    for c in &d.cs {
        for i in 0..n {
            for j in 0..n {
                rhs[i][j] -= c[i] * c[j];
            }
        }
    }
    Ok(transformed == rhs && is_unit_monomial(&d.b))
}

/// Whether `det(tB - B^T)` is `±t^k`.
pub fn is_unit_monomial(b: &[Vec<i64>]) -> bool {
    if b.is_empty() {
        return true;
    }
    // The top and bottom coefficients are both det(B) up to sign, and the
    // polynomial is palindromic, so a unit monomial needs det(B) = 0.
    if b.len() == 2 {
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        return det == 0 && (b[0][1] - b[1][0]).abs() == 1;
    }
    if matrix::det(b) != 0.into() {
        return false;
    }
    let p = det_pencil(b, &matrix::transpose(b));
    p.is_unit()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionConfig {
    pub n_max: usize,
    pub coeff_bound: i64,
    pub basis_depth: usize,
    /// Maximum number of candidate matrices; each `(n, depth)` level is
    /// charged in full before it is searched.
    pub budget: u64,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        Self {
            n_max: 4,
            coeff_bound: 8,
            basis_depth: 2,
            budget: 20_000_000,
        }
    }
}

/// Searches for a decomposition with the fewest rank-one terms.
///
/// Candidates: `c` vectors with entries in `[-bound, bound]` up to `c ~ -c`,
/// unordered; basis changes are products of at most `basis_depth`
/// elementary matrices `I + λE_ij`. `Ok(None)` means nothing was found in
/// this space, not that no decomposition exists.
pub fn decomposition_search(
    a: &SeifertMatrix,
    cfg: &DecompositionConfig,
) -> Result<Option<Decomposition>> {
    let size = a.size();
    if cfg.coeff_bound < 0 {
        return Err(Error::InvalidInput(
            "coefficient bound must be nonnegative".into(),
        ));
    }
    if is_unit_monomial(a.entries()) {
        return Ok(Some(Decomposition {
            b: a.entries().to_vec(),
            cs: Vec::new(),
            basis_change: None,
            verified: true,
        }));
    }
    let cvecs = canonical_vectors(size, cfg.coeff_bound);
    let elems = elementary_matrices(size, cfg.coeff_bound);
    let mut spent: u128 = 0;
    for n in 1..=cfg.n_max {
        for depth in 0..=cfg.basis_depth {
            // The level is charged in full before it starts, so the outcome
            // never depends on scheduling.
            let changes = (elems.len() as u128).saturating_pow(depth as u32);
            let level = changes.saturating_mul(multisets(cvecs.len() as u128, n));
            spent = spent.saturating_add(level);
            if spent > cfg.budget as u128 {
                return Err(Error::BudgetExceeded {
                    budget: cfg.budget,
                    explored: (spent - level).min(u64::MAX as u128) as u64,
                });
            }
            let changes = basis_changes_of_depth(size, &elems, depth);
            let found = changes.par_iter().find_map_first(|p| {
                let base = match p {
                    Some(p) => congruence(a.entries(), p),
                    None => a.entries().to_vec(),
                };
                search_cs(&base, &cvecs, n).map(|cs| Decomposition {
                    b: add_rank_ones(&base, &cs),
                    cs,
                    basis_change: p.clone(),
                    verified: false,
                })
            });
            if let Some(mut d) = found {
                if !verify_decomposition(a, &d)? {
                    return Err(Error::Internal("decomposition failed to verify".into()));
                }
                d.verified = true;
                return Ok(Some(d));
            }
        }
    }
    Ok(None)
}

/// Number of multisets of size `k` drawn from `n` items.
fn multisets(n: u128, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc.saturating_mul(n + i) / (i + 1);
    }
    acc
}

fn add_rank_ones(base: &[Vec<i64>], cs: &[Vec<i64>]) -> IMatrix {
    let mut b = base.to_vec();
    for c in cs {
        for (i, row) in b.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x += c[i] * c[j];
            }
        }
    }
    b
}

fn search_cs(base: &[Vec<i64>], cvecs: &[Vec<i64>], n: usize) -> Option<Vec<Vec<i64>>> {
    if cvecs.is_empty() {
        return None;
    }
    let mut idx = vec![0usize; n];
    let mut b = base.to_vec();
    // Non-decreasing index tuples enumerate multisets of c vectors.
    loop {
        for (row, src) in b.iter_mut().zip(base) {
            row.copy_from_slice(src);
        }
        for &k in &idx {
            let c = &cvecs[k];
            for (i, row) in b.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    *x += c[i] * c[j];
                }
            }
        }
        if is_unit_monomial(&b) {
            return Some(idx.iter().map(|&k| cvecs[k].clone()).collect());
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            if idx[pos] + 1 < cvecs.len() {
                idx[pos] += 1;
                for q in pos + 1..n {
                    idx[q] = idx[pos];
                }
                break;
            }
        }
    }
}

/// Nonzero vectors in `[-bound, bound]^size` whose first nonzero entry is positive.
pub fn canonical_vectors(size: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut v = vec![-bound; size];
    if size == 0 {
        return out;
    }
    loop {
        if v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
            out.push(v.clone());
        }
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if v[i] < bound {
                v[i] += 1;
                for x in v.iter_mut().skip(i + 1) {
                    *x = -bound;
                }
                break;
            }
        }
    }
}

fn elementary_matrices(size: usize, bound: i64) -> Vec<IMatrix> {
    let mut out = Vec::new();
    for i in 0..size {
        for j in 0..size {
            if i == j {
                continue;
            }
            for lambda in (-bound..=bound).filter(|&l| l != 0) {
                let mut e = matrix::identity(size);
                e[i][j] = lambda;
                out.push(e);
            }
        }
    }
    out
}

fn basis_changes_of_depth(size: usize, elems: &[IMatrix], depth: usize) -> Vec<Option<IMatrix>> {
    if depth == 0 {
        return vec![None];
    }
    let mut current: Vec<IMatrix> = vec![matrix::identity(size)];
    for _ in 0..depth {
        current = current
            .iter()
            .flat_map(|p| elems.iter().map(move |e| matrix::mul(p, e)))
            .collect();
    }
    current.into_iter().map(Some).collect()
}

/// `fr(x,y) = v^T A v = a x² + (2b+1) x y + c y²` for `A = [[a, b+1], [b, c]]`.
pub fn framing_form(a: &SeifertMatrix, x: i64, y: i64) -> Result<i64> {
    if a.genus() != 1 {
        return Err(Error::InvalidInput(
            "framing form needs a genus-one matrix".into(),
        ));
    }
    let e = a.entries();
    Ok(e[0][0] * x * x + (e[0][1] + e[1][0]) * x * y + e[1][1] * y * y)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GenusOneBound {
    /// `σ = 2`.
    Infinite,
    Bound {
        n: usize,
        decomposition: Decomposition,
        /// Which row of the negative-framing case split located the first curve.
        case: Option<u8>,
    },
}

/// `(s, t)` with `x t - y s = 1`, minimising `|s| + |t|`, ties broken
/// lexicographically.
pub fn complete_basis(x: i64, y: i64) -> Result<(i64, i64)> {
    let eg = x.extended_gcd(&y);
    if eg.gcd != 1 {
        return Err(Error::InvalidInput(format!("({x}, {y}) is not primitive")));
    }
    // x·eg.x + y·eg.y = 1, so t = eg.x and s = -eg.y
    let (s0, t0) = (-eg.y, eg.x);
    let reach = s0.abs() + t0.abs() + 1;
    let best = (-reach..=reach)
        .map(|k| (s0 + k * x, t0 + k * y))
        .min_by_key(|&(s, t)| (s.abs() + t.abs(), s, t))
        .expect("nonempty range");
    Ok(best)
}

fn congruence(a: &[Vec<i64>], p: &[Vec<i64>]) -> IMatrix {
    matrix::mul(&matrix::mul(&matrix::transpose(p), a), p)
}

/// The genus-one procedure: `∞` when `σ = 2`, otherwise an explicit
/// decomposition with at most four rank-one terms.
pub fn genus_one_top_bound(a: &SeifertMatrix) -> Result<GenusOneBound> {
    if a.genus() != 1 {
        return Err(Error::InvalidInput(
            "expected a genus-one Seifert matrix".into(),
        ));
    }
    let mut p_total = matrix::identity(2);
    let mut cur = a.entries().to_vec();
    // Bring A to the shape [[a, b+1], [b, c]].
    if cur[0][1] - cur[1][0] == -1 {
        let swap = vec![vec![0, 1], vec![1, 0]];
        cur = congruence(&cur, &swap);
        p_total = swap;
    }
    let (aa, b, c) = (cur[0][0], cur[1][0], cur[1][1]);
    if aa == 0 && b == 0 {
        let d = Decomposition {
            b: a.entries().to_vec(),
            cs: Vec::new(),
            basis_change: None,
            verified: true,
        };
        return Ok(GenusOneBound::Bound {
            n: 0,
            decomposition: d,
            case: None,
        });
    }
    if a.signature() == 2 {
        return Ok(GenusOneBound::Infinite);
    }
    let (case, (x, y)) = negative_class(aa, b, c)?;
    let fr = |m: &[Vec<i64>], x: i64, y: i64| {
        m[0][0] * x * x + (m[0][1] + m[1][0]) * x * y + m[1][1] * y * y
    };
    if fr(&cur, x, y) >= 0 {
        return Err(Error::Internal(format!(
            "case {case} class ({x},{y}) has framing {}",
            fr(&cur, x, y)
        )));
    }
    let (s, t) = complete_basis(x, y)?;
    let p1 = vec![vec![x, s], vec![y, t]];
    let b1 = congruence(&cur, &p1);
    p_total = matrix::mul(&p_total, &p1);
    let p = b1[0][0];
    let alpha = if !matches!(p.rem_euclid(4), 0 | 3) {
        (1, 0)
    } else {
        let mut x = 1;
        while fr(&b1, x, 2) > -1 {
            x += 4;
        }
        (x, 2)
    };
    let e = fr(&b1, alpha.0, alpha.1);
    let target = u64::try_from(-e - 1)
        .map_err(|_| Error::Internal(format!("framing {e} is not negative")))?;
    let (k, l, m) = three_square(target)
        .ok_or_else(|| Error::Internal(format!("{target} is not a sum of three squares")))?;
    let (k, l, m) = (k as i64, l as i64, m as i64);
    let (s, t) = complete_basis(alpha.0, alpha.1)?;
    let p2 = vec![vec![alpha.0, s], vec![alpha.1, t]];
    let a2 = congruence(&b1, &p2);
    p_total = matrix::mul(&p_total, &p2);
    let (g, h) = (a2[1][0], a2[1][1]);
    let u = -g - k - l - m;
    let v = h + u * u + 3;
    let mut d = Decomposition {
        b: vec![vec![0, 1], vec![0, v]],
        cs: vec![vec![1, u], vec![k, 1], vec![l, 1], vec![m, 1]],
        basis_change: Some(p_total),
        verified: false,
    };
    if !verify_decomposition(a, &d)? {
        return Err(Error::Internal(
            "genus-one decomposition failed to verify".into(),
        ));
    }
    d.verified = true;
    Ok(GenusOneBound::Bound {
        n: 4,
        decomposition: d,
        case: Some(case),
    })
}

/// A primitive class of negative framing for `[[a, b+1], [b, c]]`, by the
/// six-row case split; the row number is returned with the class.
fn negative_class(a: i64, b: i64, c: i64) -> Result<(u8, (i64, i64))> {
    let (case, (x, y)) = if a < 0 {
        (1, (1, 0))
    } else if a == 0 && b > 0 && c > 0 {
        (2, (-c, 1))
    } else if a == 0 && b > 0 && c == 0 {
        (3, (-1, 1))
    } else if a == 0 && b < 0 && c > 0 {
        (4, (2 * c, 1))
    } else if a == 0 && b < 0 && c == 0 {
        (5, (1, 1))
    } else if a > 0 {
        let (x, y) = (-2 * b - 1, 2 * a);
        let g = x.gcd(&y);
        (6, (x / g, y / g))
    } else if c < 0 {
        // a = 0, c < 0: the second basis curve already has negative framing.
        (7, (0, 1))
    } else {
        return Err(Error::Internal(format!(
            "no negative class for a={a}, b={b}, c={c}"
        )));
    };
    Ok((case, (x, y)))
}
