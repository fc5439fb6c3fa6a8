//! Exact integer and rational linear algebra on small dense matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IMatrix = Vec<Vec<i64>>;

pub fn to_big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn identity(n: usize) -> IMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn transpose(m: &[Vec<i64>]) -> IMatrix {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    (0..cols)
        .map(|j| m.iter().map(|r| r[j]).collect())
        .collect()
}

pub fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> IMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|r| {
            (0..cols)
                .map(|j| (0..inner).map(|k| r[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn is_square(m: &[Vec<i64>]) -> bool {
    m.iter().all(|r| r.len() == m.len())
}

/// First index pair where `m` fails to be symmetric.
pub fn asymmetry(m: &[Vec<i64>]) -> Option<(usize, usize)> {
    for i in 0..m.len() {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Some((i, j));
            }
        }
    }
    None
}

/// Fraction-free Gaussian elimination (Bareiss) with row pivoting.
pub fn det_big(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

pub fn det(m: &[Vec<i64>]) -> BigInt {
    det_big(&to_big(m))
}

/// Determinants of the leading principal k x k submatrices, k = 1..n.
pub fn leading_minors(m: &[Vec<i64>]) -> Vec<BigInt> {
    let big = to_big(m);
    (1..=m.len())
        .map(|k| {
            let sub: Vec<Vec<BigInt>> = big[..k].iter().map(|r| r[..k].to_vec()).collect();
            det_big(&sub)
        })
        .collect()
}

/// Inertia `(positive, negative, zero)` of a symmetric integer matrix, by
/// exact congruence diagonalisation over the rationals.
pub fn inertia(m: &[Vec<i64>]) -> (usize, usize, usize) {
    let a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect()
        })
        .collect();
    inertia_rational(a)
}

pub fn inertia_rational(mut a: Vec<Vec<BigRational>>) -> (usize, usize, usize) {
    let n = a.len();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    let mut k = 0;
    while k < n {
        if a[k][k].is_zero() {
            if let Some(r) = (k + 1..n).find(|&r| !a[r][r].is_zero()) {
                swap_sym(&mut a, k, r);
            } else if let Some(r) = (k + 1..n).find(|&r| !a[k][r].is_zero()) {
                // e_k <- e_k + e_r gives diagonal 2 a[k][r] != 0
                add_sym(&mut a, k, r, &BigRational::one());
            } else {
                zero += 1;
                k += 1;
                continue;
            }
        }
        let p = a[k][k].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for j in k..n {
                let v = &a[i][j] - &f * &a[k][j];
                a[i][j] = v;
            }
            for j in k..n {
                let v = &a[j][i] - &f * &a[j][k];
                a[j][i] = v;
            }
        }
        k += 1;
    }
    (pos, neg, zero)
}

fn swap_sym(a: &mut [Vec<BigRational>], i: usize, j: usize) {
    a.swap(i, j);
    for r in a.iter_mut() {
        r.swap(i, j);
    }
}

// row_i += f * row_j, col_i += f * col_j
fn add_sym(a: &mut [Vec<BigRational>], i: usize, j: usize, f: &BigRational) {
    let n = a.len();
    for c in 0..n {
        let v = &a[i][c] + f * &a[j][c];
        a[i][c] = v;
    }
    for r in 0..n {
        let v = &a[r][i] + f * &a[r][j];
        a[r][i] = v;
    }
}

/// Signature (positive minus negative eigenvalue count) of a symmetric matrix.
pub fn signature(m: &[Vec<i64>]) -> i64 {
    let (p, n, _) = inertia(m);
    p as i64 - n as i64
}

/// Solves `m w = b` over the integers.
///
/// `m` is brought to column echelon form by unimodular column operations,
/// after which the system is triangular. Returns `None` when no integral
/// solution exists.
pub fn solve_integer(m: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let rows = m.len();
    assert_eq!(rows, b.len());
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut pivots: Vec<Option<usize>> = vec![None; rows];
    let mut c = 0;
    for (i, piv) in pivots.iter_mut().enumerate() {
        if c >= cols {
            break;
        }
        for j in c + 1..cols {
            if a[i][j].is_zero() {
                continue;
            }
            if a[i][c].is_zero() {
                swap_cols(&mut a, &mut u, c, j);
                continue;
            }
            let eg = a[i][c].extended_gcd(&a[i][j]);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let p = -(&a[i][j] / &g);
            let q = &a[i][c] / &g;
            combine_cols(&mut a, &mut u, c, j, &x, &y, &p, &q);
        }
        if a[i][c].is_zero() {
            continue;
        }
        if a[i][c].is_negative() {
            for r in a.iter_mut() {
                r[c] = -r[c].clone();
            }
            for r in u.iter_mut() {
                r[c] = -r[c].clone();
            }
        }
        *piv = Some(c);
        c += 1;
    }
    let mut y = vec![BigInt::zero(); cols];
    for i in 0..rows {
        let mut s = BigInt::zero();
        for j in 0..c {
            if !a[i][j].is_zero() {
                s += &a[i][j] * &y[j];
            }
        }
        let rest = &b[i] - s;
        match pivots[i] {
            Some(p) => {
                let (q, r) = rest.div_rem(&a[i][p]);
                if !r.is_zero() {
                    return None;
                }
                y[p] = q;
            }
            None => {
                if !rest.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(
        (0..cols)
            .map(|r| (0..cols).map(|j| &u[r][j] * &y[j]).sum())
            .collect(),
    )
}

fn swap_cols(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], i: usize, j: usize) {
    for r in a.iter_mut() {
        r.swap(i, j);
    }
    for r in u.iter_mut() {
        r.swap(i, j);
    }
}

// (col_i, col_j) <- (x col_i + y col_j, p col_i + q col_j), determinant xq - yp = 1
#[allow(clippy::too_many_arguments)]
fn combine_cols(
    a: &mut [Vec<BigInt>],
    u: &mut [Vec<BigInt>],
    i: usize,
    j: usize,
    x: &BigInt,
    y: &BigInt,
    p: &BigInt,
    q: &BigInt,
) {
    for r in a.iter_mut().chain(u.iter_mut()) {
        let ci = r[i].clone();
        let cj = r[j].clone();
        r[i] = x * &ci + y * &cj;
        r[j] = p * ci + q * cj;
    }
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

pub fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn determinant_small() {
        assert_eq!(det(&[vec![2, 1], vec![1, 2]]), 3.into());
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]), (-1).into());
        assert_eq!(det(&[]), 1.into());
        let m = vec![vec![0, 2, 1], vec![3, 0, 0], vec![1, 1, 1]];
        assert_eq!(det(&m), (-3).into());
    }

    #[test]
    fn inertia_hyperbolic_and_degenerate() {
        assert_eq!(inertia(&[vec![0, 1], vec![1, 0]]), (1, 1, 0));
        assert_eq!(inertia(&[vec![1, 1], vec![1, 1]]), (1, 0, 1));
        assert_eq!(inertia(&[vec![-2, 1], vec![1, -2]]), (0, 2, 0));
        assert_eq!(inertia(&[vec![0, 0], vec![0, 0]]), (0, 0, 2));
    }

    #[test]
    fn solver_finds_and_rejects() {
        let m = vec![b(&[2, 4]), b(&[0, 3])];
        let w = solve_integer(&m, &b(&[2, 3])).unwrap();
        assert_eq!(w, b(&[-1, 1]));
        assert!(solve_integer(&m, &b(&[1, 0])).is_none());
        let under = vec![b(&[3, 5, 0])];
        let w = solve_integer(&under, &b(&[1])).unwrap();
        assert_eq!(&w[0] * 3 + &w[1] * 5, 1.into());
        let dep = vec![b(&[1, 1]), b(&[2, 2])];
        assert!(solve_integer(&dep, &b(&[1, 3])).is_none());
        assert!(solve_integer(&dep, &b(&[1, 2])).is_some());
    }

    #[test]
    fn squares() {
        assert!(is_perfect_square(&49.into()));
        assert!(!is_perfect_square(&45.into()));
        assert!(!is_perfect_square(&(-4).into()));
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
    }
}
