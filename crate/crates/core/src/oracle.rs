//! Slow reference implementations used by the reproduction harness to
//! cross-check the fast engines.

use num_bigint::BigInt;

use crate::matrix::solve_integer;

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn box_vectors(norm: i64, n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut v = vec![-2i64; n];
    loop {
        if dot(&v, &v) == norm {
            out.push(v.clone());
        }
        let Some(i) = (0..n).rev().find(|&i| v[i] < 2) else {
            return out;
        };
        v[i] += 1;
        v[i + 1..].iter_mut().for_each(|x| *x = -2);
    }
}

/// Whether embedding data exists for the negative definite Gram matrix `g`
/// at `m`, searching all images with entries in `[-2, 2]`. The first image
/// is taken sorted and nonnegative. Only sound for diagonal entries `>= -4`.
pub fn brute_force_embeds(g: &[Vec<i64>], m: usize) -> bool {
    let r = g.len();
    let n = r + 2 * m;
    let pools: Vec<Vec<Vec<i64>>> = (0..r + m)
        .map(|i| box_vectors(if i < r { -g[i][i] } else { 2 }, n))
        .collect();
    let mut placed = Vec::new();
    extend(g, m, &pools, &mut placed)
}

fn extend(g: &[Vec<i64>], m: usize, pools: &[Vec<Vec<i64>>], placed: &mut Vec<Vec<i64>>) -> bool {
    let r = g.len();
    let i = placed.len();
    if i == r + m {
        let rows: Vec<Vec<BigInt>> = placed
            .iter()
            .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        return (0..m).all(|j| {
            let rhs: Vec<BigInt> = (0..r + m)
                .map(|k| BigInt::from(i64::from(k == r + j)))
                .collect();
            solve_integer(&rows, &rhs).is_some()
        });
    }
    for v in &pools[i] {
        if i == 0 && !(v.iter().all(|&x| x >= 0) && v.windows(2).all(|w| w[0] >= w[1])) {
            continue;
        }
        let fits = placed
            .iter()
            .enumerate()
            .all(|(j, p)| dot(v, p) == if i < r { -g[i][j] } else { 0 });
        if fits {
            placed.push(v.clone());
            if extend(g, m, pools, placed) {
                return true;
            }
            placed.pop();
        }
    }
    false
}

/// Negative definite symmetric matrices of rank `rank` with diagonal in `[-4, -1]`.
pub fn small_negative_definite(rank: usize) -> Vec<Vec<Vec<i64>>> {
    let slots: Vec<(usize, usize)> = (0..rank)
        .flat_map(|i| (i..rank).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    let mut vals: Vec<i64> = slots
        .iter()
        .map(|&(i, j)| if i == j { -4 } else { -3 })
        .collect();
    loop {
        let mut g = vec![vec![0; rank]; rank];
        for (&(i, j), &x) in slots.iter().zip(&vals) {
            g[i][j] = x;
            g[j][i] = x;
        }
        if crate::lattice::IntegralLattice::new(g.clone())
            .map(|l| l.definiteness() == crate::lattice::Definiteness::NegativeDefinite)
            .unwrap_or(false)
        {
            out.push(g);
        }
        let Some(k) = (0..slots.len()).rev().find(|&k| {
            let (i, j) = slots[k];
            vals[k] < if i == j { -1 } else { 3 }
        }) else {
            return out;
        };
        vals[k] += 1;
        for t in k + 1..slots.len() {
            let (i, j) = slots[t];
            vals[t] = if i == j { -4 } else { -3 };
        }
    }
}

/// Smallest sorted `(k, l, m)` with `k² + l² + m² = n`, by direct search.
pub fn three_squares_naive(n: u64) -> Option<(u64, u64, u64)> {
    let mut k = 0u64;
    while 3 * k * k <= n {
        let mut l = k;
        while k * k + 2 * l * l <= n {
            let rest = n - k * k - l * l;
            let m = rest.isqrt();
            if m >= l && m * m == rest {
                return Some((k, l, m));
            }
            l += 1;
        }
        k += 1;
    }
    None
}
