//! Reference implementations used only as test oracles. They share no code
//! with the engines they check.

#![allow(dead_code)]

/// Determinant by cofactor expansion; fine for the tiny matrices used here.
pub fn det_laplace(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det_laplace(&minor)
            })
            .sum(),
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Rank and gcd of the maximal nonvanishing minors.
fn determinantal_divisor(m: &[Vec<i128>]) -> (usize, i128) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    for k in (1..=rows.min(cols)).rev() {
        let mut g = 0;
        for rs in combinations(rows, k) {
            for cs in combinations(cols, k) {
                let sub: Vec<Vec<i128>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| m[r][c]).collect())
                    .collect();
                g = gcd(g, det_laplace(&sub));
            }
        }
        if g != 0 {
            return (k, g);
        }
    }
    (0, 1)
}

/// `M x = b` has an integer solution iff `M` and `[M | b]` have the same
/// rank and the same gcd of maximal minors.
pub fn integer_solvable(m: &[Vec<i64>], b: &[i64]) -> bool {
    let mm: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let aug: Vec<Vec<i128>> = m
        .iter()
        .zip(b)
        .map(|(r, &x)| {
            r.iter()
                .map(|&y| y as i128)
                .chain(std::iter::once(x as i128))
                .collect()
        })
        .collect();
    let (r1, d1) = determinantal_divisor(&mm);
    let (r2, d2) = determinantal_divisor(&aug);
    r1 == r2 && d1 == d2
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Every vector in `[-2, 2]^n` with the given Euclidean norm.
fn vectors_of_norm(norm: i64, n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let total = 5usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let v: Vec<i64> = (0..n)
            .map(|_| {
                let d = (c % 5) as i64 - 2;
                c /= 5;
                d
            })
            .collect();
        if dot(&v, &v) == norm {
            out.push(v);
        }
    }
    out
}

/// Naive decision of whether a negative definite Gram matrix `g` admits
/// images in `Z^(r+2m)` (standard form `-Id`), `m` norm-2 vectors `u`
/// orthogonal to the images and to each other, and for each `j` an integer
/// `w_j` with `u_i·w_j = δ_ij` and `w_j` orthogonal to the images.
///
/// Only the first image is normalised (sorted, nonnegative), which every
/// signed permutation of coordinates allows.
pub fn brute_force_embeds(g: &[Vec<i64>], m: usize) -> bool {
    let r = g.len();
    let n = r + 2 * m;
    let cands: Vec<Vec<Vec<i64>>> = (0..r).map(|i| vectors_of_norm(-g[i][i], n)).collect();
    let units = vectors_of_norm(2, n);
    let mut placed: Vec<Vec<i64>> = Vec::new();
    place(g, m, &cands, &units, &mut placed)
}

fn place(
    g: &[Vec<i64>],
    m: usize,
    cands: &[Vec<Vec<i64>>],
    units: &[Vec<i64>],
    placed: &mut Vec<Vec<i64>>,
) -> bool {
    let r = g.len();
    let i = placed.len();
    if i == r + m {
        return dual_exists(r, m, placed);
    }
    let pool = if i < r { &cands[i] } else { units };
    for v in pool {
        if i == 0 && !(v.iter().all(|&x| x >= 0) && v.windows(2).all(|w| w[0] >= w[1])) {
            continue;
        }
        let ok = placed.iter().enumerate().all(|(j, p)| {
            let want = if i < r {
                -g[i][j]
            } else {
                0 // u against images and against other u
            };
            dot(v, p) == want
        });
        if ok {
            placed.push(v.clone());
            if place(g, m, cands, units, placed) {
                return true;
            }
            placed.pop();
        }
    }
    false
}

fn dual_exists(r: usize, m: usize, placed: &[Vec<i64>]) -> bool {
    (0..m).all(|j| {
        let rhs: Vec<i64> = (0..r + m).map(|k| if k == r + j { 1 } else { 0 }).collect();
        integer_solvable(placed, &rhs)
    })
}

/// All negative definite symmetric matrices of the given rank with diagonal
/// in `[-4, -1]`; off-diagonal entries are bounded by Cauchy-Schwarz.
pub fn small_negative_definite(rank: usize) -> Vec<Vec<Vec<i64>>> {
    let pairs: Vec<(usize, usize)> = (0..rank)
        .flat_map(|i| (i + 1..rank).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    let diag_count = 4usize.pow(rank as u32);
    for dcode in 0..diag_count {
        let mut c = dcode;
        let diag: Vec<i64> = (0..rank)
            .map(|_| {
                let d = -((c % 4) as i64) - 1;
                c /= 4;
                d
            })
            .collect();
        let off_count = 7usize.pow(pairs.len() as u32);
        for ocode in 0..off_count {
            let mut c = ocode;
            let mut g = vec![vec![0i64; rank]; rank];
            for i in 0..rank {
                g[i][i] = diag[i];
            }
            for &(i, j) in &pairs {
                let x = (c % 7) as i64 - 3;
                c /= 7;
                g[i][j] = x;
                g[j][i] = x;
            }
            if is_negative_definite(&g) {
                out.push(g);
            }
        }
    }
    out
}

/// Sylvester's criterion on `-g`.
pub fn is_negative_definite(g: &[Vec<i64>]) -> bool {
    (1..=g.len()).all(|k| {
        let sub: Vec<Vec<i128>> = (0..k)
            .map(|i| (0..k).map(|j| -g[i][j] as i128).collect())
            .collect();
        det_laplace(&sub) > 0
    })
}

/// Smallest sorted `(k, l, m)` with `k² + l² + m² = n`, by enumeration.
pub fn three_squares_naive(n: u64) -> Option<(u64, u64, u64)> {
    let mut k = 0;
    while 3 * k * k <= n {
        let mut l = k;
        while k * k + 2 * l * l <= n {
            let rest = n - k * k - l * l;
            let m = (rest as f64).sqrt() as u64;
            for mm in [m.saturating_sub(1), m, m + 1] {
                if mm >= l && mm * mm == rest {
                    return Some((k, l, mm));
                }
            }
            l += 1;
        }
        k += 1;
    }
    None
}

/// `σ(A + A^T)` by counting sign changes in leading principal minors after
/// a rational congruence diagonalisation, done in `f64` with exact `i128`
/// fallback for the tiny sizes used in tests.
pub fn signature_naive(a: &[Vec<i64>]) -> i64 {
    let n = a.len();
    let mut s: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (a[i][j] + a[j][i]) as f64).collect())
        .collect();
    let mut sig = 0;
    let mut size = n;
    // Symmetric Gaussian elimination with pivoting on the diagonal or on a 2x2 block.
    while size > 0 {
        let k = n - size;
        let piv = (k..n)
            .max_by(|&x, &y| s[x][x].abs().total_cmp(&s[y][y].abs()))
            .unwrap();
        if s[piv][piv].abs() > 1e-9 {
            s.swap(k, piv);
            for row in s.iter_mut() {
                row.swap(k, piv);
            }
            let d = s[k][k];
            sig += if d > 0.0 { 1 } else { -1 };
            for i in k + 1..n {
                let f = s[i][k] / d;
                for j in k..n {
                    s[i][j] -= f * s[k][j];
                }
            }
            for j in k + 1..n {
                let f = s[k][j] / d;
                for i in k..n {
                    s[i][j] -= f * s[i][k];
                }
            }
            size -= 1;
        } else if let Some((i, j)) = (k..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| s[i][j].abs() > 1e-9)
        {
            // x_i -> x_i + x_j makes a nonzero diagonal entry
            let _ = i;
            for c in 0..n {
                let v = s[j][c];
                s[i][c] += v;
            }
            for rrow in s.iter_mut() {
                let v = rrow[j];
                rrow[i] += v;
            }
        } else {
            break;
        }
    }
    sig
}
