//! Closed-form obstructions for odd pretzel knots and sums of squares.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::isqrt;
use crate::plumbing::check_pretzel_filling_hypotheses;
use crate::seifert::bryant_signature;

/// Integers `a[j][i]` and `b[j][l]` solving the pretzel system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PretzelWitness {
    pub a: Vec<Vec<i64>>,
    pub b: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PretzelVerdict {
    Solvable(PretzelWitness),
    Unsolvable,
}

/// Searches for integers `a_i^j`, `b_l^j` (`1 <= l <= m`) with
///
/// 1. `Σ_i a_i^j = 1` and `Σ_i (a_i^j)² p_i + 2 Σ_l (b_l^j)² = |q_j|`,
/// 2. `Σ_i a_i^j a_i^j' p_i + 2 Σ_l b_l^j b_l^j' = 0` for `j != j'`.
///
/// These are forced by an embedding of the star-shaped filling, so no
/// solution means the knot is not slice in `#^m CP²`. The first solution in
/// lexicographic order is returned.
pub fn pretzel_condition(positives: &[i64], negatives: &[i64], m: usize) -> Result<PretzelVerdict> {
    check_pretzel_filling_hypotheses(positives, negatives)?;
    let blocks: Vec<Vec<(Vec<i64>, Vec<i64>)>> = negatives
        .iter()
        .map(|&q| block_solutions(positives, -q, m))
        .collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(blocks.len());
    if backtrack(positives, &blocks, &mut chosen) {
        let (a, b) = chosen
            .iter()
            .enumerate()
            .map(|(j, &c)| blocks[j][c].clone())
            .unzip();
        let w = PretzelWitness { a, b };
        if !verify_pretzel_witness(positives, negatives, m, &w) {
            return Err(Error::Internal("pretzel witness failed to verify".into()));
        }
        Ok(PretzelVerdict::Solvable(w))
    } else {
        Ok(PretzelVerdict::Unsolvable)
    }
}

fn cross(p: &[i64], x: &(Vec<i64>, Vec<i64>), y: &(Vec<i64>, Vec<i64>)) -> i64 {
    let a: i64 =
        x.0.iter()
            .zip(&y.0)
            .zip(p)
            .map(|((s, t), p)| s * t * p)
            .sum();
    let b: i64 = x.1.iter().zip(&y.1).map(|(s, t)| s * t).sum();
    a + 2 * b
}

fn backtrack(p: &[i64], blocks: &[Vec<(Vec<i64>, Vec<i64>)>], chosen: &mut Vec<usize>) -> bool {
    let j = chosen.len();
    if j == blocks.len() {
        return true;
    }
    for c in 0..blocks[j].len() {
        let ok = chosen
            .iter()
            .enumerate()
            .all(|(jj, &cc)| cross(p, &blocks[jj][cc], &blocks[j][c]) == 0);
        if ok {
            chosen.push(c);
            if backtrack(p, blocks, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// All `(a, b)` satisfying condition (1) for one `|q|`, lexicographically.
fn block_solutions(p: &[i64], q: i64, m: usize) -> Vec<(Vec<i64>, Vec<i64>)> {
    let mut out = Vec::new();
    let mut a = vec![0; p.len()];
    fn rec_a(
        i: usize,
        sum: i64,
        rem: i64,
        p: &[i64],
        a: &mut Vec<i64>,
        m: usize,
        out: &mut Vec<(Vec<i64>, Vec<i64>)>,
    ) {
        if i == p.len() {
            if sum != 1 || rem % 2 != 0 {
                return;
            }
            let mut b = vec![0; m];
            rec_b(0, rem / 2, &mut b, &mut |bb| {
                out.push((a.clone(), bb.to_vec()))
            });
            return;
        }
        let bound = isqrt(rem / p[i]);
        for x in -bound..=bound {
            a[i] = x;
            rec_a(i + 1, sum + x, rem - x * x * p[i], p, a, m, out);
        }
        a[i] = 0;
    }
    fn rec_b(l: usize, rem: i64, b: &mut Vec<i64>, emit: &mut dyn FnMut(&[i64])) {
        if l == b.len() {
            if rem == 0 {
                emit(b);
            }
            return;
        }
        let bound = isqrt(rem);
        for x in -bound..=bound {
            b[l] = x;
            rec_b(l + 1, rem - x * x, b, emit);
        }
        b[l] = 0;
    }
    rec_a(0, 0, q, p, &mut a, m, &mut out);
    out
}

pub fn verify_pretzel_witness(
    positives: &[i64],
    negatives: &[i64],
    m: usize,
    w: &PretzelWitness,
) -> bool {
    let k = negatives.len();
    if w.a.len() != k || w.b.len() != k {
        return false;
    }
    if w.a.iter().any(|a| a.len() != positives.len()) || w.b.iter().any(|b| b.len() != m) {
        return false;
    }
    for j in 0..k {
        let s: i64 = w.a[j].iter().sum();
        let n: i64 = w.a[j]
            .iter()
            .zip(positives)
            .map(|(a, p)| a * a * p)
            .sum::<i64>()
            + 2 * w.b[j].iter().map(|b| b * b).sum::<i64>();
        if s != 1 || n != -negatives[j] {
            return false;
        }
        for jj in j + 1..k {
            let c: i64 = (0..positives.len())
                .map(|i| w.a[j][i] * w.a[jj][i] * positives[i])
                .sum::<i64>()
                + 2 * (0..m).map(|l| w.b[j][l] * w.b[jj][l]).sum::<i64>();
            if c != 0 {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SliceReason {
    /// `P(-q-2k, q, r)`: `k` positive to negative crossing changes reach `P(-q, q, r)`.
    NegativeAbsorbsPositive { k: i64 },
    /// At least two negative parameters.
    TwoNegatives,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NotSliceReason {
    /// Signature is 2, so the signature function is not non-positive.
    PositiveSignature,
    /// Signature is 0 but the pretzel system forces `a_q = a_r = 0`.
    NoIntegerSolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositiveSliceClass {
    PositivelySlice(SliceReason),
    NotPositivelySlice(NotSliceReason),
}

fn check_three(params: [i64; 3]) -> Result<()> {
    if let Some(x) = params.iter().find(|&&x| x % 2 == 0 || x.abs() == 1) {
        return invalid(format!("parameter {x} must be odd with |x| >= 3"));
    }
    Ok(())
}

/// Whether an odd 3-strand pretzel knot is slice in some `#^m CP²`.
pub fn positively_slice_class(p: i64, q: i64, r: i64) -> Result<PositiveSliceClass> {
    check_three([p, q, r])?;
    let params = [p, q, r];
    let negs: Vec<i64> = params.iter().copied().filter(|&x| x < 0).collect();
    let pos: Vec<i64> = params.iter().copied().filter(|&x| x > 0).collect();
    use PositiveSliceClass::*;
    match negs.len() {
        0 => Ok(NotPositivelySlice(NotSliceReason::PositiveSignature)),
        1 => {
            let n = -negs[0];
            let smallest = *pos.iter().min().expect("two positives");
            if n >= smallest {
                Ok(PositivelySlice(SliceReason::NegativeAbsorbsPositive {
                    k: (n - smallest) / 2,
                }))
            } else if bryant_signature(&params)? == 2 {
                Ok(NotPositivelySlice(NotSliceReason::PositiveSignature))
            } else {
                Ok(NotPositivelySlice(NotSliceReason::NoIntegerSolution))
            }
        }
        _ => Ok(PositivelySlice(SliceReason::TwoNegatives)),
    }
}

/// `{p,q,r} = ±{a, b, -a-c}` with `a, b > 0` and `c >= 0`.
///
/// `c = 0` is admitted: then the knot is `P(a,-a,b)`, which is ribbon.
pub fn biprojectively_slice_3strand(p: i64, q: i64, r: i64) -> Result<bool> {
    check_three([p, q, r])?;
    let params = [p, q, r];
    for s in [1, -1] {
        for perm in [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ] {
            let (a, b, n) = (
                s * params[perm[0]],
                s * params[perm[1]],
                s * params[perm[2]],
            );
            if a > 0 && b > 0 && -n - a >= 0 {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Legendre: `n` is a sum of three squares iff it is not `4^a (8b + 7)`.
pub fn is_sum_of_three_squares(mut n: u64) -> bool {
    if n == 0 {
        return true;
    }
    while n % 4 == 0 {
        n /= 4;
    }
    n % 8 != 7
}

/// Lexicographically smallest `k <= l <= m` with `k² + l² + m² = n`.
pub fn three_square(n: u64) -> Option<(u64, u64, u64)> {
    let found = three_square_search(n, 0);
    if found.is_some() != is_sum_of_three_squares(n) {
        panic!("three-square search disagrees with Legendre's criterion at {n}");
    }
    found
}

fn three_square_search(n: u64, min: u64) -> Option<(u64, u64, u64)> {
    let mut k = min;
    while 3 * k * k <= n {
        let mut l = k;
        while k * k + 2 * l * l <= n {
            let rest = n - k * k - l * l;
            let m = isqrt_u(rest);
            if m * m == rest && m >= l {
                return Some((k, l, m));
            }
            l += 1;
        }
        k += 1;
    }
    None
}

/// Lexicographically smallest `k <= l <= m <= n'` with squares summing to `n`.
pub fn four_square(n: u64) -> (u64, u64, u64, u64) {
    let mut k = 0;
    while 4 * k * k <= n {
        if let Some((l, m, o)) = three_square_search(n - k * k, k) {
            return (k, l, m, o);
        }
        k += 1;
    }
    unreachable!("every nonnegative integer is a sum of four squares")
}

pub fn is_perfect_square(n: i64) -> bool {
    n >= 0 && {
        let r = isqrt(n);
        r * r == n
    }
}

fn isqrt_u(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
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

    #[test]
    fn pretzel_condition_examples() {
        assert_eq!(
            pretzel_condition(&[3, 9], &[-5], 0).unwrap(),
            PretzelVerdict::Unsolvable
        );
        assert_eq!(
            pretzel_condition(&[3, 9], &[-7], 1).unwrap(),
            PretzelVerdict::Unsolvable
        );
        assert_eq!(
            pretzel_condition(&[3, 3, 3], &[-5, -5], 1).unwrap(),
            PretzelVerdict::Unsolvable
        );
        match pretzel_condition(&[3, 9], &[-5], 1).unwrap() {
            PretzelVerdict::Solvable(w) => {
                assert_eq!(w.a, vec![vec![1, 0]]);
                assert_eq!(w.b, vec![vec![-1]]);
            }
            v => panic!("{v:?}"),
        }
        assert!(pretzel_condition(&[3, 4], &[-5], 0).is_err());
    }

    #[test]
    fn slice_classes() {
        use PositiveSliceClass::*;
        assert_eq!(
            positively_slice_class(3, -5, 9).unwrap(),
            PositivelySlice(SliceReason::NegativeAbsorbsPositive { k: 1 })
        );
        assert_eq!(
            positively_slice_class(3, 5, 7).unwrap(),
            NotPositivelySlice(NotSliceReason::PositiveSignature)
        );
        assert_eq!(
            positively_slice_class(-3, -5, 7).unwrap(),
            PositivelySlice(SliceReason::TwoNegatives)
        );
        assert_eq!(
            positively_slice_class(-3, 5, 7).unwrap(),
            NotPositivelySlice(NotSliceReason::NoIntegerSolution)
        );
        assert!(positively_slice_class(1, 3, 5).is_err());
    }

    #[test]
    fn biprojective() {
        assert!(biprojectively_slice_3strand(3, -5, 9).unwrap());
        assert!(!biprojectively_slice_3strand(3, 5, 7).unwrap());
        assert!(biprojectively_slice_3strand(3, -5, 3).unwrap());
        assert!(biprojectively_slice_3strand(3, -3, 5).unwrap());
    }

    #[test]
    fn squares() {
        assert_eq!(three_square(7), None);
        assert_eq!(three_square(6), Some((1, 1, 2)));
        assert_eq!(three_square(0), Some((0, 0, 0)));
        assert_eq!(four_square(0), (0, 0, 0, 0));
        assert_eq!(four_square(7), (1, 1, 1, 2));
        assert!(is_perfect_square(49));
        assert!(!is_perfect_square(45));
    }
}
