//! Seifert matrices and classical knot invariants derived from them.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{invalid, Error, Result};
use crate::matrix;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeifertMatrix {
    entries: Vec<Vec<i64>>,
}

impl SeifertMatrix {
    /// Checks that `A` is square of even size with `det(A - A^T) = 1`.
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        if !matrix::is_square(&entries) || entries.len() % 2 != 0 {
            return Err(Error::DimensionMismatch(
                "a Seifert matrix is square of even size".into(),
            ));
        }
        let skew: Vec<Vec<i64>> = (0..entries.len())
            .map(|i| {
                (0..entries.len())
                    .map(|j| entries[i][j] - entries[j][i])
                    .collect()
            })
            .collect();
        if matrix::det(&skew) != BigInt::one() {
            return invalid("det(A - A^T) must be 1");
        }
        Ok(Self { entries })
    }

    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn genus(&self) -> usize {
        self.entries.len() / 2
    }

    pub fn transpose(&self) -> Vec<Vec<i64>> {
        matrix::transpose(&self.entries)
    }

    /// `-A^T`.
    pub fn mirror(&self) -> Self {
        let t = self.transpose();
        Self {
            entries: t
                .into_iter()
                .map(|r| r.into_iter().map(|x| -x).collect())
                .collect(),
        }
    }

    pub fn connected_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.size(), other.size());
        let mut e = vec![vec![0; a + b]; a + b];
        for i in 0..a {
            e[i][..a].copy_from_slice(&self.entries[i]);
        }
        for i in 0..b {
            e[a + i][a..].copy_from_slice(&other.entries[i]);
        }
        Self { entries: e }
    }

    pub fn symmetrized(&self) -> Vec<Vec<i64>> {
        let n = self.size();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.entries[i][j] + self.entries[j][i])
                    .collect()
            })
            .collect()
    }

    /// `sig(A + A^T)`.
    pub fn signature(&self) -> i64 {
        matrix::signature(&self.symmetrized())
    }

    /// `det(tA - A^T)`, normalised.
    pub fn alexander(&self) -> LaurentPolynomial {
        det_pencil(&self.entries, &self.transpose()).normalized()
    }

    /// `|Δ(-1)| = |det(A + A^T)|`.
    pub fn knot_determinant(&self) -> BigInt {
        matrix::det(&self.symmetrized()).abs()
    }

    /// Tristram-Levine signature at `ω = exp(iπ·num/den)`.
    pub fn tristram_levine(&self, omega: UnitSample) -> std::result::Result<i64, NearSingular> {
        if omega.is_minus_one() {
            return Ok(self.signature());
        }
        if omega.is_one() {
            return Ok(0);
        }
        let n = self.size();
        if n == 0 {
            return Ok(0);
        }
        let theta = std::f64::consts::PI * omega.num as f64 / omega.den as f64;
        let (c, s) = (theta.cos(), theta.sin());
        // H = (1-ω)A + (1-ω̄)A^T = X + iY
        let mut real = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let a = self.entries[i][j] as f64;
                let at = self.entries[j][i] as f64;
                let x = (1.0 - c) * (a + at);
                let y = -s * a + s * at;
                real[(i, j)] = x;
                real[(n + i, n + j)] = x;
                real[(i, n + j)] = -y;
                real[(n + i, j)] = y;
            }
        }
        let eig = nalgebra::SymmetricEigen::new(real);
        let abs_det = eig
            .eigenvalues
            .iter()
            .map(|l| l.abs())
            .product::<f64>()
            .sqrt();
        if abs_det < TL_GUARD {
            return Err(NearSingular);
        }
        let pos = eig.eigenvalues.iter().filter(|&&l| l > 0.0).count() as i64;
        let neg = eig.eigenvalues.iter().filter(|&&l| l < 0.0).count() as i64;
        Ok((pos - neg) / 2)
    }
}

impl fmt::Display for SeifertMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.entries)
    }
}

pub const TL_GUARD: f64 = 1e-9;
pub const DEFAULT_TL_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("Hermitian form is nearly singular at this sample")]
pub struct NearSingular;

/// The point `exp(iπ·num/den)` on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitSample {
    pub num: i64,
    pub den: i64,
}

impl UnitSample {
    pub const MINUS_ONE: UnitSample = UnitSample { num: 1, den: 1 };

    fn is_minus_one(&self) -> bool {
        self.num.rem_euclid(2 * self.den) == self.den
    }

    fn is_one(&self) -> bool {
        self.num.rem_euclid(2 * self.den) == 0
    }

    /// `samples` equally spaced points strictly inside the upper half circle.
    pub fn upper_half(samples: usize) -> Vec<UnitSample> {
        let den = samples as i64 + 1;
        (1..=samples as i64)
            .map(|num| UnitSample { num, den })
            .collect()
    }
}

/// Integer Laurent polynomial `Σ coeffs[i] t^(min_degree + i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LaurentPolynomial {
    pub min_degree: i64,
    pub coeffs: Vec<i64>,
}

impl LaurentPolynomial {
    pub fn new(min_degree: i64, coeffs: Vec<i64>) -> Self {
        let mut p = Self { min_degree, coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self {
            min_degree: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        self.coeffs.drain(..lead);
        self.min_degree += lead as i64;
        if self.coeffs.is_empty() {
            self.min_degree = 0;
        }
    }

    /// Shift to `min_degree = 0` and make the constant term positive.
    pub fn normalized(&self) -> Self {
        let mut p = self.clone();
        p.trim();
        p.min_degree = 0;
        if p.coeffs.first().is_some_and(|&c| c < 0) {
            p.coeffs.iter_mut().for_each(|c| *c = -*c);
        }
        p
    }

    /// Equality up to multiplication by `±t^k`.
    pub fn equivalent(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }

    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].abs() == 1
    }

    /// Invariant under `t -> 1/t` up to units.
    pub fn is_symmetric(&self) -> bool {
        let mut r = self.coeffs.clone();
        r.reverse();
        let flipped = LaurentPolynomial::new(0, r);
        self.equivalent(&flipped)
    }

    pub fn eval(&self, t: i64) -> BigRational {
        let t = BigRational::from_integer(t.into());
        let mut acc = BigRational::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * &t + BigRational::from_integer(c.into());
        }
        if self.min_degree >= 0 {
            acc * pow(&t, self.min_degree as u32)
        } else {
            acc / pow(&t, (-self.min_degree) as u32)
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut c = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(self.min_degree + other.min_degree, c)
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let d = self.min_degree + i as i64;
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match d {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    match d {
                        1 => write!(f, "t")?,
                        _ => write!(f, "t^{d}")?,
                    }
                }
            }
        }
        Ok(())
    }
}

fn pow(t: &BigRational, e: u32) -> BigRational {
    let mut r = BigRational::one();
    for _ in 0..e {
        r *= t;
    }
    r
}

/// `det(t·a - b)` as a polynomial, by exact interpolation at `t = 0..n`.
pub fn det_pencil(a: &[Vec<i64>], b: &[Vec<i64>]) -> LaurentPolynomial {
    let n = a.len();
    let points: Vec<i64> = (0..=n as i64).collect();
    let values: Vec<BigRational> = points
        .iter()
        .map(|&t| {
            let m: Vec<Vec<i64>> = (0..n)
                .map(|i| (0..n).map(|j| t * a[i][j] - b[i][j]).collect())
                .collect();
            BigRational::from_integer(matrix::det(&m))
        })
        .collect();
    let coeffs = interpolate(&points, &values);
    LaurentPolynomial::new(
        0,
        coeffs
            .into_iter()
            .map(|c| {
                assert!(c.is_integer(), "integer determinant polynomial");
                c.to_integer().to_i64().expect("coefficient fits in i64")
            })
            .collect(),
    )
}

// Newton divided differences, expanded into monomial coefficients.
fn interpolate(xs: &[i64], ys: &[BigRational]) -> Vec<BigRational> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            dd[i] = num / BigRational::from_integer((xs[i] - xs[i - level]).into());
        }
    }
    let mut poly = vec![BigRational::zero(); n];
    for k in (0..n).rev() {
        // poly = poly * (t - x_k) + dd[k]
        let mut next = vec![BigRational::zero(); n];
        let xk = BigRational::from_integer(xs[k].into());
        for i in 0..n {
            if poly[i].is_zero() {
                continue;
            }
            if i + 1 < n {
                next[i + 1] += &poly[i];
            }
            next[i] -= &poly[i] * &xk;
        }
        next[0] += &dd[k];
        poly = next;
    }
    poly
}

/// `M_a = [[1,1],[0,-a]]` for the twist knot `K_a`.
pub fn twist_seifert(a: i64) -> Result<SeifertMatrix> {
    if a < 1 {
        return invalid(format!("twist parameter must be >= 1, got {a}"));
    }
    SeifertMatrix::new(vec![vec![1, 1], vec![0, -a]])
}

/// Seifert matrix of `P(a,b,c)` with all parameters odd.
pub fn pretzel3_seifert(a: i64, b: i64, c: i64) -> Result<SeifertMatrix> {
    pretzel_seifert(&[a, b, c])
}

/// Seifert matrix of an odd pretzel knot with an odd number of strands.
///
/// Tridiagonal; generator `i` runs between the boxes `n-2-i` and `n-1-i`.
/// For three strands `(a,b,c)` this is `[[(b+c)/2, (b-1)/2], [(b+1)/2, (a+b)/2]]`.
pub fn pretzel_seifert(params: &[i64]) -> Result<SeifertMatrix> {
    check_odd_params(params)?;
    if params.len() % 2 == 0 {
        return invalid("an odd pretzel knot needs an odd number of strands");
    }
    let n = params.len();
    let g = n - 1;
    let mut v = vec![vec![0; g]; g];
    for i in 0..g {
        let (lo, hi) = (n - 2 - i, n - 1 - i);
        v[i][i] = (params[lo] + params[hi]) / 2;
        if i + 1 < g {
            v[i][i + 1] = (params[lo] - 1) / 2;
            v[i + 1][i] = (params[lo] + 1) / 2;
        }
    }
    SeifertMatrix::new(v)
}

/// Right-handed `T(2, 2m+1)`.
pub fn torus2_seifert(m: i64) -> Result<SeifertMatrix> {
    if m < 1 {
        return invalid(format!("torus parameter m must be >= 1, got {m}"));
    }
    let n = 2 * m as usize;
    let mut v = vec![vec![0; n]; n];
    for i in 0..n {
        v[i][i] = -1;
        if i + 1 < n {
            v[i][i + 1] = 1;
        }
    }
    SeifertMatrix::new(v)
}

fn check_odd_params(params: &[i64]) -> Result<()> {
    if params.is_empty() {
        return invalid("empty parameter list");
    }
    if let Some(p) = params.iter().find(|&&p| p % 2 == 0) {
        return invalid(format!("pretzel parameter {p} is not odd"));
    }
    Ok(())
}

/// `σ = #positive - #negative - sgn(Σ 1/q_i)`, with `sgn(0) = 0`.
///
/// Lists with an even number of strands describe links and are rejected.
pub fn bryant_signature(params: &[i64]) -> Result<i64> {
    check_odd_params(params)?;
    if params.len() % 2 == 0 {
        return invalid("an even number of odd strands gives a link");
    }
    let pos = params.iter().filter(|&&p| p > 0).count() as i64;
    let neg = params.len() as i64 - pos;
    let total: BigRational = params
        .iter()
        .map(|&q| BigRational::new(BigInt::one(), q.into()))
        .sum();
    let sgn = if total.is_zero() {
        0
    } else if total.is_positive() {
        1
    } else {
        -1
    };
    Ok(pos - neg - sgn)
}

/// `((pq+qr+pr)(t-2+1/t) + (t+2+1/t)) / 4`, with `min_degree = -1`.
pub fn pretzel3_alexander(p: i64, q: i64, r: i64) -> Result<LaurentPolynomial> {
    check_odd_params(&[p, q, r])?;
    let s = p * q + q * r + p * r;
    let outer = s + 1;
    let middle = -2 * s + 2;
    if outer % 4 != 0 || middle % 4 != 0 {
        return Err(Error::Internal(format!(
            "pretzel Alexander numerator not divisible by 4 for ({p},{q},{r})"
        )));
    }
    Ok(LaurentPolynomial::new(
        -1,
        vec![outer / 4, middle / 4, outer / 4],
    ))
}

/// Lower bound or infinity for one side of the slicing number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateBound {
    Infinite,
    AtLeast(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleValue {
    pub omega: UnitSample,
    /// `None` when the sample was skipped by the singularity guard.
    pub value: Option<i64>,
}

/// Outcome of the signature-function gate.
///
/// `cp2` bounds `u_CP2` and its topological version from below; `cp2bar`
/// does the same for the reversed orientation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureGate {
    pub samples: Vec<SampleValue>,
    pub cp2: GateBound,
    pub cp2bar: GateBound,
}

impl SignatureGate {
    pub fn skipped(&self) -> usize {
        self.samples.iter().filter(|s| s.value.is_none()).count()
    }
}

/// If `K` is slice in `#^m CP²` then `-2m <= σ_K(ω) <= 0` at every regular
/// `ω`; the mirror statement handles `#^m CP²bar`.
pub fn signature_gate(a: &SeifertMatrix, samples: usize) -> Result<SignatureGate> {
    if samples == 0 {
        return invalid("need at least one sample");
    }
    let mut pts = vec![UnitSample::MINUS_ONE];
    pts.extend(UnitSample::upper_half(samples));
    let values: Vec<SampleValue> = pts
        .into_iter()
        .map(|omega| SampleValue {
            omega,
            value: a.tristram_levine(omega).ok(),
        })
        .collect();
    let valid: Vec<i64> = values.iter().filter_map(|s| s.value).collect();
    let max = valid.iter().copied().max().unwrap_or(0);
    let min = valid.iter().copied().min().unwrap_or(0);
    let cp2 = if max > 0 {
        GateBound::Infinite
    } else {
        GateBound::AtLeast(ceil_half(-min))
    };
    let cp2bar = if min < 0 {
        GateBound::Infinite
    } else {
        GateBound::AtLeast(ceil_half(max))
    };
    Ok(SignatureGate {
        samples: values,
        cp2,
        cp2bar,
    })
}

fn ceil_half(x: i64) -> u64 {
    Rational64::new(x.max(0), 2).ceil().to_integer() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twist_matrices() {
        assert_eq!(
            twist_seifert(3).unwrap().entries(),
            &[vec![1, 1], vec![0, -3]]
        );
        let k2 = twist_seifert(2).unwrap();
        assert_eq!(k2.signature(), 0);
        assert_eq!(k2.knot_determinant(), 9.into());
        assert!(twist_seifert(0).is_err());
        for a in 1..=10 {
            assert_eq!(
                twist_seifert(a).unwrap().knot_determinant(),
                (4 * a + 1).into()
            );
        }
    }

    #[test]
    fn pretzel_matrices() {
        let a = pretzel3_seifert(3, -5, 15).unwrap();
        assert_eq!(a.signature(), 0);
        assert_eq!(a.knot_determinant(), 45.into());
        assert_eq!(pretzel3_seifert(3, -5, 9).unwrap().signature(), 0);
        assert_eq!(pretzel3_seifert(3, 5, 7).unwrap().signature(), 2);
        assert!(pretzel3_seifert(2, 5, 7).is_err());
        // rank-one family shape at (p,k) = (3,1): [[p+3k-1, (-p-1)/2-k], [(-p+1)/2-k, -k]]
        assert_eq!(a.entries(), &[vec![5, -3], vec![-2, -1]]);
    }

    #[test]
    fn torus_matrices() {
        let t = torus2_seifert(1).unwrap();
        assert_eq!(t.entries(), &[vec![-1, 1], vec![0, -1]]);
        assert_eq!(t.signature(), -2);
        assert_eq!(torus2_seifert(2).unwrap().signature(), -4);
        assert_eq!(t.mirror().signature(), 2);
        assert_eq!(t.mirror().mirror(), t);
    }

    #[test]
    fn alexander_examples() {
        let d = pretzel3_seifert(3, -5, 9).unwrap().alexander();
        assert_eq!(d, LaurentPolynomial::new(0, vec![8, -17, 8]));
        let f = pretzel3_alexander(3, -5, 9).unwrap();
        assert_eq!(f, LaurentPolynomial::new(-1, vec![-8, 17, -8]));
        assert!(d.equivalent(&f));
        assert_eq!(
            pretzel3_alexander(1, 1, 1).unwrap(),
            LaurentPolynomial::new(-1, vec![1, -1, 1])
        );
        let t = torus2_seifert(1).unwrap().alexander();
        assert_eq!(t, LaurentPolynomial::new(0, vec![1, -1, 1]));
        assert_eq!(format!("{}", f), "-8t + 17 - 8t^-1");
    }

    #[test]
    fn bryant_examples() {
        assert_eq!(bryant_signature(&[3, -5, 9]).unwrap(), 0);
        assert_eq!(bryant_signature(&[3, 5, 7]).unwrap(), 2);
        assert_eq!(bryant_signature(&[-3, -5, -7]).unwrap(), -2);
        assert!(bryant_signature(&[3, 4, 5]).is_err());
        assert!(bryant_signature(&[3, 5]).is_err());
    }

    #[test]
    fn tristram_levine_at_minus_one() {
        for a in [
            twist_seifert(4).unwrap(),
            torus2_seifert(3).unwrap(),
            pretzel3_seifert(3, 5, 7).unwrap(),
        ] {
            assert_eq!(a.tristram_levine(UnitSample::MINUS_ONE), Ok(a.signature()));
            assert_eq!(
                a.tristram_levine(UnitSample {
                    num: 999,
                    den: 1000
                }),
                Ok(a.signature())
            );
        }
    }

    #[test]
    fn gates() {
        let t = torus2_seifert(1).unwrap();
        let g = signature_gate(&t, 64).unwrap();
        assert_eq!(g.cp2, GateBound::AtLeast(1));
        assert_eq!(g.cp2bar, GateBound::Infinite);
        let g = signature_gate(&twist_seifert(3).unwrap(), 64).unwrap();
        assert_eq!(g.cp2, GateBound::AtLeast(0));
        assert_eq!(g.cp2bar, GateBound::AtLeast(0));
        assert_eq!(g.skipped(), 0);
    }
}
