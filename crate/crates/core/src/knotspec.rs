//! Knot expressions: parsing, normal form, derived data and crossing-change rules.
//!
//! Grammar:
//!
//! ```text
//! expr := term ('#' term)*
//! term := (count '*')? '-'? (atom | '(' expr ')')
//! atom := 'K(' int ')' | 'P(' int (',' int)* ')' | 'T(2,' int ')' | 'U'
//! ```
//!
//! `-` is the mirror. `T(2,n)` with `n < 0` is the mirror of `T(2,|n|)`.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{Definiteness, IntegralLattice};
use crate::plumbing::{
    check_pretzel_filling_hypotheses, lens_neg_filling, pretzel_plumbing, twist_cover,
};
use crate::seifert::{pretzel_seifert, torus2_seifert, twist_seifert, SeifertMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KnotExpr {
    Unknot,
    /// `K_a`, `a >= 1`; its double branched cover is `L(4a+1, 2)`.
    Twist(i64),
    /// Odd parameters, odd number of strands (at least three).
    Pretzel(Vec<i64>),
    /// `T(2, 2m+1)`, `m >= 1`.
    Torus2(i64),
    Mirror(Box<KnotExpr>),
    Sum(Vec<KnotExpr>),
}

impl KnotExpr {
    pub fn mirror(self) -> Self {
        KnotExpr::Mirror(Box::new(self))
    }

    /// Pushes mirrors onto atoms, cancels double mirrors, flattens sums and
    /// drops unknot summands. A mirrored pretzel becomes the pretzel with
    /// negated parameters.
    pub fn normalize(&self) -> KnotExpr {
        let mut parts = Vec::new();
        collect(self, false, &mut parts);
        match parts.len() {
            0 => KnotExpr::Unknot,
            1 => parts.pop().unwrap(),
            _ => KnotExpr::Sum(parts),
        }
    }

    /// Connected summands of the normal form; empty for the unknot.
    pub fn summands(&self) -> Vec<KnotExpr> {
        match self.normalize() {
            KnotExpr::Unknot => Vec::new(),
            KnotExpr::Sum(v) => v,
            k => vec![k],
        }
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

fn collect(k: &KnotExpr, mirrored: bool, out: &mut Vec<KnotExpr>) {
    match k {
        KnotExpr::Unknot => {}
        KnotExpr::Mirror(inner) => collect(inner, !mirrored, out),
        KnotExpr::Sum(ks) => ks.iter().for_each(|x| collect(x, mirrored, out)),
        KnotExpr::Pretzel(ps) if mirrored => {
            out.push(KnotExpr::Pretzel(ps.iter().map(|p| -p).collect()))
        }
        atom if mirrored => out.push(atom.clone().mirror()),
        atom => out.push(atom.clone()),
    }
}

impl fmt::Display for KnotExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnotExpr::Unknot => write!(f, "U"),
            KnotExpr::Twist(a) => write!(f, "K({a})"),
            KnotExpr::Pretzel(ps) => {
                let s: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                write!(f, "P({})", s.join(","))
            }
            KnotExpr::Torus2(m) => write!(f, "T(2,{})", 2 * m + 1),
            KnotExpr::Mirror(inner) => match inner.as_ref() {
                KnotExpr::Sum(_) => write!(f, "-({inner})"),
                _ => write!(f, "-{inner}"),
            },
            KnotExpr::Sum(ks) => {
                let s: Vec<String> = ks
                    .iter()
                    .map(|k| match k {
                        KnotExpr::Sum(_) => format!("({k})"),
                        _ => k.to_string(),
                    })
                    .collect();
                write!(f, "{}", s.join("#"))
            }
        }
    }
}

impl std::str::FromStr for KnotExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

pub fn parse(text: &str) -> Result<KnotExpr> {
    let (offsets, chars) = text
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .unzip();
    let mut p = Parser {
        chars,
        offsets,
        end: text.len(),
        pos: 0,
    };
    if p.chars.is_empty() {
        return Err(p.error("empty knot expression"));
    }
    let e = p.expr()?;
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected '{}'", p.chars[p.pos])));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    /// Byte offset of each non-blank character in the input.
    offsets: Vec<usize>,
    end: usize,
    pos: usize,
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> Error {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.offsets.get(pos).copied().unwrap_or(self.end),
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<KnotExpr> {
        let mut terms = self.term_repeated()?;
        while self.eat('#') {
            terms.extend(self.term_repeated()?);
        }
        if terms.len() == 1 {
            Ok(terms.pop().unwrap())
        } else {
            Ok(KnotExpr::Sum(terms))
        }
    }

    /// A term with an optional `count*` prefix, expanded into copies.
    fn term_repeated(&mut self) -> Result<Vec<KnotExpr>> {
        let start = self.pos;
        let mut count = 1;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let n = self.int()?;
            if !self.eat('*') {
                self.pos = start;
                return Err(self.error("expected a knot, found a number"));
            }
            if n < 1 {
                self.pos = start;
                return Err(self.error("multiplicity must be at least 1"));
            }
            count = n as usize;
        }
        let mut mirrored = false;
        while self.eat('-') {
            mirrored = !mirrored;
        }
        let mut k = if self.eat('(') {
            let inner = self.expr()?;
            self.expect(')')?;
            inner
        } else {
            self.atom()?
        };
        if mirrored {
            k = k.mirror();
        }
        Ok(vec![k; count])
    }

    fn int(&mut self) -> Result<i64> {
        let start = self.pos;
        let neg = self.eat('-');
        let digits_start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.error("expected an integer"));
        }
        let s: String = self.chars[digits_start..self.pos].iter().collect();
        let v = s
            .parse::<i64>()
            .ok()
            .filter(|&v| v <= 1_000_000)
            .ok_or_else(|| self.error_at(start, format!("integer {s} out of range")))?;
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<KnotExpr> {
        let start = self.pos;
        match self.peek() {
            Some('U') => {
                self.pos += 1;
                Ok(KnotExpr::Unknot)
            }
            Some('K') => {
                self.pos += 1;
                self.expect('(')?;
                let at = self.pos;
                let a = self.int()?;
                if a < 1 {
                    return Err(self.error_at(at, format!("twist parameter must be >= 1, got {a}")));
                }
                self.expect(')')?;
                Ok(KnotExpr::Twist(a))
            }
            Some('P') => {
                self.pos += 1;
                self.expect('(')?;
                let mut ps = Vec::new();
                loop {
                    let at = self.pos;
                    let p = self.int()?;
                    if p % 2 == 0 {
                        return Err(self.error_at(at, format!("pretzel parameter {p} is not odd")));
                    }
                    ps.push(p);
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect(')')?;
                if ps.len() < 3 || ps.len() % 2 == 0 {
                    return Err(self.error_at(
                        start,
                        format!(
                            "pretzel knots need an odd number (>= 3) of strands, got {}",
                            ps.len()
                        ),
                    ));
                }
                Ok(KnotExpr::Pretzel(ps))
            }
            Some('T') => {
                self.pos += 1;
                self.expect('(')?;
                if !(self.eat('2') && self.eat(',')) {
                    return Err(self.error("only T(2,n) torus knots are supported"));
                }
                let at = self.pos;
                let n = self.int()?;
                if n % 2 == 0 {
                    return Err(self.error_at(at, format!("T(2,{n}) is a link")));
                }
                self.expect(')')?;
                Ok(match n {
                    1 | -1 => KnotExpr::Unknot,
                    n if n > 0 => KnotExpr::Torus2((n - 1) / 2),
                    n => KnotExpr::Torus2((-n - 1) / 2).mirror(),
                })
            }
            Some(c) => Err(self.error(format!("unexpected '{c}', expected K, P, T or U"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Seifert matrix by structural recursion: mirror is `-A^T`, sum is block sum.
pub fn seifert_of(k: &KnotExpr) -> Result<SeifertMatrix> {
    match k {
        KnotExpr::Unknot => Ok(SeifertMatrix::empty()),
        KnotExpr::Twist(a) => twist_seifert(*a),
        KnotExpr::Pretzel(ps) => pretzel_seifert(ps),
        KnotExpr::Torus2(m) => torus2_seifert(*m),
        KnotExpr::Mirror(inner) => Ok(seifert_of(inner)?.mirror()),
        KnotExpr::Sum(ks) => ks.iter().try_fold(SeifertMatrix::empty(), |acc, k| {
            Ok(acc.connected_sum(&seifert_of(k)?))
        }),
    }
}

/// A negative definite lattice bounded by the double branched cover of `K`.
///
/// This is the lattice that obstructs `K` being slice in `#^m CP²`; apply it
/// to the mirror for `#^m CP²bar`.
pub fn neg_filling_of(k: &KnotExpr) -> Result<IntegralLattice> {
    let mut acc = IntegralLattice::empty();
    for s in k.summands() {
        acc = acc.direct_sum(&atom_filling(&s)?);
    }
    if acc.rank() > 0 && acc.definiteness() != Definiteness::NegativeDefinite {
        return Err(Error::Internal(format!(
            "filling of {k} is not negative definite"
        )));
    }
    Ok(acc)
}

fn atom_filling(k: &KnotExpr) -> Result<IntegralLattice> {
    match k {
        KnotExpr::Twist(a) => lens_neg_filling(&twist_cover(*a)?),
        KnotExpr::Mirror(inner) => match inner.as_ref() {
            KnotExpr::Twist(a) => lens_neg_filling(&twist_cover(*a)?.reversed()),
            other => Err(Error::Unsupported(format!("no filling data for -{other}"))),
        },
        KnotExpr::Pretzel(ps) => {
            let pos: Vec<i64> = ps.iter().copied().filter(|&p| p > 0).collect();
            let neg: Vec<i64> = ps.iter().copied().filter(|&p| p < 0).collect();
            check_pretzel_filling_hypotheses(&pos, &neg)
                .map_err(|e| Error::Unsupported(format!("{k}: {e}")))?;
            pretzel_plumbing(&pos, &neg)
        }
        other => Err(Error::Unsupported(format!("no filling data for {other}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "cp2")]
    Cp2,
    #[serde(rename = "cp2bar")]
    Cp2Bar,
    #[serde(rename = "cp2top")]
    Cp2Top,
}

impl Side {
    pub fn mirrored(self) -> Self {
        match self {
            Side::Cp2 => Side::Cp2Bar,
            Side::Cp2Bar => Side::Cp2,
            Side::Cp2Top => Side::Cp2Top,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Cp2 => "u_CP2",
            Side::Cp2Bar => "u_CP2bar",
            Side::Cp2Top => "u_CP2^top",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperRule {
    pub side: Side,
    pub bound: u64,
    pub citation: String,
}

/// Crossing-change upper bounds. For a connected sum, each side gets the sum
/// of the best per-summand bounds when every summand has one.
pub fn upper_rules(k: &KnotExpr) -> Vec<UpperRule> {
    let summands = k.summands();
    if summands.is_empty() {
        return [Side::Cp2, Side::Cp2Bar, Side::Cp2Top]
            .into_iter()
            .map(|side| UpperRule {
                side,
                bound: 0,
                citation: "the unknot is slice".into(),
            })
            .collect();
    }
    if summands.len() == 1 {
        return atom_rules(&summands[0]);
    }
    let per: Vec<Vec<UpperRule>> = summands.iter().map(atom_rules).collect();
    let mut out = Vec::new();
    for side in [Side::Cp2, Side::Cp2Bar, Side::Cp2Top] {
        let single: Vec<Option<&UpperRule>> = per
            .iter()
            .map(|rules| {
                rules
                    .iter()
                    .filter(|r| r.side == side)
                    .min_by_key(|r| r.bound)
            })
            .collect();
        if let Some((bound, parts)) = best_cover(&summands, &single, side) {
            out.push(UpperRule {
                side,
                bound,
                citation: format!("subadditive under connected sum; {}", parts.join("; ")),
            });
        }
    }
    out
}

/// Cheapest way to cover the summands by single-summand rules and by pairs
/// that cancel in concordance. Pairing is tried only for short sums.
fn best_cover(
    summands: &[KnotExpr],
    single: &[Option<&UpperRule>],
    side: Side,
) -> Option<(u64, Vec<String>)> {
    let n = summands.len();
    let alone = |i: usize| {
        single[i].map(|r| {
            (
                r.bound,
                format!("{}: <= {} ({})", summands[i], r.bound, r.citation),
            )
        })
    };
    if n > 16 {
        let parts: Option<Vec<(u64, String)>> = (0..n).map(alone).collect();
        let parts = parts?;
        return Some((
            parts.iter().map(|p| p.0).sum(),
            parts.into_iter().map(|p| p.1).collect(),
        ));
    }
    // best[mask] covers the summands in `mask`; always extend from the lowest unset index.
    let full = (1usize << n) - 1;
    let mut best: Vec<Option<(u64, usize, Option<usize>)>> = vec![None; 1 << n];
    best[0] = Some((0, 0, None));
    for mask in 0..full {
        let Some((cost, _, _)) = best[mask] else {
            continue;
        };
        let i = (0..n).find(|&i| mask & (1 << i) == 0).unwrap();
        let mut relax = |next: usize, c: u64, from: Option<usize>| {
            if best[next].is_none_or(|(b, _, _)| cost + c < b) {
                best[next] = Some((cost + c, mask, from));
            }
        };
        if let Some((c, _)) = alone(i) {
            relax(mask | 1 << i, c, None);
        }
        for j in i + 1..n {
            if mask & (1 << j) == 0 {
                if let Some((c, _)) = pair_cost(&summands[i], &summands[j], side) {
                    relax(mask | 1 << i | 1 << j, c, Some(j));
                }
            }
        }
    }
    let (total, _, _) = best[full]?;
    let mut parts = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let (_, prev, partner) = best[mask].unwrap();
        let i = (0..n).find(|&i| prev & (1 << i) == 0).unwrap();
        parts.push(match partner {
            None => alone(i).unwrap().1,
            Some(j) => {
                let (c, why) = pair_cost(&summands[i], &summands[j], side).unwrap();
                format!("{}#{}: <= {c} ({why})", summands[i], summands[j])
            }
        });
        mask = prev;
    }
    parts.reverse();
    Some((total, parts))
}

fn pair_cost(x: &KnotExpr, y: &KnotExpr, side: Side) -> Option<(u64, String)> {
    if x.clone().mirror().normalize() == *y {
        return Some((0, format!("{x}#{y} is slice")));
    }
    let twist_pair = |x: &KnotExpr, y: &KnotExpr| match (x, y) {
        (KnotExpr::Twist(a), KnotExpr::Mirror(inner)) => match inner.as_ref() {
            KnotExpr::Twist(b) => Some((*a, *b)),
            _ => None,
        },
        _ => None,
    };
    let (a, b) = twist_pair(x, y).or_else(|| twist_pair(y, x))?;
    match side {
        Side::Cp2 if a > b => Some((
            (a - b) as u64,
            format!(
                "K({a}) becomes K({b}) after {}, and K({b})#-K({b}) is slice",
                changes(a - b, "positive to negative")
            ),
        )),
        Side::Cp2Bar if b > a => Some((
            (b - a) as u64,
            format!(
                "-K({b}) becomes -K({a}) after {}, and K({a})#-K({a}) is slice",
                changes(b - a, "negative to positive")
            ),
        )),
        _ => None,
    }
}

fn atom_rules(k: &KnotExpr) -> Vec<UpperRule> {
    match k {
        KnotExpr::Mirror(inner) => atom_rules(inner)
            .into_iter()
            .filter(|r| r.side != Side::Cp2Top)
            .map(|r| UpperRule {
                side: r.side.mirrored(),
                bound: r.bound,
                citation: format!("mirror of: {}", r.citation),
            })
            .collect(),
        KnotExpr::Twist(a) => twist_rules(*a),
        KnotExpr::Torus2(m) => vec![UpperRule {
            side: Side::Cp2,
            bound: *m as u64,
            citation: format!(
                "T(2,{}) can be unknotted by {}",
                2 * m + 1,
                changes(*m, "positive to negative")
            ),
        }],
        KnotExpr::Pretzel(ps) => pretzel_rules(ps),
        KnotExpr::Unknot | KnotExpr::Sum(_) => upper_rules(k),
    }
}

fn twist_rules(a: i64) -> Vec<UpperRule> {
    let mut out = Vec::new();
    if a == 2 {
        for side in [Side::Cp2, Side::Cp2Bar] {
            out.push(UpperRule {
                side,
                bound: 0,
                citation: "K(2) is slice".into(),
            });
        }
        return out;
    }
    if a >= 3 {
        out.push(UpperRule {
            side: Side::Cp2,
            bound: (a - 2) as u64,
            citation: format!(
                "K({a}) becomes the slice knot K(2) after {}",
                changes(a - 2, "positive to negative")
            ),
        });
    }
    out.push(UpperRule {
        side: Side::Cp2Bar,
        bound: 1,
        citation: format!(
            "a single negative to positive crossing change transforms K({a}) into the unknot"
        ),
    });
    if a == 1 {
        out.push(UpperRule {
            side: Side::Cp2,
            bound: 1,
            citation: "K(1) is the amphichiral figure-eight knot, so a single positive to negative crossing change also unknots it".into(),
        });
    }
    out
}

fn changes(n: impl Into<i64>, kind: &str) -> String {
    let n = n.into();
    if n == 1 {
        format!("1 {kind} crossing change")
    } else {
        format!("{n} {kind} crossing changes")
    }
}

/// The pretzel family with a rank-one Seifert decomposition:
/// `P(p, -p-2k, 3p+8k-2)` up to cyclic order and reversal.
pub fn rank_one_family(ps: &[i64]) -> Option<(i64, i64)> {
    if ps.len() != 3 {
        return None;
    }
    for rot in 0..3 {
        for rev in [false, true] {
            let mut v: Vec<i64> = (0..3).map(|i| ps[(rot + i) % 3]).collect();
            if rev {
                v.reverse();
            }
            let (p, q, r) = (v[0], v[1], v[2]);
            if p >= 3 && q < 0 && (-q - p) > 0 && (-q - p) % 2 == 0 {
                let k = (-q - p) / 2;
                if r == 3 * p + 8 * k - 2 {
                    return Some((p, k));
                }
            }
        }
    }
    None
}

fn pretzel_rules(ps: &[i64]) -> Vec<UpperRule> {
    let mut out = Vec::new();
    let rendered = KnotExpr::Pretzel(ps.to_vec()).to_string();
    if ps.len() == 3 {
        // Changing a crossing moves one parameter by 2; P(x, -x, r) is ribbon.
        let mut best_cp2: Option<(u64, usize, usize)> = None;
        let mut best_bar: Option<(u64, usize, usize)> = None;
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let s = ps[i] + ps[j];
                if s <= 0 && ps[i] <= ps[j] {
                    let c = (-s / 2) as u64;
                    if best_cp2.is_none_or(|(b, _, _)| c < b) {
                        best_cp2 = Some((c, i, j));
                    }
                }
                if s >= 0 && ps[i] >= ps[j] {
                    let c = (s / 2) as u64;
                    if best_bar.is_none_or(|(b, _, _)| c < b) {
                        best_bar = Some((c, i, j));
                    }
                }
            }
        }
        if let Some((c, i, j)) = best_cp2 {
            out.push(UpperRule {
                side: Side::Cp2,
                bound: c,
                citation: format!(
                    "{rendered} becomes a ribbon pretzel P(x,-x,r) after {} raising {} to {}",
                    changes(c as i64, "positive to negative"),
                    ps[i],
                    -ps[j]
                ),
            });
        }
        if let Some((c, i, j)) = best_bar {
            out.push(UpperRule {
                side: Side::Cp2Bar,
                bound: c,
                citation: format!(
                    "{rendered} becomes a ribbon pretzel P(x,-x,r) after {} lowering {} to {}",
                    changes(c as i64, "negative to positive"),
                    ps[i],
                    -ps[j]
                ),
            });
        }
        if let Some((p, k)) = rank_one_family(ps) {
            out.push(UpperRule {
                side: Side::Cp2Top,
                bound: 1,
                citation: format!(
                    "P(p,-p-2k,3p+8k-2) with p={p}, k={k} is topologically slice in CP2: its Seifert form is a rank-one modification of one with Alexander polynomial one"
                ),
            });
        }
    } else if let Some(c) = alternating_pattern(ps) {
        out.push(UpperRule {
            side: Side::Cp2,
            bound: c,
            citation: format!(
                "{rendered} becomes the ribbon knot P(p,-p,p,...,-p,p) after {}",
                changes(c as i64, "positive to negative")
            ),
        });
    } else {
        let neg: Vec<i64> = ps.iter().map(|p| -p).collect();
        if let Some(c) = alternating_pattern(&neg) {
            out.push(UpperRule {
                side: Side::Cp2Bar,
                bound: c,
                citation: format!(
                    "{rendered} becomes the ribbon knot P(-p,p,-p,...,p,-p) after {}",
                    changes(c as i64, "negative to positive")
                ),
            });
        }
    }
    out
}

/// `P(p, q_1, p, q_2, ..., p)` with `q_j <= -p`: changes needed to reach
/// `P(p, -p, ..., p)`.
fn alternating_pattern(ps: &[i64]) -> Option<u64> {
    let p = ps[0];
    if p < 1 || ps.len() % 2 == 0 {
        return None;
    }
    let mut total = 0;
    for (i, &x) in ps.iter().enumerate() {
        if i % 2 == 0 {
            if x != p {
                return None;
            }
        } else {
            if x > -p {
                return None;
            }
            total += ((-x - p) / 2) as u64;
        }
    }
    Some(total)
}
