//! Exhaustive search for embeddings of a negative definite lattice, plus
//! half-integer surgery data, into the standard diagonal lattice.
//!
//! Given `G` of rank `r` and `m >= 0` the search looks, inside
//! `(Z^N, -Id)` with `N = r + 2m`, for
//!
//! * (a) an isometric image of `G`,
//! * (b) vectors `u_1..u_m` with `<u_i,u_j> = -2δ_ij` orthogonal to `G`,
//! * (c) integer vectors `w_j` with `<u_i,w_j> = δ_ij` and `<g,w_j> = 0`.
//!
//! If no such data exist the lattice is `Obstructed` at `m`.
//!
//! Internally the pairing is negated, so images are compared with the
//! Euclidean dot product against the positive definite matrix `-Gram`.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Definiteness, IntegralLattice};
use crate::matrix;

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedderConfig {
    /// Upper bound on search nodes (coordinate assignments and placements).
    pub node_budget: u64,
    /// Worker threads for the first branching level; 1 runs sequentially.
    pub threads: usize,
}

impl Default for EmbedderConfig {
    fn default() -> Self {
        Self {
            node_budget: DEFAULT_NODE_BUDGET,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Obstructed,
    Inconclusive,
}

/// Embedding data satisfying (a)-(c); vectors live in `Z^target_rank`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub target_rank: usize,
    /// Image of each generator of `G`, in generator order.
    pub images: Vec<Vec<i64>>,
    pub u: Vec<Vec<i64>>,
    pub w: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub millis: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionOutcome {
    pub m: usize,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub stats: SearchStats,
}

/// `<x,y> = -x·y`.
pub fn pairing(x: &[i64], y: &[i64]) -> i64 {
    -dot(x, y)
}

fn dot(x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// All `v` in `Z^n` with `<v,v> = -norm` and `<c,v> = t` for each
/// constraint `(c, t)`, in lexicographic order.
pub fn enumerate_vectors(norm: i64, n: usize, constraints: &[(Vec<i64>, i64)]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    if norm < 0 {
        return out;
    }
    // Euclidean form: v·v = norm, c·v = -t.
    let cons: Vec<(&[i64], i64)> = constraints
        .iter()
        .map(|(c, t)| (c.as_slice(), -t))
        .collect();
    let suffix: Vec<Vec<i64>> = cons
        .iter()
        .map(|(c, _)| {
            let mut s = vec![0; n + 1];
            for j in (0..n).rev() {
                s[j] = s[j + 1] + c[j] * c[j];
            }
            s
        })
        .collect();
    let mut v = vec![0; n];
    let mut partial = vec![0; cons.len()];
    fn rec(
        j: usize,
        rem: i64,
        v: &mut Vec<i64>,
        partial: &mut [i64],
        cons: &[(&[i64], i64)],
        suffix: &[Vec<i64>],
        out: &mut Vec<Vec<i64>>,
    ) {
        let n = v.len();
        if j == n {
            if rem == 0 && cons.iter().zip(partial.iter()).all(|((_, t), p)| p == t) {
                out.push(v.clone());
            }
            return;
        }
        let b = matrix::isqrt(rem);
        for x in -b..=b {
            let rem2 = rem - x * x;
            let mut ok = true;
            for (k, (c, t)) in cons.iter().enumerate() {
                let p = partial[k] + c[j] * x;
                let need = t - p;
                if need * need > rem2 * suffix[k][j + 1] {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            for (k, (c, _)) in cons.iter().enumerate() {
                partial[k] += c[j] * x;
            }
            v[j] = x;
            rec(j + 1, rem2, v, partial, cons, suffix, out);
            for (k, (c, _)) in cons.iter().enumerate() {
                partial[k] -= c[j] * x;
            }
        }
        v[j] = 0;
    }
    rec(0, norm, &mut v, &mut partial, &cons, &suffix, &mut out);
    out
}

/// The (positive definite) negated Gram of `G ⊕ -2I_m` and its processing order.
struct Problem {
    n: usize,
    r: usize,
    m: usize,
    /// Processing position -> extended generator index.
    order: Vec<usize>,
    /// `-Gram` of the extended lattice, permuted into processing order.
    d: Vec<Vec<i64>>,
}

impl Problem {
    fn new(g: &IntegralLattice, m: usize) -> Self {
        let r = g.rank();
        let total = r + m;
        let ext = |i: usize, j: usize| -> i64 {
            if i < r && j < r {
                -g.pairing(i, j)
            } else if i == j {
                2
            } else {
                0
            }
        };
        let mut placed = vec![false; total];
        let mut order = Vec::with_capacity(total);
        while order.len() < total {
            let min_norm = (0..total)
                .filter(|&i| !placed[i])
                .map(|i| ext(i, i))
                .min()
                .expect("nonempty");
            let best = (0..total)
                .filter(|&i| !placed[i] && ext(i, i) == min_norm)
                .max_by_key(|&i| {
                    let adj = order.iter().filter(|&&j| ext(i, j) != 0).count();
                    (adj, std::cmp::Reverse(i))
                })
                .expect("nonempty");
            placed[best] = true;
            order.push(best);
        }
        let d = order
            .iter()
            .map(|&i| order.iter().map(|&j| ext(i, j)).collect())
            .collect();
        Self {
            n: r + 2 * m,
            r,
            m,
            order,
            d,
        }
    }

    /// Unpermute a full placement and split it into `(images, u)`.
    fn split(&self, placed: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
        let mut ext = vec![Vec::new(); self.r + self.m];
        for (pos, &gi) in self.order.iter().enumerate() {
            ext[gi] = placed[pos].clone();
        }
        let u = ext.split_off(self.r);
        (ext, u)
    }
}

enum Stop {
    Budget,
    Cancelled,
}

struct Shared {
    nodes: AtomicU64,
    budget: u64,
    budget_hit: AtomicBool,
    best_branch: AtomicUsize,
}

impl Shared {
    fn tick(&self, k: u64) -> std::result::Result<(), Stop> {
        let n = self.nodes.fetch_add(k, Ordering::Relaxed) + k;
        if n > self.budget {
            self.budget_hit.store(true, Ordering::Relaxed);
            return Err(Stop::Budget);
        }
        if self.budget_hit.load(Ordering::Relaxed) {
            return Err(Stop::Budget);
        }
        Ok(())
    }
}

struct Search<'a> {
    p: &'a Problem,
    shared: &'a Shared,
    threads: usize,
    branch: Option<usize>,
}

type Found = (Vec<Vec<i64>>, Vec<Vec<i64>>);

impl Search<'_> {
    fn check_cancel(&self) -> std::result::Result<(), Stop> {
        if let Some(b) = self.branch {
            if self.shared.best_branch.load(Ordering::Relaxed) < b {
                return Err(Stop::Cancelled);
            }
        }
        Ok(())
    }

    fn dfs(
        &self,
        placed: &mut Vec<Vec<i64>>,
        fan_out: bool,
    ) -> std::result::Result<Option<Found>, Stop> {
        let level = placed.len();
        if level == self.p.d.len() {
            self.shared.tick(1)?;
            return Ok(self.leaf(placed));
        }
        self.check_cancel()?;
        let cands = self.candidates(placed)?;
        if fan_out && self.threads > 1 && cands.len() > 1 {
            return self.fan_out(placed, cands);
        }
        let keep_fan = fan_out && cands.len() == 1;
        for v in cands {
            self.shared.tick(1)?;
            placed.push(v);
            let r = self.dfs(placed, keep_fan)?;
            placed.pop();
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }

    fn fan_out(
        &self,
        placed: &[Vec<i64>],
        cands: Vec<Vec<i64>>,
    ) -> std::result::Result<Option<Found>, Stop> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|_| Stop::Budget)?;
        let results: Vec<std::result::Result<Option<Found>, Stop>> = pool.install(|| {
            cands
                .into_par_iter()
                .enumerate()
                .map(|(i, v)| {
                    let sub = Search {
                        p: self.p,
                        shared: self.shared,
                        threads: 1,
                        branch: Some(i),
                    };
                    sub.shared.tick(1)?;
                    let mut pl = placed.to_vec();
                    pl.push(v);
                    let r = sub.dfs(&mut pl, false)?;
                    if r.is_some() {
                        sub.shared.best_branch.fetch_min(i, Ordering::Relaxed);
                    }
                    Ok(r)
                })
                .collect()
        });
        // The lowest-index branch that finished decides, exactly as a
        // sequential scan would.
        for r in results {
            match r {
                Ok(Some(f)) => return Ok(Some(f)),
                Ok(None) => continue,
                Err(Stop::Budget) => return Err(Stop::Budget),
                Err(Stop::Cancelled) => continue,
            }
        }
        Ok(None)
    }

    fn leaf(&self, placed: &[Vec<i64>]) -> Option<Found> {
        let (images, u) = self.p.split(placed);
        let w = solve_dual(&images, &u)?;
        Some((placed.to_vec(), w))
    }

    /// Canonical candidates for the next generator, up to the signed
    /// permutations of `Z^N` fixing every placed image.
    fn candidates(&self, placed: &[Vec<i64>]) -> std::result::Result<Vec<Vec<i64>>, Stop> {
        let n = self.p.n;
        let level = placed.len();
        let norm = self.p.d[level][level];
        let targets: Vec<i64> = (0..level).map(|k| self.p.d[level][k]).collect();

        // Placed vectors only touch a prefix of coordinates.
        let used = (0..n)
            .rev()
            .find(|&j| placed.iter().any(|v| v[j] != 0))
            .map_or(0, |j| j + 1);
        // Previous coordinate in the same column class (columns equal up to sign).
        let mut class_prev: Vec<Option<usize>> = vec![None; used];
        let mut keys: Vec<(Vec<i64>, i64)> = Vec::with_capacity(used);
        for j in 0..used {
            let col: Vec<i64> = placed.iter().map(|v| v[j]).collect();
            let s = col.iter().find(|&&x| x != 0).map_or(1, |x| x.signum());
            let key: Vec<i64> = col.iter().map(|x| x * s).collect();
            if let Some(prev) = (0..j).rev().find(|&i| keys[i].0 == key) {
                class_prev[j] = Some(prev);
            }
            keys.push((key, s));
        }
        let sign: Vec<i64> = keys.iter().map(|k| k.1).collect();
        // Constraints touching each coordinate, and suffix norms per constraint.
        let touching: Vec<Vec<usize>> = (0..used)
            .map(|j| (0..level).filter(|&k| placed[k][j] != 0).collect())
            .collect();
        let suffix: Vec<Vec<i64>> = placed
            .iter()
            .map(|v| {
                let mut s = vec![0; used + 1];
                for j in (0..used).rev() {
                    s[j] = s[j + 1] + v[j] * v[j];
                }
                s
            })
            .collect();

        let ctx = CandCtx {
            placed,
            targets: &targets,
            class_prev: &class_prev,
            sign: &sign,
            touching: &touching,
            suffix: &suffix,
            fresh: n - used,
            used,
        };
        let mut out = Vec::new();
        let mut v = vec![0; n];
        let mut partial = vec![0; level];
        let mut steps = 0u64;
        ctx.rec(0, norm, &mut v, &mut partial, &mut out, &mut steps);
        self.shared.tick(steps)?;
        Ok(out)
    }
}

struct CandCtx<'a> {
    placed: &'a [Vec<i64>],
    targets: &'a [i64],
    class_prev: &'a [Option<usize>],
    sign: &'a [i64],
    touching: &'a [Vec<usize>],
    suffix: &'a [Vec<i64>],
    fresh: usize,
    used: usize,
}

impl CandCtx<'_> {
    fn rec(
        &self,
        j: usize,
        rem: i64,
        v: &mut Vec<i64>,
        partial: &mut [i64],
        out: &mut Vec<Vec<i64>>,
        steps: &mut u64,
    ) {
        *steps += 1;
        if j == self.used {
            if partial.iter().zip(self.targets).any(|(p, t)| p != t) {
                return;
            }
            let start = self.used;
            let mut parts = Vec::new();
            fill_fresh(
                rem,
                self.fresh,
                matrix::isqrt(rem),
                &mut parts,
                &mut |parts| {
                    let mut w = v.clone();
                    for (i, &x) in parts.iter().enumerate() {
                        w[start + i] = x;
                    }
                    out.push(w);
                },
            );
            return;
        }
        let b = matrix::isqrt(rem);
        // Within a column class the values s_j v_j are non-increasing.
        let (lo, hi) = match self.class_prev[j] {
            Some(prev) => {
                let bound = self.sign[prev] * v[prev];
                if self.sign[j] > 0 {
                    (-b, b.min(bound))
                } else {
                    ((-bound).max(-b), b)
                }
            }
            None => (-b, b),
        };
        for x in lo..=hi {
            let rem2 = rem - x * x;
            let mut ok = true;
            for &k in &self.touching[j] {
                let p = partial[k] + self.placed[k][j] * x;
                let need = self.targets[k] - p;
                if need * need > rem2 * self.suffix[k][j + 1] {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            for &k in &self.touching[j] {
                partial[k] += self.placed[k][j] * x;
            }
            v[j] = x;
            self.rec(j + 1, rem2, v, partial, out, steps);
            for &k in &self.touching[j] {
                partial[k] -= self.placed[k][j] * x;
            }
        }
        v[j] = 0;
    }
}

/// Non-increasing positive `x_1 >= x_2 >= ...` with `Σ x_i² = rem`, at most
/// `slots` of them.
fn fill_fresh(
    rem: i64,
    slots: usize,
    max: i64,
    parts: &mut Vec<i64>,
    emit: &mut dyn FnMut(&[i64]),
) {
    if rem == 0 {
        emit(parts);
        return;
    }
    if slots == 0 {
        return;
    }
    let top = max.min(matrix::isqrt(rem));
    for x in (1..=top).rev() {
        // the remaining slots can hold at most slots * x² more
        if rem > (slots as i64) * x * x {
            break;
        }
        parts.push(x);
        fill_fresh(rem - x * x, slots - 1, x, parts, emit);
        parts.pop();
    }
}

/// Solves condition (c): `w_j` with `u_i·w_j = -δ_ij` and `g·w_j = 0`.
fn solve_dual(images: &[Vec<i64>], u: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let rows: Vec<Vec<BigInt>> = images
        .iter()
        .chain(u.iter())
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let r = images.len();
    let mut ws = Vec::with_capacity(u.len());
    for j in 0..u.len() {
        let b: Vec<BigInt> = (0..rows.len())
            .map(|i| BigInt::from(if i == r + j { -1 } else { 0 }))
            .collect();
        let w = matrix::solve_integer(&rows, &b)?;
        ws.push(w.iter().map(|x| x.to_i64()).collect::<Option<Vec<i64>>>()?);
    }
    Some(ws)
}

/// Decides whether `G` admits embedding data (a)-(c) at `m`.
pub fn donaldson_obstruction(
    g: &IntegralLattice,
    m: usize,
    cfg: &EmbedderConfig,
) -> Result<ObstructionOutcome> {
    let def = g.definiteness();
    if g.rank() > 0 && def != Definiteness::NegativeDefinite {
        return Err(Error::NotNegativeDefinite(def));
    }
    let start = Instant::now();
    let p = Problem::new(g, m);
    let shared = Shared {
        nodes: AtomicU64::new(0),
        budget: cfg.node_budget,
        budget_hit: AtomicBool::new(false),
        best_branch: AtomicUsize::new(usize::MAX),
    };
    let search = Search {
        p: &p,
        shared: &shared,
        threads: cfg.threads.max(1),
        branch: None,
    };
    let mut placed = Vec::new();
    let res = search.dfs(&mut placed, true);
    let nodes = shared.nodes.load(Ordering::Relaxed);
    let stats = SearchStats {
        nodes,
        millis: start.elapsed().as_millis() as u64,
    };
    match res {
        Err(_) => Err(Error::BudgetExceeded {
            budget: cfg.node_budget,
            explored: nodes,
        }),
        Ok(None) => Ok(ObstructionOutcome {
            m,
            verdict: Verdict::Obstructed,
            witness: None,
            stats,
        }),
        Ok(Some((placed, w))) => {
            let (images, u) = p.split(&placed);
            let witness = Witness {
                target_rank: p.n,
                images,
                u,
                w,
            };
            verify_witness(g, m, &witness).map_err(Error::Internal)?;
            Ok(ObstructionOutcome {
                m,
                verdict: Verdict::Inconclusive,
                witness: Some(witness),
                stats,
            })
        }
    }
}

/// Independent exact check of all conditions (a)-(c).
pub fn verify_witness(
    g: &IntegralLattice,
    m: usize,
    w: &Witness,
) -> std::result::Result<(), String> {
    let r = g.rank();
    let n = r + 2 * m;
    if w.target_rank != n {
        return Err(format!("target rank {} != {n}", w.target_rank));
    }
    if w.images.len() != r || w.u.len() != m || w.w.len() != m {
        return Err("wrong number of vectors".into());
    }
    if w.images
        .iter()
        .chain(&w.u)
        .chain(&w.w)
        .any(|v| v.len() != n)
    {
        return Err("vector of wrong length".into());
    }
    for i in 0..r {
        for j in 0..r {
            if pairing(&w.images[i], &w.images[j]) != g.pairing(i, j) {
                return Err(format!("<g{i}, g{j}> mismatch"));
            }
        }
        for (k, u) in w.u.iter().enumerate() {
            if pairing(u, &w.images[i]) != 0 {
                return Err(format!("u{k} not orthogonal to g{i}"));
            }
        }
        for (k, x) in w.w.iter().enumerate() {
            if pairing(x, &w.images[i]) != 0 {
                return Err(format!("w{k} not orthogonal to g{i}"));
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            let want = if i == j { -2 } else { 0 };
            if pairing(&w.u[i], &w.u[j]) != want {
                return Err(format!("<u{i}, u{j}> != {want}"));
            }
            let want = i64::from(i == j);
            if pairing(&w.u[i], &w.w[j]) != want {
                return Err(format!("<u{i}, w{j}> != {want}"));
            }
        }
    }
    Ok(())
}

/// Result of sweeping `m = 0, 1, ..., m_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frontier {
    /// Largest `m` known to be obstructed; the slicing number is at least `m + 1`.
    pub m_star: Option<usize>,
    /// Outcomes for every `m` that completed, in order.
    pub outcomes: Vec<ObstructionOutcome>,
    /// The `m` at which the budget ran out, if it did.
    pub exhausted_at: Option<usize>,
}

/// Obstruction at `m` implies obstruction at every smaller `m`, so the sweep
/// stops at the first inconclusive value.
pub fn min_obstructed_m(
    g: &IntegralLattice,
    m_max: usize,
    cfg: &EmbedderConfig,
) -> Result<Frontier> {
    let mut f = Frontier {
        m_star: None,
        outcomes: Vec::new(),
        exhausted_at: None,
    };
    for m in 0..=m_max {
        match donaldson_obstruction(g, m, cfg) {
            Ok(o) => {
                let obstructed = o.verdict == Verdict::Obstructed;
                f.outcomes.push(o);
                if obstructed {
                    f.m_star = Some(m);
                } else {
                    break;
                }
            }
            Err(Error::BudgetExceeded { .. }) => {
                f.exhausted_at = Some(m);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(f)
}
