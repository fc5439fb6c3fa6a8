//! Acceptance criteria, one printed line each. All comparisons are exact;
//! the only tolerances are the wall-clock limits listed per criterion.

mod common;

use std::time::{Duration, Instant};

use cp2slice::diophantine::{pretzel_condition, three_square, PretzelVerdict};
use cp2slice::embedder::{donaldson_obstruction, verify_witness, EmbedderConfig, Verdict};
use cp2slice::knotspec::{neg_filling_of, parse, seifert_of, Side};
use cp2slice::lattice::IntegralLattice;
use cp2slice::plumbing::{
    eval_neg_continued_fraction, eval_pos_continued_fraction, lens_fillings,
    neg_continued_fraction, pos_continued_fraction, pretzel_plumbing,
};
use cp2slice::report::{compute_bounds, BoundsConfig, Extended, Status};
use cp2slice::seifert::{
    bryant_signature, pretzel3_alexander, pretzel3_seifert, signature_gate, GateBound,
    SeifertMatrix, UnitSample,
};
use cp2slice::upperbound::{
    decomposition_search, genus_one_top_bound, Decomposition, DecompositionConfig, GenusOneBound,
};
use num_bigint::BigInt;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fin(n: u64) -> Extended {
    Extended::Finite(n)
}

fn report(knot: &str) -> cp2slice::report::ObstructionReport {
    compute_bounds(&parse(knot).unwrap(), &BoundsConfig::default()).unwrap()
}

fn chain(weights: &[i64]) -> IntegralLattice {
    let n = weights.len();
    let mut g = vec![vec![0; n]; n];
    for i in 0..n {
        g[i][i] = weights[i];
        if i + 1 < n {
            g[i][i + 1] = 1;
            g[i + 1][i] = 1;
        }
    }
    IntegralLattice::new(g).unwrap()
}

fn mirror_twist_chain(a: i64) -> IntegralLattice {
    let mut w = vec![-2; (2 * a - 1) as usize];
    w.push(-3);
    chain(&w)
}

fn criterion_1() -> Check {
    let lattice = chain(&[-7, -2]).direct_sum(&chain(&[-11, -2]));
    let built = neg_filling_of(&parse("K(3)#K(5)").unwrap()).unwrap();
    ensure(built.gram() == lattice.gram(), || {
        "filling of K(3)#K(5) differs from [-7,-2]+[-11,-2]".into()
    })?;
    let o = donaldson_obstruction(&lattice, 1, &EmbedderConfig::default())
        .map_err(|e| e.to_string())?;
    ensure(o.verdict == Verdict::Obstructed, || {
        format!("m=1 verdict {:?}", o.verdict)
    })?;
    let r = report("K(3)#K(5)");
    let bar = r.side(Side::Cp2Bar);
    let cp2 = r.side(Side::Cp2);
    ensure(bar.lower == fin(2) && bar.upper == Some(fin(2)), || {
        format!("u_CP2bar = [{}, {:?}]", bar.lower, bar.upper)
    })?;
    ensure(cp2.lower == fin(2) && cp2.upper == Some(fin(4)), || {
        format!("u_CP2 = [{}, {:?}]", cp2.lower, cp2.upper)
    })?;
    Ok("[-7,-2]+[-11,-2] obstructed at m=1; u_CP2bar = 2, u_CP2 in [2,4]".into())
}

fn criterion_2() -> Check {
    let mut details = Vec::new();
    for params in [vec![3], vec![3, 5], vec![3, 4, 5]] {
        let n = params.len();
        let lattice = params.iter().fold(IntegralLattice::empty(), |acc, &a| {
            acc.direct_sum(&mirror_twist_chain(a))
        });
        let cfg = EmbedderConfig::default();
        let below = donaldson_obstruction(&lattice, n - 1, &cfg).map_err(|e| e.to_string())?;
        ensure(below.verdict == Verdict::Obstructed, || {
            format!("{params:?}: m={} not obstructed", n - 1)
        })?;
        let at = donaldson_obstruction(&lattice, n, &cfg).map_err(|e| e.to_string())?;
        let w = at
            .witness
            .ok_or_else(|| format!("{params:?}: no witness at m={n}"))?;
        verify_witness(&lattice, n, &w).map_err(|e| format!("{params:?}: {e}"))?;
        let knot: Vec<String> = params.iter().map(|a| format!("K({a})")).collect();
        let knot = knot.join("#");
        let r = report(&knot);
        let bar = r.side(Side::Cp2Bar);
        ensure(
            bar.status == Status::Exact && bar.lower == fin(n as u64),
            || format!("{knot}: u_CP2bar [{}, {:?}]", bar.lower, bar.upper),
        )?;
        details.push(format!("{knot}: {n}"));
    }
    Ok(format!("u_CP2bar exact: {}", details.join(", ")))
}

fn criterion_3() -> Check {
    let knot = "K(3)#K(3)#-K(5)#-K(5)";
    let r = report(knot);
    for b in &r.bounds {
        if let Some(u) = b.upper {
            ensure(b.lower <= u, || {
                format!("{}: lower {} > upper {u}", b.side, b.lower)
            })?;
        }
    }
    let cp2 = r.side(Side::Cp2);
    if cp2.lower < fin(2) {
        let exhausted = r.notes.iter().any(|n| n.contains("budget"));
        return if exhausted {
            Ok("budget exhausted and reported".into())
        } else {
            Err(format!("u_CP2 lower bound {} < 2", cp2.lower))
        };
    }
    let bar = r.side(Side::Cp2Bar);
    Ok(format!(
        "u_CP2 in [{}, {}], u_CP2bar in [{}, {}]",
        cp2.lower,
        cp2.upper.map_or("?".into(), |u| u.to_string()),
        bar.lower,
        bar.upper.map_or("?".into(), |u| u.to_string())
    ))
}

fn criterion_4() -> Check {
    let mut rows = Vec::new();
    for p in [3, 5] {
        for k in 1..=3i64 {
            let q = -p - 2 * k;
            let r = p + 2 * k + 2;
            let lattice = pretzel_plumbing(&[p, r], &[q]).map_err(|e| e.to_string())?;
            for m in 0..=k as usize {
                let d = pretzel_condition(&[p, r], &[q], m).map_err(|e| e.to_string())?;
                let e = donaldson_obstruction(&lattice, m, &EmbedderConfig::default())
                    .map_err(|e| e.to_string())?;
                let dio_obstructed = d == PretzelVerdict::Unsolvable;
                let emb_obstructed = e.verdict == Verdict::Obstructed;
                let want = (m as i64) < k;
                ensure(dio_obstructed == want && emb_obstructed == want, || {
                    format!("P({p},{q},{r}) m={m}: diophantine {dio_obstructed}, embedding {emb_obstructed}, expected {want}")
                })?;
            }
            let knot = format!("P({p},{q},{r})");
            let rep = report(&knot);
            let cp2 = rep.side(Side::Cp2);
            ensure(
                cp2.status == Status::Exact && cp2.lower == fin(k as u64),
                || format!("{knot}: u_CP2 [{}, {:?}]", cp2.lower, cp2.upper),
            )?;
            rows.push(format!("{knot}={k}"));
        }
    }
    Ok(rows.join(" "))
}

fn criterion_5() -> Check {
    let v = pretzel_condition(&[3, 3, 3], &[-5, -5], 1).map_err(|e| e.to_string())?;
    ensure(v == PretzelVerdict::Unsolvable, || "m=1 solvable".into())?;
    let r = report("P(3,-5,3,-5,3)");
    let cp2 = r.side(Side::Cp2);
    ensure(cp2.status == Status::Exact && cp2.lower == fin(2), || {
        format!("u_CP2 [{}, {:?}]", cp2.lower, cp2.upper)
    })?;
    Ok("u_CP2(P(3,-5,3,-5,3)) = 2".into())
}

/// Independent check of a decomposition: `P^T A P = B - Σ c c^T`, `det P = ±1`,
/// and `det(tB - B^T)` a unit monomial.
fn check_decomposition(a: &SeifertMatrix, d: &Decomposition) -> Result<(), String> {
    let n = a.size();
    let p: Vec<Vec<i64>> = d.basis_change.clone().unwrap_or_else(|| {
        (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect()
    });
    let p128: Vec<Vec<i128>> = p
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let dp = common::det_laplace(&p128);
    if dp.abs() != 1 {
        return Err(format!("det P = {dp}"));
    }
    let e = a.entries();
    for i in 0..n {
        for j in 0..n {
            let mut lhs = 0;
            for k in 0..n {
                for l in 0..n {
                    lhs += p[k][i] * e[k][l] * p[l][j];
                }
            }
            let rhs = d.b[i][j] - d.cs.iter().map(|c| c[i] * c[j]).sum::<i64>();
            if lhs != rhs {
                return Err(format!("entry ({i},{j}): {lhs} != {rhs}"));
            }
        }
    }
    // det(tB - B^T) sampled at t = 2 and t = 3 must be ±2^g and ±3^g.
    let g = (n / 2) as u32;
    for t in [2i128, 3] {
        let m: Vec<Vec<i128>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| t * d.b[i][j] as i128 - d.b[j][i] as i128)
                    .collect()
            })
            .collect();
        let v = common::det_laplace(&m);
        if v.abs() != t.pow(g) {
            return Err(format!("det(tB - B^T) at t={t} is {v}"));
        }
    }
    Ok(())
}

fn criterion_6() -> Check {
    let mut rows = Vec::new();
    for (p, k) in [(3i64, 1i64), (3, 2), (5, 2), (3, 3)] {
        let (q, r) = (-p - 2 * k, 3 * p + 8 * k - 2);
        let a = pretzel3_seifert(p, q, r).map_err(|e| e.to_string())?;
        let d = decomposition_search(&a, &DecompositionConfig::default())
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("({p},{k}): no decomposition"))?;
        ensure(d.n() == 1 && d.verified, || {
            format!("({p},{k}): n = {}", d.n())
        })?;
        check_decomposition(&a, &d).map_err(|e| format!("({p},{k}): {e}"))?;
        let det = (4 * k + p).pow(2) - 4 * k;
        ensure(a.knot_determinant() == BigInt::from(det), || {
            format!("({p},{k}): det {} != {det}", a.knot_determinant())
        })?;
        let s = (det as f64).sqrt() as i64;
        ensure(!(s - 1..=s + 1).any(|x| x >= 0 && x * x == det), || {
            format!("({p},{k}): {det} is a square")
        })?;
        let knot = format!("P({p},{q},{r})");
        let rep = report(&knot);
        let top = rep.side(Side::Cp2Top);
        ensure(top.status == Status::Exact && top.lower == fin(1), || {
            format!("{knot}: top [{}, {:?}]", top.lower, top.upper)
        })?;
        if k >= 2 {
            let cp2 = rep.side(Side::Cp2);
            ensure(
                cp2.status == Status::Exact && cp2.lower == fin(k as u64),
                || format!("{knot}: u_CP2 [{}, {:?}]", cp2.lower, cp2.upper),
            )?;
        }
        rows.push(format!("{knot}: det {det}"));
    }
    Ok(format!(
        "rank-one decompositions verified; {}",
        rows.join(", ")
    ))
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let (mut infinite, mut bounded) = (0, 0);
    for _ in 0..1000 {
        let a = rng.gen_range(-9..=9);
        let b = rng.gen_range(-9..=8);
        let c = rng.gen_range(-9..=9);
        let mut e = vec![vec![a, b + 1], vec![b, c]];
        if rng.gen_bool(0.5) {
            e = vec![vec![e[0][0], e[1][0]], vec![e[0][1], e[1][1]]];
        }
        let m = SeifertMatrix::new(e.clone()).map_err(|x| x.to_string())?;
        // 4ac - (2b+1)² > 0 with a > 0 means A + A^T is positive definite.
        let sigma_two = a > 0 && 4 * a * c - (2 * b + 1).pow(2) > 0;
        match genus_one_top_bound(&m).map_err(|x| format!("{e:?}: {x}"))? {
            GenusOneBound::Infinite => {
                ensure(sigma_two, || {
                    format!("{e:?}: infinite but signature is not 2")
                })?;
                infinite += 1;
            }
            GenusOneBound::Bound {
                n, decomposition, ..
            } => {
                ensure(!sigma_two, || {
                    format!("{e:?}: bounded although signature is 2")
                })?;
                ensure(n <= 4 && decomposition.n() == n, || {
                    format!("{e:?}: n = {n}")
                })?;
                check_decomposition(&m, &decomposition).map_err(|x| format!("{e:?}: {x}"))?;
                bounded += 1;
            }
        }
    }
    Ok(format!(
        "{infinite} infinite, {bounded} verified decompositions, 0 failures"
    ))
}

fn criterion_8() -> Check {
    let mut checked = 0;
    for p in (-15..=15).filter(|x: &i64| x % 2 != 0) {
        for q in (-15..=15).filter(|x: &i64| x % 2 != 0) {
            for r in (-15..=15).filter(|x: &i64| x % 2 != 0) {
                let a = pretzel3_seifert(p, q, r).map_err(|e| e.to_string())?;
                let bryant = bryant_signature(&[p, q, r]).map_err(|e| e.to_string())?;
                ensure(a.signature() == bryant, || {
                    format!(
                        "P({p},{q},{r}): signature {} vs Bryant {bryant}",
                        a.signature()
                    )
                })?;
                ensure(
                    a.signature() == common::signature_naive(a.entries()),
                    || format!("P({p},{q},{r}): naive signature"),
                )?;
                let alex = pretzel3_alexander(p, q, r).map_err(|e| e.to_string())?;
                ensure(a.alexander().equivalent(&alex), || {
                    format!("P({p},{q},{r}): Alexander {} vs {alex}", a.alexander())
                })?;
                checked += 1;
            }
        }
    }
    let (mut lattices, mut obstructed) = (0, 0);
    let cfg = EmbedderConfig::default();
    for rank in 1..=3 {
        for g in common::small_negative_definite(rank) {
            let l = IntegralLattice::new(g.clone()).unwrap();
            for m in 0..=1 {
                let fast = donaldson_obstruction(&l, m, &cfg)
                    .map_err(|e| e.to_string())?
                    .verdict
                    == Verdict::Inconclusive;
                let slow = common::brute_force_embeds(&g, m);
                ensure(fast == slow, || {
                    format!("{g:?} m={m}: search {fast}, brute force {slow}")
                })?;
                obstructed += usize::from(!fast);
            }
            lattices += 1;
        }
    }
    for n in 0..=10_000u64 {
        let naive = common::three_squares_naive(n);
        ensure(three_square(n) == naive, || {
            format!("{n}: {:?} vs {naive:?}", three_square(n))
        })?;
    }
    Ok(format!(
        "{checked} pretzel triples, {lattices} lattices at m in {{0,1}} ({obstructed} obstructed cases), three squares up to 10000"
    ))
}

fn criterion_9() -> Check {
    for a in 1..=20i64 {
        let pos = pos_continued_fraction(4 * a + 1, 2).map_err(|e| e.to_string())?;
        ensure(pos == vec![2 * a, 2], || format!("a={a}: {pos:?}"))?;
        ensure(
            eval_pos_continued_fraction(&pos) == Rational64::new(4 * a + 1, 2),
            || format!("a={a}: + value"),
        )?;
        let neg = neg_continued_fraction(4 * a + 1, 4 * a - 1).map_err(|e| e.to_string())?;
        let mut want = vec![2; (2 * a - 1) as usize];
        want.push(3);
        ensure(neg == want, || format!("a={a}: {neg:?}"))?;
        ensure(
            eval_neg_continued_fraction(&neg) == Rational64::new(4 * a + 1, 4 * a - 1),
            || format!("a={a}: - value"),
        )?;
        // Independent evaluation of [c_1, ..., c_k]^- from the right.
        let mut v = Rational64::from_integer(*neg.last().unwrap());
        for &c in neg.iter().rev().skip(1) {
            v = Rational64::from_integer(c) - v.recip();
        }
        ensure(v == Rational64::new(4 * a + 1, 4 * a - 1), || {
            format!("a={a}: recomputed value")
        })?;
        for (p, q) in [(4 * a + 1, 2), (4 * a + 1, 4 * a - 1)] {
            let (n, pp) = lens_fillings(p, q).map_err(|e| e.to_string())?;
            let want = BigInt::from(p);
            ensure(
                n.determinant() == want || n.determinant() == -want.clone(),
                || format!("L({p},{q}) negative filling det"),
            )?;
            ensure(
                pp.determinant() == want || pp.determinant() == -want.clone(),
                || format!("L({p},{q}) positive filling det"),
            )?;
        }
    }
    Ok("a = 1..20 exact".into())
}

fn criterion_10() -> Check {
    for m in 1..=5u64 {
        let knot = format!("{m}*T(2,3)");
        let a = seifert_of(&parse(&knot).unwrap()).map_err(|e| e.to_string())?;
        let at_minus_one = a
            .tristram_levine(UnitSample::MINUS_ONE)
            .map_err(|e| e.to_string())?;
        ensure(
            at_minus_one == a.signature() && at_minus_one == -2 * m as i64,
            || format!("{knot}: sigma(-1) = {at_minus_one}"),
        )?;
        let gate = signature_gate(&a, 64).map_err(|e| e.to_string())?;
        ensure(matches!(gate.cp2, GateBound::AtLeast(x) if x >= m), || {
            format!("{knot}: gate {:?}", gate.cp2)
        })?;
        let top = report(&knot).side(Side::Cp2Top).lower;
        ensure(top >= fin(m), || format!("{knot}: top lower {top}"))?;
    }
    let r = report("T(2,3)");
    ensure(r.side(Side::Cp2Bar).lower == Extended::Infinite, || {
        "u_CP2bar(T(2,3)) not infinite".into()
    })?;
    Ok("u_CP2^top(#^m T(2,3)) >= m for m = 1..5; u_CP2bar(T(2,3)) = inf".into())
}

fn main() {
    let criteria: [(u32, &str, fn() -> Check, u64); 10] = [
        (1, "twist sum K3#K5", criterion_1, 5),
        (2, "sums of twist knots", criterion_2, 120),
        (3, "mixed twist sum", criterion_3, 300),
        (4, "three-strand pretzels", criterion_4, 60),
        (5, "five-strand pretzel", criterion_5, 10),
        (6, "rank-one Seifert decompositions", criterion_6, 60),
        (7, "genus-one procedure", criterion_7, 60),
        (8, "oracle equivalences", criterion_8, 600),
        (9, "continued fractions", criterion_9, 60),
        (10, "signature gates", criterion_10, 60),
    ];
    let mut failures = Vec::new();
    for (id, name, f, limit) in criteria {
        let start = Instant::now();
        let res = f();
        let took = start.elapsed();
        let res = match res {
            Ok(msg) if took > Duration::from_secs(limit) => {
                Err(format!("{msg}; took {took:.2?}, limit {limit}s"))
            }
            r => r,
        };
        match &res {
            Ok(msg) => {
                println!("criterion {id:>2} PASS  {name}: {msg} ({took:.2?}, limit {limit}s)")
            }
            Err(msg) => {
                println!("criterion {id:>2} FAIL  {name}: {msg} ({took:.2?}, limit {limit}s)");
                failures.push(id);
            }
        }
    }
    if !failures.is_empty() {
        eprintln!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
}
