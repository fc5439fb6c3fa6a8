//! Bound aggregation over all engines into a single report.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::time::Instant;

use crate::diophantine::{pretzel_condition, PretzelVerdict, PretzelWitness};
use crate::embedder::{min_obstructed_m, EmbedderConfig, Frontier};
use crate::error::{Error, Result};
use crate::knotspec::{neg_filling_of, seifert_of, upper_rules, KnotExpr, Side};
use crate::matrix;
use crate::plumbing::check_pretzel_filling_hypotheses;
use crate::seifert::{
    signature_gate, GateBound, SampleValue, SeifertMatrix, SignatureGate, DEFAULT_TL_SAMPLES,
};
use crate::upperbound::{
    decomposition_search, genus_one_top_bound, Decomposition, DecompositionConfig, GenusOneBound,
};

pub const DEFAULT_M_MAX: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsConfig {
    pub m_max: usize,
    pub embedder: EmbedderConfig,
    pub decomposition: DecompositionConfig,
    pub tl_samples: usize,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            m_max: DEFAULT_M_MAX,
            embedder: EmbedderConfig::default(),
            decomposition: DecompositionConfig::default(),
            tl_samples: DEFAULT_TL_SAMPLES,
        }
    }
}

/// A nonnegative integer or infinity. Serialized as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(n) => write!(f, "{n}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(n) => s.serialize_u64(*n),
            Extended::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            N(u64),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::N(n) => Ok(Extended::Finite(n)),
            Repr::S(s) if s == "inf" => Ok(Extended::Infinite),
            Repr::S(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Exact,
    Range,
    Infinite,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub kind: BoundKind,
    pub value: Extended,
    pub source: String,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideBounds {
    pub side: Side,
    pub lower: Extended,
    pub upper: Option<Extended>,
    pub status: Status,
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariants {
    pub genus: usize,
    pub signature: i64,
    /// Decimal string; determinants of large sums overflow JSON numbers.
    pub determinant: String,
    pub alexander: String,
    pub alexander_min_degree: i64,
    pub alexander_coeffs: Vec<i64>,
    pub signature_samples: Vec<SampleValue>,
}

impl Invariants {
    pub fn from_seifert(a: &SeifertMatrix, gate: SignatureGate) -> Self {
        let alex = a.alexander().normalized();
        Invariants {
            genus: a.genus(),
            signature: a.signature(),
            determinant: a.knot_determinant().to_string(),
            alexander: alex.to_string(),
            alexander_min_degree: alex.min_degree,
            alexander_coeffs: alex.coeffs,
            signature_samples: gate.samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSweep {
    pub side: Side,
    /// The knot whose double branched cover the lattice fills.
    pub filled: String,
    pub gram: Vec<Vec<i64>>,
    pub frontier: Frontier,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiophantineRecord {
    pub side: Side,
    pub positives: Vec<i64>,
    pub negatives: Vec<i64>,
    /// Values of `m` with no solution.
    pub unsolvable: Vec<usize>,
    pub solvable_at: Option<(usize, PretzelWitness)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub summand: String,
    pub method: String,
    pub decomposition: Decomposition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineStats {
    pub embedder_nodes: u64,
    pub millis: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub knot: String,
    pub normalized: String,
    pub invariants: Invariants,
    pub bounds: Vec<SideBounds>,
    pub lattice_sweeps: Vec<LatticeSweep>,
    pub diophantine: Vec<DiophantineRecord>,
    pub decompositions: Vec<DecompositionRecord>,
    pub notes: Vec<String>,
    pub config: BoundsConfig,
    pub stats: EngineStats,
}

impl ObstructionReport {
    pub fn side(&self, side: Side) -> &SideBounds {
        self.bounds
            .iter()
            .find(|b| b.side == side)
            .expect("all sides present")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("bad report JSON: {e}")))
    }

    /// Plain-text summary table.
    pub fn table(&self) -> String {
        let mut out = format!("knot: {}\n", self.normalized);
        let inv = &self.invariants;
        out += &format!(
            "genus {}  signature {}  determinant {}  alexander {}\n",
            inv.genus, inv.signature, inv.determinant, inv.alexander
        );
        out += &format!(
            "{:<10} {:>6} {:>6}  {}\n",
            "side", "lower", "upper", "status"
        );
        for b in &self.bounds {
            let upper = b.upper.map_or("?".to_string(), |u| u.to_string());
            out += &format!(
                "{:<10} {:>6} {:>6}  {:?}\n",
                b.side.to_string(),
                b.lower.to_string(),
                upper,
                b.status
            );
            for e in &b.evidence {
                let op = match e.kind {
                    BoundKind::Lower => ">=",
                    BoundKind::Upper => "<=",
                };
                out += &format!("    {op} {} [{}] {}\n", e.value, e.source, e.citation);
            }
        }
        for n in &self.notes {
            out += &format!("note: {n}\n");
        }
        out
    }
}

struct Collector {
    evidence: Vec<(Side, Evidence)>,
}

impl Collector {
    fn push(
        &mut self,
        side: Side,
        kind: BoundKind,
        value: Extended,
        source: &str,
        citation: String,
    ) {
        self.evidence.push((
            side,
            Evidence {
                kind,
                value,
                source: source.into(),
                citation,
            },
        ));
    }

    fn best(&self, side: Side, kind: BoundKind) -> Option<Extended> {
        let vals = self
            .evidence
            .iter()
            .filter(|(s, e)| *s == side && e.kind == kind)
            .map(|(_, e)| e.value);
        match kind {
            BoundKind::Lower => vals.max(),
            BoundKind::Upper => vals.min(),
        }
    }
}

/// Runs every applicable engine on `k` and merges the results.
pub fn compute_bounds(k: &KnotExpr, cfg: &BoundsConfig) -> Result<ObstructionReport> {
    let start = Instant::now();
    let norm = k.normalize();
    let a = seifert_of(&norm)?;
    let sigma = a.signature();
    let det = a.knot_determinant();
    let gate = signature_gate(&a, cfg.tl_samples.max(1))?;
    let mut c = Collector {
        evidence: Vec::new(),
    };
    let mut notes = Vec::new();
    let mut nodes = 0;

    for (side, g) in [(Side::Cp2, gate.cp2), (Side::Cp2Bar, gate.cp2bar)] {
        let (value, why) = match g {
            GateBound::Infinite => (
                Extended::Infinite,
                format!(
                    "the Tristram-Levine signature has the wrong sign at a sampled point; a knot slice in #^m {} has {} at every regular point",
                    if side == Side::Cp2 { "CP2" } else { "CP2bar" },
                    if side == Side::Cp2 { "-2m <= sigma_K(w) <= 0" } else { "0 <= sigma_K(w) <= 2m" }
                ),
            ),
            GateBound::AtLeast(0) => continue,
            GateBound::AtLeast(n) => (
                Extended::Finite(n),
                format!("sampled Tristram-Levine signatures force m >= {n}, since |sigma_K(w)| <= 2m"),
            ),
        };
        c.push(side, BoundKind::Lower, value, "signature-gate", why.clone());
        if side == Side::Cp2 {
            c.push(Side::Cp2Top, BoundKind::Lower, value, "signature-gate", why);
        }
    }
    if gate.skipped() > 0 {
        notes.push(format!(
            "{} signature samples skipped near roots of the Alexander polynomial",
            gate.skipped()
        ));
    }

    if !matrix::is_perfect_square(&det) {
        for side in [Side::Cp2, Side::Cp2Bar, Side::Cp2Top] {
            c.push(
                side,
                BoundKind::Lower,
                Extended::Finite(1),
                "fox-milnor",
                format!("det = {det} is not a square, so K is not topologically slice"),
            );
        }
    }

    let mut sweeps = Vec::new();
    if sigma == 0 {
        for (side, target) in [
            (Side::Cp2, norm.clone()),
            (Side::Cp2Bar, norm.clone().mirror().normalize()),
        ] {
            let lattice = match neg_filling_of(&target) {
                Ok(l) if l.rank() > 0 => l,
                Ok(_) => continue,
                Err(Error::Unsupported(why)) => {
                    notes.push(format!("{side}: no lattice obstruction ({why})"));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let frontier = min_obstructed_m(&lattice, cfg.m_max, &cfg.embedder)?;
            nodes += frontier.outcomes.iter().map(|o| o.stats.nodes).sum::<u64>();
            if let Some(m) = frontier.m_star {
                c.push(
                    side,
                    BoundKind::Lower,
                    Extended::Finite(m as u64 + 1),
                    "lattice-embedding",
                    format!(
                        "the negative definite filling of the double branched cover of {target} (rank {}) admits no embedding of half-integer surgery type into Z^(r+2m) with m = {m}",
                        lattice.rank()
                    ),
                );
            }
            if let Some(m) = frontier.exhausted_at {
                notes.push(format!(
                    "{side}: embedding search budget exhausted at m = {m}"
                ));
            } else if frontier.m_star == Some(cfg.m_max) {
                notes.push(format!(
                    "{side}: obstructed up to m-max = {}; larger m not tried",
                    cfg.m_max
                ));
            }
            sweeps.push(LatticeSweep {
                side,
                filled: target.to_string(),
                gram: lattice.gram().to_vec(),
                frontier,
            });
        }
    } else {
        notes.push(format!(
            "signature {sigma} != 0: lattice obstructions not applied"
        ));
    }

    let mut dioph = Vec::new();
    for (side, target) in [
        (Side::Cp2, norm.clone()),
        (Side::Cp2Bar, norm.clone().mirror().normalize()),
    ] {
        let KnotExpr::Pretzel(ps) = &target else {
            continue;
        };
        let pos: Vec<i64> = ps.iter().copied().filter(|&p| p > 0).collect();
        let neg: Vec<i64> = ps.iter().copied().filter(|&p| p < 0).collect();
        if check_pretzel_filling_hypotheses(&pos, &neg).is_err() {
            continue;
        }
        let mut rec = DiophantineRecord {
            side,
            positives: pos.clone(),
            negatives: neg.clone(),
            unsolvable: Vec::new(),
            solvable_at: None,
        };
        for m in 0..=cfg.m_max {
            match pretzel_condition(&pos, &neg, m)? {
                PretzelVerdict::Unsolvable => rec.unsolvable.push(m),
                PretzelVerdict::Solvable(w) => {
                    rec.solvable_at = Some((m, w));
                    break;
                }
            }
        }
        if let Some(&m) = rec.unsolvable.last() {
            c.push(
                side,
                BoundKind::Lower,
                Extended::Finite(m as u64 + 1),
                "diophantine",
                format!("the pretzel embedding equations for {target} have no integer solution with m = {m}"),
            );
        }
        dioph.push(rec);
    }

    for r in upper_rules(&norm) {
        c.push(
            r.side,
            BoundKind::Upper,
            Extended::Finite(r.bound),
            "crossing-changes",
            r.citation,
        );
    }

    let mut decomps = Vec::new();
    top_from_decompositions(&norm, cfg, &mut c, &mut decomps, &mut notes)?;

    // u_CP2^top <= u_CP2.
    if let Some(Extended::Finite(u)) = c.best(Side::Cp2, BoundKind::Upper) {
        c.push(
            Side::Cp2Top,
            BoundKind::Upper,
            Extended::Finite(u),
            "smooth-implies-topological",
            "a smooth slice disk is locally flat".into(),
        );
    }
    if let Some(l @ Extended::Finite(n)) = c.best(Side::Cp2Top, BoundKind::Lower) {
        if n > 0 {
            c.push(
                Side::Cp2,
                BoundKind::Lower,
                l,
                "topological-implies-smooth",
                "u_CP2 >= u_CP2^top".into(),
            );
        }
    }

    let mut bounds = Vec::new();
    for side in [Side::Cp2, Side::Cp2Bar, Side::Cp2Top] {
        let lower = c
            .best(side, BoundKind::Lower)
            .unwrap_or(Extended::Finite(0));
        let upper = if lower == Extended::Infinite {
            Some(Extended::Infinite)
        } else {
            c.best(side, BoundKind::Upper)
        };
        if let Some(u) = upper {
            if lower > u {
                return Err(Error::Internal(format!(
                    "{side} of {norm}: lower bound {lower} exceeds upper bound {u}"
                )));
            }
        }
        let status = match (lower, upper) {
            (Extended::Infinite, _) => Status::Infinite,
            (l, Some(u)) if l == u => Status::Exact,
            (_, Some(_)) => Status::Range,
            (_, None) => Status::Unknown,
        };
        let evidence = c
            .evidence
            .iter()
            .filter(|(s, _)| *s == side)
            .map(|(_, e)| e.clone())
            .collect();
        bounds.push(SideBounds {
            side,
            lower,
            upper,
            status,
            evidence,
        });
    }

    Ok(ObstructionReport {
        knot: k.to_string(),
        normalized: norm.to_string(),
        invariants: Invariants::from_seifert(&a, gate),
        bounds,
        lattice_sweeps: sweeps,
        diophantine: dioph,
        decompositions: decomps,
        notes,
        config: *cfg,
        stats: EngineStats {
            embedder_nodes: nodes,
            millis: start.elapsed().as_millis() as u64,
        },
    })
}

/// Sums per-summand topological bounds; a summand's bound is the best of its
/// crossing-change rules and its Seifert-form decompositions.
fn top_from_decompositions(
    norm: &KnotExpr,
    cfg: &BoundsConfig,
    c: &mut Collector,
    decomps: &mut Vec<DecompositionRecord>,
    notes: &mut Vec<String>,
) -> Result<()> {
    let summands = norm.summands();
    if summands.is_empty() || c.best(Side::Cp2Top, BoundKind::Lower) == Some(Extended::Infinite) {
        return Ok(());
    }
    let mut total = 0u64;
    let mut parts = Vec::new();
    let mut used_decomposition = false;
    for s in &summands {
        let a = seifert_of(s)?;
        let rules = upper_rules(s);
        let rule_best = rules
            .iter()
            .filter(|r| matches!(r.side, Side::Cp2 | Side::Cp2Top))
            .map(|r| r.bound)
            .min();
        let smooth_best = rules
            .iter()
            .filter(|r| r.side == Side::Cp2)
            .map(|r| r.bound)
            .min();
        let mut best: Option<(u64, String)> =
            rule_best.map(|b| (b, "crossing changes".to_string()));
        if a.genus() == 1 {
            if let GenusOneBound::Bound {
                n,
                decomposition,
                case,
            } = genus_one_top_bound(&a)?
            {
                if best.as_ref().is_none_or(|(b, _)| (n as u64) < *b) {
                    best = Some((n as u64, "genus-one decomposition".into()));
                }
                decomps.push(DecompositionRecord {
                    summand: s.to_string(),
                    method: match case {
                        Some(r) => format!("genus-one procedure, negative framing case {r}"),
                        None => "trivial Alexander polynomial".into(),
                    },
                    decomposition,
                });
            }
            // Search for a shorter decomposition than the smooth rules give.
            let ceiling = smooth_best.unwrap_or(4).min(4);
            let n_max = cfg
                .decomposition
                .n_max
                .min(ceiling.saturating_sub(1) as usize);
            if n_max >= 1 {
                let sub = DecompositionConfig {
                    n_max,
                    ..cfg.decomposition
                };
                match decomposition_search(&a, &sub) {
                    Ok(Some(d)) => {
                        let n = d.n() as u64;
                        if best.as_ref().is_none_or(|(b, _)| n < *b) {
                            best = Some((n, "decomposition search".into()));
                        }
                        decomps.push(DecompositionRecord {
                            summand: s.to_string(),
                            method: format!(
                                "exhaustive search, coefficients in [-{0}, {0}], basis depth {1}",
                                sub.coeff_bound, sub.basis_depth
                            ),
                            decomposition: d,
                        });
                    }
                    Ok(None) => {}
                    Err(Error::BudgetExceeded { .. }) => {
                        notes.push(format!(
                            "{s}: decomposition search budget exhausted below n = {}",
                            n_max + 1
                        ));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        match best {
            Some((b, how)) => {
                if how != "crossing changes" {
                    used_decomposition = true;
                }
                total += b;
                parts.push(format!("{s}: <= {b} ({how})"));
            }
            None => return Ok(()),
        }
    }
    if used_decomposition {
        c.push(
            Side::Cp2Top,
            BoundKind::Upper,
            Extended::Finite(total),
            "seifert-decomposition",
            format!(
                "P^T A P = B - sum c c^T with det(tB - B^T) = +-t^k realises the knot from an Alexander polynomial one knot by generalized positive crossings; {}",
                parts.join("; ")
            ),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knotspec::parse;

    fn bounds(s: &str) -> ObstructionReport {
        compute_bounds(&parse(s).unwrap(), &BoundsConfig::default()).unwrap()
    }

    #[test]
    fn unknot_is_exact_zero() {
        let r = bounds("U");
        for b in &r.bounds {
            assert_eq!(b.status, Status::Exact);
            assert_eq!(b.lower, Extended::Finite(0));
        }
    }

    #[test]
    fn pretzel_exact() {
        let r = bounds("P(3,-7,11)");
        let s = r.side(Side::Cp2);
        assert_eq!(
            (s.lower, s.upper),
            (Extended::Finite(2), Some(Extended::Finite(2)))
        );
    }

    #[test]
    fn twist_sum() {
        let r = bounds("K(3)#K(5)");
        let bar = r.side(Side::Cp2Bar);
        assert_eq!(bar.status, Status::Exact);
        assert_eq!(bar.lower, Extended::Finite(2));
        let cp2 = r.side(Side::Cp2);
        assert_eq!(
            (cp2.lower, cp2.upper),
            (Extended::Finite(2), Some(Extended::Finite(4)))
        );
    }

    #[test]
    fn json_round_trip() {
        let r = bounds("T(2,3)");
        assert_eq!(r.side(Side::Cp2Bar).lower, Extended::Infinite);
        let j = r.to_json();
        assert_eq!(ObstructionReport::from_json(&j).unwrap().to_json(), j);
    }
}
