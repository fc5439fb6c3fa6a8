use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use cp2slice::embedder::{donaldson_obstruction, EmbedderConfig, Verdict, DEFAULT_NODE_BUDGET};
use cp2slice::knotspec::{neg_filling_of, parse, seifert_of, upper_rules, KnotExpr, Side};
use cp2slice::report::{compute_bounds, BoundsConfig, Invariants, DEFAULT_M_MAX};
use cp2slice::reproduce::{reproduce, RowResult};
use cp2slice::seifert::{signature_gate, DEFAULT_TL_SAMPLES};
use cp2slice::upperbound::{
    decomposition_search, genus_one_top_bound, Decomposition, DecompositionConfig, GenusOneBound,
};
use cp2slice::Error;

/// Bounds on the number of CP2 or CP2bar summands needed to slice a knot.
#[derive(Parser)]
#[command(name = "cp2slice", version)]
struct Cli {
    /// Node budget for each lattice embedding search.
    #[arg(long, global = true, env = "CP2SLICE_NODE_BUDGET", default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    /// Candidate budget for the Seifert decomposition search.
    #[arg(long, global = true, env = "CP2SLICE_DECOMPOSITION_BUDGET", default_value_t = DecompositionConfig::default().budget)]
    decomposition_budget: u64,
    /// Worker threads for the embedding search.
    #[arg(long, global = true, env = "CP2SLICE_THREADS", default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Genus, signature, determinant, Alexander polynomial and sampled signatures.
    Invariants {
        knot: String,
        #[arg(long)]
        json: bool,
    },
    /// Lower and upper bounds on all three slicing numbers.
    Bounds {
        knot: String,
        /// Largest m tried by the lattice and Diophantine sweeps.
        #[arg(long, default_value_t = DEFAULT_M_MAX)]
        m_max: usize,
        #[arg(long)]
        json: bool,
    },
    /// Decides whether the lattice obstruction rules out slicing in #^m CP2 (or CP2bar).
    Obstruct {
        knot: String,
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        json: bool,
    },
    /// Topological upper bound from Seifert form decompositions.
    UpperTop {
        knot: String,
        /// Largest number of rank-one corrections searched.
        #[arg(long, default_value_t = DecompositionConfig::default().n_max)]
        n_max: usize,
        #[arg(long, default_value_t = DecompositionConfig::default().coeff_bound)]
        coeff_bound: i64,
        #[arg(long, default_value_t = DecompositionConfig::default().basis_depth)]
        basis_depth: usize,
        #[arg(long)]
        json: bool,
    },
    /// Recomputes the published values: all, fast, a group or a row id.
    Reproduce {
        #[arg(default_value = "all")]
        selector: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Cp2,
    Cp2bar,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_BUDGET: u8 = 4;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Error>() {
                Some(Error::Parse { .. }) => EXIT_PARSE,
                Some(Error::Unsupported(_)) => EXIT_UNSUPPORTED,
                Some(Error::BudgetExceeded { .. })
                    if matches!(cli.command, Command::Obstruct { .. }) =>
                {
                    EXIT_BUDGET
                }
                _ => EXIT_FAILURE,
            };
            ExitCode::from(code)
        }
    }
}

fn config(cli: &Cli) -> BoundsConfig {
    BoundsConfig {
        embedder: EmbedderConfig {
            node_budget: cli.budget,
            threads: cli.threads,
        },
        decomposition: DecompositionConfig {
            budget: cli.decomposition_budget,
            ..DecompositionConfig::default()
        },
        ..BoundsConfig::default()
    }
}

fn knot(text: &str) -> anyhow::Result<KnotExpr> {
    Ok(parse(text)?)
}

fn print_json<T: serde::Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    let cfg = config(cli);
    match &cli.command {
        Command::Invariants { knot: text, json } => {
            let k = knot(text)?.normalize();
            let a = seifert_of(&k)?;
            let inv = Invariants::from_seifert(&a, signature_gate(&a, DEFAULT_TL_SAMPLES)?);
            if *json {
                print_json(&inv)?;
            } else {
                println!("knot: {k}");
                println!("genus: {}", inv.genus);
                println!("signature: {}", inv.signature);
                println!("determinant: {}", inv.determinant);
                println!("alexander: {}", inv.alexander);
                let sigmas: Vec<String> = inv
                    .signature_samples
                    .iter()
                    .map(|s| s.value.map_or("?".into(), |v| v.to_string()))
                    .collect();
                println!("tristram-levine samples: {}", sigmas.join(" "));
            }
            Ok(0)
        }
        Command::Bounds {
            knot: text,
            m_max,
            json,
        } => {
            let cfg = BoundsConfig {
                m_max: *m_max,
                ..cfg
            };
            let report = compute_bounds(&knot(text)?, &cfg)?;
            if *json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.table());
            }
            Ok(0)
        }
        Command::Obstruct {
            knot: text,
            side,
            m,
            json,
        } => {
            let k = knot(text)?.normalize();
            let sigma = seifert_of(&k)?.signature();
            if sigma != 0 {
                return Err(Error::Unsupported(format!(
                    "signature {sigma} != 0; the lattice obstruction needs signature zero (see `bounds` for the signature bound)"
                ))
                .into());
            }
            let (side, target) = match side {
                SideArg::Cp2 => (Side::Cp2, k.clone()),
                SideArg::Cp2bar => (Side::Cp2Bar, k.clone().mirror().normalize()),
            };
            let lattice = neg_filling_of(&target).context("no negative definite filling")?;
            let outcome = donaldson_obstruction(&lattice, *m, &cfg.embedder)?;
            if *json {
                print_json(&outcome)?;
            } else {
                println!("knot: {k}");
                println!(
                    "filling of the double branched cover of {target}, rank {}",
                    lattice.rank()
                );
                match outcome.verdict {
                    Verdict::Obstructed => {
                        println!(
                            "obstructed: {k} is not slice in #^{m} {}; {side} >= {}",
                            side_space(side),
                            m + 1
                        )
                    }
                    Verdict::Inconclusive => {
                        println!("inconclusive: embedding data exists at m = {m}");
                        if let Some(w) = &outcome.witness {
                            println!("images in Z^{}:", w.target_rank);
                            for v in &w.images {
                                println!("  {v:?}");
                            }
                            for (u, w) in w.u.iter().zip(&w.w) {
                                println!("  u {u:?}  w {w:?}");
                            }
                        }
                    }
                }
                println!(
                    "nodes: {}  time: {} ms",
                    outcome.stats.nodes, outcome.stats.millis
                );
            }
            Ok(0)
        }
        Command::UpperTop {
            knot: text,
            n_max,
            coeff_bound,
            basis_depth,
            json,
        } => {
            let dcfg = DecompositionConfig {
                n_max: *n_max,
                coeff_bound: *coeff_bound,
                basis_depth: *basis_depth,
                budget: cli.decomposition_budget,
            };
            let summary = upper_top(&knot(text)?.normalize(), &dcfg)?;
            if *json {
                print_json(&summary)?;
            } else {
                for s in &summary.summands {
                    let b = s.bound.map_or("none found".to_string(), |b| b.to_string());
                    println!("{}: {b} ({})", s.summand, s.method);
                    if let Some(d) = &s.decomposition {
                        println!("  B = {:?}", d.b);
                        for c in &d.cs {
                            println!("  c = {c:?}");
                        }
                    }
                }
                match summary.total {
                    Some(t) => println!("u_CP2^top <= {t}"),
                    None => println!("no topological upper bound found"),
                }
            }
            Ok(0)
        }
        Command::Reproduce { selector, json } => {
            let rows = reproduce(selector, &cfg)?;
            if *json {
                print_json(&rows)?;
            } else {
                print_rows(&rows);
            }
            Ok(if rows.iter().all(|r| r.pass) {
                0
            } else {
                EXIT_FAILURE
            })
        }
    }
}

fn side_space(side: Side) -> &'static str {
    match side {
        Side::Cp2Bar => "CP2bar",
        _ => "CP2",
    }
}

fn print_rows(rows: &[RowResult]) {
    for r in rows {
        println!(
            "{} {} ({} ms)",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.millis
        );
        println!("  {}", r.citation);
        println!("  expected: {}", r.expected);
        println!("  computed: {}", r.computed);
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    println!("{passed}/{} rows passed", rows.len());
}

#[derive(serde::Serialize)]
struct SummandBound {
    summand: String,
    bound: Option<u64>,
    method: String,
    decomposition: Option<Decomposition>,
}

#[derive(serde::Serialize)]
struct UpperTopSummary {
    summands: Vec<SummandBound>,
    total: Option<u64>,
}

fn upper_top(k: &KnotExpr, cfg: &DecompositionConfig) -> anyhow::Result<UpperTopSummary> {
    let mut summands = Vec::new();
    for s in k.summands() {
        let a = seifert_of(&s)?;
        let rule = upper_rules(&s)
            .into_iter()
            .filter(|r| matches!(r.side, Side::Cp2 | Side::Cp2Top))
            .min_by_key(|r| r.bound);
        let mut best = SummandBound {
            summand: s.to_string(),
            bound: rule.as_ref().map(|r| r.bound),
            method: rule.map_or("no crossing-change rule".into(), |r| r.citation),
            decomposition: None,
        };
        let mut offer = |n: u64, method: String, d: Decomposition| {
            if best.bound.is_none_or(|b| n < b) {
                best.bound = Some(n);
                best.method = method;
                best.decomposition = Some(d);
            }
        };
        if a.genus() == 1 {
            match genus_one_top_bound(&a)? {
                GenusOneBound::Infinite => {
                    summands.push(SummandBound {
                        summand: s.to_string(),
                        bound: None,
                        method: "signature 2: not slice in any #^m CP2".into(),
                        decomposition: None,
                    });
                    continue;
                }
                GenusOneBound::Bound {
                    n, decomposition, ..
                } => offer(n as u64, "genus-one procedure".into(), decomposition),
            }
        }
        match decomposition_search(&a, cfg) {
            Ok(Some(d)) => offer(d.n() as u64, "decomposition search".into(), d),
            Ok(None) => {}
            Err(Error::BudgetExceeded { .. }) => {
                eprintln!("note: {s}: decomposition search budget exhausted")
            }
            Err(e) => bail!(e),
        }
        summands.push(best);
    }
    let total = summands.iter().map(|s| s.bound).sum();
    Ok(UpperTopSummary { summands, total })
}
