//! One binary, subcommand per pipeline stage: close braids, compute
//! invariants, present link groups, check certificates, run the vanishing
//! threshold report, and decompose free words. Reports print as text or as
//! JSON carrying the same values. Exit code 0 means no error and no
//! soundness alarm; 1 is an error; 2 is an alarm (a mechanically checked
//! implication failed, which should never happen on sound inputs).

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use platlab::braid::parse_braid;
use platlab::config::Config;
use platlab::diagram::{LinkDiagram, PdCode};
use platlab::equivalence::{
    m_equivalence_implies_profile, theorem1_check, verify_certificate, Certificate,
    EquivalenceError, RefutedBy, VerifyOutcome,
};
use platlab::freegroup::{decompose_simple_quasi, FreeWord};
use platlab::invariants::{
    conway, finite_type_profile, linking_matrix, mu_values_through, FiniteTypeProfile,
    InvariantError,
};
use platlab::linkgroup::{chen_milnor_words, wirtinger};
use platlab::{Int, IntConway};

#[derive(Parser)]
#[command(name = "platlab", version, about = "Link invariants of braid closures")]
struct Cli {
    /// Report format; both carry the same values.
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
    /// Truncation degree for Magnus expansions (env PLATLAB_MAGNUS_CAP).
    #[arg(long, global = true)]
    magnus_cap: Option<usize>,
    /// Crossing bound for the Conway skein recursion
    /// (env PLATLAB_CONWAY_CROSSING_BOUND).
    #[arg(long, global = true)]
    conway_crossing_bound: Option<usize>,
    /// Move budget for diagram simplification (env PLATLAB_SIMPLIFY_BUDGET).
    #[arg(long, global = true)]
    simplify_budget: Option<usize>,
    /// Longest mu-bar sequence the pipelines scan (env PLATLAB_MU_CAP).
    #[arg(long, global = true)]
    mu_cap: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Close a braid word and print the diagram's pd code.
    Close {
        /// Plat closure of this word (must be a pure braid).
        #[arg(long, value_name = "WORD", conflicts_with = "trace")]
        plat: Option<String>,
        /// Trace closure of this word (strand ends joined around).
        #[arg(long, value_name = "WORD")]
        trace: Option<String>,
        #[arg(long, default_value_t = 4)]
        strands: usize,
    },
    /// Invariants of a diagram read from a pd-code file or stdin.
    Invariants {
        /// Pd-code file; stdin when absent or "-".
        file: Option<PathBuf>,
        /// Tabulate mu-bar reads over sequences of length up to this.
        #[arg(long, value_name = "LEN")]
        mu_len: Option<usize>,
        /// Compute the Conway polynomial.
        #[arg(long)]
        conway: bool,
        /// Finite type profile through this order.
        #[arg(long, value_name = "ORDER")]
        profile: Option<usize>,
    },
    /// Wirtinger presentation of the link group, with longitude words.
    Group {
        /// Pd-code file; stdin when absent or "-".
        file: Option<PathBuf>,
        /// Also print the longitudes rewritten in the meridians.
        #[arg(long)]
        longitudes: bool,
        /// Rewriting depth for the longitude words.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Check a crossing-switch certificate (JSON file or stdin).
    Verify {
        file: Option<PathBuf>,
    },
    /// Vanishing thresholds of mu-bar next to the finite type profile.
    Theorem1 {
        /// Braid word whose plat closure is examined.
        braid: String,
        /// Profile order m; thresholds are lengths m+1 and m+2.
        order: usize,
        #[arg(long, default_value_t = 4)]
        strands: usize,
    },
    /// Write a free word as a product of simple quasi-commutators.
    Decompose {
        /// Word in generators x1, x2, ..., with brackets for commutators.
        word: String,
        /// Lower-central depth the factors must reach.
        order: usize,
    },
}

fn env_or(flag: Option<usize>, var: &str, default: usize) -> Result<usize> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match std::env::var(var) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| anyhow!("{var} must be a non-negative integer, got {text:?}")),
        Err(_) => Ok(default),
    }
}

fn config_of(cli: &Cli) -> Result<Config> {
    let defaults = Config::default();
    Ok(Config {
        magnus_cap: env_or(cli.magnus_cap, "PLATLAB_MAGNUS_CAP", defaults.magnus_cap)?,
        conway_crossing_bound: env_or(
            cli.conway_crossing_bound,
            "PLATLAB_CONWAY_CROSSING_BOUND",
            defaults.conway_crossing_bound,
        )?,
        simplify_budget: env_or(
            cli.simplify_budget,
            "PLATLAB_SIMPLIFY_BUDGET",
            defaults.simplify_budget,
        )?,
        mu_cap: env_or(cli.mu_cap, "PLATLAB_MU_CAP", defaults.mu_cap)?,
    })
}

fn read_input(file: &Option<PathBuf>) -> Result<String> {
    match file {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
        }
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf).context("reading stdin")?;
            Ok(buf)
        }
    }
}

fn read_diagram(file: &Option<PathBuf>) -> Result<LinkDiagram> {
    let text = read_input(file)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| anyhow!("input is not JSON: {e}"))?;
    // Accept both a bare pd code and the wrapped {"pd": ...} form the
    // json output mode emits, so reports pipe back in unchanged.
    let pd_value = match value {
        serde_json::Value::Object(ref map) if map.contains_key("pd") => map["pd"].clone(),
        other => other,
    };
    let pd: PdCode =
        serde_json::from_value(pd_value).map_err(|e| anyhow!("input is not a pd code: {e}"))?;
    Ok(pd.to_diagram()?)
}

fn conway_json(p: &IntConway) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = p
        .iter()
        .map(|(deg, c)| (deg.to_string(), json!(c.to_string())))
        .collect();
    serde_json::Value::Object(map)
}

fn profile_json(p: &FiniteTypeProfile) -> serde_json::Value {
    let coeffs: serde_json::Map<String, serde_json::Value> =
        p.conway.iter().map(|(deg, c)| (deg.to_string(), json!(c.to_string()))).collect();
    json!({
        "order": p.order,
        "lk": p.lk,
        "conway": coeffs,
        "matches_unlink": p.matches_unlink,
    })
}

fn seq_text(seq: &[usize]) -> String {
    let parts: Vec<String> = seq.iter().map(|i| i.to_string()).collect();
    let sep = if seq.iter().all(|&i| i <= 9) { "" } else { "," };
    parts.join(sep)
}

fn list_text(items: &[usize]) -> String {
    let parts: Vec<String> = items.iter().map(|i| i.to_string()).collect();
    parts.join(",")
}

fn refuted_name(r: RefutedBy) -> &'static str {
    match r {
        RefutedBy::Components => "component count",
        RefutedBy::Linking => "linking numbers",
        RefutedBy::Conway => "conway polynomial",
        RefutedBy::MuBar => "mu-bar reads",
    }
}

fn cmd_close(
    output: Output,
    plat: Option<String>,
    trace: Option<String>,
    strands: usize,
) -> Result<ExitCode> {
    let d = match (plat, trace) {
        (Some(text), None) => parse_braid(&text, strands)?.plat_closure()?,
        (None, Some(text)) => parse_braid(&text, strands)?.ordinary_closure()?,
        _ => bail!("pass exactly one of --plat or --trace"),
    };
    match output {
        Output::Text => println!("{}", serde_json::to_string(&d.pd_code())?),
        Output::Json => println!(
            "{}",
            json!({
                "pd": d.pd_code(),
                "components": d.n_components(),
                "crossings": d.n_crossings(),
            })
        ),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_invariants(
    output: Output,
    cfg: &Config,
    file: Option<PathBuf>,
    mu_len: Option<usize>,
    want_conway: bool,
    profile_order: Option<usize>,
) -> Result<ExitCode> {
    let d = read_diagram(&file)?;
    let lk = linking_matrix(&d);
    let nabla = if want_conway {
        Some(conway::<Int>(&d, cfg.conway_crossing_bound)?)
    } else {
        None
    };
    let mu = match mu_len {
        Some(len) => Some(mu_values_through(&d, len, len)?),
        None => None,
    };
    let profile = match profile_order {
        Some(m) => Some(finite_type_profile(&d, m, cfg.conway_crossing_bound)?),
        None => None,
    };

    match output {
        Output::Json => {
            let mut obj = json!({
                "components": d.n_components(),
                "crossings": d.n_crossings(),
                "lk": lk,
            });
            let map = obj.as_object_mut().expect("object");
            if let Some(p) = &nabla {
                map.insert("conway".into(), conway_json(p));
            }
            if let Some(values) = &mu {
                let rows: Vec<_> = values
                    .iter()
                    .map(|v| {
                        json!({
                            "sequence": v.sequence,
                            "value": v.value.to_string(),
                            "delta": v.delta.to_string(),
                        })
                    })
                    .collect();
                map.insert("mu".into(), json!(rows));
            }
            if let Some(p) = &profile {
                map.insert("profile".into(), profile_json(p));
            }
            println!("{obj}");
        }
        Output::Text => {
            println!("components: {}", d.n_components());
            println!("crossings: {}", d.n_crossings());
            println!("lk:");
            for row in &lk {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                println!("  {}", cells.join(" "));
            }
            if let Some(p) = &nabla {
                println!("conway: {p}");
            }
            if let Some(values) = &mu {
                println!("mu reads through length {}:", mu_len.expect("set"));
                let mut shown = 0;
                for v in values {
                    if v.value != Int::from(0) || v.delta != Int::from(0) {
                        println!(
                            "  mu({}) = {} (delta {})",
                            seq_text(&v.sequence),
                            v.value,
                            v.delta
                        );
                        shown += 1;
                    }
                }
                if shown == 0 {
                    println!("  all vanish");
                } else {
                    println!("  ({} other reads vanish)", values.len() - shown);
                }
            }
            if let Some(p) = &profile {
                println!("profile through order {}:", p.order);
                let coeffs: Vec<String> =
                    p.conway.iter().map(|(d, c)| format!("z^{d}: {c}")).collect();
                println!(
                    "  conway coefficients: {}",
                    if coeffs.is_empty() { "none".into() } else { coeffs.join(", ") }
                );
                println!("  matches unlink: {}", p.matches_unlink);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_group(
    output: Output,
    cfg: &Config,
    file: Option<PathBuf>,
    longitudes: bool,
    cap: Option<usize>,
) -> Result<ExitCode> {
    let d = read_diagram(&file)?;
    let p = wirtinger(&d);
    let cap = cap.unwrap_or(cfg.magnus_cap);
    let words: Option<Vec<FreeWord>> =
        if longitudes { Some(chen_milnor_words(&d, cap)?) } else { None };

    match output {
        Output::Json => {
            let mut obj = json!({
                "components": d.n_components(),
                "arcs": p.n_arcs(),
                "relators": p.relators().iter().map(|r| r.display_with("x")).collect::<Vec<_>>(),
            });
            if let Some(ws) = &words {
                let rendered: Vec<String> = ws.iter().map(|w| w.display_with("x")).collect();
                let map = obj.as_object_mut().expect("object");
                map.insert("cap".into(), json!(cap));
                map.insert("longitudes".into(), json!(rendered));
            }
            println!("{obj}");
        }
        Output::Text => {
            print!("{}", p.display_text());
            if let Some(ws) = &words {
                println!("longitudes (depth {cap}):");
                for (i, w) in ws.iter().enumerate() {
                    let rendered = w.display_with("x");
                    let body = if rendered.is_empty() { "1".to_string() } else { rendered };
                    println!("  W{} = {}", i + 1, body);
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(output: Output, cfg: &Config, file: Option<PathBuf>) -> Result<ExitCode> {
    let text = read_input(&file)?;
    let cert = Certificate::from_json(&text)?;
    let outcome = verify_certificate(&cert, cfg)?;

    // On a verified certificate the profile agreement is a theorem; check it
    // and raise an alarm if it fails. Resource limits only skip the check.
    let mut agreement: Option<bool> = None;
    let mut skipped: Option<String> = None;
    if outcome.is_verified() {
        match m_equivalence_implies_profile(&cert, cert.order(), cfg) {
            Ok(ok) => agreement = Some(ok),
            Err(EquivalenceError::Invariant(e @ InvariantError::TooManyCrossings { .. })) => {
                skipped = Some(e.to_string())
            }
            Err(e) => return Err(e.into()),
        }
    }
    let alarm = agreement == Some(false);

    match output {
        Output::Json => {
            let mut obj = json!({ "outcome": outcome.word(), "alarm": alarm });
            let map = obj.as_object_mut().expect("object");
            match &outcome {
                VerifyOutcome::Refuted { selection, witness } => {
                    map.insert("selection".into(), json!(selection));
                    map.insert("witness".into(), json!(refuted_name(*witness)));
                }
                VerifyOutcome::Inconclusive { selection } => {
                    map.insert("selection".into(), json!(selection));
                }
                VerifyOutcome::Verified => {
                    if let Some(ok) = agreement {
                        map.insert("profile_agreement".into(), json!(ok));
                    }
                    if let Some(reason) = &skipped {
                        map.insert("profile_agreement_skipped".into(), json!(reason));
                    }
                }
            }
            println!("{obj}");
        }
        Output::Text => match &outcome {
            VerifyOutcome::Verified => {
                println!("verified");
                match (agreement, &skipped) {
                    (Some(true), _) => println!(
                        "profile agreement through order {}: confirmed",
                        cert.order()
                    ),
                    (Some(false), _) => println!(
                        "SOUNDNESS ALARM: profiles disagree on a verified certificate"
                    ),
                    (None, Some(reason)) => {
                        println!("profile agreement not checked: {reason}")
                    }
                    (None, None) => {}
                }
            }
            VerifyOutcome::Refuted { selection, witness } => println!(
                "refuted (selection {{{}}} differs by {})",
                list_text(selection),
                refuted_name(*witness)
            ),
            VerifyOutcome::Inconclusive { selection } => println!(
                "inconclusive (selection {{{}}} did not simplify to the target)",
                list_text(selection)
            ),
        },
    }
    Ok(if alarm { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_theorem1(
    output: Output,
    cfg: &Config,
    braid: &str,
    order: usize,
    strands: usize,
) -> Result<ExitCode> {
    let d = parse_braid(braid, strands)?.plat_closure()?;
    let r = theorem1_check(&d, order, cfg)?;
    match output {
        Output::Json => {
            println!(
                "{}",
                json!({
                    "order": r.order,
                    "mu_vanish_short": r.mu_vanish_short,
                    "mu_vanish_long": r.mu_vanish_long,
                    "profile": profile_json(&r.profile),
                    "forward_consistent": r.forward_consistent,
                    "converse_consistent": r.converse_consistent,
                    "consistent": r.consistent(),
                })
            );
        }
        Output::Text => {
            println!("order: {}", r.order);
            println!(
                "mu-bar through length {}: {}",
                r.order + 1,
                if r.mu_vanish_short { "vanish" } else { "do not vanish" }
            );
            println!(
                "mu-bar through length {}: {}",
                r.order + 2,
                if r.mu_vanish_long { "vanish" } else { "do not vanish" }
            );
            println!("profile matches unlink: {}", r.profile.matches_unlink);
            println!("forward implication consistent: {}", r.forward_consistent);
            println!("converse implication consistent: {}", r.converse_consistent);
        }
    }
    Ok(if r.consistent() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn cmd_decompose(output: Output, word: &str, order: usize) -> Result<ExitCode> {
    let w = FreeWord::parse(word, None)?;
    let trees = decompose_simple_quasi(&w, order)?;
    match output {
        Output::Json => {
            let rendered: Vec<String> = trees.iter().map(|t| t.to_string()).collect();
            println!("{}", json!({ "factors": rendered }));
        }
        Output::Text => {
            if trees.is_empty() {
                println!("1 (empty product)");
            }
            for t in &trees {
                println!("{t}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    let cfg = config_of(&cli)?;
    let output = cli.output;
    match cli.command {
        Command::Close { plat, trace, strands } => cmd_close(output, plat, trace, strands),
        Command::Invariants { file, mu_len, conway, profile } => {
            cmd_invariants(output, &cfg, file, mu_len, conway, profile)
        }
        Command::Group { file, longitudes, cap } => {
            cmd_group(output, &cfg, file, longitudes, cap)
        }
        Command::Verify { file } => cmd_verify(output, &cfg, file),
        Command::Theorem1 { braid, order, strands } => {
            cmd_theorem1(output, &cfg, &braid, order, strands)
        }
        Command::Decompose { word, order } => cmd_decompose(output, &word, order),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
