//! `leantd`: lean tree decompositions, k-Gomory-Hu trees and small-cut
//! queries on edge-list graphs.
//!
//! Exit status: 0 success, 1 input error, 2 verification failure.

mod doc;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use leantd::bodlaender::{bodlaender_k_lean, BodlaenderConfig, ImproverMode};
use leantd::connectivity::{
    classes_of, element_gomory_hu_with, is_proper_separator, k_gomory_hu_with, vertex_separator_lt_k_with, Engine,
    GhOptions,
};
use leantd::corpus;
use leantd::lean::{k_lean_run, single_bag_cut};
use leantd::oracle::{self, check_lean, oracle_kecc, LeanCheckMethod, oracle_vertex_connectivity, VertexConnectivity};
use leantd::sparsifier::{ni_sparsify, verify_sparsifier};
use leantd::star::{unbreakable_k_lean_with, UnbreakableOptions};
use leantd::{Graph, TreeDecomposition};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use doc::{GhDoc, SparsifierDoc, StarDoc, TdDoc, TraceDoc, Verification};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("verification failed: {reason}")]
    Verification { reason: String, counterexample: serde_json::Value },
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "leantd", version, about = "Lean tree decompositions and small-cut connectivity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// k-sparsifier: union of k BFS spanning forests.
    Sparsify(SparsifyArgs),
    /// k-lean tree decomposition.
    Lean(LeanArgs),
    /// Element-connectivity k-Gomory-Hu tree.
    Ghtree(GhArgs),
    /// k-edge-connected components, one class per line.
    Ecc(EccArgs),
    /// A proper vertex separator of size < k, or "none".
    Vconn(EccArgs),
    /// Replay an emitted JSON document against its graph.
    Verify(VerifyArgs),
    /// Write the built-in test corpus as edge-list files.
    Corpus(CorpusArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Input graph in `p n m` / `e u v` edge-list format.
    graph: PathBuf,
    /// Write output here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Re-check the output with the matching oracle before exiting 0.
    #[arg(long)]
    verify: bool,
}

#[derive(Args, Debug)]
struct SparsifyArgs {
    #[arg(short)]
    k: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct LeanArgs {
    #[arg(short)]
    k: usize,
    /// Use the fast path for (s,k)-unbreakable inputs.
    #[arg(long = "unbreakable-s", value_name = "S")]
    unbreakable_s: Option<usize>,
    /// Take the big-star route even below the size threshold.
    #[arg(long, requires = "unbreakable_s")]
    force_big_star: bool,
    /// Route through the recursive contraction/elimination engine.
    #[arg(long, conflicts_with = "unbreakable_s")]
    via_bodlaender: bool,
    /// Base-case size for --via-bodlaender (default max(2, 64k³)).
    #[arg(long, requires = "via_bodlaender")]
    threshold: Option<usize>,
    /// Start each improvement from the lifted decomposition when possible.
    #[arg(long, requires = "via_bodlaender")]
    warm_start: bool,
    /// Record the potential and witness of every refinement.
    #[arg(long, conflicts_with_all = ["unbreakable_s", "via_bodlaender"])]
    trace: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct GhArgs {
    #[arg(short)]
    k: usize,
    /// Terminal set: `all`, or a file of whitespace-separated vertex ids.
    #[arg(long, default_value = "all")]
    terminals: String,
    #[arg(long)]
    via_bodlaender: bool,
    /// Build on the input graph itself rather than its k-sparsifier.
    #[arg(long)]
    no_sparsify: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct EccArgs {
    #[arg(short)]
    k: usize,
    #[arg(long)]
    via_bodlaender: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    graph: PathBuf,
    /// A document emitted by sparsify, lean or ghtree.
    artifact: PathBuf,
}

#[derive(Args, Debug)]
struct CorpusArgs {
    /// Every graph up to isomorphism on 1..=N vertices (N ≤ 9).
    #[arg(long, value_name = "N", conflicts_with = "random")]
    exhaustive: Option<usize>,
    /// This many seeded random graphs.
    #[arg(long, value_name = "COUNT")]
    random: Option<usize>,
    #[arg(long, default_value_t = 30)]
    max_n: usize,
    /// Edge densities, cycled through.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.6")]
    density: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    dir: PathBuf,
}

fn check_k(k: usize) -> CliResult<()> {
    if k == 0 {
        return Err(CliError::Input("k must be at least 1".into()));
    }
    Ok(())
}

fn read_graph(path: &Path) -> CliResult<Graph> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Graph::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(output: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Indented JSON with arrays of scalars kept on one line, so bags and
/// separators stay readable.
fn to_json<T: Serialize>(doc: &T) -> String {
    let value = serde_json::to_value(doc).expect("documents serialize");
    let mut out = String::new();
    write_value(&value, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &serde_json::Value, depth: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push_str(&serde_json::to_string(v).expect("scalars serialize"));
        }
        Value::Array(items) if items.iter().all(|x| x.as_array().is_some_and(|a| a.iter().all(|y| y.is_number()))) => {
            out.push_str(&serde_json::to_string(v).expect("scalars serialize"));
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(x, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (key, x)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&serde_json::to_string(key).expect("keys serialize"));
                out.push_str(": ");
                write_value(x, depth + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        scalar => out.push_str(&serde_json::to_string(scalar).expect("scalars serialize")),
    }
}

fn passed(method: &str) -> Verification {
    Verification { passed: true, method: method.into(), detail: None }
}

fn failure(reason: impl Into<String>, counterexample: serde_json::Value) -> CliError {
    CliError::Verification { reason: reason.into(), counterexample }
}

fn engine_of(via_bodlaender: bool) -> Engine {
    if via_bodlaender {
        Engine::Bodlaender
    } else {
        Engine::Direct
    }
}

fn sparsify(args: &SparsifyArgs) -> CliResult<()> {
    check_k(args.k)?;
    let g = read_graph(&args.common.graph)?;
    let sp = ni_sparsify(&g, args.k);
    let mut doc = SparsifierDoc::new(g.n(), args.k, &sp);
    let mut outcome: CliResult<()> = Ok(());
    if args.common.verify {
        let checked = verify_sparsifier_doc(&g, &doc);
        doc.verification = checked.as_ref().ok().cloned();
        outcome = checked.map(|_| ());
    }
    emit(&args.common.output, &to_json(&doc))?;
    outcome
}

fn verify_sparsifier_doc(g: &Graph, doc: &SparsifierDoc) -> CliResult<Verification> {
    let sp = doc.to_sparsifier().map_err(|e| failure(e, json!(null)))?;
    verify_sparsifier(g, &sp, doc.k).map_err(|v| failure(v.to_string(), json!({ "violation": format!("{v:?}") })))?;
    Ok(passed("sparsifier-contract"))
}

fn verify_td(g: &Graph, td: &TreeDecomposition, k: usize) -> CliResult<Verification> {
    match check_lean(g, td, k) {
        Ok(method) => Ok(passed(match method {
            LeanCheckMethod::Exhaustive => "exhaustive-vertex-cuts",
            LeanCheckMethod::BagSubsetFlows => "bag-subset-flows",
            LeanCheckMethod::SeparatorEnumeration => "separator-enumeration",
        })),
        Err(v) => Err(failure(v.to_string(), json!({ "violation": format!("{v:?}") }))),
    }
}

fn lean(args: &LeanArgs) -> CliResult<()> {
    check_k(args.k)?;
    let g = read_graph(&args.common.graph)?;
    let k = args.k;
    let mut doc = if let Some(s) = args.unbreakable_s {
        if s < k {
            return Err(CliError::Input(format!("--unbreakable-s {s} must be at least k = {k}")));
        }
        let opts = UnbreakableOptions { force_big_star: args.force_big_star };
        let run = unbreakable_k_lean_with(&g, s, k, opts).map_err(CliError::input)?;
        let mut doc = TdDoc::new(g.n(), k, "unbreakable", &run.td);
        if let Some(std) = &run.star {
            if args.common.verify {
                if let Some(cut) = single_bag_cut(&g, &std.root_bag(), k) {
                    return Err(failure(
                        "root bag of the star decomposition is not k-lean",
                        json!({ "a": cut.a(), "b": cut.b() }),
                    ));
                }
            }
            doc.star = Some(StarDoc::new(std));
        }
        doc
    } else if args.via_bodlaender {
        let cfg = BodlaenderConfig {
            threshold: args.threshold,
            mode: if args.warm_start { ImproverMode::WarmStart } else { ImproverMode::FromScratch },
        };
        let td = bodlaender_k_lean(&g, k, &cfg).map_err(CliError::input)?;
        TdDoc::new(g.n(), k, "bodlaender", &td)
    } else {
        let run = k_lean_run(&g, k, None).map_err(CliError::input)?;
        let mut doc = TdDoc::new(g.n(), k, "direct", &run.td);
        if args.trace {
            doc.trace = Some(TraceDoc::new(&run, k));
        }
        doc
    };
    let mut outcome: CliResult<()> = Ok(());
    if args.common.verify {
        let td = doc.to_td().map_err(CliError::input)?;
        let checked = verify_td(&g, &td, k);
        doc.verification = checked.as_ref().ok().cloned();
        outcome = checked.map(|_| ());
    }
    emit(&args.common.output, &to_json(&doc))?;
    outcome
}

fn read_terminals(spec: &str, n: usize) -> CliResult<Vec<usize>> {
    if spec == "all" {
        return Ok((0..n).collect());
    }
    let text = fs::read_to_string(spec).map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        let v: usize = tok.parse().map_err(|_| CliError::Input(format!("{spec}: bad vertex id {tok:?}")))?;
        if v >= n {
            return Err(CliError::Input(format!("{spec}: vertex {v} out of range (n = {n})")));
        }
        out.push(v);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn verify_gh_doc(g: &Graph, doc: &GhDoc) -> CliResult<Verification> {
    let gh = doc.to_tree(g.n()).map_err(|e| failure(e, json!(null)))?;
    oracle::verify_gomory_hu(g, &doc.terminals(), doc.k, &gh)
        .map_err(|v| failure(v.to_string(), json!({ "violation": format!("{v:?}") })))?;
    Ok(passed("pairwise-element-connectivity"))
}

fn ghtree(args: &GhArgs) -> CliResult<()> {
    check_k(args.k)?;
    let g = read_graph(&args.common.graph)?;
    let terminals = read_terminals(&args.terminals, g.n())?;
    let opts = GhOptions { engine: engine_of(args.via_bodlaender), sparsify: !args.no_sparsify };
    let gh = element_gomory_hu_with(&g, &terminals, args.k, opts).map_err(CliError::input)?;
    let mut doc = GhDoc::new(&gh);
    let mut outcome: CliResult<()> = Ok(());
    if args.common.verify {
        let checked = verify_gh_doc(&g, &doc);
        doc.verification = checked.as_ref().ok().cloned();
        outcome = checked.map(|_| ());
    }
    emit(&args.common.output, &to_json(&doc))?;
    outcome
}

fn ecc(args: &EccArgs) -> CliResult<()> {
    check_k(args.k)?;
    let g = read_graph(&args.common.graph)?;
    let opts = GhOptions { engine: engine_of(args.via_bodlaender), sparsify: true };
    let gh = k_gomory_hu_with(&g, args.k, opts).map_err(CliError::input)?;
    let classes = classes_of(&gh);
    let text: String = classes.iter().map(|c| join(c) + "\n").collect();
    emit(&args.common.output, &text)?;
    if args.common.verify {
        let expected = oracle::normalize_partition(oracle_kecc(&g, args.k));
        if expected != classes {
            return Err(failure(
                "classes differ from pairwise edge-connectivity",
                json!({ "expected": expected, "found": classes }),
            ));
        }
    }
    Ok(())
}

fn vconn(args: &EccArgs) -> CliResult<()> {
    check_k(args.k)?;
    let g = read_graph(&args.common.graph)?;
    let sep = vertex_separator_lt_k_with(&g, args.k, engine_of(args.via_bodlaender)).map_err(CliError::input)?;
    emit(&args.common.output, &(sep.as_deref().map_or("none".to_string(), join) + "\n"))?;
    if args.common.verify {
        let conn = oracle_vertex_connectivity(&g).map_err(CliError::input)?;
        let expect_some = matches!(conn, VertexConnectivity::Value(c) if c < args.k);
        match &sep {
            Some(s) if !(s.len() < args.k && is_proper_separator(&g, s)) => {
                return Err(failure("returned set is not a proper separator of size < k", json!({ "separator": s })));
            }
            _ if sep.is_some() != expect_some => {
                return Err(failure(
                    "separator existence disagrees with the connectivity oracle",
                    json!({ "separator": sep, "connectivity": format!("{conn:?}") }),
                ));
            }
            _ => {}
        }
    }
    Ok(())
}

fn verify(args: &VerifyArgs) -> CliResult<()> {
    let g = read_graph(&args.graph)?;
    let text = fs::read_to_string(&args.artifact)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.artifact.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(CliError::input)?;
    let bad_doc = |e: serde_json::Error| CliError::Input(format!("{}: {e}", args.artifact.display()));
    let report = if value.get("gamma").is_some() {
        let doc: GhDoc = serde_json::from_value(value).map_err(bad_doc)?;
        verify_gh_doc(&g, &doc)?
    } else if value.get("bags").is_some() {
        let doc: TdDoc = serde_json::from_value(value).map_err(bad_doc)?;
        if doc.n != g.n() {
            return Err(failure(format!("document is for {} vertices, graph has {}", doc.n, g.n()), json!(null)));
        }
        let td = doc.to_td().map_err(|e| failure(e.to_string(), json!(null)))?;
        verify_td(&g, &td, doc.k)?
    } else if value.get("forest_index").is_some() {
        let doc: SparsifierDoc = serde_json::from_value(value).map_err(bad_doc)?;
        verify_sparsifier_doc(&g, &doc)?
    } else {
        return Err(CliError::Input(format!("{}: not a leantd document", args.artifact.display())));
    };
    print!("{}", to_json(&report));
    Ok(())
}

fn write_corpus(args: &CorpusArgs) -> CliResult<()> {
    let graphs = match (args.exhaustive, args.random) {
        (Some(n), None) if (1..=9).contains(&n) => corpus::exhaustive(n),
        (Some(n), None) => return Err(CliError::Input(format!("--exhaustive {n} must be in 1..=9"))),
        (None, Some(count)) => {
            if args.density.is_empty() || args.density.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(CliError::Input("densities must lie in [0, 1]".into()));
            }
            corpus::random_corpus(args.seed, count, args.max_n, &args.density)
        }
        _ => return Err(CliError::Input("pass exactly one of --exhaustive or --random".into())),
    };
    fs::create_dir_all(&args.dir).map_err(|e| CliError::Input(format!("{}: {e}", args.dir.display())))?;
    let width = graphs.len().to_string().len().max(4);
    for (i, g) in graphs.iter().enumerate() {
        let path = args.dir.join(format!("g{i:0width$}.graph"));
        fs::write(&path, g.to_edge_list()).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn join(vs: &[usize]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Sparsify(a) => sparsify(a),
        Command::Lean(a) => lean(a),
        Command::Ghtree(a) => ghtree(a),
        Command::Ecc(a) => ecc(a),
        Command::Vconn(a) => vconn(a),
        Command::Verify(a) => verify(a),
        Command::Corpus(a) => write_corpus(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Verification { reason, counterexample }) => {
            let dump = json!({ "verification": "failed", "reason": reason, "counterexample": counterexample });
            eprintln!("{}", serde_json::to_string_pretty(&dump).expect("dump serializes"));
            ExitCode::from(2)
        }
    }
}
