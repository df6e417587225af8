//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p leantd-cli --test acceptance`. A criterion number
//! as argument runs only that criterion.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use leantd::bodlaender::{
    bodlaender_k_lean, lift_highdeg, lift_lowdeg, uncontract, BodlaenderConfig, ImproverMode,
};
use leantd::connectivity::{element_gomory_hu, k_edge_cc, k_gomory_hu, vertex_separator_lt_k, is_proper_separator};
use leantd::corpus::{clique_with_pendants, exhaustive, random_corpus, random_graph, Pendant};
use leantd::lean::{k_lean_td, single_bag_cut};
use leantd::oracle::{
    brute_flow_star, brute_vertex_connectivity, check_lean_with, exhaustive_witness, flow_search_cost,
    flow_search_violation, is_unbreakable, local_vertex_connectivity, normalize_partition, oracle_kecc,
    oracle_vertex_connectivity, separator_enumeration_witness, verify_gomory_hu, VertexConnectivity,
};
use leantd::sparsifier::{ni_sparsify, verify_sparsifier};
use leantd::star::{unbreakable_k_lean, unbreakable_k_lean_with, UnbreakableOptions};
use leantd::td::validate;
use leantd::witness::find_non_lean_witness;
use leantd::{Graph, Matching, TreeDecomposition};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DENSITIES: [f64; 3] = [0.1, 0.3, 0.6];
const CORPUS_SEED: u64 = 2024;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Exhaustive graphs on ≤ 7 vertices followed by 200 seeded random graphs
/// on ≤ 30 vertices.
fn corpus() -> Vec<Graph> {
    let mut all = exhaustive(7);
    all.extend(random_corpus(CORPUS_SEED, 200, 30, &DENSITIES));
    all
}

fn c1_kecc() -> Outcome {
    let graphs = corpus();
    let mut checks = 0;
    for g in &graphs {
        for k in 1..=4 {
            let ours = k_edge_cc(g, k).map_err(|e| e.to_string())?;
            let truth = normalize_partition(oracle_kecc(g, k));
            ensure!(ours == truth, "k={k} {g:?}: got {ours:?}, oracle {truth:?}");
            checks += 1;
        }
    }
    Ok(format!("{checks} (graph, k) pairs over {} graphs", graphs.len()))
}

fn c2_gomory_hu() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut full, mut element) = (0, 0);
    for g in &corpus() {
        let n = g.n();
        let all: Vec<usize> = (0..n).collect();
        for k in 1..=4 {
            let gh = k_gomory_hu(g, k).map_err(|e| e.to_string())?;
            verify_gomory_hu(g, &all, k, &gh).map_err(|v| format!("k={k} U=V {g:?}: {v}"))?;
            ensure!(gh.edges.iter().all(|e| e.alpha.vertices.is_empty()), "vertex in an edge-GH cut");
            full += 1;
            for size in [(n / 4).max(1), (n / 2).max(1), (3 * n / 4).max(1)] {
                let mut u = all.clone();
                u.shuffle(&mut rng);
                u.truncate(size);
                u.sort_unstable();
                let gh = element_gomory_hu(g, &u, k).map_err(|e| e.to_string())?;
                verify_gomory_hu(g, &u, k, &gh).map_err(|v| format!("k={k} U={u:?} {g:?}: {v}"))?;
                element += 1;
            }
        }
    }
    Ok(format!("{full} k-GH trees and {element} element GH trees verified pair-exhaustively"))
}

fn c3_leanness() -> Outcome {
    let graphs = corpus();
    let cfg = BodlaenderConfig { threshold: Some(2), mode: ImproverMode::FromScratch };
    let (mut by_cuts, mut by_flows, mut by_separators) = (0, 0, 0);
    for g in &graphs {
        for k in 1..=4 {
            let direct = k_lean_td(g, k).map_err(|e| e.to_string())?;
            let via = bodlaender_k_lean(g, k, &cfg).map_err(|e| e.to_string())?;
            for (engine, td) in [("direct", &direct), ("bodlaender", &via)] {
                validate(g, td).map_err(|v| format!("{engine} k={k}: {v}"))?;
                ensure!(td.adhesion_size() < k, "{engine} k={k}: adhesion {}", td.adhesion_size());
                let witness = if g.n() <= 7 {
                    by_cuts += 1;
                    exhaustive_witness(g, td, k).map_err(|e| e.to_string())?.is_some()
                } else if flow_search_cost(td, k) <= 300_000 {
                    by_flows += 1;
                    flow_search_violation(g, td, k).is_some()
                } else {
                    by_separators += 1;
                    separator_enumeration_witness(g, td, k).is_some()
                };
                ensure!(!witness, "{engine} k={k} {g:?}: non-lean witness in {td:?}");
            }
        }
    }
    Ok(format!(
        "both engines lean: {by_cuts} by all vertex cuts, {by_flows} by bag-subset flows, \
         {by_separators} by separator enumeration (bags too large for subset flows)"
    ))
}

fn write_graphs(dir: &Path, graphs: &[Graph]) -> Vec<std::path::PathBuf> {
    graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let p = dir.join(format!("g{i:05}.graph"));
            fs::write(&p, g.to_edge_list()).unwrap();
            p
        })
        .collect()
}

fn c4_potential() -> Outcome {
    let graphs = corpus();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let paths = write_graphs(dir.path(), &graphs);
    let (mut runs, mut steps, mut longest) = (0, 0usize, 0usize);
    for (g, path) in graphs.iter().zip(&paths) {
        for k in 1..=4 {
            let out = Command::new(env!("CARGO_BIN_EXE_leantd"))
                .args(["lean", "-k", &k.to_string(), "--trace"])
                .arg(path)
                .output()
                .map_err(|e| e.to_string())?;
            ensure!(out.status.success(), "lean --trace failed on {}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
            let doc: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
            let trace = &doc["trace"];
            let num = |v: &serde_json::Value| -> Result<BigUint, String> {
                v.as_str().and_then(|s| s.parse().ok()).ok_or_else(|| format!("bad potential {v}"))
            };
            let initial = num(&trace["initial_potential"])?;
            // Φ(initial) ≤ 4^{4k}·n for one bag per component.
            let cap = BigUint::from(4u32).pow(4 * k as u32) * BigUint::from(g.n().max(1));
            ensure!(initial <= cap, "initial potential {initial} above 4^(4k)·n");
            let list = trace["steps"].as_array().ok_or("missing steps")?;
            let mut phi = initial.clone();
            for step in list {
                let (before, after) = (num(&step["potential_before"])?, num(&step["potential_after"])?);
                ensure!(before == phi, "trace is not chained at {step}");
                ensure!(after < before, "potential did not drop at {step} ({})", path.display());
                phi = after;
            }
            ensure!(phi == num(&trace["final_potential"])?, "final potential mismatch");
            ensure!(BigUint::from(list.len()) <= initial, "{} rounds exceed Φ(initial) = {initial}", list.len());
            runs += 1;
            steps += list.len();
            longest = longest.max(list.len());
        }
    }
    Ok(format!("{runs} traced runs, {steps} refinements, all Φ drops ≥ 1 (longest run {longest} rounds)"))
}

fn components_without(g: &Graph, s: &[usize]) -> Vec<Vec<usize>> {
    let keep: Vec<usize> = (0..g.n()).filter(|v| !s.contains(v)).collect();
    let (h, _) = g.induced_subgraph(&keep).unwrap();
    let mut comps: Vec<Vec<usize>> =
        h.components().into_iter().map(|c| c.into_iter().map(|x| keep[x]).collect()).collect();
    comps.iter_mut().for_each(|c| c.sort_unstable());
    comps.sort();
    comps
}

fn c5_sparsifier() -> Outcome {
    let start = Instant::now();
    let mut graphs = exhaustive(8);
    let exhaustive_count = graphs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..3000 {
        let n = rng.gen_range(9..=12);
        graphs.push(random_graph(&mut rng, n, DENSITIES[i % 3]));
    }
    for g in &graphs {
        let n = g.n();
        for k in 1..=3 {
            let sp = ni_sparsify(g, k);
            let h = &sp.subgraph;
            ensure!(h.m() <= k * n, "k={k}: {} edges > kn", h.m());
            for mask in 0u32..1 << n {
                if mask.count_ones() as usize >= k {
                    continue;
                }
                let s: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                ensure!(components_without(g, &s) == components_without(h, &s), "k={k} S={s:?} {g:?}");
            }
            for (u, v) in g.edges() {
                if !h.has_edge(u, v) {
                    let f = brute_flow_star(h, u, v).map_err(|e| e.to_string())?;
                    ensure!(f >= k, "removed edge {u}-{v} has flow* {f} < {k}");
                }
            }
            verify_sparsifier(g, &sp, k).map_err(|v| v.to_string())?;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    Ok(format!(
        "{} graphs ({exhaustive_count} exhaustive n ≤ 8, 3000 random n = 9..12), k ≤ 3, in {:.1}s",
        graphs.len(),
        elapsed.as_secs_f64()
    ))
}

fn c6_vertex_connectivity() -> Outcome {
    let graphs: Vec<Graph> = exhaustive(8).into_iter().filter(|g| g.n() >= 2).collect();
    let (mut found, mut none) = (0, 0);
    for g in &graphs {
        let conn = oracle_vertex_connectivity(g).map_err(|e| e.to_string())?;
        let brute = brute_vertex_connectivity(g).map_err(|e| e.to_string())?;
        ensure!(
            brute == match conn { VertexConnectivity::Complete => None, VertexConnectivity::Value(c) => Some(c) },
            "oracles disagree on {g:?}"
        );
        for k in 1..=4 {
            let sep = vertex_separator_lt_k(g, k).map_err(|e| e.to_string())?;
            let exists = brute.is_some_and(|c| c < k);
            ensure!(sep.is_some() == exists, "k={k} {g:?}: got {sep:?}, connectivity {brute:?}");
            if let Some(s) = sep {
                ensure!(s.len() < k && is_proper_separator(g, &s), "k={k}: {s:?} is not a proper separator");
                found += 1;
            } else {
                none += 1;
            }
        }
    }
    Ok(format!("{} graphs × k ≤ 4: {found} separators returned, {none} NONE answers", graphs.len()))
}

/// K_m plus up to `count` pendants on disjoint clique windows: paths of
/// length ≤ s−k on k−1 vertices, and single vertices on k vertices.
fn unbreakable_family(rng: &mut ChaCha8Rng, m: usize, s: usize, k: usize, count: usize) -> Graph {
    let pendants: Vec<Pendant> = (0..count.min(m / k))
        .map(|i| {
            let base = i * k;
            if s > k && rng.gen_bool(0.6) {
                Pendant::Path { len: rng.gen_range(1..=s - k), attach: (base..base + k - 1).collect() }
            } else {
                Pendant::Path { len: 1, attach: (base..base + k).collect() }
            }
        })
        .collect();
    clique_with_pendants(m, &pendants)
}

/// Independent leanness check where affordable, the engine's own search
/// beyond that.
fn lean_end_to_end(g: &Graph, td: &TreeDecomposition, k: usize, oracle: bool) -> Result<(), String> {
    validate(g, td).map_err(|v| v.to_string())?;
    ensure!(td.adhesion_size() < k, "adhesion {}", td.adhesion_size());
    if oracle {
        check_lean_with(g, td, k, 0, 0).map_err(|v| v.to_string())?;
    } else {
        ensure!(find_non_lean_witness(g, td, k).map_err(|e| e.to_string())?.is_none(), "witness found");
    }
    Ok(())
}

fn c7_unbreakable() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut instances = 0;
    for m in [50, 150, 300] {
        for (s, k) in [(2, 2), (3, 2), (4, 2), (3, 3), (4, 3)] {
            let g = unbreakable_family(&mut rng, m, s, k, 20);
            let oracle = m == 50;
            if oracle {
                let all: Vec<usize> = (0..g.n()).collect();
                ensure!(is_unbreakable(&g, &all, s, k), "m={m} family is not ({s},{k})-unbreakable");
            }
            let td = unbreakable_k_lean(&g, s, k).map_err(|e| e.to_string())?;
            lean_end_to_end(&g, &td, k, oracle).map_err(|e| format!("m={m} s={s} k={k}: {e}"))?;
            let run = unbreakable_k_lean_with(&g, s, k, UnbreakableOptions { force_big_star: true })
                .map_err(|e| e.to_string())?;
            let star = run.star.ok_or("big-star route not taken")?;
            let root = star.root_bag();
            ensure!(root.len() >= 2 * s, "root bag of {} vertices", root.len());
            ensure!(single_bag_cut(&g, &root, k).is_none(), "m={m} s={s} k={k}: root bag has a witness");
            if oracle {
                for i in 1..=k {
                    ensure!(is_unbreakable(&g, &root, i, i), "root bag is ({i},{i})-breakable");
                }
            }
            validate(&g, &star.to_td()).map_err(|v| format!("star decomposition: {v}"))?;
            lean_end_to_end(&g, &run.td, k, oracle).map_err(|e| format!("merged m={m} s={s} k={k}: {e}"))?;
            instances += 1;
        }
    }
    Ok(format!("{instances} instances; oracle-verified at m = 50, engine-verified at m = 150, 300"))
}

fn simplicial_by_oracle(g: &Graph, k: usize, v: usize) -> bool {
    let nb = g.neighbors(v);
    nb.iter()
        .enumerate()
        .all(|(i, &a)| nb[i + 1..].iter().all(|&b| g.has_edge(a, b) || local_vertex_connectivity(g, a, b, k) >= k))
}

fn greedy_independent(g: &Graph, pick: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut taken = vec![false; g.n()];
    let mut out = Vec::new();
    for v in 0..g.n() {
        if pick(v) && !g.neighbors(v).iter().any(|&w| taken[w]) {
            taken[v] = true;
            out.push(v);
        }
    }
    out
}

fn eliminated_td(g: &Graph, k: usize, i: &[usize]) -> Result<TreeDecomposition, String> {
    let (h, map) = g.eliminate(i).map_err(|e| e.to_string())?;
    let mut back = vec![0; h.n()];
    for (v, w) in map.iter().enumerate() {
        if let Some(w) = w {
            back[*w] = v;
        }
    }
    let td = k_lean_td(&ni_sparsify(&h, k).subgraph, k).map_err(|e| e.to_string())?;
    Ok(td.map_vertices(|w| Some(back[w])))
}

fn c8_lifts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let (mut low, mut high, mut matched) = (0, 0, 0);
    for _ in 0..100 {
        let k = rng.gen_range(1..=3);
        let n = rng.gen_range(4..=16);
        let p = rng.gen_range(0.1..0.5);
        let mut g = random_graph(&mut rng, n, p);
        // Pendants on cliques of size < k and ≥ k give both lifts material.
        for _ in 0..rng.gen_range(1..=4) {
            let size = if rng.gen_bool(0.5) { rng.gen_range(0..k) } else { rng.gen_range(k..=(k + 2).min(n)) };
            let mut attach: Vec<usize> = (0..n).collect();
            attach.shuffle(&mut rng);
            attach.truncate(size);
            for (a, &x) in attach.iter().enumerate() {
                for &y in &attach[a + 1..] {
                    g.insert_edge(x, y);
                }
            }
            let v = g.add_vertex();
            attach.iter().for_each(|&x| {
                g.insert_edge(x, v);
            });
        }
        let i_low = greedy_independent(&g, |v| g.degree(v) < k);
        if !i_low.is_empty() {
            let td = lift_lowdeg(&g, k, &i_low, &eliminated_td(&g, k, &i_low)?).map_err(|e| e.to_string())?;
            validate(&g, &td).map_err(|v| format!("low-degree lift: {v}"))?;
            ensure!(td.adhesion_size() < k, "low-degree lift adhesion {}", td.adhesion_size());
            low += 1;
        }
        let i_high = greedy_independent(&g, |v| g.degree(v) >= k && simplicial_by_oracle(&g, k, v));
        if !i_high.is_empty() {
            let td = lift_highdeg(&g, k, &i_high, &eliminated_td(&g, k, &i_high)?).map_err(|e| e.to_string())?;
            validate(&g, &td).map_err(|v| format!("high-degree lift: {v}"))?;
            ensure!(td.adhesion_size() < k, "high-degree lift adhesion {}", td.adhesion_size());
            high += 1;
        }
        let m = Matching::maximal(&g);
        let (h, _) = g.contract_matching(&m).map_err(|e| e.to_string())?;
        let inner = k_lean_td(&h, k).map_err(|e| e.to_string())?;
        let up = uncontract(&g, &m, &inner).map_err(|e| e.to_string())?;
        validate(&g, &up).map_err(|v| format!("uncontraction: {v}"))?;
        ensure!(up.adhesion_size() <= 2 * inner.adhesion_size(), "uncontraction more than doubled adhesion");
        matched += 1;
    }
    ensure!(low >= 50 && high >= 30, "too few lift instances (low {low}, high {high})");
    Ok(format!("{low} low-degree lifts, {high} high-degree lifts, {matched} uncontractions valid"))
}

type Criterion = (&'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 8] = [
    ("k-ECC equals pairwise-flow oracle", c1_kecc),
    ("Gomory-Hu trees verify (U = V and element U)", c2_gomory_hu),
    ("k-leanness of direct and recursive engines", c3_leanness),
    ("potential drops on every refinement (--trace)", c4_potential),
    ("sparsifier contract, n ≤ 12, k ≤ 3", c5_sparsifier),
    ("vertex separators agree with connectivity", c6_vertex_connectivity),
    ("unbreakable fast path on clique families", c7_unbreakable),
    ("simplicial lifts and matching uncontraction", c8_lifts),
];

fn main() -> ExitCode {
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in CRITERIA.iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(summary) => println!("criterion {id} PASS [{secs:.1}s] {name}: {summary}"),
            Err(why) => {
                failed += 1;
                println!("criterion {id} FAIL [{secs:.1}s] {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
