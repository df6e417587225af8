//! The refinement loop: find a minimal witness, split the decomposition
//! along it, simplify, repeat. A potential over bag sizes drops by at least
//! one per round, which bounds the number of rounds.

use std::collections::VecDeque;

use num_bigint::BigUint;
use thiserror::Error;

use crate::flow::{flow_value_capped, min_weight_separator};
use crate::graph::{intersect, Graph, Vertex, VertexCut};
use crate::oracle::is_witness;
use crate::td::{validate, Node, TdViolation, TreeDecomposition};
use crate::witness::{Witness, WitnessError, WitnessSearch};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LeanError {
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error("witness is not minimal: {0}")]
    NotMinimal(String),
    #[error("refinement produced an invalid decomposition: {0}")]
    Invalid(#[from] TdViolation),
    #[error("potential did not decrease ({before} -> {after})")]
    PotentialNotDecreasing { before: BigUint, after: BigUint },
    #[error("k must be at least 1")]
    ZeroK,
}

/// Φ_T(t): 4^{4k}·(|bag| − 3k) for bags larger than 3k, 4^{|bag|} otherwise.
pub fn node_potential(bag_size: usize, k: usize) -> BigUint {
    let four = BigUint::from(4u32);
    if bag_size > 3 * k {
        four.pow((4 * k) as u32) * BigUint::from(bag_size - 3 * k)
    } else {
        four.pow(bag_size as u32)
    }
}

pub fn potential(td: &TreeDecomposition, k: usize) -> BigUint {
    td.bags().iter().map(|b| node_potential(b.len(), k)).sum()
}

/// A witness at minimum node distance whose separator is a minimum
/// (bag(t1)∩A, bag(t2)∩B)-separator, and among those minimizes the total
/// tree distance of its vertices to the t1–t2 path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalWitness {
    pub witness: Witness,
    pub separator: Vec<Vertex>,
    pub distance: usize,
    pub distance_sum: usize,
}

/// For every vertex, the tree distance from the t1–t2 path to the closest
/// node containing it.
pub fn path_distances(g: &Graph, td: &TreeDecomposition, t1: Node, t2: Node) -> Vec<usize> {
    let path = td.rooted_at(t1).path(t1, t2);
    let mut dist = vec![usize::MAX; td.node_count()];
    let mut queue: VecDeque<Node> = VecDeque::new();
    for &t in &path {
        dist[t] = 0;
        queue.push_back(t);
    }
    while let Some(x) = queue.pop_front() {
        for &y in td.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    let mut d = vec![usize::MAX; g.n()];
    for (t, bag) in td.bags().iter().enumerate() {
        for &v in bag {
            d[v] = d[v].min(dist[t]);
        }
    }
    d
}

/// Tightens a witness found at minimum distance into a minimal one.
pub fn minimize_witness(g: &Graph, td: &TreeDecomposition, w: Witness) -> MinimalWitness {
    let x1 = intersect(td.bag(w.t1), w.cut.a());
    let x2 = intersect(td.bag(w.t2), w.cut.b());
    let d = path_distances(g, td, w.t1, w.t2);
    let base = (td.node_count() * g.n()) as u64;
    let weights: Vec<u64> = d.iter().map(|&x| base + x as u64).collect();
    let res = min_weight_separator(g, &x1, &x2, &weights).expect("witness sides are nonempty");
    let distance = td.rooted_at(w.t1).depth[w.t2];
    // At a single node both orientations are witnesses; keep the smallest
    // non-separator vertex on the A side.
    let cut = if w.t1 == w.t2 && first_only(res.cut.b(), res.cut.a()) < first_only(res.cut.a(), res.cut.b()) {
        res.cut.flipped()
    } else {
        res.cut
    };
    let distance_sum = res.separator.iter().map(|&v| d[v]).sum();
    MinimalWitness { witness: Witness { cut, t1: w.t1, t2: w.t2 }, separator: res.separator, distance, distance_sum }
}

fn first_only(side: &[Vertex], other: &[Vertex]) -> Option<Vertex> {
    side.iter().copied().find(|v| other.binary_search(v).is_err())
}

/// Minimal witness for `td`, or `None` when it is k-lean.
pub fn find_minimal_witness(
    search: &mut WitnessSearch<'_>,
    td: &TreeDecomposition,
) -> Result<Option<MinimalWitness>, LeanError> {
    let g = search.graph();
    Ok(search.search(td)?.map(|w| minimize_witness(g, td, w)))
}

pub fn simplify(td: &TreeDecomposition, r: Node) -> TreeDecomposition {
    td.simplify(r)
}

/// Side i of the refinement: the tree rooted at `root` (the *other*
/// witness node) with bags (bag ∩ side) ∪ pull, where pull(t) holds the
/// separator vertices forgotten strictly below t.
fn refined_side(td: &TreeDecomposition, n: usize, side: &[bool], sep: &[Vertex], root: Node) -> Vec<Vec<Vertex>> {
    let rooted = td.rooted_at(root);
    let forget = td.forget_nodes(&rooted, n);
    let mut bags: Vec<Vec<Vertex>> =
        td.bags().iter().map(|b| b.iter().copied().filter(|&v| side[v]).collect()).collect();
    for &v in sep {
        let mut t = forget[v].expect("separator vertex occurs in some bag");
        while let Some(p) = rooted.parent[t] {
            bags[p].push(v);
            t = p;
        }
    }
    bags
}

/// The pre-refinement (two trimmed copies of the tree joined through a new
/// node holding the separator), simplified from that node.
pub fn refine(g: &Graph, td: &TreeDecomposition, mw: &MinimalWitness, k: usize) -> Result<TreeDecomposition, LeanError> {
    let Witness { cut, t1, t2 } = &mw.witness;
    if !is_witness(g, td, k, cut, *t1, *t2) {
        return Err(LeanError::NotMinimal("not a witness".into()));
    }
    let x1 = intersect(td.bag(*t1), cut.a());
    let x2 = intersect(td.bag(*t2), cut.b());
    let sep = cut.separator();
    if flow_value_capped(g, &x1, &x2, sep.len() as u64) < sep.len() as u64 {
        return Err(LeanError::NotMinimal("separator is not a minimum separator of the bag sides".into()));
    }
    let n = g.n();
    let mut side1 = vec![false; n];
    let mut side2 = vec![false; n];
    cut.a().iter().for_each(|&v| side1[v] = true);
    cut.b().iter().for_each(|&v| side2[v] = true);
    let first = refined_side(td, n, &side1, &sep, *t2);
    let second = refined_side(td, n, &side2, &sep, *t1);
    let nodes = td.node_count();
    let mut bags = first;
    bags.extend(second);
    bags.push(sep.clone());
    let mut edges = Vec::with_capacity(2 * nodes + 1);
    for (a, b) in td.tree_edges() {
        edges.push((a, b));
        edges.push((nodes + a, nodes + b));
    }
    let r = 2 * nodes;
    edges.push((r, *t2));
    edges.push((r, nodes + t1));
    let pre = TreeDecomposition::from_parts(bags, &edges, Some(r)).expect("node ids in range");
    Ok(pre.simplify(r))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub iteration: usize,
    pub potential_before: BigUint,
    pub potential_after: BigUint,
    pub t1: Node,
    pub t2: Node,
    pub separator: Vec<Vertex>,
    pub nodes_after: usize,
}

#[derive(Debug, Clone)]
pub struct LeanRun {
    pub td: TreeDecomposition,
    pub initial_potential: BigUint,
    pub trace: Vec<TraceStep>,
}

/// k-lean tree decomposition by refinement from one bag per component.
pub fn k_lean_td(g: &Graph, k: usize) -> Result<TreeDecomposition, LeanError> {
    Ok(k_lean_run(g, k, None)?.td)
}

/// Refinement loop with a recorded trace, optionally starting from `start`
/// (which must have adhesion size < k). Every intermediate decomposition is
/// validated and the potential is checked to drop on every round.
pub fn k_lean_run(g: &Graph, k: usize, start: Option<TreeDecomposition>) -> Result<LeanRun, LeanError> {
    if k == 0 {
        return Err(LeanError::ZeroK);
    }
    let mut td = start.unwrap_or_else(|| TreeDecomposition::per_component(g));
    validate(g, &td)?;
    let initial_potential = potential(&td, k);
    let mut search = WitnessSearch::new(g, k);
    let mut trace = Vec::new();
    let mut phi = initial_potential.clone();
    while let Some(mw) = find_minimal_witness(&mut search, &td)? {
        let next = refine(g, &td, &mw, k)?;
        validate(g, &next)?;
        let after = potential(&next, k);
        if after >= phi {
            return Err(LeanError::PotentialNotDecreasing { before: phi, after });
        }
        trace.push(TraceStep {
            iteration: trace.len() + 1,
            potential_before: phi.clone(),
            potential_after: after.clone(),
            t1: mw.witness.t1,
            t2: mw.witness.t2,
            separator: mw.separator.clone(),
            nodes_after: next.node_count(),
        });
        phi = after;
        td = next;
    }
    Ok(LeanRun { td, initial_potential, trace })
}

/// Checks the (i,i)-unbreakability of every bag for i ≤ k by the witness
/// search restricted to single nodes.
pub fn single_bag_cut(g: &Graph, bag: &[Vertex], k: usize) -> Option<VertexCut> {
    WitnessSearch::new(g, k).pair_witness(bag, bag, usize::MAX)
}
