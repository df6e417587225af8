//! Sparse certificates for vertex cuts of order < k: the union of k
//! successive maximal spanning forests.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::flow::flow_star_capped;
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sparsifier {
    pub subgraph: Graph,
    /// Edge → forest (1-based) that selected it.
    pub forest_index: BTreeMap<(Vertex, Vertex), usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparsifierViolation {
    #[error("vertex sets differ ({host} vs {sparse})")]
    VertexSetMismatch { host: usize, sparse: usize },
    #[error("edge {0}-{1} is not an edge of the host graph")]
    NotASubgraph(Vertex, Vertex),
    #[error("{edges} edges exceed k·n = {bound}")]
    TooManyEdges { edges: usize, bound: usize },
    #[error("components differ after deleting {0:?}")]
    ComponentsDiffer(Vec<Vertex>),
    #[error("removed edge {u}-{v} has flow* {flow} < k in the sparsifier")]
    WeakRemovedEdge { u: Vertex, v: Vertex, flow: u64 },
}

/// Union of forests F1..Fk, Fi a maximal spanning forest of G minus the
/// earlier forests, each grown by BFS from ascending vertex ids.
pub fn ni_sparsify(g: &Graph, k: usize) -> Sparsifier {
    let n = g.n();
    let mut remaining = g.clone();
    let mut subgraph = Graph::new(n);
    let mut forest_index = BTreeMap::new();
    for round in 1..=k {
        let mut seen = vec![false; n];
        let mut picked = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in remaining.neighbors(x) {
                    if !seen[y] {
                        seen[y] = true;
                        picked.push((x.min(y), x.max(y)));
                        queue.push_back(y);
                    }
                }
            }
        }
        if picked.is_empty() {
            break;
        }
        for (u, v) in picked {
            remaining.remove_edge(u, v);
            subgraph.insert_edge(u, v);
            forest_index.insert((u, v), round);
        }
    }
    Sparsifier { subgraph, forest_index }
}

fn component_labels(g: &Graph, deleted: &[bool]) -> Vec<usize> {
    let mut label = vec![usize::MAX; g.n()];
    let mut next = 0;
    for s in 0..g.n() {
        if deleted[s] || label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if !deleted[y] && label[y] == usize::MAX {
                    label[y] = next;
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    label
}

fn same_components(g: &Graph, h: &Graph, s: &[Vertex]) -> bool {
    let mut deleted = vec![false; g.n()];
    for &v in s {
        deleted[v] = true;
    }
    let a = component_labels(g, &deleted);
    let b = component_labels(h, &deleted);
    // Labels are assigned in vertex order, so equal partitions give equal labels.
    a == b
}

fn subsets_below(n: usize, k: usize) -> u128 {
    let mut total = 0u128;
    let mut c = 1u128;
    for size in 0..k.min(n + 1) {
        total += c;
        c = c * (n - size) as u128 / (size + 1) as u128;
    }
    total
}

/// Exhaustive over all S with |S| < k when there are at most this many.
const EXHAUSTIVE_LIMIT: u128 = 200_000;
const SAMPLES: usize = 20_000;

/// Checks that `sp` spans `g`, is a subgraph with ≤ k·n edges, preserves
/// the components of G − S for every |S| < k (exhaustively when feasible,
/// otherwise on a seeded sample), and that every removed edge uv keeps
/// flow*(u,v) ≥ k in the sparsifier.
pub fn verify_sparsifier(g: &Graph, sp: &Sparsifier, k: usize) -> Result<(), SparsifierViolation> {
    let h = &sp.subgraph;
    if g.n() != h.n() {
        return Err(SparsifierViolation::VertexSetMismatch { host: g.n(), sparse: h.n() });
    }
    for (u, v) in h.edges() {
        if !g.has_edge(u, v) {
            return Err(SparsifierViolation::NotASubgraph(u, v));
        }
    }
    if h.m() > k * g.n() {
        return Err(SparsifierViolation::TooManyEdges { edges: h.m(), bound: k * g.n() });
    }
    let n = g.n();
    if subsets_below(n, k) <= EXHAUSTIVE_LIMIT {
        let mut stack: Vec<Vertex> = Vec::new();
        if let Some(s) = first_bad_subset(g, h, k, 0, &mut stack) {
            return Err(SparsifierViolation::ComponentsDiffer(s));
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for i in 0..SAMPLES {
            let size = i % k;
            let mut s: Vec<Vertex> = sample(&mut rng, n, size.min(n)).into_vec();
            s.sort_unstable();
            if !same_components(g, h, &s) {
                return Err(SparsifierViolation::ComponentsDiffer(s));
            }
        }
    }
    for (u, v) in g.edges() {
        if !h.has_edge(u, v) {
            let flow = flow_star_capped(h, u, v, k as u64).expect("distinct endpoints");
            if flow < k as u64 {
                return Err(SparsifierViolation::WeakRemovedEdge { u, v, flow });
            }
        }
    }
    Ok(())
}

fn first_bad_subset(g: &Graph, h: &Graph, k: usize, from: Vertex, s: &mut Vec<Vertex>) -> Option<Vec<Vertex>> {
    if !same_components(g, h, s) {
        return Some(s.clone());
    }
    if s.len() + 1 >= k {
        return None;
    }
    for v in from..g.n() {
        s.push(v);
        let bad = first_bad_subset(g, h, k, v + 1, s);
        s.pop();
        if bad.is_some() {
            return bad;
        }
    }
    None
}
