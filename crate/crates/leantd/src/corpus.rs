//! Built-in test corpus: every graph up to isomorphism on a handful of
//! vertices, seeded random graphs, and large cliques decorated with small
//! pendant structures.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Vertex};

/// Largest order the canonical code supports (pairs must fit in a `u64`).
pub const MAX_CANONICAL_N: usize = 11;

/// Stable colour refinement; colours are ranks of iso-invariant signatures.
fn refine_colours(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut colour: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&u| colour[u]).collect();
                nb.sort_unstable();
                (colour[v], nb)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = sigs.iter().map(|s| distinct.binary_search(s).unwrap()).collect();
        let before = colour.iter().collect::<HashSet<_>>().len();
        if distinct.len() == before {
            return next;
        }
        colour = next;
    }
}

fn code_of(g: &Graph, order: &[Vertex]) -> u64 {
    let mut code = 0u64;
    let mut bit = 0;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if g.has_edge(order[i], order[j]) {
                code |= 1 << bit;
            }
            bit += 1;
        }
    }
    code
}

/// Canonical adjacency code: the minimum over all vertex orders compatible
/// with the refined colour classes. Two graphs of the same order are
/// isomorphic iff their codes are equal.
pub fn canonical_code(g: &Graph) -> u64 {
    let n = g.n();
    assert!(n <= MAX_CANONICAL_N, "canonical code supports at most {MAX_CANONICAL_N} vertices");
    let colour = refine_colours(g);
    let mut cells: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for v in 0..n {
        cells[colour[v]].push(v);
    }
    cells.retain(|c| !c.is_empty());
    let mut order = Vec::with_capacity(n);
    let mut best = u64::MAX;
    permute_cells(g, &mut cells, 0, 0, &mut order, &mut best);
    best
}

fn permute_cells(g: &Graph, cells: &mut [Vec<Vertex>], ci: usize, pos: usize, order: &mut Vec<Vertex>, best: &mut u64) {
    if ci == cells.len() {
        *best = (*best).min(code_of(g, order));
        return;
    }
    if pos == cells[ci].len() {
        permute_cells(g, cells, ci + 1, 0, order, best);
        return;
    }
    for i in pos..cells[ci].len() {
        cells[ci].swap(pos, i);
        order.push(cells[ci][pos]);
        permute_cells(g, cells, ci, pos + 1, order, best);
        order.pop();
        cells[ci].swap(pos, i);
    }
}

/// One representative per isomorphism class, for every order 1..=`max_n`;
/// `out[n-1]` holds the graphs on `n` vertices. Each order is grown from the
/// previous one by adding a vertex with every possible neighbourhood.
pub fn all_graphs_up_to(max_n: usize) -> Vec<Vec<Graph>> {
    assert!(max_n <= 9, "exhaustive enumeration is limited to 9 vertices");
    let mut out: Vec<Vec<Graph>> = Vec::new();
    let mut level = vec![Graph::new(1)];
    for n in 1..=max_n {
        if n > 1 {
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for h in &level {
                for mask in 0u32..(1 << (n - 1)) {
                    let mut g = h.clone();
                    let v = g.add_vertex();
                    for u in 0..n - 1 {
                        if mask >> u & 1 == 1 {
                            g.insert_edge(u, v);
                        }
                    }
                    if seen.insert(canonical_code(&g)) {
                        next.push(g);
                    }
                }
            }
            level = next;
        }
        out.push(level.clone());
    }
    out
}

/// All graphs on 1..=`max_n` vertices up to isomorphism, flattened.
pub fn exhaustive(max_n: usize) -> Vec<Graph> {
    all_graphs_up_to(max_n).into_iter().flatten().collect()
}

pub fn random_graph(rng: &mut impl Rng, n: usize, density: f64) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                g.insert_edge(u, v);
            }
        }
    }
    g
}

/// `count` seeded random graphs with orders in `2..=max_n`, cycling through
/// `densities`.
pub fn random_corpus(seed: u64, count: usize, max_n: usize, densities: &[f64]) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(2..=max_n.max(2));
            random_graph(&mut rng, n, densities[i % densities.len()])
        })
        .collect()
}

/// A pendant structure hung on a host clique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pendant {
    /// A path on `len` new vertices whose first vertex is joined to every
    /// vertex of `attach`.
    Path { len: usize, attach: Vec<Vertex> },
}

/// K_m on vertices 0..m plus the given pendants, each on fresh vertices.
pub fn clique_with_pendants(m: usize, pendants: &[Pendant]) -> Graph {
    let mut g = Graph::complete(m);
    for p in pendants {
        match p {
            Pendant::Path { len, attach } => {
                let mut prev = None;
                for i in 0..*len {
                    let x = g.add_vertex();
                    if i == 0 {
                        attach.iter().for_each(|&a| {
                            g.insert_edge(a, x);
                        });
                    }
                    if let Some(p) = prev {
                        g.insert_edge(p, x);
                    }
                    prev = Some(x);
                }
            }
        }
    }
    g
}

/// Up to `count` pendant paths of length `1..=max_len`, the i-th attached to
/// a distinct `attach_size`-subset of the clique (consecutive windows
/// starting at `attach_size·i`, so attachment sets are pairwise disjoint
/// while the clique is large enough).
pub fn disjoint_pendants(rng: &mut impl Rng, m: usize, count: usize, attach_size: usize, max_len: usize) -> Vec<Pendant> {
    let mut starts: Vec<usize> = (0..m / attach_size.max(1)).collect();
    starts.shuffle(rng);
    starts
        .into_iter()
        .take(count)
        .map(|s| Pendant::Path {
            len: rng.gen_range(1..=max_len.max(1)),
            attach: (0..attach_size).map(|j| s * attach_size + j).collect(),
        })
        .collect()
}
