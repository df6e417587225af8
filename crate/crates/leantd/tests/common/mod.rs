#![allow(dead_code)]

use leantd::Graph;
use proptest::prelude::*;

/// Graphs on `min_n..=max_n` vertices, each pair an edge with probability
/// drawn per graph.
pub fn arb_graph(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n, 0.05f64..0.9).prop_flat_map(|(n, p)| {
        let pairs = n * n.saturating_sub(1) / 2;
        proptest::collection::vec(proptest::bool::weighted(p), pairs).prop_map(move |bits| {
            let mut g = Graph::new(n);
            let mut it = bits.into_iter();
            for u in 0..n {
                for v in u + 1..n {
                    if it.next().unwrap() {
                        g.insert_edge(u, v);
                    }
                }
            }
            g
        })
    })
}

pub fn arb_graph_k(min_n: usize, max_n: usize, max_k: usize) -> impl Strategy<Value = (Graph, usize)> {
    (arb_graph(min_n, max_n), 1..=max_k)
}
