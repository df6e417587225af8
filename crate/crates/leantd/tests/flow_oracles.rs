mod common;

use common::arb_graph;
use leantd::flow::{element_connectivity_capped, flow_sets, flow_star, min_edge_cutset, LocalConnectivity};
use leantd::oracle::{
    brute_flow_star, brute_min_separator, edge_connectivity, element_connectivity, local_vertex_connectivity, set_flow,
};
use leantd::Graph;
use proptest::prelude::*;

fn edge_cut_separates(g: &Graph, cut: &[(usize, usize)], u: usize, v: usize) -> bool {
    let mut h = g.clone();
    cut.iter().for_each(|&(a, b)| {
        h.remove_edge(a, b);
    });
    !h.components().iter().any(|c| c.contains(&u) && c.contains(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn flow_star_matches_enumeration(g in arb_graph(2, 9), a in 0usize..9, b in 0usize..9) {
        let (u, v) = (a % g.n(), b % g.n());
        prop_assume!(u != v);
        prop_assert_eq!(flow_star(&g, u, v).unwrap() as usize, brute_flow_star(&g, u, v).unwrap());
    }

    #[test]
    fn set_separators_are_minimum(g in arb_graph(2, 9), mask1 in 1u32..512, mask2 in 1u32..512) {
        let pick = |m: u32| (0..g.n()).filter(|&v| m >> v & 1 == 1).collect::<Vec<_>>();
        let (x1, x2) = (pick(mask1), pick(mask2));
        prop_assume!(!x1.is_empty() && !x2.is_empty());
        let r = flow_sets(&g, &x1, &x2).unwrap();
        let best = brute_min_separator(&g, &x1, &x2).unwrap();
        prop_assert_eq!(r.value as usize, best);
        prop_assert_eq!(set_flow(&g, &x1, &x2, g.n()), best);
        prop_assert_eq!(r.separator.len(), best);
        prop_assert!(r.cut.check(&g).is_ok());
        prop_assert_eq!(r.cut.separator(), r.separator.clone());
        prop_assert!(x1.iter().all(|v| r.cut.a().contains(v)));
        prop_assert!(x2.iter().all(|v| r.cut.b().contains(v)));
    }

    #[test]
    fn edge_cutsets_are_minimum_and_separate(g in arb_graph(2, 10), a in 0usize..10, b in 0usize..10) {
        let (u, v) = (a % g.n(), b % g.n());
        prop_assume!(u != v);
        let r = min_edge_cutset(&g, u, v).unwrap();
        prop_assert_eq!(r.value, edge_connectivity(&g, u, v, g.m() + 1));
        prop_assert_eq!(r.cutset.len(), r.value);
        prop_assert!(edge_cut_separates(&g, &r.cutset, u, v));
    }

    #[test]
    fn element_connectivity_matches_oracle(g in arb_graph(2, 9), mask in 0u32..512, cap in 1u64..5) {
        let terminal: Vec<bool> = (0..g.n()).map(|v| mask >> v & 1 == 1).collect();
        let ts: Vec<usize> = (0..g.n()).filter(|&v| terminal[v]).collect();
        prop_assume!(ts.len() >= 2);
        let (a, b) = (ts[0], ts[ts.len() - 1]);
        prop_assert_eq!(
            element_connectivity_capped(&g, &terminal, a, b, cap) as usize,
            element_connectivity(&g, &terminal, a, b, cap as usize)
        );
    }

    #[test]
    fn local_connectivity_is_reusable(g in arb_graph(2, 9)) {
        let mut lc = LocalConnectivity::new(&g);
        for u in 0..g.n() {
            for v in u + 1..g.n() {
                if g.has_edge(u, v) {
                    continue;
                }
                let value = lc.value(u, v, g.n() as u64);
                prop_assert_eq!(value as usize, local_vertex_connectivity(&g, u, v, g.n()));
                let sep = lc.separator_near_source(u);
                prop_assert_eq!(sep.len() as u64, value);
                let keep: Vec<_> = (0..g.n()).filter(|x| !sep.contains(x)).collect();
                let (h, map) = g.induced_subgraph(&keep).unwrap();
                let (a, b) = (map[u].unwrap(), map[v].unwrap());
                prop_assert!(!h.components().iter().any(|c| c.contains(&a) && c.contains(&b)));
            }
        }
    }
}
