//! Fast path for (s,k)-unbreakable graphs: grow a star decomposition whose
//! root keeps the one large bag, peeling off small well-structured pieces,
//! then decompose each small leaf side separately and splice the results in.

use std::collections::VecDeque;

use thiserror::Error;

use crate::flow::flow_sets;
use crate::graph::{intersect, is_subset, Graph, GraphError, Vertex, VertexCut};
use crate::lean::{k_lean_td, LeanError};
use crate::td::{Node, TreeDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StarError {
    #[error("need s ≥ k ≥ 1, got s = {s}, k = {k}")]
    Parameters { s: usize, k: usize },
    #[error("graph has {n} vertices, fewer than (2s)^(k+2) = {need}")]
    TooSmall { n: usize, need: usize },
    #[error("vertex {vertex} has degree {degree} ≥ s = {s}")]
    HighDegree { vertex: Vertex, degree: usize, s: usize },
    #[error("root bag has {size} vertices, fewer than {need}")]
    RootTooSmall { size: usize, need: usize },
    #[error("not a non-lean witness at the root: {0}")]
    NotAWitness(String),
    #[error("witness is not linked to the root bag (flow {flow} < {order})")]
    NotLinked { flow: u64, order: usize },
    #[error("no bag of leaf decomposition {0} contains its adhesion")]
    MissingAnchor(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lean(#[from] LeanError),
}

/// Root bag plus leaves each attached to the root only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarDecomposition {
    in_root: Vec<bool>,
    root_size: usize,
    pub leaves: Vec<Vec<Vertex>>,
}

impl StarDecomposition {
    pub fn whole(n: usize) -> Self {
        StarDecomposition { in_root: vec![true; n], root_size: n, leaves: Vec::new() }
    }

    pub fn in_root(&self, v: Vertex) -> bool {
        self.in_root[v]
    }

    pub fn root_size(&self) -> usize {
        self.root_size
    }

    pub fn root_bag(&self) -> Vec<Vertex> {
        (0..self.in_root.len()).filter(|&v| self.in_root[v]).collect()
    }

    /// Root is node 0, leaf i is node i + 1.
    pub fn to_td(&self) -> TreeDecomposition {
        let mut td = TreeDecomposition::single_bag(self.root_bag());
        for leaf in &self.leaves {
            let x = td.add_node(leaf.clone());
            td.add_edge(0, x);
        }
        td
    }

    fn set_root(&mut self, v: Vertex, member: bool) {
        if self.in_root[v] != member {
            self.in_root[v] = member;
            if member {
                self.root_size += 1;
            } else {
                self.root_size -= 1;
            }
        }
    }
}

/// Candidate witness determined by (D, R) = (A ∩ L, A ∩ B ∩ L): returns
/// C = A \ B if (N[C], V \ C, t, t) is a well-structured witness.
fn witness_from(g: &Graph, std: &StarDecomposition, low: &[bool], d: &[Vertex], r: &[Vertex], s: usize, k: usize) -> Option<Vec<Vertex>> {
    let mut in_a = vec![false; g.n()];
    let c: Vec<Vertex> = d.iter().copied().filter(|x| !r.contains(x)).collect();
    if c.is_empty() {
        return None;
    }
    let mut in_c = vec![false; g.n()];
    c.iter().for_each(|&x| in_c[x] = true);
    d.iter().for_each(|&x| in_a[x] = true);
    let mut boundary: Vec<Vertex> = Vec::new();
    for &x in &c {
        for &y in g.neighbors(x) {
            if !in_c[y] && !boundary.contains(&y) {
                boundary.push(y);
            }
            in_a[y] = true;
        }
    }
    // N(A \ B) = A ∩ B: every vertex of R must touch C.
    if r.iter().any(|x| !boundary.contains(x)) {
        return None;
    }
    let a: Vec<Vertex> = (0..g.n()).filter(|&x| in_a[x]).collect();
    let order = boundary.len();
    if a.len() >= s || order >= k || c.iter().any(|&x| !low[x]) {
        return None;
    }
    let a_low: Vec<Vertex> = a.iter().copied().filter(|&x| low[x]).collect();
    if count_components(g, &a_low) != 1 || count_components(g, &c) > k {
        return None;
    }
    let a_root = a.iter().filter(|&&x| std.in_root(x)).count();
    let c_root = c.iter().filter(|&&x| std.in_root(x)).count();
    (a_root > order && std.root_size() - c_root > order).then(|| {
        let mut c = c;
        c.sort_unstable();
        c
    })
}

fn count_components(g: &Graph, set: &[Vertex]) -> usize {
    let mut mark = vec![false; g.n()];
    set.iter().for_each(|&x| mark[x] = true);
    let mut comps = 0;
    for &st in set {
        if !mark[st] {
            continue;
        }
        comps += 1;
        mark[st] = false;
        let mut stack = vec![st];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if mark[y] {
                    mark[y] = false;
                    stack.push(y);
                }
            }
        }
    }
    comps
}

struct Branching<'a> {
    g: &'a Graph,
    std: &'a StarDecomposition,
    low: Vec<bool>,
    s: usize,
    k: usize,
    calls: usize,
}

impl Branching<'_> {
    fn run(&mut self, d: &mut Vec<Vertex>, r: &mut Vec<Vertex>) -> Option<Vec<Vertex>> {
        self.calls += 1;
        if d.len() >= self.s || r.len() >= self.k {
            return None;
        }
        let (g, low) = (self.g, &self.low);
        let forced = d
            .iter()
            .filter(|x| !r.contains(x))
            .flat_map(|&u| g.neighbors(u).iter().copied())
            .find(|&w| low[w] && !d.contains(&w));
        if let Some(w) = forced {
            return self.extend(d, r, w, true);
        }
        if let Some(c) = witness_from(g, self.std, low, d, r, self.s, self.k) {
            return Some(c);
        }
        let core: Vec<Vertex> = d.iter().copied().filter(|x| !r.contains(x)).collect();
        let may_grow_core = count_components(g, &core) < self.k;
        let mut frontier: Vec<Vertex> =
            d.iter().flat_map(|&u| g.neighbors(u).iter().copied()).filter(|&w| low[w] && !d.contains(&w)).collect();
        frontier.sort_unstable();
        frontier.dedup();
        for w in frontier {
            if let Some(c) = self.extend(d, r, w, may_grow_core) {
                return Some(c);
            }
        }
        None
    }

    /// Recurse on (D ∪ {w}, R ∪ {w}) and, if `core` is allowed, (D ∪ {w}, R).
    fn extend(&mut self, d: &mut Vec<Vertex>, r: &mut Vec<Vertex>, w: Vertex, core: bool) -> Option<Vec<Vertex>> {
        d.push(w);
        if core {
            if let Some(c) = self.run(d, r) {
                d.pop();
                return Some(c);
            }
        }
        r.push(w);
        let found = self.run(d, r);
        r.pop();
        d.pop();
        found
    }
}

/// Set C with `v` ∈ N[C] such that (N[C], V \ C, root, root) is a
/// well-structured non-lean witness, if one containing `v` exists.
pub fn well_structured_witness(
    g: &Graph,
    std: &StarDecomposition,
    v: Vertex,
    s: usize,
    k: usize,
) -> Result<Option<Vec<Vertex>>, StarError> {
    if v >= g.n() {
        return Err(GraphError::VertexOutOfRange { vertex: v, n: g.n() }.into());
    }
    if g.degree(v) >= s {
        return Err(StarError::HighDegree { vertex: v, degree: g.degree(v), s });
    }
    if std.root_size() < s {
        return Err(StarError::RootTooSmall { size: std.root_size(), need: s });
    }
    let low = (0..g.n()).map(|x| g.degree(x) < s).collect();
    let mut search = Branching { g, std, low, s, k, calls: 0 };
    let mut d = vec![v];
    if let Some(c) = search.run(&mut d, &mut Vec::new()) {
        return Ok(Some(c));
    }
    Ok(search.run(&mut d, &mut vec![v]))
}

fn check_root_witness(std: &StarDecomposition, a: &[Vertex], sep: &[Vertex], k: usize) -> Result<(), StarError> {
    let order = sep.len();
    let a_root = a.iter().filter(|&&x| std.in_root(x)).count();
    let inner_root = a.iter().filter(|&&x| std.in_root(x) && sep.binary_search(&x).is_err()).count();
    let b_root = std.root_size() - inner_root;
    if order >= k || a_root <= order || b_root <= order {
        return Err(StarError::NotAWitness(format!(
            "order {order}, root vertices {a_root} in A and {b_root} in B"
        )));
    }
    Ok(())
}

/// From a witness (N[C], V \ C, root, root), a minimum cut inside N[C]
/// between the root part of N[C] and N(C): returns (A, S) with S ⊆ A ⊆ N[C]
/// such that (A, V \ (A \ S)) is a root witness linked to the root bag.
pub fn a_linked(g: &Graph, std: &StarDecomposition, c: &[Vertex], k: usize) -> Result<(Vec<Vertex>, Vec<Vertex>), StarError> {
    let mut in_c = vec![false; g.n()];
    c.iter().for_each(|&x| in_c[x] = true);
    let mut closed: Vec<Vertex> = c.to_vec();
    for &x in c {
        closed.extend(g.neighbors(x).iter().copied().filter(|&y| !in_c[y]));
    }
    closed.sort_unstable();
    closed.dedup();
    let boundary: Vec<Vertex> = closed.iter().copied().filter(|&x| !in_c[x]).collect();
    check_root_witness(std, &closed, &boundary, k)?;

    // G[N[C]] without edges inside N(C).
    let (mut local, map) = g.induced_subgraph(&closed)?;
    for (i, &x) in boundary.iter().enumerate() {
        for &y in &boundary[i + 1..] {
            local.remove_edge(map[x].unwrap(), map[y].unwrap());
        }
    }
    let src: Vec<Vertex> = closed.iter().filter(|&&x| std.in_root(x)).map(|&x| map[x].unwrap()).collect();
    let dst: Vec<Vertex> = boundary.iter().map(|&x| map[x].unwrap()).collect();
    if dst.is_empty() {
        // Order-0 witness: already linked.
        return Ok((closed, Vec::new()));
    }
    let res = flow_sets(&local, &src, &dst).map_err(|e| StarError::NotAWitness(e.to_string()))?;
    let a: Vec<Vertex> = res.cut.a().iter().map(|&x| closed[x]).collect();
    let sep: Vec<Vertex> = res.separator.iter().map(|&x| closed[x]).collect();
    Ok((a, sep))
}

/// Root ← (root \ A) ∪ S, leaves ← leaf ∩ B, new leaf A, where
/// B = V \ (A \ S). Rejects witnesses that are not linked to the root.
pub fn star_refine(g: &Graph, std: &StarDecomposition, a: &[Vertex], sep: &[Vertex], k: usize) -> Result<StarDecomposition, StarError> {
    let mut a = a.to_vec();
    a.sort_unstable();
    let mut sep = sep.to_vec();
    sep.sort_unstable();
    if !is_subset(&sep, &a) {
        return Err(StarError::NotAWitness("separator not inside A".into()));
    }
    let inner: Vec<Vertex> = a.iter().copied().filter(|x| sep.binary_search(x).is_err()).collect();
    let b: Vec<Vertex> = {
        let mut out = vec![true; g.n()];
        inner.iter().for_each(|&x| out[x] = false);
        (0..g.n()).filter(|&x| out[x]).collect()
    };
    VertexCut::new(g, &a, &b)?;
    check_root_witness(std, &a, &sep, k)?;
    if !sep.is_empty() {
        let a_root: Vec<Vertex> = a.iter().copied().filter(|&x| std.in_root(x)).collect();
        let flow = crate::flow::flow_value_capped(g, &sep, &a_root, sep.len() as u64);
        if flow < sep.len() as u64 {
            return Err(StarError::NotLinked { flow, order: sep.len() });
        }
    }
    let mut next = std.clone();
    for &x in &inner {
        next.set_root(x, false);
    }
    for &x in &sep {
        next.set_root(x, true);
    }
    for leaf in &mut next.leaves {
        *leaf = intersect(leaf, &b);
    }
    next.leaves.push(a);
    Ok(next)
}

pub fn big_star_threshold(s: usize, k: usize) -> usize {
    (2 * s).saturating_pow(k as u32 + 2)
}

fn check_parameters(s: usize, k: usize) -> Result<(), StarError> {
    if k == 0 || s < k {
        return Err(StarError::Parameters { s, k });
    }
    Ok(())
}

/// Big-star-k-lean decomposition of an (s,k)-unbreakable graph with at
/// least (2s)^(k+2) vertices.
pub fn big_star_lean(g: &Graph, s: usize, k: usize) -> Result<StarDecomposition, StarError> {
    check_parameters(s, k)?;
    let need = big_star_threshold(s, k);
    if g.n() < need {
        return Err(StarError::TooSmall { n: g.n(), need });
    }
    big_star_lean_relaxed(g, s, k)
}

/// The same queue-driven refinement without the vertex-count precondition.
/// The root bag must still keep at least 2s vertices throughout.
pub fn big_star_lean_relaxed(g: &Graph, s: usize, k: usize) -> Result<StarDecomposition, StarError> {
    check_parameters(s, k)?;
    let n = g.n();
    let mut std = StarDecomposition::whole(n);
    if std.root_size() < 2 * s {
        return Err(StarError::RootTooSmall { size: std.root_size(), need: 2 * s });
    }
    let mut queued = vec![false; n];
    let mut queue: VecDeque<Vertex> = VecDeque::new();
    for v in (0..n).filter(|&v| g.degree(v) < s) {
        queued[v] = true;
        queue.push_back(v);
    }
    while let Some(&v) = queue.front() {
        match well_structured_witness(g, &std, v, s, k)? {
            None => {
                queue.pop_front();
                queued[v] = false;
            }
            Some(c) => {
                let (a, sep) = a_linked(g, &std, &c, k)?;
                std = star_refine(g, &std, &a, &sep, k)?;
                if std.root_size() < 2 * s {
                    return Err(StarError::RootTooSmall { size: std.root_size(), need: 2 * s });
                }
                for &x in &a {
                    if g.degree(x) < s && !queued[x] {
                        queued[x] = true;
                        queue.push_back(x);
                    }
                }
            }
        }
    }
    Ok(std)
}

/// k-lean decomposition of one clique-filled leaf side, in its own ids.
#[derive(Debug, Clone)]
pub struct LeafDecomposition {
    pub td: TreeDecomposition,
    /// Local id → host vertex.
    pub to_host: Vec<Vertex>,
    /// Node whose bag holds the adhesion to the root; located if `None`.
    pub anchor: Option<Node>,
}

/// Replaces leaf i of `std` by `leaf_tds[i]`, joined to the root at its
/// anchor node.
pub fn merge_into_lean(std: &StarDecomposition, leaf_tds: &[LeafDecomposition]) -> Result<TreeDecomposition, StarError> {
    let root_bag = std.root_bag();
    let mut out = TreeDecomposition::single_bag(root_bag.clone());
    for (i, leaf) in leaf_tds.iter().enumerate() {
        let adhesion: Vec<Vertex> = std.leaves.get(i).map(|b| intersect(b, &root_bag)).unwrap_or_default();
        let mut local: Vec<Vertex> = Vec::new();
        for &h in &adhesion {
            let pos = leaf.to_host.iter().position(|&x| x == h).ok_or(StarError::MissingAnchor(i))?;
            local.push(pos);
        }
        let anchor = match leaf.anchor {
            Some(t) if t < leaf.td.node_count() && local.iter().all(|x| leaf.td.bag(t).contains(x)) => t,
            Some(_) => return Err(StarError::MissingAnchor(i)),
            None => leaf.td.locate_bag(&local).map_err(|_| StarError::MissingAnchor(i))?,
        };
        let offset = out.node_count();
        for t in 0..leaf.td.node_count() {
            out.add_node(leaf.td.bag(t).iter().map(|&x| leaf.to_host[x]).collect());
        }
        for (a, b) in leaf.td.tree_edges() {
            out.add_edge(offset + a, offset + b);
        }
        out.add_edge(0, offset + anchor);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UnbreakableOptions {
    /// Take the big-star route even below (2s)^(k+2) vertices.
    pub force_big_star: bool,
}

#[derive(Debug, Clone)]
pub struct UnbreakableRun {
    pub td: TreeDecomposition,
    /// The star decomposition, when the big-star route was taken.
    pub star: Option<StarDecomposition>,
}

pub fn unbreakable_k_lean(g: &Graph, s: usize, k: usize) -> Result<TreeDecomposition, StarError> {
    Ok(unbreakable_k_lean_with(g, s, k, UnbreakableOptions::default())?.td)
}

pub fn unbreakable_k_lean_with(g: &Graph, s: usize, k: usize, opts: UnbreakableOptions) -> Result<UnbreakableRun, StarError> {
    check_parameters(s, k)?;
    if g.n() < big_star_threshold(s, k) && !opts.force_big_star {
        return Ok(UnbreakableRun { td: k_lean_td(g, k)?, star: None });
    }
    let mut std = big_star_lean_relaxed(g, s, k)?;
    std.leaves.retain(|leaf| leaf.iter().any(|&x| !std.in_root[x]));
    let root_bag = std.root_bag();
    let mut leaf_tds = Vec::with_capacity(std.leaves.len());
    for leaf in &std.leaves {
        let adhesion = intersect(leaf, &root_bag);
        let mut other: Vec<Vertex> = {
            let mut out = vec![true; g.n()];
            leaf.iter().for_each(|&x| out[x] = false);
            (0..g.n()).filter(|&x| out[x]).collect()
        };
        other.extend(&adhesion);
        other.sort_unstable();
        let cut = VertexCut::new(g, leaf, &other)?;
        let (side, map) = g.clique_fill_side(&cut)?;
        let mut to_host = vec![0; side.n()];
        for (v, m) in map.iter().enumerate() {
            if let Some(m) = m {
                to_host[*m] = v;
            }
        }
        let td = k_lean_td(&side, k)?;
        let local: Vec<Vertex> = adhesion.iter().map(|&x| map[x].unwrap()).collect();
        let anchor = td.locate_bag(&local).ok();
        leaf_tds.push(LeafDecomposition { td, to_host, anchor });
    }
    let td = merge_into_lean(&std, &leaf_tds)?;
    Ok(UnbreakableRun { td, star: Some(std) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lean::single_bag_cut;
    use crate::td::validate;

    fn clique_with_pendants(m: usize, hosts: &[Vertex]) -> Graph {
        let mut g = Graph::complete(m);
        for &h in hosts {
            let p = g.add_vertex();
            g.add_edge(h, p).unwrap();
        }
        g
    }

    #[test]
    fn pendant_witness() {
        let g = clique_with_pendants(6, &[0]);
        let std = StarDecomposition::whole(7);
        assert_eq!(well_structured_witness(&g, &std, 6, 3, 2).unwrap(), Some(vec![6]));
        assert!(matches!(well_structured_witness(&g, &std, 3, 3, 2), Err(StarError::HighDegree { .. })));
        let (a, sep) = a_linked(&g, &std, &[6], 2).unwrap();
        assert_eq!((a.clone(), sep.clone()), (vec![0, 6], vec![0]));
        let next = star_refine(&g, &std, &a, &sep, 2).unwrap();
        assert_eq!(next.root_bag(), (0..6).collect::<Vec<_>>());
        assert_eq!(next.leaves, vec![vec![0, 6]]);
        validate(&g, &next.to_td()).unwrap();
    }

    #[test]
    fn shared_host_pendants_link_through_host() {
        let g = clique_with_pendants(6, &[0, 0]);
        let std = StarDecomposition::whole(8);
        let (a, sep) = a_linked(&g, &std, &[6, 7], 2).unwrap();
        assert_eq!((a, sep), (vec![0, 6, 7], vec![0]));
    }

    #[test]
    fn three_pendants_stripped() {
        let g = clique_with_pendants(6, &[0, 1, 2]);
        let std = big_star_lean_relaxed(&g, 3, 2).unwrap();
        assert_eq!(std.root_bag(), (0..6).collect::<Vec<_>>());
        assert_eq!(std.leaves.len(), 3);
        assert!(single_bag_cut(&g, &std.root_bag(), 2).is_none());
    }

    #[test]
    fn disconnected_piece_leaves_whole() {
        let mut g = Graph::complete(8);
        let x = g.add_vertex();
        let y = g.add_vertex();
        g.add_edge(x, y).unwrap();
        let std = StarDecomposition::whole(10);
        let c = well_structured_witness(&g, &std, x, 3, 1).unwrap().unwrap();
        assert_eq!(c, vec![x, y]);
        let (a, sep) = a_linked(&g, &std, &c, 1).unwrap();
        assert!(sep.is_empty());
        let next = star_refine(&g, &std, &a, &sep, 1).unwrap();
        assert_eq!(next.root_bag(), (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_non_witness() {
        let mut g = Graph::complete(6);
        let p = g.add_vertex();
        g.add_edge(0, p).unwrap();
        let std = star_refine(&g, &StarDecomposition::whole(7), &[0, p], &[0], 2).unwrap();
        // p is no longer in the root, so {0, p} has too few root vertices.
        assert!(matches!(star_refine(&g, &std, &[0, p], &[0], 2), Err(StarError::NotAWitness(_))));
        assert!(matches!(star_refine(&g, &std, &[0, 1, p], &[0], 2), Err(StarError::Graph(_))));
    }

    #[test]
    fn big_star_preconditions() {
        assert!(matches!(big_star_lean(&Graph::cycle(7), 1, 1), Err(StarError::TooSmall { .. })));
        assert!(matches!(big_star_lean(&Graph::complete(4), 1, 2), Err(StarError::Parameters { .. })));
        let std = big_star_lean(&Graph::cycle(8), 1, 1).unwrap();
        assert_eq!(std.root_size(), 8);
        assert!(std.leaves.is_empty());
    }

    #[test]
    fn merge_examples() {
        let g = clique_with_pendants(6, &[0, 1]);
        let run = unbreakable_k_lean_with(&g, 3, 2, UnbreakableOptions { force_big_star: true }).unwrap();
        validate(&g, &run.td).unwrap();
        assert!(crate::witness::find_non_lean_witness(&g, &run.td, 2).unwrap().is_none());
        assert_eq!(run.td.node_count(), 3);
        let std = StarDecomposition::whole(4);
        assert_eq!(merge_into_lean(&std, &[]).unwrap().node_count(), 1);
    }
}
