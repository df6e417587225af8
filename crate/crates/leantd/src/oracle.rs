//! Ground-truth checkers. Nothing here calls into the decomposition
//! pipeline or the split-network engine: flows use a separate depth-first
//! augmenting-path routine and small cases are settled by plain enumeration.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::connectivity::GomoryHuTree;
use crate::graph::{Graph, Vertex, VertexCut};
use crate::td::{Node, TreeDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph needs at least two vertices")]
    TooFewVertices,
    #[error("graph has {0} vertices, too many for exhaustive enumeration")]
    TooLarge(usize),
}

/// Depth-first augmenting paths on an explicit arc list.
struct PathFlow {
    out: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

const BIG: i64 = i64::MAX / 4;

impl PathFlow {
    fn new(n: usize) -> Self {
        PathFlow { out: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new() }
    }

    fn arc(&mut self, a: usize, b: usize, c: i64) {
        self.out[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.out[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    /// One unit of flow per augmentation (all finite capacities are unit).
    fn run(&mut self, s: usize, t: usize, limit: i64) -> i64 {
        let mut total = 0;
        while total < limit {
            let mut via = vec![usize::MAX; self.out.len()];
            let mut seen = vec![false; self.out.len()];
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                if x == t {
                    break;
                }
                for &id in &self.out[x] {
                    let y = self.to[id];
                    if self.cap[id] > 0 && !seen[y] {
                        seen[y] = true;
                        via[y] = id;
                        stack.push(y);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut x = t;
            while x != s {
                let id = via[x];
                self.cap[id] -= 1;
                self.cap[id ^ 1] += 1;
                x = self.to[id ^ 1];
            }
            total += 1;
        }
        total
    }
}

/// Number of edge-disjoint (u,v)-paths, capped at `limit`.
pub fn edge_connectivity(g: &Graph, u: Vertex, v: Vertex, limit: usize) -> usize {
    let mut f = PathFlow::new(g.n());
    for (a, b) in g.edges() {
        f.arc(a, b, 1);
        f.arc(b, a, 1);
    }
    f.run(u, v, limit as i64) as usize
}

/// Internally vertex-disjoint (u,v)-paths for non-adjacent u, v.
pub fn local_vertex_connectivity(g: &Graph, u: Vertex, v: Vertex, limit: usize) -> usize {
    let n = g.n();
    let mut f = PathFlow::new(2 * n);
    for x in 0..n {
        f.arc(2 * x, 2 * x + 1, if x == u || x == v { BIG } else { 1 });
    }
    for (a, b) in g.edges() {
        f.arc(2 * a + 1, 2 * b, BIG);
        f.arc(2 * b + 1, 2 * a, BIG);
    }
    f.run(2 * u + 1, 2 * v, limit as i64) as usize
}

/// Minimum number of elements (non-terminal vertices and edges) separating
/// terminals `a` and `b`, capped at `limit`.
pub fn element_connectivity(g: &Graph, terminal: &[bool], a: Vertex, b: Vertex, limit: usize) -> usize {
    let n = g.n();
    let edges = g.edges();
    let mut f = PathFlow::new(2 * n + 2 * edges.len());
    for x in 0..n {
        f.arc(2 * x, 2 * x + 1, if terminal[x] { BIG } else { 1 });
    }
    for (i, &(x, y)) in edges.iter().enumerate() {
        let e = 2 * n + 2 * i;
        f.arc(e, e + 1, 1);
        for z in [x, y] {
            f.arc(2 * z + 1, e, BIG);
            f.arc(e + 1, 2 * z, BIG);
        }
    }
    f.run(2 * a + 1, 2 * b, limit as i64) as usize
}

/// Classes of "cannot be separated by fewer than k edges", by pairwise flows.
pub fn oracle_kecc(g: &Graph, k: usize) -> Vec<Vec<Vertex>> {
    let n = g.n();
    let mut class = vec![usize::MAX; n];
    let mut classes: Vec<Vec<Vertex>> = Vec::new();
    for v in 0..n {
        if class[v] != usize::MAX {
            continue;
        }
        class[v] = classes.len();
        let mut members = vec![v];
        for w in v + 1..n {
            if class[w] == usize::MAX && edge_connectivity(g, v, w, k) >= k {
                class[w] = classes.len();
                members.push(w);
            }
        }
        classes.push(members);
    }
    classes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexConnectivity {
    /// No proper separator exists (the graph is complete).
    Complete,
    Value(usize),
}

/// Minimum proper vertex separator size over all non-adjacent pairs.
pub fn oracle_vertex_connectivity(g: &Graph) -> Result<VertexConnectivity, OracleError> {
    if g.n() < 2 {
        return Err(OracleError::TooFewVertices);
    }
    let mut best: Option<usize> = None;
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if !g.has_edge(u, v) {
                let c = local_vertex_connectivity(g, u, v, best.unwrap_or(g.n()));
                best = Some(best.map_or(c, |b| b.min(c)));
            }
        }
    }
    Ok(best.map_or(VertexConnectivity::Complete, VertexConnectivity::Value))
}

fn components_without(g: &Graph, deleted: u64) -> Vec<u64> {
    let mut seen = deleted;
    let mut comps = Vec::new();
    for s in 0..g.n() {
        if seen >> s & 1 == 1 {
            continue;
        }
        let mut comp = 1u64 << s;
        seen |= comp;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if seen >> y & 1 == 0 {
                    seen |= 1 << y;
                    comp |= 1 << y;
                    stack.push(y);
                }
            }
        }
        comps.push(comp);
    }
    comps
}

fn mask(set: &[Vertex]) -> u64 {
    set.iter().fold(0, |m, &v| m | 1 << v)
}

/// Smallest |S| such that every (X1,X2)-path meets S, by subset enumeration.
pub fn brute_min_separator(g: &Graph, x1: &[Vertex], x2: &[Vertex]) -> Result<usize, OracleError> {
    let n = g.n();
    if n > 20 {
        return Err(OracleError::TooLarge(n));
    }
    let (m1, m2) = (mask(x1), mask(x2));
    let mut best = n;
    for s in 0u64..1 << n {
        let size = s.count_ones() as usize;
        if size >= best {
            continue;
        }
        if components_without(g, s).iter().all(|&c| c & m1 == 0 || c & m2 == 0) {
            best = size;
        }
    }
    Ok(best)
}

/// Smallest proper vertex separator by enumeration (`None` when complete).
pub fn brute_vertex_connectivity(g: &Graph) -> Result<Option<usize>, OracleError> {
    let n = g.n();
    if n > 20 {
        return Err(OracleError::TooLarge(n));
    }
    let mut best = None;
    for s in 0u64..1 << n {
        let size = s.count_ones() as usize;
        if best.is_some_and(|b| size >= b) {
            continue;
        }
        if components_without(g, s).len() >= 2 {
            best = Some(size);
        }
    }
    Ok(best)
}

/// flow*(u,v) by enumeration: minimum proper (u,v)-separator, plus one if uv is an edge.
pub fn brute_flow_star(g: &Graph, u: Vertex, v: Vertex) -> Result<usize, OracleError> {
    let n = g.n();
    if n > 20 {
        return Err(OracleError::TooLarge(n));
    }
    let mut h = g.clone();
    let direct = usize::from(h.remove_edge(u, v));
    let mut best = n;
    for s in 0u64..1 << n {
        if s >> u & 1 == 1 || s >> v & 1 == 1 || s.count_ones() as usize >= best {
            continue;
        }
        let apart = components_without(&h, s).iter().all(|&c| c >> u & 1 == 0 || c >> v & 1 == 0);
        if apart {
            best = s.count_ones() as usize;
        }
    }
    Ok(best + direct)
}

/// Whether no vertex cut of order < k has ≥ s vertices of `x` on both sides.
pub fn is_unbreakable(g: &Graph, x: &[Vertex], s: usize, k: usize) -> bool {
    let n = g.n();
    let in_x: Vec<bool> = {
        let mut v = vec![false; n];
        x.iter().for_each(|&a| v[a] = true);
        v
    };
    let mut sep: Vec<Vertex> = Vec::new();
    fn rec(g: &Graph, in_x: &[bool], s: usize, k: usize, from: usize, sep: &mut Vec<Vertex>) -> bool {
        if !breakable_with(g, in_x, s, sep) {
            if sep.len() + 1 < k {
                for v in from..g.n() {
                    sep.push(v);
                    let ok = rec(g, in_x, s, k, v + 1, sep);
                    sep.pop();
                    if !ok {
                        return false;
                    }
                }
            }
            true
        } else {
            false
        }
    }
    rec(g, &in_x, s, k, 0, &mut sep)
}

/// Some split of the components of G − sep puts ≥ s marked vertices on each side.
fn breakable_with(g: &Graph, in_x: &[bool], s: usize, sep: &[Vertex]) -> bool {
    let n = g.n();
    let mut deleted = vec![false; n];
    sep.iter().for_each(|&v| deleted[v] = true);
    let base = sep.iter().filter(|&&v| in_x[v]).count();
    let need = s.saturating_sub(base);
    let mut weights = Vec::new();
    let mut seen = deleted.clone();
    for st in 0..n {
        if seen[st] {
            continue;
        }
        seen[st] = true;
        let mut stack = vec![st];
        let mut w = 0;
        while let Some(x) = stack.pop() {
            w += usize::from(in_x[x]);
            for &y in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        weights.push(w);
    }
    let total: usize = weights.iter().sum();
    if total < 2 * need {
        return false;
    }
    // Reachable subset sums capped at `total`.
    let mut reach = vec![false; total + 1];
    reach[0] = true;
    for w in weights {
        for x in (w..=total).rev() {
            if reach[x - w] {
                reach[x] = true;
            }
        }
    }
    (need..=total - need).any(|x| reach[x])
}

/// Minimum adhesion size on the tree path between every ordered node pair
/// (`usize::MAX` for t1 = t2).
pub fn path_adhesion_minima(td: &TreeDecomposition) -> Vec<Vec<usize>> {
    let n = td.node_count();
    let mut out = vec![vec![usize::MAX; n]; n];
    for s in 0..n {
        let mut stack = vec![(s, usize::MAX, usize::MAX)];
        while let Some((x, from, m)) = stack.pop() {
            out[s][x] = m;
            for &y in td.neighbors(x) {
                if y != from {
                    let a = td.adhesion(x, y).len();
                    stack.push((y, x, m.min(a)));
                }
            }
        }
    }
    out
}

/// The four defining conditions of a non-k-lean-witness.
pub fn is_witness(g: &Graph, td: &TreeDecomposition, k: usize, cut: &VertexCut, t1: Node, t2: Node) -> bool {
    if cut.check(g).is_err() {
        return false;
    }
    let order = cut.order();
    if order >= k || t1 >= td.node_count() || t2 >= td.node_count() {
        return false;
    }
    let in_a = crate::graph::intersect(td.bag(t1), cut.a()).len();
    let in_b = crate::graph::intersect(td.bag(t2), cut.b()).len();
    in_a > order && in_b > order && path_adhesion_minima(td)[t1][t2] > order
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoundWitness {
    pub cut: VertexCut,
    pub t1: Node,
    pub t2: Node,
}

/// Enumerates all 3^n placements of vertices into A∖B, B∖A and A∩B.
pub fn exhaustive_witness(g: &Graph, td: &TreeDecomposition, k: usize) -> Result<Option<FoundWitness>, OracleError> {
    let n = g.n();
    if n > 10 {
        return Err(OracleError::TooLarge(n));
    }
    let alpha = path_adhesion_minima(td);
    let nodes = td.node_count();
    let bag_masks: Vec<u64> = (0..nodes).map(|t| mask(td.bag(t))).collect();
    let edges = g.edges();
    let mut side = vec![0u8; n];
    let total = 3u64.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let (mut a, mut b) = (0u64, 0u64);
        for (v, sv) in side.iter_mut().enumerate() {
            *sv = (c % 3) as u8;
            c /= 3;
            match *sv {
                0 => a |= 1 << v,
                1 => b |= 1 << v,
                _ => {
                    a |= 1 << v;
                    b |= 1 << v;
                }
            }
        }
        let order = (a & b).count_ones() as usize;
        if order >= k {
            continue;
        }
        if edges.iter().any(|&(u, v)| side[u] + side[v] == 1) {
            continue;
        }
        for t1 in 0..nodes {
            if ((bag_masks[t1] & a).count_ones() as usize) <= order {
                continue;
            }
            for t2 in 0..nodes {
                if ((bag_masks[t2] & b).count_ones() as usize) > order && alpha[t1][t2] > order {
                    let av: Vec<Vertex> = (0..n).filter(|&v| a >> v & 1 == 1).collect();
                    let bv: Vec<Vertex> = (0..n).filter(|&v| b >> v & 1 == 1).collect();
                    return Ok(Some(FoundWitness { cut: VertexCut::new_unchecked(&av, &bv), t1, t2 }));
                }
            }
        }
    }
    Ok(None)
}

/// Witness search over every separator S with |S| < k: the components of
/// G − S are distributed greedily-exactly (subset DP) to meet the bag-count
/// thresholds of every node pair whose path adhesions exceed |S|.
pub fn separator_enumeration_witness(g: &Graph, td: &TreeDecomposition, k: usize) -> Option<FoundWitness> {
    let alpha = path_adhesion_minima(td);
    let mut sep = Vec::new();
    enumerate_separators(g, td, k, &alpha, 0, &mut sep)
}

fn enumerate_separators(
    g: &Graph,
    td: &TreeDecomposition,
    k: usize,
    alpha: &[Vec<usize>],
    from: Vertex,
    sep: &mut Vec<Vertex>,
) -> Option<FoundWitness> {
    if let Some(w) = split_for(g, td, alpha, sep) {
        return Some(w);
    }
    if sep.len() + 1 >= k {
        return None;
    }
    for v in from..g.n() {
        sep.push(v);
        let w = enumerate_separators(g, td, k, alpha, v + 1, sep);
        sep.pop();
        if w.is_some() {
            return w;
        }
    }
    None
}

fn split_for(g: &Graph, td: &TreeDecomposition, alpha: &[Vec<usize>], sep: &[Vertex]) -> Option<FoundWitness> {
    let n = g.n();
    let p = sep.len();
    let mut comp = vec![usize::MAX; n];
    let mut in_sep = vec![false; n];
    sep.iter().for_each(|&v| in_sep[v] = true);
    let mut count = 0;
    for s in 0..n {
        if in_sep[s] || comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if !in_sep[y] && comp[y] == usize::MAX {
                    comp[y] = count;
                    stack.push(y);
                }
            }
        }
        count += 1;
    }
    let nodes = td.node_count();
    for t1 in 0..nodes {
        for t2 in 0..nodes {
            if alpha[t1][t2] <= p {
                continue;
            }
            let need_a = (p + 1).saturating_sub(td.bag(t1).iter().filter(|&&v| in_sep[v]).count());
            let need_b = (p + 1).saturating_sub(td.bag(t2).iter().filter(|&&v| in_sep[v]).count());
            let mut c1 = vec![0usize; count];
            let mut c2 = vec![0usize; count];
            td.bag(t1).iter().filter(|&&v| !in_sep[v]).for_each(|&v| c1[comp[v]] += 1);
            td.bag(t2).iter().filter(|&&v| !in_sep[v]).for_each(|&v| c2[comp[v]] += 1);
            // best[x][..]: max B-count with capped A-count x; choice tracked for recovery.
            let mut best: Vec<Option<usize>> = vec![None; need_a + 1];
            best[0] = Some(0);
            let mut choices: Vec<Vec<Option<(usize, bool)>>> = Vec::with_capacity(count);
            for c in 0..count {
                let mut next: Vec<Option<usize>> = vec![None; need_a + 1];
                let mut ch = vec![None; need_a + 1];
                for x in 0..=need_a {
                    let Some(bv) = best[x] else { continue };
                    let xa = (x + c1[c]).min(need_a);
                    if next[xa].is_none_or(|cur| cur < bv) {
                        next[xa] = Some(bv);
                        ch[xa] = Some((x, true));
                    }
                    let vb = bv + c2[c];
                    if next[x].is_none_or(|cur| cur < vb) {
                        next[x] = Some(vb);
                        ch[x] = Some((x, false));
                    }
                }
                best = next;
                choices.push(ch);
            }
            if best[need_a].is_some_and(|bv| bv >= need_b) {
                let mut to_a = vec![false; count];
                let mut x = need_a;
                for c in (0..count).rev() {
                    let (prev, a) = choices[c][x].unwrap();
                    to_a[c] = a;
                    x = prev;
                }
                let a: Vec<Vertex> = (0..n).filter(|&v| in_sep[v] || to_a[comp[v]]).collect();
                let b: Vec<Vertex> = (0..n).filter(|&v| in_sep[v] || !to_a[comp[v]]).collect();
                return Some(FoundWitness { cut: VertexCut::new_unchecked(&a, &b), t1, t2 });
            }
        }
    }
    None
}

fn combinations(items: &[Vertex], size: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(items: &[Vertex], size: usize, from: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in from..items.len() {
            cur.push(items[i]);
            rec(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, size, 0, &mut cur, &mut out);
    out
}

/// Vertex-disjoint (X1,X2)-paths, shared vertices counting as trivial paths.
pub fn set_flow(g: &Graph, x1: &[Vertex], x2: &[Vertex], limit: usize) -> usize {
    let n = g.n();
    let mut f = PathFlow::new(2 * n + 2);
    let (s, t) = (2 * n, 2 * n + 1);
    for x in 0..n {
        f.arc(2 * x, 2 * x + 1, 1);
    }
    for (a, b) in g.edges() {
        f.arc(2 * a + 1, 2 * b, BIG);
        f.arc(2 * b + 1, 2 * a, BIG);
    }
    x1.iter().for_each(|&v| f.arc(s, 2 * v, BIG));
    x2.iter().for_each(|&v| f.arc(2 * v + 1, t, BIG));
    f.run(s, t, limit as i64) as usize
}

/// The leanness definition taken literally: for every node pair and all
/// X1 ⊆ bag(t1), X2 ⊆ bag(t2) of equal size j ≤ min(k, path adhesions),
/// flow(X1,X2) ≥ j. Returns an offending `(t1, t2, X1, X2)`.
pub fn flow_search_violation(
    g: &Graph,
    td: &TreeDecomposition,
    k: usize,
) -> Option<(Node, Node, Vec<Vertex>, Vec<Vertex>)> {
    let alpha = path_adhesion_minima(td);
    let nodes = td.node_count();
    for t1 in 0..nodes {
        for t2 in t1..nodes {
            let top = k.min(alpha[t1][t2]).min(td.bag(t1).len()).min(td.bag(t2).len());
            for j in 1..=top {
                let left = combinations(td.bag(t1), j);
                let right = combinations(td.bag(t2), j);
                for x1 in &left {
                    for x2 in &right {
                        if set_flow(g, x1, x2, j) < j {
                            return Some((t1, t2, x1.clone(), x2.clone()));
                        }
                    }
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GhViolation {
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error("alpha of tree edge {edge:?} does not separate {a} from {b}")]
    InvalidCutset { edge: (Node, Node), a: Vertex, b: Vertex },
    #[error("pair {a},{b} has element connectivity {connectivity} but the best path cutset has size {best:?}")]
    NotMinimum { a: Vertex, b: Vertex, connectivity: usize, best: Option<usize> },
}

/// Checks both defining conditions of an element-connectivity k-Gomory-Hu
/// tree for every pair of terminals.
pub fn verify_gomory_hu(g: &Graph, u_set: &[Vertex], k: usize, gh: &GomoryHuTree) -> Result<(), GhViolation> {
    let n = g.n();
    let bad = |m: String| Err(GhViolation::Malformed(m));
    let mut terminal = vec![false; n];
    for &v in u_set {
        if v >= n {
            return bad(format!("terminal {v} is not a vertex"));
        }
        terminal[v] = true;
    }
    if gh.gamma.len() != n {
        return bad(format!("gamma has {} entries for {} vertices", gh.gamma.len(), n));
    }
    for v in 0..n {
        match gh.gamma[v] {
            Some(t) if !terminal[v] => return bad(format!("gamma maps non-terminal {v} to node {t}")),
            Some(t) if t >= gh.node_count => return bad(format!("gamma({v}) = {t} is not a node")),
            None if terminal[v] => return bad(format!("gamma undefined on terminal {v}")),
            _ => {}
        }
    }
    let nodes = gh.node_count;
    let mut adj: Vec<Vec<(Node, usize)>> = vec![Vec::new(); nodes];
    for (i, e) in gh.edges.iter().enumerate() {
        if e.a >= nodes || e.b >= nodes || e.a == e.b {
            return bad(format!("edge {}-{} has bad endpoints", e.a, e.b));
        }
        if e.alpha.len() >= k {
            return bad(format!("alpha of edge {}-{} has size {} ≥ k", e.a, e.b, e.alpha.len()));
        }
        for &x in &e.alpha.vertices {
            if x >= n || terminal[x] {
                return bad(format!("alpha of edge {}-{} contains terminal or unknown vertex {x}", e.a, e.b));
            }
        }
        for &(x, y) in &e.alpha.edges {
            if x >= n || y >= n || !g.has_edge(x, y) {
                return bad(format!("alpha of edge {}-{} contains non-edge {x}-{y}", e.a, e.b));
            }
        }
        adj[e.a].push((e.b, i));
        adj[e.b].push((e.a, i));
    }
    if nodes > 0 && gh.edges.len() != nodes - 1 {
        return bad("tree edge count is not nodes - 1".into());
    }
    // BFS from node 0 both checks connectivity and gives parent pointers.
    let mut parent: Vec<Option<(Node, usize)>> = vec![None; nodes];
    let mut depth = vec![usize::MAX; nodes];
    if nodes > 0 {
        depth[0] = 0;
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &(y, i) in &adj[x] {
                if depth[y] == usize::MAX {
                    depth[y] = depth[x] + 1;
                    parent[y] = Some((x, i));
                    queue.push_back(y);
                }
            }
        }
        if depth.contains(&usize::MAX) {
            return bad("tree is disconnected".into());
        }
    }

    // Condition 1: for each tree edge, no component of G − alpha(e) holds
    // terminals from both sides of e.
    for (i, e) in gh.edges.iter().enumerate() {
        let child = if parent[e.a].is_some_and(|(_, j)| j == i) { e.a } else { e.b };
        let mut below = vec![false; nodes];
        for x in 0..nodes {
            let mut y = x;
            loop {
                if y == child {
                    below[x] = true;
                    break;
                }
                match parent[y] {
                    Some((p, _)) => y = p,
                    None => break,
                }
            }
        }
        let removed_v: HashSet<Vertex> = e.alpha.vertices.iter().copied().collect();
        let removed_e: HashSet<(Vertex, Vertex)> = e.alpha.edges.iter().map(|&(x, y)| (x.min(y), x.max(y))).collect();
        let mut label = vec![usize::MAX; n];
        for s in 0..n {
            if removed_v.contains(&s) || label[s] != usize::MAX {
                continue;
            }
            label[s] = s;
            let mut stack = vec![s];
            let mut side_seen: [Option<Vertex>; 2] = [None, None];
            while let Some(x) = stack.pop() {
                if let Some(t) = gh.gamma[x] {
                    side_seen[usize::from(below[t])].get_or_insert(x);
                }
                for &y in g.neighbors(x) {
                    if label[y] == usize::MAX && !removed_v.contains(&y) && !removed_e.contains(&(x.min(y), x.max(y))) {
                        label[y] = s;
                        stack.push(y);
                    }
                }
            }
            if let [Some(a), Some(b)] = side_seen {
                return Err(GhViolation::InvalidCutset { edge: (e.a, e.b), a: a.min(b), b: a.max(b) });
            }
        }
    }

    // Condition 2: the smallest alpha on each terminal path attains the
    // element connectivity whenever that is below k.
    let path_min = |a: Node, b: Node| -> Option<usize> {
        let (mut x, mut y) = (a, b);
        let mut best: Option<usize> = None;
        let mut take = |i: usize| {
            let s = gh.edges[i].alpha.len();
            best = Some(best.map_or(s, |c: usize| c.min(s)));
        };
        while depth[x] > depth[y] {
            let (p, i) = parent[x].unwrap();
            take(i);
            x = p;
        }
        while depth[y] > depth[x] {
            let (p, i) = parent[y].unwrap();
            take(i);
            y = p;
        }
        while x != y {
            let (px, ix) = parent[x].unwrap();
            let (py, iy) = parent[y].unwrap();
            take(ix);
            take(iy);
            x = px;
            y = py;
        }
        best
    };
    let terms: Vec<Vertex> = (0..n).filter(|&v| terminal[v]).collect();
    for (i, &a) in terms.iter().enumerate() {
        for &b in &terms[i + 1..] {
            let connectivity = element_connectivity(g, &terminal, a, b, k);
            if connectivity < k {
                let best = path_min(gh.gamma[a].unwrap(), gh.gamma[b].unwrap());
                if best != Some(connectivity) {
                    return Err(GhViolation::NotMinimum { a, b, connectivity, best });
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeanCheckMethod {
    /// All 3^n vertex placements.
    Exhaustive,
    /// Every equal-size pair of bag subsets up to size k, by flow.
    BagSubsetFlows,
    /// Every separator of size < k, components distributed by subset DP.
    SeparatorEnumeration,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LeanViolation {
    #[error("not a tree decomposition: {0}")]
    Invalid(#[from] crate::td::TdViolation),
    #[error("adhesion size {size} is not below k = {k}")]
    AdhesionTooLarge { size: usize, k: usize },
    #[error("nodes {t1},{t2} are not k-lean: {detail}")]
    Witness { t1: Node, t2: Node, detail: String },
}

/// Number of set-flow calls [`flow_search_violation`] may need.
pub fn flow_search_cost(td: &TreeDecomposition, k: usize) -> u128 {
    let alpha = path_adhesion_minima(td);
    let choose = |n: usize, r: usize| -> u128 {
        (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
    };
    let mut total = 0u128;
    for t1 in 0..td.node_count() {
        for t2 in t1..td.node_count() {
            let (b1, b2) = (td.bag(t1).len(), td.bag(t2).len());
            let top = k.min(alpha[t1][t2]).min(b1).min(b2);
            for j in 1..=top {
                total += choose(b1, j) * choose(b2, j);
            }
        }
    }
    total
}

/// Leanness by the strongest oracle that fits: exhaustive placements up to
/// `exhaustive_n` vertices, bag-subset flows within `flow_budget` calls,
/// separator enumeration otherwise.
pub fn check_lean_with(
    g: &Graph,
    td: &TreeDecomposition,
    k: usize,
    exhaustive_n: usize,
    flow_budget: u128,
) -> Result<LeanCheckMethod, LeanViolation> {
    crate::td::validate(g, td)?;
    let size = td.adhesion_size();
    if size >= k {
        return Err(LeanViolation::AdhesionTooLarge { size, k });
    }
    let fw = |w: FoundWitness| LeanViolation::Witness {
        t1: w.t1,
        t2: w.t2,
        detail: format!("cut A={:?} B={:?}", w.cut.a(), w.cut.b()),
    };
    if g.n() <= exhaustive_n {
        if let Ok(found) = exhaustive_witness(g, td, k) {
            return found.map_or(Ok(LeanCheckMethod::Exhaustive), |w| Err(fw(w)));
        }
    }
    if flow_search_cost(td, k) <= flow_budget {
        return match flow_search_violation(g, td, k) {
            Some((t1, t2, x1, x2)) => Err(LeanViolation::Witness {
                t1,
                t2,
                detail: format!("X1={x1:?} X2={x2:?} are joined by fewer than {} disjoint paths", x1.len()),
            }),
            None => Ok(LeanCheckMethod::BagSubsetFlows),
        };
    }
    match separator_enumeration_witness(g, td, k) {
        Some(w) => Err(fw(w)),
        None => Ok(LeanCheckMethod::SeparatorEnumeration),
    }
}

pub fn check_lean(g: &Graph, td: &TreeDecomposition, k: usize) -> Result<LeanCheckMethod, LeanViolation> {
    check_lean_with(g, td, k, 7, 200_000)
}

/// Sorted partition, classes ordered by smallest member.
pub fn normalize_partition(mut classes: Vec<Vec<Vertex>>) -> Vec<Vec<Vertex>> {
    for c in &mut classes {
        c.sort_unstable();
    }
    classes.retain(|c| !c.is_empty());
    classes.sort();
    classes
}

/// Partition induced by a labelling.
pub fn partition_from_labels<L: Ord + Clone>(labels: &[L]) -> Vec<Vec<Vertex>> {
    let mut by: BTreeMap<L, Vec<Vertex>> = BTreeMap::new();
    for (v, l) in labels.iter().enumerate() {
        by.entry(l.clone()).or_default().push(v);
    }
    normalize_partition(by.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bridge() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
    }

    #[test]
    fn kecc_examples() {
        assert_eq!(oracle_kecc(&Graph::path(4), 1), vec![vec![0, 1, 2, 3]]);
        assert_eq!(oracle_kecc(&Graph::cycle(5), 2).len(), 1);
        assert_eq!(oracle_kecc(&Graph::cycle(5), 3).len(), 5);
        assert_eq!(oracle_kecc(&bridge(), 2), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn vertex_connectivity_examples() {
        assert_eq!(oracle_vertex_connectivity(&Graph::path(3)), Ok(VertexConnectivity::Value(1)));
        assert_eq!(oracle_vertex_connectivity(&Graph::complete(4)), Ok(VertexConnectivity::Complete));
        assert_eq!(oracle_vertex_connectivity(&Graph::cycle(4)), Ok(VertexConnectivity::Value(2)));
        assert_eq!(oracle_vertex_connectivity(&Graph::new(1)), Err(OracleError::TooFewVertices));
        assert_eq!(brute_vertex_connectivity(&Graph::cycle(4)), Ok(Some(2)));
    }

    #[test]
    fn brute_separator_matches_hand_values() {
        assert_eq!(brute_min_separator(&Graph::cycle(4), &[0, 2], &[1, 3]), Ok(2));
        assert_eq!(brute_flow_star(&Graph::cycle(4), 0, 2), Ok(2));
        assert_eq!(brute_flow_star(&Graph::complete(5), 0, 1), Ok(4));
    }

    #[test]
    fn edge_and_element_connectivity() {
        assert_eq!(edge_connectivity(&Graph::complete(4), 0, 3, 10), 3);
        let t = [true, false, true];
        assert_eq!(element_connectivity(&Graph::path(3), &t, 0, 2, 10), 1);
        assert_eq!(element_connectivity(&Graph::complete(3), &[true; 3], 0, 1, 10), 2);
    }

    #[test]
    fn unbreakability_examples() {
        let all: Vec<Vertex> = (0..5).collect();
        assert!(is_unbreakable(&Graph::complete(5), &all, 4, 4));
        // s < k always breaks on a trivial cut whose separator holds s marked vertices.
        assert!(!is_unbreakable(&Graph::complete(5), &all, 1, 4));
        assert!(!is_unbreakable(&Graph::path(5), &all, 2, 2));
        assert!(is_unbreakable(&Graph::path(5), &all, 3, 1));
    }

    #[test]
    fn witness_searches_agree_on_path() {
        let p = Graph::path(3);
        let single = TreeDecomposition::single_bag(vec![0, 1, 2]);
        assert!(exhaustive_witness(&p, &single, 2).unwrap().is_some());
        assert!(separator_enumeration_witness(&p, &single, 2).is_some());
        assert!(flow_search_violation(&p, &single, 2).is_some());
        let two = TreeDecomposition::from_parts(vec![vec![0, 1], vec![1, 2]], &[(0, 1)], None).unwrap();
        assert_eq!(exhaustive_witness(&p, &two, 2).unwrap(), None);
        assert_eq!(separator_enumeration_witness(&p, &two, 2), None);
        assert_eq!(flow_search_violation(&p, &two, 2), None);
        let k4 = TreeDecomposition::single_bag(vec![0, 1, 2, 3]);
        assert_eq!(exhaustive_witness(&Graph::complete(4), &k4, 3).unwrap(), None);
    }

    #[test]
    fn found_witnesses_satisfy_definition() {
        let g = Graph::path(4);
        let td = TreeDecomposition::single_bag(vec![0, 1, 2, 3]);
        for w in [exhaustive_witness(&g, &td, 2).unwrap(), separator_enumeration_witness(&g, &td, 2)] {
            let w = w.unwrap();
            assert!(is_witness(&g, &td, 2, &w.cut, w.t1, w.t2));
        }
    }
}
