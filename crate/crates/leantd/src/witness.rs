//! Exact search for non-k-lean-witnesses.
//!
//! For a node pair with bags W1, W2 and bound K' = min(k, path adhesions,
//! |W1|, |W2|), any witness has order p < K'. Of the first K' vertices of W1
//! (the anchors) at least one avoids the separator, and that anchor is then
//! separated from some vertex of W1 ∪ W2. So if every anchor has local
//! connectivity ≥ K' to every non-adjacent vertex of W1 ∪ W2, there is no
//! witness for this pair. Otherwise candidate separators are tried: first
//! the extreme minimum separators of each low pair, then, if those fail,
//! every vertex set of size < K' that is a union of whole true-twin classes.
//!
//! The twin restriction loses nothing: if x lies in the separator but its
//! twin y (N[x] = N[y]) does not, moving x to y's side keeps a witness and
//! lowers the order by one.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::flow::LocalConnectivity;
use crate::graph::{Graph, Vertex, VertexCut};
use crate::td::{Node, TreeDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("adhesion size {size} is not below k = {k}")]
    AdhesionTooLarge { size: usize, k: usize },
}

/// A vertex cut together with the node pair it violates leanness at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub cut: VertexCut,
    pub t1: Node,
    pub t2: Node,
}

impl Witness {
    pub fn order(&self) -> usize {
        self.cut.order()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub pair_checks: usize,
    pub cache_hits: usize,
    pub flow_calls: usize,
    pub fallbacks: usize,
}

type PairKey = (Vec<Vertex>, Vec<Vertex>, usize);

/// Witness search bound to one graph and one k. Results for a bag pair are
/// cached by bag contents, so repeated searches over slowly changing
/// decompositions only pay for new bags.
pub struct WitnessSearch<'g> {
    g: &'g Graph,
    k: usize,
    lc: LocalConnectivity,
    kappa: HashMap<(Vertex, Vertex), usize>,
    near: HashMap<(Vertex, Vertex), Vec<Vertex>>,
    cache: HashMap<PairKey, Option<VertexCut>>,
    twins: Option<Vec<Vec<Vertex>>>,
    pub stats: SearchStats,
}

impl<'g> WitnessSearch<'g> {
    pub fn new(g: &'g Graph, k: usize) -> Self {
        WitnessSearch {
            g,
            k,
            lc: LocalConnectivity::new(g),
            kappa: HashMap::new(),
            near: HashMap::new(),
            cache: HashMap::new(),
            twins: None,
            stats: SearchStats::default(),
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.g
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// A witness at minimum tree distance between its nodes, or `None` when
    /// `td` is k-lean. Pairs are scanned by distance, then by node id.
    pub fn search(&mut self, td: &TreeDecomposition) -> Result<Option<Witness>, WitnessError> {
        let size = td.adhesion_size();
        if td.node_count() > 1 && size >= self.k {
            return Err(WitnessError::AdhesionTooLarge { size, k: self.k });
        }
        let pairs = pairs_by_distance(td);
        for (t1, t2, alpha) in pairs {
            if let Some(cut) = self.pair_witness(td.bag(t1), td.bag(t2), alpha) {
                return Ok(Some(Witness { cut, t1, t2 }));
            }
        }
        Ok(None)
    }

    /// Searches only the given node pairs (in order).
    pub fn search_pairs(&mut self, td: &TreeDecomposition, pairs: &[(Node, Node)]) -> Option<Witness> {
        for &(t1, t2) in pairs {
            let alpha = path_min_adhesion(td, t1, t2);
            if let Some(cut) = self.pair_witness(td.bag(t1), td.bag(t2), alpha) {
                return Some(Witness { cut, t1, t2 });
            }
        }
        None
    }

    /// A cut (A,B) of order < min(k, alpha) with |A∩W1| and |B∩W2| both
    /// exceeding the order, if one exists.
    pub fn pair_witness(&mut self, w1: &[Vertex], w2: &[Vertex], alpha: usize) -> Option<VertexCut> {
        let bound = self.k.min(alpha).min(w1.len()).min(w2.len());
        if bound == 0 {
            return None;
        }
        let key = (w1.to_vec(), w2.to_vec(), bound);
        if let Some(hit) = self.cache.get(&key) {
            self.stats.cache_hits += 1;
            return hit.clone();
        }
        self.stats.pair_checks += 1;
        let res = self.pair_witness_uncached(w1, w2, bound);
        self.cache.insert(key, res.clone());
        res
    }

    fn kappa(&mut self, a: Vertex, w: Vertex) -> usize {
        let key = (a.min(w), a.max(w));
        if let Some(&c) = self.kappa.get(&key) {
            return c;
        }
        self.stats.flow_calls += 1;
        let c = self.lc.value(a, w, self.k as u64) as usize;
        self.kappa.insert(key, c);
        c
    }

    /// Minimum (a,w)-separator closest to `a`; only valid when κ(a,w) < k.
    fn separator_near(&mut self, a: Vertex, w: Vertex) -> Vec<Vertex> {
        if let Some(s) = self.near.get(&(a, w)) {
            return s.clone();
        }
        self.stats.flow_calls += 1;
        self.lc.value(a, w, self.k as u64);
        let s = self.lc.separator_near_source(a);
        self.near.insert((a, w), s.clone());
        s
    }

    fn pair_witness_uncached(&mut self, w1: &[Vertex], w2: &[Vertex], bound: usize) -> Option<VertexCut> {
        if let Some(cut) = check_split(self.g, &[], w1, w2) {
            return Some(cut);
        }
        let mut targets: Vec<Vertex> = w1.iter().chain(w2).copied().collect();
        targets.sort_unstable();
        targets.dedup();
        let mut low = Vec::new();
        for &a in &w1[..bound] {
            for &w in &targets {
                if w != a && !self.g.has_edge(a, w) && self.kappa(a, w) < bound {
                    low.push((a, w));
                }
            }
        }
        if low.is_empty() {
            return None;
        }
        for &(a, w) in &low {
            for sep in [self.separator_near(a, w), self.separator_near(w, a)] {
                if let Some(cut) = check_split(self.g, &sep, w1, w2) {
                    return Some(cut);
                }
            }
        }
        self.stats.fallbacks += 1;
        let g = self.g;
        let twins = self.twins.get_or_insert_with(|| twin_classes(g));
        exhaustive_split(g, twins, w1, w2, bound)
    }
}

/// Every unordered node pair with its minimum path adhesion, sorted by tree
/// distance, then by node ids.
pub fn pairs_by_distance(td: &TreeDecomposition) -> Vec<(Node, Node, usize)> {
    let n = td.node_count();
    let mut out = Vec::new();
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut alpha = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in td.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    alpha[y] = alpha[x].min(td.adhesion(x, y).len());
                    queue.push_back(y);
                }
            }
        }
        for t in s..n {
            out.push((dist[t], s, t, alpha[t]));
        }
    }
    out.sort_unstable();
    out.into_iter().map(|(_, a, b, alpha)| (a, b, alpha)).collect()
}

/// Smallest adhesion on the tree path from `a` to `b` (`usize::MAX` if a = b).
pub fn path_min_adhesion(td: &TreeDecomposition, a: Node, b: Node) -> usize {
    let rooted = td.rooted_at(a);
    let path = rooted.path(a, b);
    path.windows(2).map(|w| td.adhesion(w[0], w[1]).len()).min().unwrap_or(usize::MAX)
}

/// Tries to distribute the components of G − `sep` so that A = sep ∪ (its
/// components) holds more than |sep| vertices of W1 and B likewise of W2.
pub fn check_split(g: &Graph, sep: &[Vertex], w1: &[Vertex], w2: &[Vertex]) -> Option<VertexCut> {
    let n = g.n();
    let p = sep.len();
    let mut in_sep = vec![false; n];
    for &v in sep {
        in_sep[v] = true;
    }
    let need_a = (p + 1).saturating_sub(w1.iter().filter(|&&v| in_sep[v]).count());
    let need_b = (p + 1).saturating_sub(w2.iter().filter(|&&v| in_sep[v]).count());
    let free1 = w1.iter().filter(|&&v| !in_sep[v]).count();
    let free2 = w2.iter().filter(|&&v| !in_sep[v]).count();
    if free1 < need_a || free2 < need_b {
        return None;
    }
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for &s in w1.iter().chain(w2) {
        if in_sep[s] || comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        stack.push(s);
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
    let mut c1 = vec![0usize; count];
    let mut c2 = vec![0usize; count];
    w1.iter().filter(|&&v| !in_sep[v]).for_each(|&v| c1[comp[v]] += 1);
    w2.iter().filter(|&&v| !in_sep[v]).for_each(|&v| c2[comp[v]] += 1);
    let to_a = distribute(&c1, &c2, need_a, need_b)?;
    // Components without bag vertices (unlabelled) go to B.
    let a: Vec<Vertex> = (0..n).filter(|&v| in_sep[v] || (comp[v] != usize::MAX && to_a[comp[v]])).collect();
    let b: Vec<Vertex> = (0..n).filter(|&v| in_sep[v] || comp[v] == usize::MAX || !to_a[comp[v]]).collect();
    Some(VertexCut::new_unchecked(&a, &b))
}

/// Chooses a set of components for side A with Σc1 ≥ need_a while the rest
/// keep Σc2 ≥ need_b.
fn distribute(c1: &[usize], c2: &[usize], need_a: usize, need_b: usize) -> Option<Vec<bool>> {
    let count = c1.len();
    // best[x] = max Σc2 over B-components given capped Σc1 = x on A.
    let mut best: Vec<Option<usize>> = vec![None; need_a + 1];
    best[0] = Some(0);
    let mut trail: Vec<Vec<(usize, bool)>> = Vec::with_capacity(count);
    for c in 0..count {
        let mut next: Vec<Option<usize>> = vec![None; need_a + 1];
        let mut step = vec![(0, false); need_a + 1];
        for x in 0..=need_a {
            let Some(val) = best[x] else { continue };
            let vb = val + c2[c];
            if next[x].is_none_or(|cur| cur < vb) {
                next[x] = Some(vb);
                step[x] = (x, false);
            }
            let xa = (x + c1[c]).min(need_a);
            if next[xa].is_none_or(|cur| cur < val) {
                next[xa] = Some(val);
                step[xa] = (x, true);
            }
        }
        best = next;
        trail.push(step);
    }
    if !best[need_a].is_some_and(|v| v >= need_b) {
        return None;
    }
    let mut to_a = vec![false; count];
    let mut x = need_a;
    for c in (0..count).rev() {
        let (prev, a) = trail[c][x];
        to_a[c] = a;
        x = prev;
    }
    Some(to_a)
}

/// True-twin classes (equal closed neighbourhoods), ordered by least vertex.
fn twin_classes(g: &Graph) -> Vec<Vec<Vertex>> {
    let mut by_closed: HashMap<Vec<Vertex>, Vec<Vertex>> = HashMap::new();
    for v in 0..g.n() {
        let mut closed = g.neighbors(v).to_vec();
        let at = closed.partition_point(|&u| u < v);
        closed.insert(at, v);
        by_closed.entry(closed).or_default().push(v);
    }
    let mut classes: Vec<Vec<Vertex>> = by_closed.into_values().collect();
    classes.sort_unstable();
    classes
}

/// Last resort: every union of twin classes of size < `bound`, smallest first.
fn exhaustive_split(g: &Graph, twins: &[Vec<Vertex>], w1: &[Vertex], w2: &[Vertex], bound: usize) -> Option<VertexCut> {
    let small: Vec<&[Vertex]> = twins.iter().filter(|c| c.len() < bound).map(Vec::as_slice).collect();
    let mut sep = Vec::new();
    for size in 1..bound {
        if let Some(cut) = unions_of_size(g, &small, size, 0, &mut sep, w1, w2) {
            return Some(cut);
        }
    }
    None
}

fn unions_of_size(
    g: &Graph,
    classes: &[&[Vertex]],
    size: usize,
    from: usize,
    sep: &mut Vec<Vertex>,
    w1: &[Vertex],
    w2: &[Vertex],
) -> Option<VertexCut> {
    if sep.len() == size {
        return check_split(g, sep, w1, w2);
    }
    for (i, class) in classes.iter().enumerate().skip(from) {
        if sep.len() + class.len() > size {
            continue;
        }
        sep.extend_from_slice(class);
        let r = unions_of_size(g, classes, size, i + 1, sep, w1, w2);
        sep.truncate(sep.len() - class.len());
        if r.is_some() {
            return r;
        }
    }
    None
}

/// One-shot search; see [`WitnessSearch::search`].
pub fn find_non_lean_witness(g: &Graph, td: &TreeDecomposition, k: usize) -> Result<Option<Witness>, WitnessError> {
    WitnessSearch::new(g, k).search(td)
}
