//! Bodlaender-style recursion: shrink the graph by contracting a large
//! matching or eliminating many improved-simplicial vertices, solve the
//! smaller instance recursively, lift the result back into an unbreakable
//! hint, and hand the hint to an improvement routine.

use thiserror::Error;

use crate::flow::flow_star_capped;
use crate::graph::{is_subset, Graph, GraphError, Matching, Vertex};
use crate::lean::{k_lean_run, LeanError};
use crate::sparsifier::ni_sparsify;
use crate::td::{validate, TdViolation, TreeDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BodlaenderError {
    #[error(transparent)]
    Lean(#[from] LeanError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no bag contains the neighborhood of vertex {0}")]
    NoContainingBag(Vertex),
    #[error("{count} bags contain the neighborhood of vertex {vertex}, expected exactly one")]
    NoUniqueBag { vertex: Vertex, count: usize },
    #[error("vertex {vertex} has degree {degree}, outside the range this lift accepts")]
    DegreeOutOfRange { vertex: Vertex, degree: usize },
    #[error("graph has {edges} edges, more than k·n = {bound}")]
    TooManyEdges { edges: usize, bound: usize },
    #[error("dichotomy size guarantee violated: {0}")]
    Dichotomy(String),
    #[error("intermediate decomposition at a level with {n} vertices is invalid: {violation}")]
    Intermediate { n: usize, violation: TdViolation },
    #[error("k must be at least 1")]
    ZeroK,
}

/// G plus an edge between every non-adjacent pair with flow* ≥ k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprovedGraph {
    pub graph: Graph,
    pub added: Vec<(Vertex, Vertex)>,
}

impl ImprovedGraph {
    pub fn is_added(&self, u: Vertex, v: Vertex) -> bool {
        self.added.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// Whether N_G(v) is a clique in the improved graph.
    pub fn is_simplicial(&self, g: &Graph, v: Vertex) -> bool {
        self.graph.is_clique(g.neighbors(v))
    }
}

pub fn improved_graph(g: &Graph, k: usize) -> ImprovedGraph {
    let mut graph = g.clone();
    let mut added = Vec::new();
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if !g.has_edge(u, v) && flow_star_capped(g, u, v, k as u64).expect("distinct") >= k as u64 {
                graph.insert_edge(u, v);
                added.push((u, v));
            }
        }
    }
    ImprovedGraph { graph, added }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeClass {
    /// Degree < k.
    Low,
    /// k ≤ degree ≤ 4k.
    High,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dichotomy {
    Matching(Matching),
    Simplicial { set: Vec<Vertex>, majority: DegreeClass },
}

impl Dichotomy {
    /// Members of the simplicial set in the majority degree class.
    pub fn majority_part(&self, g: &Graph, k: usize) -> Vec<Vertex> {
        match self {
            Dichotomy::Matching(_) => Vec::new(),
            Dichotomy::Simplicial { set, majority } => {
                set.iter().copied().filter(|&v| (g.degree(v) < k) == (*majority == DegreeClass::Low)).collect()
            }
        }
    }
}

/// Maximal matching if it has ≥ n/(32k³) edges; otherwise the independent
/// set of low-degree unmatched vertices that no sparsified helper edge
/// relies on. Requires |E| ≤ k·|V|.
pub fn find_match_or_simplicial(g: &Graph, k: usize) -> Result<Dichotomy, BodlaenderError> {
    if k == 0 {
        return Err(BodlaenderError::ZeroK);
    }
    let n = g.n();
    if g.m() > k * n {
        return Err(BodlaenderError::TooManyEdges { edges: g.m(), bound: k * n });
    }
    let matching = Matching::maximal(g);
    let k3 = k * k * k;
    if matching.len() * 32 * k3 >= n {
        return Ok(Dichotomy::Matching(matching));
    }
    let covered = matching.vertices();
    let mut slot = vec![usize::MAX; n];
    for (i, &v) in covered.iter().enumerate() {
        slot[v] = i;
    }
    let low_degree: Vec<Vertex> = (0..n).filter(|&v| slot[v] == usize::MAX && g.degree(v) <= 4 * k).collect();

    // (u, v, w) for every non-edge uv inside N(w); sorted so each pair's
    // helpers come out grouped and in ascending order.
    let mut triples = Vec::new();
    for &w in &low_degree {
        let nb = g.neighbors(w);
        for (i, &u) in nb.iter().enumerate() {
            for &v in &nb[i + 1..] {
                if !g.has_edge(u, v) {
                    triples.push((u, v, w));
                }
            }
        }
    }
    triples.sort_unstable();
    let mut star = Graph::new(covered.len());
    for (u, v) in g.edges() {
        if slot[u] != usize::MAX && slot[v] != usize::MAX {
            star.insert_edge(slot[u], slot[v]);
        }
    }
    let mut helpers: Vec<((Vertex, Vertex), Vec<Vertex>)> = Vec::new();
    for &(u, v, w) in &triples {
        match helpers.last_mut() {
            Some((pair, ws)) if *pair == (u, v) => {
                if ws.len() < k {
                    ws.push(w);
                }
            }
            _ => {
                star.insert_edge(slot[u], slot[v]);
                helpers.push(((u, v), vec![w]));
            }
        }
    }
    let sparse = ni_sparsify(&star, 4 * k * k).subgraph;
    let mut meaningful = vec![false; n];
    for ((u, v), ws) in &helpers {
        if sparse.has_edge(slot[*u], slot[*v]) {
            ws.iter().for_each(|&w| meaningful[w] = true);
        }
    }
    let set: Vec<Vertex> = low_degree.into_iter().filter(|&w| !meaningful[w]).collect();
    if set.len() * 4 < n {
        return Err(BodlaenderError::Dichotomy(format!("{} simplicial vertices for n = {n}", set.len())));
    }
    let low = set.iter().filter(|&&v| g.degree(v) < k).count();
    let majority = if 2 * low >= set.len() { DegreeClass::Low } else { DegreeClass::High };
    Ok(Dichotomy::Simplicial { set, majority })
}

/// Hangs a leaf bag N[v] off a bag containing N(v), for each v ∈ `i`
/// (degrees < k). `td` is a decomposition of G * I in G's vertex ids.
pub fn lift_lowdeg(g: &Graph, k: usize, i: &[Vertex], td: &TreeDecomposition) -> Result<TreeDecomposition, BodlaenderError> {
    let mut out = td.clone();
    for &v in i {
        let degree = g.degree(v);
        if degree >= k {
            return Err(BodlaenderError::DegreeOutOfRange { vertex: v, degree });
        }
        if out.node_count() == 0 {
            out = TreeDecomposition::single_bag(Vec::new());
        }
        let nb = g.neighbors(v);
        let t = out.locate_bag(nb).map_err(|_| BodlaenderError::NoContainingBag(v))?;
        let mut bag = nb.to_vec();
        bag.push(v);
        let leaf = out.add_node(bag);
        out.add_edge(t, leaf);
    }
    Ok(out)
}

/// Inserts each v ∈ `i` (degrees ≥ k) into the unique bag containing N(v).
pub fn lift_highdeg(g: &Graph, k: usize, i: &[Vertex], td: &TreeDecomposition) -> Result<TreeDecomposition, BodlaenderError> {
    let mut additions: Vec<Vec<Vertex>> = vec![Vec::new(); td.node_count()];
    for &v in i {
        let degree = g.degree(v);
        if degree < k {
            return Err(BodlaenderError::DegreeOutOfRange { vertex: v, degree });
        }
        let nb = g.neighbors(v);
        let holders: Vec<usize> = (0..td.node_count()).filter(|&t| is_subset(nb, td.bag(t))).collect();
        match holders[..] {
            [t] => additions[t].push(v),
            [] => return Err(BodlaenderError::NoContainingBag(v)),
            _ => return Err(BodlaenderError::NoUniqueBag { vertex: v, count: holders.len() }),
        }
    }
    let mut out = td.clone();
    for (t, extra) in additions.into_iter().enumerate() {
        if !extra.is_empty() {
            let mut bag = out.bag(t).to_vec();
            bag.extend(extra);
            out.set_bag(t, bag);
        }
    }
    Ok(out)
}

/// Replaces each contracted vertex of G/M by the two endpoints it came from.
pub fn uncontract(g: &Graph, m: &Matching, td: &TreeDecomposition) -> Result<TreeDecomposition, BodlaenderError> {
    let (h, map) = g.contract_matching(m)?;
    let mut preimage: Vec<Vec<Vertex>> = vec![Vec::new(); h.n()];
    for (v, &w) in map.iter().enumerate() {
        preimage[w].push(v);
    }
    let mut out = td.clone();
    for t in 0..td.node_count() {
        let bag = td.bag(t).iter().flat_map(|&w| preimage[w].iter().copied()).collect();
        out.set_bag(t, bag);
    }
    Ok(out)
}

/// How the improvement step uses the lifted decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImproverMode {
    /// Ignore the hint; refine from one bag per component.
    #[default]
    FromScratch,
    /// Refine starting from the hint when its adhesions are already < k,
    /// otherwise from scratch.
    WarmStart,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BodlaenderConfig {
    /// Levels with at most this many vertices go straight to the improver;
    /// `None` means max(2, 64k³).
    pub threshold: Option<usize>,
    pub mode: ImproverMode,
}

impl BodlaenderConfig {
    pub fn threshold_for(&self, k: usize) -> usize {
        self.threshold.unwrap_or_else(|| (64 * k * k * k).max(2)).max(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Base,
    Matching { size: usize },
    LowDegree { eliminated: usize },
    HighDegree { eliminated: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub n: usize,
    pub m: usize,
    pub branch: Branch,
    pub hint_adhesion: usize,
}

#[derive(Debug, Clone, Default)]
pub struct BodlaenderReport {
    /// Outermost level first.
    pub levels: Vec<Level>,
}

impl BodlaenderReport {
    pub fn depth(&self) -> usize {
        self.levels.iter().filter(|l| l.branch != Branch::Base).count()
    }
}

pub type Improver<'a> = dyn FnMut(&Graph, usize, &TreeDecomposition) -> Result<TreeDecomposition, LeanError> + 'a;

pub fn default_improver(mode: ImproverMode) -> impl FnMut(&Graph, usize, &TreeDecomposition) -> Result<TreeDecomposition, LeanError> {
    move |g, k, hint| {
        let start = (mode == ImproverMode::WarmStart && hint.adhesion_size() < k).then(|| hint.clone());
        Ok(k_lean_run(g, k, start)?.td)
    }
}

pub fn bodlaender_k_lean(g: &Graph, k: usize, cfg: &BodlaenderConfig) -> Result<TreeDecomposition, BodlaenderError> {
    Ok(bodlaender_k_lean_report(g, k, cfg)?.0)
}

pub fn bodlaender_k_lean_report(
    g: &Graph,
    k: usize,
    cfg: &BodlaenderConfig,
) -> Result<(TreeDecomposition, BodlaenderReport), BodlaenderError> {
    let mut improver = default_improver(cfg.mode);
    bodlaender_k_lean_with(g, k, cfg, &mut improver)
}

/// The recursion with a caller-supplied improvement routine. Every hint is
/// validated against its level's graph before the improver sees it.
pub fn bodlaender_k_lean_with(
    g: &Graph,
    k: usize,
    cfg: &BodlaenderConfig,
    improver: &mut Improver<'_>,
) -> Result<(TreeDecomposition, BodlaenderReport), BodlaenderError> {
    if k == 0 {
        return Err(BodlaenderError::ZeroK);
    }
    let sparse = ni_sparsify(g, k).subgraph;
    let mut report = BodlaenderReport::default();
    let td = recurse(&sparse, k, cfg, improver, &mut report)?;
    Ok((td, report))
}

fn recurse(
    g: &Graph,
    k: usize,
    cfg: &BodlaenderConfig,
    improver: &mut Improver<'_>,
    report: &mut BodlaenderReport,
) -> Result<TreeDecomposition, BodlaenderError> {
    let n = g.n();
    let slot = report.levels.len();
    report.levels.push(Level { n, m: g.m(), branch: Branch::Base, hint_adhesion: 0 });
    let (hint, branch) = if n <= cfg.threshold_for(k) {
        (TreeDecomposition::per_component(g), Branch::Base)
    } else {
        match find_match_or_simplicial(g, k)? {
            Dichotomy::Matching(m) => {
                if m.len() * 32 * k * k * k < n {
                    return Err(BodlaenderError::Dichotomy(format!("matching of {} for n = {n}", m.len())));
                }
                let (contracted, _) = g.contract_matching(&m)?;
                let smaller = ni_sparsify(&contracted, k).subgraph;
                let inner = recurse(&smaller, k, cfg, improver, report)?;
                (uncontract(g, &m, &inner)?, Branch::Matching { size: m.len() })
            }
            d @ Dichotomy::Simplicial { .. } => {
                let part = d.majority_part(g, k);
                let Dichotomy::Simplicial { majority, .. } = d else { unreachable!() };
                let (eliminated, map) = g.eliminate(&part)?;
                let mut back = vec![0; eliminated.n()];
                for (v, w) in map.iter().enumerate() {
                    if let Some(w) = w {
                        back[*w] = v;
                    }
                }
                let smaller = ni_sparsify(&eliminated, k).subgraph;
                let inner = recurse(&smaller, k, cfg, improver, report)?;
                let inner = inner.map_vertices(|w| Some(back[w]));
                match majority {
                    DegreeClass::Low => (lift_lowdeg(g, k, &part, &inner)?, Branch::LowDegree { eliminated: part.len() }),
                    DegreeClass::High => (lift_highdeg(g, k, &part, &inner)?, Branch::HighDegree { eliminated: part.len() }),
                }
            }
        }
    };
    validate(g, &hint).map_err(|violation| BodlaenderError::Intermediate { n, violation })?;
    report.levels[slot].branch = branch;
    report.levels[slot].hint_adhesion = hint.adhesion_size();
    let improved = improver(g, k, &hint)?;
    validate(g, &improved).map_err(|violation| BodlaenderError::Intermediate { n, violation })?;
    Ok(improved.reduce_total_size())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_flow_star;

    fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|l| (0, l)).collect();
        Graph::from_edges(leaves + 1, &edges).unwrap()
    }

    #[test]
    fn improved_graph_examples() {
        assert!(improved_graph(&Graph::complete(4), 3).added.is_empty());
        assert!(improved_graph(&star(3), 2).added.is_empty());
        let c4 = improved_graph(&Graph::cycle(4), 2);
        assert_eq!(c4.added, vec![(0, 2), (1, 3)]);
        assert_eq!(c4.graph, Graph::complete(4));
        for &(u, v) in &c4.added {
            assert_eq!(brute_flow_star(&Graph::cycle(4), u, v).unwrap(), 2);
        }
    }

    #[test]
    fn dichotomy_examples() {
        let g = ni_sparsify(&Graph::complete(40), 2).subgraph;
        match find_match_or_simplicial(&g, 2).unwrap() {
            Dichotomy::Matching(m) => assert!(m.len() * 256 >= 40),
            other => panic!("{other:?}"),
        }
        let s = star(140);
        match find_match_or_simplicial(&s, 1).unwrap() {
            Dichotomy::Simplicial { set, majority } => {
                assert!(set.len() * 4 >= 141);
                assert_eq!(majority, DegreeClass::High);
                let ig = improved_graph(&s, 1);
                assert!(set.iter().all(|&v| ig.is_simplicial(&s, v)));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            find_match_or_simplicial(&Graph::complete(5), 1),
            Err(BodlaenderError::TooManyEdges { .. })
        ));
    }

    #[test]
    fn lifts() {
        let g = Graph::path(3);
        let td = TreeDecomposition::single_bag(vec![1, 2]);
        let out = lift_lowdeg(&g, 2, &[0], &td).unwrap();
        validate(&g, &out).unwrap();
        assert_eq!(out.bag(1), &[0, 1]);
        assert_eq!(lift_lowdeg(&g, 2, &[], &td).unwrap(), td);

        let c4 = Graph::cycle(4);
        let td = TreeDecomposition::single_bag(vec![1, 3]);
        assert!(matches!(lift_lowdeg(&c4, 2, &[0, 2], &td), Err(BodlaenderError::DegreeOutOfRange { .. })));
        let out = lift_highdeg(&c4, 2, &[0, 2], &td).unwrap();
        assert_eq!(out.bag(0), &[0, 1, 2, 3]);
        assert_eq!(lift_highdeg(&c4, 2, &[], &td).unwrap(), td);
    }

    #[test]
    fn uncontract_examples() {
        let c4 = Graph::cycle(4);
        let m = Matching::new(&c4, &[(0, 1), (2, 3)]).unwrap();
        let out = uncontract(&c4, &m, &TreeDecomposition::single_bag(vec![0, 1])).unwrap();
        assert_eq!(out.bag(0), &[0, 1, 2, 3]);
        let empty = Matching::new(&c4, &[]).unwrap();
        let td = TreeDecomposition::single_bag(vec![0, 1, 2, 3]);
        assert_eq!(uncontract(&c4, &empty, &td).unwrap(), td);
    }

    #[test]
    fn small_graphs_match_direct_validity() {
        let cfg = BodlaenderConfig { threshold: Some(2), mode: ImproverMode::FromScratch };
        for g in [Graph::complete(2), Graph::path(6), Graph::cycle(7)] {
            for k in 1..=3 {
                let (td, _) = bodlaender_k_lean_report(&g, k, &cfg).unwrap();
                validate(&g, &td).unwrap();
                assert!(crate::witness::find_non_lean_witness(&g, &td, k).unwrap().is_none());
            }
        }
        assert_eq!(bodlaender_k_lean(&Graph::complete(2), 2, &BodlaenderConfig::default()).unwrap().node_count(), 1);
    }
}
