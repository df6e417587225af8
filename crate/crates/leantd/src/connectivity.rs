//! Connectivity structures read off lean tree decompositions: element
//! connectivity k-Gomory-Hu trees (through a clique gadget), k-Gomory-Hu
//! trees, k-edge-connected components and small vertex separators.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bodlaender::{bodlaender_k_lean, BodlaenderConfig, BodlaenderError};
use crate::graph::{Graph, Vertex};
use crate::lean::{k_lean_td, LeanError};
use crate::sparsifier::ni_sparsify;
use crate::td::{validate, Node, TdError, TdViolation, TreeDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectivityError {
    #[error(transparent)]
    Lean(#[from] LeanError),
    #[error(transparent)]
    Bodlaender(#[from] BodlaenderError),
    #[error("locating a terminal clique failed: {0}")]
    Locate(#[from] TdError),
    #[error("gadget decomposition is inconsistent: {0}")]
    Gadget(String),
    #[error("stripped gadget decomposition is invalid: {0}")]
    Stripped(TdViolation),
    #[error("vertex {0} is not in the domain")]
    UnknownVertex(Vertex),
    #[error("query needs two distinct vertices")]
    SameVertex,
    #[error("graph needs at least two vertices")]
    TooFewVertices,
    #[error("k must be at least 1")]
    ZeroK,
}

/// Which k-lean engine backs a reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Direct,
    Bodlaender,
}

pub fn lean_with(g: &Graph, k: usize, engine: Engine) -> Result<TreeDecomposition, ConnectivityError> {
    Ok(match engine {
        Engine::Direct => k_lean_td(g, k)?,
        Engine::Bodlaender => bodlaender_k_lean(g, k, &BodlaenderConfig::default())?,
    })
}

/// Mixed set of non-terminal vertices and host edges.
#[derive(Debug, Clone, PartialEq, Eq, Default, PartialOrd, Ord)]
pub struct CutElements {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(Vertex, Vertex)>,
}

impl CutElements {
    pub fn len(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhEdge {
    pub a: Node,
    pub b: Node,
    pub alpha: CutElements,
}

/// Tree on `node_count` nodes, terminal map `gamma` (indexed by host
/// vertex, `None` off the terminal set) and per-edge cut elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GomoryHuTree {
    pub node_count: usize,
    pub edges: Vec<GhEdge>,
    pub gamma: Vec<Option<Node>>,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetVertex {
    /// A host vertex outside the terminal set.
    Host(Vertex),
    /// The edge uv, subdivided.
    Edge(Vertex, Vertex),
    /// Copy `i` of terminal `v`.
    Clique(Vertex, usize),
}

/// Terminals blown up into k-cliques, edges subdivided; an edge vertex is
/// adjacent to a non-terminal endpoint itself and to all clique copies of a
/// terminal endpoint.
#[derive(Debug, Clone)]
pub struct GadgetGraph {
    pub graph: Graph,
    pub kind: Vec<GadgetVertex>,
    pub clique: Vec<Vec<Vertex>>,
    pub host_id: Vec<Option<Vertex>>,
    pub edge_id: BTreeMap<(Vertex, Vertex), Vertex>,
}

impl GadgetGraph {
    pub fn build(g: &Graph, terminal: &[bool], k: usize) -> Self {
        let n = g.n();
        let mut kind = Vec::new();
        let mut host_id = vec![None; n];
        for v in 0..n {
            if !terminal[v] {
                host_id[v] = Some(kind.len());
                kind.push(GadgetVertex::Host(v));
            }
        }
        let mut edge_id = BTreeMap::new();
        for (u, v) in g.edges() {
            edge_id.insert((u, v), kind.len());
            kind.push(GadgetVertex::Edge(u, v));
        }
        let mut clique = vec![Vec::new(); n];
        for v in 0..n {
            if terminal[v] {
                for i in 0..k {
                    clique[v].push(kind.len());
                    kind.push(GadgetVertex::Clique(v, i));
                }
            }
        }
        let mut graph = Graph::new(kind.len());
        for (&(u, v), &x) in &edge_id {
            for end in [u, v] {
                match host_id[end] {
                    Some(h) => {
                        graph.insert_edge(x, h);
                    }
                    None => {
                        for &y in &clique[end] {
                            graph.insert_edge(x, y);
                        }
                    }
                }
            }
        }
        for ys in &clique {
            for (i, &a) in ys.iter().enumerate() {
                for &b in &ys[i + 1..] {
                    graph.insert_edge(a, b);
                }
            }
        }
        GadgetGraph { graph, kind, clique, host_id, edge_id }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GhOptions {
    pub engine: Engine,
    pub sparsify: bool,
}

impl Default for GhOptions {
    fn default() -> Self {
        GhOptions { engine: Engine::Direct, sparsify: true }
    }
}

pub fn element_gomory_hu(g: &Graph, u_set: &[Vertex], k: usize) -> Result<GomoryHuTree, ConnectivityError> {
    element_gomory_hu_with(g, u_set, k, GhOptions::default())
}

pub fn element_gomory_hu_with(
    g: &Graph,
    u_set: &[Vertex],
    k: usize,
    opts: GhOptions,
) -> Result<GomoryHuTree, ConnectivityError> {
    if k == 0 {
        return Err(ConnectivityError::ZeroK);
    }
    let n = g.n();
    let mut terminal = vec![false; n];
    for &v in u_set {
        if v >= n {
            return Err(ConnectivityError::UnknownVertex(v));
        }
        terminal[v] = true;
    }
    let host = if opts.sparsify { ni_sparsify(g, k).subgraph } else { g.clone() };
    let gadget = GadgetGraph::build(&host, &terminal, k);
    let td = lean_with(&gadget.graph, k, opts.engine)?;

    // Home node of each terminal clique; strip clique copies elsewhere.
    let mut home = vec![None; n];
    for v in (0..n).filter(|&v| terminal[v]) {
        home[v] = Some(td.locate_bag(&gadget.clique[v])?);
    }
    for (_, adh) in td.adhesions() {
        for v in (0..n).filter(|&v| terminal[v]) {
            if gadget.clique[v].iter().all(|y| adh.binary_search(y).is_ok()) {
                return Err(ConnectivityError::Gadget(format!("clique of terminal {v} lies inside an adhesion")));
            }
        }
    }
    let kind = &gadget.kind;
    let mut stripped = td.clone();
    for t in 0..td.node_count() {
        let bag: Vec<Vertex> = td
            .bag(t)
            .iter()
            .copied()
            .filter(|&x| match kind[x] {
                GadgetVertex::Clique(v, _) => home[v] == Some(t),
                _ => true,
            })
            .collect();
        stripped.set_bag(t, bag);
    }
    validate(&gadget.graph, &stripped).map_err(ConnectivityError::Stripped)?;

    // Prune leaves that carry no terminal.
    let nodes = stripped.node_count();
    let mut carries = vec![false; nodes];
    home.iter().flatten().for_each(|&t| carries[t] = true);
    let mut degree: Vec<usize> = (0..nodes).map(|t| stripped.neighbors(t).len()).collect();
    let mut alive = vec![true; nodes];
    let mut alive_count = nodes;
    let mut stack: Vec<Node> = (0..nodes).filter(|&t| degree[t] <= 1 && !carries[t]).collect();
    while let Some(t) = stack.pop() {
        if !alive[t] || alive_count <= 1 || carries[t] || degree[t] > 1 {
            continue;
        }
        alive[t] = false;
        alive_count -= 1;
        for &s in stripped.neighbors(t) {
            if alive[s] {
                degree[s] -= 1;
                if degree[s] <= 1 {
                    stack.push(s);
                }
            }
        }
    }
    let mut new_id = vec![usize::MAX; nodes];
    let mut next = 0;
    for t in 0..nodes {
        if alive[t] {
            new_id[t] = next;
            next += 1;
        }
    }
    let translate = |adh: &[Vertex]| -> CutElements {
        let mut out = CutElements::default();
        for &x in adh {
            match kind[x] {
                GadgetVertex::Host(v) => out.vertices.push(v),
                GadgetVertex::Edge(u, v) => out.edges.push((u, v)),
                GadgetVertex::Clique(..) => unreachable!("clique copies never sit in adhesions after stripping"),
            }
        }
        out.vertices.sort_unstable();
        out.edges.sort_unstable();
        out
    };
    let mut edges = Vec::new();
    for (a, b) in stripped.tree_edges() {
        if alive[a] && alive[b] {
            let alpha = translate(&stripped.adhesion(a, b));
            edges.push(GhEdge { a: new_id[a], b: new_id[b], alpha });
        }
    }
    let gamma = home.iter().map(|h| h.map(|t| new_id[t])).collect();
    Ok(GomoryHuTree { node_count: next, edges, gamma, k })
}

pub fn k_gomory_hu(g: &Graph, k: usize) -> Result<GomoryHuTree, ConnectivityError> {
    let all: Vec<Vertex> = (0..g.n()).collect();
    element_gomory_hu(g, &all, k)
}

pub fn k_gomory_hu_with(g: &Graph, k: usize, opts: GhOptions) -> Result<GomoryHuTree, ConnectivityError> {
    let all: Vec<Vertex> = (0..g.n()).collect();
    element_gomory_hu_with(g, &all, k, opts)
}

/// Fibers of the terminal map, classes sorted and ordered by smallest member.
pub fn classes_of(gh: &GomoryHuTree) -> Vec<Vec<Vertex>> {
    let mut by: BTreeMap<Node, Vec<Vertex>> = BTreeMap::new();
    for (v, t) in gh.gamma.iter().enumerate() {
        if let Some(t) = t {
            by.entry(*t).or_default().push(v);
        }
    }
    crate::oracle::normalize_partition(by.into_values().collect())
}

pub fn k_edge_cc(g: &Graph, k: usize) -> Result<Vec<Vec<Vertex>>, ConnectivityError> {
    Ok(classes_of(&k_gomory_hu(g, k)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutQuery {
    AtLeastK,
    Cut(CutElements),
}

/// Smallest cut on the tree path between γ(u) and γ(v).
pub fn min_cut_query(gh: &GomoryHuTree, u: Vertex, v: Vertex) -> Result<CutQuery, ConnectivityError> {
    if u == v {
        return Err(ConnectivityError::SameVertex);
    }
    let lookup = |x: Vertex| gh.gamma.get(x).copied().flatten().ok_or(ConnectivityError::UnknownVertex(x));
    let (a, b) = (lookup(u)?, lookup(v)?);
    if a == b {
        return Ok(CutQuery::AtLeastK);
    }
    let mut adj: Vec<Vec<(Node, usize)>> = vec![Vec::new(); gh.node_count];
    for (i, e) in gh.edges.iter().enumerate() {
        adj[e.a].push((e.b, i));
        adj[e.b].push((e.a, i));
    }
    let mut via: Vec<Option<(Node, usize)>> = vec![None; gh.node_count];
    let mut seen = vec![false; gh.node_count];
    seen[a] = true;
    let mut stack = vec![a];
    while let Some(x) = stack.pop() {
        for &(y, i) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                via[y] = Some((x, i));
                stack.push(y);
            }
        }
    }
    let mut best: Option<&CutElements> = None;
    let mut x = b;
    while let Some((p, i)) = via[x] {
        let alpha = &gh.edges[i].alpha;
        if best.is_none_or(|c| alpha.len() < c.len()) {
            best = Some(alpha);
        }
        x = p;
    }
    Ok(best.map_or(CutQuery::AtLeastK, |c| CutQuery::Cut(c.clone())))
}

/// A proper vertex separator of size < k, or `None` if none exists.
pub fn vertex_separator_lt_k(g: &Graph, k: usize) -> Result<Option<Vec<Vertex>>, ConnectivityError> {
    vertex_separator_lt_k_with(g, k, Engine::Direct)
}

pub fn vertex_separator_lt_k_with(g: &Graph, k: usize, engine: Engine) -> Result<Option<Vec<Vertex>>, ConnectivityError> {
    if g.n() < 2 {
        return Err(ConnectivityError::TooFewVertices);
    }
    if k == 0 {
        return Err(ConnectivityError::ZeroK);
    }
    let td = lean_with(g, k, engine)?;
    if td.bags().iter().any(|b| b.len() == g.n()) {
        return Ok(None);
    }
    let rooted = td.rooted().expect("nonempty graph has a nonempty decomposition");
    let mut pick: Option<(usize, Node)> = None;
    for &t in &rooted.order {
        if let Some(p) = rooted.parent[t] {
            if td.adhesion(t, p).len() < td.bag(t).len() && pick.is_none_or(|(d, _)| rooted.depth[t] > d) {
                pick = Some((rooted.depth[t], t));
            }
        }
    }
    let (_, t) = pick.ok_or_else(|| ConnectivityError::Gadget("no node extends its parent adhesion".into()))?;
    Ok(Some(td.adhesion(t, rooted.parent[t].unwrap())))
}

/// Whether `s` is a proper separator: G − S has at least two components.
pub fn is_proper_separator(g: &Graph, s: &[Vertex]) -> bool {
    let mut deleted = vec![false; g.n()];
    s.iter().for_each(|&v| deleted[v] = true);
    let mut seen = deleted.clone();
    let mut comps = 0;
    for st in 0..g.n() {
        if seen[st] {
            continue;
        }
        comps += 1;
        seen[st] = true;
        let mut stack = vec![st];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    comps >= 2
}
