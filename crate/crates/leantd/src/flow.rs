//! Unit-capacity max-flow on vertex-split networks: vertex separators between
//! sets, weighted separators, flow*, edge cutsets and element cutsets.
//!
//! Every host vertex `v` becomes `v_in = 2v → v_out = 2v+1` carrying the
//! vertex capacity; every edge `uv` becomes `u_out → v_in` and `v_out → u_in`
//! with infinite capacity. Sources are always entered at `_in` nodes and sinks
//! left at `_out` nodes, so a vertex in both terminal sets is forced into the cut.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{Graph, Vertex, VertexCut};

pub const INF: u64 = u64::MAX / 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("terminal set is empty")]
    EmptySide,
    #[error("source and sink coincide at vertex {0}")]
    SameTerminal(Vertex),
    #[error("vertex {0} is not a vertex of the graph")]
    UnknownVertex(Vertex),
    #[error("terminal {0} is not in the terminal set U")]
    NotInTerminalSet(Vertex),
    #[error("weight of vertex {0} must be positive")]
    NonPositiveWeight(Vertex),
    #[error("terminals cannot be separated (infinite capacity path)")]
    Unbounded,
}

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: u64,
    rev: usize,
}

/// Residual network with multi-source / multi-sink augmenting path search.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    head: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
    initial: Vec<u64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork { head: vec![Vec::new(); nodes], arcs: Vec::new(), initial: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        self.head.len()
    }

    pub fn add_node(&mut self) -> usize {
        self.head.push(Vec::new());
        self.head.len() - 1
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: u64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap, rev: id + 1 });
        self.arcs.push(Arc { to: from, cap: 0, rev: id });
        self.initial.push(cap);
        self.initial.push(0);
        self.head[from].push(id);
        self.head[to].push(id + 1);
        id
    }

    /// Restores every arc to its initial capacity.
    pub fn reset(&mut self) {
        for (a, &c) in self.arcs.iter_mut().zip(&self.initial) {
            a.cap = c;
        }
    }

    /// Flow currently routed through arc `id` (as returned by `add_arc`).
    pub fn flow_on(&self, id: usize) -> u64 {
        self.initial[id] - self.arcs[id].cap
    }

    /// Augments from `sources` to `sinks` until no path remains or the flow
    /// value reaches `limit`. Returns the added flow; `INF` if an
    /// infinite-capacity path exists.
    pub fn max_flow(&mut self, sources: &[usize], sinks: &[usize], limit: Option<u64>) -> u64 {
        let n = self.node_count();
        let mut is_sink = vec![false; n];
        for &t in sinks {
            is_sink[t] = true;
        }
        let limit = limit.unwrap_or(INF);
        let mut total = 0u64;
        let mut pred: Vec<usize> = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        while total < limit {
            seen.iter_mut().for_each(|s| *s = false);
            let mut queue = VecDeque::new();
            for &s in sources {
                if !seen[s] {
                    seen[s] = true;
                    pred[s] = usize::MAX;
                    queue.push_back(s);
                }
            }
            let mut end = None;
            'bfs: while let Some(x) = queue.pop_front() {
                if is_sink[x] {
                    end = Some(x);
                    break;
                }
                for &id in &self.head[x] {
                    let a = &self.arcs[id];
                    if a.cap > 0 && !seen[a.to] {
                        seen[a.to] = true;
                        pred[a.to] = id;
                        if is_sink[a.to] {
                            end = Some(a.to);
                            break 'bfs;
                        }
                        queue.push_back(a.to);
                    }
                }
            }
            let Some(end) = end else { break };
            let mut bottleneck = limit - total;
            let mut x = end;
            while pred[x] != usize::MAX {
                let id = pred[x];
                bottleneck = bottleneck.min(self.arcs[id].cap);
                x = self.arcs[self.arcs[id].rev].to;
            }
            if bottleneck >= INF {
                return INF;
            }
            let mut x = end;
            while pred[x] != usize::MAX {
                let id = pred[x];
                let rev = self.arcs[id].rev;
                self.arcs[id].cap -= bottleneck;
                self.arcs[rev].cap += bottleneck;
                x = self.arcs[rev].to;
            }
            total += bottleneck;
        }
        total
    }

    /// Nodes reachable from `sources` in the residual network.
    pub fn reachable(&self, sources: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = Vec::new();
        for &s in sources {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(x) = stack.pop() {
            for &id in &self.head[x] {
                let a = &self.arcs[id];
                if a.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }
}

fn v_in(v: Vertex) -> usize {
    2 * v
}

fn v_out(v: Vertex) -> usize {
    2 * v + 1
}

/// Vertex-split network of `g` with the given per-vertex capacities.
pub fn split_network(g: &Graph, caps: &[u64]) -> FlowNetwork {
    let mut net = FlowNetwork::new(2 * g.n());
    for v in 0..g.n() {
        net.add_arc(v_in(v), v_out(v), caps[v]);
    }
    for (u, v) in g.edges() {
        net.add_arc(v_out(u), v_in(v), INF);
        net.add_arc(v_out(v), v_in(u), INF);
    }
    net
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorResult {
    pub value: u64,
    pub separator: Vec<Vertex>,
    pub cut: VertexCut,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCutResult {
    pub value: usize,
    pub cutset: Vec<(Vertex, Vertex)>,
    pub sides: (Vec<Vertex>, Vec<Vertex>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ElementCutResult {
    pub value: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(Vertex, Vertex)>,
}

fn check_set(g: &Graph, x: &[Vertex]) -> Result<(), FlowError> {
    if x.is_empty() {
        return Err(FlowError::EmptySide);
    }
    match x.iter().find(|&&v| v >= g.n()) {
        Some(&v) => Err(FlowError::UnknownVertex(v)),
        None => Ok(()),
    }
}

/// Minimum separator between `x1` and `x2` under vertex capacities `caps`;
/// the returned cut is the one closest to `x1`.
pub fn separator_with_caps(
    g: &Graph,
    x1: &[Vertex],
    x2: &[Vertex],
    caps: &[u64],
) -> Result<SeparatorResult, FlowError> {
    check_set(g, x1)?;
    check_set(g, x2)?;
    let mut net = split_network(g, caps);
    let sources: Vec<usize> = x1.iter().map(|&v| v_in(v)).collect();
    let sinks: Vec<usize> = x2.iter().map(|&v| v_out(v)).collect();
    let value = net.max_flow(&sources, &sinks, None);
    if value >= INF {
        return Err(FlowError::Unbounded);
    }
    let reach = net.reachable(&sources);
    let a: Vec<Vertex> = (0..g.n()).filter(|&v| reach[v_in(v)]).collect();
    let b: Vec<Vertex> = (0..g.n()).filter(|&v| !reach[v_out(v)]).collect();
    let cut = VertexCut::new_unchecked(&a, &b);
    let separator = cut.separator();
    debug_assert_eq!(separator.iter().map(|&v| caps[v]).sum::<u64>(), value);
    Ok(SeparatorResult { value, separator, cut })
}

/// flow(X1,X2): maximum number of vertex-disjoint (X1,X2)-paths, with a
/// minimum separator realizing it.
pub fn flow_sets(g: &Graph, x1: &[Vertex], x2: &[Vertex]) -> Result<SeparatorResult, FlowError> {
    separator_with_caps(g, x1, x2, &vec![1; g.n()])
}

/// Value of flow(X1,X2), stopping early once it reaches `limit`.
pub fn flow_value_capped(g: &Graph, x1: &[Vertex], x2: &[Vertex], limit: u64) -> u64 {
    let mut net = split_network(g, &vec![1; g.n()]);
    let sources: Vec<usize> = x1.iter().map(|&v| v_in(v)).collect();
    let sinks: Vec<usize> = x2.iter().map(|&v| v_out(v)).collect();
    net.max_flow(&sources, &sinks, Some(limit))
}

pub fn min_weight_separator(
    g: &Graph,
    x1: &[Vertex],
    x2: &[Vertex],
    w: &[u64],
) -> Result<SeparatorResult, FlowError> {
    if let Some(v) = (0..g.n()).find(|&v| w[v] == 0) {
        return Err(FlowError::NonPositiveWeight(v));
    }
    separator_with_caps(g, x1, x2, w)
}

/// Reusable split network for many pairwise local-connectivity queries on
/// one graph: κ(u,v) counts internally vertex-disjoint paths between
/// non-adjacent `u`, `v`.
pub struct LocalConnectivity {
    net: FlowNetwork,
    vertex_arc: Vec<usize>,
}

impl LocalConnectivity {
    pub fn new(g: &Graph) -> Self {
        let mut net = FlowNetwork::new(2 * g.n());
        let vertex_arc = (0..g.n()).map(|v| net.add_arc(v_in(v), v_out(v), 1)).collect();
        for (u, v) in g.edges() {
            net.add_arc(v_out(u), v_in(v), INF);
            net.add_arc(v_out(v), v_in(u), INF);
        }
        LocalConnectivity { net, vertex_arc }
    }

    /// κ(u,v) capped at `limit`. `u`, `v` must be distinct and non-adjacent.
    pub fn value(&mut self, u: Vertex, v: Vertex, limit: u64) -> u64 {
        self.net.reset();
        self.net.max_flow(&[v_out(u)], &[v_in(v)], Some(limit))
    }

    /// After a call to `value` that did not hit its limit: the minimum
    /// (u,v)-separator closest to `u`.
    pub fn separator_near_source(&self, u: Vertex) -> Vec<Vertex> {
        let reach = self.net.reachable(&[v_out(u)]);
        (0..self.vertex_arc.len())
            .filter(|&x| x != u && reach[v_in(x)] && !reach[v_out(x)])
            .collect()
    }
}

/// flow*(u,v): internally vertex-disjoint (u,v)-paths, the edge uv counting
/// as one path when present.
pub fn flow_star(g: &Graph, u: Vertex, v: Vertex) -> Result<u64, FlowError> {
    flow_star_capped(g, u, v, INF)
}

pub fn flow_star_capped(g: &Graph, u: Vertex, v: Vertex, limit: u64) -> Result<u64, FlowError> {
    for x in [u, v] {
        if x >= g.n() {
            return Err(FlowError::UnknownVertex(x));
        }
    }
    if u == v {
        return Err(FlowError::SameTerminal(u));
    }
    let mut net = FlowNetwork::new(2 * g.n());
    for x in 0..g.n() {
        net.add_arc(v_in(x), v_out(x), if x == u || x == v { INF } else { 1 });
    }
    for (a, b) in g.edges() {
        if (a, b) == (u.min(v), u.max(v)) {
            continue;
        }
        net.add_arc(v_out(a), v_in(b), INF);
        net.add_arc(v_out(b), v_in(a), INF);
    }
    let direct = u64::from(g.has_edge(u, v));
    if direct >= limit {
        return Ok(limit);
    }
    Ok(direct + net.max_flow(&[v_out(u)], &[v_in(v)], Some(limit - direct)))
}

/// Split network in which host vertices of `terminals` are uncuttable and
/// every other vertex costs `vertex_cap`, every edge `edge_cap`. Returns the
/// network and, per edge of `g.edges()`, the arc id of its element.
fn element_network(
    g: &Graph,
    terminal: &[bool],
    vertex_cap: u64,
    edge_cap: u64,
) -> (FlowNetwork, Vec<usize>, Vec<(Vertex, Vertex)>) {
    let n = g.n();
    let mut net = FlowNetwork::new(2 * n);
    for v in 0..n {
        net.add_arc(v_in(v), v_out(v), if terminal[v] { INF } else { vertex_cap });
    }
    let edges = g.edges();
    let mut edge_arc = Vec::with_capacity(edges.len());
    for &(u, v) in &edges {
        let e_in = net.add_node();
        let e_out = net.add_node();
        edge_arc.push(net.add_arc(e_in, e_out, edge_cap));
        for x in [u, v] {
            net.add_arc(v_out(x), e_in, INF);
            net.add_arc(e_out, v_in(x), INF);
        }
    }
    (net, edge_arc, edges)
}

/// Minimum `u_set`-element (a,b)-cutset; among minimum ones, one with the
/// fewest edges (edges cost one unit more than vertices).
pub fn element_cutset(
    g: &Graph,
    u_set: &[Vertex],
    a: Vertex,
    b: Vertex,
) -> Result<ElementCutResult, FlowError> {
    let mut terminal = vec![false; g.n()];
    for &v in u_set {
        if v >= g.n() {
            return Err(FlowError::UnknownVertex(v));
        }
        terminal[v] = true;
    }
    for x in [a, b] {
        if x >= g.n() {
            return Err(FlowError::UnknownVertex(x));
        }
        if !terminal[x] {
            return Err(FlowError::NotInTerminalSet(x));
        }
    }
    if a == b {
        return Err(FlowError::SameTerminal(a));
    }
    let scale = (g.n() + g.m() + 1) as u64;
    let (mut net, edge_arc, edges) = element_network(g, &terminal, scale, scale + 1);
    let value = (net.max_flow(&[v_out(a)], &[v_in(b)], None) / scale) as usize;
    let reach = net.reachable(&[v_out(a)]);
    let vertices = (0..g.n()).filter(|&v| !terminal[v] && reach[v_in(v)] && !reach[v_out(v)]).collect();
    let cut_edges = edge_arc
        .iter()
        .zip(&edges)
        .filter(|(&id, _)| {
            let tail = net.arcs[net.arcs[id].rev].to;
            let head = net.arcs[id].to;
            reach[tail] && !reach[head]
        })
        .map(|(_, &e)| e)
        .collect();
    let res = ElementCutResult { value, vertices, edges: cut_edges };
    debug_assert_eq!(res.vertices.len() + res.edges.len(), value);
    Ok(res)
}

/// Element connectivity between terminals `a`, `b`, capped at `limit`.
pub fn element_connectivity_capped(g: &Graph, terminal: &[bool], a: Vertex, b: Vertex, limit: u64) -> u64 {
    let (mut net, _, _) = element_network(g, terminal, 1, 1);
    net.max_flow(&[v_out(a)], &[v_in(b)], Some(limit))
}

/// Minimum (u,v)-cutset with the side containing `u` reachable in the residual network.
pub fn min_edge_cutset(g: &Graph, u: Vertex, v: Vertex) -> Result<EdgeCutResult, FlowError> {
    let all: Vec<Vertex> = (0..g.n()).collect();
    let res = element_cutset(g, &all, u, v)?;
    let mut adj_seen = vec![false; g.n()];
    adj_seen[u] = true;
    let mut stack = vec![u];
    let removed: std::collections::HashSet<(Vertex, Vertex)> = res.edges.iter().copied().collect();
    while let Some(x) = stack.pop() {
        for &y in g.neighbors(x) {
            if !adj_seen[y] && !removed.contains(&(x.min(y), x.max(y))) {
                adj_seen[y] = true;
                stack.push(y);
            }
        }
    }
    let a: Vec<Vertex> = (0..g.n()).filter(|&x| adj_seen[x]).collect();
    let b: Vec<Vertex> = (0..g.n()).filter(|&x| !adj_seen[x]).collect();
    Ok(EdgeCutResult { value: res.value, cutset: res.edges, sides: (a, b) })
}
