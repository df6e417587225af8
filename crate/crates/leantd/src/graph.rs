//! Simple undirected graphs over dense vertex ids `0..n`, the edge-list text
//! format, and the structural transformations the decomposition algorithms
//! consume (induced subgraphs, matching contraction, elimination, clique-filled
//! sides of a vertex cut).

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

pub type Vertex = usize;

/// Old-id → new-id table returned by transformations that drop vertices.
pub type VertexMap = Vec<Option<Vertex>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("edge {0}-{1} is not an edge of the graph")]
    MissingEdge(Vertex, Vertex),
    #[error("edges of the matching share vertex {0}")]
    NotAMatching(Vertex),
    #[error("vertices {0} and {1} of the set are adjacent")]
    NotIndependent(Vertex, Vertex),
    #[error("invalid vertex cut: {0}")]
    InvalidCut(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("missing `p <n> <m>` header")]
    MissingHeader,
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {vertex} is not below n = {n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("header announced {expected} edges but {found} were given")]
    EdgeCount { expected: usize, found: usize },
}

fn norm(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Undirected simple graph. Neighbor lists are kept sorted and mirror the
/// normalized edge set exactly.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    edge_set: HashSet<(Vertex, Vertex)>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], edge_set: HashSet::new() }
    }

    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::new(n);
        for v in 1..n {
            g.insert_edge(v - 1, v);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.insert_edge(n - 1, 0);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.edge_set.len()
    }

    /// ‖G‖ = |V| + |E|.
    pub fn size(&self) -> usize {
        self.n() + self.m()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edge_set.contains(&norm(u, v))
    }

    /// All edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.m());
        for (u, nb) in self.adj.iter().enumerate() {
            for &v in nb {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn add_vertex(&mut self) -> Vertex {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if v >= self.n() {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n() })
        } else {
            Ok(())
        }
    }

    /// Adds a new edge, rejecting loops, duplicates and unknown endpoints.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !self.insert_edge(u, v) {
            let (a, b) = norm(u, v);
            return Err(GraphError::DuplicateEdge(a, b));
        }
        Ok(())
    }

    /// Idempotent insertion; returns whether the edge was new.
    pub fn insert_edge(&mut self, u: Vertex, v: Vertex) -> bool {
        assert!(u != v, "self-loop {u}");
        if !self.edge_set.insert(norm(u, v)) {
            return false;
        }
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adj[a];
            let pos = list.binary_search(&b).unwrap_err();
            list.insert(pos, b);
        }
        true
    }

    pub fn remove_edge(&mut self, u: Vertex, v: Vertex) -> bool {
        if !self.edge_set.remove(&norm(u, v)) {
            return false;
        }
        for (a, b) in [(u, v), (v, u)] {
            let list = &mut self.adj[a];
            let pos = list.binary_search(&b).expect("adjacency out of sync");
            list.remove(pos);
        }
        true
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n()];
        let mut comps = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn is_clique(&self, set: &[Vertex]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    /// G[X]; new ids follow the ascending order of `x`.
    pub fn induced_subgraph(&self, x: &[Vertex]) -> Result<(Graph, VertexMap), GraphError> {
        let mut map: VertexMap = vec![None; self.n()];
        let mut sorted = x.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for (i, &v) in sorted.iter().enumerate() {
            self.check_vertex(v)?;
            map[v] = Some(i);
        }
        let mut h = Graph::new(sorted.len());
        for &v in &sorted {
            for &w in &self.adj[v] {
                if v < w {
                    if let (Some(a), Some(b)) = (map[v], map[w]) {
                        h.insert_edge(a, b);
                    }
                }
            }
        }
        Ok((h, map))
    }

    /// G/M. Each matched pair becomes one vertex placed at the position of
    /// its smaller endpoint; the returned map sends both endpoints there.
    pub fn contract_matching(&self, m: &Matching) -> Result<(Graph, Vec<Vertex>), GraphError> {
        m.check(self)?;
        let mut partner: Vec<Option<Vertex>> = vec![None; self.n()];
        for &(u, v) in m.edges() {
            partner[u] = Some(v);
            partner[v] = Some(u);
        }
        let mut map = vec![usize::MAX; self.n()];
        let mut next = 0;
        for v in 0..self.n() {
            match partner[v] {
                Some(p) if p < v => map[v] = map[p],
                _ => {
                    map[v] = next;
                    next += 1;
                }
            }
        }
        let mut h = Graph::new(next);
        for (u, v) in self.edges() {
            let (a, b) = (map[u], map[v]);
            if a != b {
                h.insert_edge(a, b);
            }
        }
        Ok((h, map))
    }

    /// G * I: every vertex of the independent set `i` has its neighborhood
    /// completed into a clique and is then removed.
    pub fn eliminate(&self, i: &[Vertex]) -> Result<(Graph, VertexMap), GraphError> {
        let mut in_set = vec![false; self.n()];
        for &v in i {
            self.check_vertex(v)?;
            in_set[v] = true;
        }
        for &v in i {
            if let Some(&w) = self.adj[v].iter().find(|&&w| in_set[w]) {
                return Err(GraphError::NotIndependent(v.min(w), v.max(w)));
            }
        }
        let mut filled = self.clone();
        for &v in i {
            let nb = &self.adj[v];
            for (a, &x) in nb.iter().enumerate() {
                for &y in &nb[a + 1..] {
                    filled.insert_edge(x, y);
                }
            }
        }
        let keep: Vec<Vertex> = (0..self.n()).filter(|&v| !in_set[v]).collect();
        filled.induced_subgraph(&keep)
    }

    /// G ⋄ (A,B): G[A] with A∩B completed into a clique.
    pub fn clique_fill_side(&self, cut: &VertexCut) -> Result<(Graph, VertexMap), GraphError> {
        cut.check(self)?;
        let (mut h, map) = self.induced_subgraph(cut.a())?;
        let sep: Vec<Vertex> = cut.separator().iter().map(|&v| map[v].unwrap()).collect();
        for (i, &x) in sep.iter().enumerate() {
            for &y in &sep[i + 1..] {
                h.insert_edge(x, y);
            }
        }
        Ok((h, map))
    }

    /// Parses the `p <n> <m>` / `e <u> <v>` edge-list format.
    pub fn parse(text: &str) -> Result<Graph, ParseError> {
        let mut graph: Option<Graph> = None;
        let mut expected = 0usize;
        let mut last_line = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let fail = |kind| ParseError { line, kind };
            let mut tok = raw.split_whitespace();
            let Some(head) = tok.next() else { continue };
            let rest: Vec<&str> = tok.collect();
            let nums = || -> Result<Vec<usize>, ParseError> {
                rest.iter()
                    .map(|t| t.parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| fail(ParseErrorKind::Malformed(raw.trim().to_string())))
            };
            match head {
                "c" => {}
                "p" => {
                    let v = nums()?;
                    if graph.is_some() || v.len() != 2 {
                        return Err(fail(ParseErrorKind::Malformed(raw.trim().to_string())));
                    }
                    expected = v[1];
                    graph = Some(Graph::new(v[0]));
                }
                "e" => {
                    let g = graph.as_mut().ok_or_else(|| fail(ParseErrorKind::MissingHeader))?;
                    let v = nums()?;
                    if v.len() != 2 {
                        return Err(fail(ParseErrorKind::Malformed(raw.trim().to_string())));
                    }
                    g.add_edge(v[0], v[1]).map_err(|e| {
                        fail(match e {
                            GraphError::SelfLoop(x) => ParseErrorKind::SelfLoop(x),
                            GraphError::DuplicateEdge(a, b) => ParseErrorKind::DuplicateEdge(a, b),
                            GraphError::VertexOutOfRange { vertex, n } => {
                                ParseErrorKind::VertexOutOfRange { vertex, n }
                            }
                            other => ParseErrorKind::Malformed(other.to_string()),
                        })
                    })?;
                }
                _ => return Err(fail(ParseErrorKind::Malformed(raw.trim().to_string()))),
            }
        }
        let g = graph.ok_or(ParseError { line: last_line.max(1), kind: ParseErrorKind::MissingHeader })?;
        if g.m() != expected {
            return Err(ParseError {
                line: last_line.max(1),
                kind: ParseErrorKind::EdgeCount { expected, found: g.m() },
            });
        }
        Ok(g)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p {} {}", self.n(), self.m()).unwrap();
        for (u, v) in self.edges() {
            writeln!(out, "e {u} {v}").unwrap();
        }
        out
    }
}

/// A set of pairwise disjoint edges of a host graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    edges: Vec<(Vertex, Vertex)>,
}

impl Matching {
    pub fn new(g: &Graph, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let m = Matching { edges: edges.iter().map(|&(u, v)| norm(u, v)).collect() };
        m.check(g)?;
        Ok(m)
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Greedy maximal matching scanning edges in lexicographic order.
    pub fn maximal(g: &Graph) -> Self {
        let mut used = vec![false; g.n()];
        let mut edges = Vec::new();
        for (u, v) in g.edges() {
            if !used[u] && !used[v] {
                used[u] = true;
                used[v] = true;
                edges.push((u, v));
            }
        }
        Matching { edges }
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = self.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        vs.sort_unstable();
        vs
    }

    fn check(&self, g: &Graph) -> Result<(), GraphError> {
        let mut used = HashSet::new();
        for &(u, v) in &self.edges {
            g.check_vertex(u)?;
            g.check_vertex(v)?;
            if !g.has_edge(u, v) {
                return Err(GraphError::MissingEdge(u, v));
            }
            for x in [u, v] {
                if !used.insert(x) {
                    return Err(GraphError::NotAMatching(x));
                }
            }
        }
        Ok(())
    }
}

/// Vertex cut (A,B): A∪B = V and no edge between A∖B and B∖A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCut {
    a: Vec<Vertex>,
    b: Vec<Vertex>,
}

impl VertexCut {
    pub fn new(g: &Graph, a: &[Vertex], b: &[Vertex]) -> Result<Self, GraphError> {
        let cut = VertexCut::new_unchecked(a, b);
        cut.check(g)?;
        Ok(cut)
    }

    /// Builds the cut without validating it against a graph.
    pub fn new_unchecked(a: &[Vertex], b: &[Vertex]) -> Self {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        VertexCut { a, b }
    }

    pub fn a(&self) -> &[Vertex] {
        &self.a
    }

    pub fn b(&self) -> &[Vertex] {
        &self.b
    }

    pub fn separator(&self) -> Vec<Vertex> {
        intersect(&self.a, &self.b)
    }

    pub fn order(&self) -> usize {
        self.separator().len()
    }

    /// (B,A).
    pub fn flipped(&self) -> Self {
        VertexCut { a: self.b.clone(), b: self.a.clone() }
    }

    pub fn check(&self, g: &Graph) -> Result<(), GraphError> {
        let n = g.n();
        let mut side = vec![0u8; n];
        for &v in &self.a {
            g.check_vertex(v)?;
            side[v] |= 1;
        }
        for &v in &self.b {
            g.check_vertex(v)?;
            side[v] |= 2;
        }
        if let Some(v) = side.iter().position(|&s| s == 0) {
            return Err(GraphError::InvalidCut(format!("vertex {v} is on neither side")));
        }
        for (u, v) in g.edges() {
            if side[u] | side[v] == 3 && side[u] != 3 && side[v] != 3 {
                return Err(GraphError::InvalidCut(format!("edge {u}-{v} crosses the cut")));
            }
        }
        Ok(())
    }
}

/// Intersection of two sorted vertex lists.
pub fn intersect(a: &[Vertex], b: &[Vertex]) -> Vec<Vertex> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Whether sorted `a` is a subset of sorted `b`.
pub fn is_subset(a: &[Vertex], b: &[Vertex]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}
