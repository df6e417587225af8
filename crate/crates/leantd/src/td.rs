//! Tree decompositions: storage, validation, adhesions, bag location and
//! contraction of redundant nodes.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{is_subset, Graph, Vertex};

pub type Node = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TdError {
    #[error("node {0} does not exist")]
    UnknownNode(Node),
    #[error("no bag contains the requested vertex set")]
    NoContainingBag,
    #[error("decomposition is not a tree")]
    NotATree,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TdViolation {
    #[error("the node graph is not a tree")]
    NotATree,
    #[error("bag of node {node} contains unknown vertex {vertex}")]
    UnknownVertex { node: Node, vertex: Vertex },
    #[error("edge {0}-{1} is not contained in any bag")]
    EdgeUncovered(Vertex, Vertex),
    #[error("vertex {0} is in no bag")]
    VertexMissing(Vertex),
    #[error("nodes containing vertex {0} do not form a subtree")]
    VertexDisconnected(Vertex),
}

/// A tree of nodes with sorted vertex bags and an optional root.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeDecomposition {
    bags: Vec<Vec<Vertex>>,
    adj: Vec<Vec<Node>>,
    root: Option<Node>,
}

/// BFS layout of a tree from a chosen root.
#[derive(Debug, Clone)]
pub struct Rooted {
    pub root: Node,
    pub parent: Vec<Option<Node>>,
    pub depth: Vec<usize>,
    /// Nodes in BFS order; children visited by ascending id.
    pub order: Vec<Node>,
}

impl Rooted {
    pub fn children(&self, td: &TreeDecomposition, t: Node) -> Vec<Node> {
        td.neighbors(t).iter().copied().filter(|&c| self.parent[c] == Some(t)).collect()
    }

    /// Tree path from `a` to `b`, inclusive.
    pub fn path(&self, a: Node, b: Node) -> Vec<Node> {
        let (mut x, mut y) = (a, b);
        let mut left = Vec::new();
        let mut right = Vec::new();
        while self.depth[x] > self.depth[y] {
            left.push(x);
            x = self.parent[x].unwrap();
        }
        while self.depth[y] > self.depth[x] {
            right.push(y);
            y = self.parent[y].unwrap();
        }
        while x != y {
            left.push(x);
            right.push(y);
            x = self.parent[x].unwrap();
            y = self.parent[y].unwrap();
        }
        left.push(x);
        left.extend(right.into_iter().rev());
        left
    }
}

impl TreeDecomposition {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single_bag(bag: Vec<Vertex>) -> Self {
        let mut td = Self::default();
        td.add_node(bag);
        td.root = Some(0);
        td
    }

    /// One bag per connected component, consecutive bags joined by an edge
    /// (empty adhesion). The empty graph gives the empty decomposition.
    pub fn per_component(g: &Graph) -> Self {
        let mut td = Self::default();
        for (i, comp) in g.components().into_iter().enumerate() {
            td.add_node(comp);
            if i > 0 {
                td.add_edge(i - 1, i);
            }
        }
        if td.node_count() > 0 {
            td.root = Some(0);
        }
        td
    }

    pub fn from_parts(bags: Vec<Vec<Vertex>>, edges: &[(Node, Node)], root: Option<Node>) -> Result<Self, TdError> {
        let mut td = Self::default();
        for b in bags {
            td.add_node(b);
        }
        for &(a, b) in edges {
            if a >= td.node_count() || b >= td.node_count() {
                return Err(TdError::UnknownNode(a.max(b)));
            }
            td.add_edge(a, b);
        }
        if let Some(r) = root {
            if r >= td.node_count() {
                return Err(TdError::UnknownNode(r));
            }
        }
        td.root = root;
        Ok(td)
    }

    pub fn add_node(&mut self, mut bag: Vec<Vertex>) -> Node {
        bag.sort_unstable();
        bag.dedup();
        self.bags.push(bag);
        self.adj.push(Vec::new());
        self.bags.len() - 1
    }

    pub fn add_edge(&mut self, a: Node, b: Node) {
        let pa = self.adj[a].binary_search(&b).unwrap_or_else(|p| p);
        self.adj[a].insert(pa, b);
        let pb = self.adj[b].binary_search(&a).unwrap_or_else(|p| p);
        self.adj[b].insert(pb, a);
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    pub fn bag(&self, t: Node) -> &[Vertex] {
        &self.bags[t]
    }

    pub fn bags(&self) -> &[Vec<Vertex>] {
        &self.bags
    }

    pub fn set_bag(&mut self, t: Node, mut bag: Vec<Vertex>) {
        bag.sort_unstable();
        bag.dedup();
        self.bags[t] = bag;
    }

    pub fn neighbors(&self, t: Node) -> &[Node] {
        &self.adj[t]
    }

    pub fn root(&self) -> Option<Node> {
        self.root
    }

    pub fn set_root(&mut self, r: Option<Node>) {
        self.root = r;
    }

    /// Tree edges `(a, b)` with `a < b`, lexicographically.
    pub fn tree_edges(&self) -> Vec<(Node, Node)> {
        let mut out = Vec::new();
        for (a, nb) in self.adj.iter().enumerate() {
            for &b in nb {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// ‖T‖: number of nodes plus total bag size.
    pub fn total_size(&self) -> usize {
        self.node_count() + self.bags.iter().map(Vec::len).sum::<usize>()
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_tree(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let m: usize = self.adj.iter().map(Vec::len).sum::<usize>() / 2;
        if m != n - 1 {
            return false;
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == n
    }

    /// BFS layout from `root` (ascending neighbor order).
    pub fn rooted_at(&self, root: Node) -> Rooted {
        let n = self.node_count();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    depth[y] = depth[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        Rooted { root, parent, depth, order }
    }

    /// Rooted layout at the stored root (node 0 if none). `None` when empty.
    pub fn rooted(&self) -> Option<Rooted> {
        (self.node_count() > 0).then(|| self.rooted_at(self.root.unwrap_or(0)))
    }

    /// For each vertex, the node closest to the root whose bag contains it.
    pub fn forget_nodes(&self, rooted: &Rooted, n: usize) -> Vec<Option<Node>> {
        let mut forget = vec![None; n];
        for &t in &rooted.order {
            for &v in &self.bags[t] {
                if v < n && forget[v].is_none() {
                    forget[v] = Some(t);
                }
            }
        }
        forget
    }

    /// All adhesions `((child, parent), bag(child) ∩ bag(parent))`, computed by
    /// one forget-node sweep: a vertex of a child bag lies in the adhesion to
    /// the parent exactly when it is not forgotten at the child.
    pub fn adhesions(&self) -> Vec<((Node, Node), Vec<Vertex>)> {
        let Some(rooted) = self.rooted() else { return Vec::new() };
        let n = self.bags.iter().flat_map(|b| b.last()).max().map_or(0, |&v| v + 1);
        let forget = self.forget_nodes(&rooted, n);
        rooted
            .order
            .iter()
            .filter_map(|&t| rooted.parent[t].map(|p| (t, p)))
            .map(|(t, p)| {
                let adh = self.bags[t].iter().copied().filter(|&v| forget[v] != Some(t)).collect();
                ((t, p), adh)
            })
            .collect()
    }

    pub fn adhesion(&self, a: Node, b: Node) -> Vec<Vertex> {
        crate::graph::intersect(&self.bags[a], &self.bags[b])
    }

    /// Largest adhesion size; 0 for decompositions without edges.
    pub fn adhesion_size(&self) -> usize {
        self.adhesions().iter().map(|(_, a)| a.len()).max().unwrap_or(0)
    }

    /// A node whose bag contains `w`: among the forget nodes of the members
    /// of `w`, the one farthest from the root.
    pub fn locate_bag(&self, w: &[Vertex]) -> Result<Node, TdError> {
        let rooted = self.rooted().ok_or(TdError::NoContainingBag)?;
        let n = w.iter().max().map_or(0, |&v| v + 1);
        let forget = self.forget_nodes(&rooted, n);
        let mut best = rooted.root;
        for &v in w {
            let t = forget[v].ok_or(TdError::NoContainingBag)?;
            if rooted.depth[t] > rooted.depth[best] {
                best = t;
            }
        }
        let mut sorted = w.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if is_subset(&sorted, &self.bags[best]) {
            Ok(best)
        } else {
            Err(TdError::NoContainingBag)
        }
    }

    /// Contracts, top-down from `root`, every child whose bag is contained in
    /// its parent's bag into that parent; afterwards any remaining tree edge
    /// whose one bag contains the other is contracted onto the larger bag.
    /// Bags of surviving nodes are untouched; node ids are renumbered in BFS
    /// order from the surviving root.
    pub fn simplify(&self, root: Node) -> TreeDecomposition {
        let rooted = self.rooted_at(root);
        let n = self.node_count();
        let mut adj: Vec<std::collections::BTreeSet<Node>> = vec![Default::default(); n];
        let mut alive = vec![false; n];
        alive[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(p) = queue.pop_front() {
            let mut work: VecDeque<Node> = rooted.children(self, p).into();
            while let Some(c) = work.pop_front() {
                if is_subset(&self.bags[c], &self.bags[p]) {
                    work.extend(rooted.children(self, c));
                } else {
                    alive[c] = true;
                    adj[p].insert(c);
                    adj[c].insert(p);
                    queue.push_back(c);
                }
            }
        }
        let mut rep = root;
        let mut work: VecDeque<Node> = (0..n).filter(|&t| alive[t]).collect();
        while let Some(t) = work.pop_front() {
            if !alive[t] {
                continue;
            }
            let Some(&u) = adj[t].iter().find(|&&u| is_subset(&self.bags[t], &self.bags[u])) else {
                continue;
            };
            let others: Vec<Node> = adj[t].iter().copied().filter(|&x| x != u).collect();
            adj[u].remove(&t);
            for x in others {
                adj[x].remove(&t);
                adj[x].insert(u);
                adj[u].insert(x);
                work.push_back(x);
            }
            adj[t].clear();
            alive[t] = false;
            if rep == t {
                rep = u;
            }
            work.push_back(u);
        }
        let mut out = TreeDecomposition::default();
        let mut new_id = vec![usize::MAX; n];
        new_id[rep] = out.add_node(self.bags[rep].clone());
        out.root = Some(new_id[rep]);
        let mut bfs = VecDeque::from([rep]);
        while let Some(x) = bfs.pop_front() {
            for &y in &adj[x] {
                if new_id[y] == usize::MAX {
                    new_id[y] = out.add_node(self.bags[y].clone());
                    out.add_edge(new_id[x], new_id[y]);
                    bfs.push_back(y);
                }
            }
        }
        out
    }

    /// Removes every node whose bag is contained in a neighbor's bag.
    pub fn reduce_total_size(&self) -> TreeDecomposition {
        match self.rooted() {
            Some(r) => self.simplify(r.root),
            None => self.clone(),
        }
    }

    /// Renames vertices through `f`; vertices mapped to `None` are dropped.
    pub fn map_vertices(&self, f: impl Fn(Vertex) -> Option<Vertex>) -> TreeDecomposition {
        let mut td = self.clone();
        for b in &mut td.bags {
            let mut nb: Vec<Vertex> = b.iter().filter_map(|&v| f(v)).collect();
            nb.sort_unstable();
            nb.dedup();
            *b = nb;
        }
        td
    }
}

/// Checks the tree shape, the edge condition and the vertex condition.
pub fn validate(g: &Graph, td: &TreeDecomposition) -> Result<(), TdViolation> {
    if !td.is_tree() {
        return Err(TdViolation::NotATree);
    }
    let n = g.n();
    let mut occurrences: Vec<Vec<Node>> = vec![Vec::new(); n];
    for (t, bag) in td.bags().iter().enumerate() {
        for &v in bag {
            if v >= n {
                return Err(TdViolation::UnknownVertex { node: t, vertex: v });
            }
            occurrences[v].push(t);
        }
    }
    if n == 0 {
        return Ok(());
    }
    if td.node_count() == 0 {
        return Err(TdViolation::VertexMissing(0));
    }
    let rooted = td.rooted_at(0);
    for (v, occ) in occurrences.iter().enumerate() {
        if occ.is_empty() {
            return Err(TdViolation::VertexMissing(v));
        }
        // Connected iff exactly one occurrence lacks a parent occurrence.
        let tops = occ
            .iter()
            .filter(|&&t| rooted.parent[t].is_none_or(|p| td.bag(p).binary_search(&v).is_err()))
            .count();
        if tops != 1 {
            return Err(TdViolation::VertexDisconnected(v));
        }
    }
    let mut covered = vec![false; g.m()];
    let index: std::collections::HashMap<(Vertex, Vertex), usize> =
        g.edges().into_iter().enumerate().map(|(i, e)| (e, i)).collect();
    for bag in td.bags() {
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                if let Some(&e) = index.get(&(u, v)) {
                    covered[e] = true;
                }
            }
        }
    }
    if let Some(e) = covered.iter().position(|c| !c) {
        let (u, v) = g.edges()[e];
        return Err(TdViolation::EdgeUncovered(u, v));
    }
    Ok(())
}
