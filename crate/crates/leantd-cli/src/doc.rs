//! JSON documents emitted by the CLI and read back by `verify`.

use std::collections::BTreeMap;

use leantd::connectivity::{CutElements, GhEdge, GomoryHuTree};
use leantd::lean::LeanRun;
use leantd::sparsifier::Sparsifier;
use leantd::star::StarDecomposition;
use leantd::td::TdError;
use leantd::{Graph, TreeDecomposition};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub passed: bool,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparsifierDoc {
    pub k: usize,
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    /// Forest (1-based) that selected each edge, aligned with `edges`.
    pub forest_index: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

impl SparsifierDoc {
    pub fn new(n: usize, k: usize, sp: &Sparsifier) -> Self {
        let (edges, forest_index) = sp.forest_index.iter().map(|(&(u, v), &f)| ([u, v], f)).unzip();
        SparsifierDoc { k, n, edges, forest_index, verification: None }
    }

    pub fn to_sparsifier(&self) -> Result<Sparsifier, String> {
        if self.edges.len() != self.forest_index.len() {
            return Err("edges and forest_index differ in length".into());
        }
        let pairs: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let subgraph = Graph::from_edges(self.n, &pairs).map_err(|e| e.to_string())?;
        let forest_index = pairs.iter().map(|&(u, v)| (u.min(v), u.max(v))).zip(self.forest_index.iter().copied()).collect();
        Ok(Sparsifier { subgraph, forest_index })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStepDoc {
    pub iteration: usize,
    // Potentials are exact integers of arbitrary size, written as decimal strings.
    pub potential_before: String,
    pub potential_after: String,
    pub t1: usize,
    pub t2: usize,
    pub separator: Vec<usize>,
    pub nodes_after: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceDoc {
    pub initial_potential: String,
    pub final_potential: String,
    pub steps: Vec<TraceStepDoc>,
}

impl TraceDoc {
    pub fn new(run: &LeanRun, k: usize) -> Self {
        TraceDoc {
            initial_potential: run.initial_potential.to_string(),
            final_potential: leantd::lean::potential(&run.td, k).to_string(),
            steps: run
                .trace
                .iter()
                .map(|s| TraceStepDoc {
                    iteration: s.iteration,
                    potential_before: s.potential_before.to_string(),
                    potential_after: s.potential_after.to_string(),
                    t1: s.t1,
                    t2: s.t2,
                    separator: s.separator.clone(),
                    nodes_after: s.nodes_after,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarDoc {
    pub root: Vec<usize>,
    pub leaves: Vec<Vec<usize>>,
}

impl StarDoc {
    pub fn new(std: &StarDecomposition) -> Self {
        StarDoc { root: std.root_bag(), leaves: std.leaves.clone() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TdDoc {
    pub k: usize,
    pub n: usize,
    pub engine: String,
    pub root: Option<usize>,
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star: Option<StarDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

impl TdDoc {
    pub fn new(n: usize, k: usize, engine: &str, td: &TreeDecomposition) -> Self {
        TdDoc {
            k,
            n,
            engine: engine.to_string(),
            root: td.root(),
            bags: td.bags().to_vec(),
            edges: td.tree_edges().into_iter().map(|(a, b)| [a, b]).collect(),
            star: None,
            trace: None,
            verification: None,
        }
    }

    pub fn to_td(&self) -> Result<TreeDecomposition, TdError> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        TreeDecomposition::from_parts(self.bags.clone(), &edges, self.root)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlphaDoc {
    pub vertices: Vec<usize>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GhEdgeDoc {
    pub a: usize,
    pub b: usize,
    pub alpha: AlphaDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GhDoc {
    pub nodes: Vec<usize>,
    pub edges: Vec<GhEdgeDoc>,
    /// Terminal → tree node; the keys are exactly the terminal set.
    pub gamma: BTreeMap<usize, usize>,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

impl GhDoc {
    pub fn new(gh: &GomoryHuTree) -> Self {
        GhDoc {
            nodes: (0..gh.node_count).collect(),
            edges: gh
                .edges
                .iter()
                .map(|e| GhEdgeDoc {
                    a: e.a,
                    b: e.b,
                    alpha: AlphaDoc {
                        vertices: e.alpha.vertices.clone(),
                        edges: e.alpha.edges.iter().map(|&(u, v)| [u, v]).collect(),
                    },
                })
                .collect(),
            gamma: gh.gamma.iter().enumerate().filter_map(|(v, t)| t.map(|t| (v, t))).collect(),
            k: gh.k,
            verification: None,
        }
    }

    pub fn terminals(&self) -> Vec<usize> {
        self.gamma.keys().copied().collect()
    }

    /// Rebuilds the tree over a host graph on `n` vertices. Node ids must be
    /// 0..nodes.len().
    pub fn to_tree(&self, n: usize) -> Result<GomoryHuTree, String> {
        if self.nodes.iter().enumerate().any(|(i, &t)| i != t) {
            return Err("node ids must be 0..len in order".into());
        }
        let mut gamma = vec![None; n];
        for (&v, &t) in &self.gamma {
            if v >= n {
                return Err(format!("gamma maps vertex {v}, but the graph has {n} vertices"));
            }
            gamma[v] = Some(t);
        }
        Ok(GomoryHuTree {
            node_count: self.nodes.len(),
            edges: self
                .edges
                .iter()
                .map(|e| GhEdge {
                    a: e.a,
                    b: e.b,
                    alpha: CutElements {
                        vertices: e.alpha.vertices.clone(),
                        edges: e.alpha.edges.iter().map(|p| (p[0].min(p[1]), p[0].max(p[1]))).collect(),
                    },
                })
                .collect(),
            gamma,
            k: self.k,
        })
    }
}
