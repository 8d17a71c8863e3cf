//! Interest-point graphs extracted from glyph skeletons.
//!
//! Nodes are endpoints, junctions and corners of the skeleton; an edge joins
//! two nodes when a skeleton path connects them without passing through a
//! third. Edge weights are the Euclidean distance between node coordinates.

mod extract;
mod rdp;

pub use extract::{
    build_graph, crossing_number, detect_interest_points, detect_interest_points_with,
    DEFAULT_RDP_EPSILON,
};

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Endpoint,
    Junction,
    Corner,
}

/// A skeleton pixel that becomes a graph node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InterestPoint {
    pub x: usize,
    pub y: usize,
    pub kind: PointKind,
}

impl InterestPoint {
    pub fn new(x: usize, y: usize, kind: PointKind) -> Self {
        Self { x, y, kind }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Undirected simple graph `(V, E, μ, ν)`: node coordinates play the role of
/// the node labelling and edge weights the edge labelling.
#[derive(Clone, Debug, PartialEq)]
pub struct NumeralGraph {
    nodes: Vec<InterestPoint>,
    edges: Vec<Edge>,
}

fn distance(a: &InterestPoint, b: &InterestPoint) -> f64 {
    let dx = a.x as f64 - b.x as f64;
    let dy = a.y as f64 - b.y as f64;
    (dx * dx + dy * dy).sqrt()
}

impl NumeralGraph {
    /// Graph with arbitrary non-negative edge weights. Edges are stored with
    /// `u < v` and sorted; self-loops, duplicates and dangling indices are
    /// rejected.
    pub fn with_weights(
        nodes: Vec<InterestPoint>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Contract("a graph needs at least one node".into()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::Contract(format!("self-loop on node {a}")));
            }
            if a >= nodes.len() || b >= nodes.len() {
                return Err(Error::Contract(format!(
                    "edge ({a}, {b}) references a node outside 0..{}",
                    nodes.len()
                )));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::Contract(format!("edge ({a}, {b}) has weight {w}")));
            }
            let (u, v) = (a.min(b), a.max(b));
            if !seen.insert((u, v)) {
                return Err(Error::Contract(format!("duplicate edge ({u}, {v})")));
            }
            out.push(Edge { u, v, weight: w });
        }
        out.sort_by_key(|e| (e.u, e.v));
        Ok(Self { nodes, edges: out })
    }

    /// Graph whose edge weights are the Euclidean lengths between node coordinates.
    pub fn euclidean(
        nodes: Vec<InterestPoint>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let g = Self::with_weights(nodes, edges.into_iter().map(|(u, v)| (u, v, 0.0)))?;
        weight_edges(g)
    }

    pub fn nodes(&self) -> &[InterestPoint] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Unweighted degree of every node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// Connected component id per node, numbered by first appearance.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut ids = vec![usize::MAX; self.nodes.len()];
        let mut labels = Vec::with_capacity(self.nodes.len());
        let mut next = 0;
        for i in 0..self.nodes.len() {
            let root = find(&mut parent, i);
            if ids[root] == usize::MAX {
                ids[root] = next;
                next += 1;
            }
            labels.push(ids[root]);
        }
        (labels, next)
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().1
    }

    /// Whether every edge weight equals its endpoints' coordinate distance.
    pub fn weights_are_euclidean(&self, tol: f64) -> bool {
        self.edges
            .iter()
            .all(|e| (e.weight - distance(&self.nodes[e.u], &self.nodes[e.v])).abs() <= tol)
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.nodes.len();
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..n).collect::<Vec<_>>() {
            return Err(Error::Contract(
                "not a permutation of the node indices".into(),
            ));
        }
        let mut nodes = self.nodes.clone();
        for (i, &p) in perm.iter().enumerate() {
            nodes[p] = self.nodes[i];
        }
        Self::with_weights(
            nodes,
            self.edges.iter().map(|e| (perm[e.u], perm[e.v], e.weight)),
        )
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, p)| NodeRecord {
                    id,
                    x: p.x,
                    y: p.y,
                    kind: p.kind,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    u: e.u,
                    v: e.v,
                    w: e.weight,
                })
                .collect(),
        }
    }

    pub fn from_file(file: &GraphFile) -> Result<Self> {
        let mut nodes = vec![None; file.nodes.len()];
        for rec in &file.nodes {
            let slot = nodes.get_mut(rec.id).ok_or_else(|| {
                Error::Contract(format!(
                    "node id {} outside 0..{}",
                    rec.id,
                    file.nodes.len()
                ))
            })?;
            if slot
                .replace(InterestPoint::new(rec.x, rec.y, rec.kind))
                .is_some()
            {
                return Err(Error::Contract(format!("duplicate node id {}", rec.id)));
            }
        }
        let nodes = nodes.into_iter().map(Option::unwrap).collect();
        Self::with_weights(nodes, file.edges.iter().map(|e| (e.u, e.v, e.w)))
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        crate::io::write_json_atomic(path, &self.to_file())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        Self::from_file(&crate::io::read_json::<GraphFile>(path)?)
    }
}

/// Reassigns every edge weight from node coordinates.
pub fn weight_edges(mut g: NumeralGraph) -> Result<NumeralGraph> {
    for e in &mut g.edges {
        let (a, b) = (&g.nodes[e.u], &g.nodes[e.v]);
        if a.x == b.x && a.y == b.y {
            return Err(Error::DegenerateEdge { u: e.u, v: e.v });
        }
        e.weight = distance(a, b);
    }
    Ok(g)
}

/// On-disk graph layout: `{"nodes": [{id, x, y, kind}], "edges": [{u, v, w}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub x: usize,
    pub y: usize,
    pub kind: PointKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}
