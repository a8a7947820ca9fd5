//! Clique/cycle enumeration and the Ramsey hypergraph of a host graph.
//!
//! Hypervertices are host edges. A type-1 hyperedge is the edge set of an
//! r-clique of the host, a type-2 hyperedge the edge set of an ell-cycle.
//! A hypergraph never stores an isolated hypervertex: its hypervertex set is
//! always exactly the union of its hyperedges, so the underlying graph G(H)
//! satisfies e(G(H)) = |V(H)| by construction.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::densities::PairParams;
use crate::graph::{mask_to_vec, Edge, Graph, Subgraph};
use crate::rational::binom;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HyperError {
    #[error("hyperedge is not a {0}: {1}")]
    MalformedHyperedge(&'static str, String),
    #[error("hyperedge uses edge {0} absent from the host graph")]
    EdgeNotInHost(Edge),
    #[error("unknown hyperedge kind `{0}`")]
    UnknownKind(String),
    #[error("bad edge pair [{0}, {1}]")]
    BadEdgePair(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HyperedgeKind {
    Clique,
    Cycle,
}

impl HyperedgeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            HyperedgeKind::Clique => "clique",
            HyperedgeKind::Cycle => "cycle",
        }
    }
}

/// A set of host edges forming a clique or a cycle. Identity is the pair
/// (kind, sorted edge set); `new` enforces the shape.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hyperedge {
    kind: HyperedgeKind,
    edges: Vec<Edge>,
}

impl Hyperedge {
    pub fn new(kind: HyperedgeKind, mut edges: Vec<Edge>) -> Result<Hyperedge, HyperError> {
        edges.sort();
        edges.dedup();
        let he = Hyperedge { kind, edges };
        he.check_shape()?;
        Ok(he)
    }

    pub fn clique_from_vertices(verts: &[usize]) -> Hyperedge {
        let mut edges = Vec::with_capacity(verts.len() * (verts.len() - 1) / 2);
        for i in 0..verts.len() {
            for j in (i + 1)..verts.len() {
                edges.push(Edge::new(verts[i], verts[j]));
            }
        }
        edges.sort();
        Hyperedge {
            kind: HyperedgeKind::Clique,
            edges,
        }
    }

    pub fn cycle_from_vertices(seq: &[usize]) -> Hyperedge {
        let mut edges = Vec::with_capacity(seq.len());
        for i in 0..seq.len() {
            edges.push(Edge::new(seq[i], seq[(i + 1) % seq.len()]));
        }
        edges.sort();
        Hyperedge {
            kind: HyperedgeKind::Cycle,
            edges,
        }
    }

    fn check_shape(&self) -> Result<(), HyperError> {
        let vmask = self.vertex_mask();
        let v = vmask.count_ones() as usize;
        match self.kind {
            HyperedgeKind::Clique => {
                if self.edges.len() != binom(v as u64, 2) as usize || v < 2 {
                    return Err(HyperError::MalformedHyperedge(
                        "clique",
                        format!("{v} vertices, {} edges", self.edges.len()),
                    ));
                }
            }
            HyperedgeKind::Cycle => {
                let ok = self.edges.len() == v
                    && v >= 3
                    && mask_to_vec(vmask)
                        .iter()
                        .all(|&w| self.edges.iter().filter(|e| e.touches(w)).count() == 2)
                    && self.is_connected();
                if !ok {
                    return Err(HyperError::MalformedHyperedge(
                        "cycle",
                        format!("{v} vertices, {} edges", self.edges.len()),
                    ));
                }
            }
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let verts = mask_to_vec(self.vertex_mask());
        if verts.is_empty() {
            return true;
        }
        let mut seen = 0u64;
        let mut stack = vec![verts[0]];
        seen |= 1 << verts[0];
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                if e.touches(v) {
                    let w = e.other_end(v);
                    if seen & (1 << w) == 0 {
                        seen |= 1 << w;
                        stack.push(w);
                    }
                }
            }
        }
        seen.count_ones() as usize == verts.len()
    }

    pub fn kind(&self) -> HyperedgeKind {
        self.kind
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    pub fn vertex_mask(&self) -> u64 {
        self.edges
            .iter()
            .fold(0u64, |m, e| m | (1 << e.u()) | (1 << e.v()))
    }

    pub fn as_subgraph(&self) -> Subgraph {
        Subgraph::from_edges(self.edges.iter().cloned())
    }

    /// Edges shared with another hyperedge.
    pub fn edge_intersection(&self, other: &Hyperedge) -> Vec<Edge> {
        self.edges
            .iter()
            .filter(|e| other.contains_edge(e))
            .cloned()
            .collect()
    }
}

/// A typed hypergraph over the edge set of a host graph, hyperedges kept
/// sorted by (kind, edge list) so positions are stable ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    host: Graph,
    hyperedges: Vec<Hyperedge>,
}

impl Hypergraph {
    pub fn new(host: Graph, mut hyperedges: Vec<Hyperedge>) -> Result<Hypergraph, HyperError> {
        for he in &hyperedges {
            for e in he.edges() {
                if !host.has_edge(e.u(), e.v()) {
                    return Err(HyperError::EdgeNotInHost(*e));
                }
            }
        }
        hyperedges.sort();
        hyperedges.dedup();
        Ok(Hypergraph { host, hyperedges })
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn hyperedges(&self) -> &[Hyperedge] {
        &self.hyperedges
    }

    pub fn len(&self) -> usize {
        self.hyperedges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperedges.is_empty()
    }

    pub fn cliques(&self) -> impl Iterator<Item = &Hyperedge> {
        self.hyperedges
            .iter()
            .filter(|h| h.kind() == HyperedgeKind::Clique)
    }

    pub fn cycles(&self) -> impl Iterator<Item = &Hyperedge> {
        self.hyperedges
            .iter()
            .filter(|h| h.kind() == HyperedgeKind::Cycle)
    }

    /// The hypervertex set: every host edge used by some hyperedge.
    pub fn hypervertices(&self) -> BTreeSet<Edge> {
        self.hyperedges
            .iter()
            .flat_map(|h| h.edges().iter().cloned())
            .collect()
    }

    /// Union of all hyperedges, as a labelled subgraph of the host.
    pub fn underlying(&self) -> Subgraph {
        let mut s = Subgraph::empty();
        for he in &self.hyperedges {
            for e in he.edges() {
                s.insert_edge(*e);
            }
        }
        s
    }

    pub fn contains_hyperedge(&self, he: &Hyperedge) -> bool {
        self.hyperedges.binary_search(he).is_ok()
    }

    /// Is every hyperedge of `other` also one of ours?
    pub fn contains_all_of(&self, other: &Hypergraph) -> bool {
        other.hyperedges.iter().all(|h| self.contains_hyperedge(h))
    }

    pub fn without_hyperedge(&self, idx: usize) -> Hypergraph {
        let mut hs = self.hyperedges.clone();
        hs.remove(idx);
        Hypergraph {
            host: self.host.clone(),
            hyperedges: hs,
        }
    }

    /// Drop every hyperedge using the host edge `e`.
    pub fn without_hypervertex(&self, e: &Edge) -> Hypergraph {
        Hypergraph {
            host: self.host.clone(),
            hyperedges: self
                .hyperedges
                .iter()
                .filter(|h| !h.contains_edge(e))
                .cloned()
                .collect(),
        }
    }

    /// Rename every vertex by `perm` (a bijection on 0..n), host and
    /// hyperedges alike.
    pub fn relabel(&self, perm: &[usize]) -> Hypergraph {
        let host = self.host.relabel(perm);
        let hyperedges = self
            .hyperedges
            .iter()
            .map(|he| {
                let edges = he
                    .edges()
                    .iter()
                    .map(|e| Edge::new(perm[e.u()], perm[e.v()]))
                    .collect();
                Hyperedge::new(he.kind(), edges).expect("renaming keeps the shape")
            })
            .collect();
        Hypergraph::new(host, hyperedges).expect("renaming keeps containment")
    }

    pub fn with_hyperedges(&self, extra: &[Hyperedge]) -> Hypergraph {
        let mut hs = self.hyperedges.clone();
        for he in extra {
            if !self.contains_hyperedge(he) {
                hs.push(he.clone());
            }
        }
        hs.sort();
        hs.dedup();
        Hypergraph {
            host: self.host.clone(),
            hyperedges: hs,
        }
    }

    /// Same host, only the given hyperedges.
    pub fn restricted_to<'a, I: IntoIterator<Item = &'a Hyperedge>>(&self, keep: I) -> Hypergraph {
        let mut hs: Vec<Hyperedge> = keep.into_iter().cloned().collect();
        hs.sort();
        hs.dedup();
        Hypergraph {
            host: self.host.clone(),
            hyperedges: hs,
        }
    }

    pub fn to_json(&self) -> HypergraphJson {
        HypergraphJson {
            schema_version: SCHEMA_VERSION,
            n: Some(self.host.n()),
            hyperedges: self
                .hyperedges
                .iter()
                .map(|h| HyperedgeJson {
                    kind: h.kind().as_str().to_string(),
                    edges: h.edges().iter().map(|e| [e.u(), e.v()]).collect(),
                })
                .collect(),
        }
    }

    /// Rebuild from the serialized form. The host becomes the union of the
    /// hyperedges (plus isolated vertices up to `n` when given): the dump
    /// does not carry host edges outside every hyperedge.
    pub fn from_json(json: &HypergraphJson) -> Result<Hypergraph, HyperError> {
        let mut hyperedges = Vec::with_capacity(json.hyperedges.len());
        let mut max_v = 0usize;
        for hj in &json.hyperedges {
            let kind = match hj.kind.as_str() {
                "clique" => HyperedgeKind::Clique,
                "cycle" => HyperedgeKind::Cycle,
                other => return Err(HyperError::UnknownKind(other.to_string())),
            };
            let mut edges = Vec::with_capacity(hj.edges.len());
            for &[u, v] in &hj.edges {
                if u >= v {
                    return Err(HyperError::BadEdgePair(u, v));
                }
                max_v = max_v.max(v);
                edges.push(Edge::new(u, v));
            }
            hyperedges.push(Hyperedge::new(kind, edges)?);
        }
        let n = json.n.unwrap_or(0).max(if json.hyperedges.is_empty() {
            0
        } else {
            max_v + 1
        });
        let mut host = Graph::new(n).map_err(|_| HyperError::BadEdgePair(max_v, max_v))?;
        for he in &hyperedges {
            for e in he.edges() {
                if !host.has_edge(e.u(), e.v()) {
                    host.add_edge(e.u(), e.v()).expect("checked above");
                }
            }
        }
        Hypergraph::new(host, hyperedges)
    }
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypergraphJson {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub hyperedges: Vec<HyperedgeJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperedgeJson {
    pub kind: String,
    pub edges: Vec<[usize; 2]>,
}

/// All r-cliques of `g` as ascending vertex lists, emitted in lexicographic
/// order of the vertex set.
pub fn enum_cliques(g: &Graph, r: usize) -> Vec<Vec<usize>> {
    assert!(r >= 2, "cliques below K_2 are not meaningful here");
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(r);
    fn above(v: usize) -> u64 {
        if v >= 63 {
            0
        } else {
            u64::MAX << (v + 1)
        }
    }
    fn rec(g: &Graph, r: usize, current: &mut Vec<usize>, cand: u64, out: &mut Vec<Vec<usize>>) {
        if current.len() == r {
            out.push(current.clone());
            return;
        }
        if (cand.count_ones() as usize) < r - current.len() {
            return;
        }
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            current.push(v);
            rec(g, r, current, cand & g.neighbours(v) & above(v), out);
            current.pop();
        }
    }
    for v in 0..g.n() {
        current.push(v);
        rec(g, r, &mut current, g.neighbours(v) & above(v), &mut out);
        current.pop();
    }
    out
}

/// All ell-cycles of `g`, each exactly once, as vertex sequences starting at
/// the cycle's smallest vertex with the smaller neighbour second.
pub fn enum_cycles(g: &Graph, ell: usize) -> Vec<Vec<usize>> {
    assert!(ell >= 3, "cycles need length at least 3");
    let mut out = Vec::new();
    let n = g.n();
    let mut path = Vec::with_capacity(ell);
    fn rec(
        g: &Graph,
        ell: usize,
        start: usize,
        path: &mut Vec<usize>,
        used: u64,
        out: &mut Vec<Vec<usize>>,
    ) {
        if path.len() == ell {
            if g.has_edge(path[ell - 1], start) && path[1] < path[ell - 1] {
                out.push(path.clone());
            }
            return;
        }
        let last = *path.last().unwrap();
        let above_start = if start >= 63 { 0 } else { u64::MAX << (start + 1) };
        let mut cand = g.neighbours(last) & above_start & !used;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            path.push(v);
            rec(g, ell, start, path, used | (1 << v), out);
            path.pop();
        }
    }
    for s in 0..n {
        path.clear();
        path.push(s);
        rec(g, ell, s, &mut path, 1 << s, &mut out);
    }
    out
}

/// The Ramsey hypergraph of `g` for the pair (K_r, C_ell): one type-1
/// hyperedge per r-clique, one type-2 hyperedge per ell-cycle.
pub fn build_hypergraph(g: &Graph, pp: &PairParams) -> Hypergraph {
    let mut hyperedges = Vec::new();
    for cl in enum_cliques(g, pp.r()) {
        hyperedges.push(Hyperedge::clique_from_vertices(&cl));
    }
    for cy in enum_cycles(g, pp.ell()) {
        hyperedges.push(Hyperedge::cycle_from_vertices(&cy));
    }
    Hypergraph::new(g.clone(), hyperedges).expect("enumerated subgraphs live in the host")
}

pub fn underlying_graph(h: &Hypergraph) -> Subgraph {
    h.underlying()
}
