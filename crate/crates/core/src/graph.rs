//! Small labelled graphs stored as bitset adjacency rows.
//!
//! Hosts are capped at 64 vertices so a neighbourhood is a single `u64` and
//! subset arithmetic stays branch-free. That cap covers everything this crate
//! does at desk scale; the constructors enforce it.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph supports at most {MAX_VERTICES} vertices, got {0}")]
    TooManyVertices(usize),
    #[error("vertex {v} out of range for a graph on {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),
    #[error("duplicate edge {u} {v}")]
    DuplicateEdge { u: usize, v: usize },
    #[error("vertex {vertex} has degree {degree}, below the required minimum {min}")]
    DegreeBelowMin {
        vertex: usize,
        degree: usize,
        min: usize,
    },
}

/// An unordered pair of distinct vertices, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    u: usize,
    v: usize,
}

impl Edge {
    pub fn new(a: usize, b: usize) -> Edge {
        assert!(a != b, "edge endpoints must differ");
        Edge {
            u: a.min(b),
            v: a.max(b),
        }
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    pub fn touches(&self, w: usize) -> bool {
        self.u == w || self.v == w
    }

    pub fn other_end(&self, w: usize) -> usize {
        debug_assert!(self.touches(w));
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.u, self.v)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

impl Graph {
    pub fn new(n: usize) -> Result<Graph, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        Ok(Graph {
            n,
            adj: vec![0; n],
        })
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n).expect("complete graph too large");
        for u in 0..n {
            for v in (u + 1)..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    /// The cycle 0-1-...-(n-1)-0, n >= 3.
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        let mut g = Graph::new(n).expect("cycle too large");
        for v in 0..n {
            g.add_edge(v, (v + 1) % n).unwrap();
        }
        g
    }

    pub fn from_edges(n: usize, pairs: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut g = Graph::new(n)?;
        for &(u, v) in pairs {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { v, n: self.n })
        }
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if self.has_edge(a, b) {
            return Err(GraphError::DuplicateEdge {
                u: a.min(b),
                v: a.max(b),
            });
        }
        self.adj[a] |= 1 << b;
        self.adj[b] |= 1 << a;
        Ok(())
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.adj[a] & (1 << b) != 0
    }

    pub fn neighbours(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    /// Degree of `v` into the vertex set `mask` (`v` itself never counts).
    pub fn restricted_degree(&self, v: usize, mask: u64) -> usize {
        (self.adj[v] & mask).count_ones() as usize
    }

    pub fn ecount(&self) -> usize {
        self.adj.iter().map(|row| row.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.ecount());
        for u in 0..self.n {
            let mut rest = self.adj[u] & !((1u64 << u) | ((1u64 << u) - 1));
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                out.push(Edge { u, v });
            }
        }
        out
    }

    /// Number of edges with both endpoints inside `mask`.
    pub fn edges_within(&self, mask: u64) -> usize {
        let mut total = 0usize;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            total += (self.adj[v] & mask).count_ones() as usize;
        }
        total / 2
    }

    /// Image of the graph under `perm`, where `perm[v]` is the new name of `v`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        let mut g = Graph::new(self.n).unwrap();
        for e in self.edges() {
            g.add_edge(perm[e.u], perm[e.v]).unwrap();
        }
        g
    }

    /// Induced subgraph on `mask`, keeping original vertex names.
    pub fn induced(&self, mask: u64) -> Subgraph {
        let mut s = Subgraph::empty();
        let mut rest = mask & self.vertex_mask();
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            s.insert_vertex(v);
            let mut nb = self.adj[v] & mask & !((1u64 << v) | ((1u64 << v) - 1));
            while nb != 0 {
                let w = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                s.insert_edge(Edge::new(v, w));
            }
        }
        s
    }

    pub fn as_subgraph(&self) -> Subgraph {
        self.induced(self.vertex_mask())
    }
}

/// Partition of V(G) by degree relative to a threshold r:
/// `a` holds the vertices of degree exactly r, `b` those of degree above r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexPartitionAB {
    pub a: u64,
    pub b: u64,
}

impl VertexPartitionAB {
    pub fn a_vertices(&self) -> Vec<usize> {
        mask_to_vec(self.a)
    }

    pub fn b_vertices(&self) -> Vec<usize> {
        mask_to_vec(self.b)
    }
}

pub fn mask_to_vec(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

/// Split V(G) into A = {v : d(v) = r} and B = {v : d(v) > r}.
/// Any vertex of degree below r is an error naming that vertex.
pub fn partition_ab(g: &Graph, r: usize) -> Result<VertexPartitionAB, GraphError> {
    let mut a = 0u64;
    let mut b = 0u64;
    for v in 0..g.n() {
        let d = g.degree(v);
        if d < r {
            return Err(GraphError::DegreeBelowMin {
                vertex: v,
                degree: d,
                min: r,
            });
        } else if d == r {
            a |= 1 << v;
        } else {
            b |= 1 << v;
        }
    }
    Ok(VertexPartitionAB { a, b })
}

/// A labelled subgraph of some host: a vertex set plus an edge set over it.
/// Isolated vertices are representable, which the lambda calculus needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    verts: u64,
    edges: BTreeSet<Edge>,
}

impl Subgraph {
    pub fn empty() -> Subgraph {
        Subgraph {
            verts: 0,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges<I: IntoIterator<Item = Edge>>(edges: I) -> Subgraph {
        let mut s = Subgraph::empty();
        for e in edges {
            s.insert_edge(e);
        }
        s
    }

    pub fn insert_vertex(&mut self, v: usize) {
        debug_assert!(v < MAX_VERTICES);
        self.verts |= 1 << v;
    }

    pub fn insert_edge(&mut self, e: Edge) {
        self.verts |= (1 << e.u) | (1 << e.v);
        self.edges.insert(e);
    }

    pub fn vcount(&self) -> usize {
        self.verts.count_ones() as usize
    }

    pub fn ecount(&self) -> usize {
        self.edges.len()
    }

    pub fn verts_mask(&self) -> u64 {
        self.verts
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.verts & (1 << v) != 0
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter()
    }

    pub fn edge_set(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn vertices(&self) -> Vec<usize> {
        mask_to_vec(self.verts)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.touches(v)).count()
    }

    pub fn union(&self, other: &Subgraph) -> Subgraph {
        Subgraph {
            verts: self.verts | other.verts,
            edges: self.edges.union(&other.edges).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &Subgraph) -> Subgraph {
        Subgraph {
            verts: self.verts & other.verts,
            edges: self.edges.intersection(&other.edges).cloned().collect(),
        }
    }

    pub fn is_contained_in(&self, other: &Subgraph) -> bool {
        self.verts & !other.verts == 0 && self.edges.is_subset(&other.edges)
    }

    /// Drop the vertices in `mask` (they must be isolated here) keeping edges.
    pub fn without_isolated(&self, mask: u64) -> Subgraph {
        let s = Subgraph {
            verts: self.verts & !mask,
            edges: self.edges.clone(),
        };
        debug_assert!(s.edges.iter().all(|e| {
            s.contains_vertex(e.u) && s.contains_vertex(e.v)
        }));
        s
    }

    /// Standalone copy with vertices renamed to 0..v, preserving relative
    /// order. Returns the graph and the map from new id to original vertex.
    pub fn to_compact_graph(&self) -> (Graph, Vec<usize>) {
        let verts = self.vertices();
        let mut g = Graph::new(verts.len()).expect("subgraph too large");
        let pos = |v: usize| verts.binary_search(&v).unwrap();
        for e in &self.edges {
            g.add_edge(pos(e.u), pos(e.v)).unwrap();
        }
        (g, verts)
    }
}

pub fn subgraph_union(a: &Subgraph, b: &Subgraph) -> Subgraph {
    a.union(b)
}

pub fn subgraph_intersection(a: &Subgraph, b: &Subgraph) -> Subgraph {
    a.intersection(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_on_k4() {
        let g = Graph::complete(4);
        for v in 0..4 {
            assert_eq!(g.degree(v), 3);
        }
        assert_eq!(g.ecount(), 6);
    }

    #[test]
    fn restricted_degree_cases() {
        let g = Graph::cycle(5);
        // N(0) = {1, 4}; only 1 lies in {1,2,3}.
        assert_eq!(g.restricted_degree(0, 0b01110), 1);
        assert_eq!(g.restricted_degree(0, 0), 0);
        assert_eq!(g.restricted_degree(0, g.vertex_mask()), 2);
    }

    #[test]
    fn add_edge_rejects_bad_input() {
        let mut g = Graph::new(3).unwrap();
        assert_eq!(g.add_edge(0, 0), Err(GraphError::SelfLoop(0)));
        assert_eq!(
            g.add_edge(0, 5),
            Err(GraphError::VertexOutOfRange { v: 5, n: 3 })
        );
        g.add_edge(2, 1).unwrap();
        assert_eq!(g.add_edge(1, 2), Err(GraphError::DuplicateEdge { u: 1, v: 2 }));
        assert!(Graph::new(65).is_err());
    }

    #[test]
    fn edges_are_lexicographic() {
        let g = Graph::from_edges(4, &[(2, 3), (0, 3), (0, 1)]).unwrap();
        let es = g.edges();
        assert_eq!(
            es,
            vec![Edge::new(0, 1), Edge::new(0, 3), Edge::new(2, 3)]
        );
    }

    #[test]
    fn subgraph_union_intersection() {
        // Two K4's sharing the edge {0,1}.
        let mut f1 = Subgraph::empty();
        let mut f2 = Subgraph::empty();
        for verts in [[0usize, 1, 2, 3], [0, 1, 4, 5]] {
            let s = if verts[2] == 2 { &mut f1 } else { &mut f2 };
            for i in 0..4 {
                for j in (i + 1)..4 {
                    s.insert_edge(Edge::new(verts[i], verts[j]));
                }
            }
        }
        let inter = f1.intersection(&f2);
        assert_eq!(inter.vcount(), 2);
        assert_eq!(inter.ecount(), 1);
        let uni = f1.union(&f2);
        assert_eq!(uni.vcount(), 6);
        assert_eq!(uni.ecount(), 11);
        // Inclusion-exclusion.
        assert_eq!(
            uni.vcount() + inter.vcount(),
            f1.vcount() + f2.vcount()
        );
        assert_eq!(
            uni.ecount() + inter.ecount(),
            f1.ecount() + f2.ecount()
        );
        // Idempotence.
        assert_eq!(f1.union(&f1), f1);
        assert_eq!(f1.intersection(&f1), f1);
    }

    #[test]
    fn disjoint_intersection_is_empty() {
        let a = Subgraph::from_edges([Edge::new(0, 1)]);
        let b = Subgraph::from_edges([Edge::new(2, 3)]);
        let i = a.intersection(&b);
        assert_eq!(i.vcount(), 0);
        assert_eq!(i.ecount(), 0);
    }

    #[test]
    fn intersection_can_have_isolated_vertices() {
        // Triangles 0-1-2 and 0-2-3 intersect in vertices {0,2} plus edge {0,2};
        // triangles 0-1-2 and 1-3-4... use a case where a shared vertex has no shared edge.
        let a = Subgraph::from_edges([Edge::new(0, 1), Edge::new(1, 2), Edge::new(0, 2)]);
        let b = Subgraph::from_edges([Edge::new(1, 3), Edge::new(3, 4), Edge::new(1, 4)]);
        let i = a.intersection(&b);
        assert_eq!(i.vcount(), 1);
        assert_eq!(i.ecount(), 0);
        assert!(i.contains_vertex(1));
    }

    #[test]
    fn partition_ab_cases() {
        // K5 with r = 4: every vertex has degree exactly 4.
        let p = partition_ab(&Graph::complete(5), 4).unwrap();
        assert_eq!(p.a_vertices(), vec![0, 1, 2, 3, 4]);
        assert!(p.b_vertices().is_empty());

        // K6 with r = 4: every vertex in B.
        let p = partition_ab(&Graph::complete(6), 4).unwrap();
        assert!(p.a_vertices().is_empty());
        assert_eq!(p.b_vertices().len(), 6);

        // K5 plus a pendant vertex: error names the pendant.
        let mut g = Graph::new(6).unwrap();
        for u in 0..5 {
            for v in (u + 1)..5 {
                g.add_edge(u, v).unwrap();
            }
        }
        g.add_edge(0, 5).unwrap();
        match partition_ab(&g, 4) {
            Err(GraphError::DegreeBelowMin { vertex, degree, min }) => {
                assert_eq!((vertex, degree, min), (5, 1, 4));
            }
            other => panic!("expected degree error, got {other:?}"),
        }
    }

    #[test]
    fn compact_graph_keeps_isolated_vertices() {
        let mut s = Subgraph::from_edges([Edge::new(3, 7)]);
        s.insert_vertex(5);
        let (g, names) = s.to_compact_graph();
        assert_eq!(g.n(), 3);
        assert_eq!(g.ecount(), 1);
        assert_eq!(names, vec![3, 5, 7]);
        assert!(g.has_edge(0, 2));
        assert_eq!(g.degree(1), 0);
    }
}
