//! Exact canonical forms for small graphs.
//!
//! Individualization-refinement search: refine an ordered partition to
//! equitability, branch on the first non-singleton cell, and keep the
//! lexicographically smallest adjacency code over all discrete leaves.
//! Discovered automorphisms prune branches whose target vertex lies in the
//! orbit of one already tried (under the stabilizer of the branch prefix),
//! which keeps highly symmetric graphs like cliques cheap. No hashing is
//! involved anywhere, so equal codes mean isomorphic, full stop.
//!
//! The anchored variant pins a sequence of vertices to the first canonical
//! positions, so two codes agree exactly when an isomorphism exists that
//! fixes the anchors pointwise in order. Edge labelling extension is built
//! on top of this.

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    /// `[n, anchors, packed upper-triangle adjacency bits]` under the
    /// canonical vertex order.
    pub code: Vec<u8>,
    /// `position[v]` is the canonical position of original vertex `v`.
    pub position: Vec<usize>,
}

pub fn canonical_form(g: &Graph) -> CanonicalForm {
    anchored_canonical_form(g, &[])
}

pub fn canonical_code(g: &Graph) -> Vec<u8> {
    canonical_form(g).code
}

/// Canonical form among orderings that place `anchors` first, in the given
/// order. Anchors must be distinct vertices of `g`.
pub fn anchored_canonical_form(g: &Graph, anchors: &[usize]) -> CanonicalForm {
    let n = g.n();
    for &a in anchors {
        assert!(a < n, "anchor out of range");
    }
    {
        let mut seen = 0u64;
        for &a in anchors {
            assert!(seen & (1 << a) == 0, "duplicate anchor");
            seen |= 1 << a;
        }
    }
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut anchored = 0u64;
    for &a in anchors {
        cells.push(vec![a]);
        anchored |= 1 << a;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| anchored & (1 << v) == 0).collect();
    if !rest.is_empty() {
        cells.push(rest);
    }
    let mut search = Search {
        g,
        n,
        k: anchors.len(),
        best: None,
        autos: Vec::new(),
        path: Vec::new(),
    };
    search.run(cells);
    search.best.expect("search always yields a leaf")
}

pub fn anchored_canonical_code(g: &Graph, anchors: &[usize]) -> Vec<u8> {
    anchored_canonical_form(g, anchors).code
}

pub fn are_isomorphic(a: &Graph, b: &Graph) -> bool {
    a.n() == b.n() && a.ecount() == b.ecount() && canonical_code(a) == canonical_code(b)
}

struct Search<'a> {
    g: &'a Graph,
    n: usize,
    k: usize,
    best: Option<CanonicalForm>,
    /// Automorphism generators discovered so far, as `image[v]` maps.
    autos: Vec<Vec<usize>>,
    /// Vertices individualized along the current branch.
    path: Vec<usize>,
}

impl<'a> Search<'a> {
    fn run(&mut self, mut cells: Vec<Vec<usize>>) {
        refine(self.g, &mut cells);
        let target = cells.iter().position(|c| c.len() > 1);
        match target {
            None => {
                let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
                self.leaf(&order);
            }
            Some(ti) => {
                let candidates = cells[ti].clone();
                let mut tried: Vec<usize> = Vec::new();
                for &v in &candidates {
                    if !tried.is_empty() && self.in_tried_orbit(&tried, v) {
                        continue;
                    }
                    tried.push(v);
                    let mut child = Vec::with_capacity(cells.len() + 1);
                    for (i, c) in cells.iter().enumerate() {
                        if i == ti {
                            child.push(vec![v]);
                            child.push(c.iter().cloned().filter(|&w| w != v).collect());
                        } else {
                            child.push(c.clone());
                        }
                    }
                    self.path.push(v);
                    self.run(child);
                    self.path.pop();
                }
            }
        }
    }

    /// Is `v` in the orbit of some already-tried vertex under the discovered
    /// automorphisms that fix the current branch prefix pointwise?
    fn in_tried_orbit(&self, tried: &[usize], v: usize) -> bool {
        let applicable: Vec<&Vec<usize>> = self
            .autos
            .iter()
            .filter(|a| self.path.iter().all(|&p| a[p] == p))
            .collect();
        if applicable.is_empty() {
            return false;
        }
        // Union-find over the applicable generators.
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = x;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        for a in applicable {
            for x in 0..self.n {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, a[x]));
                if rx != ry {
                    parent[rx] = ry;
                }
            }
        }
        let rv = find(&mut parent, v);
        tried.iter().any(|&t| find(&mut parent, t) == rv)
    }

    fn leaf(&mut self, order: &[usize]) {
        let code = encode(self.g, self.k, order);
        let improves = match &self.best {
            None => true,
            Some(b) => code < b.code,
        };
        if improves {
            self.best = Some(CanonicalForm {
                code,
                position: invert(order),
            });
            return;
        }
        if code == self.best.as_ref().unwrap().code {
            // Two orderings with identical codes compose to an automorphism:
            // the vertex at best-position i maps to the vertex at the same
            // position here.
            let best_pos = self.best.as_ref().unwrap().position.clone();
            let mut by_pos = vec![0usize; self.n];
            for (v, &p) in best_pos.iter().enumerate() {
                by_pos[p] = v;
            }
            let mut auto = vec![0usize; self.n];
            for (pos, &v) in order.iter().enumerate() {
                auto[by_pos[pos]] = v;
            }
            if auto.iter().enumerate().any(|(x, &y)| x != y) && !self.autos.contains(&auto) {
                self.autos.push(auto);
            }
        }
    }
}

fn invert(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0usize; order.len()];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    pos
}

fn encode(g: &Graph, anchors: usize, order: &[usize]) -> Vec<u8> {
    let n = order.len();
    let mut code = Vec::with_capacity(2 + (n * n / 2 + 7) / 8);
    code.push(n as u8);
    code.push(anchors as u8);
    let mut acc: u8 = 0;
    let mut bits = 0u32;
    for i in 0..n {
        for j in (i + 1)..n {
            acc <<= 1;
            if g.has_edge(order[i], order[j]) {
                acc |= 1;
            }
            bits += 1;
            if bits == 8 {
                code.push(acc);
                acc = 0;
                bits = 0;
            }
        }
    }
    if bits > 0 {
        code.push(acc << (8 - bits));
    }
    code
}

/// Refine an ordered partition to equitability: repeatedly split cells by the
/// vector of neighbour counts into every cell. Sub-cells are ordered by that
/// vector, which is label-invariant, so refinement commutes with isomorphism.
fn refine(g: &Graph, cells: &mut Vec<Vec<usize>>) {
    loop {
        let masks: Vec<u64> = cells
            .iter()
            .map(|c| c.iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect();
        let mut split_at = None;
        for (ci, cell) in cells.iter().enumerate() {
            if cell.len() <= 1 {
                continue;
            }
            let mut keyed: Vec<(Vec<u32>, usize)> = cell
                .iter()
                .map(|&v| {
                    let key: Vec<u32> = masks
                        .iter()
                        .map(|&m| (g.neighbours(v) & m).count_ones())
                        .collect();
                    (key, v)
                })
                .collect();
            let first = keyed[0].0.clone();
            if keyed.iter().any(|(k, _)| *k != first) {
                keyed.sort();
                let mut subcells: Vec<Vec<usize>> = Vec::new();
                let mut cur_key: Option<&Vec<u32>> = None;
                for (k, v) in &keyed {
                    if cur_key != Some(k) {
                        subcells.push(Vec::new());
                        cur_key = Some(k);
                    }
                    subcells.last_mut().unwrap().push(*v);
                }
                for sc in subcells.iter_mut() {
                    sc.sort();
                }
                split_at = Some((ci, subcells));
                break;
            }
        }
        match split_at {
            None => return,
            Some((ci, subcells)) => {
                cells.splice(ci..=ci, subcells);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn perms(n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![];
        let mut cur: Vec<usize> = (0..n).collect();
        fn rec(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k == cur.len() {
                out.push(cur.clone());
                return;
            }
            for i in k..cur.len() {
                cur.swap(k, i);
                rec(k + 1, cur, out);
                cur.swap(k, i);
            }
        }
        rec(0, &mut cur, &mut out);
        out
    }

    fn brute_isomorphic(a: &Graph, b: &Graph) -> bool {
        if a.n() != b.n() || a.ecount() != b.ecount() {
            return false;
        }
        'outer: for p in perms(a.n()) {
            for e in a.edges() {
                if !b.has_edge(p[e.u()], p[e.v()]) {
                    continue 'outer;
                }
            }
            return true;
        }
        false
    }

    #[test]
    fn c4_differs_from_p4() {
        let c4 = Graph::cycle(4);
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_ne!(canonical_code(&c4), canonical_code(&p4));
        assert!(!are_isomorphic(&c4, &p4));
    }

    #[test]
    fn c5_relabel_same_code() {
        let c5 = Graph::cycle(5);
        let rel = c5.relabel(&[2, 4, 0, 3, 1]);
        assert_eq!(canonical_code(&c5), canonical_code(&rel));
        assert!(are_isomorphic(&c5, &rel));
    }

    #[test]
    fn k33_differs_from_k3_prism() {
        // K_{3,3} vs the triangular prism K3 x K2: both 3-regular on 6 vertices.
        let k33 = Graph::from_edges(
            6,
            &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
        )
        .unwrap();
        let prism = Graph::from_edges(
            6,
            &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)],
        )
        .unwrap();
        assert!(!are_isomorphic(&k33, &prism));
        assert!(!brute_isomorphic(&k33, &prism));
    }

    #[test]
    fn cliques_are_cheap_despite_symmetry() {
        let k12 = Graph::complete(12);
        let code = canonical_code(&k12);
        let rel = k12.relabel(&[5, 3, 11, 0, 7, 2, 9, 1, 10, 4, 8, 6]);
        assert_eq!(code, canonical_code(&rel));
    }

    #[test]
    fn petersen_relabel_invariance() {
        let petersen = Graph::from_edges(
            10,
            &[
                (0, 1), (1, 2), (2, 3), (3, 4), (0, 4),
                (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
                (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
            ],
        )
        .unwrap();
        let perm = [3, 8, 1, 0, 9, 4, 6, 2, 7, 5];
        assert!(are_isomorphic(&petersen, &petersen.relabel(&perm)));
    }

    #[test]
    fn exhaustive_iso_agreement_small() {
        // Every graph on 4 vertices against every other: canonical codes agree
        // exactly when a brute-force permutation search finds an isomorphism.
        let n = 4;
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect();
        let mut graphs = vec![];
        for mask in 0..(1u32 << pairs.len()) {
            let chosen: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| p)
                .collect();
            graphs.push(Graph::from_edges(n, &chosen).unwrap());
        }
        let codes: Vec<Vec<u8>> = graphs.iter().map(canonical_code).collect();
        for i in 0..graphs.len() {
            for j in (i + 1)..graphs.len() {
                assert_eq!(
                    codes[i] == codes[j],
                    brute_isomorphic(&graphs[i], &graphs[j]),
                    "mismatch on masks {i} vs {j}"
                );
            }
        }
    }

    #[test]
    fn anchored_single_edge() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let c01 = anchored_canonical_code(&g, &[0, 1]);
        let c10 = anchored_canonical_code(&g, &[1, 0]);
        // A single edge is symmetric, so both anchor orders give one code.
        assert_eq!(c01, c10);
    }

    #[test]
    fn anchored_detects_asymmetric_attachment() {
        // Path 0-1-2 anchored at 0 vs anchored at 1: genuinely different.
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_ne!(
            anchored_canonical_code(&p3, &[0]),
            anchored_canonical_code(&p3, &[1])
        );
    }

    #[test]
    fn anchored_k4_automorphism() {
        // K4 anchored at any two vertices gives the same code: an
        // automorphism maps any ordered pair to any other.
        let k4 = Graph::complete(4);
        let base = anchored_canonical_code(&k4, &[0, 1]);
        assert_eq!(base, anchored_canonical_code(&k4, &[2, 3]));
        assert_eq!(base, anchored_canonical_code(&k4, &[3, 0]));
    }

    #[test]
    fn anchored_agrees_with_fixed_point_permutation_search() {
        // A triangle hung on anchor 0 with a pendant at anchor 1, versus the
        // mirror image with the anchors' roles swapped. Isomorphic as plain
        // graphs, but no isomorphism fixes both anchors; exhaust all
        // anchor-fixing permutations to confirm, then check the codes differ.
        let a = Graph::from_edges(4, &[(0, 2), (0, 3), (2, 3), (1, 2)]).unwrap();
        let b = Graph::from_edges(4, &[(1, 2), (1, 3), (2, 3), (0, 2)]).unwrap();
        let mut anchored_iso = false;
        'outer: for p in perms(4) {
            if p[0] != 0 || p[1] != 1 {
                continue;
            }
            for e in a.edges() {
                if !b.has_edge(p[e.u()], p[e.v()]) {
                    continue 'outer;
                }
            }
            anchored_iso = true;
            break;
        }
        assert!(!anchored_iso);
        assert_ne!(
            anchored_canonical_code(&a, &[0, 1]),
            anchored_canonical_code(&b, &[0, 1])
        );
        // Without anchors they ARE isomorphic, and the codes agree.
        assert!(are_isomorphic(&a, &b));
    }

    #[test]
    fn empty_and_tiny_graphs() {
        let e0 = Graph::new(0).unwrap();
        let e1 = Graph::new(1).unwrap();
        assert_eq!(canonical_code(&e0), vec![0, 0]);
        assert_ne!(canonical_code(&e0), canonical_code(&e1));
    }
}
