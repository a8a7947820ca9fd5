//! Second, independently coded arrow decision for (clique, cycle) pairs.
//!
//! Works straight on the graph: edges are colored in lexicographic order by
//! plain backtracking, and a color is admissible only if it does not close a
//! color-1 clique on r vertices or a color-2 cycle of length ell through the
//! edge being colored. No hypergraph is built and nothing is propagated, so
//! this path shares no search machinery with the main solver.

use crate::graph::{Edge, Graph};
use crate::solver::{ArrowDecision, ArrowOutcome, ColoringWitness, SearchStats};

struct DirectSearch {
    edges: Vec<Edge>,
    red: Vec<u64>,
    blue: Vec<u64>,
    color: Vec<u8>,
    r: usize,
    ell: usize,
    nodes: u64,
    budget: u64,
}

impl DirectSearch {
    // Looks for `need` pairwise red-adjacent vertices inside cand, scanning
    // candidates in increasing order so each set is built once.
    fn has_red_clique(&self, cand: u64, need: usize) -> bool {
        if need == 0 {
            return true;
        }
        let mut c = cand;
        while (c.count_ones() as usize) >= need {
            let w = c.trailing_zeros() as usize;
            c &= c - 1;
            if self.has_red_clique(c & self.red[w], need - 1) {
                return true;
            }
        }
        false
    }

    fn completes_red_clique(&self, u: usize, v: usize) -> bool {
        self.has_red_clique(self.red[u] & self.red[v], self.r - 2)
    }

    // Blue path with exactly `left` edges from `from` to `target`, avoiding
    // the vertices in `used`. The closing edge of the would-be cycle is the
    // edge under trial, which is not in the blue sets yet.
    fn blue_path(&self, from: usize, target: usize, left: usize, used: u64) -> bool {
        if left == 1 {
            return (self.blue[from] >> target) & 1 == 1;
        }
        let mut c = self.blue[from] & !used & !(1 << target);
        while c != 0 {
            let w = c.trailing_zeros() as usize;
            c &= c - 1;
            if self.blue_path(w, target, left - 1, used | (1 << w)) {
                return true;
            }
        }
        false
    }

    fn completes_blue_cycle(&self, u: usize, v: usize) -> bool {
        self.blue_path(u, v, self.ell - 1, 1 << u)
    }

    // Ok(true): full admissible coloring found. Err(()): budget exhausted.
    fn solve(&mut self, k: usize) -> Result<bool, ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        if k == self.edges.len() {
            return Ok(true);
        }
        let (u, v) = self.edges[k].endpoints();
        // Color 1 first, the reverse of the main solver's order.
        if !self.completes_red_clique(u, v) {
            self.red[u] |= 1 << v;
            self.red[v] |= 1 << u;
            self.color[k] = 1;
            if self.solve(k + 1)? {
                return Ok(true);
            }
            self.red[u] &= !(1 << v);
            self.red[v] &= !(1 << u);
        }
        if !self.completes_blue_cycle(u, v) {
            self.blue[u] |= 1 << v;
            self.blue[v] |= 1 << u;
            self.color[k] = 2;
            if self.solve(k + 1)? {
                return Ok(true);
            }
            self.blue[u] &= !(1 << v);
            self.blue[v] &= !(1 << u);
        }
        self.color[k] = 0;
        Ok(false)
    }
}

/// Decides the graph-level arrow for (r-clique, ell-cycle) without going
/// through the hypergraph encoding. The budget counts search tree nodes.
pub fn arrow_graph_direct(g: &Graph, r: usize, ell: usize, budget: u64) -> ArrowDecision {
    assert!(r >= 3 && ell >= 3, "pair out of range");
    let mut s = DirectSearch {
        edges: g.edges(),
        red: vec![0; g.n()],
        blue: vec![0; g.n()],
        color: vec![0; g.ecount()],
        r,
        ell,
        nodes: 0,
        budget,
    };
    let outcome = match s.solve(0) {
        Err(()) => ArrowOutcome::BudgetExceeded,
        Ok(true) => {
            let colors = s.edges.iter().zip(&s.color).map(|(e, &c)| (*e, c)).collect();
            ArrowOutcome::NotRamsey(ColoringWitness { colors })
        }
        Ok(false) => ArrowOutcome::Ramsey,
    };
    ArrowDecision {
        outcome,
        stats: SearchStats {
            decisions: s.nodes,
            propagations: 0,
            conflicts: 0,
        },
    }
}
