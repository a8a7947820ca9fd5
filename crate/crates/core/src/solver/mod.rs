//! Exhaustive two-coloring search over clique/cycle hypergraphs.
//!
//! Color 1 is the clique color, color 2 the cycle color. A hypergraph
//! "arrows" when every total coloring of its hypervertices leaves some
//! type-1 hyperedge entirely in color 1 or some type-2 hyperedge entirely
//! in color 2. The search is DPLL-style: branch on the lowest uncolored
//! hypervertex, propagate hyperedges that are one vertex short of
//! monochromatic, backtrack on conflicts.

pub mod direct;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::densities::PairParams;
use crate::graph::{Edge, Graph};
use crate::hyper::{build_hypergraph, Hyperedge, HyperedgeKind, Hypergraph};

/// Default cap on propagation work per search.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Total coloring of the hypervertices witnessing a non-arrow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringWitness {
    pub colors: BTreeMap<Edge, u8>,
}

impl ColoringWitness {
    pub fn color(&self, e: &Edge) -> Option<u8> {
        self.colors.get(e).copied()
    }
}

/// Work counters for one search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArrowOutcome {
    Ramsey,
    NotRamsey(ColoringWitness),
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowDecision {
    pub outcome: ArrowOutcome,
    pub stats: SearchStats,
}

impl ArrowDecision {
    pub fn is_ramsey(&self) -> bool {
        matches!(self.outcome, ArrowOutcome::Ramsey)
    }

    pub fn decided(&self) -> bool {
        !matches!(self.outcome, ArrowOutcome::BudgetExceeded)
    }

    pub fn witness(&self) -> Option<&ColoringWitness> {
        match &self.outcome {
            ArrowOutcome::NotRamsey(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("hypervertex {0} has no color")]
    MissingHypervertex(Edge),
    #[error("hypervertex {e} has color {color}, expected 1 or 2")]
    BadColor { e: Edge, color: u8 },
    #[error("{} hyperedge #{index} is monochromatic in its own color", kind.as_str())]
    MonochromaticHyperedge { kind: HyperedgeKind, index: usize },
    #[error("witness colors edge {0} which is not an edge of the graph")]
    ForeignEdge(Edge),
    #[error("graph edge {0} has no color")]
    MissingEdge(Edge),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("search budget of {budget} propagation steps exhausted")]
    BudgetExceeded { budget: u64 },
    #[error("minimize needs an input that arrows; this one has a valid coloring")]
    NotRamseyInput,
}

/// Why a hypergraph fails the star-criticality test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarViolation {
    /// Hypervertex contained in no cycle hyperedge.
    UncoveredHypervertex { e: Edge },
    /// Cycle hyperedge (index into the hyperedge list) with a member met
    /// privately by no clique.
    NoPrivateClique { cycle_index: usize, e: Edge },
}

/// Result of the two-sided private-intersection check on a minimal hypergraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CritCheck {
    /// True when the hypergraph has no hyperedges at all, so the condition
    /// holds with nothing to check.
    pub vacuous: bool,
    pub violation: Option<CritViolation>,
}

impl CritCheck {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CritViolation {
    pub kind: HyperedgeKind,
    pub hyperedge_index: usize,
    pub e: Edge,
}

// Flat constraint tables: hypervertices indexed by their rank in edge order,
// hyperedges by their rank in the hypergraph's sorted hyperedge list.
struct Instance {
    verts: Vec<Edge>,
    own: Vec<u8>,
    size: Vec<u32>,
    members: Vec<Vec<u32>>,
    occ: Vec<Vec<u32>>,
}

impl Instance {
    fn build(h: &Hypergraph) -> Instance {
        let verts: Vec<Edge> = h.hypervertices().into_iter().collect();
        let index: BTreeMap<Edge, u32> = verts
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, i as u32))
            .collect();
        let m = h.hyperedges().len();
        let mut own = Vec::with_capacity(m);
        let mut size = Vec::with_capacity(m);
        let mut members = Vec::with_capacity(m);
        let mut occ = vec![Vec::new(); verts.len()];
        for (k, he) in h.hyperedges().iter().enumerate() {
            own.push(match he.kind() {
                HyperedgeKind::Clique => 1,
                HyperedgeKind::Cycle => 2,
            });
            let mem: Vec<u32> = he.edges().iter().map(|e| index[e]).collect();
            size.push(mem.len() as u32);
            for &v in &mem {
                occ[v as usize].push(k as u32);
            }
            members.push(mem);
        }
        Instance {
            verts,
            own,
            size,
            members,
            occ,
        }
    }
}

struct Decision {
    var: u32,
    trail_len: usize,
    flipped: bool,
}

struct Search<'a> {
    inst: &'a Instance,
    // 0 = unset. cnt[h][c] counts members of hyperedge h colored c.
    color: Vec<u8>,
    cnt: Vec<[u32; 3]>,
    trail: Vec<u32>,
    head: usize,
    decisions: Vec<Decision>,
    stats: SearchStats,
    budget: u64,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, budget: u64) -> Search<'a> {
        Search {
            inst,
            color: vec![0; inst.verts.len()],
            cnt: vec![[0; 3]; inst.own.len()],
            trail: Vec::with_capacity(inst.verts.len()),
            head: 0,
            decisions: Vec::new(),
            stats: SearchStats::default(),
            budget,
        }
    }

    // Counter updates live here and in unwind, and nowhere else, so the two
    // stay symmetric no matter where the propagation head is.
    fn assign(&mut self, var: u32, c: u8) -> bool {
        debug_assert_eq!(self.color[var as usize], 0);
        self.color[var as usize] = c;
        self.trail.push(var);
        let mut conflict = false;
        for &k in &self.inst.occ[var as usize] {
            let cnt = &mut self.cnt[k as usize];
            cnt[c as usize] += 1;
            if c == self.inst.own[k as usize] && cnt[c as usize] == self.inst.size[k as usize] {
                conflict = true;
            }
        }
        if conflict {
            self.stats.conflicts += 1;
        }
        conflict
    }

    fn unwind(&mut self, to: usize) {
        while self.trail.len() > to {
            let var = self.trail.pop().unwrap();
            let c = self.color[var as usize];
            self.color[var as usize] = 0;
            for &k in &self.inst.occ[var as usize] {
                self.cnt[k as usize][c as usize] -= 1;
            }
        }
        self.head = to;
    }

    // Processes newly colored hypervertices; forces the last member of any
    // hyperedge that is one short of monochromatic in its own color.
    // Returns Ok(true) on conflict, Err(()) when the budget runs out.
    fn propagate(&mut self) -> Result<bool, ()> {
        while self.head < self.trail.len() {
            let var = self.trail[self.head];
            self.head += 1;
            for idx in 0..self.inst.occ[var as usize].len() {
                let k = self.inst.occ[var as usize][idx] as usize;
                self.stats.propagations += 1;
                if self.stats.propagations > self.budget {
                    return Err(());
                }
                let own = self.inst.own[k];
                let other = 3 - own;
                let cnt = &self.cnt[k];
                if cnt[other as usize] == 0 && cnt[own as usize] + 1 == self.inst.size[k] {
                    let forced = self.inst.members[k]
                        .iter()
                        .copied()
                        .find(|&u| self.color[u as usize] == 0)
                        .expect("exactly one member uncolored");
                    if self.assign(forced, other) {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }

    fn first_uncolored(&self) -> Option<u32> {
        self.color.iter().position(|&c| c == 0).map(|i| i as u32)
    }

    fn witness(&self) -> ColoringWitness {
        let colors = self
            .inst
            .verts
            .iter()
            .zip(&self.color)
            .map(|(e, &c)| (*e, c))
            .collect();
        ColoringWitness { colors }
    }

    fn run(&mut self) -> ArrowOutcome {
        let mut conflict = false;
        loop {
            if conflict {
                conflict = false;
                let mut resolved = false;
                while let Some(dec) = self.decisions.pop() {
                    self.unwind(dec.trail_len);
                    if !dec.flipped {
                        self.decisions.push(Decision {
                            var: dec.var,
                            trail_len: dec.trail_len,
                            flipped: true,
                        });
                        conflict = self.assign(dec.var, 1);
                        resolved = true;
                        break;
                    }
                }
                if !resolved {
                    return ArrowOutcome::Ramsey;
                }
                continue;
            }
            match self.propagate() {
                Err(()) => return ArrowOutcome::BudgetExceeded,
                Ok(true) => {
                    conflict = true;
                    continue;
                }
                Ok(false) => {}
            }
            match self.first_uncolored() {
                None => return ArrowOutcome::NotRamsey(self.witness()),
                Some(var) => {
                    self.stats.decisions += 1;
                    self.decisions.push(Decision {
                        var,
                        trail_len: self.trail.len(),
                        flipped: false,
                    });
                    // Color 2 first: it can never complete a clique, the
                    // denser constraint. Pure heuristic, order only.
                    conflict = self.assign(var, 2);
                }
            }
        }
    }
}

/// Decides whether every total 2-coloring of the hypervertices leaves a
/// type-1 hyperedge all in color 1 or a type-2 hyperedge all in color 2.
pub fn arrow_hyper(h: &Hypergraph, budget: u64) -> ArrowDecision {
    arrow_hyper_forced(h, budget, &[])
}

// Same decision, but with a set of hypervertices pre-colored before the
// search starts. Only sound when every good coloring of h extends one that
// agrees with the forced prefix; minimize relies on this for removal
// re-tests. Forced pairs naming absent hypervertices are skipped.
fn arrow_hyper_forced(h: &Hypergraph, budget: u64, forced: &[(Edge, u8)]) -> ArrowDecision {
    let inst = Instance::build(h);
    let mut search = Search::new(&inst, budget);
    let mut outcome = None;
    for (e, c) in forced {
        let var = match inst.verts.binary_search(e) {
            Ok(i) => i as u32,
            Err(_) => continue,
        };
        if search.assign(var, *c) {
            outcome = Some(ArrowOutcome::Ramsey);
            break;
        }
    }
    let outcome = outcome.unwrap_or_else(|| search.run());
    if let ArrowOutcome::NotRamsey(w) = &outcome {
        // Independent of the search path: plain scan over all hyperedges.
        validate_witness(h, w).expect("search produced an invalid witness");
    }
    ArrowDecision {
        outcome,
        stats: search.stats,
    }
}

/// Re-checks a witness by direct enumeration over all hyperedges.
/// The witness may color a superset of the hypervertices.
pub fn validate_witness(h: &Hypergraph, w: &ColoringWitness) -> Result<(), WitnessError> {
    for e in h.hypervertices() {
        match w.color(&e) {
            None => return Err(WitnessError::MissingHypervertex(e)),
            Some(c) if c == 1 || c == 2 => {}
            Some(c) => return Err(WitnessError::BadColor { e, color: c }),
        }
    }
    for (index, he) in h.hyperedges().iter().enumerate() {
        let own = match he.kind() {
            HyperedgeKind::Clique => 1,
            HyperedgeKind::Cycle => 2,
        };
        if he.edges().iter().all(|e| w.color(e) == Some(own)) {
            return Err(WitnessError::MonochromaticHyperedge {
                kind: he.kind(),
                index,
            });
        }
    }
    Ok(())
}

/// Graph-level arrow for the pair (complete graph on r vertices, cycle of
/// length ell): builds the clique/cycle hypergraph and searches it. Edges
/// outside every hyperedge are unconstrained and get color 1 by convention.
pub fn arrow_graph(g: &Graph, pp: &PairParams, budget: u64) -> ArrowDecision {
    let h = build_hypergraph(g, pp);
    let mut dec = arrow_hyper(&h, budget);
    if let ArrowOutcome::NotRamsey(w) = &mut dec.outcome {
        for e in g.edges() {
            w.colors.entry(e).or_insert(1);
        }
        validate_graph_witness(g, pp, w).expect("extended witness failed the graph-level check");
    }
    dec
}

/// Graph-level witness check, independent of the hypergraph encoding:
/// re-enumerates cliques in the color-1 subgraph and cycles in the color-2
/// subgraph directly.
pub fn validate_graph_witness(
    g: &Graph,
    pp: &PairParams,
    w: &ColoringWitness,
) -> Result<(), WitnessError> {
    for (e, &c) in &w.colors {
        if !g.has_edge(e.u(), e.v()) {
            return Err(WitnessError::ForeignEdge(*e));
        }
        if c != 1 && c != 2 {
            return Err(WitnessError::BadColor { e: *e, color: c });
        }
    }
    for e in g.edges() {
        if w.color(&e).is_none() {
            return Err(WitnessError::MissingEdge(e));
        }
    }
    let by_color = |want: u8| {
        let mut gc = Graph::new(g.n()).expect("host size already checked");
        for (e, &c) in &w.colors {
            if c == want {
                gc.add_edge(e.u(), e.v()).expect("edge from host");
            }
        }
        gc
    };
    let red = by_color(1);
    if !crate::hyper::enum_cliques(&red, pp.r()).is_empty() {
        return Err(WitnessError::MonochromaticHyperedge {
            kind: HyperedgeKind::Clique,
            index: 0,
        });
    }
    let blue = by_color(2);
    if !crate::hyper::enum_cycles(&blue, pp.ell()).is_empty() {
        return Err(WitnessError::MonochromaticHyperedge {
            kind: HyperedgeKind::Cycle,
            index: 0,
        });
    }
    Ok(())
}

fn minimize_core(
    start: &Hypergraph,
    budget: u64,
    shuffle_seed: Option<u64>,
) -> Result<Hypergraph, SolveError> {
    let mut rng = shuffle_seed.map(ChaCha8Rng::seed_from_u64);
    let mut cur = start.clone();

    // Hyperedge pass. Keeping a removal exactly when the arrow survives it
    // is safe to do in one sweep: the arrow property is monotone in the
    // hyperedge set, so a removal rejected against a superset of the final
    // hypergraph would be rejected against the final one too.
    let mut edge_order: Vec<Hyperedge> = start.hyperedges().to_vec();
    edge_order.reverse();
    if let Some(rng) = rng.as_mut() {
        edge_order.shuffle(rng);
    }
    for he in &edge_order {
        let pos = match cur.hyperedges().binary_search(he) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let cand = cur.without_hyperedge(pos);
        // cur still arrows, so any good coloring of cand must turn exactly
        // the removed hyperedge monochromatic; pre-coloring it that way
        // decides the same question much faster.
        let own = match he.kind() {
            HyperedgeKind::Clique => 1,
            HyperedgeKind::Cycle => 2,
        };
        let forced: Vec<(Edge, u8)> = he.edges().iter().map(|e| (*e, own)).collect();
        match arrow_hyper_forced(&cand, budget, &forced).outcome {
            ArrowOutcome::Ramsey => cur = cand,
            ArrowOutcome::NotRamsey(_) => {}
            ArrowOutcome::BudgetExceeded => return Err(SolveError::BudgetExceeded { budget }),
        }
    }

    // Hypervertex pass; deleting a hypervertex drops every hyperedge through
    // it. Same monotonicity argument covers interleaving with the pass above.
    let mut vert_order: Vec<Edge> = cur.hypervertices().into_iter().collect();
    if let Some(rng) = rng.as_mut() {
        vert_order.shuffle(rng);
    }
    for e in &vert_order {
        if !cur.hypervertices().contains(e) {
            continue;
        }
        let cand = cur.without_hypervertex(e);
        match arrow_hyper(&cand, budget).outcome {
            ArrowOutcome::Ramsey => cur = cand,
            ArrowOutcome::NotRamsey(_) => {}
            ArrowOutcome::BudgetExceeded => return Err(SolveError::BudgetExceeded { budget }),
        }
    }
    Ok(cur)
}

/// Greedy minimization: returns a sub-hypergraph that still arrows but loses
/// the property under any single hyperedge or hypervertex removal. Deletion
/// order is hyperedges by rank descending, then hypervertices in edge order;
/// a seed shuffles both passes for diversity runs.
pub fn minimize(
    h: &Hypergraph,
    budget: u64,
    shuffle_seed: Option<u64>,
) -> Result<Hypergraph, SolveError> {
    match arrow_hyper(h, budget).outcome {
        ArrowOutcome::Ramsey => {}
        ArrowOutcome::NotRamsey(_) => return Err(SolveError::NotRamseyInput),
        ArrowOutcome::BudgetExceeded => return Err(SolveError::BudgetExceeded { budget }),
    }
    minimize_core(h, budget, shuffle_seed)
}

/// Star-criticality: (i) every hypervertex lies in some cycle hyperedge;
/// (ii) every member e of every cycle hyperedge F has a clique hyperedge E
/// with E ∩ F = {e}.
pub fn star_critical(h: &Hypergraph) -> Result<(), StarViolation> {
    for e in h.hypervertices() {
        if !h.cycles().any(|c| c.contains_edge(&e)) {
            return Err(StarViolation::UncoveredHypervertex { e });
        }
    }
    for (cycle_index, f) in h.hyperedges().iter().enumerate() {
        if f.kind() != HyperedgeKind::Cycle {
            continue;
        }
        for e in f.edges() {
            let private = h
                .cliques()
                .any(|k| k.edge_intersection(f).as_slice() == [*e]);
            if !private {
                return Err(StarViolation::NoPrivateClique {
                    cycle_index,
                    e: *e,
                });
            }
        }
    }
    Ok(())
}

pub fn is_star_critical(h: &Hypergraph) -> bool {
    star_critical(h).is_ok()
}

/// Two-sided sharpening of star-criticality that minimal hypergraphs satisfy:
/// every member of every hyperedge is met privately by a hyperedge of the
/// other kind. Holds vacuously (and is flagged as such) on the empty
/// hypergraph.
pub fn ramsey_crit_check(h: &Hypergraph) -> CritCheck {
    let vacuous = h.hyperedges().is_empty();
    for (index, he) in h.hyperedges().iter().enumerate() {
        let want = match he.kind() {
            HyperedgeKind::Clique => HyperedgeKind::Cycle,
            HyperedgeKind::Cycle => HyperedgeKind::Clique,
        };
        for e in he.edges() {
            let private = h
                .hyperedges()
                .iter()
                .filter(|f| f.kind() == want)
                .any(|f| f.edge_intersection(he).as_slice() == [*e]);
            if !private {
                return CritCheck {
                    vacuous,
                    violation: Some(CritViolation {
                        kind: he.kind(),
                        hyperedge_index: index,
                        e: *e,
                    }),
                };
            }
        }
    }
    CritCheck {
        vacuous,
        violation: None,
    }
}

/// Full pipeline: if the graph arrows the pair, return a minimal arrowing
/// sub-hypergraph of its clique/cycle hypergraph, else None.
pub fn find_crit(
    g: &Graph,
    pp: &PairParams,
    budget: u64,
) -> Result<Option<Hypergraph>, SolveError> {
    find_crit_with(g, pp, budget, None)
}

/// find_crit with a seed that randomizes the minimization order, for
/// generating diverse minimal hypergraphs from one host.
pub fn find_crit_with(
    g: &Graph,
    pp: &PairParams,
    budget: u64,
    shuffle_seed: Option<u64>,
) -> Result<Option<Hypergraph>, SolveError> {
    let h = build_hypergraph(g, pp);
    match arrow_hyper(&h, budget).outcome {
        ArrowOutcome::NotRamsey(_) => Ok(None),
        ArrowOutcome::BudgetExceeded => Err(SolveError::BudgetExceeded { budget }),
        ArrowOutcome::Ramsey => {
            let m = minimize_core(&h, budget, shuffle_seed)?;
            debug_assert!(!m.hyperedges().is_empty());
            Ok(Some(m))
        }
    }
}
