//! Greedy growth of a hypergraph along cliques and flowers.
//!
//! Starting from one clique hyperedge, each step glues on either a single
//! clique sharing at least two vertices with the current picture or a
//! flower: a cycle hyperedge leaving the current vertex set together with
//! one clique petal per uncovered cycle edge. The run stops once the
//! density score `lambda` of the union drops to `-epsilon` or a step budget
//! of ceil(log2 n) is spent, and it returns the full step-by-step trace.
//! The recorded-step set D collects the steps that strictly decreased
//! `lambda`; every clique step does, and a flower step keeps `lambda`
//! unchanged exactly when it brings in the maximal number of fresh
//! vertices, which is (r-1)(ell-1)-1.
//!
//! Every choice the growth makes is resolved by a deterministic order:
//! candidate hyperedges compare by the sorted list of per-edge keys, where
//! an edge already labelled by sigma uses its label and an unlabelled edge
//! falls back to its endpoint pair. Reruns on the same input are therefore
//! bit-identical.

pub mod audit;

use std::collections::{BTreeMap, BTreeSet};

use crate::densities::{lambda_graph, lambda_sub, DensityError, PairParams};
use crate::graph::{Edge, Graph};
use crate::hyper::{Hyperedge, HyperedgeKind, Hypergraph};
use crate::labelling::{extend_labelling, EdgeLabelling, LabelError};
use crate::rational::{ceil_log2, int_at_least_log2, Rat};
use crate::solver::{star_critical, StarViolation};

/// A cycle hyperedge leaving the current vertex set, plus one clique petal
/// for each of its edges outside that set, each petal meeting the cycle in
/// exactly its own edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flower {
    cycle: Hyperedge,
    petals: BTreeMap<Edge, Hyperedge>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlowerError {
    #[error("flower core must be a cycle hyperedge")]
    NotACycle,
    #[error("flower needs fewer petals than the cycle has edges")]
    TooManyPetals,
    #[error("petal for {edge:?} does not meet the cycle in exactly that edge")]
    BadPetal { edge: Edge },
    #[error("every labelled edge already lies on a cycle of the restriction")]
    AllEdgesCovered,
    #[error("no cycle hyperedge through {seed:?} leaves the current vertex set")]
    NoCycle { seed: Edge },
    #[error("no clique hyperedge meets the cycle exactly in {edge:?}")]
    NoPetal { edge: Edge },
    #[error("petal for {edge:?} meets the old graph in {overlap} vertices")]
    PetalAnchored { edge: Edge, overlap: usize },
    #[error("cycle shares no edge with the old graph")]
    CycleDetached,
}

impl Flower {
    pub fn new(cycle: Hyperedge, petals: BTreeMap<Edge, Hyperedge>) -> Result<Flower, FlowerError> {
        if cycle.kind() != HyperedgeKind::Cycle {
            return Err(FlowerError::NotACycle);
        }
        if petals.len() >= cycle.len() {
            return Err(FlowerError::TooManyPetals);
        }
        for (e, p) in &petals {
            let ok = p.kind() == HyperedgeKind::Clique
                && cycle.contains_edge(e)
                && p.edge_intersection(&cycle) == vec![*e];
            if !ok {
                return Err(FlowerError::BadPetal { edge: *e });
            }
        }
        Ok(Flower { cycle, petals })
    }

    pub fn cycle(&self) -> &Hyperedge {
        &self.cycle
    }

    pub fn petals(&self) -> &BTreeMap<Edge, Hyperedge> {
        &self.petals
    }

    /// Cycle first, then petals keyed by their cycle edge.
    pub fn attachment_hyperedges(&self) -> Vec<Hyperedge> {
        let mut out = vec![self.cycle.clone()];
        out.extend(self.petals.values().cloned());
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Init,
    CliqueAttach,
    FlowerAttach,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Attachment {
    Init { clique: Hyperedge },
    Clique { clique: Hyperedge },
    Flower(Flower),
}

impl Attachment {
    pub fn kind(&self) -> StepKind {
        match self {
            Attachment::Init { .. } => StepKind::Init,
            Attachment::Clique { .. } => StepKind::CliqueAttach,
            Attachment::Flower(_) => StepKind::FlowerAttach,
        }
    }
}

/// One state of the growth, after the step that produced it.
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub h: Hypergraph,
    /// Indices of the strictly-decreasing steps seen so far.
    pub d: BTreeSet<usize>,
    pub sigma: EdgeLabelling,
    pub attach: Attachment,
    pub lambda: Rat,
    pub new_vertices: usize,
}

impl TraceStep {
    pub fn kind(&self) -> StepKind {
        self.attach.kind()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// lambda dropped to -epsilon or below.
    LambdaReached,
    /// The ceil(log2 n) step budget ran out first.
    StepBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FingerprintTag {
    /// lambda at most -epsilon.
    J1,
    /// lambda at most the initial clique score, with at least log2(n) edges.
    J2,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FingerprintClass {
    pub tag: FingerprintTag,
    pub epsilon: Rat,
    /// Score of the initial clique, the largest value a run can end on.
    pub m: Rat,
    pub edge_count: usize,
}

#[derive(Debug, Clone)]
pub struct HyperTreeTrace {
    /// steps[0] is the initial single-clique state; steps[i] follows step i.
    pub steps: Vec<TraceStep>,
    pub stop_reason: StopReason,
    /// Ambient vertex count used for the step budget and classification.
    pub n: usize,
    /// Union of the final hyperedges, renamed to 0..v.
    pub fingerprint: Graph,
    pub class: FingerprintClass,
}

impl HyperTreeTrace {
    /// Number of growth steps taken (the trace has t()+1 states).
    pub fn t(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn final_step(&self) -> &TraceStep {
        self.steps.last().expect("trace is never empty")
    }

    pub fn d_final(&self) -> &BTreeSet<usize> {
        &self.final_step().d
    }
}

/// Where the cycle-covering restriction draws its hyperedges from.
#[derive(Debug, Clone, Copy)]
pub enum RestrictionMode<'a> {
    /// Only the hypergraph being grown.
    SingleInput,
    /// The hypergraph being grown plus these companions; companions that do
    /// not contain the current state are skipped.
    Batch(&'a [Hypergraph]),
}

#[derive(Debug, thiserror::Error)]
pub enum HyperTreeError {
    #[error("input is not star-critical: {0:?}")]
    NotStarCritical(StarViolation),
    #[error("no clique hyperedge to start from")]
    NoInitialClique,
    #[error("ambient vertex count must be at least 2")]
    HostTooSmall,
    #[error(transparent)]
    Params(#[from] DensityError),
    #[error("restriction needs at least one input")]
    NoRestrictionInputs,
    #[error("step {step}: {source}")]
    Flower { step: usize, source: FlowerError },
    #[error(transparent)]
    Label(#[from] LabelError),
}

/// Per-edge key for the deterministic hyperedge order: labelled edges sort
/// first by label, unlabelled ones after by endpoint pair.
fn edge_key(e: &Edge, sigma: &EdgeLabelling) -> (u8, u64) {
    match sigma.get(e) {
        Some(l) => (0, l as u64),
        None => (1, (e.u() as u64) << 32 | e.v() as u64),
    }
}

fn choice_key(he: &Hyperedge, sigma: &EdgeLabelling) -> Vec<(u8, u64)> {
    let mut k: Vec<(u8, u64)> = he.edges().iter().map(|e| edge_key(e, sigma)).collect();
    k.sort_unstable();
    k
}

fn smallest_by_key<'a, I: Iterator<Item = &'a Hyperedge>>(
    candidates: I,
    sigma: &EdgeLabelling,
) -> Option<&'a Hyperedge> {
    let mut best: Option<(Vec<(u8, u64)>, &Hyperedge)> = None;
    for he in candidates {
        let key = choice_key(he, sigma);
        match &best {
            Some((bk, _)) if *bk <= key => {}
            _ => best = Some((key, he)),
        }
    }
    best.map(|(_, he)| he)
}

/// Hyperedges of the inputs that live entirely on the hypervertices of
/// `h_prev`. Inputs that do not contain `h_prev` are skipped; the slice
/// itself must be nonempty.
pub fn restricted_hypergraph(
    h_prev: &Hypergraph,
    inputs: &[&Hypergraph],
) -> Result<Hypergraph, HyperTreeError> {
    if inputs.is_empty() {
        return Err(HyperTreeError::NoRestrictionInputs);
    }
    let hv = h_prev.hypervertices();
    let mut kept: BTreeSet<Hyperedge> = BTreeSet::new();
    for inp in inputs {
        if !inp.contains_all_of(h_prev) {
            continue;
        }
        for he in inp.hyperedges() {
            if he.edges().iter().all(|e| hv.contains(e)) {
                kept.insert(he.clone());
            }
        }
    }
    Ok(h_prev.restricted_to(kept.iter()))
}

/// Pick the flower for the next growth step.
///
/// The seed is the smallest-labelled edge of the current union that lies on
/// no cycle of the restriction, the cycle is the smallest one through the
/// seed that leaves the current vertex set, and each cycle edge outside the
/// current hypervertex set gets the smallest clique meeting the cycle in
/// exactly that edge. Each petal may touch at most one old vertex.
pub fn flower_run(
    h_prev: &Hypergraph,
    h: &Hypergraph,
    sigma: &EdgeLabelling,
    mode: RestrictionMode<'_>,
) -> Result<Flower, FlowerError> {
    let inputs: Vec<&Hypergraph> = match mode {
        RestrictionMode::SingleInput => vec![h],
        RestrictionMode::Batch(extras) => {
            let mut v = vec![h];
            v.extend(extras.iter());
            v
        }
    };
    let restriction =
        restricted_hypergraph(h_prev, &inputs).expect("input list is never empty here");

    let g_prev = h_prev.underlying();
    let mut covered: BTreeSet<Edge> = BTreeSet::new();
    for c in restriction.cycles() {
        covered.extend(c.edges().iter().cloned());
    }
    let seed = g_prev
        .edges()
        .filter(|e| !covered.contains(e))
        .min_by_key(|e| sigma.get(e).expect("sigma labels the whole union"))
        .copied()
        .ok_or(FlowerError::AllEdgesCovered)?;

    let hv_prev = h_prev.hypervertices();
    let leaves_prev =
        |he: &Hyperedge| he.edges().iter().any(|e| !hv_prev.contains(e));
    let cycle = smallest_by_key(
        h.cycles().filter(|c| c.contains_edge(&seed) && leaves_prev(c)),
        sigma,
    )
    .ok_or(FlowerError::NoCycle { seed })?
    .clone();

    let mut petals = BTreeMap::new();
    for e in cycle.edges() {
        if hv_prev.contains(e) {
            continue;
        }
        let petal = smallest_by_key(
            h.cliques()
                .filter(|p| p.edge_intersection(&cycle) == vec![*e]),
            sigma,
        )
        .ok_or(FlowerError::NoPetal { edge: *e })?;
        petals.insert(*e, petal.clone());
    }

    // A flower must anchor through its cycle, not through petal vertices.
    if cycle.edges().iter().all(|e| !hv_prev.contains(e)) {
        return Err(FlowerError::CycleDetached);
    }
    let prev_mask = g_prev.verts_mask();
    for (e, p) in &petals {
        let overlap = (p.vertex_mask() & prev_mask).count_ones() as usize;
        if overlap > 1 {
            return Err(FlowerError::PetalAnchored {
                edge: *e,
                overlap,
            });
        }
    }
    Flower::new(cycle, petals)
}

/// Classify the union a finished run ends on.
pub fn classify_fingerprint(
    gf: &Graph,
    pp: &PairParams,
    n: usize,
) -> Result<FingerprintClass, DensityError> {
    let eps = pp.epsilon()?;
    let m = pp.lambda_clique();
    let lam = lambda_graph(gf, pp);
    let tag = if lam <= -eps {
        FingerprintTag::J1
    } else if lam <= m && int_at_least_log2(gf.ecount() as u64, n as u64) {
        FingerprintTag::J2
    } else {
        FingerprintTag::Unclassified
    };
    Ok(FingerprintClass {
        tag,
        epsilon: eps,
        m,
        edge_count: gf.ecount(),
    })
}

/// Grow a star-critical hypergraph from its smallest clique and return the
/// full trace. `n_override` substitutes the ambient vertex count used for
/// the step budget and classification (default: the host's).
pub fn hypertree_run(
    h: &Hypergraph,
    pp: &PairParams,
    mode: RestrictionMode<'_>,
    n_override: Option<usize>,
) -> Result<HyperTreeTrace, HyperTreeError> {
    if let Err(v) = star_critical(h) {
        return Err(HyperTreeError::NotStarCritical(v));
    }
    let n = n_override.unwrap_or(h.host().n());
    if n < 2 {
        return Err(HyperTreeError::HostTooSmall);
    }
    run_inner(h, pp, mode, n)
}

/// The growth loop itself, with the input contract already checked.
/// Exposed to the sibling tests so flower-branch behaviour can be driven
/// by small hand-built hypergraphs.
pub(crate) fn run_inner(
    h: &Hypergraph,
    pp: &PairParams,
    mode: RestrictionMode<'_>,
    n: usize,
) -> Result<HyperTreeTrace, HyperTreeError> {
    let eps = pp.epsilon()?;
    let t_max = ceil_log2(n as u64) as usize;

    let e0 = h.cliques().next().ok_or(HyperTreeError::NoInitialClique)?;
    let mut cur = h.restricted_to([e0.clone()].iter());
    let mut g_cur = cur.underlying();
    let mut sigma = EdgeLabelling::lex_for(&g_cur);
    let mut d: BTreeSet<usize> = BTreeSet::new();
    let mut lambda = lambda_sub(&g_cur, pp);
    let mut steps = vec![TraceStep {
        h: cur.clone(),
        d: d.clone(),
        sigma: sigma.clone(),
        attach: Attachment::Init { clique: e0.clone() },
        lambda,
        new_vertices: g_cur.vcount(),
    }];

    let max_new = (pp.r() - 1) * (pp.ell() - 1) - 1;
    let mut i = 0;
    while lambda > -eps && i < t_max {
        i += 1;
        let hv = cur.hypervertices();
        let g_mask = g_cur.verts_mask();
        let candidate = smallest_by_key(
            h.cliques().filter(|c| {
                (c.vertex_mask() & g_mask).count_ones() >= 2
                    && c.edges().iter().any(|e| !hv.contains(e))
            }),
            &sigma,
        );
        let attach = match candidate {
            Some(c) => Attachment::Clique { clique: c.clone() },
            None => {
                let flower = flower_run(&cur, h, &sigma, mode)
                    .map_err(|source| HyperTreeError::Flower { step: i, source })?;
                Attachment::Flower(flower)
            }
        };
        let extra = match &attach {
            Attachment::Clique { clique } => vec![clique.clone()],
            Attachment::Flower(f) => f.attachment_hyperedges(),
            Attachment::Init { .. } => unreachable!(),
        };
        let next = cur.with_hyperedges(&extra);
        let g_next = next.underlying();
        let new_vertices = g_next.vcount() - g_cur.vcount();
        let recorded = match &attach {
            Attachment::Clique { .. } => true,
            Attachment::Flower(_) => new_vertices != max_new,
            Attachment::Init { .. } => unreachable!(),
        };
        if recorded {
            d.insert(i);
        }
        sigma = extend_labelling(&sigma, &g_cur, &g_next)?;
        cur = next;
        g_cur = g_next;
        lambda = lambda_sub(&g_cur, pp);
        steps.push(TraceStep {
            h: cur.clone(),
            d: d.clone(),
            sigma: sigma.clone(),
            attach,
            lambda,
            new_vertices,
        });
    }

    let stop_reason = if lambda <= -eps {
        StopReason::LambdaReached
    } else {
        StopReason::StepBudget
    };
    let (fingerprint, _) = g_cur.to_compact_graph();
    let class = classify_fingerprint(&fingerprint, pp, n)?;
    assert!(
        class.tag != FingerprintTag::Unclassified,
        "a finished run always lands in a fingerprint class"
    );
    Ok(HyperTreeTrace {
        steps,
        stop_reason,
        n,
        fingerprint,
        class,
    })
}
