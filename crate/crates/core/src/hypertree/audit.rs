//! Independent recomputation of what each growth step did to `lambda`.
//!
//! A clique step must change `lambda` by exactly `beta` of the shared part,
//! and that change must be strictly negative. A flower step is replayed
//! petal by petal: walking the cycle from its old anchor edge, each sweep
//! step picks the first still-free cycle edge, glues its petal on, and
//! accounts for the free edges that petal swallows. The per-step identities
//! and bounds below pin the total change to at most
//! `(beta(K2)+1) * (t - a0) <= 0`, with equality exactly when the step
//! brought in the maximal number of fresh vertices. `verify_trace` runs
//! these audits over a whole trace plus the trace-level bookkeeping checks.

use std::collections::BTreeSet;

use crate::densities::{beta_sub, beta_ve, lambda_graph, lambda_sub, PairParams};
use crate::graph::{Edge, Subgraph};
use crate::hyper::Hyperedge;
use crate::rational::{ceil_log2, int_at_least_log2, rat_int, Rat};

use super::{Attachment, FingerprintTag, Flower, HyperTreeTrace, StopReason};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("audit check {check} failed: {detail}")]
pub struct AuditError {
    pub check: &'static str,
    pub detail: String,
}

fn fail(check: &'static str, detail: String) -> AuditError {
    AuditError { check, detail }
}

fn ensure(cond: bool, check: &'static str, detail: impl FnOnce() -> String) -> Result<(), AuditError> {
    if cond {
        Ok(())
    } else {
        Err(fail(check, detail()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueAudit {
    pub lambda_diff: Rat,
    pub beta: Rat,
    pub shared_vertices: usize,
    pub shared_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetalRow {
    /// The free cycle edge whose petal this sweep step glued on.
    pub seed: Edge,
    /// Heads that sat isolated in the shared part.
    pub isolated: usize,
    pub increment: Rat,
    /// Increment met the single-shared-edge ceiling exactly.
    pub tight: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowerAudit {
    /// Free cycle edges before the sweep.
    pub a0: usize,
    /// Sweep steps until no free edge remained.
    pub t: usize,
    pub cycle_increment: Rat,
    pub petal_rows: Vec<PetalRow>,
    /// Over the whole attachment, cycle and every petal.
    pub lambda_diff: Rat,
    pub new_vertices: usize,
    pub degenerate: bool,
}

/// Replay a clique attachment: the score moves by `beta` of the shared
/// subgraph, which must be strictly negative.
pub fn audit_clique_step(
    prev: &Subgraph,
    clique: &Hyperedge,
    pp: &PairParams,
) -> Result<CliqueAudit, AuditError> {
    let c_sub = clique.as_subgraph();
    let j = prev.intersection(&c_sub);
    ensure(j.vcount() >= 2, "attachment-shares-two-vertices", || {
        format!("shared part has {} vertices", j.vcount())
    })?;
    ensure(
        c_sub.edges().any(|e| !prev.contains_edge(e)),
        "attachment-leaves-old-graph",
        || "every clique edge is already present".to_string(),
    )?;
    let after = prev.union(&c_sub);
    let lambda_diff = lambda_sub(&after, pp) - lambda_sub(prev, pp);
    let beta = beta_sub(&j, pp)
        .map_err(|e| fail("shared-part-fits-a-clique", e.to_string()))?;
    ensure(lambda_diff == beta, "clique-increment-identity", || {
        format!("lambda moved by {lambda_diff}, beta is {beta}")
    })?;
    ensure(beta < rat_int(0), "clique-increment-negative", || {
        format!("beta is {beta}")
    })?;
    Ok(CliqueAudit {
        lambda_diff,
        beta,
        shared_vertices: j.vcount(),
        shared_edges: j.ecount(),
    })
}

/// Vertices of the cycle in traversal order, starting from the smallest
/// edge it shares with `prev` (u0 = its lower endpoint).
fn cycle_sequence(cycle: &Hyperedge, prev: &Subgraph) -> Result<Vec<usize>, AuditError> {
    let anchor = cycle
        .edges()
        .iter()
        .find(|e| prev.contains_edge(e))
        .ok_or_else(|| {
            fail(
                "cycle-meets-old-in-edge",
                "no cycle edge lies in the old graph".to_string(),
            )
        })?;
    let len = cycle.len();
    let mut seq = vec![anchor.u()];
    let mut prev_v = anchor.v();
    let mut cur = anchor.u();
    for _ in 1..len {
        let nxt = cycle
            .edges()
            .iter()
            .filter(|e| e.touches(cur))
            .map(|e| e.other_end(cur))
            .find(|&w| w != prev_v)
            .ok_or_else(|| fail("cycle-shape", format!("walk stuck at {cur}")))?;
        prev_v = cur;
        cur = nxt;
        seq.push(cur);
    }
    ensure(cur == anchor.v(), "cycle-shape", || {
        "walk does not close up".to_string()
    })?;
    Ok(seq)
}

/// Replay a flower attachment edge by edge and petal by petal.
pub fn audit_flower_step(
    prev: &Subgraph,
    flower: &Flower,
    pp: &PairParams,
) -> Result<FlowerAudit, AuditError> {
    let ell = pp.ell();
    let c_sub = flower.cycle().as_subgraph();
    let j0 = prev.intersection(&c_sub);
    ensure(j0.ecount() >= 1, "cycle-meets-old-in-edge", || {
        "cycle shares no edge with the old graph".to_string()
    })?;
    ensure(j0.ecount() < ell, "cycle-leaves-old-graph", || {
        "every cycle edge is already present".to_string()
    })?;

    let seq = cycle_sequence(flower.cycle(), prev)?;
    let cyc_edge = |m: usize| Edge::new(seq[m], seq[(m + 1) % ell]);
    let a0: BTreeSet<Edge> = flower
        .cycle()
        .edges()
        .iter()
        .filter(|e| !prev.contains_edge(e))
        .cloned()
        .collect();
    {
        let petal_keys: BTreeSet<Edge> = flower.petals().keys().cloned().collect();
        ensure(petal_keys == a0, "petal-per-free-edge", || {
            format!("free edges {a0:?}, petals cover {petal_keys:?}")
        })?;
    }

    let lam_prev = lambda_sub(prev, pp);
    let g0 = prev.union(&c_sub);
    let cycle_increment = lambda_sub(&g0, pp) - lam_prev;
    let m2 = pp.m2_pair();
    let formula = rat_int((ell - j0.vcount()) as i128)
        - rat_int((ell - j0.ecount()) as i128) / m2;
    ensure(cycle_increment == formula, "cycle-increment-identity", || {
        format!("lambda moved by {cycle_increment}, edge count gives {formula}")
    })?;
    let beta_k2 = beta_ve(2, 1, pp).expect("a single edge always fits");
    let cyc_bound = -beta_k2 * rat_int(a0.len() as i128);
    ensure(cycle_increment <= cyc_bound, "cycle-increment-bound", || {
        format!("{cycle_increment} > {cyc_bound}")
    })?;
    let j0_is_edge = j0.vcount() == 2 && j0.ecount() == 1;
    ensure(
        (cycle_increment == cyc_bound) == j0_is_edge,
        "cycle-increment-tight-iff-single-edge",
        || format!("increment {cycle_increment}, bound {cyc_bound}, shared part not an edge"),
    )?;

    // Sweep: always serve the first free edge along the cycle, gluing its
    // petal on and retiring every free edge whose head that petal touches.
    let mut free = a0.clone();
    let mut g = g0.clone();
    let mut rows: Vec<PetalRow> = Vec::new();
    let mut served: BTreeSet<Edge> = BTreeSet::new();
    let mut retired = 0usize;
    while !free.is_empty() {
        ensure(rows.len() < a0.len(), "sweep-terminates", || {
            "sweep ran longer than the free edge count".to_string()
        })?;
        let m = (0..ell)
            .find(|&m| free.contains(&cyc_edge(m)))
            .expect("free set is nonempty");
        let f = cyc_edge(m);
        let head = seq[(m + 1) % ell];
        let petal = flower.petals().get(&f).expect("domain checked above");
        let p_sub = petal.as_subgraph();
        let j = g.intersection(&p_sub);
        ensure(j.degree(head) == 1, "petal-head-degree-one", || {
            format!("head {head} has degree {} in the shared part", j.degree(head))
        })?;
        let isolated: Vec<usize> = (0..ell)
            .filter_map(|mm| {
                let hd = seq[(mm + 1) % ell];
                (free.contains(&cyc_edge(mm)) && hd != head && j.contains_vertex(hd))
                    .then_some(hd)
            })
            .collect();
        ensure(
            isolated.iter().all(|&v| j.degree(v) == 0),
            "petal-isolated-set",
            || "a swallowed head has an edge in the shared part".to_string(),
        )?;
        let removed: Vec<Edge> = (0..ell)
            .filter_map(|mm| {
                let f2 = cyc_edge(mm);
                let hd = seq[(mm + 1) % ell];
                (free.contains(&f2) && p_sub.contains_vertex(hd)).then_some(f2)
            })
            .collect();
        ensure(
            removed.len() == isolated.len() + 1 && removed.contains(&f),
            "head-count-partition",
            || {
                format!(
                    "retired {} edges but saw {} swallowed heads",
                    removed.len(),
                    isolated.len()
                )
            },
        )?;
        let g_next = g.union(&p_sub);
        let increment = lambda_sub(&g_next, pp) - lambda_sub(&g, pp);
        let beta_j = beta_sub(&j, pp)
            .map_err(|e| fail("shared-part-fits-a-clique", e.to_string()))?;
        ensure(increment == beta_j, "petal-increment-identity", || {
            format!("lambda moved by {increment}, beta is {beta_j}")
        })?;
        let mask = isolated.iter().fold(0u64, |acc, &v| acc | 1 << v);
        let jt = j.without_isolated(mask);
        let beta_jt = beta_sub(&jt, pp)
            .map_err(|e| fail("shared-part-fits-a-clique", e.to_string()))?;
        ensure(
            beta_j == beta_jt - rat_int(isolated.len() as i128),
            "isolated-vertex-discount",
            || format!("beta {beta_j} vs trimmed {beta_jt} minus {}", isolated.len()),
        )?;
        ensure(beta_jt <= beta_k2, "petal-increment-bound", || {
            format!("{beta_jt} > {beta_k2}")
        })?;
        let tight = beta_jt == beta_k2;
        ensure(
            tight == (jt.vcount() == 2 && jt.ecount() == 1),
            "petal-tight-iff-single-edge",
            || "tightness disagrees with the shared part being one edge".to_string(),
        )?;
        rows.push(PetalRow {
            seed: f,
            isolated: isolated.len(),
            increment,
            tight,
        });
        for f2 in &removed {
            free.remove(f2);
        }
        retired += removed.len();
        served.insert(f);
        g = g_next;
    }
    ensure(retired == a0.len(), "head-count-partition-total", || {
        format!("retired {retired} edges out of {}", a0.len())
    })?;
    let t = rows.len();

    // Petals never reached by the sweep can only lower the score further.
    for (e, petal) in flower.petals() {
        if served.contains(e) {
            continue;
        }
        let p_sub = petal.as_subgraph();
        let j = g.intersection(&p_sub);
        let g_next = g.union(&p_sub);
        let increment = lambda_sub(&g_next, pp) - lambda_sub(&g, pp);
        let beta_j = beta_sub(&j, pp)
            .map_err(|e| fail("shared-part-fits-a-clique", e.to_string()))?;
        ensure(increment == beta_j, "unserved-petal-identity", || {
            format!("lambda moved by {increment}, beta is {beta_j}")
        })?;
        ensure(increment <= rat_int(0), "unserved-petal-nonpositive", || {
            format!("unserved petal raised lambda by {increment}")
        })?;
        g = g_next;
    }

    let lambda_diff = lambda_sub(&g, pp) - lam_prev;
    let total_bound = (beta_k2 + rat_int(1)) * rat_int(t as i128 - a0.len() as i128);
    ensure(lambda_diff <= total_bound, "total-decrease-bound", || {
        format!("{lambda_diff} > {total_bound}")
    })?;
    ensure(
        total_bound <= rat_int(0) && lambda_diff <= rat_int(0),
        "total-decrease-nonpositive",
        || format!("diff {lambda_diff}, bound {total_bound}"),
    )?;
    let new_vertices = g.vcount() - prev.vcount();
    let max_new = (pp.r() - 1) * (ell - 1) - 1;
    ensure(
        (lambda_diff == rat_int(0)) == (new_vertices == max_new),
        "zero-decrease-iff-max-new-vertices",
        || format!("diff {lambda_diff} with {new_vertices} fresh vertices"),
    )?;
    Ok(FlowerAudit {
        a0: a0.len(),
        t,
        cycle_increment,
        petal_rows: rows,
        lambda_diff,
        new_vertices,
        degenerate: new_vertices != max_new,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LemmaRow {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl LemmaRow {
    pub fn ok(name: impl Into<String>) -> LemmaRow {
        LemmaRow {
            name: name.into(),
            pass: true,
            detail: String::new(),
        }
    }

    pub fn bad(name: impl Into<String>, detail: impl Into<String>) -> LemmaRow {
        LemmaRow {
            name: name.into(),
            pass: false,
            detail: detail.into(),
        }
    }

    pub fn of(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> LemmaRow {
        LemmaRow {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TraceReport {
    pub rows: Vec<LemmaRow>,
}

impl TraceReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&LemmaRow> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }
}

/// Every consistency property a finished trace must satisfy, one row each.
pub fn verify_trace(trace: &HyperTreeTrace, pp: &PairParams) -> TraceReport {
    let mut rows = Vec::new();
    let steps = &trace.steps;
    let t = trace.t();
    let eps = match pp.epsilon() {
        Ok(e) => e,
        Err(e) => {
            return TraceReport {
                rows: vec![LemmaRow::bad("parameters-in-regime", e.to_string())],
            }
        }
    };
    let m = pp.lambda_clique();

    let s0 = &steps[0];
    rows.push(LemmaRow::of(
        "init-single-clique",
        s0.h.len() == 1
            && s0.h.cliques().count() == 1
            && s0.lambda == m
            && matches!(s0.attach, Attachment::Init { .. }),
        format!("{} hyperedges, lambda {}", s0.h.len(), s0.lambda),
    ));

    let mut grows = true;
    let mut edge_counts = true;
    let mut lambda_ok = true;
    let mut nested = true;
    let mut sigma_ok = true;
    let mut fresh_ok = true;
    for i in 1..=t {
        let prev = &steps[i - 1];
        let cur = &steps[i];
        let hv_prev = prev.h.hypervertices().len();
        let hv_cur = cur.h.hypervertices().len();
        grows &= hv_prev < hv_cur;
        let g_cur = cur.h.underlying();
        edge_counts &= g_cur.ecount() == hv_cur;
        lambda_ok &= cur.lambda == lambda_sub(&g_cur, pp) && cur.lambda <= prev.lambda;
        nested &= prev.d.is_subset(&cur.d)
            && cur.d.difference(&prev.d).all(|&j| j == i);
        sigma_ok &= cur.sigma.matches(&g_cur)
            && prev.sigma.iter().all(|(e, l)| cur.sigma.get(e) == Some(l));
        fresh_ok &=
            cur.new_vertices == g_cur.vcount() - prev.h.underlying().vcount();
    }
    rows.push(LemmaRow::of(
        "hypervertex-count-grows",
        grows,
        "each step must add at least one hypervertex",
    ));
    rows.push(LemmaRow::of(
        "edge-count-matches-hypervertices",
        edge_counts,
        "the union graph's edges are exactly the hypervertices",
    ));
    rows.push(LemmaRow::of(
        "lambda-recomputes-and-never-increases",
        lambda_ok,
        "recorded lambda must match the union and be monotone",
    ));
    rows.push(LemmaRow::of(
        "d-sets-nested",
        nested,
        "each step may add only its own index",
    ));
    rows.push(LemmaRow::of(
        "sigma-extension-consistent",
        sigma_ok,
        "labels must cover the union and never change",
    ));
    rows.push(LemmaRow::of(
        "new-vertex-accounting",
        fresh_ok,
        "recorded fresh-vertex counts must match the unions",
    ));

    // Stopping rule: every earlier state was still above -eps with budget
    // left, and the final state broke one of the two.
    let t_max = ceil_log2(trace.n as u64) as usize;
    let early_ok = (0..t).all(|i| steps[i].lambda > -eps && i < t_max);
    let final_lambda = steps[t].lambda;
    let stopped = final_lambda <= -eps || t == t_max;
    rows.push(LemmaRow::of(
        "stop-time-minimal",
        early_ok && stopped,
        format!("stopped after {t} of {t_max} steps at lambda {final_lambda}"),
    ));
    let reason_ok = match trace.stop_reason {
        StopReason::LambdaReached => final_lambda <= -eps,
        StopReason::StepBudget => final_lambda > -eps && t == t_max,
    };
    rows.push(LemmaRow::of(
        "stop-reason-consistent",
        reason_ok,
        format!("{:?} at lambda {final_lambda}", trace.stop_reason),
    ));
    rows.push(LemmaRow::of(
        "final-lambda-at-most-initial",
        final_lambda <= m,
        format!("{final_lambda} vs {m}"),
    ));

    // Recorded steps are exactly the strict drops, and the smallest drop
    // bounds how many there can be.
    let d_final = trace.d_final();
    let mut drops_match = true;
    let mut min_drop: Option<Rat> = None;
    for i in 1..=t {
        let drop = steps[i - 1].lambda - steps[i].lambda;
        let recorded = d_final.contains(&i);
        drops_match &= recorded == (drop > rat_int(0));
        if recorded {
            min_drop = Some(match min_drop {
                Some(d) => d.min(drop),
                None => drop,
            });
        }
    }
    rows.push(LemmaRow::of(
        "recorded-steps-match-lambda-drops",
        drops_match,
        "D must hold exactly the strictly decreasing steps",
    ));
    if let Some(delta) = min_drop {
        let count_ok = delta > rat_int(0)
            && rat_int(d_final.len() as i128 - 1) * delta <= m + eps;
        rows.push(LemmaRow::of(
            "recorded-step-count-bounded",
            count_ok,
            format!("{} recorded steps, smallest drop {delta}", d_final.len()),
        ));
    }

    // Per-step replay.
    for i in 1..=t {
        let prev_g = steps[i - 1].h.underlying();
        match &steps[i].attach {
            Attachment::Init { .. } => {
                rows.push(LemmaRow::bad(
                    format!("step-{i}-shape"),
                    "init state appeared past position zero",
                ));
            }
            Attachment::Clique { clique } => {
                let name = format!("step-{i}-clique-audit");
                match audit_clique_step(&prev_g, clique, pp) {
                    Ok(a) => {
                        let consistent = d_final.contains(&i) && a.lambda_diff < rat_int(0);
                        rows.push(LemmaRow::of(
                            name,
                            consistent,
                            format!("beta {}", a.beta),
                        ));
                    }
                    Err(e) => rows.push(LemmaRow::bad(name, e.to_string())),
                }
            }
            Attachment::Flower(f) => {
                let name = format!("step-{i}-flower-audit");
                match audit_flower_step(&prev_g, f, pp) {
                    Ok(a) => {
                        let consistent = a.degenerate == d_final.contains(&i)
                            && a.new_vertices == steps[i].new_vertices;
                        rows.push(LemmaRow::of(
                            name,
                            consistent,
                            format!(
                                "a0 {}, t {}, diff {}",
                                a.a0, a.t, a.lambda_diff
                            ),
                        ));
                    }
                    Err(e) => rows.push(LemmaRow::bad(name, e.to_string())),
                }
            }
        }
    }

    // Fingerprint classification.
    let lam_f = lambda_graph(&trace.fingerprint, pp);
    let class_ok = match trace.class.tag {
        FingerprintTag::J1 => lam_f <= -eps,
        FingerprintTag::J2 => {
            lam_f <= m
                && int_at_least_log2(trace.fingerprint.ecount() as u64, trace.n as u64)
        }
        FingerprintTag::Unclassified => false,
    };
    rows.push(LemmaRow::of(
        "fingerprint-class-valid",
        class_ok && trace.class.edge_count == trace.fingerprint.ecount(),
        format!("{:?} at lambda {lam_f}", trace.class.tag),
    ));

    TraceReport { rows }
}
