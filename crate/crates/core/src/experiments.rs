//! Desk-scale experiments: G(n,p) sampling, Monte Carlo arrow-frequency
//! scans, corpus-wide lemma verification, fingerprint collection with
//! isomorphism dedup, and a numeric evaluation of the union bound.
//!
//! Everything here reports raw numbers. None of it claims anything about the
//! asymptotic regime; the sizes a solver can decide are far below where the
//! threshold statement bites.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::canonical_code;
use crate::densities::{beta_sub, lambda_sub, DensityError, PairParams};
use crate::graph::{partition_ab, Graph, Subgraph};
use crate::hyper::{Hypergraph, SCHEMA_VERSION};
use crate::hypertree::audit::{verify_trace, LemmaRow};
use crate::hypertree::{hypertree_run, HyperTreeError, HyperTreeTrace, RestrictionMode};
use crate::rational::{rat_to_f64, Rat, RatJson};
use crate::solver::{
    arrow_graph, find_crit, ramsey_crit_check, star_critical, ArrowOutcome, SolveError,
};

/// Critical value of the two-sided 95% normal interval, used for every
/// frequency report unless a config overrides it.
pub const WILSON_Z_95: f64 = 1.959963984540054;

/// Independent generator for one trial. The key mixes the master seed with
/// the (grid point, trial) pair, so any subset of trials can run in any
/// order, on any number of threads, and still see the same bits.
pub fn trial_stream(master_seed: u64, grid: u64, trial: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&grid.to_le_bytes());
    seed[16..24].copy_from_slice(&trial.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

/// One draw per vertex pair, in lexicographic pair order; the edge is present
/// when the draw's top 53 bits, read as a dyadic in [0,1), fall below p.
/// Exactly `binom(n,2)` draws are consumed, so a stream position never
/// depends on earlier outcomes.
pub fn sample_gnp(n: usize, p: f64, rng: &mut impl RngCore) -> Graph {
    assert!(!p.is_nan() && (0.0..=1.0).contains(&p), "p must be in [0,1]");
    let mut g = Graph::new(n).expect("host within the vertex cap");
    for u in 0..n {
        for v in (u + 1)..n {
            let x = (rng.next_u64() >> 11) as f64 * 2f64.powi(-53);
            if x < p {
                g.add_edge(u, v).expect("pairs visited once");
            }
        }
    }
    g
}

/// Wilson score interval for `successes` out of `decided` trials. An empty
/// sample gives the vacuous [0,1].
pub fn wilson_interval(successes: u64, decided: u64, z: f64) -> (f64, f64) {
    if decided == 0 {
        return (0.0, 1.0);
    }
    let nf = decided as f64;
    let phat = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (phat + z2 / (2.0 * nf)) / denom;
    let half = z * (phat * (1.0 - phat) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    // At the boundaries the score endpoints are exactly 0 and 1; pin them so
    // rounding never pushes the sample frequency outside the interval.
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == decided {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// Probability grid: explicit values, or prefactors c placed on the scaling
/// p = c * n^(-1/m2(pair)), capped at 1 since the formula is asymptotic and
/// can exceed 1 at small n.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbGrid {
    Explicit(Vec<f64>),
    Prefactors(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub n: usize,
    pub r: usize,
    pub ell: usize,
    pub grid: ProbGrid,
    pub trials: u64,
    pub master_seed: u64,
    /// Propagation budget per arrow call; exhaustion is tallied, not fatal.
    pub budget: u64,
    /// Interval critical value; WILSON_Z_95 unless a different level is wanted.
    pub z: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum McError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("empty probability grid")]
    EmptyGrid,
    #[error("probability {0} outside [0,1]")]
    BadProbability(f64),
    #[error("prefactor {0} must be a nonnegative number")]
    BadPrefactor(f64),
    #[error("host size {0} exceeds the vertex cap")]
    HostTooLarge(usize),
    #[error(transparent)]
    Params(#[from] DensityError),
}

impl McConfig {
    /// The grid resolved to probabilities, validated.
    pub fn probabilities(&self) -> Result<Vec<f64>, McError> {
        let probs = match &self.grid {
            ProbGrid::Explicit(ps) => {
                for &p in ps {
                    if p.is_nan() || !(0.0..=1.0).contains(&p) {
                        return Err(McError::BadProbability(p));
                    }
                }
                ps.clone()
            }
            ProbGrid::Prefactors(cs) => {
                let pp = PairParams::new(self.r, self.ell)?;
                let exponent = -1.0 / rat_to_f64(pp.m2_pair());
                let scale = (self.n as f64).powf(exponent);
                let mut ps = Vec::with_capacity(cs.len());
                for &c in cs {
                    if c.is_nan() || c < 0.0 {
                        return Err(McError::BadPrefactor(c));
                    }
                    ps.push((c * scale).min(1.0));
                }
                ps
            }
        };
        if probs.is_empty() {
            return Err(McError::EmptyGrid);
        }
        Ok(probs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub p: f64,
    pub ramsey: u64,
    pub not_ramsey: u64,
    pub budget_exceeded: u64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub schema_version: u32,
    pub n: usize,
    pub r: usize,
    pub ell: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub points: Vec<GridPoint>,
}

/// Sample `trials` graphs per grid point and decide each with the arrow
/// solver. The three outcomes are tallied separately; the Wilson interval
/// uses only the decided trials. Trials run in parallel, but every count is
/// an order-independent sum and every stream is keyed by position, so the
/// report is identical whatever the thread count.
pub fn mc_threshold(cfg: &McConfig) -> Result<McReport, McError> {
    if cfg.trials == 0 {
        return Err(McError::NoTrials);
    }
    if cfg.n > 64 {
        return Err(McError::HostTooLarge(cfg.n));
    }
    let pp = PairParams::new(cfg.r, cfg.ell)?;
    let probs = cfg.probabilities()?;
    let mut points = Vec::with_capacity(probs.len());
    for (gi, &p) in probs.iter().enumerate() {
        let (ramsey, not_ramsey, budget_exceeded) = (0..cfg.trials)
            .into_par_iter()
            .map(|ti| {
                let mut rng = trial_stream(cfg.master_seed, gi as u64, ti);
                let g = sample_gnp(cfg.n, p, &mut rng);
                match arrow_graph(&g, &pp, cfg.budget).outcome {
                    ArrowOutcome::Ramsey => (1u64, 0u64, 0u64),
                    ArrowOutcome::NotRamsey(_) => (0, 1, 0),
                    ArrowOutcome::BudgetExceeded => (0, 0, 1),
                }
            })
            .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
        let (lo, hi) = wilson_interval(ramsey, ramsey + not_ramsey, cfg.z);
        points.push(GridPoint {
            p,
            ramsey,
            not_ramsey,
            budget_exceeded,
            lo,
            hi,
        });
    }
    Ok(McReport {
        schema_version: SCHEMA_VERSION,
        n: cfg.n,
        r: cfg.r,
        ell: cfg.ell,
        trials: cfg.trials,
        master_seed: cfg.master_seed,
        points,
    })
}

pub const MC_CSV_HEADER: &str = "p,ramsey,not_ramsey,budget_exceeded,lo,hi";

/// Plot data, one row per grid point. Floats print in shortest round-trip
/// form, so `parse_mc_csv` recovers them bit for bit.
pub fn mc_csv(report: &McReport) -> String {
    let mut out = String::from(MC_CSV_HEADER);
    out.push('\n');
    for pt in &report.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            pt.p, pt.ramsey, pt.not_ramsey, pt.budget_exceeded, pt.lo, pt.hi
        );
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CsvError {
    #[error("line 1: expected header `{MC_CSV_HEADER}`")]
    BadHeader,
    #[error("line {line}: expected 6 comma-separated fields")]
    FieldCount { line: usize },
    #[error("line {line}: bad number `{token}`")]
    BadNumber { line: usize, token: String },
}

pub fn parse_mc_csv(text: &str) -> Result<Vec<GridPoint>, CsvError> {
    let mut lines = text.lines();
    if lines.next() != Some(MC_CSV_HEADER) {
        return Err(CsvError::BadHeader);
    }
    let mut points = Vec::new();
    for (idx, row) in lines.enumerate() {
        let line = idx + 2;
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 6 {
            return Err(CsvError::FieldCount { line });
        }
        let bad = |token: &str| CsvError::BadNumber {
            line,
            token: token.to_string(),
        };
        let float = |t: &str| t.parse::<f64>().map_err(|_| bad(t));
        let count = |t: &str| t.parse::<u64>().map_err(|_| bad(t));
        points.push(GridPoint {
            p: float(fields[0])?,
            ramsey: count(fields[1])?,
            not_ramsey: count(fields[2])?,
            budget_exceeded: count(fields[3])?,
            lo: float(fields[4])?,
            hi: float(fields[5])?,
        });
    }
    Ok(points)
}

pub fn mc_json(report: &McReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn parse_mc_json(text: &str) -> Result<McReport, serde_json::Error> {
    serde_json::from_str(text)
}

/// What a corpus member claims to be; `verify_lemmas` checks the claim.
#[derive(Debug, Clone)]
pub enum CorpusItem {
    /// Star-critical hypergraph, the shape the extraction pipeline emits.
    Critical { name: String, h: Hypergraph },
    /// Finished growth trace.
    Trace {
        name: String,
        trace: Box<HyperTreeTrace>,
    },
    /// Plain host graph: the extraction pipeline runs first, then the
    /// hypergraph checks apply to whatever it yields.
    Plain { name: String, g: Graph },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemReport {
    pub name: String,
    pub rows: Vec<LemmaRow>,
    /// Set when a solver budget ran out before the checks could finish.
    /// Distinct from a failed row: nothing was refuted, just undecided.
    pub incomplete: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub schema_version: u32,
    pub items: Vec<ItemReport>,
}

impl CorpusReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.rows.iter().all(|r| r.pass))
    }

    pub fn any_incomplete(&self) -> bool {
        self.items.iter().any(|i| i.incomplete.is_some())
    }

    pub fn failures(&self) -> Vec<(&str, &LemmaRow)> {
        self.items
            .iter()
            .flat_map(|i| {
                i.rows
                    .iter()
                    .filter(|r| !r.pass)
                    .map(move |r| (i.name.as_str(), r))
            })
            .collect()
    }
}

/// Checks that depend only on (r, l): the pair is in the regime where the
/// calculus applies, and every proper part of the clique scores strictly
/// below zero.
fn parameter_rows(pp: &PairParams) -> Vec<LemmaRow> {
    let mut rows = Vec::new();
    match pp.epsilon() {
        Err(e) => {
            rows.push(LemmaRow::bad("parameters-in-regime", e.to_string()));
            return rows;
        }
        Ok(_) => rows.push(LemmaRow::ok("parameters-in-regime")),
    }
    let clique_edges = Graph::complete(pp.r()).edges();
    let full = clique_edges.len();
    let mut offender = None;
    for mask in 1u32..(1u32 << full) - 1 {
        let j = Subgraph::from_edges(
            clique_edges
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, e)| *e),
        );
        let b = beta_sub(&j, pp).expect("regime already checked");
        if b >= Rat::from_integer(0) {
            offender = Some((j, b));
            break;
        }
    }
    rows.push(match offender {
        None => LemmaRow::ok("beta-negative-on-proper-parts"),
        Some((j, b)) => LemmaRow::bad(
            "beta-negative-on-proper-parts",
            format!("part with {} edges scores {}", j.ecount(), b),
        ),
    });
    rows
}

/// Structural checks for a claimed critical hypergraph, then the growth
/// trace checks on top.
fn critical_rows(h: &Hypergraph, pp: &PairParams, rows: &mut Vec<LemmaRow>) {
    match star_critical(h) {
        Ok(()) => rows.push(LemmaRow::ok("star-critical")),
        Err(v) => rows.push(LemmaRow::bad("star-critical", format!("{v:?}"))),
    }
    let crit = ramsey_crit_check(h);
    rows.push(match crit.violation {
        None => LemmaRow::ok("private-intersections"),
        Some(v) => LemmaRow::bad("private-intersections", format!("{v:?}")),
    });

    let under = h.underlying();
    let (gc, names) = under.to_compact_graph();
    let r = pp.r();
    match partition_ab(&gc, r) {
        Err(e) => {
            rows.push(LemmaRow::bad("min-degree-at-least-r", e.to_string()));
            for name in ["degree-r-part-independent", "degree-into-heavy-part"] {
                rows.push(LemmaRow::bad(name, "degree partition undefined"));
            }
        }
        Ok(part) => {
            rows.push(LemmaRow::ok("min-degree-at-least-r"));
            let a = part.a_vertices();
            let mut adjacent_pair = None;
            'pairs: for (i, &u) in a.iter().enumerate() {
                for &v in &a[i + 1..] {
                    if gc.has_edge(u, v) {
                        adjacent_pair = Some((u, v));
                        break 'pairs;
                    }
                }
            }
            rows.push(match adjacent_pair {
                None => LemmaRow::ok("degree-r-part-independent"),
                Some((u, v)) => LemmaRow::bad(
                    "degree-r-part-independent",
                    format!("edge between degree-r vertices {} and {}", names[u], names[v]),
                ),
            });
            let mut starved = None;
            for v in 0..gc.n() {
                let heavy = (gc.neighbours(v) & part.b).count_ones() as usize;
                if heavy < r - 2 {
                    starved = Some((v, heavy));
                    break;
                }
            }
            rows.push(match starved {
                None => LemmaRow::ok("degree-into-heavy-part"),
                Some((v, heavy)) => LemmaRow::bad(
                    "degree-into-heavy-part",
                    format!("vertex {} sees only {} heavy neighbours", names[v], heavy),
                ),
            });
        }
    }

    match pp.epsilon() {
        Err(e) => rows.push(LemmaRow::bad("lambda-at-most-minus-epsilon", e.to_string())),
        Ok(eps) => {
            let lam = lambda_sub(&under, pp);
            rows.push(if lam <= -eps {
                LemmaRow::ok("lambda-at-most-minus-epsilon")
            } else {
                LemmaRow::bad(
                    "lambda-at-most-minus-epsilon",
                    format!("lambda {lam} exceeds -{eps}"),
                )
            });
        }
    }

    match hypertree_run(h, pp, RestrictionMode::SingleInput, None) {
        Ok(trace) => {
            rows.push(LemmaRow::ok("trace-runs"));
            rows.extend(verify_trace(&trace, pp).rows);
        }
        Err(e) => rows.push(LemmaRow::bad("trace-runs", e.to_string())),
    }
}

/// Run every applicable check over the corpus. Failed rows are data; the
/// only thing that aborts a row set early is an exhausted solver budget,
/// recorded on the item as `incomplete`.
pub fn verify_lemmas(corpus: &[CorpusItem], pp: &PairParams, budget: u64) -> CorpusReport {
    let mut items = vec![ItemReport {
        name: "(parameters)".to_string(),
        rows: parameter_rows(pp),
        incomplete: None,
    }];
    for item in corpus {
        let report = match item {
            CorpusItem::Critical { name, h } => {
                let mut rows = Vec::new();
                critical_rows(h, pp, &mut rows);
                ItemReport {
                    name: name.clone(),
                    rows,
                    incomplete: None,
                }
            }
            CorpusItem::Trace { name, trace } => ItemReport {
                name: name.clone(),
                rows: verify_trace(trace, pp).rows,
                incomplete: None,
            },
            CorpusItem::Plain { name, g } => {
                let mut rows = Vec::new();
                let mut incomplete = None;
                match find_crit(g, pp, budget) {
                    Ok(None) => rows.push(LemmaRow::of(
                        "host-decided",
                        true,
                        "not ramsey: no critical sub-hypergraph to check",
                    )),
                    Ok(Some(m)) => {
                        rows.push(LemmaRow::ok("host-decided"));
                        critical_rows(&m, pp, &mut rows);
                    }
                    Err(e @ SolveError::BudgetExceeded { .. }) => {
                        incomplete = Some(e.to_string());
                    }
                    Err(e) => rows.push(LemmaRow::bad("host-decided", e.to_string())),
                }
                ItemReport {
                    name: name.clone(),
                    rows,
                    incomplete,
                }
            }
        };
        items.push(report);
    }
    CorpusReport {
        schema_version: SCHEMA_VERSION,
        items,
    }
}

pub fn corpus_json(report: &CorpusReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn parse_corpus_json(text: &str) -> Result<CorpusReport, serde_json::Error> {
    serde_json::from_str(text)
}

/// Distinct fingerprints seen across a batch of runs, keyed by canonical
/// code so isomorphic outputs collapse to one class.
#[derive(Debug, Clone)]
pub struct OutCollection {
    /// Canonical code -> the first fingerprint that produced it.
    pub reps: BTreeMap<Vec<u8>, Graph>,
    /// One entry per input, in order: the code its run landed on.
    pub provenance: Vec<Vec<u8>>,
}

impl OutCollection {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Grow every input at ambient size n and collect the distinct fingerprint
/// classes. The class count is reported next to log2(n) for scale; nothing
/// asymptotic is claimed at these sizes.
pub fn collect_out(
    inputs: &[Hypergraph],
    pp: &PairParams,
    n: usize,
) -> Result<OutCollection, HyperTreeError> {
    let mut reps = BTreeMap::new();
    let mut provenance = Vec::with_capacity(inputs.len());
    for h in inputs {
        let trace = hypertree_run(h, pp, RestrictionMode::SingleInput, Some(n))?;
        let code = canonical_code(&trace.fingerprint);
        reps.entry(code.clone())
            .or_insert_with(|| trace.fingerprint.clone());
        provenance.push(code);
    }
    Ok(OutCollection { reps, provenance })
}

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutClassJson {
    pub code_hex: String,
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutReport {
    pub schema_version: u32,
    pub ambient_n: usize,
    pub log2_n: f64,
    pub out_size: usize,
    pub classes: Vec<OutClassJson>,
    /// Hex code per input, in input order.
    pub provenance: Vec<String>,
}

pub fn out_report(col: &OutCollection, n: usize) -> OutReport {
    OutReport {
        schema_version: SCHEMA_VERSION,
        ambient_n: n,
        log2_n: (n as f64).log2(),
        out_size: col.len(),
        classes: col
            .reps
            .iter()
            .map(|(code, g)| OutClassJson {
                code_hex: hex(code),
                n: g.n(),
                edges: g.edges().iter().map(|e| [e.u(), e.v()]).collect(),
            })
            .collect(),
        provenance: col.provenance.iter().map(|c| hex(c)).collect(),
    }
}

pub fn out_json(report: &OutReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn parse_out_json(text: &str) -> Result<OutReport, serde_json::Error> {
    serde_json::from_str(text)
}

/// Constants to evaluate the bound with; None picks the pair's own value.
#[derive(Debug, Clone, Default)]
pub struct ObservedConstants {
    pub out_size: Option<u64>,
    pub m: Option<Rat>,
    pub epsilon: Option<Rat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub schema_version: u32,
    pub r: usize,
    pub ell: usize,
    pub n: u64,
    pub out_size: Option<u64>,
    pub m: RatJson,
    pub epsilon: RatJson,
    /// The prefactor 2^(-2M) that the threshold scaling is quoted with.
    pub c: f64,
    /// (log2 n)^M
    pub log_factor: f64,
    /// n^(-epsilon)
    pub epsilon_term: f64,
    /// n^(-M)
    pub m_term: f64,
    /// log_factor * (epsilon_term + m_term)
    pub bound: f64,
}

/// Evaluate (log2 n)^M * (n^-epsilon + n^-M) at one concrete n, with M and
/// epsilon defaulting to the pair's clique score and margin. A numeric
/// illustration only: small-n values say nothing about the limit.
pub fn union_bound_report(
    pp: &PairParams,
    n: u64,
    observed: &ObservedConstants,
) -> Result<BoundReport, DensityError> {
    assert!(n >= 2, "bound needs n >= 2");
    let m = observed.m.unwrap_or_else(|| pp.lambda_clique());
    let epsilon = match observed.epsilon {
        Some(e) => e,
        None => pp.epsilon()?,
    };
    let mf = rat_to_f64(m);
    let ef = rat_to_f64(epsilon);
    let nf = n as f64;
    let log_factor = nf.log2().powf(mf);
    let epsilon_term = nf.powf(-ef);
    let m_term = nf.powf(-mf);
    Ok(BoundReport {
        schema_version: SCHEMA_VERSION,
        r: pp.r(),
        ell: pp.ell(),
        n,
        out_size: observed.out_size,
        m: m.into(),
        epsilon: epsilon.into(),
        c: 2f64.powf(-2.0 * mf),
        log_factor,
        epsilon_term,
        m_term,
        bound: log_factor * (epsilon_term + m_term),
    })
}

pub fn bound_json(report: &BoundReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn parse_bound_json(text: &str) -> Result<BoundReport, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::{build_hypergraph, Hyperedge};
    use crate::rational::rat;
    use crate::solver::DEFAULT_BUDGET;

    fn pp(r: usize, ell: usize) -> PairParams {
        PairParams::new(r, ell).unwrap()
    }

    #[test]
    fn degenerate_probabilities_pin_the_graph() {
        let mut rng = trial_stream(7, 0, 0);
        assert_eq!(sample_gnp(7, 0.0, &mut rng).ecount(), 0);
        let mut rng = trial_stream(7, 0, 1);
        assert_eq!(sample_gnp(7, 1.0, &mut rng).ecount(), 21);
    }

    #[test]
    fn edge_count_mean_matches_the_binomial() {
        let samples = 10_000u64;
        let mut total = 0u64;
        for t in 0..samples {
            let mut rng = trial_stream(42, 0, t);
            total += sample_gnp(10, 0.5, &mut rng).ecount() as u64;
        }
        let mean = total as f64 / samples as f64;
        // sd of the mean is sqrt(45/4 / samples)
        let three_sigma = 3.0 * (45.0 / 4.0 / samples as f64).sqrt();
        assert!(
            (mean - 22.5).abs() <= three_sigma,
            "mean {mean} strays from 22.5 by more than {three_sigma}"
        );
    }

    #[test]
    fn streams_replay_and_separate() {
        let a1: Vec<u64> = (0..4).map(|_| trial_stream(1, 2, 3).next_u64()).collect();
        let mut s = trial_stream(1, 2, 3);
        let a2: Vec<u64> = (0..4).map(|_| s.next_u64()).collect();
        assert_eq!(a1[0], a2[0]);
        assert_ne!(
            trial_stream(1, 2, 3).next_u64(),
            trial_stream(1, 2, 4).next_u64()
        );
        assert_ne!(
            trial_stream(1, 2, 3).next_u64(),
            trial_stream(1, 3, 3).next_u64()
        );
        assert_ne!(
            trial_stream(1, 2, 3).next_u64(),
            trial_stream(2, 2, 3).next_u64()
        );
    }

    #[test]
    fn wilson_brackets_the_sample_frequency() {
        let (lo, hi) = wilson_interval(5, 10, WILSON_Z_95);
        assert!((lo - 0.2366).abs() < 2e-3, "lo {lo}");
        assert!((hi - 0.7634).abs() < 2e-3, "hi {hi}");
        let (lo, hi) = wilson_interval(0, 10, WILSON_Z_95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.4);
        let (lo, hi) = wilson_interval(10, 10, WILSON_Z_95);
        assert!(lo > 0.6 && lo < 1.0);
        assert_eq!(hi, 1.0);
        assert_eq!(wilson_interval(0, 0, WILSON_Z_95), (0.0, 1.0));
    }

    #[test]
    fn config_validation_names_the_offence() {
        let base = McConfig {
            n: 8,
            r: 4,
            ell: 4,
            grid: ProbGrid::Explicit(vec![0.5]),
            trials: 4,
            master_seed: 0,
            budget: DEFAULT_BUDGET,
            z: WILSON_Z_95,
        };
        let mut cfg = base.clone();
        cfg.trials = 0;
        assert_eq!(mc_threshold(&cfg), Err(McError::NoTrials));
        let mut cfg = base.clone();
        cfg.grid = ProbGrid::Explicit(vec![1.5]);
        assert_eq!(mc_threshold(&cfg), Err(McError::BadProbability(1.5)));
        let mut cfg = base.clone();
        cfg.grid = ProbGrid::Explicit(vec![]);
        assert_eq!(mc_threshold(&cfg), Err(McError::EmptyGrid));
        let mut cfg = base.clone();
        cfg.grid = ProbGrid::Prefactors(vec![-1.0]);
        assert_eq!(mc_threshold(&cfg), Err(McError::BadPrefactor(-1.0)));
        let mut cfg = base;
        cfg.n = 65;
        assert_eq!(mc_threshold(&cfg), Err(McError::HostTooLarge(65)));
    }

    #[test]
    fn prefactors_scale_and_cap() {
        let cfg = McConfig {
            n: 12,
            r: 4,
            ell: 4,
            grid: ProbGrid::Prefactors(vec![0.5, 1.0, 100.0]),
            trials: 1,
            master_seed: 0,
            budget: DEFAULT_BUDGET,
            z: WILSON_Z_95,
        };
        let probs = cfg.probabilities().unwrap();
        // 1/m2 for the pair at (4,4) is 4/9
        let unit = (12f64).powf(-4.0 / 9.0);
        assert!((probs[0] - 0.5 * unit).abs() < 1e-15);
        assert!((probs[1] - unit).abs() < 1e-15);
        assert_eq!(probs[2], 1.0);
    }

    #[test]
    fn empty_edge_probability_never_arrows() {
        let cfg = McConfig {
            n: 10,
            r: 4,
            ell: 4,
            grid: ProbGrid::Explicit(vec![0.0]),
            trials: 6,
            master_seed: 9,
            budget: DEFAULT_BUDGET,
            z: WILSON_Z_95,
        };
        let rep = mc_threshold(&cfg).unwrap();
        assert_eq!(rep.points[0].ramsey, 0);
        assert_eq!(rep.points[0].not_ramsey, 6);
        assert_eq!(rep.points[0].budget_exceeded, 0);
    }

    #[test]
    fn full_edge_probability_always_arrows_at_ten() {
        let cfg = McConfig {
            n: 10,
            r: 4,
            ell: 4,
            grid: ProbGrid::Explicit(vec![1.0]),
            trials: 1,
            master_seed: 9,
            budget: DEFAULT_BUDGET,
            z: WILSON_Z_95,
        };
        let rep = mc_threshold(&cfg).unwrap();
        assert_eq!(rep.points[0].ramsey, cfg.trials);
    }

    #[test]
    fn reports_are_identical_across_thread_counts() {
        let cfg = McConfig {
            n: 8,
            r: 3,
            ell: 3,
            grid: ProbGrid::Explicit(vec![0.2, 0.6]),
            trials: 12,
            master_seed: 5,
            budget: DEFAULT_BUDGET,
            z: WILSON_Z_95,
        };
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_threshold(&cfg).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(3));
        assert_eq!(one, mc_threshold(&cfg).unwrap());
        for pt in &one.points {
            assert_eq!(pt.ramsey + pt.not_ramsey + pt.budget_exceeded, cfg.trials);
        }
    }

    #[test]
    fn starved_budget_is_reported_not_coerced() {
        let cfg = McConfig {
            n: 6,
            r: 3,
            ell: 3,
            grid: ProbGrid::Explicit(vec![1.0]),
            trials: 3,
            master_seed: 0,
            budget: 1,
            z: WILSON_Z_95,
        };
        let rep = mc_threshold(&cfg).unwrap();
        let pt = &rep.points[0];
        assert_eq!(pt.budget_exceeded, 3);
        assert_eq!(pt.ramsey, 0);
        assert_eq!(pt.not_ramsey, 0);
        assert_eq!((pt.lo, pt.hi), (0.0, 1.0));
    }

    #[test]
    fn frequency_rises_with_p_on_a_cheap_pair() {
        let cfg = McConfig {
            n: 6,
            r: 3,
            ell: 3,
            grid: ProbGrid::Explicit(vec![0.1, 1.0]),
            trials: 30,
            master_seed: 11,
            budget: DEFAULT_BUDGET,
            z: WILSON_Z_95,
        };
        let rep = mc_threshold(&cfg).unwrap();
        assert!(rep.points[0].hi < rep.points[1].lo);
        assert_eq!(rep.points[1].ramsey, 30);
    }

    #[test]
    fn supergraphs_of_an_arrowing_graph_still_arrow() {
        let p3 = pp(3, 3);
        assert!(arrow_graph(&Graph::complete(6), &p3, DEFAULT_BUDGET).is_ramsey());
        let mut bigger = Graph::new(7).unwrap();
        for e in Graph::complete(6).edges() {
            bigger.add_edge(e.u(), e.v()).unwrap();
        }
        bigger.add_edge(0, 6).unwrap();
        assert!(arrow_graph(&bigger, &p3, DEFAULT_BUDGET).is_ramsey());
    }

    #[test]
    fn csv_and_json_round_trip() {
        let report = McReport {
            schema_version: SCHEMA_VERSION,
            n: 12,
            r: 4,
            ell: 4,
            trials: 7,
            master_seed: 3,
            points: vec![
                GridPoint {
                    p: 0.1 + 0.2,
                    ramsey: 1,
                    not_ramsey: 5,
                    budget_exceeded: 1,
                    lo: 1.0 / 3.0,
                    hi: 2.0 / 3.0,
                },
                GridPoint {
                    p: 1.0,
                    ramsey: 7,
                    not_ramsey: 0,
                    budget_exceeded: 0,
                    lo: 0.6476598033081704,
                    hi: 1.0,
                },
            ],
        };
        assert_eq!(parse_mc_csv(&mc_csv(&report)).unwrap(), report.points);
        assert_eq!(parse_mc_json(&mc_json(&report)).unwrap(), report);
    }

    #[test]
    fn csv_parser_rejects_malformed_rows() {
        assert_eq!(parse_mc_csv("nope\n"), Err(CsvError::BadHeader));
        let text = format!("{MC_CSV_HEADER}\n0.5,1,2\n");
        assert_eq!(parse_mc_csv(&text), Err(CsvError::FieldCount { line: 2 }));
        let text = format!("{MC_CSV_HEADER}\n0.5,one,2,3,0.1,0.9\n");
        assert_eq!(
            parse_mc_csv(&text),
            Err(CsvError::BadNumber {
                line: 2,
                token: "one".to_string()
            })
        );
    }

    #[test]
    fn verified_corpus_passes_every_row() {
        let p = pp(4, 4);
        let h = build_hypergraph(&Graph::complete(6), &p);
        let trace = hypertree_run(&h, &p, RestrictionMode::SingleInput, None).unwrap();
        let corpus = vec![
            CorpusItem::Critical {
                name: "k6".to_string(),
                h,
            },
            CorpusItem::Trace {
                name: "k6-trace".to_string(),
                trace: Box::new(trace),
            },
            CorpusItem::Plain {
                name: "k4-host".to_string(),
                g: Graph::complete(4),
            },
        ];
        let report = verify_lemmas(&corpus, &p, DEFAULT_BUDGET);
        assert!(
            report.all_pass(),
            "failures: {:?}",
            report.failures()
        );
        assert!(!report.any_incomplete());
        assert_eq!(report.items.len(), 4);
        assert_eq!(report.items[0].name, "(parameters)");
        // every item contributed rows
        assert!(report.items.iter().all(|i| !i.rows.is_empty()));
        assert_eq!(parse_corpus_json(&corpus_json(&report)).unwrap(), report);
    }

    #[test]
    fn an_uncovered_hypervertex_fails_with_a_certificate() {
        let host = Graph::complete(4);
        let cycle = Hyperedge::cycle_from_vertices(&[0, 1, 2, 3]);
        let h = Hypergraph::new(host, vec![cycle]).unwrap();
        let corpus = vec![CorpusItem::Critical {
            name: "lone-cycle".to_string(),
            h,
        }];
        let report = verify_lemmas(&corpus, &pp(4, 4), DEFAULT_BUDGET);
        assert!(!report.all_pass());
        let failures = report.failures();
        let star = failures
            .iter()
            .find(|(item, row)| *item == "lone-cycle" && row.name == "star-critical")
            .expect("star-criticality row must fail");
        assert!(star.1.detail.contains("NoPrivateClique"));
    }

    #[test]
    fn a_starved_plain_item_is_incomplete_not_failed() {
        let corpus = vec![CorpusItem::Plain {
            name: "k10".to_string(),
            g: Graph::complete(10),
        }];
        let report = verify_lemmas(&corpus, &pp(4, 4), 50);
        assert!(report.all_pass());
        assert!(report.any_incomplete());
        let item = &report.items[1];
        assert!(item.incomplete.as_deref().unwrap().contains("budget"));
        assert!(item.rows.is_empty());
    }

    #[test]
    fn out_collection_dedups_relabellings() {
        let p = pp(4, 4);
        let h = build_hypergraph(&Graph::complete(6), &p);
        let relabelled = h.relabel(&[5, 4, 3, 2, 1, 0]);
        let col = collect_out(&[h, relabelled], &p, 6).unwrap();
        assert_eq!(col.len(), 1);
        assert_eq!(col.provenance[0], col.provenance[1]);
        // the representative reproduces its own code
        let (code, g) = col.reps.iter().next().unwrap();
        assert_eq!(&canonical_code(g), code);
        let report = out_report(&col, 6);
        assert_eq!(report.out_size, 1);
        assert!((report.log2_n - 6f64.log2()).abs() < 1e-15);
        assert_eq!(parse_out_json(&out_json(&report)).unwrap(), report);
    }

    #[test]
    fn out_collection_of_nothing_is_empty() {
        let col = collect_out(&[], &pp(4, 4), 16).unwrap();
        assert!(col.is_empty());
        assert!(col.provenance.is_empty());
    }

    #[test]
    fn distinct_growths_make_distinct_classes() {
        let p = pp(4, 4);
        let h6 = build_hypergraph(&Graph::complete(6), &p);
        let h7 = build_hypergraph(&Graph::complete(7), &p);
        let col = collect_out(&[h6, h7], &p, 7).unwrap();
        assert_eq!(col.provenance.len(), 2);
        // sizes differ, so the fingerprints cannot collide
        assert_eq!(col.len(), 2);
    }

    #[test]
    fn bound_report_matches_the_hand_evaluation() {
        let rep = union_bound_report(&pp(4, 4), 1 << 10, &ObservedConstants::default()).unwrap();
        assert_eq!(Rat::from(rep.m), rat(4, 3));
        assert_eq!(Rat::from(rep.epsilon), rat(1, 24));
        let log_factor = 10f64.powf(4.0 / 3.0);
        let eps_term = 2f64.powf(-10.0 / 24.0);
        let m_term = 2f64.powf(-40.0 / 3.0);
        assert!((rep.log_factor - log_factor).abs() < 1e-12 * log_factor);
        assert!((rep.epsilon_term - eps_term).abs() < 1e-12);
        assert!((rep.m_term - m_term).abs() < 1e-12);
        let bound = log_factor * (eps_term + m_term);
        assert!((rep.bound - bound).abs() < 1e-12 * bound);
        assert!((rep.c - 2f64.powf(-8.0 / 3.0)).abs() < 1e-15);
        assert_eq!(parse_bound_json(&bound_json(&rep)).unwrap(), rep);
    }

    #[test]
    fn smallest_n_drops_the_log_factor() {
        let rep = union_bound_report(&pp(4, 4), 2, &ObservedConstants::default()).unwrap();
        assert_eq!(rep.log_factor, 1.0);
        let expected = 2f64.powf(-1.0 / 24.0) + 2f64.powf(-4.0 / 3.0);
        assert!((rep.bound - expected).abs() < 1e-14);
    }

    #[test]
    fn huge_margin_leaves_only_the_m_term() {
        let observed = ObservedConstants {
            out_size: Some(3),
            m: None,
            epsilon: Some(rat(1000, 1)),
        };
        let rep = union_bound_report(&pp(4, 4), 1 << 10, &observed).unwrap();
        assert_eq!(rep.epsilon_term, 0.0);
        assert_eq!(rep.bound, rep.log_factor * rep.m_term);
        assert_eq!(rep.out_size, Some(3));
    }

    #[test]
    fn parameter_rows_catch_a_pair_without_a_margin() {
        // (3,3) has no stopping margin, so the parameter item must say so
        let p = pp(3, 3);
        let report = verify_lemmas(&[], &p, DEFAULT_BUDGET);
        assert!(!report.all_pass());
        assert_eq!(report.items[0].rows[0].name, "parameters-in-regime");
        assert!(!report.items[0].rows[0].pass);
    }
}
