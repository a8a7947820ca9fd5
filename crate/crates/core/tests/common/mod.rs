//! Oracles for the acceptance suite, coded on their own routes so they can
//! disagree with the library: subset maxima for the densities, permutation
//! isomorphism, a clause-level coloring search, and a full-enumeration
//! arrow decision for small hypergraphs.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Duration;

use ramsey_core::densities::PairParams;
use ramsey_core::graph::{Edge, Graph};
use ramsey_core::hyper::{HyperedgeKind, Hypergraph};
use ramsey_core::rational::{rat, rat_int, Rat};
use ramsey_core::solver::{find_crit, ColoringWitness};

pub fn criterion(idx: usize, name: &str, failures: &[String], elapsed: Duration) {
    if failures.is_empty() {
        println!("acceptance {idx} ({name}): pass [{elapsed:.2?}]");
    } else {
        println!("acceptance {idx} ({name}): FAIL [{elapsed:.2?}]");
        for f in failures {
            println!("  - {f}");
        }
        panic!("acceptance {idx} ({name}): {}", failures.join("; "));
    }
}

/// max over vertex subsets S, |S| >= 3, of (e(S) - 1) / (|S| - 2), counting
/// induced edges by raw adjacency probes.
pub fn brute_m2(g: &Graph) -> Rat {
    let n = g.n();
    let mut best: Option<Rat> = None;
    for mask in 0u64..(1 << n) {
        let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if verts.len() < 3 {
            continue;
        }
        let mut e: i128 = 0;
        for (i, &u) in verts.iter().enumerate() {
            for &v in &verts[i + 1..] {
                if g.has_edge(u, v) {
                    e += 1;
                }
            }
        }
        let cand = rat(e - 1, verts.len() as i128 - 2);
        if best.as_ref().map_or(true, |b| cand > *b) {
            best = Some(cand);
        }
    }
    best.expect("need at least three vertices")
}

/// max over vertex subsets S of f, |S| >= 2 with an induced edge, of
/// e(S) / (|S| - 2 + 1/m2(h)).
pub fn brute_m2_pair(f: &Graph, h: &Graph) -> Rat {
    let inv = brute_m2(h).recip();
    let n = f.n();
    let mut best: Option<Rat> = None;
    for mask in 0u64..(1 << n) {
        let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if verts.len() < 2 {
            continue;
        }
        let mut e: i128 = 0;
        for (i, &u) in verts.iter().enumerate() {
            for &v in &verts[i + 1..] {
                if f.has_edge(u, v) {
                    e += 1;
                }
            }
        }
        if e == 0 {
            continue;
        }
        let cand = rat_int(e) / (rat_int(verts.len() as i128 - 2) + inv);
        if best.as_ref().map_or(true, |b| cand > *b) {
            best = Some(cand);
        }
    }
    best.expect("host has no edges")
}

/// One representative per isomorphism class of graphs on v labelled
/// vertices, 2 <= v <= r, as (v, edge count, has a degree-1 vertex).
/// Classes are keyed by the minimum edge bitmask over all v! relabellings.
pub fn subgraph_classes(r: usize) -> Vec<(usize, usize, bool)> {
    assert!(r <= 6, "class enumeration sized for r <= 6");
    let mut out = Vec::new();
    for v in 2..=r {
        let pairs: Vec<(usize, usize)> = (0..v)
            .flat_map(|a| ((a + 1)..v).map(move |b| (a, b)))
            .collect();
        let idx_of = |a: usize, b: usize| -> usize {
            pairs
                .iter()
                .position(|&(x, y)| (x, y) == (a.min(b), a.max(b)))
                .unwrap()
        };
        let perms = all_perms(v);
        let mut seen = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << pairs.len()) {
            let mut canon = u32::MAX;
            for p in &perms {
                let mut m = 0u32;
                for (k, &(a, b)) in pairs.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        m |= 1 << idx_of(p[a], p[b]);
                    }
                }
                canon = canon.min(m);
            }
            if !seen.insert(canon) {
                continue;
            }
            let mut deg = vec![0usize; v];
            for (k, &(a, b)) in pairs.iter().enumerate() {
                if canon >> k & 1 == 1 {
                    deg[a] += 1;
                    deg[b] += 1;
                }
            }
            out.push((
                v,
                canon.count_ones() as usize,
                deg.iter().any(|&d| d == 1),
            ));
        }
    }
    out
}

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    let mut acc = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap_permute(&mut cur, n, &mut acc);
    acc
}

fn heap_permute(cur: &mut Vec<usize>, k: usize, acc: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        acc.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_permute(cur, k - 1, acc);
        if k % 2 == 0 {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

/// Literal: (variable, value that satisfies the clause). A clause holds when
/// at least one of its variables takes its wanted value.
pub type Clause = Vec<(usize, bool)>;

/// Lexicographic index of edge {u, v} among the pairs of [n].
pub fn edge_index(u: usize, v: usize, n: usize) -> usize {
    let (a, b) = (u.min(v), u.max(v));
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Clauses saying: no 4-clique all red (true), no 4-cycle all blue (false).
/// Returns (clauses, clique clause count, cycle clause count).
pub fn k4_c4_clauses(n: usize) -> (Vec<Clause>, usize, usize) {
    let mut clauses = Vec::new();
    let mut quads = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    quads.push([a, b, c, d]);
                }
            }
        }
    }
    let k4 = quads.len();
    for q in &quads {
        let mut cl = Vec::with_capacity(6);
        for i in 0..4 {
            for j in (i + 1)..4 {
                cl.push((edge_index(q[i], q[j], n), false));
            }
        }
        clauses.push(cl);
    }
    // the three 4-cycles on {a,b,c,d}: a-b-c-d, a-c-b-d, a-b-d-c
    let mut c4 = 0;
    for q in &quads {
        let [a, b, c, d] = *q;
        for cyc in [[a, b, c, d], [a, c, b, d], [a, b, d, c]] {
            let mut cl = Vec::with_capacity(4);
            for i in 0..4 {
                cl.push((edge_index(cyc[i], cyc[(i + 1) % 4], n), true));
            }
            clauses.push(cl);
            c4 += 1;
        }
    }
    (clauses, k4, c4)
}

/// Plain depth-first clause search with unit propagation; branches on a
/// variable from a shortest unresolved clause. Unconstrained variables are
/// left false in the model.
pub fn dpll(nvars: usize, clauses: &[Clause]) -> Option<Vec<bool>> {
    let mut assign = vec![-1i8; nvars];
    if search(&mut assign, clauses) {
        Some(assign.iter().map(|&x| x == 1).collect())
    } else {
        None
    }
}

fn search(assign: &mut Vec<i8>, clauses: &[Clause]) -> bool {
    let mut trail: Vec<usize> = Vec::new();
    let branch_var = loop {
        let mut forced: Option<(usize, bool)> = None;
        let mut conflict = false;
        let mut branch: Option<(usize, usize)> = None;
        'next: for cl in clauses {
            let mut open = 0;
            let mut last = (0usize, false);
            for &(v, want) in cl {
                match assign[v] {
                    -1 => {
                        open += 1;
                        if open == 1 {
                            last = (v, want);
                        }
                    }
                    x => {
                        if (x == 1) == want {
                            continue 'next;
                        }
                    }
                }
            }
            match open {
                0 => {
                    conflict = true;
                    break;
                }
                1 => {
                    forced = Some(last);
                    break;
                }
                k => {
                    if branch.map_or(true, |(bk, _)| k < bk) {
                        branch = Some((k, last.0));
                    }
                }
            }
        }
        if conflict {
            for v in trail {
                assign[v] = -1;
            }
            return false;
        }
        if let Some((v, want)) = forced {
            assign[v] = want as i8;
            trail.push(v);
            continue;
        }
        match branch {
            None => return true,
            Some((_, v)) => break v,
        }
    };
    for want in [true, false] {
        assign[branch_var] = want as i8;
        if search(assign, clauses) {
            return true;
        }
    }
    assign[branch_var] = -1;
    for v in trail {
        assign[v] = -1;
    }
    false
}

/// Arrow decision by checking all 2^|E| host colorings. Returns the decision
/// and, when colorable, one good coloring as red-flags in host edge order.
pub fn enumerate_arrow(h: &Hypergraph) -> (bool, Option<Vec<bool>>) {
    let edges = h.host().edges();
    assert!(edges.len() <= 20, "enumeration sized for small hosts");
    let index: BTreeMap<Edge, usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let masks: Vec<(bool, u32)> = h
        .hyperedges()
        .iter()
        .map(|he| {
            let mut m = 0u32;
            for e in he.edges() {
                m |= 1 << index[e];
            }
            (he.kind() == HyperedgeKind::Clique, m)
        })
        .collect();
    for red in 0u32..(1u32 << edges.len()) {
        let bad = masks.iter().any(|&(clique, m)| {
            if clique {
                red & m == m
            } else {
                red & m == 0
            }
        });
        if !bad {
            return (false, Some((0..edges.len()).map(|i| red >> i & 1 == 1).collect()));
        }
    }
    (true, None)
}

/// Witness check that touches nothing in the solver: every hyperedge must
/// be fully colored and carry an edge off its own color.
pub fn witness_beats_every_hyperedge(h: &Hypergraph, w: &ColoringWitness) -> Result<(), String> {
    for (i, he) in h.hyperedges().iter().enumerate() {
        let own = match he.kind() {
            HyperedgeKind::Clique => 1,
            HyperedgeKind::Cycle => 2,
        };
        let mut escaped = false;
        for e in he.edges() {
            match w.color(e) {
                None => return Err(format!("hyperedge {i} has uncolored edge {e:?}")),
                Some(c) if c != own => escaped = true,
                Some(_) => {}
            }
        }
        if !escaped {
            return Err(format!("hyperedge {i} is monochromatic in its own color"));
        }
    }
    Ok(())
}

static H_STAR: OnceLock<Hypergraph> = OnceLock::new();

/// The minimal Ramsey hypergraph extracted from K10 at (4,4), shared across
/// the suite.
pub fn h_star() -> &'static Hypergraph {
    H_STAR.get_or_init(|| {
        let pp = PairParams::new(4, 4).unwrap();
        find_crit(&Graph::complete(10), &pp, 4_000_000_000)
            .expect("budget suffices")
            .expect("K10 is Ramsey at (4,4)")
    })
}
