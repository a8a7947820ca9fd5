//! Exact density functionals for clique/cycle pairs.
//!
//! All of these return fractions in lowest terms; nothing here ever touches
//! floating point, because downstream stopping rules compare densities
//! against exact thresholds.

use thiserror::Error;

use crate::graph::{Graph, Subgraph};
use crate::rational::{binom, rat, rat_int, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DensityError {
    #[error("graph needs at least {need} vertices, has {got}")]
    TooFewVertices { need: usize, got: usize },
    #[error("graph needs at least one edge")]
    NoEdges,
    #[error("parameters out of range: need r >= {min_r} and ell >= {min_ell}, got r={r}, ell={ell}")]
    OutsideRange {
        r: usize,
        ell: usize,
        min_r: usize,
        min_ell: usize,
    },
    #[error("subgraph on {v} vertices does not fit in K_{r}")]
    TooLargeForClique { v: usize, r: usize },
}

/// e(G) / v(G).
pub fn edge_density(g: &Graph) -> Result<Rat, DensityError> {
    if g.n() == 0 {
        return Err(DensityError::TooFewVertices { need: 1, got: 0 });
    }
    Ok(rat(g.ecount() as i128, g.n() as i128))
}

/// 2-density: max over subgraphs J with v(J) >= 3 of (e(J) - 1)/(v(J) - 2).
/// Induced subgraphs on every vertex subset suffice, since for a fixed vertex
/// set the induced edge set maximizes the numerator.
pub fn m2(g: &Graph) -> Result<Rat, DensityError> {
    let n = g.n();
    if n < 3 {
        return Err(DensityError::TooFewVertices { need: 3, got: n });
    }
    let mut best: Option<Rat> = None;
    for mask in 0u64..(1u64 << n) {
        let v = mask.count_ones() as i128;
        if v < 3 {
            continue;
        }
        let e = g.edges_within(mask) as i128;
        let cand = rat(e - 1, v - 2);
        if best.as_ref().map_or(true, |b| cand > *b) {
            best = Some(cand);
        }
    }
    Ok(best.unwrap())
}

/// Asymmetric 2-density of the ordered pair (F, H):
/// max over subgraphs J of F with e(J) >= 1 of e(J) / (v(J) - 2 + 1/m2(H)).
pub fn m2_pair(f: &Graph, h: &Graph) -> Result<Rat, DensityError> {
    if f.ecount() == 0 {
        return Err(DensityError::NoEdges);
    }
    let inv_m2_h = m2(h)?.recip();
    let n = f.n();
    let mut best: Option<Rat> = None;
    for mask in 0u64..(1u64 << n) {
        let v = mask.count_ones() as i128;
        if v < 2 {
            continue;
        }
        let e = f.edges_within(mask) as i128;
        if e == 0 {
            continue;
        }
        let cand = rat_int(e) / (rat_int(v - 2) + inv_m2_h);
        if best.as_ref().map_or(true, |b| cand > *b) {
            best = Some(cand);
        }
    }
    Ok(best.unwrap())
}

/// Closed forms for the densities this crate works with. Valid from r,
/// ell >= 3; the cross-checks against the brute-force maxima live in the
/// acceptance suite.
pub fn m2_cycle_closed(ell: usize) -> Rat {
    assert!(ell >= 3);
    rat(ell as i128 - 1, ell as i128 - 2)
}

pub fn m2_clique_closed(r: usize) -> Rat {
    assert!(r >= 3);
    rat(r as i128 + 1, 2)
}

pub fn m2_pair_closed(r: usize, ell: usize) -> Rat {
    assert!(r >= 3 && ell >= 3);
    let (r, ell) = (r as i128, ell as i128);
    rat(
        binom(r as u64, 2) * (ell - 1),
        (r - 1) * (ell - 1) - 1,
    )
}

/// Threshold slack for the stopping rule:
/// epsilon = C(r,2) * (1/m2(K_r, C_ell) - 1/m*) with
/// m* = (r+1)/2 - 3/(2(r+3)), a certified lower bound on the maximum density
/// of the graphs the construction can stop on. Positive for r, ell >= 4.
pub fn epsilon(r: usize, ell: usize) -> Result<Rat, DensityError> {
    if r < 4 || ell < 4 {
        return Err(DensityError::OutsideRange {
            r,
            ell,
            min_r: 4,
            min_ell: 4,
        });
    }
    let m_star = m_star(r);
    let e = rat_int(binom(r as u64, 2)) * (m2_pair_closed(r, ell).recip() - m_star.recip());
    debug_assert!(e > rat_int(0));
    Ok(e)
}

/// (r+1)/2 - 3/(2(r+3)).
pub fn m_star(r: usize) -> Rat {
    let r = r as i128;
    rat(r + 1, 2) - rat(3, 2 * (r + 3))
}

/// Parameter bundle for a clique/cycle pair, with the derived constants the
/// rest of the crate keeps asking for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairParams {
    r: usize,
    ell: usize,
    m2_pair: Rat,
    m2_clique: Rat,
    m2_cycle: Rat,
    lambda_clique: Rat,
    epsilon: Option<Rat>,
}

impl PairParams {
    /// Needs r, ell >= 3. The guarantees that involve epsilon additionally
    /// need r, ell >= 4 (see `regime`).
    pub fn new(r: usize, ell: usize) -> Result<PairParams, DensityError> {
        if r < 3 || ell < 3 {
            return Err(DensityError::OutsideRange {
                r,
                ell,
                min_r: 3,
                min_ell: 3,
            });
        }
        let m2p = m2_pair_closed(r, ell);
        let lambda_clique = rat_int(r as i128) - rat_int(binom(r as u64, 2)) / m2p;
        Ok(PairParams {
            r,
            ell,
            m2_pair: m2p,
            m2_clique: m2_clique_closed(r),
            m2_cycle: m2_cycle_closed(ell),
            lambda_clique,
            epsilon: epsilon(r, ell).ok(),
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// True when r >= 4 and ell >= 4, the range in which every inequality
    /// this crate certifies is guaranteed to hold.
    pub fn regime(&self) -> bool {
        self.r >= 4 && self.ell >= 4
    }

    pub fn m2_pair(&self) -> Rat {
        self.m2_pair
    }

    pub fn m2_clique(&self) -> Rat {
        self.m2_clique
    }

    pub fn m2_cycle(&self) -> Rat {
        self.m2_cycle
    }

    /// lambda(K_r) under these parameters.
    pub fn lambda_clique(&self) -> Rat {
        self.lambda_clique
    }

    pub fn epsilon(&self) -> Result<Rat, DensityError> {
        self.epsilon.ok_or(DensityError::OutsideRange {
            r: self.r,
            ell: self.ell,
            min_r: 4,
            min_ell: 4,
        })
    }

    pub fn clique_edge_count(&self) -> usize {
        binom(self.r as u64, 2) as usize
    }
}

/// lambda(G) = v(G) - e(G)/m2(K_r, C_ell) for v and e given directly.
pub fn lambda_ve(v: usize, e: usize, pp: &PairParams) -> Rat {
    rat_int(v as i128) - rat_int(e as i128) / pp.m2_pair()
}

pub fn lambda_graph(g: &Graph, pp: &PairParams) -> Rat {
    lambda_ve(g.n(), g.ecount(), pp)
}

pub fn lambda_sub(s: &Subgraph, pp: &PairParams) -> Rat {
    lambda_ve(s.vcount(), s.ecount(), pp)
}

/// beta(J) = r - v(J) - (C(r,2) - e(J))/m2(K_r, C_ell), for J fitting in K_r.
pub fn beta_ve(v: usize, e: usize, pp: &PairParams) -> Result<Rat, DensityError> {
    if v > pp.r() {
        return Err(DensityError::TooLargeForClique { v, r: pp.r() });
    }
    let deficit = rat_int(binom(pp.r() as u64, 2) - e as i128);
    Ok(rat_int(pp.r() as i128 - v as i128) - deficit / pp.m2_pair())
}

pub fn beta_sub(j: &Subgraph, pp: &PairParams) -> Result<Rat, DensityError> {
    beta_ve(j.vcount(), j.ecount(), pp)
}

pub fn beta_graph(j: &Graph, pp: &PairParams) -> Result<Rat, DensityError> {
    beta_ve(j.n(), j.ecount(), pp)
}

/// lambda(F1 cup F2) - lambda(F1), computed from the intersection alone:
/// v(F2) - v(F1 cap F2) - (e(F2) - e(F1 cap F2)) / m2(K_r, C_ell).
pub fn lambda_increment(f1: &Subgraph, f2: &Subgraph, pp: &PairParams) -> Rat {
    let j = f1.intersection(f2);
    rat_int(f2.vcount() as i128 - j.vcount() as i128)
        - rat_int(f2.ecount() as i128 - j.ecount() as i128) / pp.m2_pair()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn edge_density_values() {
        assert_eq!(edge_density(&Graph::complete(4)).unwrap(), rat(3, 2));
        let e = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(edge_density(&e).unwrap(), rat(1, 2));
        assert!(edge_density(&Graph::new(0).unwrap()).is_err());
    }

    #[test]
    fn m2_known_values() {
        assert_eq!(m2(&Graph::cycle(4)).unwrap(), rat(3, 2));
        assert_eq!(m2(&Graph::complete(4)).unwrap(), rat(5, 2));
        assert_eq!(m2(&Graph::complete(5)).unwrap(), rat_int(3));
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(m2(&p3).unwrap(), rat_int(1));
        assert!(m2(&Graph::complete(2)).is_err());
    }

    #[test]
    fn m2_matches_cycle_and_clique_closed_forms() {
        for ell in 3..=8 {
            assert_eq!(m2(&Graph::cycle(ell)).unwrap(), m2_cycle_closed(ell));
        }
        for r in 3..=7 {
            assert_eq!(m2(&Graph::complete(r)).unwrap(), m2_clique_closed(r));
        }
    }

    #[test]
    fn m2_pair_known_values() {
        let val = |r: usize, ell: usize| {
            m2_pair(&Graph::complete(r), &Graph::cycle(ell)).unwrap()
        };
        assert_eq!(val(4, 4), rat(9, 4));
        assert_eq!(val(4, 5), rat(24, 11));
        assert_eq!(val(5, 4), rat(30, 11));
        assert_eq!(val(4, 4), m2_pair_closed(4, 4));
        assert!(m2_pair(&Graph::new(3).unwrap(), &Graph::cycle(4)).is_err());
    }

    #[test]
    fn epsilon_known_values() {
        assert_eq!(epsilon(4, 4).unwrap(), rat(1, 24));
        assert_eq!(epsilon(5, 4).unwrap(), rat(1, 9));
        assert_eq!(epsilon(4, 5).unwrap(), rat(1, 8));
        assert!(epsilon(3, 4).is_err());
        assert!(epsilon(4, 3).is_err());
    }

    #[test]
    fn m_star_exceeds_pair_density_for_short_cycles() {
        for r in 4..=12 {
            assert!(m_star(r) > m2_pair_closed(r, 4), "r = {r}");
        }
    }

    #[test]
    fn pair_density_sits_between_half_r_and_clique_density() {
        for r in 4..=7 {
            for ell in 4..=9 {
                let m = m2_pair_closed(r, ell);
                assert!(rat(r as i128, 2) < m);
                assert!(m < m2_clique_closed(r));
            }
        }
    }

    #[test]
    fn lambda_values() {
        let pp = PairParams::new(4, 4).unwrap();
        assert_eq!(lambda_graph(&Graph::complete(4), &pp), rat(4, 3));
        assert_eq!(pp.lambda_clique(), rat(4, 3));
        let single = Subgraph::from_edges([Edge::new(0, 1)]);
        assert_eq!(lambda_sub(&single, &pp), rat(14, 9));
        assert_eq!(lambda_ve(0, 0, &pp), rat_int(0));
    }

    #[test]
    fn beta_values() {
        let pp = PairParams::new(4, 4).unwrap();
        let k2 = Subgraph::from_edges([Edge::new(0, 1)]);
        assert_eq!(beta_sub(&k2, &pp).unwrap(), rat(-2, 9));
        let k3 = Subgraph::from_edges([Edge::new(0, 1), Edge::new(0, 2), Edge::new(1, 2)]);
        assert_eq!(beta_sub(&k3, &pp).unwrap(), rat(-1, 3));
        assert_eq!(beta_graph(&Graph::complete(4), &pp).unwrap(), rat_int(0));
        assert_eq!(
            beta_ve(5, 4, &pp),
            Err(DensityError::TooLargeForClique { v: 5, r: 4 })
        );
        // beta(K2) also equals 1/m2 - (ell-2)/(ell-1).
        assert_eq!(
            beta_sub(&k2, &pp).unwrap(),
            pp.m2_pair().recip() - rat(2, 3)
        );
    }

    #[test]
    fn lambda_increment_on_glued_cliques() {
        let pp = PairParams::new(4, 4).unwrap();
        let mut f1 = Subgraph::empty();
        let mut f2 = Subgraph::empty();
        for (s, verts) in [(&mut f1, [0usize, 1, 2, 3]), (&mut f2, [0, 1, 4, 5])] {
            for i in 0..4 {
                for j in (i + 1)..4 {
                    s.insert_edge(Edge::new(verts[i], verts[j]));
                }
            }
        }
        let inc = lambda_increment(&f1, &f2, &pp);
        assert_eq!(inc, rat(-2, 9));
        // Equals the direct difference and beta of the overlap.
        let direct = lambda_sub(&f1.union(&f2), &pp) - lambda_sub(&f1, &pp);
        assert_eq!(inc, direct);
        assert_eq!(inc, beta_sub(&f1.intersection(&f2), &pp).unwrap());
    }

    #[test]
    fn clique_density_profile_is_increasing() {
        // f(t) = C(t,2) / (t - 2 + 1/m2(C_ell)) strictly increases on [3, 10].
        for ell in 4..=8 {
            let inv = m2_cycle_closed(ell).recip();
            let f = |t: i128| rat_int(binom(t as u64, 2)) / (rat_int(t - 2) + inv);
            for t in 3..10 {
                assert!(f(t) < f(t + 1), "ell={ell}, t={t}");
            }
        }
    }

    #[test]
    fn pair_params_regime_flag() {
        assert!(PairParams::new(4, 4).unwrap().regime());
        let pp34 = PairParams::new(3, 4).unwrap();
        assert!(!pp34.regime());
        assert!(pp34.epsilon().is_err());
        assert!(PairParams::new(2, 4).is_err());
    }
}
