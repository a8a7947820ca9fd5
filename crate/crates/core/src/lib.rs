//! Exact combinatorics for Ramsey-type questions about clique/cycle pairs.
//!
//! The crate provides, at desk scale: bitset graphs with exact canonical
//! forms, the rational density calculus (m2, asymmetric m2, lambda, beta),
//! clique/cycle enumeration and the induced Ramsey hypergraph, an exhaustive
//! arrow solver with minimization down to star-critical hypergraphs, the
//! hypertree/flower fingerprint construction with full inequality audits,
//! and seeded Monte Carlo threshold experiments on G(n,p).

#![forbid(unsafe_code)]

pub mod canon;
pub mod densities;
pub mod experiments;
pub mod format;
pub mod graph;
pub mod hyper;
pub mod hypertree;
pub mod labelling;
pub mod rational;
pub mod solver;
