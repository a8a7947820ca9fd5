//! Edge labellings and their canonical extension along graph growth.
//!
//! A labelling is a bijection from the edges of a subgraph onto 1..=e. When
//! the graph grows, `extend_labelling` keeps every old label and hands the
//! new edges the next integers in an order that depends only on the shape of
//! the attachment: the graph generated by the new edges, anchored at the old
//! vertices it touches. Two growth steps whose attachments are isomorphic
//! over correspondingly ordered anchors therefore produce the same label
//! pattern, which is what makes traces built on top of this comparable
//! across reruns.

use std::collections::BTreeMap;

use crate::canon::anchored_canonical_form;
use crate::graph::{Edge, Subgraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeLabelling {
    labels: BTreeMap<Edge, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LabelError {
    #[error("new graph does not contain the old one")]
    NotAnExtension,
    #[error("labelling domain is not the old graph's edge set")]
    DomainMismatch,
}

impl EdgeLabelling {
    /// Label the edges of `sub` 1..=e in their natural (sorted) order.
    pub fn lex_for(sub: &Subgraph) -> EdgeLabelling {
        let labels = sub
            .edges()
            .enumerate()
            .map(|(i, e)| (*e, (i + 1) as u32))
            .collect();
        EdgeLabelling { labels }
    }

    pub fn get(&self, e: &Edge) -> Option<u32> {
        self.labels.get(e).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Edge, u32)> {
        self.labels.iter().map(|(e, &l)| (e, l))
    }

    /// True when the domain is exactly the edge set of `sub` and the labels
    /// are a bijection onto 1..=e.
    pub fn matches(&self, sub: &Subgraph) -> bool {
        if self.labels.len() != sub.ecount() {
            return false;
        }
        let mut seen = vec![false; self.labels.len()];
        for (e, &l) in &self.labels {
            if !sub.contains_edge(e) || l == 0 || l as usize > seen.len() {
                return false;
            }
            if seen[l as usize - 1] {
                return false;
            }
            seen[l as usize - 1] = true;
        }
        true
    }

    /// Sorted labels of the edges of `sub` incident to `v`. Distinct
    /// non-isolated vertices get distinct signatures except for the two
    /// endpoints of an isolated-edge component.
    pub fn vertex_signature(&self, sub: &Subgraph, v: usize) -> Vec<u32> {
        let mut sig: Vec<u32> = sub
            .edges()
            .filter(|e| e.touches(v))
            .filter_map(|e| self.get(e))
            .collect();
        sig.sort_unstable();
        sig
    }
}

/// Extend `prev` (a labelling of `g_prev`) to `g_new`.
///
/// Old labels are kept verbatim and the edges of `g_new` outside `g_prev`
/// get e(g_prev)+1.. in an order that is a pure function of the attachment:
/// the new-edge graph, anchored at the old vertices it meets, anchors
/// ordered by their incident-label signatures (host id breaking the rare
/// equal-signature tie, which needs an isolated-edge component in `g_prev`).
pub fn extend_labelling(
    prev: &EdgeLabelling,
    g_prev: &Subgraph,
    g_new: &Subgraph,
) -> Result<EdgeLabelling, LabelError> {
    if !g_prev.is_contained_in(g_new) {
        return Err(LabelError::NotAnExtension);
    }
    if !prev.matches(g_prev) {
        return Err(LabelError::DomainMismatch);
    }
    let new_edges: Vec<Edge> = g_new
        .edges()
        .filter(|e| !g_prev.contains_edge(e))
        .cloned()
        .collect();
    if new_edges.is_empty() {
        return Ok(prev.clone());
    }

    let attach = Subgraph::from_edges(new_edges.iter().cloned());
    let mut anchors: Vec<usize> = attach
        .vertices()
        .into_iter()
        .filter(|&v| g_prev.contains_vertex(v))
        .collect();
    anchors.sort_by_key(|&v| (prev.vertex_signature(g_prev, v), v));

    let (compact, vmap) = attach.to_compact_graph();
    let compact_id = |v: usize| vmap.binary_search(&v).unwrap();
    let anchor_ids: Vec<usize> = anchors.iter().map(|&v| compact_id(v)).collect();
    let form = anchored_canonical_form(&compact, &anchor_ids);

    // Sort new edges by their endpoint positions in the anchored canonical
    // order; the resulting sequence depends only on the attachment's
    // anchored isomorphism class.
    let mut ordered = new_edges;
    ordered.sort_by_key(|e| {
        let a = form.position[compact_id(e.u())];
        let b = form.position[compact_id(e.v())];
        (a.min(b), a.max(b))
    });

    let mut labels = prev.labels.clone();
    let base = prev.len() as u32;
    for (i, e) in ordered.into_iter().enumerate() {
        labels.insert(e, base + 1 + i as u32);
    }
    Ok(EdgeLabelling { labels })
}
