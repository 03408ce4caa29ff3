//! The collapse engine, the single-vertex step and the brute-force
//! identifiability oracle.
//!
//! A collapse removes a patched vertex from every edge containing it; the
//! terminal set of removed vertices does not depend on the order of
//! removals, which the engine exposes through interchangeable order
//! policies. The randomized policy draws uniformly over patches (not over
//! patched vertices), which is what makes the patch/debris counts of the
//! evolving hypergraph a Markov chain.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::hypergraph::Hypergraph;
use crate::{Error, Result};

/// How the next patch is selected.
#[derive(Debug, Clone)]
pub enum OrderPolicy {
    /// Uniform over patches.
    Randomized,
    /// Smallest patched vertex id first.
    LowestVertexFirst,
    /// A caller-supplied vertex sequence; selecting an unpatched vertex is
    /// an error naming the offending step.
    Explicit(Vec<u32>),
}

/// One removal: the state it produced and the increments that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepRecord {
    /// Index of the state the removal was made from; the first removal has
    /// `n = 0`.
    pub n: usize,
    pub vertex: u32,
    /// Patches on the removed vertex, `1 + W` in chain terms.
    pub patches_on_vertex: u64,
    /// 2-edges through the removed vertex that became patches, the `U` draw.
    pub new_patches: u64,
    /// Patch count after the removal, `Y_{n+1}`.
    pub y: u64,
    /// Debris count after the removal, `Z_{n+1}`.
    pub z: u64,
}

/// Full record of a collapse run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollapseTrace {
    pub steps: Vec<StepRecord>,
    /// Removed vertices in removal order; as a set this is V*.
    pub identifiable: Vec<u32>,
    /// |Λ*|, the number of identifiable hyperedges.
    pub lambda_star: u64,
    /// Debris count of the stable hypergraph, equal to `lambda_star`.
    pub terminal_debris: u64,
    /// (Y_0, Z_0) before any removal.
    pub initial_y: u64,
    pub initial_z: u64,
}

impl CollapseTrace {
    pub fn v_star(&self) -> u64 {
        self.identifiable.len() as u64
    }

    /// (Y, Z) trajectory including the initial state, indexed by n.
    pub fn trajectory(&self) -> Vec<[u64; 2]> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push([self.initial_y, self.initial_z]);
        out.extend(self.steps.iter().map(|s| [s.y, s.z]));
        out
    }
}

/// Collapses `h` to its stable hypergraph under the given order policy.
pub fn collapse<R: Rng + ?Sized>(
    h: &mut Hypergraph,
    policy: &OrderPolicy,
    rng: &mut R,
) -> Result<CollapseTrace> {
    let initial_y = h.patch_total() as u64;
    let initial_z = h.debris_count() as u64;
    let initial_edges = h.edge_count();
    let mut steps = Vec::new();
    let mut identifiable = Vec::new();
    let mut explicit = match policy {
        OrderPolicy::Explicit(seq) => Some(seq.iter().copied()),
        _ => None,
    };

    loop {
        let v = match policy {
            OrderPolicy::Randomized => match h.select_uniform_patch(rng) {
                Some(v) => v,
                None => break,
            },
            OrderPolicy::LowestVertexFirst => match h.lowest_patched_vertex() {
                Some(v) => v,
                None => break,
            },
            OrderPolicy::Explicit(_) => {
                if h.patch_total() == 0 {
                    break;
                }
                match explicit.as_mut().unwrap().next() {
                    Some(v) => {
                        if h.patch_count(v) == 0 {
                            return Err(Error::BadExplicitOrder {
                                vertex: v,
                                step: steps.len(),
                            });
                        }
                        v
                    }
                    None => break,
                }
            }
        };
        let n = steps.len();
        let (patches_removed, new_patches, _) = h.remove_vertex(v)?;
        debug_assert_eq!(h.edge_count(), initial_edges, "edge count is conserved");
        steps.push(StepRecord {
            n,
            vertex: v,
            patches_on_vertex: patches_removed as u64,
            new_patches: new_patches as u64,
            y: h.patch_total() as u64,
            z: h.debris_count() as u64,
        });
        identifiable.push(v);
    }

    // Every identifiable hyperedge ends up on the empty set, and the empty
    // set is a subset of V*, so for an exhausted run the terminal debris
    // count is exactly |Λ*|. An explicit order may stop early, in which
    // case the trace reports the state it reached.
    let terminal_debris = h.debris_count() as u64;
    Ok(CollapseTrace {
        steps,
        identifiable,
        lambda_star: terminal_debris,
        terminal_debris,
        initial_y,
        initial_z,
    })
}

/// Least-fixed-point identifiability oracle, straight from the definition:
/// grow I from ∅ by adding any vertex that belongs to an edge whose other
/// vertices all lie in I. Independent of the engine; quadratic and meant
/// for small instances.
pub fn identifiable_oracle(h: &Hypergraph) -> Vec<u32> {
    let edges = h.edge_sets();
    let mut member = vec![false; h.n_vertices()];
    let mut changed = true;
    while changed {
        changed = false;
        for e in &edges {
            for &v in e {
                if member[v as usize] {
                    continue;
                }
                if e.iter().all(|&u| u == v || member[u as usize]) {
                    member[v as usize] = true;
                    changed = true;
                }
            }
        }
    }
    member
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(v, _)| v as u32)
        .collect()
}
