//! Finite multi-hypergraph data model and the Poisson(β) sampler.
//!
//! Vertices are dense ids `0..N`. Edges are stored as explicit vertex lists
//! so the collapse engine can shrink them in place: removing a vertex swaps
//! it past a live-size cursor instead of reallocating. Multiplicity is
//! implicit in the edge multiset — two hyperedges on the same subset are two
//! entries. Size-1 edges (patches) are indexed in a token vector supporting
//! O(1) uniform selection and O(1) deletion; size-0 edges are debris and are
//! only counted.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use smallvec::SmallVec;

use crate::beta::BetaSeries;
use crate::{Error, Result};

const NOT_A_PATCH: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub(crate) struct Edge {
    verts: SmallVec<[u32; 8]>,
    /// Vertices in `verts[..live]` are still present; the rest were removed.
    live: u32,
    /// Position in the patch token vector, `NOT_A_PATCH` when size != 1.
    token_pos: u32,
}

impl Edge {
    fn new(verts: SmallVec<[u32; 8]>) -> Self {
        let live = verts.len() as u32;
        Edge {
            verts,
            live,
            token_pos: NOT_A_PATCH,
        }
    }

    #[inline]
    pub(crate) fn live_verts(&self) -> &[u32] {
        &self.verts[..self.live as usize]
    }

    #[inline]
    pub(crate) fn live_size(&self) -> usize {
        self.live as usize
    }
}

/// A multi-hypergraph on `0..n_vertices` with patch and debris bookkeeping.
#[derive(Debug, Clone)]
pub struct Hypergraph {
    n_vertices: usize,
    edges: Vec<Edge>,
    /// Edge ids containing each vertex, fixed at construction.
    incidence: Vec<Vec<u32>>,
    /// Ids of current size-1 edges; one token per patch.
    patch_tokens: Vec<u32>,
    /// Live patches per vertex.
    patch_count: Vec<u32>,
    /// Vertices with at least one patch, for deterministic selection.
    patched_vertices: BTreeSet<u32>,
    debris_count: usize,
}

impl Hypergraph {
    /// Builds a hypergraph from explicit edges. Vertex lists are sorted;
    /// out-of-range or repeated vertices within an edge are rejected. An
    /// empty list is a debris edge.
    pub fn from_edges(n_vertices: usize, edge_lists: Vec<Vec<u32>>) -> Result<Self> {
        let mut h = Self::empty(n_vertices);
        for verts in edge_lists {
            h.push_edge(verts)?;
        }
        Ok(h)
    }

    fn empty(n_vertices: usize) -> Self {
        Hypergraph {
            n_vertices,
            edges: Vec::new(),
            incidence: vec![Vec::new(); n_vertices],
            patch_tokens: Vec::new(),
            patch_count: vec![0; n_vertices],
            patched_vertices: BTreeSet::new(),
            debris_count: 0,
        }
    }

    fn push_edge(&mut self, mut verts: Vec<u32>) -> Result<()> {
        verts.sort_unstable();
        if verts.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parse(format!("repeated vertex in edge {verts:?}")));
        }
        if let Some(&v) = verts.last() {
            if v as usize >= self.n_vertices {
                return Err(Error::Parse(format!(
                    "vertex {v} out of range for N = {}",
                    self.n_vertices
                )));
            }
        }
        self.push_edge_unchecked(SmallVec::from_vec(verts));
        Ok(())
    }

    fn push_edge_unchecked(&mut self, verts: SmallVec<[u32; 8]>) {
        let id = self.edges.len() as u32;
        for &v in &verts {
            self.incidence[v as usize].push(id);
        }
        let mut edge = Edge::new(verts);
        match edge.live {
            0 => self.debris_count += 1,
            1 => {
                edge.token_pos = self.patch_tokens.len() as u32;
                self.patch_tokens.push(id);
                let v = edge.verts[0];
                self.patch_count[v as usize] += 1;
                if self.patch_count[v as usize] == 1 {
                    self.patched_vertices.insert(v);
                }
            }
            _ => {}
        }
        self.edges.push(edge);
    }

    /// Samples a Poisson(β) hypergraph: for each coefficient index `j` the
    /// total number of j-edges is Poisson(N β_j), and each edge sits on an
    /// independent uniform j-subset. The induced count on any fixed j-subset
    /// is then Poisson(N β_j / C(N,j)), independent across subsets.
    pub fn sample_poisson<R: Rng + ?Sized>(
        series: &BetaSeries,
        n_vertices: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if n_vertices < 1 {
            return Err(Error::Domain("need at least one vertex".into()));
        }
        if series.degree() > n_vertices {
            return Err(Error::SupportExceedsVertices {
                size: series.degree(),
                n_vertices,
            });
        }
        let mut h = Self::empty(n_vertices);
        let mut picker = SubsetPicker::new(n_vertices);
        for (j, &beta_j) in series.coeffs().iter().enumerate() {
            if beta_j == 0.0 {
                continue;
            }
            let mean = n_vertices as f64 * beta_j;
            let count = poisson_u64(mean, rng);
            for _ in 0..count {
                let verts = picker.draw(j, rng);
                h.push_edge_unchecked(verts);
            }
        }
        Ok(h)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Total number of hyperedges |Λ|, conserved by collapse.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Current number of patches (size-1 edges).
    pub fn patch_total(&self) -> usize {
        self.patch_tokens.len()
    }

    /// Current number of patches on a single vertex, `Λ({v})`.
    pub fn patch_count(&self, v: u32) -> u32 {
        self.patch_count[v as usize]
    }

    /// Current amount of debris (size-0 edges).
    pub fn debris_count(&self) -> usize {
        self.debris_count
    }

    /// Smallest vertex id currently carrying a patch.
    pub fn lowest_patched_vertex(&self) -> Option<u32> {
        self.patched_vertices.first().copied()
    }

    /// Uniform draw over patches (not patched vertices); returns the vertex
    /// under the selected patch.
    pub fn select_uniform_patch<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<u32> {
        if self.patch_tokens.is_empty() {
            return None;
        }
        let eid = self.patch_tokens[rng.random_range(0..self.patch_tokens.len())];
        Some(self.edges[eid as usize].verts[0])
    }

    /// Live vertex lists of all edges, sorted within each edge (debris edges
    /// come out empty). The multiset view used by oracles and serialization.
    pub fn edge_sets(&self) -> Vec<Vec<u32>> {
        self.edges
            .iter()
            .map(|e| {
                let mut v: Vec<u32> = e.live_verts().to_vec();
                v.sort_unstable();
                v
            })
            .collect()
    }

    /// Removes `v` from every edge containing it. Requires a patch on `v`.
    /// Returns `(patches_removed, new_patches, new_debris)`.
    pub fn remove_vertex(&mut self, v: u32) -> Result<(usize, usize, usize)> {
        if (v as usize) >= self.n_vertices {
            return Err(Error::Domain(format!("vertex {v} out of range")));
        }
        if self.patch_count[v as usize] == 0 {
            return Err(Error::NoPatch(v));
        }
        let mut patches_removed = 0;
        let mut new_patches = 0;
        for k in 0..self.incidence[v as usize].len() {
            let eid = self.incidence[v as usize][k];
            let edge = &mut self.edges[eid as usize];
            debug_assert!(edge.live > 0, "edge incident to a live vertex is live");
            // Swap v past the live cursor.
            let live = edge.live as usize;
            let pos = edge.verts[..live]
                .iter()
                .position(|&u| u == v)
                .expect("incidence lists every edge containing v");
            edge.verts.swap(pos, live - 1);
            edge.live -= 1;
            match edge.live {
                0 => {
                    // Was a patch on v; it turns to debris.
                    let token = edge.token_pos;
                    edge.token_pos = NOT_A_PATCH;
                    self.remove_token(token);
                    self.debris_count += 1;
                    patches_removed += 1;
                }
                1 => {
                    // A 2-edge through v became a patch on its other end.
                    edge.token_pos = self.patch_tokens.len() as u32;
                    let u = edge.verts[0];
                    self.patch_tokens.push(eid);
                    self.patch_count[u as usize] += 1;
                    if self.patch_count[u as usize] == 1 {
                        self.patched_vertices.insert(u);
                    }
                    new_patches += 1;
                }
                _ => {}
            }
        }
        self.patch_count[v as usize] -= patches_removed as u32;
        debug_assert_eq!(self.patch_count[v as usize], 0);
        self.patched_vertices.remove(&v);
        Ok((patches_removed, new_patches, patches_removed))
    }

    fn remove_token(&mut self, pos: u32) {
        let pos = pos as usize;
        self.patch_tokens.swap_remove(pos);
        if pos < self.patch_tokens.len() {
            let moved = self.patch_tokens[pos];
            self.edges[moved as usize].token_pos = pos as u32;
        }
    }

    /// Recomputes every derived index from the edge lists and compares with
    /// the stored state. Used after mutations in tests.
    pub fn check_index_consistency(&self) -> Result<()> {
        let mut debris = 0usize;
        let mut patch_per_vertex = vec![0u32; self.n_vertices];
        let mut patch_ids: Vec<u32> = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            match e.live_size() {
                0 => debris += 1,
                1 => {
                    patch_per_vertex[e.verts[0] as usize] += 1;
                    patch_ids.push(id as u32);
                }
                _ => {}
            }
        }
        let mut stored: Vec<u32> = self.patch_tokens.clone();
        stored.sort_unstable();
        patch_ids.sort_unstable();
        let patched: BTreeSet<u32> = patch_per_vertex
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(v, _)| v as u32)
            .collect();
        if debris != self.debris_count
            || patch_per_vertex != self.patch_count
            || stored != patch_ids
            || patched != self.patched_vertices
        {
            return Err(Error::Parse("index inconsistency".into()));
        }
        for (pos, &eid) in self.patch_tokens.iter().enumerate() {
            if self.edges[eid as usize].token_pos != pos as u32 {
                return Err(Error::Parse("token back-pointer inconsistency".into()));
            }
        }
        Ok(())
    }

    /// Writes the edge-list format: a `N=<int>` header, then one edge per
    /// line as space-separated vertex ids, a blank line being a debris edge.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "N={}", self.n_vertices)?;
        for e in self.edge_sets() {
            let line: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Reads the format produced by [`Hypergraph::write_to`].
    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty file".into()))??;
        let n: usize = header
            .strip_prefix("N=")
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad vertex count: {e}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let line = line?;
            if line.is_empty() {
                edges.push(Vec::new());
                continue;
            }
            let verts = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u32>()
                        .map_err(|e| Error::Parse(format!("bad vertex id {tok:?}: {e}")))
                })
                .collect::<Result<Vec<u32>>>()?;
            edges.push(verts);
        }
        Self::from_edges(n, edges)
    }
}

/// Uniform j-subset sampling by partial Fisher–Yates over a reused index
/// buffer; the buffer stays permuted between draws, which preserves
/// uniformity and keeps each draw O(j).
pub(crate) struct SubsetPicker {
    buf: Vec<u32>,
}

impl SubsetPicker {
    pub(crate) fn new(n: usize) -> Self {
        SubsetPicker {
            buf: (0..n as u32).collect(),
        }
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&mut self, j: usize, rng: &mut R) -> SmallVec<[u32; 8]> {
        let n = self.buf.len();
        debug_assert!(j <= n);
        for k in 0..j {
            let pick = rng.random_range(k..n);
            self.buf.swap(k, pick);
        }
        let mut out: SmallVec<[u32; 8]> = SmallVec::from_slice(&self.buf[..j]);
        out.sort_unstable();
        out
    }
}

/// Uniform j-subset of `0..n`, sorted.
pub fn uniform_subset<R: Rng + ?Sized>(n: usize, j: usize, rng: &mut R) -> Result<Vec<u32>> {
    if j > n {
        return Err(Error::SupportExceedsVertices {
            size: j,
            n_vertices: n,
        });
    }
    Ok(SubsetPicker::new(n).draw(j, rng).to_vec())
}

/// Exact Poisson draw as a count. `rand_distr` rejects mean 0, which is a
/// legitimate parameter here.
pub(crate) fn poisson_u64<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    debug_assert!(mean >= 0.0);
    if mean == 0.0 {
        return 0;
    }
    let draw: f64 = Poisson::new(mean).expect("positive finite mean").sample(rng);
    draw as u64
}
