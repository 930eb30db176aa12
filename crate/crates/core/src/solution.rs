//! Cliques and clique multisets with incremental coverage accounting.
//!
//! A [`Solution`] keeps, for every vertex, how many of its cliques contain
//! it. The covered weight `W(C)`, private vertex sets and clique scores are
//! all read off those counts, and adding, removing or swapping a clique
//! costs O(|clique|).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, Vertex, Weight};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolutionError {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("vertices {0} and {1} are not adjacent")]
    NotAClique(Vertex, Vertex),
    #[error("clique index {index} out of range (solution holds {len})")]
    IndexOutOfRange { index: usize, len: usize },
}

/// A vertex set stored ascending without duplicates. Whether it is a clique
/// is a property relative to some graph; constructors that take a graph
/// check it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Clique(Vec<Vertex>);

impl Clique {
    /// Sorts and deduplicates `vertices`, then checks pairwise adjacency in `g`.
    pub fn new(g: &Graph, mut vertices: Vec<Vertex>) -> Result<Self, SolutionError> {
        vertices.sort_unstable();
        vertices.dedup();
        check_clique(g, &vertices)?;
        Ok(Clique(vertices))
    }

    pub fn empty() -> Self {
        Clique(Vec::new())
    }

    /// Caller guarantees ascending, distinct, pairwise-adjacent vertices.
    pub(crate) fn from_sorted_unchecked(vertices: Vec<Vertex>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Clique(vertices)
    }

    #[inline]
    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn into_vertices(self) -> Vec<Vertex> {
        self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// `w(c)`: total weight of the members.
    pub fn weight(&self, g: &Graph) -> Weight {
        self.0.iter().map(|&v| g.weight(v)).sum()
    }

    /// True when no vertex outside the clique is adjacent to every member.
    pub fn is_maximal(&self, g: &Graph) -> bool {
        match self.0.first() {
            None => g.n() == 0,
            Some(&first) => !g
                .neighbors(first)
                .iter()
                .any(|&u| !self.contains(u) && self.0.iter().all(|&v| g.is_adjacent(u, v))),
        }
    }
}

fn check_clique(g: &Graph, vs: &[Vertex]) -> Result<(), SolutionError> {
    if let Some(&vertex) = vs.iter().find(|&&v| v >= g.n()) {
        return Err(SolutionError::VertexOutOfRange { vertex, n: g.n() });
    }
    for (i, &u) in vs.iter().enumerate() {
        for &v in &vs[i + 1..] {
            if u == v || !g.is_adjacent(u, v) {
                return Err(SolutionError::NotAClique(u, v));
            }
        }
    }
    Ok(())
}

/// Pairwise adjacency of `vs` in `g`. The empty set and singletons are cliques.
pub fn is_clique(g: &Graph, vs: &[Vertex]) -> Result<bool, SolutionError> {
    match check_clique(g, vs) {
        Ok(()) => Ok(true),
        Err(SolutionError::NotAClique(..)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// `W` of a clique collection recomputed from nothing but the vertex sets.
pub fn covered_weight(g: &Graph, cliques: &[Clique]) -> Weight {
    let mut seen = vec![false; g.n()];
    let mut total = 0;
    for v in cliques.iter().flat_map(|c| c.vertices()) {
        if !std::mem::replace(&mut seen[*v], true) {
            total += g.weight(*v);
        }
    }
    total
}

/// An ordered multiset of cliques over a host graph.
#[derive(Clone, Debug)]
pub struct Solution<'g> {
    graph: &'g Graph,
    cliques: Vec<Clique>,
    coverage: Vec<u32>,
    weight: Weight,
    covered: usize,
}

impl PartialEq for Solution<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.graph, other.graph) && self.cliques == other.cliques
    }
}

impl<'g> Solution<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Solution {
            graph,
            cliques: Vec::new(),
            coverage: vec![0; graph.n()],
            weight: 0,
            covered: 0,
        }
    }

    /// Builds a solution, checking that every clique is valid in `graph`.
    pub fn from_cliques(graph: &'g Graph, cliques: Vec<Clique>) -> Result<Self, SolutionError> {
        let mut s = Solution::new(graph);
        for c in cliques {
            s.add_clique(c)?;
        }
        Ok(s)
    }

    #[inline]
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    #[inline]
    pub fn cliques(&self) -> &[Clique] {
        &self.cliques
    }

    pub fn into_cliques(self) -> Vec<Clique> {
        self.cliques
    }

    /// Cached `W(C)`.
    #[inline]
    pub fn weight(&self) -> Weight {
        self.weight
    }

    /// `|cov(C)|`.
    #[inline]
    pub fn covered_count(&self) -> usize {
        self.covered
    }

    #[inline]
    pub fn coverage(&self, v: Vertex) -> u32 {
        self.coverage[v]
    }

    #[inline]
    pub fn is_covered(&self, v: Vertex) -> bool {
        self.coverage[v] > 0
    }

    fn check_index(&self, index: usize) -> Result<(), SolutionError> {
        if index < self.cliques.len() {
            Ok(())
        } else {
            Err(SolutionError::IndexOutOfRange {
                index,
                len: self.cliques.len(),
            })
        }
    }

    fn cover(&mut self, c: &Clique) {
        for &v in c.vertices() {
            if self.coverage[v] == 0 {
                self.weight += self.graph.weight(v);
                self.covered += 1;
            }
            self.coverage[v] += 1;
        }
    }

    fn uncover(&mut self, c: &Clique) {
        for &v in c.vertices() {
            self.coverage[v] -= 1;
            if self.coverage[v] == 0 {
                self.weight -= self.graph.weight(v);
                self.covered -= 1;
            }
        }
    }

    pub fn add_clique(&mut self, c: Clique) -> Result<(), SolutionError> {
        check_clique(self.graph, c.vertices())?;
        self.push(c);
        Ok(())
    }

    /// Appends a clique already known to be valid in the host graph.
    pub(crate) fn push(&mut self, c: Clique) {
        debug_assert!(check_clique(self.graph, c.vertices()).is_ok());
        self.cover(&c);
        self.cliques.push(c);
    }

    /// Removes the clique at `index`, keeping the order of the rest.
    pub fn remove_clique(&mut self, index: usize) -> Result<Clique, SolutionError> {
        self.check_index(index)?;
        let c = self.cliques.remove(index);
        self.uncover(&c);
        Ok(c)
    }

    pub(crate) fn pop(&mut self) -> Option<Clique> {
        let c = self.cliques.pop()?;
        self.uncover(&c);
        Some(c)
    }

    /// Replaces the clique at `index` in place and returns the old one.
    pub fn replace_clique(&mut self, index: usize, c: Clique) -> Result<Clique, SolutionError> {
        self.check_index(index)?;
        check_clique(self.graph, c.vertices())?;
        Ok(self.replace(index, c))
    }

    pub(crate) fn replace(&mut self, index: usize, c: Clique) -> Clique {
        debug_assert!(check_clique(self.graph, c.vertices()).is_ok());
        self.cover(&c);
        let old = std::mem::replace(&mut self.cliques[index], c);
        self.uncover(&old);
        old
    }

    /// `priv(c, C)`: members of clique `index` covered by no other clique.
    pub fn private_vertices(&self, index: usize) -> Result<Vec<Vertex>, SolutionError> {
        self.check_index(index)?;
        Ok(self.cliques[index]
            .vertices()
            .iter()
            .copied()
            .filter(|&v| self.coverage[v] == 1)
            .collect())
    }

    /// `score(c, C)`: the drop in `W` if clique `index` were removed.
    pub fn score(&self, index: usize) -> Result<Weight, SolutionError> {
        self.check_index(index)?;
        Ok(self.score_of(index))
    }

    #[inline]
    fn score_of(&self, index: usize) -> Weight {
        self.cliques[index]
            .vertices()
            .iter()
            .filter(|&&v| self.coverage[v] == 1)
            .map(|&v| self.graph.weight(v))
            .sum()
    }

    /// Lowest score and its index; ties go to the lowest index.
    pub fn argmin_score(&self) -> Option<(usize, Weight)> {
        let mut best: Option<(usize, Weight)> = None;
        for i in 0..self.cliques.len() {
            let s = self.score_of(i);
            if best.is_none_or(|(_, b)| s < b) {
                best = Some((i, s));
            }
        }
        best
    }

    /// Weight `c` would add if appended: its currently uncovered members.
    pub fn gain(&self, c: &Clique) -> Weight {
        c.vertices()
            .iter()
            .filter(|&&v| self.coverage[v] == 0)
            .map(|&v| self.graph.weight(v))
            .sum()
    }

    /// `W(C \ {c_out} ∪ {c_in}) − W(C)` for `c_out` the clique at `out_index`,
    /// in O(|c_out| + |c_in|).
    pub fn swap_delta(&self, out_index: usize, c_in: &Clique) -> Result<Weight, SolutionError> {
        self.check_index(out_index)?;
        Ok(self.swap_delta_of(out_index, c_in))
    }

    pub(crate) fn swap_delta_of(&self, out_index: usize, c_in: &Clique) -> Weight {
        let out = self.cliques[out_index].vertices();
        let inc = c_in.vertices();
        let mut delta = 0;
        let (mut i, mut j) = (0, 0);
        // Merge the two sorted vertex lists.
        while i < out.len() || j < inc.len() {
            let a = out.get(i).copied().unwrap_or(Vertex::MAX);
            let b = inc.get(j).copied().unwrap_or(Vertex::MAX);
            if a == b {
                i += 1;
                j += 1;
            } else if a < b {
                if self.coverage[a] == 1 {
                    delta -= self.graph.weight(a);
                }
                i += 1;
            } else {
                if self.coverage[b] == 0 {
                    delta += self.graph.weight(b);
                }
                j += 1;
            }
        }
        delta
    }

    /// Recounts coverage and weight from the clique list and compares with
    /// the cached values.
    pub fn check_accounting(&self) -> Result<(), String> {
        let mut counts = vec![0u32; self.graph.n()];
        for v in self.cliques.iter().flat_map(|c| c.vertices()) {
            counts[*v] += 1;
        }
        if counts != self.coverage {
            return Err("coverage counts out of sync".into());
        }
        let w = covered_weight(self.graph, &self.cliques);
        if w != self.weight {
            return Err(format!("cached weight {} != recomputed {w}", self.weight));
        }
        if counts.iter().filter(|&&c| c > 0).count() != self.covered {
            return Err("covered count out of sync".into());
        }
        Ok(())
    }

    /// Full validity check: accounting plus the clique property of every member.
    pub fn validate(&self) -> Result<(), String> {
        for c in &self.cliques {
            check_clique(self.graph, c.vertices()).map_err(|e| e.to_string())?;
        }
        self.check_accounting()
    }
}
