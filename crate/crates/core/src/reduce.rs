//! Pseudo graph reduction.
//!
//! Vertices of degree 0 or 1 are set aside before local search and the
//! search runs on the subgraph induced by the rest. Afterwards
//! [`post_reduction`] offers each set-aside vertex's closed neighborhood
//! (a clique of size 1 or 2) as a replacement for the lowest-score clique.
//! The reduction carries no optimality guarantee.

use crate::graph::{Graph, Vertex};
use crate::solution::{Clique, Solution};

#[derive(Clone, Debug)]
pub struct Reduction {
    isolated: Vec<Vertex>,
    leaves: Vec<Vertex>,
    reduced: Graph,
    to_original: Vec<Vertex>,
    /// `N(v) ∪ {v}` for every `v` in `isolated ∪ leaves`, ascending by `v`.
    repair_cliques: Vec<Clique>,
}

/// Splits off degree-0 and degree-1 vertices of `g` in a single pass over
/// the original degrees; the reduced graph is not reduced again.
pub fn classify_vertices(g: &Graph) -> Reduction {
    let mut isolated = Vec::new();
    let mut leaves = Vec::new();
    let mut keep = Vec::new();
    let mut repair_cliques = Vec::new();
    for v in 0..g.n() {
        match g.degree(v) {
            0 => isolated.push(v),
            1 => leaves.push(v),
            _ => {
                keep.push(v);
                continue;
            }
        }
        let mut members = g.neighbors(v).to_vec();
        members.push(v);
        members.sort_unstable();
        repair_cliques.push(Clique::from_sorted_unchecked(members));
    }
    Reduction {
        isolated,
        leaves,
        reduced: g.induced_subgraph(&keep),
        to_original: keep,
        repair_cliques,
    }
}

impl Reduction {
    /// The no-op reduction: the search graph is `g` itself.
    pub fn identity(g: &Graph) -> Reduction {
        Reduction {
            isolated: Vec::new(),
            leaves: Vec::new(),
            reduced: g.clone(),
            to_original: (0..g.n()).collect(),
            repair_cliques: Vec::new(),
        }
    }

    pub fn isolated(&self) -> &[Vertex] {
        &self.isolated
    }

    pub fn leaves(&self) -> &[Vertex] {
        &self.leaves
    }

    pub fn reduced(&self) -> &Graph {
        &self.reduced
    }

    pub fn to_original(&self, v: Vertex) -> Vertex {
        self.to_original[v]
    }

    /// Translates a clique of the reduced graph into original ids. The id
    /// map is increasing, so order is preserved.
    pub fn lift_clique(&self, c: &Clique) -> Clique {
        Clique::from_sorted_unchecked(c.vertices().iter().map(|&v| self.to_original[v]).collect())
    }

    /// Lifts a reduced-graph solution onto the original graph `g`.
    pub fn lift<'g>(&self, g: &'g Graph, s: &Solution<'_>) -> Solution<'g> {
        let mut out = Solution::new(g);
        for c in s.cliques() {
            out.push(self.lift_clique(c));
        }
        out
    }

    pub fn repair_cliques(&self) -> &[Clique] {
        &self.repair_cliques
    }
}

/// Offers each set-aside vertex's closed neighborhood to `s` in ascending
/// vertex order: if its weight beats the current minimum clique score it is
/// added and the lowest-score clique of the enlarged solution is dropped.
/// While `s` holds fewer than `k` cliques an accepted candidate is appended
/// without a removal. Never decreases `W` and never changes a full
/// solution's clique count.
pub fn post_reduction(g: &Graph, r: &Reduction, s: &mut Solution<'_>, k: usize) {
    let before = s.weight();
    for c in &r.repair_cliques {
        let candidate_weight = c.weight(g);
        // A free slot counts as a clique of score 0.
        let passes = match s.argmin_score() {
            Some((_, min_score)) if s.len() >= k => candidate_weight > min_score,
            _ => candidate_weight > 0,
        };
        if !passes {
            continue;
        }
        s.push(c.clone());
        if s.len() > k {
            let (idx, _) = s.argmin_score().expect("non-empty");
            s.remove_clique(idx).expect("index from argmin");
        }
    }
    debug_assert!(s.weight() >= before);
}
