//! Local search that produces one individual.
//!
//! Starts from `k` independently constructed cliques, then repeatedly adds
//! a fresh clique and drops the lowest-score one. A move is kept only when
//! it strictly increases `W`, so the incumbent never gets worse. The search
//! stops after `m_step` consecutive rejected moves.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::deadline::Deadline;
use crate::graph::{Graph, Vertex, Weight};
use crate::solution::{Clique, Solution};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartBias {
    #[default]
    Uniform,
    WeightProportional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LsParams {
    /// Consecutive unimproved steps before the search gives up.
    pub m_step: usize,
    /// Candidates sampled per extension step when building a clique.
    pub bms_samples: usize,
    pub start_bias: StartBias,
}

impl Default for LsParams {
    fn default() -> Self {
        LsParams {
            m_step: 100,
            bms_samples: 64,
            start_bias: StartBias::Uniform,
        }
    }
}

/// Builds random maximal cliques of one graph.
///
/// A start vertex is drawn (uniformly or by weight), then the clique grows
/// while common neighbors remain. Each growth step draws
/// `min(bms_samples, |candidates|)` candidates uniformly with replacement
/// and takes the heaviest; ties go to the
/// candidate with more neighbors among the remaining candidates, then to
/// the lower id.
pub struct CliqueFinder<'g> {
    graph: &'g Graph,
    bms_samples: usize,
    start: Option<WeightedIndex<Weight>>,
    candidates: Vec<Vertex>,
}

impl<'g> CliqueFinder<'g> {
    pub fn new(graph: &'g Graph, params: &LsParams) -> Self {
        let start = match params.start_bias {
            StartBias::WeightProportional if graph.n() > 0 => {
                Some(WeightedIndex::new(graph.weights()).expect("weights are positive"))
            }
            _ => None,
        };
        CliqueFinder {
            graph,
            bms_samples: params.bms_samples.max(1),
            start,
            candidates: Vec::new(),
        }
    }

    fn candidate_degree(&self, v: Vertex) -> usize {
        self.candidates
            .iter()
            .filter(|&&u| self.graph.is_adjacent(u, v))
            .count()
    }

    /// Position in `candidates` of the preferred vertex among `positions`.
    fn pick(&self, positions: impl Iterator<Item = usize>) -> usize {
        let g = self.graph;
        let mut best: Option<(usize, Option<usize>)> = None;
        for pos in positions {
            let Some((best_pos, best_deg)) = best else {
                best = Some((pos, None));
                continue;
            };
            let (v, b) = (self.candidates[pos], self.candidates[best_pos]);
            if v == b {
                continue;
            }
            let better = match g.weight(v).cmp(&g.weight(b)) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => {
                    let bd = best_deg.unwrap_or_else(|| self.candidate_degree(b));
                    let vd = self.candidate_degree(v);
                    best = Some((best_pos, Some(bd)));
                    if vd != bd {
                        vd > bd
                    } else {
                        v < b
                    }
                }
            };
            if better {
                best = Some((pos, None));
            }
        }
        best.expect("at least one candidate").0
    }

    /// A maximal clique, or the empty clique when the graph has no vertices.
    pub fn find<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Clique {
        let g = self.graph;
        if g.n() == 0 {
            return Clique::empty();
        }
        let start = match &self.start {
            Some(dist) => dist.sample(rng),
            None => rng.gen_range(0..g.n()),
        };
        let mut members = vec![start];
        self.candidates.clear();
        self.candidates.extend_from_slice(g.neighbors(start));
        while !self.candidates.is_empty() {
            let len = self.candidates.len();
            let draws = len.min(self.bms_samples);
            let samples: Vec<usize> = (0..draws).map(|_| rng.gen_range(0..len)).collect();
            let pos = self.pick(samples.into_iter());
            let v = self.candidates.swap_remove(pos);
            members.push(v);
            self.candidates.retain(|&u| g.is_adjacent(u, v));
        }
        members.sort_unstable();
        Clique::from_sorted_unchecked(members)
    }
}

/// One-shot convenience wrapper around [`CliqueFinder`].
pub fn find_clique<R: Rng + ?Sized>(g: &Graph, rng: &mut R, params: &LsParams) -> Clique {
    CliqueFinder::new(g, params).find(rng)
}

pub fn local_search<'g, R: Rng + ?Sized>(
    g: &'g Graph,
    k: usize,
    params: &LsParams,
    rng: &mut R,
    deadline: &Deadline,
) -> Solution<'g> {
    run(g, k, params, rng, deadline, None)
}

/// Like [`local_search`], also recording `W` of the initial solution and
/// after every accepted move.
pub fn local_search_traced<'g, R: Rng + ?Sized>(
    g: &'g Graph,
    k: usize,
    params: &LsParams,
    rng: &mut R,
    deadline: &Deadline,
    trace: &mut Vec<Weight>,
) -> Solution<'g> {
    run(g, k, params, rng, deadline, Some(trace))
}

fn run<'g, R: Rng + ?Sized>(
    g: &'g Graph,
    k: usize,
    params: &LsParams,
    rng: &mut R,
    deadline: &Deadline,
    mut trace: Option<&mut Vec<Weight>>,
) -> Solution<'g> {
    let mut finder = CliqueFinder::new(g, params);
    let mut s = Solution::new(g);
    for _ in 0..k {
        s.push(finder.find(rng));
    }
    if let Some(t) = trace.as_deref_mut() {
        t.push(s.weight());
    }
    let mut step = 0;
    while step < params.m_step.max(1) && !deadline.expired() {
        step += 1;
        let c = finder.find(rng);
        let gain = s.gain(&c);
        s.push(c);
        let (idx, min_score) = s.argmin_score().expect("non-empty");
        // Dropping the newcomer restores the old state; otherwise the new
        // weight is W + gain - min_score.
        if idx + 1 < s.len() && gain > min_score {
            s.remove_clique(idx).expect("index from argmin");
            step = 0;
            if let Some(t) = trace.as_deref_mut() {
                t.push(s.weight());
            }
        } else {
            s.pop();
        }
    }
    s
}
