//! Exact reference solver for tiny instances.
//!
//! Maximal cliques come from Bron–Kerbosch with Tomita pivoting. Since
//! growing a clique never shrinks coverage, some optimal solution uses only
//! maximal cliques, so the optimum is a search over subsets of at most `k`
//! of them.

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::graph::{Graph, Vertex, Weight};
use crate::solution::{Clique, Solution};

/// Default limit on the number of clique subsets the exact search may visit.
pub const DEFAULT_SUBSET_CAP: u128 = 200_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{subsets} clique subsets exceed the cap of {cap}")]
    TooLarge { subsets: u128, cap: u128 },
}

fn neighbor_rows(g: &Graph) -> Vec<FixedBitSet> {
    (0..g.n())
        .map(|v| {
            let mut row = FixedBitSet::with_capacity(g.n());
            for &u in g.neighbors(v) {
                row.insert(u);
            }
            row
        })
        .collect()
}

fn bron_kerbosch(
    rows: &[FixedBitSet],
    current: &mut Vec<Vertex>,
    mut candidates: FixedBitSet,
    mut excluded: FixedBitSet,
    out: &mut Vec<Clique>,
) {
    if candidates.is_clear() {
        if excluded.is_clear() {
            let mut members = current.clone();
            members.sort_unstable();
            out.push(Clique::from_sorted_unchecked(members));
        }
        return;
    }
    let pivot = candidates
        .ones()
        .chain(excluded.ones())
        .max_by_key(|&u| candidates.intersection(&rows[u]).count())
        .expect("candidates non-empty");
    let branch: Vec<Vertex> = candidates.difference(&rows[pivot]).collect();
    for v in branch {
        current.push(v);
        let mut next_candidates = candidates.clone();
        next_candidates.intersect_with(&rows[v]);
        let mut next_excluded = excluded.clone();
        next_excluded.intersect_with(&rows[v]);
        bron_kerbosch(rows, current, next_candidates, next_excluded, out);
        current.pop();
        candidates.set(v, false);
        excluded.insert(v);
    }
}

/// All maximal cliques of `g`, each sorted, the list sorted and free of
/// duplicates. A graph without vertices has none.
pub fn enumerate_maximal_cliques(g: &Graph) -> Vec<Clique> {
    if g.n() == 0 {
        return Vec::new();
    }
    let rows = neighbor_rows(g);
    let mut all = FixedBitSet::with_capacity(g.n());
    all.insert_range(..);
    let mut out = Vec::new();
    bron_kerbosch(
        &rows,
        &mut Vec::new(),
        all,
        FixedBitSet::with_capacity(g.n()),
        &mut out,
    );
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug)]
pub struct ExactSolution<'g> {
    pub weight: Weight,
    pub witness: Solution<'g>,
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

pub fn exact_solve(g: &Graph, k: usize) -> Result<ExactSolution<'_>, OracleError> {
    exact_solve_with_cap(g, k, DEFAULT_SUBSET_CAP)
}

/// Maximum `W` over all solutions of at most `k` cliques, with a witness.
/// Fails when the number of subsets of at most `k` maximal cliques exceeds
/// `cap`.
pub fn exact_solve_with_cap(
    g: &Graph,
    k: usize,
    cap: u128,
) -> Result<ExactSolution<'_>, OracleError> {
    let mut cliques = enumerate_maximal_cliques(g);
    let m = cliques.len() as u128;
    let subsets = (0..=(k as u128).min(m)).fold(0u128, |acc, j| acc.saturating_add(binomial(m, j)));
    if subsets > cap {
        return Err(OracleError::TooLarge { subsets, cap });
    }
    // Heaviest first, so the remaining-slots bound can cut whole suffixes.
    cliques.sort_by_key(|c| std::cmp::Reverse(c.weight(g)));
    let weights: Vec<Weight> = cliques.iter().map(|c| c.weight(g)).collect();

    struct Search<'a> {
        g: &'a Graph,
        cliques: &'a [Clique],
        weights: &'a [Weight],
        best: Weight,
        best_set: Vec<usize>,
        chosen: Vec<usize>,
    }

    impl Search<'_> {
        fn run(&mut self, start: usize, slots: usize, covered: &FixedBitSet, value: Weight) {
            if value > self.best {
                self.best = value;
                self.best_set = self.chosen.clone();
            }
            if slots == 0 {
                return;
            }
            for i in start..self.cliques.len() {
                if value + slots as Weight * self.weights[i] <= self.best {
                    break;
                }
                let mut next = covered.clone();
                let mut gain = 0;
                for &v in self.cliques[i].vertices() {
                    if !next.put(v) {
                        gain += self.g.weight(v);
                    }
                }
                self.chosen.push(i);
                self.run(i + 1, slots - 1, &next, value + gain);
                self.chosen.pop();
            }
        }
    }

    let mut search = Search {
        g,
        cliques: &cliques,
        weights: &weights,
        best: 0,
        best_set: Vec::new(),
        chosen: Vec::new(),
    };
    search.run(0, k, &FixedBitSet::with_capacity(g.n()), 0);
    let witness = Solution::from_cliques(
        g,
        search
            .best_set
            .iter()
            .map(|&i| cliques[i].clone())
            .collect(),
    )
    .expect("maximal cliques are cliques");
    debug_assert_eq!(witness.weight(), search.best);
    Ok(ExactSolution {
        weight: search.best,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_er;
    use crate::solution::{covered_weight, is_clique};

    fn as_vecs(cs: &[Clique]) -> Vec<Vec<Vertex>> {
        cs.iter().map(|c| c.vertices().to_vec()).collect()
    }

    /// Every vertex subset that is a maximal clique, by exhaustion.
    fn brute_maximal(g: &Graph) -> Vec<Vec<Vertex>> {
        let n = g.n();
        let subsets: Vec<Vec<Vertex>> = (1u32..(1 << n))
            .map(|mask| (0..n).filter(|&v| mask >> v & 1 == 1).collect::<Vec<_>>())
            .filter(|vs| is_clique(g, vs).unwrap())
            .collect();
        let mut out: Vec<Vec<Vertex>> = subsets
            .iter()
            .filter(|vs| {
                (0..n).all(|u| vs.contains(&u) || vs.iter().any(|&v| !g.is_adjacent(u, v)))
            })
            .cloned()
            .collect();
        out.sort();
        out
    }

    /// Best W over all `<= k` subsets of all cliques (maximal or not).
    fn brute_optimum(g: &Graph, k: usize) -> Weight {
        let n = g.n();
        let cliques: Vec<Clique> = (1u32..(1 << n))
            .map(|mask| (0..n).filter(|&v| mask >> v & 1 == 1).collect::<Vec<_>>())
            .filter(|vs| is_clique(g, vs).unwrap())
            .map(Clique::from_sorted_unchecked)
            .collect();
        fn rec(
            g: &Graph,
            cs: &[Clique],
            start: usize,
            left: usize,
            chosen: &mut Vec<Clique>,
        ) -> Weight {
            let mut best = covered_weight(g, chosen);
            if left == 0 {
                return best;
            }
            for i in start..cs.len() {
                chosen.push(cs[i].clone());
                best = best.max(rec(g, cs, i + 1, left - 1, chosen));
                chosen.pop();
            }
            best
        }
        rec(g, &cliques, 0, k, &mut Vec::new())
    }

    #[test]
    fn small_enumerations() {
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(
            as_vecs(&enumerate_maximal_cliques(&tri)),
            vec![vec![0, 1, 2]]
        );
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            as_vecs(&enumerate_maximal_cliques(&path)),
            vec![vec![0, 1], vec![1, 2]]
        );
        let k4_minus = Graph::from_edges(4, &[(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(
            as_vecs(&enumerate_maximal_cliques(&k4_minus)),
            vec![vec![0, 2, 3], vec![1, 2, 3]]
        );
        let lonely = Graph::from_edges(2, &[]).unwrap();
        assert_eq!(
            as_vecs(&enumerate_maximal_cliques(&lonely)),
            vec![vec![0], vec![1]]
        );
        assert!(enumerate_maximal_cliques(&Graph::from_edges(0, &[]).unwrap()).is_empty());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for seed in 0..40 {
            let g = gen_er(10, 0.4, seed).unwrap();
            assert_eq!(
                as_vecs(&enumerate_maximal_cliques(&g)),
                brute_maximal(&g),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn small_optima() {
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(exact_solve(&tri, 1).unwrap().weight, 3);
        let edges = Graph::from_edges(4, &[(0, 1), (2, 3)])
            .unwrap()
            .with_vertex_weights(vec![1, 2, 3, 4])
            .unwrap();
        let sol = exact_solve(&edges, 1).unwrap();
        assert_eq!(sol.weight, 7);
        assert_eq!(sol.witness.cliques()[0].vertices(), &[2, 3]);
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(exact_solve(&path, 2).unwrap().weight, 3);
        assert_eq!(
            exact_solve(&Graph::from_edges(0, &[]).unwrap(), 2)
                .unwrap()
                .weight,
            0
        );
    }

    #[test]
    fn optimum_matches_brute_force_over_all_cliques() {
        for seed in 0..25 {
            let g = gen_er(8, 0.35, seed)
                .unwrap()
                .with_weights(crate::graph::WeightScheme::Mod200);
            for k in 1..=3 {
                let exact = exact_solve(&g, k).unwrap();
                assert_eq!(exact.weight, brute_optimum(&g, k), "seed {seed} k {k}");
                assert!(exact.witness.len() <= k);
                assert!(exact.witness.validate().is_ok());
                assert_eq!(covered_weight(&g, exact.witness.cliques()), exact.weight);
            }
        }
    }

    #[test]
    fn monotone_in_k_and_reaches_total() {
        let g = gen_er(12, 0.3, 77)
            .unwrap()
            .with_weights(crate::graph::WeightScheme::Mod200);
        let m = enumerate_maximal_cliques(&g).len();
        let mut prev = 0;
        for k in 1..=m {
            let w = exact_solve(&g, k).unwrap().weight;
            assert!(w >= prev && w <= g.total_weight());
            prev = w;
        }
        assert_eq!(prev, g.total_weight());
    }

    #[test]
    fn cap_is_enforced() {
        let g = gen_er(20, 0.5, 1).unwrap();
        assert!(matches!(
            exact_solve_with_cap(&g, 3, 10),
            Err(OracleError::TooLarge { cap: 10, .. })
        ));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(40, 20), 137_846_528_820);
    }
}
