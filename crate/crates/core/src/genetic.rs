//! Population evolution by best-swap crossover under a solution-based tabu list.
//!
//! One generation shuffles the population and lets every individual take
//! the single best clique from its successor (cyclically): all
//! `|C1| x |C2|` replacements are scored with [`Solution::swap_delta`] and
//! the best one whose resulting solution is not tabu is applied, even if
//! it lowers `W`. A generation therefore costs `O(|P| k^2 c)` for mean
//! clique size `c`.
//!
//! The tabu list remembers whole solutions. Each vertex carries three
//! random keys; a solution hashes to the three key sums over all clique
//! members modulo `L`, and it is tabu when the three addressed bits are all
//! set. Because the hash is a plain sum it updates in O(1) per swap.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deadline::Deadline;
use crate::graph::{Vertex, Weight};
use crate::solution::{Clique, Solution};

/// Default length of each tabu bit vector.
pub const DEFAULT_TABU_BITS: u64 = 100_000_000;

pub type HashTriple = [u64; 3];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneticError {
    #[error("crossover needs at least two individuals, population has {0}")]
    PopulationTooSmall(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabuStats {
    pub inserted: u64,
    pub blocked: u64,
}

#[derive(Clone, Debug)]
pub struct TabuList {
    keys: [Vec<u64>; 3],
    bits: [FixedBitSet; 3],
    modulus: u64,
    stats: TabuStats,
}

impl TabuList {
    /// Draws three keys in `[0, modulus)` per vertex.
    pub fn new<R: Rng + ?Sized>(n: usize, modulus: u64, rng: &mut R) -> Self {
        let keys = std::array::from_fn(|_| (0..n).map(|_| rng.gen_range(0..modulus)).collect());
        Self::with_keys(keys, modulus)
    }

    /// Uses caller supplied keys, reduced modulo `modulus`.
    pub fn with_keys(mut keys: [Vec<u64>; 3], modulus: u64) -> Self {
        assert!(
            (1..=u64::MAX / 2).contains(&modulus),
            "tabu modulus out of range"
        );
        assert!(
            usize::try_from(modulus).is_ok(),
            "tabu modulus exceeds address space"
        );
        for table in &mut keys {
            for key in table.iter_mut() {
                *key %= modulus;
            }
        }
        TabuList {
            keys,
            bits: std::array::from_fn(|_| FixedBitSet::with_capacity(modulus as usize)),
            modulus,
            stats: TabuStats::default(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn stats(&self) -> TabuStats {
        self.stats
    }

    /// Bits allocated per vector.
    pub fn vector_len(&self) -> usize {
        self.bits[0].len()
    }

    #[inline]
    pub fn add(&self, a: HashTriple, b: HashTriple) -> HashTriple {
        std::array::from_fn(|i| (a[i] + b[i]) % self.modulus)
    }

    #[inline]
    pub fn sub(&self, a: HashTriple, b: HashTriple) -> HashTriple {
        std::array::from_fn(|i| (a[i] + self.modulus - b[i]) % self.modulus)
    }

    pub fn hash_vertices(&self, vs: &[Vertex]) -> HashTriple {
        let mut h = [0u64; 3];
        for &v in vs {
            for (i, hi) in h.iter_mut().enumerate() {
                *hi = (*hi + self.keys[i][v]) % self.modulus;
            }
        }
        h
    }

    pub fn hash_clique(&self, c: &Clique) -> HashTriple {
        self.hash_vertices(c.vertices())
    }

    /// `(h1, h2, h3)` of a clique multiset; a vertex in two cliques counts twice.
    pub fn hash_solution(&self, s: &Solution<'_>) -> HashTriple {
        s.cliques()
            .iter()
            .fold([0; 3], |acc, c| self.add(acc, self.hash_clique(c)))
    }

    pub fn contains(&self, h: HashTriple) -> bool {
        (0..3).all(|i| self.bits[i].contains(h[i] as usize))
    }

    pub fn insert(&mut self, h: HashTriple) {
        for (i, bits) in self.bits.iter_mut().enumerate() {
            bits.insert(h[i] as usize);
        }
        self.stats.inserted += 1;
    }
}

/// Free-function form of [`TabuList::hash_solution`].
pub fn hash_solution(s: &Solution<'_>, t: &TabuList) -> HashTriple {
    t.hash_solution(s)
}

#[derive(Clone, Debug, Default)]
pub struct Population<'g> {
    individuals: Vec<Solution<'g>>,
    history_count: u64,
}

impl<'g> Population<'g> {
    pub fn new() -> Self {
        Population {
            individuals: Vec::new(),
            history_count: 0,
        }
    }

    pub fn from_individuals(individuals: Vec<Solution<'g>>) -> Self {
        Population {
            individuals,
            history_count: 0,
        }
    }

    /// Adds an individual and, if a tabu list is given, records its hash.
    pub fn admit(&mut self, s: Solution<'g>, tabu: Option<&mut TabuList>) {
        if let Some(t) = tabu {
            t.insert(t.hash_solution(&s));
            self.history_count += 1;
        }
        self.individuals.push(s);
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn individuals(&self) -> &[Solution<'g>] {
        &self.individuals
    }

    pub fn individuals_mut(&mut self) -> &mut [Solution<'g>] {
        &mut self.individuals
    }

    pub fn into_individuals(self) -> Vec<Solution<'g>> {
        self.individuals
    }

    /// Number of tabu insertions made on behalf of this population.
    pub fn history_count(&self) -> u64 {
        self.history_count
    }

    /// Highest-`W` individual; ties go to the earliest.
    pub fn best(&self) -> Option<&Solution<'g>> {
        self.individuals
            .iter()
            .reduce(|best, s| if s.weight() > best.weight() { s } else { best })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Swap {
    /// Index of the clique leaving the receiving individual.
    pub out_index: usize,
    /// Index of the donated clique in the donor.
    pub in_index: usize,
    pub delta: Weight,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CrossoverOutcome {
    /// `None` when there was nothing to swap or every candidate was tabu.
    pub applied: Option<Swap>,
    /// Tabu candidates that ranked ahead of the applied swap.
    pub blocked: usize,
}

/// Applies to `receiver` the best non-tabu replacement of one of its
/// cliques by a clique of `donor`. Candidates rank by delta, then by
/// enumeration order (receiver clique outer, donor clique inner). The
/// resulting (or unchanged) solution is inserted into the tabu list.
pub fn crossover_pair(
    receiver: &mut Solution<'_>,
    donor: &Solution<'_>,
    tabu: Option<&mut TabuList>,
) -> CrossoverOutcome {
    let hashes = tabu.as_deref().map(|t| {
        let outs: Vec<HashTriple> = receiver
            .cliques()
            .iter()
            .map(|c| t.hash_clique(c))
            .collect();
        let ins: Vec<HashTriple> = donor.cliques().iter().map(|c| t.hash_clique(c)).collect();
        let total = outs.iter().fold([0; 3], |acc, &h| t.add(acc, h));
        (outs, ins, total)
    });
    let resulting_hash = |i: usize, j: usize| -> Option<HashTriple> {
        let (t, (outs, ins, total)) = (tabu.as_deref()?, hashes.as_ref()?);
        Some(t.add(t.sub(*total, outs[i]), ins[j]))
    };

    let mut best: Option<(Swap, usize)> = None;
    let mut tabu_seen: Vec<(Weight, usize)> = Vec::new();
    let mut rank = 0usize;
    for i in 0..receiver.len() {
        for (j, c_in) in donor.cliques().iter().enumerate() {
            let delta = receiver.swap_delta_of(i, c_in);
            if best.is_none_or(|(b, _)| delta > b.delta) {
                let blocked = resulting_hash(i, j)
                    .is_some_and(|h| tabu.as_deref().is_some_and(|t| t.contains(h)));
                if blocked {
                    tabu_seen.push((delta, rank));
                } else {
                    best = Some((
                        Swap {
                            out_index: i,
                            in_index: j,
                            delta,
                        },
                        rank,
                    ));
                }
            }
            rank += 1;
        }
    }

    let blocked = match best {
        None => tabu_seen.len(),
        Some((swap, pos)) => tabu_seen
            .iter()
            .filter(|&&(d, r)| d > swap.delta || (d == swap.delta && r < pos))
            .count(),
    };
    let final_hash = match best {
        Some((swap, _)) => {
            let h = resulting_hash(swap.out_index, swap.in_index);
            let incoming = donor.cliques()[swap.in_index].clone();
            receiver.replace(swap.out_index, incoming);
            h
        }
        None => hashes.as_ref().map(|(_, _, total)| *total),
    };
    if let (Some(t), Some(h)) = (tabu, final_hash) {
        debug_assert_eq!(h, t.hash_solution(receiver));
        t.insert(h);
        t.stats.blocked += blocked as u64;
    }
    CrossoverOutcome {
        applied: best.map(|(s, _)| s),
        blocked,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub applied: usize,
    pub unchanged: usize,
    pub blocked: usize,
}

/// One generation: shuffle, then for each position `i` in order let
/// individual `i` receive from individual `(i + 1) mod |P|` in its current
/// state.
pub fn crossover_generation<R: Rng + ?Sized>(
    p: &mut Population<'_>,
    mut tabu: Option<&mut TabuList>,
    rng: &mut R,
) -> Result<GenerationStats, GeneticError> {
    let n = p.len();
    if n < 2 {
        return Err(GeneticError::PopulationTooSmall(n));
    }
    p.individuals.shuffle(rng);
    let mut stats = GenerationStats::default();
    for i in 0..n {
        let j = (i + 1) % n;
        let (receiver, donor) = if i < j {
            let (lo, hi) = p.individuals.split_at_mut(j);
            (&mut lo[i], &hi[0])
        } else {
            let (lo, hi) = p.individuals.split_at_mut(i);
            (&mut hi[0], &lo[j])
        };
        let out = crossover_pair(receiver, donor, tabu.as_deref_mut());
        if tabu.is_some() {
            p.history_count += 1;
        }
        stats.blocked += out.blocked;
        if out.applied.is_some() {
            stats.applied += 1;
        } else {
            stats.unchanged += 1;
        }
    }
    Ok(stats)
}

#[derive(Clone, Debug)]
pub struct GaOutcome<'g> {
    pub generations: usize,
    /// Best individual seen at the start or after any generation.
    pub best: Option<Solution<'g>>,
    pub totals: GenerationStats,
}

/// Runs generations until `deadline` fires or `generation_cap` is reached.
pub fn genetic_stage<'g, R: Rng + ?Sized>(
    p: &mut Population<'g>,
    mut tabu: Option<&mut TabuList>,
    deadline: &Deadline,
    generation_cap: Option<usize>,
    rng: &mut R,
) -> Result<GaOutcome<'g>, GeneticError> {
    if p.len() < 2 {
        return Err(GeneticError::PopulationTooSmall(p.len()));
    }
    let mut best = p.best().cloned();
    let mut totals = GenerationStats::default();
    let mut generations = 0;
    while generation_cap.is_none_or(|cap| generations < cap) && !deadline.expired() {
        let stats = crossover_generation(p, tabu.as_deref_mut(), rng)?;
        totals.applied += stats.applied;
        totals.unchanged += stats.unchanged;
        totals.blocked += stats.blocked;
        generations += 1;
        if let Some(top) = p.best() {
            if best.as_ref().is_none_or(|b| top.weight() > b.weight()) {
                best = Some(top.clone());
            }
        }
    }
    Ok(GaOutcome {
        generations,
        best,
        totals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sol<'g>(g: &'g Graph, cliques: &[&[Vertex]]) -> Solution<'g> {
        Solution::from_cliques(
            g,
            cliques
                .iter()
                .map(|c| Clique::new(g, c.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn hash_of_empty_and_direct_sum() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let t = TabuList::with_keys([vec![3, 5], vec![1, 1], vec![0, 7]], 1000);
        assert_eq!(t.hash_solution(&Solution::new(&g)), [0, 0, 0]);
        let h = hash_solution(&sol(&g, &[&[0, 1]]), &t);
        assert_eq!(h, [8, 2, 7]);
    }

    #[test]
    fn hash_ignores_order_and_counts_multiplicity() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let t = TabuList::new(3, 97, &mut ChaCha8Rng::seed_from_u64(1));
        let a = sol(&g, &[&[0, 1], &[2]]);
        let b = sol(&g, &[&[2], &[1, 0]]);
        assert_eq!(t.hash_solution(&a), t.hash_solution(&b));
        let twice = sol(&g, &[&[0], &[0]]);
        let once = sol(&g, &[&[0]]);
        assert_eq!(
            t.hash_solution(&twice),
            t.add(t.hash_solution(&once), t.hash_solution(&once))
        );
    }

    #[test]
    fn tabu_membership() {
        let mut t = TabuList::with_keys([vec![], vec![], vec![]], 16);
        assert!(!t.contains([1, 2, 3]));
        t.insert([1, 2, 3]);
        assert!(t.contains([1, 2, 3]));
        assert!(!t.contains([1, 2, 4]));
        t.insert([1, 2, 3]);
        assert!(t.contains([1, 2, 3]));
        assert_eq!(t.stats().inserted, 2);
        assert_eq!(t.vector_len(), 16);
    }

    #[test]
    fn edge_graph_crossover_takes_better_clique() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let mut a = sol(&g, &[&[0]]);
        let b = sol(&g, &[&[0, 1]]);
        let out = crossover_pair(&mut a, &b, None);
        assert_eq!(
            out.applied,
            Some(Swap {
                out_index: 0,
                in_index: 0,
                delta: 1
            })
        );
        assert_eq!(a.cliques()[0].vertices(), &[0, 1]);
    }

    #[test]
    fn identical_individuals_stay_put_without_tabu() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let s = sol(&g, &[&[0, 1], &[2, 3]]);
        let mut p = Population::from_individuals(vec![s.clone(), s.clone()]);
        crossover_generation(&mut p, None, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        for ind in p.individuals() {
            assert_eq!(ind.weight(), 4);
        }
    }

    #[test]
    fn all_tabu_leaves_receiver_unchanged() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let mut t = TabuList::new(2, 1 << 10, &mut ChaCha8Rng::seed_from_u64(3));
        let mut a = sol(&g, &[&[0, 1]]);
        let b = sol(&g, &[&[0, 1]]);
        t.insert(t.hash_solution(&a));
        let before = a.clone();
        let out = crossover_pair(&mut a, &b, Some(&mut t));
        assert_eq!(out.applied, None);
        assert_eq!(out.blocked, 1);
        assert_eq!(a, before);
    }

    #[test]
    fn tabu_diverts_to_second_best() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let mut t = TabuList::new(3, 1 << 12, &mut ChaCha8Rng::seed_from_u64(5));
        let mut a = sol(&g, &[&[0]]);
        let b = sol(&g, &[&[0, 1], &[1]]);
        // forbid the best outcome {{0,1}}
        t.insert(t.hash_solution(&sol(&g, &[&[0, 1]])));
        let out = crossover_pair(&mut a, &b, Some(&mut t));
        assert_eq!(out.applied.unwrap().in_index, 1);
        assert_eq!(out.blocked, 1);
        assert_eq!(a.cliques()[0].vertices(), &[1]);
        assert!(t.contains(t.hash_solution(&a)));
    }

    #[test]
    fn small_population_rejected() {
        let mut p = Population::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            crossover_generation(&mut p, None, &mut rng).unwrap_err(),
            GeneticError::PopulationTooSmall(0)
        );
    }

    #[test]
    fn zero_generation_cap_changes_nothing() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let mut p = Population::from_individuals(vec![sol(&g, &[&[0]]), sol(&g, &[&[2]])]);
        let before: Vec<_> = p.individuals().to_vec();
        let out = genetic_stage(
            &mut p,
            None,
            &Deadline::never(),
            Some(0),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(out.generations, 0);
        assert_eq!(p.individuals(), &before[..]);
    }

    #[test]
    fn disjoint_triangles_combine_within_five_generations() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let mut p = Population::from_individuals(vec![
            sol(&g, &[&[0, 1, 2], &[0, 1, 2]]),
            sol(&g, &[&[3, 4, 5], &[3, 4, 5]]),
        ]);
        let out = genetic_stage(
            &mut p,
            None,
            &Deadline::never(),
            Some(5),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(out.best.unwrap().weight(), 6);
    }

    #[test]
    fn stage_is_deterministic() {
        let g = crate::graph::gen_er(30, 0.3, 2).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(4);
        let params = crate::localsearch::LsParams::default();
        let inds: Vec<_> = (0..6)
            .map(|_| crate::localsearch::local_search(&g, 3, &params, &mut r, &Deadline::never()))
            .collect();
        let run = || {
            let mut p = Population::from_individuals(inds.clone());
            let mut t = TabuList::new(g.n(), 1 << 16, &mut ChaCha8Rng::seed_from_u64(1));
            genetic_stage(
                &mut p,
                Some(&mut t),
                &Deadline::never(),
                Some(20),
                &mut ChaCha8Rng::seed_from_u64(2),
            )
            .unwrap();
            (p.into_individuals(), t.stats())
        };
        assert_eq!(run(), run());
    }
}
