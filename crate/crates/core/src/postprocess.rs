//! Final improvement pass over the population.
//!
//! Each individual is rebuilt clique by clique (strip what is already
//! covered, regrow to a maximal clique preferring uncovered vertices) and
//! then offered every uncovered vertex. Neither step can lower `W`.
//! Individuals are handled best-first until the deadline.

use crate::deadline::Deadline;
use crate::genetic::Population;
use crate::graph::{Graph, Vertex};
use crate::solution::{Clique, Solution};

/// Grows `members` (a clique) to a maximal clique. Uncovered candidates
/// are taken first, heaviest then lowest id; once none remain, covered
/// candidates are taken by the same rule.
fn expand_preferring_uncovered(
    g: &Graph,
    built: &Solution<'_>,
    mut members: Vec<Vertex>,
) -> Clique {
    if members.is_empty() {
        let seed = (0..g.n())
            .filter(|&v| !built.is_covered(v))
            .max_by(|&a, &b| g.weight(a).cmp(&g.weight(b)).then(b.cmp(&a)))
            .or_else(|| (0..g.n()).max_by(|&a, &b| g.weight(a).cmp(&g.weight(b)).then(b.cmp(&a))));
        match seed {
            Some(v) => members.push(v),
            None => return Clique::empty(),
        }
    }
    let mut candidates: Vec<Vertex> = g
        .neighbors(members[0])
        .iter()
        .copied()
        .filter(|&u| members[1..].iter().all(|&m| g.is_adjacent(u, m)))
        .collect();
    while !candidates.is_empty() {
        let key = |v: Vertex| (!built.is_covered(v), g.weight(v), std::cmp::Reverse(v));
        let pos = (0..candidates.len())
            .max_by_key(|&i| key(candidates[i]))
            .expect("non-empty");
        let v = candidates.swap_remove(pos);
        members.push(v);
        candidates.retain(|&u| g.is_adjacent(u, v));
    }
    members.sort_unstable();
    Clique::from_sorted_unchecked(members)
}

/// Construction heuristic: rebuilds `s` into a solution of the same size
/// whose coverage contains that of `s`, with every clique maximal.
pub fn rebuild_individual<'g>(g: &'g Graph, s: &Solution<'_>) -> Solution<'g> {
    let mut built = Solution::new(g);
    for c in s.cliques() {
        let kept: Vec<Vertex> = c
            .vertices()
            .iter()
            .copied()
            .filter(|&v| !built.is_covered(v))
            .collect();
        let grown = expand_preferring_uncovered(g, &built, kept);
        built.push(grown);
    }
    debug_assert!(built.weight() >= s.weight());
    built
}

/// Searching heuristic: for every vertex uncovered at the start (ascending
/// id), try each clique in order; replacing `c` by `(c ∩ N(v)) ∪ {v}` is
/// applied at the first clique where it raises `W`.
pub fn absorb_uncovered<'g>(g: &'g Graph, s: &Solution<'g>) -> Solution<'g> {
    let mut out = s.clone();
    let uncovered: Vec<Vertex> = (0..g.n()).filter(|&v| !s.is_covered(v)).collect();
    for v in uncovered {
        if out.is_covered(v) {
            continue;
        }
        for idx in 0..out.len() {
            let mut members: Vec<Vertex> = out.cliques()[idx]
                .vertices()
                .iter()
                .copied()
                .filter(|&u| g.is_adjacent(u, v))
                .collect();
            let at = members.partition_point(|&u| u < v);
            members.insert(at, v);
            let candidate = Clique::from_sorted_unchecked(members);
            if out.swap_delta_of(idx, &candidate) > 0 {
                out.replace(idx, candidate);
                break;
            }
        }
    }
    debug_assert!(out.weight() >= s.weight());
    out
}

/// Sorts the population by descending `W` (stable) and improves
/// individuals in that order until `deadline` fires. Returns how many
/// individuals were processed.
pub fn post_processing<'g>(g: &'g Graph, p: &mut Population<'g>, deadline: &Deadline) -> usize {
    let individuals = p.individuals_mut();
    individuals.sort_by_key(|s| std::cmp::Reverse(s.weight()));
    let mut done = 0;
    for ind in individuals.iter_mut() {
        if deadline.expired() {
            break;
        }
        let improved = absorb_uncovered(g, &rebuild_individual(g, ind));
        debug_assert!(improved.weight() >= ind.weight());
        *ind = improved;
        done += 1;
    }
    done
}
