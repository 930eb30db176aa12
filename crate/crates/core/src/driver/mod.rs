//! End-to-end solver pipeline.
//!
//! 1. Split off degree-0/1 vertices (unless disabled).
//! 2. Generate individuals by local search on the reduced graph, repairing
//!    each with the set-aside vertices, until stopping condition I.
//! 3. Evolve the population by crossover until stopping condition II.
//! 4. Post-process the best individuals until the cut-off.
//!
//! The best solution ever seen is re-verified from scratch before it is
//! reported.

mod bench;
mod budget;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bench::{
    compare, emit_report, load_instance, run_benchmark, write_results_json, write_rows_csv,
    BenchInstance, BenchReport, BenchRow, BenchSpec, Comparison, InstanceFormat, LoadError,
};
pub use budget::{compute_deadlines, Budget, BudgetError, BudgetMode, StageDeadlines};

use crate::deadline::Deadline;
use crate::genetic::{
    genetic_stage, GeneticError, Population, TabuList, TabuStats, DEFAULT_TABU_BITS,
};
use crate::graph::{Graph, Vertex, Weight, WeightScheme};
use crate::localsearch::{local_search, LsParams};
use crate::postprocess::post_processing;
use crate::reduce::{classify_vertices, post_reduction, Reduction};
use crate::solution::{Clique, Solution};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error(transparent)]
    Budget(#[from] BudgetError),
    #[error(transparent)]
    Genetic(#[from] GeneticError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveConfig {
    pub k: usize,
    pub params: LsParams,
    pub tabu_enabled: bool,
    pub reduction_enabled: bool,
    pub ga_enabled: bool,
    pub post_enabled: bool,
    pub seed: u64,
    /// `None` keeps the graph's own weights.
    pub weights: Option<WeightScheme>,
    pub tabu_bits: u64,
}

impl SolveConfig {
    pub fn new(k: usize) -> Self {
        SolveConfig {
            k,
            params: LsParams::default(),
            tabu_enabled: true,
            reduction_enabled: true,
            ga_enabled: true,
            post_enabled: true,
            seed: 1,
            weights: None,
            tabu_bits: DEFAULT_TABU_BITS,
        }
    }

    fn check(&self) -> Result<(), SolveError> {
        if self.k == 0 {
            return Err(SolveError::Config("k must be at least 1".into()));
        }
        if self.params.m_step == 0 || self.params.bms_samples == 0 {
            return Err(SolveError::Config(
                "m_step and bms_samples must be at least 1".into(),
            ));
        }
        if self.tabu_enabled && self.tabu_bits == 0 {
            return Err(SolveError::Config(
                "tabu bit vectors need length >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub ls: f64,
    pub ga: f64,
    pub post: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub solve: SolveConfig,
    pub budget: Budget,
}

/// Serialized result record. Field names follow the JSON result schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveResult {
    pub instance: String,
    pub k: usize,
    pub seed: u64,
    pub config: RunConfig,
    #[serde(rename = "bestW")]
    pub best_w: Weight,
    pub covered_count: usize,
    pub cliques: Vec<Vec<Vertex>>,
    /// Seconds per stage; all zero in deterministic mode so results are
    /// reproducible byte for byte.
    pub timings: Timings,
    pub population_size: usize,
    pub generations: usize,
    pub tabu: TabuStats,
    pub valid: bool,
}

/// Checks a reported solution against `g` using nothing but the vertex
/// lists: at most `k` cliques, each pairwise adjacent, and `W` as reported.
pub fn verify_solution(
    g: &Graph,
    k: usize,
    cliques: &[Vec<Vertex>],
    reported: Weight,
) -> Result<(), String> {
    if cliques.len() > k {
        return Err(format!("{} cliques exceed k = {k}", cliques.len()));
    }
    let mut seen = vec![false; g.n()];
    let mut total = 0;
    for (i, c) in cliques.iter().enumerate() {
        for (a, &u) in c.iter().enumerate() {
            if u >= g.n() {
                return Err(format!("clique {i}: vertex {u} out of range"));
            }
            for &v in &c[a + 1..] {
                if u == v || !g.is_adjacent(u, v) {
                    return Err(format!("clique {i}: {u} and {v} not adjacent"));
                }
            }
            if !seen[u] {
                seen[u] = true;
                total += g.weight(u);
            }
        }
    }
    if total != reported {
        return Err(format!("reported W {reported} but recomputed {total}"));
    }
    Ok(())
}

struct Pipeline<'g> {
    graph: &'g Graph,
    reduction: Reduction,
    cfg: SolveConfig,
    rng: ChaCha8Rng,
    best: Option<Solution<'g>>,
}

impl<'g> Pipeline<'g> {
    fn individual(&mut self, deadline: &Deadline) -> Solution<'g> {
        let local = local_search(
            self.reduction.reduced(),
            self.cfg.k,
            &self.cfg.params,
            &mut self.rng,
            deadline,
        );
        let mut s = self.reduction.lift(self.graph, &local);
        post_reduction(self.graph, &self.reduction, &mut s, self.cfg.k);
        s
    }

    fn offer(&mut self, s: &Solution<'g>) {
        if self.best.as_ref().is_none_or(|b| s.weight() > b.weight()) {
            self.best = Some(s.clone());
        }
    }
}

/// Runs the full pipeline on `g`.
pub fn solve(g: &Graph, cfg: &SolveConfig, budget: &Budget) -> Result<SolveResult, SolveError> {
    cfg.check()?;
    g.check_invariants().map_err(SolveError::Graph)?;
    let start = Instant::now();
    let wall = !budget.is_deterministic();
    let at = |secs: f64| Deadline::at(start + Duration::from_secs_f64(secs.max(0.0)));
    let (ga_deadline, end_deadline) = if wall {
        let d = compute_deadlines(budget, 0, cfg.k)?;
        (at(d.ga_deadline), at(d.end))
    } else {
        (Deadline::never(), Deadline::never())
    };

    let weighted;
    let graph = match cfg.weights {
        Some(scheme) => {
            weighted = g.clone().with_weights(scheme);
            &weighted
        }
        None => g,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tabu = cfg
        .tabu_enabled
        .then(|| TabuList::new(graph.n(), cfg.tabu_bits, &mut rng));
    let reduction = if cfg.reduction_enabled {
        classify_vertices(graph)
    } else {
        Reduction::identity(graph)
    };
    let mut run = Pipeline {
        graph,
        reduction,
        cfg: *cfg,
        rng,
        best: None,
    };
    let mut pop = Population::new();

    // Stage I: local search; never fewer than two individuals.
    loop {
        let size = pop.len();
        let deadline = match budget.mode {
            BudgetMode::Deterministic { ls_individuals, .. } => {
                if size >= ls_individuals.max(2) {
                    break;
                }
                Deadline::never()
            }
            BudgetMode::WallClock => {
                let threshold = compute_deadlines(budget, size, cfg.k)?.ls_threshold;
                if size >= 2 && start.elapsed().as_secs_f64() >= threshold {
                    break;
                }
                if size < 2 {
                    ga_deadline
                } else {
                    at(threshold)
                }
            }
        };
        let ind = run.individual(&deadline);
        run.offer(&ind);
        pop.admit(ind, tabu.as_mut());
    }
    let population_size = pop.len();
    let t_ls = start.elapsed();

    // Stage II: crossover, or more local search when crossover is disabled.
    let mut generations = 0;
    if cfg.ga_enabled {
        let cap = match budget.mode {
            BudgetMode::Deterministic { ga_generations, .. } => Some(ga_generations),
            BudgetMode::WallClock => None,
        };
        let out = genetic_stage(&mut pop, tabu.as_mut(), &ga_deadline, cap, &mut run.rng)?;
        generations = out.generations;
        if let Some(b) = out.best {
            run.offer(&b);
        }
    } else {
        let mut extra = 0;
        loop {
            let more = match budget.mode {
                BudgetMode::Deterministic { ga_generations, .. } => extra < ga_generations,
                BudgetMode::WallClock => !ga_deadline.expired(),
            };
            if !more {
                break;
            }
            let ind = run.individual(&ga_deadline);
            run.offer(&ind);
            pop.admit(ind, tabu.as_mut());
            extra += 1;
        }
    }
    let t_ga = start.elapsed();

    // Stage III
    if cfg.post_enabled {
        post_processing(graph, &mut pop, &end_deadline);
        if let Some(b) = pop.best().cloned() {
            run.offer(&b);
        }
    }
    let t_post = start.elapsed();

    let best = run.best.expect("at least two individuals were generated");
    debug_assert!(best.validate().is_ok());
    let covered_count = best.covered_count();
    let best_w = best.weight();
    let cliques: Vec<Vec<Vertex>> = best
        .into_cliques()
        .into_iter()
        .map(Clique::into_vertices)
        .collect();
    let valid = verify_solution(graph, cfg.k, &cliques, best_w).is_ok();
    let timings = if wall {
        Timings {
            ls: t_ls.as_secs_f64(),
            ga: (t_ga - t_ls).as_secs_f64(),
            post: (t_post - t_ga).as_secs_f64(),
        }
    } else {
        Timings::default()
    };
    Ok(SolveResult {
        instance: g.name().to_string(),
        k: cfg.k,
        seed: cfg.seed,
        config: RunConfig {
            solve: *cfg,
            budget: *budget,
        },
        best_w,
        covered_count,
        cliques,
        timings,
        population_size,
        generations,
        tabu: tabu.map(|t| t.stats()).unwrap_or_default(),
        valid,
    })
}
