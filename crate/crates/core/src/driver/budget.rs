//! Stage stopping conditions.
//!
//! With cut-off `t_max`, the genetic stage stops at `t_max - post_reserve`
//! and local search stops generating individuals once the elapsed time
//! reaches `t_max - post_reserve - ga_base_reserve - |P| * k * ga_per_individual`
//! (600 s, defaults: `600 - 16 - |P| k / 10`). The threshold is
//! re-evaluated with the current population size before every individual.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Budgets shorter than this scale the reserve constants down in proportion.
pub const SCALING_HORIZON: f64 = 30.0;

#[derive(Debug, Error, PartialEq)]
pub enum BudgetError {
    #[error(
        "time limit {t_max}s leaves no room for one second each of local search and crossover"
    )]
    TooSmall { t_max: f64 },
    #[error("deadlines are only defined for wall-clock budgets")]
    NotWallClock,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BudgetMode {
    WallClock,
    /// Count-based stopping: a fixed number of local-search individuals and
    /// crossover generations, no clock involved.
    Deterministic {
        ls_individuals: usize,
        ga_generations: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Budget {
    pub t_max: f64,
    pub post_reserve: f64,
    pub ga_base_reserve: f64,
    pub ga_per_individual: f64,
    pub mode: BudgetMode,
}

impl Budget {
    pub fn wall_clock(t_max: f64) -> Self {
        Budget {
            t_max,
            post_reserve: 6.0,
            ga_base_reserve: 10.0,
            ga_per_individual: 0.1,
            mode: BudgetMode::WallClock,
        }
    }

    pub fn deterministic(ls_individuals: usize, ga_generations: usize) -> Self {
        Budget {
            mode: BudgetMode::Deterministic {
                ls_individuals,
                ga_generations,
            },
            ..Budget::wall_clock(0.0)
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.mode, BudgetMode::Deterministic { .. })
    }
}

/// Offsets in seconds from the start of the run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageDeadlines {
    /// Local search keeps producing individuals while elapsed time is below this.
    pub ls_threshold: f64,
    pub ga_deadline: f64,
    pub end: f64,
}

pub fn compute_deadlines(
    b: &Budget,
    population: usize,
    k: usize,
) -> Result<StageDeadlines, BudgetError> {
    if b.is_deterministic() {
        return Err(BudgetError::NotWallClock);
    }
    let scale = if b.t_max < SCALING_HORIZON {
        b.t_max / SCALING_HORIZON
    } else {
        1.0
    };
    let ga_deadline = b.t_max - b.post_reserve * scale;
    if ga_deadline.is_nan() || ga_deadline < 2.0 {
        return Err(BudgetError::TooSmall { t_max: b.t_max });
    }
    let reserve = b.ga_base_reserve * scale + (population * k) as f64 * b.ga_per_individual * scale;
    let ls_threshold = (ga_deadline - reserve).max(1.0).min(ga_deadline - 1.0);
    Ok(StageDeadlines {
        ls_threshold,
        ga_deadline,
        end: b.t_max,
    })
}
