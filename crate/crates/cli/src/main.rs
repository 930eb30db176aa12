use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dtk_core::driver::{
    emit_report, load_instance, run_benchmark, verify_solution, BenchRow, BenchSpec, InstanceFormat,
};
use dtk_core::graph::{gen_ba, gen_er, write_dimacs};
use dtk_core::localsearch::LsParams;
use dtk_core::oracle::exact_solve;
use dtk_core::{solve, Budget, SolveConfig, WeightScheme};

#[derive(Parser)]
#[command(
    name = "dtk",
    version,
    about = "Diversified top-k weighted clique search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write the result JSON.
    Solve(SolveArgs),
    /// Generate a random graph in DIMACS format.
    Gen(GenArgs),
    /// Exact optimum of a tiny instance, printed as JSON.
    Oracle(OracleArgs),
    /// Run every instance of a benchmark spec several times.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dimacs,
    Edgelist,
}

impl From<Format> for InstanceFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Dimacs => InstanceFormat::Dimacs,
            Format::Edgelist => InstanceFormat::EdgeList,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Weights {
    Unit,
    Mod200,
}

impl From<Weights> for WeightScheme {
    fn from(w: Weights) -> Self {
        match w {
            Weights::Unit => WeightScheme::Unit,
            Weights::Mod200 => WeightScheme::Mod200,
        }
    }
}

/// Solver settings shared by `solve` and `bench`.
#[derive(Args)]
struct SolverArgs {
    /// Cut-off time in seconds (wall-clock mode).
    #[arg(long, default_value_t = 600.0)]
    time: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Vertex weights; the instance's own weights are kept when omitted.
    #[arg(long, value_enum)]
    weights: Option<Weights>,
    /// Consecutive unimproved local-search steps before stopping.
    #[arg(long, default_value_t = LsParams::default().m_step)]
    mstep: usize,
    /// Sample size for each clique extension step.
    #[arg(long, default_value_t = LsParams::default().bms_samples)]
    bms: usize,
    /// Length of each tabu bit vector.
    #[arg(long, default_value_t = dtk_core::genetic::DEFAULT_TABU_BITS)]
    tabu_bits: u64,
    #[arg(long)]
    no_reduction: bool,
    #[arg(long)]
    no_tabu: bool,
    #[arg(long)]
    no_ga: bool,
    #[arg(long)]
    no_post: bool,
    /// Count-based stopping instead of the clock: LS_COUNT:GA_GENS.
    #[arg(long, value_name = "LS_COUNT:GA_GENS", value_parser = parse_counts)]
    deterministic: Option<(usize, usize)>,
}

impl SolverArgs {
    fn config(&self, k: usize) -> SolveConfig {
        let mut cfg = SolveConfig::new(k);
        cfg.seed = self.seed;
        cfg.weights = self.weights.map(Into::into);
        cfg.params.m_step = self.mstep;
        cfg.params.bms_samples = self.bms;
        cfg.tabu_bits = self.tabu_bits;
        cfg.reduction_enabled = !self.no_reduction;
        cfg.tabu_enabled = !self.no_tabu;
        cfg.ga_enabled = !self.no_ga;
        cfg.post_enabled = !self.no_post;
        cfg
    }

    fn budget(&self) -> Budget {
        match self.deterministic {
            Some((ls, ga)) => Budget::deterministic(ls, ga),
            None => Budget::wall_clock(self.time),
        }
    }
}

fn parse_counts(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected LS_COUNT:GA_GENS")?;
    let a = a.trim().parse().map_err(|e| format!("LS_COUNT: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("GA_GENS: {e}"))?;
    Ok((a, b))
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "dimacs")]
    format: Format,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    solver: SolverArgs,
    /// Result JSON path; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Er,
    Ba,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    model: Model,
    #[arg(long)]
    n: usize,
    /// Edge probability (ER).
    #[arg(long)]
    p: Option<f64>,
    /// Edges per new vertex (BA).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "dimacs")]
    format: Format,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum)]
    weights: Option<Weights>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON file listing instances: {"instances": [{"path", "format", "k": [..], "oracle"}]}.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[command(flatten)]
    solver: SolverArgs,
    /// Another run's summary.csv to compare against.
    #[arg(long)]
    compare: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run_solve(a: SolveArgs) -> Result<bool> {
    let g = load_instance(&a.input, a.format.into())?;
    let cfg = a.solver.config(a.k);
    let res = solve(&g, &cfg, &a.solver.budget())?;
    log::info!(
        "{}: W={} with {} cliques",
        res.instance,
        res.best_w,
        res.cliques.len()
    );
    write_or_print(a.out.as_deref(), &serde_json::to_string_pretty(&res)?)?;
    Ok(res.valid)
}

fn run_gen(a: GenArgs) -> Result<bool> {
    let g = match a.model {
        Model::Er => gen_er(a.n, a.p.context("--p is required for er")?, a.seed)?,
        Model::Ba => gen_ba(a.n, a.m.context("--m is required for ba")?, a.seed)?,
    };
    fs::write(&a.out, write_dimacs(&g)).with_context(|| format!("writing {}", a.out.display()))?;
    Ok(true)
}

fn run_oracle(a: OracleArgs) -> Result<bool> {
    let mut g = load_instance(&a.input, a.format.into())?;
    if let Some(w) = a.weights {
        g = g.with_weights(w.into());
    }
    let exact = exact_solve(&g, a.k)?;
    let cliques: Vec<Vec<usize>> = exact
        .witness
        .cliques()
        .iter()
        .map(|c| c.vertices().to_vec())
        .collect();
    let valid = verify_solution(&g, a.k, &cliques, exact.weight).is_ok();
    let out = serde_json::json!({
        "instance": g.name(),
        "k": a.k,
        "optimum": exact.weight,
        "cliques": cliques,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(valid)
}

fn run_bench(a: BenchArgs) -> Result<bool> {
    if a.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let spec =
        BenchSpec::from_file(&a.spec).with_context(|| format!("reading {}", a.spec.display()))?;
    let other: Option<Vec<BenchRow>> = match &a.compare {
        Some(p) => Some(
            csv::Reader::from_path(p)
                .and_then(|mut r| r.deserialize().collect())
                .with_context(|| format!("reading {}", p.display()))?,
        ),
        None => None,
    };
    let report = run_benchmark(&spec, &a.solver.config(1), &a.solver.budget(), a.runs)?;
    let cmp = emit_report(&a.out, &report, other.as_deref())?;
    if let Some(c) = cmp {
        println!(
            "compared {} instances: best N+ {} N- {}, avg N+ {} N- {}",
            c.compared, c.best_plus, c.best_minus, c.avg_plus, c.avg_minus
        );
    }
    Ok(report.results.iter().all(|r| r.valid))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Gen(a) => run_gen(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Bench(a) => run_bench(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: result failed verification");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
