//! Instance loading, multi-seed benchmark runs and report files.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{solve, Budget, SolveConfig, SolveError, SolveResult};
use crate::graph::{parse_dimacs, parse_edge_list, Graph, ParseError, Weight, WeightScheme};
use crate::oracle::{exact_solve_with_cap, DEFAULT_SUBSET_CAP};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceFormat {
    #[default]
    Dimacs,
    EdgeList,
}

impl FromStr for InstanceFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dimacs" => Ok(InstanceFormat::Dimacs),
            "edgelist" | "edge-list" => Ok(InstanceFormat::EdgeList),
            other => Err(format!("unknown instance format `{other}`")),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
}

/// Reads and parses a graph file; the graph is named after the file stem.
pub fn load_instance(path: &Path, format: InstanceFormat) -> Result<Graph, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed = match format {
        InstanceFormat::Dimacs => parse_dimacs(&text),
        InstanceFormat::EdgeList => parse_edge_list(&text),
    };
    let g = parsed.map_err(|source| LoadError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(g.with_name(name))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchInstance {
    /// Relative paths are resolved against the spec file's directory.
    pub path: PathBuf,
    #[serde(default)]
    pub format: InstanceFormat,
    pub k: Vec<usize>,
    /// Also compute the exact optimum (tiny instances only).
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub weights: Option<WeightScheme>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub instances: Vec<BenchInstance>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl BenchSpec {
    pub fn from_file(path: &Path) -> io::Result<BenchSpec> {
        let text = fs::read_to_string(path)?;
        let mut spec: BenchSpec = serde_json::from_str(&text).map_err(io::Error::other)?;
        spec.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(spec)
    }
}

/// One (instance, k) line of a benchmark or comparison CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub k: usize,
    /// Seed of the run that reached `bestW`.
    pub seed: u64,
    #[serde(rename = "bestW")]
    pub best_w: Weight,
    #[serde(rename = "avgW")]
    pub avg_w: f64,
    /// Other solver's best over this one's, filled in by [`compare`].
    pub relative: Option<f64>,
    #[serde(rename = "oracleW")]
    pub oracle_w: Option<Weight>,
    pub gap: Option<Weight>,
}

#[derive(Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub results: Vec<SolveResult>,
    /// (instance path, reason) for every instance that could not be run.
    pub skipped: Vec<(String, String)>,
}

/// Runs every (instance, k) of `spec` with seeds `cfg.seed .. cfg.seed + runs`.
/// Unreadable instances are skipped with a warning.
pub fn run_benchmark(
    spec: &BenchSpec,
    cfg: &SolveConfig,
    budget: &Budget,
    runs: usize,
) -> Result<BenchReport, SolveError> {
    let mut report = BenchReport::default();
    for inst in &spec.instances {
        let path = spec.base_dir.join(&inst.path);
        let g = match load_instance(&path, inst.format) {
            Ok(g) => g,
            Err(e) => {
                log::warn!("skipping instance: {e}");
                report
                    .skipped
                    .push((path.display().to_string(), e.to_string()));
                continue;
            }
        };
        let g = match inst.weights.or(cfg.weights) {
            Some(w) => g.with_weights(w),
            None => g,
        };
        for &k in &inst.k {
            let mut best: Option<(Weight, u64)> = None;
            let mut sum = 0.0;
            for r in 0..runs {
                let mut run_cfg = *cfg;
                run_cfg.k = k;
                run_cfg.seed = cfg.seed.wrapping_add(r as u64);
                run_cfg.weights = None;
                let res = solve(&g, &run_cfg, budget)?;
                if !res.valid {
                    log::warn!(
                        "{} k={k} seed={}: result failed verification",
                        g.name(),
                        run_cfg.seed
                    );
                }
                sum += res.best_w as f64;
                if best.is_none_or(|(w, _)| res.best_w > w) {
                    best = Some((res.best_w, run_cfg.seed));
                }
                report.results.push(res);
            }
            let Some((best_w, seed)) = best else { continue };
            let oracle_w = if inst.oracle {
                match exact_solve_with_cap(&g, k, DEFAULT_SUBSET_CAP) {
                    Ok(x) => Some(x.weight),
                    Err(e) => {
                        log::warn!("{} k={k}: no exact value ({e})", g.name());
                        None
                    }
                }
            } else {
                None
            };
            report.rows.push(BenchRow {
                instance: g.name().to_string(),
                k,
                seed,
                best_w,
                avg_w: sum / runs as f64,
                relative: None,
                oracle_w,
                gap: oracle_w.map(|o| o - best_w),
            });
        }
    }
    Ok(report)
}

/// Win/loss counts of `ours` against `theirs` over the (instance, k) pairs
/// both contain.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Comparison {
    pub compared: usize,
    /// Instances where ours has the strictly better best W.
    pub best_plus: usize,
    pub best_minus: usize,
    pub avg_plus: usize,
    pub avg_minus: usize,
    /// Our rows, with `relative` set to their best over ours.
    #[serde(skip)]
    pub scatter: Vec<BenchRow>,
}

pub fn compare(ours: &[BenchRow], theirs: &[BenchRow]) -> Comparison {
    let index: BTreeMap<(&str, usize), &BenchRow> = theirs
        .iter()
        .map(|r| ((r.instance.as_str(), r.k), r))
        .collect();
    let mut c = Comparison::default();
    for row in ours {
        let Some(other) = index.get(&(row.instance.as_str(), row.k)) else {
            continue;
        };
        c.compared += 1;
        match row.best_w.cmp(&other.best_w) {
            std::cmp::Ordering::Greater => c.best_plus += 1,
            std::cmp::Ordering::Less => c.best_minus += 1,
            std::cmp::Ordering::Equal => {}
        }
        if row.avg_w > other.avg_w {
            c.avg_plus += 1;
        } else if row.avg_w < other.avg_w {
            c.avg_minus += 1;
        }
        let mut s = row.clone();
        s.relative = Some(if row.best_w == 0 {
            if other.best_w == 0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            other.best_w as f64 / row.best_w as f64
        });
        c.scatter.push(s);
    }
    c
}

const CSV_HEADER: [&str; 8] = [
    "instance", "k", "seed", "bestW", "avgW", "relative", "oracleW", "gap",
];

/// Writes rows as CSV; the header is written even when `rows` is empty.
pub fn write_rows_csv<W: Write>(out: W, rows: &[BenchRow]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results_json<W: Write>(out: W, results: &[SolveResult]) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(out, results)
}

/// Writes `results.json` and `summary.csv` into `dir`; with `other`, also
/// `comparison.csv` (scatter rows) and `comparison.json` (win/loss counts).
pub fn emit_report(
    dir: &Path,
    report: &BenchReport,
    other: Option<&[BenchRow]>,
) -> io::Result<Option<Comparison>> {
    fs::create_dir_all(dir)?;
    write_results_json(
        io::BufWriter::new(fs::File::create(dir.join("results.json"))?),
        &report.results,
    )
    .map_err(io::Error::other)?;
    write_rows_csv(fs::File::create(dir.join("summary.csv"))?, &report.rows)
        .map_err(io::Error::other)?;
    let Some(other) = other else { return Ok(None) };
    let cmp = compare(&report.rows, other);
    write_rows_csv(fs::File::create(dir.join("comparison.csv"))?, &cmp.scatter)
        .map_err(io::Error::other)?;
    fs::write(
        dir.join("comparison.json"),
        serde_json::to_string_pretty(&cmp).map_err(io::Error::other)?,
    )?;
    Ok(Some(cmp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_er, write_dimacs};

    fn det_cfg() -> (SolveConfig, Budget) {
        let mut cfg = SolveConfig::new(1);
        cfg.tabu_bits = 1 << 12;
        (cfg, Budget::deterministic(4, 4))
    }

    fn spec_with(dir: &Path, graphs: &[(&str, Graph)], oracle: bool) -> BenchSpec {
        let mut spec = BenchSpec {
            base_dir: dir.to_path_buf(),
            ..Default::default()
        };
        for (name, g) in graphs {
            fs::write(dir.join(name), write_dimacs(g)).unwrap();
            spec.instances.push(BenchInstance {
                path: PathBuf::from(name),
                format: InstanceFormat::Dimacs,
                k: vec![1, 2],
                oracle,
                weights: None,
            });
        }
        spec
    }

    #[test]
    fn single_run_best_equals_average() {
        let dir = tempfile::tempdir().unwrap();
        let spec = spec_with(dir.path(), &[("a.clq", gen_er(15, 0.3, 1).unwrap())], false);
        let (cfg, b) = det_cfg();
        let rep = run_benchmark(&spec, &cfg, &b, 1).unwrap();
        assert_eq!(rep.rows.len(), 2);
        for r in &rep.rows {
            assert_eq!(r.best_w as f64, r.avg_w);
            assert_eq!(r.instance, "a");
        }
    }

    #[test]
    fn oracle_gap_is_non_negative() {
        let dir = tempfile::tempdir().unwrap();
        let graphs: Vec<(String, Graph)> = (0..4)
            .map(|s| (format!("g{s}.clq"), gen_er(10, 0.3, s).unwrap()))
            .collect();
        let refs: Vec<(&str, Graph)> = graphs
            .iter()
            .map(|(n, g)| (n.as_str(), g.clone()))
            .collect();
        let spec = spec_with(dir.path(), &refs, true);
        let (cfg, b) = det_cfg();
        let rep = run_benchmark(&spec, &cfg, &b, 2).unwrap();
        assert_eq!(rep.rows.len(), 8);
        assert_eq!(rep.results.len(), 16);
        for r in &rep.rows {
            assert!(r.gap.unwrap() >= 0, "{r:?}");
        }
    }

    #[test]
    fn missing_instance_is_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = spec_with(dir.path(), &[("a.clq", gen_er(8, 0.3, 1).unwrap())], false);
        spec.instances.insert(
            0,
            BenchInstance {
                path: PathBuf::from("nope.clq"),
                format: InstanceFormat::Dimacs,
                k: vec![1],
                oracle: false,
                weights: None,
            },
        );
        let (cfg, b) = det_cfg();
        let rep = run_benchmark(&spec, &cfg, &b, 1).unwrap();
        assert_eq!(rep.skipped.len(), 1);
        assert_eq!(rep.rows.len(), 2);
    }

    #[test]
    fn self_comparison_is_even() {
        let rows = vec![
            BenchRow {
                instance: "x".into(),
                k: 2,
                seed: 1,
                best_w: 10,
                avg_w: 9.5,
                relative: None,
                oracle_w: None,
                gap: None,
            },
            BenchRow {
                instance: "y".into(),
                k: 2,
                seed: 3,
                best_w: 4,
                avg_w: 4.0,
                relative: None,
                oracle_w: None,
                gap: None,
            },
        ];
        let c = compare(&rows, &rows);
        assert_eq!(
            (
                c.compared,
                c.best_plus,
                c.best_minus,
                c.avg_plus,
                c.avg_minus
            ),
            (2, 0, 0, 0, 0)
        );
        assert!(c.scatter.iter().all(|r| r.relative == Some(1.0)));

        let mut worse = rows.clone();
        worse[0].best_w = 8;
        worse[1].avg_w = 5.0;
        let c = compare(&rows, &worse);
        assert_eq!(
            (c.best_plus, c.best_minus, c.avg_plus, c.avg_minus),
            (1, 0, 0, 1)
        );
    }

    #[test]
    fn empty_csv_has_header() {
        let mut buf = Vec::new();
        write_rows_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "instance,k,seed,bestW,avgW,relative,oracleW,gap\n"
        );
    }

    #[test]
    fn emitted_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let spec = spec_with(dir.path(), &[("a.clq", gen_er(12, 0.3, 2).unwrap())], true);
        let (cfg, b) = det_cfg();
        let rep = run_benchmark(&spec, &cfg, &b, 1).unwrap();
        let out = dir.path().join("out");
        let cmp = emit_report(&out, &rep, Some(&rep.rows)).unwrap().unwrap();
        assert_eq!(cmp.best_plus + cmp.best_minus, 0);

        let parsed: Vec<SolveResult> =
            serde_json::from_str(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
        assert_eq!(parsed, rep.results);

        let mut rdr = csv::Reader::from_path(out.join("summary.csv")).unwrap();
        let rows: Vec<BenchRow> = rdr.deserialize().collect::<Result<_, _>>().unwrap();
        assert_eq!(rows, rep.rows);
        let text = fs::read_to_string(out.join("comparison.csv")).unwrap();
        assert_eq!(text.lines().count(), 1 + rep.rows.len());
    }

    #[test]
    fn formats_parse_from_strings() {
        assert_eq!(
            "DIMACS".parse::<InstanceFormat>(),
            Ok(InstanceFormat::Dimacs)
        );
        assert_eq!(
            "edgelist".parse::<InstanceFormat>(),
            Ok(InstanceFormat::EdgeList)
        );
        assert!("xml".parse::<InstanceFormat>().is_err());
    }
}
