use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dtk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_solve_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.clq");
    let out = dtk(&[
        "gen",
        "er",
        "--n",
        "40",
        "--p",
        "0.2",
        "--seed",
        "4",
        "--out",
        path(&g),
    ]);
    assert!(out.status.success());
    assert!(fs::read_to_string(&g).unwrap().contains("p edge 40"));

    let mut runs = Vec::new();
    for i in 0..2 {
        let r = dir.path().join(format!("r{i}.json"));
        let out = dtk(&[
            "solve",
            "--input",
            path(&g),
            "--k",
            "3",
            "--weights",
            "mod200",
            "--deterministic",
            "10:10",
            "--tabu-bits",
            "4096",
            "--out",
            path(&r),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        runs.push(fs::read(&r).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    let v: serde_json::Value = serde_json::from_slice(&runs[0]).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["k"], 3);
    assert_eq!(v["instance"], "g");
    assert!(v["bestW"].as_i64().unwrap() > 0);
    assert!(v["cliques"].as_array().unwrap().len() <= 3);
    for key in [
        "coveredCount",
        "timings",
        "populationSize",
        "generations",
        "tabu",
        "config",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn ablation_flags_reach_config() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    fs::write(&g, "1 2\n2 3\n1 3\n3 4\n").unwrap();
    let out = dtk(&[
        "solve",
        "--input",
        path(&g),
        "--format",
        "edgelist",
        "--k",
        "2",
        "--no-reduction",
        "--no-tabu",
        "--no-ga",
        "--no-post",
        "--deterministic",
        "3:3",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cfg = &v["config"];
    for key in [
        "reductionEnabled",
        "tabuEnabled",
        "gaEnabled",
        "postEnabled",
    ] {
        assert_eq!(cfg[key], false, "{key}");
    }
    assert_eq!(v["bestW"], 4);
    assert_eq!(v["generations"], 0);
}

#[test]
fn oracle_prints_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("t.clq");
    fs::write(&g, "p edge 4 2\ne 1 2\ne 3 4\n").unwrap();
    let out = dtk(&["oracle", "--input", path(&g), "--k", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["optimum"], 2);
}

#[test]
fn bench_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("a.clq");
    assert!(
        dtk(&["gen", "ba", "--n", "30", "--m", "2", "--out", path(&g)])
            .status
            .success()
    );
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"instances":[{"path":"a.clq","k":[2]},{"path":"missing.clq","k":[1]}]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = dtk(&[
        "bench",
        "--spec",
        path(&spec),
        "--runs",
        "2",
        "--deterministic",
        "4:4",
        "--tabu-bits",
        "1024",
        "--out",
        path(&out_dir),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let results: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("results.json")).unwrap()).unwrap();
    assert_eq!(results.as_array().unwrap().len(), 2);

    let cmp_dir = dir.path().join("cmp");
    let out = dtk(&[
        "bench",
        "--spec",
        path(&spec),
        "--runs",
        "2",
        "--deterministic",
        "4:4",
        "--tabu-bits",
        "1024",
        "--compare",
        path(&out_dir.join("summary.csv")),
        "--out",
        path(&cmp_dir),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("best N+ 0 N- 0"));
}

#[test]
fn bad_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("bad.clq");
    fs::write(&g, "p edge 2 1\ne 1 1\n").unwrap();
    let out = dtk(&[
        "solve",
        "--input",
        path(&g),
        "--k",
        "1",
        "--deterministic",
        "2:2",
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = dtk(&[
        "solve",
        "--input",
        path(&dir.path().join("none")),
        "--k",
        "1",
    ]);
    assert!(!out.status.success());
    let out = dtk(&["gen", "er", "--n", "5", "--out", path(&g)]);
    assert!(!out.status.success());
}
