use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

fn netwalk(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netwalk"))
        .args(args)
        .current_dir(cwd)
        .env_remove("NETWALK_JOBS")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn with_graph() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(&netwalk(
        &["generate", "--model", "lfr", "--n", "300", "--mu", "0.1", "--seed", "4", "-o", "g.txt", "--partition", "p.txt"],
        dir.path(),
    ));
    dir
}

#[test]
fn walk_is_reproducible() {
    let dir = with_graph();
    let args = ["walk", "--graph", "g.txt", "--dynamics", "rwd", "--length", "100", "--seed", "7"];
    let a = ok(&netwalk(&args, dir.path()));
    let b = ok(&netwalk(&args, dir.path()));
    assert_eq!(a, b);
    let body: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body.len(), 100);
    assert!(a.contains("# dynamics: rwd"));

    let c = ok(&netwalk(&["walk", "--graph", "g.txt", "--dynamics", "rwd", "--length", "100", "--seed", "8"], dir.path()));
    assert_ne!(a, c);
}

#[test]
fn walk_reconstruct_correlate_pipeline() {
    let dir = with_graph();
    for (format, file) in [("text", "s.txt"), ("csv", "s.csv")] {
        ok(&netwalk(
            &["walk", "--graph", "g.txt", "--dynamics", "tsaw-edge", "--length", "3000", "--format", format, "-o", file],
            dir.path(),
        ));
    }
    let from_text = ok(&netwalk(&["reconstruct", "--sequence", "s.txt"], dir.path()));
    let from_csv = ok(&netwalk(&["reconstruct", "--sequence", "s.csv"], dir.path()));
    assert_eq!(from_text, from_csv);
    fs::write(dir.path().join("r.txt"), &from_text).unwrap();

    let table = ok(&netwalk(&["correlate", "--original", "g.txt", "--reconstructed", "r.txt"], dir.path()));
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("metric,pearson,spearman,n_matched"));
    let degree: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(degree[0], "degree");
    let cp: f64 = degree[1].parse().unwrap();
    assert!(cp > 0.5 && cp <= 1.0, "{cp}");
}

#[test]
fn correlate_identical_graphs_is_one() {
    let dir = with_graph();
    let table = ok(&netwalk(&["correlate", "--original", "g.txt", "--reconstructed", "g.txt"], dir.path()));
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!((f[1], f[2]), ("1", "1"), "{row}");
    }
}

#[test]
fn metrics_and_communities_tables() {
    let dir = with_graph();
    let m = ok(&netwalk(&["metrics", "--graph", "g.txt", "--metric", "degree", "--metric", "coreness"], dir.path()));
    assert!(m.starts_with("node,degree,coreness\n"));
    let c = ok(&netwalk(&["communities", "--graph", "g.txt", "--seed", "1"], dir.path()));
    assert!(c.starts_with("node,community\n"));
    let planted = fs::read_to_string(dir.path().join("p.txt")).unwrap();
    assert_eq!(planted.lines().count(), 300);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["walk", "--graph", "missing.txt", "--dynamics", "rw", "--length", "5"],
        vec!["walk", "--unknown-flag"],
        vec!["experiment", "--config", "missing.json"],
        vec!["walk", "--graph", "g.txt", "--dynamics", "levy", "--length", "5"],
    ] {
        let out = netwalk(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn runtime_errors_report_one_line() {
    let dir = with_graph();
    let out = netwalk(&["walk", "--graph", "g.txt", "--dynamics", "rw", "--length", "0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.starts_with("netwalk: error:"));

    fs::write(dir.path().join("bad.txt"), "a b c\n").unwrap();
    let out = netwalk(&["metrics", "--graph", "bad.txt"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 1"));
}

fn read_table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn experiment_summary_matches_records() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{
            "topologies": [
                {"generator": {"model": "lfr", "n": 500, "k_avg": 4, "mu": 0.05}},
                {"name": "sample", "edge_list": "karate.txt"}
            ],
            "dynamics": ["rw", "rwid"],
            "w_grid": [50, 400],
            "realizations": 3,
            "output_dir": "out"
        }"#,
    )
    .unwrap();
    fs::copy(
        concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/karate.txt"),
        dir.path().join("karate.txt"),
    )
    .unwrap();
    ok(&netwalk(&["experiment", "--config", "cfg.json"], dir.path()));

    let (header, records) = read_table(&dir.path().join("out/records.csv"));
    assert_eq!(
        header.join(","),
        "topology,dynamics,w,realization,metric,pearson,spearman,knowledge_fraction,nmi,runtime_ms"
    );
    assert_eq!(records.len(), 2 * 2 * 2 * 3 * 6);
    assert!(records.iter().all(|r| r[8].parse::<f64>().is_ok() && r[9].is_empty()));

    let mut cells: HashMap<(String, String, String, String), Vec<f64>> = HashMap::new();
    for r in &records {
        let key = (r[0].clone(), r[1].clone(), r[2].clone(), r[4].clone());
        if let Ok(v) = r[5].parse() {
            cells.entry(key).or_default().push(v);
        }
    }
    let (header, summary) = read_table(&dir.path().join("out/summary.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(summary.len(), 2 * 2 * 2 * 6);
    for s in &summary {
        let key = (s[0].clone(), s[1].clone(), s[2].clone(), s[3].clone());
        let Some(values) = cells.get(&key) else {
            assert!(s[col("pearson_mean")].is_empty());
            continue;
        };
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let got: f64 = s[col("pearson_mean")].parse().unwrap();
        assert!((got - mean).abs() <= 1e-12, "{key:?}: {got} vs {mean}");
    }
}

#[test]
fn desk_scale_run_fits_budget() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"n": 1000, "w_grid": [500, 2000, 5000], "realizations": 2, "output_dir": "out"}"#,
    )
    .unwrap();
    let start = Instant::now();
    ok(&netwalk(&["experiment", "--config", "cfg.json"], dir.path()));
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "{elapsed:?}");
    let (_, records) = read_table(&dir.path().join("out/records.csv"));
    assert_eq!(records.len(), 6 * 5 * 3 * 2 * 6);
}
