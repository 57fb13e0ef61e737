use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn hiermap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hiermap")).args(args).env("RUST_BACKTRACE", "0").output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

/// rows x cols grid in METIS format.
fn grid_metis(rows: usize, cols: usize) -> String {
    let id = |r: usize, c: usize| r * cols + c + 1;
    let mut lines = Vec::new();
    let mut m = 0;
    for r in 0..rows {
        for c in 0..cols {
            let mut nb = Vec::new();
            if r > 0 {
                nb.push(id(r - 1, c));
            }
            if c > 0 {
                nb.push(id(r, c - 1));
            }
            if c + 1 < cols {
                nb.push(id(r, c + 1));
            }
            if r + 1 < rows {
                nb.push(id(r + 1, c));
            }
            m += nb.len();
            lines.push(nb.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
        }
    }
    format!("{} {}\n{}\n", rows * cols, m / 2, lines.join("\n"))
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

#[test]
fn map_then_eval_reproduces_j() {
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "grid.graph", &grid_metis(6, 8));
    let map = dir.path().join("grid.map");
    let stats = dir.path().join("grid.json");
    let g = graph.to_str().unwrap();
    let out = hiermap(&[
        "map",
        "--graph",
        g,
        "--hierarchy",
        "4:2:3",
        "--distance",
        "1:10:100",
        "--threads",
        "2",
        "--output",
        map.to_str().unwrap(),
        "--stats",
        stats.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let record: serde_json::Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    let keys: Vec<&str> = record.as_object().unwrap().keys().map(String::as_str).collect();
    let mut expected = vec![
        "instance",
        "hierarchy",
        "distance",
        "eps",
        "strategy",
        "preset",
        "threads",
        "seed",
        "J",
        "edge_cut",
        "max_imbalance",
        "wall_time_ms",
    ];
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    expected.sort_unstable();
    assert_eq!(sorted, expected);
    assert_eq!(record["eps"], "0.03");
    assert_eq!(record["strategy"], "nb-layer");
    assert_eq!(record["preset"], "eco");
    assert!(record["wall_time_ms"].as_f64().unwrap() > 0.0);
    assert_eq!(fs::read_to_string(&map).unwrap().lines().count(), 48);

    let report = stdout(&hiermap(&[
        "eval",
        "--graph",
        g,
        "--hierarchy",
        "4:2:3",
        "--distance",
        "1:10:100",
        "--mapping",
        map.to_str().unwrap(),
    ]));
    assert_eq!(field(&report, "J"), record["J"].to_string());
    assert_eq!(field(&report, "edge_cut"), record["edge_cut"].to_string());
    assert!(field(&report, "verdict").starts_with("balanced"));
}

#[test]
fn map_rejects_mismatched_hierarchy_and_small_graphs() {
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "p4.graph", "4 3\n2\n1 3\n2 4\n3\n");
    let g = graph.to_str().unwrap();
    let out = hiermap(&["map", "--graph", g, "--hierarchy", "4:8", "--distance", "1:10:100"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("distances"));
    let out = hiermap(&["map", "--graph", g, "--hierarchy", "4:2", "--distance", "1:10"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("n < k"));
}

#[test]
fn eval_all_zero_mapping() {
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "grid.graph", &grid_metis(2, 4));
    let map = write(dir.path(), "zero.map", &"0\n".repeat(8));
    let report = stdout(&hiermap(&[
        "eval",
        "--graph",
        graph.to_str().unwrap(),
        "--hierarchy",
        "2:2",
        "--distance",
        "1:10",
        "--mapping",
        map.to_str().unwrap(),
    ]));
    assert_eq!(field(&report, "J"), "0");
    assert_eq!(field(&report, "edge_cut"), "0");
    assert_eq!(field(&report, "block_weights"), "8 0 0 0");
    assert!(field(&report, "verdict").starts_with("unbalanced"));
}

#[test]
fn eval_reports_unbalanced_block_of_121() {
    // 800 isolated unit vertices, block 0 holds 121 of them
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "iso.graph", &format!("800 0\n{}", "\n".repeat(800)));
    let mut ids: Vec<usize> = vec![0; 121];
    ids.extend((0..679).map(|i| 1 + i % 7));
    let text: String = ids.iter().map(|i| format!("{i}\n")).collect();
    let map = write(dir.path(), "bad.map", &text);
    let report = stdout(&hiermap(&[
        "eval",
        "--graph",
        graph.to_str().unwrap(),
        "--hierarchy",
        "2:4",
        "--distance",
        "1:10",
        "--imbalance",
        "0.1",
        "--mapping",
        map.to_str().unwrap(),
    ]));
    assert_eq!(field(&report, "verdict"), "unbalanced, L_max=110");
}

#[test]
fn eval_rejects_bad_mappings() {
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "p4.graph", "4 3\n2\n1 3\n2 4\n3\n");
    let g = graph.to_str().unwrap();
    let short = write(dir.path(), "short.map", "0\n1\n");
    let out =
        hiermap(&["eval", "--graph", g, "--hierarchy", "2", "--distance", "1", "--mapping", short.to_str().unwrap()]);
    assert!(!out.status.success());
    let big = write(dir.path(), "big.map", "0\n1\n2\n0\n");
    let out =
        hiermap(&["eval", "--graph", g, "--hierarchy", "2", "--distance", "1", "--mapping", big.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn oracle_on_path_of_four() {
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "p4.graph", "4 3\n2\n1 3\n2 4\n3\n");
    let out = stdout(&hiermap(&[
        "oracle",
        "--graph",
        graph.to_str().unwrap(),
        "--hierarchy",
        "2",
        "--distance",
        "1",
        "--imbalance",
        "0",
    ]));
    assert_eq!(field(&out, "J"), "2");
}

#[test]
fn bench_rows_and_aggregate() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "a.graph", &grid_metis(4, 4));
    write(dir.path(), "b.graph", &grid_metis(3, 5));
    let list = write(dir.path(), "list.txt", "a.graph\nb.graph\n");
    let csv = dir.path().join("runs.csv");
    let agg = dir.path().join("agg.csv");
    let out = hiermap(&[
        "bench",
        "--instances",
        list.to_str().unwrap(),
        "--hierarchy",
        "2:2",
        "--distance",
        "1:10",
        "--seeds",
        "1,2,3",
        "--jobs",
        "2",
        "--output",
        csv.to_str().unwrap(),
        "--aggregate",
        agg.to_str().unwrap(),
        "--baseline",
        "eco-1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "instance,hierarchy,distance,eps,strategy,preset,threads,seed,J,edge_cut,max_imbalance,wall_time_ms,error"
    );
    assert_eq!(lines.len(), 1 + 6);
    let seeds: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(7).unwrap()).collect();
    assert_eq!(seeds, ["1", "2", "3", "1", "2", "3"]);
    assert!(lines[1].starts_with("a,2:2,1:10,0.03,nb-layer,eco,1,1,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(',')), "no errors expected");

    let agg = fs::read_to_string(&agg).unwrap();
    let agg: Vec<&str> = agg.lines().collect();
    assert_eq!(agg.len(), 3);
    assert!(agg[0].ends_with("runs,geomean_time_ms,mean_J,speedup"));
    assert!(agg[1].ends_with(",1.0"), "self speedup is 1: {}", agg[1]);
}

#[test]
fn bench_records_failures_and_continues() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "ok.graph", &grid_metis(4, 4));
    write(dir.path(), "broken.graph", "3 1\n2\n");
    let list = write(dir.path(), "list.txt", "broken.graph\nok.graph\n");
    let out = stdout(&hiermap(&[
        "bench",
        "--instances",
        list.to_str().unwrap(),
        "--hierarchy",
        "2:2",
        "--distance",
        "1:10",
        "--seeds",
        "1",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(!lines[1].ends_with(','), "broken instance carries an error: {}", lines[1]);
    assert!(lines[2].ends_with(','));
}

#[test]
fn perfprofile_csv_and_plot() {
    let dir = TempDir::new().unwrap();
    let table = write(dir.path(), "q.csv", "algorithm,instance,quality\nA,g,10\nB,g,20\n");
    let plot = dir.path().join("p.svg");
    let out = stdout(&hiermap(&[
        "perfprofile",
        "--table",
        table.to_str().unwrap(),
        "--taus",
        "1,1.5,2",
        "--plot",
        plot.to_str().unwrap(),
    ]));
    assert_eq!(out, "algorithm,tau,fraction\nA,1.0,1.0\nA,1.5,1.0\nA,2.0,1.0\nB,1.0,0.0\nB,1.5,0.0\nB,2.0,1.0\n");
    assert!(fs::read_to_string(&plot).unwrap().contains("<svg"));

    let sparse = write(dir.path(), "s.csv", "algorithm,instance,quality\nA,g,10\nB,h,20\n");
    assert!(!hiermap(&["perfprofile", "--table", sparse.to_str().unwrap()]).status.success());
}
