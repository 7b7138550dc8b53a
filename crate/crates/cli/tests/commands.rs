use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: &[&str] = &["--companies", "600", "--persons", "1000", "--hubs", "2", "--hub-degree", "30"];
const SIZES: &[&str] = &["--max-size", "200", "--min-size", "5"];

fn riskrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riskrank")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Every file under `dir` except timing files, keyed by relative path.
fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if !path.file_name().unwrap().to_str().unwrap().starts_with("timing") {
                out.insert(path.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

/// generate → build → partition on a small register; returns (tmp, graphs, partitions file).
fn small_pipeline() -> (TempDir, PathBuf, PathBuf) {
    let tmp = TempDir::new().unwrap();
    let (data, graphs, parts) = (tmp.path().join("data"), tmp.path().join("graphs"), tmp.path().join("parts"));
    let mut args = vec!["generate", "--out", s(&data)];
    args.extend(SMALL);
    assert_eq!(code(&riskrank(&args)), 0);
    let records = data.join("records.csv");
    let risk = data.join("risk.csv");
    let o = riskrank(&["build", "--records", s(&records), "--risk", s(&risk), "--out", s(&graphs)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut args = vec!["partition", "--graphs", s(&graphs), "--out", s(&parts)];
    args.extend(SIZES);
    let o = riskrank(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let file = parts.join("partitions.csv");
    (tmp, graphs, file)
}

#[test]
fn build_three_record_fixture() {
    let tmp = TempDir::new().unwrap();
    let records = tmp.path().join("records.csv");
    fs::write(
        &records,
        "person_id,company_id,role,start_date,end_date\n\
         alice,acme,managing_director,2010-01-01,2013-06-30\n\
         alice,bolt,shareholder_managing_director,2005-01-01,2015-12-31\n\
         bob,bolt,managing_director,2019-03-01,\n",
    )
    .unwrap();
    let out = tmp.path().join("graphs");
    let o = riskrank(&["build", "--records", s(&records), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stats: serde_json::Value = serde_json::from_slice(&fs::read(out.join("graph_stats.json")).unwrap()).unwrap();
    assert_eq!(stats["bipartite"]["company_nodes"], 2);
    assert_eq!(stats["bipartite"]["person_nodes"], 2);
    assert_eq!(stats["bipartite"]["edges"], 3);
    assert_eq!(stats["projection"]["edges"], 1);
}

#[test]
fn empty_register_builds_empty_graphs_with_a_warning() {
    let tmp = TempDir::new().unwrap();
    let records = tmp.path().join("records.csv");
    fs::write(&records, "person_id,company_id,role,start_date,end_date\n").unwrap();
    let out = tmp.path().join("graphs");
    let o = riskrank(&["build", "--records", s(&records), "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("no usable records"), "{}", stderr(&o));
    let bipartite = fs::read_to_string(out.join("bipartite.csv")).unwrap();
    assert_eq!(bipartite.lines().count(), 1);
}

#[test]
fn malformed_date_fails_with_line_number() {
    let tmp = TempDir::new().unwrap();
    let records = tmp.path().join("records.csv");
    fs::write(
        &records,
        "person_id,company_id,role,start_date,end_date\n\
         alice,acme,managing_director,2010-01-01,\n\
         bob,acme,managing_director,2010-13-45,\n",
    )
    .unwrap();
    let o = riskrank(&["build", "--records", s(&records), "--out", s(&tmp.path().join("g"))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn partition_and_rank_are_repeatable() {
    let (tmp, graphs, parts) = small_pipeline();
    let again = tmp.path().join("parts2");
    let mut args = vec!["partition", "--graphs", s(&graphs), "--out", s(&again)];
    args.extend(SIZES);
    assert_eq!(code(&riskrank(&args)), 0);
    assert_eq!(fs::read(&parts).unwrap(), fs::read(again.join("partitions.csv")).unwrap());

    let (a, b) = (tmp.path().join("rank_a"), tmp.path().join("rank_b"));
    for out in [&a, &b] {
        let o = riskrank(&["rank", "--graphs", s(&graphs), "--partitions", s(&parts), "--out", s(out), "--seed", "7"]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let (sa, sb) = (snapshot(&a), snapshot(&b));
    assert!(sa.contains_key(Path::new("metrics_pagerank.json")));
    assert!(sa.contains_key(Path::new("metrics_birank.json")));
    assert_eq!(sa, sb);
}

#[test]
fn birank_survives_a_pagerank_failure() {
    let (tmp, graphs, parts) = small_pipeline();
    let out = tmp.path().join("rank");
    // A directory where PageRank's score file should go makes only that algorithm fail.
    fs::create_dir_all(out.join("scores_pagerank.csv")).unwrap();
    let o = riskrank(&["rank", "--graphs", s(&graphs), "--partitions", s(&parts), "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("pagerank"));
    assert!(out.join("metrics_birank.json").is_file());
    assert!(out.join("scores_birank.csv").is_file());
    assert!(!out.join("metrics_pagerank.json").exists());
}

#[test]
fn non_converged_runs_exit_partial() {
    let (tmp, graphs, parts) = small_pipeline();
    let out = tmp.path().join("rank");
    let o = riskrank(&[
        "rank", "--graphs", s(&graphs), "--partitions", s(&parts), "--out", s(&out), "--pagerank-max-iter", "2",
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(out.join("metrics_pagerank.json").is_file());
    assert!(out.join("metrics_birank.json").is_file());
}

#[test]
fn bench_single_repetition_has_no_sd() {
    let (tmp, graphs, parts) = small_pipeline();
    let out = tmp.path().join("bench");
    let o = riskrank(&["bench", "--graphs", s(&graphs), "--partitions", s(&parts), "--out", s(&out), "--repetitions", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("bench.json")).unwrap()).unwrap();
    let algorithms = report["algorithms"].as_array().unwrap();
    assert_eq!(algorithms.len(), 2);
    for a in algorithms {
        assert!(a["sd_seconds"].is_null());
        assert_eq!(a["run_seconds"].as_array().unwrap().len(), 1);
    }
}

#[test]
fn reproduce_equals_the_four_commands() {
    let tmp = TempDir::new().unwrap();
    let whole = tmp.path().join("whole");
    let mut args = vec!["reproduce", "--out", s(&whole)];
    args.extend(SMALL);
    args.extend(SIZES);
    let o = riskrank(&args);
    assert!([0, 3].contains(&code(&o)), "{}", stderr(&o));

    let steps = tmp.path().join("steps");
    let (data, graphs, parts, rank) = (steps.join("data"), steps.join("graphs"), steps.join("partitions"), steps.join("rank"));
    let mut args = vec!["generate", "--out", s(&data)];
    args.extend(SMALL);
    assert_eq!(code(&riskrank(&args)), 0);
    let (records, risk) = (data.join("records.csv"), data.join("risk.csv"));
    assert_eq!(code(&riskrank(&["build", "--records", s(&records), "--risk", s(&risk), "--out", s(&graphs)])), 0);
    let mut args = vec!["partition", "--graphs", s(&graphs), "--out", s(&parts)];
    args.extend(SIZES);
    assert_eq!(code(&riskrank(&args)), 0);
    let file = parts.join("partitions.csv");
    assert_eq!(code(&riskrank(&["rank", "--graphs", s(&graphs), "--partitions", s(&file), "--out", s(&rank)])), 0);

    let mut manual = snapshot(&steps);
    let mut combined = snapshot(&whole);
    assert!(combined.remove(Path::new("report.json")).is_some());
    assert_eq!(combined.keys().collect::<Vec<_>>(), manual.keys().collect::<Vec<_>>());
    for (path, bytes) in &combined {
        assert!(manual.remove(path).unwrap() == *bytes, "{} differs", path.display());
    }
}

#[test]
fn help_lists_defaults() {
    let o = riskrank(&["reproduce", "--help"]);
    assert_eq!(code(&o), 0);
    let help = String::from_utf8(o.stdout).unwrap();
    for default in ["[default: 0.85]", "[default: 10]", "[default: 1e-8]", "[default: 6000]", "[default: 20210101]", "[default: 1]"] {
        assert!(help.contains(default), "missing {default}");
    }
    let o = riskrank(&["build", "--help"]);
    let help = String::from_utf8(o.stdout).unwrap();
    assert!(help.contains("[default: 1991-01-01]") && help.contains("[default: 30]"));
}

#[test]
fn bad_parameters_are_input_errors() {
    let (tmp, graphs, parts) = small_pipeline();
    let o = riskrank(&[
        "rank", "--graphs", s(&graphs), "--partitions", s(&parts), "--out", s(&tmp.path().join("r")), "--pagerank-alpha", "1.5",
    ]);
    assert_eq!(code(&o), 1);
    let o = riskrank(&["rank", "--graphs", s(&tmp.path().join("missing")), "--partitions", s(&parts), "--out", s(tmp.path())]);
    assert_eq!(code(&o), 1);
}
