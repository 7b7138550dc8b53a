//! The ten acceptance criteria, one PASS/FAIL line each. Runs as a plain
//! binary so the lines print in order without `--nocapture`.

#[allow(dead_code)]
#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::Rng;
use tempfile::TempDir;

use common::oracles::{brute_force_projection, dense_birank, dense_fiedler, dense_pagerank, dense_s, dense_transition, same_split};
use common::{max_abs_diff, random_bipartite, random_unipartite, rng, small_pipeline};
use riskrank::crossval::{assign_folds, cv_rank, Algorithm, PartitionGraphs};
use riskrank::datagen::{generate, paper_shape_preset, GenConfig};
use riskrank::eval::{evaluate, mann_whitney, precision_recall_at, spearman, target_chart, EvalOptions, LabeledScore};
use riskrank::graph::{build_bipartite, project_unipartite, BipartiteGraph, BuildConfig, RiskLabel, RiskVector, UnipartiteGraph};
use riskrank::partition::{fiedler_vector, recursive_partition, restrict_bipartite, FiedlerOptions, PartitionConfig};
use riskrank::ranking::{birank, pagerank, row_normalize, symmetric_normalize, BiRankParams, PageRankParams, RestartVector};
use riskrank_cli::commands::{cmd_bench, cmd_build, cmd_reproduce, Reproduction};
use riskrank_cli::commands::partition::cmd_partition;
use riskrank_cli::config::{RunConfig, REPRODUCE_MAX_SIZE, REPRODUCE_MIN_SIZE};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn restart(r: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| if r.random_bool(0.3) { 1.0 } else { 0.0 }).collect()
}

fn oracle_equivalence() -> Check {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let mut r = rng(11_000 + seed);
        let n = r.random_range(2..=100);
        let density = r.random_range(0.01..0.2);
        let g = random_unipartite(&mut r, n, density, false);
        let e = restart(&mut r, n);
        let params = PageRankParams::default();
        let sparse = pagerank(&row_normalize(&g), &RestartVector::new(e.clone()).unwrap(), &params).unwrap();
        let dense = dense_pagerank(&dense_transition(&g), &DVector::from_vec(e), params.alpha, params.epsilon, params.max_iter);
        worst = worst.max(max_abs_diff(&sparse.scores, dense.as_slice()));

        let companies = r.random_range(1..=60);
        let persons = r.random_range(1..=40);
        let density = r.random_range(0.02..0.3);
        let b = random_bipartite(&mut r, companies, persons, density);
        let u0 = restart(&mut r, companies);
        let p0 = restart(&mut r, persons);
        let params = BiRankParams::default();
        let (u, p) = birank(
            &symmetric_normalize(&b),
            &RestartVector::new(u0.clone()).unwrap(),
            &RestartVector::new(p0.clone()).unwrap(),
            &params,
        )
        .unwrap();
        let (du, dp) = dense_birank(
            &dense_s(&b),
            &DVector::from_vec(u0),
            &DVector::from_vec(p0),
            params.alpha,
            params.beta,
            params.epsilon,
            params.max_iter,
        );
        worst = worst.max(max_abs_diff(&u.scores, du.as_slice())).max(max_abs_diff(&p.scores, dp.as_slice()));
    }
    let secs = started.elapsed().as_secs_f64();
    ensure(worst <= 1e-10 && secs < 10.0, format!("max abs diff {worst:.1e}, {secs:.2} s"))
}

fn analytic_fixed_points() -> Check {
    let g = UnipartiteGraph::from_index_edges(2, &[(0, 1, 1.0)]).unwrap();
    let r = pagerank(&row_normalize(&g), &RestartVector::new(vec![1.0, 0.0]).unwrap(), &PageRankParams::default()).unwrap();
    let b = BipartiteGraph::from_id_edges([("c", "p", 1)]).unwrap();
    let params = BiRankParams { alpha: 0.5, beta: 0.5, ..Default::default() };
    let (u, p) = birank(&symmetric_normalize(&b), &RestartVector::new(vec![1.0]).unwrap(), &RestartVector::zeros(1), &params).unwrap();
    let errs = [
        (r.scores[0] - 0.540541).abs(),
        (r.scores[1] - 0.459459).abs(),
        (u.scores[0] - 2.0 / 3.0).abs(),
        (p.scores[0] - 1.0 / 3.0).abs(),
    ];
    let worst = errs.iter().copied().fold(0.0, f64::max);
    ensure(
        worst < 1e-6,
        format!("pagerank ({:.6}, {:.6}), birank ({:.6}, {:.6})", r.scores[0], r.scores[1], u.scores[0], p.scores[0]),
    )
}

fn leakage() -> Check {
    let p = small_pipeline(800, 42);
    let folds = assign_folds(&p.risk, 10, 7).unwrap();
    let companies = p.bipartite.companies();
    let retained: BTreeSet<&String> = p.set.partitions.iter().flat_map(|x| &x.companies).collect();
    let mut nodes: Vec<usize> = (0..companies.len())
        .filter(|&i| p.risk.get(i).is_known() && retained.contains(&companies[i]))
        .collect();
    nodes.shuffle(&mut rng(3));
    nodes.truncate(50);
    let uni = p.set.restrict_unipartite(&p.projection).unwrap();
    let bi = restrict_bipartite(&p.bipartite, &p.set).unwrap();
    let mut leaks = Vec::new();
    for algorithm in [Algorithm::PageRank(PageRankParams::default()), Algorithm::BiRank(BiRankParams::default())] {
        let graphs = || match algorithm {
            Algorithm::PageRank(_) => PartitionGraphs::Unipartite(&uni),
            Algorithm::BiRank(_) => PartitionGraphs::Bipartite(&bi),
        };
        let score = |risk: &RiskVector, id: &String| {
            let s = cv_rank(companies, graphs(), risk, &folds, &algorithm).unwrap();
            s.companies.iter().find(|n| &n.node_id == id).unwrap().score
        };
        for &i in &nodes {
            let mut flipped = p.risk.clone();
            flipped.set(i, if p.risk.get(i) == RiskLabel::Risk { RiskLabel::Compliant } else { RiskLabel::Risk });
            let id = &companies[i];
            if score(&p.risk, id).to_bits() != score(&flipped, id).to_bits() {
                leaks.push(format!("{} {id}", algorithm.name()));
            }
        }
    }
    ensure(
        nodes.len() == 50 && leaks.is_empty(),
        format!("{} nodes x 2 algorithms, leaks {:?}", nodes.len(), leaks),
    )
}

fn edge_ratio(hubs: usize) -> f64 {
    let cfg = GenConfig { hub_count: hubs, ..paper_shape_preset() };
    let data = generate(&cfg).unwrap();
    let built = build_bipartite(&data.records, &cfg.window().unwrap(), &data.risk, BuildConfig::default());
    project_unipartite(&built.graph).edges().len() as f64 / built.graph.edges().len() as f64
}

fn projection_law() -> Check {
    let mut mismatches = 0;
    for seed in 0..10 {
        let mut r = rng(12_000 + seed);
        let b = random_bipartite(&mut r, 30 + seed as usize, 25, 0.1);
        if project_unipartite(&b).edges().len() != brute_force_projection(&b).len() {
            mismatches += 1;
        }
    }
    let preset = paper_shape_preset().hub_count;
    let (with, without) = (edge_ratio(preset), edge_ratio(0));
    ensure(
        mismatches == 0 && with > 3.0 && without < 1.2,
        format!("{mismatches} count mismatches; ratio {with:.2} with hubs, {without:.2} without"),
    )
}

fn partitioning() -> Check {
    let started = Instant::now();
    let cfg = GenConfig { n_companies: 5000, n_persons: 8300, seed: 5000, ..paper_shape_preset() };
    let data = generate(&cfg).unwrap();
    let built = build_bipartite(&data.records, &cfg.window().unwrap(), &data.risk, BuildConfig::default());
    let g = project_unipartite(&built.graph);
    let set = recursive_partition(&g, &PartitionConfig { max_size: 500, min_size: 10, ..Default::default() }).unwrap();
    let out_of_bounds = set.partitions.iter().filter(|p| !(10..500).contains(&p.len())).count();

    let opts = FiedlerOptions::default();
    let (mut compared, mut split_mismatches, mut seed) = (0, 0, 0);
    while compared < 20 {
        seed += 1;
        let mut r = rng(13_000 + seed);
        let n = r.random_range(3..=200);
        let density = r.random_range(0.5..4.0) / n as f64;
        let h = random_unipartite(&mut r, n, density, true);
        let (_, dense, gap) = dense_fiedler(&h);
        if gap < 1e-6 {
            continue;
        }
        let f = fiedler_vector(&h, &opts).unwrap();
        if !same_split(&f.vector, &dense, opts.tol, 1e-6) {
            split_mismatches += 1;
        }
        compared += 1;
    }
    let secs = started.elapsed().as_secs_f64();
    ensure(
        g.node_count() >= 5000 && !set.is_empty() && out_of_bounds == 0 && split_mismatches == 0 && secs < 60.0,
        format!(
            "{} nodes -> {} partitions, {out_of_bounds} out of [10, 500); {split_mismatches}/20 sign-split mismatches; {secs:.1} s",
            g.node_count(),
            set.len()
        ),
    )
}

fn labeled(scores: &[f64], labels: &[u8]) -> Vec<LabeledScore> {
    scores
        .iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (&score, &l))| LabeledScore { company_id: format!("c{i:02}"), score, label: l == 1 })
        .collect()
}

fn statistics_fixtures() -> Check {
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut check = |name: &str, ok: bool| {
        checks += 1;
        if !ok {
            failures.push(name.to_string());
        }
    };
    let s = spearman(&labeled(&[1.0, 2.0, 3.0, 4.0], &[0, 0, 1, 1])).unwrap();
    check("spearman rho", (s.rho.unwrap() - 2.0 / 5f64.sqrt()).abs() < 1e-9);
    check("spearman p", (s.p_value.unwrap() - (1.0 - 2.0 / 5f64.sqrt())).abs() < 1e-9);

    let mw = mann_whitney(&[1.0, 2.0, 2.0, 3.0, 5.0, 6.0], &[2.0, 3.0, 4.0, 6.0, 7.0, 8.0]).unwrap();
    check("mann-whitney u", mw.u == 27.0);
    check("mann-whitney z", (mw.z - 9.0 / (3.0 * (13.0 - 36.0 / 132.0f64)).sqrt()).abs() < 1e-9);

    // Top 8 by score, ties by id: c13 c00 c08 c04 c16 c15 c09 c02, six of the nine positives.
    let scores = [
        0.9, 0.1, 0.5, 0.5, 0.7, 0.3, 0.5, 0.2, 0.8, 0.6, 0.4, 0.5, 0.05, 0.95, 0.3, 0.65, 0.7, 0.15, 0.5, 0.45,
    ];
    let labels = [1, 0, 1, 0, 0, 1, 1, 0, 1, 0, 0, 0, 0, 1, 0, 1, 1, 0, 0, 1];
    let d = labeled(&scores, &labels);
    let at = precision_recall_at(&d, 8).unwrap();
    check("precision@8", at.precision == 6.0 / 8.0);
    check("recall@8", at.recall == 6.0 / 9.0);

    let bins = target_chart(&d, 4).unwrap();
    check("target chart sizes", bins.iter().all(|b| b.size == 5));
    check("target chart positives", bins.iter().map(|b| b.positives).collect::<Vec<_>>() == [4, 3, 2, 0]);
    check("target chart lift", bins[0].lift.is_some_and(|l| (l - 0.8 / 0.45).abs() < 1e-9));

    let cubed: Vec<LabeledScore> = d.iter().map(|x| LabeledScore { score: x.score.powi(3) + 1.0, ..x.clone() }).collect();
    let opts = EvalOptions { bin_count: 4, pr_steps: 20 };
    let (a, b) = (evaluate("x", &d, d.len(), &opts).unwrap(), evaluate("x", &cubed, d.len(), &opts).unwrap());
    check("cubic invariance: spearman", a.rho == b.rho && a.rho_p == b.rho_p);
    check("cubic invariance: mann-whitney", a.u == b.u && a.z == b.z);
    check("cubic invariance: precision/recall", a.pr_curve == b.pr_curve);
    check("cubic invariance: target chart", a.target_bins == b.target_bins);
    ensure(failures.is_empty(), format!("{checks} checks, failed {failures:?}"))
}

fn reproduce(cfg: &RunConfig, out: &Path) -> Reproduction {
    cmd_reproduce(cfg, out).unwrap()
}

fn qualitative(run: &Reproduction) -> Check {
    let names = [
        "pagerank_spearman_positive",
        "birank_spearman_positive",
        "pagerank_mann_whitney_positive",
        "birank_mann_whitney_positive",
        "birank_top_bin_lift",
        "birank_recall_at_least_pagerank",
    ];
    let failed: Vec<&str> = names.iter().copied().filter(|n| !run.claim(n).is_some_and(|c| c.pass)).collect();
    let h = &run.report.headlines;
    let (pr, br) = (&h["pagerank"], &h["birank"]);
    ensure(
        failed.is_empty(),
        format!(
            "rho {:.3}/{:.3} (p {:.1e}/{:.1e}), Z {:.2}/{:.2}, birank lift {:.2}, recall@20% {:.3}/{:.3} (pagerank/birank); failed {failed:?}",
            pr.rho.unwrap_or(f64::NAN),
            br.rho.unwrap_or(f64::NAN),
            pr.rho_p.unwrap_or(f64::NAN),
            br.rho_p.unwrap_or(f64::NAN),
            pr.z,
            br.z,
            br.top_bin_lift.unwrap_or(f64::NAN),
            pr.recall_at_selection,
            br.recall_at_selection,
        ),
    )
}

fn null_control(dir: &Path) -> Check {
    let mut cfg = RunConfig::default();
    cfg.generate.homophily = 0.0;
    let run = reproduce(&cfg, &dir.join("null"));
    let rho = |a: &str| run.report.headlines.get(a).and_then(|h| h.rho);
    let (pr, br) = (rho("pagerank"), rho("birank"));
    ensure(
        matches!((pr, br), (Some(a), Some(b)) if a.abs() < 0.05 && b.abs() < 0.05),
        format!("rho pagerank {:.4}, birank {:.4}", pr.unwrap_or(f64::NAN), br.unwrap_or(f64::NAN)),
    )
}

fn files_except_timing(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if !path.file_name().unwrap().to_str().unwrap().starts_with("timing") {
                out.insert(path.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn determinism(first: &Path, dir: &Path) -> Check {
    let second = dir.join("second");
    reproduce(&RunConfig::default(), &second);
    let (a, b) = (files_except_timing(first), files_except_timing(&second));
    let differing: Vec<_> = a.iter().filter(|(k, v)| b.get(*k) != Some(v)).map(|(k, _)| k.display().to_string()).collect();
    ensure(
        a.len() == b.len() && differing.is_empty() && !a.is_empty(),
        format!("{} files compared, differing {differing:?}", a.len()),
    )
}

fn bench(dir: &Path) -> Check {
    let cfg = RunConfig::default();
    let data = dir.join("bench_data");
    riskrank_cli::commands::cmd_generate(&cfg.generate, &data).unwrap();
    let graphs = dir.join("bench_graphs");
    cmd_build(&cfg, &data.join("records.csv"), Some(&data.join("risk.csv")), &graphs).unwrap();
    let parts = dir.join("bench_parts");
    cmd_partition(&cfg, &graphs, &parts, REPRODUCE_MAX_SIZE, REPRODUCE_MIN_SIZE).unwrap();
    let (report, _) = cmd_bench(&cfg, &graphs, &parts.join("partitions.csv"), &dir.join("bench")).unwrap();
    let complete = report.repetitions == 20
        && report.algorithms.len() == 2
        && report.algorithms.iter().all(|a| a.run_seconds.len() == 20 && a.sd_seconds.is_some() && a.mean_seconds > 0.0);
    let line: Vec<String> = report
        .algorithms
        .iter()
        .map(|a| format!("{} {:.4} ± {:.4} s", a.algorithm, a.mean_seconds, a.sd_seconds.unwrap_or(f64::NAN)))
        .collect();
    ensure(complete, format!("{} reps on {} partitions: {}", report.repetitions, report.partitions, line.join(", ")))
}

fn main() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path();
    let first = dir.join("first");

    let criteria: Vec<(&str, Box<dyn FnOnce() -> Check + '_>)> = vec![
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("analytic fixed points", Box::new(analytic_fixed_points)),
        ("leakage", Box::new(leakage)),
        ("projection law", Box::new(projection_law)),
        ("partitioning", Box::new(partitioning)),
        ("statistics fixtures", Box::new(statistics_fixtures)),
        (
            "qualitative reproduction",
            Box::new(|| {
                let started = Instant::now();
                let run = reproduce(&RunConfig::default(), &first);
                let secs = started.elapsed().as_secs_f64();
                qualitative(&run).and_then(|d| ensure(secs < 300.0, format!("{d}; {secs:.1} s")))
            }),
        ),
        ("null control", Box::new(|| null_control(dir))),
        ("determinism", Box::new(|| determinism(&first, dir))),
        ("bench harness", Box::new(|| bench(dir))),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
