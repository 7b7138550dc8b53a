//! Command-line pipeline around the `riskrank` library: graph building,
//! partitioning, cross-validated ranking, timing and synthetic reproduction.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod files;

use cli::{Cli, Command};
use commands::reproduce::{DATA_DIR, GRAPHS_DIR, PARTITIONS_DIR, RANK_DIR};
use config::RunConfig;
use error::{CliError, EXIT_OK};

/// Runs one parsed invocation and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let cfg = cli.resolve(RunConfig::load(cli.config.as_deref())?);
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(CliError::input)?;
    pool.install(|| dispatch(&cli.command, &cfg))
}

fn dispatch(command: &Command, cfg: &RunConfig) -> Result<i32, CliError> {
    match command {
        Command::Build(c) => {
            let s = commands::cmd_build(cfg, &c.records, c.risk.as_deref(), &c.out)?;
            println!(
                "bipartite: {} companies, {} persons, {} edges; projection: {} edges",
                s.bipartite.company_nodes, s.bipartite.person_nodes, s.bipartite.edges, s.projection.edges
            );
            Ok(EXIT_OK)
        }
        Command::Partition(c) => {
            let defaults = riskrank::partition::PartitionConfig::default();
            let (s, outcome) = commands::cmd_partition(cfg, &c.graphs, &c.out, defaults.max_size, defaults.min_size)?;
            println!(
                "{} partitions, {} companies retained, {} dropped",
                s.partition_count, s.retained_nodes, s.dropped_nodes
            );
            Ok(outcome.exit_code())
        }
        Command::Rank(c) => {
            let run = commands::cmd_rank(cfg, &c.graphs, &c.partitions, &c.out)?;
            for r in &run.reports {
                print_headline(r);
            }
            for (a, e) in &run.failures {
                eprintln!("{a}: {e}");
            }
            Ok(run.exit_code())
        }
        Command::Bench(c) => {
            let (report, outcome) = commands::cmd_bench(cfg, &c.graphs, &c.partitions, &c.out)?;
            for a in &report.algorithms {
                match a.sd_seconds {
                    Some(sd) => println!("{}: {:.3} s ± {:.3} s over {} runs", a.algorithm, a.mean_seconds, sd, report.repetitions),
                    None => println!("{}: {:.3} s (1 run)", a.algorithm, a.mean_seconds),
                }
            }
            Ok(outcome.exit_code())
        }
        Command::Generate(c) => {
            let s = commands::cmd_generate(&cfg.generate, &c.out)?;
            println!("{} records, {} companies, {} labeled ({} risky)", s.records, s.companies, s.labeled, s.labeled_risk);
            Ok(EXIT_OK)
        }
        Command::Reproduce(c) => {
            let r = commands::cmd_reproduce(cfg, &c.out)?;
            println!(
                "outputs in {}/{{{DATA_DIR},{GRAPHS_DIR},{PARTITIONS_DIR},{RANK_DIR}}}",
                c.out.display()
            );
            for rep in &r.rank.reports {
                print_headline(rep);
            }
            for claim in &r.report.claims {
                println!("{} {}", if claim.pass { "PASS" } else { "FAIL" }, claim.name);
            }
            for f in &r.report.failures {
                eprintln!("{f}");
            }
            Ok(r.exit_code())
        }
    }
}

fn print_headline(r: &commands::RankReport) {
    let h = &r.headline;
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into());
    let p = h.rho_p.map(|v| format!("{v:.2e}")).unwrap_or_else(|| "n/a".into());
    println!(
        "{}: rho {} (p {}), Z {:.3}, recall@{:.0}% {:.4}, precision {:.4}, top-bin lift {}",
        r.algorithm,
        opt(h.rho),
        p,
        h.z,
        h.selection_fraction * 100.0,
        h.recall_at_selection,
        h.precision_at_selection,
        opt(h.top_bin_lift)
    );
}
