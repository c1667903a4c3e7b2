use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use zeckgame::sim::{self, Execution};
use zeckgame::strategy::write_records_csv;
use zeckgame::{
    bounds_report, gaussian_fit, play_game, Policy, SimStats, Solver, SolverConfig, TreeFormat,
};
use zeckgame_service::{ServiceConfig, ADDR_ENV, DEFAULT_ADDR};

/// Play, solve and simulate the two-player Zeckendorf game.
///
/// A summary goes to stdout; machine-readable output is written only with
/// `--out`. A `.json` extension selects JSON, anything else CSV (or DOT for
/// `tree`, following `--format`).
#[derive(Debug, Parser)]
#[command(name = "zeckgame", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Random-game length statistics.
    Simulate {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = sim::DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run on a single thread (output is identical).
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gaussian fit of a stats file written by `simulate`.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean game length against n, with a least-squares line.
    Scaling {
        #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 150, 200])]
        ns: Vec<u32>,
        #[arg(long, default_value_t = sim::DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal-play winner and exact game lengths.
    Solve(SolveArgs),
    /// Shortest game and the ell(n)·n upper bound (no search).
    Bounds {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shortest and longest complete game by exhaustive search.
    Lengths(SolveArgs),
    /// One optimal line of play.
    Line(SolveArgs),
    /// Full game graph with the winning line marked.
    Tree {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "dot")]
        format: TreeFormat,
        #[arg(long, default_value_t = zeckgame::solver::DEFAULT_EXPORT_LIMIT)]
        limit: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play one game with a fixed policy.
    Play {
        #[arg(long)]
        n: u32,
        /// greedy, longest or random
        #[arg(long, default_value = "random")]
        policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long, env = ADDR_ENV, default_value = DEFAULT_ADDR)]
        addr: SocketAddr,
        /// Save sessions here on shutdown and restore them on start.
        #[arg(long)]
        snapshot: Option<PathBuf>,
        #[arg(long, default_value_t = zeckgame::solver::DEFAULT_SOLVE_LIMIT)]
        limit: u32,
        #[arg(long, default_value_t = zeckgame::solver::DEFAULT_EXPORT_LIMIT)]
        export_limit: u32,
    },
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    n: u32,
    /// Largest n the exhaustive search will accept.
    #[arg(long, default_value_t = zeckgame::solver::DEFAULT_SOLVE_LIMIT)]
    limit: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SolveArgs {
    fn solver(&self) -> Solver {
        Solver::new(SolverConfig {
            solve_limit: self.limit,
            ..SolverConfig::default()
        })
    }
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, text)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            n,
            trials,
            seed,
            sequential,
            out,
        } => {
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let stats = sim::simulate_with(n, trials, seed, exec)?;
            println!("n={n} trials={trials} seed={seed}");
            println!(
                "mean={:.4} variance={:.4} skewness={:.4} excess_kurtosis={:.4}",
                stats.mean, stats.variance, stats.skewness, stats.excess_kurtosis
            );
            println!(
                "lengths {}..={} p1_wins={} p2_wins={}",
                stats.min_length().unwrap_or(0),
                stats.max_length().unwrap_or(0),
                stats.p1_wins,
                stats.p2_wins
            );
            if let Some(path) = out {
                if is_json(&path) {
                    write_json(&path, &stats)?;
                } else {
                    write(&path, stats.to_csv())?;
                }
            }
        }
        Command::Fit { input, out } => {
            let text = fs::read_to_string(&input)
                .with_context(|| format!("cannot read {}", input.display()))?;
            let stats: SimStats = if is_json(&input) {
                serde_json::from_str(&text)?
            } else {
                SimStats::from_csv(&text)?
            };
            let fit = gaussian_fit(&stats)?;
            println!(
                "n={} trials={} mu={:.4} sigma={:.4}",
                stats.n, stats.trials, fit.mu, fit.sigma
            );
            if let Some(path) = out {
                write_json(&path, &fit)?;
            }
        }
        Command::Scaling {
            ns,
            trials,
            seed,
            out,
        } => {
            let report = zeckgame::average_scaling(&ns, trials, seed)?;
            for p in &report.points {
                println!("n={:<6} mean={:.4}", p.n, p.mean);
            }
            println!(
                "slope={:.6} intercept={:.6}",
                report.slope, report.intercept
            );
            if let Some(path) = out {
                if is_json(&path) {
                    write_json(&path, &report)?;
                } else {
                    write(&path, report.to_csv())?;
                }
            }
        }
        Command::Solve(args) => {
            let r = args.solver().solve(args.n)?;
            let parities: Vec<String> = r
                .parities
                .iter()
                .map(|p| format!("{p:?}").to_lowercase())
                .collect();
            println!("n={} winner {}", r.n, r.winner);
            println!("min {} max {}", r.min_length, r.max_length);
            println!(
                "reachable_states {} parities {}",
                r.reachable_states,
                parities.join(",")
            );
            if let Some(path) = &args.out {
                write_json(path, &r)?;
            }
        }
        Command::Bounds { n, out } => {
            let b = bounds_report(n)?;
            println!(
                "n={} lower {} ell {} upper {} log_upper {:.4}",
                b.n, b.lower, b.ell, b.upper, b.log_upper
            );
            if let Some(path) = out {
                write_json(&path, &b)?;
            }
        }
        Command::Lengths(args) => {
            let (min, max) = args.solver().extreme_lengths(args.n)?;
            println!("n={} min {min} max {max}", args.n);
            if let Some(path) = &args.out {
                write_json(
                    path,
                    &serde_json::json!({"n": args.n, "min": min, "max": max}),
                )?;
            }
        }
        Command::Line(args) => {
            let line = args.solver().winning_line(args.n)?;
            let names: Vec<String> = line.iter().map(|m| m.to_string()).collect();
            println!("n={} length {}: {}", args.n, line.len(), names.join(" "));
            if let Some(path) = &args.out {
                write_json(path, &line)?;
            }
        }
        Command::Tree {
            n,
            format,
            limit,
            out,
        } => {
            let solver = Solver::new(SolverConfig {
                export_limit: limit,
                ..SolverConfig::default()
            });
            let text = solver.export_tree(n, format)?;
            let graph = solver.analyze(n)?;
            let edges: usize = graph
                .states_bfs()
                .iter()
                .map(|s| s.legal_moves().len())
                .sum();
            println!("n={n} nodes {} edges {edges}", graph.len());
            if let Some(path) = out {
                write(&path, text)?;
            }
        }
        Command::Play {
            n,
            policy,
            seed,
            out,
        } => {
            let policy = Policy::from_name(&policy, seed).map_err(anyhow::Error::msg)?;
            let record = play_game(n, policy)?;
            println!(
                "n={n} policy {} length {} winner {}",
                record.policy, record.length, record.winner
            );
            if let Some(path) = out {
                if is_json(&path) {
                    write_json(&path, &record)?;
                } else {
                    let mut buf = Vec::new();
                    write_records_csv(std::slice::from_ref(&record), &mut buf)?;
                    write(&path, buf)?;
                }
            }
        }
        Command::Serve {
            addr,
            snapshot,
            limit,
            export_limit,
        } => {
            if export_limit > limit {
                bail!("--export-limit ({export_limit}) cannot exceed --limit ({limit})");
            }
            tracing_subscriber::fmt().with_target(false).init();
            let config = ServiceConfig {
                addr,
                snapshot,
                solver: SolverConfig {
                    solve_limit: limit,
                    export_limit,
                    parallel: true,
                },
                ..ServiceConfig::default()
            };
            tokio::runtime::Runtime::new()?.block_on(zeckgame_service::serve(config))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
