mod commands;
mod config;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use ordgeo::search::InstantiationPool;

use commands::{Expect, Mode, ProveRequest};
use config::ConfigFile;
use report::{Format, RunReport, EXIT_PARSE};

#[derive(Parser)]
#[command(name = "ordgeo", version, about = "Proof checking, proof search and finite models for ordered affine geometry")]
struct Cli {
    /// Output layout. `records` prints one JSON object per line.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// TOML file with `[signature]` and `[search]` sections. Flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for `check`, `corpus` and `models`.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Accept and expand CON, DIR, OPP and INOPP.
    #[arg(long, global = true)]
    expand_defs: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check proof scripts.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Keep checking after the first failing file.
        #[arg(long)]
        keep_going: bool,
    },
    /// Search for a proof.
    Prove {
        /// Premise names or formulas, comma separated.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        from: Vec<String>,
        #[arg(long)]
        goal: String,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        max_term_depth: Option<usize>,
        #[arg(long)]
        max_lines: Option<usize>,
        #[arg(long, value_enum)]
        pool: Option<PoolArg>,
        /// Prove suggested lemmas first (default when one applies).
        #[arg(long, conflicts_with = "direct")]
        staged: bool,
        /// Never stage.
        #[arg(long)]
        direct: bool,
        /// Write the proof script here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for the smallest countermodel.
    Models {
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        from: Vec<String>,
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// Fail (exit 4) if a countermodel exists.
        #[arg(long, conflicts_with = "expect_counter")]
        expect_none: bool,
        /// Fail (exit 4) if none exists.
        #[arg(long)]
        expect_counter: bool,
    },
    /// Check the shipped proof corpus against its declared sequents.
    Corpus {
        /// Read scripts from this directory instead of the built-in copies.
        #[arg(long, env = "ORDGEO_CORPUS_DIR")]
        dir: Option<PathBuf>,
        #[arg(long)]
        keep_going: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PoolArg {
    SubtermsOnly,
    SubtermsPlusRev,
}

fn main() {
    let cli = Cli::parse();
    let code = run(&cli);
    std::io::stdout().flush().ok();
    std::process::exit(code);
}

fn run(cli: &Cli) -> i32 {
    let start = Instant::now();
    let file = match &cli.config {
        Some(path) => match ConfigFile::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e:#}");
                return EXIT_PARSE;
            }
        },
        None => ConfigFile::default(),
    };
    let sig = file.signature(cli.expand_defs);
    let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let verdicts = match &cli.cmd {
        Cmd::Check { paths, keep_going } => commands::check(paths, &sig, cli.expand_defs, jobs, *keep_going),
        Cmd::Prove { from, goal, max_depth, max_term_depth, max_lines, pool, staged, direct, out } => {
            let mut cfg = file.search.clone();
            if let Some(d) = max_depth {
                cfg.max_depth = *d;
            }
            if let Some(d) = max_term_depth {
                cfg.max_term_depth = *d;
            }
            if let Some(n) = max_lines {
                cfg.max_lines = *n;
            }
            if let Some(p) = pool {
                cfg.instantiation_pool = match p {
                    PoolArg::SubtermsOnly => InstantiationPool::SubtermsOnly,
                    PoolArg::SubtermsPlusRev => InstantiationPool::SubtermsPlusRev,
                };
            }
            let mode = match (staged, direct) {
                (true, _) => Mode::Staged,
                (_, true) => Mode::Direct,
                _ => Mode::Auto,
            };
            let req = ProveRequest { from, goal, mode, out: out.as_deref(), cfg };
            vec![commands::prove_cmd(&req, &sig, cli.expand_defs)]
        }
        Cmd::Models { from, goal, max_size, expect_none, expect_counter } => {
            let expect = match (expect_none, expect_counter) {
                (true, _) => Some(Expect::None),
                (_, true) => Some(Expect::Counter),
                _ => None,
            };
            vec![commands::models_cmd(from, goal, *max_size, expect, &sig, cli.expand_defs, jobs)]
        }
        Cmd::Corpus { dir, keep_going } => commands::corpus_cmd(dir.as_deref(), jobs, *keep_going),
    };
    let command = std::env::args().collect::<Vec<_>>().join(" ");
    let report = RunReport::new(command, verdicts, start.elapsed());
    match cli.format {
        // The summary goes to stderr so that `prove` output stays a clean script.
        Format::Text => {
            print!("{}", report.text_body());
            eprintln!("{}", report.summary());
        }
        Format::Records => print!("{}", report.records()),
    }
    report.exit_code
}
