use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracdg::cli::{self, RunOptions};

/// DG time stepping for fractional subdiffusion.
#[derive(Parser, Debug)]
#[command(name = "fracdg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads (default: FRACDG_THREADS, then all cores).
    #[arg(long, global = true, env = "FRACDG_THREADS")]
    threads: Option<usize>,

    /// Seed for randomized suites; overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Zero timings and omit timestamps so outputs are reproducible.
    #[arg(long, global = true)]
    deterministic: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve once and write traces, jumps and the error.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Graded-mesh convergence study.
    HStudy {
        #[arg(long)]
        config: PathBuf,
    },
    /// Geometric-mesh convergence study.
    HpStudy {
        #[arg(long)]
        config: PathBuf,
    },
    /// Error against the geometric ratio at a fixed dof count.
    DeltaSweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the built-in suite twice and compare the outputs byte for byte.
    Selftest {
        /// Randomized stability runs per pass.
        #[arg(long, default_value_t = 200)]
        stability_runs: usize,
    },
}

fn run(cli: Cli) -> fracdg::Result<cli::CommandOutcome> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(fracdg::Error::Config {
                key: "--threads".into(),
                message: "must be at least 1".into(),
            });
        }
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let opts = RunOptions {
        out: cli.out.clone(),
        deterministic: cli.deterministic,
    };
    let load = |path: &PathBuf| -> fracdg::Result<cli::RunConfig> {
        let mut config = cli::load_config(path)?;
        if let Some(seed) = cli.seed {
            config.seed = seed;
        }
        Ok(config)
    };
    match &cli.command {
        Command::Solve { config } => cli::cmd_solve(&load(config)?, &opts),
        Command::HStudy { config } => cli::cmd_h_study(&load(config)?, &opts),
        Command::HpStudy { config } => cli::cmd_hp_study(&load(config)?, &opts),
        Command::DeltaSweep { config } => cli::cmd_delta_sweep(&load(config)?, &opts),
        Command::Selftest { stability_runs } => cli::cmd_selftest(&cli.out, cli.seed.unwrap_or(0), *stability_runs),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { cli::EXIT_CONFIG } else { cli::EXIT_OK };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            for f in &outcome.numerical_failures {
                eprintln!("numerical failure: {f}");
            }
            for g in &outcome.gate_failures {
                eprintln!("gate failed: {g}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
