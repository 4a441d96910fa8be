use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use monolab::error::Result;
use monolab::harness::selftest::selftest;
use monolab::harness::streams::{default_workers, WORKERS_ENV};
use monolab::harness::{
    parse_count, parse_list, run, Experiment, ExperimentConfig, Family, GridCheck,
};
use monolab::testers::TesterKind;

#[derive(Parser, Debug)]
#[command(name = "monolab", version, about = "Monotonicity testing laboratory")]
struct Cli {
    /// Worker threads; defaults to the MONOLAB_WORKERS variable, else all cores.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,

    /// Write the result table here as CSV (scaling and lowerbound).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,

    /// Omit the wall-clock field so repeated runs print identical JSON.
    #[arg(long, global = true)]
    stable: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact distance to monotonicity, v and sigma of a function file.
    Oracle {
        input: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Run one tester on a function file.
    Test {
        input: PathBuf,
        #[arg(long, default_value = "weighted")]
        tester: TesterKind,
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        #[arg(long, default_value = "1e5", value_parser = parse_count)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Rejection rate across dimensions, with a log-log slope.
    Scaling {
        #[arg(long, default_value = "anti-dictator")]
        family: Family,
        #[arg(long, value_parser = parse_list)]
        n: std::vec::Vec<usize>,
        #[arg(long, default_value = "weighted")]
        tester: TesterKind,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value = "2e6", value_parser = parse_count)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Total variation between yes and no response vectors, plus the
    /// niceness and Fourier certification of no-draws.
    Lowerbound {
        #[arg(long, default_value_t = 4)]
        q: usize,
        #[arg(long = "n-list", value_parser = parse_list, default_value = "100,400,1600")]
        n_list: std::vec::Vec<usize>,
        #[arg(long, default_value = "1e5", value_parser = parse_count)]
        samples: u64,
        #[arg(long)]
        balanced: bool,
        #[arg(long, default_value_t = 100)]
        draws: u64,
        #[arg(long, default_value = "131072", value_parser = parse_count)]
        certify_samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lift a cube function to [m]^n and check it.
    Hypergrid {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "distance")]
        check: GridCheck,
    },
    /// Fast invariant sweep; exits nonzero on any failure.
    Selftest,
}

fn experiment(command: Command) -> Option<Experiment> {
    Some(match command {
        Command::Oracle { input, eps } => Experiment::Oracle { input, eps },
        Command::Test {
            input,
            tester,
            eps,
            trials,
            seed,
        } => Experiment::Test {
            input,
            tester,
            eps,
            trials,
            seed,
        },
        Command::Scaling {
            family,
            n,
            tester,
            eps,
            trials,
            seed,
        } => Experiment::Scaling {
            family,
            ns: n,
            tester,
            eps,
            trials,
            seed,
        },
        Command::Lowerbound {
            q,
            n_list,
            samples,
            balanced,
            draws,
            certify_samples,
            seed,
        } => Experiment::LowerBound {
            q,
            ns: n_list,
            samples,
            balanced,
            draws,
            certify_samples,
            seed,
        },
        Command::Hypergrid { m, input, check } => Experiment::Hypergrid { m, input, check },
        Command::Selftest => return None,
    })
}

fn main_inner(cli: Cli) -> Result<bool> {
    let workers = cli.workers.unwrap_or_else(default_workers).max(1);
    let Some(exp) = experiment(cli.command) else {
        let report = selftest(workers);
        for c in &report.checks {
            eprintln!(
                "[{}] {}: {}",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(report.passed());
    };
    let record = run(&ExperimentConfig::new(exp, workers))?;
    if let (Some(path), Some(table)) = (&cli.csv, &record.table) {
        std::fs::write(path, table.to_csv()?)?;
    } else if let Some(table) = &record.table {
        eprint!("{}", table.to_csv()?);
    }
    println!("{}", record.to_json(cli.stable)?);
    Ok(true)
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
