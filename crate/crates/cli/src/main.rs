mod commands;
mod oracle;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Failure;

#[derive(Parser)]
#[command(name = "pexpl", version, about = "Monolithic and model-reconciling explanations for CNF and weighted CNF")]
struct Cli {
    /// Emit one JSON object on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Degree of belief of a query, optionally conditioned.
    Prob(ProbArgs),
    /// Compute an explanation.
    #[command(subcommand)]
    Explain(Explain),
    /// Most probable worlds satisfying a query.
    Topk(TopkArgs),
    /// Write generated instances.
    #[command(subcommand)]
    Gen(Gen),
    /// Run an algorithm over a suite directory.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ProbArgs {
    #[arg(long)]
    wcnf: PathBuf,
    #[arg(long)]
    query: PathBuf,
    #[arg(long)]
    given: Option<PathBuf>,
    /// Also compute by plain world enumeration and compare.
    #[arg(long)]
    oracle: bool,
}

#[derive(Subcommand)]
enum Explain {
    /// Smallest subset of a CNF entailing the query.
    Mono {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        query: PathBuf,
    },
    /// Additions and retractions that make the human base entail the query.
    Mrp {
        #[arg(long)]
        agent: PathBuf,
        #[arg(long)]
        human: PathBuf,
        #[arg(long)]
        query: PathBuf,
    },
    /// Explanation drawn from the most probable query worlds.
    Pmono {
        #[arg(long)]
        wcnf: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = pexpl_core::explanation::DEFAULT_GAMMA)]
        gamma: f64,
    },
    /// Reconciling explanation against a weighted human base.
    Pmrp {
        #[arg(long)]
        agent: PathBuf,
        #[arg(long)]
        human: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = pexpl_core::explanation::DEFAULT_GAMMA)]
        gamma: f64,
    },
    /// Highest-power minimal explanation.
    Preferred {
        #[arg(long)]
        wcnf: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, default_value_t = pexpl_core::explanation::DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = pexpl_core::explanation::DEFAULT_GAMMA)]
        gamma: f64,
    },
}

#[derive(Args)]
struct TopkArgs {
    #[arg(long)]
    wcnf: PathBuf,
    #[arg(long)]
    query: PathBuf,
    #[arg(long)]
    k: usize,
    /// Also rank by plain world enumeration and compare.
    #[arg(long)]
    oracle: bool,
}

#[derive(Subcommand)]
enum Gen {
    /// Random fixed-width CNF, optionally weighted, optionally with a
    /// backbone query.
    Random {
        #[arg(long)]
        vars: u32,
        #[arg(long)]
        clauses: usize,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        seed: u64,
        /// Output path without extension; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a WCNF with weights drawn from this range.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        weights: Option<Vec<f64>>,
        /// Also write a query of up to this many backbone literals.
        #[arg(long)]
        query_literals: Option<usize>,
    },
    /// Human model derived from a CNF.
    Scenario {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        level: u32,
        #[arg(long)]
        seed: u64,
        /// Output file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The office delivery robot.
    Robot {
        #[arg(long, default_value_t = 2)]
        horizon: usize,
        #[arg(long, num_args = 6, value_names = ["W1", "W2", "W3", "W4", "W5", "W6"])]
        weights: Option<Vec<f64>>,
        /// Output file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    suite: PathBuf,
    /// alg1 | alg2 | alg3 | alg4.
    #[arg(long)]
    alg: String,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = pexpl_core::explanation::DEFAULT_GAMMA)]
    gamma: f64,
    /// Seconds per instance.
    #[arg(long, default_value_t = 500.0)]
    timeout: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = commands::name(&cli.command);
    let result = commands::run(cli.command);
    match result {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            if cli.json {
                println!("{}", output::json_ok(&name, &out));
            } else {
                print!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            if cli.json {
                println!("{}", output::json_err(&name, code, &message));
            }
            ExitCode::from(code)
        }
    }
}
