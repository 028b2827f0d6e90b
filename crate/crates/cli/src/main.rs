use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wdnopt::ga::{DEFAULT_NODAL_PENALTY_FACTOR, DEFAULT_PIPE_PENALTY_FACTOR};
use wdnopt::oracle::DEFAULT_MAX_COMBINATIONS;
use wdnopt::report::{write_convergence_csv, ConstraintReport, DesignReport};
use wdnopt::{brute_force, Dataset, Error, GaConfig, GeneticAlgorithm, Problem, SearchMode};

const EXIT_INPUT: u8 = 1;
const EXIT_INFEASIBLE_DESIGN: u8 = 2;
const EXIT_INFEASIBLE_BEST: u8 = 3;
const EXIT_REFUSED: u8 = 4;

/// Least-cost pipe sizing for tree-shaped water distribution networks.
#[derive(Debug, Parser)]
#[command(name = "wdnopt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check one design against the head and gradient constraints.
    Simulate(SimulateArgs),
    /// Search for a least-cost design with the genetic algorithm.
    Optimize(OptimizeArgs),
    /// Enumerate the design space for the exact optimum.
    Bruteforce(BruteforceArgs),
}

#[derive(Debug, Args)]
struct PenaltyArgs {
    /// Nodal penalty factor, currency per metre of head deficit.
    #[arg(long, default_value_t = DEFAULT_NODAL_PENALTY_FACTOR)]
    npf: f64,
    /// Pipe penalty factor, currency per m/m of gradient excess.
    #[arg(long, default_value_t = DEFAULT_PIPE_PENALTY_FACTOR)]
    ppf: f64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Network dataset (JSON).
    #[arg(long)]
    network: PathBuf,
    /// Comma-separated diameters in mm, one per pipe in dataset order.
    #[arg(long, value_delimiter = ',', required = true)]
    diameters: Vec<f64>,
    #[command(flatten)]
    penalties: PenaltyArgs,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    /// Network dataset (JSON).
    #[arg(long)]
    network: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Population size (even, at least 2).
    #[arg(long, default_value_t = 20)]
    pop: usize,
    /// Crossover probability.
    #[arg(long, default_value_t = 0.8)]
    pc: f64,
    /// Per-gene mutation probability.
    #[arg(long, default_value_t = 0.05)]
    pm: f64,
    #[arg(long, default_value_t = 5000)]
    generations: usize,
    #[command(flatten)]
    penalties: PenaltyArgs,
    /// Write the design report (JSON) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the per-generation convergence log (CSV) here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Evaluate each generation on all cores. Results are identical.
    #[arg(long)]
    parallel: bool,
}

#[derive(Debug, Args)]
struct BruteforceArgs {
    /// Network dataset (JSON).
    #[arg(long)]
    network: PathBuf,
    /// Refuse spaces with more designs than this.
    #[arg(long, default_value_t = DEFAULT_MAX_COMBINATIONS)]
    max_combinations: u64,
    /// Enumerate regardless of size.
    #[arg(long)]
    force_full: bool,
    /// Visit every design instead of pruning by cost and feasibility.
    #[arg(long)]
    exhaustive: bool,
    /// Also state whether this cost equals the optimum.
    #[arg(long)]
    reference_cost: Option<f64>,
    /// Write the design report (JSON) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failed command: message for stderr plus exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Optimize(args) => optimize(args),
        Command::Bruteforce(args) => bruteforce(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load(path: &Path) -> Result<Problem, Failure> {
    let dataset = Dataset::load(path).map_err(|e| Failure::input(format!("{}:{e}", path.display())))?;
    Problem::from_dataset(dataset).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn input_error(e: Error) -> Failure {
    Failure::input(e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn simulate(args: SimulateArgs) -> Outcome {
    let problem = load(&args.network)?;
    let design = problem.design_from_diameters(&args.diameters).map_err(input_error)?;
    let report = ConstraintReport::build(&problem, &design, args.penalties.npf, args.penalties.ppf)
        .map_err(input_error)?;
    print!("{}", report.render());
    Ok(if report.feasible { 0 } else { EXIT_INFEASIBLE_DESIGN })
}

fn optimize(args: OptimizeArgs) -> Outcome {
    let problem = load(&args.network)?;
    let config = GaConfig {
        population_size: args.pop,
        crossover_probability: args.pc,
        mutation_probability: args.pm,
        max_generations: args.generations,
        seed: args.seed,
        nodal_penalty_factor: args.penalties.npf,
        pipe_penalty_factor: args.penalties.ppf,
    };
    config.validate().map_err(input_error)?;
    println!(
        "config: --seed {} --pop {} --pc {} --pm {} --generations {} --npf {} --ppf {}",
        config.seed,
        config.population_size,
        config.crossover_probability,
        config.mutation_probability,
        config.max_generations,
        config.nodal_penalty_factor,
        config.pipe_penalty_factor
    );

    let run = GeneticAlgorithm::new(&problem, config)
        .parallel(args.parallel)
        .run()
        .map_err(input_error)?;
    let report = DesignReport::from_run(&problem, &run);
    print!("{}", report.render());
    if !run.best.feasible {
        match &run.best_feasible {
            Some(b) => println!("Cheapest feasible design seen\t{}", b.cost),
            None => println!("No feasible design seen"),
        }
    }
    println!("elapsed: {:.3} s", run.elapsed.as_secs_f64());

    if let Some(path) = &args.out {
        write_file(path, &report.to_json())?;
    }
    if let Some(path) = &args.csv {
        let file = File::create(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        write_convergence_csv(&run.history, BufWriter::new(file)).map_err(input_error)?;
    }
    Ok(if run.best.feasible { 0 } else { EXIT_INFEASIBLE_BEST })
}

fn bruteforce(args: BruteforceArgs) -> Outcome {
    let problem = load(&args.network)?;
    let limit = if args.force_full { u64::MAX } else { args.max_combinations };
    let mode = if args.exhaustive { SearchMode::Exhaustive } else { SearchMode::Pruned };
    let result = match brute_force(&problem, limit, mode) {
        Ok(result) => result,
        Err(e @ Error::SearchSpaceTooLarge { .. }) => {
            return Err(Failure {
                code: EXIT_REFUSED,
                message: format!("{e}; pass --force-full or raise --max-combinations"),
            })
        }
        Err(e) => return Err(input_error(e)),
    };
    let report = DesignReport::from_enumeration(&problem, &result);
    println!(
        "designs: {} in space, {} complete designs evaluated, {} feasible",
        result.space_size, result.n_enumerated, result.n_feasible
    );
    match result.best_cost {
        Some(_) => print!("{}", report.render()),
        None => println!("no feasible design exists"),
    }
    if let Some(reference) = args.reference_cost {
        match result.best_cost {
            Some(best) if best == reference => println!("{reference} is the global optimum"),
            Some(best) if best < reference => {
                println!("{reference} is not optimal: {best} is cheaper")
            }
            Some(best) => println!("{reference} is below the feasible optimum {best}"),
            None => println!("{reference} cannot be feasible: no feasible design exists"),
        }
    }
    if let Some(path) = &args.out {
        write_file(path, &report.to_json())?;
    }
    Ok(0)
}
