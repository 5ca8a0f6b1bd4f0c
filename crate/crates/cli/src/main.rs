mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunFile;
use crate::error::CliError;

/// Evolve and analyze spiking neural network landing controllers.
#[derive(Debug, Parser)]
#[command(name = "neurolander", version)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML file with run settings; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Master seed for every random stream of the run.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(0..=i64::MAX as u64))]
    seed: Option<u64>,

    /// Output directory [default: out].
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for parallel evaluation [default: hardware threads].
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve a population and write its Pareto archive.
    Evolve(EvolveArgs),
    /// Robustness statistics over many randomized landings.
    Evaluate(EvaluateArgs),
    /// Steady-state, transient and neuron activity responses.
    Analyze(AnalyzeArgs),
    /// Evolved networks and proportional baselines on matched landings.
    Compare(CompareArgs),
    /// Combine archives and keep the non-dominated members.
    Merge(MergeArgs),
}

#[derive(Debug, Args)]
struct EvolveArgs {
    /// Population size.
    #[arg(long)]
    pop: Option<usize>,

    /// Number of generations after the initial one.
    #[arg(long)]
    gens: Option<u32>,

    /// Hidden neurons (0 connects the inputs straight to the output).
    #[arg(long)]
    hidden: Option<usize>,

    /// Restrict neuron and decoder parameter mutations.
    #[arg(long)]
    constrained: bool,

    /// Select on time, height and speed only; the spike rate is still reported.
    #[arg(long)]
    no_spike_objective: bool,
}

#[derive(Debug, Args)]
struct Sources {
    /// Genome file to process; may be repeated.
    #[arg(long = "genome", value_name = "FILE")]
    genomes: Vec<PathBuf>,

    /// Archive directory whose members are all processed.
    #[arg(long, value_name = "DIR")]
    archive: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    sources: Sources,

    /// Landings per controller [default: 250].
    #[arg(long)]
    landings: Option<usize>,

    /// Initial height in meters [default: 4].
    #[arg(long)]
    h0: Option<f64>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    sources: Sources,

    /// Landings for the transient response and activity rates [default: 100].
    #[arg(long)]
    landings: Option<usize>,

    /// Initial height in meters [default: 4].
    #[arg(long)]
    h0: Option<f64>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    sources: Sources,

    /// Proportional baselines to include [default: p-slow and p-fast].
    #[arg(long = "baseline", value_enum)]
    baselines: Vec<Baseline>,

    /// Landings per controller [default: 250].
    #[arg(long)]
    landings: Option<usize>,

    /// Initial height in meters [default: 4].
    #[arg(long)]
    h0: Option<f64>,

    /// Land in a noise-free environment instead of randomized ones.
    #[arg(long)]
    noise_free: bool,
}

#[derive(Debug, Args)]
struct MergeArgs {
    /// Archive directories, or run directories containing `archive/`.
    #[arg(required = true, value_name = "DIR")]
    archives: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Baseline {
    PSlow,
    PFast,
}

fn flag(set: bool) -> Option<bool> {
    set.then_some(true)
}

fn settings(common: &Common, command: &Command) -> Result<RunFile, CliError> {
    let mut flags = RunFile { seed: common.seed, out: common.out.clone(), jobs: common.jobs, ..RunFile::default() };
    match command {
        Command::Evolve(a) => {
            flags.population = a.pop;
            flags.generations = a.gens;
            flags.n_hidden = a.hidden;
            flags.constrained = flag(a.constrained);
            flags.spike_objective = a.no_spike_objective.then_some(false);
        }
        Command::Evaluate(a) => {
            flags.landings = a.landings;
            flags.h0 = a.h0;
        }
        Command::Analyze(a) => {
            flags.landings = a.landings;
            flags.h0 = a.h0;
        }
        Command::Compare(a) => {
            flags.landings = a.landings;
            flags.h0 = a.h0;
            flags.noise_free = flag(a.noise_free);
        }
        Command::Merge(_) => {}
    }
    let file = match &common.config {
        Some(path) => RunFile::load(path)?,
        None => RunFile::default(),
    };
    Ok(flags.or(file))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = settings(&cli.common, &cli.command)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = settings.jobs {
        if jobs == 0 {
            return Err(CliError::Config("jobs must be positive".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("cannot start worker threads: {e}")))?;

    pool.install(|| match &cli.command {
        Command::Evolve(_) => commands::evolve(&settings),
        Command::Evaluate(a) => commands::evaluate(&settings, &a.sources.genomes, a.sources.archive.as_deref()),
        Command::Analyze(a) => commands::analyze(&settings, &a.sources.genomes, a.sources.archive.as_deref()),
        Command::Compare(a) => {
            commands::compare(&settings, &a.sources.genomes, a.sources.archive.as_deref(), &a.baselines)
        }
        Command::Merge(a) => commands::merge(&settings, &a.archives),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
