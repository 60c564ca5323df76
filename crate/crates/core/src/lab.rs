//! Experiment harness: the `moea-lab` command line, sweep specifications,
//! and CSV output.
//!
//! ```text
//! moea-lab run --problem 3omm --n 40 --algo nsga3 --pop-size 441 --divisions 186 --iterations 2000 --seeds 3
//! moea-lab sweep crossover.spec --out results/ --jobs 8
//! moea-lab verify --n 8 --p 168
//! moea-lab verify-min-p --n 12 --p-max 300
//! ```
//!
//! Exit codes: 0 on success, 1 on runtime or I/O failure, 2 on usage or
//! configuration errors.

pub mod output;
pub mod spec;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{minimal_p_search, verify_unique_association};
use crate::engine::{Algorithm, RunConfig, StopPolicy};
use crate::error::{Error, Result};
use crate::problems::{Benchmark, Problem};

pub use output::{execute, merged_csv, summary_csv, write_atomic, RunResult};
pub use spec::{Divisions, ExperimentSpec, MutationProb, PlannedRun, PopSize, SweepSpec};

pub const SEED_ENV: &str = "MOEA_LAB_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "moea-lab",
    version,
    about = "NSGA-II / NSGA-III experiments on OneMinMax and 3-OMM"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one configuration over several seeds and write per-iteration CSV rows.
    Run(RunArgs),
    /// Run every configuration of a sweep spec file.
    Sweep(SweepArgs),
    /// Check unique reference-point association for given (n, p).
    Verify(VerifyArgs),
    /// Find the least collision-free number of divisions.
    VerifyMinP(MinPArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long, default_value = "3omm")]
    pub problem: Benchmark,
    #[arg(long)]
    pub n: usize,
    /// Defaults to the Pareto front size.
    #[arg(long)]
    pub pop_size: Option<usize>,
    #[arg(long, default_value = "nsga3")]
    pub algo: Algorithm,
    /// Reference point divisions (nsga3 only); defaults to 21n.
    #[arg(long)]
    pub divisions: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
    /// Number of independent runs.
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    /// Master seed.
    #[arg(long, env = SEED_ENV)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0.0)]
    pub crossover_rate: f64,
    /// Defaults to 1/n.
    #[arg(long)]
    pub mutation_prob: Option<f64>,
    #[arg(long, default_value = "iters")]
    pub stop: StopPolicy,
    /// Worker threads; all cores by default.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Spec file (`key = value` lines or JSON).
    pub spec: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Master seed, overriding the spec file.
    #[arg(long, env = SEED_ENV)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Problem sizes (even); repeat for several.
    #[arg(long, required = true, num_args = 1..)]
    pub n: Vec<usize>,
    /// Divisions; repeat for several. Defaults to 21n.
    #[arg(long, num_args = 1..)]
    pub p: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MinPArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub p_min: usize,
    /// Upper end of the scan; defaults to 21n.
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exit code for an error raised after argument parsing.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::InvalidParameter(_) => 2,
        Error::Io(_) | Error::InvalidInput(_) | Error::DegeneratePopulation { .. } => 1,
    }
}

/// Entry point of the binary.
pub fn main() -> i32 {
    run_cli(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr(),
    )
}

/// Parses `args` (including the program name) and executes the command.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Run(a) => cmd_run(a, stdout),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::VerifyMinP(a) => cmd_min_p(a, stdout),
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            write_atomic(path, text.as_bytes())
        }
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

/// The configuration described by `run` flags.
pub fn run_config(a: &RunArgs) -> Result<RunConfig> {
    let mut c = RunConfig::new(a.problem, a.n, a.algo);
    if let Some(pop) = a.pop_size {
        c.pop_size = pop;
    }
    c.divisions = a.divisions;
    c.max_iterations = a.iterations;
    c.seed = a.seed.unwrap_or(0);
    c.crossover_rate = a.crossover_rate;
    c.mutation_prob = a.mutation_prob;
    c.stop = a.stop;
    c.validate()?;
    Ok(c)
}

fn cmd_run(a: RunArgs, stdout: &mut dyn Write) -> Result<()> {
    let plan = ExperimentSpec::repeat(run_config(&a)?, a.seeds)?;
    let results = execute(&plan, a.jobs, None)?;
    emit(a.out.as_deref(), &merged_csv(&results), stdout)
}

/// Runs a sweep into `out`: `runs/run-NNNNN.csv` per run, `runs.csv` with
/// all rows, and `summary.csv`.
pub fn sweep_to_dir(spec: &SweepSpec, out: &Path, jobs: Option<usize>) -> Result<Vec<RunResult>> {
    let plan = spec.expand()?;
    let results = execute(&plan, jobs, Some(&out.join("runs")))?;
    write_atomic(&out.join("runs.csv"), merged_csv(&results).as_bytes())?;
    write_atomic(&out.join("summary.csv"), summary_csv(&results).as_bytes())?;
    Ok(results)
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let text = fs::read_to_string(&a.spec)?;
    let mut spec = SweepSpec::parse(&text)?;
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    sweep_to_dir(&spec, &a.out, a.jobs).map(|_| ())
}

fn check_even(n: usize) -> Result<()> {
    Problem::three_omm(n)
        .map(|_| ())
        .map_err(|e| Error::Config(e.to_string()))
}

fn cmd_verify(a: VerifyArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut text = format!("{}\n", output::VERIFY_HEADER);
    for &n in &a.n {
        check_even(n)?;
        let ps = if a.p.is_empty() {
            vec![21 * n]
        } else {
            a.p.clone()
        };
        for p in ps {
            if p == 0 {
                return Err(Error::Config("p must be at least 1".into()));
            }
            let r = verify_unique_association(n, p)?;
            text.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n, r.p, r.min_pairwise_angle, r.max_assoc_angle, r.separated, r.collisions
            ));
        }
    }
    emit(a.out.as_deref(), &text, stdout)
}

fn cmd_min_p(a: MinPArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut text = format!("{}\n", output::MIN_P_HEADER);
    for &n in &a.n {
        check_even(n)?;
        let hi = a.p_max.unwrap_or(21 * n);
        if a.p_min == 0 || a.p_min > hi {
            return Err(Error::Config(format!(
                "empty range of divisions {}..={hi}",
                a.p_min
            )));
        }
        let m = minimal_p_search(n, a.p_min..=hi)?;
        match m.report {
            Some(r) => text.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                n,
                r.p,
                m.lower_bound,
                r.min_pairwise_angle,
                r.max_assoc_angle,
                r.separated,
                r.collisions
            )),
            None => text.push_str(&format!("{n},,{},,,,\n", m.lower_bound)),
        }
    }
    emit(a.out.as_deref(), &text, stdout)
}
