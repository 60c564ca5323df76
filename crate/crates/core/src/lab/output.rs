//! Parallel execution of planned runs and CSV emission.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

use crate::analysis::{FrontIndex, RunRecord};
use crate::engine::{run_engine, Engine, RunConfig};
use crate::error::{Error, Result};
use crate::lab::spec::{ExperimentSpec, PlannedRun};
use crate::problems::{Benchmark, Problem};
use crate::refpoints::ReferencePointSet;

pub const RUN_HEADER: &str =
    "run_id,algo,n,N,p,chi,seed,iteration,covered,front_size,losses_cum,new_covered";
pub const SUMMARY_HEADER: &str =
    "group,problem,algo,n,N,p,chi,mutation_prob,runs,covered_runs,mean_iterations,median_iterations,max_iterations,losses_total";
pub const VERIFY_HEADER: &str = "n,p,min_pairwise_angle,max_assoc_angle,separated,collisions";
pub const MIN_P_HEADER: &str =
    "n,p_min,lower_bound,min_pairwise_angle,max_assoc_angle,separated,collisions";

/// Result of one finished run, with its CSV rows already rendered.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub run: PlannedRun,
    pub rows: String,
    pub first_full_coverage: Option<usize>,
    pub losses: usize,
    pub final_covered: usize,
    pub front_size: usize,
}

fn optional<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One CSV line (with trailing newline) for a record of `config`.
pub fn run_row(config: &RunConfig, r: &RunRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}\n",
        r.run_id,
        config.algorithm,
        config.n,
        config.pop_size,
        optional(config.effective_divisions()),
        config.crossover_rate,
        config.seed,
        r.iteration,
        r.covered,
        r.front_size,
        r.losses_cum,
        r.new_covered
    )
}

/// Writes `bytes` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

struct Shared {
    lattices: HashMap<(usize, usize), Arc<ReferencePointSet>>,
    fronts: HashMap<(Benchmark, usize), Arc<FrontIndex>>,
}

impl Shared {
    fn for_plan(plan: &ExperimentSpec) -> Result<Self> {
        let mut shared = Shared {
            lattices: HashMap::new(),
            fronts: HashMap::new(),
        };
        for run in &plan.runs {
            let c = &run.config;
            let problem = c.validate()?;
            let m = problem.num_objectives();
            if let Some(p) = c.effective_divisions() {
                if let Entry::Vacant(slot) = shared.lattices.entry((m, p)) {
                    slot.insert(Arc::new(ReferencePointSet::new(m, p)?));
                }
            }
            shared
                .fronts
                .entry((c.problem, c.n))
                .or_insert_with(|| Arc::new(FrontIndex::for_problem(&problem)));
        }
        Ok(shared)
    }

    fn engine(&self, config: &RunConfig) -> Result<Engine> {
        let m = Problem::new(config.problem, config.n)?.num_objectives();
        let refs = config
            .effective_divisions()
            .map(|p| self.lattices[&(m, p)].clone());
        Engine::with_shared(
            config.clone(),
            refs,
            self.fronts[&(config.problem, config.n)].clone(),
        )
    }
}

fn execute_one(run: &PlannedRun, shared: &Shared, run_dir: Option<&Path>) -> Result<RunResult> {
    let mut rows = String::new();
    let outcome = run_engine(shared.engine(&run.config)?, |r| {
        rows.push_str(&run_row(&run.config, r))
    })?;
    if let Some(dir) = run_dir {
        let path = dir.join(format!("run-{:05}.csv", run.config.run_index));
        write_atomic(&path, format!("{RUN_HEADER}\n{rows}").as_bytes())?;
    }
    let last = outcome.final_record();
    Ok(RunResult {
        run: run.clone(),
        first_full_coverage: outcome.first_full_coverage,
        losses: last.losses_cum,
        final_covered: last.covered,
        front_size: last.front_size,
        rows,
    })
}

/// Runs every planned run on a pool of `jobs` threads (all cores when
/// `None`), optionally writing one CSV per run into `run_dir`. Results come
/// back in plan order whatever the scheduling.
pub fn execute(
    plan: &ExperimentSpec,
    jobs: Option<usize>,
    run_dir: Option<&Path>,
) -> Result<Vec<RunResult>> {
    if plan.is_empty() {
        return Err(Error::Config("nothing to run".into()));
    }
    let shared = Shared::for_plan(plan)?;
    if let Some(dir) = run_dir {
        fs::create_dir_all(dir)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| {
        plan.runs
            .par_iter()
            .map(|run| execute_one(run, &shared, run_dir))
            .collect()
    })
}

/// Header plus every run's rows in plan order.
pub fn merged_csv(results: &[RunResult]) -> String {
    let mut out = String::with_capacity(results.iter().map(|r| r.rows.len()).sum::<usize>() + 100);
    out.push_str(RUN_HEADER);
    out.push('\n');
    for r in results {
        out.push_str(&r.rows);
    }
    out
}

/// Mean, median and maximum of a non-empty list.
pub fn iteration_stats(values: &[usize]) -> Option<(f64, f64, usize)> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    let mean = v.iter().sum::<usize>() as f64 / v.len() as f64;
    let mid = v.len() / 2;
    let median = if v.len() % 2 == 1 {
        v[mid] as f64
    } else {
        (v[mid - 1] + v[mid]) as f64 / 2.0
    };
    Some((mean, median, v[v.len() - 1]))
}

/// One row per configuration: iterations to full coverage over the runs
/// that reached it.
pub fn summary_csv(results: &[RunResult]) -> String {
    let mut groups: BTreeMap<usize, Vec<&RunResult>> = BTreeMap::new();
    for r in results {
        groups.entry(r.run.group).or_default().push(r);
    }
    let mut out = format!("{SUMMARY_HEADER}\n");
    for (group, runs) in groups {
        let c = &runs[0].run.config;
        let hits: Vec<usize> = runs.iter().filter_map(|r| r.first_full_coverage).collect();
        let (mean, median, max) = match iteration_stats(&hits) {
            Some((a, b, c)) => (a.to_string(), b.to_string(), c.to_string()),
            None => Default::default(),
        };
        let _ = writeln!(
            out,
            "{group},{},{},{},{},{},{},{},{},{},{mean},{median},{max},{}",
            c.problem,
            c.algorithm,
            c.n,
            c.pop_size,
            optional(c.effective_divisions()),
            c.crossover_rate,
            c.effective_mutation_prob(),
            runs.len(),
            hits.len(),
            runs.iter().map(|r| r.losses).sum::<usize>()
        );
    }
    out
}
