//! The generation loop shared by NSGA-II and NSGA-III.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::analysis::{coverage, detect_loss, newly_covered, CoverageSet, FrontIndex, RunRecord};
use crate::dominance::fast_nondominated_sort;
use crate::error::{Error, Result};
use crate::genome::{uniform_crossover, Genome, RandomSource};
use crate::normalization::{NormalizationConfig, NormalizationState};
use crate::problems::{Benchmark, ObjectiveVector, Problem, Sense};
use crate::refpoints::ReferencePointSet;
use crate::selection::{associate, crowding_distance_select, niching_select};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Nsga2,
    Nsga3,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Nsga2 => "nsga2",
            Algorithm::Nsga3 => "nsga3",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nsga2" | "nsga-ii" => Ok(Algorithm::Nsga2),
            "nsga3" | "nsga-iii" => Ok(Algorithm::Nsga3),
            other => Err(Error::Config(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// When a run ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StopPolicy {
    /// Exactly `max_iterations` iterations.
    Iterations,
    /// At the first iteration with full front coverage, or `max_iterations`.
    Coverage,
    /// `max_iterations` iterations, keeping the identity of every lost
    /// front value in the outcome.
    Monitor,
}

impl StopPolicy {
    pub fn name(self) -> &'static str {
        match self {
            StopPolicy::Iterations => "iters",
            StopPolicy::Coverage => "coverage",
            StopPolicy::Monitor => "monitor",
        }
    }
}

impl fmt::Display for StopPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StopPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "iters" | "iterations" => Ok(StopPolicy::Iterations),
            "coverage" => Ok(StopPolicy::Coverage),
            "monitor" => Ok(StopPolicy::Monitor),
            other => Err(Error::Config(format!("unknown stop policy '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: Benchmark,
    pub n: usize,
    pub pop_size: usize,
    pub algorithm: Algorithm,
    /// Lattice divisions; NSGA-III only. `None` means `21 * n`.
    pub divisions: Option<usize>,
    pub crossover_rate: f64,
    /// Per-bit swap probability of uniform crossover.
    pub swap_prob: f64,
    /// `None` means `1 / n`.
    pub mutation_prob: Option<f64>,
    pub max_iterations: usize,
    pub stop: StopPolicy,
    /// Master seed; the run draws from stream `run_index` of it.
    pub seed: u64,
    pub run_index: u64,
    pub normalization: NormalizationConfig,
}

impl RunConfig {
    /// Mutation-only configuration whose population size equals the front size.
    pub fn new(problem: Benchmark, n: usize, algorithm: Algorithm) -> Self {
        let pop_size = Problem::new(problem, n)
            .map(|p| p.front_size())
            .unwrap_or(1);
        RunConfig {
            problem,
            n,
            pop_size,
            algorithm,
            divisions: None,
            crossover_rate: 0.0,
            swap_prob: 0.5,
            mutation_prob: None,
            max_iterations: 1000,
            stop: StopPolicy::Iterations,
            seed: 0,
            run_index: 0,
            normalization: NormalizationConfig::default(),
        }
    }

    pub fn effective_mutation_prob(&self) -> f64 {
        self.mutation_prob.unwrap_or(1.0 / self.n.max(1) as f64)
    }

    /// Divisions actually used, `None` for NSGA-II.
    pub fn effective_divisions(&self) -> Option<usize> {
        match self.algorithm {
            Algorithm::Nsga2 => None,
            Algorithm::Nsga3 => Some(self.divisions.unwrap_or(21 * self.n)),
        }
    }

    /// Checks every field and builds the problem instance.
    pub fn validate(&self) -> Result<Problem> {
        let problem =
            Problem::new(self.problem, self.n).map_err(|e| Error::Config(e.to_string()))?;
        if self.pop_size == 0 {
            return Err(Error::Config("population size must be at least 1".into()));
        }
        let unit = |name: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {x}")))
            }
        };
        unit("crossover rate", self.crossover_rate)?;
        unit("swap probability", self.swap_prob)?;
        unit("mutation probability", self.effective_mutation_prob())?;
        match (self.algorithm, self.divisions) {
            (Algorithm::Nsga2, Some(_)) => {
                return Err(Error::Config("divisions only apply to nsga3".into()));
            }
            (Algorithm::Nsga3, Some(0)) => {
                return Err(Error::Config("divisions must be at least 1".into()));
            }
            _ => {}
        }
        let nc = &self.normalization;
        if !(nc.epsilon_nad > 0.0 && nc.asf_weight > 0.0) {
            return Err(Error::Config(
                "normalization constants must be positive".into(),
            ));
        }
        Ok(problem)
    }
}

/// Offspring of one iteration.
#[derive(Clone, Debug)]
pub struct Offspring {
    pub genomes: Vec<Genome>,
    /// Pairs formed; zero when the crossover rate is zero.
    pub pairs: usize,
    /// Pairs that actually underwent crossover.
    pub crossovers: usize,
}

/// One child per parent.
///
/// With a zero crossover rate each parent is mutated. Otherwise the parents
/// are shuffled into pairs, each pair is crossed over with probability
/// `crossover_rate`, and every resulting genome is mutated. With an odd
/// number of parents the leftover is only mutated.
pub fn make_offspring<R: Rng + ?Sized>(
    parents: &[Genome],
    crossover_rate: f64,
    swap_prob: f64,
    mutation_prob: f64,
    rng: &mut R,
) -> Result<Offspring> {
    if !(0.0..=1.0).contains(&crossover_rate) {
        return Err(Error::param(format!(
            "crossover rate {crossover_rate} outside [0, 1]"
        )));
    }
    if crossover_rate == 0.0 {
        let genomes = parents
            .iter()
            .map(|g| g.mutate(mutation_prob, rng))
            .collect::<Result<_>>()?;
        return Ok(Offspring {
            genomes,
            pairs: 0,
            crossovers: 0,
        });
    }

    let mut order: Vec<usize> = (0..parents.len()).collect();
    order.shuffle(rng);
    let mut children = Vec::with_capacity(parents.len());
    let mut crossovers = 0;
    let chunks = order.chunks_exact(2);
    let leftover = chunks.remainder().first().copied();
    let pairs = chunks.len();
    for pair in chunks {
        let (a, b) = (&parents[pair[0]], &parents[pair[1]]);
        if rng.random_bool(crossover_rate) {
            let (c, d) = uniform_crossover(a, b, swap_prob, rng)?;
            children.push(c);
            children.push(d);
            crossovers += 1;
        } else {
            children.push(a.clone());
            children.push(b.clone());
        }
    }
    if let Some(i) = leftover {
        children.push(parents[i].clone());
    }
    let genomes = children
        .iter()
        .map(|g| g.mutate(mutation_prob, rng))
        .collect::<Result<_>>()?;
    Ok(Offspring {
        genomes,
        pairs,
        crossovers,
    })
}

/// What happened inside one iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationStats {
    pub iteration: usize,
    pub pairs: usize,
    pub crossovers: usize,
    /// Sizes of all fronts of parents plus offspring.
    pub front_sizes: Vec<usize>,
    /// 1-based rank of the critical front.
    pub critical_rank: usize,
    /// Individuals taken from fronts before the critical one.
    pub accepted: usize,
    pub critical_size: usize,
    /// Individuals chosen from the critical front.
    pub slots: usize,
    /// NSGA-III fell back to unit spans on collapsed objectives.
    pub degenerate: bool,
}

/// Front values that disappeared from the population at some iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct LossEvent {
    pub iteration: usize,
    pub lost: Vec<ObjectiveVector>,
}

/// A population evolving under one [`RunConfig`].
pub struct Engine {
    config: RunConfig,
    problem: Problem,
    senses: Vec<Sense>,
    refs: Option<Arc<ReferencePointSet>>,
    front: Arc<FrontIndex>,
    rng: RandomSource,
    genomes: Vec<Genome>,
    objectives: Vec<ObjectiveVector>,
    normalization: NormalizationState,
    iteration: usize,
    covered: CoverageSet,
    losses_cum: usize,
}

impl Engine {
    /// Validates the configuration and draws the initial population.
    pub fn new(config: RunConfig) -> Result<Self> {
        Engine::build(config, None, None)
    }

    /// Like [`Engine::new`] but reuses an existing lattice, which must match
    /// the configured divisions and objective count.
    pub fn with_reference_points(config: RunConfig, refs: Arc<ReferencePointSet>) -> Result<Self> {
        Engine::build(config, Some(refs), None)
    }

    /// Reuses both a lattice (NSGA-III only) and a front index.
    pub fn with_shared(
        config: RunConfig,
        refs: Option<Arc<ReferencePointSet>>,
        front: Arc<FrontIndex>,
    ) -> Result<Self> {
        Engine::build(config, refs, Some(front))
    }

    fn build(
        config: RunConfig,
        refs: Option<Arc<ReferencePointSet>>,
        front: Option<Arc<FrontIndex>>,
    ) -> Result<Self> {
        let problem = config.validate()?;
        let m = problem.num_objectives();
        let refs = match config.effective_divisions() {
            None => None,
            Some(p) => match refs {
                Some(r) if r.divisions() == p && r.dim() == m => Some(r),
                Some(r) => {
                    return Err(Error::Config(format!(
                        "lattice has {} divisions in dimension {}, run needs {p} in {m}",
                        r.divisions(),
                        r.dim()
                    )))
                }
                None => Some(Arc::new(
                    ReferencePointSet::new(m, p).map_err(|e| Error::Config(e.to_string()))?,
                )),
            },
        };
        let front = match front {
            Some(f) if f.len() == problem.front_size() => f,
            Some(_) => {
                return Err(Error::Config(
                    "front index does not match the problem".into(),
                ))
            }
            None => Arc::new(FrontIndex::for_problem(&problem)),
        };

        let mut rng = RandomSource::for_run(config.seed, config.run_index);
        let genomes = (0..config.pop_size)
            .map(|_| Genome::random(problem.n(), &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let objectives = genomes
            .iter()
            .map(|g| problem.evaluate(g))
            .collect::<Result<Vec<_>>>()?;
        let covered = coverage(&objectives, &front);
        Ok(Engine {
            normalization: NormalizationState::with_config(m, config.normalization),
            senses: problem.senses(),
            config,
            problem,
            refs,
            front,
            rng,
            genomes,
            objectives,
            iteration: 0,
            covered,
            losses_cum: 0,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn genomes(&self) -> &[Genome] {
        &self.genomes
    }

    pub fn objectives(&self) -> &[ObjectiveVector] {
        &self.objectives
    }

    pub fn normalization(&self) -> &NormalizationState {
        &self.normalization
    }

    pub fn covered(&self) -> &CoverageSet {
        &self.covered
    }

    pub fn front(&self) -> &FrontIndex {
        &self.front
    }

    pub fn losses(&self) -> usize {
        self.losses_cum
    }

    /// Record describing the current population, with no change from before.
    pub fn snapshot(&self) -> RunRecord {
        RunRecord {
            run_id: self.config.run_index,
            iteration: self.iteration,
            covered: self.covered.len(),
            front_size: self.front.len(),
            new_covered: if self.iteration == 0 {
                self.covered.len()
            } else {
                0
            },
            lost: 0,
            losses_cum: self.losses_cum,
            wall_time: Duration::ZERO,
        }
    }

    /// Advances one generation; returns the selection statistics and the
    /// coverage record of the new population, plus the lost front indices.
    pub fn step(&mut self) -> Result<(IterationStats, RunRecord, Vec<usize>)> {
        let started = Instant::now();
        let n_pop = self.config.pop_size;
        let offspring = make_offspring(
            &self.genomes,
            self.config.crossover_rate,
            self.config.swap_prob,
            self.config.effective_mutation_prob(),
            &mut self.rng,
        )?;
        let mut genomes = std::mem::take(&mut self.genomes);
        let mut objectives = std::mem::take(&mut self.objectives);
        for g in offspring.genomes {
            objectives.push(self.problem.evaluate(&g)?);
            genomes.push(g);
        }

        let ranked = fast_nondominated_sort(&objectives, &self.senses)?;
        let split = ranked.split_at_budget(n_pop)?;
        let mut survivors: Vec<usize> = split.accepted.iter().flatten().copied().collect();
        let accepted = survivors.len();
        let mut degenerate = false;

        match self.config.algorithm {
            Algorithm::Nsga3 => {
                let i_star = split.critical_rank;
                let fronts = &ranked.fronts()[..i_star];
                let normalizer = match self.normalization.normalize(&objectives, fronts) {
                    Ok(nz) => nz,
                    Err(Error::DegeneratePopulation { .. }) => {
                        degenerate = true;
                        self.normalization
                            .lenient_normalizer()
                            .expect("normalize records a nadir before reporting degeneracy")
                    }
                    Err(e) => return Err(e),
                };
                if split.slots < split.critical.len() {
                    let members: Vec<usize> =
                        survivors.iter().chain(split.critical).copied().collect();
                    let normalized: Vec<Vec<f64>> = members
                        .iter()
                        .map(|&i| normalizer.apply(&objectives[i]))
                        .collect();
                    let refs = self.refs.as_ref().expect("nsga3 engines own a lattice");
                    let assoc = associate(&normalized, refs, &mut self.rng)?;
                    let selected: Vec<usize> = (0..accepted).collect();
                    let critical: Vec<usize> = (accepted..members.len()).collect();
                    let chosen =
                        niching_select(&selected, &critical, split.slots, &assoc, &mut self.rng)?;
                    survivors.extend(chosen.into_iter().map(|t| members[t]));
                } else {
                    survivors.extend_from_slice(split.critical);
                }
            }
            Algorithm::Nsga2 => {
                let chosen = crowding_distance_select(
                    split.critical,
                    &objectives,
                    split.slots,
                    &mut self.rng,
                )?;
                survivors.extend(chosen);
            }
        }
        debug_assert_eq!(survivors.len(), n_pop);

        let stats = IterationStats {
            iteration: self.iteration + 1,
            pairs: offspring.pairs,
            crossovers: offspring.crossovers,
            front_sizes: ranked.fronts().iter().map(Vec::len).collect(),
            critical_rank: split.critical_rank,
            accepted,
            critical_size: split.critical.len(),
            slots: split.slots,
            degenerate,
        };

        let mut genome_slots: Vec<Option<Genome>> = genomes.into_iter().map(Some).collect();
        let mut objective_slots: Vec<Option<ObjectiveVector>> =
            objectives.into_iter().map(Some).collect();
        self.genomes = survivors
            .iter()
            .map(|&i| genome_slots[i].take().expect("survivors are distinct"))
            .collect();
        self.objectives = survivors
            .iter()
            .map(|&i| objective_slots[i].take().expect("survivors are distinct"))
            .collect();
        self.iteration += 1;

        let covered = coverage(&self.objectives, &self.front);
        let lost = detect_loss(&self.covered, &covered);
        let new_covered = newly_covered(&self.covered, &covered).len();
        if !lost.is_empty() {
            self.losses_cum += 1;
        }
        self.covered = covered;

        let record = RunRecord {
            run_id: self.config.run_index,
            iteration: self.iteration,
            covered: self.covered.len(),
            front_size: self.front.len(),
            new_covered,
            lost: lost.len(),
            losses_cum: self.losses_cum,
            wall_time: started.elapsed(),
        };
        Ok((stats, record, lost))
    }
}

/// Summary of a finished run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub records: Vec<RunRecord>,
    /// First iteration at which every front value was covered.
    pub first_full_coverage: Option<usize>,
    /// Lost front values per iteration; filled only under [`StopPolicy::Monitor`].
    pub loss_events: Vec<LossEvent>,
}

impl RunOutcome {
    pub fn final_record(&self) -> &RunRecord {
        self.records
            .last()
            .expect("a run has at least its initial record")
    }

    pub fn losses(&self) -> usize {
        self.final_record().losses_cum
    }
}

/// Runs one configuration to completion.
pub fn run(config: RunConfig) -> Result<RunOutcome> {
    run_engine(Engine::new(config)?, |_| {})
}

/// Drives an engine according to its stop policy, handing every record to
/// `sink` as it is produced.
pub fn run_engine<F: FnMut(&RunRecord)>(mut engine: Engine, mut sink: F) -> Result<RunOutcome> {
    let config = engine.config.clone();
    let first = engine.snapshot();
    sink(&first);
    let mut first_full = engine.covered.is_full().then_some(0);
    let mut records = vec![first];
    let mut loss_events = Vec::new();

    let done = |first_full: Option<usize>, it: usize| {
        it >= config.max_iterations || (config.stop == StopPolicy::Coverage && first_full.is_some())
    };
    while !done(first_full, engine.iteration) {
        let (_, record, lost) = engine.step()?;
        if first_full.is_none() && engine.covered.is_full() {
            first_full = Some(record.iteration);
        }
        if config.stop == StopPolicy::Monitor && !lost.is_empty() {
            loss_events.push(LossEvent {
                iteration: record.iteration,
                lost: lost
                    .iter()
                    .map(|&i| engine.front.points()[i].clone())
                    .collect(),
            });
        }
        sink(&record);
        records.push(record);
    }
    Ok(RunOutcome {
        config,
        records,
        first_full_coverage: first_full,
        loss_events,
    })
}
