//! Sweep specifications: line-oriented `key = value` files (repeated keys
//! and comma-separated values form lists) or an equivalent JSON object.

use std::fmt;
use std::str::FromStr;

use crate::engine::{Algorithm, RunConfig, StopPolicy};
use crate::error::{Error, Result};
use crate::problems::{Benchmark, Problem};

/// Population size, absolute or relative to the Pareto front size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PopSize {
    Fixed(usize),
    /// `8x` means eight times the front size.
    FrontMultiple(f64),
}

/// Lattice divisions, absolute or relative to the problem size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Divisions {
    Fixed(usize),
    /// `4.65n` means `ceil(4.65 * n)`.
    PerBit(f64),
}

/// Mutation probability, absolute or `c/n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MutationProb {
    Fixed(f64),
    PerBit(f64),
}

// k * n rounded up, tolerating representation error such as 4.65 * 40
fn scaled_ceil(k: f64, n: usize) -> usize {
    (k * n as f64 - 1e-9).ceil().max(0.0) as usize
}

impl PopSize {
    pub fn resolve(self, problem: &Problem) -> usize {
        match self {
            PopSize::Fixed(v) => v,
            PopSize::FrontMultiple(k) => scaled_ceil(k, problem.front_size()),
        }
    }
}

impl Divisions {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            Divisions::Fixed(p) => p,
            Divisions::PerBit(k) => scaled_ceil(k, n),
        }
    }
}

impl MutationProb {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            MutationProb::Fixed(p) => p,
            MutationProb::PerBit(c) => c / n as f64,
        }
    }
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

impl FromStr for PopSize {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "front" {
            return Ok(PopSize::FrontMultiple(1.0));
        }
        match s.strip_suffix('x') {
            Some(k) => positive(k).map(PopSize::FrontMultiple),
            None => s
                .parse()
                .map(PopSize::Fixed)
                .map_err(|_| format!("bad population size '{s}'")),
        }
    }
}

impl FromStr for Divisions {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.strip_suffix('n') {
            Some(k) => positive(k).map(Divisions::PerBit),
            None => s
                .parse()
                .map(Divisions::Fixed)
                .map_err(|_| format!("bad divisions '{s}'")),
        }
    }
}

impl FromStr for MutationProb {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.strip_suffix("/n") {
            Some(c) => positive(c).map(MutationProb::PerBit),
            None => s
                .parse()
                .map(MutationProb::Fixed)
                .map_err(|_| format!("bad mutation probability '{s}'")),
        }
    }
}

impl fmt::Display for MutationProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MutationProb::Fixed(p) => write!(f, "{p}"),
            MutationProb::PerBit(c) => write!(f, "{c}/n"),
        }
    }
}

/// A parsed sweep: every list key spans one axis of a cartesian product.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub problems: Vec<Benchmark>,
    pub ns: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub pop_sizes: Vec<PopSize>,
    /// Empty means the engine default; ignored for NSGA-II.
    pub divisions: Vec<Divisions>,
    pub crossover_rates: Vec<f64>,
    pub mutation_probs: Vec<MutationProb>,
    pub swap_prob: f64,
    pub iterations: usize,
    pub seeds: usize,
    pub seed: u64,
    pub stop: StopPolicy,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            problems: vec![Benchmark::ThreeOneMinMax],
            ns: Vec::new(),
            algorithms: vec![Algorithm::Nsga3],
            pop_sizes: vec![PopSize::FrontMultiple(1.0)],
            divisions: Vec::new(),
            crossover_rates: vec![0.0],
            mutation_probs: vec![MutationProb::PerBit(1.0)],
            swap_prob: 0.5,
            iterations: 1000,
            seeds: 1,
            seed: 0,
            stop: StopPolicy::Iterations,
        }
    }
}

/// One run of an expanded sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct PlannedRun {
    /// Index of the configuration this run repeats with another seed.
    pub group: usize,
    pub config: RunConfig,
}

/// Every run of a sweep, validated, in output order.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub runs: Vec<PlannedRun>,
}

impl ExperimentSpec {
    /// `seeds` repetitions of a single configuration.
    pub fn repeat(config: RunConfig, seeds: usize) -> Result<Self> {
        config.validate()?;
        if seeds == 0 {
            return Err(Error::Config("at least one seed is required".into()));
        }
        let runs = (0..seeds as u64)
            .map(|i| PlannedRun {
                group: 0,
                config: RunConfig {
                    run_index: i,
                    ..config.clone()
                },
            })
            .collect();
        Ok(ExperimentSpec { runs })
    }

    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }
}

#[derive(Default)]
struct Seen {
    keys: Vec<&'static str>,
}

impl Seen {
    // list keys start from defaults that the first occurrence replaces
    fn first(&mut self, key: &'static str) -> bool {
        if self.keys.contains(&key) {
            false
        } else {
            self.keys.push(key);
            true
        }
    }
}

fn parse_all<T: FromStr>(values: &[String], what: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    values
        .iter()
        .map(|v| v.parse::<T>().map_err(|e| format!("bad {what} '{v}': {e}")))
        .collect()
}

fn single<'a>(
    key: &str,
    values: &'a [String],
    repeated: bool,
) -> std::result::Result<&'a str, String> {
    if repeated {
        return Err(format!("'{key}' may only be given once"));
    }
    match values {
        [v] => Ok(v),
        _ => Err(format!("'{key}' takes a single value")),
    }
}

impl SweepSpec {
    /// Parses either format; JSON is recognized by a leading `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            SweepSpec::parse_json(text)
        } else {
            SweepSpec::parse_lines(text)
        }
    }

    pub fn parse_lines(text: &str) -> Result<Self> {
        let mut spec = SweepSpec::default();
        let mut seen = Seen::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected 'key = value', got '{content}'"),
            })?;
            let values: Vec<String> = value.split(',').map(|v| v.trim().to_string()).collect();
            if values.iter().any(String::is_empty) {
                return Err(Error::Parse {
                    line,
                    message: format!("empty value for '{}'", key.trim()),
                });
            }
            spec.apply(key.trim(), &values, &mut seen)
                .map_err(|message| Error::Parse { line, message })?;
        }
        Ok(spec)
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        let object = value
            .as_object()
            .ok_or_else(|| Error::Config("sweep spec must be a JSON object".into()))?;
        let mut spec = SweepSpec::default();
        let mut seen = Seen::default();
        for (key, v) in object {
            let items = match v {
                serde_json::Value::Array(items) => items.clone(),
                other => vec![other.clone()],
            };
            let values = items
                .iter()
                .map(|item| match item {
                    serde_json::Value::String(s) => Ok(s.trim().to_string()),
                    serde_json::Value::Number(n) => Ok(n.to_string()),
                    other => Err(Error::Config(format!(
                        "key '{key}': unsupported value {other}"
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            if values.is_empty() {
                return Err(Error::Config(format!("key '{key}': empty list")));
            }
            spec.apply(key, &values, &mut seen)
                .map_err(|m| Error::Config(format!("key '{key}': {m}")))?;
        }
        Ok(spec)
    }

    fn apply(
        &mut self,
        key: &str,
        values: &[String],
        seen: &mut Seen,
    ) -> std::result::Result<(), String> {
        macro_rules! list {
            ($field:ident, $name:literal, $what:literal) => {{
                let mut parsed = parse_all(values, $what)?;
                if seen.first($name) {
                    self.$field.clear();
                }
                self.$field.append(&mut parsed);
            }};
        }
        match key.to_ascii_lowercase().as_str() {
            "problem" => list!(problems, "problem", "problem"),
            "n" => list!(ns, "n", "problem size"),
            "algo" | "algorithm" => list!(algorithms, "algo", "algorithm"),
            "pop_size" | "n_pop" | "population" => list!(pop_sizes, "pop_size", "population size"),
            "divisions" | "p" => list!(divisions, "divisions", "divisions"),
            "crossover_rate" | "chi" => {
                let parsed: Vec<f64> = parse_all(values, "crossover rate")?;
                if seen.first("chi") {
                    self.crossover_rates.clear();
                }
                self.crossover_rates.extend(parsed);
            }
            "mutation_prob" => list!(mutation_probs, "mutation_prob", "mutation probability"),
            "swap_prob" => {
                let repeated = !seen.first("swap_prob");
                let v = single(key, values, repeated)?;
                self.swap_prob = v
                    .parse()
                    .map_err(|_| format!("bad swap probability '{v}'"))?;
            }
            "iterations" => {
                let repeated = !seen.first("iterations");
                let v = single(key, values, repeated)?;
                self.iterations = v
                    .parse()
                    .map_err(|_| format!("bad iteration count '{v}'"))?;
            }
            "seeds" => {
                let repeated = !seen.first("seeds");
                let v = single(key, values, repeated)?;
                self.seeds = v.parse().map_err(|_| format!("bad seed count '{v}'"))?;
            }
            "seed" => {
                let repeated = !seen.first("seed");
                let v = single(key, values, repeated)?;
                self.seed = v.parse().map_err(|_| format!("bad seed '{v}'"))?;
            }
            "stop" => {
                let repeated = !seen.first("stop");
                let v = single(key, values, repeated)?;
                self.stop = v.parse().map_err(|e: Error| e.to_string())?;
            }
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Cartesian product in the order problem, n, algorithm, population
    /// size, divisions, crossover rate, mutation probability; seeds vary
    /// fastest. Every configuration is validated before anything runs.
    pub fn expand(&self) -> Result<ExperimentSpec> {
        if self.ns.is_empty() {
            return Err(Error::Config("no value given for 'n'".into()));
        }
        let nsga2_divisions = [None];
        let nsga3_divisions: Vec<Option<Divisions>> = if self.divisions.is_empty() {
            vec![None]
        } else {
            self.divisions.iter().copied().map(Some).collect()
        };

        let mut runs = Vec::new();
        let mut group = 0;
        for &problem in &self.problems {
            for &n in &self.ns {
                let instance =
                    Problem::new(problem, n).map_err(|e| Error::Config(e.to_string()))?;
                for &algorithm in &self.algorithms {
                    let divisions: &[Option<Divisions>] = match algorithm {
                        Algorithm::Nsga2 => &nsga2_divisions,
                        Algorithm::Nsga3 => &nsga3_divisions,
                    };
                    for &pop in &self.pop_sizes {
                        for &div in divisions {
                            for &chi in &self.crossover_rates {
                                for &mutation in &self.mutation_probs {
                                    let mut config = RunConfig::new(problem, n, algorithm);
                                    config.pop_size = pop.resolve(&instance);
                                    config.divisions = div.map(|d| d.resolve(n));
                                    config.crossover_rate = chi;
                                    config.swap_prob = self.swap_prob;
                                    config.mutation_prob = Some(mutation.resolve(n));
                                    config.max_iterations = self.iterations;
                                    config.stop = self.stop;
                                    config.seed = self.seed;
                                    config.validate()?;
                                    for _ in 0..self.seeds {
                                        config.run_index = runs.len() as u64;
                                        runs.push(PlannedRun {
                                            group,
                                            config: config.clone(),
                                        });
                                    }
                                    group += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        if runs.is_empty() {
            return Err(Error::Config("the sweep expands to no runs".into()));
        }
        Ok(ExperimentSpec { runs })
    }
}
