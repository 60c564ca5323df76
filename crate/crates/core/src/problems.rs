//! OneMinMax benchmarks and their exact Pareto fronts.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::genome::Genome;

/// Optimization direction of one objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Objective values of one solution.
///
/// Benchmark values are small integers stored exactly as `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Self {
        ObjectiveVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Exact integer tuple, if every component is an integer.
    pub fn integer_key(&self) -> Option<Vec<i64>> {
        self.0
            .iter()
            .map(|&v| (v.fract() == 0.0 && v.abs() < 9e15).then_some(v as i64))
            .collect()
    }
}

impl Deref for ObjectiveVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for ObjectiveVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for ObjectiveVector {
    fn from(v: Vec<f64>) -> Self {
        ObjectiveVector(v)
    }
}

impl<const M: usize> From<[f64; M]> for ObjectiveVector {
    fn from(v: [f64; M]) -> Self {
        ObjectiveVector(v.to_vec())
    }
}

/// `(n - |x|_1, |x|_1)`.
pub fn eval_oneminmax(x: &Genome) -> ObjectiveVector {
    let ones = x.count_ones();
    ObjectiveVector(vec![(x.len() - ones) as f64, ones as f64])
}

/// Zeros count, ones in the first half, ones in the second half.
pub fn eval_3omm(x: &Genome) -> Result<ObjectiveVector> {
    let n = x.len();
    if !n.is_multiple_of(2) {
        return Err(Error::param(format!("3-OMM needs an even length, got {n}")));
    }
    let first = x.count_ones_in(0, n / 2);
    let second = x.count_ones_in(n / 2, n);
    Ok(ObjectiveVector(vec![
        (n - first - second) as f64,
        first as f64,
        second as f64,
    ]))
}

/// All values `(n - a - b, a, b)` with `0 <= a, b <= n/2`, ordered by `(a, b)`.
pub fn pareto_front_3omm(n: usize) -> Result<Vec<ObjectiveVector>> {
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::param(format!(
            "3-OMM needs an even positive length, got {n}"
        )));
    }
    let h = n / 2;
    let mut front = Vec::with_capacity((h + 1) * (h + 1));
    for a in 0..=h {
        for b in 0..=h {
            front.push(ObjectiveVector(vec![
                (n - a - b) as f64,
                a as f64,
                b as f64,
            ]));
        }
    }
    Ok(front)
}

/// All values `(n - k, k)`, ordered by `k`.
pub fn pareto_front_oneminmax(n: usize) -> Result<Vec<ObjectiveVector>> {
    if n == 0 {
        return Err(Error::param("OneMinMax needs a positive length"));
    }
    Ok((0..=n)
        .map(|k| ObjectiveVector(vec![(n - k) as f64, k as f64]))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Benchmark {
    OneMinMax,
    ThreeOneMinMax,
}

impl Benchmark {
    pub fn name(self) -> &'static str {
        match self {
            Benchmark::OneMinMax => "omm",
            Benchmark::ThreeOneMinMax => "3omm",
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "omm" | "oneminmax" => Ok(Benchmark::OneMinMax),
            "3omm" | "3-omm" => Ok(Benchmark::ThreeOneMinMax),
            other => Err(Error::Config(format!("unknown problem '{other}'"))),
        }
    }
}

/// A benchmark instance of fixed genome length. Both benchmarks maximize
/// every objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Problem {
    kind: Benchmark,
    n: usize,
}

impl Problem {
    pub fn new(kind: Benchmark, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("genome length must be at least 1"));
        }
        if kind == Benchmark::ThreeOneMinMax && !n.is_multiple_of(2) {
            return Err(Error::param(format!("3-OMM needs an even length, got {n}")));
        }
        Ok(Problem { kind, n })
    }

    pub fn one_min_max(n: usize) -> Result<Self> {
        Problem::new(Benchmark::OneMinMax, n)
    }

    pub fn three_omm(n: usize) -> Result<Self> {
        Problem::new(Benchmark::ThreeOneMinMax, n)
    }

    pub fn kind(&self) -> Benchmark {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_objectives(&self) -> usize {
        match self.kind {
            Benchmark::OneMinMax => 2,
            Benchmark::ThreeOneMinMax => 3,
        }
    }

    pub fn senses(&self) -> Vec<Sense> {
        vec![Sense::Maximize; self.num_objectives()]
    }

    pub fn front_size(&self) -> usize {
        match self.kind {
            Benchmark::OneMinMax => self.n + 1,
            Benchmark::ThreeOneMinMax => (self.n / 2 + 1).pow(2),
        }
    }

    pub fn evaluate(&self, x: &Genome) -> Result<ObjectiveVector> {
        if x.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "genome of length {} given to a problem of length {}",
                x.len(),
                self.n
            )));
        }
        match self.kind {
            Benchmark::OneMinMax => Ok(eval_oneminmax(x)),
            Benchmark::ThreeOneMinMax => eval_3omm(x),
        }
    }

    pub fn pareto_front(&self) -> Vec<ObjectiveVector> {
        match self.kind {
            Benchmark::OneMinMax => pareto_front_oneminmax(self.n),
            Benchmark::ThreeOneMinMax => pareto_front_3omm(self.n),
        }
        .expect("length validated at construction")
    }
}
