//! Objective-space normalization for reference-point selection.
//!
//! Each call to [`NormalizationState::normalize`] runs the cascade:
//!
//! 1. merge the new values into the running ideal (per-objective minimum)
//!    and worst (per-objective maximum) points;
//! 2. pick one extreme point per objective from the current values and the
//!    extremes carried over from the previous call, using an achievement
//!    scalarization function;
//! 3. intersect the hyperplane through the extremes with the coordinate
//!    axes; the intercepts become the nadir estimate if the plane is well
//!    defined and every intercept lies in `[epsilon_nad, worst_j]`;
//! 4. otherwise the nadir estimate is the per-objective maximum over the
//!    first front;
//! 5. any objective whose nadir is still below `ideal_j + epsilon_nad` falls
//!    back to the maximum over all supplied fronts.
//!
//! The resulting map is `x -> (f_j(x) - ideal_j) / (nadir_j - ideal_j)`.
//! Values are taken as given: the ideal point is always the running
//! minimum, whatever the optimization sense of the problem.

use crate::error::{Error, Result};

pub const DEFAULT_EPSILON_NAD: f64 = 1e-6;
pub const DEFAULT_ASF_WEIGHT: f64 = 1e-6;
/// Pivots below this magnitude make the hyperplane solve singular.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizationConfig {
    pub epsilon_nad: f64,
    /// Weight of the off-axis objectives in the scalarization.
    pub asf_weight: f64,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            epsilon_nad: DEFAULT_EPSILON_NAD,
            asf_weight: DEFAULT_ASF_WEIGHT,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Intercepts {
    /// False when the extremes do not span a hyperplane.
    pub valid: bool,
    /// Axis intercepts in untranslated coordinates.
    pub values: Vec<f64>,
}

/// Where the nadir estimate of the last call came from.
#[derive(Clone, Debug, PartialEq)]
pub struct NadirReport {
    pub intercepts: Intercepts,
    pub used_intercepts: bool,
    /// Objectives replaced by the maximum over all fronts.
    pub widened: Vec<bool>,
}

/// The affine map from raw to normalized objective values.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalizer {
    ideal: Vec<f64>,
    nadir: Vec<f64>,
}

impl Normalizer {
    pub fn new(ideal: Vec<f64>, nadir: Vec<f64>) -> Result<Self> {
        if ideal.len() != nadir.len() {
            return Err(Error::param("ideal and nadir differ in dimension"));
        }
        let degenerate: Vec<usize> = (0..ideal.len())
            .filter(|&j| !(nadir[j] > ideal[j]))
            .collect();
        if !degenerate.is_empty() {
            return Err(Error::DegeneratePopulation {
                objectives: degenerate,
                ideal,
                nadir,
            });
        }
        Ok(Normalizer { ideal, nadir })
    }

    pub fn ideal(&self) -> &[f64] {
        &self.ideal
    }

    pub fn nadir(&self) -> &[f64] {
        &self.nadir
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        f.iter()
            .zip(self.ideal.iter().zip(&self.nadir))
            .map(|(&v, (&lo, &hi))| (v - lo) / (hi - lo))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct NormalizationState {
    config: NormalizationConfig,
    ideal: Vec<f64>,
    worst: Vec<f64>,
    extremes: Option<Vec<Vec<f64>>>,
    nadir: Option<Vec<f64>>,
    report: Option<NadirReport>,
}

impl NormalizationState {
    pub fn new(num_objectives: usize) -> Self {
        NormalizationState::with_config(num_objectives, NormalizationConfig::default())
    }

    pub fn with_config(num_objectives: usize, config: NormalizationConfig) -> Self {
        NormalizationState {
            config,
            ideal: vec![f64::INFINITY; num_objectives],
            worst: vec![f64::NEG_INFINITY; num_objectives],
            extremes: None,
            nadir: None,
            report: None,
        }
    }

    pub fn num_objectives(&self) -> usize {
        self.ideal.len()
    }

    pub fn config(&self) -> &NormalizationConfig {
        &self.config
    }

    /// Running minimum per objective over everything observed.
    pub fn ideal(&self) -> &[f64] {
        &self.ideal
    }

    /// Running maximum per objective over everything observed.
    pub fn worst(&self) -> &[f64] {
        &self.worst
    }

    pub fn extremes(&self) -> Option<&[Vec<f64>]> {
        self.extremes.as_deref()
    }

    pub fn nadir(&self) -> Option<&[f64]> {
        self.nadir.as_deref()
    }

    pub fn last_report(&self) -> Option<&NadirReport> {
        self.report.as_ref()
    }

    pub fn update_ideal_and_worst<'a, I>(&mut self, values: I) -> Result<()>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut seen = false;
        for v in values {
            if v.len() != self.ideal.len() {
                return Err(Error::param(format!(
                    "objective vector has {} values, expected {}",
                    v.len(),
                    self.ideal.len()
                )));
            }
            for (j, &x) in v.iter().enumerate() {
                self.ideal[j] = self.ideal[j].min(x);
                self.worst[j] = self.worst[j].max(x);
            }
            seen = true;
        }
        if !seen {
            return Err(Error::param("no objective values to observe"));
        }
        Ok(())
    }

    /// Runs the full cascade over the members of `fronts` (indices into
    /// `objectives`; the first entry is the non-dominated front).
    ///
    /// The state is updated even when the result is a degenerate-population
    /// error, so [`lenient_normalizer`](Self::lenient_normalizer) can still
    /// be used afterwards.
    pub fn normalize<V: AsRef<[f64]>>(
        &mut self,
        objectives: &[V],
        fronts: &[Vec<usize>],
    ) -> Result<Normalizer> {
        let members: Vec<&[f64]> = fronts
            .iter()
            .flatten()
            .map(|&i| objectives[i].as_ref())
            .collect();
        if members.is_empty() {
            return Err(Error::param("normalization needs at least one individual"));
        }
        let m = self.num_objectives();
        self.update_ideal_and_worst(members.iter().copied())?;

        let mut candidates: Vec<&[f64]> = Vec::new();
        if let Some(prev) = &self.extremes {
            candidates.extend(prev.iter().map(Vec::as_slice));
        }
        candidates.extend(members.iter().copied());
        let extremes: Vec<Vec<f64>> = (0..m)
            .map(|j| {
                let k = extreme_point_index(j, &candidates, &self.ideal, self.config.asf_weight);
                candidates[k].to_vec()
            })
            .collect();

        let eps = self.config.epsilon_nad;
        let intercepts = hyperplane_intercepts(&extremes, &self.ideal);
        let accepted = intercepts.valid
            && intercepts
                .values
                .iter()
                .zip(&self.worst)
                .all(|(&i, &w)| eps <= i && i <= w);
        let mut nadir = if accepted {
            intercepts.values.clone()
        } else {
            column_max(fronts[0].iter().map(|&i| objectives[i].as_ref()), m)
        };

        let mut widened = vec![false; m];
        let overall = column_max(members.iter().copied(), m);
        for j in 0..m {
            if nadir[j] < self.ideal[j] + eps {
                nadir[j] = overall[j];
                widened[j] = true;
            }
        }

        self.extremes = Some(extremes);
        self.nadir = Some(nadir.clone());
        self.report = Some(NadirReport {
            intercepts,
            used_intercepts: accepted,
            widened,
        });
        Normalizer::new(self.ideal.clone(), nadir)
    }

    /// Map from the last call, with unit span on objectives whose nadir
    /// collapsed onto the ideal. Such an objective maps every current value
    /// to 0.
    pub fn lenient_normalizer(&self) -> Option<Normalizer> {
        let nadir = self.nadir.as_ref()?;
        let nadir = nadir
            .iter()
            .zip(&self.ideal)
            .map(|(&hi, &lo)| if hi > lo { hi } else { lo + 1.0 })
            .collect();
        Normalizer::new(self.ideal.clone(), nadir).ok()
    }
}

fn column_max<'a>(rows: impl Iterator<Item = &'a [f64]>, m: usize) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; m];
    for r in rows {
        for (o, &x) in out.iter_mut().zip(r) {
            *o = o.max(x);
        }
    }
    out
}

/// `max_k (z_k - ideal_k) / w_k` with `w_j = 1` and every other weight `asf_weight`.
pub fn achievement_scalarization(z: &[f64], ideal: &[f64], axis: usize, asf_weight: f64) -> f64 {
    z.iter()
        .zip(ideal)
        .enumerate()
        .map(|(k, (&v, &lo))| {
            let w = if k == axis { 1.0 } else { asf_weight };
            (v - lo) / w
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Index of the candidate minimizing the scalarization for `axis`; the
/// first candidate wins ties.
pub fn extreme_point_index(
    axis: usize,
    candidates: &[&[f64]],
    ideal: &[f64],
    asf_weight: f64,
) -> usize {
    let mut best = (0, f64::INFINITY);
    for (k, z) in candidates.iter().enumerate() {
        let s = achievement_scalarization(z, ideal, axis, asf_weight);
        if s < best.1 {
            best = (k, s);
        }
    }
    best.0
}

pub fn extreme_point(
    axis: usize,
    candidates: &[&[f64]],
    ideal: &[f64],
    asf_weight: f64,
) -> Result<Vec<f64>> {
    if candidates.is_empty() {
        return Err(Error::param("no candidates for an extreme point"));
    }
    if axis >= ideal.len() {
        return Err(Error::param(format!("objective index {axis} out of range")));
    }
    Ok(candidates[extreme_point_index(axis, candidates, ideal, asf_weight)].to_vec())
}

/// Intercepts of the hyperplane through `extremes` (one per objective),
/// solved in coordinates translated by `ideal` and reported untranslated.
pub fn hyperplane_intercepts(extremes: &[Vec<f64>], ideal: &[f64]) -> Intercepts {
    let m = ideal.len();
    let invalid = || Intercepts {
        valid: false,
        values: vec![f64::NAN; m],
    };
    if extremes.len() != m || extremes.iter().any(|e| e.len() != m) {
        return invalid();
    }
    // rows: translated extremes; plane normal `a` solves E a = 1
    let mut a: Vec<Vec<f64>> = extremes
        .iter()
        .map(|e| {
            let mut row: Vec<f64> = e.iter().zip(ideal).map(|(x, lo)| x - lo).collect();
            row.push(1.0);
            row
        })
        .collect();
    match solve_augmented(&mut a) {
        Some(normal) => Intercepts {
            valid: true,
            values: normal
                .iter()
                .zip(ideal)
                .map(|(&c, &lo)| lo + 1.0 / c)
                .collect(),
        },
        None => invalid(),
    }
}

/// Gaussian elimination with partial pivoting on an `m x (m+1)` augmented
/// matrix. `None` if any pivot falls below [`PIVOT_TOLERANCE`].
fn solve_augmented(a: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if !(a[pivot][col].abs() >= PIVOT_TOLERANCE) {
            return None;
        }
        a.swap(col, pivot);
        for r in col + 1..m {
            let factor = a[r][col] / a[col][col];
            if factor != 0.0 {
                for c in col..=m {
                    a[r][c] -= factor * a[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let tail: f64 = (r + 1..m).map(|c| a[r][c] * x[c]).sum();
        x[r] = (a[r][m] - tail) / a[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{Genome, RandomSource};
    use crate::problems::{eval_3omm, pareto_front_3omm};
    use approx::assert_abs_diff_eq;

    fn rows(v: &[Vec<f64>]) -> Vec<&[f64]> {
        v.iter().map(Vec::as_slice).collect()
    }

    #[test]
    fn ideal_and_worst_updates() {
        let mut s = NormalizationState::new(3);
        s.update_ideal_and_worst([[2.0, 1.0, 1.0].as_slice()])
            .unwrap();
        assert_eq!(s.ideal(), &[2.0, 1.0, 1.0]);
        assert_eq!(s.worst(), &[2.0, 1.0, 1.0]);

        let mut s = NormalizationState::new(3);
        s.update_ideal_and_worst([[0.0, 0.0, 0.0].as_slice(), &[3.0, 2.0, 2.0]])
            .unwrap();
        s.update_ideal_and_worst([[4.0, 0.0, 0.0].as_slice()])
            .unwrap();
        assert_eq!(s.ideal(), &[0.0, 0.0, 0.0]);
        s.update_ideal_and_worst([[4.0, 0.0, 0.0].as_slice(), &[0.0, 2.0, 2.0]])
            .unwrap();
        assert_eq!(s.worst(), &[4.0, 2.0, 2.0]);

        assert!(s.update_ideal_and_worst(std::iter::empty()).is_err());
    }

    #[test]
    fn extreme_point_examples() {
        let c = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.5, 0.5, 0.0],
        ];
        let ideal = [0.0; 3];
        let scores: Vec<f64> = c
            .iter()
            .map(|z| achievement_scalarization(z, &ideal, 0, 1e-6))
            .collect();
        assert_abs_diff_eq!(scores[0], 1.0);
        assert_abs_diff_eq!(scores[1], 1e6, epsilon = 1e-6);
        assert_abs_diff_eq!(scores[2], 5e5, epsilon = 1e-6);
        assert_eq!(
            extreme_point(0, &rows(&c), &ideal, 1e-6).unwrap(),
            vec![1.0, 0.0, 0.0]
        );

        assert_eq!(
            extreme_point(2, &rows(&c[2..]), &ideal, 1e-6).unwrap(),
            c[2]
        );
        assert!(extreme_point(0, &[], &ideal, 1e-6).is_err());

        // swapping the first two axes swaps the chosen extremes
        let sym = vec![
            vec![3.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.5],
            vec![2.0, 2.0, 0.5],
        ];
        let swapped: Vec<Vec<f64>> = sym.iter().map(|z| vec![z[1], z[0], z[2]]).collect();
        let e0 = extreme_point(0, &rows(&sym), &ideal, 1e-6).unwrap();
        let e1 = extreme_point(1, &rows(&swapped), &ideal, 1e-6).unwrap();
        assert_eq!(e0, vec![e1[1], e1[0], e1[2]]);
    }

    #[test]
    fn intercepts_of_axis_aligned_planes() {
        let (a, b, c) = (2.0, 3.5, 0.25);
        let ideal = [1.0, -1.0, 2.0];
        let ext = vec![
            vec![1.0 + a, -1.0, 2.0],
            vec![1.0, -1.0 + b, 2.0],
            vec![1.0, -1.0, 2.0 + c],
        ];
        let i = hyperplane_intercepts(&ext, &ideal);
        assert!(i.valid);
        for (got, want) in i.values.iter().zip([1.0 + a, -1.0 + b, 2.0 + c]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }

        let unit = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert_eq!(
            hyperplane_intercepts(&unit, &[0.0; 3]).values,
            vec![1.0, 1.0, 1.0]
        );
    }

    #[test]
    fn dependent_extremes_are_invalid() {
        let ext = vec![
            vec![1.0, 1.0, 0.0],
            vec![2.0, 2.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert!(!hyperplane_intercepts(&ext, &[0.0; 3]).valid);
        let repeated = vec![vec![4.0, 0.0, 0.0]; 3];
        assert!(!hyperplane_intercepts(&repeated, &[0.0; 3]).valid);
    }

    #[test]
    fn three_omm_planes_cut_every_axis_at_n() {
        let n = 10;
        let front = pareto_front_3omm(n).unwrap();
        let mut rng = RandomSource::from_seed(17);
        use rand::seq::IndexedRandom;
        let mut checked = 0;
        while checked < 200 {
            let pick: Vec<Vec<f64>> = front
                .choose_multiple(&mut rng, 3)
                .map(|v| v.to_vec())
                .collect();
            let i = hyperplane_intercepts(&pick, &[0.0; 3]);
            if !i.valid {
                continue;
            }
            for v in &i.values {
                assert_abs_diff_eq!(*v, n as f64, epsilon = 1e-9);
            }
            checked += 1;
        }
    }

    #[test]
    fn full_front_normalizes_by_min_and_max() {
        let front = pareto_front_3omm(4).unwrap();
        let mut s = NormalizationState::new(3);
        let all: Vec<usize> = (0..front.len()).collect();
        let map = s.normalize(&front, &[all]).unwrap();
        assert_eq!(map.ideal(), &[0.0, 0.0, 0.0]);
        assert_eq!(map.nadir(), &[4.0, 2.0, 2.0]);
        assert_eq!(map.apply(&[2.0, 1.0, 1.0]), vec![0.5, 0.5, 0.5]);
        let report = s.last_report().unwrap();
        assert!(!report.used_intercepts);
        assert_eq!(s.extremes().unwrap().len(), 3);
    }

    #[test]
    fn repeated_value_is_degenerate() {
        let pop = vec![vec![2.0, 1.0, 1.0]; 5];
        let mut s = NormalizationState::new(3);
        let err = s.normalize(&pop, &[vec![0, 1, 2, 3, 4]]).unwrap_err();
        match err {
            Error::DegeneratePopulation { objectives, .. } => assert_eq!(objectives, vec![0, 1, 2]),
            other => panic!("unexpected {other:?}"),
        }
        let lenient = s.lenient_normalizer().unwrap();
        assert_eq!(lenient.apply(&[2.0, 1.0, 1.0]), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn intercepts_used_when_inside_observed_range() {
        // points on x + y + z = 1 with every axis extreme present
        let pop = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.2, 0.3, 0.5],
        ];
        let mut s = NormalizationState::new(3);
        let map = s.normalize(&pop, &[vec![0, 1, 2, 3]]).unwrap();
        assert!(s.last_report().unwrap().used_intercepts);
        for v in map.nadir() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn narrow_objective_widens_to_all_fronts() {
        // first front is flat in objective 1; the second front is not
        let pop = vec![vec![0.0, 1.0], vec![1.0, 1.0], vec![2.0, 3.0]];
        let mut s = NormalizationState::new(2);
        let map = s.normalize(&pop, &[vec![0, 1], vec![2]]).unwrap();
        let report = s.last_report().unwrap();
        assert_eq!(report.widened, vec![false, true]);
        assert_eq!(map.nadir()[1], 3.0);
    }

    /// Min-max scaling computed directly from the population.
    fn min_max_oracle(pop: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let m = pop[0].len();
        let lo: Vec<f64> = (0..m)
            .map(|j| pop.iter().map(|v| v[j]).fold(f64::INFINITY, f64::min))
            .collect();
        let hi: Vec<f64> = (0..m)
            .map(|j| pop.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        pop.iter()
            .map(|v| (0..m).map(|j| (v[j] - lo[j]) / (hi[j] - lo[j])).collect())
            .collect()
    }

    #[test]
    fn cascade_reduces_to_min_max_on_3omm() {
        let mut rng = RandomSource::from_seed(99);
        for trial in 0..100 {
            let n = 2 * (2 + trial % 10);
            let size = 4 + trial % 30;
            let pop: Vec<Vec<f64>> = (0..size)
                .map(|_| {
                    eval_3omm(&Genome::random(n, &mut rng).unwrap())
                        .unwrap()
                        .into_inner()
                })
                .collect();
            let expect = min_max_oracle(&pop);
            if expect.iter().flatten().any(|x| !x.is_finite()) {
                continue;
            }
            let mut s = NormalizationState::new(3);
            let map = s.normalize(&pop, &[(0..size).collect()]).unwrap();
            for (v, e) in pop.iter().zip(&expect) {
                for (a, b) in map.apply(v).iter().zip(e) {
                    assert!((a - b).abs() <= 1e-12, "trial {trial}: {a} vs {b}");
                }
            }
        }
    }
}
