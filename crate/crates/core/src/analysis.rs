//! Pareto-front coverage tracking, loss detection, and the geometric
//! verifier for unique reference-point association on 3-OMM.

use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::problems::{pareto_front_3omm, ObjectiveVector, Problem};
use crate::refpoints::{angle_between, ReferencePointSet};

/// Slack used when comparing measured angles against closed-form bounds.
pub const ANGLE_SLACK: f64 = 1e-12;

/// An enumerated Pareto front with exact integer lookup.
#[derive(Clone, Debug)]
pub struct FrontIndex {
    points: Vec<ObjectiveVector>,
    lookup: HashMap<Vec<i64>, usize>,
}

impl FrontIndex {
    pub fn new(points: Vec<ObjectiveVector>) -> Result<Self> {
        let mut lookup = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let key = p.integer_key().ok_or_else(|| {
                Error::InvalidInput(format!("front value {:?} is not integral", p.values()))
            })?;
            if lookup.insert(key, i).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate front value {:?}",
                    p.values()
                )));
            }
        }
        Ok(FrontIndex { points, lookup })
    }

    pub fn for_problem(problem: &Problem) -> Self {
        FrontIndex::new(problem.pareto_front()).expect("benchmark fronts are integral and distinct")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ObjectiveVector] {
        &self.points
    }

    pub fn index_of(&self, v: &[f64]) -> Option<usize> {
        let key: Option<Vec<i64>> = v
            .iter()
            .map(|&x| (x.fract() == 0.0 && x.abs() < 9e15).then_some(x as i64))
            .collect();
        self.lookup.get(&key?).copied()
    }
}

/// Subset of front values represented in a population.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageSet {
    covered: Vec<bool>,
    count: usize,
}

impl CoverageSet {
    pub fn empty(front_size: usize) -> Self {
        CoverageSet {
            covered: vec![false; front_size],
            count: 0,
        }
    }

    pub fn insert(&mut self, i: usize) {
        if !self.covered[i] {
            self.covered[i] = true;
            self.count += 1;
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.covered[i]
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn front_size(&self) -> usize {
        self.covered.len()
    }

    pub fn is_full(&self) -> bool {
        self.count == self.covered.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.covered
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| c.then_some(i))
    }
}

/// Front values (as indices into `front`) present among `pop`.
pub fn coverage<V: AsRef<[f64]>>(pop: &[V], front: &FrontIndex) -> CoverageSet {
    let mut set = CoverageSet::empty(front.len());
    for v in pop {
        if let Some(i) = front.index_of(v.as_ref()) {
            set.insert(i);
        }
    }
    set
}

/// Values covered in `previous` but not in `current`.
pub fn detect_loss(previous: &CoverageSet, current: &CoverageSet) -> Vec<usize> {
    previous.iter().filter(|&i| !current.contains(i)).collect()
}

/// Values covered in `current` but not in `previous`.
pub fn newly_covered(previous: &CoverageSet, current: &CoverageSet) -> Vec<usize> {
    current.iter().filter(|&i| !previous.contains(i)).collect()
}

/// Coverage statistics of one iteration of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub run_id: u64,
    pub iteration: usize,
    pub covered: usize,
    pub front_size: usize,
    pub new_covered: usize,
    /// Front values lost in this iteration.
    pub lost: usize,
    /// Iterations so far in which at least one covered value was lost.
    pub losses_cum: usize,
    pub wall_time: Duration,
}

/// Angles between normalized 3-OMM front values and the lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleReport {
    pub n: usize,
    pub p: usize,
    /// Smallest angle between two distinct normalized front values.
    pub min_pairwise_angle: f64,
    /// Largest angle from a normalized front value to its nearest reference point.
    pub max_assoc_angle: f64,
    /// `min_pairwise_angle > 2 * max_assoc_angle`.
    pub separated: bool,
    /// Front values that can share a reference point with another value.
    pub collisions: usize,
}

/// Closed-form upper bound on the angle to the nearest reference point.
pub fn association_angle_bound(p: usize) -> f64 {
    (1.0 - 18.0 / (p * p) as f64).clamp(-1.0, 1.0).acos()
}

/// Closed-form lower bound on the angle between distinct normalized 3-OMM values.
pub fn pairwise_angle_bound(n: usize) -> f64 {
    (1.0 - 1.0 / (6 * n * n) as f64).acos()
}

/// 3-OMM front values scaled by `z_max = (n, n/2, n/2)` with `z_min = 0`.
pub fn normalized_front_3omm(n: usize) -> Result<Vec<Vec<f64>>> {
    let scale = [n as f64, n as f64 / 2.0, n as f64 / 2.0];
    Ok(pareto_front_3omm(n)?
        .iter()
        .map(|v| v.iter().zip(&scale).map(|(x, s)| x / s).collect())
        .collect())
}

/// Associates every normalized 3-OMM front value with the `p`-division
/// lattice and measures the angles involved.
///
/// A value whose nearest reference point is tied counts as touching every
/// tied point, so `collisions` does not depend on tie-breaking.
pub fn verify_unique_association(n: usize, p: usize) -> Result<AngleReport> {
    let refs = ReferencePointSet::new(3, p)?;
    verify_with(n, &refs)
}

fn verify_with(n: usize, refs: &ReferencePointSet) -> Result<AngleReport> {
    let values = normalized_front_3omm(n)?;

    let mut min_pairwise = f64::INFINITY;
    for (i, u) in values.iter().enumerate() {
        for v in &values[i + 1..] {
            min_pairwise = min_pairwise.min(angle_between(u, v)?);
        }
    }

    let mut max_assoc: f64 = 0.0;
    let mut touching: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, v) in values.iter().enumerate() {
        let nearest = refs.nearest(v)?;
        max_assoc = max_assoc.max(angle_between(v, refs.point(nearest.indices[0]))?);
        for &r in &nearest.indices {
            touching.entry(r).or_default().push(i);
        }
    }
    let mut colliding = vec![false; values.len()];
    for members in touching.values().filter(|m| m.len() > 1) {
        for &i in members {
            colliding[i] = true;
        }
    }

    Ok(AngleReport {
        n,
        p: refs.divisions(),
        min_pairwise_angle: min_pairwise,
        max_assoc_angle: max_assoc,
        separated: min_pairwise > 2.0 * max_assoc,
        collisions: colliding.iter().filter(|&&c| c).count(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimalP {
    pub n: usize,
    /// Least collision-free number of divisions in the scanned range.
    pub p_min: Option<usize>,
    /// `ceil(n / sqrt(2))`: below this there are fewer reference points
    /// than front values.
    pub lower_bound: usize,
    pub report: Option<AngleReport>,
}

/// Scans `range` upward for the least `p` with zero collisions.
pub fn minimal_p_search(n: usize, range: RangeInclusive<usize>) -> Result<MinimalP> {
    if range.is_empty() {
        return Err(Error::param("empty range of divisions"));
    }
    let lower_bound = (n as f64 / 2f64.sqrt()).ceil() as usize;
    let front_size = (n / 2 + 1) * (n / 2 + 1);
    for p in range.filter(|&p| p >= 1) {
        // fewer lattice points than values forces a collision
        if ((p + 1) * (p + 2) / 2) < front_size {
            continue;
        }
        let report = verify_unique_association(n, p)?;
        if report.collisions == 0 {
            return Ok(MinimalP {
                n,
                p_min: Some(p),
                lower_bound,
                report: Some(report),
            });
        }
    }
    Ok(MinimalP {
        n,
        p_min: None,
        lower_bound,
        report: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::Genome;
    use crate::problems::eval_3omm;

    fn front(n: usize) -> FrontIndex {
        FrontIndex::for_problem(&Problem::three_omm(n).unwrap())
    }

    #[test]
    fn coverage_examples() {
        let f = front(4);
        let pop: Vec<ObjectiveVector> = ["0000", "1111"]
            .iter()
            .map(|s| eval_3omm(&s.parse::<Genome>().unwrap()).unwrap())
            .collect();
        let c = coverage(&pop, &f);
        let values: Vec<&[f64]> = c.iter().map(|i| f.points()[i].values()).collect();
        assert_eq!(values, vec![&[4.0, 0.0, 0.0][..], &[0.0, 2.0, 2.0][..]]);

        let everything = coverage(f.points(), &f);
        assert!(everything.is_full());
        assert_eq!(everything.len(), 9);
    }

    #[test]
    fn any_nonempty_3omm_population_covers_something() {
        let f = front(6);
        let x: Genome = "011010".parse().unwrap();
        assert_eq!(coverage(&[eval_3omm(&x).unwrap()], &f).len(), 1);
    }

    #[test]
    fn loss_is_set_difference() {
        let mut a = CoverageSet::empty(5);
        let mut b = CoverageSet::empty(5);
        assert!(detect_loss(&a, &b).is_empty());
        a.insert(0);
        a.insert(1);
        b.insert(1);
        b.insert(2);
        assert_eq!(detect_loss(&a, &b), vec![0]);
        assert_eq!(newly_covered(&a, &b), vec![2]);
        assert!(detect_loss(&a, &a).is_empty());
    }

    #[test]
    fn non_integral_or_duplicate_fronts_are_rejected() {
        assert!(FrontIndex::new(vec![ObjectiveVector::new(vec![0.5, 1.0])]).is_err());
        let d = ObjectiveVector::new(vec![1.0, 1.0]);
        assert!(FrontIndex::new(vec![d.clone(), d]).is_err());
    }

    #[test]
    fn twenty_one_n_separates_n2() {
        // the bound comparison the proof uses at n = 2, p = 42
        assert!(pairwise_angle_bound(2) > 2.0 * association_angle_bound(42));
        let r = verify_unique_association(2, 42).unwrap();
        assert_eq!(r.collisions, 0);
        assert!(r.separated);
    }

    #[test]
    fn measured_angles_respect_closed_form_bounds() {
        for n in [2usize, 4, 6, 8, 10] {
            for p in [3usize, 7, n, 4 * n, 21 * n] {
                let r = verify_unique_association(n, p).unwrap();
                assert!(
                    r.max_assoc_angle <= association_angle_bound(p) + ANGLE_SLACK,
                    "n={n} p={p}"
                );
                assert!(
                    r.min_pairwise_angle >= pairwise_angle_bound(n) - ANGLE_SLACK,
                    "n={n} p={p}"
                );
                if r.separated {
                    assert_eq!(r.collisions, 0);
                }
            }
        }
    }

    #[test]
    fn n8_at_21n_has_no_collisions() {
        let r = verify_unique_association(8, 168).unwrap();
        assert_eq!(r.collisions, 0);
        assert!(r.separated);
    }

    #[test]
    fn too_few_reference_points_collide() {
        let r = verify_unique_association(8, 4).unwrap();
        assert!(r.collisions > 0);
        assert!(!r.separated);
    }

    #[test]
    fn minimal_p_between_counting_and_proof_bounds() {
        for n in (2..=20).step_by(2) {
            let m = minimal_p_search(n, 1..=21 * n).unwrap();
            let p = m.p_min.expect("21n is collision-free");
            assert!(p >= m.lower_bound && p <= 21 * n, "n={n}: {p}");
        }
    }

    #[test]
    fn forty_bits_needs_at_most_4_65_n() {
        let r = verify_unique_association(40, 186).unwrap();
        assert_eq!(r.collisions, 0);
    }

    #[test]
    fn search_reports_not_found() {
        let m = minimal_p_search(12, 1..=3).unwrap();
        assert_eq!(m.p_min, None);
        let (lo, hi) = (5, 4);
        assert!(minimal_p_search(12, lo..=hi).is_err());
    }
}
