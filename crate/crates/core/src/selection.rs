//! Survivor selection from the critical front.
//!
//! Reference-point niching ([`associate`] + [`niching_select`]) for NSGA-III
//! and crowding distance ([`crowding_distance_select`]) for NSGA-II.
//!
//! Random tie-breaks draw from the caller's stream only when more than one
//! option remains, always scanning reference points in lattice order and
//! individuals in population order, so a seeded run replays exactly.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::refpoints::{Nearest, ReferencePointSet};

/// Nearest reference point of every individual and its distance to that
/// point's reference line. Indexed like the normalized input.
#[derive(Clone, Debug, PartialEq)]
pub struct Association {
    pub reference: Vec<usize>,
    pub distance: Vec<f64>,
}

impl Association {
    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }

    /// Niche count of every reference point touched by `members`.
    pub fn niche_counts(&self, members: &[usize]) -> HashMap<usize, usize> {
        let mut counts = HashMap::new();
        for &i in members {
            *counts.entry(self.reference[i]).or_insert(0) += 1;
        }
        counts
    }
}

fn pick<R: Rng + ?Sized, T: Copy>(options: &[T], rng: &mut R) -> T {
    if options.len() == 1 {
        options[0]
    } else {
        options[rng.random_range(0..options.len())]
    }
}

/// Associates each normalized vector with the reference point whose line
/// through the origin is closest. Exact ties are broken uniformly at random,
/// once per distinct vector, so equal vectors always share a reference point.
pub fn associate<V, R>(
    normalized: &[V],
    refs: &ReferencePointSet,
    rng: &mut R,
) -> Result<Association>
where
    V: AsRef<[f64]>,
    R: Rng + ?Sized,
{
    if refs.is_empty() {
        return Err(Error::param("empty reference point set"));
    }
    let mut cache: HashMap<Vec<u64>, (usize, f64)> = HashMap::new();
    let mut reference = Vec::with_capacity(normalized.len());
    let mut distance = Vec::with_capacity(normalized.len());
    for v in normalized {
        let v = v.as_ref();
        if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite normalized value {bad}"
            )));
        }
        let key: Vec<u64> = v.iter().map(|x| (x + 0.0).to_bits()).collect();
        let (r, d) = match cache.get(&key) {
            Some(&hit) => hit,
            None => {
                let Nearest { distance, indices } = refs.nearest(v)?;
                let hit = (pick(&indices, rng), distance);
                cache.insert(key, hit);
                hit
            }
        };
        reference.push(r);
        distance.push(d);
    }
    Ok(Association {
        reference,
        distance,
    })
}

/// Chooses `k` members of `critical` by reference-point niching.
///
/// `selected` are the already accepted individuals (their associations seed
/// the niche counts); both slices index into `assoc`. The reference point
/// with the smallest niche count is served next (ties at random). An empty
/// niche takes its closest candidate; a niche that already has a member
/// takes a uniformly random one. Only reference points with at least one
/// candidate in `critical` take part: a point without candidates would be
/// dropped the first time it is drawn, which does not change the outcome
/// distribution.
pub fn niching_select<R: Rng + ?Sized>(
    selected: &[usize],
    critical: &[usize],
    k: usize,
    assoc: &Association,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_slots(k, critical.len())?;
    if k == critical.len() {
        return Ok(critical.to_vec());
    }

    let rho = assoc.niche_counts(selected);
    let mut by_ref: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in critical {
        by_ref.entry(assoc.reference[i]).or_default().push(i);
    }
    // (reference point, niche count, remaining candidates)
    let mut active: Vec<(usize, usize, Vec<usize>)> = by_ref
        .into_iter()
        .map(|(r, cands)| (r, rho.get(&r).copied().unwrap_or(0), cands))
        .collect();

    let mut chosen = Vec::with_capacity(k);
    let mut ties = Vec::new();
    while chosen.len() < k {
        let min_rho = active
            .iter()
            .map(|a| a.1)
            .min()
            .expect("candidates remain while slots remain");
        ties.clear();
        ties.extend((0..active.len()).filter(|&t| active[t].1 == min_rho));
        let t = pick(&ties, rng);

        let (_, count, cands) = &mut active[t];
        let pos = if *count == 0 {
            let best = cands
                .iter()
                .map(|&i| assoc.distance[i])
                .fold(f64::INFINITY, f64::min);
            let closest: Vec<usize> = (0..cands.len())
                .filter(|&c| assoc.distance[cands[c]] == best)
                .collect();
            pick(&closest, rng)
        } else if cands.len() == 1 {
            0
        } else {
            rng.random_range(0..cands.len())
        };
        chosen.push(cands.remove(pos));
        *count += 1;
        if cands.is_empty() {
            active.remove(t);
        }
    }
    Ok(chosen)
}

fn check_slots(k: usize, available: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::param("must select at least one individual"));
    }
    if k > available {
        return Err(Error::param(format!(
            "cannot select {k} individuals from a front of {available}"
        )));
    }
    Ok(())
}

/// Crowding distance of every member of one front.
///
/// Per objective, members are sorted (stable, after a random shuffle) and
/// the two ends receive an infinite distance; interior members add the gap
/// between their neighbours divided by the objective's span. Objectives
/// with zero span contribute nothing.
pub fn crowding_distance<V, R>(front: &[V], rng: &mut R) -> Vec<f64>
where
    V: AsRef<[f64]>,
    R: Rng + ?Sized,
{
    let len = front.len();
    let mut dist = vec![0.0; len];
    if len == 0 {
        return dist;
    }
    let m = front[0].as_ref().len();
    let mut order: Vec<usize> = (0..len).collect();
    for j in 0..m {
        order.shuffle(rng);
        order.sort_by(|&a, &b| front[a].as_ref()[j].total_cmp(&front[b].as_ref()[j]));
        let lo = front[order[0]].as_ref()[j];
        let hi = front[order[len - 1]].as_ref()[j];
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        dist[order[0]] = f64::INFINITY;
        dist[order[len - 1]] = f64::INFINITY;
        for w in 1..len.saturating_sub(1) {
            let gap = front[order[w + 1]].as_ref()[j] - front[order[w - 1]].as_ref()[j];
            dist[order[w]] += gap / span;
        }
    }
    dist
}

/// Chooses the `k` members of `critical` (indices into `objectives`) with
/// the largest crowding distance, ties at random.
pub fn crowding_distance_select<V, R>(
    critical: &[usize],
    objectives: &[V],
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>>
where
    V: AsRef<[f64]>,
    R: Rng + ?Sized,
{
    check_slots(k, critical.len())?;
    if k == critical.len() {
        return Ok(critical.to_vec());
    }
    let values: Vec<&[f64]> = critical.iter().map(|&i| objectives[i].as_ref()).collect();
    let dist = crowding_distance(&values, rng);
    let mut order: Vec<usize> = (0..critical.len()).collect();
    order.shuffle(rng);
    order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]));
    Ok(order[..k].iter().map(|&t| critical[t]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::RandomSource;
    use crate::problems::pareto_front_3omm;
    use crate::refpoints::generate_reference_points;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn association_on_and_along_lattice_lines() {
        let refs = generate_reference_points(3, 4).unwrap();
        let mut rng = RandomSource::from_seed(1);
        let r = refs.point(7).to_vec();
        let doubled: Vec<f64> = r.iter().map(|x| 2.0 * x).collect();
        let a = associate(&[r, doubled], &refs, &mut rng).unwrap();
        assert_eq!(a.reference, vec![7, 7]);
        assert!(a.distance.iter().all(|&d| d < 1e-15));
    }

    #[test]
    fn association_matches_brute_force_over_six_points() {
        let refs = generate_reference_points(3, 2).unwrap();
        let v = [0.4, 0.4, 0.2];
        let dists: Vec<f64> = refs
            .points()
            .iter()
            .map(|r| crate::refpoints::perpendicular_distance(&v, r).unwrap())
            .collect();
        let best = (0..dists.len())
            .min_by(|&a, &b| dists[a].total_cmp(&dists[b]))
            .unwrap();
        assert_eq!(refs.point(best), &[0.5, 0.5, 0.0]);
        let a = associate(&[v], &refs, &mut RandomSource::from_seed(2)).unwrap();
        assert_eq!(a.reference, vec![best]);
        assert_eq!(a.distance[0], dists[best]);
    }

    #[test]
    fn association_rejects_non_finite_values() {
        let refs = generate_reference_points(3, 2).unwrap();
        let bad = [[0.1, f64::INFINITY, 0.0]];
        assert!(matches!(
            associate(&bad, &refs, &mut RandomSource::from_seed(3)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn exact_ties_are_broken_once_per_vector() {
        // (1,1,0) is equidistant from the lines through (1,0,0) and (0,1,0)
        let refs = generate_reference_points(3, 1).unwrap();
        let pop = vec![[1.0, 1.0, 0.0]; 50];
        let mut rng = RandomSource::from_seed(4);
        let mut first = 0;
        for _ in 0..400 {
            let a = associate(&pop, &refs, &mut rng).unwrap();
            assert!(a.reference.iter().all(|&r| r == a.reference[0]));
            first += usize::from(a.reference[0] == refs.nearest(&pop[0]).unwrap().indices[0]);
        }
        assert!((140..=260).contains(&first), "{first}");
    }

    fn assoc(pairs: &[(usize, f64)]) -> Association {
        Association {
            reference: pairs.iter().map(|p| p.0).collect(),
            distance: pairs.iter().map(|p| p.1).collect(),
        }
    }

    #[test]
    fn niching_takes_whole_front_when_forced() {
        let a = assoc(&[(0, 0.1), (0, 0.2), (1, 0.3)]);
        let got = niching_select(&[], &[0, 1, 2], 3, &a, &mut RandomSource::from_seed(5)).unwrap();
        assert_eq!(got, vec![0, 1, 2]);
        assert!(niching_select(&[], &[0, 1, 2], 4, &a, &mut RandomSource::from_seed(5)).is_err());
        assert!(niching_select(&[], &[0, 1, 2], 0, &a, &mut RandomSource::from_seed(5)).is_err());
    }

    #[test]
    fn niching_serves_each_empty_niche_with_its_closest_member() {
        // a, b -> r1 at 0.1, 0.2; c -> r2 at 0.3
        let a = assoc(&[(1, 0.1), (1, 0.2), (2, 0.3)]);
        for seed in 0..200 {
            let mut got =
                niching_select(&[], &[0, 1, 2], 2, &a, &mut RandomSource::from_seed(seed)).unwrap();
            got.sort();
            assert_eq!(got, vec![0, 2]);
        }
    }

    #[test]
    fn crowded_niche_takes_closest_then_random() {
        let a = assoc(&[(3, 0.5), (3, 0.05), (3, 0.2), (3, 0.3), (3, 0.4)]);
        let mut counts = [0usize; 5];
        let trials = 4000;
        for seed in 0..trials {
            let got = niching_select(
                &[],
                &[0, 1, 2, 3, 4],
                3,
                &a,
                &mut RandomSource::from_seed(seed),
            )
            .unwrap();
            assert_eq!(got[0], 1);
            for &g in &got[1..] {
                counts[g] += 1;
            }
        }
        // each of the other four appears in a random pair with probability 1/2
        for (i, &c) in counts.iter().enumerate().filter(|(i, _)| *i != 1) {
            let expect = trials as f64 / 2.0;
            let sd = (trials as f64 * 0.25).sqrt();
            assert!((c as f64 - expect).abs() < 5.0 * sd, "member {i}: {c}");
        }
    }

    #[test]
    fn existing_members_count_towards_niches() {
        // r0 already holds a selected member, so r1 is served first
        let a = assoc(&[(0, 0.0), (0, 0.1), (1, 0.9)]);
        for seed in 0..50 {
            let got =
                niching_select(&[0], &[1, 2], 1, &a, &mut RandomSource::from_seed(seed)).unwrap();
            assert_eq!(got, vec![2]);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn niching_with_nothing_accepted_keeps_every_niche(
            refs_of in prop::collection::vec(0usize..8, 2..40),
            seed: u64,
        ) {
            let a = Association {
                reference: refs_of.clone(),
                distance: vec![0.0; refs_of.len()],
            };
            let occupied: HashSet<usize> = refs_of.iter().copied().collect();
            let critical: Vec<usize> = (0..refs_of.len()).collect();
            let k = occupied.len().max(1).min(critical.len());
            let got = niching_select(&[], &critical, k, &a, &mut RandomSource::from_seed(seed)).unwrap();
            let survivors: HashSet<usize> = got.iter().map(|&i| refs_of[i]).collect();
            prop_assert_eq!(survivors, occupied);
        }

        #[test]
        fn niching_returns_k_distinct_critical_members(
            refs_of in prop::collection::vec(0usize..8, 2..40),
            split in 0usize..40,
            k_frac in 0.0f64..1.0,
            seed: u64,
        ) {
            let len = refs_of.len();
            let split = split.min(len - 1);
            let a = Association {
                reference: refs_of.clone(),
                distance: (0..len).map(|i| (i % 5) as f64 * 0.1).collect(),
            };
            let selected: Vec<usize> = (0..split).collect();
            let critical: Vec<usize> = (split..len).collect();
            let k = 1 + ((critical.len() - 1) as f64 * k_frac) as usize;
            let got = niching_select(&selected, &critical, k, &a, &mut RandomSource::from_seed(seed)).unwrap();
            prop_assert_eq!(got.len(), k);
            let set: HashSet<usize> = got.iter().copied().collect();
            prop_assert_eq!(set.len(), k);
            prop_assert!(got.iter().all(|g| critical.contains(g)));

            // few enough unserved niches: every niche keeps a member
            let occupied: HashSet<usize> = refs_of.iter().copied().collect();
            let served: HashSet<usize> = selected.iter().map(|&i| refs_of[i]).collect();
            if occupied.difference(&served).count() <= k {
                let survivors: HashSet<usize> = selected
                    .iter()
                    .chain(&got)
                    .map(|&i| refs_of[i])
                    .collect();
                prop_assert_eq!(survivors, occupied);
            }
        }
    }

    #[test]
    fn crowding_distance_of_three_point_front() {
        let front = [[1.0, 3.0], [2.0, 2.0], [3.0, 1.0]];
        let d = crowding_distance(&front, &mut RandomSource::from_seed(6));
        assert_eq!(d[0], f64::INFINITY);
        assert_eq!(d[2], f64::INFINITY);
        assert!((d[1] - 2.0).abs() < 1e-15);
        for seed in 0..20 {
            let mut got =
                crowding_distance_select(&[0, 1, 2], &front, 2, &mut RandomSource::from_seed(seed))
                    .unwrap();
            got.sort();
            assert_eq!(got, vec![0, 2]);
        }
        let all = crowding_distance_select(&[0, 1, 2], &front, 3, &mut RandomSource::from_seed(0))
            .unwrap();
        assert_eq!(all, vec![0, 1, 2]);
        assert!(
            crowding_distance_select(&[0, 1, 2], &front, 4, &mut RandomSource::from_seed(0))
                .is_err()
        );
    }

    #[test]
    fn identical_values_are_selected_uniformly() {
        let front = vec![[2.0, 2.0]; 4];
        let mut rng = RandomSource::from_seed(8);
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        let trials = 12_000;
        for _ in 0..trials {
            let mut got = crowding_distance_select(&[0, 1, 2, 3], &front, 2, &mut rng).unwrap();
            got.sort();
            *counts.entry(got).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 6);
        let p = 1.0 / 6.0;
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        for (subset, c) in counts {
            assert!(
                (c as f64 - trials as f64 * p).abs() < 5.0 * sd,
                "{subset:?}: {c}"
            );
        }
    }

    // distinct front values never share a reference point once p >= 21n
    #[test]
    fn unique_association_on_small_fronts() {
        for n in (2..=12).step_by(2) {
            let refs = generate_reference_points(3, 21 * n).unwrap();
            let scale = [n as f64, n as f64 / 2.0, n as f64 / 2.0];
            let normalized: Vec<Vec<f64>> = pareto_front_3omm(n)
                .unwrap()
                .iter()
                .map(|v| v.iter().zip(&scale).map(|(x, s)| x / s).collect())
                .collect();
            let a = associate(&normalized, &refs, &mut RandomSource::from_seed(n as u64)).unwrap();
            let distinct: HashSet<usize> = a.reference.iter().copied().collect();
            assert_eq!(distinct.len(), normalized.len(), "n = {n}");
        }
    }
}
