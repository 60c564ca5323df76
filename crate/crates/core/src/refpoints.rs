//! Structured reference points on the unit simplex and the angular
//! geometry used to associate objective vectors with them.

use crate::error::{Error, Result};

/// The simplex lattice with `divisions` steps per objective: every vector
/// whose coordinates are non-negative multiples of `1/divisions` summing to 1.
///
/// Points are in lexicographic order of their integer compositions.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferencePointSet {
    dim: usize,
    divisions: usize,
    points: Vec<Vec<f64>>,
}

/// Closest reference point(s) to one vector. `indices` holds every point at
/// exactly the minimal distance, in lattice order.
#[derive(Clone, Debug, PartialEq)]
pub struct Nearest {
    pub distance: f64,
    pub indices: Vec<usize>,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = match r.checked_mul((n - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    r
}

/// Number of lattice points for `dim` objectives and `divisions` steps.
pub fn lattice_size(dim: usize, divisions: usize) -> u128 {
    binomial((divisions + dim - 1) as u64, (dim - 1) as u64)
}

pub fn generate_reference_points(dim: usize, divisions: usize) -> Result<ReferencePointSet> {
    ReferencePointSet::new(dim, divisions)
}

impl ReferencePointSet {
    pub fn new(dim: usize, divisions: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::param(format!(
                "need at least 2 objectives, got {dim}"
            )));
        }
        if divisions == 0 {
            return Err(Error::param("number of divisions must be at least 1"));
        }
        let size = lattice_size(dim, divisions);
        if size > 50_000_000 {
            return Err(Error::param(format!(
                "{size} reference points for {dim} objectives and {divisions} divisions is too many"
            )));
        }
        let mut points = Vec::with_capacity(size as usize);
        let mut parts = vec![0usize; dim];
        compositions(divisions, 0, &mut parts, &mut |c| {
            points.push(c.iter().map(|&k| k as f64 / divisions as f64).collect());
        });
        Ok(ReferencePointSet {
            dim,
            divisions,
            points,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn divisions(&self) -> usize {
        self.divisions
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Reference point(s) whose line through the origin is closest to `v`.
    ///
    /// For three objectives and a non-negative `v` this scans only the
    /// lattice rows within `sqrt(6)/p` of the projection of `v` onto the
    /// simplex (no closer point can lie further away), and within each row
    /// only the few points around the row's continuous angular optimum plus
    /// the row ends. The angle to points on a segment inside the non-negative
    /// orthant is quasiconvex, so the result equals
    /// [`nearest_exhaustive`](Self::nearest_exhaustive).
    pub fn nearest(&self, v: &[f64]) -> Result<Nearest> {
        self.check_vector(v)?;
        let nonneg = v.iter().all(|&x| x >= 0.0);
        if self.dim == 3 && nonneg && v.iter().any(|&x| x > 0.0) {
            Ok(self.nearest_by_rows(v))
        } else {
            Ok(self.scan(v, 0..self.points.len()))
        }
    }

    /// Brute-force minimum over every reference point.
    pub fn nearest_exhaustive(&self, v: &[f64]) -> Result<Nearest> {
        self.check_vector(v)?;
        Ok(self.scan(v, 0..self.points.len()))
    }

    fn check_vector(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::param(format!(
                "vector has {} components, reference points have {}",
                v.len(),
                self.dim
            )));
        }
        if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite component {bad}")));
        }
        Ok(())
    }

    fn scan(&self, v: &[f64], range: impl IntoIterator<Item = usize>) -> Nearest {
        let mut best = Nearest {
            distance: f64::INFINITY,
            indices: Vec::new(),
        };
        for i in range {
            offer(&mut best, i, line_distance(v, &self.points[i]));
        }
        best
    }

    fn nearest_by_rows(&self, v: &[f64]) -> Nearest {
        let p = self.divisions;
        let pf = p as f64;
        let mut best = Nearest {
            distance: f64::INFINITY,
            indices: Vec::new(),
        };
        let mut window: Vec<usize> = Vec::with_capacity(8);
        let centre = v[0] / (v[0] + v[1] + v[2]) * pf;
        let lo = (centre - 3.0).floor().max(0.0) as usize;
        let hi = ((centre + 3.0).ceil() as usize).min(p);
        for i in lo..=hi {
            let row_start = i * (p + 1) - i * i.saturating_sub(1) / 2;
            let last = p - i;
            let x = i as f64 / pf;
            // r(y) = (x, y, 1 - x - y); maximize (v.r)^2 / |r|^2 over y
            let a = v[0] * x + v[2] * (1.0 - x);
            let b = v[1] - v[2];
            let c = x * x + (1.0 - x) * (1.0 - x);
            let d = -2.0 * (1.0 - x);
            let y_star = (a * d - 2.0 * b * c) / (b * d - 4.0 * a);

            window.clear();
            if y_star.is_finite() {
                let j = (y_star * pf).floor().clamp(0.0, last as f64) as usize;
                window.extend(j.saturating_sub(2)..=(j + 2).min(last));
                window.push(0);
                window.push(last);
                window.sort_unstable();
                window.dedup();
            } else {
                window.extend(0..=last);
            }
            for &j in &window {
                let idx = row_start + j;
                offer(&mut best, idx, line_distance(v, &self.points[idx]));
            }
        }
        best.indices.sort_unstable();
        best
    }
}

fn offer(best: &mut Nearest, idx: usize, d: f64) {
    if d < best.distance {
        best.distance = d;
        best.indices.clear();
        best.indices.push(idx);
    } else if d == best.distance {
        best.indices.push(idx);
    }
}

fn compositions(
    remaining: usize,
    pos: usize,
    parts: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    if pos + 1 == parts.len() {
        parts[pos] = remaining;
        emit(parts);
        return;
    }
    for k in 0..=remaining {
        parts[pos] = k;
        compositions(remaining - k, pos + 1, parts, emit);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `|v - (v.r / |r|^2) r|` without argument checks.
pub(crate) fn line_distance(v: &[f64], r: &[f64]) -> f64 {
    let scale = dot(v, r) / dot(r, r);
    v.iter()
        .zip(r)
        .map(|(x, y)| {
            let e = x - scale * y;
            e * e
        })
        .sum::<f64>()
        .sqrt()
}

/// Distance from `v` to the line through the origin and `r`.
pub fn perpendicular_distance(v: &[f64], r: &[f64]) -> Result<f64> {
    if v.len() != r.len() {
        return Err(Error::param(
            "vector and reference point differ in dimension",
        ));
    }
    if r.iter().all(|&x| x == 0.0) {
        return Err(Error::param("reference point must be non-zero"));
    }
    Ok(line_distance(v, r))
}

/// Angle in `[0, pi]` between two non-zero vectors.
pub fn angle_between(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::param("vectors differ in dimension"));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::param("angle with a zero vector is undefined"));
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0).acos())
}
