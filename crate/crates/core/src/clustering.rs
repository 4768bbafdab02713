//! k-means++ seeding and Lloyd iteration.
//!
//! Points live in a flat [`Dataset`] of fixed dimension. Distances are squared
//! Euclidean, nearest-center ties go to the lowest center index, and a cluster
//! that loses all its members is re-seeded at the point farthest from its
//! assigned center, so `k` never shrinks during iteration.

use rand::Rng;

use crate::error::{Error, Result};

/// Default Lloyd iteration cap.
pub const DEFAULT_MAX_ITERS: usize = 100;
/// Default center-displacement tolerance, in feature units.
pub const DEFAULT_TOL: f64 = 1e-6;

/// A set of `len()` points, each with `dim()` finite coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dim: usize,
    data: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset from a flat row-major buffer.
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("point dimension must be positive".into()));
        }
        if data.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "buffer of {} values is not a multiple of dimension {dim}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite coordinate {bad}")));
        }
        Ok(Self { dim, data })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let dim = points.first().map_or(1, |p| p.as_ref().len());
        if let Some(p) = points.iter().find(|p| p.as_ref().len() != dim) {
            return Err(Error::InvalidParameter(format!(
                "mixed dimensions {dim} and {}",
                p.as_ref().len()
            )));
        }
        Self::from_flat(dim, points.iter().flat_map(|p| p.as_ref().iter().copied()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centers.iter().enumerate() {
        let d = squared_distance(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Chooses `k` initial centers with k-means++.
///
/// The first center is a uniformly drawn point; each further center is drawn
/// with probability proportional to its squared distance from the nearest
/// center chosen so far. Every returned center is a copy of an input point.
pub fn kmeanspp_seed<R: Rng + ?Sized>(points: &Dataset, k: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let n = points.len();
    if n == 0 {
        return Err(Error::InsufficientDistinctPoints { k, found: 0 });
    }
    let mut centers = vec![points.point(rng.gen_range(0..n)).to_vec()];
    let mut dist: Vec<f64> = points.iter().map(|p| squared_distance(p, &centers[0])).collect();

    while centers.len() < k {
        let total: f64 = dist.iter().sum();
        if total <= 0.0 {
            // Every point coincides with a chosen center.
            return Err(Error::InsufficientDistinctPoints {
                k,
                found: centers.len(),
            });
        }
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &d) in dist.iter().enumerate() {
            acc += d;
            if d > 0.0 && acc > target {
                pick = Some(i);
                break;
            }
        }
        // Rounding can leave `target` just past the final partial sum.
        let pick = pick.unwrap_or_else(|| dist.iter().rposition(|&d| d > 0.0).expect("positive mass"));
        let chosen = points.point(pick).to_vec();
        for (d, p) in dist.iter_mut().zip(points.iter()) {
            *d = d.min(squared_distance(p, &chosen));
        }
        centers.push(chosen);
    }
    Ok(centers)
}

/// Index of the nearest center for every point.
pub fn assign(points: &Dataset, centers: &[Vec<f64>]) -> Vec<usize> {
    assert!(!centers.is_empty(), "assign needs at least one center");
    points.iter().map(|p| nearest(p, centers).0).collect()
}

/// Sum of squared distances from each point to its labelled center.
pub fn objective(points: &Dataset, labels: &[usize], centers: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| squared_distance(p, &centers[l]))
        .sum()
}

/// Recomputes each center as the mean of its members.
///
/// An empty cluster is moved onto the point that lies farthest from its own
/// (freshly averaged) center; with several empty clusters the picks are made
/// in index order and never reuse a point.
pub fn update_centers(points: &Dataset, labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = points.dim();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(p) {
            *s += v;
        }
    }
    let mut centers: Vec<Vec<f64>> = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &c)| {
            if c == 0 {
                s
            } else {
                s.into_iter().map(|v| v / c as f64).collect()
            }
        })
        .collect();

    let empty: Vec<usize> = (0..k).filter(|&j| counts[j] == 0).collect();
    if !empty.is_empty() && !points.is_empty() {
        let mut spread: Vec<f64> = points
            .iter()
            .zip(labels)
            .map(|(p, &l)| squared_distance(p, &centers[l]))
            .collect();
        for j in empty {
            let (far, _) = spread
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, &d)| if d > best.1 { (i, d) } else { best });
            centers[j] = points.point(far).to_vec();
            spread[far] = f64::NEG_INFINITY;
        }
    }
    centers
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// An iteration left every assignment unchanged.
    AssignmentsStable,
    /// No center moved farther than the tolerance.
    CentersWithinTolerance,
    /// The iteration cap was hit first.
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterModel {
    pub k: usize,
    pub centers: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    /// Sum of squared distances from each point to its assigned center.
    pub objective: f64,
    /// Objective of the seeding assignment, then after every update step.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
}

impl ClusterModel {
    /// Number of points carrying each label.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LloydParams {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for LloydParams {
    fn default() -> Self {
        Self {
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
        }
    }
}

impl LloydParams {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be >= 0, got {}", self.tol)));
        }
        Ok(())
    }
}

/// k-means: k-means++ seeding followed by Lloyd iteration.
pub fn lloyd<R: Rng + ?Sized>(points: &Dataset, k: usize, rng: &mut R, params: LloydParams) -> Result<ClusterModel> {
    params.validate()?;
    let seeds = kmeanspp_seed(points, k, rng)?;
    lloyd_from(points, seeds, params)
}

/// Lloyd iteration from caller-supplied initial centers.
///
/// Each iteration recomputes centers from the current labels and then
/// reassigns. It stops when the centers move by at most `tol`, when the
/// reassignment changes nothing, or after `max_iters` updates. The returned
/// labels are always the ones the returned centers were averaged from.
pub fn lloyd_from(points: &Dataset, initial: Vec<Vec<f64>>, params: LloydParams) -> Result<ClusterModel> {
    params.validate()?;
    let k = initial.len();
    if k == 0 {
        return Err(Error::InvalidParameter("at least one initial center is required".into()));
    }
    if let Some(c) = initial.iter().find(|c| c.len() != points.dim()) {
        return Err(Error::InvalidParameter(format!(
            "center of dimension {} for {}-dimensional points",
            c.len(),
            points.dim()
        )));
    }

    let mut centers = initial;
    let mut labels = assign(points, &centers);
    let mut history = vec![objective(points, &labels, &centers)];
    let mut iterations = 0;
    let mut stop_reason = StopReason::IterationLimit;

    while iterations < params.max_iters {
        iterations += 1;
        let updated = update_centers(points, &labels, k);
        let shift = centers
            .iter()
            .zip(&updated)
            .map(|(a, b)| squared_distance(a, b).sqrt())
            .fold(0.0, f64::max);
        centers = updated;
        history.push(objective(points, &labels, &centers));
        if shift <= params.tol {
            stop_reason = StopReason::CentersWithinTolerance;
            break;
        }
        if iterations == params.max_iters {
            break;
        }
        let relabelled = assign(points, &centers);
        if relabelled == labels {
            stop_reason = StopReason::AssignmentsStable;
            break;
        }
        labels = relabelled;
    }

    let objective = *history.last().expect("history is never empty");
    Ok(ClusterModel {
        k,
        centers,
        labels,
        objective,
        objective_history: history,
        iterations,
        converged: stop_reason != StopReason::IterationLimit,
        stop_reason,
    })
}

/// Runs [`lloyd`] `restarts` times and keeps the lowest objective; the first
/// run wins ties.
pub fn lloyd_best_of<R: Rng + ?Sized>(
    points: &Dataset,
    k: usize,
    rng: &mut R,
    params: LloydParams,
    restarts: usize,
) -> Result<ClusterModel> {
    let mut best: Option<ClusterModel> = None;
    for _ in 0..restarts.max(1) {
        let model = lloyd(points, k, rng, params)?;
        if best.as_ref().is_none_or(|b| model.objective < b.objective) {
            best = Some(model);
        }
    }
    Ok(best.expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ds(points: &[&[f64]]) -> Dataset {
        Dataset::from_points(points).unwrap()
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::from_flat(0, vec![]).is_err());
        assert!(Dataset::from_flat(2, vec![1.0, 2.0, 3.0]).is_err());
        assert!(Dataset::from_flat(1, vec![f64::NAN]).is_err());
        assert!(Dataset::from_points(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn single_seed_is_an_input_point() {
        let points = ds(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let seeds = kmeanspp_seed(&points, 1, &mut rng).unwrap();
        assert_eq!(seeds.len(), 1);
        assert!(points.iter().any(|p| p == seeds[0].as_slice()));
    }

    #[test]
    fn seeding_needs_enough_distinct_points() {
        let points = ds(&[&[1.0], &[1.0], &[1.0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            kmeanspp_seed(&points, 2, &mut rng),
            Err(Error::InsufficientDistinctPoints { k: 2, found: 1 })
        ));
        let empty = Dataset::from_flat(3, vec![]).unwrap();
        assert!(kmeanspp_seed(&empty, 1, &mut rng).is_err());
        assert!(kmeanspp_seed(&points, 0, &mut rng).is_err());
    }

    #[test]
    fn seeding_finds_the_outlier() {
        let mut raw = vec![[0.0, 0.0]; 99];
        raw.push([1.0, 1.0]);
        let points = Dataset::from_points(&raw).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let mut seeds = kmeanspp_seed(&points, 2, &mut rng).unwrap();
            seeds.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(seeds, vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
        }
    }

    #[test]
    fn seeding_is_deterministic() {
        let points = Dataset::from_flat(1, (0..50).map(|i| (i * i % 17) as f64).collect()).unwrap();
        let a = kmeanspp_seed(&points, 4, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = kmeanspp_seed(&points, 4, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn assignment_rules() {
        let c = vec![vec![0.0, 0.0], vec![10.0, 10.0]];
        assert_eq!(assign(&ds(&[&[1.0, 1.0]]), &c), vec![0]);
        assert_eq!(assign(&ds(&[&[5.0, 5.0]]), &c), vec![0]);
        let one = vec![vec![3.0, 3.0]];
        assert_eq!(assign(&ds(&[&[1.0, 1.0], &[9.0, 0.0]]), &one), vec![0, 0]);
    }

    #[test]
    fn center_updates() {
        let p = ds(&[&[0.0, 0.0], &[2.0, 2.0]]);
        assert_eq!(update_centers(&p, &[0, 0], 1), vec![vec![1.0, 1.0]]);
        assert_eq!(update_centers(&p, &[0, 1], 2), vec![vec![0.0, 0.0], vec![2.0, 2.0]]);
        let line = Dataset::from_flat(1, vec![0.0, 2.0, 10.0, 12.0]).unwrap();
        assert_eq!(update_centers(&line, &[0, 0, 1, 1], 2), vec![vec![1.0], vec![11.0]]);
    }

    #[test]
    fn empty_cluster_moves_to_farthest_point() {
        let line = Dataset::from_flat(1, vec![0.0, 1.0, 9.0]).unwrap();
        let centers = update_centers(&line, &[0, 0, 0], 2);
        assert_eq!(centers, vec![vec![10.0 / 3.0], vec![9.0]]);
    }

    #[test]
    fn separable_blobs() {
        let mut raw = vec![[0.0, 0.0]; 5];
        raw.extend(vec![[10.0, 10.0]; 5]);
        let points = Dataset::from_points(&raw).unwrap();
        let m = lloyd(&points, 2, &mut ChaCha8Rng::seed_from_u64(0), LloydParams::default()).unwrap();
        let mut centers = m.centers.clone();
        centers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(centers, vec![vec![0.0, 0.0], vec![10.0, 10.0]]);
        assert_eq!(m.objective, 0.0);
        assert!(m.converged);
    }

    #[test]
    fn four_points_on_a_line() {
        let line = Dataset::from_flat(1, vec![0.0, 2.0, 10.0, 12.0]).unwrap();
        for seed in 0..20 {
            let m = lloyd(&line, 2, &mut ChaCha8Rng::seed_from_u64(seed), LloydParams::default()).unwrap();
            let mut c: Vec<f64> = m.centers.iter().map(|c| c[0]).collect();
            c.sort_by(f64::total_cmp);
            assert_eq!(c, vec![1.0, 11.0]);
            assert_eq!(m.objective, 4.0);
        }
    }

    #[test]
    fn k_equal_to_distinct_points_is_exact() {
        let p = Dataset::from_flat(2, vec![0.0, 0.0, 1.0, 5.0, 1.0, 5.0, 7.0, 2.0]).unwrap();
        let m = lloyd(&p, 3, &mut ChaCha8Rng::seed_from_u64(11), LloydParams::default()).unwrap();
        assert_eq!(m.objective, 0.0);
    }

    #[test]
    fn iteration_cap_keeps_labels_consistent() {
        let p = Dataset::from_flat(1, (0..40).map(|i| ((i * 37) % 23) as f64).collect()).unwrap();
        let params = LloydParams { max_iters: 1, tol: 0.0 };
        let m = lloyd(&p, 3, &mut ChaCha8Rng::seed_from_u64(5), params).unwrap();
        assert_eq!(m.iterations, 1);
        assert!((objective(&p, &m.labels, &m.centers) - m.objective).abs() < 1e-9);
        assert!(lloyd(&p, 3, &mut ChaCha8Rng::seed_from_u64(5), LloydParams { max_iters: 0, tol: 0.0 }).is_err());
        assert!(lloyd(&p, 3, &mut ChaCha8Rng::seed_from_u64(5), LloydParams { max_iters: 5, tol: -1.0 }).is_err());
    }
}
