use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::registry::ParamsExt;
use super::{
    pin_feature_vectors, AnalysisError, AnalysisResult, AnalysisTool, Matrix, ParamKind, ParamSpec, ParamValue,
    Params, Result, Series, Table,
};
use crate::model::AssemblyView;

pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    /// Cluster index per point.
    pub assignments: Vec<usize>,
    /// `k x d` centroids; `assignments` are nearest-centroid for these.
    pub centroids: Matrix,
    /// Sum of squared distances from each point to its centroid.
    pub inertia: f64,
    /// Update steps performed.
    pub iterations: usize,
    /// Inertia after the initial assignment and after every update step.
    pub history: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid, ties to the lowest index.
fn nearest(point: &[f64], centroids: &Matrix) -> (usize, f64) {
    let mut best = (0, sq_dist(point, centroids.row(0)));
    for j in 1..centroids.rows() {
        let d = sq_dist(point, centroids.row(j));
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// k-means++ seeding.
fn seed_centroids(points: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let n = points.rows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), points.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    acc += w;
                    pick = Some(i);
                    if acc > target {
                        break;
                    }
                }
            }
            pick.expect("positive total weight")
        } else {
            // every point coincides with a chosen center
            let rest: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            rest[rng.random_range(0..rest.len())]
        };
        chosen.push(next);
        for (i, w) in d2.iter_mut().enumerate() {
            *w = w.min(sq_dist(points.row(i), points.row(next)));
        }
    }
    let mut c = Matrix::zeros(k, points.cols());
    for (j, &i) in chosen.iter().enumerate() {
        c.row_mut(j).copy_from_slice(points.row(i));
    }
    c
}

/// Assigns every point to its nearest centroid, then gives each empty
/// cluster the point farthest from its own centroid among clusters that
/// can spare one, moving the empty cluster's centroid onto that point.
/// Returns the inertia and whether any cluster was repaired.
fn assign(points: &Matrix, centroids: &mut Matrix, assignments: &mut [usize]) -> (f64, bool) {
    let n = points.rows();
    let k = centroids.rows();
    let mut dist = vec![0.0; n];
    let mut counts = vec![0usize; k];
    for i in 0..n {
        let (j, d) = nearest(points.row(i), centroids);
        assignments[i] = j;
        dist[i] = d;
        counts[j] += 1;
    }
    let mut repaired = false;
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        repaired = true;
        let victim = (0..n)
            .filter(|&i| counts[assignments[i]] > 1)
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if dist[b] >= dist[i] => Some(b),
                _ => Some(i),
            })
            .expect("k <= n leaves a cluster with a spare point");
        counts[assignments[victim]] -= 1;
        counts[empty] = 1;
        assignments[victim] = empty;
        dist[victim] = 0.0;
        let p = points.row(victim).to_vec();
        centroids.row_mut(empty).copy_from_slice(&p);
    }
    (dist.iter().sum(), repaired)
}

fn update(points: &Matrix, assignments: &[usize], k: usize) -> Matrix {
    let mut sums = Matrix::zeros(k, points.cols());
    let mut counts = vec![0usize; k];
    for (i, &j) in assignments.iter().enumerate() {
        counts[j] += 1;
        for (s, x) in sums.row_mut(j).iter_mut().zip(points.row(i)) {
            *s += x;
        }
    }
    for (j, &n) in counts.iter().enumerate() {
        for s in sums.row_mut(j) {
            *s /= n as f64;
        }
    }
    sums
}

/// Lloyd's algorithm with k-means++ seeding from `seed`.
///
/// Stops when an update leaves the assignments unchanged or after
/// `max_iter` updates. Deterministic in `(points, k, seed, max_iter)`.
pub fn kmeans(points: &Matrix, k: usize, seed: u64, max_iter: usize) -> Result<KMeansFit> {
    let n = points.rows();
    if points.cols() == 0 {
        return Err(AnalysisError::InvalidArgument("points need at least one dimension".into()));
    }
    if k == 0 || k > n {
        return Err(AnalysisError::InvalidArgument(format!("k = {k} must be within 1..={n}")));
    }
    if let Some(i) = points.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(AnalysisError::InvalidArgument(format!(
            "point {} has a non-finite coordinate",
            i / points.cols()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(points, k, &mut rng);
    let mut assignments = vec![0; n];
    let mut history = vec![assign(points, &mut centroids, &mut assignments).0];
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut next_centroids = update(points, &assignments, k);
        let mut next = vec![0; n];
        let (inertia, repaired) = assign(points, &mut next_centroids, &mut next);
        history.push(inertia);
        centroids = next_centroids;
        let converged = !repaired && next == assignments;
        assignments = next;
        if converged {
            break;
        }
    }
    Ok(KMeansFit {
        assignments,
        centroids,
        inertia: *history.last().expect("initial inertia"),
        iterations,
        history,
    })
}

/// Registry adapter: clusters the pins of one assembly by their axial
/// profiles of a feature.
#[derive(Debug, Clone, Copy, Default)]
pub struct KMeansTool;

impl AnalysisTool for KMeansTool {
    fn name(&self) -> &str {
        "kmeans"
    }

    fn description(&self) -> &str {
        "k-means clustering of pin axial profiles for triage"
    }

    fn params(&self) -> Vec<ParamSpec> {
        vec![
            ParamSpec::new("feature", ParamKind::Str, ParamValue::Str("Axial Power".into()), "feature to cluster on"),
            ParamSpec::new("k", ParamKind::Int, ParamValue::Int(3), "number of clusters"),
            ParamSpec::new("seed", ParamKind::Int, ParamValue::Int(0), "seed for k-means++ initialization"),
            ParamSpec::new(
                "max_iter",
                ParamKind::Int,
                ParamValue::Int(DEFAULT_MAX_ITER as i64),
                "maximum update steps",
            ),
            ParamSpec::new("time", ParamKind::Float, ParamValue::Float(0.0), "time in seconds"),
        ]
    }

    fn run(&self, assemblies: &[AssemblyView<'_>], params: &Params) -> Result<AnalysisResult> {
        let [view] = assemblies else {
            return Err(AnalysisError::InvalidArgument(format!(
                "kmeans takes one assembly, got {}",
                assemblies.len()
            )));
        };
        let non_negative = |name: &str| {
            usize::try_from(params.int_param(name))
                .map_err(|_| AnalysisError::InvalidArgument(format!("{name} must be non-negative")))
        };
        let (k, max_iter) = (non_negative("k")?, non_negative("max_iter")?);
        let seed = params.int_param("seed") as u64;
        let (labels, points) = pin_feature_vectors(view, params.str_param("feature"), params.float_param("time"))?;
        let fit = kmeans(&points, k, seed, max_iter)?;

        let mut result = AnalysisResult::new("kmeans");
        let assigned = Matrix::new(labels.len(), 1, fit.assignments.iter().map(|&a| a as f64).collect())?;
        result
            .tables
            .push(Table::new("assignments", labels.clone(), vec!["cluster".into()], assigned)?);
        let cluster_labels = (0..k).map(|j| j.to_string()).collect();
        let level_labels = (1..=points.cols()).map(|j| j.to_string()).collect();
        result
            .tables
            .push(Table::new("centroids", cluster_labels, level_labels, fit.centroids.clone())?);
        result.series.push(Series::new(
            "inertia",
            fit.history.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect(),
        ));
        let mut csv = String::from("pin,cluster\n");
        for (label, a) in labels.iter().zip(&fit.assignments) {
            let _ = writeln!(csv, "{label},{a}");
        }
        result.add_artifact("kmeans.csv", csv.into_bytes())?;
        Ok(result)
    }
}
