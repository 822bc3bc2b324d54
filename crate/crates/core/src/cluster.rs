//! Grouping of a resource's learners in the 5-D attribute space.
//!
//! Points are min-max normalized, seeded by farthest-first traversal and
//! refined with Lloyd iterations. The number of clusters is lowered from
//! `k_max` until the average cluster diameter jumps by more than `gamma`.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{LearnerProfile, LearnerSubset};
use crate::quantify::AttributeValueMap;

pub const DIMS: usize = 5;

/// Axis names in coordinate order.
pub const AXIS_NAMES: [&str; DIMS] = [
    "Current skill",
    "Target skill",
    "Learning strategy",
    "Presentation style",
    "Learning time",
];

pub type Coords = [f64; DIMS];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePoint {
    pub learner_id: String,
    /// `(a1, a2, value(a3), value(a4), a5 hours)`
    pub coords: Coords,
}

pub fn squared_distance(a: &Coords, b: &Coords) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn distance(a: &Coords, b: &Coords) -> f64 {
    squared_distance(a, b).sqrt()
}

pub fn to_feature_points(
    subset: &LearnerSubset,
    profiles: &HashMap<String, LearnerProfile>,
    strategy_values: &AttributeValueMap,
    presentation_values: &AttributeValueMap,
) -> Result<Vec<FeaturePoint>> {
    subset
        .members
        .iter()
        .map(|id| {
            let p = profiles
                .get(id)
                .ok_or_else(|| Error::MissingProfile(id.clone()))?;
            let strategy = strategy_values
                .get(p.strategy)
                .ok_or(Error::MissingValue(p.strategy))?;
            let presentation = presentation_values
                .get(p.presentation)
                .ok_or(Error::MissingValue(p.presentation))?;
            Ok(FeaturePoint {
                learner_id: id.clone(),
                coords: [
                    f64::from(p.current_skill),
                    f64::from(p.target_skill),
                    strategy,
                    presentation,
                    f64::from(p.learning_time),
                ],
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationSpec {
    pub min: Coords,
    pub max: Coords,
}

impl NormalizationSpec {
    /// Maps `coords` into `[0, 1]` per dimension; a constant dimension maps to 0.
    pub fn apply(&self, coords: &Coords) -> Coords {
        let mut out = [0.0; DIMS];
        for d in 0..DIMS {
            let span = self.max[d] - self.min[d];
            out[d] = if span > 0.0 {
                ((coords[d] - self.min[d]) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
        }
        out
    }
}

pub fn fit_normalization(points: &[FeaturePoint]) -> Result<NormalizationSpec> {
    if points.is_empty() {
        return Err(Error::NoPoints);
    }
    let mut spec = NormalizationSpec {
        min: [f64::INFINITY; DIMS],
        max: [f64::NEG_INFINITY; DIMS],
    };
    for p in points {
        for d in 0..DIMS {
            spec.min[d] = spec.min[d].min(p.coords[d]);
            spec.max[d] = spec.max[d].max(p.coords[d]);
        }
    }
    Ok(spec)
}

pub fn apply_normalization(points: &[FeaturePoint], spec: &NormalizationSpec) -> Vec<FeaturePoint> {
    points
        .iter()
        .map(|p| FeaturePoint {
            learner_id: p.learner_id.clone(),
            coords: spec.apply(&p.coords),
        })
        .collect()
}

/// Indices of `k` seeds. The first is drawn with `seed`; each following seed
/// maximizes its distance to the nearest chosen seed, ties going to the
/// smallest learner id.
pub fn farthest_first_seeds(points: &[FeaturePoint], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 || k > points.len() {
        return Err(Error::InsufficientPoints {
            wanted: k,
            available: points.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.random_range(0..points.len());
    let mut chosen = vec![first];
    let mut taken = vec![false; points.len()];
    taken[first] = true;
    let mut nearest: Vec<f64> = points
        .iter()
        .map(|p| distance(&p.coords, &points[first].coords))
        .collect();

    while chosen.len() < k {
        let mut best: Option<usize> = None;
        for (i, p) in points.iter().enumerate() {
            if taken[i] {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(b)
                    if nearest[i] > nearest[b]
                        || (nearest[i] == nearest[b] && p.learner_id < points[b].learner_id) =>
                {
                    Some(i)
                }
                keep => keep,
            };
        }
        let next = best.expect("k <= points");
        taken[next] = true;
        chosen.push(next);
        for (i, p) in points.iter().enumerate() {
            nearest[i] = nearest[i].min(distance(&p.coords, &points[next].coords));
        }
    }
    Ok(chosen)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub k: usize,
    pub centroids: Vec<Coords>,
    /// Cluster index of each input point, aligned with the point slice.
    pub assignment: Vec<usize>,
    /// Sum of squared distances to the assigned centroids.
    pub sse: f64,
    /// Centroid updates performed.
    pub iterations: usize,
    /// SSE at the seeds, after every update, and at the final assignment.
    pub sse_trace: Vec<f64>,
}

impl Clustering {
    /// Point indices per cluster.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }
}

/// Nearest centroid, ties to the lowest index.
pub fn nearest_centroid(coords: &Coords, centroids: &[Coords]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d = squared_distance(coords, centroid);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

fn assign(points: &[FeaturePoint], centroids: &[Coords], assignment: &mut [usize]) -> bool {
    let mut changed = false;
    for (p, slot) in points.iter().zip(assignment.iter_mut()) {
        let c = nearest_centroid(&p.coords, centroids);
        if *slot != c {
            *slot = c;
            changed = true;
        }
    }
    changed
}

fn sse(points: &[FeaturePoint], centroids: &[Coords], assignment: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| squared_distance(&p.coords, &centroids[c]))
        .sum()
}

/// Moves the point farthest from its centroid into each empty cluster. Only
/// points from clusters with two or more members are eligible.
fn repair_empty(points: &[FeaturePoint], centroids: &mut [Coords], assignment: &mut [usize]) {
    let k = centroids.len();
    let mut sizes = vec![0usize; k];
    for &c in assignment.iter() {
        sizes[c] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut far: Option<(usize, f64)> = None;
        for (i, p) in points.iter().enumerate() {
            let c = assignment[i];
            if sizes[c] < 2 {
                continue;
            }
            let d = squared_distance(&p.coords, &centroids[c]);
            if d > 0.0 && far.is_none_or(|(_, best)| d > best) {
                far = Some((i, d));
            }
        }
        if let Some((i, _)) = far {
            sizes[assignment[i]] -= 1;
            sizes[empty] = 1;
            assignment[i] = empty;
            centroids[empty] = points[i].coords;
        }
    }
}

fn update_means(points: &[FeaturePoint], centroids: &mut [Coords], assignment: &[usize]) {
    let k = centroids.len();
    let mut sums = vec![[0.0; DIMS]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assignment) {
        counts[c] += 1;
        for (sum, x) in sums[c].iter_mut().zip(&p.coords) {
            *sum += x;
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            for d in 0..DIMS {
                centroids[c][d] = sums[c][d] / counts[c] as f64;
            }
        }
    }
}

/// Lloyd iterations from the given seed points until no assignment changes or
/// `max_iters` updates have run.
pub fn lloyd_kmeans(
    points: &[FeaturePoint],
    seeds: &[usize],
    max_iters: usize,
) -> Result<Clustering> {
    if points.is_empty() {
        return Err(Error::NoPoints);
    }
    if seeds.is_empty() || max_iters == 0 {
        return Err(Error::InvalidArgument(
            "k-means needs at least one seed and one iteration".into(),
        ));
    }
    if seeds.iter().any(|&s| s >= points.len()) {
        return Err(Error::InvalidArgument("seed index out of range".into()));
    }
    let distinct: BTreeSet<usize> = seeds.iter().copied().collect();
    if distinct.len() != seeds.len() {
        return Err(Error::InvalidArgument("seeds must be distinct".into()));
    }

    let mut centroids: Vec<Coords> = seeds.iter().map(|&s| points[s].coords).collect();
    let mut assignment = vec![usize::MAX; points.len()];
    assign(points, &centroids, &mut assignment);
    let mut trace = vec![sse(points, &centroids, &assignment)];
    let mut iterations = 0;

    loop {
        repair_empty(points, &mut centroids, &mut assignment);
        update_means(points, &mut centroids, &assignment);
        iterations += 1;
        trace.push(sse(points, &centroids, &assignment));
        let changed = assign(points, &centroids, &mut assignment);
        if !changed || iterations >= max_iters {
            break;
        }
    }

    let final_sse = sse(points, &centroids, &assignment);
    trace.push(final_sse);
    Ok(Clustering {
        k: centroids.len(),
        centroids,
        assignment,
        sse: final_sse,
        iterations,
        sse_trace: trace,
    })
}

/// Largest pairwise distance within each non-empty cluster, averaged over
/// those clusters. Clusters of one point have diameter 0.
pub fn average_diameter(clustering: &Clustering, points: &[FeaturePoint]) -> f64 {
    let mut total = 0.0;
    let mut non_empty = 0usize;
    for members in clustering.members() {
        if members.is_empty() {
            continue;
        }
        non_empty += 1;
        let mut diameter: f64 = 0.0;
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                diameter = diameter.max(squared_distance(&points[i].coords, &points[j].coords));
            }
        }
        total += diameter.sqrt();
    }
    if non_empty == 0 {
        0.0
    } else {
        total / non_empty as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSelectParams {
    pub k_max: usize,
    /// Ratio above which a diameter increase counts as a jump; must exceed 1.
    pub gamma: f64,
    pub seed: u64,
    pub max_iters: usize,
}

impl Default for KSelectParams {
    fn default() -> Self {
        KSelectParams {
            k_max: 8,
            gamma: 2.0,
            seed: 0,
            max_iters: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KTrace {
    pub k: usize,
    pub sse: f64,
    pub avg_diameter: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KSelection {
    pub clustering: Clustering,
    /// One entry per `k` evaluated, in evaluation (descending) order.
    pub trace: Vec<KTrace>,
}

/// Seed used for the seeding run at a given `k`.
pub fn seed_for_k(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn is_jump(from: f64, to: f64, gamma: f64) -> bool {
    if from == 0.0 {
        to > 0.0
    } else {
        to > gamma * from
    }
}

/// Lowers `k` from `min(k_max, n)` and stops at the first `k` whose step to
/// `k - 1` multiplies the average diameter by more than `gamma`.
pub fn select_k(points: &[FeaturePoint], params: &KSelectParams) -> Result<KSelection> {
    if points.is_empty() {
        return Err(Error::NoPoints);
    }
    if params.k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    if params.gamma.is_nan() || params.gamma <= 1.0 {
        return Err(Error::InvalidArgument("gamma must exceed 1".into()));
    }
    let run = |k: usize| -> Result<(Clustering, KTrace)> {
        let seeds = farthest_first_seeds(points, k, seed_for_k(params.seed, k))?;
        let clustering = lloyd_kmeans(points, &seeds, params.max_iters)?;
        let trace = KTrace {
            k,
            sse: clustering.sse,
            avg_diameter: average_diameter(&clustering, points),
        };
        Ok((clustering, trace))
    };

    let mut k = params.k_max.min(points.len());
    let (mut current, first) = run(k)?;
    let mut trace = vec![first];
    while k > 1 {
        let (smaller, t) = run(k - 1)?;
        let jump = is_jump(
            trace.last().unwrap().avg_diameter,
            t.avg_diameter,
            params.gamma,
        );
        trace.push(t);
        if jump {
            break;
        }
        current = smaller;
        k -= 1;
    }
    Ok(KSelection {
        clustering: current,
        trace,
    })
}

/// Learner ids of the most populous cluster; ties go to the cluster holding
/// the smallest learner id.
pub fn largest_cluster(clustering: &Clustering, points: &[FeaturePoint]) -> BTreeSet<String> {
    let members = clustering.members();
    let best = members
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(c, m)| {
            let min_id = m
                .iter()
                .map(|&i| points[i].learner_id.as_str())
                .min()
                .unwrap();
            (c, m.len(), min_id)
        })
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.2.cmp(a.2)))
        .map(|(c, _, _)| c);
    match best {
        Some(c) => members[c]
            .iter()
            .map(|&i| points[i].learner_id.clone())
            .collect(),
        None => BTreeSet::new(),
    }
}
