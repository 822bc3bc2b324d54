#![allow(dead_code)]

use std::collections::HashMap;

use learntag::cluster::FeaturePoint;
use learntag::ingest::{generate_profiles, learner_ids, LearnerProfile, RatingRecord};
use learntag::synth::SyntheticCorpus;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn corpus(learners: usize, resources: usize, ratings: usize, seed: u64) -> Vec<RatingRecord> {
    SyntheticCorpus::new(learners, resources, ratings, seed).generate()
}

pub fn profiles_for(ratings: &[RatingRecord], seed: u64) -> HashMap<String, LearnerProfile> {
    generate_profiles(&learner_ids(ratings), seed)
        .into_iter()
        .map(|p| (p.learner_id.clone(), p))
        .collect()
}

pub fn random_points(n: usize, seed: u64) -> Vec<FeaturePoint> {
    let mut rng = rng(seed);
    (0..n)
        .map(|i| FeaturePoint {
            learner_id: format!("p{i:04}"),
            coords: std::array::from_fn(|_| rng.random::<f64>()),
        })
        .collect()
}

/// `blobs` tight groups of `per_blob` points, centers on distinct unit-cube corners.
pub fn blobs(blobs: usize, per_blob: usize, radius: f64, seed: u64) -> Vec<FeaturePoint> {
    let corners: [[f64; 5]; 4] = [
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 1.0, 1.0],
    ];
    let mut rng = rng(seed);
    let mut out = Vec::new();
    for (b, center) in corners.iter().take(blobs).enumerate() {
        for i in 0..per_blob {
            let coords = std::array::from_fn(|d| center[d] + rng.random_range(-radius..=radius));
            out.push(FeaturePoint {
                learner_id: format!("b{b}-{i:03}"),
                coords,
            });
        }
    }
    out
}
