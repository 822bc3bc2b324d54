//! Seeded synthetic rating corpora in the Book-Crossing shape.
//!
//! Used for tests, benchmarks and the scale checks; real runs read rating files.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::RatingRecord;

/// Explicit rating weights for 1..=10, skewed high like the public dataset.
const RATING_WEIGHTS: [u32; 10] = [2, 2, 3, 4, 9, 9, 15, 21, 17, 18];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub learners: usize,
    pub resources: usize,
    pub ratings: usize,
    /// Fraction of rows emitted with rating 0.
    pub implicit_fraction: f64,
    /// Popularity skew: resource of rank `r` has weight `1 / (r + 1)^skew`.
    pub skew: f64,
    pub seed: u64,
}

impl SyntheticCorpus {
    pub fn new(learners: usize, resources: usize, ratings: usize, seed: u64) -> Self {
        SyntheticCorpus {
            learners,
            resources,
            ratings,
            implicit_fraction: 0.0,
            skew: 0.0,
            seed,
        }
    }

    pub fn learner_id(index: usize) -> String {
        (index + 1).to_string()
    }

    pub fn resource_id(index: usize) -> String {
        isbn10(index as u64)
    }

    /// Generates `ratings` rows. Pairs may repeat, as in raw exports.
    pub fn generate(&self) -> Vec<RatingRecord> {
        if self.learners == 0 || self.resources == 0 {
            return Vec::new();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let popularity =
            WeightedIndex::new((0..self.resources).map(|r| (r as f64 + 1.0).powf(-self.skew)))
                .expect("positive weights");
        let rating = WeightedIndex::new(RATING_WEIGHTS).expect("positive weights");
        let resource_ids: Vec<String> = (0..self.resources).map(Self::resource_id).collect();

        (0..self.ratings)
            .map(|_| {
                let learner = rng.random_range(0..self.learners);
                let resource = popularity.sample(&mut rng);
                let value = if rng.random_bool(self.implicit_fraction.clamp(0.0, 1.0)) {
                    0
                } else {
                    rating.sample(&mut rng) as u8 + 1
                };
                RatingRecord::new(
                    Self::learner_id(learner),
                    resource_ids[resource].clone(),
                    value,
                )
            })
            .collect()
    }
}

/// A valid ISBN-10 token for a serial number (mod 10^9).
pub fn isbn10(serial: u64) -> String {
    let body = format!("{:09}", serial % 1_000_000_000);
    let sum: u32 = body
        .bytes()
        .enumerate()
        .map(|(i, b)| (10 - i as u32) * u32::from(b - b'0'))
        .sum();
    let check = (11 - sum % 11) % 11;
    let check = if check == 10 {
        'X'
    } else {
        char::from_digit(check, 10).unwrap()
    };
    format!("{body}{check}")
}
