mod common;

use std::collections::{BTreeSet, HashMap, HashSet};

use learntag::ingest::{build_all_subsets, generate_profiles, LearnerProfile, LearnerSubset};
use learntag::quantify::{
    attribute_values, build_cooccurrence, derive_orderings, nmf_matrix, pair_report,
    quantify_attribute, symmetrize, FactorPair, NmfParams, NominalAttribute, SimilarityMatrix,
};
use ndarray::Array2;
use rand::Rng;

fn random_instance(
    learners: usize,
    subsets: usize,
    seed: u64,
) -> (Vec<LearnerSubset>, HashMap<String, LearnerProfile>) {
    let ids: Vec<String> = (0..learners).map(|i| format!("l{i:03}")).collect();
    let profiles: HashMap<_, _> = generate_profiles(&ids, seed)
        .into_iter()
        .map(|p| (p.learner_id.clone(), p))
        .collect();
    let mut rng = common::rng(seed ^ 0xfeed);
    let subsets = (0..subsets)
        .map(|s| {
            let size = rng.random_range(0..30);
            LearnerSubset {
                resource_id: format!("r{s}"),
                members: (0..size)
                    .map(|_| ids[rng.random_range(0..learners)].clone())
                    .collect(),
            }
        })
        .collect();
    (subsets, profiles)
}

/// Enumerates every unordered learner pair and checks for a shared subset.
fn brute_force_pairs(
    subsets: &[LearnerSubset],
    profiles: &HashMap<String, LearnerProfile>,
    attribute: NominalAttribute,
) -> [[u64; 5]; 5] {
    let learners: Vec<&String> = subsets
        .iter()
        .flat_map(|s| s.members.iter())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut counts = [[0u64; 5]; 5];
    for (i, u) in learners.iter().enumerate() {
        for v in &learners[i + 1..] {
            let share = subsets
                .iter()
                .any(|s| s.members.contains(*u) && s.members.contains(*v));
            if share {
                let p = usize::from(attribute.of(&profiles[*u]) - 1);
                let q = usize::from(attribute.of(&profiles[*v]) - 1);
                counts[p][q] += 1;
                if p != q {
                    counts[q][p] += 1;
                }
            }
        }
    }
    counts
}

#[test]
fn cooccurrence_matches_pair_enumeration() {
    for seed in 0..5 {
        let (subsets, profiles) = random_instance(200, 20, seed);
        for attribute in NominalAttribute::ALL {
            let a = build_cooccurrence(&subsets, &profiles, attribute).unwrap();
            assert_eq!(a.entries, brute_force_pairs(&subsets, &profiles, attribute));
        }
    }
    let (subsets, profiles) = random_instance(300, 25, 99);
    let a = build_cooccurrence(&subsets, &profiles, NominalAttribute::Presentation).unwrap();
    assert_eq!(
        a.entries,
        brute_force_pairs(&subsets, &profiles, NominalAttribute::Presentation)
    );
}

fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random::<f64>() * scale)
}

#[test]
fn nmf_error_never_increases() {
    let mut rng = common::rng(7);
    for run in 0..100 {
        let a = random_matrix(&mut rng, 5, 5, 100.0);
        let params = NmfParams {
            k: 10,
            max_iters: 200,
            tol: 0.0,
            seed: run,
        };
        let f = nmf_matrix(&a, &params).unwrap();
        let slack = 1e-9 * f.error_trace[0];
        for w in f.error_trace.windows(2) {
            assert!(w[1] <= w[0] + slack, "run {run}: {} -> {}", w[0], w[1]);
        }
        assert!(f.weights.iter().chain(f.features.iter()).all(|&x| x >= 0.0));
        assert_eq!(f, nmf_matrix(&a, &params).unwrap());
    }
}

#[test]
fn nmf_stops_on_tolerance() {
    let mut rng = common::rng(8);
    let a = random_matrix(&mut rng, 5, 5, 10.0);
    let f = nmf_matrix(
        &a,
        &NmfParams {
            k: 2,
            max_iters: 10_000,
            tol: 1e-3,
            seed: 1,
        },
    )
    .unwrap();
    let n = f.error_trace.len();
    assert!(n < 10_001);
    let last = (f.error_trace[n - 2] - f.error_trace[n - 1]) / f.error_trace[n - 2];
    assert!(last < 1e-3);
}

#[test]
fn ordering_rows_come_from_features() {
    let mut rng = common::rng(9);
    for _ in 0..50 {
        let factors = FactorPair {
            weights: random_matrix(&mut rng, 5, 10, 1.0),
            features: random_matrix(&mut rng, 10, 5, 1.0),
            k: 10,
            final_error: 0.0,
            error_trace: vec![],
        };
        let d = derive_orderings(&factors);
        let feature_rows: Vec<Vec<f64>> = factors
            .features
            .rows()
            .into_iter()
            .map(|r| r.to_vec())
            .collect();
        for (i, row) in d.entries.rows().into_iter().enumerate() {
            let row = row.to_vec();
            assert!(feature_rows.contains(&row));
            // and it is the row of the largest weight
            let w = factors.weights.row(i);
            let best = (0..10).fold(0, |b, f| if w[f] > w[b] { f } else { b });
            assert_eq!(row, feature_rows[best]);
        }
    }
}

#[test]
fn symmetrize_is_symmetric_and_idempotent() {
    let mut rng = common::rng(10);
    for _ in 0..1000 {
        let d = SimilarityMatrix {
            entries: random_matrix(&mut rng, 5, 5, 50.0),
        };
        let s = symmetrize(&d).unwrap();
        assert_eq!(s.entries, s.entries.t());
        assert!(s.entries.iter().zip(d.entries.iter()).all(|(a, b)| a <= b));
        assert_eq!(symmetrize(&s).unwrap(), s);
    }
}

#[test]
fn values_are_row_means() {
    let mut rng = common::rng(11);
    let raw = SimilarityMatrix {
        entries: random_matrix(&mut rng, 5, 5, 1000.0),
    };
    let sym = symmetrize(&raw).unwrap();
    let values = attribute_values(&sym).unwrap();
    for (p, v) in values.iter() {
        let row = usize::from(p - 1);
        let mut total = 0.0;
        for j in 0..5 {
            total += sym.entries[[row, j]];
        }
        assert!((v - total / 5.0).abs() <= 1e-12 * total.max(1.0));
    }
}

#[test]
fn quantification_is_deterministic_and_reports_extremes() {
    let ratings = common::corpus(400, 40, 6000, 5);
    let profiles = common::profiles_for(&ratings, 5);
    let subsets = build_all_subsets(&ratings, 6).unwrap();
    let params = NmfParams::default();
    let a = quantify_attribute(&subsets, &profiles, NominalAttribute::Strategy, &params).unwrap();
    let b = quantify_attribute(&subsets, &profiles, NominalAttribute::Strategy, &params).unwrap();
    assert_eq!(a, b);

    let vals: Vec<(u8, f64)> = a.values.iter().collect();
    let mut distances = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            distances.push(((vals[i].0, vals[j].0), (vals[i].1 - vals[j].1).abs()));
        }
    }
    let min = distances.iter().map(|d| d.1).fold(f64::INFINITY, f64::min);
    let max = distances.iter().map(|d| d.1).fold(0.0, f64::max);
    let report = pair_report(&a.values);
    let nearest: HashSet<_> = distances
        .iter()
        .filter(|d| d.1 == min)
        .map(|d| d.0)
        .collect();
    let farthest: HashSet<_> = distances
        .iter()
        .filter(|d| d.1 == max)
        .map(|d| d.0)
        .collect();
    assert_eq!(
        report.nearest.iter().copied().collect::<HashSet<_>>(),
        nearest
    );
    assert_eq!(
        report.farthest.iter().copied().collect::<HashSet<_>>(),
        farthest
    );
    assert!(a.values.iter().all(|(_, v)| v > 0.0));
}
