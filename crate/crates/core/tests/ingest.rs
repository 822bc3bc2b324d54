mod common;

use std::collections::{BTreeSet, HashMap};

use learntag::ingest::{
    build_all_subsets, build_subset, discretize_time, generate_profiles, parse_ratings,
    write_ratings, RatingRecord,
};
use proptest::prelude::*;
use rand::seq::index::sample;
use rand::Rng;

/// 1000 data rows with ratings 1..=10, `bad` of them corrupted.
fn ratings_file_with_malformed(bad: usize, seed: u64) -> String {
    let mut rng = common::rng(seed);
    let corrupt: BTreeSet<usize> = sample(&mut rng, 1000, bad).into_iter().collect();
    let mut text = String::from("\"User-ID\";\"ISBN\";\"Book-Rating\"\n");
    for row in 0..1000 {
        let user = rng.random_range(1..5000);
        let isbn = format!("{:010}", rng.random_range(0..1_000_000u64));
        let rating = rng.random_range(1..=10);
        let line = if corrupt.contains(&row) {
            match row % 5 {
                0 => format!("\"{user}\";\"{isbn}\";\"seven\""),
                1 => format!("\"{user}\";\"{isbn}\""),
                2 => format!("\"{user}\";\"{isbn}\";\"11\""),
                3 => format!("\"\";\"{isbn}\";\"{rating}\""),
                _ => format!("\"{user}\";\"{isbn}\";\"{rating}\";\"extra\""),
            }
        } else {
            format!("\"{user}\";\"{isbn}\";\"{rating}\"")
        };
        text.push_str(&line);
        text.push('\n');
    }
    text
}

/// Line-by-line validator written without the csv crate.
fn count_valid_rows(text: &str) -> (usize, usize) {
    let mut valid = 0;
    let mut malformed = 0;
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(';').collect();
        let unquoted: Option<Vec<&str>> = fields
            .iter()
            .map(|f| f.strip_prefix('"').and_then(|f| f.strip_suffix('"')))
            .collect();
        let ok = match unquoted {
            Some(f) if f.len() == 3 => {
                !f[0].is_empty()
                    && !f[1].is_empty()
                    && f[2].parse::<u8>().is_ok_and(|r| (1..=10).contains(&r))
            }
            _ => false,
        };
        if ok {
            valid += 1;
        } else {
            malformed += 1;
        }
    }
    (valid, malformed)
}

#[test]
fn lenient_parse_counts_malformed_rows() {
    let text = ratings_file_with_malformed(37, 2024);
    let (valid, malformed) = count_valid_rows(&text);
    assert_eq!((valid, malformed), (963, 37));

    let parsed = parse_ratings(text.as_bytes(), false).unwrap();
    assert_eq!(parsed.records.len(), 963);
    assert_eq!(parsed.malformed, 37);
    assert_eq!(parsed.dropped_implicit, 0);
    assert!(parse_ratings(text.as_bytes(), true).is_err());
}

#[test]
fn synthesized_strategy_is_uniform() {
    let ids: Vec<String> = (0..10_000).map(|i| format!("u{i}")).collect();
    let profiles = generate_profiles(&ids, 42);
    let mut counts = [0usize; 5];
    for p in &profiles {
        counts[usize::from(p.strategy - 1)] += 1;
    }
    // binomial standard error sqrt(n p (1 - p)) = 40 around 2000
    let se = (10_000.0f64 * 0.2 * 0.8).sqrt();
    for c in counts {
        assert!((c as f64 - 2000.0).abs() <= 5.0 * se, "counts {counts:?}");
    }
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - 2000.0).powi(2) / 2000.0)
        .sum();
    // 99.9th percentile of chi-square with 4 degrees of freedom
    assert!(chi2 < 18.47, "chi2 {chi2}");
}

#[test]
fn subsets_match_a_linear_scan() {
    let ratings = common::corpus(3000, 400, 50_000, 11);
    let subsets = build_all_subsets(&ratings, 6).unwrap();

    let mut oracle: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for r in &ratings {
        let entry = oracle.entry(r.resource_id.as_str()).or_default();
        if r.rating >= 6 {
            entry.insert(r.learner_id.as_str());
        }
    }
    assert_eq!(subsets.len(), oracle.len());
    for s in &subsets {
        let expected = &oracle[s.resource_id.as_str()];
        assert_eq!(s.len(), expected.len(), "resource {}", s.resource_id);
        assert!(s.members.iter().all(|m| expected.contains(m.as_str())));
    }

    let single = build_subset(&ratings, &subsets[7].resource_id, 6).unwrap();
    assert_eq!(single, subsets[7]);
}

proptest! {
    #[test]
    fn ratings_round_trip(rows in prop::collection::vec(
        ("[0-9]{1,6}", "[0-9X]{10}", 1u8..=10),
        0..40,
    )) {
        let records: Vec<RatingRecord> = rows
            .into_iter()
            .map(|(u, r, v)| RatingRecord::new(u, r, v))
            .collect();
        let mut buf = Vec::new();
        write_ratings(&mut buf, &records).unwrap();
        let parsed = parse_ratings(&buf[..], true).unwrap();
        prop_assert_eq!(parsed.records, records);
    }

    #[test]
    fn time_bin_contains_its_hours(h in 1u32..100_000) {
        let bin = discretize_time(h).unwrap();
        prop_assert!(bin.lower <= h && h <= bin.upper);
        prop_assert_eq!(bin.upper, bin.lower + 9);
        prop_assert_eq!(bin.lower % 10, 1);
    }

    #[test]
    fn generated_profiles_respect_constraints(seed in any::<u64>()) {
        let ids: Vec<String> = (0..50).map(|i| i.to_string()).collect();
        let profiles = generate_profiles(&ids, seed);
        prop_assert_eq!(&profiles, &generate_profiles(&ids, seed));
        for p in profiles {
            prop_assert!(p.target_skill > p.current_skill);
            prop_assert!((1..=60).contains(&p.learning_time));
        }
    }
}
