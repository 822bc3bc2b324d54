//! Rating and profile ingestion, seeded profile synthesis and learner subsets.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RATINGS_HEADER: [&str; 3] = ["User-ID", "ISBN", "Book-Rating"];
pub const PROFILES_HEADER: [&str; 6] = ["learner_id", "a1", "a2", "a3", "a4", "a5_hours"];

/// Highest skill level for `a1`/`a2`.
pub const MAX_SKILL: u8 = 6;
/// Number of parameters of each nominal attribute (`a3`, `a4`).
pub const NOMINAL_LEVELS: u8 = 5;
/// Upper bound of synthesized learning time, in hours.
pub const MAX_SYNTH_HOURS: u32 = 60;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatingRecord {
    pub learner_id: String,
    pub resource_id: String,
    pub rating: u8,
}

impl RatingRecord {
    pub fn new(learner_id: impl Into<String>, resource_id: impl Into<String>, rating: u8) -> Self {
        RatingRecord {
            learner_id: learner_id.into(),
            resource_id: resource_id.into(),
            rating,
        }
    }
}

/// One learner's five profile attributes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LearnerProfile {
    pub learner_id: String,
    /// `a1`, 1..=6.
    pub current_skill: u8,
    /// `a2`, 1..=6 and strictly above `current_skill`.
    pub target_skill: u8,
    /// `a3`, nominal 1..=5.
    pub strategy: u8,
    /// `a4`, nominal 1..=5.
    pub presentation: u8,
    /// `a5`, hours.
    pub learning_time: u32,
}

impl LearnerProfile {
    pub fn new(
        learner_id: impl Into<String>,
        current_skill: u8,
        target_skill: u8,
        strategy: u8,
        presentation: u8,
        learning_time: u32,
    ) -> Result<Self, String> {
        let profile = LearnerProfile {
            learner_id: learner_id.into(),
            current_skill,
            target_skill,
            strategy,
            presentation,
            learning_time,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.learner_id.is_empty() {
            return Err("learner_id is empty".into());
        }
        let skill = 1..=MAX_SKILL;
        let nominal = 1..=NOMINAL_LEVELS;
        if !skill.contains(&self.current_skill) {
            return Err(format!("a1 must be in 1..{MAX_SKILL}"));
        }
        if !skill.contains(&self.target_skill) {
            return Err(format!("a2 must be in 1..{MAX_SKILL}"));
        }
        if self.target_skill <= self.current_skill {
            return Err("a2 must exceed a1".into());
        }
        if !nominal.contains(&self.strategy) {
            return Err(format!("a3 must be in 1..{NOMINAL_LEVELS}"));
        }
        if !nominal.contains(&self.presentation) {
            return Err(format!("a4 must be in 1..{NOMINAL_LEVELS}"));
        }
        if self.learning_time < 1 {
            return Err("time must be positive".into());
        }
        Ok(())
    }

    pub fn time_bin(&self) -> TimeBin {
        // validate() guarantees learning_time >= 1
        TimeBin::containing(self.learning_time.max(1)).expect("positive hours")
    }
}

/// A decade-wide learning time range, `[1-10]`, `[11-20]`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimeBin {
    pub lower: u32,
    pub upper: u32,
}

impl TimeBin {
    pub fn containing(hours: u32) -> Result<Self> {
        if hours < 1 {
            return Err(Error::NonPositiveTime);
        }
        let lower = (hours - 1) / 10 * 10 + 1;
        Ok(TimeBin {
            lower,
            upper: lower + 9,
        })
    }

    /// The bin starting at `lower`, which must be of the form `10n + 1`.
    pub fn from_lower(lower: u32) -> Option<Self> {
        (lower >= 1 && (lower - 1).is_multiple_of(10)).then_some(TimeBin {
            lower,
            upper: lower + 9,
        })
    }

    pub fn contains(&self, hours: u32) -> bool {
        (self.lower..=self.upper).contains(&hours)
    }
}

impl fmt::Display for TimeBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}-{}]", self.lower, self.upper)
    }
}

pub fn discretize_time(hours: u32) -> Result<TimeBin> {
    TimeBin::containing(hours)
}

/// The learners that rated one resource at or above the threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnerSubset {
    pub resource_id: String,
    pub members: BTreeSet<String>,
}

impl LearnerSubset {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedRatings {
    pub records: Vec<RatingRecord>,
    /// Rows with rating 0 (implicit interactions).
    pub dropped_implicit: usize,
    pub malformed: usize,
}

/// Ids are decoded byte-for-byte (Latin-1), never transcoded.
fn decode_id(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| b as char).collect()
}

fn encode_id(id: &str) -> Vec<u8> {
    id.chars()
        .map(|c| u8::try_from(u32::from(c)).unwrap_or(b'?'))
        .collect()
}

fn check_header<'a>(
    found: impl Iterator<Item = &'a [u8]>,
    expected: &[&str],
    delimiter: char,
) -> Result<()> {
    let found: Vec<String> = found.map(decode_id).collect();
    if found.len() != expected.len() || found.iter().zip(expected).any(|(f, e)| f != e) {
        return Err(Error::Header {
            expected: expected.join(&delimiter.to_string()),
            found: found.join(&delimiter.to_string()),
        });
    }
    Ok(())
}

fn classify_rating_row(record: &csv::ByteRecord) -> Result<Option<RatingRecord>, String> {
    if record.len() != 3 {
        return Err(format!("expected 3 fields, found {}", record.len()));
    }
    let learner = decode_id(&record[0]);
    let resource = decode_id(&record[1]);
    if learner.is_empty() {
        return Err("empty User-ID".into());
    }
    if resource.is_empty() {
        return Err("empty ISBN".into());
    }
    let rating: u8 = std::str::from_utf8(&record[2])
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| format!("rating {:?} is not an integer", decode_id(&record[2])))?;
    match rating {
        0 => Ok(None),
        1..=10 => Ok(Some(RatingRecord::new(learner, resource, rating))),
        _ => Err(format!("rating {rating} outside 0..10")),
    }
}

/// Parses a semicolon-separated, double-quoted ratings file.
///
/// Rating 0 rows are dropped and counted. A malformed row aborts with its line
/// number when `strict`, otherwise it is skipped and counted.
pub fn parse_ratings<R: Read>(reader: R, strict: bool) -> Result<ParsedRatings> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b';')
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);

    let mut record = csv::ByteRecord::new();
    if !rdr.read_byte_record(&mut record)? {
        return Err(Error::Header {
            expected: RATINGS_HEADER.join(";"),
            found: String::new(),
        });
    }
    check_header(record.iter(), &RATINGS_HEADER, ';')?;

    let mut out = ParsedRatings::default();
    loop {
        let line = rdr.position().line();
        match rdr.read_byte_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map_or(line, |p| p.line());
                match classify_rating_row(&record) {
                    Ok(Some(r)) => out.records.push(r),
                    Ok(None) => out.dropped_implicit += 1,
                    Err(reason) if strict => return Err(Error::Malformed { line, reason }),
                    Err(_) => out.malformed += 1,
                }
            }
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(e) => {
                if strict {
                    return Err(Error::Malformed {
                        line,
                        reason: e.to_string(),
                    });
                }
                out.malformed += 1;
            }
        }
    }
    Ok(out)
}

/// Writes ratings in the same format [`parse_ratings`] reads.
pub fn write_ratings<W: Write>(writer: W, records: &[RatingRecord]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .delimiter(b';')
        .quote_style(csv::QuoteStyle::Always)
        .from_writer(writer);
    wtr.write_record(RATINGS_HEADER)?;
    for r in records {
        wtr.write_record([
            encode_id(&r.learner_id),
            encode_id(&r.resource_id),
            r.rating.to_string().into_bytes(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<ratings>", e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedRow {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedProfiles {
    /// In order of first appearance; a duplicated id holds its last row.
    pub profiles: Vec<LearnerProfile>,
    pub rejected: Vec<RejectedRow>,
    pub duplicates: usize,
}

impl ParsedProfiles {
    pub fn into_map(self) -> HashMap<String, LearnerProfile> {
        self.profiles
            .into_iter()
            .map(|p| (p.learner_id.clone(), p))
            .collect()
    }
}

fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize) -> Result<T, String> {
    record[idx].trim().parse().map_err(|_| {
        format!(
            "{} {:?} is not a valid integer",
            PROFILES_HEADER[idx], &record[idx]
        )
    })
}

fn profile_from_row(record: &csv::StringRecord) -> Result<LearnerProfile, String> {
    if record.len() != PROFILES_HEADER.len() {
        return Err(format!(
            "expected {} fields, found {}",
            PROFILES_HEADER.len(),
            record.len()
        ));
    }
    let hours: i64 = parse_field(record, 5)?;
    if hours < 1 {
        return Err("time must be positive".into());
    }
    LearnerProfile::new(
        record[0].trim(),
        parse_field(record, 1)?,
        parse_field(record, 2)?,
        parse_field(record, 3)?,
        parse_field(record, 4)?,
        u32::try_from(hours).map_err(|_| "a5_hours too large".to_string())?,
    )
}

/// Parses the comma-separated profiles file. Invalid rows are rejected with a
/// reason and do not abort the parse.
pub fn parse_profiles<R: Read>(reader: R) -> Result<ParsedProfiles> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);

    let mut record = csv::StringRecord::new();
    if !rdr.read_record(&mut record)? {
        return Err(Error::Header {
            expected: PROFILES_HEADER.join(","),
            found: String::new(),
        });
    }
    check_header(record.iter().map(str::as_bytes), &PROFILES_HEADER, ',')?;

    let mut out = ParsedProfiles::default();
    let mut index: HashMap<String, usize> = HashMap::new();
    loop {
        let line = rdr.position().line();
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map_or(line, |p| p.line());
                match profile_from_row(&record) {
                    Ok(p) => match index.get(&p.learner_id) {
                        Some(&i) => {
                            out.duplicates += 1;
                            out.profiles[i] = p;
                        }
                        None => {
                            index.insert(p.learner_id.clone(), out.profiles.len());
                            out.profiles.push(p);
                        }
                    },
                    Err(reason) => out.rejected.push(RejectedRow { line, reason }),
                }
            }
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(e) => out.rejected.push(RejectedRow {
                line,
                reason: e.to_string(),
            }),
        }
    }
    Ok(out)
}

pub fn write_profiles<W: Write>(writer: W, profiles: &[LearnerProfile]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(PROFILES_HEADER)?;
    for p in profiles {
        wtr.write_record([
            p.learner_id.clone(),
            p.current_skill.to_string(),
            p.target_skill.to_string(),
            p.strategy.to_string(),
            p.presentation.to_string(),
            p.learning_time.to_string(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<profiles>", e))?;
    Ok(())
}

/// Synthesizes one profile per id. The output depends only on `(learner_ids, seed)`.
pub fn generate_profiles<S: AsRef<str>>(learner_ids: &[S], seed: u64) -> Vec<LearnerProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    learner_ids
        .iter()
        .map(|id| {
            let current_skill = rng.random_range(1..MAX_SKILL);
            let target_skill = rng.random_range(current_skill + 1..=MAX_SKILL);
            LearnerProfile {
                learner_id: id.as_ref().to_string(),
                current_skill,
                target_skill,
                strategy: rng.random_range(1..=NOMINAL_LEVELS),
                presentation: rng.random_range(1..=NOMINAL_LEVELS),
                learning_time: rng.random_range(1..=MAX_SYNTH_HOURS),
            }
        })
        .collect()
}

/// Distinct learner ids in order of first appearance.
pub fn learner_ids(ratings: &[RatingRecord]) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    ratings
        .iter()
        .filter(|r| seen.insert(r.learner_id.as_str()))
        .map(|r| r.learner_id.clone())
        .collect()
}

fn check_threshold(delta0: u8) -> Result<()> {
    if !(1..=10).contains(&delta0) {
        return Err(Error::InvalidArgument(format!(
            "delta0 must be in 1..10, got {delta0}"
        )));
    }
    Ok(())
}

pub fn build_subset(
    ratings: &[RatingRecord],
    resource_id: &str,
    delta0: u8,
) -> Result<LearnerSubset> {
    check_threshold(delta0)?;
    let members = ratings
        .iter()
        .filter(|r| r.resource_id == resource_id && r.rating >= delta0)
        .map(|r| r.learner_id.clone())
        .collect();
    Ok(LearnerSubset {
        resource_id: resource_id.to_string(),
        members,
    })
}

/// One subset per distinct resource in `ratings`, sorted by resource id.
/// Resources with no qualifying rating yield an empty subset.
///
/// Duplicate (learner, resource) ratings collapse to their maximum before the
/// threshold is applied.
pub fn build_all_subsets(ratings: &[RatingRecord], delta0: u8) -> Result<Vec<LearnerSubset>> {
    check_threshold(delta0)?;
    let mut best: HashMap<(&str, &str), u8> = HashMap::with_capacity(ratings.len());
    for r in ratings {
        let slot = best
            .entry((r.resource_id.as_str(), r.learner_id.as_str()))
            .or_insert(0);
        *slot = (*slot).max(r.rating);
    }
    let mut by_resource: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for ((resource, learner), rating) in best {
        let members = by_resource.entry(resource).or_default();
        if rating >= delta0 {
            members.insert(learner.to_string());
        }
    }
    Ok(by_resource
        .into_iter()
        .map(|(resource_id, members)| LearnerSubset {
            resource_id: resource_id.to_string(),
            members,
        })
        .collect())
}
