//! End-to-end tagging: subsets, quantification, clustering and mining per
//! resource, plus the tag store and profile matching.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::{
    apply_normalization, fit_normalization, largest_cluster, select_k, to_feature_points,
    FeaturePoint, KSelectParams, KSelection, KTrace,
};
use crate::error::{Error, Result};
use crate::ingest::{build_all_subsets, LearnerProfile, LearnerSubset, RatingRecord, TimeBin};
use crate::mine::{
    apriori, select_tag, FrequentItemset, Item, Transaction, CURRENT_SKILL, LEARNING_TIME,
    PRESENTATION, STRATEGY, TARGET_SKILL,
};
use crate::quantify::{quantify_all, AttributeValueMap, NmfParams, QuantifiedAttributes};

pub const SKIP_BELOW_THRESHOLD: &str = "subset below threshold";
pub const SKIP_NO_FREQUENT: &str = "no frequent itemset";

/// Lloyd iteration cap per k.
pub const KMEANS_MAX_ITERS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Minimum rating for subset membership, 1..=10.
    pub delta0: u8,
    /// Apriori support level in (0, 1].
    pub support_sl: f64,
    /// NMF feature count.
    pub nmf_k: usize,
    pub nmf_max_iters: usize,
    pub nmf_tol: f64,
    pub k_max: usize,
    /// Diameter jump factor for choosing k.
    pub gamma: f64,
    pub seed: u64,
    /// Resources with fewer subset members are skipped.
    pub min_subset: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            delta0: 6,
            support_sl: 0.1,
            nmf_k: 10,
            nmf_max_iters: 500,
            nmf_tol: 1e-6,
            k_max: 8,
            gamma: 2.0,
            seed: 0,
            min_subset: 10,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(1..=10).contains(&self.delta0) {
            return bad(format!("delta0 must be in 1..10, got {}", self.delta0));
        }
        if !(self.support_sl > 0.0 && self.support_sl <= 1.0) {
            return bad(format!(
                "support must be in (0, 1], got {}",
                self.support_sl
            ));
        }
        if self.nmf_k == 0 || self.nmf_max_iters == 0 {
            return bad("NMF needs k >= 1 and max_iters >= 1".into());
        }
        if self.nmf_tol.is_nan() || self.nmf_tol < 0.0 {
            return bad(format!("NMF tolerance must be >= 0, got {}", self.nmf_tol));
        }
        if self.k_max == 0 {
            return bad("kmax must be at least 1".into());
        }
        if self.gamma.is_nan() || self.gamma <= 1.0 {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        Ok(())
    }

    pub fn nmf_params(&self) -> NmfParams {
        NmfParams {
            k: self.nmf_k,
            max_iters: self.nmf_max_iters,
            tol: self.nmf_tol,
            seed: self.seed,
        }
    }

    /// Clustering parameters for one resource; the seed mixes in the resource id.
    pub fn kselect_params(&self, resource_id: &str) -> KSelectParams {
        KSelectParams {
            k_max: self.k_max,
            gamma: self.gamma,
            seed: self.seed ^ fnv1a(resource_id.as_bytes()),
            max_iters: KMEANS_MAX_ITERS,
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Fields in display order: current skill, target skill, learning time,
/// strategy value, presentation value. Absent fields render as `-`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tag {
    pub current_skill: Option<u8>,
    pub target_skill: Option<u8>,
    pub time_bin: Option<TimeBin>,
    pub strategy_value: Option<f64>,
    pub presentation_value: Option<f64>,
}

impl Tag {
    pub fn from_items(
        items: &[Item],
        strategy_values: &AttributeValueMap,
        presentation_values: &AttributeValueMap,
    ) -> Result<Tag> {
        let mut tag = Tag::default();
        for item in items {
            let small = || {
                u8::try_from(item.value)
                    .map_err(|_| Error::InvalidArgument(format!("item {item} out of range")))
            };
            match item.attribute {
                CURRENT_SKILL => tag.current_skill = Some(small()?),
                TARGET_SKILL => tag.target_skill = Some(small()?),
                STRATEGY => {
                    let p = small()?;
                    tag.strategy_value =
                        Some(strategy_values.get(p).ok_or(Error::MissingValue(p))?);
                }
                PRESENTATION => {
                    let p = small()?;
                    tag.presentation_value =
                        Some(presentation_values.get(p).ok_or(Error::MissingValue(p))?);
                }
                LEARNING_TIME => {
                    tag.time_bin = Some(TimeBin::from_lower(item.value).ok_or_else(|| {
                        Error::InvalidArgument(format!("{} is not a time bin start", item.value))
                    })?)
                }
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown attribute a{other}"
                    )))
                }
            }
        }
        Ok(tag)
    }

    pub fn field_count(&self) -> usize {
        [
            self.current_skill.is_some(),
            self.target_skill.is_some(),
            self.time_bin.is_some(),
            self.strategy_value.is_some(),
            self.presentation_value.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count()
    }
}

fn field<T: ToString>(value: Option<T>) -> String {
    value.map_or_else(|| "-".to_string(), |v| v.to_string())
}

/// `[6, 6, [41-50], 24240, 20549]`, quantified values rounded to integers.
pub fn render_tag(tag: &Tag) -> String {
    let rounded = |v: Option<f64>| v.map(|x| x.round() as i64);
    format!(
        "[{}, {}, {}, {}, {}]",
        field(tag.current_skill),
        field(tag.target_skill),
        field(tag.time_bin),
        field(rounded(tag.strategy_value)),
        field(rounded(tag.presentation_value)),
    )
}

/// How a resource's tags were obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub subset_size: usize,
    pub chosen_k: usize,
    pub cluster_size: usize,
    /// Support of the winning itemsets, shared by all of them.
    pub support: f64,
    pub count: usize,
    /// Learner ids of the largest cluster.
    pub cluster_members: Vec<String>,
    /// Winning itemsets, aligned with the cloud's tags.
    pub itemsets: Vec<Vec<Item>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagCloud {
    #[serde(skip)]
    pub resource_id: String,
    pub tags: Vec<Tag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl TagCloud {
    /// Tags joined with ` and `.
    pub fn render(&self) -> String {
        self.tags
            .iter()
            .map(render_tag)
            .collect::<Vec<_>>()
            .join(" and ")
    }
}

/// Resource id to tag cloud, ordered by id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TagStore {
    pub clouds: BTreeMap<String, TagCloud>,
}

impl TagStore {
    pub fn len(&self) -> usize {
        self.clouds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clouds.is_empty()
    }

    pub fn get(&self, resource_id: &str) -> Option<&TagCloud> {
        self.clouds.get(resource_id)
    }

    pub fn insert(&mut self, cloud: TagCloud) {
        self.clouds.insert(cloud.resource_id.clone(), cloud);
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("store serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        let mut store: TagStore = serde_json::from_str(text)?;
        for (id, cloud) in store.clouds.iter_mut() {
            cloud.resource_id = id.clone();
        }
        Ok(store)
    }

    /// One line per tagged resource: `<id>\t<tag>[ and <tag>]*`.
    pub fn report(&self) -> String {
        let mut out = String::new();
        for cloud in self.clouds.values().filter(|c| !c.tags.is_empty()) {
            let _ = writeln!(out, "{}\t{}", cloud.resource_id, cloud.render());
        }
        out
    }
}

pub fn save_store(store: &TagStore, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, store.to_json()).map_err(|e| Error::io(path, e))
}

pub fn load_store(path: impl AsRef<Path>) -> Result<TagStore> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TagStore::from_json(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Everything computed for one resource's subset.
#[derive(Debug, Clone)]
pub struct ResourceAnalysis {
    pub points: Vec<FeaturePoint>,
    pub normalized: Vec<FeaturePoint>,
    /// `None` when the subset was too small to cluster.
    pub selection: Option<KSelection>,
    pub largest: BTreeSet<String>,
    pub frequent: Vec<FrequentItemset>,
    pub winners: Vec<FrequentItemset>,
}

impl ResourceAnalysis {
    /// Cluster index per point, all zero when clustering was skipped.
    pub fn assignment(&self) -> Vec<usize> {
        match &self.selection {
            Some(sel) => sel.clustering.assignment.clone(),
            None => vec![0; self.points.len()],
        }
    }

    pub fn chosen_k(&self) -> usize {
        self.selection.as_ref().map_or(1, |s| s.clustering.k)
    }

    pub fn trace(&self) -> &[KTrace] {
        self.selection.as_ref().map_or(&[], |s| s.trace.as_slice())
    }
}

pub fn analyze_resource(
    subset: &LearnerSubset,
    profiles: &HashMap<String, LearnerProfile>,
    values: &QuantifiedAttributes,
    config: &PipelineConfig,
) -> Result<ResourceAnalysis> {
    let points = to_feature_points(
        subset,
        profiles,
        &values.strategy.values,
        &values.presentation.values,
    )?;
    if points.is_empty() {
        return Err(Error::NoPoints);
    }
    let spec = fit_normalization(&points)?;
    let normalized = apply_normalization(&points, &spec);

    let (selection, largest) = if points.len() < 2 {
        (None, subset.members.clone())
    } else {
        let sel = select_k(&normalized, &config.kselect_params(&subset.resource_id))?;
        let largest = largest_cluster(&sel.clustering, &normalized);
        (Some(sel), largest)
    };

    let transactions: Vec<Transaction> = largest
        .iter()
        .map(|id| {
            profiles
                .get(id)
                .map(Transaction::from_profile)
                .ok_or_else(|| Error::MissingProfile(id.clone()))
        })
        .collect::<Result<_>>()?;
    let frequent = apriori(&transactions, config.support_sl)?;
    let winners = select_tag(&frequent);

    Ok(ResourceAnalysis {
        points,
        normalized,
        selection,
        largest,
        frequent,
        winners,
    })
}

fn tag_resource(
    subset: &LearnerSubset,
    profiles: &HashMap<String, LearnerProfile>,
    values: &QuantifiedAttributes,
    config: &PipelineConfig,
) -> Result<(TagCloud, Vec<KTrace>)> {
    let analysis = analyze_resource(subset, profiles, values, config)?;
    let tags = analysis
        .winners
        .iter()
        .map(|w| {
            Tag::from_items(
                &w.items,
                &values.strategy.values,
                &values.presentation.values,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let (support, count) = analysis
        .winners
        .first()
        .map_or((0.0, 0), |w| (w.support, w.count));
    let provenance = Provenance {
        subset_size: subset.len(),
        chosen_k: analysis.chosen_k(),
        cluster_size: analysis.largest.len(),
        support,
        count,
        cluster_members: analysis.largest.iter().cloned().collect(),
        itemsets: analysis.winners.iter().map(|w| w.items.clone()).collect(),
    };
    let skipped = tags.is_empty().then(|| SKIP_NO_FREQUENT.to_string());
    let cloud = TagCloud {
        resource_id: subset.resource_id.clone(),
        tags,
        provenance: Some(provenance),
        skipped,
    };
    Ok((cloud, analysis.trace().to_vec()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TagRun {
    /// Clouds of every resource that reached clustering.
    pub store: TagStore,
    pub values: QuantifiedAttributes,
    /// Resources left out of the store, with the reason.
    pub skipped: BTreeMap<String, String>,
    /// k-selection trace per clustered resource.
    pub traces: BTreeMap<String, Vec<KTrace>>,
}

impl TagRun {
    pub fn tagged(&self) -> usize {
        self.store
            .clouds
            .values()
            .filter(|c| !c.tags.is_empty())
            .count()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} resources tagged, {} without frequent itemsets, {} skipped ({})",
            self.tagged(),
            self.store.len() - self.tagged(),
            self.skipped.len(),
            SKIP_BELOW_THRESHOLD
        )
    }

    /// `resource_id,k,sse,avg_diameter` rows.
    pub fn trace_csv(&self) -> String {
        trace_csv(
            self.traces
                .iter()
                .map(|(id, t)| (id.as_str(), t.as_slice())),
        )
    }
}

pub fn trace_csv<'a>(traces: impl IntoIterator<Item = (&'a str, &'a [KTrace])>) -> String {
    let mut out = String::from("resource_id,k,sse,avg_diameter\n");
    for (id, rows) in traces {
        for t in rows {
            let _ = writeln!(out, "{id},{},{},{}", t.k, t.sse, t.avg_diameter);
        }
    }
    out
}

/// Runs every stage. Quantification happens once over all subsets; the
/// per-resource stages run in parallel and merge by resource id.
pub fn run(
    config: &PipelineConfig,
    ratings: &[RatingRecord],
    profiles: &HashMap<String, LearnerProfile>,
) -> Result<TagRun> {
    config.validate()?;
    let subsets = build_all_subsets(ratings, config.delta0)?;
    let values = quantify_all(&subsets, profiles, &config.nmf_params())?;

    let results: Vec<Result<(TagCloud, Vec<KTrace>)>> = subsets
        .par_iter()
        .filter(|s| !s.is_empty() && s.len() >= config.min_subset)
        .map(|s| tag_resource(s, profiles, &values, config))
        .collect();

    let mut store = TagStore::default();
    let mut traces = BTreeMap::new();
    for result in results {
        let (cloud, trace) = result?;
        if !trace.is_empty() {
            traces.insert(cloud.resource_id.clone(), trace);
        }
        store.insert(cloud);
    }
    let skipped = subsets
        .iter()
        .filter(|s| !store.clouds.contains_key(&s.resource_id))
        .map(|s| (s.resource_id.clone(), SKIP_BELOW_THRESHOLD.to_string()))
        .collect();

    Ok(TagRun {
        store,
        values,
        skipped,
        traces,
    })
}

/// Fraction of the tag's present fields that agree with the profile.
///
/// Skills must be equal, the learning time must fall in the bin, and a
/// quantified field agrees when the profile's parameter is among those whose
/// value lies nearest to it.
pub fn score_tag(
    tag: &Tag,
    profile: &LearnerProfile,
    strategy_values: &AttributeValueMap,
    presentation_values: &AttributeValueMap,
) -> f64 {
    let nominal = |value: Option<f64>, map: &AttributeValueMap, parameter: u8| {
        value.map(|v| map.nearest_parameters(v).contains(&parameter))
    };
    let checks = [
        tag.current_skill.map(|s| s == profile.current_skill),
        tag.target_skill.map(|s| s == profile.target_skill),
        tag.time_bin.map(|b| b.contains(profile.learning_time)),
        nominal(tag.strategy_value, strategy_values, profile.strategy),
        nominal(
            tag.presentation_value,
            presentation_values,
            profile.presentation,
        ),
    ];
    let present = checks.iter().flatten().count();
    if present == 0 {
        return 0.0;
    }
    checks.iter().flatten().filter(|&&m| m).count() as f64 / present as f64
}

/// Resources ranked by their best tag's score, ties by resource id.
pub fn match_resources(
    profile: &LearnerProfile,
    store: &TagStore,
    strategy_values: &AttributeValueMap,
    presentation_values: &AttributeValueMap,
    top_n: usize,
) -> Result<Vec<(String, f64)>> {
    if top_n == 0 {
        return Err(Error::InvalidArgument("top_n must be positive".into()));
    }
    if store.is_empty() {
        return Err(Error::InvalidArgument("tag store is empty".into()));
    }
    let mut ranked: Vec<(String, f64)> = store
        .clouds
        .iter()
        .map(|(id, cloud)| {
            let best = cloud
                .tags
                .iter()
                .map(|t| score_tag(t, profile, strategy_values, presentation_values))
                .fold(0.0, f64::max);
            (id.clone(), best)
        })
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(top_n);
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_tag() -> Tag {
        Tag {
            current_skill: Some(6),
            target_skill: Some(6),
            time_bin: TimeBin::from_lower(41),
            strategy_value: Some(24240.0),
            presentation_value: Some(20549.0),
        }
    }

    #[test]
    fn renders_full_tag() {
        assert_eq!(render_tag(&full_tag()), "[6, 6, [41-50], 24240, 20549]");
    }

    #[test]
    fn renders_partial_tag() {
        let tag = Tag {
            target_skill: Some(6),
            time_bin: TimeBin::from_lower(41),
            ..Tag::default()
        };
        assert_eq!(render_tag(&tag), "[-, 6, [41-50], -, -]");
    }

    #[test]
    fn rounds_quantified_values() {
        let tag = Tag {
            strategy_value: Some(30379.6),
            presentation_value: Some(22802.2),
            ..Tag::default()
        };
        assert_eq!(render_tag(&tag), "[-, -, -, 30380, 22802]");
    }

    #[test]
    fn cloud_joins_with_and() {
        let cloud = TagCloud {
            resource_id: "038550120X".into(),
            tags: vec![
                full_tag(),
                Tag {
                    time_bin: TimeBin::from_lower(21),
                    ..full_tag()
                },
            ],
            provenance: None,
            skipped: None,
        };
        assert_eq!(
            cloud.render(),
            "[6, 6, [41-50], 24240, 20549] and [6, 6, [21-30], 24240, 20549]"
        );
        let mut store = TagStore::default();
        store.insert(cloud);
        assert!(store.report().starts_with("038550120X\t[6, 6"));
    }

    #[test]
    fn tag_from_items() {
        let sv = AttributeValueMap::new([1.0, 2.0, 24240.0, 4.0, 5.0]);
        let pv = AttributeValueMap::new([1.0, 2.0, 3.0, 20549.0, 5.0]);
        let items = [
            Item::new(1, 6),
            Item::new(2, 6),
            Item::new(3, 3),
            Item::new(4, 4),
            Item::new(5, 41),
        ];
        assert_eq!(Tag::from_items(&items, &sv, &pv).unwrap(), full_tag());
        assert!(Tag::from_items(&[Item::new(5, 40)], &sv, &pv).is_err());
    }

    #[test]
    fn config_defaults_are_valid() {
        let c = PipelineConfig::default();
        c.validate().unwrap();
        assert_eq!((c.delta0, c.support_sl, c.nmf_k, c.k_max), (6, 0.1, 10, 8));
        assert_eq!((c.gamma, c.seed, c.min_subset), (2.0, 0, 10));
        assert!(PipelineConfig {
            delta0: 0,
            ..c.clone()
        }
        .validate()
        .is_err());
        assert!(PipelineConfig {
            support_sl: 0.0,
            ..c.clone()
        }
        .validate()
        .is_err());
        assert!(PipelineConfig { gamma: 1.0, ..c }.validate().is_err());
    }

    #[test]
    fn scoring() {
        let sv = AttributeValueMap::new([1.0, 2.0, 24240.0, 4.0, 5.0]);
        let pv = AttributeValueMap::new([1.0, 2.0, 3.0, 20549.0, 5.0]);
        let exact = LearnerProfile::new("x", 5, 6, 3, 4, 45).unwrap();
        let tag = Tag {
            current_skill: Some(5),
            ..full_tag()
        };
        assert_eq!(score_tag(&tag, &exact, &sv, &pv), 1.0);
        let other = LearnerProfile::new("y", 1, 2, 1, 4, 5).unwrap();
        assert_eq!(score_tag(&tag, &other, &sv, &pv), 0.2);
    }

    #[test]
    fn match_requires_positive_top_n() {
        let mut store = TagStore::default();
        store.insert(TagCloud {
            resource_id: "r".into(),
            tags: vec![full_tag()],
            provenance: None,
            skipped: None,
        });
        let sv = AttributeValueMap::new([0.0; 5]);
        let p = LearnerProfile::new("x", 1, 2, 1, 1, 1).unwrap();
        assert!(match_resources(&p, &store, &sv, &sv, 0).is_err());
        let one = match_resources(&p, &store, &sv, &sv, 5).unwrap();
        assert_eq!(one.len(), 1);
        assert!(match_resources(&p, &TagStore::default(), &sv, &sv, 5).is_err());
    }

    #[test]
    fn empty_store_round_trips() {
        let store = TagStore::default();
        assert_eq!(store.to_json().trim(), "{}");
        assert_eq!(TagStore::from_json("{}").unwrap(), store);
    }
}
