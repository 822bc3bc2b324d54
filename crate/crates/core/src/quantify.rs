//! Numeric values for nominal attributes.
//!
//! Learners that co-occur in some high-rating subset are counted by the pair
//! of parameters they hold, the 5x5 count matrix is factorized with NMF, and
//! each parameter takes the feature row it loads on most heavily. After a
//! min-symmetrization, the row mean of that ordering matrix is the value of the
//! parameter.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use ndarray::{Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ingest::{LearnerProfile, LearnerSubset, NOMINAL_LEVELS};

const LEVELS: usize = NOMINAL_LEVELS as usize;

/// Guard added to multiplicative-update denominators.
pub const NMF_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NominalAttribute {
    /// `a3`, learning strategy.
    Strategy,
    /// `a4`, presentation style.
    Presentation,
}

impl NominalAttribute {
    pub const ALL: [NominalAttribute; 2] =
        [NominalAttribute::Strategy, NominalAttribute::Presentation];

    pub fn of(self, profile: &LearnerProfile) -> u8 {
        match self {
            NominalAttribute::Strategy => profile.strategy,
            NominalAttribute::Presentation => profile.presentation,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NominalAttribute::Strategy => "strategy",
            NominalAttribute::Presentation => "presentation",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            NominalAttribute::Strategy => "Learning strategy",
            NominalAttribute::Presentation => "Presentation style",
        }
    }
}

impl fmt::Display for NominalAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for NominalAttribute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strategy" | "a3" => Ok(NominalAttribute::Strategy),
            "presentation" | "a4" => Ok(NominalAttribute::Presentation),
            other => Err(Error::InvalidArgument(format!(
                "unknown attribute {other:?}, expected strategy or presentation"
            ))),
        }
    }
}

fn ser_matrix<S: Serializer>(m: &Array2<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.rows().into_iter().map(|r| r.to_vec()).collect();
    rows.serialize(s)
}

fn de_matrix<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Array2<f64>, D::Error> {
    let rows = Vec::<Vec<f64>>::deserialize(d)?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(serde::de::Error::custom("ragged matrix"));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Array2::from_shape_vec((rows.len(), cols), flat).map_err(serde::de::Error::custom)
}

/// `entries[p-1][q-1]`: pairs of distinct co-occurring learners holding parameters `p` and `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooccurrenceMatrix {
    pub attribute: NominalAttribute,
    pub entries: [[u64; LEVELS]; LEVELS],
}

impl CooccurrenceMatrix {
    pub fn zeros(attribute: NominalAttribute) -> Self {
        CooccurrenceMatrix {
            attribute,
            entries: [[0; LEVELS]; LEVELS],
        }
    }

    pub fn to_array(&self) -> Array2<f64> {
        Array2::from_shape_fn((LEVELS, LEVELS), |(i, j)| self.entries[i][j] as f64)
    }

    fn add_pair(&mut self, p: u8, q: u8) {
        let (p, q) = (usize::from(p - 1), usize::from(q - 1));
        self.entries[p][q] += 1;
        if p != q {
            self.entries[q][p] += 1;
        }
    }
}

/// Counts each unordered pair of distinct learners that share at least one
/// subset exactly once, however many subsets they share.
pub fn build_cooccurrence(
    subsets: &[LearnerSubset],
    profiles: &HashMap<String, LearnerProfile>,
    attribute: NominalAttribute,
) -> Result<CooccurrenceMatrix> {
    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut params: Vec<u8> = Vec::new();
    let mut members: Vec<Vec<u32>> = Vec::with_capacity(subsets.len());
    for subset in subsets {
        let mut ids = Vec::with_capacity(subset.len());
        for learner in &subset.members {
            let id = match index.get(learner.as_str()) {
                Some(&id) => id,
                None => {
                    let profile = profiles
                        .get(learner)
                        .ok_or_else(|| Error::MissingProfile(learner.clone()))?;
                    let id = params.len() as u32;
                    params.push(attribute.of(profile));
                    index.insert(learner.as_str(), id);
                    id
                }
            };
            ids.push(id);
        }
        if ids.len() > 1 {
            members.push(ids);
        }
    }

    let n = params.len();
    let mut containing: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (s, ids) in members.iter().enumerate() {
        for &u in ids {
            containing[u as usize].push(s as u32);
        }
    }

    // Each learner u counts its neighbours v > u once, using a stamp array in
    // place of a per-learner set.
    let chunk = (n / (rayon::current_num_threads() * 4)).max(256);
    let learners: Vec<u32> = (0..n as u32).collect();
    let counted = learners
        .par_chunks(chunk)
        .map(|block| {
            let mut stamp = vec![u32::MAX; n];
            let mut local = CooccurrenceMatrix::zeros(attribute);
            for &u in block {
                for &s in &containing[u as usize] {
                    for &v in &members[s as usize] {
                        if v > u && stamp[v as usize] != u {
                            stamp[v as usize] = u;
                            local.add_pair(params[u as usize], params[v as usize]);
                        }
                    }
                }
            }
            local
        })
        .reduce(
            || CooccurrenceMatrix::zeros(attribute),
            |mut a, b| {
                for (ra, rb) in a.entries.iter_mut().zip(b.entries.iter()) {
                    for (x, y) in ra.iter_mut().zip(rb.iter()) {
                        *x += y;
                    }
                }
                a
            },
        );
    Ok(counted)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmfParams {
    /// Number of latent features.
    pub k: usize,
    pub max_iters: usize,
    /// Stop once the relative error improvement of an iteration falls below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for NmfParams {
    fn default() -> Self {
        NmfParams {
            k: 10,
            max_iters: 500,
            tol: 1e-6,
            seed: 0,
        }
    }
}

/// `A ~ weights * features` with both factors non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorPair {
    /// `m x k`, one row per parameter.
    #[serde(serialize_with = "ser_matrix", deserialize_with = "de_matrix")]
    pub weights: Array2<f64>,
    /// `k x n`, one row per feature.
    #[serde(serialize_with = "ser_matrix", deserialize_with = "de_matrix")]
    pub features: Array2<f64>,
    pub k: usize,
    /// Frobenius norm of `A - weights * features`.
    pub final_error: f64,
    /// Error before the first update and after every update.
    pub error_trace: Vec<f64>,
}

fn frobenius_residual(a: &Array2<f64>, b: &Array2<f64>, c: &Array2<f64>) -> f64 {
    let approx = b.dot(c);
    a.iter()
        .zip(approx.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn multiplicative_update(base: &mut Array2<f64>, numer: &Array2<f64>, denom: &Array2<f64>) {
    ndarray::Zip::from(base)
        .and(numer)
        .and(denom)
        .for_each(|b, &n, &d| *b *= n / (d + NMF_EPSILON));
}

/// Lee-Seung multiplicative updates on the squared Frobenius objective.
pub fn nmf_matrix(a: &Array2<f64>, params: &NmfParams) -> Result<FactorPair> {
    if params.k == 0 {
        return Err(Error::InvalidArgument("NMF needs k >= 1".into()));
    }
    if params.max_iters == 0 {
        return Err(Error::InvalidArgument("NMF needs max_iters >= 1".into()));
    }
    if a.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
        return Err(Error::InvalidArgument(
            "NMF input must be finite and non-negative".into(),
        ));
    }
    let (m, n) = a.dim();
    let k = params.k;

    if a.iter().all(|&x| x == 0.0) {
        return Ok(FactorPair {
            weights: Array2::zeros((m, k)),
            features: Array2::zeros((k, n)),
            k,
            final_error: 0.0,
            error_trace: vec![0.0],
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    // (0, 1]: a zero entry would stay zero under multiplicative updates
    let mut draw = |_| 1.0 - rng.random::<f64>();
    let mut b = Array2::from_shape_fn((m, k), &mut draw);
    let mut c = Array2::from_shape_fn((k, n), &mut draw);

    let mut trace = vec![frobenius_residual(a, &b, &c)];
    for _ in 0..params.max_iters {
        let bt = b.t();
        let numer = bt.dot(a);
        let denom = bt.dot(&b).dot(&c);
        multiplicative_update(&mut c, &numer, &denom);

        let ct = c.t();
        let numer = a.dot(&ct);
        let denom = b.dot(&c).dot(&ct);
        multiplicative_update(&mut b, &numer, &denom);

        let prev = *trace.last().unwrap();
        let err = frobenius_residual(a, &b, &c);
        trace.push(err);
        if err == 0.0 || (prev - err) / prev < params.tol {
            break;
        }
    }

    Ok(FactorPair {
        weights: b,
        features: c,
        k,
        final_error: *trace.last().unwrap(),
        error_trace: trace,
    })
}

pub fn nmf(a: &CooccurrenceMatrix, params: &NmfParams) -> Result<FactorPair> {
    nmf_matrix(&a.to_array(), params)
}

/// Square matrix of parameter-to-parameter similarity scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimilarityMatrix {
    #[serde(serialize_with = "ser_matrix", deserialize_with = "de_matrix")]
    pub entries: Array2<f64>,
}

/// Row `i` of the result is the feature row that parameter `i` weighs most.
/// Ties, including all-zero weight rows, go to the lowest feature index.
pub fn derive_orderings(factors: &FactorPair) -> SimilarityMatrix {
    let dominant: Vec<usize> = factors
        .weights
        .rows()
        .into_iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (f, &w)| {
                    if w > best.1 {
                        (f, w)
                    } else {
                        best
                    }
                })
                .0
        })
        .collect();
    let entries = factors.features.select(Axis(0), &dominant);
    SimilarityMatrix { entries }
}

/// Elementwise `min(D[i][j], D[j][i])`.
pub fn symmetrize(d: &SimilarityMatrix) -> Result<SimilarityMatrix> {
    let (rows, cols) = d.entries.dim();
    if rows != cols {
        return Err(Error::InvalidArgument(format!(
            "ordering matrix must be square, got {rows}x{cols}"
        )));
    }
    let entries = Array2::from_shape_fn((rows, cols), |(i, j)| {
        d.entries[[i, j]].min(d.entries[[j, i]])
    });
    Ok(SimilarityMatrix { entries })
}

/// Quantified value of each nominal parameter 1..=5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeValueMap {
    values: BTreeMap<u8, f64>,
}

impl AttributeValueMap {
    pub fn new(values: [f64; LEVELS]) -> Self {
        AttributeValueMap {
            values: (1..=NOMINAL_LEVELS).zip(values).collect(),
        }
    }

    pub fn get(&self, parameter: u8) -> Option<f64> {
        self.values.get(&parameter).copied()
    }

    /// `(parameter, value)` in parameter order.
    pub fn iter(&self) -> impl Iterator<Item = (u8, f64)> + '_ {
        self.values.iter().map(|(&p, &v)| (p, v))
    }

    pub fn to_array(&self) -> [f64; LEVELS] {
        let mut out = [0.0; LEVELS];
        for (p, v) in self.iter() {
            out[usize::from(p - 1)] = v;
        }
        out
    }

    /// Parameters whose value lies nearest to `value` (several on ties).
    pub fn nearest_parameters(&self, value: f64) -> Vec<u8> {
        let best = self
            .iter()
            .map(|(_, v)| (v - value).abs())
            .fold(f64::INFINITY, f64::min);
        self.iter()
            .filter(|&(_, v)| (v - value).abs() == best)
            .map(|(p, _)| p)
            .collect()
    }

    fn is_complete(&self) -> bool {
        self.values.len() == LEVELS && (1..=NOMINAL_LEVELS).all(|p| self.values.contains_key(&p))
    }

    pub fn validate(&self) -> Result<()> {
        if !self.is_complete() {
            return Err(Error::InvalidArgument(
                "value map must hold exactly parameters 1..5".into(),
            ));
        }
        Ok(())
    }
}

/// Row means of the symmetric matrix, diagonal included.
pub fn attribute_values(d_sym: &SimilarityMatrix) -> Result<AttributeValueMap> {
    let (rows, cols) = d_sym.entries.dim();
    if rows != LEVELS || cols != LEVELS {
        return Err(Error::InvalidArgument(format!(
            "expected a {LEVELS}x{LEVELS} matrix, got {rows}x{cols}"
        )));
    }
    let mut values = [0.0; LEVELS];
    for (v, row) in values.iter_mut().zip(d_sym.entries.rows()) {
        *v = row.sum() / cols as f64;
    }
    Ok(AttributeValueMap::new(values))
}

/// Every intermediate of one attribute's quantification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantification {
    pub cooccurrence: CooccurrenceMatrix,
    pub factors: FactorPair,
    pub ordering: SimilarityMatrix,
    pub symmetric: SimilarityMatrix,
    pub values: AttributeValueMap,
}

pub fn quantify_attribute(
    subsets: &[LearnerSubset],
    profiles: &HashMap<String, LearnerProfile>,
    attribute: NominalAttribute,
    params: &NmfParams,
) -> Result<Quantification> {
    let cooccurrence = build_cooccurrence(subsets, profiles, attribute)?;
    let factors = nmf(&cooccurrence, params)?;
    let ordering = derive_orderings(&factors);
    let symmetric = symmetrize(&ordering)?;
    let values = attribute_values(&symmetric)?;
    Ok(Quantification {
        cooccurrence,
        factors,
        ordering,
        symmetric,
        values,
    })
}

/// Both nominal attributes; presentation uses `seed + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantifiedAttributes {
    pub strategy: Quantification,
    pub presentation: Quantification,
}

impl QuantifiedAttributes {
    pub fn get(&self, attribute: NominalAttribute) -> &Quantification {
        match attribute {
            NominalAttribute::Strategy => &self.strategy,
            NominalAttribute::Presentation => &self.presentation,
        }
    }
}

pub fn quantify_all(
    subsets: &[LearnerSubset],
    profiles: &HashMap<String, LearnerProfile>,
    params: &NmfParams,
) -> Result<QuantifiedAttributes> {
    let presentation_params = NmfParams {
        seed: params.seed.wrapping_add(1),
        ..*params
    };
    let (strategy, presentation) = rayon::join(
        || quantify_attribute(subsets, profiles, NominalAttribute::Strategy, params),
        || {
            quantify_attribute(
                subsets,
                profiles,
                NominalAttribute::Presentation,
                &presentation_params,
            )
        },
    );
    Ok(QuantifiedAttributes {
        strategy: strategy?,
        presentation: presentation?,
    })
}

/// Most and least similar parameter pairs of a value map, by `|v_i - v_j|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub nearest: Vec<(u8, u8)>,
    pub nearest_distance: f64,
    pub farthest: Vec<(u8, u8)>,
    pub farthest_distance: f64,
}

pub fn pair_report(values: &AttributeValueMap) -> PairReport {
    let vals: Vec<(u8, f64)> = values.iter().collect();
    let mut pairs = Vec::new();
    for (i, &(p, vp)) in vals.iter().enumerate() {
        for &(q, vq) in &vals[i + 1..] {
            pairs.push(((p, q), (vp - vq).abs()));
        }
    }
    let nearest_distance = pairs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let farthest_distance = pairs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let pick = |d: f64| pairs.iter().filter(|p| p.1 == d).map(|p| p.0).collect();
    PairReport {
        nearest: pick(nearest_distance),
        nearest_distance,
        farthest: pick(farthest_distance),
        farthest_distance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use std::collections::BTreeSet;

    fn profile(id: &str, strategy: u8) -> LearnerProfile {
        LearnerProfile::new(id, 1, 2, strategy, 1, 5).unwrap()
    }

    fn subset(ids: &[&str]) -> LearnerSubset {
        LearnerSubset {
            resource_id: "r".into(),
            members: ids.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>(),
        }
    }

    #[test]
    fn single_learner_has_no_pairs() {
        let profiles: HashMap<_, _> = [("u1".to_string(), profile("u1", 2))].into();
        let a =
            build_cooccurrence(&[subset(&["u1"])], &profiles, NominalAttribute::Strategy).unwrap();
        assert_eq!(a, CooccurrenceMatrix::zeros(NominalAttribute::Strategy));
    }

    #[test]
    fn single_pair() {
        let profiles: HashMap<_, _> = [
            ("u1".to_string(), profile("u1", 1)),
            ("u2".to_string(), profile("u2", 3)),
        ]
        .into();
        let a = build_cooccurrence(
            &[subset(&["u1", "u2"])],
            &profiles,
            NominalAttribute::Strategy,
        )
        .unwrap();
        let mut expected = CooccurrenceMatrix::zeros(NominalAttribute::Strategy);
        expected.entries[0][2] = 1;
        expected.entries[2][0] = 1;
        assert_eq!(a, expected);
    }

    #[test]
    fn pair_in_two_subsets_counts_once() {
        let profiles: HashMap<_, _> = [
            ("u1".to_string(), profile("u1", 4)),
            ("u2".to_string(), profile("u2", 4)),
        ]
        .into();
        let subsets = [subset(&["u1", "u2"]), subset(&["u1", "u2"])];
        let a = build_cooccurrence(&subsets, &profiles, NominalAttribute::Strategy).unwrap();
        assert_eq!(a.entries[3][3], 1);
        assert_eq!(a.entries.iter().flatten().sum::<u64>(), 1);
    }

    #[test]
    fn missing_profile_is_named() {
        let profiles: HashMap<_, _> = [("u1".to_string(), profile("u1", 1))].into();
        let err = build_cooccurrence(
            &[subset(&["u1", "ghost"])],
            &profiles,
            NominalAttribute::Strategy,
        )
        .unwrap_err();
        assert!(err.to_string().contains("ghost"));
    }

    fn padded(values: &[&[f64]]) -> Array2<f64> {
        let mut a = Array2::zeros((5, 5));
        for (i, row) in values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                a[[i, j]] = v;
            }
        }
        a
    }

    #[test]
    fn rank_one_recovery() {
        let a = padded(&[&[3.0, 4.0], &[6.0, 8.0]]);
        let params = NmfParams {
            k: 1,
            max_iters: 1000,
            tol: 0.0,
            seed: 1,
        };
        let f = nmf_matrix(&a, &params).unwrap();
        assert!(f.final_error < 1e-6, "error {}", f.final_error);
    }

    #[test]
    fn zero_matrix_short_circuits() {
        let f = nmf_matrix(&Array2::zeros((5, 5)), &NmfParams::default()).unwrap();
        assert_eq!(f.final_error, 0.0);
        assert_eq!(f.error_trace, vec![0.0]);
        assert!(f.weights.iter().chain(f.features.iter()).all(|&x| x == 0.0));
        assert_eq!(f.weights.dim(), (5, 10));
    }

    #[test]
    fn nmf_rejects_bad_params() {
        let a = Array2::ones((2, 2));
        assert!(nmf_matrix(
            &a,
            &NmfParams {
                k: 0,
                ..Default::default()
            }
        )
        .is_err());
        assert!(nmf_matrix(
            &a,
            &NmfParams {
                max_iters: 0,
                ..Default::default()
            }
        )
        .is_err());
        let neg = array![[1.0, -1.0], [0.0, 1.0]];
        assert!(nmf_matrix(&neg, &NmfParams::default()).is_err());
    }

    #[test]
    fn ordering_picks_dominant_feature() {
        let factors = FactorPair {
            weights: array![[0.0, 7.0, 2.0], [0.0, 0.0, 0.0]],
            features: array![
                [9.0, 9.0, 9.0, 9.0, 9.0],
                [5.0, 4.0, 3.0, 2.0, 1.0],
                [1.0, 1.0, 1.0, 1.0, 1.0]
            ],
            k: 3,
            final_error: 0.0,
            error_trace: vec![],
        };
        let d = derive_orderings(&factors);
        assert_eq!(d.entries.row(0).to_vec(), vec![5.0, 4.0, 3.0, 2.0, 1.0]);
        assert_eq!(d.entries.row(1).to_vec(), vec![9.0; 5]);
    }

    #[test]
    fn symmetrize_takes_min() {
        let d = SimilarityMatrix {
            entries: array![[0.0, 5.0], [3.0, 0.0]],
        };
        assert_eq!(
            symmetrize(&d).unwrap().entries,
            array![[0.0, 3.0], [3.0, 0.0]]
        );
        let sym = SimilarityMatrix {
            entries: array![[1.0, 2.0], [2.0, 1.0]],
        };
        assert_eq!(symmetrize(&sym).unwrap(), sym);
        let rect = SimilarityMatrix {
            entries: Array2::zeros((2, 3)),
        };
        assert!(symmetrize(&rect).is_err());
    }

    #[test]
    fn row_means() {
        let mut entries = Array2::zeros((5, 5));
        entries.row_mut(2).fill(2.0);
        let values = attribute_values(&SimilarityMatrix { entries }).unwrap();
        assert_eq!(values.to_array(), [0.0, 0.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn one_learner_corpus_quantifies_to_zero() {
        let profiles: HashMap<_, _> = [("u1".to_string(), profile("u1", 2))].into();
        let q = quantify_attribute(
            &[subset(&["u1"])],
            &profiles,
            NominalAttribute::Strategy,
            &NmfParams::default(),
        )
        .unwrap();
        assert_eq!(q.values.to_array(), [0.0; 5]);
    }

    #[test]
    fn pair_report_finds_extremes() {
        let report = pair_report(&AttributeValueMap::new([0.0, 10.0, 4.0, 5.0, 4.5]));
        assert_eq!(report.nearest, vec![(3, 5), (4, 5)]);
        assert_eq!(report.farthest, vec![(1, 2)]);
        let flat = pair_report(&AttributeValueMap::new([1.0; 5]));
        assert_eq!(flat.nearest.len(), 10);
        assert_eq!(flat.nearest_distance, 0.0);
    }

    #[test]
    fn nearest_parameter_lookup() {
        let values = AttributeValueMap::new([0.0, 10.0, 4.0, 5.0, 4.5]);
        assert_eq!(values.nearest_parameters(9.0), vec![2]);
        assert_eq!(values.nearest_parameters(4.25), vec![3, 5]);
    }

    #[test]
    fn value_map_json_round_trip() {
        let values = AttributeValueMap::new([0.5, 1.0, 2.0, 3.0, 24240.0]);
        let text = serde_json::to_string(&values).unwrap();
        let back: AttributeValueMap = serde_json::from_str(&text).unwrap();
        assert_eq!(back, values);
        back.validate().unwrap();
    }
}
