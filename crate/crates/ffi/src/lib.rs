//! C ABI over `learntag`.
//!
//! Every fallible call returns an [`LtStatus`]. On failure the message is
//! kept per thread and read back with [`lt_last_error_message`]. Stores and
//! match lists are opaque handles released by their `_free` function;
//! strings handed out by the library are released with [`lt_string_free`].

use std::cell::RefCell;
use std::collections::HashMap;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use learntag::ingest::{
    generate_profiles, learner_ids, parse_profiles, parse_ratings, LearnerProfile,
};
use learntag::pipeline::{self, load_store, match_resources, save_store};
use learntag::{AttributeValueMap, Error, PipelineConfig, TagStore};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Data = 5,
    Panic = 6,
}

/// Pipeline settings. Start from [`lt_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LtConfig {
    /// Minimum rating (1..=10) for a learner to join a resource's subset.
    pub delta0: u8,
    pub support: f64,
    pub nmf_features: usize,
    pub nmf_max_iters: usize,
    pub nmf_tol: f64,
    pub k_max: usize,
    pub gamma: f64,
    pub seed: u64,
    pub min_subset: usize,
}

impl From<LtConfig> for PipelineConfig {
    fn from(c: LtConfig) -> Self {
        PipelineConfig {
            delta0: c.delta0,
            support_sl: c.support,
            nmf_k: c.nmf_features,
            nmf_max_iters: c.nmf_max_iters,
            nmf_tol: c.nmf_tol,
            k_max: c.k_max,
            gamma: c.gamma,
            seed: c.seed,
            min_subset: c.min_subset,
        }
    }
}

/// A learner to match against stored tags.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LtProfile {
    pub current_skill: u8,
    pub target_skill: u8,
    pub strategy: u8,
    pub presentation: u8,
    pub learning_time: u32,
}

/// Opaque tag store.
pub struct LtStore {
    inner: TagStore,
}

/// Opaque ranked match list.
pub struct LtMatches {
    ids: Vec<CString>,
    scores: Vec<f64>,
}

struct Failure {
    status: LtStatus,
    message: String,
}

impl Failure {
    fn new(status: LtStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_io() {
            LtStatus::Io
        } else {
            match e {
                Error::Malformed { .. }
                | Error::Header { .. }
                | Error::Json { .. }
                | Error::Csv(_) => LtStatus::Parse,
                Error::InvalidArgument(_) => LtStatus::InvalidArgument,
                _ => LtStatus::Data,
            }
        };
        Failure::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LtStatus::Ok,
        Ok(Err(failure)) => {
            set_last_error(&failure.message);
            failure.status
        }
        Err(_) => {
            set_last_error("internal panic");
            LtStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::new(LtStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(LtStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn values_arg(p: *const f64, what: &str) -> Result<AttributeValueMap, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let values = AttributeValueMap::new(std::array::from_fn(|i| *p.add(i)));
    values.validate()?;
    Ok(values)
}

fn open(path: &PathBuf) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::new(LtStatus::Io, format!("{}: {e}", path.display())))
}

/// Default settings.
#[no_mangle]
pub extern "C" fn lt_config_default() -> LtConfig {
    let c = PipelineConfig::default();
    LtConfig {
        delta0: c.delta0,
        support: c.support_sl,
        nmf_features: c.nmf_k,
        nmf_max_iters: c.nmf_max_iters,
        nmf_tol: c.nmf_tol,
        k_max: c.k_max,
        gamma: c.gamma,
        seed: c.seed,
        min_subset: c.min_subset,
    }
}

/// Runs the whole pipeline over a ratings file.
///
/// `profiles_path` may be null, in which case profiles are synthesized with
/// `synth_seed`. `config` may be null for the defaults. When non-null,
/// `out_strategy` and `out_presentation` receive the five quantified values
/// of parameters 1..=5.
///
/// # Safety
/// Path arguments must be null or NUL-terminated strings. `out_store` must be
/// valid for a write; the value arrays, when given, must hold five doubles.
#[no_mangle]
pub unsafe extern "C" fn lt_run_files(
    ratings_path: *const c_char,
    profiles_path: *const c_char,
    synth_seed: u64,
    config: *const LtConfig,
    out_store: *mut *mut LtStore,
    out_strategy: *mut f64,
    out_presentation: *mut f64,
) -> LtStatus {
    guard(|| {
        if out_store.is_null() {
            return Err(null("out_store"));
        }
        let ratings_path = PathBuf::from(str_arg(ratings_path, "ratings_path")?);
        let config: PipelineConfig = if config.is_null() {
            PipelineConfig::default()
        } else {
            (*config).into()
        };

        let ratings = parse_ratings(open(&ratings_path)?, false)?.records;
        let profiles: HashMap<String, LearnerProfile> = if profiles_path.is_null() {
            generate_profiles(&learner_ids(&ratings), synth_seed)
                .into_iter()
                .map(|p| (p.learner_id.clone(), p))
                .collect()
        } else {
            let path = PathBuf::from(str_arg(profiles_path, "profiles_path")?);
            parse_profiles(open(&path)?)?.into_map()
        };

        let result = pipeline::run(&config, &ratings, &profiles)?;
        for (out, values) in [
            (out_strategy, &result.values.strategy.values),
            (out_presentation, &result.values.presentation.values),
        ] {
            if !out.is_null() {
                for (i, v) in values.to_array().into_iter().enumerate() {
                    *out.add(i) = v;
                }
            }
        }
        *out_store = Box::into_raw(Box::new(LtStore {
            inner: result.store,
        }));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out_store` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lt_store_load(
    path: *const c_char,
    out_store: *mut *mut LtStore,
) -> LtStatus {
    guard(|| {
        if out_store.is_null() {
            return Err(null("out_store"));
        }
        let store = load_store(str_arg(path, "path")?)?;
        *out_store = Box::into_raw(Box::new(LtStore { inner: store }));
        Ok(())
    })
}

/// # Safety
/// `store` must come from this library; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lt_store_save(store: *const LtStore, path: *const c_char) -> LtStatus {
    guard(|| {
        let store = store.as_ref().ok_or_else(|| null("store"))?;
        save_store(&store.inner, str_arg(path, "path")?)?;
        Ok(())
    })
}

/// Number of resources in the store; 0 for a null handle.
///
/// # Safety
/// `store` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn lt_store_len(store: *const LtStore) -> usize {
    store.as_ref().map_or(0, |s| s.inner.len())
}

/// One line per tagged resource, `<id>\t<tags>`. Free with [`lt_string_free`].
///
/// # Safety
/// `store` must come from this library and `out` be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lt_store_report(store: *const LtStore, out: *mut *mut c_char) -> LtStatus {
    guard(|| {
        let store = store.as_ref().ok_or_else(|| null("store"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = to_c_string(store.inner.report());
        Ok(())
    })
}

/// Rendered tag cloud of one resource. Free with [`lt_string_free`].
///
/// # Safety
/// `store` must come from this library, `resource_id` must be a
/// NUL-terminated string and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn lt_store_render(
    store: *const LtStore,
    resource_id: *const c_char,
    out: *mut *mut c_char,
) -> LtStatus {
    guard(|| {
        let store = store.as_ref().ok_or_else(|| null("store"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let id = str_arg(resource_id, "resource_id")?;
        let cloud = store.inner.get(id).ok_or_else(|| {
            Failure::new(
                LtStatus::InvalidArgument,
                format!("no resource {id:?} in store"),
            )
        })?;
        *out = to_c_string(cloud.render());
        Ok(())
    })
}

/// # Safety
/// `store` must be null or come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lt_store_free(store: *mut LtStore) {
    if !store.is_null() {
        drop(Box::from_raw(store));
    }
}

/// Ranks the stored resources for `profile`, best first.
///
/// # Safety
/// `store` must come from this library, `profile` must point to a valid
/// profile, both value arrays must hold five doubles and `out` must be valid
/// for a write.
#[no_mangle]
pub unsafe extern "C" fn lt_match(
    store: *const LtStore,
    profile: *const LtProfile,
    strategy_values: *const f64,
    presentation_values: *const f64,
    top_n: usize,
    out: *mut *mut LtMatches,
) -> LtStatus {
    guard(|| {
        let store = store.as_ref().ok_or_else(|| null("store"))?;
        let p = profile.as_ref().ok_or_else(|| null("profile"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let sv = values_arg(strategy_values, "strategy_values")?;
        let pv = values_arg(presentation_values, "presentation_values")?;
        let profile = LearnerProfile::new(
            "query",
            p.current_skill,
            p.target_skill,
            p.strategy,
            p.presentation,
            p.learning_time,
        )
        .map_err(|reason| Failure::new(LtStatus::InvalidArgument, reason))?;

        let ranked = match_resources(&profile, &store.inner, &sv, &pv, top_n)?;
        let (ids, scores) = ranked
            .into_iter()
            .map(|(id, score)| (CString::new(id).unwrap_or_default(), score))
            .unzip();
        *out = Box::into_raw(Box::new(LtMatches { ids, scores }));
        Ok(())
    })
}

/// # Safety
/// `matches` must be null or come from [`lt_match`].
#[no_mangle]
pub unsafe extern "C" fn lt_matches_len(matches: *const LtMatches) -> usize {
    matches.as_ref().map_or(0, |m| m.ids.len())
}

/// Resource id at `index`, owned by the list; null when out of range.
///
/// # Safety
/// `matches` must be null or come from [`lt_match`].
#[no_mangle]
pub unsafe extern "C" fn lt_matches_resource(
    matches: *const LtMatches,
    index: usize,
) -> *const c_char {
    matches
        .as_ref()
        .and_then(|m| m.ids.get(index))
        .map_or(ptr::null(), |id| id.as_ptr())
}

/// Score in `[0, 1]` at `index`; NaN when out of range.
///
/// # Safety
/// `matches` must be null or come from [`lt_match`].
#[no_mangle]
pub unsafe extern "C" fn lt_matches_score(matches: *const LtMatches, index: usize) -> f64 {
    matches
        .as_ref()
        .and_then(|m| m.scores.get(index).copied())
        .unwrap_or(f64::NAN)
}

/// # Safety
/// `matches` must be null or come from [`lt_match`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lt_matches_free(matches: *mut LtMatches) {
    if !matches.is_null() {
        drop(Box::from_raw(matches));
    }
}

fn to_c_string(text: String) -> *mut c_char {
    CString::new(text.replace('\0', " "))
        .expect("nul bytes removed")
        .into_raw()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn lt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn lt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
