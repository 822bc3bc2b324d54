use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use learntag::ingest::write_ratings;
use learntag::synth::SyntheticCorpus;
use learntag_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = lt_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn ratings_file(dir: &Path) -> CString {
    let path = dir.join("ratings.csv");
    let records = SyntheticCorpus::new(300, 30, 6000, 5).generate();
    write_ratings(std::fs::File::create(&path).unwrap(), &records).unwrap();
    c(path.to_str().unwrap())
}

#[test]
fn run_save_load_and_match() {
    let dir = tempfile::tempdir().unwrap();
    let ratings = ratings_file(dir.path());
    let mut config = lt_config_default();
    config.seed = 3;

    let mut store = ptr::null_mut();
    let mut sv = [0.0; 5];
    let mut pv = [0.0; 5];
    let status = unsafe {
        lt_run_files(
            ratings.as_ptr(),
            ptr::null(),
            1,
            &config,
            &mut store,
            sv.as_mut_ptr(),
            pv.as_mut_ptr(),
        )
    };
    assert_eq!(status, LtStatus::Ok);
    let len = unsafe { lt_store_len(store) };
    assert!(len > 0);
    assert!(sv.iter().chain(&pv).all(|&v| v > 0.0));

    let saved = c(dir.path().join("store.json").to_str().unwrap());
    assert_eq!(
        unsafe { lt_store_save(store, saved.as_ptr()) },
        LtStatus::Ok
    );
    let mut loaded = ptr::null_mut();
    assert_eq!(
        unsafe { lt_store_load(saved.as_ptr(), &mut loaded) },
        LtStatus::Ok
    );
    assert_eq!(unsafe { lt_store_len(loaded) }, len);

    let mut report = ptr::null_mut();
    assert_eq!(
        unsafe { lt_store_report(loaded, &mut report) },
        LtStatus::Ok
    );
    let text = unsafe { CStr::from_ptr(report) }
        .to_str()
        .unwrap()
        .to_string();
    unsafe { lt_string_free(report) };
    let first_id = text.lines().next().unwrap().split('\t').next().unwrap();

    let mut rendered = ptr::null_mut();
    let id = c(first_id);
    assert_eq!(
        unsafe { lt_store_render(loaded, id.as_ptr(), &mut rendered) },
        LtStatus::Ok
    );
    assert!(unsafe { CStr::from_ptr(rendered) }
        .to_str()
        .unwrap()
        .starts_with('['));
    unsafe { lt_string_free(rendered) };

    let profile = LtProfile {
        current_skill: 2,
        target_skill: 5,
        strategy: 3,
        presentation: 4,
        learning_time: 25,
    };
    let mut matches = ptr::null_mut();
    let status = unsafe { lt_match(loaded, &profile, sv.as_ptr(), pv.as_ptr(), 4, &mut matches) };
    assert_eq!(status, LtStatus::Ok);
    let n = unsafe { lt_matches_len(matches) };
    assert_eq!(n, 4.min(len));
    let scores: Vec<f64> = (0..n)
        .map(|i| unsafe { lt_matches_score(matches, i) })
        .collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    assert!(!unsafe { lt_matches_resource(matches, 0) }.is_null());
    assert!(unsafe { lt_matches_resource(matches, n) }.is_null());
    assert!(unsafe { lt_matches_score(matches, n) }.is_nan());

    unsafe {
        lt_matches_free(matches);
        lt_store_free(loaded);
        lt_store_free(store);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut store = ptr::null_mut();
    let missing = c("/no/such/ratings.csv");
    let status = unsafe {
        lt_run_files(
            missing.as_ptr(),
            ptr::null(),
            0,
            ptr::null(),
            &mut store,
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(status, LtStatus::Io);
    assert!(last_error().contains("/no/such/ratings.csv"));
    assert!(store.is_null());

    let status = unsafe {
        lt_run_files(
            ptr::null(),
            ptr::null(),
            0,
            ptr::null(),
            &mut store,
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(status, LtStatus::NullPointer);

    let dir = tempfile::tempdir().unwrap();
    let ratings = ratings_file(dir.path());
    let mut config = lt_config_default();
    config.support = 2.0;
    let status = unsafe {
        lt_run_files(
            ratings.as_ptr(),
            ptr::null(),
            0,
            &config,
            &mut store,
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(status, LtStatus::InvalidArgument);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "[1, 2").unwrap();
    let bad = c(bad.to_str().unwrap());
    assert_eq!(
        unsafe { lt_store_load(bad.as_ptr(), &mut store) },
        LtStatus::Parse
    );

    let profile = LtProfile {
        current_skill: 4,
        target_skill: 4,
        strategy: 1,
        presentation: 1,
        learning_time: 3,
    };
    let values = [1.0; 5];
    let mut matches = ptr::null_mut();
    let status = unsafe {
        lt_match(
            ptr::null(),
            &profile,
            values.as_ptr(),
            values.as_ptr(),
            3,
            &mut matches,
        )
    };
    assert_eq!(status, LtStatus::NullPointer);
    assert_eq!(unsafe { lt_store_len(ptr::null()) }, 0);
    unsafe {
        lt_store_free(ptr::null_mut());
        lt_matches_free(ptr::null_mut());
        lt_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/learntag.h"))
            .unwrap();
    for name in [
        "lt_config_default",
        "lt_run_files",
        "lt_store_load",
        "lt_store_save",
        "lt_store_len",
        "lt_store_report",
        "lt_store_render",
        "lt_store_free",
        "lt_match",
        "lt_matches_len",
        "lt_matches_resource",
        "lt_matches_score",
        "lt_matches_free",
        "lt_string_free",
        "lt_last_error_message",
        "lt_version",
        "typedef struct LtStore LtStore",
        "LT_STATUS_IO = 3",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn example_compiles_against_the_header() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = tempfile::tempdir().unwrap();
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-c"])
        .arg(root.join("examples/match.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg("-o")
        .arg(out.path().join("match.o"))
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<String, ()> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc)
        .arg("--version")
        .output()
        .map(|_| cc)
        .map_err(|_| ())
}
