//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on validation errors (bad flags, bad data),
//! 2 on I/O errors.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::ingest::{
    build_all_subsets, generate_profiles, learner_ids, parse_profiles, parse_ratings,
    write_profiles, LearnerProfile, RatingRecord,
};
use crate::pipeline::{
    self, analyze_resource, load_store, match_resources, save_store, PipelineConfig,
};
use crate::plot;
use crate::quantify::{quantify_all, NominalAttribute, QuantifiedAttributes};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "learntag",
    version,
    about = "Tag learning resources with the profiles of the learners who rate them highly"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse the input files and report row counts.
    IngestCheck {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Write seeded random profiles for every learner in the ratings file.
    SynthProfiles {
        #[arg(long)]
        ratings: PathBuf,
        /// Seed for the generated profiles.
        #[arg(long, default_value_t = 0)]
        synth_seed: u64,
        /// Reject malformed rating rows instead of skipping them.
        #[arg(long)]
        strict: bool,
        /// Output CSV; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quantify the nominal attributes and dump every intermediate matrix as JSON.
    Quantify {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the whole pipeline and write the tag store.
    Tag {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Tag store JSON; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-resource (k, sse, avg_diameter) CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Text report, one line per tagged resource.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Quantified values JSON, as written by `quantify`.
        #[arg(long)]
        values_out: Option<PathBuf>,
    },
    /// Rank stored resources against a learner profile.
    Match {
        #[arg(long)]
        store: PathBuf,
        /// Quantified values JSON, as written by `quantify` or `tag --values-out`.
        #[arg(long)]
        values: PathBuf,
        /// `a1,a2,a3,a4,a5_hours`
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Strip chart of one attribute's quantified values.
    ExportValues {
        /// `strategy` or `presentation`.
        #[arg(long)]
        attribute: NominalAttribute,
        /// Precomputed values; otherwise computed from the ratings.
        #[arg(long)]
        values: Option<PathBuf>,
        #[command(flatten)]
        data: OptionalDataArgs,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parallel coordinates plot of one resource's subset, colored by cluster.
    ExportParcoords {
        #[arg(long)]
        resource: String,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Ratings file (`"User-ID";"ISBN";"Book-Rating"`).
    #[arg(long)]
    pub ratings: PathBuf,
    /// Profiles file (`learner_id,a1,a2,a3,a4,a5_hours`); synthesized when absent.
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// Seed for synthesized profiles.
    #[arg(long, default_value_t = 0)]
    pub synth_seed: u64,
    /// Reject malformed rating rows instead of skipping them.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OptionalDataArgs {
    #[arg(long)]
    pub ratings: Option<PathBuf>,
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub synth_seed: u64,
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Minimum rating for subset membership.
    #[arg(long, default_value_t = 6)]
    pub delta0: u8,
    /// Apriori support level.
    #[arg(long, default_value_t = 0.1)]
    pub support: f64,
    /// NMF feature count.
    #[arg(long, default_value_t = 10)]
    pub features: usize,
    #[arg(long, default_value_t = 500)]
    pub nmf_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub nmf_tol: f64,
    /// Largest number of clusters tried.
    #[arg(long, default_value_t = 8)]
    pub kmax: usize,
    /// Diameter jump factor.
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    /// Smallest subset that gets tagged.
    #[arg(long, default_value_t = 10)]
    pub min_subset: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl ConfigArgs {
    pub fn to_config(&self) -> PipelineConfig {
        PipelineConfig {
            delta0: self.delta0,
            support_sl: self.support,
            nmf_k: self.features,
            nmf_max_iters: self.nmf_iters,
            nmf_tol: self.nmf_tol,
            k_max: self.kmax,
            gamma: self.gamma,
            seed: self.seed,
            min_subset: self.min_subset,
        }
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, path: Option<&Path>, contents: &str) -> Result<()> {
        match path {
            Some(p) => write_file(p, contents),
            None => self
                .out
                .write_all(contents.as_bytes())
                .map_err(|e| Error::io("<stdout>", e)),
        }
    }

    fn note(&mut self, msg: impl AsRef<str>) {
        let _ = writeln!(self.err, "{}", msg.as_ref());
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn read_ratings(path: &Path, strict: bool, io: &mut Io) -> Result<Vec<RatingRecord>> {
    let parsed = parse_ratings(open(path)?, strict).map_err(|e| match e {
        Error::Malformed { line, reason } => Error::Malformed {
            line,
            reason: format!("{}: {reason}", path.display()),
        },
        other => other,
    })?;
    io.note(format!(
        "{}: {} ratings, {} implicit dropped, {} malformed skipped",
        path.display(),
        parsed.records.len(),
        parsed.dropped_implicit,
        parsed.malformed
    ));
    Ok(parsed.records)
}

fn read_profiles(
    path: Option<&Path>,
    synth_seed: u64,
    ratings: &[RatingRecord],
    io: &mut Io,
) -> Result<HashMap<String, LearnerProfile>> {
    match path {
        Some(path) => {
            let parsed = parse_profiles(open(path)?)?;
            io.note(format!(
                "{}: {} profiles, {} rejected, {} duplicates",
                path.display(),
                parsed.profiles.len(),
                parsed.rejected.len(),
                parsed.duplicates
            ));
            for row in parsed.rejected.iter().take(10) {
                io.note(format!("  line {}: {}", row.line, row.reason));
            }
            Ok(parsed.into_map())
        }
        None => {
            let ids = learner_ids(ratings);
            io.note(format!(
                "synthesized {} profiles with seed {synth_seed}",
                ids.len()
            ));
            Ok(generate_profiles(&ids, synth_seed)
                .into_iter()
                .map(|p| (p.learner_id.clone(), p))
                .collect())
        }
    }
}

fn load_data(
    data: &DataArgs,
    io: &mut Io,
) -> Result<(Vec<RatingRecord>, HashMap<String, LearnerProfile>)> {
    let ratings = read_ratings(&data.ratings, data.strict, io)?;
    let profiles = read_profiles(data.profiles.as_deref(), data.synth_seed, &ratings, io)?;
    Ok((ratings, profiles))
}

fn quantify_from(
    ratings: &[RatingRecord],
    profiles: &HashMap<String, LearnerProfile>,
    config: &PipelineConfig,
) -> Result<QuantifiedAttributes> {
    config.validate()?;
    let subsets = build_all_subsets(ratings, config.delta0)?;
    quantify_all(&subsets, profiles, &config.nmf_params())
}

fn values_json(values: &QuantifiedAttributes) -> String {
    let mut text = serde_json::to_string_pretty(values).expect("values serialize");
    text.push('\n');
    text
}

fn load_values(path: &Path) -> Result<QuantifiedAttributes> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let values: QuantifiedAttributes =
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
    values.strategy.values.validate()?;
    values.presentation.values.validate()?;
    Ok(values)
}

fn parse_profile_arg(text: &str) -> Result<LearnerProfile> {
    let fields: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || {
        Error::InvalidArgument(format!(
            "--profile expects a1,a2,a3,a4,a5_hours, got {text:?}"
        ))
    };
    if fields.len() != 5 {
        return Err(bad());
    }
    let small = |s: &str| s.parse::<u8>().map_err(|_| bad());
    LearnerProfile::new(
        "query",
        small(fields[0])?,
        small(fields[1])?,
        small(fields[2])?,
        small(fields[3])?,
        fields[4].parse::<u32>().map_err(|_| bad())?,
    )
    .map_err(Error::InvalidArgument)
}

fn execute(command: Command, io: &mut Io) -> Result<()> {
    match command {
        Command::IngestCheck { data } => {
            let (ratings, profiles) = load_data(&data, io)?;
            let missing = learner_ids(&ratings)
                .into_iter()
                .filter(|id| !profiles.contains_key(id))
                .count();
            let resources = build_all_subsets(&ratings, 1)?.len();
            let summary = format!(
                "ratings\t{}\nlearners\t{}\nresources\t{}\nprofiles\t{}\nlearners_without_profile\t{}\n",
                ratings.len(),
                learner_ids(&ratings).len(),
                resources,
                profiles.len(),
                missing
            );
            io.emit(None, &summary)
        }
        Command::SynthProfiles {
            ratings,
            synth_seed,
            strict,
            out,
        } => {
            let records = read_ratings(&ratings, strict, io)?;
            let profiles = generate_profiles(&learner_ids(&records), synth_seed);
            let mut buf = Vec::new();
            write_profiles(&mut buf, &profiles)?;
            io.emit(out.as_deref(), &String::from_utf8(buf).expect("ascii csv"))
        }
        Command::Quantify { data, config, out } => {
            let (ratings, profiles) = load_data(&data, io)?;
            let values = quantify_from(&ratings, &profiles, &config.to_config())?;
            io.emit(out.as_deref(), &values_json(&values))
        }
        Command::Tag {
            data,
            config,
            out,
            trace,
            report,
            values_out,
        } => {
            let (ratings, profiles) = load_data(&data, io)?;
            let result = pipeline::run(&config.to_config(), &ratings, &profiles)?;
            io.note(result.summary());
            if let Some(path) = &trace {
                write_file(path, &result.trace_csv())?;
            }
            if let Some(path) = &report {
                write_file(path, &result.store.report())?;
            }
            if let Some(path) = &values_out {
                write_file(path, &values_json(&result.values))?;
            }
            match &out {
                Some(path) => save_store(&result.store, path),
                None => io.emit(None, &result.store.to_json()),
            }
        }
        Command::Match {
            store,
            values,
            profile,
            top,
            out,
        } => {
            let profile = parse_profile_arg(&profile)?;
            let store = load_store(&store)?;
            let values = load_values(&values)?;
            let ranked = match_resources(
                &profile,
                &store,
                &values.strategy.values,
                &values.presentation.values,
                top,
            )?;
            let mut text = String::new();
            for (id, score) in ranked {
                text.push_str(&format!("{id}\t{score:.4}\n"));
            }
            io.emit(out.as_deref(), &text)
        }
        Command::ExportValues {
            attribute,
            values,
            data,
            config,
            out,
        } => {
            let values = match (values, data.ratings) {
                (Some(path), _) => load_values(&path)?,
                (None, Some(ratings)) => {
                    let data = DataArgs {
                        ratings,
                        profiles: data.profiles,
                        synth_seed: data.synth_seed,
                        strict: data.strict,
                    };
                    let (ratings, profiles) = load_data(&data, io)?;
                    quantify_from(&ratings, &profiles, &config.to_config())?
                }
                (None, None) => {
                    return Err(Error::InvalidArgument(
                        "export-values needs --values or --ratings".into(),
                    ))
                }
            };
            plot::export_values(&values.get(attribute).values, attribute, &out)
        }
        Command::ExportParcoords {
            resource,
            data,
            config,
            out,
            trace,
        } => {
            let (ratings, profiles) = load_data(&data, io)?;
            let config = config.to_config();
            let values = quantify_from(&ratings, &profiles, &config)?;
            let subset = build_all_subsets(&ratings, config.delta0)?
                .into_iter()
                .find(|s| s.resource_id == resource)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "resource {resource:?} has no learners rated at or above {}",
                        config.delta0
                    ))
                })?;
            let analysis = analyze_resource(&subset, &profiles, &values, &config)?;
            if let Some(path) = &trace {
                write_file(
                    path,
                    &pipeline::trace_csv([(resource.as_str(), analysis.trace())]),
                )?;
            }
            io.note(format!(
                "{resource}: {} learners, k = {}, largest cluster {}",
                analysis.points.len(),
                analysis.chosen_k(),
                analysis.largest.len()
            ));
            plot::export_parcoords(
                &analysis.points,
                &analysis.assignment(),
                &format!("Parallel coordinates for {resource}"),
                &out,
            )
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let mut io = Io { out, err };
    match execute(cli.command, &mut io) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            io.note(format!("error: {e}"));
            if e.is_io() {
                EXIT_IO
            } else {
                EXIT_VALIDATION
            }
        }
    }
}
