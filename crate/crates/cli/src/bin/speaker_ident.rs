//! Text-independent speaker identification over the recognition
//! pipeline: train on sample directories, identify single files or
//! batches, and keep per-configuration and per-speaker statistics.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use patrec_cli::emit;
use patrec_cli::options::{self, Mode, OptionSet, StatsScope};
use patrec_core::classify::ResultSet;
use patrec_core::features::ExtractorKind;
use patrec_core::pipeline::{self, ClassifierKind, Loader, PipelineConfig};
use patrec_core::preprocess::{self, PreprocessMethod};
use patrec_core::storage::{SpeakerDb, StatsDb};

const SPEAKERS_FILE: &str = "speakers.txt";

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        eprintln!("No arguments have been specified.");
        print_usage();
        return 1;
    }
    let set = match options::parse(&args) {
        Ok(set) => set,
        Err(e) => {
            eprintln!("{e}");
            print_usage();
            return 1;
        }
    };
    for warning in &set.warnings {
        eprintln!("{warning}");
    }
    match dispatch(&set, &args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e:#}");
            2
        }
    }
}

fn dispatch(set: &OptionSet, argv: &[String]) -> Result<i32> {
    let debug = set.has("-debug");
    match &set.mode {
        Mode::Help => {
            print_usage();
            Ok(0)
        }
        Mode::Version => {
            println!(
                "Text-Independent Speaker Identification Application, v{}",
                env!("CARGO_PKG_VERSION")
            );
            Ok(0)
        }
        Mode::Gui => bail!("GUI is not implemented"),
        Mode::Reset => {
            let mut stats = open_stats();
            stats.config.reset();
            stats.speaker.reset();
            stats.dump()?;
            println!("Statistics has been reset.");
            Ok(0)
        }
        Mode::Stats(scope) => {
            let stats = open_stats();
            match scope {
                StatsScope::PerConfig => print!("{}", stats.config.print_stats(false)),
                StatsScope::PerSpeaker => print!("{}", stats.speaker.print_stats(false)),
                StatsScope::Both => {
                    print!("{}", stats.config.print_stats(false));
                    print!("{}", stats.speaker.print_stats(false));
                }
            }
            Ok(0)
        }
        Mode::BestScore => {
            let stats = open_stats();
            print!("{}", stats.config.print_stats(true));
            print!("{}", stats.speaker.print_stats(true));
            Ok(0)
        }
        Mode::Train | Mode::SingleTrain => {
            let cfg = build_config(set)?;
            if debug {
                eprintln!("Option set: {set:?}");
                eprintln!("Pipeline: {cfg:?}");
            }
            let db = SpeakerDb::load(SPEAKERS_FILE)
                .with_context(|| format!("Error opening speaker DB: {SPEAKERS_FILE:?}"))?;
            let target = set.target.as_deref().expect("target enforced by parser");
            if set.mode == Mode::SingleTrain {
                train_one(&cfg, set, &db, Path::new(target))?;
                pipeline::finish_training(&cfg)?;
                println!("Done training with file \"{target}\".");
            } else {
                for file in pipeline::batch_files(Path::new(target))? {
                    train_one(&cfg, set, &db, &file)?;
                }
                pipeline::finish_training(&cfg)?;
                println!("Done training on folder \"{target}\".");
            }
            Ok(0)
        }
        Mode::Ident => {
            let cfg = build_config(set)?;
            let db = load_db_or_empty(debug);
            let mut stats = open_stats();
            let config_key = pipeline::config_string(&cfg, argv);
            let target = set.target.as_deref().expect("target enforced by parser");
            ident_one(
                &cfg,
                set,
                &db,
                &mut stats,
                &config_key,
                Path::new(target),
                set.expected_id,
            )?;
            Ok(0)
        }
        Mode::BatchIdent => {
            let cfg = build_config(set)?;
            let db = load_db_or_empty(debug);
            let mut stats = open_stats();
            let config_key = pipeline::config_string(&cfg, argv);
            let target = set.target.as_deref().expect("target enforced by parser");
            let mut failures = 0usize;
            for file in pipeline::batch_files(Path::new(target))? {
                let expected = set
                    .expected_id
                    .or_else(|| db.id_by_filename(&file.to_string_lossy(), false));
                if let Err(e) = ident_one(
                    &cfg, set, &db, &mut stats, &config_key, &file, expected,
                ) {
                    eprintln!("{}: {e:#}", file.display());
                    failures += 1;
                }
            }
            if debug {
                eprintln!("Batch complete, {failures} failure(s).");
            }
            Ok(0)
        }
    }
}

/// Both statistics databases with their on-disk locations.
struct Stats {
    config: StatsDb,
    speaker: StatsDb,
    config_path: PathBuf,
    speaker_path: PathBuf,
}

impl Stats {
    fn dump(&self) -> Result<()> {
        self.config.dump(&self.config_path)?;
        self.speaker.dump(&self.speaker_path)?;
        Ok(())
    }
}

fn open_stats() -> Stats {
    let config_path = PathBuf::from(format!("config.{SPEAKERS_FILE}.stats"));
    let speaker_path = PathBuf::from(format!("speaker.{SPEAKERS_FILE}.stats"));
    let config = restore_notice(&config_path);
    let speaker = restore_notice(&speaker_path);
    Stats {
        config,
        speaker,
        config_path,
        speaker_path,
    }
}

fn restore_notice(path: &Path) -> StatsDb {
    match StatsDb::restore(path) {
        Ok((db, created)) => {
            if created {
                eprintln!(
                    "NOTICE: File {} does not seem to exist. Creating a new one....",
                    path.display()
                );
            }
            db
        }
        Err(e) => {
            eprintln!("WARNING: could not restore {}: {e}; starting fresh", path.display());
            StatsDb::new()
        }
    }
}

fn load_db_or_empty(debug: bool) -> SpeakerDb {
    match SpeakerDb::load(SPEAKERS_FILE) {
        Ok(db) => db,
        Err(e) => {
            if debug {
                eprintln!("NOTICE: no speaker DB ({e}); names will be unknown");
            }
            SpeakerDb::default()
        }
    }
}

fn train_one(cfg: &PipelineConfig, set: &OptionSet, db: &SpeakerDb, file: &Path) -> Result<()> {
    let path_str = file.to_string_lossy();
    match db.id_by_filename(&path_str, true) {
        None => {
            println!("No speaker found for \"{path_str}\" for training.");
        }
        Some(id) => {
            pipeline::train(cfg, file, id)
                .with_context(|| format!("training on {path_str}"))?;
            emit_dumps(cfg, set, file)?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn ident_one(
    cfg: &PipelineConfig,
    set: &OptionSet,
    db: &SpeakerDb,
    stats: &mut Stats,
    config_key: &str,
    file: &Path,
    expected: Option<u32>,
) -> Result<()> {
    let expected = expected.or_else(|| db.id_by_filename(&file.to_string_lossy(), false));
    let started = std::time::Instant::now();
    let result = pipeline::recognize(cfg, file)?;
    let elapsed = started.elapsed();
    emit_dumps(cfg, set, file)?;

    let identified = result
        .identified()
        .map(|m| m.subject_id)
        .context("classifier returned no candidates")?;
    let second = result.second_closest().map(|m| m.subject_id);

    println!("                 File: {}", file.display());
    println!("               Config: {config_key}");
    println!("      Processing time: {}", format_duration(elapsed));
    println!("         Speaker's ID: {identified}");
    println!("   Speaker identified: {}", db.name_of(identified));
    if let Some(expected_id) = expected {
        println!("Expected Speaker's ID: {expected_id}");
        println!("     Expected Speaker: {}", db.name_of(expected_id));
        record_stats(stats, config_key, &db.name_of(expected_id), &result, expected_id)?;
    }
    match second {
        Some(id) => {
            println!("       Second Best ID: {id}");
            println!("     Second Best Name: {}", db.name_of(id));
        }
        None => println!("       Second Best ID: -1"),
    }
    println!(
        "            Date/time: {}",
        chrono::Local::now().format("%a %b %e %H:%M:%S %Z %Y")
    );
    println!("----------------------------8<------------------------------");
    Ok(())
}

/// Adds first- and second-guess entries to both databases and persists
/// them immediately, so an interrupted batch keeps its counts.
fn record_stats(
    stats: &mut Stats,
    config_key: &str,
    speaker_key: &str,
    result: &ResultSet,
    expected: u32,
) -> Result<()> {
    let first = result.identified().map(|m| m.subject_id) == Some(expected);
    let second = first || result.second_closest().map(|m| m.subject_id) == Some(expected);
    stats.config.add_stats(config_key, first, false);
    stats.config.add_stats(config_key, second, true);
    stats.speaker.add_stats(speaker_key, first, false);
    stats.speaker.add_stats(speaker_key, second, true);
    stats.dump()
}

fn emit_dumps(cfg: &PipelineConfig, set: &OptionSet, file: &Path) -> Result<()> {
    if !set.has("-graph") && !set.has("-spectrogram") {
        return Ok(());
    }
    let sample = pipeline::load_sample(cfg, file)?;
    let stem = file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sample".to_string());
    if set.has("-graph") {
        emit::emit_wave_graph(&sample, file.with_file_name(format!("{stem}.wave.tsv")))?;
    }
    if set.has("-spectrogram") {
        let preprocessed = preprocess::preprocess(&cfg.prep, &sample)?;
        let frames = emit::spectrogram_frames(&preprocessed)?;
        emit::emit_spectrogram(
            &frames,
            file.with_file_name(format!("{stem}.spectrogram.ppm")),
        )?;
    }
    Ok(())
}

fn build_config(set: &OptionSet) -> Result<PipelineConfig> {
    let unimplemented = set.unimplemented_flags();
    if !unimplemented.is_empty() {
        bail!("option {} is NOT IMPLEMENTED", unimplemented.join(", "));
    }

    let mut cfg = PipelineConfig::default();
    if set.has("-text") {
        cfg.loader = Loader::Text;
    }

    cfg.prep.method = match set.first_of(&[
        "-raw",
        "-norm",
        "-low",
        "-high",
        "-band",
        "-bandstop",
        "-boost",
        "-highpassboost",
        "-endp",
    ]) {
        Some("-raw") => PreprocessMethod::Raw,
        Some("-low") => PreprocessMethod::LowPass,
        Some("-high") => PreprocessMethod::HighPass,
        Some("-band") => PreprocessMethod::BandPass,
        Some("-bandstop") => PreprocessMethod::BandStop,
        Some("-boost") => PreprocessMethod::Boost,
        Some("-highpassboost") => PreprocessMethod::HighPassBoost,
        Some("-endp") => PreprocessMethod::Endpoint,
        _ => PreprocessMethod::Normalize,
    };
    cfg.prep.remove_silence = set.has("-silence");
    if set.has("-noise") {
        // Accepted for compatibility; there is no noise-removal
        // algorithm behind it.
        cfg.prep.noise = true;
        eprintln!("WARNING: -noise is accepted but noise removal is not implemented; ignoring.");
    }

    cfg.feat_kind = match set.first_of(&["-fft", "-lpc", "-minmax", "-randfe", "-aggr"]) {
        Some("-lpc") => ExtractorKind::Lpc,
        Some("-minmax") => ExtractorKind::MinMax,
        Some("-randfe") => ExtractorKind::Random,
        Some("-aggr") => ExtractorKind::Aggregate,
        _ => ExtractorKind::Fft,
    };

    cfg.classifier = match set.first_of(&[
        "-eucl", "-cheb", "-mink", "-mah", "-diff", "-hamming", "-cos", "-nn", "-randcl",
    ]) {
        Some("-cheb") => ClassifierKind::Chebyshev,
        Some("-mink") => ClassifierKind::minkowski(),
        Some("-mah") => ClassifierKind::Mahalanobis,
        Some("-diff") => ClassifierKind::diff(),
        Some("-hamming") => ClassifierKind::Hamming,
        Some("-cos") => ClassifierKind::Cosine,
        Some("-nn") => ClassifierKind::neural_net(),
        Some("-randcl") => ClassifierKind::Random,
        _ => ClassifierKind::Euclidean,
    };

    cfg.dump_spectrogram = set.has("-spectrogram");
    cfg.dump_wave_graph = set.has("-graph");
    Ok(cfg)
}

fn format_duration(d: std::time::Duration) -> String {
    let total_ms = d.as_millis();
    let days = total_ms / 86_400_000;
    let hours = total_ms % 86_400_000 / 3_600_000;
    let minutes = total_ms % 3_600_000 / 60_000;
    let seconds = total_ms % 60_000 / 1000;
    let millis = total_ms % 1000;
    format!("{days}d:{hours}h:{minutes}m:{seconds}s:{millis}ms:{total_ms}ms")
}

fn print_usage() {
    println!(
        "Usage:
  speaker-ident --train <samples-dir> [options]         -- train mode
                --single-train <sample> [options]       -- add a single sample to the training set
                --ident <sample> [options]              -- identification mode
                --batch-ident <samples-dir> [options]   -- batch identification mode
                --gui                                   -- use GUI as a user interface (NOT IMPLEMENTED)
                --stats=[per-config|per-speaker|both]   -- display stats (default is both)
                --best-score                            -- display best classification result
                --reset                                 -- reset stats
                --version                               -- display version info
                --help | -h                             -- display this help and exit

Options (one or more of the following):

Loaders:

  -wav          - assume WAVE files loading (default)
  -text         - assume loading of text samples

Preprocessing:

  -silence      - remove silence (can be combined with any of the below)
  -noise        - remove noise (NOT IMPLEMENTED; accepted and ignored)
  -raw          - no preprocessing
  -norm         - use just normalization, no filtering
  -low          - use low-pass FFT filter
  -high         - use high-pass FFT filter
  -boost        - use high-frequency-boost FFT preprocessor
  -band         - use band-pass FFT filter
  -bandstop     - use band-stop FFT filter
  -highpassboost - use high-pass and high-frequency-boost preprocessors in sequence
  -endp         - use endpointing
  -lowcfe       - use low-pass CFE filter (NOT IMPLEMENTED)
  -highcfe      - use high-pass CFE filter (NOT IMPLEMENTED)
  -bandcfe      - use band-pass CFE filter (NOT IMPLEMENTED)
  -bandstopcfe  - use band-stop CFE filter (NOT IMPLEMENTED)

Feature Extraction:

  -lpc          - use LPC
  -fft          - use FFT
  -minmax       - use Min/Max Amplitudes
  -randfe       - use random feature extraction
  -aggr         - use aggregated FFT+LPC feature extraction
  -f0           - use F0 (NOT IMPLEMENTED)
  -segm         - use Segmentation (NOT IMPLEMENTED)
  -cepstral     - use Cepstral analysis (NOT IMPLEMENTED)

Classification:

  -nn           - use Neural Network
  -cheb         - use Chebyshev Distance
  -eucl         - use Euclidean Distance
  -mink         - use Minkowski Distance
  -mah          - use Mahalanobis Distance
  -diff         - use Diff-Distance
  -zipf         - use Zipf's Law-based classifier (NOT IMPLEMENTED)
  -randcl       - use random classification
  -markov       - use Hidden Markov Models (NOT IMPLEMENTED)
  -hamming      - use Hamming Distance
  -cos          - use Cosine Similarity Measure

Misc:

  -debug        - include verbose debug output
  -spectrogram  - dump spectrogram image after feature extraction
  -graph        - dump wave graph before preprocessing and after feature extraction
  <integer>     - expected speaker ID
"
    );
}
