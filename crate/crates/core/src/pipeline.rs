//! Orchestration of load -> preprocess -> extract -> classify for the
//! train and recognize flows, plus batch recognition with statistics.
//!
//! Training sets live in `data_dir` under
//! `training-set.<prep>.<feat>.bin`; neural-net weights under
//! `nn.<prep>.<feat>.bin`. Distance classifiers share one training set
//! per (preprocessing, feature) pair; the neural net retrains over the
//! stored cluster means at the end of a training session.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::audio::{self, AudioError, AudioFormat, Sample};
use crate::classify::{
    self, nn, ClassifyError, Metric, NeuralNet, ResultSet, DEFAULT_DIFF_ERROR,
    DEFAULT_DIFF_PENALTY, DEFAULT_MINKOWSKI_R,
};
use crate::features::{self, ExtractorKind, FeatureConfig, FeatureError, FeatureVector};
use crate::preprocess::{self, PreprocessConfig, PreprocessError};
use crate::storage::{
    ContainerReader, ContainerWriter, DumpFormat, SpeakerDb, StatsDb, StorageError, TrainingKey,
    TrainingSet,
};

const NN_KIND: &[u8; 4] = b"NNET";

/// Frequency of the generated tone behind the sine loader.
pub const SINE_LOADER_FREQ_HZ: f64 = 1000.0;
const SINE_LOADER_SECONDS: f64 = 3.0;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("load: {0}")]
    Load(#[from] AudioError),
    #[error("preprocess: {0}")]
    Preprocess(#[from] PreprocessError),
    #[error("extract: {0}")]
    Extract(#[from] FeatureError),
    #[error("classify: {0}")]
    Classify(#[from] ClassifyError),
    #[error("storage: {0}")]
    Storage(#[from] StorageError),
    #[error("no training data for configuration {0:?}; train first")]
    MissingTraining(String),
    #[error("directory {0:?} is not readable: {1}")]
    UnreadableDirectory(PathBuf, std::io::Error),
}

/// Sample-loading selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Loader {
    #[default]
    Wav,
    Text,
    /// Generates a fixed test tone; the path argument is ignored.
    Sine,
}

impl Loader {
    pub fn token(&self) -> &'static str {
        match self {
            Loader::Wav => "wav",
            Loader::Text => "text",
            Loader::Sine => "sine",
        }
    }
}

/// Classifier selection with per-method parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassifierKind {
    Euclidean,
    Chebyshev,
    Minkowski { r: f64 },
    Mahalanobis,
    Diff { error: f64, penalty: f64 },
    Hamming,
    Cosine,
    NeuralNet { epochs: usize, min_error: f64 },
    Random,
}

impl ClassifierKind {
    pub fn token(&self) -> &'static str {
        match self {
            ClassifierKind::Euclidean => "eucl",
            ClassifierKind::Chebyshev => "cheb",
            ClassifierKind::Minkowski { .. } => "mink",
            ClassifierKind::Mahalanobis => "mah",
            ClassifierKind::Diff { .. } => "diff",
            ClassifierKind::Hamming => "hamming",
            ClassifierKind::Cosine => "cos",
            ClassifierKind::NeuralNet { .. } => "nn",
            ClassifierKind::Random => "randcl",
        }
    }

    pub fn minkowski() -> Self {
        ClassifierKind::Minkowski {
            r: DEFAULT_MINKOWSKI_R,
        }
    }

    pub fn diff() -> Self {
        ClassifierKind::Diff {
            error: DEFAULT_DIFF_ERROR,
            penalty: DEFAULT_DIFF_PENALTY,
        }
    }

    pub fn neural_net() -> Self {
        ClassifierKind::NeuralNet {
            epochs: nn::DEFAULT_EPOCHS,
            min_error: nn::DEFAULT_MIN_ERROR,
        }
    }

    fn metric(&self) -> Option<Metric> {
        match *self {
            ClassifierKind::Euclidean => Some(Metric::Euclidean),
            ClassifierKind::Chebyshev => Some(Metric::Chebyshev),
            ClassifierKind::Minkowski { r } => Some(Metric::Minkowski { r }),
            ClassifierKind::Mahalanobis => Some(Metric::Mahalanobis),
            ClassifierKind::Diff { error, penalty } => Some(Metric::Diff { error, penalty }),
            ClassifierKind::Hamming => Some(Metric::Hamming),
            ClassifierKind::Cosine => Some(Metric::Cosine),
            ClassifierKind::NeuralNet { .. } | ClassifierKind::Random => None,
        }
    }
}

/// One full pipeline configuration.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub loader: Loader,
    pub prep: PreprocessConfig,
    pub feat_kind: ExtractorKind,
    pub feat: FeatureConfig,
    pub classifier: ClassifierKind,
    pub dump_spectrogram: bool,
    pub dump_wave_graph: bool,
    pub seed: u64,
    /// Where training sets, weights, and statistics live.
    pub data_dir: PathBuf,
}

impl Default for PipelineConfig {
    /// Normalization, FFT features, Euclidean distance: the
    /// application defaults.
    fn default() -> Self {
        PipelineConfig {
            loader: Loader::Wav,
            prep: PreprocessConfig::default(),
            feat_kind: ExtractorKind::Fft,
            feat: FeatureConfig::default(),
            classifier: ClassifierKind::Euclidean,
            dump_spectrogram: false,
            dump_wave_graph: false,
            seed: 0,
            data_dir: PathBuf::from("."),
        }
    }
}

impl PipelineConfig {
    pub fn training_key(&self, feature_len: usize) -> TrainingKey {
        TrainingKey::new(self.prep.method.token(), self.feat_kind.token(), feature_len)
    }

    pub fn training_set_path(&self) -> PathBuf {
        self.data_dir.join(format!(
            "training-set.{}.{}.bin",
            self.prep.method.token(),
            self.feat_kind.token()
        ))
    }

    pub fn nn_path(&self) -> PathBuf {
        self.data_dir.join(format!(
            "nn.{}.{}.bin",
            self.prep.method.token(),
            self.feat_kind.token()
        ))
    }

    fn config_label(&self) -> String {
        format!(
            "{} {} {}",
            self.prep.method.token(),
            self.feat_kind.token(),
            self.classifier.token()
        )
    }
}

/// Loads a sample through the configured loader.
pub fn load_sample(cfg: &PipelineConfig, path: &Path) -> Result<Sample, PipelineError> {
    Ok(match cfg.loader {
        Loader::Wav => audio::load_wav(path)?,
        Loader::Text => audio::load_text(path)?,
        Loader::Sine => audio::generate_sine(
            SINE_LOADER_FREQ_HZ,
            SINE_LOADER_SECONDS,
            AudioFormat::default(),
        )?,
    })
}

/// load -> preprocess -> extract with stage-labelled errors.
pub fn extract_features(
    cfg: &PipelineConfig,
    path: &Path,
) -> Result<FeatureVector, PipelineError> {
    let sample = load_sample(cfg, path)?;
    let preprocessed = preprocess::preprocess(&cfg.prep, &sample)?;
    let mut feat_cfg = cfg.feat.clone();
    feat_cfg.seed = cfg.seed;
    Ok(features::extract(cfg.feat_kind, &preprocessed, &feat_cfg)?)
}

/// Adds one sample to the configuration's training set and persists it.
pub fn train(cfg: &PipelineConfig, sample_path: &Path, subject: u32) -> Result<(), PipelineError> {
    let v = extract_features(cfg, sample_path)?;
    let ts_path = cfg.training_set_path();
    let mut ts = if ts_path.exists() {
        TrainingSet::restore(&ts_path, DumpFormat::GzipBinary)?
    } else {
        TrainingSet::new(cfg.training_key(v.len()))
    };
    ts.train_update(subject, &v.values)?;
    ts.dump(&ts_path, DumpFormat::GzipBinary)?;
    Ok(())
}

/// Ends a training session. The neural net retrains here over every
/// stored cluster mean and persists its weights; other classifiers
/// need no finalization.
pub fn finish_training(cfg: &PipelineConfig) -> Result<(), PipelineError> {
    let ClassifierKind::NeuralNet { epochs, min_error } = cfg.classifier else {
        return Ok(());
    };
    let ts = restore_training_set(cfg)?;
    let samples: Vec<(Vec<f64>, u32)> = ts
        .clusters()
        .iter()
        .map(|(&id, c)| (c.mean.clone(), id))
        .collect();
    let input = ts.key.feature_len;
    let max_id = samples.iter().map(|(_, id)| *id).max().unwrap_or(0);
    let out = nn::output_layer_size(max_id as usize + 1);
    let hidden = ((input + out) / 2).max(2);
    let mut net = NeuralNet::new(&[input, hidden, out], cfg.seed)?;
    net.train(&samples, epochs, min_error)?;
    dump_nn(&net, &cfg.nn_path())?;
    Ok(())
}

/// Classifies one sample against the stored training data.
pub fn recognize(cfg: &PipelineConfig, sample_path: &Path) -> Result<ResultSet, PipelineError> {
    let v = extract_features(cfg, sample_path)?;
    match cfg.classifier {
        ClassifierKind::NeuralNet { .. } => {
            let net = restore_nn(&cfg.nn_path())
                .map_err(|_| PipelineError::MissingTraining(cfg.config_label()))?;
            Ok(net.classify(&v.values)?)
        }
        ClassifierKind::Random => {
            let ts = restore_training_set(cfg)?;
            let mut hasher = DefaultHasher::new();
            sample_path.hash(&mut hasher);
            let seed = cfg.seed ^ hasher.finish();
            Ok(classify::classify_random(&ts.subject_ids(), seed)?)
        }
        _ => {
            let ts = restore_training_set(cfg)?;
            if v.len() != ts.key.feature_len {
                return Err(StorageError::FeatureLengthMismatch {
                    want: ts.key.feature_len,
                    got: v.len(),
                }
                .into());
            }
            let metric = cfg.classifier.metric().expect("distance classifier");
            Ok(classify::classify_distance(
                &v.values,
                &ts.cluster_means(),
                metric,
            )?)
        }
    }
}

fn restore_training_set(cfg: &PipelineConfig) -> Result<TrainingSet, PipelineError> {
    let path = cfg.training_set_path();
    if !path.exists() {
        return Err(PipelineError::MissingTraining(cfg.config_label()));
    }
    let ts = TrainingSet::restore(&path, DumpFormat::GzipBinary)?;
    if ts.is_empty() {
        return Err(PipelineError::MissingTraining(cfg.config_label()));
    }
    Ok(ts)
}

fn dump_nn(net: &NeuralNet, path: &Path) -> Result<(), StorageError> {
    use std::io::Write;
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    let mut w = ContainerWriter::new(file, NN_KIND)?;
    w.write_u64(net.layer_sizes().len() as u64)?;
    for &size in net.layer_sizes() {
        w.write_u64(size as u64)?;
    }
    w.write_f64(net.steepness)?;
    for layer in net.weights() {
        for row in layer {
            w.write_f64_slice(row)?;
        }
    }
    for layer in net.thresholds() {
        w.write_f64_slice(layer)?;
    }
    w.finish()?.flush()?;
    Ok(())
}

fn restore_nn(path: &Path) -> Result<NeuralNet, StorageError> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut r = ContainerReader::new(file, NN_KIND)?;
    let layer_count = r.read_u64()? as usize;
    let sizes: Vec<usize> = (0..layer_count)
        .map(|_| r.read_u64().map(|v| v as usize))
        .collect::<Result<_, _>>()?;
    if sizes.len() < 2 {
        return Err(StorageError::Corrupt("too few layers".into()));
    }
    let steepness = r.read_f64()?;
    let mut weights = Vec::new();
    for pair in sizes.windows(2) {
        let mut layer = Vec::with_capacity(pair[1]);
        for _ in 0..pair[1] {
            layer.push(r.read_f64_vec()?);
        }
        weights.push(layer);
    }
    let mut thresholds = Vec::new();
    for pair in sizes.windows(2) {
        let t = r.read_f64_vec()?;
        if t.len() != pair[1] {
            return Err(StorageError::Corrupt("threshold length".into()));
        }
        thresholds.push(t);
    }
    let mut net = NeuralNet::from_parts(sizes, weights, thresholds);
    net.steepness = steepness;
    Ok(net)
}

/// The configuration string used as the statistics key: every option
/// token after the mode argument and its target, each followed by one
/// space. With no extra arguments the configuration itself is encoded.
pub fn config_string(cfg: &PipelineConfig, argv: &[String]) -> String {
    if argv.len() > 2 {
        argv[2..].iter().map(|t| format!("{t} ")).collect()
    } else {
        let mut out = String::new();
        if cfg.prep.noise {
            out.push_str("-noise ");
        }
        if cfg.prep.remove_silence {
            out.push_str("-silence ");
        }
        out.push_str(&format!(
            "-{} -{} -{} ",
            cfg.prep.method.token(),
            cfg.feat_kind.token(),
            cfg.classifier.token()
        ));
        out
    }
}

/// Sample files eligible for batch processing: plain files whose name
/// ends in `.wav`, case-insensitively, sorted by name.
pub fn batch_files(dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| PipelineError::UnreadableDirectory(dir.to_path_buf(), e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| PipelineError::UnreadableDirectory(dir.to_path_buf(), e))?;
        let path = entry.path();
        let is_wav = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.to_lowercase().ends_with(".wav"));
        if path.is_file() && is_wav {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// What happened to one file of a batch.
#[derive(Debug)]
pub struct BatchOutcome {
    pub file: PathBuf,
    pub expected: Option<u32>,
    pub result: Result<ResultSet, PipelineError>,
}

/// Batch totals.
#[derive(Debug, Default)]
pub struct BatchSummary {
    /// Files recognized (or attempted).
    pub processed: usize,
    /// Files whose expected speaker was known and thus counted.
    pub recorded: usize,
    pub outcomes: Vec<BatchOutcome>,
}

/// Recognizes every eligible file in the directory. When the speakers
/// database knows the expected id (testing list), first- and
/// second-guess statistics are added to both databases under
/// `config_key` and the speaker's name respectively; `after_file` runs
/// after each file so callers can persist and report. Per-file errors
/// are collected and the batch continues.
pub fn batch_recognize(
    cfg: &PipelineConfig,
    dir: &Path,
    db: &SpeakerDb,
    config_key: &str,
    config_stats: &mut StatsDb,
    speaker_stats: &mut StatsDb,
    mut after_file: impl FnMut(&BatchOutcome, &StatsDb, &StatsDb),
) -> Result<BatchSummary, PipelineError> {
    let mut summary = BatchSummary::default();
    for file in batch_files(dir)? {
        let path_str = file.to_string_lossy();
        let expected = db.id_by_filename(&path_str, false);
        let result = recognize(cfg, &file);
        summary.processed += 1;

        if let (Ok(set), Some(expected_id)) = (&result, expected) {
            let first = set.identified().map(|m| m.subject_id) == Some(expected_id);
            let second =
                first || set.second_closest().map(|m| m.subject_id) == Some(expected_id);
            let speaker_key = db.name_of(expected_id);
            config_stats.add_stats(config_key, first, false);
            config_stats.add_stats(config_key, second, true);
            speaker_stats.add_stats(&speaker_key, first, false);
            speaker_stats.add_stats(&speaker_key, second, true);
            summary.recorded += 1;
        }

        let outcome = BatchOutcome {
            file,
            expected,
            result,
        };
        after_file(&outcome, config_stats, speaker_stats);
        summary.outcomes.push(outcome);
    }
    Ok(summary)
}
