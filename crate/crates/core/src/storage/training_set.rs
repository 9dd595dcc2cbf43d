//! Per-configuration training sets: one mean cluster per subject.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use super::{ContainerReader, ContainerWriter, StorageError};

const KIND: &[u8; 4] = b"TSET";

/// Identifies which pipeline configuration a training set belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingKey {
    /// Preprocessing method token, e.g. `norm`.
    pub prep: String,
    /// Feature-extraction method token, e.g. `fft`.
    pub feat: String,
    pub feature_len: usize,
}

impl TrainingKey {
    pub fn new(prep: impl Into<String>, feat: impl Into<String>, feature_len: usize) -> Self {
        TrainingKey {
            prep: prep.into(),
            feat: feat.into(),
            feature_len,
        }
    }

    /// `training-set.<prep>.<feat>.<ext>`
    pub fn file_name(&self, format: DumpFormat) -> String {
        format!("training-set.{}.{}.{}", self.prep, self.feat, format.extension())
    }
}

/// A subject's running mean vector and the number of vectors in it.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub mean: Vec<f64>,
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpFormat {
    GzipBinary,
    Csv,
}

impl DumpFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            DumpFormat::GzipBinary => "bin",
            DumpFormat::Csv => "csv",
        }
    }
}

/// Mean clusters per subject for one (preprocessing, feature) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub key: TrainingKey,
    clusters: BTreeMap<u32, Cluster>,
}

impl TrainingSet {
    pub fn new(key: TrainingKey) -> Self {
        TrainingSet {
            key,
            clusters: BTreeMap::new(),
        }
    }

    pub fn clusters(&self) -> &BTreeMap<u32, Cluster> {
        &self.clusters
    }

    pub fn cluster_means(&self) -> BTreeMap<u32, Vec<f64>> {
        self.clusters
            .iter()
            .map(|(&id, c)| (id, c.mean.clone()))
            .collect()
    }

    pub fn subject_ids(&self) -> Vec<u32> {
        self.clusters.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Folds one more feature vector into the subject's running mean:
    /// `mean <- (mean*count + v) / (count+1)`.
    pub fn train_update(&mut self, subject: u32, v: &[f64]) -> Result<(), StorageError> {
        if v.len() != self.key.feature_len {
            return Err(StorageError::FeatureLengthMismatch {
                want: self.key.feature_len,
                got: v.len(),
            });
        }
        match self.clusters.get_mut(&subject) {
            Some(cluster) => {
                let count = cluster.count as f64;
                for (m, &x) in cluster.mean.iter_mut().zip(v) {
                    *m = (*m * count + x) / (count + 1.0);
                }
                cluster.count += 1;
            }
            None => {
                self.clusters.insert(
                    subject,
                    Cluster {
                        mean: v.to_vec(),
                        count: 1,
                    },
                );
            }
        }
        Ok(())
    }

    pub fn dump(&self, path: impl AsRef<Path>, format: DumpFormat) -> Result<(), StorageError> {
        match format {
            DumpFormat::GzipBinary => self.dump_binary(path),
            DumpFormat::Csv => self.dump_csv(path),
        }
    }

    pub fn restore(
        path: impl AsRef<Path>,
        format: DumpFormat,
    ) -> Result<TrainingSet, StorageError> {
        match format {
            DumpFormat::GzipBinary => Self::restore_binary(path),
            DumpFormat::Csv => Self::restore_csv(path),
        }
    }

    fn dump_binary(&self, path: impl AsRef<Path>) -> Result<(), StorageError> {
        let file = BufWriter::new(File::create(path)?);
        let mut w = ContainerWriter::new(file, KIND)?;
        w.write_string(&self.key.prep)?;
        w.write_string(&self.key.feat)?;
        w.write_u64(self.key.feature_len as u64)?;
        w.write_u64(self.clusters.len() as u64)?;
        for (&id, cluster) in &self.clusters {
            w.write_u32(id)?;
            w.write_u64(cluster.count)?;
            w.write_f64_slice(&cluster.mean)?;
        }
        w.finish()?.flush()?;
        Ok(())
    }

    fn restore_binary(path: impl AsRef<Path>) -> Result<TrainingSet, StorageError> {
        let file = BufReader::new(File::open(path)?);
        let mut r = ContainerReader::new(file, KIND)?;
        let prep = r.read_string()?;
        let feat = r.read_string()?;
        let feature_len = r.read_u64()? as usize;
        let n = r.read_u64()?;
        let mut set = TrainingSet::new(TrainingKey::new(prep, feat, feature_len));
        for _ in 0..n {
            let id = r.read_u32()?;
            let count = r.read_u64()?;
            let mean = r.read_f64_vec()?;
            if mean.len() != feature_len {
                return Err(StorageError::Corrupt(format!(
                    "cluster {id} length {} != {feature_len}",
                    mean.len()
                )));
            }
            set.clusters.insert(id, Cluster { mean, count });
        }
        Ok(set)
    }

    fn dump_csv(&self, path: impl AsRef<Path>) -> Result<(), StorageError> {
        let mut out = String::new();
        out.push_str(&format!(
            "prep,feat,feature_len,subject,count,mean...\n{},{},{},,,\n",
            self.key.prep, self.key.feat, self.key.feature_len
        ));
        for (id, cluster) in &self.clusters {
            out.push_str(&format!("{},{}", id, cluster.count));
            for v in &cluster.mean {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    fn restore_csv(path: impl AsRef<Path>) -> Result<TrainingSet, StorageError> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        lines
            .next()
            .ok_or_else(|| StorageError::Corrupt("missing csv header".into()))?;
        let keyline = lines
            .next()
            .ok_or_else(|| StorageError::Corrupt("missing csv key line".into()))?;
        let parts: Vec<&str> = keyline.split(',').collect();
        if parts.len() < 3 {
            return Err(StorageError::Corrupt("bad csv key line".into()));
        }
        let feature_len: usize = parts[2]
            .parse()
            .map_err(|_| StorageError::Corrupt("bad feature length".into()))?;
        let mut set = TrainingSet::new(TrainingKey::new(parts[0], parts[1], feature_len));
        for (idx, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != feature_len + 2 {
                return Err(StorageError::Corrupt(format!(
                    "csv row {} has {} fields",
                    idx + 3,
                    fields.len()
                )));
            }
            let id: u32 = fields[0]
                .parse()
                .map_err(|_| StorageError::Corrupt("bad subject id".into()))?;
            let count: u64 = fields[1]
                .parse()
                .map_err(|_| StorageError::Corrupt("bad count".into()))?;
            let mean = fields[2..]
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|_| StorageError::Corrupt("bad mean value".into()))?;
            set.clusters.insert(id, Cluster { mean, count });
        }
        Ok(set)
    }
}
