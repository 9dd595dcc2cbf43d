//! Persistence: training sets, the speakers database, classification
//! statistics, and the shared binary container they use.
//!
//! On-disk binaries are a versioned header plus length-prefixed
//! little-endian fields, wrapped in gzip. The layout is explicit rather
//! than a language-native serialization so files stay readable across
//! implementations.

mod speaker_db;
mod stats_db;
mod training_set;

use std::io::{Read, Write};

use thiserror::Error;

pub use speaker_db::{parse_speaker_db, SpeakerDb, SpeakerEntry};
pub use stats_db::{GuessCounts, StatsDb};
pub use training_set::{Cluster, DumpFormat, TrainingKey, TrainingSet};

#[derive(Debug, Error)]
pub enum StorageError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("bad container magic")]
    BadMagic,
    #[error("expected a {expected} container, found {found}")]
    WrongKind { expected: String, found: String },
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u16),
    #[error("corrupt container: {0}")]
    Corrupt(String),
    #[error("speaker db line {line}: non-integer id {value:?}")]
    NonIntegerId { line: usize, value: String },
    #[error("speaker db line {line}: expected 4 comma-separated fields, found {fields}")]
    WrongFieldCount { line: usize, fields: usize },
    #[error("feature length {got} does not match the training set's {want}")]
    FeatureLengthMismatch { want: usize, got: usize },
}

const CONTAINER_MAGIC: &[u8; 4] = b"PRC1";
const CONTAINER_VERSION: u16 = 1;

/// Length-prefixed little-endian field writer for the gzip container.
pub(crate) struct ContainerWriter<W: Write> {
    inner: flate2::write::GzEncoder<W>,
}

impl<W: Write> ContainerWriter<W> {
    pub fn new(sink: W, kind: &[u8; 4]) -> Result<Self, StorageError> {
        let mut inner =
            flate2::write::GzEncoder::new(sink, flate2::Compression::default());
        inner.write_all(CONTAINER_MAGIC)?;
        inner.write_all(&CONTAINER_VERSION.to_le_bytes())?;
        inner.write_all(kind)?;
        Ok(ContainerWriter { inner })
    }

    pub fn write_u64(&mut self, v: u64) -> Result<(), StorageError> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn write_u32(&mut self, v: u32) -> Result<(), StorageError> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn write_f64(&mut self, v: f64) -> Result<(), StorageError> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn write_string(&mut self, s: &str) -> Result<(), StorageError> {
        self.write_u64(s.len() as u64)?;
        self.inner.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn write_f64_slice(&mut self, values: &[f64]) -> Result<(), StorageError> {
        self.write_u64(values.len() as u64)?;
        for v in values {
            self.write_f64(*v)?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<W, StorageError> {
        Ok(self.inner.finish()?)
    }
}

/// Reader mirroring [`ContainerWriter`]; checks magic, version, and
/// the container kind up front.
pub(crate) struct ContainerReader<R: Read> {
    inner: flate2::read::GzDecoder<R>,
}

impl<R: Read> ContainerReader<R> {
    pub fn new(source: R, kind: &[u8; 4]) -> Result<Self, StorageError> {
        let mut inner = flate2::read::GzDecoder::new(source);
        let mut magic = [0u8; 4];
        inner
            .read_exact(&mut magic)
            .map_err(|_| StorageError::BadMagic)?;
        if &magic != CONTAINER_MAGIC {
            return Err(StorageError::BadMagic);
        }
        let mut version = [0u8; 2];
        inner
            .read_exact(&mut version)
            .map_err(|_| StorageError::Corrupt("missing version".into()))?;
        let version = u16::from_le_bytes(version);
        if version != CONTAINER_VERSION {
            return Err(StorageError::UnsupportedVersion(version));
        }
        let mut found = [0u8; 4];
        inner
            .read_exact(&mut found)
            .map_err(|_| StorageError::Corrupt("missing kind".into()))?;
        if &found != kind {
            return Err(StorageError::WrongKind {
                expected: String::from_utf8_lossy(kind).into_owned(),
                found: String::from_utf8_lossy(&found).into_owned(),
            });
        }
        Ok(ContainerReader { inner })
    }

    fn read_exact(&mut self, buf: &mut [u8]) -> Result<(), StorageError> {
        self.inner
            .read_exact(buf)
            .map_err(|e| StorageError::Corrupt(format!("truncated field: {e}")))
    }

    pub fn read_u64(&mut self) -> Result<u64, StorageError> {
        let mut b = [0u8; 8];
        self.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }

    pub fn read_u32(&mut self) -> Result<u32, StorageError> {
        let mut b = [0u8; 4];
        self.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }

    pub fn read_f64(&mut self) -> Result<f64, StorageError> {
        let mut b = [0u8; 8];
        self.read_exact(&mut b)?;
        Ok(f64::from_le_bytes(b))
    }

    pub fn read_string(&mut self) -> Result<String, StorageError> {
        let len = self.read_u64()? as usize;
        if len > (1 << 32) {
            return Err(StorageError::Corrupt(format!("string length {len}")));
        }
        let mut buf = vec![0u8; len];
        self.read_exact(&mut buf)?;
        String::from_utf8(buf).map_err(|e| StorageError::Corrupt(e.to_string()))
    }

    pub fn read_f64_vec(&mut self) -> Result<Vec<f64>, StorageError> {
        let len = self.read_u64()? as usize;
        if len > (1 << 32) {
            return Err(StorageError::Corrupt(format!("vector length {len}")));
        }
        (0..len).map(|_| self.read_f64()).collect()
    }
}
