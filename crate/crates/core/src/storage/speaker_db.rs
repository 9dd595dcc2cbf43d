//! The speakers database: a CSV file mapping subject ids to names and
//! their training/testing sample lists.
//!
//! Line format: `<id:int>,<name:string>,<training-samples>,<testing-samples>`
//! where each sample list is pipe-separated: `a.wav|b.wav`.

use std::collections::BTreeMap;
use std::path::Path;

use super::StorageError;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpeakerEntry {
    pub name: String,
    pub training: Vec<String>,
    pub testing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpeakerDb {
    entries: BTreeMap<u32, SpeakerEntry>,
}

impl SpeakerDb {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, StorageError> {
        parse_speaker_db_text(&std::fs::read_to_string(path)?)
    }

    pub fn entries(&self) -> &BTreeMap<u32, SpeakerEntry> {
        &self.entries
    }

    pub fn get(&self, id: u32) -> Option<&SpeakerEntry> {
        self.entries.get(&id)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Speaker name, or a placeholder for ids outside the database.
    pub fn name_of(&self, id: u32) -> String {
        match self.entries.get(&id) {
            Some(e) => e.name.clone(),
            None => format!("Unknown Speaker ({id})"),
        }
    }

    /// Looks a file up in the training or testing lists, ignoring any
    /// leading directories (either separator style).
    pub fn id_by_filename(&self, path: &str, training: bool) -> Option<u32> {
        let name = base_name(path);
        self.entries
            .iter()
            .find(|(_, e)| {
                let list = if training { &e.training } else { &e.testing };
                list.iter().any(|f| f == name)
            })
            .map(|(&id, _)| id)
    }
}

fn base_name(path: &str) -> &str {
    let cut = path.rfind(['/', '\\']).map_or(0, |i| i + 1);
    &path[cut..]
}

/// Parses the CSV format described in the module docs.
pub fn parse_speaker_db(path: impl AsRef<Path>) -> Result<SpeakerDb, StorageError> {
    SpeakerDb::load(path)
}

fn parse_speaker_db_text(text: &str) -> Result<SpeakerDb, StorageError> {
    let mut entries = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(StorageError::WrongFieldCount {
                line: idx + 1,
                fields: fields.len(),
            });
        }
        let id: u32 = fields[0]
            .trim()
            .parse()
            .map_err(|_| StorageError::NonIntegerId {
                line: idx + 1,
                value: fields[0].to_string(),
            })?;
        entries.insert(
            id,
            SpeakerEntry {
                name: fields[1].to_string(),
                training: split_list(fields[2]),
                testing: split_list(fields[3]),
            },
        );
    }
    Ok(SpeakerDb { entries })
}

fn split_list(field: &str) -> Vec<String> {
    field
        .split('|')
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}
