//! Classification statistics keyed by configuration or speaker name.
//!
//! Each key tracks two good/bad counters: the first-guess outcome and
//! the within-two-guesses outcome. `print_stats` renders the CSV the
//! batch experiments consume, sorted by descending first-guess rate.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use std::collections::BTreeMap;

use super::{ContainerReader, ContainerWriter, StorageError};

const KIND: &[u8; 4] = b"STAT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GuessCounts {
    pub good: u64,
    pub bad: u64,
}

impl GuessCounts {
    pub fn total(&self) -> u64 {
        self.good + self.bad
    }

    /// `100 * good / (good + bad)`; 0 for an empty counter.
    pub fn percent(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.good as f64 / self.total() as f64 * 100.0
        }
    }
}

/// Two instances are kept by the identification apps: one keyed by
/// configuration string, one keyed by speaker name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StatsDb {
    per_key: BTreeMap<String, [GuessCounts; 2]>,
}

impl StatsDb {
    pub fn new() -> Self {
        StatsDb::default()
    }

    pub fn is_empty(&self) -> bool {
        self.per_key.is_empty()
    }

    pub fn counts(&self, key: &str) -> Option<&[GuessCounts; 2]> {
        self.per_key.get(key)
    }

    /// Records one classification outcome. `second_guess` selects the
    /// within-two-guesses counter; callers pass `success = true` there
    /// when either the first or the second candidate was correct.
    pub fn add_stats(&mut self, key: &str, success: bool, second_guess: bool) {
        let counters = self.per_key.entry(key.to_string()).or_default();
        let slot = &mut counters[usize::from(second_guess)];
        if success {
            slot.good += 1;
        } else {
            slot.bad += 1;
        }
    }

    pub fn reset(&mut self) {
        self.per_key.clear();
    }

    /// CSV rows `guess,run,config,good,bad,%`, first-guess rows then
    /// second-guess rows, configurations sorted by descending
    /// first-guess percentage. `run` is the 1-based rank after sorting.
    /// With `best_only` only the top percentage is printed.
    pub fn print_stats(&self, best_only: bool) -> String {
        if self.per_key.is_empty() {
            return "no statistics available. Did you run the recognizer yet?\n".to_string();
        }
        let mut ranked: Vec<(&String, &[GuessCounts; 2])> = self.per_key.iter().collect();
        ranked.sort_by(|a, b| b.1[0].percent().total_cmp(&a.1[0].percent()));

        if best_only {
            return format!("{:.2}\n", ranked[0].1[0].percent());
        }

        let mut out = String::from("guess,run,config,good,bad,%\n");
        for guess in 0..2 {
            for (run, (key, counters)) in ranked.iter().enumerate() {
                let c = counters[guess];
                out.push_str(&format!(
                    "{},{},{},{},{},{:.2}\n",
                    if guess == 0 { "1st" } else { "2nd" },
                    run + 1,
                    key,
                    c.good,
                    c.bad,
                    c.percent()
                ));
            }
        }
        out
    }

    pub fn dump(&self, path: impl AsRef<Path>) -> Result<(), StorageError> {
        let file = BufWriter::new(File::create(path)?);
        let mut w = ContainerWriter::new(file, KIND)?;
        w.write_u64(self.per_key.len() as u64)?;
        for (key, counters) in &self.per_key {
            w.write_string(key)?;
            for c in counters {
                w.write_u64(c.good)?;
                w.write_u64(c.bad)?;
            }
        }
        w.finish()?.flush()?;
        Ok(())
    }

    /// Restores a dumped database. A missing file yields a fresh empty
    /// database; the boolean reports that a new one was created.
    pub fn restore(path: impl AsRef<Path>) -> Result<(StatsDb, bool), StorageError> {
        let file = match File::open(path) {
            Ok(f) => BufReader::new(f),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Ok((StatsDb::new(), true));
            }
            Err(e) => return Err(e.into()),
        };
        let mut r = ContainerReader::new(file, KIND)?;
        let n = r.read_u64()?;
        let mut db = StatsDb::new();
        for _ in 0..n {
            let key = r.read_string()?;
            let mut counters = [GuessCounts::default(); 2];
            for c in &mut counters {
                c.good = r.read_u64()?;
                c.bad = r.read_u64()?;
            }
            db.per_key.insert(key, counters);
        }
        Ok((db, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_key_records_first_guess() {
        let mut db = StatsDb::new();
        db.add_stats("cfg", true, false);
        let c = db.counts("cfg").unwrap();
        assert_eq!((c[0].good, c[0].bad), (1, 0));
        assert_eq!((c[1].good, c[1].bad), (0, 0));
    }

    #[test]
    fn first_wrong_second_right() {
        let mut db = StatsDb::new();
        db.add_stats("cfg", false, false);
        db.add_stats("cfg", true, true);
        let c = db.counts("cfg").unwrap();
        assert_eq!((c[0].good, c[0].bad), (0, 1));
        assert_eq!((c[1].good, c[1].bad), (1, 0));
    }

    #[test]
    fn totals_are_conserved() {
        let mut db = StatsDb::new();
        for i in 0..17 {
            db.add_stats("cfg", i % 3 == 0, false);
            db.add_stats("cfg", i % 2 == 0, true);
        }
        let c = db.counts("cfg").unwrap();
        assert_eq!(c[0].total(), 17);
        assert_eq!(c[1].total(), 17);
    }

    #[test]
    fn paper_percentage_row() {
        let mut db = StatsDb::new();
        for _ in 0..26 {
            db.add_stats("-norm -fft -cheb ", true, false);
        }
        for _ in 0..7 {
            db.add_stats("-norm -fft -cheb ", false, false);
        }
        let c = db.counts("-norm -fft -cheb ").unwrap();
        assert!((c[0].percent() - 2600.0 / 33.0).abs() < 1e-10);
        let text = db.print_stats(false);
        assert!(text.contains("1st,1,-norm -fft -cheb ,26,7,78.79"));
    }

    #[test]
    fn zero_good_prints_zero_percent() {
        let mut db = StatsDb::new();
        db.add_stats("cfg", false, false);
        assert!(db.print_stats(false).contains("1st,1,cfg,0,1,0.00"));
    }

    #[test]
    fn rows_sort_by_descending_percentage() {
        let mut db = StatsDb::new();
        for _ in 0..4 {
            db.add_stats("eighty", true, false);
        }
        db.add_stats("eighty", false, false);
        for _ in 0..3 {
            db.add_stats("sixty", true, false);
        }
        db.add_stats("sixty", false, false);
        db.add_stats("sixty", false, false);
        let text = db.print_stats(false);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "guess,run,config,good,bad,%");
        assert!(lines[1].starts_with("1st,1,eighty,4,1,80.00"));
        assert!(lines[2].starts_with("1st,2,sixty,3,2,60.00"));
        // Second-guess rows follow, same ranking.
        assert!(lines[3].starts_with("2nd,1,eighty"));

        assert_eq!(db.print_stats(true), "80.00\n");
    }

    #[test]
    fn empty_db_prints_a_notice() {
        assert!(StatsDb::new().print_stats(false).contains("no statistics"));
    }

    #[test]
    fn dump_restore_round_trip_and_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.speakers.txt.stats");
        let mut db = StatsDb::new();
        db.add_stats("a", true, false);
        db.add_stats("b", false, true);
        db.dump(&path).unwrap();
        let (back, created) = StatsDb::restore(&path).unwrap();
        assert!(!created);
        assert_eq!(back, db);

        let (fresh, created) = StatsDb::restore(dir.path().join("missing.stats")).unwrap();
        assert!(created);
        assert!(fresh.is_empty());

        db.reset();
        db.dump(&path).unwrap();
        let (back, _) = StatsDb::restore(&path).unwrap();
        assert!(back.is_empty());
    }
}
