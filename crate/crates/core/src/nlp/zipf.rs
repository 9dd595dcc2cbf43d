//! Zipf's-law corpus analysis: word frequencies, ranks, and the
//! frequency-of-frequency table.

use std::collections::BTreeMap;

use super::tokenize::{tokenize_words, TokenizerOptions};

/// Per-word statistics. Rank stays -1 until ranking is assigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordStats {
    pub lexeme: String,
    pub frequency: u64,
    pub rank: i64,
}

impl WordStats {
    pub fn new(lexeme: impl Into<String>) -> Self {
        WordStats {
            lexeme: lexeme.into(),
            frequency: 0,
            rank: -1,
        }
    }
}

/// The outcome of analyzing one corpus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ZipfAnalysis {
    /// Words ranked 1..K by descending frequency; frequency ties keep
    /// first-occurrence order.
    pub stats: Vec<WordStats>,
    /// How many distinct words occur with each frequency.
    pub freq_of_freq: BTreeMap<u64, u64>,
}

impl ZipfAnalysis {
    /// `(rank, frequency)` pairs in rank order.
    pub fn rank_frequency(&self) -> Vec<(u64, u64)> {
        self.stats
            .iter()
            .map(|w| (w.rank as u64, w.frequency))
            .collect()
    }
}

/// Tokenizes the text per the options, counts word frequencies, and
/// assigns ranks.
pub fn zipf_analyze(text: &str, opts: &TokenizerOptions) -> ZipfAnalysis {
    let tokens = tokenize_words(text, opts);
    let mut order = Vec::new();
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for token in tokens {
        let entry = counts.entry(token.clone()).or_insert(0);
        if *entry == 0 {
            order.push(token);
        }
        *entry += 1;
    }

    // `order` carries first-occurrence positions; a stable sort by
    // descending frequency therefore breaks ties by first occurrence.
    let mut stats: Vec<WordStats> = order
        .into_iter()
        .map(|lexeme| {
            let frequency = counts[&lexeme];
            WordStats {
                lexeme,
                frequency,
                rank: -1,
            }
        })
        .collect();
    stats.sort_by_key(|w| std::cmp::Reverse(w.frequency));
    for (i, w) in stats.iter_mut().enumerate() {
        w.rank = i as i64 + 1;
    }

    let mut freq_of_freq = BTreeMap::new();
    for &f in counts.values() {
        *freq_of_freq.entry(f).or_insert(0) += 1;
    }
    ZipfAnalysis {
        stats,
        freq_of_freq,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analyze(text: &str) -> ZipfAnalysis {
        zipf_analyze(text, &TokenizerOptions::default())
    }

    #[test]
    fn ranks_follow_descending_frequency() {
        let a = analyze("the the the cat cat dog");
        let view: Vec<(&str, u64, i64)> = a
            .stats
            .iter()
            .map(|w| (w.lexeme.as_str(), w.frequency, w.rank))
            .collect();
        assert_eq!(
            view,
            vec![("the", 3, 1), ("cat", 2, 2), ("dog", 1, 3)]
        );
    }

    #[test]
    fn empty_text_gives_empty_stats() {
        let a = analyze("");
        assert!(a.stats.is_empty());
        assert!(a.freq_of_freq.is_empty());
    }

    #[test]
    fn frequency_of_frequency_table() {
        let a = analyze("the the the cat cat dog");
        let want: BTreeMap<u64, u64> = [(3, 1), (2, 1), (1, 1)].into_iter().collect();
        assert_eq!(a.freq_of_freq, want);
    }

    #[test]
    fn ties_keep_first_occurrence_order() {
        let a = analyze("beta alpha beta alpha zeta");
        assert_eq!(a.stats[0].lexeme, "beta");
        assert_eq!(a.stats[1].lexeme, "alpha");
        assert_eq!(a.stats[2].lexeme, "zeta");
    }

    #[test]
    fn ranks_are_contiguous_and_frequencies_non_increasing() {
        let a = analyze("a b c a b a d e f g d d d");
        for (i, w) in a.stats.iter().enumerate() {
            assert_eq!(w.rank, i as i64 + 1);
        }
        assert!(a
            .stats
            .windows(2)
            .all(|w| w[0].frequency >= w[1].frequency));
        let total: u64 = a.freq_of_freq.values().sum();
        assert_eq!(total as usize, a.stats.len());
    }
}
