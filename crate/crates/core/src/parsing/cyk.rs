//! Probabilistic CYK parsing over CNF grammars.
//!
//! The chart keeps the best derivation probability per
//! `(begin, end, nonterminal)` cell plus back pointers
//! `(split, B, C)`. Cells update only on strictly greater candidates,
//! so with equal-probability derivations the first one visited wins;
//! candidate order is split ascending, then B and C in declaration
//! order. A sentence parses iff the start symbol's probability over the
//! whole span is positive.

use thiserror::Error;

use super::grammar::{Grammar, Rule, RuleRhs};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("empty sentence")]
    EmptySentence,
    #[error("no derivation for cell ({begin}, {end}, {nonterminal})")]
    EmptyCell {
        begin: usize,
        end: usize,
        nonterminal: usize,
    },
}

/// The filled dynamic-programming table for one sentence.
#[derive(Debug, Clone)]
pub struct ParseChart {
    words: Vec<String>,
    nonterminals: Vec<String>,
    pi: Vec<f64>,
    back: Vec<Option<(usize, usize, usize)>>,
}

impl ParseChart {
    fn index(&self, begin: usize, end: usize, nt: usize) -> usize {
        (begin * self.words.len() + end) * self.nonterminals.len() + nt
    }

    /// Best probability of deriving `words[begin..=end]` from
    /// nonterminal `nt`.
    pub fn probability(&self, begin: usize, end: usize, nt: usize) -> f64 {
        self.pi[self.index(begin, end, nt)]
    }

    pub fn back_pointer(&self, begin: usize, end: usize, nt: usize) -> Option<(usize, usize, usize)> {
        self.back[self.index(begin, end, nt)]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Probability of the whole sentence under the start symbol.
    pub fn sentence_probability(&self) -> f64 {
        self.probability(0, self.words.len() - 1, 0)
    }
}

/// Runs the CYK dynamic program. Returns `None` when the sentence has
/// no parse, including the fail-fast case of a word absent from the
/// grammar's terminals.
pub fn cyk_parse(grammar: &Grammar, words: &[String]) -> Result<Option<ParseChart>, ParseError> {
    if words.is_empty() {
        return Err(ParseError::EmptySentence);
    }
    let nt_count = grammar.nonterminals().len();
    let n = words.len();

    // Fail-fast: a word with no lexical rule cannot be derived.
    let word_terminals: Vec<usize> = match words
        .iter()
        .map(|w| grammar.terminal_index(w))
        .collect::<Option<Vec<_>>>()
    {
        Some(v) => v,
        None => return Ok(None),
    };

    let mut chart = ParseChart {
        words: words.to_vec(),
        nonterminals: grammar.nonterminals().to_vec(),
        pi: vec![0.0; n * n * nt_count],
        back: vec![None; n * n * nt_count],
    };

    // First-declared rule wins a (A, B, C) slot, mirroring rule lookup
    // by declaration order.
    let mut binary = vec![None::<f64>; nt_count * nt_count * nt_count];
    for rule in grammar.rules() {
        if let Rule {
            lhs,
            rhs: RuleRhs::Binary(b, c),
            probability,
        } = *rule
        {
            let slot = &mut binary[(lhs * nt_count + b) * nt_count + c];
            if slot.is_none() {
                *slot = Some(probability);
            }
        }
    }

    // Base case: lexical rules fill the diagonal.
    for (i, &terminal) in word_terminals.iter().enumerate() {
        for nt in 0..nt_count {
            if let Some(p) = grammar.lexical_probability(nt, terminal) {
                let idx = chart.index(i, i, nt);
                chart.pi[idx] = p;
            }
        }
    }

    for span in 2..=n {
        for begin in 0..=n - span {
            let end = begin + span - 1;
            for split in begin..end {
                for a in 0..nt_count {
                    for b in 0..nt_count {
                        let left = chart.pi[chart.index(begin, split, b)];
                        if left == 0.0 {
                            continue;
                        }
                        for c in 0..nt_count {
                            let Some(rule_p) = binary[(a * nt_count + b) * nt_count + c] else {
                                continue;
                            };
                            let right = chart.pi[chart.index(split + 1, end, c)];
                            if right == 0.0 {
                                continue;
                            }
                            let candidate = left * right * rule_p;
                            let idx = chart.index(begin, end, a);
                            if candidate > chart.pi[idx] {
                                chart.pi[idx] = candidate;
                                chart.back[idx] = Some((split, b, c));
                            }
                        }
                    }
                }
            }
        }
    }

    if chart.sentence_probability() > 0.0 {
        Ok(Some(chart))
    } else {
        Ok(None)
    }
}

/// A most-probable derivation extracted from the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseTree {
    pub nonterminal: String,
    pub probability: f64,
    /// Inclusive word span `(begin, end)`.
    pub span: (usize, usize),
    /// Zero children at a leaf, two otherwise.
    pub children: Vec<ParseTree>,
    /// The words this node covers, left to right.
    pub words: Vec<String>,
}

impl ParseTree {
    /// Renders the tree in the indented
    /// `<NONTERMINAL> (PROBABILITY) [ begin-end: words ]` layout.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, level: usize, out: &mut String) {
        out.push_str(&"    ".repeat(level));
        out.push_str(&format!(
            "<{}> ({}) [ {}-{}: {} ]\n",
            self.nonterminal,
            format_probability(self.probability),
            self.span.0,
            self.span.1,
            self.words.join(" ")
        ));
        for child in &self.children {
            child.render_into(level + 1, out);
        }
    }

    /// Left-to-right leaf concatenation.
    pub fn leaf_words(&self) -> Vec<String> {
        if self.children.is_empty() {
            self.words.clone()
        } else {
            self.children
                .iter()
                .flat_map(|c| c.leaf_words())
                .collect()
        }
    }
}

/// Prints a probability the way the chart computed it: integral values
/// keep a trailing `.0`, everything else uses the shortest decimal
/// digits that round-trip the double.
fn format_probability(p: f64) -> String {
    if p == p.trunc() && p.abs() < 1e15 {
        format!("{p:.1}")
    } else {
        format!("{p}")
    }
}

/// Follows the back pointers down from a chart cell.
pub fn build_tree(
    chart: &ParseChart,
    begin: usize,
    end: usize,
    nt: usize,
) -> Result<ParseTree, ParseError> {
    let probability = chart.probability(begin, end, nt);
    if probability <= 0.0 {
        return Err(ParseError::EmptyCell {
            begin,
            end,
            nonterminal: nt,
        });
    }
    let words = chart.words[begin..=end].to_vec();
    let children = match chart.back_pointer(begin, end, nt) {
        None => Vec::new(),
        Some((split, b, c)) => vec![
            build_tree(chart, begin, split, b)?,
            build_tree(chart, split + 1, end, c)?,
        ],
    };
    Ok(ParseTree {
        nonterminal: chart.nonterminals[nt].clone(),
        probability,
        span: (begin, end),
        children,
        words,
    })
}

/// Whitespace-split word tokens; alphabetic runs survive, anything else
/// is dropped with a warning line. Case is preserved.
pub fn tokenize_sentence(text: &str) -> (Vec<String>, Vec<String>) {
    let mut tokens = Vec::new();
    let mut warnings = Vec::new();
    for chunk in text.split_whitespace() {
        let mut word = String::new();
        let mut junk = String::new();
        for c in chunk.chars() {
            if c.is_alphabetic() {
                if !junk.is_empty() {
                    warnings.push(non_word_warning(&junk));
                    junk.clear();
                }
                word.push(c);
            } else {
                if !word.is_empty() {
                    tokens.push(std::mem::take(&mut word));
                }
                junk.push(c);
            }
        }
        if !word.is_empty() {
            tokens.push(word);
        }
        if !junk.is_empty() {
            warnings.push(non_word_warning(&junk));
        }
    }
    (tokens, warnings)
}

fn non_word_warning(token: &str) -> String {
    format!("WARNING: Non-word token encountered: Token['{token}']")
}
