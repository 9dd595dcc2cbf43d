//! CNF probabilistic grammars: source-format compiler, validation,
//! and the compiled binary form.
//!
//! Source rules look like `<A> ::= 0.8 <B> <C>` or `<V> ::= 0.2 eats`,
//! one rule per line, optionally terminated by a `%` token. Shell (`#`),
//! C (`/* */`), and C++ (`//`) comments are stripped before parsing.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::storage::{ContainerReader, ContainerWriter, StorageError};

const KIND: &[u8; 4] = b"GRAM";

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("line {line}: malformed rule {text:?}")]
    MalformedRule { line: usize, text: String },
    #[error("line {line}: unparsable probability {text:?}")]
    BadProbability { line: usize, text: String },
    #[error("line {line}: probability {value} outside [0, 1]")]
    ProbabilityOutOfRange { line: usize, value: f64 },
    #[error("line {line}: right-hand side is not CNF (two nonterminals or one terminal)")]
    NotCnf { line: usize },
    #[error("grammar has no rules")]
    EmptyGrammar,
    #[error(transparent)]
    Storage(#[from] StorageError),
}

/// Right-hand side of a CNF rule: indices into the grammar's
/// nonterminal or terminal tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleRhs {
    Binary(usize, usize),
    Lexical(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub lhs: usize,
    pub rhs: RuleRhs,
    pub probability: f64,
}

/// A compiled grammar. Nonterminal 0, the first one declared, is the
/// start symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Grammar {
    nonterminals: Vec<String>,
    terminals: Vec<String>,
    rules: Vec<Rule>,
}

impl Grammar {
    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn terminals(&self) -> &[String] {
        &self.terminals
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn start_symbol(&self) -> &str {
        &self.nonterminals[0]
    }

    pub fn terminal_index(&self, word: &str) -> Option<usize> {
        self.terminals.iter().position(|t| t == word)
    }

    /// Probability of the first declared rule `nt -> terminal`, if any.
    pub fn lexical_probability(&self, nt: usize, terminal: usize) -> Option<f64> {
        self.rules.iter().find_map(|r| match r.rhs {
            RuleRhs::Lexical(t) if r.lhs == nt && t == terminal => Some(r.probability),
            _ => None,
        })
    }

    /// Warns (never fails) when the probabilities of an LHS do not sum
    /// to 1 within 1e-6. The list is empty for a fully consistent
    /// grammar.
    pub fn validate(&self) -> Vec<String> {
        let mut sums = vec![0.0f64; self.nonterminals.len()];
        for rule in &self.rules {
            sums[rule.lhs] += rule.probability;
        }
        sums.iter()
            .enumerate()
            .filter(|(_, &sum)| (sum - 1.0).abs() > 1e-6)
            .map(|(nt, sum)| {
                format!(
                    "probabilities for <{}> sum to {}, expected 1",
                    self.nonterminals[nt], sum
                )
            })
            .collect()
    }

    pub fn dump(&self, path: impl AsRef<Path>) -> Result<(), GrammarError> {
        let file = BufWriter::new(File::create(path).map_err(StorageError::from)?);
        let mut w = ContainerWriter::new(file, KIND)?;
        w.write_u64(self.nonterminals.len() as u64)?;
        for nt in &self.nonterminals {
            w.write_string(nt)?;
        }
        w.write_u64(self.terminals.len() as u64)?;
        for t in &self.terminals {
            w.write_string(t)?;
        }
        w.write_u64(self.rules.len() as u64)?;
        for rule in &self.rules {
            w.write_u64(rule.lhs as u64)?;
            match rule.rhs {
                RuleRhs::Binary(b, c) => {
                    w.write_u32(0)?;
                    w.write_u64(b as u64)?;
                    w.write_u64(c as u64)?;
                }
                RuleRhs::Lexical(t) => {
                    w.write_u32(1)?;
                    w.write_u64(t as u64)?;
                    w.write_u64(0)?;
                }
            }
            w.write_f64(rule.probability)?;
        }
        w.finish()?.flush().map_err(StorageError::from)?;
        Ok(())
    }

    pub fn restore(path: impl AsRef<Path>) -> Result<Self, GrammarError> {
        let file = BufReader::new(File::open(path).map_err(StorageError::from)?);
        let mut r = ContainerReader::new(file, KIND)?;
        let nt_len = r.read_u64()?;
        let nonterminals = (0..nt_len)
            .map(|_| r.read_string())
            .collect::<Result<Vec<_>, _>>()?;
        let t_len = r.read_u64()?;
        let terminals = (0..t_len)
            .map(|_| r.read_string())
            .collect::<Result<Vec<_>, _>>()?;
        let rule_len = r.read_u64()?;
        let mut rules = Vec::with_capacity(rule_len as usize);
        for _ in 0..rule_len {
            let lhs = r.read_u64()? as usize;
            let tag = r.read_u32()?;
            let first = r.read_u64()? as usize;
            let second = r.read_u64()? as usize;
            let probability = r.read_f64()?;
            let rhs = match tag {
                0 => RuleRhs::Binary(first, second),
                1 => RuleRhs::Lexical(first),
                _ => {
                    return Err(GrammarError::Storage(StorageError::Corrupt(format!(
                        "bad rule tag {tag}"
                    ))))
                }
            };
            if lhs >= nonterminals.len() {
                return Err(GrammarError::Storage(StorageError::Corrupt(
                    "rule lhs out of range".into(),
                )));
            }
            rules.push(Rule {
                lhs,
                rhs,
                probability,
            });
        }
        Ok(Grammar {
            nonterminals,
            terminals,
            rules,
        })
    }
}

/// Compiles grammar source text. Symbol order is first appearance;
/// the first nonterminal declared becomes the start symbol.
pub fn compile_grammar(source: &str) -> Result<Grammar, GrammarError> {
    let stripped = strip_block_comments(source);
    let mut grammar = Grammar {
        nonterminals: Vec::new(),
        terminals: Vec::new(),
        rules: Vec::new(),
    };

    for (idx, raw_line) in stripped.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_line_comment(raw_line).trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.last() == Some(&"%") {
            tokens.pop();
        }
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() < 4 || tokens[1] != "::=" {
            return Err(GrammarError::MalformedRule {
                line: line_no,
                text: raw_line.trim().to_string(),
            });
        }
        let lhs_name = nonterminal_name(tokens[0]).ok_or(GrammarError::MalformedRule {
            line: line_no,
            text: raw_line.trim().to_string(),
        })?;
        let probability: f64 =
            tokens[2]
                .parse()
                .map_err(|_| GrammarError::BadProbability {
                    line: line_no,
                    text: tokens[2].to_string(),
                })?;
        if !(0.0..=1.0).contains(&probability) {
            return Err(GrammarError::ProbabilityOutOfRange {
                line: line_no,
                value: probability,
            });
        }

        let lhs = intern(&mut grammar.nonterminals, lhs_name);
        let rhs_tokens = &tokens[3..];
        let rhs = match rhs_tokens {
            [single] => match nonterminal_name(single) {
                // A -> B alone is not CNF.
                Some(_) => return Err(GrammarError::NotCnf { line: line_no }),
                None => RuleRhs::Lexical(intern(&mut grammar.terminals, single)),
            },
            [first, second] => {
                match (nonterminal_name(first), nonterminal_name(second)) {
                    (Some(b), Some(c)) => {
                        let b = intern(&mut grammar.nonterminals, b);
                        let c = intern(&mut grammar.nonterminals, c);
                        RuleRhs::Binary(b, c)
                    }
                    _ => return Err(GrammarError::NotCnf { line: line_no }),
                }
            }
            _ => return Err(GrammarError::NotCnf { line: line_no }),
        };
        grammar.rules.push(Rule {
            lhs,
            rhs,
            probability,
        });
    }

    if grammar.rules.is_empty() {
        return Err(GrammarError::EmptyGrammar);
    }
    Ok(grammar)
}

/// Loads and compiles a grammar source file.
pub fn compile_grammar_file(path: impl AsRef<Path>) -> Result<Grammar, GrammarError> {
    let source = std::fs::read_to_string(path).map_err(StorageError::from)?;
    compile_grammar(&source)
}

fn nonterminal_name(token: &str) -> Option<&str> {
    token
        .strip_prefix('<')
        .and_then(|t| t.strip_suffix('>'))
        .filter(|t| !t.is_empty())
}

fn intern(table: &mut Vec<String>, name: &str) -> usize {
    match table.iter().position(|t| t == name) {
        Some(idx) => idx,
        None => {
            table.push(name.to_string());
            table.len() - 1
        }
    }
}

fn strip_line_comment(line: &str) -> &str {
    let cut = line
        .find("//")
        .into_iter()
        .chain(line.find('#'))
        .min()
        .unwrap_or(line.len());
    &line[..cut]
}

fn strip_block_comments(source: &str) -> String {
    let mut out = String::with_capacity(source.len());
    let mut rest = source;
    while let Some(start) = rest.find("/*") {
        out.push_str(&rest[..start]);
        match rest[start..].find("*/") {
            Some(end) => rest = &rest[start + end + 2..],
            None => return out, // unterminated comment swallows the tail
        }
    }
    out.push_str(rest);
    out
}

/// A small reference grammar for English toy sentences, usable by
/// tests and examples.
pub const BASIC_GRAMMAR: &str = "\
<S>            ::= 0.8 <NP> <VP>
<S>            ::= 0.2 <V> <NP>
<NP>        ::= 1.0 <DET> <NOMINAL>
<NOMINAL>    ::= 1.0 <ADJ> <NOMINAL>
<VP>        ::= 1.0 <V> <NP>
<DET>         ::= 0.5 the
<DET>         ::= 0.4 a
<DET>         ::= 0.1 my
<NOMINAL>    ::= 0.4 rabbit
<NOMINAL>    ::= 0.2 smile
<NOMINAL>    ::= 0.4 cat
<V>            ::= 0.8 has
<V>            ::= 0.2 eats
<ADJ>        ::= 1.0 white
";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lexical_rule() {
        let g = compile_grammar("<S> ::= 1.0 cat").unwrap();
        assert_eq!(g.nonterminals(), ["S"]);
        assert_eq!(g.terminals(), ["cat"]);
        assert_eq!(g.rules().len(), 1);
        assert_eq!(g.rules()[0].probability, 1.0);
    }

    #[test]
    fn comment_only_source_is_an_empty_grammar() {
        assert!(matches!(
            compile_grammar("# comment only"),
            Err(GrammarError::EmptyGrammar)
        ));
        assert!(matches!(
            compile_grammar("// C++ style\n/* and C\nstyle */\n"),
            Err(GrammarError::EmptyGrammar)
        ));
    }

    #[test]
    fn basic_grammar_compiles() {
        let g = compile_grammar(BASIC_GRAMMAR).unwrap();
        assert_eq!(g.rules().len(), 14);
        // First appearance order puts the start symbol first.
        assert_eq!(
            g.nonterminals(),
            ["S", "NP", "VP", "V", "DET", "NOMINAL", "ADJ"]
        );
        assert_eq!(g.start_symbol(), "S");
        assert_eq!(g.terminals().len(), 9);
        assert_eq!(
            g.terminals(),
            ["the", "a", "my", "rabbit", "smile", "cat", "has", "eats", "white"]
        );
    }

    #[test]
    fn basic_grammar_validation_warns_only_for_nominal() {
        let g = compile_grammar(BASIC_GRAMMAR).unwrap();
        let warnings = g.validate();
        // DET sums to 0.5 + 0.4 + 0.1 = 1: no warning. NOMINAL carries
        // both a binary rule (1.0) and lexical rules (1.0 total).
        assert!(warnings.iter().all(|w| !w.contains("<DET>")));
        assert!(warnings.iter().all(|w| !w.contains("<S>")));
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("<NOMINAL>"));
    }

    #[test]
    fn underweight_lhs_warns_and_empty_list_means_consistent() {
        let g = compile_grammar("<S> ::= 0.8 cat").unwrap();
        let warnings = g.validate();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("<S>"));

        let ok = compile_grammar("<S> ::= 1.0 cat").unwrap();
        assert!(ok.validate().is_empty());
    }

    #[test]
    fn comments_and_percent_terminators_are_accepted() {
        let src = "
/*
 * a header comment
 */
<S> ::= 0.8 <NP> <VP> %
// lexicon
<NP> ::= 1.0 word # trailing shell comment
<VP> ::= 1.0 verb
";
        let g = compile_grammar(src).unwrap();
        assert_eq!(g.rules().len(), 3);
        assert_eq!(g.terminals(), ["word", "verb"]);
    }

    #[test]
    fn malformed_rules_are_rejected() {
        assert!(matches!(
            compile_grammar("<S> := 1.0 cat"),
            Err(GrammarError::MalformedRule { line: 1, .. })
        ));
        assert!(matches!(
            compile_grammar("<S> ::= fast cat"),
            Err(GrammarError::BadProbability { .. })
        ));
        assert!(matches!(
            compile_grammar("<S> ::= 1.5 cat"),
            Err(GrammarError::ProbabilityOutOfRange { value, .. }) if value == 1.5
        ));
        // Unit-production, three-symbol, and mixed RHS forms are not CNF.
        assert!(matches!(
            compile_grammar("<S> ::= 1.0 <NP>"),
            Err(GrammarError::NotCnf { .. })
        ));
        assert!(matches!(
            compile_grammar("<S> ::= 1.0 <A> <B> <C>"),
            Err(GrammarError::NotCnf { .. })
        ));
        assert!(matches!(
            compile_grammar("<S> ::= 1.0 <A> cat"),
            Err(GrammarError::NotCnf { .. })
        ));
    }

    #[test]
    fn compiled_grammar_round_trips_through_binary() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grammar.bin");
        let g = compile_grammar(BASIC_GRAMMAR).unwrap();
        g.dump(&path).unwrap();
        let back = Grammar::restore(&path).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn lexical_lookup_takes_first_declared_rule() {
        let g = compile_grammar("<S> ::= 0.3 cat\n<S> ::= 0.7 cat").unwrap();
        assert_eq!(g.lexical_probability(0, 0), Some(0.3));
    }
}
