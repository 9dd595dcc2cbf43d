//! Probabilistic parsing: CNF grammar compilation and CYK chart
//! parsing with back-pointer tree extraction.

mod cyk;
mod grammar;

pub use cyk::{build_tree, cyk_parse, tokenize_sentence, ParseChart, ParseError, ParseTree};
pub use grammar::{
    compile_grammar, compile_grammar_file, Grammar, GrammarError, Rule, RuleRhs, BASIC_GRAMMAR,
};
