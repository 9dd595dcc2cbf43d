//! Probabilistic CYK parser front end: compile a CNF grammar to a
//! binary file, then parse sentences from standard input and print the
//! most probable tree with its probabilities.

use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{Context, Result};

use patrec_core::parsing::{
    build_tree, compile_grammar_file, cyk_parse, tokenize_sentence, Grammar,
};

const COMPILED_GRAMMAR: &str = "grammar.bin";

fn main() {
    std::process::exit(match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e:#}");
            2
        }
    });
}

fn run() -> Result<i32> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(mode) = args.first() else {
        print_usage();
        return Ok(1);
    };
    match mode.as_str() {
        "--help" | "-h" => {
            print_usage();
            Ok(0)
        }
        "--version" => {
            println!("Probabilistic Parsing Application, v{}", env!("CARGO_PKG_VERSION"));
            Ok(0)
        }
        "--train" => {
            // Tokenizer-style options (-case, -num, -quote, -eos,
            // --debug) are accepted after the mode; only the grammar
            // file matters here.
            let Some(grammar_file) = args[1..].iter().find(|a| !a.starts_with('-')) else {
                eprintln!("--train needs a <grammar-file> argument");
                print_usage();
                return Ok(1);
            };
            let grammar = compile_grammar_file(grammar_file)
                .with_context(|| format!("compiling grammar {grammar_file:?}"))?;
            for warning in grammar.validate() {
                eprintln!("WARNING: {warning}");
            }
            grammar.dump(COMPILED_GRAMMAR)?;
            println!(
                "Grammar compiled: {} nonterminals, {} terminals, {} rules -> {COMPILED_GRAMMAR}",
                grammar.nonterminals().len(),
                grammar.terminals().len(),
                grammar.rules().len()
            );
            Ok(0)
        }
        "--parse" => {
            if !Path::new(COMPILED_GRAMMAR).exists() {
                anyhow::bail!(
                    "no compiled grammar ({COMPILED_GRAMMAR} not found); run --train <grammar-file> first"
                );
            }
            let grammar = Grammar::restore(COMPILED_GRAMMAR)
                .context("restoring the compiled grammar")?;
            parse_loop(&grammar)?;
            Ok(0)
        }
        other => {
            eprintln!("unknown mode {other}");
            print_usage();
            Ok(1)
        }
    }
}

fn parse_loop(grammar: &Grammar) -> Result<()> {
    println!("Entering interactive mode... Type \\q to exit.");
    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        print!("sentence> ");
        std::io::stdout().flush()?;
        let Some(line) = lines.next() else {
            println!();
            return Ok(());
        };
        let line = line?;
        println!("{line}");
        println!();
        if line.trim() == "\\q" {
            return Ok(());
        }
        let (words, warnings) = tokenize_sentence(&line);
        for warning in warnings {
            eprintln!("{warning}");
        }
        if words.is_empty() {
            continue;
        }
        match cyk_parse(grammar, &words)? {
            None => {
                println!("There's no parse for [ {} ]", words.join(" "));
                println!();
            }
            Some(chart) => {
                let tree = build_tree(&chart, 0, words.len() - 1, 0)?;
                println!(
                    "Parse for the sentence [ {} ] is below:",
                    words.join(" ")
                );
                println!();
                println!("SYNOPSIS:");
                println!();
                println!("<NONTERMINAL> (PROBABILITY) [ SPAN: words of span ]");
                println!();
                print!("{}", tree.render());
                println!();
            }
        }
    }
}

fn print_usage() {
    println!(
        "Usage:
    parse --help | -h
        : to display this help and exit

    parse --version
        : to display version and exit

    parse --train [ OPTIONS ] <grammar-file>
        : to compile grammar from the <grammar-file>

    parse --parse [ OPTIONS ]
        : to parse sentences from standard input

Where options are of the following:

    --debug  - enable debugging (more verbose output)
    -case    - make it case-sensitive
    -num     - parse numerical values
    -quote   - consider quotes and count quoted strings as one token
    -eos     - make typical ends of sentences (<?>, <!>, <.>) significant
"
    );
}
