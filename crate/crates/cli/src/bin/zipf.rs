//! Zipf's-law corpus analyzer: ranks words by frequency, dumps a
//! rank/frequency CSV (log/log by default) next to the corpus, and
//! prints the most frequent words plus the frequency-of-frequency
//! table.

use std::path::PathBuf;

use anyhow::{Context, Result};

use patrec_core::nlp::{zipf_analyze, TokenizerOptions, ZipfAnalysis};

const TOP_WORDS: usize = 100;

fn main() {
    std::process::exit(match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e:#}");
            2
        }
    });
}

struct Options {
    tokenizer: TokenizerOptions,
    nolog: bool,
    list: bool,
    corpus: Option<String>,
    tokens: Vec<String>,
}

fn parse_args(args: &[String]) -> Result<Options, String> {
    let mut opts = Options {
        tokenizer: TokenizerOptions::default(),
        nolog: false,
        list: false,
        corpus: None,
        tokens: Vec::new(),
    };
    for token in args {
        match token.as_str() {
            "--case" => opts.tokenizer.case_sensitive = true,
            "--num" => opts.tokenizer.parse_numbers = true,
            "--quote" => opts.tokenizer.quotes_as_token = true,
            "--eos" => opts.tokenizer.eos_significant = true,
            "--nolog" => opts.nolog = true,
            "--list" => opts.list = true,
            other if other.starts_with('-') => {
                return Err(format!("unknown option {other}"));
            }
            other => {
                if opts.corpus.is_some() {
                    return Err(format!("unexpected extra argument {other}"));
                }
                opts.corpus = Some(other.to_string());
            }
        }
        if token.starts_with("--") && token != "--list" {
            opts.tokens.push(token.clone());
        }
    }
    Ok(opts)
}

fn run() -> Result<i32> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--help" || a == "-h") {
        print_usage();
        return Ok(0);
    }
    let opts = match parse_args(&args) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("{msg}");
            print_usage();
            return Ok(1);
        }
    };
    let Some(corpus) = opts.corpus else {
        eprintln!("No corpus file has been specified.");
        print_usage();
        return Ok(1);
    };

    let csv_path = output_path(&corpus, &opts.tokens);
    if opts.list {
        let Ok(text) = std::fs::read_to_string(&csv_path) else {
            eprintln!(
                "No pre-collected statistics for \"{corpus}\" ({} not found); run the analysis first.",
                csv_path.display()
            );
            return Ok(2);
        };
        print!("{text}");
        return Ok(0);
    }

    let text = std::fs::read_to_string(&corpus)
        .with_context(|| format!("reading corpus {corpus:?}"))?;
    let analysis = zipf_analyze(&text, &opts.tokenizer);
    std::fs::write(&csv_path, render_csv(&analysis, opts.nolog))
        .with_context(|| format!("writing {}", csv_path.display()))?;

    print_summary(&analysis);
    eprintln!("Wrote {}", csv_path.display());
    Ok(0)
}

/// `<corpus>[options].csv`, the options joined by spaces; plain
/// `<corpus>.csv` when no output-affecting option is set.
fn output_path(corpus: &str, tokens: &[String]) -> PathBuf {
    if tokens.is_empty() {
        PathBuf::from(format!("{corpus}.csv"))
    } else {
        PathBuf::from(format!("{corpus}[{}].csv", tokens.join(" ")))
    }
}

fn render_csv(analysis: &ZipfAnalysis, nolog: bool) -> String {
    let mut out = String::new();
    if nolog {
        out.push_str("rank,frequency,lexeme\n");
        for w in &analysis.stats {
            out.push_str(&format!("{},{},{}\n", w.rank, w.frequency, w.lexeme));
        }
    } else {
        out.push_str("log(rank),log(frequency),lexeme\n");
        for w in &analysis.stats {
            out.push_str(&format!(
                "{},{},{}\n",
                (w.rank as f64).ln(),
                (w.frequency as f64).ln(),
                w.lexeme
            ));
        }
    }
    out
}

fn print_summary(analysis: &ZipfAnalysis) {
    println!("rank,frequency,lexeme");
    for w in analysis.stats.iter().take(TOP_WORDS) {
        println!("{},{},{}", w.rank, w.frequency, w.lexeme);
    }
    println!();
    println!("frequency,words-with-that-frequency");
    for (freq, count) in analysis.freq_of_freq.iter().rev() {
        println!("{freq},{count}");
    }
}

fn print_usage() {
    println!(
        "Usage:
    zipf --help | -h | [ OPTIONS ] <corpus-file>
    zipf --list [ OPTIONS ] <corpus-file>

Options (one or more of the following):
    --case  - make it case-sensitive
    --num   - parse numerical values
    --quote - consider quotes and count quoted strings as one token
    --eos   - make typical ends of sentences (<?>, <!>, <.>) significant
    --nolog - dump Zipf's law graph values as-is instead of log/log
    --list  - lists already pre-collected statistics for a given corpus
"
    );
}
