//! Language identification over character n-gram models: train one
//! model per language from a corpus file, then classify lines of text
//! by maximum probability under a chosen smoothing estimator.

use std::io::BufRead;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};

use patrec_core::nlp::{
    identify_language, Estimator, NGramModel, TokenizerMode, TokenizerOptions,
};

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
    mode: String,
    debug: bool,
    interactive: bool,
    unrestricted: bool,
    n: Option<usize>,
    estimator: Option<Estimator>,
    positional: Vec<String>,
}

fn parse_args(args: &[String]) -> Result<Options> {
    let Some(mode) = args.first() else {
        bail!("usage")
    };
    let mut opts = Options {
        mode: mode.clone(),
        debug: false,
        interactive: false,
        unrestricted: false,
        n: None,
        estimator: None,
        positional: Vec::new(),
    };
    for token in &args[1..] {
        match token.as_str() {
            "--debug" => opts.debug = true,
            "-interactive" => opts.interactive = true,
            // N-grams are always character-level here; the flag is
            // required by convention and accepted as a no-op.
            "-char" => {}
            "-unrestricted" => opts.unrestricted = true,
            "-unigram" => opts.n = Some(1),
            "-bigram" => opts.n = Some(2),
            "-trigram" => opts.n = Some(3),
            "-mle" => opts.estimator = Some(Estimator::Mle),
            "-add-one" => opts.estimator = Some(Estimator::AddOne),
            "-add-delta" => opts.estimator = Some(Estimator::AddDelta(0.5)),
            "-witten-bell" => opts.estimator = Some(Estimator::WittenBell),
            "-good-turing" => opts.estimator = Some(Estimator::GoodTuring),
            other if other.starts_with('-') => bail!("unknown option {other}"),
            other => opts.positional.push(other.to_string()),
        }
    }
    Ok(opts)
}

fn run() -> Result<i32> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        print_usage();
        return Ok(1);
    }
    match args[0].as_str() {
        "--help" | "-h" => {
            print_usage();
            return Ok(0);
        }
        "--version" => {
            println!("Language Identification Application, v{}", env!("CARGO_PKG_VERSION"));
            return Ok(0);
        }
        "--train" | "--ident" => {}
        other => {
            eprintln!("unknown mode {other}");
            print_usage();
            return Ok(1);
        }
    }

    let opts = parse_args(&args)?;
    let Some(n) = opts.n else {
        eprintln!("an n-gram model option is required (-unigram, -bigram, or -trigram)");
        print_usage();
        return Ok(1);
    };
    if opts.estimator.is_none() {
        eprintln!("a statistical estimator option is required (-mle, -add-one, -add-delta, -witten-bell, or -good-turing)");
        print_usage();
        return Ok(1);
    }
    let tokenizer = TokenizerOptions {
        mode: if opts.unrestricted {
            TokenizerMode::Unrestricted
        } else {
            TokenizerMode::Restricted
        },
        ..TokenizerOptions::default()
    };

    if opts.mode == "--train" {
        let [language, corpus] = opts.positional.as_slice() else {
            eprintln!("--train needs <language> and <corpus-file> arguments");
            print_usage();
            return Ok(1);
        };
        let text = std::fs::read_to_string(corpus)
            .with_context(|| format!("reading corpus {corpus:?}"))?;
        let mut model = NGramModel::new(n, language.clone())?;
        model.train(&text, &tokenizer);
        let path = model_path(language, n);
        model.dump(&path)?;
        if opts.debug {
            eprintln!(
                "trained {language}: n={n}, vocabulary {} -> {}",
                model.vocab_size(),
                path.display()
            );
        }
        println!("Done training language [{language}] from \"{corpus}\".");
        return Ok(0);
    }

    // --ident: the language positional is a placeholder ("foo"); the
    // second positional is the input file unless -interactive.
    let models = load_models(n)?;
    if models.is_empty() {
        bail!("no trained {n}-gram models found; run --train first");
    }
    let estimator = opts.estimator.expect("checked above");

    let classify_line = |line: &str| -> Result<()> {
        if line.trim().is_empty() {
            return Ok(());
        }
        let ranked = identify_language(&models, line, &tokenizer, estimator)?;
        if opts.debug {
            for (tag, score) in &ranked {
                eprintln!("  [{tag}] {score}");
            }
        }
        println!("Language identified: [{}]", ranked[0].0);
        Ok(())
    };

    if opts.interactive || opts.positional.len() < 2 {
        let stdin = std::io::stdin();
        for line in stdin.lock().lines() {
            classify_line(&line?)?;
        }
    } else {
        let corpus = &opts.positional[1];
        let text = std::fs::read_to_string(corpus)
            .with_context(|| format!("reading input {corpus:?}"))?;
        for line in text.lines() {
            classify_line(line)?;
        }
    }
    Ok(0)
}

fn model_path(language: &str, n: usize) -> PathBuf {
    PathBuf::from(format!("{language}.{n}gram.gzbin"))
}

/// Loads every trained model of the requested order from the current
/// directory, sorted by file name (the tie-break declaration order).
fn load_models(n: usize) -> Result<Vec<NGramModel>> {
    let suffix = format!(".{n}gram.gzbin");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(".")?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.file_name()
                .and_then(|f| f.to_str())
                .is_some_and(|f| f.ends_with(&suffix))
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| NGramModel::restore(p).with_context(|| format!("restoring {}", p.display())))
        .collect()
}

fn print_usage() {
    println!(
        "Usage:
    lang-ident --help | -h
    lang-ident --version
    lang-ident --train [ --debug ] [ OPTIONS ] <language> <corpus-file>
    lang-ident --ident [ --debug ] [ OPTIONS ] foo <bar|corpus-file>

Options (one or more of the following):
    -interactive   interactive mode for classification instead of reading from a file
    -char          use characters as n-grams (should always be present for this app)
    -unrestricted  keep case and punctuation in the character stream

    -unigram       use UNIGRAM model
    -bigram        use BIGRAM model
    -trigram       use TRIGRAM model

    -mle           use MLE
    -add-one       use Add-One smoothing
    -add-delta     use Add-Delta (ELE, d=0.5) smoothing
    -witten-bell   use Witten-Bell smoothing
    -good-turing   use Good-Turing smoothing
"
    );
}
