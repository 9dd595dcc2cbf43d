//! Option processing for the speaker-identification application.
//!
//! The first argument selects the mode. Every following token is
//! validated against the known flag list; the first unknown token
//! becomes the file-or-directory argument, a second unknown integer
//! becomes the expected speaker id, and a third unknown token is an
//! error.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OptionError {
    #[error("No arguments have been specified.")]
    NoArguments,
    #[error("Unrecognized option: {0}")]
    UnknownMode(String),
    #[error("Unrecognized options found: {0:?}")]
    TooManyUnknowns(Vec<String>),
    #[error("{mode} requires a {what} argument")]
    MissingTarget { mode: String, what: &'static str },
}

/// Which statistics tables `--stats` prints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsScope {
    PerConfig,
    PerSpeaker,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Train,
    SingleTrain,
    Ident,
    BatchIdent,
    Stats(StatsScope),
    BestScore,
    Reset,
    Version,
    Help,
    Gui,
}

impl Mode {
    fn parse(token: &str) -> Option<Mode> {
        Some(match token {
            "--train" => Mode::Train,
            "--single-train" => Mode::SingleTrain,
            "--ident" => Mode::Ident,
            "--batch-ident" => Mode::BatchIdent,
            "--stats" => Mode::Stats(StatsScope::Both),
            "--stats=per-config" => Mode::Stats(StatsScope::PerConfig),
            "--stats=per-speaker" => Mode::Stats(StatsScope::PerSpeaker),
            "--stats=both" => Mode::Stats(StatsScope::Both),
            "--best-score" => Mode::BestScore,
            "--reset" => Mode::Reset,
            "--version" => Mode::Version,
            "--help" | "-h" => Mode::Help,
            "--gui" => Mode::Gui,
            _ => return None,
        })
    }

    /// Modes that need a file or directory argument.
    pub fn needs_target(&self) -> Option<&'static str> {
        match self {
            Mode::Train | Mode::BatchIdent => Some("directory"),
            Mode::SingleTrain | Mode::Ident => Some("file"),
            _ => None,
        }
    }
}

/// Every non-mode flag the application accepts, in usage order.
/// The second field marks flags whose algorithm is not implemented;
/// they parse but are rejected at dispatch.
pub const KNOWN_FLAGS: &[(&str, bool)] = &[
    // Loaders
    ("-wav", false),
    ("-text", false),
    // Preprocessing
    ("-silence", false),
    ("-noise", false),
    ("-raw", false),
    ("-norm", false),
    ("-low", false),
    ("-high", false),
    ("-boost", false),
    ("-band", false),
    ("-bandstop", false),
    ("-highpassboost", false),
    ("-endp", false),
    ("-lowcfe", true),
    ("-highcfe", true),
    ("-bandcfe", true),
    ("-bandstopcfe", true),
    // Feature extraction
    ("-lpc", false),
    ("-fft", false),
    ("-minmax", false),
    ("-randfe", false),
    ("-aggr", false),
    ("-f0", true),
    ("-segm", true),
    ("-cepstral", true),
    // Classification
    ("-nn", false),
    ("-cheb", false),
    ("-eucl", false),
    ("-mink", false),
    ("-diff", false),
    ("-zipf", true),
    ("-randcl", false),
    ("-markov", true),
    ("-hamming", false),
    ("-cos", false),
    // Misc
    ("-debug", false),
    ("-spectrogram", false),
    ("-graph", false),
];

/// A parsed command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptionSet {
    pub mode: Mode,
    /// Validated flag tokens in command-line order.
    pub flags: Vec<String>,
    /// The file or directory argument, when present.
    pub target: Option<String>,
    /// The expected speaker id, when supplied on the command line.
    pub expected_id: Option<u32>,
    /// Diagnostics produced during parsing (e.g. an unparsable
    /// expected id, which is ignored with a warning).
    pub warnings: Vec<String>,
}

impl OptionSet {
    pub fn has(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    /// The first flag in `candidates` that is set.
    pub fn first_of<'a>(&self, candidates: &[&'a str]) -> Option<&'a str> {
        self.flags
            .iter()
            .find_map(|f| candidates.iter().find(|c| *c == f).copied())
    }

    /// Not-implemented flags present on this command line.
    pub fn unimplemented_flags(&self) -> Vec<&str> {
        self.flags
            .iter()
            .filter(|f| {
                KNOWN_FLAGS
                    .iter()
                    .any(|(name, stub)| *stub && name == f)
            })
            .map(String::as_str)
            .collect()
    }
}

/// Parses the argument vector (program name excluded).
pub fn parse(args: &[String]) -> Result<OptionSet, OptionError> {
    let Some(mode_token) = args.first() else {
        return Err(OptionError::NoArguments);
    };
    let mode =
        Mode::parse(mode_token).ok_or_else(|| OptionError::UnknownMode(mode_token.clone()))?;

    let mut set = OptionSet {
        mode,
        flags: Vec::new(),
        target: None,
        expected_id: None,
        warnings: Vec::new(),
    };
    let mut unknowns: Vec<String> = Vec::new();
    for token in &args[1..] {
        if KNOWN_FLAGS.iter().any(|(name, _)| name == token) {
            set.flags.push(token.clone());
        } else {
            unknowns.push(token.clone());
        }
    }

    match unknowns.len() {
        0 => {}
        1 => set.target = Some(unknowns[0].clone()),
        2 => {
            set.target = Some(unknowns[0].clone());
            match unknowns[1].parse::<u32>() {
                Ok(id) => set.expected_id = Some(id),
                Err(e) => set.warnings.push(format!(
                    "WARNING: could not parse expected speaker ID ({e}), ignoring..."
                )),
            }
        }
        _ => return Err(OptionError::TooManyUnknowns(unknowns)),
    }

    if let Some(what) = set.mode.needs_target() {
        if set.target.is_none() {
            return Err(OptionError::MissingTarget {
                mode: mode_token.clone(),
                what,
            });
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(tokens: &[&str]) -> Vec<String> {
        tokens.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn mode_is_the_first_argument() {
        let set = parse(&args(&["--ident", "f.wav", "-norm", "-fft", "-eucl"])).unwrap();
        assert_eq!(set.mode, Mode::Ident);
        assert_eq!(set.target.as_deref(), Some("f.wav"));
        assert_eq!(set.flags, vec!["-norm", "-fft", "-eucl"]);
        assert_eq!(set.expected_id, None);
    }

    #[test]
    fn no_arguments_is_an_error() {
        assert!(matches!(parse(&[]), Err(OptionError::NoArguments)));
    }

    #[test]
    fn unknown_mode_is_an_error() {
        assert!(matches!(
            parse(&args(&["--frobnicate"])),
            Err(OptionError::UnknownMode(_))
        ));
    }

    #[test]
    fn second_unknown_is_the_expected_id() {
        let set = parse(&args(&["--ident", "f.wav", "7", "-fft"])).unwrap();
        assert_eq!(set.expected_id, Some(7));
        assert_eq!(set.target.as_deref(), Some("f.wav"));
    }

    #[test]
    fn unparsable_expected_id_warns_and_is_ignored() {
        let set = parse(&args(&["--ident", "f.wav", "seven"])).unwrap();
        assert_eq!(set.expected_id, None);
        assert_eq!(set.warnings.len(), 1);
    }

    #[test]
    fn third_unknown_is_an_error() {
        assert!(matches!(
            parse(&args(&["--ident", "f.wav", "7", "extra"])),
            Err(OptionError::TooManyUnknowns(_))
        ));
    }

    #[test]
    fn stats_scopes_parse() {
        assert_eq!(
            parse(&args(&["--stats"])).unwrap().mode,
            Mode::Stats(StatsScope::Both)
        );
        assert_eq!(
            parse(&args(&["--stats=per-config"])).unwrap().mode,
            Mode::Stats(StatsScope::PerConfig)
        );
        assert_eq!(
            parse(&args(&["--stats=per-speaker"])).unwrap().mode,
            Mode::Stats(StatsScope::PerSpeaker)
        );
    }

    #[test]
    fn modes_requiring_targets_enforce_them() {
        assert!(matches!(
            parse(&args(&["--train"])),
            Err(OptionError::MissingTarget { .. })
        ));
        assert!(parse(&args(&["--reset"])).is_ok());
    }

    #[test]
    fn unimplemented_flags_are_accepted_then_reported() {
        let set = parse(&args(&["--ident", "f.wav", "-lowcfe", "-norm"])).unwrap();
        assert_eq!(set.unimplemented_flags(), vec!["-lowcfe"]);
    }

    #[test]
    fn flag_order_round_trips() {
        let original = ["-raw", "-fft", "-cheb", "-debug"];
        let mut full = vec!["--batch-ident".to_string(), "dir".to_string()];
        full.extend(original.iter().map(|t| t.to_string()));
        let set = parse(&full).unwrap();
        assert_eq!(set.flags, original);
        // Regenerating an equivalent command line reproduces the set.
        let mut regen = vec!["--batch-ident".to_string(), "dir".to_string()];
        regen.extend(set.flags.iter().cloned());
        assert_eq!(parse(&regen).unwrap(), set);
    }
}
