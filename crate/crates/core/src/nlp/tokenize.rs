//! Character and word tokenizers shared by the language-identification
//! and Zipf analysis paths.

/// Character-stream tokenizer selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TokenizerMode {
    /// Lowercased ASCII letters and digits only; everything else is a
    /// blank and is discarded.
    #[default]
    Restricted,
    /// Every non-blank character, case preserved.
    Unrestricted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TokenizerOptions {
    pub mode: TokenizerMode,
    pub case_sensitive: bool,
    pub parse_numbers: bool,
    pub quotes_as_token: bool,
    pub eos_significant: bool,
}

/// Streams the text into n-gram characters according to the mode.
pub fn tokenize_chars(text: &str, opts: &TokenizerOptions) -> Vec<char> {
    match opts.mode {
        TokenizerMode::Restricted => text
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect(),
        TokenizerMode::Unrestricted => text.chars().filter(|c| !c.is_whitespace()).collect(),
    }
}

/// Word tokenizer for corpus statistics: maximal letter runs, folded to
/// lower case unless `case_sensitive`. Options add digit runs, quoted
/// strings as single tokens, and end-of-sentence marks as tokens.
pub fn tokenize_words(text: &str, opts: &TokenizerOptions) -> Vec<String> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if opts.quotes_as_token && c == '"' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != '"' {
                j += 1;
            }
            if j < chars.len() {
                let quoted: String = chars[i + 1..j].iter().collect();
                tokens.push(fold(&quoted, opts));
                i = j + 1;
                continue;
            }
        }
        if c.is_alphabetic() {
            let mut j = i;
            while j < chars.len() && chars[j].is_alphabetic() {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            tokens.push(fold(&word, opts));
            i = j;
            continue;
        }
        if opts.parse_numbers && c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            tokens.push(chars[i..j].iter().collect());
            i = j;
            continue;
        }
        if opts.eos_significant && matches!(c, '.' | '!' | '?') {
            tokens.push(c.to_string());
        }
        i += 1;
    }
    tokens
}

fn fold(s: &str, opts: &TokenizerOptions) -> String {
    if opts.case_sensitive {
        s.to_string()
    } else {
        s.to_lowercase()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restricted_folds_and_drops() {
        let opts = TokenizerOptions::default();
        assert_eq!(tokenize_chars("Ab c", &opts), vec!['a', 'b', 'c']);
        assert_eq!(tokenize_chars("", &opts), Vec::<char>::new());
        assert_eq!(tokenize_chars("a-1!", &opts), vec!['a', '1']);
    }

    #[test]
    fn unrestricted_keeps_case_and_punctuation() {
        let opts = TokenizerOptions {
            mode: TokenizerMode::Unrestricted,
            ..TokenizerOptions::default()
        };
        assert_eq!(tokenize_chars("Ab c", &opts), vec!['A', 'b', 'c']);
        assert_eq!(tokenize_chars("a-b", &opts), vec!['a', '-', 'b']);
    }

    #[test]
    fn words_default_to_lowercased_letter_runs() {
        let opts = TokenizerOptions::default();
        assert_eq!(
            tokenize_words("The cat, the DOG 42!", &opts),
            vec!["the", "cat", "the", "dog"]
        );
    }

    #[test]
    fn word_options_toggle_behaviour() {
        let mut opts = TokenizerOptions {
            case_sensitive: true,
            ..TokenizerOptions::default()
        };
        assert_eq!(tokenize_words("The Cat", &opts), vec!["The", "Cat"]);

        opts.case_sensitive = false;
        opts.parse_numbers = true;
        assert_eq!(tokenize_words("a 42 b", &opts), vec!["a", "42", "b"]);

        opts.parse_numbers = false;
        opts.eos_significant = true;
        assert_eq!(tokenize_words("end. go!", &opts), vec!["end", ".", "go", "!"]);

        opts.eos_significant = false;
        opts.quotes_as_token = true;
        assert_eq!(
            tokenize_words("say \"foo bar\" now", &opts),
            vec!["say", "foo bar", "now"]
        );
    }
}
