//! Structural checks over a larger grammar: the extended rule set
//! compiles, accepts the sentences it should, and keeps rejecting the
//! ungrammatical ones. Probabilities here are deliberately not pinned;
//! the Basic Grammar in the acceptance suite carries the exact-value
//! checks.

use patrec_core::parsing::{build_tree, compile_grammar, cyk_parse};

const EXTENDED_GRAMMAR: &str = "\
<S>            ::= 0.35 <NP> <VP>
<S>         ::= 0.25 <Pronoun> <VP>
<S>         ::= 0.03 <NOMINAL> <VP>
<S>            ::= 0.05 <V> <NP>
<S>            ::= 0.17 <V> <Pronoun>
<S>            ::= 0.05 <V> <NOMINAL>
<S>            ::= 0.10 <AuxNP> <VP>
<NP>        ::= 0.35 <DET> <NOMINAL>
<NP>        ::= 0.65 <ProperNoun> <NOMINAL>
<NOMINAL>   ::= 0.10 <ProperNoun> <NOMINAL>
<NOMINAL>    ::= 0.90 <ADJ> <NOMINAL>
<VP>        ::= 0.95 <V> <NP>
<VP>        ::= 0.05 <VP> <NP>
<AuxNP>        ::= 0.20 <Aux> <NP>
<AuxNP>     ::= 0.60 <Aux> <Pronoun>
<AuxNP>     ::= 0.20 <Aux> <NOMINAL>
<DET>         ::= 0.50 the
<DET>         ::= 0.40 a
<DET>         ::= 0.05 my
<DET>         ::= 0.05 that
<NOMINAL>    ::= 0.20 rabbit
<NOMINAL>    ::= 0.10 smile
<NOMINAL>    ::= 0.20 cat
<NOMINAL>    ::= 0.05 book
<NOMINAL>   ::= 0.25 flights
<NOMINAL>   ::= 0.20 meal
<V>            ::= 0.50 has
<V>            ::= 0.10 eats
<V>            ::= 0.10 book
<V>            ::= 0.10 include
<V>            ::= 0.20 want
<Aux>        ::= 0.40 can
<Aux>        ::= 0.30 does
<Aux>        ::= 0.30 do
<ADJ>        ::= 0.80 white
<ADJ>        ::= 0.20 blue
<Pronoun>    ::= 0.40 you
<Pronoun>    ::= 0.60 I
<ProperNoun> ::= 0.40 TWA
<ProperNoun> ::= 0.60 Denver
";

fn words(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

#[test]
fn extended_grammar_compiles() {
    let g = compile_grammar(EXTENDED_GRAMMAR).unwrap();
    assert_eq!(g.rules().len(), 40);
    assert_eq!(g.start_symbol(), "S");
    assert_eq!(g.nonterminals().len(), 11);
    // "book" is both a noun and a verb; it interns as one terminal.
    assert_eq!(
        g.terminals().iter().filter(|t| *t == "book").count(),
        1
    );
}

#[test]
fn extended_grammar_accepts_more_sentences_than_the_basic_one() {
    let g = compile_grammar(EXTENDED_GRAMMAR).unwrap();
    // Sentences the reference runs parse under the extended rules.
    for sentence in [
        "my rabbit has a white smile",
        "cat has a white rabbit",
        "smile has my cat",
        "can you book TWA flights",
    ] {
        let chart = cyk_parse(&g, &words(sentence))
            .unwrap()
            .unwrap_or_else(|| panic!("{sentence:?} should parse"));
        let tree = build_tree(&chart, 0, chart.words().len() - 1, 0).unwrap();
        assert_eq!(tree.leaf_words(), chart.words());
        assert!(tree.probability > 0.0 && tree.probability <= 1.0);
    }
}

#[test]
fn extended_grammar_still_rejects_ungrammatical_input() {
    let g = compile_grammar(EXTENDED_GRAMMAR).unwrap();
    for sentence in [
        "my rabbit has a telephone",
        "rabbit my a white has smile",
        "the lion jumped through the hoop",
        "my cat has white rabbit",
    ] {
        assert!(
            cyk_parse(&g, &words(sentence)).unwrap().is_none(),
            "{sentence:?} must not parse"
        );
    }
}

#[test]
fn ambiguous_lexicon_takes_the_best_reading() {
    // "book" can start the sentence as a verb under <S> ::= <V> <NP>.
    let g = compile_grammar(EXTENDED_GRAMMAR).unwrap();
    let chart = cyk_parse(&g, &words("book a meal")).unwrap().unwrap();
    let tree = build_tree(&chart, 0, 2, 0).unwrap();
    assert_eq!(tree.children[0].nonterminal, "V");
    assert_eq!(tree.children[1].nonterminal, "NP");
}
