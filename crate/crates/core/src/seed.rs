//! Bundled seed lexicon, grammar and labeled mini-corpus.

use std::sync::OnceLock;

use crate::corpus::{read_corpus, LabeledTweet};
use crate::grammar::{parse_rule_file, Grammar};
use crate::lexicon::{Lexicon, LexiconBuilder};

pub const BASE_LIST: &str = include_str!("../data/base.tsv");
pub const TWITTER_OVERLAY: &str = include_str!("../data/twitter.tsv");
pub const NAMES: &str = include_str!("../data/names.txt");
pub const GRAMMAR: &str = include_str!("../data/questions.grammar");
pub const CORPUS: &str = include_str!("../data/corpus.tsv");

pub fn lexicon() -> &'static Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(|| {
        LexiconBuilder::new(BASE_LIST.lines())
            .and_then(|b| b.overlay(TWITTER_OVERLAY.lines()))
            .map(|b| b.names(NAMES.lines()).build())
            .expect("bundled lexicon lists are well-formed")
    })
}

pub fn grammar() -> &'static Grammar {
    static GRAMMAR_: OnceLock<Grammar> = OnceLock::new();
    GRAMMAR_.get_or_init(|| parse_rule_file(GRAMMAR.lines()).expect("bundled grammar is valid"))
}

pub fn corpus() -> Vec<LabeledTweet> {
    read_corpus(CORPUS.lines()).expect("bundled corpus is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::validate_grammar;

    #[test]
    fn seed_grammar_validates_clean() {
        let report = validate_grammar(grammar(), Some(lexicon()));
        assert!(report.is_clean(), "{:?}", report.warnings);
    }

    #[test]
    fn seed_lexicon_shape() {
        let lex = lexicon();
        assert!((1500..=2500).contains(&lex.len()), "{}", lex.len());
        for w in [
            "hows", "wats", "whatre", "wheres", "whcha", "wasup", "wazat", "whats", "whos", "wtf",
            "watcha", "whatare", "whatz", "whose",
        ] {
            let tags = lex.get(w).unwrap_or_else(|| panic!("{w} missing"));
            assert!(tags.iter().any(|t| t.as_str() == "WPS"), "{w}");
        }
        assert!(lex.dump().lines().any(|l| l == "kindle\tVB,NNP"));
    }

    #[test]
    fn seed_corpus_loads() {
        assert_eq!(corpus().len(), 40);
    }
}
