//! Question detection for tweets.
//!
//! The pipeline is [`tokenize`] to get normalized tokens, a [`Lexicon`] to
//! map each token to its possible POS tags, and a question [`Grammar`]
//! searched top-down by [`classify_tweet`]. [`corpus`] scores the result
//! against labeled data.
//!
//! ```
//! use qtweet::{classify_tweet, seed, tokenize, QuestionType};
//!
//! let tweet = tokenize("ru listening??").unwrap();
//! let result = classify_tweet(seed::grammar(), seed::lexicon(), &tweet);
//! assert_eq!(result.question_type, Some(QuestionType::BeInitial));
//! ```

pub mod corpus;
pub mod grammar;
pub mod lexicon;
pub mod parser;
pub mod seed;
pub mod tokenizer;

pub use corpus::{
    evaluate, evaluate_parallel, filter_candidates, read_corpus, CorpusError, EvalError,
    EvalReport, FilterReport, Label, LabeledTweet,
};
pub use grammar::{
    parse_rule_file, validate_grammar, Grammar, GrammarError, QuestionType, Rule, RuleId, Symbol,
    ValidationReport, Warning,
};
pub use lexicon::{Lexicon, LexiconBuilder, LexiconError, PosTag, TagSet};
pub use parser::{
    classify_tweet, recognize, strip_leading_extraneous, DepthCap, ParseResult, RecognizeError,
    Recognizer, SearchStats,
};
pub use tokenizer::{
    normalize_word, tokenize, Span, Token, TokenKind, TokenizeError, TokenizedTweet,
};
