//! Top-down recognizer and tweet classifier.
//!
//! The recognizer is a depth-first, backtracking search over leftmost
//! derivations. It keeps an explicit stack of symbols still to be matched and
//! expands the top nonterminal with each of its rules in file order, so the
//! first derivation found is the one a plain recursive-descent parser that
//! honours rule order would find.
//!
//! Three prunings keep it fast without changing the answer:
//!
//! * a rule is tried only if the next token can begin it (FIRST sets);
//! * the summed minimum yield of the stack must fit in the tokens left;
//! * a `(position, stack)` pair that failed once fails again, so it is
//!   remembered, unless the failure was caused by the depth cap.
//!
//! `depth` is the number of rule expansions on the current search path. Each
//! token admits at most one expansion per nonterminal before it is consumed
//! (left recursion was rejected at load time), so any derivation of `n`
//! tokens has depth at most `n * nonterminals`. The default cap,
//! `4n + 16`, is far above what natural grammars reach and is a guard
//! against grammars with long unit-rule chains.

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;
use thiserror::Error;

use crate::grammar::{Bits, Compiled, First, Grammar, QuestionType, RuleId, Sym, UNPRODUCTIVE};
use crate::lexicon::Lexicon;
use crate::tokenizer::{Token, TokenKind, TokenizedTweet};

/// Default depth cap for a segment of `n` tokens.
pub fn default_depth_cap(n: usize) -> usize {
    4 * n + 16
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecognizeError {
    /// No derivation found within the cap, and the cap cut the search short.
    #[error("search exceeded depth cap {cap}")]
    DepthExceeded { cap: usize },
    #[error("unknown start nonterminal {0}")]
    UnknownStart(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub states_explored: usize,
    pub max_depth: usize,
}

/// How the depth cap is chosen for a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthCap {
    /// `4n + 16`.
    Default,
    Fixed(usize),
}

impl DepthCap {
    pub fn for_len(self, n: usize) -> usize {
        match self {
            DepthCap::Default => default_depth_cap(n),
            DepthCap::Fixed(c) => c,
        }
    }
}

/// Index of the first WORD or NUMERAL token, or `tokens.len()` if none.
pub fn strip_leading_extraneous(tokens: &[Token]) -> usize {
    tokens
        .iter()
        .position(|t| matches!(t.kind, TokenKind::Word | TokenKind::Numeral))
        .unwrap_or(tokens.len())
}

/// Tokens resolved against a compiled grammar.
struct Input {
    tags: Vec<Bits>,
    lits: Vec<Option<u32>>,
    punct_suffix: Vec<bool>,
}

impl Input {
    fn new(c: &Compiled, lexicon: &Lexicon, tokens: &[Token]) -> Self {
        let tags = tokens
            .iter()
            .map(|t| {
                let mut b = Bits::default();
                for tag in lexicon.tags_for(t) {
                    if let Some(&i) = c.tag_index.get(tag.as_str()) {
                        b.insert(i);
                    }
                }
                b
            })
            .collect();
        let lits = tokens
            .iter()
            .map(|t| c.lit_index.get(&t.norm).copied())
            .collect();
        // punct_suffix[i]: every token from i on is PUNCT
        let mut punct_suffix = vec![true; tokens.len() + 1];
        for i in (0..tokens.len()).rev() {
            punct_suffix[i] = punct_suffix[i + 1] && tokens[i].kind == TokenKind::Punct;
        }
        Input {
            tags,
            lits,
            punct_suffix,
        }
    }

    fn len(&self) -> usize {
        self.lits.len()
    }

    fn matches(&self, sym: Sym, pos: usize) -> bool {
        match sym {
            Sym::Tag(t) => self.tags[pos].contains(t),
            Sym::Lit(w) => self.lits[pos] == Some(w),
            Sym::Nt(_) => unreachable!("nonterminals are expanded, not matched"),
        }
    }

    fn can_begin(&self, f: &First, pos: usize) -> bool {
        f.tags.intersects(&self.tags[pos]) || self.lits[pos].is_some_and(|w| f.lits.contains(w))
    }
}

/// Stacks are hash-consed: a stack is the id of its top node, each node is
/// `(symbol, rest)`, and equal stacks share one id. Id 0 is the empty stack.
struct Stacks {
    nodes: Vec<StackNode>,
    index: FxHashMap<(Sym, u32), u32>,
}

#[derive(Clone, Copy)]
struct StackNode {
    sym: Sym,
    rest: u32,
    /// Fewest tokens the whole stack can derive.
    need: usize,
}

const EMPTY: u32 = 0;

impl Stacks {
    fn new() -> Self {
        let bottom = StackNode {
            sym: Sym::Nt(u32::MAX),
            rest: EMPTY,
            need: 0,
        };
        Stacks {
            nodes: vec![bottom],
            index: FxHashMap::default(),
        }
    }

    fn push(&mut self, c: &Compiled, sym: Sym, rest: u32) -> u32 {
        if let Some(&id) = self.index.get(&(sym, rest)) {
            return id;
        }
        let len = match sym {
            Sym::Nt(n) => c.min_len[n as usize],
            _ => 1,
        };
        let id = self.nodes.len() as u32;
        self.nodes.push(StackNode {
            sym,
            rest,
            need: self.nodes[rest as usize].need.saturating_add(len),
        });
        self.index.insert((sym, rest), id);
        id
    }
}

struct Search<'a> {
    c: &'a Compiled,
    input: &'a Input,
    cap: usize,
    stacks: Stacks,
    trace: Vec<RuleId>,
    failed: FxHashSet<(usize, u32)>,
    trips: usize,
    stats: SearchStats,
}

impl Search<'_> {
    fn go(&mut self, pos: usize, stack: u32) -> bool {
        self.stats.states_explored += 1;
        if stack == EMPTY {
            return self.input.punct_suffix[pos];
        }
        let node = self.stacks.nodes[stack as usize];
        if node.need > self.input.len() - pos {
            return false;
        }
        match node.sym {
            Sym::Tag(_) | Sym::Lit(_) => {
                self.input.matches(node.sym, pos) && self.go(pos + 1, node.rest)
            }
            Sym::Nt(a) => {
                if !self.input.can_begin(&self.c.first[a as usize], pos)
                    || self.failed.contains(&(pos, stack))
                {
                    return false;
                }
                let trips_before = self.trips;
                for &rid in &self.c.rules_by_nt[a as usize] {
                    if self.c.rule_min_len[rid] == UNPRODUCTIVE
                        || !self.input.can_begin(&self.c.rule_first[rid], pos)
                    {
                        continue;
                    }
                    if self.trace.len() >= self.cap {
                        self.trips += 1;
                        continue;
                    }
                    let mut next = node.rest;
                    for &sym in self.c.rhs[rid].iter().rev() {
                        next = self.stacks.push(self.c, sym, next);
                    }
                    if self.stacks.nodes[next as usize].need > self.input.len() - pos {
                        continue;
                    }
                    self.trace.push(rid);
                    self.stats.max_depth = self.stats.max_depth.max(self.trace.len());
                    if self.go(pos, next) {
                        return true;
                    }
                    self.trace.pop();
                }
                // a failure caused by the cap might succeed on another path
                if self.trips == trips_before {
                    self.failed.insert((pos, stack));
                }
                false
            }
        }
    }
}

/// A recognizer bound to one grammar and lexicon.
#[derive(Debug, Clone, Copy)]
pub struct Recognizer<'a> {
    grammar: &'a Grammar,
    lexicon: &'a Lexicon,
    depth_cap: DepthCap,
}

impl<'a> Recognizer<'a> {
    pub fn new(grammar: &'a Grammar, lexicon: &'a Lexicon) -> Self {
        Recognizer {
            grammar,
            lexicon,
            depth_cap: DepthCap::Default,
        }
    }

    pub fn with_depth_cap(mut self, cap: DepthCap) -> Self {
        self.depth_cap = cap;
        self
    }

    /// Rule trace of the first derivation of `tokens` from `start`, allowing
    /// trailing PUNCT tokens to go unmatched.
    pub fn recognize(
        &self,
        tokens: &[Token],
        start: &str,
    ) -> (Result<Option<Vec<RuleId>>, RecognizeError>, SearchStats) {
        let c = self.grammar.compiled();
        let input = Input::new(c, self.lexicon, tokens);
        self.run(c, &input, start, self.depth_cap.for_len(tokens.len()))
    }

    fn run(
        &self,
        c: &Compiled,
        input: &Input,
        start: &str,
        cap: usize,
    ) -> (Result<Option<Vec<RuleId>>, RecognizeError>, SearchStats) {
        let Some(&s) = c.nt_index.get(start) else {
            return (
                Err(RecognizeError::UnknownStart(start.to_owned())),
                SearchStats::default(),
            );
        };
        if input.len() == 0 {
            return (Ok(None), SearchStats::default());
        }
        if c.min_len[s as usize] == UNPRODUCTIVE {
            return (Ok(None), SearchStats::default());
        }
        let mut search = Search {
            c,
            input,
            cap,
            stacks: Stacks::new(),
            trace: Vec::new(),
            failed: FxHashSet::default(),
            trips: 0,
            stats: SearchStats::default(),
        };
        let root = search.stacks.push(c, Sym::Nt(s), EMPTY);
        let result = if search.go(0, root) {
            Ok(Some(std::mem::take(&mut search.trace)))
        } else if search.trips > 0 {
            Err(RecognizeError::DepthExceeded { cap })
        } else {
            Ok(None)
        };
        (result, search.stats)
    }

    pub fn classify(&self, tweet: &TokenizedTweet) -> ParseResult {
        let c = self.grammar.compiled();
        let mut diagnostics = Vec::new();
        for (index, view) in segment_views(&tweet.tokens).into_iter().enumerate() {
            let input = Input::new(c, self.lexicon, &view);
            let cap = self.depth_cap.for_len(view.len());
            for q in QuestionType::ALL {
                match self.run(c, &input, self.grammar.start(q), cap).0 {
                    Ok(Some(trace)) => {
                        return ParseResult {
                            is_question: true,
                            question_type: Some(q),
                            matched_rule_trace: trace,
                            segment_index: Some(index),
                            diagnostics,
                        }
                    }
                    Ok(None) => {}
                    Err(e) => diagnostics.push(format!("segment {index}, {q}: {e}")),
                }
            }
        }
        ParseResult {
            is_question: false,
            question_type: None,
            matched_rule_trace: Vec::new(),
            segment_index: None,
            diagnostics,
        }
    }
}

/// Recognize `tokens` from `start` with the default depth cap.
pub fn recognize(
    grammar: &Grammar,
    lexicon: &Lexicon,
    tokens: &[Token],
    start: &str,
) -> Result<Option<Vec<RuleId>>, RecognizeError> {
    Recognizer::new(grammar, lexicon).recognize(tokens, start).0
}

fn keep_in_view(t: &Token) -> bool {
    match t.kind {
        TokenKind::Word | TokenKind::Numeral | TokenKind::Usertag | TokenKind::Hashtag => true,
        TokenKind::Punct => t.norm == ",",
        TokenKind::Url | TokenKind::Emoticon => false,
    }
}

/// Sentence segments as the grammar sees them.
///
/// The tweet is split at end punctuation; each segment loses its leading
/// extraneous tokens, then URLs, emoticons and all punctuation except commas.
/// Empty segments are dropped.
pub fn segment_views(tokens: &[Token]) -> Vec<Vec<Token>> {
    let body = &tokens[strip_leading_extraneous(tokens)..];
    body.split(Token::is_end_punct)
        .filter_map(|seg| {
            let seg = &seg[strip_leading_extraneous(seg)..];
            let view: Vec<Token> = seg.iter().filter(|t| keep_in_view(t)).cloned().collect();
            (!view.is_empty()).then_some(view)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseResult {
    pub is_question: bool,
    pub question_type: Option<QuestionType>,
    /// Rules of the leftmost derivation, in expansion order.
    pub matched_rule_trace: Vec<RuleId>,
    /// Index among the tweet's non-empty segments.
    pub segment_index: Option<usize>,
    pub diagnostics: Vec<String>,
}

/// Classify a tweet. The first segment, and the first question type in
/// [`QuestionType::ALL`] order, that yields a derivation wins.
pub fn classify_tweet(grammar: &Grammar, lexicon: &Lexicon, tweet: &TokenizedTweet) -> ParseResult {
    Recognizer::new(grammar, lexicon).classify(tweet)
}
