//! Test oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet, VecDeque};

use qtweet::{
    classify_tweet, parse_rule_file, tokenize, Grammar, Lexicon, QuestionType, Symbol, Token,
    TokenKind,
};
use rand::seq::SliceRandom;
use rand::Rng;

/// Exhaustive recognizer: breadth-first search over leftmost sentential
/// forms. Every symbol yields at least one token, so forms longer than the
/// input are dropped and the search space is finite.
pub fn oracle_accepts(g: &Grammar, lex: &Lexicon, tokens: &[Token], start: &str) -> bool {
    let n = tokens.len();
    let mut by_lhs: BTreeMap<&str, Vec<&[Symbol]>> = BTreeMap::new();
    for r in g.rules() {
        by_lhs.entry(r.lhs.as_str()).or_default().push(&r.rhs);
    }
    let terminal_matches = |s: &Symbol, t: &Token| match s {
        Symbol::Tag(tag) => lex.tags_for(t).contains(tag),
        Symbol::Literal(w) => &t.norm == w,
        Symbol::NonTerminal(_) => false,
    };
    // (tokens matched so far, remaining form)
    let mut seen: HashSet<(usize, Vec<Symbol>)> = HashSet::new();
    let mut queue = VecDeque::new();
    queue.push_back((0usize, vec![Symbol::NonTerminal(start.to_owned())]));
    while let Some((mut pos, mut form)) = queue.pop_front() {
        // consume leading terminals
        let mut k = 0;
        while k < form.len() && !matches!(form[k], Symbol::NonTerminal(_)) {
            if pos >= n || !terminal_matches(&form[k], &tokens[pos]) {
                break;
            }
            pos += 1;
            k += 1;
        }
        if k < form.len() && !matches!(form[k], Symbol::NonTerminal(_)) {
            continue;
        }
        form.drain(..k);
        if form.is_empty() {
            if tokens[pos..].iter().all(|t| t.kind == TokenKind::Punct) {
                return true;
            }
            continue;
        }
        if pos + form.len() > n {
            continue;
        }
        if !seen.insert((pos, form.clone())) {
            continue;
        }
        let Symbol::NonTerminal(a) = &form[0] else {
            unreachable!()
        };
        for rhs in by_lhs.get(a.as_str()).into_iter().flatten() {
            let mut next = rhs.to_vec();
            next.extend_from_slice(&form[1..]);
            queue.push_back((pos, next));
        }
    }
    false
}

pub const ORACLE_TAGS: [&str; 5] = ["NN", "VB", "JJ", "DT", "IN"];
pub const ORACLE_WORDS: [&str; 8] = ["cat", "dog", "run", "big", "the", "on", "red", "sun"];

pub struct RandomInstance {
    pub grammar: Grammar,
    pub grammar_text: String,
    pub lexicon: Lexicon,
}

/// Random grammar over nonterminals `N0..N4` with at most `max_rules`
/// rules, plus a lexicon over [`ORACLE_WORDS`]. Draws that fail to load
/// (left recursion, undefined symbols) are redrawn.
pub fn random_instance(rng: &mut impl Rng, max_rules: usize) -> RandomInstance {
    let lex_lines: Vec<String> = ORACLE_WORDS
        .iter()
        .map(|w| {
            let mut tags: Vec<&str> = ORACLE_TAGS
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.35))
                .collect();
            if tags.is_empty() {
                tags.push(ORACLE_TAGS.choose(rng).unwrap());
            }
            format!("{w}\t{}", tags.join(","))
        })
        .collect();
    let lexicon = Lexicon::from_base_list(&lex_lines).unwrap();
    loop {
        let nts = rng.gen_range(1..=5);
        let rules = rng.gen_range(nts..=max_rules.max(nts));
        let mut text = String::from(
            "%start WH N0\n%start AUX_INITIAL N0\n%start BE_INITIAL N0\n%start TAG N0\n",
        );
        for i in 0..rules {
            // every nonterminal gets at least one rule
            let lhs = if i < nts { i } else { rng.gen_range(0..nts) };
            let len = rng.gen_range(1..=3);
            let rhs: Vec<String> = (0..len)
                .map(|_| match rng.gen_range(0..10) {
                    0..=3 => format!("N{}", rng.gen_range(0..nts)),
                    4..=8 => ORACLE_TAGS.choose(rng).unwrap().to_string(),
                    _ => ORACLE_WORDS.choose(rng).unwrap().to_string(),
                })
                .collect();
            text.push_str(&format!("N{lhs} -> {}\n", rhs.join(" ")));
        }
        if let Ok(grammar) = parse_rule_file(text.lines()) {
            return RandomInstance {
                grammar,
                grammar_text: text,
                lexicon,
            };
        }
    }
}

/// A random sentence: half the time a sampled derivation of `N0`, half the
/// time random words. Sometimes followed by a `?`.
pub fn random_sentence(
    rng: &mut impl Rng,
    g: &Grammar,
    lex: &Lexicon,
    max_len: usize,
) -> Vec<Token> {
    let mut words = Vec::new();
    if rng.gen_bool(0.5) {
        let mut stack = vec![Symbol::NonTerminal("N0".into())];
        let mut steps = 0;
        while let Some(s) = stack.pop() {
            steps += 1;
            if words.len() > max_len || steps > 200 {
                break;
            }
            match s {
                Symbol::NonTerminal(a) => {
                    let alts: Vec<_> = g.rules().iter().filter(|r| r.lhs == a).collect();
                    let rule = alts.choose(rng).unwrap();
                    stack.extend(rule.rhs.iter().rev().cloned());
                }
                Symbol::Literal(w) => words.push(w),
                Symbol::Tag(t) => {
                    let cands: Vec<&str> = ORACLE_WORDS
                        .iter()
                        .copied()
                        .filter(|w| lex.lookup(w).contains(&t))
                        .collect();
                    match cands.choose(rng) {
                        Some(w) => words.push(w.to_string()),
                        None => words.push(ORACLE_WORDS.choose(rng).unwrap().to_string()),
                    }
                }
            }
        }
    }
    if words.is_empty() || words.len() > max_len {
        let len = rng.gen_range(1..=max_len);
        words = (0..len)
            .map(|_| ORACLE_WORDS.choose(rng).unwrap().to_string())
            .collect();
    }
    let mut text = words.join(" ");
    if rng.gen_bool(0.3) {
        text.push('?');
    }
    tokenize(&text).unwrap().tokens
}

pub const PREFIX_TOKENS: &[(TokenKind, &str)] = &[
    (TokenKind::Usertag, "@bob"),
    (TokenKind::Usertag, "@Jane_Doe99"),
    (TokenKind::Hashtag, "#fb"),
    (TokenKind::Hashtag, "#TBT"),
    (TokenKind::Url, "http://t.co/xyz"),
    (TokenKind::Url, "www.example.com/a?b=c"),
    (TokenKind::Emoticon, ":)"),
    (TokenKind::Emoticon, "<3"),
    (TokenKind::Emoticon, ";-)"),
    (TokenKind::Emoticon, "D:"),
    (TokenKind::Emoticon, "\u{1F600}"),
    (TokenKind::Punct, "!"),
    (TokenKind::Punct, "?!"),
    (TokenKind::Punct, "..."),
    (TokenKind::Punct, "*"),
    (TokenKind::Punct, ","),
    (TokenKind::Punct, "-"),
    (TokenKind::Punct, "\u{201C}"),
];

/// Space-separated extraneous material of 1 to 4 tokens.
pub fn random_prefix(rng: &mut impl Rng) -> String {
    let n = rng.gen_range(1..=4);
    (0..n)
        .map(|_| PREFIX_TOKENS.choose(rng).unwrap().1)
        .collect::<Vec<_>>()
        .join(" ")
}

const SYNTH_OPENERS: &[&str] = &[
    "",
    "",
    "",
    "@bob ",
    "#fb ",
    "lol ",
    "hey, ",
    "omg ",
    "Mark, ",
    "http://t.co/x ",
    ":) ",
];
const SYNTH_BODIES: &[&str] = &[
    "can you help me with my homework",
    "does anyone know a good dentist in Boston",
    "any1 wanna talk",
    "ru listening",
    "where are you going tonight",
    "what time is the party",
    "who wants to do my #mathhomework",
    "how has everyone's day gone so far",
    "is it raining in London",
    "its cold outside, isnt it",
    "i lost my keys",
    "today is going too fast for me",
    "want some chocolate",
    "just finished my homework",
    "going to the beach with my peeps",
    "i love this song",
    "whats the plan for the weekend",
    "should i buy the new iPhone or wait",
    "we're #1",
    "the cat sat on the big red couch",
];
const SYNTH_FILLERS: &[&str] = &[
    "really", "so", "the", "new", "phone", "game", "friday", "and", "my", "ppl", "b4", "2morrow",
    "gonna", "sumthing", "lol", "smh", "haha", "kindle",
];
const SYNTH_ENDS: &[&str] = &["", "?", "??", "!!", ".", "...", "?!", " :(", " <3", " #tbt"];

/// A synthetic tweet of at most 140 characters.
pub fn synthetic_tweet(rng: &mut impl Rng) -> String {
    loop {
        let mut s = String::new();
        s.push_str(SYNTH_OPENERS.choose(rng).unwrap());
        s.push_str(SYNTH_BODIES.choose(rng).unwrap());
        for _ in 0..rng.gen_range(0..4) {
            s.push(' ');
            s.push_str(SYNTH_FILLERS.choose(rng).unwrap());
        }
        s.push_str(SYNTH_ENDS.choose(rng).unwrap());
        if rng.gen_bool(0.3) {
            s.push(' ');
            s.push_str(SYNTH_BODIES.choose(rng).unwrap());
            s.push_str(SYNTH_ENDS.choose(rng).unwrap());
        }
        if s.chars().count() <= 140 {
            return s;
        }
    }
}

/// Verdict for raw text under the given resources.
pub fn verdict(g: &Grammar, lex: &Lexicon, text: &str) -> (bool, Option<QuestionType>) {
    let r = classify_tweet(g, lex, &tokenize(text).unwrap());
    (r.is_question, r.question_type)
}
