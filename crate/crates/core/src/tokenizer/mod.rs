//! Single-pass tokenizer for tweet text.
//!
//! Besides splitting words, the tokenizer folds away the spelling noise that
//! is typical of tweets: every word is lowercased, loses its apostrophes and
//! has runs of a repeated character collapsed to one ("pleaaaaaase" becomes
//! "please"). Runs of end punctuation collapse to a single token and flag the
//! tweet. Usernames, hashtags, `#`-numerals, URLs and emoticons are kept as
//! tokens of their own kind.

mod emoticon;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use emoticon::scan_emoticon;

/// Longest input accepted by [`tokenize`], in characters.
pub const MAX_TWEET_CHARS: usize = 1000;

/// Sentence-final punctuation.
pub const END_PUNCT: [char; 3] = ['.', '?', '!'];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TokenizeError {
    #[error("input is empty or whitespace-only")]
    EmptyInput,
    #[error("input has {0} characters, more than the {max} allowed", max = MAX_TWEET_CHARS)]
    TooLong(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TokenKind {
    Word,
    Usertag,
    Hashtag,
    Url,
    Emoticon,
    Numeral,
    Punct,
}

impl TokenKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TokenKind::Word => "WORD",
            TokenKind::Usertag => "USERTAG",
            TokenKind::Hashtag => "HASHTAG",
            TokenKind::Url => "URL",
            TokenKind::Emoticon => "EMOTICON",
            TokenKind::Numeral => "NUMERAL",
            TokenKind::Punct => "PUNCT",
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Half-open range of character (not byte) offsets into the raw tweet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    /// The characters of the raw tweet covered by `span`.
    pub surface: String,
    /// Normalized form used for lexicon lookup and literal matching.
    ///
    /// WORD: [`normalize_word`] of the surface ("at" for a bare `@`).
    /// HASHTAG: the normalized tag body. NUMERAL: its digits. PUNCT: the
    /// single (collapsed) punctuation character. Empty for USERTAG, URL and
    /// EMOTICON.
    pub norm: String,
    pub kind: TokenKind,
    pub span: Span,
}

impl Token {
    pub fn is_end_punct(&self) -> bool {
        self.kind == TokenKind::Punct && self.norm.chars().all(|c| END_PUNCT.contains(&c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenizedTweet {
    pub raw: String,
    pub tokens: Vec<Token>,
    /// Set when two or more end-punctuation characters stand next to each
    /// other anywhere in the raw text.
    pub repeated_punct: bool,
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}')
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_apostrophe(c)
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Lowercase, drop apostrophes, then collapse every run of one character.
///
/// ```
/// use qtweet::normalize_word;
/// assert_eq!(normalize_word("pleaaaaaase"), "please");
/// assert_eq!(normalize_word("we're"), "were");
/// ```
pub fn normalize_word(w: &str) -> String {
    let mut out = String::with_capacity(w.len());
    let mut last = None;
    for c in w
        .chars()
        .flat_map(char::to_lowercase)
        .filter(|&c| !is_apostrophe(c))
    {
        if last != Some(c) {
            out.push(c);
            last = Some(c);
        }
    }
    out
}

/// Collapse a run of end punctuation to one character.
///
/// `?` beats `!` beats `.` so the question signal survives the collapse.
/// Returns the character and whether the run was longer than one.
pub fn collapse_punct_run(run: &str) -> (char, bool) {
    let c = if run.contains('?') {
        '?'
    } else if run.contains('!') {
        '!'
    } else {
        '.'
    };
    (c, run.chars().nth(1).is_some())
}

fn has_adjacent_end_punct(chars: &[char]) -> bool {
    chars
        .windows(2)
        .any(|w| END_PUNCT.contains(&w[0]) && END_PUNCT.contains(&w[1]))
}

fn starts_with_ci(chars: &[char], at: usize, prefix: &str) -> bool {
    let mut i = at;
    for p in prefix.chars() {
        match chars.get(i) {
            Some(c) if c.to_ascii_lowercase() == p => i += 1,
            _ => return false,
        }
    }
    true
}

struct Lexer<'a> {
    chars: &'a [char],
    pos: usize,
    tokens: Vec<Token>,
    repeated_punct: bool,
}

impl Lexer<'_> {
    fn take_while(&self, from: usize, pred: impl Fn(char) -> bool) -> usize {
        let mut end = from;
        while end < self.chars.len() && pred(self.chars[end]) {
            end += 1;
        }
        end
    }

    fn slice(&self, start: usize, end: usize) -> String {
        self.chars[start..end].iter().collect()
    }

    fn emit(&mut self, kind: TokenKind, start: usize, end: usize, norm: String) {
        let surface = self.slice(start, end);
        self.tokens.push(Token {
            surface,
            norm,
            kind,
            span: Span { start, end },
        });
        self.pos = end;
    }

    fn next_token(&mut self) {
        let start = self.pos;
        let c = self.chars[start];
        let next = self.chars.get(start + 1).copied();

        if ["http://", "https://", "www."]
            .iter()
            .any(|p| starts_with_ci(self.chars, start, p))
        {
            let end = self.take_while(start, |c| !c.is_whitespace());
            if has_adjacent_end_punct(&self.chars[start..end]) {
                self.repeated_punct = true;
            }
            self.emit(TokenKind::Url, start, end, String::new());
            return;
        }

        if let Some(len) = emoticon::scan_chars(self.chars, start) {
            self.emit(TokenKind::Emoticon, start, start + len, String::new());
            return;
        }

        if c == '@' {
            if next.is_some_and(is_name_char) {
                let end = self.take_while(start + 1, is_name_char);
                self.emit(TokenKind::Usertag, start, end, String::new());
            } else {
                self.emit(TokenKind::Word, start, start + 1, "at".to_owned());
            }
            return;
        }

        if c == '#' {
            match next {
                Some(d) if d.is_ascii_digit() => {
                    let end = self.take_while(start + 1, |c| c.is_ascii_digit());
                    let digits = self.slice(start + 1, end);
                    self.emit(TokenKind::Numeral, start, end, digits);
                    return;
                }
                Some(l) if l.is_alphabetic() => {
                    let end = self.take_while(start + 1, is_name_char);
                    let body = normalize_word(&self.slice(start + 1, end));
                    self.emit(TokenKind::Hashtag, start, end, body);
                    return;
                }
                _ => {}
            }
        }

        if END_PUNCT.contains(&c) {
            let end = self.take_while(start, |c| END_PUNCT.contains(&c));
            let (p, repeated) = collapse_punct_run(&self.slice(start, end));
            self.repeated_punct |= repeated;
            self.emit(TokenKind::Punct, start, end, p.to_string());
            return;
        }

        if is_word_char(c) {
            let end = self.take_while(start, is_word_char);
            let surface = self.slice(start, end);
            if surface.chars().all(is_apostrophe) {
                // a lone quote mark is punctuation, not a word
                self.emit(TokenKind::Punct, start, start + 1, c.to_string());
            } else if surface.chars().any(char::is_alphabetic) {
                let norm = normalize_word(&surface);
                self.emit(TokenKind::Word, start, end, norm);
            } else {
                // digits with stray apostrophes: numerals, quotes as punctuation
                let mut at = start;
                while at < end {
                    if is_apostrophe(self.chars[at]) {
                        self.emit(TokenKind::Punct, at, at + 1, self.chars[at].to_string());
                    } else {
                        let run = self.take_while(at, |c| !is_apostrophe(c)).min(end);
                        let digits = self.slice(at, run);
                        self.emit(TokenKind::Numeral, at, run, digits);
                    }
                    at = self.pos;
                }
            }
            return;
        }

        if emoticon::is_pictograph(c) {
            let end = self.take_while(start + 1, |c| {
                emoticon::is_pictograph_modifier(c) || emoticon::is_pictograph(c)
            });
            self.emit(TokenKind::Emoticon, start, end, String::new());
            return;
        }

        self.emit(TokenKind::Punct, start, start + 1, c.to_string());
    }
}

/// Tokenize one tweet.
pub fn tokenize(raw: &str) -> Result<TokenizedTweet, TokenizeError> {
    let chars: Vec<char> = raw.chars().collect();
    if chars.len() > MAX_TWEET_CHARS {
        return Err(TokenizeError::TooLong(chars.len()));
    }
    if chars.iter().all(|c| c.is_whitespace()) {
        return Err(TokenizeError::EmptyInput);
    }
    let mut lexer = Lexer {
        chars: &chars,
        pos: 0,
        tokens: Vec::new(),
        repeated_punct: false,
    };
    while lexer.pos < chars.len() {
        if chars[lexer.pos].is_whitespace() {
            lexer.pos += 1;
            continue;
        }
        lexer.next_token();
    }
    Ok(TokenizedTweet {
        raw: raw.to_owned(),
        tokens: lexer.tokens,
        repeated_punct: lexer.repeated_punct,
    })
}
