//! Layered part-of-speech lexicon.
//!
//! A lexicon is assembled from three lists: a base word list, a Twitter
//! overlay whose tag sets replace the base ones, and a list of personal names
//! which contributes `NNP`. Every headword is normalized exactly like a
//! tokenized word, so collisions such as "teen"/"ten" merge into one entry
//! carrying the union of their tags.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::tokenizer::{normalize_word, Token, TokenKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("word list contains no entries")]
    EmptyList,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid POS tag {0:?}: tags are nonempty runs of uppercase ASCII letters")]
pub struct InvalidTag(pub String);

/// A part-of-speech tag such as `NN`, `VBG` or the custom `PPBE`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PosTag(String);

impl PosTag {
    pub fn new(name: &str) -> Result<Self, InvalidTag> {
        if !name.is_empty() && name.bytes().all(|b| b.is_ascii_uppercase()) {
            Ok(PosTag(name.to_owned()))
        } else {
            Err(InvalidTag(name.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for PosTag {
    type Err = InvalidTag;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PosTag::new(s)
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type TagSet = BTreeSet<PosTag>;
/// Normalized headword to tag set.
pub type TagMap = BTreeMap<String, TagSet>;

/// Tags given to words the lexicon has never seen.
pub const UNKNOWN_WORD_TAGS: [&str; 4] = ["NN", "NNP", "VB", "JJ"];

fn tag_set(names: &[&str]) -> TagSet {
    names
        .iter()
        .map(|n| PosTag::new(n).expect("built-in tag names are valid"))
        .collect()
}

fn content_lines<I, S>(lines: I) -> impl Iterator<Item = (usize, String)>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    lines.into_iter().enumerate().filter_map(|(i, line)| {
        let line = line.as_ref().trim_end_matches(['\r', '\n']);
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some((i + 1, line.to_owned()))
        }
    })
}

fn parse_entry(line_no: usize, line: &str) -> Result<(String, TagSet), LexiconError> {
    let malformed = |reason: String| LexiconError::MalformedLine {
        line: line_no,
        reason,
    };
    let (word, tags) = line
        .split_once('\t')
        .ok_or_else(|| malformed("expected `headword<TAB>TAG[,TAG]*`".into()))?;
    let word = word.trim();
    if word.is_empty() || word.chars().any(char::is_whitespace) {
        return Err(malformed(format!("bad headword {word:?}")));
    }
    let headword = normalize_word(word);
    if headword.is_empty() {
        return Err(malformed(format!(
            "headword {word:?} normalizes to nothing"
        )));
    }
    let tags = tags
        .trim()
        .split(',')
        .map(|t| PosTag::new(t.trim()).map_err(|e| malformed(e.to_string())))
        .collect::<Result<TagSet, _>>()?;
    Ok((headword, tags))
}

fn parse_list<I, S>(lines: I) -> Result<TagMap, LexiconError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut map = TagMap::new();
    for (line_no, line) in content_lines(lines) {
        let (headword, tags) = parse_entry(line_no, &line)?;
        map.entry(headword).or_default().extend(tags);
    }
    Ok(map)
}

/// Load the base word list. Words that collide after normalization share one
/// entry holding the union of their tags.
pub fn load_base_list<I, S>(lines: I) -> Result<TagMap, LexiconError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let map = parse_list(lines)?;
    if map.is_empty() {
        return Err(LexiconError::EmptyList);
    }
    Ok(map)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OverlayCounts {
    pub added: usize,
    pub overridden: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct NameCounts {
    pub added: usize,
    pub augmented: usize,
}

fn overlay_counted<I, S>(
    mut base: TagMap,
    lines: I,
) -> Result<(TagMap, OverlayCounts), LexiconError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let overlay = parse_list(lines)?;
    let mut counts = OverlayCounts::default();
    for (headword, tags) in overlay {
        match base.insert(headword, tags) {
            Some(_) => counts.overridden += 1,
            None => counts.added += 1,
        }
    }
    Ok((base, counts))
}

/// Apply the Twitter overlay: an overlay entry replaces the whole tag set of
/// an existing headword, or adds a new one.
pub fn apply_overlay<I, S>(base: TagMap, overlay_lines: I) -> Result<TagMap, LexiconError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    overlay_counted(base, overlay_lines).map(|(map, _)| map)
}

fn names_counted<I, S>(mut current: TagMap, lines: I) -> (TagMap, NameCounts)
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let nnp = PosTag("NNP".to_owned());
    let mut counts = NameCounts::default();
    for (_, line) in content_lines(lines) {
        for part in line.split_whitespace() {
            let name = normalize_word(part);
            if name.is_empty() {
                continue;
            }
            match current.get_mut(&name) {
                Some(tags) => {
                    if tags.insert(nnp.clone()) {
                        counts.augmented += 1;
                    }
                }
                None => {
                    current.insert(name, TagSet::from([nnp.clone()]));
                    counts.added += 1;
                }
            }
        }
    }
    (current, counts)
}

/// Merge a names list (one name per line) into `current`, adding `NNP`.
pub fn merge_names<I, S>(current: TagMap, name_lines: I) -> TagMap
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    names_counted(current, name_lines).0
}

/// How many entries each layer contributed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SourceCounts {
    pub base_entries: usize,
    pub overlay: OverlayCounts,
    pub names: NameCounts,
}

impl fmt::Display for SourceCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "base entries: {}\noverlay adds: {}\noverlay overrides: {}\nname adds: {}\nname augments: {}",
            self.base_entries,
            self.overlay.added,
            self.overlay.overridden,
            self.names.added,
            self.names.augmented
        )
    }
}

/// Builds a [`Lexicon`] one layer at a time.
#[derive(Debug, Default)]
pub struct LexiconBuilder {
    entries: TagMap,
    counts: SourceCounts,
}

impl LexiconBuilder {
    pub fn new<I, S>(base_lines: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let entries = load_base_list(base_lines)?;
        let counts = SourceCounts {
            base_entries: entries.len(),
            ..SourceCounts::default()
        };
        Ok(LexiconBuilder { entries, counts })
    }

    pub fn overlay<I, S>(mut self, lines: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let (entries, c) = overlay_counted(std::mem::take(&mut self.entries), lines)?;
        self.entries = entries;
        self.counts.overlay.added += c.added;
        self.counts.overlay.overridden += c.overridden;
        Ok(self)
    }

    pub fn names<I, S>(mut self, lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let (entries, c) = names_counted(std::mem::take(&mut self.entries), lines);
        self.entries = entries;
        self.counts.names.added += c.added;
        self.counts.names.augmented += c.augmented;
        self
    }

    pub fn build(self) -> Lexicon {
        Lexicon::from_parts(self.entries, self.counts)
    }
}

/// Immutable headword → tag-set mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    entries: TagMap,
    source_counts: SourceCounts,
    unknown: TagSet,
    proper: TagSet,
    numeral: TagSet,
    none: TagSet,
}

impl Lexicon {
    fn from_parts(entries: TagMap, source_counts: SourceCounts) -> Self {
        Lexicon {
            entries,
            source_counts,
            unknown: tag_set(&UNKNOWN_WORD_TAGS),
            proper: tag_set(&["NNP"]),
            numeral: tag_set(&["CD"]),
            none: TagSet::new(),
        }
    }

    /// Build from a base list alone (also the way a dumped lexicon is reloaded).
    pub fn from_base_list<I, S>(lines: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Ok(LexiconBuilder::new(lines)?.build())
    }

    /// Tags of a normalized word; unknown words get [`UNKNOWN_WORD_TAGS`].
    pub fn lookup(&self, norm: &str) -> &TagSet {
        self.entries.get(norm).unwrap_or(&self.unknown)
    }

    /// Known entry, without the unknown-word fallback.
    pub fn get(&self, norm: &str) -> Option<&TagSet> {
        self.entries.get(norm)
    }

    /// Tags a token can take in a parse.
    ///
    /// Usernames are proper nouns and numerals are cardinals whatever the
    /// lists say. Hashtags are looked up by their body. URLs, emoticons and
    /// punctuation carry no tags.
    pub fn tags_for(&self, token: &Token) -> &TagSet {
        match token.kind {
            TokenKind::Word | TokenKind::Hashtag => self.lookup(&token.norm),
            TokenKind::Usertag => &self.proper,
            TokenKind::Numeral => &self.numeral,
            TokenKind::Url | TokenKind::Emoticon | TokenKind::Punct => &self.none,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &TagMap {
        &self.entries
    }

    pub fn source_counts(&self) -> SourceCounts {
        self.source_counts
    }

    /// Every tag that occurs in some entry, plus those assigned by
    /// [`Lexicon::tags_for`] without an entry.
    pub fn observed_tags(&self) -> TagSet {
        let mut tags: TagSet = self.entries.values().flatten().cloned().collect();
        tags.extend(self.unknown.iter().cloned());
        tags.extend(self.proper.iter().cloned());
        tags.extend(self.numeral.iter().cloned());
        tags
    }

    /// Sorted dump in the list format; reloading it with
    /// [`Lexicon::from_base_list`] gives back the same entries.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (word, tags) in &self.entries {
            out.push_str(word);
            out.push('\t');
            let names: Vec<&str> = dump_order(tags);
            out.push_str(&names.join(","));
            out.push('\n');
        }
        out
    }
}

/// Dump order: alphabetical, with `NNP` last (`kindle\tVB,NNP`).
fn dump_order(tags: &TagSet) -> Vec<&str> {
    let mut names: Vec<&str> = tags.iter().map(PosTag::as_str).collect();
    names.sort_by_key(|t| (*t == "NNP", *t));
    names
}
