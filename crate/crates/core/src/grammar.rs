//! Context-free question grammar.
//!
//! Rules rewrite a nonterminal into a sequence of nonterminals, POS tags and
//! literal words. Rule order is significant: the recognizer tries the rules
//! of a nonterminal in file order. Four start nonterminals, one per
//! [`QuestionType`], are bound with `%start` directives.
//!
//! ```text
//! %start BE_INITIAL BEQ
//! BEQ -> BEPRP VBG
//! BEQ -> BE SUBJ PRED
//! BE -> is
//! ```
//!
//! A symbol starting with an uppercase ASCII letter is a tag when it is in the
//! tag inventory and a nonterminal otherwise; anything else (`do`, `,`) is a
//! literal, normalized like a tokenized word. `%tags A B` extends the
//! inventory. Lines starting with `#` are comments.
//!
//! Left recursion is rejected at load time. Because no rule has an empty
//! right-hand side, every symbol on the recognizer's stack consumes at least
//! one token, and this is what makes top-down search terminate.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::lexicon::{Lexicon, PosTag, TagSet};
use crate::tokenizer::normalize_word;

/// Penn-style tags plus the custom Twitter tags. `PRPS` stands in for
/// `PRP$`; `WPS` marks fused wh-contractions ("whats", "wtf").
pub const DEFAULT_TAGS: &[&str] = &[
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP", "NNPS",
    "PDT", "POS", "PRP", "PRPS", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG",
    "VBN", "VBP", "VBZ", "WDT", "WP", "WPS", "WRB", "PPQ", "PPBE", "BEPRP",
];

pub fn default_tag_inventory() -> TagSet {
    DEFAULT_TAGS
        .iter()
        .map(|t| PosTag::new(t).expect("default tags are valid"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum QuestionType {
    Wh,
    AuxInitial,
    BeInitial,
    Tag,
}

impl QuestionType {
    /// Trial order used by the classifier.
    pub const ALL: [QuestionType; 4] = [
        QuestionType::Wh,
        QuestionType::AuxInitial,
        QuestionType::BeInitial,
        QuestionType::Tag,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QuestionType::Wh => "WH",
            QuestionType::AuxInitial => "AUX_INITIAL",
            QuestionType::BeInitial => "BE_INITIAL",
            QuestionType::Tag => "TAG",
        }
    }
}

impl fmt::Display for QuestionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QuestionType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QuestionType::ALL
            .into_iter()
            .find(|q| q.as_str() == s)
            .ok_or_else(|| format!("unknown question type {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    NonTerminal(String),
    Tag(PosTag),
    Literal(String),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::NonTerminal(n) | Symbol::Literal(n) => f.write_str(n),
            Symbol::Tag(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: String,
    pub rhs: Vec<Symbol>,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.lhs)?;
        for s in &self.rhs {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

/// Index of a rule in [`Grammar::rules`].
pub type RuleId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}: {reason}")]
    MalformedRule { line: usize, reason: String },
    #[error("line {line}: unknown symbol {name}")]
    UnknownSymbol { name: String, line: usize },
    #[error("left recursion through {}", .0.join(" -> "))]
    LeftRecursion(Vec<String>),
    #[error("no start symbol bound for question type {0}")]
    MissingStart(QuestionType),
}

fn is_nonterminal_name(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_uppercase())
        && cs.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Validated grammar. Immutable once built.
#[derive(Debug, Clone)]
pub struct Grammar {
    rules: Vec<Rule>,
    starts: BTreeMap<QuestionType, String>,
    tag_inventory: TagSet,
    compiled: Compiled,
}

impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules
            && self.starts == other.starts
            && self.tag_inventory == other.tag_inventory
    }
}

impl Eq for Grammar {}

impl Grammar {
    /// Build from rules already split into symbols.
    pub fn new(
        rules: Vec<Rule>,
        starts: BTreeMap<QuestionType, String>,
        tag_inventory: TagSet,
    ) -> Result<Self, GrammarError> {
        let lines = (1..=rules.len()).collect();
        Self::build(rules, lines, starts, BTreeMap::new(), tag_inventory)
    }

    fn build(
        mut rules: Vec<Rule>,
        lines: Vec<usize>,
        starts: BTreeMap<QuestionType, String>,
        start_lines: BTreeMap<QuestionType, usize>,
        tag_inventory: TagSet,
    ) -> Result<Self, GrammarError> {
        let defined: BTreeSet<&str> = rules.iter().map(|r| r.lhs.as_str()).collect();
        for (rule, &line) in rules.iter().zip(&lines) {
            if !is_nonterminal_name(&rule.lhs) {
                return Err(GrammarError::MalformedRule {
                    line,
                    reason: format!("left-hand side {:?} is not a nonterminal name", rule.lhs),
                });
            }
            if PosTag::new(&rule.lhs).is_ok_and(|t| tag_inventory.contains(&t)) {
                return Err(GrammarError::MalformedRule {
                    line,
                    reason: format!("nonterminal {} collides with a POS tag", rule.lhs),
                });
            }
            if rule.rhs.is_empty() {
                return Err(GrammarError::MalformedRule {
                    line,
                    reason: "empty right-hand side".into(),
                });
            }
            for sym in &rule.rhs {
                match sym {
                    Symbol::NonTerminal(n) if !defined.contains(n.as_str()) => {
                        return Err(GrammarError::UnknownSymbol {
                            name: n.clone(),
                            line,
                        })
                    }
                    Symbol::Tag(t) if !tag_inventory.contains(t) => {
                        return Err(GrammarError::UnknownSymbol {
                            name: t.to_string(),
                            line,
                        })
                    }
                    Symbol::Literal(w) if w.is_empty() => {
                        return Err(GrammarError::MalformedRule {
                            line,
                            reason: "empty literal".into(),
                        })
                    }
                    _ => {}
                }
            }
        }
        for q in QuestionType::ALL {
            match starts.get(&q) {
                None => return Err(GrammarError::MissingStart(q)),
                Some(nt) if !defined.contains(nt.as_str()) => {
                    return Err(GrammarError::UnknownSymbol {
                        name: nt.clone(),
                        line: start_lines.get(&q).copied().unwrap_or(0),
                    })
                }
                Some(_) => {}
            }
        }
        for rule in &mut rules {
            for sym in &mut rule.rhs {
                if let Symbol::Literal(w) = sym {
                    *w = normalize_word(w);
                }
            }
        }
        if let Some(cycle) = find_left_recursion(&rules) {
            return Err(GrammarError::LeftRecursion(cycle));
        }
        let compiled = Compiled::new(&rules, &tag_inventory);
        Ok(Grammar {
            rules,
            starts,
            tag_inventory,
            compiled,
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: RuleId) -> &Rule {
        &self.rules[id]
    }

    pub fn start(&self, q: QuestionType) -> &str {
        &self.starts[&q]
    }

    pub fn starts(&self) -> &BTreeMap<QuestionType, String> {
        &self.starts
    }

    pub fn tag_inventory(&self) -> &TagSet {
        &self.tag_inventory
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = &str> {
        self.compiled.nt_names.iter().map(String::as_str)
    }

    pub(crate) fn compiled(&self) -> &Compiled {
        &self.compiled
    }

    /// Text form accepted by [`parse_rule_file`].
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let defaults = default_tag_inventory();
        let extra: Vec<String> = self
            .tag_inventory
            .difference(&defaults)
            .map(ToString::to_string)
            .collect();
        if !extra.is_empty() {
            out.push_str(&format!("%tags {}\n", extra.join(" ")));
        }
        for (q, nt) in &self.starts {
            out.push_str(&format!("%start {q} {nt}\n"));
        }
        for rule in &self.rules {
            out.push_str(&rule.to_string());
            out.push('\n');
        }
        out
    }
}

/// A nonterminal cycle through leftmost symbols, if any, as a closed path.
fn find_left_recursion(rules: &[Rule]) -> Option<Vec<String>> {
    let mut edges: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for r in rules {
        let to = edges.entry(&r.lhs).or_default();
        if let Some(Symbol::NonTerminal(first)) = r.rhs.first() {
            to.insert(first);
        }
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Unseen,
        Open,
        Done,
    }
    fn visit<'a>(
        node: &'a str,
        edges: &BTreeMap<&'a str, BTreeSet<&'a str>>,
        marks: &mut HashMap<&'a str, Mark>,
        path: &mut Vec<&'a str>,
    ) -> Option<Vec<String>> {
        marks.insert(node, Mark::Open);
        path.push(node);
        for &next in edges.get(node).into_iter().flatten() {
            match marks.get(next).copied().unwrap_or(Mark::Unseen) {
                Mark::Open => {
                    let from = path.iter().position(|&n| n == next).unwrap();
                    let mut cycle: Vec<String> =
                        path[from..].iter().map(|s| s.to_string()).collect();
                    cycle.push(next.to_string());
                    return Some(cycle);
                }
                Mark::Unseen => {
                    if let Some(c) = visit(next, edges, marks, path) {
                        return Some(c);
                    }
                }
                Mark::Done => {}
            }
        }
        path.pop();
        marks.insert(node, Mark::Done);
        None
    }

    let mut marks = HashMap::new();
    // roots in definition order, so the reported cycle starts where the file does
    for node in rules.iter().map(|r| r.lhs.as_str()) {
        if marks.get(node).copied().unwrap_or(Mark::Unseen) == Mark::Unseen {
            if let Some(c) = visit(node, &edges, &mut marks, &mut Vec::new()) {
                return Some(c);
            }
        }
    }
    None
}

fn parse_symbol(tok: &str, inventory: &TagSet, line: usize) -> Result<Symbol, GrammarError> {
    if tok.starts_with(|c: char| c.is_ascii_uppercase()) {
        if let Ok(tag) = PosTag::new(tok) {
            if inventory.contains(&tag) {
                return Ok(Symbol::Tag(tag));
            }
        }
        if is_nonterminal_name(tok) {
            Ok(Symbol::NonTerminal(tok.to_owned()))
        } else {
            Err(GrammarError::MalformedRule {
                line,
                reason: format!("bad symbol {tok:?}"),
            })
        }
    } else {
        Ok(Symbol::Literal(tok.to_owned()))
    }
}

/// Parse a grammar file.
pub fn parse_rule_file<I, S>(lines: I) -> Result<Grammar, GrammarError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut inventory = default_tag_inventory();
    let mut raw_rules: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut starts = BTreeMap::new();
    let mut start_lines = BTreeMap::new();

    for (i, line) in lines.into_iter().enumerate() {
        let line_no = i + 1;
        let line = line.as_ref().trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |reason: String| GrammarError::MalformedRule {
            line: line_no,
            reason,
        };
        if let Some(directive) = line.strip_prefix('%') {
            let mut words = directive.split_whitespace();
            match words.next() {
                Some("start") => {
                    let (Some(q), Some(nt), None) = (words.next(), words.next(), words.next())
                    else {
                        return Err(malformed("expected `%start TYPE NONTERMINAL`".into()));
                    };
                    let q: QuestionType = q.parse().map_err(malformed)?;
                    if starts.insert(q, nt.to_owned()).is_some() {
                        return Err(malformed(format!("question type {q} bound twice")));
                    }
                    start_lines.insert(q, line_no);
                }
                Some("tags") => {
                    for t in words {
                        inventory.insert(PosTag::new(t).map_err(|e| malformed(e.to_string()))?);
                    }
                }
                other => {
                    return Err(malformed(format!(
                        "unknown directive %{}",
                        other.unwrap_or_default()
                    )))
                }
            }
            continue;
        }
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| malformed("expected `LHS -> SYMBOL ...`".into()))?;
        let lhs = lhs.trim();
        let rhs: Vec<String> = rhs.split_whitespace().map(str::to_owned).collect();
        if lhs.is_empty() || lhs.contains(char::is_whitespace) {
            return Err(malformed(format!("bad left-hand side {lhs:?}")));
        }
        if rhs.is_empty() {
            return Err(malformed("empty right-hand side".into()));
        }
        raw_rules.push((line_no, lhs.to_owned(), rhs));
    }

    // symbols are classified only once every %tags line has been seen
    let mut rules = Vec::with_capacity(raw_rules.len());
    let mut lines = Vec::with_capacity(raw_rules.len());
    for (line_no, lhs, rhs) in raw_rules {
        let rhs = rhs
            .iter()
            .map(|s| parse_symbol(s, &inventory, line_no))
            .collect::<Result<Vec<_>, _>>()?;
        rules.push(Rule { lhs, rhs });
        lines.push(line_no);
    }
    Grammar::build(rules, lines, starts, start_lines, inventory)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "symbol", rename_all = "snake_case")]
pub enum Warning {
    /// Defined but not reachable from any start symbol.
    Unreachable(String),
    /// Derives no string of terminals.
    Nonproductive(String),
    /// Used in a rule but carried by no lexicon entry.
    TagNotInLexicon(String),
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Unreachable(n) => write!(f, "unreachable nonterminal {n}"),
            Warning::Nonproductive(n) => write!(f, "nonproductive nonterminal {n}"),
            Warning::TagNotInLexicon(t) => write!(f, "tag {t} does not occur in the lexicon"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Report unreachable and nonproductive nonterminals, and (given a lexicon)
/// tags that no lexicon entry can supply.
pub fn validate_grammar(g: &Grammar, lexicon: Option<&Lexicon>) -> ValidationReport {
    let c = &g.compiled;
    let mut warnings = Vec::new();

    let mut reachable = vec![false; c.nt_names.len()];
    let mut todo: Vec<u32> = g.starts.values().map(|s| c.nt_index[s.as_str()]).collect();
    while let Some(nt) = todo.pop() {
        if std::mem::replace(&mut reachable[nt as usize], true) {
            continue;
        }
        for &rid in &c.rules_by_nt[nt as usize] {
            for sym in &c.rhs[rid] {
                if let Sym::Nt(n) = *sym {
                    todo.push(n);
                }
            }
        }
    }
    for (i, name) in c.nt_names.iter().enumerate() {
        if !reachable[i] {
            warnings.push(Warning::Unreachable(name.clone()));
        }
    }
    for (i, name) in c.nt_names.iter().enumerate() {
        if c.min_len[i] == UNPRODUCTIVE {
            warnings.push(Warning::Nonproductive(name.clone()));
        }
    }
    if let Some(lex) = lexicon {
        let observed = lex.observed_tags();
        let used: BTreeSet<&PosTag> = g
            .rules
            .iter()
            .flat_map(|r| &r.rhs)
            .filter_map(|s| match s {
                Symbol::Tag(t) => Some(t),
                _ => None,
            })
            .collect();
        for t in used {
            if !observed.contains(t) {
                warnings.push(Warning::TagNotInLexicon(t.to_string()));
            }
        }
    }
    ValidationReport { warnings }
}

// ---------------------------------------------------------------------------
// Compiled form used by the recognizer.

pub(crate) const UNPRODUCTIVE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Sym {
    Nt(u32),
    Tag(u32),
    Lit(u32),
}

/// Growable bitset.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Bits(Vec<u64>);

impl Bits {
    pub(crate) fn insert(&mut self, i: u32) -> bool {
        let (w, b) = ((i / 64) as usize, i % 64);
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        let was = self.0[w] & (1 << b) != 0;
        self.0[w] |= 1 << b;
        !was
    }

    pub(crate) fn contains(&self, i: u32) -> bool {
        let (w, b) = ((i / 64) as usize, i % 64);
        self.0.get(w).is_some_and(|x| x & (1 << b) != 0)
    }

    pub(crate) fn intersects(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    fn union_with(&mut self, other: &Bits) -> bool {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0);
        }
        let mut changed = false;
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            let n = *a | b;
            changed |= n != *a;
            *a = n;
        }
        changed
    }
}

/// Terminals that can begin a derivation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct First {
    pub(crate) tags: Bits,
    pub(crate) lits: Bits,
}

impl First {
    fn union_with(&mut self, other: &First) -> bool {
        let a = self.tags.union_with(&other.tags);
        let b = self.lits.union_with(&other.lits);
        a || b
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub(crate) nt_names: Vec<String>,
    pub(crate) nt_index: HashMap<String, u32>,
    pub(crate) tag_index: HashMap<String, u32>,
    pub(crate) lit_index: HashMap<String, u32>,
    pub(crate) rules_by_nt: Vec<Vec<RuleId>>,
    pub(crate) rhs: Vec<Vec<Sym>>,
    /// Shortest yield of each nonterminal, `UNPRODUCTIVE` if none.
    pub(crate) min_len: Vec<usize>,
    pub(crate) rule_min_len: Vec<usize>,
    pub(crate) first: Vec<First>,
    pub(crate) rule_first: Vec<First>,
}

impl Compiled {
    fn new(rules: &[Rule], inventory: &TagSet) -> Self {
        let mut nt_names = Vec::new();
        let mut nt_index = HashMap::new();
        for r in rules {
            if !nt_index.contains_key(&r.lhs) {
                nt_index.insert(r.lhs.clone(), nt_names.len() as u32);
                nt_names.push(r.lhs.clone());
            }
        }
        let tag_index: HashMap<String, u32> = inventory
            .iter()
            .enumerate()
            .map(|(i, t)| (t.to_string(), i as u32))
            .collect();
        let mut lit_index = HashMap::new();
        let mut rules_by_nt = vec![Vec::new(); nt_names.len()];
        let mut lhs = Vec::with_capacity(rules.len());
        let mut rhs = Vec::with_capacity(rules.len());
        for (id, r) in rules.iter().enumerate() {
            let l = nt_index[&r.lhs];
            rules_by_nt[l as usize].push(id);
            lhs.push(l);
            rhs.push(
                r.rhs
                    .iter()
                    .map(|s| match s {
                        Symbol::NonTerminal(n) => Sym::Nt(nt_index[n]),
                        Symbol::Tag(t) => Sym::Tag(tag_index[t.as_str()]),
                        Symbol::Literal(w) => {
                            let next = lit_index.len() as u32;
                            Sym::Lit(*lit_index.entry(w.clone()).or_insert(next))
                        }
                    })
                    .collect::<Vec<_>>(),
            );
        }

        let sym_len = |s: &Sym, min_len: &[usize]| match *s {
            Sym::Nt(n) => min_len[n as usize],
            _ => 1,
        };
        let rule_len = |rhs: &[Sym], min_len: &[usize]| {
            rhs.iter()
                .map(|s| sym_len(s, min_len))
                .try_fold(0usize, |acc, l| (l != UNPRODUCTIVE).then(|| acc + l))
                .unwrap_or(UNPRODUCTIVE)
        };
        let mut min_len = vec![UNPRODUCTIVE; nt_names.len()];
        loop {
            let mut changed = false;
            for (id, r) in rhs.iter().enumerate() {
                let l = rule_len(r, &min_len);
                let slot = &mut min_len[lhs[id] as usize];
                if l < *slot {
                    *slot = l;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let rule_min_len = rhs.iter().map(|r| rule_len(r, &min_len)).collect();

        let mut first = vec![First::default(); nt_names.len()];
        loop {
            let mut changed = false;
            for (id, r) in rhs.iter().enumerate() {
                let add = match r[0] {
                    Sym::Nt(n) => first[n as usize].clone(),
                    Sym::Tag(t) => {
                        let mut f = First::default();
                        f.tags.insert(t);
                        f
                    }
                    Sym::Lit(w) => {
                        let mut f = First::default();
                        f.lits.insert(w);
                        f
                    }
                };
                changed |= first[lhs[id] as usize].union_with(&add);
            }
            if !changed {
                break;
            }
        }
        let rule_first = rhs
            .iter()
            .map(|r| match r[0] {
                Sym::Nt(n) => first[n as usize].clone(),
                Sym::Tag(t) => {
                    let mut f = First::default();
                    f.tags.insert(t);
                    f
                }
                Sym::Lit(w) => {
                    let mut f = First::default();
                    f.lits.insert(w);
                    f
                }
            })
            .collect();

        Compiled {
            nt_names,
            nt_index,
            tag_index,
            lit_index,
            rules_by_nt,
            rhs,
            min_len,
            rule_min_len,
            first,
            rule_first,
        }
    }
}
