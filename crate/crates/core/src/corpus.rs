//! Labeled corpora, candidate filtering and evaluation.

use std::fmt;
use std::num::NonZeroUsize;

use serde::Serialize;
use thiserror::Error;

use crate::grammar::Grammar;
use crate::lexicon::Lexicon;
use crate::parser::Recognizer;
use crate::tokenizer::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    Question,
    NotQuestion,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Question => "q",
            Label::NotQuestion => "nq",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabeledTweet {
    pub label: Label,
    pub text: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("line {0}: expected `label<TAB>text`")]
    MalformedLine(usize),
    #[error("line {0}: label must be `q` or `nq`")]
    UnknownLabel(usize),
}

/// Parse `label<TAB>text` lines. Blank lines are skipped; line numbers are
/// 1-based physical lines.
pub fn read_corpus<I, S>(lines: I) -> Result<Vec<LabeledTweet>, CorpusError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = Vec::new();
    for (i, line) in lines.into_iter().enumerate() {
        let line = line.as_ref().trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let (label, text) = line
            .split_once('\t')
            .ok_or(CorpusError::MalformedLine(i + 1))?;
        let label = match label.trim() {
            "q" => Label::Question,
            "nq" => Label::NotQuestion,
            _ => return Err(CorpusError::UnknownLabel(i + 1)),
        };
        if text.trim().is_empty() {
            return Err(CorpusError::MalformedLine(i + 1));
        }
        out.push(LabeledTweet {
            label,
            text: text.to_owned(),
        });
    }
    Ok(out)
}

/// A retweet starts with the token `RT` (any case), optionally followed by a
/// colon.
pub fn is_retweet(text: &str) -> bool {
    text.split_whitespace()
        .next()
        .is_some_and(|w| w.trim_end_matches(':').eq_ignore_ascii_case("rt"))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FilterReport {
    pub input: usize,
    pub kept: usize,
    pub removed_retweets: usize,
    pub removed_no_question_mark: usize,
    /// Always zero: language identification is not performed.
    pub removed_non_english: usize,
}

impl fmt::Display for FilterReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "input {}, kept {}, removed: retweets {}, no question mark {}, non-English {} \
             (language filtering not performed)",
            self.input,
            self.kept,
            self.removed_retweets,
            self.removed_no_question_mark,
            self.removed_non_english
        )
    }
}

/// Drop retweets and tweets without a `?`, keeping order.
pub fn filter_candidates<I, S>(tweets: I) -> (Vec<String>, FilterReport)
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut report = FilterReport::default();
    let mut kept = Vec::new();
    for t in tweets {
        let t = t.as_ref();
        report.input += 1;
        if is_retweet(t) {
            report.removed_retweets += 1;
        } else if !t.contains('?') {
            report.removed_no_question_mark += 1;
        } else {
            kept.push(t.to_owned());
        }
    }
    report.kept = kept.len();
    (kept, report)
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum EvalError {
    #[error("corpus is empty")]
    EmptyCorpus,
}

/// Confusion matrix with QUESTION as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EvalReport {
    pub tp: usize,
    pub fp: usize,
    pub r#fn: usize,
    pub tn: usize,
}

/// Cut `x` to 5 decimals, the way the published scores are written.
pub fn truncate5(x: f64) -> f64 {
    // the epsilon keeps exact quotients such as 0.5 from losing a digit
    ((x * 1e5) + 1e-9).floor() / 1e5
}

fn leading_dot5(x: Option<f64>) -> String {
    match x {
        None => "undefined".into(),
        Some(x) if x >= 1.0 => "1.00000".into(),
        Some(x) => {
            let s = format!("{:.5}", truncate5(x));
            s.trim_start_matches('0').to_owned()
        }
    }
}

impl EvalReport {
    pub fn from_counts(tp: usize, fp: usize, r#fn: usize, tn: usize) -> Self {
        EvalReport { tp, fp, r#fn, tn }
    }

    fn add(&mut self, predicted: bool, label: Label) {
        match (predicted, label) {
            (true, Label::Question) => self.tp += 1,
            (true, Label::NotQuestion) => self.fp += 1,
            (false, Label::Question) => self.r#fn += 1,
            (false, Label::NotQuestion) => self.tn += 1,
        }
    }

    fn merge(self, o: EvalReport) -> EvalReport {
        EvalReport {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            r#fn: self.r#fn + o.r#fn,
            tn: self.tn + o.tn,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.r#fn + self.tn
    }

    /// `None` when nothing was predicted a question.
    pub fn precision(&self) -> Option<f64> {
        let d = self.tp + self.fp;
        (d > 0).then(|| self.tp as f64 / d as f64)
    }

    /// `None` when no tweet is labeled a question.
    pub fn recall(&self) -> Option<f64> {
        let d = self.tp + self.r#fn;
        (d > 0).then(|| self.tp as f64 / d as f64)
    }

    /// `None` only for an empty report.
    pub fn accuracy(&self) -> Option<f64> {
        let d = self.total();
        (d > 0).then(|| (self.tp + self.tn) as f64 / d as f64)
    }

    /// `tp fp fn tn precision recall accuracy`, ratios to 6 decimals, `-`
    /// for undefined.
    pub fn machine_line(&self) -> String {
        let r = |x: Option<f64>| x.map_or("-".to_owned(), |x| format!("{x:.6}"));
        format!(
            "{} {} {} {} {} {} {}",
            self.tp,
            self.fp,
            self.r#fn,
            self.tn,
            r(self.precision()),
            r(self.recall()),
            r(self.accuracy())
        )
    }
}

impl fmt::Display for EvalReport {
    /// The 2x2 table followed by the scores, truncated to 5 decimals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = [self.tp, self.fp, self.r#fn, self.tn]
            .iter()
            .map(|n| n.to_string().len())
            .max()
            .unwrap_or(1)
            .max("MT -Question".len());
        writeln!(f, "{:18}{:>w$}  {:>w$}", "", "MT Question", "MT -Question")?;
        writeln!(
            f,
            "{:18}{:>w$}  {:>w$}",
            "Parser Question", self.tp, self.fp
        )?;
        writeln!(
            f,
            "{:18}{:>w$}  {:>w$}",
            "Parser -Question", self.r#fn, self.tn
        )?;
        write!(
            f,
            "Precision: {} Recall: {} Accuracy: {}",
            leading_dot5(self.precision()),
            leading_dot5(self.recall()),
            leading_dot5(self.accuracy())
        )
    }
}

fn classify_one(rec: &Recognizer<'_>, text: &str) -> bool {
    // text the tokenizer rejects (too long) is never a question
    tokenize(text).is_ok_and(|t| rec.classify(&t).is_question)
}

/// Tokenize and classify every tweet, tallying against the labels.
pub fn evaluate(
    grammar: &Grammar,
    lexicon: &Lexicon,
    corpus: &[LabeledTweet],
) -> Result<EvalReport, EvalError> {
    if corpus.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let rec = Recognizer::new(grammar, lexicon);
    let mut report = EvalReport::default();
    for t in corpus {
        report.add(classify_one(&rec, &t.text), t.label);
    }
    Ok(report)
}

/// [`evaluate`] split over `threads` scoped threads. Counts are identical.
pub fn evaluate_parallel(
    grammar: &Grammar,
    lexicon: &Lexicon,
    corpus: &[LabeledTweet],
    threads: NonZeroUsize,
) -> Result<EvalReport, EvalError> {
    if corpus.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let chunk = corpus.len().div_ceil(threads.get());
    let rec = Recognizer::new(grammar, lexicon);
    let rec = &rec;
    let report = std::thread::scope(|s| {
        let handles: Vec<_> = corpus
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    let mut r = EvalReport::default();
                    for t in part {
                        r.add(classify_one(rec, &t.text), t.label);
                    }
                    r
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("classification does not panic"))
            .fold(EvalReport::default(), EvalReport::merge)
    });
    Ok(report)
}
