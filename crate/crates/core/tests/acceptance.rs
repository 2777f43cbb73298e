//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{
    oracle_accepts, random_instance, random_prefix, random_sentence, synthetic_tweet, verdict,
};
use qtweet::lexicon::{apply_overlay, load_base_list, merge_names};
use qtweet::{
    classify_tweet, normalize_word, recognize, seed, tokenize, EvalReport, QuestionType,
    Recognizer, Symbol, TokenKind,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Allowed distance from each published score.
const METRIC_TOLERANCE: f64 = 0.000005;
const GOLDEN_BUDGET: Duration = Duration::from_secs(1);
const THROUGHPUT_BUDGET: Duration = Duration::from_secs(5);
const THROUGHPUT_TWEETS: usize = 10_000;
const NORMALIZE_CASES: usize = 10_000;
const LEXICON_CASES: usize = 1_000;
const ORACLE_CASES: usize = 500;
const SKIP_CASES: usize = 1_000;
const SEED: u64 = 0x5EED;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn metric_reproduction() -> Outcome {
    let r = EvalReport::from_counts(898, 486, 254, 666);
    let reported = r.to_string();
    let last = reported.lines().last().unwrap_or_default().to_owned();
    let mut details = Vec::new();
    for (name, exact, published) in [
        ("precision", r.precision(), 0.64884),
        ("recall", r.recall(), 0.77951),
        ("accuracy", r.accuracy(), 0.67881),
    ] {
        let exact = exact.ok_or(format!("{name} undefined"))?;
        // published scores are truncated, not rounded, to 5 decimals
        let shown = qtweet::corpus::truncate5(exact);
        check((shown - published).abs() <= METRIC_TOLERANCE, || {
            format!("{name}: reported {shown:.5} (exact {exact:.7}) vs {published}")
        })?;
        details.push(format!("{name} {shown:.5} (exact {exact:.7})"));
    }
    check(
        last == "Precision: .64884 Recall: .77951 Accuracy: .67881",
        || format!("report line {last:?}"),
    )?;
    Ok(details.join(", "))
}

fn reference_examples() -> Outcome {
    let start = Instant::now();
    let (g, lex) = (seed::grammar(), seed::lexicon());
    let classify = |s: &str| classify_tweet(g, lex, &tokenize(s).unwrap());
    let has_rule = |r: &qtweet::ParseResult, lhs: &str, rhs: &[&str]| {
        r.matched_rule_trace.iter().any(|&id| {
            let rule = g.rule(id);
            rule.lhs == lhs && rule.rhs.iter().map(Symbol::to_string).collect::<Vec<_>>() == rhs
        })
    };

    let ex1 = classify(
        "In UK when you need to see a specialist do you need special forms or permission?",
    );
    check(ex1.is_question, || "Example 1 not a question".into())?;
    let ex3 = classify("How has everyone's day gone so far? Today is going too fast for me!");
    check(ex3.is_question, || "Example 3 not a question".into())?;
    let any1 = classify("any1 wanna talk");
    check(
        any1.question_type == Some(QuestionType::AuxInitial)
            && has_rule(&any1, "AUXQ", &["PPQ", "MD", "VB"]),
        || format!("any1 wanna talk: {any1:?}"),
    )?;
    let ru = classify("ru listening");
    check(
        ru.question_type == Some(QuestionType::BeInitial)
            && has_rule(&ru, "BEQ", &["BEPRP", "VBG"]),
        || format!("ru listening: {ru:?}"),
    )?;
    let keys = classify("i lost my keys.");
    check(!keys.is_question, || format!("i lost my keys.: {keys:?}"))?;
    let took = start.elapsed();
    check(took < GOLDEN_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("5/5 in {took:?}"))
}

fn tokenizer_golden() -> Outcome {
    for (w, want) in [
        ("pleaaaaaase", "please"),
        ("we're", "were"),
        ("peeps", "peps"),
        ("I'm", "im"),
    ] {
        let got = normalize_word(w);
        check(got == want, || format!("{w} -> {got}"))?;
        let t = tokenize(w).unwrap();
        check(t.tokens.len() == 1 && t.tokens[0].norm == want, || {
            format!("tokenize {w}: {:?}", t.tokens)
        })?;
    }
    let t = tokenize("note,credit").unwrap();
    let shape: Vec<_> = t.tokens.iter().map(|t| (t.kind, t.norm.as_str())).collect();
    check(
        shape
            == [
                (TokenKind::Word, "note"),
                (TokenKind::Punct, ","),
                (TokenKind::Word, "credit"),
            ],
        || format!("note,credit: {shape:?}"),
    )?;
    let t = tokenize("we're #1").unwrap();
    check(
        t.tokens.len() == 2
            && t.tokens[1].kind == TokenKind::Numeral
            && t.tokens[1].surface == "#1",
        || format!("we're #1: {:?}", t.tokens),
    )?;
    let t = tokenize("really???").unwrap();
    check(
        t.repeated_punct && t.tokens.len() == 2 && t.tokens[1].norm == "?",
        || format!("???: {t:?}"),
    )?;
    Ok("7/7 exact".into())
}

const FUZZ_ALPHABET: &[char] = &[
    'a', 'b', 'e', 'l', 'o', 's', 'z', 'A', 'E', 'L', 'S', '0', '1', '9', '\'', '\u{2019}', 'é',
    'É', 'ß', 'ø', 'Ø', '\u{130}', 'ǅ',
];

fn normalization_fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..NORMALIZE_CASES {
        let len = rng.gen_range(0..24);
        let mut w = String::new();
        for _ in 0..len {
            // bias towards repeats
            let c = *FUZZ_ALPHABET.choose(&mut rng).unwrap();
            for _ in 0..rng.gen_range(1..4) {
                w.push(c);
            }
        }
        let n = normalize_word(&w);
        check(normalize_word(&n) == n, || {
            format!("not idempotent on {w:?} -> {n:?}")
        })?;
        let chars: Vec<char> = n.chars().collect();
        check(chars.windows(2).all(|p| p[0] != p[1]), || {
            format!("adjacent duplicate in {n:?}")
        })?;
    }
    Ok(format!("{NORMALIZE_CASES} inputs"))
}

fn random_list(rng: &mut impl Rng, words: &[&str], tags: &[&str], len: usize) -> Vec<String> {
    (0..len)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let ts: Vec<&str> = tags.choose_multiple(rng, k).copied().collect();
            format!("{}\t{}", words.choose(rng).unwrap(), ts.join(","))
        })
        .collect()
}

fn lexicon_laws() -> Outcome {
    const WORDS: &[&str] = &[
        "ten", "teen", "be", "bee", "mark", "Mark", "kindle", "peeps", "se", "see", "cat",
    ];
    const TAGS: &[&str] = &["NN", "NNS", "VB", "JJ", "CD", "NNP", "PPQ"];
    const NAMES: &[&str] = &["Mark", "Chang", "Gretchen", "Kindle", "Bee", "Ten"];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    for _ in 0..LEXICON_CASES {
        let (base_len, overlay_len) = (rng.gen_range(1..12), rng.gen_range(0..6));
        let base = random_list(&mut rng, WORDS, TAGS, base_len);
        let overlay = random_list(&mut rng, WORDS, TAGS, overlay_len);
        let names: Vec<&str> = (0..rng.gen_range(0..4))
            .map(|_| *NAMES.choose(&mut rng).unwrap())
            .collect();

        let b = load_base_list(&base).map_err(|e| e.to_string())?;
        let mut shuffled = base.clone();
        shuffled.shuffle(&mut rng);
        check(load_base_list(&shuffled).unwrap() == b, || {
            format!("base order matters: {base:?}")
        })?;

        let once = apply_overlay(b.clone(), &overlay).unwrap();
        let twice = apply_overlay(once.clone(), &overlay).unwrap();
        check(once == twice, || {
            format!("overlay not idempotent: {overlay:?}")
        })?;

        let n1 = merge_names(once.clone(), &names);
        check(merge_names(n1.clone(), &names) == n1, || {
            format!("names not idempotent: {names:?}")
        })?;

        let (left, right) = names.split_at(names.len() / 2);
        let disjoint: Vec<&str> = right
            .iter()
            .copied()
            .filter(|n| !left.contains(n))
            .collect();
        check(
            merge_names(merge_names(once.clone(), left), &disjoint)
                == merge_names(merge_names(once.clone(), &disjoint), left),
            || format!("names merges do not commute: {left:?} {disjoint:?}"),
        )?;
    }
    Ok(format!("{LEXICON_CASES} list triples"))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut accepted = 0;
    for _ in 0..ORACLE_CASES {
        let inst = random_instance(&mut rng, 15);
        let toks = random_sentence(&mut rng, &inst.grammar, &inst.lexicon, 6);
        let got = recognize(&inst.grammar, &inst.lexicon, &toks, "N0")
            .map_err(|e| e.to_string())?
            .is_some();
        let want = oracle_accepts(&inst.grammar, &inst.lexicon, &toks, "N0");
        check(got == want, || {
            let words: Vec<&str> = toks.iter().map(|t| t.surface.as_str()).collect();
            format!(
                "recognizer {got}, oracle {want} on {words:?} with\n{}",
                inst.grammar_text
            )
        })?;
        accepted += got as usize;
    }
    Ok(format!("{ORACLE_CASES} instances, {accepted} accepted"))
}

fn skipping_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let (g, lex) = (seed::grammar(), seed::lexicon());
    let corpus: Vec<String> = seed::corpus().into_iter().map(|t| t.text).collect();
    let mut questions = 0;
    for i in 0..SKIP_CASES {
        let text = if i % 2 == 0 {
            corpus.choose(&mut rng).unwrap().clone()
        } else {
            synthetic_tweet(&mut rng)
        };
        let prefixed = format!("{} {text}", random_prefix(&mut rng));
        let (before, _) = verdict(g, lex, &text);
        let (after, _) = verdict(g, lex, &prefixed);
        check(before == after, || {
            format!("{text:?} -> {before}, {prefixed:?} -> {after}")
        })?;
        questions += before as usize;
    }
    Ok(format!("{SKIP_CASES} trials, {questions} questions"))
}

fn throughput() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let tweets: Vec<String> = (0..THROUGHPUT_TWEETS)
        .map(|_| synthetic_tweet(&mut rng))
        .collect();
    check(tweets.iter().all(|t| t.chars().count() <= 140), || {
        "tweet over 140 chars".into()
    })?;
    let rec = Recognizer::new(seed::grammar(), seed::lexicon());
    let start = Instant::now();
    let mut questions = 0;
    for t in &tweets {
        questions += rec.classify(&tokenize(t).unwrap()).is_question as usize;
    }
    let took = start.elapsed();
    check(took < THROUGHPUT_BUDGET, || {
        format!("{THROUGHPUT_TWEETS} tweets took {took:?}")
    })?;
    Ok(format!(
        "{THROUGHPUT_TWEETS} tweets in {took:?} ({questions} questions)"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("metric reproduction (898/486/254/666)", metric_reproduction),
        ("reference-example golden suite", reference_examples),
        ("tokenizer golden suite", tokenizer_golden),
        (
            "normalization idempotence over fuzzed inputs",
            normalization_fuzz,
        ),
        ("lexicon layer laws over random lists", lexicon_laws),
        (
            "recognizer agrees with exhaustive oracle",
            oracle_equivalence,
        ),
        (
            "extraneous prefixes never flip a verdict",
            skipping_soundness,
        ),
        ("throughput, single-threaded", throughput),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
