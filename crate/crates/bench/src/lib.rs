//! Deterministic tweet workloads for the benchmarks.

use qtweet::{Label, LabeledTweet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const OPENERS: &[&str] = &[
    "",
    "",
    "@bob ",
    "#fb ",
    "lol ",
    "hey, ",
    "http://t.co/x ",
    ":) ",
];
const QUESTIONS: &[&str] = &[
    "can you help me with my homework",
    "does anyone know a good dentist in Boston",
    "any1 wanna talk",
    "ru listening",
    "where are you going tonight",
    "what time is the party",
    "how has everyone's day gone so far",
    "its cold outside, isnt it",
    "should i buy the new iPhone or wait",
];
const STATEMENTS: &[&str] = &[
    "i lost my keys",
    "today is going too fast for me",
    "just finished my homework",
    "going to the beach with my peeps",
    "i love this song",
    "the cat sat on the big red couch",
];
const FILLERS: &[&str] = &[
    "really", "so", "new", "phone", "and", "ppl", "2morrow", "lol", "smh",
];
const ENDS: &[&str] = &["", "?", "??", "!!", ".", "...", " :(", " #tbt"];

/// `n` synthetic tweets of at most 140 characters, reproducible from `seed`.
pub fn tweets(n: usize, seed: u64) -> Vec<String> {
    labeled(n, seed).into_iter().map(|t| t.text).collect()
}

/// `n` synthetic tweets labeled by the template they were drawn from.
pub fn labeled(n: usize, seed: u64) -> Vec<LabeledTweet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let question = rng.gen_bool(0.5);
        let body = if question { QUESTIONS } else { STATEMENTS };
        let mut text = String::from(*OPENERS.choose(&mut rng).unwrap());
        text.push_str(body.choose(&mut rng).unwrap());
        for _ in 0..rng.gen_range(0..4) {
            text.push(' ');
            text.push_str(FILLERS.choose(&mut rng).unwrap());
        }
        text.push_str(ENDS.choose(&mut rng).unwrap());
        if text.chars().count() <= 140 {
            let label = if question {
                Label::Question
            } else {
                Label::NotQuestion
            };
            out.push(LabeledTweet { label, text });
        }
    }
    out
}
