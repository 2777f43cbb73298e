//! `qtweet`: tokenize, build lexicons, validate grammars, filter, classify
//! and evaluate tweets from the command line.
//!
//! Exit status is 0 on success and 2 on operational failure. Status 1 is
//! reserved.

use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qtweet::{
    corpus, parse_rule_file, read_corpus, seed, tokenize, validate_grammar, EvalReport, Grammar,
    Lexicon, LexiconBuilder, ParseResult, Recognizer,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "qtweet",
    version,
    about = "Syntactic question detection for tweets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the tokens of each input line.
    Tokenize {
        #[command(flatten)]
        io: IoOpts,
    },
    /// Build a lexicon from word lists and print its dump.
    BuildLexicon {
        /// Base word list.
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        overlay: Option<PathBuf>,
        #[arg(long)]
        names: Option<PathBuf>,
        /// Write the dump here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, short)]
        verbose: bool,
    },
    /// Check a grammar and report warnings.
    ValidateGrammar {
        #[command(flatten)]
        res: Resources,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Keep only question candidates: no retweets, must contain '?'.
    Filter {
        #[command(flatten)]
        io: IoOpts,
    },
    /// Classify each input line as question or not.
    Classify {
        #[command(flatten)]
        io: IoOpts,
        #[command(flatten)]
        res: Resources,
        /// Worker threads; output order always follows input order.
        #[arg(long, short, default_value = "1")]
        jobs: NonZeroUsize,
    },
    /// Score the classifier against a labeled corpus (`q`/`nq` TAB text).
    Eval {
        /// Labeled corpus; the bundled mini-corpus when omitted.
        corpus: Option<PathBuf>,
        #[command(flatten)]
        res: Resources,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also print `tp fp fn tn precision recall accuracy`.
        #[arg(long)]
        machine: bool,
        #[arg(long, short, default_value = "1")]
        jobs: NonZeroUsize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Args)]
struct IoOpts {
    /// Input file, one tweet per line; standard input when omitted or `-`.
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, short)]
    verbose: bool,
}

/// Lexicon and grammar sources. The bundled seed data is the default.
#[derive(Args)]
struct Resources {
    /// Prebuilt lexicon dump.
    #[arg(long, conflicts_with_all = ["base", "overlay", "names"])]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    base: Option<PathBuf>,
    #[arg(long, requires = "base")]
    overlay: Option<PathBuf>,
    #[arg(long, requires = "base")]
    names: Option<PathBuf>,
    #[arg(long)]
    grammar: Option<PathBuf>,
}

/// An operational failure, reported on stderr with exit status 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn with_path<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure(format!("{}: {e}", path.display()))
}

enum Owned<T: 'static> {
    Seed(&'static T),
    Loaded(T),
}

impl<T> std::ops::Deref for Owned<T> {
    type Target = T;
    fn deref(&self) -> &T {
        match self {
            Owned::Seed(t) => t,
            Owned::Loaded(t) => t,
        }
    }
}

impl Resources {
    fn lexicon(&self) -> Result<Owned<Lexicon>, Failure> {
        if let Some(p) = &self.lexicon {
            return Ok(Owned::Loaded(
                Lexicon::from_base_list(read_file(p)?.lines()).map_err(with_path(p))?,
            ));
        }
        let Some(base) = &self.base else {
            return Ok(Owned::Seed(seed::lexicon()));
        };
        Ok(Owned::Loaded(build_lexicon(
            base,
            self.overlay.as_deref(),
            self.names.as_deref(),
        )?))
    }

    fn grammar(&self) -> Result<Owned<Grammar>, Failure> {
        match &self.grammar {
            None => Ok(Owned::Seed(seed::grammar())),
            Some(p) => Ok(Owned::Loaded(
                parse_rule_file(read_file(p)?.lines()).map_err(with_path(p))?,
            )),
        }
    }
}

fn build_lexicon(
    base: &Path,
    overlay: Option<&Path>,
    names: Option<&Path>,
) -> Result<Lexicon, Failure> {
    let mut builder = LexiconBuilder::new(read_file(base)?.lines()).map_err(with_path(base))?;
    if let Some(p) = overlay {
        builder = builder
            .overlay(read_file(p)?.lines())
            .map_err(with_path(p))?;
    }
    if let Some(p) = names {
        builder = builder.names(read_file(p)?.lines());
    }
    Ok(builder.build())
}

fn read_lines(input: Option<&Path>) -> Result<Vec<String>, Failure> {
    match input {
        Some(p) if p != Path::new("-") => Ok(read_file(p)?.lines().map(str::to_owned).collect()),
        _ => Ok(io::stdin().lock().lines().collect::<Result<_, _>>()?),
    }
}

fn emit_json<T: Serialize>(out: &mut impl Write, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)
}

/// Outcome of a per-line command: lines that could not be processed are
/// reported and skipped, and only a run where every line failed is an error.
struct LineTally {
    ok: usize,
    failed: usize,
}

impl LineTally {
    fn finish(self) -> CliResult {
        if self.ok == 0 && self.failed > 0 {
            Err(Failure(format!("all {} input lines failed", self.failed)))
        } else {
            Ok(())
        }
    }
}

fn cmd_tokenize(io_opts: &IoOpts) -> CliResult {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut tally = LineTally { ok: 0, failed: 0 };
    for (i, line) in read_lines(io_opts.input.as_deref())?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let t = match tokenize(line) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("line {}: {e}", i + 1);
                tally.failed += 1;
                continue;
            }
        };
        tally.ok += 1;
        match io_opts.format {
            Format::Jsonl => emit_json(&mut out, &t)?,
            Format::Text => {
                for tok in &t.tokens {
                    writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}",
                        tok.kind, tok.surface, tok.norm, tok.span.start, tok.span.end
                    )?;
                }
                writeln!(out, "repeated_punct\t{}", t.repeated_punct)?;
            }
        }
    }
    out.flush()?;
    tally.finish()
}

fn cmd_build_lexicon(
    base: &Path,
    overlay: Option<&Path>,
    names: Option<&Path>,
    output: Option<&Path>,
    verbose: bool,
) -> CliResult {
    let lex = build_lexicon(base, overlay, names)?;
    let dump = lex.dump();
    match output {
        Some(p) => fs::write(p, dump).map_err(with_path(p))?,
        None => io::stdout().lock().write_all(dump.as_bytes())?,
    }
    eprintln!("{}", lex.source_counts());
    if verbose {
        eprintln!("{} entries", lex.len());
    }
    Ok(())
}

fn cmd_validate_grammar(res: &Resources, format: Format) -> CliResult {
    let g = res.grammar()?;
    let lex = res.lexicon()?;
    let report = validate_grammar(&g, Some(&lex));
    let mut out = io::stdout().lock();
    match format {
        Format::Jsonl => emit_json(&mut out, &report)?,
        Format::Text => {
            for w in &report.warnings {
                writeln!(out, "warning: {w}")?;
            }
            writeln!(
                out,
                "{} rules, {} nonterminals, {} warnings",
                g.rules().len(),
                g.nonterminals().count(),
                report.warnings.len()
            )?;
        }
    }
    Ok(())
}

fn cmd_filter(io_opts: &IoOpts) -> CliResult {
    let lines = read_lines(io_opts.input.as_deref())?;
    let (kept, report) = corpus::filter_candidates(lines.iter().filter(|l| !l.trim().is_empty()));
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    for t in &kept {
        match io_opts.format {
            Format::Text => writeln!(out, "{t}")?,
            Format::Jsonl => emit_json(&mut out, &serde_json::json!({ "text": t }))?,
        }
    }
    out.flush()?;
    eprintln!("{report}");
    Ok(())
}

#[derive(Serialize)]
struct ClassifyRecord<'a> {
    text: &'a str,
    #[serde(flatten)]
    result: &'a ParseResult,
    /// Rule text for each trace entry.
    rules: Vec<String>,
}

fn classify_lines(
    rec: &Recognizer<'_>,
    lines: &[String],
    jobs: NonZeroUsize,
) -> Vec<Option<Result<ParseResult, String>>> {
    let one = |line: &String| {
        if line.trim().is_empty() {
            return None;
        }
        Some(
            tokenize(line)
                .map(|t| rec.classify(&t))
                .map_err(|e| e.to_string()),
        )
    };
    if jobs.get() == 1 || lines.len() < 2 {
        return lines.iter().map(one).collect();
    }
    let chunk = lines.len().div_ceil(jobs.get());
    std::thread::scope(|s| {
        let handles: Vec<_> = lines
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(one).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("classification does not panic"))
            .collect()
    })
}

fn cmd_classify(io_opts: &IoOpts, res: &Resources, jobs: NonZeroUsize) -> CliResult {
    let g = res.grammar()?;
    let lex = res.lexicon()?;
    let lines = read_lines(io_opts.input.as_deref())?;
    let rec = Recognizer::new(&g, &lex);
    let results = classify_lines(&rec, &lines, jobs);

    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut tally = LineTally { ok: 0, failed: 0 };
    for (i, (line, result)) in lines.iter().zip(results).enumerate() {
        let r = match result {
            None => continue,
            Some(Err(e)) => {
                eprintln!("line {}: {e}", i + 1);
                tally.failed += 1;
                continue;
            }
            Some(Ok(r)) => r,
        };
        tally.ok += 1;
        if io_opts.verbose {
            for d in &r.diagnostics {
                eprintln!("line {}: {d}", i + 1);
            }
        }
        match io_opts.format {
            Format::Jsonl => {
                let rules = r
                    .matched_rule_trace
                    .iter()
                    .map(|&id| g.rule(id).to_string())
                    .collect();
                emit_json(
                    &mut out,
                    &ClassifyRecord {
                        text: line,
                        result: &r,
                        rules,
                    },
                )?
            }
            Format::Text => {
                match r.question_type {
                    Some(q) => write!(out, "Q\t{q}\t{line}")?,
                    None => write!(out, "NQ\t-\t{line}")?,
                }
                if io_opts.verbose && r.is_question {
                    let trace: Vec<String> = r
                        .matched_rule_trace
                        .iter()
                        .map(|&id| format!("{id}:{}", g.rule(id)))
                        .collect();
                    write!(out, "\t{}", trace.join(" | "))?;
                }
                writeln!(out)?;
            }
        }
    }
    out.flush()?;
    tally.finish()
}

#[derive(Serialize)]
struct EvalRecord {
    #[serde(flatten)]
    counts: EvalReport,
    precision: Option<f64>,
    recall: Option<f64>,
    accuracy: Option<f64>,
}

fn cmd_eval(
    corpus_path: Option<&Path>,
    res: &Resources,
    format: Format,
    machine: bool,
    jobs: NonZeroUsize,
) -> CliResult {
    let g = res.grammar()?;
    let lex = res.lexicon()?;
    let tweets = match corpus_path {
        Some(p) => read_corpus(read_file(p)?.lines()).map_err(with_path(p))?,
        None => seed::corpus(),
    };
    let report = corpus::evaluate_parallel(&g, &lex, &tweets, jobs)?;
    let mut out = io::stdout().lock();
    match format {
        Format::Text => {
            writeln!(out, "{report}")?;
            if machine {
                writeln!(out, "{}", report.machine_line())?;
            }
        }
        Format::Jsonl => emit_json(
            &mut out,
            &EvalRecord {
                counts: report,
                precision: report.precision(),
                recall: report.recall(),
                accuracy: report.accuracy(),
            },
        )?,
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Tokenize { io } => cmd_tokenize(&io),
        Command::BuildLexicon {
            base,
            overlay,
            names,
            output,
            verbose,
        } => cmd_build_lexicon(
            &base,
            overlay.as_deref(),
            names.as_deref(),
            output.as_deref(),
            verbose,
        ),
        Command::ValidateGrammar { res, format } => cmd_validate_grammar(&res, format),
        Command::Filter { io } => cmd_filter(&io),
        Command::Classify { io, res, jobs } => cmd_classify(&io, &res, jobs),
        Command::Eval {
            corpus,
            res,
            format,
            machine,
            jobs,
        } => cmd_eval(corpus.as_deref(), &res, format, machine, jobs),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(msg)) => {
            eprintln!("qtweet: {msg}");
            ExitCode::from(2)
        }
    }
}
