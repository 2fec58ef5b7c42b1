use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Parser, Subcommand};
use greval_core::scorer::{percent, render_per_sentence};
use greval_core::stats::{corpus_report, render_stats};
use greval_core::{
    inter_annotator_agreement, parse_bracket_file, parse_corpus_bytes, render_table,
    score_bracket_corpus, score_corpus, validate, AgreementReport, BracketError, BracketOptions,
    BracketScore, BracketTree, Corpus, CorpusRole, Diagnostic, MatchPolicy, OutputFormat,
};

/// Evaluate parsers against grammatical-relation annotations.
#[derive(Debug, Parser)]
#[command(name = "greval", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn policy_parser() -> impl TypedValueParser<Value = MatchPolicy> {
    PossibleValuesParser::new(["strict", "paper", "hierarchical"])
        .map(|s| s.parse().expect("listed value"))
}

fn format_parser() -> impl TypedValueParser<Value = OutputFormat> {
    PossibleValuesParser::new(["text", "csv", "json"]).map(|s| s.parse().expect("listed value"))
}

fn role_parser() -> impl TypedValueParser<Value = CorpusRole> {
    PossibleValuesParser::new(["gold", "predicted"]).map(|s| match s.as_str() {
        "predicted" => CorpusRole::Predicted,
        _ => CorpusRole::Gold,
    })
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score predicted GRs against a gold corpus, per relation.
    Evaluate {
        gold: PathBuf,
        pred: PathBuf,
        #[arg(long, default_value = "paper", value_parser = policy_parser())]
        policy: MatchPolicy,
        #[arg(long, default_value = "text", value_parser = format_parser())]
        format: OutputFormat,
        /// Also write per-sentence counts as CSV to this path.
        #[arg(long, value_name = "PATH")]
        per_sentence: Option<PathBuf>,
    },
    /// Relation frequencies of one corpus.
    Stats {
        corpus: PathBuf,
        /// Add per-genre tables and a chi-square homogeneity test.
        #[arg(long)]
        by_genre: bool,
        #[arg(long, default_value = "text", value_parser = format_parser())]
        format: OutputFormat,
    },
    /// Agreement between two annotations of the same sentences.
    Agree {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "text", value_parser = format_parser())]
        format: OutputFormat,
    },
    /// Bracket precision, recall and crossing brackets.
    Parseval {
        gold: PathBuf,
        pred: PathBuf,
        /// Require labels to match as well as spans.
        #[arg(long)]
        labelled: bool,
        /// Ignore brackets spanning a single token.
        #[arg(long)]
        drop_unary: bool,
        /// Ignore the outermost bracket of each tree.
        #[arg(long)]
        drop_root: bool,
        #[arg(long, default_value = "text", value_parser = format_parser())]
        format: OutputFormat,
    },
    /// Check a GR file and report errors and warnings.
    Validate {
        file: PathBuf,
        #[arg(long, default_value = "gold", value_parser = role_parser())]
        role: CorpusRole,
    },
}

fn print_diagnostics(path: &Path, diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        eprintln!("{}:{d}", path.display());
    }
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_corpus_bytes(&bytes).or_else(|diagnostics| {
        print_diagnostics(path, &diagnostics);
        bail!("{}: {} error(s)", path.display(), diagnostics.len())
    })
}

fn load_trees(path: &Path) -> Result<Vec<BracketTree>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_bracket_file(&text).or_else(|errors| {
        for e in &errors {
            print_bracket_error(path, e);
        }
        bail!("{}: {} error(s)", path.display(), errors.len())
    })
}

fn print_bracket_error(path: &Path, e: &BracketError) {
    match e.line() {
        Some(line) => eprintln!("{}:{line}: {e}", path.display()),
        None => eprintln!("{}: {e}", path.display()),
    }
}

fn json(value: serde_json::Value) -> String {
    format!(
        "{}\n",
        serde_json::to_string_pretty(&value).expect("json value")
    )
}

fn render_agreement(r: &AgreementReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => {
            let mut out = String::new();
            writeln!(out, "GRs in first:     {}", r.total_a).unwrap();
            writeln!(out, "GRs in second:    {}", r.total_b).unwrap();
            writeln!(out, "matched:          {}", r.matched).unwrap();
            writeln!(out, "first in second:  {}", percent(r.precision_a_given_b)).unwrap();
            writeln!(out, "second in first:  {}", percent(r.precision_b_given_a)).unwrap();
            writeln!(out, "agreement (F):    {}", percent(r.f_score)).unwrap();
            writeln!(out).unwrap();
            out.push_str(&render_table(&r.table, OutputFormat::Text));
            out
        }
        OutputFormat::Csv => {
            let mut out = String::from(
                "matched,total_a,total_b,precision_a_given_b,precision_b_given_a,f_score\n",
            );
            writeln!(
                out,
                "{},{},{},{:.6},{:.6},{:.6}",
                r.matched,
                r.total_a,
                r.total_b,
                r.precision_a_given_b,
                r.precision_b_given_a,
                r.f_score
            )
            .unwrap();
            out
        }
        OutputFormat::Json => {
            let table: serde_json::Value =
                serde_json::from_str(&render_table(&r.table, OutputFormat::Json))
                    .expect("rendered json");
            json(serde_json::json!({
                "schema": 1,
                "matched": r.matched,
                "total_a": r.total_a,
                "total_b": r.total_b,
                "precision_a_given_b": r.precision_a_given_b,
                "precision_b_given_a": r.precision_b_given_a,
                "f_score": r.f_score,
                "rows": table["rows"],
            }))
        }
    }
}

fn render_parseval(s: &BracketScore, opts: BracketOptions, format: OutputFormat) -> String {
    let f = greval_core::f_score(s.precision, s.recall);
    match format {
        OutputFormat::Text => {
            let mut out = String::new();
            let mode = if opts.labelled {
                "labelled"
            } else {
                "unlabelled"
            };
            writeln!(out, "mode:        {mode}").unwrap();
            writeln!(out, "sentences:   {}", s.sentences).unwrap();
            writeln!(
                out,
                "brackets:    parser {}, treebank {}, matched {}",
                s.parser_brackets, s.corpus_brackets, s.matches
            )
            .unwrap();
            writeln!(out, "precision:   {}", percent(s.precision)).unwrap();
            writeln!(out, "recall:      {}", percent(s.recall)).unwrap();
            writeln!(out, "F:           {}", percent(f)).unwrap();
            writeln!(
                out,
                "crossings:   {} ({:.2} per sentence)",
                s.crossings, s.mean_crossings
            )
            .unwrap();
            out
        }
        OutputFormat::Csv => {
            let mut out = String::from(
                "sentences,parser_brackets,corpus_brackets,matches,precision,recall,f_score,crossings,mean_crossings\n",
            );
            writeln!(
                out,
                "{},{},{},{},{:.6},{:.6},{:.6},{},{:.6}",
                s.sentences,
                s.parser_brackets,
                s.corpus_brackets,
                s.matches,
                s.precision,
                s.recall,
                f,
                s.crossings,
                s.mean_crossings
            )
            .unwrap();
            out
        }
        OutputFormat::Json => json(serde_json::json!({
            "schema": 1,
            "labelled": opts.labelled,
            "drop_unary": opts.drop_unary,
            "drop_root": opts.drop_root,
            "sentences": s.sentences,
            "parser_brackets": s.parser_brackets,
            "corpus_brackets": s.corpus_brackets,
            "matches": s.matches,
            "precision": s.precision,
            "recall": s.recall,
            "f_score": f,
            "crossings": s.crossings,
            "mean_crossings": s.mean_crossings,
        })),
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Evaluate {
            gold,
            pred,
            policy,
            format,
            per_sentence,
        } => {
            let gold_corpus = load_corpus(&gold)?;
            let pred_corpus = load_corpus(&pred)?;
            let report = score_corpus(&pred_corpus, &gold_corpus, policy);
            for d in &report.diagnostics {
                let path = if d.message.contains("missing from predicted") {
                    &gold
                } else {
                    &pred
                };
                eprintln!("{}:{d}", path.display());
            }
            if let Some(path) = per_sentence {
                fs::write(&path, render_per_sentence(&report.sentences))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            print!("{}", render_table(&report.table, format));
        }
        Command::Stats {
            corpus,
            by_genre,
            format,
        } => {
            let c = load_corpus(&corpus)?;
            print!("{}", render_stats(&corpus_report(&c, by_genre), format));
        }
        Command::Agree { a, b, format } => {
            let report = inter_annotator_agreement(&load_corpus(&a)?, &load_corpus(&b)?)?;
            print!("{}", render_agreement(&report, format));
        }
        Command::Parseval {
            gold,
            pred,
            labelled,
            drop_unary,
            drop_root,
            format,
        } => {
            let opts = BracketOptions {
                labelled,
                drop_unary,
                drop_root,
            };
            let score = score_bracket_corpus(&load_trees(&gold)?, &load_trees(&pred)?, opts)
                .map_err(|e| {
                    print_bracket_error(&pred, &e);
                    anyhow::anyhow!("cannot compare {} with {}", gold.display(), pred.display())
                })?;
            print!("{}", render_parseval(&score, opts, format));
        }
        Command::Validate { file, role } => {
            let corpus = load_corpus(&file)?;
            let warnings = validate(&corpus, role);
            print_diagnostics(&file, &warnings);
            println!(
                "{}: {} sentences, {} GRs, {} warning(s)",
                file.display(),
                corpus.len(),
                corpus.total_grs(),
                warnings.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("greval: {e:#}");
            ExitCode::from(1)
        }
    }
}
