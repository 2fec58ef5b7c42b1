//! Per-relation precision, recall and F-score over the whole hierarchy.
//!
//! Every GR counts towards its own relation's row and towards the row of
//! every relation that subsumes it, so the `dependent` row covers all GRs.
//! Counts are summed over sentences before any division.

use std::fmt::Write as _;

use serde::Serialize;

use crate::corpus::{header_line_of, Corpus, Diagnostic};
use crate::gr::GrInstance;
use crate::matcher::{align_sentence, Alignment, MatchPolicy};
use crate::relation::RelationKind;

/// Balanced F-measure. Returns 0 when both inputs are 0.
///
/// Computed as `2·(p·r)/(p+r)` so the result is bit-for-bit symmetric.
pub fn f_score(precision: f64, recall: f64) -> f64 {
    let sum = precision + recall;
    if sum == 0.0 {
        0.0
    } else {
        2.0 * (precision * recall) / sum
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Raw match counts for one relation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub predicted: u64,
    pub gold: u64,
    pub matched_predicted: u64,
    pub matched_gold: u64,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, rhs: Self) {
        self.predicted += rhs.predicted;
        self.gold += rhs.gold;
        self.matched_predicted += rhs.matched_predicted;
        self.matched_gold += rhs.matched_gold;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrfRow {
    pub relation: RelationKind,
    pub predicted_count: u64,
    pub gold_count: u64,
    pub matched_predicted: u64,
    pub matched_gold: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
}

impl PrfRow {
    pub fn from_counts(relation: RelationKind, c: Counts) -> Self {
        let precision = ratio(c.matched_predicted, c.predicted);
        let recall = ratio(c.matched_gold, c.gold);
        PrfRow {
            relation,
            predicted_count: c.predicted,
            gold_count: c.gold,
            matched_predicted: c.matched_predicted,
            matched_gold: c.matched_gold,
            precision,
            recall,
            f_score: f_score(precision, recall),
        }
    }

    /// True when precision or recall was forced to 0 by an empty denominator.
    pub fn zero_denominator(&self) -> bool {
        self.predicted_count == 0 || self.gold_count == 0
    }

    pub fn is_populated(&self) -> bool {
        self.predicted_count > 0 || self.gold_count > 0
    }

    pub fn counts(&self) -> Counts {
        Counts {
            predicted: self.predicted_count,
            gold: self.gold_count,
            matched_predicted: self.matched_predicted,
            matched_gold: self.matched_gold,
        }
    }
}

/// One row per relation, in hierarchy order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreTable {
    pub rows: Vec<PrfRow>,
}

impl ScoreTable {
    pub fn from_counts(counts: &[Counts; RelationKind::COUNT]) -> Self {
        ScoreTable {
            rows: RelationKind::ALL
                .iter()
                .map(|&r| PrfRow::from_counts(r, counts[r.index()]))
                .collect(),
        }
    }

    pub fn row(&self, relation: RelationKind) -> &PrfRow {
        &self.rows[relation.index()]
    }
}

/// Cone-inclusive counts accumulated over aligned sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    counts: [Counts; RelationKind::COUNT],
}

impl Default for Tally {
    fn default() -> Self {
        Tally {
            counts: [Counts::default(); RelationKind::COUNT],
        }
    }
}

impl Tally {
    /// Adds one sentence's GRs and alignment.
    pub fn add_sentence(
        &mut self,
        pred: &[GrInstance],
        gold: &[GrInstance],
        alignment: &Alignment,
    ) {
        let mut pred_matched = vec![false; pred.len()];
        let mut gold_matched = vec![false; gold.len()];
        for pair in &alignment.pairs {
            pred_matched[pair.pred] = true;
            gold_matched[pair.gold] = true;
        }
        for (gr, matched) in pred.iter().zip(pred_matched) {
            for a in gr.relation().ancestors() {
                let c = &mut self.counts[a.index()];
                c.predicted += 1;
                c.matched_predicted += u64::from(matched);
            }
        }
        for (gr, matched) in gold.iter().zip(gold_matched) {
            for a in gr.relation().ancestors() {
                let c = &mut self.counts[a.index()];
                c.gold += 1;
                c.matched_gold += u64::from(matched);
            }
        }
    }

    pub fn merge(&mut self, other: &Tally) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += *b;
        }
    }

    pub fn table(&self) -> ScoreTable {
        ScoreTable::from_counts(&self.counts)
    }
}

/// Per-sentence counts at the `dependent` level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SentenceScore {
    pub id: String,
    pub predicted: usize,
    pub gold: usize,
    pub matched: usize,
    pub exact: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub table: ScoreTable,
    pub sentences: Vec<SentenceScore>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Scores `pred` against `gold`, pairing sentences by id.
///
/// Gold sentences are visited in file order, then predicted sentences with
/// no gold counterpart. An id found on one side only yields a warning and
/// its GRs count as unmatched.
pub fn score_corpus(pred: &Corpus, gold: &Corpus, policy: MatchPolicy) -> ScoreReport {
    let mut tally = Tally::default();
    let mut sentences = Vec::new();
    let mut diagnostics = Vec::new();

    let mut visit = |id: &str, p: &[GrInstance], g: &[GrInstance]| {
        let alignment = align_sentence(p, g, policy);
        tally.add_sentence(p, g, &alignment);
        sentences.push(SentenceScore {
            id: id.to_string(),
            predicted: p.len(),
            gold: g.len(),
            matched: alignment.len(),
            exact: alignment.exact_count(),
        });
    };

    for (i, g) in gold.sentences().iter().enumerate() {
        match pred.get(g.id()) {
            Some(p) => visit(g.id(), p.grs(), g.grs()),
            None => {
                diagnostics.push(Diagnostic::warning(
                    header_line_of(gold, i),
                    format!("sentence '{}' missing from predicted corpus", g.id()),
                ));
                visit(g.id(), &[], g.grs());
            }
        }
    }
    for (i, p) in pred.sentences().iter().enumerate() {
        if gold.get(p.id()).is_none() {
            diagnostics.push(Diagnostic::warning(
                header_line_of(pred, i),
                format!("sentence '{}' missing from gold corpus", p.id()),
            ));
            visit(p.id(), p.grs(), &[]);
        }
    }

    ScoreReport {
        table: tally.table(),
        sentences,
        diagnostics,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format '{s}' (expected text, csv or json)")),
        }
    }
}

/// Percentage with one decimal, e.g. `0.848 -> "84.8"`.
pub fn percent(x: f64) -> String {
    format!("{:.1}", x * 100.0)
}

pub(crate) fn indented(relation: RelationKind) -> String {
    format!("{}{}", "  ".repeat(relation.display_depth()), relation)
}

pub fn render_table(table: &ScoreTable, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => render_text(table),
        OutputFormat::Csv => render_csv(table),
        OutputFormat::Json => {
            let rows: Vec<_> = table
                .rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "relation": r.relation,
                        "predicted_count": r.predicted_count,
                        "gold_count": r.gold_count,
                        "matched_predicted": r.matched_predicted,
                        "matched_gold": r.matched_gold,
                        "precision": r.precision,
                        "recall": r.recall,
                        "f_score": r.f_score,
                        "zero_denominator": r.zero_denominator(),
                    })
                })
                .collect();
            let doc = serde_json::json!({ "schema": 1, "rows": rows });
            format!(
                "{}\n",
                serde_json::to_string_pretty(&doc).expect("json value")
            )
        }
    }
}

fn render_text(table: &ScoreTable) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<20}{:>6}{:>6}{:>6}",
        "Relation", "P(%)", "R(%)", "F"
    )
    .unwrap();
    let mut flagged = false;
    for r in &table.rows {
        write!(
            out,
            "{:<20}{:>6}{:>6}{:>6}",
            indented(r.relation),
            percent(r.precision),
            percent(r.recall),
            percent(r.f_score)
        )
        .unwrap();
        if r.zero_denominator() {
            out.push_str("  *");
            flagged = true;
        }
        out.push('\n');
    }
    if flagged {
        out.push_str(
            "* no predicted or no gold GRs for this relation; empty ratios reported as 0.0\n",
        );
    }
    out
}

fn render_csv(table: &ScoreTable) -> String {
    let mut out = String::from(
        "relation,predicted_count,gold_count,matched_predicted,matched_gold,precision,recall,f_score,zero_denominator\n",
    );
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{:.6},{:.6},{:.6},{}",
            r.relation,
            r.predicted_count,
            r.gold_count,
            r.matched_predicted,
            r.matched_gold,
            r.precision,
            r.recall,
            r.f_score,
            r.zero_denominator()
        )
        .unwrap();
    }
    out
}

/// CSV dump of per-sentence `dependent`-level counts.
pub fn render_per_sentence(scores: &[SentenceScore]) -> String {
    let mut out = String::from("id,predicted,gold,matched,exact,precision,recall,f_score\n");
    for s in scores {
        let p = ratio(s.matched as u64, s.predicted as u64);
        let r = ratio(s.matched as u64, s.gold as u64);
        writeln!(
            out,
            "{},{},{},{},{},{:.6},{:.6},{:.6}",
            s.id,
            s.predicted,
            s.gold,
            s.matched,
            s.exact,
            p,
            r,
            f_score(p, r)
        )
        .unwrap();
    }
    out
}
