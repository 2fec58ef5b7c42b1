//! Relation frequency tables, GRs per sentence, and a chi-square test of
//! homogeneity of relation counts across genres.

use std::fmt::Write as _;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::corpus::{Corpus, Genre};
use crate::relation::RelationKind;
use crate::scorer::{indented, OutputFormat};

/// Significance level used for the "significant" label.
pub const ALPHA: f64 = 0.05;

/// Minimum expected cell count before a row is pooled.
pub const MIN_EXPECTED: u64 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("corpus has no sentences")]
    EmptyCorpus,
    #[error("need at least 2 genres with GRs, found {0}")]
    TooFewGenres(usize),
    #[error("contingency table has fewer than 2 rows after pooling")]
    Degenerate,
    #[error("contingency table rows have unequal lengths")]
    Ragged,
    #[error("contingency table has an all-zero row or column")]
    EmptyMargin,
}

/// Percentage in tenths, rounded half away from zero (exact integer arithmetic).
pub fn percent_tenths(count: u64, total: u64) -> u64 {
    if total == 0 {
        0
    } else {
        (2 * 1000 * count + total) / (2 * total)
    }
}

pub fn format_tenths(tenths: u64) -> String {
    format!("{}.{}", tenths / 10, tenths % 10)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FrequencyRow {
    pub relation: RelationKind,
    pub count: u64,
    /// Share of all GRs, in tenths of a percent.
    pub percent_tenths: u64,
}

impl FrequencyRow {
    pub fn percent(&self) -> String {
        format_tenths(self.percent_tenths)
    }
}

/// Cone-inclusive frequency of every relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrequencyTable {
    pub rows: Vec<FrequencyRow>,
    pub warnings: Vec<String>,
}

impl FrequencyTable {
    /// Builds the table from exact-level counts indexed by relation.
    pub fn from_exact_counts(exact: &[u64; RelationKind::COUNT]) -> Self {
        let inclusive: Vec<u64> = RelationKind::ALL
            .iter()
            .map(|r| r.cone().iter().map(|d| exact[d.index()]).sum())
            .collect();
        let total = inclusive[RelationKind::Dependent.index()];
        let rows = RelationKind::ALL
            .iter()
            .map(|&r| FrequencyRow {
                relation: r,
                count: inclusive[r.index()],
                percent_tenths: percent_tenths(inclusive[r.index()], total),
            })
            .collect();
        let warnings = if total == 0 {
            vec!["corpus contains no GRs; all percentages reported as 0".to_string()]
        } else {
            Vec::new()
        };
        FrequencyTable { rows, warnings }
    }

    pub fn row(&self, relation: RelationKind) -> &FrequencyRow {
        &self.rows[relation.index()]
    }

    pub fn count(&self, relation: RelationKind) -> u64 {
        self.row(relation).count
    }
}

/// GR counts at the exact relation each GR is annotated with.
pub fn exact_counts<'a>(
    sentences: impl IntoIterator<Item = &'a crate::corpus::Sentence>,
) -> [u64; RelationKind::COUNT] {
    let mut counts = [0u64; RelationKind::COUNT];
    for s in sentences {
        for gr in s.grs() {
            counts[gr.relation().index()] += 1;
        }
    }
    counts
}

/// Frequency of each relation, inclusive of the relations it subsumes.
pub fn relation_frequencies(corpus: &Corpus) -> FrequencyTable {
    FrequencyTable::from_exact_counts(&exact_counts(corpus.sentences()))
}

pub fn mean_grs_per_sentence(corpus: &Corpus) -> Result<f64, StatsError> {
    if corpus.is_empty() {
        return Err(StatsError::EmptyCorpus);
    }
    Ok(corpus.total_grs() as f64 / corpus.len() as f64)
}

/// Exact-level relation × genre counts. Only relations and genres with at
/// least one GR appear; sentences without a genre are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenreContingency {
    pub genres: Vec<Genre>,
    pub rows: Vec<(RelationKind, Vec<u64>)>,
}

impl GenreContingency {
    pub fn from_corpus(corpus: &Corpus) -> Self {
        let per_genre: Vec<[u64; RelationKind::COUNT]> = Genre::ALL
            .iter()
            .map(|&g| exact_counts(corpus.sentences().iter().filter(|s| s.genre() == Some(g))))
            .collect();
        let present: Vec<usize> = (0..Genre::ALL.len())
            .filter(|&gi| per_genre[gi].iter().sum::<u64>() > 0)
            .collect();
        let rows = RelationKind::ALL
            .iter()
            .map(|&r| {
                (
                    r,
                    present
                        .iter()
                        .map(|&gi| per_genre[gi][r.index()])
                        .collect::<Vec<_>>(),
                )
            })
            .filter(|(_, counts)| counts.iter().sum::<u64>() > 0)
            .collect();
        GenreContingency {
            genres: present.iter().map(|&gi| Genre::ALL[gi]).collect(),
            rows,
        }
    }

    pub fn column_totals(&self) -> Vec<u64> {
        (0..self.genres.len())
            .map(|c| self.rows.iter().map(|(_, r)| r[c]).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub degrees_of_freedom: u64,
    pub p_value: f64,
}

impl ChiSquare {
    pub fn significant(&self) -> bool {
        self.p_value < ALPHA
    }
}

/// Upper tail probability of the chi-square distribution.
pub fn chi_square_sf(statistic: f64, degrees_of_freedom: u64) -> f64 {
    if statistic <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(degrees_of_freedom as f64)
        .expect("positive degrees of freedom")
        .sf(statistic)
}

/// Pearson's chi-square test of homogeneity on an r × c table of counts.
pub fn chi_square_homogeneity(table: &[Vec<u64>]) -> Result<ChiSquare, StatsError> {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    if table.iter().any(|r| r.len() != cols) {
        return Err(StatsError::Ragged);
    }
    if rows < 2 || cols < 2 {
        return Err(StatsError::Degenerate);
    }
    let row_totals: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_totals: Vec<u64> = (0..cols)
        .map(|c| table.iter().map(|r| r[c]).sum())
        .collect();
    if row_totals.contains(&0) || col_totals.contains(&0) {
        return Err(StatsError::EmptyMargin);
    }
    let n: u64 = row_totals.iter().sum();

    // (O - E)² / E with E = R·C/N, rewritten as (N·O - R·C)² / (N·R·C) so
    // that proportional rows give exactly zero.
    let mut statistic = 0.0;
    for (r, row) in table.iter().enumerate() {
        for (c, &observed) in row.iter().enumerate() {
            let rc = i128::from(row_totals[r]) * i128::from(col_totals[c]);
            let diff = i128::from(n) * i128::from(observed) - rc;
            statistic += (diff * diff) as f64 / (n as f64 * rc as f64);
        }
    }
    let degrees_of_freedom = ((rows - 1) * (cols - 1)) as u64;
    Ok(ChiSquare {
        statistic,
        degrees_of_freedom,
        p_value: chi_square_sf(statistic, degrees_of_freedom),
    })
}

/// A contingency row after pooling; `relations` has one entry unless pooled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PooledRow {
    pub label: String,
    pub relations: Vec<RelationKind>,
    pub counts: Vec<u64>,
}

fn row_passes(total: u64, col_totals: &[u64], n: u64) -> bool {
    col_totals.iter().all(|&c| total * c >= MIN_EXPECTED * n)
}

/// Merges rows whose expected count falls below [`MIN_EXPECTED`] in any
/// column into a trailing "other" row. If "other" is itself too small,
/// further rows are added to it, rarest first.
pub fn pool_rows(contingency: &GenreContingency) -> Vec<PooledRow> {
    let col_totals = contingency.column_totals();
    let n: u64 = col_totals.iter().sum();
    let total = |counts: &[u64]| counts.iter().sum::<u64>();

    let (mut keep, failing): (Vec<_>, Vec<_>) = contingency
        .rows
        .iter()
        .cloned()
        .partition(|(_, counts)| row_passes(total(counts), &col_totals, n));
    if failing.is_empty() {
        return keep
            .into_iter()
            .map(|(r, counts)| PooledRow {
                label: r.name().to_string(),
                relations: vec![r],
                counts,
            })
            .collect();
    }

    let mut other = PooledRow {
        label: "other".to_string(),
        relations: Vec::new(),
        counts: vec![0; col_totals.len()],
    };
    let absorb = |other: &mut PooledRow, (r, counts): (RelationKind, Vec<u64>)| {
        other.relations.push(r);
        for (o, c) in other.counts.iter_mut().zip(counts) {
            *o += c;
        }
    };
    for row in failing {
        absorb(&mut other, row);
    }
    // rarest first; ties in hierarchy order
    keep.sort_by_key(|(r, counts)| (total(counts), *r));
    let mut keep = std::collections::VecDeque::from(keep);
    while !row_passes(total(&other.counts), &col_totals, n) {
        match keep.pop_front() {
            Some(row) => absorb(&mut other, row),
            None => break,
        }
    }
    let mut rows: Vec<PooledRow> = keep
        .into_iter()
        .map(|(r, counts)| PooledRow {
            label: r.name().to_string(),
            relations: vec![r],
            counts,
        })
        .collect();
    rows.sort_by_key(|row| row.relations[0]);
    other.relations.sort();
    rows.push(other);
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenreTest {
    pub genres: Vec<Genre>,
    pub table: Vec<PooledRow>,
    pub result: ChiSquare,
}

/// Tests whether exact-level relation counts are distributed alike across
/// the genres present in the corpus.
pub fn genre_chi_square(corpus: &Corpus) -> Result<GenreTest, StatsError> {
    let contingency = GenreContingency::from_corpus(corpus);
    if contingency.genres.len() < 2 {
        return Err(StatsError::TooFewGenres(contingency.genres.len()));
    }
    let table = pool_rows(&contingency);
    if table.len() < 2 {
        return Err(StatsError::Degenerate);
    }
    let counts: Vec<Vec<u64>> = table.iter().map(|r| r.counts.clone()).collect();
    let result = chi_square_homogeneity(&counts)?;
    Ok(GenreTest {
        genres: contingency.genres,
        table,
        result,
    })
}

/// Full statistics report for one corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub sentences: usize,
    pub grs: usize,
    pub mean_grs_per_sentence: Option<f64>,
    pub frequencies: FrequencyTable,
    pub by_genre: Option<Vec<(Genre, FrequencyTable)>>,
    pub genre_test: Option<Result<GenreTest, String>>,
}

pub fn corpus_report(corpus: &Corpus, by_genre: bool) -> StatsReport {
    let genre_tables = by_genre.then(|| {
        Genre::ALL
            .iter()
            .filter_map(|&g| {
                let sentences: Vec<_> = corpus
                    .sentences()
                    .iter()
                    .filter(|s| s.genre() == Some(g))
                    .collect();
                (!sentences.is_empty()).then(|| {
                    (
                        g,
                        FrequencyTable::from_exact_counts(&exact_counts(sentences)),
                    )
                })
            })
            .collect()
    });
    StatsReport {
        sentences: corpus.len(),
        grs: corpus.total_grs(),
        mean_grs_per_sentence: mean_grs_per_sentence(corpus).ok(),
        frequencies: relation_frequencies(corpus),
        by_genre: genre_tables,
        genre_test: by_genre.then(|| genre_chi_square(corpus).map_err(|e| e.to_string())),
    }
}

fn frequency_text(out: &mut String, table: &FrequencyTable) {
    writeln!(out, "{:<20}{:>6}{:>6}", "Relation", "#", "%").unwrap();
    for row in &table.rows {
        writeln!(
            out,
            "{:<20}{:>6}{:>6}",
            indented(row.relation),
            row.count,
            row.percent()
        )
        .unwrap();
    }
}

pub fn render_stats(report: &StatsReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => {
            let mut out = String::new();
            frequency_text(&mut out, &report.frequencies);
            writeln!(out).unwrap();
            writeln!(out, "sentences: {}", report.sentences).unwrap();
            writeln!(out, "GRs: {}", report.grs).unwrap();
            match report.mean_grs_per_sentence {
                Some(m) => writeln!(out, "mean GRs per sentence: {m:.2}").unwrap(),
                None => writeln!(out, "mean GRs per sentence: n/a (no sentences)").unwrap(),
            }
            if let Some(tables) = &report.by_genre {
                for (g, t) in tables {
                    writeln!(out, "\ngenre {g}").unwrap();
                    frequency_text(&mut out, t);
                }
            }
            if let Some(test) = &report.genre_test {
                writeln!(out).unwrap();
                match test {
                    Ok(t) => {
                        let pooled = t.table.iter().find(|r| r.label == "other");
                        writeln!(
                            out,
                            "genre homogeneity (chi-square): statistic {:.3}, df {}, p {:.4} ({} at alpha {})",
                            t.result.statistic,
                            t.result.degrees_of_freedom,
                            t.result.p_value,
                            if t.result.significant() { "significant" } else { "not significant" },
                            ALPHA
                        )
                        .unwrap();
                        if let Some(p) = pooled {
                            let names: Vec<_> = p.relations.iter().map(|r| r.name()).collect();
                            writeln!(out, "pooled into 'other': {}", names.join(", ")).unwrap();
                        }
                    }
                    Err(e) => writeln!(out, "genre homogeneity: not computed ({e})").unwrap(),
                }
            }
            out
        }
        OutputFormat::Csv => {
            let mut out = String::from("scope,relation,count,percent\n");
            let mut emit = |scope: &str, t: &FrequencyTable| {
                for row in &t.rows {
                    writeln!(
                        out,
                        "{scope},{},{},{}",
                        row.relation,
                        row.count,
                        row.percent()
                    )
                    .unwrap();
                }
            };
            emit("all", &report.frequencies);
            if let Some(tables) = &report.by_genre {
                for (g, t) in tables {
                    emit(&g.to_string(), t);
                }
            }
            out
        }
        OutputFormat::Json => {
            let rows = |t: &FrequencyTable| -> Vec<serde_json::Value> {
                t.rows
                    .iter()
                    .map(|r| {
                        serde_json::json!({
                            "relation": r.relation,
                            "count": r.count,
                            "percent": r.percent_tenths as f64 / 10.0,
                        })
                    })
                    .collect()
            };
            let mut doc = serde_json::json!({
                "schema": 1,
                "sentences": report.sentences,
                "grs": report.grs,
                "mean_grs_per_sentence": report.mean_grs_per_sentence,
                "frequencies": rows(&report.frequencies),
                "warnings": report.frequencies.warnings,
            });
            if let Some(tables) = &report.by_genre {
                doc["by_genre"] = tables
                    .iter()
                    .map(|(g, t)| serde_json::json!({ "genre": g, "frequencies": rows(t) }))
                    .collect();
            }
            if let Some(test) = &report.genre_test {
                doc["genre_test"] = match test {
                    Ok(t) => serde_json::json!({
                        "statistic": t.result.statistic,
                        "degrees_of_freedom": t.result.degrees_of_freedom,
                        "p_value": t.result.p_value,
                        "significant": t.result.significant(),
                        "alpha": ALPHA,
                        "genres": t.genres,
                        "rows": t.table,
                    }),
                    Err(e) => serde_json::json!({ "error": e }),
                };
            }
            format!(
                "{}\n",
                serde_json::to_string_pretty(&doc).expect("json value")
            )
        }
    }
}
