//! Agreement between two annotations of the same sentences, measured as the
//! mutual F-score of strictly matching GRs.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::Corpus;
use crate::matcher::{align_sentence, MatchPolicy};
use crate::scorer::{f_score, ScoreTable, Tally};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgreementError {
    #[error("annotations cover different sentences: only in first: [{}]; only in second: [{}]", only_a.join(", "), only_b.join(", "))]
    SentenceMismatch {
        only_a: Vec<String>,
        only_b: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub matched: u64,
    pub total_a: u64,
    pub total_b: u64,
    /// Share of the first annotation's GRs found in the second.
    pub precision_a_given_b: f64,
    /// Share of the second annotation's GRs found in the first.
    pub precision_b_given_a: f64,
    pub f_score: f64,
    /// Per-relation breakdown with `a` in the predicted role and `b` as gold.
    pub table: ScoreTable,
}

fn share(matched: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        matched as f64 / total as f64
    }
}

pub fn inter_annotator_agreement(
    a: &Corpus,
    b: &Corpus,
) -> Result<AgreementReport, AgreementError> {
    let ids_a: BTreeSet<&str> = a.sentences().iter().map(|s| s.id()).collect();
    let ids_b: BTreeSet<&str> = b.sentences().iter().map(|s| s.id()).collect();
    if ids_a != ids_b {
        return Err(AgreementError::SentenceMismatch {
            only_a: ids_a.difference(&ids_b).map(|s| s.to_string()).collect(),
            only_b: ids_b.difference(&ids_a).map(|s| s.to_string()).collect(),
        });
    }

    let mut tally = Tally::default();
    let mut matched = 0u64;
    for sa in a.sentences() {
        let sb = b.get(sa.id()).expect("id sets are equal");
        let alignment = align_sentence(sa.grs(), sb.grs(), MatchPolicy::Strict);
        matched += alignment.len() as u64;
        tally.add_sentence(sa.grs(), sb.grs(), &alignment);
    }
    let total_a = a.total_grs() as u64;
    let total_b = b.total_grs() as u64;
    let precision_a_given_b = share(matched, total_a);
    let precision_b_given_a = share(matched, total_b);
    let f = if total_a == 0 && total_b == 0 {
        1.0
    } else {
        f_score(precision_a_given_b, precision_b_given_a)
    };
    Ok(AgreementReport {
        matched,
        total_a,
        total_b,
        precision_a_given_b,
        precision_b_given_a,
        f_score: f,
        table: tally.table(),
    })
}
