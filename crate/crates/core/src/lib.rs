//! Grammatical-relation (GR) annotation model and parser evaluation.
//!
//! Gold and predicted analyses are sets of GRs such as
//! `ncsubj(die, proprietor, _)` per sentence. Relations form a subsumption
//! hierarchy rooted at `dependent`, and scores are reported for every
//! relation inclusive of the relations it subsumes.
//!
//! ```
//! use greval_core::{parse_corpus, score_corpus, MatchPolicy, RelationKind};
//!
//! let gold = parse_corpus("# sent s1\nncsubj(die, proprietor, _)\n").unwrap();
//! let pred = parse_corpus("# sent s1\nsubj(die, proprietor, _)\n").unwrap();
//! let report = score_corpus(&pred, &gold, MatchPolicy::Paper);
//! assert_eq!(report.table.row(RelationKind::Dependent).f_score, 1.0);
//! ```
//!
//! The crate also computes corpus statistics, inter-annotator agreement and
//! bracket-based (PARSEVAL-style) scores for phrase-structure trees.

pub mod agreement;
mod assignment;
pub mod corpus;
pub mod gr;
pub mod matcher;
pub mod parseval;
pub mod relation;
pub mod scorer;
pub mod stats;

pub use agreement::{inter_annotator_agreement, AgreementError, AgreementReport};
pub use assignment::max_weight_matching;
pub use corpus::{
    parse_corpus, parse_corpus_bytes, parse_gr, validate, write_corpus, Corpus, CorpusError,
    CorpusRole, Diagnostic, Genre, Sentence, Severity,
};
pub use gr::{
    normalize_lexeme, signature_of, GrError, GrInstance, Lexeme, Slot, SlotSignature, SlotValue,
};
pub use matcher::{
    align_sentence, canonical_order, compatible, AlignedPair, Alignment, MatchPolicy,
};
pub use parseval::{
    bracket_prf, count_crossings, crossing_brackets, parse_bracket_file, score_bracket_corpus,
    Bracket, BracketCounts, BracketError, BracketOptions, BracketScore, BracketTree,
};
pub use relation::RelationKind;
pub use scorer::{
    f_score, render_table, score_corpus, OutputFormat, PrfRow, ScoreReport, ScoreTable,
};
pub use stats::{
    chi_square_homogeneity, genre_chi_square, mean_grs_per_sentence, relation_frequencies,
    ChiSquare, FrequencyTable, StatsError,
};
