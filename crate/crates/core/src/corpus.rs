//! Reading, writing and checking `.gr` corpus files.
//!
//! ```text
//! % comment
//! # sent G22-1460 genre G | When the proprietor dies, ...
//! cmod(when, become, die)
//! ncsubj(die, proprietor, _)
//!
//! # sent next
//! ...
//! ```
//!
//! A header opens a sentence, one GR follows per line, and a blank line
//! closes the sentence. The writer emits exactly this canonical layout with
//! LF line endings.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::gr::{GrError, GrInstance, Slot, SlotValue};
use crate::relation::RelationKind;

/// Brown corpus genre classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Genre {
    /// Press reportage.
    A,
    /// Belles lettres.
    G,
    /// Learned writing.
    J,
}

impl Genre {
    pub const ALL: [Genre; 3] = [Genre::A, Genre::G, Genre::J];

    pub fn letter(self) -> char {
        match self {
            Genre::A => 'A',
            Genre::G => 'G',
            Genre::J => 'J',
        }
    }
}

impl fmt::Display for Genre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Genre {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" => Ok(Genre::A),
            "G" => Ok(Genre::G),
            "J" => Ok(Genre::J),
            _ => Err(CorpusError::BadGenre(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("invalid sentence id '{0}'")]
    BadId(String),
    #[error("unknown genre '{0}' (expected A, G or J)")]
    BadGenre(String),
    #[error("sentence text must be a single line")]
    MultilineText,
    #[error("duplicate sentence id '{0}'")]
    DuplicateId(String),
}

#[derive(Debug, Clone, Default)]
struct SourceLines {
    header: usize,
    grs: Vec<usize>,
}

/// An identified sentence with its multiset of GRs (kept in file order).
#[derive(Debug, Clone)]
pub struct Sentence {
    id: String,
    genre: Option<Genre>,
    text: Option<String>,
    grs: Vec<GrInstance>,
    source: Option<SourceLines>,
}

impl PartialEq for Sentence {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.genre == other.genre
            && self.text == other.text
            && self.grs == other.grs
    }
}

impl Eq for Sentence {}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && !id.chars().any(|c| c.is_whitespace() || c == '|')
}

impl Sentence {
    pub fn new(
        id: impl Into<String>,
        genre: Option<Genre>,
        text: Option<String>,
        grs: Vec<GrInstance>,
    ) -> Result<Self, CorpusError> {
        let id = id.into();
        if !valid_id(&id) {
            return Err(CorpusError::BadId(id));
        }
        let text = match text {
            Some(t) if t.contains(['\n', '\r']) => return Err(CorpusError::MultilineText),
            Some(t) => Some(t.trim().to_string()).filter(|t| !t.is_empty()),
            None => None,
        };
        Ok(Sentence {
            id,
            genre,
            text,
            grs,
            source: None,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn genre(&self) -> Option<Genre> {
        self.genre
    }

    pub fn text(&self) -> Option<&str> {
        self.text.as_deref()
    }

    pub fn grs(&self) -> &[GrInstance] {
        &self.grs
    }

    /// Same sentence with a different GR list; source positions are dropped.
    pub fn with_grs(&self, grs: Vec<GrInstance>) -> Sentence {
        Sentence {
            grs,
            source: None,
            ..self.clone()
        }
    }

    /// Line of the `# sent` header in the file this sentence was read from.
    pub fn header_line(&self) -> Option<usize> {
        self.source.as_ref().map(|s| s.header)
    }

    pub fn gr_line(&self, i: usize) -> Option<usize> {
        self.source.as_ref().and_then(|s| s.grs.get(i).copied())
    }

    fn header(&self) -> String {
        let mut out = format!("# sent {}", self.id);
        if let Some(g) = self.genre {
            out.push_str(&format!(" genre {g}"));
        }
        if let Some(t) = &self.text {
            out.push_str(" | ");
            out.push_str(t);
        }
        out
    }
}

/// An ordered list of sentences with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    sentences: Vec<Sentence>,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>) -> Result<Self, CorpusError> {
        let mut corpus = Corpus::default();
        for s in sentences {
            corpus.push(s)?;
        }
        Ok(corpus)
    }

    pub fn push(&mut self, sentence: Sentence) -> Result<(), CorpusError> {
        if self.get(sentence.id()).is_some() {
            return Err(CorpusError::DuplicateId(sentence.id));
        }
        self.sentences.push(sentence);
        Ok(())
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn get(&self, id: &str) -> Option<&Sentence> {
        self.sentences.iter().find(|s| s.id == id)
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn total_grs(&self) -> usize {
        self.sentences.iter().map(|s| s.grs.len()).sum()
    }

    /// Header and GR line numbers as they would appear in the canonical
    /// serialization, or as read from the source file when available.
    fn line_map(&self) -> Vec<SourceLines> {
        let mut next = 1;
        self.sentences
            .iter()
            .map(|s| {
                let canonical = SourceLines {
                    header: next,
                    grs: (1..=s.grs.len()).map(|i| next + i).collect(),
                };
                next += s.grs.len() + 2;
                s.source.clone().unwrap_or(canonical)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// 1-based.
    pub line: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn error(line: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            line,
            message: message.into(),
        }
    }

    pub fn warning(line: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            line,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.severity {
            Severity::Error => write!(f, "{}: {}", self.line, self.message),
            Severity::Warning => write!(f, "{}: warning: {}", self.line, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
enum LineError {
    #[error("malformed GR line '{0}'")]
    Syntax(String),
    #[error("unknown relation '{0}'")]
    UnknownRelation(String),
    #[error("malformed slot token '{0}'")]
    SlotToken(String),
    #[error(transparent)]
    Gr(#[from] GrError),
}

fn parse_slot(token: &str) -> Result<SlotValue, LineError> {
    match token {
        "_" => Ok(SlotValue::Unspecified),
        "Pro" => Ok(SlotValue::Pro),
        _ => match token.parse::<RelationKind>() {
            Ok(r) => Ok(SlotValue::GrName(r)),
            Err(_) => SlotValue::lexeme(token).map_err(|_| LineError::SlotToken(token.to_string())),
        },
    }
}

/// Parses one `name(v1, v2, ...)` line.
pub fn parse_gr(line: &str) -> Result<GrInstance, String> {
    parse_gr_line(line).map_err(|e| e.to_string())
}

fn parse_gr_line(line: &str) -> Result<GrInstance, LineError> {
    let line = line.trim();
    let syntax = || LineError::Syntax(line.to_string());
    let (name, rest) = line.split_once('(').ok_or_else(syntax)?;
    let name = name.trim();
    if name.is_empty() {
        return Err(syntax());
    }
    let inner = rest.strip_suffix(')').ok_or_else(syntax)?;
    if inner.contains(['(', ')']) {
        return Err(syntax());
    }
    let relation: RelationKind = name
        .parse()
        .map_err(|_| LineError::UnknownRelation(name.to_string()))?;
    let tokens: Vec<&str> = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    };
    let values = tokens
        .iter()
        .map(|t| parse_slot(t))
        .collect::<Result<Vec<_>, _>>();
    let values = match values {
        Ok(v) => v,
        // report arity before token problems: the count is the coarser error
        Err(e) => {
            let expected = crate::gr::signature_of(relation).arity();
            if tokens.len() != expected {
                return Err(GrError::Arity {
                    relation,
                    expected,
                    found: tokens.len(),
                }
                .into());
            }
            return Err(e);
        }
    };
    Ok(GrInstance::new(relation, values)?)
}

struct HeaderLine {
    id: String,
    genre: Option<Genre>,
    text: Option<String>,
}

fn parse_header(line: &str) -> Result<HeaderLine, String> {
    let body = line.strip_prefix('#').unwrap_or(line);
    let (meta, text) = match body.split_once('|') {
        Some((m, t)) => (m, Some(t.trim().to_string()).filter(|t| !t.is_empty())),
        None => (body, None),
    };
    let mut words = meta.split_whitespace();
    if words.next() != Some("sent") {
        return Err("malformed header: expected '# sent <id>'".to_string());
    }
    let id = words
        .next()
        .ok_or_else(|| "malformed header: missing sentence id".to_string())?
        .to_string();
    let genre = match words.next() {
        None => None,
        Some("genre") => {
            let g = words
                .next()
                .ok_or_else(|| "malformed header: missing genre after 'genre'".to_string())?;
            Some(g.parse::<Genre>().map_err(|e| e.to_string())?)
        }
        Some(other) => return Err(format!("malformed header: unexpected '{other}'")),
    };
    if let Some(extra) = words.next() {
        return Err(format!("malformed header: unexpected '{extra}'"));
    }
    Ok(HeaderLine { id, genre, text })
}

/// Parses a corpus from text. On failure every error found is returned,
/// each tagged with its 1-based line number.
pub fn parse_corpus(input: &str) -> Result<Corpus, Vec<Diagnostic>> {
    let mut sentences: Vec<Sentence> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut errors = Vec::new();
    let mut current: Option<Sentence> = None;

    for (i, raw) in input.split('\n').enumerate() {
        let lineno = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            sentences.extend(current.take());
            continue;
        }
        if trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('#') {
            sentences.extend(current.take());
            match parse_header(trimmed) {
                Ok(h) => {
                    if let Some(first) = seen.get(&h.id) {
                        errors.push(Diagnostic::error(
                            lineno,
                            format!(
                                "duplicate sentence id '{}' (first defined on line {first})",
                                h.id
                            ),
                        ));
                    } else {
                        seen.insert(h.id.clone(), lineno);
                    }
                    let mut s = Sentence::new(h.id, h.genre, h.text, Vec::new())
                        .expect("header fields are single-line and whitespace-free");
                    s.source = Some(SourceLines {
                        header: lineno,
                        grs: Vec::new(),
                    });
                    current = Some(s);
                }
                Err(msg) => errors.push(Diagnostic::error(lineno, msg)),
            }
            continue;
        }
        let Some(sentence) = current.as_mut() else {
            errors.push(Diagnostic::error(
                lineno,
                "GR line outside a sentence (missing '# sent' header)",
            ));
            continue;
        };
        match parse_gr_line(trimmed) {
            Ok(gr) => {
                sentence.grs.push(gr);
                if let Some(src) = sentence.source.as_mut() {
                    src.grs.push(lineno);
                }
            }
            Err(e) => errors.push(Diagnostic::error(lineno, e.to_string())),
        }
    }
    sentences.extend(current.take());

    if errors.is_empty() {
        Ok(Corpus { sentences })
    } else {
        Err(errors)
    }
}

/// Byte-level entry point: invalid UTF-8 is reported as a diagnostic on the
/// line where it occurs.
pub fn parse_corpus_bytes(input: &[u8]) -> Result<Corpus, Vec<Diagnostic>> {
    match std::str::from_utf8(input) {
        Ok(text) => parse_corpus(text),
        Err(e) => {
            let valid = &input[..e.valid_up_to()];
            let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
            Err(vec![Diagnostic::error(line, "invalid UTF-8")])
        }
    }
}

/// Canonical serialization.
pub fn write_corpus(corpus: &Corpus) -> String {
    let mut out = String::new();
    for s in &corpus.sentences {
        out.push_str(&s.header());
        out.push('\n');
        for gr in &s.grs {
            out.push_str(&gr.to_string());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Whether a file holds reference annotation or parser output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusRole {
    #[default]
    Gold,
    Predicted,
}

fn has_typed_slot_family(r: RelationKind) -> bool {
    RelationKind::Mod.subsumes(r) || RelationKind::Clausal.subsumes(r) || r == RelationKind::Iobj
}

/// Advisory checks on a parsed corpus. Only warnings are produced.
pub fn validate(corpus: &Corpus, role: CorpusRole) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (s, lines) in corpus.sentences.iter().zip(corpus.line_map()) {
        for (i, gr) in s.grs.iter().enumerate() {
            let line = lines.grs.get(i).copied().unwrap_or(lines.header);
            let r = gr.relation();
            if role == CorpusRole::Gold {
                if !r.is_leaf() {
                    out.push(Diagnostic::warning(
                        line,
                        format!("non-leaf relation '{r}' in gold corpus"),
                    ));
                }
                if has_typed_slot_family(r)
                    && gr.get(Slot::Type).is_some_and(SlotValue::is_unspecified)
                {
                    out.push(Diagnostic::warning(
                        line,
                        format!("unspecified type slot in gold '{r}'"),
                    ));
                }
            }
            if gr.head().has_uppercase() {
                out.push(Diagnostic::warning(
                    line,
                    format!("head lexeme '{}' contains uppercase", gr.head()),
                ));
            }
        }
    }
    out
}

/// Line number of a sentence header, from the source file or the
/// canonical layout.
pub fn header_line_of(corpus: &Corpus, index: usize) -> usize {
    corpus.line_map().get(index).map(|l| l.header).unwrap_or(1)
}
