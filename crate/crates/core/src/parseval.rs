//! Bracket precision, recall and crossing brackets over phrase-structure
//! trees, read from parenthesised `(LABEL child ...)` records.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BracketTree {
    Node {
        label: Option<String>,
        children: Vec<BracketTree>,
    },
    Leaf(String),
}

/// A constituent as a half-open token interval.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Bracket {
    pub label: Option<String>,
    pub start: usize,
    pub end: usize,
}

impl Bracket {
    pub fn span(&self) -> (usize, usize) {
        (self.start, self.end)
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{},{})",
            self.label.as_deref().unwrap_or(""),
            self.start,
            self.end
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BracketOptions {
    /// Compare (label, span) pairs instead of spans.
    pub labelled: bool,
    /// Ignore brackets covering a single token.
    pub drop_unary: bool,
    /// Ignore the outermost bracket of each tree.
    pub drop_root: bool,
}

impl BracketTree {
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            BracketTree::Leaf(t) => out.push(t),
            BracketTree::Node { children, .. } => {
                for c in children {
                    c.collect_leaves(out);
                }
            }
        }
    }

    /// All constituents in pre-order (root first).
    pub fn all_brackets(&self) -> Vec<Bracket> {
        let mut out = Vec::new();
        self.collect_brackets(0, &mut out);
        out
    }

    fn collect_brackets(&self, start: usize, out: &mut Vec<Bracket>) -> usize {
        match self {
            BracketTree::Leaf(_) => start + 1,
            BracketTree::Node { label, children } => {
                let slot = out.len();
                out.push(Bracket {
                    label: label.clone(),
                    start,
                    end: start,
                });
                let mut end = start;
                for c in children {
                    end = c.collect_brackets(end, out);
                }
                out[slot].end = end;
                end
            }
        }
    }

    /// Brackets that take part in scoring under `opts`.
    pub fn brackets(&self, opts: BracketOptions) -> Vec<Bracket> {
        self.all_brackets()
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !(opts.drop_root && *i == 0))
            .filter(|(_, b)| !(opts.drop_unary && b.end - b.start == 1))
            .map(|(_, b)| b)
            .collect()
    }
}

impl fmt::Display for BracketTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketTree::Leaf(t) => f.write_str(t),
            BracketTree::Node { label, children } => {
                f.write_str("(")?;
                let mut first = true;
                if let Some(l) = label {
                    f.write_str(l)?;
                    first = false;
                }
                for c in children {
                    if !first {
                        f.write_str(" ")?;
                    }
                    write!(f, "{c}")?;
                    first = false;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BracketError {
    #[error("record {record}: unbalanced parentheses")]
    Unbalanced { record: usize, line: usize },
    #[error("record {record}: empty constituent")]
    EmptyConstituent { record: usize, line: usize },
    #[error("record {record}: expected a single bracketed tree")]
    NotATree { record: usize, line: usize },
    /// `tree` is the 1-based position of the pair within its file.
    #[error("tree {tree}: token sequences differ (gold has {gold} tokens, predicted has {pred})")]
    LeafMismatch {
        tree: usize,
        gold: usize,
        pred: usize,
    },
    #[error("gold has {gold} trees, predicted has {pred}")]
    LengthMismatch { gold: usize, pred: usize },
}

impl BracketError {
    /// Source line the error points at, if it comes from parsing.
    pub fn line(&self) -> Option<usize> {
        match self {
            BracketError::Unbalanced { line, .. }
            | BracketError::EmptyConstituent { line, .. }
            | BracketError::NotATree { line, .. } => Some(*line),
            BracketError::LeafMismatch { .. } | BracketError::LengthMismatch { .. } => None,
        }
    }
}

enum Token<'a> {
    Open(usize),
    Close(usize),
    Atom(&'a str, usize),
}

fn tokenize(text: &str, first_line: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = first_line + i;
        let mut rest = line;
        while let Some(c) = rest.chars().next() {
            if c.is_whitespace() {
                rest = &rest[c.len_utf8()..];
            } else if c == '(' {
                out.push(Token::Open(lineno));
                rest = &rest[1..];
            } else if c == ')' {
                out.push(Token::Close(lineno));
                rest = &rest[1..];
            } else {
                let end = rest
                    .find(|ch: char| ch.is_whitespace() || ch == '(' || ch == ')')
                    .unwrap_or(rest.len());
                out.push(Token::Atom(&rest[..end], lineno));
                rest = &rest[end..];
            }
        }
    }
    out
}

fn parse_record(text: &str, record: usize, first_line: usize) -> Result<BracketTree, BracketError> {
    let tokens = tokenize(text, first_line);
    // stack of (label, children, opening line)
    let mut stack: Vec<(Option<String>, Vec<BracketTree>, usize)> = Vec::new();
    let mut done: Option<BracketTree> = None;
    let mut prev_open = false;
    for tok in tokens {
        if done.is_some() {
            let line = match tok {
                Token::Open(l) | Token::Close(l) | Token::Atom(_, l) => l,
            };
            return Err(match tok {
                Token::Close(_) => BracketError::Unbalanced { record, line },
                _ => BracketError::NotATree { record, line },
            });
        }
        match tok {
            Token::Open(line) => {
                stack.push((None, Vec::new(), line));
                prev_open = true;
                continue;
            }
            Token::Atom(atom, line) => {
                let Some(top) = stack.last_mut() else {
                    return Err(BracketError::NotATree { record, line });
                };
                if prev_open {
                    top.0 = Some(atom.to_string());
                } else {
                    top.1.push(BracketTree::Leaf(atom.to_string()));
                }
            }
            Token::Close(line) => {
                let Some((label, children, open_line)) = stack.pop() else {
                    return Err(BracketError::Unbalanced { record, line });
                };
                if children.is_empty() {
                    return Err(BracketError::EmptyConstituent {
                        record,
                        line: open_line,
                    });
                }
                let node = BracketTree::Node { label, children };
                match stack.last_mut() {
                    Some(parent) => parent.1.push(node),
                    None => done = Some(node),
                }
            }
        }
        prev_open = false;
    }
    if let Some((_, _, line)) = stack.last() {
        return Err(BracketError::Unbalanced {
            record,
            line: *line,
        });
    }
    done.ok_or(BracketError::NotATree {
        record,
        line: first_line,
    })
}

/// Parses blank-line separated bracket records; lines starting with `%` are
/// comments. All malformed records are
/// reported.
pub fn parse_bracket_file(input: &str) -> Result<Vec<BracketTree>, Vec<BracketError>> {
    let mut trees = Vec::new();
    let mut errors = Vec::new();
    let mut record = 0;
    let mut buf = String::new();
    let mut buf_start = 0;

    let mut flush = |buf: &mut String, start: usize, record: &mut usize| {
        if buf.trim().is_empty() {
            buf.clear();
            return;
        }
        *record += 1;
        match parse_record(buf, *record, start) {
            Ok(t) => trees.push(t),
            Err(e) => errors.push(e),
        }
        buf.clear();
    };

    for (i, line) in input.lines().enumerate() {
        if line.trim().is_empty() {
            flush(&mut buf, buf_start, &mut record);
        } else if line.starts_with('%') {
            // Keep line numbering inside a record.
            if !buf.is_empty() {
                buf.push('\n');
            }
        } else {
            if buf.is_empty() {
                buf_start = i + 1;
            }
            buf.push_str(line);
            buf.push('\n');
        }
    }
    flush(&mut buf, buf_start, &mut record);

    if errors.is_empty() {
        Ok(trees)
    } else {
        Err(errors)
    }
}

fn check_leaves(gold: &BracketTree, pred: &BracketTree) -> Result<(), BracketError> {
    let g = gold.leaves();
    let p = pred.leaves();
    if g != p {
        return Err(BracketError::LeafMismatch {
            tree: 1,
            gold: g.len(),
            pred: p.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BracketCounts {
    /// Brackets common to both analyses (multiset intersection).
    pub matches: u64,
    pub parser_brackets: u64,
    pub corpus_brackets: u64,
}

impl BracketCounts {
    pub fn precision(&self) -> f64 {
        ratio(self.matches, self.parser_brackets)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.matches, self.corpus_brackets)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn multiset(brackets: Vec<Bracket>, labelled: bool) -> BTreeMap<Bracket, u64> {
    let mut m = BTreeMap::new();
    for mut b in brackets {
        if !labelled {
            b.label = None;
        }
        *m.entry(b).or_insert(0) += 1;
    }
    m
}

pub fn bracket_prf(
    gold: &BracketTree,
    pred: &BracketTree,
    opts: BracketOptions,
) -> Result<BracketCounts, BracketError> {
    check_leaves(gold, pred)?;
    let g = gold.brackets(opts);
    let p = pred.brackets(opts);
    let (corpus_brackets, parser_brackets) = (g.len() as u64, p.len() as u64);
    let gm = multiset(g, opts.labelled);
    let pm = multiset(p, opts.labelled);
    let matches = pm
        .iter()
        .map(|(b, &n)| n.min(gm.get(b).copied().unwrap_or(0)))
        .sum();
    Ok(BracketCounts {
        matches,
        parser_brackets,
        corpus_brackets,
    })
}

fn crosses(s: (usize, usize), g: (usize, usize)) -> bool {
    let overlap = s.0 < g.1 && g.0 < s.1;
    let s_in_g = g.0 <= s.0 && s.1 <= g.1;
    let g_in_s = s.0 <= g.0 && g.1 <= s.1;
    overlap && !s_in_g && !g_in_s
}

/// Number of predicted spans that cross at least one gold span.
pub fn count_crossings(gold: &[(usize, usize)], pred: &[(usize, usize)]) -> u64 {
    pred.iter()
        .filter(|&&s| gold.iter().any(|&g| crosses(s, g)))
        .count() as u64
}

pub fn crossing_brackets(
    gold: &BracketTree,
    pred: &BracketTree,
    opts: BracketOptions,
) -> Result<u64, BracketError> {
    check_leaves(gold, pred)?;
    let g: Vec<_> = gold.brackets(opts).iter().map(Bracket::span).collect();
    let p: Vec<_> = pred.brackets(opts).iter().map(Bracket::span).collect();
    Ok(count_crossings(&g, &p))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketScore {
    pub sentences: u64,
    pub matches: u64,
    pub parser_brackets: u64,
    pub corpus_brackets: u64,
    pub precision: f64,
    pub recall: f64,
    pub crossings: u64,
    pub mean_crossings: f64,
}

/// Micro-averaged bracket scores over paired trees.
pub fn score_bracket_corpus(
    gold: &[BracketTree],
    pred: &[BracketTree],
    opts: BracketOptions,
) -> Result<BracketScore, BracketError> {
    if gold.len() != pred.len() {
        return Err(BracketError::LengthMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut total = BracketCounts::default();
    let mut crossings = 0;
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        let c = bracket_prf(g, p, opts).map_err(|e| match e {
            BracketError::LeafMismatch { gold, pred, .. } => BracketError::LeafMismatch {
                tree: i + 1,
                gold,
                pred,
            },
            other => other,
        })?;
        total.matches += c.matches;
        total.parser_brackets += c.parser_brackets;
        total.corpus_brackets += c.corpus_brackets;
        crossings += crossing_brackets(g, p, opts)?;
    }
    let sentences = gold.len() as u64;
    Ok(BracketScore {
        sentences,
        matches: total.matches,
        parser_brackets: total.parser_brackets,
        corpus_brackets: total.corpus_brackets,
        precision: total.precision(),
        recall: total.recall(),
        crossings,
        mean_crossings: ratio(crossings, sentences),
    })
}
