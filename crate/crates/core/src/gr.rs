//! Slot signatures, lexemes and grammatical relation instances.

use std::fmt;
use std::num::NonZeroU32;

use thiserror::Error;

use crate::relation::RelationKind;

/// Named argument position of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Type,
    Head,
    Dependent,
    InitialGr,
}

impl Slot {
    pub fn name(self) -> &'static str {
        match self {
            Slot::Type => "type",
            Slot::Head => "head",
            Slot::Dependent => "dependent",
            Slot::InitialGr => "initial_gr",
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const TYPED: &[Slot] = &[Slot::Type, Slot::Head, Slot::Dependent];
const TYPED_WITH_INITIAL: &[Slot] = &[Slot::Type, Slot::Head, Slot::Dependent, Slot::InitialGr];
const WITH_INITIAL: &[Slot] = &[Slot::Head, Slot::Dependent, Slot::InitialGr];
const BARE: &[Slot] = &[Slot::Head, Slot::Dependent];

/// Ordered slot layout of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotSignature {
    pub relation: RelationKind,
    pub slots: &'static [Slot],
}

impl SlotSignature {
    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    pub fn position(&self, slot: Slot) -> Option<usize> {
        self.slots.iter().position(|&s| s == slot)
    }

    pub fn has(&self, slot: Slot) -> bool {
        self.position(slot).is_some()
    }
}

/// Slot layout of `relation`.
///
/// The generic relations `dependent`, `arg`, `comp`, `obj` and `obj2` carry
/// only head and dependent.
pub fn signature_of(relation: RelationKind) -> SlotSignature {
    use RelationKind::*;
    let slots = match relation {
        Mod | Ncmod | Xmod | Cmod | Clausal | Xcomp | Ccomp | Iobj => TYPED,
        ArgMod => TYPED_WITH_INITIAL,
        Subj | Ncsubj | Xsubj | Csubj | Dobj | SubjOrDobj => WITH_INITIAL,
        Dependent | Arg | Comp | Obj | Obj2 => BARE,
    };
    SlotSignature { relation, slots }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrError {
    #[error("{relation} requires {expected} slots, found {found}")]
    Arity {
        relation: RelationKind,
        expected: usize,
        found: usize,
    },
    #[error("Pro is only allowed in the dependent slot (found in {slot} slot of {relation})")]
    ProOutsideDependent { relation: RelationKind, slot: Slot },
    #[error("relation name '{name}' is only allowed in the initial_gr slot (found in {slot} slot of {relation})")]
    GrNameOutsideInitialGr {
        relation: RelationKind,
        slot: Slot,
        name: RelationKind,
    },
    #[error("initial_gr slot of {relation} must hold a relation name or '_'")]
    LexemeInInitialGr { relation: RelationKind },
    #[error("head slot of {relation} must be a lexeme")]
    HeadNotLexeme { relation: RelationKind },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed lexeme '{0}'")]
pub struct MalformedLexeme(pub String);

/// A lemma with an optional 1-based token position.
///
/// The lemma is stored as written. Matching via [`Lexeme::matches`] ignores
/// case and only compares indices when both sides carry one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lexeme {
    lemma: String,
    index: Option<NonZeroU32>,
}

fn valid_lemma(s: &str) -> bool {
    !s.is_empty()
        && s != "Pro"
        && s != "_"
        && !s
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ','))
}

impl Lexeme {
    pub fn new(lemma: impl Into<String>) -> Result<Self, MalformedLexeme> {
        let lemma = lemma.into();
        if valid_lemma(&lemma) {
            Ok(Lexeme { lemma, index: None })
        } else {
            Err(MalformedLexeme(lemma))
        }
    }

    pub fn with_index(lemma: impl Into<String>, index: u32) -> Result<Self, MalformedLexeme> {
        let mut lexeme = Self::new(lemma)?;
        lexeme.index = Some(
            NonZeroU32::new(index).ok_or_else(|| MalformedLexeme(format!("{}:0", lexeme.lemma)))?,
        );
        Ok(lexeme)
    }

    /// Parses the surface form `lemma` or `lemma:N`.
    pub fn parse(token: &str) -> Result<Self, MalformedLexeme> {
        if let Some((lemma, digits)) = token.rsplit_once(':') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let index: u32 = digits
                    .parse()
                    .map_err(|_| MalformedLexeme(token.to_string()))?;
                return Self::with_index(lemma, index)
                    .map_err(|_| MalformedLexeme(token.to_string()));
            }
        }
        Self::new(token)
    }

    pub fn lemma(&self) -> &str {
        &self.lemma
    }

    pub fn index(&self) -> Option<u32> {
        self.index.map(NonZeroU32::get)
    }

    pub fn has_uppercase(&self) -> bool {
        self.lemma.chars().any(char::is_uppercase)
    }

    pub fn matches(&self, other: &Lexeme) -> bool {
        let lemma_eq =
            self.lemma == other.lemma || self.lemma.to_lowercase() == other.lemma.to_lowercase();
        match (self.index, other.index) {
            (Some(a), Some(b)) => lemma_eq && a == b,
            _ => lemma_eq,
        }
    }

    /// Returns a copy with the lemma replaced, keeping the index.
    pub fn with_lemma(&self, lemma: impl Into<String>) -> Result<Self, MalformedLexeme> {
        let mut lexeme = Self::new(lemma)?;
        lexeme.index = self.index;
        Ok(lexeme)
    }
}

impl fmt::Display for Lexeme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}:{}", self.lemma, i),
            None => f.write_str(&self.lemma),
        }
    }
}

/// Reduces a (possibly multi-word) base-form sequence to a single head lemma:
/// the final token, lowercased.
pub fn normalize_lexeme<S: AsRef<str>>(tokens: &[S]) -> Result<Lexeme, MalformedLexeme> {
    let last = tokens
        .last()
        .ok_or_else(|| MalformedLexeme(String::new()))?
        .as_ref();
    Lexeme::new(last.to_lowercase())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SlotValue {
    Lexeme(Lexeme),
    /// Written `_`.
    Unspecified,
    /// An argument that is not lexically realised.
    Pro,
    /// A relation name; only legal in the initial_gr slot.
    GrName(RelationKind),
}

impl SlotValue {
    pub fn lexeme(token: &str) -> Result<Self, MalformedLexeme> {
        Lexeme::parse(token).map(SlotValue::Lexeme)
    }

    pub fn is_unspecified(&self) -> bool {
        matches!(self, SlotValue::Unspecified)
    }

    pub fn as_lexeme(&self) -> Option<&Lexeme> {
        match self {
            SlotValue::Lexeme(l) => Some(l),
            _ => None,
        }
    }

    /// Value equality used for matching: lexemes compare through
    /// [`Lexeme::matches`], everything else structurally.
    pub fn matches(&self, other: &SlotValue) -> bool {
        match (self, other) {
            (SlotValue::Lexeme(a), SlotValue::Lexeme(b)) => a.matches(b),
            (a, b) => a == b,
        }
    }
}

impl fmt::Display for SlotValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotValue::Lexeme(l) => l.fmt(f),
            SlotValue::Unspecified => f.write_str("_"),
            SlotValue::Pro => f.write_str("Pro"),
            SlotValue::GrName(r) => f.write_str(r.name()),
        }
    }
}

/// A single grammatical relation, e.g. `ncsubj(acquire, it, obj)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrInstance {
    relation: RelationKind,
    values: Vec<SlotValue>,
}

impl GrInstance {
    pub fn new(relation: RelationKind, values: Vec<SlotValue>) -> Result<Self, GrError> {
        let signature = signature_of(relation);
        if values.len() != signature.arity() {
            return Err(GrError::Arity {
                relation,
                expected: signature.arity(),
                found: values.len(),
            });
        }
        for (&slot, value) in signature.slots.iter().zip(&values) {
            match (slot, value) {
                (Slot::Head, SlotValue::Lexeme(_)) => {}
                (Slot::Head, SlotValue::Pro) => {
                    return Err(GrError::ProOutsideDependent { relation, slot })
                }
                (Slot::Head, SlotValue::GrName(name)) => {
                    return Err(GrError::GrNameOutsideInitialGr {
                        relation,
                        slot,
                        name: *name,
                    })
                }
                (Slot::Head, SlotValue::Unspecified) => {
                    return Err(GrError::HeadNotLexeme { relation })
                }
                (Slot::InitialGr, SlotValue::GrName(_) | SlotValue::Unspecified) => {}
                (Slot::InitialGr, SlotValue::Pro) => {
                    return Err(GrError::ProOutsideDependent { relation, slot })
                }
                (Slot::InitialGr, SlotValue::Lexeme(_)) => {
                    return Err(GrError::LexemeInInitialGr { relation })
                }
                (Slot::Dependent, SlotValue::Pro) => {}
                (_, SlotValue::Pro) => return Err(GrError::ProOutsideDependent { relation, slot }),
                (_, SlotValue::GrName(name)) => {
                    return Err(GrError::GrNameOutsideInitialGr {
                        relation,
                        slot,
                        name: *name,
                    })
                }
                (Slot::Type | Slot::Dependent, SlotValue::Lexeme(_) | SlotValue::Unspecified) => {}
            }
        }
        Ok(GrInstance { relation, values })
    }

    pub fn relation(&self) -> RelationKind {
        self.relation
    }

    pub fn signature(&self) -> SlotSignature {
        signature_of(self.relation)
    }

    pub fn values(&self) -> &[SlotValue] {
        &self.values
    }

    pub fn get(&self, slot: Slot) -> Option<&SlotValue> {
        self.signature().position(slot).map(|i| &self.values[i])
    }

    pub fn head(&self) -> &Lexeme {
        self.get(Slot::Head)
            .and_then(SlotValue::as_lexeme)
            .expect("validated instance always has a lexeme head")
    }

    /// Rewrites every lexeme through `f`, re-validating the result.
    pub fn map_lexemes<F>(&self, mut f: F) -> Result<Self, MalformedLexeme>
    where
        F: FnMut(&Lexeme) -> Result<Lexeme, MalformedLexeme>,
    {
        let values = self
            .values
            .iter()
            .map(|v| match v {
                SlotValue::Lexeme(l) => f(l).map(SlotValue::Lexeme),
                other => Ok(other.clone()),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GrInstance {
            relation: self.relation,
            values,
        })
    }
}

impl fmt::Display for GrInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}
