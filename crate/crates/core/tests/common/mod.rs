//! Random GR generators and a brute-force alignment oracle shared by the
//! integration tests.

#![allow(dead_code)]

use greval_core::{
    compatible, Corpus, Genre, GrInstance, Lexeme, MatchPolicy, RelationKind, Sentence, Slot,
    SlotValue,
};
use rand::seq::SliceRandom;
use rand::Rng;

const TYPES: &[&str] = &["in", "to"];
const WORDS: &[&str] = &["a", "b", "c", "A"];
const INITIAL: &[RelationKind] = &[RelationKind::Obj, RelationKind::Subj, RelationKind::Dobj];

fn lexeme<R: Rng>(rng: &mut R, pool: &[&str]) -> SlotValue {
    let word = *pool.choose(rng).unwrap();
    let lexeme = if rng.gen_bool(0.2) {
        Lexeme::with_index(word, rng.gen_range(1..3)).unwrap()
    } else {
        Lexeme::new(word).unwrap()
    };
    SlotValue::Lexeme(lexeme)
}

/// A random valid GR over a tiny vocabulary, so that collisions are common.
pub fn random_gr<R: Rng>(rng: &mut R) -> GrInstance {
    let relation = *RelationKind::ALL.choose(rng).unwrap();
    let values = greval_core::signature_of(relation)
        .slots
        .iter()
        .map(|slot| match slot {
            Slot::Type if rng.gen_bool(0.4) => SlotValue::Unspecified,
            Slot::Type => lexeme(rng, TYPES),
            Slot::Head => lexeme(rng, WORDS),
            Slot::Dependent => match rng.gen_range(0..10) {
                0 => SlotValue::Unspecified,
                1 => SlotValue::Pro,
                _ => lexeme(rng, WORDS),
            },
            Slot::InitialGr if rng.gen_bool(0.6) => SlotValue::Unspecified,
            Slot::InitialGr => SlotValue::GrName(*INITIAL.choose(rng).unwrap()),
        })
        .collect();
    GrInstance::new(relation, values).unwrap()
}

pub fn random_grs<R: Rng>(rng: &mut R, max: usize) -> Vec<GrInstance> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| random_gr(rng)).collect()
}

/// A gold/predicted pair where the prediction is a noisy copy of the gold.
pub fn random_pair<R: Rng>(rng: &mut R, max: usize) -> (Vec<GrInstance>, Vec<GrInstance>) {
    let gold = random_grs(rng, max);
    let mut pred = Vec::new();
    for g in gold
        .iter()
        .filter(|_| rng.gen_bool(0.7))
        .collect::<Vec<_>>()
    {
        pred.push(if rng.gen_bool(0.3) {
            relabel(rng, g)
        } else {
            g.clone()
        });
    }
    while pred.len() < max && rng.gen_bool(0.4) {
        pred.push(random_gr(rng));
    }
    pred.shuffle(rng);
    (pred, gold)
}

/// Moves `gr` to a random ancestor whose signature has the same slots,
/// falling back to an unchanged copy.
fn relabel<R: Rng>(rng: &mut R, gr: &GrInstance) -> GrInstance {
    let candidates: Vec<RelationKind> = gr
        .relation()
        .ancestors()
        .into_iter()
        .filter(|a| greval_core::signature_of(*a).slots == gr.signature().slots)
        .collect();
    let relation = *candidates.choose(rng).unwrap();
    let mut values = gr.values().to_vec();
    if let Some(i) = gr.signature().position(Slot::Type) {
        if rng.gen_bool(0.5) {
            values[i] = SlotValue::Unspecified;
        }
    }
    GrInstance::new(relation, values).unwrap()
}

/// Random gold and predicted corpora over the same sentence ids.
pub fn random_corpora<R: Rng>(rng: &mut R, sentences: usize, max: usize) -> (Corpus, Corpus) {
    let mut pred = Vec::new();
    let mut gold = Vec::new();
    for i in 0..sentences {
        let genre = *Genre::ALL.choose(rng).unwrap();
        let (p, g) = random_pair(rng, max);
        pred.push(Sentence::new(format!("s{i}"), Some(genre), None, p).unwrap());
        gold.push(Sentence::new(format!("s{i}"), Some(genre), None, g).unwrap());
    }
    (Corpus::new(pred).unwrap(), Corpus::new(gold).unwrap())
}

pub fn random_corpus<R: Rng>(rng: &mut R, sentences: usize, max: usize) -> Corpus {
    let sentences = (0..sentences)
        .map(|i| {
            let genre = *Genre::ALL.choose(rng).unwrap();
            Sentence::new(format!("s{i}"), Some(genre), None, random_grs(rng, max)).unwrap()
        })
        .collect();
    Corpus::new(sentences).unwrap()
}

/// Best alignment found by enumerating every partial matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Oracle {
    pub cardinality: usize,
    pub exact: usize,
    /// (gold, pred) index pairs in gold order.
    pub pairs: Vec<(usize, usize)>,
}

/// Positions sorted by written form, ties by index.
fn sorted_positions(grs: &[GrInstance]) -> Vec<usize> {
    let mut keyed: Vec<(String, usize)> = grs.iter().map(|g| g.to_string()).zip(0..).collect();
    keyed.sort();
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// (pairs, exact pairs, paper-compatible pairs), compared lexicographically.
type Key = (usize, usize, usize);

pub fn brute_force(pred: &[GrInstance], gold: &[GrInstance], policy: MatchPolicy) -> Oracle {
    let pred_order = sorted_positions(pred);
    let gold_order = sorted_positions(gold);
    let sorted_pred: Vec<GrInstance> = pred_order.iter().map(|&i| pred[i].clone()).collect();
    let sorted_gold: Vec<GrInstance> = gold_order.iter().map(|&i| gold[i].clone()).collect();
    let best = brute_force_in_order(&sorted_pred, &sorted_gold, policy);
    let mut pairs: Vec<(usize, usize)> = best
        .pairs
        .iter()
        .map(|&(g, p)| (gold_order[g], pred_order[p]))
        .collect();
    pairs.sort();
    Oracle { pairs, ..best }
}

/// Enumeration with ties broken by plain (gold, pred) index order.
fn brute_force_in_order(pred: &[GrInstance], gold: &[GrInstance], policy: MatchPolicy) -> Oracle {
    struct Search<'a> {
        pred: &'a [GrInstance],
        gold: &'a [GrInstance],
        policy: MatchPolicy,
        used: Vec<bool>,
        current: Vec<(usize, usize)>,
        best: Option<(Key, Vec<(usize, usize)>)>,
    }

    impl Search<'_> {
        fn key(&self) -> Key {
            let exact = self
                .current
                .iter()
                .filter(|&&(g, p)| compatible(&self.pred[p], &self.gold[g], MatchPolicy::Strict))
                .count();
            let paper = self
                .current
                .iter()
                .filter(|&&(g, p)| compatible(&self.pred[p], &self.gold[g], MatchPolicy::Paper))
                .count();
            (self.current.len(), exact, paper)
        }

        fn run(&mut self, g: usize) {
            if g == self.gold.len() {
                let key = self.key();
                let better = match &self.best {
                    None => true,
                    Some((k, pairs)) => key > *k || (key == *k && self.current < *pairs),
                };
                if better {
                    self.best = Some((key, self.current.clone()));
                }
                return;
            }
            for p in 0..self.pred.len() {
                if !self.used[p] && compatible(&self.pred[p], &self.gold[g], self.policy) {
                    self.used[p] = true;
                    self.current.push((g, p));
                    self.run(g + 1);
                    self.current.pop();
                    self.used[p] = false;
                }
            }
            self.run(g + 1);
        }
    }

    let mut search = Search {
        pred,
        gold,
        policy,
        used: vec![false; pred.len()],
        current: Vec::new(),
        best: None,
    };
    search.run(0);
    let ((cardinality, exact, _), pairs) = search.best.unwrap();
    Oracle {
        cardinality,
        exact,
        pairs,
    }
}
