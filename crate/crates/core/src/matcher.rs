//! Compatibility between predicted and gold GRs, and per-sentence alignment.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::assignment::max_weight_matching;
use crate::gr::{signature_of, GrInstance, Slot};
use crate::relation::RelationKind;

/// Which relaxations of plain equality are in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchPolicy {
    /// Relation and every slot must be equal.
    Strict,
    /// Predicted `mod`, `subj` and `clausal` may stand for any gold
    /// descendant, and a predicted `_` type slot in the mod, iobj and
    /// clausal families matches any gold type.
    #[default]
    Paper,
    /// Any predicted relation matches the gold relations it subsumes and a
    /// predicted `_` matches anything in a shared slot.
    Hierarchical,
}

impl MatchPolicy {
    pub const ALL: [MatchPolicy; 3] = [
        MatchPolicy::Strict,
        MatchPolicy::Paper,
        MatchPolicy::Hierarchical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MatchPolicy::Strict => "strict",
            MatchPolicy::Paper => "paper",
            MatchPolicy::Hierarchical => "hierarchical",
        }
    }
}

impl fmt::Display for MatchPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown match policy '{0}' (expected strict, paper or hierarchical)")]
pub struct UnknownPolicy(pub String);

impl FromStr for MatchPolicy {
    type Err = UnknownPolicy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownPolicy(s.to_string()))
    }
}

fn relation_compatible(pred: RelationKind, gold: RelationKind, policy: MatchPolicy) -> bool {
    use RelationKind::*;
    match policy {
        MatchPolicy::Strict => pred == gold,
        MatchPolicy::Paper => {
            pred == gold || (matches!(pred, Mod | Subj | Clausal) && pred.subsumes(gold))
        }
        MatchPolicy::Hierarchical => pred.subsumes(gold),
    }
}

/// Whether a predicted `_` in `slot` of `pred` acts as a wildcard.
fn wildcards(slot: Slot, pred: RelationKind, policy: MatchPolicy) -> bool {
    use RelationKind::*;
    match policy {
        MatchPolicy::Strict => false,
        MatchPolicy::Paper => {
            slot == Slot::Type && (Mod.subsumes(pred) || Clausal.subsumes(pred) || pred == Iobj)
        }
        MatchPolicy::Hierarchical => true,
    }
}

const SLOT_ORDER: [Slot; 4] = [Slot::Type, Slot::Head, Slot::Dependent, Slot::InitialGr];

/// Whether `pred` may be credited with `gold` under `policy`.
pub fn compatible(pred: &GrInstance, gold: &GrInstance, policy: MatchPolicy) -> bool {
    if !relation_compatible(pred.relation(), gold.relation(), policy) {
        return false;
    }
    let pred_sig = signature_of(pred.relation());
    let gold_sig = signature_of(gold.relation());
    SLOT_ORDER.iter().all(|&slot| {
        let p = pred_sig.position(slot).map(|i| &pred.values()[i]);
        let g = gold_sig.position(slot).map(|i| &gold.values()[i]);
        match (p, g) {
            (Some(p), Some(g)) => {
                p.matches(g) || (p.is_unspecified() && wildcards(slot, pred.relation(), policy))
            }
            (None, Some(g)) => g.is_unspecified(),
            (Some(p), None) => p.is_unspecified(),
            (None, None) => true,
        }
    })
}

/// Exact (strict) match.
pub fn exact(pred: &GrInstance, gold: &GrInstance) -> bool {
    compatible(pred, gold, MatchPolicy::Strict)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlignedPair {
    /// Index into the predicted GR list.
    pub pred: usize,
    /// Index into the gold GR list.
    pub gold: usize,
    pub exact: bool,
}

/// A one-to-one pairing of predicted and gold GR occurrences, sorted by
/// gold index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Alignment {
    pub pairs: Vec<AlignedPair>,
}

impl Alignment {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn exact_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.exact).count()
    }
}

/// How closely a compatible pair matches; compared after cardinality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Edge {
    exact: bool,
    /// Also compatible under the `paper` relaxations. Only distinguishes
    /// pairs under `hierarchical`; keeps per-relation counts monotone in the
    /// policy.
    paper: bool,
}

struct Problem {
    /// `edges[g][p]`: `None` if incompatible.
    edges: Vec<Vec<Option<Edge>>>,
    /// Weight tiers: any pair outweighs all exact bonuses, and any exact
    /// bonus outweighs all paper bonuses.
    pair_weight: i64,
    exact_weight: i64,
}

impl Problem {
    fn new(edges: Vec<Vec<Option<Edge>>>, max_pairs: usize) -> Self {
        let n = max_pairs as i64 + 1;
        Problem {
            edges,
            pair_weight: n * n,
            exact_weight: n,
        }
    }

    fn weight(&self, g: usize, p: usize) -> i64 {
        match self.edges[g][p] {
            None => 0,
            Some(e) => {
                self.pair_weight + self.exact_weight * i64::from(e.exact) + i64::from(e.paper)
            }
        }
    }

    /// Optimum over the given remaining golds and preds; returns the value and
    /// the gold→pred assignment in original indices.
    fn solve(&self, golds: &[usize], preds: &[usize]) -> (i64, Vec<(usize, usize)>) {
        let w: Vec<Vec<i64>> = golds
            .iter()
            .map(|&g| preds.iter().map(|&p| self.weight(g, p)).collect())
            .collect();
        let (total, assignment) = max_weight_matching(&w);
        let pairs = assignment
            .iter()
            .enumerate()
            .filter_map(|(gi, pi)| pi.map(|pi| (golds[gi], preds[pi])))
            .collect();
        (total, pairs)
    }
}

/// Indices of `grs` sorted by written form, ties kept in input order.
pub fn canonical_order(grs: &[GrInstance]) -> Vec<usize> {
    let keys: Vec<String> = grs.iter().map(|g| g.to_string()).collect();
    let mut order: Vec<usize> = (0..grs.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    order
}

/// Aligns predicted and gold GRs of one sentence.
///
/// The result is a maximum-cardinality matching of compatible pairs. Among
/// those it has the most exact pairs, then the most pairs that are also
/// compatible under [`MatchPolicy::Paper`]. Remaining ties go to the
/// lexicographically smallest list of (gold, pred) positions in
/// [`canonical_order`], so reordering the input lines can only swap
/// identical GRs and never changes a score.
pub fn align_sentence(pred: &[GrInstance], gold: &[GrInstance], policy: MatchPolicy) -> Alignment {
    let pred_order = canonical_order(pred);
    let gold_order = canonical_order(gold);
    let edges: Vec<Vec<Option<Edge>>> = gold_order
        .iter()
        .map(|&gi| {
            let g = &gold[gi];
            pred_order
                .iter()
                .map(|&pi| {
                    let p = &pred[pi];
                    compatible(p, g, policy).then(|| Edge {
                        exact: exact(p, g),
                        paper: compatible(p, g, MatchPolicy::Paper),
                    })
                })
                .collect()
        })
        .collect();
    let problem = Problem::new(edges, pred.len().min(gold.len()));

    let all_golds: Vec<usize> = (0..gold.len()).collect();
    let mut free_preds: Vec<usize> = (0..pred.len()).collect();
    let (target, first) = problem.solve(&all_golds, &free_preds);
    if target == 0 {
        return Alignment::default();
    }
    let mut partner: Vec<Option<usize>> = vec![None; gold.len()];
    for (g, p) in first {
        partner[g] = Some(p);
    }

    let mut fixed = 0i64;
    let mut pairs = Vec::new();
    for g in 0..gold.len() {
        let rest: Vec<usize> = (g + 1..gold.len()).collect();
        let mut chosen = None;
        for &p in free_preds
            .iter()
            .filter(|&&p| problem.edges[g][p].is_some())
        {
            if partner[g] == Some(p) {
                chosen = Some(p);
                break;
            }
            let others: Vec<usize> = free_preds.iter().copied().filter(|&q| q != p).collect();
            let (value, sub) = problem.solve(&rest, &others);
            if fixed + problem.weight(g, p) + value == target {
                for &r in &rest {
                    partner[r] = None;
                }
                for (r, q) in sub {
                    partner[r] = Some(q);
                }
                chosen = Some(p);
                break;
            }
        }
        if let Some(p) = chosen {
            fixed += problem.weight(g, p);
            free_preds.retain(|&q| q != p);
            pairs.push(AlignedPair {
                pred: pred_order[p],
                gold: gold_order[g],
                exact: problem.edges[g][p].is_some_and(|e| e.exact),
            });
        }
    }
    debug_assert_eq!(fixed, target);
    pairs.sort_by_key(|pair| pair.gold);
    Alignment { pairs }
}
