//! The grammatical relation inventory and its subsumption hierarchy.
//!
//! The hierarchy is a rooted DAG rather than a tree: `subj` sits under both
//! `arg` and `subj_or_dobj`, and `dobj` under both `obj` and `subj_or_dobj`.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// One of the relation names of the annotation scheme.
///
/// Variants are declared in report order (depth-first over the hierarchy),
/// so the derived `Ord` sorts rows the way frequency and accuracy tables
/// print them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationKind {
    Dependent,
    Mod,
    Ncmod,
    Xmod,
    Cmod,
    ArgMod,
    Arg,
    Subj,
    Ncsubj,
    Xsubj,
    Csubj,
    SubjOrDobj,
    Comp,
    Obj,
    Dobj,
    Obj2,
    Iobj,
    Clausal,
    Xcomp,
    Ccomp,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown relation '{0}'")]
pub struct UnknownRelation(pub String);

impl RelationKind {
    /// Every relation, in report order.
    pub const ALL: [RelationKind; 20] = [
        RelationKind::Dependent,
        RelationKind::Mod,
        RelationKind::Ncmod,
        RelationKind::Xmod,
        RelationKind::Cmod,
        RelationKind::ArgMod,
        RelationKind::Arg,
        RelationKind::Subj,
        RelationKind::Ncsubj,
        RelationKind::Xsubj,
        RelationKind::Csubj,
        RelationKind::SubjOrDobj,
        RelationKind::Comp,
        RelationKind::Obj,
        RelationKind::Dobj,
        RelationKind::Obj2,
        RelationKind::Iobj,
        RelationKind::Clausal,
        RelationKind::Xcomp,
        RelationKind::Ccomp,
    ];

    pub const COUNT: usize = Self::ALL.len();

    pub const ROOT: RelationKind = RelationKind::Dependent;

    pub fn name(self) -> &'static str {
        use RelationKind::*;
        match self {
            Dependent => "dependent",
            Mod => "mod",
            Ncmod => "ncmod",
            Xmod => "xmod",
            Cmod => "cmod",
            ArgMod => "arg_mod",
            Arg => "arg",
            Subj => "subj",
            Ncsubj => "ncsubj",
            Xsubj => "xsubj",
            Csubj => "csubj",
            SubjOrDobj => "subj_or_dobj",
            Comp => "comp",
            Obj => "obj",
            Dobj => "dobj",
            Obj2 => "obj2",
            Iobj => "iobj",
            Clausal => "clausal",
            Xcomp => "xcomp",
            Ccomp => "ccomp",
        }
    }

    /// Position in [`RelationKind::ALL`]; usable as a dense array index.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Immediate children in the hierarchy.
    pub fn children(self) -> &'static [RelationKind] {
        use RelationKind::*;
        match self {
            Dependent => &[Mod, ArgMod, Arg],
            Mod => &[Ncmod, Xmod, Cmod],
            Arg => &[SubjOrDobj, Subj, Comp],
            SubjOrDobj => &[Subj, Dobj],
            Subj => &[Ncsubj, Xsubj, Csubj],
            Comp => &[Obj, Clausal],
            Obj => &[Dobj, Obj2, Iobj],
            Clausal => &[Xcomp, Ccomp],
            Ncmod | Xmod | Cmod | ArgMod | Ncsubj | Xsubj | Csubj | Dobj | Obj2 | Iobj | Xcomp
            | Ccomp => &[],
        }
    }

    /// Immediate parents, in report order. Empty only for the root.
    pub fn parents(self) -> Vec<RelationKind> {
        Self::ALL
            .iter()
            .copied()
            .filter(|p| p.children().contains(&self))
            .collect()
    }

    pub fn is_leaf(self) -> bool {
        self.children().is_empty()
    }

    /// Reflexive-transitive closure of the child edges.
    pub fn subsumes(self, descendant: RelationKind) -> bool {
        self == descendant
            || self
                .children()
                .iter()
                .any(|child| child.subsumes(descendant))
    }

    /// The relation together with everything it subsumes, in report order.
    pub fn cone(self) -> Vec<RelationKind> {
        Self::ALL
            .iter()
            .copied()
            .filter(|&r| self.subsumes(r))
            .collect()
    }

    /// Every relation that subsumes this one (itself included), in report order.
    pub fn ancestors(self) -> Vec<RelationKind> {
        Self::ALL
            .iter()
            .copied()
            .filter(|&r| r.subsumes(self))
            .collect()
    }

    /// Indentation level used when rendering hierarchy-shaped tables.
    pub fn display_depth(self) -> usize {
        use RelationKind::*;
        match self {
            Dependent => 0,
            Mod | ArgMod | Arg => 1,
            Ncmod | Xmod | Cmod | Subj | SubjOrDobj | Comp => 2,
            Ncsubj | Xsubj | Csubj | Obj | Clausal => 3,
            Dobj | Obj2 | Iobj | Xcomp | Ccomp => 4,
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationKind {
    type Err = UnknownRelation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|r| r.name() == s)
            .ok_or_else(|| UnknownRelation(s.to_string()))
    }
}

impl Serialize for RelationKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::RelationKind::*;
    use super::*;

    #[test]
    fn names_are_unique_and_round_trip() {
        let mut names: Vec<_> = RelationKind::ALL.iter().map(|r| r.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), RelationKind::COUNT);
        for r in RelationKind::ALL {
            assert_eq!(r.name().parse::<RelationKind>().unwrap(), r);
            assert_eq!(RelationKind::ALL[r.index()], r);
        }
        assert!("subject".parse::<RelationKind>().is_err());
    }

    #[test]
    fn subsumption_examples() {
        assert!(Dependent.subsumes(Ccomp));
        assert!(Ncsubj.subsumes(Ncsubj));
        assert!(SubjOrDobj.subsumes(Dobj));
        assert!(!SubjOrDobj.subsumes(Iobj));
        assert!(SubjOrDobj.subsumes(Ncsubj));
        assert!(!Mod.subsumes(ArgMod));
        assert!(!Ncsubj.subsumes(Subj));
    }

    #[test]
    fn cone_examples() {
        assert_eq!(Mod.cone(), vec![Mod, Ncmod, Xmod, Cmod]);
        assert_eq!(Ccomp.cone(), vec![Ccomp]);
        assert_eq!(Obj.cone(), vec![Obj, Dobj, Obj2, Iobj]);
        assert_eq!(Dependent.cone().len(), RelationKind::COUNT);
        assert_eq!(
            SubjOrDobj.cone(),
            vec![Subj, Ncsubj, Xsubj, Csubj, SubjOrDobj, Dobj]
        );
    }

    #[test]
    fn subsumption_is_a_partial_order() {
        for a in RelationKind::ALL {
            assert!(a.subsumes(a));
            for b in RelationKind::ALL {
                if a != b && a.subsumes(b) {
                    assert!(!b.subsumes(a), "{a} and {b} subsume each other");
                }
                for c in RelationKind::ALL {
                    if a.subsumes(b) && b.subsumes(c) {
                        assert!(a.subsumes(c));
                    }
                }
            }
        }
    }

    #[test]
    fn every_relation_is_in_its_parents_cones() {
        for r in RelationKind::ALL {
            for p in r.parents() {
                assert!(p.cone().contains(&r));
            }
        }
    }

    #[test]
    fn dag_shape() {
        let multi: Vec<_> = RelationKind::ALL
            .iter()
            .copied()
            .filter(|r| r.parents().len() > 1)
            .collect();
        assert_eq!(multi, vec![Subj, Dobj]);
        assert_eq!(Subj.parents(), vec![Arg, SubjOrDobj]);
        assert_eq!(Dobj.parents(), vec![SubjOrDobj, Obj]);
        let roots: Vec<_> = RelationKind::ALL
            .iter()
            .copied()
            .filter(|r| r.parents().is_empty())
            .collect();
        assert_eq!(roots, vec![Dependent]);
        assert!(RelationKind::ALL.iter().all(|r| r.parents().len() <= 2));
    }

    #[test]
    fn ancestors_mirror_cones() {
        for a in RelationKind::ALL {
            for d in RelationKind::ALL {
                assert_eq!(a.cone().contains(&d), d.ancestors().contains(&a));
            }
        }
    }
}
