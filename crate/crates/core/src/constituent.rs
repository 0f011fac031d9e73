//! Constituents of a family of conditional events: classes of worlds that
//! agree on every tracked truth value and every tracked quantity's value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::compound::Crq;
use crate::event::{describe_worlds, ConditionalEvent, EventExpr, TruthValue, Universe, World, WorldSet};
use crate::symbolic::SymbolicValue;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constituent {
    pub id: usize,
    /// The literal conjunction of the least world of the class.
    pub representative: EventExpr,
    /// A short description of the whole class.
    pub description: EventExpr,
    pub truth: Vec<TruthValue>,
    pub values: Vec<SymbolicValue>,
    /// Every antecedent of the family is false here.
    pub all_void: bool,
    pub worlds: Vec<World>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstituentReport {
    pub id: usize,
    pub constituent: String,
    pub truth: Vec<TruthValue>,
    pub values: Vec<String>,
    pub all_void: bool,
}

impl Constituent {
    pub fn report(&self) -> ConstituentReport {
        ConstituentReport {
            id: self.id,
            constituent: self.description.to_string(),
            truth: self.truth.clone(),
            values: self.values.iter().map(|v| v.to_string()).collect(),
            all_void: self.all_void,
        }
    }
}

/// Enumerates the worlds over all atoms involved and groups them by truth
/// vector over `family` and value vector over `quantities`, in order of
/// their least world.
pub fn constituents(family: &[ConditionalEvent], quantities: &[Crq]) -> Vec<Constituent> {
    assert!(!family.is_empty(), "family must be nonempty");
    let universe = family
        .iter()
        .map(|c| c.universe())
        .chain(quantities.iter().map(|q| q.universe().clone()))
        .fold(Universe::default(), |u, v| u.union(&v));
    let lifted: Vec<Crq> = quantities.iter().map(|q| q.lift(&universe)).collect();
    let mut groups: BTreeMap<(Vec<TruthValue>, Vec<SymbolicValue>), Vec<World>> = BTreeMap::new();
    for w in universe.worlds() {
        let truth = family.iter().map(|c| c.truth_at(&universe, w)).collect();
        let values = lifted.iter().map(|q| q.value_at(w).clone()).collect();
        groups.entry((truth, values)).or_default().push(w);
    }
    let mut out: Vec<Constituent> = groups
        .into_iter()
        .map(|((truth, values), worlds)| Constituent {
            id: 0,
            representative: universe.world_literal(worlds[0]),
            description: describe_worlds(&universe, &WorldSet::from_worlds(&universe, &worlds)),
            all_void: truth.iter().all(|t| *t == TruthValue::Void),
            truth,
            values,
            worlds,
        })
        .collect();
    out.sort_by_key(|c| c.worlds[0]);
    for (i, c) in out.iter_mut().enumerate() {
        c.id = i + 1;
    }
    out
}
