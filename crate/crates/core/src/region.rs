//! Existence of coherent assessments on conditional events subject to
//! equality and (possibly strict) inequality constraints.
//!
//! A coherent assessment on finitely many conditional events is the
//! restriction of a layered model: probability distributions π₁, π₂, … where
//! each event is resolved by the first layer giving its antecedent positive
//! mass. The search runs over ordered partitions of the events; each layer is
//! one exact LP. Strict constraints need no epsilon because every layer
//! system is homogeneous and can be rescaled.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;

use crate::event::{ConditionalEvent, Universe, WorldSet};
use crate::rational::{fmt_rational, int, one, zero, Rational};
use crate::simplex::{LinearProgram, Relation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Eq(Rational),
    Le(Rational),
    Lt(Rational),
    Ge(Rational),
    Gt(Rational),
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constrained {
    pub event: ConditionalEvent,
    pub bound: Bound,
}

impl Constrained {
    pub fn new(event: ConditionalEvent, bound: Bound) -> Self {
        Constrained { event, bound }
    }
}

impl fmt::Display for Constrained {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (op, v) = match &self.bound {
            Bound::Eq(v) => ("=", v),
            Bound::Le(v) => ("<=", v),
            Bound::Lt(v) => ("<", v),
            Bound::Ge(v) => (">=", v),
            Bound::Gt(v) => (">", v),
            Bound::Free => return write!(f, "P({}) free", self.event),
        };
        write!(f, "P({}) {op} {}", self.event, fmt_rational(v))
    }
}

struct Layering {
    universe: Universe,
    antecedents: Vec<WorldSet>,
    trues: Vec<WorldSet>,
    bounds: Vec<Bound>,
}

impl Layering {
    fn layer_feasible(&self, resolve: u32, remaining: u32) -> bool {
        let later = remaining & !resolve;
        let members = |mask: u32| (0..self.bounds.len()).filter(move |i| mask & (1 << i) != 0);
        let worlds: Vec<u32> = self
            .universe
            .worlds()
            .filter(|&w| {
                members(resolve).any(|i| self.antecedents[i].contains(w))
                    && !members(later).any(|j| self.antecedents[j].contains(w))
            })
            .collect();
        if worlds.is_empty() {
            return false;
        }
        let mut lp = LinearProgram::new(worlds.len());
        for i in members(resolve) {
            let h: Vec<Rational> =
                worlds.iter().map(|&w| if self.antecedents[i].contains(w) { one() } else { zero() }).collect();
            lp.ge(h.clone(), one());
            let ratio = |p: &Rational| -> Vec<Rational> {
                worlds
                    .iter()
                    .zip(&h)
                    .map(|(&w, hw)| {
                        let t = if self.trues[i].contains(w) { one() } else { zero() };
                        t - p * hw
                    })
                    .collect()
            };
            match &self.bounds[i] {
                Bound::Eq(p) => lp.constrain(ratio(p), Relation::Eq, zero()),
                Bound::Le(p) => lp.constrain(ratio(p), Relation::Le, zero()),
                Bound::Lt(p) => lp.constrain(ratio(p), Relation::Le, int(-1)),
                Bound::Ge(p) => lp.constrain(ratio(p), Relation::Ge, zero()),
                Bound::Gt(p) => lp.constrain(ratio(p), Relation::Ge, one()),
                Bound::Free => &mut lp,
            };
        }
        lp.is_feasible()
    }

    fn search(&self, remaining: u32, memo: &mut HashMap<u32, bool>) -> bool {
        if remaining == 0 {
            return true;
        }
        if let Some(&known) = memo.get(&remaining) {
            return known;
        }
        let mut found = false;
        let mut sub = remaining;
        while !sub.is_zero() {
            if self.layer_feasible(sub, remaining) && self.search(remaining & !sub, memo) {
                found = true;
                break;
            }
            sub = (sub - 1) & remaining;
        }
        memo.insert(remaining, found);
        found
    }
}

/// True when some coherent assessment on the events meets every constraint.
pub fn has_model(items: &[Constrained]) -> bool {
    assert!(items.len() < 32, "too many constrained events");
    let universe = items.iter().fold(Universe::default(), |u, c| u.union(&c.event.universe()));
    let layering = Layering {
        antecedents: items.iter().map(|c| c.event.antecedent().truth_set(&universe)).collect(),
        trues: items.iter().map(|c| c.event.true_event().truth_set(&universe)).collect(),
        bounds: items.iter().map(|c| c.bound.clone()).collect(),
        universe,
    };
    layering.search((1u32 << items.len()) - 1, &mut HashMap::new())
}
