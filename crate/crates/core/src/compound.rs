//! Conditional random quantities: indicators of conditional events,
//! conjunctions of two and three conditionals, and iterated conditionals.
//!
//! A [`Crq`] stores one symbolic value per world of its universe. On worlds
//! where its conditioning event is false the value is its own prevision symbol
//! (a called-off bet returns the amount paid).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{describe_worlds, gn_implies, ConditionalEvent, EventExpr, TruthValue, Universe, World, WorldSet};
use crate::rational::Rational;
use crate::symbolic::{Symbol, SymbolicValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompoundError {
    #[error("iterated conditional `{0}` is trivial: its antecedent is identically 0")]
    TrivialIterated(String),
    #[error("`{0}` does not imply `{1}` in the Goodman-Nguyen order")]
    NotGnImplied(String, String),
    #[error("conjunctions of {0} conditionals are not supported (at most 3)")]
    UnsupportedArity(usize),
    #[error("empty family")]
    EmptyFamily,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crq {
    universe: Universe,
    family: Vec<ConditionalEvent>,
    conditioning: EventExpr,
    values: Vec<SymbolicValue>,
    prevision: Symbol,
    label: String,
}

/// One displayed row of a table: the worlds sharing a value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub constituent: EventExpr,
    pub value: SymbolicValue,
    pub worlds: Vec<World>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRowReport {
    pub constituent: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub quantity: String,
    pub prevision: String,
    pub conditioning: String,
    pub rows: Vec<TableRowReport>,
}

impl Crq {
    /// Builds a quantity from a value function. Worlds outside `conditioning`
    /// always get the prevision symbol, whatever `f` returns.
    pub fn from_fn(
        universe: Universe,
        family: Vec<ConditionalEvent>,
        conditioning: EventExpr,
        prevision: Symbol,
        label: String,
        f: impl Fn(World) -> SymbolicValue,
    ) -> Crq {
        let values = universe
            .worlds()
            .map(|w| if conditioning.holds(&universe, w) { f(w) } else { SymbolicValue::symbol(&prevision) })
            .collect();
        Crq { universe, family, conditioning, values, prevision, label }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// The conditional events whose truth values index the table.
    pub fn family(&self) -> &[ConditionalEvent] {
        &self.family
    }

    pub fn conditioning(&self) -> &EventExpr {
        &self.conditioning
    }

    pub fn prevision(&self) -> &Symbol {
        &self.prevision
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value_at(&self, w: World) -> &SymbolicValue {
        &self.values[w as usize]
    }

    pub fn values(&self) -> &[SymbolicValue] {
        &self.values
    }

    pub fn conditioning_holds(&self, w: World) -> bool {
        self.conditioning.holds(&self.universe, w)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Crq {
        self.label = label.into();
        self
    }

    /// Renames the prevision symbol everywhere in the table.
    pub fn with_prevision(mut self, s: Symbol) -> Crq {
        let to = SymbolicValue::symbol(&s);
        self.values = self.values.iter().map(|v| v.substitute(&self.prevision, &to)).collect();
        self.prevision = s;
        self
    }

    pub fn symbols(&self) -> std::collections::BTreeSet<Symbol> {
        self.values.iter().flat_map(|v| v.symbols()).collect()
    }

    pub fn substitute(&self, s: &Symbol, with: &SymbolicValue) -> Crq {
        let mut out = self.clone();
        out.values = self.values.iter().map(|v| v.substitute(s, with)).collect();
        out
    }

    pub fn bind(&self, bindings: &BTreeMap<Symbol, Rational>) -> Crq {
        let mut out = self.clone();
        out.values = self.values.iter().map(|v| v.bind(bindings)).collect();
        out
    }

    /// Re-expresses the quantity over a larger universe.
    pub fn lift(&self, universe: &Universe) -> Crq {
        assert!(universe.contains(&self.universe), "lift target must contain every atom");
        if universe == &self.universe {
            return self.clone();
        }
        let values = universe
            .worlds()
            .map(|w| self.values[universe.project(w, &self.universe) as usize].clone())
            .collect();
        Crq {
            universe: universe.clone(),
            family: self.family.clone(),
            conditioning: self.conditioning.clone(),
            values,
            prevision: self.prevision.clone(),
            label: self.label.clone(),
        }
    }

    /// Rows grouped by value, in table order.
    pub fn table(&self) -> Vec<TableRow> {
        let mut groups: BTreeMap<SymbolicValue, Vec<World>> = BTreeMap::new();
        for w in self.universe.worlds() {
            groups.entry(self.values[w as usize].clone()).or_default().push(w);
        }
        let own = SymbolicValue::symbol(&self.prevision);
        let mut rows: Vec<TableRow> = groups
            .into_iter()
            .map(|(value, worlds)| TableRow {
                constituent: describe_worlds(&self.universe, &WorldSet::from_worlds(&self.universe, &worlds)),
                value,
                worlds,
            })
            .collect();
        // the called-off row goes last, as in displayed tables
        rows.sort_by_key(|r| r.value == own);
        rows
    }

    pub fn table_report(&self) -> TableReport {
        TableReport {
            quantity: self.label.clone(),
            prevision: self.prevision.to_string(),
            conditioning: describe_worlds(&self.universe, &self.conditioning.truth_set(&self.universe)).to_string(),
            rows: self
                .table()
                .into_iter()
                .map(|r| TableRowReport { constituent: r.constituent.to_string(), value: r.value.to_string() })
                .collect(),
        }
    }
}

impl fmt::Display for Crq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}   [prevision {}]", self.label, self.prevision)?;
        for row in self.table() {
            writeln!(f, "  {:<32} {}", row.constituent.to_string(), row.value)?;
        }
        Ok(())
    }
}

fn family_universe(family: &[&ConditionalEvent]) -> Universe {
    family.iter().fold(Universe::default(), |u, c| u.union(&c.universe()))
}

fn paren(c: &ConditionalEvent) -> String {
    let text = c.to_string();
    if text.chars().all(|ch| ch.is_alphanumeric() || ch == '_' || ch == '~') {
        text
    } else {
        format!("({text})")
    }
}

/// `A|H = AH + x·H̄`: 1 on AH, 0 on ĀH, `x` on H̄.
pub fn indicator(c: &ConditionalEvent, x: &Symbol) -> Crq {
    let universe = c.universe();
    let u = universe.clone();
    Crq::from_fn(universe, vec![c.clone()], c.antecedent().clone(), x.clone(), c.to_string(), |w| {
        match c.truth_at(&u, w) {
            TruthValue::True => SymbolicValue::one(),
            _ => SymbolicValue::zero(),
        }
    })
}

/// Conjunction of up to three conditionals: 0 if some conjunct is false,
/// 1 if all are true, otherwise the prevision of the conjunction of the void ones.
fn conjunction_n(
    family: &[&ConditionalEvent],
    symbol_for: impl Fn(&[usize]) -> Symbol,
    label: String,
) -> Result<Crq, CompoundError> {
    if family.is_empty() {
        return Err(CompoundError::EmptyFamily);
    }
    if family.len() > 3 {
        return Err(CompoundError::UnsupportedArity(family.len()));
    }
    let universe = family_universe(family);
    let conditioning = EventExpr::any(family.iter().map(|c| c.antecedent().clone()));
    let all: Vec<usize> = (0..family.len()).collect();
    let prevision = symbol_for(&all);
    let u = universe.clone();
    Ok(Crq::from_fn(
        universe,
        family.iter().map(|c| (*c).clone()).collect(),
        conditioning,
        prevision,
        label,
        |w| {
            let mut void = Vec::new();
            for (i, c) in family.iter().enumerate() {
                match c.truth_at(&u, w) {
                    TruthValue::False => return SymbolicValue::zero(),
                    TruthValue::Void => void.push(i),
                    TruthValue::True => {}
                }
            }
            if void.is_empty() {
                SymbolicValue::one()
            } else {
                SymbolicValue::symbol(&symbol_for(&void))
            }
        },
    ))
}

/// `(A|H) ∧ (B|K)`: 1 on AHBK, 0 on ĀH ∨ B̄K, `x` on H̄BK, `y` on AHK̄, `z` on H̄K̄.
pub fn conjunction2(c1: &ConditionalEvent, c2: &ConditionalEvent, x: &Symbol, y: &Symbol, z: &Symbol) -> Crq {
    conjunction_n(
        &[c1, c2],
        |v| match v {
            [0] => x.clone(),
            [1] => y.clone(),
            _ => z.clone(),
        },
        format!("{} & {}", paren(c1), paren(c2)),
    )
    .expect("two conjuncts")
}

/// Prevision symbols of a three-way conjunction and its sub-conjunctions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conj3Symbols {
    pub x1: Symbol,
    pub x2: Symbol,
    pub x3: Symbol,
    pub x12: Symbol,
    pub x13: Symbol,
    pub x23: Symbol,
    pub x123: Symbol,
}

impl Default for Conj3Symbols {
    fn default() -> Self {
        Conj3Symbols {
            x1: Symbol::probability("x1"),
            x2: Symbol::probability("x2"),
            x3: Symbol::probability("x3"),
            x12: Symbol::compound("x12"),
            x13: Symbol::compound("x13"),
            x23: Symbol::compound("x23"),
            x123: Symbol::compound("x123"),
        }
    }
}

impl Conj3Symbols {
    fn for_subset(&self, void: &[usize]) -> Symbol {
        match void {
            [0] => self.x1.clone(),
            [1] => self.x2.clone(),
            [2] => self.x3.clone(),
            [0, 1] => self.x12.clone(),
            [0, 2] => self.x13.clone(),
            [1, 2] => self.x23.clone(),
            _ => self.x123.clone(),
        }
    }
}

pub fn conjunction3(c1: &ConditionalEvent, c2: &ConditionalEvent, c3: &ConditionalEvent, s: &Conj3Symbols) -> Crq {
    conjunction_n(&[c1, c2, c3], |v| s.for_subset(v), format!("{} & {} & {}", paren(c1), paren(c2), paren(c3)))
        .expect("three conjuncts")
}

/// Conjunction of an arbitrary family, rejecting more than three conjuncts.
pub fn conjunction(family: &[ConditionalEvent], s: &Conj3Symbols) -> Result<Crq, CompoundError> {
    match family {
        [] => Err(CompoundError::EmptyFamily),
        [c] => Ok(indicator(c, &s.x1)),
        [c1, c2] => Ok(conjunction2(c1, c2, &s.x1, &s.x2, &s.x12)),
        [c1, c2, c3] => Ok(conjunction3(c1, c2, c3, s)),
        _ => Err(CompoundError::UnsupportedArity(family.len())),
    }
}

/// `QC = ⋀(H̄ᵢ ∨ EᵢHᵢ) | ⋁Hᵢ`.
pub fn quasi_conjunction(family: &[ConditionalEvent]) -> Result<ConditionalEvent, CompoundError> {
    if family.is_empty() {
        return Err(CompoundError::EmptyFamily);
    }
    let consequent = EventExpr::all(family.iter().map(|c| !c.antecedent().clone() | c.true_event()));
    let antecedent = EventExpr::any(family.iter().map(|c| c.antecedent().clone()));
    Ok(ConditionalEvent::new(consequent, antecedent).expect("a disjunction of satisfiable antecedents is satisfiable"))
}

/// `(B|K)|(A|H) = (B|K) ∧ (A|H) + μ·(Ā|H)` with `z = μx` applied.
/// `x` is the probability of the antecedent, `y` of the consequent.
pub fn iterated2(
    consequent: &ConditionalEvent,
    antecedent: &ConditionalEvent,
    x: &Symbol,
    y: &Symbol,
    z: &Symbol,
    mu: &Symbol,
) -> Result<Crq, CompoundError> {
    let label = format!("{} | {}", paren(consequent), paren(antecedent));
    if !antecedent.true_event().is_satisfiable() {
        return Err(CompoundError::TrivialIterated(label));
    }
    let conj = conjunction2(antecedent, consequent, x, y, z);
    let ind = indicator(antecedent, x).lift(conj.universe());
    let m = SymbolicValue::symbol(mu);
    let zx = &m * &SymbolicValue::symbol(x);
    let universe = conj.universe().clone();
    Ok(Crq::from_fn(
        universe,
        vec![antecedent.clone(), consequent.clone()],
        conj.conditioning().clone(),
        mu.clone(),
        label,
        |w| {
            let v = conj.value_at(w) + &(&m * &(SymbolicValue::one() - ind.value_at(w).clone()));
            v.substitute(z, &zx)
        },
    ))
}

/// `E3|H3 | ((E1|H1) ∧ (E2|H2)) = C123 + μ(1 − C12)` with `x123 = μ·x12` applied.
pub fn iterated_on_conjunction(
    consequent: &ConditionalEvent,
    c1: &ConditionalEvent,
    c2: &ConditionalEvent,
    s: &Conj3Symbols,
    mu: &Symbol,
) -> Result<Crq, CompoundError> {
    let label = format!("{} | ({} & {})", paren(consequent), paren(c1), paren(c2));
    let c12 = conjunction2(c1, c2, &s.x1, &s.x2, &s.x12);
    if c12.values().iter().all(|v| v.is_zero()) {
        return Err(CompoundError::TrivialIterated(label));
    }
    let c123 = conjunction3(c1, c2, consequent, s);
    let c12 = c12.lift(c123.universe());
    let m = SymbolicValue::symbol(mu);
    let t = &m * &SymbolicValue::symbol(&s.x12);
    let universe = c123.universe().clone();
    Ok(Crq::from_fn(
        universe,
        vec![c1.clone(), c2.clone(), consequent.clone()],
        c123.conditioning().clone(),
        mu.clone(),
        label,
        |w| {
            let v = c123.value_at(w) + &(&m * &(SymbolicValue::one() - c12.value_at(w).clone()));
            v.substitute(&s.x123, &t)
        },
    ))
}

/// `(A|H) ∧ (B|K) = A|H` when `A|H ⊆ B|K`.
pub fn conjunction_with_gn(c1: &ConditionalEvent, c2: &ConditionalEvent, x: &Symbol) -> Result<Crq, CompoundError> {
    if !gn_implies(c1, c2) {
        return Err(CompoundError::NotGnImplied(c1.to_string(), c2.to_string()));
    }
    Ok(indicator(c1, x))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrqEquality {
    /// Equal once `from` (the first prevision) is identified with `to`.
    Equal { from: Symbol, to: Symbol },
    /// Tables differ on the given world.
    Different { constituent: EventExpr, left: SymbolicValue, right: SymbolicValue },
}

impl CrqEquality {
    pub fn is_equal(&self) -> bool {
        matches!(self, CrqEquality::Equal { .. })
    }
}

/// Two quantities are equal when their tables coincide wherever either
/// conditioning event is true; their previsions then coincide too.
pub fn reduce_equal_crq(q1: &Crq, q2: &Crq) -> CrqEquality {
    let universe = q1.universe().union(q2.universe());
    let a = q1.lift(&universe).with_prevision(q2.prevision().clone());
    let b = q2.lift(&universe);
    for w in universe.worlds() {
        if !(a.conditioning_holds(w) || b.conditioning_holds(w)) {
            continue;
        }
        if a.value_at(w) != b.value_at(w) {
            return CrqEquality::Different {
                constituent: universe.world_literal(w),
                left: q1.lift(&universe).value_at(w).clone(),
                right: b.value_at(w).clone(),
            };
        }
    }
    CrqEquality::Equal { from: q1.prevision().clone(), to: q2.prevision().clone() }
}
