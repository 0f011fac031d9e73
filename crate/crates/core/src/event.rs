//! Propositional events over named atoms, conditional events and the
//! Goodman–Nguyen order between them.
//!
//! Everything here is decided by enumerating the worlds of the atoms that
//! occur in the expressions involved. Problems handled by this crate are
//! small (a handful of atoms), so no SAT machinery is needed.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{BitAnd, BitOr, Not};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard ceiling on the number of atoms in one universe (worlds are `u32` masks).
pub const MAX_ATOMS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom(String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Self {
        Atom(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error("no truth value assigned to atom `{0}`")]
    MissingAtom(String),
    #[error("antecedent `{0}` is unsatisfiable")]
    UnsatisfiableAntecedent(String),
    #[error("too many atoms ({0}, at most {MAX_ATOMS} supported)")]
    TooManyAtoms(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EventExpr {
    True,
    False,
    Atom(Atom),
    Not(Box<EventExpr>),
    And(Box<EventExpr>, Box<EventExpr>),
    Or(Box<EventExpr>, Box<EventExpr>),
}

impl EventExpr {
    pub fn atom(name: impl Into<String>) -> Self {
        EventExpr::Atom(Atom::new(name))
    }

    /// The sure event.
    pub fn omega() -> Self {
        EventExpr::True
    }

    /// The impossible event.
    pub fn bottom() -> Self {
        EventExpr::False
    }

    pub fn all(items: impl IntoIterator<Item = EventExpr>) -> Self {
        items.into_iter().reduce(|a, b| a & b).unwrap_or(EventExpr::True)
    }

    pub fn any(items: impl IntoIterator<Item = EventExpr>) -> Self {
        items.into_iter().reduce(|a, b| a | b).unwrap_or(EventExpr::False)
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            EventExpr::True | EventExpr::False => {}
            EventExpr::Atom(a) => {
                out.insert(a.clone());
            }
            EventExpr::Not(e) => e.collect_atoms(out),
            EventExpr::And(a, b) | EventExpr::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Truth value under a world given as a bitmask over `universe`.
    /// Panics if an atom of the expression is not in the universe.
    pub fn holds(&self, universe: &Universe, world: World) -> bool {
        match self {
            EventExpr::True => true,
            EventExpr::False => false,
            EventExpr::Atom(a) => {
                let i = universe.index_of(a).unwrap_or_else(|| panic!("atom `{a}` outside universe"));
                world & (1 << i) != 0
            }
            EventExpr::Not(e) => !e.holds(universe, world),
            EventExpr::And(a, b) => a.holds(universe, world) && b.holds(universe, world),
            EventExpr::Or(a, b) => a.holds(universe, world) || b.holds(universe, world),
        }
    }

    pub fn truth_set(&self, universe: &Universe) -> WorldSet {
        WorldSet::from_fn(universe, |w| self.holds(universe, w))
    }

    pub fn is_satisfiable(&self) -> bool {
        let universe = Universe::of([self]);
        universe.worlds().any(|w| self.holds(&universe, w))
    }

    fn precedence(&self) -> u8 {
        match self {
            EventExpr::Or(..) => 1,
            EventExpr::And(..) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            EventExpr::True => f.write_str("TRUE")?,
            EventExpr::False => f.write_str("FALSE")?,
            EventExpr::Atom(a) => write!(f, "{a}")?,
            EventExpr::Not(e) => {
                f.write_str("~")?;
                e.fmt_prec(f, 3)?;
            }
            EventExpr::And(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, 2)?;
            }
            EventExpr::Or(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(" | ")?;
                b.fmt_prec(f, 1)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ExprParseError> {
        let mut p = ExprParser::new(text);
        let e = p.disjunction()?;
        p.expect_end()?;
        Ok(e)
    }
}

impl fmt::Display for EventExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl Not for EventExpr {
    type Output = EventExpr;
    fn not(self) -> EventExpr {
        EventExpr::Not(Box::new(self))
    }
}

impl BitAnd for EventExpr {
    type Output = EventExpr;
    fn bitand(self, rhs: EventExpr) -> EventExpr {
        EventExpr::And(Box::new(self), Box::new(rhs))
    }
}

impl BitOr for EventExpr {
    type Output = EventExpr;
    fn bitor(self, rhs: EventExpr) -> EventExpr {
        EventExpr::Or(Box::new(self), Box::new(rhs))
    }
}

/// Evaluates `expr` under an explicit assignment of truth values.
pub fn evaluate(expr: &EventExpr, world: &HashMap<String, bool>) -> Result<bool, EventError> {
    Ok(match expr {
        EventExpr::True => true,
        EventExpr::False => false,
        EventExpr::Atom(a) => *world
            .get(a.name())
            .ok_or_else(|| EventError::MissingAtom(a.name().to_string()))?,
        EventExpr::Not(e) => !evaluate(e, world)?,
        EventExpr::And(a, b) => {
            // both sides are evaluated so that a missing atom is always reported
            let l = evaluate(a, world)?;
            let r = evaluate(b, world)?;
            l && r
        }
        EventExpr::Or(a, b) => {
            let l = evaluate(a, world)?;
            let r = evaluate(b, world)?;
            l || r
        }
    })
}

/// `e1 ⊆ e2`: `e1 ∧ ¬e2` has no model.
pub fn implies(e1: &EventExpr, e2: &EventExpr) -> bool {
    let universe = Universe::of([e1, e2]);
    universe
        .worlds()
        .all(|w| !e1.holds(&universe, w) || e2.holds(&universe, w))
}

pub fn equivalent(e1: &EventExpr, e2: &EventExpr) -> bool {
    implies(e1, e2) && implies(e2, e1)
}

/// A world is a bitmask: bit `i` is the truth value of the `i`-th atom of a [`Universe`].
pub type World = u32;

/// A sorted, duplicate-free list of atoms fixing the bit layout of worlds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Universe {
    atoms: Vec<Atom>,
}

impl Universe {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let set: BTreeSet<Atom> = atoms.into_iter().collect();
        let universe = Universe { atoms: set.into_iter().collect() };
        assert!(universe.atoms.len() <= MAX_ATOMS, "too many atoms");
        universe
    }

    pub fn of<'a>(exprs: impl IntoIterator<Item = &'a EventExpr>) -> Self {
        let mut set = BTreeSet::new();
        for e in exprs {
            e.collect_atoms(&mut set);
        }
        Universe::new(set)
    }

    pub fn union(&self, other: &Universe) -> Universe {
        Universe::new(self.atoms.iter().chain(other.atoms.iter()).cloned())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, other: &Universe) -> bool {
        other.atoms.iter().all(|a| self.index_of(a).is_some())
    }

    pub fn index_of(&self, atom: &Atom) -> Option<usize> {
        self.atoms.binary_search(atom).ok()
    }

    pub fn world_count(&self) -> usize {
        1usize << self.atoms.len()
    }

    pub fn worlds(&self) -> impl Iterator<Item = World> {
        0..(self.world_count() as World)
    }

    /// Restricts a world of `self` to the atoms of `sub`.
    pub fn project(&self, world: World, sub: &Universe) -> World {
        let mut out = 0;
        for (j, atom) in sub.atoms.iter().enumerate() {
            let i = self.index_of(atom).expect("projection onto a non-subuniverse");
            if world & (1 << i) != 0 {
                out |= 1 << j;
            }
        }
        out
    }

    /// The conjunction of literals describing one world, e.g. `A & ~B & H`.
    pub fn world_literal(&self, world: World) -> EventExpr {
        EventExpr::all(self.atoms.iter().enumerate().map(|(i, a)| {
            let lit = EventExpr::Atom(a.clone());
            if world & (1 << i) != 0 {
                lit
            } else {
                !lit
            }
        }))
    }
}

/// A set of worlds of some universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WorldSet {
    bits: Vec<bool>,
}

impl WorldSet {
    pub fn from_fn(universe: &Universe, f: impl Fn(World) -> bool) -> Self {
        WorldSet { bits: universe.worlds().map(f).collect() }
    }

    pub fn from_worlds(universe: &Universe, worlds: &[World]) -> Self {
        let mut bits = vec![false; universe.world_count()];
        for &w in worlds {
            bits[w as usize] = true;
        }
        WorldSet { bits }
    }

    pub fn contains(&self, w: World) -> bool {
        self.bits[w as usize]
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn iter(&self) -> impl Iterator<Item = World> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as World)
    }

    pub fn and(&self, other: &WorldSet) -> WorldSet {
        WorldSet { bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| a && b).collect() }
    }

    pub fn or(&self, other: &WorldSet) -> WorldSet {
        WorldSet { bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| a || b).collect() }
    }

    pub fn complement(&self) -> WorldSet {
        WorldSet { bits: self.bits.iter().map(|&b| !b).collect() }
    }
}

/// Three-valued truth of a conditional event in a world.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TruthValue {
    True,
    False,
    Void,
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruthValue::True => "T",
            TruthValue::False => "F",
            TruthValue::Void => "V",
        })
    }
}

/// `consequent | antecedent`, with a satisfiable antecedent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConditionalEvent {
    consequent: EventExpr,
    antecedent: EventExpr,
}

impl ConditionalEvent {
    pub fn new(consequent: EventExpr, antecedent: EventExpr) -> Result<Self, EventError> {
        if !antecedent.is_satisfiable() {
            return Err(EventError::UnsatisfiableAntecedent(antecedent.to_string()));
        }
        Ok(ConditionalEvent { consequent, antecedent })
    }

    /// The unconditional event `e | Ω`.
    pub fn unconditional(e: EventExpr) -> Self {
        ConditionalEvent { consequent: e, antecedent: EventExpr::True }
    }

    pub fn consequent(&self) -> &EventExpr {
        &self.consequent
    }

    pub fn antecedent(&self) -> &EventExpr {
        &self.antecedent
    }

    /// `consequent ∧ antecedent`, the event on which this conditional is true.
    pub fn true_event(&self) -> EventExpr {
        self.consequent.clone() & self.antecedent.clone()
    }

    /// `¬consequent ∧ antecedent`, the event on which it is false.
    pub fn false_event(&self) -> EventExpr {
        !self.consequent.clone() & self.antecedent.clone()
    }

    /// The conditional event with negated consequent.
    pub fn negation(&self) -> Self {
        ConditionalEvent { consequent: !self.consequent.clone(), antecedent: self.antecedent.clone() }
    }

    pub fn universe(&self) -> Universe {
        Universe::of([&self.consequent, &self.antecedent])
    }

    pub fn truth_at(&self, universe: &Universe, world: World) -> TruthValue {
        if !self.antecedent.holds(universe, world) {
            TruthValue::Void
        } else if self.consequent.holds(universe, world) {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }

    /// True when the antecedent entails the consequent (the conditional is constantly 1).
    pub fn is_tautological(&self) -> bool {
        implies(&self.antecedent, &self.consequent)
    }

    /// Same truth value in every world.
    pub fn equivalent(&self, other: &ConditionalEvent) -> bool {
        let universe = self.universe().union(&other.universe());
        universe.worlds().all(|w| self.truth_at(&universe, w) == other.truth_at(&universe, w))
    }

    /// Parses `E | H`. The first `|` outside parentheses separates consequent
    /// from antecedent; without a bar the antecedent is `TRUE`.
    pub fn parse(text: &str) -> Result<Self, ExprParseError> {
        let mut depth = 0i32;
        let mut split = None;
        for (i, ch) in text.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '|' if depth == 0 => {
                    split = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let (consequent, antecedent) = match split {
            Some(i) => {
                let c = EventExpr::parse(&text[..i])?;
                let a = EventExpr::parse(&text[i + 1..]).map_err(|e| e.shifted(i + 1))?;
                (c, a)
            }
            None => (EventExpr::parse(text)?, EventExpr::True),
        };
        ConditionalEvent::new(consequent, antecedent)
            .map_err(|e| ExprParseError { offset: split.map_or(0, |i| i + 1), message: e.to_string() })
    }
}

impl fmt::Display for ConditionalEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.consequent.fmt_prec(f, 2)?;
        if self.antecedent == EventExpr::True {
            return Ok(());
        }
        f.write_str(" | ")?;
        self.antecedent.fmt_prec(f, 2)
    }
}

/// Goodman–Nguyen implication `c1 ⊆ c2`: `AH ⊆ BK` and `B̄K ⊆ ĀH`.
pub fn gn_implies(c1: &ConditionalEvent, c2: &ConditionalEvent) -> bool {
    implies(&c1.true_event(), &c2.true_event()) && implies(&c2.false_event(), &c1.false_event())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at offset {offset}")]
pub struct ExprParseError {
    pub offset: usize,
    pub message: String,
}

impl ExprParseError {
    fn shifted(mut self, by: usize) -> Self {
        self.offset += by;
        self
    }
}

struct ExprParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn new(src: &'a str) -> Self {
        ExprParser { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn error(&self, message: impl Into<String>) -> ExprParseError {
        ExprParseError { offset: self.pos, message: message.into() }
    }

    fn expect_end(&mut self) -> Result<(), ExprParseError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
        }
    }

    fn disjunction(&mut self) -> Result<EventExpr, ExprParseError> {
        let mut e = self.conjunction()?;
        while self.peek() == Some('|') {
            self.pos += 1;
            e = e | self.conjunction()?;
        }
        Ok(e)
    }

    fn conjunction(&mut self) -> Result<EventExpr, ExprParseError> {
        let mut e = self.unary()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            e = e & self.unary()?;
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<EventExpr, ExprParseError> {
        match self.peek() {
            Some('~') | Some('!') => {
                self.pos += 1;
                Ok(!self.unary()?)
            }
            Some('(') => {
                self.pos += 1;
                let e = self.disjunction()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while let Some(c) = self.src[self.pos..].chars().next() {
                    if c.is_alphanumeric() || c == '_' || c == '\'' {
                        self.pos += c.len_utf8();
                    } else {
                        break;
                    }
                }
                Ok(match &self.src[start..self.pos] {
                    "TRUE" => EventExpr::True,
                    "FALSE" => EventExpr::False,
                    name => EventExpr::atom(name),
                })
            }
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

/// A short disjunctive normal form describing a set of worlds, used to label
/// table rows. Prime implicants are computed exactly and then covered greedily.
pub fn describe_worlds(universe: &Universe, worlds: &WorldSet) -> EventExpr {
    let n = universe.len();
    let minterms: Vec<World> = worlds.iter().collect();
    if minterms.is_empty() {
        return EventExpr::False;
    }
    if minterms.len() == universe.world_count() {
        return EventExpr::True;
    }
    // cube = (value bits, care mask)
    let full: World = if n == 0 { 0 } else { World::MAX >> (32 - n) };
    let mut current: BTreeSet<(World, World)> = minterms.iter().map(|&m| (m, full)).collect();
    let mut primes: BTreeSet<(World, World)> = BTreeSet::new();
    while !current.is_empty() {
        let cubes: Vec<(World, World)> = current.iter().copied().collect();
        let mut merged = vec![false; cubes.len()];
        let mut next = BTreeSet::new();
        for i in 0..cubes.len() {
            for j in i + 1..cubes.len() {
                let (vi, mi) = cubes[i];
                let (vj, mj) = cubes[j];
                if mi != mj {
                    continue;
                }
                let diff = (vi ^ vj) & mi;
                if diff.count_ones() == 1 {
                    merged[i] = true;
                    merged[j] = true;
                    next.insert((vi & !diff, mi & !diff));
                }
            }
        }
        for (i, c) in cubes.iter().enumerate() {
            if !merged[i] {
                primes.insert(*c);
            }
        }
        current = next;
    }
    let covers = |(v, m): (World, World), w: World| (w & m) == (v & m);
    let mut uncovered: BTreeSet<World> = minterms.iter().copied().collect();
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let best = primes
            .iter()
            .copied()
            .max_by_key(|&c| {
                let gain = uncovered.iter().filter(|&&w| covers(c, w)).count();
                (gain, std::cmp::Reverse(c.1.count_ones()), std::cmp::Reverse(c))
            })
            .expect("prime implicants cover every minterm");
        uncovered.retain(|&w| !covers(best, w));
        chosen.push(best);
    }
    chosen.sort_by_key(|&(v, m)| (m.count_ones(), std::cmp::Reverse(v & m), m));
    EventExpr::any(chosen.into_iter().map(|(v, m)| {
        EventExpr::all(universe.atoms().iter().enumerate().filter(|(i, _)| m & (1 << i) != 0).map(
            |(i, a)| {
                let lit = EventExpr::Atom(a.clone());
                if v & (1 << i) != 0 {
                    lit
                } else {
                    !lit
                }
            },
        ))
    }))
}
