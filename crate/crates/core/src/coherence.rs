//! Coherence of precise assessments on conditional events and conditional
//! random quantities, coherent extensions, and the coherent values of an
//! unknown prevision.
//!
//! A world is *live* for a quantity when its conditioning event holds there
//! and the value, after substituting every binding but the quantity's own
//! prevision, is not identically that prevision. On the other worlds the bet
//! on the quantity returns exactly what was paid.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compound::{indicator, CompoundError, Crq};
use crate::event::{describe_worlds, ConditionalEvent, Universe, World, WorldSet};
use crate::rational::{fmt_rational, in_unit_interval, one, zero, Rational};
use crate::simplex::{LinearProgram, LpOutcome};
use crate::symbolic::{Symbol, SymbolicValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoherenceError {
    #[error("symbol `{0}` is not bound")]
    UnboundSymbol(String),
    #[error("value {1} for `{0}` is outside [0,1]")]
    OutOfRange(String, String),
    #[error("the base assessment is not coherent")]
    IncoherentBase,
    #[error("coherent extension set {0} is not an interval")]
    Disconnected(String),
    #[error("values of `{0}` on live constituents depend on its own prevision")]
    NonLinearTarget(String),
    #[error(transparent)]
    Compound(#[from] CompoundError),
}

/// Rational bindings for prevision symbols, each in `[0,1]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assessment {
    bindings: BTreeMap<Symbol, Rational>,
}

impl Assessment {
    pub fn new() -> Self {
        Assessment::default()
    }

    pub fn insert(&mut self, s: Symbol, v: Rational) -> Result<(), CoherenceError> {
        if !in_unit_interval(&v) {
            return Err(CoherenceError::OutOfRange(s.name, fmt_rational(&v)));
        }
        self.bindings.insert(s, v);
        Ok(())
    }

    /// Builder form of [`Assessment::insert`]; panics on values outside `[0,1]`.
    pub fn with(mut self, s: &Symbol, v: Rational) -> Self {
        self.insert(s.clone(), v).expect("assessment value in [0,1]");
        self
    }

    pub fn get(&self, s: &Symbol) -> Option<&Rational> {
        self.bindings.get(s)
    }

    pub fn remove(&mut self, s: &Symbol) -> Option<Rational> {
        self.bindings.remove(s)
    }

    pub fn bindings(&self) -> &BTreeMap<Symbol, Rational> {
        &self.bindings
    }

    pub fn without(&self, s: &Symbol) -> BTreeMap<Symbol, Rational> {
        let mut b = self.bindings.clone();
        b.remove(s);
        b
    }
}

/// Indicators of `events` under fresh symbols `p1, p2, …`, with the symbols.
pub fn event_objects(events: &[ConditionalEvent]) -> (Vec<Crq>, Vec<Symbol>) {
    let symbols: Vec<Symbol> = (1..=events.len()).map(|i| Symbol::probability(format!("p{i}"))).collect();
    let objects = events.iter().zip(&symbols).map(|(c, s)| indicator(c, s)).collect();
    (objects, symbols)
}

pub fn assess_events(events: &[ConditionalEvent], values: &[Rational]) -> Result<(Vec<Crq>, Assessment), CoherenceError> {
    assert_eq!(events.len(), values.len(), "one value per event");
    let (objects, symbols) = event_objects(events);
    let mut a = Assessment::new();
    for (s, v) in symbols.into_iter().zip(values) {
        a.insert(s, v.clone())?;
    }
    Ok((objects, a))
}

fn common_universe(objects: &[&Crq]) -> Universe {
    objects.iter().fold(Universe::default(), |u, q| u.union(q.universe()))
}

/// Value of `q` at `w` with all bindings except its own prevision, or `None`
/// when the world is not live.
fn live_value(q: &Crq, w: World, others: &BTreeMap<Symbol, Rational>) -> Option<SymbolicValue> {
    if !q.conditioning_holds(w) {
        return None;
    }
    let v = q.value_at(w).bind(others);
    if v.is_symbol(q.prevision()) {
        None
    } else {
        Some(v)
    }
}

fn first_unbound(v: &SymbolicValue) -> CoherenceError {
    let name = v.symbols().into_iter().next().map(|s| s.name).unwrap_or_default();
    CoherenceError::UnboundSymbol(name)
}

/// Worlds grouped by identical (liveness, value) pattern across objects.
struct Columns {
    universe: Universe,
    /// `live[c][j]`: value of object `j` on column `c`, when live.
    entries: Vec<Vec<Option<Rational>>>,
    worlds: Vec<Vec<World>>,
}

impl Columns {
    fn build(objects: &[&Crq], a: &Assessment) -> Result<Columns, CoherenceError> {
        Columns::build_in(common_universe(objects), objects, a)
    }

    fn build_in(universe: Universe, objects: &[&Crq], a: &Assessment) -> Result<Columns, CoherenceError> {
        let lifted: Vec<Crq> = objects.iter().map(|q| q.lift(&universe)).collect();
        let mut index: BTreeMap<Vec<Option<Rational>>, usize> = BTreeMap::new();
        let mut entries = Vec::new();
        let mut worlds: Vec<Vec<World>> = Vec::new();
        let others: Vec<BTreeMap<Symbol, Rational>> = lifted.iter().map(|q| a.without(q.prevision())).collect();
        for w in universe.worlds() {
            let mut key = Vec::with_capacity(lifted.len());
            for (q, b) in lifted.iter().zip(&others) {
                match live_value(q, w, b) {
                    None => key.push(None),
                    Some(v) => {
                        let v = match a.get(q.prevision()) {
                            Some(p) => v.bind(&BTreeMap::from([(q.prevision().clone(), p.clone())])),
                            None => v,
                        };
                        key.push(Some(v.as_constant().ok_or_else(|| first_unbound(&v))?));
                    }
                }
            }
            if key.iter().all(Option::is_none) {
                continue;
            }
            match index.get(&key) {
                Some(&c) => worlds[c].push(w),
                None => {
                    index.insert(key.clone(), entries.len());
                    entries.push(key);
                    worlds.push(vec![w]);
                }
            }
        }
        Ok(Columns { universe, entries, worlds })
    }

    fn label(&self, c: usize) -> String {
        describe_worlds(&self.universe, &WorldSet::from_worlds(&self.universe, &self.worlds[c])).to_string()
    }

    fn touching(&self, active: &[usize]) -> Vec<usize> {
        (0..self.entries.len()).filter(|&c| active.iter().any(|&j| self.entries[c][j].is_some())).collect()
    }

    /// `Σλ = 1, λ ≥ 0` and `Σ λ_c (v_jc − p_j) = 0` over live columns, for each `j` in `active`.
    fn system(&self, cols: &[usize], active: &[usize], previsions: &[Rational]) -> LinearProgram {
        let mut lp = LinearProgram::new(cols.len());
        lp.eq(vec![one(); cols.len()], one());
        for &j in active {
            let row = cols
                .iter()
                .map(|&c| match &self.entries[c][j] {
                    Some(v) => v - &previsions[j],
                    None => zero(),
                })
                .collect();
            lp.eq(row, zero());
        }
        lp
    }

    fn mass_row(&self, cols: &[usize], j: usize) -> Vec<Rational> {
        cols.iter().map(|&c| if self.entries[c][j].is_some() { one() } else { zero() }).collect()
    }
}

fn previsions_of(objects: &[&Crq], a: &Assessment) -> Result<Vec<Rational>, CoherenceError> {
    objects
        .iter()
        .map(|q| a.get(q.prevision()).cloned().ok_or_else(|| CoherenceError::UnboundSymbol(q.prevision().name.clone())))
        .collect()
}

/// Objects of `active` whose live mass is zero for every solution of `lp`.
fn zero_mass(columns: &Columns, cols: &[usize], active: &[usize], lp: &LinearProgram, sample: &[Rational]) -> Vec<usize> {
    active
        .iter()
        .copied()
        .filter(|&j| {
            let row = columns.mass_row(cols, j);
            if row.iter().zip(sample).any(|(m, l)| !m.is_zero() && l.is_positive()) {
                return false;
            }
            match lp.maximize(&row) {
                LpOutcome::Optimal { value, .. } => value.is_zero(),
                _ => true,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weight {
    pub constituent: String,
    #[serde(with = "crate::rational::serde_str")]
    pub lambda: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCertificate {
    /// Labels of the objects checked at this level.
    pub objects: Vec<String>,
    pub feasible: bool,
    pub weights: Vec<Weight>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub coherent: bool,
    pub recursion_depth: usize,
    pub certificate: Vec<LevelCertificate>,
}

/// Decides coherence, keeping the λ weights found at each level.
pub fn check_coherence_report(objects: &[Crq], a: &Assessment) -> Result<CoherenceReport, CoherenceError> {
    let refs: Vec<&Crq> = objects.iter().collect();
    let previsions = previsions_of(&refs, a)?;
    let columns = Columns::build(&refs, a)?;
    let mut active: Vec<usize> = (0..objects.len()).collect();
    let mut certificate = Vec::new();
    while !active.is_empty() {
        let cols = columns.touching(&active);
        if cols.is_empty() {
            break;
        }
        let lp = columns.system(&cols, &active, &previsions);
        let labels = active.iter().map(|&j| objects[j].label().to_string()).collect();
        let Some(lambda) = lp.feasible_point() else {
            certificate.push(LevelCertificate { objects: labels, feasible: false, weights: Vec::new() });
            return Ok(CoherenceReport { coherent: false, recursion_depth: certificate.len(), certificate });
        };
        let weights = cols
            .iter()
            .zip(&lambda)
            .filter(|(_, l)| l.is_positive())
            .map(|(&c, l)| Weight { constituent: columns.label(c), lambda: l.clone() })
            .collect();
        certificate.push(LevelCertificate { objects: labels, feasible: true, weights });
        active = zero_mass(&columns, &cols, &active, &lp, &lambda);
    }
    Ok(CoherenceReport { coherent: true, recursion_depth: certificate.len(), certificate })
}

pub fn check_coherence(objects: &[Crq], a: &Assessment) -> Result<bool, CoherenceError> {
    Ok(check_coherence_report(objects, a)?.coherent)
}

/// Coherence of a precise assessment on conditional events.
pub fn check_events(events: &[ConditionalEvent], values: &[Rational]) -> Result<bool, CoherenceError> {
    let (objects, a) = assess_events(events, values)?;
    check_coherence(&objects, &a)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalInterval {
    #[serde(rename = "lo", with = "crate::rational::serde_str")]
    pub lower: Rational,
    #[serde(rename = "hi", with = "crate::rational::serde_str")]
    pub upper: Rational,
    #[serde(rename = "lo_closed")]
    pub lower_closed: bool,
    #[serde(rename = "hi_closed")]
    pub upper_closed: bool,
}

impl RationalInterval {
    pub fn closed(lower: Rational, upper: Rational) -> Self {
        assert!(lower <= upper, "empty interval");
        RationalInterval { lower, upper, lower_closed: true, upper_closed: true }
    }

    pub fn point(v: Rational) -> Self {
        RationalInterval::closed(v.clone(), v)
    }

    pub fn unit() -> Self {
        RationalInterval::closed(zero(), one())
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, v: &Rational) -> bool {
        let lo = if self.lower_closed { v >= &self.lower } else { v > &self.lower };
        let hi = if self.upper_closed { v <= &self.upper } else { v < &self.upper };
        lo && hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lower + &self.upper) / Rational::from_integer(2.into())
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", fmt_rational(&self.lower));
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lower_closed { "[" } else { "(" },
            fmt_rational(&self.lower),
            fmt_rational(&self.upper),
            if self.upper_closed { "]" } else { ")" }
        )
    }
}

/// A finite union of disjoint closed intervals, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CoherentSet {
    parts: Vec<RationalInterval>,
}

impl CoherentSet {
    pub fn empty() -> Self {
        CoherentSet::default()
    }

    pub fn unit() -> Self {
        CoherentSet { parts: vec![RationalInterval::unit()] }
    }

    pub fn point(v: Rational) -> Self {
        CoherentSet { parts: vec![RationalInterval::point(v)] }
    }

    pub fn interval(lo: Rational, hi: Rational) -> Self {
        CoherentSet { parts: vec![RationalInterval::closed(lo, hi)] }
    }

    pub fn from_intervals(parts: impl IntoIterator<Item = RationalInterval>) -> Self {
        let mut parts: Vec<RationalInterval> = parts.into_iter().collect();
        parts.sort_by(|a, b| a.lower.cmp(&b.lower).then(a.upper.cmp(&b.upper)));
        let mut out: Vec<RationalInterval> = Vec::new();
        for p in parts {
            match out.last_mut() {
                Some(last) if p.lower <= last.upper => {
                    if p.upper > last.upper {
                        last.upper = p.upper;
                    }
                }
                _ => out.push(p),
            }
        }
        CoherentSet { parts: out }
    }

    pub fn intervals(&self) -> &[RationalInterval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_interval(&self) -> bool {
        self.parts.len() == 1
    }

    pub fn as_interval(&self) -> Option<&RationalInterval> {
        match self.parts.as_slice() {
            [only] => Some(only),
            _ => None,
        }
    }

    pub fn is_point(&self, v: &Rational) -> bool {
        matches!(self.parts.as_slice(), [only] if only.is_point() && &only.lower == v)
    }

    pub fn contains(&self, v: &Rational) -> bool {
        self.parts.iter().any(|p| p.contains(v))
    }

    pub fn union(&self, other: &CoherentSet) -> CoherentSet {
        CoherentSet::from_intervals(self.parts.iter().chain(&other.parts).cloned())
    }

    pub fn intersect(&self, other: &CoherentSet) -> CoherentSet {
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                let lo = (&a.lower).max(&b.lower).clone();
                let hi = (&a.upper).min(&b.upper).clone();
                if lo <= hi {
                    out.push(RationalInterval::closed(lo, hi));
                }
            }
        }
        CoherentSet::from_intervals(out)
    }

    /// `{μ ∈ [0,1] : μ·k ∈ self}`.
    pub fn scaled_preimage(&self, k: &Rational) -> CoherentSet {
        if k.is_zero() {
            return if self.contains(&zero()) { CoherentSet::unit() } else { CoherentSet::empty() };
        }
        assert!(k.is_positive(), "scale factor must be nonnegative");
        let scaled = CoherentSet::from_intervals(
            self.parts.iter().map(|p| RationalInterval::closed(&p.lower / k, &p.upper / k)),
        );
        scaled.intersect(&CoherentSet::unit())
    }
}

impl fmt::Display for CoherentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join(" U "))
    }
}

impl Serialize for CoherentSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CoherentSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for CoherentSet {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        let text = text.trim();
        if text == "{}" {
            return Ok(CoherentSet::empty());
        }
        let parse = |t: &str| crate::rational::parse_rational(t).map_err(|e| e.to_string());
        let mut parts = Vec::new();
        for piece in text.split(" U ") {
            let piece = piece.trim();
            if let Some(inner) = piece.strip_prefix('{').and_then(|p| p.strip_suffix('}')) {
                parts.push(RationalInterval::point(parse(inner)?));
                continue;
            }
            let lower_closed = piece.starts_with('[');
            let upper_closed = piece.ends_with(']');
            let inner = piece
                .get(1..piece.len().saturating_sub(1))
                .ok_or_else(|| format!("bad interval `{piece}`"))?;
            let (lo, hi) = inner.split_once(',').ok_or_else(|| format!("bad interval `{piece}`"))?;
            let (lower, upper) = (parse(lo)?, parse(hi)?);
            if lower > upper {
                return Err(format!("bad interval `{piece}`"));
            }
            parts.push(RationalInterval { lower, upper, lower_closed, upper_closed });
        }
        Ok(CoherentSet { parts })
    }
}

/// The target's live values with bindings applied, per world of `universe`.
fn target_values(target: &Crq, a: &Assessment) -> Result<Vec<Option<Rational>>, CoherenceError> {
    let others = a.without(target.prevision());
    target
        .universe()
        .worlds()
        .map(|w| match live_value(target, w, &others) {
            None => Ok(None),
            Some(v) => {
                if v.mentions(target.prevision()) {
                    return Err(CoherenceError::NonLinearTarget(target.label().to_string()));
                }
                v.as_constant().map(Some).ok_or_else(|| first_unbound(&v))
            }
        })
        .collect()
}

/// The exact set of values `v` such that `a ∪ {target ↦ v}` is coherent.
pub fn extension_set(objects: &[Crq], a: &Assessment, target: &Crq) -> Result<CoherentSet, CoherenceError> {
    let mut a = a.clone();
    a.remove(target.prevision());
    if !check_coherence(objects, &a)? {
        return Err(CoherenceError::IncoherentBase);
    }
    let base: Vec<&Crq> = objects.iter().collect();
    let universe = common_universe(&base).union(target.universe());
    // the target column holds its raw value; its prevision is unknown
    let tvals = target_values(&target.lift(&universe), &a)?;
    let mut previsions = previsions_of(&base, &a)?;
    previsions.push(zero());
    let mut columns = Columns::build_in(universe.clone(), &base, &a)?;
    columns.attach_target(&universe, &tvals);
    let t = objects.len();
    let all: Vec<usize> = (0..objects.len()).collect();
    Ok(extension_rec(&columns, &previsions, t, &all).intersect(&CoherentSet::unit()))
}

impl Columns {
    /// Rebuilds columns over `universe` with one more object, the target.
    fn attach_target(&mut self, universe: &Universe, tvals: &[Option<Rational>]) {
        assert_eq!(&self.universe, universe, "base and target share a universe");
        let mut index: BTreeMap<Vec<Option<Rational>>, usize> = BTreeMap::new();
        let mut entries = Vec::new();
        let mut worlds: Vec<Vec<World>> = Vec::new();
        let mut by_world: BTreeMap<World, Vec<Option<Rational>>> = BTreeMap::new();
        for (c, ws) in self.worlds.iter().enumerate() {
            for &w in ws {
                by_world.insert(w, self.entries[c].clone());
            }
        }
        let width = self.entries.first().map_or(0, |e| e.len());
        for w in universe.worlds() {
            let mut key = by_world.remove(&w).unwrap_or_else(|| vec![None; width]);
            key.push(tvals[w as usize].clone());
            if key.iter().all(Option::is_none) {
                continue;
            }
            match index.get(&key) {
                Some(&c) => worlds[c].push(w),
                None => {
                    index.insert(key.clone(), entries.len());
                    entries.push(key);
                    worlds.push(vec![w]);
                }
            }
        }
        self.entries = entries;
        self.worlds = worlds;
    }
}

fn extension_rec(columns: &Columns, previsions: &[Rational], t: usize, active: &[usize]) -> CoherentSet {
    let mut with_t = active.to_vec();
    with_t.push(t);
    let cols = columns.touching(&with_t);
    let tv: Vec<Option<&Rational>> = cols.iter().map(|&c| columns.entries[c][t].as_ref()).collect();
    if active.is_empty() {
        let live: Vec<&Rational> = tv.iter().flatten().copied().collect();
        return match (live.iter().min(), live.iter().max()) {
            (Some(lo), Some(hi)) => CoherentSet::interval((*lo).clone(), (*hi).clone()),
            _ => CoherentSet::unit(),
        };
    }
    let lp = columns.system(&cols, active, previsions);
    let mass = columns.mass_row(&cols, t);
    let max_mass = match lp.maximize(&mass) {
        LpOutcome::Optimal { value, .. } => value,
        _ => return CoherentSet::empty(),
    };
    let mut result = CoherentSet::empty();
    let rest_lp = if max_mass.is_positive() {
        // Charnes–Cooper: scale λ so that the target's live mass is 1
        let mut cc = LinearProgram::new(cols.len());
        cc.eq(mass.clone(), one());
        for &j in active {
            let row = cols
                .iter()
                .map(|&c| match &columns.entries[c][j] {
                    Some(v) => v - &previsions[j],
                    None => zero(),
                })
                .collect();
            cc.eq(row, zero());
        }
        let obj: Vec<Rational> = tv.iter().map(|v| v.cloned().unwrap_or_else(zero)).collect();
        let lo = cc.minimize(&obj).value().cloned().expect("bounded");
        let hi = cc.maximize(&obj).value().cloned().expect("bounded");
        result = CoherentSet::interval(lo, hi);
        let mut restricted = lp.clone();
        restricted.eq(mass, zero());
        restricted
    } else {
        lp
    };
    if let Some(sample) = rest_lp.feasible_point() {
        let next = zero_mass(columns, &cols, active, &rest_lp, &sample);
        debug_assert!(next.len() < active.len());
        result = result.union(&extension_rec(columns, previsions, t, &next));
    }
    result
}

/// The coherent extension as a single interval, with both endpoints
/// confirmed by [`check_coherence`].
pub fn extension_interval(objects: &[Crq], a: &Assessment, target: &Crq) -> Result<RationalInterval, CoherenceError> {
    let set = extension_set(objects, a, target)?;
    let interval = set.as_interval().cloned().ok_or_else(|| CoherenceError::Disconnected(set.to_string()))?;
    let mut all = objects.to_vec();
    all.push(target.clone());
    for end in [&interval.lower, &interval.upper] {
        let b = a.clone().with(target.prevision(), end.clone());
        assert!(check_coherence(&all, &b)?, "extension endpoint {} failed the coherence check", fmt_rational(end));
    }
    Ok(interval)
}

/// Live rows of `q` as affine functions `a + b·μ` of its own prevision.
fn affine_rows(q: &Crq, partial: &Assessment) -> Result<Vec<(Rational, Rational)>, CoherenceError> {
    let mu = q.prevision();
    let others = partial.without(mu);
    let mut rows = BTreeSet::new();
    for w in q.universe().worlds() {
        let Some(v) = live_value(q, w, &others) else { continue };
        let (a, b) = v.affine_in(mu).ok_or_else(|| CoherenceError::NonLinearTarget(q.label().to_string()))?;
        let a = a.as_constant().ok_or_else(|| first_unbound(&a))?;
        let b = b.as_constant().ok_or_else(|| first_unbound(&b))?;
        rows.insert((a, b));
    }
    Ok(rows.into_iter().collect())
}

/// The values of `q`'s prevision μ that are coherent given `partial`: μ must
/// lie in the convex hull of the live values, each affine in μ.
pub fn coherent_mu_set(q: &Crq, partial: &Assessment) -> Result<CoherentSet, CoherenceError> {
    if !q.universe().worlds().any(|w| q.conditioning_holds(w)) {
        return Err(CompoundError::TrivialIterated(q.label().to_string()).into());
    }
    let rows = affine_rows(q, partial)?;
    if rows.is_empty() {
        return Ok(CoherentSet::unit());
    }
    let inside = |mu: &Rational| {
        let vals = rows.iter().map(|(a, b)| a + b * mu);
        let (mut lo, mut hi) = (None::<Rational>, None::<Rational>);
        for v in vals {
            lo = Some(match lo { Some(l) if l <= v => l, _ => v.clone() });
            hi = Some(match hi { Some(h) if h >= v => h, _ => v });
        }
        lo.is_some_and(|l| &l <= mu) && hi.is_some_and(|h| &h >= mu)
    };
    let mut points: BTreeSet<Rational> = BTreeSet::from([zero(), one()]);
    for (a, b) in &rows {
        let denom = one() - b;
        if !denom.is_zero() {
            let r = a / &denom;
            if in_unit_interval(&r) {
                points.insert(r);
            }
        }
    }
    let points: Vec<Rational> = points.into_iter().collect();
    let mut parts = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if inside(p) {
            parts.push(RationalInterval::point(p.clone()));
        }
        if let Some(next) = points.get(i + 1) {
            let mid = (p + next) / Rational::from_integer(2.into());
            if inside(&mid) {
                parts.push(RationalInterval::closed(p.clone(), next.clone()));
            }
        }
    }
    Ok(CoherentSet::from_intervals(parts))
}
