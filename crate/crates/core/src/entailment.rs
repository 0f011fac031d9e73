//! p-consistency and p-entailment, decided three independent ways: by the
//! coherence of `(1, …, 1, 0)`, by a quasi-conjunction witness, and by the
//! coherent values of the iterated conditional of conclusion given premises.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coherence::{
    assess_events, check_coherence, coherent_mu_set, extension_set, Assessment, CoherenceError, CoherentSet,
};
use crate::compound::{
    conjunction2, conjunction3, indicator, iterated2, iterated_on_conjunction, quasi_conjunction, CompoundError,
    Conj3Symbols, Crq,
};
use crate::event::{gn_implies, ConditionalEvent};
use crate::rational::{half, one, zero, Rational};
use crate::symbolic::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EntailmentError {
    #[error("premise family is not p-consistent")]
    NotPConsistent,
    #[error("premise `{0}` is trivial: its consequent and antecedent never hold together")]
    TrivialPremise(String),
    #[error("the iterated characterization needs one or two premises, got {0}")]
    UnsupportedSize(usize),
    #[error("empty premise family")]
    EmptyFamily,
    #[error(transparent)]
    Compound(#[from] CompoundError),
    #[error(transparent)]
    Coherence(#[from] CoherenceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    QcWitness,
    Iterated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WitnessRepr", into = "WitnessRepr")]
pub enum Witness {
    /// The conclusion's antecedent implies its consequent.
    Tautology,
    /// Indices of the premises whose quasi conjunction implies the conclusion.
    Premises(Vec<usize>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WitnessRepr {
    Flag(String),
    Premises(Vec<usize>),
}

impl From<Witness> for WitnessRepr {
    fn from(w: Witness) -> Self {
        match w {
            Witness::Tautology => WitnessRepr::Flag("tautology".into()),
            Witness::Premises(v) => WitnessRepr::Premises(v),
        }
    }
}

impl TryFrom<WitnessRepr> for Witness {
    type Error = String;
    fn try_from(r: WitnessRepr) -> Result<Self, String> {
        match r {
            WitnessRepr::Flag(f) if f == "tautology" => Ok(Witness::Tautology),
            WitnessRepr::Flag(f) => Err(format!("unknown witness `{f}`")),
            WitnessRepr::Premises(v) => Ok(Witness::Premises(v)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub symbol: String,
    #[serde(with = "crate::rational::serde_str")]
    pub value: Rational,
}

/// The coherent values of μ for one binding of the other previsions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuCase {
    pub bindings: Vec<Binding>,
    pub mu_set: CoherentSet,
}

impl MuCase {
    pub fn value_of(&self, name: &str) -> Option<&Rational> {
        self.bindings.iter().find(|b| b.symbol == name).map(|b| &b.value)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntailmentVerdict {
    pub holds: bool,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_set: Option<CoherentSet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cases: Vec<MuCase>,
    /// Some bindings made the antecedent identically 0 and were skipped.
    #[serde(default)]
    pub trivial_bindings: bool,
}

pub fn p_consistent(family: &[ConditionalEvent]) -> bool {
    let ones = vec![one(); family.len()];
    let (objects, a) = assess_events(family, &ones).expect("ones are in range");
    check_coherence(&objects, &a).expect("every symbol is bound")
}

fn require_consistent(family: &[ConditionalEvent]) -> Result<(), EntailmentError> {
    if family.is_empty() {
        return Err(EntailmentError::EmptyFamily);
    }
    if !p_consistent(family) {
        return Err(EntailmentError::NotPConsistent);
    }
    Ok(())
}

/// The family p-entails the conclusion iff `(1, …, 1, 0)` is incoherent.
pub fn p_entails_direct(family: &[ConditionalEvent], conclusion: &ConditionalEvent) -> Result<bool, EntailmentError> {
    require_consistent(family)?;
    let mut all = family.to_vec();
    all.push(conclusion.clone());
    let mut values = vec![one(); family.len()];
    values.push(zero());
    let (objects, a) = assess_events(&all, &values)?;
    Ok(!check_coherence(&objects, &a)?)
}

fn subsets_by_size(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in 1..=n {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.clone());
            let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { break };
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// Searches `H ⊆ E` first, then premise subsets by increasing size whose
/// quasi conjunction implies the conclusion.
pub fn p_entails_qc_witness(
    family: &[ConditionalEvent],
    conclusion: &ConditionalEvent,
) -> Result<EntailmentVerdict, EntailmentError> {
    require_consistent(family)?;
    let verdict = |witness: Option<Witness>| EntailmentVerdict {
        holds: witness.is_some(),
        method: Method::QcWitness,
        witness,
        mu_set: None,
        cases: Vec::new(),
        trivial_bindings: false,
    };
    if conclusion.is_tautological() {
        return Ok(verdict(Some(Witness::Tautology)));
    }
    for subset in subsets_by_size(family.len()) {
        let members: Vec<ConditionalEvent> = subset.iter().map(|&i| family[i].clone()).collect();
        let qc = quasi_conjunction(&members)?;
        if gn_implies(&qc, conclusion) {
            return Ok(verdict(Some(Witness::Premises(subset))));
        }
    }
    Ok(verdict(None))
}

/// Single-premise entailment: `A|H ⊆ B|K` or `K ⊆ B`.
pub fn p_entails_pair(premise: &ConditionalEvent, conclusion: &ConditionalEvent) -> Result<bool, EntailmentError> {
    if !premise.true_event().is_satisfiable() {
        return Err(EntailmentError::TrivialPremise(premise.to_string()));
    }
    Ok(gn_implies(premise, conclusion) || conclusion.is_tautological())
}

/// An iterated conditional together with what is needed to compute the
/// values of its prevision forced by coherence.
struct IteratedSetup {
    quantity: Crq,
    /// Quantities whose previsions are the free symbols.
    support: Vec<Crq>,
    /// `μ·factor` must be a coherent extension of `target`'s prevision.
    target: Crq,
    factor: Symbol,
    antecedent: Crq,
    premise_symbols: Vec<Symbol>,
    /// `(xᵢ, xⱼ, xᵢⱼ)` triples bounded by Fréchet–Hoeffding.
    frechet: Vec<(Symbol, Symbol, Symbol)>,
}

fn mu_symbol() -> Symbol {
    Symbol::compound("mu")
}

impl IteratedSetup {
    fn single(premise: &ConditionalEvent, conclusion: &ConditionalEvent) -> Result<Self, EntailmentError> {
        let (x, y, z) = (Symbol::probability("x"), Symbol::probability("y"), Symbol::compound("z"));
        let quantity = iterated2(conclusion, premise, &x, &y, &z, &mu_symbol())?;
        Ok(IteratedSetup {
            quantity,
            support: vec![indicator(premise, &x), indicator(conclusion, &y)],
            target: conjunction2(premise, conclusion, &x, &y, &z),
            factor: x.clone(),
            antecedent: indicator(premise, &x),
            premise_symbols: vec![x.clone()],
            frechet: vec![(x, y, z)],
        })
    }

    fn pair(c1: &ConditionalEvent, c2: &ConditionalEvent, conclusion: &ConditionalEvent) -> Result<Self, EntailmentError> {
        let s = Conj3Symbols::default();
        let quantity = iterated_on_conjunction(conclusion, c1, c2, &s, &mu_symbol())?;
        let target = conjunction3(c1, c2, conclusion, &s);
        let candidates = [
            (s.x1.clone(), indicator(c1, &s.x1)),
            (s.x2.clone(), indicator(c2, &s.x2)),
            (s.x3.clone(), indicator(conclusion, &s.x3)),
            (s.x12.clone(), conjunction2(c1, c2, &s.x1, &s.x2, &s.x12)),
            (s.x13.clone(), conjunction2(c1, conclusion, &s.x1, &s.x3, &s.x13)),
            (s.x23.clone(), conjunction2(c2, conclusion, &s.x2, &s.x3, &s.x23)),
        ];
        let mut referenced: BTreeSet<Symbol> = quantity.symbols();
        referenced.extend(target.symbols());
        referenced.insert(s.x12.clone());
        loop {
            let before = referenced.len();
            for (sym, q) in &candidates {
                if referenced.contains(sym) {
                    referenced.extend(q.symbols());
                }
            }
            if referenced.len() == before {
                break;
            }
        }
        let support = candidates.iter().filter(|(sym, _)| referenced.contains(sym)).map(|(_, q)| q.clone()).collect();
        Ok(IteratedSetup {
            quantity,
            support,
            target,
            factor: s.x12.clone(),
            antecedent: conjunction2(c1, c2, &s.x1, &s.x2, &s.x12),
            premise_symbols: vec![s.x1.clone(), s.x2.clone()],
            frechet: vec![
                (s.x1.clone(), s.x2.clone(), s.x12.clone()),
                (s.x1.clone(), s.x3.clone(), s.x13.clone()),
                (s.x2, s.x3, s.x23),
            ],
        })
    }

    fn for_family(family: &[ConditionalEvent], conclusion: &ConditionalEvent) -> Result<Self, EntailmentError> {
        match family {
            [] => Err(EntailmentError::EmptyFamily),
            [p] => IteratedSetup::single(p, conclusion),
            [c1, c2] => IteratedSetup::pair(c1, c2, conclusion),
            _ => Err(EntailmentError::UnsupportedSize(family.len())),
        }
    }

    fn grid(&self, premises_at_one: bool) -> Vec<Assessment> {
        let free: Vec<Symbol> = self.support.iter().map(|q| q.prevision().clone()).collect();
        let mut out = vec![Assessment::new()];
        for s in &free {
            let values = if premises_at_one && self.premise_symbols.contains(s) {
                vec![one()]
            } else {
                vec![zero(), one(), half()]
            };
            out = out
                .into_iter()
                .flat_map(|a| values.iter().map(move |v| a.clone().with(s, v.clone())))
                .collect();
        }
        out
    }

    fn frechet_ok(&self, a: &Assessment) -> bool {
        self.frechet.iter().all(|(xi, xj, xij)| match (a.get(xi), a.get(xj), a.get(xij)) {
            (Some(i), Some(j), Some(ij)) => {
                let lower = (i + j - one()).max(zero());
                ij >= &lower && ij <= i.min(j)
            }
            _ => true,
        })
    }

    fn antecedent_vanishes(&self, a: &Assessment) -> bool {
        self.antecedent.values().iter().all(|v| v.bind(a.bindings()).is_zero())
    }

    /// Coherent μ values for one binding: inside the hull of the live values
    /// and with `μ·factor` a coherent extension of the target.
    fn mu_for(&self, a: &Assessment) -> Result<CoherentSet, EntailmentError> {
        let hull = coherent_mu_set(&self.quantity, a)?;
        let ext = extension_set(&self.support, a, &self.target)?;
        let k = a.get(&self.factor).cloned().unwrap_or_else(Rational::zero);
        Ok(hull.intersect(&ext.scaled_preimage(&k)))
    }

    fn analyse(&self, premises_at_one: bool) -> Result<MuAnalysis, EntailmentError> {
        let mut cases = Vec::new();
        let mut trivial = false;
        for a in self.grid(premises_at_one) {
            if !self.frechet_ok(&a) || !check_coherence(&self.support, &a)? {
                continue;
            }
            if self.antecedent_vanishes(&a) {
                trivial = true;
                continue;
            }
            let mu_set = self.mu_for(&a)?;
            let bindings = a
                .bindings()
                .iter()
                .map(|(s, v)| Binding { symbol: s.name.clone(), value: v.clone() })
                .collect();
            cases.push(MuCase { bindings, mu_set });
        }
        let union = cases.iter().fold(CoherentSet::empty(), |acc, c| acc.union(&c.mu_set));
        let forced_one = !cases.is_empty() && cases.iter().all(|c| c.mu_set.is_point(&one()));
        Ok(MuAnalysis { forced_one, union, cases, trivial_bindings: trivial })
    }
}

/// Coherent values of the iterated conditional's prevision over a grid of
/// bindings of the other previsions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuAnalysis {
    /// Every binding forces μ = 1.
    pub forced_one: bool,
    pub union: CoherentSet,
    pub cases: Vec<MuCase>,
    pub trivial_bindings: bool,
}

/// The iterated conditional `conclusion | (premises)` for one or two
/// premises, analysed over bindings in `{0, 1/2, 1}`; with `premises_at_one`
/// the premise probabilities are fixed at 1.
pub fn iterated_mu_analysis(
    family: &[ConditionalEvent],
    conclusion: &ConditionalEvent,
    premises_at_one: bool,
) -> Result<MuAnalysis, EntailmentError> {
    IteratedSetup::for_family(family, conclusion)?.analyse(premises_at_one)
}

/// The symbolic iterated conditional used by [`p_entails_iterated`].
pub fn iterated_quantity(family: &[ConditionalEvent], conclusion: &ConditionalEvent) -> Result<Crq, EntailmentError> {
    Ok(IteratedSetup::for_family(family, conclusion)?.quantity)
}

/// Entailment holds iff coherence forces the iterated conditional of the
/// conclusion given the (conjoined) premises to be 1.
pub fn p_entails_iterated(
    family: &[ConditionalEvent],
    conclusion: &ConditionalEvent,
) -> Result<EntailmentVerdict, EntailmentError> {
    if family.len() > 2 {
        return Err(EntailmentError::UnsupportedSize(family.len()));
    }
    require_consistent(family)?;
    let analysis = iterated_mu_analysis(family, conclusion, false)?;
    Ok(EntailmentVerdict {
        holds: analysis.forced_one,
        method: Method::Iterated,
        witness: None,
        mu_set: Some(analysis.union),
        cases: analysis.cases,
        trivial_bindings: analysis.trivial_bindings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Characterization {
    ConclusionConstantOne,
    /// `(conclusion)|(premise i) = 1`.
    IteratedSingleton(usize),
    IteratedPairQc,
    None,
}

/// Tests, in order: constant conclusion, each premise alone, and the quasi
/// conjunction of both.
pub fn disjunctive_characterization(
    family: &[ConditionalEvent],
    conclusion: &ConditionalEvent,
) -> Result<Characterization, EntailmentError> {
    if family.len() != 2 {
        return Err(EntailmentError::UnsupportedSize(family.len()));
    }
    require_consistent(family)?;
    if conclusion.is_tautological() {
        return Ok(Characterization::ConclusionConstantOne);
    }
    for (i, premise) in family.iter().enumerate() {
        match iterated_mu_analysis(std::slice::from_ref(premise), conclusion, false) {
            Ok(a) if a.forced_one => return Ok(Characterization::IteratedSingleton(i)),
            Ok(_) | Err(EntailmentError::Compound(CompoundError::TrivialIterated(_))) => {}
            Err(e) => return Err(e),
        }
    }
    let qc = quasi_conjunction(family)?;
    match iterated_mu_analysis(&[qc], conclusion, false) {
        Ok(a) if a.forced_one => Ok(Characterization::IteratedPairQc),
        Ok(_) | Err(EntailmentError::Compound(CompoundError::TrivialIterated(_))) => Ok(Characterization::None),
        Err(e) => Err(e),
    }
}

/// `QC(F) | C(F) = 1` for a p-consistent pair.
pub fn verify_qc_theorem(c1: &ConditionalEvent, c2: &ConditionalEvent) -> Result<bool, EntailmentError> {
    let family = [c1.clone(), c2.clone()];
    require_consistent(&family)?;
    let qc = quasi_conjunction(&family)?;
    Ok(iterated_mu_analysis(&family, &qc, false)?.forced_one)
}
