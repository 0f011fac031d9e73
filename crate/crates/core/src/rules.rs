//! Named inference rules with their expected verdicts, and a harness that
//! recomputes every verdict.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::coherence::{assess_events, extension_interval, CoherentSet, RationalInterval};
use crate::compound::{indicator, quasi_conjunction};
use crate::entailment::{
    iterated_mu_analysis, p_consistent, p_entails_direct, p_entails_qc_witness, EntailmentError, Witness,
};
use crate::event::{Atom, ConditionalEvent};
use crate::rational::{fmt_rational, one};
use crate::region::{has_model, Bound, Constrained};
use crate::symbolic::Symbol;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expected {
    pub p_valid: bool,
    pub mu_set: CoherentSet,
    pub interval: RationalInterval,
    /// Whether premises at 1 plus the side conditions force the conclusion to 1.
    pub side_claim: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub name: String,
    pub title: String,
    pub atoms: Vec<Atom>,
    pub premises: Vec<ConditionalEvent>,
    pub conclusion: ConditionalEvent,
    /// Strict constraints on further conditional events (negated defaults).
    pub side_conditions: Vec<Constrained>,
    pub expected: Expected,
    /// The expected result is taken from outside the rule's own derivation.
    pub externally_sourced: bool,
}

fn ce(s: &str) -> ConditionalEvent {
    ConditionalEvent::parse(s).expect("builtin rule events parse")
}

fn rule(name: &str, title: &str, premises: &[&str], conclusion: &str, p_valid: bool) -> RuleInstance {
    let premises: Vec<ConditionalEvent> = premises.iter().map(|s| ce(s)).collect();
    let conclusion = ce(conclusion);
    let mut atoms = std::collections::BTreeSet::new();
    for c in premises.iter().chain(std::iter::once(&conclusion)) {
        atoms.extend(c.universe().atoms().iter().cloned());
    }
    let (mu_set, interval) = if p_valid {
        (CoherentSet::point(one()), RationalInterval::point(one()))
    } else {
        (CoherentSet::unit(), RationalInterval::unit())
    };
    RuleInstance {
        name: name.into(),
        title: title.into(),
        atoms: atoms.into_iter().collect(),
        premises,
        conclusion,
        side_conditions: Vec::new(),
        expected: Expected { p_valid, mu_set, interval, side_claim: None },
        externally_sourced: false,
    }
}

fn with_default(mut r: RuleInstance, name: &str, title: &str, side: &str) -> RuleInstance {
    r.name = name.into();
    r.title = title.into();
    r.side_conditions = vec![Constrained::new(ce(side), Bound::Lt(one()))];
    r.expected.side_claim = Some(true);
    r
}

pub fn builtin_rules() -> Vec<RuleInstance> {
    let qand_conclusion = quasi_conjunction(&[ce("A | H"), ce("B | K")]).expect("nonempty");
    let mut qand = rule("qand", "Quasi And", &["A | H", "B | K"], "A | H", true);
    qand.conclusion = qand_conclusion;
    let affirmation = rule("affirmation-of-consequent", "Affirmation of the consequent", &["C", "C | A"], "A", false);
    let transitivity = rule("transitivity", "Transitivity", &["C | B", "B | A"], "C | A", false);
    let mut transitivity_default = with_default(
        transitivity.clone(),
        "transitivity-with-default",
        "Transitivity with a negated default",
        "~A | (A | B)",
    );
    transitivity_default.externally_sourced = true;
    vec![
        rule("mp", "Modus Ponens", &["C | A", "A"], "C", true),
        rule("mt", "Modus Tollens", &["C | A", "~C"], "~A", true),
        rule("bayes", "Bayes", &["E | A & H", "H | A"], "H | E & A", true),
        rule("and", "And", &["B | A", "C | A"], "B & C | A", true),
        rule("cut", "Cut", &["C | A & B", "B | A"], "C | A", true),
        rule("cm", "Cautious Monotonicity", &["C | A", "B | A"], "C | A & B", true),
        rule("or", "Or", &["C | A", "C | B"], "C | (A | B)", true),
        qand,
        rule("denial-of-antecedent", "Denial of the antecedent", &["~A", "C | A"], "~C", false),
        affirmation.clone(),
        transitivity,
        with_default(affirmation, "affirmation-with-default", "Affirmation with a negated default", "C | ~A"),
        transitivity_default,
    ]
}

pub fn rule_by_name(name: &str) -> Option<RuleInstance> {
    builtin_rules().into_iter().find(|r| r.name == name)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideClaim {
    pub claim: String,
    /// No coherent model satisfies the premises and side conditions while
    /// giving the conclusion probability below 1.
    pub holds: bool,
    /// Premises and side conditions have a coherent model at all.
    pub non_vacuous: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedReport {
    pub p_valid: bool,
    pub mu_set: CoherentSet,
    pub interval: RationalInterval,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_claim: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleReport {
    pub name: String,
    pub title: String,
    pub premises: Vec<String>,
    pub conclusion: String,
    pub p_consistent: bool,
    pub p_valid: bool,
    pub p_valid_qc: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_valid_iterated: Option<bool>,
    /// Coherent values of the iterated conditional with premises at 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_set: Option<CoherentSet>,
    /// Some bindings make the conjoined premises identically 0.
    pub trivial_bindings: bool,
    /// Coherent probabilities of the conclusion with premises at 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<RationalInterval>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub side_conditions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_claim: Option<SideClaim>,
    pub externally_sourced: bool,
    pub expected: ExpectedReport,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    pub pass: bool,
}

fn side_claim(r: &RuleInstance) -> SideClaim {
    let mut items: Vec<Constrained> =
        r.premises.iter().map(|p| Constrained::new(p.clone(), Bound::Eq(one()))).collect();
    items.extend(r.side_conditions.iter().cloned());
    let non_vacuous = has_model(&items);
    items.push(Constrained::new(r.conclusion.clone(), Bound::Lt(one())));
    let sides: Vec<String> = r.side_conditions.iter().map(|c| c.to_string()).collect();
    SideClaim {
        claim: format!("{} implies P({}) = 1", sides.join(" and "), r.conclusion),
        holds: !has_model(&items),
        non_vacuous,
    }
}

/// Propagation of all-ones premises to the conclusion.
fn propagation(r: &RuleInstance) -> Result<RationalInterval, EntailmentError> {
    let (objects, a) = assess_events(&r.premises, &vec![one(); r.premises.len()])?;
    let target = indicator(&r.conclusion, &Symbol::probability("z"));
    Ok(extension_interval(&objects, &a, &target)?)
}

pub fn verify_rule(r: &RuleInstance) -> RuleReport {
    let mut errors = Vec::new();
    let consistent = p_consistent(&r.premises);
    let p_valid = p_entails_direct(&r.premises, &r.conclusion).unwrap_or_else(|e| {
        errors.push(e.to_string());
        false
    });
    let qc = p_entails_qc_witness(&r.premises, &r.conclusion);
    let (p_valid_qc, witness) = match qc {
        Ok(v) => (v.holds, v.witness),
        Err(e) => {
            errors.push(e.to_string());
            (false, None)
        }
    };
    let (p_valid_iterated, trivial_bindings) = match iterated_mu_analysis(&r.premises, &r.conclusion, false) {
        Ok(a) => (Some(a.forced_one), a.trivial_bindings),
        Err(e) => {
            errors.push(e.to_string());
            (None, false)
        }
    };
    let mu_set = match iterated_mu_analysis(&r.premises, &r.conclusion, true) {
        Ok(a) => Some(a.union),
        Err(e) => {
            errors.push(e.to_string());
            None
        }
    };
    let interval = propagation(r).map_err(|e| errors.push(e.to_string())).ok();
    let claim = (!r.side_conditions.is_empty()).then(|| side_claim(r));
    let e = &r.expected;
    let pass = errors.is_empty()
        && consistent
        && p_valid == e.p_valid
        && p_valid_qc == e.p_valid
        && p_valid_iterated == Some(e.p_valid)
        && mu_set.as_ref() == Some(&e.mu_set)
        && interval.as_ref() == Some(&e.interval)
        && claim.as_ref().map(|c| c.holds && c.non_vacuous) == e.side_claim;
    RuleReport {
        name: r.name.clone(),
        title: r.title.clone(),
        premises: r.premises.iter().map(|p| p.to_string()).collect(),
        conclusion: r.conclusion.to_string(),
        p_consistent: consistent,
        p_valid,
        p_valid_qc,
        witness,
        p_valid_iterated,
        mu_set,
        trivial_bindings,
        interval,
        side_conditions: r.side_conditions.iter().map(|c| c.to_string()).collect(),
        side_claim: claim,
        externally_sourced: r.externally_sourced,
        expected: ExpectedReport {
            p_valid: e.p_valid,
            mu_set: e.mu_set.clone(),
            interval: e.interval.clone(),
            side_claim: e.side_claim,
        },
        errors,
        pass,
    }
}

fn fmt_witness(w: &Option<Witness>) -> String {
    match w {
        None => "-".into(),
        Some(Witness::Tautology) => "tautology".into(),
        Some(Witness::Premises(v)) => {
            let v: Vec<String> = v.iter().map(|i| (i + 1).to_string()).collect();
            format!("{{{}}}", v.join(","))
        }
    }
}

/// An aligned plain-text table, one rule per line.
pub fn format_reports(reports: &[RuleReport]) -> String {
    let header = ["rule", "premises", "conclusion", "p-valid", "witness", "mu set", "interval", "side claim", "result"];
    let rows: Vec<[String; 9]> = reports
        .iter()
        .map(|r| {
            [
                r.name.clone(),
                r.premises.join(", "),
                r.conclusion.clone(),
                r.p_valid.to_string(),
                fmt_witness(&r.witness),
                r.mu_set.as_ref().map_or("-".into(), |m| m.to_string()),
                r.interval.as_ref().map_or("-".into(), |i| format!("[{},{}]", fmt_rational(&i.lower), fmt_rational(&i.upper))),
                r.side_claim.as_ref().map_or("-".into(), |c| c.holds.to_string()),
                if r.pass { "pass".into() } else { "FAIL".into() },
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[&str]| {
        let padded: Vec<String> =
            cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}", w = *w)).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&mut out, &header);
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(|s| s.as_str()).collect();
        line(&mut out, &cells);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirteen_rules() {
        let rules = builtin_rules();
        assert_eq!(rules.len(), 13);
        let names: std::collections::BTreeSet<&str> = rules.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names.len(), 13);
        assert_eq!(rule_by_name("or").unwrap().expected.mu_set.to_string(), "{1}");
        assert!(!rule_by_name("transitivity").unwrap().expected.p_valid);
    }

    #[test]
    fn modus_tollens_flags_trivial_bindings() {
        let r = verify_rule(&rule_by_name("mt").unwrap());
        assert!(r.pass, "{r:?}");
        assert!(r.trivial_bindings);
        assert_eq!(r.mu_set, Some(CoherentSet::point(one())));
    }

    #[test]
    fn affirmation_with_default_claim() {
        let r = verify_rule(&rule_by_name("affirmation-with-default").unwrap());
        let claim = r.side_claim.clone().unwrap();
        assert!(claim.holds && claim.non_vacuous);
        assert!(r.pass, "{r:?}");
    }
}
