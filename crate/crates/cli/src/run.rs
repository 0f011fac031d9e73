//! Query execution and reports.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use pentail::coherence::{check_coherence_report, extension_set, Assessment, CoherenceReport, CoherentSet, RationalInterval};
use pentail::compound::{conjunction2, indicator, Crq, TableReport};
use pentail::entailment::{
    disjunctive_characterization, iterated_quantity, p_consistent, p_entails_direct, p_entails_iterated,
    p_entails_pair, p_entails_qc_witness, Characterization, EntailmentVerdict, Witness,
};
use pentail::event::{Atom, ConditionalEvent};
use pentail::rules::{builtin_rules, format_reports, rule_by_name, verify_rule, RuleReport};
use pentail::{CompoundError, EntailmentError, Symbol};
use serde::{Deserialize, Serialize};

use crate::dsl::{Named, ProblemFile, Query, QueryKind, Target};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Verbosity {
    /// Verdicts only.
    Brief,
    /// Verdicts and coherence certificates.
    #[default]
    Normal,
    /// Everything, including the per-binding μ cases.
    Full,
}

impl FromStr for Verbosity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "brief" => Ok(Verbosity::Brief),
            "normal" => Ok(Verbosity::Normal),
            "full" => Ok(Verbosity::Full),
            _ => Err(format!("unknown verbosity `{s}` (brief, normal, full)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub max_atoms: usize,
    pub tables: bool,
    pub verbosity: Verbosity,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_atoms: 8, tables: false, verbosity: Verbosity::Normal }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntailmentReport {
    pub premises: Vec<String>,
    pub conclusion: String,
    pub p_consistent: bool,
    pub direct: bool,
    pub qc: EntailmentVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterated: Option<EntailmentVerdict>,
    /// Single premise only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<bool>,
    /// Two premises only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub characterization: Option<Characterization>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Coherence(CoherenceReport),
    Extension {
        target: String,
        set: CoherentSet,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        interval: Option<RationalInterval>,
    },
    Entailment(EntailmentReport),
    Iterated {
        quantity: String,
        verdict: EntailmentVerdict,
    },
    Rules {
        reports: Vec<RuleReport>,
    },
    Error {
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryTable {
    /// What each symbol of the table stands for.
    pub legend: Vec<String>,
    #[serde(flatten)]
    pub table: TableReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryReport {
    pub line: usize,
    pub column: usize,
    pub query: String,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<QueryTable>,
}

impl QueryReport {
    /// An engine error, or a builtin rule that did not reproduce.
    pub fn failed(&self) -> bool {
        match &self.outcome {
            Outcome::Error { .. } => true,
            Outcome::Rules { reports } => reports.iter().any(|r| !r.pass),
            _ => false,
        }
    }
}

fn symbol_of(name: &str) -> Symbol {
    Symbol::probability(name)
}

/// Indicators of the assessed conditionals, labelled by name.
fn assessed(problem: &ProblemFile, q: &Query, skip: &[&str]) -> (Vec<Crq>, Assessment) {
    let mut objects = Vec::new();
    let mut a = Assessment::new();
    for (name, value) in &q.assessments {
        if skip.contains(&name.as_str()) {
            continue;
        }
        let s = symbol_of(name);
        objects.push(indicator(&problem.conds[name], &s).with_label(name.clone()));
        a.insert(s, value.clone()).expect("values were range-checked when parsed");
    }
    (objects, a)
}

fn atom_count<'a>(events: impl IntoIterator<Item = &'a ConditionalEvent>) -> usize {
    let atoms: BTreeSet<Atom> = events.into_iter().flat_map(|c| c.universe().atoms().to_vec()).collect();
    atoms.len()
}

fn involved<'a>(problem: &'a ProblemFile, q: &'a Query) -> Vec<&'a ConditionalEvent> {
    let mut out: Vec<&ConditionalEvent> = q.assessments.keys().map(|n| &problem.conds[n]).collect();
    match &q.kind {
        QueryKind::Coherent | QueryKind::Rule(_) => {}
        QueryKind::Extend(Target::Event(n)) => out.push(&n.event),
        QueryKind::Extend(Target::Conjunction(a, b)) => out.extend([&a.event, &b.event]),
        QueryKind::Entails { premises, conclusion } | QueryKind::Iterated { conclusion, premises } => {
            out = premises.iter().map(|p| &p.event).collect();
            out.push(&conclusion.event);
        }
    }
    out
}

fn x(name: &str) -> Symbol {
    Symbol::probability(name)
}

fn table(q: &Crq, legend: Vec<String>) -> QueryTable {
    QueryTable { legend, table: q.table_report() }
}

fn iterated_legend(premises: &[Named], conclusion: &Named) -> Vec<String> {
    match premises {
        [p] => vec![
            format!("x = P({})", p.label),
            format!("y = P({})", conclusion.label),
            format!("mu = P(({}) | ({}))", conclusion.label, p.label),
        ],
        [a, b] => vec![
            format!("x1 = P({}), x2 = P({}), x3 = P({})", a.label, b.label, conclusion.label),
            "xij = prevision of the conjunction of the i-th and j-th".into(),
            format!("mu = P(({}) | ({} & {}))", conclusion.label, a.label, b.label),
        ],
        _ => Vec::new(),
    }
}

fn run_query(problem: &ProblemFile, q: &Query, opts: &Options) -> Result<(Outcome, Vec<QueryTable>), String> {
    let atoms = atom_count(involved(problem, q));
    if atoms > opts.max_atoms {
        return Err(format!("query involves {atoms} atoms, more than the limit of {}", opts.max_atoms));
    }
    let mut tables = Vec::new();
    let outcome = match &q.kind {
        QueryKind::Coherent => {
            let (objects, a) = assessed(problem, q, &[]);
            if objects.is_empty() {
                return Err("no assessments to check".into());
            }
            Outcome::Coherence(check_coherence_report(&objects, &a).map_err(|e| e.to_string())?)
        }
        QueryKind::Extend(target) => {
            let (label, skip, quantity, shown) = match target {
                Target::Event(n) => {
                    let skip: Vec<&str> = n.cond.iter().map(|s| s.as_str()).collect();
                    let q = indicator(&n.event, &x("target"));
                    let legend = vec![format!("x = P({})", n.label)];
                    (n.label.clone(), skip, q, table(&indicator(&n.event, &x("x")), legend))
                }
                Target::Conjunction(a, b) => {
                    let (sa, sb) = (a.cond.clone().unwrap_or_default(), b.cond.clone().unwrap_or_default());
                    let label = format!("{} & {}", a.label, b.label);
                    let q = conjunction2(&a.event, &b.event, &symbol_of(&sa), &symbol_of(&sb), &Symbol::compound(&label));
                    let shown = conjunction2(&a.event, &b.event, &x("x"), &x("y"), &Symbol::compound("z"));
                    let legend = vec![
                        format!("x = P({})", a.label),
                        format!("y = P({})", b.label),
                        format!("z = P({label})"),
                    ];
                    (label, Vec::new(), q, table(&shown, legend))
                }
            };
            tables.push(shown);
            let (objects, a) = assessed(problem, q, &skip);
            let set = extension_set(&objects, &a, &quantity).map_err(|e| e.to_string())?;
            let interval = set.as_interval().cloned();
            Outcome::Extension { target: label, set, interval }
        }
        QueryKind::Entails { premises, conclusion } => {
            let family: Vec<ConditionalEvent> = premises.iter().map(|p| p.event.clone()).collect();
            let c = &conclusion.event;
            let direct = p_entails_direct(&family, c).map_err(|e| e.to_string())?;
            let qc = p_entails_qc_witness(&family, c).map_err(|e| e.to_string())?;
            let mut notes = Vec::new();
            let iterated = if family.len() <= 2 {
                match p_entails_iterated(&family, c) {
                    Ok(v) => {
                        if opts.tables {
                            let quantity = iterated_quantity(&family, c).map_err(|e| e.to_string())?;
                            tables.push(table(&quantity, iterated_legend(premises, conclusion)));
                        }
                        Some(v)
                    }
                    Err(EntailmentError::Compound(e @ CompoundError::TrivialIterated(_))) => {
                        notes.push(e.to_string());
                        None
                    }
                    Err(e) => return Err(e.to_string()),
                }
            } else {
                notes.push("the iterated route takes at most two premises".into());
                None
            };
            let pair = match family.as_slice() {
                [p] => match p_entails_pair(p, c) {
                    Ok(v) => Some(v),
                    Err(e) => {
                        notes.push(e.to_string());
                        None
                    }
                },
                _ => None,
            };
            let characterization = match family.len() {
                2 => Some(disjunctive_characterization(&family, c).map_err(|e| e.to_string())?),
                _ => None,
            };
            let agree = qc.holds == direct && iterated.as_ref().is_none_or(|v| v.holds == direct) && pair.is_none_or(|v| v == direct);
            if !agree {
                return Err("decision procedures disagree".into());
            }
            Outcome::Entailment(EntailmentReport {
                premises: premises.iter().map(|p| p.event.to_string()).collect(),
                conclusion: c.to_string(),
                p_consistent: p_consistent(&family),
                direct,
                qc,
                iterated,
                pair,
                characterization,
                notes,
            })
        }
        QueryKind::Iterated { conclusion, premises } => {
            let family: Vec<ConditionalEvent> = premises.iter().map(|p| p.event.clone()).collect();
            let quantity = iterated_quantity(&family, &conclusion.event).map_err(|e| e.to_string())?;
            if opts.tables {
                tables.push(table(&quantity, iterated_legend(premises, conclusion)));
            }
            let verdict = p_entails_iterated(&family, &conclusion.event).map_err(|e| e.to_string())?;
            Outcome::Iterated { quantity: quantity.label().to_string(), verdict }
        }
        QueryKind::Rule(name) => {
            let rules = if name == "all" {
                builtin_rules()
            } else {
                vec![rule_by_name(name).ok_or_else(|| format!("no builtin rule named `{name}`"))?]
            };
            Outcome::Rules { reports: rules.iter().map(verify_rule).collect() }
        }
    };
    if !opts.tables {
        tables.clear();
    }
    Ok((outcome, tables))
}

fn trim(outcome: &mut Outcome, verbosity: Verbosity) {
    let strip_cases = |v: &mut EntailmentVerdict| v.cases.clear();
    match outcome {
        Outcome::Coherence(r) if verbosity == Verbosity::Brief => r.certificate.clear(),
        Outcome::Entailment(r) if verbosity != Verbosity::Full => {
            strip_cases(&mut r.qc);
            r.iterated.as_mut().map(strip_cases);
        }
        Outcome::Iterated { verdict, .. } if verbosity != Verbosity::Full => strip_cases(verdict),
        _ => {}
    }
}

/// Runs every query in order. A failing query is reported and does not stop
/// the ones after it.
pub fn run_problem(problem: &ProblemFile, opts: &Options) -> Vec<QueryReport> {
    problem
        .queries
        .iter()
        .map(|q| {
            let (mut outcome, tables) = match run_query(problem, q, opts) {
                Ok(r) => r,
                Err(message) => (Outcome::Error { message }, Vec::new()),
            };
            trim(&mut outcome, opts.verbosity);
            QueryReport { line: q.location.line, column: q.location.column, query: q.text.clone(), outcome, tables }
        })
        .collect()
}

/// Verification reports for the named builtin rules, or all of them.
pub fn run_rules(names: &[String]) -> Result<Vec<RuleReport>, String> {
    if names.is_empty() || names.iter().any(|n| n == "all") {
        return Ok(builtin_rules().iter().map(verify_rule).collect());
    }
    names
        .iter()
        .map(|n| rule_by_name(n).map(|r| verify_rule(&r)).ok_or_else(|| format!("no builtin rule named `{n}`")))
        .collect()
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn witness_text(w: &Option<Witness>) -> String {
    match w {
        None => "none".into(),
        Some(Witness::Tautology) => "conclusion antecedent implies its consequent".into(),
        Some(Witness::Premises(v)) => {
            let v: Vec<String> = v.iter().map(|i| (i + 1).to_string()).collect();
            format!("premises {{{}}}", v.join(", "))
        }
    }
}

fn verdict_text(out: &mut String, v: &EntailmentVerdict, verbosity: Verbosity) {
    let mu = v.mu_set.as_ref().map_or("-".to_string(), |m| m.to_string());
    let _ = writeln!(out, "  coherent mu values: {mu}");
    if v.trivial_bindings {
        let _ = writeln!(out, "  some bindings make the antecedent vanish and were set aside");
    }
    if verbosity == Verbosity::Full {
        for c in &v.cases {
            let b: Vec<String> = c.bindings.iter().map(|b| format!("{}={}", b.symbol, b.value)).collect();
            let _ = writeln!(out, "    {} -> {}", b.join(" "), c.mu_set);
        }
    }
}

fn table_text(out: &mut String, t: &QueryTable) {
    let _ = writeln!(out, "  {} (prevision {}, given {})", t.table.quantity, t.table.prevision, t.table.conditioning);
    let width = t.table.rows.iter().map(|r| r.constituent.chars().count()).max().unwrap_or(0).max("constituent".len());
    let _ = writeln!(out, "    {:<width$}  value", "constituent");
    for r in &t.table.rows {
        let _ = writeln!(out, "    {:<width$}  {}", r.constituent, r.value);
    }
    for l in &t.legend {
        let _ = writeln!(out, "    {l}");
    }
}

/// Plain-text rendering of a report stream.
pub fn render_text(reports: &[QueryReport], verbosity: Verbosity) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(out, "{}:{}: {}?", r.line, r.column, r.query);
        match &r.outcome {
            Outcome::Coherence(c) => {
                let verdict = if c.coherent { "coherent" } else { "not coherent" };
                let _ = writeln!(out, "  {verdict} ({} level{})", c.recursion_depth, if c.recursion_depth == 1 { "" } else { "s" });
                if verbosity != Verbosity::Brief {
                    for (i, level) in c.certificate.iter().enumerate() {
                        let _ = writeln!(out, "  level {}: {}", i + 1, level.objects.join(", "));
                        for w in &level.weights {
                            let _ = writeln!(out, "    {}  {}", w.lambda, w.constituent);
                        }
                        if !level.feasible {
                            let _ = writeln!(out, "    no solution");
                        }
                    }
                }
            }
            Outcome::Extension { target, set, .. } => {
                let _ = writeln!(out, "  coherent values of P({target}): {set}");
            }
            Outcome::Entailment(e) => {
                let _ = writeln!(out, "  p-entails: {}", yes_no(e.direct));
                let _ = writeln!(out, "  quasi conjunction witness: {}", witness_text(&e.qc.witness));
                if let Some(p) = e.pair {
                    let _ = writeln!(out, "  single-premise criterion: {}", yes_no(p));
                }
                if let Some(c) = e.characterization {
                    let _ = writeln!(out, "  characterization: {}", serde_json::to_value(c).unwrap_or_default().as_str().unwrap_or("-"));
                }
                if let Some(v) = &e.iterated {
                    verdict_text(&mut out, v, verbosity);
                }
                for n in &e.notes {
                    let _ = writeln!(out, "  note: {n}");
                }
            }
            Outcome::Iterated { verdict, .. } => {
                let _ = writeln!(out, "  equals 1 under coherence: {}", yes_no(verdict.holds));
                verdict_text(&mut out, verdict, verbosity);
            }
            Outcome::Rules { reports } => {
                for line in format_reports(reports).lines() {
                    let _ = writeln!(out, "  {line}");
                }
            }
            Outcome::Error { message } => {
                let _ = writeln!(out, "  error: {message}");
            }
        }
        for t in &r.tables {
            table_text(&mut out, t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_problem;

    fn run(text: &str) -> Vec<QueryReport> {
        run_problem(&parse_problem(text).unwrap(), &Options { tables: true, ..Options::default() })
    }

    #[test]
    fn modus_ponens_extension() {
        let r = run("atom A C; cond a = A; cond c_given_a = C | A; assess P(a) = 1; assess P(c_given_a) = 1; extend C?");
        let Outcome::Extension { interval, .. } = &r[0].outcome else { panic!("{r:?}") };
        assert_eq!(interval.as_ref().unwrap().to_string(), "{1}");
    }

    #[test]
    fn target_assessment_is_left_out() {
        let r = run("atom A B; cond a = A; cond b = B | A; assess P(a) = 1/2; assess P(b) = 1/3; extend b?");
        let Outcome::Extension { set, .. } = &r[0].outcome else { panic!() };
        assert_eq!(set.to_string(), "[0,1]");
    }

    #[test]
    fn conjunction_table_has_five_rows() {
        let r = run("atom A H B K; cond c1 = A | H; cond c2 = B | K; assess P(c1) = 1/2; assess P(c2) = 1/2; extend c1 & c2?");
        let Outcome::Extension { set, .. } = &r[0].outcome else { panic!("{r:?}") };
        assert_eq!(set.to_string(), "[0,1/2]");
        let values: Vec<&str> = r[0].tables[0].table.rows.iter().map(|r| r.value.as_str()).collect();
        assert_eq!(values, ["1", "0", "x", "y", "z"]);
    }

    #[test]
    fn errors_do_not_stop_later_queries() {
        let r = run("atom A; cond a = A; coherent? rule nonsense? assess P(a) = 1/2; coherent?");
        assert!(r[0].failed());
        assert!(r[1].failed());
        assert!(!r[2].failed());
    }

    #[test]
    fn atom_limit() {
        let text = "atom A B C; cond c = A | B & C; entails {c} => A?";
        let opts = Options { max_atoms: 2, ..Options::default() };
        let r = run_problem(&parse_problem(text).unwrap(), &opts);
        assert!(r[0].failed());
    }
}
