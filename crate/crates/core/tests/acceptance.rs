//! Acceptance run: one line per criterion.

mod support;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use pentail::coherence::{assess_events, check_coherence, extension_interval, Assessment, CoherentSet, RationalInterval};
use pentail::compound::{conjunction2, conjunction3, indicator, iterated2, iterated_on_conjunction, Conj3Symbols, Crq};
use pentail::entailment::{p_consistent, p_entails_direct, p_entails_iterated, verify_qc_theorem, MuCase};
use pentail::event::{ConditionalEvent, Universe};
use pentail::rules::{rule_by_name, verify_rule};
use pentail::{Rational, Symbol, SymbolicValue, TruthValue};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

type Outcome = Result<String, String>;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn zero() -> Rational {
    r(0, 1)
}

fn one() -> Rational {
    r(1, 1)
}

fn p(name: &str) -> Symbol {
    Symbol::probability(name)
}

fn mu() -> Symbol {
    Symbol::compound("mu")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    ensure(start.elapsed() < limit, || format!("took {:?}, limit {limit:?}", start.elapsed()))
}

fn frechet() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (c1, c2) = (ce("A | H"), ce("B | K"));
    // assess_events names the previsions p1, p2
    let target = conjunction2(&c1, &c2, &p("p1"), &p("p2"), &Symbol::compound("z"));
    for _ in 0..100 {
        let (x, y) = (random_dyadic(&mut rng, 5), random_dyadic(&mut rng, 5));
        let (objects, a) = assess_events(&[c1.clone(), c2.clone()], &[x.clone(), y.clone()]).map_err(|e| e.to_string())?;
        let got = extension_interval(&objects, &a, &target).map_err(|e| e.to_string())?;
        let lo = (&x + &y - one()).max(zero());
        let hi = x.clone().min(y.clone());
        ensure(got == RationalInterval::closed(lo.clone(), hi.clone()), || {
            format!("x={x} y={y}: got {got}, expected [{lo},{hi}]")
        })?;
    }
    within(Duration::from_secs(30), start)?;
    Ok("100 dyadic points".into())
}

fn modus_ponens() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let target = indicator(&ce("C"), &p("z"));
    for _ in 0..50 {
        let x = r(rng.gen_range(0..=12), 12);
        let y = r(rng.gen_range(0..=10), 10);
        let (objects, a) = assess_events(&[ce("A"), ce("C | A")], &[x.clone(), y.clone()]).map_err(|e| e.to_string())?;
        let got = extension_interval(&objects, &a, &target).map_err(|e| e.to_string())?;
        let lo = &x * &y;
        let hi = &lo + one() - &x;
        ensure(got == RationalInterval::closed(lo.clone(), hi.clone()), || {
            format!("x={x} y={y}: got {got}, expected [{lo},{hi}]")
        })?;
    }
    within(Duration::from_secs(10), start)?;
    Ok("50 points".into())
}

/// Coherent μ cases gathered by criteria 3 and 8 for the identity checks.
#[derive(Default)]
struct Collected {
    single: Vec<(ConditionalEvent, ConditionalEvent, Vec<MuCase>)>,
    pair: Vec<(ConditionalEvent, ConditionalEvent, ConditionalEvent, Vec<MuCase>)>,
}

/// Every conditional event over the universe up to logical equivalence.
fn all_events(u: &Universe) -> Vec<ConditionalEvent> {
    let n = u.world_count();
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let truth: Vec<TruthValue> = (0..n)
            .map(|_| {
                let t = [TruthValue::True, TruthValue::False, TruthValue::Void][c % 3];
                c /= 3;
                t
            })
            .collect();
        out.extend(from_truth(u, &truth));
    }
    out
}

/// Literal-built events `E|H` over four atoms, deduplicated by equivalence.
fn literal_events() -> Vec<ConditionalEvent> {
    let u = universe(4);
    let mut exprs = vec!["TRUE".to_string()];
    for a in ["A", "B", "C", "D"] {
        exprs.push(a.into());
        exprs.push(format!("~{a}"));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for e in &exprs {
        for h in &exprs {
            let c = ce(&format!("{e} | {h}"));
            if seen.insert(truth_vector(&u, &c)) {
                out.push(c);
            }
        }
    }
    out
}

fn theorem4(collected: &mut Collected) -> Outcome {
    let mut pools = vec![all_events(&universe(2)), literal_events()];
    let u3 = universe(3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = BTreeSet::new();
    let mut formula_pool = Vec::new();
    while formula_pool.len() < 40 {
        let c = random_formula_event(&mut rng, &u3);
        if seen.insert(truth_vector(&u3, &c)) {
            formula_pool.push(c);
        }
    }
    pools.push(formula_pool);
    let (mut total, mut entailed) = (0usize, 0usize);
    for pool in &pools {
        for premise in pool {
            if !premise.true_event().is_satisfiable() {
                continue;
            }
            for conclusion in pool {
                let direct = p_entails_direct(std::slice::from_ref(premise), conclusion).map_err(|e| e.to_string())?;
                let verdict =
                    p_entails_iterated(std::slice::from_ref(premise), conclusion).map_err(|e| e.to_string())?;
                let forced = verdict.mu_set.as_ref().is_some_and(|m| m.is_point(&one()));
                ensure(direct == verdict.holds && forced == verdict.holds, || {
                    format!("{premise} => {conclusion}: direct {direct}, iterated {:?}", verdict.mu_set)
                })?;
                total += 1;
                entailed += direct as usize;
                collected.single.push((premise.clone(), conclusion.clone(), verdict.cases));
            }
        }
    }
    ensure(total >= 200, || format!("only {total} pairs"))?;
    Ok(format!("{total} pairs, {entailed} entailed"))
}

fn system_p() -> Outcome {
    let names = ["and", "cut", "cm", "or", "mp", "mt", "bayes", "qand"];
    for name in names {
        let report = verify_rule(&rule_by_name(name).ok_or(format!("missing rule {name}"))?);
        ensure(report.pass && report.p_valid, || format!("{name}: {report:?}"))?;
        ensure(report.mu_set == Some(CoherentSet::point(one())), || format!("{name}: mu set {:?}", report.mu_set))?;
    }
    // Bayes with A the sure event
    let bayes = p_entails_iterated(&[ce("E & H")], &ce("H | E")).map_err(|e| e.to_string())?;
    ensure(bayes.holds, || "H|E given EH".into())?;

    let s = Conj3Symbols::default();
    let q = iterated_on_conjunction(&ce("C | (A | B)"), &ce("C | A"), &ce("C | B"), &s, &mu()).map_err(|e| e.to_string())?;
    let mut values: Vec<String> = q.values().iter().map(|v| v.to_string()).collect();
    values.sort();
    values.dedup();
    let mut expected: Vec<String> =
        ["1", "x1 + mu - mu*x1", "x2 + mu - mu*x2", "mu"].iter().map(|s| s.to_string()).collect();
    expected.sort();
    ensure(values == expected, || format!("Or table values {values:?}"))?;
    Ok(format!("{} rules, Or table reduced", names.len()))
}

fn non_valid() -> Outcome {
    for name in ["denial-of-antecedent", "affirmation-of-consequent"] {
        let report = verify_rule(&rule_by_name(name).unwrap());
        ensure(!report.p_valid && report.mu_set == Some(CoherentSet::unit()), || format!("{name}: {report:?}"))?;
    }
    let report = verify_rule(&rule_by_name("transitivity").unwrap());
    ensure(!report.p_valid && report.interval == Some(RationalInterval::unit()), || format!("{report:?}"))?;
    Ok("denial, affirmation, transitivity".into())
}

fn negated_default() -> Outcome {
    let report = verify_rule(&rule_by_name("affirmation-with-default").unwrap());
    let claim = report.side_claim.clone().ok_or("no side claim")?;
    ensure(claim.holds && claim.non_vacuous && report.pass, || format!("{report:?}"))?;
    Ok(claim.claim)
}

fn qc_theorem() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 200 {
        let u = universe(rng.gen_range(2..=4));
        let (c1, c2) = if rng.gen_bool(0.5) {
            (random_event(&mut rng, &u), random_event(&mut rng, &u))
        } else {
            (random_formula_event(&mut rng, &u), random_formula_event(&mut rng, &u))
        };
        if !p_consistent(&[c1.clone(), c2.clone()]) {
            continue;
        }
        let ok = verify_qc_theorem(&c1, &c2).map_err(|e| e.to_string())?;
        ensure(ok, || format!("QC({c1}, {c2}) not forced"))?;
        done += 1;
    }
    within(Duration::from_secs(60), start)?;
    Ok("200 pairs".into())
}

fn main_theorem(collected: &mut Collected) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut done, mut entailed) = (0, 0);
    let s = Conj3Symbols::default();
    while done < 200 {
        let u = universe(rng.gen_range(2..=4));
        let gen = |rng: &mut ChaCha8Rng| {
            if rng.gen_bool(0.5) {
                random_event(rng, &u)
            } else {
                random_formula_event(rng, &u)
            }
        };
        let c1 = gen(&mut rng);
        let c2 = gen(&mut rng);
        let family = [c1.clone(), c2.clone()];
        if !p_consistent(&family) {
            continue;
        }
        let c3 = match rng.gen_range(0..3) {
            0 => gen(&mut rng),
            1 => pentail::quasi_conjunction(&family)
                .ok()
                .and_then(|qc| random_weakening(&mut rng, &u, &qc))
                .unwrap_or_else(|| gen(&mut rng)),
            _ => {
                let i = rng.gen_range(0..2);
                random_weakening(&mut rng, &u, &family[i]).unwrap_or_else(|| gen(&mut rng))
            }
        };
        if iterated_on_conjunction(&c3, &c1, &c2, &s, &mu()).is_err() {
            continue;
        }
        let direct = p_entails_direct(&family, &c3).map_err(|e| e.to_string())?;
        let verdict = p_entails_iterated(&family, &c3).map_err(|e| e.to_string())?;
        ensure(direct == verdict.holds, || format!("{{{c1}, {c2}}} => {c3}: direct {direct}, iterated {:?}", verdict.mu_set))?;
        done += 1;
        entailed += direct as usize;
        collected.pair.push((c1, c2, c3, verdict.cases));
    }
    Ok(format!("200 triples, {entailed} entailed"))
}

fn oracle() -> Outcome {
    let pool: Vec<ConditionalEvent> =
        ["C | A", "A", "C", "B | A", "C | A & B", "C | A | B", "D | ~A", "A & C"].iter().map(|s| ce(s)).collect();
    let grid: Vec<Rational> = [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)].iter().map(|&(n, d)| r(n, d)).collect();
    let mut families: Vec<Vec<ConditionalEvent>> = Vec::new();
    for i in 0..pool.len() {
        families.push(vec![pool[i].clone()]);
        for j in i + 1..pool.len() {
            families.push(vec![pool[i].clone(), pool[j].clone()]);
            for k in j + 1..pool.len() {
                families.push(vec![pool[i].clone(), pool[j].clone(), pool[k].clone()]);
            }
        }
    }
    // two conditionals sharing an antecedent with a third on the same atoms
    families.push(vec![ce("A | H"), ce("~A | H"), ce("H")]);
    let (mut checked, mut coherent) = (0usize, 0usize);
    for family in &families {
        let mut points: Vec<Vec<Rational>> = vec![Vec::new()];
        for _ in family {
            points = points
                .into_iter()
                .flat_map(|pt| grid.iter().map(move |g| [pt.clone(), vec![g.clone()]].concat()))
                .collect();
        }
        for values in points {
            let engine = pentail::check_events(family, &values).map_err(|e| e.to_string())?;
            let brute = oracle_coherent(family, &values, 12);
            ensure(engine == brute, || {
                let vs: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                let fs: Vec<String> = family.iter().map(|c| c.to_string()).collect();
                format!("{fs:?} at {vs:?}: engine {engine}, oracle {brute}")
            })?;
            checked += 1;
            coherent += engine as usize;
        }
    }
    Ok(format!("{checked} assessments, {coherent} coherent, 0 disagreements"))
}

fn truth_in(u: &Universe, c: &ConditionalEvent, w: u32) -> TruthValue {
    c.truth_at(u, w)
}

/// Indicator value of a conditional event as a symbolic value.
fn indicator_value(t: TruthValue, x: &Symbol) -> SymbolicValue {
    match t {
        TruthValue::True => SymbolicValue::one(),
        TruthValue::False => SymbolicValue::zero(),
        TruthValue::Void => SymbolicValue::symbol(x),
    }
}

/// Conjunction value from truth values and the symbol of each void subset.
fn conj_value(truth: &[TruthValue], void_symbol: impl Fn(&[usize]) -> SymbolicValue) -> SymbolicValue {
    if truth.contains(&TruthValue::False) {
        return SymbolicValue::zero();
    }
    let void: Vec<usize> = (0..truth.len()).filter(|&i| truth[i] == TruthValue::Void).collect();
    if void.is_empty() {
        SymbolicValue::one()
    } else {
        void_symbol(&void)
    }
}

fn samples(set: &CoherentSet) -> Vec<Rational> {
    set.intervals().iter().flat_map(|i| [i.lower.clone(), i.upper.clone(), i.midpoint()]).collect()
}

fn bindings_of(case: &MuCase, roles: &BTreeMap<&str, Symbol>) -> Result<Assessment, String> {
    let mut a = Assessment::new();
    for b in &case.bindings {
        let s = roles.get(b.symbol.as_str()).ok_or(format!("unknown symbol {}", b.symbol))?;
        a.insert(s.clone(), b.value.clone()).map_err(|e| e.to_string())?;
    }
    Ok(a)
}

fn product_rule(collected: &Collected) -> Outcome {
    let m = SymbolicValue::symbol(&mu());
    let mut identities = 0usize;
    let mut bindings = 0usize;
    let (x, y, z) = (p("x"), p("y"), Symbol::compound("z"));
    let single_roles: BTreeMap<&str, Symbol> = [("x", x.clone()), ("y", y.clone())].into_iter().collect();
    for (premise, conclusion, cases) in &collected.single {
        // symbolic: the quantity is the conjunction with z = μx plus μ(1 - premise)
        let q = iterated2(conclusion, premise, &x, &y, &z, &mu()).map_err(|e| e.to_string())?;
        let u = q.universe().clone();
        for w in u.worlds() {
            let tp = truth_in(&u, premise, w);
            let tc = truth_in(&u, conclusion, w);
            let conj = conj_value(&[tp, tc], |v| match v {
                [0] => SymbolicValue::symbol(&x),
                [1] => SymbolicValue::symbol(&y),
                _ => &m * &SymbolicValue::symbol(&x),
            });
            let expected = conj + &m * &(SymbolicValue::one() - indicator_value(tp, &x));
            ensure(q.value_at(w) == &expected, || format!("{q}: world {w} has {} not {expected}", q.value_at(w)))?;
        }
        identities += 1;
        let objects = [indicator(premise, &x), indicator(conclusion, &y), conjunction2(premise, conclusion, &x, &y, &z)];
        for case in cases {
            let a = bindings_of(case, &single_roles)?;
            let xv = a.get(&x).cloned().ok_or("x unbound")?;
            for mv in samples(&case.mu_set) {
                let zv = &mv * &xv;
                // μ = z + μ(1 - x)
                ensure(mv == &zv + &mv * (one() - &xv), || "mu identity".into())?;
                let full = a.clone().with(&z, zv.clone());
                let ok = check_coherence(&objects, &full).map_err(|e| e.to_string())?;
                ensure(ok, || format!("{conclusion} | {premise}: (x, y, z) = ({xv}, {:?}, {zv}) incoherent at mu={mv}", a.get(&y)))?;
                bindings += 1;
            }
        }
    }
    let s = Conj3Symbols::default();
    let pair_roles: BTreeMap<&str, Symbol> = [&s.x1, &s.x2, &s.x3, &s.x12, &s.x13, &s.x23]
        .into_iter()
        .map(|sym| (sym.name.as_str(), sym.clone()))
        .collect();
    for (c1, c2, c3, cases) in &collected.pair {
        let q = iterated_on_conjunction(c3, c1, c2, &s, &mu()).map_err(|e| e.to_string())?;
        let u = q.universe().clone();
        let sym = |v: &[usize]| -> SymbolicValue {
            let name = match v {
                [0] => &s.x1,
                [1] => &s.x2,
                [2] => &s.x3,
                [0, 1] => &s.x12,
                [0, 2] => &s.x13,
                [1, 2] => &s.x23,
                _ => return &m * &SymbolicValue::symbol(&s.x12),
            };
            SymbolicValue::symbol(name)
        };
        for w in u.worlds() {
            let t = [truth_in(&u, c1, w), truth_in(&u, c2, w), truth_in(&u, c3, w)];
            let conj3 = conj_value(&t, sym);
            let conj12 = conj_value(&t[..2], sym);
            let expected = conj3 + &m * &(SymbolicValue::one() - conj12);
            ensure(q.value_at(w) == &expected, || format!("{q}: world {w} has {} not {expected}", q.value_at(w)))?;
        }
        identities += 1;
        let candidates: Vec<(Symbol, Crq)> = vec![
            (s.x1.clone(), indicator(c1, &s.x1)),
            (s.x2.clone(), indicator(c2, &s.x2)),
            (s.x3.clone(), indicator(c3, &s.x3)),
            (s.x12.clone(), conjunction2(c1, c2, &s.x1, &s.x2, &s.x12)),
            (s.x13.clone(), conjunction2(c1, c3, &s.x1, &s.x3, &s.x13)),
            (s.x23.clone(), conjunction2(c2, c3, &s.x2, &s.x3, &s.x23)),
        ];
        let target = conjunction3(c1, c2, c3, &s);
        for case in cases {
            let a = bindings_of(case, &pair_roles)?;
            let mut objects: Vec<Crq> =
                candidates.iter().filter(|(sym, _)| a.get(sym).is_some()).map(|(_, q)| q.clone()).collect();
            objects.push(target.clone());
            let x12 = a.get(&s.x12).cloned().ok_or("x12 unbound")?;
            for mv in samples(&case.mu_set) {
                let t = &mv * &x12;
                ensure(mv == &t + &mv * (one() - &x12), || "mu identity".into())?;
                let full = a.clone().with(&s.x123, t.clone());
                let ok = check_coherence(&objects, &full).map_err(|e| e.to_string())?;
                ensure(ok, || format!("{c3} | ({c1} & {c2}): t = {t} incoherent at mu={mv} with {:?}", case.bindings))?;
                bindings += 1;
            }
        }
    }
    ensure(identities > 0 && bindings > 0, || "nothing collected".into())?;
    Ok(format!("{identities} symbolic identities, {bindings} coherent bindings"))
}

fn main() {
    let mut collected = Collected::default();
    let mut failed = 0;
    let mut report = |n: usize, title: &str, outcome: Outcome, elapsed: Duration| {
        match outcome {
            Ok(detail) => println!("[PASS] {n}. {title}: {detail} ({:.2}s)", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {n}. {title}: {why}");
            }
        }
    };
    let timed = |f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = f();
        (out, start.elapsed())
    };
    let (o, t) = timed(&mut frechet);
    report(1, "Frechet-Hoeffding bounds", o, t);
    let (o, t) = timed(&mut modus_ponens);
    report(2, "modus ponens propagation", o, t);
    let (o, t) = timed(&mut || theorem4(&mut collected));
    report(3, "single-premise entailment vs iterated conditional", o, t);
    let (o, t) = timed(&mut system_p);
    report(4, "System P and classic rules", o, t);
    let (o, t) = timed(&mut non_valid);
    report(5, "non-p-valid rules", o, t);
    let (o, t) = timed(&mut negated_default);
    report(6, "negated default", o, t);
    let (o, t) = timed(&mut qc_theorem);
    report(7, "quasi conjunction given conjunction", o, t);
    let (o, t) = timed(&mut || main_theorem(&mut collected));
    report(8, "two-premise entailment vs iterated conditional", o, t);
    let (o, t) = timed(&mut oracle);
    report(9, "coherence vs brute-force hull oracle", o, t);
    let (o, t) = timed(&mut || product_rule(&collected));
    report(10, "product-rule identities", o, t);
    if failed > 0 {
        std::process::exit(1);
    }
}
