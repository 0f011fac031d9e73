use pentail::rules::{builtin_rules, format_reports, rule_by_name, verify_rule};
use pentail::CoherentSet;

#[test]
fn every_builtin_rule_passes() {
    let reports: Vec<_> = builtin_rules().iter().map(verify_rule).collect();
    let table = format_reports(&reports);
    for r in &reports {
        assert!(r.pass, "{}\n{r:#?}", table);
    }
}

#[test]
fn invalid_rules_leave_mu_free() {
    for name in ["denial-of-antecedent", "affirmation-of-consequent", "transitivity"] {
        let r = verify_rule(&rule_by_name(name).unwrap());
        assert!(!r.p_valid);
        assert_eq!(r.mu_set, Some(CoherentSet::unit()), "{name}");
        assert_eq!(r.interval.as_ref().unwrap().to_string(), "[0,1]");
    }
}

#[test]
fn reports_are_deterministic() {
    let a = serde_json::to_string(&builtin_rules().iter().map(verify_rule).collect::<Vec<_>>()).unwrap();
    let b = serde_json::to_string(&builtin_rules().iter().map(verify_rule).collect::<Vec<_>>()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn reports_round_trip() {
    let reports: Vec<_> = builtin_rules().iter().map(verify_rule).collect();
    let json = serde_json::to_string(&reports).unwrap();
    let back: Vec<pentail::RuleReport> = serde_json::from_str(&json).unwrap();
    assert_eq!(back, reports);
}
