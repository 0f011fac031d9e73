//! Coherence-based reasoning with conditional events: compound and iterated
//! conditionals as conditional random quantities, exact coherence checking,
//! coherent extensions and p-entailment.

pub mod coherence;
pub mod compound;
pub mod constituent;
pub mod entailment;
pub mod event;
pub mod rational;
pub mod region;
pub mod rules;
pub mod simplex;
pub mod symbolic;

pub use coherence::{
    check_coherence, check_coherence_report, check_events, coherent_mu_set, extension_interval, extension_set,
    Assessment, CoherenceError, CoherenceReport, CoherentSet, RationalInterval,
};
pub use compound::{
    conjunction2, conjunction3, conjunction_with_gn, indicator, iterated2, iterated_on_conjunction, quasi_conjunction,
    reduce_equal_crq, CompoundError, Conj3Symbols, Crq, CrqEquality,
};
pub use constituent::{constituents, Constituent};
pub use entailment::{
    disjunctive_characterization, p_consistent, p_entails_direct, p_entails_iterated, p_entails_pair,
    p_entails_qc_witness, verify_qc_theorem, Characterization, EntailmentError, EntailmentVerdict, Method, Witness,
};
pub use event::{evaluate, gn_implies, implies, Atom, ConditionalEvent, EventError, EventExpr, TruthValue, Universe};
pub use rational::{parse_rational, Rational};
pub use rules::{builtin_rules, rule_by_name, verify_rule, RuleInstance, RuleReport};
pub use symbolic::{Symbol, SymbolRole, SymbolicValue};
