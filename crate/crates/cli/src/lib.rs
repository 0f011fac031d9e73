//! Problem-file parsing and query execution for the `pentail` binary.

pub mod dsl;
pub mod run;

pub use dsl::{parse_problem, ParseError, ProblemFile};
pub use run::{render_text, run_problem, run_rules, Options, QueryReport, Verbosity};
