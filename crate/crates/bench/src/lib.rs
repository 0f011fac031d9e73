//! Fixtures shared by the benchmarks.

use pentail::event::ConditionalEvent;

pub fn ce(s: &str) -> ConditionalEvent {
    ConditionalEvent::parse(s).expect("fixture parses")
}

pub fn family(items: &[&str]) -> Vec<ConditionalEvent> {
    items.iter().map(|s| ce(s)).collect()
}
