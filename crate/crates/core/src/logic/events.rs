use std::collections::BTreeSet;

use super::{Formula, Term};

/// Role predicates whose first argument is an event.
pub const EVENT_ROLES: &[&str] = &["Agent", "Patient", "Theme", "Location"];

/// Variables that denote events in `f`.
///
/// A variable is an event when it fills the first slot of a role predicate or
/// when its name is `e` optionally followed by digits.
pub fn event_vars(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    f.visit_predicates(&mut |name, args| {
        for (i, arg) in args.iter().enumerate() {
            if let Term::Var(v) = arg {
                if (i == 0 && EVENT_ROLES.contains(&name)) || is_event_name(v) {
                    out.insert(v.clone());
                }
            }
        }
    });
    out
}

fn is_event_name(v: &str) -> bool {
    let mut chars = v.chars();
    chars.next() == Some('e') && chars.all(|c| c.is_ascii_digit())
}
