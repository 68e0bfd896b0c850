//! Small reference dictionaries used throughout the tests and examples.

use crate::lexicon::{close_lexicon, ClosureMode, Lexicon};

/// Closes a lexicon given as `(headword, definition)` pairs, panicking on
/// unknown defining words.
pub fn closed(defs: &[(&str, &[&str])]) -> Lexicon {
    let raw = Lexicon::from_definitions(defs.iter().map(|(w, d)| (*w, d.iter().copied())));
    close_lexicon(raw, ClosureMode::ErrorUnknown)
        .expect("fixture must be closed")
        .0
}

/// `a -> {b}, b -> {a}, c -> {a, b}`: one 2-cycle defining a third word.
pub fn f1() -> Lexicon {
    closed(&[("a", &["b"]), ("b", &["a"]), ("c", &["a", "b"])])
}

/// Two 2-cycles `{a, b}` and `{c, d}` where the first feeds the second, and
/// `e` defined by `c` and `d`.
pub fn f2() -> Lexicon {
    closed(&[
        ("a", &["b"]),
        ("b", &["a"]),
        ("c", &["d", "a"]),
        ("d", &["c", "b"]),
        ("e", &["c", "d"]),
    ])
}

/// Two definition cycles with no link between them, plus one word defined
/// from both.
pub fn two_cycles() -> Lexicon {
    closed(&[
        ("a", &["b"]),
        ("b", &["a"]),
        ("c", &["d"]),
        ("d", &["c"]),
        ("e", &["a", "c"]),
    ])
}
