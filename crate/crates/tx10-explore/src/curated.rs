//! Hand-picked programs for the happens-before comparison. Most mix
//! `finish`, `async` and place shifts over three places so that failures
//! of places 1 and 2 hit code at several nesting levels.

pub const HBI_SUITE: &[&str] = &[
    // nested finish across q = 0, p = 1, r = 2
    "at (0) { finish { async { at (1) { finish { async { at (2) { skip; } } } skip; } } } skip; }",
    "at (0) { finish { async { at (1) { finish { async { at (2) { throw E; } } } skip; } } } skip; }",
    "finish { async { at (1) { finish { async { at (2) { skip; } } skip; } } } } skip;",
    "finish { at (1) { async { at (2) { skip; } } } } at (2) { skip; }",
    "skip; throw E;",
    "skip; skip; skip;",
    "async { skip; } skip;",
    "finish { async { skip; } } skip;",
    "finish { async { skip; } async { skip; } } skip;",
    "at (1) { skip; } skip;",
    "at (1) { skip; } at (2) { skip; }",
    "at (1) { at (2) { skip; } } skip;",
    "at (1) { at (2) { skip; } skip; } skip;",
    "at (1) { at (2) { skip; } } at (2) { skip; }",
    "finish { async { at (1) { skip; } } async { at (2) { skip; } } } skip;",
    "finish { at (1) { async { skip; } skip; } } skip;",
    "finish { at (2) { async { throw E; } } } skip;",
    "async { at (1) { skip; } } at (2) { skip; }",
    "val x = {f: E} in { at (1) { skip; } x.f = E; }",
    "val x = {} in { at (1) val y = x { skip; } skip; }",
    "at (1) val y = {f: E} { at (2) val z = y { skip; } } skip;",
    "finish { async { at (1) { finish { async { skip; } } skip; } } } at (1) { skip; }",
    "finish { finish { async { at (2) { skip; } } } skip; } skip;",
    "at (2) { finish { async { at (1) { skip; } } } } skip;",
    "finish { async { throw E; } at (1) { skip; } }",
    "finish { async { async { at (2) { skip; } } } } skip;",
    "at (1) { finish { async { at (2) { skip; } } at (2) { skip; } } } skip;",
    "finish { async { at (2) { skip; } } at (1) { skip; } } skip;",
    "at (2) { at (1) { finish { async { skip; } } } } skip;",
    "finish { at (1) { finish { async { at (2) { skip; } } } } } skip;",
    "async { at (2) { throw E; } } skip;",
];

/// Programs where a failure sends control into a handler without the
/// statement that would throw in the failure-free run ever activating.
/// The two relations differ on these.
pub const HBI_TRY_DIVERGENCES: &[&str] = &[
    "try { at (1) { throw E; } } catch { skip; } skip;",
    "try { at (1) { skip; } } catch { at (2) { skip; } }",
    "try { finish { async { at (1) { skip; } } } } catch { skip; }",
    "try { at (1) { at (2) { throw E; } } } catch { at (1) { skip; } }",
    "at (1) { try { at (2) { skip; } } catch { skip; } } skip;",
];

/// A stepper that keeps running the continuation of a failed synchronous
/// sequence changes the relation on this one.
pub const HBI_FAULT_PROBE: &str = "at (1) { finish { async { at (2) { skip; } } } skip; } skip;";
