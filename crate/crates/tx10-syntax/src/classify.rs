//! Synchronous/asynchronous classification and the structural
//! predicates used by the resilient calculus.

use crate::ast::{Stmt, StmtKind as K};
use crate::value::Place;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    Async,
    Sync,
}

pub fn classify(s: &Stmt) -> Class {
    if is_async(s) {
        Class::Async
    } else {
        Class::Sync
    }
}

pub fn is_async(s: &Stmt) -> bool {
    match &s.kind {
        K::Spawned(_) => true,
        K::DynAt(_, s) | K::TryCatch(s, _) => is_async(s),
        K::Seq(s, t) => is_async(s) && is_async(t),
        _ => false,
    }
}

pub fn is_sync(s: &Stmt) -> bool {
    !is_async(s)
}

/// Derivability of `isSync` by its own rules, kept separate from
/// `is_async` so the two can be checked against each other.
pub fn derives_sync(s: &Stmt) -> bool {
    match &s.kind {
        K::Skip | K::ValDecl(..) | K::FieldAssign(..) | K::At(..) | K::AtSimple(..) => true,
        K::Async(_) | K::Finish(..) | K::Throw(_) => true,
        K::Seq(s, t) => derives_sync(s) || derives_sync(t),
        K::DynAt(_, s) | K::TryCatch(s, _) => derives_sync(s),
        K::Spawned(_) => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResiliencePredicates {
    pub no_async: bool,
    pub is_local: bool,
    pub is_remote: bool,
}

pub fn resilience_predicates(s: &Stmt, p: Place) -> ResiliencePredicates {
    ResiliencePredicates {
        no_async: no_async(s),
        is_local: is_local(s),
        is_remote: is_remote(s, p),
    }
}

pub fn no_async(s: &Stmt) -> bool {
    !matches!(s.kind, K::Async(_) | K::Spawned(_)) && s.children().into_iter().all(no_async)
}

pub fn is_local(s: &Stmt) -> bool {
    !matches!(s.kind, K::DynAt(..)) && s.children().into_iter().all(is_local)
}

/// Every basic statement of `s` sits under a runtime place shift to a
/// place other than `p`. Basic here means anything that executes at the
/// current place: skip, throw, val, field update, async and the static
/// place shifts.
pub fn is_remote(s: &Stmt, p: Place) -> bool {
    match &s.kind {
        K::DynAt(q, inner) => *q != p || is_remote(inner, p),
        K::Seq(a, b) | K::TryCatch(a, b) => is_remote(a, p) && is_remote(b, p),
        K::Spawned(a) | K::Finish(_, a) => is_remote(a, p),
        K::Skip
        | K::Throw(_)
        | K::ValDecl(..)
        | K::FieldAssign(..)
        | K::At(..)
        | K::AtSimple(..)
        | K::Async(_) => false,
    }
}
