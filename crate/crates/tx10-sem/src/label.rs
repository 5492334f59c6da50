//! Label algebra used by the step rules.

use tx10_syntax::{ExcConst, ExcSet, Label};

/// Exceptions escaping a spawned activity become asynchronous.
pub fn mask_async(l: Label) -> Label {
    match l {
        Label::SyncExc(e) => Label::AsyncExc(e),
        other => other,
    }
}

/// `μ ∪ λ`
pub fn merge_exceptions(mu: ExcSet, l: Label) -> ExcSet {
    match l.exc() {
        Some(e) => mu.with(e),
        None => mu,
    }
}

/// Label emitted when a finish body terminates with `l`.
pub fn end_of_finish_label(mu: ExcSet, l: Label, p_live: bool) -> Label {
    if merge_exceptions(mu, l).is_empty() {
        Label::Ok
    } else if p_live {
        Label::SyncExc(ExcConst::E)
    } else {
        Label::SyncExc(ExcConst::DP)
    }
}

/// A synchronous exception returning to a dead caller is reported as DP.
pub fn mask_at_return(l: Label, caller_live: bool) -> Label {
    match l {
        Label::SyncExc(_) if !caller_live => Label::SyncExc(ExcConst::DP),
        other => other,
    }
}
