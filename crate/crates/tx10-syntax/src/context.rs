//! Evaluation contexts
//! `E ::= [] | {E t} | {t E} (t async) | dynat(p) E | spawned E | finish_mu E | try E catch t`.

use std::collections::BTreeSet;

use crate::ast::{SourceLabel, Stmt, StmtKind as K};
use crate::classify::is_async;

/// Labels of every sub-statement that sits in a context position,
/// including `s` itself.
pub fn active_labels(s: &Stmt) -> BTreeSet<SourceLabel> {
    let mut out = BTreeSet::new();
    for_each_active(s, &mut |t| {
        out.insert(t.label);
    });
    out
}

pub fn for_each_active(s: &Stmt, f: &mut impl FnMut(&Stmt)) {
    f(s);
    match &s.kind {
        K::Seq(a, b) => {
            for_each_active(a, f);
            if is_async(a) {
                for_each_active(b, f);
            }
        }
        K::DynAt(_, a) | K::Spawned(a) | K::Finish(_, a) | K::TryCatch(a, _) => {
            for_each_active(a, f)
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::ExcConst;

    fn l(n: u32) -> SourceLabel {
        SourceLabel(n)
    }

    #[test]
    fn second_of_seq_is_inactive() {
        let s = Stmt::labelled(
            l(0),
            K::Seq(
                Stmt::labelled(l(1), K::Skip).into(),
                Stmt::labelled(l(2), K::Throw(ExcConst::E)).into(),
            ),
        );
        assert_eq!(active_labels(&s), [l(0), l(1)].into());
    }

    #[test]
    fn finish_and_spawned_are_contexts() {
        let inner = Stmt::labelled(l(2), K::Spawned(Stmt::labelled(l(3), K::Skip).into()));
        let s = Stmt::labelled(l(1), K::Finish(Default::default(), inner.into()));
        assert_eq!(active_labels(&s), [l(1), l(2), l(3)].into());
    }

    #[test]
    fn catch_clause_is_inactive() {
        let s = Stmt::labelled(
            l(1),
            K::TryCatch(
                Stmt::labelled(l(2), K::Skip).into(),
                Stmt::labelled(l(3), K::Skip).into(),
            ),
        );
        assert_eq!(active_labels(&s), [l(1), l(2)].into());
    }
}
