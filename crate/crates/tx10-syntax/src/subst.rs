use std::sync::Arc;

use crate::ast::{Expr, Stmt, StmtKind as K};
use crate::value::Value;

/// `e[v/x]`
pub fn substitute_expr(e: &Expr, x: &str, v: Value) -> Expr {
    match e {
        Expr::Val(_) => e.clone(),
        Expr::Var(y) if &**y == x => Expr::Val(v),
        Expr::Var(_) => e.clone(),
        Expr::Select(a, f) => Expr::Select(Box::new(substitute_expr(a, x, v)), f.clone()),
        Expr::ObjLit(fs) => Expr::ObjLit(
            fs.iter()
                .map(|(f, a)| (f.clone(), substitute_expr(a, x, v)))
                .collect(),
        ),
        Expr::GlobalRefOf(a) => Expr::GlobalRefOf(Box::new(substitute_expr(a, x, v))),
        Expr::ValOf(a) => Expr::ValOf(Box::new(substitute_expr(a, x, v))),
    }
}

/// `s[v/x]`. Labels are kept. A binder for `x` stops the substitution
/// in its scope, though well-formed programs never re-declare.
pub fn substitute(s: &Stmt, x: &str, v: Value) -> Stmt {
    let go = |t: &Arc<Stmt>| Arc::new(substitute(t, x, v));
    let scoped = |y: &str, t: &Arc<Stmt>| if y == x { t.clone() } else { go(t) };
    let kind = match &s.kind {
        K::Skip | K::Throw(_) => return s.clone(),
        K::ValDecl(y, e, t) => K::ValDecl(y.clone(), substitute_expr(e, x, v), scoped(y, t)),
        K::FieldAssign(a, f, b) => K::FieldAssign(
            substitute_expr(a, x, v),
            f.clone(),
            substitute_expr(b, x, v),
        ),
        K::Seq(a, b) => K::Seq(go(a), go(b)),
        K::At(q, y, e, t) => K::At(*q, y.clone(), substitute_expr(e, x, v), scoped(y, t)),
        K::AtSimple(q, t) => K::AtSimple(*q, go(t)),
        K::Async(t) => K::Async(go(t)),
        K::Finish(mu, t) => K::Finish(*mu, go(t)),
        K::TryCatch(a, b) => K::TryCatch(go(a), go(b)),
        K::DynAt(q, t) => K::DynAt(*q, go(t)),
        K::Spawned(t) => K::Spawned(go(t)),
    };
    s.rebuild(kind)
}
