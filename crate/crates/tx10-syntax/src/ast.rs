use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::value::{ExcConst, ExcSet, Name, Oid, Place, Value};

/// Identity of a source statement. The parser numbers statements in
/// pre-order from 1; `WRAP` marks the implicit program wrapper and
/// `NONE` marks statements built in code without a source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceLabel(pub u32);

impl SourceLabel {
    pub const NONE: SourceLabel = SourceLabel(0);
    pub const WRAP: SourceLabel = SourceLabel(u32::MAX);

    pub fn is_source(self) -> bool {
        self != SourceLabel::NONE && self != SourceLabel::WRAP
    }
}

impl fmt::Display for SourceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SourceLabel::WRAP => f.write_str("Lwrap"),
            SourceLabel(n) => write!(f, "L{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Val(Value),
    Var(Name),
    Select(Box<Expr>, Name),
    ObjLit(Vec<(Name, Expr)>),
    GlobalRefOf(Box<Expr>),
    ValOf(Box<Expr>),
}

impl Expr {
    pub fn as_value(&self) -> Option<Value> {
        match self {
            Expr::Val(v) => Some(*v),
            _ => None,
        }
    }

    pub fn exc(e: ExcConst) -> Expr {
        Expr::Val(Value::Exc(e))
    }

    pub fn oid(o: Oid) -> Expr {
        Expr::Val(Value::Oid(o))
    }

    pub fn var(x: &str) -> Expr {
        Expr::Var(x.into())
    }

    pub fn select(e: Expr, f: &str) -> Expr {
        Expr::Select(Box::new(e), f.into())
    }

    pub fn obj(fields: Vec<(&str, Expr)>) -> Expr {
        Expr::ObjLit(
            fields
                .into_iter()
                .map(|(f, e)| (Name::from(f), e))
                .collect(),
        )
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Val(_) | Expr::Var(_) => 1,
            Expr::Select(e, _) | Expr::GlobalRefOf(e) | Expr::ValOf(e) => 1 + e.size(),
            Expr::ObjLit(fs) => 1 + fs.iter().map(|(_, e)| e.size()).sum::<usize>(),
        }
    }

    pub fn free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Expr::Val(_) => {}
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Select(e, _) | Expr::GlobalRefOf(e) | Expr::ValOf(e) => e.free_vars(out),
            Expr::ObjLit(fs) => fs.iter().for_each(|(_, e)| e.free_vars(out)),
        }
    }

    pub fn values(&self, out: &mut Vec<Value>) {
        match self {
            Expr::Val(v) => out.push(*v),
            Expr::Var(_) => {}
            Expr::Select(e, _) | Expr::GlobalRefOf(e) | Expr::ValOf(e) => e.values(out),
            Expr::ObjLit(fs) => fs.iter().for_each(|(_, e)| e.values(out)),
        }
    }

    pub fn map_values(&self, f: &impl Fn(Value) -> Value) -> Expr {
        match self {
            Expr::Val(v) => Expr::Val(f(*v)),
            Expr::Var(x) => Expr::Var(x.clone()),
            Expr::Select(e, fl) => Expr::Select(Box::new(e.map_values(f)), fl.clone()),
            Expr::ObjLit(fs) => Expr::ObjLit(
                fs.iter()
                    .map(|(n, e)| (n.clone(), e.map_values(f)))
                    .collect(),
            ),
            Expr::GlobalRefOf(e) => Expr::GlobalRefOf(Box::new(e.map_values(f))),
            Expr::ValOf(e) => Expr::ValOf(Box::new(e.map_values(f))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Stmt {
    pub label: SourceLabel,
    pub kind: StmtKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StmtKind {
    Skip,
    Throw(ExcConst),
    ValDecl(Name, Expr, Arc<Stmt>),
    FieldAssign(Expr, Name, Expr),
    Seq(Arc<Stmt>, Arc<Stmt>),
    /// `at (q) val x = e in s`
    At(Place, Name, Expr, Arc<Stmt>),
    /// `at (q) s`, no value transmitted.
    AtSimple(Place, Arc<Stmt>),
    Async(Arc<Stmt>),
    Finish(ExcSet, Arc<Stmt>),
    TryCatch(Arc<Stmt>, Arc<Stmt>),
    /// Runtime form of a place shift in progress.
    DynAt(Place, Arc<Stmt>),
    /// Runtime form of a spawned activity.
    Spawned(Arc<Stmt>),
}

use StmtKind as K;

impl Stmt {
    pub fn new(kind: StmtKind) -> Stmt {
        Stmt {
            label: SourceLabel::NONE,
            kind,
        }
    }

    pub fn labelled(label: SourceLabel, kind: StmtKind) -> Stmt {
        Stmt { label, kind }
    }

    /// Same label, different shape.
    pub fn rebuild(&self, kind: StmtKind) -> Stmt {
        Stmt {
            label: self.label,
            kind,
        }
    }

    pub fn skip() -> Stmt {
        Stmt::new(K::Skip)
    }

    pub fn throw(e: ExcConst) -> Stmt {
        Stmt::new(K::Throw(e))
    }

    pub fn val(x: &str, e: Expr, s: Stmt) -> Stmt {
        Stmt::new(K::ValDecl(x.into(), e, Arc::new(s)))
    }

    pub fn assign(target: Expr, f: &str, e: Expr) -> Stmt {
        Stmt::new(K::FieldAssign(target, f.into(), e))
    }

    pub fn seq(s: Stmt, t: Stmt) -> Stmt {
        Stmt::new(K::Seq(Arc::new(s), Arc::new(t)))
    }

    /// Right fold of a statement list; the empty list is `skip`.
    pub fn block(mut ss: Vec<Stmt>) -> Stmt {
        let Some(mut acc) = ss.pop() else {
            return Stmt::skip();
        };
        while let Some(s) = ss.pop() {
            acc = Stmt::seq(s, acc);
        }
        acc
    }

    pub fn at(q: Place, x: &str, e: Expr, s: Stmt) -> Stmt {
        Stmt::new(K::At(q, x.into(), e, Arc::new(s)))
    }

    pub fn at_simple(q: Place, s: Stmt) -> Stmt {
        Stmt::new(K::AtSimple(q, Arc::new(s)))
    }

    pub fn async_(s: Stmt) -> Stmt {
        Stmt::new(K::Async(Arc::new(s)))
    }

    pub fn finish(s: Stmt) -> Stmt {
        Stmt::new(K::Finish(ExcSet::EMPTY, Arc::new(s)))
    }

    pub fn finish_mu(mu: ExcSet, s: Stmt) -> Stmt {
        Stmt::new(K::Finish(mu, Arc::new(s)))
    }

    pub fn try_catch(s: Stmt, t: Stmt) -> Stmt {
        Stmt::new(K::TryCatch(Arc::new(s), Arc::new(t)))
    }

    pub fn dyn_at(q: Place, s: Stmt) -> Stmt {
        Stmt::new(K::DynAt(q, Arc::new(s)))
    }

    pub fn spawned(s: Stmt) -> Stmt {
        Stmt::new(K::Spawned(Arc::new(s)))
    }

    /// Direct sub-statements, left to right.
    pub fn children(&self) -> Vec<&Stmt> {
        match &self.kind {
            K::Skip | K::Throw(_) | K::FieldAssign(..) => vec![],
            K::ValDecl(_, _, s)
            | K::At(_, _, _, s)
            | K::AtSimple(_, s)
            | K::Async(s)
            | K::Finish(_, s)
            | K::DynAt(_, s)
            | K::Spawned(s) => vec![s],
            K::Seq(s, t) | K::TryCatch(s, t) => vec![s, t],
        }
    }

    /// Expressions held directly by this node.
    pub fn exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            K::ValDecl(_, e, _) | K::At(_, _, e, _) => vec![e],
            K::FieldAssign(a, _, b) => vec![a, b],
            _ => vec![],
        }
    }

    /// Number of AST nodes, expressions included.
    pub fn size(&self) -> usize {
        1 + self.exprs().iter().map(|e| e.size()).sum::<usize>()
            + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// True when the statement contains no runtime-only forms and every
    /// finish carries an empty exception set.
    pub fn is_static(&self) -> bool {
        let here = match &self.kind {
            K::DynAt(..) | K::Spawned(_) => false,
            K::Finish(mu, _) => mu.is_empty(),
            _ => true,
        };
        here && self.children().iter().all(|c| c.is_static())
    }

    pub fn labels(&self) -> BTreeSet<SourceLabel> {
        let mut out = BTreeSet::new();
        self.walk(&mut |s| {
            out.insert(s.label);
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk(&self, f: &mut impl FnMut(&Stmt)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match &self.kind {
            K::ValDecl(x, e, s) | K::At(_, x, e, s) => {
                e.free_vars(out);
                let mut inner = s.free_vars();
                inner.remove(x);
                out.extend(inner);
            }
            _ => {
                for e in self.exprs() {
                    e.free_vars(out);
                }
                for c in self.children() {
                    c.collect_free(out);
                }
            }
        }
    }

    /// Every value occurring in the statement, in left-to-right order.
    pub fn values(&self) -> Vec<Value> {
        let mut out = Vec::new();
        self.walk(&mut |s| {
            for e in s.exprs() {
                e.values(&mut out);
            }
        });
        out
    }

    /// Apply `f` to every value, keeping labels.
    pub fn map_values(&self, f: &impl Fn(Value) -> Value) -> Stmt {
        let kind = match &self.kind {
            K::Skip => K::Skip,
            K::Throw(e) => K::Throw(*e),
            K::ValDecl(x, e, s) => {
                K::ValDecl(x.clone(), e.map_values(f), Arc::new(s.map_values(f)))
            }
            K::FieldAssign(a, fl, b) => {
                K::FieldAssign(a.map_values(f), fl.clone(), b.map_values(f))
            }
            K::Seq(s, t) => K::Seq(Arc::new(s.map_values(f)), Arc::new(t.map_values(f))),
            K::At(q, x, e, s) => K::At(*q, x.clone(), e.map_values(f), Arc::new(s.map_values(f))),
            K::AtSimple(q, s) => K::AtSimple(*q, Arc::new(s.map_values(f))),
            K::Async(s) => K::Async(Arc::new(s.map_values(f))),
            K::Finish(mu, s) => K::Finish(*mu, Arc::new(s.map_values(f))),
            K::TryCatch(s, t) => K::TryCatch(Arc::new(s.map_values(f)), Arc::new(t.map_values(f))),
            K::DynAt(q, s) => K::DynAt(*q, Arc::new(s.map_values(f))),
            K::Spawned(s) => K::Spawned(Arc::new(s.map_values(f))),
        };
        self.rebuild(kind)
    }

    /// Highest place id mentioned by a place shift.
    pub fn max_place(&self) -> Option<Place> {
        let mut best = None;
        self.walk(&mut |s| {
            if let K::At(q, ..) | K::AtSimple(q, _) | K::DynAt(q, _) = s.kind {
                best = best.max(Some(q));
            }
        });
        best
    }

    /// Renumber labels in pre-order starting at 1.
    pub fn relabel(&self) -> Stmt {
        let mut next = 1;
        self.relabel_from(&mut next)
    }

    fn relabel_from(&self, next: &mut u32) -> Stmt {
        let label = SourceLabel(*next);
        *next += 1;
        let mut go = |s: &Arc<Stmt>| Arc::new(s.relabel_from(next));
        let kind = match &self.kind {
            K::Skip => K::Skip,
            K::Throw(e) => K::Throw(*e),
            K::FieldAssign(a, f, b) => K::FieldAssign(a.clone(), f.clone(), b.clone()),
            K::ValDecl(x, e, s) => K::ValDecl(x.clone(), e.clone(), go(s)),
            K::At(q, x, e, s) => K::At(*q, x.clone(), e.clone(), go(s)),
            K::AtSimple(q, s) => K::AtSimple(*q, go(s)),
            K::Async(s) => K::Async(go(s)),
            K::Finish(mu, s) => K::Finish(*mu, go(s)),
            K::DynAt(q, s) => K::DynAt(*q, go(s)),
            K::Spawned(s) => K::Spawned(go(s)),
            K::Seq(s, t) => {
                let s = go(s);
                K::Seq(s, go(t))
            }
            K::TryCatch(s, t) => {
                let s = go(s);
                K::TryCatch(s, go(t))
            }
        };
        Stmt { label, kind }
    }

    /// Structural equality ignoring labels.
    pub fn same_shape(&self, other: &Stmt) -> bool {
        self.strip_labels() == other.strip_labels()
    }

    pub fn strip_labels(&self) -> Stmt {
        self.with_all_labels(SourceLabel::NONE)
    }

    pub fn with_all_labels(&self, l: SourceLabel) -> Stmt {
        let go = |s: &Arc<Stmt>| Arc::new(s.with_all_labels(l));
        let kind = match &self.kind {
            K::Skip => K::Skip,
            K::Throw(e) => K::Throw(*e),
            K::FieldAssign(a, f, b) => K::FieldAssign(a.clone(), f.clone(), b.clone()),
            K::ValDecl(x, e, s) => K::ValDecl(x.clone(), e.clone(), go(s)),
            K::At(q, x, e, s) => K::At(*q, x.clone(), e.clone(), go(s)),
            K::AtSimple(q, s) => K::AtSimple(*q, go(s)),
            K::Async(s) => K::Async(go(s)),
            K::Finish(mu, s) => K::Finish(*mu, go(s)),
            K::DynAt(q, s) => K::DynAt(*q, go(s)),
            K::Spawned(s) => K::Spawned(go(s)),
            K::Seq(s, t) => K::Seq(go(s), go(t)),
            K::TryCatch(s, t) => K::TryCatch(go(s), go(t)),
        };
        Stmt { label: l, kind }
    }
}

/// The implicit top-level wrapper `finish { at(0) { s skip } }`, in
/// its runtime form.
pub fn wrap_program(s: &Stmt) -> Stmt {
    let w = SourceLabel::WRAP;
    let body = Stmt::labelled(
        w,
        K::Seq(Arc::new(s.clone()), Arc::new(Stmt::labelled(w, K::Skip))),
    );
    let at0 = Stmt::labelled(w, K::DynAt(0, Arc::new(body)));
    Stmt::labelled(w, K::Finish(ExcSet::EMPTY, Arc::new(at0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_folds_right() {
        let b = Stmt::block(vec![Stmt::skip(), Stmt::throw(ExcConst::E), Stmt::skip()]);
        let expect = Stmt::seq(
            Stmt::skip(),
            Stmt::seq(Stmt::throw(ExcConst::E), Stmt::skip()),
        );
        assert_eq!(b, expect);
        assert_eq!(Stmt::block(vec![]), Stmt::skip());
    }

    #[test]
    fn relabel_is_preorder() {
        let s = Stmt::seq(Stmt::async_(Stmt::skip()), Stmt::skip()).relabel();
        let order: Vec<u32> = {
            let mut v = vec![];
            s.walk(&mut |n| v.push(n.label.0));
            v
        };
        assert_eq!(order, vec![1, 2, 3, 4]);
    }

    #[test]
    fn free_vars_respect_binders() {
        let s = Stmt::val(
            "x",
            Expr::var("y"),
            Stmt::assign(Expr::var("x"), "f", Expr::var("z")),
        );
        let fv: Vec<String> = s.free_vars().iter().map(|n| n.to_string()).collect();
        assert_eq!(fv, vec!["y", "z"]);
    }

    #[test]
    fn size_counts_expressions() {
        let s = Stmt::assign(
            Expr::var("x"),
            "f",
            Expr::obj(vec![("g", Expr::exc(ExcConst::E))]),
        );
        assert_eq!(s.size(), 4);
    }
}
