//! One-step statement transitions, failure-free and resilient.
//!
//! Every transition carries its derivation as a chain of frames, one per
//! rule application from the root judgment down to the leaf axiom. The
//! analysis crate checks the metatheory against these frames.

use std::fmt;
use std::sync::Arc;

use tx10_heap::{copy, fail_place, GlobalHeap, HeapError};
use tx10_syntax::{is_async, is_sync, substitute, ExcConst, Label, Place, Stmt, StmtKind};

use crate::expr::{eval_step, EvalOutcome};
use crate::label::{end_of_finish_label, mask_async, mask_at_return, merge_exceptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Semantics {
    Tx10,
    Resilient,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Config {
    Running(Stmt, GlobalHeap),
    Done(GlobalHeap),
}

impl Config {
    pub fn heap(&self) -> &GlobalHeap {
        match self {
            Config::Running(_, g) | Config::Done(g) => g,
        }
    }

    pub fn stmt(&self) -> Option<&Stmt> {
        match self {
            Config::Running(s, _) => Some(s),
            Config::Done(_) => None,
        }
    }

    pub fn is_done(&self) -> bool {
        matches!(self, Config::Done(_))
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Config::Running(s, g) => write!(f, "<{s}, {g}>"),
            Config::Done(g) => write!(f, "<{g}>"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    // expressions
    NewObj,
    Select,
    SelectBad,
    NewGlobalRef,
    NewGlobalRefBad,
    Valof,
    ValofBad,
    // basic statements
    Skip,
    Exception,
    DeclareVal,
    FieldUpdate,
    BadFieldUpdate,
    Ctx,
    // compound statements
    Spawn,
    Async,
    Finish,
    EndOfFinish,
    Seq,
    Par,
    PlaceShift,
    At,
    Try,
    // resilient only
    PlaceFailure,
    LocalFailure,
    SeqTerm,
    SeqFailedTerm,
}

impl Rule {
    pub const ALL: [Rule; 26] = [
        Rule::NewObj,
        Rule::Select,
        Rule::SelectBad,
        Rule::NewGlobalRef,
        Rule::NewGlobalRefBad,
        Rule::Valof,
        Rule::ValofBad,
        Rule::Skip,
        Rule::Exception,
        Rule::DeclareVal,
        Rule::FieldUpdate,
        Rule::BadFieldUpdate,
        Rule::Ctx,
        Rule::Spawn,
        Rule::Async,
        Rule::Finish,
        Rule::EndOfFinish,
        Rule::Seq,
        Rule::Par,
        Rule::PlaceShift,
        Rule::At,
        Rule::Try,
        Rule::PlaceFailure,
        Rule::LocalFailure,
        Rule::SeqTerm,
        Rule::SeqFailedTerm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::NewObj => "New Obj",
            Rule::Select => "Select",
            Rule::SelectBad => "Select Bad",
            Rule::NewGlobalRef => "New Global Ref",
            Rule::NewGlobalRefBad => "New Global Ref Bad",
            Rule::Valof => "Valof",
            Rule::ValofBad => "Valof Bad",
            Rule::Skip => "Skip",
            Rule::Exception => "Exception",
            Rule::DeclareVal => "Declare Val",
            Rule::FieldUpdate => "Field Update",
            Rule::BadFieldUpdate => "Bad Field Update",
            Rule::Ctx => "Ctx",
            Rule::Spawn => "Spawn",
            Rule::Async => "Async",
            Rule::Finish => "Finish",
            Rule::EndOfFinish => "End of Finish",
            Rule::Seq => "Seq",
            Rule::Par => "Par",
            Rule::PlaceShift => "Place Shift",
            Rule::At => "At",
            Rule::Try => "Try",
            Rule::PlaceFailure => "Place Failure",
            Rule::LocalFailure => "Local Failure",
            Rule::SeqTerm => "Seq Term",
            Rule::SeqFailedTerm => "Seq Failed Term",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EngineFault {
    #[error("heap fault: {0}")]
    Heap(#[from] HeapError),
    #[error("free variable {0} reached evaluation")]
    FreeVariable(String),
    #[error("place {0} is not in the heap")]
    PlaceMissing(Place),
}

/// The conclusion of one rule application inside a derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub rule: Rule,
    pub place: Place,
    pub label: Label,
    /// 0 for the left component of a sequence, 1 for the right (Par).
    pub branch: u8,
    pub source: Stmt,
    /// `None` when the conclusion is a terminal configuration.
    pub residual: Option<Stmt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    /// Rule at the root of the derivation.
    pub rule: Rule,
    pub place: Place,
    pub label: Label,
    pub target: Config,
    /// Outermost first.
    pub frames: Vec<Frame>,
    /// Leaf expression rule when the leaf is (Ctx).
    pub expr_rule: Option<Rule>,
    /// The failed place for (Place Failure) edges.
    pub injected: Option<Place>,
}

impl Transition {
    /// Rule at the leaf of the derivation.
    pub fn leaf_rule(&self) -> Rule {
        self.expr_rule
            .unwrap_or_else(|| self.frames.last().map_or(self.rule, |f| f.rule))
    }

    /// Redex position, left to right.
    pub fn path(&self) -> Vec<u8> {
        self.frames.iter().map(|f| f.branch).collect()
    }

    /// Total order used by deterministic scheduling.
    pub fn order_key(&self) -> (&'static str, Vec<u8>, Option<Place>, &'static str) {
        (
            self.rule.name(),
            self.path(),
            self.injected,
            self.leaf_rule().name(),
        )
    }
}

/// Deliberately broken rules, used to show the checkers catch faults.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// (Skip) never fires.
    DropSkip,
    /// The async row of (Seq Failed Term) never fires.
    DropSeqFailedTermAsync,
    /// The sync row of (Seq Failed Term) behaves like the async row, so
    /// the continuation runs after a failed synchronous prefix.
    SeqFailedTermIgnoresSync,
}

struct Deriv {
    label: Label,
    residual: Option<Stmt>,
    heap: GlobalHeap,
    /// Leaf first.
    frames: Vec<Frame>,
    expr_rule: Option<Rule>,
}

impl Deriv {
    fn leaf(
        rule: Rule,
        p: Place,
        label: Label,
        source: &Stmt,
        residual: Option<Stmt>,
        heap: GlobalHeap,
    ) -> Deriv {
        let frame = Frame {
            rule,
            place: p,
            label,
            branch: 0,
            source: source.clone(),
            residual: residual.clone(),
        };
        Deriv {
            label,
            residual,
            heap,
            frames: vec![frame],
            expr_rule: None,
        }
    }

    fn wrap(
        mut self,
        rule: Rule,
        p: Place,
        label: Label,
        branch: u8,
        source: &Stmt,
        residual: Option<Stmt>,
    ) -> Deriv {
        self.frames.push(Frame {
            rule,
            place: p,
            label,
            branch,
            source: source.clone(),
            residual: residual.clone(),
        });
        self.label = label;
        self.residual = residual;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stepper {
    pub sem: Semantics,
    pub mutation: Option<Mutation>,
}

const DP_SYNC: Label = Label::SyncExc(ExcConst::DP);

impl Stepper {
    pub fn new(sem: Semantics) -> Stepper {
        Stepper {
            sem,
            mutation: None,
        }
    }

    pub fn mutated(sem: Semantics, m: Mutation) -> Stepper {
        Stepper {
            sem,
            mutation: Some(m),
        }
    }

    fn resilient(&self) -> bool {
        self.sem == Semantics::Resilient
    }

    /// All derivable `⟨s,g⟩ →_p` steps, excluding (Place Failure),
    /// in deterministic order.
    pub fn transitions(
        &self,
        s: &Stmt,
        g: &GlobalHeap,
        p: Place,
    ) -> Result<Vec<Transition>, EngineFault> {
        let mut out: Vec<Transition> = self
            .derive(s, g, p)?
            .into_iter()
            .map(|mut d| {
                d.frames.reverse();
                let target = match d.residual {
                    Some(s2) => Config::Running(s2, d.heap),
                    None => Config::Done(d.heap),
                };
                Transition {
                    rule: d.frames[0].rule,
                    place: p,
                    label: d.label,
                    target,
                    frames: d.frames,
                    expr_rule: d.expr_rule,
                    injected: None,
                }
            })
            .collect();
        out.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        Ok(out)
    }

    /// (Place Failure) of each listed place that is live and not 0.
    pub fn failure_transitions(&self, k: &Config, places: &[Place]) -> Vec<Transition> {
        let Config::Running(s, g) = k else {
            return vec![];
        };
        if !self.resilient() {
            return vec![];
        }
        let mut places: Vec<Place> = places.to_vec();
        places.sort_unstable();
        places.dedup();
        places
            .into_iter()
            .filter_map(|q| {
                let g2 = fail_place(g, q).ok()?;
                let frame = Frame {
                    rule: Rule::PlaceFailure,
                    place: q,
                    label: Label::Ok,
                    branch: 0,
                    source: s.clone(),
                    residual: Some(s.clone()),
                };
                Some(Transition {
                    rule: Rule::PlaceFailure,
                    place: q,
                    label: Label::Ok,
                    target: Config::Running(s.clone(), g2),
                    frames: vec![frame],
                    expr_rule: None,
                    injected: Some(q),
                })
            })
            .collect()
    }

    fn derive(&self, s: &Stmt, g: &GlobalHeap, p: Place) -> Result<Vec<Deriv>, EngineFault> {
        use StmtKind as K;
        let live = g.is_live(p);
        if !live && !self.resilient() {
            return Err(EngineFault::PlaceMissing(p));
        }
        let local_failure = || {
            vec![Deriv::leaf(
                Rule::LocalFailure,
                p,
                DP_SYNC,
                s,
                None,
                g.clone(),
            )]
        };

        Ok(match &s.kind {
            K::Skip if !live => local_failure(),
            K::Skip if self.mutation == Some(Mutation::DropSkip) => vec![],
            K::Skip => vec![Deriv::leaf(Rule::Skip, p, Label::Ok, s, None, g.clone())],

            K::Throw(_) if !live => local_failure(),
            K::Throw(v) => vec![Deriv::leaf(
                Rule::Exception,
                p,
                Label::SyncExc(*v),
                s,
                None,
                g.clone(),
            )],

            K::ValDecl(..) | K::FieldAssign(..) if !live => local_failure(),
            K::ValDecl(x, e, body) => match e.as_value() {
                Some(v) => {
                    let inst = substitute(body, x, v);
                    self.derive(&inst, g, p)?
                        .into_iter()
                        .map(|d| {
                            let (l, r) = (d.label, d.residual.clone());
                            d.wrap(Rule::DeclareVal, p, l, 0, s, r)
                        })
                        .collect()
                }
                None => self.ctx(s, g, p, e, |e2| {
                    s.rebuild(K::ValDecl(x.clone(), e2, body.clone()))
                })?,
            },
            K::FieldAssign(a, f, b) => match (a.as_value(), b.as_value()) {
                (None, _) => self.ctx(s, g, p, a, |a2| {
                    s.rebuild(K::FieldAssign(a2, f.clone(), b.clone()))
                })?,
                (Some(_), None) => self.ctx(s, g, p, b, |b2| {
                    s.rebuild(K::FieldAssign(a.clone(), f.clone(), b2))
                })?,
                (Some(o), Some(v)) => {
                    let h = g.local(p).expect("live place has a heap");
                    let target = o
                        .as_oid()
                        .filter(|o| h.get(o).is_some_and(|r| r.contains_key(f)));
                    match target {
                        Some(o) => {
                            let mut h2 = h.clone();
                            h2.get_mut(&o).unwrap().insert(f.clone(), v);
                            vec![Deriv::leaf(
                                Rule::FieldUpdate,
                                p,
                                Label::Ok,
                                s,
                                None,
                                g.with_local(p, h2),
                            )]
                        }
                        None => vec![Deriv::leaf(
                            Rule::BadFieldUpdate,
                            p,
                            Label::SyncExc(ExcConst::BF),
                            s,
                            None,
                            g.clone(),
                        )],
                    }
                }
            },

            K::Async(_) if !live => vec![Deriv::leaf(Rule::Spawn, p, DP_SYNC, s, None, g.clone())],
            K::Async(body) => {
                let r = s.rebuild(K::Spawned(body.clone()));
                vec![Deriv::leaf(
                    Rule::Spawn,
                    p,
                    Label::Ok,
                    s,
                    Some(r),
                    g.clone(),
                )]
            }

            K::Spawned(body) => self
                .derive(body, g, p)?
                .into_iter()
                .map(|d| {
                    let r = d
                        .residual
                        .clone()
                        .map(|b| s.rebuild(K::Spawned(Arc::new(b))));
                    let l = mask_async(d.label);
                    d.wrap(Rule::Async, p, l, 0, s, r)
                })
                .collect(),

            K::Finish(mu, body) => self
                .derive(body, g, p)?
                .into_iter()
                .map(|d| match d.residual.clone() {
                    Some(b) => {
                        let r = s.rebuild(K::Finish(merge_exceptions(*mu, d.label), Arc::new(b)));
                        d.wrap(Rule::Finish, p, Label::Ok, 0, s, Some(r))
                    }
                    None => {
                        let l = end_of_finish_label(*mu, d.label, live);
                        d.wrap(Rule::EndOfFinish, p, l, 0, s, None)
                    }
                })
                .collect(),

            K::Seq(left, right) => {
                let mut out = Vec::new();
                for d in self.derive(left, g, p)? {
                    let sync_fail = matches!(d.label, Label::SyncExc(_));
                    match d.residual.clone() {
                        Some(l2) => {
                            let r = if sync_fail {
                                l2
                            } else {
                                s.rebuild(K::Seq(Arc::new(l2), right.clone()))
                            };
                            let l = d.label;
                            out.push(d.wrap(Rule::Seq, p, l, 0, s, Some(r)));
                        }
                        None if live || !self.resilient() => {
                            let rule = if self.resilient() {
                                Rule::SeqTerm
                            } else {
                                Rule::Seq
                            };
                            let r = if sync_fail {
                                None
                            } else {
                                Some((**right).clone())
                            };
                            let l = d.label;
                            out.push(d.wrap(rule, p, l, 0, s, r));
                        }
                        None if is_sync(left)
                            && self.mutation == Some(Mutation::SeqFailedTermIgnoresSync) =>
                        {
                            let r = Some((**right).clone());
                            out.push(d.wrap(
                                Rule::SeqFailedTerm,
                                p,
                                Label::AsyncExc(ExcConst::DP),
                                0,
                                s,
                                r,
                            ));
                        }
                        None if is_sync(left) => {
                            out.push(d.wrap(Rule::SeqFailedTerm, p, DP_SYNC, 0, s, None))
                        }
                        None if self.mutation == Some(Mutation::DropSeqFailedTermAsync) => {}
                        None => {
                            let r = Some((**right).clone());
                            out.push(d.wrap(
                                Rule::SeqFailedTerm,
                                p,
                                Label::AsyncExc(ExcConst::DP),
                                0,
                                s,
                                r,
                            ));
                        }
                    }
                }
                if is_async(left) {
                    for d in self.derive(right, g, p)? {
                        let r = match d.residual.clone() {
                            Some(r2) => s.rebuild(K::Seq(left.clone(), Arc::new(r2))),
                            None => (**left).clone(),
                        };
                        let l = d.label;
                        out.push(d.wrap(Rule::Par, p, l, 1, s, Some(r)));
                    }
                }
                out
            }

            K::At(q, _, _, _) | K::AtSimple(q, _)
                if self.resilient() && !(live && g.is_live(*q)) =>
            {
                let mut out = vec![Deriv::leaf(
                    Rule::PlaceShift,
                    p,
                    DP_SYNC,
                    s,
                    None,
                    g.clone(),
                )];
                if let K::At(q, x, e, body) = &s.kind {
                    if live && e.as_value().is_none() {
                        out.extend(self.ctx(s, g, p, e, |e2| {
                            s.rebuild(K::At(*q, x.clone(), e2, body.clone()))
                        })?);
                    }
                }
                out
            }
            K::At(q, x, e, body) => match e.as_value() {
                None => self.ctx(s, g, p, e, |e2| {
                    s.rebuild(K::At(*q, x.clone(), e2, body.clone()))
                })?,
                Some(v) => {
                    let (v2, g2) = copy(v, *q, g).map_err(|err| match err {
                        HeapError::PlaceNotLive(q) => EngineFault::PlaceMissing(q),
                        other => EngineFault::Heap(other),
                    })?;
                    let r = shifted(s, *q, substitute(body, x, v2));
                    vec![Deriv::leaf(Rule::PlaceShift, p, Label::Ok, s, Some(r), g2)]
                }
            },
            K::AtSimple(q, body) => {
                if !g.is_live(*q) {
                    return Err(EngineFault::PlaceMissing(*q));
                }
                let r = shifted(s, *q, (**body).clone());
                vec![Deriv::leaf(
                    Rule::PlaceShift,
                    p,
                    Label::Ok,
                    s,
                    Some(r),
                    g.clone(),
                )]
            }

            K::DynAt(q, body) => self
                .derive(body, g, *q)?
                .into_iter()
                .map(|d| {
                    let r = d
                        .residual
                        .clone()
                        .map(|b| s.rebuild(K::DynAt(*q, Arc::new(b))));
                    let l = if self.resilient() {
                        mask_at_return(d.label, live)
                    } else {
                        d.label
                    };
                    d.wrap(Rule::At, p, l, 0, s, r)
                })
                .collect(),

            K::TryCatch(body, handler) => self
                .derive(body, g, p)?
                .into_iter()
                .map(|d| {
                    let caught =
                        matches!(d.label, Label::SyncExc(_)) && (live || !self.resilient());
                    if caught {
                        let r = match d.residual.clone() {
                            Some(b) => s.rebuild(K::Seq(Arc::new(b), handler.clone())),
                            None => (**handler).clone(),
                        };
                        d.wrap(Rule::Try, p, Label::Ok, 0, s, Some(r))
                    } else {
                        let r = match d.residual.clone() {
                            Some(b) if !matches!(d.label, Label::SyncExc(_)) => {
                                Some(s.rebuild(K::TryCatch(Arc::new(b), handler.clone())))
                            }
                            // dead place: the handler is dropped
                            other => other,
                        };
                        let l = d.label;
                        d.wrap(Rule::Try, p, l, 0, s, r)
                    }
                })
                .collect(),
        })
    }

    /// (Ctx): one expression step inside `s`.
    fn ctx(
        &self,
        s: &Stmt,
        g: &GlobalHeap,
        p: Place,
        e: &tx10_syntax::Expr,
        rebuild: impl FnOnce(tx10_syntax::Expr) -> Stmt,
    ) -> Result<Vec<Deriv>, EngineFault> {
        let h = g.local(p).ok_or(EngineFault::PlaceMissing(p))?;
        let mut d = match eval_step(e, h, p)? {
            EvalOutcome::Step(e2, h2, r) => {
                let mut d = Deriv::leaf(
                    Rule::Ctx,
                    p,
                    Label::Ok,
                    s,
                    Some(rebuild(e2)),
                    g.with_local(p, h2),
                );
                d.expr_rule = Some(r);
                d
            }
            EvalOutcome::Thrown(x, r) => {
                let mut d = Deriv::leaf(Rule::Ctx, p, Label::SyncExc(x), s, None, g.clone());
                d.expr_rule = Some(r);
                d
            }
            EvalOutcome::AlreadyValue => unreachable!("ctx is only entered on non-values"),
        };
        d.frames[0].rule = Rule::Ctx;
        Ok(vec![d])
    }
}

/// `at(q){body}` after (Place Shift): `dynat(q){ body skip }`. New nodes
/// inherit the label of the place shift.
fn shifted(at: &Stmt, q: Place, body: Stmt) -> Stmt {
    let seq = at.rebuild(StmtKind::Seq(
        Arc::new(body),
        Arc::new(at.rebuild(StmtKind::Skip)),
    ));
    at.rebuild(StmtKind::DynAt(q, Arc::new(seq)))
}

/// Failure-free transitions of `⟨s,g⟩` at `p`.
pub fn stmt_transitions(
    s: &Stmt,
    g: &GlobalHeap,
    p: Place,
) -> Result<Vec<Transition>, EngineFault> {
    Stepper::new(Semantics::Tx10).transitions(s, g, p)
}

/// Top-level transitions of the failure-free semantics (judgment place 0).
pub fn program_transitions(k: &Config) -> Result<Vec<Transition>, EngineFault> {
    match k {
        Config::Done(_) => Ok(vec![]),
        Config::Running(s, g) => stmt_transitions(s, g, 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tx10_syntax::{parse_runtime, ExcSet};

    fn rt(src: &str) -> Stmt {
        let src = if src.ends_with(['}', ';']) {
            src.to_string()
        } else {
            format!("{src};")
        };
        parse_runtime(&src).unwrap().strip_labels()
    }

    fn summary(ts: &[Transition]) -> Vec<(Rule, Label, Config)> {
        let strip = |k: &Config| match k {
            Config::Running(s, g) => Config::Running(s.strip_labels(), g.clone()),
            done => done.clone(),
        };
        ts.iter()
            .map(|t| (t.rule, t.label, strip(&t.target)))
            .collect()
    }

    #[test]
    fn spawn() {
        let g = GlobalHeap::empty(1);
        let ts = stmt_transitions(&Stmt::async_(Stmt::skip()), &g, 0).unwrap();
        assert_eq!(
            summary(&ts),
            vec![(
                Rule::Spawn,
                Label::Ok,
                Config::Running(Stmt::spawned(Stmt::skip()), g)
            )]
        );
    }

    #[test]
    fn end_of_finish_with_pending_exception() {
        let g = GlobalHeap::empty(1);
        let s = Stmt::finish_mu(ExcSet::EMPTY.with(ExcConst::E), Stmt::skip());
        let ts = stmt_transitions(&s, &g, 0).unwrap();
        assert_eq!(
            summary(&ts),
            vec![(
                Rule::EndOfFinish,
                Label::SyncExc(ExcConst::E),
                Config::Done(g)
            )]
        );
    }

    #[test]
    fn seq_and_par_both_enabled() {
        let g = GlobalHeap::empty(1);
        let s = Stmt::seq(Stmt::spawned(Stmt::skip()), Stmt::throw(ExcConst::E));
        let ts = stmt_transitions(&s, &g, 0).unwrap();
        assert_eq!(
            summary(&ts),
            vec![
                (
                    Rule::Par,
                    Label::SyncExc(ExcConst::E),
                    Config::Running(Stmt::spawned(Stmt::skip()), g.clone())
                ),
                (
                    Rule::Seq,
                    Label::Ok,
                    Config::Running(Stmt::throw(ExcConst::E), g.clone())
                ),
            ]
        );
        assert_eq!(
            ts[1].frames.iter().map(|f| f.rule).collect::<Vec<_>>(),
            vec![Rule::Seq, Rule::Async, Rule::Skip]
        );
        assert_eq!(ts[0].path(), vec![1, 0]);
    }

    #[test]
    fn done_is_terminal() {
        assert!(program_transitions(&Config::Done(GlobalHeap::empty(1)))
            .unwrap()
            .is_empty());
        let g = GlobalHeap::empty(1);
        let ts = program_transitions(&Config::Running(Stmt::skip(), g.clone())).unwrap();
        assert_eq!(summary(&ts), vec![(Rule::Skip, Label::Ok, Config::Done(g))]);
    }

    #[test]
    fn wrapper_steps_through_finish_and_at() {
        let g = GlobalHeap::empty(1);
        let w = tx10_syntax::wrap_program(&Stmt::skip());
        let ts = program_transitions(&Config::Running(w, g)).unwrap();
        assert_eq!(ts.len(), 1);
        let rules: Vec<Rule> = ts[0].frames.iter().map(|f| f.rule).collect();
        assert_eq!(rules, vec![Rule::Finish, Rule::At, Rule::Seq, Rule::Skip]);
    }

    #[test]
    fn place_shift_copies_and_appends_skip() {
        let g = GlobalHeap::empty(2);
        let s = rt("val x = {f: E} in { at (1) val y = x { y.f = BF; } }");
        let t1 = &stmt_transitions(&s, &g, 0).unwrap()[0];
        assert_eq!(t1.rule, Rule::Ctx);
        let Config::Running(s1, g1) = &t1.target else {
            panic!()
        };
        let t2 = &stmt_transitions(s1, g1, 0).unwrap()[0];
        assert_eq!(t2.rule, Rule::DeclareVal);
        assert_eq!(t2.leaf_rule(), Rule::PlaceShift);
        let Config::Running(s2, g2) = &t2.target else {
            panic!()
        };
        assert_eq!(
            stmt_to_string_for_test(s2),
            "dynat (1) { o(1,0).f = BF; skip; }"
        );
        assert_eq!(g2.digest(), "0[o(0,0){f=E}] 1[o(1,0){f=E}]");
    }

    fn stmt_to_string_for_test(s: &Stmt) -> String {
        tx10_syntax::stmt_to_string(s)
    }

    #[test]
    fn try_catches_sync_only() {
        let g = GlobalHeap::empty(1);
        let s = rt("try { throw E; } catch { skip; }");
        let ts = stmt_transitions(&s, &g, 0).unwrap();
        assert_eq!(
            summary(&ts),
            vec![(Rule::Try, Label::Ok, Config::Running(rt("skip"), g.clone()))]
        );
        let s = rt("try { spawned { throw E; } } catch { skip; }");
        let ts = stmt_transitions(&s, &g, 0).unwrap();
        assert_eq!(
            summary(&ts),
            vec![(Rule::Try, Label::AsyncExc(ExcConst::E), Config::Done(g))]
        );
    }

    #[test]
    fn bad_field_update_on_unknown_oid() {
        let g = GlobalHeap::empty(1);
        let s = rt("o(0,3).f = E");
        let ts = stmt_transitions(&s, &g, 0).unwrap();
        assert_eq!(
            summary(&ts),
            vec![(
                Rule::BadFieldUpdate,
                Label::SyncExc(ExcConst::BF),
                Config::Done(g)
            )]
        );
    }

    #[test]
    fn tx10_rejects_missing_place() {
        let g = GlobalHeap::empty(1);
        let s = rt("dynat (3) { skip; }");
        assert_eq!(
            stmt_transitions(&s, &g, 0),
            Err(EngineFault::PlaceMissing(3))
        );
    }

    #[test]
    fn local_failure_at_dead_place() {
        let g = fail_place(&GlobalHeap::empty(3), 2).unwrap();
        let st = Stepper::new(Semantics::Resilient);
        for src in [
            "skip",
            "throw E",
            "val x = {} in { skip; }",
            "{}.f = E",
            "async { skip; }",
            "at (1) { skip; }",
        ] {
            let ts = st.transitions(&rt(src), &g, 2).unwrap();
            assert_eq!(ts.len(), 1, "{src}");
            assert_eq!(
                (ts[0].label, ts[0].target.clone()),
                (DP_SYNC, Config::Done(g.clone())),
                "{src}"
            );
        }
    }

    #[test]
    fn seq_failed_term_async_keeps_continuation() {
        let g = fail_place(&GlobalHeap::empty(3), 2).unwrap();
        let st = Stepper::new(Semantics::Resilient);
        let s = rt("{ dynat (1) { spawned { skip; } } throw E; }");
        let ts = st.transitions(&s, &g, 2).unwrap();
        assert_eq!(
            summary(&ts),
            vec![
                (
                    Rule::Par,
                    DP_SYNC,
                    Config::Running(rt("dynat (1) { spawned { skip; } }"), g.clone())
                ),
                (
                    Rule::SeqFailedTerm,
                    Label::AsyncExc(ExcConst::DP),
                    Config::Running(rt("throw E"), g.clone())
                ),
            ]
        );
    }

    #[test]
    fn place_shift_to_dead_place() {
        let g = fail_place(&GlobalHeap::empty(3), 1).unwrap();
        let st = Stepper::new(Semantics::Resilient);
        let s = rt("at (1) val x = E { skip; }");
        let ts = st.transitions(&s, &g, 0).unwrap();
        assert_eq!(
            summary(&ts),
            vec![(Rule::PlaceShift, DP_SYNC, Config::Done(g.clone()))]
        );
        // unevaluated argument: both the failure and the argument step
        let s = rt("at (1) val x = {} { skip; }");
        let rules: Vec<Rule> = st
            .transitions(&s, &g, 0)
            .unwrap()
            .iter()
            .map(|t| t.rule)
            .collect();
        assert_eq!(rules, vec![Rule::Ctx, Rule::PlaceShift]);
    }

    #[test]
    fn at_masks_sync_exception_for_dead_caller() {
        let g = fail_place(&GlobalHeap::empty(3), 2).unwrap();
        let st = Stepper::new(Semantics::Resilient);
        let ts = st
            .transitions(&rt("dynat (1) { throw BF; }"), &g, 2)
            .unwrap();
        assert_eq!(
            summary(&ts),
            vec![(Rule::At, DP_SYNC, Config::Done(g.clone()))]
        );
        let ts = st
            .transitions(&rt("dynat (1) { throw BF; }"), &g, 0)
            .unwrap();
        assert_eq!(ts[0].label, Label::SyncExc(ExcConst::BF));
    }

    #[test]
    fn try_at_dead_place_skips_handler() {
        let g = fail_place(&GlobalHeap::empty(3), 2).unwrap();
        let st = Stepper::new(Semantics::Resilient);
        let ts = st
            .transitions(&rt("try { skip; } catch { skip; }"), &g, 2)
            .unwrap();
        assert_eq!(
            summary(&ts),
            vec![(Rule::Try, DP_SYNC, Config::Done(g.clone()))]
        );
    }

    #[test]
    fn failure_transitions_skip_zero_and_dead() {
        let g = fail_place(&GlobalHeap::empty(3), 2).unwrap();
        let st = Stepper::new(Semantics::Resilient);
        let k = Config::Running(Stmt::skip(), g);
        let ts = st.failure_transitions(&k, &[0, 1, 2]);
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].injected, Some(1));
        assert_eq!(
            ts[0].target.heap().live_places().collect::<Vec<_>>(),
            vec![0]
        );
        assert!(Stepper::new(Semantics::Tx10)
            .failure_transitions(&k, &[1])
            .is_empty());
    }

    #[test]
    fn mutations_remove_rules() {
        let g = GlobalHeap::empty(1);
        let st = Stepper::mutated(Semantics::Tx10, Mutation::DropSkip);
        assert!(st.transitions(&Stmt::skip(), &g, 0).unwrap().is_empty());
    }

    #[test]
    fn rule_names_round_trip() {
        for r in Rule::ALL {
            assert_eq!(Rule::from_name(r.name()), Some(r));
        }
    }
}
