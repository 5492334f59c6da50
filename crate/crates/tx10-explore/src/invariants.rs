//! Metatheory checks over an explored transition system. Each check
//! inspects every edge (and every frame of its derivation) or every node,
//! and reports the first violation with the path that reaches it.

use std::fmt;

use tx10_heap::{fail_place, is_place_local, GlobalHeap, Locality};
use tx10_sem::{mask_at_return, Config, Frame, Rule, Semantics, Stepper, Transition};
use tx10_syntax::{
    is_async, is_local, is_remote, is_sync, no_async, ExcConst, Label, Place, Stmt, StmtKind, Value,
};

use crate::lts::Lts;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    NoStuck,
    PlaceLocal,
    SyncFail,
    AsyncRedux,
    FinishShield,
    Emp,
    Fpp,
    LocalFailure,
    Remote,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::NoStuck,
        Check::PlaceLocal,
        Check::SyncFail,
        Check::AsyncRedux,
        Check::FinishShield,
        Check::Emp,
        Check::Fpp,
        Check::LocalFailure,
        Check::Remote,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::NoStuck => "no-stuck",
            Check::PlaceLocal => "place-local",
            Check::SyncFail => "sync-fail",
            Check::AsyncRedux => "async-redux",
            Check::FinishShield => "finish-shield",
            Check::Emp => "emp",
            Check::Fpp => "fpp",
            Check::LocalFailure => "local-failure",
            Check::Remote => "remote",
        }
    }

    pub fn from_name(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }

    /// Checks that only say something about failed places.
    pub fn resilient_only(self) -> bool {
        matches!(
            self,
            Check::Emp | Check::Fpp | Check::LocalFailure | Check::Remote
        )
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: usize,
    pub edge: Option<usize>,
    /// Edge ids from the root to `node`.
    pub path: Vec<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub check: Check,
    pub checked: usize,
    pub violation: Option<Violation>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    pub results: Vec<CheckResult>,
    /// The LTS was cut by a bound; universal claims are bounded only.
    pub bounded_only: bool,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed())
    }

    pub fn result(&self, c: Check) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.check == c)
    }

    pub fn lines(&self, lts: &Lts) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.results {
            let verdict = if r.passed() { "pass" } else { "fail" };
            let mut line = format!(
                "check={} verdict={} checked={}",
                r.check, verdict, r.checked
            );
            if self.bounded_only {
                line += " bounded=yes";
            }
            if let Some(v) = &r.violation {
                line += &format!(" node={} message={}", v.node, v.message);
                out.push(line);
                for &e in &v.path {
                    let t = &lts.edges[e].transition;
                    out.push(format!(
                        "  path rule={} label={} to={}",
                        t.rule,
                        tx10_sem::label_text(t.label),
                        lts.edges[e].to
                    ));
                }
                out.push(format!("  at {}", lts.nodes[v.node]));
            } else {
                out.push(line);
            }
        }
        out
    }
}

/// Run the selected checks over every node and edge of `lts`.
pub fn check_invariants(lts: &Lts, which: &[Check]) -> InvariantReport {
    let stepper = Stepper::new(lts.sem);
    let results = which.iter().map(|&c| run_check(lts, c, &stepper)).collect();
    InvariantReport {
        results,
        bounded_only: lts.bound_hit,
    }
}

fn run_check(lts: &Lts, c: Check, st: &Stepper) -> CheckResult {
    let mut checked = 0usize;
    let violation = |node: usize, edge: Option<usize>, message: String| {
        let path = match edge {
            Some(e) => {
                let mut p = lts.path_to(lts.edges[e].from);
                p.push(e);
                p
            }
            None => lts.path_to(node),
        };
        Violation {
            node,
            edge,
            path,
            message,
        }
    };

    if c == Check::NoStuck {
        for (n, k) in lts.nodes.iter().enumerate() {
            if !lts.expanded[n] || k.is_done() {
                continue;
            }
            checked += 1;
            if !lts.out[n]
                .iter()
                .any(|&e| lts.edges[e].transition.injected.is_none())
            {
                return CheckResult {
                    check: c,
                    checked,
                    violation: Some(violation(n, None, format!("stuck at {k}"))),
                };
            }
        }
        return CheckResult {
            check: c,
            checked,
            violation: None,
        };
    }

    for (i, e) in lts.edges.iter().enumerate() {
        let source = &lts.nodes[e.from];
        let g = source.heap();
        let t = &e.transition;
        checked += 1;
        let outcome = match c {
            Check::NoStuck => unreachable!(),
            Check::PlaceLocal => place_local(&t.target),
            Check::SyncFail => each_frame(t, sync_fail),
            Check::AsyncRedux => each_frame(t, async_redux),
            Check::FinishShield => each_frame(t, |f| {
                (f.rule == Rule::Finish && !f.label.is_ok())
                    .then(|| format!("finish emitted {:?}", f.label))
            }),
            Check::Emp => each_frame(t, |f| emp(f, g)),
            Check::Fpp => fpp(t, g),
            Check::LocalFailure => local_failure(t, g, st),
            Check::Remote => remote(t, g, st),
        };
        if let Some(msg) = outcome {
            return CheckResult {
                check: c,
                checked,
                violation: Some(violation(e.to, Some(i), msg)),
            };
        }
    }
    CheckResult {
        check: c,
        checked,
        violation: None,
    }
}

fn each_frame(t: &Transition, f: impl Fn(&Frame) -> Option<String>) -> Option<String> {
    if t.injected.is_some() {
        return None;
    }
    t.frames
        .iter()
        .find_map(|fr| f(fr).map(|m| format!("{} frame at {}: {m}", fr.rule, fr.place)))
}

/// Heap place-locality, and every oid homed at a live place p that
/// occurs under a shift to p is allocated there.
pub fn place_local(k: &Config) -> Option<String> {
    let g = k.heap();
    if let Locality::Violation { place, oid, value } = is_place_local(g) {
        return Some(format!("heap at {place}: object {oid} holds {value:?}"));
    }
    let Config::Running(s, _) = k else {
        return None;
    };
    let mut bad = None;
    oids_by_place(s, 0, &mut |p, o| {
        if bad.is_none() && o.place == p && g.is_live(p) && g.object(o).is_none() {
            bad = Some(format!("{o} under place {p} is not allocated"));
        }
    });
    bad
}

fn oids_by_place(s: &Stmt, p: Place, f: &mut impl FnMut(Place, tx10_syntax::Oid)) {
    use StmtKind as K;
    let visit_exprs = |p: Place, s: &Stmt, f: &mut dyn FnMut(Place, tx10_syntax::Oid)| {
        for e in s.exprs() {
            let mut vs = Vec::new();
            e.values(&mut vs);
            for v in vs {
                if let Value::Oid(o) = v {
                    f(p, o);
                }
            }
        }
    };
    visit_exprs(p, s, f);
    match &s.kind {
        K::At(q, _, _, body) | K::AtSimple(q, body) | K::DynAt(q, body) => {
            oids_by_place(body, *q, f)
        }
        _ => {
            for c in s.children() {
                oids_by_place(c, p, f);
            }
        }
    }
}

fn sync_fail(f: &Frame) -> Option<String> {
    if !matches!(f.label, Label::SyncExc(_)) {
        return None;
    }
    if !is_sync(&f.source) {
        return Some("synchronous failure from an async statement".into());
    }
    match &f.residual {
        Some(r) if !is_async(r) => Some(format!(
            "residual {r} after a synchronous failure is not async"
        )),
        _ => None,
    }
}

fn async_redux(f: &Frame) -> Option<String> {
    match &f.residual {
        Some(r) if is_async(&f.source) && !is_async(r) => {
            Some(format!("async {} stepped to sync {r}", f.source))
        }
        _ => None,
    }
}

fn emp(f: &Frame, g: &GlobalHeap) -> Option<String> {
    match f.label {
        Label::SyncExc(v) if !g.is_live(f.place) && v != ExcConst::DP => {
            Some(format!("{v} escaped a failed place"))
        }
        _ => None,
    }
}

/// An ok step at a failed place must come from a remote step at a live
/// place, or from a finish absorbing a DP.
fn fpp(t: &Transition, g: &GlobalHeap) -> Option<String> {
    if t.injected.is_some() {
        return None;
    }
    for (i, f) in t.frames.iter().enumerate() {
        if !f.label.is_ok() || g.is_live(f.place) {
            continue;
        }
        let below = &t.frames[i..];
        let remote = below.iter().any(|b| match &b.source.kind {
            StmtKind::DynAt(q, _) => b.rule == Rule::At && *q != f.place && g.is_live(*q),
            _ => false,
        });
        let absorbed = below
            .windows(2)
            .any(|w| w[0].rule == Rule::Finish && w[1].label.exc() == Some(ExcConst::DP));
        if !remote && !absorbed {
            return Some(format!(
                "{} frame stepped at failed place {} with no remote step or DP absorption",
                f.rule, f.place
            ));
        }
    }
    None
}

/// At a failed place, a local statement without activities can only
/// fail with DP.
fn local_failure(t: &Transition, g: &GlobalHeap, st: &Stepper) -> Option<String> {
    if t.injected.is_some() || st.sem != Semantics::Resilient {
        return None;
    }
    for f in &t.frames {
        if g.is_live(f.place) || !is_local(&f.source) || !no_async(&f.source) {
            continue;
        }
        let ts = match st.transitions(&f.source, g, f.place) {
            Ok(ts) => ts,
            Err(e) => return Some(format!("engine fault {e}")),
        };
        let ok = ts.len() == 1
            && ts[0].label == Label::SyncExc(ExcConst::DP)
            && ts[0].target == Config::Done(g.clone());
        if !ok {
            return Some(format!(
                "{} at failed place {} has {} steps, not a single DP",
                f.source,
                f.place,
                ts.len()
            ));
        }
    }
    None
}

/// A remote statement steps the same way once its place has failed,
/// up to DP masking of synchronous labels.
///
/// Derivations that end the first component of a sequence at the place
/// itself are skipped: there the failed place takes (Seq Failed Term)
/// instead of (Seq Term), which the literal rules make observable.
fn remote(t: &Transition, g: &GlobalHeap, st: &Stepper) -> Option<String> {
    if t.injected.is_some() || st.sem != Semantics::Resilient {
        return None;
    }
    for f in &t.frames {
        let p = f.place;
        if p == 0 || !g.is_live(p) || !is_remote(&f.source, p) {
            continue;
        }
        let g_dead = fail_place(g, p).expect("live non-zero place");
        let live = st.transitions(&f.source, g, p).ok()?;
        let dead = st.transitions(&f.source, &g_dead, p).ok()?;
        let strip = |k: &Config| -> Config {
            match k {
                Config::Running(s, h) => {
                    Config::Running(s.clone(), fail_place(h, p).unwrap_or_else(|_| h.clone()))
                }
                Config::Done(h) => Config::Done(fail_place(h, p).unwrap_or_else(|_| h.clone())),
            }
        };
        for lt in live.iter().filter(|lt| !path_has_seq_end(lt, p)) {
            let want = (mask_at_return(lt.label, false), strip(&lt.target));
            if !dead.iter().any(|dt| (dt.label, dt.target.clone()) == want) {
                return Some(format!(
                    "{} at {p}: step {:?} to {} lost after failing {p}",
                    f.source, lt.label, lt.target
                ));
            }
        }
    }
    None
}

/// The live step ends the first component of a sequence at `p`.
fn path_has_seq_end(t: &Transition, p: Place) -> bool {
    t.frames
        .iter()
        .any(|x| x.place == p && x.rule == Rule::SeqTerm)
}
