//! The equational laws of both calculi, instantiated over a small fixed
//! corpus of statements and checked with the bounded bisimulation game.

use std::collections::HashMap;

use tx10_heap::GlobalHeap;
use tx10_sem::{Config, EngineFault, Semantics};
use tx10_syntax::{is_async, is_local, is_sync, no_async, parse_runtime, Stmt};

use crate::bisim::{place_count, BisimOptions, BisimVerdict, Game, Witness};
use crate::hb::sem_name;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Equiv,
    Differ,
}

impl Expect {
    pub fn name(self) -> &'static str {
        match self {
            Expect::Equiv => "equiv",
            Expect::Differ => "differ",
        }
    }
}

/// Which statements a metavariable ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    All,
    Small,
}

/// Sync statements of the corpus, written in surface syntax.
pub const SYNC_CORPUS: [&str; 8] = [
    "skip;",
    "throw E;",
    "val x = {} in { skip; }",
    "val x = {f: E} in { x.f = E; }",
    "async { skip; }",
    "async { throw E; }",
    "at (1) { skip; }",
    "at (1) { throw E; }",
];

pub const ASYNC_CORPUS: [&str; 3] = [
    "spawned { skip; }",
    "spawned { throw E; }",
    "dynat (1) { spawned { throw E; } }",
];

/// Exception values `$v` ranges over. `BF` makes masking by a finish
/// observable.
pub const EXC_VALUES: [&str; 2] = ["E", "BF"];

/// Used where a law has three metavariables.
pub const SMALL_CORPUS: [&str; 5] = [
    "skip;",
    "throw E;",
    "val x = {f: E} in { x.f = E; }",
    "async { throw E; }",
    "spawned { throw E; }",
];

type Cond = fn(&[Stmt]) -> bool;

#[derive(Clone, Copy)]
pub struct Law {
    pub name: &'static str,
    pub sem: Semantics,
    pub expect: Expect,
    /// Side condition as written in reports.
    pub side: &'static str,
    /// Templates over `$s $t $u`, `$p $q` and `$v`.
    pub lhs: &'static str,
    pub rhs: &'static str,
    pub domain: Domain,
    /// Choices for `($p, $q)`.
    pub places: &'static [(u32, u32)],
    pub cond: Cond,
}

fn any(_: &[Stmt]) -> bool {
    true
}
fn sync_s(v: &[Stmt]) -> bool {
    is_sync(&v[0])
}
fn async_s(v: &[Stmt]) -> bool {
    is_async(&v[0])
}
fn async_st(v: &[Stmt]) -> bool {
    is_async(&v[0]) && is_async(&v[1])
}
fn async_seq_st(v: &[Stmt]) -> bool {
    is_async(&Stmt::seq(v[0].clone(), v[1].clone()))
}
fn no_async_s(v: &[Stmt]) -> bool {
    no_async(&v[0])
}
fn no_async_local_s(v: &[Stmt]) -> bool {
    no_async(&v[0]) && is_local(&v[0])
}

const P1: &[(u32, u32)] = &[(1, 0)];
const P01: &[(u32, u32)] = &[(0, 0), (1, 0)];
const PQ: &[(u32, u32)] = &[(0, 1), (1, 0), (1, 1)];
const PQ3: &[(u32, u32)] = &[(1, 2), (2, 1)];

macro_rules! law {
    ($name:expr, $sem:ident, $exp:ident, $side:expr, $lhs:expr, $rhs:expr, $dom:ident, $pl:expr, $cond:expr) => {
        Law {
            name: $name,
            sem: Semantics::$sem,
            expect: Expect::$exp,
            side: $side,
            lhs: $lhs,
            rhs: $rhs,
            domain: Domain::$dom,
            places: $pl,
            cond: $cond,
        }
    };
}

/// Every law of both calculi, failure-free first.
pub fn all_laws() -> Vec<Law> {
    vec![
        law!(
            "seq-skip-left",
            Tx10,
            Equiv,
            "isSync s",
            "{ skip; $s }",
            "$s",
            All,
            P1,
            sync_s
        ),
        law!(
            "seq-skip-right",
            Tx10,
            Equiv,
            "isSync s",
            "{ $s skip; }",
            "$s",
            All,
            P1,
            sync_s
        ),
        law!(
            "throw-absorbs",
            Tx10,
            Equiv,
            "-",
            "{ throw $v; $s }",
            "throw $v;",
            All,
            P1,
            any
        ),
        law!(
            "seq-assoc",
            Tx10,
            Equiv,
            "-",
            "{ { $s $t } $u }",
            "{ $s { $t $u } }",
            Small,
            P1,
            any
        ),
        law!(
            "try-skip",
            Tx10,
            Equiv,
            "-",
            "try { skip; } catch { $t }",
            "skip;",
            All,
            P1,
            any
        ),
        law!(
            "try-throw",
            Tx10,
            Equiv,
            "isSync s",
            "try { throw $v; } catch { $s }",
            "$s",
            All,
            P1,
            sync_s
        ),
        law!(
            "try-rethrow",
            Tx10,
            Equiv,
            "-",
            "try { $s } catch { throw E; }",
            "$s",
            All,
            P1,
            any
        ),
        law!(
            "try-distrib",
            Tx10,
            Differ,
            "-",
            "try { $s $t } catch { $u }",
            "{ try { $s } catch { $u } try { $t } catch { $u } }",
            Small,
            P1,
            any
        ),
        law!(
            "try-distrib-async",
            Tx10,
            Equiv,
            "isAsync {s t}",
            "try { $s $t } catch { $u }",
            "{ try { $s } catch { $u } try { $t } catch { $u } }",
            All,
            P1,
            async_seq_st
        ),
        law!(
            "try-assoc",
            Tx10,
            Equiv,
            "-",
            "try { try { $s } catch { $t } } catch { $u }",
            "try { $s } catch { try { $t } catch { $u } }",
            Small,
            P1,
            any
        ),
        law!(
            "at-skip",
            Tx10,
            Equiv,
            "-",
            "at ($p) { skip; }",
            "skip;",
            All,
            P01,
            any
        ),
        law!(
            "dynat-skip",
            Tx10,
            Equiv,
            "-",
            "dynat ($p) { skip; }",
            "skip;",
            All,
            P01,
            any
        ),
        law!(
            "at-throw",
            Tx10,
            Equiv,
            "-",
            "at ($p) { throw $v; }",
            "throw $v;",
            All,
            P01,
            any
        ),
        law!(
            "dynat-throw",
            Tx10,
            Equiv,
            "-",
            "dynat ($p) { throw $v; }",
            "throw $v;",
            All,
            P01,
            any
        ),
        law!(
            "at-seq",
            Tx10,
            Equiv,
            "-",
            "at ($p) { $s $t }",
            "{ at ($p) { $s } at ($p) { $t } }",
            All,
            P1,
            any
        ),
        law!(
            "dynat-seq",
            Tx10,
            Equiv,
            "-",
            "dynat ($p) { $s $t }",
            "{ dynat ($p) { $s } dynat ($p) { $t } }",
            All,
            P1,
            any
        ),
        law!(
            "at-try",
            Tx10,
            Equiv,
            "-",
            "at ($p) { try { $s } catch { $t } }",
            "try { at ($p) { $s } } catch { at ($p) { $t } }",
            All,
            P1,
            any
        ),
        law!(
            "dynat-try",
            Tx10,
            Equiv,
            "-",
            "dynat ($p) { try { $s } catch { $t } }",
            "try { dynat ($p) { $s } } catch { dynat ($p) { $t } }",
            All,
            P1,
            any
        ),
        law!(
            "at-at",
            Tx10,
            Equiv,
            "-",
            "at ($p) { at ($q) { $s } }",
            "at ($q) { $s }",
            All,
            PQ,
            any
        ),
        law!(
            "dynat-dynat",
            Tx10,
            Equiv,
            "-",
            "dynat ($p) { dynat ($q) { $s } }",
            "dynat ($q) { $s }",
            All,
            PQ,
            any
        ),
        law!(
            "spawned-skip",
            Tx10,
            Differ,
            "-",
            "spawned { skip; }",
            "skip;",
            All,
            P1,
            any
        ),
        law!(
            "spawned-throw",
            Tx10,
            Differ,
            "-",
            "spawned { throw $v; }",
            "throw $v;",
            All,
            P1,
            any
        ),
        law!(
            "spawned-throw-twice",
            Tx10,
            Differ,
            "-",
            "{ spawned { throw $v; } spawned { throw $v; } }",
            "spawned { throw $v; }",
            All,
            P1,
            any
        ),
        law!(
            "spawned-throw-commute",
            Tx10,
            Equiv,
            "isAsync s",
            "{ spawned { throw $v; } $s }",
            "{ $s spawned { throw $v; } }",
            All,
            P1,
            async_s
        ),
        law!(
            "async-at",
            Tx10,
            Equiv,
            "-",
            "async { at ($p) { $s } }",
            "at ($p) { async { $s } }",
            All,
            P1,
            any
        ),
        law!(
            "spawned-dynat",
            Tx10,
            Equiv,
            "-",
            "spawned { dynat ($p) { $s } }",
            "dynat ($p) { spawned { $s } }",
            All,
            P1,
            any
        ),
        law!(
            "async-async",
            Tx10,
            Equiv,
            "-",
            "async { async { $s } }",
            "async { $s }",
            All,
            P1,
            any
        ),
        law!(
            "async-commute",
            Tx10,
            Equiv,
            "isAsync s, t",
            "{ $s $t }",
            "{ $t $s }",
            All,
            P1,
            async_st
        ),
        law!(
            "try-async-prefix",
            Tx10,
            Equiv,
            "isAsync s",
            "try { $s $t } catch { $u }",
            "{ $s try { $t } catch { $u } }",
            Small,
            P1,
            async_s
        ),
        law!(
            "finish-skip",
            Tx10,
            Equiv,
            "-",
            "finish { skip; }",
            "skip;",
            All,
            P1,
            any
        ),
        law!(
            "finish-throw",
            Tx10,
            Differ,
            "-",
            "finish { throw $v; }",
            "throw $v;",
            All,
            P1,
            any
        ),
        law!(
            "finish-seq",
            Tx10,
            Equiv,
            "-",
            "finish { $s $t }",
            "finish { $s finish { $t } }",
            All,
            P1,
            any
        ),
        law!(
            "finish-seq-throw",
            Tx10,
            Differ,
            "-",
            "finish { $s throw $v; }",
            "{ finish { $s } throw $v; }",
            All,
            P1,
            any
        ),
        law!(
            "finish-async",
            Tx10,
            Equiv,
            "-",
            "finish { async { $s } }",
            "finish { $s }",
            All,
            P1,
            any
        ),
        law!(
            "finish-seq-async",
            Tx10,
            Equiv,
            "-",
            "finish { $s async { $t } }",
            "finish { $s $t }",
            All,
            P1,
            any
        ),
        law!(
            "finish-at",
            Tx10,
            Equiv,
            "-",
            "finish { at ($p) { $s } }",
            "at ($p) { finish { $s } }",
            All,
            P1,
            any
        ),
        law!(
            "finish-async-throw",
            Tx10,
            Equiv,
            "-",
            "finish { async { throw E; } $s }",
            "{ finish { $s } throw E; }",
            All,
            P1,
            any
        ),
        law!(
            "finish-finish",
            Tx10,
            Equiv,
            "-",
            "finish { finish { $s } }",
            "finish { $s }",
            All,
            P1,
            any
        ),
        law!(
            "finish-noasync",
            Tx10,
            Differ,
            "noAsync s",
            "finish { $s }",
            "$s",
            All,
            P1,
            no_async_s
        ),
        law!(
            "finish-seq-noasync",
            Tx10,
            Differ,
            "noAsync s",
            "finish { $s $t }",
            "{ $s finish { $t } }",
            All,
            P1,
            no_async_s
        ),
        law!(
            "finish-try-noasync",
            Tx10,
            Differ,
            "noAsync s",
            "finish { try { $s } catch { $t } }",
            "try { $s } catch { finish { $t } }",
            All,
            P1,
            no_async_s
        ),
        // resilient calculus
        law!(
            "r-seq-skip-left",
            Resilient,
            Equiv,
            "noAsync s, isLocal s",
            "{ skip; $s }",
            "$s",
            All,
            P1,
            no_async_local_s
        ),
        law!(
            "r-seq-skip-right",
            Resilient,
            Differ,
            "isSync s",
            "{ $s skip; }",
            "$s",
            All,
            P1,
            sync_s
        ),
        law!(
            "r-throw-absorbs",
            Resilient,
            Equiv,
            "-",
            "{ throw $v; $s }",
            "throw $v;",
            All,
            P1,
            any
        ),
        law!(
            "r-seq-assoc",
            Resilient,
            Equiv,
            "-",
            "{ { $s $t } $u }",
            "{ $s { $t $u } }",
            Small,
            P1,
            any
        ),
        law!(
            "r-try-throw",
            Resilient,
            Equiv,
            "noAsync s, isLocal s",
            "try { throw $v; } catch { $s }",
            "$s",
            All,
            P1,
            no_async_local_s
        ),
        law!(
            "r-at-skip",
            Resilient,
            Differ,
            "-",
            "at ($p) { skip; }",
            "skip;",
            All,
            P1,
            any
        ),
        law!(
            "r-dynat-skip",
            Resilient,
            Differ,
            "-",
            "dynat ($p) { skip; }",
            "skip;",
            All,
            P1,
            any
        ),
        law!(
            "r-at-throw",
            Resilient,
            Equiv,
            "-",
            "at ($p) { throw $v; }",
            "throw $v;",
            All,
            P01,
            any
        ),
        law!(
            "r-dynat-throw",
            Resilient,
            Equiv,
            "-",
            "dynat ($p) { throw $v; }",
            "throw $v;",
            All,
            P01,
            any
        ),
        law!(
            "r-at-seq",
            Resilient,
            Differ,
            "-",
            "at ($p) { $s $t }",
            "{ at ($p) { $s } at ($p) { $t } }",
            All,
            P1,
            any
        ),
        law!(
            "r-dynat-seq",
            Resilient,
            Equiv,
            "-",
            "dynat ($p) { $s $t }",
            "{ dynat ($p) { $s } dynat ($p) { $t } }",
            All,
            P1,
            any
        ),
        law!(
            "r-at-try",
            Resilient,
            Differ,
            "-",
            "at ($p) { try { $s } catch { $t } }",
            "try { at ($p) { $s } } catch { at ($p) { $t } }",
            All,
            P1,
            any
        ),
        law!(
            "r-at-at",
            Resilient,
            Differ,
            "-",
            "at ($p) { at ($q) { $s } }",
            "at ($q) { $s }",
            All,
            PQ3,
            any
        ),
        law!(
            "r-dynat-dynat",
            Resilient,
            Differ,
            "-",
            "dynat ($p) { dynat ($q) { $s } }",
            "dynat ($q) { $s }",
            All,
            PQ3,
            any
        ),
        law!(
            "r-spawned-throw-commute",
            Resilient,
            Equiv,
            "isAsync s",
            "{ spawned { throw $v; } $s }",
            "{ $s spawned { throw $v; } }",
            All,
            P1,
            async_s
        ),
        law!(
            "r-async-at",
            Resilient,
            Differ,
            "-",
            "async { at ($p) { $s } }",
            "at ($p) { async { $s } }",
            All,
            P1,
            any
        ),
        law!(
            "r-spawned-dynat",
            Resilient,
            Differ,
            "-",
            "spawned { dynat ($p) { $s } }",
            "dynat ($p) { spawned { $s } }",
            All,
            P1,
            any
        ),
        law!(
            "r-async-async",
            Resilient,
            Equiv,
            "-",
            "async { async { $s } }",
            "async { $s }",
            All,
            P1,
            any
        ),
        law!(
            "r-async-commute",
            Resilient,
            Equiv,
            "isAsync s, t",
            "{ $s $t }",
            "{ $t $s }",
            All,
            P1,
            async_st
        ),
        law!(
            "r-try-async-prefix",
            Resilient,
            Equiv,
            "isAsync s",
            "try { $s $t } catch { $u }",
            "{ $s try { $t } catch { $u } }",
            Small,
            P1,
            async_s
        ),
        law!(
            "r-finish-at",
            Resilient,
            Differ,
            "-",
            "finish { at ($p) { $s } }",
            "at ($p) { finish { $s } }",
            All,
            P1,
            any
        ),
    ]
}

impl std::fmt::Debug for Law {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Law({})", self.name)
    }
}

pub fn law_by_name(name: &str) -> Option<Law> {
    all_laws().into_iter().find(|l| l.name == name)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub lhs: Stmt,
    pub rhs: Stmt,
    pub places: u32,
}

impl Instance {
    pub fn configs(&self) -> (Config, Config) {
        let g = GlobalHeap::empty(self.places);
        (
            Config::Running(self.lhs.clone(), g.clone()),
            Config::Running(self.rhs.clone(), g),
        )
    }
}

fn domain(d: Domain) -> Vec<&'static str> {
    match d {
        Domain::All => SYNC_CORPUS
            .iter()
            .chain(ASYNC_CORPUS.iter())
            .copied()
            .collect(),
        Domain::Small => SMALL_CORPUS.to_vec(),
    }
}

fn parse(text: &str) -> Stmt {
    parse_runtime(text)
        .unwrap_or_else(|e| panic!("law template {text}: {e}"))
        .strip_labels()
}

/// Metavariables used by a law, in `s t u` order.
fn metavars(law: &Law) -> Vec<&'static str> {
    ["$s", "$t", "$u"]
        .into_iter()
        .filter(|v| law.lhs.contains(v) || law.rhs.contains(v))
        .collect()
}

fn fill(template: &str, names: &[&str], vars: &[&str], v: &str, p: u32, q: u32) -> String {
    let mut out = template
        .replace("$p", &p.to_string())
        .replace("$q", &q.to_string())
        .replace("$v", v);
    for (name, v) in names.iter().zip(vars) {
        out = out.replace(name, v);
    }
    out
}

/// All side-condition respecting instances of `law`, in a fixed order.
pub fn instances(law: &Law) -> Vec<Instance> {
    let names = metavars(law);
    let arity = names.len();
    let dom = domain(law.domain);
    let mut tuples: Vec<Vec<&str>> = vec![vec![]];
    for _ in 0..arity {
        tuples = tuples
            .iter()
            .flat_map(|t| dom.iter().map(move |d| [t.clone(), vec![*d]].concat()))
            .collect();
    }
    let values: &[&str] = if law.lhs.contains("$v") || law.rhs.contains("$v") {
        &EXC_VALUES
    } else {
        &EXC_VALUES[..1]
    };
    let mut out = Vec::new();
    for tuple in &tuples {
        let metas: Vec<Stmt> = tuple.iter().map(|t| parse(t)).collect();
        if !(law.cond)(&metas) {
            continue;
        }
        for (&(p, q), v) in law
            .places
            .iter()
            .flat_map(|pq| values.iter().map(move |v| (pq, v)))
        {
            let lhs = parse(&fill(law.lhs, &names, tuple, v, p, q));
            let rhs = parse(&fill(law.rhs, &names, tuple, v, p, q));
            let (k1, k2) = (
                Config::Running(lhs.clone(), GlobalHeap::empty(1)),
                Config::Running(rhs.clone(), GlobalHeap::empty(1)),
            );
            let places = place_count(&k1, &k2).max(3);
            let inst = Instance { lhs, rhs, places };
            if !out.contains(&inst) {
                out.push(inst);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct InstanceOutcome {
    pub instance: Instance,
    pub verdict: BisimVerdict,
    /// Set for distinguished instances.
    pub replayed: Option<Result<(), String>>,
}

#[derive(Clone, Debug)]
pub struct LawResult {
    pub law: Law,
    pub depth: usize,
    pub outcomes: Vec<InstanceOutcome>,
}

impl LawResult {
    pub fn distinguished(&self) -> impl Iterator<Item = &InstanceOutcome> {
        self.outcomes.iter().filter(|o| !o.verdict.is_bisimilar())
    }

    pub fn verdict(&self) -> Expect {
        if self.distinguished().next().is_some() {
            Expect::Differ
        } else {
            Expect::Equiv
        }
    }

    /// The law's expectation met, and every witness replayed.
    pub fn passed(&self) -> bool {
        self.verdict() == self.law.expect
            && self.distinguished().all(|o| o.replayed == Some(Ok(())))
    }

    /// The distinguishing instance reported for the law.
    pub fn witness(&self) -> Option<(&Instance, &Witness)> {
        self.distinguished().find_map(|o| match &o.verdict {
            BisimVerdict::Distinguished { witness, .. } => Some((&o.instance, witness)),
            _ => None,
        })
    }

    pub fn line(&self) -> String {
        let n = self.outcomes.len();
        let d = self.distinguished().count();
        let wit = match self.witness() {
            Some((i, w)) => format!(" witness=\"{} | {}\" rounds={}", i.lhs, i.rhs, w.depth()),
            None => String::new(),
        };
        format!(
            "law={} sem={} side=\"{}\" expect={} verdict={} status={} instances={n} distinguished={d} depth={}{wit}",
            self.law.name,
            sem_name(self.law.sem),
            self.law.side,
            self.law.expect.name(),
            self.verdict().name(),
            if self.passed() { "ok" } else { "MISMATCH" },
            self.depth,
        )
    }
}

pub fn check_instance(
    sem: Semantics,
    inst: &Instance,
    depth: usize,
) -> Result<InstanceOutcome, EngineFault> {
    LawChecker::new(depth).instance(sem, inst)
}

/// Runs laws with one bisimulation game per semantics and place count,
/// so sub-pairs shared between instances are decided once.
pub struct LawChecker {
    depth: usize,
    games: HashMap<(Semantics, u32), Game>,
}

impl LawChecker {
    pub fn new(depth: usize) -> Self {
        LawChecker {
            depth,
            games: HashMap::new(),
        }
    }

    pub fn instance(
        &mut self,
        sem: Semantics,
        inst: &Instance,
    ) -> Result<InstanceOutcome, EngineFault> {
        let (k1, k2) = inst.configs();
        let depth = self.depth;
        let game = self
            .games
            .entry((sem, inst.places))
            .or_insert_with(|| Game::new(BisimOptions::new(sem, inst.places, depth)));
        let verdict = game.verdict(&k1, &k2)?;
        let replayed = match &verdict {
            BisimVerdict::Distinguished { witness, .. } => Some(game.replay(&k1, &k2, witness)),
            _ => None,
        };
        Ok(InstanceOutcome {
            instance: inst.clone(),
            verdict,
            replayed,
        })
    }

    pub fn law(&mut self, law: &Law) -> Result<LawResult, EngineFault> {
        let outcomes = instances(law)
            .iter()
            .map(|i| self.instance(law.sem, i))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LawResult {
            law: *law,
            depth: self.depth,
            outcomes,
        })
    }
}

pub fn check_law(law: &Law, depth: usize) -> Result<LawResult, EngineFault> {
    LawChecker::new(depth).law(law)
}

pub fn law_suite(sem: Option<Semantics>, depth: usize) -> Result<Vec<LawResult>, EngineFault> {
    let mut checker = LawChecker::new(depth);
    all_laws()
        .iter()
        .filter(|l| sem.is_none_or(|s| l.sem == s))
        .map(|l| checker.law(l))
        .collect()
}

/// Report header stating the bounds the verdicts rest on.
pub fn report_header(depth: usize) -> String {
    format!(
        "laws depth={depth} env=generated-family env-applies=once-per-round equiv-means=no-counterexample-within-bound"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates_parse_and_respect_side_conditions() {
        for law in all_laws() {
            let inst = instances(&law);
            assert!(!inst.is_empty(), "{}", law.name);
        }
        let l = law_by_name("spawned-throw-commute").unwrap();
        assert_eq!(instances(&l).len(), ASYNC_CORPUS.len() * EXC_VALUES.len());
    }

    #[test]
    fn names_are_unique() {
        let laws = all_laws();
        for (i, a) in laws.iter().enumerate() {
            assert!(laws[i + 1..].iter().all(|b| b.name != a.name), "{}", a.name);
        }
    }
}
