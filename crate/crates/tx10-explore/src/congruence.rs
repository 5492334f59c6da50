//! Sampled congruence check: pairs found bisimilar stay bisimilar when
//! put into the same one-hole context.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tx10_sem::{EngineFault, Semantics};
use tx10_syntax::{parse_runtime, Place, Stmt};

use crate::bisim::BisimVerdict;
use crate::laws::{all_laws, instances, Expect, Instance, LawChecker, ASYNC_CORPUS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Context {
    /// `{[] t}`
    SeqLeft(Stmt),
    /// `{t []}` with `t` asynchronous, so the hole can run.
    SeqRightAsync(Stmt),
    Finish,
    /// `try [] catch t`
    TryLeft(Stmt),
    DynAt(Place),
}

impl Context {
    pub fn plug(&self, s: &Stmt) -> Stmt {
        let s = s.clone();
        match self {
            Context::SeqLeft(t) => Stmt::seq(s, t.clone()),
            Context::SeqRightAsync(t) => Stmt::seq(t.clone(), s),
            Context::Finish => Stmt::finish(s),
            Context::TryLeft(t) => Stmt::try_catch(s, t.clone()),
            Context::DynAt(q) => Stmt::dyn_at(*q, s),
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Context::SeqLeft(t) => write!(f, "{{ [] {t} }}"),
            Context::SeqRightAsync(t) => write!(f, "{{ {t} [] }}"),
            Context::Finish => f.write_str("finish { [] }"),
            Context::TryLeft(t) => write!(f, "try {{ [] }} catch {{ {t} }}"),
            Context::DynAt(q) => write!(f, "dynat ({q}) {{ [] }}"),
        }
    }
}

fn stmt(src: &str) -> Stmt {
    parse_runtime(src).expect("context filler").strip_labels()
}

fn random_context(rng: &mut impl Rng, places: u32) -> Context {
    const FILL: [&str; 3] = ["skip;", "throw E;", "val x = {f: E} in { x.f = E; }"];
    match rng.gen_range(0..5) {
        0 => Context::SeqLeft(stmt(FILL.choose(rng).unwrap())),
        1 => Context::SeqRightAsync(stmt(ASYNC_CORPUS.choose(rng).unwrap())),
        2 => Context::Finish,
        3 => Context::TryLeft(stmt(FILL[..2].choose(rng).unwrap())),
        _ => Context::DynAt(rng.gen_range(0..places)),
    }
}

#[derive(Clone, Debug)]
pub struct CongruenceCase {
    pub law: &'static str,
    pub pair: Instance,
    pub context: Context,
    pub verdict: BisimVerdict,
}

impl CongruenceCase {
    pub fn line(&self) -> String {
        format!(
            "congruence law={} ctx=\"{}\" lhs=\"{}\" rhs=\"{}\" verdict={}",
            self.law, self.context, self.pair.lhs, self.pair.rhs, self.verdict
        )
    }
}

/// `n` (pair, context) cases from `seed`. Pairs come from ≡-laws of
/// `sem` and are kept only if bisimilar up to `depth` themselves.
pub fn congruence_sample(
    sem: Semantics,
    seed: u64,
    n: usize,
    depth: usize,
) -> Result<Vec<CongruenceCase>, EngineFault> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<(&'static str, Instance)> = all_laws()
        .into_iter()
        .filter(|l| l.sem == sem && l.expect == Expect::Equiv)
        .flat_map(|l| instances(&l).into_iter().map(move |i| (l.name, i)))
        .collect();
    let mut checker = LawChecker::new(depth);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < n && attempts < n * 20 {
        attempts += 1;
        let (law, pair) = pool.choose(&mut rng).expect("non-empty pool").clone();
        if !checker.instance(sem, &pair)?.verdict.is_bisimilar() {
            continue;
        }
        let context = random_context(&mut rng, pair.places);
        let plugged = Instance {
            lhs: context.plug(&pair.lhs),
            rhs: context.plug(&pair.rhs),
            places: pair.places,
        };
        let verdict = checker.instance(sem, &plugged)?.verdict;
        out.push(CongruenceCase {
            law,
            pair,
            context,
            verdict,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plug_places_the_hole() {
        let s = Stmt::skip();
        assert_eq!(Context::Finish.plug(&s), Stmt::finish(Stmt::skip()));
        assert_eq!(Context::DynAt(2).plug(&s), Stmt::dyn_at(2, Stmt::skip()));
        assert_eq!(Context::SeqLeft(Stmt::skip()).to_string(), "{ [] skip; }");
    }
}
