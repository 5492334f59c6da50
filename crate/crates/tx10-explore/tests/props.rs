use std::collections::BTreeMap;

use proptest::prelude::*;
use tx10_explore::laws::{ASYNC_CORPUS, SYNC_CORPUS};
use tx10_explore::*;
use tx10_heap::GlobalHeap;
use tx10_sem::{Config, FailurePolicy, Semantics};
use tx10_syntax::{parse_runtime, Oid};

/// Configurations reached from small generated programs, heaps included.
fn reached_config() -> impl Strategy<Value = Config> {
    (any::<u64>(), 0..40usize).prop_map(|(seed, pick)| {
        let p = program_corpus(seed, 1, 2, 8).remove(0);
        let lts = explore(&p, &GlobalHeap::empty(2), &ExploreOptions::tx10(8)).unwrap();
        lts.nodes[pick % lts.nodes.len()].clone()
    })
}

/// A random bijection of the oids in `k`, kept per place.
fn shuffle(k: &Config, seed: u64) -> BTreeMap<Oid, Oid> {
    let mut m = BTreeMap::new();
    for (&p, h) in k.heap().places() {
        let olds: Vec<Oid> = h.keys().copied().collect();
        let n = olds.len() as u64;
        for (i, o) in olds.iter().enumerate() {
            let j = (i as u64 * 7 + seed % (n + 1) + 3) % (n + 5);
            m.insert(*o, Oid::new(p, 100 + (i as u32) * 1000 + j as u32));
        }
    }
    m
}

fn corpus_stmt() -> impl Strategy<Value = &'static str> {
    prop::sample::select(
        SYNC_CORPUS
            .iter()
            .chain(ASYNC_CORPUS.iter())
            .copied()
            .collect::<Vec<_>>(),
    )
}

fn config(src: &str) -> Config {
    Config::Running(parse_runtime(src).unwrap(), GlobalHeap::empty(2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonicalize_is_idempotent(k in reached_config()) {
        let c = canonicalize(&k);
        prop_assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn canonicalize_forgets_oid_names(k in reached_config(), seed in any::<u64>()) {
        let renamed = rename_config(&k, &shuffle(&k, seed));
        prop_assert_eq!(canonicalize(&renamed), canonicalize(&k));
    }

    #[test]
    fn bisim_is_reflexive(a in corpus_stmt()) {
        let k = config(a);
        for sem in [Semantics::Tx10, Semantics::Resilient] {
            let v = weak_bisim(&k, &k, &BisimOptions::new(sem, 2, 3)).unwrap();
            prop_assert!(v.is_bisimilar(), "{} {:?}", a, v);
        }
    }

    #[test]
    fn bisim_is_symmetric(a in corpus_stmt(), b in corpus_stmt()) {
        let (ka, kb) = (config(a), config(b));
        let opts = BisimOptions::new(Semantics::Tx10, 2, 3);
        let ab = weak_bisim(&ka, &kb, &opts).unwrap();
        let ba = weak_bisim(&kb, &ka, &opts).unwrap();
        prop_assert_eq!(ab.is_bisimilar(), ba.is_bisimilar());
        if let BisimVerdict::Distinguished { witness, .. } = &ab {
            Game::new(opts.clone()).replay(&ka, &kb, witness).map_err(TestCaseError::fail)?;
        }
    }

    #[test]
    fn generated_programs_keep_every_invariant(seed in any::<u64>()) {
        let p = program_corpus(seed, 1, 3, 8).remove(0);
        let g0 = GlobalHeap::empty(3);
        let lts = explore(&p, &g0, &ExploreOptions::tx10(12)).unwrap();
        let tx_checks: Vec<Check> = Check::ALL.into_iter().filter(|c| !c.resilient_only()).collect();
        let r = check_invariants(&lts, &tx_checks);
        prop_assert!(r.passed(), "{}: {:?}", p, r.lines(&lts));

        let lts = explore(&p, &g0, &ExploreOptions::resilient(FailurePolicy::anytime(1, 3), 12)).unwrap();
        let r = check_invariants(&lts, &Check::ALL);
        prop_assert!(r.passed(), "{}: {:?}", p, r.lines(&lts));
    }
}

#[test]
fn bisimilar_pairs_stay_bisimilar_deeper() {
    let (l, r) = (config("throw E; skip;"), config("throw E;"));
    for d in 1..=6 {
        let v = weak_bisim(&l, &r, &BisimOptions::new(Semantics::Tx10, 2, d)).unwrap();
        assert!(v.is_bisimilar(), "depth {d}");
    }
}

#[test]
fn hb_is_stable_once_exploration_completes() {
    let p = tx10_syntax::parse_program("finish { async { at (1) { skip; } } } at (2) { skip; }")
        .unwrap();
    let g0 = GlobalHeap::empty(3);
    let a = happens_before(&p, &g0, &ExploreOptions::tx10(40)).unwrap();
    let b = happens_before(&p, &g0, &ExploreOptions::tx10(80)).unwrap();
    assert!(!a.bounded_only);
    assert_eq!(a, b);
}
