//! Happens-before over explored traces.
//!
//! `(l1, l2)` holds when every trace from the root whose last
//! configuration activates `l2` passes through a configuration that
//! activates `l1`. Pairs where `l2` is never activated hold vacuously.
//! Reflexive pairs are left out.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use tx10_heap::GlobalHeap;
use tx10_sem::{Config, FailurePolicy, Semantics, Stepper};
use tx10_syntax::{active_labels, SourceLabel, Stmt};

use crate::lts::{explore, ExploreError, ExploreOptions, Lts};

pub type HbPair = (SourceLabel, SourceLabel);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HbRelation {
    pub labels: BTreeSet<SourceLabel>,
    pub pairs: BTreeSet<HbPair>,
    pub bounded_only: bool,
}

impl HbRelation {
    pub fn contains(&self, l1: SourceLabel, l2: SourceLabel) -> bool {
        self.pairs.contains(&(l1, l2))
    }

    pub fn lines(&self) -> Vec<String> {
        self.pairs
            .iter()
            .map(|(a, b)| format!("hb {a} < {b}"))
            .collect()
    }
}

fn activations(k: &Config) -> BTreeSet<SourceLabel> {
    k.stmt().map_or_else(BTreeSet::new, |s| {
        active_labels(s)
            .into_iter()
            .filter(|l| l.is_source())
            .collect()
    })
}

/// Nodes reachable from the root through nodes that never activate
/// `avoid`, with the edge used to first reach each one.
fn reach_avoiding(
    lts: &Lts,
    acts: &[BTreeSet<SourceLabel>],
    avoid: SourceLabel,
) -> BTreeMap<usize, Option<usize>> {
    let mut seen = BTreeMap::new();
    if acts[lts.root].contains(&avoid) {
        return seen;
    }
    seen.insert(lts.root, None);
    let mut queue = VecDeque::from([lts.root]);
    while let Some(n) = queue.pop_front() {
        for &e in &lts.out[n] {
            let to = lts.edges[e].to;
            if !seen.contains_key(&to) && !acts[to].contains(&avoid) {
                seen.insert(to, Some(e));
                queue.push_back(to);
            }
        }
    }
    seen
}

/// The relation over the source labels of `program`.
pub fn hb_of_lts(lts: &Lts, program: &Stmt) -> HbRelation {
    let labels: BTreeSet<SourceLabel> = program
        .labels()
        .into_iter()
        .filter(|l| l.is_source())
        .collect();
    let acts: Vec<_> = lts.nodes.iter().map(activations).collect();
    let mut pairs = BTreeSet::new();
    for &l1 in &labels {
        let reach = reach_avoiding(lts, &acts, l1);
        let escaped: BTreeSet<SourceLabel> = reach
            .keys()
            .flat_map(|&n| acts[n].iter().copied())
            .collect();
        for &l2 in &labels {
            if l1 != l2 && !escaped.contains(&l2) {
                pairs.insert((l1, l2));
            }
        }
    }
    HbRelation {
        labels,
        pairs,
        bounded_only: lts.bound_hit,
    }
}

/// A trace that activates `l2` without ever activating `l1`.
pub fn hb_counter_trace(lts: &Lts, l1: SourceLabel, l2: SourceLabel) -> Option<Vec<String>> {
    let acts: Vec<_> = lts.nodes.iter().map(activations).collect();
    let reach = reach_avoiding(lts, &acts, l1);
    let (&target, _) = reach
        .iter()
        .filter(|(n, _)| acts[**n].contains(&l2))
        .min_by_key(|(n, _)| lts.depth_of[**n])?;
    let mut edges = Vec::new();
    let mut cur = target;
    while let Some(Some(e)) = reach.get(&cur) {
        edges.push(*e);
        cur = lts.edges[*e].from;
    }
    edges.reverse();
    let mut out = vec![format!("{}", lts.nodes[lts.root])];
    for e in edges {
        let t = &lts.edges[e].transition;
        let inj = t
            .injected
            .map(|q| format!(" inject={q}"))
            .unwrap_or_default();
        out.push(format!(
            "--{}{inj}--> {}",
            t.rule, lts.nodes[lts.edges[e].to]
        ));
    }
    Some(out)
}

pub fn happens_before(
    program: &Stmt,
    g0: &GlobalHeap,
    opts: &ExploreOptions,
) -> Result<HbRelation, ExploreError> {
    Ok(hb_of_lts(&explore(program, g0, opts)?, program))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HbiVerdict {
    Equal(HbRelation),
    Differ {
        pair: HbPair,
        /// The semantics whose relation holds the pair.
        holds_in: Semantics,
        /// A trace of the other semantics breaking the pair.
        trace: Vec<String>,
        bounded_only: bool,
    },
}

impl HbiVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, HbiVerdict::Equal(_))
    }

    pub fn lines(&self) -> Vec<String> {
        match self {
            HbiVerdict::Equal(r) => {
                let mut v = vec![format!(
                    "hbi verdict=equal pairs={} bounded={}",
                    r.pairs.len(),
                    yes_no(r.bounded_only)
                )];
                v.extend(r.lines());
                v
            }
            HbiVerdict::Differ {
                pair: (a, b),
                holds_in,
                trace,
                bounded_only,
            } => {
                let mut v = vec![format!(
                    "hbi verdict=differ pair={a}<{b} holds_in={} bounded={}",
                    sem_name(*holds_in),
                    yes_no(*bounded_only)
                )];
                v.extend(trace.iter().map(|l| format!("  {l}")));
                v
            }
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn sem_name(s: Semantics) -> &'static str {
    match s {
        Semantics::Tx10 => "tx10",
        Semantics::Resilient => "resilient",
    }
}

/// Compare the relation under TX10 with the one under resilient
/// semantics with the failures allowed by `fp`.
pub fn check_hbi(
    program: &Stmt,
    places: u32,
    fp: &FailurePolicy,
    depth: usize,
) -> Result<HbiVerdict, ExploreError> {
    let g0 = GlobalHeap::empty(places);
    check_hbi_with(
        program,
        &g0,
        &ExploreOptions::tx10(depth),
        &ExploreOptions::resilient(fp.clone(), depth),
    )
}

/// As [`check_hbi`], with explicit options for both sides (used to run
/// the checker against a mutated resilient stepper).
pub fn check_hbi_with(
    program: &Stmt,
    g0: &GlobalHeap,
    tx: &ExploreOptions,
    res: &ExploreOptions,
) -> Result<HbiVerdict, ExploreError> {
    let lt = explore(program, g0, tx)?;
    let lr = explore(program, g0, res)?;
    let ht = hb_of_lts(&lt, program);
    let hr = hb_of_lts(&lr, program);
    let bounded_only = ht.bounded_only || hr.bounded_only;
    if let Some(&pair) = ht.pairs.symmetric_difference(&hr.pairs).next() {
        let (holds_in, other) = if ht.pairs.contains(&pair) {
            (lt.sem, &lr)
        } else {
            (lr.sem, &lt)
        };
        let trace = hb_counter_trace(other, pair.0, pair.1).unwrap_or_default();
        return Ok(HbiVerdict::Differ {
            pair,
            holds_in,
            trace,
            bounded_only,
        });
    }
    Ok(HbiVerdict::Equal(HbRelation { bounded_only, ..hr }))
}

/// Resilient options with a mutated stepper.
pub fn resilient_with(stepper: Stepper, fp: FailurePolicy, depth: usize) -> ExploreOptions {
    ExploreOptions {
        stepper,
        ..ExploreOptions::resilient(fp, depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tx10_syntax::parse_program;

    fn l(n: u32) -> SourceLabel {
        SourceLabel(n)
    }

    fn hb(src: &str) -> HbRelation {
        let p = parse_program(src).unwrap();
        happens_before(&p, &GlobalHeap::empty(2), &ExploreOptions::tx10(40)).unwrap()
    }

    #[test]
    fn sequence_orders_its_parts() {
        // L1 = seq, L2 = skip, L3 = throw
        let r = hb("skip; throw E;");
        assert!(r.contains(l(2), l(3)));
        assert!(!r.contains(l(3), l(2)));
    }

    #[test]
    fn spawned_and_continuation_relate_both_ways() {
        // L1 seq, L2 async, L3 skip under async, L4 throw
        let r = hb("async { skip; } throw E;");
        assert!(r.contains(l(3), l(4)));
        assert!(r.contains(l(4), l(3)));
    }

    #[test]
    fn finish_orders_its_activity_first() {
        // L1 seq, L2 finish, L3 async, L4 skip, L5 throw
        let r = hb("finish { async { skip; } } throw E;");
        assert!(r.contains(l(4), l(5)));
        assert!(!r.contains(l(5), l(4)));
    }
}
