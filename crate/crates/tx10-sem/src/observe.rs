//! Exhaustive observable semantics: every final heap reachable from the
//! wrapped program.

use std::collections::{BTreeSet, HashSet};

use tx10_heap::GlobalHeap;
use tx10_syntax::{wrap_program, Stmt};

use crate::resilient::{FailurePolicy, Injection};
use crate::step::{Config, EngineFault, Semantics, Stepper};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observable {
    pub initial: GlobalHeap,
    pub finals: BTreeSet<GlobalHeap>,
    /// Some path was cut at the depth bound.
    pub bound_hit: bool,
}

impl Observable {
    /// The `(g0, g')` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (&GlobalHeap, &GlobalHeap)> + '_ {
        self.finals.iter().map(move |g| (&self.initial, g))
    }
}

pub fn observable_semantics(
    program: &Stmt,
    g0: &GlobalHeap,
    depth_bound: usize,
    sem: Semantics,
    policy: &FailurePolicy,
) -> Result<Observable, EngineFault> {
    let st = Stepper::new(sem);
    let initial_live = g0.live_places().count();
    let timed = matches!(policy.injection, Injection::Schedule(_));
    let mut out = Observable {
        initial: g0.clone(),
        finals: BTreeSet::new(),
        bound_hit: false,
    };
    let mut seen: HashSet<(Config, usize)> = HashSet::new();
    let mut layer = vec![Config::Running(wrap_program(program), g0.clone())];
    for depth in 0..=depth_bound {
        let mut next = Vec::new();
        for k in layer {
            let Config::Running(s, g) = &k else {
                out.finals.insert(k.heap().clone());
                continue;
            };
            if depth == depth_bound {
                out.bound_hit = true;
                continue;
            }
            let mut ts = st.transitions(s, g, 0)?;
            if sem == Semantics::Resilient {
                let failed = initial_live - g.live_places().count();
                ts.extend(st.failure_transitions(&k, &policy.eligible(g, depth, failed)));
            }
            for t in ts {
                let key = (t.target.clone(), if timed { depth + 1 } else { 0 });
                if seen.insert(key) {
                    next.push(t.target);
                }
            }
        }
        layer = next;
        if layer.is_empty() {
            break;
        }
    }
    Ok(out)
}
