//! Failure injection policies for the resilient semantics.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use tx10_heap::GlobalHeap;
use tx10_syntax::{Place, Stmt};

use crate::step::{Config, EngineFault, Semantics, Stepper, Transition};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Injection {
    /// Any candidate may fail before any step.
    BeforeEveryStep,
    /// `(step index, place)` pairs; a scheduled failure is taken as that step.
    Schedule(Vec<(usize, Place)>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailurePolicy {
    pub max_failures: usize,
    candidates: BTreeSet<Place>,
    pub injection: Injection,
}

impl FailurePolicy {
    /// Place 0 is dropped from the candidates.
    pub fn new(
        max_failures: usize,
        candidates: impl IntoIterator<Item = Place>,
        injection: Injection,
    ) -> Self {
        let candidates = candidates.into_iter().filter(|&p| p != 0).collect();
        FailurePolicy {
            max_failures,
            candidates,
            injection,
        }
    }

    pub fn none() -> Self {
        FailurePolicy::new(0, [], Injection::BeforeEveryStep)
    }

    /// Up to `max` failures among places `1..places`, at any step.
    pub fn anytime(max: usize, places: u32) -> Self {
        FailurePolicy::new(max, 1..places, Injection::BeforeEveryStep)
    }

    pub fn schedule(events: Vec<(usize, Place)>) -> Self {
        let candidates: Vec<Place> = events.iter().map(|e| e.1).collect();
        FailurePolicy::new(events.len(), candidates, Injection::Schedule(events))
    }

    pub fn candidates(&self) -> &BTreeSet<Place> {
        &self.candidates
    }

    /// Places that may fail now. `failed` is the number of failures so
    /// far; `step` is the index of the next step (ignored by
    /// before-every-step policies).
    pub fn eligible(&self, g: &GlobalHeap, step: usize, failed: usize) -> Vec<Place> {
        if failed >= self.max_failures {
            return vec![];
        }
        let live = |p: &Place| g.is_live(*p);
        match &self.injection {
            Injection::BeforeEveryStep => self.candidates.iter().copied().filter(live).collect(),
            Injection::Schedule(ev) => {
                let mut out: Vec<Place> = ev
                    .iter()
                    .filter(|(i, p)| *i == step && self.candidates.contains(p))
                    .map(|e| e.1)
                    .collect();
                out.retain(live);
                out.sort_unstable();
                out.dedup();
                out
            }
        }
    }
}

/// Resilient transitions of `⟨s,g⟩` at `p`, plus one (Place Failure)
/// per place the policy allows to fail now.
pub fn stmt_transitions_res(
    s: &Stmt,
    g: &GlobalHeap,
    p: Place,
    fp: &FailurePolicy,
    step: usize,
    failed: usize,
) -> Result<Vec<Transition>, EngineFault> {
    let st = Stepper::new(Semantics::Resilient);
    let mut out = st.transitions(s, g, p)?;
    let k = Config::Running(s.clone(), g.clone());
    out.extend(st.failure_transitions(&k, &fp.eligible(g, step, failed)));
    Ok(out)
}
