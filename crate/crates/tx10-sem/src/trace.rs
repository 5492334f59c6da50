//! Single-trace execution and the line-oriented trace records.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tx10_heap::GlobalHeap;
use tx10_syntax::{stmt_to_string, wrap_program, Label, Place, Stmt};

use crate::resilient::{FailurePolicy, Injection};
use crate::step::{Config, EngineFault, Semantics, Stepper, Transition};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheduler {
    /// Always the least transition by rule name, then redex position.
    DeterministicFirst,
    Random(u64),
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub sem: Semantics,
    pub scheduler: Scheduler,
    pub policy: FailurePolicy,
    pub max_steps: usize,
}

impl RunOptions {
    pub fn tx10(max_steps: usize) -> RunOptions {
        RunOptions {
            sem: Semantics::Tx10,
            scheduler: Scheduler::DeterministicFirst,
            policy: FailurePolicy::none(),
            max_steps,
        }
    }

    pub fn resilient(policy: FailurePolicy, max_steps: usize) -> RunOptions {
        RunOptions {
            sem: Semantics::Resilient,
            scheduler: Scheduler::DeterministicFirst,
            policy,
            max_steps,
        }
    }

    pub fn with_scheduler(mut self, sch: Scheduler) -> RunOptions {
        self.scheduler = sch;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub sem: Semantics,
    pub initial: Config,
    pub steps: Vec<Transition>,
}

impl Trace {
    pub fn last(&self) -> &Config {
        self.steps.last().map_or(&self.initial, |t| &t.target)
    }

    pub fn final_heap(&self) -> &GlobalHeap {
        self.last().heap()
    }

    /// Label of the final top-level step.
    pub fn final_label(&self) -> Option<Label> {
        self.steps.last().map(|t| t.label)
    }

    pub fn records(&self) -> Vec<TraceRecord> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, t)| TraceRecord::new(i, t, self.sem))
            .collect()
    }

    /// One `key=value` line per step.
    pub fn to_text(&self) -> String {
        self.records().iter().map(|r| r.to_line() + "\n").collect()
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        self.records()
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub step: usize,
    pub place: Place,
    pub rule: &'static str,
    pub leaf: &'static str,
    pub label: String,
    pub stmt: String,
    pub heap: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub live: Option<Vec<Place>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inject: Option<Place>,
}

pub fn label_text(l: Label) -> String {
    match l.exc() {
        None => "ok".into(),
        Some(e) => format!("{}:{}", l.kind(), e.name()),
    }
}

impl TraceRecord {
    pub fn new(step: usize, t: &Transition, sem: Semantics) -> TraceRecord {
        let g = t.target.heap();
        let res = sem == Semantics::Resilient;
        TraceRecord {
            step,
            place: t.place,
            rule: t.rule.name(),
            leaf: t.leaf_rule().name(),
            label: label_text(t.label),
            stmt: t
                .target
                .stmt()
                .map_or_else(|| "done".to_string(), stmt_to_string),
            heap: g.digest(),
            live: res.then(|| g.live_places().collect()),
            inject: t.injected,
        }
    }

    pub fn to_line(&self) -> String {
        let mut s = format!(
            "step={} place={} rule={} leaf={} label={} stmt={} heap={}",
            self.step, self.place, self.rule, self.leaf, self.label, self.stmt, self.heap
        );
        if let Some(live) = &self.live {
            let l: Vec<String> = live.iter().map(|p| p.to_string()).collect();
            s += &format!(" live={{{}}}", l.join(","));
        }
        if let Some(q) = self.inject {
            s += &format!(" inject={q}");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("step limit of {} reached", .0.steps.len())]
    StepLimit(Trace),
    #[error("engine fault after {} steps: {fault}", .trace.steps.len())]
    Fault { trace: Trace, fault: EngineFault },
    #[error("stuck configuration after {} steps", .0.steps.len())]
    Stuck(Trace),
}

/// Run the wrapped program from `g0` until it terminates.
pub fn run_trace(program: &Stmt, g0: &GlobalHeap, opts: &RunOptions) -> Result<Trace, RunError> {
    run_config(Config::Running(wrap_program(program), g0.clone()), opts)
}

/// Run from an arbitrary configuration at place 0.
pub fn run_config(k0: Config, opts: &RunOptions) -> Result<Trace, RunError> {
    let st = Stepper::new(opts.sem);
    let initial_live = k0.heap().live_places().count();
    let mut trace = Trace {
        sem: opts.sem,
        initial: k0,
        steps: Vec::new(),
    };
    let mut rng = match opts.scheduler {
        Scheduler::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Scheduler::DeterministicFirst => None,
    };
    loop {
        let k = trace.last().clone();
        let Config::Running(s, g) = &k else {
            return Ok(trace);
        };
        if trace.steps.len() >= opts.max_steps {
            return Err(RunError::StepLimit(trace));
        }
        let step = trace.steps.len();
        let failed = initial_live - g.live_places().count();
        let inject = if opts.sem == Semantics::Resilient {
            st.failure_transitions(&k, &opts.policy.eligible(g, step, failed))
        } else {
            vec![]
        };
        let chosen =
            if matches!(opts.policy.injection, Injection::Schedule(_)) && !inject.is_empty() {
                inject.into_iter().next()
            } else {
                let mut all = match st.transitions(s, g, 0) {
                    Ok(ts) => ts,
                    Err(fault) => return Err(RunError::Fault { trace, fault }),
                };
                all.extend(inject);
                match &mut rng {
                    Some(r) => all.choose(r).cloned(),
                    None => all
                        .into_iter()
                        .min_by(|a, b| a.order_key().cmp(&b.order_key())),
                }
            };
        match chosen {
            Some(t) => trace.steps.push(t),
            None => return Err(RunError::Stuck(trace)),
        }
    }
}
