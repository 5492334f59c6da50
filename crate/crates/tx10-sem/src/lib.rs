//! Executable small-step semantics of TX10 and Resilient TX10:
//! expression evaluation, statement transitions with derivation frames,
//! place-failure injection, single-trace runs and observable semantics.

pub mod expr;
pub mod label;
pub mod observe;
pub mod resilient;
pub mod step;
pub mod trace;

pub use expr::{eval_full, eval_step, EvalOutcome, EvalResult};
pub use label::{end_of_finish_label, mask_async, mask_at_return, merge_exceptions};
pub use observe::{observable_semantics, Observable};
pub use resilient::{stmt_transitions_res, FailurePolicy, Injection};
pub use step::{
    program_transitions, stmt_transitions, Config, EngineFault, Frame, Mutation, Rule, Semantics,
    Stepper, Transition,
};
pub use trace::{
    label_text, run_config, run_trace, RunError, RunOptions, Scheduler, Trace, TraceRecord,
};
