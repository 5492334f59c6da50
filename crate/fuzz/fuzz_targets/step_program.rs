#![no_main]

use libfuzzer_sys::fuzz_target;
use tx10_heap::{is_place_local, GlobalHeap};
use tx10_sem::{run_trace, FailurePolicy, RunOptions, Scheduler};
use tx10_syntax::parse_program;

// Any parsed program over three places runs without engine faults or
// stuck states and keeps heaps place-local, with and without failures.
fuzz_target!(|data: &[u8]| {
    let Some((&seed, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let Ok(p) = parse_program(text) else { return };
    let mut bad_place = false;
    p.walk(&mut |s| {
        if let tx10_syntax::StmtKind::AtSimple(q, _) | tx10_syntax::StmtKind::At(q, ..) = s.kind {
            bad_place |= q >= 3;
        }
    });
    if bad_place {
        return;
    }
    let g0 = GlobalHeap::empty(3);
    for opts in [
        RunOptions::tx10(2_000),
        RunOptions::resilient(FailurePolicy::anytime(1, 3), 2_000),
    ] {
        let opts = opts.with_scheduler(Scheduler::Random(seed as u64));
        match run_trace(&p, &g0, &opts) {
            Ok(t) => {
                for step in &t.steps {
                    assert!(is_place_local(step.target.heap()).is_ok());
                }
            }
            Err(tx10_sem::RunError::StepLimit(_)) => {}
            Err(e) => panic!("{text}: {e}"),
        }
    }
});
