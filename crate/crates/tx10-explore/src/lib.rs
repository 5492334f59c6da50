//! Exhaustive exploration of TX10 programs: bounded transition systems,
//! invariant checks, happens-before, weak bisimulation and the algebraic
//! law suite.

pub mod bisim;
pub mod canon;
pub mod congruence;
pub mod curated;
pub mod env;
pub mod gen;
pub mod hb;
pub mod invariants;
pub mod laws;
pub mod lts;

pub use bisim::{place_count, weak_bisim, BisimOptions, BisimVerdict, Game, Side, Witness};
pub use canon::{
    canonical_renaming, canonicalize, canonicalize_pair, rename_config, rename_heap, rename_stmt,
};
pub use congruence::{congruence_sample, CongruenceCase, Context};
pub use curated::{HBI_FAULT_PROBE, HBI_SUITE, HBI_TRY_DIVERGENCES};
pub use env::{env_move_universe, EnvMove};
pub use gen::{program_corpus, random_object_graph, random_program, random_stmt};
pub use hb::{
    check_hbi, check_hbi_with, happens_before, hb_counter_trace, hb_of_lts, resilient_with,
    HbRelation, HbiVerdict,
};
pub use invariants::{
    check_invariants, place_local, Check, CheckResult, InvariantReport, Violation,
};
pub use laws::{
    all_laws, check_instance, check_law, instances, law_by_name, law_suite, report_header, Expect,
    Instance, Law, LawChecker, LawResult,
};
pub use lts::{explore, explore_config, Edge, ExploreError, ExploreOptions, Lts, LtsStats};
