//! Abstract syntax of TX10 and Resilient TX10: values, expressions,
//! static and runtime statements, the sync/async classification,
//! substitution, evaluation contexts, and the surface parser/printer.

mod ast;
mod classify;
mod context;
mod parse;
mod pretty;
mod subst;
mod value;

pub use ast::{wrap_program, Expr, SourceLabel, Stmt, StmtKind};
pub use classify::{
    classify, derives_sync, is_async, is_local, is_remote, is_sync, no_async,
    resilience_predicates, Class, ResiliencePredicates,
};
pub use context::{active_labels, for_each_active};
pub use parse::{parse_program, parse_runtime, ParseError, ParseErrorKind};
pub use pretty::{expr_to_string, program_to_string, stmt_to_string};
pub use subst::{substitute, substitute_expr};
pub use value::{ExcConst, ExcSet, Label, Name, Oid, Place, Value};
