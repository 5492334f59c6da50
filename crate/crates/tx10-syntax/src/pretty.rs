//! Surface rendering. Static statements print in the parser's grammar;
//! runtime forms use `spawned {..}`, `dynat (p) {..}` and
//! `finish [E,..] {..}`, and values print as `o(p,n)` / `gr(p,n)`.

use std::fmt::{self, Write};

use crate::ast::{Expr, Stmt, StmtKind as K};

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e).unwrap();
    s
}

fn write_expr(out: &mut String, e: &Expr) -> fmt::Result {
    match e {
        Expr::Val(v) => write!(out, "{v}"),
        Expr::Var(x) => out.write_str(x),
        Expr::Select(a, f) => {
            write_postfix_operand(out, a)?;
            write!(out, ".{f}")
        }
        Expr::ObjLit(fs) => {
            out.write_str("{")?;
            for (i, (f, a)) in fs.iter().enumerate() {
                if i > 0 {
                    out.write_str(", ")?;
                }
                write!(out, "{f}: ")?;
                write_expr(out, a)?;
            }
            out.write_str("}")
        }
        Expr::GlobalRefOf(a) => {
            out.write_str("globalref ")?;
            write_expr(out, a)
        }
        Expr::ValOf(a) => {
            out.write_str("valof ")?;
            write_expr(out, a)
        }
    }
}

fn write_postfix_operand(out: &mut String, e: &Expr) -> fmt::Result {
    if matches!(e, Expr::GlobalRefOf(_) | Expr::ValOf(_)) {
        out.write_str("(")?;
        write_expr(out, e)?;
        out.write_str(")")
    } else {
        write_expr(out, e)
    }
}

/// One statement on one line.
pub fn stmt_to_string(s: &Stmt) -> String {
    let mut out = String::new();
    write_stmt(&mut out, s).unwrap();
    out
}

/// A whole program: the top-level statement list without braces.
pub fn program_to_string(s: &Stmt) -> String {
    let mut out = String::new();
    write_items(&mut out, s).unwrap();
    out
}

fn write_items(out: &mut String, s: &Stmt) -> fmt::Result {
    let mut cur = s;
    loop {
        match &cur.kind {
            K::Seq(a, b) => {
                write_stmt(out, a)?;
                out.write_str(" ")?;
                cur = b;
            }
            _ => return write_stmt(out, cur),
        }
    }
}

fn write_block(out: &mut String, s: &Stmt) -> fmt::Result {
    out.write_str("{ ")?;
    write_items(out, s)?;
    out.write_str(" }")
}

fn write_stmt(out: &mut String, s: &Stmt) -> fmt::Result {
    match &s.kind {
        K::Skip => out.write_str("skip;"),
        K::Throw(e) => write!(out, "throw {e};"),
        K::ValDecl(x, e, body) => {
            write!(out, "val {x} = ")?;
            write_expr(out, e)?;
            out.write_str(" in ")?;
            write_block(out, body)
        }
        K::FieldAssign(a, f, b) => {
            write_postfix_operand(out, a)?;
            write!(out, ".{f} = ")?;
            write_expr(out, b)?;
            out.write_str(";")
        }
        K::Seq(..) => write_block(out, s),
        K::At(q, x, e, body) => {
            write!(out, "at ({q}) val {x} = ")?;
            write_expr(out, e)?;
            out.write_str(" ")?;
            write_block(out, body)
        }
        K::AtSimple(q, body) => {
            write!(out, "at ({q}) ")?;
            write_block(out, body)
        }
        K::Async(body) => {
            out.write_str("async ")?;
            write_block(out, body)
        }
        K::Finish(mu, body) => {
            if mu.is_empty() {
                out.write_str("finish ")?;
            } else {
                write!(out, "finish {mu} ")?;
            }
            write_block(out, body)
        }
        K::TryCatch(a, b) => {
            out.write_str("try ")?;
            write_block(out, a)?;
            out.write_str(" catch ")?;
            write_block(out, b)
        }
        K::DynAt(q, body) => {
            write!(out, "dynat ({q}) ")?;
            write_block(out, body)
        }
        K::Spawned(body) => {
            out.write_str("spawned ")?;
            write_block(out, body)
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&stmt_to_string(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&expr_to_string(self))
    }
}
