//! Surface syntax parser.
//!
//! ```text
//! stmt  := "skip;" | "throw" EXC ";" | "val" ID "=" expr "in" block
//!        | expr "." ID "=" expr ";" | block
//!        | "at" "(" NAT ")" ["val" ID "=" expr] block
//!        | "async" block | "finish" block | "try" block "catch" block
//! block := "{" stmt* "}"
//! expr  := EXC | ID | expr "." ID | "{" [ID ":" expr ("," ID ":" expr)*] "}"
//!        | "globalref" expr | "valof" expr | "(" expr ")"
//! ```
//!
//! A program is a statement list. `parse_runtime` also accepts
//! `spawned`, `dynat (p)`, `finish [E,..]` and `o(p,n)` / `gr(p,n)`.

use std::collections::BTreeSet;
use std::fmt;

use crate::ast::{Expr, Stmt, StmtKind};
use crate::value::{ExcConst, ExcSet, Name, Oid, Place, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    FreeVariable(String),
    Redeclared(String),
    ThrowNonException(String),
    DuplicateField(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.col)?;
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::FreeVariable(x) => write!(f, "free variable `{x}`"),
            ParseErrorKind::Redeclared(x) => write!(f, "`{x}` is already declared in this scope"),
            ParseErrorKind::ThrowNonException(x) => {
                write!(f, "throw expects one of E, BF, BG, DP, found `{x}`")
            }
            ParseErrorKind::DuplicateField(x) => write!(f, "field `{x}` given twice"),
        }
    }
}

impl std::error::Error for ParseError {}

/// Parse a static program. Labels are numbered in pre-order from 1.
pub fn parse_program(text: &str) -> Result<Stmt, ParseError> {
    Parser::new(text, false)?.program()
}

/// Parse a statement that may contain runtime-only forms.
pub fn parse_runtime(text: &str) -> Result<Stmt, ParseError> {
    Parser::new(text, true)?.program()
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u32),
    Exc(ExcConst),
    Kw(&'static str),
    Punct(char),
    Eof,
}

const KEYWORDS: [&str; 13] = [
    "skip",
    "throw",
    "val",
    "in",
    "at",
    "async",
    "finish",
    "try",
    "catch",
    "globalref",
    "valof",
    "spawned",
    "dynat",
];

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Nat(n) => write!(f, "`{n}`"),
            Tok::Exc(e) => write!(f, "`{e}`"),
            Tok::Kw(k) => write!(f, "`{k}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            let word: String = chars[start..i].iter().collect();
            let tok = if let Some(e) = ExcConst::from_name(&word) {
                Tok::Exc(e)
            } else if let Some(k) = KEYWORDS.iter().find(|k| **k == word) {
                Tok::Kw(k)
            } else {
                Tok::Ident(word)
            };
            out.push(Lexed {
                tok,
                line: l0,
                col: c0,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let word: String = chars[start..i].iter().collect();
            let n = word.parse::<u32>().map_err(|_| ParseError {
                line: l0,
                col: c0,
                kind: ParseErrorKind::Syntax(format!("number `{word}` is too large")),
            })?;
            out.push(Lexed {
                tok: Tok::Nat(n),
                line: l0,
                col: c0,
            });
            continue;
        }
        if "{}();.=,:[]".contains(c) {
            out.push(Lexed {
                tok: Tok::Punct(c),
                line: l0,
                col: c0,
            });
            i += 1;
            col += 1;
            continue;
        }
        return Err(ParseError {
            line: l0,
            col: c0,
            kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
        });
    }
    out.push(Lexed {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    runtime: bool,
    scope: Vec<Name>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str, runtime: bool) -> PResult<Parser> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            runtime,
            scope: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, kind: ParseErrorKind) -> PResult<T> {
        let l = &self.toks[self.pos];
        Err(ParseError {
            line: l.line,
            col: l.col,
            kind,
        })
    }

    fn syntax<T>(&self, msg: String) -> PResult<T> {
        self.err(ParseErrorKind::Syntax(msg))
    }

    fn expect_punct(&mut self, c: char) -> PResult<()> {
        if *self.peek() == Tok::Punct(c) {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected `{c}`, found {}", self.peek()))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if matches!(self.peek(), Tok::Kw(w) if *w == k) {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected `{k}`, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Name::from(s.as_str()))
            }
            t => self.syntax(format!("expected an identifier, found {t}")),
        }
    }

    fn nat(&mut self) -> PResult<u32> {
        match *self.peek() {
            Tok::Nat(n) => {
                self.bump();
                Ok(n)
            }
            ref t => self.syntax(format!("expected a number, found {t}")),
        }
    }

    fn program(mut self) -> PResult<Stmt> {
        let mut items = Vec::new();
        while *self.peek() != Tok::Eof {
            items.push(self.stmt()?);
        }
        Ok(Stmt::block(items).relabel())
    }

    fn block(&mut self) -> PResult<Stmt> {
        self.expect_punct('{')?;
        let mut items = Vec::new();
        while *self.peek() != Tok::Punct('}') {
            if *self.peek() == Tok::Eof {
                return self.syntax("unclosed block".into());
            }
            items.push(self.stmt()?);
        }
        self.bump();
        Ok(Stmt::block(items))
    }

    fn declare(&mut self, x: &Name) -> PResult<()> {
        if self.scope.contains(x) {
            return self.err(ParseErrorKind::Redeclared(x.to_string()));
        }
        Ok(())
    }

    fn scoped_block(&mut self, x: Name) -> PResult<Stmt> {
        self.scope.push(x);
        let body = self.block();
        self.scope.pop();
        body
    }

    /// `{` starts an object literal rather than a block when it is
    /// followed by `ID :` or by `} .`.
    fn brace_is_expr(&self) -> bool {
        matches!(
            (self.peek_at(1), self.peek_at(2)),
            (Tok::Ident(_), Tok::Punct(':'))
        ) || matches!(
            (self.peek_at(1), self.peek_at(2)),
            (Tok::Punct('}'), Tok::Punct('.'))
        )
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        match self.peek().clone() {
            Tok::Kw("skip") => {
                self.bump();
                self.expect_punct(';')?;
                Ok(Stmt::skip())
            }
            Tok::Kw("throw") => {
                self.bump();
                match self.bump() {
                    Tok::Exc(e) => {
                        self.expect_punct(';')?;
                        Ok(Stmt::throw(e))
                    }
                    t => {
                        self.pos -= 1;
                        let shown = match t {
                            Tok::Ident(s) => s,
                            other => other.to_string(),
                        };
                        self.err(ParseErrorKind::ThrowNonException(shown))
                    }
                }
            }
            Tok::Kw("val") => {
                self.bump();
                let x = self.ident()?;
                self.declare(&x)?;
                self.expect_punct('=')?;
                let e = self.expr()?;
                self.expect_kw("in")?;
                let body = self.scoped_block(x.clone())?;
                Ok(Stmt::new(StmtKind::ValDecl(x, e, body.into())))
            }
            Tok::Kw("at") => {
                self.bump();
                self.expect_punct('(')?;
                let q = self.nat()?;
                self.expect_punct(')')?;
                if *self.peek() == Tok::Kw("val") {
                    self.bump();
                    let x = self.ident()?;
                    self.declare(&x)?;
                    self.expect_punct('=')?;
                    let e = self.expr()?;
                    let body = self.scoped_block(x.clone())?;
                    Ok(Stmt::new(StmtKind::At(q, x, e, body.into())))
                } else {
                    Ok(Stmt::at_simple(q, self.block()?))
                }
            }
            Tok::Kw("async") => {
                self.bump();
                Ok(Stmt::async_(self.block()?))
            }
            Tok::Kw("finish") => {
                self.bump();
                let mu = if self.runtime && *self.peek() == Tok::Punct('[') {
                    self.exc_set()?
                } else {
                    ExcSet::EMPTY
                };
                Ok(Stmt::finish_mu(mu, self.block()?))
            }
            Tok::Kw("try") => {
                self.bump();
                let s = self.block()?;
                self.expect_kw("catch")?;
                let t = self.block()?;
                Ok(Stmt::try_catch(s, t))
            }
            Tok::Kw("spawned") if self.runtime => {
                self.bump();
                Ok(Stmt::spawned(self.block()?))
            }
            Tok::Kw("dynat") if self.runtime => {
                self.bump();
                self.expect_punct('(')?;
                let q: Place = self.nat()?;
                self.expect_punct(')')?;
                Ok(Stmt::dyn_at(q, self.block()?))
            }
            Tok::Punct('{') if !self.brace_is_expr() => self.block(),
            Tok::Eof => self.syntax("expected a statement, found end of input".into()),
            _ => self.assignment(),
        }
    }

    fn exc_set(&mut self) -> PResult<ExcSet> {
        self.expect_punct('[')?;
        let mut mu = ExcSet::EMPTY;
        while *self.peek() != Tok::Punct(']') {
            match self.bump() {
                Tok::Exc(e) => mu = mu.with(e),
                t => {
                    self.pos -= 1;
                    return self.syntax(format!("expected an exception, found {t}"));
                }
            }
            if *self.peek() == Tok::Punct(',') {
                self.bump();
            }
        }
        self.bump();
        Ok(mu)
    }

    fn assignment(&mut self) -> PResult<Stmt> {
        let lhs = self.expr()?;
        let Expr::Select(target, f) = lhs else {
            return self.syntax(format!("expected a statement, found expression `{lhs}`"));
        };
        self.expect_punct('=')?;
        let rhs = self.expr()?;
        self.expect_punct(';')?;
        Ok(Stmt::new(StmtKind::FieldAssign(*target, f, rhs)))
    }

    fn expr(&mut self) -> PResult<Expr> {
        match self.peek() {
            Tok::Kw("globalref") => {
                self.bump();
                Ok(Expr::GlobalRefOf(Box::new(self.expr()?)))
            }
            Tok::Kw("valof") => {
                self.bump();
                Ok(Expr::ValOf(Box::new(self.expr()?)))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.atom()?;
        while *self.peek() == Tok::Punct('.') && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            let f = self.ident()?;
            e = Expr::Select(Box::new(e), f);
        }
        Ok(e)
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Exc(e) => {
                self.bump();
                Ok(Expr::exc(e))
            }
            Tok::Ident(x)
                if self.runtime
                    && (x == "o" || x == "gr")
                    && *self.peek_at(1) == Tok::Punct('(') =>
            {
                self.bump();
                self.bump();
                let p = self.nat()?;
                self.expect_punct(',')?;
                let n = self.nat()?;
                self.expect_punct(')')?;
                let o = Oid::new(p, n);
                Ok(Expr::Val(if x == "o" {
                    Value::Oid(o)
                } else {
                    Value::GlobalRef(o)
                }))
            }
            Tok::Ident(x) => {
                let name = Name::from(x.as_str());
                if !self.scope.contains(&name) {
                    return self.err(ParseErrorKind::FreeVariable(x));
                }
                self.bump();
                Ok(Expr::Var(name))
            }
            Tok::Punct('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(')')?;
                Ok(e)
            }
            Tok::Punct('{') => {
                self.bump();
                let mut fields: Vec<(Name, Expr)> = Vec::new();
                let mut seen = BTreeSet::new();
                while *self.peek() != Tok::Punct('}') {
                    if !fields.is_empty() {
                        self.expect_punct(',')?;
                    }
                    let f = self.ident()?;
                    if !seen.insert(f.clone()) {
                        self.pos -= 1;
                        return self.err(ParseErrorKind::DuplicateField(f.to_string()));
                    }
                    self.expect_punct(':')?;
                    fields.push((f, self.expr()?));
                }
                self.bump();
                Ok(Expr::ObjLit(fields))
            }
            t => self.syntax(format!("expected an expression, found {t}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pretty::program_to_string;

    #[test]
    fn examples() {
        assert!(parse_program("skip;").unwrap().same_shape(&Stmt::skip()));
        let s = parse_program("finish { async { throw E; } }").unwrap();
        assert!(s.same_shape(&Stmt::finish(Stmt::async_(Stmt::throw(ExcConst::E)))));
        let s = parse_program("at (1) val x = {f: E} { x.f = BF; }").unwrap();
        let expect = Stmt::at(
            1,
            "x",
            Expr::obj(vec![("f", Expr::exc(ExcConst::E))]),
            Stmt::assign(Expr::var("x"), "f", Expr::exc(ExcConst::BF)),
        );
        assert!(s.same_shape(&expect));
    }

    #[test]
    fn scoping_errors() {
        let e = parse_program("x.f = E;").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::FreeVariable("x".into()));
        let e = parse_program("val x = {} in { val x = {} in { skip; } }").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Redeclared("x".into()));
        let e = parse_program("val x = {} in { throw x; }").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ThrowNonException("x".into()));
        // sibling scopes may reuse a name
        assert!(parse_program("val x = {} in { skip; } val x = {} in { skip; }").is_ok());
    }

    #[test]
    fn positions_are_reported() {
        let e = parse_program("skip;\n  skip").unwrap_err();
        assert_eq!((e.line, e.col), (2, 7));
    }

    #[test]
    fn runtime_forms_only_in_runtime_mode() {
        assert!(parse_program("spawned { skip; }").is_err());
        let s =
            parse_runtime("finish [E] { dynat (1) { spawned { o(1,0).f = gr(0,2); } } }").unwrap();
        assert!(!s.is_static());
    }

    #[test]
    fn object_literal_statement_start() {
        let s = parse_program("{f: E}.f = BF; {}.g = E; { skip; }").unwrap();
        assert_eq!(program_to_string(&s), "{f: E}.f = BF; {}.g = E; skip;");
    }

    #[test]
    fn prefix_operators_bind_looser_than_select() {
        let s = parse_program("val x = {} in { val y = globalref x.f in { (valof y).g = E; } }")
            .unwrap();
        assert_eq!(
            program_to_string(&s),
            "val x = {} in { val y = globalref x.f in { (valof y).g = E; } }"
        );
    }
}
