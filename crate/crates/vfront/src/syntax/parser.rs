//! Recursive-descent parser for the surface syntax.
//!
//! Grammar (statements bind tighter on the right; `;` is sequencing sugar
//! for a bind with an unused variable):
//!
//! ```text
//! stmt   := ident '=' simple ';' stmt
//!         | simple (';' stmt)?
//! simple := 'ret' expr
//!         | 'spw' '{' stmt '}' '{' stmt '}'
//!         | 'if' expr 'then' stmt 'else' stmt 'fi'
//!         | 'repeat' stmt 'end'
//!         | '[' ident ']' '_' mod (':=' expr)?
//!         | 'cas' '_' '{' mod ',' mod '}' '(' ident ',' expr ',' expr ')'
//!         | 'delete' ident
//!         | expr
//! expr   := arith (cmpop arith)?
//! arith  := term (('+'|'-') term)*
//! term   := atom (('*'|'/'|'%') atom)*
//! atom   := int | 'null' | ident | '(' expr (',' expr)? ')'
//!         | 'fst' atom | 'snd' atom | 'choice' atom atom
//!         | '[' ident ']' '_' mod
//! mod    := sc | relAcq | rel | acq | con | rlx | na
//! ```
//!
//! Reads may appear inside expressions; they are hoisted into fresh bindings
//! in evaluation order, so `[y]_rel := [x]_acq + 1` elaborates to
//! `t0 = [x]_acq; [y]_rel := t0 + 1`. Identifiers resolve to local variables
//! when bound by an enclosing bind and to locations otherwise. Runtime-only
//! forms (`par`, `stuck`) are rejected.

use std::collections::BTreeSet;

use crate::lang::ast::{
    BinOp, CasFailMod, CasOkMod, Expr, Loc, LocExpr, Modifier, ReadMod, Stmt, Var, WriteMod,
};
use crate::syntax::lexer::{lex, Spanned, Tok};
use crate::syntax::ParseError;

/// Name of the variable used by `;` sequencing binds. It cannot be written
/// in source and is never referenced.
pub const SEQ_VAR: &str = "~";

pub fn is_seq_var(v: &Var) -> bool {
    matches!(v, Var::Named(n) if &**n == SEQ_VAR)
}

/// Parses a whole program.
pub fn parse(src: &str) -> Result<Stmt, ParseError> {
    let toks = lex(src)?;
    let used: BTreeSet<String> = toks
        .iter()
        .filter_map(|t| match &t.tok {
            Tok::Ident(s) => Some(s.clone()),
            _ => None,
        })
        .collect();
    let mut p = Parser {
        toks,
        pos: 0,
        used,
        hoist_counter: 0,
        scope: Vec::new(),
    };
    let s = p.stmt()?;
    p.expect(Tok::Eof)?;
    Ok(s)
}

/// An expression that may still contain embedded reads to hoist.
enum PExpr {
    Plain(Expr),
    Read(ReadMod, String),
    Bin(BinOp, Box<PExpr>, Box<PExpr>),
    Choice(Box<PExpr>, Box<PExpr>),
    Pair(Box<PExpr>, Box<PExpr>),
    Fst(Box<PExpr>),
    Snd(Box<PExpr>),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    used: BTreeSet<String>,
    hoist_counter: u32,
    scope: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        let i = (self.pos + 1).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> (u32, u32) {
        (self.toks[self.pos].line, self.toks[self.pos].col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: String) -> ParseError {
        let (line, col) = self.here();
        ParseError::at(line, col, msg)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {tok}, found {}", self.peek())))
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.err(format!("expected identifier, found {other}"))),
        }
    }

    fn fresh_hoist_var(&mut self) -> String {
        loop {
            let name = format!("t{}", self.hoist_counter);
            self.hoist_counter += 1;
            if !self.used.contains(&name) {
                return name;
            }
        }
    }

    fn in_scope(&self, name: &str) -> bool {
        self.scope.iter().any(|s| s == name)
    }

    fn resolve_name(&self, name: &str) -> Expr {
        if self.in_scope(name) {
            Expr::Var(Var::named(name))
        } else {
            Expr::Loc(Loc::new(name))
        }
    }

    fn resolve_loc(&self, name: &str) -> LocExpr {
        if self.in_scope(name) {
            LocExpr::Var(Var::named(name))
        } else {
            LocExpr::Loc(Loc::new(name))
        }
    }

    fn modifier(&mut self) -> Result<Modifier, ParseError> {
        let name = self.expect_ident()?;
        match name.as_str() {
            "sc" => Ok(Modifier::Sc),
            "relAcq" => Ok(Modifier::RelAcq),
            "rel" => Ok(Modifier::Rel),
            "acq" => Ok(Modifier::Acq),
            "con" => Ok(Modifier::Con),
            "rlx" => Ok(Modifier::Rlx),
            "na" => Ok(Modifier::Na),
            other => Err(self.err(format!("unknown modifier '{other}'"))),
        }
    }

    fn read_modifier(&mut self) -> Result<ReadMod, ParseError> {
        let m = self.modifier()?;
        ReadMod::try_from_modifier(m)
            .ok_or_else(|| self.err(format!("'{m}' is not a read modifier")))
    }


    /// stmt := ident '=' simple ';' stmt | simple (';' stmt)?
    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        if let (Tok::Ident(name), Tok::Equals) = (self.peek().clone(), self.peek2().clone()) {
            if self.is_keyword(&name) {
                return Err(self.err(format!("'{name}' is a keyword, not a variable")));
            }
            self.bump();
            self.bump();
            let s1 = self.simple()?;
            self.expect(Tok::Semi)?;
            self.scope.push(name.clone());
            let s2 = self.stmt();
            self.scope.pop();
            return Ok(Stmt::bind(Var::named(&name), s1, s2?));
        }
        let s1 = self.simple()?;
        if *self.peek() == Tok::Semi {
            self.bump();
            let s2 = self.stmt()?;
            return Ok(Stmt::bind(Var::named(SEQ_VAR), s1, s2));
        }
        Ok(s1)
    }

    fn is_keyword(&self, s: &str) -> bool {
        matches!(
            s,
            "ret"
                | "spw"
                | "if"
                | "then"
                | "else"
                | "fi"
                | "repeat"
                | "end"
                | "delete"
                | "choice"
                | "fst"
                | "snd"
                | "null"
                | "cas"
                | "par"
                | "stuck"
        )
    }

    fn simple(&mut self) -> Result<Stmt, ParseError> {
        match self.peek().clone() {
            Tok::Ident(kw) if kw == "par" || kw == "stuck" => {
                Err(self.err(format!("'{kw}' is a runtime-only form")))
            }
            Tok::Ident(kw) if kw == "ret" => {
                self.bump();
                let e = self.pexpr()?;
                Ok(self.hoist(vec![e], |mut es| Stmt::Ret(es.remove(0))))
            }
            Tok::Ident(kw) if kw == "spw" => {
                self.bump();
                self.expect(Tok::LBrace)?;
                let s1 = self.stmt()?;
                self.expect(Tok::RBrace)?;
                self.expect(Tok::LBrace)?;
                let s2 = self.stmt()?;
                self.expect(Tok::RBrace)?;
                Ok(Stmt::Spw(Box::new(s1), Box::new(s2)))
            }
            Tok::Ident(kw) if kw == "if" => {
                self.bump();
                let cond = self.pexpr()?;
                self.expect_kw("then")?;
                let s1 = self.stmt()?;
                self.expect_kw("else")?;
                let s2 = self.stmt()?;
                self.expect_kw("fi")?;
                Ok(self.hoist(vec![cond], |mut es| {
                    Stmt::If(es.remove(0), Box::new(s1), Box::new(s2))
                }))
            }
            Tok::Ident(kw) if kw == "repeat" => {
                self.bump();
                let body = self.stmt()?;
                self.expect_kw("end")?;
                Ok(Stmt::Repeat(Box::new(body)))
            }
            Tok::Ident(kw) if kw == "delete" => {
                self.bump();
                let name = self.expect_ident()?;
                Ok(Stmt::Delete(self.resolve_loc(&name)))
            }
            Tok::Ident(kw) if kw == "cas" => {
                self.bump();
                self.expect(Tok::Underscore)?;
                self.expect(Tok::LBrace)?;
                let ok = self.modifier()?;
                let ok = CasOkMod::try_from_modifier(ok)
                    .ok_or_else(|| self.err(format!("'{ok}' is not a CAS success modifier")))?;
                self.expect(Tok::Comma)?;
                let fail = self.modifier()?;
                let fail = CasFailMod::try_from_modifier(fail)
                    .ok_or_else(|| self.err(format!("'{fail}' is not a CAS failure modifier")))?;
                self.expect(Tok::RBrace)?;
                self.expect(Tok::LParen)?;
                let name = self.expect_ident()?;
                let loc = self.resolve_loc(&name);
                self.expect(Tok::Comma)?;
                let e1 = self.pexpr()?;
                self.expect(Tok::Comma)?;
                let e2 = self.pexpr()?;
                self.expect(Tok::RParen)?;
                Ok(self.hoist(vec![e1, e2], move |mut es| {
                    let desired = es.pop().unwrap();
                    let expected = es.pop().unwrap();
                    Stmt::Cas {
                        ok,
                        fail,
                        loc,
                        expected,
                        desired,
                        annot: Default::default(),
                    }
                }))
            }
            Tok::LBracket => {
                self.bump();
                let name = self.expect_ident()?;
                let loc = self.resolve_loc(&name);
                self.expect(Tok::RBracket)?;
                self.expect(Tok::Underscore)?;
                let m = self.modifier()?;
                if *self.peek() == Tok::Assign {
                    self.bump();
                    let wm = WriteMod::try_from_modifier(m)
                        .ok_or_else(|| self.err(format!("'{m}' is not a write modifier")))?;
                    let e = self.pexpr()?;
                    Ok(self.hoist(vec![e], move |mut es| {
                        Stmt::Write(wm, loc, es.remove(0))
                    }))
                } else {
                    let rm = ReadMod::try_from_modifier(m)
                        .ok_or_else(|| self.err(format!("'{m}' is not a read modifier")))?;
                    if self.peek_is_operator() {
                        // the read is the left operand of a larger expression
                        let lhs = PExpr::Read(rm, name);
                        let e = self.pexpr_with(lhs)?;
                        return Ok(self.hoist(vec![e], |mut es| Stmt::Ret(es.remove(0))));
                    }
                    Ok(Stmt::read(rm, loc))
                }
            }
            _ => {
                let e = self.pexpr()?;
                Ok(self.hoist(vec![e], |mut es| Stmt::Ret(es.remove(0))))
            }
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            other => Err(self.err(format!("expected '{kw}', found {other}"))),
        }
    }

    fn peek_is_operator(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Plus
                | Tok::Minus
                | Tok::Star
                | Tok::Slash
                | Tok::Percent
                | Tok::EqEq
                | Tok::NotEq
                | Tok::Lt
                | Tok::Le
                | Tok::Gt
                | Tok::Ge
        )
    }

    /// expr := arith (cmpop arith)?
    fn pexpr(&mut self) -> Result<PExpr, ParseError> {
        let lhs = self.arith()?;
        self.pexpr_after_arith(lhs)
    }

    /// Continues expression parsing with an already-parsed atom as the
    /// leftmost operand.
    fn pexpr_with(&mut self, atom: PExpr) -> Result<PExpr, ParseError> {
        let term = self.term_with(atom)?;
        let lhs = self.arith_with(term)?;
        self.pexpr_after_arith(lhs)
    }

    fn pexpr_after_arith(&mut self, lhs: PExpr) -> Result<PExpr, ParseError> {
        let op = match self.peek() {
            Tok::EqEq => Some(BinOp::Eq),
            Tok::NotEq => Some(BinOp::Ne),
            Tok::Lt => Some(BinOp::Lt),
            Tok::Le => Some(BinOp::Le),
            Tok::Gt => Some(BinOp::Gt),
            Tok::Ge => Some(BinOp::Ge),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let rhs = self.arith()?;
            return Ok(PExpr::Bin(op, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn arith(&mut self) -> Result<PExpr, ParseError> {
        let lhs = self.term()?;
        self.arith_with(lhs)
    }

    fn arith_with(&mut self, mut lhs: PExpr) -> Result<PExpr, ParseError> {
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = PExpr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<PExpr, ParseError> {
        let lhs = self.atom()?;
        self.term_with(lhs)
    }

    fn term_with(&mut self, mut lhs: PExpr) -> Result<PExpr, ParseError> {
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                Tok::Percent => BinOp::Mod,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.atom()?;
            lhs = PExpr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn atom(&mut self) -> Result<PExpr, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(PExpr::Plain(Expr::Int(n)))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(n) => {
                        self.bump();
                        Ok(PExpr::Plain(Expr::Int(-n)))
                    }
                    other => Err(self.err(format!("expected integer after '-', found {other}"))),
                }
            }
            Tok::Ident(s) if s == "null" => {
                self.bump();
                Ok(PExpr::Plain(Expr::Null))
            }
            Tok::Ident(s) if s == "fst" => {
                self.bump();
                Ok(PExpr::Fst(Box::new(self.atom()?)))
            }
            Tok::Ident(s) if s == "snd" => {
                self.bump();
                Ok(PExpr::Snd(Box::new(self.atom()?)))
            }
            Tok::Ident(s) if s == "choice" => {
                self.bump();
                let a = self.atom()?;
                let b = self.atom()?;
                Ok(PExpr::Choice(Box::new(a), Box::new(b)))
            }
            Tok::Ident(s) if self.is_keyword(&s) => {
                Err(self.err(format!("unexpected keyword '{s}' in expression")))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(PExpr::Plain(self.resolve_name(&s)))
            }
            Tok::LParen => {
                self.bump();
                let a = self.pexpr()?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                    let b = self.pexpr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(PExpr::Pair(Box::new(a), Box::new(b)));
                }
                self.expect(Tok::RParen)?;
                Ok(a)
            }
            Tok::LBracket => {
                self.bump();
                let name = self.expect_ident()?;
                self.expect(Tok::RBracket)?;
                self.expect(Tok::Underscore)?;
                let rm = self.read_modifier()?;
                Ok(PExpr::Read(rm, name))
            }
            other => Err(self.err(format!("unexpected {other} in expression"))),
        }
    }

    /// Hoists embedded reads out of the given expressions (left to right)
    /// into fresh binds around the statement built from the residuals.
    fn hoist(&mut self, exprs: Vec<PExpr>, build: impl FnOnce(Vec<Expr>) -> Stmt) -> Stmt {
        let mut reads: Vec<(String, ReadMod, String)> = Vec::new();
        let plain: Vec<Expr> = exprs
            .into_iter()
            .map(|e| self.strip_reads(e, &mut reads))
            .collect();
        let mut out = build(plain);
        for (var, rm, locname) in reads.into_iter().rev() {
            let loc = self.resolve_loc(&locname);
            out = Stmt::bind(Var::named(&var), Stmt::read(rm, loc), out);
        }
        out
    }

    fn strip_reads(&mut self, e: PExpr, reads: &mut Vec<(String, ReadMod, String)>) -> Expr {
        match e {
            PExpr::Plain(e) => e,
            PExpr::Read(rm, locname) => {
                let v = self.fresh_hoist_var();
                reads.push((v.clone(), rm, locname));
                Expr::Var(Var::named(&v))
            }
            PExpr::Bin(op, a, b) => {
                let a = self.strip_reads(*a, reads);
                let b = self.strip_reads(*b, reads);
                Expr::Bin(op, Box::new(a), Box::new(b))
            }
            PExpr::Choice(a, b) => {
                let a = self.strip_reads(*a, reads);
                let b = self.strip_reads(*b, reads);
                Expr::Choice(Box::new(a), Box::new(b))
            }
            PExpr::Pair(a, b) => {
                let a = self.strip_reads(*a, reads);
                let b = self.strip_reads(*b, reads);
                Expr::Pair(Box::new(a), Box::new(b))
            }
            PExpr::Fst(a) => Expr::Fst(Box::new(self.strip_reads(*a, reads))),
            PExpr::Snd(a) => Expr::Snd(Box::new(self.strip_reads(*a, reads))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::Loc;

    fn loc(n: &str) -> LocExpr {
        LocExpr::Loc(Loc::new(n))
    }

    #[test]
    fn parse_write() {
        let s = parse("[f]_rel := 1").unwrap();
        assert_eq!(s, Stmt::Write(WriteMod::Rel, loc("f"), Expr::Int(1)));
    }

    #[test]
    fn parse_bind_read() {
        let s = parse("r = [f]_acq ; ret r").unwrap();
        assert_eq!(
            s,
            Stmt::bind(
                Var::named("r"),
                Stmt::read(ReadMod::Acq, loc("f")),
                Stmt::Ret(Expr::Var(Var::named("r"))),
            )
        );
    }

    #[test]
    fn parse_repeat() {
        let s = parse("repeat [f]_acq end").unwrap();
        assert_eq!(
            s,
            Stmt::Repeat(Box::new(Stmt::read(ReadMod::Acq, loc("f"))))
        );
    }

    #[test]
    fn sequencing_desugars_to_bind() {
        let s = parse("[x]_rlx := 0; ret 1").unwrap();
        match s {
            Stmt::Bind(v, s1, s2) => {
                assert!(is_seq_var(&v));
                assert_eq!(*s1, Stmt::Write(WriteMod::Rlx, loc("x"), Expr::Int(0)));
                assert_eq!(*s2, Stmt::Ret(Expr::Int(1)));
            }
            other => panic!("expected bind, got {other:?}"),
        }
    }

    #[test]
    fn scope_resolution_var_vs_loc() {
        // r1 bound: `[r1]_na` dereferences the local; `[d]_na` is a location.
        let s = parse("r1 = [p]_con ; [r1]_na").unwrap();
        match s {
            Stmt::Bind(_, _, s2) => {
                assert_eq!(
                    *s2,
                    Stmt::read(ReadMod::Na, LocExpr::Var(Var::named("r1")))
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn embedded_read_hoisted() {
        let s = parse("[cr]_rlx := [cw]_acq + 1").unwrap();
        let expected = Stmt::bind(
            Var::named("t0"),
            Stmt::read(ReadMod::Acq, loc("cw")),
            Stmt::Write(
                WriteMod::Rlx,
                loc("cr"),
                Expr::Bin(
                    BinOp::Add,
                    Box::new(Expr::Var(Var::named("t0"))),
                    Box::new(Expr::Int(1)),
                ),
            ),
        );
        assert_eq!(s, expected);
    }

    #[test]
    fn repeat_with_comparison() {
        let s = parse("repeat [cr]_acq >= rcwn end").unwrap();
        // body: t0 = [cr]_acq; ret (t0 >= rcwn); rcwn unbound => location
        match s {
            Stmt::Repeat(body) => match *body {
                Stmt::Bind(_, s1, s2) => {
                    assert_eq!(*s1, Stmt::read(ReadMod::Acq, loc("cr")));
                    assert!(matches!(*s2, Stmt::Ret(Expr::Bin(BinOp::Ge, _, _))));
                }
                other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cas_parses() {
        let s = parse("cas_{acq,rlx}(f, 0, 1)").unwrap();
        assert_eq!(
            s,
            Stmt::Cas {
                ok: CasOkMod::Acq,
                fail: CasFailMod::Rlx,
                loc: loc("f"),
                expected: Expr::Int(0),
                desired: Expr::Int(1),
                annot: Default::default(),
            }
        );
    }

    #[test]
    fn rejects_runtime_forms() {
        assert!(parse("stuck").is_err());
        assert!(parse("par { ret 1 } { ret 2 }").is_err());
    }

    #[test]
    fn rejects_bad_modifier_position() {
        assert!(parse("[x]_rel").is_err()); // rel is not a read modifier
        assert!(parse("[x]_acq := 1").is_err()); // acq is not a write modifier
        assert!(parse("cas_{na,rlx}(f, 0, 1)").is_err());
    }

    #[test]
    fn error_has_position() {
        let err = parse("ret $").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("1:"), "{msg}");
    }

    #[test]
    fn pair_vs_grouping() {
        let s = parse("ret (1, (2, 3))").unwrap();
        assert_eq!(
            s,
            Stmt::Ret(Expr::Pair(
                Box::new(Expr::Int(1)),
                Box::new(Expr::Pair(Box::new(Expr::Int(2)), Box::new(Expr::Int(3))))
            ))
        );
        let g = parse("ret (1 + 2) * 3").unwrap();
        assert!(matches!(g, Stmt::Ret(Expr::Bin(BinOp::Mul, _, _))));
    }
}
