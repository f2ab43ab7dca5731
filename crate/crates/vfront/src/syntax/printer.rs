//! Canonical pretty-printer.
//!
//! Source forms re-parse to an equal AST (binds introduced by `;` sugar
//! print back as `;`). Runtime-only forms render with reserved markers for
//! trace display: `par { .. } { .. }`, `stuck`, symbolic values as `?N`,
//! fresh loop variables as `%N`, consume annotations as `@{..}`.

use crate::lang::ast::{Expr, Stmt};
use crate::syntax::parser::is_seq_var;

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn is_atom(e: &Expr) -> bool {
    matches!(
        e,
        Expr::Var(_) | Expr::Int(_) | Expr::Null | Expr::Loc(_) | Expr::Sym(_) | Expr::Pair(..)
    )
}

fn write_atomized(out: &mut String, e: &Expr) {
    if is_atom(e) {
        write_expr(out, e);
    } else {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Var(v) => out.push_str(&v.to_string()),
        Expr::Int(n) => out.push_str(&n.to_string()),
        Expr::Null => out.push_str("null"),
        Expr::Loc(l) => out.push_str(l.as_str()),
        Expr::Sym(s) => out.push_str(&s.to_string()),
        Expr::Bin(op, a, b) => {
            write_atomized(out, a);
            out.push_str(&format!(" {op} "));
            write_atomized(out, b);
        }
        Expr::Choice(a, b) => {
            out.push_str("choice ");
            write_atomized(out, a);
            out.push(' ');
            write_atomized(out, b);
        }
        Expr::Pair(a, b) => {
            out.push('(');
            write_expr(out, a);
            out.push_str(", ");
            write_expr(out, b);
            out.push(')');
        }
        Expr::Fst(a) => {
            out.push_str("fst ");
            write_atomized(out, a);
        }
        Expr::Snd(a) => {
            out.push_str("snd ");
            write_atomized(out, a);
        }
    }
}

pub fn stmt_to_string(s: &Stmt) -> String {
    let mut out = String::new();
    write_stmt(&mut out, s);
    out
}

fn write_stmt(out: &mut String, s: &Stmt) {
    match s {
        Stmt::Ret(e) => {
            out.push_str("ret ");
            write_expr(out, e);
        }
        Stmt::Bind(x, s1, s2) => {
            if !is_seq_var(x) {
                out.push_str(&format!("{x} = "));
            }
            if matches!(**s1, Stmt::Bind(..)) {
                // runtime-only shape (loop unrolling); display with braces
                out.push_str("{ ");
                write_stmt(out, s1);
                out.push_str(" }");
            } else {
                write_stmt(out, s1);
            }
            out.push_str("; ");
            write_stmt(out, s2);
        }
        Stmt::Spw(a, b) => {
            out.push_str("spw { ");
            write_stmt(out, a);
            out.push_str(" } { ");
            write_stmt(out, b);
            out.push_str(" }");
        }
        Stmt::Par(a, b) => {
            out.push_str("par { ");
            write_stmt(out, a);
            out.push_str(" } { ");
            write_stmt(out, b);
            out.push_str(" }");
        }
        Stmt::If(c, a, b) => {
            out.push_str("if ");
            write_expr(out, c);
            out.push_str(" then ");
            write_stmt(out, a);
            out.push_str(" else ");
            write_stmt(out, b);
            out.push_str(" fi");
        }
        Stmt::Repeat(a) => {
            out.push_str("repeat ");
            write_stmt(out, a);
            out.push_str(" end");
        }
        Stmt::Read(rm, loc, annot) => {
            out.push_str(&format!("[{loc}]_{}", rm.modifier()));
            if !annot.is_bottom() {
                out.push_str(&format!("@{annot}"));
            }
        }
        Stmt::Write(wm, loc, e) => {
            out.push_str(&format!("[{loc}]_{} := ", wm.modifier()));
            write_expr(out, e);
        }
        Stmt::Cas {
            ok,
            fail,
            loc,
            expected,
            desired,
            annot,
        } => {
            out.push_str(&format!("cas_{{{},{}}}(", ok.modifier(), fail.modifier()));
            out.push_str(&loc.to_string());
            out.push_str(", ");
            write_expr(out, expected);
            out.push_str(", ");
            write_expr(out, desired);
            out.push(')');
            if !annot.is_bottom() {
                out.push_str(&format!("@{annot}"));
            }
        }
        Stmt::Delete(loc) => {
            out.push_str(&format!("delete {loc}"));
        }
        Stmt::Stuck => out.push_str("stuck"),
    }
}
