//! Substitution of local variables and symbolic values.
//!
//! Variable substitution is capture-avoiding in the sense that a `bind`
//! rebinding the same name shields its body. Local variables are immutable
//! and binders are never renamed: the substituted payload is always closed
//! (a value or symbol mixture), so capture cannot arise.

use crate::lang::ast::{Expr, LocExpr, Stmt, Sym, Var};
use crate::state::{BufEntry, Buffer};

pub fn subst_expr_var(e: &Expr, x: &Var, payload: &Expr) -> Expr {
    match e {
        Expr::Var(v) if v == x => payload.clone(),
        Expr::Var(_) | Expr::Int(_) | Expr::Null | Expr::Loc(_) | Expr::Sym(_) => e.clone(),
        Expr::Bin(op, a, b) => Expr::Bin(
            *op,
            Box::new(subst_expr_var(a, x, payload)),
            Box::new(subst_expr_var(b, x, payload)),
        ),
        Expr::Choice(a, b) => Expr::Choice(
            Box::new(subst_expr_var(a, x, payload)),
            Box::new(subst_expr_var(b, x, payload)),
        ),
        Expr::Pair(a, b) => Expr::Pair(
            Box::new(subst_expr_var(a, x, payload)),
            Box::new(subst_expr_var(b, x, payload)),
        ),
        Expr::Fst(a) => Expr::Fst(Box::new(subst_expr_var(a, x, payload))),
        Expr::Snd(a) => Expr::Snd(Box::new(subst_expr_var(a, x, payload))),
    }
}

fn subst_loc_var(l: &LocExpr, x: &Var, payload: &Expr) -> LocExpr {
    match l {
        LocExpr::Var(v) if v == x => match payload {
            Expr::Loc(loc) => LocExpr::Loc(loc.clone()),
            Expr::Sym(s) => LocExpr::Sym(*s),
            // Dereferencing a non-location is caught when the access fires.
            _ => l.clone(),
        },
        _ => l.clone(),
    }
}

/// `s{x := payload}` where `payload` is a reduced expression.
pub fn subst_stmt_var(s: &Stmt, x: &Var, payload: &Expr) -> Stmt {
    match s {
        Stmt::Ret(e) => Stmt::Ret(subst_expr_var(e, x, payload)),
        Stmt::Bind(y, s1, s2) => {
            let s1 = subst_stmt_var(s1, x, payload);
            let s2 = if y == x {
                (**s2).clone()
            } else {
                subst_stmt_var(s2, x, payload)
            };
            Stmt::Bind(y.clone(), Box::new(s1), Box::new(s2))
        }
        Stmt::Spw(a, b) => Stmt::Spw(
            Box::new(subst_stmt_var(a, x, payload)),
            Box::new(subst_stmt_var(b, x, payload)),
        ),
        Stmt::Par(a, b) => Stmt::Par(
            Box::new(subst_stmt_var(a, x, payload)),
            Box::new(subst_stmt_var(b, x, payload)),
        ),
        Stmt::If(c, a, b) => Stmt::If(
            subst_expr_var(c, x, payload),
            Box::new(subst_stmt_var(a, x, payload)),
            Box::new(subst_stmt_var(b, x, payload)),
        ),
        Stmt::Repeat(a) => Stmt::Repeat(Box::new(subst_stmt_var(a, x, payload))),
        Stmt::Read(rm, l, annot) => {
            Stmt::Read(*rm, subst_loc_var(l, x, payload), annot.clone())
        }
        Stmt::Write(wm, l, e) => Stmt::Write(
            *wm,
            subst_loc_var(l, x, payload),
            subst_expr_var(e, x, payload),
        ),
        Stmt::Cas {
            ok,
            fail,
            loc,
            expected,
            desired,
            annot,
        } => Stmt::Cas {
            ok: *ok,
            fail: *fail,
            loc: subst_loc_var(loc, x, payload),
            expected: subst_expr_var(expected, x, payload),
            desired: subst_expr_var(desired, x, payload),
            annot: annot.clone(),
        },
        Stmt::Delete(l) => Stmt::Delete(subst_loc_var(l, x, payload)),
        Stmt::Stuck => Stmt::Stuck,
    }
}

pub fn subst_expr_sym(e: &Expr, sym: Sym, payload: &Expr) -> Expr {
    match e {
        Expr::Sym(s) if *s == sym => payload.clone(),
        Expr::Var(_) | Expr::Int(_) | Expr::Null | Expr::Loc(_) | Expr::Sym(_) => e.clone(),
        Expr::Bin(op, a, b) => Expr::Bin(
            *op,
            Box::new(subst_expr_sym(a, sym, payload)),
            Box::new(subst_expr_sym(b, sym, payload)),
        ),
        Expr::Choice(a, b) => Expr::Choice(
            Box::new(subst_expr_sym(a, sym, payload)),
            Box::new(subst_expr_sym(b, sym, payload)),
        ),
        Expr::Pair(a, b) => Expr::Pair(
            Box::new(subst_expr_sym(a, sym, payload)),
            Box::new(subst_expr_sym(b, sym, payload)),
        ),
        Expr::Fst(a) => Expr::Fst(Box::new(subst_expr_sym(a, sym, payload))),
        Expr::Snd(a) => Expr::Snd(Box::new(subst_expr_sym(a, sym, payload))),
    }
}

fn subst_loc_sym(l: &LocExpr, sym: Sym, payload: &Expr) -> LocExpr {
    match l {
        LocExpr::Sym(s) if *s == sym => match payload {
            Expr::Loc(loc) => LocExpr::Loc(loc.clone()),
            Expr::Sym(s2) => LocExpr::Sym(*s2),
            _ => l.clone(),
        },
        _ => l.clone(),
    }
}

/// Substitutes a resolved symbol throughout a statement. Speculated-if
/// conditions hold the identifier of their buffer record, which is always
/// distinct from any resolved operation symbol, so they are never touched.
pub fn subst_stmt_sym(s: &Stmt, sym: Sym, payload: &Expr) -> Stmt {
    match s {
        Stmt::Ret(e) => Stmt::Ret(subst_expr_sym(e, sym, payload)),
        Stmt::Bind(y, s1, s2) => Stmt::Bind(
            y.clone(),
            Box::new(subst_stmt_sym(s1, sym, payload)),
            Box::new(subst_stmt_sym(s2, sym, payload)),
        ),
        Stmt::Spw(a, b) => Stmt::Spw(
            Box::new(subst_stmt_sym(a, sym, payload)),
            Box::new(subst_stmt_sym(b, sym, payload)),
        ),
        Stmt::Par(a, b) => Stmt::Par(
            Box::new(subst_stmt_sym(a, sym, payload)),
            Box::new(subst_stmt_sym(b, sym, payload)),
        ),
        Stmt::If(c, a, b) => Stmt::If(
            subst_expr_sym(c, sym, payload),
            Box::new(subst_stmt_sym(a, sym, payload)),
            Box::new(subst_stmt_sym(b, sym, payload)),
        ),
        Stmt::Repeat(a) => Stmt::Repeat(Box::new(subst_stmt_sym(a, sym, payload))),
        Stmt::Read(rm, l, annot) => Stmt::Read(*rm, subst_loc_sym(l, sym, payload), annot.clone()),
        Stmt::Write(wm, l, e) => Stmt::Write(
            *wm,
            subst_loc_sym(l, sym, payload),
            subst_expr_sym(e, sym, payload),
        ),
        Stmt::Cas {
            ok,
            fail,
            loc,
            expected,
            desired,
            annot,
        } => Stmt::Cas {
            ok: *ok,
            fail: *fail,
            loc: subst_loc_sym(loc, sym, payload),
            expected: subst_expr_sym(expected, sym, payload),
            desired: subst_expr_sym(desired, sym, payload),
            annot: annot.clone(),
        },
        Stmt::Delete(l) => Stmt::Delete(subst_loc_sym(l, sym, payload)),
        Stmt::Stuck => Stmt::Stuck,
    }
}

/// Substitutes a resolved symbol inside buffer records. Record identifiers
/// themselves are never rewritten, only the payload expressions, locations
/// and if-conditions.
pub fn subst_buffer_sym(buf: &Buffer, sym: Sym, payload: &Expr) -> Buffer {
    Buffer(
        buf.0
            .iter()
            .map(|e| match e {
                BufEntry::Read {
                    sym: s,
                    loc,
                    rm,
                    annot,
                } => BufEntry::Read {
                    sym: *s,
                    loc: subst_loc_sym(loc, sym, payload),
                    rm: *rm,
                    annot: annot.clone(),
                },
                BufEntry::Write {
                    sym: s,
                    loc,
                    wm,
                    val,
                } => BufEntry::Write {
                    sym: *s,
                    loc: subst_loc_sym(loc, sym, payload),
                    wm: *wm,
                    val: subst_expr_sym(val, sym, payload),
                },
                BufEntry::BindE { sym: s, expr } => BufEntry::BindE {
                    sym: *s,
                    expr: subst_expr_sym(expr, sym, payload),
                },
                BufEntry::If {
                    sym: s,
                    cond,
                    then_buf,
                    else_buf,
                } => BufEntry::If {
                    sym: *s,
                    cond: subst_expr_sym(cond, sym, payload),
                    then_buf: subst_buffer_sym(then_buf, sym, payload),
                    else_buf: subst_buffer_sym(else_buf, sym, payload),
                },
            })
            .collect(),
    )
}

/// Renames one symbol to another everywhere in a statement (including
/// speculated-if condition identifiers); used by write promotion.
pub fn rename_stmt_sym(s: &Stmt, from: Sym, to: Sym) -> Stmt {
    subst_stmt_sym(s, from, &Expr::Sym(to))
}

pub fn expr_syms(e: &Expr, out: &mut Vec<Sym>) {
    match e {
        Expr::Sym(s) => out.push(*s),
        Expr::Var(_) | Expr::Int(_) | Expr::Null | Expr::Loc(_) => {}
        Expr::Bin(_, a, b) | Expr::Choice(a, b) | Expr::Pair(a, b) => {
            expr_syms(a, out);
            expr_syms(b, out);
        }
        Expr::Fst(a) | Expr::Snd(a) => expr_syms(a, out),
    }
}

pub fn loc_expr_syms(l: &LocExpr, out: &mut Vec<Sym>) {
    if let LocExpr::Sym(s) = l {
        out.push(*s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::ReadMod;

    fn v(name: &str) -> Var {
        Var::named(name)
    }

    #[test]
    fn subst_ret() {
        let s = Stmt::Ret(Expr::Var(v("x")));
        let out = subst_stmt_var(&s, &v("x"), &Expr::Int(5));
        assert_eq!(out, Stmt::Ret(Expr::Int(5)));
    }

    #[test]
    fn subst_into_if_both_positions() {
        // if x then ret x else ret 0 fi  {x := 1}
        let s = Stmt::If(
            Expr::Var(v("x")),
            Box::new(Stmt::Ret(Expr::Var(v("x")))),
            Box::new(Stmt::Ret(Expr::Int(0))),
        );
        let out = subst_stmt_var(&s, &v("x"), &Expr::Int(1));
        assert_eq!(
            out,
            Stmt::If(
                Expr::Int(1),
                Box::new(Stmt::Ret(Expr::Int(1))),
                Box::new(Stmt::Ret(Expr::Int(0))),
            )
        );
    }

    #[test]
    fn rebinding_shields_body() {
        // bind(x, ret x, ret x) {x := 7}: the inner body is shielded, the
        // bound statement is not.
        let s = Stmt::bind(
            v("x"),
            Stmt::Ret(Expr::Var(v("x"))),
            Stmt::Ret(Expr::Var(v("x"))),
        );
        let out = subst_stmt_var(&s, &v("x"), &Expr::Int(7));
        assert_eq!(
            out,
            Stmt::bind(v("x"), Stmt::Ret(Expr::Int(7)), Stmt::Ret(Expr::Var(v("x"))))
        );
    }

    #[test]
    fn subst_var_into_read_location() {
        let s = Stmt::read(ReadMod::Na, LocExpr::Var(v("p")));
        let out = subst_stmt_var(&s, &v("p"), &Expr::Loc(crate::lang::ast::Loc::new("d")));
        assert_eq!(
            out,
            Stmt::read(ReadMod::Na, LocExpr::Loc(crate::lang::ast::Loc::new("d")))
        );
    }

    #[test]
    fn subst_idempotent_when_absent() {
        let s = Stmt::Ret(Expr::Int(3));
        assert_eq!(subst_stmt_var(&s, &v("z"), &Expr::Int(9)), s);
    }
}
