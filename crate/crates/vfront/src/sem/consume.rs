//! Consume-read annotation: after a consume read retrieves a value and its
//! synchronization front, every subsequent read whose address is
//! data-dependent on that value is annotated with the front. Annotated reads
//! join the front into their lower bound when they finally execute.
//!
//! Data dependency is tracked through local bindings and through the results
//! of already-annotated reads (pointer chains); control dependencies do not
//! propagate it.

use std::collections::BTreeSet;

use crate::lang::ast::{Expr, LocExpr, Stmt, Sym, ThreadPath, Var};
use crate::state::{BufEntry, Buffer, Front, MachineState};

#[derive(Clone)]
pub struct Taint {
    pub vars: BTreeSet<Var>,
    pub sym: Option<Sym>,
}

impl Taint {
    pub fn from_var(v: Var) -> Taint {
        Taint {
            vars: [v].into(),
            sym: None,
        }
    }

    pub fn from_sym(s: Sym) -> Taint {
        Taint {
            vars: BTreeSet::new(),
            sym: Some(s),
        }
    }

    fn expr_tainted(&self, e: &Expr) -> bool {
        match e {
            Expr::Var(v) => self.vars.contains(v),
            Expr::Sym(s) => self.sym == Some(*s),
            Expr::Int(_) | Expr::Null | Expr::Loc(_) => false,
            Expr::Bin(_, a, b) | Expr::Choice(a, b) | Expr::Pair(a, b) => {
                self.expr_tainted(a) || self.expr_tainted(b)
            }
            Expr::Fst(a) | Expr::Snd(a) => self.expr_tainted(a),
        }
    }

    fn loc_tainted(&self, l: &LocExpr) -> bool {
        match l {
            LocExpr::Var(v) => self.vars.contains(v),
            LocExpr::Sym(s) => self.sym == Some(*s),
            LocExpr::Loc(_) => false,
        }
    }
}

/// Does the result value of `s` depend on tainted data?
pub(crate) fn result_tainted(s: &Stmt, taint: &Taint) -> bool {
    match s {
        Stmt::Ret(e) => taint.expr_tainted(e),
        Stmt::Bind(y, s1, s2) => {
            let mut inner = taint.clone();
            if propagates_to_binder(s1, taint) {
                inner.vars.insert(y.clone());
            } else {
                inner.vars.remove(y);
            }
            result_tainted(s2, &inner)
        }
        Stmt::If(_, a, b) => result_tainted(a, taint) || result_tainted(b, taint),
        Stmt::Repeat(a) => result_tainted(a, taint),
        Stmt::Par(a, b) | Stmt::Spw(a, b) => result_tainted(a, taint) || result_tainted(b, taint),
        // A write returns the written value.
        Stmt::Write(_, _, e) => taint.expr_tainted(e),
        // A read from a tainted address yields a dependent value
        // (pointer-chain traversal).
        Stmt::Read(_, l, _) => taint.loc_tainted(l),
        Stmt::Cas { loc, .. } => taint.loc_tainted(loc),
        Stmt::Delete(_) | Stmt::Stuck => false,
    }
}

fn propagates_to_binder(s1: &Stmt, taint: &Taint) -> bool {
    result_tainted(s1, taint)
}

/// Annotates every read and CAS in `s` whose address is data-dependent on
/// the taint seed, joining `front` into its annotation.
pub fn annotate_stmt(s: &Stmt, taint: &Taint, front: &Front) -> Stmt {
    match s {
        Stmt::Read(rm, l, annot) => {
            if taint.loc_tainted(l) {
                Stmt::Read(*rm, l.clone(), annot.join(front))
            } else {
                s.clone()
            }
        }
        Stmt::Cas {
            ok,
            fail,
            loc,
            expected,
            desired,
            annot,
        } => {
            if taint.loc_tainted(loc) {
                Stmt::Cas {
                    ok: *ok,
                    fail: *fail,
                    loc: loc.clone(),
                    expected: expected.clone(),
                    desired: desired.clone(),
                    annot: annot.join(front),
                }
            } else {
                s.clone()
            }
        }
        Stmt::Bind(y, s1, s2) => {
            let s1_new = annotate_stmt(s1, taint, front);
            let mut inner = taint.clone();
            if propagates_to_binder(s1, taint) {
                inner.vars.insert(y.clone());
            } else {
                inner.vars.remove(y);
            }
            Stmt::Bind(
                y.clone(),
                Box::new(s1_new),
                Box::new(annotate_stmt(s2, &inner, front)),
            )
        }
        Stmt::If(c, a, b) => Stmt::If(
            c.clone(),
            Box::new(annotate_stmt(a, taint, front)),
            Box::new(annotate_stmt(b, taint, front)),
        ),
        Stmt::Repeat(a) => Stmt::Repeat(Box::new(annotate_stmt(a, taint, front))),
        Stmt::Spw(a, b) => Stmt::Spw(
            Box::new(annotate_stmt(a, taint, front)),
            Box::new(annotate_stmt(b, taint, front)),
        ),
        Stmt::Par(a, b) => Stmt::Par(
            Box::new(annotate_stmt(a, taint, front)),
            Box::new(annotate_stmt(b, taint, front)),
        ),
        Stmt::Ret(_) | Stmt::Write(..) | Stmt::Delete(_) | Stmt::Stuck => s.clone(),
    }
}

/// Annotates postponed reads in the thread's buffer that are data-dependent
/// on the resolved consume-read symbol: directly (address mentions the
/// symbol) or through postponed binds. Runs to a fixpoint over symbol
/// aliases within the one thread.
pub fn annotate_buffer(state: &mut MachineState, path: &ThreadPath, sym: Sym, front: &Front) {
    let mut tainted: BTreeSet<Sym> = [sym].into();
    loop {
        let mut grew = false;
        let buf = state.buffer(path).clone();
        collect_aliases(&buf, &mut tainted, &mut grew);
        if !grew {
            break;
        }
    }
    let buf = annotate_buf(state.buffer(path), &tainted, front);
    state.buffers.insert(path.clone(), buf);
}

fn collect_aliases(buf: &Buffer, tainted: &mut BTreeSet<Sym>, grew: &mut bool) {
    for e in &buf.0 {
        match e {
            BufEntry::BindE { sym, expr } => {
                if !tainted.contains(sym) && expr_mentions_any(expr, tainted) {
                    tainted.insert(*sym);
                    *grew = true;
                }
            }
            BufEntry::Read { sym, loc, .. } => {
                if !tainted.contains(sym) && loc_mentions_any(loc, tainted) {
                    tainted.insert(*sym);
                    *grew = true;
                }
            }
            BufEntry::If {
                then_buf, else_buf, ..
            } => {
                collect_aliases(then_buf, tainted, grew);
                collect_aliases(else_buf, tainted, grew);
            }
            BufEntry::Write { .. } => {}
        }
    }
}

fn expr_mentions_any(e: &Expr, syms: &BTreeSet<Sym>) -> bool {
    let mut out = Vec::new();
    crate::lang::subst::expr_syms(e, &mut out);
    out.iter().any(|s| syms.contains(s))
}

fn loc_mentions_any(l: &LocExpr, syms: &BTreeSet<Sym>) -> bool {
    matches!(l, LocExpr::Sym(s) if syms.contains(s))
}

fn annotate_buf(buf: &Buffer, tainted: &BTreeSet<Sym>, front: &Front) -> Buffer {
    Buffer(
        buf.0
            .iter()
            .map(|e| match e {
                BufEntry::Read {
                    sym,
                    loc,
                    rm,
                    annot,
                } if loc_mentions_any(loc, tainted) => BufEntry::Read {
                    sym: *sym,
                    loc: loc.clone(),
                    rm: *rm,
                    annot: annot.join(front),
                },
                BufEntry::If {
                    sym,
                    cond,
                    then_buf,
                    else_buf,
                } => BufEntry::If {
                    sym: *sym,
                    cond: cond.clone(),
                    then_buf: annotate_buf(then_buf, tainted, front),
                    else_buf: annotate_buf(else_buf, tainted, front),
                },
                other => other.clone(),
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::{Loc, ReadMod};
    use crate::syntax::parse;

    /// Parses a program whose first statement binds the consume result and
    /// returns the continuation under that bind.
    fn continuation(src: &str) -> Stmt {
        match parse(src).unwrap() {
            Stmt::Bind(_, _, s2) => *s2,
            other => panic!("expected outer bind, got {other:?}"),
        }
    }

    #[test]
    fn annotates_dependent_read_only() {
        // r2 = [r1]_na depends on r1; r3 = [x]_rlx does not.
        let s = continuation("r1 = [p]_con; r2 = [r1]_na; r3 = [x]_rlx; ret (r2, r3)");
        let front = Front::singleton(&Loc::new("d"), 1);
        let taint = Taint::from_var(Var::named("r1"));
        let out = annotate_stmt(&s, &taint, &front);
        match out {
            Stmt::Bind(_, s1, rest) => {
                assert_eq!(
                    *s1,
                    Stmt::Read(ReadMod::Na, LocExpr::Var(Var::named("r1")), front.clone())
                );
                match *rest {
                    Stmt::Bind(_, s2, _) => {
                        assert_eq!(
                            *s2,
                            Stmt::read(ReadMod::Rlx, LocExpr::Loc(Loc::new("x")))
                        );
                    }
                    other => panic!("unexpected {other:?}"),
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn taint_flows_through_pure_binds() {
        // r2 = r1 + 0; r3 = [r2]_na: r3's read is dependent.
        let s = continuation("r1 = [p]_con; r2 = r1 + 0; [r2]_na");
        let front = Front::singleton(&Loc::new("d"), 1);
        let out = annotate_stmt(&s, &Taint::from_var(Var::named("r1")), &front);
        match out {
            Stmt::Bind(_, _, rest) => {
                assert_eq!(
                    *rest,
                    Stmt::Read(ReadMod::Na, LocExpr::Var(Var::named("r2")), front)
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shadowing_clears_taint() {
        let s = parse("r1 = 7; [r1]_na").unwrap();
        let front = Front::singleton(&Loc::new("d"), 1);
        let out = annotate_stmt(&s, &Taint::from_var(Var::named("r1")), &front);
        match out {
            Stmt::Bind(_, _, rest) => {
                assert_eq!(
                    *rest,
                    Stmt::read(ReadMod::Na, LocExpr::Var(Var::named("r1")))
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
