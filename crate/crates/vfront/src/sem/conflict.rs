//! The conflict predicate over buffered operations.
//!
//! An operation may take its global effect (eagerly or by resolution) only
//! when no operation before it in program order can affect its result. An
//! entry `b` conflicts with an earlier entry `a` when:
//!
//! * both access memory, at least one writes, and the locations are not
//!   provably distinct (an unresolved location may alias anything);
//! * `a` is an acquire read (it changes the local viewfront, ordering
//!   everything behind it);
//! * `b` mentions `a`'s symbolic value (data dependency);
//! * `a` is a speculated if whose condition shares a symbol with `b`, or
//!   whose subbuffers contain a conflicting entry.
//!
//! SC accesses are never postponed and act as resolution barriers: they
//! conflict with every buffered entry.

use crate::lang::ast::{LocExpr, ReadMod, Sym};
use crate::lang::subst::{expr_syms, loc_expr_syms};
use crate::state::{BufEntry, Buffer};

/// Entry-like view of an operation about to take effect.
pub struct ProtoOp {
    pub loc: Option<LocExpr>,
    pub writes: bool,
    #[allow(dead_code)]
    pub reads_mem: bool,
    /// SC accesses conflict with everything.
    pub sc_barrier: bool,
    pub mentions: Vec<Sym>,
}

impl ProtoOp {
    pub fn read(rm: ReadMod, loc: &LocExpr) -> ProtoOp {
        let mut mentions = Vec::new();
        loc_expr_syms(loc, &mut mentions);
        ProtoOp {
            loc: Some(loc.clone()),
            writes: false,
            reads_mem: true,
            sc_barrier: rm == ReadMod::Sc,
            mentions,
        }
    }

    pub fn write(sc: bool, loc: &LocExpr, val_syms: Vec<Sym>) -> ProtoOp {
        let mut mentions = val_syms;
        loc_expr_syms(loc, &mut mentions);
        ProtoOp {
            loc: Some(loc.clone()),
            writes: true,
            reads_mem: false,
            sc_barrier: sc,
            mentions,
        }
    }

    pub fn rmw(sc: bool, loc: &LocExpr, arg_syms: Vec<Sym>) -> ProtoOp {
        let mut mentions = arg_syms;
        loc_expr_syms(loc, &mut mentions);
        ProtoOp {
            loc: Some(loc.clone()),
            writes: true,
            reads_mem: true,
            sc_barrier: sc,
            mentions,
        }
    }

    pub fn bind(val_syms: Vec<Sym>) -> ProtoOp {
        ProtoOp {
            loc: None,
            writes: false,
            reads_mem: false,
            sc_barrier: false,
            mentions: val_syms,
        }
    }

    pub fn of_entry(e: &BufEntry) -> ProtoOp {
        match e {
            BufEntry::Read { loc, rm, .. } => ProtoOp::read(*rm, loc),
            BufEntry::Write { loc, val, .. } => {
                let mut syms = Vec::new();
                expr_syms(val, &mut syms);
                ProtoOp::write(false, loc, syms)
            }
            BufEntry::BindE { expr, .. } => {
                let mut syms = Vec::new();
                expr_syms(expr, &mut syms);
                ProtoOp::bind(syms)
            }
            BufEntry::If { cond, .. } => {
                let mut syms = Vec::new();
                expr_syms(cond, &mut syms);
                ProtoOp::bind(syms)
            }
        }
    }
}

/// Locations that are definitely different: both concrete and unequal.
fn provably_distinct(a: &LocExpr, b: &LocExpr) -> bool {
    matches!((a, b), (LocExpr::Loc(la), LocExpr::Loc(lb)) if la != lb)
}

/// Does the later operation `b` conflict with the earlier entry `a`?
pub fn entry_conflicts(a: &BufEntry, b: &ProtoOp) -> bool {
    if b.sc_barrier {
        return true;
    }
    if b.mentions.contains(&a.sym()) {
        return true;
    }
    match a {
        BufEntry::Read { rm, loc, .. } => {
            if *rm == ReadMod::Acq {
                return true;
            }
            mem_conflict(loc, false, b)
        }
        BufEntry::Write { loc, .. } => mem_conflict(loc, true, b),
        BufEntry::BindE { .. } => false,
        BufEntry::If {
            cond,
            then_buf,
            else_buf,
            ..
        } => {
            let mut cond_syms = Vec::new();
            expr_syms(cond, &mut cond_syms);
            if cond_syms.iter().any(|s| b.mentions.contains(s)) {
                return true;
            }
            buffer_conflicts(then_buf, b) || buffer_conflicts(else_buf, b)
        }
    }
}

fn buffer_conflicts(buf: &Buffer, b: &ProtoOp) -> bool {
    buf.0.iter().any(|a| entry_conflicts(a, b))
}

fn mem_conflict(a_loc: &LocExpr, a_writes: bool, b: &ProtoOp) -> bool {
    let Some(b_loc) = &b.loc else {
        return false;
    };
    if !(a_writes || b.writes) {
        return false;
    }
    !provably_distinct(a_loc, b_loc)
}

/// Entries before the position `(trail, idx)` in program order: for each
/// trail link, the entries preceding the containing if-record at that level,
/// then the entries preceding `idx` at the final level. Returned in program
/// order.
pub fn predecessors<'a>(
    buf: &'a Buffer,
    trail: &[(Sym, crate::lang::ast::Dir)],
    idx: usize,
) -> Vec<&'a BufEntry> {
    let mut out = Vec::new();
    let mut here = buf;
    for (sym, dir) in trail {
        let pos = here
            .0
            .iter()
            .position(|e| e.sym() == *sym)
            .expect("trail names a missing if-record");
        out.extend(here.0[..pos].iter());
        here = match &here.0[pos] {
            BufEntry::If {
                then_buf, else_buf, ..
            } => {
                if *dir == crate::lang::ast::Dir::L {
                    then_buf
                } else {
                    else_buf
                }
            }
            _ => unreachable!("trail names a non-if entry"),
        };
    }
    out.extend(here.0[..idx].iter());
    out
}
