//! Per-thread hierarchical buffers of postponed operations.
//!
//! A buffer is an ordered sequence of records, each identified by a unique
//! symbolic value. `If` records carry two nested subbuffers holding the
//! operations speculatively postponed under the corresponding branch.

use std::fmt;

use crate::lang::ast::{Dir, Expr, LocExpr, ReadMod, Sym, WriteMod};
use crate::state::Front;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BufEntry {
    Read {
        sym: Sym,
        loc: LocExpr,
        rm: ReadMod,
        /// Consume-read annotation; joined into the lower bound at resolution.
        annot: Front,
    },
    Write {
        sym: Sym,
        loc: LocExpr,
        wm: WriteMod,
        val: Expr,
    },
    BindE {
        sym: Sym,
        expr: Expr,
    },
    If {
        sym: Sym,
        cond: Expr,
        then_buf: Buffer,
        else_buf: Buffer,
    },
}

impl BufEntry {
    pub fn sym(&self) -> Sym {
        match self {
            BufEntry::Read { sym, .. }
            | BufEntry::Write { sym, .. }
            | BufEntry::BindE { sym, .. }
            | BufEntry::If { sym, .. } => *sym,
        }
    }
}

impl fmt::Display for BufEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BufEntry::Read {
                sym,
                loc,
                rm,
                annot,
            } => {
                write!(f, "read<{sym}, {loc}, {}", rm.modifier())?;
                if !annot.is_bottom() {
                    write!(f, ", {annot}")?;
                }
                write!(f, ">")
            }
            BufEntry::Write { sym, loc, wm, val } => {
                write!(
                    f,
                    "write<{sym}, {loc}, {}, {}>",
                    wm.modifier(),
                    crate::syntax::printer::expr_to_string(val)
                )
            }
            BufEntry::BindE { sym, expr } => {
                write!(
                    f,
                    "bind<{sym}, {}>",
                    crate::syntax::printer::expr_to_string(expr)
                )
            }
            BufEntry::If {
                sym,
                cond,
                then_buf,
                else_buf,
            } => {
                write!(
                    f,
                    "if<{sym}, {}, {then_buf}, {else_buf}>",
                    crate::syntax::printer::expr_to_string(cond)
                )
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Buffer(pub Vec<BufEntry>);

/// Addresses one subbuffer within a hierarchical buffer: the chain of
/// speculated-if symbols and branch sides leading to it.
pub type Trail = [(Sym, Dir)];

impl Buffer {
    pub fn new() -> Self {
        Buffer(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// The subbuffer addressed by `trail`, if the whole chain exists.
    pub fn subbuffer(&self, trail: &Trail) -> Option<&Buffer> {
        let mut here = self;
        for (sym, dir) in trail {
            let entry = here.0.iter().find_map(|e| match e {
                BufEntry::If {
                    sym: s,
                    then_buf,
                    else_buf,
                    ..
                } if s == sym => Some(if *dir == Dir::L { then_buf } else { else_buf }),
                _ => None,
            })?;
            here = entry;
        }
        Some(here)
    }

    fn subbuffer_mut(&mut self, trail: &Trail) -> Option<&mut Buffer> {
        let mut here = self;
        for (sym, dir) in trail {
            let entry = here.0.iter_mut().find_map(|e| match e {
                BufEntry::If {
                    sym: s,
                    then_buf,
                    else_buf,
                    ..
                } if s == sym => Some(if *dir == Dir::L { then_buf } else { else_buf }),
                _ => None,
            })?;
            here = entry;
        }
        Some(here)
    }

    /// Appends `entry` at the end of the subbuffer addressed by `trail`.
    /// Returns `None` when the addressed subbuffer does not exist.
    pub fn append_at(&self, trail: &Trail, entry: BufEntry) -> Option<Buffer> {
        let mut out = self.clone();
        out.subbuffer_mut(trail)?.0.push(entry);
        Some(out)
    }

    /// All symbols of entries in this buffer, recursing into subbuffers.
    pub fn collect_syms(&self, out: &mut Vec<Sym>) {
        for e in &self.0 {
            out.push(e.sym());
            if let BufEntry::If {
                then_buf, else_buf, ..
            } = e
            {
                then_buf.collect_syms(out);
                else_buf.collect_syms(out);
            }
        }
    }

    /// Symbols of all unresolved write records, at any nesting depth.
    pub fn collect_write_syms(&self, out: &mut Vec<Sym>) {
        for e in &self.0 {
            match e {
                BufEntry::Write { sym, .. } => out.push(*sym),
                BufEntry::If {
                    then_buf, else_buf, ..
                } => {
                    then_buf.collect_write_syms(out);
                    else_buf.collect_write_syms(out);
                }
                _ => {}
            }
        }
    }

    /// Removes the entry with symbol `sym` at the addressed position.
    pub fn remove_at(&self, trail: &Trail, sym: Sym) -> Option<Buffer> {
        let mut out = self.clone();
        let sub = out.subbuffer_mut(trail)?;
        let idx = sub.0.iter().position(|e| e.sym() == sym)?;
        sub.0.remove(idx);
        Some(out)
    }

    /// Replaces the if-record `sym` (at the addressed position) by the given
    /// subbuffer spliced in place.
    pub fn splice_if(&self, trail: &Trail, sym: Sym, chosen: Buffer) -> Option<Buffer> {
        let mut out = self.clone();
        let sub = out.subbuffer_mut(trail)?;
        let idx = sub.0.iter().position(|e| e.sym() == sym)?;
        sub.0.splice(idx..=idx, chosen.0);
        Some(out)
    }

    /// All riffle interleavings of `a` and `b`, preserving each side's
    /// internal order.
    pub fn interleavings(a: &Buffer, b: &Buffer) -> Vec<Buffer> {
        fn go(a: &[BufEntry], b: &[BufEntry], acc: &mut Vec<BufEntry>, out: &mut Vec<Buffer>) {
            if a.is_empty() && b.is_empty() {
                out.push(Buffer(acc.clone()));
                return;
            }
            if let Some((h, t)) = a.split_first() {
                acc.push(h.clone());
                go(t, b, acc, out);
                acc.pop();
            }
            if let Some((h, t)) = b.split_first() {
                acc.push(h.clone());
                go(a, t, acc, out);
                acc.pop();
            }
        }
        let mut out = Vec::new();
        go(&a.0, &b.0, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Buffer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}
