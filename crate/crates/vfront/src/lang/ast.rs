//! Abstract syntax for the core concurrent language.
//!
//! Programs are statements over shared locations accessed through modifier-
//! annotated reads, writes and compare-and-set, plus immutable local bindings,
//! conditionals, `repeat` loops, thread spawning and a `delete` operator for
//! reclaiming locations. Runtime-only forms (`par`, `stuck`, symbolic values,
//! annotated reads) never appear in parsed source.

use std::fmt;
use std::sync::Arc;

use crate::state::Front;

/// Shared memory location identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc(pub Arc<str>);

impl Loc {
    pub fn new(name: &str) -> Self {
        Loc(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Immutable local variable. `Fresh` variables are generated at runtime by
/// loop unrolling and sequencing sugar; they cannot be written in source.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Named(Arc<str>),
    Fresh(u32),
}

impl Var {
    pub fn named(name: &str) -> Self {
        Var::Named(Arc::from(name))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Named(n) => write!(f, "{n}"),
            Var::Fresh(n) => write!(f, "%{n}"),
        }
    }
}

/// Symbolic value standing for the not-yet-known result of a postponed
/// operation. Allocated from a per-state counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(pub u32);

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

/// History timestamp.
pub type Tau = u32;

/// Memory order modifier (all positions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Modifier {
    Sc,
    RelAcq,
    Rel,
    Acq,
    Con,
    Rlx,
    Na,
}

impl fmt::Display for Modifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Modifier::Sc => "sc",
            Modifier::RelAcq => "relAcq",
            Modifier::Rel => "rel",
            Modifier::Acq => "acq",
            Modifier::Con => "con",
            Modifier::Rlx => "rlx",
            Modifier::Na => "na",
        };
        write!(f, "{s}")
    }
}

/// Read modifier: `RM ::= sc | acq | con | rlx | na`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReadMod {
    Sc,
    Acq,
    Con,
    Rlx,
    Na,
}

/// Write modifier: `WM ::= sc | rel | rlx | na`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WriteMod {
    Sc,
    Rel,
    Rlx,
    Na,
}

/// CAS success modifier: `SM ::= sc | relAcq | rel | acq | con | rlx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CasOkMod {
    Sc,
    RelAcq,
    Rel,
    Acq,
    Con,
    Rlx,
}

/// CAS failure modifier: `FM ::= sc | acq | con | rlx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CasFailMod {
    Sc,
    Acq,
    Con,
    Rlx,
}

impl ReadMod {
    pub fn try_from_modifier(m: Modifier) -> Option<Self> {
        match m {
            Modifier::Sc => Some(ReadMod::Sc),
            Modifier::Acq => Some(ReadMod::Acq),
            Modifier::Con => Some(ReadMod::Con),
            Modifier::Rlx => Some(ReadMod::Rlx),
            Modifier::Na => Some(ReadMod::Na),
            _ => None,
        }
    }

    pub fn modifier(self) -> Modifier {
        match self {
            ReadMod::Sc => Modifier::Sc,
            ReadMod::Acq => Modifier::Acq,
            ReadMod::Con => Modifier::Con,
            ReadMod::Rlx => Modifier::Rlx,
            ReadMod::Na => Modifier::Na,
        }
    }
}

impl WriteMod {
    pub fn try_from_modifier(m: Modifier) -> Option<Self> {
        match m {
            Modifier::Sc => Some(WriteMod::Sc),
            Modifier::Rel => Some(WriteMod::Rel),
            Modifier::Rlx => Some(WriteMod::Rlx),
            Modifier::Na => Some(WriteMod::Na),
            _ => None,
        }
    }

    pub fn modifier(self) -> Modifier {
        match self {
            WriteMod::Sc => Modifier::Sc,
            WriteMod::Rel => Modifier::Rel,
            WriteMod::Rlx => Modifier::Rlx,
            WriteMod::Na => Modifier::Na,
        }
    }
}

impl CasOkMod {
    pub fn try_from_modifier(m: Modifier) -> Option<Self> {
        match m {
            Modifier::Sc => Some(CasOkMod::Sc),
            Modifier::RelAcq => Some(CasOkMod::RelAcq),
            Modifier::Rel => Some(CasOkMod::Rel),
            Modifier::Acq => Some(CasOkMod::Acq),
            Modifier::Con => Some(CasOkMod::Con),
            Modifier::Rlx => Some(CasOkMod::Rlx),
            _ => None,
        }
    }

    pub fn modifier(self) -> Modifier {
        match self {
            CasOkMod::Sc => Modifier::Sc,
            CasOkMod::RelAcq => Modifier::RelAcq,
            CasOkMod::Rel => Modifier::Rel,
            CasOkMod::Acq => Modifier::Acq,
            CasOkMod::Con => Modifier::Con,
            CasOkMod::Rlx => Modifier::Rlx,
        }
    }
}

impl CasFailMod {
    pub fn try_from_modifier(m: Modifier) -> Option<Self> {
        match m {
            Modifier::Sc => Some(CasFailMod::Sc),
            Modifier::Acq => Some(CasFailMod::Acq),
            Modifier::Con => Some(CasFailMod::Con),
            Modifier::Rlx => Some(CasFailMod::Rlx),
            _ => None,
        }
    }

    pub fn modifier(self) -> Modifier {
        match self {
            CasFailMod::Sc => Modifier::Sc,
            CasFailMod::Acq => Modifier::Acq,
            CasFailMod::Con => Modifier::Con,
            CasFailMod::Rlx => Modifier::Rlx,
        }
    }
}

/// Binary operators on integer expressions. Comparisons return 1/0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
        };
        write!(f, "{s}")
    }
}

/// Expressions. Symbolic values only appear at runtime.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Var(Var),
    Int(i64),
    Null,
    Loc(Loc),
    Sym(Sym),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Choice(Box<Expr>, Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    Fst(Box<Expr>),
    Snd(Box<Expr>),
}

/// Fully evaluated values: integers, locations, the distinguished `null`,
/// and pairs of values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Loc(Loc),
    Null,
    Pair(Box<Value>, Box<Value>),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Value::Int(n) => Expr::Int(*n),
            Value::Loc(l) => Expr::Loc(l.clone()),
            Value::Null => Expr::Null,
            Value::Pair(a, b) => Expr::Pair(Box::new(a.to_expr()), Box::new(b.to_expr())),
        }
    }

    /// Flattens nested pairs into a tuple of scalar values, left to right.
    pub fn flatten(&self) -> Vec<Value> {
        match self {
            Value::Pair(a, b) => {
                let mut out = a.flatten();
                out.extend(b.flatten());
                out
            }
            v => vec![v.clone()],
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Loc(l) => write!(f, "{l}"),
            Value::Null => write!(f, "null"),
            Value::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

/// A location expression: a concrete location, a local variable (dereference),
/// or a symbolic value awaiting resolution.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocExpr {
    Loc(Loc),
    Var(Var),
    Sym(Sym),
}

impl fmt::Display for LocExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocExpr::Loc(l) => write!(f, "{l}"),
            LocExpr::Var(v) => write!(f, "{v}"),
            LocExpr::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// Statements. `Par`, `Stuck`, non-empty annotation fronts and symbolic
/// values are runtime-only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stmt {
    Ret(Expr),
    Bind(Var, Box<Stmt>, Box<Stmt>),
    Spw(Box<Stmt>, Box<Stmt>),
    If(Expr, Box<Stmt>, Box<Stmt>),
    Repeat(Box<Stmt>),
    /// `annot` is the consume-read annotation front; empty for plain reads.
    Read(ReadMod, LocExpr, Front),
    Write(WriteMod, LocExpr, Expr),
    Cas {
        ok: CasOkMod,
        fail: CasFailMod,
        loc: LocExpr,
        expected: Expr,
        desired: Expr,
        annot: Front,
    },
    Delete(LocExpr),
    Stuck,
    Par(Box<Stmt>, Box<Stmt>),
}

impl Stmt {
    pub fn read(rm: ReadMod, loc: LocExpr) -> Stmt {
        Stmt::Read(rm, loc, Front::bottom())
    }

    pub fn ret_value(v: Value) -> Stmt {
        Stmt::Ret(v.to_expr())
    }

    pub fn bind(x: Var, s1: Stmt, s2: Stmt) -> Stmt {
        Stmt::Bind(x, Box::new(s1), Box::new(s2))
    }

    /// The value of a fully reduced program: `ret e` where `e` is a value.
    pub fn terminal_value(&self) -> Option<Value> {
        match self {
            Stmt::Ret(e) => crate::lang::eval::as_value(e),
            _ => None,
        }
    }
}

/// One step of a thread path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    L,
    R,
}

/// Identifies one thread leaf in the `par`-tree of a runtime statement.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThreadPath(pub Vec<Dir>);

impl ThreadPath {
    pub fn root() -> Self {
        ThreadPath(Vec::new())
    }

    pub fn child(&self, d: Dir) -> Self {
        let mut steps = self.0.clone();
        steps.push(d);
        ThreadPath(steps)
    }
}

impl fmt::Display for ThreadPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, ".");
        }
        for d in &self.0 {
            write!(f, "{}", if *d == Dir::L { 'L' } else { 'R' })?;
        }
        Ok(())
    }
}

/// Live thread paths of a runtime statement: one per leaf of the par-tree.
/// `bind` nodes are transparent on the left.
pub fn live_paths(s: &Stmt) -> Vec<ThreadPath> {
    let mut out = Vec::new();
    collect_paths(s, ThreadPath::root(), &mut out);
    out
}

fn collect_paths(s: &Stmt, here: ThreadPath, out: &mut Vec<ThreadPath>) {
    match s {
        Stmt::Par(l, r) => {
            collect_paths(l, here.child(Dir::L), out);
            collect_paths(r, here.child(Dir::R), out);
        }
        Stmt::Bind(_, s1, _) => collect_paths(s1, here, out),
        _ => out.push(here),
    }
}
