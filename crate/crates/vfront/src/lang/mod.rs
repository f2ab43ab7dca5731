//! Core language: abstract syntax, values, evaluation contexts, thread
//! paths, substitution and expression evaluation.

pub mod ast;
pub mod context;
pub mod eval;
pub mod subst;

pub use ast::{
    live_paths, BinOp, CasFailMod, CasOkMod, Dir, Expr, Loc, LocExpr, Modifier, ReadMod, Stmt,
    Sym, Tau, ThreadPath, Value, Var, WriteMod,
};
pub use context::{decompose, Context, Frame};
pub use eval::{eval_expr, EvalResult};
