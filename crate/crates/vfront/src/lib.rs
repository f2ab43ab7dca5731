//! An executable operational semantics for C11-style shared-memory
//! concurrency built from viewfronts and per-thread operation buffers,
//! together with an exhaustive litmus-test model checker, a seeded
//! randomized tester, and a QSBR read-copy-update case study.
//!
//! The step relation lives in [`sem`]; [`explore`] enumerates the reachable
//! configuration graph with canonical-form deduplication; [`random`] walks a
//! single seeded path; [`litmus`] carries the built-in test corpus; [`rcu`]
//! builds the read-copy-update client programs and drives testing campaigns.

pub mod lang;
pub mod state;
pub mod syntax;

pub mod sem;

pub mod explore;
pub mod litmus;
pub mod random;
pub mod rcu;

pub use lang::{Expr, Loc, LocExpr, Stmt, Sym, ThreadPath, Value, Var};
pub use sem::{step, Config, Note, RuleName, StepResult};
pub use state::{AspectConfig, Front, JoinPolicy, MachineState};
