//! Evaluation contexts and redex decomposition.
//!
//! The statement context grammar descends through the left of `bind` and
//! both sides of `par`. Inside a thread, once an `if` has been speculated
//! (its condition replaced by the identifying symbol of a buffer record),
//! the if-specialized context additionally descends into either branch;
//! those positions admit only pure steps and postponement.

use crate::lang::ast::{Dir, Expr, Stmt, Sym, ThreadPath, Var};
use crate::lang::eval::{as_value, is_reduced};

/// One context frame, outside-in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    /// `bind(x, [.], s2)`
    BindL(Var, Stmt),
    /// `par([.], s)`
    ParL(Stmt),
    /// `par(s, [.])`
    ParR(Stmt),
    /// `if sym then [.] else s fi` (speculated)
    IfThen(Sym, Stmt),
    /// `if sym then s else [.] fi` (speculated)
    IfElse(Sym, Stmt),
}

/// An evaluation context: a stack of frames from the root to the hole.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Context(pub Vec<Frame>);

impl Context {
    /// The thread path to the hole: the `par` branches traversed, in order.
    /// `bind` and speculation frames contribute nothing.
    pub fn path(&self) -> ThreadPath {
        let mut steps = Vec::new();
        for f in &self.0 {
            match f {
                Frame::ParL(_) => steps.push(Dir::L),
                Frame::ParR(_) => steps.push(Dir::R),
                _ => {}
            }
        }
        ThreadPath(steps)
    }

    /// The chain of speculated-if symbols and branch sides enclosing the
    /// hole; addresses a subbuffer of the thread's hierarchical buffer.
    pub fn spec_trail(&self) -> Vec<(Sym, Dir)> {
        let mut trail = Vec::new();
        for f in &self.0 {
            match f {
                Frame::IfThen(s, _) => trail.push((*s, Dir::L)),
                Frame::IfElse(s, _) => trail.push((*s, Dir::R)),
                _ => {}
            }
        }
        trail
    }

    pub fn in_speculation(&self) -> bool {
        self.0
            .iter()
            .any(|f| matches!(f, Frame::IfThen(..) | Frame::IfElse(..)))
    }

    /// Plugs `s` into the hole, rebuilding the whole statement.
    pub fn plug(&self, s: Stmt) -> Stmt {
        let mut out = s;
        for f in self.0.iter().rev() {
            out = match f {
                Frame::BindL(x, s2) => Stmt::Bind(x.clone(), Box::new(out), Box::new(s2.clone())),
                Frame::ParL(r) => Stmt::Par(Box::new(out), Box::new(r.clone())),
                Frame::ParR(l) => Stmt::Par(Box::new(l.clone()), Box::new(out)),
                Frame::IfThen(sym, els) => Stmt::If(
                    Expr::Sym(*sym),
                    Box::new(out),
                    Box::new(els.clone()),
                ),
                Frame::IfElse(sym, then) => Stmt::If(
                    Expr::Sym(*sym),
                    Box::new(then.clone()),
                    Box::new(out),
                ),
            };
        }
        out
    }
}

/// Is the statement a fully reduced `ret` (value or symbol mixture)?
pub fn is_reduced_ret(s: &Stmt) -> bool {
    matches!(s, Stmt::Ret(e) if is_reduced(e))
}

/// Is the statement a `ret` of a proper value (no symbols)?
pub fn is_value_ret(s: &Stmt) -> bool {
    matches!(s, Stmt::Ret(e) if as_value(e).is_some())
}

/// Every redex decomposition of `s`: one per active position.
/// Fully reduced statements (and `stuck`) return the empty set.
pub fn decompose(s: &Stmt) -> Vec<(Context, Stmt)> {
    let mut out = Vec::new();
    let mut frames = Vec::new();
    go(s, &mut frames, &mut out);
    out
}

fn go(s: &Stmt, frames: &mut Vec<Frame>, out: &mut Vec<(Context, Stmt)>) {
    match s {
        Stmt::Ret(e) => {
            if !is_reduced(e) {
                out.push((Context(frames.clone()), s.clone()));
            }
        }
        Stmt::Stuck => {}
        Stmt::Bind(x, s1, s2) => {
            if matches!(**s1, Stmt::Ret(_)) {
                out.push((Context(frames.clone()), s.clone()));
            } else {
                frames.push(Frame::BindL(x.clone(), (**s2).clone()));
                go(s1, frames, out);
                frames.pop();
            }
        }
        Stmt::Par(a, b) => {
            if is_reduced_ret(a) && is_reduced_ret(b) {
                out.push((Context(frames.clone()), s.clone()));
            }
            frames.push(Frame::ParL((**b).clone()));
            go(a, frames, out);
            frames.pop();
            frames.push(Frame::ParR((**a).clone()));
            go(b, frames, out);
            frames.pop();
        }
        Stmt::If(cond, a, b) => {
            out.push((Context(frames.clone()), s.clone()));
            if let Expr::Sym(sym) = cond {
                frames.push(Frame::IfThen(*sym, (**b).clone()));
                go(a, frames, out);
                frames.pop();
                frames.push(Frame::IfElse(*sym, (**a).clone()));
                go(b, frames, out);
                frames.pop();
            }
        }
        Stmt::Spw(..)
        | Stmt::Repeat(..)
        | Stmt::Read(..)
        | Stmt::Write(..)
        | Stmt::Cas { .. }
        | Stmt::Delete(..) => {
            out.push((Context(frames.clone()), s.clone()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::{LocExpr, ReadMod, WriteMod};

    fn wx() -> Stmt {
        Stmt::Write(
            WriteMod::Rlx,
            LocExpr::Loc(crate::lang::ast::Loc::new("x")),
            Expr::Int(2),
        )
    }

    #[test]
    fn ret_value_has_no_redex() {
        assert!(decompose(&Stmt::Ret(Expr::Int(5))).is_empty());
    }

    #[test]
    fn par_with_unreduced_right() {
        // par(ret 1, [x]_rlx := 2): the write is a redex under par(ret 1, .);
        // the par node itself is not yet ready to join.
        let s = Stmt::Par(Box::new(Stmt::Ret(Expr::Int(1))), Box::new(wx()));
        let ds = decompose(&s);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].0.path().to_string(), "R");
        assert_eq!(ds[0].1, wx());
    }

    #[test]
    fn nested_par_three_redexes() {
        let a = Stmt::read(ReadMod::Rlx, LocExpr::Loc(crate::lang::ast::Loc::new("x")));
        let s = Stmt::Par(
            Box::new(Stmt::Par(Box::new(a.clone()), Box::new(a.clone()))),
            Box::new(a.clone()),
        );
        let ds = decompose(&s);
        let paths: Vec<String> = ds.iter().map(|(c, _)| c.path().to_string()).collect();
        assert_eq!(paths, vec!["LL", "LR", "R"]);
    }

    #[test]
    fn join_redex_when_both_reduced() {
        let s = Stmt::Par(
            Box::new(Stmt::Ret(Expr::Int(1))),
            Box::new(Stmt::Ret(Expr::Int(2))),
        );
        let ds = decompose(&s);
        assert_eq!(ds.len(), 1);
        assert!(ds[0].0 .0.is_empty());
    }

    #[test]
    fn plug_round_trip() {
        let s = Stmt::Par(
            Box::new(Stmt::bind(
                Var::named("t"),
                Stmt::Par(Box::new(wx()), Box::new(Stmt::Ret(Expr::Int(0)))),
                Stmt::Ret(Expr::Var(Var::named("t"))),
            )),
            Box::new(wx()),
        );
        for (ctx, redex) in decompose(&s) {
            assert_eq!(ctx.plug(redex), s);
        }
    }

    #[test]
    fn speculated_if_descends() {
        // if ?0 then [x]_rlx := 2 else ret 0 fi: redexes are the if itself
        // and the write under the then-branch.
        let s = Stmt::If(
            Expr::Sym(Sym(0)),
            Box::new(wx()),
            Box::new(Stmt::Ret(Expr::Int(0))),
        );
        let ds = decompose(&s);
        assert_eq!(ds.len(), 2);
        assert_eq!(ds[1].0.spec_trail(), vec![(Sym(0), Dir::L)]);
        assert!(ds[1].0.in_speculation());
        for (ctx, redex) in ds {
            assert_eq!(ctx.plug(redex), s);
        }
    }

    #[test]
    fn path_through_bind_under_par() {
        // par(s, bind(x, par(redex, t), u)) → the redex at path RL
        let s = Stmt::Par(
            Box::new(Stmt::Ret(Expr::Int(9))),
            Box::new(Stmt::bind(
                Var::named("x"),
                Stmt::Par(Box::new(wx()), Box::new(Stmt::Ret(Expr::Int(0)))),
                Stmt::Ret(Expr::Int(0)),
            )),
        );
        let ds = decompose(&s);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].0.path().to_string(), "RL");
    }
}
