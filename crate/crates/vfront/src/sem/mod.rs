//! The step relation: all reduction rules, grouped by aspect and gated by
//! the state's aspect configuration.
//!
//! `step` returns every enabled rule instance over all redex decompositions
//! of the statement, plus the resolution and promotion steps over the
//! operation buffers. The empty set means the configuration is terminal
//! (a fully reduced `ret`, or `stuck`).

mod access;
mod conflict;
mod consume;
mod postpone;

use std::fmt;

use crate::lang::ast::{
    Expr, LocExpr, ReadMod, Stmt, Sym, ThreadPath, Value, WriteMod,
};
use crate::lang::context::{decompose, Context, Frame};
use crate::lang::eval::{eval_closed, is_reduced, mentions_sym, normalize};
use crate::lang::subst::subst_stmt_var;
use crate::sem::access::{perform_cas, perform_delete, perform_read, perform_write, AccessOutcome};
use crate::sem::conflict::{entry_conflicts, ProtoOp};
use crate::sem::consume::{annotate_stmt, result_tainted, Taint};
use crate::sem::postpone::{eager_gamma_targets, promote_steps, resolution_steps};
use crate::state::{AspectConfig, BufEntry, Front, MachineState};

pub use crate::sem::consume::Taint as ConsumeTaint;

/// A program statement paired with a machine state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub stmt: Stmt,
    pub state: MachineState,
}

impl Config {
    /// The initial configuration: empty history, a single root thread.
    pub fn initial(stmt: Stmt, aspects: AspectConfig) -> Config {
        Config {
            stmt,
            state: MachineState::initial(aspects),
        }
    }

    pub fn is_stuck(&self) -> bool {
        matches!(self.stmt, Stmt::Stuck)
    }

    /// Terminal value, if the whole program is a fully reduced `ret` and no
    /// postponed operation remains.
    pub fn terminal_value(&self) -> Option<Value> {
        if self.state.buffers.values().any(|b| !b.is_empty()) {
            return None;
        }
        self.stmt.terminal_value()
    }
}

/// Stable rule identifiers, used in traces and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleName {
    ReadUninit,
    CasUninit,
    WriteRel,
    ReadAcq,
    WriteSc,
    ReadSc,
    WriteNa,
    ReadNa,
    ReadNaStuck1,
    ReadNaStuck2,
    WriteNaStuck1,
    WriteNaStuck2,
    ReadRlx,
    WriteRlx,
    CasSucc,
    CasFail,
    ReadCon,
    ReadPostpone,
    WritePostpone,
    LetPostpone,
    ReadResolve,
    ReadForward,
    WriteResolve,
    LetResolve,
    WritePromote,
    IfSpeculationInit,
    IfResolveTrue,
    IfResolveFalse,
    Delete,
    RetiredAccess,
    Spawn,
    Join,
    Subst,
    IfTrue,
    IfFalse,
    RepeatUnroll,
    ChoiceFst,
    ChoiceSnd,
    Eval,
    ExprStuck,
}

impl RuleName {
    pub fn as_str(&self) -> &'static str {
        use RuleName::*;
        match self {
            ReadUninit => "Read-Uninit",
            CasUninit => "CAS-Uninit",
            WriteRel => "WriteRel",
            ReadAcq => "ReadAcq",
            WriteSc => "WriteSC",
            ReadSc => "ReadSC",
            WriteNa => "WriteNA",
            ReadNa => "ReadNA",
            ReadNaStuck1 => "ReadNA-stuck1",
            ReadNaStuck2 => "ReadNA-stuck2",
            WriteNaStuck1 => "WriteNA-stuck1",
            WriteNaStuck2 => "WriteNA-stuck2",
            ReadRlx => "ReadRlx",
            WriteRlx => "WriteRlx",
            CasSucc => "CAS-Succ",
            CasFail => "CAS-Fail",
            ReadCon => "ReadCon",
            ReadPostpone => "Read-Postpone",
            WritePostpone => "Write-Postpone",
            LetPostpone => "Let-Postpone",
            ReadResolve => "Read-Resolve",
            ReadForward => "Read-Forward",
            WriteResolve => "Write-Resolve",
            LetResolve => "Let-Resolve",
            WritePromote => "Write-Promote",
            IfSpeculationInit => "If-Speculation-Init",
            IfResolveTrue => "If-Resolve-True",
            IfResolveFalse => "If-Resolve-False",
            Delete => "Delete",
            RetiredAccess => "Retired-Access",
            Spawn => "Spawn",
            Join => "Join",
            Subst => "Subst",
            IfTrue => "If-True",
            IfFalse => "If-False",
            RepeatUnroll => "Repeat-Unroll",
            ChoiceFst => "Choice-Fst",
            ChoiceSnd => "Choice-Snd",
            Eval => "Eval",
            ExprStuck => "Expr-Stuck",
        }
    }

    /// Rules whose conclusion is the stuck configuration.
    pub fn is_stuck_rule(&self) -> bool {
        use RuleName::*;
        matches!(
            self,
            ReadUninit
                | CasUninit
                | ReadNaStuck1
                | ReadNaStuck2
                | WriteNaStuck1
                | WriteNaStuck2
                | RetiredAccess
                | ExprStuck
        )
    }

    /// Data-race stuck rules (non-atomic front violations).
    pub fn is_na_race(&self) -> bool {
        use RuleName::*;
        matches!(
            self,
            ReadNaStuck1 | ReadNaStuck2 | WriteNaStuck1 | WriteNaStuck2
        )
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

/// Optional detail attached to a step: the history entry read or written,
/// and the resolved symbol if any.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Note {
    pub read: Option<(crate::lang::ast::Loc, crate::lang::ast::Tau, Value)>,
    pub wrote: Option<(crate::lang::ast::Loc, crate::lang::ast::Tau)>,
    pub resolved: Option<Sym>,
}

impl Note {
    pub fn read(loc: crate::lang::ast::Loc, tau: crate::lang::ast::Tau, value: Value) -> Note {
        Note {
            read: Some((loc, tau, value)),
            ..Default::default()
        }
    }

    pub fn wrote(loc: crate::lang::ast::Loc, tau: crate::lang::ast::Tau) -> Note {
        Note {
            wrote: Some((loc, tau)),
            ..Default::default()
        }
    }

    pub fn with_write(mut self, loc: crate::lang::ast::Loc, tau: crate::lang::ast::Tau) -> Note {
        self.wrote = Some((loc, tau));
        self
    }

    pub fn with_resolved(mut self, sym: Sym) -> Note {
        self.resolved = Some(sym);
        self
    }

    pub fn read_at(&self) -> Option<(crate::lang::ast::Loc, crate::lang::ast::Tau)> {
        self.read.as_ref().map(|(l, t, _)| (l.clone(), *t))
    }

    pub fn is_empty(&self) -> bool {
        self.read.is_none() && self.wrote.is_none() && self.resolved.is_none()
    }
}

impl fmt::Display for Note {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if let Some((l, t, v)) = &self.read {
            first = false;
            write!(f, "read {l}@{t}={v}")?;
        }
        if let Some((l, t)) = &self.wrote {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "wrote {l}@{t}")?;
        }
        if let Some(s) = &self.resolved {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "resolved {s}")?;
        }
        Ok(())
    }
}

/// One enabled rule instance.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub config: Config,
    pub rule: RuleName,
    pub path: ThreadPath,
    pub note: Note,
}

/// Replaces the leftmost `choice` node by its branches.
fn choice_split(e: &Expr) -> Option<(Expr, Expr)> {
    match e {
        Expr::Choice(a, b) => Some(((**a).clone(), (**b).clone())),
        Expr::Var(_) | Expr::Int(_) | Expr::Null | Expr::Loc(_) | Expr::Sym(_) => None,
        Expr::Bin(op, a, b) => {
            if let Some((fst, snd)) = choice_split(a) {
                let mk = |x| Expr::Bin(*op, Box::new(x), b.clone());
                return Some((mk(fst), mk(snd)));
            }
            choice_split(b).map(|(fst, snd)| {
                let mk = |x| Expr::Bin(*op, a.clone(), Box::new(x));
                (mk(fst), mk(snd))
            })
        }
        Expr::Pair(a, b) => {
            if let Some((fst, snd)) = choice_split(a) {
                let mk = |x| Expr::Pair(Box::new(x), b.clone());
                return Some((mk(fst), mk(snd)));
            }
            choice_split(b).map(|(fst, snd)| {
                let mk = |x| Expr::Pair(a.clone(), Box::new(x));
                (mk(fst), mk(snd))
            })
        }
        Expr::Fst(a) => choice_split(a)
            .map(|(fst, snd)| (Expr::Fst(Box::new(fst)), Expr::Fst(Box::new(snd)))),
        Expr::Snd(a) => choice_split(a)
            .map(|(fst, snd)| (Expr::Snd(Box::new(fst)), Expr::Snd(Box::new(snd)))),
    }
}

/// All enabled rule instances of a configuration.
pub fn step(c: &Config) -> Vec<StepResult> {
    if c.is_stuck() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (ctx, redex) in decompose(&c.stmt) {
        step_redex(c, &ctx, &redex, &mut out);
    }
    out.extend(resolution_steps(c));
    out.extend(promote_steps(c));
    out
}

fn push(
    out: &mut Vec<StepResult>,
    stmt: Stmt,
    state: MachineState,
    rule: RuleName,
    path: ThreadPath,
    note: Note,
) {
    out.push(StepResult {
        config: Config { stmt, state },
        rule,
        path,
        note,
    });
}

fn push_stuck(out: &mut Vec<StepResult>, c: &Config, rule: RuleName, path: ThreadPath) {
    push(
        out,
        Stmt::Stuck,
        c.state.clone(),
        rule,
        path,
        Note::default(),
    );
}

fn step_redex(c: &Config, ctx: &Context, redex: &Stmt, out: &mut Vec<StepResult>) {
    let path = ctx.path();
    let trail = ctx.spec_trail();
    let spec = !trail.is_empty();
    let aspects = &c.state.aspects;
    // A speculation position is live only while its subbuffer chain exists.
    if spec && c.state.buffer(&path).subbuffer(&trail).is_none() {
        return;
    }

    // Choice nodes reduce first, in any active expression position.
    if let Some((e_fst, e_snd, rebuild)) = redex_choice(redex) {
        push(
            out,
            ctx.plug(rebuild(e_fst)),
            c.state.clone(),
            RuleName::ChoiceFst,
            path.clone(),
            Note::default(),
        );
        push(
            out,
            ctx.plug(rebuild(e_snd)),
            c.state.clone(),
            RuleName::ChoiceSnd,
            path,
            Note::default(),
        );
        return;
    }

    match redex {
        Stmt::Ret(e) => {
            // normalization of a non-reduced return expression
            if mentions_sym(e) {
                let n = normalize(e);
                if n != *e && is_reduced(&n) {
                    push(
                        out,
                        ctx.plug(Stmt::Ret(n)),
                        c.state.clone(),
                        RuleName::Eval,
                        path,
                        Note::default(),
                    );
                }
            } else {
                match eval_closed(e) {
                    Some(v) => push(
                        out,
                        ctx.plug(Stmt::Ret(v.to_expr())),
                        c.state.clone(),
                        RuleName::Eval,
                        path,
                        Note::default(),
                    ),
                    None if !spec => push_stuck(out, c, RuleName::ExprStuck, path),
                    None => {}
                }
            }
        }
        Stmt::Bind(x, s1, s2) => {
            let Stmt::Ret(e) = &**s1 else { unreachable!() };
            if mentions_sym(e) {
                let n = normalize(e);
                if is_reduced(&n) {
                    push(
                        out,
                        ctx.plug(subst_stmt_var(s2, x, &n)),
                        c.state.clone(),
                        RuleName::Subst,
                        path,
                        Note::default(),
                    );
                } else if aspects.postponed_ops {
                    // Let-Postpone
                    let mut st = c.state.clone();
                    let sym = st.fresh_sym();
                    let Some(buf) = st.buffer(&path).append_at(
                        &trail,
                        BufEntry::BindE {
                            sym,
                            expr: n.clone(),
                        },
                    ) else {
                        return;
                    };
                    st.buffers.insert(path.clone(), buf);
                    push(
                        out,
                        ctx.plug(subst_stmt_var(s2, x, &Expr::Sym(sym))),
                        st,
                        RuleName::LetPostpone,
                        path,
                        Note::default(),
                    );
                }
            } else {
                match eval_closed(e) {
                    Some(v) => push(
                        out,
                        ctx.plug(subst_stmt_var(s2, x, &v.to_expr())),
                        c.state.clone(),
                        RuleName::Subst,
                        path,
                        Note::default(),
                    ),
                    None if !spec => push_stuck(out, c, RuleName::ExprStuck, path),
                    None => {}
                }
            }
        }
        Stmt::If(cond, s1, s2) => {
            if mentions_sym(cond) {
                // A bare symbol naming this if's own buffer record is
                // resolved from the buffer side.
                if let Expr::Sym(s) = cond {
                    if let Some(sub) = c.state.buffer(&path).subbuffer(&trail) {
                        if sub
                            .0
                            .iter()
                            .any(|e| matches!(e, BufEntry::If { sym, .. } if sym == s))
                        {
                            return;
                        }
                    }
                }
                if aspects.postponed_ops {
                    let mut st = c.state.clone();
                    let sym = st.fresh_sym();
                    let Some(buf) = st.buffer(&path).append_at(
                        &trail,
                        BufEntry::If {
                            sym,
                            cond: normalize(cond),
                            then_buf: Default::default(),
                            else_buf: Default::default(),
                        },
                    ) else {
                        return;
                    };
                    st.buffers.insert(path.clone(), buf);
                    push(
                        out,
                        ctx.plug(Stmt::If(Expr::Sym(sym), s1.clone(), s2.clone())),
                        st,
                        RuleName::IfSpeculationInit,
                        path,
                        Note::default(),
                    );
                }
            } else {
                match eval_closed(cond) {
                    Some(Value::Int(n)) => {
                        let (branch, rule) = if n != 0 {
                            (s1, RuleName::IfTrue)
                        } else {
                            (s2, RuleName::IfFalse)
                        };
                        push(
                            out,
                            ctx.plug((**branch).clone()),
                            c.state.clone(),
                            rule,
                            path,
                            Note::default(),
                        );
                    }
                    _ if !spec => push_stuck(out, c, RuleName::ExprStuck, path),
                    _ => {}
                }
            }
        }
        Stmt::Spw(s1, s2) => {
            if spec {
                return;
            }
            // Spawning synchronizes with everything sequenced before it:
            // postponed operations must resolve first.
            if !c.state.buffer(&path).is_empty() {
                return;
            }
            push(
                out,
                ctx.plug(Stmt::Par(s1.clone(), s2.clone())),
                c.state.spawn_meta(&path),
                RuleName::Spawn,
                path,
                Note::default(),
            );
        }
        Stmt::Par(a, b) => {
            let (Stmt::Ret(ea), Stmt::Ret(eb)) = (&**a, &**b) else {
                unreachable!()
            };
            for st in c.state.join_meta(&path) {
                push(
                    out,
                    ctx.plug(Stmt::Ret(Expr::Pair(
                        Box::new(ea.clone()),
                        Box::new(eb.clone()),
                    ))),
                    st,
                    RuleName::Join,
                    path.clone(),
                    Note::default(),
                );
            }
        }
        Stmt::Repeat(body) => {
            if spec {
                return;
            }
            let mut st = c.state.clone();
            let x = st.fresh_var();
            let unrolled = Stmt::Bind(
                x.clone(),
                body.clone(),
                Box::new(Stmt::If(
                    Expr::Var(x.clone()),
                    Box::new(Stmt::Ret(Expr::Var(x))),
                    Box::new(Stmt::Repeat(body.clone())),
                )),
            );
            push(
                out,
                ctx.plug(unrolled),
                st,
                RuleName::RepeatUnroll,
                path,
                Note::default(),
            );
        }
        Stmt::Read(rm, loc, annot) => {
            if !spec {
                match loc {
                    LocExpr::Loc(l) => {
                        let proto = ProtoOp::read(*rm, loc);
                        if !buffer_blocks(&c.state, &path, &proto) {
                            for o in
                                perform_read(&c.state, &path, l, *rm, annot, RuleName::ReadUninit)
                            {
                                emit_read_outcome(c, ctx, &path, *rm, o, out);
                            }
                        }
                    }
                    LocExpr::Var(_) => {
                        // a non-location value was substituted as an address
                        push_stuck(out, c, RuleName::ExprStuck, path.clone());
                    }
                    LocExpr::Sym(_) => {}
                }
            }
            if aspects.postponed_ops && *rm != ReadMod::Sc && !matches!(loc, LocExpr::Var(_)) {
                let mut st = c.state.clone();
                let sym = st.fresh_sym();
                let Some(buf) = st.buffer(&path).append_at(
                    &trail,
                    BufEntry::Read {
                        sym,
                        loc: loc.clone(),
                        rm: *rm,
                        annot: annot.clone(),
                    },
                ) else {
                    return;
                };
                st.buffers.insert(path.clone(), buf);
                push(
                    out,
                    ctx.plug(Stmt::Ret(Expr::Sym(sym))),
                    st,
                    RuleName::ReadPostpone,
                    path,
                    Note::default(),
                );
            }
        }
        Stmt::Write(wm, loc, e) => {
            if !spec {
                match loc {
                    LocExpr::Loc(l) if !mentions_sym(e) => {
                        let proto = ProtoOp::write(*wm == WriteMod::Sc, loc, Vec::new());
                        if !buffer_blocks(&c.state, &path, &proto) {
                            match eval_closed(e) {
                                Some(v) => {
                                    let release = effective_release(&c.state, *wm);
                                    let targets = eager_gamma_targets(
                                        &c.state,
                                        c.state.buffer(&path),
                                        release,
                                    );
                                    for o in perform_write(
                                        &c.state, &path, l, *wm, &v, &targets, None,
                                    ) {
                                        emit_value_outcome(c, ctx, &path, o, out);
                                    }
                                }
                                None => push_stuck(out, c, RuleName::ExprStuck, path.clone()),
                            }
                        }
                    }
                    LocExpr::Var(_) => {
                        push_stuck(out, c, RuleName::ExprStuck, path.clone());
                    }
                    _ => {}
                }
            }
            if aspects.postponed_ops && *wm != WriteMod::Sc && !matches!(loc, LocExpr::Var(_)) {
                let mut st = c.state.clone();
                let sym = st.fresh_sym();
                let Some(buf) = st.buffer(&path).append_at(
                    &trail,
                    BufEntry::Write {
                        sym,
                        loc: loc.clone(),
                        wm: *wm,
                        val: normalize(e),
                    },
                ) else {
                    return;
                };
                st.buffers.insert(path.clone(), buf);
                push(
                    out,
                    ctx.plug(Stmt::Ret(Expr::Sym(sym))),
                    st,
                    RuleName::WritePostpone,
                    path,
                    Note::default(),
                );
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
            if spec {
                return;
            }
            match loc {
                LocExpr::Loc(l) if !mentions_sym(expected) && !mentions_sym(desired) => {
                    let sc = *ok == crate::lang::ast::CasOkMod::Sc;
                    let proto = ProtoOp::rmw(sc, loc, Vec::new());
                    if buffer_blocks(&c.state, &path, &proto) {
                        return;
                    }
                    let (Some(ve), Some(vd)) = (eval_closed(expected), eval_closed(desired))
                    else {
                        push_stuck(out, c, RuleName::ExprStuck, path.clone());
                        return;
                    };
                    let release = matches!(
                        ok,
                        crate::lang::ast::CasOkMod::Sc
                            | crate::lang::ast::CasOkMod::RelAcq
                            | crate::lang::ast::CasOkMod::Rel
                    );
                    let targets =
                        eager_gamma_targets(&c.state, c.state.buffer(&path), release);
                    let consume_half = *ok == crate::lang::ast::CasOkMod::Con
                        || *fail == crate::lang::ast::CasFailMod::Con;
                    for o in perform_cas(
                        &c.state, &path, l, *ok, *fail, &ve, &vd, annot, &targets,
                    ) {
                        if consume_half {
                            emit_read_outcome(c, ctx, &path, ReadMod::Con, o, out);
                        } else {
                            emit_value_outcome(c, ctx, &path, o, out);
                        }
                    }
                }
                LocExpr::Var(_) => {
                    push_stuck(out, c, RuleName::ExprStuck, path.clone());
                }
                _ => {}
            }
        }
        Stmt::Delete(loc) => {
            if spec {
                return;
            }
            match loc {
                LocExpr::Loc(l) => {
                    let proto = ProtoOp::write(false, loc, Vec::new());
                    if buffer_blocks(&c.state, &path, &proto) {
                        return;
                    }
                    for o in perform_delete(&c.state, l) {
                        emit_value_outcome(c, ctx, &path, o, out);
                    }
                }
                LocExpr::Var(_) => {
                    push_stuck(out, c, RuleName::ExprStuck, path.clone());
                }
                _ => {}
            }
        }
        Stmt::Stuck => {}
    }
}

fn effective_release(state: &MachineState, wm: WriteMod) -> bool {
    state.aspects.arr && matches!(wm, WriteMod::Rel | WriteMod::Sc)
}

/// An eager operation takes effect only when no buffered (program-order
/// earlier) operation of its thread conflicts with it.
fn buffer_blocks(state: &MachineState, path: &ThreadPath, proto: &ProtoOp) -> bool {
    state
        .buffer(path)
        .0
        .iter()
        .any(|a| entry_conflicts(a, proto))
}

fn emit_value_outcome(
    c: &Config,
    ctx: &Context,
    path: &ThreadPath,
    o: AccessOutcome,
    out: &mut Vec<StepResult>,
) {
    match o {
        AccessOutcome::Value {
            state,
            value,
            rule,
            note,
        } => push(
            out,
            ctx.plug(Stmt::Ret(value.to_expr())),
            state,
            rule,
            path.clone(),
            note,
        ),
        AccessOutcome::Stuck { rule } => push_stuck(out, c, rule, path.clone()),
    }
}

/// Like `emit_value_outcome`, but a consume read additionally annotates the
/// data-dependent reads of its continuation with the retrieved front.
fn emit_read_outcome(
    c: &Config,
    ctx: &Context,
    path: &ThreadPath,
    rm: ReadMod,
    o: AccessOutcome,
    out: &mut Vec<StepResult>,
) {
    match o {
        AccessOutcome::Value {
            state,
            value,
            rule,
            note,
        } => {
            let ctx2 = if rm == ReadMod::Con && state.aspects.consume {
                match note.read_at() {
                    Some((l, t)) => {
                        let front = state.history.get(&l, t).unwrap().front.clone();
                        annotate_continuation(ctx, &front)
                    }
                    None => ctx.clone(),
                }
            } else {
                ctx.clone()
            };
            push(
                out,
                ctx2.plug(Stmt::Ret(value.to_expr())),
                state,
                rule,
                path.clone(),
                note,
            );
        }
        AccessOutcome::Stuck { rule } => push_stuck(out, c, rule, path.clone()),
    }
}

/// Annotates the continuation of a consume read executed at the hole of
/// `ctx`: the value flows into the innermost enclosing bind, and onward
/// through outer binds whose bodies return dependent data.
fn annotate_continuation(ctx: &Context, front: &Front) -> Context {
    let mut frames = ctx.0.clone();
    let mut carry = true;
    for i in (0..frames.len()).rev() {
        if !carry {
            break;
        }
        match &mut frames[i] {
            Frame::BindL(x, s2) => {
                let taint = Taint::from_var(x.clone());
                carry = result_tainted(s2, &taint);
                *s2 = annotate_stmt(s2, &taint, front);
            }
            _ => carry = false,
        }
    }
    Context(frames)
}

/// The leftmost choice inside the redex's active expressions, with a
/// rebuild function for both branches.
#[allow(clippy::type_complexity)]
fn redex_choice(redex: &Stmt) -> Option<(Expr, Expr, Box<dyn Fn(Expr) -> Stmt + '_>)> {
    match redex {
        Stmt::Ret(e) => {
            let (a, b) = choice_split(e)?;
            Some((a, b, Box::new(Stmt::Ret)))
        }
        Stmt::Bind(x, s1, s2) => {
            let Stmt::Ret(e) = &**s1 else { return None };
            let (a, b) = choice_split(e)?;
            Some((
                a,
                b,
                Box::new(move |e| {
                    Stmt::Bind(x.clone(), Box::new(Stmt::Ret(e)), s2.clone())
                }),
            ))
        }
        Stmt::If(cond, s1, s2) => {
            let (a, b) = choice_split(cond)?;
            Some((
                a,
                b,
                Box::new(move |e| Stmt::If(e, s1.clone(), s2.clone())),
            ))
        }
        Stmt::Write(wm, loc, e) => {
            let (a, b) = choice_split(e)?;
            let (wm, loc) = (*wm, loc.clone());
            Some((a, b, Box::new(move |e| Stmt::Write(wm, loc.clone(), e))))
        }
        Stmt::Cas {
            ok,
            fail,
            loc,
            expected,
            desired,
            annot,
        } => {
            let (ok, fail, loc, annot) = (*ok, *fail, loc.clone(), annot.clone());
            if let Some((a, b)) = choice_split(expected) {
                let desired = desired.clone();
                return Some((
                    a,
                    b,
                    Box::new(move |e| Stmt::Cas {
                        ok,
                        fail,
                        loc: loc.clone(),
                        expected: e,
                        desired: desired.clone(),
                        annot: annot.clone(),
                    }),
                ));
            }
            let (a, b) = choice_split(desired)?;
            let expected = expected.clone();
            Some((
                a,
                b,
                Box::new(move |e| Stmt::Cas {
                    ok,
                    fail,
                    loc: loc.clone(),
                    expected: expected.clone(),
                    desired: e,
                    annot: annot.clone(),
                }),
            ))
        }
        _ => None,
    }
}

/// Structural well-formedness of a configuration; used by property tests
/// and instrumented exploration.
pub fn check_invariants(c: &Config) -> Result<(), String> {
    let st = &c.state;
    if c.is_stuck() {
        return Ok(());
    }
    // every live thread path has per-thread entries; all other entries are
    // ancestors retained by spawn until the matching join
    let live = crate::lang::ast::live_paths(&c.stmt);
    let dom: Vec<_> = st.read_fronts.keys().cloned().collect();
    for p in &live {
        if !st.read_fronts.contains_key(p) {
            return Err(format!("live thread {p} has no read front"));
        }
    }
    for p in &dom {
        if !live.iter().any(|l| l.0.starts_with(&p.0)) {
            return Err(format!("front entry for dead thread {p}"));
        }
    }
    let dom_w: Vec<_> = st.write_fronts.keys().cloned().collect();
    let dom_b: Vec<_> = st.buffers.keys().cloned().collect();
    if dom_w != dom || dom_b != dom {
        return Err("front/buffer domains disagree".into());
    }
    // fronts reference existing history entries
    for (path, front) in &st.read_fronts {
        for (loc, tau) in front.iter() {
            match st.history.last_tau(loc) {
                Some(last) if tau <= last => {}
                _ => {
                    return Err(format!(
                        "thread {path} front {loc}:{tau} beyond history"
                    ))
                }
            }
        }
    }
    for front in [&st.sc_front, &st.na_front] {
        for (loc, tau) in front.iter() {
            match st.history.last_tau(loc) {
                Some(last) if tau <= last => {}
                _ => return Err(format!("global front {loc}:{tau} beyond history")),
            }
        }
    }
    // symbol uniqueness across buffers
    let syms = st.buffer_syms();
    let mut seen = std::collections::BTreeSet::new();
    for s in &syms {
        if !seen.insert(*s) {
            return Err(format!("duplicate buffer symbol {s}"));
        }
    }
    // gamma symbols name live buffer entries
    for (_, _, s) in &st.gamma {
        if !seen.contains(s) {
            return Err(format!("gamma mentions unknown symbol {s}"));
        }
    }
    Ok(())
}
