//! Resolution of postponed operations: reads (from history or by forwarding
//! from an earlier buffered write to the same location), writes (top-level
//! records only), postponed binds, speculated-if collapse, and promotion of
//! identical writes out of both branches of a speculation.

use crate::lang::ast::{Dir, Expr, LocExpr, ReadMod, Stmt, Sym, Value, WriteMod};
use crate::lang::eval::{as_value, eval_expr, mentions_sym, EvalResult};
use crate::lang::subst::{subst_buffer_sym, subst_stmt_sym};
use crate::sem::access::{perform_read, perform_write, AccessOutcome};
use crate::sem::conflict::{entry_conflicts, predecessors, ProtoOp};
use crate::sem::consume::{annotate_buffer, annotate_stmt, Taint};
use crate::sem::{Config, Note, RuleName, StepResult};
use crate::state::{walk_entries, BufEntry, Buffer, MachineState};

/// Substitutes a resolved symbol by its value in the statement, every
/// buffer, and drops its acquire-read restrictions.
fn substitute_resolved(stmt: &Stmt, state: &mut MachineState, sym: Sym, value: &Value) -> Stmt {
    let payload = value.to_expr();
    let paths: Vec<_> = state.buffers.keys().cloned().collect();
    for p in paths {
        let b = subst_buffer_sym(state.buffer(&p), sym, &payload);
        state.buffers.insert(p, b);
    }
    state.gamma_drop_sym(sym);
    subst_stmt_sym(stmt, sym, &payload)
}

/// Rewrites the speculated if identified by `sym` to the chosen branch.
fn rewrite_spec_if(s: &Stmt, sym: Sym, take_then: bool) -> Option<Stmt> {
    match s {
        Stmt::If(Expr::Sym(c), a, b) if *c == sym => {
            Some(if take_then { (**a).clone() } else { (**b).clone() })
        }
        Stmt::Bind(x, s1, s2) => {
            if let Some(n) = rewrite_spec_if(s1, sym, take_then) {
                return Some(Stmt::Bind(x.clone(), Box::new(n), s2.clone()));
            }
            rewrite_spec_if(s2, sym, take_then)
                .map(|n| Stmt::Bind(x.clone(), s1.clone(), Box::new(n)))
        }
        Stmt::Par(a, b) => {
            if let Some(n) = rewrite_spec_if(a, sym, take_then) {
                return Some(Stmt::Par(Box::new(n), b.clone()));
            }
            rewrite_spec_if(b, sym, take_then).map(|n| Stmt::Par(a.clone(), Box::new(n)))
        }
        Stmt::If(c, a, b) => {
            if let Some(n) = rewrite_spec_if(a, sym, take_then) {
                return Some(Stmt::If(c.clone(), Box::new(n), b.clone()));
            }
            rewrite_spec_if(b, sym, take_then)
                .map(|n| Stmt::If(c.clone(), a.clone(), Box::new(n)))
        }
        Stmt::Spw(a, b) => {
            if let Some(n) = rewrite_spec_if(a, sym, take_then) {
                return Some(Stmt::Spw(Box::new(n), b.clone()));
            }
            rewrite_spec_if(b, sym, take_then).map(|n| Stmt::Spw(a.clone(), Box::new(n)))
        }
        Stmt::Repeat(a) => {
            rewrite_spec_if(a, sym, take_then).map(|n| Stmt::Repeat(Box::new(n)))
        }
        _ => None,
    }
}

pub(crate) fn resolution_steps(c: &Config) -> Vec<StepResult> {
    let mut out = Vec::new();
    if !c.state.aspects.postponed_ops {
        return out;
    }
    for (path, buf) in &c.state.buffers {
        let mut positions: Vec<(Vec<(Sym, Dir)>, usize, BufEntry)> = Vec::new();
        walk_entries(buf, &mut Vec::new(), &mut |trail, idx, e| {
            positions.push((trail.to_vec(), idx, e.clone()));
        });
        for (trail, idx, entry) in positions {
            match &entry {
                BufEntry::Read {
                    sym,
                    loc,
                    rm,
                    annot,
                } => {
                    let preds = predecessors(buf, &trail, idx);
                    let proto = ProtoOp::read(*rm, loc);
                    // Backward scan: forward from the nearest same-location
                    // write, or stop at the first conflicting entry.
                    let mut forward: Option<Value> = None;
                    let mut blocked = false;
                    for a in preds.iter().rev() {
                        if let BufEntry::Write { loc: wl, val, .. } = a {
                            if wl == loc {
                                match as_value(val) {
                                    Some(v) => forward = Some(v),
                                    None => blocked = true,
                                }
                                break;
                            }
                        }
                        if entry_conflicts(a, &proto) {
                            blocked = true;
                            break;
                        }
                    }
                    if let Some(v) = forward {
                        let mut st = c.state.clone();
                        st.buffers
                            .insert(path.clone(), buf.remove_at(&trail, *sym).unwrap());
                        let stmt = substitute_resolved(&c.stmt, &mut st, *sym, &v);
                        out.push(StepResult {
                            config: Config { stmt, state: st },
                            rule: RuleName::ReadForward,
                            path: path.clone(),
                            note: Note::default().with_resolved(*sym),
                        });
                        continue;
                    }
                    if blocked {
                        continue;
                    }
                    let LocExpr::Loc(l) = loc else { continue };
                    let mut st_removed = c.state.clone();
                    st_removed
                        .buffers
                        .insert(path.clone(), buf.remove_at(&trail, *sym).unwrap());
                    for o in perform_read(&st_removed, path, l, *rm, annot, RuleName::ReadUninit)
                    {
                        match o {
                            AccessOutcome::Value {
                                state,
                                value,
                                rule: _,
                                note,
                            } => {
                                let mut st = state;
                                let mut stmt = c.stmt.clone();
                                if *rm == ReadMod::Con && st.aspects.consume {
                                    let (rl, rt) = note.read_at().unwrap();
                                    let front =
                                        st.history.get(&rl, rt).unwrap().front.clone();
                                    stmt = annotate_stmt(&stmt, &Taint::from_sym(*sym), &front);
                                    annotate_buffer(&mut st, path, *sym, &front);
                                }
                                let stmt = substitute_resolved(&stmt, &mut st, *sym, &value);
                                out.push(StepResult {
                                    config: Config { stmt, state: st },
                                    rule: RuleName::ReadResolve,
                                    path: path.clone(),
                                    note: note.with_resolved(*sym),
                                });
                            }
                            AccessOutcome::Stuck { rule } => {
                                out.push(StepResult {
                                    config: Config {
                                        stmt: Stmt::Stuck,
                                        state: c.state.clone(),
                                    },
                                    rule,
                                    path: path.clone(),
                                    note: Note::default().with_resolved(*sym),
                                });
                            }
                        }
                    }
                }
                BufEntry::Write { sym, loc, wm, val } => {
                    // Writes resolve from the top-level buffer only.
                    if !trail.is_empty() || mentions_sym(val) {
                        continue;
                    }
                    let LocExpr::Loc(l) = loc else { continue };
                    let proto = ProtoOp::of_entry(&entry);
                    if buf.0[..idx].iter().any(|a| entry_conflicts(a, &proto)) {
                        continue;
                    }
                    let values = match eval_expr(val) {
                        EvalResult::Values(vs) => vs,
                        EvalResult::Stuck => {
                            out.push(StepResult {
                                config: Config {
                                    stmt: Stmt::Stuck,
                                    state: c.state.clone(),
                                },
                                rule: RuleName::ExprStuck,
                                path: path.clone(),
                                note: Note::default().with_resolved(*sym),
                            });
                            continue;
                        }
                        EvalResult::Unresolved => continue,
                    };
                    let targets = write_gamma_targets(&c.state, buf, idx, *sym, *wm);
                    for v in values {
                        let mut st_removed = c.state.clone();
                        st_removed
                            .buffers
                            .insert(path.clone(), buf.remove_at(&trail, *sym).unwrap());
                        for o in perform_write(
                            &st_removed,
                            path,
                            l,
                            *wm,
                            &v,
                            &targets,
                            Some(*sym),
                        ) {
                            match o {
                                AccessOutcome::Value {
                                    state,
                                    value,
                                    rule: _,
                                    note,
                                } => {
                                    let mut st = state;
                                    let stmt =
                                        substitute_resolved(&c.stmt, &mut st, *sym, &value);
                                    out.push(StepResult {
                                        config: Config { stmt, state: st },
                                        rule: RuleName::WriteResolve,
                                        path: path.clone(),
                                        note: note.with_resolved(*sym),
                                    });
                                }
                                AccessOutcome::Stuck { rule } => {
                                    out.push(StepResult {
                                        config: Config {
                                            stmt: Stmt::Stuck,
                                            state: c.state.clone(),
                                        },
                                        rule,
                                        path: path.clone(),
                                        note: Note::default().with_resolved(*sym),
                                    });
                                }
                            }
                        }
                    }
                }
                BufEntry::BindE { sym, expr } => {
                    if mentions_sym(expr) {
                        continue;
                    }
                    let preds = predecessors(buf, &trail, idx);
                    let proto = ProtoOp::of_entry(&entry);
                    if preds.iter().any(|a| entry_conflicts(a, &proto)) {
                        continue;
                    }
                    match eval_expr(expr) {
                        EvalResult::Values(vs) => {
                            for v in vs {
                                let mut st = c.state.clone();
                                st.buffers
                                    .insert(path.clone(), buf.remove_at(&trail, *sym).unwrap());
                                let stmt = substitute_resolved(&c.stmt, &mut st, *sym, &v);
                                out.push(StepResult {
                                    config: Config { stmt, state: st },
                                    rule: RuleName::LetResolve,
                                    path: path.clone(),
                                    note: Note::default().with_resolved(*sym),
                                });
                            }
                        }
                        EvalResult::Stuck => {
                            out.push(StepResult {
                                config: Config {
                                    stmt: Stmt::Stuck,
                                    state: c.state.clone(),
                                },
                                rule: RuleName::ExprStuck,
                                path: path.clone(),
                                note: Note::default().with_resolved(*sym),
                            });
                        }
                        EvalResult::Unresolved => {}
                    }
                }
                BufEntry::If {
                    sym,
                    cond,
                    then_buf,
                    else_buf,
                } => {
                    if mentions_sym(cond) {
                        continue;
                    }
                    let EvalResult::Values(vs) = eval_expr(cond) else {
                        continue;
                    };
                    for v in vs {
                        let Value::Int(z) = v else { continue };
                        let take_then = z != 0;
                        let (chosen, discarded) = if take_then {
                            (then_buf.clone(), else_buf.clone())
                        } else {
                            (else_buf.clone(), then_buf.clone())
                        };
                        let Some(stmt) = rewrite_spec_if(&c.stmt, *sym, take_then) else {
                            continue;
                        };
                        let mut st = c.state.clone();
                        st.buffers.insert(
                            path.clone(),
                            buf.splice_if(&trail, *sym, chosen).unwrap(),
                        );
                        st.gamma_drop_sym(*sym);
                        let mut dead = Vec::new();
                        discarded.collect_syms(&mut dead);
                        for d in dead {
                            st.gamma_drop_sym(d);
                        }
                        out.push(StepResult {
                            config: Config { stmt, state: st },
                            rule: if take_then {
                                RuleName::IfResolveTrue
                            } else {
                                RuleName::IfResolveFalse
                            },
                            path: path.clone(),
                            note: Note::default().with_resolved(*sym),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Gamma targets for a committed write: for release-class writes, every
/// preceding top-level record plus every unresolved write record anywhere in
/// the thread's buffer. (The last-release-write inheritance is handled
/// separately inside the access layer.)
fn write_gamma_targets(
    state: &MachineState,
    buf: &Buffer,
    top_idx: usize,
    this_sym: Sym,
    wm: WriteMod,
) -> Vec<Sym> {
    if !state.aspects.arr {
        return Vec::new();
    }
    let release = match wm {
        WriteMod::Rel => true,
        WriteMod::Sc => true,
        _ => false,
    };
    if !release {
        return Vec::new();
    }
    let mut targets: Vec<Sym> = buf.0[..top_idx].iter().map(|e| e.sym()).collect();
    let mut writes = Vec::new();
    buf.collect_write_syms(&mut writes);
    for w in writes {
        if w != this_sym && !targets.contains(&w) {
            targets.push(w);
        }
    }
    targets
}

/// Gamma targets for an eager release-class operation: the whole buffer
/// precedes it in program order.
pub(crate) fn eager_gamma_targets(state: &MachineState, buf: &Buffer, release: bool) -> Vec<Sym> {
    if !state.aspects.arr || !release {
        return Vec::new();
    }
    let mut targets: Vec<Sym> = buf.0.iter().map(|e| e.sym()).collect();
    let mut writes = Vec::new();
    buf.collect_write_syms(&mut writes);
    for w in writes {
        if !targets.contains(&w) {
            targets.push(w);
        }
    }
    targets
}

/// Promotion of identical conflict-free writes out of both branches of a
/// speculated if into the level holding the if-record.
pub(crate) fn promote_steps(c: &Config) -> Vec<StepResult> {
    let mut out = Vec::new();
    if !c.state.aspects.postponed_ops || !c.state.aspects.promote {
        return out;
    }
    for (path, buf) in &c.state.buffers {
        let mut ifs: Vec<(Sym, Buffer, Buffer)> = Vec::new();
        walk_entries(buf, &mut Vec::new(), &mut |_, _, e| {
            if let BufEntry::If {
                sym,
                then_buf,
                else_buf,
                ..
            } = e
            {
                ifs.push((*sym, then_buf.clone(), else_buf.clone()));
            }
        });
        for (if_sym, then_buf, else_buf) in ifs {
            for (i, wt) in then_buf.0.iter().enumerate() {
                let BufEntry::Write {
                    sym: s1,
                    loc,
                    wm,
                    val,
                } = wt
                else {
                    continue;
                };
                for (j, we) in else_buf.0.iter().enumerate() {
                    let BufEntry::Write {
                        sym: s2,
                        loc: loc2,
                        wm: wm2,
                        val: val2,
                    } = we
                    else {
                        continue;
                    };
                    if loc != loc2 || wm != wm2 || val != val2 {
                        continue;
                    }
                    let proto = ProtoOp::of_entry(wt);
                    if then_buf.0[..i].iter().any(|a| entry_conflicts(a, &proto))
                        || else_buf.0[..j].iter().any(|a| entry_conflicts(a, &proto))
                    {
                        continue;
                    }
                    let promoted = BufEntry::Write {
                        sym: *s2,
                        loc: loc.clone(),
                        wm: *wm,
                        val: val.clone(),
                    };
                    let Some(new_buf) = promote_in_buffer(buf, if_sym, *s1, *s2, &promoted)
                    else {
                        continue;
                    };
                    let mut st = c.state.clone();
                    st.buffers.insert(path.clone(), new_buf);
                    // rename s1 to s2 in statement, buffers and gamma
                    let payload = Expr::Sym(*s2);
                    let paths: Vec<_> = st.buffers.keys().cloned().collect();
                    for p in paths {
                        let b = subst_buffer_sym(st.buffer(&p), *s1, &payload);
                        st.buffers.insert(p, b);
                    }
                    let renamed: Vec<_> = st
                        .gamma
                        .iter()
                        .filter(|(_, _, s)| *s == *s1)
                        .cloned()
                        .collect();
                    for (l, t, _) in renamed {
                        st.gamma.remove(&(l.clone(), t, *s1));
                        st.gamma.insert((l, t, *s2));
                    }
                    let stmt = subst_stmt_sym(&c.stmt, *s1, &payload);
                    out.push(StepResult {
                        config: Config { stmt, state: st },
                        rule: RuleName::WritePromote,
                        path: path.clone(),
                        note: Note::default().with_resolved(*s1),
                    });
                }
            }
        }
    }
    out
}

/// Rebuilds `buf` with the write symbols removed from the subbuffers of the
/// if-record `if_sym` and the promoted record inserted just before it.
fn promote_in_buffer(
    buf: &Buffer,
    if_sym: Sym,
    s1: Sym,
    s2: Sym,
    promoted: &BufEntry,
) -> Option<Buffer> {
    let mut entries = Vec::new();
    let mut done = false;
    for e in &buf.0 {
        match e {
            BufEntry::If {
                sym,
                cond,
                then_buf,
                else_buf,
            } if *sym == if_sym => {
                let mut tb = then_buf.clone();
                tb.0.retain(|x| x.sym() != s1);
                let mut eb = else_buf.clone();
                eb.0.retain(|x| x.sym() != s2);
                entries.push(promoted.clone());
                entries.push(BufEntry::If {
                    sym: *sym,
                    cond: cond.clone(),
                    then_buf: tb,
                    else_buf: eb,
                });
                done = true;
            }
            BufEntry::If {
                sym,
                cond,
                then_buf,
                else_buf,
            } => {
                if let Some(tb) = promote_in_buffer(then_buf, if_sym, s1, s2, promoted) {
                    entries.push(BufEntry::If {
                        sym: *sym,
                        cond: cond.clone(),
                        then_buf: tb,
                        else_buf: else_buf.clone(),
                    });
                    done = true;
                } else if let Some(eb) = promote_in_buffer(else_buf, if_sym, s1, s2, promoted) {
                    entries.push(BufEntry::If {
                        sym: *sym,
                        cond: cond.clone(),
                        then_buf: then_buf.clone(),
                        else_buf: eb,
                    });
                    done = true;
                } else {
                    entries.push(e.clone());
                }
            }
            other => entries.push(other.clone()),
        }
    }
    if done {
        Some(Buffer(entries))
    } else {
        None
    }
}
