//! Shared memory-access machinery: the read, write, CAS and delete effects
//! on the machine state. Used both by the eager rules and by resolution of
//! postponed records, so the two paths cannot drift apart.

use crate::lang::ast::{CasFailMod, CasOkMod, Loc, ReadMod, Sym, Tau, ThreadPath, Value, WriteMod};
use crate::sem::{Note, RuleName};
use crate::state::{Front, HistEntry, MachineState};

/// Outcome of one access branch.
pub enum AccessOutcome {
    Value {
        state: MachineState,
        value: Value,
        rule: RuleName,
        note: Note,
    },
    Stuck {
        rule: RuleName,
    },
}

fn effective_read_mod(state: &MachineState, rm: ReadMod) -> ReadMod {
    match rm {
        ReadMod::Sc if !state.aspects.sc_fronts => ReadMod::Acq,
        ReadMod::Con if !state.aspects.consume => ReadMod::Acq,
        ReadMod::Na if !state.aspects.na_fronts => ReadMod::Rlx,
        m => m,
    }
}

fn read_rule_name(rm: ReadMod) -> RuleName {
    match rm {
        ReadMod::Sc => RuleName::ReadSc,
        ReadMod::Acq => RuleName::ReadAcq,
        ReadMod::Con => RuleName::ReadCon,
        ReadMod::Rlx => RuleName::ReadRlx,
        ReadMod::Na => RuleName::ReadNa,
    }
}

/// All branches of a read of `loc` by thread `path` with modifier `rm` and
/// annotation front `annot`. `uninit_rule` distinguishes plain reads from
/// the read half of a CAS.
pub fn perform_read(
    state: &MachineState,
    path: &ThreadPath,
    loc: &Loc,
    rm: ReadMod,
    annot: &Front,
    uninit_rule: RuleName,
) -> Vec<AccessOutcome> {
    let mut out = Vec::new();
    if state.aspects.deallocation && state.retired.contains(loc) {
        return vec![AccessOutcome::Stuck {
            rule: RuleName::RetiredAccess,
        }];
    }
    let srd = state.read_front(path);
    let eff = match (srd.get(loc), annot.get(loc)) {
        (None, None) => {
            return vec![AccessOutcome::Stuck { rule: uninit_rule }];
        }
        (a, b) => a.unwrap_or(0).max(b.unwrap_or(0)),
    };
    let rm_eff = effective_read_mod(state, rm);
    let last = state
        .history
        .last_tau(loc)
        .expect("front references a written location");

    if state.aspects.na_fronts {
        if let Some(na) = state.na_front.get(loc) {
            if eff < na {
                out.push(AccessOutcome::Stuck {
                    rule: RuleName::ReadNaStuck2,
                });
            }
        }
        if rm_eff == ReadMod::Na && eff != last {
            out.push(AccessOutcome::Stuck {
                rule: RuleName::ReadNaStuck1,
            });
        }
    }

    let lower = if rm_eff == ReadMod::Sc {
        eff.max(state.sc_front.get(loc).unwrap_or(0))
    } else {
        eff
    };
    let acquiring = matches!(rm_eff, ReadMod::Acq | ReadMod::Sc);
    for tau in lower..=last {
        if acquiring && state.arr_blocked(loc, tau) {
            continue;
        }
        let entry = state.history.get(loc, tau).unwrap().clone();
        let mut st = state.clone();
        let new_front = if acquiring {
            srd.join(&entry.front).set(
                loc,
                srd.get(loc)
                    .unwrap_or(0)
                    .max(entry.front.get(loc).unwrap_or(0))
                    .max(tau),
            )
        } else {
            srd.set(loc, srd.get(loc).unwrap_or(0).max(tau))
        };
        st.read_fronts.insert(path.clone(), new_front);
        out.push(AccessOutcome::Value {
            state: st,
            value: entry.value.clone(),
            rule: read_rule_name(rm),
            note: Note::read(loc.clone(), tau, entry.value),
        });
    }
    out
}

fn effective_write_mod(state: &MachineState, wm: WriteMod) -> WriteMod {
    match wm {
        WriteMod::Sc if !state.aspects.sc_fronts => WriteMod::Rel,
        m => m,
    }
}

fn write_rule_name(wm: WriteMod) -> RuleName {
    match wm {
        WriteMod::Sc => RuleName::WriteSc,
        WriteMod::Rel => RuleName::WriteRel,
        WriteMod::Rlx => RuleName::WriteRlx,
        WriteMod::Na => RuleName::WriteNa,
    }
}

/// Commits a write by thread `path`. `gamma_targets` are the symbols of
/// postponed operations that must block acquiring reads of the new entry
/// (computed by the caller from the thread's buffer). When the write is the
/// resolution of a postponed record, `resolved` carries its symbol so the
/// synchronization fronts of gamma-related entries can be brought up to
/// date.
pub fn perform_write(
    state: &MachineState,
    path: &ThreadPath,
    loc: &Loc,
    wm: WriteMod,
    value: &Value,
    gamma_targets: &[Sym],
    resolved: Option<Sym>,
) -> Vec<AccessOutcome> {
    let mut out = Vec::new();
    if state.aspects.deallocation && state.retired.contains(loc) {
        return vec![AccessOutcome::Stuck {
            rule: RuleName::RetiredAccess,
        }];
    }
    let srd = state.read_front(path);
    let wm_eff = effective_write_mod(state, wm);
    let last = state.history.last_tau(loc);

    let mut racy_na = false;
    if state.aspects.na_fronts {
        if let Some(na) = state.na_front.get(loc) {
            if srd.get(loc).map_or(true, |t| t < na) {
                out.push(AccessOutcome::Stuck {
                    rule: RuleName::WriteNaStuck2,
                });
            }
        }
        if wm_eff == WriteMod::Na && srd.get(loc) != last {
            out.push(AccessOutcome::Stuck {
                rule: RuleName::WriteNaStuck1,
            });
            racy_na = true;
        }
    }
    if racy_na {
        return out;
    }

    let tau = state.history.next_tau(loc);
    let stored = match wm_eff {
        WriteMod::Na => Front::bottom(),
        WriteMod::Rel | WriteMod::Sc => srd.set(loc, tau),
        WriteMod::Rlx => release_sequence_front(state, path, loc).set(loc, tau),
    };
    let mut st = state.clone();
    st.history.append(
        loc,
        HistEntry {
            value: value.clone(),
            front: stored,
        },
    );
    st.read_fronts.insert(path.clone(), srd.set(loc, tau));
    if wm_eff == WriteMod::Na && state.aspects.na_fronts {
        st.na_front = st.na_front.set(loc, tau);
    }
    if wm_eff == WriteMod::Sc && state.aspects.sc_fronts {
        st.sc_front = st.sc_front.set(loc, tau);
    }
    apply_gamma_updates(
        &mut st,
        path,
        loc,
        tau,
        matches!(wm_eff, WriteMod::Rel | WriteMod::Sc),
        gamma_targets,
        resolved,
    );
    out.push(AccessOutcome::Value {
        state: st,
        value: value.clone(),
        rule: write_rule_name(wm),
        note: Note::wrote(loc.clone(), tau),
    });
    out
}

/// The synchronization front a relaxed write inherits from the thread's last
/// release write to the same location (release sequences).
fn release_sequence_front(state: &MachineState, path: &ThreadPath, loc: &Loc) -> Front {
    if !state.aspects.write_fronts {
        return Front::bottom();
    }
    state
        .write_front(path)
        .get(loc)
        .and_then(|rel_tau| state.history.get(loc, rel_tau))
        .map(|e| e.front.clone())
        .unwrap_or_default()
}

/// Gamma bookkeeping shared by writes and the write half of CAS:
/// synchronization-front updates for a resolved symbol, removal of its
/// triples, inheritance of blockers from the previous release write, and the
/// new blocking triples. Also updates the thread's write-front.
fn apply_gamma_updates(
    st: &mut MachineState,
    path: &ThreadPath,
    loc: &Loc,
    tau: Tau,
    release: bool,
    gamma_targets: &[Sym],
    resolved: Option<Sym>,
) {
    let prev_rel = st.write_front(path).get(loc);
    if st.aspects.arr {
        if let Some(sym) = resolved {
            let extra = Front::singleton(loc, tau);
            let linked: Vec<(Loc, Tau)> = st
                .gamma
                .iter()
                .filter(|(_, _, s)| *s == sym)
                .map(|(l, t, _)| (l.clone(), *t))
                .collect();
            for (l, t) in linked {
                st.history.join_front(&l, t, &extra);
            }
            st.gamma_drop_sym(sym);
        }
        if let Some(rel_tau) = prev_rel {
            let inherited: Vec<Sym> = st
                .gamma
                .iter()
                .filter(|(l, t, _)| l == loc && *t == rel_tau)
                .map(|(_, _, s)| *s)
                .collect();
            for s in inherited {
                st.gamma.insert((loc.clone(), tau, s));
            }
        }
        for s in gamma_targets {
            st.gamma.insert((loc.clone(), tau, *s));
        }
    } else if let Some(sym) = resolved {
        st.gamma_drop_sym(sym);
    }
    if st.aspects.write_fronts && release {
        let wf = st.write_front(path).set(loc, tau);
        st.write_fronts.insert(path.clone(), wf);
    }
}

/// All branches of a CAS. The success branch reads the latest entry; its
/// write inherits the read entry's stored front (RMWs continue release
/// sequences). Failure branches read any admissible entry holding a
/// different value under the failure modifier.
#[allow(clippy::too_many_arguments)]
pub fn perform_cas(
    state: &MachineState,
    path: &ThreadPath,
    loc: &Loc,
    ok: CasOkMod,
    fail: CasFailMod,
    expected: &Value,
    desired: &Value,
    annot: &Front,
    gamma_targets: &[Sym],
) -> Vec<AccessOutcome> {
    let mut out = Vec::new();
    if state.aspects.deallocation && state.retired.contains(loc) {
        return vec![AccessOutcome::Stuck {
            rule: RuleName::RetiredAccess,
        }];
    }
    let srd = state.read_front(path);
    let eff = match (srd.get(loc), annot.get(loc)) {
        (None, None) => {
            return vec![AccessOutcome::Stuck {
                rule: RuleName::CasUninit,
            }];
        }
        (a, b) => a.unwrap_or(0).max(b.unwrap_or(0)),
    };
    let last = state
        .history
        .last_tau(loc)
        .expect("front references a written location");

    if state.aspects.na_fronts {
        if let Some(na) = state.na_front.get(loc) {
            if eff < na {
                out.push(AccessOutcome::Stuck {
                    rule: RuleName::ReadNaStuck2,
                });
            }
        }
    }

    // Success: read the latest entry.
    let last_entry = state.history.get(loc, last).unwrap().clone();
    let ok_eff = match ok {
        CasOkMod::Sc if !state.aspects.sc_fronts => CasOkMod::RelAcq,
        CasOkMod::Con if !state.aspects.consume => CasOkMod::Acq,
        m => m,
    };
    let acquiring_ok = matches!(ok_eff, CasOkMod::Sc | CasOkMod::RelAcq | CasOkMod::Acq);
    if last_entry.value == *expected && !(acquiring_ok && state.arr_blocked(loc, last)) {
        let tau = last + 1;
        let srd1 = if acquiring_ok {
            srd.join(&last_entry.front)
        } else {
            srd.clone()
        };
        let release = matches!(ok_eff, CasOkMod::Sc | CasOkMod::RelAcq | CasOkMod::Rel);
        let base = if release {
            srd1.set(loc, tau)
        } else {
            release_sequence_front(state, path, loc).set(loc, tau)
        };
        let stored = base.join(&last_entry.front).set(loc, tau);
        let mut st = state.clone();
        st.history.append(
            loc,
            HistEntry {
                value: desired.clone(),
                front: stored,
            },
        );
        st.read_fronts.insert(path.clone(), srd1.set(loc, tau));
        if ok_eff == CasOkMod::Sc && state.aspects.sc_fronts {
            st.sc_front = st.sc_front.set(loc, tau);
        }
        if st.aspects.arr {
            // The new entry continues the release sequence of the entry it
            // read: pending restrictions carry over with the front.
            let inherited: Vec<Sym> = st
                .gamma
                .iter()
                .filter(|(l, t, _)| l == loc && *t == last)
                .map(|(_, _, s)| *s)
                .collect();
            for s in inherited {
                st.gamma.insert((loc.clone(), tau, s));
            }
        }
        apply_gamma_updates(&mut st, path, loc, tau, release, gamma_targets, None);
        out.push(AccessOutcome::Value {
            state: st,
            value: last_entry.value.clone(),
            rule: RuleName::CasSucc,
            note: Note::read(loc.clone(), last, last_entry.value).with_write(loc.clone(), tau),
        });
    }

    // Failure: a pure read of any admissible entry with a different value.
    let fail_eff = match fail {
        CasFailMod::Sc if !state.aspects.sc_fronts => CasFailMod::Acq,
        CasFailMod::Con if !state.aspects.consume => CasFailMod::Acq,
        m => m,
    };
    let lower = if fail_eff == CasFailMod::Sc {
        eff.max(state.sc_front.get(loc).unwrap_or(0))
    } else {
        eff
    };
    let acquiring_fail = matches!(fail_eff, CasFailMod::Sc | CasFailMod::Acq);
    for tau in lower..=last {
        let entry = state.history.get(loc, tau).unwrap().clone();
        if entry.value == *expected {
            continue;
        }
        if acquiring_fail && state.arr_blocked(loc, tau) {
            continue;
        }
        let new_front = if acquiring_fail {
            srd.join(&entry.front)
                .set(loc, srd.get(loc).unwrap_or(0).max(tau))
        } else {
            srd.set(loc, srd.get(loc).unwrap_or(0).max(tau))
        };
        let mut st = state.clone();
        st.read_fronts.insert(path.clone(), new_front);
        out.push(AccessOutcome::Value {
            state: st,
            value: entry.value.clone(),
            rule: RuleName::CasFail,
            note: Note::read(loc.clone(), tau, entry.value),
        });
    }
    out
}

/// `delete` retires the location; any later access to it gets stuck. With
/// the deallocation aspect disabled, delete is a no-op returning 0.
pub fn perform_delete(state: &MachineState, loc: &Loc) -> Vec<AccessOutcome> {
    if !state.aspects.deallocation {
        return vec![AccessOutcome::Value {
            state: state.clone(),
            value: Value::Int(0),
            rule: RuleName::Delete,
            note: Note::default(),
        }];
    }
    if state.retired.contains(loc) {
        return vec![AccessOutcome::Stuck {
            rule: RuleName::RetiredAccess,
        }];
    }
    let mut st = state.clone();
    st.retired.insert(loc.clone());
    vec![AccessOutcome::Value {
        state: st,
        value: Value::Int(0),
        rule: RuleName::Delete,
        note: Note::default(),
    }]
}
