//! End-to-end behavior of the step relation on characteristic programs,
//! checked by exhaustive exploration.

use std::collections::BTreeSet;

use vfront::explore::{explore, Budget};
use vfront::state::AspectConfig;
use vfront::syntax::parse;

fn run(src: &str, aspects: AspectConfig) -> (BTreeSet<String>, bool) {
    let stmt = parse(src).unwrap();
    let r = explore(&stmt, aspects, Budget::default());
    assert!(!r.truncated, "exploration truncated");
    assert_eq!(r.wedged, 0, "wedged configurations found");
    (
        r.outcome_lines().into_iter().collect(),
        r.stuck_reachable(),
    )
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Sequential sanity: a single-threaded program has its unique outcome.
#[test]
fn sequential_arithmetic() {
    let (o, stuck) = run("r = 2 + 3; ret r * 2", AspectConfig::base());
    assert_eq!(o, set(&["10"]));
    assert!(!stuck);
}

#[test]
fn choice_gives_both() {
    let (o, _) = run("ret choice 1 2", AspectConfig::base());
    assert_eq!(o, set(&["1", "2"]));
}

#[test]
fn spawn_join_pairs_results() {
    let (o, _) = run("spw { ret 1 } { ret 2 }", AspectConfig::base());
    assert_eq!(o, set(&["(1, 2)"]));
}

#[test]
fn repeat_terminates_by_dedup() {
    // the loop re-reads f = 0 forever on one path but the state repeats
    let (o, _) = run(
        "[f]_rel := 0; [f]_rel := 1; repeat [f]_acq end",
        AspectConfig::base(),
    );
    assert_eq!(o, set(&["1"]));
}

#[test]
fn uninitialized_read_is_stuck() {
    let (o, stuck) = run("r = [x]_rlx; ret r", AspectConfig::base());
    assert!(o.is_empty());
    assert!(stuck);
}

/// Message passing with release/acquire and non-atomic data: the only
/// outcome is 5, with no race, even with buffers enabled.
#[test]
fn mp_rel_acq_na_gives_five_only() {
    let src = "
        [f]_rel := 0; [d]_na := 0;
        t = spw { [d]_na := 5; [f]_rel := 1; ret 0 }
                { repeat [f]_acq end; r1 = [d]_na; ret r1 };
        ret snd t";
    // plain (no postponing)
    let (o, stuck) = run(src, AspectConfig::base().with_na());
    assert_eq!(o, set(&["5"]));
    assert!(!stuck);
    // with postponing + acquire-read restrictions the set is unchanged
    let (o, stuck) = run(src, AspectConfig::base().with_na().with_arr().with_wf());
    assert_eq!(o, set(&["5"]));
    assert!(!stuck);
}

/// Relaxed message passing races on d: stale reads and the race are
/// both observable.
#[test]
fn mp_rlx_na_races() {
    let src = "
        [f]_rlx := 0; [d]_na := 0;
        t = spw { [d]_na := 5; [f]_rlx := 1; ret 0 }
                { repeat [f]_rlx end; r1 = [d]_na; ret r1 };
        ret snd t";
    let (o, stuck) = run(src, AspectConfig::base().with_na());
    assert_eq!(o, set(&["0", "5"]));
    assert!(stuck);
}

/// Store buffering under SC: (0, 0) is forbidden.
#[test]
fn sb_sc_forbids_zero_zero() {
    let src = "
        [x]_sc := 0; [y]_sc := 0;
        spw { [x]_sc := 1; r1 = [y]_sc; ret r1 }
            { [y]_sc := 1; r2 = [x]_sc; ret r2 }";
    let (o, stuck) = run(src, AspectConfig::base().with_sc());
    assert_eq!(o, set(&["(0, 1)", "(1, 0)", "(1, 1)"]));
    assert!(!stuck);
    // downgrading the aspect restores all four (behaves as rel+acq)
    let (o, _) = run(src, AspectConfig::base());
    assert_eq!(o, set(&["(0, 0)", "(0, 1)", "(1, 0)", "(1, 1)"]));
}

/// Load buffering with relaxed accesses: buffers enable (1, 1).
#[test]
fn lb_rlx_allows_one_one_with_buffers() {
    let src = "
        [x]_rlx := 0; [y]_rlx := 0;
        spw { r1 = [y]_rlx; [x]_rlx := 1; ret r1 }
            { r2 = [x]_rlx; [y]_rlx := 1; ret r2 }";
    let (o, _) = run(src, AspectConfig::base().with_po());
    assert_eq!(o, set(&["(0, 0)", "(0, 1)", "(1, 0)", "(1, 1)"]));
    // without buffers (1, 1) disappears
    let (o, _) = run(src, AspectConfig::base());
    assert_eq!(o, set(&["(0, 0)", "(0, 1)", "(1, 0)"]));
}

/// LB with an acquire read before the relaxed write: (1, 1) is forbidden
/// (the acquire read cannot be overtaken by the write).
#[test]
fn lb_acq_rlx_forbids_one_one() {
    let src = "
        [x]_rlx := 0; [y]_rlx := 0;
        spw { r1 = [y]_acq; [x]_rlx := 1; ret r1 }
            { r2 = [x]_acq; [y]_rlx := 1; ret r2 }";
    let (o, _) = run(src, AspectConfig::base().with_po());
    assert_eq!(o, set(&["(0, 0)", "(0, 1)", "(1, 0)"]));
}

/// LB with release/acquire on one location: gamma blocks the (1, 1)
/// speculation.
#[test]
fn lb_rel_acq_rlx_forbidden_by_gamma() {
    let src = "
        [x]_rlx := 0; [y]_rlx := 0;
        spw { r1 = [y]_acq; [x]_rlx := 1; ret r1 }
            { r2 = [x]_rlx; [y]_rel := 1; ret r2 }";
    let (o, _) = run(src, AspectConfig::base().with_arr());
    assert_eq!(o, set(&["(0, 0)", "(0, 1)", "(1, 0)"]));
    // without the restriction list the outcome becomes reachable
    let (o, _) = run(src, AspectConfig::base().with_po());
    assert_eq!(o, set(&["(0, 0)", "(0, 1)", "(1, 0)", "(1, 1)"]));
}

/// Out-of-thin-air via data dependency in both threads: only (0, 0).
#[test]
fn ota_lb_only_zero() {
    let src = "
        [x]_rlx := 0; [y]_rlx := 0;
        spw { r1 = [y]_rlx; [x]_rlx := r1; ret r1 }
            { r2 = [x]_rlx; [y]_rlx := r2; ret r2 }";
    let (o, _) = run(src, AspectConfig::base().with_po());
    assert_eq!(o, set(&["(0, 0)"]));
}

/// Out-of-thin-air via self-satisfying conditionals: only (0, 0).
#[test]
fn ota_if_only_zero() {
    let src = "
        [x]_rlx := 0; [y]_rlx := 0;
        t = spw { r1 = [y]_rlx; if r1 then [x]_rlx := 1 else ret 0 fi; ret r1 }
                { r2 = [x]_rlx; if r2 then [y]_rlx := 1 else ret 0 fi; ret r2 };
        ret t";
    let (o, _) = run(src, AspectConfig::base().with_po());
    assert_eq!(o, set(&["(0, 0)"]));
}

/// Speculative execution with promotion: the unconditional write may be
/// hoisted out of both branches, enabling res = 1.
#[test]
fn se_simple_promotion() {
    let src = "
        [x]_rlx := 0; [y]_rlx := 0; [z]_rlx := 0;
        t = spw { r1 = [x]_rlx;
                  if r1 then [z]_rlx := 1; [y]_rlx := 1 else [y]_rlx := 1 fi }
                { r2 = [y]_rlx;
                  if r2 then [x]_rlx := 1 else ret 0 fi };
        r0 = [z]_rlx;
        ret r0";
    let (o, _) = run(src, AspectConfig::base().with_po());
    assert_eq!(o, set(&["0", "1"]));
    // disabling promotion removes the speculative outcome
    let mut no_promote = AspectConfig::base().with_po();
    no_promote.promote = false;
    let (o, _) = run(src, no_promote);
    assert_eq!(o, set(&["0"]));
}

/// Write reordering (2+2W): postponed writes allow (1, 1) in addition to
/// the interleaving outcomes.
#[test]
fn wr_rlx_outcomes() {
    let src = "
        [x]_rlx := 0; [y]_rlx := 0;
        t = spw { [x]_rlx := 1; [y]_rlx := 2; ret 0 }
                { [y]_rlx := 1; [x]_rlx := 2; ret 0 };
        r1 = [x]_rlx; r2 = [y]_rlx;
        ret (r1, r2)";
    let (o, _) = run(src, AspectConfig::base().with_po());
    assert_eq!(o, set(&["(1, 1)", "(1, 2)", "(2, 1)", "(2, 2)"]));
    let (o, _) = run(src, AspectConfig::base());
    assert_eq!(o, set(&["(1, 2)", "(2, 1)", "(2, 2)"]));
}

/// Release-sequence support: an acquire read of a relaxed write synchronizes
/// with the preceding release write of the same thread.
#[test]
fn release_sequence_via_write_fronts() {
    let src = "
        [f]_na := 0; [d]_na := 0;
        t = spw { [d]_na := 5; [f]_rel := 1; [f]_rlx := 2; ret 0 }
                { repeat [f]_acq == 2 end; r1 = [d]_na; ret r1 };
        ret snd t";
    let (o, stuck) = run(src, AspectConfig::base().with_na().with_wf());
    assert_eq!(o, set(&["5"]));
    assert!(!stuck);
    // without write-fronts the relaxed write publishes no front: racy
    let (o2, stuck2) = run(src, AspectConfig::base().with_na());
    assert!(stuck2);
    assert!(o2.contains("0") || o2.contains("5") || o2.is_empty());
}

/// Consume reads synchronize only address-dependent reads.
#[test]
fn mp_con_na_2_outcomes() {
    let src = "
        [p]_na := null; [d]_na := 0; [x]_na := 0;
        t = spw { [x]_rlx := 1; [d]_na := 1; [p]_rel := d; ret 0 }
                { r1 = [p]_con;
                  if r1 != null then r2 = [r1]_na; r3 = [x]_rlx; ret (r1, (r2, r3))
                  else ret (r1, (0, 0)) fi };
        ret snd t";
    let aspects = AspectConfig::base().with_na().with_consume();
    let (o, stuck) = run(src, aspects);
    assert_eq!(o, set(&["(null, 0, 0)", "(d, 1, 0)", "(d, 1, 1)"]));
    assert!(!stuck);
}

/// The same shape with an acquire read forbids the stale (d, 1, 0).
#[test]
fn mp_acq_na_2_outcomes() {
    let src = "
        [p]_na := null; [d]_na := 0; [x]_na := 0;
        t = spw { [x]_rlx := 1; [d]_na := 1; [p]_rel := d; ret 0 }
                { r1 = [p]_acq;
                  if r1 != null then r2 = [r1]_na; r3 = [x]_rlx; ret (r1, (r2, r3))
                  else ret (r1, (0, 0)) fi };
        ret snd t";
    let aspects = AspectConfig::base().with_na().with_consume();
    let (o, stuck) = run(src, aspects);
    assert_eq!(o, set(&["(null, 0, 0)", "(d, 1, 1)"]));
    assert!(!stuck);
}

/// CAS: only one of two competing threads can win; acquiring CAS transfers
/// the release front and avoids the race on d.
#[test]
fn mp_cas_acq_no_race() {
    let src = "
        [f]_rlx := 1; [d]_na := 0;
        t = spw { [d]_na := 5; [f]_rel := 0; ret 0 }
                { spw { r1 = cas_{acq,rlx}(f, 0, 1);
                        if r1 == 0 then [d]_rlx := 6 else ret 0 fi; ret r1 }
                      { r2 = cas_{acq,rlx}(f, 0, 1);
                        if r2 == 0 then [d]_rlx := 7 else ret 0 fi; ret r2 } };
        ret snd t";
    let (o, stuck) = run(src, AspectConfig::base().with_na().with_arr());
    assert!(!stuck, "outcomes: {o:?}");
    assert!(o.contains("(0, 1)") && o.contains("(1, 0)"));
    assert!(!o.contains("(0, 0)"));
}

/// The relaxed CAS does not synchronize: the data race is detectable.
#[test]
fn mp_cas_rlx_races() {
    let src = "
        [f]_rlx := 1; [d]_na := 0;
        t = spw { [d]_na := 5; [f]_rel := 0; ret 0 }
                { spw { r1 = cas_{rlx,rlx}(f, 0, 1);
                        if r1 == 0 then [d]_rlx := 6 else ret 0 fi; ret r1 }
                      { r2 = cas_{rlx,rlx}(f, 0, 1);
                        if r2 == 0 then [d]_rlx := 7 else ret 0 fi; ret r2 } };
        ret snd t";
    let (_, stuck) = run(src, AspectConfig::base().with_na());
    assert!(stuck);
}

/// Deallocation: delete retires the location; later accesses are stuck.
#[test]
fn delete_then_access_is_stuck() {
    let (o, stuck) = run(
        "[a]_na := 1; delete a; r = [a]_rlx; ret r",
        AspectConfig::base().with_na().with_dealloc(),
    );
    assert!(o.is_empty());
    assert!(stuck);
    let (o, stuck) = run(
        "[a]_na := 1; delete a; delete a",
        AspectConfig::base().with_na().with_dealloc(),
    );
    assert!(o.is_empty());
    assert!(stuck);
    let (o, stuck) = run(
        "[a]_na := 1; delete a; ret 7",
        AspectConfig::base().with_na().with_dealloc(),
    );
    assert_eq!(o, set(&["7"]));
    assert!(!stuck);
}

/// Coherence: a thread's repeated reads of one location never go backwards.
#[test]
fn corr_rlx_coherent() {
    let src = "
        [x]_rlx := 0;
        t = spw { spw { [x]_rlx := 1 } { [x]_rlx := 2 } }
                { spw { r1 = [x]_rlx; r2 = [x]_rlx; ret (r1, r2) }
                      { r3 = [x]_rlx; r4 = [x]_rlx; ret (r3, r4) } };
        ret snd t";
    let (o, _) = run(src, AspectConfig::base());
    assert!(!o.contains("(1, 2, 2, 1)"));
    assert!(!o.contains("(2, 1, 1, 2)"));
    assert!(o.contains("(1, 2, 1, 2)"));
    assert!(o.contains("(0, 0, 0, 0)"));
}

/// Interleaving join policy: unresolved reads survive the inner join,
/// enabling both 1s; the strict policy forbids it.
#[test]
fn lb_join_policy_toggle() {
    let src = "
        [x]_rlx := 0; [y]_rlx := 0;
        spw { t1 = spw { r1 = [y]_rlx; [z1]_rlx := r1; ret r1 } { ret 0 };
              [x]_rlx := 1;
              ret fst t1 }
            { t2 = spw { r2 = [x]_rlx; [z2]_rlx := r2; ret r2 } { ret 0 };
              [y]_rlx := 1;
              ret fst t2 }";
    let interleave = AspectConfig::base()
        .with_po()
        .with_join(vfront::state::JoinPolicy::Interleave);
    let (o, _) = run(src, interleave);
    assert!(o.contains("(1, 1)"), "outcomes: {o:?}");
    let strict = AspectConfig::base().with_po();
    let (o, _) = run(src, strict);
    assert!(!o.contains("(1, 1)"), "outcomes: {o:?}");
}
