//! The QSBR read-copy-update case study: builders for the correct program
//! and its bug-injected variants, the safety predicate over reader sums,
//! and the randomized-testing campaign driver.
//!
//! The writer publishes a three-node list (values 1, 10, 100) through
//! `lhead`, then replaces the second node with a fresh one holding 1000,
//! waits for both readers to pass a quiescent state, and reclaims the
//! retired node with `delete`. Each reader sums the list twice, signalling
//! its state through an epoch counter. Node storage uses the fixed
//! locations `a`..`d`; readers keep their cursors and partial sums in
//! thread-private locations accessed non-atomically.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::lang::ast::{Stmt, Value};
use crate::random::{random_run, RunReport, RunTerminal};
use crate::sem::RuleName;
use crate::state::AspectConfig;
use crate::syntax::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcuVariant {
    /// The full implementation.
    Correct,
    /// Grace-period waits removed; reclamation is unguarded.
    NoSyncLoops,
    /// The release write linking a fresh node (`[rt]_rel := ...` in append)
    /// downgraded to relaxed.
    AppendRelToRlx,
    /// The initial `[lhead]_rel := a` publication downgraded to relaxed.
    LheadRelToRlx,
    /// The acquire reads in traverse downgraded to relaxed.
    TraverseAcqToRlx,
}

impl RcuVariant {
    pub const ALL: [RcuVariant; 5] = [
        RcuVariant::Correct,
        RcuVariant::NoSyncLoops,
        RcuVariant::AppendRelToRlx,
        RcuVariant::LheadRelToRlx,
        RcuVariant::TraverseAcqToRlx,
    ];

    pub const BUGGY: [RcuVariant; 4] = [
        RcuVariant::NoSyncLoops,
        RcuVariant::AppendRelToRlx,
        RcuVariant::LheadRelToRlx,
        RcuVariant::TraverseAcqToRlx,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RcuVariant::Correct => "correct",
            RcuVariant::NoSyncLoops => "no-sync-loops",
            RcuVariant::AppendRelToRlx => "append-rel-to-rlx",
            RcuVariant::LheadRelToRlx => "lhead-rel-to-rlx",
            RcuVariant::TraverseAcqToRlx => "traverse-acq-to-rlx",
        }
    }

    pub fn from_name(s: &str) -> Option<RcuVariant> {
        RcuVariant::ALL.iter().copied().find(|v| v.name() == s)
    }
}

/// Aspects for the case study: non-atomic race detection, release
/// sequences, operation buffers with acquire-read restrictions, and
/// deallocation.
pub fn rcu_aspects() -> AspectConfig {
    AspectConfig::base()
        .with_na()
        .with_wf()
        .with_arr()
        .with_dealloc()
}

/// `append(loc, value)`: link a fresh node after the current tail.
fn append(n: usize, loc: &str, value: i64, rel: &str) -> String {
    format!(
        "[{loc}]_rlx := ({value}, null);
         rt{n} = [ltail]_na;
         rtc{n} = [rt{n}]_rlx;
         [rt{n}]_{rel} := ((fst rtc{n}), {loc});
         [ltail]_na := {loc};
        "
    )
}

fn sync_with_reader(cr: &str) -> String {
    format!("repeat [{cr}]_acq >= rcwn end;\n")
}

/// The writer thread: build the list, replace the second node, wait for
/// the readers' grace period, reclaim the old node.
fn writer(variant: RcuVariant) -> String {
    let append_rel = if variant == RcuVariant::AppendRelToRlx {
        "rlx"
    } else {
        "rel"
    };
    let lhead_rel = if variant == RcuVariant::LheadRelToRlx {
        "rlx"
    } else {
        "rel"
    };
    let sync_loops = if variant == RcuVariant::NoSyncLoops {
        String::new()
    } else {
        format!("{}{}", sync_with_reader("cr1"), sync_with_reader("cr2"))
    };
    format!(
        "[a]_rlx := (1, null);
         [ltail]_na := a;
         [lhead]_{lhead_rel} := a;
         {}
         {}
         u1 = [lhead]_rlx;
         u1c = [u1]_rlx;
         u2 = snd u1c;
         u2c = [u2]_rlx;
         u3 = snd u2c;
         [d]_rel := (1000, u3);
         [u1]_rel := ((fst u1c), d);
         rcw = [cw]_rlx;
         rcwn = rcw + 2;
         [cw]_rel := rcwn;
         {sync_loops}
         delete u2;
         ret 0",
        append(1, "b", 10, append_rel),
        append(2, "c", 100, append_rel),
    )
}

/// One list traversal accumulating into `sum`.
fn traverse(acq: &str, cur: &str, sum: &str) -> String {
    format!(
        "rh = [lhead]_{acq};
         [{cur}]_na := rh;
         repeat
           rcur = [{cur}]_na;
           if rcur != null
           then rnode = [rcur]_{acq};
                rres = [{sum}]_na;
                [{sum}]_na := (fst rnode) + rres;
                [{cur}]_na := snd rnode;
                0
           else 1
           fi
         end;
        "
    )
}

/// A reader thread: two online/traverse/offline cycles, returning both sums.
fn reader(variant: RcuVariant, cr: &str, cur: &str, sum_a: &str, sum_b: &str) -> String {
    let acq = if variant == RcuVariant::TraverseAcqToRlx {
        "rlx"
    } else {
        "acq"
    };
    let online = format!("[{cr}]_rlx := [cw]_acq + 1;\n");
    let offline = format!("[{cr}]_rel := [cw]_rlx;\n");
    format!(
        "[{sum_a}]_na := 0;
         {online}
         {}
         {offline}
         [{sum_b}]_na := 0;
         {online}
         {}
         {offline}
         ra = [{sum_a}]_na;
         rb = [{sum_b}]_na;
         ret (ra, rb)",
        traverse(acq, cur, sum_a),
        traverse(acq, cur, sum_b),
    )
}

/// The full three-thread program of the given variant.
pub fn build_rcu_source(variant: RcuVariant) -> String {
    format!
        ("[cw]_na := 0; [cr1]_na := 0; [cr2]_na := 0; [lhead]_na := null;
         t = spw {{ {} }}
                 {{ spw {{ {} }}
                       {{ {} }} }};
         ret snd t",
        writer(variant),
        reader(variant, "cr1", "cur1", "sum11", "sum12"),
        reader(variant, "cr2", "cur2", "sum21", "sum22"),
    )
}

pub fn build_rcu(variant: RcuVariant) -> Stmt {
    parse(&build_rcu_source(variant)).expect("rcu program parses")
}

/// Verdict over one finished run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RcuVerdict {
    /// Terminated and all reader-sum invariants hold.
    Pass { sums: [i64; 4] },
    /// Terminated with an inadmissible sum or non-monotonic pair.
    Fail { sums: [i64; 4], reason: String },
    Stuck(RuleName),
    FuelExhausted,
}

/// Sums a reader may observe: nothing, a prefix of the initial list, the
/// full initial list, or the updated list.
pub const ADMISSIBLE_SUMS: [i64; 5] = [0, 1, 11, 111, 1101];

/// Checks the case study's correctness criteria over a finished run:
/// all four sums admissible and each reader's second traversal at least as
/// up to date as its first.
pub fn check_rcu_invariants(report: &RunReport) -> RcuVerdict {
    match &report.terminal {
        RunTerminal::Stuck(rule) => RcuVerdict::Stuck(*rule),
        RunTerminal::FuelExhausted => RcuVerdict::FuelExhausted,
        RunTerminal::Value(v) => {
            let flat = v.flatten();
            let ints: Vec<i64> = flat
                .iter()
                .filter_map(|x| match x {
                    Value::Int(n) => Some(*n),
                    _ => None,
                })
                .collect();
            if ints.len() != 4 {
                return RcuVerdict::Fail {
                    sums: [0; 4],
                    reason: format!("unexpected terminal shape: {v}"),
                };
            }
            let sums = [ints[0], ints[1], ints[2], ints[3]];
            for s in sums {
                if !ADMISSIBLE_SUMS.contains(&s) {
                    return RcuVerdict::Fail {
                        sums,
                        reason: format!("inadmissible sum {s}"),
                    };
                }
            }
            if sums[0] > sums[1] {
                return RcuVerdict::Fail {
                    sums,
                    reason: format!("r11 = {} > r12 = {}", sums[0], sums[1]),
                };
            }
            if sums[2] > sums[3] {
                return RcuVerdict::Fail {
                    sums,
                    reason: format!("r21 = {} > r22 = {}", sums[2], sums[3]),
                };
            }
            RcuVerdict::Pass { sums }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CampaignRun {
    pub index: usize,
    pub seed: u64,
    pub verdict: RcuVerdict,
    pub steps: usize,
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct CampaignSummary {
    pub variant: RcuVariant,
    pub runs: Vec<CampaignRun>,
}

impl CampaignSummary {
    pub fn stuck_count(&self) -> usize {
        self.runs
            .iter()
            .filter(|r| matches!(r.verdict, RcuVerdict::Stuck(_)))
            .count()
    }

    pub fn invariant_failures(&self) -> usize {
        self.runs
            .iter()
            .filter(|r| matches!(r.verdict, RcuVerdict::Fail { .. }))
            .count()
    }

    pub fn fuel_exhausted(&self) -> usize {
        self.runs
            .iter()
            .filter(|r| matches!(r.verdict, RcuVerdict::FuelExhausted))
            .count()
    }

    pub fn stuck_rules(&self) -> Vec<RuleName> {
        self.runs
            .iter()
            .filter_map(|r| match r.verdict {
                RcuVerdict::Stuck(rule) => Some(rule),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for CampaignSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "variant: {}", self.variant.name())?;
        writeln!(f, "{:>4} {:>6} {:>6} {:>6} {:>6}  {:<24} {:>9}", "#", "r11", "r12", "r21", "r22", "stuck", "time")?;
        for r in &self.runs {
            let (sums, stuck): ([String; 4], String) = match &r.verdict {
                RcuVerdict::Pass { sums } => (
                    sums.map(|s| s.to_string()),
                    String::new(),
                ),
                RcuVerdict::Fail { sums, reason } => (
                    sums.map(|s| s.to_string()),
                    format!("INVARIANT: {reason}"),
                ),
                RcuVerdict::Stuck(rule) => (
                    ["-".into(), "-".into(), "-".into(), "-".into()],
                    format!("stuck ({rule})"),
                ),
                RcuVerdict::FuelExhausted => (
                    ["-".into(), "-".into(), "-".into(), "-".into()],
                    "fuel exhausted".into(),
                ),
            };
            writeln!(
                f,
                "{:>4} {:>6} {:>6} {:>6} {:>6}  {:<24} {:>8.1}s",
                r.index,
                sums[0],
                sums[1],
                sums[2],
                sums[3],
                stuck,
                r.wall.as_secs_f64()
            )?;
        }
        writeln!(
            f,
            "stuck: {}/{}  invariant failures: {}  fuel exhausted: {}",
            self.stuck_count(),
            self.runs.len(),
            self.invariant_failures(),
            self.fuel_exhausted()
        )
    }
}

/// Default per-run step budget for campaigns. Runs that reach it (for
/// example a writer whose grace-period wait can no longer be satisfied)
/// count as fuel-exhausted, not as failures.
pub const CAMPAIGN_FUEL: usize = 12_000;

/// N seeded runs of a variant, executed in parallel over the seeds.
pub fn campaign(variant: RcuVariant, runs: usize, seed_base: u64, fuel: usize) -> CampaignSummary {
    let stmt = build_rcu(variant);
    let aspects = rcu_aspects();
    let mut results: Vec<CampaignRun> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let seed = seed_base + i as u64;
            let start = Instant::now();
            let report = random_run(&stmt, aspects, seed, fuel);
            let wall = start.elapsed();
            CampaignRun {
                index: i + 1,
                seed,
                verdict: check_rcu_invariants(&report),
                steps: report.steps,
                wall,
            }
        })
        .collect();
    results.sort_by_key(|r| r.index);
    CampaignSummary {
        variant,
        runs: results,
    }
}
