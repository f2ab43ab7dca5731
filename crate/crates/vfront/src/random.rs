//! Seeded randomized execution: repeatedly computes the successor set,
//! reports stuck immediately if any successor is stuck, and otherwise picks
//! the next configuration uniformly at random. Runs are reproducible from
//! their seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::explore::{canonicalize, Trace};
use crate::lang::ast::{Stmt, Value};
use crate::sem::{step, Config, RuleName};
use crate::state::AspectConfig;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunTerminal {
    Value(Value),
    Stuck(RuleName),
    FuelExhausted,
}

impl std::fmt::Display for RunTerminal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunTerminal::Value(v) => write!(f, "{}", crate::explore::format_outcome(v)),
            RunTerminal::Stuck(rule) => write!(f, "stuck({rule})"),
            RunTerminal::FuelExhausted => write!(f, "fuel-exhausted"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub terminal: RunTerminal,
    pub trace: Trace,
    pub seed: u64,
    pub steps: usize,
}

impl RunReport {
    /// Header line plus the trace in the explorer's format.
    pub fn render(&self) -> String {
        format!(
            "seed={} steps={} result={}\n{}",
            self.seed,
            self.steps,
            self.terminal,
            self.trace.render()
        )
    }
}

#[derive(Debug, Error)]
#[error("replay diverged from the recorded run at step {step}")]
pub struct ReplayError {
    pub step: usize,
}

/// One seeded run. Successors are ordered by canonical key before sampling,
/// decoupling randomness from internal iteration order.
pub fn random_run(stmt: &Stmt, aspects: AspectConfig, seed: u64, fuel: usize) -> RunReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut config = Config::initial(stmt.clone(), aspects);
    let mut trace = Trace { steps: Vec::new() };
    let mut steps = 0;
    loop {
        if steps >= fuel {
            return RunReport {
                terminal: RunTerminal::FuelExhausted,
                trace,
                seed,
                steps,
            };
        }
        let mut succs = step(&config);
        if succs.is_empty() {
            let terminal = match config.terminal_value() {
                Some(v) => RunTerminal::Value(v),
                // a wedged non-terminal would be a semantics bug; report it
                // as fuel exhaustion rather than inventing an outcome
                None => RunTerminal::FuelExhausted,
            };
            return RunReport {
                terminal,
                trace,
                seed,
                steps,
            };
        }
        succs.sort_by_cached_key(|sr| canonicalize(&sr.config));
        if let Some(stuck) = succs.iter().find(|sr| sr.config.is_stuck()) {
            trace
                .steps
                .push((stuck.rule, stuck.path.clone(), stuck.note.to_string()));
            return RunReport {
                terminal: RunTerminal::Stuck(stuck.rule),
                trace,
                seed,
                steps: steps + 1,
            };
        }
        let pick = rng.gen_range(0..succs.len());
        let chosen = succs.swap_remove(pick);
        trace
            .steps
            .push((chosen.rule, chosen.path.clone(), chosen.note.to_string()));
        config = chosen.config;
        steps += 1;
    }
}

/// Re-runs a report's seed and demands a bit-identical outcome and trace.
pub fn replay(
    report: &RunReport,
    stmt: &Stmt,
    aspects: AspectConfig,
) -> Result<RunReport, ReplayError> {
    let fuel = report.steps.max(1).max(report.trace.steps.len()) + 1;
    let again = random_run(
        stmt,
        aspects,
        report.seed,
        if report.terminal == RunTerminal::FuelExhausted {
            report.steps
        } else {
            fuel
        },
    );
    if again.terminal != report.terminal || again.trace != report.trace {
        let step = report
            .trace
            .steps
            .iter()
            .zip(again.trace.steps.iter())
            .position(|(a, b)| a != b)
            .unwrap_or(report.trace.steps.len().min(again.trace.steps.len()));
        return Err(ReplayError { step });
    }
    Ok(again)
}
