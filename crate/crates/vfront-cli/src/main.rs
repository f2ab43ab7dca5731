//! Command-line front end: exhaustive exploration, seeded random runs, the
//! built-in litmus suite, witness traces, and the RCU testing campaign.
//!
//! Exit codes: 0 on success / expected behavior, 1 on test failure or
//! property violation, 2 on usage or parse errors.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use vfront::explore::{explore, format_outcome, witness_trace, Budget};
use vfront::litmus::{
    aspects_to_string, check_test, dump_test, load_suite, parse_aspects, parse_litmus_file,
    LitmusTest, Verdict,
};
use vfront::random::{random_run, replay, RunTerminal};
use vfront::rcu::{campaign, RcuVariant, CAMPAIGN_FUEL};
use vfront::state::{AspectConfig, JoinPolicy};
use vfront::syntax::parse;
use vfront::Stmt;

#[derive(Parser)]
#[command(
    name = "vfront",
    about = "viewfront semantics for C11-style atomics: litmus exploration and randomized testing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct AspectArgs {
    /// Comma-separated aspects to enable (sc,na,po,arr,cr,wf,dealloc);
    /// default: all of them
    #[arg(long)]
    aspects: Option<String>,
    /// Thread-join policy
    #[arg(long, value_parser = ["strict", "interleave"], default_value = "strict")]
    join: String,
}

impl AspectArgs {
    fn resolve(&self) -> Result<AspectConfig, String> {
        let mut a = match &self.aspects {
            None => AspectConfig::full(),
            Some(list) => parse_aspects(list)?,
        };
        if self.join == "interleave" {
            a = a.with_join(JoinPolicy::Interleave);
        }
        a.validate()?;
        Ok(a)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustively enumerate a program's behaviors
    Explore {
        file: PathBuf,
        #[command(flatten)]
        aspects: AspectArgs,
        #[arg(long, default_value_t = 5_000_000)]
        max_states: usize,
        #[arg(long, default_value_t = 10_000)]
        max_depth: usize,
    },
    /// Seeded random runs of a program
    Random {
        file: PathBuf,
        #[command(flatten)]
        aspects: AspectArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Maximum steps per run
        #[arg(long, default_value_t = 1_000_000)]
        fuel: usize,
        /// Print the full trace of each run
        #[arg(long)]
        trace: bool,
        /// Re-execute each run and require a bit-identical trace
        #[arg(long)]
        check_replay: bool,
    },
    /// Run the built-in litmus corpus (or external litmus files)
    Litmus {
        /// Substring filter on test names
        #[arg(long)]
        filter: Option<String>,
        /// Write the selected tests in the litmus file format to a directory
        #[arg(long, value_name = "DIR")]
        dump: Option<PathBuf>,
        /// External litmus files to check instead of the built-in corpus
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 5_000_000)]
        max_states: usize,
    },
    /// Search for a witness trace to an outcome
    Trace {
        file: PathBuf,
        #[command(flatten)]
        aspects: AspectArgs,
        /// Target outcome: a tuple like "(1, 1)", a scalar, or "stuck"
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 5_000_000)]
        max_states: usize,
    },
    /// Randomized testing campaign for the RCU case study
    Rcu {
        #[arg(long, default_value = "correct",
              value_parser = ["correct", "no-sync-loops", "append-rel-to-rlx",
                              "lhead-rel-to-rlx", "traverse-acq-to-rlx"])]
        variant: String,
        #[arg(long, default_value_t = 20)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = CAMPAIGN_FUEL)]
        fuel: usize,
        /// Print the program of the selected variant and exit
        #[arg(long)]
        show_program: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_program(path: &Path) -> Result<Stmt, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    // tolerate a litmus header block in program files
    let stmt = if text.lines().any(|l| l.trim_start().starts_with("name:")) {
        let t = parse_litmus_file(&text)?;
        parse(&t.program).map_err(|e| e.to_string())?
    } else {
        parse(&text).map_err(|e| e.to_string())?
    };
    Ok(stmt)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Explore {
            file,
            aspects,
            max_states,
            max_depth,
        } => {
            let stmt = load_program(&file)?;
            let a = aspects.resolve()?;
            let budget = Budget {
                max_states,
                max_depth,
            };
            let start = Instant::now();
            let result = explore(&stmt, a, budget);
            println!("aspects: {} join: {:?}", aspects_to_string(&a), a.join_policy);
            println!("states: {}", result.state_count);
            if result.truncated {
                println!("truncated: state or depth budget exhausted");
            }
            println!("outcomes:");
            for line in result.outcome_lines() {
                println!("  {line}");
            }
            if result.stuck_reports.is_empty() {
                println!("stuck: unreachable");
            } else {
                println!("stuck: reachable via");
                for (rule, node) in &result.stuck_reports {
                    println!("  {rule} (witness of {} steps)", result.trace_to(*node).steps.len());
                }
            }
            println!("elapsed: {:.2}s", start.elapsed().as_secs_f64());
            Ok(ExitCode::SUCCESS)
        }
        Command::Random {
            file,
            aspects,
            seed,
            runs,
            fuel,
            trace,
            check_replay,
        } => {
            let stmt = load_program(&file)?;
            let a = aspects.resolve()?;
            let mut failures = 0;
            for i in 0..runs {
                let report = random_run(&stmt, a, seed + i as u64, fuel);
                if trace {
                    print!("{}", report.render());
                } else {
                    println!(
                        "seed={} steps={} result={}",
                        report.seed, report.steps, report.terminal
                    );
                }
                if check_replay {
                    if let Err(e) = replay(&report, &stmt, a) {
                        eprintln!("replay failure for seed {}: {e}", report.seed);
                        failures += 1;
                    }
                }
                if matches!(report.terminal, RunTerminal::Stuck(_)) {
                    failures += 1;
                }
            }
            Ok(if failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Litmus {
            filter,
            dump,
            files,
            max_states,
        } => {
            let tests: Vec<LitmusTest> = if files.is_empty() {
                load_suite(filter.as_deref())
            } else {
                let mut out = Vec::new();
                for f in files {
                    let text = std::fs::read_to_string(&f)
                        .map_err(|e| format!("cannot read {}: {e}", f.display()))?;
                    out.push(parse_litmus_file(&text)?);
                }
                match &filter {
                    Some(pat) => out.into_iter().filter(|t| t.name.contains(pat)).collect(),
                    None => out,
                }
            };
            if tests.is_empty() {
                println!("no tests selected");
                return Ok(ExitCode::SUCCESS);
            }
            if let Some(dir) = dump {
                std::fs::create_dir_all(&dir)
                    .map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
                for t in &tests {
                    let path = dir.join(format!("{}.lit", t.name.replace('+', "_")));
                    std::fs::write(&path, dump_test(t))
                        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                }
                println!("wrote {} tests to {}", tests.len(), dir.display());
                return Ok(ExitCode::SUCCESS);
            }
            let budget = Budget {
                max_states,
                max_depth: 10_000,
            };
            let mut failed = 0;
            for t in &tests {
                let start = Instant::now();
                let (verdict, result) = check_test(t, budget);
                let dt = start.elapsed().as_secs_f64();
                match verdict {
                    Verdict::Pass => println!(
                        "PASS  {:<22} states={:<8} {:>6.2}s",
                        t.name, result.state_count, dt
                    ),
                    Verdict::Truncated => {
                        failed += 1;
                        println!("TRUNCATED  {:<22} states={}", t.name, result.state_count);
                    }
                    Verdict::Fail {
                        missing,
                        unexpected,
                        stuck_expected,
                        stuck_observed,
                    } => {
                        failed += 1;
                        println!("FAIL  {:<22}", t.name);
                        if !missing.is_empty() {
                            println!("      missing outcomes:    {}", missing.join("  "));
                        }
                        if !unexpected.is_empty() {
                            println!("      unexpected outcomes: {}", unexpected.join("  "));
                        }
                        if stuck_expected != stuck_observed {
                            println!(
                                "      stuck: expected {}, observed {}",
                                stuck_expected, stuck_observed
                            );
                        }
                    }
                }
            }
            println!(
                "{} passed, {} failed, {} total",
                tests.len() - failed,
                failed,
                tests.len()
            );
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Trace {
            file,
            aspects,
            to,
            max_states,
        } => {
            let stmt = load_program(&file)?;
            let a = aspects.resolve()?;
            let budget = Budget {
                max_states,
                max_depth: 10_000,
            };
            let target = to.trim().to_string();
            let found = if target == "stuck" {
                witness_trace(&stmt, a, budget, |c| c.is_stuck())
            } else {
                witness_trace(&stmt, a, budget, move |c| {
                    c.terminal_value()
                        .map(|v| format_outcome(&v) == target)
                        .unwrap_or(false)
                })
            };
            match found {
                Some(trace) => {
                    print!("{}", trace.render());
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("outcome {to:?} not reachable within budget");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Rcu {
            variant,
            runs,
            seed,
            fuel,
            show_program,
        } => {
            let v = RcuVariant::from_name(&variant).ok_or("unknown variant")?;
            if show_program {
                println!("{}", vfront::rcu::build_rcu_source(v));
                return Ok(ExitCode::SUCCESS);
            }
            let summary = campaign(v, runs, seed, fuel);
            print!("{summary}");
            let rules: BTreeSet<&str> =
                summary.stuck_rules().iter().map(|r| r.as_str()).collect();
            if !rules.is_empty() {
                println!("stuck rules: {}", rules.into_iter().collect::<Vec<_>>().join(", "));
            }
            let bad = summary.invariant_failures();
            Ok(if bad == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
