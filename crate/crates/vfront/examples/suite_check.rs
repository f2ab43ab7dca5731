use std::time::Instant;
use vfront::litmus::{check_test, load_suite, Verdict};
use vfront::explore::Budget;

fn main() {
    let mut failed = 0;
    for t in load_suite(None) {
        let start = Instant::now();
        let (verdict, result) = check_test(&t, Budget::default());
        let dt = start.elapsed().as_secs_f64();
        match verdict {
            Verdict::Pass => println!("PASS {:<22} states={:<7} {:.2}s", t.name, result.state_count, dt),
            Verdict::Truncated => { println!("TRUNC {:<22} states={} {:.2}s", t.name, result.state_count, dt); failed += 1; }
            Verdict::Fail { missing, unexpected, stuck_expected, stuck_observed } => {
                failed += 1;
                println!("FAIL {:<22} states={:<7} {:.2}s", t.name, result.state_count, dt);
                if !missing.is_empty() { println!("   missing:    {missing:?}"); }
                if !unexpected.is_empty() { println!("   unexpected: {unexpected:?}"); }
                if stuck_expected != stuck_observed {
                    println!("   stuck: expected {stuck_expected}, observed {stuck_observed} ({:?})", result.stuck_reports.keys().collect::<Vec<_>>());
                }
            }
        }
    }
    println!("{failed} failures");
}
