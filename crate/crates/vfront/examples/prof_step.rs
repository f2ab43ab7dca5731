use std::time::Instant;
use vfront::litmus::load_suite;
use vfront::sem::{step, Config};
use vfront::explore::canonicalize;
use vfront::syntax::parse;

fn main() {
    // measure step() vs canonicalize() on configurations along a run
    let t = load_suite(Some("SE_nested")).remove(0);
    let stmt = parse(&t.program).unwrap();
    let mut c = Config::initial(stmt, t.aspects);
    let mut step_time = 0.0;
    let mut canon_time = 0.0;
    let mut canon_count = 0;
    for _ in 0..200 {
        let s0 = Instant::now();
        let succs = step(&c);
        step_time += s0.elapsed().as_secs_f64();
        if succs.is_empty() { break; }
        let s1 = Instant::now();
        for sr in &succs {
            let _ = canonicalize(&sr.config);
            canon_count += 1;
        }
        canon_time += s1.elapsed().as_secs_f64();
        c = succs.into_iter().next().unwrap().config;
    }
    println!("step total: {:.4}s, canonicalize total: {:.4}s over {} keys", step_time, canon_time, canon_count);
}
