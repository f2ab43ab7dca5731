use std::time::Instant;
use vfront::litmus::load_suite;
use vfront::random::random_run;
use vfront::syntax::parse;

fn main() {
    let mut total = 0.0;
    for t in load_suite(None) {
        let stmt = parse(&t.program).unwrap();
        let start = Instant::now();
        let n = 200;
        for seed in 0..n {
            let _ = random_run(&stmt, t.aspects, seed, 100_000);
        }
        let dt = start.elapsed().as_secs_f64();
        total += dt;
        if dt > 0.5 {
            println!("{:<22} {n} runs in {:.2}s ({:.2} ms/run)", t.name, dt, dt * 1000.0 / n as f64);
        }
    }
    println!("total for 200 runs x 42 programs: {total:.1}s -> est for 1e4 runs: {:.0}s", total * 50.0);
}
