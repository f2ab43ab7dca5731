//! Benchmarks: single-step successor computation, exhaustive exploration of
//! characteristic litmus tests, and one randomized RCU run.

use criterion::{criterion_group, criterion_main, Criterion};

use vfront::explore::{explore, Budget};
use vfront::litmus::load_suite;
use vfront::random::random_run;
use vfront::rcu::{build_rcu, rcu_aspects, RcuVariant};
use vfront::sem::{step, Config};
use vfront::syntax::parse;

fn bench_step(c: &mut Criterion) {
    let t = load_suite(Some("LB_rlx")).remove(0);
    let stmt = parse(&t.program).unwrap();
    let init = Config::initial(stmt, t.aspects);
    // a configuration in the thick of exploration: after spawn
    let mut config = init;
    loop {
        let succs = step(&config);
        let spawned = succs
            .iter()
            .find(|s| s.rule == vfront::sem::RuleName::Spawn)
            .cloned();
        match spawned {
            Some(s) => {
                config = s.config;
                break;
            }
            None => config = succs.into_iter().next().unwrap().config,
        }
    }
    c.bench_function("step/LB_rlx_post_spawn", |b| {
        b.iter(|| step(std::hint::black_box(&config)))
    });
}

fn bench_explore(c: &mut Criterion) {
    for name in ["SB_rel+acq", "SE_simple", "MP_rel+acq+na"] {
        let t = load_suite(Some(name)).remove(0);
        let stmt = parse(&t.program).unwrap();
        c.bench_function(&format!("explore/{name}"), |b| {
            b.iter(|| explore(std::hint::black_box(&stmt), t.aspects, Budget::default()))
        });
    }
}

fn bench_random_rcu(c: &mut Criterion) {
    let stmt = build_rcu(RcuVariant::NoSyncLoops);
    let aspects = rcu_aspects();
    let mut group = c.benchmark_group("random");
    group.sample_size(10);
    group.bench_function("rcu_no_sync_loops_run", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            random_run(std::hint::black_box(&stmt), aspects, seed, 12_000)
        })
    });
    group.finish();
}

criterion_group!(benches, bench_step, bench_explore, bench_random_rcu);
criterion_main!(benches);
