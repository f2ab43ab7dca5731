//! Shared helpers for the integration and acceptance suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vfront::sem::{step, Config, RuleName};

/// Takes the unique successor matching the rule, thread path, and (when
/// given) the history coordinate read or written. Panics if the step is
/// ambiguous or missing, so scripted traces stay deterministic.
#[allow(dead_code)]
pub fn take(c: &Config, rule: RuleName, path: &str, at: Option<(&str, u32)>) -> Config {
    let succs = step(c);
    let mut matches: Vec<_> = succs
        .into_iter()
        .filter(|sr| {
            sr.rule == rule
                && sr.path.to_string() == path
                && match at {
                    None => true,
                    Some((loc, tau)) => {
                        let read_hit = sr
                            .note
                            .read
                            .as_ref()
                            .map(|(l, t, _)| (l.as_str(), *t) == (loc, tau))
                            .unwrap_or(false);
                        let write_hit = sr
                            .note
                            .wrote
                            .as_ref()
                            .map(|(l, t)| (l.as_str(), *t) == (loc, tau))
                            .unwrap_or(false);
                        read_hit || write_hit
                    }
                }
        })
        .collect();
    assert_eq!(
        matches.len(),
        1,
        "ambiguous or missing scripted step {rule} @ {path} {at:?}"
    );
    matches.pop().unwrap().config
}

/// A small random program over a few shared locations: initialization
/// writes followed by two spawned threads of mixed accesses. Always parses;
/// termination is irrelevant because consumers walk it with bounded fuel.
#[allow(dead_code)]
pub fn random_program(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let locs = ["x", "y", "z"];
    let wmods = ["sc", "rel", "rlx", "na"];
    let rmods = ["sc", "acq", "con", "rlx", "na"];
    let mut src = String::new();
    for l in locs {
        src.push_str(&format!(
            "[{l}]_{} := 0; ",
            wmods[rng.gen_range(0..wmods.len())]
        ));
    }
    let mut thread = |rng: &mut ChaCha8Rng, tid: usize| {
        let mut body = String::new();
        let n = rng.gen_range(1..4);
        for i in 0..n {
            let l = locs[rng.gen_range(0..locs.len())];
            match rng.gen_range(0..6) {
                0 => body.push_str(&format!(
                    "[{l}]_{} := {}; ",
                    wmods[rng.gen_range(0..wmods.len())],
                    rng.gen_range(0..3)
                )),
                1 => body.push_str(&format!(
                    "v{tid}{i} = [{l}]_{}; ",
                    rmods[rng.gen_range(0..rmods.len())]
                )),
                2 => body.push_str(&format!(
                    "v{tid}{i} = cas_{{{},{}}}({l}, {}, {}); ",
                    ["sc", "relAcq", "rel", "acq", "rlx"][rng.gen_range(0..5)],
                    ["sc", "acq", "rlx"][rng.gen_range(0..3)],
                    rng.gen_range(0..2),
                    rng.gen_range(0..3)
                )),
                3 => body.push_str(&format!(
                    "c{tid}{i} = [{l}]_{}; if c{tid}{i} then [{l}]_rlx := 2 else ret 0 fi; ",
                    rmods[rng.gen_range(0..rmods.len())]
                )),
                4 => body.push_str(&format!(
                    "b{tid}{i} = {} + choice 0 1; ",
                    rng.gen_range(0..2)
                )),
                _ => body.push_str(&format!(
                    "[{l}]_{} := choice 1 2; ",
                    wmods[rng.gen_range(0..wmods.len())]
                )),
            }
        }
        body.push_str("ret 0");
        body
    };
    let t1 = thread(&mut rng, 1);
    let t2 = thread(&mut rng, 2);
    src.push_str(&format!("spw {{ {t1} }} {{ {t2} }}"));
    src
}

/// Deterministic uniform walk over the step relation, invoking the checker
/// on every (parent, step) edge along the chosen path and counting steps.
#[allow(dead_code)]
pub fn random_walk(
    config: Config,
    seed: u64,
    max_steps: usize,
    mut check: impl FnMut(&Config, &vfront::sem::StepResult),
) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = config;
    let mut steps = 0;
    while steps < max_steps {
        let succs = step(&c);
        if succs.is_empty() {
            break;
        }
        for sr in &succs {
            check(&c, sr);
        }
        let pick = rng.gen_range(0..succs.len());
        c = succs.into_iter().nth(pick).unwrap().config;
        steps += 1;
        if c.is_stuck() {
            break;
        }
    }
    steps
}
