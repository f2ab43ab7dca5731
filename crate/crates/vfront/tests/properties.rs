//! Property suites for the core algebra: front lattice laws, substitution,
//! decomposition round trips, evaluation, canonicalization invariance and
//! parse/print fixpoints.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{random_program, random_walk};
use vfront::explore::canonicalize;
use vfront::lang::ast::{BinOp, Expr, Loc, Tau, Value, Var};
use vfront::lang::context::decompose;
use vfront::lang::eval::{eval_expr, EvalResult};
use vfront::lang::subst::subst_stmt_var;
use vfront::sem::{Config, RuleName};
use vfront::state::{AspectConfig, Front};
use vfront::syntax::printer::stmt_to_string;
use vfront::syntax::parse;
use vfront::Stmt;

fn front_strategy() -> impl Strategy<Value = Front> {
    proptest::collection::btree_map(0u8..6, 0u32..5, 0..5).prop_map(|m| {
        m.into_iter()
            .map(|(l, t)| (Loc::new(&format!("l{l}")), t as Tau))
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn front_join_commutative(a in front_strategy(), b in front_strategy()) {
        prop_assert_eq!(a.join(&b), b.join(&a));
    }

    #[test]
    fn front_join_associative(
        a in front_strategy(),
        b in front_strategy(),
        c in front_strategy()
    ) {
        prop_assert_eq!(a.join(&b.join(&c)), a.join(&b).join(&c));
    }

    #[test]
    fn front_join_idempotent_with_identity(a in front_strategy()) {
        prop_assert_eq!(a.join(&a), a.clone());
        prop_assert_eq!(a.join(&Front::bottom()), a.clone());
        prop_assert_eq!(Front::bottom().join(&a), a);
    }
}

fn closed_expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-4i64..10).prop_map(Expr::Int),
        Just(Expr::Null),
        prop_oneof![Just("x"), Just("y")].prop_map(|l| Expr::Loc(Loc::new(l))),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (
                prop_oneof![
                    Just(BinOp::Add),
                    Just(BinOp::Sub),
                    Just(BinOp::Mul),
                    Just(BinOp::Div),
                    Just(BinOp::Mod),
                    Just(BinOp::Eq),
                    Just(BinOp::Ne),
                    Just(BinOp::Lt),
                    Just(BinOp::Ge),
                ],
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Expr::Bin(op, Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Choice(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Pair(Box::new(a), Box::new(b))),
        ]
    })
}

fn has_choice(e: &Expr) -> bool {
    match e {
        Expr::Choice(..) => true,
        Expr::Bin(_, a, b) | Expr::Pair(a, b) => has_choice(a) || has_choice(b),
        Expr::Fst(a) | Expr::Snd(a) => has_choice(a),
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Choice-free, symbol-free expressions evaluate to exactly one value
    /// (or signal stuck), never to an empty or plural set.
    #[test]
    fn eval_closed_choice_free_is_singleton(e in closed_expr_strategy()) {
        match eval_expr(&e) {
            EvalResult::Values(vs) => {
                if !has_choice(&e) {
                    prop_assert_eq!(vs.len(), 1);
                } else {
                    prop_assert!(!vs.is_empty());
                }
            }
            EvalResult::Stuck => {}
            EvalResult::Unresolved => prop_assert!(false, "closed expr cannot be unresolved"),
        }
    }

    /// Printed expressions re-parse to the same tree.
    #[test]
    fn expr_print_parse_round_trip(e in closed_expr_strategy()) {
        let s = Stmt::Ret(e);
        let printed = stmt_to_string(&s);
        let back = parse(&printed).unwrap();
        prop_assert_eq!(back, s);
    }
}

/// parse . print . parse == parse on generated programs (the printer is a
/// fixpoint modulo the first parse).
#[test]
fn program_round_trip_on_generated_sources() {
    for seed in 0..300 {
        let src = random_program(seed);
        let ast = parse(&src).unwrap_or_else(|e| panic!("{src}: {e}"));
        let printed = stmt_to_string(&ast);
        let back =
            parse(&printed).unwrap_or_else(|e| panic!("reparse failed: {e}\n{printed}"));
        assert_eq!(back, ast, "{printed}");
    }
}

/// Substitution leaves terms without the variable untouched (idempotence on
/// absence) and respects rebinding, checked against a small enumeration.
#[test]
fn substitution_respects_shadowing() {
    let x = Var::named("x");
    let payload = Expr::Int(5);
    // bodies that mention x freely
    let open_bodies = [
        "ret x",
        "[p]_rlx := x",
        "if x then ret x else ret 0 fi",
        "r = x + 1; ret r",
    ];
    for body in open_bodies {
        let inner = parse(&format!("x = [p]_rlx; {body}")).unwrap();
        let Stmt::Bind(_, _, shadowed) = &inner else {
            panic!()
        };
        // substituting through the rebinding bind leaves the body intact
        let whole = subst_stmt_var(&inner, &x, &payload);
        let Stmt::Bind(_, _, after) = &whole else { panic!() };
        assert_eq!(after, shadowed, "{body}");
    }
    // without rebinding the substitution eliminates every free occurrence
    // (extract the bind body so `x` is a local, not a location)
    let Stmt::Bind(_, _, open) = parse("x = [p]_rlx; if x then ret x else ret 0 fi").unwrap()
    else {
        panic!()
    };
    let closed = subst_stmt_var(&open, &x, &payload);
    assert_eq!(closed, parse("if 5 then ret 5 else ret 0 fi").unwrap());
    // idempotent when absent
    let absent = parse("ret (1, 2)").unwrap();
    assert_eq!(subst_stmt_var(&absent, &x, &payload), absent);
}

/// Along random walks of random programs: every decomposition plugs back to
/// the original statement, and (thread path, speculation trail) identifies
/// decompositions uniquely.
#[test]
fn decompose_round_trip_and_position_injectivity() {
    let mut checked = 0usize;
    for seed in 0..40 {
        let src = random_program(seed);
        let stmt = parse(&src).unwrap();
        let config = Config::initial(stmt, AspectConfig::full());
        random_walk(config, seed, 60, |parent, _| {
            let ds = decompose(&parent.stmt);
            let mut positions = BTreeSet::new();
            for (ctx, redex) in &ds {
                assert_eq!(&ctx.plug(redex.clone()), &parent.stmt);
                let key = (ctx.path(), ctx.spec_trail());
                assert!(
                    positions.insert(key),
                    "duplicate decomposition position in {}",
                    stmt_to_string(&parent.stmt)
                );
            }
            checked += ds.len();
        });
    }
    assert!(checked > 1000, "exercised only {checked} decompositions");
}

/// Two alpha-equivalent routes to the same buffered configuration get the
/// same canonical key, and keys are stable across repeated computation.
#[test]
fn canonicalize_renaming_invariance() {
    let src = "
        [x]_rlx := 0;
        spw { r1 = [x]_rlx; ret r1 } { r2 = [x]_rlx; ret r2 }";
    let stmt = parse(src).unwrap();
    let init = Config::initial(stmt, AspectConfig::base().with_po());
    // drive to the spawned state
    let mut c = init;
    loop {
        let succs = vfront::sem::step(&c);
        let spawn = succs.iter().find(|s| s.rule == RuleName::Spawn);
        match spawn {
            Some(s) => {
                c = s.config.clone();
                break;
            }
            None => c = succs.into_iter().next().unwrap().config,
        }
    }
    // postpone left then right, and right then left: symbol numbers swap
    let post = |c: &Config, path: &str| {
        vfront::sem::step(c)
            .into_iter()
            .find(|s| s.rule == RuleName::ReadPostpone && s.path.to_string() == path)
            .expect("postpone step")
            .config
    };
    let lr = post(&post(&c, "L"), "R");
    let rl = post(&post(&c, "R"), "L");
    assert_ne!(lr, rl, "raw configurations differ in symbol numbering");
    assert_eq!(canonicalize(&lr), canonicalize(&rl));
    assert_eq!(canonicalize(&lr), canonicalize(&lr));
}

/// Distinct front contents give distinct keys.
#[test]
fn canonicalize_distinguishes_states() {
    let a = Config::initial(parse("ret 0").unwrap(), AspectConfig::base());
    let mut b = a.clone();
    b.state
        .read_fronts
        .insert(Default::default(), Front::singleton(&Loc::new("x"), 1));
    // make the front reference a real entry so the config is well formed
    b.state.history.append(
        &Loc::new("x"),
        vfront::state::HistEntry {
            value: Value::Int(0),
            front: Front::bottom(),
        },
    );
    b.state.history.append(
        &Loc::new("x"),
        vfront::state::HistEntry {
            value: Value::Int(1),
            front: Front::bottom(),
        },
    );
    assert_ne!(canonicalize(&a), canonicalize(&b));
}

/// The spec's spawn/join algebra: spawning and immediately joining (with
/// empty buffers) restores the parent's read front exactly.
#[test]
fn spawn_join_restores_front() {
    let src = "[x]_rel := 3; spw { ret 1 } { ret 2 }";
    let stmt = parse(src).unwrap();
    let mut c = Config::initial(stmt, AspectConfig::base());
    let before_spawn;
    loop {
        let succs = vfront::sem::step(&c);
        if let Some(s) = succs.iter().find(|s| s.rule == RuleName::Spawn) {
            before_spawn = c.state.read_front(&Default::default()).clone();
            c = s.config.clone();
            break;
        }
        c = succs.into_iter().next().unwrap().config;
    }
    loop {
        let succs = vfront::sem::step(&c);
        if succs.is_empty() {
            break;
        }
        c = succs.into_iter().next().unwrap().config;
    }
    assert_eq!(c.state.read_front(&Default::default()), &before_spawn);
    assert_eq!(c.terminal_value(), Some(Value::pair(Value::Int(1), Value::Int(2))));
}
