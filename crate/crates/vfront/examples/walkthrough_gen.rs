use vfront::sem::{step, Config, RuleName};
use vfront::state::AspectConfig;
use vfront::syntax::parse;

fn take(c: &Config, rule: RuleName, path: &str, at: Option<(&str, u32)>) -> Config {
    let succs = step(c);
    let matches: Vec<_> = succs
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
    assert_eq!(matches.len(), 1, "ambiguous or missing {rule} @ {path} {at:?}");
    matches.into_iter().next().unwrap().config
}

fn main() {
    let src = "
        [f]_na := 0; [d]_na := 0;
        spw { [d]_na := 5; [f]_rel := 1; ret 0 }
            { repeat [f]_acq end; r = [d]_na; ret r }";
    let stmt = parse(src).unwrap();
    let mut c = Config::initial(stmt, AspectConfig::base().with_na());
    let show = |label: &str, c: &Config| {
        println!("=== {label} ===");
        print!("{}", c.state.dump());
    };
    show("T1 initial", &c);
    use RuleName::*;
    c = take(&c, WriteNa, ".", None);
    c = take(&c, Subst, ".", None);
    c = take(&c, WriteNa, ".", None);
    c = take(&c, Subst, ".", None);
    show("T2 after inits", &c);
    c = take(&c, Spawn, ".", None);
    show("T3 after spawn", &c);
    c = take(&c, WriteNa, "L", None);
    c = take(&c, Subst, "L", None);
    show("T4 after d:=5", &c);
    c = take(&c, WriteRel, "L", None);
    c = take(&c, Subst, "L", None);
    show("T5 after f:=1 rel", &c);
    c = take(&c, RepeatUnroll, "R", None);
    c = take(&c, ReadAcq, "R", Some(("f", 1)));
    c = take(&c, Subst, "R", None);
    c = take(&c, IfTrue, "R", None);
    c = take(&c, Subst, "R", None);
    show("T6 after acquire-read of (f,1)", &c);
    c = take(&c, ReadNa, "R", Some(("d", 1)));
    c = take(&c, Subst, "R", None);
    c = take(&c, Join, ".", None);
    show("T7 after read of d and join", &c);
    println!("terminal: {:?}", c.terminal_value().map(|v| v.to_string()));
}
