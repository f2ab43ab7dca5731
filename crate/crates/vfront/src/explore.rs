//! Exhaustive enumeration of the reachable configuration graph with
//! canonical-form deduplication, outcome and stuck-report extraction, and
//! witness traces via breadth-first parent pointers.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rayon::prelude::*;

use crate::lang::ast::{Expr, LocExpr, Stmt, Sym, ThreadPath, Value, Var};
use crate::sem::{step, Config, RuleName, StepResult};
use crate::state::{AspectConfig, BufEntry, Buffer};
use crate::syntax::printer::stmt_to_string;

/// Exploration budget. Exhaustion sets `truncated` and returns partial
/// results.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_states: usize,
    pub max_depth: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_states: 5_000_000,
            max_depth: 10_000,
        }
    }
}

/// One explored node: the edge that first discovered it.
#[derive(Debug, Clone)]
pub struct NodeRecord {
    pub parent: Option<(usize, RuleName, ThreadPath, String)>,
    pub depth: usize,
}

#[derive(Debug)]
pub struct ExplorationResult {
    /// Terminal `ret` values of the whole program.
    pub outcomes: BTreeSet<Value>,
    /// Stuck rule names with a witness node each.
    pub stuck_reports: BTreeMap<RuleName, usize>,
    pub state_count: usize,
    pub truncated: bool,
    /// Non-terminal configurations with no successors (should not occur).
    pub wedged: usize,
    /// A witness node per outcome.
    pub terminal_nodes: BTreeMap<Value, usize>,
    nodes: Vec<NodeRecord>,
}

impl ExplorationResult {
    pub fn stuck_reachable(&self) -> bool {
        !self.stuck_reports.is_empty()
    }

    /// The parent-pointer trace to `node`, root first.
    pub fn trace_to(&self, node: usize) -> Trace {
        let mut steps = Vec::new();
        let mut here = node;
        while let Some((p, rule, path, note)) = &self.nodes[here].parent {
            steps.push((*rule, path.clone(), note.clone()));
            here = *p;
        }
        steps.reverse();
        Trace { steps }
    }

    /// Flattened outcome tuples, lexicographically sorted, one per line.
    pub fn outcome_lines(&self) -> Vec<String> {
        self.outcomes.iter().map(format_outcome).collect()
    }
}

/// A replayable step sequence from the initial configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<(RuleName, ThreadPath, String)>,
}

impl Trace {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, (rule, path, note)) in self.steps.iter().enumerate() {
            out.push_str(&format!("step {i}: {rule} @ {path}"));
            if !note.is_empty() {
                out.push_str(&format!(" [{note}]"));
            }
            out.push('\n');
        }
        out
    }
}

/// Prints a terminal value as a flattened tuple: `(0, 5)`, or a bare scalar.
pub fn format_outcome(v: &Value) -> String {
    let flat = v.flatten();
    if flat.len() == 1 {
        return flat[0].to_string();
    }
    let inner: Vec<String> = flat.iter().map(|x| x.to_string()).collect();
    format!("({})", inner.join(", "))
}

/// Renames symbolic values and fresh variables to a normal form determined
/// by first occurrence over (statement, buffers in path order, gamma), and
/// returns the byte-stable canonical key of the configuration.
pub fn canonicalize(c: &Config) -> String {
    let mut r = Renamer::default();
    r.collect_stmt(&c.stmt);
    for buf in c.state.buffers.values() {
        r.collect_buffer(buf);
    }
    for (_, _, s) in &c.state.gamma {
        r.note_sym(*s);
    }
    let stmt = r.apply_stmt(&c.stmt);
    let mut state = c.state.clone();
    let paths: Vec<_> = state.buffers.keys().cloned().collect();
    for p in paths {
        let b = r.apply_buffer(state.buffer(&p));
        state.buffers.insert(p, b);
    }
    state.gamma = state
        .gamma
        .iter()
        .map(|(l, t, s)| (l.clone(), *t, r.sym(*s)))
        .collect();
    format!("stmt: {}\n{}", stmt_to_string(&stmt), state.dump())
}

#[derive(Default)]
struct Renamer {
    syms: BTreeMap<Sym, Sym>,
    vars: BTreeMap<u32, u32>,
}

impl Renamer {
    fn note_sym(&mut self, s: Sym) {
        let next = Sym(self.syms.len() as u32);
        self.syms.entry(s).or_insert(next);
    }

    fn note_var(&mut self, v: &Var) {
        if let Var::Fresh(n) = v {
            let next = self.vars.len() as u32;
            self.vars.entry(*n).or_insert(next);
        }
    }

    fn sym(&self, s: Sym) -> Sym {
        *self.syms.get(&s).unwrap_or(&s)
    }

    fn var(&self, v: &Var) -> Var {
        match v {
            Var::Fresh(n) => Var::Fresh(*self.vars.get(n).unwrap_or(n)),
            named => named.clone(),
        }
    }

    fn collect_expr(&mut self, e: &Expr) {
        match e {
            Expr::Sym(s) => self.note_sym(*s),
            Expr::Var(v) => self.note_var(v),
            Expr::Int(_) | Expr::Null | Expr::Loc(_) => {}
            Expr::Bin(_, a, b) | Expr::Choice(a, b) | Expr::Pair(a, b) => {
                self.collect_expr(a);
                self.collect_expr(b);
            }
            Expr::Fst(a) | Expr::Snd(a) => self.collect_expr(a),
        }
    }

    fn collect_loc(&mut self, l: &LocExpr) {
        match l {
            LocExpr::Sym(s) => self.note_sym(*s),
            LocExpr::Var(v) => self.note_var(v),
            LocExpr::Loc(_) => {}
        }
    }

    fn collect_stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Ret(e) => self.collect_expr(e),
            Stmt::Bind(x, s1, s2) => {
                self.note_var(x);
                self.collect_stmt(s1);
                self.collect_stmt(s2);
            }
            Stmt::Spw(a, b) | Stmt::Par(a, b) => {
                self.collect_stmt(a);
                self.collect_stmt(b);
            }
            Stmt::If(c, a, b) => {
                self.collect_expr(c);
                self.collect_stmt(a);
                self.collect_stmt(b);
            }
            Stmt::Repeat(a) => self.collect_stmt(a),
            Stmt::Read(_, l, _) => self.collect_loc(l),
            Stmt::Write(_, l, e) => {
                self.collect_loc(l);
                self.collect_expr(e);
            }
            Stmt::Cas {
                loc,
                expected,
                desired,
                ..
            } => {
                self.collect_loc(loc);
                self.collect_expr(expected);
                self.collect_expr(desired);
            }
            Stmt::Delete(l) => self.collect_loc(l),
            Stmt::Stuck => {}
        }
    }

    fn collect_buffer(&mut self, b: &Buffer) {
        for e in &b.0 {
            match e {
                BufEntry::Read { sym, loc, .. } => {
                    self.note_sym(*sym);
                    self.collect_loc(loc);
                }
                BufEntry::Write { sym, loc, val, .. } => {
                    self.note_sym(*sym);
                    self.collect_loc(loc);
                    self.collect_expr(val);
                }
                BufEntry::BindE { sym, expr } => {
                    self.note_sym(*sym);
                    self.collect_expr(expr);
                }
                BufEntry::If {
                    sym,
                    cond,
                    then_buf,
                    else_buf,
                } => {
                    self.note_sym(*sym);
                    self.collect_expr(cond);
                    self.collect_buffer(then_buf);
                    self.collect_buffer(else_buf);
                }
            }
        }
    }

    fn apply_expr(&self, e: &Expr) -> Expr {
        match e {
            Expr::Sym(s) => Expr::Sym(self.sym(*s)),
            Expr::Var(v) => Expr::Var(self.var(v)),
            Expr::Int(_) | Expr::Null | Expr::Loc(_) => e.clone(),
            Expr::Bin(op, a, b) => Expr::Bin(
                *op,
                Box::new(self.apply_expr(a)),
                Box::new(self.apply_expr(b)),
            ),
            Expr::Choice(a, b) => Expr::Choice(
                Box::new(self.apply_expr(a)),
                Box::new(self.apply_expr(b)),
            ),
            Expr::Pair(a, b) => Expr::Pair(
                Box::new(self.apply_expr(a)),
                Box::new(self.apply_expr(b)),
            ),
            Expr::Fst(a) => Expr::Fst(Box::new(self.apply_expr(a))),
            Expr::Snd(a) => Expr::Snd(Box::new(self.apply_expr(a))),
        }
    }

    fn apply_loc(&self, l: &LocExpr) -> LocExpr {
        match l {
            LocExpr::Sym(s) => LocExpr::Sym(self.sym(*s)),
            LocExpr::Var(v) => LocExpr::Var(self.var(v)),
            LocExpr::Loc(_) => l.clone(),
        }
    }

    fn apply_stmt(&self, s: &Stmt) -> Stmt {
        match s {
            Stmt::Ret(e) => Stmt::Ret(self.apply_expr(e)),
            Stmt::Bind(x, s1, s2) => Stmt::Bind(
                self.var(x),
                Box::new(self.apply_stmt(s1)),
                Box::new(self.apply_stmt(s2)),
            ),
            Stmt::Spw(a, b) => Stmt::Spw(
                Box::new(self.apply_stmt(a)),
                Box::new(self.apply_stmt(b)),
            ),
            Stmt::Par(a, b) => Stmt::Par(
                Box::new(self.apply_stmt(a)),
                Box::new(self.apply_stmt(b)),
            ),
            Stmt::If(c, a, b) => Stmt::If(
                self.apply_expr(c),
                Box::new(self.apply_stmt(a)),
                Box::new(self.apply_stmt(b)),
            ),
            Stmt::Repeat(a) => Stmt::Repeat(Box::new(self.apply_stmt(a))),
            Stmt::Read(rm, l, annot) => Stmt::Read(*rm, self.apply_loc(l), annot.clone()),
            Stmt::Write(wm, l, e) => Stmt::Write(*wm, self.apply_loc(l), self.apply_expr(e)),
            Stmt::Cas {
                ok,
                fail,
                loc,
                expected,
                desired,
                annot,
            } => Stmt::Cas {
                ok: *ok,
                fail: *fail,
                loc: self.apply_loc(loc),
                expected: self.apply_expr(expected),
                desired: self.apply_expr(desired),
                annot: annot.clone(),
            },
            Stmt::Delete(l) => Stmt::Delete(self.apply_loc(l)),
            Stmt::Stuck => Stmt::Stuck,
        }
    }

    fn apply_buffer(&self, b: &Buffer) -> Buffer {
        Buffer(
            b.0.iter()
                .map(|e| match e {
                    BufEntry::Read {
                        sym,
                        loc,
                        rm,
                        annot,
                    } => BufEntry::Read {
                        sym: self.sym(*sym),
                        loc: self.apply_loc(loc),
                        rm: *rm,
                        annot: annot.clone(),
                    },
                    BufEntry::Write { sym, loc, wm, val } => BufEntry::Write {
                        sym: self.sym(*sym),
                        loc: self.apply_loc(loc),
                        wm: *wm,
                        val: self.apply_expr(val),
                    },
                    BufEntry::BindE { sym, expr } => BufEntry::BindE {
                        sym: self.sym(*sym),
                        expr: self.apply_expr(expr),
                    },
                    BufEntry::If {
                        sym,
                        cond,
                        then_buf,
                        else_buf,
                    } => BufEntry::If {
                        sym: self.sym(*sym),
                        cond: self.apply_expr(cond),
                        then_buf: self.apply_buffer(then_buf),
                        else_buf: self.apply_buffer(else_buf),
                    },
                })
                .collect(),
        )
    }
}

/// Breadth-first closure of `step` from the initial configuration of `stmt`.
pub fn explore(stmt: &Stmt, aspects: AspectConfig, budget: Budget) -> ExplorationResult {
    explore_with(stmt, aspects, budget, |_, _| {})
}

/// `explore` with an instrumentation hook invoked on every discovered edge
/// (parent configuration, step taken).
pub fn explore_with(
    stmt: &Stmt,
    aspects: AspectConfig,
    budget: Budget,
    mut hook: impl FnMut(&Config, &StepResult),
) -> ExplorationResult {
    let init = Config::initial(stmt.clone(), aspects);
    let mut res = ExplorationResult {
        outcomes: BTreeSet::new(),
        stuck_reports: BTreeMap::new(),
        state_count: 1,
        truncated: false,
        wedged: 0,
        terminal_nodes: BTreeMap::new(),
        nodes: vec![NodeRecord {
            parent: None,
            depth: 0,
        }],
    };
    let mut visited: HashMap<String, usize> = HashMap::new();
    visited.insert(canonicalize(&init), 0);
    let mut queue: VecDeque<(Config, usize)> = VecDeque::new();
    queue.push_back((init, 0));

    while let Some((config, idx)) = queue.pop_front() {
        let depth = res.nodes[idx].depth;
        if depth >= budget.max_depth {
            res.truncated = true;
            continue;
        }
        let succs = step(&config);
        if succs.is_empty() {
            classify_terminal(&config, idx, &mut res);
            continue;
        }
        for sr in succs {
            hook(&config, &sr);
            if res.state_count >= budget.max_states {
                res.truncated = true;
                return res;
            }
            insert_successor(sr, idx, depth, &mut visited, &mut queue, &mut res);
        }
    }
    res
}

/// Layer-synchronous parallel exploration; produces the same outcome and
/// stuck sets as the sequential explorer.
pub fn explore_parallel(stmt: &Stmt, aspects: AspectConfig, budget: Budget) -> ExplorationResult {
    let init = Config::initial(stmt.clone(), aspects);
    let mut res = ExplorationResult {
        outcomes: BTreeSet::new(),
        stuck_reports: BTreeMap::new(),
        state_count: 1,
        truncated: false,
        wedged: 0,
        terminal_nodes: BTreeMap::new(),
        nodes: vec![NodeRecord {
            parent: None,
            depth: 0,
        }],
    };
    let mut visited: HashMap<String, usize> = HashMap::new();
    visited.insert(canonicalize(&init), 0);
    let mut frontier: Vec<(Config, usize)> = vec![(init, 0)];
    let mut depth = 0;

    while !frontier.is_empty() {
        if depth >= budget.max_depth {
            res.truncated = true;
            break;
        }
        let expanded: Vec<(usize, Config, Vec<StepResult>)> = frontier
            .into_par_iter()
            .map(|(c, idx)| {
                let s = step(&c);
                (idx, c, s)
            })
            .collect();
        let mut next: VecDeque<(Config, usize)> = VecDeque::new();
        'outer: for (idx, config, succs) in expanded {
            if succs.is_empty() {
                classify_terminal(&config, idx, &mut res);
                continue;
            }
            for sr in succs {
                if res.state_count >= budget.max_states {
                    res.truncated = true;
                    break 'outer;
                }
                insert_successor(sr, idx, depth, &mut visited, &mut next, &mut res);
            }
        }
        frontier = next.into_iter().collect();
        depth += 1;
        if res.truncated {
            break;
        }
    }
    res
}

fn classify_terminal(config: &Config, idx: usize, res: &mut ExplorationResult) {
    if config.is_stuck() {
        return; // recorded on the discovering edge
    }
    match config.terminal_value() {
        Some(v) => {
            res.terminal_nodes.entry(v.clone()).or_insert(idx);
            res.outcomes.insert(v);
        }
        None => res.wedged += 1,
    }
}

fn insert_successor(
    sr: StepResult,
    parent: usize,
    parent_depth: usize,
    visited: &mut HashMap<String, usize>,
    queue: &mut VecDeque<(Config, usize)>,
    res: &mut ExplorationResult,
) {
    let key = canonicalize(&sr.config);
    let idx = match visited.get(&key) {
        Some(&i) => i,
        None => {
            let i = res.nodes.len();
            res.nodes.push(NodeRecord {
                parent: Some((parent, sr.rule, sr.path.clone(), sr.note.to_string())),
                depth: parent_depth + 1,
            });
            visited.insert(key, i);
            res.state_count += 1;
            queue.push_back((sr.config.clone(), i));
            i
        }
    };
    if sr.config.is_stuck() {
        res.stuck_reports.entry(sr.rule).or_insert(idx);
    }
}

/// Searches breadth-first for a terminal configuration satisfying the
/// predicate and returns the discovering trace, if reachable within budget.
pub fn witness_trace(
    stmt: &Stmt,
    aspects: AspectConfig,
    budget: Budget,
    pred: impl Fn(&Config) -> bool,
) -> Option<Trace> {
    let init = Config::initial(stmt.clone(), aspects);
    if pred(&init) && step(&init).is_empty() {
        return Some(Trace { steps: Vec::new() });
    }
    let mut nodes: Vec<NodeRecord> = vec![NodeRecord {
        parent: None,
        depth: 0,
    }];
    let mut visited: HashMap<String, usize> = HashMap::new();
    visited.insert(canonicalize(&init), 0);
    let mut queue: VecDeque<(Config, usize)> = VecDeque::new();
    queue.push_back((init, 0));
    while let Some((config, idx)) = queue.pop_front() {
        let depth = nodes[idx].depth;
        if depth >= budget.max_depth || nodes.len() >= budget.max_states {
            return None;
        }
        for sr in step(&config) {
            let key = canonicalize(&sr.config);
            if visited.contains_key(&key) {
                continue;
            }
            let i = nodes.len();
            nodes.push(NodeRecord {
                parent: Some((idx, sr.rule, sr.path.clone(), sr.note.to_string())),
                depth: depth + 1,
            });
            visited.insert(key, i);
            let terminal = step(&sr.config).is_empty();
            if terminal && pred(&sr.config) {
                let mut steps = Vec::new();
                let mut here = i;
                while let Some((p, rule, path, note)) = &nodes[here].parent {
                    steps.push((*rule, path.clone(), note.clone()));
                    here = *p;
                }
                steps.reverse();
                return Some(Trace { steps });
            }
            queue.push_back((sr.config, i));
        }
    }
    None
}
