//! Expression evaluation.
//!
//! `eval_expr` is the set-valued evaluator: `choice` contributes both
//! branches, a symbolic operand makes the result `Unresolved`, and division
//! or modulo by zero (or ill-typed arithmetic) is a stuck-signaling outcome.
//! The step relation resolves `choice` through explicit reduction steps and
//! then uses the deterministic `eval_closed` on choice-free expressions.

use std::collections::BTreeSet;

use crate::lang::ast::{BinOp, Expr, Value};

/// Result of set-valued evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalResult {
    /// Every value the expression may evaluate to.
    Values(BTreeSet<Value>),
    /// The expression mentions a symbolic value.
    Unresolved,
    /// Division/modulo by zero or an ill-typed operation.
    Stuck,
}

/// The expression as a value, if it already is one.
pub fn as_value(e: &Expr) -> Option<Value> {
    match e {
        Expr::Int(n) => Some(Value::Int(*n)),
        Expr::Loc(l) => Some(Value::Loc(l.clone())),
        Expr::Null => Some(Value::Null),
        Expr::Pair(a, b) => Some(Value::pair(as_value(a)?, as_value(b)?)),
        _ => None,
    }
}

/// Fully reduced modulo symbols: values, symbols, and pairs thereof. Such
/// expressions substitute directly for bind variables.
pub fn is_reduced(e: &Expr) -> bool {
    match e {
        Expr::Int(_) | Expr::Loc(_) | Expr::Null | Expr::Sym(_) => true,
        Expr::Pair(a, b) => is_reduced(a) && is_reduced(b),
        _ => false,
    }
}

pub fn mentions_sym(e: &Expr) -> bool {
    match e {
        Expr::Sym(_) => true,
        Expr::Int(_) | Expr::Loc(_) | Expr::Null | Expr::Var(_) => false,
        Expr::Bin(_, a, b) | Expr::Choice(a, b) | Expr::Pair(a, b) => {
            mentions_sym(a) || mentions_sym(b)
        }
        Expr::Fst(a) | Expr::Snd(a) => mentions_sym(a),
    }
}

pub fn has_choice(e: &Expr) -> bool {
    match e {
        Expr::Choice(_, _) => true,
        Expr::Int(_) | Expr::Loc(_) | Expr::Null | Expr::Var(_) | Expr::Sym(_) => false,
        Expr::Bin(_, a, b) | Expr::Pair(a, b) => has_choice(a) || has_choice(b),
        Expr::Fst(a) | Expr::Snd(a) => has_choice(a),
    }
}

fn apply_binop(op: BinOp, a: &Value, b: &Value) -> Option<Value> {
    use BinOp::*;
    match op {
        Eq | Ne => {
            let eq = a == b;
            let is = if op == Eq { eq } else { !eq };
            Some(Value::Int(if is { 1 } else { 0 }))
        }
        _ => {
            let (Value::Int(x), Value::Int(y)) = (a, b) else {
                return None;
            };
            let r = match op {
                Add => x.checked_add(*y)?,
                Sub => x.checked_sub(*y)?,
                Mul => x.checked_mul(*y)?,
                Div => {
                    if *y == 0 {
                        return None;
                    }
                    x.checked_div(*y)?
                }
                Mod => {
                    if *y == 0 {
                        return None;
                    }
                    x.checked_rem(*y)?
                }
                Lt => return Some(Value::Int(if x < y { 1 } else { 0 })),
                Le => return Some(Value::Int(if x <= y { 1 } else { 0 })),
                Gt => return Some(Value::Int(if x > y { 1 } else { 0 })),
                Ge => return Some(Value::Int(if x >= y { 1 } else { 0 })),
                Eq | Ne => unreachable!(),
            };
            Some(Value::Int(r))
        }
    }
}

/// Set-valued evaluation: the set of values `e` may take, `Unresolved` if it
/// mentions a symbolic value, `Stuck` on arithmetic undefined behavior.
/// A free local variable cannot be evaluated and is reported as `Stuck`
/// (substitution precedes evaluation in the machine).
pub fn eval_expr(e: &Expr) -> EvalResult {
    if mentions_sym(e) {
        return EvalResult::Unresolved;
    }
    fn go(e: &Expr) -> Result<BTreeSet<Value>, ()> {
        match e {
            Expr::Int(n) => Ok([Value::Int(*n)].into()),
            Expr::Loc(l) => Ok([Value::Loc(l.clone())].into()),
            Expr::Null => Ok([Value::Null].into()),
            Expr::Var(_) | Expr::Sym(_) => Err(()),
            Expr::Choice(a, b) => {
                let mut s = go(a)?;
                s.extend(go(b)?);
                Ok(s)
            }
            Expr::Pair(a, b) => {
                let sa = go(a)?;
                let sb = go(b)?;
                let mut out = BTreeSet::new();
                for x in &sa {
                    for y in &sb {
                        out.insert(Value::pair(x.clone(), y.clone()));
                    }
                }
                Ok(out)
            }
            Expr::Fst(a) => {
                let mut out = BTreeSet::new();
                for v in go(a)? {
                    match v {
                        Value::Pair(x, _) => {
                            out.insert(*x);
                        }
                        _ => return Err(()),
                    }
                }
                Ok(out)
            }
            Expr::Snd(a) => {
                let mut out = BTreeSet::new();
                for v in go(a)? {
                    match v {
                        Value::Pair(_, y) => {
                            out.insert(*y);
                        }
                        _ => return Err(()),
                    }
                }
                Ok(out)
            }
            Expr::Bin(op, a, b) => {
                let sa = go(a)?;
                let sb = go(b)?;
                let mut out = BTreeSet::new();
                for x in &sa {
                    for y in &sb {
                        match apply_binop(*op, x, y) {
                            Some(v) => {
                                out.insert(v);
                            }
                            None => return Err(()),
                        }
                    }
                }
                Ok(out)
            }
        }
    }
    match go(e) {
        Ok(vs) => EvalResult::Values(vs),
        Err(()) => EvalResult::Stuck,
    }
}

/// Deterministic evaluation of a choice-free, symbol-free expression.
pub fn eval_closed(e: &Expr) -> Option<Value> {
    debug_assert!(!has_choice(e) && !mentions_sym(e));
    match eval_expr(e) {
        EvalResult::Values(vs) if vs.len() == 1 => vs.into_iter().next(),
        _ => None,
    }
}

/// Constant-folds as much of `e` as possible without resolving symbols:
/// arithmetic on literals, selectors on pair literals. Choice nodes are left
/// alone (explicit reduction steps pick a branch).
pub fn normalize(e: &Expr) -> Expr {
    match e {
        Expr::Bin(op, a, b) => {
            let a = normalize(a);
            let b = normalize(b);
            if let (Some(x), Some(y)) = (as_value(&a), as_value(&b)) {
                if let Some(v) = apply_binop(*op, &x, &y) {
                    return v.to_expr();
                }
            }
            Expr::Bin(*op, Box::new(a), Box::new(b))
        }
        Expr::Pair(a, b) => Expr::Pair(Box::new(normalize(a)), Box::new(normalize(b))),
        Expr::Fst(a) => {
            let a = normalize(a);
            if let Expr::Pair(x, _) = &a {
                if is_reduced(x) {
                    return (**x).clone();
                }
            }
            Expr::Fst(Box::new(a))
        }
        Expr::Snd(a) => {
            let a = normalize(a);
            if let Expr::Pair(_, y) = &a {
                if is_reduced(y) {
                    return (**y).clone();
                }
            }
            Expr::Snd(Box::new(a))
        }
        Expr::Choice(a, b) => Expr::Choice(Box::new(normalize(a)), Box::new(normalize(b))),
        _ => e.clone(),
    }
}
