use super::{Formula, Term};
use std::collections::{BTreeMap, BTreeSet};

/// Simultaneous substitution of terms for variables.
pub type Bindings = BTreeMap<String, Term>;

/// A variable name built from `base` that is not in `avoid`.
pub fn fresh_var(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded")
}

fn subst_term(t: &Term, b: &Bindings) -> Term {
    match t {
        Term::Var(v) => b.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| subst_term(a, b)).collect()),
    }
}

/// Capture-avoiding simultaneous substitution. Bound variables that would
/// capture a variable of an inserted term are renamed.
pub fn substitute(f: &Formula, b: &Bindings) -> Formula {
    if b.is_empty() {
        return f.clone();
    }
    match f {
        Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| subst_term(a, b)).collect()),
        Formula::Not(g) => Formula::not(substitute(g, b)),
        Formula::And(l, r) => Formula::and(substitute(l, b), substitute(r, b)),
        Formula::Or(l, r) => Formula::or(substitute(l, b), substitute(r, b)),
        Formula::Implies(l, r) => Formula::implies(substitute(l, b), substitute(r, b)),
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let mut inner = b.clone();
            inner.remove(v);
            // only bindings that actually reach a free occurrence matter
            inner.retain(|k, _| g.has_free(k));
            let mut incoming = BTreeSet::new();
            for t in inner.values() {
                t.vars(&mut incoming);
            }
            let (v2, body) = if incoming.contains(v) {
                let mut avoid = incoming.clone();
                avoid.extend(g.all_vars());
                avoid.extend(inner.keys().cloned());
                let nv = fresh_var(v, &avoid);
                inner.insert(v.clone(), Term::var(nv.clone()));
                (nv, substitute(g, &inner))
            } else {
                (v.clone(), substitute(g, &inner))
            };
            if matches!(f, Formula::Forall(..)) {
                Formula::forall(v2, body)
            } else {
                Formula::exists(v2, body)
            }
        }
    }
}

fn term_eq(a: &Term, b: &Term, env: &[(String, String)]) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            let lx = env.iter().rposition(|(l, _)| l == x);
            let ly = env.iter().rposition(|(_, r)| r == y);
            match (lx, ly) {
                (None, None) => x == y,
                (Some(i), Some(j)) => i == j,
                _ => false,
            }
        }
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, env))
        }
        _ => false,
    }
}

fn alpha(a: &Formula, b: &Formula, env: &mut Vec<(String, String)>) -> bool {
    use Formula::*;
    match (a, b) {
        (Atom(p, xs), Atom(q, ys)) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(x, y, env))
        }
        (Not(x), Not(y)) => alpha(x, y, env),
        (And(a1, a2), And(b1, b2)) | (Or(a1, a2), Or(b1, b2)) | (Implies(a1, a2), Implies(b1, b2)) => {
            alpha(a1, b1, env) && alpha(a2, b2, env)
        }
        (Forall(x, g), Forall(y, h)) | (Exists(x, g), Exists(y, h)) => {
            env.push((x.clone(), y.clone()));
            let r = alpha(g, h, env);
            env.pop();
            r
        }
        _ => false,
    }
}

/// Equality up to renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha(a, b, &mut Vec::new())
}

fn match_term(
    p: &Term,
    t: &Term,
    vars: &BTreeSet<String>,
    env: &[(String, String)],
    b: &mut Bindings,
) -> bool {
    match p {
        Term::Var(x) => {
            if let Some(i) = env.iter().rposition(|(l, _)| l == x) {
                return matches!(t, Term::Var(y) if env.iter().rposition(|(_, r)| r == y) == Some(i));
            }
            let mut tv = BTreeSet::new();
            t.vars(&mut tv);
            if tv.iter().any(|v| env.iter().any(|(_, r)| r == v)) {
                return false;
            }
            if vars.contains(x) {
                match b.get(x) {
                    Some(prev) => prev == t,
                    None => {
                        b.insert(x.clone(), t.clone());
                        true
                    }
                }
            } else {
                matches!(t, Term::Var(y) if y == x)
            }
        }
        Term::App(f, ps) => match t {
            Term::App(g, ts) if f == g && ps.len() == ts.len() => {
                ps.iter().zip(ts).all(|(p, t)| match_term(p, t, vars, env, b))
            }
            _ => false,
        },
    }
}

fn match_rec(p: &Formula, t: &Formula, vars: &BTreeSet<String>, env: &mut Vec<(String, String)>, b: &mut Bindings) -> bool {
    use Formula::*;
    match (p, t) {
        (Atom(f, ps), Atom(g, ts)) => {
            f == g && ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, t)| match_term(p, t, vars, env, b))
        }
        (Not(x), Not(y)) => match_rec(x, y, vars, env, b),
        (And(a1, a2), And(b1, b2)) | (Or(a1, a2), Or(b1, b2)) | (Implies(a1, a2), Implies(b1, b2)) => {
            match_rec(a1, b1, vars, env, b) && match_rec(a2, b2, vars, env, b)
        }
        (Forall(x, g), Forall(y, h)) | (Exists(x, g), Exists(y, h)) => {
            env.push((x.clone(), y.clone()));
            let r = match_rec(g, h, vars, env, b);
            env.pop();
            r
        }
        _ => false,
    }
}

/// One-way matching: extend `b` so that `substitute(pattern, b)` is alpha-equal
/// to `target`. Only free occurrences of `vars` in `pattern` may be bound.
/// On failure `b` may hold partial bindings.
pub fn match_formula(pattern: &Formula, target: &Formula, vars: &BTreeSet<String>, b: &mut Bindings) -> bool {
    match_rec(pattern, target, vars, &mut Vec::new(), b)
}
