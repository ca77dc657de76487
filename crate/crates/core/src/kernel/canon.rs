//! Comparison modulo `&`/`|` associativity and commutativity, `~~`,
//! the negated-quantifier view and bound-variable names.

use crate::formula::{Formula, Term};

/// Normal form used by [`equiv`]. Bound variables become `#k` (binding depth),
/// `&`/`|` chains become sorted multisets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Canon {
    Atom(String, Vec<Term>),
    Not(Box<Canon>),
    And(Vec<Canon>),
    Or(Vec<Canon>),
    Imp(Box<Canon>, Box<Canon>),
    All(Box<Canon>),
    Ex(Box<Canon>),
}

fn term(t: &Term, env: &[String]) -> Term {
    match t {
        Term::Var(v) => match env.iter().rposition(|b| b == v) {
            Some(k) => Term::Var(format!("#{k}")),
            None => t.clone(),
        },
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| term(a, env)).collect()),
    }
}

fn go(f: &Formula, env: &mut Vec<String>) -> Canon {
    match f {
        Formula::Atom(p, args) => Canon::Atom(p.clone(), args.iter().map(|a| term(a, env)).collect()),
        Formula::Not(g) => match &**g {
            Formula::Not(h) => go(h, env),
            Formula::Exists(v, b) => go(&Formula::forall(v.clone(), Formula::not((**b).clone())), env),
            Formula::Forall(v, b) => go(&Formula::exists(v.clone(), Formula::not((**b).clone())), env),
            _ => Canon::Not(Box::new(go(g, env))),
        },
        Formula::And(..) => {
            let mut items: Vec<Canon> = f
                .conjuncts()
                .into_iter()
                .flat_map(|c| match go(c, env) {
                    Canon::And(v) => v,
                    other => vec![other],
                })
                .collect();
            items.sort();
            Canon::And(items)
        }
        Formula::Or(..) => {
            let mut items: Vec<Canon> = f
                .disjuncts()
                .into_iter()
                .flat_map(|c| match go(c, env) {
                    Canon::Or(v) => v,
                    other => vec![other],
                })
                .collect();
            items.sort();
            Canon::Or(items)
        }
        Formula::Implies(a, b) => Canon::Imp(Box::new(go(a, env)), Box::new(go(b, env))),
        Formula::Forall(v, b) | Formula::Exists(v, b) => {
            env.push(v.clone());
            let body = Box::new(go(b, env));
            env.pop();
            if matches!(f, Formula::Forall(..)) {
                Canon::All(body)
            } else {
                Canon::Ex(body)
            }
        }
    }
}

pub fn canonical(f: &Formula) -> Canon {
    go(f, &mut Vec::new())
}

/// Same formula up to AC of `&`/`|`, double negation, `~(Ex)P = (Ax)~P`
/// and renaming of bound variables.
pub fn equiv(a: &Formula, b: &Formula) -> bool {
    canonical(a) == canonical(b)
}

/// `a` and `b` are complementary.
pub fn contradicts(a: &Formula, b: &Formula) -> bool {
    equiv(&Formula::not(a.clone()), b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn eq(a: &str, b: &str) -> bool {
        equiv(&parse_formula(a).unwrap(), &parse_formula(b).unwrap())
    }

    #[test]
    fn ac_and_nesting() {
        assert!(eq("[UNDIR a b | UNDIR b c] | UNDIR c a", "UNDIR c a | [UNDIR b c | UNDIR a b]"));
        assert!(eq("UNDIR a b & [UNDIR b c & UNDIR c a]", "[UNDIR c a & UNDIR a b] & UNDIR b c"));
        assert!(!eq("UNDIR a b | UNDIR a b", "UNDIR a b"));
        assert!(!eq("UNDIR a b & UNDIR b c", "UNDIR a b | UNDIR b c"));
    }

    #[test]
    fn negations_and_quantifiers() {
        assert!(eq("~~UNDIR a b", "UNDIR a b"));
        assert!(eq("~(Ex)UNDIR x x", "(Ay)~UNDIR y y"));
        assert!(eq("~(Ax)(Ey)UNDIR x y", "(Ez)(Aw)~UNDIR z w"));
        assert!(!eq("(Ax)(Ay)UNDIR x y", "(Ax)(Ay)UNDIR y x"));
        assert!(!eq("~[UNDIR a b & UNDIR b c]", "~UNDIR a b | ~UNDIR b c"));
    }

    #[test]
    fn free_names_matter() {
        assert!(!eq("UNDIR a b", "UNDIR b a"));
        assert!(eq("(Ax)UNDIR x b", "(Ab)UNDIR b b") == false);
    }

    #[test]
    fn complement() {
        let a = parse_formula("~(Ex)UNDIR x x").unwrap();
        let b = parse_formula("(Ev11)UNDIR v11 v11").unwrap();
        assert!(contradicts(&a, &b) && contradicts(&b, &a));
    }
}
