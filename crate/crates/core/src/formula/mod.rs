//! First-order terms and formulas over a small signature, with the ASCII
//! surface syntax used by proof scripts.

mod parse;
mod print;
mod subst;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use parse::{parse_formula, parse_formula_with, parse_term, parse_term_with, ParseError};
pub use print::print_formula;
pub use subst::{alpha_eq, fresh_var, match_formula, substitute, Bindings};

/// A first-order term: a variable or a function application.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(f: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(f.into(), args)
    }

    /// `rev(t)`, the only construction of the geometry signature.
    pub fn rev(t: Term) -> Term {
        Term::App("rev".into(), vec![t])
    }

    /// Nesting depth of function applications (`v` is 0, `[rev v]` is 1).
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    pub fn has_var(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::App(_, args) => args.iter().any(|a| a.has_var(name)),
        }
    }

    /// All subterms, including the term itself.
    pub fn subterms(&self, out: &mut BTreeSet<Term>) {
        out.insert(self.clone());
        if let Term::App(_, args) = self {
            args.iter().for_each(|a| a.subterms(out));
        }
    }

    /// Function-call rendering, `rev(rev(v3))`, as used in rule annotations.
    pub fn call_notation(&self) -> String {
        match self {
            Term::Var(v) => v.clone(),
            Term::App(f, args) => {
                let inner: Vec<String> = args.iter().map(Term::call_notation).collect();
                format!("{f}({})", inner.join(","))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(name, args) => {
                write!(f, "[{name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// A first-order formula. Equality is syntactic; see [`alpha_eq`] for
/// comparison up to bound-variable renaming.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom(pred.into(), args)
    }

    /// `UNDIR a b`.
    pub fn undir(a: Term, b: Term) -> Formula {
        Formula::Atom("UNDIR".into(), vec![a, b])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(body))
    }

    /// Complement with double-negation removal: `neg(~X) = X`, `neg(X) = ~X`.
    pub fn neg(&self) -> Formula {
        match self {
            Formula::Not(inner) => (**inner).clone(),
            other => Formula::not(other.clone()),
        }
    }

    /// An atom or a negated atom.
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Atom(..) => true,
            Formula::Not(inner) => matches!(**inner, Formula::Atom(..)),
            _ => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, args) => {
                let mut vs = BTreeSet::new();
                args.iter().for_each(|a| a.vars(&mut vs));
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_free(&self, name: &str) -> bool {
        match self {
            Formula::Atom(_, args) => args.iter().any(|a| a.has_var(name)),
            Formula::Not(a) => a.has_free(name),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.has_free(name) || b.has_free(name)
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                v != name && body.has_free(name)
            }
        }
    }

    /// Names bound by some quantifier in the formula.
    pub fn bound_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Forall(v, _) | Formula::Exists(v, _) = f {
                out.insert(v.clone());
            }
        });
        out
    }

    /// Every variable name occurring anywhere, free or bound.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = self.bound_vars();
        self.walk(&mut |f| {
            if let Formula::Atom(_, args) = f {
                args.iter().for_each(|a| a.vars(&mut out));
            }
        });
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Pre-order traversal.
    pub fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        match self {
            Formula::Atom(..) => {}
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.walk(visit),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }

    /// Ground terms (no bound variables) appearing as atom arguments, with their subterms.
    pub fn ground_subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.collect_terms(&mut Vec::new(), &mut out);
        out
    }

    fn collect_terms(&self, bound: &mut Vec<String>, out: &mut BTreeSet<Term>) {
        match self {
            Formula::Atom(_, args) => {
                for a in args {
                    let mut subs = BTreeSet::new();
                    a.subterms(&mut subs);
                    for t in subs {
                        let mut vs = BTreeSet::new();
                        t.vars(&mut vs);
                        if vs.iter().all(|v| !bound.contains(v)) {
                            out.insert(t);
                        }
                    }
                }
            }
            Formula::Not(a) => a.collect_terms(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_terms(bound, out);
                b.collect_terms(bound, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(v.clone());
                body.collect_terms(bound, out);
                bound.pop();
            }
        }
    }

    /// Members of a maximal `&`-chain, left to right.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    /// Members of a maximal `|`-chain, left to right.
    pub fn disjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::Or(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    /// Left-nested disjunction of a nonempty list.
    pub fn disjoin(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::or)
    }

    /// Left-nested conjunction of a nonempty list.
    pub fn conjoin(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    /// Number of connectives and quantifiers.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

/// `~(Ex)P` is read as `(Ax)~P` and `~(Ax)P` as `(Ex)~P`; other shapes are returned unchanged.
pub fn negated_quantifier_view(f: &Formula) -> Formula {
    match f {
        Formula::Not(inner) => match &**inner {
            Formula::Exists(v, body) => Formula::forall(v.clone(), Formula::not((**body).clone())),
            Formula::Forall(v, body) => Formula::exists(v.clone(), Formula::not((**body).clone())),
            _ => f.clone(),
        },
        _ => f.clone(),
    }
}

/// Declared predicate and function symbols with their arities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub predicates: BTreeMap<String, usize>,
    pub functions: BTreeMap<String, usize>,
}

impl Signature {
    /// `{UNDIR/2}` and `{rev/1}`.
    pub fn geometry() -> Signature {
        Signature {
            predicates: BTreeMap::from([("UNDIR".to_string(), 2)]),
            functions: BTreeMap::from([("rev".to_string(), 1)]),
        }
    }

    /// The geometry signature plus the defined relations `CON`, `DIR`, `OPP`, `INOPP`.
    pub fn with_definitions() -> Signature {
        let mut sig = Signature::geometry();
        for name in ["CON", "DIR", "OPP", "INOPP"] {
            sig.predicates.insert(name.into(), 2);
        }
        sig
    }

    pub fn add_predicate(&mut self, name: &str, arity: usize) {
        self.predicates.insert(name.to_ascii_uppercase(), arity);
    }

    pub fn add_function(&mut self, name: &str, arity: usize) {
        self.functions.insert(name.to_ascii_lowercase(), arity);
    }

    /// Canonical (upper-case) name and arity of a predicate, matched case-insensitively.
    pub fn predicate(&self, name: &str) -> Option<(String, usize)> {
        let canon = name.to_ascii_uppercase();
        self.predicates.get(&canon).map(|&a| (canon, a))
    }

    /// Canonical (lower-case) name and arity of a function symbol.
    pub fn function(&self, name: &str) -> Option<(String, usize)> {
        let canon = name.to_ascii_lowercase();
        self.functions.get(&canon).map(|&a| (canon, a))
    }
}

impl Default for Signature {
    fn default() -> Self {
        Signature::geometry()
    }
}
