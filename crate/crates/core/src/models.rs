//! Finite structures over `{UNDIR/2, rev/1}` and brute-force countermodel search.
//!
//! Enumeration order for a fixed size `n`: structure index
//! `rev_idx * 2^(n*n) + undir_idx`, where `rev_idx` reads the rev table as a
//! base-`n` numeral with `rev[0]` most significant and `undir_idx` reads the
//! row-major undir table as a binary numeral with cell `(0,0)` most significant.

use crate::formula::{Formula, Term};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use thiserror::Error;

pub type Assignment = BTreeMap<String, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unassigned free variable `{0}`")]
    Unassigned(String),
    #[error("symbol `{0}` has no interpretation")]
    UnknownSymbol(String),
    #[error("assignment value {value} for `{var}` is outside the domain")]
    OutOfDomain { var: String, value: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    pub size: usize,
    /// Row-major `size * size`.
    pub undir: Vec<bool>,
    pub rev: Vec<usize>,
}

impl Structure {
    pub fn new(size: usize, rev: Vec<usize>, pairs: &[(usize, usize)]) -> Structure {
        assert!(size >= 1 && rev.len() == size && rev.iter().all(|&r| r < size));
        let mut undir = vec![false; size * size];
        for &(a, b) in pairs {
            undir[a * size + b] = true;
        }
        Structure { size, undir, rev }
    }

    pub fn from_fn(size: usize, rev: impl Fn(usize) -> usize, undir: impl Fn(usize, usize) -> bool) -> Structure {
        let rev: Vec<usize> = (0..size).map(rev).collect();
        let pairs: Vec<(usize, usize)> =
            (0..size).flat_map(|a| (0..size).map(move |b| (a, b))).filter(|&(a, b)| undir(a, b)).collect();
        Structure::new(size, rev, &pairs)
    }

    pub fn undir(&self, a: usize, b: usize) -> bool {
        self.undir[a * self.size + b]
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.size)
            .flat_map(|a| (0..self.size).map(move |b| (a, b)))
            .filter(|&(a, b)| self.undir(a, b))
            .collect()
    }

    /// Position of this structure in the enumeration order of its size.
    pub fn index(&self) -> u64 {
        let n = self.size as u64;
        let rev_idx = self.rev.iter().fold(0u64, |acc, &r| acc * n + r as u64);
        let undir_idx = self.undir.iter().fold(0u64, |acc, &b| acc * 2 + b as u64);
        rev_idx * (1u64 << (n * n)) + undir_idx
    }

    pub fn record(&self) -> CountermodelRecord {
        CountermodelRecord { size: self.size, rev: self.rev.clone(), undir: self.pairs() }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rev: Vec<String> = self.rev.iter().map(|r| r.to_string()).collect();
        let pairs: Vec<String> = self.pairs().iter().map(|(a, b)| format!("({a},{b})")).collect();
        write!(f, "size {}; rev [{}]; undir {{{}}}", self.size, rev.join(","), pairs.join(","))
    }
}

/// Machine-readable countermodel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountermodelRecord {
    pub size: usize,
    pub rev: Vec<usize>,
    pub undir: Vec<(usize, usize)>,
}

impl CountermodelRecord {
    pub fn to_structure(&self) -> Option<Structure> {
        let ok = self.size >= 1
            && self.rev.len() == self.size
            && self.rev.iter().all(|&r| r < self.size)
            && self.undir.iter().all(|&(a, b)| a < self.size && b < self.size);
        ok.then(|| Structure::new(self.size, self.rev.clone(), &self.undir))
    }
}

pub fn count_structures(n: usize) -> u64 {
    (n as u64).pow(n as u32) << (n * n)
}

/// The structure at `index` in the enumeration order of size `n`.
pub fn structure_at(n: usize, index: u64) -> Structure {
    let cells = n * n;
    let undir_idx = index & ((1u64 << cells) - 1);
    let mut rev_idx = index >> cells;
    let mut rev = vec![0; n];
    for slot in rev.iter_mut().rev() {
        *slot = (rev_idx % n as u64) as usize;
        rev_idx /= n as u64;
    }
    let undir = (0..cells).map(|c| undir_idx >> (cells - 1 - c) & 1 == 1).collect();
    Structure { size: n, undir, rev }
}

/// All structures of size `n`, in enumeration order.
pub fn enumerate_structures(n: usize) -> impl Iterator<Item = Structure> {
    assert!(n >= 1, "size must be positive");
    (0..count_structures(n)).map(move |i| structure_at(n, i))
}

#[derive(Debug, Clone)]
enum CTerm {
    Slot(usize),
    Rev(Box<CTerm>),
}

#[derive(Debug, Clone)]
enum Node {
    Undir(CTerm, CTerm),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Imp(Box<Node>, Box<Node>),
    All(usize, Box<Node>),
    Ex(usize, Box<Node>),
}

/// A formula with variables resolved to environment slots.
#[derive(Debug, Clone)]
pub struct Compiled {
    root: Node,
    free: Vec<String>,
    slots: usize,
}

struct Compiler {
    scope: Vec<(String, usize)>,
    free: Vec<String>,
    next: usize,
}

impl Compiler {
    fn slot(&mut self, v: &str) -> usize {
        if let Some((_, s)) = self.scope.iter().rev().find(|(n, _)| n == v) {
            return *s;
        }
        // free variables were allocated up front
        self.free.iter().position(|f| f == v).expect("free var pre-allocated")
    }

    fn term(&mut self, t: &Term) -> Result<CTerm, EvalError> {
        match t {
            Term::Var(v) => Ok(CTerm::Slot(self.slot(v))),
            Term::App(f, args) if f == "rev" && args.len() == 1 => Ok(CTerm::Rev(Box::new(self.term(&args[0])?))),
            Term::App(f, _) => Err(EvalError::UnknownSymbol(f.clone())),
        }
    }

    fn node(&mut self, f: &Formula) -> Result<Node, EvalError> {
        Ok(match f {
            Formula::Atom(p, args) if p.eq_ignore_ascii_case("UNDIR") && args.len() == 2 => {
                Node::Undir(self.term(&args[0])?, self.term(&args[1])?)
            }
            Formula::Atom(p, _) => return Err(EvalError::UnknownSymbol(p.clone())),
            Formula::Not(g) => Node::Not(Box::new(self.node(g)?)),
            Formula::And(l, r) => Node::And(Box::new(self.node(l)?), Box::new(self.node(r)?)),
            Formula::Or(l, r) => Node::Or(Box::new(self.node(l)?), Box::new(self.node(r)?)),
            Formula::Implies(l, r) => Node::Imp(Box::new(self.node(l)?), Box::new(self.node(r)?)),
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let s = self.next;
                self.next += 1;
                self.scope.push((v.clone(), s));
                let body = Box::new(self.node(g)?);
                self.scope.pop();
                if matches!(f, Formula::Forall(..)) {
                    Node::All(s, body)
                } else {
                    Node::Ex(s, body)
                }
            }
        })
    }
}

impl Compiled {
    pub fn new(f: &Formula) -> Result<Compiled, EvalError> {
        let free: Vec<String> = f.free_vars().into_iter().collect();
        let mut c = Compiler { scope: Vec::new(), next: free.len(), free };
        let root = c.node(f)?;
        Ok(Compiled { root, slots: c.next, free: c.free })
    }

    pub fn eval(&self, s: &Structure, a: &Assignment) -> Result<bool, EvalError> {
        let mut env = vec![0usize; self.slots];
        for (i, v) in self.free.iter().enumerate() {
            let val = *a.get(v).ok_or_else(|| EvalError::Unassigned(v.clone()))?;
            if val >= s.size {
                return Err(EvalError::OutOfDomain { var: v.clone(), value: val });
            }
            env[i] = val;
        }
        Ok(run(&self.root, s, &mut env))
    }

    /// Truth in `s` of a closed formula.
    pub fn holds(&self, s: &Structure) -> bool {
        assert!(self.free.is_empty(), "formula has free variables");
        let mut env = vec![0usize; self.slots];
        run(&self.root, s, &mut env)
    }
}

fn term_val(t: &CTerm, s: &Structure, env: &[usize]) -> usize {
    match t {
        CTerm::Slot(i) => env[*i],
        CTerm::Rev(t) => s.rev[term_val(t, s, env)],
    }
}

fn run(n: &Node, s: &Structure, env: &mut Vec<usize>) -> bool {
    match n {
        Node::Undir(a, b) => s.undir(term_val(a, s, env), term_val(b, s, env)),
        Node::Not(g) => !run(g, s, env),
        Node::And(l, r) => run(l, s, env) && run(r, s, env),
        Node::Or(l, r) => run(l, s, env) || run(r, s, env),
        Node::Imp(l, r) => !run(l, s, env) || run(r, s, env),
        Node::All(slot, g) => (0..s.size).all(|d| {
            env[*slot] = d;
            run(g, s, env)
        }),
        Node::Ex(slot, g) => (0..s.size).any(|d| {
            env[*slot] = d;
            run(g, s, env)
        }),
    }
}

/// Classical truth value of `f` in `s` under `a`.
pub fn eval(s: &Structure, f: &Formula, a: &Assignment) -> Result<bool, EvalError> {
    Compiled::new(f)?.eval(s, a)
}

const BLOCK: u64 = 1 << 12;

fn search_size(premises: &[Compiled], goal: &Compiled, n: usize, jobs: usize) -> Option<Structure> {
    let total = count_structures(n);
    let best = AtomicU64::new(u64::MAX);
    let next_block = AtomicUsize::new(0);
    let check = |i: u64| {
        let s = structure_at(n, i);
        !goal.holds(&s) && premises.iter().all(|p| p.holds(&s))
    };
    let worker = || loop {
        let start = next_block.fetch_add(1, Ordering::Relaxed) as u64 * BLOCK;
        if start >= total || start >= best.load(Ordering::Relaxed) {
            return;
        }
        let end = (start + BLOCK).min(total);
        if let Some(i) = (start..end).find(|&i| check(i)) {
            best.fetch_min(i, Ordering::Relaxed);
            return;
        }
    };
    if jobs <= 1 {
        worker();
    } else {
        std::thread::scope(|sc| {
            for _ in 0..jobs {
                sc.spawn(&worker);
            }
        });
    }
    match best.into_inner() {
        u64::MAX => None,
        i => Some(structure_at(n, i)),
    }
}

/// Smallest structure of size `<= max_n` making every premise true and the goal false.
pub fn find_countermodel(premises: &[Formula], goal: &Formula, max_n: usize) -> Option<Structure> {
    let jobs = std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1);
    find_countermodel_with(premises, goal, max_n, jobs).expect("closed geometry formulas")
}

/// As [`find_countermodel`] with an explicit worker count. The answer does not depend on `jobs`.
pub fn find_countermodel_with(
    premises: &[Formula],
    goal: &Formula,
    max_n: usize,
    jobs: usize,
) -> Result<Option<Structure>, EvalError> {
    let compile_closed = |f: &Formula| -> Result<Compiled, EvalError> {
        if let Some(v) = f.free_vars().into_iter().next() {
            return Err(EvalError::Unassigned(v));
        }
        Compiled::new(f)
    };
    let ps = premises.iter().map(compile_closed).collect::<Result<Vec<_>, _>>()?;
    let g = compile_closed(goal)?;
    Ok((1..=max_n).find_map(|n| search_size(&ps, &g, n, jobs.max(1))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    #[test]
    fn index_round_trip() {
        for n in 1..=3 {
            for i in [0, 1, count_structures(n) / 2, count_structures(n) - 1] {
                assert_eq!(structure_at(n, i).index(), i);
            }
        }
        let s = structure_at(2, 0);
        assert_eq!(s.rev, vec![0, 0]);
        assert!(s.undir.iter().all(|b| !b));
        assert_eq!(structure_at(2, 1).pairs(), vec![(1, 1)]);
        assert_eq!(structure_at(2, 16).rev, vec![0, 1]);
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_structures(1).count(), 2);
        assert_eq!(enumerate_structures(2).count(), 64);
        assert_eq!(count_structures(3), 13824);
    }

    #[test]
    fn free_variables_need_values() {
        let s = structure_at(2, 5);
        let f = parse_formula("UNDIR x [rev y]").unwrap();
        assert_eq!(eval(&s, &f, &Assignment::new()), Err(EvalError::Unassigned("x".into())));
        let a: Assignment = [("x".to_string(), 0), ("y".to_string(), 7)].into();
        assert!(matches!(eval(&s, &f, &a), Err(EvalError::OutOfDomain { .. })));
    }
}
