//! Ground clause instances, unit propagation and bounded case splits.

use std::collections::{HashMap, HashSet};

use crate::formula::{substitute, Bindings, Formula, Term};

/// One rule application on the way from a source line to a clause line.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Step {
    /// Instantiate the leading universal (or `~(E..)`) with a term.
    Us(Term),
    /// `A -> B` with a literal antecedent known true.
    Mp,
    /// `A1 & .. & Ak -> B`: IMP, then strip each `~Ai` with LDS.
    ImpStrip,
    /// `A -> B` rewritten to a disjunction.
    Imp,
    DeMorgan,
    Simp(usize),
    Distribute(usize),
    /// Keep disjunct `k`, eliminating the other (literal) members.
    Extract(usize),
}

/// Literal: atom index times two, low bit set for negation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Lit(pub u32);

impl Lit {
    pub fn atom(self) -> usize {
        (self.0 >> 1) as usize
    }
    pub fn positive(self) -> bool {
        self.0 & 1 == 0
    }
    pub fn neg(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Default)]
pub(crate) struct Atoms {
    pub list: Vec<Formula>,
    index: HashMap<Formula, u32>,
}

impl Atoms {
    fn intern(&mut self, atom: &Formula) -> u32 {
        if let Some(&i) = self.index.get(atom) {
            return i;
        }
        let i = self.list.len() as u32;
        self.list.push(atom.clone());
        self.index.insert(atom.clone(), i);
        i
    }

    /// Literal for an atom or negated atom.
    pub fn lit(&mut self, f: &Formula) -> Lit {
        match f {
            Formula::Not(inner) => self.lit(inner).neg(),
            atom => Lit(self.intern(atom) << 1),
        }
    }

    pub fn find(&self, f: &Formula) -> Option<Lit> {
        match f {
            Formula::Not(inner) => self.find(inner).map(Lit::neg),
            atom => self.index.get(atom).map(|&i| Lit(i << 1)),
        }
    }

    pub fn formula(&self, l: Lit) -> Formula {
        let a = self.list[l.atom()].clone();
        if l.positive() {
            a
        } else {
            Formula::not(a)
        }
    }
}

/// A clause reachable from a source line by a fixed sequence of steps.
#[derive(Clone, Debug)]
pub(crate) struct Template {
    pub source: usize,
    pub steps: Vec<Step>,
    pub lits: Vec<Lit>,
    /// Literals that must be true before the steps can be replayed.
    pub gates: Vec<Lit>,
}

fn has_quantifier(f: &Formula) -> bool {
    let mut q = false;
    f.walk(&mut |g| q |= matches!(g, Formula::Forall(..) | Formula::Exists(..)));
    q
}

pub(crate) fn disjoin_right(items: Vec<Formula>) -> Formula {
    items.into_iter().rev().reduce(|acc, f| Formula::or(f, acc)).expect("nonempty")
}

/// Formula produced by applying `step` to `f`, if it applies.
pub(crate) fn apply_step(f: &Formula, step: &Step) -> Option<Formula> {
    match step {
        Step::Us(t) => {
            let (v, body) = match f {
                Formula::Forall(v, body) => (v, (**body).clone()),
                Formula::Not(inner) => match &**inner {
                    Formula::Exists(v, body) => (v, Formula::not((**body).clone())),
                    _ => return None,
                },
                _ => return None,
            };
            let b: Bindings = [(v.clone(), t.clone())].into();
            Some(substitute(&body, &b))
        }
        Step::Mp | Step::ImpStrip => match f {
            Formula::Implies(_, b) => Some((**b).clone()),
            _ => None,
        },
        Step::Imp => match f {
            Formula::Implies(a, b) => {
                let mut items: Vec<Formula> = a.conjuncts().into_iter().map(Formula::neg).collect();
                items.push((**b).clone());
                Some(disjoin_right(items))
            }
            _ => None,
        },
        Step::DeMorgan => match f {
            Formula::Not(g) => match &**g {
                Formula::And(..) => Formula::disjoin(g.conjuncts().into_iter().map(Formula::neg)),
                Formula::Or(..) => Formula::conjoin(g.disjuncts().into_iter().map(Formula::neg)),
                _ => None,
            },
            _ => None,
        },
        Step::Simp(i) => f.conjuncts().get(*i).map(|c| (*c).clone()),
        Step::Distribute(k) => {
            let members = f.disjuncts();
            let m = members.get(*k)?;
            if !matches!(m, Formula::And(..)) {
                return None;
            }
            let rest: Vec<Formula> =
                members.iter().enumerate().filter(|(i, _)| i != k).map(|(_, g)| (*g).clone()).collect();
            let parts = m
                .conjuncts()
                .into_iter()
                .map(|c| Formula::disjoin(std::iter::once(c.clone()).chain(rest.iter().cloned())).unwrap());
            Formula::conjoin(parts)
        }
        Step::Extract(k) => f.disjuncts().get(*k).map(|m| (*m).clone()),
    }
}

/// Enumerates the clause templates of one source line over a term pool.
pub(crate) struct Generator<'a> {
    pub pool: &'a [Term],
    pub atoms: &'a mut Atoms,
    pub out: &'a mut Vec<Template>,
    pub seen: &'a mut HashSet<(Vec<Lit>, Vec<Lit>)>,
    pub cap: usize,
    pub overflow: bool,
}

impl Generator<'_> {
    pub fn source(&mut self, source: usize, f: &Formula) {
        self.go(source, f, &mut Vec::new(), &mut Vec::new());
    }

    fn push(&mut self, source: usize, steps: &[Step], lits: &[Formula], gates: &[Lit]) {
        if self.out.len() >= self.cap {
            self.overflow = true;
            return;
        }
        let lits: Vec<Lit> = lits.iter().map(|l| self.atoms.lit(l)).collect();
        let mut key_l = lits.clone();
        key_l.sort();
        let mut key_g = gates.to_vec();
        key_g.sort();
        key_g.dedup();
        if self.seen.insert((key_l, key_g)) {
            self.out.push(Template { source, steps: steps.to_vec(), lits, gates: gates.to_vec() });
        }
    }

    fn with(&mut self, source: usize, f: &Formula, step: Step, steps: &mut Vec<Step>, gates: &mut Vec<Lit>, extra: &[Lit]) {
        let Some(g) = apply_step(f, &step) else { return };
        steps.push(step);
        let n = gates.len();
        gates.extend_from_slice(extra);
        self.go(source, &g, steps, gates);
        gates.truncate(n);
        steps.pop();
    }

    fn go(&mut self, source: usize, f: &Formula, steps: &mut Vec<Step>, gates: &mut Vec<Lit>) {
        if self.overflow {
            return;
        }
        match f {
            _ if f.is_literal() => self.push(source, steps, &[f.clone()], gates),
            Formula::Forall(..) => {
                for t in self.pool {
                    self.with(source, f, Step::Us(t.clone()), steps, gates, &[]);
                }
            }
            Formula::Not(inner) => match &**inner {
                Formula::Exists(..) => {
                    for t in self.pool {
                        self.with(source, f, Step::Us(t.clone()), steps, gates, &[]);
                    }
                }
                Formula::And(..) | Formula::Or(..) => self.with(source, f, Step::DeMorgan, steps, gates, &[]),
                _ => {}
            },
            Formula::Implies(a, b) => {
                let ants = a.conjuncts();
                if !ants.iter().all(|x| x.is_literal()) {
                    return;
                }
                if !has_quantifier(b) {
                    self.with(source, f, Step::Imp, steps, gates, &[]);
                } else {
                    let extra: Vec<Lit> = ants.iter().map(|x| self.atoms.lit(x)).collect();
                    let step = if ants.len() == 1 { Step::Mp } else { Step::ImpStrip };
                    self.with(source, f, step, steps, gates, &extra);
                }
            }
            Formula::And(..) => {
                for i in 0..f.conjuncts().len() {
                    self.with(source, f, Step::Simp(i), steps, gates, &[]);
                }
            }
            Formula::Or(..) => {
                let members = f.disjuncts();
                if members.iter().all(|m| m.is_literal()) {
                    let lits: Vec<Formula> = members.into_iter().cloned().collect();
                    self.push(source, steps, &lits, gates);
                } else if let Some(k) = members.iter().position(|m| matches!(m, Formula::And(..))) {
                    self.with(source, f, Step::Distribute(k), steps, gates, &[]);
                } else {
                    let odd: Vec<usize> = (0..members.len()).filter(|&i| !members[i].is_literal()).collect();
                    if let [k] = odd[..] {
                        let extra: Vec<Lit> = members
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| *i != k)
                            .map(|(_, m)| self.atoms.lit(&m.neg()))
                            .collect();
                        self.with(source, f, Step::Extract(k), steps, gates, &extra);
                    }
                }
            }
            _ => {}
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Reason {
    None,
    /// Pending assumption with this index.
    Assumed(usize),
    /// Case-split literal.
    Case,
    Clause(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct Trail {
    val: Vec<i8>,
    pub reason: Vec<Reason>,
}

impl Trail {
    pub fn new(n: usize) -> Trail {
        Trail { val: vec![0; n], reason: vec![Reason::None; n] }
    }

    pub fn value(&self, l: Lit) -> i8 {
        let v = self.val[l.atom()];
        if l.positive() {
            v
        } else {
            -v
        }
    }

    pub fn is_true(&self, l: Lit) -> bool {
        self.value(l) > 0
    }

    pub fn assign(&mut self, l: Lit, r: Reason) {
        self.val[l.atom()] = if l.positive() { 1 } else { -1 };
        self.reason[l.atom()] = r;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Conflict {
    /// Every literal of the clause is false.
    Clause(usize),
    /// Two pending assumptions contradict each other; the literal is the true one.
    Assumptions(Lit),
}

#[derive(Clone, Debug)]
pub(crate) enum End {
    Target,
    Conflict(Conflict),
}

/// A closed search branch.
#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub trail: Trail,
    pub end: NodeEnd,
}

#[derive(Clone, Debug)]
pub(crate) enum NodeEnd {
    Done(End),
    Split { clause: usize, a: Lit, b: Lit, left: Box<Node>, right: Box<Node> },
}

pub(crate) struct Solver<'a> {
    pub templates: &'a [Template],
    pub target: Lit,
    pub propagations: u64,
}

impl Solver<'_> {
    /// Runs propagation rounds to a fixpoint. Units of one round only use earlier rounds.
    pub fn propagate(&mut self, trail: &mut Trail) -> Option<End> {
        loop {
            self.propagations += 1;
            if trail.is_true(self.target) {
                return Some(End::Target);
            }
            let mut new = Vec::new();
            for (tid, t) in self.templates.iter().enumerate() {
                if !t.gates.iter().all(|&g| trail.is_true(g)) {
                    continue;
                }
                match status(trail, &t.lits) {
                    Status::Sat | Status::Open => {}
                    Status::Falsified => return Some(End::Conflict(Conflict::Clause(tid))),
                    Status::Unit(l) => new.push((l, tid)),
                }
            }
            if new.is_empty() {
                return None;
            }
            for (l, tid) in new {
                match trail.value(l) {
                    0 => trail.assign(l, Reason::Clause(tid)),
                    v if v < 0 => return Some(End::Conflict(Conflict::Clause(tid))),
                    _ => {}
                }
            }
        }
    }

    /// Active clauses with exactly two open literals, in template order.
    fn split_candidates(&self, trail: &Trail) -> Vec<(usize, Lit, Lit)> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for (tid, t) in self.templates.iter().enumerate() {
            if !t.gates.iter().all(|&g| trail.is_true(g)) {
                continue;
            }
            if let Status::Open = status(trail, &t.lits) {
                let open: Vec<Lit> = t.lits.iter().copied().filter(|&l| trail.value(l) == 0).collect();
                if let [a, b] = open[..] {
                    if a != b && a != b.neg() && seen.insert((a.min(b), a.max(b))) {
                        out.push((tid, a, b));
                    }
                }
            }
        }
        out
    }

    /// Closes the branch by propagation, splitting at most `splits` levels deep.
    pub fn solve(&mut self, mut trail: Trail, splits: usize, budget: &mut u64) -> Option<Node> {
        if let Some(end) = self.propagate(&mut trail) {
            return Some(Node { trail, end: NodeEnd::Done(end) });
        }
        if splits == 0 {
            return None;
        }
        for (tid, a, b) in self.split_candidates(&trail) {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            let mut ta = trail.clone();
            ta.assign(a, Reason::Case);
            let Some(left) = self.solve(ta, splits - 1, budget) else { continue };
            let mut tb = trail.clone();
            tb.assign(b, Reason::Case);
            let Some(right) = self.solve(tb, splits - 1, budget) else { continue };
            return Some(Node {
                trail,
                end: NodeEnd::Split { clause: tid, a, b, left: Box::new(left), right: Box::new(right) },
            });
        }
        None
    }
}

enum Status {
    Sat,
    Falsified,
    Unit(Lit),
    /// Two or more distinct open literals.
    Open,
}

fn status(trail: &Trail, lits: &[Lit]) -> Status {
    let mut open: Option<Lit> = None;
    let mut many = false;
    for &l in lits {
        match trail.value(l) {
            v if v > 0 => return Status::Sat,
            0 => match open {
                None => open = Some(l),
                Some(o) if o == l => {}
                Some(_) => many = true,
            },
            _ => {}
        }
    }
    match (open, many) {
        (None, _) => Status::Falsified,
        (Some(l), false) => Status::Unit(l),
        _ => Status::Open,
    }
}
