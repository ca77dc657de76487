//! Replays a closed search tree as proof lines.

use std::collections::HashMap;

use super::ground::{apply_step, disjoin_right, Atoms, Conflict, End, Lit, Node, NodeEnd, Reason, Step, Template, Trail};
use crate::formula::Formula;
use crate::kernel::{Justification, ProofLine, Rule};

pub(crate) struct Emitter<'a> {
    pub lines: Vec<ProofLine>,
    layers: Vec<HashMap<Formula, usize>>,
    pub atoms: &'a Atoms,
    pub templates: &'a [Template],
    pub sources: &'a [Formula],
    /// Line of each source, once emitted.
    pub source_lines: Vec<Option<usize>>,
}

impl<'a> Emitter<'a> {
    pub fn new(atoms: &'a Atoms, templates: &'a [Template], sources: &'a [Formula]) -> Emitter<'a> {
        Emitter {
            lines: Vec::new(),
            layers: vec![HashMap::new()],
            atoms,
            templates,
            sources,
            source_lines: vec![None; sources.len()],
        }
    }

    pub fn emit(&mut self, f: Formula, just: Justification) -> usize {
        let n = self.lines.len() + 1;
        self.layers.last_mut().expect("layer").insert(f.clone(), n);
        self.lines.push(ProofLine::new(n, f, just));
        n
    }

    fn lookup(&self, f: &Formula) -> Option<usize> {
        self.layers.iter().rev().find_map(|l| l.get(f).copied())
    }

    fn get_or_emit(&mut self, f: Formula, just: Justification) -> usize {
        match self.lookup(&f) {
            Some(n) => n,
            None => self.emit(f, just),
        }
    }

    fn formula(&self, n: usize) -> &Formula {
        &self.lines[n - 1].formula
    }

    fn lit(&self, f: &Formula) -> Lit {
        self.atoms.find(f).expect("literal interned during generation")
    }

    /// Line holding a literal that is true on the trail.
    fn unit(&mut self, l: Lit, trail: &Trail) -> usize {
        let f = self.atoms.formula(l);
        if let Some(n) = self.lookup(&f) {
            return n;
        }
        debug_assert!(trail.is_true(l));
        match trail.reason[l.atom()] {
            Reason::Clause(tid) => self.derive(tid, l, trail),
            r => panic!("literal {f} with reason {r:?} has no line"),
        }
    }

    /// Replays the steps of a template; returns the clause line.
    fn clause_line(&mut self, tid: usize, trail: &Trail) -> usize {
        let t = &self.templates[tid];
        let mut line = self.source_lines[t.source].expect("source opened");
        for step in &t.steps {
            let f = self.formula(line).clone();
            let g = apply_step(&f, step).expect("step replays");
            line = match step {
                Step::Us(term) => {
                    let var = match &f {
                        Formula::Forall(v, _) => v.clone(),
                        Formula::Not(inner) => match &**inner {
                            Formula::Exists(v, _) => v.clone(),
                            _ => unreachable!(),
                        },
                        _ => unreachable!(),
                    };
                    self.get_or_emit(g, Justification::new(Rule::Us, vec![line]).with_annot(term.clone(), var))
                }
                Step::Mp => {
                    let Formula::Implies(a, _) = &f else { unreachable!() };
                    let al = self.unit(self.lit(a), trail);
                    self.get_or_emit(g, Justification::new(Rule::Mp, vec![line, al]))
                }
                Step::ImpStrip => {
                    let Formula::Implies(a, _) = &f else { unreachable!() };
                    let ants: Vec<Formula> = a.conjuncts().into_iter().cloned().collect();
                    let imp = apply_step(&f, &Step::Imp).expect("imp");
                    let mut cur = self.get_or_emit(imp, Justification::new(Rule::Imp, vec![line]));
                    for (i, ant) in ants.iter().enumerate() {
                        let al = self.unit(self.lit(ant), trail);
                        let rest: Vec<Formula> = ants[i + 1..].iter().map(Formula::neg).chain([g.clone()]).collect();
                        cur = self.get_or_emit(disjoin_right(rest), Justification::new(Rule::Lds, vec![cur, al]));
                    }
                    cur
                }
                Step::Imp => self.get_or_emit(g, Justification::new(Rule::Imp, vec![line])),
                Step::DeMorgan => self.get_or_emit(g, Justification::new(Rule::DeMorgan, vec![line])),
                Step::Simp(_) => self.get_or_emit(g, Justification::new(Rule::Simp, vec![line])),
                Step::Distribute(_) => self.get_or_emit(g, Justification::new(Rule::DistributiveLaw, vec![line])),
                Step::Extract(k) => {
                    let n = f.disjuncts().len();
                    let keep: Vec<bool> = (0..n).map(|i| i == *k).collect();
                    self.eliminate(line, keep, trail)
                }
            };
        }
        line
    }

    /// Removes the disjuncts not marked `keep`; each must be false on the trail.
    fn eliminate(&mut self, mut line: usize, mut keep: Vec<bool>, trail: &Trail) -> usize {
        while let Some(i) = keep.iter().position(|k| !k) {
            let f = self.formula(line).clone();
            let Formula::Or(l, _) = &f else { unreachable!() };
            let left_len = l.disjuncts().len();
            let members: Vec<Formula> = f.disjuncts().into_iter().cloned().collect();
            let u = self.unit(self.lit(&members[i]).neg(), trail);
            let rule = if i < left_len { Rule::Lds } else { Rule::Rds };
            let rest: Vec<Formula> =
                members.into_iter().enumerate().filter(|(j, _)| *j != i).map(|(_, m)| m).collect();
            keep.remove(i);
            line = self.get_or_emit(Formula::disjoin(rest).unwrap(), Justification::new(rule, vec![line, u]));
        }
        line
    }

    /// Derives `l` from a clause whose other literals are false.
    fn derive(&mut self, tid: usize, l: Lit, trail: &Trail) -> usize {
        let line = self.clause_line(tid, trail);
        let keep: Vec<bool> = self.formula(line).disjuncts().iter().map(|m| self.lit(m) == l).collect();
        let line = self.eliminate(line, keep, trail);
        self.collapse(line)
    }

    /// Reduces `L | .. | L` to `L` with nested case analysis.
    fn collapse(&mut self, line: usize) -> usize {
        let f = self.formula(line).clone();
        let Formula::Or(l, r) = &f else { return line };
        let target = f.disjuncts()[0].clone();
        self.layers.push(HashMap::new());
        let c1 = self.emit((**l).clone(), Justification::new(Rule::Case1, vec![line]));
        let x = self.collapse(c1);
        self.layers.pop();
        self.layers.push(HashMap::new());
        let c2 = self.emit((**r).clone(), Justification::new(Rule::Case2, vec![line]));
        let y = self.collapse(c2);
        self.layers.pop();
        self.emit(target, Justification::new(Rule::Cases, vec![line, x, y]))
    }

    /// Lines `p` and `~p` for a conflict.
    fn conflict(&mut self, c: Conflict, trail: &Trail) -> (usize, usize) {
        match c {
            Conflict::Assumptions(l) => (self.unit(l, trail), self.lookup(&self.atoms.formula(l.neg())).expect("assumed")),
            Conflict::Clause(tid) => {
                let line = self.clause_line(tid, trail);
                let n = self.formula(line).disjuncts().len();
                let keep: Vec<bool> = (0..n).map(|i| i + 1 == n).collect();
                let p = self.eliminate(line, keep, trail);
                let pl = self.lit(&self.formula(p).clone());
                (p, self.unit(pl.neg(), trail))
            }
        }
    }

    /// Emits the subtree; returns a line holding `target`.
    pub fn node(&mut self, node: &Node, target: Lit) -> usize {
        let tf = self.atoms.formula(target);
        match &node.end {
            NodeEnd::Done(End::Target) => self.unit(target, &node.trail),
            NodeEnd::Done(End::Conflict(c)) => {
                let (p, np) = self.conflict(*c, &node.trail);
                let pf = self.formula(p).clone();
                if pf == tf {
                    return p;
                }
                if pf.neg() == tf {
                    return np;
                }
                let cp = self.emit(Formula::implies(tf.neg(), pf), Justification::new(Rule::Cp, vec![p]));
                self.emit(tf, Justification::new(Rule::Mt, vec![cp, np]))
            }
            NodeEnd::Split { clause, a, b, left, right } => {
                let line = self.clause_line(*clause, &node.trail);
                let keep: Vec<bool> =
                    self.formula(line).disjuncts().iter().map(|m| [*a, *b].contains(&self.lit(m))).collect();
                let bin = self.eliminate(line, keep, &node.trail);
                let Formula::Or(x, y) = self.formula(bin).clone() else { unreachable!() };
                let (first, second) = if self.lit(&x) == *a { (left, right) } else { (right, left) };
                let mut ends = Vec::new();
                for (rule, f, sub) in [(Rule::Case1, x, first), (Rule::Case2, y, second)] {
                    self.layers.push(HashMap::new());
                    self.emit(*f, Justification::new(rule, vec![bin]));
                    ends.push(self.node(sub, target));
                    self.layers.pop();
                }
                self.emit(tf, Justification::new(Rule::Cases, vec![bin, ends[0], ends[1]]))
            }
        }
    }

    /// Opens a source line (premise or assumption) and records it.
    pub fn open_source(&mut self, idx: usize, rule: Rule) -> usize {
        let n = self.emit(self.sources[idx].clone(), Justification::new(rule, vec![]));
        self.source_lines[idx] = Some(n);
        n
    }

    pub fn open_literal(&mut self, f: Formula) -> usize {
        self.emit(f, Justification::new(Rule::AssumedPremise, vec![]))
    }
}
