//! Bounded proof search.
//!
//! The goal is decomposed into eigenvariables (for leading universals),
//! assumptions (for implications) and a target literal of the remaining
//! clause. Premises are expanded into ground clause instances over a term pool
//! and the target is reached by unit propagation with bounded case splits.
//! The closed search tree is replayed as kernel lines and the finished proof
//! is re-checked by the kernel before it is returned.

mod emit;
mod ground;

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::formula::{fresh_var, substitute, Bindings, Formula, Term};
use crate::kernel::{check_proof, equiv, Checker, Justification, Proof, ProofLine, Rule};
use emit::Emitter;
use ground::{Atoms, Conflict, End, Generator, Node, NodeEnd, Reason, Solver, Template, Trail};

/// Which terms premises are instantiated with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InstantiationPool {
    /// Ground subterms of the goal and its assumptions.
    SubtermsOnly,
    /// Those terms plus `rev` applied up to the term-depth bound.
    #[default]
    SubtermsPlusRev,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct SearchConfig {
    /// Bound on simultaneously open assumption and case frames.
    pub max_depth: usize,
    /// Bound on `rev` nesting in instantiation terms.
    pub max_term_depth: usize,
    /// Bound on the length of a returned proof.
    pub max_lines: usize,
    pub instantiation_pool: InstantiationPool,
    /// Bound on ground clause instances per term depth.
    pub max_instances: usize,
    /// Bound on attempted case splits per target.
    pub max_splits_tried: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: 6,
            max_term_depth: 2,
            max_lines: 400,
            instantiation_pool: InstantiationPool::SubtermsPlusRev,
            max_instances: 200_000,
            max_splits_tried: 20_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Proof lines emitted, including candidates that were discarded.
    pub lines_generated: usize,
    /// Ground clause instances generated.
    pub instantiations: usize,
    pub propagation_rounds: u64,
    pub splits_tried: u64,
    #[serde(serialize_with = "millis")]
    pub wall_time: Duration,
}

fn millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

impl SearchStats {
    fn absorb(&mut self, o: &SearchStats) {
        self.lines_generated += o.lines_generated;
        self.instantiations += o.instantiations;
        self.propagation_rounds += o.propagation_rounds;
        self.splits_tried += o.splits_tried;
        self.wall_time += o.wall_time;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Proved(Proof),
    /// Everything within the bounds was tried.
    Exhausted,
    /// An instance, split or line budget cut the search short.
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn proof(&self) -> Option<&Proof> {
        match &self.status {
            SearchStatus::Proved(p) => Some(p),
            _ => None,
        }
    }
}

/// One layer of goal decomposition, outermost first.
#[derive(Clone, Debug)]
enum Level {
    /// Leading universals; `formula` is the goal at this level.
    Forall { formula: Formula },
    /// `formula` is `ante -> consequent`.
    Implies { formula: Formula, ante: Formula },
}

struct Plan {
    levels: Vec<Level>,
    leaf: Formula,
    members: Vec<Formula>,
    eigen: Vec<String>,
}

fn decompose(goal: &Formula, avoid: &mut BTreeSet<String>) -> Option<Plan> {
    let mut levels = Vec::new();
    let mut eigen = Vec::new();
    let mut cur = goal.clone();
    loop {
        match &cur {
            Formula::Forall(..) => {
                let formula = cur.clone();
                let mut b = Bindings::new();
                let mut body = &cur;
                while let Formula::Forall(v, g) = body {
                    let e = fresh_var(v, avoid);
                    avoid.insert(e.clone());
                    eigen.push(e.clone());
                    b.insert(v.clone(), Term::var(e));
                    body = g;
                }
                let inst = substitute(body, &b);
                levels.push(Level::Forall { formula });
                cur = inst;
            }
            Formula::Implies(a, b) => {
                levels.push(Level::Implies { formula: cur.clone(), ante: (**a).clone() });
                cur = (**b).clone();
            }
            _ => break,
        }
    }
    let members: Vec<Formula> = cur.disjuncts().into_iter().cloned().collect();
    if !members.iter().all(Formula::is_literal) {
        return None;
    }
    Some(Plan { levels, leaf: cur, members, eigen })
}

fn rev_power(t: &Term, k: usize) -> Term {
    (0..k).fold(t.clone(), |acc, _| Term::rev(acc))
}

/// Instantiation terms for term depth `d`.
fn pool(base: &BTreeSet<Term>, roots: &BTreeSet<Term>, kind: InstantiationPool, d: usize) -> Vec<Term> {
    let mut out: BTreeSet<Term> = base.clone();
    if kind == InstantiationPool::SubtermsPlusRev {
        for r in roots {
            for k in 0..=d {
                out.insert(rev_power(r, k));
            }
        }
    }
    let mut v: Vec<Term> = out.into_iter().collect();
    v.sort_by(|a, b| a.depth().cmp(&b.depth()).then(a.cmp(b)));
    v
}

struct Attempt<'a> {
    premises: &'a [Formula],
    goal: &'a Formula,
    plan: &'a Plan,
    /// Premises, then the goal's assumptions.
    sources: Vec<Formula>,
    cfg: &'a SearchConfig,
    stats: SearchStats,
    budget_hit: bool,
}

/// Searches for a kernel-valid proof of `goal` from `premises`.
pub fn prove(premises: &[Formula], goal: &Formula, cfg: &SearchConfig) -> SearchResult {
    let start = Instant::now();
    let mut avoid: BTreeSet<String> = goal.all_vars();
    for p in premises {
        avoid.extend(p.all_vars());
    }
    let Some(plan) = decompose(goal, &mut avoid) else {
        return SearchResult {
            status: SearchStatus::Exhausted,
            stats: SearchStats { wall_time: start.elapsed(), ..Default::default() },
        };
    };
    let mut sources: Vec<Formula> = premises.to_vec();
    for lv in &plan.levels {
        if let Level::Implies { ante, .. } = lv {
            sources.push(ante.clone());
        }
    }
    let mut a = Attempt { premises, goal, plan: &plan, sources, cfg, stats: SearchStats::default(), budget_hit: false };
    let status = match a.run() {
        Some(p) => SearchStatus::Proved(p),
        None if a.budget_hit => SearchStatus::BudgetExceeded,
        None => SearchStatus::Exhausted,
    };
    a.stats.wall_time = start.elapsed();
    SearchResult { status, stats: a.stats }
}

impl Attempt<'_> {
    /// Assumptions in opening order: implication antecedents, then the
    /// negated non-target members of the clause.
    fn pending(&self, k: usize) -> Vec<Formula> {
        let mut out: Vec<Formula> = self
            .plan
            .levels
            .iter()
            .filter_map(|lv| match lv {
                Level::Implies { ante, .. } => Some(ante.clone()),
                _ => None,
            })
            .collect();
        out.extend(self.plan.members.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, m)| m.neg()));
        out
    }

    fn run(&mut self) -> Option<Proof> {
        let mut active: Vec<Formula> = self.plan.members.clone();
        active.extend(self.pending(usize::MAX));
        let mut base = BTreeSet::new();
        for f in &active {
            base.extend(f.ground_subterms());
        }
        let mut roots: BTreeSet<Term> = self.plan.eigen.iter().map(|e| Term::var(e.clone())).collect();
        for f in active.iter().chain(self.premises) {
            for v in f.free_vars() {
                roots.insert(Term::var(v));
            }
        }
        base.extend(roots.iter().cloned());
        let depths: Vec<usize> = match self.cfg.instantiation_pool {
            InstantiationPool::SubtermsOnly => vec![0],
            InstantiationPool::SubtermsPlusRev => (0..=self.cfg.max_term_depth).collect(),
        };
        for d in depths {
            let terms = pool(&base, &roots, self.cfg.instantiation_pool, d);
            if let Some(p) = self.at_depth(&terms) {
                return Some(p);
            }
        }
        None
    }

    fn at_depth(&mut self, terms: &[Term]) -> Option<Proof> {
        let mut atoms = Atoms::default();
        let mut templates: Vec<Template> = Vec::new();
        let mut seen = HashSet::new();
        let mut gen = Generator {
            pool: terms,
            atoms: &mut atoms,
            out: &mut templates,
            seen: &mut seen,
            cap: self.cfg.max_instances,
            overflow: false,
        };
        for (i, s) in self.sources.iter().enumerate() {
            if !s.is_literal() {
                gen.source(i, s);
            }
        }
        let overflow = gen.overflow;
        self.stats.instantiations += templates.len();
        if overflow {
            self.budget_hit = true;
            return None;
        }
        for m in &self.plan.members {
            atoms.lit(m);
        }
        for s in &self.sources {
            if s.is_literal() {
                atoms.lit(s);
            }
        }
        let n = self.plan.members.len();
        for k in (0..n).rev() {
            let pending = self.pending(k);
            let tf = &self.plan.members[k];
            if pending.iter().any(|p| equiv(p, &tf.neg())) {
                continue;
            }
            let target = atoms.find(tf).unwrap();
            let mut trail = Trail::new(atoms.list.len());
            let mut clash = None;
            for (i, p) in pending.iter().enumerate() {
                if !p.is_literal() {
                    continue;
                }
                let l = atoms.find(p).unwrap();
                match trail.value(l) {
                    0 => trail.assign(l, Reason::Assumed(i)),
                    v if v < 0 => clash = Some(l),
                    _ => {}
                }
            }
            let mut solver = Solver { templates: &templates, target, propagations: 0 };
            let max_splits = self.cfg.max_depth.saturating_sub(pending.len()) / 2;
            let mut budget = self.cfg.max_splits_tried;
            for splits in 0..=max_splits {
                let node = match clash {
                    Some(l) => Some(Node { trail: trail.clone(), end: NodeEnd::Done(End::Conflict(Conflict::Assumptions(l))) }),
                    None => solver.solve(trail.clone(), splits, &mut budget),
                };
                if let Some(node) = node {
                    if let Some(p) = self.finish(&atoms, &templates, &pending, k, &node) {
                        self.stats.propagation_rounds += solver.propagations;
                        self.stats.splits_tried += self.cfg.max_splits_tried - budget;
                        return Some(p);
                    }
                    break;
                }
                if budget == 0 {
                    self.budget_hit = true;
                    break;
                }
            }
            self.stats.propagation_rounds += solver.propagations;
            self.stats.splits_tried += self.cfg.max_splits_tried - budget;
        }
        None
    }

    /// Emits the proof twice: once to learn which assumptions are cited, then
    /// with only those opened.
    fn finish(&mut self, atoms: &Atoms, templates: &[Template], pending: &[Formula], k: usize, node: &Node) -> Option<Proof> {
        let all: Vec<bool> = vec![true; pending.len()];
        let (lines, opened) = self.emit(atoms, templates, pending, &all, k, node);
        self.stats.lines_generated += lines.len();
        let cited: BTreeSet<usize> = lines.iter().flat_map(|l| l.just.cited.iter().copied()).collect();
        let used: Vec<bool> = opened.iter().map(|n| n.is_some_and(|n| cited.contains(&n))).collect();
        let (lines, _) = self.emit(atoms, templates, pending, &used, k, node);
        self.stats.lines_generated += lines.len();
        if lines.len() > self.cfg.max_lines {
            self.budget_hit = true;
            return None;
        }
        let proof = Proof { premises: self.premises.to_vec(), show: Some(self.goal.clone()), lines };
        if !check_proof(&proof).is_valid() || max_depth(&proof) > self.cfg.max_depth {
            return None;
        }
        Some(proof)
    }

    fn emit(
        &self,
        atoms: &Atoms,
        templates: &[Template],
        pending: &[Formula],
        open: &[bool],
        k: usize,
        node: &Node,
    ) -> (Vec<ProofLine>, Vec<Option<usize>>) {
        let mut e = Emitter::new(atoms, templates, &self.sources);
        for i in 0..self.premises.len() {
            e.open_source(i, Rule::Premise);
        }
        let n_antes = self.sources.len() - self.premises.len();
        let mut opened = vec![None; pending.len()];
        for (i, p) in pending.iter().enumerate() {
            if !open[i] {
                continue;
            }
            opened[i] = Some(if i < n_antes && !p.is_literal() {
                e.open_source(self.premises.len() + i, Rule::AssumedPremise)
            } else {
                e.open_literal(p.clone())
            });
        }
        let target = atoms.find(&self.plan.members[k]).unwrap();
        let mut line = e.node(node, target);

        // Rebuild the clause: innermost assumption first.
        let mut cur = self.plan.members[k].clone();
        let others: Vec<usize> = (0..self.plan.members.len()).filter(|&i| i != k).collect();
        for (j, &i) in others.iter().enumerate().rev() {
            let m = &self.plan.members[i];
            let cp = e.emit(Formula::implies(m.neg(), cur.clone()), Justification::new(Rule::Cp, vec![line]));
            cur = if j == 0 { self.plan.leaf.clone() } else { Formula::or(m.clone(), cur) };
            line = e.emit(cur.clone(), Justification::new(Rule::Imp, vec![cp]));
        }
        for lv in self.plan.levels.iter().rev() {
            line = match lv {
                Level::Forall { formula } => e.emit(formula.clone(), Justification::new(Rule::Ug, vec![line])),
                Level::Implies { formula, .. } => e.emit(formula.clone(), Justification::new(Rule::Cp, vec![line])),
            };
        }
        (e.lines, opened)
    }
}

/// Largest number of simultaneously open frames.
pub fn max_depth(p: &Proof) -> usize {
    let mut c = Checker::new(&p.sequent_premises());
    let mut best = 0;
    for l in &p.lines {
        match c.step(l) {
            Ok(d) => best = best.max(d),
            Err(_) => break,
        }
    }
    best
}

/// Proves each lemma from `premises`, then `goal` from the premises and
/// lemmas, and splices the pieces into one proof over `premises`.
pub fn prove_staged(premises: &[Formula], lemmas: &[Formula], goal: &Formula, cfg: &SearchConfig) -> SearchResult {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let mut parts = Vec::new();
    let mut extended = premises.to_vec();
    for lemma in lemmas {
        let r = prove(premises, lemma, cfg);
        stats.absorb(&r.stats);
        match r.status {
            SearchStatus::Proved(p) => parts.push(p),
            other => return SearchResult { status: other, stats },
        }
        extended.push(lemma.clone());
    }
    let r = prove(&extended, goal, cfg);
    stats.absorb(&r.stats);
    let status = match r.status {
        SearchStatus::Proved(p) => {
            parts.push(p);
            let proof = splice(premises, goal, &parts);
            if proof.lines.len() > cfg.max_lines {
                SearchStatus::BudgetExceeded
            } else if check_proof(&proof).is_valid() {
                SearchStatus::Proved(proof)
            } else {
                SearchStatus::Exhausted
            }
        }
        other => other,
    };
    stats.wall_time = start.elapsed();
    SearchResult { status, stats }
}

/// Concatenates proofs, pointing PREMISE lines of later parts at earlier
/// premise lines or lemma conclusions with the same formula.
fn splice(premises: &[Formula], goal: &Formula, parts: &[Proof]) -> Proof {
    let mut lines: Vec<ProofLine> = Vec::new();
    let mut known: Vec<(Formula, usize)> = Vec::new();
    for part in parts {
        let mut map = std::collections::HashMap::new();
        for l in &part.lines {
            if l.just.rule == Rule::Premise {
                if let Some((_, n)) = known.iter().find(|(f, _)| *f == l.formula) {
                    map.insert(l.number, *n);
                    continue;
                }
            }
            let n = lines.len() + 1;
            let mut just = l.just.clone();
            just.cited = just.cited.iter().map(|c| map[c]).collect();
            lines.push(ProofLine::new(n, l.formula.clone(), just));
            map.insert(l.number, n);
            if l.just.rule == Rule::Premise {
                known.push((l.formula.clone(), n));
            }
        }
        if let Some(c) = part.conclusion() {
            known.push((c.clone(), lines.len()));
        }
    }
    Proof { premises: premises.to_vec(), show: Some(goal.clone()), lines }
}

/// Lemmas worth proving first: `OO` for the second and third W-components
/// when the premises include `I5` and `ODO` but not `OO`.
pub fn suggested_lemmas(premises: &[Formula], goal: &Formula) -> Vec<Formula> {
    use crate::geometry::{axiom, name_of};
    let has = |n: &str| premises.iter().any(|p| name_of(p) == Some(n));
    match name_of(goal) {
        Some("W2" | "W3") if has("I5") && has("ODO") && !has("OO") => vec![axiom("OO").expect("catalog")],
        _ => Vec::new(),
    }
}
