use super::canon::{contradicts, equiv};
use super::*;
use crate::formula::{match_formula, negated_quantifier_view, substitute, Bindings, Formula, Term};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone)]
enum FrameKind {
    Assume,
    Case { disj: usize, label: Rule, side: Side, second: bool },
    Ee { source: usize, eigen: String },
}

#[derive(Debug, Clone)]
struct Frame {
    id: usize,
    line: usize,
    formula: Formula,
    kind: FrameKind,
}

#[derive(Debug, Clone)]
struct Entry {
    formula: Formula,
    frames: Vec<usize>,
    /// Assumption lines this line rests on.
    deps: BTreeSet<usize>,
}

enum FrameOp {
    Keep,
    Push(FrameKind),
    Pop(usize),
}

struct Outcome {
    deps: BTreeSet<usize>,
    op: FrameOp,
}

impl Outcome {
    fn keep(deps: BTreeSet<usize>) -> Outcome {
        Outcome { deps, op: FrameOp::Keep }
    }
}

/// Incremental checker: feed lines in order with [`Checker::step`].
#[derive(Debug, Clone)]
pub struct Checker {
    declared: Vec<Formula>,
    premise_lines: Vec<Formula>,
    entries: Vec<Entry>,
    stack: Vec<Frame>,
    next_frame: usize,
}

struct Ctx<'a> {
    line: &'a ProofLine,
}

impl Ctx<'_> {
    fn err(&self, kind: ViolationKind, description: impl Into<String>) -> Violation {
        Violation {
            line: self.line.number,
            kind,
            rule: Some(self.line.just.rule),
            description: format!("{}: {}", self.line.just.rule, description.into()),
            expected: None,
            found: Some(self.line.formula.to_string()),
        }
    }

    fn rule(&self, description: impl Into<String>) -> Violation {
        self.err(ViolationKind::Rule, description)
    }

    fn scope(&self, description: impl Into<String>) -> Violation {
        self.err(ViolationKind::Scope, description)
    }

    fn mismatch(&self, description: impl Into<String>, expected: &Formula) -> Violation {
        let mut v = self.rule(description);
        v.expected = Some(expected.to_string());
        v
    }

    fn target(&self) -> &Formula {
        &self.line.formula
    }
}

/// Right-nested disjunction, the shape IMP prints.
fn disjoin_right(items: Vec<Formula>) -> Formula {
    let mut it = items.into_iter().rev();
    let last = it.next().expect("nonempty");
    it.fold(last, |acc, f| Formula::or(f, acc))
}

fn and_nodes(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(l, r) => {
            let mut v = vec![f];
            v.extend(and_nodes(l));
            v.extend(and_nodes(r));
            v
        }
        _ => vec![f],
    }
}

fn all_terms(f: &Formula) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    f.walk(&mut |g| {
        if let Formula::Atom(_, args) = g {
            for a in args {
                a.subterms(&mut out);
            }
        }
    });
    out
}

fn union(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> BTreeSet<usize> {
    a.union(b).copied().collect()
}

impl Checker {
    /// `declared` premises restrict PREMISE lines; pass `&[]` to accept any.
    pub fn new(declared: &[Formula]) -> Checker {
        Checker { declared: declared.to_vec(), premise_lines: Vec::new(), entries: Vec::new(), stack: Vec::new(), next_frame: 0 }
    }

    pub fn depth(&self) -> usize {
        self.stack.len()
    }

    /// Line numbers of assumptions still open, innermost last.
    pub fn open_assumptions(&self) -> Vec<usize> {
        self.stack.iter().map(|f| f.line).collect()
    }

    fn in_scope(&self, e: &Entry) -> bool {
        e.frames.iter().all(|id| self.stack.iter().any(|f| f.id == *id))
    }

    fn cite(&self, ctx: &Ctx, n: usize) -> Result<&Entry, Violation> {
        if n == 0 || n >= ctx.line.number || n > self.entries.len() {
            return Err(ctx.scope(format!("cites line {n}, which does not precede it")));
        }
        let e = &self.entries[n - 1];
        if !self.in_scope(e) {
            return Err(ctx.scope(format!("line {n} is inside a closed subproof")));
        }
        Ok(e)
    }

    fn cites<const K: usize>(&self, ctx: &Ctx) -> Result<[(usize, &Entry); K], Violation> {
        let c = &ctx.line.just.cited;
        if c.len() != K {
            return Err(ctx.rule(format!("expects {K} cited line(s), found {}", c.len())));
        }
        let mut out = Vec::with_capacity(K);
        for &n in c {
            out.push((n, self.cite(ctx, n)?));
        }
        Ok(out.try_into().unwrap_or_else(|_| unreachable!()))
    }

    /// Variables that may not be generalized or substituted.
    fn restricted_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in self.stack.iter().map(|f| &f.formula).chain(&self.declared).chain(&self.premise_lines) {
            out.extend(f.free_vars());
        }
        out
    }

    fn no_annot(&self, ctx: &Ctx) -> Result<(), Violation> {
        if ctx.line.just.annot.is_empty() {
            Ok(())
        } else {
            Err(ctx.rule("takes no annotation"))
        }
    }

    /// Check one line and advance. Returns the line's depth.
    pub fn step(&mut self, line: &ProofLine) -> Result<usize, Violation> {
        let ctx = Ctx { line };
        if line.number != self.entries.len() + 1 {
            return Err(ctx.scope(format!("expected line number {}", self.entries.len() + 1)));
        }
        let out = self.apply(&ctx)?;
        match out.op {
            FrameOp::Keep => {}
            FrameOp::Push(kind) => {
                self.next_frame += 1;
                self.stack.push(Frame { id: self.next_frame, line: line.number, formula: line.formula.clone(), kind });
            }
            FrameOp::Pop(k) => {
                let len = self.stack.len();
                self.stack.truncate(len - k);
            }
        }
        if line.just.rule == Rule::Premise {
            self.premise_lines.push(line.formula.clone());
        }
        self.entries.push(Entry {
            formula: line.formula.clone(),
            frames: self.stack.iter().map(|f| f.id).collect(),
            deps: out.deps,
        });
        Ok(self.stack.len())
    }

    /// Errors if an assumption is still open.
    pub fn finish(&self) -> Result<(), Violation> {
        if let Some(f) = self.stack.last() {
            return Err(Violation {
                line: self.entries.len(),
                kind: ViolationKind::Scope,
                rule: None,
                description: format!("assumption at line {} is never discharged", f.line),
                expected: None,
                found: None,
            });
        }
        Ok(())
    }

    fn apply(&self, ctx: &Ctx) -> Result<Outcome, Violation> {
        let t = ctx.target();
        match ctx.line.just.rule {
            Rule::Premise => {
                self.cites::<0>(ctx)?;
                self.no_annot(ctx)?;
                if !self.stack.is_empty() {
                    return Err(ctx.scope("premise inside an open subproof"));
                }
                if !self.declared.is_empty() && !self.declared.iter().any(|p| equiv(p, t)) {
                    return Err(ctx.rule("not a declared premise"));
                }
                Ok(Outcome::keep(BTreeSet::new()))
            }
            Rule::AssumedPremise => {
                self.cites::<0>(ctx)?;
                self.no_annot(ctx)?;
                Ok(Outcome { deps: [ctx.line.number].into(), op: FrameOp::Push(FrameKind::Assume) })
            }
            Rule::Mp | Rule::Mt => self.modus(ctx),
            Rule::Imp => {
                let [(_, e)] = self.cites::<1>(ctx)?;
                self.no_annot(ctx)?;
                let Formula::Implies(a, b) = &e.formula else {
                    return Err(ctx.rule("cited line is not an implication"));
                };
                let mut items: Vec<Formula> = a.conjuncts().into_iter().map(Formula::neg).collect();
                items.push((**b).clone());
                let flat = disjoin_right(items);
                let plain = Formula::or(a.neg(), (**b).clone());
                if equiv(&flat, t) || equiv(&plain, t) {
                    Ok(Outcome::keep(e.deps.clone()))
                } else {
                    Err(ctx.mismatch("result mismatch", &flat))
                }
            }
            Rule::Lds | Rule::Rds => self.disjunctive_syllogism(ctx),
            Rule::Cp => {
                let [(_, e)] = self.cites::<1>(ctx)?;
                self.no_annot(ctx)?;
                let Formula::Implies(a, b) = t else {
                    return Err(ctx.rule("result is not an implication"));
                };
                if !equiv(b, &e.formula) {
                    let want = Formula::implies((**a).clone(), e.formula.clone());
                    return Err(ctx.mismatch("consequent differs from the cited line", &want));
                }
                match self.stack.last() {
                    Some(f) if matches!(f.kind, FrameKind::Assume) && equiv(a, &f.formula) => {
                        let mut deps = e.deps.clone();
                        deps.remove(&f.line);
                        Ok(Outcome { deps, op: FrameOp::Pop(1) })
                    }
                    // antecedent not the innermost assumption: plain weakening
                    _ => Ok(Outcome::keep(e.deps.clone())),
                }
            }
            Rule::Simp => {
                let [(_, e)] = self.cites::<1>(ctx)?;
                self.no_annot(ctx)?;
                if !matches!(e.formula, Formula::And(..)) {
                    return Err(ctx.rule("cited line is not a conjunction"));
                }
                if and_nodes(&e.formula).into_iter().skip(1).any(|n| equiv(n, t)) {
                    Ok(Outcome::keep(e.deps.clone()))
                } else {
                    Err(ctx.rule("not a conjunct of the cited line"))
                }
            }
            Rule::Case1 | Rule::Case2 => self.open_case(ctx),
            Rule::Cases => self.close_cases(ctx),
            Rule::DeMorgan => {
                let [(_, e)] = self.cites::<1>(ctx)?;
                self.no_annot(ctx)?;
                let (flat, binary) = match &e.formula {
                    Formula::Not(g) => match &**g {
                        Formula::And(l, r) => (
                            Formula::disjoin(g.conjuncts().into_iter().map(Formula::neg)).unwrap(),
                            Formula::or(l.neg(), r.neg()),
                        ),
                        Formula::Or(l, r) => (
                            Formula::conjoin(g.disjuncts().into_iter().map(Formula::neg)).unwrap(),
                            Formula::and(l.neg(), r.neg()),
                        ),
                        _ => return Err(ctx.rule("cited line is not a negated conjunction or disjunction")),
                    },
                    _ => return Err(ctx.rule("cited line is not a negated conjunction or disjunction")),
                };
                if equiv(&flat, t) || equiv(&binary, t) {
                    Ok(Outcome::keep(e.deps.clone()))
                } else {
                    Err(ctx.mismatch("result mismatch", &binary))
                }
            }
            Rule::DistributiveLaw => {
                let [(_, e)] = self.cites::<1>(ctx)?;
                self.no_annot(ctx)?;
                let cands = distribute(&e.formula);
                if cands.is_empty() {
                    return Err(ctx.rule("nothing to distribute in the cited line"));
                }
                if cands.iter().any(|c| equiv(c, t)) {
                    Ok(Outcome::keep(e.deps.clone()))
                } else {
                    Err(ctx.mismatch("result mismatch", &cands[0]))
                }
            }
            Rule::Same => {
                let [(_, e)] = self.cites::<1>(ctx)?;
                self.no_annot(ctx)?;
                if equiv(&e.formula, t) {
                    Ok(Outcome::keep(e.deps.clone()))
                } else {
                    Err(ctx.mismatch("differs from the cited line", &e.formula))
                }
            }
            Rule::Us => self.us(ctx),
            Rule::Ug => self.ug(ctx),
            Rule::Eg => self.eg(ctx),
            Rule::Ee => self.ee(ctx),
            Rule::Sub => self.sub(ctx),
        }
    }
}

/// Every formula one distribution step turns `f` into.
fn distribute(f: &Formula) -> Vec<Formula> {
    let mut out = Vec::new();
    match f {
        Formula::Or(l, r) => {
            if let Formula::And(a, b) = &**l {
                out.push(Formula::and(Formula::or((**a).clone(), (**r).clone()), Formula::or((**b).clone(), (**r).clone())));
            }
            if let Formula::And(a, b) = &**r {
                out.push(Formula::and(Formula::or((**l).clone(), (**a).clone()), Formula::or((**l).clone(), (**b).clone())));
            }
            let members = f.disjuncts();
            for (k, m) in members.iter().enumerate() {
                if matches!(m, Formula::And(..)) {
                    let rest: Vec<Formula> =
                        members.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, g)| (*g).clone()).collect();
                    let parts = m.conjuncts().into_iter().map(|c| {
                        Formula::disjoin(std::iter::once(c.clone()).chain(rest.iter().cloned())).unwrap()
                    });
                    out.push(Formula::conjoin(parts).unwrap());
                }
            }
        }
        Formula::And(l, r) => {
            if let Formula::Or(a, b) = &**l {
                out.push(Formula::or(Formula::and((**a).clone(), (**r).clone()), Formula::and((**b).clone(), (**r).clone())));
            }
            if let Formula::Or(a, b) = &**r {
                out.push(Formula::or(Formula::and((**l).clone(), (**a).clone()), Formula::and((**l).clone(), (**b).clone())));
            }
        }
        _ => {}
    }
    out
}

fn one_var(v: &str) -> BTreeSet<String> {
    [v.to_string()].into()
}

impl Checker {
    fn modus(&self, ctx: &Ctx) -> Result<Outcome, Violation> {
        let [(_, e1), (_, e2)] = self.cites::<2>(ctx)?;
        self.no_annot(ctx)?;
        let mp = ctx.line.just.rule == Rule::Mp;
        let mut expected = None;
        for (imp, other) in [(e1, e2), (e2, e1)] {
            let Formula::Implies(a, b) = &imp.formula else { continue };
            let (fits, result) = if mp {
                (equiv(a, &other.formula), (**b).clone())
            } else {
                (contradicts(b, &other.formula), Formula::not((**a).clone()))
            };
            if fits {
                if equiv(&result, ctx.target()) {
                    return Ok(Outcome::keep(union(&imp.deps, &other.deps)));
                }
                expected.get_or_insert(result);
            }
        }
        match expected {
            Some(want) => Err(ctx.mismatch("result mismatch", &want)),
            None if mp => Err(ctx.rule("antecedent mismatch")),
            None => Err(ctx.rule("no cited line contradicts the consequent")),
        }
    }

    fn disjunctive_syllogism(&self, ctx: &Ctx) -> Result<Outcome, Violation> {
        let [(_, e1), (_, e2)] = self.cites::<2>(ctx)?;
        self.no_annot(ctx)?;
        let left = ctx.line.just.rule == Rule::Lds;
        let mut expected = None;
        for (d, x) in [(e1, e2), (e2, e1)] {
            let Formula::Or(l, r) = &d.formula else { continue };
            let (elim, keep) = if left { (l, r) } else { (r, l) };
            let members = elim.disjuncts();
            for (k, m) in members.iter().enumerate() {
                if !contradicts(m, &x.formula) {
                    continue;
                }
                let mut rest: Vec<Formula> =
                    members.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, g)| (*g).clone()).collect();
                if left {
                    rest.push((**keep).clone());
                } else {
                    rest.insert(0, (**keep).clone());
                }
                let result = Formula::disjoin(rest).unwrap();
                if equiv(&result, ctx.target()) {
                    return Ok(Outcome::keep(union(&d.deps, &x.deps)));
                }
                expected.get_or_insert(result);
            }
        }
        match expected {
            Some(want) => Err(ctx.mismatch("result mismatch", &want)),
            None => Err(ctx.rule(format!(
                "no cited line contradicts a {} disjunct",
                if left { "left" } else { "right" }
            ))),
        }
    }

    fn open_case(&self, ctx: &Ctx) -> Result<Outcome, Violation> {
        let [(d, e)] = self.cites::<1>(ctx)?;
        self.no_annot(ctx)?;
        let Formula::Or(l, r) = &e.formula else {
            return Err(ctx.rule("cited line is not a disjunction"));
        };
        let t = ctx.target();
        let sides: Vec<Side> =
            [(Side::Left, &**l), (Side::Right, &**r)].into_iter().filter(|(_, g)| equiv(g, t)).map(|(s, _)| s).collect();
        if sides.is_empty() {
            return Err(ctx.rule(format!("not a disjunct of line {d}")));
        }
        let label = ctx.line.just.rule;
        let partner = match self.stack.last() {
            Some(Frame { kind: FrameKind::Case { disj, label: pl, side, second: false }, .. }) if *disj == d => {
                Some((*pl, *side))
            }
            _ => None,
        };
        let (side, second) = match partner {
            Some((pl, _)) if pl == label => {
                return Err(ctx.scope(format!("{label} for line {d} is already open")));
            }
            Some((_, ps)) => match sides.iter().find(|s| **s != ps) {
                Some(s) => (*s, true),
                None => return Err(ctx.rule(format!("both cases of line {d} assume the same disjunct"))),
            },
            None => (sides[0], false),
        };
        let mut deps = e.deps.clone();
        deps.insert(ctx.line.number);
        Ok(Outcome { deps, op: FrameOp::Push(FrameKind::Case { disj: d, label, side, second }) })
    }

    fn close_cases(&self, ctx: &Ctx) -> Result<Outcome, Violation> {
        let [(d, ed), (_, ex), (_, ey)] = self.cites::<3>(ctx)?;
        self.no_annot(ctx)?;
        let n = self.stack.len();
        let pair = (n >= 2).then(|| (&self.stack[n - 2], &self.stack[n - 1]));
        let (ca, cb) = match pair {
            Some((
                a @ Frame { kind: FrameKind::Case { disj: da, second: false, .. }, .. },
                b @ Frame { kind: FrameKind::Case { disj: db, second: true, .. }, .. },
            )) if *da == d && *db == d => (a.line, b.line),
            _ => return Err(ctx.scope(format!("the two case branches of line {d} are not the innermost open subproofs"))),
        };
        if !equiv(&ex.formula, &ey.formula) {
            return Err(ctx.mismatch("branch conclusions differ", &ex.formula));
        }
        if !equiv(&ex.formula, ctx.target()) {
            return Err(ctx.mismatch("result differs from the branch conclusions", &ex.formula));
        }
        let minus = |s: &BTreeSet<usize>, k: usize| s.iter().copied().filter(|&i| i != k).collect::<BTreeSet<_>>();
        let deps = if !ex.deps.contains(&cb) && !ey.deps.contains(&ca) {
            union(&ed.deps, &union(&minus(&ex.deps, ca), &minus(&ey.deps, cb)))
        } else if !ex.deps.contains(&ca) && !ey.deps.contains(&cb) {
            union(&ed.deps, &union(&minus(&ex.deps, cb), &minus(&ey.deps, ca)))
        } else {
            return Err(ctx.rule("a branch conclusion rests on the other branch's case"));
        };
        Ok(Outcome { deps, op: FrameOp::Pop(2) })
    }

    fn single_annot<'a>(&self, ctx: &Ctx<'a>) -> Result<Option<&'a Annotation>, Violation> {
        match ctx.line.just.annot.as_slice() {
            [] => Ok(None),
            [a] => Ok(Some(a)),
            _ => Err(ctx.rule("takes at most one annotation")),
        }
    }

    fn us(&self, ctx: &Ctx) -> Result<Outcome, Violation> {
        let [(_, e)] = self.cites::<1>(ctx)?;
        let annot = self.single_annot(ctx)?;
        let view = negated_quantifier_view(&e.formula);
        let Formula::Forall(v, body) = &view else {
            return Err(ctx.rule("cited line is not universally quantified"));
        };
        let t = ctx.target();
        let inst = |term: &Term| substitute(body, &Bindings::from([(v.clone(), term.clone())]));
        if let Some(a) = annot {
            if &a.var != v {
                return Err(ctx.rule(format!("annotation variable `{}` is not the bound variable `{v}`", a.var)));
            }
            let want = inst(&a.term);
            return if equiv(&want, t) { Ok(Outcome::keep(e.deps.clone())) } else { Err(ctx.mismatch("result mismatch", &want)) };
        }
        let mut b = Bindings::new();
        let mut cands: Vec<Term> = Vec::new();
        if match_formula(body, t, &one_var(v), &mut b) {
            cands.push(b.get(v).cloned().unwrap_or_else(|| Term::var(v.clone())));
        }
        cands.extend(all_terms(t));
        if cands.iter().any(|c| equiv(&inst(c), t)) {
            Ok(Outcome::keep(e.deps.clone()))
        } else {
            Err(ctx.rule("not an instance of the cited line"))
        }
    }

    fn ug(&self, ctx: &Ctx) -> Result<Outcome, Violation> {
        let [(_, e)] = self.cites::<1>(ctx)?;
        let t = ctx.target();
        let mut bound = Vec::new();
        let mut body = t;
        while let Formula::Forall(u, g) = body {
            bound.push(u.clone());
            body = g;
        }
        if bound.is_empty() {
            return Err(ctx.rule("result is not universally quantified"));
        }
        let restricted = self.restricted_vars();
        let target_free = t.free_vars();
        let mut last_err = None;
        for j in (1..=bound.len()).rev() {
            let vars: BTreeSet<String> = bound[..j].iter().cloned().collect();
            if vars.len() != j {
                continue;
            }
            // strip j quantifiers
            let mut pattern = t;
            for _ in 0..j {
                let Formula::Forall(_, g) = pattern else { unreachable!() };
                pattern = g;
            }
            let mut b = Bindings::new();
            if !match_formula(pattern, &e.formula, &vars, &mut b) {
                continue;
            }
            let mut image = BTreeSet::new();
            let mut ok = true;
            for term in b.values() {
                match term {
                    Term::Var(x) if image.insert(x.clone()) => {}
                    _ => ok = false,
                }
            }
            for a in &ctx.line.just.annot {
                if b.get(&a.var) != Some(&a.term) {
                    ok = false;
                }
            }
            if !ok || !equiv(&substitute(pattern, &b), &e.formula) {
                continue;
            }
            if let Some(x) = image.iter().find(|x| restricted.contains(*x)) {
                last_err = Some(ctx.rule(format!("variable `{x}` is free in a premise or open assumption")));
                continue;
            }
            if let Some(x) = image.iter().find(|x| target_free.contains(*x)) {
                last_err = Some(ctx.rule(format!("variable `{x}` is still free in the result")));
                continue;
            }
            return Ok(Outcome::keep(e.deps.clone()));
        }
        Err(last_err.unwrap_or_else(|| ctx.rule("not a generalization of the cited line")))
    }

    fn eg(&self, ctx: &Ctx) -> Result<Outcome, Violation> {
        let [(_, e)] = self.cites::<1>(ctx)?;
        let annot = self.single_annot(ctx)?;
        let s = &e.formula;
        let t = ctx.target();
        let members: Vec<&Formula> = t.disjuncts();
        let mut positions: Vec<Option<usize>> = vec![None];
        if members.len() > 1 {
            positions.extend((0..members.len()).map(Some));
        }
        for pos in positions {
            let q = match pos {
                None => t,
                Some(k) => members[k],
            };
            let Formula::Exists(v, body) = q else { continue };
            if let Some(a) = annot {
                if &a.var != v {
                    continue;
                }
            }
            let mut cands: Vec<Term> = Vec::new();
            match annot {
                Some(a) => cands.push(a.term.clone()),
                None => {
                    for m in std::iter::once(s).chain(s.disjuncts()) {
                        let mut b = Bindings::new();
                        if match_formula(body, m, &one_var(v), &mut b) {
                            cands.extend(b.get(v).cloned());
                        }
                    }
                    cands.extend(all_terms(s));
                }
            }
            for c in cands {
                let inst = substitute(body, &Bindings::from([(v.clone(), c)]));
                let rebuilt = match pos {
                    None => inst,
                    Some(k) => Formula::disjoin(
                        members.iter().enumerate().map(|(i, m)| if i == k { inst.clone() } else { (*m).clone() }),
                    )
                    .unwrap(),
                };
                if equiv(&rebuilt, s) {
                    return Ok(Outcome::keep(e.deps.clone()));
                }
            }
        }
        Err(ctx.rule("not an existential generalization of the cited line"))
    }

    fn ee(&self, ctx: &Ctx) -> Result<Outcome, Violation> {
        let annot = self.single_annot(ctx)?;
        let t = ctx.target();
        match ctx.line.just.cited.len() {
            1 => {
                let [(_, e)] = self.cites::<1>(ctx)?;
                let view = negated_quantifier_view(&e.formula);
                let Formula::Exists(v, body) = &view else {
                    return Err(ctx.rule("cited line is not existentially quantified"));
                };
                let mut b = Bindings::new();
                if let Some(a) = annot {
                    b.insert(a.var.clone(), a.term.clone());
                } else if !match_formula(body, t, &one_var(v), &mut b) {
                    return Err(ctx.rule("not an instance of the cited line"));
                }
                let Some(Term::Var(c)) = b.get(v).cloned() else {
                    return Err(ctx.rule("the witness must be a variable"));
                };
                if !equiv(&substitute(body, &b), t) {
                    return Err(ctx.rule("not an instance of the cited line"));
                }
                let used = self.entries.iter().map(|x| &x.formula).chain(&self.declared).any(|f| f.has_free(&c));
                if used {
                    return Err(ctx.rule(format!("witness `{c}` is not fresh")));
                }
                let source = ctx.line.just.cited[0];
                let mut deps = e.deps.clone();
                deps.insert(ctx.line.number);
                Ok(Outcome { deps, op: FrameOp::Push(FrameKind::Ee { source, eigen: c }) })
            }
            2 => {
                let [(n1, e1), (n2, e2)] = self.cites::<2>(ctx)?;
                let Some(Frame { kind: FrameKind::Ee { source, eigen }, line: open, .. }) = self.stack.last() else {
                    return Err(ctx.scope("no open EE subproof"));
                };
                let (es, em) = if *source == n1 {
                    (e1, e2)
                } else if *source == n2 {
                    (e2, e1)
                } else {
                    return Err(ctx.scope(format!("the open EE subproof was started from line {source}")));
                };
                if t.has_free(eigen) {
                    return Err(ctx.rule(format!("witness `{eigen}` escapes its subproof")));
                }
                if !equiv(&em.formula, t) {
                    return Err(ctx.mismatch("result differs from the subproof conclusion", &em.formula));
                }
                let mut rest = em.deps.clone();
                rest.remove(open);
                Ok(Outcome { deps: union(&es.deps, &rest), op: FrameOp::Pop(1) })
            }
            k => Err(ctx.rule(format!("expects 1 or 2 cited lines, found {k}"))),
        }
    }

    fn sub(&self, ctx: &Ctx) -> Result<Outcome, Violation> {
        let [(_, e)] = self.cites::<1>(ctx)?;
        let p = &e.formula;
        let t = ctx.target();
        let free = p.free_vars();
        let mut b = Bindings::new();
        if ctx.line.just.annot.is_empty() {
            if !match_formula(p, t, &free, &mut b) {
                return Err(ctx.rule("not a substitution instance of the cited line"));
            }
        } else {
            for a in &ctx.line.just.annot {
                if !free.contains(&a.var) {
                    return Err(ctx.rule(format!("`{}` is not free in the cited line", a.var)));
                }
                b.insert(a.var.clone(), a.term.clone());
            }
        }
        b.retain(|v, term| *term != Term::Var(v.clone()));
        let restricted = self.restricted_vars();
        if let Some(v) = b.keys().find(|v| restricted.contains(*v)) {
            return Err(ctx.rule(format!("variable `{v}` is free in a premise or open assumption")));
        }
        let want = substitute(p, &b);
        if equiv(&want, t) {
            Ok(Outcome::keep(e.deps.clone()))
        } else {
            Err(ctx.mismatch("result mismatch", &want))
        }
    }
}

fn run(p: &Proof) -> Result<Checker, Violation> {
    let mut c = Checker::new(&p.premises);
    for line in &p.lines {
        c.step(line)?;
    }
    Ok(c)
}

/// Check `line` as the next line after the lines of `prefix`.
pub fn check_line(prefix: &Proof, line: &ProofLine) -> Result<(), Violation> {
    run(prefix)?.step(line).map(|_| ())
}

/// Check every line, then that all assumptions are discharged and the
/// declared goal (if any) is reached.
pub fn check_proof(p: &Proof) -> Report {
    let checked = run(p).and_then(|c| c.finish());
    if let Err(v) = checked {
        return Report::FirstFailure(v);
    }
    let Some(conclusion) = p.conclusion().cloned() else {
        return Report::FirstFailure(Violation {
            line: 0,
            kind: ViolationKind::Scope,
            rule: None,
            description: "empty proof".into(),
            expected: None,
            found: None,
        });
    };
    if let Some(show) = &p.show {
        if !equiv(show, &conclusion) {
            return Report::FirstFailure(Violation {
                line: p.lines.len(),
                kind: ViolationKind::Rule,
                rule: None,
                description: "final line does not match the SHOW goal".into(),
                expected: Some(show.to_string()),
                found: Some(conclusion.to_string()),
            });
        }
    }
    Report::Valid { sequent: Sequent { premises: p.sequent_premises(), conclusion } }
}
