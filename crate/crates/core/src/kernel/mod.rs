//! Proof objects and the line-by-line rule checker.

mod canon;
mod check;
mod script;

pub use canon::{canonical, contradicts, equiv, Canon};
pub use check::{check_line, check_proof, Checker};
pub use script::{parse_proof, parse_proof_with, print_proof, ScriptError};

use crate::formula::{Formula, Term};
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    Premise,
    AssumedPremise,
    Mp,
    Mt,
    Imp,
    Lds,
    Rds,
    Cp,
    Simp,
    Case1,
    Case2,
    Cases,
    DeMorgan,
    DistributiveLaw,
    Same,
    Us,
    Ug,
    Eg,
    Ee,
    Sub,
}

impl Rule {
    pub const ALL: [Rule; 20] = [
        Rule::Premise,
        Rule::AssumedPremise,
        Rule::Mp,
        Rule::Mt,
        Rule::Imp,
        Rule::Lds,
        Rule::Rds,
        Rule::Cp,
        Rule::Simp,
        Rule::Case1,
        Rule::Case2,
        Rule::Cases,
        Rule::DeMorgan,
        Rule::DistributiveLaw,
        Rule::Same,
        Rule::Us,
        Rule::Ug,
        Rule::Eg,
        Rule::Ee,
        Rule::Sub,
    ];

    /// Spelling used when printing scripts.
    pub fn name(self) -> &'static str {
        match self {
            Rule::Premise => "PREMISE",
            Rule::AssumedPremise => "ASSUMED-PREMISE",
            Rule::Mp => "MP",
            Rule::Mt => "MT",
            Rule::Imp => "IMP",
            Rule::Lds => "LDS",
            Rule::Rds => "RDS",
            Rule::Cp => "CP",
            Rule::Simp => "SIMP",
            Rule::Case1 => "CASE1",
            Rule::Case2 => "CASE2",
            Rule::Cases => "CASES",
            Rule::DeMorgan => "DE.MORGAN",
            Rule::DistributiveLaw => "DISTRIBUTIVE-LAW",
            Rule::Same => "SAME",
            Rule::Us => "US",
            Rule::Ug => "UG",
            Rule::Eg => "EG",
            Rule::Ee => "EE",
            Rule::Sub => "SUB",
        }
    }

    /// Accepts the printed names plus `_`/`-`/`.` spelling variants, any case.
    pub fn from_name(s: &str) -> Option<Rule> {
        let key: String = s.chars().filter(|c| !matches!(c, '-' | '_' | '.')).collect::<String>().to_ascii_uppercase();
        Some(match key.as_str() {
            "PREMISE" => Rule::Premise,
            "ASSUMEDPREMISE" | "ASSUMPTION" => Rule::AssumedPremise,
            "MP" => Rule::Mp,
            "MT" => Rule::Mt,
            "IMP" => Rule::Imp,
            "LDS" => Rule::Lds,
            "RDS" => Rule::Rds,
            "CP" => Rule::Cp,
            "SIMP" => Rule::Simp,
            "CASE1" => Rule::Case1,
            "CASE2" => Rule::Case2,
            "CASES" => Rule::Cases,
            "DEMORGAN" => Rule::DeMorgan,
            "DISTRIBUTIVELAW" | "DISTRIBUTIVE" => Rule::DistributiveLaw,
            "SAME" => Rule::Same,
            "US" => Rule::Us,
            "UG" => Rule::Ug,
            "EG" => Rule::Eg,
            "EE" => Rule::Ee,
            "SUB" => Rule::Sub,
            _ => return None,
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `(t v)`. For US/EG/SUB: `t` stands for `v`. For UG: free variable `t` becomes bound `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Annotation {
    pub term: Term,
    pub var: String,
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {})", self.term.call_notation(), self.var)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Justification {
    pub rule: Rule,
    pub cited: Vec<usize>,
    pub annot: Vec<Annotation>,
}

impl Justification {
    pub fn new(rule: Rule, cited: Vec<usize>) -> Justification {
        Justification { rule, cited, annot: Vec::new() }
    }

    pub fn with_annot(mut self, term: Term, var: impl Into<String>) -> Justification {
        self.annot.push(Annotation { term, var: var.into() });
        self
    }
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.rule.name())?;
        for a in &self.annot {
            write!(f, " {a}")?;
        }
        for c in &self.cited {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub number: usize,
    pub formula: Formula,
    pub just: Justification,
    /// Open-frame count after this line; filled in by the checker.
    pub depth: usize,
}

impl ProofLine {
    pub fn new(number: usize, formula: Formula, just: Justification) -> ProofLine {
        ProofLine { number, formula, just, depth: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Proof {
    /// Declared premises. When empty, the formulas of PREMISE lines are used.
    pub premises: Vec<Formula>,
    /// Declared goal, if any.
    pub show: Option<Formula>,
    pub lines: Vec<ProofLine>,
}

impl Proof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    /// Premises of the certified sequent.
    pub fn sequent_premises(&self) -> Vec<Formula> {
        if !self.premises.is_empty() {
            return self.premises.clone();
        }
        self.lines.iter().filter(|l| l.just.rule == Rule::Premise).map(|l| l.formula.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequent {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
        if ps.is_empty() {
            write!(f, "|- {}", self.conclusion)
        } else {
            write!(f, "{} |- {}", ps.join(", "), self.conclusion)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    /// The rule does not produce the line from its citations.
    Rule,
    /// Citation or assumption-structure problem.
    Scope,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub line: usize,
    pub kind: ViolationKind,
    pub rule: Option<Rule>,
    pub description: String,
    pub expected: Option<String>,
    pub found: Option<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ViolationKind::Rule => "rule",
            ViolationKind::Scope => "scope",
        };
        write!(f, "line {}: {kind} violation", self.line)?;
        if let Some(r) = self.rule {
            write!(f, " ({r})")?;
        }
        write!(f, ": {}", self.description)?;
        if let Some(e) = &self.expected {
            write!(f, "; expected `{e}`")?;
        }
        if let Some(x) = &self.found {
            write!(f, "; found `{x}`")?;
        }
        Ok(())
    }
}

impl std::error::Error for Violation {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Report {
    Valid { sequent: Sequent },
    FirstFailure(Violation),
}

impl Report {
    pub fn is_valid(&self) -> bool {
        matches!(self, Report::Valid { .. })
    }
}
