//! The six shipped proofs and the sequents they are meant to establish.

use crate::formula::Formula;
use crate::geometry::{axiom, GeometryError};
use crate::kernel::{equiv, parse_proof, Proof, ScriptError, Sequent};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown corpus entry `{0}`")]
    UnknownId(String),
    #[error("corpus entry `{id}`: {source}")]
    Parse { id: String, source: ScriptError },
    #[error("corpus entry `{id}`: {source}")]
    Io { id: String, source: std::io::Error },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy)]
pub struct CorpusEntry {
    pub id: &'static str,
    /// Catalog names of the premises.
    pub premises: &'static [&'static str],
    pub goal: &'static str,
    /// Premises appear as the antecedent of the final implication rather than
    /// as PREMISE lines.
    pub discharged: bool,
    pub expected_lines: usize,
    pub file: &'static str,
    pub script: &'static str,
}

const ENTRIES: [CorpusEntry; 6] = [
    CorpusEntry {
        id: "A",
        premises: &["I6"],
        goal: "W1",
        discharged: true,
        expected_lines: 17,
        file: "a.prf",
        script: include_str!("../corpus/v1/a.prf"),
    },
    CorpusEntry {
        id: "B1",
        premises: &["ODO", "I5"],
        goal: "OO",
        discharged: false,
        expected_lines: 16,
        file: "b1.prf",
        script: include_str!("../corpus/v1/b1.prf"),
    },
    CorpusEntry {
        id: "B2",
        premises: &["I5", "OO", "I6"],
        goal: "W2",
        discharged: true,
        expected_lines: 29,
        file: "b2.prf",
        script: include_str!("../corpus/v1/b2.prf"),
    },
    CorpusEntry {
        id: "C",
        premises: &["I5", "I6", "ODO"],
        goal: "W3",
        discharged: true,
        expected_lines: 44,
        file: "c.prf",
        script: include_str!("../corpus/v1/c.prf"),
    },
    CorpusEntry {
        id: "D",
        premises: &["I6"],
        goal: "W4",
        discharged: true,
        expected_lines: 17,
        file: "d.prf",
        script: include_str!("../corpus/v1/d.prf"),
    },
    CorpusEntry {
        id: "E",
        premises: &["I8", "ODO", "I7"],
        goal: "I6",
        discharged: true,
        expected_lines: 52,
        file: "e.prf",
        script: include_str!("../corpus/v1/e.prf"),
    },
];

pub fn entries() -> &'static [CorpusEntry] {
    &ENTRIES
}

pub fn entry(id: &str) -> Result<&'static CorpusEntry, CorpusError> {
    ENTRIES.iter().find(|e| e.id.eq_ignore_ascii_case(id)).ok_or_else(|| CorpusError::UnknownId(id.to_string()))
}

impl CorpusEntry {
    /// The sequent the proof should certify, built from catalog names.
    pub fn declared_sequent(&self) -> Result<Sequent, CorpusError> {
        let ps = self.premises.iter().map(|n| axiom(n)).collect::<Result<Vec<_>, _>>()?;
        let goal = axiom(self.goal)?;
        Ok(if self.discharged {
            let ante = Formula::conjoin(ps).expect("at least one premise");
            Sequent { premises: Vec::new(), conclusion: Formula::implies(ante, goal) }
        } else {
            Sequent { premises: ps, conclusion: goal }
        })
    }

    pub fn parse(&self) -> Result<Proof, CorpusError> {
        parse_proof(self.script).map_err(|source| CorpusError::Parse { id: self.id.to_string(), source })
    }
}

/// Equal up to [`equiv`], premises in any order.
pub fn sequent_matches(a: &Sequent, b: &Sequent) -> bool {
    if a.premises.len() != b.premises.len() || !equiv(&a.conclusion, &b.conclusion) {
        return false;
    }
    let mut used = vec![false; b.premises.len()];
    a.premises.iter().all(|p| {
        match (0..b.premises.len()).find(|&i| !used[i] && equiv(p, &b.premises[i])) {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}

/// Parsed proof and declared sequent of a shipped entry.
pub fn load(id: &str) -> Result<(Proof, Sequent), CorpusError> {
    let e = entry(id)?;
    Ok((e.parse()?, e.declared_sequent()?))
}

/// As [`load`], reading the script from `dir` instead of the built-in copy.
pub fn load_from_dir(dir: &Path, id: &str) -> Result<(Proof, Sequent), CorpusError> {
    let e = entry(id)?;
    let src = std::fs::read_to_string(dir.join(e.file)).map_err(|source| CorpusError::Io { id: e.id.to_string(), source })?;
    let proof = parse_proof(&src).map_err(|source| CorpusError::Parse { id: e.id.to_string(), source })?;
    Ok((proof, e.declared_sequent()?))
}
