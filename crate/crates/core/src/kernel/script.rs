//! Proof-script text format. See `docs/grammar.md`.

use super::check::Checker;
use super::{Annotation, Justification, Proof, ProofLine, Rule};
use crate::formula::{parse_formula_with, parse_term_with, Formula, Signature};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("script line {line}: {message}")]
pub struct ScriptError {
    /// 1-based physical line where the entry starts.
    pub line: usize,
    pub message: String,
}

enum Kind {
    Show,
    Premise,
    Numbered(usize),
}

struct Entry {
    kind: Kind,
    line: usize,
    text: String,
}

fn numbered_prefix(l: &str) -> Option<(usize, &str)> {
    let digits = l.len() - l.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    if digits == 0 {
        return None;
    }
    let rest = &l[digits..];
    let after = rest.strip_prefix('.')?;
    if !after.is_empty() && !after.starts_with(char::is_whitespace) {
        return None;
    }
    Some((l[..digits].parse().ok()?, after))
}

fn header<'a>(l: &'a str, key: &str) -> Option<&'a str> {
    let head = l.get(..key.len())?;
    head.eq_ignore_ascii_case(key).then(|| &l[key.len()..])
}

fn split_entries(src: &str) -> Result<Vec<Entry>, ScriptError> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (kind, text) = if let Some(rest) = header(l, "SHOW:") {
            (Kind::Show, rest)
        } else if let Some(rest) = header(l, "PREMISE:") {
            (Kind::Premise, rest)
        } else if let Some((n, rest)) = numbered_prefix(l) {
            (Kind::Numbered(n), rest)
        } else {
            match out.last_mut() {
                Some(e) => {
                    e.text.push(' ');
                    e.text.push_str(l);
                    continue;
                }
                None => return Err(ScriptError { line: i + 1, message: format!("unexpected text `{l}`") }),
            }
        };
        out.push(Entry { kind, line: i + 1, text: text.trim().to_string() });
    }
    Ok(out)
}

fn parse_suffix(s: &str, sig: &Signature) -> Result<(Vec<Annotation>, Vec<usize>), String> {
    let mut annot = Vec::new();
    let mut cited = Vec::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if b[i] == b'(' {
            let mut depth = 0;
            let mut j = i;
            loop {
                match b.get(j) {
                    Some(b'(') => depth += 1,
                    Some(b')') => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    Some(_) => {}
                    None => return Err("unbalanced annotation".into()),
                }
                j += 1;
            }
            let inner = s[i + 1..j].trim();
            let (term, var) = inner.rsplit_once(char::is_whitespace).ok_or("annotation needs `(term var)`")?;
            let term = parse_term_with(term.trim(), sig).map_err(|e| e.to_string())?;
            let var = var.trim();
            if !var.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) || !var.chars().all(|c| c.is_ascii_alphanumeric()) {
                return Err(format!("`{var}` is not a variable"));
            }
            annot.push(Annotation { term, var: var.to_string() });
            i = j + 1;
        } else {
            let j = s[i..].find(char::is_whitespace).map_or(s.len(), |k| i + k);
            let n: usize = s[i..j].parse().map_err(|_| format!("`{}` is not a line number", &s[i..j]))?;
            cited.push(n);
            i = j;
        }
    }
    Ok((annot, cited))
}

fn parse_numbered(text: &str, sig: &Signature) -> Result<(Formula, Justification), String> {
    let words: Vec<(usize, &str)> = text
        .split_whitespace()
        .map(|w| (w.as_ptr() as usize - text.as_ptr() as usize, w))
        .collect();
    for &(pos, w) in words.iter().rev() {
        let Some(rule) = Rule::from_name(w) else { continue };
        let Ok((annot, cited)) = parse_suffix(&text[pos + w.len()..], sig) else { continue };
        let body = text[..pos].trim();
        if body.is_empty() {
            return Err("missing formula".into());
        }
        let f = parse_formula_with(body, sig).map_err(|e| e.to_string())?;
        return Ok((f, Justification { rule, cited, annot }));
    }
    Err("missing or malformed justification".into())
}

fn parse_header_formula(text: &str, sig: &Signature) -> Result<Formula, String> {
    let t = text.trim().trim_end_matches([';', '.']).trim();
    parse_formula_with(t, sig).map_err(|e| e.to_string())
}

/// Parse a proof script over the geometry signature.
pub fn parse_proof(src: &str) -> Result<Proof, ScriptError> {
    parse_proof_with(src, &Signature::geometry())
}

pub fn parse_proof_with(src: &str, sig: &Signature) -> Result<Proof, ScriptError> {
    let mut proof = Proof::default();
    let mut seen_line = false;
    for e in split_entries(src)? {
        let err = |message: String| ScriptError { line: e.line, message };
        match e.kind {
            Kind::Show | Kind::Premise if seen_line => {
                return Err(err("header entries must precede numbered lines".into()))
            }
            Kind::Show => {
                if proof.show.is_some() {
                    return Err(err("more than one SHOW".into()));
                }
                proof.show = Some(parse_header_formula(&e.text, sig).map_err(err)?);
            }
            Kind::Premise => proof.premises.push(parse_header_formula(&e.text, sig).map_err(err)?),
            Kind::Numbered(n) => {
                seen_line = true;
                let (formula, just) = parse_numbered(&e.text, sig).map_err(|m| err(format!("line {n}: {m}")))?;
                proof.lines.push(ProofLine::new(n, formula, just));
            }
        }
    }
    fill_depths(&mut proof);
    Ok(proof)
}

/// Depth per line as far as the checker gets; later lines keep depth 0.
fn fill_depths(p: &mut Proof) {
    let mut c = Checker::new(&p.premises);
    for i in 0..p.lines.len() {
        match c.step(&p.lines[i]) {
            Ok(d) => p.lines[i].depth = d,
            Err(_) => break,
        }
    }
}

pub fn print_proof(p: &Proof) -> String {
    let mut out = String::new();
    if let Some(s) = &p.show {
        let _ = writeln!(out, "SHOW: {s}");
    }
    for f in &p.premises {
        let _ = writeln!(out, "PREMISE: {f}");
    }
    for l in &p.lines {
        let _ = writeln!(out, "{}. {}  {}", l.number, l.formula, l.just);
    }
    out
}
