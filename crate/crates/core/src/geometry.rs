//! The axiom catalog and the defined relations `CON`, `DIR`, `OPP`, `INOPP`.

use crate::formula::{parse_formula_with, substitute, Bindings, Formula, ParseError, Signature, Term};
use std::collections::BTreeMap;
use std::sync::OnceLock;
use thiserror::Error;

const CATALOG_SRC: &str = include_str!("../data/catalog.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("unknown catalog name `{0}`")]
    UnknownName(String),
    #[error("arity mismatch: `{name}` takes 2 arguments, found {found}")]
    Arity { name: String, found: usize },
    #[error("catalog entry `{name}`: {source}")]
    Catalog { name: String, source: ParseError },
}

/// Named closed formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomSet {
    pub entries: BTreeMap<String, Formula>,
}

impl AxiomSet {
    /// Parse `NAME := formula` entries. A line without `:=` continues the previous entry.
    pub fn parse(src: &str) -> Result<AxiomSet, GeometryError> {
        let mut raw: Vec<(String, String)> = Vec::new();
        for line in src.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once(":=") {
                Some((name, body)) => raw.push((name.trim().to_string(), body.trim().to_string())),
                None => match raw.last_mut() {
                    Some((_, body)) => {
                        body.push(' ');
                        body.push_str(line);
                    }
                    None => {
                        return Err(GeometryError::Catalog {
                            name: String::new(),
                            source: ParseError { offset: 0, message: format!("stray line `{line}`") },
                        })
                    }
                },
            }
        }
        let sig = Signature::with_definitions();
        let mut entries = BTreeMap::new();
        for (name, body) in raw {
            let f = parse_formula_with(&body, &sig)
                .map_err(|source| GeometryError::Catalog { name: name.clone(), source })?;
            entries.insert(name, f);
        }
        Ok(AxiomSet { entries })
    }

    /// The shipped catalog.
    pub fn catalog() -> &'static AxiomSet {
        static CAT: OnceLock<AxiomSet> = OnceLock::new();
        CAT.get_or_init(|| AxiomSet::parse(CATALOG_SRC).expect("shipped catalog parses"))
    }

    pub fn get(&self, name: &str) -> Result<&Formula, GeometryError> {
        self.entries.get(name).ok_or_else(|| GeometryError::UnknownName(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Look up a catalog formula by name.
pub fn axiom(name: &str) -> Result<Formula, GeometryError> {
    AxiomSet::catalog().get(name).cloned()
}

/// Reverse lookup: the catalog name whose formula is syntactically `f`.
pub fn name_of(f: &Formula) -> Option<&'static str> {
    AxiomSet::catalog().entries.iter().find(|(_, g)| *g == f).map(|(n, _)| n.as_str())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DefinedRelation {
    Con,
    Dir,
    Opp,
    Inopp,
}

impl DefinedRelation {
    pub const ALL: [DefinedRelation; 4] =
        [DefinedRelation::Con, DefinedRelation::Dir, DefinedRelation::Opp, DefinedRelation::Inopp];

    pub fn name(self) -> &'static str {
        match self {
            DefinedRelation::Con => "CON",
            DefinedRelation::Dir => "DIR",
            DefinedRelation::Opp => "OPP",
            DefinedRelation::Inopp => "INOPP",
        }
    }

    pub fn from_name(name: &str) -> Option<DefinedRelation> {
        let up = name.to_ascii_uppercase();
        Self::ALL.into_iter().find(|d| d.name() == up)
    }

    /// The Undir body for arguments `a`, `b`.
    pub fn body(self, a: &Term, b: &Term) -> Formula {
        let u = Formula::undir;
        let rb = || Term::rev(b.clone());
        match self {
            DefinedRelation::Con => Formula::and(u(a.clone(), b.clone()), u(a.clone(), rb())),
            DefinedRelation::Dir => Formula::not(u(a.clone(), b.clone())),
            DefinedRelation::Opp => Formula::not(u(a.clone(), rb())),
            DefinedRelation::Inopp => u(a.clone(), rb()),
        }
    }
}

/// Replace every defined atom by its Undir body.
pub fn expand_defs(f: &Formula) -> Result<Formula, GeometryError> {
    Ok(match f {
        Formula::Atom(p, args) => match DefinedRelation::from_name(p) {
            Some(d) => {
                if args.len() != 2 {
                    return Err(GeometryError::Arity { name: d.name().to_string(), found: args.len() });
                }
                d.body(&args[0], &args[1])
            }
            None => f.clone(),
        },
        Formula::Not(g) => Formula::not(expand_defs(g)?),
        Formula::And(l, r) => Formula::and(expand_defs(l)?, expand_defs(r)?),
        Formula::Or(l, r) => Formula::or(expand_defs(l)?, expand_defs(r)?),
        Formula::Implies(l, r) => Formula::implies(expand_defs(l)?, expand_defs(r)?),
        Formula::Forall(v, g) => Formula::forall(v.clone(), expand_defs(g)?),
        Formula::Exists(v, g) => Formula::exists(v.clone(), expand_defs(g)?),
    })
}

/// `[W1, W2, W3, W4]`.
pub fn w_decomposition() -> Vec<Formula> {
    ["W1", "W2", "W3", "W4"].iter().map(|n| axiom(n).expect("catalog")).collect()
}

fn defs(src: &str) -> Formula {
    parse_formula_with(src, &Signature::with_definitions()).expect("built-in form parses")
}

/// The open Dir/Opp readings of W1..W4 over `l`, `m`, `n`.
pub fn dir_opp_forms() -> Vec<Formula> {
    [
        "DIR l n & DIR m n -> DIR l m | OPP l m",
        "DIR l n & OPP m n -> DIR l m | OPP l m",
        "OPP l n & DIR m n -> DIR l m | OPP l m",
        "OPP l n & OPP m n -> DIR l m | OPP l m",
    ]
    .iter()
    .map(|s| defs(s))
    .collect()
}

/// Open `Con(l,m) -> Con(l,n) | Con(m,n)`.
pub fn i7_con_form() -> Formula {
    defs("CON l m -> CON l n | CON m n")
}

/// Open `Opp(l,m) & Dir(l,n) -> Opp(m,n)`.
pub fn odo_dir_opp_form() -> Formula {
    defs("OPP l m & DIR l n -> OPP m n")
}

/// Universally close `f` over `vars`, outermost first.
pub fn close_over(f: &Formula, vars: &[&str]) -> Formula {
    vars.iter().rev().fold(f.clone(), |acc, v| Formula::forall(*v, acc))
}

/// Rename free variables `l m n` to `x y z` (catalog convention).
pub fn to_xyz(f: &Formula) -> Formula {
    let b: Bindings = [("l", "x"), ("m", "y"), ("n", "z")]
        .iter()
        .map(|(a, c)| (a.to_string(), Term::var(*c)))
        .collect();
    substitute(f, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{alpha_eq, parse_formula};

    #[test]
    fn catalog_entries_are_closed_and_round_trip() {
        let cat = AxiomSet::catalog();
        assert_eq!(cat.entries.len(), 11);
        let sig = Signature::with_definitions();
        for (name, f) in &cat.entries {
            assert!(f.is_closed(), "{name}");
            assert_eq!(&parse_formula_with(&f.to_string(), &sig).unwrap(), f, "{name}");
        }
    }

    #[test]
    fn listed_examples() {
        assert_eq!(axiom("I8").unwrap().to_string(), "(Ax)(Ay)[UNDIR x y | UNDIR x [rev y]]");
        assert_eq!(
            axiom("W4").unwrap(),
            parse_formula("(Ax)(Ay)(Az)[[[~UNDIR x y | ~UNDIR x [rev y]] | UNDIR x [rev z]] | UNDIR y [rev z]]")
                .unwrap()
        );
        assert_eq!(axiom("OO").unwrap().to_string(), "(Ax)(Ay)[UNDIR x [rev y] -> UNDIR y [rev x]]");
        assert!(matches!(axiom("I9"), Err(GeometryError::UnknownName(_))));
    }

    #[test]
    fn con_form_expands_to_i7() {
        let i7 = close_over(&to_xyz(&expand_defs(&i7_con_form()).unwrap()), &["x", "y"]);
        // z is quantified inside the consequent in the catalog entry
        let Formula::Forall(_, b1) = &i7 else { panic!() };
        let Formula::Forall(_, b2) = &**b1 else { panic!() };
        let Formula::Implies(a, c) = &**b2 else { panic!() };
        let moved = close_over(
            &Formula::implies((**a).clone(), Formula::forall("z", (**c).clone())),
            &["x", "y"],
        );
        assert!(alpha_eq(&moved, &axiom("I7").unwrap()));
        assert!(alpha_eq(&expand_defs(&axiom("I7conv").unwrap()).unwrap(), &axiom("I7").unwrap()));
    }

    #[test]
    fn odo_form_expands_to_odo_body() {
        let e = to_xyz(&expand_defs(&odo_dir_opp_form()).unwrap());
        assert_eq!(e, parse_formula("~UNDIR x [rev y] & ~UNDIR x z -> ~UNDIR y [rev z]").unwrap());
    }

    #[test]
    fn expansion_is_identity_on_undir() {
        let f = parse_formula("UNDIR x y").unwrap();
        assert_eq!(expand_defs(&f).unwrap(), f);
        let bad = Formula::atom("OPP", vec![Term::var("x")]);
        assert!(matches!(expand_defs(&bad), Err(GeometryError::Arity { .. })));
    }
}
