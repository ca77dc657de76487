//! Natural-deduction checking, proof search and finite models for the
//! `Undir`/`rev` fragment of ordered affine geometry.

pub mod corpus;
pub mod formula;
pub mod geometry;
pub mod kernel;
pub mod models;
pub mod search;

pub use formula::{parse_formula, parse_term, Formula, Signature, Term};
pub use search::{prove, SearchConfig, SearchResult, SearchStatus};
