//! PDDL 2.1 level-2 front end: parsing a typed STRIPS + numeric fluents
//! subset and grounding it into a [`crate::model::Problem`], plus a
//! compact native JSON problem format used by tests and tools.

pub mod ast;
mod ground;
pub mod json;
mod parse;

pub use ast::{LiftedDomain, LiftedProblem};
pub use ground::{ground, GroundingTable};
pub use json::{problem_from_json, problem_to_json};
pub use parse::{parse_domain, parse_problem};
pub(crate) use parse::parse_number;

use crate::model::ModelError;
use crate::sexp::{Pos, SexpError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PddlError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("unsupported feature at {pos}: {feature}")]
    UnsupportedFeature { pos: Pos, feature: String },
    #[error("undeclared {kind} `{name}` at {pos}")]
    Undeclared { pos: Pos, kind: &'static str, name: String },
    #[error("object `{0}` has no declared type")]
    UntypedObject(String),
    #[error("non-linear expression in `{context}`: {detail}")]
    NonLinearExpression { context: String, detail: String },
    #[error("arity mismatch at {pos}: `{name}` expects {expected} arguments, got {got}")]
    Arity { pos: Pos, name: String, expected: usize, got: usize },
    #[error("problem is for domain `{got}`, expected `{expected}`")]
    WrongDomain { expected: String, got: String },
    #[error("initial state gives no value to fluent `{0}`")]
    MissingInit(String),
    #[error("initial state assigns `{0}` twice with different values")]
    ConflictingInit(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid problem JSON: {0}")]
    Json(String),
}

impl From<SexpError> for PddlError {
    fn from(e: SexpError) -> Self {
        let pos = match &e {
            SexpError::UnexpectedEof(p) | SexpError::UnexpectedClose(p) | SexpError::UnterminatedString(p) => *p,
        };
        PddlError::Syntax { pos, msg: e.to_string() }
    }
}
