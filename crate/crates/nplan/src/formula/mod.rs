//! Solver-agnostic logical IR with SMT-LIB v2 serialization and model
//! deserialization.

mod smtlib;
mod solver_output;

pub use smtlib::{infer_logic, print_smtlib};
pub use solver_output::{parse_model, SolverVerdict};

use num_bigint::BigInt;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::model::{ActionId, BoolVarId, NumVarId, Rational};

#[derive(Debug, Error)]
pub enum FormulaError {
    #[error("variable name `{0}` declared twice")]
    NameCollision(String),
    #[error("malformed solver output ({reason}): {raw}")]
    SolverProtocol { reason: String, raw: String },
    #[error("model value for `{name}` does not fit sort {sort:?}")]
    SortMismatch { name: String, sort: Sort },
}

/// Sorts of declared variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sort {
    Boolean,
    Rational,
    /// Realized as SMT `Int` plus an emitted `(>= x 0)` side assertion.
    NonNegInt,
}

/// Where a declared variable comes from; drives name mangling and
/// decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarOrigin {
    StateBool { var: BoolVarId, step: usize },
    StateNum { var: NumVarId, step: usize },
    /// Multiplicity (or Boolean selector) of occurrence `occ` in the
    /// step's action vocabulary; the meaning of `occ` is per-encoding.
    ActionOcc { occ: usize, step: usize },
    /// Value of numeric variable `var` right after occurrence `occ` of
    /// the pattern, within step `step`.
    PatternAux { var: NumVarId, occ: usize, step: usize },
    /// Chain copy of `var` right after `action` in the fixed order.
    ChainBool { var: BoolVarId, action: ActionId, step: usize },
    ChainNum { var: NumVarId, action: ActionId, step: usize },
}

impl VarOrigin {
    /// Builds the unique solver-facing name. The numeric prefix alone
    /// determines the origin; the human-readable suffix after `__` is
    /// informational.
    pub fn mangle(&self, human: &str) -> String {
        let core = match self {
            VarOrigin::StateBool { var, step } => format!("sb{}_t{}", var.0, step),
            VarOrigin::StateNum { var, step } => format!("sn{}_t{}", var.0, step),
            VarOrigin::ActionOcc { occ, step } => format!("ao{}_t{}", occ, step),
            VarOrigin::PatternAux { var, occ, step } => format!("px{}_o{}_t{}", var.0, occ, step),
            VarOrigin::ChainBool { var, action, step } => format!("cb{}_a{}_t{}", var.0, action.0, step),
            VarOrigin::ChainNum { var, action, step } => format!("cn{}_a{}_t{}", var.0, action.0, step),
        };
        format!("{}__{}", core, sanitize(human))
    }

    /// Inverse of [`VarOrigin::mangle`].
    pub fn demangle(name: &str) -> Option<VarOrigin> {
        let core = name.split("__").next()?;
        let tag = &core[..2.min(core.len())];
        let rest = &core[2..];
        let fields: Vec<&str> = rest.split('_').collect();
        let num = |s: &str, prefix: &str| -> Option<u64> { s.strip_prefix(prefix).and_then(|t| t.parse().ok()) };
        match tag {
            "sb" | "sn" | "ao" => {
                if fields.len() != 2 {
                    return None;
                }
                let first: u64 = fields[0].parse().ok()?;
                let step = num(fields[1], "t")? as usize;
                Some(match tag {
                    "sb" => VarOrigin::StateBool { var: BoolVarId(first as u32), step },
                    "sn" => VarOrigin::StateNum { var: NumVarId(first as u32), step },
                    _ => VarOrigin::ActionOcc { occ: first as usize, step },
                })
            }
            "px" => {
                if fields.len() != 3 {
                    return None;
                }
                let var: u64 = fields[0].parse().ok()?;
                let occ = num(fields[1], "o")? as usize;
                let step = num(fields[2], "t")? as usize;
                Some(VarOrigin::PatternAux { var: NumVarId(var as u32), occ, step })
            }
            "cb" | "cn" => {
                if fields.len() != 3 {
                    return None;
                }
                let var: u64 = fields[0].parse().ok()?;
                let action = num(fields[1], "a")? as u32;
                let step = num(fields[2], "t")? as usize;
                Some(if tag == "cb" {
                    VarOrigin::ChainBool { var: BoolVarId(var as u32), action: ActionId(action), step }
                } else {
                    VarOrigin::ChainNum { var: NumVarId(var as u32), action: ActionId(action), step }
                })
            }
            _ => None,
        }
    }
}

fn sanitize(human: &str) -> String {
    human
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.' { c } else { '.' })
        .collect()
}

/// A declared solver variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub sort: Sort,
    pub origin: VarOrigin,
}

/// Reference to a declared variable (index into the declaration list).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct VarRef(pub usize);

/// Well-sorted-by-construction term tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(VarRef),
    Bool(bool),
    Rat(Rational),
    Add(Vec<Term>),
    Sub(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    /// Scalar products and the encoding-required variable products
    /// (action multiplicity times expression).
    Mul(Box<Term>, Box<Term>),
    Cmp(CmpKind, Box<Term>, Box<Term>),
    Not(Box<Term>),
    And(Vec<Term>),
    Or(Vec<Term>),
    Implies(Box<Term>, Box<Term>),
    Iff(Box<Term>, Box<Term>),
    Ite(Box<Term>, Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpKind {
    Ge,
    Gt,
    Eq,
}

impl Term {
    pub fn var(v: VarRef) -> Term {
        Term::Var(v)
    }

    pub fn int(k: i64) -> Term {
        Term::Rat(Rational::from_integer(BigInt::from(k)))
    }

    pub fn implies(lhs: Term, rhs: Term) -> Term {
        Term::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Term, rhs: Term) -> Term {
        Term::Iff(Box::new(lhs), Box::new(rhs))
    }

    pub fn not(t: Term) -> Term {
        Term::Not(Box::new(t))
    }

    pub fn eq(lhs: Term, rhs: Term) -> Term {
        Term::Cmp(CmpKind::Eq, Box::new(lhs), Box::new(rhs))
    }

    pub fn ge(lhs: Term, rhs: Term) -> Term {
        Term::Cmp(CmpKind::Ge, Box::new(lhs), Box::new(rhs))
    }

    pub fn gt(lhs: Term, rhs: Term) -> Term {
        Term::Cmp(CmpKind::Gt, Box::new(lhs), Box::new(rhs))
    }

    pub fn mul(lhs: Term, rhs: Term) -> Term {
        Term::Mul(Box::new(lhs), Box::new(rhs))
    }

    pub fn sub(lhs: Term, rhs: Term) -> Term {
        Term::Sub(Box::new(lhs), Box::new(rhs))
    }

    /// n-ary conjunction, collapsing the trivial cases.
    pub fn and(mut ts: Vec<Term>) -> Term {
        match ts.len() {
            0 => Term::Bool(true),
            1 => ts.pop().unwrap(),
            _ => Term::And(ts),
        }
    }

    /// n-ary disjunction, collapsing the trivial cases.
    pub fn or(mut ts: Vec<Term>) -> Term {
        match ts.len() {
            0 => Term::Bool(false),
            1 => ts.pop().unwrap(),
            _ => Term::Or(ts),
        }
    }

    /// n-ary sum, collapsing the trivial cases.
    pub fn sum(mut ts: Vec<Term>) -> Term {
        match ts.len() {
            0 => Term::int(0),
            1 => ts.pop().unwrap(),
            _ => Term::Add(ts),
        }
    }

    /// True if the term contains a product of two non-literal factors.
    pub fn has_nonlinear_product(&self) -> bool {
        match self {
            Term::Mul(a, b) => {
                let literal = |t: &Term| matches!(t, Term::Rat(_));
                (!literal(a) && !literal(b)) || a.has_nonlinear_product() || b.has_nonlinear_product()
            }
            Term::Var(_) | Term::Bool(_) | Term::Rat(_) => false,
            Term::Add(ts) | Term::And(ts) | Term::Or(ts) => ts.iter().any(|t| t.has_nonlinear_product()),
            Term::Sub(a, b) | Term::Cmp(_, a, b) | Term::Implies(a, b) | Term::Iff(a, b) => {
                a.has_nonlinear_product() || b.has_nonlinear_product()
            }
            Term::Neg(t) | Term::Not(t) => t.has_nonlinear_product(),
            Term::Ite(c, t, e) => {
                c.has_nonlinear_product() || t.has_nonlinear_product() || e.has_nonlinear_product()
            }
        }
    }
}

/// Typed value extracted from a solver model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Bool(bool),
    Rat(Rational),
    Int(BigInt),
}

/// A (total) assignment to the declared variables.
///
/// Variables the solver left out of its model are defaulted — `false`
/// or `0` — and listed in `defaulted`; every encoding constrains
/// effects under positive-multiplicity guards, so a defaulted action
/// variable reads as "not executed".
#[derive(Debug, Clone)]
pub struct Model {
    values: BTreeMap<String, Value>,
    pub defaulted: Vec<String>,
}

impl Model {
    pub fn new(values: BTreeMap<String, Value>, defaulted: Vec<String>) -> Self {
        Model { values, defaulted }
    }

    pub fn value(&self, name: &str) -> Option<&Value> {
        self.values.get(name)
    }

    pub fn bool_value(&self, decl: &VarDecl) -> Result<bool, FormulaError> {
        match self.values.get(&decl.name) {
            Some(Value::Bool(b)) => Ok(*b),
            _ => Err(FormulaError::SortMismatch { name: decl.name.clone(), sort: decl.sort }),
        }
    }

    pub fn int_value(&self, decl: &VarDecl) -> Result<BigInt, FormulaError> {
        match self.values.get(&decl.name) {
            Some(Value::Int(i)) => Ok(i.clone()),
            Some(Value::Rat(r)) if r.is_integer() => Ok(r.numer().clone()),
            _ => Err(FormulaError::SortMismatch { name: decl.name.clone(), sort: decl.sort }),
        }
    }

    pub fn rat_value(&self, decl: &VarDecl) -> Result<Rational, FormulaError> {
        match self.values.get(&decl.name) {
            Some(Value::Rat(r)) => Ok(r.clone()),
            Some(Value::Int(i)) => Ok(Rational::from_integer(i.clone())),
            _ => Err(FormulaError::SortMismatch { name: decl.name.clone(), sort: decl.sort }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn origin_strategy() -> impl Strategy<Value = VarOrigin> {
        let small = 0u32..50;
        let step = 0usize..12;
        prop_oneof![
            (small.clone(), step.clone()).prop_map(|(v, s)| VarOrigin::StateBool { var: BoolVarId(v), step: s }),
            (small.clone(), step.clone()).prop_map(|(v, s)| VarOrigin::StateNum { var: NumVarId(v), step: s }),
            (0usize..80, step.clone()).prop_map(|(o, s)| VarOrigin::ActionOcc { occ: o, step: s }),
            (small.clone(), 0usize..80, step.clone())
                .prop_map(|(v, o, s)| VarOrigin::PatternAux { var: NumVarId(v), occ: o, step: s }),
            (small.clone(), small.clone(), step.clone())
                .prop_map(|(v, a, s)| VarOrigin::ChainBool { var: BoolVarId(v), action: ActionId(a), step: s }),
            (small, 0u32..50, step)
                .prop_map(|(v, a, s)| VarOrigin::ChainNum { var: NumVarId(v), action: ActionId(a), step: s }),
        ]
    }

    proptest! {
        #[test]
        fn mangle_round_trips(origin in origin_strategy(), name in "[a-z()_,0-9 ]{0,12}") {
            let mangled = origin.mangle(&name);
            prop_assert_eq!(VarOrigin::demangle(&mangled), Some(origin));
        }
    }

    #[test]
    fn mangled_names_are_smt_safe() {
        let n = VarOrigin::StateBool { var: BoolVarId(3), step: 1 }.mangle("conn(r1,r2)");
        assert!(n.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)));
    }
}
