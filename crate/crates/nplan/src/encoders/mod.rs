//! Bound-`n` unrollings of the four transition-relation encodings:
//! `standard`, `rolled`, `r2e` and `pattern`, plus decoding of solver
//! models back into plans.
//!
//! The unrolled formula is always `init(X_0) /\ T(X_0,A_0,X_1) /\ ...
//! /\ T(X_{n-1},A_{n-1},X_n) /\ goal(X_n)`; the encodings differ only
//! in the shape of `T` and its action vocabulary.

mod pattern_enc;
mod r2e;
mod rolled;

pub use pattern_enc::SigmaState;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{self, EffectClass, Pattern};
use crate::formula::{print_smtlib, Model, Sort, Term, VarDecl, VarOrigin, VarRef};
use crate::model::{ActionId, BoolVarId, CmpOp, Condition, Formula, LinearExpr, NumVarId, Plan, Problem};

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error("action order must contain every action exactly once; {0}")]
    InvalidOrder(String),
    #[error("model assigns occurrence variable `{0}` a negative or oversized count")]
    NegativeCount(String),
    #[error("decoded plan is invalid (encoder bug): step {step:?}, condition {condition:?}")]
    DecodeSoundness { step: Option<usize>, condition: Option<String> },
}

/// Which transition relation to build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncodingKind {
    Standard,
    Rolled,
    /// Chain encoding along a fixed total order of the actions.
    R2e { order: Vec<ActionId> },
    /// Multiplicity encoding along an arbitrary occurrence sequence.
    Pattern { pattern: Pattern },
}

impl EncodingKind {
    pub fn name(&self) -> &'static str {
        match self {
            EncodingKind::Standard => "standard",
            EncodingKind::Rolled => "rolled",
            EncodingKind::R2e { .. } => "r2e",
            EncodingKind::Pattern { .. } => "pattern",
        }
    }
}

/// Analysis shared by every step of one encoding run.
pub(crate) struct ProblemAnalysis {
    /// Effect classes, indexed `[action][effect]`.
    pub classes: Vec<Vec<EffectClass>>,
    pub eligible: Vec<bool>,
    pub mutexes: BTreeSet<(ActionId, ActionId)>,
}

impl ProblemAnalysis {
    fn build(p: &Problem) -> Self {
        let classes = p
            .actions
            .iter()
            .map(|a| a.eff.iter().map(|e| analysis::classify_effect(a, e)).collect())
            .collect();
        let eligible = p.actions.iter().map(analysis::eligible_for_rolling).collect();
        ProblemAnalysis { classes, eligible, mutexes: analysis::mutex_pairs(p) }
    }

    /// Class of the effect of `action` assigning numeric var `v`, if any.
    pub fn num_class(&self, p: &Problem, action: ActionId, v: NumVarId) -> Option<&EffectClass> {
        let a = p.action(action);
        a.eff.iter().enumerate().find_map(|(i, e)| match e {
            crate::model::Effect::Num(w, _) if *w == v => Some(&self.classes[action.0 as usize][i]),
            _ => None,
        })
    }
}

/// Per-step copies of the state variables.
#[derive(Debug, Clone)]
pub(crate) struct StateVars {
    pub bools: Vec<VarRef>,
    pub nums: Vec<VarRef>,
}

impl StateVars {
    pub fn bool_term(&self, v: BoolVarId) -> Term {
        Term::Var(self.bools[v.0 as usize])
    }

    pub fn num_term(&self, v: NumVarId) -> Term {
        Term::Var(self.nums[v.0 as usize])
    }
}

pub(crate) struct DeclBuilder {
    decls: Vec<VarDecl>,
    names: BTreeSet<String>,
}

impl DeclBuilder {
    fn new() -> Self {
        DeclBuilder { decls: Vec::new(), names: BTreeSet::new() }
    }

    pub fn declare(&mut self, origin: VarOrigin, human: &str, sort: Sort) -> VarRef {
        let name = origin.mangle(human);
        if !self.names.insert(name.clone()) {
            // ids make names unique by construction
            panic!("internal error: duplicate solver variable `{name}`");
        }
        self.decls.push(VarDecl { name, sort, origin });
        VarRef(self.decls.len() - 1)
    }

    fn declare_state(&mut self, p: &Problem, step: usize) -> StateVars {
        let bools = p
            .bool_vars()
            .map(|v| self.declare(VarOrigin::StateBool { var: v, step }, p.bool_name(v), Sort::Boolean))
            .collect();
        let nums = p
            .num_vars()
            .map(|v| self.declare(VarOrigin::StateNum { var: v, step }, p.num_name(v), Sort::Rational))
            .collect();
        StateVars { bools, nums }
    }
}

/// Linear expression as a term over an arbitrary numeric substitution.
pub(crate) fn expr_term(e: &LinearExpr, num_map: &dyn Fn(NumVarId) -> Term) -> Term {
    let mut parts = Vec::new();
    for (v, k) in e.terms() {
        let base = num_map(v);
        if k.is_one() {
            parts.push(base);
        } else if (-k.clone()).is_one() {
            parts.push(Term::Neg(Box::new(base)));
        } else {
            parts.push(Term::mul(Term::Rat(k.clone()), base));
        }
    }
    let k = e.constant_part();
    if !k.is_zero() || parts.is_empty() {
        parts.push(Term::Rat(k.clone()));
    }
    Term::sum(parts)
}

pub(crate) fn cmp_term(op: CmpOp, lhs: Term) -> Term {
    match op {
        CmpOp::Ge => Term::ge(lhs, Term::int(0)),
        CmpOp::Gt => Term::gt(lhs, Term::int(0)),
        CmpOp::Eq => Term::eq(lhs, Term::int(0)),
    }
}

/// A condition over arbitrary Boolean/numeric substitutions.
pub(crate) fn cond_term(
    c: &Condition,
    bool_map: &dyn Fn(BoolVarId) -> Term,
    num_map: &dyn Fn(NumVarId) -> Term,
) -> Term {
    match c {
        Condition::Bool(v, true) => bool_map(*v),
        Condition::Bool(v, false) => Term::not(bool_map(*v)),
        Condition::Num(e, op) => cmp_term(*op, expr_term(e, num_map)),
    }
}

fn formula_term(
    f: &Formula,
    bool_map: &dyn Fn(BoolVarId) -> Term,
    num_map: &dyn Fn(NumVarId) -> Term,
) -> Term {
    match f {
        Formula::Cond(c) => cond_term(c, bool_map, num_map),
        Formula::And(fs) => Term::and(fs.iter().map(|g| formula_term(g, bool_map, num_map)).collect()),
        Formula::Or(fs) => Term::or(fs.iter().map(|g| formula_term(g, bool_map, num_map)).collect()),
        Formula::Not(g) => Term::not(formula_term(g, bool_map, num_map)),
    }
}

/// The expression shifted to the state of the action's last rolled
/// execution: increments `x += d` become `x + (a-1)*d`, simple
/// assignments `x := r` become `r`, untouched variables stay.
pub(crate) fn psi_sub_a(
    psi: &LinearExpr,
    p: &Problem,
    analysis: &ProblemAnalysis,
    action: ActionId,
    a_var: &Term,
    num_map: &dyn Fn(NumVarId) -> Term,
) -> Term {
    let subst = |x: NumVarId| -> Term {
        match analysis.num_class(p, action, x) {
            None => num_map(x),
            Some(EffectClass::LinearIncrement(delta)) => Term::sum(vec![
                num_map(x),
                Term::mul(Term::sub(a_var.clone(), Term::int(1)), expr_term(delta, num_map)),
            ]),
            Some(EffectClass::SimpleAssignment(rhs)) => expr_term(rhs, num_map),
            Some(other) => panic!(
                "internal error: psi_sub_a on {:?} effect of `{}`; eligibility filter broken",
                other,
                p.action(action).name
            ),
        }
    };
    expr_term(psi, &subst)
}

/// Assertions of one transition copy, partitioned by axiom family.
#[derive(Debug, Default)]
pub struct StepAssertions {
    pub pre: Vec<Term>,
    pub eff: Vec<Term>,
    pub frame: Vec<Term>,
    pub mutex: Vec<Term>,
    pub amo: Vec<Term>,
}

impl StepAssertions {
    fn len(&self) -> usize {
        self.pre.len() + self.eff.len() + self.frame.len() + self.mutex.len() + self.amo.len()
    }
}

/// How to read a plan out of a model of the unrolled formula.
#[derive(Debug, Clone)]
pub struct DecodeMeta {
    /// Occurrence order within a step (pattern order, the fixed total
    /// order for `r2e`, or canonical action-id order).
    pub order: Vec<ActionId>,
    /// `[step][occurrence]` multiplicity/selector variables.
    pub step_occ_vars: Vec<Vec<VarRef>>,
    /// Occurrence variables are Boolean selectors rather than counts.
    pub boolean_selectors: bool,
}

/// A fully assembled bound-`n` formula.
pub struct EncodedBound {
    pub bound: usize,
    pub kind_name: &'static str,
    pub decls: Vec<VarDecl>,
    pub init: Vec<Term>,
    pub steps: Vec<StepAssertions>,
    pub goal: Vec<Term>,
    pub decode_meta: DecodeMeta,
}

/// Declaration/assertion counts, as reported by `stats`.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct EncodingStats {
    pub encoding: String,
    pub bound: usize,
    pub num_vars: usize,
    pub num_assertions: usize,
    pub per_role_counts: BTreeMap<String, usize>,
}

impl EncodedBound {
    /// All assertions in the canonical emission order.
    pub fn assertions(&self) -> Vec<&Term> {
        let mut out: Vec<&Term> = self.init.iter().collect();
        for s in &self.steps {
            out.extend(s.pre.iter());
            out.extend(s.eff.iter());
            out.extend(s.frame.iter());
            out.extend(s.mutex.iter());
            out.extend(s.amo.iter());
        }
        out.extend(self.goal.iter());
        out
    }

    pub fn to_smtlib(&self) -> String {
        print_smtlib(&self.decls, &self.assertions(), None)
    }

    pub fn stats(&self) -> EncodingStats {
        let mut per_role = BTreeMap::new();
        per_role.insert("init".to_string(), self.init.len());
        per_role.insert("pre".to_string(), self.steps.iter().map(|s| s.pre.len()).sum());
        per_role.insert("eff".to_string(), self.steps.iter().map(|s| s.eff.len()).sum());
        per_role.insert("frame".to_string(), self.steps.iter().map(|s| s.frame.len()).sum());
        per_role.insert("mutex".to_string(), self.steps.iter().map(|s| s.mutex.len()).sum());
        per_role.insert("amo".to_string(), self.steps.iter().map(|s| s.amo.len()).sum());
        per_role.insert("goal".to_string(), self.goal.len());
        EncodingStats {
            encoding: self.kind_name.to_string(),
            bound: self.bound,
            num_vars: self.decls.len(),
            num_assertions: self.init.len() + self.steps.iter().map(|s| s.len()).sum::<usize>() + self.goal.len(),
            per_role_counts: per_role,
        }
    }

    /// Number of auxiliary variables (pattern auxiliaries or chain
    /// copies), for the variable-economy comparison.
    pub fn aux_var_count(&self) -> usize {
        self.decls
            .iter()
            .filter(|d| {
                matches!(
                    d.origin,
                    VarOrigin::PatternAux { .. } | VarOrigin::ChainBool { .. } | VarOrigin::ChainNum { .. }
                )
            })
            .count()
    }
}

/// Initial-state assertions over `X_0`: one literal or equality per
/// declared variable.
fn encode_init(p: &Problem, x0: &StateVars) -> Vec<Term> {
    let mut out = Vec::new();
    for v in p.bool_vars() {
        let t = x0.bool_term(v);
        out.push(if p.init.bool_vals[v.0 as usize] { t } else { Term::not(t) });
    }
    for v in p.num_vars() {
        out.push(Term::eq(x0.num_term(v), Term::Rat(p.init.num_vals[v.0 as usize].clone())));
    }
    out
}

/// Goal assertions over `X_n`: one per goal formula.
fn encode_goal(p: &Problem, xn: &StateVars) -> Vec<Term> {
    p.goals.iter().map(|g| formula_term(g, &|v| xn.bool_term(v), &|v| xn.num_term(v))).collect()
}

/// Builds the bound-`n` formula for the requested encoding.
pub fn assemble_bound(p: &Problem, kind: &EncodingKind, n: usize) -> Result<EncodedBound, EncodeError> {
    if let EncodingKind::R2e { order } = kind {
        let mut seen = BTreeSet::new();
        if order.len() != p.actions.len() || !order.iter().all(|a| seen.insert(*a) && (a.0 as usize) < p.actions.len())
        {
            return Err(EncodeError::InvalidOrder(format!(
                "got {} entries for {} actions",
                order.len(),
                p.actions.len()
            )));
        }
    }

    let analysis = ProblemAnalysis::build(p);
    let mut b = DeclBuilder::new();
    let mut cur = b.declare_state(p, 0);
    let init = encode_init(p, &cur);

    let order: Vec<ActionId> = match kind {
        EncodingKind::Standard | EncodingKind::Rolled => p.action_ids().collect(),
        EncodingKind::R2e { order } => order.clone(),
        EncodingKind::Pattern { pattern } => pattern.occurrences.clone(),
    };

    let mut steps = Vec::with_capacity(n);
    let mut step_occ_vars = Vec::with_capacity(n);
    for step in 0..n {
        let next = b.declare_state(p, step + 1);
        let (assertions, occ_vars) = match kind {
            EncodingKind::Standard => rolled::emit_step(p, &analysis, &mut b, &cur, &next, step, true),
            EncodingKind::Rolled => rolled::emit_step(p, &analysis, &mut b, &cur, &next, step, false),
            EncodingKind::R2e { order } => r2e::emit_step(p, &analysis, &mut b, &cur, &next, step, order),
            EncodingKind::Pattern { pattern } => {
                pattern_enc::emit_step(p, &analysis, &mut b, &cur, &next, step, pattern)
            }
        };
        steps.push(assertions);
        step_occ_vars.push(occ_vars);
        cur = next;
    }

    let goal = encode_goal(p, &cur);
    Ok(EncodedBound {
        bound: n,
        kind_name: kind.name(),
        decls: b.decls,
        init,
        steps,
        goal,
        decode_meta: DecodeMeta {
            order,
            step_occ_vars,
            boolean_selectors: matches!(kind, EncodingKind::R2e { .. }),
        },
    })
}

/// Reads the plan out of a satisfying model: per step, occurrences in
/// their listed order with their multiplicities, zero-count occurrences
/// dropped, steps concatenated.
pub fn decode(model: &Model, enc: &EncodedBound) -> Result<Plan, EncodeError> {
    let meta = &enc.decode_meta;
    let mut steps = Vec::new();
    for occ_vars in &meta.step_occ_vars {
        for (occ, var) in occ_vars.iter().enumerate() {
            let decl = &enc.decls[var.0];
            let action = meta.order[occ];
            if meta.boolean_selectors {
                if model.bool_value(decl).unwrap_or(false) {
                    steps.push((action, 1u64));
                }
            } else {
                let count = model
                    .int_value(decl)
                    .map_err(|_| EncodeError::NegativeCount(decl.name.clone()))?;
                if count.is_negative() {
                    return Err(EncodeError::NegativeCount(decl.name.clone()));
                }
                let count: u64 = count.try_into().map_err(|_| EncodeError::NegativeCount(decl.name.clone()))?;
                if count > 0 {
                    steps.push((action, count));
                }
            }
        }
    }
    Ok(Plan { steps })
}

/// Decode plus the mandatory validity check; a failed validation is an
/// encoder bug surfaced as [`EncodeError::DecodeSoundness`].
pub fn decode_validated(model: &Model, enc: &EncodedBound, p: &Problem) -> Result<Plan, EncodeError> {
    let plan = decode(model, enc)?;
    let report = crate::model::validate_plan(p, &plan);
    if !report.valid {
        return Err(EncodeError::DecodeSoundness { step: report.failing_step, condition: report.failing_condition });
    }
    Ok(plan)
}

#[cfg(test)]
mod tests;
