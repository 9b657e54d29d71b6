//! Pattern transition relation: one nonnegative multiplicity variable
//! per occurrence of an arbitrary action sequence, with the value of
//! every state variable after a prefix carried symbolically.

use super::{
    cmp_term, cond_term, expr_term, psi_sub_a, DeclBuilder, ProblemAnalysis, StateVars, StepAssertions,
};
use crate::analysis::{EffectClass, Pattern};
use crate::formula::{Sort, Term, VarOrigin, VarRef};
use crate::model::{BoolVarId, Condition, Effect, LinearExpr, NumVarId, Problem};

/// The symbolic value of every state variable after executing some
/// prefix of the pattern with chosen multiplicities.
///
/// Starting from the step's input copies, each occurrence rewrites the
/// entries of its assigned variables:
///
/// * `v := true`  — the value becomes `old \/ a > 0`;
/// * `v := false` — the value becomes `old /\ a = 0`;
/// * `v += d`     — the value becomes `old + a * d[prefix]`;
/// * `v := e` (general) — the value becomes a fresh auxiliary variable
///   constrained to `e[prefix]` when the occurrence runs and to the old
///   value when it does not.
#[derive(Debug, Clone)]
pub struct SigmaState {
    bools: Vec<Term>,
    nums: Vec<Term>,
}

impl SigmaState {
    pub(super) fn from_state(cur: &StateVars) -> Self {
        SigmaState {
            bools: cur.bools.iter().map(|r| Term::Var(*r)).collect(),
            nums: cur.nums.iter().map(|r| Term::Var(*r)).collect(),
        }
    }

    pub fn bool_term(&self, v: BoolVarId) -> &Term {
        &self.bools[v.0 as usize]
    }

    pub fn num_term(&self, v: NumVarId) -> &Term {
        &self.nums[v.0 as usize]
    }

    /// Lifts a linear expression variable-wise through the prefix.
    pub fn expr(&self, e: &LinearExpr) -> Term {
        expr_term(e, &|v| self.nums[v.0 as usize].clone())
    }
}

pub(super) fn emit_step(
    p: &Problem,
    analysis: &ProblemAnalysis,
    b: &mut DeclBuilder,
    cur: &StateVars,
    next: &StateVars,
    step: usize,
    pattern: &Pattern,
) -> (StepAssertions, Vec<VarRef>) {
    let acts: Vec<VarRef> = pattern
        .occurrences
        .iter()
        .enumerate()
        .map(|(occ, a)| b.declare(VarOrigin::ActionOcc { occ, step }, &p.action(*a).name, Sort::NonNegInt))
        .collect();

    let mut sigma = SigmaState::from_state(cur);
    let mut out = StepAssertions::default();

    for (occ, id) in pattern.occurrences.iter().enumerate() {
        let a = Term::Var(acts[occ]);
        let action = p.action(*id);
        let eligible = analysis.eligible[id.0 as usize];

        let bool_map = |v: BoolVarId| sigma.bools[v.0 as usize].clone();
        let num_map = |v: NumVarId| sigma.nums[v.0 as usize].clone();

        // pre: prefix-lifted preconditions under a > 0, and the shifted
        // expression under a > 1 for rolling-eligible occurrences
        for c in &action.pre {
            out.pre.push(Term::implies(
                Term::gt(a.clone(), Term::int(0)),
                cond_term(c, &bool_map, &num_map),
            ));
            if eligible {
                if let Condition::Num(psi, op) = c {
                    let shifted = psi_sub_a(psi, p, analysis, *id, &a, &num_map);
                    out.pre.push(Term::implies(Term::gt(a.clone(), Term::int(1)), cmp_term(*op, shifted)));
                }
            }
        }

        if !eligible {
            out.amo.push(Term::or(vec![
                Term::eq(a.clone(), Term::int(0)),
                Term::eq(a.clone(), Term::int(1)),
            ]));
        }

        // all right-hand sides read the prefix value, then the rewrites
        // land simultaneously
        let mut bool_updates: Vec<(BoolVarId, Term)> = Vec::new();
        let mut num_updates: Vec<(NumVarId, Term)> = Vec::new();
        for (ei, e) in action.eff.iter().enumerate() {
            match (&analysis.classes[id.0 as usize][ei], e) {
                (EffectClass::BooleanAssignment, Effect::Bool(v, true)) => {
                    bool_updates.push((
                        *v,
                        Term::or(vec![bool_map(*v), Term::gt(a.clone(), Term::int(0))]),
                    ));
                }
                (EffectClass::BooleanAssignment, Effect::Bool(v, false)) => {
                    bool_updates.push((
                        *v,
                        Term::and(vec![bool_map(*v), Term::eq(a.clone(), Term::int(0))]),
                    ));
                }
                (EffectClass::LinearIncrement(delta), Effect::Num(v, _)) => {
                    num_updates.push((
                        *v,
                        Term::sum(vec![num_map(*v), Term::mul(a.clone(), sigma.expr(delta))]),
                    ));
                }
                (EffectClass::SimpleAssignment(_) | EffectClass::SelfInterfering, Effect::Num(v, rhs)) => {
                    let human = format!("{}^{}.{}", p.num_name(*v), occ, action.name);
                    let aux = b.declare(VarOrigin::PatternAux { var: *v, occ, step }, &human, Sort::Rational);
                    out.eff.push(Term::implies(
                        Term::eq(a.clone(), Term::int(0)),
                        Term::eq(Term::Var(aux), num_map(*v)),
                    ));
                    out.eff.push(Term::implies(
                        Term::gt(a.clone(), Term::int(0)),
                        Term::eq(Term::Var(aux), sigma.expr(rhs)),
                    ));
                    num_updates.push((*v, Term::Var(aux)));
                }
                _ => unreachable!("effect shape and class always agree"),
            }
        }
        for (v, t) in bool_updates {
            sigma.bools[v.0 as usize] = t;
        }
        for (v, t) in num_updates {
            sigma.nums[v.0 as usize] = t;
        }
    }

    // frame: the next-state copies equal the full-pattern values
    for v in p.bool_vars() {
        out.frame.push(Term::iff(next.bool_term(v), sigma.bools[v.0 as usize].clone()));
    }
    for v in p.num_vars() {
        out.frame.push(Term::eq(next.num_term(v), sigma.nums[v.0 as usize].clone()));
    }

    (out, acts)
}
