//! Rolled-up transition relation, and the standard one obtained from it
//! by constraining every action to at most one execution per step.

use super::{
    cmp_term, cond_term, expr_term, psi_sub_a, DeclBuilder, ProblemAnalysis, StateVars, StepAssertions,
};
use crate::analysis::EffectClass;
use crate::formula::{Sort, Term, VarOrigin, VarRef};
use crate::model::{Condition, Effect, Problem};

/// Emits one transition copy. Action variables range over the
/// nonnegative integers; `universal_amo` additionally pins every action
/// to `{0,1}`, which is exactly the standard encoding.
pub(super) fn emit_step(
    p: &Problem,
    analysis: &ProblemAnalysis,
    b: &mut DeclBuilder,
    cur: &StateVars,
    next: &StateVars,
    step: usize,
    universal_amo: bool,
) -> (StepAssertions, Vec<VarRef>) {
    let acts: Vec<VarRef> = p
        .action_ids()
        .map(|a| {
            b.declare(VarOrigin::ActionOcc { occ: a.0 as usize, step }, &p.action(a).name, Sort::NonNegInt)
        })
        .collect();
    let a_term = |i: usize| Term::Var(acts[i]);
    let cur_bool = |v| cur.bool_term(v);
    let cur_num = |v| cur.num_term(v);

    let mut out = StepAssertions::default();

    // pre: a > 0 guards every precondition in the pre-state; rolling-
    // eligible actions additionally guard the shifted expression under
    // a > 1, covering the state of their last execution
    for (i, id) in p.action_ids().enumerate() {
        let action = p.action(id);
        for c in &action.pre {
            out.pre.push(Term::implies(
                Term::gt(a_term(i), Term::int(0)),
                cond_term(c, &cur_bool, &cur_num),
            ));
            if analysis.eligible[i] {
                if let Condition::Num(psi, op) = c {
                    let shifted = psi_sub_a(psi, p, analysis, id, &a_term(i), &cur_num);
                    out.pre.push(Term::implies(Term::gt(a_term(i), Term::int(1)), cmp_term(*op, shifted)));
                }
            }
        }
    }

    // eff: under a > 0, Booleans take their assigned polarity,
    // increments accumulate a times, general assignments overwrite
    for (i, id) in p.action_ids().enumerate() {
        let action = p.action(id);
        for (ei, e) in action.eff.iter().enumerate() {
            let guard = Term::gt(a_term(i), Term::int(0));
            let rhs = match e {
                Effect::Bool(v, true) => next.bool_term(*v),
                Effect::Bool(v, false) => Term::not(next.bool_term(*v)),
                Effect::Num(v, _) => match &analysis.classes[id.0 as usize][ei] {
                    EffectClass::LinearIncrement(delta) => Term::eq(
                        next.num_term(*v),
                        Term::sum(vec![cur.num_term(*v), Term::mul(a_term(i), expr_term(delta, &cur_num))]),
                    ),
                    EffectClass::SimpleAssignment(rhs) => {
                        Term::eq(next.num_term(*v), expr_term(rhs, &cur_num))
                    }
                    EffectClass::SelfInterfering => {
                        // amo-constrained, so a single execution: plain assignment
                        let rhs = match e {
                            Effect::Num(_, r) => r,
                            _ => unreachable!(),
                        };
                        Term::eq(next.num_term(*v), expr_term(rhs, &cur_num))
                    }
                    EffectClass::BooleanAssignment => unreachable!(),
                },
            };
            out.eff.push(Term::implies(guard, rhs));
        }
    }

    // frame: all assigners at zero pins the variable
    for v in p.bool_vars() {
        let assigners: Vec<Term> = p
            .action_ids()
            .enumerate()
            .filter(|(_, id)| p.action(*id).assigns_bool(v))
            .map(|(i, _)| Term::eq(a_term(i), Term::int(0)))
            .collect();
        let same = Term::iff(next.bool_term(v), cur.bool_term(v));
        out.frame.push(if assigners.is_empty() { same } else { Term::implies(Term::and(assigners), same) });
    }
    for v in p.num_vars() {
        let assigners: Vec<Term> = p
            .action_ids()
            .enumerate()
            .filter(|(_, id)| p.action(*id).assigns_num(v))
            .map(|(i, _)| Term::eq(a_term(i), Term::int(0)))
            .collect();
        let same = Term::eq(next.num_term(v), cur.num_term(v));
        out.frame.push(if assigners.is_empty() { same } else { Term::implies(Term::and(assigners), same) });
    }

    // mutex: interfering pairs cannot both run in the same step
    for (a1, a2) in &analysis.mutexes {
        out.mutex.push(Term::or(vec![
            Term::eq(a_term(a1.0 as usize), Term::int(0)),
            Term::eq(a_term(a2.0 as usize), Term::int(0)),
        ]));
    }

    // amo: at most once for actions that cannot roll; the standard
    // encoding adds the clause for every action
    for (i, _) in p.action_ids().enumerate() {
        if !analysis.eligible[i] {
            out.amo.push(amo_clause(&a_term(i)));
        }
    }
    if universal_amo {
        for (i, _) in p.action_ids().enumerate() {
            out.amo.push(amo_clause(&a_term(i)));
        }
    }

    (out, acts)
}

fn amo_clause(a: &Term) -> Term {
    Term::or(vec![Term::eq(a.clone(), Term::int(0)), Term::eq(a.clone(), Term::int(1))])
}
