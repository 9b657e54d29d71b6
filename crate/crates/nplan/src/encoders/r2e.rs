//! Chain transition relation: Boolean action selectors along a fixed
//! total order, with one chain copy of each assigned variable per
//! assigning action carrying the value along the order.

use std::collections::BTreeMap;

use super::{cond_term, expr_term, DeclBuilder, ProblemAnalysis, StateVars, StepAssertions};
use crate::formula::{Sort, Term, VarOrigin, VarRef};
use crate::model::{ActionId, BoolVarId, Effect, NumVarId, Problem};

/// Resolves `x` as seen from just before/after positions of the order.
struct Chains {
    /// Latest chain copy of each Boolean var, updated while walking.
    bool_cur: Vec<Term>,
    num_cur: Vec<Term>,
}

pub(super) fn emit_step(
    p: &Problem,
    _analysis: &ProblemAnalysis,
    b: &mut DeclBuilder,
    cur: &StateVars,
    next: &StateVars,
    step: usize,
    order: &[ActionId],
) -> (StepAssertions, Vec<VarRef>) {
    let acts: Vec<VarRef> = order
        .iter()
        .enumerate()
        .map(|(occ, a)| b.declare(VarOrigin::ActionOcc { occ, step }, &p.action(*a).name, Sort::Boolean))
        .collect();

    // chain copies: one per (action, assigned variable)
    let mut chain_bool: BTreeMap<(ActionId, BoolVarId), VarRef> = BTreeMap::new();
    let mut chain_num: BTreeMap<(ActionId, NumVarId), VarRef> = BTreeMap::new();
    for id in order {
        for e in &p.action(*id).eff {
            match e {
                Effect::Bool(v, _) => {
                    let human = format!("{}^{}", p.bool_name(*v), p.action(*id).name);
                    let r = b.declare(
                        VarOrigin::ChainBool { var: *v, action: *id, step },
                        &human,
                        Sort::Boolean,
                    );
                    chain_bool.insert((*id, *v), r);
                }
                Effect::Num(v, _) => {
                    let human = format!("{}^{}", p.num_name(*v), p.action(*id).name);
                    let r = b.declare(
                        VarOrigin::ChainNum { var: *v, action: *id, step },
                        &human,
                        Sort::Rational,
                    );
                    chain_num.insert((*id, *v), r);
                }
            }
        }
    }

    let mut chains = Chains {
        bool_cur: p.bool_vars().map(|v| cur.bool_term(v)).collect(),
        num_cur: p.num_vars().map(|v| cur.num_term(v)).collect(),
    };

    let mut out = StepAssertions::default();

    for (occ, id) in order.iter().enumerate() {
        let a = Term::Var(acts[occ]);
        let action = p.action(*id);

        // pre: guarded by the selector, over the chain state before a
        let bool_map = |v: BoolVarId| chains.bool_cur[v.0 as usize].clone();
        let num_map = |v: NumVarId| chains.num_cur[v.0 as usize].clone();
        for c in &action.pre {
            out.pre.push(Term::implies(a.clone(), cond_term(c, &bool_map, &num_map)));
        }

        // eff: selected -> the chain copy takes the effect value;
        // unselected -> it copies the previous chain value
        for e in &action.eff {
            match e {
                Effect::Bool(v, val) => {
                    let copy = Term::Var(chain_bool[&(*id, *v)]);
                    let set = if *val { copy.clone() } else { Term::not(copy.clone()) };
                    out.eff.push(Term::implies(a.clone(), set));
                    out.eff.push(Term::implies(
                        Term::not(a.clone()),
                        Term::iff(copy, chains.bool_cur[v.0 as usize].clone()),
                    ));
                }
                Effect::Num(v, rhs) => {
                    let copy = Term::Var(chain_num[&(*id, *v)]);
                    out.eff.push(Term::implies(a.clone(), Term::eq(copy.clone(), expr_term(rhs, &num_map))));
                    out.eff.push(Term::implies(
                        Term::not(a.clone()),
                        Term::eq(copy, chains.num_cur[v.0 as usize].clone()),
                    ));
                }
            }
        }

        // advance the chain past a
        for e in &action.eff {
            match e {
                Effect::Bool(v, _) => chains.bool_cur[v.0 as usize] = Term::Var(chain_bool[&(*id, *v)]),
                Effect::Num(v, _) => chains.num_cur[v.0 as usize] = Term::Var(chain_num[&(*id, *v)]),
            }
        }
    }

    // frame: the next state reads the chain after the dummy terminal
    // position; never-assigned variables copy through unchanged
    for v in p.bool_vars() {
        out.frame.push(Term::iff(next.bool_term(v), chains.bool_cur[v.0 as usize].clone()));
    }
    for v in p.num_vars() {
        out.frame.push(Term::eq(next.num_term(v), chains.num_cur[v.0 as usize].clone()));
    }

    (out, acts)
}
