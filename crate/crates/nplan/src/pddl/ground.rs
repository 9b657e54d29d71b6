//! Grounding: full instantiation of action schemas over typed objects,
//! followed by static folding of constant atoms and pruning of actions
//! whose preconditions can never hold.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use super::ast::*;
use super::PddlError;
use crate::model::{
    Action, BoolVarId, Condition, Effect, Formula, LinearExpr, NumVarId, Problem, Rational, State,
};

/// Mapping from ground atoms to interned variable ids, kept around for
/// reporting and tests.
#[derive(Debug, Clone, Default)]
pub struct GroundingTable {
    pub objects_by_type: BTreeMap<String, Vec<String>>,
    pub bool_atoms: BTreeMap<String, BoolVarId>,
    pub num_atoms: BTreeMap<String, NumVarId>,
}

/// Renders a ground atom as a single whitespace-free token.
fn atom_name(name: &str, args: &[String]) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        format!("{}({})", name, args.join(","))
    }
}

struct TypeTable {
    /// type -> transitive ancestors (excluding `object`).
    ancestors: BTreeMap<String, Vec<String>>,
}

impl TypeTable {
    fn build(domain: &LiftedDomain) -> Result<Self, PddlError> {
        let declared: BTreeSet<&str> = domain.types.iter().map(|t| t.name.as_str()).collect();
        let parent: BTreeMap<&str, Option<&str>> =
            domain.types.iter().map(|t| (t.name.as_str(), t.parent.as_deref())).collect();
        let mut ancestors = BTreeMap::new();
        for t in &domain.types {
            let mut chain = Vec::new();
            let mut cur = t.parent.as_deref();
            while let Some(p) = cur {
                if p == "object" {
                    break;
                }
                if !declared.contains(p) {
                    return Err(PddlError::Undeclared {
                        pos: crate::sexp::Pos { line: 0, col: 0 },
                        kind: "type",
                        name: p.to_string(),
                    });
                }
                if chain.contains(&p.to_string()) || p == t.name {
                    return Err(PddlError::Json(format!("cycle in type hierarchy at `{p}`")));
                }
                chain.push(p.to_string());
                cur = parent.get(p).copied().flatten();
            }
            ancestors.insert(t.name.clone(), chain);
        }
        Ok(TypeTable { ancestors })
    }

    fn is_declared(&self, ty: &str) -> bool {
        ty == "object" || self.ancestors.contains_key(ty)
    }
}

fn lifted_to_linear(
    expr: &LiftedExpr,
    ctx: &str,
    binding: &BTreeMap<String, String>,
    lookup_fluent: &dyn Fn(&str, &[String]) -> Result<NumVarId, PddlError>,
) -> Result<LinearExpr, PddlError> {
    let recurse = |e: &LiftedExpr| lifted_to_linear(e, ctx, binding, lookup_fluent);
    match expr {
        LiftedExpr::Const(r) => Ok(LinearExpr::constant(r.clone())),
        LiftedExpr::Fluent { name, args } => {
            let ground_args: Vec<String> =
                args.iter().map(|a| binding.get(a).cloned().unwrap_or_else(|| a.clone())).collect();
            let v = lookup_fluent(name, &ground_args)?;
            Ok(LinearExpr::var(v))
        }
        LiftedExpr::Add(a, b) => Ok(recurse(a)?.add(&recurse(b)?)),
        LiftedExpr::Sub(a, b) => Ok(recurse(a)?.sub(&recurse(b)?)),
        LiftedExpr::Neg(a) => Ok(recurse(a)?.negate()),
        LiftedExpr::Mul(a, b) => {
            let la = recurse(a)?;
            let lb = recurse(b)?;
            if la.is_constant() {
                Ok(lb.scale(la.constant_part()))
            } else if lb.is_constant() {
                Ok(la.scale(lb.constant_part()))
            } else {
                Err(PddlError::NonLinearExpression {
                    context: ctx.to_string(),
                    detail: "product of two non-constant terms".into(),
                })
            }
        }
        LiftedExpr::Div(a, b) => {
            let la = recurse(a)?;
            let lb = recurse(b)?;
            if !lb.is_constant() {
                Err(PddlError::NonLinearExpression {
                    context: ctx.to_string(),
                    detail: "division by a non-constant term".into(),
                })
            } else if lb.constant_part().is_zero() {
                Err(PddlError::NonLinearExpression { context: ctx.to_string(), detail: "division by zero".into() })
            } else {
                Ok(la.scale(&(Rational::from_integer(1.into()) / lb.constant_part())))
            }
        }
    }
}

struct ProtoAction {
    name: String,
    pre: Vec<Condition>,
    eff: Vec<Effect>,
    alive: bool,
}

/// Grounds a parsed domain/problem pair into a [`Problem`].
///
/// Instantiation is exhaustive over typed objects; afterwards, Boolean
/// atoms that can never be true (absent from the initial state and
/// never added by a surviving action) and atoms that can never be false
/// are constant-folded and the affected actions pruned, to a fixpoint.
/// Variables left unreferenced by actions and goals are dropped.
pub fn ground(domain: &LiftedDomain, problem: &LiftedProblem) -> Result<(Problem, GroundingTable), PddlError> {
    if !problem.domain_name.is_empty() && problem.domain_name != domain.name {
        return Err(PddlError::WrongDomain { expected: domain.name.clone(), got: problem.domain_name.clone() });
    }
    let types = TypeTable::build(domain)?;

    // objects per declared type, in declaration order
    let mut objects_by_type: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (obj, ty) in &problem.objects {
        if !types.is_declared(ty) {
            return Err(PddlError::UntypedObject(obj.clone()));
        }
        objects_by_type.entry("object".into()).or_default().push(obj.clone());
        if ty != "object" {
            objects_by_type.entry(ty.clone()).or_default().push(obj.clone());
            for anc in types.ancestors.get(ty).into_iter().flatten() {
                objects_by_type.entry(anc.clone()).or_default().push(obj.clone());
            }
        }
    }
    let object_type: BTreeMap<&str, &str> =
        problem.objects.iter().map(|(o, t)| (o.as_str(), t.as_str())).collect();

    let objects_of = |ty: &str| -> Vec<String> { objects_by_type.get(ty).cloned().unwrap_or_default() };

    // enumerate ground atoms for every predicate and function
    let mut bool_atom_ids: BTreeMap<String, BoolVarId> = BTreeMap::new();
    let mut bool_atom_names: Vec<String> = Vec::new();
    let mut num_atom_ids: BTreeMap<String, NumVarId> = BTreeMap::new();
    let mut num_atom_names: Vec<String> = Vec::new();

    let enumerate = |params: &[Param]| -> Vec<Vec<String>> {
        let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
        for p in params {
            let objs = objects_of(&p.ty);
            let mut next = Vec::new();
            for tuple in &tuples {
                for o in &objs {
                    let mut t = tuple.clone();
                    t.push(o.clone());
                    next.push(t);
                }
            }
            tuples = next;
        }
        tuples
    };

    for pred in &domain.predicates {
        for tuple in enumerate(&pred.params) {
            let name = atom_name(&pred.name, &tuple);
            let id = BoolVarId(bool_atom_names.len() as u32);
            bool_atom_ids.insert(name.clone(), id);
            bool_atom_names.push(name);
        }
    }
    for func in &domain.functions {
        for tuple in enumerate(&func.params) {
            let name = atom_name(&func.name, &tuple);
            let id = NumVarId(num_atom_names.len() as u32);
            num_atom_ids.insert(name.clone(), id);
            num_atom_names.push(name);
        }
    }

    let pred_arity: BTreeMap<&str, &PredicateDef> = domain.predicates.iter().map(|p| (p.name.as_str(), p)).collect();
    let func_arity: BTreeMap<&str, &FunctionDef> = domain.functions.iter().map(|f| (f.name.as_str(), f)).collect();
    let zero_pos = crate::sexp::Pos { line: 0, col: 0 };

    // lookup helpers: ill-typed tuples simply do not exist
    let lookup_pred = |name: &str, args: &[String]| -> Result<Option<BoolVarId>, PddlError> {
        if !pred_arity.contains_key(name) {
            return Err(PddlError::Undeclared { pos: zero_pos, kind: "predicate", name: name.to_string() });
        }
        Ok(bool_atom_ids.get(&atom_name(name, args)).copied())
    };
    let lookup_fluent_strict = |name: &str, args: &[String]| -> Result<NumVarId, PddlError> {
        if !func_arity.contains_key(name) {
            return Err(PddlError::Undeclared { pos: zero_pos, kind: "function", name: name.to_string() });
        }
        num_atom_ids
            .get(&atom_name(name, args))
            .copied()
            .ok_or_else(|| PddlError::Undeclared { pos: zero_pos, kind: "ground fluent", name: atom_name(name, args) })
    };

    // instantiate schemas
    let mut protos: Vec<ProtoAction> = Vec::new();
    for schema in &domain.actions {
        for p in &schema.params {
            if !types.is_declared(&p.ty) {
                return Err(PddlError::Undeclared { pos: zero_pos, kind: "type", name: p.ty.clone() });
            }
        }
        for tuple in enumerate(&schema.params) {
            let binding: BTreeMap<String, String> =
                schema.params.iter().map(|p| p.name.clone()).zip(tuple.iter().cloned()).collect();
            let resolve = |arg: &String| -> String { binding.get(arg).cloned().unwrap_or_else(|| arg.clone()) };
            let name = atom_name(&schema.name, &tuple);
            let mut alive = true;
            let mut pre = Vec::new();

            for cond in &schema.pre {
                match cond {
                    LiftedCond::Pred { name: pname, args, negated } => {
                        let ground_args: Vec<String> = args.iter().map(resolve).collect();
                        match lookup_pred(pname, &ground_args)? {
                            Some(v) => pre.push(Condition::Bool(v, !negated)),
                            // ill-typed atom: can never be true
                            None if *negated => {}
                            None => alive = false,
                        }
                    }
                    LiftedCond::ObjEq { a, b, negated } => {
                        let oa = resolve(a);
                        let ob = resolve(b);
                        if object_type.get(oa.as_str()).is_none() && !oa.starts_with('?') {
                            return Err(PddlError::Undeclared { pos: zero_pos, kind: "object", name: oa });
                        }
                        if object_type.get(ob.as_str()).is_none() && !ob.starts_with('?') {
                            return Err(PddlError::Undeclared { pos: zero_pos, kind: "object", name: ob });
                        }
                        let equal = oa == ob;
                        if equal == *negated {
                            alive = false;
                        }
                    }
                    LiftedCond::NumCmp { op, lhs, rhs } => {
                        let l = lifted_to_linear(lhs, &name, &binding, &lookup_fluent_strict)?;
                        let r = lifted_to_linear(rhs, &name, &binding, &lookup_fluent_strict)?;
                        let diff = l.sub(&r);
                        if diff.is_constant() {
                            let k = diff.constant_part();
                            let sat = match op {
                                RawCmp::Lt => k.is_negative(),
                                RawCmp::Le => !k.is_positive(),
                                RawCmp::Gt => k.is_positive(),
                                RawCmp::Ge => !k.is_negative(),
                                RawCmp::Eq => k.is_zero(),
                            };
                            if !sat {
                                alive = false;
                            }
                        } else {
                            pre.push(match op {
                                RawCmp::Lt => Condition::lt(diff),
                                RawCmp::Le => Condition::le(diff),
                                RawCmp::Gt => Condition::gt(diff),
                                RawCmp::Ge => Condition::ge(diff),
                                RawCmp::Eq => Condition::eq0(diff),
                            });
                        }
                    }
                }
            }

            let mut eff = Vec::new();
            for e in &schema.eff {
                match e {
                    LiftedEffect::Add { name: pname, args } => {
                        let ground_args: Vec<String> = args.iter().map(resolve).collect();
                        match lookup_pred(pname, &ground_args)? {
                            Some(v) => eff.push(Effect::Bool(v, true)),
                            None => {
                                return Err(PddlError::Undeclared {
                                    pos: zero_pos,
                                    kind: "ground atom",
                                    name: atom_name(pname, &ground_args),
                                })
                            }
                        }
                    }
                    LiftedEffect::Del { name: pname, args } => {
                        let ground_args: Vec<String> = args.iter().map(resolve).collect();
                        match lookup_pred(pname, &ground_args)? {
                            Some(v) => eff.push(Effect::Bool(v, false)),
                            None => {
                                return Err(PddlError::Undeclared {
                                    pos: zero_pos,
                                    kind: "ground atom",
                                    name: atom_name(pname, &ground_args),
                                })
                            }
                        }
                    }
                    LiftedEffect::NumAssign { op, name: fname, args, expr } => {
                        let ground_args: Vec<String> = args.iter().map(resolve).collect();
                        let target = lookup_fluent_strict(fname, &ground_args)?;
                        let rhs = lifted_to_linear(expr, &name, &binding, &lookup_fluent_strict)?;
                        eff.push(match op {
                            AssignOp::Assign => Effect::Num(target, rhs),
                            AssignOp::Increase => Effect::increase(target, rhs),
                            AssignOp::Decrease => Effect::decrease(target, rhs),
                        });
                    }
                }
            }

            // identical duplicates (e.g. `(not (free ?a))` with ?a = ?b) are idempotent;
            // conflicting duplicates are caught after pruning, on surviving actions
            let mut deduped: Vec<Effect> = Vec::with_capacity(eff.len());
            for e in eff {
                if !deduped.contains(&e) {
                    deduped.push(e);
                }
            }
            protos.push(ProtoAction { name, pre, eff: deduped, alive });
        }
    }

    // initial state maps
    let mut init_bools = vec![false; bool_atom_names.len()];
    for (pname, args) in &problem.init_preds {
        let v = lookup_pred(pname, args)?.ok_or_else(|| PddlError::Undeclared {
            pos: zero_pos,
            kind: "ground atom",
            name: atom_name(pname, args),
        })?;
        init_bools[v.0 as usize] = true;
    }
    let mut init_nums: BTreeMap<NumVarId, Rational> = BTreeMap::new();
    for (fname, args, val) in &problem.init_fluents {
        let v = lookup_fluent_strict(fname, args)?;
        if let Some(prev) = init_nums.get(&v) {
            if prev != val {
                return Err(PddlError::ConflictingInit(atom_name(fname, args)));
            }
        }
        init_nums.insert(v, val.clone());
    }

    // goals
    let goal_formula = goal_to_formula(&problem.goal, &object_type, &lookup_pred, &lookup_fluent_strict)?;
    let goals: Vec<Formula> = match goal_formula {
        Formula::And(fs) => fs,
        other => vec![other],
    };

    // variables the goals mention are exempt from folding
    let mut goal_bools = BTreeSet::new();
    let mut goal_nums = BTreeSet::new();
    for g in &goals {
        collect_formula_vars(g, &mut goal_bools, &mut goal_nums);
    }

    // fold/prune fixpoint
    loop {
        let mut added = vec![false; bool_atom_names.len()];
        let mut deleted = vec![false; bool_atom_names.len()];
        for a in protos.iter().filter(|a| a.alive) {
            for e in &a.eff {
                if let Effect::Bool(v, val) = e {
                    if *val {
                        added[v.0 as usize] = true;
                    } else {
                        deleted[v.0 as usize] = true;
                    }
                }
            }
        }
        // constant value per Boolean var, if any
        let const_of = |v: BoolVarId| -> Option<bool> {
            if goal_bools.contains(&v) {
                return None;
            }
            let i = v.0 as usize;
            if !init_bools[i] && !added[i] {
                Some(false)
            } else if init_bools[i] && !deleted[i] {
                Some(true)
            } else {
                None
            }
        };
        let mut changed = false;
        for a in protos.iter_mut().filter(|a| a.alive) {
            a.pre.retain(|c| match c {
                Condition::Bool(v, want) => match const_of(*v) {
                    Some(cv) if cv == *want => {
                        changed = true;
                        false
                    }
                    _ => true,
                },
                _ => true,
            });
            if a.pre.iter().any(|c| matches!(c, Condition::Bool(v, want) if const_of(*v) == Some(!*want))) {
                a.alive = false;
                changed = true;
                continue;
            }
            let before = a.eff.len();
            a.eff.retain(|e| match e {
                Effect::Bool(v, val) => const_of(*v) != Some(*val),
                _ => true,
            });
            if a.eff.len() != before {
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // keep only variables referenced by surviving actions or goals
    let mut keep_bool = goal_bools.clone();
    let mut keep_num = goal_nums.clone();
    for a in protos.iter().filter(|a| a.alive) {
        for c in &a.pre {
            match c {
                Condition::Bool(v, _) => {
                    keep_bool.insert(*v);
                }
                Condition::Num(e, _) => keep_num.extend(e.vars()),
            }
        }
        for e in &a.eff {
            match e {
                Effect::Bool(v, _) => {
                    keep_bool.insert(*v);
                }
                Effect::Num(v, rhs) => {
                    keep_num.insert(*v);
                    keep_num.extend(rhs.vars());
                }
            }
        }
    }

    let bool_map: BTreeMap<BoolVarId, BoolVarId> =
        keep_bool.iter().enumerate().map(|(new, old)| (*old, BoolVarId(new as u32))).collect();
    let num_map: BTreeMap<NumVarId, NumVarId> =
        keep_num.iter().enumerate().map(|(new, old)| (*old, NumVarId(new as u32))).collect();

    let remap_expr = |e: &LinearExpr| -> LinearExpr {
        let mut out = LinearExpr::constant(e.constant_part().clone());
        for (v, k) in e.terms() {
            out.add_term(num_map[&v], k.clone());
        }
        out
    };
    let remap_cond = |c: &Condition| -> Condition {
        match c {
            Condition::Bool(v, t) => Condition::Bool(bool_map[v], *t),
            Condition::Num(e, op) => Condition::Num(remap_expr(e), *op),
        }
    };
    let remap_eff = |e: &Effect| -> Effect {
        match e {
            Effect::Bool(v, t) => Effect::Bool(bool_map[v], *t),
            Effect::Num(v, rhs) => Effect::Num(num_map[v], remap_expr(rhs)),
        }
    };

    let mut actions = Vec::new();
    for a in protos.iter().filter(|a| a.alive) {
        // single-assignment must hold for every surviving ground action
        let mut bool_targets = BTreeSet::new();
        let mut num_targets = BTreeSet::new();
        for e in &a.eff {
            let fresh = match e {
                Effect::Bool(v, _) => bool_targets.insert(*v),
                Effect::Num(v, _) => num_targets.insert(*v),
            };
            if !fresh {
                let var = match e {
                    Effect::Bool(v, _) => bool_atom_names[v.0 as usize].clone(),
                    Effect::Num(v, _) => num_atom_names[v.0 as usize].clone(),
                };
                return Err(crate::model::ModelError::DuplicateAssignment(var, a.name.clone()).into());
            }
        }
        let pre = a.pre.iter().map(remap_cond).collect();
        let eff = a.eff.iter().map(remap_eff).collect();
        actions.push(Action::new(a.name.clone(), pre, eff)?);
    }

    let bool_names: Vec<String> = keep_bool.iter().map(|v| bool_atom_names[v.0 as usize].clone()).collect();
    let num_names: Vec<String> = keep_num.iter().map(|v| num_atom_names[v.0 as usize].clone()).collect();

    let mut num_vals = Vec::with_capacity(num_names.len());
    for old in keep_num.iter() {
        match init_nums.get(old) {
            Some(v) => num_vals.push(v.clone()),
            None => return Err(PddlError::MissingInit(num_atom_names[old.0 as usize].clone())),
        }
    }
    let init = State { bool_vals: keep_bool.iter().map(|v| init_bools[v.0 as usize]).collect(), num_vals };

    let remapped_goals: Vec<Formula> = goals.iter().map(|g| remap_formula(g, &bool_map, &num_map)).collect();

    let table = GroundingTable {
        objects_by_type,
        bool_atoms: bool_names.iter().enumerate().map(|(i, n)| (n.clone(), BoolVarId(i as u32))).collect(),
        num_atoms: num_names.iter().enumerate().map(|(i, n)| (n.clone(), NumVarId(i as u32))).collect(),
    };

    Ok((Problem { bool_names, num_names, actions, init, goals: remapped_goals }, table))
}

fn goal_to_formula(
    goal: &LiftedGoal,
    object_type: &BTreeMap<&str, &str>,
    lookup_pred: &dyn Fn(&str, &[String]) -> Result<Option<BoolVarId>, PddlError>,
    lookup_fluent: &dyn Fn(&str, &[String]) -> Result<NumVarId, PddlError>,
) -> Result<Formula, PddlError> {
    let zero_pos = crate::sexp::Pos { line: 0, col: 0 };
    match goal {
        LiftedGoal::Cond(c) => match c {
            LiftedCond::Pred { name, args, negated } => match lookup_pred(name, args)? {
                Some(v) => Ok(Formula::Cond(Condition::Bool(v, !negated))),
                None => Err(PddlError::Undeclared { pos: zero_pos, kind: "ground atom", name: atom_name(name, args) }),
            },
            LiftedCond::ObjEq { a, b, negated } => {
                if !object_type.contains_key(a.as_str()) {
                    return Err(PddlError::Undeclared { pos: zero_pos, kind: "object", name: a.clone() });
                }
                if !object_type.contains_key(b.as_str()) {
                    return Err(PddlError::Undeclared { pos: zero_pos, kind: "object", name: b.clone() });
                }
                // empty conjunction is `true`, empty disjunction is `false`
                if (a == b) != *negated {
                    Ok(Formula::And(vec![]))
                } else {
                    Ok(Formula::Or(vec![]))
                }
            }
            LiftedCond::NumCmp { op, lhs, rhs } => {
                let binding = BTreeMap::new();
                let l = lifted_to_linear(lhs, "goal", &binding, lookup_fluent)?;
                let r = lifted_to_linear(rhs, "goal", &binding, lookup_fluent)?;
                let diff = l.sub(&r);
                Ok(Formula::Cond(match op {
                    RawCmp::Lt => Condition::lt(diff),
                    RawCmp::Le => Condition::le(diff),
                    RawCmp::Gt => Condition::gt(diff),
                    RawCmp::Ge => Condition::ge(diff),
                    RawCmp::Eq => Condition::eq0(diff),
                }))
            }
        },
        LiftedGoal::And(gs) => {
            let mut parts = Vec::new();
            for g in gs {
                parts.push(goal_to_formula(g, object_type, lookup_pred, lookup_fluent)?);
            }
            Ok(Formula::And(parts))
        }
        LiftedGoal::Or(gs) => {
            let mut parts = Vec::new();
            for g in gs {
                parts.push(goal_to_formula(g, object_type, lookup_pred, lookup_fluent)?);
            }
            Ok(Formula::Or(parts))
        }
        LiftedGoal::Not(g) => {
            Ok(Formula::Not(Box::new(goal_to_formula(g, object_type, lookup_pred, lookup_fluent)?)))
        }
    }
}

fn collect_formula_vars(f: &Formula, bools: &mut BTreeSet<BoolVarId>, nums: &mut BTreeSet<NumVarId>) {
    match f {
        Formula::Cond(Condition::Bool(v, _)) => {
            bools.insert(*v);
        }
        Formula::Cond(Condition::Num(e, _)) => nums.extend(e.vars()),
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                collect_formula_vars(g, bools, nums);
            }
        }
        Formula::Not(g) => collect_formula_vars(g, bools, nums),
    }
}

fn remap_formula(
    f: &Formula,
    bool_map: &BTreeMap<BoolVarId, BoolVarId>,
    num_map: &BTreeMap<NumVarId, NumVarId>,
) -> Formula {
    match f {
        Formula::Cond(Condition::Bool(v, t)) => Formula::Cond(Condition::Bool(bool_map[v], *t)),
        Formula::Cond(Condition::Num(e, op)) => {
            let mut out = LinearExpr::constant(e.constant_part().clone());
            for (v, k) in e.terms() {
                out.add_term(num_map[&v], k.clone());
            }
            Formula::Cond(Condition::Num(out, *op))
        }
        Formula::And(fs) => Formula::And(fs.iter().map(|g| remap_formula(g, bool_map, num_map)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| remap_formula(g, bool_map, num_map)).collect()),
        Formula::Not(g) => Formula::Not(Box::new(remap_formula(g, bool_map, num_map))),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_domain, parse_problem};
    use super::*;

    #[test]
    fn two_robots_counts() {
        let (dom, prob) = crate::generate::two_robots_pddl(1, 1);
        let d = parse_domain(&dom).unwrap();
        assert_eq!(d.actions.len(), 9);
        let p = parse_problem(&prob).unwrap();
        let (g, _) = ground(&d, &p).unwrap();
        assert_eq!(g.bool_names.len(), 1);
        assert_eq!(g.num_names.len(), 5);
        assert_eq!(g.actions.len(), 9);
    }

    #[test]
    fn zero_objects_pass_through() {
        let dom = "(define (domain d0) (:requirements :fluents) (:functions (x))\n\
            (:action a :parameters () :precondition (and) :effect (increase (x) 1)))";
        let prob = "(define (problem p0) (:domain d0) (:init (= (x) 0)) (:goal (>= (x) 1)))";
        let d = parse_domain(dom).unwrap();
        let p = parse_problem(prob).unwrap();
        let (g, _) = ground(&d, &p).unwrap();
        assert_eq!(g.actions.len(), 1);
        assert_eq!(g.actions[0].name, "a");
    }

    #[test]
    fn nonlinear_rejected() {
        let dom = "(define (domain dn) (:requirements :fluents) (:functions (x) (y))\n\
            (:action a :parameters () :precondition (>= (* (x) (y)) 0) :effect (increase (x) 1)))";
        let prob = "(define (problem pn) (:domain dn) (:init (= (x) 0) (= (y) 0)) (:goal (>= (x) 1)))";
        let d = parse_domain(dom).unwrap();
        let p = parse_problem(prob).unwrap();
        match ground(&d, &p) {
            Err(PddlError::NonLinearExpression { .. }) => {}
            other => panic!("expected NonLinearExpression, got {other:?}"),
        }
    }

    #[test]
    fn statically_false_atoms_prune_actions() {
        let dom = "(define (domain dp) (:requirements :typing :negative-preconditions :fluents)\n\
            (:types thing)\n(:predicates (adj ?a - thing ?b - thing) (on ?a - thing))\n\
            (:functions (x))\n\
            (:action go :parameters (?a - thing ?b - thing)\n\
              :precondition (adj ?a ?b) :effect (on ?a))\n\
            (:action tick :parameters () :precondition (and) :effect (increase (x) 1)))";
        let prob = "(define (problem pp) (:domain dp) (:objects t1 t2 - thing)\n\
            (:init (adj t1 t2) (= (x) 0)) (:goal (on t1)))";
        let d = parse_domain(dom).unwrap();
        let p = parse_problem(prob).unwrap();
        let (g, _) = ground(&d, &p).unwrap();
        // only go(t1,t2) survives out of the four instantiations,
        // and its adj precondition folds away as constant-true
        let gos: Vec<_> = g.actions.iter().filter(|a| a.name.starts_with("go")).collect();
        assert_eq!(gos.len(), 1);
        assert_eq!(gos[0].name, "go(t1,t2)");
        assert!(gos[0].pre.is_empty());
        // adj atoms were folded, on(t2) never achievable but goal-exempt rules keep on(t1) only
        assert!(g.bool_names.iter().all(|n| !n.starts_with("adj")));
    }

    #[test]
    fn object_equality_resolved_at_grounding() {
        let dom = "(define (domain de) (:requirements :typing :equality :fluents)\n\
            (:types thing)\n(:predicates (mark ?a - thing))\n\
            (:action pair :parameters (?a - thing ?b - thing)\n\
              :precondition (not (= ?a ?b)) :effect (mark ?a)))";
        let prob = "(define (problem pe) (:domain de) (:objects t1 t2 - thing)\n\
            (:init) (:goal (mark t1)))";
        let d = parse_domain(dom).unwrap();
        let p = parse_problem(prob).unwrap();
        let (g, _) = ground(&d, &p).unwrap();
        assert_eq!(g.actions.len(), 2);
        assert!(g.actions.iter().all(|a| a.pre.is_empty()));
    }

    #[test]
    fn missing_fluent_init_is_loud() {
        let dom = "(define (domain dm) (:requirements :fluents) (:functions (x))\n\
            (:action a :parameters () :precondition (and) :effect (increase (x) 1)))";
        let prob = "(define (problem pm) (:domain dm) (:init) (:goal (>= (x) 1)))";
        let d = parse_domain(dom).unwrap();
        let p = parse_problem(prob).unwrap();
        match ground(&d, &p) {
            Err(PddlError::MissingInit(name)) => assert_eq!(name, "x"),
            other => panic!("expected MissingInit, got {other:?}"),
        }
    }
}
