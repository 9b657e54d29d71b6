//! Parser from s-expressions to the lifted AST.

use num_bigint::BigInt;
use num_traits::Zero;

use super::ast::*;
use super::PddlError;
use crate::model::Rational;
use crate::sexp::{self, Pos, Sexp};

const SUPPORTED_REQUIREMENTS: &[&str] =
    &[":strips", ":typing", ":fluents", ":numeric-fluents", ":negative-preconditions", ":equality"];

fn syntax(pos: Pos, msg: impl Into<String>) -> PddlError {
    PddlError::Syntax { pos, msg: msg.into() }
}

fn atom_of(s: &Sexp) -> Result<String, PddlError> {
    s.as_atom().map(|a| a.to_ascii_lowercase()).ok_or_else(|| syntax(s.pos(), "expected a symbol"))
}

fn list_of(s: &Sexp) -> Result<&[Sexp], PddlError> {
    s.as_list().ok_or_else(|| syntax(s.pos(), "expected a list"))
}

/// Parses a PDDL numeric literal (integer or decimal) if the atom is one.
pub(crate) fn parse_number(text: &str) -> Option<Rational> {
    let t = text.strip_prefix('+').unwrap_or(text);
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    if t.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match t.split_once('.') {
        Some((i, f)) => (i, f),
        None => (t, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let mut r = Rational::new(numer, denom);
    if neg {
        r = -r;
    }
    Some(r)
}

/// Parses `a b - t c - u d` into typed entries; untyped entries get `object`.
fn parse_typed_list(items: &[Sexp]) -> Result<Vec<(String, String)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let tok = atom_of(&items[i])?;
        if tok == "-" {
            i += 1;
            let ty = items
                .get(i)
                .ok_or_else(|| syntax(items[i - 1].pos(), "dangling `-` in typed list"))
                .and_then(atom_of)?;
            for name in pending.drain(..) {
                out.push((name, ty.clone()));
            }
            i += 1;
        } else {
            pending.push(tok);
            i += 1;
        }
    }
    for name in pending {
        out.push((name, "object".to_string()));
    }
    Ok(out)
}

fn parse_params(s: &Sexp) -> Result<Vec<Param>, PddlError> {
    let items = list_of(s)?;
    let typed = parse_typed_list(items)?;
    for (name, _) in &typed {
        if !name.starts_with('?') {
            return Err(syntax(s.pos(), format!("parameter `{name}` must start with `?`")));
        }
    }
    Ok(typed.into_iter().map(|(name, ty)| Param { name, ty }).collect())
}

fn parse_expr(s: &Sexp) -> Result<LiftedExpr, PddlError> {
    match s {
        Sexp::Atom { text, pos } => match parse_number(text) {
            Some(r) => Ok(LiftedExpr::Const(r)),
            None => Err(syntax(*pos, format!("expected a number or fluent, got `{text}`"))),
        },
        Sexp::List { items, pos } => {
            let head = items.first().ok_or_else(|| syntax(*pos, "empty numeric term"))?;
            let op = atom_of(head)?;
            let fold = |e: LiftedExpr| constant_fold(e);
            match op.as_str() {
                "+" | "*" => {
                    if items.len() < 3 {
                        return Err(syntax(*pos, format!("`{op}` needs at least two arguments")));
                    }
                    let mut acc = parse_expr(&items[1])?;
                    for item in &items[2..] {
                        let rhs = parse_expr(item)?;
                        acc = if op == "+" {
                            LiftedExpr::Add(Box::new(acc), Box::new(rhs))
                        } else {
                            LiftedExpr::Mul(Box::new(acc), Box::new(rhs))
                        };
                    }
                    Ok(fold(acc))
                }
                "-" => match items.len() {
                    2 => Ok(fold(LiftedExpr::Neg(Box::new(parse_expr(&items[1])?)))),
                    3 => Ok(fold(LiftedExpr::Sub(Box::new(parse_expr(&items[1])?), Box::new(parse_expr(&items[2])?)))),
                    _ => Err(syntax(*pos, "`-` takes one or two arguments")),
                },
                "/" => {
                    if items.len() != 3 {
                        return Err(syntax(*pos, "`/` takes exactly two arguments"));
                    }
                    Ok(fold(LiftedExpr::Div(Box::new(parse_expr(&items[1])?), Box::new(parse_expr(&items[2])?))))
                }
                _ => {
                    let mut args = Vec::new();
                    for a in &items[1..] {
                        args.push(atom_of(a)?);
                    }
                    Ok(LiftedExpr::Fluent { name: op, args })
                }
            }
        }
    }
}

/// Folds fully-constant subtrees so parse->print->parse is stable.
fn constant_fold(e: LiftedExpr) -> LiftedExpr {
    fn value(e: &LiftedExpr) -> Option<Rational> {
        match e {
            LiftedExpr::Const(r) => Some(r.clone()),
            _ => None,
        }
    }
    match e {
        LiftedExpr::Add(a, b) => match (value(&a), value(&b)) {
            (Some(x), Some(y)) => LiftedExpr::Const(x + y),
            _ => LiftedExpr::Add(a, b),
        },
        LiftedExpr::Sub(a, b) => match (value(&a), value(&b)) {
            (Some(x), Some(y)) => LiftedExpr::Const(x - y),
            _ => LiftedExpr::Sub(a, b),
        },
        LiftedExpr::Neg(a) => match value(&a) {
            Some(x) => LiftedExpr::Const(-x),
            None => LiftedExpr::Neg(a),
        },
        LiftedExpr::Mul(a, b) => match (value(&a), value(&b)) {
            (Some(x), Some(y)) => LiftedExpr::Const(x * y),
            _ => LiftedExpr::Mul(a, b),
        },
        LiftedExpr::Div(a, b) => match (value(&a), value(&b)) {
            (Some(x), Some(y)) if !y.is_zero() => LiftedExpr::Const(x / y),
            _ => LiftedExpr::Div(a, b),
        },
        other => other,
    }
}

fn is_numeric_operand(s: &Sexp) -> bool {
    match s {
        Sexp::Atom { text, .. } => parse_number(text).is_some(),
        Sexp::List { .. } => true,
    }
}

fn parse_condition(s: &Sexp) -> Result<LiftedCond, PddlError> {
    let items = list_of(s)?;
    let pos = s.pos();
    let head = s.head().ok_or_else(|| syntax(pos, "expected a condition"))?;
    match head.as_str() {
        "not" => {
            if items.len() != 2 {
                return Err(syntax(pos, "`not` takes exactly one argument"));
            }
            match parse_condition(&items[1])? {
                LiftedCond::Pred { name, args, negated } => Ok(LiftedCond::Pred { name, args, negated: !negated }),
                LiftedCond::ObjEq { a, b, negated } => Ok(LiftedCond::ObjEq { a, b, negated: !negated }),
                LiftedCond::NumCmp { .. } => {
                    Err(PddlError::UnsupportedFeature { pos, feature: "negated numeric condition".into() })
                }
            }
        }
        "<" | "<=" | ">" | ">=" => {
            if items.len() != 3 {
                return Err(syntax(pos, format!("`{head}` takes exactly two arguments")));
            }
            let op = match head.as_str() {
                "<" => RawCmp::Lt,
                "<=" => RawCmp::Le,
                ">" => RawCmp::Gt,
                _ => RawCmp::Ge,
            };
            Ok(LiftedCond::NumCmp { op, lhs: parse_expr(&items[1])?, rhs: parse_expr(&items[2])? })
        }
        "=" => {
            if items.len() != 3 {
                return Err(syntax(pos, "`=` takes exactly two arguments"));
            }
            if is_numeric_operand(&items[1]) || is_numeric_operand(&items[2]) {
                Ok(LiftedCond::NumCmp { op: RawCmp::Eq, lhs: parse_expr(&items[1])?, rhs: parse_expr(&items[2])? })
            } else {
                Ok(LiftedCond::ObjEq { a: atom_of(&items[1])?, b: atom_of(&items[2])?, negated: false })
            }
        }
        "and" | "or" | "imply" | "exists" | "forall" | "when" => {
            Err(PddlError::UnsupportedFeature { pos, feature: format!("`{head}` inside a simple condition") })
        }
        _ => {
            let mut args = Vec::new();
            for a in &items[1..] {
                args.push(atom_of(a)?);
            }
            Ok(LiftedCond::Pred { name: head, args, negated: false })
        }
    }
}

/// Action preconditions: a conjunction of simple conditions.
fn parse_precondition(s: &Sexp) -> Result<Vec<LiftedCond>, PddlError> {
    let pos = s.pos();
    match s.head().as_deref() {
        Some("and") => {
            let mut out = Vec::new();
            for item in &list_of(s)?[1..] {
                out.extend(parse_precondition(item)?);
            }
            Ok(out)
        }
        Some("or") | Some("imply") | Some("exists") | Some("forall") => {
            Err(PddlError::UnsupportedFeature { pos, feature: "disjunctive or quantified precondition".into() })
        }
        Some(_) => Ok(vec![parse_condition(s)?]),
        None => {
            if list_of(s)?.is_empty() {
                Ok(vec![])
            } else {
                Err(syntax(pos, "expected a condition"))
            }
        }
    }
}

/// Goal trees allow full propositional structure.
fn parse_goal(s: &Sexp) -> Result<LiftedGoal, PddlError> {
    let pos = s.pos();
    match s.head().as_deref() {
        Some("and") => {
            let mut out = Vec::new();
            for item in &list_of(s)?[1..] {
                out.push(parse_goal(item)?);
            }
            Ok(LiftedGoal::And(out))
        }
        Some("or") => {
            let mut out = Vec::new();
            for item in &list_of(s)?[1..] {
                out.push(parse_goal(item)?);
            }
            Ok(LiftedGoal::Or(out))
        }
        Some("not") => {
            let items = list_of(s)?;
            if items.len() != 2 {
                return Err(syntax(pos, "`not` takes exactly one argument"));
            }
            // (not (pred ...)) stays a literal; (not <tree>) recurses
            match parse_goal(&items[1])? {
                LiftedGoal::Cond(LiftedCond::Pred { name, args, negated }) => {
                    Ok(LiftedGoal::Cond(LiftedCond::Pred { name, args, negated: !negated }))
                }
                LiftedGoal::Cond(LiftedCond::ObjEq { a, b, negated }) => {
                    Ok(LiftedGoal::Cond(LiftedCond::ObjEq { a, b, negated: !negated }))
                }
                g => Ok(LiftedGoal::Not(Box::new(g))),
            }
        }
        Some("exists") | Some("forall") | Some("imply") | Some("when") => {
            Err(PddlError::UnsupportedFeature { pos, feature: "quantified goal".into() })
        }
        Some(_) => Ok(LiftedGoal::Cond(parse_condition(s)?)),
        None => {
            if list_of(s)?.is_empty() {
                Ok(LiftedGoal::And(vec![]))
            } else {
                Err(syntax(pos, "expected a goal formula"))
            }
        }
    }
}

fn parse_effect(s: &Sexp) -> Result<Vec<LiftedEffect>, PddlError> {
    let pos = s.pos();
    let items = list_of(s)?;
    let head = s.head();
    match head.as_deref() {
        Some("and") => {
            let mut out = Vec::new();
            for item in &items[1..] {
                out.extend(parse_effect(item)?);
            }
            Ok(out)
        }
        Some("not") => {
            if items.len() != 2 {
                return Err(syntax(pos, "`not` takes exactly one argument"));
            }
            let inner = list_of(&items[1])?;
            let name = atom_of(inner.first().ok_or_else(|| syntax(pos, "empty effect"))?)?;
            let mut args = Vec::new();
            for a in &inner[1..] {
                args.push(atom_of(a)?);
            }
            Ok(vec![LiftedEffect::Del { name, args }])
        }
        Some("increase") | Some("decrease") | Some("assign") => {
            if items.len() != 3 {
                return Err(syntax(pos, format!("`{}` takes exactly two arguments", head.unwrap())));
            }
            let op = match head.as_deref().unwrap() {
                "increase" => AssignOp::Increase,
                "decrease" => AssignOp::Decrease,
                _ => AssignOp::Assign,
            };
            let target = list_of(&items[1])?;
            let name = atom_of(target.first().ok_or_else(|| syntax(items[1].pos(), "empty fluent"))?)?;
            let mut args = Vec::new();
            for a in &target[1..] {
                args.push(atom_of(a)?);
            }
            Ok(vec![LiftedEffect::NumAssign { op, name, args, expr: parse_expr(&items[2])? }])
        }
        Some("scale-up") | Some("scale-down") | Some("when") | Some("forall") => {
            Err(PddlError::UnsupportedFeature { pos, feature: format!("`{}` effect", head.unwrap()) })
        }
        Some(name) => {
            let mut args = Vec::new();
            for a in &items[1..] {
                args.push(atom_of(a)?);
            }
            Ok(vec![LiftedEffect::Add { name: name.to_string(), args }])
        }
        None => {
            if items.is_empty() {
                Ok(vec![])
            } else {
                Err(syntax(pos, "expected an effect"))
            }
        }
    }
}

fn parse_pred_or_fn_defs(items: &[Sexp]) -> Result<Vec<(String, Vec<Param>)>, PddlError> {
    let mut out = Vec::new();
    for item in items {
        let entry = list_of(item)?;
        let name = atom_of(entry.first().ok_or_else(|| syntax(item.pos(), "empty declaration"))?)?;
        let typed = parse_typed_list(&entry[1..])?;
        for (p, _) in &typed {
            if !p.starts_with('?') {
                return Err(syntax(item.pos(), format!("parameter `{p}` must start with `?`")));
            }
        }
        out.push((name, typed.into_iter().map(|(name, ty)| Param { name, ty }).collect()));
    }
    Ok(out)
}

/// Parses a PDDL domain.
///
/// Accepted requirements: `:strips :typing :fluents :numeric-fluents
/// :negative-preconditions :equality`. Anything else is rejected with
/// [`PddlError::UnsupportedFeature`].
pub fn parse_domain(text: &str) -> Result<LiftedDomain, PddlError> {
    let sx = sexp::parse_one(text)?;
    let items = list_of(&sx)?;
    if sx.head().as_deref() != Some("define") {
        return Err(syntax(sx.pos(), "expected `(define (domain ...) ...)`"));
    }
    let header = items.get(1).ok_or_else(|| syntax(sx.pos(), "missing `(domain NAME)`"))?;
    let header_items = list_of(header)?;
    if header.head().as_deref() != Some("domain") || header_items.len() != 2 {
        return Err(syntax(header.pos(), "expected `(domain NAME)`"));
    }
    let mut domain = LiftedDomain {
        name: atom_of(&header_items[1])?,
        requirements: Vec::new(),
        types: Vec::new(),
        predicates: Vec::new(),
        functions: Vec::new(),
        actions: Vec::new(),
    };

    for section in &items[2..] {
        let sec_items = list_of(section)?;
        let head = section.head().ok_or_else(|| syntax(section.pos(), "expected a domain section"))?;
        match head.as_str() {
            ":requirements" => {
                for r in &sec_items[1..] {
                    let req = atom_of(r)?;
                    if !SUPPORTED_REQUIREMENTS.contains(&req.as_str()) {
                        return Err(PddlError::UnsupportedFeature { pos: r.pos(), feature: req });
                    }
                    domain.requirements.push(req);
                }
            }
            ":types" => {
                for (name, ty) in parse_typed_list(&sec_items[1..])? {
                    let parent = if ty == "object" { None } else { Some(ty) };
                    domain.types.push(TypeDef { name, parent });
                }
            }
            ":predicates" => {
                for (name, params) in parse_pred_or_fn_defs(&sec_items[1..])? {
                    domain.predicates.push(PredicateDef { name, params });
                }
            }
            ":functions" => {
                for (name, params) in parse_pred_or_fn_defs(&sec_items[1..])? {
                    domain.functions.push(FunctionDef { name, params });
                }
            }
            ":action" => {
                let name = atom_of(sec_items.get(1).ok_or_else(|| syntax(section.pos(), "missing action name"))?)?;
                let mut params = Vec::new();
                let mut pre = Vec::new();
                let mut eff = Vec::new();
                let mut i = 2;
                while i < sec_items.len() {
                    let key = atom_of(&sec_items[i])?;
                    let val = sec_items
                        .get(i + 1)
                        .ok_or_else(|| syntax(sec_items[i].pos(), format!("missing value after `{key}`")))?;
                    match key.as_str() {
                        ":parameters" => params = parse_params(val)?,
                        ":precondition" => pre = parse_precondition(val)?,
                        ":effect" => eff = parse_effect(val)?,
                        other => {
                            return Err(PddlError::UnsupportedFeature {
                                pos: sec_items[i].pos(),
                                feature: format!("action keyword `{other}`"),
                            })
                        }
                    }
                    i += 2;
                }
                domain.actions.push(ActionSchema { name, params, pre, eff });
            }
            other => {
                return Err(PddlError::UnsupportedFeature { pos: section.pos(), feature: format!("section `{other}`") })
            }
        }
    }
    Ok(domain)
}

/// Parses a PDDL problem file.
pub fn parse_problem(text: &str) -> Result<LiftedProblem, PddlError> {
    let sx = sexp::parse_one(text)?;
    let items = list_of(&sx)?;
    if sx.head().as_deref() != Some("define") {
        return Err(syntax(sx.pos(), "expected `(define (problem ...) ...)`"));
    }
    let header = items.get(1).ok_or_else(|| syntax(sx.pos(), "missing `(problem NAME)`"))?;
    let header_items = list_of(header)?;
    if header.head().as_deref() != Some("problem") || header_items.len() != 2 {
        return Err(syntax(header.pos(), "expected `(problem NAME)`"));
    }
    let mut problem = LiftedProblem {
        name: atom_of(&header_items[1])?,
        domain_name: String::new(),
        objects: Vec::new(),
        init_preds: Vec::new(),
        init_fluents: Vec::new(),
        goal: LiftedGoal::And(vec![]),
    };

    for section in &items[2..] {
        let sec_items = list_of(section)?;
        let head = section.head().ok_or_else(|| syntax(section.pos(), "expected a problem section"))?;
        match head.as_str() {
            ":domain" => {
                problem.domain_name =
                    atom_of(sec_items.get(1).ok_or_else(|| syntax(section.pos(), "missing domain name"))?)?;
            }
            ":objects" => {
                problem.objects = parse_typed_list(&sec_items[1..])?;
            }
            ":init" => {
                for entry in &sec_items[1..] {
                    let entry_items = list_of(entry)?;
                    if entry.head().as_deref() == Some("=") {
                        if entry_items.len() != 3 {
                            return Err(syntax(entry.pos(), "init `=` takes a fluent and a number"));
                        }
                        let target = list_of(&entry_items[1])?;
                        let name =
                            atom_of(target.first().ok_or_else(|| syntax(entry_items[1].pos(), "empty fluent"))?)?;
                        let mut args = Vec::new();
                        for a in &target[1..] {
                            args.push(atom_of(a)?);
                        }
                        let num_atom = entry_items[2]
                            .as_atom()
                            .and_then(parse_number)
                            .ok_or_else(|| syntax(entry_items[2].pos(), "expected a numeric literal"))?;
                        problem.init_fluents.push((name, args, num_atom));
                    } else {
                        let name = atom_of(entry_items.first().ok_or_else(|| syntax(entry.pos(), "empty init atom"))?)?;
                        let mut args = Vec::new();
                        for a in &entry_items[1..] {
                            args.push(atom_of(a)?);
                        }
                        problem.init_preds.push((name, args));
                    }
                }
            }
            ":goal" => {
                let goal =
                    sec_items.get(1).ok_or_else(|| syntax(section.pos(), "missing goal formula"))?;
                problem.goal = parse_goal(goal)?;
            }
            other => {
                return Err(PddlError::UnsupportedFeature { pos: section.pos(), feature: format!("section `{other}`") })
            }
        }
    }
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = "(define (domain mini)\n(:requirements :fluents)\n(:functions (x))\n\
        (:action bump :parameters () :precondition (>= (x) 0) :effect (increase (x) 1)))";

    #[test]
    fn minimal_domain() {
        let d = parse_domain(MINI).unwrap();
        assert_eq!(d.actions.len(), 1);
        assert_eq!(d.functions.len(), 1);
    }

    #[test]
    fn durative_actions_rejected() {
        let text = "(define (domain bad) (:requirements :durative-actions))";
        match parse_domain(text) {
            Err(PddlError::UnsupportedFeature { feature, .. }) => assert_eq!(feature, ":durative-actions"),
            other => panic!("expected UnsupportedFeature, got {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let text = "(define (domain bad) (:action a :parameters ())";
        match parse_domain(text) {
            Err(PddlError::Syntax { pos, .. }) => assert_eq!(pos.line, 1),
            other => panic!("expected Syntax, got {other:?}"),
        }
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_number("3").unwrap(), crate::model::rat(3));
        assert_eq!(parse_number("-2.5"), Some(Rational::new(BigInt::from(-5), BigInt::from(2))));
        assert!(parse_number("x2").is_none());
        assert!(parse_number("-").is_none());
    }

    #[test]
    fn print_parse_round_trip() {
        let d = parse_domain(MINI).unwrap();
        let printed = d.to_string();
        let d2 = parse_domain(&printed).unwrap();
        assert_eq!(d, d2);
    }

    #[test]
    fn object_equality_vs_numeric_equality() {
        let text = "(define (domain eqd)\n(:requirements :typing :fluents :equality)\n(:types thing)\n\
            (:predicates (q ?a - thing))\n(:functions (f ?a - thing))\n\
            (:action act :parameters (?a - thing ?b - thing)\n\
             :precondition (and (not (= ?a ?b)) (= (f ?a) 0))\n :effect (q ?a)))";
        let d = parse_domain(text).unwrap();
        let pre = &d.actions[0].pre;
        assert!(matches!(pre[0], LiftedCond::ObjEq { negated: true, .. }));
        assert!(matches!(pre[1], LiftedCond::NumCmp { op: RawCmp::Eq, .. }));
    }
}
