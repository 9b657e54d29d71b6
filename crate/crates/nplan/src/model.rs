//! Ground numeric planning problems and their executable semantics.
//!
//! A problem is a tuple of Boolean variables, rational-valued numeric
//! variables, ground actions, an initial state and a set of goal formulas.
//! All numeric values are exact rationals; evaluation never rounds.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

/// Exact rational scalar used throughout.
pub type Rational = BigRational;

/// Builds a rational from an integer.
pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Index of a Boolean state variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BoolVarId(pub u32);

/// Index of a numeric state variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NumVarId(pub u32);

/// Index of a ground action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ActionId(pub u32);

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown numeric variable id {0}")]
    UnknownNumVar(u32),
    #[error("unknown Boolean variable id {0}")]
    UnknownBoolVar(u32),
    #[error("action `{action}` not executable: precondition {condition} does not hold")]
    NotExecutable { action: String, condition: String },
    #[error("variable `{0}` assigned more than once by action `{1}`")]
    DuplicateAssignment(String, String),
    #[error("unknown action name `{0}` in plan")]
    UnknownAction(String),
    #[error("malformed plan line {line}: {reason}")]
    MalformedPlanLine { line: usize, reason: String },
}

/// Linear expression `sum k_w * w + k` over numeric variables.
///
/// Kept canonical: zero coefficients are never stored, so structural
/// equality coincides with expression equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearExpr {
    coeffs: BTreeMap<NumVarId, Rational>,
    constant: Rational,
}

impl LinearExpr {
    pub fn constant(k: Rational) -> Self {
        LinearExpr { coeffs: BTreeMap::new(), constant: k }
    }

    pub fn var(v: NumVarId) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, Rational::one());
        LinearExpr { coeffs, constant: Rational::zero() }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn coeff(&self, v: NumVarId) -> Rational {
        self.coeffs.get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    /// Iterates `(variable, coefficient)` pairs in variable-id order.
    pub fn terms(&self) -> impl Iterator<Item = (NumVarId, &Rational)> {
        self.coeffs.iter().map(|(v, k)| (*v, k))
    }

    pub fn vars(&self) -> impl Iterator<Item = NumVarId> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn mentions(&self, v: NumVarId) -> bool {
        self.coeffs.contains_key(&v)
    }

    pub fn add_term(&mut self, v: NumVarId, k: Rational) {
        let entry = self.coeffs.entry(v).or_insert_with(Rational::zero);
        *entry += k;
        if entry.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn add_constant(&mut self, k: Rational) {
        self.constant += k;
    }

    pub fn add(&self, other: &LinearExpr) -> LinearExpr {
        let mut out = self.clone();
        for (v, k) in other.terms() {
            out.add_term(v, k.clone());
        }
        out.add_constant(other.constant.clone());
        out
    }

    pub fn sub(&self, other: &LinearExpr) -> LinearExpr {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> LinearExpr {
        if k.is_zero() {
            return LinearExpr::default();
        }
        LinearExpr {
            coeffs: self.coeffs.iter().map(|(v, c)| (*v, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn negate(&self) -> LinearExpr {
        self.scale(&-Rational::one())
    }

    /// Substitutes `v` by `repl` everywhere it occurs.
    pub fn substitute(&self, v: NumVarId, repl: &LinearExpr) -> LinearExpr {
        match self.coeffs.get(&v) {
            None => self.clone(),
            Some(k) => {
                let mut out = self.clone();
                out.coeffs.remove(&v);
                let scaled = repl.scale(k);
                for (w, c) in scaled.terms() {
                    out.add_term(w, c.clone());
                }
                out.add_constant(scaled.constant.clone());
                out
            }
        }
    }
}

/// Comparison of a linear expression against zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    /// `expr >= 0`
    Ge,
    /// `expr > 0`
    Gt,
    /// `expr = 0`
    Eq,
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmpOp::Ge => write!(f, ">="),
            CmpOp::Gt => write!(f, ">"),
            CmpOp::Eq => write!(f, "="),
        }
    }
}

/// A propositional or numeric condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    /// `v = true` or `v = false`.
    Bool(BoolVarId, bool),
    /// `expr op 0`.
    Num(LinearExpr, CmpOp),
}

impl Condition {
    /// `expr >= 0`.
    pub fn ge(expr: LinearExpr) -> Self {
        Condition::Num(expr, CmpOp::Ge)
    }

    /// `expr > 0`.
    pub fn gt(expr: LinearExpr) -> Self {
        Condition::Num(expr, CmpOp::Gt)
    }

    /// `expr = 0`.
    pub fn eq0(expr: LinearExpr) -> Self {
        Condition::Num(expr, CmpOp::Eq)
    }

    /// `expr <= 0`, normalized to `-expr >= 0`.
    pub fn le(expr: LinearExpr) -> Self {
        Condition::Num(expr.negate(), CmpOp::Ge)
    }

    /// `expr < 0`, normalized to `-expr > 0`.
    pub fn lt(expr: LinearExpr) -> Self {
        Condition::Num(expr.negate(), CmpOp::Gt)
    }
}

/// A single effect: one variable assigned one new value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Effect {
    /// `v := true` or `v := false`.
    Bool(BoolVarId, bool),
    /// `w := expr`.
    Num(NumVarId, LinearExpr),
}

impl Effect {
    /// `v += delta`, normalized to `v := v + delta`.
    pub fn increase(v: NumVarId, delta: LinearExpr) -> Self {
        Effect::Num(v, LinearExpr::var(v).add(&delta))
    }

    /// `v -= delta`, normalized to `v := v - delta`.
    pub fn decrease(v: NumVarId, delta: LinearExpr) -> Self {
        Effect::Num(v, LinearExpr::var(v).sub(&delta))
    }
}

/// A ground action: preconditions plus simultaneous effects.
///
/// Each variable is assigned by at most one effect; [`Action::new`]
/// rejects duplicates so "the variable assigned by the action" is
/// always well defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub pre: Vec<Condition>,
    pub eff: Vec<Effect>,
}

impl Action {
    pub fn new(name: impl Into<String>, pre: Vec<Condition>, eff: Vec<Effect>) -> Result<Self, ModelError> {
        let name = name.into();
        let mut bools = std::collections::BTreeSet::new();
        let mut nums = std::collections::BTreeSet::new();
        for e in &eff {
            let fresh = match e {
                Effect::Bool(v, _) => bools.insert(*v),
                Effect::Num(v, _) => nums.insert(*v),
            };
            if !fresh {
                let var = match e {
                    Effect::Bool(v, _) => format!("b{}", v.0),
                    Effect::Num(v, _) => format!("n{}", v.0),
                };
                return Err(ModelError::DuplicateAssignment(var, name));
            }
        }
        Ok(Action { name, pre, eff })
    }

    /// True iff the action assigns numeric variable `v`.
    pub fn assigns_num(&self, v: NumVarId) -> bool {
        self.eff.iter().any(|e| matches!(e, Effect::Num(w, _) if *w == v))
    }

    /// True iff the action assigns Boolean variable `v`.
    pub fn assigns_bool(&self, v: BoolVarId) -> bool {
        self.eff.iter().any(|e| matches!(e, Effect::Bool(w, _) if *w == v))
    }

    pub fn num_effect(&self, v: NumVarId) -> Option<&LinearExpr> {
        self.eff.iter().find_map(|e| match e {
            Effect::Num(w, rhs) if *w == v => Some(rhs),
            _ => None,
        })
    }
}

/// Propositional combination of conditions (goal formula tree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Cond(Condition),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
}

impl Formula {
    pub fn cond(c: Condition) -> Self {
        Formula::Cond(c)
    }
}

/// Total assignment to all declared variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub bool_vals: Vec<bool>,
    pub num_vals: Vec<Rational>,
}

impl State {
    pub fn bool_val(&self, v: BoolVarId) -> Result<bool, ModelError> {
        self.bool_vals.get(v.0 as usize).copied().ok_or(ModelError::UnknownBoolVar(v.0))
    }

    pub fn num_val(&self, v: NumVarId) -> Result<&Rational, ModelError> {
        self.num_vals.get(v.0 as usize).ok_or(ModelError::UnknownNumVar(v.0))
    }
}

/// A plan: action occurrences with positive repetition counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Plan {
    pub steps: Vec<(ActionId, u64)>,
}

impl Plan {
    /// Expands repetition counts into the flat action sequence.
    pub fn flatten(&self) -> impl Iterator<Item = ActionId> + '_ {
        self.steps.iter().flat_map(|(a, k)| std::iter::repeat(*a).take(*k as usize))
    }

    pub fn len_flat(&self) -> u64 {
        self.steps.iter().map(|(_, k)| k).sum()
    }
}

/// A ground numeric planning problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub bool_names: Vec<String>,
    pub num_names: Vec<String>,
    pub actions: Vec<Action>,
    pub init: State,
    /// Conjunction of goal formulas.
    pub goals: Vec<Formula>,
}

impl Problem {
    pub fn bool_vars(&self) -> impl Iterator<Item = BoolVarId> {
        (0..self.bool_names.len() as u32).map(BoolVarId)
    }

    pub fn num_vars(&self) -> impl Iterator<Item = NumVarId> {
        (0..self.num_names.len() as u32).map(NumVarId)
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn action(&self, id: ActionId) -> &Action {
        &self.actions[id.0 as usize]
    }

    pub fn bool_name(&self, v: BoolVarId) -> &str {
        &self.bool_names[v.0 as usize]
    }

    pub fn num_name(&self, v: NumVarId) -> &str {
        &self.num_names[v.0 as usize]
    }

    pub fn action_by_name(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a.name == name).map(|i| ActionId(i as u32))
    }

    pub fn render_expr(&self, e: &LinearExpr) -> String {
        let mut out = String::new();
        for (v, k) in e.terms() {
            let name = self.num_name(v);
            if out.is_empty() {
                if k.is_one() {
                    out.push_str(name);
                } else if (-k.clone()).is_one() {
                    out.push_str(&format!("-{name}"));
                } else {
                    out.push_str(&format!("{k}*{name}"));
                }
            } else if k.is_positive() {
                if k.is_one() {
                    out.push_str(&format!(" + {name}"));
                } else {
                    out.push_str(&format!(" + {k}*{name}"));
                }
            } else {
                let nk = -k.clone();
                if nk.is_one() {
                    out.push_str(&format!(" - {name}"));
                } else {
                    out.push_str(&format!(" - {nk}*{name}"));
                }
            }
        }
        let k = e.constant_part();
        if out.is_empty() {
            out = format!("{k}");
        } else if k.is_positive() {
            out.push_str(&format!(" + {k}"));
        } else if k.is_negative() {
            out.push_str(&format!(" - {}", -k.clone()));
        }
        out
    }

    pub fn render_condition(&self, c: &Condition) -> String {
        match c {
            Condition::Bool(v, t) => format!("{} = {}", self.bool_name(*v), t),
            Condition::Num(e, op) => format!("{} {} 0", self.render_expr(e), op),
        }
    }

    fn render_formula(&self, f: &Formula) -> String {
        match f {
            Formula::Cond(c) => self.render_condition(c),
            Formula::And(fs) => {
                let parts: Vec<_> = fs.iter().map(|g| self.render_formula(g)).collect();
                format!("(and {})", parts.join(" "))
            }
            Formula::Or(fs) => {
                let parts: Vec<_> = fs.iter().map(|g| self.render_formula(g)).collect();
                format!("(or {})", parts.join(" "))
            }
            Formula::Not(g) => format!("(not {})", self.render_formula(g)),
        }
    }
}

/// Evaluates a linear expression in a state. Exact rational arithmetic.
pub fn eval_expr(s: &State, e: &LinearExpr) -> Result<Rational, ModelError> {
    let mut acc = e.constant_part().clone();
    for (v, k) in e.terms() {
        acc += k * s.num_val(v)?;
    }
    Ok(acc)
}

/// Truth of a single condition in a state.
pub fn holds(s: &State, c: &Condition) -> Result<bool, ModelError> {
    match c {
        Condition::Bool(v, t) => Ok(s.bool_val(*v)? == *t),
        Condition::Num(e, op) => {
            let val = eval_expr(s, e)?;
            Ok(match op {
                CmpOp::Ge => !val.is_negative(),
                CmpOp::Gt => val.is_positive(),
                CmpOp::Eq => val.is_zero(),
            })
        }
    }
}

/// Truth of a goal formula tree in a state.
pub fn holds_formula(s: &State, f: &Formula) -> Result<bool, ModelError> {
    match f {
        Formula::Cond(c) => holds(s, c),
        Formula::And(fs) => {
            for g in fs {
                if !holds_formula(s, g)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(fs) => {
            for g in fs {
                if holds_formula(s, g)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Not(g) => Ok(!holds_formula(s, g)?),
    }
}

/// True iff all preconditions of `a` hold in `s`.
pub fn executable(s: &State, a: &Action) -> Result<bool, ModelError> {
    for c in &a.pre {
        if !holds(s, c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Executes `a` in `s`.
///
/// All effect right-hand sides are evaluated in the incoming state, so
/// simultaneous effects like `x := y, y := x` swap values. Fails with
/// [`ModelError::NotExecutable`] if a precondition does not hold.
pub fn apply(p: &Problem, s: &State, a: &Action) -> Result<State, ModelError> {
    for c in &a.pre {
        if !holds(s, c)? {
            return Err(ModelError::NotExecutable {
                action: a.name.clone(),
                condition: p.render_condition(c),
            });
        }
    }
    let mut next = s.clone();
    for e in &a.eff {
        match e {
            Effect::Bool(v, t) => {
                s.bool_val(*v)?;
                next.bool_vals[v.0 as usize] = *t;
            }
            Effect::Num(v, rhs) => {
                let val = eval_expr(s, rhs)?;
                next.num_vals[v.0 as usize] = val;
            }
        }
    }
    Ok(next)
}

/// Outcome of replaying a plan from the initial state.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    /// Index into the flat action sequence of the first failing action,
    /// if a precondition failed.
    pub failing_step: Option<usize>,
    /// Human-readable failing precondition or goal formula.
    pub failing_condition: Option<String>,
    /// Variable name -> value; rationals rendered exactly as `p/q` strings.
    pub final_state: BTreeMap<String, serde_json::Value>,
}

fn state_to_json(p: &Problem, s: &State) -> BTreeMap<String, serde_json::Value> {
    let mut out = BTreeMap::new();
    for v in p.bool_vars() {
        out.insert(p.bool_name(v).to_string(), serde_json::Value::Bool(s.bool_vals[v.0 as usize]));
    }
    for v in p.num_vars() {
        out.insert(
            p.num_name(v).to_string(),
            serde_json::Value::String(s.num_vals[v.0 as usize].to_string()),
        );
    }
    out
}

/// Replays `plan` from the initial state and checks the goals.
///
/// Failures are report outcomes, not errors: the report points at the
/// first failing step or unmet goal and always carries the last state
/// reached.
pub fn validate_plan(p: &Problem, plan: &Plan) -> ValidationReport {
    let mut s = p.init.clone();
    for (idx, aid) in plan.flatten().enumerate() {
        let a = p.action(aid);
        match apply(p, &s, a) {
            Ok(next) => s = next,
            Err(ModelError::NotExecutable { action, condition }) => {
                return ValidationReport {
                    valid: false,
                    failing_step: Some(idx),
                    failing_condition: Some(format!("{action}: {condition}")),
                    final_state: state_to_json(p, &s),
                };
            }
            Err(e) => {
                return ValidationReport {
                    valid: false,
                    failing_step: Some(idx),
                    failing_condition: Some(e.to_string()),
                    final_state: state_to_json(p, &s),
                };
            }
        }
    }
    for g in &p.goals {
        match holds_formula(&s, g) {
            Ok(true) => {}
            Ok(false) => {
                return ValidationReport {
                    valid: false,
                    failing_step: None,
                    failing_condition: Some(format!("goal {}", p.render_formula(g))),
                    final_state: state_to_json(p, &s),
                };
            }
            Err(e) => {
                return ValidationReport {
                    valid: false,
                    failing_step: None,
                    failing_condition: Some(e.to_string()),
                    final_state: state_to_json(p, &s),
                };
            }
        }
    }
    ValidationReport {
        valid: true,
        failing_step: None,
        failing_condition: None,
        final_state: state_to_json(p, &s),
    }
}

/// Renders a plan in the one-step-per-line text format `<count> <name>`.
pub fn format_plan(p: &Problem, plan: &Plan) -> String {
    let mut out = String::new();
    for (a, k) in &plan.steps {
        out.push_str(&format!("{} {}\n", k, p.action(*a).name));
    }
    out
}

/// Parses the `<count> <name>` plan text format.
pub fn parse_plan(p: &Problem, text: &str) -> Result<Plan, ModelError> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let count: u64 = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| ModelError::MalformedPlanLine { line: i + 1, reason: "expected `<count> <action>`".into() })?;
        let name = parts.next().ok_or_else(|| ModelError::MalformedPlanLine {
            line: i + 1,
            reason: "missing action name".into(),
        })?;
        if parts.next().is_some() {
            return Err(ModelError::MalformedPlanLine { line: i + 1, reason: "trailing tokens".into() });
        }
        if count == 0 {
            return Err(ModelError::MalformedPlanLine { line: i + 1, reason: "count must be >= 1".into() });
        }
        let id = p.action_by_name(name).ok_or_else(|| ModelError::UnknownAction(name.to_string()))?;
        steps.push((id, count));
    }
    Ok(Plan { steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    fn two_robots() -> Problem {
        crate::generate::two_robots_problem(1, 1).unwrap()
    }

    #[test]
    fn eval_identity_and_shift() {
        let p = two_robots();
        let q = p.num_vars().find(|v| p.num_name(*v) == "q").unwrap();
        let s = &p.init;
        assert_eq!(eval_expr(s, &LinearExpr::var(q)).unwrap(), rat(1));

        let xl = p.num_vars().find(|v| p.num_name(*v) == "x_l").unwrap();
        let mut e = LinearExpr::var(xl);
        e.add_constant(rat(3));
        // x_l starts at -X_I = -1, so x_l + 3 = 2 here; with x_l = -2 it is 1
        let mut s2 = s.clone();
        s2.num_vals[xl.0 as usize] = rat(-2);
        assert_eq!(eval_expr(&s2, &e).unwrap(), rat(1));
    }

    #[test]
    fn eval_exch_guard() {
        let p = two_robots();
        let ql = p.num_vars().find(|v| p.num_name(*v) == "q_l").unwrap();
        let q = p.num_vars().find(|v| p.num_name(*v) == "q").unwrap();
        let mut s = p.init.clone();
        s.num_vals[ql.0 as usize] = rat(3);
        let e = LinearExpr::var(ql).sub(&LinearExpr::var(q));
        assert_eq!(eval_expr(&s, &e).unwrap(), rat(2));
    }

    #[test]
    fn holds_cases() {
        let p = two_robots();
        let pv = BoolVarId(0);
        assert!(holds(&p.init, &Condition::Bool(pv, false)).unwrap());

        let xr = p.num_vars().find(|v| p.num_name(*v) == "x_r").unwrap();
        assert!(holds(&p.init, &Condition::gt(LinearExpr::var(xr))).unwrap());

        let ql = p.num_vars().find(|v| p.num_name(*v) == "q_l").unwrap();
        let q = p.num_vars().find(|v| p.num_name(*v) == "q").unwrap();
        let mut s = p.init.clone();
        s.num_vals[ql.0 as usize] = rat(0);
        let cond = Condition::ge(LinearExpr::var(ql).sub(&LinearExpr::var(q)));
        assert!(!holds(&s, &cond).unwrap());
    }

    #[test]
    fn apply_rgt_l() {
        let p = two_robots();
        let a = p.action_by_name("rgt_l").unwrap();
        let next = apply(&p, &p.init, p.action(a)).unwrap();
        let xl = p.num_vars().find(|v| p.num_name(*v) == "x_l").unwrap();
        assert_eq!(next.num_vals[xl.0 as usize], rat(0));
        // everything else untouched
        for v in p.num_vars().filter(|v| *v != xl) {
            assert_eq!(next.num_vals[v.0 as usize], p.init.num_vals[v.0 as usize]);
        }
        assert_eq!(next.bool_vals, p.init.bool_vals);
    }

    #[test]
    fn apply_conn_at_origin() {
        let p = two_robots();
        let xl = p.num_vars().find(|v| p.num_name(*v) == "x_l").unwrap();
        let xr = p.num_vars().find(|v| p.num_name(*v) == "x_r").unwrap();
        let mut s = p.init.clone();
        s.num_vals[xl.0 as usize] = rat(0);
        s.num_vals[xr.0 as usize] = rat(0);
        let conn = p.action_by_name("conn").unwrap();
        let next = apply(&p, &s, p.action(conn)).unwrap();
        assert!(next.bool_vals[0]);
    }

    #[test]
    fn apply_no_effects_is_identity() {
        let p = two_robots();
        let noop = Action::new("noop", vec![], vec![]).unwrap();
        let next = apply(&p, &p.init, &noop).unwrap();
        assert_eq!(next, p.init);
    }

    #[test]
    fn apply_simultaneous_swap() {
        let mut p = two_robots();
        let x = NumVarId(0);
        let y = NumVarId(1);
        let swap = Action::new(
            "swap",
            vec![],
            vec![Effect::Num(x, LinearExpr::var(y)), Effect::Num(y, LinearExpr::var(x))],
        )
        .unwrap();
        p.actions.push(swap.clone());
        let before = p.init.clone();
        let next = apply(&p, &before, &swap).unwrap();
        assert_eq!(next.num_vals[0], before.num_vals[1]);
        assert_eq!(next.num_vals[1], before.num_vals[0]);
    }

    #[test]
    fn duplicate_assignment_rejected() {
        let v = NumVarId(0);
        let res = Action::new(
            "bad",
            vec![],
            vec![Effect::Num(v, LinearExpr::constant(rat(1))), Effect::Num(v, LinearExpr::constant(rat(2)))],
        );
        assert!(res.is_err());
    }

    #[test]
    fn validate_shortest_plan() {
        let p = two_robots();
        let text = "1 rgt_l\n1 lft_r\n1 conn\n1 exch\n1 disc\n1 lft_l\n1 rgt_r\n";
        let plan = parse_plan(&p, text).unwrap();
        let report = validate_plan(&p, &plan);
        assert!(report.valid, "{report:?}");
    }

    #[test]
    fn validate_empty_plan_on_satisfied_goal() {
        let mut p = two_robots();
        p.goals = vec![Formula::cond(Condition::Bool(BoolVarId(0), false))];
        let report = validate_plan(&p, &Plan::default());
        assert!(report.valid);
    }

    #[test]
    fn validate_conn_alone_fails_at_step_zero() {
        let p = two_robots();
        let plan = parse_plan(&p, "1 conn\n").unwrap();
        let report = validate_plan(&p, &plan);
        assert!(!report.valid);
        assert_eq!(report.failing_step, Some(0));
        let cond = report.failing_condition.unwrap();
        assert!(cond.contains("conn"), "{cond}");
    }

    #[test]
    fn exact_thirds() {
        let third = Rational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(&third + &third + &third, rat(1));
    }

    #[test]
    fn plan_text_round_trip() {
        let p = two_robots();
        let plan = parse_plan(&p, "3 exch\n1 disc\n").unwrap();
        let text = format_plan(&p, &plan);
        assert_eq!(parse_plan(&p, &text).unwrap(), plan);
    }

    #[test]
    fn linear_expr_canonical() {
        let v = NumVarId(0);
        let mut e = LinearExpr::var(v);
        e.add_term(v, rat(-1));
        assert!(e.is_constant());
        assert!(!e.mentions(v));
    }
}
