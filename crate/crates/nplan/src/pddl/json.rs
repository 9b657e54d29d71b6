//! Native `*.nplan.json` problem format.
//!
//! Mirrors [`Problem`] one-to-one using variable names instead of ids,
//! so test generators can build ground problems without going through
//! PDDL. Rationals are strings (`"3"`, `"-1/2"`); see
//! `docs/problem-json.md` for the schema.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::PddlError;
use crate::model::{
    Action, BoolVarId, CmpOp, Condition, Effect, Formula, LinearExpr, NumVarId, Problem, Rational, State,
};

#[derive(Debug, Serialize, Deserialize)]
struct ProblemJson {
    bool_vars: Vec<String>,
    num_vars: Vec<String>,
    actions: Vec<ActionJson>,
    init: BTreeMap<String, serde_json::Value>,
    goals: Vec<FormulaJson>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ActionJson {
    name: String,
    pre: Vec<CondJson>,
    eff: Vec<EffJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CondJson {
    Bool { var: String, value: bool },
    Num { expr: ExprJson, op: String },
}

#[derive(Debug, Serialize, Deserialize)]
struct ExprJson {
    #[serde(default)]
    coeffs: BTreeMap<String, String>,
    #[serde(default = "zero_string")]
    constant: String,
}

fn zero_string() -> String {
    "0".to_string()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum EffJson {
    Bool { var: String, value: bool },
    Num { var: String, expr: ExprJson },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum FormulaJson {
    Cond(CondJson),
    And(Vec<FormulaJson>),
    Or(Vec<FormulaJson>),
    Not(Box<FormulaJson>),
}

fn parse_rational(s: &str) -> Result<Rational, PddlError> {
    BigRational::from_str(s).map_err(|e| PddlError::Json(format!("bad rational `{s}`: {e}")))
}

fn rational_from_value(v: &serde_json::Value) -> Result<Rational, PddlError> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i.into()))
            } else {
                Err(PddlError::Json(format!("non-integer JSON number `{n}`; use a string rational")))
            }
        }
        other => Err(PddlError::Json(format!("expected a rational, got {other}"))),
    }
}

struct Interner<'a> {
    bools: BTreeMap<&'a str, BoolVarId>,
    nums: BTreeMap<&'a str, NumVarId>,
}

impl<'a> Interner<'a> {
    fn bool_id(&self, name: &str) -> Result<BoolVarId, PddlError> {
        self.bools.get(name).copied().ok_or_else(|| PddlError::Json(format!("undeclared Boolean variable `{name}`")))
    }

    fn num_id(&self, name: &str) -> Result<NumVarId, PddlError> {
        self.nums.get(name).copied().ok_or_else(|| PddlError::Json(format!("undeclared numeric variable `{name}`")))
    }

    fn expr(&self, e: &ExprJson) -> Result<LinearExpr, PddlError> {
        let mut out = LinearExpr::constant(parse_rational(&e.constant)?);
        for (name, k) in &e.coeffs {
            out.add_term(self.num_id(name)?, parse_rational(k)?);
        }
        Ok(out)
    }

    fn cond(&self, c: &CondJson) -> Result<Condition, PddlError> {
        match c {
            CondJson::Bool { var, value } => Ok(Condition::Bool(self.bool_id(var)?, *value)),
            CondJson::Num { expr, op } => {
                let e = self.expr(expr)?;
                match op.as_str() {
                    ">=" => Ok(Condition::ge(e)),
                    ">" => Ok(Condition::gt(e)),
                    "=" => Ok(Condition::eq0(e)),
                    "<=" => Ok(Condition::le(e)),
                    "<" => Ok(Condition::lt(e)),
                    other => Err(PddlError::Json(format!("bad comparison op `{other}`"))),
                }
            }
        }
    }

    fn formula(&self, f: &FormulaJson) -> Result<Formula, PddlError> {
        match f {
            FormulaJson::Cond(c) => Ok(Formula::Cond(self.cond(c)?)),
            FormulaJson::And(fs) => Ok(Formula::And(fs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?)),
            FormulaJson::Or(fs) => Ok(Formula::Or(fs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?)),
            FormulaJson::Not(g) => Ok(Formula::Not(Box::new(self.formula(g)?))),
        }
    }
}

/// Deserializes a problem from the native JSON format.
pub fn problem_from_json(text: &str) -> Result<Problem, PddlError> {
    let pj: ProblemJson = serde_json::from_str(text).map_err(|e| PddlError::Json(e.to_string()))?;
    let interner = Interner {
        bools: pj.bool_vars.iter().enumerate().map(|(i, n)| (n.as_str(), BoolVarId(i as u32))).collect(),
        nums: pj.num_vars.iter().enumerate().map(|(i, n)| (n.as_str(), NumVarId(i as u32))).collect(),
    };
    if interner.bools.len() != pj.bool_vars.len() || interner.nums.len() != pj.num_vars.len() {
        return Err(PddlError::Json("duplicate variable names".into()));
    }

    let mut actions = Vec::new();
    for a in &pj.actions {
        let pre = a.pre.iter().map(|c| interner.cond(c)).collect::<Result<Vec<_>, _>>()?;
        let eff = a
            .eff
            .iter()
            .map(|e| match e {
                EffJson::Bool { var, value } => Ok(Effect::Bool(interner.bool_id(var)?, *value)),
                EffJson::Num { var, expr } => Ok(Effect::Num(interner.num_id(var)?, interner.expr(expr)?)),
            })
            .collect::<Result<Vec<_>, PddlError>>()?;
        actions.push(Action::new(a.name.clone(), pre, eff)?);
    }

    let mut bool_vals = vec![false; pj.bool_vars.len()];
    let mut num_vals = vec![Rational::from_integer(0.into()); pj.num_vars.len()];
    let mut seen_nums = vec![false; pj.num_vars.len()];
    for (name, value) in &pj.init {
        if let Ok(v) = interner.bool_id(name) {
            match value {
                serde_json::Value::Bool(b) => bool_vals[v.0 as usize] = *b,
                other => return Err(PddlError::Json(format!("Boolean init for `{name}` must be a bool, got {other}"))),
            }
        } else {
            let v = interner.num_id(name)?;
            num_vals[v.0 as usize] = rational_from_value(value)?;
            seen_nums[v.0 as usize] = true;
        }
    }
    for (i, seen) in seen_nums.iter().enumerate() {
        if !seen {
            return Err(PddlError::MissingInit(pj.num_vars[i].clone()));
        }
    }

    let goals = pj.goals.iter().map(|g| interner.formula(g)).collect::<Result<Vec<_>, _>>()?;
    Ok(Problem {
        bool_names: pj.bool_vars,
        num_names: pj.num_vars,
        actions,
        init: State { bool_vals, num_vals },
        goals,
    })
}

/// Serializes a problem into the native JSON format.
pub fn problem_to_json(p: &Problem) -> String {
    let expr_json = |e: &LinearExpr| ExprJson {
        coeffs: e.terms().map(|(v, k)| (p.num_name(v).to_string(), k.to_string())).collect(),
        constant: e.constant_part().to_string(),
    };
    let cond_json = |c: &Condition| match c {
        Condition::Bool(v, t) => CondJson::Bool { var: p.bool_name(*v).to_string(), value: *t },
        Condition::Num(e, op) => CondJson::Num {
            expr: expr_json(e),
            op: match op {
                CmpOp::Ge => ">=",
                CmpOp::Gt => ">",
                CmpOp::Eq => "=",
            }
            .to_string(),
        },
    };
    fn formula_json(
        f: &Formula,
        cond_json: &dyn Fn(&Condition) -> CondJson,
    ) -> FormulaJson {
        match f {
            Formula::Cond(c) => FormulaJson::Cond(cond_json(c)),
            Formula::And(fs) => FormulaJson::And(fs.iter().map(|g| formula_json(g, cond_json)).collect()),
            Formula::Or(fs) => FormulaJson::Or(fs.iter().map(|g| formula_json(g, cond_json)).collect()),
            Formula::Not(g) => FormulaJson::Not(Box::new(formula_json(g, cond_json))),
        }
    }

    let mut init = BTreeMap::new();
    for v in p.bool_vars() {
        init.insert(p.bool_name(v).to_string(), serde_json::Value::Bool(p.init.bool_vals[v.0 as usize]));
    }
    for v in p.num_vars() {
        init.insert(p.num_name(v).to_string(), serde_json::Value::String(p.init.num_vals[v.0 as usize].to_string()));
    }

    let pj = ProblemJson {
        bool_vars: p.bool_names.clone(),
        num_vars: p.num_names.clone(),
        actions: p
            .actions
            .iter()
            .map(|a| ActionJson {
                name: a.name.clone(),
                pre: a.pre.iter().map(cond_json).collect(),
                eff: a
                    .eff
                    .iter()
                    .map(|e| match e {
                        Effect::Bool(v, t) => EffJson::Bool { var: p.bool_name(*v).to_string(), value: *t },
                        Effect::Num(v, rhs) => {
                            EffJson::Num { var: p.num_name(*v).to_string(), expr: expr_json(rhs) }
                        }
                    })
                    .collect(),
            })
            .collect(),
        init,
        goals: p.goals.iter().map(|g| formula_json(g, &cond_json)).collect(),
    };
    serde_json::to_string_pretty(&pj).expect("problem JSON serialization cannot fail")
}
