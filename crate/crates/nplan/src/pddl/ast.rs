//! Lifted (schematic) PDDL representation, prior to grounding.

use std::fmt;

use crate::model::Rational;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDef {
    pub name: String,
    /// `None` means the implicit root type `object`.
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    /// Includes the leading `?`.
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDef {
    pub name: String,
    pub params: Vec<Param>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDef {
    pub name: String,
    pub params: Vec<Param>,
}

/// Numeric term over schema parameters and constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftedExpr {
    Const(Rational),
    /// `(f a1 .. ak)`; args are parameter or object names.
    Fluent { name: String, args: Vec<String> },
    Add(Box<LiftedExpr>, Box<LiftedExpr>),
    Sub(Box<LiftedExpr>, Box<LiftedExpr>),
    Neg(Box<LiftedExpr>),
    Mul(Box<LiftedExpr>, Box<LiftedExpr>),
    Div(Box<LiftedExpr>, Box<LiftedExpr>),
}

/// Comparison operators as written in the source, before normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawCmp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl RawCmp {
    pub fn symbol(self) -> &'static str {
        match self {
            RawCmp::Lt => "<",
            RawCmp::Le => "<=",
            RawCmp::Gt => ">",
            RawCmp::Ge => ">=",
            RawCmp::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftedCond {
    /// `(pred args)` or `(not (pred args))`.
    Pred { name: String, args: Vec<String>, negated: bool },
    /// `(= ?x ?y)` or `(not (= ?x ?y))` between objects/parameters.
    ObjEq { a: String, b: String, negated: bool },
    /// `lhs op rhs` over numeric terms.
    NumCmp { op: RawCmp, lhs: LiftedExpr, rhs: LiftedExpr },
}

/// Goal tree; action preconditions are restricted to conjunctions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftedGoal {
    Cond(LiftedCond),
    And(Vec<LiftedGoal>),
    Or(Vec<LiftedGoal>),
    Not(Box<LiftedGoal>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Assign,
    Increase,
    Decrease,
}

impl AssignOp {
    pub fn keyword(self) -> &'static str {
        match self {
            AssignOp::Assign => "assign",
            AssignOp::Increase => "increase",
            AssignOp::Decrease => "decrease",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftedEffect {
    Add { name: String, args: Vec<String> },
    Del { name: String, args: Vec<String> },
    NumAssign { op: AssignOp, name: String, args: Vec<String>, expr: LiftedExpr },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<Param>,
    pub pre: Vec<LiftedCond>,
    pub eff: Vec<LiftedEffect>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedDomain {
    pub name: String,
    pub requirements: Vec<String>,
    pub types: Vec<TypeDef>,
    pub predicates: Vec<PredicateDef>,
    pub functions: Vec<FunctionDef>,
    pub actions: Vec<ActionSchema>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedProblem {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<(String, String)>,
    pub init_preds: Vec<(String, Vec<String>)>,
    pub init_fluents: Vec<(String, Vec<String>, Rational)>,
    pub goal: LiftedGoal,
}

/// Renders a rational the way PDDL can read it back: integer, finite
/// decimal, or `(/ p q)` as a last resort.
pub fn render_number(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    // finite decimal iff the reduced denominator is 2^a * 5^b
    let mut d = r.denom().clone();
    let two = num_bigint::BigInt::from(2);
    let five = num_bigint::BigInt::from(5);
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if d == num_bigint::BigInt::from(1) {
        let k = twos.max(fives);
        if let Some(shift) = 10u64.checked_pow(k) {
            let scaled = r * Rational::from_integer(num_bigint::BigInt::from(shift));
            let n = scaled.numer();
            let neg = n.is_negative();
            let digits = n.abs().to_string();
            let digits = format!("{:0>width$}", digits, width = (k as usize) + 1);
            let split = digits.len() - k as usize;
            let sign = if neg { "-" } else { "" };
            return format!("{}{}.{}", sign, &digits[..split], &digits[split..]);
        }
    }
    format!("(/ {} {})", r.numer(), r.denom())
}

fn render_args(args: &[String]) -> String {
    if args.is_empty() {
        String::new()
    } else {
        format!(" {}", args.join(" "))
    }
}

fn render_typed_params(params: &[Param]) -> String {
    params.iter().map(|p| format!("{} - {}", p.name, p.ty)).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for LiftedExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftedExpr::Const(r) => write!(f, "{}", render_number(r)),
            LiftedExpr::Fluent { name, args } => write!(f, "({}{})", name, render_args(args)),
            LiftedExpr::Add(a, b) => write!(f, "(+ {a} {b})"),
            LiftedExpr::Sub(a, b) => write!(f, "(- {a} {b})"),
            LiftedExpr::Neg(a) => write!(f, "(- {a})"),
            LiftedExpr::Mul(a, b) => write!(f, "(* {a} {b})"),
            LiftedExpr::Div(a, b) => write!(f, "(/ {a} {b})"),
        }
    }
}

impl fmt::Display for LiftedCond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftedCond::Pred { name, args, negated } => {
                if *negated {
                    write!(f, "(not ({}{}))", name, render_args(args))
                } else {
                    write!(f, "({}{})", name, render_args(args))
                }
            }
            LiftedCond::ObjEq { a, b, negated } => {
                if *negated {
                    write!(f, "(not (= {a} {b}))")
                } else {
                    write!(f, "(= {a} {b})")
                }
            }
            LiftedCond::NumCmp { op, lhs, rhs } => write!(f, "({} {} {})", op.symbol(), lhs, rhs),
        }
    }
}

impl fmt::Display for LiftedGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftedGoal::Cond(c) => write!(f, "{c}"),
            LiftedGoal::And(gs) => {
                write!(f, "(and")?;
                for g in gs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            LiftedGoal::Or(gs) => {
                write!(f, "(or")?;
                for g in gs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            LiftedGoal::Not(g) => write!(f, "(not {g})"),
        }
    }
}

impl fmt::Display for LiftedEffect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftedEffect::Add { name, args } => write!(f, "({}{})", name, render_args(args)),
            LiftedEffect::Del { name, args } => write!(f, "(not ({}{}))", name, render_args(args)),
            LiftedEffect::NumAssign { op, name, args, expr } => {
                write!(f, "({} ({}{}) {})", op.keyword(), name, render_args(args), expr)
            }
        }
    }
}

impl fmt::Display for LiftedDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (domain {})", self.name)?;
        if !self.requirements.is_empty() {
            writeln!(f, "  (:requirements {})", self.requirements.join(" "))?;
        }
        if !self.types.is_empty() {
            let rendered: Vec<_> = self
                .types
                .iter()
                .map(|t| match &t.parent {
                    Some(p) => format!("{} - {}", t.name, p),
                    None => t.name.clone(),
                })
                .collect();
            writeln!(f, "  (:types {})", rendered.join(" "))?;
        }
        if !self.predicates.is_empty() {
            let rendered: Vec<_> = self
                .predicates
                .iter()
                .map(|p| {
                    if p.params.is_empty() {
                        format!("({})", p.name)
                    } else {
                        format!("({} {})", p.name, render_typed_params(&p.params))
                    }
                })
                .collect();
            writeln!(f, "  (:predicates {})", rendered.join(" "))?;
        }
        if !self.functions.is_empty() {
            let rendered: Vec<_> = self
                .functions
                .iter()
                .map(|p| {
                    if p.params.is_empty() {
                        format!("({})", p.name)
                    } else {
                        format!("({} {})", p.name, render_typed_params(&p.params))
                    }
                })
                .collect();
            writeln!(f, "  (:functions {})", rendered.join(" "))?;
        }
        for a in &self.actions {
            writeln!(f, "  (:action {}", a.name)?;
            writeln!(f, "    :parameters ({})", render_typed_params(&a.params))?;
            let pre: Vec<_> = a.pre.iter().map(|c| c.to_string()).collect();
            writeln!(f, "    :precondition (and {})", pre.join(" "))?;
            let eff: Vec<_> = a.eff.iter().map(|e| e.to_string()).collect();
            writeln!(f, "    :effect (and {}))", eff.join(" "))?;
        }
        writeln!(f, ")")
    }
}

impl fmt::Display for LiftedProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (problem {})", self.name)?;
        writeln!(f, "  (:domain {})", self.domain_name)?;
        if !self.objects.is_empty() {
            let rendered: Vec<_> = self.objects.iter().map(|(n, t)| format!("{n} - {t}")).collect();
            writeln!(f, "  (:objects {})", rendered.join(" "))?;
        }
        writeln!(f, "  (:init")?;
        for (name, args) in &self.init_preds {
            writeln!(f, "    ({}{})", name, render_args(args))?;
        }
        for (name, args, val) in &self.init_fluents {
            writeln!(f, "    (= ({}{}) {})", name, render_args(args), render_number(val))?;
        }
        writeln!(f, "  )")?;
        writeln!(f, "  (:goal {})", self.goal)?;
        writeln!(f, ")")
    }
}
