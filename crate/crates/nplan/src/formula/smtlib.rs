//! Deterministic SMT-LIB v2 printing.

use std::fmt::Write;

use num_traits::Signed;

use super::{CmpKind, Sort, Term, VarDecl};
use crate::model::Rational;

fn sort_name(s: Sort) -> &'static str {
    match s {
        Sort::Boolean => "Bool",
        Sort::Rational => "Real",
        Sort::NonNegInt => "Int",
    }
}

fn write_rational(out: &mut String, r: &Rational) {
    if r.is_negative() {
        out.push_str("(- ");
        write_rational(out, &-r.clone());
        out.push(')');
    } else if r.is_integer() {
        let _ = write!(out, "{}", r.numer());
    } else {
        let _ = write!(out, "(/ {} {})", r.numer(), r.denom());
    }
}

fn write_term(out: &mut String, t: &Term, decls: &[VarDecl]) {
    match t {
        Term::Var(v) => out.push_str(&decls[v.0].name),
        Term::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Term::Rat(r) => write_rational(out, r),
        Term::Add(ts) => write_nary(out, "+", ts, decls, "0"),
        Term::Sub(a, b) => write_binary(out, "-", a, b, decls),
        Term::Neg(a) => {
            out.push_str("(- ");
            write_term(out, a, decls);
            out.push(')');
        }
        Term::Mul(a, b) => write_binary(out, "*", a, b, decls),
        Term::Cmp(op, a, b) => {
            let sym = match op {
                CmpKind::Ge => ">=",
                CmpKind::Gt => ">",
                CmpKind::Eq => "=",
            };
            write_binary(out, sym, a, b, decls);
        }
        Term::Not(a) => {
            out.push_str("(not ");
            write_term(out, a, decls);
            out.push(')');
        }
        Term::And(ts) => write_nary(out, "and", ts, decls, "true"),
        Term::Or(ts) => write_nary(out, "or", ts, decls, "false"),
        Term::Implies(a, b) => write_binary(out, "=>", a, b, decls),
        Term::Iff(a, b) => write_binary(out, "=", a, b, decls),
        Term::Ite(c, a, b) => {
            out.push_str("(ite ");
            write_term(out, c, decls);
            out.push(' ');
            write_term(out, a, decls);
            out.push(' ');
            write_term(out, b, decls);
            out.push(')');
        }
    }
}

fn write_binary(out: &mut String, op: &str, a: &Term, b: &Term, decls: &[VarDecl]) {
    out.push('(');
    out.push_str(op);
    out.push(' ');
    write_term(out, a, decls);
    out.push(' ');
    write_term(out, b, decls);
    out.push(')');
}

fn write_nary(out: &mut String, op: &str, ts: &[Term], decls: &[VarDecl], empty: &str) {
    match ts.len() {
        0 => out.push_str(empty),
        1 => write_term(out, &ts[0], decls),
        _ => {
            out.push('(');
            out.push_str(op);
            for t in ts {
                out.push(' ');
                write_term(out, t, decls);
            }
            out.push(')');
        }
    }
}

/// Picks the weakest quantifier-free logic covering the declarations
/// and assertions: linear vs. nonlinear, pure-real vs. mixed.
pub fn infer_logic(decls: &[VarDecl], assertions: &[&Term]) -> &'static str {
    let has_int = decls.iter().any(|d| d.sort == Sort::NonNegInt);
    let nonlinear = assertions.iter().any(|t| t.has_nonlinear_product());
    match (nonlinear, has_int) {
        (false, false) => "QF_LRA",
        (false, true) => "QF_LIRA",
        (true, false) => "QF_NRA",
        (true, true) => "QF_NIRA",
    }
}

/// Prints a complete SMT-LIB v2 script: options, logic, declarations
/// (with `>= 0` side assertions for the nonnegative-integer sort), the
/// given assertions, `(check-sat)` and `(get-model)`.
///
/// Output is byte-identical for identical input.
pub fn print_smtlib(decls: &[VarDecl], assertions: &[&Term], logic: Option<&str>) -> String {
    let mut out = String::new();
    out.push_str("(set-option :produce-models true)\n");
    let logic = logic.map(str::to_string).unwrap_or_else(|| infer_logic(decls, assertions).to_string());
    let _ = writeln!(out, "(set-logic {logic})");
    for d in decls {
        let _ = writeln!(out, "(declare-fun {} () {})", d.name, sort_name(d.sort));
        if d.sort == Sort::NonNegInt {
            let _ = writeln!(out, "(assert (>= {} 0))", d.name);
        }
    }
    for a in assertions {
        out.push_str("(assert ");
        write_term(&mut out, a, decls);
        out.push_str(")\n");
    }
    out.push_str("(check-sat)\n(get-model)\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{VarOrigin, VarRef};
    use crate::model::{rat, BoolVarId, NumVarId};

    fn decls() -> Vec<VarDecl> {
        vec![
            VarDecl {
                name: "sn0_t0__x".into(),
                sort: Sort::Rational,
                origin: VarOrigin::StateNum { var: NumVarId(0), step: 0 },
            },
            VarDecl {
                name: "ao0_t0__a".into(),
                sort: Sort::NonNegInt,
                origin: VarOrigin::ActionOcc { occ: 0, step: 0 },
            },
            VarDecl {
                name: "sb0_t0__p".into(),
                sort: Sort::Boolean,
                origin: VarOrigin::StateBool { var: BoolVarId(0), step: 0 },
            },
        ]
    }

    #[test]
    fn prints_assertions_and_side_conditions() {
        let ds = decls();
        let t = Term::ge(Term::var(VarRef(0)), Term::int(0));
        let text = print_smtlib(&ds, &[&t], None);
        assert!(text.contains("(assert (>= sn0_t0__x 0))"));
        assert!(text.contains("(assert (>= ao0_t0__a 0))"));
        assert!(text.contains("(check-sat)"));
        assert!(text.contains("(get-model)"));
    }

    #[test]
    fn logic_inference() {
        let ds = decls();
        let linear = Term::ge(Term::var(VarRef(0)), Term::int(0));
        // product of the Int action variable and the Real state variable
        let nonlinear = Term::eq(
            Term::var(VarRef(0)),
            Term::mul(Term::var(VarRef(1)), Term::var(VarRef(0))),
        );
        assert_eq!(infer_logic(&ds, &[&linear]), "QF_LIRA");
        assert_eq!(infer_logic(&ds, &[&nonlinear]), "QF_NIRA");
        assert_eq!(infer_logic(&ds[..1], &[&linear]), "QF_LRA");
        let scalar = Term::eq(Term::var(VarRef(0)), Term::mul(Term::Rat(rat(2)), Term::var(VarRef(0))));
        assert_eq!(infer_logic(&ds[..1], &[&scalar]), "QF_LRA");
    }

    #[test]
    fn negative_and_fractional_literals() {
        let ds = decls();
        let t = Term::eq(Term::var(VarRef(0)), Term::Rat(crate::model::Rational::new((-1).into(), 2.into())));
        let text = print_smtlib(&ds, &[&t], None);
        assert!(text.contains("(- (/ 1 2))"), "{text}");
    }

    #[test]
    fn deterministic_output() {
        let ds = decls();
        let t = Term::and(vec![
            Term::ge(Term::var(VarRef(0)), Term::int(0)),
            Term::var(VarRef(2)),
        ]);
        assert_eq!(print_smtlib(&ds, &[&t], None), print_smtlib(&ds, &[&t], None));
    }
}
