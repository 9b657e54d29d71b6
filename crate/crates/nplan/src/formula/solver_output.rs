//! Parsing of `(check-sat)` / `(get-model)` solver responses.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::{FormulaError, Model, Sort, Value, VarDecl};
use crate::model::Rational;
use crate::sexp::{self, Sexp};

/// Outcome of one solver query.
#[derive(Debug, Clone)]
pub enum SolverVerdict {
    Sat(Model),
    Unsat,
    Unknown,
}

fn protocol(reason: impl Into<String>, raw: &str) -> FormulaError {
    FormulaError::SolverProtocol { reason: reason.into(), raw: raw.chars().take(2000).collect() }
}

/// Parses a numeric model value: numerals, decimals, `(- v)`, `(/ a b)`.
fn parse_value_num(s: &Sexp, raw: &str) -> Result<Rational, FormulaError> {
    match s {
        Sexp::Atom { text, .. } => {
            crate::pddl::parse_number(text).ok_or_else(|| protocol(format!("bad numeral `{text}`"), raw))
        }
        Sexp::List { items, .. } => {
            let head = items.first().and_then(|h| h.as_atom()).unwrap_or("");
            match (head, items.len()) {
                ("-", 2) => Ok(-parse_value_num(&items[1], raw)?),
                ("/", 3) => {
                    let a = parse_value_num(&items[1], raw)?;
                    let b = parse_value_num(&items[2], raw)?;
                    if b == Rational::from_integer(0.into()) {
                        Err(protocol("division by zero in model value", raw))
                    } else {
                        Ok(a / b)
                    }
                }
                ("+", 3) => Ok(parse_value_num(&items[1], raw)? + parse_value_num(&items[2], raw)?),
                ("*", 3) => Ok(parse_value_num(&items[1], raw)? * parse_value_num(&items[2], raw)?),
                _ => Err(protocol(format!("unrecognized model value form `{head}`"), raw)),
            }
        }
    }
}

fn parse_value(s: &Sexp, sort: Sort, name: &str, raw: &str) -> Result<Value, FormulaError> {
    match sort {
        Sort::Boolean => match s.as_atom() {
            Some("true") => Ok(Value::Bool(true)),
            Some("false") => Ok(Value::Bool(false)),
            _ => Err(protocol(format!("expected Boolean value for `{name}`"), raw)),
        },
        Sort::Rational => Ok(Value::Rat(parse_value_num(s, raw)?)),
        Sort::NonNegInt => {
            let r = parse_value_num(s, raw)?;
            if r.is_integer() {
                Ok(Value::Int(r.numer().clone()))
            } else {
                Err(protocol(format!("non-integral value for integer variable `{name}`"), raw))
            }
        }
    }
}

/// Collects `(define-fun name () Sort value)` entries from the model
/// s-expression, tolerating both `(model ...)` and bare-list shapes.
fn collect_define_funs<'a>(sexps: &'a [Sexp], out: &mut Vec<&'a [Sexp]>) {
    for s in sexps {
        if let Some(items) = s.as_list() {
            match s.head().as_deref() {
                Some("define-fun") => out.push(items),
                Some("model") => collect_define_funs(&items[1..], out),
                _ => collect_define_funs(items, out),
            }
        }
    }
}

/// Parses the full text a solver wrote in response to a script ending
/// in `(check-sat)` and `(get-model)`.
///
/// On `sat`, declared variables missing from the model default to
/// `false`/`0` and are recorded in [`Model::defaulted`].
pub fn parse_model(output: &str, decls: &[VarDecl]) -> Result<SolverVerdict, FormulaError> {
    let mut verdict: Option<&str> = None;
    let mut rest_at = 0usize;
    for line in output.lines() {
        let offset = line.as_ptr() as usize - output.as_ptr() as usize;
        match line.trim() {
            "" => continue,
            "sat" | "unsat" | "unknown" => {
                verdict = Some(line.trim());
                rest_at = offset + line.len();
                break;
            }
            other => {
                return Err(protocol(format!("unexpected solver output line `{other}`"), output));
            }
        }
    }
    match verdict {
        None => Err(protocol("no sat/unsat/unknown verdict", output)),
        Some("unsat") => Ok(SolverVerdict::Unsat),
        Some("unknown") => Ok(SolverVerdict::Unknown),
        Some(_) => {
            let rest = &output[rest_at..];
            let sexps = sexp::parse_all(rest).map_err(|e| protocol(format!("model not parseable: {e}"), output))?;
            let mut defs = Vec::new();
            collect_define_funs(&sexps, &mut defs);

            let by_name: BTreeMap<&str, &VarDecl> = decls.iter().map(|d| (d.name.as_str(), d)).collect();
            let mut values: BTreeMap<String, Value> = BTreeMap::new();
            for items in defs {
                // (define-fun name () Sort value)
                if items.len() != 5 {
                    continue;
                }
                let Some(name) = items[1].as_atom() else { continue };
                let Some(decl) = by_name.get(name) else { continue };
                let v = parse_value(&items[4], decl.sort, name, output)?;
                values.insert(name.to_string(), v);
            }
            let mut defaulted = Vec::new();
            for d in decls {
                if !values.contains_key(&d.name) {
                    defaulted.push(d.name.clone());
                    let v = match d.sort {
                        Sort::Boolean => Value::Bool(false),
                        Sort::Rational => Value::Rat(Rational::from_integer(0.into())),
                        Sort::NonNegInt => Value::Int(BigInt::from(0)),
                    };
                    values.insert(d.name.clone(), v);
                }
            }
            Ok(SolverVerdict::Sat(Model::new(values, defaulted)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::VarOrigin;
    use crate::model::{rat, NumVarId};

    fn decl(name: &str, sort: Sort) -> VarDecl {
        VarDecl { name: name.into(), sort, origin: VarOrigin::StateNum { var: NumVarId(0), step: 0 } }
    }

    #[test]
    fn unsat_and_unknown() {
        assert!(matches!(parse_model("unsat\n", &[]), Ok(SolverVerdict::Unsat)));
        assert!(matches!(parse_model("unknown\n", &[]), Ok(SolverVerdict::Unknown)));
        // trailing error chatter after the verdict is fine
        let out = "unsat\n(error \"line 7 column 10: model is not available\")\n";
        assert!(matches!(parse_model(out, &[]), Ok(SolverVerdict::Unsat)));
    }

    #[test]
    fn simple_int_model() {
        let ds = [decl("a", Sort::NonNegInt)];
        let out = "sat\n(\n  (define-fun a () Int\n    3)\n)\n";
        match parse_model(out, &ds).unwrap() {
            SolverVerdict::Sat(m) => assert_eq!(m.int_value(&ds[0]).unwrap(), BigInt::from(3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_fraction_with_decimal_notation() {
        let ds = [decl("q", Sort::Rational)];
        let out = "sat\n(\n  (define-fun q () Real\n    (- (/ 1.0 2.0)))\n)\n";
        match parse_model(out, &ds).unwrap() {
            SolverVerdict::Sat(m) => {
                assert_eq!(m.rat_value(&ds[0]).unwrap(), Rational::new((-1).into(), 2.into()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_variables_default_and_flag() {
        let ds = [decl("x", Sort::Rational), decl("y", Sort::Rational)];
        let out = "sat\n(\n  (define-fun x () Real 1.0)\n)\n";
        match parse_model(out, &ds).unwrap() {
            SolverVerdict::Sat(m) => {
                assert_eq!(m.rat_value(&ds[0]).unwrap(), rat(1));
                assert_eq!(m.rat_value(&ds[1]).unwrap(), rat(0));
                assert_eq!(m.defaulted, vec!["y".to_string()]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn garbage_is_a_protocol_error() {
        let err = parse_model("segmentation fault\n", &[]).unwrap_err();
        assert!(matches!(err, FormulaError::SolverProtocol { .. }));
    }
}
