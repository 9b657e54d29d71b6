use super::*;
use crate::analysis::{arpg_pattern, Pattern};
use crate::engine::{run_query, QueryResponse, SolverConfig};
use crate::formula::{parse_model, CmpKind, SolverVerdict};
use crate::generate::two_robots_problem;
use crate::model::validate_plan;

fn tr(x_i: u32, q: u32) -> Problem {
    two_robots_problem(x_i, q).unwrap()
}

fn aid(p: &Problem, name: &str) -> ActionId {
    p.action_by_name(name).unwrap()
}

/// The running-example pattern: rate setters, approach moves, connect,
/// exchange, disconnect, return moves.
fn example_pattern(p: &Problem) -> Pattern {
    Pattern::parse(p, "lre\nrle\nlft_r\nrgt_l\nconn\nexch\ndisc\nrgt_r\nlft_l\n").unwrap()
}

fn solve_at(p: &Problem, kind: &EncodingKind, n: usize) -> SolverVerdict {
    let enc = assemble_bound(p, kind, n).unwrap();
    solve_enc(&enc)
}

fn solve_enc(enc: &EncodedBound) -> SolverVerdict {
    let cfg = SolverConfig::default();
    match run_query(&cfg, &enc.to_smtlib()).unwrap() {
        QueryResponse::Output(out) => parse_model(&out, &enc.decls).unwrap(),
        QueryResponse::TimedOut => panic!("solver timeout on a desk-scale query"),
    }
}

#[test]
fn init_encodes_one_atom_per_variable() {
    let p = tr(1, 1);
    let enc = assemble_bound(&p, &EncodingKind::Standard, 0).unwrap();
    assert_eq!(enc.init.len(), 6);
    let text = enc.to_smtlib();
    assert!(text.contains("(assert (not sb0_t0__p))"));
    assert!(text.contains("(assert (= sn0_t0__x_l (- 1)))"));
    assert!(text.contains("(assert (= sn4_t0__q 1))"));
}

#[test]
fn goal_maps_to_final_step_copies() {
    let p = tr(1, 1);
    let enc = assemble_bound(&p, &EncodingKind::Standard, 2).unwrap();
    assert_eq!(enc.goal.len(), 4);
    let text = enc.to_smtlib();
    assert!(text.contains("(assert (= sn2_t2__q_l 0))"));
}

#[test]
fn goal_disjunction_is_one_assertion() {
    let mut p = tr(1, 1);
    let g1 = p.goals[0].clone();
    let g2 = p.goals[1].clone();
    p.goals = vec![crate::model::Formula::Or(vec![g1, g2])];
    let enc = assemble_bound(&p, &EncodingKind::Standard, 1).unwrap();
    assert_eq!(enc.goal.len(), 1);
    assert!(matches!(enc.goal[0], Term::Or(_)));
}

#[test]
fn bound_zero_is_init_and_goal_only() {
    let p = tr(1, 1);
    let enc = assemble_bound(&p, &EncodingKind::Standard, 0).unwrap();
    assert!(enc.steps.is_empty());
    assert!(matches!(solve_enc(&enc), SolverVerdict::Unsat));

    // with a goal the initial state already satisfies, bound 0 is sat
    // and decodes to the empty plan
    let mut q = tr(1, 1);
    q.goals = vec![crate::model::Formula::cond(crate::model::Condition::Bool(crate::model::BoolVarId(0), false))];
    let enc0 = assemble_bound(&q, &EncodingKind::Standard, 0).unwrap();
    match solve_enc(&enc0) {
        SolverVerdict::Sat(m) => {
            let plan = decode_validated(&m, &enc0, &q).unwrap();
            assert!(plan.steps.is_empty());
        }
        other => panic!("expected sat, got {other:?}"),
    }
}

#[test]
fn psi_sub_a_shifts_increments() {
    let p = tr(1, 1);
    let analysis = ProblemAnalysis::build(&p);
    let mut b = DeclBuilder::new();
    let x0 = b.declare_state(&p, 0);
    let exch = aid(&p, "exch");
    let a = Term::int(3); // stand-in occurrence count

    // guard q_l - q of exch: q_l is incremented by -q, q untouched
    let psi = match &p.action(exch).pre[1] {
        crate::model::Condition::Num(e, _) => e.clone(),
        other => panic!("{other:?}"),
    };
    let shifted = psi_sub_a(&psi, &p, &analysis, exch, &a, &|v| x0.num_term(v));
    let script = crate::formula::print_smtlib(&b.decls, &[&shifted], Some("ALL"));
    let line = script.lines().find(|l| l.starts_with("(assert")).unwrap();
    assert_eq!(line, "(assert (+ (+ sn2_t0__q_l (* (- 3 1) (- sn4_t0__q))) (- sn4_t0__q)))");

    // rate setters assign q by a simple assignment: q is replaced by the rhs
    let lre = aid(&p, "lre");
    let after_set = psi_sub_a(&psi, &p, &analysis, lre, &a, &|v| x0.num_term(v));
    let script2 = crate::formula::print_smtlib(&b.decls, &[&after_set], Some("ALL"));
    let line2 = script2.lines().find(|l| l.starts_with("(assert")).unwrap();
    assert_eq!(line2, "(assert (+ sn2_t0__q_l (- 1)))");

    // variables the action does not assign pass through unchanged
    let conn = aid(&p, "conn");
    let untouched = psi_sub_a(&psi, &p, &analysis, conn, &a, &|v| x0.num_term(v));
    let script3 = crate::formula::print_smtlib(&b.decls, &[&untouched], Some("ALL"));
    let line3 = script3.lines().find(|l| l.starts_with("(assert")).unwrap();
    assert_eq!(line3, "(assert (+ sn2_t0__q_l (- sn4_t0__q)))");
}

#[test]
fn psi_sub_a_on_constant_increment() {
    let p = tr(1, 1);
    let analysis = ProblemAnalysis::build(&p);
    let mut b = DeclBuilder::new();
    let x0 = b.declare_state(&p, 0);
    let lft_r = aid(&p, "lft_r");
    let a = Term::int(2);
    let psi = match &p.action(lft_r).pre[0] {
        crate::model::Condition::Num(e, _) => e.clone(),
        other => panic!("{other:?}"),
    };
    let shifted = psi_sub_a(&psi, &p, &analysis, lft_r, &a, &|v| x0.num_term(v));
    let script = crate::formula::print_smtlib(&b.decls, &[&shifted], Some("ALL"));
    let line = script.lines().find(|l| l.starts_with("(assert")).unwrap();
    // x_r + (a - 1) * (-1), the worked example's `x_r - (a - 1)`
    assert_eq!(line, "(assert (+ sn1_t0__x_r (* (- 2 1) (- 1))))");
}

fn frame_rhs_for_bool(enc: &EncodedBound, p: &Problem, name: &str) -> Term {
    let v = p.bool_vars().find(|v| p.bool_name(*v) == name).unwrap();
    for t in &enc.steps[0].frame {
        if let Term::Iff(lhs, rhs) = t {
            if matches!(**lhs, Term::Var(r) if enc.decls[r.0].origin
                == (VarOrigin::StateBool { var: v, step: 1 }))
            {
                return (**rhs).clone();
            }
        }
    }
    panic!("no frame axiom for {name}");
}

fn frame_rhs_for_num(enc: &EncodedBound, p: &Problem, name: &str) -> Term {
    let v = p.num_vars().find(|v| p.num_name(*v) == name).unwrap();
    for t in &enc.steps[0].frame {
        if let Term::Cmp(CmpKind::Eq, lhs, rhs) = t {
            if matches!(**lhs, Term::Var(r) if enc.decls[r.0].origin
                == (VarOrigin::StateNum { var: v, step: 1 }))
            {
                return (**rhs).clone();
            }
        }
    }
    panic!("no frame axiom for {name}");
}

#[test]
fn sigma_on_example_pattern_matches_worked_forms() {
    let p = tr(1, 1);
    let pattern = example_pattern(&p);
    let enc = assemble_bound(&p, &EncodingKind::Pattern { pattern }, 1).unwrap();

    // sigma(p) = (p \/ conn > 0) /\ disc = 0
    let sp = frame_rhs_for_bool(&enc, &p, "p");
    match &sp {
        Term::And(parts) => {
            assert_eq!(parts.len(), 2);
            assert!(matches!(&parts[0], Term::Or(ps) if ps.len() == 2));
            assert!(matches!(&parts[1], Term::Cmp(CmpKind::Eq, _, _)));
        }
        other => panic!("unexpected sigma(p): {other:?}"),
    }

    // sigma(q_l) = q_l - exch * q^(rle occurrence aux)
    let sql = frame_rhs_for_num(&enc, &p, "q_l");
    match &sql {
        Term::Add(parts) => {
            assert_eq!(parts.len(), 2);
            assert!(matches!(&parts[0], Term::Var(r) if enc.decls[r.0].origin
                == (VarOrigin::StateNum { var: crate::model::NumVarId(2), step: 0 })));
            match &parts[1] {
                Term::Mul(a, d) => {
                    assert!(matches!(**a, Term::Var(r) if enc.decls[r.0].origin
                        == (VarOrigin::ActionOcc { occ: 5, step: 0 })));
                    assert!(matches!(**d, Term::Neg(ref inner) if matches!(**inner,
                        Term::Var(r) if enc.decls[r.0].origin
                            == (VarOrigin::PatternAux { var: crate::model::NumVarId(4), occ: 1, step: 0 }))));
                }
                other => panic!("unexpected increment term: {other:?}"),
            }
        }
        other => panic!("unexpected sigma(q_l): {other:?}"),
    }

    // sigma(q) = the rle auxiliary itself
    let sq = frame_rhs_for_num(&enc, &p, "q");
    assert!(matches!(sq, Term::Var(r) if enc.decls[r.0].origin
        == (VarOrigin::PatternAux { var: crate::model::NumVarId(4), occ: 1, step: 0 })));

    // the two auxiliaries are exactly q^(lre) and q^(lre;rle)
    assert_eq!(enc.aux_var_count(), 2);
}

#[test]
fn sigma_base_case_is_the_step_copy() {
    let p = tr(1, 1);
    let enc = assemble_bound(&p, &EncodingKind::Pattern { pattern: Pattern::new(vec![]) }, 1).unwrap();
    // empty pattern: frame pins X_1 to X_0 and there are no action vars
    assert!(enc.decode_meta.step_occ_vars[0].is_empty());
    let sq = frame_rhs_for_num(&enc, &p, "q");
    assert!(matches!(sq, Term::Var(r) if enc.decls[r.0].origin
        == (VarOrigin::StateNum { var: crate::model::NumVarId(4), step: 0 })));
}

#[test]
fn sigma_with_repeated_occurrences_uses_distinct_variables() {
    let p = tr(1, 1);
    let lft_r = aid(&p, "lft_r");
    let pattern = Pattern::new(vec![lft_r, lft_r]);
    let enc = assemble_bound(&p, &EncodingKind::Pattern { pattern }, 1).unwrap();
    let sxr = frame_rhs_for_num(&enc, &p, "x_r");
    // x_r + a0 * (-1) + a1 * (-1), occurrence variables distinct
    match &sxr {
        Term::Add(parts) => {
            assert_eq!(parts.len(), 2);
            match &parts[1] {
                Term::Mul(a, _) => {
                    assert!(matches!(**a, Term::Var(r) if enc.decls[r.0].origin
                        == (VarOrigin::ActionOcc { occ: 1, step: 0 })));
                }
                other => panic!("{other:?}"),
            }
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(enc.decode_meta.step_occ_vars[0].len(), 2);
}

#[test]
fn two_robots_standard_first_sat_at_five() {
    let p = tr(1, 1);
    for n in 1..5 {
        assert!(matches!(solve_at(&p, &EncodingKind::Standard, n), SolverVerdict::Unsat), "bound {n}");
    }
    match solve_at(&p, &EncodingKind::Standard, 5) {
        SolverVerdict::Sat(_) => {}
        other => panic!("expected sat at 5, got {other:?}"),
    }
}

#[test]
fn two_robots_pattern_sat_at_one_and_decodes_the_plan() {
    let p = tr(1, 1);
    let pattern = example_pattern(&p);
    let kind = EncodingKind::Pattern { pattern: pattern.clone() };
    let mut enc = assemble_bound(&p, &kind, 1).unwrap();

    // pin the multiplicities to the worked model: every plan action
    // once, both rate setters unused
    let counts = [0u64, 0, 1, 1, 1, 1, 1, 1, 1];
    for (occ, k) in counts.iter().enumerate() {
        let var = enc.decode_meta.step_occ_vars[0][occ];
        enc.goal.push(Term::eq(Term::Var(var), Term::int(*k as i64)));
    }
    match solve_enc(&enc) {
        SolverVerdict::Sat(m) => {
            let plan = decode_validated(&m, &enc, &p).unwrap();
            let names: Vec<&str> = plan.steps.iter().map(|(a, _)| p.action(*a).name.as_str()).collect();
            assert_eq!(names, ["lft_r", "rgt_l", "conn", "exch", "disc", "rgt_r", "lft_l"]);
            assert!(plan.steps.iter().all(|(_, k)| *k == 1));
            assert!(validate_plan(&p, &plan).valid);
        }
        other => panic!("expected sat, got {other:?}"),
    }
}

#[test]
fn r2e_bounds_depend_on_the_order() {
    let p = tr(1, 1);
    let plan_order: Vec<ActionId> = ["lre", "rle", "rgt_l", "lft_r", "conn", "exch", "disc", "lft_l", "rgt_r"]
        .iter()
        .map(|n| aid(&p, n))
        .collect();
    match solve_at(&p, &EncodingKind::R2e { order: plan_order.clone() }, 1) {
        SolverVerdict::Sat(_) => {}
        other => panic!("plan-compatible order should be sat at 1, got {other:?}"),
    }

    let reverse: Vec<ActionId> = plan_order.iter().rev().copied().collect();
    let kind = EncodingKind::R2e { order: reverse };
    for n in 1..5 {
        assert!(matches!(solve_at(&p, &kind, n), SolverVerdict::Unsat), "bound {n}");
    }
    assert!(matches!(solve_at(&p, &kind, 5), SolverVerdict::Sat(_)));
}

#[test]
fn r2e_rejects_non_permutations() {
    let p = tr(1, 1);
    let exch = aid(&p, "exch");
    let bad = EncodingKind::R2e { order: vec![exch; 9] };
    assert!(matches!(assemble_bound(&p, &bad, 1), Err(EncodeError::InvalidOrder(_))));
}

#[test]
fn r2e_unassigned_variable_frame_is_identity() {
    let mut p = tr(1, 1);
    // strip every action that assigns q so its chain is empty
    p.actions.retain(|a| a.name != "lre" && a.name != "rle");
    let order: Vec<ActionId> = p.action_ids().collect();
    let enc = assemble_bound(&p, &EncodingKind::R2e { order }, 1).unwrap();
    let sq = frame_rhs_for_num(&enc, &p, "q");
    assert!(matches!(sq, Term::Var(r) if enc.decls[r.0].origin
        == (VarOrigin::StateNum { var: crate::model::NumVarId(4), step: 0 })));
}

#[test]
fn mutex_and_amo_structure() {
    let p = tr(1, 1);
    let rolled = assemble_bound(&p, &EncodingKind::Rolled, 1).unwrap();
    let standard = assemble_bound(&p, &EncodingKind::Standard, 1).unwrap();
    let pattern = assemble_bound(&p, &EncodingKind::Pattern { pattern: example_pattern(&p) }, 1).unwrap();
    let r2e = assemble_bound(&p, &EncodingKind::R2e { order: p.action_ids().collect() }, 1).unwrap();

    // rolled: amo exactly for the four non-rollable actions
    assert_eq!(rolled.steps[0].amo.len(), 4);
    assert!(!rolled.steps[0].mutex.is_empty());

    // standard adds one amo clause per action on top of rolled
    assert_eq!(standard.steps[0].amo.len(), 4 + 9);
    assert_eq!(standard.stats().num_assertions, rolled.stats().num_assertions + 9);

    // the pattern encoding emits no mutexes; r2e emits neither mutexes nor amo
    assert_eq!(pattern.steps[0].mutex.len(), 0);
    assert_eq!(pattern.steps[0].amo.len(), 4);
    assert_eq!(r2e.steps[0].mutex.len(), 0);
    assert_eq!(r2e.steps[0].amo.len(), 0);

    // auxiliary economy: pattern auxiliaries never exceed chain copies
    // (one chain copy per assignment effect: exch assigns two variables)
    assert!(pattern.aux_var_count() <= r2e.aux_var_count());
    assert_eq!(pattern.aux_var_count(), 2);
    assert_eq!(r2e.aux_var_count(), 10);
}

#[test]
fn standard_minus_rolled_is_action_count_at_every_bound() {
    let p = tr(2, 3);
    for n in 1..=3 {
        let rolled = assemble_bound(&p, &EncodingKind::Rolled, n).unwrap();
        let standard = assemble_bound(&p, &EncodingKind::Standard, n).unwrap();
        assert_eq!(
            standard.stats().num_assertions,
            rolled.stats().num_assertions + n * p.actions.len(),
            "bound {n}"
        );
    }
}

#[test]
fn decl_counts_grow_monotonically_with_bound() {
    let p = tr(1, 1);
    let kinds = [
        EncodingKind::Standard,
        EncodingKind::Rolled,
        EncodingKind::R2e { order: p.action_ids().collect() },
        EncodingKind::Pattern { pattern: example_pattern(&p) },
    ];
    for kind in &kinds {
        let mut last = 0;
        for n in 0..4 {
            let enc = assemble_bound(&p, kind, n).unwrap();
            assert!(enc.decls.len() > last || n == 0);
            last = enc.decls.len();
        }
    }
}

#[test]
fn smtlib_dump_is_byte_identical_across_runs() {
    let p = tr(1, 1);
    let kind = EncodingKind::Pattern { pattern: example_pattern(&p) };
    let a = assemble_bound(&p, &kind, 2).unwrap().to_smtlib();
    let b = assemble_bound(&p, &kind, 2).unwrap().to_smtlib();
    assert_eq!(a, b);
}

#[test]
fn arpg_pattern_bound_depends_on_exch_disc_order() {
    let p = tr(1, 1);
    // find seeds placing exch before/after disc in the final block
    let exch = aid(&p, "exch");
    let disc = aid(&p, "disc");
    let mut before = None;
    let mut after = None;
    for seed in 0..64 {
        let pat = arpg_pattern(&p, seed);
        let pos = |a: ActionId| pat.occurrences.iter().position(|x| *x == a).unwrap();
        if pos(exch) < pos(disc) {
            before.get_or_insert((seed, pat));
        } else {
            after.get_or_insert((seed, pat));
        }
        if before.is_some() && after.is_some() {
            break;
        }
    }
    let (_, pat_before) = before.expect("some seed puts exch first");
    let (_, pat_after) = after.expect("some seed puts disc first");

    let first_sat = |pat: Pattern| -> usize {
        let kind = EncodingKind::Pattern { pattern: pat };
        for n in 1..=4 {
            if matches!(solve_at(&p, &kind, n), SolverVerdict::Sat(_)) {
                return n;
            }
        }
        panic!("no sat bound up to 4");
    };
    assert_eq!(first_sat(pat_before), 2);
    assert_eq!(first_sat(pat_after), 3);
}
