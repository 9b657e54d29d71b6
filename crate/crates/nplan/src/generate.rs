//! Benchmark instance generators.
//!
//! Two families:
//!
//! * **TwoRobots(X_I, Q)** — two robots approach the origin from `-X_I`
//!   and `X_I`, connect, exchange `Q` items at a settable rate, and
//!   return home. Nine ground actions.
//! * **LineExchange(N, D, Q)** — `N` robots on a line, robot `i`
//!   confined to the segment `[(i-1)*D, i*D]`; adjacent robots meet at
//!   the shared segment endpoint, connect, and exchange items at a
//!   settable rate (`1` forward, `-1` backward). Robot 1 starts with
//!   `Q` items; the goal is to move all of them to robot `N`. The PDDL
//!   schema is lifted over a `robot` type with a static `adjacent`
//!   relation, so grounding exercises typed instantiation and pruning.

use thiserror::Error;

use crate::model::{rat, Action, BoolVarId, Condition, Effect, Formula, LinearExpr, NumVarId, Problem, State};
use crate::pddl::{self, PddlError};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Pddl(#[from] PddlError),
}

/// Benchmark family and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkSpec {
    TwoRobots { x_i: u32, q: u32 },
    LineExchange { robots: u32, segment: u32, items: u32 },
}

impl BenchmarkSpec {
    pub fn validate(&self) -> Result<(), GenerateError> {
        match self {
            BenchmarkSpec::TwoRobots { x_i, q } => {
                if *x_i == 0 || *q == 0 {
                    return Err(GenerateError::InvalidParameter("TwoRobots needs X_I >= 1 and Q >= 1".into()));
                }
            }
            BenchmarkSpec::LineExchange { robots, segment, items } => {
                if *robots < 2 {
                    return Err(GenerateError::InvalidParameter("LineExchange needs at least 2 robots".into()));
                }
                if *segment == 0 {
                    return Err(GenerateError::InvalidParameter("LineExchange needs segment length >= 1".into()));
                }
                if *items == 0 {
                    return Err(GenerateError::InvalidParameter("LineExchange needs at least 1 item".into()));
                }
            }
        }
        Ok(())
    }

    /// Emits `(domain, problem)` PDDL text.
    pub fn pddl(&self) -> Result<(String, String), GenerateError> {
        self.validate()?;
        Ok(match self {
            BenchmarkSpec::TwoRobots { x_i, q } => two_robots_pddl(*x_i, *q),
            BenchmarkSpec::LineExchange { robots, segment, items } => line_exchange_pddl(*robots, *segment, *items),
        })
    }

    /// Grounds the generated PDDL.
    pub fn problem(&self) -> Result<Problem, GenerateError> {
        let (dom, prob) = self.pddl()?;
        let d = pddl::parse_domain(&dom)?;
        let p = pddl::parse_problem(&prob)?;
        Ok(pddl::ground(&d, &p)?.0)
    }
}

/// The two-robots problem built directly at the model level.
///
/// This is the reference the generated PDDL must re-ground to; tests
/// compare the two representations structurally.
pub fn two_robots_problem(x_i: u32, q: u32) -> Result<Problem, GenerateError> {
    BenchmarkSpec::TwoRobots { x_i, q }.validate()?;
    let p = BoolVarId(0);
    let [x_l, x_r, q_l, q_r, qv] = [NumVarId(0), NumVarId(1), NumVarId(2), NumVarId(3), NumVarId(4)];
    let var = LinearExpr::var;
    let one = || LinearExpr::constant(rat(1));

    let actions = vec![
        Action::new("lft_r", vec![Condition::gt(var(x_r))], vec![Effect::decrease(x_r, one())]).unwrap(),
        Action::new("rgt_r", vec![Condition::Bool(p, false)], vec![Effect::increase(x_r, one())]).unwrap(),
        Action::new("lft_l", vec![Condition::Bool(p, false)], vec![Effect::decrease(x_l, one())]).unwrap(),
        Action::new("rgt_l", vec![Condition::lt(var(x_l))], vec![Effect::increase(x_l, one())]).unwrap(),
        Action::new("conn", vec![Condition::eq0(var(x_l).sub(&var(x_r)))], vec![Effect::Bool(p, true)]).unwrap(),
        Action::new("disc", vec![Condition::Bool(p, true)], vec![Effect::Bool(p, false)]).unwrap(),
        Action::new(
            "exch",
            vec![
                Condition::Bool(p, true),
                Condition::ge(var(q_l).sub(&var(qv))),
                Condition::ge(var(q_r).add(&var(qv))),
            ],
            vec![Effect::decrease(q_l, var(qv)), Effect::increase(q_r, var(qv))],
        )
        .unwrap(),
        Action::new("lre", vec![], vec![Effect::Num(qv, LinearExpr::constant(rat(1)))]).unwrap(),
        Action::new("rle", vec![], vec![Effect::Num(qv, LinearExpr::constant(rat(-1)))]).unwrap(),
    ];

    let init = State {
        bool_vals: vec![false],
        num_vals: vec![rat(-(x_i as i64)), rat(x_i as i64), rat(q as i64), rat(0), rat(1)],
    };
    let goals = vec![
        Formula::cond(Condition::eq0(var(q_l))),
        Formula::cond(Condition::eq0(var(q_r).sub(&LinearExpr::constant(rat(q as i64))))),
        Formula::cond(Condition::eq0(var(x_l).add(&LinearExpr::constant(rat(x_i as i64))))),
        Formula::cond(Condition::eq0(var(x_r).sub(&LinearExpr::constant(rat(x_i as i64))))),
    ];

    Ok(Problem {
        bool_names: vec!["p".into()],
        num_names: vec!["x_l".into(), "x_r".into(), "q_l".into(), "q_r".into(), "q".into()],
        actions,
        init,
        goals,
    })
}

/// PDDL text for TwoRobots(X_I, Q).
pub fn two_robots_pddl(x_i: u32, q: u32) -> (String, String) {
    let domain = "\
(define (domain two-robots)
  (:requirements :fluents :negative-preconditions)
  (:predicates (p))
  (:functions (x_l) (x_r) (q_l) (q_r) (q))
  (:action lft_r :parameters () :precondition (> (x_r) 0) :effect (decrease (x_r) 1))
  (:action rgt_r :parameters () :precondition (not (p)) :effect (increase (x_r) 1))
  (:action lft_l :parameters () :precondition (not (p)) :effect (decrease (x_l) 1))
  (:action rgt_l :parameters () :precondition (< (x_l) 0) :effect (increase (x_l) 1))
  (:action conn :parameters () :precondition (= (x_l) (x_r)) :effect (p))
  (:action disc :parameters () :precondition (p) :effect (not (p)))
  (:action exch :parameters ()
    :precondition (and (p) (>= (q_l) (q)) (>= (q_r) (- (q))))
    :effect (and (decrease (q_l) (q)) (increase (q_r) (q))))
  (:action lre :parameters () :precondition (and) :effect (assign (q) 1))
  (:action rle :parameters () :precondition (and) :effect (assign (q) -1))
)
"
    .to_string();
    let problem = format!(
        "\
(define (problem two-robots-{x_i}-{q})
  (:domain two-robots)
  (:init (= (x_l) -{x_i}) (= (x_r) {x_i}) (= (q_l) {q}) (= (q_r) 0) (= (q) 1))
  (:goal (and (= (q_l) 0) (= (q_r) {q}) (= (x_l) -{x_i}) (= (x_r) {x_i})))
)
"
    );
    (domain, problem)
}

/// PDDL text for LineExchange(N, D, Q).
pub fn line_exchange_pddl(robots: u32, segment: u32, items: u32) -> (String, String) {
    let domain = "\
(define (domain line-exchange)
  (:requirements :typing :fluents :negative-preconditions :equality)
  (:types robot)
  (:predicates (adjacent ?a - robot ?b - robot)
               (connected ?a - robot ?b - robot)
               (free ?r - robot))
  (:functions (pos ?r - robot) (seg-min ?r - robot) (seg-max ?r - robot)
              (items ?r - robot) (rate ?a - robot ?b - robot))
  (:action mv-right :parameters (?r - robot)
    :precondition (and (free ?r) (< (pos ?r) (seg-max ?r)))
    :effect (increase (pos ?r) 1))
  (:action mv-left :parameters (?r - robot)
    :precondition (and (free ?r) (> (pos ?r) (seg-min ?r)))
    :effect (decrease (pos ?r) 1))
  (:action connect :parameters (?a - robot ?b - robot)
    :precondition (and (adjacent ?a ?b) (free ?a) (free ?b) (= (pos ?a) (pos ?b)))
    :effect (and (connected ?a ?b) (not (free ?a)) (not (free ?b))))
  (:action disconnect :parameters (?a - robot ?b - robot)
    :precondition (connected ?a ?b)
    :effect (and (not (connected ?a ?b)) (free ?a) (free ?b)))
  (:action exchange :parameters (?a - robot ?b - robot)
    :precondition (and (connected ?a ?b)
                       (>= (items ?a) (rate ?a ?b))
                       (>= (items ?b) (- (rate ?a ?b))))
    :effect (and (decrease (items ?a) (rate ?a ?b)) (increase (items ?b) (rate ?a ?b))))
  (:action set-fwd :parameters (?a - robot ?b - robot)
    :precondition (adjacent ?a ?b)
    :effect (assign (rate ?a ?b) 1))
  (:action set-bwd :parameters (?a - robot ?b - robot)
    :precondition (adjacent ?a ?b)
    :effect (assign (rate ?a ?b) -1))
)
"
    .to_string();

    let names: Vec<String> = (1..=robots).map(|i| format!("r{i}")).collect();
    let mut init = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let lo = (i as u64) * segment as u64;
        let hi = lo + segment as u64;
        init.push(format!("(free {name})"));
        init.push(format!("(= (pos {name}) {lo})"));
        init.push(format!("(= (seg-min {name}) {lo})"));
        init.push(format!("(= (seg-max {name}) {hi})"));
        init.push(format!("(= (items {name}) {})", if i == 0 { items as u64 } else { 0 }));
    }
    for w in names.windows(2) {
        init.push(format!("(adjacent {} {})", w[0], w[1]));
        init.push(format!("(= (rate {} {}) 1)", w[0], w[1]));
    }
    let mut goal = Vec::new();
    for (i, name) in names.iter().enumerate() {
        if i + 1 == names.len() {
            goal.push(format!("(= (items {name}) {items})"));
        } else {
            goal.push(format!("(= (items {name}) 0)"));
        }
    }
    let problem = format!(
        "\
(define (problem line-exchange-{robots}-{segment}-{items})
  (:domain line-exchange)
  (:objects {} - robot)
  (:init
    {}
  )
  (:goal (and {}))
)
",
        names.join(" "),
        init.join("\n    "),
        goal.join(" ")
    );
    (domain, problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_robots_pddl_grounds_to_reference() {
        for (x_i, q) in [(1, 1), (2, 3)] {
            let reference = two_robots_problem(x_i, q).unwrap();
            let grounded = BenchmarkSpec::TwoRobots { x_i, q }.problem().unwrap();
            assert_eq!(grounded.bool_names, reference.bool_names);
            assert_eq!(grounded.num_names, reference.num_names);
            assert_eq!(grounded.init, reference.init);
            assert_eq!(grounded.actions, reference.actions);
            assert_eq!(grounded.goals, reference.goals);
        }
    }

    #[test]
    fn line_exchange_grounds() {
        let p = BenchmarkSpec::LineExchange { robots: 2, segment: 1, items: 1 }.problem().unwrap();
        // 2 moves per robot, conn/disc/exch/set-fwd/set-bwd per adjacent pair
        assert_eq!(p.actions.len(), 2 * 2 + 5);
        // adjacency is static and folded away
        assert!(p.bool_names.iter().all(|n| !n.starts_with("adjacent")));
        // rate only exists for the adjacent pair
        assert_eq!(p.num_names.iter().filter(|n| n.starts_with("rate")).count(), 1);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(BenchmarkSpec::LineExchange { robots: 1, segment: 1, items: 1 }.validate().is_err());
        assert!(BenchmarkSpec::LineExchange { robots: 2, segment: 0, items: 1 }.validate().is_err());
        assert!(BenchmarkSpec::TwoRobots { x_i: 0, q: 1 }.validate().is_err());
    }
}
