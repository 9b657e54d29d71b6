//! Static analysis of ground problems: effect taxonomy, rolling
//! eligibility, mutex pairs, and the interval-abstraction planning
//! graph used to compute patterns.

use std::collections::BTreeSet;

use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{Action, ActionId, Condition, Effect, LinearExpr, Plan, Problem, Rational};

/// Category of a single effect with respect to its owning action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EffectClass {
    BooleanAssignment,
    /// `v := v + delta` with `delta` free of variables assigned by the
    /// owning action; can be rolled `k` times as `k * delta`.
    LinearIncrement(LinearExpr),
    /// `v := rhs` with `rhs` free of variables assigned by the owner.
    SimpleAssignment(LinearExpr),
    /// Any other assignment; forbids rolling the owner.
    SelfInterfering,
}

fn assigned_num_vars(a: &Action) -> BTreeSet<crate::model::NumVarId> {
    a.eff
        .iter()
        .filter_map(|e| match e {
            Effect::Num(v, _) => Some(*v),
            _ => None,
        })
        .collect()
}

/// Classifies `e`, which must be an effect of `a`.
pub fn classify_effect(a: &Action, e: &Effect) -> EffectClass {
    match e {
        Effect::Bool(..) => EffectClass::BooleanAssignment,
        Effect::Num(v, rhs) => {
            let assigned = assigned_num_vars(a);
            if rhs.coeff(*v) == Rational::from_integer(1.into()) {
                let delta = rhs.sub(&LinearExpr::var(*v));
                if delta.vars().all(|w| !assigned.contains(&w)) {
                    return EffectClass::LinearIncrement(delta);
                }
            }
            if rhs.vars().all(|w| !assigned.contains(&w)) {
                EffectClass::SimpleAssignment(rhs.clone())
            } else {
                EffectClass::SelfInterfering
            }
        }
    }
}

/// The three rolling conditions: no Boolean precondition contradicted
/// by the action's own Boolean effects, no self-interfering assignment,
/// and at least one linear increment.
pub fn eligible_for_rolling(a: &Action) -> bool {
    for c in &a.pre {
        if let Condition::Bool(v, want) = c {
            let contradicted = a.eff.iter().any(|e| matches!(e, Effect::Bool(w, val) if w == v && val != want));
            if contradicted {
                return false;
            }
        }
    }
    let mut has_increment = false;
    for e in &a.eff {
        match classify_effect(a, e) {
            EffectClass::SelfInterfering => return false,
            EffectClass::LinearIncrement(_) => has_increment = true,
            _ => {}
        }
    }
    has_increment
}

fn num_occurs_in(a: &Action, v: crate::model::NumVarId) -> bool {
    let in_pre = a.pre.iter().any(|c| matches!(c, Condition::Num(e, _) if e.mentions(v)));
    let in_eff = a.eff.iter().any(|e| match e {
        Effect::Num(w, rhs) => *w == v || rhs.mentions(v),
        _ => false,
    });
    in_pre || in_eff
}

/// Interfering action pairs, as unordered `(lo, hi)` id pairs.
///
/// A pair interferes when one action's Boolean precondition is flipped
/// by the other's effect, or when one assigns a numeric variable the
/// other reads or writes.
pub fn mutex_pairs(p: &Problem) -> BTreeSet<(ActionId, ActionId)> {
    let mut out = BTreeSet::new();
    let ids: Vec<ActionId> = p.action_ids().collect();
    for &a1 in &ids {
        for &a2 in &ids {
            if a1 == a2 {
                continue;
            }
            let (x, y) = (p.action(a1), p.action(a2));
            let bool_clash = x.pre.iter().any(|c| {
                matches!(c, Condition::Bool(v, want)
                    if y.eff.iter().any(|e| matches!(e, Effect::Bool(w, val) if w == v && val != want)))
            });
            let num_clash = x.eff.iter().any(|e| match e {
                Effect::Num(v, _) => num_occurs_in(y, *v),
                _ => false,
            });
            if bool_clash || num_clash {
                out.insert((a1.min(a2), a1.max(a2)));
            }
        }
    }
    out
}

/// One-sided bound; `None` is the corresponding infinity.
pub type Bound = Option<Rational>;

/// Closed interval over the rationals extended with infinities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    /// `None` means unbounded below.
    pub lo: Bound,
    /// `None` means unbounded above.
    pub hi: Bound,
}

impl Interval {
    fn point(v: Rational) -> Self {
        Interval { lo: Some(v.clone()), hi: Some(v) }
    }

    fn union(&self, other: &Interval) -> Interval {
        let lo = match (&self.lo, &other.lo) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            _ => None,
        };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            _ => None,
        };
        Interval { lo, hi }
    }
}

/// Abstraction of a set of states: per-Boolean reachable polarities and
/// per-numeric interval hulls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalState {
    pub bool_can_true: Vec<bool>,
    pub bool_can_false: Vec<bool>,
    pub num: Vec<Interval>,
}

impl IntervalState {
    fn from_init(p: &Problem) -> Self {
        IntervalState {
            bool_can_true: p.init.bool_vals.clone(),
            bool_can_false: p.init.bool_vals.iter().map(|b| !b).collect(),
            num: p.init.num_vals.iter().map(|v| Interval::point(v.clone())).collect(),
        }
    }

    /// Interval hull of a linear expression.
    fn hull(&self, e: &LinearExpr) -> Interval {
        let mut lo = Some(e.constant_part().clone());
        let mut hi = Some(e.constant_part().clone());
        for (v, k) in e.terms() {
            let iv = &self.num[v.0 as usize];
            // multiplying by a negative coefficient swaps the bounds
            let (term_lo, term_hi) = if k.is_negative() {
                (iv.hi.as_ref().map(|b| b * k), iv.lo.as_ref().map(|b| b * k))
            } else {
                (iv.lo.as_ref().map(|b| b * k), iv.hi.as_ref().map(|b| b * k))
            };
            lo = match (lo, term_lo) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
            hi = match (hi, term_hi) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
        }
        Interval { lo, hi }
    }

    /// Per-condition satisfiability under the abstraction; conjunctions
    /// are checked condition-wise (sound over-approximation).
    fn cond_satisfiable(&self, c: &Condition) -> bool {
        match c {
            Condition::Bool(v, true) => self.bool_can_true[v.0 as usize],
            Condition::Bool(v, false) => self.bool_can_false[v.0 as usize],
            Condition::Num(e, op) => {
                let h = self.hull(e);
                match op {
                    crate::model::CmpOp::Ge => h.hi.as_ref().map(|b| !b.is_negative()).unwrap_or(true),
                    crate::model::CmpOp::Gt => h.hi.as_ref().map(|b| b.is_positive()).unwrap_or(true),
                    crate::model::CmpOp::Eq => {
                        let lo_ok = h.lo.as_ref().map(|b| !b.is_positive()).unwrap_or(true);
                        let hi_ok = h.hi.as_ref().map(|b| !b.is_negative()).unwrap_or(true);
                        lo_ok && hi_ok
                    }
                }
            }
        }
    }

    fn action_applicable(&self, a: &Action) -> bool {
        a.pre.iter().all(|c| self.cond_satisfiable(c))
    }
}

/// Alternating state/action layers of the interval planning graph.
///
/// Layer `i` pairs the state abstraction `S_i` with the set `A_i` of
/// actions applicable under it. Linear increments widen the incremented
/// bound directly to infinity the first time their action becomes
/// applicable (the asymptotic reading); assignments contribute the
/// interval hull of their right-hand side. The sequence ends when both
/// the action set and the abstraction stop changing.
pub fn arpg_layers(p: &Problem) -> Vec<(IntervalState, BTreeSet<ActionId>)> {
    let mut layers = Vec::new();
    let mut state = IntervalState::from_init(p);
    // after the action sets must have stabilized, force any still-moving
    // bound to infinity so pathological assignment chains terminate
    let aggressive_after = p.actions.len() + 2;
    let mut iter = 0usize;
    loop {
        let acts: BTreeSet<ActionId> =
            p.action_ids().filter(|id| state.action_applicable(p.action(*id))).collect();
        layers.push((state.clone(), acts.clone()));

        let mut next = state.clone();
        for id in &acts {
            let a = p.action(*id);
            for e in &a.eff {
                match e {
                    Effect::Bool(v, val) => {
                        if *val {
                            next.bool_can_true[v.0 as usize] = true;
                        } else {
                            next.bool_can_false[v.0 as usize] = true;
                        }
                    }
                    Effect::Num(v, rhs) => {
                        let slot = v.0 as usize;
                        if let EffectClass::LinearIncrement(delta) = classify_effect(a, e) {
                            let h = state.hull(&delta);
                            if h.hi.as_ref().map(|b| b.is_positive()).unwrap_or(true) {
                                next.num[slot].hi = None;
                            }
                            if h.lo.as_ref().map(|b| b.is_negative()).unwrap_or(true) {
                                next.num[slot].lo = None;
                            }
                        } else {
                            // simple or self-interfering assignment: hull of the rhs
                            let h = state.hull(rhs);
                            next.num[slot] = next.num[slot].union(&h);
                        }
                    }
                }
            }
        }

        if iter >= aggressive_after {
            for (slot, iv) in next.num.iter_mut().enumerate() {
                let old = &state.num[slot];
                if iv.lo != old.lo {
                    iv.lo = None;
                }
                if iv.hi != old.hi {
                    iv.hi = None;
                }
            }
        }

        if next == state {
            // state fixpoint; the action layer cannot change either
            break;
        }
        state = next;
        iter += 1;
    }
    layers
}

/// Computes a simple and complete pattern from the planning-graph
/// layers: actions ordered by first-appearance layer, ties broken by a
/// seeded shuffle, never-applicable actions appended at the tail.
pub fn arpg_pattern(p: &Problem, seed: u64) -> Pattern {
    let layers = arpg_layers(p);
    let mut first_layer: Vec<Option<usize>> = vec![None; p.actions.len()];
    for (i, (_, acts)) in layers.iter().enumerate() {
        for a in acts {
            let slot = &mut first_layer[a.0 as usize];
            if slot.is_none() {
                *slot = Some(i);
            }
        }
    }
    let mut groups: Vec<Vec<ActionId>> = vec![Vec::new(); layers.len() + 1];
    for id in p.action_ids() {
        match first_layer[id.0 as usize] {
            Some(i) => groups[i].push(id),
            None => groups[layers.len()].push(id),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut occurrences = Vec::with_capacity(p.actions.len());
    for group in &mut groups {
        group.shuffle(&mut rng);
        occurrences.extend(group.iter().copied());
    }
    Pattern { occurrences }
}

/// A pattern: a finite sequence of action occurrences, repetitions
/// allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub occurrences: Vec<ActionId>,
}

impl Pattern {
    pub fn new(occurrences: Vec<ActionId>) -> Self {
        Pattern { occurrences }
    }

    /// Each action occurs at most once.
    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.occurrences.iter().all(|a| seen.insert(*a))
    }

    /// Each action of the problem occurs at least once.
    pub fn is_complete(&self, p: &Problem) -> bool {
        let seen: BTreeSet<ActionId> = self.occurrences.iter().copied().collect();
        p.action_ids().all(|a| seen.contains(&a))
    }

    pub fn len(&self) -> usize {
        self.occurrences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occurrences.is_empty()
    }

    /// One action name per line, in pattern order.
    pub fn format(&self, p: &Problem) -> String {
        let mut out = String::new();
        for a in &self.occurrences {
            out.push_str(p.action(*a).name.as_str());
            out.push('\n');
        }
        out
    }

    pub fn parse(p: &Problem, text: &str) -> Result<Self, crate::model::ModelError> {
        let mut occurrences = Vec::new();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with(';') || line.starts_with('#') {
                continue;
            }
            let id = p
                .action_by_name(line)
                .ok_or_else(|| crate::model::ModelError::UnknownAction(line.to_string()))?;
            occurrences.push(id);
        }
        Ok(Pattern { occurrences })
    }

    /// Expands the pattern and per-occurrence counts into a plan,
    /// dropping zero-count occurrences.
    pub fn decode_counts(&self, counts: &[u64]) -> Plan {
        assert_eq!(counts.len(), self.occurrences.len());
        Plan {
            steps: self
                .occurrences
                .iter()
                .zip(counts)
                .filter(|(_, k)| **k > 0)
                .map(|(a, k)| (*a, *k))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::two_robots_problem;
    use crate::model::{rat, NumVarId};

    fn tr() -> Problem {
        two_robots_problem(1, 1).unwrap()
    }

    fn id(p: &Problem, name: &str) -> ActionId {
        p.action_by_name(name).unwrap()
    }

    #[test]
    fn classification_matches_taxonomy() {
        let p = tr();
        let conn = p.action(id(&p, "conn"));
        assert_eq!(classify_effect(conn, &conn.eff[0]), EffectClass::BooleanAssignment);

        let exch = p.action(id(&p, "exch"));
        let q = NumVarId(4);
        match classify_effect(exch, &exch.eff[0]) {
            EffectClass::LinearIncrement(delta) => {
                assert_eq!(delta.coeff(q), rat(-1));
            }
            other => panic!("expected increment, got {other:?}"),
        }

        let lre = p.action(id(&p, "lre"));
        match classify_effect(lre, &lre.eff[0]) {
            EffectClass::SimpleAssignment(rhs) => assert_eq!(rhs, LinearExpr::constant(rat(1))),
            other => panic!("expected simple assignment, got {other:?}"),
        }
    }

    #[test]
    fn doubling_is_self_interfering() {
        let x = NumVarId(0);
        let a = Action::new("dbl", vec![], vec![Effect::Num(x, LinearExpr::var(x).scale(&rat(2)))]).unwrap();
        assert_eq!(classify_effect(&a, &a.eff[0]), EffectClass::SelfInterfering);
        assert!(!eligible_for_rolling(&a));
    }

    #[test]
    fn eligibility_on_two_robots() {
        let p = tr();
        for name in ["exch", "lft_r", "rgt_r", "lft_l", "rgt_l"] {
            assert!(eligible_for_rolling(p.action(id(&p, name))), "{name} should roll");
        }
        for name in ["lre", "rle", "conn", "disc"] {
            assert!(!eligible_for_rolling(p.action(id(&p, name))), "{name} should not roll");
        }
    }

    #[test]
    fn boolean_contradiction_blocks_rolling() {
        let v = crate::model::BoolVarId(0);
        let x = NumVarId(0);
        let a = Action::new(
            "flip",
            vec![Condition::Bool(v, false)],
            vec![Effect::Bool(v, true), Effect::increase(x, LinearExpr::constant(rat(1)))],
        )
        .unwrap();
        assert!(!eligible_for_rolling(&a));
    }

    #[test]
    fn mutexes_on_two_robots() {
        let p = tr();
        let pairs = mutex_pairs(&p);
        let pair = |a: &str, b: &str| {
            let (x, y) = (id(&p, a), id(&p, b));
            (x.min(y), x.max(y))
        };
        assert!(pairs.contains(&pair("rgt_r", "conn")));
        assert!(pairs.contains(&pair("lre", "exch")));
        assert!(!pairs.contains(&pair("lft_r", "rgt_l")));
    }

    #[test]
    fn single_action_has_no_mutexes() {
        let x = NumVarId(0);
        let p = Problem {
            bool_names: vec![],
            num_names: vec!["x".into()],
            actions: vec![Action::new("a", vec![], vec![Effect::increase(x, LinearExpr::constant(rat(1)))]).unwrap()],
            init: crate::model::State { bool_vals: vec![], num_vals: vec![rat(0)] },
            goals: vec![],
        };
        assert!(mutex_pairs(&p).is_empty());
    }

    #[test]
    fn arpg_layers_on_two_robots() {
        let p = tr();
        let layers = arpg_layers(&p);
        let names = |s: &BTreeSet<ActionId>| -> BTreeSet<String> {
            s.iter().map(|a| p.action(*a).name.clone()).collect()
        };
        let expect0: BTreeSet<String> =
            ["lft_r", "rgt_r", "lft_l", "rgt_l", "lre", "rle"].iter().map(|s| s.to_string()).collect();
        assert_eq!(names(&layers[0].1), expect0);
        let new1: BTreeSet<String> = names(&layers[1].1).difference(&names(&layers[0].1)).cloned().collect();
        assert_eq!(new1, ["conn".to_string()].into_iter().collect());
        let new2: BTreeSet<String> = names(&layers[2].1).difference(&names(&layers[1].1)).cloned().collect();
        assert_eq!(new2, ["exch".to_string(), "disc".to_string()].into_iter().collect());
        // fixpoint: no further additions
        for w in layers.windows(2).skip(2) {
            assert_eq!(w[0].1, w[1].1);
        }
    }

    #[test]
    fn arpg_monotone() {
        let p = tr();
        let layers = arpg_layers(&p);
        for w in layers.windows(2) {
            assert!(w[0].1.is_subset(&w[1].1));
        }
        assert!(layers.len() <= p.actions.len() + 8);
    }

    #[test]
    fn unreachable_action_in_no_layer() {
        let x = NumVarId(0);
        let p = Problem {
            bool_names: vec![],
            num_names: vec!["x".into()],
            actions: vec![Action::new("blocked", vec![Condition::gt(LinearExpr::var(x))], vec![]).unwrap()],
            init: crate::model::State { bool_vals: vec![], num_vals: vec![rat(0)] },
            goals: vec![],
        };
        let layers = arpg_layers(&p);
        assert!(layers.iter().all(|(_, acts)| acts.is_empty()));
        // the pattern still covers it, at the tail
        let pat = arpg_pattern(&p, 0);
        assert_eq!(pat.occurrences.len(), 1);
    }

    #[test]
    fn pattern_respects_layer_order_and_is_deterministic() {
        let p = tr();
        for seed in 0..8u64 {
            let pat = arpg_pattern(&p, seed);
            assert!(pat.is_simple());
            assert!(pat.is_complete(&p));
            assert_eq!(pat, arpg_pattern(&p, seed));
            let pos = |name: &str| pat.occurrences.iter().position(|a| *a == id(&p, name)).unwrap();
            for first in ["lft_r", "rgt_r", "lft_l", "rgt_l", "lre", "rle"] {
                assert!(pos(first) < pos("conn"));
            }
            assert!(pos("conn") < pos("exch"));
            assert!(pos("conn") < pos("disc"));
        }
    }

    #[test]
    fn init_satisfying_problem_has_single_action_layer() {
        let x = NumVarId(0);
        let p = Problem {
            bool_names: vec![],
            num_names: vec!["x".into()],
            actions: vec![
                Action::new("a", vec![Condition::ge(LinearExpr::var(x))], vec![]).unwrap(),
                Action::new("b", vec![], vec![Effect::increase(x, LinearExpr::constant(rat(1)))]).unwrap(),
            ],
            init: crate::model::State { bool_vals: vec![], num_vals: vec![rat(0)] },
            goals: vec![],
        };
        let layers = arpg_layers(&p);
        assert_eq!(layers[0].1.len(), 2);
    }

    #[test]
    fn pattern_text_round_trip() {
        let p = tr();
        let pat = arpg_pattern(&p, 42);
        let text = pat.format(&p);
        assert_eq!(Pattern::parse(&p, &text).unwrap(), pat);
    }
}
