use std::collections::{HashSet, VecDeque};

use proptest::prelude::*;

use super::*;
use crate::automata::{Edge, Graph, Guard};
use crate::exact::{solve_fixpoint, DEFAULT_STATE_BUDGET as BUDGET};
use crate::ltl::{eval_lasso, LassoTrace};
use crate::testkit::{arena, formula_strategy, spec, xy_arena, TRUE, XIFFY};
use crate::Ucw;

fn always_zero(_: &GameState, _: u32) -> u32 {
    0
}

fn exact_controller(text: &str, k: usize) -> (GameArena, Controller) {
    let a = arena(text, k);
    let r = solve_fixpoint(&a, BUDGET).unwrap();
    assert!(r.realizable);
    let c = extract(&a, &r, BUDGET).unwrap();
    (a, c)
}

#[test]
fn true_spec_has_one_memory_state() {
    let a = arena(TRUE, 4);
    let c = extract(&a, &always_zero, BUDGET).unwrap();
    assert_eq!(c.size(), 1);
    assert!(verify(&a, &c, 4, BUDGET).unwrap().ok());
    assert!(verify(&a, &extract(&a, &|_: &GameState, x: u32| x, BUDGET).unwrap(), 1, BUDGET).unwrap().ok());
}

#[test]
fn xiffy_controller_copies_previous_input() {
    let (a, c) = exact_controller(XIFFY, 4);
    assert!(verify(&a, &c, 4, BUDGET).unwrap().ok());
    for word in 0u32..256 {
        let inputs: Vec<u32> = (0..8).map(|i| word >> i & 1).collect();
        let outputs = c.run(&inputs);
        for n in 1..8 {
            assert_eq!(outputs[n], inputs[n - 1], "inputs {inputs:?}");
        }
    }
}

#[test]
fn silent_controller_fails_with_two_step_play() {
    let a = arena(XIFFY, 1);
    let c = extract(&a, &always_zero, BUDGET).unwrap();
    let report = verify(&a, &c, 1, BUDGET).unwrap();
    assert_eq!(report.verdict, Verdict::Fail);
    let play = report.counterexample.unwrap();
    assert_eq!(play.len(), 2);
    assert_eq!(play.moves[0], (1, 0));
    assert!(play.last().idx() >= 1);
    assert!(play.states[..2].iter().all(|s| s.idx() < 1));
}

#[test]
fn policy_verification_matches_controller_verification() {
    let a = arena(XIFFY, 1);
    let r = verify_policy(&a, &always_zero, 1, BUDGET);
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.counterexample.unwrap().len(), 2);
}

#[test]
fn budget_overflow_is_inconclusive() {
    let (a, c) = exact_controller(XIFFY, 4);
    let r = verify(&a, &c, 4, 1).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.counterexample.is_none());
}

#[test]
fn extract_budget() {
    let a = arena(XIFFY, 4);
    assert!(matches!(extract(&a, &always_zero, 2), Err(ControllerError::BudgetExceeded { budget: 2 })));
}

#[test]
fn memory_states_match_closed_loop_reachability() {
    let (a, c) = exact_controller(XIFFY, 4);
    let r = solve_fixpoint(&a, BUDGET).unwrap();
    let mut seen = HashSet::from([a.initial_state()]);
    let mut queue = VecDeque::from([a.initial_state()]);
    while let Some(s) = queue.pop_front() {
        for x in 0..a.env_action_count() {
            let t = a.step(&s, x, r.action(&s, x).unwrap());
            if seen.insert(t.clone()) {
                queue.push_back(t);
            }
        }
    }
    assert_eq!(c.size(), seen.len());
}

#[test]
fn dot_output() {
    let a = arena(TRUE, 4);
    let c = extract(&a, &always_zero, BUDGET).unwrap();
    let dot = c.to_dot();
    assert_eq!(dot.matches(" / ").count(), 2);
    assert!(dot.contains("label=\"1 / 0\""));
    assert_eq!(dot, c.clone().to_dot());
}

#[test]
fn json_round_trip() {
    let (_, c) = exact_controller(XIFFY, 4);
    let c = c.with_names(&["x".into()], &["y".into()]);
    let text = c.to_json();
    let back = Controller::from_json(&text).unwrap();
    assert_eq!(back, c);
    assert_eq!(back.to_json(), text);
}

#[test]
fn tampered_json_rejected() {
    let (_, mut c) = exact_controller(XIFFY, 4);
    c.transitions[0][1].next = 99;
    assert!(matches!(Controller::from_json(&c.to_json()), Err(ControllerError::Malformed(_))));
    let (_, mut c) = exact_controller(XIFFY, 4);
    c.version = 7;
    assert!(Controller::from_json(&c.to_json()).is_err());
}

#[test]
fn tampered_controller_caught_by_verify() {
    let (a, mut c) = exact_controller(XIFFY, 1);
    for row in &mut c.transitions {
        for t in row {
            t.output ^= 1;
        }
    }
    assert_eq!(verify(&a, &c, 1, BUDGET).unwrap().verdict, Verdict::Fail);
}

#[test]
fn arena_mismatch() {
    let (_, c) = exact_controller(XIFFY, 4);
    let u = Ucw {
        graph: Graph { aps: vec!["a".into()], initial: 0, edges: vec![vec![Edge { guard: Guard::tt(), dst: 0 }]] },
        rejecting: vec![false],
    };
    let other = GameArena::new(vec![u], 0, 1, 4).unwrap();
    assert!(matches!(verify(&other, &c, 4, BUDGET), Err(ControllerError::Mismatch(_))));
}

/// Closed-loop lasso: inputs from `prefix`/`cycle`, outputs from `c`. The
/// controller's memory is finite, so after enough unrolled cycles the joint
/// (memory, position) repeats and yields a genuine lasso.
fn closed_loop_trace(c: &Controller, prefix: &[u32], cycle: &[u32]) -> LassoTrace {
    let mut letters = Vec::new();
    let mut m = c.initial;
    let mut seen = std::collections::HashMap::new();
    let shift = c.env_bits;
    let mut pos = 0usize;
    loop {
        let in_cycle = pos >= prefix.len();
        let key = if in_cycle { Some((m, (pos - prefix.len()) % cycle.len())) } else { None };
        if let Some(key) = key {
            if let Some(&start) = seen.get(&key) {
                let cyc = letters[start..].to_vec();
                letters.truncate(start);
                return LassoTrace::new(letters, cyc);
            }
            seen.insert(key, letters.len());
        }
        let x = if in_cycle { cycle[(pos - prefix.len()) % cycle.len()] } else { prefix[pos] };
        let t = c.transitions[m][x as usize];
        letters.push(x | t.output << shift);
        m = t.next;
        pos += 1;
    }
}

#[test]
fn xiffy_minimizes_to_two_states() {
    let (a, c) = exact_controller(XIFFY, 4);
    let m = c.minimized();
    assert_eq!((c.size(), m.size()), (5, 2));
    assert!(verify(&a, &m, 4, BUDGET).unwrap().ok());
    assert_eq!(m.minimized(), m);
    let inputs = [1, 0, 0, 1, 1, 0, 1];
    assert_eq!(m.run(&inputs), c.run(&inputs));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn minimization_preserves_behaviour(
        f in formula_strategy(),
        k in 1usize..=3,
        inputs in proptest::collection::vec(0u32..2, 0..=12),
    ) {
        let a = xy_arena(&f, k);
        let r = solve_fixpoint(&a, BUDGET).unwrap();
        prop_assume!(r.realizable);
        let c = extract(&a, &r, BUDGET).unwrap();
        let m = c.minimized();
        prop_assert!(m.check().is_ok());
        prop_assert!(m.size() <= c.size());
        prop_assert_eq!(m.run(&inputs), c.run(&inputs));
        prop_assert_eq!(m.minimized().size(), m.size());
        prop_assert!(verify(&a, &m, k, BUDGET).unwrap().ok());
    }

    #[test]
    fn verified_controllers_satisfy_formula(
        f in formula_strategy(),
        k in 1usize..=3,
        prefix in proptest::collection::vec(0u32..2, 0..=3),
        cycle in proptest::collection::vec(0u32..2, 1..=3),
    ) {
        let a = xy_arena(&f, k);
        let r = solve_fixpoint(&a, BUDGET).unwrap();
        prop_assume!(r.realizable);
        let c = extract(&a, &r, BUDGET).unwrap();
        prop_assert!(verify(&a, &c, k, BUDGET).unwrap().ok());
        let trace = closed_loop_trace(&c, &prefix, &cycle);
        prop_assert!(eval_lasso(&f, &trace));
    }

    #[test]
    fn counterexamples_are_shortest(f in formula_strategy(), k in 1usize..=3, out in 0u32..2) {
        let a = xy_arena(&f, k);
        let policy = move |_: &GameState, _: u32| out;
        let report = verify_policy(&a, &policy, k, BUDGET);
        if let Some(play) = report.counterexample {
            // Breadth-first distance to any losing state under the same policy.
            let mut depth = std::collections::HashMap::from([(a.initial_state(), 0usize)]);
            let mut queue = VecDeque::from([a.initial_state()]);
            let mut best = None;
            while let Some(s) = queue.pop_front() {
                let d = depth[&s];
                if s.idx() >= k as i32 {
                    best = Some(d);
                    break;
                }
                for x in 0..2 {
                    let t = a.step(&s, x, out);
                    if !depth.contains_key(&t) {
                        depth.insert(t.clone(), d + 1);
                        queue.push_back(t);
                    }
                }
            }
            prop_assert_eq!(Some(play.len()), best);
            for (i, &(x, y)) in play.moves.iter().enumerate() {
                prop_assert_eq!(&a.step(&play.states[i], x, y), &play.states[i + 1]);
            }
        } else {
            prop_assert!(report.ok());
        }
    }
}

#[test]
fn spec_helper_names() {
    assert_eq!(spec(XIFFY).env_names(), vec!["x"]);
}
