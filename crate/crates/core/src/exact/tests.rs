use proptest::prelude::*;

use super::*;
use crate::automata::{Edge, Graph, Guard};
use crate::controller::{verify_policy, Policy};
use crate::game::{GameArena, GameState};
use crate::testkit::{arena, formula_strategy, xy_arena, FALSE, TRUE, XIFFY, YIFFX};
use crate::Ucw;

const BUDGET: usize = DEFAULT_STATE_BUDGET;

fn st(v: &[i16]) -> GameState {
    GameState::new(v.to_vec())
}

#[test]
fn xiffy_realizable_at_one() {
    let r = solve_fixpoint(&arena(XIFFY, 1), BUDGET).unwrap();
    assert!(r.realizable);
    assert!(r.is_safe(&arena(XIFFY, 1).initial_state()));
}

#[test]
fn yiffx_unrealizable_up_to_four() {
    // Whatever y the system commits to, the environment plays the opposite x
    // next, so every second step at the latest visits a rejecting state.
    for k in 0..=4 {
        let r = solve_fixpoint(&arena(YIFFX, k), BUDGET).unwrap();
        assert!(!r.realizable, "k = {k}");
        assert_eq!(r.safe_count(), 0, "k = {k}");
    }
}

#[test]
fn trivial_specs() {
    for k in 1..=4 {
        assert!(solve_fixpoint(&arena(TRUE, k), BUDGET).unwrap().realizable);
        assert!(!solve_fixpoint(&arena(FALSE, k), BUDGET).unwrap().realizable);
    }
}

#[test]
fn fixpoint_policy_stays_safe() {
    let a = arena(XIFFY, 2);
    let r = solve_fixpoint(&a, BUDGET).unwrap();
    let safe: Vec<GameState> = r.safe_states().cloned().collect();
    assert!(!safe.is_empty());
    for s in &safe {
        for x in 0..a.env_action_count() {
            let y = r.action(s, x).expect("policy defined on safe states");
            assert!(r.is_safe(&a.step_clamped(s, x, y)));
        }
    }
    assert_eq!(r.policy_map().len(), safe.len() * a.env_action_count() as usize);
}

#[test]
fn fixpoint_budget_error() {
    let err = solve_fixpoint(&arena(XIFFY, 4), 1).err().unwrap();
    assert_eq!(err, ExactError::BudgetExceeded { budget: 1 });
}

/// One automaton state with a `true` self-loop.
fn single(rejecting: bool) -> GameArena {
    let u = Ucw {
        graph: Graph {
            aps: vec!["x".into(), "y".into()],
            initial: 0,
            edges: vec![vec![Edge { guard: Guard::tt(), dst: 0 }]],
        },
        rejecting: vec![rejecting],
    };
    GameArena::new(vec![u], 1, 1, 4).unwrap()
}

#[test]
fn backup_dead_state() {
    let a = single(false);
    let dead = st(&[-1]);
    let t = ValueTable::from_rows(4, 2, [(dead.clone(), vec![-1, -1])]);
    assert_eq!(a.step(&dead, 0, 0), dead);
    assert_eq!(bellman_backup(&a, &t, &dead, 0), -1);
    assert_eq!(bellman_backup(&a, &t, &dead, 1), -1);
}

#[test]
fn backup_takes_max_with_idx() {
    let a = single(false);
    let s = st(&[2]);
    let t = ValueTable::from_rows(4, 2, [(s.clone(), vec![1, 0])]);
    // T(<2>, x, y) = <2>, whose value is 1 in the table.
    assert_eq!(bellman_backup(&a, &t, &s, 0), 2);
}

#[test]
fn backup_all_losing_is_k() {
    let a = single(true);
    let s = st(&[3]);
    // Successor <4> is outside the table and has idx >= K.
    let t = ValueTable::from_rows(4, 2, [(s.clone(), vec![0, 0])]);
    assert_eq!(a.step(&s, 0, 0), st(&[4]));
    assert_eq!(bellman_backup(&a, &t, &s, 0), 4);
}

#[test]
fn value_iteration_examples() {
    let a = arena(XIFFY, 4);
    let t = value_iteration(&a, 4, BUDGET).unwrap();
    // Optimal play never visits a rejecting state.
    assert_eq!(t.v(&a.initial_state()), 0);

    let a = arena(YIFFX, 4);
    assert_eq!(value_iteration(&a, 4, BUDGET).unwrap().v(&a.initial_state()), 4);

    let a = arena(TRUE, 4);
    assert!(value_iteration(&a, 4, BUDGET).unwrap().v(&a.initial_state()) <= 0);
}

#[test]
fn greedy_policy_examples() {
    let a = arena(XIFFY, 4);
    let t = value_iteration(&a, 4, BUDGET).unwrap();
    let p = greedy_policy(&a, &t);
    assert!(verify_policy(&a, &p, 4, BUDGET).ok());
    // Greedy play never exceeds V(s1) = 0.
    assert!(verify_policy(&a, &p, 1, BUDGET).ok());

    // All successors tie in the single-state arena.
    let a = single(false);
    let t = value_iteration(&a, 4, BUDGET).unwrap();
    let p = greedy_policy(&a, &t);
    assert_eq!(p.action(&a.initial_state(), 1), 0);
    assert_eq!(p.action(&st(&[-1]), 0), 0);
}

#[test]
fn sweep_count_small_arena() {
    let a = arena(XIFFY, 4);
    let mut vi = ValueIteration::new(&a, 4, BUDGET).unwrap();
    let pairs = vi.pair_count();
    while vi.sweep() {}
    assert!(vi.sweeps() <= 6 * pairs);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fixpoint_and_value_iteration_agree(f in formula_strategy(), k in 1usize..=4) {
        let a = xy_arena(&f, k);
        let r = solve_fixpoint(&a, BUDGET).unwrap();
        let t = value_iteration(&a, k, BUDGET).unwrap();
        prop_assert_eq!(r.realizable, t.v(&a.initial_state()) < k as i32);
    }

    #[test]
    fn sweeps_monotone_and_bounded(f in formula_strategy(), k in 1usize..=4) {
        let a = xy_arena(&f, k);
        let mut vi = ValueIteration::new(&a, k, BUDGET).unwrap();
        let bound = (k + 2) * vi.pair_count();
        loop {
            let before = vi.q_values().to_vec();
            let changed = vi.sweep();
            for (old, new) in before.iter().zip(vi.q_values()) {
                prop_assert!(new >= old);
                prop_assert!((-1..=k as i32).contains(new));
            }
            prop_assert!(vi.sweeps() <= bound);
            if !changed {
                break;
            }
        }
    }

    #[test]
    fn greedy_and_fixpoint_policies_sound(f in formula_strategy(), k in 1usize..=4) {
        let a = xy_arena(&f, k);
        let t = value_iteration(&a, k, BUDGET).unwrap();
        if t.v(&a.initial_state()) < k as i32 {
            prop_assert!(verify_policy(&a, &greedy_policy(&a, &t), k, BUDGET).ok());
        }
        let r = solve_fixpoint(&a, BUDGET).unwrap();
        prop_assert_eq!(r.realizable, verify_policy(&a, &r, k, BUDGET).ok());
    }

    #[test]
    fn table_satisfies_bellman_equations(f in formula_strategy(), k in 1usize..=4) {
        let a = xy_arena(&f, k);
        let t = value_iteration(&a, k, BUDGET).unwrap();
        for s in t.states() {
            for x in 0..a.env_action_count() {
                prop_assert_eq!(t.q(s, x), bellman_backup(&a, &t, s, x));
            }
        }
    }
}
