use proptest::prelude::*;

use crate::game::GameArena;
use crate::ltl::{parse_spec, Ltl, Specification};

pub fn spec(text: &str) -> Specification {
    parse_spec(text).unwrap()
}

pub fn arena(text: &str, k: usize) -> GameArena {
    GameArena::from_spec(&spec(text), false, k, 4096).unwrap()
}

pub const XIFFY: &str = "inputs x; outputs y; formula G (x <-> X y);";
pub const YIFFX: &str = "inputs x; outputs y; formula G (y <-> X x);";
pub const TRUE: &str = "inputs x; outputs y; formula true;";
pub const FALSE: &str = "inputs x; outputs y; formula false;";

/// Random formulas over variable 0 (`x`, environment) and 1 (`y`, system).
pub fn formula_strategy() -> impl Strategy<Value = Ltl> {
    let leaf = prop_oneof![Just(Ltl::prop(0)), Just(Ltl::prop(1)), Just(Ltl::True)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Ltl::not),
            inner.clone().prop_map(Ltl::next),
            inner.clone().prop_map(Ltl::eventually),
            inner.clone().prop_map(Ltl::always),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ltl::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Ltl::until(a, b)),
        ]
    })
}

/// Arena for `f` with `x` as input and `y` as output.
pub fn xy_arena(f: &Ltl, k: usize) -> GameArena {
    GameArena::from_spec(&Specification::new(&["x"], &["y"], f.clone()), false, k, 4096).unwrap()
}
