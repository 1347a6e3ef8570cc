//! Obligation-set tableau from NNF LTL to a Büchi automaton.
//!
//! States of the intermediate automaton are sets of NNF formulas that must
//! hold from the current position. Expanding a set yields alternatives made
//! of a literal cube for the current letter, the obligations for the next
//! position, and the until subformulas whose fulfilment was postponed. An
//! edge is accepting for `a U b` when it does not postpone it; the
//! resulting generalized condition is then degeneralized with a level
//! counter.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::guard::{Cube, Guard};
use super::{AutomataError, Edge, Graph, Nbw};
use crate::ltl::Ltl;

type Obligations = BTreeSet<Ltl>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Alt {
    cube: Cube,
    next: Obligations,
    postponed: u64,
}

struct Expander {
    untils: HashMap<Ltl, usize>,
    memo: HashMap<Ltl, Vec<Alt>>,
}

impl Expander {
    fn new(f: &Ltl) -> Result<Self, AutomataError> {
        let mut untils = HashMap::new();
        collect_untils(f, &mut untils);
        if untils.len() > 64 {
            return Err(AutomataError::TooLarge { states: untils.len(), cap: 64 });
        }
        Ok(Expander { untils, memo: HashMap::new() })
    }

    fn expand(&mut self, f: &Ltl) -> Vec<Alt> {
        if let Some(a) = self.memo.get(f) {
            return a.clone();
        }
        let unit = |cube: Cube| Alt { cube, next: Obligations::new(), postponed: 0 };
        let alts = match f {
            Ltl::True => vec![unit(Cube::TRUE)],
            Ltl::False => vec![],
            Ltl::Prop(v) => vec![unit(Cube { pos: 1 << v, neg: 0 })],
            Ltl::Not(g) => match **g {
                Ltl::Prop(v) => vec![unit(Cube { pos: 0, neg: 1 << v })],
                _ => panic!("tableau input must be in negation normal form"),
            },
            Ltl::And(a, b) => {
                let (a, b) = (self.expand(a), self.expand(b));
                product(&a, &b)
            }
            Ltl::Or(a, b) => {
                let mut v = self.expand(a);
                v.extend(self.expand(b));
                v
            }
            Ltl::Next(g) => {
                let mut next = Obligations::new();
                insert_obligation(&mut next, g);
                vec![Alt { cube: Cube::TRUE, next, postponed: 0 }]
            }
            Ltl::Until(a, b) => {
                let id = self.untils[f];
                let mut v = self.expand(b);
                let mut later = Obligations::new();
                insert_obligation(&mut later, f);
                let stay = [Alt { cube: Cube::TRUE, next: later, postponed: 1 << id }];
                let ea = self.expand(a);
                v.extend(product(&ea, &stay));
                v
            }
            Ltl::Release(a, b) => {
                let (ea, eb) = (self.expand(a), self.expand(b));
                let mut v = product(&ea, &eb);
                let mut later = Obligations::new();
                insert_obligation(&mut later, f);
                let stay = [Alt { cube: Cube::TRUE, next: later, postponed: 0 }];
                v.extend(product(&eb, &stay));
                v
            }
        };
        let alts = simplify(alts);
        self.memo.insert(f.clone(), alts.clone());
        alts
    }

    fn expand_set(&mut self, set: &Obligations) -> Vec<Alt> {
        let mut acc = vec![Alt { cube: Cube::TRUE, next: Obligations::new(), postponed: 0 }];
        for f in set {
            let e = self.expand(f);
            acc = simplify(product(&acc, &e));
            if acc.is_empty() {
                break;
            }
        }
        acc
    }
}

fn collect_untils(f: &Ltl, out: &mut HashMap<Ltl, usize>) {
    match f {
        Ltl::True | Ltl::False | Ltl::Prop(_) => {}
        Ltl::Not(g) | Ltl::Next(g) => collect_untils(g, out),
        Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Release(a, b) => {
            collect_untils(a, out);
            collect_untils(b, out);
        }
        Ltl::Until(a, b) => {
            collect_untils(a, out);
            collect_untils(b, out);
            let n = out.len();
            out.entry(f.clone()).or_insert(n);
        }
    }
}

fn insert_obligation(set: &mut Obligations, f: &Ltl) {
    match f {
        Ltl::True => {}
        Ltl::And(a, b) => {
            insert_obligation(set, a);
            insert_obligation(set, b);
        }
        other => {
            set.insert(other.clone());
        }
    }
}

fn product(a: &[Alt], b: &[Alt]) -> Vec<Alt> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            if let Some(cube) = x.cube.meet(&y.cube) {
                let mut next = x.next.clone();
                next.extend(y.next.iter().cloned());
                out.push(Alt { cube, next, postponed: x.postponed | y.postponed });
            }
        }
    }
    out
}

/// Removes duplicates and alternatives dominated by one with a weaker
/// cube, fewer obligations and fewer postponements.
fn simplify(mut alts: Vec<Alt>) -> Vec<Alt> {
    alts.retain(|a| !a.next.contains(&Ltl::False));
    alts.sort();
    alts.dedup();
    let mut keep = vec![true; alts.len()];
    for i in 0..alts.len() {
        for j in 0..alts.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (a, b) = (&alts[i], &alts[j]);
            let dominated = a.cube.implies(&b.cube) && b.next.is_subset(&a.next) && b.postponed & !a.postponed == 0;
            if dominated {
                keep[i] = false;
                break;
            }
        }
    }
    alts.into_iter().zip(keep).filter_map(|(a, k)| k.then_some(a)).collect()
}

/// Translates an NNF formula into a state-based Büchi automaton over
/// `aps` (names in letter bit order).
pub fn ltl_to_nbw(f: &Ltl, aps: &[String], cap: usize) -> Result<Nbw, AutomataError> {
    if !f.is_nnf() {
        return Err(AutomataError::NotNnf);
    }
    let mut exp = Expander::new(f)?;
    let levels = exp.untils.len();

    // Generalized automaton over obligation sets.
    let mut init = Obligations::new();
    insert_obligation(&mut init, f);
    let mut ids: BTreeMap<Obligations, usize> = BTreeMap::new();
    let mut sets = vec![init.clone()];
    ids.insert(init, 0);
    let mut gen_edges: Vec<Vec<(Cube, usize, u64)>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(q) = queue.pop_front() {
        let set = sets[q].clone();
        let mut out = Vec::new();
        for alt in exp.expand_set(&set) {
            let dst = match ids.get(&alt.next) {
                Some(&d) => d,
                None => {
                    let d = sets.len();
                    if d >= cap {
                        return Err(AutomataError::TooLarge { states: d + 1, cap });
                    }
                    ids.insert(alt.next.clone(), d);
                    sets.push(alt.next.clone());
                    queue.push_back(d);
                    d
                }
            };
            out.push((alt.cube, dst, alt.postponed));
        }
        if gen_edges.len() <= q {
            gen_edges.resize(q + 1, Vec::new());
        }
        gen_edges[q] = out;
    }
    gen_edges.resize(sets.len(), Vec::new());

    // Degeneralize: state (q, level); level == `levels` marks acceptance.
    let mut dids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut dstates = vec![(0usize, 0usize)];
    dids.insert((0, 0), 0);
    let mut edges: Vec<Vec<Edge>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(d) = queue.pop_front() {
        let (q, lvl) = dstates[d];
        let start = if lvl == levels { 0 } else { lvl };
        let mut by_dst: BTreeMap<usize, Vec<Cube>> = BTreeMap::new();
        for &(cube, q2, postponed) in &gen_edges[q] {
            let mut l = start;
            while l < levels && postponed & (1 << l) == 0 {
                l += 1;
            }
            let key = (q2, l);
            let t = match dids.get(&key) {
                Some(&t) => t,
                None => {
                    let t = dstates.len();
                    if t >= cap {
                        return Err(AutomataError::TooLarge { states: t + 1, cap });
                    }
                    dids.insert(key, t);
                    dstates.push(key);
                    queue.push_back(t);
                    t
                }
            };
            by_dst.entry(t).or_default().push(cube);
        }
        if edges.len() <= d {
            edges.resize(d + 1, Vec::new());
        }
        edges[d] = by_dst.into_iter().map(|(dst, cubes)| Edge { guard: Guard::from_cubes(cubes), dst }).collect();
    }
    edges.resize(dstates.len(), Vec::new());
    let accepting = dstates.iter().map(|&(_, l)| l == levels).collect();

    let nbw = Nbw { graph: Graph { aps: aps.to_vec(), initial: 0, edges }, accepting };
    Ok(nbw.simplified())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::nbw_accepts_lasso;
    use crate::ltl::{eval_lasso, LassoTrace};

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    fn agrees(f: &Ltl, bits: usize) {
        let nbw = ltl_to_nbw(&f.to_nnf(), &names(bits), 4096).unwrap();
        for t in LassoTrace::enumerate(bits, 2, 2) {
            assert_eq!(nbw_accepts_lasso(&nbw, &t), eval_lasso(f, &t), "formula {f:?} lasso {t:?}");
        }
    }

    #[test]
    fn true_is_single_accepting_loop() {
        let nbw = ltl_to_nbw(&Ltl::True, &names(1), 4096).unwrap();
        assert_eq!(nbw.graph.state_count(), 1);
        assert!(nbw.accepting[0]);
        assert_eq!(nbw.graph.edges[0].len(), 1);
        assert!(nbw.graph.edges[0][0].guard.is_true());
        assert_eq!(nbw.graph.edges[0][0].dst, 0);
    }

    #[test]
    fn always_a_is_single_state() {
        let f = Ltl::always(Ltl::prop(0));
        let nbw = ltl_to_nbw(&f.to_nnf(), &names(1), 4096).unwrap();
        assert_eq!(nbw.graph.state_count(), 1);
        assert!(nbw.accepting[0]);
        assert_eq!(nbw.graph.edges[0][0].guard, Guard::var(0));
        agrees(&f, 1);
    }

    #[test]
    fn negated_running_example_is_small() {
        let (x, y) = (Ltl::prop(0), Ltl::prop(1));
        let f = Ltl::not(Ltl::always(Ltl::iff(x, Ltl::next(y))));
        let nbw = ltl_to_nbw(&f.to_nnf(), &names(2), 4096).unwrap();
        assert!(nbw.graph.state_count() <= 8, "{} states", nbw.graph.state_count());
        agrees(&f, 2);
    }

    #[test]
    fn liveness_formulas() {
        let (a, b) = (Ltl::prop(0), Ltl::prop(1));
        agrees(&Ltl::always(Ltl::eventually(a.clone())), 1);
        agrees(&Ltl::eventually(Ltl::always(a.clone())), 1);
        agrees(&Ltl::and(Ltl::always(Ltl::eventually(a.clone())), Ltl::always(Ltl::eventually(b.clone()))), 2);
        agrees(&Ltl::always(Ltl::implies(a.clone(), Ltl::eventually(b.clone()))), 2);
        agrees(&Ltl::until(a.clone(), Ltl::release(b, a)), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let f = Ltl::always(Ltl::eventually(Ltl::prop(0)));
        let err = ltl_to_nbw(&f, &names(1), 1).unwrap_err();
        assert!(matches!(err, AutomataError::TooLarge { cap: 1, .. }));
    }
}
