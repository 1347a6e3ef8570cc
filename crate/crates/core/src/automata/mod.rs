//! Büchi and universal co-Büchi word automata: LTL translation,
//! completion, dualization, HOA exchange, lasso acceptance and
//! rejecting-state distances.

mod guard;
mod hoa;
mod scc;
mod tableau;

use std::fmt::Write as _;

use thiserror::Error;

pub use guard::{Cube, Guard};
pub use hoa::{emit_hoa, hoa_ap_names, parse_hoa};
pub use tableau::ltl_to_nbw;

use crate::ltl::{LassoTrace, Ltl};

/// Default cap on automaton states produced by translation.
pub const DEFAULT_STATE_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomataError {
    #[error("translation too large: {states} states exceeds the cap of {cap}")]
    TooLarge { states: usize, cap: usize },
    #[error("tableau input is not in negation normal form")]
    NotNnf,
    #[error("HOA line {line}: {msg}")]
    MalformedHoa { line: usize, msg: String },
    #[error("unsupported acceptance condition: {0}")]
    UnsupportedAcceptance(String),
    #[error("atomic proposition `{0}` is not declared in the specification")]
    UnknownAp(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub guard: Guard,
    pub dst: usize,
}

/// Labeled transition structure shared by both automaton kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    /// Proposition names in letter bit order.
    pub aps: Vec<String>,
    pub initial: usize,
    /// Outgoing edges per state.
    pub edges: Vec<Vec<Edge>>,
}

impl Graph {
    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    pub fn successors(&self, q: usize, letter: u32) -> impl Iterator<Item = usize> + '_ {
        self.edges[q].iter().filter(move |e| e.guard.holds(letter)).map(|e| e.dst)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        self.edges
            .iter()
            .map(|es| {
                let mut v: Vec<usize> = es.iter().filter(|e| !e.guard.is_false()).map(|e| e.dst).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect()
    }

    /// True when every state has an enabled edge on every letter.
    pub fn is_complete(&self) -> bool {
        self.edges.iter().all(|es| {
            let union = es.iter().fold(Guard::ff(), |g, e| g.or(&e.guard));
            union.not().is_false()
        })
    }

    /// Keeps only `keep`-marked states, renumbering them in order.
    fn restrict(&self, keep: &[bool]) -> (Graph, Vec<usize>) {
        let mut map = vec![usize::MAX; keep.len()];
        let mut n = 0;
        for (q, &k) in keep.iter().enumerate() {
            if k {
                map[q] = n;
                n += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(q, _)| keep[*q])
            .map(|(_, es)| {
                es.iter().filter(|e| keep[e.dst]).map(|e| Edge { guard: e.guard.clone(), dst: map[e.dst] }).collect()
            })
            .collect();
        let g = Graph { aps: self.aps.clone(), initial: map[self.initial], edges };
        (g, map)
    }

    /// Product of the graph with a lasso; returns whether some reachable
    /// cycle of the product passes through a state satisfying `marked`.
    fn lasso_has_marked_cycle(&self, marked: &[bool], t: &LassoTrace) -> bool {
        let positions = t.len();
        let id = |q: usize, p: usize| q * positions + p;
        let total = self.state_count() * positions;
        let mut adj = vec![Vec::new(); total];
        let mut reach = vec![false; total];
        let start = id(self.initial, 0);
        reach[start] = true;
        let mut stack = vec![(self.initial, 0)];
        while let Some((q, p)) = stack.pop() {
            let letter = t.letter(p);
            let p2 = t.succ(p);
            for q2 in self.successors(q, letter) {
                let w = id(q2, p2);
                adj[id(q, p)].push(w);
                if !reach[w] {
                    reach[w] = true;
                    stack.push((q2, p2));
                }
            }
        }
        let (comp, cyclic) = scc::sccs(&adj);
        (0..total).any(|v| reach[v] && marked[v / positions] && cyclic[comp[v]])
    }

    pub fn to_dot(&self, marked: &[bool], title: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{title}\" {{");
        let _ = writeln!(s, "  rankdir=LR;");
        let _ = writeln!(s, "  init [shape=point];");
        for (q, &m) in marked.iter().enumerate().take(self.state_count()) {
            let shape = if m { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  {q} [shape={shape}];");
        }
        let _ = writeln!(s, "  init -> {};", self.initial);
        for (q, es) in self.edges.iter().enumerate() {
            for e in es {
                let _ = writeln!(s, "  {q} -> {} [label=\"{}\"];", e.dst, e.guard.display(&self.aps));
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Nondeterministic Büchi word automaton with state-based acceptance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nbw {
    pub graph: Graph,
    pub accepting: Vec<bool>,
}

impl Nbw {
    /// Drops acceptance marks of states on no cycle and removes states that
    /// cannot reach an accepting cycle. The initial state is always kept.
    /// Language preserving.
    pub fn simplified(&self) -> Nbw {
        let adj = self.graph.adjacency();
        let (comp, cyclic) = scc::sccs(&adj);
        let accepting: Vec<bool> = (0..adj.len()).map(|q| self.accepting[q] && cyclic[comp[q]]).collect();

        // Backward reachability from accepting cyclic states.
        let mut radj = vec![Vec::new(); adj.len()];
        for (q, succs) in adj.iter().enumerate() {
            for &w in succs {
                radj[w].push(q);
            }
        }
        let mut live = accepting.clone();
        let mut stack: Vec<usize> = (0..adj.len()).filter(|&q| live[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &radj[q] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }
        live[self.graph.initial] = true;
        let (graph, map) = self.graph.restrict(&live);
        let mut acc = vec![false; graph.state_count()];
        for (q, &m) in map.iter().enumerate() {
            if m != usize::MAX {
                acc[m] = accepting[q];
            }
        }
        Nbw { graph, accepting: acc }
    }

    /// Adds a non-accepting trap so every state has a successor on every
    /// letter. A lone edgeless non-accepting state becomes the trap itself.
    pub fn completed(&self) -> Nbw {
        let mut graph = self.graph.clone();
        let mut accepting = self.accepting.clone();
        let mut trap: Option<usize> = None;
        let n = graph.state_count();
        for (q, &acc) in accepting.iter().enumerate().take(n) {
            if graph.edges[q].is_empty() && !acc && trap.is_none() {
                graph.edges[q].push(Edge { guard: Guard::tt(), dst: q });
                trap = Some(q);
            }
        }
        for q in 0..n {
            let union = graph.edges[q].iter().fold(Guard::ff(), |g, e| g.or(&e.guard));
            let missing = union.not();
            if missing.is_false() {
                continue;
            }
            let t = *trap.get_or_insert_with(|| {
                graph.edges.push(vec![Edge { guard: Guard::tt(), dst: n }]);
                accepting.push(false);
                n
            });
            graph.edges[q].push(Edge { guard: missing, dst: t });
        }
        Nbw { graph, accepting }
    }

    pub fn to_dot(&self) -> String {
        self.graph.to_dot(&self.accepting, "nbw")
    }
}

/// Universal co-Büchi word automaton: accepts a word iff every run visits
/// rejecting states finitely often.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ucw {
    pub graph: Graph,
    pub rejecting: Vec<bool>,
}

impl Ucw {
    pub fn state_count(&self) -> usize {
        self.graph.state_count()
    }

    pub fn rejecting_count(&self) -> usize {
        self.rejecting.iter().filter(|&&r| r).count()
    }

    pub fn to_dot(&self) -> String {
        self.graph.to_dot(&self.rejecting, "ucw")
    }
}

/// Some run of `a` on the lasso visits accepting states infinitely often.
pub fn nbw_accepts_lasso(a: &Nbw, t: &LassoTrace) -> bool {
    a.graph.lasso_has_marked_cycle(&a.accepting, t)
}

/// No run of `a` on the lasso visits rejecting states infinitely often.
pub fn ucw_accepts_lasso(a: &Ucw, t: &LassoTrace) -> bool {
    !a.graph.lasso_has_marked_cycle(&a.rejecting, t)
}

/// Reads the structure of an NBW universally with accepting states turned
/// rejecting. Expects a complete automaton (see [`Nbw::completed`]).
pub fn dualize(b: Nbw) -> Ucw {
    Ucw { graph: b.graph, rejecting: b.accepting }
}

/// LTL to UCW: translate `¬f` to a Büchi automaton, complete it, dualize.
pub fn ltl_to_ucw(f: &Ltl, aps: &[String], cap: usize) -> Result<Ucw, AutomataError> {
    let neg = Ltl::not(f.clone()).to_nnf();
    let nbw = ltl_to_nbw(&neg, aps, cap)?.completed();
    if nbw.graph.state_count() > cap {
        return Err(AutomataError::TooLarge { states: nbw.graph.state_count(), cap });
    }
    Ok(dualize(nbw))
}

/// Shortest nontrivial edge-path length from each state to a rejecting
/// state; `None` when no rejecting state is reachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectDistance(pub Vec<Option<u32>>);

impl RejectDistance {
    pub fn get(&self, q: usize) -> Option<u32> {
        self.0[q]
    }

    /// `1 / (d(q) + 1)`, zero at infinite distance.
    pub fn inverse(&self, q: usize) -> f64 {
        match self.0[q] {
            Some(d) => 1.0 / (d as f64 + 1.0),
            None => 0.0,
        }
    }
}

pub fn reject_distances(a: &Ucw) -> RejectDistance {
    let adj = a.graph.adjacency();
    let n = adj.len();
    let mut radj = vec![Vec::new(); n];
    for (q, succs) in adj.iter().enumerate() {
        for &w in succs {
            radj[w].push(q);
        }
    }
    // Distance allowing the empty path, by BFS from the rejecting states.
    let mut d0: Vec<Option<u32>> = vec![None; n];
    let mut queue = std::collections::VecDeque::new();
    for (q, d) in d0.iter_mut().enumerate() {
        if a.rejecting[q] {
            *d = Some(0);
            queue.push_back(q);
        }
    }
    while let Some(q) = queue.pop_front() {
        let dq = d0[q].unwrap();
        for &p in &radj[q] {
            if d0[p].is_none() {
                d0[p] = Some(dq + 1);
                queue.push_back(p);
            }
        }
    }
    let d = (0..n).map(|q| adj[q].iter().filter_map(|&w| d0[w]).min().map(|m| m + 1)).collect();
    RejectDistance(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    fn ucw(edges: Vec<Vec<(Guard, usize)>>, rejecting: Vec<bool>) -> Ucw {
        Ucw {
            graph: Graph {
                aps: names(1),
                initial: 0,
                edges: edges
                    .into_iter()
                    .map(|es| es.into_iter().map(|(guard, dst)| Edge { guard, dst }).collect())
                    .collect(),
            },
            rejecting,
        }
    }

    #[test]
    fn nbw_lasso_trivial_cases() {
        let all = ltl_to_nbw(&Ltl::True, &names(1), 16).unwrap();
        let none = ltl_to_nbw(&Ltl::False, &names(1), 16).unwrap();
        for t in LassoTrace::enumerate(1, 1, 2) {
            assert!(nbw_accepts_lasso(&all, &t));
            assert!(!nbw_accepts_lasso(&none, &t));
        }
    }

    #[test]
    fn nbw_lasso_always() {
        let g = ltl_to_nbw(&Ltl::always(Ltl::prop(0)), &names(1), 16).unwrap();
        assert!(nbw_accepts_lasso(&g, &LassoTrace::new(vec![], vec![1])));
        assert!(!nbw_accepts_lasso(&g, &LassoTrace::new(vec![], vec![0])));
    }

    #[test]
    fn dual_of_false_accepts_everything() {
        let b = ltl_to_nbw(&Ltl::False, &names(1), 16).unwrap().completed();
        assert_eq!(b.graph.state_count(), 1);
        assert!(!b.accepting[0]);
        let u = dualize(b);
        assert!(u.graph.is_complete());
        for t in LassoTrace::enumerate(1, 2, 2) {
            assert!(ucw_accepts_lasso(&u, &t));
        }
    }

    #[test]
    fn dual_flips_acceptance() {
        let f = Ltl::not(Ltl::always(Ltl::prop(0))).to_nnf();
        let b = ltl_to_nbw(&f, &names(1), 16).unwrap().completed();
        let u = dualize(b.clone());
        assert!(u.graph.is_complete());
        for t in LassoTrace::enumerate(1, 2, 2) {
            assert_ne!(nbw_accepts_lasso(&b, &t), ucw_accepts_lasso(&u, &t));
            let always_a = (0..t.len()).all(|i| t.letter(i) & 1 == 1);
            assert_eq!(ucw_accepts_lasso(&u, &t), always_a);
        }
    }

    #[test]
    fn translated_ucws_are_complete() {
        let (x, y) = (Ltl::prop(0), Ltl::prop(1));
        for f in [
            Ltl::True,
            Ltl::False,
            Ltl::always(Ltl::iff(x.clone(), Ltl::next(y.clone()))),
            Ltl::always(Ltl::implies(x, Ltl::eventually(y))),
        ] {
            let u = ltl_to_ucw(&f, &names(2), 4096).unwrap();
            assert!(u.graph.is_complete(), "{f:?}");
        }
    }

    #[test]
    fn distances_direct_edge_and_self_loop() {
        // 0 -> 1, 1 rejecting with self-loop
        let u = ucw(vec![vec![(Guard::tt(), 1)], vec![(Guard::tt(), 1)]], vec![false, true]);
        let d = reject_distances(&u);
        assert_eq!(d.0, vec![Some(1), Some(1)]);
    }

    #[test]
    fn distances_chain() {
        // 0 -> 1 -> 2 (rejecting, no outgoing), 3 unreachable to rejecting
        let u = ucw(
            vec![vec![(Guard::tt(), 1)], vec![(Guard::tt(), 2)], vec![], vec![(Guard::tt(), 3)]],
            vec![false, false, true, false],
        );
        let d = reject_distances(&u);
        assert_eq!(d.0, vec![Some(2), Some(1), None, None]);
        assert_eq!(d.inverse(3), 0.0);
        assert_eq!(d.inverse(1), 0.5);
    }

    #[test]
    fn distances_triangle_property() {
        let (x, y) = (Ltl::prop(0), Ltl::prop(1));
        let f = Ltl::and(
            Ltl::always(Ltl::implies(x.clone(), Ltl::eventually(y.clone()))),
            Ltl::always(Ltl::iff(y, Ltl::next(x))),
        );
        let u = ltl_to_ucw(&f, &names(2), 4096).unwrap();
        let d = reject_distances(&u);
        let adj = u.graph.adjacency();
        for (q, succ) in adj.iter().enumerate() {
            let best = succ.iter().filter_map(|&w| if u.rejecting[w] { Some(1) } else { d.0[w].map(|v| v + 1) }).min();
            assert_eq!(d.0[q], best, "state {q}");
        }
    }
}
