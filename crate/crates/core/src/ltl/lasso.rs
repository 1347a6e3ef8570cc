use super::formula::Ltl;
use super::Letter;

/// The ultimately periodic word `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoTrace {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl LassoTrace {
    /// Panics if `cycle` is empty.
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be non-empty");
        LassoTrace { prefix, cycle }
    }

    /// Number of distinct positions (prefix plus one copy of the cycle).
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letter(&self, pos: usize) -> Letter {
        if pos < self.prefix.len() {
            self.prefix[pos]
        } else {
            self.cycle[pos - self.prefix.len()]
        }
    }

    /// Successor of a position on the folded lasso.
    pub fn succ(&self, pos: usize) -> usize {
        if pos + 1 < self.len() {
            pos + 1
        } else {
            self.prefix.len()
        }
    }

    /// Letter at an arbitrary (unfolded) time step.
    pub fn at(&self, t: usize) -> Letter {
        if t < self.prefix.len() {
            self.prefix[t]
        } else {
            self.cycle[(t - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Every lasso over `bits` propositions with bounded prefix and cycle
    /// lengths (cycle length at least 1).
    pub fn enumerate(bits: usize, max_prefix: usize, max_cycle: usize) -> Vec<LassoTrace> {
        let letters: Vec<Letter> = (0..(1u32 << bits)).collect();
        let words = |len: usize| -> Vec<Vec<Letter>> {
            let mut out: Vec<Vec<Letter>> = vec![vec![]];
            for _ in 0..len {
                out = out
                    .into_iter()
                    .flat_map(|w| {
                        letters.iter().map(move |&l| {
                            let mut w = w.clone();
                            w.push(l);
                            w
                        })
                    })
                    .collect();
            }
            out
        };
        let mut out = Vec::new();
        for p in 0..=max_prefix {
            for c in 1..=max_cycle {
                for prefix in words(p) {
                    for cycle in words(c) {
                        out.push(LassoTrace { prefix: prefix.clone(), cycle });
                    }
                }
            }
        }
        out
    }
}

/// Decides `prefix · cycle^ω ⊨ f`.
///
/// Truth values are computed per subformula over the folded positions.
/// `U` is a least fixpoint and `R` a greatest fixpoint of its one-step
/// unfolding; both stabilise after at most two backward passes.
pub fn eval_lasso(f: &Ltl, t: &LassoTrace) -> bool {
    eval_positions(f, t)[0]
}

fn eval_positions(f: &Ltl, t: &LassoTrace) -> Vec<bool> {
    let n = t.len();
    match f {
        Ltl::True => vec![true; n],
        Ltl::False => vec![false; n],
        Ltl::Prop(v) => (0..n).map(|i| t.letter(i) >> v & 1 == 1).collect(),
        Ltl::Not(g) => eval_positions(g, t).into_iter().map(|b| !b).collect(),
        Ltl::And(a, b) => {
            let (a, b) = (eval_positions(a, t), eval_positions(b, t));
            a.iter().zip(&b).map(|(x, y)| *x && *y).collect()
        }
        Ltl::Or(a, b) => {
            let (a, b) = (eval_positions(a, t), eval_positions(b, t));
            a.iter().zip(&b).map(|(x, y)| *x || *y).collect()
        }
        Ltl::Next(g) => {
            let g = eval_positions(g, t);
            (0..n).map(|i| g[t.succ(i)]).collect()
        }
        Ltl::Until(a, b) => {
            let (a, b) = (eval_positions(a, t), eval_positions(b, t));
            fixpoint(t, false, |i, next| b[i] || (a[i] && next))
        }
        Ltl::Release(a, b) => {
            let (a, b) = (eval_positions(a, t), eval_positions(b, t));
            fixpoint(t, true, |i, next| b[i] && (a[i] || next))
        }
    }
}

fn fixpoint(t: &LassoTrace, init: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let n = t.len();
    let mut val = vec![init; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let v = step(i, val[t.succ(i)]);
            if v != val[i] {
                val[i] = v;
                changed = true;
            }
        }
        if !changed {
            return val;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: Letter = 0b01;
    const Y: Letter = 0b10;

    #[test]
    fn always_holds_everywhere() {
        let f = Ltl::always(Ltl::prop(0));
        assert!(eval_lasso(&f, &LassoTrace::new(vec![], vec![X])));
        assert!(!eval_lasso(&f, &LassoTrace::new(vec![X], vec![X, 0])));
    }

    #[test]
    fn eventually_never() {
        let f = Ltl::eventually(Ltl::prop(1));
        assert!(!eval_lasso(&f, &LassoTrace::new(vec![0], vec![0])));
        assert!(eval_lasso(&f, &LassoTrace::new(vec![0], vec![0, Y])));
    }

    /// Unrolled check of G(x <-> X y) on prefix [{x}], cycle [{x,y}]:
    /// positions 0,1,2,... carry {x},{x,y},{x,y},...; every position has x
    /// and every successor has y.
    #[test]
    fn running_example_lasso() {
        let (x, y) = (Ltl::prop(0), Ltl::prop(1));
        let f = Ltl::always(Ltl::iff(x, Ltl::next(y)));
        let t = LassoTrace::new(vec![X], vec![X | Y]);
        let naive = (0..6).all(|i| {
            let xi = t.at(i) & X != 0;
            let yn = t.at(i + 1) & Y != 0;
            xi == yn
        });
        assert!(naive);
        assert!(eval_lasso(&f, &t));
        assert!(!eval_lasso(&f, &LassoTrace::new(vec![X], vec![X])));
    }

    #[test]
    fn until_needs_fulfilment_on_cycle() {
        let f = Ltl::until(Ltl::prop(0), Ltl::prop(1));
        assert!(!eval_lasso(&f, &LassoTrace::new(vec![], vec![X])));
        assert!(eval_lasso(&f, &LassoTrace::new(vec![X, X], vec![Y])));
    }

    #[test]
    fn enumerate_counts() {
        // 1 prop: prefixes of length 0..=1 (1 + 2), cycles 1..=2 (2 + 4).
        assert_eq!(LassoTrace::enumerate(1, 1, 2).len(), 3 * 6);
    }
}
