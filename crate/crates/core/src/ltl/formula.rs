use std::fmt;

/// Index of a proposition in the letter bit layout (environment variables
/// first, then system variables).
pub type VarId = usize;

/// LTL syntax tree.
///
/// The kernel is `Prop`, `Not`, `And`, `Next` and `Until`; `Or` and `Release`
/// are kept as nodes so that negation normal form stays closed under the
/// constructors. `F`, `G`, `->` and `<->` are expanded when built.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ltl {
    True,
    False,
    Prop(VarId),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
}

impl Ltl {
    pub fn prop(v: VarId) -> Ltl {
        Ltl::Prop(v)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Ltl) -> Ltl {
        Ltl::Not(Box::new(f))
    }

    pub fn and(f: Ltl, g: Ltl) -> Ltl {
        Ltl::And(Box::new(f), Box::new(g))
    }

    pub fn or(f: Ltl, g: Ltl) -> Ltl {
        Ltl::Or(Box::new(f), Box::new(g))
    }

    pub fn next(f: Ltl) -> Ltl {
        Ltl::Next(Box::new(f))
    }

    pub fn until(f: Ltl, g: Ltl) -> Ltl {
        Ltl::Until(Box::new(f), Box::new(g))
    }

    pub fn release(f: Ltl, g: Ltl) -> Ltl {
        Ltl::Release(Box::new(f), Box::new(g))
    }

    /// `F f` as `true U f`.
    pub fn eventually(f: Ltl) -> Ltl {
        Ltl::until(Ltl::True, f)
    }

    /// `G f` as `false R f`.
    pub fn always(f: Ltl) -> Ltl {
        Ltl::release(Ltl::False, f)
    }

    pub fn implies(f: Ltl, g: Ltl) -> Ltl {
        Ltl::or(Ltl::not(f), g)
    }

    pub fn iff(f: Ltl, g: Ltl) -> Ltl {
        Ltl::and(Ltl::implies(f.clone(), g.clone()), Ltl::implies(g, f))
    }

    /// Conjunction of a non-empty list, right-nested.
    pub fn conjunction(mut parts: Vec<Ltl>) -> Ltl {
        let Some(mut acc) = parts.pop() else {
            return Ltl::True;
        };
        while let Some(f) = parts.pop() {
            acc = Ltl::and(f, acc);
        }
        acc
    }

    /// Negation normal form: negations only on propositions, `R` as the
    /// dual of `U`.
    pub fn to_nnf(&self) -> Ltl {
        self.nnf(false)
    }

    fn nnf(&self, negate: bool) -> Ltl {
        match (self, negate) {
            (Ltl::True, false) | (Ltl::False, true) => Ltl::True,
            (Ltl::True, true) | (Ltl::False, false) => Ltl::False,
            (Ltl::Prop(v), false) => Ltl::Prop(*v),
            (Ltl::Prop(v), true) => Ltl::not(Ltl::Prop(*v)),
            (Ltl::Not(f), n) => f.nnf(!n),
            (Ltl::And(f, g), false) => Ltl::and(f.nnf(false), g.nnf(false)),
            (Ltl::And(f, g), true) => Ltl::or(f.nnf(true), g.nnf(true)),
            (Ltl::Or(f, g), false) => Ltl::or(f.nnf(false), g.nnf(false)),
            (Ltl::Or(f, g), true) => Ltl::and(f.nnf(true), g.nnf(true)),
            (Ltl::Next(f), n) => Ltl::next(f.nnf(n)),
            (Ltl::Until(f, g), false) => Ltl::until(f.nnf(false), g.nnf(false)),
            (Ltl::Until(f, g), true) => Ltl::release(f.nnf(true), g.nnf(true)),
            (Ltl::Release(f, g), false) => Ltl::release(f.nnf(false), g.nnf(false)),
            (Ltl::Release(f, g), true) => Ltl::until(f.nnf(true), g.nnf(true)),
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            Ltl::True | Ltl::False | Ltl::Prop(_) => true,
            Ltl::Not(f) => matches!(**f, Ltl::Prop(_)),
            Ltl::Next(f) => f.is_nnf(),
            Ltl::And(f, g) | Ltl::Or(f, g) | Ltl::Until(f, g) | Ltl::Release(f, g) => f.is_nnf() && g.is_nnf(),
        }
    }

    /// Maximal list of top-level conjuncts.
    pub fn decompose(&self) -> Vec<Ltl> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Ltl::And(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                other => out.push(other.clone()),
            }
        }
        out
    }

    /// Largest proposition index used, if any.
    pub fn max_var(&self) -> Option<VarId> {
        match self {
            Ltl::True | Ltl::False => None,
            Ltl::Prop(v) => Some(*v),
            Ltl::Not(f) | Ltl::Next(f) => f.max_var(),
            Ltl::And(f, g) | Ltl::Or(f, g) | Ltl::Until(f, g) | Ltl::Release(f, g) => f.max_var().max(g.max_var()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Ltl::True | Ltl::False | Ltl::Prop(_) => 1,
            Ltl::Not(f) | Ltl::Next(f) => 1 + f.size(),
            Ltl::And(f, g) | Ltl::Or(f, g) | Ltl::Until(f, g) | Ltl::Release(f, g) => 1 + f.size() + g.size(),
        }
    }

    /// Renders with the given proposition names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> DisplayLtl<'a> {
        DisplayLtl { f: self, names }
    }
}

pub struct DisplayLtl<'a> {
    f: &'a Ltl,
    names: &'a [String],
}

impl fmt::Display for DisplayLtl<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ltl(out, self.f, self.names)
    }
}

fn write_ltl(out: &mut fmt::Formatter<'_>, f: &Ltl, names: &[String]) -> fmt::Result {
    let sub = |out: &mut fmt::Formatter<'_>, g: &Ltl| -> fmt::Result {
        match g {
            Ltl::True | Ltl::False | Ltl::Prop(_) => write_ltl(out, g, names),
            _ => {
                write!(out, "(")?;
                write_ltl(out, g, names)?;
                write!(out, ")")
            }
        }
    };
    match f {
        Ltl::True => write!(out, "true"),
        Ltl::False => write!(out, "false"),
        Ltl::Prop(v) => match names.get(*v) {
            Some(n) => write!(out, "{n}"),
            None => write!(out, "p{v}"),
        },
        Ltl::Not(g) => {
            write!(out, "!")?;
            sub(out, g)
        }
        Ltl::Next(g) => {
            write!(out, "X ")?;
            sub(out, g)
        }
        Ltl::Until(a, b) if **a == Ltl::True => {
            write!(out, "F ")?;
            sub(out, b)
        }
        Ltl::Release(a, b) if **a == Ltl::False => {
            write!(out, "G ")?;
            sub(out, b)
        }
        Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
            let op = match f {
                Ltl::And(..) => "&&",
                Ltl::Or(..) => "||",
                Ltl::Until(..) => "U",
                _ => "R",
            };
            sub(out, a)?;
            write!(out, " {op} ")?;
            sub(out, b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Ltl {
        Ltl::prop(0)
    }
    fn b() -> Ltl {
        Ltl::prop(1)
    }

    #[test]
    fn nnf_until_dual() {
        let f = Ltl::not(Ltl::until(a(), b()));
        assert_eq!(f.to_nnf(), Ltl::release(Ltl::not(a()), Ltl::not(b())));
    }

    #[test]
    fn nnf_double_negation() {
        assert_eq!(Ltl::not(Ltl::not(a())).to_nnf(), a());
    }

    #[test]
    fn nnf_next_self_dual() {
        assert_eq!(Ltl::not(Ltl::next(a())).to_nnf(), Ltl::next(Ltl::not(a())));
    }

    #[test]
    fn decompose_flattens_top_level() {
        let c = Ltl::prop(2);
        let f = Ltl::and(Ltl::and(Ltl::always(a()), Ltl::eventually(b())), c.clone());
        assert_eq!(f.decompose(), vec![Ltl::always(a()), Ltl::eventually(b()), c]);
    }

    #[test]
    fn decompose_keeps_nested_and() {
        let f = Ltl::always(Ltl::and(a(), b()));
        assert_eq!(f.decompose(), vec![f.clone()]);
        let g = Ltl::until(a(), b());
        assert_eq!(g.decompose(), vec![g.clone()]);
    }

    #[test]
    fn display_uses_sugar() {
        let names = vec!["x".to_string(), "y".to_string()];
        let f = Ltl::always(Ltl::implies(a(), Ltl::next(b())));
        assert_eq!(f.display(&names).to_string(), "G ((!x) || (X y))");
    }
}
