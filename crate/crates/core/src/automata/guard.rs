use std::fmt;

use crate::ltl::Letter;

/// Conjunction of literals: every bit of `pos` set and every bit of `neg`
/// clear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    pub pos: u32,
    pub neg: u32,
}

impl Cube {
    pub const TRUE: Cube = Cube { pos: 0, neg: 0 };

    pub fn is_consistent(&self) -> bool {
        self.pos & self.neg == 0
    }

    pub fn holds(&self, letter: Letter) -> bool {
        letter & self.pos == self.pos && letter & self.neg == 0
    }

    pub fn meet(&self, other: &Cube) -> Option<Cube> {
        let c = Cube { pos: self.pos | other.pos, neg: self.neg | other.neg };
        c.is_consistent().then_some(c)
    }

    /// `self` implies `other` (every literal of `other` appears in `self`).
    pub fn implies(&self, other: &Cube) -> bool {
        self.pos & other.pos == other.pos && self.neg & other.neg == other.neg
    }
}

/// Propositional edge label in disjunctive normal form. The empty
/// disjunction is `false`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard {
    cubes: Vec<Cube>,
}

impl Guard {
    pub fn tt() -> Guard {
        Guard { cubes: vec![Cube::TRUE] }
    }

    pub fn ff() -> Guard {
        Guard { cubes: vec![] }
    }

    pub fn cube(c: Cube) -> Guard {
        Guard::from_cubes(vec![c])
    }

    pub fn var(v: usize) -> Guard {
        Guard::cube(Cube { pos: 1 << v, neg: 0 })
    }

    pub fn from_cubes(cubes: Vec<Cube>) -> Guard {
        let mut g = Guard { cubes };
        g.normalize();
        g
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn is_false(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn is_true(&self) -> bool {
        self.cubes.contains(&Cube::TRUE)
    }

    pub fn holds(&self, letter: Letter) -> bool {
        self.cubes.iter().any(|c| c.holds(letter))
    }

    pub fn or(&self, other: &Guard) -> Guard {
        let mut cubes = self.cubes.clone();
        cubes.extend_from_slice(&other.cubes);
        Guard::from_cubes(cubes)
    }

    pub fn and(&self, other: &Guard) -> Guard {
        let mut cubes = Vec::new();
        for a in &self.cubes {
            for b in &other.cubes {
                if let Some(c) = a.meet(b) {
                    cubes.push(c);
                }
            }
        }
        Guard::from_cubes(cubes)
    }

    pub fn not(&self) -> Guard {
        let mut acc = Guard::tt();
        for c in &self.cubes {
            let mut lits = Vec::new();
            for v in 0..32 {
                let bit = 1u32 << v;
                if c.pos & bit != 0 {
                    lits.push(Cube { pos: 0, neg: bit });
                }
                if c.neg & bit != 0 {
                    lits.push(Cube { pos: bit, neg: 0 });
                }
            }
            acc = acc.and(&Guard::from_cubes(lits));
            if acc.is_false() {
                break;
            }
        }
        acc
    }

    /// Drops inconsistent and subsumed cubes and sorts the rest.
    fn normalize(&mut self) {
        self.cubes.retain(Cube::is_consistent);
        self.cubes.sort();
        self.cubes.dedup();
        let cubes = std::mem::take(&mut self.cubes);
        for (i, c) in cubes.iter().enumerate() {
            let subsumed = cubes.iter().enumerate().any(|(j, d)| j != i && c.implies(d) && (c != d));
            if !subsumed {
                self.cubes.push(*c);
            }
        }
    }

    /// Bit mask of the variables mentioned.
    pub fn support(&self) -> u32 {
        self.cubes.iter().fold(0, |m, c| m | c.pos | c.neg)
    }

    /// HOA label syntax, e.g. `0&!1 | 2`, `t`, `f`.
    pub fn to_hoa(&self) -> String {
        if self.is_false() {
            return "f".into();
        }
        let parts: Vec<String> = self
            .cubes
            .iter()
            .map(|c| {
                let mut lits = Vec::new();
                for v in 0..32 {
                    let bit = 1u32 << v;
                    if c.pos & bit != 0 {
                        lits.push(format!("{v}"));
                    }
                    if c.neg & bit != 0 {
                        lits.push(format!("!{v}"));
                    }
                }
                if lits.is_empty() {
                    "t".to_string()
                } else {
                    lits.join("&")
                }
            })
            .collect();
        parts.join(" | ")
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> DisplayGuard<'a> {
        DisplayGuard { g: self, names }
    }
}

pub struct DisplayGuard<'a> {
    g: &'a Guard,
    names: &'a [String],
}

impl fmt::Display for DisplayGuard<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.g.is_false() {
            return write!(f, "false");
        }
        let name = |v: usize| self.names.get(v).cloned().unwrap_or_else(|| format!("p{v}"));
        let parts: Vec<String> = self
            .g
            .cubes
            .iter()
            .map(|c| {
                let mut lits = Vec::new();
                for v in 0..32 {
                    let bit = 1u32 << v;
                    if c.pos & bit != 0 {
                        lits.push(name(v));
                    }
                    if c.neg & bit != 0 {
                        lits.push(format!("!{}", name(v)));
                    }
                }
                if lits.is_empty() {
                    "true".to_string()
                } else {
                    lits.join(" & ")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" | "))
    }
}
