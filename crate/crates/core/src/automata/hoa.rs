//! HOA v1 subset: state-based co-Büchi (`Fin(0)`) acceptance with explicit
//! transition labels.

use std::fmt::Write as _;

use super::guard::{Cube, Guard};
use super::{AutomataError, Edge, Graph, Ucw};

pub fn emit_hoa(a: &Ucw) -> String {
    let g = &a.graph;
    let mut s = String::new();
    let _ = writeln!(s, "HOA: v1");
    let _ = writeln!(s, "States: {}", g.state_count());
    let _ = writeln!(s, "Start: {}", g.initial);
    let _ = write!(s, "AP: {}", g.aps.len());
    for ap in &g.aps {
        let _ = write!(s, " \"{ap}\"");
    }
    s.push('\n');
    let _ = writeln!(s, "acc-name: co-Buchi");
    let _ = writeln!(s, "Acceptance: 1 Fin(0)");
    let _ = writeln!(s, "properties: trans-labels explicit-labels state-acc");
    let _ = writeln!(s, "--BODY--");
    for (q, es) in g.edges.iter().enumerate() {
        if a.rejecting[q] {
            let _ = writeln!(s, "State: {q} {{0}}");
        } else {
            let _ = writeln!(s, "State: {q}");
        }
        for e in es {
            let _ = writeln!(s, "[{}] {}", e.guard.to_hoa(), e.dst);
        }
    }
    let _ = writeln!(s, "--END--");
    s
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Header(String),
    Int(usize),
    Str(String),
    Ident(String),
    Sym(char),
    BodyStart,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, AutomataError> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c == '/' && chars.get(i + 1) == Some(&'*') {
                let rest: String = chars[i..].iter().collect();
                match rest.find("*/") {
                    Some(end) => i += end + 2,
                    None => return Err(malformed(line, "unterminated comment")),
                }
            } else if c == '"' {
                let start = i + 1;
                i = start;
                while i < chars.len() && chars[i] != '"' {
                    if chars[i] == '\\' {
                        i += 1;
                    }
                    i += 1;
                }
                if i >= chars.len() {
                    return Err(malformed(line, "unterminated string"));
                }
                out.push((Tok::Str(chars[start..i].iter().collect()), line));
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| malformed(line, "integer out of range"))?;
                out.push((Tok::Int(n), line));
            } else if c.is_ascii_alphabetic() || c == '_' || c == '@' {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-' || chars[i] == '@')
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if chars.get(i) == Some(&':') {
                    i += 1;
                    out.push((Tok::Header(word), line));
                } else {
                    out.push((Tok::Ident(word), line));
                }
            } else if c == '-' && chars[i..].starts_with(&['-', '-', 'B', 'O', 'D', 'Y', '-', '-']) {
                out.push((Tok::BodyStart, line));
                i += 8;
            } else if c == '-' && chars[i..].starts_with(&['-', '-', 'E', 'N', 'D', '-', '-']) {
                out.push((Tok::End, line));
                i += 7;
            } else if "[]{}()!&|".contains(c) {
                out.push((Tok::Sym(c), line));
                i += 1;
            } else {
                return Err(malformed(line, &format!("unexpected character `{c}`")));
            }
        }
    }
    Ok(out)
}

fn malformed(line: usize, msg: &str) -> AutomataError {
    AutomataError::MalformedHoa { line, msg: msg.to_string() }
}

struct Cursor {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).or_else(|| self.toks.last()).map(|(_, l)| *l).unwrap_or(1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn int(&mut self) -> Result<usize, AutomataError> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(n),
            _ => Err(malformed(self.line(), "expected integer")),
        }
    }

    fn sym(&mut self, c: char) -> Result<(), AutomataError> {
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            _ => Err(malformed(self.line(), &format!("expected `{c}`"))),
        }
    }

    /// Skips tokens up to the next header or body marker.
    fn skip_header_values(&mut self) {
        while let Some(t) = self.peek() {
            if matches!(t, Tok::Header(_) | Tok::BodyStart) {
                break;
            }
            self.pos += 1;
        }
    }

    // label := conj ('|' conj)*
    fn label_or(&mut self, ap_map: &[usize]) -> Result<Guard, AutomataError> {
        let mut g = self.label_and(ap_map)?;
        while self.peek() == Some(&Tok::Sym('|')) {
            self.pos += 1;
            g = g.or(&self.label_and(ap_map)?);
        }
        Ok(g)
    }

    fn label_and(&mut self, ap_map: &[usize]) -> Result<Guard, AutomataError> {
        let mut g = self.label_atom(ap_map)?;
        while self.peek() == Some(&Tok::Sym('&')) {
            self.pos += 1;
            g = g.and(&self.label_atom(ap_map)?);
        }
        Ok(g)
    }

    fn label_atom(&mut self, ap_map: &[usize]) -> Result<Guard, AutomataError> {
        match self.next() {
            Some(Tok::Sym('!')) => Ok(self.label_atom(ap_map)?.not()),
            Some(Tok::Sym('(')) => {
                let g = self.label_or(ap_map)?;
                self.sym(')')?;
                Ok(g)
            }
            Some(Tok::Ident(w)) if w == "t" => Ok(Guard::tt()),
            Some(Tok::Ident(w)) if w == "f" => Ok(Guard::ff()),
            Some(Tok::Int(n)) => match ap_map.get(n) {
                Some(&v) => Ok(Guard::cube(Cube { pos: 1 << v, neg: 0 })),
                None => Err(malformed(self.line(), &format!("AP index {n} out of range"))),
            },
            Some(Tok::Ident(w)) if w.starts_with('@') => Err(malformed(self.line(), "label aliases are not supported")),
            _ => Err(malformed(self.line(), "malformed label expression")),
        }
    }
}

fn acceptance_is_cobuchi(toks: &[Tok]) -> bool {
    let fin0 = [Tok::Int(1), Tok::Ident("Fin".into()), Tok::Sym('('), Tok::Int(0), Tok::Sym(')')];
    toks == fin0
}

/// Names declared on the `AP:` header line, in index order.
pub fn hoa_ap_names(text: &str) -> Result<Vec<String>, AutomataError> {
    let mut c = Cursor { toks: lex(text)?, pos: 0 };
    loop {
        let line = c.line();
        match c.next() {
            Some(Tok::Header(h)) if h == "AP" => {
                let n = c.int()?;
                return (0..n)
                    .map(|_| match c.next() {
                        Some(Tok::Str(name)) => Ok(name),
                        _ => Err(malformed(line, "expected AP name string")),
                    })
                    .collect();
            }
            Some(Tok::BodyStart) | None => return Ok(Vec::new()),
            Some(_) => {}
        }
    }
}

/// Parses a co-Büchi HOA automaton. APs are matched by name against `aps`
/// (the specification's variables in letter bit order).
pub fn parse_hoa(text: &str, aps: &[String]) -> Result<Ucw, AutomataError> {
    let mut c = Cursor { toks: lex(text)?, pos: 0 };
    match (c.next(), c.next()) {
        (Some(Tok::Header(h)), Some(Tok::Ident(v))) if h == "HOA" && v == "v1" => {}
        _ => return Err(malformed(1, "expected `HOA: v1`")),
    }

    let mut states: Option<usize> = None;
    let mut start: Option<usize> = None;
    let mut ap_map: Option<Vec<usize>> = None;
    let mut acceptance_ok = false;
    let mut saw_acceptance = false;
    loop {
        let line = c.line();
        match c.next() {
            Some(Tok::BodyStart) => break,
            Some(Tok::Header(h)) => match h.as_str() {
                "States" => states = Some(c.int()?),
                "Start" => {
                    if start.is_some() {
                        return Err(malformed(line, "multiple initial states are not supported"));
                    }
                    start = Some(c.int()?);
                    if c.peek() == Some(&Tok::Sym('&')) {
                        return Err(malformed(line, "conjunctive initial states are not supported"));
                    }
                }
                "AP" => {
                    let n = c.int()?;
                    let mut map = Vec::with_capacity(n);
                    for _ in 0..n {
                        match c.next() {
                            Some(Tok::Str(name)) => match aps.iter().position(|a| *a == name) {
                                Some(v) => map.push(v),
                                None => return Err(AutomataError::UnknownAp(name)),
                            },
                            _ => return Err(malformed(line, "expected AP name string")),
                        }
                    }
                    ap_map = Some(map);
                }
                "acc-name" => {
                    let start = c.pos;
                    c.skip_header_values();
                    let words: Vec<String> = c.toks[start..c.pos]
                        .iter()
                        .map(|(t, _)| match t {
                            Tok::Ident(w) => w.clone(),
                            Tok::Int(n) => n.to_string(),
                            other => format!("{other:?}"),
                        })
                        .collect();
                    let name = words.join(" ");
                    if name != "co-Buchi" {
                        return Err(AutomataError::UnsupportedAcceptance(name));
                    }
                }
                "Acceptance" => {
                    let start = c.pos;
                    c.skip_header_values();
                    let toks: Vec<Tok> = c.toks[start..c.pos].iter().map(|(t, _)| t.clone()).collect();
                    saw_acceptance = true;
                    acceptance_ok = acceptance_is_cobuchi(&toks);
                    if !acceptance_ok {
                        return Err(AutomataError::UnsupportedAcceptance(format!("{toks:?}")));
                    }
                }
                _ => c.skip_header_values(),
            },
            _ => return Err(malformed(line, "expected header item or --BODY--")),
        }
    }
    if !saw_acceptance || !acceptance_ok {
        return Err(malformed(c.line(), "missing `Acceptance: 1 Fin(0)`"));
    }
    let ap_map = ap_map.unwrap_or_default();
    let start = start.ok_or_else(|| malformed(c.line(), "missing Start"))?;

    let mut edges: Vec<Vec<Edge>> = Vec::new();
    let mut rejecting: Vec<bool> = Vec::new();
    let mut current: Option<usize> = None;
    loop {
        let line = c.line();
        match c.next() {
            Some(Tok::End) => break,
            Some(Tok::Header(h)) if h == "State" => {
                let q = c.int()?;
                if edges.len() <= q {
                    edges.resize(q + 1, Vec::new());
                    rejecting.resize(q + 1, false);
                }
                if let Some(Tok::Str(_)) = c.peek() {
                    c.pos += 1;
                }
                if c.peek() == Some(&Tok::Sym('{')) {
                    c.pos += 1;
                    loop {
                        match c.next() {
                            Some(Tok::Int(0)) => rejecting[q] = true,
                            Some(Tok::Int(n)) => {
                                return Err(malformed(line, &format!("acceptance set {n} not declared")))
                            }
                            Some(Tok::Sym('}')) => break,
                            _ => return Err(malformed(line, "malformed acceptance marks")),
                        }
                    }
                }
                current = Some(q);
            }
            Some(Tok::Sym('[')) => {
                let q = current.ok_or_else(|| malformed(line, "edge before State"))?;
                let guard = c.label_or(&ap_map)?;
                c.sym(']')?;
                let dst = c.int()?;
                if c.peek() == Some(&Tok::Sym('&')) {
                    return Err(malformed(line, "universal branching is not supported"));
                }
                if c.peek() == Some(&Tok::Sym('{')) {
                    return Err(malformed(line, "transition-based acceptance is not supported"));
                }
                edges[q].push(Edge { guard, dst });
            }
            Some(Tok::Int(_)) => {
                return Err(malformed(line, "implicit labels are not supported"));
            }
            None => return Err(malformed(line, "missing --END--")),
            _ => return Err(malformed(line, "unexpected token in body")),
        }
    }

    let n = states.unwrap_or(edges.len()).max(edges.len());
    edges.resize(n, Vec::new());
    rejecting.resize(n, false);
    if start >= n {
        return Err(malformed(c.line(), "Start state out of range"));
    }
    if edges.iter().flatten().any(|e| e.dst >= n) {
        return Err(malformed(c.line(), "edge target out of range"));
    }
    Ok(Ucw { graph: Graph { aps: aps.to_vec(), initial: start, edges }, rejecting })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::ltl_to_ucw;
    use crate::ltl::Ltl;

    fn xy() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn round_trip_running_example() {
        let (x, y) = (Ltl::prop(0), Ltl::prop(1));
        let u = ltl_to_ucw(&Ltl::always(Ltl::iff(x, Ltl::next(y))), &xy(), 4096).unwrap();
        let back = parse_hoa(&emit_hoa(&u), &xy()).unwrap();
        assert_eq!(back, u);
        assert_eq!(hoa_ap_names(&emit_hoa(&u)).unwrap(), xy());
    }

    #[test]
    fn buchi_rejected() {
        let text = "HOA: v1\nStates: 1\nStart: 0\nAP: 0\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0 {0}\n[t] 0\n--END--\n";
        assert!(matches!(parse_hoa(text, &xy()), Err(AutomataError::UnsupportedAcceptance(_))));
        let text = text.replace("acc-name: Buchi\n", "");
        assert!(matches!(parse_hoa(&text, &xy()), Err(AutomataError::UnsupportedAcceptance(_))));
    }

    /// Two states: 0 waits, moves to the rejecting sink 1 on `!y` after `x`.
    #[test]
    fn handwritten_fixture() {
        let text = r#"HOA: v1
/* hand-written */
name: "toy"
States: 2
Start: 0
AP: 2 "y" "x"
acc-name: co-Buchi
Acceptance: 1 Fin(0)
properties: trans-labels explicit-labels state-acc
--BODY--
State: 0 "wait"
[!1 | 0] 0
[1 & !0] 1
State: 1 {0}
[t] 1
--END--
"#;
        let u = parse_hoa(text, &xy()).unwrap();
        assert_eq!(u.state_count(), 2);
        assert_eq!(u.rejecting_count(), 1);
        assert!(u.graph.is_complete());
        // AP 0 is "y" = bit 1, AP 1 is "x" = bit 0.
        assert_eq!(u.graph.successors(0, 0b01).collect::<Vec<_>>(), vec![1]);
        assert_eq!(u.graph.successors(0, 0b11).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn unknown_ap_and_malformed_header() {
        let text =
            "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"z\"\nAcceptance: 1 Fin(0)\n--BODY--\nState: 0\n[t] 0\n--END--\n";
        assert_eq!(parse_hoa(text, &xy()), Err(AutomataError::UnknownAp("z".into())));
        assert!(matches!(parse_hoa("HOA: v2\n", &xy()), Err(AutomataError::MalformedHoa { .. })));
    }
}
