//! Reader for the `.spec` text format:
//!
//! ```text
//! # comment
//! inputs r1, r2;
//! outputs g1, g2;
//! formula G (r1 -> F g1) && G (r2 -> F g2);
//! ```
//!
//! Several `formula` statements are conjoined in order.

use std::collections::HashMap;

use thiserror::Error;

use super::formula::Ltl;
use super::{Proposition, Specification, VarKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: undeclared proposition `{name}`")]
    Undeclared { name: String, line: usize, col: usize },
    #[error("{line}:{col}: duplicate declaration of `{name}`")]
    Duplicate { name: String, line: usize, col: usize },
    #[error("missing `{0}` section")]
    MissingSection(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Semi,
    Comma,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let adv = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => adv(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                let word: String = chars[start..i].iter().collect();
                out.push(Token { tok: Tok::Ident(word), line: l0, col: c0 });
            }
            _ => {
                let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
                let (tok, n) = if rest.starts_with("<->") {
                    (Tok::Iff, 3)
                } else if rest.starts_with("->") {
                    (Tok::Implies, 2)
                } else if rest.starts_with("&&") {
                    (Tok::And, 2)
                } else if rest.starts_with("||") {
                    (Tok::Or, 2)
                } else {
                    match c {
                        '!' => (Tok::Not, 1),
                        '(' => (Tok::LParen, 1),
                        ')' => (Tok::RParen, 1),
                        ';' => (Tok::Semi, 1),
                        ',' => (Tok::Comma, 1),
                        _ => return Err(ParseError::Syntax { line, col, msg: format!("unexpected character `{c}`") }),
                    }
                };
                adv(n, &mut i, &mut col);
                out.push(Token { tok, line: l0, col: c0 });
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

const KEYWORDS: &[&str] = &["X", "U", "R", "F", "G", "true", "false", "inputs", "outputs", "formula"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    names: HashMap<String, usize>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::Syntax { line: t.line, col: t.col, msg: msg.into() })
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == w)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn decl_list(&mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        if self.peek().tok == Tok::Semi {
            self.bump();
            return Ok(out);
        }
        loop {
            let t = self.bump();
            match &t.tok {
                Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => out.push(t),
                _ => {
                    return Err(ParseError::Syntax {
                        line: t.line,
                        col: t.col,
                        msg: "expected proposition name".into(),
                    })
                }
            }
            match self.bump().tok {
                Tok::Comma => continue,
                Tok::Semi => return Ok(out),
                _ => {
                    let t = &self.toks[self.pos - 1];
                    return Err(ParseError::Syntax { line: t.line, col: t.col, msg: "expected `,` or `;`".into() });
                }
            }
        }
    }

    // expr := or (('->' | '<->') expr)?
    fn expr(&mut self) -> Result<Ltl, ParseError> {
        let lhs = self.or()?;
        match self.peek().tok {
            Tok::Implies => {
                self.bump();
                Ok(Ltl::implies(lhs, self.expr()?))
            }
            Tok::Iff => {
                self.bump();
                Ok(Ltl::iff(lhs, self.expr()?))
            }
            _ => Ok(lhs),
        }
    }

    fn or(&mut self) -> Result<Ltl, ParseError> {
        let mut f = self.and()?;
        while self.peek().tok == Tok::Or {
            self.bump();
            f = Ltl::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Ltl, ParseError> {
        let mut f = self.temporal()?;
        while self.peek().tok == Tok::And {
            self.bump();
            f = Ltl::and(f, self.temporal()?);
        }
        Ok(f)
    }

    // temporal := unary (('U' | 'R') temporal)?
    fn temporal(&mut self) -> Result<Ltl, ParseError> {
        let lhs = self.unary()?;
        if self.is_word("U") {
            self.bump();
            Ok(Ltl::until(lhs, self.temporal()?))
        } else if self.is_word("R") {
            self.bump();
            Ok(Ltl::release(lhs, self.temporal()?))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Ltl, ParseError> {
        if self.peek().tok == Tok::Not {
            self.bump();
            return Ok(Ltl::not(self.unary()?));
        }
        if self.is_word("X") {
            self.bump();
            return Ok(Ltl::next(self.unary()?));
        }
        if self.is_word("F") {
            self.bump();
            return Ok(Ltl::eventually(self.unary()?));
        }
        if self.is_word("G") {
            self.bump();
            return Ok(Ltl::always(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Ltl, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::LParen => {
                self.bump();
                let f = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(w) if w == "true" => {
                self.bump();
                Ok(Ltl::True)
            }
            Tok::Ident(w) if w == "false" => {
                self.bump();
                Ok(Ltl::False)
            }
            Tok::Ident(w) if !KEYWORDS.contains(&w.as_str()) => {
                self.bump();
                match self.names.get(w) {
                    Some(&v) => Ok(Ltl::Prop(v)),
                    None => Err(ParseError::Undeclared { name: w.clone(), line: t.line, col: t.col }),
                }
            }
            Tok::Eof => self.err("unexpected end of input"),
            _ => self.err("expected formula"),
        }
    }
}

/// Parses a bare formula against an existing variable layout.
pub fn parse_formula(text: &str, spec: &Specification) -> Result<Ltl, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, names: spec.name_map() };
    let f = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return p.err("trailing input after formula");
    }
    Ok(f)
}

pub fn parse_spec(text: &str) -> Result<Specification, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, names: HashMap::new() };
    let mut inputs: Option<Vec<Token>> = None;
    let mut outputs: Option<Vec<Token>> = None;
    let mut formula_spans = Vec::new();

    // Declarations may appear in any order, so formulas are parsed in a
    // second pass once every name is known.
    while p.peek().tok != Tok::Eof {
        if p.is_word("inputs") || p.is_word("outputs") {
            let is_inputs = p.is_word("inputs");
            p.bump();
            let slot = if is_inputs { &mut inputs } else { &mut outputs };
            if slot.is_some() {
                return p.err(format!("`{}` declared twice", if is_inputs { "inputs" } else { "outputs" }));
            }
            *slot = Some(p.decl_list()?);
        } else if p.is_word("formula") {
            p.bump();
            let start = p.pos;
            let mut depth = 0usize;
            while !(p.peek().tok == Tok::Semi && depth == 0) {
                match p.peek().tok {
                    Tok::LParen => depth += 1,
                    Tok::RParen => depth = depth.saturating_sub(1),
                    Tok::Eof => return p.err("expected `;` after formula"),
                    _ => {}
                }
                p.bump();
            }
            formula_spans.push((start, p.pos));
            p.bump();
        } else {
            return p.err("expected `inputs`, `outputs` or `formula`");
        }
    }

    let inputs = inputs.ok_or(ParseError::MissingSection("inputs"))?;
    let outputs = outputs.ok_or(ParseError::MissingSection("outputs"))?;
    if formula_spans.is_empty() {
        return Err(ParseError::MissingSection("formula"));
    }

    let mut env_vars = Vec::new();
    let mut sys_vars = Vec::new();
    for (decls, kind) in [(&inputs, VarKind::Environment), (&outputs, VarKind::System)] {
        for t in decls {
            let Tok::Ident(name) = &t.tok else { unreachable!() };
            if p.names.contains_key(name) {
                return Err(ParseError::Duplicate { name: name.clone(), line: t.line, col: t.col });
            }
            let idx = p.names.len();
            p.names.insert(name.clone(), idx);
            let prop = Proposition { name: name.clone(), kind };
            match kind {
                VarKind::Environment => env_vars.push(prop),
                VarKind::System => sys_vars.push(prop),
            }
        }
    }

    let mut parts = Vec::new();
    for (start, end) in formula_spans {
        let mut toks = p.toks[start..end].to_vec();
        let last = p.toks[end].clone();
        toks.push(Token { tok: Tok::Eof, line: last.line, col: last.col });
        let mut sub = Parser { toks, pos: 0, names: p.names.clone() };
        let f = sub.expr()?;
        if sub.peek().tok != Tok::Eof {
            return sub.err("unexpected token in formula");
        }
        parts.push(f);
    }

    Ok(Specification { env_vars, sys_vars, formula: Ltl::conjunction(parts) })
}
