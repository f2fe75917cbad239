//! Prenex quantified boolean formulas.
//!
//! Text grammar:
//!
//! ```text
//! qbf     := quant+ ':' or
//! quant   := ('exists' | 'forall') var
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '!' unary | '(' or ')' | var
//! var     := 'x' digits
//! ```

mod compile;

use std::fmt;

use crate::error::{Error, Result};

pub use compile::{
    compile_qbf, compile_qbf_with_budget, qbf_result, variable_direction, BLOCK_EVALUATE, BLOCK_FORMULA,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// Formula over variables, each named by its quantifier level (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn negate(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Operator depth; a lone variable has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::Not(a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Number of nodes in the operator tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) => 1,
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn eval(&self, values: &[bool]) -> bool {
        match self {
            Formula::Var(k) => values[*k],
            Formula::Not(a) => !a.eval(values),
            Formula::And(a, b) => a.eval(values) && b.eval(values),
            Formula::Or(a, b) => a.eval(values) || b.eval(values),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QbfInstance {
    /// Quantifier kind and source variable number, outermost first.
    pub quantifiers: Vec<(Quantifier, usize)>,
    pub formula: Formula,
}

impl QbfInstance {
    pub fn n(&self) -> usize {
        self.quantifiers.len()
    }

    pub fn d(&self) -> usize {
        self.formula.depth()
    }

    /// Instance whose variable `k` is `x{k+1}`.
    pub fn new(kinds: &[Quantifier], formula: Formula) -> Self {
        QbfInstance {
            quantifiers: kinds.iter().enumerate().map(|(k, &q)| (q, k + 1)).collect(),
            formula,
        }
    }
}

struct FormulaText<'a>(&'a Formula, &'a [(Quantifier, usize)]);

impl<'a> fmt::Display for FormulaText<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |x: &'a Formula| FormulaText(x, self.1);
        match self.0 {
            Formula::Var(k) => write!(f, "x{}", self.1[*k].1),
            Formula::Not(a) => write!(f, "!{}", sub(a)),
            Formula::And(a, b) => write!(f, "({} & {})", sub(a), sub(b)),
            Formula::Or(a, b) => write!(f, "({} | {})", sub(a), sub(b)),
        }
    }
}

impl fmt::Display for QbfInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, v) in &self.quantifiers {
            let kw = match q {
                Quantifier::Forall => "forall",
                Quantifier::Exists => "exists",
            };
            write!(f, "{kw} x{v} ")?;
        }
        write!(f, ": {}", FormulaText(&self.formula, &self.quantifiers))
    }
}

/// Brute-force evaluation by recursion over the quantifier prefix.
pub fn eval_qbf_oracle(q: &QbfInstance) -> bool {
    fn go(q: &QbfInstance, values: &mut Vec<bool>) -> bool {
        let k = values.len();
        if k == q.n() {
            return q.formula.eval(values);
        }
        let branch = |b: bool, values: &mut Vec<bool>| {
            values.push(b);
            let r = go(q, values);
            values.pop();
            r
        };
        match q.quantifiers[k].0 {
            Quantifier::Forall => branch(false, values) && branch(true, values),
            Quantifier::Exists => branch(false, values) || branch(true, values),
        }
    }
    go(q, &mut Vec::with_capacity(q.n()))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Colon,
    And,
    Or,
    Not,
    Open,
    Close,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

fn lex(text: &str) -> Result<Lexer> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1, 0);
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        col += 1;
        let at = (line, col);
        let tok = match c {
            '\n' => {
                line += 1;
                col = 0;
                continue;
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
                continue;
            }
            c if c.is_whitespace() => continue,
            ':' => Tok::Colon,
            '&' => Tok::And,
            '|' => Tok::Or,
            '!' => Tok::Not,
            '(' => Tok::Open,
            ')' => Tok::Close,
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut w = c.to_string();
                while let Some(&n) = chars.peek() {
                    if !(n.is_ascii_alphanumeric() || n == '_') {
                        break;
                    }
                    w.push(n);
                    chars.next();
                    col += 1;
                }
                Tok::Word(w)
            }
            other => return Err(syntax(at, format!("unexpected character {other:?}"))),
        };
        toks.push((tok, at.0, at.1));
    }
    Ok(Lexer {
        toks,
        pos: 0,
        end: (line, col + 1),
    })
}

fn syntax((line, col): (usize, usize), msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.1, t.2)).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let at = self.here();
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => Err(syntax(at, format!("expected {what}"))),
        }
    }
}

fn var_number(word: &str) -> Option<usize> {
    let digits = word.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

pub fn parse_qbf(text: &str) -> Result<QbfInstance> {
    let mut lx = lex(text)?;
    let mut quantifiers: Vec<(Quantifier, usize)> = Vec::new();
    loop {
        let at = lx.here();
        let kind = match lx.peek() {
            Some(Tok::Word(w)) if w == "exists" => Quantifier::Exists,
            Some(Tok::Word(w)) if w == "forall" => Quantifier::Forall,
            Some(Tok::Colon) if !quantifiers.is_empty() => {
                lx.next();
                break;
            }
            _ => return Err(syntax(at, "expected `exists`, `forall` or `:`")),
        };
        lx.next();
        let at = lx.here();
        let v = match lx.next() {
            Some(Tok::Word(w)) => var_number(&w).ok_or_else(|| syntax(at, format!("bad variable {w:?}")))?,
            _ => return Err(syntax(at, "expected a variable")),
        };
        if quantifiers.iter().any(|&(_, u)| u == v) {
            return Err(Error::DoubleQuant(format!("x{v}")));
        }
        quantifiers.push((kind, v));
    }
    let formula = parse_or(&mut lx, &quantifiers)?;
    if lx.peek().is_some() {
        return Err(syntax(lx.here(), "unexpected trailing input"));
    }
    Ok(QbfInstance { quantifiers, formula })
}

fn parse_or(lx: &mut Lexer, qs: &[(Quantifier, usize)]) -> Result<Formula> {
    let mut f = parse_and(lx, qs)?;
    while lx.peek() == Some(&Tok::Or) {
        lx.next();
        f = Formula::or(f, parse_and(lx, qs)?);
    }
    Ok(f)
}

fn parse_and(lx: &mut Lexer, qs: &[(Quantifier, usize)]) -> Result<Formula> {
    let mut f = parse_unary(lx, qs)?;
    while lx.peek() == Some(&Tok::And) {
        lx.next();
        f = Formula::and(f, parse_unary(lx, qs)?);
    }
    Ok(f)
}

fn parse_unary(lx: &mut Lexer, qs: &[(Quantifier, usize)]) -> Result<Formula> {
    let at = lx.here();
    match lx.next() {
        Some(Tok::Not) => Ok(Formula::negate(parse_unary(lx, qs)?)),
        Some(Tok::Open) => {
            let f = parse_or(lx, qs)?;
            lx.expect(Tok::Close, "`)`")?;
            Ok(f)
        }
        Some(Tok::Word(w)) => {
            let v = var_number(&w).ok_or_else(|| syntax(at, format!("bad variable {w:?}")))?;
            qs.iter()
                .position(|&(_, u)| u == v)
                .map(Formula::Var)
                .ok_or_else(|| Error::UnboundVar(format!("x{v}")))
        }
        _ => Err(syntax(at, "expected a variable, `!` or `(`")),
    }
}

#[cfg(test)]
mod tests;
