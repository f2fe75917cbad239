//! String substitution systems.
//!
//! Text format, one item per line, `#` starting a comment:
//!
//! ```text
//! alphabet: A B
//! rule: A -> BBB
//! rule: BB -> A
//! init: A
//! ```
//!
//! Symbols are single ASCII letters or digits. Without an `alphabet:`
//! line the alphabet is every symbol used, in sorted order.

mod compile;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};

pub use compile::{bit_direction, compile_subst, rule_block_name, MAX_BITS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Vec<char>,
    pub rhs: Vec<char>,
}

impl Rule {
    pub fn new(lhs: &str, rhs: &str) -> Self {
        Rule {
            lhs: lhs.chars().collect(),
            rhs: rhs.chars().collect(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs: String = self.lhs.iter().collect();
        let rhs: String = self.rhs.iter().collect();
        write!(f, "{lhs}->{rhs}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstSystem {
    pub alphabet: Vec<char>,
    pub rules: Vec<Rule>,
    pub initial: Vec<char>,
}

fn is_symbol(c: char) -> bool {
    c.is_ascii_alphanumeric()
}

impl SubstSystem {
    /// Checks the invariants: non-empty sides and initial string, distinct
    /// alphabet symbols, and every used symbol in the alphabet.
    pub fn new(alphabet: Vec<char>, rules: Vec<Rule>, initial: &str) -> Result<Self> {
        let sys = SubstSystem {
            alphabet,
            rules,
            initial: initial.chars().collect(),
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphabet.is_empty() {
            return Err(Error::Alphabet("the alphabet is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for &c in &self.alphabet {
            if !is_symbol(c) {
                return Err(Error::Alphabet(format!("{c:?} is not a letter or digit")));
            }
            if !seen.insert(c) {
                return Err(Error::Alphabet(format!("{c} is listed twice")));
            }
        }
        if self.initial.is_empty() {
            return Err(Error::Alphabet("the initial string is empty".into()));
        }
        for r in &self.rules {
            if r.lhs.is_empty() || r.rhs.is_empty() {
                return Err(Error::Alphabet(format!("rule {r} has an empty side")));
            }
        }
        let used = self
            .rules
            .iter()
            .flat_map(|r| r.lhs.iter().chain(&r.rhs))
            .chain(&self.initial);
        for c in used {
            if !seen.contains(c) {
                return Err(Error::Alphabet(format!("symbol {c} is not in the alphabet")));
            }
        }
        Ok(())
    }

    pub fn symbol_index(&self, c: char) -> Option<usize> {
        self.alphabet.iter().position(|&a| a == c)
    }

    pub fn initial_text(&self) -> String {
        self.initial.iter().collect()
    }
}

impl fmt::Display for SubstSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rules: Vec<String> = self.rules.iter().map(Rule::to_string).collect();
        write!(f, "{}; {}", rules.join(", "), self.initial_text())
    }
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn symbols(line: usize, col: usize, text: &str) -> Result<Vec<char>> {
    if text.is_empty() {
        return Err(syntax(line, col, "expected a string of symbols"));
    }
    if let Some((i, c)) = text.char_indices().find(|&(_, c)| !is_symbol(c)) {
        return Err(syntax(line, col + i, format!("{c:?} is not a symbol")));
    }
    Ok(text.chars().collect())
}

pub fn parse_subst(text: &str) -> Result<SubstSystem> {
    let mut alphabet: Option<Vec<char>> = None;
    let mut rules = Vec::new();
    let mut initial: Option<Vec<char>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once(':') else {
            return Err(syntax(line, 1, "expected `alphabet:`, `rule:` or `init:`"));
        };
        let col = key.len() + 2 + (value.len() - value.trim_start().len());
        let value = value.trim();
        match key.trim() {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(syntax(line, 1, "duplicate alphabet line"));
                }
                let mut syms = Vec::new();
                for tok in value.split_whitespace() {
                    let mut cs = tok.chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) if is_symbol(c) => syms.push(c),
                        _ => return Err(Error::Alphabet(format!("{tok:?} is not a single-character symbol"))),
                    }
                }
                alphabet = Some(syms);
            }
            "rule" => {
                let Some((lhs, rhs)) = value.split_once("->") else {
                    return Err(syntax(line, col, "expected `LHS -> RHS`"));
                };
                let rhs_col = col + lhs.len() + 2 + (rhs.len() - rhs.trim_start().len());
                rules.push(Rule {
                    lhs: symbols(line, col, lhs.trim())?,
                    rhs: symbols(line, rhs_col, rhs.trim())?,
                });
            }
            "init" => {
                if initial.is_some() {
                    return Err(syntax(line, 1, "duplicate init line"));
                }
                initial = Some(symbols(line, col, value)?);
            }
            other => return Err(syntax(line, 1, format!("unknown key {other:?}"))),
        }
    }
    let initial = initial.ok_or_else(|| syntax(text.lines().count().max(1), 1, "missing init line"))?;
    let alphabet = alphabet.unwrap_or_else(|| {
        let used: BTreeSet<char> = rules
            .iter()
            .flat_map(|r: &Rule| r.lhs.iter().chain(&r.rhs))
            .chain(&initial)
            .copied()
            .collect();
        used.into_iter().collect()
    });
    let sys = SubstSystem {
        alphabet,
        rules,
        initial,
    };
    sys.validate()?;
    Ok(sys)
}

/// Start positions of `pattern` in `s`, overlaps included.
pub fn occurrences(pattern: &[char], s: &[char]) -> Vec<usize> {
    if pattern.is_empty() || pattern.len() > s.len() {
        return Vec::new();
    }
    (0..=s.len() - pattern.len())
        .filter(|&i| s[i..i + pattern.len()] == *pattern)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringEdge {
    pub from: String,
    pub rule: usize,
    pub position: usize,
    pub to: String,
}

/// String-level multiway evolution: each string is listed at the depth it
/// was first reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringMultiwayGraph {
    pub levels: Vec<Vec<String>>,
    pub edges: Vec<StringEdge>,
    pub terminals: Vec<String>,
    /// Strings at the depth limit that can still be rewritten.
    pub frontier: Vec<String>,
}

impl StringMultiwayGraph {
    pub fn strings_at(&self, depth: usize) -> &[String] {
        self.levels.get(depth).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// All single rewrites of `s`, by rule then position.
pub fn rewrites(sys: &SubstSystem, s: &[char]) -> Vec<(usize, usize, Vec<char>)> {
    let mut out = Vec::new();
    for (ri, r) in sys.rules.iter().enumerate() {
        for pos in occurrences(&r.lhs, s) {
            let mut next = s[..pos].to_vec();
            next.extend(&r.rhs);
            next.extend(&s[pos + r.lhs.len()..]);
            out.push((ri, pos, next));
        }
    }
    out
}

/// Breadth-first rewriting from the initial string up to `depth_limit`
/// steps.
pub fn subst_oracle(sys: &SubstSystem, depth_limit: usize) -> StringMultiwayGraph {
    let init = sys.initial_text();
    let mut seen: HashSet<String> = HashSet::from([init.clone()]);
    let mut g = StringMultiwayGraph {
        levels: vec![vec![init]],
        edges: Vec::new(),
        terminals: Vec::new(),
        frontier: Vec::new(),
    };
    for depth in 0..=depth_limit {
        let mut next = Vec::new();
        for s in g.levels[depth].clone() {
            let chars: Vec<char> = s.chars().collect();
            let succ = rewrites(sys, &chars);
            if succ.is_empty() {
                g.terminals.push(s);
                continue;
            }
            if depth == depth_limit {
                g.frontier.push(s);
                continue;
            }
            for (rule, position, t) in succ {
                let t: String = t.into_iter().collect();
                if seen.insert(t.clone()) {
                    next.push(t.clone());
                }
                g.edges.push(StringEdge {
                    from: s.clone(),
                    rule,
                    position,
                    to: t,
                });
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort();
        g.levels.push(next);
    }
    g.terminals.sort();
    g
}

#[cfg(test)]
mod tests;
