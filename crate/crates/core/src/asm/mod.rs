//! MWSMM program text: instruction types, parser, validator and formatter.
//!
//! A program is a numbered instruction list. The instructions before the
//! first `.block NAME` directive form the prologue; each block that follows
//! is a match-block whose first instruction is its `match` head.

mod builder;
mod format;
mod parse;
mod validate;

use std::ops::RangeInclusive;

pub use builder::{Label, ProgramBuilder};
pub use format::format_program;
pub use parse::parse_program;
pub use validate::{validate_program, DiagCode, Diagnostic, Severity};

use crate::graph::{DirectionSet, Path};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpTarget {
    Absolute(usize),
    Relative(i64),
}

impl JumpTarget {
    /// Absolute line this target denotes when used on `line`.
    pub fn resolve(self, line: usize) -> Option<usize> {
        match self {
            JumpTarget::Absolute(l) => Some(l),
            JumpTarget::Relative(r) => {
                let t = line as i64 + r;
                (t >= 1).then_some(t as usize)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Neq,
}

/// Boolean expression over paths, evaluated with a candidate node as root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    Cmp { lhs: Path, op: CmpOp, rhs: Path },
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
    Not(Box<BoolExpr>),
}

impl BoolExpr {
    pub fn eq(lhs: impl Into<Path>, rhs: impl Into<Path>) -> Self {
        BoolExpr::Cmp {
            lhs: lhs.into(),
            op: CmpOp::Eq,
            rhs: rhs.into(),
        }
    }

    pub fn neq(lhs: impl Into<Path>, rhs: impl Into<Path>) -> Self {
        BoolExpr::Cmp {
            lhs: lhs.into(),
            op: CmpOp::Neq,
            rhs: rhs.into(),
        }
    }

    /// Conjunction that collapses to the single operand when there is one.
    pub fn all(mut items: Vec<BoolExpr>) -> Self {
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            BoolExpr::And(items)
        }
    }

    pub fn any(mut items: Vec<BoolExpr>) -> Self {
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            BoolExpr::Or(items)
        }
    }

    pub fn paths(&self) -> Vec<&Path> {
        let mut out = Vec::new();
        self.collect_paths(&mut out);
        out
    }

    fn collect_paths<'a>(&'a self, out: &mut Vec<&'a Path>) {
        match self {
            BoolExpr::Cmp { lhs, rhs, .. } => {
                out.push(lhs);
                out.push(rhs);
            }
            BoolExpr::And(xs) | BoolExpr::Or(xs) => xs.iter().for_each(|x| x.collect_paths(out)),
            BoolExpr::Not(x) => x.collect_paths(out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    /// Create a node whose edges all point at the current center and make
    /// it the center.
    New(Option<String>),
    /// Redirect the `dir` edge of p(prefix) to p(target).
    Set {
        prefix: Path,
        dir: char,
        target: Path,
    },
    /// Move the center to p(path).
    Ctr(Path),
    /// Jump when p(left) = p(right), else fall through.
    If {
        left: Path,
        right: Path,
        jump: JumpTarget,
    },
    /// Relabel the center.
    Ren(String),
    Stop(Option<String>),
    /// Numbered no-op carrying free text.
    Skip(String),
    Match(BoolExpr),
}

impl Instruction {
    pub fn paths(&self) -> Vec<&Path> {
        match self {
            Instruction::Set { prefix, target, .. } => vec![prefix, target],
            Instruction::Ctr(p) => vec![p],
            Instruction::If { left, right, .. } => vec![left, right],
            Instruction::Match(e) => e.paths(),
            _ => Vec::new(),
        }
    }

    /// Every direction character the instruction mentions.
    pub fn direction_chars(&self) -> Vec<char> {
        let mut out: Vec<char> = self.paths().iter().flat_map(|p| p.chars()).collect();
        if let Instruction::Set { dir, .. } = self {
            out.push(*dir);
        }
        out
    }
}

/// A named match-block: lines `start..start + len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl Block {
    pub fn lines(&self) -> RangeInclusive<usize> {
        self.start..=self.start + self.len - 1
    }

    pub fn last(&self) -> usize {
        self.start + self.len - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    /// Instruction `i` has line number `i + 1`.
    pub instructions: Vec<Instruction>,
    pub prologue_len: usize,
    pub blocks: Vec<Block>,
    pub directions: DirectionSet,
    /// Whether the direction set came from a `.directions` directive.
    pub declared_directions: bool,
}

impl Program {
    pub fn instruction(&self, line: usize) -> Option<&Instruction> {
        line.checked_sub(1).and_then(|i| self.instructions.get(i))
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn block_index(&self, name: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.name == name)
    }

    pub fn block_names(&self) -> Vec<&str> {
        self.blocks.iter().map(|b| b.name.as_str()).collect()
    }

    /// Lines of the prologue, empty when the program starts with a block.
    pub fn prologue_lines(&self) -> RangeInclusive<usize> {
        1..=self.prologue_len
    }

    /// First and last line of the segment (prologue or block) holding `line`.
    pub fn segment_of(&self, line: usize) -> Option<(usize, usize)> {
        if line >= 1 && line <= self.prologue_len {
            return Some((1, self.prologue_len));
        }
        self.blocks
            .iter()
            .find(|b| b.len > 0 && b.lines().contains(&line))
            .map(|b| (b.start, b.last()))
    }

    /// The head expression of a block, when its first instruction is a match.
    pub fn block_head(&self, block: &Block) -> Option<&BoolExpr> {
        if block.len == 0 {
            return None;
        }
        match self.instruction(block.start) {
            Some(Instruction::Match(e)) => Some(e),
            _ => None,
        }
    }
}
