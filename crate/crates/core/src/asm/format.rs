use std::fmt::{self, Write};

use super::{BoolExpr, CmpOp, Instruction, JumpTarget, Program};

impl fmt::Display for JumpTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            JumpTarget::Absolute(l) => write!(f, "{l}"),
            JumpTarget::Relative(r) if r >= 0 => write!(f, "+{r}"),
            JumpTarget::Relative(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Eq => "==",
            CmpOp::Neq => "!=",
        })
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &BoolExpr) -> fmt::Result {
    match e {
        BoolExpr::And(_) | BoolExpr::Or(_) => write!(f, "({e})"),
        _ => write!(f, "{e}"),
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Cmp { lhs, op, rhs } => write!(f, "{lhs} {op} {rhs}"),
            BoolExpr::And(xs) | BoolExpr::Or(xs) => {
                let sep = if matches!(self, BoolExpr::And(_)) {
                    " AND "
                } else {
                    " OR "
                };
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write_operand(f, x)?;
                }
                Ok(())
            }
            BoolExpr::Not(x) => {
                f.write_str("NOT ")?;
                write_operand(f, x)
            }
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::New(None) => f.write_str("new"),
            Instruction::New(Some(l)) => write!(f, "new {l}"),
            Instruction::Set { prefix, dir, target } => {
                write!(f, "set {}{dir}", prefix.as_str())?;
                if !target.is_empty() {
                    write!(f, " {target}")?;
                }
                Ok(())
            }
            Instruction::Ctr(p) => write!(f, "ctr {p}"),
            Instruction::If { left, right, jump } => write!(f, "if {left} {right} {jump}"),
            Instruction::Ren(l) => write!(f, "ren {l}"),
            Instruction::Stop(None) => f.write_str("stop"),
            Instruction::Stop(Some(m)) => write!(f, "stop {m}"),
            Instruction::Skip(c) if c.is_empty() => f.write_str("skip"),
            Instruction::Skip(c) => write!(f, "skip {c}"),
            Instruction::Match(e) => write!(f, "match {e}"),
        }
    }
}

/// Canonical program text with explicit line numbers.
pub fn format_program(program: &Program) -> String {
    let mut out = String::new();
    if program.declared_directions {
        let _ = writeln!(out, ".directions {}", program.directions);
    }
    let width = program.len().to_string().len();
    for (i, instr) in program.instructions.iter().enumerate() {
        let line = i + 1;
        for b in program.blocks.iter().filter(|b| b.start == line) {
            let _ = writeln!(out, ".block {}", b.name);
        }
        let _ = writeln!(out, "{line:>width$} {instr}");
    }
    for b in program.blocks.iter().filter(|b| b.start == program.len() + 1) {
        let _ = writeln!(out, ".block {}", b.name);
    }
    out
}
