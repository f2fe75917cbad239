use std::fmt;

use super::{Instruction, Program};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagCode {
    JumpScope,
    BlockHead,
    DeadCode,
    Undeclared,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::JumpScope => "E_JUMP_SCOPE",
            DiagCode::BlockHead => "E_BLOCK_HEAD",
            DiagCode::DeadCode => "W_DEAD_CODE",
            DiagCode::Undeclared => "E_UNDECLARED",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            DiagCode::DeadCode => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub line: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn is_error(&self) -> bool {
        self.code.severity() == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} line {}: {}", self.code.as_str(), self.line, self.message)
    }
}

/// Static checks on a parsed program. Problems are reported, not raised.
pub fn validate_program(program: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |code, line, message: String| out.push(Diagnostic { code, line, message });

    for b in &program.blocks {
        if program.block_head(b).is_none() {
            let line = if b.len == 0 {
                b.start.saturating_sub(1).max(1)
            } else {
                b.start
            };
            push(
                DiagCode::BlockHead,
                line,
                format!("block {} does not start with a match", b.name),
            );
        }
    }

    for (i, instr) in program.instructions.iter().enumerate() {
        let line = i + 1;
        if let Instruction::If { jump, .. } = instr {
            let (first, last) = program.segment_of(line).expect("every line has a segment");
            match jump.resolve(line) {
                Some(t) if (first..=last).contains(&t) => {}
                _ => push(
                    DiagCode::JumpScope,
                    line,
                    format!("jump {jump} leaves lines {first}..{last}"),
                ),
            }
        }
        if program.declared_directions {
            for c in instr.direction_chars() {
                if !program.directions.contains(c) {
                    push(DiagCode::Undeclared, line, format!("direction {c:?} is not declared"));
                }
            }
        }
    }

    for line in unreachable_matches(program) {
        push(
            DiagCode::DeadCode,
            line,
            "match can never execute: nothing falls or jumps into it".into(),
        );
    }
    out
}

/// Match instructions that no control path reaches from their segment's entry.
fn unreachable_matches(program: &Program) -> Vec<usize> {
    let mut segments = Vec::new();
    if program.prologue_len > 0 {
        segments.push((1, program.prologue_len));
    }
    segments.extend(program.blocks.iter().filter(|b| b.len > 0).map(|b| (b.start, b.last())));

    let mut dead = Vec::new();
    for (first, last) in segments {
        let mut seen = vec![false; last - first + 1];
        let mut work = vec![first];
        while let Some(line) = work.pop() {
            if line < first || line > last || seen[line - first] {
                continue;
            }
            seen[line - first] = true;
            match program.instruction(line).expect("line in range") {
                Instruction::Stop(_) => {}
                Instruction::If { jump, .. } => {
                    work.push(line + 1);
                    if let Some(t) = jump.resolve(line) {
                        work.push(t);
                    }
                }
                // forked children continue after a match
                _ => work.push(line + 1),
            }
        }
        for (k, reached) in seen.iter().enumerate() {
            let line = first + k;
            if !reached && matches!(program.instruction(line), Some(Instruction::Match(_))) {
                dead.push(line);
            }
        }
    }
    dead
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asm::parse_program;

    fn codes(src: &str) -> Vec<&'static str> {
        validate_program(&parse_program(src).unwrap())
            .iter()
            .map(|d| d.code.as_str())
            .collect()
    }

    #[test]
    fn clean_program_has_no_diagnostics() {
        assert!(codes("new A\nset 0\nstop\n.block R\nmatch 0 == _\nif e o +2\nset ew\nstop").is_empty());
    }

    #[test]
    fn jump_into_the_prologue_is_out_of_scope() {
        assert_eq!(
            codes("new A\nstop\n.block R\nmatch 0 == _\nif e o 1\nstop"),
            vec!["E_JUMP_SCOPE"]
        );
        assert_eq!(codes("if a a +5\nstop"), vec!["E_JUMP_SCOPE"]);
        assert_eq!(codes("if a a -3\nstop"), vec!["E_JUMP_SCOPE"]);
    }

    #[test]
    fn block_must_start_with_match() {
        assert_eq!(codes("stop\n.block B\nnew\nstop"), vec!["E_BLOCK_HEAD"]);
        assert_eq!(codes("stop\n.block B"), vec!["E_BLOCK_HEAD"]);
    }

    #[test]
    fn undeclared_direction() {
        assert_eq!(codes(".directions oe\nset ew\nstop"), vec!["E_UNDECLARED"]);
        assert!(codes("set ew\nstop").is_empty());
    }

    #[test]
    fn match_after_stop_is_dead() {
        let d = validate_program(&parse_program("stop\nmatch a == _\nstop").unwrap());
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, DiagCode::DeadCode);
        assert_eq!(d[0].line, 2);
        assert!(!d[0].is_error());
        // a jump into it revives it
        assert!(codes("if a a +2\nstop\nmatch a == _\nstop").is_empty());
    }
}
