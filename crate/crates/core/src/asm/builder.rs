use super::{Block, BoolExpr, Instruction, JumpTarget, Program};
use crate::error::{Error, Result};
use crate::graph::{DirectionSet, Path};

/// Forward-referencable jump target inside a [`ProgramBuilder`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Label(usize);

/// Emits programs instruction by instruction; jumps to labels are resolved
/// to relative targets when the program is finished.
#[derive(Debug)]
pub struct ProgramBuilder {
    instructions: Vec<Instruction>,
    blocks: Vec<Block>,
    prologue_len: Option<usize>,
    labels: Vec<Option<usize>>,
    fixups: Vec<(usize, Label)>,
}

impl Default for ProgramBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl ProgramBuilder {
    pub fn new() -> Self {
        ProgramBuilder {
            instructions: Vec::new(),
            blocks: Vec::new(),
            prologue_len: None,
            labels: Vec::new(),
            fixups: Vec::new(),
        }
    }

    /// Line number the next instruction will get.
    pub fn next_line(&self) -> usize {
        self.instructions.len() + 1
    }

    pub fn push(&mut self, instr: Instruction) -> &mut Self {
        self.instructions.push(instr);
        if let Some(b) = self.blocks.last_mut() {
            b.len += 1;
        }
        self
    }

    pub fn block(&mut self, name: &str) -> &mut Self {
        if self.prologue_len.is_none() {
            self.prologue_len = Some(self.instructions.len());
        }
        self.blocks.push(Block {
            name: name.to_string(),
            start: self.next_line(),
            len: 0,
        });
        self
    }

    pub fn skip(&mut self, text: &str) -> &mut Self {
        self.push(Instruction::Skip(text.to_string()))
    }

    pub fn new_node(&mut self, label: Option<&str>) -> &mut Self {
        self.push(Instruction::New(label.map(str::to_string)))
    }

    /// `set <prefix><dir> <target>`.
    pub fn set(&mut self, prefix: impl Into<Path>, dir: char, target: impl Into<Path>) -> &mut Self {
        self.push(Instruction::Set {
            prefix: prefix.into(),
            dir,
            target: target.into(),
        })
    }

    pub fn ctr(&mut self, path: impl Into<Path>) -> &mut Self {
        self.push(Instruction::Ctr(path.into()))
    }

    pub fn ren(&mut self, label: &str) -> &mut Self {
        self.push(Instruction::Ren(label.to_string()))
    }

    pub fn stop(&mut self) -> &mut Self {
        self.push(Instruction::Stop(None))
    }

    pub fn match_(&mut self, expr: BoolExpr) -> &mut Self {
        self.push(Instruction::Match(expr))
    }

    pub fn label(&mut self) -> Label {
        self.labels.push(None);
        Label(self.labels.len() - 1)
    }

    /// Binds `label` to the next emitted line.
    pub fn place(&mut self, label: Label) -> &mut Self {
        self.labels[label.0] = Some(self.next_line());
        self
    }

    /// `if left right <label>`.
    pub fn if_eq(&mut self, left: impl Into<Path>, right: impl Into<Path>, target: Label) -> &mut Self {
        self.fixups.push((self.instructions.len(), target));
        self.push(Instruction::If {
            left: left.into(),
            right: right.into(),
            jump: JumpTarget::Relative(0),
        })
    }

    /// Unconditional jump.
    pub fn goto(&mut self, target: Label) -> &mut Self {
        self.if_eq(Path::empty(), Path::empty(), target)
    }

    pub fn finish(mut self, directions: DirectionSet) -> Result<Program> {
        for (idx, label) in std::mem::take(&mut self.fixups) {
            let target =
                self.labels[label.0].ok_or_else(|| Error::Program(format!("label {} was never placed", label.0)))?;
            let line = idx + 1;
            if let Instruction::If { jump, .. } = &mut self.instructions[idx] {
                *jump = JumpTarget::Relative(target as i64 - line as i64);
            }
        }
        Ok(Program {
            prologue_len: self.prologue_len.unwrap_or(self.instructions.len()),
            instructions: self.instructions,
            blocks: self.blocks,
            directions,
            declared_directions: true,
        })
    }
}
