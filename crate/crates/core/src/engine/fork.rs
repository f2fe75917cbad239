use crate::asm::{BoolExpr, Instruction, Program};
use crate::error::{Error, Result};
use crate::graph::{MachineState, NodeId};

use super::{match_set, still_selected, Counters, RunLimits};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ForkReport {
    /// Instructions executed by this fork and all of its descendants.
    pub instructions: u64,
    /// Forks run, this one included.
    pub forks: u64,
    /// Children skipped because their node stopped matching before they ran.
    pub stale_children: u64,
    /// Last stop message seen in the fork tree.
    pub stop: Option<String>,
}

struct Frame<'p> {
    center: NodeId,
    pc: usize,
    first: usize,
    last: usize,
    guard: Option<&'p BoolExpr>,
}

/// Runs one fork tree. With `root` set the fork is the prologue's root
/// execution and its local center is mirrored into the machine center.
#[allow(clippy::too_many_arguments)]
pub(super) fn run(
    state: &mut MachineState,
    program: &Program,
    limits: &RunLimits,
    counters: &mut Counters,
    node: NodeId,
    start_line: usize,
    (first, last): (usize, usize),
    root: bool,
) -> Result<ForkReport> {
    if start_line < first || start_line > last + 1 {
        return Err(Error::Program(format!(
            "line {start_line} is outside lines {first}..{last}"
        )));
    }
    let mut report = ForkReport::default();
    let mut stack = vec![Frame {
        center: node,
        pc: start_line,
        first,
        last,
        guard: None,
    }];
    let mut is_root = root;

    while let Some(mut frame) = stack.pop() {
        if let Some(expr) = frame.guard {
            if !still_selected(state, frame.center, expr)? {
                report.stale_children += 1;
                continue;
            }
        }
        counters.forks += 1;
        report.forks += 1;
        if limits.max_forks.is_some_and(|m| counters.forks > m) {
            return Err(Error::Limit(format!("fork budget of {} exhausted", counters.forks - 1)));
        }
        let writes_center = std::mem::take(&mut is_root);
        let mut executed = 0u64;
        while frame.pc <= frame.last {
            let line = frame.pc;
            let instr = program.instruction(line).expect("pc inside its segment");
            executed += 1;
            counters.instructions += 1;
            report.instructions += 1;
            if limits.max_instructions_per_fork.is_some_and(|m| executed > m) {
                return Err(Error::Limit(format!(
                    "fork at node {} exceeded {} instructions",
                    frame.center,
                    executed - 1
                )));
            }
            frame.pc += 1;
            match instr {
                Instruction::New(label) => {
                    frame.center = state.add_node(label.as_deref(), frame.center)?;
                }
                Instruction::Set { prefix, dir, target } => {
                    let at = state.resolve(frame.center, prefix)?;
                    let to = state.resolve(frame.center, target)?;
                    state.set_edge(at, *dir, to)?;
                }
                Instruction::Ctr(path) => {
                    frame.center = state.resolve(frame.center, path)?;
                }
                Instruction::If { left, right, jump } => {
                    if state.resolve(frame.center, left)? == state.resolve(frame.center, right)? {
                        match jump.resolve(line) {
                            Some(t) if t >= frame.first && t <= frame.last => frame.pc = t,
                            _ => {
                                return Err(Error::Program(format!(
                                    "jump {jump} on line {line} leaves lines {}..{}",
                                    frame.first, frame.last
                                )))
                            }
                        }
                    }
                }
                Instruction::Ren(label) => state.set_label(frame.center, label.clone())?,
                Instruction::Skip(_) => {}
                Instruction::Stop(msg) => {
                    if msg.is_some() {
                        report.stop = msg.clone();
                    }
                    break;
                }
                Instruction::Match(expr) => {
                    if writes_center {
                        state.set_center(frame.center)?;
                    }
                    let selected = match_set(state, expr)?;
                    counters.max_match_width = counters.max_match_width.max(selected.len());
                    for &n in selected.iter().rev() {
                        stack.push(Frame {
                            center: n,
                            pc: frame.pc,
                            first: frame.first,
                            last: frame.last,
                            guard: Some(expr),
                        });
                    }
                    break;
                }
            }
            if writes_center {
                state.set_center(frame.center)?;
            }
        }
    }
    Ok(report)
}
