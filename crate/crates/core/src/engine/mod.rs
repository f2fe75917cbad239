//! Program execution.
//!
//! A fork runs a block body with its own local center against the shared
//! state. The deterministic loop snapshots every top-level block's match
//! set at the start of a round, then fires the selected nodes one at a time
//! in block order and ascending node id, re-checking each candidate just
//! before it fires.

mod fork;

use std::fmt;

use serde::Serialize;

use crate::asm::{BoolExpr, CmpOp, Program};
use crate::error::{Error, Result};
use crate::graph::{MachineState, NodeId, ORIGIN};

pub use fork::ForkReport;

/// Budgets for one run. `None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunLimits {
    pub max_rounds: Option<u64>,
    pub max_nodes: Option<usize>,
    pub max_instructions_per_fork: Option<u64>,
    pub max_forks: Option<u64>,
}

impl Default for RunLimits {
    fn default() -> Self {
        RunLimits {
            max_rounds: Some(10_000),
            max_nodes: Some(1 << 20),
            max_instructions_per_fork: Some(1 << 20),
            max_forks: Some(1 << 24),
        }
    }
}

impl RunLimits {
    pub fn unbounded() -> Self {
        RunLimits {
            max_rounds: None,
            max_nodes: None,
            max_instructions_per_fork: None,
            max_forks: None,
        }
    }

    pub fn with_max_rounds(mut self, rounds: u64) -> Self {
        self.max_rounds = Some(rounds);
        self
    }
}

/// Running totals shared by every fork of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub instructions: u64,
    pub forks: u64,
    pub max_match_width: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    EmptySelection,
    Limit,
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HaltReason::EmptySelection => "empty-selection",
            HaltReason::Limit => "limit",
        })
    }
}

/// One top-level firing (or skipped candidate) of a round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub round: u64,
    pub block: String,
    pub node: NodeId,
    pub instructions: u64,
    pub stale: bool,
    pub stop: Option<String>,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "round={} block={} node={} instr={}",
            self.round, self.block, self.node, self.instructions
        )?;
        if self.stale {
            f.write_str(" stale")?;
        }
        if let Some(msg) = &self.stop {
            write!(f, " stop=\"{}\"", msg.replace('\\', "\\\\").replace('"', "\\\""))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Metrics {
    pub mass: u64,
    pub live_nodes: usize,
    pub reachable_nodes: usize,
    pub capacity: f64,
    pub instructions_executed: u64,
    pub max_match_width: usize,
}

impl Metrics {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub rounds: u64,
    pub trace: Vec<TraceEvent>,
    pub final_state: MachineState,
    pub metrics: Metrics,
    pub halt: HaltReason,
    /// The budget that was hit when `halt` is [`HaltReason::Limit`].
    pub limit_message: Option<String>,
}

impl RunReport {
    pub fn trace_text(&self) -> String {
        self.trace.iter().map(|e| format!("{e}\n")).collect()
    }

    /// Stop messages of fired forks, in firing order.
    pub fn stop_messages(&self) -> impl Iterator<Item = &str> {
        self.trace.iter().filter_map(|e| e.stop.as_deref())
    }
}

/// Evaluates `expr` as if `candidate` were the center. `_` is the
/// candidate itself; AND and OR short-circuit left to right.
pub fn eval_match_expr(state: &MachineState, candidate: NodeId, expr: &BoolExpr) -> Result<bool> {
    Ok(match expr {
        BoolExpr::Cmp { lhs, op, rhs } => {
            let same = state.resolve(candidate, lhs)? == state.resolve(candidate, rhs)?;
            match op {
                CmpOp::Eq => same,
                CmpOp::Neq => !same,
            }
        }
        BoolExpr::And(xs) => {
            for x in xs {
                if !eval_match_expr(state, candidate, x)? {
                    return Ok(false);
                }
            }
            true
        }
        BoolExpr::Or(xs) => {
            for x in xs {
                if eval_match_expr(state, candidate, x)? {
                    return Ok(true);
                }
            }
            false
        }
        BoolExpr::Not(x) => !eval_match_expr(state, candidate, x)?,
    })
}

/// Nodes reachable from the machine center, other than the origin, that
/// satisfy `expr`, in ascending id order.
pub fn match_set(state: &MachineState, expr: &BoolExpr) -> Result<Vec<NodeId>> {
    let mut out = Vec::new();
    for n in state.reachable(state.center())? {
        if n != ORIGIN && eval_match_expr(state, n, expr)? {
            out.push(n);
        }
    }
    Ok(out)
}

/// Whether `node` would still be selected by `expr` right now.
pub fn still_selected(state: &MachineState, node: NodeId, expr: &BoolExpr) -> Result<bool> {
    Ok(node != ORIGIN && state.is_reachable(state.center(), node)? && eval_match_expr(state, node, expr)?)
}

pub fn compute_metrics(state: &MachineState, counters: &Counters) -> Metrics {
    let reachable = state.reachable(state.center()).map(|r| r.len()).unwrap_or(0);
    let n = reachable.max(2) as f64;
    Metrics {
        mass: state.mass(),
        live_nodes: state.node_count(),
        reachable_nodes: reachable,
        capacity: state.directions().len() as f64 * reachable as f64 * n.log2(),
        instructions_executed: counters.instructions,
        max_match_width: counters.max_match_width,
    }
}

/// Runs the body of block `block` on `node` from `start_line`. Inner
/// matches fork children that run to completion, depth first, before the
/// next sibling; the machine center is left untouched.
pub fn execute_fork(
    state: &mut MachineState,
    program: &Program,
    block: usize,
    node: NodeId,
    start_line: usize,
    limits: &RunLimits,
) -> Result<ForkReport> {
    let mut counters = Counters::default();
    execute_fork_counted(state, program, block, node, start_line, limits, &mut counters)
}

#[allow(clippy::too_many_arguments)]
pub fn execute_fork_counted(
    state: &mut MachineState,
    program: &Program,
    block: usize,
    node: NodeId,
    start_line: usize,
    limits: &RunLimits,
    counters: &mut Counters,
) -> Result<ForkReport> {
    let b = program
        .blocks
        .get(block)
        .ok_or_else(|| Error::Program(format!("no block with index {block}")))?;
    let segment = (b.start, b.start + b.len - 1);
    fork::run(state, program, limits, counters, node, start_line, segment, false)
}

/// Executes the prologue with the machine center as its local center.
pub fn run_prologue(state: &mut MachineState, program: &Program, limits: &RunLimits) -> Result<ForkReport> {
    let mut counters = Counters::default();
    run_prologue_counted(state, program, limits, &mut counters)
}

fn run_prologue_counted(
    state: &mut MachineState,
    program: &Program,
    limits: &RunLimits,
    counters: &mut Counters,
) -> Result<ForkReport> {
    if program.prologue_len == 0 {
        return Ok(ForkReport::default());
    }
    let center = state.center();
    fork::run(
        state,
        program,
        limits,
        counters,
        center,
        1,
        (1, program.prologue_len),
        true,
    )
}

/// A fresh state for `program` with the prologue applied.
pub fn initial_state(program: &Program, limits: &RunLimits) -> Result<MachineState> {
    let mut state = MachineState::new(program.directions.clone())?;
    state.set_node_limit(limits.max_nodes);
    run_prologue(&mut state, program, limits)?;
    Ok(state)
}

/// Looks up the head expressions of the named top-level blocks.
pub fn top_block_heads<'p, S: AsRef<str>>(program: &'p Program, names: &[S]) -> Result<Vec<(usize, &'p BoolExpr)>> {
    names
        .iter()
        .map(|name| {
            let name = name.as_ref();
            let idx = program
                .block_index(name)
                .ok_or_else(|| Error::Program(format!("unknown block {name}")))?;
            let head = program
                .block_head(&program.blocks[idx])
                .ok_or_else(|| Error::Program(format!("block {name} does not start with a match")))?;
            Ok((idx, head))
        })
        .collect()
}

/// The production-system loop: prologue, then rounds until no top-level
/// block selects anything or a budget runs out.
pub fn run_deterministic<S: AsRef<str>>(program: &Program, top_blocks: &[S], limits: &RunLimits) -> Result<RunReport> {
    let tops = top_block_heads(program, top_blocks)?;
    let mut state = MachineState::new(program.directions.clone())?;
    state.set_node_limit(limits.max_nodes);
    let mut counters = Counters::default();
    let mut trace = Vec::new();
    let mut rounds = 0u64;

    let outcome = (|| -> Result<HaltReason> {
        run_prologue_counted(&mut state, program, limits, &mut counters)?;
        loop {
            let mut selections = Vec::with_capacity(tops.len());
            for &(_, head) in &tops {
                let sel = match_set(&state, head)?;
                counters.max_match_width = counters.max_match_width.max(sel.len());
                selections.push(sel);
            }
            if selections.iter().all(Vec::is_empty) {
                return Ok(HaltReason::EmptySelection);
            }
            if limits.max_rounds.is_some_and(|m| rounds >= m) {
                return Ok(HaltReason::Limit);
            }
            rounds += 1;
            for (&(idx, head), sel) in tops.iter().zip(&selections) {
                let block = &program.blocks[idx];
                for &node in sel {
                    let mut event = TraceEvent {
                        round: rounds,
                        block: block.name.clone(),
                        node,
                        instructions: 0,
                        stale: false,
                        stop: None,
                    };
                    if !still_selected(&state, node, head)? {
                        event.stale = true;
                        trace.push(event);
                        continue;
                    }
                    let before = state.center();
                    counters.instructions += 1;
                    let report =
                        execute_fork_counted(&mut state, program, idx, node, block.start + 1, limits, &mut counters);
                    match report {
                        Ok(r) => {
                            event.instructions = r.instructions + 1;
                            event.stop = r.stop;
                            trace.push(event);
                        }
                        Err(e) => {
                            trace.push(event);
                            return Err(e);
                        }
                    }
                    debug_assert_eq!(state.center(), before);
                    debug_assert!(state.check_invariants().is_ok());
                }
            }
        }
    })();

    let (halt, limit_message) = match outcome {
        Ok(HaltReason::Limit) => (HaltReason::Limit, Some("round limit reached".to_string())),
        Ok(h) => (h, None),
        Err(Error::Limit(msg)) => (HaltReason::Limit, Some(msg)),
        Err(e) => return Err(e),
    };
    if halt == HaltReason::EmptySelection {
        debug_assert!(tops
            .iter()
            .all(|&(_, h)| match_set(&state, h).map(|s| s.is_empty()).unwrap_or(false)));
    }
    let metrics = compute_metrics(&state, &counters);
    Ok(RunReport {
        rounds,
        trace,
        final_state: state,
        metrics,
        halt,
        limit_message,
    })
}
