//! Non-deterministic evolution.
//!
//! Every (top-level block, matched node) pair of a state is an event.
//! Applying an event fires that block on a copy of the state with the node
//! as local center. States reached this way are identified up to
//! isomorphism by their canonical form rooted at the machine center, so
//! different event orders leading to the same graph merge.

mod export;

use std::collections::HashMap;

use rayon::prelude::*;

use crate::asm::{BoolExpr, Program};
use crate::engine::{self, RunLimits};
use crate::error::{Error, Result};
use crate::graph::{CanonicalForm, DecodeManifest, MachineState, NodeId};

pub use export::{export_evolution_dot, export_evolution_json, state_file_name};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub block: String,
    pub block_index: usize,
    pub node: NodeId,
    /// Number of `node` in the source state's canonical form.
    pub canonical_node: usize,
}

#[derive(Debug, Clone)]
pub struct StateEntry {
    pub form: CanonicalForm,
    pub hash: String,
    pub state: MachineState,
    pub depth: usize,
    /// Decoded string, when a manifest was given and decoding succeeded.
    pub string: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvolutionEdge {
    pub from: usize,
    pub event: Event,
    pub to: usize,
}

/// States are stored in discovery order; index 0 is the root.
#[derive(Debug, Clone)]
pub struct EvolutionGraph {
    pub states: Vec<StateEntry>,
    pub edges: Vec<EvolutionEdge>,
    /// States without events.
    pub terminals: Vec<usize>,
    /// States at the depth limit that still have events.
    pub frontier: Vec<usize>,
    pub depth_limit: usize,
    index: HashMap<Vec<u8>, usize>,
}

impl EvolutionGraph {
    pub fn root(&self) -> &StateEntry {
        &self.states[0]
    }

    pub fn lookup(&self, form: &CanonicalForm) -> Option<usize> {
        self.index.get(&form.signature).copied()
    }

    /// Number of distinct states first seen at each depth.
    pub fn states_per_depth(&self) -> Vec<usize> {
        let max = self.states.iter().map(|s| s.depth).max().unwrap_or(0);
        let mut out = vec![0; max + 1];
        for s in &self.states {
            out[s.depth] += 1;
        }
        out
    }

    /// Decoded strings of the states first seen at `depth`, sorted.
    pub fn strings_at(&self, depth: usize) -> Vec<String> {
        let mut out: Vec<String> = self
            .states
            .iter()
            .filter(|s| s.depth == depth)
            .filter_map(|s| s.string.clone())
            .collect();
        out.sort();
        out
    }

    pub fn successors(&self, state: usize) -> impl Iterator<Item = &EvolutionEdge> {
        self.edges.iter().filter(move |e| e.from == state)
    }

    pub fn is_acyclic(&self) -> bool {
        topological_order(self).is_some()
    }
}

#[derive(Debug, Clone)]
pub struct ExploreOptions {
    pub depth_limit: usize,
    pub limits: RunLimits,
    pub max_states: Option<usize>,
    pub manifest: Option<DecodeManifest>,
    /// Worker threads for successor computation; `None` or 1 runs inline.
    pub threads: Option<usize>,
}

impl ExploreOptions {
    pub fn new(depth_limit: usize) -> Self {
        ExploreOptions {
            depth_limit,
            limits: RunLimits::default(),
            max_states: Some(1_000_000),
            manifest: None,
            threads: None,
        }
    }

    pub fn with_manifest(mut self, manifest: DecodeManifest) -> Self {
        self.manifest = Some(manifest);
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }
}

/// All events of `state`, by block order then node id.
pub fn enumerate_events(state: &MachineState, program: &Program, tops: &[(usize, &BoolExpr)]) -> Result<Vec<Event>> {
    let form = state.canonical_signature(state.center(), false)?;
    enumerate_events_with(state, program, tops, &form)
}

fn enumerate_events_with(
    state: &MachineState,
    program: &Program,
    tops: &[(usize, &BoolExpr)],
    form: &CanonicalForm,
) -> Result<Vec<Event>> {
    let mut out = Vec::new();
    for &(idx, head) in tops {
        for node in engine::match_set(state, head)? {
            out.push(Event {
                block: program.blocks[idx].name.clone(),
                block_index: idx,
                node,
                canonical_node: form.canonical_index(node).expect("selected nodes are reachable"),
            });
        }
    }
    Ok(out)
}

/// Fires `event` on a copy of `state`.
pub fn apply_event(state: &MachineState, program: &Program, event: &Event, limits: &RunLimits) -> Result<MachineState> {
    let mut next = state.clone();
    let start = program.blocks[event.block_index].start + 1;
    engine::execute_fork(&mut next, program, event.block_index, event.node, start, limits)?;
    Ok(next)
}

fn make_entry(state: MachineState, depth: usize, manifest: Option<&DecodeManifest>) -> Result<StateEntry> {
    let form = state.canonical_signature(state.center(), false)?;
    let string = manifest.and_then(|m| state.decode_text(m).ok());
    Ok(StateEntry {
        hash: form.hash_hex(),
        form,
        state,
        depth,
        string,
    })
}

/// Breadth-first exploration from the post-prologue state up to
/// `depth_limit` events.
pub fn explore<S: AsRef<str> + Sync>(
    program: &Program,
    top_blocks: &[S],
    opts: &ExploreOptions,
) -> Result<EvolutionGraph> {
    let run = || explore_inner(program, top_blocks, opts);
    match opts.threads {
        Some(n) if n > 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Program(format!("cannot start thread pool: {e}")))?
            .install(run),
        _ => run(),
    }
}

fn explore_inner<S: AsRef<str>>(program: &Program, top_blocks: &[S], opts: &ExploreOptions) -> Result<EvolutionGraph> {
    let tops = engine::top_block_heads(program, top_blocks)?;
    let parallel = opts.threads.is_some_and(|n| n > 1);
    let manifest = opts.manifest.as_ref();
    let root = make_entry(engine::initial_state(program, &opts.limits)?, 0, manifest)?;

    let mut g = EvolutionGraph {
        index: HashMap::from([(root.form.signature.clone(), 0)]),
        states: vec![root],
        edges: Vec::new(),
        terminals: Vec::new(),
        frontier: Vec::new(),
        depth_limit: opts.depth_limit,
    };
    let mut level = vec![0usize];
    let mut depth = 0;
    while !level.is_empty() {
        let mut tasks = Vec::new();
        for &s in &level {
            let entry = &g.states[s];
            let events = enumerate_events_with(&entry.state, program, &tops, &entry.form)?;
            if events.is_empty() {
                g.terminals.push(s);
            } else if depth == opts.depth_limit {
                g.frontier.push(s);
            } else {
                tasks.extend(events.into_iter().map(|e| (s, e)));
            }
        }
        if tasks.is_empty() {
            break;
        }
        let step = |(s, e): &(usize, Event)| -> Result<StateEntry> {
            let next = apply_event(&g.states[*s].state, program, e, &opts.limits)?;
            make_entry(next, depth + 1, manifest)
        };
        let results: Vec<Result<StateEntry>> = if parallel {
            tasks.par_iter().map(step).collect()
        } else {
            tasks.iter().map(step).collect()
        };

        let mut next_level = Vec::new();
        for ((from, event), result) in tasks.into_iter().zip(results) {
            let entry = result?;
            let to = match g.index.get(&entry.form.signature) {
                Some(&i) => i,
                None => {
                    let i = g.states.len();
                    if opts.max_states.is_some_and(|m| i >= m) {
                        return Err(Error::Limit(format!("state budget of {i} exhausted")));
                    }
                    g.index.insert(entry.form.signature.clone(), i);
                    g.states.push(entry);
                    next_level.push(i);
                    i
                }
            };
            g.edges.push(EvolutionEdge { from, event, to });
        }
        level = next_level;
        depth += 1;
    }
    g.terminals.sort_unstable();
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    /// Exploration finished, the graph is acyclic and has one terminal.
    Converged,
    /// Exploration finished but there are several terminals, none, or a cycle.
    Diverged,
    /// The depth limit left unexpanded states.
    Unknown,
}

#[derive(Debug, Clone)]
pub struct ConfluenceReport {
    pub explored_depth: usize,
    pub terminal_count: usize,
    pub status: Convergence,
    pub terminal: Option<usize>,
    pub terminal_string: Option<String>,
    pub states_per_depth: Vec<usize>,
    /// Shortest and longest event paths from the root to a terminal, when
    /// the graph is acyclic and fully explored.
    pub path_lengths: Option<(usize, usize)>,
}

impl ConfluenceReport {
    pub fn converged(&self) -> bool {
        self.status == Convergence::Converged
    }
}

pub fn check_convergence(g: &EvolutionGraph) -> ConfluenceReport {
    let order = topological_order(g);
    let finished = g.frontier.is_empty();
    let status = if !finished {
        Convergence::Unknown
    } else if order.is_some() && g.terminals.len() == 1 {
        Convergence::Converged
    } else {
        Convergence::Diverged
    };
    let terminal = (status == Convergence::Converged).then(|| g.terminals[0]);
    let path_lengths = match (&order, finished) {
        (Some(order), true) => terminal_path_lengths(g, order),
        _ => None,
    };
    ConfluenceReport {
        explored_depth: g.states.iter().map(|s| s.depth).max().unwrap_or(0),
        terminal_count: g.terminals.len(),
        status,
        terminal,
        terminal_string: terminal.and_then(|t| g.states[t].string.clone()),
        states_per_depth: g.states_per_depth(),
        path_lengths,
    }
}

fn topological_order(g: &EvolutionGraph) -> Option<Vec<usize>> {
    let n = g.states.len();
    let mut indegree = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &g.edges {
        indegree[e.to] += 1;
        out[e.from].push(e.to);
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(s) = ready.pop() {
        order.push(s);
        for &t in &out[s] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                ready.push(t);
            }
        }
    }
    (order.len() == n).then_some(order)
}

fn terminal_path_lengths(g: &EvolutionGraph, order: &[usize]) -> Option<(usize, usize)> {
    let n = g.states.len();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &g.edges {
        out[e.from].push(e.to);
    }
    // (shortest, longest) distance from each state to any terminal
    let mut dist: Vec<Option<(usize, usize)>> = vec![None; n];
    for &s in order.iter().rev() {
        if out[s].is_empty() {
            dist[s] = Some((0, 0));
            continue;
        }
        dist[s] = out[s]
            .iter()
            .filter_map(|&t| dist[t])
            .map(|(lo, hi)| (lo + 1, hi + 1))
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)));
    }
    dist[0]
}

#[cfg(test)]
mod tests;
