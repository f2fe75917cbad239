use std::fmt::Write;

use serde::Serialize;

use super::{EvolutionGraph, StateEntry};
use crate::graph::dot_escape;

#[derive(Serialize)]
struct EvolutionDoc<'a> {
    root: &'a str,
    states: Vec<StateDoc<'a>>,
    edges: Vec<EdgeDoc<'a>>,
}

#[derive(Serialize)]
struct StateDoc<'a> {
    sig: &'a str,
    depth: usize,
    string: Option<&'a str>,
}

#[derive(Serialize)]
struct EdgeDoc<'a> {
    from: &'a str,
    block: &'a str,
    node: usize,
    to: &'a str,
}

/// File name used when dumping a state: a prefix of its signature hash.
pub fn state_file_name(entry: &StateEntry) -> String {
    format!("{}.json", &entry.hash[..16])
}

pub fn export_evolution_json(g: &EvolutionGraph) -> String {
    let doc = EvolutionDoc {
        root: &g.root().hash,
        states: g
            .states
            .iter()
            .map(|s| StateDoc {
                sig: &s.hash,
                depth: s.depth,
                string: s.string.as_deref(),
            })
            .collect(),
        edges: g
            .edges
            .iter()
            .map(|e| EdgeDoc {
                from: &g.states[e.from].hash,
                block: &e.event.block,
                node: e.event.canonical_node,
                to: &g.states[e.to].hash,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("evolution graph serializes")
}

/// One node per state, labelled by its string or a hash prefix, and one
/// arrow per event labelled `block@canonical node`.
pub fn export_evolution_dot(g: &EvolutionGraph) -> String {
    let mut out = String::from("digraph evolution {\n  node [shape=box];\n");
    for (i, s) in g.states.iter().enumerate() {
        let label = match &s.string {
            Some(text) if text.is_empty() => "(empty)".to_string(),
            Some(text) => text.clone(),
            None => s.hash[..12].to_string(),
        };
        let _ = writeln!(out, "  s{i} [label=\"{}\"];", dot_escape(&label));
    }
    for e in &g.edges {
        let _ = writeln!(
            out,
            "  s{} -> s{} [label=\"{}@{}\"];",
            e.from,
            e.to,
            dot_escape(&e.event.block),
            e.event.canonical_node
        );
    }
    out.push_str("}\n");
    out
}
