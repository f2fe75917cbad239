use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{DecodeManifest, DirectionSet, MachineState, NodeId, ORIGIN};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    directions: Vec<char>,
    origin: usize,
    center: usize,
    mass: u64,
    nodes: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: usize,
    label: String,
    edges: BTreeMap<char, usize>,
}

pub(crate) fn json_error(e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => Error::Schema(e.to_string()),
        _ => Error::Parse(e.to_string()),
    }
}

pub(crate) fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl MachineState {
    pub fn to_json(&self) -> String {
        let doc = StateDoc {
            directions: self.directions.chars().to_vec(),
            origin: ORIGIN.0,
            center: self.center.0,
            mass: self.mass,
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, n)| NodeDoc {
                    id,
                    label: n.label.clone(),
                    edges: self.directions.iter().zip(&n.edges).map(|(d, t)| (d, t.0)).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("state serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StateDoc = serde_json::from_str(text).map_err(json_error)?;
        let directions = DirectionSet::new(doc.directions.iter().copied()).map_err(|e| Error::Schema(e.to_string()))?;
        if doc.origin != 0 {
            return Err(Error::Schema("origin must be node 0".into()));
        }
        let mut nodes = Vec::with_capacity(doc.nodes.len());
        for (i, n) in doc.nodes.into_iter().enumerate() {
            if n.id != i {
                return Err(Error::Schema(format!("node ids must be dense, found {} at {i}", n.id)));
            }
            if n.edges.len() != directions.len() || !n.edges.keys().all(|&d| directions.contains(d)) {
                return Err(Error::Schema(format!("node {i} must have one edge per direction")));
            }
            let edges = directions.iter().map(|d| NodeId(n.edges[&d])).collect();
            nodes.push((n.label, edges));
        }
        let state = MachineState::from_parts(directions, nodes, NodeId(doc.center), doc.mass)?;
        if state.mass + 1 < state.nodes.len() as u64 {
            return Err(Error::Schema("mass is below the number of created nodes".into()));
        }
        Ok(state)
    }

    /// Graphviz rendering. The center is filled gray with a bold border;
    /// parallel edges between the same pair of nodes share one arrow whose
    /// label lists their directions.
    pub fn to_dot(&self, manifest: Option<&DecodeManifest>) -> String {
        let reachable = self.reachable_mask(self.center).unwrap_or_default();
        let mut out = String::from("digraph state {\n  node [shape=ellipse];\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let id = NodeId(i);
            let mut label = format!("{} ({i})", node.label);
            if let Some(sym) = manifest.and_then(|m| self.symbol_at(id, m)) {
                let _ = write!(label, " = {sym}");
            }
            let mut attrs = format!("label=\"{}\"", dot_escape(&label));
            if id == self.center {
                attrs.push_str(", style=\"filled,bold\", fillcolor=gray");
            } else if !reachable.get(i).copied().unwrap_or(false) {
                attrs.push_str(", style=dashed");
            }
            let _ = writeln!(out, "  n{i} [{attrs}];");
        }
        for (i, node) in self.nodes.iter().enumerate() {
            let mut groups: Vec<(NodeId, Vec<char>)> = Vec::new();
            for (d, &t) in self.directions.iter().zip(&node.edges) {
                match groups.iter_mut().find(|(g, _)| *g == t) {
                    Some((_, ds)) => ds.push(d),
                    None => groups.push((t, vec![d])),
                }
            }
            for (t, ds) in groups {
                let names: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
                let _ = writeln!(out, "  n{i} -> n{} [label=\"{}\"];", t.0, dot_escape(&names.join(",")));
            }
        }
        out.push_str("}\n");
        out
    }

    fn symbol_at(&self, id: NodeId, m: &DecodeManifest) -> Option<String> {
        let origin = self.edge(id, m.origin_dir).ok()?;
        if id == origin {
            return None;
        }
        self.decode_node(id, origin, m).ok()
    }
}
