//! Machine state of a storage modification machine.
//!
//! The memory is a finite directed graph in which every node has exactly
//! one out-edge per direction. Node 0 is the origin, a constant node that
//! starts out with all of its edges looping back to itself. Paths are
//! strings of direction characters resolved from a root node.

mod canon;
mod decode;
mod export;

use std::collections::VecDeque;
use std::fmt;

pub use canon::CanonicalForm;
pub use decode::{code_width, DecodeManifest};
pub(crate) use export::dot_escape;

use crate::error::{Error, Result};

/// Characters that can never be used as a direction. `_` spells the empty
/// path; the others are taken by the program and expression syntax.
pub const RESERVED_CHARS: &str = "_#()=!,\"\\";

/// Index of a node in the state's store. Ids are dense and assigned in
/// creation order; id 0 is always the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

pub const ORIGIN: NodeId = NodeId(0);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_direction_char(c: char) -> bool {
    c.is_ascii_graphic() && !RESERVED_CHARS.contains(c)
}

/// Ordered set of single-character direction names.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DirectionSet {
    chars: Vec<char>,
    // ASCII char -> index + 1, 0 meaning absent.
    lookup: [u8; 128],
}

impl DirectionSet {
    pub fn new<I: IntoIterator<Item = char>>(chars: I) -> Result<Self> {
        let mut chars: Vec<char> = chars.into_iter().collect();
        if chars.is_empty() {
            return Err(Error::EmptyDirections);
        }
        if let Some(&c) = chars.iter().find(|&&c| !is_direction_char(c)) {
            return Err(Error::BadDirection(format!("{c:?} cannot be used as a direction")));
        }
        chars.sort_unstable();
        if let Some(w) = chars.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::BadDirection(format!("duplicate direction {:?}", w[0])));
        }
        if chars.len() > u8::MAX as usize {
            return Err(Error::BadDirection("too many directions".into()));
        }
        let mut lookup = [0u8; 128];
        for (i, &c) in chars.iter().enumerate() {
            lookup[c as usize] = (i + 1) as u8;
        }
        Ok(DirectionSet { chars, lookup })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(s.chars())
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn contains(&self, c: char) -> bool {
        self.index_of(c).is_some()
    }

    #[inline]
    pub fn index_of(&self, c: char) -> Option<usize> {
        let code = c as usize;
        if code < 128 {
            match self.lookup[code] {
                0 => None,
                i => Some(i as usize - 1),
            }
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = char> + '_ {
        self.chars.iter().copied()
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }
}

impl fmt::Display for DirectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.chars {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DirectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirectionSet({self})")
    }
}

/// A sequence of directions. The empty path resolves to its root and is
/// written `_` in program text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Path(String);

impl Path {
    pub fn empty() -> Self {
        Path(String::new())
    }

    /// Builds a path from direction characters. `_` alone yields the empty
    /// path; reserved characters anywhere else are rejected.
    pub fn parse(token: &str) -> Result<Self> {
        if token == "_" {
            return Ok(Path::empty());
        }
        match token.chars().find(|&c| !is_direction_char(c)) {
            Some(c) => Err(Error::BadDirection(format!(
                "{c:?} in path {token:?} is not a direction character"
            ))),
            None => Ok(Path(token.to_string())),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.chars().count()
    }

    pub fn chars(&self) -> std::str::Chars<'_> {
        self.0.chars()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn join(&self, other: &Path) -> Path {
        Path(format!("{}{}", self.0, other.0))
    }

    pub fn push(&mut self, dir: char) {
        self.0.push(dir);
    }

    /// `dir` repeated `n` times.
    pub fn repeat(dir: char, n: usize) -> Path {
        Path(std::iter::repeat_n(dir, n).collect())
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("_")
        } else {
            f.write_str(&self.0)
        }
    }
}

impl From<&str> for Path {
    /// Unchecked conversion for literals; `_` maps to the empty path.
    fn from(s: &str) -> Self {
        if s == "_" {
            Path::empty()
        } else {
            Path(s.to_string())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub label: String,
    edges: Vec<NodeId>,
}

impl Node {
    /// Edge targets in direction-set order.
    pub fn edges(&self) -> &[NodeId] {
        &self.edges
    }
}

/// The graph, its origin (always node 0), its center and the mass counter.
#[derive(Debug, Clone)]
pub struct MachineState {
    directions: DirectionSet,
    nodes: Vec<Node>,
    center: NodeId,
    mass: u64,
    node_limit: Option<usize>,
}

impl PartialEq for MachineState {
    fn eq(&self, other: &Self) -> bool {
        self.directions == other.directions
            && self.nodes == other.nodes
            && self.center == other.center
            && self.mass == other.mass
    }
}

impl Eq for MachineState {}

impl MachineState {
    /// A single origin node, labelled "origin", with every edge looping
    /// back to itself. The origin is the center.
    pub fn new(directions: DirectionSet) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::EmptyDirections);
        }
        let origin = Node {
            label: "origin".to_string(),
            edges: vec![ORIGIN; directions.len()],
        };
        Ok(MachineState {
            directions,
            nodes: vec![origin],
            center: ORIGIN,
            mass: 0,
            node_limit: None,
        })
    }

    /// Assembles a state from raw parts, checking every structural invariant.
    pub fn from_parts(
        directions: DirectionSet,
        nodes: Vec<(String, Vec<NodeId>)>,
        center: NodeId,
        mass: u64,
    ) -> Result<Self> {
        let d = directions.len();
        let n = nodes.len();
        if n == 0 {
            return Err(Error::Schema("a state needs at least the origin node".into()));
        }
        let mut out = Vec::with_capacity(n);
        for (i, (label, edges)) in nodes.into_iter().enumerate() {
            if edges.len() != d {
                return Err(Error::Schema(format!(
                    "node {i} has {} edges, expected {d}",
                    edges.len()
                )));
            }
            if let Some(t) = edges.iter().find(|t| t.0 >= n) {
                return Err(Error::Schema(format!("node {i} points to missing node {t}")));
            }
            out.push(Node { label, edges });
        }
        if center.0 >= n {
            return Err(Error::Schema(format!("center {center} does not exist")));
        }
        Ok(MachineState {
            directions,
            nodes: out,
            center,
            mass,
            node_limit: None,
        })
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.directions
    }

    pub fn origin(&self) -> NodeId {
        ORIGIN
    }

    pub fn center(&self) -> NodeId {
        self.center
    }

    pub fn set_center(&mut self, center: NodeId) -> Result<()> {
        self.check_node(center)?;
        self.center = center;
        Ok(())
    }

    pub fn mass(&self) -> u64 {
        self.mass
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id.0).ok_or(Error::BadNode(id.0))
    }

    pub fn label(&self, id: NodeId) -> Result<&str> {
        Ok(&self.node(id)?.label)
    }

    pub fn set_label(&mut self, id: NodeId, label: impl Into<String>) -> Result<()> {
        self.check_node(id)?;
        self.nodes[id.0].label = label.into();
        Ok(())
    }

    /// Caps the total number of stored nodes; `add_node` fails with
    /// `E_LIMIT` beyond it.
    pub fn set_node_limit(&mut self, limit: Option<usize>) {
        self.node_limit = limit;
    }

    fn check_node(&self, id: NodeId) -> Result<()> {
        if id.0 < self.nodes.len() {
            Ok(())
        } else {
            Err(Error::BadNode(id.0))
        }
    }

    fn dir_index(&self, dir: char) -> Result<usize> {
        self.directions
            .index_of(dir)
            .ok_or_else(|| Error::BadDirection(format!("{dir:?} is not a declared direction")))
    }

    /// Target of the `dir` edge of `node`.
    pub fn edge(&self, node: NodeId, dir: char) -> Result<NodeId> {
        let i = self.dir_index(dir)?;
        Ok(self.node(node)?.edges[i])
    }

    /// Follows `path` from `root`.
    pub fn resolve(&self, root: NodeId, path: &Path) -> Result<NodeId> {
        self.check_node(root)?;
        let mut at = root;
        for c in path.chars() {
            let i = self.dir_index(c)?;
            at = self.nodes[at.0].edges[i];
        }
        Ok(at)
    }

    /// Appends a node whose edges all point at `target`. The center is left
    /// alone; moving it is the caller's business.
    pub fn add_node(&mut self, label: Option<&str>, target: NodeId) -> Result<NodeId> {
        self.check_node(target)?;
        if let Some(limit) = self.node_limit {
            if self.nodes.len() >= limit {
                return Err(Error::Limit(format!("node budget of {limit} exhausted")));
            }
        }
        let id = NodeId(self.nodes.len());
        let label = match label {
            Some(l) => l.to_string(),
            None => format!("n{}", id.0),
        };
        self.nodes.push(Node {
            label,
            edges: vec![target; self.directions.len()],
        });
        self.mass += 1;
        Ok(id)
    }

    pub fn set_edge(&mut self, node: NodeId, dir: char, target: NodeId) -> Result<()> {
        let i = self.dir_index(dir)?;
        self.check_node(node)?;
        self.check_node(target)?;
        self.nodes[node.0].edges[i] = target;
        Ok(())
    }

    /// Breadth-first closure over all edges from `root`, ascending by id.
    pub fn reachable(&self, root: NodeId) -> Result<Vec<NodeId>> {
        let seen = self.reachable_mask(root)?;
        Ok(seen
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| NodeId(i))
            .collect())
    }

    /// Membership vector of the closure from `root`.
    pub fn reachable_mask(&self, root: NodeId) -> Result<Vec<bool>> {
        self.check_node(root)?;
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::new();
        seen[root.0] = true;
        queue.push_back(root);
        while let Some(n) = queue.pop_front() {
            for &t in &self.nodes[n.0].edges {
                if !seen[t.0] {
                    seen[t.0] = true;
                    queue.push_back(t);
                }
            }
        }
        Ok(seen)
    }

    pub fn is_reachable(&self, root: NodeId, target: NodeId) -> Result<bool> {
        self.check_node(target)?;
        Ok(self.reachable_mask(root)?[target.0])
    }

    /// Checks totality, density and edge validity. Cheap enough for debug
    /// assertions at round boundaries.
    pub fn check_invariants(&self) -> Result<()> {
        let d = self.directions.len();
        let n = self.nodes.len();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.edges.len() != d {
                return Err(Error::Schema(format!("node {i} has {} edges", node.edges.len())));
            }
            if let Some(t) = node.edges.iter().find(|t| t.0 >= n) {
                return Err(Error::Schema(format!("node {i} points to missing node {t}")));
            }
        }
        if self.center.0 >= n {
            return Err(Error::Schema("center out of range".into()));
        }
        if self.mass + 1 < n as u64 {
            return Err(Error::Schema("mass below the number of created nodes".into()));
        }
        Ok(())
    }
}
