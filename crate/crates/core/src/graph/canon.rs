use std::collections::VecDeque;

use sha2::{Digest, Sha256};

use super::{MachineState, NodeId};
use crate::error::Result;

/// Canonical encoding of the subgraph reachable from a root.
///
/// Out-edges are labelled by direction and every node has one edge per
/// direction, so a breadth-first walk that expands directions in set order
/// numbers the reachable nodes uniquely. Two rooted graphs are isomorphic
/// exactly when their signatures agree.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub signature: Vec<u8>,
    pub reachable_count: usize,
    order: Vec<NodeId>,
}

impl PartialEq for CanonicalForm {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature
    }
}

impl Eq for CanonicalForm {}

impl CanonicalForm {
    /// Hex SHA-256 of the signature, used as a printable state name.
    pub fn hash_hex(&self) -> String {
        hex::encode(Sha256::digest(&self.signature))
    }

    /// Canonical number of `id`, if reachable.
    pub fn canonical_index(&self, id: NodeId) -> Option<usize> {
        self.order.iter().position(|&n| n == id)
    }

    /// Node of this state carrying canonical number `index`.
    pub fn node_at(&self, index: usize) -> Option<NodeId> {
        self.order.get(index).copied()
    }

    /// Nodes in canonical order.
    pub fn order(&self) -> &[NodeId] {
        &self.order
    }
}

impl MachineState {
    pub fn canonical_signature(&self, root: NodeId, include_labels: bool) -> Result<CanonicalForm> {
        self.node(root)?;
        const UNSEEN: u32 = u32::MAX;
        let mut number = vec![UNSEEN; self.nodes.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        number[root.0] = 0;
        order.push(root);
        queue.push_back(root);
        while let Some(n) = queue.pop_front() {
            for &t in &self.nodes[n.0].edges {
                if number[t.0] == UNSEEN {
                    number[t.0] = order.len() as u32;
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }

        let d = self.directions.len();
        let mut sig = Vec::with_capacity(8 + order.len() * (d * 4 + 4));
        for c in self.directions.iter() {
            sig.push(c as u8);
        }
        sig.push(0xff);
        sig.push(include_labels as u8);
        for &n in &order {
            let node = &self.nodes[n.0];
            for &t in &node.edges {
                sig.extend_from_slice(&number[t.0].to_le_bytes());
            }
            if include_labels {
                sig.extend_from_slice(&(node.label.len() as u32).to_le_bytes());
                sig.extend_from_slice(node.label.as_bytes());
            }
        }
        Ok(CanonicalForm {
            signature: sig,
            reachable_count: order.len(),
            order,
        })
    }
}
