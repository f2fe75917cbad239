use serde::Serialize;

use crate::asm::{format_program, Program};
use crate::graph::DecodeManifest;

/// Where a compiled program leaves its answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Readout {
    pub result_node_label: String,
    pub result_direction: char,
    pub true_means: String,
}

/// Output of a compiler: the program, the blocks to run as top level, and
/// whatever is needed to read the result back.
#[derive(Debug, Clone)]
pub struct CompileArtifact {
    pub program: Program,
    pub top_blocks: Vec<String>,
    /// Role of each direction, in direction-set order.
    pub direction_roles: Vec<(char, String)>,
    pub manifest: Option<DecodeManifest>,
    pub readout: Option<Readout>,
}

impl CompileArtifact {
    pub fn program_text(&self) -> String {
        format_program(&self.program)
    }

    /// JSON written next to the program: the decode manifest for string
    /// systems, the readout description otherwise.
    pub fn sidecar_json(&self) -> String {
        match (&self.manifest, &self.readout) {
            (Some(m), _) => m.to_json(),
            (None, Some(r)) => serde_json::to_string_pretty(r).expect("readout serializes"),
            (None, None) => "{}".to_string(),
        }
    }
}
