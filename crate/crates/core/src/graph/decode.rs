use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{MachineState, NodeId};
use crate::error::{Error, Result};

/// How a doubly-linked list of nodes spells a string.
///
/// Each symbol is a bit pattern over `bits`; character `i` of a code is the
/// value of direction `bits[i]`, `1` meaning the edge points at the origin
/// and `0` that it points back at the node itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeManifest {
    pub alphabet: Vec<String>,
    pub bits: Vec<char>,
    pub codes: BTreeMap<String, String>,
    pub east: char,
    pub west: char,
    pub origin_dir: char,
}

/// Number of bit directions needed for an alphabet, at least one.
pub fn code_width(alphabet_len: usize) -> usize {
    let mut k = 1;
    while (1usize << k) < alphabet_len {
        k += 1;
    }
    k
}

impl DecodeManifest {
    /// Assigns each symbol the binary encoding of its alphabet index, bit 0
    /// in `bits[0]`.
    pub fn binary(alphabet: &[String], bits: &[char], east: char, west: char, origin_dir: char) -> Result<Self> {
        let width = code_width(alphabet.len());
        if bits.len() != width {
            return Err(Error::Schema(format!(
                "alphabet of {} symbols needs {width} bit directions, got {}",
                alphabet.len(),
                bits.len()
            )));
        }
        let codes = alphabet
            .iter()
            .enumerate()
            .map(|(j, sym)| {
                let code: String = (0..width).map(|b| if (j >> b) & 1 == 1 { '1' } else { '0' }).collect();
                (sym.clone(), code)
            })
            .collect();
        let m = DecodeManifest {
            alphabet: alphabet.to_vec(),
            bits: bits.to_vec(),
            codes,
            east,
            west,
            origin_dir,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphabet.is_empty() {
            return Err(Error::Schema("manifest alphabet is empty".into()));
        }
        let width = code_width(self.alphabet.len());
        if self.bits.len() != width {
            return Err(Error::Schema(format!(
                "manifest declares {} bit directions, alphabet needs {width}",
                self.bits.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for sym in &self.alphabet {
            let code = self
                .codes
                .get(sym)
                .ok_or_else(|| Error::Schema(format!("no code for symbol {sym:?}")))?;
            if code.len() != width || !code.chars().all(|c| c == '0' || c == '1') {
                return Err(Error::Schema(format!("malformed code {code:?} for {sym:?}")));
            }
            if !seen.insert(code.clone()) {
                return Err(Error::Schema(format!("duplicate code {code:?}")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: DecodeManifest = serde_json::from_str(text).map_err(super::export::json_error)?;
        m.validate()?;
        Ok(m)
    }

    fn symbol_for(&self, code: &str) -> Option<&str> {
        self.codes
            .iter()
            .find(|(_, c)| c.as_str() == code)
            .map(|(s, _)| s.as_str())
    }
}

impl MachineState {
    /// Reads the string held by the list the center belongs to.
    ///
    /// The west end is found by following west edges until one points at
    /// the origin; decoding then proceeds east until the east edge does.
    pub fn decode_string(&self, manifest: &DecodeManifest) -> Result<Vec<String>> {
        let origin = self.edge(self.center, manifest.origin_dir)?;
        let mut out = Vec::new();
        if self.center == origin {
            return Ok(out);
        }
        let limit = self.nodes.len();
        let mut at = self.center;
        let mut steps = 0;
        loop {
            let next = self.edge(at, manifest.west)?;
            if next == origin {
                break;
            }
            at = next;
            steps += 1;
            if steps > limit {
                return Err(Error::DecodeCycle(limit));
            }
        }
        steps = 0;
        loop {
            out.push(self.decode_node(at, origin, manifest)?);
            let next = self.edge(at, manifest.east)?;
            if next == origin {
                break;
            }
            at = next;
            steps += 1;
            if steps > limit {
                return Err(Error::DecodeCycle(limit));
            }
        }
        Ok(out)
    }

    /// [`decode_string`](Self::decode_string) with the symbols concatenated.
    pub fn decode_text(&self, manifest: &DecodeManifest) -> Result<String> {
        Ok(self.decode_string(manifest)?.concat())
    }

    pub(super) fn decode_node(&self, node: NodeId, origin: NodeId, manifest: &DecodeManifest) -> Result<String> {
        let mut code = String::with_capacity(manifest.bits.len());
        for &b in &manifest.bits {
            let t = self.edge(node, b)?;
            if t == origin {
                code.push('1');
            } else if t == node {
                code.push('0');
            } else {
                return Err(Error::DecodeBit { node: node.0, dir: b });
            }
        }
        self.symbol_of(node, &code, manifest)
    }

    fn symbol_of(&self, node: NodeId, code: &str, manifest: &DecodeManifest) -> Result<String> {
        manifest
            .symbol_for(code)
            .map(str::to_string)
            .ok_or_else(|| Error::DecodeCode {
                node: node.0,
                code: code.to_string(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DirectionSet, ORIGIN};

    fn ab_manifest() -> DecodeManifest {
        DecodeManifest::binary(&["A".into(), "B".into()], &['0'], 'e', 'w', 'o').unwrap()
    }

    #[test]
    fn code_widths() {
        assert_eq!(code_width(1), 1);
        assert_eq!(code_width(2), 1);
        assert_eq!(code_width(3), 2);
        assert_eq!(code_width(4), 2);
        assert_eq!(code_width(5), 3);
    }

    #[test]
    fn binary_codes_put_bit_zero_first() {
        let m = DecodeManifest::binary(&["A".into(), "B".into(), "C".into()], &['0', '1'], 'e', 'w', 'o').unwrap();
        assert_eq!(m.codes["A"], "00");
        assert_eq!(m.codes["B"], "10");
        assert_eq!(m.codes["C"], "01");
    }

    #[test]
    fn manifest_json_uses_documented_keys() {
        let json = ab_manifest().to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in ["alphabet", "bits", "codes", "east", "west", "origin_dir"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(DecodeManifest::from_json(&json).unwrap(), ab_manifest());
    }

    #[test]
    fn decode_bit_error_when_bit_points_elsewhere() {
        let mut s = MachineState::new(DirectionSet::parse("0eow").unwrap()).unwrap();
        let a = s.add_node(Some("A"), ORIGIN).unwrap();
        let third = s.add_node(Some("X"), ORIGIN).unwrap();
        s.set_edge(a, '0', third).unwrap();
        s.set_center(a).unwrap();
        assert_eq!(
            s.decode_string(&ab_manifest()).unwrap_err(),
            Error::DecodeBit { node: 1, dir: '0' }
        );
    }

    #[test]
    fn decode_cycle_is_detected() {
        let mut s = MachineState::new(DirectionSet::parse("0eow").unwrap()).unwrap();
        let a = s.add_node(Some("A"), ORIGIN).unwrap();
        s.set_edge(a, 'w', a).unwrap();
        s.set_center(a).unwrap();
        assert_eq!(s.decode_string(&ab_manifest()).unwrap_err().code(), "E_DECODE_CYCLE");
    }

    #[test]
    fn decode_code_error_for_unused_pattern() {
        let m = DecodeManifest::binary(&["A".into(), "B".into(), "C".into()], &['0', '1'], 'e', 'w', 'o').unwrap();
        let mut s = MachineState::new(DirectionSet::parse("01eow").unwrap()).unwrap();
        // all edges to origin: code "11", unassigned in a 3-symbol alphabet
        let a = s.add_node(None, ORIGIN).unwrap();
        s.set_center(a).unwrap();
        assert_eq!(s.decode_string(&m).unwrap_err().code(), "E_DECODE_CODE");
    }

    #[test]
    fn center_at_origin_decodes_empty() {
        let s = MachineState::new(DirectionSet::parse("0eow").unwrap()).unwrap();
        assert_eq!(s.decode_text(&ab_manifest()).unwrap(), "");
    }
}
