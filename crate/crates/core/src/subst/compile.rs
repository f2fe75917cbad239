use super::SubstSystem;
use crate::artifact::CompileArtifact;
use crate::asm::{BoolExpr, ProgramBuilder};
use crate::error::{Error, Result};
use crate::graph::{code_width, DecodeManifest, DirectionSet, Path};

/// Largest code width; bits use the digit directions `0` to `9`.
pub const MAX_BITS: usize = 10;

const EAST: char = 'e';
const WEST: char = 'w';
const ORIGIN_DIR: char = 'o';

pub fn bit_direction(b: usize) -> char {
    char::from_digit(b as u32, 10).expect("bit index below 10")
}

pub fn rule_block_name(k: usize) -> String {
    format!("R{}", k + 1)
}

struct Encoder {
    width: usize,
    alphabet: Vec<char>,
}

impl Encoder {
    fn code(&self, c: char) -> usize {
        self.alphabet.iter().position(|&a| a == c).expect("symbol in alphabet")
    }

    /// Writes the bits of `c` on the center.
    fn emit_bits(&self, b: &mut ProgramBuilder, c: char) {
        let code = self.code(c);
        for bit in 0..self.width {
            let target = if (code >> bit) & 1 == 1 { "o" } else { "" };
            b.set("", bit_direction(bit), target);
        }
    }

    /// Tests that the node at `at` holds `c`.
    fn test_bits(&self, at: &Path, c: char, out: &mut Vec<BoolExpr>) {
        let code = self.code(c);
        for bit in 0..self.width {
            let mut p = at.clone();
            p.push(bit_direction(bit));
            let rhs = if (code >> bit) & 1 == 1 {
                Path::repeat('o', 1)
            } else {
                at.clone()
            };
            out.push(BoolExpr::eq(p, rhs));
        }
    }
}

/// Compiles a string rewriting system into a program whose top-level
/// blocks `R1`, `R2`, ... apply the rules in order.
///
/// The string is a list of nodes linked by `e` (east) and `w` (west), each
/// node holding its symbol in the bit directions. List ends point at the
/// origin. The center stays on the first node, which no rule removes.
pub fn compile_subst(sys: &SubstSystem) -> Result<CompileArtifact> {
    sys.validate()?;
    let width = code_width(sys.alphabet.len());
    if width > MAX_BITS {
        return Err(Error::TooManySymbols(width, MAX_BITS));
    }
    let enc = Encoder {
        width,
        alphabet: sys.alphabet.clone(),
    };
    let sym = |c: char| c.to_string();

    let mut b = ProgramBuilder::new();
    b.skip(&sys.to_string());
    let first = sys.initial[0];
    b.new_node(Some(&sym(first)));
    enc.emit_bits(&mut b, first);
    for &c in &sys.initial[1..] {
        b.new_node(Some(&sym(c)));
        b.set("", ORIGIN_DIR, "oo");
        b.set("", EAST, "we");
        b.set("w", EAST, "");
        enc.emit_bits(&mut b, c);
    }
    if sys.initial.len() > 1 {
        b.ctr(Path::repeat(WEST, sys.initial.len() - 1));
    }
    b.stop();

    for (k, rule) in sys.rules.iter().enumerate() {
        b.block(&rule_block_name(k));
        let mut head = Vec::new();
        enc.test_bits(&Path::empty(), rule.lhs[0], &mut head);
        for (t, &c) in rule.lhs.iter().enumerate().skip(1) {
            let at = Path::repeat(EAST, t);
            head.push(BoolExpr::neq(at.clone(), "o"));
            enc.test_bits(&at, c, &mut head);
        }
        b.match_(BoolExpr::all(head));

        let (l, r) = (rule.lhs.len(), rule.rhs.len());
        for (t, &c) in rule.rhs.iter().take(l.min(r)).enumerate() {
            if t > 0 {
                b.ctr("e");
            }
            b.ren(&sym(c));
            enc.emit_bits(&mut b, c);
        }
        if l > r {
            // detach the l - r nodes after the center, then unlink them
            for i in 1..=l - r {
                b.set(Path::repeat(EAST, i), WEST, Path::repeat(EAST, i));
            }
            b.set("", EAST, Path::repeat(EAST, l - r + 1));
            relink_west(&mut b);
        }
        for &c in &rule.rhs[l.min(r)..] {
            b.new_node(Some(&sym(c)));
            b.set("", ORIGIN_DIR, "oo");
            enc.emit_bits(&mut b, c);
            b.set("", EAST, "we");
            b.set("w", EAST, "");
            relink_west(&mut b);
        }
        b.stop();
    }

    let mut chars: Vec<char> = (0..width).map(bit_direction).collect();
    chars.extend([EAST, ORIGIN_DIR, WEST]);
    let program = b.finish(DirectionSet::new(chars)?)?;

    let alphabet: Vec<String> = sys.alphabet.iter().map(|c| c.to_string()).collect();
    let bits: Vec<char> = (0..width).map(bit_direction).collect();
    let manifest = DecodeManifest::binary(&alphabet, &bits, EAST, WEST, ORIGIN_DIR)?;

    let direction_roles = program
        .directions
        .iter()
        .map(|c| {
            let role = match c {
                EAST => "east".to_string(),
                WEST => "west".to_string(),
                ORIGIN_DIR => "origin".to_string(),
                d => format!("bit {d}"),
            };
            (c, role)
        })
        .collect();

    Ok(CompileArtifact {
        program,
        top_blocks: (0..sys.rules.len()).map(rule_block_name).collect(),
        direction_roles,
        manifest: Some(manifest),
        readout: None,
    })
}

/// Points the east neighbour's west edge back at the center, unless the
/// center is the last node.
fn relink_west(b: &mut ProgramBuilder) {
    let done = b.label();
    b.if_eq("e", "o", done);
    b.set("e", WEST, "");
    b.place(done);
}
