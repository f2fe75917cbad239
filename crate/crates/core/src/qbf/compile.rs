use super::{Formula, QbfInstance, Quantifier};
use crate::artifact::{CompileArtifact, Readout};
use crate::asm::{BoolExpr, ProgramBuilder};
use crate::engine::RunLimits;
use crate::error::{Error, Result};
use crate::graph::{DirectionSet, MachineState, Path, ORIGIN};

pub const BLOCK_FORMULA: &str = "formula";
pub const BLOCK_EVALUATE: &str = "evaluate";

/// Directions every node resets to itself when created.
const FLAGS: [char; 8] = ['l', 'r', 'A', 'S', 'N', 'v', 'x', 'i'];
const FIXED: &str = "olrpASNvxi";

fn variable_pool() -> Vec<char> {
    ('1'..='9')
        .chain('a'..='z')
        .chain('B'..='Z')
        .filter(|c| !FIXED.contains(*c))
        .collect()
}

/// Direction holding the value of the variable at quantifier level `level`
/// (0-based).
pub fn variable_direction(level: usize) -> Option<char> {
    variable_pool().get(level).copied()
}

pub fn compile_qbf(q: &QbfInstance) -> Result<CompileArtifact> {
    let budget = RunLimits::default().max_nodes.expect("default node budget");
    compile_qbf_with_budget(q, budget)
}

fn check_instance(q: &QbfInstance) -> Result<()> {
    fn vars(f: &Formula, n: usize) -> Result<()> {
        match f {
            Formula::Var(k) if *k < n => Ok(()),
            Formula::Var(k) => Err(Error::UnboundVar(format!("level {k}"))),
            Formula::Not(a) => vars(a, n),
            Formula::And(a, b) | Formula::Or(a, b) => vars(a, n).and(vars(b, n)),
        }
    }
    for (i, (_, v)) in q.quantifiers.iter().enumerate() {
        if q.quantifiers[..i].iter().any(|(_, u)| u == v) {
            return Err(Error::DoubleQuant(format!("x{v}")));
        }
    }
    vars(&q.formula, q.n())
}

/// Nodes a run of the compiled program creates, origin included.
fn node_demand(n: usize, formula_size: usize) -> Option<u128> {
    let leaves = 1u128.checked_shl(n as u32)?;
    Some(2 * leaves - 1 + leaves * formula_size as u128 + 1)
}

/// Compiles `q`, failing with `E_TOO_LARGE` when a run would need more
/// than `budget` nodes.
pub fn compile_qbf_with_budget(q: &QbfInstance, budget: usize) -> Result<CompileArtifact> {
    check_instance(q)?;
    let n = q.n();
    let pool = variable_pool();
    let demand = node_demand(n, q.formula.size()).filter(|_| n <= pool.len());
    match demand {
        Some(need) if need <= budget as u128 => {}
        _ => {
            return Err(Error::TooLarge(format!(
                "{n} variables need a tree of 2^{} nodes, the node budget is {budget}",
                n + 1
            )))
        }
    }
    let var = |level: usize| pool[level];

    let mut b = ProgramBuilder::new();
    b.skip(&q.to_string());
    b.new_node(Some("QBF"));
    reset(&mut b);
    for k in 0..n {
        b.set("", var(k), "");
    }
    type_flag(&mut b, q.quantifiers[0].0);

    // level k of the quantifier tree, built under every node of level k-1
    for k in 1..=n {
        let head = if k == 1 {
            BoolExpr::all(vec![BoolExpr::eq("p", "o"), BoolExpr::eq("l", "_")])
        } else {
            BoolExpr::all(vec![
                BoolExpr::neq(Path::repeat('p', k - 1), "o"),
                BoolExpr::eq(Path::repeat('p', k), "o"),
                BoolExpr::eq("l", "_"),
            ])
        };
        b.match_(head);
        for (side, value) in [('l', "_"), ('r', "o")] {
            b.new_node(Some(if k == n { "L" } else { "Q" }));
            b.set("p", side, "");
            b.set("", 'o', "po");
            reset(&mut b);
            b.set("", var(k - 1), value);
            if k < n {
                type_flag(&mut b, q.quantifiers[k].0);
            } else {
                b.set("", 'i', "o");
                // copy the ancestors' choices down to the leaf
                for j in 1..n {
                    let mut at = Path::repeat('p', n - j);
                    at.push(var(j - 1));
                    let done = b.label();
                    b.set("", var(j - 1), "o");
                    b.if_eq(at, "o", done);
                    b.set("", var(j - 1), "");
                    b.place(done);
                }
            }
            if side == 'l' {
                b.ctr("p");
            }
        }
    }
    b.stop();

    b.block(BLOCK_FORMULA);
    b.match_(BoolExpr::all(vec![
        BoolExpr::eq("i", "o"),
        BoolExpr::eq("l", "_"),
        BoolExpr::neq("x", "o"),
    ]));
    emit_formula(&mut b, q, &q.formula, 'l', 0, &var);
    b.stop();

    b.block(BLOCK_EVALUATE);
    emit_evaluate(&mut b);

    let mut chars: Vec<char> = FIXED.chars().collect();
    chars.extend((0..n).map(var));
    let program = b.finish(DirectionSet::new(chars)?)?;

    let direction_roles = program
        .directions
        .iter()
        .map(|c| {
            let role = match c {
                'o' => "origin".to_string(),
                'l' => "left child".to_string(),
                'r' => "right child".to_string(),
                'p' => "parent".to_string(),
                'A' => "forall / and".to_string(),
                'S' => "exists / or".to_string(),
                'N' => "not".to_string(),
                'v' => "value".to_string(),
                'x' => "ready".to_string(),
                'i' => "quantifier leaf".to_string(),
                _ => {
                    let level = pool.iter().position(|&p| p == c).expect("variable direction");
                    format!("x{}", q.quantifiers[level].1)
                }
            };
            (c, role)
        })
        .collect();

    Ok(CompileArtifact {
        program,
        top_blocks: vec![BLOCK_FORMULA.to_string(), BLOCK_EVALUATE.to_string()],
        direction_roles,
        manifest: None,
        readout: Some(Readout {
            result_node_label: "QBF".to_string(),
            result_direction: 'v',
            true_means: "origin".to_string(),
        }),
    })
}

fn reset(b: &mut ProgramBuilder) {
    for f in FLAGS {
        b.set("", f, "");
    }
}

fn type_flag(b: &mut ProgramBuilder, q: Quantifier) {
    let flag = match q {
        Quantifier::Forall => 'A',
        Quantifier::Exists => 'S',
    };
    b.set("", flag, "o");
}

/// Builds the operator tree of `f` below the current center, leaving the
/// center where it started.
fn emit_formula(
    b: &mut ProgramBuilder,
    q: &QbfInstance,
    f: &Formula,
    side: char,
    depth: usize,
    var: &dyn Fn(usize) -> char,
) {
    let label = match f {
        Formula::Var(k) => format!("x{}", q.quantifiers[*k].1),
        Formula::Not(_) => "NOT".to_string(),
        Formula::And(..) => "AND".to_string(),
        Formula::Or(..) => "OR".to_string(),
    };
    b.new_node(Some(&label));
    b.set("p", side, "");
    b.set("", 'o', "po");
    reset(b);
    match f {
        Formula::Var(k) => {
            let mut at = Path::repeat('p', depth + 1);
            at.push(var(*k));
            let done = b.label();
            b.set("", 'v', "o");
            b.if_eq(at, "o", done);
            b.set("", 'v', "");
            b.place(done);
            b.set("", 'x', "o");
        }
        Formula::Not(a) => {
            b.set("", 'N', "o");
            emit_formula(b, q, a, 'l', depth + 1, var);
            b.ctr("p");
        }
        Formula::And(l, r) | Formula::Or(l, r) => {
            b.set("", if matches!(f, Formula::And(..)) { 'A' } else { 'S' }, "o");
            emit_formula(b, q, l, 'l', depth + 1, var);
            b.ctr("p");
            emit_formula(b, q, r, 'r', depth + 1, var);
            b.ctr("p");
        }
    }
}

/// Bottom-up evaluation: a node whose inputs are ready computes `v`, marks
/// itself ready and drops its children.
fn emit_evaluate(b: &mut ProgramBuilder) {
    b.match_(BoolExpr::all(vec![
        BoolExpr::neq("x", "o"),
        BoolExpr::eq("lx", "o"),
        BoolExpr::any(vec![
            BoolExpr::eq("rx", "o"),
            BoolExpr::eq("N", "o"),
            BoolExpr::eq("i", "o"),
        ]),
    ]));
    let (not, copy, and, tail) = (b.label(), b.label(), b.label(), b.label());
    b.set("", 'x', "o");
    b.if_eq("N", "o", not);
    b.if_eq("i", "o", copy);
    b.if_eq("A", "o", and);

    // or / exists
    b.set("", 'v', "o");
    b.if_eq("lv", "o", tail);
    b.if_eq("rv", "o", tail);
    b.set("", 'v', "");
    b.goto(tail);

    // and / forall
    let (a2, a3) = (b.label(), b.label());
    b.place(and);
    b.set("", 'v', "");
    b.if_eq("lv", "o", a2);
    b.goto(tail);
    b.place(a2);
    b.if_eq("rv", "o", a3);
    b.goto(tail);
    b.place(a3);
    b.set("", 'v', "o");
    b.goto(tail);

    let n2 = b.label();
    b.place(not);
    b.set("", 'v', "o");
    b.if_eq("lv", "o", n2);
    b.goto(tail);
    b.place(n2);
    b.set("", 'v', "");
    b.goto(tail);

    // quantifier leaf: take the formula's value
    let c2 = b.label();
    b.place(copy);
    b.set("", 'v', "");
    b.if_eq("lv", "o", c2);
    b.goto(tail);
    b.place(c2);
    b.set("", 'v', "o");

    b.place(tail);
    b.set("", 'l', "");
    b.set("", 'r', "");
    b.stop();
}

/// Reads the answer left by a compiled program: direction `v` of the
/// center, which must be the node labelled `QBF`.
pub fn qbf_result(state: &MachineState) -> Result<bool> {
    let root = state.center();
    if state.label(root)? != "QBF" {
        return Err(Error::Program(format!("center {root} is not the QBF root")));
    }
    let v = state.edge(root, 'v')?;
    if v == ORIGIN {
        Ok(true)
    } else if v == root {
        Ok(false)
    } else {
        Err(Error::Program(format!("direction v of the root points at node {v}")))
    }
}
