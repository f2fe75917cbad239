use super::*;
use crate::asm::parse_program;

const TABLE1: &str = include_str!("../../../../programs/table1.smm");
const TABLE2: &str = include_str!("../../../../programs/table2.smm");

fn ab() -> DecodeManifest {
    DecodeManifest::binary(&["A".into(), "B".into()], &['0'], 'e', 'w', 'o').unwrap()
}

fn table1(depth: usize) -> EvolutionGraph {
    let p = parse_program(TABLE1).unwrap();
    explore(&p, &["R1", "R2"], &ExploreOptions::new(depth).with_manifest(ab())).unwrap()
}

fn table2() -> EvolutionGraph {
    let p = parse_program(TABLE2).unwrap();
    explore(&p, &["BA"], &ExploreOptions::new(64).with_manifest(ab())).unwrap()
}

#[test]
fn table1_two_levels() {
    let g = table1(2);
    assert_eq!(g.states_per_depth(), vec![1, 1, 2]);
    assert_eq!(g.strings_at(0), vec!["A"]);
    assert_eq!(g.strings_at(1), vec!["BBB"]);
    assert_eq!(g.strings_at(2), vec!["AB", "BA"]);
    assert_eq!(g.edges.len(), 3);
    assert_eq!(g.frontier.len(), 2);
    assert_eq!(check_convergence(&g).status, Convergence::Unknown);
}

#[test]
fn events_of_table1_states() {
    let p = parse_program(TABLE1).unwrap();
    let tops = crate::engine::top_block_heads(&p, &["R1", "R2"]).unwrap();
    let g = table1(1);
    let root = &g.states[0].state;
    let ev = enumerate_events(root, &p, &tops).unwrap();
    assert_eq!(ev.len(), 1);
    assert_eq!(ev[0].block, "R1");
    let bbb = &g.states[1].state;
    let ev = enumerate_events(bbb, &p, &tops).unwrap();
    assert_eq!(
        ev.iter().map(|e| (e.block.as_str(), e.node.0)).collect::<Vec<_>>(),
        vec![("R2", 1), ("R2", 2)]
    );
    let before = bbb.clone();
    let a = apply_event(bbb, &p, &ev[0], &RunLimits::default()).unwrap();
    let b = apply_event(bbb, &p, &ev[1], &RunLimits::default()).unwrap();
    assert_eq!(a.decode_text(&ab()).unwrap(), "AB");
    assert_eq!(b.decode_text(&ab()).unwrap(), "BA");
    assert_eq!(bbb, &before);
}

#[test]
fn depth_zero_is_root_only() {
    let g = table1(0);
    assert_eq!(g.states.len(), 1);
    assert!(g.edges.is_empty());
    assert_eq!(g.frontier, vec![0]);
    assert_eq!(export_evolution_dot(&g).matches("->").count(), 0);
}

#[test]
fn table2_converges_to_sorted_string() {
    let g = table2();
    let r = check_convergence(&g);
    assert!(r.converged());
    assert_eq!(r.terminal_string.as_deref(), Some("AAABBB"));
    assert_eq!(r.path_lengths, Some((6, 6)));
    assert_eq!(r.explored_depth, 6);
    assert_eq!(g.frontier.len(), 0);
}

#[test]
fn table2_merges_diamonds() {
    let g = table2();
    // BABABA has three BA redexes; two of the depth-2 strings are reached twice
    assert_eq!(g.strings_at(1).len(), 3);
    let mut into: HashMap<usize, usize> = HashMap::new();
    for e in &g.edges {
        *into.entry(e.to).or_default() += 1;
    }
    assert!(into.values().any(|&c| c > 1));
    let dot = export_evolution_dot(&g);
    assert_eq!(dot.matches("->").count(), g.edges.len());
    assert_eq!(dot.matches("[label=\"AAABBB\"]").count(), 1);
}

#[test]
fn no_match_converges_at_depth_zero() {
    let p = parse_program("new A\nset 0\nstop\n.block R\nmatch 0 == o\nstop").unwrap();
    let g = explore(&p, &["R"], &ExploreOptions::new(5)).unwrap();
    let r = check_convergence(&g);
    assert!(r.converged());
    assert_eq!(r.explored_depth, 0);
    assert_eq!(r.path_lengths, Some((0, 0)));
}

#[test]
fn cycles_are_not_convergent() {
    // a flag toggled back and forth: two states forever
    let src = "new A\nstop\n.block ON\nmatch f != o\nset f o\nstop\n.block OFF\nmatch f == o\nset f\nstop";
    let p = parse_program(src).unwrap();
    let g = explore(&p, &["ON", "OFF"], &ExploreOptions::new(10)).unwrap();
    assert_eq!(g.states.len(), 2);
    assert!(!g.is_acyclic());
    assert_eq!(check_convergence(&g).status, Convergence::Diverged);
}

#[test]
fn threads_do_not_change_the_result() {
    let p = parse_program(TABLE2).unwrap();
    let one = explore(&p, &["BA"], &ExploreOptions::new(64).with_manifest(ab())).unwrap();
    let four = explore(
        &p,
        &["BA"],
        &ExploreOptions::new(64).with_manifest(ab()).with_threads(4),
    )
    .unwrap();
    assert_eq!(export_evolution_json(&one), export_evolution_json(&four));
    assert_eq!(export_evolution_dot(&one), export_evolution_dot(&four));
}

#[test]
fn json_layout() {
    let g = table1(2);
    let v: serde_json::Value = serde_json::from_str(&export_evolution_json(&g)).unwrap();
    assert_eq!(v["root"], v["states"][0]["sig"]);
    assert_eq!(v["states"].as_array().unwrap().len(), 4);
    assert_eq!(v["edges"][0]["block"], "R1");
    assert_eq!(v["edges"][0]["node"], 0);
    assert_eq!(state_file_name(&g.states[0]).len(), 21);
}

#[test]
fn state_budget() {
    let p = parse_program(TABLE1).unwrap();
    let mut opts = ExploreOptions::new(10);
    opts.max_states = Some(3);
    assert_eq!(explore(&p, &["R1", "R2"], &opts).unwrap_err().code(), "E_LIMIT");
}
