use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mwsmm::asm::parse_program;
use mwsmm::engine::{initial_state, RunLimits};
use mwsmm::graph::{DirectionSet, MachineState, NodeId, Path};
use mwsmm::multiway::{explore, ExploreOptions};
use mwsmm::subst::{compile_subst, Rule, SubstSystem};

const DIRS: &str = "01eow";

fn arb_state() -> impl Strategy<Value = MachineState> {
    (1usize..10).prop_flat_map(|n| {
        let edges = prop::collection::vec(prop::collection::vec(0..n, DIRS.len()), n);
        (edges, 0..n).prop_map(move |(edges, center)| {
            let nodes = edges
                .into_iter()
                .enumerate()
                .map(|(i, es)| (format!("n{i}"), es.into_iter().map(NodeId).collect()))
                .collect();
            MachineState::from_parts(DirectionSet::parse(DIRS).unwrap(), nodes, NodeId(center), n as u64 - 1).unwrap()
        })
    })
}

fn arb_path() -> impl Strategy<Value = Path> {
    prop::collection::vec(prop::sample::select(DIRS.chars().collect::<Vec<_>>()), 0..6)
        .prop_map(|cs| Path::from(cs.into_iter().collect::<String>().as_str()))
}

/// Renumbers nodes by `perm` (old id -> new id), keeping edges and labels.
fn permuted(state: &MachineState, perm: &[usize]) -> MachineState {
    let n = state.node_count();
    let mut nodes = vec![(String::new(), Vec::new()); n];
    for (old, node) in state.nodes().iter().enumerate() {
        let edges = node.edges().iter().map(|t| NodeId(perm[t.0])).collect();
        nodes[perm[old]] = (state.label(NodeId(old)).unwrap().to_string(), edges);
    }
    MachineState::from_parts(
        state.directions().clone(),
        nodes,
        NodeId(perm[state.center().0]),
        state.mass(),
    )
    .unwrap()
}

fn assert_permutation_invariant(state: &MachineState, rng: &mut ChaCha8Rng) {
    let base = state.canonical_signature(state.center(), false).unwrap();
    let labelled = state.canonical_signature(state.center(), true).unwrap();
    let mut perm: Vec<usize> = (0..state.node_count()).collect();
    for _ in 0..100 {
        perm.shuffle(rng);
        let p = permuted(state, &perm);
        let form = p.canonical_signature(p.center(), false).unwrap();
        assert_eq!(form.signature, base.signature);
        assert_eq!(form.hash_hex(), base.hash_hex());
        assert_eq!(
            p.canonical_signature(p.center(), true).unwrap().signature,
            labelled.signature
        );
        for (i, &old) in base.order().iter().enumerate() {
            assert_eq!(form.node_at(i), Some(NodeId(perm[old.0])));
        }
    }
}

proptest! {
    #[test]
    fn path_resolution_composes(state in arb_state(), a in arb_path(), b in arb_path()) {
        let c = state.center();
        let mid = state.resolve(c, &a).unwrap();
        prop_assert_eq!(state.resolve(c, &a.join(&b)).unwrap(), state.resolve(mid, &b).unwrap());
    }

    #[test]
    fn empty_path_is_the_root(state in arb_state()) {
        for id in 0..state.node_count() {
            prop_assert_eq!(state.resolve(NodeId(id), &Path::empty()).unwrap(), NodeId(id));
        }
    }

    #[test]
    fn canonical_form_ignores_numbering(state in arb_state(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        assert_permutation_invariant(&state, &mut rng);
    }

    #[test]
    fn json_round_trip(state in arb_state()) {
        let back = MachineState::from_json(&state.to_json()).unwrap();
        prop_assert_eq!(back, state);
    }

    #[test]
    fn decode_inverts_the_compiled_prologue(
        alphabet_len in 1usize..=4,
        picks in prop::collection::vec(0usize..4, 1..=8),
    ) {
        let alphabet: Vec<char> = "ABCD".chars().take(alphabet_len).collect();
        let init: String = picks.iter().map(|&i| alphabet[i % alphabet_len]).collect();
        let sys = SubstSystem::new(alphabet.clone(), vec![Rule::new("A", "A")], &init).unwrap();
        let art = compile_subst(&sys).unwrap();
        let st = initial_state(&art.program, &RunLimits::default()).unwrap();
        let m = art.manifest.as_ref().unwrap();
        prop_assert_eq!(st.decode_text(m).unwrap(), init.clone());
        let symbols: Vec<String> = init.chars().map(String::from).collect();
        prop_assert_eq!(st.decode_string(m).unwrap(), symbols);
    }
}

#[test]
fn canonical_form_of_evolved_states_ignores_numbering() {
    let table1 = parse_program(include_str!("../../../programs/table1.smm")).unwrap();
    let table2 = parse_program(include_str!("../../../programs/table2.smm")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g1 = explore(&table1, &["R1", "R2"], &ExploreOptions::new(4)).unwrap();
    let g2 = explore(&table2, &["BA"], &ExploreOptions::new(3)).unwrap();
    for s in g1.states.iter().chain(&g2.states) {
        assert_permutation_invariant(&s.state, &mut rng);
    }
}
