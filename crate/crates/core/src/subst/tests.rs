use super::*;
use crate::asm::{format_program, parse_program, validate_program};
use crate::engine::{initial_state, run_deterministic, RunLimits};
use crate::error::Error;
use crate::multiway::{check_convergence, explore, Convergence, ExploreOptions};

const GROWTH: &str = "rule: A -> BBB\nrule: BB -> A\ninit: A\n";
const SORT: &str = "# bubble the As left\nalphabet: A B\nrule: BA -> AB\ninit: BABABA\n";

fn multiway(sys: &SubstSystem, depth: usize) -> crate::multiway::EvolutionGraph {
    let art = compile_subst(sys).unwrap();
    let opts = ExploreOptions::new(depth).with_manifest(art.manifest.clone().unwrap());
    explore(&art.program, &art.top_blocks, &opts).unwrap()
}

#[test]
fn parses_rules_and_infers_alphabet() {
    let sys = parse_subst(GROWTH).unwrap();
    assert_eq!(sys.alphabet, vec!['A', 'B']);
    assert_eq!(sys.rules, vec![Rule::new("A", "BBB"), Rule::new("BB", "A")]);
    assert_eq!(sys.initial_text(), "A");
    assert_eq!(sys.to_string(), "A->BBB, BB->A; A");
    let sys = parse_subst("alphabet: C A B\nrule: A -> C\ninit: AB").unwrap();
    assert_eq!(sys.alphabet, vec!['C', 'A', 'B']);
}

#[test]
fn parse_errors() {
    let code = |t: &str| parse_subst(t).unwrap_err().code();
    assert_eq!(code("rule: A -> B\n"), "E_SYNTAX");
    assert_eq!(code("init: A\ninit: B\n"), "E_SYNTAX");
    assert_eq!(code("rule: A B\ninit: A"), "E_SYNTAX");
    assert_eq!(code("rule: A ->\ninit: A"), "E_SYNTAX");
    assert_eq!(code("bogus: A\ninit: A"), "E_SYNTAX");
    assert_eq!(code("alphabet: A\nrule: A -> B\ninit: A"), "E_ALPHABET");
    assert_eq!(code("alphabet: AB\ninit: A"), "E_ALPHABET");
    match parse_subst("init: A\nrule: A -> B+\n") {
        Err(Error::Syntax { line: 2, col: 13, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn occurrences_overlap() {
    let s: Vec<char> = "BBBB".chars().collect();
    assert_eq!(occurrences(&['B', 'B'], &s), vec![0, 1, 2]);
    assert!(occurrences(&['A'], &s).is_empty());
    assert!(occurrences(&['B'; 5], &s).is_empty());
}

#[test]
fn oracle_growth_system() {
    let g = subst_oracle(&parse_subst(GROWTH).unwrap(), 3);
    assert_eq!(g.strings_at(1), ["BBB"]);
    assert_eq!(g.strings_at(2), ["AB", "BA"]);
    assert_eq!(g.strings_at(3), ["BBBB"]);
    assert_eq!(g.edges.len(), 5);
    assert_eq!(g.frontier, vec!["BBBB".to_string()]);
}

#[test]
fn oracle_sort_system_terminates() {
    let g = subst_oracle(&parse_subst(SORT).unwrap(), 20);
    assert_eq!(g.terminals, vec!["AAABBB".to_string()]);
    assert!(g.frontier.is_empty());
    assert_eq!(g.levels.len(), 7);
}

#[test]
fn prologue_spells_initial_string() {
    for text in [GROWTH, SORT, "rule: C -> AB\ninit: CABBAC"] {
        let sys = parse_subst(text).unwrap();
        let art = compile_subst(&sys).unwrap();
        let st = initial_state(&art.program, &RunLimits::default()).unwrap();
        assert_eq!(
            st.decode_text(art.manifest.as_ref().unwrap()).unwrap(),
            sys.initial_text()
        );
        assert_eq!(st.mass(), sys.initial.len() as u64);
    }
}

#[test]
fn three_symbols_use_two_bits() {
    let sys = parse_subst("rule: AB -> C\nrule: C -> BA\ninit: AAB").unwrap();
    let art = compile_subst(&sys).unwrap();
    let m = art.manifest.as_ref().unwrap();
    assert_eq!(m.bits, vec!['0', '1']);
    assert_eq!(art.program.directions.to_string(), "01eow");
    assert_eq!(art.top_blocks, vec!["R1", "R2"]);
    let g = multiway(&sys, 4);
    let o = subst_oracle(&sys, 4);
    for d in 0..=4 {
        assert_eq!(g.strings_at(d), o.strings_at(d), "depth {d}");
    }
}

#[test]
fn compiled_growth_matches_oracle_and_merges() {
    let sys = parse_subst(GROWTH).unwrap();
    let g = multiway(&sys, 3);
    assert_eq!(g.strings_at(2), ["AB", "BA"]);
    assert_eq!(g.strings_at(3), ["BBBB"]);
    assert_eq!(g.states_per_depth(), vec![1, 1, 2, 1]);
    assert_eq!(g.edges.len(), 5);
}

#[test]
fn compiled_sort_converges() {
    let sys = parse_subst(SORT).unwrap();
    let g = multiway(&sys, 64);
    let r = check_convergence(&g);
    assert_eq!(r.status, Convergence::Converged);
    assert_eq!(r.terminal_string.as_deref(), Some("AAABBB"));
    assert_eq!(r.path_lengths, Some((6, 6)));

    let art = compile_subst(&sys).unwrap();
    let run = run_deterministic(&art.program, &art.top_blocks, &RunLimits::default()).unwrap();
    assert_eq!(
        run.final_state.decode_text(art.manifest.as_ref().unwrap()).unwrap(),
        "AAABBB"
    );
}

#[test]
fn shrinking_rules_relink_the_list() {
    let sys = parse_subst("rule: ABA -> B\nrule: BB -> A\ninit: ABABBA").unwrap();
    let g = multiway(&sys, 6);
    let o = subst_oracle(&sys, 6);
    for d in 0..o.levels.len() {
        assert_eq!(g.strings_at(d), o.strings_at(d), "depth {d}");
    }
    for s in &g.states {
        s.state.check_invariants().unwrap();
        let len = s.string.as_ref().unwrap().len();
        assert_eq!(s.form.reachable_count, len + 1, "spliced nodes must be unreachable");
    }
}

#[test]
fn program_round_trips_and_validates() {
    let art = compile_subst(&parse_subst(GROWTH).unwrap()).unwrap();
    assert!(validate_program(&art.program).is_empty());
    let text = format_program(&art.program);
    assert_eq!(parse_program(&text).unwrap(), art.program);
    assert_eq!(art.sidecar_json(), art.manifest.as_ref().unwrap().to_json());
}

#[test]
fn code_width_follows_alphabet_size() {
    let syms: Vec<char> = ('0'..='9').chain('a'..='z').chain('A'..='Z').collect();
    for (len, width) in [(1, 1), (2, 1), (3, 2), (4, 2), (5, 3), (62, 6)] {
        let alphabet = syms[..len].to_vec();
        let sys = SubstSystem::new(alphabet, vec![Rule::new("0", "0")], "0").unwrap();
        let art = compile_subst(&sys).unwrap();
        assert_eq!(art.manifest.unwrap().bits.len(), width, "{len} symbols");
    }
}
