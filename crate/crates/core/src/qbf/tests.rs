use super::*;
use crate::engine::{run_deterministic, HaltReason, RunLimits};

fn run(q: &QbfInstance) -> (bool, crate::engine::RunReport) {
    let art = compile_qbf(q).unwrap();
    let r = run_deterministic(&art.program, &art.top_blocks, &RunLimits::default()).unwrap();
    (qbf_result(&r.final_state).unwrap(), r)
}

#[test]
fn parse_examples() {
    let q = parse_qbf("exists x1 exists x2 : (x1 & x2)").unwrap();
    assert_eq!((q.n(), q.d()), (2, 1));
    assert_eq!(q.formula, Formula::and(Formula::Var(0), Formula::Var(1)));
    let q = parse_qbf("forall x1 : x1").unwrap();
    assert_eq!((q.n(), q.d()), (1, 0));
    assert_eq!(parse_qbf("exists x1 : x2").unwrap_err().code(), "E_UNBOUND_VAR");
    assert_eq!(
        parse_qbf("exists x1 forall x1 : x1").unwrap_err().code(),
        "E_DOUBLE_QUANT"
    );
    assert_eq!(parse_qbf("exists x1 x1").unwrap_err().code(), "E_SYNTAX");
    assert_eq!(parse_qbf(": x1").unwrap_err().code(), "E_SYNTAX");
    assert_eq!(parse_qbf("exists x1 : (x1").unwrap_err().code(), "E_SYNTAX");
    assert_eq!(parse_qbf("exists x1 : x1 x1").unwrap_err().code(), "E_SYNTAX");
}

#[test]
fn precedence_and_display() {
    let q = parse_qbf("exists x1 forall x2 exists x3 : x1 & !x2 | x3").unwrap();
    assert_eq!(
        q.formula,
        Formula::or(
            Formula::and(Formula::Var(0), Formula::negate(Formula::Var(1))),
            Formula::Var(2)
        )
    );
    assert_eq!(parse_qbf(&q.to_string()).unwrap(), q);
    // variables keep their source numbers whatever the quantifier order
    let q = parse_qbf("forall x7 exists x3 : x3 | x7").unwrap();
    assert_eq!(q.formula, Formula::or(Formula::Var(1), Formula::Var(0)));
    assert_eq!(q.to_string(), "forall x7 exists x3 : (x3 | x7)");
}

#[test]
fn oracle_examples() {
    assert!(eval_qbf_oracle(&parse_qbf("exists x1 exists x2 : (x1 & x2)").unwrap()));
    assert!(!eval_qbf_oracle(&parse_qbf("forall x1 : x1").unwrap()));
    assert!(eval_qbf_oracle(&parse_qbf("exists x1 forall x2 : (x1 | !x2)").unwrap()));
    assert!(!eval_qbf_oracle(&parse_qbf("forall x1 exists x2 : (x1 & x2)").unwrap()));
}

#[test]
fn fig3_instance_runs_true() {
    let q = parse_qbf("exists x1 exists x2 : (x1 & x2)").unwrap();
    let (value, r) = run(&q);
    assert!(value);
    assert_eq!(r.halt, HaltReason::EmptySelection);
}

#[test]
fn forall_x1_x1_runs_false() {
    let (value, r) = run(&parse_qbf("forall x1 : x1").unwrap());
    assert!(!value);
    assert_eq!(r.halt, HaltReason::EmptySelection);
}

#[test]
fn compiled_programs_validate_and_round_trip() {
    let q = parse_qbf("exists x1 forall x2 exists x3 : !(x1 & x2) | (x3 & !x1)").unwrap();
    let art = compile_qbf(&q).unwrap();
    assert!(crate::asm::validate_program(&art.program).is_empty());
    assert_eq!(crate::asm::parse_program(&art.program_text()).unwrap(), art.program);
    assert_eq!(art.program.directions.len(), 13);
    assert_eq!(art.direction_roles.len(), 13);
    let v: serde_json::Value = serde_json::from_str(&art.sidecar_json()).unwrap();
    assert_eq!(
        v,
        serde_json::json!({"result_node_label":"QBF","result_direction":"v","true_means":"origin"})
    );
}

#[test]
fn prologue_builds_a_complete_tree() {
    for n in 1..=4 {
        let kinds = vec![Quantifier::Exists; n];
        let art = compile_qbf(&QbfInstance::new(&kinds, Formula::Var(0))).unwrap();
        let s = crate::engine::initial_state(&art.program, &RunLimits::default()).unwrap();
        assert_eq!(s.mass(), (1u64 << (n + 1)) - 1);
        assert_eq!(s.label(s.center()).unwrap(), "QBF");
    }
}

#[test]
fn small_exhaustive_agreement() {
    use Quantifier::*;
    let leaves = [Formula::Var(0), Formula::Var(1)];
    let mut formulas: Vec<Formula> = leaves.to_vec();
    for a in &leaves {
        formulas.push(Formula::negate(a.clone()));
        for b in &leaves {
            formulas.push(Formula::and(a.clone(), b.clone()));
            formulas.push(Formula::or(a.clone(), b.clone()));
        }
    }
    for f in formulas {
        for kinds in [[Forall, Forall], [Forall, Exists], [Exists, Forall], [Exists, Exists]] {
            let q = QbfInstance::new(&kinds, f.clone());
            let (value, r) = run(&q);
            assert_eq!(value, eval_qbf_oracle(&q), "{q}");
            assert_eq!(r.halt, HaltReason::EmptySelection);
        }
    }
}

#[test]
fn too_large_instances_are_refused() {
    let kinds = vec![Quantifier::Forall; 12];
    let q = QbfInstance::new(&kinds, Formula::Var(0));
    assert_eq!(compile_qbf_with_budget(&q, 1000).unwrap_err().code(), "E_TOO_LARGE");
    let kinds = vec![Quantifier::Forall; 200];
    let q = QbfInstance::new(&kinds, Formula::Var(0));
    assert_eq!(compile_qbf(&q).unwrap_err().code(), "E_TOO_LARGE");
}
