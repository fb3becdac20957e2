mod common;

use bmcq::beator::{emulate, translate_beator, OutcomeKind};
use bmcq::btor2::parse_btor2;
use common::{lockstep, lockstep_all_bytes, program};

#[test]
fn running_example_lockstep() {
    let (h, bads) = lockstep_all_bytes("running_example.s").unwrap();
    assert_eq!(h.get("b8"), Some(&1));
    assert_eq!(h.get("Exit(0)"), Some(&255));
    assert_eq!(bads[0].kind, OutcomeKind::Bad { labels: vec!["b8"], step: 37 });
    assert_eq!((bads[0].instructions, bads[0].input_bytes), (32, 1));
}

#[test]
fn running_example_outcomes() {
    let p = program("running_example.s");
    let zero = emulate(&p, b"0", 1000).unwrap();
    assert_eq!(zero.kind, OutcomeKind::Exit(0));
    assert_eq!((zero.instructions_executed, zero.model_steps), (26, 31));
    let one = emulate(&p, b"1", 1000).unwrap();
    assert_eq!(one.kind, OutcomeKind::Bad { labels: vec!["b8"], step: 37 });
}

#[test]
fn divide_lockstep() {
    let (h, _) = lockstep_all_bytes("divide.s").unwrap();
    assert_eq!(h.get("b2"), Some(&1));
    assert!(h.get("b1").is_some_and(|&n| n > 0));
    assert!(h.get("Exit(0)").is_some_and(|&n| n > 0));
}

#[test]
fn call_lockstep() {
    let (h, _) = lockstep_all_bytes("call.s").unwrap();
    assert_eq!(h.get("b4+b7"), Some(&1));
    assert_eq!(h.get("Exit(0)"), Some(&255));
}

#[test]
fn stack_overflow_lockstep() {
    let p = program("stack.s");
    let beator = translate_beator(&p).unwrap();
    let model = parse_btor2(&beator.text).unwrap();
    let run = lockstep(&p, &beator, &model, &[]).unwrap();
    assert_eq!(run.kind, OutcomeKind::Bad { labels: vec!["b10"], step: 7 });
}

#[test]
fn translation_is_deterministic() {
    let a = translate_beator(&program("running_example.s")).unwrap().text;
    let b = translate_beator(&program("running_example.s")).unwrap().text;
    assert_eq!(a, b);
    for label in ["b6", "b7", "b8", "b9", "b10", "b11"] {
        assert!(a.contains(&format!(" {label}\n")));
    }
    assert!(!a.contains(" b5\n"));
}

#[test]
fn nonzero_exit_is_b1() {
    let p = bmcq::beator::assemble("addi a0,zero,1\naddi a7,zero,93\necall\n").unwrap();
    let beator = translate_beator(&p).unwrap();
    let model = parse_btor2(&beator.text).unwrap();
    let run = lockstep(&p, &beator, &model, &[]).unwrap();
    assert_eq!(run.kind, OutcomeKind::Bad { labels: vec!["b1"], step: 2 });
}
