mod common;

use std::collections::BTreeMap;

use bmcq::bitblast::BlastOptions;
use bmcq::btor2::{brute_force_reachability, simulate, step_model, BitVecValue, InputDomain, SimState, Witness};
use bmcq::solve::{
    classify_qubits, compute_quantum_advantage, solve_anneal, solve_exhaustive, validate_on_input, Advantage,
    AnnealParams, QubitStatus,
};
use bmcq::{translate, Bit, UnrollOptions};
use common::model;

fn guess(value: u64) -> Witness {
    Witness {
        initial: BTreeMap::new(),
        steps: vec![BTreeMap::from([(3, BitVecValue::new(4, value))])],
    }
}

#[test]
fn counter3_structure_and_steps() {
    let m = model("counter3");
    assert_eq!((m.states().len(), m.bads().len(), m.inputs().len()), (1, 1, 0));
    assert!(m.init_of(4).is_some() && m.next_of(4).is_some());

    let state = |v| SimState { values: BTreeMap::from([(4, bmcq::btor2::Value::Bv(BitVecValue::new(3, v)))]), step: 0 };
    let step = step_model(&m, &state(0), &BTreeMap::new()).unwrap();
    assert_eq!(step.next.get(4).unwrap().as_bv().unwrap().bits(), 1);
    assert_eq!(step.bad_flags[&10], false);
    assert_eq!(step_model(&m, &state(7), &BTreeMap::new()).unwrap().bad_flags[&10], true);
}

#[test]
fn counter3_reachability() {
    let m = model("counter3");
    let at7 = brute_force_reachability(&m, 7, &InputDomain::full(), 1 << 20).unwrap();
    assert_eq!(at7.len(), 1);
    assert_eq!(at7[0].step, 7);
    assert!(brute_force_reachability(&m, 6, &InputDomain::full(), 1 << 20).unwrap().is_empty());
}

#[test]
fn guess4_reachability() {
    let found = brute_force_reachability(&model("guess4"), 0, &InputDomain::full(), 1 << 20).unwrap();
    assert_eq!(found.len(), 1);
    assert_eq!(found[0].witness.steps[0][&3].bits(), 10);
}

#[test]
fn counter3_folds_completely() {
    let m = model("counter3");
    let seven = translate(&m, 7, UnrollOptions::default()).unwrap();
    assert_eq!((seven.bqm.num_vars(), seven.bqm.offset()), (0, 0));
    assert_eq!(seven.frames[7].bads[&10], Bit::ONE);
    assert!(seven.frames[..7].iter().all(|f| f.bads[&10] == Bit::ZERO));
    let six = translate(&m, 6, UnrollOptions::default()).unwrap();
    assert_eq!((six.bqm.num_vars(), six.bqm.offset()), (0, 1));
    assert!(six.frame_stats().iter().all(|s| s.new_vars == 0));

    let strong = UnrollOptions { blast: BlastOptions { pin_strength: 5, ..BlastOptions::default() } };
    assert_eq!(translate(&m, 6, strong).unwrap().bqm.offset(), 5);

    let best = solve_exhaustive(&six.bqm, 24).unwrap();
    assert_eq!((best.energy, best.assignment.len()), (1, 0));
    let v = validate_on_input(&seven, &m, &Witness::default()).unwrap();
    assert_eq!(v.energy, 0);
    assert!(v.agrees);
}

#[test]
fn guess4_ground_state() {
    let m = model("guess4");
    let u = translate(&m, 0, UnrollOptions::default()).unwrap();
    assert_eq!(u.frames[0].inputs[&3].var_count(), 4);
    assert!(!u.frames[0].bads[&6].is_const());

    let best = solve_exhaustive(&u.bqm, 24).unwrap();
    assert_eq!(best.energy, 0);
    assert_eq!(u.decode_witness(&m, &best.assignment).steps[0][&3].bits(), 10);

    // Energy 0 only at the guess 10.
    for value in 0..16 {
        let v = validate_on_input(&u, &m, &guess(value)).unwrap();
        assert_eq!(v.energy, if value == 10 { 0 } else { 1 }, "guess {value}");
        assert!(v.agrees);
    }
}

#[test]
fn guess4_annealing() {
    let u = translate(&model("guess4"), 0, UnrollOptions::default()).unwrap();
    for seed in 1..=8 {
        let params = AnnealParams { restarts: 64, ..AnnealParams::with_seed(seed) };
        let r = solve_anneal(&u.bqm, &params);
        assert_eq!(r.energy, 0, "seed {seed}");
        assert_eq!(r, solve_anneal(&u.bqm, &params));
    }
    let idle = AnnealParams { sweeps: 0, ..AnnealParams::with_seed(3) };
    assert!(solve_anneal(&u.bqm, &idle).energy >= 0);
}

#[test]
fn annealing_never_beats_exhaustive() {
    for (name, bound) in [("toggle", 3), ("twobad", 3), ("memory4", 1)] {
        let u = translate(&model(name), bound, UnrollOptions::default()).unwrap();
        let exact = solve_exhaustive(&u.bqm, 28).unwrap().energy;
        let sampled = solve_anneal(&u.bqm, &AnnealParams::with_seed(11)).energy;
        assert!(sampled >= exact, "{name}");
    }
}

#[test]
fn constant_growth_after_first_frame() {
    let stats = translate(&model("accumulator"), 12, UnrollOptions::default()).unwrap().frame_stats();
    let later: Vec<usize> = stats[1..].iter().map(|s| s.new_vars).collect();
    assert!(later.windows(2).all(|w| w[0] == w[1]), "{later:?}");
}

#[test]
fn decoded_witnesses_replay() {
    let m = model("twobad");
    let u = translate(&m, 3, UnrollOptions::default()).unwrap();
    let best = solve_exhaustive(&u.bqm, 28).unwrap();
    assert_eq!(best.energy, 0);
    let w = u.decode_witness(&m, &best.assignment);
    assert_eq!(simulate(&m, &w, 3).unwrap().first_bad, Some((3, vec![12])));
}

#[test]
fn qubo_equivalence_on_fixtures() {
    for name in common::BMC_FIXTURES {
        let cases = common::check_prop2(name).unwrap();
        assert!(cases.iter().any(|c| c.energy == 0), "{name}: {cases:?}");
    }
}

#[test]
fn qubit_classification() {
    let u = translate(&model("guess4"), 0, UnrollOptions::default()).unwrap();
    let status = classify_qubits(&u.bqm, 16);
    for v in u.bqm.free_vars() {
        assert_eq!(status[v.index()], QubitStatus::Superposition);
    }
    // Bit-level folding leaves no gate of the comparator constant over all inputs.
    assert!(status.iter().all(|s| *s == QubitStatus::Superposition));
    let one = classify_qubits(&u.bqm, 1);
    assert!(one.iter().filter(|s| s.is_undetermined()).all(|s| matches!(s, QubitStatus::Approximated(_))));
    assert_eq!(one.iter().filter(|s| s.is_undetermined()).count(), u.bqm.num_vars() - 4);

    let none = classify_qubits(&u.bqm, 0);
    let inputs = u.bqm.free_vars().len();
    assert_eq!(none.iter().filter(|s| **s == QubitStatus::Undetermined).count(), u.bqm.num_vars() - inputs);

    let counter = translate(&model("counter3"), 6, UnrollOptions::default()).unwrap();
    assert!(classify_qubits(&counter.bqm, 1 << 20).is_empty());
}

#[test]
fn advantage_reports() {
    let m = model("counter3");
    let report = compute_quantum_advantage(&m, 100, 1 << 20, 8, UnrollOptions::default()).unwrap();
    assert_eq!(report.outcome, Advantage::NotFound);

    let g = model("guess4");
    let report = compute_quantum_advantage(&g, 0, 0, 4, UnrollOptions::default()).unwrap();
    assert!(matches!(report.outcome, Advantage::Negative { exhausted_at: 0, .. }), "{report:?}");
}
