#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use bmcq::bitblast::{BlastOptions, Blaster, MemoryImage, Word, WordOp};
use bmcq::bqm::{BinaryQuadraticModel, TraceEntry};
use bmcq::btor2::{parse_btor2, ArrayValue, BitVecValue};
use bmcq::{TransitionModel, VarId};

/// BTOR2 fixtures for the QUBO/reachability equivalence check.
pub const BMC_FIXTURES: [&str; 5] = ["counter3", "guess4", "toggle", "memory4", "twobad"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn model(name: &str) -> TransitionModel {
    parse_btor2(&fixture_text(&format!("{name}.btor2"))).unwrap()
}

fn set(assignment: &mut HashMap<VarId, bool>, word: &Word, value: u64) {
    for (i, bit) in word.bits.iter().enumerate() {
        if let Some(v) = bit.as_var() {
            assignment.insert(v, (value >> i) & 1 == 1);
        }
    }
}

fn mask(w: u32) -> u64 {
    (1u64 << w) - 1
}

/// Operators checked for circuit equivalence, by BTOR2 keyword.
pub const OPERATORS: [&str; 20] = [
    "add", "sub", "mul", "inc", "dec", "ult", "ulte", "ugt", "ugte", "eq", "neq", "and", "not", "ite", "uext",
    "slice", "udiv", "urem", "read", "write",
];

fn reference(op: &str, w: u32, x: u64, y: u64) -> u64 {
    let (a, b) = (BitVecValue::new(w, x), BitVecValue::new(w, y));
    match op {
        "add" => a.add(b).bits(),
        "sub" => a.sub(b).bits(),
        "mul" => a.mul(b).bits(),
        "inc" => a.inc().bits(),
        "dec" => a.dec().bits(),
        "and" => a.and(b).bits(),
        "not" => a.not().bits(),
        "udiv" => a.udiv(b).bits(),
        "urem" => a.urem(b).bits(),
        "ult" => (x < y) as u64,
        "ulte" => (x <= y) as u64,
        "ugt" => (x > y) as u64,
        "ugte" => (x >= y) as u64,
        "eq" => (x == y) as u64,
        "neq" => (x != y) as u64,
        "uext" => a.uext(3).bits(),
        "slice" => a.slice(w - 1, 1).bits(),
        _ => unreachable!("{op}"),
    }
}

fn word_op(op: &str) -> Option<WordOp> {
    Some(match op {
        "add" => WordOp::Add,
        "sub" => WordOp::Sub,
        "mul" => WordOp::Mul,
        "inc" => WordOp::Inc,
        "dec" => WordOp::Dec,
        "ult" => WordOp::Ult,
        "ulte" => WordOp::Ulte,
        "ugt" => WordOp::Ugt,
        "ugte" => WordOp::Ugte,
        "eq" => WordOp::Eq,
        "neq" => WordOp::Neq,
        "and" => WordOp::And,
        "not" => WordOp::Not,
        _ => return None,
    })
}

/// Runs the forward pass on every operand combination and compares the
/// circuit output with the simulator's operator. Every forward assignment
/// must also have energy 0.
pub fn check_forward(op: &str, w: u32) -> Result<(), String> {
    let mut blaster = Blaster::new(BlastOptions::default());
    let a = Word::fresh(&mut blaster.bqm, w);
    let b = Word::fresh(&mut blaster.bqm, w);
    let c = Word::fresh(&mut blaster.bqm, 1);
    let two = |op: &str, blaster: &mut Blaster| -> Word {
        match op {
            "uext" => blaster.blast_word_op(WordOp::Uext(3), &[&a]).unwrap(),
            "slice" => blaster.blast_word_op(WordOp::Slice { upper: w - 1, lower: 1 }, &[&a]).unwrap(),
            "ite" => blaster.blast_word_op(WordOp::Ite, &[&c, &a, &b]).unwrap(),
            "udiv" => blaster.udiv_urem(&a, &b).unwrap().0,
            "urem" => blaster.udiv_urem(&a, &b).unwrap().1,
            other => {
                let op = word_op(other).unwrap();
                let unary = matches!(op, WordOp::Inc | WordOp::Dec | WordOp::Not);
                let operands: Vec<&Word> = if unary { vec![&a] } else { vec![&a, &b] };
                blaster.blast_word_op(op, &operands).unwrap()
            }
        }
    };
    let out = two(op, &mut blaster);
    let bqm = blaster.into_bqm();
    let conditions = if op == "ite" { 2 } else { 1 };
    for cond in 0..conditions {
        for x in 0..1u64 << w {
            for y in 0..1u64 << w {
                let mut free = HashMap::new();
                set(&mut free, &a, x);
                set(&mut free, &b, y);
                set(&mut free, &c, cond);
                for v in bqm.free_vars() {
                    free.entry(*v).or_insert(false);
                }
                let assignment = bqm.forward_assignment(&free).map_err(|e| e.to_string())?;
                let got = out.value(&assignment);
                let want = if op == "ite" {
                    if cond == 1 { x } else { y }
                } else {
                    reference(op, w, x, y)
                };
                if got != want {
                    return Err(format!("{op} w={w} c={cond} x={x} y={y}: circuit {got}, simulator {want}"));
                }
                let energy = bqm.evaluate_energy(&assignment).unwrap();
                if energy != 0 {
                    return Err(format!("{op} w={w} x={x} y={y}: forward assignment has energy {energy}"));
                }
            }
        }
    }
    Ok(())
}

/// Recomputes every gate output from its inputs, leaving division variables
/// as they are.
fn fill_gates(bqm: &BinaryQuadraticModel, x: &mut [bool]) {
    for entry in bqm.trace() {
        if let TraceEntry::Gate(g) = entry {
            let a = x[g.x.index()];
            let b = g.y.map_or(false, |y| x[y.index()]);
            x[g.out.index()] = g.kind.eval(a, b);
            if let Some(anc) = g.ancilla {
                x[anc.index()] = g.kind.ancilla(a, b);
            }
        }
    }
}

/// Division checked by minimization. All penalties are nonnegative and every
/// gate penalty is positive off its relation, so a zero-energy assignment is
/// gate-consistent: enumerating every quotient/remainder candidate with
/// gate-consistent completion enumerates every candidate ground state.
/// The ground states must be exactly the simulator's results (any candidate
/// for a zero divisor when guarded, none when strict).
pub fn check_division_by_minimization(w: u32, guarded: bool) -> Result<(), String> {
    let options = BlastOptions { guard_zero_divisor: guarded, ..BlastOptions::default() };
    let mut blaster = Blaster::new(options);
    let a = Word::fresh(&mut blaster.bqm, w);
    let b = Word::fresh(&mut blaster.bqm, w);
    let (q, r) = blaster.udiv_urem(&a, &b).unwrap();
    let bqm = blaster.into_bqm();
    let (qv, rv) = match bqm.trace().iter().find_map(|e| match e {
        TraceEntry::DivRem(d) => Some((d.quotient.clone(), d.remainder.clone())),
        _ => None,
    }) {
        Some(pair) => pair,
        None => return Err("no division constraint".into()),
    };
    let mut x = vec![false; bqm.num_vars()];
    for dividend in 0..1u64 << w {
        for divisor in 0..1u64 << w {
            let mut zeros = Vec::new();
            for candidate in 0..1u64 << (2 * w) {
                for (i, bit) in a.bits.iter().enumerate() {
                    x[bit.as_var().unwrap().index()] = (dividend >> i) & 1 == 1;
                }
                for (i, bit) in b.bits.iter().enumerate() {
                    x[bit.as_var().unwrap().index()] = (divisor >> i) & 1 == 1;
                }
                for i in 0..w as usize {
                    x[qv[i].index()] = (candidate >> i) & 1 == 1;
                    x[rv[i].index()] = (candidate >> (w as usize + i)) & 1 == 1;
                }
                fill_gates(&bqm, &mut x);
                let energy = bqm.evaluate_energy(&x).unwrap();
                if energy < 0 {
                    return Err(format!("negative energy {energy}"));
                }
                if energy == 0 {
                    zeros.push((q.value(&x), r.value(&x)));
                }
            }
            let expected = (
                BitVecValue::new(w, dividend).udiv(BitVecValue::new(w, divisor)).bits(),
                BitVecValue::new(w, dividend).urem(BitVecValue::new(w, divisor)).bits(),
            );
            let ok = match (divisor, guarded) {
                (0, true) => zeros.len() == 1 << (2 * w) && zeros.iter().all(|z| *z == expected),
                (0, false) => zeros.is_empty(),
                _ => zeros == vec![expected],
            };
            if !ok {
                return Err(format!(
                    "w={w} {dividend}/{divisor} guarded={guarded}: {} ground states, expected {expected:?}",
                    zeros.len()
                ));
            }
        }
    }
    Ok(())
}

/// `read` and `write` on a 4-word memory over every content, address and value.
pub fn check_memory(w: u32) -> Result<(), String> {
    let mut blaster = Blaster::new(BlastOptions::default());
    let fill = Word::constant(w, 0);
    let mut memory = MemoryImage::filled(2, &fill, 12).unwrap();
    for word in &mut memory.words {
        *word = Word::fresh(&mut blaster.bqm, w);
    }
    let address = Word::fresh(&mut blaster.bqm, 2);
    let value = Word::fresh(&mut blaster.bqm, w);
    let read = blaster.read(&memory, &address).unwrap();
    let written = blaster.write(&memory, &address, &value).unwrap();
    let bqm = blaster.into_bqm();
    let mut x = vec![false; bqm.num_vars()];
    let load = |x: &mut [bool], word: &Word, v: u64| {
        for (i, bit) in word.bits.iter().enumerate() {
            x[bit.as_var().unwrap().index()] = (v >> i) & 1 == 1;
        }
    };
    for contents in 0..1u64 << (4 * w) {
        let mut array = ArrayValue::filled(2, w, 0);
        for (k, word) in memory.words.iter().enumerate() {
            let v = (contents >> (k as u32 * w)) & mask(w);
            load(&mut x, word, v);
            array = array.write(k as u64, v);
        }
        for addr in 0..4u64 {
            load(&mut x, &address, addr);
            for val in 0..1u64 << w {
                load(&mut x, &value, val);
                bqm.forward_fill(&mut x);
                if read.value(&x) != array.read(addr).bits() {
                    return Err(format!("read w={w} contents={contents:#x} addr={addr}"));
                }
                let after = array.write(addr, val);
                for (k, word) in written.words.iter().enumerate() {
                    if word.value(&x) != after.read(k as u64).bits() {
                        return Err(format!("write w={w} contents={contents:#x} addr={addr} value={val}"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Circuit equivalence for every operator at width `w`.
pub fn check_all_operators(w: u32) -> Result<(), String> {
    for op in OPERATORS {
        match op {
            "read" => check_memory(w)?,
            // checked together with read
            "write" => {}
            _ => check_forward(op, w)?,
        }
    }
    check_division_by_minimization(w, true)?;
    check_division_by_minimization(w, false)
}

/// Exhaustive gate tables: for every assignment of inputs, output and
/// ancilla, the penalty is 0 on the relation and at least 1 off it.
pub fn check_gate_tables() -> Result<(), String> {
    use bmcq::GateKind;
    for kind in GateKind::ALL {
        let mut bqm = BinaryQuadraticModel::new();
        let x = bqm.new_free_var();
        let y = bqm.new_free_var();
        let inputs: Vec<bmcq::Bit> = [x, y][..kind.arity()].iter().map(|&v| bmcq::Bit::Var(v)).collect();
        let out = bqm.gate(kind, &inputs).map_err(|e| e.to_string())?;
        let n = bqm.num_vars();
        let expected_vars = 2 + 1 + kind.has_ancilla() as usize;
        if n != expected_vars || out.as_var().is_none() {
            return Err(format!("{kind}: {n} variables"));
        }
        let z = out.as_var().unwrap().index();
        for bits in 0..1u32 << n {
            let assignment: Vec<bool> = (0..n).map(|i| (bits >> i) & 1 == 1).collect();
            let (xv, yv, zv) = (assignment[0], assignment[1] && kind.arity() == 2, assignment[z]);
            let ancilla_ok = !kind.has_ancilla() || assignment[3] == kind.ancilla(xv, yv);
            let holds = zv == kind.eval(xv, yv) && ancilla_ok;
            let unused_ok = kind.arity() == 2 || !assignment[1];
            let energy = bqm.evaluate_energy(&assignment).unwrap();
            if !unused_ok {
                continue;
            }
            if holds != (energy == 0) || energy < 0 {
                return Err(format!("{kind}: assignment {assignment:?} has energy {energy}"));
            }
        }
    }
    Ok(())
}

/// `NOT` and `AND` coefficients as published: `2 - 2x - 2y + 4xy` and
/// `6z + 2xy - 4xz - 4yz`.
pub fn check_published_polynomials() -> Result<(), String> {
    let mut bqm = BinaryQuadraticModel::new();
    let x = bqm.new_free_var();
    let y = bqm.not(bmcq::Bit::Var(x)).as_var().unwrap();
    let not = (bqm.offset(), bqm.linear(x), bqm.linear(y), bqm.quadratic(x, y));
    if not != (2, -2, -2, 4) {
        return Err(format!("not: {not:?}"));
    }
    let mut bqm = BinaryQuadraticModel::new();
    let x = bqm.new_free_var();
    let y = bqm.new_free_var();
    let z = bqm.and(bmcq::Bit::Var(x), bmcq::Bit::Var(y)).as_var().unwrap();
    let and = (
        bqm.offset(),
        [bqm.linear(x), bqm.linear(y), bqm.linear(z)],
        [bqm.quadratic(x, y), bqm.quadratic(x, z), bqm.quadratic(y, z)],
    );
    if and != (0, [0, 0, 6], [2, -4, -4]) {
        return Err(format!("and: {and:?}"));
    }
    Ok(())
}

/// One (fixture, bound) pair of the QUBO/reachability equivalence check.
#[derive(Debug)]
pub struct Prop2Case {
    pub name: &'static str,
    pub bound: usize,
    pub vars: usize,
    pub energy: i64,
    pub witnesses: usize,
}

/// Largest model solved by full enumeration in the equivalence check.
pub const EXHAUSTIVE_LIMIT: usize = 28;

/// Every zero-energy assignment is enumerated below this size; above it only
/// the solver's ground state is decoded.
const ALL_GROUND_STATES_LIMIT: usize = 18;

/// For bounds 0..=16 while the QUBO stays within [`EXHAUSTIVE_LIMIT`]:
/// the exhaustive minimum is 0 exactly when brute-force reachability finds a
/// witness, every ground state decodes to a simulator-confirmed witness, and
/// every brute-force witness has energy 0.
pub fn check_prop2(name: &'static str) -> Result<Vec<Prop2Case>, String> {
    use bmcq::btor2::{brute_force_reachability, simulate, InputDomain};
    use bmcq::solve::{solve_exhaustive, validate_on_input};

    let model = model(name);
    let mut cases = Vec::new();
    for bound in 0..=16 {
        let unrolled = bmcq::translate(&model, bound, Default::default()).map_err(|e| e.to_string())?;
        let vars = unrolled.bqm.num_vars();
        if vars > EXHAUSTIVE_LIMIT {
            break;
        }
        let best = solve_exhaustive(&unrolled.bqm, EXHAUSTIVE_LIMIT).map_err(|e| e.to_string())?;
        let reached =
            brute_force_reachability(&model, bound, &InputDomain::full(), 1 << 24).map_err(|e| e.to_string())?;
        if (best.energy == 0) != !reached.is_empty() {
            return Err(format!(
                "{name} n={bound}: minimum {} but {} brute-force witnesses",
                best.energy,
                reached.len()
            ));
        }
        let confirm = |assignment: &[bool]| -> Result<(), String> {
            let witness = unrolled.decode_witness(&model, assignment);
            match simulate(&model, &witness, bound).map_err(|e| e.to_string())?.first_bad {
                Some((step, _)) if step <= bound => Ok(()),
                other => Err(format!("{name} n={bound}: ground state decodes to {witness:?}, simulator {other:?}")),
            }
        };
        if best.energy == 0 {
            confirm(&best.assignment)?;
        }
        if vars <= ALL_GROUND_STATES_LIMIT {
            for bits in 0..1u64 << vars {
                let assignment: Vec<bool> = (0..vars).map(|i| (bits >> i) & 1 == 1).collect();
                let energy = unrolled.bqm.evaluate_energy(&assignment).unwrap();
                if energy < best.energy {
                    return Err(format!("{name} n={bound}: energy {energy} below the reported minimum"));
                }
                if energy == 0 {
                    confirm(&assignment)?;
                }
            }
        }
        for r in &reached {
            let v = validate_on_input(&unrolled, &model, &r.witness).map_err(|e| e.to_string())?;
            if v.energy != 0 || !v.agrees {
                return Err(format!("{name} n={bound}: witness {:?} has energy {}", r.witness, v.energy));
            }
        }
        cases.push(Prop2Case { name, bound, vars, energy: best.energy, witnesses: reached.len() });
    }
    Ok(cases)
}

pub fn program(name: &str) -> bmcq::beator::RiscUProgram {
    bmcq::beator::assemble(&fixture_text(name)).unwrap()
}

/// Emulator run on one input compared with the simulator on the generated
/// model.
pub struct Lockstep {
    pub kind: bmcq::beator::OutcomeKind,
    pub instructions: usize,
    pub input_bytes: usize,
}

/// Replays one emulator run in the simulator. Bad labels and the step at
/// which they hold must match exactly; runs without a bad must stay clean
/// past their last transition. Also checks that register zero is the
/// constant zero and that instruction pc flags are one-hot outside kernel mode.
pub fn lockstep(
    program: &bmcq::beator::RiscUProgram,
    beator: &bmcq::beator::BeatorModel,
    model: &TransitionModel,
    input: &[u8],
) -> Result<Lockstep, String> {
    use bmcq::beator::{emulate, OutcomeKind};
    use bmcq::btor2::{simulate, Op};

    let outcome = emulate(program, input, 2_000).map_err(|e| e.to_string())?;
    let horizon = outcome.model_steps + 8;
    let sim = simulate(model, &outcome.witness(), horizon).map_err(|e| e.to_string())?;
    match &outcome.kind {
        OutcomeKind::Bad { labels, step } => {
            let (sim_step, nids) = sim.first_bad.clone().ok_or(format!("input {input:?}: simulator misses {labels:?}"))?;
            let sim_labels: Vec<&str> = nids.iter().map(|&n| model.symbol(n).unwrap_or("?")).collect();
            if (sim_step, &sim_labels) != (*step, labels) {
                return Err(format!(
                    "input {input:?}: emulator {labels:?} at {step}, simulator {sim_labels:?} at {sim_step}"
                ));
            }
        }
        OutcomeKind::Exit(_) | OutcomeKind::StepLimit => {
            if let Some(bad) = &sim.first_bad {
                return Err(format!("input {input:?}: emulator {:?}, simulator bad {bad:?}", outcome.kind));
            }
        }
    }

    if !model.node(beator.registers[0]).is_some_and(|n| matches!(n.op, Op::Const { value: 0, .. })) {
        return Err("register zero is not the constant zero".into());
    }
    let bv = |state: &bmcq::btor2::SimState, nid| state.values[&nid].as_bv().unwrap().bits();
    let kernel_flags: Vec<u64> = model
        .states()
        .iter()
        .copied()
        .filter(|&n| model.symbol(n).is_some_and(|s| s.starts_with("kernel-mode")))
        .collect();
    for state in &sim.trace {
        let in_kernel = kernel_flags.iter().any(|&n| bv(state, n) == 1);
        let active = beator.pc_flags.values().filter(|&&n| bv(state, n) == 1).count();
        let running = matches!(outcome.kind, OutcomeKind::Bad { .. }) || state.step < outcome.model_steps;
        if in_kernel && active != 0 {
            return Err(format!("input {input:?}: pc flag set in kernel mode at step {}", state.step));
        }
        if !in_kernel && running && active != 1 {
            return Err(format!("input {input:?}: {active} pc flags set at step {}", state.step));
        }
    }
    let input_bytes = outcome.chunks.iter().map(|c| c.bytes as usize).sum();
    Ok(Lockstep { kind: outcome.kind, instructions: outcome.instructions_executed, input_bytes })
}

/// Lockstep over every single-byte input. Returns a histogram of outcomes and
/// the runs that ended in a bad state.
pub fn lockstep_all_bytes(name: &str) -> Result<(BTreeMap<String, usize>, Vec<Lockstep>), String> {
    use bmcq::beator::{translate_beator, OutcomeKind};

    let program = program(name);
    let beator = translate_beator(&program).map_err(|e| e.to_string())?;
    let model = parse_btor2(&beator.text).map_err(|e| e.to_string())?;
    let mut histogram = BTreeMap::new();
    let mut bads = Vec::new();
    for byte in 0..=255u8 {
        let run = lockstep(&program, &beator, &model, &[byte])?;
        let key = match &run.kind {
            OutcomeKind::Bad { labels, .. } => labels.join("+"),
            other => format!("{other:?}"),
        };
        *histogram.entry(key).or_insert(0) += 1;
        if matches!(run.kind, OutcomeKind::Bad { .. }) {
            bads.push(run);
        }
    }
    Ok((histogram, bads))
}
