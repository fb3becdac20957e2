mod common;

use std::collections::HashMap;

use bmcq::bitblast::{BlastOptions, Blaster, Word, WordOp};
use bmcq::btor2::BitVecValue;
use bmcq::VarId;
use proptest::prelude::*;

#[test]
fn gate_penalties_are_exact() {
    common::check_gate_tables().unwrap();
}

#[test]
fn not_and_coefficients() {
    common::check_published_polynomials().unwrap();
}

#[test]
fn operators_width_2() {
    common::check_all_operators(2).unwrap();
}

#[test]
fn operators_width_3() {
    common::check_all_operators(3).unwrap();
}

#[test]
fn operators_width_4() {
    common::check_all_operators(4).unwrap();
}

#[test]
fn constant_operands_fold() {
    let mut blaster = Blaster::new(BlastOptions::default());
    let a = Word::constant(8, 200);
    let b = Word::constant(8, 100);
    for op in [WordOp::Add, WordOp::Sub, WordOp::Mul, WordOp::Ult, WordOp::Eq] {
        let out = blaster.blast_word_op(op, &[&a, &b]).unwrap();
        assert!(out.is_const(), "{op:?}");
    }
    assert_eq!(blaster.bqm.num_vars(), 0);
    let (q, r) = blaster.udiv_urem(&a, &Word::constant(8, 0)).unwrap();
    assert_eq!((q.as_const(), r.as_const()), (Some(255), Some(200)));
}

#[test]
fn slice_allocates_nothing() {
    let mut blaster = Blaster::new(BlastOptions::default());
    let a = Word::fresh(&mut blaster.bqm, 32);
    let s = blaster.blast_word_op(WordOp::Slice { upper: 2, lower: 0 }, &[&a]).unwrap();
    assert_eq!(s.bits, a.bits[..3].to_vec());
    assert_eq!(blaster.bqm.num_vars(), 32);
}

/// One circuit per operator at width `w`, evaluated by the forward pass.
struct Arith {
    w: u32,
    a: Word,
    b: Word,
    outputs: Vec<(&'static str, Word)>,
    bqm: bmcq::BinaryQuadraticModel,
}

impl Arith {
    fn new(w: u32) -> Self {
        let mut blaster = Blaster::new(BlastOptions::default());
        let a = Word::fresh(&mut blaster.bqm, w);
        let b = Word::fresh(&mut blaster.bqm, w);
        let mut outputs = Vec::new();
        for (name, op) in [("add", WordOp::Add), ("sub", WordOp::Sub), ("mul", WordOp::Mul), ("ult", WordOp::Ult)] {
            outputs.push((name, blaster.blast_word_op(op, &[&a, &b]).unwrap()));
        }
        let (q, r) = blaster.udiv_urem(&a, &b).unwrap();
        outputs.push(("udiv", q));
        outputs.push(("urem", r));
        Arith { w, a, b, outputs, bqm: blaster.into_bqm() }
    }

    fn check(&self, x: u64, y: u64) {
        let mut free: HashMap<VarId, bool> = HashMap::new();
        for (word, value) in [(&self.a, x), (&self.b, y)] {
            for (i, bit) in word.bits.iter().enumerate() {
                free.insert(bit.as_var().unwrap(), (value >> i) & 1 == 1);
            }
        }
        let assignment = self.bqm.forward_assignment(&free).unwrap();
        assert_eq!(self.bqm.evaluate_energy(&assignment).unwrap(), 0);
        let (p, q) = (BitVecValue::new(self.w, x), BitVecValue::new(self.w, y));
        for (name, word) in &self.outputs {
            let want = match *name {
                "add" => p.add(q).bits(),
                "sub" => p.sub(q).bits(),
                "mul" => p.mul(q).bits(),
                "ult" => (p.bits() < q.bits()) as u64,
                "udiv" => p.udiv(q).bits(),
                _ => p.urem(q).bits(),
            };
            assert_eq!(word.value(&assignment), want, "{name} {x} {y} at width {}", self.w);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modular_arithmetic_8(x in 0u64..256, y in 0u64..256) {
        thread_local!(static CIRCUIT: Arith = Arith::new(8));
        CIRCUIT.with(|c| c.check(x, y));
    }

    #[test]
    fn modular_arithmetic_16(x in 0u64..1 << 16, y in prop_oneof![Just(0u64), 0u64..1 << 16]) {
        thread_local!(static CIRCUIT: Arith = Arith::new(16));
        CIRCUIT.with(|c| c.check(x, y));
    }

    #[test]
    fn modular_arithmetic_32(x in any::<u32>(), y in any::<u32>()) {
        thread_local!(static CIRCUIT: Arith = Arith::new(32));
        CIRCUIT.with(|c| c.check(x as u64, y as u64));
    }
}
