//! Unrolling a transition model into one QUBO.
//!
//! Frame `i` holds the state words after `i` transitions. Frame 0 comes from
//! the `init` lines (uninitialized states get fresh variables); frame `i + 1`
//! takes each state's `next` expression blasted over frame `i`. The bad bits
//! of frames `0..=n` are OR-reduced and the result is pinned to 1, so the
//! ground energy is 0 exactly when some bad is reachable within `n`
//! transitions.
//!
//! Input variables are allocated on first use within a frame. An `ite` whose
//! condition folds to a constant only blasts the selected branch, so inputs
//! behind unselected branches never get variables. Decoding reads them as 0.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::bitblast::{slice, uext, BlastError, BlastOptions, Blaster, MemoryImage, Word};
use crate::bqm::{BinaryQuadraticModel, Bit, BqmError, VarId};
use crate::btor2::{ArrayValue, BinaryOp, BitVecValue, Nid, Op, Sort, TransitionModel, UnaryOp, Value, Witness};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UnrollError {
    #[error(transparent)]
    Blast(#[from] BlastError),
    #[error(transparent)]
    Bqm(#[from] BqmError),
    #[error("nid {0} does not denote a value")]
    NotAValue(Nid),
    #[error("witness has no initial value for state {0}")]
    MissingInitial(Nid),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct UnrollOptions {
    pub blast: BlastOptions,
}

/// Blasted value of a node within one frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameValue {
    Word(Word),
    Memory(MemoryImage),
}

impl FrameValue {
    pub fn word(&self) -> Option<&Word> {
        match self {
            FrameValue::Word(w) => Some(w),
            FrameValue::Memory(_) => None,
        }
    }

    pub fn memory(&self) -> Option<&MemoryImage> {
        match self {
            FrameValue::Memory(m) => Some(m),
            FrameValue::Word(_) => None,
        }
    }

    pub fn var_count(&self) -> usize {
        match self {
            FrameValue::Word(w) => w.var_count(),
            FrameValue::Memory(m) => m.var_count(),
        }
    }

    fn decode(&self, assignment: &[bool]) -> Value {
        match self {
            FrameValue::Word(w) => Value::Bv(BitVecValue::new(w.width(), w.value(assignment))),
            FrameValue::Memory(m) => {
                let mut array = ArrayValue::filled(m.index_width, m.element_width, 0);
                for (address, word) in m.entries() {
                    array = array.write(address, word.value(assignment));
                }
                Value::Array(array)
            }
        }
    }
}

/// One unrolled copy of the model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub step: usize,
    pub states: BTreeMap<Nid, FrameValue>,
    /// Inputs referenced in this frame.
    pub inputs: BTreeMap<Nid, Word>,
    pub bads: BTreeMap<Nid, Bit>,
}

/// Per-step statistics of an unrolled model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepStats {
    pub step: usize,
    pub new_vars: usize,
    pub cumulative_vars: usize,
    pub nonconstant_bads: usize,
    pub nonconstant_pc_flags: usize,
}

#[derive(Clone, Debug)]
pub struct UnrolledModel {
    pub bqm: BinaryQuadraticModel,
    pub frames: Vec<Frame>,
    /// OR of every bad bit of every frame, pinned to 1.
    pub or_output: Bit,
    /// Variables allocated for step `i`: frame 0 and its bads for `i = 0`,
    /// otherwise the `next` circuits over frame `i - 1` and the bads of frame `i`.
    pub step_vars: Vec<usize>,
    /// Variables of the final OR tree.
    pub or_vars: usize,
    pub pc_flags: Vec<Nid>,
    pub options: UnrollOptions,
}

struct Context<'m> {
    model: &'m TransitionModel,
    states: BTreeMap<Nid, FrameValue>,
    inputs: BTreeMap<Nid, Word>,
    memo: HashMap<Nid, FrameValue>,
}

impl Context<'_> {
    fn word(&self, nid: Nid) -> &Word {
        self.memo[&nid].word().expect("parser guarantees bit-vector operands")
    }

    fn memory(&self, nid: Nid) -> &MemoryImage {
        self.memo[&nid].memory().expect("parser guarantees array operands")
    }

    fn blast(&mut self, blaster: &mut Blaster, root: Nid) -> Result<FrameValue, UnrollError> {
        let mut stack = vec![(root, 0u8)];
        while let Some((nid, phase)) = stack.pop() {
            if self.memo.contains_key(&nid) {
                continue;
            }
            let op = &self.model.node(nid).ok_or(UnrollError::NotAValue(nid))?.op;
            if let Op::Ite { cond, then, els, .. } = *op {
                match phase {
                    0 => {
                        stack.push((nid, 1));
                        stack.push((cond, 0));
                        continue;
                    }
                    1 => {
                        stack.push((nid, 2));
                        match self.word(cond).bit(0) {
                            Bit::Const(true) => stack.push((then, 0)),
                            Bit::Const(false) => stack.push((els, 0)),
                            Bit::Var(_) => {
                                stack.push((then, 0));
                                stack.push((els, 0));
                            }
                        }
                        continue;
                    }
                    _ => {}
                }
            } else if phase == 0 {
                stack.push((nid, 1));
                for operand in op.operands() {
                    if !self.memo.contains_key(&operand) {
                        stack.push((operand, 0));
                    }
                }
                continue;
            }
            let value = self.compute(blaster, nid, op)?;
            self.memo.insert(nid, value);
        }
        Ok(self.memo[&root].clone())
    }

    fn compute(&mut self, blaster: &mut Blaster, nid: Nid, op: &Op) -> Result<FrameValue, UnrollError> {
        let sort = self.model.sort_of(nid).ok_or(UnrollError::NotAValue(nid))?;
        let word = |w: Word| Ok(FrameValue::Word(w));
        match *op {
            Op::Const { value, .. } => word(Word::constant(sort.width().unwrap_or(1), value)),
            Op::State { .. } => Ok(self.states[&nid].clone()),
            Op::Input { .. } => {
                let width = sort.width().expect("inputs are bit-vectors");
                let w = self
                    .inputs
                    .entry(nid)
                    .or_insert_with(|| Word::fresh(&mut blaster.bqm, width))
                    .clone();
                word(w)
            }
            Op::Unary { op, arg, .. } => {
                let a = self.word(arg).clone();
                word(match op {
                    UnaryOp::Not => blaster.not(&a),
                    UnaryOp::Inc => blaster.add(&a, &Word::constant(a.width(), 1)),
                    UnaryOp::Dec => blaster.sub(&a, &Word::constant(a.width(), 1)),
                })
            }
            Op::Binary { op, lhs, rhs, .. } => {
                let (a, b) = (self.word(lhs).clone(), self.word(rhs).clone());
                let bit = |b: Bit| Word::from_bit(b);
                word(match op {
                    BinaryOp::Add => blaster.add(&a, &b),
                    BinaryOp::Sub => blaster.sub(&a, &b),
                    BinaryOp::Mul => blaster.mul(&a, &b),
                    BinaryOp::Udiv => blaster.udiv_urem(&a, &b)?.0,
                    BinaryOp::Urem => blaster.udiv_urem(&a, &b)?.1,
                    BinaryOp::And => blaster.and(&a, &b),
                    BinaryOp::Ult => bit(blaster.ult(&a, &b)),
                    BinaryOp::Ugt => bit(blaster.ult(&b, &a)),
                    BinaryOp::Ulte => {
                        let gt = blaster.ult(&b, &a);
                        bit(blaster.bqm.not(gt))
                    }
                    BinaryOp::Ugte => {
                        let lt = blaster.ult(&a, &b);
                        bit(blaster.bqm.not(lt))
                    }
                    BinaryOp::Eq => bit(blaster.eq(&a, &b)),
                    BinaryOp::Neq => {
                        let e = blaster.eq(&a, &b);
                        bit(blaster.bqm.not(e))
                    }
                })
            }
            Op::Ite { cond, then, els, .. } => {
                let c = self.word(cond).bit(0);
                match c {
                    Bit::Const(true) => Ok(self.memo[&then].clone()),
                    Bit::Const(false) => Ok(self.memo[&els].clone()),
                    Bit::Var(_) => match (&self.memo[&then], &self.memo[&els]) {
                        (FrameValue::Word(t), FrameValue::Word(e)) => word(blaster.ite(c, t, e)),
                        (FrameValue::Memory(t), FrameValue::Memory(e)) => {
                            let words = t.words.iter().zip(&e.words).map(|(x, y)| blaster.ite(c, x, y)).collect();
                            Ok(FrameValue::Memory(MemoryImage { words, ..t.clone() }))
                        }
                        _ => Err(UnrollError::NotAValue(nid)),
                    },
                }
            }
            Op::Uext { arg, amount, .. } => word(uext(self.word(arg), amount)),
            Op::Slice { arg, upper, lower, .. } => word(slice(self.word(arg), upper, lower)?),
            Op::Read { array, index, .. } => word(blaster.read(self.memory(array), self.word(index))?),
            Op::Write { array, index, value, .. } => Ok(FrameValue::Memory(blaster.write(
                self.memory(array),
                self.word(index),
                self.word(value),
            )?)),
            Op::Sort(_) | Op::Init { .. } | Op::Next { .. } | Op::Bad { .. } => Err(UnrollError::NotAValue(nid)),
        }
    }

    fn blast_bads(&mut self, blaster: &mut Blaster) -> Result<BTreeMap<Nid, Bit>, UnrollError> {
        let mut bads = BTreeMap::new();
        for &bad in self.model.bads() {
            let cond = self.model.bad_condition(bad).expect("bad lines have conditions");
            let value = self.blast(blaster, cond)?;
            bads.insert(bad, value.word().expect("bad conditions are bit-vectors").bit(0));
        }
        Ok(bads)
    }
}

fn fresh_value(blaster: &mut Blaster, sort: Sort) -> Result<FrameValue, UnrollError> {
    Ok(match sort {
        Sort::Bitvec(w) => FrameValue::Word(Word::fresh(&mut blaster.bqm, w)),
        Sort::Array { index, element } => {
            let limit = blaster.options.expansion_limit;
            let mut image = MemoryImage::filled(index, &Word::constant(element, 0), limit)?;
            for word in &mut image.words {
                *word = Word::fresh(&mut blaster.bqm, element);
            }
            FrameValue::Memory(image)
        }
    })
}

/// 1-bit states named `pc-…`, or every 1-bit state when none is so named.
pub fn pc_flags(model: &TransitionModel) -> Vec<Nid> {
    let flags: Vec<Nid> = model
        .states()
        .iter()
        .copied()
        .filter(|&s| model.sort_of(s) == Some(Sort::Bitvec(1)))
        .collect();
    let named: Vec<Nid> = flags
        .iter()
        .copied()
        .filter(|&s| model.symbol(s).is_some_and(|n| n.starts_with("pc-")))
        .collect();
    if named.is_empty() {
        flags
    } else {
        named
    }
}

/// Unrolls `model` for `bound` transitions.
pub fn translate(model: &TransitionModel, bound: usize, options: UnrollOptions) -> Result<UnrolledModel, UnrollError> {
    let mut blaster = Blaster::new(options.blast);
    let mut ctx = Context {
        model,
        states: BTreeMap::new(),
        inputs: BTreeMap::new(),
        memo: HashMap::new(),
    };
    for nid in model.uninitialized_states() {
        let value = fresh_value(&mut blaster, model.sort_of(nid).expect("states have sorts"))?;
        ctx.states.insert(nid, value);
    }
    for &nid in model.init_order() {
        let init = model.init_of(nid).expect("init_order lists initialized states");
        let value = match (ctx.blast(&mut blaster, init)?, model.sort_of(nid).expect("states have sorts")) {
            (FrameValue::Word(fill), Sort::Array { index, .. }) => {
                FrameValue::Memory(MemoryImage::filled(index, &fill, blaster.options.expansion_limit)?)
            }
            (value, _) => value,
        };
        ctx.states.insert(nid, value);
    }
    let bads = ctx.blast_bads(&mut blaster)?;
    let mut frames = vec![Frame {
        step: 0,
        states: ctx.states.clone(),
        inputs: std::mem::take(&mut ctx.inputs),
        bads,
    }];
    let mut step_vars = vec![blaster.bqm.num_vars()];
    for step in 1..=bound {
        let before = blaster.bqm.num_vars();
        let mut states = BTreeMap::new();
        for &nid in model.states() {
            let value = match model.next_of(nid) {
                Some(next) => ctx.blast(&mut blaster, next)?,
                None => ctx.states[&nid].clone(),
            };
            states.insert(nid, value);
        }
        // inputs read by the next circuits belong to the previous frame
        frames[step - 1].inputs.append(&mut ctx.inputs);
        ctx = Context {
            model,
            states,
            inputs: BTreeMap::new(),
            memo: HashMap::new(),
        };
        let bads = ctx.blast_bads(&mut blaster)?;
        frames.push(Frame {
            step,
            states: ctx.states.clone(),
            inputs: BTreeMap::new(),
            bads,
        });
        frames[step].inputs = std::mem::take(&mut ctx.inputs);
        step_vars.push(blaster.bqm.num_vars() - before);
    }
    let before = blaster.bqm.num_vars();
    let all_bads: Vec<Bit> = frames.iter().flat_map(|f| f.bads.values().copied()).collect();
    let or_output = blaster.or_reduce(&all_bads);
    let strength = blaster.options.pin_strength;
    blaster.bqm.pin_bit(or_output, true, strength);
    let or_vars = blaster.bqm.num_vars() - before;
    Ok(UnrolledModel {
        bqm: blaster.into_bqm(),
        frames,
        or_output,
        step_vars,
        or_vars,
        pc_flags: pc_flags(model),
        options,
    })
}

impl UnrolledModel {
    pub fn bound(&self) -> usize {
        self.frames.len() - 1
    }

    /// Input values per step and initial values of uninitialized states.
    /// Inputs without variables in a frame decode as 0.
    pub fn decode_witness(&self, model: &TransitionModel, assignment: &[bool]) -> Witness {
        let mut initial = BTreeMap::new();
        for nid in model.uninitialized_states() {
            initial.insert(nid, self.frames[0].states[&nid].decode(assignment));
        }
        let steps = self
            .frames
            .iter()
            .map(|frame| {
                model
                    .inputs()
                    .iter()
                    .map(|&nid| {
                        let width = model.width_of(nid).expect("inputs are bit-vectors");
                        let bits = frame.inputs.get(&nid).map_or(0, |w| w.value(assignment));
                        (nid, BitVecValue::new(width, bits))
                    })
                    .collect()
            })
            .collect();
        Witness { initial, steps }
    }

    /// Free-variable values selected by `witness`; unspecified ones are 0.
    pub fn free_values(&self, model: &TransitionModel, witness: &Witness) -> Result<HashMap<VarId, bool>, UnrollError> {
        let mut free: HashMap<VarId, bool> = self.bqm.free_vars().iter().map(|&v| (v, false)).collect();
        let mut set_word = |word: &Word, bits: u64| {
            for (i, bit) in word.bits.iter().enumerate() {
                if let Bit::Var(v) = bit {
                    free.insert(*v, (bits >> i) & 1 == 1);
                }
            }
        };
        for nid in model.uninitialized_states() {
            let value = witness.initial.get(&nid).ok_or(UnrollError::MissingInitial(nid))?;
            match (&self.frames[0].states[&nid], value) {
                (FrameValue::Word(w), Value::Bv(v)) => set_word(w, v.bits()),
                (FrameValue::Memory(m), Value::Array(a)) => {
                    for (address, word) in m.entries() {
                        set_word(word, a.read(address).bits());
                    }
                }
                _ => return Err(UnrollError::MissingInitial(nid)),
            }
        }
        for (step, frame) in self.frames.iter().enumerate() {
            for (nid, word) in &frame.inputs {
                let bits = witness.steps.get(step).and_then(|s| s.get(nid)).map_or(0, |v| v.bits());
                set_word(word, bits);
            }
        }
        Ok(free)
    }

    /// Full assignment implied by `witness` through the forward pass.
    pub fn assignment_for(&self, model: &TransitionModel, witness: &Witness) -> Result<Vec<bool>, UnrollError> {
        let free = self.free_values(model, witness)?;
        Ok(self.bqm.forward_assignment(&free)?)
    }

    /// Variables standing for inputs or uninitialized states.
    pub fn input_vars(&self) -> Vec<VarId> {
        self.bqm.free_vars().to_vec()
    }

    pub fn frame_stats(&self) -> Vec<StepStats> {
        let mut cumulative = 0;
        self.frames
            .iter()
            .zip(&self.step_vars)
            .map(|(frame, &new_vars)| {
                cumulative += new_vars;
                StepStats {
                    step: frame.step,
                    new_vars,
                    cumulative_vars: cumulative,
                    nonconstant_bads: frame.bads.values().filter(|b| !b.is_const()).count(),
                    nonconstant_pc_flags: self
                        .pc_flags
                        .iter()
                        .filter(|nid| frame.states.get(nid).is_some_and(|v| v.var_count() > 0))
                        .count(),
                }
            })
            .collect()
    }
}
