//! Concrete execution of a [`TransitionModel`].
//!
//! At step `k` the bad properties are evaluated on the state reached after `k`
//! transitions, using the inputs supplied for step `k`. The same inputs drive
//! the transition to step `k + 1`.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::value::{ArrayValue, BitVecValue, Value};
use super::{BinaryOp, Nid, Op, Sort, TransitionModel, UnaryOp};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("no initial value supplied for uninitialized state {0}")]
    MissingInitial(Nid),
    #[error("value for nid {nid} does not match its sort {expected:?}")]
    SortMismatch { nid: Nid, expected: Sort },
    #[error("nid {0} does not denote a value")]
    NotAValue(Nid),
    #[error("no value supplied for input {0}")]
    MissingInput(Nid),
}

/// Current values of all states.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SimState {
    pub values: BTreeMap<Nid, Value>,
    /// Transitions taken so far.
    pub step: usize,
}

/// Initial values for uninitialized states plus per-step input values.
/// Missing inputs read as zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Witness {
    pub initial: BTreeMap<Nid, Value>,
    pub steps: Vec<BTreeMap<Nid, BitVecValue>>,
}

/// Result of [`step_model`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    /// Every `bad` nid with its value in the pre-state.
    pub bad_flags: BTreeMap<Nid, bool>,
    pub next: SimState,
}

impl Step {
    /// `bad` nids that hold, ascending.
    pub fn fired(&self) -> Vec<Nid> {
        self.bad_flags.iter().filter(|(_, &b)| b).map(|(&n, _)| n).collect()
    }
}

/// Result of [`simulate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimOutcome {
    /// First step at which some bad holds, with all bads holding there.
    pub first_bad: Option<(usize, Vec<Nid>)>,
    /// States visited, starting with the initial state.
    pub trace: Vec<SimState>,
}

fn check_sort(nid: Nid, sort: Sort, value: &Value) -> Result<(), SimError> {
    let ok = match (sort, value) {
        (Sort::Bitvec(w), Value::Bv(v)) => v.width() == w,
        (Sort::Array { index, element }, Value::Array(a)) => a.index_width == index && a.element_width == element,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(SimError::SortMismatch { nid, expected: sort })
    }
}

struct Evaluator<'a> {
    model: &'a TransitionModel,
    state: &'a SimState,
    inputs: &'a BTreeMap<Nid, BitVecValue>,
    memo: HashMap<Nid, Value>,
}

impl<'a> Evaluator<'a> {
    fn new(model: &'a TransitionModel, state: &'a SimState, inputs: &'a BTreeMap<Nid, BitVecValue>) -> Self {
        Evaluator {
            model,
            state,
            inputs,
            memo: HashMap::new(),
        }
    }

    fn eval(&mut self, root: Nid) -> Result<Value, SimError> {
        let mut stack = vec![(root, false)];
        while let Some((nid, expanded)) = stack.pop() {
            if self.memo.contains_key(&nid) {
                continue;
            }
            let node = self.model.node(nid).ok_or(SimError::NotAValue(nid))?;
            if !expanded {
                stack.push((nid, true));
                for operand in node.op.operands() {
                    if !self.memo.contains_key(&operand) {
                        stack.push((operand, false));
                    }
                }
                continue;
            }
            let value = self.compute(nid, &node.op)?;
            self.memo.insert(nid, value);
        }
        Ok(self.memo[&root].clone())
    }

    fn bv(&self, nid: Nid) -> BitVecValue {
        self.memo[&nid].as_bv().expect("parser guarantees bit-vector operands")
    }

    fn compute(&self, nid: Nid, op: &Op) -> Result<Value, SimError> {
        let sort = self.model.sort_of(nid).ok_or(SimError::NotAValue(nid))?;
        let width = sort.width().unwrap_or(1);
        Ok(match *op {
            Op::Const { value, .. } => BitVecValue::new(width, value).into(),
            Op::State { .. } => {
                let value = self.state.values.get(&nid).ok_or(SimError::MissingInitial(nid))?;
                check_sort(nid, sort, value)?;
                value.clone()
            }
            Op::Input { .. } => {
                let value = Value::Bv(*self.inputs.get(&nid).ok_or(SimError::MissingInput(nid))?);
                check_sort(nid, sort, &value)?;
                value
            }
            Op::Unary { op, arg, .. } => {
                let a = self.bv(arg);
                match op {
                    UnaryOp::Not => a.not(),
                    UnaryOp::Inc => a.inc(),
                    UnaryOp::Dec => a.dec(),
                }
                .into()
            }
            Op::Binary { op, lhs, rhs, .. } => {
                let (a, b) = (self.bv(lhs), self.bv(rhs));
                let cmp = |c: bool| BitVecValue::from_bool(c);
                match op {
                    BinaryOp::Add => a.add(b),
                    BinaryOp::Sub => a.sub(b),
                    BinaryOp::Mul => a.mul(b),
                    BinaryOp::Udiv => a.udiv(b),
                    BinaryOp::Urem => a.urem(b),
                    BinaryOp::And => a.and(b),
                    BinaryOp::Ult => cmp(a.bits() < b.bits()),
                    BinaryOp::Ulte => cmp(a.bits() <= b.bits()),
                    BinaryOp::Ugt => cmp(a.bits() > b.bits()),
                    BinaryOp::Ugte => cmp(a.bits() >= b.bits()),
                    BinaryOp::Eq => cmp(a.bits() == b.bits()),
                    BinaryOp::Neq => cmp(a.bits() != b.bits()),
                }
                .into()
            }
            Op::Ite { cond, then, els, .. } => {
                let chosen = if self.bv(cond).is_true() { then } else { els };
                self.memo[&chosen].clone()
            }
            Op::Uext { arg, amount, .. } => self.bv(arg).uext(amount).into(),
            Op::Slice { arg, upper, lower, .. } => self.bv(arg).slice(upper, lower).into(),
            Op::Read { array, index, .. } => {
                let a = self.memo[&array].as_array().expect("parser guarantees array operand");
                a.read(self.bv(index).bits()).into()
            }
            Op::Write { array, index, value, .. } => {
                let a = self.memo[&array].as_array().expect("parser guarantees array operand");
                Value::Array(a.write(self.bv(index).bits(), self.bv(value).bits()))
            }
            Op::Sort(_) | Op::Init { .. } | Op::Next { .. } | Op::Bad { .. } => {
                return Err(SimError::NotAValue(nid))
            }
        })
    }
}

fn coerce(sort: Sort, value: Value) -> Value {
    match (sort, value) {
        (Sort::Array { index, element }, Value::Bv(v)) => Value::Array(ArrayValue::filled(index, element, v.bits())),
        (_, v) => v,
    }
}

impl SimState {
    /// Builds the initial state. `uninitialized` must supply a value for every
    /// state without an `init` line; extra entries are ignored.
    pub fn initial(model: &TransitionModel, uninitialized: &BTreeMap<Nid, Value>) -> Result<Self, SimError> {
        let mut state = SimState::default();
        for nid in model.uninitialized_states() {
            let value = uninitialized.get(&nid).ok_or(SimError::MissingInitial(nid))?;
            check_sort(nid, model.sort_of(nid).expect("states have sorts"), value)?;
            state.values.insert(nid, value.clone());
        }
        let no_inputs = BTreeMap::new();
        for &nid in model.init_order() {
            let init = model.init_of(nid).expect("init_order lists initialized states");
            let value = Evaluator::new(model, &state, &no_inputs).eval(init)?;
            let value = coerce(model.sort_of(nid).expect("states have sorts"), value);
            state.values.insert(nid, value);
        }
        Ok(state)
    }

    pub fn get(&self, nid: Nid) -> Option<&Value> {
        self.values.get(&nid)
    }
}

/// Evaluates the bads on `state` and computes the successor state. Every
/// input read during evaluation must be present in `inputs`.
pub fn step_model(
    model: &TransitionModel,
    state: &SimState,
    inputs: &BTreeMap<Nid, BitVecValue>,
) -> Result<Step, SimError> {
    let mut eval = Evaluator::new(model, state, inputs);
    let mut bad_flags = BTreeMap::new();
    for &bad in model.bads() {
        let cond = model.bad_condition(bad).expect("bad lines have conditions");
        bad_flags.insert(bad, eval.eval(cond)?.as_bv().is_some_and(BitVecValue::is_true));
    }
    let mut next = SimState {
        values: BTreeMap::new(),
        step: state.step + 1,
    };
    for &nid in model.states() {
        let value = match model.next_of(nid) {
            Some(value) => eval.eval(value)?,
            None => state.values.get(&nid).cloned().ok_or(SimError::MissingInitial(nid))?,
        };
        next.values.insert(nid, value);
    }
    Ok(Step { bad_flags, next })
}

/// Zero for every input not in `given`.
pub fn complete_inputs(model: &TransitionModel, given: Option<&BTreeMap<Nid, BitVecValue>>) -> BTreeMap<Nid, BitVecValue> {
    let mut inputs = given.cloned().unwrap_or_default();
    for &nid in model.inputs() {
        let width = model.width_of(nid).expect("inputs are bit-vectors");
        inputs.entry(nid).or_insert(BitVecValue::zero(width));
    }
    inputs
}

/// Runs steps `0..=bound`, stopping at the first step where a bad holds.
/// Inputs missing from the witness read as zero.
pub fn simulate(model: &TransitionModel, witness: &Witness, bound: usize) -> Result<SimOutcome, SimError> {
    let mut state = SimState::initial(model, &witness.initial)?;
    let mut trace = Vec::new();
    for k in 0..=bound {
        let inputs = complete_inputs(model, witness.steps.get(k));
        let step = step_model(model, &state, &inputs)?;
        trace.push(state);
        let fired = step.fired();
        if !fired.is_empty() {
            return Ok(SimOutcome {
                first_bad: Some((k, fired)),
                trace,
            });
        }
        state = step.next;
    }
    Ok(SimOutcome { first_bad: None, trace })
}
