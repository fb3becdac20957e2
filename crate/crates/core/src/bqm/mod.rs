//! Binary quadratic models with integer coefficients.
//!
//! Variables are only created by the gate library, by [`BinaryQuadraticModel::new_free_var`]
//! and by [`BinaryQuadraticModel::new_divrem`]. Each creation is recorded in a
//! trace so that every non-free variable can be recomputed from the free ones
//! ([`BinaryQuadraticModel::forward_assignment`]).

mod gates;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

pub use gates::{GateKind, Role, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bit {
    Const(bool),
    Var(VarId),
}

impl Bit {
    pub const ZERO: Bit = Bit::Const(false);
    pub const ONE: Bit = Bit::Const(true);

    pub fn as_const(self) -> Option<bool> {
        match self {
            Bit::Const(b) => Some(b),
            Bit::Var(_) => None,
        }
    }

    pub fn as_var(self) -> Option<VarId> {
        match self {
            Bit::Var(v) => Some(v),
            Bit::Const(_) => None,
        }
    }

    pub fn is_const(self) -> bool {
        matches!(self, Bit::Const(_))
    }

    /// Value under a full assignment.
    pub fn value(self, assignment: &[bool]) -> bool {
        match self {
            Bit::Const(b) => b,
            Bit::Var(v) => assignment[v.index()],
        }
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        Bit::Const(b)
    }
}

impl From<VarId> for Bit {
    fn from(v: VarId) -> Self {
        Bit::Var(v)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BqmError {
    #[error("gate {kind} expects {expected} inputs, got {got}")]
    Arity { kind: GateKind, expected: usize, got: usize },
    #[error("assignment has {got} values for {expected} variables")]
    AssignmentLength { expected: usize, got: usize },
    #[error("no value for free variable {0}")]
    MissingFreeVar(VarId),
}

/// A gate instance. Inputs are always variables: gates with a constant input
/// are simplified away before they reach the trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateRecord {
    pub kind: GateKind,
    pub x: VarId,
    /// Second input; `None` for `NOT`.
    pub y: Option<VarId>,
    pub out: VarId,
    pub ancilla: Option<VarId>,
}

/// Unsigned division whose quotient and remainder bits are variables fixed
/// only by separate constraints. The forward pass computes them directly,
/// with division by zero giving an all-ones quotient and the dividend as
/// remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivRemRecord {
    pub dividend: Vec<Bit>,
    pub divisor: Vec<Bit>,
    pub quotient: Vec<VarId>,
    pub remainder: Vec<VarId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEntry {
    Gate(GateRecord),
    DivRem(DivRemRecord),
}

/// Offset plus linear plus upper-triangular quadratic integer coefficients.
#[derive(Clone, Debug, Default)]
pub struct BinaryQuadraticModel {
    offset: i64,
    linear: Vec<i64>,
    quadratic: HashMap<(u32, u32), i64>,
    free: Vec<VarId>,
    trace: Vec<TraceEntry>,
    gate_cache: HashMap<(GateKind, VarId, Option<VarId>), VarId>,
    negation: HashMap<VarId, VarId>,
}

impl PartialEq for BinaryQuadraticModel {
    fn eq(&self, other: &Self) -> bool {
        self.offset == other.offset
            && self.linear == other.linear
            && self.quadratic == other.quadratic
            && self.free == other.free
            && self.trace == other.trace
    }
}

impl Eq for BinaryQuadraticModel {}

fn to_bits(bits: &[Bit], assignment: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, b)| acc | ((b.value(assignment) as u64) << i))
}

impl BinaryQuadraticModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds a model from serialized parts. Gate and negation caches start
    /// empty, so further construction does not share earlier gates.
    pub fn from_parts(
        num_vars: usize,
        offset: i64,
        linear: BTreeMap<VarId, i64>,
        quadratic: BTreeMap<(VarId, VarId), i64>,
        free: Vec<VarId>,
        trace: Vec<TraceEntry>,
    ) -> Self {
        let mut bqm = BinaryQuadraticModel {
            offset,
            linear: vec![0; num_vars],
            ..Default::default()
        };
        for (v, c) in linear {
            bqm.add_linear(v, c);
        }
        for ((u, v), c) in quadratic {
            bqm.add_quadratic(u, v, c);
        }
        bqm.free = free;
        bqm.trace = trace;
        bqm
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn linear(&self, v: VarId) -> i64 {
        self.linear[v.index()]
    }

    /// Non-zero linear coefficients in variable order.
    pub fn linear_terms(&self) -> impl Iterator<Item = (VarId, i64)> + '_ {
        self.linear
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (VarId(i as u32), c))
    }

    /// Non-zero quadratic coefficients sorted by `(u, v)` with `u < v`.
    pub fn quadratic_terms(&self) -> Vec<(VarId, VarId, i64)> {
        let mut terms: Vec<_> = self
            .quadratic
            .iter()
            .filter(|(_, &c)| c != 0)
            .map(|(&(u, v), &c)| (VarId(u), VarId(v), c))
            .collect();
        terms.sort_unstable();
        terms
    }

    pub fn quadratic(&self, u: VarId, v: VarId) -> i64 {
        let key = if u < v { (u.0, v.0) } else { (v.0, u.0) };
        self.quadratic.get(&key).copied().unwrap_or(0)
    }

    /// Variables that no trace entry produces (inputs of the model).
    pub fn free_vars(&self) -> &[VarId] {
        &self.free
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    fn alloc(&mut self) -> VarId {
        let id = VarId(u32::try_from(self.linear.len()).expect("variable count exceeds u32"));
        self.linear.push(0);
        id
    }

    pub fn new_free_var(&mut self) -> VarId {
        let v = self.alloc();
        self.free.push(v);
        v
    }

    pub fn add_offset(&mut self, c: i64) {
        self.offset += c;
    }

    pub fn add_linear(&mut self, v: VarId, c: i64) {
        self.linear[v.index()] += c;
    }

    /// Adds `c·u·v`; `u == v` folds into the linear term.
    pub fn add_quadratic(&mut self, u: VarId, v: VarId, c: i64) {
        if u == v {
            self.add_linear(u, c);
            return;
        }
        let key = if u < v { (u.0, v.0) } else { (v.0, u.0) };
        *self.quadratic.entry(key).or_insert(0) += c;
    }

    fn add_penalty(&mut self, kind: GateKind, roles: [Option<VarId>; 4]) {
        let var = |r: Role| {
            roles[match r {
                Role::X => 0,
                Role::Y => 1,
                Role::Z => 2,
                Role::A => 3,
            }]
            .expect("gate role bound")
        };
        for term in kind.penalty() {
            match *term {
                Term::Offset(c) => self.add_offset(c),
                Term::Linear(r, c) => self.add_linear(var(r), c),
                Term::Quadratic(r, s, c) => self.add_quadratic(var(r), var(s), c),
            }
        }
    }

    /// Emits a gate over `inputs`, folding constants and reusing an identical
    /// earlier gate when possible.
    pub fn gate(&mut self, kind: GateKind, inputs: &[Bit]) -> Result<Bit, BqmError> {
        if inputs.len() != kind.arity() {
            return Err(BqmError::Arity {
                kind,
                expected: kind.arity(),
                got: inputs.len(),
            });
        }
        Ok(match kind {
            GateKind::Not => self.not(inputs[0]),
            _ => self.binary(kind, inputs[0], inputs[1]),
        })
    }

    pub fn not(&mut self, x: Bit) -> Bit {
        let x = match x {
            Bit::Const(b) => return Bit::Const(!b),
            Bit::Var(v) => v,
        };
        if let Some(&n) = self.negation.get(&x) {
            return Bit::Var(n);
        }
        let out = self.alloc();
        self.add_penalty(GateKind::Not, [Some(x), Some(out), None, None]);
        self.trace.push(TraceEntry::Gate(GateRecord {
            kind: GateKind::Not,
            x,
            y: None,
            out,
            ancilla: None,
        }));
        self.negation.insert(x, out);
        self.negation.insert(out, x);
        Bit::Var(out)
    }

    pub fn and(&mut self, x: Bit, y: Bit) -> Bit {
        self.binary(GateKind::And, x, y)
    }

    pub fn nand(&mut self, x: Bit, y: Bit) -> Bit {
        self.binary(GateKind::Nand, x, y)
    }

    pub fn or(&mut self, x: Bit, y: Bit) -> Bit {
        self.binary(GateKind::Or, x, y)
    }

    /// `!x & y`
    pub fn inhibit(&mut self, x: Bit, y: Bit) -> Bit {
        self.binary(GateKind::Inhibit, x, y)
    }

    pub fn xor(&mut self, x: Bit, y: Bit) -> Bit {
        self.binary(GateKind::Xor, x, y)
    }

    pub fn xnor(&mut self, x: Bit, y: Bit) -> Bit {
        match (x, y) {
            (Bit::Const(b), other) | (other, Bit::Const(b)) => return if b { other } else { self.not(other) },
            _ => {}
        }
        let d = self.xor(x, y);
        self.not(d)
    }

    /// `c ? t : e`
    pub fn mux(&mut self, c: Bit, t: Bit, e: Bit) -> Bit {
        match c {
            Bit::Const(true) => return t,
            Bit::Const(false) => return e,
            Bit::Var(_) => {}
        }
        if t == e {
            return t;
        }
        match (t, e) {
            (Bit::Const(true), Bit::Const(false)) => return c,
            (Bit::Const(false), Bit::Const(true)) => return self.not(c),
            _ => {}
        }
        let a = self.and(c, t);
        let b = self.inhibit(c, e);
        self.or(a, b)
    }

    fn complementary(&self, x: VarId, y: VarId) -> bool {
        self.negation.get(&x) == Some(&y)
    }

    fn binary(&mut self, kind: GateKind, x: Bit, y: Bit) -> Bit {
        use GateKind::*;
        let (x, y) = match (kind, x, y) {
            (Not, ..) => unreachable!("NOT is unary"),
            (_, Bit::Const(a), Bit::Const(b)) => return Bit::Const(kind.eval(a, b)),
            (Inhibit, Bit::Const(true), _) | (Inhibit, _, Bit::Const(false)) => return Bit::ZERO,
            (Inhibit, Bit::Const(false), v) => return v,
            (Inhibit, v, Bit::Const(true)) => return self.not(v),
            (_, Bit::Const(c), v) | (_, v, Bit::Const(c)) => {
                return match (kind, c) {
                    (And, false) => Bit::ZERO,
                    (And, true) => v,
                    (Nand, false) => Bit::ONE,
                    (Nand, true) => self.not(v),
                    (Or, false) => v,
                    (Or, true) => Bit::ONE,
                    (Xor, false) => v,
                    (Xor, true) => self.not(v),
                    _ => unreachable!(),
                }
            }
            (_, Bit::Var(a), Bit::Var(b)) => (a, b),
        };
        if x == y {
            return match kind {
                And | Or => Bit::Var(x),
                Nand => self.not(Bit::Var(x)),
                Inhibit | Xor => Bit::ZERO,
                Not => unreachable!(),
            };
        }
        if self.complementary(x, y) {
            return match kind {
                And => Bit::ZERO,
                Nand | Or | Xor => Bit::ONE,
                // !x & !x
                Inhibit => Bit::Var(y),
                Not => unreachable!(),
            };
        }
        let (x, y) = if kind.is_commutative() && y < x { (y, x) } else { (x, y) };
        if let Some(&out) = self.gate_cache.get(&(kind, x, Some(y))) {
            return Bit::Var(out);
        }
        let out = self.alloc();
        let ancilla = kind.has_ancilla().then(|| self.alloc());
        self.add_penalty(kind, [Some(x), Some(y), Some(out), ancilla]);
        self.trace.push(TraceEntry::Gate(GateRecord {
            kind,
            x,
            y: Some(y),
            out,
            ancilla,
        }));
        self.gate_cache.insert((kind, x, Some(y)), out);
        Bit::Var(out)
    }

    /// Allocates quotient and remainder variables of `width` bits for the
    /// given operands. The caller adds the constraints relating them.
    pub fn new_divrem(&mut self, dividend: &[Bit], divisor: &[Bit]) -> (Vec<VarId>, Vec<VarId>) {
        let quotient: Vec<_> = (0..dividend.len()).map(|_| self.alloc()).collect();
        let remainder: Vec<_> = (0..dividend.len()).map(|_| self.alloc()).collect();
        self.trace.push(TraceEntry::DivRem(DivRemRecord {
            dividend: dividend.to_vec(),
            divisor: divisor.to_vec(),
            quotient: quotient.clone(),
            remainder: remainder.clone(),
        }));
        (quotient, remainder)
    }

    /// Adds `strength` when `bit != value`.
    pub fn pin_bit(&mut self, bit: Bit, value: bool, strength: i64) {
        match bit {
            Bit::Const(b) if b == value => {}
            Bit::Const(_) => self.add_offset(strength),
            Bit::Var(v) if value => {
                self.add_offset(strength);
                self.add_linear(v, -strength);
            }
            Bit::Var(v) => self.add_linear(v, strength),
        }
    }

    /// Adds `strength` when `a != b`.
    pub fn pin_equal(&mut self, a: Bit, b: Bit, strength: i64) {
        match (a, b) {
            (Bit::Const(c), other) | (other, Bit::Const(c)) => self.pin_bit(other, c, strength),
            (Bit::Var(u), Bit::Var(v)) => {
                if u == v {
                    return;
                }
                self.add_linear(u, strength);
                self.add_linear(v, strength);
                self.add_quadratic(u, v, -2 * strength);
            }
        }
    }

    /// Exact energy of a full assignment indexed by variable.
    pub fn evaluate_energy(&self, assignment: &[bool]) -> Result<i64, BqmError> {
        if assignment.len() != self.num_vars() {
            return Err(BqmError::AssignmentLength {
                expected: self.num_vars(),
                got: assignment.len(),
            });
        }
        let mut energy = self.offset;
        for (i, &c) in self.linear.iter().enumerate() {
            if assignment[i] {
                energy += c;
            }
        }
        for (&(u, v), &c) in &self.quadratic {
            if assignment[u as usize] && assignment[v as usize] {
                energy += c;
            }
        }
        Ok(energy)
    }

    /// Computes every traced variable from the free ones. The result zeroes
    /// every gate penalty.
    pub fn forward_assignment(&self, free: &HashMap<VarId, bool>) -> Result<Vec<bool>, BqmError> {
        let mut assignment = vec![false; self.num_vars()];
        for &v in &self.free {
            assignment[v.index()] = *free.get(&v).ok_or(BqmError::MissingFreeVar(v))?;
        }
        self.forward_fill(&mut assignment);
        Ok(assignment)
    }

    /// Like [`Self::forward_assignment`], with free values already in place.
    pub fn forward_fill(&self, assignment: &mut [bool]) {
        for entry in &self.trace {
            match entry {
                TraceEntry::Gate(g) => {
                    let x = assignment[g.x.index()];
                    let y = g.y.map(|y| assignment[y.index()]).unwrap_or(false);
                    assignment[g.out.index()] = g.kind.eval(x, y);
                    if let Some(a) = g.ancilla {
                        assignment[a.index()] = g.kind.ancilla(x, y);
                    }
                }
                TraceEntry::DivRem(d) => {
                    let a = to_bits(&d.dividend, assignment);
                    let b = to_bits(&d.divisor, assignment);
                    let w = d.dividend.len();
                    let (q, r) = match (a.checked_div(b), a.checked_rem(b)) {
                        (Some(q), Some(r)) => (q, r),
                        _ => (u64::MAX, a),
                    };
                    for i in 0..w {
                        assignment[d.quotient[i].index()] = (q >> i) & 1 == 1;
                        assignment[d.remainder[i].index()] = (r >> i) & 1 == 1;
                    }
                }
            }
        }
    }
}
