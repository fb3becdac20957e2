//! The BTOR2 subset understood by this crate.
//!
//! Supported keywords: `sort bitvec|array`, `zero`, `one`, `constd`, `const`,
//! `consth`, `add`, `sub`, `mul`, `udiv`, `urem`, `ult`, `ulte`, `ugt`, `ugte`,
//! `eq`, `neq`, `and`, `not`, `inc`, `dec`, `ite`, `uext`, `slice`, `read`,
//! `write`, `state`, `input`, `init`, `next` and `bad`. Everything else
//! (negated operands, `justice`, `fair`, signed operators, shifts) is rejected.
//!
//! Bit-vector widths are limited to 64 bits.

mod parse;
mod print;
pub mod reach;
pub mod sim;
pub mod value;

use std::collections::BTreeMap;

pub use parse::{parse_btor2, ParseError};
pub use print::print_btor2;
pub use reach::{brute_force_reachability, InputDomain, ReachError, Reached, DEFAULT_ENUMERATION_LIMIT};
pub use sim::{complete_inputs, simulate, step_model, SimError, SimOutcome, SimState, Step, Witness};
pub use value::{ArrayValue, BitVecValue, Value};

/// Node identifier. Strictly increasing within a model.
pub type Nid = u64;

/// Maximum supported bit-vector width.
pub const MAX_WIDTH: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sort {
    Bitvec(u32),
    Array { index: u32, element: u32 },
}

impl Sort {
    pub fn width(self) -> Option<u32> {
        match self {
            Sort::Bitvec(w) => Some(w),
            Sort::Array { .. } => None,
        }
    }

    pub fn is_bool(self) -> bool {
        self == Sort::Bitvec(1)
    }
}

/// A `sort` line as written, referring to other sort lines by nid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SortDecl {
    Bitvec(u32),
    Array { index: Nid, element: Nid },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstForm {
    Zero,
    One,
    Decimal,
    Binary,
    Hex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Inc,
    Dec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Udiv,
    Urem,
    Ult,
    Ulte,
    Ugt,
    Ugte,
    Eq,
    Neq,
    And,
}

impl BinaryOp {
    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOp::Ult | BinaryOp::Ulte | BinaryOp::Ugt | BinaryOp::Ugte | BinaryOp::Eq | BinaryOp::Neq
        )
    }

    pub fn keyword(self) -> &'static str {
        match self {
            BinaryOp::Add => "add",
            BinaryOp::Sub => "sub",
            BinaryOp::Mul => "mul",
            BinaryOp::Udiv => "udiv",
            BinaryOp::Urem => "urem",
            BinaryOp::Ult => "ult",
            BinaryOp::Ulte => "ulte",
            BinaryOp::Ugt => "ugt",
            BinaryOp::Ugte => "ugte",
            BinaryOp::Eq => "eq",
            BinaryOp::Neq => "neq",
            BinaryOp::And => "and",
        }
    }
}

impl UnaryOp {
    pub fn keyword(self) -> &'static str {
        match self {
            UnaryOp::Not => "not",
            UnaryOp::Inc => "inc",
            UnaryOp::Dec => "dec",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Sort(SortDecl),
    Const { sort: Nid, form: ConstForm, value: u64 },
    Unary { op: UnaryOp, sort: Nid, arg: Nid },
    Binary { op: BinaryOp, sort: Nid, lhs: Nid, rhs: Nid },
    Ite { sort: Nid, cond: Nid, then: Nid, els: Nid },
    Uext { sort: Nid, arg: Nid, amount: u32 },
    Slice { sort: Nid, arg: Nid, upper: u32, lower: u32 },
    Read { sort: Nid, array: Nid, index: Nid },
    Write { sort: Nid, array: Nid, index: Nid, value: Nid },
    State { sort: Nid },
    Input { sort: Nid },
    Init { sort: Nid, state: Nid, value: Nid },
    Next { sort: Nid, state: Nid, value: Nid },
    Bad { cond: Nid },
}

impl Op {
    /// Nids this line refers to (sorts excluded).
    pub fn operands(&self) -> Vec<Nid> {
        match *self {
            Op::Sort(_) | Op::Const { .. } | Op::State { .. } | Op::Input { .. } => vec![],
            Op::Unary { arg, .. } | Op::Uext { arg, .. } | Op::Slice { arg, .. } => vec![arg],
            Op::Binary { lhs, rhs, .. } => vec![lhs, rhs],
            Op::Ite { cond, then, els, .. } => vec![cond, then, els],
            Op::Read { array, index, .. } => vec![array, index],
            Op::Write { array, index, value, .. } => vec![array, index, value],
            Op::Init { state, value, .. } | Op::Next { state, value, .. } => vec![state, value],
            Op::Bad { cond } => vec![cond],
        }
    }

    pub fn sort_nid(&self) -> Option<Nid> {
        match *self {
            Op::Sort(_) | Op::Bad { .. } => None,
            Op::Const { sort, .. }
            | Op::Unary { sort, .. }
            | Op::Binary { sort, .. }
            | Op::Ite { sort, .. }
            | Op::Uext { sort, .. }
            | Op::Slice { sort, .. }
            | Op::Read { sort, .. }
            | Op::Write { sort, .. }
            | Op::State { sort }
            | Op::Input { sort }
            | Op::Init { sort, .. }
            | Op::Next { sort, .. } => Some(sort),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub nid: Nid,
    pub op: Op,
    pub symbol: Option<String>,
}

/// A parsed model. Immutable after construction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransitionModel {
    nodes: BTreeMap<Nid, Node>,
    sorts: BTreeMap<Nid, Sort>,
    states: Vec<Nid>,
    inputs: Vec<Nid>,
    bads: Vec<Nid>,
    init_of: BTreeMap<Nid, Nid>,
    next_of: BTreeMap<Nid, Nid>,
    /// States with an `init`, in the order of their `init` lines.
    init_order: Vec<Nid>,
}

impl TransitionModel {
    pub fn node(&self, nid: Nid) -> Option<&Node> {
        self.nodes.get(&nid)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn states(&self) -> &[Nid] {
        &self.states
    }

    pub fn inputs(&self) -> &[Nid] {
        &self.inputs
    }

    /// Nids of the `bad` lines.
    pub fn bads(&self) -> &[Nid] {
        &self.bads
    }

    /// Value nid of the `init` of `state`, if any.
    pub fn init_of(&self, state: Nid) -> Option<Nid> {
        self.init_of.get(&state).copied()
    }

    pub fn next_of(&self, state: Nid) -> Option<Nid> {
        self.next_of.get(&state).copied()
    }

    pub fn init_order(&self) -> &[Nid] {
        &self.init_order
    }

    /// States without an `init` line.
    pub fn uninitialized_states(&self) -> impl Iterator<Item = Nid> + '_ {
        self.states.iter().copied().filter(|s| !self.init_of.contains_key(s))
    }

    /// Resolved sort of a node (or of a sort line itself).
    pub fn sort_of(&self, nid: Nid) -> Option<Sort> {
        if let Some(sort) = self.sorts.get(&nid) {
            return Some(*sort);
        }
        let node = self.nodes.get(&nid)?;
        match node.op {
            Op::Bad { .. } => Some(Sort::Bitvec(1)),
            _ => self.sorts.get(&node.op.sort_nid()?).copied(),
        }
    }

    /// Bit width of a bit-vector node.
    pub fn width_of(&self, nid: Nid) -> Option<u32> {
        self.sort_of(nid).and_then(Sort::width)
    }

    /// Condition node of a `bad` line.
    pub fn bad_condition(&self, bad: Nid) -> Option<Nid> {
        match self.nodes.get(&bad)?.op {
            Op::Bad { cond } => Some(cond),
            _ => None,
        }
    }

    pub fn symbol(&self, nid: Nid) -> Option<&str> {
        self.nodes.get(&nid)?.symbol.as_deref()
    }

    /// Finds the first node carrying `symbol`.
    pub fn find_symbol(&self, symbol: &str) -> Option<Nid> {
        self.nodes
            .values()
            .find(|n| n.symbol.as_deref() == Some(symbol))
            .map(|n| n.nid)
    }
}
