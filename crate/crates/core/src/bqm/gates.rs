//! Penalty polynomials of the gate library.
//!
//! Roles: `X`, `Y` are inputs, `Z` the output and `A` an ancilla. `NOT` uses
//! `X` as input and `Y` as output. Every penalty is 0 exactly on the rows of
//! the gate relation (for some ancilla value) and at least 1 elsewhere.

use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Not,
    And,
    Nand,
    Or,
    /// `z = !x & y`
    Inhibit,
    Xor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    X,
    Y,
    Z,
    A,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Term {
    Offset(i64),
    Linear(Role, i64),
    Quadratic(Role, Role, i64),
}

use Role::{A, X, Y, Z};
use Term::{Linear as L, Offset as O, Quadratic as Q};

const NOT: &[Term] = &[O(2), L(X, -2), L(Y, -2), Q(X, Y, 4)];
const AND: &[Term] = &[L(Z, 6), Q(X, Y, 2), Q(X, Z, -4), Q(Y, Z, -4)];
const NAND: &[Term] = &[
    O(6),
    L(X, -4),
    L(Y, -4),
    L(Z, -6),
    Q(X, Y, 2),
    Q(X, Z, 4),
    Q(Y, Z, 4),
];
const OR: &[Term] = &[L(X, 2), L(Y, 2), L(Z, 2), Q(X, Y, 2), Q(X, Z, -4), Q(Y, Z, -4)];
const INHIBIT: &[Term] = &[L(Y, 2), L(Z, 2), Q(X, Y, -2), Q(X, Z, 4), Q(Y, Z, -4)];
const XOR: &[Term] = &[
    L(X, 1),
    L(Y, 1),
    L(Z, 1),
    L(A, 4),
    Q(X, Y, 2),
    Q(X, Z, 2),
    Q(Y, Z, 2),
    Q(X, A, -4),
    Q(Y, A, -4),
    Q(Z, A, -4),
];

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::Not,
        GateKind::And,
        GateKind::Nand,
        GateKind::Or,
        GateKind::Inhibit,
        GateKind::Xor,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 1,
            _ => 2,
        }
    }

    pub fn has_ancilla(self) -> bool {
        self == GateKind::Xor
    }

    pub fn is_commutative(self) -> bool {
        !matches!(self, GateKind::Not | GateKind::Inhibit)
    }

    /// Truth function; `y` is ignored by `NOT`.
    pub fn eval(self, x: bool, y: bool) -> bool {
        match self {
            GateKind::Not => !x,
            GateKind::And => x & y,
            GateKind::Nand => !(x & y),
            GateKind::Or => x | y,
            GateKind::Inhibit => !x & y,
            GateKind::Xor => x ^ y,
        }
    }

    /// Ancilla value minimizing the penalty on a valid row.
    pub fn ancilla(self, x: bool, y: bool) -> bool {
        x | y
    }

    pub fn penalty(self) -> &'static [Term] {
        match self {
            GateKind::Not => NOT,
            GateKind::And => AND,
            GateKind::Nand => NAND,
            GateKind::Or => OR,
            GateKind::Inhibit => INHIBIT,
            GateKind::Xor => XOR,
        }
    }

    /// Evaluates the penalty polynomial. For `NOT` the output is `y`.
    pub fn evaluate_penalty(self, x: bool, y: bool, z: bool, a: bool) -> i64 {
        let value = |r: Role| match r {
            X => x,
            Y => y,
            Z => z,
            A => a,
        } as i64;
        self.penalty()
            .iter()
            .map(|t| match *t {
                O(c) => c,
                L(r, c) => c * value(r),
                Q(r, s, c) => c * value(r) * value(s),
            })
            .sum()
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Not => "not",
            GateKind::And => "and",
            GateKind::Nand => "nand",
            GateKind::Or => "or",
            GateKind::Inhibit => "inhibit",
            GateKind::Xor => "xor",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown gate `{s}`"))
    }
}
