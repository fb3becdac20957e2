use std::collections::BTreeMap;
use std::fmt;

/// Unsigned bit-vector value of a fixed width (1..=64).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVecValue {
    width: u32,
    bits: u64,
}

pub(crate) fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl BitVecValue {
    /// Builds a value, truncating `bits` to `width`.
    pub fn new(width: u32, bits: u64) -> Self {
        assert!((1..=64).contains(&width), "bit-vector width {width} out of range");
        BitVecValue { width, bits: bits & mask(width) }
    }

    pub fn zero(width: u32) -> Self {
        Self::new(width, 0)
    }

    pub fn from_bool(b: bool) -> Self {
        Self::new(1, b as u64)
    }

    pub fn width(self) -> u32 {
        self.width
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn is_true(self) -> bool {
        self.bits != 0
    }

    pub fn bit(self, i: u32) -> bool {
        (self.bits >> i) & 1 == 1
    }

    fn with(self, bits: u64) -> Self {
        Self::new(self.width, bits)
    }

    pub fn add(self, rhs: Self) -> Self {
        self.with(self.bits.wrapping_add(rhs.bits))
    }

    pub fn sub(self, rhs: Self) -> Self {
        self.with(self.bits.wrapping_sub(rhs.bits))
    }

    pub fn mul(self, rhs: Self) -> Self {
        self.with(self.bits.wrapping_mul(rhs.bits))
    }

    /// Unsigned division; division by zero yields all ones (RISC-V convention).
    pub fn udiv(self, rhs: Self) -> Self {
        match self.bits.checked_div(rhs.bits) {
            Some(q) => self.with(q),
            None => self.with(u64::MAX),
        }
    }

    /// Unsigned remainder; remainder by zero yields the dividend (RISC-V convention).
    pub fn urem(self, rhs: Self) -> Self {
        match self.bits.checked_rem(rhs.bits) {
            Some(r) => self.with(r),
            None => self,
        }
    }

    pub fn and(self, rhs: Self) -> Self {
        self.with(self.bits & rhs.bits)
    }

    pub fn not(self) -> Self {
        self.with(!self.bits)
    }

    pub fn inc(self) -> Self {
        self.with(self.bits.wrapping_add(1))
    }

    pub fn dec(self) -> Self {
        self.with(self.bits.wrapping_sub(1))
    }

    pub fn uext(self, amount: u32) -> Self {
        Self::new(self.width + amount, self.bits)
    }

    pub fn slice(self, upper: u32, lower: u32) -> Self {
        Self::new(upper - lower + 1, self.bits >> lower)
    }
}

impl fmt::Display for BitVecValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits)
    }
}

/// Sparse array contents; unwritten indices hold `default`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrayValue {
    pub index_width: u32,
    pub element_width: u32,
    pub default: u64,
    pub entries: BTreeMap<u64, u64>,
}

impl ArrayValue {
    pub fn filled(index_width: u32, element_width: u32, default: u64) -> Self {
        ArrayValue {
            index_width,
            element_width,
            default: default & mask(element_width),
            entries: BTreeMap::new(),
        }
    }

    pub fn read(&self, index: u64) -> BitVecValue {
        let bits = self.entries.get(&index).copied().unwrap_or(self.default);
        BitVecValue::new(self.element_width, bits)
    }

    pub fn write(&self, index: u64, value: u64) -> Self {
        let mut next = self.clone();
        let value = value & mask(self.element_width);
        if value == self.default {
            next.entries.remove(&index);
        } else {
            next.entries.insert(index, value);
        }
        next
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Bv(BitVecValue),
    Array(ArrayValue),
}

impl Value {
    pub fn as_bv(&self) -> Option<BitVecValue> {
        match self {
            Value::Bv(v) => Some(*v),
            Value::Array(_) => None,
        }
    }

    pub fn as_array(&self) -> Option<&ArrayValue> {
        match self {
            Value::Array(a) => Some(a),
            Value::Bv(_) => None,
        }
    }
}

impl From<BitVecValue> for Value {
    fn from(v: BitVecValue) -> Self {
        Value::Bv(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_wraps_at_width() {
        let a = BitVecValue::new(3, 7);
        assert_eq!(a.inc().bits(), 0);
        assert_eq!(BitVecValue::new(3, 0).dec().bits(), 7);
        assert_eq!(a.mul(BitVecValue::new(3, 3)).bits(), 5);
        assert_eq!(BitVecValue::new(4, 9).bits(), 9);
        assert_eq!(BitVecValue::new(3, 9).bits(), 1);
    }

    #[test]
    fn division_by_zero_follows_riscv() {
        let a = BitVecValue::new(8, 42);
        let zero = BitVecValue::zero(8);
        assert_eq!(a.udiv(zero).bits(), 255);
        assert_eq!(a.urem(zero).bits(), 42);
    }

    #[test]
    fn slice_and_uext() {
        let a = BitVecValue::new(8, 0b1011_0110);
        assert_eq!(a.slice(5, 2), BitVecValue::new(4, 0b1101));
        assert_eq!(a.uext(24).width(), 32);
        assert_eq!(a.uext(24).bits(), 0b1011_0110);
    }

    #[test]
    fn sparse_array_defaults() {
        let a = ArrayValue::filled(4, 8, 0);
        let b = a.write(3, 17);
        assert_eq!(b.read(3).bits(), 17);
        assert_eq!(b.read(2).bits(), 0);
        assert_eq!(b.write(3, 0), a);
    }
}
