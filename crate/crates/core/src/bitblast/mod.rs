//! Word-level operators as gate circuits.
//!
//! Variables allocated per operator, for width `w` and fully symbolic operands:
//!
//! | operator | variables |
//! |---|---|
//! | `add`, `sub`, `inc`, `dec` | ≤ 7w |
//! | `ult`, `ulte`, `ugt`, `ugte` | ≤ 6w |
//! | `eq`, `neq` | ≤ 5w |
//! | `and`, `not`, `ite` | ≤ 3w |
//! | `mul` | ≤ 8w² |
//! | `udiv`, `urem` | ≤ 40w² |
//! | `read`, `write` | ≤ 8·m·w for `m` memory words |
//! | `uext`, `slice` | 0 |
//!
//! Constant operand bits fold, so the real counts are usually lower.

use std::collections::HashMap;

use thiserror::Error;

use crate::bqm::{BinaryQuadraticModel, Bit};

/// Bits of a bit-vector, least significant first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    pub bits: Vec<Bit>,
}

impl Word {
    pub fn new(bits: Vec<Bit>) -> Self {
        assert!(!bits.is_empty(), "words have at least one bit");
        Word { bits }
    }

    pub fn constant(width: u32, value: u64) -> Self {
        Word::new((0..width).map(|i| Bit::Const(i < 64 && (value >> i) & 1 == 1)).collect())
    }

    pub fn from_bit(bit: Bit) -> Self {
        Word::new(vec![bit])
    }

    pub fn fresh(bqm: &mut BinaryQuadraticModel, width: u32) -> Self {
        Word::new((0..width).map(|_| Bit::Var(bqm.new_free_var())).collect())
    }

    pub fn width(&self) -> u32 {
        self.bits.len() as u32
    }

    pub fn bit(&self, i: u32) -> Bit {
        self.bits[i as usize]
    }

    pub fn as_const(&self) -> Option<u64> {
        self.bits.iter().enumerate().try_fold(0u64, |acc, (i, b)| {
            b.as_const().map(|v| acc | ((v as u64) << i))
        })
    }

    pub fn is_const(&self) -> bool {
        self.bits.iter().all(|b| b.is_const())
    }

    /// Number of variable bits.
    pub fn var_count(&self) -> usize {
        self.bits.iter().filter(|b| !b.is_const()).count()
    }

    /// Value under a full assignment.
    pub fn value(&self, assignment: &[bool]) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, b)| acc | ((b.value(assignment) as u64) << i))
    }
}

/// Contents of an array over its whole index range: entry `i` holds the
/// word at address `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemoryImage {
    pub index_width: u32,
    pub element_width: u32,
    pub words: Vec<Word>,
}

impl MemoryImage {
    /// Every address holds `fill`.
    pub fn filled(index_width: u32, fill: &Word, limit: u32) -> Result<Self, BlastError> {
        if index_width > limit {
            return Err(BlastError::ExpansionLimit { index_width, limit });
        }
        Ok(MemoryImage {
            index_width,
            element_width: fill.width(),
            words: vec![fill.clone(); 1usize << index_width],
        })
    }

    /// Ascending `(address, word)` pairs.
    pub fn entries(&self) -> impl Iterator<Item = (u64, &Word)> {
        self.words.iter().enumerate().map(|(i, w)| (i as u64, w))
    }

    pub fn var_count(&self) -> usize {
        self.words.iter().map(Word::var_count).sum()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlastError {
    #[error("operand widths {0} and {1} differ")]
    WidthMismatch(u32, u32),
    #[error("slice {upper}..{lower} out of range for width {width}")]
    SliceOutOfRange { upper: u32, lower: u32, width: u32 },
    #[error("`{op:?}` expects {expected} operands, got {got}")]
    Arity { op: WordOp, expected: usize, got: usize },
    #[error("array index width {index_width} exceeds the expansion limit {limit}")]
    ExpansionLimit { index_width: u32, limit: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordOp {
    Add,
    Sub,
    Mul,
    Inc,
    Dec,
    Ult,
    Ulte,
    Ugt,
    Ugte,
    Eq,
    Neq,
    And,
    Not,
    /// Operands: 1-bit condition, then, else.
    Ite,
    Uext(u32),
    Slice { upper: u32, lower: u32 },
}

impl WordOp {
    fn arity(self) -> usize {
        match self {
            WordOp::Inc | WordOp::Dec | WordOp::Not | WordOp::Uext(_) | WordOp::Slice { .. } => 1,
            WordOp::Ite => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlastOptions {
    /// Penalty for violating a pinned bit.
    pub pin_strength: i64,
    /// Make `udiv`/`urem` satisfiable for a zero divisor, yielding all ones
    /// and the dividend as the simulator does. Without the guard a zero
    /// divisor makes the constraints unsatisfiable.
    pub guard_zero_divisor: bool,
    /// Largest array index width that is expanded into words.
    pub expansion_limit: u32,
}

impl Default for BlastOptions {
    fn default() -> Self {
        BlastOptions {
            pin_strength: 1,
            guard_zero_divisor: true,
            expansion_limit: 12,
        }
    }
}

/// A model under construction together with circuit-level caches.
#[derive(Clone, Debug, Default)]
pub struct Blaster {
    pub bqm: BinaryQuadraticModel,
    pub options: BlastOptions,
    divrem: HashMap<(Word, Word), (Word, Word)>,
}

fn same_width(a: &Word, b: &Word) -> Result<(), BlastError> {
    if a.width() == b.width() {
        Ok(())
    } else {
        Err(BlastError::WidthMismatch(a.width(), b.width()))
    }
}

impl Blaster {
    pub fn new(options: BlastOptions) -> Self {
        Blaster {
            bqm: BinaryQuadraticModel::new(),
            options,
            divrem: HashMap::new(),
        }
    }

    pub fn into_bqm(self) -> BinaryQuadraticModel {
        self.bqm
    }

    /// Dispatches a word-level operator.
    pub fn blast_word_op(&mut self, op: WordOp, operands: &[&Word]) -> Result<Word, BlastError> {
        if operands.len() != op.arity() {
            return Err(BlastError::Arity {
                op,
                expected: op.arity(),
                got: operands.len(),
            });
        }
        let a = operands[0];
        if op.arity() == 2 {
            same_width(a, operands[1])?;
        }
        let b = || operands[1];
        Ok(match op {
            WordOp::Add => self.add(a, b()),
            WordOp::Sub => self.sub(a, b()),
            WordOp::Mul => self.mul(a, b()),
            WordOp::Inc => self.add(a, &Word::constant(a.width(), 1)),
            WordOp::Dec => self.sub(a, &Word::constant(a.width(), 1)),
            WordOp::Ult => Word::from_bit(self.ult(a, b())),
            WordOp::Ulte => {
                let gt = self.ult(b(), a);
                Word::from_bit(self.bqm.not(gt))
            }
            WordOp::Ugt => Word::from_bit(self.ult(b(), a)),
            WordOp::Ugte => {
                let lt = self.ult(a, b());
                Word::from_bit(self.bqm.not(lt))
            }
            WordOp::Eq => Word::from_bit(self.eq(a, b())),
            WordOp::Neq => {
                let e = self.eq(a, b());
                Word::from_bit(self.bqm.not(e))
            }
            WordOp::And => self.and(a, b()),
            WordOp::Not => self.not(a),
            WordOp::Ite => {
                let (t, e) = (operands[1], operands[2]);
                if a.width() != 1 {
                    return Err(BlastError::WidthMismatch(a.width(), 1));
                }
                same_width(t, e)?;
                self.ite(a.bit(0), t, e)
            }
            WordOp::Uext(amount) => uext(a, amount),
            WordOp::Slice { upper, lower } => slice(a, upper, lower)?,
        })
    }

    /// Sum and carry-out of `a + b + carry`.
    pub fn add_with_carry(&mut self, a: &Word, b: &Word, carry: Bit) -> (Word, Bit) {
        let mut carry = carry;
        let mut bits = Vec::with_capacity(a.bits.len());
        for (&x, &y) in a.bits.iter().zip(&b.bits) {
            let p = self.bqm.xor(x, y);
            bits.push(self.bqm.xor(p, carry));
            let g = self.bqm.and(x, y);
            let t = self.bqm.and(p, carry);
            carry = self.bqm.or(g, t);
        }
        (Word::new(bits), carry)
    }

    pub fn add(&mut self, a: &Word, b: &Word) -> Word {
        self.add_with_carry(a, b, Bit::ZERO).0
    }

    pub fn sub(&mut self, a: &Word, b: &Word) -> Word {
        let nb = self.not(b);
        self.add_with_carry(a, &nb, Bit::ONE).0
    }

    pub fn not(&mut self, a: &Word) -> Word {
        Word::new(a.bits.iter().map(|&x| self.bqm.not(x)).collect())
    }

    pub fn and(&mut self, a: &Word, b: &Word) -> Word {
        Word::new(a.bits.iter().zip(&b.bits).map(|(&x, &y)| self.bqm.and(x, y)).collect())
    }

    /// Low `width` bits of `a · b` (shift and add).
    pub fn mul_to(&mut self, a: &Word, b: &Word, width: u32) -> Word {
        let width = width as usize;
        let mut acc = Word::constant(width as u32, 0);
        for (i, &bi) in b.bits.iter().enumerate().take(width) {
            if bi == Bit::ZERO {
                continue;
            }
            let mut partial = vec![Bit::ZERO; width];
            for (j, &aj) in a.bits.iter().enumerate() {
                if i + j < width {
                    partial[i + j] = self.bqm.and(aj, bi);
                }
            }
            // bits below i are unchanged by the partial product
            let (low, high) = acc.bits.split_at(i);
            let sum = self.add(&Word::new(high.to_vec()), &Word::new(partial[i..].to_vec()));
            acc = Word::new(low.iter().copied().chain(sum.bits).collect());
        }
        acc
    }

    pub fn mul(&mut self, a: &Word, b: &Word) -> Word {
        self.mul_to(a, b, a.width())
    }

    /// `a < b`, scanning from the least significant bit.
    pub fn ult(&mut self, a: &Word, b: &Word) -> Bit {
        let mut lt = Bit::ZERO;
        for (&x, &y) in a.bits.iter().zip(&b.bits) {
            let d = self.bqm.xor(x, y);
            lt = self.bqm.mux(d, y, lt);
        }
        lt
    }

    pub fn eq(&mut self, a: &Word, b: &Word) -> Bit {
        let same: Vec<Bit> = a.bits.iter().zip(&b.bits).map(|(&x, &y)| self.bqm.xnor(x, y)).collect();
        self.and_reduce(&same)
    }

    /// Balanced AND tree.
    pub fn and_reduce(&mut self, bits: &[Bit]) -> Bit {
        self.reduce(bits, true)
    }

    /// Balanced OR tree.
    pub fn or_reduce(&mut self, bits: &[Bit]) -> Bit {
        self.reduce(bits, false)
    }

    fn reduce(&mut self, bits: &[Bit], and: bool) -> Bit {
        let neutral = Bit::Const(and);
        let absorbing = Bit::Const(!and);
        if bits.contains(&absorbing) {
            return absorbing;
        }
        let mut layer: Vec<Bit> = bits.iter().copied().filter(|&b| b != neutral).collect();
        if layer.is_empty() {
            return neutral;
        }
        while layer.len() > 1 {
            layer = layer
                .chunks(2)
                .map(|pair| match *pair {
                    [x, y] if and => self.bqm.and(x, y),
                    [x, y] => self.bqm.or(x, y),
                    [x] => x,
                    _ => unreachable!(),
                })
                .collect();
        }
        layer[0]
    }

    pub fn ite(&mut self, c: Bit, t: &Word, e: &Word) -> Word {
        Word::new(t.bits.iter().zip(&e.bits).map(|(&x, &y)| self.bqm.mux(c, x, y)).collect())
    }

    /// Quotient and remainder of unsigned division.
    pub fn udiv_urem(&mut self, a: &Word, b: &Word) -> Result<(Word, Word), BlastError> {
        same_width(a, b)?;
        let w = a.width();
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            let (q, r) = if y == 0 { (u64::MAX, x) } else { (x / y, x % y) };
            return Ok((Word::constant(w, q), Word::constant(w, r)));
        }
        if let Some(hit) = self.divrem.get(&(a.clone(), b.clone())) {
            return Ok(hit.clone());
        }
        let b_zero = {
            let nz = self.or_reduce(&b.bits);
            self.bqm.not(nz)
        };
        if b_zero == Bit::ONE && self.options.guard_zero_divisor {
            return Ok((Word::constant(w, u64::MAX), a.clone()));
        }
        let (qv, rv) = self.bqm.new_divrem(&a.bits, &b.bits);
        let q = Word::new(qv.into_iter().map(Bit::Var).collect());
        let r = Word::new(rv.into_iter().map(Bit::Var).collect());
        let wide_q = uext(&q, w);
        let wide_b = uext(b, w);
        let product = self.mul_to(&wide_q, &wide_b, 2 * w);
        let sum = self.add(&product, &uext(&r, w));
        let below = self.ult(&r, b);
        let strength = self.options.pin_strength;
        let (quotient, remainder) = if b_zero == Bit::ZERO || !self.options.guard_zero_divisor {
            for i in 0..w as usize {
                self.bqm.pin_equal(sum.bits[i], a.bits[i], strength);
                self.bqm.pin_bit(sum.bits[i + w as usize], false, strength);
            }
            self.bqm.pin_bit(below, true, strength);
            (q, r)
        } else {
            let low_ok = self.eq(&Word::new(sum.bits[..w as usize].to_vec()), a);
            let high_any = self.or_reduce(&sum.bits[w as usize..]);
            let ok = self.bqm.inhibit(high_any, low_ok);
            let ok = self.bqm.and(ok, below);
            let satisfied = self.bqm.or(ok, b_zero);
            self.bqm.pin_bit(satisfied, true, strength);
            let ones = Word::constant(w, u64::MAX);
            (self.ite(b_zero, &ones, &q), self.ite(b_zero, a, &r))
        };
        let result = (quotient, remainder);
        self.divrem.insert((a.clone(), b.clone()), result.clone());
        Ok(result)
    }

    fn memory_checks(&self, memory: &MemoryImage, address: &Word) -> Result<(), BlastError> {
        if address.width() != memory.index_width {
            return Err(BlastError::WidthMismatch(address.width(), memory.index_width));
        }
        if memory.index_width > self.options.expansion_limit {
            return Err(BlastError::ExpansionLimit {
                index_width: memory.index_width,
                limit: self.options.expansion_limit,
            });
        }
        Ok(())
    }

    fn address_match(&mut self, address: &Word, index: u64) -> Bit {
        let target = Word::constant(address.width(), index);
        self.eq(address, &target)
    }

    pub fn read(&mut self, memory: &MemoryImage, address: &Word) -> Result<Word, BlastError> {
        self.memory_checks(memory, address)?;
        if let Some(index) = address.as_const() {
            return Ok(memory.words[index as usize].clone());
        }
        let mut result = Word::constant(memory.element_width, 0);
        for (index, word) in memory.entries() {
            let hit = self.address_match(address, index);
            result = self.ite(hit, word, &result);
        }
        Ok(result)
    }

    pub fn write(&mut self, memory: &MemoryImage, address: &Word, value: &Word) -> Result<MemoryImage, BlastError> {
        self.memory_checks(memory, address)?;
        if value.width() != memory.element_width {
            return Err(BlastError::WidthMismatch(value.width(), memory.element_width));
        }
        let mut next = memory.clone();
        if let Some(index) = address.as_const() {
            next.words[index as usize] = value.clone();
            return Ok(next);
        }
        for (index, word) in next.words.iter_mut().enumerate() {
            let hit = self.address_match(address, index as u64);
            *word = self.ite(hit, value, word);
        }
        Ok(next)
    }
}

pub fn uext(a: &Word, amount: u32) -> Word {
    Word::new(a.bits.iter().copied().chain((0..amount).map(|_| Bit::ZERO)).collect())
}

pub fn slice(a: &Word, upper: u32, lower: u32) -> Result<Word, BlastError> {
    if upper < lower || upper >= a.width() {
        return Err(BlastError::SliceOutOfRange {
            upper,
            lower,
            width: a.width(),
        });
    }
    Ok(Word::new(a.bits[lower as usize..=upper as usize].to_vec()))
}
