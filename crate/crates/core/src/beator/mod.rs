//! RISC-U frontend: assembler, emulator and the 32-bit MMURAM translation
//! into BTOR2 text.

mod asm;
mod emulate;
mod translate;

use std::collections::BTreeMap;
use std::fmt;

pub use asm::{assemble, AsmError};
pub use emulate::{emulate, EmulateError, InputChunk, MachineState, Outcome, OutcomeKind};
pub use translate::{translate_beator, BeatorError, BeatorModel};

pub const CODE_START: u32 = 0x10000;
pub const PAGE_SIZE: u32 = 4096;
pub const HIGHEST_ADDRESS: u32 = 0xFFFF_FFFC;
pub const INITIAL_SP: u32 = 0xFFFF_FFF8;

pub const SYSCALL_EXIT: u32 = 93;
pub const SYSCALL_READ: u32 = 63;
pub const SYSCALL_WRITE: u32 = 64;
pub const SYSCALL_OPENAT: u32 = 56;
pub const SYSCALL_BRK: u32 = 214;

pub const REGISTER_NAMES: [&str; 32] = [
    "zero", "ra", "sp", "gp", "tp", "t0", "t1", "t2", "s0", "s1", "a0", "a1", "a2", "a3", "a4", "a5", "a6", "a7",
    "s2", "s3", "s4", "s5", "s6", "s7", "s8", "s9", "s10", "s11", "t3", "t4", "t5", "t6",
];

pub const RA: u8 = 1;
pub const SP: u8 = 2;
pub const GP: u8 = 3;
pub const A0: u8 = 10;
pub const A1: u8 = 11;
pub const A2: u8 = 12;
pub const A7: u8 = 17;

/// Bad-state labels in the order the translation emits them. There is no `b5`.
pub const BAD_LABELS: [&str; 11] = ["b0", "b1", "b2", "b3", "b4", "b6", "b7", "b8", "b9", "b10", "b11"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AluOp {
    Add,
    Sub,
    Mul,
    Divu,
    Remu,
    Sltu,
}

impl AluOp {
    pub const ALL: [AluOp; 6] = [AluOp::Add, AluOp::Sub, AluOp::Mul, AluOp::Divu, AluOp::Remu, AluOp::Sltu];

    pub fn mnemonic(self) -> &'static str {
        match self {
            AluOp::Add => "add",
            AluOp::Sub => "sub",
            AluOp::Mul => "mul",
            AluOp::Divu => "divu",
            AluOp::Remu => "remu",
            AluOp::Sltu => "sltu",
        }
    }

    /// RISC-V semantics, including division by zero.
    pub fn apply(self, a: u32, b: u32) -> u32 {
        match self {
            AluOp::Add => a.wrapping_add(b),
            AluOp::Sub => a.wrapping_sub(b),
            AluOp::Mul => a.wrapping_mul(b),
            AluOp::Divu => a.checked_div(b).unwrap_or(u32::MAX),
            AluOp::Remu => a.checked_rem(b).unwrap_or(a),
            AluOp::Sltu => (a < b) as u32,
        }
    }
}

/// One RISC-U instruction. Branch and jump immediates are byte offsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Instruction {
    /// `rd = imm << 12`, `imm` in `0..2^20`.
    Lui { rd: u8, imm: u32 },
    Addi { rd: u8, rs1: u8, imm: i32 },
    Lw { rd: u8, rs1: u8, imm: i32 },
    /// Stores `rs2` at `rs1 + imm`.
    Sw { rs1: u8, rs2: u8, imm: i32 },
    Alu { op: AluOp, rd: u8, rs1: u8, rs2: u8 },
    Beq { rs1: u8, rs2: u8, imm: i32 },
    Jal { rd: u8, imm: i32 },
    Jalr { rd: u8, rs1: u8, imm: i32 },
    Ecall,
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = |i: u8| REGISTER_NAMES[i as usize];
        match *self {
            Instruction::Lui { rd, imm } => write!(f, "lui {},{:#x}", r(rd), imm),
            Instruction::Addi { rd, rs1, imm } => write!(f, "addi {},{},{}", r(rd), r(rs1), imm),
            Instruction::Lw { rd, rs1, imm } => write!(f, "lw {},{}({})", r(rd), imm, r(rs1)),
            Instruction::Sw { rs1, rs2, imm } => write!(f, "sw {},{}({})", r(rs2), imm, r(rs1)),
            Instruction::Alu { op, rd, rs1, rs2 } => write!(f, "{} {},{},{}", op.mnemonic(), r(rd), r(rs1), r(rs2)),
            Instruction::Beq { rs1, rs2, imm } => write!(f, "beq {},{},{}", r(rs1), r(rs2), imm),
            Instruction::Jal { rd, imm } => write!(f, "jal {},{}", r(rd), imm),
            Instruction::Jalr { rd, rs1, imm } => write!(f, "jalr {},{}({})", r(rd), imm, r(rs1)),
            Instruction::Ecall => f.write_str("ecall"),
        }
    }
}

/// Virtual memory layout. Code, data and heap start on page boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub code_start: u32,
    pub code_end: u32,
    pub data_start: u32,
    pub data_end: u32,
    /// Start of heap and initial program break.
    pub heap_start: u32,
    pub allowed_heap_end: u32,
    pub allowed_stack_start: u32,
    pub initial_sp: u32,
    pub highest_address: u32,
}

impl Layout {
    /// Word addresses backed by physical memory: data, the heap allowance and
    /// the stack from its allowed start up to the highest address.
    pub fn physical_words(&self) -> Vec<u32> {
        let mut words = Vec::new();
        let mut v = self.data_start as u64;
        while v <= self.highest_address as u64 {
            if v == self.data_end as u64 {
                v = self.heap_start as u64;
            }
            if v == self.allowed_heap_end as u64 {
                v = self.allowed_stack_start as u64;
            }
            words.push(v as u32);
            v += 4;
        }
        words
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiscUProgram {
    pub code: Vec<Instruction>,
    pub data: Vec<u32>,
    pub layout: Layout,
    pub entry: u32,
    /// Label addresses, both code and data.
    pub labels: BTreeMap<String, u32>,
}

impl RiscUProgram {
    pub fn instruction_at(&self, pc: u32) -> Option<Instruction> {
        if pc < self.layout.code_start || pc % 4 != 0 {
            return None;
        }
        self.code.get(((pc - self.layout.code_start) / 4) as usize).copied()
    }

    /// Initial register file as set up by the loader.
    pub fn initial_registers(&self) -> [u32; 32] {
        let mut regs = [0; 32];
        regs[SP as usize] = self.layout.initial_sp;
        regs[GP as usize] = self.layout.data_end;
        regs
    }

    /// Initial value of every physical memory word.
    pub fn initial_memory(&self) -> BTreeMap<u32, u32> {
        let mut memory: BTreeMap<u32, u32> = self.layout.physical_words().into_iter().map(|a| (a, 0)).collect();
        for (i, &w) in self.data.iter().enumerate() {
            memory.insert(self.layout.data_start + 4 * i as u32, w);
        }
        memory
    }

    /// Static control-flow successors of the instruction at `pc`, excluding
    /// procedure returns, which resume after the calling `jal`.
    pub fn successors(&self, pc: u32) -> Vec<u32> {
        let Some(ins) = self.instruction_at(pc) else {
            return Vec::new();
        };
        let rel = |imm: i32| pc.wrapping_add(imm as u32);
        match ins {
            Instruction::Beq { imm, .. } => vec![rel(imm), pc + 4],
            Instruction::Jal { rd, imm } if rd != 0 => vec![rel(imm), pc + 4],
            Instruction::Jal { imm, .. } => vec![rel(imm)],
            Instruction::Jalr { .. } => Vec::new(),
            _ => vec![pc + 4],
        }
    }

    /// Addresses of instructions reachable from the entry point.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.code.len()];
        let mut stack = vec![self.entry];
        while let Some(pc) = stack.pop() {
            if self.instruction_at(pc).is_none() {
                continue;
            }
            let i = ((pc - self.layout.code_start) / 4) as usize;
            if !std::mem::replace(&mut seen[i], true) {
                stack.extend(self.successors(pc));
            }
        }
        seen
    }
}
