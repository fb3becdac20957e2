//! Concrete RISC-U execution with the same error checks as the generated
//! model, plus the bookkeeping that maps instructions to model steps.
//!
//! Step accounting follows the model's kernel-mode protocol: an instruction
//! takes one transition; `write`, `openat` and `brk` take one more to leave
//! the ecall; `read` takes one transition per chunk of up to four bytes, one
//! to notice completion and one to leave.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::translate::{call_returns, INPUT_NIDS};
use super::{
    Instruction, RiscUProgram, A0, A1, A2, A7, SP, SYSCALL_BRK, SYSCALL_EXIT, SYSCALL_OPENAT, SYSCALL_READ,
    SYSCALL_WRITE,
};
use crate::btor2::{BitVecValue, Witness};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmulateError {
    #[error("control left the code segment at {pc:#x}")]
    PcOutOfCode { pc: u32 },
    #[error("jalr at {pc:#x} returns to {target:#x}, which is not the site after a call of its procedure")]
    UnsupportedReturn { pc: u32, target: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineState {
    pub pc: u32,
    pub regs: [u32; 32],
    /// Physical words only; other addresses read as zero and ignore writes.
    pub memory: BTreeMap<u32, u32>,
    pub brk: u32,
    pub fd: u32,
    pub kernel_mode: bool,
}

impl MachineState {
    pub fn initial(program: &RiscUProgram) -> Self {
        MachineState {
            pc: program.entry,
            regs: program.initial_registers(),
            memory: program.initial_memory(),
            brk: program.layout.heap_start,
            fd: 1,
            kernel_mode: false,
        }
    }

    fn load(&self, address: u32) -> u32 {
        self.memory.get(&address).copied().unwrap_or(0)
    }

    fn store(&mut self, address: u32, value: u32) {
        if let Some(word) = self.memory.get_mut(&address) {
            *word = value;
        }
    }

    fn set(&mut self, rd: u8, value: u32) {
        if rd != 0 {
            self.regs[rd as usize] = value;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutcomeKind {
    Exit(u32),
    /// Bad labels that hold at model step `step`.
    Bad { labels: Vec<&'static str>, step: usize },
    StepLimit,
}

/// Input consumed by one kernel-mode transition of a `read`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InputChunk {
    pub step: usize,
    pub bytes: u8,
    pub value: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub instructions_executed: usize,
    /// Model transitions taken before the final instruction.
    pub model_steps: usize,
    pub chunks: Vec<InputChunk>,
    pub state: MachineState,
}

impl Outcome {
    /// Model inputs reproducing this run; unspecified inputs are zero.
    pub fn witness(&self) -> Witness {
        let mut witness = Witness::default();
        for chunk in &self.chunks {
            if witness.steps.len() <= chunk.step {
                witness.steps.resize(chunk.step + 1, BTreeMap::new());
            }
            let nid = INPUT_NIDS[chunk.bytes as usize - 1];
            let width = if chunk.bytes == 4 { 32 } else { 8 * chunk.bytes as u32 };
            witness.steps[chunk.step].insert(nid, BitVecValue::new(width, chunk.value as u64));
        }
        witness
    }
}

/// Bad labels for an access starting at `address`.
fn access_bads(program: &RiscUProgram, state: &MachineState, address: u32, bads: &mut Vec<&'static str>) {
    let l = &program.layout;
    let sp = state.regs[SP as usize];
    let within = |lo: u32, hi: u32| address >= lo && address < hi;
    let checks = [
        (address & 3 != 0, "b4"),
        (address < l.data_start, "b6"),
        (within(l.data_end, l.heap_start), "b7"),
        (within(state.brk, sp), "b8"),
        (within(l.allowed_heap_end, state.brk), "b9"),
        (within(sp, l.allowed_stack_start), "b10"),
        (address > l.highest_address, "b11"),
    ];
    bads.extend(checks.iter().filter(|c| c.0).map(|c| c.1));
}

/// Runs at most `step_limit` instructions. Bytes past the end of `input`
/// read as zero.
pub fn emulate(program: &RiscUProgram, input: &[u8], step_limit: usize) -> Result<Outcome, EmulateError> {
    let returns = call_returns(program);
    let reachable = program.reachable();
    // Return targets the model can take from each jalr.
    let mut return_sites: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    for (i, ins) in program.code.iter().enumerate() {
        if let Instruction::Jal { rd, imm } = *ins {
            let pc = program.layout.code_start + 4 * i as u32;
            if rd != 0 && reachable[i] {
                if let Some(&jalr) = returns.get(&pc.wrapping_add(imm as u32)) {
                    return_sites.entry(jalr).or_default().insert(pc + 4);
                }
            }
        }
    }

    let mut state = MachineState::initial(program);
    let mut cursor = 0usize;
    let mut step = 0usize;
    let mut chunks = Vec::new();
    let mut executed = 0usize;
    let finish = |kind, executed, step, chunks, state| Ok(Outcome {
        kind,
        instructions_executed: executed,
        model_steps: step,
        chunks,
        state,
    });

    loop {
        if executed >= step_limit {
            return finish(OutcomeKind::StepLimit, executed, step, chunks, state);
        }
        let pc = state.pc;
        let ins = program.instruction_at(pc).ok_or(EmulateError::PcOutOfCode { pc })?;
        let reg = |r: u8| state.regs[r as usize];

        let mut bads = Vec::new();
        match ins {
            Instruction::Alu { op: super::AluOp::Divu, rd, rs2, .. } if rd != 0 && reg(rs2) == 0 => bads.push("b2"),
            Instruction::Alu { op: super::AluOp::Remu, rd, rs2, .. } if rd != 0 && reg(rs2) == 0 => bads.push("b3"),
            Instruction::Lw { rd, rs1, imm } if rd != 0 => {
                access_bads(program, &state, reg(rs1).wrapping_add(imm as u32), &mut bads)
            }
            Instruction::Sw { rs1, imm, .. } => access_bads(program, &state, reg(rs1).wrapping_add(imm as u32), &mut bads),
            Instruction::Ecall => match reg(A7) {
                SYSCALL_EXIT if reg(A0) != 0 => bads.push("b1"),
                SYSCALL_EXIT | SYSCALL_BRK => {}
                SYSCALL_READ | SYSCALL_WRITE | SYSCALL_OPENAT => access_bads(program, &state, reg(A1), &mut bads),
                _ => bads.push("b0"),
            },
            _ => {}
        }
        if !bads.is_empty() {
            bads.sort_by_key(|label| label[1..].parse::<u8>().unwrap());
            return finish(OutcomeKind::Bad { labels: bads, step }, executed, step, chunks, state);
        }

        let mut next_pc = pc.wrapping_add(4);
        let mut transitions = 1;
        match ins {
            Instruction::Lui { rd, imm } => state.set(rd, imm << 12),
            Instruction::Addi { rd, rs1, imm } => state.set(rd, reg(rs1).wrapping_add(imm as u32)),
            Instruction::Lw { rd, rs1, imm } => {
                if rd != 0 {
                    let value = state.load(reg(rs1).wrapping_add(imm as u32));
                    state.set(rd, value);
                }
            }
            Instruction::Sw { rs1, rs2, imm } => {
                let (address, value) = (reg(rs1).wrapping_add(imm as u32), reg(rs2));
                state.store(address, value);
            }
            Instruction::Alu { op, rd, rs1, rs2 } => state.set(rd, op.apply(reg(rs1), reg(rs2))),
            Instruction::Beq { rs1, rs2, imm } => {
                if reg(rs1) == reg(rs2) {
                    next_pc = pc.wrapping_add(imm as u32);
                }
            }
            Instruction::Jal { rd, imm } => {
                state.set(rd, pc + 4);
                next_pc = pc.wrapping_add(imm as u32);
            }
            Instruction::Jalr { rs1, imm, .. } => {
                let target = reg(rs1).wrapping_add(imm as u32) & !1;
                if !return_sites.get(&pc).is_some_and(|s| s.contains(&target)) {
                    return Err(EmulateError::UnsupportedReturn { pc, target });
                }
                next_pc = target;
            }
            Instruction::Ecall => match reg(A7) {
                SYSCALL_EXIT => {
                    state.kernel_mode = true;
                    return finish(OutcomeKind::Exit(0), executed, step, chunks, state);
                }
                SYSCALL_READ => {
                    let (buffer, count) = (reg(A1), reg(A2));
                    let mut done = 0u32;
                    while done < count {
                        if chunks.len() >= step_limit {
                            return finish(OutcomeKind::StepLimit, executed, step, chunks, state);
                        }
                        let bytes = (count - done).min(4);
                        let mut value = 0u32;
                        for k in 0..bytes {
                            let byte = input.get(cursor).copied().unwrap_or(0);
                            cursor += 1;
                            value |= (byte as u32) << (8 * k);
                        }
                        state.store(buffer.wrapping_add(done), value);
                        chunks.push(InputChunk { step: step + transitions, bytes: bytes as u8, value });
                        transitions += 1;
                        done += bytes;
                    }
                    state.set(A0, count);
                    transitions += 2;
                }
                SYSCALL_WRITE => {
                    state.set(A0, reg(A2));
                    transitions += 1;
                }
                SYSCALL_OPENAT => {
                    state.fd += 1;
                    state.set(A0, state.fd);
                    transitions += 1;
                }
                _ => {
                    let a0 = reg(A0);
                    if state.brk <= a0 && a0 < reg(SP) && a0 & 3 == 0 {
                        state.brk = a0;
                    } else {
                        state.set(A0, state.brk);
                    }
                    transitions += 1;
                }
            },
        }
        state.pc = next_pc;
        executed += 1;
        step += transitions;
    }
}
