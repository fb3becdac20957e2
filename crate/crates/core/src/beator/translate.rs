//! The 32-bit MMURAM translation. Memory is a fixed set of 32-bit word
//! states, one per physical word, so the output contains no arrays.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{
    AluOp, Instruction, RiscUProgram, A0, A1, A2, A7, RA, REGISTER_NAMES, SP, SYSCALL_BRK, SYSCALL_EXIT, SYSCALL_OPENAT,
    SYSCALL_READ, SYSCALL_WRITE,
};
use crate::btor2::{Nid, SimState, Witness};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BeatorError {
    #[error("jal at {site:#x} calls {callee:#x}, which has no `jalr zero,0(ra)` return")]
    UnsupportedCall { site: u32, callee: u32 },
}

/// Generated model text plus the nids a caller needs to interpret traces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeatorModel {
    pub text: String,
    /// Instruction address to pc flag, reachable instructions only.
    pub pc_flags: BTreeMap<u32, Nid>,
    /// Register states; index 0 is the constant zero node.
    pub registers: [Nid; 32],
    /// Virtual word address to RAM word state.
    pub memory: BTreeMap<u32, Nid>,
    pub kernel_mode: Nid,
    /// Bad label (`b0`..`b11`) to `bad` nid.
    pub bads: BTreeMap<&'static str, Nid>,
}

impl BeatorModel {
    /// Bytes consumed by `read` along a simulator trace driven by `witness`.
    pub fn read_bytes(&self, trace: &[SimState], witness: &Witness) -> Vec<u8> {
        let mut bytes = Vec::new();
        for state in trace {
            let get = |nid: Nid| state.get(nid).and_then(|v| v.as_bv()).map_or(0, |v| v.bits());
            let (a0, a2) = (get(self.registers[A0 as usize]), get(self.registers[A2 as usize]));
            if get(self.kernel_mode) == 1 && get(self.registers[A7 as usize]) == SYSCALL_READ as u64 && a0 < a2 {
                let count = (a2 - a0).min(4) as usize;
                let value = witness
                    .steps
                    .get(state.step)
                    .and_then(|s| s.get(&INPUT_NIDS[count - 1]))
                    .map_or(0, |v| v.bits());
                bytes.extend_from_slice(&value.to_le_bytes()[..count]);
            }
        }
        bytes
    }
}

pub(crate) const KERNEL_MODE: Nid = 60;
const NOT_KERNEL_MODE: Nid = 62;
const ZERO1: Nid = 10;
const ONE1: Nid = 11;
const ZERO: Nid = 20;
const ONE: Nid = 21;
const TWO: Nid = 22;
const THREE: Nid = 23;
const FOUR: Nid = 24;
const DATA_START: Nid = 30;
const DATA_END: Nid = 31;
const HEAP_START: Nid = 32;
const INITIAL_BREAK: Nid = 33;
const ALLOWED_HEAP_END: Nid = 34;
const ALLOWED_STACK_START: Nid = 35;
const HIGHEST: Nid = 50;
/// Input nids by number of bytes read in one step (1, 2, 3, 4).
pub(crate) const INPUT_NIDS: [Nid; 4] = [81, 82, 83, 94];
const UEXT_INPUTS: [Nid; 4] = [91, 92, 93, 94];

fn register(r: u8) -> Nid {
    200 + r as Nid
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum From {
    Plain,
    Beq,
    Jalr,
    Ecall,
}

struct Edge {
    kind: From,
    from_pc: u32,
    condition: Nid,
    /// Calling `jal` for return edges.
    site: u32,
}

/// Procedure returns: callee entry address to the `jalr` ending its body.
/// Procedures are laid out back to back, starting after the exit `ecall`.
pub(crate) fn call_returns(program: &RiscUProgram) -> BTreeMap<u32, u32> {
    let mut returns = BTreeMap::new();
    let mut callee = program.layout.code_start;
    let mut a7 = 0;
    for (i, ins) in program.code.iter().enumerate() {
        let pc = program.layout.code_start + 4 * i as u32;
        match *ins {
            Instruction::Addi { rd, rs1: 0, imm } if rd == A7 && imm != 0 => a7 = imm as u32,
            Instruction::Jalr { rd: 0, rs1, imm: 0 } if rs1 == RA => {
                returns.insert(callee, pc);
                callee = pc + 4;
            }
            Instruction::Ecall => {
                if a7 == SYSCALL_EXIT {
                    callee = pc + 4;
                }
                a7 = 0;
            }
            _ => {}
        }
    }
    returns
}

struct Emitter {
    out: String,
    next: Nid,
}

impl Emitter {
    fn fixed(&mut self, nid: Nid, body: &str) {
        writeln!(self.out, "{nid} {body}").unwrap();
        self.next = self.next.max(nid + 1);
    }

    fn comment(&mut self, text: &str) {
        writeln!(self.out, "; {text}").unwrap();
    }

    /// Starts a new block of nids at the next multiple of 1000.
    fn section(&mut self, text: &str) {
        self.out.push('\n');
        self.comment(text);
        self.next = self.next.div_ceil(1000) * 1000;
    }

    fn emit(&mut self, body: String) -> Nid {
        let nid = self.next;
        writeln!(self.out, "{nid} {body}").unwrap();
        self.next += 1;
        nid
    }
}

/// Translates a program to BTOR2 text. Only instructions reachable from the
/// entry point get pc flags and data flow.
pub fn translate_beator(program: &RiscUProgram) -> Result<BeatorModel, BeatorError> {
    let layout = &program.layout;
    let reachable = program.reachable();
    let pcs: Vec<(u32, Instruction)> = program
        .code
        .iter()
        .enumerate()
        .filter(|&(i, _)| reachable[i])
        .map(|(i, &ins)| (layout.code_start + 4 * i as u32, ins))
        .collect();
    let words = layout.physical_words();
    let address_bits = (usize::BITS - (words.len().max(2) - 1).leading_zeros()).max(1);

    let mut e = Emitter { out: String::new(), next: 1 };
    e.fixed(1, "sort bitvec 1 ; Boolean");
    e.fixed(2, "sort bitvec 32 ; 32-bit machine word");
    e.fixed(6, &format!("sort bitvec {address_bits} ; physical address space"));
    e.out.push('\n');
    e.fixed(ZERO1, "zero 1");
    e.fixed(ONE1, "one 1");
    e.out.push('\n');
    e.fixed(ZERO, "zero 2");
    e.fixed(ONE, "one 2");
    e.fixed(TWO, "constd 2 2");
    e.fixed(THREE, "constd 2 3");
    e.fixed(FOUR, "constd 2 4");
    e.out.push('\n');
    e.fixed(DATA_START, &format!("constd 2 {} ; start of data segment", layout.data_start));
    e.fixed(DATA_END, &format!("constd 2 {} ; end of data segment", layout.data_end));
    e.fixed(HEAP_START, &format!("constd 2 {} ; start of heap segment", layout.heap_start));
    e.fixed(INITIAL_BREAK, &format!("constd 2 {} ; initial program break", layout.heap_start));
    e.fixed(ALLOWED_HEAP_END, &format!("constd 2 {} ; allowed end of heap segment", layout.allowed_heap_end));
    e.fixed(ALLOWED_STACK_START, &format!("constd 2 {} ; allowed start of stack segment", layout.allowed_stack_start));
    e.fixed(HIGHEST, &format!("constd 2 {} ; highest address", layout.highest_address));
    e.out.push('\n');
    e.fixed(KERNEL_MODE, "state 1 kernel-mode");
    e.fixed(61, "init 1 60 10 kernel-mode");
    e.fixed(NOT_KERNEL_MODE, "not 1 60");
    e.out.push('\n');
    e.fixed(71, "sort bitvec 8");
    e.fixed(72, "sort bitvec 16");
    e.fixed(73, "sort bitvec 24");
    e.fixed(81, "input 71 1-byte-input");
    e.fixed(82, "input 72 2-byte-input");
    e.fixed(83, "input 73 3-byte-input");
    e.fixed(91, "uext 2 81 24 uext-1-byte-input");
    e.fixed(92, "uext 2 82 16 uext-2-byte-input");
    e.fixed(93, "uext 2 83 8 uext-3-byte-input");
    e.fixed(94, "input 2 4-byte-input");

    // Registers. Every register gets an init, zero-valued ones from nid 20.
    e.out.push('\n');
    e.comment("registers");
    let initial = program.initial_registers();
    for r in 1..32 {
        if initial[r] != 0 {
            e.fixed(100 + r as Nid, &format!("constd 2 {}", initial[r]));
        }
    }
    e.fixed(register(0), "zero 2 zero");
    let mut registers = [register(0); 32];
    for r in 1..32u8 {
        registers[r as usize] = register(r);
        e.fixed(register(r), &format!("state 2 {}", REGISTER_NAMES[r as usize]));
    }
    for r in 1..32usize {
        let value = if initial[r] != 0 { 100 + r as Nid } else { ZERO };
        e.fixed(300 + r as Nid, &format!("init 2 {} {value} {}", register(r as u8), REGISTER_NAMES[r]));
    }
    let mut register_flow: [Nid; 32] = registers;

    e.section("pc flags");
    let mut pc_flags = BTreeMap::new();
    for &(pc, _) in &pcs {
        let flag = e.emit(format!("state 1 pc-{pc:#x}"));
        let value = if pc == program.entry { ONE1 } else { ZERO1 };
        e.emit(format!("init 1 {flag} {value}"));
        pc_flags.insert(pc, flag);
    }

    e.section("physical memory");
    let initial_memory = program.initial_memory();
    let mut vaddr = Vec::with_capacity(words.len());
    let mut ram = Vec::with_capacity(words.len());
    for (p, &v) in words.iter().enumerate() {
        vaddr.push(e.emit(format!("constd 2 {v}")));
        let init = e.emit(format!("constd 2 {}", initial_memory[&v]));
        let word = e.emit(format!("state 2 RAM-word-{p}"));
        e.emit(format!("init 2 {word} {init}"));
        ram.push(word);
    }
    let mut ram_write_flow = ram.clone();

    e.section("data flow");
    let mut division_flow = ONE;
    let mut remainder_flow = ONE;
    let mut access_flow = DATA_START;
    let mut ecall_flow = ZERO1;
    let mut beq_conditions: BTreeMap<u32, (Nid, Nid)> = BTreeMap::new();
    let mut links: BTreeMap<u32, Nid> = BTreeMap::new();
    for &(pc, ins) in &pcs {
        let flag = pc_flags[&pc];
        match ins {
            Instruction::Lui { rd, imm } if rd != 0 => {
                let value = e.emit(format!("constd 2 {}", imm << 12));
                register_flow[rd as usize] = e.emit(format!("ite 2 {flag} {value} {}", register_flow[rd as usize]));
            }
            Instruction::Addi { rd, rs1, imm } if rd != 0 => {
                let value = e.emit(format!("constd 2 {}", imm as u32));
                let sum = e.emit(format!("add 2 {} {value}", register(rs1)));
                register_flow[rd as usize] = e.emit(format!("ite 2 {flag} {sum} {}", register_flow[rd as usize]));
            }
            Instruction::Alu { op, rd, rs1, rs2 } if rd != 0 => {
                match op {
                    AluOp::Divu => division_flow = e.emit(format!("ite 2 {flag} {} {division_flow}", register(rs2))),
                    AluOp::Remu => remainder_flow = e.emit(format!("ite 2 {flag} {} {remainder_flow}", register(rs2))),
                    _ => {}
                }
                let (a, b) = (register(rs1), register(rs2));
                let result = match op {
                    AluOp::Sltu => {
                        let less = e.emit(format!("ult 1 {a} {b}"));
                        e.emit(format!("uext 2 {less} 31"))
                    }
                    AluOp::Add => e.emit(format!("add 2 {a} {b}")),
                    AluOp::Sub => e.emit(format!("sub 2 {a} {b}")),
                    AluOp::Mul => e.emit(format!("mul 2 {a} {b}")),
                    AluOp::Divu => e.emit(format!("udiv 2 {a} {b}")),
                    AluOp::Remu => e.emit(format!("urem 2 {a} {b}")),
                };
                register_flow[rd as usize] = e.emit(format!("ite 2 {flag} {result} {}", register_flow[rd as usize]));
            }
            Instruction::Lw { rd, rs1, imm } if rd != 0 => {
                let offset = e.emit(format!("constd 2 {}", imm as u32));
                let address = e.emit(format!("add 2 {} {offset}", register(rs1)));
                access_flow = e.emit(format!("ite 2 {flag} {address} {access_flow}"));
                let mut read_flow = ZERO;
                for p in 0..words.len() {
                    let at = e.emit(format!("eq 1 {address} {}", vaddr[p]));
                    read_flow = e.emit(format!("ite 2 {at} {} {read_flow}", ram[p]));
                }
                register_flow[rd as usize] = e.emit(format!("ite 2 {flag} {read_flow} {}", register_flow[rd as usize]));
            }
            Instruction::Sw { rs1, rs2, imm } => {
                let offset = e.emit(format!("constd 2 {}", imm as u32));
                let address = e.emit(format!("add 2 {} {offset}", register(rs1)));
                access_flow = e.emit(format!("ite 2 {flag} {address} {access_flow}"));
                for p in 0..words.len() {
                    let at = e.emit(format!("eq 1 {address} {}", vaddr[p]));
                    let to = e.emit(format!("ite 2 {at} {} {}", register(rs2), ram_write_flow[p]));
                    ram_write_flow[p] = e.emit(format!("ite 2 {flag} {to} {}", ram_write_flow[p]));
                }
            }
            Instruction::Beq { rs1, rs2, .. } => {
                let equal = e.emit(format!("eq 1 {} {}", register(rs1), register(rs2)));
                let unequal = e.emit(format!("not 1 {equal}"));
                beq_conditions.insert(pc, (equal, unequal));
            }
            Instruction::Jal { rd, .. } if rd != 0 => {
                let link = e.emit(format!("constd 2 {}", pc + 4));
                register_flow[rd as usize] = e.emit(format!("ite 2 {flag} {link} {}", register_flow[rd as usize]));
                links.insert(pc, link);
            }
            Instruction::Ecall => ecall_flow = e.emit(format!("ite 1 {flag} 11 {ecall_flow}")),
            _ => {}
        }
    }

    // Incoming control-flow edges per target, in emission order.
    let mut control_in: BTreeMap<u32, Vec<Edge>> = BTreeMap::new();
    for &(pc, ins) in &pcs {
        let mut add = |target: u32, kind: From, from_pc: u32, condition: Nid| {
            control_in.entry(target).or_default().push(Edge { kind, from_pc, condition, site: pc })
        };
        match ins {
            Instruction::Beq { imm, .. } => {
                let (equal, unequal) = beq_conditions[&pc];
                add(pc.wrapping_add(imm as u32), From::Beq, pc, equal);
                add(pc + 4, From::Beq, pc, unequal);
            }
            Instruction::Jal { rd, imm } => {
                let callee = pc.wrapping_add(imm as u32);
                add(callee, From::Plain, pc, 0);
                if rd != 0 {
                    add(pc + 4, From::Jalr, callee, links[&pc]);
                }
            }
            Instruction::Jalr { .. } => {}
            Instruction::Ecall => add(pc + 4, From::Ecall, pc, 0),
            _ => add(pc + 4, From::Plain, pc, 0),
        }
    }
    let returns = call_returns(program);

    e.section("syscalls");
    let a7 = register(A7);
    let (a0, a1, a2) = (register(A0), register(A1), register(A2));
    let id_exit = e.emit(format!("constd 2 {SYSCALL_EXIT}"));
    let id_read = e.emit(format!("constd 2 {SYSCALL_READ}"));
    let id_write = e.emit(format!("constd 2 {SYSCALL_WRITE}"));
    let id_openat = e.emit(format!("constd 2 {SYSCALL_OPENAT}"));
    let id_brk = e.emit(format!("constd 2 {SYSCALL_BRK}"));
    let exit_syscall = e.emit(format!("eq 1 {a7} {id_exit}"));
    let read_syscall = e.emit(format!("eq 1 {a7} {id_read}"));
    let write_syscall = e.emit(format!("eq 1 {a7} {id_write}"));
    let openat_syscall = e.emit(format!("eq 1 {a7} {id_openat}"));
    let brk_syscall = e.emit(format!("eq 1 {a7} {id_brk}"));
    let exit_active = e.emit(format!("and 1 {ecall_flow} {exit_syscall}"));
    let mut kernel_flow = e.emit(format!("ite 1 60 {exit_syscall} {exit_active}"));

    let a0_index = A0 as usize;
    let read_active = e.emit(format!("and 1 {ecall_flow} {read_syscall}"));
    access_flow = e.emit(format!("ite 2 {read_active} {a1} {access_flow}"));
    kernel_flow = e.emit(format!("ite 1 {read_active} 11 {kernel_flow}"));
    register_flow[a0_index] = e.emit(format!("ite 2 {read_active} 20 {}", register_flow[a0_index]));
    let remaining = e.emit(format!("sub 2 {a2} {a0}"));
    let full_word = e.emit(format!("ugte 1 {remaining} 24"));
    let increment = e.emit(format!("ite 2 {full_word} 24 {remaining}"));
    let is2 = e.emit(format!("eq 1 {increment} 22"));
    let input2 = e.emit(format!("ite 2 {is2} {} {}", UEXT_INPUTS[1], UEXT_INPUTS[0]));
    let is3 = e.emit(format!("eq 1 {increment} 23"));
    let input3 = e.emit(format!("ite 2 {is3} {} {input2}", UEXT_INPUTS[2]));
    let is4 = e.emit(format!("eq 1 {increment} 24"));
    let input4 = e.emit(format!("ite 2 {is4} {} {input3}", UEXT_INPUTS[3]));
    let cursor = e.emit(format!("add 2 {a1} {a0}"));
    let more = e.emit(format!("ult 1 {a0} {a2}"));
    let goon = e.emit(format!("and 1 {read_syscall} {more}"));
    let active_kernel = e.emit(format!("and 1 60 {goon}"));
    let positive = e.emit(format!("ugt 1 {increment} 20"));
    let kernel_inc = e.emit(format!("and 1 {active_kernel} {positive}"));
    for p in 0..words.len() {
        let at = e.emit(format!("eq 1 {cursor} {}", vaddr[p]));
        let input = e.emit(format!("ite 2 {at} {input4} {}", ram_write_flow[p]));
        ram_write_flow[p] = e.emit(format!("ite 2 {kernel_inc} {input} {}", ram_write_flow[p]));
    }
    let moved = e.emit(format!("add 2 {a0} {increment}"));
    register_flow[a0_index] = e.emit(format!("ite 2 {active_kernel} {moved} {}", register_flow[a0_index]));
    kernel_flow = e.emit(format!("ite 1 {active_kernel} 11 {kernel_flow}"));

    let write_active = e.emit(format!("and 1 {ecall_flow} {write_syscall}"));
    access_flow = e.emit(format!("ite 2 {write_active} {a1} {access_flow}"));
    register_flow[a0_index] = e.emit(format!("ite 2 {write_active} {a2} {}", register_flow[a0_index]));

    let openat_active = e.emit(format!("and 1 {ecall_flow} {openat_syscall}"));
    access_flow = e.emit(format!("ite 2 {openat_active} {a1} {access_flow}"));
    let fd_bump = e.emit("state 2 fd-bump-pointer".to_string());
    e.emit(format!("init 2 {fd_bump} 21"));
    let fd_inc = e.emit(format!("inc 2 {fd_bump}"));
    let new_fd = e.emit(format!("ite 2 {openat_active} {fd_inc} {fd_bump}"));
    e.emit(format!("next 2 {fd_bump} {new_fd}"));
    register_flow[a0_index] = e.emit(format!("ite 2 {openat_active} {fd_inc} {}", register_flow[a0_index]));

    let brk_active = e.emit(format!("and 1 {ecall_flow} {brk_syscall}"));
    let brk_bump = e.emit("state 2 brk-bump-pointer".to_string());
    e.emit(format!("init 2 {brk_bump} 33"));
    let shrink = e.emit(format!("ulte 1 {brk_bump} {a0}"));
    let free = e.emit(format!("ult 1 {a0} {}", register(SP)));
    let segment = e.emit(format!("and 1 {shrink} {free}"));
    let low_bits = e.emit(format!("and 2 {a0} 23"));
    let aligned = e.emit(format!("eq 1 {low_bits} 20"));
    let valid = e.emit(format!("and 1 {segment} {aligned}"));
    let ok = e.emit(format!("and 1 {brk_active} {valid}"));
    let new_brk = e.emit(format!("ite 2 {ok} {a0} {brk_bump}"));
    e.emit(format!("next 2 {brk_bump} {new_brk}"));
    let invalid = e.emit(format!("not 1 {valid}"));
    let fail = e.emit(format!("and 1 {brk_active} {invalid}"));
    register_flow[a0_index] = e.emit(format!("ite 2 {fail} {brk_bump} {}", register_flow[a0_index]));
    e.emit(format!("next 1 60 {kernel_flow}"));

    e.section("control flow");
    for &(pc, _) in &pcs {
        let mut control_flow = ZERO1;
        for edge in control_in.get(&pc).into_iter().flatten().rev() {
            let from_active = match edge.kind {
                From::Beq => e.emit(format!("and 1 {} {}", pc_flags[&edge.from_pc], edge.condition)),
                From::Jalr => {
                    let jalr = *returns
                        .get(&edge.from_pc)
                        .filter(|j| pc_flags.contains_key(j))
                        .ok_or(BeatorError::UnsupportedCall { site: edge.site, callee: edge.from_pc })?;
                    let mask = e.emit("not 2 21".to_string());
                    let target = e.emit(format!("and 2 {} {mask}", register(RA)));
                    let equal = e.emit(format!("eq 1 {target} {}", edge.condition));
                    e.emit(format!("and 1 {} {equal}", pc_flags[&jalr]))
                }
                From::Ecall => {
                    let kernel = e.emit(format!("state 1 kernel-mode-pc-flag-{:#x}", edge.from_pc));
                    e.emit(format!("init 1 {kernel} 10"));
                    let active = e.emit(format!("ite 1 {kernel} 60 {}", pc_flags[&edge.from_pc]));
                    e.emit(format!("next 1 {kernel} {active}"));
                    e.emit(format!("and 1 {kernel} 62"))
                }
                From::Plain => pc_flags[&edge.from_pc],
            };
            control_flow = if control_flow == ZERO1 {
                from_active
            } else {
                e.emit(format!("ite 1 {from_active} 11 {control_flow}"))
            };
        }
        e.emit(format!("next 1 {} {control_flow}", pc_flags[&pc]));
    }

    e.section("updating registers and memory");
    for r in 1..32usize {
        e.emit(format!("next 2 {} {} {}", register(r as u8), register_flow[r], REGISTER_NAMES[r]));
    }
    for p in 0..words.len() {
        e.emit(format!("next 2 {} {} RAM-word-{p}", ram[p], ram_write_flow[p]));
    }

    e.section("bad states");
    let mut bads = BTreeMap::new();
    let not_ids: Vec<Nid> = [exit_syscall, read_syscall, write_syscall, openat_syscall, brk_syscall]
        .iter()
        .map(|id| e.emit(format!("not 1 {id}")))
        .collect();
    let mut none = not_ids[0];
    for &n in &not_ids[1..] {
        none = e.emit(format!("and 1 {none} {n}"));
    }
    let invalid_id = e.emit(format!("and 1 {ecall_flow} {none}"));
    bads.insert("b0", e.emit(format!("bad {invalid_id} b0")));
    let nonzero = e.emit(format!("neq 1 {a0} 20"));
    let exit_code = e.emit(format!("and 1 {exit_active} {nonzero}"));
    bads.insert("b1", e.emit(format!("bad {exit_code} b1")));
    let division = e.emit(format!("eq 1 {division_flow} 20"));
    bads.insert("b2", e.emit(format!("bad {division} b2")));
    let remainder = e.emit(format!("eq 1 {remainder_flow} 20"));
    bads.insert("b3", e.emit(format!("bad {remainder} b3")));
    let low = e.emit(format!("and 2 {access_flow} 23"));
    let unaligned = e.emit(format!("neq 1 {low} 20"));
    bads.insert("b4", e.emit(format!("bad {unaligned} b4")));

    let sp = register(SP);
    let below_data = e.emit(format!("ult 1 {access_flow} 30"));
    bads.insert("b6", e.emit(format!("bad {below_data} b6")));
    let mut between = |e: &mut Emitter, lower: Nid, upper: Nid, label: &'static str| {
        let above = e.emit(format!("ugte 1 {access_flow} {lower}"));
        let below = e.emit(format!("ult 1 {access_flow} {upper}"));
        let both = e.emit(format!("and 1 {above} {below}"));
        bads.insert(label, e.emit(format!("bad {both} {label}")));
    };
    between(&mut e, DATA_END, HEAP_START, "b7");
    between(&mut e, brk_bump, sp, "b8");
    between(&mut e, ALLOWED_HEAP_END, brk_bump, "b9");
    between(&mut e, sp, ALLOWED_STACK_START, "b10");
    let above = e.emit(format!("ugt 1 {access_flow} 50"));
    bads.insert("b11", e.emit(format!("bad {above} b11")));

    Ok(BeatorModel {
        text: e.out,
        pc_flags,
        registers,
        memory: words.iter().copied().zip(ram).collect(),
        kernel_mode: KERNEL_MODE,
        bads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beator::assemble;
    use crate::btor2::parse_btor2;

    #[test]
    fn exit_program_parses() {
        let p = assemble("addi a0,zero,0\naddi a7,zero,93\necall").unwrap();
        let m = translate_beator(&p).unwrap();
        let model = parse_btor2(&m.text).unwrap();
        assert_eq!(model.bads().len(), 11);
        assert!(m.text.contains("60 state 1 kernel-mode\n61 init 1 60 10 kernel-mode"));
        assert_eq!(m.pc_flags.len(), 3);
    }

    #[test]
    fn call_without_return_is_rejected() {
        let p = assemble("jal ra,f\naddi a7,zero,93\necall\nf: addi t0,zero,1").unwrap();
        assert!(matches!(translate_beator(&p), Err(BeatorError::UnsupportedCall { site: 0x10000, callee: 0x1000c })));
    }
}
