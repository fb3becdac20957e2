//! Assembly text format.
//!
//! ```text
//! line      := [label ':'] [statement] [comment]
//! comment   := ('#' | '//' | ';') ...
//! statement := directive | instruction
//! directive := '.text' | '.data' | '.word' int | '.heap' int | '.stack' int
//! int       := ['-'] (decimal | '0x' hex) | '\'' char '\''
//! ```
//!
//! Instructions use the usual RISC-V operand order: `lui rd,imm`,
//! `addi rd,rs1,imm`, `lw rd,imm(rs1)`, `sw rs2,imm(rs1)`,
//! `add|sub|mul|divu|remu|sltu rd,rs1,rs2`, `beq rs1,rs2,target`,
//! `jal rd,target`, `jalr zero,0(ra)` and `ecall`. A target is a label, a
//! byte offset, or `N[label]` with `N` the offset in instructions, which must
//! agree with the label. Registers are named by ABI name or `xN`.
//!
//! `.heap` and `.stack` set the allowances in bytes beyond the initial
//! program break and below the initial stack pointer. An empty data segment
//! gets one zero word so that the default access address (start of data)
//! lies inside a segment.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{AluOp, Instruction, Layout, RiscUProgram, CODE_START, HIGHEST_ADDRESS, INITIAL_SP, PAGE_SIZE, RA, REGISTER_NAMES};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AsmError {
    #[error("line {line}: unknown mnemonic `{name}`")]
    UnknownMnemonic { line: usize, name: String },
    #[error("line {line}: unknown register `{name}`")]
    UnknownRegister { line: usize, name: String },
    #[error("line {line}: immediate {value} out of range for `{mnemonic}`")]
    ImmediateOverflow { line: usize, mnemonic: String, value: i64 },
    #[error("line {line}: undefined label `{name}`")]
    UndefinedLabel { line: usize, name: String },
    #[error("line {line}: duplicate label `{name}`")]
    DuplicateLabel { line: usize, name: String },
    #[error("line {line}: only `jalr zero,0(ra)` is supported")]
    UnsupportedJalr { line: usize },
    #[error("line {line}: jump target {target:#x} is outside the code segment")]
    TargetOutOfCode { line: usize, target: i64 },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("program contains no instructions")]
    EmptyProgram,
    #[error("segments do not fit into the 32-bit address space")]
    LayoutOverflow,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Text,
    Data,
}

enum Target {
    Label(String),
    Offset(i64),
    Counted(i64, String),
}

enum Pending {
    Done(Instruction),
    Beq { rs1: u8, rs2: u8, target: Target },
    Jal { rd: u8, target: Target },
}

struct Line<'a> {
    number: usize,
    text: &'a str,
}

fn strip_comment(text: &str) -> &str {
    let mut end = text.len();
    for marker in ["#", "//", ";"] {
        if let Some(i) = text.find(marker) {
            end = end.min(i);
        }
    }
    &text[..end]
}

fn parse_int(line: usize, s: &str) -> Result<i64, AsmError> {
    let s = s.trim();
    let err = || AsmError::Syntax { line, message: format!("malformed integer `{s}`") };
    if let Some(body) = s.strip_prefix('\'').and_then(|r| r.strip_suffix('\'')) {
        let mut chars = body.chars();
        return match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii() => Ok(c as i64),
            _ => Err(err()),
        };
    }
    let (negative, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let value = match digits.strip_prefix("0x").or_else(|| digits.strip_prefix("0X")) {
        Some(hex) => i64::from_str_radix(hex, 16),
        None => digits.parse::<i64>(),
    }
    .map_err(|_| err())?;
    Ok(if negative { -value } else { value })
}

fn parse_register(line: usize, s: &str) -> Result<u8, AsmError> {
    let s = s.trim();
    if let Some(i) = REGISTER_NAMES.iter().position(|&n| n == s) {
        return Ok(i as u8);
    }
    if s == "fp" {
        return Ok(8);
    }
    if let Some(n) = s.strip_prefix('x').and_then(|d| d.parse::<u8>().ok()) {
        if n < 32 {
            return Ok(n);
        }
    }
    Err(AsmError::UnknownRegister { line, name: s.to_string() })
}

/// Splits `imm(reg)`.
fn parse_memory(line: usize, s: &str) -> Result<(i64, u8), AsmError> {
    let s = s.trim();
    let open = s.find('(');
    match (open, s.strip_suffix(')')) {
        (Some(open), Some(inner)) => {
            let imm = if open == 0 { 0 } else { parse_int(line, &s[..open])? };
            Ok((imm, parse_register(line, &inner[open + 1..])?))
        }
        _ => Err(AsmError::Syntax { line, message: format!("expected `imm(reg)`, found `{s}`") }),
    }
}

fn parse_target(line: usize, s: &str) -> Result<Target, AsmError> {
    let s = s.trim();
    if let Some(open) = s.find('[') {
        let label = s[open + 1..]
            .strip_suffix(']')
            .ok_or_else(|| AsmError::Syntax { line, message: format!("malformed target `{s}`") })?;
        return Ok(Target::Counted(parse_int(line, &s[..open])?, label.trim().to_string()));
    }
    if s.starts_with(|c: char| c == '-' || c.is_ascii_digit()) {
        return Ok(Target::Offset(parse_int(line, s)?));
    }
    Ok(Target::Label(s.to_string()))
}

fn check_range(line: usize, mnemonic: &str, value: i64, lo: i64, hi: i64) -> Result<i64, AsmError> {
    if value < lo || value > hi {
        return Err(AsmError::ImmediateOverflow { line, mnemonic: mnemonic.to_string(), value });
    }
    Ok(value)
}

fn is_label(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '.')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

fn parse_instruction(line: usize, mnemonic: &str, args: &[&str]) -> Result<Pending, AsmError> {
    let expect = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(AsmError::Syntax { line, message: format!("`{mnemonic}` takes {n} operands, found {}", args.len()) })
        }
    };
    let reg = |i: usize| parse_register(line, args[i]);
    let imm12 = |v: i64| check_range(line, mnemonic, v, -2048, 2047).map(|v| v as i32);
    let ins = match mnemonic {
        "lui" => {
            expect(2)?;
            let v = check_range(line, mnemonic, parse_int(line, args[1])?, -(1 << 19), (1 << 20) - 1)?;
            Instruction::Lui { rd: reg(0)?, imm: (v as u32) & 0xF_FFFF }
        }
        "addi" => {
            expect(3)?;
            Instruction::Addi { rd: reg(0)?, rs1: reg(1)?, imm: imm12(parse_int(line, args[2])?)? }
        }
        "lw" => {
            expect(2)?;
            let (imm, rs1) = parse_memory(line, args[1])?;
            Instruction::Lw { rd: reg(0)?, rs1, imm: imm12(imm)? }
        }
        "sw" => {
            expect(2)?;
            let (imm, rs1) = parse_memory(line, args[1])?;
            Instruction::Sw { rs1, rs2: reg(0)?, imm: imm12(imm)? }
        }
        "beq" => {
            expect(3)?;
            return Ok(Pending::Beq { rs1: reg(0)?, rs2: reg(1)?, target: parse_target(line, args[2])? });
        }
        "jal" => {
            expect(2)?;
            return Ok(Pending::Jal { rd: reg(0)?, target: parse_target(line, args[1])? });
        }
        "jalr" => {
            expect(2)?;
            let (imm, rs1) = parse_memory(line, args[1])?;
            let rd = reg(0)?;
            if rd != 0 || imm != 0 || rs1 != RA {
                return Err(AsmError::UnsupportedJalr { line });
            }
            Instruction::Jalr { rd, rs1, imm: 0 }
        }
        "ecall" => {
            expect(0)?;
            Instruction::Ecall
        }
        _ => match AluOp::ALL.into_iter().find(|op| op.mnemonic() == mnemonic) {
            Some(op) => {
                expect(3)?;
                Instruction::Alu { op, rd: reg(0)?, rs1: reg(1)?, rs2: reg(2)? }
            }
            None => return Err(AsmError::UnknownMnemonic { line, name: mnemonic.to_string() }),
        },
    };
    Ok(Pending::Done(ins))
}

fn page_align(addr: u64) -> u64 {
    addr.div_ceil(PAGE_SIZE as u64) * PAGE_SIZE as u64
}

fn allowance(line: usize, directive: &str, value: i64) -> Result<u32, AsmError> {
    if value < 0 || value % 4 != 0 || value > u32::MAX as i64 {
        return Err(AsmError::Syntax { line, message: format!("`{directive}` needs a non-negative multiple of 4") });
    }
    Ok(value as u32)
}

/// Assembles a program. The entry point is the first instruction.
pub fn assemble(text: &str) -> Result<RiscUProgram, AsmError> {
    let mut section = Section::Text;
    let mut code: Vec<(usize, Pending)> = Vec::new();
    let mut data: Vec<u32> = Vec::new();
    // Labels: (section, index within section).
    let mut labels: BTreeMap<String, (Section, usize)> = BTreeMap::new();
    let mut heap = 0u32;
    let mut stack = 0u32;

    for (i, raw) in text.lines().enumerate() {
        let line = Line { number: i + 1, text: strip_comment(raw).trim() };
        let mut rest = line.text;
        while let Some(colon) = rest.find(':') {
            let name = rest[..colon].trim();
            if !is_label(name) {
                break;
            }
            let index = if section == Section::Text { code.len() } else { data.len() };
            if labels.insert(name.to_string(), (section, index)).is_some() {
                return Err(AsmError::DuplicateLabel { line: line.number, name: name.to_string() });
            }
            rest = rest[colon + 1..].trim();
        }
        if rest.is_empty() {
            continue;
        }
        let (head, tail) = match rest.find(char::is_whitespace) {
            Some(sp) => (&rest[..sp], rest[sp..].trim()),
            None => (rest, ""),
        };
        let args: Vec<&str> = if tail.is_empty() { Vec::new() } else { tail.split(',').map(str::trim).collect() };
        let n = line.number;
        match head {
            ".text" => section = Section::Text,
            ".data" => section = Section::Data,
            ".word" => {
                if section != Section::Data {
                    return Err(AsmError::Syntax { line: n, message: "`.word` outside `.data`".into() });
                }
                for a in args {
                    let v = parse_int(n, a)?;
                    check_range(n, ".word", v, i32::MIN as i64, u32::MAX as i64)?;
                    data.push(v as u32);
                }
            }
            ".heap" => heap = allowance(n, head, parse_int(n, tail)?)?,
            ".stack" => stack = allowance(n, head, parse_int(n, tail)?)?,
            _ if head.starts_with('.') => {
                return Err(AsmError::Syntax { line: n, message: format!("unknown directive `{head}`") })
            }
            _ => {
                if section != Section::Text {
                    return Err(AsmError::Syntax { line: n, message: "instruction inside `.data`".into() });
                }
                code.push((n, parse_instruction(n, head, &args)?));
            }
        }
    }
    if code.is_empty() {
        return Err(AsmError::EmptyProgram);
    }
    if data.is_empty() {
        data.push(0);
    }

    let code_end = CODE_START as u64 + 4 * code.len() as u64;
    let data_start = page_align(code_end);
    let data_end = data_start + 4 * data.len() as u64;
    let heap_start = page_align(data_end);
    let allowed_heap_end = heap_start + heap as u64;
    let allowed_stack_start = INITIAL_SP as i64 - stack as i64;
    if allowed_stack_start < allowed_heap_end as i64 {
        return Err(AsmError::LayoutOverflow);
    }
    let layout = Layout {
        code_start: CODE_START,
        code_end: code_end as u32,
        data_start: data_start as u32,
        data_end: data_end as u32,
        heap_start: heap_start as u32,
        allowed_heap_end: allowed_heap_end as u32,
        allowed_stack_start: allowed_stack_start as u32,
        initial_sp: INITIAL_SP,
        highest_address: HIGHEST_ADDRESS,
    };

    let address = |(section, index): (Section, usize)| match section {
        Section::Text => CODE_START + 4 * index as u32,
        Section::Data => layout.data_start + 4 * index as u32,
    };
    let resolve = |line: usize, index: usize, target: &Target, mnemonic: &str, bits: u32| -> Result<i32, AsmError> {
        let pc = CODE_START as i64 + 4 * index as i64;
        let label_offset = |name: &str| match labels.get(name) {
            Some(&(Section::Text, i)) => Ok(4 * (i as i64 - index as i64)),
            _ => Err(AsmError::UndefinedLabel { line, name: name.to_string() }),
        };
        let offset = match target {
            Target::Label(name) => label_offset(name)?,
            Target::Offset(v) => *v,
            Target::Counted(count, name) => {
                let offset = label_offset(name)?;
                if offset != 4 * count {
                    return Err(AsmError::Syntax {
                        line,
                        message: format!("`{count}[{name}]` disagrees with the label ({} instructions)", offset / 4),
                    });
                }
                offset
            }
        };
        let half = 1i64 << (bits - 1);
        check_range(line, mnemonic, offset, -half, half - 2)?;
        if offset % 4 != 0 {
            return Err(AsmError::Syntax { line, message: format!("offset {offset} is not a multiple of 4") });
        }
        let target = pc + offset;
        if target < CODE_START as i64 || target >= code_end as i64 {
            return Err(AsmError::TargetOutOfCode { line, target });
        }
        Ok(offset as i32)
    };

    let mut instructions = Vec::with_capacity(code.len());
    for (index, (line, pending)) in code.iter().enumerate() {
        instructions.push(match pending {
            Pending::Done(ins) => *ins,
            Pending::Beq { rs1, rs2, target } => {
                Instruction::Beq { rs1: *rs1, rs2: *rs2, imm: resolve(*line, index, target, "beq", 13)? }
            }
            Pending::Jal { rd, target } => Instruction::Jal { rd: *rd, imm: resolve(*line, index, target, "jal", 21)? },
        });
    }

    Ok(RiscUProgram {
        code: instructions,
        data,
        layout,
        entry: CODE_START,
        labels: labels.into_iter().map(|(k, v)| (k, address(v))).collect(),
    })
}
