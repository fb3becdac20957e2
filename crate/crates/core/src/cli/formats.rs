//! Text formats for QUBO models and witnesses.
//!
//! A QUBO file lists, in this order:
//!
//! ```text
//! qubo vars <n> offset <c> bound <k>
//! or <bit>                         output of the bad-state OR, pinned to 1
//! input <nid> <width>              input sorts
//! state <nid> <width>              uninitialized bit-vector state
//! state <nid> <index> <element>    uninitialized array state
//! in <step> <nid> <bit> <var>      variable of an input bit
//! init <nid> <bit> <var>           variable of an initial state bit
//! init <nid> <address> <bit> <var> variable of an initial array element bit
//! bad <step> <nid> <bit>           value of a bad condition
//! free <var>
//! lin <var> <coefficient>
//! quad <u> <v> <coefficient>       u < v
//! gate <kind> <x> <y|-> <out> <ancilla|->
//! divrem <dividend> <divisor> <quotient> <remainder>
//! ```
//!
//! A `<bit>` is `0`, `1` or `v<var>`; the `divrem` operands are
//! comma-separated bit lists. Lines starting with `#` are ignored.
//!
//! A witness file:
//!
//! ```text
//! witness bound <k>
//! energy <e>                       optional
//! bad <step> <nid>... | bad none   expected first bad
//! init <nid> <value>
//! init <nid> <address>=<value>...  array state, other elements 0
//! step <k> <nid>=<value>...        inputs not listed are 0
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bqm::{BinaryQuadraticModel, Bit, DivRemRecord, GateKind, GateRecord, TraceEntry, VarId};
use crate::btor2::{ArrayValue, BitVecValue, Nid, Sort, TransitionModel, Value, Witness};
use crate::unroll::{FrameValue, UnrolledModel};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("value {value} of nid {nid} does not fit its sort")]
    ValueTooWide { nid: Nid, value: u64 },
    #[error("nid {0} is not an input or uninitialized state of the model")]
    UnknownNid(Nid),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

fn write_bit(bit: Bit) -> String {
    match bit {
        Bit::Const(b) => (b as u8).to_string(),
        Bit::Var(v) => format!("v{}", v.0),
    }
}

fn parse_bit(line: usize, s: &str) -> Result<Bit, FormatError> {
    match s {
        "0" => Ok(Bit::ZERO),
        "1" => Ok(Bit::ONE),
        _ => s
            .strip_prefix('v')
            .and_then(|n| n.parse().ok())
            .map(|n| Bit::Var(VarId(n)))
            .ok_or_else(|| syntax(line, format!("malformed bit `{s}`"))),
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, FormatError> {
    s.parse().map_err(|_| syntax(line, format!("malformed number `{s}`")))
}

fn parse_var(line: usize, s: &str) -> Result<VarId, FormatError> {
    parse_num(line, s).map(VarId)
}

fn parse_opt_var(line: usize, s: &str) -> Result<Option<VarId>, FormatError> {
    if s == "-" {
        Ok(None)
    } else {
        parse_var(line, s).map(Some)
    }
}

fn opt_var(v: Option<VarId>) -> String {
    v.map_or("-".to_string(), |v| v.0.to_string())
}

fn bit_list(bits: impl IntoIterator<Item = Bit>) -> String {
    bits.into_iter().map(write_bit).collect::<Vec<_>>().join(",")
}

fn parse_bit_list(line: usize, s: &str) -> Result<Vec<Bit>, FormatError> {
    s.split(',').map(|b| parse_bit(line, b)).collect()
}

/// A QUBO model together with what is needed to read witnesses off it.
#[derive(Clone, Debug)]
pub struct QuboFile {
    pub bqm: BinaryQuadraticModel,
    pub bound: usize,
    pub or_output: Bit,
    pub input_widths: BTreeMap<Nid, u32>,
    pub state_sorts: BTreeMap<Nid, Sort>,
    /// `(step, input, bit)` to variable.
    pub inputs: BTreeMap<(usize, Nid, u32), VarId>,
    /// `(state, address, bit)` to variable; the address is 0 for bit-vectors.
    pub initial: BTreeMap<(Nid, u64, u32), VarId>,
    /// `(step, bad)` to condition bit.
    pub bads: BTreeMap<(usize, Nid), Bit>,
}

impl QuboFile {
    pub fn from_unrolled(unrolled: &UnrolledModel, model: &TransitionModel) -> Self {
        let mut file = QuboFile {
            bqm: unrolled.bqm.clone(),
            bound: unrolled.bound(),
            or_output: unrolled.or_output,
            input_widths: model.inputs().iter().map(|&n| (n, model.width_of(n).expect("bit-vector input"))).collect(),
            state_sorts: BTreeMap::new(),
            inputs: BTreeMap::new(),
            initial: BTreeMap::new(),
            bads: BTreeMap::new(),
        };
        for nid in model.uninitialized_states() {
            file.state_sorts.insert(nid, model.sort_of(nid).expect("states have sorts"));
            let mut record = |address: u64, bits: &[Bit]| {
                for (i, bit) in bits.iter().enumerate() {
                    if let Bit::Var(v) = bit {
                        file.initial.insert((nid, address, i as u32), *v);
                    }
                }
            };
            match &unrolled.frames[0].states[&nid] {
                FrameValue::Word(w) => record(0, &w.bits),
                FrameValue::Memory(m) => {
                    for (address, word) in m.entries() {
                        record(address, &word.bits);
                    }
                }
            }
        }
        for (step, frame) in unrolled.frames.iter().enumerate() {
            for (&nid, word) in &frame.inputs {
                for (i, bit) in word.bits.iter().enumerate() {
                    if let Bit::Var(v) = bit {
                        file.inputs.insert((step, nid, i as u32), *v);
                    }
                }
            }
            for (&nid, &bit) in &frame.bads {
                file.bads.insert((step, nid), bit);
            }
        }
        file
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        let b = &self.bqm;
        writeln!(out, "qubo vars {} offset {} bound {}", b.num_vars(), b.offset(), self.bound).unwrap();
        writeln!(out, "or {}", write_bit(self.or_output)).unwrap();
        for (nid, width) in &self.input_widths {
            writeln!(out, "input {nid} {width}").unwrap();
        }
        for (nid, sort) in &self.state_sorts {
            match sort {
                Sort::Bitvec(w) => writeln!(out, "state {nid} {w}").unwrap(),
                Sort::Array { index, element } => writeln!(out, "state {nid} {index} {element}").unwrap(),
            }
        }
        for ((step, nid, bit), v) in &self.inputs {
            writeln!(out, "in {step} {nid} {bit} {}", v.0).unwrap();
        }
        for ((nid, address, bit), v) in &self.initial {
            match self.state_sorts.get(nid) {
                Some(Sort::Array { .. }) => writeln!(out, "init {nid} {address} {bit} {}", v.0).unwrap(),
                _ => writeln!(out, "init {nid} {bit} {}", v.0).unwrap(),
            }
        }
        for ((step, nid), bit) in &self.bads {
            writeln!(out, "bad {step} {nid} {}", write_bit(*bit)).unwrap();
        }
        for v in b.free_vars() {
            writeln!(out, "free {}", v.0).unwrap();
        }
        for (v, c) in b.linear_terms().filter(|&(_, c)| c != 0) {
            writeln!(out, "lin {} {c}", v.0).unwrap();
        }
        for (u, v, c) in b.quadratic_terms().into_iter().filter(|&(_, _, c)| c != 0) {
            writeln!(out, "quad {} {} {c}", u.0, v.0).unwrap();
        }
        for entry in b.trace() {
            match entry {
                TraceEntry::Gate(g) => writeln!(
                    out,
                    "gate {} {} {} {} {}",
                    g.kind,
                    g.x.0,
                    opt_var(g.y),
                    g.out.0,
                    opt_var(g.ancilla)
                )
                .unwrap(),
                TraceEntry::DivRem(d) => writeln!(
                    out,
                    "divrem {} {} {} {}",
                    bit_list(d.dividend.iter().copied()),
                    bit_list(d.divisor.iter().copied()),
                    bit_list(d.quotient.iter().map(|&v| Bit::Var(v))),
                    bit_list(d.remainder.iter().map(|&v| Bit::Var(v))),
                )
                .unwrap(),
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (n, header) = lines.next().ok_or_else(|| syntax(1, "empty QUBO file"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 7 || h[0] != "qubo" || h[1] != "vars" || h[3] != "offset" || h[5] != "bound" {
            return Err(syntax(n, "expected `qubo vars <n> offset <c> bound <k>`"));
        }
        let num_vars: usize = parse_num(n, h[2])?;
        let offset: i64 = parse_num(n, h[4])?;
        let bound: usize = parse_num(n, h[6])?;

        let mut or_output = None;
        let mut input_widths = BTreeMap::new();
        let mut state_sorts = BTreeMap::new();
        let mut inputs = BTreeMap::new();
        let mut initial = BTreeMap::new();
        let mut bads = BTreeMap::new();
        let mut free = Vec::new();
        let mut linear = BTreeMap::new();
        let mut quadratic = BTreeMap::new();
        let mut trace = Vec::new();
        let check_var = |n: usize, v: VarId| {
            if v.index() < num_vars {
                Ok(v)
            } else {
                Err(syntax(n, format!("variable {} out of range", v.0)))
            }
        };
        for (n, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let arity = |k: usize| if f.len() == k + 1 { Ok(()) } else { Err(syntax(n, format!("`{}` takes {k} fields", f[0]))) };
            match f[0] {
                "or" => {
                    arity(1)?;
                    or_output = Some(parse_bit(n, f[1])?);
                }
                "input" => {
                    arity(2)?;
                    input_widths.insert(parse_num(n, f[1])?, parse_num(n, f[2])?);
                }
                "state" if f.len() == 3 => {
                    state_sorts.insert(parse_num(n, f[1])?, Sort::Bitvec(parse_num(n, f[2])?));
                }
                "state" => {
                    arity(3)?;
                    let sort = Sort::Array { index: parse_num(n, f[2])?, element: parse_num(n, f[3])? };
                    state_sorts.insert(parse_num(n, f[1])?, sort);
                }
                "in" => {
                    arity(4)?;
                    let key = (parse_num(n, f[1])?, parse_num(n, f[2])?, parse_num(n, f[3])?);
                    inputs.insert(key, check_var(n, parse_var(n, f[4])?)?);
                }
                "init" if f.len() == 4 => {
                    let key = (parse_num(n, f[1])?, 0, parse_num(n, f[2])?);
                    initial.insert(key, check_var(n, parse_var(n, f[3])?)?);
                }
                "init" => {
                    arity(4)?;
                    let key = (parse_num(n, f[1])?, parse_num(n, f[2])?, parse_num(n, f[3])?);
                    initial.insert(key, check_var(n, parse_var(n, f[4])?)?);
                }
                "bad" => {
                    arity(3)?;
                    bads.insert((parse_num(n, f[1])?, parse_num(n, f[2])?), parse_bit(n, f[3])?);
                }
                "free" => {
                    arity(1)?;
                    free.push(check_var(n, parse_var(n, f[1])?)?);
                }
                "lin" => {
                    arity(2)?;
                    linear.insert(check_var(n, parse_var(n, f[1])?)?, parse_num(n, f[2])?);
                }
                "quad" => {
                    arity(3)?;
                    let (u, v) = (check_var(n, parse_var(n, f[1])?)?, check_var(n, parse_var(n, f[2])?)?);
                    if u >= v {
                        return Err(syntax(n, "quadratic terms need u < v"));
                    }
                    quadratic.insert((u, v), parse_num(n, f[3])?);
                }
                "gate" => {
                    arity(5)?;
                    let kind: GateKind = f[1].parse().map_err(|e: String| syntax(n, e))?;
                    trace.push(TraceEntry::Gate(GateRecord {
                        kind,
                        x: parse_var(n, f[2])?,
                        y: parse_opt_var(n, f[3])?,
                        out: parse_var(n, f[4])?,
                        ancilla: parse_opt_var(n, f[5])?,
                    }));
                }
                "divrem" => {
                    arity(4)?;
                    let vars = |s: &str| -> Result<Vec<VarId>, FormatError> {
                        parse_bit_list(n, s)?
                            .into_iter()
                            .map(|b| b.as_var().ok_or_else(|| syntax(n, "quotient and remainder must be variables")))
                            .collect()
                    };
                    trace.push(TraceEntry::DivRem(DivRemRecord {
                        dividend: parse_bit_list(n, f[1])?,
                        divisor: parse_bit_list(n, f[2])?,
                        quotient: vars(f[3])?,
                        remainder: vars(f[4])?,
                    }));
                }
                other => return Err(syntax(n, format!("unknown record `{other}`"))),
            }
        }
        Ok(QuboFile {
            bqm: BinaryQuadraticModel::from_parts(num_vars, offset, linear, quadratic, free, trace),
            bound,
            or_output: or_output.ok_or_else(|| syntax(n, "missing `or` line"))?,
            input_widths,
            state_sorts,
            inputs,
            initial,
            bads,
        })
    }

    /// Input and initial-state values encoded by `assignment`.
    pub fn decode(&self, assignment: &[bool]) -> Witness {
        let mut witness = Witness::default();
        let mut words: BTreeMap<(Nid, u64), u64> = BTreeMap::new();
        for (&(nid, address, bit), v) in &self.initial {
            if assignment[v.index()] {
                *words.entry((nid, address)).or_default() |= 1 << bit;
            }
        }
        for (&nid, &sort) in &self.state_sorts {
            let value = match sort {
                Sort::Bitvec(w) => Value::Bv(BitVecValue::new(w, words.get(&(nid, 0)).copied().unwrap_or(0))),
                Sort::Array { index, element } => {
                    let mut array = ArrayValue::filled(index, element, 0);
                    for (&(_, address), &bits) in words.range((nid, 0)..=(nid, u64::MAX)) {
                        array = array.write(address, bits);
                    }
                    Value::Array(array)
                }
            };
            witness.initial.insert(nid, value);
        }
        for step in 0..=self.bound {
            let mut values = BTreeMap::new();
            for (&nid, &width) in &self.input_widths {
                let bits = (0..width)
                    .filter(|&i| self.inputs.get(&(step, nid, i)).is_some_and(|v| assignment[v.index()]))
                    .fold(0u64, |acc, i| acc | 1 << i);
                values.insert(nid, BitVecValue::new(width, bits));
            }
            witness.steps.push(values);
        }
        witness
    }

    /// Free-variable values selected by `witness`; unspecified ones are 0.
    pub fn free_values(&self, witness: &Witness) -> std::collections::HashMap<VarId, bool> {
        let mut free: std::collections::HashMap<VarId, bool> = self.bqm.free_vars().iter().map(|&v| (v, false)).collect();
        for (&(step, nid, bit), &v) in &self.inputs {
            let bits = witness.steps.get(step).and_then(|s| s.get(&nid)).map_or(0, |x| x.bits());
            free.insert(v, (bits >> bit) & 1 == 1);
        }
        for (&(nid, address, bit), &v) in &self.initial {
            let bits = match witness.initial.get(&nid) {
                Some(Value::Bv(x)) => x.bits(),
                Some(Value::Array(a)) => a.read(address).bits(),
                None => 0,
            };
            free.insert(v, (bits >> bit) & 1 == 1);
        }
        free
    }

    /// First step with a bad condition true under `assignment`.
    pub fn first_bad(&self, assignment: &[bool]) -> Option<(usize, Vec<Nid>)> {
        let mut fired: BTreeMap<usize, Vec<Nid>> = BTreeMap::new();
        for (&(step, nid), bit) in &self.bads {
            if bit.value(assignment) {
                fired.entry(step).or_default().push(nid);
            }
        }
        fired.into_iter().next()
    }
}

/// Nonzero elements of `a`. A nonzero default is spelled out per index, which
/// requires a small index width.
fn array_entries(a: &ArrayValue) -> BTreeMap<u64, u64> {
    if a.default == 0 || a.index_width > 24 {
        return a.entries.iter().filter(|&(_, &v)| v != 0).map(|(&i, &v)| (i, v)).collect();
    }
    (0..1u64 << a.index_width).map(|i| (i, a.read(i).bits())).filter(|&(_, v)| v != 0).collect()
}

/// Initial value of an uninitialized state in a witness file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InitValue {
    Word(u64),
    Array(BTreeMap<u64, u64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WitnessFile {
    pub bound: usize,
    pub energy: Option<i64>,
    pub bad: Option<(usize, Vec<Nid>)>,
    pub initial: BTreeMap<Nid, InitValue>,
    /// Nonzero input values per step.
    pub steps: Vec<BTreeMap<Nid, u64>>,
}

impl WitnessFile {
    pub fn from_witness(witness: &Witness, bound: usize, energy: Option<i64>, bad: Option<(usize, Vec<Nid>)>) -> Self {
        let initial = witness
            .initial
            .iter()
            .map(|(&nid, value)| {
                let v = match value {
                    Value::Bv(x) => InitValue::Word(x.bits()),
                    Value::Array(a) => InitValue::Array(array_entries(a)),
                };
                (nid, v)
            })
            .collect();
        let steps = (0..=bound)
            .map(|k| {
                witness
                    .steps
                    .get(k)
                    .map(|s| s.iter().filter(|(_, v)| v.bits() != 0).map(|(&n, v)| (n, v.bits())).collect())
                    .unwrap_or_default()
            })
            .collect();
        WitnessFile { bound, energy, bad, initial, steps }
    }

    /// Builds a simulator witness, taking widths from `sort_of`.
    pub fn to_witness(&self, sort_of: impl Fn(Nid) -> Option<Sort>) -> Result<Witness, FormatError> {
        let fits = |nid: Nid, width: u32, value: u64| {
            if width >= 64 || value >> width == 0 {
                Ok(())
            } else {
                Err(FormatError::ValueTooWide { nid, value })
            }
        };
        let mut witness = Witness::default();
        for (&nid, value) in &self.initial {
            let v = match (sort_of(nid), value) {
                (Some(Sort::Bitvec(w)), InitValue::Word(x)) => {
                    fits(nid, w, *x)?;
                    Value::Bv(BitVecValue::new(w, *x))
                }
                (Some(Sort::Array { index, element }), InitValue::Array(entries)) => {
                    let mut array = ArrayValue::filled(index, element, 0);
                    for (&a, &x) in entries {
                        fits(nid, index, a)?;
                        fits(nid, element, x)?;
                        array = array.write(a, x);
                    }
                    Value::Array(array)
                }
                _ => return Err(FormatError::UnknownNid(nid)),
            };
            witness.initial.insert(nid, v);
        }
        for step in &self.steps {
            let mut values = BTreeMap::new();
            for (&nid, &x) in step {
                let Some(Sort::Bitvec(w)) = sort_of(nid) else {
                    return Err(FormatError::UnknownNid(nid));
                };
                fits(nid, w, x)?;
                values.insert(nid, BitVecValue::new(w, x));
            }
            witness.steps.push(values);
        }
        Ok(witness)
    }

    pub fn for_model(&self, model: &TransitionModel) -> Result<Witness, FormatError> {
        let uninit: Vec<Nid> = model.uninitialized_states().collect();
        self.to_witness(|nid| {
            (model.inputs().contains(&nid) || uninit.contains(&nid)).then(|| model.sort_of(nid)).flatten()
        })
    }

    pub fn for_qubo(&self, qubo: &QuboFile) -> Result<Witness, FormatError> {
        self.to_witness(|nid| qubo.input_widths.get(&nid).map(|&w| Sort::Bitvec(w)).or(qubo.state_sorts.get(&nid).copied()))
    }

    pub fn write(&self) -> String {
        let mut out = format!("witness bound {}\n", self.bound);
        if let Some(e) = self.energy {
            writeln!(out, "energy {e}").unwrap();
        }
        match &self.bad {
            Some((step, nids)) => {
                let list: Vec<String> = nids.iter().map(|n| n.to_string()).collect();
                writeln!(out, "bad {step} {}", list.join(" ")).unwrap();
            }
            None => out.push_str("bad none\n"),
        }
        for (nid, value) in &self.initial {
            match value {
                InitValue::Word(x) => writeln!(out, "init {nid} {x}").unwrap(),
                InitValue::Array(entries) => {
                    let list: Vec<String> = entries.iter().map(|(a, x)| format!("{a}={x}")).collect();
                    writeln!(out, "init {nid} {}", list.join(" ").trim_end()).unwrap();
                }
            }
        }
        for (k, step) in self.steps.iter().enumerate() {
            let mut line = format!("step {k}");
            for (nid, x) in step {
                write!(line, " {nid}={x}").unwrap();
            }
            writeln!(out, "{line}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (n, header) = lines.next().ok_or_else(|| syntax(1, "empty witness file"))?;
        let bound = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["witness", "bound", k] => parse_num(n, k)?,
            _ => return Err(syntax(n, "expected `witness bound <k>`")),
        };
        let mut file = WitnessFile { bound, steps: vec![BTreeMap::new(); bound + 1], ..Default::default() };
        let pair = |n: usize, s: &str| -> Result<(u64, u64), FormatError> {
            let (a, b) = s.split_once('=').ok_or_else(|| syntax(n, format!("expected `a=b`, found `{s}`")))?;
            Ok((parse_num(n, a)?, parse_num(n, b)?))
        };
        for (n, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            match f[0] {
                "energy" if f.len() == 2 => file.energy = Some(parse_num(n, f[1])?),
                "bad" if f[1..] == ["none"] => file.bad = None,
                "bad" if f.len() >= 3 => {
                    let nids = f[2..].iter().map(|s| parse_num(n, s)).collect::<Result<_, _>>()?;
                    file.bad = Some((parse_num(n, f[1])?, nids));
                }
                "init" if f.len() == 3 && !f[2].contains('=') => {
                    file.initial.insert(parse_num(n, f[1])?, InitValue::Word(parse_num(n, f[2])?));
                }
                "init" if f.len() >= 2 => {
                    let entries = f[2..].iter().map(|s| pair(n, s)).collect::<Result<_, _>>()?;
                    file.initial.insert(parse_num(n, f[1])?, InitValue::Array(entries));
                }
                "step" if f.len() >= 2 => {
                    let k: usize = parse_num(n, f[1])?;
                    if k > bound {
                        return Err(syntax(n, format!("step {k} beyond bound {bound}")));
                    }
                    for s in &f[2..] {
                        let (nid, x) = pair(n, s)?;
                        file.steps[k].insert(nid, x);
                    }
                }
                _ => return Err(syntax(n, format!("malformed line `{line}`"))),
            }
        }
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::btor2::parse_btor2;
    use crate::unroll::{translate, UnrollOptions};

    const GUESS: &str = "1 sort bitvec 4\n2 sort bitvec 1\n3 input 1 x\n4 state 1 s\n5 constd 1 9\n\
                         6 eq 2 3 5\n7 bad 6\n8 next 1 4 3\n";

    #[test]
    fn qubo_round_trip() {
        let model = parse_btor2(GUESS).unwrap();
        let unrolled = translate(&model, 2, UnrollOptions::default()).unwrap();
        let text = QuboFile::from_unrolled(&unrolled, &model).write();
        let again = QuboFile::parse(&text).unwrap().write();
        assert_eq!(text, again);
    }

    #[test]
    fn witness_round_trip() {
        let text = "witness bound 2\nenergy 0\nbad 1 7\ninit 4 3\nstep 0\nstep 1 3=9\nstep 2\n";
        let file = WitnessFile::parse(text).unwrap();
        assert_eq!(file.write(), text);
        let model = parse_btor2(GUESS).unwrap();
        let w = file.for_model(&model).unwrap();
        assert_eq!(w.steps[1][&3].bits(), 9);
        let bad = WitnessFile::parse("witness bound 0\nbad none\nstep 0 3=16\n").unwrap();
        assert_eq!(bad.for_model(&model), Err(FormatError::ValueTooWide { nid: 3, value: 16 }));
    }
}
