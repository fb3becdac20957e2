use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use super::value::mask;
use super::{BinaryOp, ConstForm, Nid, Node, Op, Sort, SortDecl, TransitionModel, UnaryOp, MAX_WIDTH};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: nid {nid} refers forward to undefined nid {target}")]
    ForwardReference { line: usize, nid: Nid, target: Nid },
    #[error("line {line}: nid {target} is not defined")]
    UndefinedNid { line: usize, target: Nid },
    #[error("line {line}: duplicate nid {nid}")]
    DuplicateNid { line: usize, nid: Nid },
    #[error("line {line}: nid {nid} is not larger than the previous nid {previous}")]
    NonIncreasingNid { line: usize, nid: Nid, previous: Nid },
    #[error("line {line}: unknown or unsupported keyword `{keyword}`")]
    UnknownKeyword { line: usize, keyword: String },
    #[error("line {line}: malformed integer `{token}`")]
    MalformedInteger { line: usize, token: String },
    #[error("line {line}: sort mismatch: {message}")]
    SortMismatch { line: usize, message: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Parses the supported BTOR2 subset.
pub fn parse_btor2(text: &str) -> Result<TransitionModel, ParseError> {
    let mut parser = Parser::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find(';') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        parser.line(line, &tokens)?;
    }
    parser.finish()
}

#[derive(Default)]
struct Parser {
    model: TransitionModel,
    last_nid: Option<Nid>,
    /// Line number of every `init`, for the ordering check.
    init_lines: BTreeMap<Nid, usize>,
}

fn parse_u64(line: usize, token: &str) -> Result<u64, ParseError> {
    token.parse::<u64>().map_err(|_| ParseError::MalformedInteger {
        line,
        token: token.to_string(),
    })
}

fn parse_u32(line: usize, token: &str) -> Result<u32, ParseError> {
    token.parse::<u32>().map_err(|_| ParseError::MalformedInteger {
        line,
        token: token.to_string(),
    })
}

impl Parser {
    fn mismatch(line: usize, message: impl Into<String>) -> ParseError {
        ParseError::SortMismatch {
            line,
            message: message.into(),
        }
    }

    /// Resolves an operand reference, which must name an existing smaller nid.
    fn reference(&self, line: usize, nid: Nid, token: &str) -> Result<Nid, ParseError> {
        if token.starts_with('-') {
            return Err(ParseError::Malformed {
                line,
                message: format!("negated operand `{token}` is not supported"),
            });
        }
        let target = parse_u64(line, token)?;
        if target >= nid {
            return Err(ParseError::ForwardReference { line, nid, target });
        }
        if !self.model.nodes.contains_key(&target) {
            return Err(ParseError::UndefinedNid { line, target });
        }
        Ok(target)
    }

    fn sort_ref(&self, line: usize, nid: Nid, token: &str) -> Result<(Nid, Sort), ParseError> {
        let sid = self.reference(line, nid, token)?;
        match self.model.sorts.get(&sid) {
            Some(sort) if matches!(self.model.nodes[&sid].op, Op::Sort(_)) => Ok((sid, *sort)),
            _ => Err(Self::mismatch(line, format!("nid {sid} is not a sort"))),
        }
    }

    fn value_ref(&self, line: usize, nid: Nid, token: &str) -> Result<(Nid, Sort), ParseError> {
        let target = self.reference(line, nid, token)?;
        let node = &self.model.nodes[&target];
        match node.op {
            Op::Sort(_) | Op::Init { .. } | Op::Next { .. } | Op::Bad { .. } => Err(Self::mismatch(
                line,
                format!("nid {target} does not denote a value"),
            )),
            _ => Ok((target, self.model.sort_of(target).expect("value nodes have sorts"))),
        }
    }

    fn bitvec_ref(&self, line: usize, nid: Nid, token: &str) -> Result<(Nid, u32), ParseError> {
        let (target, sort) = self.value_ref(line, nid, token)?;
        match sort {
            Sort::Bitvec(w) => Ok((target, w)),
            Sort::Array { .. } => Err(Self::mismatch(line, format!("nid {target} is an array"))),
        }
    }

    fn expect_arity(line: usize, tokens: &[&str], operands: usize) -> Result<Option<String>, ParseError> {
        let fixed = 2 + operands;
        if tokens.len() < fixed {
            return Err(ParseError::Malformed {
                line,
                message: format!("`{}` expects {} operands", tokens[1], operands),
            });
        }
        match tokens.len() - fixed {
            0 => Ok(None),
            1 => Ok(Some(tokens[fixed].to_string())),
            _ => Err(ParseError::Malformed {
                line,
                message: format!("unexpected trailing tokens after `{}`", tokens[fixed]),
            }),
        }
    }

    fn line(&mut self, line: usize, tokens: &[&str]) -> Result<(), ParseError> {
        let nid = parse_u64(line, tokens[0])?;
        if nid == 0 {
            return Err(ParseError::MalformedInteger {
                line,
                token: tokens[0].to_string(),
            });
        }
        if self.model.nodes.contains_key(&nid) {
            return Err(ParseError::DuplicateNid { line, nid });
        }
        if let Some(previous) = self.last_nid {
            if nid <= previous {
                return Err(ParseError::NonIncreasingNid { line, nid, previous });
            }
        }
        if tokens.len() < 2 {
            return Err(ParseError::Malformed {
                line,
                message: "missing keyword".into(),
            });
        }
        let keyword = tokens[1];
        let (op, symbol, sort) = match keyword {
            "sort" => self.sort_line(line, nid, tokens)?,
            "zero" | "one" | "constd" | "const" | "consth" => self.const_line(line, nid, tokens)?,
            "not" | "inc" | "dec" => {
                let symbol = Self::expect_arity(line, tokens, 2)?;
                let (sid, sort) = self.sort_ref(line, nid, tokens[2])?;
                let (arg, w) = self.bitvec_ref(line, nid, tokens[3])?;
                if sort != Sort::Bitvec(w) {
                    return Err(Self::mismatch(line, format!("`{keyword}` operand has width {w}")));
                }
                let op = match keyword {
                    "not" => UnaryOp::Not,
                    "inc" => UnaryOp::Inc,
                    _ => UnaryOp::Dec,
                };
                (Op::Unary { op, sort: sid, arg }, symbol, Some(sort))
            }
            "add" | "sub" | "mul" | "udiv" | "urem" | "and" | "ult" | "ulte" | "ugt" | "ugte" | "eq"
            | "neq" => {
                let symbol = Self::expect_arity(line, tokens, 3)?;
                let op = match keyword {
                    "add" => BinaryOp::Add,
                    "sub" => BinaryOp::Sub,
                    "mul" => BinaryOp::Mul,
                    "udiv" => BinaryOp::Udiv,
                    "urem" => BinaryOp::Urem,
                    "and" => BinaryOp::And,
                    "ult" => BinaryOp::Ult,
                    "ulte" => BinaryOp::Ulte,
                    "ugt" => BinaryOp::Ugt,
                    "ugte" => BinaryOp::Ugte,
                    "eq" => BinaryOp::Eq,
                    _ => BinaryOp::Neq,
                };
                let (sid, sort) = self.sort_ref(line, nid, tokens[2])?;
                let (lhs, lw) = self.bitvec_ref(line, nid, tokens[3])?;
                let (rhs, rw) = self.bitvec_ref(line, nid, tokens[4])?;
                if lw != rw {
                    return Err(Self::mismatch(line, format!("operand widths {lw} and {rw} differ")));
                }
                let expected = if op.is_comparison() { Sort::Bitvec(1) } else { Sort::Bitvec(lw) };
                if sort != expected {
                    return Err(Self::mismatch(line, format!("`{keyword}` result sort must be {expected:?}")));
                }
                (Op::Binary { op, sort: sid, lhs, rhs }, symbol, Some(sort))
            }
            "ite" => {
                let symbol = Self::expect_arity(line, tokens, 4)?;
                let (sid, sort) = self.sort_ref(line, nid, tokens[2])?;
                let (cond, cw) = self.bitvec_ref(line, nid, tokens[3])?;
                if cw != 1 {
                    return Err(Self::mismatch(line, "ite condition must have width 1"));
                }
                let (then, ts) = self.value_ref(line, nid, tokens[4])?;
                let (els, es) = self.value_ref(line, nid, tokens[5])?;
                if ts != sort || es != sort {
                    return Err(Self::mismatch(line, "ite branches must match the result sort"));
                }
                (Op::Ite { sort: sid, cond, then, els }, symbol, Some(sort))
            }
            "uext" => {
                let symbol = Self::expect_arity(line, tokens, 3)?;
                let (sid, sort) = self.sort_ref(line, nid, tokens[2])?;
                let (arg, w) = self.bitvec_ref(line, nid, tokens[3])?;
                let amount = parse_u32(line, tokens[4])?;
                if sort != Sort::Bitvec(w + amount) {
                    return Err(Self::mismatch(line, format!("uext of width {w} by {amount} has wrong result sort")));
                }
                (Op::Uext { sort: sid, arg, amount }, symbol, Some(sort))
            }
            "slice" => {
                let symbol = Self::expect_arity(line, tokens, 4)?;
                let (sid, sort) = self.sort_ref(line, nid, tokens[2])?;
                let (arg, w) = self.bitvec_ref(line, nid, tokens[3])?;
                let upper = parse_u32(line, tokens[4])?;
                let lower = parse_u32(line, tokens[5])?;
                if upper < lower || upper >= w {
                    return Err(Self::mismatch(line, format!("slice bounds {upper}..{lower} out of range for width {w}")));
                }
                if sort != Sort::Bitvec(upper - lower + 1) {
                    return Err(Self::mismatch(line, "slice result sort has wrong width"));
                }
                (Op::Slice { sort: sid, arg, upper, lower }, symbol, Some(sort))
            }
            "read" => {
                let symbol = Self::expect_arity(line, tokens, 3)?;
                let (sid, sort) = self.sort_ref(line, nid, tokens[2])?;
                let (array, asort) = self.value_ref(line, nid, tokens[3])?;
                let (index, iw) = self.bitvec_ref(line, nid, tokens[4])?;
                match asort {
                    Sort::Array { index: ai, element } if ai == iw && sort == Sort::Bitvec(element) => {}
                    _ => return Err(Self::mismatch(line, "read operands do not match the array sort")),
                }
                (Op::Read { sort: sid, array, index }, symbol, Some(sort))
            }
            "write" => {
                let symbol = Self::expect_arity(line, tokens, 4)?;
                let (sid, sort) = self.sort_ref(line, nid, tokens[2])?;
                let (array, asort) = self.value_ref(line, nid, tokens[3])?;
                let (index, iw) = self.bitvec_ref(line, nid, tokens[4])?;
                let (value, vw) = self.bitvec_ref(line, nid, tokens[5])?;
                match asort {
                    Sort::Array { index: ai, element } if asort == sort && ai == iw && element == vw => {}
                    _ => return Err(Self::mismatch(line, "write operands do not match the array sort")),
                }
                (Op::Write { sort: sid, array, index, value }, symbol, Some(sort))
            }
            "state" | "input" => {
                let symbol = Self::expect_arity(line, tokens, 1)?;
                let (sid, sort) = self.sort_ref(line, nid, tokens[2])?;
                if keyword == "input" {
                    if !matches!(sort, Sort::Bitvec(_)) {
                        return Err(Self::mismatch(line, "array inputs are not supported"));
                    }
                    self.model.inputs.push(nid);
                    (Op::Input { sort: sid }, symbol, Some(sort))
                } else {
                    self.model.states.push(nid);
                    (Op::State { sort: sid }, symbol, Some(sort))
                }
            }
            "init" | "next" => {
                let symbol = Self::expect_arity(line, tokens, 3)?;
                let (sid, sort) = self.sort_ref(line, nid, tokens[2])?;
                let (state, ssort) = self.value_ref(line, nid, tokens[3])?;
                if !matches!(self.model.nodes[&state].op, Op::State { .. }) {
                    return Err(Self::mismatch(line, format!("nid {state} is not a state")));
                }
                let (value, vsort) = self.value_ref(line, nid, tokens[4])?;
                if ssort != sort {
                    return Err(Self::mismatch(line, format!("`{keyword}` sort differs from the state sort")));
                }
                let fill = matches!((keyword, sort, vsort), ("init", Sort::Array { element, .. }, Sort::Bitvec(w)) if element == w);
                if vsort != sort && !fill {
                    return Err(Self::mismatch(line, format!("`{keyword}` value sort differs from the state sort")));
                }
                if keyword == "init" {
                    if self.model.init_of.insert(state, value).is_some() {
                        return Err(ParseError::Malformed {
                            line,
                            message: format!("state {state} has more than one init"),
                        });
                    }
                    self.model.init_order.push(state);
                    self.init_lines.insert(state, line);
                    (Op::Init { sort: sid, state, value }, symbol, None)
                } else {
                    if self.model.next_of.insert(state, value).is_some() {
                        return Err(ParseError::Malformed {
                            line,
                            message: format!("state {state} has more than one next"),
                        });
                    }
                    (Op::Next { sort: sid, state, value }, symbol, None)
                }
            }
            "bad" => {
                let symbol = Self::expect_arity(line, tokens, 1)?;
                let (cond, w) = self.bitvec_ref(line, nid, tokens[2])?;
                if w != 1 {
                    return Err(Self::mismatch(line, "bad condition must have width 1"));
                }
                self.model.bads.push(nid);
                (Op::Bad { cond }, symbol, None)
            }
            other => {
                return Err(ParseError::UnknownKeyword {
                    line,
                    keyword: other.to_string(),
                })
            }
        };
        if let Some(sort) = sort {
            if let Op::Sort(_) = op {
                self.model.sorts.insert(nid, sort);
            }
        }
        self.model.nodes.insert(nid, Node { nid, op, symbol });
        self.last_nid = Some(nid);
        Ok(())
    }

    fn sort_line(&self, line: usize, nid: Nid, tokens: &[&str]) -> Result<(Op, Option<String>, Option<Sort>), ParseError> {
        match tokens.get(2).copied() {
            Some("bitvec") => {
                let symbol = Self::expect_arity(line, tokens, 2)?;
                let width = parse_u32(line, tokens[3])?;
                if width == 0 || width > MAX_WIDTH {
                    return Err(ParseError::Malformed {
                        line,
                        message: format!("bit-vector width {width} outside 1..={MAX_WIDTH}"),
                    });
                }
                Ok((Op::Sort(SortDecl::Bitvec(width)), symbol, Some(Sort::Bitvec(width))))
            }
            Some("array") => {
                let symbol = Self::expect_arity(line, tokens, 3)?;
                let (index, isort) = self.sort_ref(line, nid, tokens[3])?;
                let (element, esort) = self.sort_ref(line, nid, tokens[4])?;
                match (isort, esort) {
                    (Sort::Bitvec(iw), Sort::Bitvec(ew)) => Ok((
                        Op::Sort(SortDecl::Array { index, element }),
                        symbol,
                        Some(Sort::Array { index: iw, element: ew }),
                    )),
                    _ => Err(Self::mismatch(line, "array index and element sorts must be bit-vectors")),
                }
            }
            other => Err(ParseError::UnknownKeyword {
                line,
                keyword: format!("sort {}", other.unwrap_or("")),
            }),
        }
    }

    fn const_line(&self, line: usize, nid: Nid, tokens: &[&str]) -> Result<(Op, Option<String>, Option<Sort>), ParseError> {
        let keyword = tokens[1];
        let operands = if matches!(keyword, "zero" | "one") { 1 } else { 2 };
        let symbol = Self::expect_arity(line, tokens, operands)?;
        let (sid, sort) = self.sort_ref(line, nid, tokens[2])?;
        let width = match sort {
            Sort::Bitvec(w) => w,
            Sort::Array { .. } => return Err(Self::mismatch(line, "constants must be bit-vectors")),
        };
        let malformed = |token: &str| ParseError::MalformedInteger {
            line,
            token: token.to_string(),
        };
        let (form, value) = match keyword {
            "zero" => (ConstForm::Zero, 0),
            "one" => (ConstForm::One, 1),
            "constd" => {
                let token = tokens[3];
                let value = if let Some(magnitude) = token.strip_prefix('-') {
                    let m: u64 = magnitude.parse().map_err(|_| malformed(token))?;
                    if width < 64 && m > (1u64 << width) {
                        return Err(malformed(token));
                    }
                    m.wrapping_neg() & mask(width)
                } else {
                    let v: u64 = token.parse().map_err(|_| malformed(token))?;
                    if v & !mask(width) != 0 {
                        return Err(malformed(token));
                    }
                    v
                };
                (ConstForm::Decimal, value)
            }
            "const" => {
                let token = tokens[3];
                if token.len() != width as usize || !token.bytes().all(|b| b == b'0' || b == b'1') {
                    return Err(malformed(token));
                }
                (ConstForm::Binary, u64::from_str_radix(token, 2).map_err(|_| malformed(token))?)
            }
            _ => {
                let token = tokens[3];
                let v = u64::from_str_radix(token, 16).map_err(|_| malformed(token))?;
                if v & !mask(width) != 0 {
                    return Err(malformed(token));
                }
                (ConstForm::Hex, v)
            }
        };
        Ok((Op::Const { sort: sid, form, value }, symbol, Some(sort)))
    }

    fn finish(self) -> Result<TransitionModel, ParseError> {
        // init values may only read constants and states initialized before them
        let mut initialized: HashSet<Nid> = HashSet::new();
        for &state in &self.model.init_order {
            let line = self.init_lines[&state];
            let value = self.model.init_of[&state];
            let mut stack = vec![value];
            let mut seen = HashSet::new();
            while let Some(nid) = stack.pop() {
                if !seen.insert(nid) {
                    continue;
                }
                match self.model.nodes[&nid].op {
                    Op::Input { .. } => {
                        return Err(ParseError::Malformed {
                            line,
                            message: format!("init of state {state} depends on input {nid}"),
                        })
                    }
                    Op::State { .. } => {
                        if self.model.init_of.contains_key(&nid) && !initialized.contains(&nid) {
                            return Err(ParseError::Malformed {
                                line,
                                message: format!("init of state {state} reads state {nid} before its init"),
                            });
                        }
                    }
                    ref op => stack.extend(op.operands()),
                }
            }
            initialized.insert(state);
        }
        Ok(self.model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn array_sort_refers_to_element_sort() {
        let m = parse_btor2("2 sort bitvec 4\n3 sort array 2 2\n").unwrap();
        assert_eq!(m.sort_of(3), Some(Sort::Array { index: 4, element: 4 }));
        assert_eq!(
            m.node(3).unwrap().op,
            Op::Sort(SortDecl::Array { index: 2, element: 2 })
        );
    }

    #[test]
    fn forward_reference_is_rejected() {
        let err = parse_btor2("1 sort bitvec 3\n2 zero 1\n5 add 1 9 2\n").unwrap_err();
        assert_eq!(err, ParseError::ForwardReference { line: 3, nid: 5, target: 9 });
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("1 sort bitvec 3\n1 zero 1\n", "duplicate"),
            ("1 sort bitvec 3\n2 frobnicate 1\n", "unknown"),
            ("1 sort bitvec 3\n2 constd 1 x7\n", "malformed integer"),
            ("1 sort bitvec 3\n2 constd 1 8\n", "malformed integer"),
            ("1 sort bitvec 3\n2 sort bitvec 1\n3 zero 1\n4 zero 2\n5 add 1 3 4\n", "sort mismatch"),
            ("1 sort bitvec 3\n3 zero 1\n2 zero 1\n", "not larger"),
            ("1 sort bitvec 3\n2 zero 1\n3 not 1 -2\n", "negated"),
            ("1 sort bitvec 3\n2 zero 1\n3 justice 1 2\n", "unknown"),
        ];
        for (text, needle) in cases {
            let err = parse_btor2(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{text:?}: {err}");
        }
    }

    #[test]
    fn negative_constd_wraps() {
        let m = parse_btor2("2 sort bitvec 32\n3 constd 2 -16\n").unwrap();
        match m.node(3).unwrap().op {
            Op::Const { value, .. } => assert_eq!(value, 0xFFFF_FFF0),
            ref other => panic!("{other:?}"),
        }
    }

    #[test]
    fn symbols_and_comments() {
        let m = parse_btor2("1 sort bitvec 1 ; Boolean\n2 state 1 flag ; comment\n3 bad 2 b0\n").unwrap();
        assert_eq!(m.symbol(2), Some("flag"));
        assert_eq!(m.symbol(3), Some("b0"));
        assert_eq!(m.bads(), &[3]);
        assert_eq!(m.find_symbol("flag"), Some(2));
    }

    #[test]
    fn init_may_not_read_inputs() {
        let text = "1 sort bitvec 4\n2 input 1\n3 state 1\n4 init 1 3 2\n";
        assert!(parse_btor2(text).unwrap_err().to_string().contains("depends on input"));
    }

    #[test]
    fn double_next_is_rejected() {
        let text = "1 sort bitvec 4\n2 state 1\n3 next 1 2 2\n4 next 1 2 2\n";
        assert!(parse_btor2(text).unwrap_err().to_string().contains("more than one next"));
    }
}
