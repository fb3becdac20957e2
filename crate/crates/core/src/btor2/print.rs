use std::fmt::Write;

use super::{ConstForm, Op, SortDecl, TransitionModel};

/// Prints a model in canonical form: one line per node, single spaces,
/// symbols preserved, comments dropped.
pub fn print_btor2(model: &TransitionModel) -> String {
    let mut out = String::new();
    for node in model.nodes() {
        let mut line = format!("{} ", node.nid);
        match &node.op {
            Op::Sort(SortDecl::Bitvec(w)) => write!(line, "sort bitvec {w}"),
            Op::Sort(SortDecl::Array { index, element }) => write!(line, "sort array {index} {element}"),
            Op::Const { sort, form, value } => match form {
                ConstForm::Zero => write!(line, "zero {sort}"),
                ConstForm::One => write!(line, "one {sort}"),
                ConstForm::Decimal => write!(line, "constd {sort} {value}"),
                ConstForm::Binary => {
                    let w = model.width_of(node.nid).unwrap_or(1) as usize;
                    write!(line, "const {sort} {value:0w$b}")
                }
                ConstForm::Hex => write!(line, "consth {sort} {value:x}"),
            },
            Op::Unary { op, sort, arg } => write!(line, "{} {sort} {arg}", op.keyword()),
            Op::Binary { op, sort, lhs, rhs } => write!(line, "{} {sort} {lhs} {rhs}", op.keyword()),
            Op::Ite { sort, cond, then, els } => write!(line, "ite {sort} {cond} {then} {els}"),
            Op::Uext { sort, arg, amount } => write!(line, "uext {sort} {arg} {amount}"),
            Op::Slice { sort, arg, upper, lower } => write!(line, "slice {sort} {arg} {upper} {lower}"),
            Op::Read { sort, array, index } => write!(line, "read {sort} {array} {index}"),
            Op::Write { sort, array, index, value } => write!(line, "write {sort} {array} {index} {value}"),
            Op::State { sort } => write!(line, "state {sort}"),
            Op::Input { sort } => write!(line, "input {sort}"),
            Op::Init { sort, state, value } => write!(line, "init {sort} {state} {value}"),
            Op::Next { sort, state, value } => write!(line, "next {sort} {state} {value}"),
            Op::Bad { cond } => write!(line, "bad {cond}"),
        }
        .expect("writing to a String cannot fail");
        if let Some(symbol) = &node.symbol {
            line.push(' ');
            line.push_str(symbol);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_btor2;
    use super::*;

    #[test]
    fn round_trip_is_stable() {
        let text = "1 sort bitvec 3 ; word\n2 sort bitvec 1\n3 zero 1\n4 const 1 101\n5 consth 1 7 seven\n\
                    6 state 1 s\n7 init 1 6 3\n8 add 1 6 4\n9 next 1 6 8\n10 eq 2 6 5\n11 bad 10\n\
                    12 sort array 1 1\n13 state 12 m\n14 write 12 13 6 5\n15 next 12 13 14\n";
        let model = parse_btor2(text).unwrap();
        let printed = print_btor2(&model);
        let again = parse_btor2(&printed).unwrap();
        assert_eq!(model, again);
        assert_eq!(printed, print_btor2(&again));
        assert!(printed.contains("4 const 1 101\n"));
        assert!(printed.contains("5 consth 1 7 seven\n"));
    }
}
