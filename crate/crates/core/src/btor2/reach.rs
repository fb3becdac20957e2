//! Exhaustive bounded reachability by explicit enumeration of inputs and
//! uninitialized states. Used as a ground-truth oracle for small models.

use std::collections::BTreeMap;

use thiserror::Error;

use super::sim::{step_model, SimError, SimState, Witness};
use super::value::{BitVecValue, Value};
use super::{Nid, Sort, TransitionModel};

/// Default budget of step evaluations.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReachError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("enumeration exceeded {0} step evaluations")]
    LimitExceeded(u64),
    #[error("uninitialized array state {0} cannot be enumerated")]
    UninitializedArray(Nid),
}

/// Values to try for each input and uninitialized state. Nids without an
/// entry range over their full bit-vector domain.
#[derive(Clone, Debug, Default)]
pub struct InputDomain {
    restricted: BTreeMap<Nid, Vec<u64>>,
}

impl InputDomain {
    pub fn full() -> Self {
        Self::default()
    }

    pub fn restrict(mut self, nid: Nid, values: Vec<u64>) -> Self {
        self.restricted.insert(nid, values);
        self
    }

    fn values(&self, width: u32, nid: Nid) -> Domain {
        match self.restricted.get(&nid) {
            Some(values) => Domain::List(values.clone()),
            None => Domain::Full(width),
        }
    }
}

enum Domain {
    List(Vec<u64>),
    Full(u32),
}

impl Domain {
    fn len(&self) -> u64 {
        match self {
            Domain::List(v) => v.len() as u64,
            Domain::Full(w) if *w >= 63 => u64::MAX / 2,
            Domain::Full(w) => 1 << w,
        }
    }

    fn get(&self, index: u64) -> u64 {
        match self {
            Domain::List(v) => v[index as usize],
            Domain::Full(_) => index,
        }
    }
}

fn product(domains: &[(Nid, u32, Domain)]) -> u64 {
    domains.iter().fold(1u64, |acc, (_, _, d)| acc.saturating_mul(d.len()))
}

/// An input sequence together with the first step at which some bad holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reached {
    pub step: usize,
    /// Bads holding at `step`.
    pub bads: Vec<Nid>,
    /// Inputs for steps `0..=step`, plus initial values of uninitialized states.
    pub witness: Witness,
}

struct Search<'a> {
    model: &'a TransitionModel,
    inputs: Vec<(Nid, u32, Domain)>,
    bound: usize,
    limit: u64,
    evaluations: u64,
    found: Vec<Reached>,
}

impl Search<'_> {
    fn assignment(&self, mut index: u64) -> BTreeMap<Nid, BitVecValue> {
        let mut out = BTreeMap::new();
        for (nid, width, domain) in &self.inputs {
            out.insert(*nid, BitVecValue::new(*width, domain.get(index % domain.len())));
            index /= domain.len();
        }
        out
    }

    /// Extends `prefix` by every input assignment. A prefix that hits a bad
    /// is reported and not extended further.
    fn dfs(
        &mut self,
        initial: &BTreeMap<Nid, Value>,
        state: &SimState,
        prefix: &mut Vec<BTreeMap<Nid, BitVecValue>>,
    ) -> Result<(), ReachError> {
        let depth = prefix.len();
        for index in 0..product(&self.inputs) {
            self.evaluations += 1;
            if self.evaluations > self.limit {
                return Err(ReachError::LimitExceeded(self.limit));
            }
            let inputs = self.assignment(index);
            let step = step_model(self.model, state, &inputs)?;
            prefix.push(inputs);
            let fired = step.fired();
            if !fired.is_empty() {
                self.found.push(Reached {
                    step: depth,
                    bads: fired,
                    witness: Witness {
                        initial: initial.clone(),
                        steps: prefix.clone(),
                    },
                });
            } else if depth < self.bound {
                self.dfs(initial, &step.next, prefix)?;
            }
            prefix.pop();
        }
        Ok(())
    }
}

/// Enumerates every input sequence (and every value of uninitialized states)
/// for up to `bound` transitions. Returns each sequence that reaches a bad,
/// truncated at its first bad step. Results are ordered by step, then by
/// enumeration order.
///
/// `limit` bounds the number of step evaluations.
pub fn brute_force_reachability(
    model: &TransitionModel,
    bound: usize,
    domain: &InputDomain,
    limit: u64,
) -> Result<Vec<Reached>, ReachError> {
    let mut uninit = Vec::new();
    for nid in model.uninitialized_states() {
        match model.sort_of(nid).expect("states have sorts") {
            Sort::Bitvec(w) => uninit.push((nid, w, domain.values(w, nid))),
            Sort::Array { .. } => return Err(ReachError::UninitializedArray(nid)),
        }
    }
    let inputs = model
        .inputs()
        .iter()
        .map(|&nid| {
            let w = model.width_of(nid).expect("inputs are bit-vectors");
            (nid, w, domain.values(w, nid))
        })
        .collect();
    let mut search = Search {
        model,
        inputs,
        bound,
        limit,
        evaluations: 0,
        found: Vec::new(),
    };
    let initial_count = product(&uninit);
    if initial_count > limit {
        return Err(ReachError::LimitExceeded(limit));
    }
    for mut index in 0..initial_count {
        let mut values = BTreeMap::new();
        for (nid, width, domain) in &uninit {
            values.insert(*nid, Value::Bv(BitVecValue::new(*width, domain.get(index % domain.len()))));
            index /= domain.len();
        }
        let state = SimState::initial(model, &values)?;
        search.dfs(&values, &state, &mut Vec::new())?;
    }
    search.found.sort_by_key(|r| r.step);
    Ok(search.found)
}

#[cfg(test)]
mod tests {
    use super::super::{parse_btor2, simulate};
    use super::*;

    #[test]
    fn guessing_a_nibble() {
        let text = "1 sort bitvec 4\n2 sort bitvec 1\n3 input 1 x\n4 constd 1 11\n5 eq 2 3 4\n6 bad 5\n";
        let m = parse_btor2(text).unwrap();
        let found = brute_force_reachability(&m, 1, &InputDomain::full(), DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(found.len(), 1 + 15);
        let r = &found[0];
        assert_eq!(r.step, 0);
        assert_eq!(r.witness.steps[0][&3].bits(), 11);
        assert_eq!(simulate(&m, &r.witness, 1).unwrap().first_bad, Some((0, vec![6])));
        assert!(found[1..].iter().all(|r| r.step == 1 && r.witness.steps[1][&3].bits() == 11));
    }

    #[test]
    fn unreachable_and_limit() {
        let text = "1 sort bitvec 4\n2 sort bitvec 1\n3 input 1 x\n4 state 1 s\n5 zero 1\n6 init 1 4 5\n\
                    7 next 1 4 4\n8 constd 1 11\n9 eq 2 4 8\n10 bad 9\n";
        let m = parse_btor2(text).unwrap();
        assert_eq!(
            brute_force_reachability(&m, 2, &InputDomain::full(), DEFAULT_ENUMERATION_LIMIT).unwrap(),
            vec![]
        );
        assert_eq!(
            brute_force_reachability(&m, 2, &InputDomain::full(), 10).unwrap_err(),
            ReachError::LimitExceeded(10)
        );
    }
}
