//! Classical solving and analysis of QUBO models.
//!
//! Ties between assignments of equal energy are broken lexicographically,
//! reading the assignment as a bit string with variable 0 first.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bqm::{BinaryQuadraticModel, VarId};
use crate::btor2::{simulate, Nid, SimError, TransitionModel, Witness};
use crate::unroll::{translate, UnrollError, UnrollOptions, UnrolledModel};

/// Default variable limit of [`solve_exhaustive`].
pub const DEFAULT_VAR_LIMIT: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("model has {vars} variables, more than the exhaustive limit {limit}")]
    VarLimit { vars: usize, limit: usize },
    #[error(transparent)]
    Unroll(#[from] UnrollError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub energy: i64,
    pub assignment: Vec<bool>,
    /// Assignments (exhaustive) or sweeps (annealing) evaluated.
    pub samples: u64,
    pub seed: Option<u64>,
}

/// Compares assignments as bit strings, variable 0 first.
fn lex(a: &[bool], b: &[bool]) -> Ordering {
    a.cmp(b)
}

fn better(energy: i64, assignment: &[bool], best: &SolveResult) -> bool {
    (energy, assignment).cmp(&(best.energy, &best.assignment[..])) == Ordering::Less
}

/// Adjacency form for incremental energy updates.
struct Dense {
    offset: i64,
    linear: Vec<i64>,
    neighbours: Vec<Vec<(u32, i64)>>,
}

impl Dense {
    fn new(bqm: &BinaryQuadraticModel) -> Self {
        let n = bqm.num_vars();
        let mut neighbours = vec![Vec::new(); n];
        for (u, v, c) in bqm.quadratic_terms() {
            neighbours[u.index()].push((v.0, c));
            neighbours[v.index()].push((u.0, c));
        }
        Dense {
            offset: bqm.offset(),
            linear: (0..n).map(|i| bqm.linear(VarId(i as u32))).collect(),
            neighbours,
        }
    }

    fn energy(&self, x: &[bool]) -> i64 {
        let mut e = self.offset;
        for (i, &xi) in x.iter().enumerate() {
            if xi {
                e += self.linear[i];
                for &(j, c) in &self.neighbours[i] {
                    if (j as usize) > i && x[j as usize] {
                        e += c;
                    }
                }
            }
        }
        e
    }

    /// Local fields: energy change of setting `i` from 0 to 1.
    fn fields(&self, x: &[bool]) -> Vec<i64> {
        (0..x.len())
            .map(|i| {
                self.linear[i]
                    + self.neighbours[i]
                        .iter()
                        .filter(|(j, _)| x[*j as usize])
                        .map(|&(_, c)| c)
                        .sum::<i64>()
            })
            .collect()
    }

    fn flip(&self, x: &mut [bool], fields: &mut [i64], i: usize) -> i64 {
        let delta = if x[i] { -fields[i] } else { fields[i] };
        x[i] = !x[i];
        let sign = if x[i] { 1 } else { -1 };
        for &(j, c) in &self.neighbours[i] {
            fields[j as usize] += sign * c;
        }
        delta
    }
}

/// Global minimum by Gray-code enumeration of all assignments.
pub fn solve_exhaustive(bqm: &BinaryQuadraticModel, var_limit: usize) -> Result<SolveResult, SolveError> {
    let n = bqm.num_vars();
    if n > var_limit || n >= 63 {
        return Err(SolveError::VarLimit { vars: n, limit: var_limit });
    }
    let dense = Dense::new(bqm);
    let mut x = vec![false; n];
    let mut fields = dense.fields(&x);
    let mut energy = dense.offset;
    let mut best = SolveResult {
        energy,
        assignment: x.clone(),
        samples: 1,
        seed: None,
    };
    let total = 1u64 << n;
    for k in 1..total {
        let i = k.trailing_zeros() as usize;
        energy += dense.flip(&mut x, &mut fields, i);
        if energy < best.energy || (energy == best.energy && lex(&x, &best.assignment) == Ordering::Less) {
            best.energy = energy;
            best.assignment.copy_from_slice(&x);
        }
    }
    best.samples = total;
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealParams {
    pub sweeps: u32,
    pub restarts: u32,
    pub initial_temperature: f64,
    pub final_temperature: f64,
    pub seed: u64,
}

impl AnnealParams {
    pub fn with_seed(seed: u64) -> Self {
        AnnealParams {
            sweeps: 1000,
            restarts: 16,
            initial_temperature: 10.0,
            final_temperature: 0.05,
            seed,
        }
    }
}

fn anneal_once(dense: &Dense, params: &AnnealParams, restart: u32) -> SolveResult {
    let n = dense.linear.len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(restart as u64);
    let mut x: Vec<bool> = (0..n).map(|_| rng.random()).collect();
    let mut fields = dense.fields(&x);
    let mut energy = dense.energy(&x);
    let mut best = SolveResult {
        energy,
        assignment: x.clone(),
        samples: 0,
        seed: Some(params.seed),
    };
    let ratio = if params.sweeps > 1 {
        (params.final_temperature / params.initial_temperature).powf(1.0 / (params.sweeps - 1) as f64)
    } else {
        1.0
    };
    let mut temperature = params.initial_temperature;
    for _ in 0..params.sweeps {
        if best.energy <= 0 {
            break;
        }
        best.samples += 1;
        for i in 0..n {
            let delta = if x[i] { -fields[i] } else { fields[i] };
            if delta <= 0 || rng.random::<f64>() < (-(delta as f64) / temperature).exp() {
                energy += dense.flip(&mut x, &mut fields, i);
                if better(energy, &x, &best) {
                    best.energy = energy;
                    best.assignment.copy_from_slice(&x);
                }
            }
        }
        temperature *= ratio;
    }
    best
}

/// Simulated annealing with independent restarts run in parallel. The
/// result only depends on the model and `params`.
pub fn solve_anneal(bqm: &BinaryQuadraticModel, params: &AnnealParams) -> SolveResult {
    let dense = Dense::new(bqm);
    let runs: Vec<SolveResult> = (0..params.restarts.max(1))
        .into_par_iter()
        .map(|r| anneal_once(&dense, params, r))
        .collect();
    let samples = runs.iter().map(|r| r.samples).sum();
    let mut best = runs
        .into_iter()
        .min_by(|a, b| (a.energy, &a.assignment).cmp(&(b.energy, &b.assignment)))
        .expect("at least one restart");
    best.samples = samples;
    best
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    /// Energy of the forward assignment implied by the witness.
    pub energy: i64,
    /// First bad step and the bads holding there, per the simulator.
    pub simulator_bad: Option<(usize, Vec<Nid>)>,
    /// Whether `energy == 0` coincides with the simulator reaching a bad.
    pub agrees: bool,
}

/// Evaluates the QUBO on the witness and replays the witness in the simulator.
pub fn validate_on_input(
    unrolled: &UnrolledModel,
    model: &TransitionModel,
    witness: &Witness,
) -> Result<Validation, SolveError> {
    let assignment = unrolled.assignment_for(model, witness)?;
    let energy = unrolled.bqm.evaluate_energy(&assignment).expect("forward assignment is complete");
    let simulator_bad = simulate(model, witness, unrolled.bound())?.first_bad;
    Ok(Validation {
        energy,
        agrees: (energy == 0) == simulator_bad.is_some(),
        simulator_bad,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitStatus {
    /// One value on every input.
    Determined(bool),
    /// One value on every input tried, but not all inputs were tried.
    Approximated(bool),
    /// Both values observed.
    Superposition,
    /// Nothing observed.
    Undetermined,
}

impl QubitStatus {
    /// Neither determined nor in superposition.
    pub fn is_undetermined(self) -> bool {
        matches!(self, QubitStatus::Approximated(_) | QubitStatus::Undetermined)
    }
}

/// Classifies every variable from one shared enumeration of free-variable
/// assignments in counting order, spending at most `budget` forward passes.
pub fn classify_qubits(bqm: &BinaryQuadraticModel, budget: u64) -> Vec<QubitStatus> {
    let free = bqm.free_vars();
    let total = if free.len() < 64 { 1u64 << free.len() } else { u64::MAX };
    let calls = budget.min(total);
    let complete = calls == total && free.len() < 64;
    let n = bqm.num_vars();
    let mut seen = vec![[false; 2]; n];
    let mut x = vec![false; n];
    for k in 0..calls {
        for (m, v) in free.iter().enumerate() {
            x[v.index()] = m < 64 && (k >> m) & 1 == 1;
        }
        bqm.forward_fill(&mut x);
        for (i, &b) in x.iter().enumerate() {
            seen[i][b as usize] = true;
        }
    }
    let mut status: Vec<QubitStatus> = seen
        .iter()
        .map(|s| match (s[0], s[1]) {
            (true, true) => QubitStatus::Superposition,
            (false, false) => QubitStatus::Undetermined,
            (zero, _) if complete => QubitStatus::Determined(!zero),
            (zero, _) => QubitStatus::Approximated(!zero),
        })
        .collect();
    for v in free {
        status[v.index()] = QubitStatus::Superposition;
    }
    status
}

/// Qubit counts of one unrolled model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitCounts {
    /// Variables that are not determined.
    pub total: usize,
    /// Variables that are neither determined nor in superposition.
    pub undetermined: usize,
}

pub fn qubit_counts(status: &[QubitStatus]) -> QubitCounts {
    QubitCounts {
        total: status.iter().filter(|s| !matches!(s, QubitStatus::Determined(_))).count(),
        undetermined: status.iter().filter(|s| s.is_undetermined()).count(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Advantage {
    /// `q = C - |Q_i|` qubits and `n` transitions past step `i`.
    Positive { i: usize, n: usize, q: usize },
    /// Capacity ran out at bound `exhausted_at` before index `i` was found.
    /// `n` and `q` are measured from bound 0.
    Negative { exhausted_at: usize, n: i64, q: i64 },
    /// `max_n` was reached before the defining indices were found.
    NotFound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdvantageReport {
    pub outcome: Advantage,
    /// Counts for bounds `0, 1, …` as far as they were computed.
    pub counts: Vec<QubitCounts>,
}

/// Quantum advantage for capacity `capacity` and per-model budget `budget`,
/// unrolling at most `max_n` transitions.
pub fn compute_quantum_advantage(
    model: &TransitionModel,
    capacity: usize,
    budget: u64,
    max_n: usize,
    options: UnrollOptions,
) -> Result<AdvantageReport, SolveError> {
    let mut counts = Vec::new();
    let count = |k: usize, counts: &mut Vec<QubitCounts>| -> Result<QubitCounts, SolveError> {
        while counts.len() <= k {
            let unrolled = translate(model, counts.len(), options)?;
            counts.push(qubit_counts(&classify_qubits(&unrolled.bqm, budget)));
        }
        Ok(counts[k])
    };
    let mut i = None;
    for k in 0..=max_n {
        let current = count(k, &mut counts)?;
        if current.total > capacity {
            return Ok(AdvantageReport {
                outcome: Advantage::Negative {
                    exhausted_at: k,
                    n: k as i64 - 1,
                    q: capacity as i64 - counts[0].total as i64,
                },
                counts,
            });
        }
        if k < max_n && current.undetermined == 0 && count(k + 1, &mut counts)?.undetermined > 0 {
            i = Some(k);
            break;
        }
    }
    let Some(i) = i else {
        return Ok(AdvantageReport {
            outcome: Advantage::NotFound,
            counts,
        });
    };
    let base = counts[i].total;
    for k in i + 1..=max_n {
        if count(k, &mut counts)?.total > capacity {
            return Ok(AdvantageReport {
                outcome: Advantage::Positive {
                    i,
                    n: k - 1 - i,
                    q: capacity - base,
                },
                counts,
            });
        }
    }
    Ok(AdvantageReport {
        outcome: Advantage::NotFound,
        counts,
    })
}

/// Free-variable map for an assignment of every variable.
pub fn free_map(bqm: &BinaryQuadraticModel, assignment: &[bool]) -> HashMap<VarId, bool> {
    bqm.free_vars().iter().map(|&v| (v, assignment[v.index()])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bqm::Bit;

    #[test]
    fn not_gate_tie_break() {
        let mut m = BinaryQuadraticModel::new();
        let x = m.new_free_var();
        m.not(Bit::Var(x));
        let r = solve_exhaustive(&m, 24).unwrap();
        assert_eq!((r.energy, r.assignment), (0, vec![false, true]));
    }

    #[test]
    fn empty_model() {
        let mut m = BinaryQuadraticModel::new();
        m.add_offset(1);
        let r = solve_exhaustive(&m, 24).unwrap();
        assert_eq!((r.energy, r.assignment.len()), (1, 0));
        assert_eq!(solve_anneal(&m, &AnnealParams::with_seed(3)).energy, 1);
    }

    #[test]
    fn var_limit() {
        let mut m = BinaryQuadraticModel::new();
        for _ in 0..5 {
            m.new_free_var();
        }
        assert_eq!(solve_exhaustive(&m, 4).unwrap_err(), SolveError::VarLimit { vars: 5, limit: 4 });
    }

    #[test]
    fn zero_sweeps_keep_initial_sample() {
        let mut m = BinaryQuadraticModel::new();
        let x = m.new_free_var();
        m.not(Bit::Var(x));
        let params = AnnealParams {
            sweeps: 0,
            ..AnnealParams::with_seed(9)
        };
        let r = solve_anneal(&m, &params);
        assert!(r.energy >= 0);
        assert_eq!(r.energy, m.evaluate_energy(&r.assignment).unwrap());
    }
}
