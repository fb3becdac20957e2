//! C interface to `bmcq`.
//!
//! Objects are opaque handles created by `*_parse`, `*_unroll` and `bmcq_solve_*`
//! and released with the matching `*_free`. Every fallible call returns a
//! [`BmcqStatus`]; on failure [`bmcq_last_error`] describes the problem. Strings
//! returned through `char **` out-parameters belong to the caller and must be
//! released with [`bmcq_string_free`].
//!
//! Handles are not synchronized. A handle may be shared between threads for
//! read-only calls (everything except `*_free`).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bmcq::beator::{assemble, translate_beator};
use bmcq::bitblast::BlastOptions;
use bmcq::btor2::{parse_btor2, print_btor2, simulate};
use bmcq::cli::WitnessFile;
use bmcq::solve::{solve_anneal, solve_exhaustive, AnnealParams, SolveResult};
use bmcq::{translate, TransitionModel, UnrollOptions, UnrolledModel};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BmcqStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    AssemblyError = 4,
    TranslationError = 5,
    UnrollError = 6,
    SolveError = 7,
    InvalidArgument = 8,
    Panic = 9,
}

/// A parsed or generated transition system.
pub struct BmcqModel {
    model: TransitionModel,
}

/// An unrolled model: the QUBO plus what is needed to decode its solutions.
pub struct BmcqQubo {
    unrolled: UnrolledModel,
    model: TransitionModel,
}

/// Best assignment found by a solver.
pub struct BmcqSolution {
    result: SolveResult,
}

struct Failure(BmcqStatus, String);

type FfiResult = Result<(), Failure>;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn guard(body: impl FnOnce() -> FfiResult) -> BmcqStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            BmcqStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal error: {message}"));
            BmcqStatus::Panic
        }
    }
}

fn fail(status: BmcqStatus) -> impl FnOnce(String) -> Failure {
    move |message| Failure(status, message)
}

unsafe fn borrow<'a, T>(handle: *const T, name: &str) -> Result<&'a T, Failure> {
    handle
        .as_ref()
        .ok_or_else(|| Failure(BmcqStatus::NullArgument, format!("{name} is null")))
}

unsafe fn text_arg<'a>(text: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if text.is_null() {
        return Err(Failure(BmcqStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|e| Failure(BmcqStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn put<T>(out: *mut T, value: T, name: &str) -> FfiResult {
    if out.is_null() {
        return Err(Failure(BmcqStatus::NullArgument, format!("{name} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, text: String) -> FfiResult {
    let owned = CString::new(text).map_err(|e| Failure(BmcqStatus::InvalidArgument, e.to_string()))?;
    put(out, owned.into_raw(), "out")
}

unsafe fn check_out<T>(out: *mut *mut T) -> FfiResult {
    if out.is_null() {
        return Err(Failure(BmcqStatus::NullArgument, "out is null".into()));
    }
    out.write(ptr::null_mut());
    Ok(())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn bmcq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Why the most recent call on this thread failed; empty after a success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn bmcq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `text` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bmcq_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Parses BTOR2 text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcq_model_parse(text: *const c_char, out: *mut *mut BmcqModel) -> BmcqStatus {
    guard(|| {
        check_out(out)?;
        let text = text_arg(text, "text")?;
        let model = parse_btor2(text).map_err(|e| fail(BmcqStatus::ParseError)(e.to_string()))?;
        put(out, Box::into_raw(Box::new(BmcqModel { model })), "out")
    })
}

/// Assembles RISC-U source and translates it into a model.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcq_model_from_assembly(source: *const c_char, out: *mut *mut BmcqModel) -> BmcqStatus {
    guard(|| {
        check_out(out)?;
        let source = text_arg(source, "source")?;
        let program = assemble(source).map_err(|e| fail(BmcqStatus::AssemblyError)(e.to_string()))?;
        let generated = translate_beator(&program).map_err(|e| fail(BmcqStatus::TranslationError)(e.to_string()))?;
        let model = parse_btor2(&generated.text).map_err(|e| fail(BmcqStatus::TranslationError)(e.to_string()))?;
        put(out, Box::into_raw(Box::new(BmcqModel { model })), "out")
    })
}

/// Prints the model as BTOR2.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcq_model_to_btor2(model: *const BmcqModel, out: *mut *mut c_char) -> BmcqStatus {
    guard(|| {
        check_out(out)?;
        let model = borrow(model, "model")?;
        put_string(out, print_btor2(&model.model))
    })
}

/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bmcq_model_free(model: *mut BmcqModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Unrolls `model` for `bound` transitions. `pin_strength` must be positive.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcq_qubo_unroll(
    model: *const BmcqModel,
    bound: usize,
    pin_strength: i64,
    out: *mut *mut BmcqQubo,
) -> BmcqStatus {
    guard(|| {
        check_out(out)?;
        let model = borrow(model, "model")?;
        if pin_strength < 1 {
            return Err(Failure(BmcqStatus::InvalidArgument, "pin_strength must be positive".into()));
        }
        let options = UnrollOptions {
            blast: BlastOptions { pin_strength, ..BlastOptions::default() },
        };
        let unrolled =
            translate(&model.model, bound, options).map_err(|e| fail(BmcqStatus::UnrollError)(e.to_string()))?;
        let qubo = BmcqQubo { unrolled, model: model.model.clone() };
        put(out, Box::into_raw(Box::new(qubo)), "out")
    })
}

/// Number of binary variables.
///
/// # Safety
/// `qubo` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcq_qubo_num_vars(qubo: *const BmcqQubo, out: *mut usize) -> BmcqStatus {
    guard(|| {
        let qubo = borrow(qubo, "qubo")?;
        put(out, qubo.unrolled.bqm.num_vars(), "out")
    })
}

/// Writes the QUBO in the text format read by `bmcq solve`.
///
/// # Safety
/// `qubo` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcq_qubo_to_text(qubo: *const BmcqQubo, out: *mut *mut c_char) -> BmcqStatus {
    guard(|| {
        check_out(out)?;
        let qubo = borrow(qubo, "qubo")?;
        put_string(out, bmcq::cli::QuboFile::from_unrolled(&qubo.unrolled, &qubo.model).write())
    })
}

/// Energy of `assignment`, one byte per variable (nonzero is 1).
///
/// # Safety
/// `qubo` must be a live handle; `assignment` must point to `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn bmcq_qubo_energy(
    qubo: *const BmcqQubo,
    assignment: *const u8,
    len: usize,
    out: *mut i64,
) -> BmcqStatus {
    guard(|| {
        let qubo = borrow(qubo, "qubo")?;
        if assignment.is_null() && len > 0 {
            return Err(Failure(BmcqStatus::NullArgument, "assignment is null".into()));
        }
        let bits: Vec<bool> = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(assignment, len).iter().map(|&b| b != 0).collect()
        };
        let energy = qubo
            .unrolled
            .bqm
            .evaluate_energy(&bits)
            .map_err(|e| fail(BmcqStatus::InvalidArgument)(e.to_string()))?;
        put(out, energy, "out")
    })
}

/// # Safety
/// `qubo` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bmcq_qubo_free(qubo: *mut BmcqQubo) {
    if !qubo.is_null() {
        drop(Box::from_raw(qubo));
    }
}

/// Exact minimum by enumeration. Fails when the QUBO has more free
/// variables than `var_limit`.
///
/// # Safety
/// `qubo` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcq_solve_exhaustive(
    qubo: *const BmcqQubo,
    var_limit: usize,
    out: *mut *mut BmcqSolution,
) -> BmcqStatus {
    guard(|| {
        check_out(out)?;
        let qubo = borrow(qubo, "qubo")?;
        let result =
            solve_exhaustive(&qubo.unrolled.bqm, var_limit).map_err(|e| fail(BmcqStatus::SolveError)(e.to_string()))?;
        put(out, Box::into_raw(Box::new(BmcqSolution { result })), "out")
    })
}

/// Simulated annealing; deterministic for a given seed.
///
/// # Safety
/// `qubo` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcq_solve_anneal(
    qubo: *const BmcqQubo,
    seed: u64,
    sweeps: u32,
    restarts: u32,
    out: *mut *mut BmcqSolution,
) -> BmcqStatus {
    guard(|| {
        check_out(out)?;
        let qubo = borrow(qubo, "qubo")?;
        if sweeps == 0 || restarts == 0 {
            return Err(Failure(BmcqStatus::InvalidArgument, "sweeps and restarts must be positive".into()));
        }
        let params = AnnealParams { sweeps, restarts, ..AnnealParams::with_seed(seed) };
        let result = solve_anneal(&qubo.unrolled.bqm, &params);
        put(out, Box::into_raw(Box::new(BmcqSolution { result })), "out")
    })
}

/// # Safety
/// `solution` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcq_solution_energy(solution: *const BmcqSolution, out: *mut i64) -> BmcqStatus {
    guard(|| {
        let solution = borrow(solution, "solution")?;
        put(out, solution.result.energy, "out")
    })
}

/// Copies the assignment into `buffer`, which must hold exactly as many
/// bytes as the QUBO has variables.
///
/// # Safety
/// `solution` must be a live handle; `buffer` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bmcq_solution_assignment(
    solution: *const BmcqSolution,
    buffer: *mut u8,
    len: usize,
) -> BmcqStatus {
    guard(|| {
        let solution = borrow(solution, "solution")?;
        let bits = &solution.result.assignment;
        if len != bits.len() {
            return Err(Failure(
                BmcqStatus::InvalidArgument,
                format!("buffer holds {len} bytes, assignment has {}", bits.len()),
            ));
        }
        if len > 0 {
            if buffer.is_null() {
                return Err(Failure(BmcqStatus::NullArgument, "buffer is null".into()));
            }
            for (i, &bit) in bits.iter().enumerate() {
                buffer.add(i).write(bit as u8);
            }
        }
        Ok(())
    })
}

/// Decodes the solution into an input witness, replays it in the simulator
/// and writes it in the witness text format. `bad` receives the first step at
/// which the replay hits a bad state, or -1.
///
/// # Safety
/// Both handles must be live and `solution` must come from `qubo`;
/// `out` and `bad` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmcq_solution_witness(
    solution: *const BmcqSolution,
    qubo: *const BmcqQubo,
    bad: *mut i64,
    out: *mut *mut c_char,
) -> BmcqStatus {
    guard(|| {
        check_out(out)?;
        let solution = borrow(solution, "solution")?;
        let qubo = borrow(qubo, "qubo")?;
        let bits = &solution.result.assignment;
        if bits.len() != qubo.unrolled.bqm.num_vars() {
            return Err(Failure(BmcqStatus::InvalidArgument, "solution does not belong to this qubo".into()));
        }
        let witness = qubo.unrolled.decode_witness(&qubo.model, bits);
        let bound = qubo.unrolled.bound();
        let replay = simulate(&qubo.model, &witness, bound).map_err(|e| fail(BmcqStatus::SolveError)(e.to_string()))?;
        let step = replay.first_bad.as_ref().map_or(-1, |(step, _)| *step as i64);
        let file = WitnessFile::from_witness(&witness, bound, Some(solution.result.energy), replay.first_bad);
        put(bad, step, "bad")?;
        put_string(out, file.write())
    })
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bmcq_solution_free(solution: *mut BmcqSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}
