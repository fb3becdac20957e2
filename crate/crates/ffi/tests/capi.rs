use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use bmcq_ffi::*;

const COUNTER3: &str = include_str!("../../core/tests/fixtures/counter3.btor2");
const GUESS4: &str = include_str!("../../core/tests/fixtures/guess4.btor2");

fn last_error() -> String {
    unsafe { CStr::from_ptr(bmcq_last_error()) }.to_string_lossy().into_owned()
}

fn parse(text: &str) -> *mut BmcqModel {
    let text = CString::new(text).unwrap();
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { bmcq_model_parse(text.as_ptr(), &mut model) }, BmcqStatus::Ok);
    model
}

fn unroll(model: *const BmcqModel, bound: usize) -> *mut BmcqQubo {
    let mut qubo = ptr::null_mut();
    assert_eq!(unsafe { bmcq_qubo_unroll(model, bound, 1, &mut qubo) }, BmcqStatus::Ok);
    qubo
}

fn take_string(text: *mut std::ffi::c_char) -> String {
    let owned = unsafe { CStr::from_ptr(text) }.to_string_lossy().into_owned();
    unsafe { bmcq_string_free(text) };
    owned
}

#[test]
fn guess4_round_trip() {
    let model = parse(GUESS4);
    let qubo = unroll(model, 0);
    let mut vars = 0usize;
    assert_eq!(unsafe { bmcq_qubo_num_vars(qubo, &mut vars) }, BmcqStatus::Ok);

    let mut solution = ptr::null_mut();
    assert_eq!(unsafe { bmcq_solve_exhaustive(qubo, 24, &mut solution) }, BmcqStatus::Ok);
    let mut energy = -1i64;
    assert_eq!(unsafe { bmcq_solution_energy(solution, &mut energy) }, BmcqStatus::Ok);
    assert_eq!(energy, 0);

    let mut bits = vec![0u8; vars];
    assert_eq!(unsafe { bmcq_solution_assignment(solution, bits.as_mut_ptr(), vars) }, BmcqStatus::Ok);
    let mut again = -1i64;
    assert_eq!(unsafe { bmcq_qubo_energy(qubo, bits.as_ptr(), vars, &mut again) }, BmcqStatus::Ok);
    assert_eq!(again, 0);

    let mut bad = -2i64;
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { bmcq_solution_witness(solution, qubo, &mut bad, &mut text) }, BmcqStatus::Ok);
    assert_eq!(bad, 0);
    let witness = take_string(text);
    assert!(witness.contains("step 0 3=10"), "{witness}");

    unsafe {
        bmcq_solution_free(solution);
        bmcq_qubo_free(qubo);
        bmcq_model_free(model);
    }
}

#[test]
fn counter3_unreachable_at_six() {
    let model = parse(COUNTER3);
    let qubo = unroll(model, 6);
    let mut solution = ptr::null_mut();
    assert_eq!(unsafe { bmcq_solve_anneal(qubo, 7, 10, 2, &mut solution) }, BmcqStatus::Ok);
    let mut energy = 0i64;
    unsafe { bmcq_solution_energy(solution, &mut energy) };
    assert_eq!(energy, 1);
    let mut bad = 0i64;
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { bmcq_solution_witness(solution, qubo, &mut bad, &mut text) }, BmcqStatus::Ok);
    assert_eq!(bad, -1);
    assert!(take_string(text).contains("bad none"));
    unsafe {
        bmcq_solution_free(solution);
        bmcq_qubo_free(qubo);
        bmcq_model_free(model);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut model = ptr::null_mut();
    let bad = CString::new("1 sort bitvec 1\n2 add 1 9 9\n").unwrap();
    assert_eq!(unsafe { bmcq_model_parse(bad.as_ptr(), &mut model) }, BmcqStatus::ParseError);
    assert!(model.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { bmcq_model_parse(ptr::null(), &mut model) }, BmcqStatus::NullArgument);
    assert_eq!(unsafe { bmcq_qubo_unroll(ptr::null(), 1, 1, &mut ptr::null_mut()) }, BmcqStatus::NullArgument);

    let source = CString::new("jalr t0,4(t1)").unwrap();
    assert_eq!(unsafe { bmcq_model_from_assembly(source.as_ptr(), &mut model) }, BmcqStatus::AssemblyError);

    let guess = parse(GUESS4);
    let mut qubo = ptr::null_mut();
    assert_eq!(unsafe { bmcq_qubo_unroll(guess, 0, 0, &mut qubo) }, BmcqStatus::InvalidArgument);
    let qubo = unroll(guess, 0);
    let mut energy = 0;
    assert_eq!(unsafe { bmcq_qubo_energy(qubo, [1u8].as_ptr(), 1, &mut energy) }, BmcqStatus::InvalidArgument);
    let mut solution = ptr::null_mut();
    assert_eq!(unsafe { bmcq_solve_exhaustive(qubo, 1, &mut solution) }, BmcqStatus::SolveError);
    assert!(last_error().contains("limit"));

    let mut vars = 0;
    assert_eq!(unsafe { bmcq_qubo_num_vars(qubo, &mut vars) }, BmcqStatus::Ok);
    assert!(last_error().is_empty());
    unsafe {
        bmcq_qubo_free(qubo);
        bmcq_model_free(guess);
        bmcq_model_free(ptr::null_mut());
        bmcq_string_free(ptr::null_mut());
    }
}

#[test]
fn assembly_model_prints_btor2() {
    let source = CString::new("addi a0,zero,1\naddi a7,zero,93\necall\n").unwrap();
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { bmcq_model_from_assembly(source.as_ptr(), &mut model) }, BmcqStatus::Ok);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { bmcq_model_to_btor2(model, &mut text) }, BmcqStatus::Ok);
    let btor2 = take_string(text);
    assert!(btor2.contains("kernel-mode"));
    assert!(btor2.contains(" b1"));
    let qubo_text = {
        let qubo = unroll(model, 2);
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { bmcq_qubo_to_text(qubo, &mut out) }, BmcqStatus::Ok);
        unsafe { bmcq_qubo_free(qubo) };
        take_string(out)
    };
    assert!(qubo_text.starts_with("qubo vars "));
    unsafe { bmcq_model_free(model) };
}

fn target_dir() -> PathBuf {
    // tests/<crate>/deps/<binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/bmcq.h");
    assert!(header.exists(), "build script did not write {}", header.display());
    let staticlib = target_dir().join("libbmcq_ffi.a");
    assert!(staticlib.exists(), "missing {}", staticlib.display());

    let work = std::env::temp_dir().join(format!("bmcq-capi-{}", std::process::id()));
    std::fs::create_dir_all(&work).unwrap();
    let program = work.join("main.c");
    std::fs::write(&program, include_str!("capi_main.c")).unwrap();
    let exe = work.join("main");
    let compiler = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&compiler)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&program)
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let run = Command::new(&exe).arg(manifest.join("../core/tests/fixtures/guess4.btor2")).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{stdout}{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(stdout.trim(), "energy 0 bad 0");
    std::fs::remove_dir_all(&work).ok();
}
