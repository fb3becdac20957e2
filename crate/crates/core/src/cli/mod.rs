//! Command-line front end. Exit status 0 is success, 1 means no witness at
//! the bound (or a witness that does not validate), 2 a usage or input error.
//! Diagnostics go to the error stream.
//!
//! Defaults for the exhaustive variable limit and the array expansion limit
//! can be set with `BMCQ_VAR_LIMIT` and `BMCQ_EXPANSION_LIMIT`.

mod formats;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use formats::{FormatError, InitValue, QuboFile, WitnessFile};

use crate::beator::{self, BeatorModel, OutcomeKind, RiscUProgram};
use crate::bitblast::BlastOptions;
use crate::btor2::{parse_btor2, simulate, Nid, TransitionModel};
use crate::solve::{self, AnnealParams, SolveResult, DEFAULT_VAR_LIMIT};
use crate::unroll::{translate, UnrollOptions, UnrolledModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_WITNESS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "bmcq", version, about = "Bounded model checking through QUBO models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Assemble RISC-U code and print a listing with the memory layout.
    Assemble {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run RISC-U code on concrete input.
    Emulate {
        file: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        /// Maximum number of instructions.
        #[arg(long, default_value_t = 100_000)]
        limit: usize,
        /// Write the model inputs of a failing run as a witness file.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Translate RISC-U code into a BTOR2 model.
    Beator {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Unroll a BTOR2 model into a QUBO file.
    Qubot {
        model: PathBuf,
        #[arg(long)]
        bound: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        unroll: UnrollArgs,
    },
    /// Minimize a QUBO file and write the witness if the energy is 0.
    Solve {
        qubo: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a witness on a QUBO file or model and replay it in the simulator.
    Validate {
        /// QUBO file, BTOR2 model or RISC-U assembly.
        file: PathBuf,
        witness: PathBuf,
        /// Model to simulate when `file` is a QUBO file.
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        unroll: UnrollArgs,
    },
    /// Per-step variable counts as CSV.
    Stats {
        model: PathBuf,
        #[arg(long)]
        bound: usize,
        #[command(flatten)]
        unroll: UnrollArgs,
    },
    /// Translate, unroll, solve and validate in one go.
    Pipeline {
        /// BTOR2 model or RISC-U assembly (`.s`).
        file: PathBuf,
        #[arg(long)]
        bound: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        unroll: UnrollArgs,
        /// Directory for the intermediate artifacts.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Input bytes given literally.
    #[arg(long, conflicts_with = "input_file")]
    input: Option<String>,
    #[arg(long)]
    input_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct UnrollArgs {
    /// Pin strength for constraints.
    #[arg(long, default_value_t = 1)]
    strength: i64,
    /// Largest array index width expanded into words.
    #[arg(long, env = "BMCQ_EXPANSION_LIMIT")]
    expansion_limit: Option<u32>,
    /// Leave zero divisors unsatisfiable instead of following RISC-V.
    #[arg(long)]
    strict_division: bool,
}

impl UnrollArgs {
    fn options(&self) -> Result<UnrollOptions> {
        if self.strength < 1 {
            bail!("--strength must be positive");
        }
        let defaults = BlastOptions::default();
        Ok(UnrollOptions {
            blast: BlastOptions {
                pin_strength: self.strength,
                guard_zero_divisor: !self.strict_division,
                expansion_limit: self.expansion_limit.unwrap_or(defaults.expansion_limit),
            },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Exhaustive,
    Anneal,
    /// Assembly only: validate every single-byte input.
    Scan,
    /// Exhaustive within the variable limit, otherwise scan for assembly and
    /// anneal for BTOR2 models.
    Auto,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
    /// Required whenever annealing runs.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sweeps: Option<u32>,
    #[arg(long)]
    restarts: Option<u32>,
    #[arg(long, env = "BMCQ_VAR_LIMIT", default_value_t = DEFAULT_VAR_LIMIT)]
    var_limit: usize,
}

impl SolverArgs {
    fn anneal_params(&self) -> Result<AnnealParams> {
        let seed = self.seed.context("annealing needs --seed")?;
        let mut params = AnnealParams::with_seed(seed);
        if let Some(s) = self.sweeps {
            params.sweeps = s;
        }
        if let Some(r) = self.restarts {
            params.restarts = r;
        }
        Ok(params)
    }

    /// `None` when the resolved method is `Scan`, which the pipeline runs.
    fn solve(&self, qubo: &crate::BinaryQuadraticModel, assembly: bool) -> Result<(Option<SolveResult>, Method)> {
        let method = match self.method {
            Method::Auto if qubo.num_vars() <= self.var_limit => Method::Exhaustive,
            Method::Auto if assembly => Method::Scan,
            Method::Auto => Method::Anneal,
            m => m,
        };
        let result = match method {
            Method::Exhaustive => solve::solve_exhaustive(qubo, self.var_limit)?,
            Method::Anneal => solve::solve_anneal(qubo, &self.anneal_params()?),
            Method::Scan | Method::Auto => return Ok((None, Method::Scan)),
        };
        Ok((Some(result), method))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn is_assembly(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("s" | "S" | "asm"))
}

fn load_program(path: &Path) -> Result<RiscUProgram> {
    beator::assemble(&read(path)?).with_context(|| format!("in {}", path.display()))
}

/// A model loaded from BTOR2 text or generated from assembly.
struct Loaded {
    model: TransitionModel,
    text: String,
    program: Option<(RiscUProgram, BeatorModel)>,
}

fn load_model(path: &Path) -> Result<Loaded> {
    if is_assembly(path) {
        let program = load_program(path)?;
        let beator = beator::translate_beator(&program)?;
        let model = parse_btor2(&beator.text).context("generated model does not parse")?;
        return Ok(Loaded { model, text: beator.text.clone(), program: Some((program, beator)) });
    }
    let text = read(path)?;
    let model = parse_btor2(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(Loaded { model, text, program: None })
}

fn bad_names(model: Option<&TransitionModel>, nids: &[Nid]) -> String {
    nids.iter()
        .map(|&n| model.and_then(|m| m.symbol(n)).map_or(n.to_string(), str::to_string))
        .collect::<Vec<_>>()
        .join(",")
}

fn input_bytes(args: &InputArgs) -> Result<Vec<u8>> {
    match (&args.input, &args.input_file) {
        (Some(s), _) => Ok(s.as_bytes().to_vec()),
        (None, Some(p)) => std::fs::read(p).with_context(|| format!("cannot read {}", p.display())),
        (None, None) => Ok(Vec::new()),
    }
}

fn listing(program: &RiscUProgram) -> String {
    let l = &program.layout;
    let mut s = String::new();
    s += &format!("; code  {:#x}..{:#x}\n", l.code_start, l.code_end);
    s += &format!("; data  {:#x}..{:#x}\n", l.data_start, l.data_end);
    s += &format!("; heap  {:#x}, allowed end {:#x}\n", l.heap_start, l.allowed_heap_end);
    s += &format!("; stack {:#x}, allowed start {:#x}\n", l.initial_sp, l.allowed_stack_start);
    for (i, ins) in program.code.iter().enumerate() {
        s += &format!("{:#x} {ins}\n", l.code_start + 4 * i as u32);
    }
    for (i, w) in program.data.iter().enumerate() {
        s += &format!("{:#x} .word {w}\n", l.data_start + 4 * i as u32);
    }
    s
}

fn unroll(model: &TransitionModel, bound: usize, args: &UnrollArgs) -> Result<UnrolledModel> {
    Ok(translate(model, bound, args.options()?)?)
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Assemble { file, output } => {
            emit(output.as_deref(), &listing(&load_program(&file)?), out)?;
            Ok(EXIT_OK)
        }
        Command::Emulate { file, input, limit, witness } => {
            let program = load_program(&file)?;
            let outcome = beator::emulate(&program, &input_bytes(&input)?, limit)?;
            let n = outcome.instructions_executed;
            match &outcome.kind {
                OutcomeKind::Exit(code) => writeln!(out, "exit {code} instructions {n} steps {}", outcome.model_steps)?,
                OutcomeKind::Bad { labels, step } => {
                    writeln!(out, "bad {} step {step} instructions {n}", labels.join(","))?;
                    if let Some(path) = witness {
                        let beator = beator::translate_beator(&program)?;
                        let bads = labels.iter().map(|l| beator.bads[l]).collect();
                        let file = WitnessFile::from_witness(&outcome.witness(), *step, None, Some((*step, bads)));
                        emit(Some(&path), &file.write(), out)?;
                    }
                }
                OutcomeKind::StepLimit => writeln!(out, "step-limit instructions {n}")?,
            }
            Ok(EXIT_OK)
        }
        Command::Beator { file, output } => {
            let beator = beator::translate_beator(&load_program(&file)?)?;
            emit(output.as_deref(), &beator.text, out)?;
            Ok(EXIT_OK)
        }
        Command::Qubot { model, bound, output, unroll: args } => {
            let loaded = load_model(&model)?;
            let unrolled = unroll(&loaded.model, bound, &args)?;
            emit(output.as_deref(), &QuboFile::from_unrolled(&unrolled, &loaded.model).write(), out)?;
            Ok(EXIT_OK)
        }
        Command::Solve { qubo, solver, output } => {
            let qubo = QuboFile::parse(&read(&qubo)?)?;
            if solver.method == Method::Scan {
                bail!("--method scan needs assembly input; use `pipeline`");
            }
            let (result, method) = solver.solve(&qubo.bqm, false)?;
            let result = result.expect("scan is rejected above");
            writeln!(out, "energy {} method {method:?} samples {}", result.energy, result.samples)?;
            if result.energy != 0 {
                writeln!(err, "no witness at bound {}", qubo.bound)?;
                return Ok(EXIT_NO_WITNESS);
            }
            let witness = qubo.decode(&result.assignment);
            let file = WitnessFile::from_witness(&witness, qubo.bound, Some(0), qubo.first_bad(&result.assignment));
            emit(output.as_deref(), &file.write(), out)?;
            Ok(EXIT_OK)
        }
        Command::Validate { file, witness, model, unroll: args } => {
            let witness_file = WitnessFile::parse(&read(&witness)?)?;
            let text = if is_assembly(&file) { String::new() } else { read(&file)? };
            let (energy, sim_model) = if text.trim_start().starts_with("qubo") {
                let qubo = QuboFile::parse(&text)?;
                let w = witness_file.for_qubo(&qubo)?;
                let assignment = qubo.bqm.forward_assignment(&qubo.free_values(&w))?;
                let energy = qubo.bqm.evaluate_energy(&assignment)?;
                (energy, model.map(|m| load_model(&m)).transpose()?)
            } else {
                let loaded = load_model(&file)?;
                let unrolled = unroll(&loaded.model, witness_file.bound, &args)?;
                let w = witness_file.for_model(&loaded.model)?;
                let v = solve::validate_on_input(&unrolled, &loaded.model, &w)?;
                (v.energy, Some(loaded))
            };
            writeln!(out, "energy {energy}")?;
            let mut agrees = true;
            if let Some(loaded) = sim_model {
                let w = witness_file.for_model(&loaded.model)?;
                let bad = simulate(&loaded.model, &w, witness_file.bound)?.first_bad;
                match &bad {
                    Some((step, nids)) => {
                        writeln!(out, "simulator bad {} step {step}", bad_names(Some(&loaded.model), nids))?
                    }
                    None => writeln!(out, "simulator no bad within bound {}", witness_file.bound)?,
                }
                agrees = (energy == 0) == bad.is_some();
                writeln!(out, "agreement {}", if agrees { "yes" } else { "no" })?;
            }
            Ok(if energy == 0 && agrees { EXIT_OK } else { EXIT_NO_WITNESS })
        }
        Command::Stats { model, bound, unroll: args } => {
            let loaded = load_model(&model)?;
            let unrolled = unroll(&loaded.model, bound, &args)?;
            writeln!(out, "step,new_vars,cumulative_vars,nonconstant_pc_flags")?;
            for s in unrolled.frame_stats() {
                writeln!(out, "{},{},{},{}", s.step, s.new_vars, s.cumulative_vars, s.nonconstant_pc_flags)?;
            }
            Ok(EXIT_OK)
        }
        Command::Pipeline { file, bound, solver, unroll: args, out_dir } => {
            pipeline(&file, bound, &solver, &args, out_dir.as_deref(), out, err)
        }
    }
}

fn pipeline(
    file: &Path,
    bound: usize,
    solver: &SolverArgs,
    args: &UnrollArgs,
    out_dir: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let loaded = load_model(file)?;
    let model = &loaded.model;
    let unrolled = unroll(model, bound, args)?;
    let qubo = QuboFile::from_unrolled(&unrolled, model);
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        std::fs::write(dir.join("model.btor2"), &loaded.text)?;
        std::fs::write(dir.join("model.qubo"), qubo.write())?;
    }
    writeln!(out, "variables {} bound {bound}", unrolled.bqm.num_vars())?;

    if solver.method == Method::Scan && loaded.program.is_none() {
        bail!("--method scan needs assembly input");
    }
    let (result, method) = solver.solve(&unrolled.bqm, loaded.program.is_some())?;
    let (witness, energy) = if let Some(result) = result {
        (unrolled.decode_witness(model, &result.assignment), result.energy)
    } else {
        let (program, _) = loaded.program.as_ref().expect("scan requires assembly");
        let mut found = None;
        for byte in 0..=255u8 {
            let outcome = beator::emulate(program, &[byte], 100 * (bound + 1))?;
            let witness = outcome.witness();
            let v = solve::validate_on_input(&unrolled, model, &witness)?;
            if v.energy == 0 {
                found = Some((witness, 0));
                break;
            }
        }
        match found {
            Some(f) => f,
            None => {
                writeln!(out, "method Scan: no single-byte input reaches a bad state")?;
                return Ok(EXIT_NO_WITNESS);
            }
        }
    };
    writeln!(out, "method {method:?} energy {energy}")?;
    if energy != 0 {
        writeln!(err, "no witness at bound {bound}")?;
        return Ok(EXIT_NO_WITNESS);
    }

    let v = solve::validate_on_input(&unrolled, model, &witness)?;
    let file_out = WitnessFile::from_witness(&witness, bound, Some(v.energy), v.simulator_bad.clone());
    if let Some(dir) = out_dir {
        std::fs::write(dir.join("witness.txt"), file_out.write())?;
    }
    match &v.simulator_bad {
        Some((step, nids)) => writeln!(out, "simulator bad {} step {step}", bad_names(Some(model), nids))?,
        None => writeln!(out, "simulator no bad within bound")?,
    }
    if let Some((_, beator)) = &loaded.program {
        let trace = simulate(model, &witness, bound)?.trace;
        let bytes = beator.read_bytes(&trace, &witness);
        let list: Vec<String> = bytes.iter().map(|b| b.to_string()).collect();
        writeln!(out, "input bytes {}", list.join(" "))?;
    }
    if !v.agrees {
        writeln!(err, "witness does not validate in the simulator")?;
        return Ok(EXIT_NO_WITNESS);
    }
    writeln!(out, "validated")?;
    Ok(EXIT_OK)
}
