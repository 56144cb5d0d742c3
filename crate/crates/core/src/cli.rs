//! Command-line front end. Exit codes: 0 success or pass, 1 a failing
//! verdict, 2 usage, input or model errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::evariables::{self, EVariableSpec};
use crate::linalg::{self, c, ComplexMatrix, ComplexVector};
use crate::report::{Verdict, VerificationReport};
use crate::spin::{self, Direction, HalfInt, SpinSystem};
use crate::state_format::{self, StateRecord};
use crate::suite::{self, SuiteConfig};
use crate::symmetry::{self, FiniteSymmetryModel};
use crate::{qubit, spin_checks};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Directions within this distance of the unit sphere are rescaled onto it.
pub const DIRECTION_INPUT_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "qastate", version, about = "Question-and-answer quantum states and their verification")]
struct Cli {
    /// Write output to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spin states built from a direction and an answer
    #[command(subcommand)]
    Spin(SpinCommand),
    /// Spin-½ geometry
    #[command(subcommand)]
    Qubit(QubitCommand),
    /// Operators for accessible variables
    #[command(subcommand)]
    Evar(EvarCommand),
    /// Finite symmetry models
    #[command(subcommand)]
    Symmetry(SymmetryCommand),
    /// Run the full verification suite
    Report(ReportArgs),
}

#[derive(Subcommand, Debug)]
enum SpinCommand {
    /// Emit |a;h⟩
    State {
        #[arg(long, value_parser = parse_spin)]
        j: SpinSystem,
        #[arg(long, value_parser = parse_direction, allow_hyphen_values = true)]
        dir: Direction,
        #[arg(long, value_parser = parse_half_int, allow_hyphen_values = true)]
        h: HalfInt,
        /// Diagonalize J_a instead of running the recursion
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Compare recursion states with the diagonalization oracle
    Verify {
        #[arg(long, value_parser = parse_spin)]
        j: SpinSystem,
        /// Random directions
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Every |a;h⟩ for the given or random directions
    Catalog {
        #[arg(long, value_parser = parse_spin)]
        j: SpinSystem,
        #[arg(long, value_parser = parse_direction, allow_hyphen_values = true)]
        dir: Vec<Direction>,
        /// Random directions added after the listed ones
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Transition probability between two states
    Overlap {
        #[arg(long, value_parser = parse_spin)]
        j: SpinSystem,
        #[arg(long, value_parser = parse_direction, allow_hyphen_values = true)]
        dir: Direction,
        #[arg(long, value_parser = parse_half_int, allow_hyphen_values = true)]
        h: HalfInt,
        #[arg(long, value_parser = parse_direction, allow_hyphen_values = true)]
        to_dir: Direction,
        #[arg(long, value_parser = parse_half_int, allow_hyphen_values = true)]
        to_h: HalfInt,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
}

#[derive(Subcommand, Debug)]
enum QubitCommand {
    /// Bloch direction of a unit 2-vector given as re0,im0,re1,im1
    Bloch {
        #[arg(long, value_parser = parse_float, value_delimiter = ',', allow_hyphen_values = true)]
        amplitudes: Vec<f64>,
    },
    /// Reconstruct random unit 2-vectors as question-and-answer states
    Prop2 {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Random pairs for the covering-map law
        #[arg(long, default_value_t = 500)]
        pairs: usize,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct VariableArgs {
    /// Strictly increasing values, comma separated
    #[arg(long, value_parser = parse_float, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
    /// Value map as from:to pairs, comma separated
    #[arg(long, value_parser = parse_map_pair, value_delimiter = ',', allow_hyphen_values = true)]
    map: Option<Vec<(f64, f64)>>,
    #[arg(long, default_value = "theta")]
    name: String,
}

#[derive(Subcommand, Debug)]
enum EvarCommand {
    /// Coarse grain a variable, or with --samples run the randomized check
    CoarseGrain {
        #[command(flatten)]
        var: VariableArgs,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Whether the (optionally coarse-grained) operator has simple spectrum
    Maximal {
        #[command(flatten)]
        var: VariableArgs,
        #[arg(long, default_value_t = 1e-6)]
        sep: f64,
    },
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long, value_name = "PATH")]
    model: PathBuf,
    #[arg(long, default_value_t = symmetry::DEFAULT_MAX_WORD_LEN)]
    max_word_len: usize,
}

#[derive(Subcommand, Debug)]
enum SymmetryCommand {
    /// Structural relations and value alignment
    Check {
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
    },
    /// Orthonormality and distinctness of the constructed states
    Theorem1 {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Assumption checks, the overlap bound and the word-map checks
    Assumptions {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also regenerate the golden fixtures
    #[arg(long)]
    golden: bool,
    #[arg(long, value_name = "DIR", default_value = default_golden_dir())]
    golden_dir: PathBuf,
}

fn default_golden_dir() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden")
}

fn parse_spin(s: &str) -> Result<SpinSystem, String> {
    let j: HalfInt = s.parse().map_err(|e: Error| e.to_string())?;
    SpinSystem::new(j).map_err(|e| e.to_string())
}

fn parse_half_int(s: &str) -> Result<HalfInt, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_float(x: &str) -> Result<f64, String> {
    let v: f64 = x.trim().parse().map_err(|_| format!("{x:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{x:?} is not finite"))
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_float).collect()
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    let v = parse_floats(s)?;
    let [x, y, z] = v[..] else {
        return Err(format!("expected three components, got {}", v.len()));
    };
    Direction::normalize_near_unit(x, y, z, DIRECTION_INPUT_TOL).map_err(|e| e.to_string())
}

fn parse_map_pair(pair: &str) -> Result<(f64, f64), String> {
    let (from, to) = pair.split_once(':').ok_or_else(|| format!("{pair:?} is not from:to"))?;
    Ok((parse_float(from)?, parse_float(to)?))
}

/// What a command produced: the text to emit and any verdicts.
struct Outcome {
    body: String,
    reports: Vec<VerificationReport>,
}

impl Outcome {
    fn text(body: String) -> Self {
        Self { body, reports: Vec::new() }
    }

    fn report(r: VerificationReport) -> Result<Self, String> {
        Ok(Self { body: pretty(&r)?, reports: vec![r] })
    }

    fn reports(rs: Vec<VerificationReport>) -> Result<Self, String> {
        Ok(Self { body: pretty(&rs)?, reports: rs })
    }
}

fn pretty<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string_pretty(v).map_err(|e| e.to_string())
}

fn ctx<T>(field: &str, r: crate::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("{field}: {e}"))
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    let d = m.dim();
    json!((0..d).map(|i| (0..d).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn load_model(path: &Path) -> Result<FiniteSymmetryModel, String> {
    ctx("--model", FiniteSymmetryModel::load(path))
}

fn spin_state(sys: &SpinSystem, dir: &Direction, h: HalfInt, oracle: bool) -> Result<spin::QuestionAnswerState, String> {
    ctx("--h", sys.index_of(h))?;
    let s = if oracle { spin::eigenstate_oracle(sys, dir, h) } else { spin::eigenstate_recursion(sys, dir, h) };
    ctx("state", s)
}

fn run_spin(cmd: SpinCommand) -> Result<Outcome, String> {
    match cmd {
        SpinCommand::State { j, dir, h, oracle, format } => {
            let s = spin_state(&j, &dir, h, oracle)?;
            Ok(Outcome::text(ctx("--format", state_format::emit_state(&format, &s))?))
        }
        SpinCommand::Verify { j, samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Outcome::report(ctx("verify", spin_checks::verify_prop1(&[j], samples, &mut rng))?)
        }
        SpinCommand::Catalog { j, mut dir, samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            dir.extend((0..samples).map(|_| Direction::random(&mut rng)));
            if dir.is_empty() {
                return Err("--dir: give at least one direction or --samples".into());
            }
            let states = ctx("catalog", spin::state_catalog(&j, &dir))?;
            let records: Vec<StateRecord> = states.iter().map(StateRecord::from_state).collect();
            Ok(Outcome::text(ctx("catalog", state_format::to_compact_string(&records))?))
        }
        SpinCommand::Overlap { j, dir, h, to_dir, to_h, eps } => {
            let s = spin_state(&j, &dir, h, false)?;
            let t = spin_state(&j, &to_dir, to_h, false)?;
            let p = ctx("overlap", spin::transition_probability(&s, &t))?;
            let same = ctx("--eps", linalg::phase_equal(&s.ket, &t.ket, eps))?;
            Ok(Outcome::text(pretty(&json!({ "transition_probability": p, "same_ray": same }))?))
        }
    }
}

fn run_qubit(cmd: QubitCommand) -> Result<Outcome, String> {
    match cmd {
        QubitCommand::Bloch { amplitudes } => {
            let [r0, i0, r1, i1] = amplitudes[..] else {
                return Err(format!("--amplitudes: expected 4 numbers, got {}", amplitudes.len()));
            };
            let v = ctx("--amplitudes", ComplexVector::new(vec![c(r0, i0), c(r1, i1)]))?;
            let a = ctx("--amplitudes", qubit::bloch_direction(&v))?;
            Ok(Outcome::text(pretty(&json!({ "direction": a }))?))
        }
        QubitCommand::Prop2 { samples, pairs, eps, seed } => {
            if samples == 0 {
                return Err("--samples: must be at least 1".into());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Outcome::report(ctx("--eps", qubit::verify_prop2_with_covering(samples, pairs, eps, &mut rng))?)
        }
    }
}

fn variable(var: &VariableArgs) -> Result<EVariableSpec, String> {
    let values = var.values.clone().ok_or("--values: required")?;
    ctx("--values", EVariableSpec::standard(var.name.clone(), values))
}

fn run_evar(cmd: EvarCommand) -> Result<Outcome, String> {
    match cmd {
        EvarCommand::CoarseGrain { samples: Some(n), seed, .. } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Outcome::report(ctx("coarse-grain", evariables::verify_coarse_graining(n, &mut rng))?)
        }
        EvarCommand::CoarseGrain { var, .. } => {
            let spec = variable(&var)?;
            let map = var.map.clone().ok_or("--map: required unless --samples is given")?;
            let cg = ctx("--map", evariables::coarse_grain(&spec, evariables::table_map(&map)))?;
            let records = (0..cg.classes.len())
                .map(|i| evariables::interpret(&cg, i))
                .collect::<crate::Result<Vec<_>>>();
            let records = ctx("coarse-grain", records)?;
            Ok(Outcome::text(pretty(&json!({
                "name": cg.name,
                "classes": cg.classes,
                "values": cg.values,
                "operator": matrix_json(&cg.operator),
                "records": records,
            }))?))
        }
        EvarCommand::Maximal { var, sep } => {
            let spec = variable(&var)?;
            let op = match &var.map {
                Some(map) => ctx("--map", evariables::coarse_grain(&spec, evariables::table_map(map)))?.operator,
                None => evariables::operator_from_maximal(&spec),
            };
            let maximal = ctx("--sep", evariables::is_maximally_accessible(&op, sep))?;
            let eig = ctx("maximal", linalg::hermitian_eig(&op))?;
            Ok(Outcome::text(pretty(&json!({
                "operator": matrix_json(&op),
                "eigenvalues": eig.eigenvalues,
                "maximally_accessible": maximal,
            }))?))
        }
    }
}

fn run_symmetry(cmd: SymmetryCommand) -> Result<Outcome, String> {
    match cmd {
        SymmetryCommand::Check { model } => Outcome::report(symmetry::validate_model(&load_model(&model)?)),
        SymmetryCommand::Theorem1 { model, eps } => {
            let m = load_model(&model.model)?;
            Outcome::report(ctx("theorem1", symmetry::verify_theorem1(&m, model.max_word_len, eps))?)
        }
        SymmetryCommand::Assumptions { model, seed } => {
            let m = load_model(&model.model)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(100);
            Outcome::reports(ctx("--max-word-len", symmetry::check_assumptions(&m, model.max_word_len, &mut rng))?)
        }
    }
}

/// Fixture files written by `report --golden`, as (file name, argv).
pub fn golden_fixtures() -> Vec<(&'static str, Vec<String>)> {
    let models = concat!(env!("CARGO_MANIFEST_DIR"), "/models");
    let args = |s: &str| s.split_whitespace().map(String::from).collect::<Vec<_>>();
    vec![
        ("suite_seed0.json", args("report --seed 0")),
        ("state_spin_half_up.json", args("spin state --j 0.5 --dir 0,0,1 --h 0.5")),
        ("state_spin_one_tilted.json", args("spin state --j 1 --dir 0.6,0,0.8 --h 0")),
        ("bad_model_check.json", args(&format!("symmetry check --model {models}/bad_model.json"))),
        ("two_variable_theorem1.json", args(&format!("symmetry theorem1 --model {models}/two_variable.json"))),
        ("two_variable_assumptions.json", args(&format!("symmetry assumptions --model {models}/two_variable.json"))),
    ]
}

/// Runs argv (without the program name) and returns the exit code and
/// the emitted body.
pub fn run_to_string(argv: &[String]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let full: Vec<OsString> = std::iter::once("qastate".into()).chain(argv.iter().map(OsString::from)).collect();
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

fn run_report(args: ReportArgs) -> Result<Outcome, String> {
    let cfg = SuiteConfig { seed: args.seed, ..SuiteConfig::default() };
    let suite = ctx("report", suite::run_suite(&cfg))?;
    if args.golden {
        std::fs::create_dir_all(&args.golden_dir).map_err(|e| format!("--golden-dir: {e}"))?;
        for (file, argv) in golden_fixtures() {
            let body = if argv[0] == "report" {
                format!("{}\n", pretty(&suite)?)
            } else {
                match run_to_string(&argv) {
                    (EXIT_ERROR, _) => return Err(format!("golden fixture {file} could not be produced")),
                    (_, body) => body,
                }
            };
            std::fs::write(args.golden_dir.join(file), body).map_err(|e| format!("--golden-dir: {e}"))?;
        }
    }
    let reports: Vec<VerificationReport> = suite.reports().cloned().collect();
    Ok(Outcome { body: pretty(&suite)?, reports })
}

fn summary_line(r: &VerificationReport) -> String {
    let subject = serde_json::to_value(r.subject).unwrap_or(Value::Null);
    let verdict = serde_json::to_value(r.verdict).unwrap_or(Value::Null);
    format!("{}: {}", subject.as_str().unwrap_or("?"), verdict.as_str().unwrap_or("?"))
}

pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let out = cli.out.clone();
    let result = match cli.command {
        Command::Spin(cmd) => run_spin(cmd),
        Command::Qubit(cmd) => run_qubit(cmd),
        Command::Evar(cmd) => run_evar(cmd),
        Command::Symmetry(cmd) => run_symmetry(cmd),
        Command::Report(args) => run_report(args),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_ERROR;
        }
    };

    let body = format!("{}\n", outcome.body);
    let written = match &out {
        Some(path) => std::fs::write(path, &body).map_err(|e| format!("--out: {e}")),
        None => stdout.write_all(body.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_ERROR;
    }
    for r in &outcome.reports {
        let _ = writeln!(stderr, "{}", summary_line(r));
    }
    if outcome.reports.iter().any(|r| r.verdict == Verdict::Fail) {
        EXIT_FAIL
    } else {
        EXIT_OK
    }
}
