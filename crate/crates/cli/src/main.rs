//! Command-line front end: parse tensors from JSON, run
//! canonicalization, equivalence, invariants, certificate verification,
//! and exhaustive classification, and emit JSON reports.
//!
//! Exit codes: 0 success (and a passing `verify`), 1 failed `verify`,
//! 2 parse error, 3 unsupported mode ranks, 4 characteristic-two field,
//! 5 field mismatch, 6 singular certificate, 7 enumeration budget
//! exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use trimat::json as tmjson;
use trimat::oracle::DEFAULT_ENUMERATION_BUDGET;
use trimat::{
    canonicalize, classify_all, decode_tensor, verify_certificate, CanonicalLabel, Error,
    FieldSpec, SpatialMatrix,
};

#[derive(Parser)]
#[command(
    name = "trimat",
    version,
    about = "Canonical forms, equivalence certificates, and brute-force \
             classification for m×n×q spatial matrices with n,q ≤ 2"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the canonical form of a tensor, with an optional
    /// certificate and reduction log.
    Canon(CanonArgs),
    /// Decide whether two tensors are equivalent.
    Equiv(EquivArgs),
    /// Report dimensions, mode ranks, and regularity of a tensor.
    Invariants(InputArgs),
    /// Check that a certificate carries one tensor to another.
    Verify(VerifyArgs),
    /// Exhaustively classify all tensors of the given dimensions over a
    /// small prime field and validate the canonical map against the
    /// orbits.
    Classify(ClassifyArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input tensor (JSON file).
    #[arg(value_name = "INPUT")]
    input_positional: Option<PathBuf>,
    /// Input tensor (alternative to the positional argument).
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl InputArgs {
    fn path(&self) -> Result<&Path, CliError> {
        self.input
            .as_deref()
            .or(self.input_positional.as_deref())
            .ok_or_else(|| CliError::Usage("no input file given".to_string()))
    }
}

#[derive(Args)]
struct CanonArgs {
    #[command(flatten)]
    io: InputArgs,
    /// Include the equivalence certificate in the report.
    #[arg(long)]
    certificate: bool,
    /// Include the machine-readable reduction log.
    #[arg(long)]
    log: bool,
}

#[derive(Args)]
struct EquivArgs {
    /// First tensor (JSON file).
    a: PathBuf,
    /// Second tensor (JSON file).
    b: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// The source tensor.
    tensor: PathBuf,
    /// The certificate to replay.
    certificate: PathBuf,
    /// The expected image tensor.
    expected: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Field to classify over: gf<p> for an odd prime p.
    #[arg(long)]
    field: String,
    /// Tensor dimensions as m,n,q.
    #[arg(long)]
    dims: String,
    /// Cap on the number of tensors to enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

enum CliError {
    Core(Error),
    Io(String),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::UnsupportedRanks { .. } => 3,
                Error::CharacteristicTwo(_) => 4,
                Error::FieldMismatch(_, _) => 5,
                Error::SingularCertificate => 6,
                Error::BudgetExceeded { .. } => 7,
                Error::Parse(_)
                | Error::NotPrime(_)
                | Error::ShapeMismatch(_)
                | Error::DivisionByZero => 2,
                _ => 1,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Io(msg) | CliError::Usage(msg) => msg.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: &Command) -> Result<u8, CliError> {
    match command {
        Command::Canon(args) => cmd_canon(args),
        Command::Equiv(args) => cmd_equiv(args),
        Command::Invariants(args) => cmd_invariants(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Classify(args) => cmd_classify(args),
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Core(Error::Parse(format!("{}: {e}", path.display()))))
}

fn read_tensor(path: &Path) -> Result<SpatialMatrix, CliError> {
    Ok(tmjson::tensor_from_json(&read_json(path)?)?)
}

fn emit(report: &Value, output: Option<&Path>) -> Result<(), CliError> {
    let text = format!("{:#}\n", report);
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn label_fields(report: &mut Value, label: &CanonicalLabel) {
    report["label"] = Value::from(label.tag());
    if let Some(param) = label.param() {
        report["param"] = tmjson::element_to_json(param);
    }
}

fn cmd_canon(args: &CanonArgs) -> Result<u8, CliError> {
    let tensor = read_tensor(args.io.path()?)?;
    let result = canonicalize(&tensor)?;
    let mut report = json!({
        "field": tmjson::field_spec_to_json(&tensor.spec()),
        "dims": tensor.dims(),
        "mode_ranks": {"m": result.ranks.m, "n": result.ranks.n, "q": result.ranks.q},
        "canonical": tmjson::tensor_to_json(&result.canonical),
    });
    label_fields(&mut report, &result.label);
    if args.certificate {
        report["certificate"] = tmjson::certificate_to_json(&result.cert);
    }
    if args.log {
        report["log"] = serde_json::to_value(&result.steps)
            .expect("reduction steps serialize infallibly");
    }
    emit(&report, args.io.output.as_deref())?;
    Ok(0)
}

fn cmd_equiv(args: &EquivArgs) -> Result<u8, CliError> {
    let a = read_tensor(&args.a)?;
    let b = read_tensor(&args.b)?;
    if a.spec() != b.spec() {
        return Err(CliError::Core(Error::FieldMismatch(
            a.spec().to_string(),
            b.spec().to_string(),
        )));
    }
    let (equivalent, reason) = if a.dims() != b.dims() {
        (false, "dimension mismatch".to_string())
    } else {
        let la = canonicalize(&a)?.label;
        let lb = canonicalize(&b)?.label;
        if la == lb {
            (true, format!("canonical labels match: {la}"))
        } else {
            (false, format!("canonical labels differ: {la} vs {lb}"))
        }
    };
    let report = json!({ "equivalent": equivalent, "reason": reason });
    emit(&report, args.output.as_deref())?;
    Ok(0)
}

fn cmd_invariants(args: &InputArgs) -> Result<u8, CliError> {
    let tensor = read_tensor(args.path()?)?;
    let ranks = tensor.mode_ranks();
    let report = json!({
        "field": tmjson::field_spec_to_json(&tensor.spec()),
        "dims": tensor.dims(),
        "mode_ranks": {"m": ranks.m, "n": ranks.n, "q": ranks.q},
        "regular": tensor.is_regular(),
    });
    emit(&report, args.output.as_deref())?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let tensor = read_tensor(&args.tensor)?;
    let cert = tmjson::certificate_from_json(tensor.spec(), &read_json(&args.certificate)?)?;
    let expected = read_tensor(&args.expected)?;
    let valid = verify_certificate(&tensor, &cert, &expected)?;
    emit(&json!({ "valid": valid }), args.output.as_deref())?;
    Ok(if valid { 0 } else { 1 })
}

fn parse_field(text: &str) -> Result<FieldSpec, CliError> {
    let lower = text.to_ascii_lowercase();
    if lower == "q" {
        return Ok(FieldSpec::rationals());
    }
    if let Some(digits) = lower.strip_prefix("gf") {
        let p: u64 = digits
            .parse()
            .map_err(|_| CliError::Usage(format!("bad field {text:?}: expected q or gf<p>")))?;
        return Ok(FieldSpec::prime(p)?);
    }
    Err(CliError::Usage(format!(
        "bad field {text:?}: expected q or gf<p>"
    )))
}

fn parse_dims(text: &str) -> Result<[usize; 3], CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "bad dims {text:?}: expected m,n,q"
        )));
    }
    let mut dims = [0usize; 3];
    for (slot, part) in dims.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad dimension {part:?}")))?;
    }
    Ok(dims)
}

fn cmd_classify(args: &ClassifyArgs) -> Result<u8, CliError> {
    let spec = parse_field(&args.field)?;
    if spec.is_rationals() {
        return Err(CliError::Core(Error::UnsupportedField(
            "exhaustive classification needs a finite field".to_string(),
        )));
    }
    let dims = parse_dims(&args.dims)?;
    let classification = classify_all(spec, dims, args.budget)?;

    // Cross-check: the canonical map must be constant on every orbit and
    // distinct across orbits.
    let mut canonical_by_orbit: Vec<Option<SpatialMatrix>> =
        vec![None; classification.orbits.len()];
    let mut validated = true;
    'outer: for code in 0..classification.total {
        let tensor = decode_tensor(spec, dims, code)?;
        let result = canonicalize(&tensor)?;
        let orbit_id = classification.assignment[code as usize] as usize;
        match &canonical_by_orbit[orbit_id] {
            None => canonical_by_orbit[orbit_id] = Some(result.canonical),
            Some(seen) => {
                if *seen != result.canonical {
                    validated = false;
                    break 'outer;
                }
            }
        }
    }
    if validated {
        for (i, a) in canonical_by_orbit.iter().enumerate() {
            for b in &canonical_by_orbit[i + 1..] {
                if a == b {
                    validated = false;
                }
            }
        }
    }

    let orbits: Vec<Value> = classification
        .orbits
        .iter()
        .map(|orbit| {
            let label = canonicalize(&orbit.representative)
                .expect("representatives stay within supported ranks")
                .label;
            let mut entry = json!({
                "representative": tmjson::tensor_to_json(&orbit.representative),
                "orbit_size": orbit.size,
            });
            entry["canonical_label"] = Value::from(label.tag());
            if let Some(param) = label.param() {
                entry["param"] = tmjson::element_to_json(param);
            }
            entry
        })
        .collect();
    let report = json!({
        "field": tmjson::field_spec_to_json(&spec),
        "dims": dims,
        "total": classification.total,
        "class_count": classification.orbits.len(),
        "orbits": orbits,
        "theorem_validated": validated,
    });
    emit(&report, args.output.as_deref())?;
    Ok(0)
}
