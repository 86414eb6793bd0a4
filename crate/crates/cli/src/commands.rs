use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use nonlocal_cubes::json::{
    decomposition_to_json, read_artifact, stateset_to_json, to_canonical_json, write_text,
    Artifact, FORMAT_VERSION,
};
use nonlocal_cubes::nonlocality::{certify_strong_nonlocality, CutStatus};
use nonlocal_cubes::upb::{certify_unextendible_with, UpbConfig, UpbStatus};
use nonlocal_cubes::verify::{
    check_completeness, check_pairwise_orthogonal, check_pairwise_orthogonal_float,
};
use nonlocal_cubes::{
    build_decomposition, build_opb, build_ops, build_upb, corner_census, verify_cyclic_invariance,
    verify_partition, Decomposition, Error, PartyDims, StateSet,
};

#[derive(Parser)]
#[command(
    name = "nonlocal-cubes",
    version,
    about = "Construct and certify product-state sets built from hypercube decompositions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build an artifact and write its canonical JSON
    Construct(ConstructArgs),
    /// Run checks against an artifact file and emit a report
    Verify(VerifyArgs),
    /// Render a decomposition as text
    Render(RenderArgs),
}

#[derive(Args)]
pub struct ConstructArgs {
    /// Local dimensions, comma separated (e.g. 3,3,3)
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<u32>,
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Output path; stdout when omitted
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
pub enum Kind {
    Decomposition,
    Opb,
    Ops,
    Upb,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Input artifact (JSON)
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Checks to run, comma separated
    #[arg(long = "check", value_delimiter = ',', required = true)]
    pub checks: Vec<Check>,
    #[arg(long, value_enum, default_value = "exact")]
    pub backend: Backend,
    /// Zero threshold for the float cross-check backend
    #[arg(long, default_value_t = 1e-9)]
    pub float_tolerance: f64,
    /// Node budget for the unextendibility search
    #[arg(long, default_value_t = 100_000_000)]
    pub node_budget: u64,
    /// 0 = no traces, 1 = rules only, 2 = rules with witnesses
    #[arg(long, default_value_t = 1)]
    pub trace_verbosity: u8,
    /// Report path; stdout when omitted
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Partition,
    Cyclic,
    Corners,
    Orthogonality,
    Completeness,
    Nonlocality,
    Unextendibility,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::Partition => "partition",
            Check::Cyclic => "cyclic",
            Check::Corners => "corners",
            Check::Orthogonality => "orthogonality",
            Check::Completeness => "completeness",
            Check::Nonlocality => "nonlocality",
            Check::Unextendibility => "unextendibility",
        }
    }

    fn needs_decomposition(self) -> bool {
        matches!(self, Check::Partition | Check::Cyclic | Check::Corners)
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Args)]
pub struct RenderArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<u32>,
    #[arg(long, value_enum, default_value = "table")]
    pub style: Style,
}

#[derive(Copy, Clone, ValueEnum)]
pub enum Style {
    Table,
    Slices,
}

pub enum Outcome {
    Pass,
    Refuted,
    Undecided,
}

pub enum CliError {
    Usage(String),
    Malformed(String),
}

fn core_err(e: Error) -> CliError {
    match e {
        Error::Malformed(_) | Error::Io(_) | Error::Json(_) => CliError::Malformed(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => write_text(path, text).map_err(core_err),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Construct(args) => construct(args),
        Command::Verify(args) => verify(args),
        Command::Render(args) => render(args),
    }
}

fn parse_dims(dims: Vec<u32>) -> Result<PartyDims, CliError> {
    PartyDims::new(dims).map_err(|e| CliError::Usage(e.to_string()))
}

fn construct(args: ConstructArgs) -> Result<Outcome, CliError> {
    let dims = parse_dims(args.dims)?;
    let text = match args.kind {
        Kind::Decomposition => decomposition_to_json(&build_decomposition(&dims)),
        Kind::Opb => stateset_to_json(&build_opb(&dims)),
        Kind::Ops => stateset_to_json(&build_ops(&dims)),
        Kind::Upb => stateset_to_json(&build_upb(&dims)),
    };
    emit(args.output.as_deref(), &text)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct CheckEntry {
    detail: Value,
    name: &'static str,
    status: &'static str,
}

fn severity(status: &str) -> u8 {
    match status {
        "pass" => 0,
        "undecided" => 1,
        _ => 2,
    }
}

fn prune_trace(mut cert: Value, verbosity: u8) -> Value {
    if let Some(cuts) = cert.get_mut("cuts").and_then(Value::as_array_mut) {
        for cut in cuts {
            match verbosity {
                0 => {
                    cut["trace"] = json!([]);
                }
                1 => {
                    if let Some(events) = cut.get_mut("trace").and_then(Value::as_array_mut) {
                        for ev in events {
                            if let Some(obj) = ev.as_object_mut() {
                                obj.remove("witnesses");
                            }
                        }
                    }
                }
                _ => {}
            }
        }
    }
    cert
}

fn verify(args: VerifyArgs) -> Result<Outcome, CliError> {
    if args.backend == Backend::Float && args.checks.iter().any(|c| *c != Check::Orthogonality) {
        return Err(CliError::Usage(
            "the float backend is a cross-check for orthogonality only".to_string(),
        ));
    }
    let artifact = read_artifact(&args.input).map_err(core_err)?;
    let (dec, set): (Option<Decomposition>, Option<StateSet>) = match artifact {
        Artifact::Decomposition(d) => (Some(d), None),
        Artifact::States(s) => (None, Some(s)),
    };
    let mut entries = Vec::new();
    for check in &args.checks {
        let entry = run_check(*check, &args, dec.as_ref(), set.as_ref())?;
        entries.push(entry);
    }
    let worst = entries
        .iter()
        .map(|e| severity(e.status))
        .max()
        .unwrap_or(0);
    let (dims, role): (Vec<u32>, &str) = match (&dec, &set) {
        (Some(d), _) => (d.dims().dims().to_vec(), "decomposition"),
        (_, Some(s)) => (
            s.dims().to_vec(),
            match s.role() {
                nonlocal_cubes::Role::Opb => "opb",
                nonlocal_cubes::Role::Ops => "ops",
                nonlocal_cubes::Role::Upb => "upb",
                nonlocal_cubes::Role::Custom => "custom",
            },
        ),
        _ => unreachable!(),
    };
    let report = json!({
        "checks": serde_json::to_value(&entries).expect("serializable"),
        "dims": dims,
        "kind": "verification-report",
        "role": role,
        "version": FORMAT_VERSION,
    });
    emit(args.output.as_deref(), &to_canonical_json(&report))?;
    Ok(match worst {
        0 => Outcome::Pass,
        1 => Outcome::Undecided,
        _ => Outcome::Refuted,
    })
}

fn run_check(
    check: Check,
    args: &VerifyArgs,
    dec: Option<&Decomposition>,
    set: Option<&StateSet>,
) -> Result<CheckEntry, CliError> {
    if check.needs_decomposition() {
        let Some(dec) = dec else {
            return Err(CliError::Usage(format!(
                "check '{}' needs a decomposition artifact",
                check.name()
            )));
        };
        return decomposition_check(check, dec);
    }
    let Some(set) = set else {
        return Err(CliError::Usage(format!(
            "check '{}' needs a state-set artifact",
            check.name()
        )));
    };
    state_check(check, args, set)
}

fn decomposition_check(check: Check, dec: &Decomposition) -> Result<CheckEntry, CliError> {
    Ok(match check {
        Check::Partition => {
            let report = verify_partition(dec);
            CheckEntry {
                status: if report.all_ok() { "pass" } else { "fail" },
                name: check.name(),
                detail: serde_json::to_value(&report).expect("serializable"),
            }
        }
        Check::Cyclic => {
            let ok = verify_cyclic_invariance(dec).map_err(core_err)?;
            CheckEntry {
                status: if ok { "pass" } else { "fail" },
                name: check.name(),
                detail: json!({ "invariant": ok }),
            }
        }
        Check::Corners => {
            let report = corner_census(dec);
            CheckEntry {
                status: if report.all_ok { "pass" } else { "fail" },
                name: check.name(),
                detail: serde_json::to_value(&report).expect("serializable"),
            }
        }
        _ => unreachable!("dispatched above"),
    })
}

fn state_check(check: Check, args: &VerifyArgs, set: &StateSet) -> Result<CheckEntry, CliError> {
    Ok(match check {
        Check::Orthogonality => {
            let report = match args.backend {
                Backend::Exact => check_pairwise_orthogonal(set),
                Backend::Float => check_pairwise_orthogonal_float(set, args.float_tolerance),
            };
            CheckEntry {
                status: if report.is_clean() { "pass" } else { "fail" },
                name: check.name(),
                detail: json!({
                    "backend": if args.backend == Backend::Float { "float" } else { "exact" },
                    "total_pairs": report.total_pairs,
                    "violations": serde_json::to_value(&report.violations).expect("serializable"),
                }),
            }
        }
        Check::Completeness => match check_completeness(set, set.dims()) {
            Ok(complete) => CheckEntry {
                status: if complete { "pass" } else { "fail" },
                name: check.name(),
                detail: json!({ "complete": complete, "states": set.len() }),
            },
            Err(e @ Error::NotOrthogonal { .. }) => CheckEntry {
                status: "fail",
                name: check.name(),
                detail: json!({ "precondition": e.to_string() }),
            },
            Err(e) => return Err(core_err(e)),
        },
        Check::Nonlocality => {
            let cert = certify_strong_nonlocality(set).map_err(core_err)?;
            let status = match cert.verdict {
                CutStatus::Certified => "pass",
                CutStatus::Undecided => "undecided",
            };
            let value = serde_json::to_value(&cert).expect("serializable");
            CheckEntry {
                status,
                name: check.name(),
                detail: prune_trace(value, args.trace_verbosity),
            }
        }
        Check::Unextendibility => {
            let verdict = certify_unextendible_with(
                set,
                UpbConfig {
                    node_budget: args.node_budget,
                },
            )
            .map_err(core_err)?;
            let status = match verdict.status {
                UpbStatus::Upb => "pass",
                UpbStatus::Extendible => "fail",
                UpbStatus::InconclusiveBudget => "undecided",
            };
            CheckEntry {
                status,
                name: check.name(),
                detail: serde_json::to_value(&verdict).expect("serializable"),
            }
        }
        _ => unreachable!("dispatched above"),
    })
}

fn render(args: RenderArgs) -> Result<Outcome, CliError> {
    let dims = parse_dims(args.dims)?;
    let dec = build_decomposition(&dims);
    let text = match args.style {
        Style::Table => crate::render::table(&dec),
        Style::Slices => {
            if dims.n_parties() != 3 {
                return Err(CliError::Usage(
                    "slice rendering needs exactly 3 parties".to_string(),
                ));
            }
            crate::render::slices(&dec)
        }
    };
    print!("{text}");
    Ok(Outcome::Pass)
}
