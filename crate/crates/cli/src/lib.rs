//! `gpgalois`: validate actions, build orthogonalizations and
//! globalizations, and run the Galois correspondences from the shell.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use groupoid_galois::action::ActionError;
use groupoid_galois::catalog::{self, CatalogError};
use groupoid_galois::constructions::{globalize_with_order, orthogonalize, ConstructionError, GermOrder};
use groupoid_galois::correspondence::{self, CorrespondenceError};
use groupoid_galois::galois::{
    alpha_strong_failure, invariants, invariants_all, is_galois, separability_witness, stabilizer, GaloisDecision,
    GaloisError,
};
use groupoid_galois::io::{self as docs, family_to_json, IoError};
use groupoid_galois::partition::PartitionError;
use groupoid_galois::subgroupoid::{enumerate_wide_subgroupoids, SubgroupoidError, DEFAULT_ENUMERATION_CAP};
use groupoid_galois::{BaseRing, FiniteGroupoid, Mode, PartialAction, PartitionSubalgebra, WideSubgroupoid};
use groupoid_galois_oracles::suite;
use serde_json::{json, Value};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_THEOREM: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    TheoremViolation(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::TheoremViolation(_) => EXIT_THEOREM,
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Input(_) => EXIT_INPUT,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::TheoremViolation(_) => "theorem-violation",
            CliError::Precondition(_) => "precondition",
            CliError::Input(_) => "input",
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Groupoid(_) | IoError::Action(_) | IoError::Algebra(_) => CliError::Precondition(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<CorrespondenceError> for CliError {
    fn from(e: CorrespondenceError) -> Self {
        match e {
            CorrespondenceError::TheoremViolation(_) => CliError::TheoremViolation(e.to_string()),
            CorrespondenceError::Construction(c) => c.into(),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::GlobalizationVerificationFailed(_)
            | ConstructionError::OrthogonalizationVerificationFailed(_)
            | ConstructionError::InconsistentGerms(_) => CliError::TheoremViolation(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

macro_rules! precondition_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Precondition(e.to_string())
            }
        }
    )*};
}

precondition_from!(GaloisError, PartitionError, SubgroupoidError, ActionError);

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Orthogonal,
    Strong,
    Global,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Orthogonal => Mode::Orthogonal,
            ModeArg::Strong => Mode::Strong,
            ModeArg::Global => Mode::Global,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Forward,
    Reverse,
}

#[derive(Debug, Parser)]
#[command(name = "gpgalois", version, about = "Partial groupoid actions on rings of orthogonal idempotents")]
pub struct Cli {
    /// Output format; most reports default to JSON, tables to text.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Override the base ring of the input (`Q` or `Fp:<prime>`).
    #[arg(long, global = true)]
    pub base: Option<BaseRing>,
    /// Upper bound on closures computed while enumerating wide subgroupoids.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
    #[command(subcommand)]
    pub command: Command,
}

/// `INPUT` is a file path, `-` for standard input, or `example:<name>`.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate an action (or a groupoid with `--groupoid`).
    Validate {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long)]
        groupoid: bool,
    },
    /// Print the orthogonalization of an action.
    Orthogonalize {
        #[arg(default_value = "-")]
        input: String,
        /// Wrap the action together with the index embedding.
        #[arg(long)]
        embedding: bool,
    },
    /// Print the globalization of an action.
    Globalize {
        #[arg(default_value = "-")]
        input: String,
        /// Wrap the action together with the embedding and clause report.
        #[arg(long)]
        embedding: bool,
        #[arg(long, value_enum, default_value_t = OrderArg::Forward)]
        order: OrderArg,
    },
    /// Invariant subalgebra of the restriction to a wide subgroupoid.
    Invariants {
        #[arg(default_value = "-")]
        input: String,
        /// Generator of the wide subgroupoid, repeatable; the whole
        /// groupoid when omitted. Name an object to get `𝒢₀`.
        #[arg(long = "generator", short = 'g')]
        generators: Vec<String>,
    },
    /// Decide whether the action is Galois.
    GaloisCheck {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Strongly Galois test, or with `--subalgebra` the α-strong test for `C`.
    StrongCheck {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long)]
        subalgebra: Option<String>,
    },
    /// Morphisms fixing every element of a subalgebra.
    Stabilizer {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long)]
        subalgebra: String,
    },
    /// List the wide subgroupoids of a groupoid or of an action's groupoid.
    EnumerateSubgroupoids {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long)]
        groupoid: bool,
    },
    /// Run a Galois correspondence.
    Correspondence {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Compare the output with this file instead of printing it.
        #[arg(long)]
        golden: Option<String>,
    },
    /// Print a built-in example action.
    Example {
        /// One of the catalog names or `random:<seed>`.
        name: Option<String>,
        #[arg(long)]
        list: bool,
    },
    /// Run the property suite on seeded random instances.
    Fuzz {
        #[arg(long, default_value_t = 200)]
        instances: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict to one property.
        #[arg(long)]
        property: Option<String>,
    },
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let json_errors = cli.format == Some(Format::Json);
    match execute(&cli, stdin) {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(e) => report(err, &CliError::Input(e.to_string()), json_errors),
        },
        Err(e) => report(err, &e, json_errors),
    }
}

fn report(err: &mut dyn Write, e: &CliError, json: bool) -> i32 {
    let _ = if json {
        let doc = json!({"error": {"kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code()}});
        writeln!(err, "{doc}")
    } else {
        writeln!(err, "error: {e}")
    };
    e.exit_code()
}

fn read_input(input: &str, stdin: &mut dyn Read) -> Result<String, CliError> {
    if input == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(input).map_err(|e| CliError::Input(format!("{input}: {e}")))
    }
}

fn load_action(cli: &Cli, input: &str, stdin: &mut dyn Read) -> Result<PartialAction, CliError> {
    let alpha = match input.strip_prefix("example:") {
        Some(name) => catalog::example(name)?,
        None => docs::parse_action(&read_input(input, stdin)?)?,
    };
    Ok(match cli.base {
        Some(b) => alpha.with_base(b),
        None => alpha,
    })
}

fn load_groupoid(input: &str, stdin: &mut dyn Read) -> Result<FiniteGroupoid, CliError> {
    Ok(docs::parse_groupoid(&read_input(input, stdin)?)?)
}

fn subgroupoid_arg(g: &FiniteGroupoid, names: &[String]) -> Result<WideSubgroupoid, CliError> {
    if names.is_empty() {
        return Ok(WideSubgroupoid::full(g));
    }
    let mut gens = Vec::new();
    for name in names {
        gens.push(g.find(name).ok_or_else(|| CliError::Input(format!("`{name}` is not a morphism")))?);
    }
    Ok(groupoid_galois::subgroupoid::generated_wide_subgroupoid(g, gens))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

/// Canonical form for golden comparison: LF line ends, and for JSON,
/// re-serialized with sorted keys.
pub fn normalize(text: &str) -> String {
    let lf = text.replace("\r\n", "\n");
    match serde_json::from_str::<Value>(&lf) {
        Ok(v) => pretty(&v),
        Err(_) => lf,
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<String, CliError> {
    let fmt = |default| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Validate { input, groupoid: true } => {
            let g = load_groupoid(input, stdin)?;
            Ok(pretty(&json!({
                "valid": true,
                "morphisms": g.len(),
                "objects": g.objects().iter().map(|&e| g.name(e)).collect::<Vec<_>>(),
                "connected": g.is_connected(),
            })))
        }
        Command::Validate { input, groupoid: false } => {
            let alpha = load_action(cli, input, stdin)?;
            let g = alpha.groupoid();
            let doc = json!({
                "valid": true,
                "morphisms": g.len(),
                "objects": g.objects().iter().map(|&e| g.name(e)).collect::<Vec<_>>(),
                "m": alpha.dim(),
                "base": alpha.base().to_string(),
                "predicates": alpha.predicates(),
                "empty_supports": alpha.empty_supports().iter().map(|&x| g.name(x)).collect::<Vec<_>>(),
            });
            Ok(match fmt(Format::Json) {
                Format::Json => pretty(&doc),
                Format::Text => {
                    let p = alpha.predicates();
                    format!(
                        "valid: {} morphisms, m = {}, orthogonal {}, global {}\n",
                        g.len(),
                        alpha.dim(),
                        p.orthogonal,
                        p.global
                    )
                }
            })
        }
        Command::Orthogonalize { input, embedding } => {
            let alpha = load_action(cli, input, stdin)?;
            let orth = orthogonalize(&alpha)?;
            if *embedding {
                let action: Value = serde_json::from_str(&docs::action_to_json(&orth.action)).expect("own output");
                Ok(pretty(&json!({
                    "action": action,
                    "embedding": family_to_json(alpha.groupoid(), &orth.family),
                })))
            } else {
                Ok(docs::action_to_json(&orth.action))
            }
        }
        Command::Globalize { input, embedding, order } => {
            let alpha = load_action(cli, input, stdin)?;
            let order = match order {
                OrderArg::Forward => GermOrder::Forward,
                OrderArg::Reverse => GermOrder::Reverse,
            };
            let glob = globalize_with_order(&alpha, order)?;
            if *embedding {
                let action: Value = serde_json::from_str(&docs::action_to_json(&glob.action)).expect("own output");
                Ok(pretty(&json!({
                    "action": action,
                    "embedding": family_to_json(alpha.groupoid(), &glob.embedding),
                    "report": glob.report,
                })))
            } else {
                Ok(docs::action_to_json(&glob.action))
            }
        }
        Command::Invariants { input, generators } => {
            let alpha = load_action(cli, input, stdin)?;
            let g = alpha.groupoid();
            let h = subgroupoid_arg(g, generators)?;
            let c = invariants(&alpha, &h)?;
            Ok(match fmt(Format::Text) {
                Format::Text => format!("{c}\n"),
                Format::Json => pretty(&json!({
                    "subgroupoid": h.describe(g),
                    "members": h.names(g),
                    "subalgebra": c.render(),
                    "blocks": c.blocks_one_based(),
                })),
            })
        }
        Command::GaloisCheck { input } => {
            let alpha = load_action(cli, input, stdin)?;
            let doc = match is_galois(&alpha)? {
                GaloisDecision::Galois(c) => json!({
                    "galois": true,
                    "coordinates": c.pairs.iter().map(|(x, y)| json!([x.to_strings(), y.to_strings()])).collect::<Vec<_>>(),
                }),
                GaloisDecision::NotGalois(o) => json!({"galois": false, "obstruction": o}),
            };
            Ok(match fmt(Format::Json) {
                Format::Json => pretty(&doc),
                Format::Text => match doc.get("obstruction") {
                    Some(o) => format!("not Galois: π_{} fixes index {}\n", o["g"].as_str().unwrap_or(""), o["index"]),
                    None => "Galois\n".to_string(),
                },
            })
        }
        Command::StrongCheck { input, subalgebra: None } => {
            let alpha = load_action(cli, input, stdin)?;
            let report = correspondence::is_strongly_galois(&alpha, cli.cap)?;
            Ok(match fmt(Format::Json) {
                Format::Json => pretty(&serde_json::to_value(&report).expect("report serializes")),
                Format::Text => match &report.reason {
                    None => "strongly Galois\n".to_string(),
                    Some(r) => format!("not strongly Galois: {r}\n"),
                },
            })
        }
        Command::StrongCheck { input, subalgebra: Some(text) } => {
            let alpha = load_action(cli, input, stdin)?;
            let c = PartitionSubalgebra::parse(text, alpha.dim())?;
            let failure = alpha_strong_failure(&alpha, &c)?;
            let separable = separability_witness(&alpha.algebra(), &c, &invariants_all(&alpha)).is_ok();
            let doc = json!({
                "subalgebra": c.render(),
                "alpha_strong": failure.is_none(),
                "failure": failure,
                "separable": separable,
            });
            Ok(match fmt(Format::Json) {
                Format::Json => pretty(&doc),
                Format::Text => match &failure {
                    None => format!("{c} is α-strong; separable {separable}\n"),
                    Some(f) => format!("{c} is not α-strong: {f}; separable {separable}\n"),
                },
            })
        }
        Command::Stabilizer { input, subalgebra } => {
            let alpha = load_action(cli, input, stdin)?;
            let g = alpha.groupoid();
            let c = PartitionSubalgebra::parse(subalgebra, alpha.dim())?;
            let s = stabilizer(&alpha, &c)?;
            let members: Vec<&str> = s.members.ones().map(|i| g.name(groupoid_galois::Morphism(i))).collect();
            let closure = s.closure(g);
            Ok(match fmt(Format::Json) {
                Format::Json => pretty(&json!({
                    "subalgebra": c.render(),
                    "members": members,
                    "is_wide_subgroupoid": s.is_wide_subgroupoid,
                    "closure": closure.describe(g),
                })),
                Format::Text => format!("{}\n", members.join(", ")),
            })
        }
        Command::EnumerateSubgroupoids { input, groupoid } => {
            let g = if *groupoid {
                load_groupoid(input, stdin)?
            } else {
                load_action(cli, input, stdin)?.groupoid().clone()
            };
            let w = enumerate_wide_subgroupoids(&g, cli.cap)?;
            Ok(match fmt(Format::Text) {
                Format::Text => w.iter().map(|h| format!("{}\n", h.describe(&g))).collect(),
                Format::Json => pretty(&json!({
                    "count": w.len(),
                    "subgroupoids": w.iter().map(|h| json!({"name": h.describe(&g), "members": h.names(&g)})).collect::<Vec<_>>(),
                })),
            })
        }
        Command::Correspondence { input, mode, golden } => {
            let alpha = load_action(cli, input, stdin)?;
            let table = correspondence::run(&alpha, (*mode).into(), cli.cap)?;
            let text = match fmt(Format::Text) {
                Format::Text => table.render_text(),
                Format::Json => table.render_json(),
            };
            match golden {
                None => Ok(text),
                Some(path) => {
                    let expected = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
                    if normalize(&expected) == normalize(&text) {
                        Ok(format!("matches {path}\n"))
                    } else {
                        Err(CliError::Usage(format!("output differs from golden file {path}")))
                    }
                }
            }
        }
        Command::Example { list: true, .. } => Ok(catalog::EXAMPLES.iter().map(|n| format!("{n}\n")).collect()),
        Command::Example { name: Some(name), .. } => {
            let alpha = catalog::example(name)?;
            let alpha = match cli.base {
                Some(b) => alpha.with_base(b),
                None => alpha,
            };
            Ok(docs::action_to_json(&alpha))
        }
        Command::Example { name: None, .. } => Err(CliError::Usage("give an example name or --list".into())),
        Command::Fuzz { instances, seed, property } => {
            let runs = match property {
                None => suite::fuzz(*seed, *instances),
                Some(name) => {
                    let p =
                        suite::property(name).ok_or_else(|| CliError::Usage(format!("unknown property `{name}`")))?;
                    vec![suite::run_until(p, *seed, usize::MAX, *instances)]
                }
            };
            Ok(match fmt(Format::Json) {
                Format::Json => pretty(&fuzz_report(*seed, *instances, &runs)),
                Format::Text => runs
                    .iter()
                    .map(|r| {
                        format!(
                            "{}: checked {}, skipped {}, failed {}\n",
                            r.name,
                            r.checked,
                            r.skipped,
                            r.failures.len()
                        )
                    })
                    .collect(),
            })
        }
    }
}

pub fn fuzz_report(seed: u64, instances: u64, runs: &[suite::PropertyRun]) -> Value {
    let failures: Vec<Value> = runs
        .iter()
        .flat_map(|r| r.failures.iter().map(move |(s, d)| json!({"property": r.name, "seed": s, "detail": d})))
        .collect();
    json!({
        "start_seed": seed,
        "instances": instances,
        "properties": runs.iter().map(|r| json!({"name": r.name, "checked": r.checked, "skipped": r.skipped, "failed": r.failures.len()})).collect::<Vec<_>>(),
        "failures": failures,
    })
}
