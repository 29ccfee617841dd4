//! Command-line front end: algebra loading, suite execution and report
//! rendering. [`run`] is the whole program minus process I/O.

mod commands;
mod markdown;

use std::ffi::OsString;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oddbracket::liealg::{catalog, StructureConstants};
use oddbracket::Error;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Even degrees above this trigger a warning on stderr.
pub const EVEN_DEGREE_WARNING: u32 = 8;

#[derive(Parser, Debug)]
#[command(
    name = "oddbracket",
    version,
    about = "Exact checks for linear odd Poisson brackets and their Δ-operator superalgebra"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Antisymmetry and Jacobi identity of the structure constants.
    Validate(Common),
    /// Killing metric, its inverse and the lowered structure constants.
    Killing(Common),
    /// Random-sample check of the bracket axioms.
    BracketAxioms(AxiomArgs),
    /// All identities of the Δ-operator superalgebra.
    Superalgebra(Common),
    /// Δ-1 and Δ-3 checks for a degenerate Killing form.
    Degenerate(Common),
    /// Compatibility of two structure-constant tables.
    Compat(CompatArgs),
    /// Evaluate a bracket of two expressions, or normalize one expression.
    Eval(EvalArgs),
    /// Every applicable check in one report.
    Report(AxiomArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Catalog name (so3, sl2, sl3, so5, heisenberg, e2, zero(N)) or JSON file.
    #[arg(long)]
    pub algebra: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct AxiomArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bracket to test; the two linear brackets when omitted.
    #[arg(long, value_enum)]
    pub bracket: Option<BracketArg>,
    /// Largest even degree of sampled polynomials.
    #[arg(long, default_value_t = 3)]
    pub max_even_degree: u32,
}

#[derive(Args, Debug, Clone)]
pub struct CompatArgs {
    #[command(flatten)]
    pub common: Common,
    /// Second table, same forms as --algebra.
    #[arg(long)]
    pub other: String,
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    /// Needed for the linear brackets; sets the index range otherwise.
    #[arg(long)]
    pub algebra: Option<String>,
    #[arg(long, value_enum, default_value_t = BracketArg::LinearOdd)]
    pub bracket: BracketArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// One expression to normalize, or two to bracket.
    #[arg(num_args = 1..=2, required = true)]
    pub expressions: Vec<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketArg {
    LinearOdd,
    LinearEven,
    CanonicalOdd,
    CanonicalEven,
}

/// Exit code and the two output streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Exit codes.
pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INPUT_ERROR: u8 = 2;

/// A loaded algebra together with the name it was requested by.
pub(crate) struct Loaded {
    pub name: String,
    pub sc: StructureConstants,
}

impl Loaded {
    /// SHA-256 of the full JSON table.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.sc.to_file()).expect("serializable");
        format!("{:x}", Sha256::digest(text.as_bytes()))
    }

    pub fn header(&self) -> Value {
        json!({ "name": self.name, "dim": self.sc.dim(), "sha256": self.hash() })
    }
}

pub(crate) fn load(source: &str) -> Result<Loaded, Error> {
    let path = Path::new(source);
    let sc = if path.is_file() {
        StructureConstants::from_json(&std::fs::read_to_string(path)?)?
    } else {
        catalog(source)?
    };
    Ok(Loaded {
        name: source.to_string(),
        sc,
    })
}

/// Result of a command before rendering.
pub(crate) struct Report {
    pub command: &'static str,
    pub format: Format,
    pub meta: Vec<(&'static str, Value)>,
    pub result: Value,
    pub passed: bool,
    pub markdown: String,
    pub warnings: Vec<String>,
}

impl Report {
    fn render(&self) -> String {
        match self.format {
            Format::Json => {
                let mut obj = serde_json::Map::new();
                obj.insert("tool".into(), json!("oddbracket"));
                obj.insert("version".into(), json!(VERSION));
                obj.insert("command".into(), json!(self.command));
                for (k, v) in &self.meta {
                    obj.insert((*k).into(), v.clone());
                }
                obj.insert("passed".into(), json!(self.passed));
                obj.insert("result".into(), self.result.clone());
                let mut s =
                    serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
                s.push('\n');
                s
            }
            Format::Markdown => {
                let mut s = format!("# oddbracket {}\n\n", self.command);
                s.push_str(&format!("- version: {VERSION}\n"));
                for (k, v) in &self.meta {
                    s.push_str(&format!("- {k}: {}\n", markdown::inline(v)));
                }
                s.push_str(&format!(
                    "- status: {}\n\n",
                    if self.passed { "pass" } else { "FAIL" }
                ));
                s.push_str(&self.markdown);
                if !s.ends_with('\n') {
                    s.push('\n');
                }
                s
            }
        }
    }
}

/// Parse arguments and execute one command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() {
                EXIT_INPUT_ERROR
            } else {
                EXIT_PASS
            };
            return if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match commands::dispatch(&cli.command) {
        Ok(report) => {
            let mut stderr = String::new();
            for w in &report.warnings {
                stderr.push_str(&format!("warning: {w}\n"));
            }
            Outcome {
                code: if report.passed {
                    EXIT_PASS
                } else {
                    EXIT_CHECK_FAILED
                },
                stdout: report.render(),
                stderr,
            }
        }
        Err(e) => Outcome {
            code: EXIT_INPUT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
