use clap::{Parser, Subcommand, ValueEnum};
use comply_core::decision::{decide, Criterion, DecisionSpec, PayoffMatrix};
use comply_core::ingest::{parse_manifest, read_dataset_file, read_predictions_file};
use comply_core::pipeline::{run, Run};
use comply_core::policy::{parse_policy_bytes, serialize_policy, PolicyDocument, ViolationMode};
use comply_core::report::{render, render_strategy, to_json, Modality, Status};
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Check datasets, classifier outputs and decision problems against a
/// fairness policy.
#[derive(Parser)]
#[command(name = "comply", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a policy file.
    Check { policy: PathBuf },
    /// Evaluate a dataset (and optionally predictions) against a policy.
    Evaluate {
        policy: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// CSV with group,predicted,actual[,score,legitimate] columns.
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// key=value run manifest.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Also write the report as JSON to this file.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Leave out the timestamp so output is byte-stable.
        #[arg(long)]
        deterministic: bool,
        #[arg(long, value_enum, default_value_t = Mode::Display)]
        mode: Mode,
    },
    /// Apply a decision criterion to a payoff matrix CSV.
    Decide {
        /// Header row holds the state labels, first column the action labels.
        #[arg(long)]
        matrix: PathBuf,
        /// wald, hurwicz or savage.
        #[arg(long)]
        criterion: String,
        /// Optimism weight for hurwicz.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Print or write the canonical form of a policy.
    Fmt {
        policy: PathBuf,
        #[arg(long)]
        write: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Display,
    Agent,
    Both,
}

impl Mode {
    fn flags(self) -> Modality {
        Modality {
            display_mode: matches!(self, Mode::Display | Mode::Both),
            agent_mode: matches!(self, Mode::Agent | Mode::Both),
        }
    }
}

const OK: u8 = 0;
const VIOLATION: u8 = 1;
const FAILURE: u8 = 2;

fn color_enabled() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stdout().is_terminal()
}

fn load_policy(path: &Path) -> Result<PolicyDocument, u8> {
    let bytes = std::fs::read(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        FAILURE
    })?;
    parse_policy_bytes(&bytes).map_err(|diags| {
        for d in diags.iter() {
            eprintln!("{}:{d}", path.display());
        }
        FAILURE
    })
}

fn check(policy: &Path) -> Result<u8, u8> {
    let doc = load_policy(policy)?;
    println!(
        "{}: ok ({} metric constraint{})",
        policy.display(),
        doc.metrics.len(),
        if doc.metrics.len() == 1 { "" } else { "s" }
    );
    Ok(OK)
}

fn fail(context: &str, e: impl std::fmt::Display) -> u8 {
    eprintln!("{context}: {e}");
    FAILURE
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    policy: &Path,
    dataset: &Path,
    predictions: Option<&Path>,
    manifest: Option<&Path>,
    json: Option<&Path>,
    deterministic: bool,
    mode: Mode,
) -> Result<u8, u8> {
    let doc = load_policy(policy)?;
    let ds = read_dataset_file(dataset).map_err(|e| fail(&dataset.display().to_string(), e))?;
    let preds = predictions
        .map(|p| read_predictions_file(p, Some(&doc.protected)).map_err(|e| fail(&p.display().to_string(), e)))
        .transpose()?;
    let manifest = manifest
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| fail(&p.display().to_string(), e))?;
            parse_manifest(&text).map_err(|e| fail(&p.display().to_string(), e))
        })
        .transpose()?;

    let mut report = run(Run {
        policy: &doc,
        dataset: &ds,
        predictions: preds.as_ref(),
        manifest: manifest.as_ref(),
    })
    .map_err(|e| fail("evaluate", e))?;
    report.modality = mode.flags();
    if !deterministic {
        report.created_at = Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    }

    print!("{}", render(&report, None, color_enabled()));
    if let Some(path) = json {
        std::fs::write(path, to_json(&report)).map_err(|e| fail(&path.display().to_string(), e))?;
    }
    for e in &report.errors {
        eprintln!("error: {e}");
    }
    Ok(match report.overall {
        Status::Comply => OK,
        Status::Explain => {
            if doc.on_violation == ViolationMode::Halt {
                if let Some(v) = report.first_violation() {
                    eprintln!("halt: {v}");
                }
            }
            VIOLATION
        }
        Status::Error => FAILURE,
    })
}

fn decide_cmd(matrix: &Path, criterion: &str, lambda: Option<f64>) -> Result<u8, u8> {
    let criterion: Criterion = criterion.parse().map_err(|e| fail("decide", e))?;
    let file = std::fs::File::open(matrix).map_err(|e| fail(&matrix.display().to_string(), e))?;
    let m = PayoffMatrix::from_csv(std::io::BufReader::new(file))
        .map_err(|e| fail(&matrix.display().to_string(), e))?;
    let mut spec = DecisionSpec::new(m, criterion);
    if let Some(l) = lambda {
        if criterion != Criterion::Hurwicz {
            eprintln!("warning: --lambda only affects the hurwicz criterion");
        }
        spec.lambda = l;
    }
    let choice = decide(&spec).map_err(|e| fail("decide", e))?;
    print!("{}", render_strategy(&choice, color_enabled()));
    Ok(OK)
}

fn fmt_cmd(policy: &Path, write: bool) -> Result<u8, u8> {
    let doc = load_policy(policy)?;
    let original = std::fs::read_to_string(policy).map_err(|e| fail(&policy.display().to_string(), e))?;
    let canonical = serialize_policy(&doc);
    let changed = canonical != original;
    if write {
        if changed {
            std::fs::write(policy, &canonical).map_err(|e| fail(&policy.display().to_string(), e))?;
            eprintln!("reformatted {}", policy.display());
        }
    } else {
        print!("{canonical}");
    }
    Ok(if changed { VIOLATION } else { OK })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { policy } => check(policy),
        Command::Evaluate {
            policy,
            dataset,
            predictions,
            manifest,
            json,
            deterministic,
            mode,
        } => evaluate(
            policy,
            dataset,
            predictions.as_deref(),
            manifest.as_deref(),
            json.as_deref(),
            *deterministic,
            *mode,
        ),
        Command::Decide {
            matrix,
            criterion,
            lambda,
        } => decide_cmd(matrix, criterion, *lambda),
        Command::Fmt { policy, write } => fmt_cmd(policy, *write),
    };
    ExitCode::from(result.unwrap_or_else(|code| code))
}
