//! Command-line front end. `run` takes the argument vector and returns the
//! exit code together with what would be written to stdout and stderr, so the
//! binary is a thin wrapper and the behaviour is testable in-process.
//!
//! Exit codes: 0 compatible (or success), 1 incompatible, 2 inconclusive,
//! 3 input or usage error.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::compat::{
    family_compatible, nonsimple_root_diagnostics, pair_compatible, perturb_family_mean,
    simplex_interior_perturbation, CompatReport, Verdict, Witness,
};
use crate::error::Error;
use crate::interlace::{common_interleaver, InterleaverFailure};
use crate::io::{family_to_json, parse_family};
use crate::oracle::{edge_scan, sample_convex_combinations, scan_to_csv};
use crate::poly::{Family, Poly};
use crate::tolerance::Tolerances;

pub const EXIT_COMPATIBLE: i32 = 0;
pub const EXIT_INCOMPATIBLE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Environment variable naming the default tolerance profile.
pub const PROFILE_ENV: &str = "RRCOMPAT_PROFILE";

#[derive(Debug, Parser)]
#[command(
    name = "rrcompat",
    version,
    about = "Decide compatibility of families of real-rooted polynomials"
)]
struct Cli {
    #[command(flatten)]
    config: CliConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CliConfig {
    /// Tolerance profile: default, strict or loose [env: RRCOMPAT_PROFILE].
    #[arg(long, global = true)]
    profile: Option<String>,
    /// Decide properness in exact rational arithmetic.
    #[arg(long, global = true)]
    exact: bool,
    #[arg(long, global = true)]
    tau_zero: Option<f64>,
    #[arg(long, global = true)]
    tau_root: Option<f64>,
    #[arg(long, global = true)]
    tau_sign: Option<f64>,
    #[arg(long, global = true)]
    tau_proper: Option<f64>,
    #[arg(long, global = true)]
    max_retries: Option<usize>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PerturbMode {
    Mean,
    Interior,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether every convex combination of the family is real-rooted.
    Check { family: PathBuf },
    /// Search for a common interleaver.
    Interleaver { family: PathBuf },
    /// Perturb a compatible family so that its combinations have simple roots.
    Perturb {
        family: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, default_value_t = PerturbMode::Mean)]
        mode: PerturbMode,
    },
    /// Locate convex combinations with non-simple roots.
    Diagnose { family: PathBuf },
    /// Root trajectories along the segment between two members.
    Scan {
        family: PathBuf,
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        edge: Vec<usize>,
        #[arg(short = 'k', default_value_t = 101)]
        k: usize,
    },
    /// Sample convex combinations and test each for real-rootedness.
    Oracle {
        family: PathBuf,
        #[arg(short = 'n', default_value_t = 10_000)]
        n: usize,
    },
    /// The family (r^2 - t^2, t^2 + 2t - 3, t^2 - 2t - 3).
    ExampleCs {
        #[arg(long, conflicts_with_all = ["r_from", "r_to", "steps"])]
        r: Option<f64>,
        #[arg(long, requires_all = ["r_to", "steps"])]
        r_from: Option<f64>,
        #[arg(long, requires_all = ["r_from", "steps"])]
        r_to: Option<f64>,
        #[arg(long, requires_all = ["r_from", "r_to"])]
        steps: Option<usize>,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn out(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, stderr: String) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

pub fn verdict_exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Compatible => EXIT_COMPATIBLE,
        Verdict::Incompatible => EXIT_INCOMPATIBLE,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Exit code for a library error surfacing from a subcommand.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::NotRealRootedInput { .. } | Error::Not3Compatible { .. } | Error::NotCompatible => {
            EXIT_INCOMPATIBLE
        }
        Error::NotProper { .. }
        | Error::CommonRootPresent { .. }
        | Error::RetryBudgetExhausted { .. }
        | Error::NotRealRooted { .. } => EXIT_INCONCLUSIVE,
        _ => EXIT_USAGE,
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome::out(0, text)
            } else {
                Outcome::fail(code, text)
            };
        }
    };
    let tol = match tolerances(&cli.config) {
        Ok(t) => t,
        Err(e) => return Outcome::fail(EXIT_USAGE, format!("error: {e}\n")),
    };
    match dispatch(&cli, &tol) {
        Ok(o) => o,
        Err(e) => Outcome::fail(error_exit_code(&e), format!("error: {e}\n")),
    }
}

fn tolerances(c: &CliConfig) -> crate::Result<Tolerances> {
    let name = match &c.profile {
        Some(p) => p.clone(),
        None => std::env::var(PROFILE_ENV).unwrap_or_else(|_| "default".into()),
    };
    let mut tol = Tolerances::profile(&name)?;
    if let Some(v) = c.tau_zero {
        tol.tau_zero = v;
    }
    if let Some(v) = c.tau_root {
        tol.tau_root = v;
    }
    if let Some(v) = c.tau_sign {
        tol.tau_sign = v;
    }
    if let Some(v) = c.tau_proper {
        tol.tau_proper = v;
    }
    if let Some(v) = c.max_retries {
        tol.max_retries = v;
    }
    tol.exact_rational |= c.exact;
    tol.validate()?;
    Ok(tol)
}

fn load(path: &PathBuf) -> crate::Result<Family> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    parse_family(&text)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports are always serialisable");
    s.push('\n');
    s
}

fn format_or(c: &CliConfig, default: Format, allowed: &[Format]) -> crate::Result<Format> {
    let f = c.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Error::InvalidInput(format!(
            "format {f:?} is not available for this command"
        )))
    }
}

fn dispatch(cli: &Cli, tol: &Tolerances) -> crate::Result<Outcome> {
    let c = &cli.config;
    match &cli.command {
        Command::Check { family } => {
            let fmt = format_or(c, Format::Json, &[Format::Json, Format::Text])?;
            let fam = load(family)?;
            let report = family_compatible(&fam, tol)?;
            Ok(Outcome::out(
                verdict_exit_code(report.verdict),
                render_report(&report, &fam, fmt),
            ))
        }
        Command::Interleaver { family } => {
            let fmt = format_or(c, Format::Json, &[Format::Json, Format::Text])?;
            let fam = load(family)?;
            let res = common_interleaver(&fam, tol)?;
            let code = match (&res.witness, res.failure_reason) {
                (Some(_), _) => EXIT_COMPATIBLE,
                (None, Some(InterleaverFailure::NotPairwiseConsistent)) => EXIT_INCOMPATIBLE,
                (None, _) => EXIT_INCONCLUSIVE,
            };
            let body = match fmt {
                Format::Text => match (&res.witness, res.failure_reason) {
                    (Some(g), _) => format!("interleaver: {}\n", poly_text(g)),
                    (None, reason) => format!("no interleaver: {reason:?}\n"),
                },
                _ => to_json(&res),
            };
            Ok(Outcome::out(code, body))
        }
        Command::Perturb {
            family,
            epsilon,
            mode,
        } => {
            format_or(c, Format::Json, &[Format::Json])?;
            let fam = load(family)?;
            let eps = epsilon.unwrap_or(tol.epsilon_perturb);
            let out = match mode {
                PerturbMode::Mean => perturb_family_mean(&fam, eps, tol)?,
                PerturbMode::Interior => simplex_interior_perturbation(&fam, eps, tol)?,
            };
            Ok(Outcome::out(EXIT_COMPATIBLE, family_to_json(&out) + "\n"))
        }
        Command::Diagnose { family } => {
            format_or(c, Format::Json, &[Format::Json])?;
            let fam = load(family)?;
            let diags = nonsimple_root_diagnostics(&fam, tol)?;
            let code = if diags
                .iter()
                .any(|d| d.missing_member_root || d.sign_violation)
            {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_COMPATIBLE
            };
            Ok(Outcome::out(code, to_json(&diags)))
        }
        Command::Scan { family, edge, k } => {
            let fmt = format_or(c, Format::Csv, &[Format::Csv, Format::Json])?;
            let fam = load(family)?;
            let (i, j) = (edge[0], edge[1]);
            if i >= fam.len() || j >= fam.len() {
                return Err(Error::InvalidInput(format!(
                    "edge ({i}, {j}) is out of range for {} members",
                    fam.len()
                )));
            }
            if *k < 2 {
                return Err(Error::InvalidInput("-k must be at least 2".into()));
            }
            let rows = edge_scan(fam.get(i), fam.get(j), *k, tol);
            let body = match fmt {
                Format::Json => to_json(&rows),
                _ => scan_to_csv(&rows, fam.ambient_degree()),
            };
            Ok(Outcome::out(EXIT_COMPATIBLE, body))
        }
        Command::Oracle { family, n } => {
            format_or(c, Format::Json, &[Format::Json])?;
            let fam = load(family)?;
            let report = sample_convex_combinations(&fam, *n, c.seed, tol);
            let code = if report.violations.is_empty() {
                EXIT_COMPATIBLE
            } else {
                EXIT_INCOMPATIBLE
            };
            Ok(Outcome::out(code, to_json(&report)))
        }
        Command::ExampleCs {
            r,
            r_from,
            r_to,
            steps,
        } => match (r, r_from, r_to, steps) {
            (Some(r), _, _, _) => {
                let fmt = format_or(c, Format::Json, &[Format::Json, Format::Text])?;
                let fam = cs_family(*r)?;
                let report = family_compatible(&fam, tol)?;
                Ok(Outcome::out(
                    verdict_exit_code(report.verdict),
                    render_report(&report, &fam, fmt),
                ))
            }
            (None, Some(a), Some(b), Some(k)) => {
                format_or(c, Format::Csv, &[Format::Csv])?;
                Ok(Outcome::out(EXIT_COMPATIBLE, cs_sweep(*a, *b, *k, tol)?))
            }
            _ => Err(Error::InvalidInput(
                "example-cs needs --r or all of --r-from, --r-to, --steps".into(),
            )),
        },
    }
}

/// `(r^2 - t^2, t^2 + 2t - 3, t^2 - 2t - 3)` labelled `f`, `g`, `h`.
pub fn cs_family(r: f64) -> crate::Result<Family> {
    if !r.is_finite() {
        return Err(Error::NonFinite);
    }
    Family::new(vec![
        Poly::new(vec![r * r, 0.0, -1.0]),
        Poly::new(vec![-3.0, 2.0, 1.0]),
        Poly::new(vec![-3.0, -2.0, 1.0]),
    ])?
    .with_labels(vec!["f".into(), "g".into(), "h".into()])
}

/// One CSV row per `r`: verdicts for the pairs `(f, g)`, `(f, h)` and the triple.
pub fn cs_sweep(from: f64, to: f64, steps: usize, tol: &Tolerances) -> crate::Result<String> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidInput(
            "a sweep needs finite bounds and at least one step".into(),
        ));
    }
    let mut out = String::from("r,pair_fg,pair_fh,triple\n");
    for i in 0..steps {
        let r = if steps == 1 {
            from
        } else {
            from + (to - from) * i as f64 / (steps - 1) as f64
        };
        let fam = cs_family(r)?;
        let fg = pair_compatible(fam.get(0), fam.get(1), tol)?.verdict;
        let fh = pair_compatible(fam.get(0), fam.get(2), tol)?.verdict;
        let all = family_compatible(&fam, tol)?.verdict;
        writeln!(out, "{r},{fg:?},{fh:?},{all:?}").expect("writing to a String");
    }
    Ok(out)
}

fn poly_text(p: &Poly) -> String {
    let terms: Vec<String> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(k, c)| match k {
            0 => format!("{c}"),
            1 => format!("{c} t"),
            _ => format!("{c} t^{k}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn member_name(fam: &Family, i: usize) -> String {
    match fam.labels() {
        Some(l) => l[i].clone(),
        None => format!("#{i}"),
    }
}

fn render_report(report: &CompatReport, fam: &Family, fmt: Format) -> String {
    if fmt != Format::Text {
        return to_json(report);
    }
    let mut s = format!("verdict: {:?}\n", report.verdict);
    let w = match &report.witness {
        Witness::Interleaver { poly } => format!("common interleaver {}", poly_text(poly)),
        Witness::ZeroComboPlusInterlacing { weights, pair } => format!(
            "zero combination {weights:?}; {} and {} interlace",
            member_name(fam, pair[0]),
            member_name(fam, pair[1])
        ),
        Witness::Counterexample { weights, margin } => {
            format!("combination {weights:?} has non-real roots (margin {margin:.3e})")
        }
        Witness::TripleCounterexample {
            indices,
            weights,
            margin,
        } => {
            let names: Vec<String> = indices.iter().map(|&i| member_name(fam, i)).collect();
            format!(
                "triple ({}) fails: combination {weights:?} has non-real roots (margin {margin:.3e})",
                names.join(", ")
            )
        }
        Witness::MarginBand { margin } => {
            format!("strongest evidence within the tolerance band (margin {margin:.3e})")
        }
        Witness::AllTriplesCompatible => "every triple is compatible".into(),
    };
    let _ = writeln!(s, "witness: {w}");
    let _ = writeln!(s, "triples checked: {}", report.triples_checked);
    s
}
