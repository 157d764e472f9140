mod config;
mod output;
mod suites;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pecurv_core::geometry::{self, LocalGeometry};
use pecurv_core::integrate::{reference_point, renormalized_volume, NormalFormVolume};
use pecurv_core::invariants::NaturalScalar;
use pecurv_core::{CheckReport, Error};
use serde::Serialize;

use config::{Format, RunConfig};
use output::Tagged;

const EXIT_INVALID: u8 = 2;
const EXIT_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "pecurv", version, about = "Verify curvature-invariant identities on model manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List verification suites with a one-line description each.
    List,
    /// Run one or more suites (`all` runs every suite).
    Verify(VerifyArgs),
    /// Renormalized volume of a model in geodesic normal form.
    Rvol {
        #[arg(long, value_enum, default_value_t = Space::Hyperbolic)]
        space: Space,
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// Evaluate a scalar invariant at a point of a catalog manifold.
    Eval {
        /// e.g. weyl-norm, scalar-curvature, pf2-weyl, weyl-3-1
        invariant: String,
        #[arg(long)]
        manifold: String,
        /// Chart coordinates; defaults to a fixed interior point.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
        #[arg(long)]
        jet_order: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Hyperbolic,
}

#[derive(Args)]
struct VerifyArgs {
    suites: Vec<String>,
    /// JSON file with the same fields as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    manifold: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    jet_order: Option<usize>,
    #[arg(long)]
    invariant: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl VerifyArgs {
    fn into_config(self) -> Result<RunConfig, String> {
        let base = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            suites: self.suites,
            manifold: self.manifold,
            tol: self.tol,
            seed: self.seed,
            samples: self.samples,
            n: self.n,
            dim: self.dim,
            jet_order: self.jet_order,
            invariant: self.invariant,
            format: self.format,
            out: self.out,
        };
        Ok(base.overridden_by(flags))
    }
}

/// Errors caused by the request rather than by the computation.
fn is_precondition(e: &Error) -> bool {
    matches!(
        e,
        Error::DimensionTooSmall { .. }
            | Error::OrderOutOfRange { .. }
            | Error::OddDimension(_)
            | Error::NotEinstein(_)
            | Error::NonCompact(_)
            | Error::UnknownEulerCharacteristic(_)
            | Error::ExcludedWeight { .. }
            | Error::OutOfDomain(_)
            | Error::NonNormalForm(_)
            | Error::TooLarge(_)
            | Error::Unsupported(_)
    )
}

fn invalid(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INVALID)
}

fn list() -> ExitCode {
    for s in suites::SUITES {
        let m = s.default_manifold.map(|m| format!(" [default manifold {m}]")).unwrap_or_default();
        println!("{:<20} → {}{m}", s.name, s.anchor);
    }
    println!("\nmanifolds: {}", geometry::CATALOG_NAMES.join(", "));
    ExitCode::SUCCESS
}

fn verify(args: VerifyArgs) -> ExitCode {
    let cfg = match args.into_config() {
        Ok(c) => c,
        Err(e) => return invalid(e),
    };
    let selected = match cfg.validate() {
        Ok(s) => s,
        Err(e) => return invalid(e),
    };
    let mut reports: Vec<Tagged> = Vec::new();
    for suite in selected {
        match (suite.run)(suite, &cfg) {
            Ok(rs) => reports.extend(rs.into_iter().map(|r| (suite.name, r))),
            Err(e) if is_precondition(&e) => return invalid(format!("suite `{}`: {e}", suite.name)),
            Err(e) => {
                eprintln!("check `{}` failed: {e}", suite.name);
                reports.push((suite.name, CheckReport::failure(suite.name, suite.anchor, suite.tol(&cfg), e.to_string())));
            }
        }
    }
    if let Err(e) = emit(&cfg, &reports) {
        return invalid(format!("cannot write report: {e}"));
    }
    let failed: Vec<&str> = reports.iter().filter(|(_, r)| !r.pass).map(|(_, r)| r.id.as_str()).collect();
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed checks: {}", failed.join(", "));
        ExitCode::from(EXIT_FAILED)
    }
}

// Reports go to --out when given (summary on stdout), otherwise to stdout
// with the summary on stderr so stdout stays machine-readable.
fn emit(cfg: &RunConfig, reports: &[Tagged]) -> io::Result<()> {
    let format = cfg.format();
    match &cfg.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            output::write_reports(&mut f, format, reports)?;
            f.flush()?;
            output::write_table(&mut io::stdout().lock(), reports)
        }
        None => {
            output::write_reports(&mut io::stdout().lock(), format, reports)?;
            if format != Format::Table {
                output::write_table(&mut io::stderr().lock(), reports)?;
            }
            Ok(())
        }
    }
}

fn rvol(space: Space, n: usize) -> ExitCode {
    if !n.is_multiple_of(2) {
        return invalid(format!("renormalized volume is defined here only for even n, got {n}"));
    }
    let data = match space {
        Space::Hyperbolic => NormalFormVolume::hyperbolic(n),
    };
    match data.and_then(|d| renormalized_volume(&d)) {
        Ok(v) => {
            println!("{v:.15}");
            ExitCode::SUCCESS
        }
        Err(e) if is_precondition(&e) => invalid(e),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}

#[derive(Serialize)]
struct EvalOutput {
    manifold: String,
    point: Vec<f64>,
    invariant: String,
    weight: i32,
    value: f64,
}

fn eval(invariant: &str, manifold: &str, point: Option<Vec<f64>>, jet_order: Option<usize>) -> ExitCode {
    let scalar: NaturalScalar = match invariant.parse() {
        Ok(s) => s,
        Err(e) => return invalid(e),
    };
    let model = match geometry::by_name(manifold) {
        Ok(m) => m,
        Err(e) => return invalid(e),
    };
    let need = scalar.derivative_order();
    if jet_order.is_some_and(|cap| need > cap) {
        return invalid(format!("`{scalar}` needs jet order {need}"));
    }
    let point = point.unwrap_or_else(|| reference_point(model.chart.as_ref()));
    if point.len() != model.dim() {
        return invalid(format!("point has {} coordinates, manifold `{}` has dimension {}", point.len(), model.name, model.dim()));
    }
    let value = LocalGeometry::at(model.chart.as_ref(), &point, need).and_then(|geo| scalar.value_at(&geo));
    match value {
        Ok(v) => {
            let out = EvalOutput { manifold: model.name.clone(), point, invariant: v.name, weight: v.weight, value: v.value };
            println!("{}", serde_json::to_string(&out).expect("serializable"));
            ExitCode::SUCCESS
        }
        Err(e) if is_precondition(&e) => invalid(e),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => list(),
        Command::Verify(args) => verify(args),
        Command::Rvol { space, n } => rvol(space, n),
        Command::Eval { invariant, manifold, point, jet_order } => eval(&invariant, &manifold, point, jet_order),
    }
}
