//! `qosc`: tabulation, verification suites, transforms of sampled data and limit studies.

mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qosc::kernels::{boundary_k, poisson_closed, KernelSpec};
use qosc::limits::{classical_limit_study, wavefunction_limit_study, LimitStudy, DEFAULT_Q_SEQUENCE};
use qosc::qhermite::{hermite_q, wavefunction, ThetaPoint};
use qosc::quadrature::gauss_theta_rule;
use qosc::transform::{qfourier, TransformMethod, TransformOptions};
use qosc::verify::{self, Suite, VerifyConfig};
use qosc::{QParam, QoscError, VerificationReport, DEFAULT_TOL};
use serde::Serialize;

use crate::io::{fmt_f64, place_on_rule, read_samples, sidecar_path, write_csv, write_json};

pub const ORDER_ENV: &str = "QOSC_DEFAULT_ORDER";
const TRANSFORM_ORDER: usize = 120;

#[derive(Debug)]
pub enum CliError {
    /// Malformed input or parameters: exit 2.
    Usage(String),
    /// A computation failed or an invariant did not hold: exit 1.
    Failed(String),
}

impl From<QoscError> for CliError {
    fn from(e: QoscError) -> Self {
        match e {
            QoscError::Domain(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "qosc", version, about = "Continuous q-Hermite functions, Poisson kernels and the q-Fourier transform")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate a function on a grid of x (and y) values as CSV.
    Tabulate(TabulateArgs),
    /// Run a verification suite and print its reports as JSON.
    Verify(VerifyArgs),
    /// Apply the q-Fourier transform to samples read from a CSV file.
    Transform(TransformArgs),
    /// Follow a q-quantity towards its classical limit.
    Limit(LimitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Tabulated {
    Hermite,
    Wavefunction,
    Kernel,
    KFunction,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridKind {
    /// Equispaced on [-1, 1], endpoints included.
    Equispaced,
    /// Nodes of the Gauss rule in θ; suitable input for `transform`.
    Gauss,
}

#[derive(clap::Args)]
struct TabulateArgs {
    what: Tabulated,
    #[arg(long)]
    q: f64,
    /// Degree for `hermite` and `wavefunction`.
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Kernel parameter, e.g. `0.5`, `0.9i` or `0.3+0.4i`.
    #[arg(long, default_value = "0.5")]
    t: String,
    #[arg(long, default_value_t = 11)]
    points: usize,
    #[arg(long, value_enum, default_value_t = GridKind::Equispaced)]
    grid: GridKind,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    /// Comma-separated q values.
    #[arg(long)]
    q: Option<String>,
    /// Quadrature order; falls back to QOSC_DEFAULT_ORDER, then to each suite's default.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, default_value_t = 64)]
    nmax: usize,
    /// Replaces every report's tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Record runtime_ms in each report (makes output nondeterministic).
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct TransformArgs {
    /// CSV with columns x, re, im.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    q: f64,
    /// pv, r_extrap or spectral.
    #[arg(long, default_value = "pv")]
    method: String,
    /// Rule order used when the samples are not on Gauss nodes.
    #[arg(long)]
    order: Option<usize>,
    /// Basis size of the spectral method; defaults to half the rule order.
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output CSV; the JSON sidecar goes next to it. Without it, CSV goes to stdout and
    /// the sidecar to stderr.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LimitQuantity {
    Kernel,
    Wavefunction,
}

#[derive(clap::Args)]
struct LimitArgs {
    quantity: LimitQuantity,
    #[arg(long, default_value = "0.5")]
    t: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    xi: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    eta: f64,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 2.0)]
    window: f64,
    #[arg(long, default_value_t = 81)]
    points: usize,
    /// Comma-separated increasing q values.
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Tabulate(a) => tabulate(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Transform(a) => transform_cmd(a),
        Command::Limit(a) => limit_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed(msg)) => {
            eprintln!("qosc: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("qosc: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_t(s: &str) -> Result<Complex64, CliError> {
    s.parse::<Complex64>()
        .map_err(|_| CliError::Usage(format!("`{s}` is not a complex number")))
}

fn parse_q_list(s: &str) -> Result<Vec<f64>, CliError> {
    let list = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| CliError::Usage(format!("`{p}` is not a number"))))
        .collect::<Result<Vec<f64>, _>>()?;
    if list.is_empty() {
        return Err(CliError::Usage("the q list is empty".into()));
    }
    Ok(list)
}

fn env_order() -> Result<Option<usize>, CliError> {
    match std::env::var(ORDER_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&o| o > 0)
            .map(Some)
            .ok_or_else(|| CliError::Usage(format!("{ORDER_ENV}=`{v}` is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

fn grid(kind: GridKind, points: usize) -> Result<Vec<ThetaPoint>, CliError> {
    match kind {
        GridKind::Equispaced => {
            if points < 2 {
                return Err(CliError::Usage("an equispaced grid needs at least two points".into()));
            }
            (0..points)
                .map(|k| {
                    let x = if k + 1 == points { 1.0 } else { -1.0 + 2.0 * k as f64 / (points - 1) as f64 };
                    Ok(ThetaPoint::from_x(x)?)
                })
                .collect()
        }
        GridKind::Gauss => Ok(gauss_theta_rule(points)?.nodes().to_vec()),
    }
}

fn tabulate(a: TabulateArgs) -> Result<(), CliError> {
    let q = QParam::new(a.q)?.q();
    if !(a.tol > 0.0) {
        return Err(CliError::Usage("tolerance must be positive".into()));
    }
    let pts = grid(a.grid, a.points)?;
    let row = |p: &ThetaPoint, v: Complex64| vec![fmt_f64(p.x()), fmt_f64(v.re), fmt_f64(v.im)];
    let (header, rows): (&[&str], Vec<Vec<String>>) = match a.what {
        Tabulated::Hermite => (
            &["x", "re", "im"],
            pts.iter().map(|p| row(p, hermite_q(a.n, p.x(), q).into())).collect(),
        ),
        Tabulated::Wavefunction => (
            &["x", "re", "im"],
            pts.iter()
                .map(|p| Ok(row(p, wavefunction(a.n, p, q, a.tol)?.into())))
                .collect::<Result<_, CliError>>()?,
        ),
        Tabulated::KFunction => (
            &["x", "re", "im"],
            pts.iter()
                .map(|p| Ok(row(p, boundary_k(p, q, a.tol)?)))
                .collect::<Result<_, CliError>>()?,
        ),
        Tabulated::Kernel => {
            let spec = KernelSpec::new(parse_t(&a.t)?, q)?.with_tol(a.tol);
            let mut rows = Vec::with_capacity(pts.len() * pts.len());
            for x in &pts {
                for y in &pts {
                    let v = poisson_closed(&spec, x, y)?;
                    rows.push(vec![fmt_f64(x.x()), fmt_f64(y.x()), fmt_f64(v.re), fmt_f64(v.im)]);
                }
            }
            (&["x", "y", "re", "im"], rows)
        }
    };
    write_csv(a.output.as_deref(), header, &rows)
}

fn verify_cmd(a: VerifyArgs) -> Result<(), CliError> {
    let suite: Suite = a.suite.parse().map_err(|e: QoscError| CliError::Usage(e.to_string()))?;
    let q_list = match &a.q {
        Some(s) => parse_q_list(s)?,
        None => verify::DEFAULT_Q_LIST.to_vec(),
    };
    let cfg = VerifyConfig {
        q_list,
        order: a.order.or(env_order()?),
        nmax: a.nmax,
        tol: a.tol,
        timings: a.timings,
    };
    let reports = verify::run(suite, &cfg)?;
    write_json(a.output.as_deref(), &reports)?;
    let failed: Vec<&VerificationReport> = reports.iter().filter(|r| !r.passed()).collect();
    if failed.is_empty() {
        return Ok(());
    }
    for r in &failed {
        eprintln!(
            "FAIL {} residual {:e} tolerance {:e} {:?}",
            r.name(),
            r.residual(),
            r.tolerance(),
            r.params()
        );
    }
    Err(CliError::Failed(format!("{} of {} checks failed", failed.len(), reports.len())))
}

#[derive(Serialize)]
struct Sidecar {
    method: TransformMethod,
    q: f64,
    order: usize,
    interpolated: bool,
    residual_estimate: f64,
    flagged_rows: usize,
}

fn transform_cmd(a: TransformArgs) -> Result<(), CliError> {
    let method: TransformMethod = a.method.parse().map_err(|e: QoscError| CliError::Usage(e.to_string()))?;
    let q = QParam::new(a.q)?.q();
    let samples = read_samples(&a.input)?;
    let order = a.order.or(env_order()?).unwrap_or(TRANSFORM_ORDER);
    let placed = place_on_rule(&samples, order)?;
    let opts = TransformOptions {
        tol: a.tol,
        spectral_nmax: a.nmax,
        ..TransformOptions::default()
    };
    let res = qfourier(&placed.grid, q, method, &opts)?;
    let nodes = placed.grid.rule().nodes();
    let values = res.values().values();
    let flagged = res.flagged();
    let make_row = |j: usize| {
        vec![
            fmt_f64(nodes[j].x()),
            fmt_f64(values[j].re),
            fmt_f64(values[j].im),
            u8::from(flagged[j]).to_string(),
        ]
    };
    // rows follow the input order when the input sat on the nodes
    let rows: Vec<Vec<String>> = match &placed.input_rows {
        Some(input_rows) => {
            let mut node_of_row = vec![0; input_rows.len()];
            for (j, &i) in input_rows.iter().enumerate() {
                node_of_row[i] = j;
            }
            node_of_row.into_iter().map(make_row).collect()
        }
        None => (0..nodes.len()).map(make_row).collect(),
    };
    write_csv(a.output.as_deref(), &["x", "re", "im", "flagged"], &rows)?;
    let sidecar = Sidecar {
        method,
        q,
        order: nodes.len(),
        interpolated: placed.input_rows.is_none(),
        residual_estimate: res.residual_estimate(),
        flagged_rows: res.flagged_count(),
    };
    match &a.output {
        Some(p) => write_json(Some(&sidecar_path(p)), &sidecar),
        None => {
            let text = serde_json::to_string_pretty(&sidecar).map_err(|e| CliError::Failed(e.to_string()))?;
            eprintln!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct LimitOutput {
    study: LimitStudy,
    report: VerificationReport,
}

fn limit_cmd(a: LimitArgs) -> Result<(), CliError> {
    let q_seq = match &a.q {
        Some(s) => parse_q_list(s)?,
        None => DEFAULT_Q_SEQUENCE.to_vec(),
    };
    let study = match a.quantity {
        LimitQuantity::Kernel => classical_limit_study(parse_t(&a.t)?, a.xi, a.eta, &q_seq)?,
        LimitQuantity::Wavefunction => wavefunction_limit_study(a.n, a.window, a.points, &q_seq)?,
    };
    let report = study.to_report();
    let passed = report.passed();
    write_json(a.output.as_deref(), &LimitOutput { study, report })?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed("errors do not decrease along the q sequence".into()))
    }
}
