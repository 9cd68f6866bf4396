use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use qosc::qhermite::ThetaPoint;
use qosc::quadrature::{gauss_theta_rule, GridFunction, QuadratureRule};
use serde::Serialize;

use crate::CliError;

/// `{:.16e}`: seventeen significant digits, so values survive a round trip exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

pub fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(open_output(path)?);
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(row).map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::Failed(e.to_string()))
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Failed(e.to_string()))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| CliError::Failed(e.to_string()))
}

fn io_err(e: csv::Error) -> CliError {
    CliError::Failed(e.to_string())
}

/// `path` with its extension replaced by `json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Samples `(x, value)` read from a CSV with columns `x`, `re`, `im` (others ignored).
pub fn read_samples(path: &Path) -> Result<Vec<(f64, Complex64)>, CliError> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let bad = |msg: String| CliError::Usage(format!("{}: {msg}", path.display()));
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column `{name}`")))
    };
    let (cx, cre, cim) = (col("x")?, col("re")?, col("im")?);
    let mut out = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |c: usize| -> Result<f64, CliError> {
            let s = rec.get(c).ok_or_else(|| bad(format!("row {}: too few fields", line + 1)))?;
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("row {}: `{s}` is not a finite number", line + 1)))
        };
        let x = field(cx)?;
        if !(-1.0..=1.0).contains(&x) {
            return Err(bad(format!("row {}: x = {x} lies outside [-1, 1]", line + 1)));
        }
        out.push((x, Complex64::new(field(cre)?, field(cim)?)));
    }
    if out.len() < 2 {
        return Err(bad("need at least two samples".into()));
    }
    Ok(out)
}

/// Samples placed on a θ-rule, with the row of the input that fed each node if the input
/// already sat on the rule's nodes.
pub struct Placed {
    pub grid: GridFunction,
    pub input_rows: Option<Vec<usize>>,
}

/// Uses the samples directly when their abscissae are the nodes of the Gauss θ-rule of
/// the same size; otherwise interpolates them onto the rule of `order`.
pub fn place_on_rule(samples: &[(f64, Complex64)], order: usize) -> Result<Placed, CliError> {
    let lib = |e: qosc::QoscError| CliError::Usage(e.to_string());
    let rule = gauss_theta_rule(samples.len()).map_err(lib)?;
    let mut by_theta: Vec<usize> = (0..samples.len()).collect();
    // increasing θ is decreasing x, the rule's storage order
    by_theta.sort_by(|&a, &b| samples[b].0.total_cmp(&samples[a].0));
    let on_nodes = by_theta
        .iter()
        .zip(rule.nodes())
        .all(|(&i, p)| (samples[i].0 - p.x()).abs() <= 1e-13);
    if on_nodes {
        let values = by_theta.iter().map(|&i| samples[i].1).collect();
        let grid = GridFunction::new(rule, values).map_err(lib)?;
        return Ok(Placed {
            grid,
            input_rows: Some(by_theta),
        });
    }
    let rule = gauss_theta_rule(order).map_err(lib)?;
    Ok(Placed {
        grid: interpolate(samples, &by_theta, &rule).map_err(lib)?,
        input_rows: None,
    })
}

/// Local cubic interpolation in `θ` of `v / sin^{1/2} θ`, the endpoint behaviour of the
/// oscillator wave functions divided out.
fn interpolate(
    samples: &[(f64, Complex64)],
    by_theta: &[usize],
    rule: &Arc<QuadratureRule>,
) -> qosc::Result<GridFunction> {
    let pts: Vec<(f64, Complex64)> = by_theta
        .iter()
        .map(|&i| {
            let p = ThetaPoint::from_x(samples[i].0)?;
            Ok((p.theta(), samples[i].1, p.sin_theta()))
        })
        .collect::<qosc::Result<Vec<_>>>()?
        .into_iter()
        .filter(|&(_, _, s)| s > 0.0)
        .map(|(t, v, s)| (t, v / s.sqrt()))
        .collect();
    if pts.len() < 4 {
        return Err(qosc::QoscError::Domain("need at least four interior samples to interpolate".into()));
    }
    let values = rule
        .nodes()
        .iter()
        .map(|p| {
            let th = p.theta();
            let k = pts.partition_point(|&(t, _)| t < th);
            let start = k.saturating_sub(2).min(pts.len() - 4);
            let win = &pts[start..start + 4];
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &(ti, vi)) in win.iter().enumerate() {
                let mut l = 1.0;
                for (j, &(tj, _)) in win.iter().enumerate() {
                    if i != j {
                        l *= (th - tj) / (ti - tj);
                    }
                }
                acc += vi * l;
            }
            acc * p.sin_theta().sqrt()
        })
        .collect();
    GridFunction::new(rule.clone(), values)
}
