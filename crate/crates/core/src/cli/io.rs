use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use super::{CliError, ResultDocument, TrajectoryPoint};
use crate::paths::{polyline_with_knots, PathSpec};
use crate::verify::ResidualReport;

/// Reads a piecewise-linear path from CSV with header `t,x1,...,xd`. The
/// `t` column must increase strictly from 0 to 1.
pub fn read_path_file(path: &Path) -> Result<PathSpec, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    read_path_csv(file)
}

pub fn read_path_csv<R: Read>(reader: R) -> Result<PathSpec, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let d = headers.len().saturating_sub(1);
    let expected = std::iter::once("t".to_string()).chain((1..=d).map(|i| format!("x{i}")));
    if d == 0 || !headers.iter().eq(expected) {
        return Err(CliError::PathFile(format!("header must be t,x1,...,xd, got {:?}", headers.iter().collect::<Vec<_>>())));
    }
    let (mut knots, mut points) = (Vec::new(), Vec::new());
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let row: Vec<f64> = record
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::PathFile(format!("row {}: {e}", line + 1)))?;
        if let Some(&prev) = knots.last() {
            if !(row[0] > prev) {
                return Err(CliError::PathFile(format!("t must increase strictly (row {})", line + 1)));
            }
        }
        knots.push(row[0]);
        points.push(row[1..].to_vec());
    }
    if knots.len() < 2 || knots[0] != 0.0 || *knots.last().unwrap() != 1.0 {
        return Err(CliError::PathFile("t must run from 0 to 1 over at least two rows".into()));
    }
    polyline_with_knots(&points, knots).map_err(|e| CliError::PathFile(e.to_string()))
}

fn csv_error(e: csv::Error) -> CliError {
    match e.kind() {
        csv::ErrorKind::UnequalLengths { .. } => CliError::PathFile(format!("ragged rows: {e}")),
        _ => CliError::PathFile(e.to_string()),
    }
}

/// Decimal with 17 significant digits, enough to round-trip any double.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv<W: Write>(doc: &ResultDocument, out: W) -> Result<(), CliError> {
    let d = doc.trajectory.first().map_or(0, |p| p.x.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=d).map(|i| format!("x{i}")));
    header.extend(["qw", "qx", "qy", "qz"].map(String::from));
    w.write_record(&header).map_err(|e| CliError::Io(e.to_string()))?;
    for p in &doc.trajectory {
        let row: Vec<String> = std::iter::once(p.t).chain(p.x.iter().copied()).chain(p.quat).map(fmt17).collect();
        w.write_record(&row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn reports_csv<W: Write>(reports: &[ResidualReport], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["name", "max_residual", "tolerance", "samples", "pass"]).map_err(|e| CliError::Io(e.to_string()))?;
    for r in reports {
        w.write_record([r.name.clone(), fmt17(r.max_residual), fmt17(r.tolerance), r.samples.to_string(), r.pass.to_string()])
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// Parses a trajectory written by [`trajectory_csv`].
pub fn read_trajectory_csv<R: Read>(reader: R) -> Result<Vec<TrajectoryPoint>, CliError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let width = rdr.headers().map_err(csv_error)?.len();
    if width < 5 {
        return Err(CliError::PathFile("trajectory needs t, coordinates and a quaternion".into()));
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let v: Vec<f64> = record
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::PathFile(e.to_string()))?;
        let q = &v[width - 4..];
        out.push(TrajectoryPoint { t: v[0], x: v[1..width - 4].to_vec(), quat: [q[0], q[1], q[2], q[3]] });
    }
    Ok(out)
}

pub fn render(doc: &ResultDocument, format: super::FormatArg) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match format {
        super::FormatArg::Json => {
            serde_json::to_writer_pretty(&mut buf, doc).map_err(|e| CliError::Io(e.to_string()))?;
            buf.push(b'\n');
        }
        super::FormatArg::Csv if doc.trajectory.is_empty() && !doc.reports.is_empty() => reports_csv(&doc.reports, &mut buf)?,
        super::FormatArg::Csv => trajectory_csv(doc, &mut buf)?,
    }
    Ok(buf)
}

/// Writes the document to `out`, or to stdout without one.
pub fn write_result(doc: &ResultDocument, format: super::FormatArg, out: Option<&Path>) -> Result<(), CliError> {
    let bytes = render(doc, format)?;
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string())),
    }
}
