use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::ExperimentRecord;
use crate::error::{Error, Result};

const HEADER: [&str; 4] = ["method", "rep", "t", "consensus_error"];

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// 17 significant digits, always in exponent form.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes records sorted by `(method, rep, t)`. The `mse` column is present
/// when any record carries one.
pub fn write_csv<W: Write>(
    records: &[ExperimentRecord],
    out: W,
) -> std::result::Result<(), csv::Error> {
    let with_mse = records.iter().any(|r| r.mse.is_some());
    let mut sorted: Vec<&ExperimentRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (&a.method, a.rep, a.t).cmp(&(&b.method, b.rep, b.t)));
    let mut w = csv::Writer::from_writer(out);
    let mut header = HEADER.to_vec();
    if with_mse {
        header.push("mse");
    }
    w.write_record(&header)?;
    for r in sorted {
        let mut row = vec![
            r.method.clone(),
            r.rep.to_string(),
            r.t.to_string(),
            fmt_float(r.consensus_error),
        ];
        if with_mse {
            row.push(r.mse.map(fmt_float).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_csv(records: &[ExperimentRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(records, file).map_err(csv_err(path))
}

pub fn read_csv<R: std::io::Read>(
    input: R,
) -> std::result::Result<Vec<ExperimentRecord>, csv::Error> {
    let mut rd = csv::Reader::from_reader(input);
    let with_mse = rd.headers()?.iter().any(|h| h == "mse");
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let field = |i: usize| row.get(i).unwrap_or_default();
        let parse_err = |what: &str| {
            csv::Error::from(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!(
                    "bad {what} on line {}",
                    row.position().map_or(0, |p| p.line())
                ),
            ))
        };
        out.push(ExperimentRecord {
            method: field(0).to_string(),
            rep: field(1).parse().map_err(|_| parse_err("rep"))?,
            t: field(2).parse().map_err(|_| parse_err("t"))?,
            consensus_error: field(3).parse().map_err(|_| parse_err("consensus_error"))?,
            mse: match (with_mse, field(4)) {
                (true, s) if !s.is_empty() => Some(s.parse().map_err(|_| parse_err("mse"))?),
                _ => None,
            },
        });
    }
    Ok(out)
}

pub fn import_csv(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file).map_err(csv_err(path))
}
