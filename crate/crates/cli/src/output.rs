//! Table and report files.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use num_complex::Complex64;
use num_rational::BigRational;
use qflow_core::growth::LnTable;
use qflow_core::{GaussRat, QPoly, Ring, Series2};
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| anyhow::anyhow!("writing {}: {}", path.display(), e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).context("serializing report")?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// How a coefficient is written to CSV.
pub trait CsvValue: Ring {
    const FLOAT: bool;

    fn cells(&self) -> Vec<String>;
}

impl CsvValue for BigRational {
    const FLOAT: bool = false;

    fn cells(&self) -> Vec<String> {
        vec![self.to_string()]
    }
}

impl CsvValue for GaussRat {
    const FLOAT: bool = false;

    fn cells(&self) -> Vec<String> {
        vec![self.to_string()]
    }
}

impl CsvValue for QPoly {
    const FLOAT: bool = false;

    fn cells(&self) -> Vec<String> {
        vec![self.to_string()]
    }
}

impl CsvValue for Complex64 {
    const FLOAT: bool = true;

    fn cells(&self) -> Vec<String> {
        vec![self.re.to_string(), self.im.to_string()]
    }
}

/// CSV text of a coefficient table, one row per `(n, m, component)`.
pub fn table_csv<R: CsvValue>(t: &Series2<R>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if R::FLOAT {
        w.write_record(["n", "m", "component", "re", "im"]).context("csv")?;
    } else {
        w.write_record(["n", "m", "component", "value"]).context("csv")?;
    }
    for n in 0..=t.nx() {
        for m in 0..=t.ne() {
            for c in 0..t.dim() {
                let mut row = vec![n.to_string(), m.to_string(), c.to_string()];
                row.extend(t.at(n, m, c).cells());
                w.write_record(&row).context("csv")?;
            }
        }
    }
    w.into_inner().map_err(|e| anyhow::anyhow!("csv: {e}").into())
}

/// `ln |value|` of one CSV cell, with `q` substituted for symbolic entries.
fn ln_cell(s: &str, q: Complex64) -> Result<f64, String> {
    let z = Complex64::new(0.0, 0.0);
    if let Ok(r) = s.parse::<BigRational>() {
        return Ok(r.scaled_at(z).ln_abs());
    }
    if let Ok(g) = s.parse::<GaussRat>() {
        return Ok(g.scaled_at(z).ln_abs());
    }
    s.parse::<QPoly>().map(|p| p.scaled_at(q).ln_abs()).map_err(|_| format!("unreadable value {s:?}"))
}

/// Reads one component of a table written by [`table_csv`].
pub fn read_ln_table(path: &Path, component: usize, q: Complex64) -> CliResult<LnTable> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let headers = rd.headers().map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?.clone();
    let float = match headers.iter().collect::<Vec<_>>().as_slice() {
        ["n", "m", "component", "value"] => false,
        ["n", "m", "component", "re", "im"] => true,
        _ => return Err(CliError::Validation(format!("{}: unexpected header {:?}", path.display(), headers))),
    };
    let mut entries = Vec::new();
    let (mut nx, mut ne) = (0usize, 0usize);
    for (line, rec) in rd.records().enumerate() {
        let bad = |msg: String| CliError::Validation(format!("{} row {}: {msg}", path.display(), line + 2));
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let idx = |k: usize| rec.get(k).unwrap_or("").parse::<usize>().map_err(|e| bad(e.to_string()));
        let (n, m, c) = (idx(0)?, idx(1)?, idx(2)?);
        if c != component {
            continue;
        }
        let v = if float {
            let f = |k: usize| rec.get(k).unwrap_or("").parse::<f64>().map_err(|e| bad(e.to_string()));
            Complex64::new(f(3)?, f(4)?).scaled_at(q).ln_abs()
        } else {
            ln_cell(rec.get(3).unwrap_or(""), q).map_err(bad)?
        };
        nx = nx.max(n);
        ne = ne.max(m);
        entries.push((n, m, v));
    }
    if entries.is_empty() {
        return Err(CliError::Validation(format!("{}: no rows for component {component}", path.display())));
    }
    let mut grid = vec![f64::NEG_INFINITY; (nx + 1) * (ne + 1)];
    for (n, m, v) in entries {
        grid[n * (ne + 1) + m] = v;
    }
    Ok(LnTable::from_fn(nx, ne, |n, m| grid[n * (ne + 1) + m]))
}
