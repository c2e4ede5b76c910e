//! Plot-ready tables and snapshots. Every float is written with 17
//! significant digits so that files round-trip exactly.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::RunReport;
use crate::spectral::{Field, Grid};

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table with a fixed header, built row by row.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table {
            header: header.iter().map(|h| h.as_ref().to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| fmt_f64(x)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_to(File::create(path)?)
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}

/// Column label for a Sobolev index: `hs1`, `hs1.5`.
pub fn sobolev_label(s: f64) -> String {
    if s.fract() == 0.0 {
        format!("hs{}", s as i64)
    } else {
        format!("hs{s}")
    }
}

/// `t,E,hs…,zero_mode,drift_resid`.
pub fn run_table(report: &RunReport) -> Table {
    let mut header = vec!["t".to_owned(), "E".to_owned()];
    header.extend(report.hs_norms.iter().map(|h| sobolev_label(h.s)));
    header.push("zero_mode".into());
    header.push("drift_resid".into());
    let mut table = Table::new(&header);
    let resid = report.drift_residual();
    for i in 0..report.times.len() {
        let mut row = vec![report.times[i], report.energy[i]];
        row.extend(report.hs_norms.iter().map(|h| h.values[i]));
        row.push(report.zero_mode[i]);
        row.push(resid[i]);
        table.push_floats(&row);
    }
    table
}

/// `t,E,dEdt,predicted,residual`.
pub fn drift_table(report: &RunReport) -> Table {
    let mut table = Table::new(&["t", "E", "dEdt", "predicted", "residual"]);
    for i in 0..report.times.len() {
        table.push_floats(&[
            report.times[i],
            report.energy[i],
            report.energy_rate[i],
            report.drift_predicted[i],
            report.energy_rate[i] - report.drift_predicted[i],
        ]);
    }
    table
}

/// Physical snapshot `x,eta`.
pub fn snapshot_table(f: &Field) -> Table {
    let mut table = Table::new(&["x", "eta"]);
    for (x, v) in f.grid().points().iter().zip(f.samples()) {
        table.push_floats(&[*x, *v]);
    }
    table
}

/// Spectral dump `j,xi,re,im` in FFT order.
pub fn spectrum_table(f: &Field) -> Table {
    let g = f.grid();
    let mut table = Table::new(&["j", "xi", "re", "im"]);
    for (k, c) in f.spectral().iter().enumerate() {
        table.push(vec![
            g.mode(k).to_string(),
            fmt_f64(g.wavenumber(k)),
            fmt_f64(c.re),
            fmt_f64(c.im),
        ]);
    }
    table
}

pub fn write_snapshot(path: &Path, f: &Field) -> Result<()> {
    snapshot_table(f).save(path)
}

/// Reads an `x,eta` snapshot on a uniform grid starting at `x = 0`.
pub fn read_snapshot(path: &Path) -> Result<Field> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    if header.len() != 2 || &header[0] != "x" || &header[1] != "eta" {
        return Err(Error::invalid("snapshot", "expected header `x,eta`"));
    }
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::invalid("snapshot", format!("bad number `{s}`: {e}")))
        };
        xs.push(parse(&rec[0])?);
        vs.push(parse(&rec[1])?);
    }
    let n = xs.len();
    if n < 4 {
        return Err(Error::invalid("snapshot", "need at least four rows"));
    }
    let dx = xs[1] - xs[0];
    let uniform = xs
        .iter()
        .enumerate()
        .all(|(k, x)| (x - k as f64 * dx).abs() <= 1e-9 * dx.abs().max(1.0) * n as f64);
    if xs[0].abs() > 1e-12 || !(dx > 0.0) || !uniform {
        return Err(Error::invalid("snapshot", "x must be uniform and start at 0"));
    }
    let grid = Grid::new(n, n as f64 * dx)?;
    Field::from_samples(grid, vs)
}
