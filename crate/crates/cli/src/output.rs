use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Rows of formatted cells under a fixed header.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct Provenance<'a> {
    pub seed: u64,
    pub scenario_hash: &'a str,
}

impl Provenance<'_> {
    pub fn comment(&self) -> String {
        format!(
            "# mcvd-duo {} seed={} scenario_sha256={}",
            env!("CARGO_PKG_VERSION"),
            self.seed,
            self.scenario_hash
        )
    }
}

pub fn render_csv(table: &Table, prov: &Provenance) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    writeln!(buf, "{}", prov.comment()).map_err(|e| CliError::io(e.to_string()))?;
    let mut w = csv::Writer::from_writer(buf);
    let csv_err = |e: csv::Error| CliError::io(e.to_string());
    w.write_record(&table.header).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::io(e.to_string()))
}

/// Writes to `out`, or stdout when absent.
pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    let res = match out {
        Some(p) => std::fs::write(p, bytes),
        None => std::io::stdout().lock().write_all(bytes),
    };
    res.map_err(|e| CliError::io(e.to_string()))
}
