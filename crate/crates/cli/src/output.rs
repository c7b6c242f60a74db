use std::cmp::Ordering;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::cli::Format;
use crate::config::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Int(n) => (*n).into(),
            Cell::Text(s) => s.clone().into(),
        }
    }

    fn cmp(&self, other: &Cell) -> Ordering {
        match (self, other) {
            (Cell::Num(a), Cell::Num(b)) => a.total_cmp(b),
            (Cell::Int(a), Cell::Int(b)) => a.cmp(b),
            (Cell::Text(a), Cell::Text(b)) => a.cmp(b),
            _ => Ordering::Equal,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Int(b as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Lexicographic order on the first `keys` columns.
    pub fn sort(&mut self, keys: usize) {
        self.rows.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .take(keys)
                .map(|(x, y)| x.cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        });
    }

    fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Write to stdout; a closed pipe (`| head`) is not an error.
pub fn print_stdout(text: &str) -> Result<(), CliError> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
        _ => Ok(()),
    }
}

/// Result of one experiment: the data table plus run diagnostics.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub table: Table,
    pub diagnostics: Map<String, Value>,
    /// Human-readable lines for the terminal.
    pub summary: Vec<String>,
}

impl Report {
    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.diagnostics
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }
}

fn envelope(experiment: &str, params: &Value, report: &Report) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("experiment".into(), experiment.into());
    m.insert("library_version".into(), entcrit::VERSION.into());
    m.insert("config".into(), params.clone());
    m.insert("columns".into(), json!(report.table.columns));
    m.insert("diagnostics".into(), Value::Object(report.diagnostics.clone()));
    m
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".json");
    PathBuf::from(p)
}

/// Write the table (and sidecar for CSV files); returns the files written.
pub fn emit(
    experiment: &str,
    params: &Value,
    report: &Report,
    path: Option<&Path>,
    format: Format,
) -> Result<Vec<PathBuf>, CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    let mut meta = envelope(experiment, params, report);
    match format {
        Format::Csv => match path {
            Some(p) => {
                report.table.write_csv(std::fs::File::create(p).map_err(io)?)?;
                meta.insert("rows".into(), report.table.rows.len().into());
                let side = sidecar_path(p);
                let text =
                    serde_json::to_string_pretty(&Value::Object(meta)).map_err(|e| CliError::Io(e.to_string()))?;
                std::fs::write(&side, text + "\n").map_err(io)?;
                Ok(vec![p.to_path_buf(), side])
            }
            None => {
                let mut buf = Vec::new();
                report.table.write_csv(&mut buf)?;
                print_stdout(&String::from_utf8_lossy(&buf))?;
                Ok(vec![])
            }
        },
        Format::Json => {
            let rows: Vec<Value> = report
                .table
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                .collect();
            meta.insert("rows".into(), Value::Array(rows));
            let text =
                serde_json::to_string_pretty(&Value::Object(meta)).map_err(|e| CliError::Io(e.to_string()))? + "\n";
            match path {
                Some(p) => {
                    std::fs::write(p, text).map_err(io)?;
                    Ok(vec![p.to_path_buf()])
                }
                None => {
                    print_stdout(&text)?;
                    Ok(vec![])
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_numbers_are_lossless() {
        let mut t = Table::new(&["x", "k"]);
        t.push(vec![0.1.into(), 3usize.into()]);
        t.push(vec![(-1.0 / 3.0).into(), 1usize.into()]);
        t.sort(1);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x,k\n-3.3333333333333331e-1,1\n1.0000000000000001e-1,3\n");
        let back: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        assert_eq!(back, -1.0 / 3.0);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            sidecar_path(Path::new("out/run.csv")),
            PathBuf::from("out/run.csv.json")
        );
    }
}
