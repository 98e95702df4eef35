//! Table emission: CSV with round-trippable decimal floats, or JSON as
//! an array of objects with the same fields.

use std::io::{self, Write};

use serde_json::{Map, Number, Value};

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Str(String),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            // 17 significant digits: enough to reconstruct the exact f64
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Str(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Int(n) => Value::Number((*n).into()),
            Cell::Str(s) => Value::String(s.clone()),
        }
    }
}

/// A rectangular table ready for emission.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(crate::error::Error::invalid(
                "format",
                format!("unknown format `{other}` (expected csv|json)"),
            )),
        }
    }
}

/// Writes the table in the requested format. Rows are flushed one at a
/// time so an I/O failure truncates at a row boundary.
pub fn emit<W: Write>(w: &mut W, table: &Table, format: OutputFormat) -> io::Result<()> {
    match format {
        OutputFormat::Csv => emit_csv(w, table),
        OutputFormat::Json => emit_json(w, table),
    }
}

fn emit_csv<W: Write>(w: &mut W, table: &Table) -> io::Result<()> {
    let mut line = table.columns.join(",");
    line.push('\n');
    w.write_all(line.as_bytes())?;
    for row in &table.rows {
        let mut line = row.iter().map(Cell::to_csv).collect::<Vec<_>>().join(",");
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

fn emit_json<W: Write>(w: &mut W, table: &Table) -> io::Result<()> {
    let array: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (name, cell) in table.columns.iter().zip(row) {
                obj.insert(name.clone(), cell.to_json());
            }
            Value::Object(obj)
        })
        .collect();
    serde_json::to_writer_pretty(&mut *w, &array)?;
    w.write_all(b"\n")
}
