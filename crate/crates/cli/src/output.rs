//! Deterministic machine-readable output.
//!
//! CSV floats are printed with 17 significant digits (`{:.16e}`), '.'
//! decimal separator, and '\n' line endings, so identical configs produce
//! byte-identical files.

use std::io::Write;

use anyhow::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
}

/// 17-significant-digit float formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl Value {
    fn csv_cell(&self) -> String {
        match self {
            Value::Number(x) => fmt_f64(*x),
            Value::Text(s) => s.replace(',', ";"),
        }
    }

    fn json_value(&self) -> serde_json::Value {
        match self {
            Value::Number(x) if x.is_finite() => serde_json::json!(x),
            Value::Number(x) => serde_json::json!(x.to_string()),
            Value::Text(s) => serde_json::json!(s),
        }
    }
}

/// Streaming CSV writer: header once, flush after every row.
pub struct CsvWriter<W: Write> {
    sink: W,
    wrote_header: bool,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(sink: W) -> Self {
        Self {
            sink,
            wrote_header: false,
        }
    }

    pub fn write_row(&mut self, columns: &[String], values: &[Value]) -> Result<()> {
        if !self.wrote_header {
            self.sink.write_all(columns.join(",").as_bytes())?;
            self.sink.write_all(b"\n")?;
            self.wrote_header = true;
        }
        let cells: Vec<String> = values.iter().map(Value::csv_cell).collect();
        self.sink.write_all(cells.join(",").as_bytes())?;
        self.sink.write_all(b"\n")?;
        self.sink.flush()?;
        Ok(())
    }
}

/// Buffered JSON writer ({"columns": [...], "rows": [[...], ...]}).
pub struct JsonWriter<W: Write> {
    sink: W,
    columns: Vec<String>,
    rows: Vec<Vec<serde_json::Value>>,
}

impl<W: Write> JsonWriter<W> {
    pub fn new(sink: W) -> Self {
        Self {
            sink,
            columns: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn write_row(&mut self, columns: &[String], values: &[Value]) -> Result<()> {
        if self.columns.is_empty() {
            self.columns = columns.to_vec();
        }
        self.rows
            .push(values.iter().map(Value::json_value).collect());
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        let doc = serde_json::json!({
            "columns": self.columns,
            "rows": self.rows,
        });
        serde_json::to_writer_pretty(&mut self.sink, &doc)?;
        self.sink.write_all(b"\n")?;
        self.sink.flush()?;
        Ok(())
    }
}

pub enum RowWriter<W: Write> {
    Csv(CsvWriter<W>),
    Json(JsonWriter<W>),
}

impl<W: Write> RowWriter<W> {
    pub fn write_row(&mut self, columns: &[String], values: &[Value]) -> Result<()> {
        match self {
            RowWriter::Csv(w) => w.write_row(columns, values),
            RowWriter::Json(w) => w.write_row(columns, values),
        }
    }

    pub fn finish(self) -> Result<()> {
        match self {
            RowWriter::Csv(_) => Ok(()),
            RowWriter::Json(w) => w.finish(),
        }
    }
}
