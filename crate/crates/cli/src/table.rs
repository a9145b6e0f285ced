//! Tabular experiment output: CSV with `#` metadata lines, or a JSON mirror.

use crate::error::{CliError, CliResult};
use serde_json::{json, Map, Value as Json};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Num(x) => Some(*x),
            Cell::Bool(b) => Some(f64::from(u8::from(*b))),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => x.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) | Cell::Missing => Json::Null,
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub experiment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Ordered key/value pairs written as `# key: value`.
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(experiment: &str, columns: &[&str]) -> Self {
        Self {
            experiment: experiment.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> CliResult<()> {
        if row.len() != self.columns.len() {
            return Err(CliError::Numerical(format!(
                "row has {} cells, table {} has {} columns",
                row.len(),
                self.experiment,
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric view of one column; non-numeric cells become NaN.
    pub fn column(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.column_index(name) else {
            return Vec::new();
        };
        self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn cell(&self, row: usize, name: &str) -> Option<&Cell> {
        self.rows.get(row)?.get(self.column_index(name)?)
    }

    fn header(&self, timestamp: Option<u64>) -> Vec<(String, String)> {
        let mut h = vec![
            ("fidest".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("experiment".to_string(), self.experiment.clone()),
        ];
        h.extend(self.metadata.iter().cloned());
        if let Some(t) = timestamp {
            h.push(("timestamp_unix".to_string(), t.to_string()));
        }
        h
    }

    pub fn to_csv(&self, timestamp: Option<u64>) -> String {
        let mut out = String::new();
        for (k, v) in self.header(timestamp) {
            let _ = writeln!(out, "# {k}: {}", v.replace('\n', " "));
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self, timestamp: Option<u64>) -> String {
        let meta: Map<String, Json> = self
            .header(timestamp)
            .into_iter()
            .map(|(k, v)| (k, Json::String(v)))
            .collect();
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Json> = self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect();
                Json::Object(obj)
            })
            .collect();
        let doc = json!({ "metadata": meta, "columns": self.columns, "rows": rows });
        serde_json::to_string_pretty(&doc).expect("table serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new("demo", &["n", "value", "label"]);
        t.meta("seed", 7);
        t.push(vec![3usize.into(), 0.25.into(), "a,b".into()]).unwrap();
        t.push(vec![4usize.into(), Cell::Missing, "plain".into()]).unwrap();
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv(None);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], format!("# fidest: {}", env!("CARGO_PKG_VERSION")));
        assert_eq!(lines[2], "# seed: 7");
        assert_eq!(lines[3], "n,value,label");
        assert_eq!(lines[4], "3,0.25,\"a,b\"");
        assert_eq!(lines[5], "4,,plain");
        assert!(!csv.contains("timestamp"));
        assert!(sample().to_csv(Some(5)).contains("# timestamp_unix: 5"));
    }

    #[test]
    fn json_mirror_and_column_access() {
        let t = sample();
        let v: Json = serde_json::from_str(&t.to_json(None)).unwrap();
        assert_eq!(v["rows"][0]["value"], json!(0.25));
        assert!(v["rows"][1]["value"].is_null());
        assert_eq!(v["metadata"]["seed"], json!("7"));
        assert_eq!(t.column("n"), vec![3.0, 4.0]);
        assert!(t.column("value")[1].is_nan());
    }

    #[test]
    fn ragged_rows_rejected() {
        let mut t = ResultTable::new("demo", &["a", "b"]);
        assert!(t.push(vec![1usize.into()]).is_err());
    }
}
