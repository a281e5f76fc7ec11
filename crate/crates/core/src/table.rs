//! Result tables and their deterministic CSV / JSON rendering.

use serde_json::{json, Value};

/// How a column is printed in CSV. JSON always carries full precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Shortest decimal that round-trips.
    Exact,
    /// Two decimals, for dB.
    Db,
    /// Three significant figures, for powers in mW.
    Sig3,
    Integer,
    Flag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
    pub format: Format,
}

impl Column {
    pub fn new(name: &str, unit: &str, format: Format) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            format,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub command: String,
    pub descriptor_sha256: String,
    pub version: String,
    pub mode: String,
}

impl Provenance {
    pub fn new(command: &str, descriptor_sha256: &str, mode: &str) -> Self {
        Self {
            command: command.into(),
            descriptor_sha256: descriptor_sha256.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            mode: mode.into(),
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "descriptor_sha256": self.descriptor_sha256,
            "version": self.version,
            "mode": self.mode,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub provenance: Provenance,
    /// Extra `key=value` lines for the CSV header and JSON `notes`.
    pub notes: Vec<(String, String)>,
}

/// Shortest round-trip decimal; non-finite values print as `nan`/`inf`.
pub fn format_exact(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:?}")
    }
}

pub fn format_db(v: f64) -> String {
    if !v.is_finite() {
        return format_exact(v);
    }
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

pub fn format_sig3(v: f64) -> String {
    if !v.is_finite() {
        return format_exact(v);
    }
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = 2 - magnitude;
    if decimals >= 0 {
        let s = format!("{v:.*}", decimals as usize);
        // rounding can carry into a new digit (9.995 -> 10.00)
        let rounded: f64 = s.parse().unwrap_or(v);
        if rounded.abs() >= 10f64.powi(magnitude + 1) && decimals > 0 {
            return format!("{v:.*}", decimals as usize - 1);
        }
        s
    } else {
        let step = 10f64.powi(-decimals);
        format!("{}", (v / step).round() * step)
    }
}

impl ResultTable {
    pub fn new(columns: Vec<Column>, provenance: Provenance) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            provenance,
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row arity must match the columns");
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl std::fmt::Display) {
        self.notes.push((key.into(), value.to_string()));
    }

    fn cell_text(cell: &Cell, format: Format) -> String {
        match cell {
            Cell::Text(t) => t.clone(),
            Cell::Num(v) => match format {
                Format::Exact => format_exact(*v),
                Format::Db => format_db(*v),
                Format::Sig3 => format_sig3(*v),
                Format::Integer => format!("{}", *v as i64),
                Format::Flag => (if *v != 0.0 { "1" } else { "0" }).into(),
            },
        }
    }

    pub fn to_csv(&self) -> String {
        let p = &self.provenance;
        let mut out = String::new();
        out.push_str(&format!("# opo-reservoir {}\n", p.version));
        out.push_str(&format!("# command={}\n", p.command));
        out.push_str(&format!("# descriptor_sha256={}\n", p.descriptor_sha256));
        out.push_str(&format!("# mode={}\n", p.mode));
        for (k, v) in &self.notes {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let units: Vec<&str> = self.columns.iter().map(|c| c.unit.as_str()).collect();
        out.push_str(&format!("# units={}\n", units.join(",")));
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .zip(&self.columns)
                .map(|(cell, col)| Self::cell_text(cell, col.format))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|c| json!({"name": c.name, "unit": c.unit}))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .zip(&self.columns)
                        .map(|(cell, col)| match cell {
                            Cell::Text(t) => Value::String(t.clone()),
                            Cell::Num(v) if col.format == Format::Flag => Value::Bool(*v != 0.0),
                            // NaN has no JSON form
                            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
                        })
                        .collect(),
                )
            })
            .collect();
        let notes: serde_json::Map<String, Value> = self
            .notes
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        json!({
            "provenance": self.provenance.to_json(),
            "notes": notes,
            "columns": columns,
            "rows": rows,
        })
    }

    /// Column values by name, for tests and overlays.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c.name == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[idx] {
                    Cell::Num(v) => *v,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formats() {
        assert_eq!(format_exact(0.1), "0.1");
        assert_eq!(format_exact(1e-300), "1e-300");
        assert_eq!(format_exact(2.0), "2.0");
        assert_eq!(format_exact(f64::NAN), "nan");
        assert_eq!(format_db(-9.3575), "-9.36");
        assert_eq!(format_db(-0.001), "0.00");
        assert_eq!(format_sig3(44.63), "44.6");
        assert_eq!(format_sig3(12.19378), "12.2");
        assert_eq!(format_sig3(0.704529), "0.705");
        assert_eq!(format_sig3(-2.3), "-2.30");
        assert_eq!(format_sig3(1234.0), "1230");
        assert_eq!(format_sig3(9.9951), "10.0");
        assert_eq!(format_sig3(0.0), "0");
    }

    #[test]
    fn csv_and_json_rendering() {
        let mut t = ResultTable::new(
            vec![
                Column::new("r", "1", Format::Exact),
                Column::new("dB", "dB", Format::Db),
                Column::new("P", "mW", Format::Sig3),
                Column::new("flag", "", Format::Flag),
            ],
            Provenance::new("sweep", "abc", "canonical"),
        );
        t.push(vec![0.5.into(), (-3.1372).into(), 12.194.into(), 1.0.into()]);
        t.push(vec![0.75.into(), f64::NAN.into(), 0.7045.into(), 0.0.into()]);
        let csv = t.to_csv();
        assert!(csv.ends_with("r,dB,P,flag\n0.5,-3.14,12.2,1\n0.75,nan,0.705,0\n"));
        assert!(csv.contains("# descriptor_sha256=abc\n"));
        let j = t.to_json();
        assert_eq!(j["rows"][0][1], json!(-3.1372));
        assert_eq!(j["rows"][1][1], Value::Null);
        assert_eq!(j["rows"][0][3], json!(true));
        assert_eq!(t.column("P").unwrap(), vec![12.194, 0.7045]);
    }
}
