//! One report object, three renderings.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A named table of rows plus a pass/fail verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub name: String,
    pub pass: bool,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Section {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Section {
        Section {
            name: name.into(),
            pass: true,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width for section {}",
            self.name
        );
        self.rows.push(row);
    }

    /// Records a verdict; the section passes only if every check does.
    pub fn check(&mut self, ok: bool) -> bool {
        self.pass &= ok;
        ok
    }

    fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, v)| (c.to_string(), v.clone()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut obj = Map::new();
        obj.insert("name".into(), Value::String(self.name.clone()));
        obj.insert("pass".into(), Value::Bool(self.pass));
        obj.insert("rows".into(), Value::Array(rows));
        Value::Object(obj)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Report {
        Report {
            command: command.into(),
            sections: Vec::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.sections.iter().all(|s| s.pass)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("command".into(), Value::String(self.command.clone()));
        obj.insert("pass".into(), Value::Bool(self.pass()));
        obj.insert(
            "sections".into(),
            Value::Array(self.sections.iter().map(Section::to_json).collect()),
        );
        Value::Object(obj)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (k, section) in self.sections.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "# {} pass={}", section.name, section.pass);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&section.columns).expect("in-memory write");
            for row in &section.rows {
                w.write_record(row.iter().map(cell))
                    .expect("in-memory write");
            }
            out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf8"));
        }
        out
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        for section in &self.sections {
            let verdict = if section.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "== {} [{verdict}]", section.name);
            let cells: Vec<Vec<String>> = section
                .rows
                .iter()
                .map(|r| r.iter().map(cell).collect())
                .collect();
            let widths: Vec<usize> = section
                .columns
                .iter()
                .enumerate()
                .map(|(c, name)| {
                    cells
                        .iter()
                        .map(|r| r[c].len())
                        .chain([name.len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |items: Vec<&str>| {
                items
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            let _ = writeln!(out, "{}", line(section.columns.clone()));
            for r in &cells {
                let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{}: {}",
            self.command,
            if self.pass() { "PASS" } else { "FAIL" }
        );
        out
    }
}

/// Flat rendering of a JSON value for CSV and text output.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

/// Serializes any value for a report cell.
pub fn val<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        let mut s = Section::new("demo", &["m", "label", "items"]);
        s.push(vec![json!(3), json!("a,b"), json!(["1f", "2"])]);
        s.check(false);
        let mut r = Report::new("test");
        r.sections.push(s);
        r
    }

    #[test]
    fn json_keeps_column_order() {
        let text = sample().render(Format::Json);
        let m = text.find("\"m\"").unwrap();
        let label = text.find("\"label\"").unwrap();
        let items = text.find("\"items\"").unwrap();
        assert!(m < label && label < items);
        assert!(text.contains("\"pass\": false"));
    }

    #[test]
    fn csv_quotes_and_flattens() {
        let text = sample().render(Format::Csv);
        assert!(text.starts_with("# demo pass=false\nm,label,items\n"));
        assert!(text.contains("3,\"a,b\",1f 2"));
    }

    #[test]
    fn text_marks_failures() {
        let text = sample().render(Format::Text);
        assert!(text.contains("== demo [FAIL]"));
        assert!(text.ends_with("test: FAIL\n"));
    }
}
