//! Command results and how they reach disk.

use std::path::Path;

use anyhow::{Context, Result};

use hardy_core::report::fmt_float;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Everything a command produced: named files, a short console summary and
/// the exit code.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub files: Vec<(String, String)>,
    pub summary: String,
    pub code: i32,
}

impl Output {
    pub fn file(&mut self, name: impl Into<String>, body: String) {
        self.files.push((name.into(), body));
    }

    pub fn line(&mut self, text: impl AsRef<str>) {
        self.summary.push_str(text.as_ref());
        self.summary.push('\n');
    }

    /// Keeps the most severe code: negative beats inconclusive beats ok.
    pub fn escalate(&mut self, code: i32) {
        let rank = |c: i32| match c {
            EXIT_OK => 0,
            EXIT_INCONCLUSIVE => 1,
            EXIT_NEGATIVE => 2,
            _ => 3,
        };
        if rank(code) > rank(self.code) {
            self.code = code;
        }
    }
}

/// CSV text with 17-significant-digit floats.
pub struct Csv {
    writer: csv::Writer<Vec<u8>>,
}

pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Flag(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Flag(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        let fields: Vec<String> = cells
            .into_iter()
            .map(|c| match c {
                Cell::Int(i) => i.to_string(),
                Cell::Float(x) => fmt_float(x),
                Cell::Text(s) => s,
                Cell::Flag(b) => b.to_string(),
            })
            .collect();
        self.writer.write_record(&fields).expect("in-memory write");
    }

    pub fn finish(self) -> String {
        String::from_utf8(self.writer.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

fn timestamp_line() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    format!("# generated at unix time {secs}\n")
}

/// Writes every file under `dir`, prefixing a timestamp line unless disabled.
pub fn write_files(out: &Output, dir: &Path, timestamp: bool) -> Result<()> {
    if out.files.is_empty() {
        return Ok(());
    }
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    for (name, body) in &out.files {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
        }
        let text = if timestamp {
            timestamp_line() + body
        } else {
            body.clone()
        };
        std::fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut c = Csv::new(&["m", "value", "ok"]);
        c.row(vec![2usize.into(), 0.5.into(), true.into()]);
        assert_eq!(c.finish(), "m,value,ok\n2,5.0000000000000000e-1,true\n");
    }

    #[test]
    fn escalation_order() {
        let mut o = Output::default();
        o.escalate(EXIT_INCONCLUSIVE);
        o.escalate(EXIT_OK);
        assert_eq!(o.code, EXIT_INCONCLUSIVE);
        o.escalate(EXIT_NEGATIVE);
        o.escalate(EXIT_INCONCLUSIVE);
        assert_eq!(o.code, EXIT_NEGATIVE);
    }
}
