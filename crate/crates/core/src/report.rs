//! Structured-text report writer (`key = value` lines grouped in `[section]`s).
//!
//! Output is deterministic: keys appear in insertion order and every float is
//! written with 17 significant digits.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::numeric::fmt17;

#[derive(Debug, Default, Clone)]
pub struct ReportWriter {
    buf: String,
}

impl ReportWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, text: &str) -> &mut Self {
        writeln!(self.buf, "# {text}").unwrap();
        self
    }

    pub fn section(&mut self, name: &str) -> &mut Self {
        if !self.buf.is_empty() {
            self.buf.push('\n');
        }
        writeln!(self.buf, "[{name}]").unwrap();
        self
    }

    pub fn text(&mut self, key: &str, value: &str) -> &mut Self {
        writeln!(self.buf, "{key} = {value:?}").unwrap();
        self
    }

    pub fn int(&mut self, key: &str, value: i64) -> &mut Self {
        writeln!(self.buf, "{key} = {value}").unwrap();
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        writeln!(self.buf, "{key} = {value}").unwrap();
        self
    }

    pub fn real(&mut self, key: &str, value: f64) -> &mut Self {
        writeln!(self.buf, "{key} = {}", fmt_float(value)).unwrap();
        self
    }

    pub fn complex(&mut self, key: &str, value: Complex64) -> &mut Self {
        writeln!(
            self.buf,
            "{key} = [{}, {}]",
            fmt_float(value.re),
            fmt_float(value.im)
        )
        .unwrap();
        self
    }

    pub fn reals(&mut self, key: &str, values: &[f64]) -> &mut Self {
        let items: Vec<String> = values.iter().map(|&v| fmt_float(v)).collect();
        writeln!(self.buf, "{key} = [{}]", items.join(", ")).unwrap();
        self
    }

    pub fn band(&mut self, key: &str, lo: i64, hi: i64) -> &mut Self {
        writeln!(self.buf, "{key} = [{lo}, {hi}]").unwrap();
        self
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// 17 significant digits, with `inf`/`nan` spelled the way TOML reads them.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        fmt17(x)
    }
}
