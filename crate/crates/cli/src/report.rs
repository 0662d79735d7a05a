//! `key=value` output.

use std::fmt::Display;
use std::io::Write;

use iotprice_core::numfmt::sig9;

/// Ordered `key=value` lines; floats use nine significant digits.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn float(&mut self, key: &str, value: f64) -> &mut Self {
        self.text(key, sig9(value))
    }

    pub fn text(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.lines.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write_to(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for (k, v) in &self.lines {
            writeln!(out, "{k}={v}")?;
        }
        Ok(())
    }
}
