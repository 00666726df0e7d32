//! Deterministic file writers.
//!
//! Floating-point values in data files are rendered with 17 significant
//! digits in scientific notation so that parsing them back reproduces the
//! in-memory doubles exactly; rows are written in a fixed order regardless
//! of how the computation was parallelized.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// 17 significant digits, scientific notation, '.' decimal separator.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct TableWriter {
    out: BufWriter<File>,
}

impl TableWriter {
    pub fn create(path: &Path, header: &[&str]) -> std::io::Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{}", header.join(","))?;
        Ok(Self { out })
    }

    pub fn row(&mut self, cells: &[String]) -> std::io::Result<()> {
        writeln!(self.out, "{}", cells.join(","))
    }

    pub fn finish(mut self) -> std::io::Result<()> {
        self.out.flush()
    }
}

/// Minimal JSON emitter for the data artifacts.  Field order is the call
/// order, floats go through [`fmt_f64`]; used where byte-stable output
/// matters more than serde convenience.
pub struct JsonObject {
    buf: String,
    first: bool,
}

impl JsonObject {
    pub fn new() -> Self {
        Self { buf: String::from("{"), first: true }
    }

    fn key(&mut self, key: &str) {
        if !self.first {
            self.buf.push(',');
        }
        self.first = false;
        self.buf.push('"');
        self.buf.push_str(key);
        self.buf.push_str("\":");
    }

    pub fn field_raw(mut self, key: &str, raw: &str) -> Self {
        self.key(key);
        self.buf.push_str(raw);
        self
    }

    pub fn field_str(self, key: &str, value: &str) -> Self {
        let quoted = format!("\"{}\"", value.replace('\\', "\\\\").replace('"', "\\\""));
        self.field_raw(key, &quoted)
    }

    pub fn field_f64(self, key: &str, value: f64) -> Self {
        if value.is_finite() {
            // the 17-digit scientific form is a valid JSON number
            self.field_raw(key, &fmt_f64(value))
        } else {
            self.field_raw(key, &format!("\"{value}\""))
        }
    }

    pub fn field_u64(self, key: &str, value: u64) -> Self {
        self.field_raw(key, &value.to_string())
    }

    pub fn field_bool(self, key: &str, value: bool) -> Self {
        self.field_raw(key, if value { "true" } else { "false" })
    }

    pub fn finish(mut self) -> String {
        self.buf.push('}');
        self.buf
    }
}

impl Default for JsonObject {
    fn default() -> Self {
        Self::new()
    }
}

pub fn json_array<I: IntoIterator<Item = String>>(items: I) -> String {
    let mut buf = String::from("[");
    for (k, item) in items.into_iter().enumerate() {
        if k > 0 {
            buf.push(',');
        }
        buf.push_str(&item);
    }
    buf.push(']');
    buf
}

pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_the_17_digit_format() {
        for x in [
            0.0,
            1.0,
            -1.0 / 3.0,
            std::f64::consts::PI,
            6.02e23,
            -1.7976931348623157e308,
            5e-324,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s} -> {back}");
        }
    }

    #[test]
    fn json_object_is_ordered_and_escaped() {
        let s = JsonObject::new()
            .field_str("name", "a\"b")
            .field_u64("count", 3)
            .field_bool("ok", true)
            .finish();
        assert_eq!(s, "{\"name\":\"a\\\"b\",\"count\":3,\"ok\":true}");
    }
}
