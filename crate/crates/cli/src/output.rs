//! Deterministic output: JSON with fixed field order and every float
//! rendered as 17 significant digits, so identical runs are byte-identical
//! and parsed values round-trip exactly.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

/// serde_json formatter that renders floats in scientific notation with 16
/// fractional digits (17 significant digits).
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        debug_assert!(value.is_finite(), "non-finite value reached JSON output");
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> io::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    Ok(String::from_utf8(buf).expect("serde_json emits utf-8"))
}

/// Writes JSON (with trailing newline) to the path, or stdout when absent.
pub fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> io::Result<()> {
    let json = to_json_string(value)?;
    emit_text(&format!("{json}\n"), out)
}

pub fn emit_text(text: &str, out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
