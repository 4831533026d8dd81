//! Minimal CSV emission: comma separated, `.` decimals, LF endings.
//!
//! Rust's float formatting ignores the locale, so `{}` is already safe.

use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Default, Clone)]
pub struct Table {
    buf: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut t = Self::default();
        t.row(header.iter().map(|h| h.to_string()));
        t
    }

    pub fn row(&mut self, fields: impl IntoIterator<Item = String>) {
        let mut first = true;
        for f in fields {
            if !first {
                self.buf.push(',');
            }
            first = false;
            if f.contains([',', '"', '\n']) {
                let _ = write!(self.buf, "\"{}\"", f.replace('"', "\"\""));
            } else {
                self.buf.push_str(&f);
            }
        }
        self.buf.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }

    /// Writes to `out`, or stdout when absent.
    pub fn emit(&self, out: Option<&Path>) -> std::io::Result<()> {
        match out {
            Some(p) => std::fs::write(p, &self.buf),
            None => {
                use std::io::Write;
                let mut s = std::io::stdout().lock();
                s.write_all(self.buf.as_bytes())?;
                s.flush()
            }
        }
    }
}

/// Fixed 15-digit rendering so reruns are byte-identical.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    let s = format!("{x:.15}");
    // Tiny negatives round to "-0.000…"; drop the sign so equal values print equally.
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

pub fn flag(b: bool) -> String {
    if b { "true" } else { "false" }.into()
}
