//! Plain CSV and JSON writers for curves and reports.
//!
//! Every file may start with `#`-prefixed comment lines. Floats use Rust's
//! shortest round-trip formatting so reruns are byte-identical.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// In-memory CSV table.
#[derive(Clone, Debug, Default)]
pub struct Csv {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<String>,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self { comments: Vec::new(), header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    /// Adds comment lines; multi-line text is split.
    pub fn comment(mut self, text: &str) -> Self {
        self.comments.extend(text.lines().map(str::to_string));
        self
    }

    pub fn push_comment(&mut self, text: &str) {
        self.comments.extend(text.lines().map(str::to_string));
    }

    /// Inserts comment lines ahead of the existing ones.
    pub fn prepend_comment(&mut self, text: &str) {
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        lines.append(&mut self.comments);
        self.comments = lines;
    }

    pub fn row(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.header.len());
        let mut line = String::new();
        for (k, v) in values.iter().enumerate() {
            if k > 0 {
                line.push(',');
            }
            push_f64(&mut line, *v);
        }
        self.rows.push(line);
    }

    /// Row of preformatted cells.
    pub fn row_text<S: AsRef<str>>(&mut self, cells: &[S]) {
        self.rows.push(cells.iter().map(|c| c.as_ref()).collect::<Vec<_>>().join(","));
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(self.render().as_bytes())?;
        f.flush()?;
        Ok(())
    }
}

/// Shortest round-trip text, switching to exponent form for very small or
/// very large magnitudes.
pub fn push_f64(out: &mut String, v: f64) {
    let a = v.abs();
    if a == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        let _ = write!(out, "{v}");
    } else {
        let _ = write!(out, "{v:e}");
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
