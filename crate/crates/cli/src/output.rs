use std::io::{self, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Tsv,
}

impl OutputFormat {
    fn separator(self) -> char {
        match self {
            OutputFormat::Csv => ',',
            OutputFormat::Tsv => '\t',
        }
    }
}

/// One table line: either a data row or an in-table comment (used to
/// separate sweep sections).
#[derive(Debug, Clone)]
pub enum Line {
    Row(Vec<String>),
    Comment(String),
}

/// A fully computed result table. Rendering is the last step, so a run
/// that fails never leaves half a table behind.
#[derive(Debug, Clone)]
pub struct Document {
    /// Header comments, written `# `-prefixed before the column line.
    pub comments: Vec<String>,
    pub columns: Vec<&'static str>,
    pub lines: Vec<Line>,
}

impl Document {
    pub fn render(&self, format: OutputFormat) -> String {
        let sep = format.separator();
        let mut out = String::new();
        for comment in &self.comments {
            out.push_str("# ");
            out.push_str(comment);
            out.push('\n');
        }
        out.push_str(&self.columns.join(&sep.to_string()));
        out.push('\n');
        for line in &self.lines {
            match line {
                Line::Row(cells) => out.push_str(&cells.join(&sep.to_string())),
                Line::Comment(comment) => {
                    out.push_str("# ");
                    out.push_str(comment);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Six significant digits, plain decimal notation, `inf` for unbounded
/// values.
pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".to_string() } else { "-inf".to_string() };
    }
    if v == 0.0 {
        return "0.00000".to_string();
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (5 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Counts render without a decimal point; anything else falls back to
/// [`fmt_real`].
pub fn fmt_axis(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 9e15 {
        format!("{}", v as i64)
    } else {
        fmt_real(v)
    }
}

/// Writes to standard output, or atomically to `path`: the text lands in
/// a sibling temp file first and is renamed into place, so an interrupted
/// or failed write never leaves a partial table at the destination.
pub fn emit(text: &str, path: Option<&Path>) -> io::Result<()> {
    let Some(path) = path else {
        return io::stdout().write_all(text.as_bytes());
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}
